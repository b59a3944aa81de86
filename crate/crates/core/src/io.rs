// SPDX-License-Identifier: MIT OR Apache-2.0

//! CSV panels: one row per time point, one column per coordinate.
//!
//! A single header row is recognised when any cell of the first record does
//! not parse as a number.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::data::DataMatrix;
use crate::error::{Error, Result};

fn parse_cell(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok()
}

/// Reads a panel from any reader. Line numbers in errors are 1-based
/// physical lines.
pub fn read_csv<R: Read>(input: R) -> Result<DataMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut values = Vec::new();
    let mut width = None;
    let mut n = 0;
    let mut record = csv::StringRecord::new();
    let mut first = true;
    while reader.read_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line() as usize);
        if first {
            first = false;
            if record.iter().any(|c| parse_cell(c).is_none()) {
                continue;
            }
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow {
                line,
                expected,
                found: record.len(),
            });
        }
        for (col, cell) in record.iter().enumerate() {
            let v = parse_cell(cell).ok_or_else(|| Error::NonNumeric {
                line,
                col: col + 1,
                value: cell.to_owned(),
            })?;
            values.push(v);
        }
        n += 1;
    }
    match width {
        None => Err(Error::EmptyInput),
        Some(p) => DataMatrix::new(n, p, values),
    }
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<DataMatrix> {
    read_csv(File::open(path)?)
}

/// Writes values with 17 significant digits, enough to recover every `f64`
/// exactly.
pub fn write_csv<W: Write>(x: &DataMatrix, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in x.rows() {
        w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(x: &DataMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_csv(x, File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_body() {
        let x = read_csv("1,2\n3,4\n5,6\n7,8\n".as_bytes()).unwrap();
        assert_eq!((x.n(), x.p()), (4, 2));
        assert_eq!(x.row(2), &[5.0, 6.0]);
    }

    #[test]
    fn header_is_skipped() {
        let x = read_csv("a,b\n1,2\n3,4\n5,6\n7,8\n".as_bytes()).unwrap();
        assert_eq!((x.n(), x.p()), (4, 2));
        assert_eq!(x.row(0), &[1.0, 2.0]);
    }

    #[test]
    fn ragged_row_names_line() {
        match read_csv("a,b\n1,2\n3,4,5\n".as_bytes()) {
            Err(Error::RaggedRow { line, expected, found }) => assert_eq!((line, expected, found), (3, 2, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_cell_and_empty() {
        match read_csv("1,2\n3,x\n".as_bytes()) {
            Err(Error::NonNumeric { line, col, value }) => {
                assert_eq!((line, col, value.as_str()), (2, 2, "x"))
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(read_csv("".as_bytes()), Err(Error::EmptyInput)));
        assert!(matches!(read_csv("x,y\n".as_bytes()), Err(Error::EmptyInput)));
        assert!(matches!(read_csv("1,NaN\n".as_bytes()), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn round_trip_is_lossless() {
        let vals = vec![0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE, -0.0];
        let x = DataMatrix::new(3, 2, vals).unwrap();
        let mut buf = Vec::new();
        write_csv(&x, &mut buf).unwrap();
        let y = read_csv(buf.as_slice()).unwrap();
        assert_eq!(x.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                   y.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}
