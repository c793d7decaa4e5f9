//! CSV interchange format.
//!
//! Header row of column names, comma delimiter, `.` decimal point, numeric
//! cells at 17 significant digits so 64-bit floats survive a round trip
//! bit-exactly. Datasets are written with columns `x0..` then `y0..`.
//! Parse errors name the 1-based file line and 0-based column.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::dataset::{validate_dataset, Dataset};
use crate::error::{Error, Result};

/// Format one value at 17 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write a dataset in the interchange format.
pub fn write_dataset<W: Write>(dataset: &Dataset, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    let mut header = Vec::new();
    for d in 0..dataset.x_dim() {
        header.push(format!("x{d}"));
    }
    for d in 0..dataset.y_dim() {
        header.push(format!("y{d}"));
    }
    writeln!(w, "{}", header.join(","))?;
    for i in 0..dataset.n() {
        let cells: Vec<String> = dataset
            .x_row(i)
            .iter()
            .chain(dataset.y_row(i))
            .map(|&v| format_value(v))
            .collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dataset_path(dataset: &Dataset, path: &Path) -> Result<()> {
    write_dataset(dataset, File::create(path)?)
}

/// A parsed numeric table: header names and row-major values.
#[derive(Clone, Debug)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Read a headered numeric CSV.
pub fn read_table<R: Read>(input: R) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(input));
    let headers = reader
        .headers()?
        .iter()
        .map(|h| h.to_string())
        .collect::<Vec<_>>();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let mut row = Vec::with_capacity(record.len());
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::ParseCell {
                line,
                col,
                text: cell.to_string(),
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    Ok(Table { headers, rows })
}

pub fn read_table_path(path: &Path) -> Result<Table> {
    read_table(File::open(path)?)
}

/// Split a table into x/y row tables by column index.
#[allow(clippy::type_complexity)]
pub fn split_columns(
    rows: &[Vec<f64>],
    x_cols: &[usize],
    y_cols: &[usize],
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    for &c in x_cols.iter().chain(y_cols) {
        if c >= ncols {
            return Err(Error::ColumnOutOfRange { col: c, ncols });
        }
    }
    let pick = |cols: &[usize]| -> Vec<Vec<f64>> {
        rows.iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect()
    };
    Ok((pick(x_cols), pick(y_cols)))
}

/// Read a dataset back from the interchange format, taking the given
/// column indices as the X and Y sides.
pub fn read_dataset<R: Read>(input: R, x_cols: &[usize], y_cols: &[usize]) -> Result<Dataset> {
    let table = read_table(input)?;
    if table.rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let (x, y) = split_columns(&table.rows, x_cols, y_cols)?;
    validate_dataset(&x, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::rng_from;
    use rand::Rng;

    #[test]
    fn round_trip_is_bit_exact() {
        let mut rng = rng_from(12);
        let x: Vec<Vec<f64>> = (0..200)
            .map(|_| vec![rng.random::<f64>() * 1e3 - 500.0, rng.random::<f64>() * 1e-7])
            .collect();
        let y: Vec<Vec<f64>> = (0..200)
            .map(|_| vec![(rng.random::<u32>() % 7) as f64])
            .collect();
        let ds = validate_dataset(&x, &y).unwrap();
        let mut buf = Vec::new();
        write_dataset(&ds, &mut buf).unwrap();
        let back = read_dataset(buf.as_slice(), &[0, 1], &[2]).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn writes_are_deterministic() {
        let ds = validate_dataset(&[vec![1.0 / 3.0]], &[vec![2.0 / 7.0]]).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_dataset(&ds, &mut a).unwrap();
        write_dataset(&ds, &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("x0,y0\n"));
    }

    #[test]
    fn parse_error_names_line_and_column() {
        let input = "x0,y0\n1.0,2.0\n3.0,oops\n";
        let err = read_dataset(input.as_bytes(), &[0], &[1]).unwrap_err();
        match err {
            Error::ParseCell { line, col, text } => {
                assert_eq!(line, 3);
                assert_eq!(col, 1);
                assert_eq!(text, "oops");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn column_selection_bounds_checked() {
        let input = "a,b\n1,2\n";
        let err = read_dataset(input.as_bytes(), &[0], &[5]).unwrap_err();
        assert!(matches!(err, Error::ColumnOutOfRange { col: 5, ncols: 2 }));
    }
}
