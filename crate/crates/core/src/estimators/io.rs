//! Datasets as CSV: columns `x_0 .. x_{d-1}` and `y`, where `y` is a label
//! string of the paired loss.

use std::io::{Read, Write};
use std::path::Path;

use super::SampleSet;
use crate::error::{Error, Result};
use crate::loss::FiniteLoss;

fn coordinate_columns(header: &csv::StringRecord) -> Result<Vec<usize>> {
    let mut cols = Vec::new();
    for d in 0.. {
        match header.iter().position(|h| h == format!("x_{d}")) {
            Some(c) => cols.push(c),
            None => break,
        }
    }
    if cols.is_empty() {
        return Err(Error::Parse("CSV header has no x_0 column".into()));
    }
    Ok(cols)
}

fn parse_cell(cell: &str, row: usize, column: &str) -> Result<f64> {
    cell.parse::<f64>()
        .map_err(|e| Error::Parse(format!("data row {row}, column {column}: cannot parse {cell:?}: {e}")))
}

impl SampleSet {
    pub fn from_csv_reader<R: Read>(reader: R, loss: &FiniteLoss) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers()?.clone();
        let cols = coordinate_columns(&header)?;
        let ycol = header
            .iter()
            .position(|h| h == "y")
            .ok_or_else(|| Error::Parse("CSV header has no y column".into()))?;
        let mut inputs = Vec::new();
        let mut labels = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            for (d, &c) in cols.iter().enumerate() {
                inputs.push(parse_cell(record.get(c).unwrap_or_default(), row + 1, &format!("x_{d}"))?);
            }
            let label = record.get(ycol).unwrap_or_default();
            let y = loss
                .y_index(label)
                .ok_or_else(|| Error::Parse(format!("data row {}: unknown label {label:?}", row + 1)))?;
            labels.push(y);
        }
        Self::new(cols.len(), inputs, labels)
    }

    pub fn load_csv(path: impl AsRef<Path>, loss: &FiniteLoss) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?, loss)
    }

    pub fn write_csv<W: Write>(&self, writer: W, loss: &FiniteLoss) -> Result<()> {
        self.check_labels(loss.n_y())?;
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (0..self.dim()).map(|d| format!("x_{d}")).collect();
        header.push("y".into());
        w.write_record(&header)?;
        for (p, &y) in self.points().zip(self.labels()) {
            let mut rec: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
            rec.push(loss.y_labels()[y].clone());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads query points from the `x_*` columns of a CSV; other columns are
/// ignored.
pub fn read_points_csv<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    let cols = coordinate_columns(&header)?;
    let mut out = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let p = cols
            .iter()
            .enumerate()
            .map(|(d, &c)| parse_cell(record.get(c).unwrap_or_default(), row + 1, &format!("x_{d}")))
            .collect::<Result<Vec<f64>>>()?;
        out.push(p);
    }
    Ok(out)
}
