//! Loss matrices on disk.
//!
//! JSON: `{"z": [...], "y": [...], "matrix": [[...], ...]}`.
//! CSV: header row holds the observation labels after a leading corner cell,
//! each following row is a prediction label followed by its losses.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FiniteLoss;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct LossFile {
    z: Vec<String>,
    y: Vec<String>,
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<LossFile> for FiniteLoss {
    type Error = Error;

    fn try_from(f: LossFile) -> Result<Self> {
        FiniteLoss::new(f.z, f.y, f.matrix)
    }
}

impl From<FiniteLoss> for LossFile {
    fn from(loss: FiniteLoss) -> Self {
        let matrix = loss.rows().map(<[f64]>::to_vec).collect();
        LossFile { z: loss.z_labels, y: loss.y_labels, matrix }
    }
}

impl FiniteLoss {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.len() < 2 {
            return Err(Error::Parse("loss CSV header needs a corner cell and at least one observation label".into()));
        }
        let y_labels: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
        let mut z_labels = Vec::new();
        let mut rows = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let mut cells = record.iter();
            let label = cells.next().unwrap_or_default().to_owned();
            let row = cells
                .map(|c| {
                    c.parse::<f64>().map_err(|e| {
                        Error::Parse(format!("loss CSV data row {}: cannot parse {c:?}: {e}", line + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            z_labels.push(label);
            rows.push(row);
        }
        FiniteLoss::new(z_labels, y_labels, rows)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["z".to_owned()];
        header.extend(self.y_labels.iter().cloned());
        w.write_record(&header)?;
        for (label, row) in self.z_labels.iter().zip(self.rows()) {
            let mut rec = vec![label.clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Loads a loss from a `.json` or `.csv` file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => {
                let mut s = String::new();
                std::io::BufReader::new(file).read_to_string(&mut s)?;
                Self::from_json_str(&s)
            }
            Some("csv") => Self::from_csv_reader(file),
            _ => Err(Error::Parse(format!("{}: expected a .json or .csv loss file", path.display()))),
        }
    }
}
