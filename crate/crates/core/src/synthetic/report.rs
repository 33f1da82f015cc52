//! Machine-readable rate reports. Floats in CSV bodies are written with 17
//! significant digits so that identical runs give identical bytes.

use std::io::Write;

use super::experiment::RateReport;
use crate::error::Result;

/// `x` in scientific notation with 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

impl RateReport {
    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Long form: one row per `(n, trial)`.
    pub fn write_long_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["n", "trial", "excess_risk"])?;
        for (s, risks) in self.per_n.iter().zip(&self.trial_risks) {
            for (t, &r) in risks.iter().enumerate() {
                w.write_record([s.n.to_string(), t.to_string(), sig17(r)])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// One row per `n`: mean, standard error, number of zero-risk trials.
    pub fn write_summary_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["n", "mean", "stderr", "zero_count"])?;
        for s in &self.per_n {
            w.write_record([s.n.to_string(), sig17(s.mean_excess_risk), sig17(s.stderr), s.zero_count.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// One-line comparison of the fitted and theoretical slopes.
    pub fn summary_line(&self) -> String {
        let fitted = self.fitted_slope.map_or_else(|| "undefined".to_owned(), |s| format!("{s:.3}"));
        let theory = self.theoretical_slope.map_or_else(|| "n/a".to_owned(), |s| format!("{s:.3}"));
        format!("fitted {fitted} vs theory {theory}")
    }
}
