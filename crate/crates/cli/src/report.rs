//! Verification reports and their CSV/JSON forms.

use std::io::Write;
use std::time::Instant;

use akmass::ale_mass::MassEstimate;
use serde::Serialize;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub anchor: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub samples: usize,
    pub ms: u64,
}

impl CheckRecord {
    /// Passes when the residual is finite and at most the tolerance.
    pub fn new(check_id: impl Into<String>, anchor: &'static str, max_residual: f64, tolerance: f64, samples: usize) -> Self {
        let pass = max_residual.is_finite() && max_residual <= tolerance;
        Self { check_id: check_id.into(), anchor, max_residual, tolerance, pass, samples, ms: 0 }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerificationReport {
    pub records: Vec<CheckRecord>,
    pub pass: bool,
    #[serde(skip)]
    timings: bool,
}

impl VerificationReport {
    pub fn new(timings: bool) -> Self {
        Self { records: Vec::new(), pass: true, timings }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.pass &= record.pass;
        self.records.push(record);
    }

    /// Runs `f` and records its result; wall time is kept only with timings on.
    pub fn timed<F>(&mut self, f: F) -> Result<(), CliError>
    where
        F: FnOnce() -> Result<CheckRecord, CliError>,
    {
        let t = Instant::now();
        let mut rec = f()?;
        if self.timings {
            rec.ms = t.elapsed().as_millis() as u64;
        }
        self.push(rec);
        Ok(())
    }

    pub fn extend(&mut self, other: VerificationReport) {
        for r in other.records {
            self.push(r);
        }
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(["check_id", "anchor", "max_residual", "tolerance", "pass", "samples", "ms"])?;
        for r in &self.records {
            w.serialize(r)?;
        }
        finish(w)
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

/// `radius,value,fit_residual` rows followed by `extrapolated,<value>,<error_bar>`.
pub fn mass_table_csv(est: &MassEstimate) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["radius", "value", "fit_residual"])?;
    for ((r, v), e) in est.radii.iter().zip(&est.values).zip(&est.fit_residuals) {
        w.serialize((r, v, e))?;
    }
    w.serialize(("extrapolated", est.extrapolated, est.error_bar))?;
    finish(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Writes to `path`, or stdout when absent.
pub fn emit(text: &str, path: Option<&std::path::Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
