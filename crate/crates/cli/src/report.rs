use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use orbitk::character::QuadratureSpec;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, CliResult, ExitStatus};

/// The JSON record of one command run. Everything except `timings` is a
/// deterministic function of the configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub tool_version: String,
    pub inputs: serde_json::Value,
    pub outputs: serde_json::Value,
    /// Property checks that failed.
    pub findings: Vec<String>,
    pub exit_code: i32,
    /// Calibration scalar of every backend that produced a number.
    pub calibration: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
    /// Seconds.
    pub timings: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: &str, inputs: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs,
            outputs: serde_json::Value::Null,
            findings: Vec::new(),
            exit_code: 0,
            calibration: BTreeMap::new(),
            quadrature: None,
            timings: BTreeMap::new(),
        }
    }

    pub fn status(&self) -> ExitStatus {
        match self.exit_code {
            0 => ExitStatus::Success,
            1 => ExitStatus::Finding,
            2 => ExitStatus::MathInput,
            _ => ExitStatus::Config,
        }
    }

    pub(crate) fn finding(&mut self, msg: String) {
        self.findings.push(msg);
        self.exit_code = self.exit_code.max(ExitStatus::Finding.code());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are finite");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| config_err(format!("report: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The report with timings cleared, for reproducibility comparisons.
    pub fn without_timings(&self) -> Self {
        Self { timings: BTreeMap::new(), ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C64 {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for C64 {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// A complex matrix as separate real and imaginary row arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&nalgebra::DMatrix<Complex64>> for ComplexMatrix {
    fn from(m: &nalgebra::DMatrix<Complex64>) -> Self {
        let rows = |f: fn(&Complex64) -> f64| {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        Self { re: rows(|z| z.re), im: rows(|z| z.im) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexVector {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&nalgebra::DVector<Complex64>> for ComplexVector {
    fn from(v: &nalgebra::DVector<Complex64>) -> Self {
        Self { re: v.iter().map(|z| z.re).collect(), im: v.iter().map(|z| z.im).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_is_lossless() {
        let mut r = Report::new("character", serde_json::json!({"algebra": {"builtin": "heisenberg"}}));
        r.outputs = serde_json::json!({"value": 0.1 + 0.2, "tiny": 1e-300, "third": 1.0 / 3.0});
        r.calibration.insert("lipsman".into(), 1.0000000000000002);
        r.timings.insert("total".into(), 0.25);
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), r.to_json());
    }
}
