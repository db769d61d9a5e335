//! CSV extraction from saved reports.

use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{config_err, CliResult};
use crate::io::write_atomic;
use crate::report::Report;

fn num(v: &Value) -> CliResult<f64> {
    v.as_f64().ok_or_else(|| config_err(format!("report: expected a number, found {v}")))
}

fn array<'a>(v: &'a Value, what: &str) -> CliResult<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| config_err(format!("report: `{what}` is not an array")))
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| config_err(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| config_err(format!("csv: {e}")))?;
    write_atomic(path, &bytes)
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

/// Writes every CSV the report supports into `dir` and returns the paths:
/// `eigenvalues.csv`, `sweep.csv`, `convergence.csv`, `invariance.csv`,
/// `character.csv`.
pub fn emit_plotdata(report: &Report, dir: &Path) -> CliResult<Vec<PathBuf>> {
    let out = &report.outputs;
    let mut written = Vec::new();
    let mut emit = |name: &str, header: Vec<String>, rows: Vec<Vec<String>>| -> CliResult<()> {
        let p = dir.join(name);
        write_csv(&p, &header, &rows)?;
        written.push(p);
        Ok(())
    };
    if let Some(e) = out.get("eigenvalues") {
        let rows = array(e, "eigenvalues")?
            .iter()
            .enumerate()
            .map(|(i, v)| Ok(vec![i.to_string(), fmt(num(v)?)]))
            .collect::<CliResult<_>>()?;
        emit("eigenvalues.csv", vec!["index".into(), "eigenvalue".into()], rows)?;
    }
    if let Some(s) = out.get("sweep") {
        let pts = array(s, "sweep")?;
        let k = pts.first().and_then(|p| p["params"].as_array()).map_or(0, |a| a.len());
        let mut header: Vec<String> = (1..=k).map(|i| format!("w{i}")).collect();
        header.extend(["residual".into(), "hyperbolic_residual".into()]);
        let rows = pts
            .iter()
            .map(|p| {
                let mut row: Vec<String> =
                    array(&p["params"], "params")?.iter().map(|x| num(x).map(fmt)).collect::<CliResult<_>>()?;
                row.push(fmt(num(&p["residual"])?));
                row.push(fmt(num(&p["hyperbolic_residual"])?));
                Ok(row)
            })
            .collect::<CliResult<_>>()?;
        emit("sweep.csv", header, rows)?;
    }
    if let Some(c) = out.get("convergence") {
        let rows = array(c, "convergence")?
            .iter()
            .map(|p| {
                Ok(vec![
                    p["points_per_axis"].to_string(),
                    fmt(num(&p["value"]["re"])?),
                    fmt(num(&p["value"]["im"])?),
                    fmt(num(&p["difference_to_finest"])?),
                ])
            })
            .collect::<CliResult<_>>()?;
        let header = ["points_per_axis", "re", "im", "difference_to_finest"].map(String::from).to_vec();
        emit("convergence.csv", header, rows)?;
    }
    if let Some(v) = out.get("invariance") {
        let rows = array(v, "invariance")?
            .iter()
            .enumerate()
            .map(|(i, x)| Ok(vec![i.to_string(), fmt(num(x)?)]))
            .collect::<CliResult<_>>()?;
        emit("invariance.csv", vec!["sample".into(), "residual".into()], rows)?;
    }
    if let Some(v) = out.get("values") {
        let rows = array(v, "values")?
            .iter()
            .map(|p| {
                let opt = |x: &Value| if x.is_null() { Ok(String::new()) } else { num(x).map(fmt) };
                Ok(vec![
                    p["function_id"].as_str().unwrap_or_default().to_string(),
                    fmt(num(&p["value_re"])?),
                    fmt(num(&p["value_im"])?),
                    opt(&p["reference"]["re"])?,
                    opt(&p["reference"]["im"])?,
                    opt(&p["relative_difference"])?,
                ])
            })
            .collect::<CliResult<_>>()?;
        let header = ["function_id", "re", "im", "reference_re", "reference_im", "relative_difference"]
            .map(String::from)
            .to_vec();
        emit("character.csv", header, rows)?;
    }
    Ok(written)
}
