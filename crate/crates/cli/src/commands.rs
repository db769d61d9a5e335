//! One function per subcommand; each returns the report to be written.

use std::time::Instant;

use nalgebra::DVector;
use num_complex::Complex64;
use orbitk::calculus::{hyperbolic_relation_residual, j_relation_residual};
use orbitk::character::{CharacterBackend, QuadratureSpec};
use orbitk::lie::{Group, GroupElement};
use orbitk::positivity::{
    cauchy_schwarz_residual, gns_quotient, gram_invariance_residuals, gram_matrix, psd_report, GramMatrix,
    SchrodingerRep,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{config_err, CliResult, ExitStatus};
use crate::report::{ComplexMatrix, ComplexVector, Report, C64};

/// Subcommands that run from a configuration file.
pub const COMMANDS: [&str; 5] = ["check-algebra", "j-relation", "character", "positivity", "gns"];

pub fn run_command(name: &str, cfg: &RunConfig) -> CliResult<Report> {
    match name {
        "check-algebra" => check_algebra(cfg),
        "j-relation" => j_relation(cfg),
        "character" => character(cfg),
        "positivity" => positivity(cfg),
        "gns" => gns(cfg),
        other => Err(config_err(format!("unknown command `{other}`"))),
    }
}

fn start(name: &str, cfg: &RunConfig) -> CliResult<Report> {
    let inputs = serde_json::to_value(cfg).map_err(|e| config_err(e.to_string()))?;
    Ok(Report::new(name, inputs))
}

fn lap(report: &mut Report, label: &str, t: Instant) {
    report.timings.insert(label.to_string(), t.elapsed().as_secs_f64());
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("outputs are serializable")
}

#[derive(Serialize)]
struct AlgebraOutputs {
    dim: usize,
    names: Vec<String>,
    antisymmetry_residual: f64,
    jacobi_residual: f64,
    jacobi_threshold: f64,
    /// Absent when the bracket is not a Lie bracket.
    nilpotent: Option<bool>,
    step: Option<usize>,
    lower_central_series: Option<Vec<usize>>,
}

/// Antisymmetry, Jacobi and nilpotency diagnostics. A Jacobi violation is
/// reported and mapped to exit code 2.
pub fn check_algebra(cfg: &RunConfig) -> CliResult<Report> {
    let t = Instant::now();
    let mut report = start("check-algebra", cfg)?;
    let alg = cfg.build_algebra_with_tolerance(f64::INFINITY)?;
    let scale = alg.entries().iter().map(|e| e.value.abs()).fold(1.0, f64::max);
    let threshold = cfg.tolerances.tol * scale * scale;
    let jacobi_residual = alg.jacobi_residual();
    let lie = jacobi_residual <= threshold;
    let out = AlgebraOutputs {
        dim: alg.dim(),
        names: alg.names().to_vec(),
        antisymmetry_residual: alg.antisymmetry_residual(),
        jacobi_residual,
        jacobi_threshold: threshold,
        nilpotent: lie.then(|| alg.is_nilpotent()),
        step: if lie { alg.nilpotency().step() } else { None },
        lower_central_series: lie.then(|| alg.lower_central_series()),
    };
    if !lie {
        report
            .findings
            .push(format!("Jacobi identity violated: residual {:.3e} > {threshold:.3e}", out.jacobi_residual));
        report.exit_code = ExitStatus::MathInput.code();
    }
    report.outputs = to_value(&out);
    lap(&mut report, "total", t);
    Ok(report)
}

#[derive(Serialize)]
struct SweepPoint {
    params: Vec<f64>,
    residual: f64,
    hyperbolic_residual: f64,
}

/// `j_𝔤 = j_𝔪²/Δ_M` and its hyperbolic form over a grid (two-dimensional
/// 𝔪) or seeded random points in the coordinates of 𝔪.
pub fn j_relation(cfg: &RunConfig) -> CliResult<Report> {
    let t = Instant::now();
    let mut report = start("j-relation", cfg)?;
    let group = cfg.build_group()?;
    let alg = group.algebra();
    let m = cfg.subalgebra(alg)?;
    let sec = cfg.j_relation;
    if !(sec.range.is_finite() && sec.range > 0.0) {
        return Err(config_err("[j_relation] range must be positive"));
    }
    let k = m.dim();
    let params: Vec<Vec<f64>> = if k == 2 {
        if sec.grid_points < 2 {
            return Err(config_err("[j_relation] grid_points must be at least 2"));
        }
        let n = sec.grid_points;
        let axis: Vec<f64> = (0..n).map(|i| -sec.range + 2.0 * sec.range * i as f64 / (n - 1) as f64).collect();
        axis.iter().flat_map(|&a| axis.iter().map(move |&b| vec![a, b])).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(sec.seed);
        (0..sec.random_points).map(|_| (0..k).map(|_| rng.gen_range(-sec.range..=sec.range)).collect()).collect()
    };
    let mut sweep = Vec::with_capacity(params.len());
    for p in params {
        let w = m.embed(&DVector::from_column_slice(&p));
        let residual = j_relation_residual(alg, &m, &w)?;
        let hyperbolic_residual = hyperbolic_relation_residual(alg, &m, &w)?;
        sweep.push(SweepPoint { params: p, residual, hyperbolic_residual });
    }
    let max_residual = sweep.iter().map(|s| s.residual).fold(0.0, f64::max);
    let max_hyperbolic = sweep.iter().map(|s| s.hyperbolic_residual).fold(0.0, f64::max);
    let tol = cfg.tolerances.tol;
    if max_residual >= tol {
        report.finding(format!("j-relation residual {max_residual:.3e} >= {tol:.1e}"));
    }
    if max_hyperbolic >= tol {
        report.finding(format!("hyperbolic relation residual {max_hyperbolic:.3e} >= {tol:.1e}"));
    }
    report.outputs = json!({
        "subalgebra_dim": k,
        "points": sweep.len(),
        "max_residual": max_residual,
        "max_hyperbolic_residual": max_hyperbolic,
        "sweep": to_value(&sweep),
    });
    lap(&mut report, "total", t);
    Ok(report)
}

#[derive(Serialize)]
struct CharacterValue {
    backend: &'static str,
    function_id: String,
    value_re: f64,
    value_im: f64,
    calibration_scalar: f64,
    quadrature: QuadratureSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<C64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    relative_difference: Option<f64>,
}

#[derive(Serialize)]
struct RefinementPoint {
    points_per_axis: usize,
    value: C64,
    difference_to_finest: f64,
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if b.norm() > 0.0 {
        d / b.norm()
    } else {
        d
    }
}

/// Character values of the dictionary, an optional calibrated cross-check
/// against a reference backend, and an optional refinement study.
pub fn character(cfg: &RunConfig) -> CliResult<Report> {
    let t = Instant::now();
    let mut report = start("character", cfg)?;
    let group = cfg.build_group()?;
    let mut backend = cfg.backend(&group)?;
    let q = cfg.quadrature.spec()?;
    let fs = cfg.test_functions(group.dim())?;
    let ids = cfg.function_ids();
    report.quadrature = Some(q);
    let reference = match &cfg.character.reference {
        Some(spec) => {
            let r = cfg.build_backend(&group, spec)?;
            let first = fs.first().ok_or_else(|| config_err("calibration needs a nonempty [[dictionary]]"))?;
            backend.calibrate(&r, first, &q)?;
            report.calibration.insert(format!("reference:{}", r.name()), r.calibration());
            Some(r)
        }
        None => None,
    };
    report.calibration.insert(backend.name().to_string(), backend.calibration());
    lap(&mut report, "setup", t);
    let t = Instant::now();
    let mut values = Vec::with_capacity(fs.len());
    let mut worst: f64 = 0.0;
    for (id, f) in ids.iter().zip(&fs) {
        let v = backend.evaluate(f, &q)?;
        let (reference, relative_difference) = match &reference {
            Some(r) => {
                let rv = r.evaluate(f, &q)?;
                let d = relative(v, rv);
                worst = worst.max(d);
                (Some(rv.into()), Some(d))
            }
            None => (None, None),
        };
        values.push(CharacterValue {
            backend: backend.name(),
            function_id: id.clone(),
            value_re: v.re,
            value_im: v.im,
            calibration_scalar: backend.calibration(),
            quadrature: q,
            reference,
            relative_difference,
        });
    }
    lap(&mut report, "evaluate", t);
    if reference.is_some() && worst >= cfg.tolerances.agreement {
        report.finding(format!("backend disagreement {worst:.3e} >= {:.1e}", cfg.tolerances.agreement));
    }
    let t = Instant::now();
    let mut convergence = Vec::new();
    if let (false, Some(f)) = (cfg.character.refinement.is_empty(), fs.first()) {
        let raw: Vec<(usize, Complex64)> = cfg
            .character
            .refinement
            .iter()
            .map(|&n| {
                let qn = QuadratureSpec::new(q.scheme, q.radius, n)
                    .map_err(|e| config_err(format!("[character] refinement: {e}")))?;
                Ok((n, backend.evaluate(f, &qn)?))
            })
            .collect::<CliResult<_>>()?;
        let finest = raw.last().expect("nonempty").1;
        convergence = raw
            .into_iter()
            .map(|(n, v)| RefinementPoint {
                points_per_axis: n,
                value: v.into(),
                difference_to_finest: (v - finest).norm(),
            })
            .collect();
    }
    lap(&mut report, "refinement", t);
    let mut outputs = json!({
        "backend": to_value(&backend.describe()),
        "values": to_value(&values),
    });
    if reference.is_some() {
        outputs["max_relative_difference"] = json!(worst);
    }
    if !convergence.is_empty() {
        outputs["convergence"] = to_value(&convergence);
    }
    report.outputs = outputs;
    Ok(report)
}

fn gram_for(
    cfg: &RunConfig,
    report: &mut Report,
) -> CliResult<(Group, CharacterBackend, Vec<orbitk::character::TestFunction>, QuadratureSpec, GramMatrix)> {
    let t = Instant::now();
    let group = cfg.build_group()?;
    let backend = cfg.backend(&group)?;
    let q = cfg.quadrature.spec()?;
    let fs = cfg.test_functions(group.dim())?;
    report.quadrature = Some(q);
    report.calibration.insert(backend.name().to_string(), backend.calibration());
    let mut gram = gram_matrix(&backend, &fs, &q)?;
    gram.function_ids = cfg.function_ids();
    lap(report, "gram", t);
    Ok((group, backend, fs, q, gram))
}

fn random_element(group: &Group, rng: &mut ChaCha8Rng, radius: f64) -> CliResult<GroupElement> {
    let d = group.dim();
    let dir: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let r = radius * rng.gen_range(0.0..=1.0);
    let v = DVector::from_iterator(d, dir.iter().map(|x| x / n * r));
    Ok(group.exp(&v)?)
}

/// Gram matrix, PSD verdict, Cauchy–Schwarz and translation invariance.
pub fn positivity(cfg: &RunConfig) -> CliResult<Report> {
    let mut report = start("positivity", cfg)?;
    let (group, backend, fs, q, gram) = gram_for(cfg, &mut report)?;
    let tol = cfg.tolerances;
    let psd = psd_report(&gram, tol.psd);
    if !psd.psd {
        report.finding(format!(
            "Gram matrix is not PSD: min eigenvalue {:.3e} < -{:.3e}",
            psd.min_eigenvalue, psd.threshold
        ));
    }
    let cs = cauchy_schwarz_residual(&gram);
    let diag = (0..gram.size()).map(|i| gram.entries[(i, i)].re).fold(1.0, f64::max);
    if cs > 1e-8 * diag * diag {
        report.finding(format!("Cauchy-Schwarz violated by {cs:.3e}"));
    }
    let t = Instant::now();
    let sec = cfg.positivity;
    let mut invariance = Vec::new();
    if sec.invariance_samples > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(sec.seed);
        let pairs: Vec<(GroupElement, GroupElement)> = (0..sec.invariance_samples)
            .map(|_| {
                Ok((
                    random_element(&group, &mut rng, sec.invariance_radius)?,
                    random_element(&group, &mut rng, sec.invariance_radius)?,
                ))
            })
            .collect::<CliResult<_>>()?;
        invariance = gram_invariance_residuals(&backend, &fs, &pairs, &q)?;
    }
    lap(&mut report, "invariance", t);
    let max_invariance = invariance.iter().cloned().fold(0.0, f64::max);
    if max_invariance >= tol.invariance {
        report.finding(format!("Gram invariance residual {max_invariance:.3e} >= {:.1e}", tol.invariance));
    }
    let mut outputs = json!({
        "function_ids": gram.function_ids,
        "gram": to_value(&ComplexMatrix::from(&gram.entries)),
        "hermitian_residual": gram.hermitian_residual,
        "eigenvalues": psd.eigenvalues,
        "min_eigenvalue": psd.min_eigenvalue,
        "max_eigenvalue": psd.max_eigenvalue,
        "psd_threshold": psd.threshold,
        "psd": psd.psd,
        "cauchy_schwarz_residual": cs,
    });
    if !invariance.is_empty() {
        outputs["invariance"] = json!(invariance);
        outputs["max_invariance_residual"] = json!(max_invariance);
    }
    report.outputs = outputs;
    Ok(report)
}

/// GNS quotient of the dictionary span and, for the Heisenberg plane
/// backend, the comparison with the Schrödinger model.
pub fn gns(cfg: &RunConfig) -> CliResult<Report> {
    let mut report = start("gns", cfg)?;
    let (_, backend, fs, q, gram) = gram_for(cfg, &mut report)?;
    let tol = cfg.tolerances;
    let psd = psd_report(&gram, tol.psd);
    let mut outputs = json!({
        "function_ids": gram.function_ids,
        "gram": to_value(&ComplexMatrix::from(&gram.entries)),
        "eigenvalues": psd.eigenvalues,
        "psd": psd.psd,
    });
    if psd.psd {
        let quotient = gns_quotient(&gram, tol.psd)?;
        let kernel: Vec<ComplexVector> = quotient.kernel_basis.iter().map(ComplexVector::from).collect();
        outputs["rank"] = json!(quotient.rank);
        outputs["kernel_basis"] = to_value(&kernel);
        outputs["kernel_residual"] = json!(quotient.kernel_residual(&gram));
    } else {
        report
            .finding(format!("Gram matrix is not PSD: min eigenvalue {:.3e}; quotient undefined", psd.min_eigenvalue));
    }
    let sec = cfg.gns;
    if sec.schrodinger {
        let t = Instant::now();
        let gamma = backend
            .gamma()
            .ok_or_else(|| config_err("[gns] schrodinger comparison needs the heisenberg_plane backend"))?;
        let rep = SchrodingerRep::new(gamma, sec.model_half_width, sec.model_points)?;
        let (hom, unit) = rep.validate(sec.model_samples, sec.seed)?;
        let mut traces = Vec::with_capacity(fs.len());
        let mut worst: f64 = 0.0;
        for f in &fs {
            let tr = rep.trace(f, &q)?;
            let ch = backend.evaluate(f, &q)?;
            let d = relative(tr, ch);
            worst = worst.max(d);
            traces.push(json!({"trace": C64::from(tr), "character": C64::from(ch), "relative_difference": d}));
        }
        let hs = rep.hs_gram(&fs, &q)?;
        let scale = gram.entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let hs_diff = (&hs - &gram.entries).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let hs_rel = if scale > 0.0 { hs_diff / scale } else { hs_diff };
        if worst >= tol.trace {
            report.finding(format!("Schrödinger trace differs from the character by {worst:.3e}"));
        }
        if hs_rel >= tol.trace {
            report.finding(format!("Hilbert-Schmidt Gram differs from the character Gram by {hs_rel:.3e}"));
        }
        outputs["schrodinger"] = json!({
            "gamma": gamma,
            "model_half_width": sec.model_half_width,
            "model_points": sec.model_points,
            "homomorphism_residual": hom,
            "unitarity_residual": unit,
            "traces": traces,
            "max_relative_trace_difference": worst,
            "hs_gram": to_value(&ComplexMatrix::from(&hs)),
            "hs_gram_relative_difference": hs_rel,
        });
        lap(&mut report, "schrodinger", t);
    }
    report.outputs = outputs;
    Ok(report)
}
