//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::f64::consts::{E, TAU};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use orbitk::builtin;
use orbitk::calculus::{j_function, modular_function, RhoRegistry, SL2_G_M, SL2_M_R};
use orbitk::character::{CharacterBackend, QuadratureSpec, TestFunction};
use orbitk::coadjoint::coadjoint_action;
use orbitk::lie::GroupElement;
use orbitk::positivity::{psd_report, GramMatrix};
use orbitk_cli::commands::run_command;
use orbitk_cli::{Report, RunConfig};
use serde_json::Value;

type Outcome = Result<String, String>;

fn config(name: &str) -> RunConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn run(command: &str, name: &str) -> Result<Report, String> {
    run_command(command, &config(name)).map_err(|e| format!("{name}: {e}"))
}

fn num(v: &Value, key: &str) -> Result<f64, String> {
    v[key].as_f64().ok_or_else(|| format!("missing `{key}`"))
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_s: f64, detail: String) -> Outcome {
    let t = elapsed.as_secs_f64();
    check(t < limit_s, format!("{detail}; {t:.1}s of {limit_s}s"))
}

fn heisenberg_closed_form() -> Outcome {
    let t = Instant::now();
    let g = builtin::heisenberg_group();
    let b = CharacterBackend::heisenberg_plane(&g, 1.0).map_err(|e| e.to_string())?;
    let v = b
        .evaluate(&TestFunction::unit_gaussian(3), &QuadratureSpec::trapezoid(9.0, 64).unwrap())
        .map_err(|e| e.to_string())?;
    let exact = TAU * TAU.sqrt() * (-0.5f64).exp();
    let rel = (v - Complex64::new(exact, 0.0)).norm() / exact;
    check(rel < 1e-6, format!("value {:.12}, relative error {rel:.1e}", v.re))?;
    within(t.elapsed(), 1.0, format!("relative error {rel:.1e}"))
}

fn backend_agreement() -> Outcome {
    let t = Instant::now();
    let r = run("character", "lipsman_agreement.toml")?;
    let n = r.outputs["values"].as_array().map_or(0, |a| a.len());
    let worst = num(&r.outputs, "max_relative_difference")?;
    check(n == 10 && worst < 1e-4, format!("{n} functions, max relative difference {worst:.1e}"))?;
    within(t.elapsed(), 60.0, format!("max relative difference {worst:.1e}"))
}

fn positivity_of(name: &str) -> Result<(Report, String), String> {
    let t = Instant::now();
    let r = run("positivity", name)?;
    let o = &r.outputs;
    let size = o["function_ids"].as_array().map_or(0, |a| a.len());
    let (lo, hi) = (num(o, "min_eigenvalue")?, num(o, "max_eigenvalue")?);
    let detail = format!("{name}: size {size}, min/max {:.1e} ({:.1}s)", lo / hi, t.elapsed().as_secs_f64());
    if size == 8 && lo >= -1e-8 * hi {
        Ok((r, detail))
    } else {
        Err(detail)
    }
}

fn positivity(plane: &mut Option<Report>, point: &mut Option<Report>) -> Outcome {
    let (a, da) = positivity_of("positivity_plane.toml")?;
    let (b, db) = positivity_of("positivity_point.toml")?;
    *plane = Some(a);
    *point = Some(b);
    let t = Instant::now();
    let (_, dc) = positivity_of("positivity_sl2.toml")?;
    within(t.elapsed(), 300.0, format!("{da}; {db}; {dc}"))
}

fn j_relation() -> Outcome {
    let t = Instant::now();
    let mut parts = Vec::new();
    for (name, points, tol) in [("j_sl2.toml", 400, 1e-10), ("j_sl3.toml", 50, 1e-9)] {
        let r = run("j-relation", name)?;
        let n = r.outputs["points"].as_u64().unwrap_or(0);
        let (m, h) = (num(&r.outputs, "max_residual")?, num(&r.outputs, "max_hyperbolic_residual")?);
        let detail = format!("{name}: {n} points, j {m:.1e}, hyperbolic {h:.1e}");
        check(n == points && m < tol && h < tol, detail.clone())?;
        parts.push(detail);
    }
    within(t.elapsed(), 10.0, parts.join("; "))
}

fn golden_values() -> Outcome {
    let g = builtin::sl2_group();
    let alg = g.algebra();
    let m = builtin::sl2_upper(alg);
    let r = builtin::sl2_diagonal(alg);
    let reg = RhoRegistry::with_builtins();
    let err = |e: orbitk::OrbitError| e.to_string();
    let mut worst: f64 = 0.0;
    let mut note = |label: &str, got: f64, want: f64| -> Result<(), String> {
        let d = (got - want).abs();
        worst = worst.max(d);
        check(d < 1e-12, format!("{label}: {got} vs {want}")).map(|_| ())
    };
    for (a, b) in [(1.7, -0.6), (0.4, 2.3), (-1.3, 0.5)] {
        let upper = GroupElement::Matrix(DMatrix::from_row_slice(2, 2, &[a, b, 0.0, 1.0 / a]));
        let diag = GroupElement::Matrix(DMatrix::from_row_slice(2, 2, &[a, 0.0, 0.0, 1.0 / a]));
        note("Δ_M", modular_function(&g, Some(&m), &upper).map_err(err)?, a.powi(-2))?;
        note("Δ_R", modular_function(&g, Some(&r), &diag).map_err(err)?, 1.0)?;
        note("ρ_(M,R)", reg.eval(SL2_M_R, &upper).map_err(err)?, a * a)?;
        let moved = coadjoint_action(&g, &upper, &DVector::from_vec(vec![1.0, 0.0, 0.0])).map_err(err)?;
        for (got, want) in moved.iter().zip([1.0, -a * b, a * b]) {
            note("m·H*", *got, want)?;
        }
        // W = aH + b(X + Y) acting on the basis {X + Y, H}
        let xy = DVector::from_vec(vec![0.0, 1.0, 1.0]);
        let w = DVector::from_vec(vec![a, b, b]);
        let on_xy = alg.bracket(&w, &xy).map_err(err)?;
        let on_h = alg.bracket(&w, &alg.basis_vector(0)).map_err(err)?;
        for (got, want) in on_xy.iter().zip((&xy * (2.0 * a)).iter()) {
            note("ad_𝔪W column 1", *got, *want)?;
        }
        for (got, want) in on_h.iter().zip((&xy * (-2.0 * b)).iter()) {
            note("ad_𝔪W column 2", *got, *want)?;
        }
    }
    for (g1, g2, g3) in [(0.3, 1.2, -0.7), (2.0, 0.0, 0.5)] {
        let g4 = (1.0 + g2 * g3) / g1;
        let x = GroupElement::Matrix(DMatrix::from_row_slice(2, 2, &[g1, g2, g3, g4]));
        note("ρ_(G,M)", reg.eval(SL2_G_M, &x).map_err(err)?, 1.0 / (g1 * g1 + g3 * g3))?;
    }
    let w = DVector::from_vec(vec![1.0, 0.7, 0.7]);
    note("j_𝔪(1)", j_function(alg, Some(&m), &w).map_err(err)?, (1.0 - E.powi(-2)) / 2.0)?;
    note("j_𝔤(1)", j_function(alg, None, &w).map_err(err)?, (E - 1.0 / E).powi(2) / 4.0)?;
    let h = builtin::heisenberg();
    let z = h.bch(&h.basis_vector(0), &h.basis_vector(1)).map_err(err)?;
    for (got, want) in z.iter().zip([1.0, 1.0, 0.5]) {
        note("X·Y", *got, want)?;
    }
    Ok(format!("max deviation {worst:.1e}"))
}

fn rho_equation() -> Outcome {
    let reg = RhoRegistry::with_builtins();
    let mut parts = Vec::new();
    for (id, seed) in [(SL2_G_M, 1), (SL2_M_R, 2)] {
        let pair = reg.get(id).map_err(|e| e.to_string())?;
        let samples = pair.samples(200, seed).map_err(|e| e.to_string())?;
        let r = pair.functional_residual(&samples).map_err(|e| e.to_string())?;
        check(r < 1e-10, format!("{id}: {r:.1e}"))?;
        parts.push(format!("{id}: {r:.1e}"));
    }
    Ok(parts.join("; "))
}

fn invariance(plane: Option<&Report>, point: Option<&Report>) -> Outcome {
    let mut parts = Vec::new();
    for (label, r) in [("plane", plane), ("point", point)] {
        let r = r.ok_or("positivity runs failed")?;
        let n = r.outputs["invariance"].as_array().map_or(0, |a| a.len());
        let worst = num(&r.outputs, "max_invariance_residual")?;
        let detail = format!("{label}: {n} samples, max {worst:.1e}");
        check(n == 20 && worst < 1e-5, detail.clone())?;
        parts.push(detail);
    }
    Ok(parts.join("; "))
}

fn comparison() -> Outcome {
    let t = Instant::now();
    let r = run("gns", "gns_schrodinger.toml")?;
    let s = &r.outputs["schrodinger"];
    let n = s["traces"].as_array().map_or(0, |a| a.len());
    let trace = num(s, "max_relative_trace_difference")?;
    let hs = num(s, "hs_gram_relative_difference")?;
    let (hom, unit) = (num(s, "homomorphism_residual")?, num(s, "unitarity_residual")?);
    let detail = format!("{n} functions, trace {trace:.1e}, HS {hs:.1e}, hom {hom:.1e}, unit {unit:.1e}");
    check(n == 10 && trace < 1e-3 && hs < 1e-3 && hom < 1e-8 && unit < 1e-8, detail.clone())?;
    within(t.elapsed(), 120.0, detail)
}

fn sanity_negatives() -> Outcome {
    let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]).map(|x| Complex64::new(x, 0.0));
    let g = GramMatrix::from_raw(m, vec!["a".into(), "b".into()]).map_err(|e| e.to_string())?;
    let report = psd_report(&g, 1e-8);
    check(!report.psd, format!("[[1,2],[2,1]] psd = {}", report.psd))?;
    let cfg = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/jacobi_violation.toml");
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let status = Command::new(env!("CARGO_BIN_EXE_orbitk"))
        .arg("--out")
        .arg(out.path())
        .arg("check-algebra")
        .arg("--config")
        .arg(&cfg)
        .output()
        .map_err(|e| e.to_string())?
        .status;
    check(
        status.code() == Some(2),
        format!("not PSD (min {:.1}); Jacobi violation exit {:?}", report.min_eigenvalue, status.code()),
    )
}

fn main() {
    let mut plane = None;
    let mut point = None;
    let mut failed = 0;
    let mut report = |n: usize, label: &str, outcome: Outcome, t: Instant| {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n} {tag} {label}: {detail} [{:.1}s]", t.elapsed().as_secs_f64());
    };
    let t = Instant::now();
    report(1, "Heisenberg closed-form character", heisenberg_closed_form(), t);
    let t = Instant::now();
    report(2, "Lipsman vs closed form", backend_agreement(), t);
    let t = Instant::now();
    report(3, "Gram positivity", positivity(&mut plane, &mut point), t);
    let t = Instant::now();
    report(4, "j-relation", j_relation(), t);
    let t = Instant::now();
    report(5, "golden values", golden_values(), t);
    let t = Instant::now();
    report(6, "ρ functional equation", rho_equation(), t);
    let t = Instant::now();
    report(7, "translation invariance", invariance(plane.as_ref(), point.as_ref()), t);
    let t = Instant::now();
    report(8, "Schrödinger comparison", comparison(), t);
    let t = Instant::now();
    report(9, "sanity negatives", sanity_negatives(), t);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
