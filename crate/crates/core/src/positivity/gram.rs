use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::character::{
    compose_radius, pairwise_sum, translate, CharacterBackend, Extent, QuadratureSpec, TensorGrid, TestFunction,
};
use crate::error::{OrbitError, Result};
use crate::lie::{Group, GroupElement};

/// Relative anti-Hermitian part above which quadrature is deemed too coarse.
pub const HERMITIAN_LIMIT: f64 = 1e-4;

/// Nodes per parallel task; fixed so the reduction tree is reproducible.
const NODE_CHUNK: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    /// `G[i][j] = χ(f_i ∗ f_j*)`, Hermitian-symmetrized.
    pub entries: DMatrix<Complex64>,
    pub function_ids: Vec<String>,
    /// `‖G − Gᴴ‖_max / ‖G‖_max` before symmetrization.
    pub hermitian_residual: f64,
}

impl GramMatrix {
    /// Wraps a matrix, checking and then enforcing Hermitian symmetry.
    pub fn from_raw(raw: DMatrix<Complex64>, function_ids: Vec<String>) -> Result<Self> {
        if raw.nrows() != raw.ncols() || raw.nrows() != function_ids.len() {
            return Err(OrbitError::DimensionMismatch("Gram matrix must be square with one id per row".into()));
        }
        let adj = raw.adjoint();
        let scale = raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let diff = (&raw - &adj).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let residual = if scale > 0.0 { diff / scale } else { 0.0 };
        if residual > HERMITIAN_LIMIT {
            return Err(OrbitError::HermitianResidualTooLarge(residual));
        }
        let entries = (raw + adj).map(|z| z * 0.5);
        Ok(Self { entries, function_ids, hermitian_residual: residual })
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }
}

/// Quadrature samples `μ(y) f_i(y)` of a whole dictionary on the common
/// cube; rows where every function vanishes are dropped.
struct DictionarySamples {
    dim: usize,
    coords: Vec<f64>,
    /// Row-major `points × functions`.
    values: Vec<Complex64>,
}

impl DictionarySamples {
    fn new(group: &Group, fs: &[TestFunction], q: &QuadratureSpec) -> Result<Self> {
        let dim = group.dim();
        let m = fs.len();
        let reach = fs.iter().map(|f| f.support_radius()).fold(0.0, f64::max);
        let grid = TensorGrid::cube(q, dim);
        let (all, weights) = grid.points();
        let mut coords = Vec::new();
        let mut values = Vec::new();
        let mut row = vec![Complex64::new(0.0, 0.0); m];
        for (u, w) in all.chunks(dim).zip(weights) {
            let r = norm(u);
            if r > reach {
                continue;
            }
            let mut any = false;
            for (slot, f) in row.iter_mut().zip(fs) {
                *slot = if r <= f.support_radius() { f.eval(u) } else { Complex64::new(0.0, 0.0) };
                any |= *slot != Complex64::new(0.0, 0.0);
            }
            if !any {
                continue;
            }
            let mu = w * group.haar_density(u)?;
            coords.extend_from_slice(u);
            values.extend(row.iter().map(|v| v * mu));
        }
        Ok(Self { dim, coords, values })
    }

    fn len(&self) -> usize {
        self.coords.len() / self.dim.max(1)
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }
}

fn norm(u: &[f64]) -> f64 {
    u.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sum_matrices(parts: Vec<Vec<Complex64>>, m: usize) -> Vec<Complex64> {
    match parts.len() {
        0 => vec![Complex64::new(0.0, 0.0); m * m],
        1 => parts.into_iter().next().expect("one part"),
        n => {
            let mut parts = parts;
            let right = parts.split_off(n / 2);
            let a = sum_matrices(parts, m);
            let b = sum_matrices(right, m);
            a.iter().zip(&b).map(|(x, y)| x + y).collect()
        }
    }
}

/// Gram matrix `G[i][j] = χ(f_i ∗ f_j*)` for the given backend.
///
/// Point orbits use `G = ∫∫ f_i(y) conj(f_j(z)) e^{iℓ(log yz⁻¹)} dy dz`;
/// the other backends apply their node rule to the convolution
/// `(f_i ∗ f_j*)(n) = ∫ f_i(y) conj(f_j(n⁻¹y)) Δ(n⁻¹y) dy`. Ids default
/// to `f0, f1, …`.
pub fn gram_matrix(backend: &CharacterBackend, fs: &[TestFunction], q: &QuadratureSpec) -> Result<GramMatrix> {
    let ids = (0..fs.len()).map(|i| format!("f{i}")).collect();
    let group = backend.group();
    let m = fs.len();
    if m == 0 {
        return GramMatrix::from_raw(DMatrix::zeros(0, 0), ids);
    }
    for f in fs {
        if f.dim() != group.dim() {
            return Err(OrbitError::DimensionMismatch("test function lives on another group".into()));
        }
        if f.support_radius() > q.radius {
            return Err(OrbitError::SupportOverflow { needed: f.support_radius(), available: q.radius });
        }
    }
    let samples = DictionarySamples::new(group, fs, q)?;
    let raw = match backend.point_functional() {
        Some(l) => point_kernel_gram(l.as_slice(), &samples, m),
        None => node_gram(backend, fs, &samples, q)?,
    };
    // raw is row-major
    GramMatrix::from_raw(DMatrix::from_row_slice(m, m, &raw), ids)
}

/// `ℓ` vanishes on `[𝔤, 𝔤]`, so `ℓ(log yz⁻¹) = ℓ(y) − ℓ(z)` and the kernel
/// factors as `G = F Fᴴ` with `F_i = ∫ f_i(y) e^{iℓ(y)} dy`.
fn point_kernel_gram(l: &[f64], s: &DictionarySamples, m: usize) -> Vec<Complex64> {
    let hat: Vec<Complex64> = (0..m)
        .map(|i| {
            let terms: Vec<Complex64> = (0..s.len())
                .map(|y| {
                    let phase: f64 = s.point(y).iter().zip(l).map(|(a, b)| a * b).sum();
                    s.values[y * m + i] * Complex64::from_polar(1.0, phase)
                })
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    let mut out = Vec::with_capacity(m * m);
    for fi in &hat {
        for fj in &hat {
            out.push(fi * fj.conj());
        }
    }
    out
}

fn node_gram(
    backend: &CharacterBackend,
    fs: &[TestFunction],
    s: &DictionarySamples,
    q: &QuadratureSpec,
) -> Result<Vec<Complex64>> {
    let group = backend.group();
    let m = fs.len();
    let d = s.dim;
    let mut reach: f64 = 0.0;
    for a in fs {
        for b in fs {
            reach =
                reach.max(compose_radius(group, Extent::Ball(a.support_radius()), Extent::Ball(b.support_radius())));
        }
    }
    let rule = backend.rule(reach, &q.widened(reach))?;
    let alg = group.algebra();
    let traces: Vec<f64> = (0..d).map(|i| alg.ad(&alg.basis_vector(i)).map(|a| a.trace())).collect::<Result<_>>()?;
    let unimodular = group.is_unimodular();
    let radii: Vec<f64> = fs.iter().map(|f| f.support_radius()).collect();
    let rmax = radii.iter().cloned().fold(0.0, f64::max);
    let nn = rule.len();
    let chunks: Vec<Vec<Complex64>> = (0..nn.div_ceil(NODE_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![Complex64::new(0.0, 0.0); m * m];
            let mut local = vec![Complex64::new(0.0, 0.0); m * m];
            let mut fz = vec![Complex64::new(0.0, 0.0); m];
            let mut neg = [0.0; 16];
            let mut z = [0.0; 16];
            for ni in c * NODE_CHUNK..((c + 1) * NODE_CHUNK).min(nn) {
                let w = rule.weights[ni];
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (a, b) in neg.iter_mut().zip(rule.node(ni)) {
                    *a = -b;
                }
                local.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
                for yi in 0..s.len() {
                    if group.compose_coords(&neg[..d], s.point(yi), &mut z[..d]).is_err() {
                        continue;
                    }
                    let rz = norm(&z[..d]);
                    if rz > rmax {
                        continue;
                    }
                    let delta = if unimodular {
                        1.0
                    } else {
                        (-traces.iter().zip(&z[..d]).map(|(t, x)| t * x).sum::<f64>()).exp()
                    };
                    let mut any = false;
                    for (j, f) in fs.iter().enumerate() {
                        fz[j] = if rz <= radii[j] { f.eval(&z[..d]).conj() * delta } else { Complex64::new(0.0, 0.0) };
                        any |= fz[j] != Complex64::new(0.0, 0.0);
                    }
                    if !any {
                        continue;
                    }
                    let fy = &s.values[yi * m..(yi + 1) * m];
                    for i in 0..m {
                        if fy[i] == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for j in 0..m {
                            local[i * m + j] += fy[i] * fz[j];
                        }
                    }
                }
                for (a, l) in acc.iter_mut().zip(&local) {
                    *a += w * l;
                }
            }
            acc
        })
        .collect();
    Ok(sum_matrices(chunks, m))
}

/// `max_{i,j} (|G_ij|² − G_ii G_jj)⁺`.
pub fn cauchy_schwarz_residual(g: &GramMatrix) -> f64 {
    let n = g.size();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let lhs = g.entries[(i, j)].norm_sqr();
            let rhs = g.entries[(i, i)].re * g.entries[(j, j)].re;
            worst = worst.max(lhs - rhs);
        }
    }
    worst
}

/// `‖Gram(σ(g₁, g₂) fs) − Gram(fs)‖_max` with `σ(g₁, g₂) f = f(g₁⁻¹ · g₂)`.
pub fn gram_invariance_residual(
    backend: &CharacterBackend,
    fs: &[TestFunction],
    g1: &GroupElement,
    g2: &GroupElement,
    q: &QuadratureSpec,
) -> Result<f64> {
    let pairs = [(g1.clone(), g2.clone())];
    Ok(gram_invariance_residuals(backend, fs, &pairs, q)?[0])
}

/// [`gram_invariance_residual`] for several pairs, sharing the base Gram.
pub fn gram_invariance_residuals(
    backend: &CharacterBackend,
    fs: &[TestFunction],
    pairs: &[(GroupElement, GroupElement)],
    q: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let group = backend.group();
    let base = gram_matrix(backend, fs, q)?;
    pairs
        .iter()
        .map(|(g1, g2)| {
            let moved: Vec<TestFunction> =
                fs.iter().map(|f| translate(group, g1, g2, f, q.radius)).collect::<Result<_>>()?;
            let after = gram_matrix(backend, &moved, q)?;
            Ok((after.entries - &base.entries).iter().map(|z| z.norm()).fold(0.0, f64::max))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::character::GaussianDictElem;

    #[test]
    fn empty_dictionary() {
        let g = builtin::heisenberg_group();
        let b = CharacterBackend::heisenberg_plane(&g, 1.0).unwrap();
        let q = QuadratureSpec::trapezoid(8.0, 16).unwrap();
        assert_eq!(gram_matrix(&b, &[], &q).unwrap().size(), 0);
    }

    #[test]
    fn single_gaussian_plane_gram() {
        // ‖π(f)‖²_HS = (2π/γ)·2π²s⁴e^{−γ²s²} for a centered Gaussian
        let g = builtin::heisenberg_group();
        let s = 0.5;
        let b = CharacterBackend::heisenberg_plane(&g, 1.0).unwrap();
        let f = TestFunction::gaussian(GaussianDictElem::new(vec![0.0; 3], s)).unwrap();
        let q = QuadratureSpec::trapezoid(6.0, 61).unwrap();
        let v = gram_matrix(&b, &[f], &q).unwrap().entries[(0, 0)];
        let pi = std::f64::consts::PI;
        let exact = 4.0 * pi.powi(3) * s.powi(4) * (-s * s).exp();
        assert!((v.re - exact).abs() < 1e-10 * exact && v.im == 0.0, "{v} vs {exact}");
    }

    #[test]
    fn point_orbit_gram_is_rank_one() {
        // χ(f ∗ g*) = f̂(ℓ) conj(ĝ(ℓ)) for a character of the group
        let g = builtin::heisenberg_group();
        let b = CharacterBackend::point_orbit(&g, nalgebra::DVector::from_vec(vec![0.5, -0.3, 0.0])).unwrap();
        let q = QuadratureSpec::trapezoid(9.5, 26).unwrap();
        let fs: Vec<TestFunction> = [[0.0, 0.0, 0.0], [0.8, -0.4, 0.3], [-0.5, 0.6, -0.2]]
            .iter()
            .map(|c| TestFunction::gaussian(GaussianDictElem::new(c.to_vec(), 1.0)).unwrap())
            .collect();
        let gm = gram_matrix(&b, &fs, &q).unwrap();
        let hat: Vec<Complex64> = fs.iter().map(|f| b.evaluate(f, &q).unwrap()).collect();
        for i in 0..3 {
            for j in 0..3 {
                let expect = hat[i] * hat[j].conj();
                assert!((gm.entries[(i, j)] - expect).norm() < 1e-10 * hat[0].norm_sqr());
            }
        }
    }

    #[test]
    fn hermitian_limit_enforced() {
        let raw = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        );
        assert!(matches!(
            GramMatrix::from_raw(raw, vec!["a".into(), "b".into()]),
            Err(OrbitError::HermitianResidualTooLarge(_))
        ));
    }
}
