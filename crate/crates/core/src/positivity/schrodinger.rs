use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::character::{QuadratureSpec, Rule1d, TestFunction};
use crate::error::{OrbitError, Result};

/// Residual above which the model grid is rejected.
const MODEL_LIMIT: f64 = 1e-8;

/// The Schrödinger representation of the Heisenberg group on `L²(ℝ)`,
/// `π_γ(exp(aX + bY + cZ)) φ(t) = e^{iγ(c + bt + ab/2)} φ(t + a)`,
/// discretized on a uniform grid of `[−L, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerRep {
    gamma: f64,
    half_width: f64,
    points: usize,
}

fn bch(u: &[f64; 3], v: &[f64; 3]) -> [f64; 3] {
    [u[0] + v[0], u[1] + v[1], u[2] + v[2] + 0.5 * (u[0] * v[1] - u[1] * v[0])]
}

impl SchrodingerRep {
    pub fn new(gamma: f64, half_width: f64, points: usize) -> Result<Self> {
        if gamma == 0.0 {
            return Err(OrbitError::GammaZero);
        }
        if !(half_width > 0.0 && half_width.is_finite()) || points < 8 {
            return Err(OrbitError::InvalidQuadrature(format!(
                "model grid needs L > 0 and at least 8 points, got L = {half_width}, {points} points"
            )));
        }
        Ok(Self { gamma, half_width, points })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.points).map(|i| -self.half_width + i as f64 * h).collect()
    }

    /// `(π(exp u) φ)(t)`.
    pub fn act(&self, u: &[f64; 3], phi: &dyn Fn(f64) -> Complex64, t: f64) -> Complex64 {
        let [a, b, c] = *u;
        Complex64::from_polar(1.0, self.gamma * (c + b * t + 0.5 * a * b)) * phi(t + a)
    }

    fn probe(t: f64) -> Complex64 {
        Complex64::from_polar((-0.5 * (t - 0.3) * (t - 0.3)).exp(), 0.7 * t)
    }

    /// Largest `|π(g₁)π(g₂)φ − π(g₁g₂)φ|` on the grid.
    pub fn homomorphism_residual(&self, pairs: &[([f64; 3], [f64; 3])]) -> f64 {
        let grid = self.grid();
        let mut worst: f64 = 0.0;
        for (g1, g2) in pairs {
            let inner = |s: f64| self.act(g2, &Self::probe, s);
            let prod = bch(g1, g2);
            for &t in &grid {
                let lhs = self.act(g1, &inner, t);
                let rhs = self.act(&prod, &Self::probe, t);
                worst = worst.max((lhs - rhs).norm());
            }
        }
        worst
    }

    /// Largest relative change of the discrete `L²` norm of a probe vector
    /// localized well inside the box, moved by at most a quarter width.
    pub fn unitarity_residual(&self, gs: &[[f64; 3]]) -> f64 {
        let grid = self.grid();
        let h = self.step();
        let base: f64 = grid.iter().map(|&t| Self::probe(t).norm_sqr()).sum::<f64>() * h;
        gs.iter()
            .map(|g| {
                let moved: f64 = grid.iter().map(|&t| self.act(g, &Self::probe, t).norm_sqr()).sum::<f64>() * h;
                ((moved - base) / base).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Checks the model on seeded random elements; `GridTooCoarse` when
    /// either residual exceeds `1e-8`.
    pub fn validate(&self, samples: usize, seed: u64) -> Result<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reach = 0.25 * self.half_width;
        let draw =
            |rng: &mut ChaCha8Rng| [rng.gen_range(-reach..reach), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let pairs: Vec<_> = (0..samples).map(|_| (draw(&mut rng), draw(&mut rng))).collect();
        let singles: Vec<_> = pairs.iter().map(|p| p.0).collect();
        let hom = self.homomorphism_residual(&pairs);
        let unit = self.unitarity_residual(&singles);
        let worst = hom.max(unit);
        if worst > MODEL_LIMIT {
            return Err(OrbitError::GridTooCoarse(worst));
        }
        Ok((hom, unit))
    }

    fn check(&self, f: &TestFunction) -> Result<()> {
        if f.dim() != 3 {
            return Err(OrbitError::DimensionMismatch("Schrödinger model acts on 3-dimensional test functions".into()));
        }
        let h = self.step();
        if h > 0.5 * f.scale() {
            return Err(OrbitError::GridTooCoarse(h));
        }
        if f.support_radius() > self.half_width {
            return Err(OrbitError::SupportOverflow { needed: f.support_radius(), available: self.half_width });
        }
        Ok(())
    }

    /// Integral kernel of `π(f)` on the grid:
    /// `K(t, s) = ∫∫ f(s − t, b, c) e^{iγ(c + b(t + s)/2)} db dc`.
    pub fn kernel(&self, f: &TestFunction, q: &QuadratureSpec) -> Result<DMatrix<Complex64>> {
        self.check(f)?;
        let r = f.support_radius();
        let h = self.step();
        let g = self.gamma;
        let c_rule = q.rule_on(r);
        // b-spacing resolves e^{iγbt} for |t| ≤ L
        let hb_max = std::f64::consts::PI / (4.0 * g.abs() * self.half_width);
        let nb = ((2.0 * r / hb_max).ceil() as usize + 1).max(q.points_per_axis);
        let b_rule = Rule1d::trapezoid(-r, r, nb);
        let span = (r / h).floor() as isize;
        // C(k, b) = ∫ f(k h, b, c) e^{iγc} dc
        let table: Vec<Vec<Complex64>> = (-span..=span)
            .into_par_iter()
            .map(|k| {
                let a = k as f64 * h;
                b_rule
                    .nodes
                    .iter()
                    .zip(&b_rule.weights)
                    .map(|(&b, &wb)| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (&c, &wc) in c_rule.nodes.iter().zip(&c_rule.weights) {
                            let u = [a, b, c];
                            if a * a + b * b + c * c > r * r {
                                continue;
                            }
                            acc += f.eval(&u) * Complex64::from_polar(wc, g * c);
                        }
                        acc * wb
                    })
                    .collect()
            })
            .collect();
        let grid = self.grid();
        let n = self.points;
        let rows: Vec<Vec<Complex64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let t = grid[i];
                let mut row = vec![Complex64::new(0.0, 0.0); n];
                for (j, slot) in row.iter_mut().enumerate() {
                    let k = j as isize - i as isize;
                    if k.abs() > span {
                        continue;
                    }
                    let s = grid[j];
                    let mid = 0.5 * (t + s);
                    let col = &table[(k + span) as usize];
                    *slot = col
                        .iter()
                        .zip(&b_rule.nodes)
                        .map(|(cv, &b)| cv * Complex64::from_polar(1.0, g * b * mid))
                        .sum();
                }
                row
            })
            .collect();
        Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// `Tr π(f) ≈ Σ_t K(t, t) Δt`.
    pub fn trace(&self, f: &TestFunction, q: &QuadratureSpec) -> Result<Complex64> {
        let k = self.kernel(f, q)?;
        Ok(k.diagonal().iter().sum::<Complex64>() * self.step())
    }

    /// Hilbert–Schmidt Gram `Tr(π(f_i) π(f_j)*) = Σ K_i conj(K_j) Δt²`.
    pub fn hs_gram(&self, fs: &[TestFunction], q: &QuadratureSpec) -> Result<DMatrix<Complex64>> {
        let kernels: Vec<DMatrix<Complex64>> = fs.iter().map(|f| self.kernel(f, q)).collect::<Result<_>>()?;
        let h2 = self.step() * self.step();
        let m = fs.len();
        Ok(DMatrix::from_fn(m, m, |i, j| {
            kernels[i].iter().zip(kernels[j].iter()).map(|(a, b)| a * b.conj()).sum::<Complex64>() * h2
        }))
    }
}

/// `Tr π_γ(f)` in the default model: 256 points on `[−12, 12]`.
pub fn schrodinger_trace(f: &TestFunction, gamma: f64, q: &QuadratureSpec) -> Result<Complex64> {
    SchrodingerRep::new(gamma, 12.0, 256)?.trace(f, q)
}
