use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};

/// Points per block in parallel reductions. Fixed so the summation tree
/// does not depend on the thread count.
pub(crate) const BLOCK: usize = 2048;

/// Largest Gauss–Hermite order whose weights stay representable after the
/// `e^{x²}` correction.
const MAX_HERMITE: usize = 150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    TensorTrapezoid,
    GaussHermite,
}

/// Tensor quadrature on the cube `[−R, R]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    pub radius: f64,
    pub points_per_axis: usize,
}

impl QuadratureSpec {
    pub fn new(scheme: Scheme, radius: f64, points_per_axis: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(OrbitError::InvalidQuadrature(format!("radius {radius} must be positive")));
        }
        if points_per_axis < 8 {
            return Err(OrbitError::InvalidQuadrature(format!("{points_per_axis} points per axis, need at least 8")));
        }
        if scheme == Scheme::GaussHermite && points_per_axis > MAX_HERMITE {
            return Err(OrbitError::InvalidQuadrature(format!("Gauss-Hermite order is capped at {MAX_HERMITE}")));
        }
        Ok(Self { scheme, radius, points_per_axis })
    }

    pub fn trapezoid(radius: f64, points_per_axis: usize) -> Result<Self> {
        Self::new(Scheme::TensorTrapezoid, radius, points_per_axis)
    }

    /// The truncation radius must be at least three test-function scales.
    pub fn check_scale(&self, largest_scale: f64) -> Result<()> {
        if self.radius < 3.0 * largest_scale {
            return Err(OrbitError::InvalidQuadrature(format!(
                "radius {} is below 3 x scale {largest_scale}",
                self.radius
            )));
        }
        Ok(())
    }

    /// Same scheme and radius at twice the resolution.
    pub fn refined(&self) -> Self {
        Self { points_per_axis: 2 * self.points_per_axis, ..*self }
    }

    /// The cube grown to radius `r` at unchanged node spacing (Hermite
    /// orders stay capped).
    pub fn widened(&self, r: f64) -> Self {
        if r <= self.radius {
            return *self;
        }
        let n = ((self.points_per_axis - 1) as f64 * r / self.radius).ceil() as usize + 1;
        let points_per_axis = match self.scheme {
            Scheme::GaussHermite => n.min(MAX_HERMITE),
            Scheme::TensorTrapezoid => n,
        };
        Self { radius: r, points_per_axis, ..*self }
    }

    /// One-dimensional rule on `[−R, R]`.
    pub fn rule(&self) -> Rule1d {
        self.rule_on(self.radius)
    }

    /// The same scheme and resolution stretched over `[−r, r]`.
    pub fn rule_on(&self, r: f64) -> Rule1d {
        match self.scheme {
            Scheme::TensorTrapezoid => Rule1d::trapezoid(-r, r, self.points_per_axis),
            Scheme::GaussHermite => Rule1d::hermite_on(r, self.points_per_axis),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    pub fn trapezoid(a: f64, b: f64, n: usize) -> Self {
        let h = (b - a) / (n - 1) as f64;
        let nodes = (0..n).map(|i| a + h * i as f64).collect();
        let mut weights = vec![h; n];
        weights[0] = 0.5 * h;
        weights[n - 1] = 0.5 * h;
        Self { nodes, weights }
    }

    /// Equispaced rule for periodic integrands on `[0, 2π)`.
    pub fn periodic(n: usize) -> Self {
        let h = std::f64::consts::TAU / n as f64;
        Self { nodes: (0..n).map(|i| h * i as f64).collect(), weights: vec![h; n] }
    }

    /// Gauss–Hermite nodes and weights for `∫ e^{−x²} g(x) dx`
    /// (Golub–Welsch).
    pub fn gauss_hermite(n: usize) -> Self {
        let mut jacobi = DMatrix::zeros(n, n);
        for i in 1..n {
            let b = (i as f64 / 2.0).sqrt();
            jacobi[(i, i - 1)] = b;
            jacobi[(i - 1, i)] = b;
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
    }

    /// Gauss–Hermite rule for plain `∫ g(x) dx`, rescaled so the outermost
    /// node sits at `±r`.
    pub fn hermite_on(r: f64, n: usize) -> Self {
        let gh = Self::gauss_hermite(n);
        let scale = r / gh.nodes[n - 1];
        Self {
            nodes: gh.nodes.iter().map(|x| x * scale).collect(),
            weights: gh.nodes.iter().zip(&gh.weights).map(|(x, w)| w * (x * x).exp() * scale).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Tensor product of one-dimensional rules, enumerated in row-major order.
#[derive(Debug, Clone)]
pub struct TensorGrid {
    rules: Vec<Rule1d>,
}

impl TensorGrid {
    pub fn new(rules: Vec<Rule1d>) -> Self {
        Self { rules }
    }

    pub fn cube(spec: &QuadratureSpec, dim: usize) -> Self {
        Self::new(vec![spec.rule(); dim])
    }

    pub fn dim(&self) -> usize {
        self.rules.len()
    }

    pub fn len(&self) -> usize {
        self.rules.iter().map(|r| r.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes the coordinates of point `index` and returns its weight.
    pub fn point(&self, mut index: usize, out: &mut [f64]) -> f64 {
        let mut w = 1.0;
        for (axis, rule) in self.rules.iter().enumerate().rev() {
            let n = rule.len();
            let i = index % n;
            index /= n;
            out[axis] = rule.nodes[i];
            w *= rule.weights[i];
        }
        w
    }

    /// All points as a flat coordinate array and a weight array.
    pub fn points(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let mut coords = vec![0.0; self.len() * d];
        let weights = coords.chunks_mut(d.max(1)).enumerate().map(|(i, c)| self.point(i, c)).collect();
        (coords, weights)
    }
}

/// Recursive pairwise summation.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `Σ_i g(i)` for `i < n`, evaluated in fixed blocks in parallel and reduced
/// in a fixed pairwise tree, so the result is bit-identical for any number
/// of threads.
pub fn sum_indexed<F>(n: usize, g: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let blocks: Vec<Complex64> = (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK;
            let hi = (lo + BLOCK).min(n);
            let vals: Vec<Complex64> = (lo..hi).map(&g).collect();
            pairwise_sum(&vals)
        })
        .collect();
    pairwise_sum(&blocks)
}

/// `Σ w(u) f(u)` over a tensor grid.
pub fn integrate<F>(grid: &TensorGrid, f: F) -> Complex64
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let d = grid.dim();
    sum_indexed(grid.len(), |i| {
        let mut u = [0.0; 16];
        let w = grid.point(i, &mut u[..d]);
        f(&u[..d]) * w
    })
}
