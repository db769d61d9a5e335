use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::quadrature::{pairwise_sum, QuadratureSpec, Rule1d, TensorGrid};
use super::support::{compose_radius, Extent};
use super::testfn::{GridSampled, TestFunction};
use crate::error::{OrbitError, Result};
use crate::lie::Group;

/// Quadrature nodes of `f` with nonzero value, paired with `Haar weight × f`.
pub(crate) struct Samples {
    pub dim: usize,
    pub coords: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl Samples {
    /// Tabulates `μ(y) f(y)` over the quadrature cube, where `μ` is the
    /// left Haar measure in exponential coordinates.
    pub fn new(group: &Group, f: &TestFunction, q: &QuadratureSpec) -> Result<Self> {
        let dim = group.dim();
        let grid = TensorGrid::cube(q, dim);
        let (all, weights) = grid.points();
        let r = f.support_radius();
        let mut coords = Vec::new();
        let mut values = Vec::new();
        for (u, w) in all.chunks(dim).zip(weights) {
            if u.iter().map(|x| x * x).sum::<f64>() > r * r {
                continue;
            }
            let v = f.eval(u);
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            coords.extend_from_slice(u);
            values.push(v * w * group.haar_density(u)?);
        }
        Ok(Self { dim, coords, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }
}

fn check_fit(group: &Group, f1: &TestFunction, f2: &TestFunction, q: &QuadratureSpec) -> Result<f64> {
    if f1.dim() != group.dim() || f2.dim() != group.dim() {
        return Err(OrbitError::DimensionMismatch("test function lives on another group".into()));
    }
    for f in [f1, f2] {
        if f.support_radius() > q.radius {
            return Err(OrbitError::SupportOverflow { needed: f.support_radius(), available: q.radius });
        }
    }
    Ok(compose_radius(group, Extent::Ball(f1.support_radius()), Extent::Ball(f2.support_radius())))
}

/// `(f₁ ∗ f₂)(x) = ∫ f₁(y) f₂(y⁻¹x) dy` evaluated on demand by quadrature.
pub fn convolve_lazy(group: &Group, f1: &TestFunction, f2: &TestFunction, q: &QuadratureSpec) -> Result<TestFunction> {
    let radius = check_fit(group, f1, f2, q)?;
    let samples = Arc::new(Samples::new(group, f1, q)?);
    let (group, f2) = (group.clone(), f2.clone());
    Ok(TestFunction::wrapped(group.dim(), radius, Arc::new(move |x| convolution_at(&group, &samples, &f2, x))))
}

fn convolution_at(group: &Group, samples: &Samples, f2: &TestFunction, x: &[f64]) -> Complex64 {
    let d = samples.dim;
    let mut neg = [0.0; 16];
    let mut z = [0.0; 16];
    let terms: Vec<Complex64> = (0..samples.len())
        .map(|i| {
            for (n, y) in neg.iter_mut().zip(samples.point(i)) {
                *n = -y;
            }
            match group.compose_coords(&neg[..d], x, &mut z[..d]) {
                Ok(()) => samples.values[i] * f2.eval(&z[..d]),
                Err(_) => Complex64::new(0.0, 0.0),
            }
        })
        .collect();
    pairwise_sum(&terms)
}

/// `f₁ ∗ f₂` tabulated on the trapezoid grid of `q` (cost `N^{2d}`) and
/// returned as a grid-sampled function.
pub fn convolve(group: &Group, f1: &TestFunction, f2: &TestFunction, q: &QuadratureSpec) -> Result<TestFunction> {
    let radius = check_fit(group, f1, f2, q)?;
    if radius > q.radius {
        return Err(OrbitError::SupportOverflow { needed: radius, available: q.radius });
    }
    let samples = Samples::new(group, f1, q)?;
    let d = group.dim();
    let n = q.points_per_axis;
    let out_rule = Rule1d::trapezoid(-q.radius, q.radius, n);
    let out_grid = TensorGrid::new(vec![out_rule.clone(); d]);
    let values: Vec<Complex64> = (0..out_grid.len())
        .into_par_iter()
        .map(|i| {
            let mut x = [0.0; 16];
            out_grid.point(i, &mut x[..d]);
            if x[..d].iter().map(|v| v * v).sum::<f64>() > radius * radius {
                return Complex64::new(0.0, 0.0);
            }
            convolution_at(group, &samples, f2, &x[..d])
        })
        .collect();
    let step = out_rule.nodes[1] - out_rule.nodes[0];
    TestFunction::grid(GridSampled { lo: vec![-q.radius; d], step: vec![step; d], shape: vec![n; d], values }, radius)
}
