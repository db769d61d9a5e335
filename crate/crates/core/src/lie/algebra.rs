use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::bch::BchTable;
use crate::error::{OrbitError, Result};
use crate::linalg::{column_space, expand_in, numerical_rank, RANK_RTOL};
use crate::DEFAULT_TOL;

/// Coordinates of an element of a Lie algebra against its standard basis.
pub type AlgebraVector = DVector<f64>;

pub(crate) type Scratch = SmallVec<[f64; 8]>;

/// One structure constant `[e_i, e_j] += value * e_k`, with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

impl BracketEntry {
    pub fn new(i: usize, j: usize, k: usize, value: f64) -> Self {
        Self { i, j, k, value }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Nilpotency {
    Step(usize),
    NotNilpotent,
}

impl Nilpotency {
    pub fn step(self) -> Option<usize> {
        match self {
            Nilpotency::Step(k) => Some(k),
            Nilpotency::NotNilpotent => None,
        }
    }
}

/// A finite-dimensional real Lie algebra given by structure constants.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    names: Vec<String>,
    dim: usize,
    /// Nonzero constants with `i < j`; the antisymmetric half is implied.
    sparse: Vec<BracketEntry>,
    /// Full table `c[(i * dim + j) * dim + k]`.
    dense: Vec<f64>,
    tol: f64,
    nilpotency: Nilpotency,
    bch: Option<BchTable>,
}

impl PartialEq for LieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.dense == other.dense
    }
}

impl LieAlgebra {
    /// Builds an algebra from the `i < j` half of its structure constants
    /// (0-based indices) and validates the Jacobi identity.
    pub fn new(names: Vec<String>, entries: &[BracketEntry]) -> Result<Self> {
        Self::with_tolerance(names, entries, DEFAULT_TOL)
    }

    pub fn with_tolerance(names: Vec<String>, entries: &[BracketEntry], tol: f64) -> Result<Self> {
        let dim = names.len();
        if dim == 0 {
            return Err(OrbitError::DimensionMismatch("algebra must have positive dimension".into()));
        }
        let mut dense = vec![0.0; dim * dim * dim];
        let mut seen = std::collections::BTreeSet::new();
        let mut sparse = Vec::new();
        for e in entries {
            if e.i >= dim || e.j >= dim || e.k >= dim {
                return Err(OrbitError::DimensionMismatch(format!(
                    "entry ({}, {}, {}) out of range for dimension {dim}",
                    e.i, e.j, e.k
                )));
            }
            if e.i >= e.j {
                return Err(OrbitError::InvalidEntry(format!("entries must have i < j, got ({}, {})", e.i, e.j)));
            }
            if !e.value.is_finite() {
                return Err(OrbitError::InvalidEntry(format!("non-finite value {}", e.value)));
            }
            if !seen.insert((e.i, e.j, e.k)) {
                return Err(OrbitError::InvalidEntry(format!("duplicate entry ({}, {}, {})", e.i, e.j, e.k)));
            }
            if e.value == 0.0 {
                continue;
            }
            dense[(e.i * dim + e.j) * dim + e.k] = e.value;
            dense[(e.j * dim + e.i) * dim + e.k] = -e.value;
            sparse.push(*e);
        }
        let mut alg = Self { names, dim, sparse, dense, tol, nilpotency: Nilpotency::NotNilpotent, bch: None };
        let (residual, (i, j, k)) = alg.jacobi_residual_with_witness();
        let scale = alg.sparse.iter().map(|e| e.value.abs()).fold(1.0, f64::max);
        if residual > tol * scale * scale {
            return Err(OrbitError::JacobiViolation { i, j, k, residual });
        }
        alg.nilpotency = alg.compute_nilpotency();
        if let Nilpotency::Step(step) = alg.nilpotency {
            alg.bch = Some(BchTable::new(step));
        }
        Ok(alg)
    }

    /// Structure constants read off from commutators of explicit matrices.
    pub fn from_matrix_basis(names: Vec<String>, basis: &[DMatrix<f64>]) -> Result<Self> {
        if names.len() != basis.len() {
            return Err(OrbitError::DimensionMismatch(format!(
                "{} names for {} basis matrices",
                names.len(),
                basis.len()
            )));
        }
        let flat = flatten(basis)?;
        if numerical_rank(&flat, RANK_RTOL) < basis.len() {
            return Err(OrbitError::LinearlyDependent {
                rank: numerical_rank(&flat, RANK_RTOL),
                expected: basis.len(),
            });
        }
        let mut entries = Vec::new();
        for i in 0..basis.len() {
            for j in (i + 1)..basis.len() {
                let comm = &basis[i] * &basis[j] - &basis[j] * &basis[i];
                let v = DVector::from_column_slice(comm.as_slice());
                let (coords, residual) = expand_in(&flat, &v);
                if residual > DEFAULT_TOL * (1.0 + v.norm()) {
                    return Err(OrbitError::NotClosed(residual));
                }
                for (k, &c) in coords.iter().enumerate() {
                    let c = snap(c);
                    if c != 0.0 {
                        entries.push(BracketEntry::new(i, j, k, c));
                    }
                }
            }
        }
        Self::new(names, &entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn entries(&self) -> &[BracketEntry] {
        &self.sparse
    }

    /// `c[i][j][k]`, the `e_k` coefficient of `[e_i, e_j]`.
    pub fn structure(&self, i: usize, j: usize, k: usize) -> f64 {
        self.dense[(i * self.dim + j) * self.dim + k]
    }

    pub fn basis_vector(&self, i: usize) -> AlgebraVector {
        let mut v = DVector::zeros(self.dim);
        v[i] = 1.0;
        v
    }

    pub fn zero(&self) -> AlgebraVector {
        DVector::zeros(self.dim)
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(OrbitError::AlgebraMismatch { expected: self.dim, found: len });
        }
        Ok(())
    }

    pub fn bracket(&self, a: &AlgebraVector, b: &AlgebraVector) -> Result<AlgebraVector> {
        self.check_len(a.len())?;
        self.check_len(b.len())?;
        let mut out = DVector::zeros(self.dim);
        self.bracket_into(a.as_slice(), b.as_slice(), out.as_mut_slice());
        Ok(out)
    }

    /// Unchecked bracket on raw coordinate slices.
    pub(crate) fn bracket_into(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for e in &self.sparse {
            let w = a[e.i] * b[e.j] - a[e.j] * b[e.i];
            if w != 0.0 {
                out[e.k] += w * e.value;
            }
        }
    }

    /// Matrix of `ad v` on the whole algebra: column `j` holds `[v, e_j]`.
    pub fn ad(&self, v: &AlgebraVector) -> Result<DMatrix<f64>> {
        self.check_len(v.len())?;
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for e in &self.sparse {
            // [v, e_j] picks up v_i c[i][j][k] from both halves of the table
            m[(e.k, e.j)] += v[e.i] * e.value;
            m[(e.k, e.i)] -= v[e.j] * e.value;
        }
        Ok(m)
    }

    /// Largest deviation from `c[i][j][k] = -c[j][i][k]` in the dense table.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim;
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    r = r.max((self.structure(i, j, k) + self.structure(j, i, k)).abs());
                }
            }
        }
        r
    }

    pub fn jacobi_residual(&self) -> f64 {
        self.jacobi_residual_with_witness().0
    }

    fn jacobi_residual_with_witness(&self) -> (f64, (usize, usize, usize)) {
        let n = self.dim;
        let mut worst = (0.0, (0, 0, 0));
        let mut t1 = vec![0.0; n];
        let mut t2 = vec![0.0; n];
        let mut acc = vec![0.0; n];
        let e = |i: usize| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        };
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    acc.iter_mut().for_each(|a| *a = 0.0);
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        self.bracket_into(&e(a), &e(b), &mut t1);
                        self.bracket_into(&t1, &e(c), &mut t2);
                        acc.iter_mut().zip(&t2).for_each(|(x, y)| *x += y);
                    }
                    let r = acc.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                    if r > worst.0 {
                        worst = (r, (i, j, k));
                    }
                }
            }
        }
        worst
    }

    pub fn nilpotency(&self) -> Nilpotency {
        self.nilpotency
    }

    pub fn is_nilpotent(&self) -> bool {
        matches!(self.nilpotency, Nilpotency::Step(_))
    }

    /// Dimensions of the lower central series `g = g^1 ⊃ g^2 ⊃ ...` until it
    /// vanishes or stabilizes.
    pub fn lower_central_series(&self) -> Vec<usize> {
        let n = self.dim;
        let mut current = DMatrix::<f64>::identity(n, n);
        let mut dims = vec![n];
        loop {
            let mut cols = Vec::new();
            for i in 0..n {
                let ei = self.basis_vector(i);
                for c in current.column_iter() {
                    let v = c.into_owned();
                    let mut out = vec![0.0; n];
                    self.bracket_into(ei.as_slice(), v.as_slice(), &mut out);
                    cols.push(DVector::from_vec(out));
                }
            }
            let next = if cols.is_empty() {
                DMatrix::zeros(n, 0)
            } else {
                column_space(&DMatrix::from_columns(&cols), RANK_RTOL)
            };
            // an all-zero bracket matrix has no column space at all
            let d = if cols.iter().all(|c| c.norm() <= self.tol) { 0 } else { next.ncols() };
            let prev = *dims.last().unwrap();
            dims.push(d);
            if d == 0 || d == prev {
                return dims;
            }
            current = next;
        }
    }

    fn compute_nilpotency(&self) -> Nilpotency {
        let dims = self.lower_central_series();
        match dims.last() {
            Some(0) => Nilpotency::Step(dims.len() - 1),
            _ => Nilpotency::NotNilpotent,
        }
    }

    pub fn bch_table(&self) -> Option<&BchTable> {
        self.bch.as_ref()
    }

    /// `log(exp x · exp y)` by the Dynkin series cut at the nilpotency step,
    /// which is exact for nilpotent algebras.
    pub fn bch(&self, x: &AlgebraVector, y: &AlgebraVector) -> Result<AlgebraVector> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        let mut out = DVector::zeros(self.dim);
        self.bch_into(x.as_slice(), y.as_slice(), out.as_mut_slice())?;
        Ok(out)
    }

    pub(crate) fn bch_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) -> Result<()> {
        let table = self.bch.as_ref().ok_or(OrbitError::NotNilpotent)?;
        let n = self.dim;
        let mut v: Scratch = SmallVec::from_elem(0.0, n);
        let mut w: Scratch = SmallVec::from_elem(0.0, n);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (word, coef) in table.terms() {
            let last = if word[word.len() - 1] == 0 { x } else { y };
            v.copy_from_slice(last);
            for &letter in word[..word.len() - 1].iter().rev() {
                let a = if letter == 0 { x } else { y };
                self.bracket_into(a, &v, &mut w);
                std::mem::swap(&mut v, &mut w);
            }
            for (o, vi) in out.iter_mut().zip(v.iter()) {
                *o += coef * vi;
            }
        }
        Ok(())
    }
}

/// Rounds values within 1e-12 of a dyadic rational with small denominator,
/// so that integer matrix bases produce exact structure constants.
fn snap(c: f64) -> f64 {
    let scaled = c * 1048576.0;
    if (scaled - scaled.round()).abs() < 1e-12 * 1048576.0 {
        scaled.round() / 1048576.0
    } else {
        c
    }
}

pub(crate) fn flatten(basis: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
    let Some(first) = basis.first() else {
        return Err(OrbitError::DimensionMismatch("empty matrix basis".into()));
    };
    let (r, c) = first.shape();
    if basis.iter().any(|b| b.shape() != (r, c)) {
        return Err(OrbitError::DimensionMismatch("basis matrices differ in shape".into()));
    }
    let cols: Vec<DVector<f64>> = basis.iter().map(|b| DVector::from_column_slice(b.as_slice())).collect();
    Ok(DMatrix::from_columns(&cols))
}
