use nalgebra::{DMatrix, DVector};

use super::algebra::{AlgebraVector, LieAlgebra};
use crate::error::{OrbitError, Result};
use crate::linalg::{column_space, left_inverse, numerical_rank, RANK_RTOL};

/// A subalgebra, stored as a basis (columns) in the ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Subalgebra {
    basis: DMatrix<f64>,
    pinv: DMatrix<f64>,
}

impl Subalgebra {
    /// Validates linear independence and closure under the bracket.
    pub fn new(alg: &LieAlgebra, vectors: &[AlgebraVector]) -> Result<Self> {
        let sub = Self::candidate(alg, vectors)?;
        let r = sub.closure_residual(alg);
        if r > alg.tolerance() * sub.scale() {
            return Err(OrbitError::NotClosed(r));
        }
        Ok(sub)
    }

    /// A linearly independent family that has not been checked for closure.
    /// Used to report on candidate subalgebras that may fail the check.
    pub fn candidate(alg: &LieAlgebra, vectors: &[AlgebraVector]) -> Result<Self> {
        for v in vectors {
            alg.check_len(v.len())?;
        }
        let basis = if vectors.is_empty() { DMatrix::zeros(alg.dim(), 0) } else { DMatrix::from_columns(vectors) };
        let rank = numerical_rank(&basis, RANK_RTOL);
        if rank < vectors.len() {
            return Err(OrbitError::LinearlyDependent { rank, expected: vectors.len() });
        }
        Ok(Self::from_basis_unchecked(basis))
    }

    /// Orthonormalized span of arbitrary (possibly dependent) vectors,
    /// then validated as a subalgebra.
    pub fn span(alg: &LieAlgebra, vectors: &[AlgebraVector]) -> Result<Self> {
        if vectors.is_empty() {
            return Self::new(alg, &[]);
        }
        let cs = column_space(&DMatrix::from_columns(vectors), RANK_RTOL);
        let cols: Vec<AlgebraVector> = cs.column_iter().map(|c| c.into_owned()).collect();
        Self::new(alg, &cols)
    }

    pub fn whole(alg: &LieAlgebra) -> Self {
        Self::from_basis_unchecked(DMatrix::identity(alg.dim(), alg.dim()))
    }

    pub(crate) fn from_basis_unchecked(basis: DMatrix<f64>) -> Self {
        let pinv = if basis.ncols() == 0 { DMatrix::zeros(0, basis.nrows()) } else { left_inverse(&basis) };
        Self { basis, pinv }
    }

    pub(crate) fn scale(&self) -> f64 {
        self.basis.column_iter().map(|c| c.norm_squared()).fold(1.0, f64::max)
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Basis vectors as columns.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn vector(&self, i: usize) -> AlgebraVector {
        self.basis.column(i).into_owned()
    }

    pub fn vectors(&self) -> Vec<AlgebraVector> {
        self.basis.column_iter().map(|c| c.into_owned()).collect()
    }

    /// Coordinates of `v` in this basis, plus the norm of the part of `v`
    /// outside the span.
    pub fn expand(&self, v: &AlgebraVector) -> (DVector<f64>, f64) {
        let coords = &self.pinv * v;
        let residual = (&self.basis * &coords - v).norm();
        (coords, residual)
    }

    /// The ambient vector with the given subalgebra coordinates.
    pub fn embed(&self, coords: &DVector<f64>) -> AlgebraVector {
        &self.basis * coords
    }

    pub fn membership_residual(&self, v: &AlgebraVector) -> f64 {
        self.expand(v).1
    }

    pub fn closure_residual(&self, alg: &LieAlgebra) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                let b = alg.bracket(&self.vector(i), &self.vector(j)).expect("basis vectors live in the algebra");
                worst = worst.max(self.membership_residual(&b));
            }
        }
        worst
    }

    /// Matrix of `ad v` restricted to this subalgebra, in this basis.
    /// `v` must normalize the subalgebra.
    pub fn ad_restricted(&self, alg: &LieAlgebra, v: &AlgebraVector) -> Result<DMatrix<f64>> {
        alg.check_len(v.len())?;
        let k = self.dim();
        let mut m = DMatrix::zeros(k, k);
        let mut worst: f64 = 0.0;
        for j in 0..k {
            let b = alg.bracket(v, &self.vector(j))?;
            let (c, r) = self.expand(&b);
            worst = worst.max(r);
            m.set_column(j, &c);
        }
        if worst > alg.tolerance() * self.scale() * (1.0 + v.norm()) {
            return Err(OrbitError::NotInvariantSubspace(worst));
        }
        Ok(m)
    }

    /// Restriction of a linear map of the ambient algebra to this subspace,
    /// with the norm of the part that leaves it.
    pub fn restrict_map(&self, a: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
        let image = a * &self.basis;
        let m = &self.pinv * &image;
        let residual = (&self.basis * &m - image).norm();
        (m, residual)
    }

    /// Is every basis vector of `self` inside `other`?
    pub fn is_contained_in(&self, other: &Subalgebra, tol: f64) -> bool {
        self.basis.column_iter().all(|c| other.membership_residual(&c.into_owned()) <= tol * (1.0 + c.norm()))
    }

    /// Same span, regardless of the chosen basis.
    pub fn same_span(&self, other: &Subalgebra, tol: f64) -> bool {
        self.dim() == other.dim() && self.is_contained_in(other, tol) && other.is_contained_in(self, tol)
    }
}

/// `ad v` on the whole algebra or on a subalgebra it normalizes.
pub fn ad_matrix(alg: &LieAlgebra, v: &AlgebraVector, on: Option<&Subalgebra>) -> Result<DMatrix<f64>> {
    match on {
        None => alg.ad(v),
        Some(sub) => sub.ad_restricted(alg, v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::BracketEntry;

    fn heis() -> LieAlgebra {
        let names = ["X", "Y", "Z"].iter().map(|s| s.to_string()).collect();
        LieAlgebra::new(names, &[BracketEntry::new(0, 1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn closure_is_checked() {
        let h = heis();
        assert!(Subalgebra::new(&h, &[h.basis_vector(1), h.basis_vector(2)]).is_ok());
        assert!(matches!(Subalgebra::new(&h, &[h.basis_vector(0), h.basis_vector(1)]), Err(OrbitError::NotClosed(_))));
        assert!(matches!(
            Subalgebra::new(&h, &[h.basis_vector(1), h.basis_vector(1)]),
            Err(OrbitError::LinearlyDependent { .. })
        ));
    }

    #[test]
    fn restricted_ad_requires_invariance() {
        let h = heis();
        let m = Subalgebra::new(&h, &[h.basis_vector(1), h.basis_vector(2)]).unwrap();
        // X normalizes span{Y, Z} since [X, Y] = Z
        let ad = m.ad_restricted(&h, &h.basis_vector(0)).unwrap();
        assert!((ad - DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0])).norm() < 1e-15);
        let line = Subalgebra::new(&h, &[h.basis_vector(1)]).unwrap();
        assert!(matches!(line.ad_restricted(&h, &h.basis_vector(0)), Err(OrbitError::NotInvariantSubspace(_))));
    }

    #[test]
    fn zero_vector_gives_zero_ad() {
        let h = heis();
        assert_eq!(ad_matrix(&h, &h.zero(), None).unwrap(), DMatrix::zeros(3, 3));
    }
}
