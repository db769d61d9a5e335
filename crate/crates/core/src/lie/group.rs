use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::algebra::{flatten, AlgebraVector, LieAlgebra, Scratch};
use super::matrix::{expm, logm, phi_minus};
use crate::error::{OrbitError, Result};
use crate::linalg::left_inverse;

/// A point of a Lie group in one of the two supported encodings.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    /// Exponential coordinates of the first kind (nilpotent groups).
    ExpCoords(DVector<f64>),
    /// An `n × n` matrix of a linear realization.
    Matrix(DMatrix<f64>),
}

/// A matrix Lie algebra: explicit basis matrices plus the structure
/// constants they induce.
#[derive(Debug, Clone)]
pub struct MatrixRealization {
    algebra: LieAlgebra,
    basis: Vec<DMatrix<f64>>,
    n: usize,
    /// Maps a column-major flattened matrix to basis coordinates.
    pinv: DMatrix<f64>,
    flat: DMatrix<f64>,
}

impl MatrixRealization {
    pub fn new(names: Vec<String>, basis: Vec<DMatrix<f64>>) -> Result<Self> {
        let algebra = LieAlgebra::from_matrix_basis(names, &basis)?;
        let flat = flatten(&basis)?;
        let n = basis[0].nrows();
        if basis[0].ncols() != n {
            return Err(OrbitError::DimensionMismatch("basis matrices must be square".into()));
        }
        let pinv = left_inverse(&flat);
        Ok(Self { algebra, basis, n, pinv, flat })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn basis(&self) -> &[DMatrix<f64>] {
        &self.basis
    }

    /// Size of the matrices.
    pub fn matrix_size(&self) -> usize {
        self.n
    }

    pub fn to_matrix(&self, v: &AlgebraVector) -> Result<DMatrix<f64>> {
        self.algebra.check_len(v.len())?;
        let flat = &self.flat * v;
        Ok(DMatrix::from_column_slice(self.n, self.n, flat.as_slice()))
    }

    /// Basis coordinates of a matrix that should lie in the realized algebra.
    pub fn from_matrix(&self, m: &DMatrix<f64>) -> Result<AlgebraVector> {
        if m.shape() != (self.n, self.n) {
            return Err(OrbitError::DimensionMismatch(format!("expected {n}x{n} matrix", n = self.n)));
        }
        let v = DVector::from_column_slice(m.as_slice());
        let coords = &self.pinv * &v;
        let residual = (&self.flat * &coords - &v).norm();
        if residual > self.algebra.tolerance() * (1.0 + v.norm()) {
            return Err(OrbitError::BasisExpansionFailure(residual));
        }
        Ok(coords)
    }

    fn is_sl2_like(&self) -> bool {
        self.n == 2 && self.basis.iter().all(|b| b.trace().abs() < 1e-14)
    }
}

/// A connected Lie group together with the chart it is computed in.
#[derive(Debug, Clone)]
pub enum Group {
    /// Simply connected nilpotent group in exponential coordinates; the
    /// product is the (finite) BCH series.
    Nilpotent(Arc<LieAlgebra>),
    /// Linear group generated by a matrix realization.
    Matrix(Arc<MatrixRealization>),
}

impl Group {
    pub fn nilpotent(alg: LieAlgebra) -> Result<Self> {
        if !alg.is_nilpotent() {
            return Err(OrbitError::NotNilpotent);
        }
        Ok(Group::Nilpotent(Arc::new(alg)))
    }

    pub fn matrix(real: MatrixRealization) -> Self {
        Group::Matrix(Arc::new(real))
    }

    pub fn algebra(&self) -> &LieAlgebra {
        match self {
            Group::Nilpotent(a) => a,
            Group::Matrix(r) => r.algebra(),
        }
    }

    pub fn dim(&self) -> usize {
        self.algebra().dim()
    }

    pub fn realization(&self) -> Option<&MatrixRealization> {
        match self {
            Group::Nilpotent(_) => None,
            Group::Matrix(r) => Some(r),
        }
    }

    /// Connected groups are unimodular exactly when every `ad X` is traceless.
    pub fn is_unimodular(&self) -> bool {
        let alg = self.algebra();
        (0..alg.dim())
            .all(|i| alg.ad(&alg.basis_vector(i)).map(|m| m.trace().abs() <= alg.tolerance()).unwrap_or(false))
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            Group::Nilpotent(a) => GroupElement::ExpCoords(a.zero()),
            Group::Matrix(r) => GroupElement::Matrix(DMatrix::identity(r.n, r.n)),
        }
    }

    pub fn validate(&self, g: &GroupElement) -> Result<()> {
        match (self, g) {
            (Group::Nilpotent(a), GroupElement::ExpCoords(x)) => a.check_len(x.len()),
            (Group::Matrix(r), GroupElement::Matrix(m)) => {
                if m.shape() != (r.n, r.n) {
                    return Err(OrbitError::DimensionMismatch(format!("expected {n}x{n} matrix", n = r.n)));
                }
                let det = m.determinant();
                if (det - 1.0).abs() > 1e-10 * m.norm().powi(r.n as i32).max(1.0) {
                    return Err(OrbitError::NotUnimodular(det));
                }
                Ok(())
            }
            (Group::Nilpotent(_), GroupElement::Matrix(_)) => {
                Err(OrbitError::DimensionMismatch("matrix element given to an exponential-coordinate group".into()))
            }
            (Group::Matrix(_), GroupElement::ExpCoords(_)) => {
                Err(OrbitError::DimensionMismatch("exponential coordinates are reserved for nilpotent groups".into()))
            }
        }
    }

    pub fn exp(&self, v: &AlgebraVector) -> Result<GroupElement> {
        self.algebra().check_len(v.len())?;
        match self {
            Group::Nilpotent(_) => Ok(GroupElement::ExpCoords(v.clone())),
            Group::Matrix(r) => {
                if r.is_sl2_like() {
                    let m = r.to_matrix(v)?;
                    let e = exp2([m[(0, 0)], m[(1, 0)], m[(0, 1)], m[(1, 1)]]);
                    return Ok(GroupElement::Matrix(DMatrix::from_column_slice(2, 2, &e)));
                }
                Ok(GroupElement::Matrix(expm(&r.to_matrix(v)?)))
            }
        }
    }

    /// Principal logarithm in algebra coordinates.
    pub fn log(&self, g: &GroupElement) -> Result<AlgebraVector> {
        self.validate(g)?;
        match (self, g) {
            (Group::Nilpotent(_), GroupElement::ExpCoords(x)) => Ok(x.clone()),
            (Group::Matrix(r), GroupElement::Matrix(m)) => {
                if r.is_sl2_like() {
                    let l = log2([m[(0, 0)], m[(1, 0)], m[(0, 1)], m[(1, 1)]])?;
                    return r.from_matrix(&DMatrix::from_column_slice(2, 2, &l));
                }
                r.from_matrix(&logm(m)?)
            }
            _ => unreachable!("validated above"),
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.validate(g)?;
        self.validate(h)?;
        match (self, g, h) {
            (Group::Nilpotent(a), GroupElement::ExpCoords(x), GroupElement::ExpCoords(y)) => {
                Ok(GroupElement::ExpCoords(a.bch(x, y)?))
            }
            (Group::Matrix(_), GroupElement::Matrix(x), GroupElement::Matrix(y)) => Ok(GroupElement::Matrix(x * y)),
            _ => unreachable!("validated above"),
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.validate(g)?;
        match g {
            GroupElement::ExpCoords(x) => Ok(GroupElement::ExpCoords(-x)),
            GroupElement::Matrix(m) => {
                m.clone().try_inverse().map(GroupElement::Matrix).ok_or(OrbitError::NotUnimodular(0.0))
            }
        }
    }

    /// Matrix of `Ad(g)` on the algebra, column `i` holding `Ad(g) e_i`.
    pub fn adjoint_matrix(&self, g: &GroupElement) -> Result<DMatrix<f64>> {
        self.validate(g)?;
        match (self, g) {
            (Group::Nilpotent(a), GroupElement::ExpCoords(x)) => Ok(expm(&a.ad(x)?)),
            (Group::Matrix(r), GroupElement::Matrix(m)) => {
                let inv = m.clone().try_inverse().ok_or(OrbitError::NotUnimodular(0.0))?;
                let d = r.algebra.dim();
                let mut ad = DMatrix::zeros(d, d);
                for (i, b) in r.basis.iter().enumerate() {
                    let conj = m * b * &inv;
                    ad.set_column(i, &r.from_matrix(&conj)?);
                }
                Ok(ad)
            }
            _ => unreachable!("validated above"),
        }
    }

    /// `log(exp a · exp b)` on raw coordinate slices. This is the inner loop
    /// of every convolution, so the nilpotent and 2×2 cases avoid heap work.
    pub fn compose_coords(&self, a: &[f64], b: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            Group::Nilpotent(alg) => alg.bch_into(a, b, out),
            Group::Matrix(r) if r.is_sl2_like() => {
                let ma = coords_to_2x2(r, a);
                let mb = coords_to_2x2(r, b);
                let p = mul2(&exp2(ma), &exp2(mb));
                let l = log2(p)?;
                twox2_to_coords(r, &l, out);
                Ok(())
            }
            Group::Matrix(r) => {
                let ga = expm(&r.to_matrix(&DVector::from_column_slice(a))?);
                let gb = expm(&r.to_matrix(&DVector::from_column_slice(b))?);
                let l = r.from_matrix(&logm(&(ga * gb))?)?;
                out.copy_from_slice(l.as_slice());
                Ok(())
            }
        }
    }

    /// Density of left Haar measure against Lebesgue measure in exponential
    /// coordinates: `det((1 - e^{-ad u}) / ad u)`, identically one for
    /// nilpotent groups.
    pub fn haar_density(&self, u: &[f64]) -> Result<f64> {
        match self {
            Group::Nilpotent(_) => Ok(1.0),
            Group::Matrix(r) => {
                let ad = r.algebra.ad(&DVector::from_column_slice(u))?;
                Ok(phi_minus(&ad)?.determinant())
            }
        }
    }
}

pub(crate) type Mat2 = [f64; 4];

fn coords_to_2x2(r: &MatrixRealization, a: &[f64]) -> Mat2 {
    let mut m = [0.0; 4];
    for (k, ak) in a.iter().enumerate() {
        for (idx, mi) in m.iter_mut().enumerate() {
            *mi += ak * r.flat[(idx, k)];
        }
    }
    m
}

fn twox2_to_coords(r: &MatrixRealization, m: &Mat2, out: &mut [f64]) {
    let mut tmp: Scratch = Scratch::from_elem(0.0, out.len());
    for (k, t) in tmp.iter_mut().enumerate() {
        *t = (0..4).map(|idx| r.pinv[(k, idx)] * m[idx]).sum();
    }
    out.copy_from_slice(&tmp);
}

/// Column-major 2×2 product.
pub(crate) fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    [a[0] * b[0] + a[2] * b[1], a[1] * b[0] + a[3] * b[1], a[0] * b[2] + a[2] * b[3], a[1] * b[2] + a[3] * b[3]]
}

/// `sinh(r)/r` and `cosh(r)` as functions of `d = r²`, continued to `d < 0`.
fn sinhc_cosh(d: f64) -> (f64, f64) {
    if d.abs() < 1e-4 {
        let s = 1.0 + d / 6.0 * (1.0 + d / 20.0 * (1.0 + d / 42.0));
        let c = 1.0 + d / 2.0 * (1.0 + d / 12.0 * (1.0 + d / 30.0));
        (s, c)
    } else if d > 0.0 {
        let r = d.sqrt();
        (r.sinh() / r, r.cosh())
    } else {
        let r = (-d).sqrt();
        (r.sin() / r, r.cos())
    }
}

/// Exponential of a traceless 2×2 matrix (column-major), using `A² = d I`.
pub(crate) fn exp2(a: Mat2) -> Mat2 {
    let d = a[0] * a[0] + a[1] * a[2];
    let (s, c) = sinhc_cosh(d);
    [c + s * a[0], s * a[1], s * a[2], c + s * a[3]]
}

/// Principal logarithm of a unimodular 2×2 matrix (column-major).
///
/// Writing `g = c I + T` with `T` traceless, `det g = 1` forces
/// `-det T = c² - 1`, and `T = (sinh r / r) log g` with `r² = -det log g`.
pub(crate) fn log2(g: Mat2) -> Result<Mat2> {
    let c = 0.5 * (g[0] + g[3]);
    let t = [0.5 * (g[0] - g[3]), g[1], g[2], -0.5 * (g[0] - g[3])];
    let q = t[0] * t[0] + t[1] * t[2];
    if c <= -1.0 + 1e-12 || (q > 0.0 && c < 0.0) {
        return Err(OrbitError::LogDomain(format!("trace/2 = {c:.6}")));
    }
    let ratio = if q.abs() < 1e-12 && c > 0.0 {
        // r/sinh r with sinh² r = q (q < 0 continues to the elliptic branch)
        1.0 - q / 6.0 + 3.0 * q * q / 40.0
    } else if q > 0.0 {
        let sq = q.sqrt();
        sq.asinh() / sq
    } else {
        let sq = (-q).sqrt();
        sq.atan2(c) / sq
    };
    Ok([ratio * t[0], ratio * t[1], ratio * t[2], ratio * t[3]])
}
