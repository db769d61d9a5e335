use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use super::gram::GramMatrix;
use crate::error::{OrbitError, Result};

/// Absolute floor on the PSD threshold.
const ABS_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsdReport {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `max(tol · max(λ_max, 0), 1e-12)`.
    pub threshold: f64,
    pub psd: bool,
}

fn eigen(g: &DMatrix<Complex64>) -> SymmetricEigen<Complex64, nalgebra::Dyn> {
    SymmetricEigen::new(g.clone())
}

fn sorted(e: &SymmetricEigen<Complex64, nalgebra::Dyn>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    idx
}

/// Eigenvalue test `λ_min ≥ −threshold`.
pub fn psd_report(g: &GramMatrix, tol: f64) -> PsdReport {
    if g.size() == 0 {
        return PsdReport {
            eigenvalues: Vec::new(),
            min_eigenvalue: 0.0,
            max_eigenvalue: 0.0,
            threshold: ABS_FLOOR,
            psd: true,
        };
    }
    let e = eigen(&g.entries);
    let eigenvalues: Vec<f64> = sorted(&e).into_iter().map(|i| e.eigenvalues[i]).collect();
    let min_eigenvalue = eigenvalues[0];
    let max_eigenvalue = *eigenvalues.last().expect("nonempty");
    let threshold = (tol * max_eigenvalue.max(0.0)).max(ABS_FLOOR);
    PsdReport { eigenvalues, min_eigenvalue, max_eigenvalue, threshold, psd: min_eigenvalue >= -threshold }
}

/// The quotient of the span of a dictionary by the null space of its Gram form.
#[derive(Debug, Clone)]
pub struct GnsQuotient {
    pub rank: usize,
    /// Orthonormal coefficient vectors `c` with `Σ c_i f_i` null.
    pub kernel_basis: Vec<DVector<Complex64>>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
}

impl GnsQuotient {
    /// Largest `|cᴴ G c|` over the kernel basis.
    pub fn kernel_residual(&self, g: &GramMatrix) -> f64 {
        self.kernel_basis.iter().map(|c| (c.adjoint() * &g.entries * c)[(0, 0)].norm()).fold(0.0, f64::max)
    }
}

/// Rank and null space of the Gram form; eigenvalues below
/// `tol · λ_max` are treated as zero.
pub fn gns_quotient(g: &GramMatrix, tol: f64) -> Result<GnsQuotient> {
    let report = psd_report(g, tol);
    if !report.psd {
        return Err(OrbitError::NotPsd(report.min_eigenvalue));
    }
    if g.size() == 0 {
        return Ok(GnsQuotient { rank: 0, kernel_basis: Vec::new(), eigenvalues: Vec::new() });
    }
    let e = eigen(&g.entries);
    let cut = report.threshold;
    let mut rank = 0;
    let mut kernel_basis = Vec::new();
    for i in sorted(&e) {
        if e.eigenvalues[i] > cut {
            rank += 1;
        } else {
            kernel_basis.push(e.eigenvectors.column(i).into_owned());
        }
    }
    Ok(GnsQuotient { rank, kernel_basis, eigenvalues: report.eigenvalues })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram(rows: &[[f64; 3]]) -> GramMatrix {
        let data: Vec<Complex64> = rows.iter().flatten().map(|&x| Complex64::new(x, 0.0)).collect();
        GramMatrix::from_raw(DMatrix::from_row_slice(3, 3, &data), vec!["a".into(), "b".into(), "c".into()]).unwrap()
    }

    #[test]
    fn rank_deficient_gram() {
        // third function = first + second
        let g = gram(&[[2.0, 1.0, 3.0], [1.0, 2.0, 3.0], [3.0, 3.0, 6.0]]);
        let r = psd_report(&g, 1e-10);
        assert!(r.psd);
        let q = gns_quotient(&g, 1e-10).unwrap();
        assert_eq!(q.rank, 2);
        assert_eq!(q.kernel_basis.len(), 1);
        assert!(q.kernel_residual(&g) < 1e-12);
        let c = &q.kernel_basis[0];
        assert!((c[0] - c[1]).norm() < 1e-12 && (c[0] + c[2]).norm() < 1e-12);
    }

    #[test]
    fn indefinite_gram_rejected() {
        let g = gram(&[[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(!psd_report(&g, 1e-10).psd);
        assert!(matches!(gns_quotient(&g, 1e-10), Err(OrbitError::NotPsd(v)) if (v + 1.0).abs() < 1e-12));
    }
}
