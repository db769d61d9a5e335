//! Small dense linear-algebra helpers shared by the algebraic modules.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff for numerical rank decisions.
pub const RANK_RTOL: f64 = 1e-9;

fn padded_square(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.nrows() >= m.ncols() {
        return m.clone();
    }
    let mut p = DMatrix::zeros(m.ncols(), m.ncols());
    p.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    p
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rtol * sigma_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rtol: f64) -> usize {
    let s = singular_values(m);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > smax * rtol).count()
}

/// Orthonormal basis (as columns) of the kernel of `m`.
pub fn null_space(m: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let p = padded_square(m);
    let svd = p.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.max();
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax == 0.0 || s <= smax * rtol)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space(m: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let n = m.nrows();
    if m.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax > 0.0 && s > smax * rtol)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Least-squares coordinates of `v` against the columns of `basis`, and the
/// Euclidean norm of what is left over.
pub fn expand_in(basis: &DMatrix<f64>, v: &DVector<f64>) -> (DVector<f64>, f64) {
    if basis.ncols() == 0 {
        return (DVector::zeros(0), v.norm());
    }
    let svd = basis.clone().svd(true, true);
    let coords = svd.solve(v, f64::EPSILON * svd.singular_values.max()).expect("both factors requested");
    let residual = (basis * &coords - v).norm();
    (coords, residual)
}

/// Pseudo-inverse of a full-column-rank matrix, for repeated expansions.
pub fn left_inverse(basis: &DMatrix<f64>) -> DMatrix<f64> {
    basis.clone().pseudo_inverse(f64::EPSILON * 16.0).expect("pseudo inverse with non-negative epsilon")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel_of_skew_form() {
        let b = DMatrix::from_row_slice(3, 3, &[0.0, 2.0, 0.0, -2.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(numerical_rank(&b, RANK_RTOL), 2);
        let k = null_space(&b, RANK_RTOL);
        assert_eq!(k.ncols(), 1);
        assert!((k[(2, 0)].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn wide_matrix_kernel() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let k = null_space(&m, RANK_RTOL);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-14);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        assert_eq!(numerical_rank(&DMatrix::zeros(3, 3), RANK_RTOL), 0);
        assert_eq!(null_space(&DMatrix::zeros(2, 2), RANK_RTOL).ncols(), 2);
    }

    #[test]
    fn expansion_residual() {
        let basis = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let (c, r) = expand_in(&basis, &DVector::from_vec(vec![2.0, -1.0, 0.5]));
        assert!((c[0] - 2.0).abs() < 1e-14 && (c[1] + 1.0).abs() < 1e-14);
        assert!((r - 0.5).abs() < 1e-14);
    }
}
