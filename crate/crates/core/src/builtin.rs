//! Ready-made algebras: the Heisenberg algebra, sl(2,ℝ), sl(3,ℝ) and the
//! four-dimensional filiform algebra, with their standard subalgebras.

use nalgebra::{DMatrix, DVector};

use crate::error::{OrbitError, Result};
use crate::lie::{BracketEntry, Group, LieAlgebra, MatrixRealization, Subalgebra};

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn mat(n: usize, entries: &[(usize, usize, f64)]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for &(i, j, v) in entries {
        m[(i, j)] = v;
    }
    m
}

/// Basis `X, Y, Z` with `[X, Y] = Z`.
pub fn heisenberg() -> LieAlgebra {
    LieAlgebra::new(names(&["X", "Y", "Z"]), &[BracketEntry::new(0, 1, 2, 1.0)]).expect("Heisenberg brackets are valid")
}

pub fn heisenberg_group() -> Group {
    Group::Nilpotent(heisenberg().into())
}

/// Upper unitriangular 3×3 realization of the Heisenberg algebra.
pub fn heisenberg_matrices() -> MatrixRealization {
    MatrixRealization::new(
        names(&["X", "Y", "Z"]),
        vec![mat(3, &[(0, 1, 1.0)]), mat(3, &[(1, 2, 1.0)]), mat(3, &[(0, 2, 1.0)])],
    )
    .expect("Heisenberg matrices are independent")
}

/// The polarization `span{Y, Z}` of the Heisenberg algebra.
pub fn heisenberg_polarization(alg: &LieAlgebra) -> Subalgebra {
    Subalgebra::new(alg, &[alg.basis_vector(1), alg.basis_vector(2)]).expect("span{Y,Z} is abelian")
}

/// The ideal flag `span{Z} ⊂ span{Z, Y} ⊂ 𝔥`.
pub fn heisenberg_flag(alg: &LieAlgebra) -> Vec<Subalgebra> {
    let z = alg.basis_vector(2);
    let y = alg.basis_vector(1);
    let x = alg.basis_vector(0);
    vec![
        Subalgebra::new(alg, std::slice::from_ref(&z)).expect("center"),
        Subalgebra::new(alg, &[z.clone(), y.clone()]).expect("abelian ideal"),
        Subalgebra::new(alg, &[z, y, x]).expect("whole algebra"),
    ]
}

/// sl(2,ℝ) in the basis `H = diag(1,−1)`, `X = [[0,1],[1,0]]`, `Y = [[0,1],[−1,0]]`.
pub fn sl2() -> MatrixRealization {
    MatrixRealization::new(
        names(&["H", "X", "Y"]),
        vec![
            mat(2, &[(0, 0, 1.0), (1, 1, -1.0)]),
            mat(2, &[(0, 1, 1.0), (1, 0, 1.0)]),
            mat(2, &[(0, 1, 1.0), (1, 0, -1.0)]),
        ],
    )
    .expect("sl2 basis is independent")
}

pub fn sl2_group() -> Group {
    Group::matrix(sl2())
}

/// Upper triangular subalgebra `𝔪`, basis `{X + Y, H}`.
pub fn sl2_upper(alg: &LieAlgebra) -> Subalgebra {
    let xy = DVector::from_vec(vec![0.0, 1.0, 1.0]);
    Subalgebra::new(alg, &[xy, alg.basis_vector(0)]).expect("upper triangular subalgebra")
}

/// Diagonal subalgebra `span{H}`.
pub fn sl2_diagonal(alg: &LieAlgebra) -> Subalgebra {
    Subalgebra::new(alg, &[alg.basis_vector(0)]).expect("diagonal subalgebra")
}

/// sl(3,ℝ) in the basis `F = E11−E22`, `G = E11−E33`, `E12`, `E23`, `E13`,
/// `E21`, `E32`, `E31`; the first five span the upper triangular subalgebra.
pub fn sl3() -> MatrixRealization {
    let e = |i: usize, j: usize| mat(3, &[(i, j, 1.0)]);
    MatrixRealization::new(
        names(&["F", "G", "E12", "E23", "E13", "E21", "E32", "E31"]),
        vec![
            mat(3, &[(0, 0, 1.0), (1, 1, -1.0)]),
            mat(3, &[(0, 0, 1.0), (2, 2, -1.0)]),
            e(0, 1),
            e(1, 2),
            e(0, 2),
            e(1, 0),
            e(2, 1),
            e(2, 0),
        ],
    )
    .expect("sl3 basis is independent")
}

pub fn sl3_upper(alg: &LieAlgebra) -> Subalgebra {
    let vs: Vec<_> = (0..5).map(|i| alg.basis_vector(i)).collect();
    Subalgebra::new(alg, &vs).expect("upper triangular subalgebra")
}

/// Basis `e1..e4` with `[e1, e2] = e3`, `[e1, e3] = e4`.
pub fn filiform4() -> LieAlgebra {
    LieAlgebra::new(
        names(&["e1", "e2", "e3", "e4"]),
        &[BracketEntry::new(0, 1, 2, 1.0), BracketEntry::new(0, 2, 3, 1.0)],
    )
    .expect("filiform brackets are valid")
}

/// The flag `span{e4} ⊂ span{e4,e3} ⊂ span{e4,e3,e2} ⊂ 𝔤`.
pub fn filiform4_flag(alg: &LieAlgebra) -> Vec<Subalgebra> {
    (1..=4)
        .map(|k| {
            let vs: Vec<_> = (0..k).map(|i| alg.basis_vector(3 - i)).collect();
            Subalgebra::new(alg, &vs).expect("flag member")
        })
        .collect()
}

/// Strictly upper triangular `n × n` matrices; nilpotent of step `n − 1`.
pub fn strictly_upper(n: usize) -> MatrixRealization {
    let mut basis = Vec::new();
    let mut labels = Vec::new();
    for d in 1..n {
        for i in 0..n - d {
            basis.push(mat(n, &[(i, i + d, 1.0)]));
            labels.push(format!("E{}{}", i + 1, i + d + 1));
        }
    }
    MatrixRealization::new(labels, basis).expect("elementary matrices are independent")
}

/// Tags accepted wherever a builtin algebra may be named.
pub const TAGS: [&str; 4] = ["heisenberg", "sl2", "sl3", "filiform4"];

/// Group for a builtin tag. Nilpotent algebras use exponential coordinates.
pub fn group_by_tag(tag: &str) -> Result<Group> {
    match tag {
        "heisenberg" => Ok(heisenberg_group()),
        "sl2" => Ok(sl2_group()),
        "sl3" => Ok(Group::matrix(sl3())),
        "filiform4" => Ok(Group::Nilpotent(filiform4().into())),
        other => Err(OrbitError::InvalidEntry(format!("unknown builtin algebra '{other}', expected one of {TAGS:?}"))),
    }
}

/// Standard polarizing subalgebra for a builtin tag.
pub fn default_subalgebra(tag: &str, alg: &LieAlgebra) -> Result<Subalgebra> {
    match tag {
        "heisenberg" => Ok(heisenberg_polarization(alg)),
        "sl2" => Ok(sl2_upper(alg)),
        "sl3" => Ok(sl3_upper(alg)),
        "filiform4" => {
            let vs: Vec<_> = (1..4).map(|i| alg.basis_vector(i)).collect();
            Subalgebra::new(alg, &vs)
        }
        other => Err(OrbitError::InvalidEntry(format!("unknown builtin algebra '{other}'"))),
    }
}
