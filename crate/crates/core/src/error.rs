use thiserror::Error;

pub type Result<T, E = OrbitError> = std::result::Result<T, E>;

/// Everything that can go wrong in the numerical core.
///
/// Variants fall in two groups: invalid mathematical input (bad structure
/// constants, wrong subgroup, functional/subalgebra mismatch) and numerical
/// limits (series that will not converge, quadrature boxes too small).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error("Jacobi identity violated for (e{i}, e{j}, e{k}): residual {residual:.3e}")]
    JacobiViolation { i: usize, j: usize, k: usize, residual: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid bracket entry: {0}")]
    InvalidEntry(String),
    #[error("algebra mismatch: expected length {expected}, found {found}")]
    AlgebraMismatch { expected: usize, found: usize },
    #[error("vectors are linearly dependent (rank {rank} < {expected})")]
    LinearlyDependent { rank: usize, expected: usize },
    #[error("span is not closed under the bracket (residual {0:.3e})")]
    NotClosed(f64),
    #[error("subspace is not invariant under ad (residual {0:.3e})")]
    NotInvariantSubspace(f64),
    #[error("algebra is not nilpotent")]
    NotNilpotent,
    #[error("principal logarithm undefined: {0}")]
    LogDomain(String),
    #[error("element does not expand in the realization basis (residual {0:.3e})")]
    BasisExpansionFailure(f64),
    #[error("matrix element is not unimodular (det = {0})")]
    NotUnimodular(f64),
    #[error("element is not in the subgroup (residual {0:.3e})")]
    NotInSubgroup(f64),
    #[error("power series needs more than {0} terms; rescale the argument")]
    SeriesNonConvergence(usize),
    #[error("unknown subgroup pair `{0}`")]
    UnknownPair(String),
    #[error("rho candidate fails its functional equation (residual {0:.3e})")]
    RhoRejected(f64),
    #[error("invalid flag of ideals: {0}")]
    FlagInvalid(String),
    #[error("flag construction produced a non-polarization")]
    ConstructionFailed,
    #[error("subalgebra is not a polarization for the functional")]
    NotAPolarization,
    #[error("support radius {needed:.3} exceeds the available box {available:.3}")]
    SupportOverflow { needed: f64, available: f64 },
    #[error("test function is not supported inside exp(U) (U radius {0})")]
    SupportNotInU(f64),
    #[error("gamma must be nonzero")]
    GammaZero,
    #[error("backend `{backend}` is incompatible with this group: {reason}")]
    BackendMismatch { backend: String, reason: String },
    #[error("invalid quadrature specification: {0}")]
    InvalidQuadrature(String),
    #[error("Gram matrix is not Hermitian (relative residual {0:.3e}); quadrature under-resolved")]
    HermitianResidualTooLarge(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("model grid too coarse: representation residual {0:.3e}")]
    GridTooCoarse(f64),
    #[error("calibration failed: {0}")]
    CalibrationFailed(String),
}
