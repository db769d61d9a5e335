//! Gram matrices of the sesquilinear form `⟨f₁, f₂⟩ = χ(f₁ ∗ f₂*)`, their
//! positivity, the GNS quotient, and the Schrödinger model of the
//! Heisenberg group.

mod gram;
mod psd;
mod schrodinger;

pub use gram::{
    cauchy_schwarz_residual, gram_invariance_residual, gram_invariance_residuals, gram_matrix, GramMatrix,
    HERMITIAN_LIMIT,
};
pub use psd::{gns_quotient, psd_report, GnsQuotient, PsdReport};
pub use schrodinger::{schrodinger_trace, SchrodingerRep};
