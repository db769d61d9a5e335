//! Test functions, tensor quadrature, convolution and the character
//! backends.

mod backend;
mod convolution;
mod quadrature;
mod support;
mod testfn;

pub use backend::{BackendVariant, CharacterBackend, CharacterRule};
pub use convolution::{convolve, convolve_lazy};
pub use quadrature::{integrate, pairwise_sum, sum_indexed, QuadratureSpec, Rule1d, Scheme, TensorGrid};
pub use support::{compose_radius, involution, left_translate, right_translate, translate, Extent};
pub use testfn::{Evaluator, GaussianDictElem, GridSampled, Monomial, TestFunction, TestFunctionKind, NEGLIGIBLE};
