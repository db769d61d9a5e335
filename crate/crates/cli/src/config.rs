//! The TOML run configuration and its translation into core objects.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use orbitk::builtin;
use orbitk::character::{CharacterBackend, GaussianDictElem, Monomial, QuadratureSpec, Scheme, TestFunction};
use orbitk::lie::{BracketEntry, Group, LieAlgebra, MatrixRealization, Subalgebra};
use orbitk::{OrbitError, DEFAULT_TOL};
use serde::{Deserialize, Serialize};

use crate::error::{config_err, CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub algebra: AlgebraSpec,
    /// Coordinates of ℓ in the dual basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<Vec<f64>>,
    /// Basis of 𝔪, one coordinate row per vector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub dictionary: Vec<FunctionSpec>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<BackendSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub character: CharacterSection,
    #[serde(default)]
    pub j_relation: JRelationSection,
    #[serde(default)]
    pub positivity: PositivitySection,
    #[serde(default)]
    pub gns: GnsSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Either a builtin tag or explicit structure constants (1-based indices),
/// optionally with a matrix realization.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub brackets: Vec<BracketSpec>,
    /// Square matrices, row-major, one per basis vector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<Vec<f64>>>>,
}

/// `[e_i, e_j] = … + value·e_k + …`, indices starting at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketSpec {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub id: String,
    #[serde(default)]
    pub kind: FunctionKind,
    #[serde(default)]
    pub center: Vec<f64>,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phase: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub poly: Vec<MonomialSpec>,
    /// Overrides the automatic truncation radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    #[default]
    Gaussian,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialSpec {
    pub powers: Vec<u32>,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_points")]
    pub points_per_axis: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { scheme: default_scheme(), radius: default_radius(), points_per_axis: default_points() }
    }
}

impl QuadratureConfig {
    pub fn spec(&self) -> CliResult<QuadratureSpec> {
        QuadratureSpec::new(self.scheme, self.radius, self.points_per_axis)
            .map_err(|e| config_err(format!("[quadrature] {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackendSpec {
    HeisenbergPlane { gamma: f64 },
    PointOrbit,
    Lipsman,
    Sl2Principal { u_radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Residual tolerance for algebra and j-relation checks.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Relative PSD tolerance.
    #[serde(default = "default_psd")]
    pub psd: f64,
    #[serde(default = "default_invariance")]
    pub invariance: f64,
    /// Relative agreement between a backend and its reference.
    #[serde(default = "default_agreement")]
    pub agreement: f64,
    /// Relative agreement between Schrödinger traces and the character.
    #[serde(default = "default_trace")]
    pub trace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            psd: default_psd(),
            invariance: default_invariance(),
            agreement: default_agreement(),
            trace: default_trace(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterSection {
    /// Second backend to compare against, after one-point calibration on
    /// the first dictionary element.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<BackendSpec>,
    /// Points per axis for a refinement study of the first function.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub refinement: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JRelationSection {
    /// Coordinates of W ∈ 𝔪 range over [−range, range].
    #[serde(default = "one")]
    pub range: f64,
    /// Grid points per axis when 𝔪 is two-dimensional.
    #[serde(default = "default_grid")]
    pub grid_points: usize,
    /// Random samples otherwise.
    #[serde(default = "default_random")]
    pub random_points: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for JRelationSection {
    fn default() -> Self {
        Self { range: 1.0, grid_points: default_grid(), random_points: default_random(), seed: default_seed() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositivitySection {
    /// Random (g₁, g₂) pairs for the invariance check; 0 disables it.
    #[serde(default)]
    pub invariance_samples: usize,
    #[serde(default = "half")]
    pub invariance_radius: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for PositivitySection {
    fn default() -> Self {
        Self { invariance_samples: 0, invariance_radius: 0.5, seed: default_seed() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GnsSection {
    /// Compare against the Schrödinger model (Heisenberg plane backend only).
    #[serde(default)]
    pub schrodinger: bool,
    #[serde(default = "default_half_width")]
    pub model_half_width: f64,
    #[serde(default = "default_model_points")]
    pub model_points: usize,
    /// Random element pairs for the model's homomorphism check.
    #[serde(default = "default_model_samples")]
    pub model_samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for GnsSection {
    fn default() -> Self {
        Self {
            schrodinger: false,
            model_half_width: default_half_width(),
            model_points: default_model_points(),
            model_samples: default_model_samples(),
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn default_scheme() -> Scheme {
    Scheme::TensorTrapezoid
}
fn default_radius() -> f64 {
    9.0
}
fn default_points() -> usize {
    64
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_psd() -> f64 {
    1e-8
}
fn default_invariance() -> f64 {
    1e-5
}
fn default_agreement() -> f64 {
    1e-4
}
fn default_trace() -> f64 {
    1e-3
}
fn default_grid() -> usize {
    20
}
fn default_random() -> usize {
    50
}
fn default_seed() -> u64 {
    0x5eed
}
fn default_half_width() -> f64 {
    12.0
}
fn default_model_points() -> usize {
    256
}
fn default_model_samples() -> usize {
    16
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// The algebra; Jacobi violations surface as math errors.
    pub fn build_algebra(&self) -> CliResult<LieAlgebra> {
        self.build_algebra_with_tolerance(self.tolerances.tol)
    }

    pub(crate) fn build_algebra_with_tolerance(&self, tol: f64) -> CliResult<LieAlgebra> {
        let a = &self.algebra;
        if let Some(tag) = &a.builtin {
            if a.names.is_some() || !a.brackets.is_empty() || a.matrices.is_some() {
                return Err(config_err("[algebra] give either `builtin` or explicit structure, not both"));
            }
            return Ok(builtin_group(tag)?.algebra().clone());
        }
        if let Some(ms) = &a.matrices {
            return Ok(self.realization(ms)?.algebra().clone());
        }
        let names = self.names()?;
        let dim = names.len();
        let mut entries = Vec::with_capacity(a.brackets.len());
        for (n, b) in a.brackets.iter().enumerate() {
            for (label, idx) in [("i", b.i), ("j", b.j), ("k", b.k)] {
                if idx == 0 || idx > dim {
                    return Err(config_err(format!(
                        "[algebra] bracket #{} has {label} = {idx}, indices run from 1 to {dim}",
                        n + 1
                    )));
                }
            }
            if b.i >= b.j {
                return Err(config_err(format!("[algebra] bracket #{} needs i < j", n + 1)));
            }
            entries.push(BracketEntry::new(b.i - 1, b.j - 1, b.k - 1, b.value));
        }
        match LieAlgebra::with_tolerance(names, &entries, tol) {
            Err(OrbitError::InvalidEntry(msg)) => Err(config_err(format!("[algebra] {msg}"))),
            other => Ok(other?),
        }
    }

    fn names(&self) -> CliResult<Vec<String>> {
        let a = &self.algebra;
        let names = match (&a.names, a.dim) {
            (Some(n), _) => n.clone(),
            (None, Some(d)) => (1..=d).map(|i| format!("e{i}")).collect(),
            (None, None) => return Err(config_err("[algebra] needs `builtin`, `names` or `dim`")),
        };
        if names.is_empty() {
            return Err(config_err("[algebra] dimension must be positive"));
        }
        if let Some(d) = a.dim {
            if d != names.len() {
                return Err(config_err(format!("[algebra] dim = {d} but {} names", names.len())));
            }
        }
        Ok(names)
    }

    fn realization(&self, ms: &[Vec<Vec<f64>>]) -> CliResult<MatrixRealization> {
        let names = match (&self.algebra.names, self.algebra.dim) {
            (None, None) => (1..=ms.len()).map(|i| format!("e{i}")).collect(),
            _ => self.names()?,
        };
        let mut basis = Vec::with_capacity(ms.len());
        for (n, rows) in ms.iter().enumerate() {
            let size = rows.len();
            if size == 0 || rows.iter().any(|r| r.len() != size) {
                return Err(config_err(format!("[algebra] matrix #{} is not square", n + 1)));
            }
            basis.push(DMatrix::from_fn(size, size, |i, j| rows[i][j]));
        }
        if basis.windows(2).any(|w| w[0].nrows() != w[1].nrows()) {
            return Err(config_err("[algebra] matrices differ in size"));
        }
        Ok(MatrixRealization::new(names, basis)?)
    }

    /// The group: builtin, nilpotent from brackets, or from matrices.
    pub fn build_group(&self) -> CliResult<Group> {
        if let Some(tag) = &self.algebra.builtin {
            self.build_algebra()?;
            return builtin_group(tag);
        }
        if let Some(ms) = &self.algebra.matrices {
            return Ok(Group::matrix(self.realization(ms)?));
        }
        Ok(Group::nilpotent(self.build_algebra()?)?)
    }

    pub fn functional(&self, dim: usize) -> CliResult<DVector<f64>> {
        let l = self.functional.as_ref().ok_or_else(|| config_err("`functional` is required for this backend"))?;
        if l.len() != dim {
            return Err(config_err(format!("`functional` has {} entries, algebra has dimension {dim}", l.len())));
        }
        Ok(DVector::from_column_slice(l))
    }

    /// The configured polarization, or the builtin default.
    pub fn subalgebra(&self, alg: &LieAlgebra) -> CliResult<Subalgebra> {
        match (&self.polarization, &self.algebra.builtin) {
            (Some(rows), _) => {
                let mut vs = Vec::with_capacity(rows.len());
                for (n, r) in rows.iter().enumerate() {
                    if r.len() != alg.dim() {
                        return Err(config_err(format!(
                            "`polarization` row {} has {} entries, algebra has dimension {}",
                            n + 1,
                            r.len(),
                            alg.dim()
                        )));
                    }
                    vs.push(DVector::from_column_slice(r));
                }
                Ok(Subalgebra::new(alg, &vs)?)
            }
            (None, Some(tag)) => Ok(builtin::default_subalgebra(tag, alg)?),
            (None, None) => Err(config_err("`polarization` is required for a custom algebra")),
        }
    }

    pub fn build_backend(&self, group: &Group, spec: &BackendSpec) -> CliResult<CharacterBackend> {
        let b = match *spec {
            BackendSpec::HeisenbergPlane { gamma } => CharacterBackend::heisenberg_plane(group, gamma)?,
            BackendSpec::PointOrbit => CharacterBackend::point_orbit(group, self.functional(group.dim())?)?,
            BackendSpec::Lipsman => {
                let m = self.subalgebra(group.algebra())?;
                CharacterBackend::lipsman(group, self.functional(group.dim())?, m)?
            }
            BackendSpec::Sl2Principal { u_radius } => CharacterBackend::sl2_principal(group, u_radius)?,
        };
        Ok(b)
    }

    pub fn backend(&self, group: &Group) -> CliResult<CharacterBackend> {
        let spec = self.backend.as_ref().ok_or_else(|| config_err("[backend] section is required"))?;
        self.build_backend(group, spec)
    }

    pub fn test_functions(&self, dim: usize) -> CliResult<Vec<TestFunction>> {
        let mut ids = std::collections::BTreeSet::new();
        self.dictionary
            .iter()
            .map(|spec| {
                if !ids.insert(spec.id.as_str()) {
                    return Err(config_err(format!("[[dictionary]] duplicate id `{}`", spec.id)));
                }
                spec.build(dim)
            })
            .collect()
    }

    pub fn function_ids(&self) -> Vec<String> {
        self.dictionary.iter().map(|f| f.id.clone()).collect()
    }
}

fn builtin_group(tag: &str) -> CliResult<Group> {
    builtin::group_by_tag(tag).map_err(|e| config_err(format!("[algebra] {e}")))
}

impl FunctionSpec {
    pub fn build(&self, dim: usize) -> CliResult<TestFunction> {
        let ctx = |msg: String| config_err(format!("[[dictionary]] `{}`: {msg}", self.id));
        if self.kind == FunctionKind::Zero {
            return Ok(TestFunction::zero(dim));
        }
        let center = if self.center.is_empty() { vec![0.0; dim] } else { self.center.clone() };
        if center.len() != dim {
            return Err(ctx(format!("center has {} entries, algebra has dimension {dim}", center.len())));
        }
        if !self.phase.is_empty() && self.phase.len() != dim {
            return Err(ctx(format!("phase has {} entries, algebra has dimension {dim}", self.phase.len())));
        }
        let mut elem = GaussianDictElem::new(center, self.scale);
        if !self.phase.is_empty() {
            elem = elem.with_phase(self.phase.clone());
        }
        if !self.poly.is_empty() {
            let mut poly = Vec::with_capacity(self.poly.len());
            for m in &self.poly {
                if m.powers.len() != dim {
                    return Err(ctx(format!("monomial has {} powers, algebra has dimension {dim}", m.powers.len())));
                }
                poly.push(Monomial { powers: m.powers.clone(), coef: Complex64::new(m.re, m.im) });
            }
            elem = elem.with_poly(poly);
        }
        let f = TestFunction::gaussian(elem).map_err(|e| ctx(e.to_string()))?;
        Ok(match self.support_radius {
            Some(r) if r > 0.0 => f.with_support_radius(r),
            Some(r) => return Err(ctx(format!("support_radius {r} must be positive"))),
            None => f,
        })
    }
}

impl From<toml::de::Error> for CliError {
    fn from(e: toml::de::Error) -> Self {
        config_err(e.to_string())
    }
}
