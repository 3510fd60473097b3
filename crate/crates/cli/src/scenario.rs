//! Scenario files: TOML schema and validation into a ready-to-run context.

use std::path::PathBuf;
use std::sync::Arc;

use crossmetric::base::{FiniteSpectralTriple, GroupAction, OperatorSystemSpec};
use crossmetric::crossed::{CrossedElement, CrossedProduct};
use crossmetric::length::{Extension, MatrixLengthFunction};
use crossmetric::seminorm::CrossedGeometry;
use crossmetric::{CMat, Error, GroupElement, GroupFamily, GroupModel};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    FolnerConvergence,
    BerezinContraction,
    SliceContraction,
    ApproximationIdentity,
    ApproximationBound,
    TensorSumSandwich,
    SpectralTripleAudit,
    MkDistance,
    CqmsFinite,
    KernelAudit,
}

impl CheckName {
    pub const ALL: [CheckName; 10] = [
        CheckName::FolnerConvergence,
        CheckName::BerezinContraction,
        CheckName::SliceContraction,
        CheckName::ApproximationIdentity,
        CheckName::ApproximationBound,
        CheckName::TensorSumSandwich,
        CheckName::SpectralTripleAudit,
        CheckName::MkDistance,
        CheckName::CqmsFinite,
        CheckName::KernelAudit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::FolnerConvergence => "folner-convergence",
            CheckName::BerezinContraction => "berezin-contraction",
            CheckName::SliceContraction => "slice-contraction",
            CheckName::ApproximationIdentity => "approximation-identity",
            CheckName::ApproximationBound => "approximation-bound",
            CheckName::TensorSumSandwich => "tensor-sum-sandwich",
            CheckName::SpectralTripleAudit => "spectral-triple-audit",
            CheckName::MkDistance => "mk-distance",
            CheckName::CqmsFinite => "cqms-finite",
            CheckName::KernelAudit => "kernel-audit",
        }
    }

    /// The statement each check verifies.
    pub fn reference(self) -> &'static str {
        match self {
            CheckName::FolnerConvergence => "rho(chi_{F_n}, epsilon) decreases to 0 along the Folner sequence",
            CheckName::BerezinContraction => "L_l(beta_F z) <= L_l(z)",
            CheckName::SliceContraction => "L_l((eta x 1) delta(z)) <= L_l(z)",
            CheckName::ApproximationIdentity => "eta(beta_F z - z) = (chi_F - epsilon)((eta x 1) delta(z))",
            CheckName::ApproximationBound => "||beta_F z - z|| <= rho(chi_F, epsilon) L(z)",
            CheckName::TensorSumSandwich => "max(||d_V z||, ||d_H z||) <= ||[D, z]|| <= 2 max(||d_V z||, ||d_H z||)",
            CheckName::SpectralTripleAudit => "tensor-sum Dirac operator selfadjoint and graded, T_s selfadjoint",
            CheckName::MkDistance => "restricted Monge-Kantorovich distance: lower bound <= surrogate upper bound",
            CheckName::CqmsFinite => "ker L = C 1 and ||[x]|| <= C L(x) on a finite system",
            CheckName::KernelAudit => "ker L_l = A: L_l(pi(x)) = 0 and L_l(pi(x) lambda_g) > 0 for g != e",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub radii: Vec<u32>,
    pub checks: Vec<CheckName>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "yes")]
    pub plots: bool,
    pub group: GroupSpec,
    pub length: LengthSpec,
    pub base: BaseSpec,
    #[serde(default)]
    pub action: ActionSpec,
    #[serde(default)]
    pub operator_system: OperatorSystemConfig,
    #[serde(default)]
    pub sampler: SamplerSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub folner: FolnerSpec,
    #[serde(default)]
    pub tensor: TensorSpec,
    #[serde(default)]
    pub mk: MkSpec,
    #[serde(default)]
    pub cqms: CqmsSpec,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    FreeAbelian { rank: usize, generators: Option<Vec<Vec<i64>>> },
    Heisenberg { generators: Option<Vec<Vec<i64>>> },
    Cyclic { order: u64, generators: Option<Vec<Vec<i64>>> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub g: Vec<i64>,
    pub value: MatrixSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExtensionSpec {
    Reject,
    WordLengthTimes { matrix: MatrixSpec },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LengthSpec {
    Word,
    Torus,
    Tabulated { entries: Vec<TableEntry>, parity: u8, grading: Option<MatrixSpec>, extension: ExtensionSpec },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseSpec {
    FiniteMetric {
        distance: Vec<Vec<f64>>,
        #[serde(default)]
        graded: bool,
    },
    MatrixInner {
        k: usize,
        dirac: Option<MatrixSpec>,
    },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ActionSpec {
    #[default]
    Trivial,
    Permutation {
        permutations: Vec<Vec<usize>>,
    },
    Inner {
        unitaries: Vec<MatrixSpec>,
    },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSystemConfig {
    #[default]
    Full,
    Span {
        basis: Vec<MatrixSpec>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub g: Vec<i64>,
    pub x: MatrixSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub terms: Vec<TermSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSpec {
    pub count: usize,
    pub support_radius: u32,
    pub terms: usize,
    pub scalar: bool,
    pub elements: Vec<ElementSpec>,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec { count: 8, support_radius: 2, terms: 4, scalar: false, elements: Vec::new() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative change between the last two radii that counts as converged.
    pub convergence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { convergence: 1e-3 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FolnerSpec {
    pub r: u32,
    pub n_min: u32,
    pub n_max: u32,
    pub f_radius: u32,
}

impl Default for FolnerSpec {
    fn default() -> Self {
        FolnerSpec { r: 3, n_min: 1, n_max: 12, f_radius: 1 }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TensorSpec {
    pub parities: Option<[u8; 2]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MkSpec {
    pub radii: Vec<u32>,
    pub seminorm_radius: Option<u32>,
    pub budget: usize,
}

impl Default for MkSpec {
    fn default() -> Self {
        MkSpec { radii: vec![1, 2], seminorm_radius: None, budget: 4000 }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CqmsSystem {
    #[default]
    ScalarSpan,
    Base,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CqmsSpec {
    pub system: CqmsSystem,
    pub f_radius: u32,
    pub budget: usize,
}

impl Default for CqmsSpec {
    fn default() -> Self {
        CqmsSpec { system: CqmsSystem::ScalarSpan, f_radius: 1, budget: 2000 }
    }
}

/// Everything a check needs, built once from a validated scenario.
pub struct Context {
    pub scenario: Scenario,
    pub seed: u64,
    pub group: GroupModel,
    pub length: MatrixLengthFunction,
    pub triple: Arc<FiniteSpectralTriple>,
    pub operator_system: OperatorSystemSpec,
    pub geo: CrossedGeometry,
    pub parities: (u8, u8),
    pub samples: Vec<CrossedElement>,
}

impl Context {
    pub fn cp(&self) -> &CrossedProduct {
        self.geo.crossed()
    }

    pub fn r_min(&self) -> u32 {
        self.scenario.radii[0]
    }

    pub fn r_max(&self) -> u32 {
        *self.scenario.radii.last().expect("validated radii")
    }
}

pub fn parse(text: &str) -> Result<Scenario, RunError> {
    toml::from_str(text).map_err(|e| RunError::Schema(e.to_string()))
}

/// Wraps a library error raised while building the object under `key`.
fn at(key: &str) -> impl Fn(Error) -> RunError + '_ {
    move |e| match e {
        Error::BallCap { .. } => RunError::Cap(format!("{key}: {e}")),
        e => RunError::Schema(format!("{key}: {e}")),
    }
}

fn schema(key: &str, msg: impl std::fmt::Display) -> RunError {
    RunError::Schema(format!("{key}: {msg}"))
}

fn matrix(spec: &MatrixSpec, key: &str) -> Result<CMat, RunError> {
    let rows = spec.re.len();
    let cols = spec.re.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || spec.re.iter().any(|r| r.len() != cols) {
        return Err(schema(key, "re must be a nonempty rectangular array"));
    }
    if let Some(im) = &spec.im {
        if im.len() != rows || im.iter().any(|r| r.len() != cols) {
            return Err(schema(key, "im must have the same shape as re"));
        }
    }
    Ok(CMat::from_fn(rows, cols, |i, j| {
        Complex64::new(spec.re[i][j], spec.im.as_ref().map_or(0.0, |im| im[i][j]))
    }))
}

fn build_group(spec: &GroupSpec, cap: usize) -> Result<GroupModel, RunError> {
    let (family, gens) = match spec {
        GroupSpec::FreeAbelian { rank, generators } => {
            if *rank == 0 {
                return Err(schema("group.rank", "must be positive"));
            }
            (GroupFamily::FreeAbelian { rank: *rank }, generators)
        }
        GroupSpec::Heisenberg { generators } => (GroupFamily::Heisenberg3, generators),
        GroupSpec::Cyclic { order, generators } => (GroupFamily::FiniteCyclic { order: *order }, generators),
    };
    let group = match gens {
        Some(g) => GroupModel::with_generators(family, g.iter().map(|c| GroupElement(c.clone())).collect()).map_err(at("group.generators"))?,
        None => GroupModel::new(family).map_err(at("group"))?,
    };
    Ok(group.with_cap(cap))
}

fn build_length(spec: &LengthSpec, group: &GroupModel) -> Result<MatrixLengthFunction, RunError> {
    match spec {
        LengthSpec::Word => Ok(MatrixLengthFunction::word(group.clone())),
        LengthSpec::Torus => MatrixLengthFunction::torus_z2(group.clone()).map_err(at("length.kind")),
        LengthSpec::Tabulated { entries, parity, grading, extension } => {
            let entries = entries
                .iter()
                .enumerate()
                .map(|(i, e)| Ok((GroupElement(e.g.clone()), matrix(&e.value, &format!("length.entries[{i}].value"))?)))
                .collect::<Result<Vec<_>, RunError>>()?;
            let grading = grading.as_ref().map(|g| matrix(g, "length.grading")).transpose()?;
            let extension = match extension {
                ExtensionSpec::Reject => Extension::Reject,
                ExtensionSpec::WordLengthTimes { matrix: m } => Extension::WordLengthTimes(matrix(m, "length.extension.matrix")?),
            };
            MatrixLengthFunction::tabulated(group.clone(), entries, *parity, grading, extension).map_err(at("length"))
        }
    }
}

fn build_base(spec: &BaseSpec) -> Result<FiniteSpectralTriple, RunError> {
    match spec {
        BaseSpec::FiniteMetric { distance, graded: false } => FiniteSpectralTriple::lip_triple(distance.clone()).map_err(at("base.distance")),
        BaseSpec::FiniteMetric { distance, graded: true } => {
            FiniteSpectralTriple::lip_triple_graded(distance.clone()).map_err(at("base.distance"))
        }
        BaseSpec::MatrixInner { k, dirac } => {
            let d = dirac.as_ref().map(|d| matrix(d, "base.dirac")).transpose()?;
            FiniteSpectralTriple::matrix_inner(*k, d).map_err(at("base"))
        }
    }
}

fn build_action(spec: &ActionSpec, group: &GroupModel, triple: &FiniteSpectralTriple) -> Result<GroupAction, RunError> {
    match spec {
        ActionSpec::Trivial => Ok(GroupAction::trivial(group.clone(), triple)),
        ActionSpec::Permutation { permutations } => {
            GroupAction::permutation(group.clone(), triple, permutations.clone()).map_err(at("action.permutations"))
        }
        ActionSpec::Inner { unitaries } => {
            let us = unitaries
                .iter()
                .enumerate()
                .map(|(i, u)| matrix(u, &format!("action.unitaries[{i}]")))
                .collect::<Result<Vec<_>, RunError>>()?;
            GroupAction::inner(group.clone(), triple, us).map_err(at("action.unitaries"))
        }
    }
}

fn strictly_increasing(v: &[u32]) -> bool {
    !v.is_empty() && v.windows(2).all(|w| w[0] < w[1])
}

/// Validates every key and builds the context. No check runs before this
/// succeeds.
pub fn build(scenario: Scenario, seed_override: Option<u64>, cap: usize) -> Result<Context, RunError> {
    if scenario.name.trim().is_empty() {
        return Err(schema("name", "must be nonempty"));
    }
    if !strictly_increasing(&scenario.radii) {
        return Err(schema("radii", "must be nonempty and strictly increasing"));
    }
    if scenario.checks.is_empty() {
        return Err(schema("checks", "must list at least one check"));
    }
    let mut seen = scenario.checks.clone();
    seen.sort();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(schema("checks", "contains duplicates"));
    }
    if !(scenario.tolerances.convergence > 0.0 && scenario.tolerances.convergence.is_finite()) {
        return Err(schema("tolerances.convergence", "must be a positive number"));
    }
    if scenario.folner.n_min > scenario.folner.n_max {
        return Err(schema("folner.n_min", "must not exceed folner.n_max"));
    }
    if !strictly_increasing(&scenario.mk.radii) {
        return Err(schema("mk.radii", "must be nonempty and strictly increasing"));
    }
    let mk_top = *scenario.mk.radii.last().expect("checked");
    if scenario.mk.seminorm_radius.is_some_and(|r| r < mk_top) {
        return Err(schema("mk.seminorm_radius", "must be at least the largest mk radius"));
    }
    if scenario.sampler.count == 0 && scenario.sampler.elements.is_empty() {
        return Err(schema("sampler.count", "must be positive when no explicit elements are given"));
    }
    if scenario.sampler.terms == 0 {
        return Err(schema("sampler.terms", "must be positive"));
    }

    let group = build_group(&scenario.group, cap)?;
    let length = build_length(&scenario.length, &group)?;
    let triple = build_base(&scenario.base)?;
    let action = build_action(&scenario.action, &group, &triple)?;
    let operator_system = match &scenario.operator_system {
        OperatorSystemConfig::Full => OperatorSystemSpec::full(&triple),
        OperatorSystemConfig::Span { basis } => OperatorSystemSpec {
            basis: basis
                .iter()
                .enumerate()
                .map(|(i, b)| matrix(b, &format!("operator_system.basis[{i}]")))
                .collect::<Result<_, _>>()?,
            action_invariant: true,
        },
    };
    operator_system.validate(&triple, Some(&action)).map_err(at("operator_system"))?;
    let natural = (length.parity(), triple.parity());
    let parities = match scenario.tensor.parities {
        Some([p, q]) if (p, q) != natural => {
            return Err(schema(
                "tensor.parities",
                format!("[{p}, {q}] does not match the length parity {} and base parity {}", natural.0, natural.1),
            ))
        }
        _ => natural,
    };
    let cp = CrossedProduct::new(group.clone(), triple, action).map_err(at("action"))?;
    let triple = Arc::new(cp.triple().clone());
    let geo = CrossedGeometry::new(cp, length.clone()).map_err(at("length"))?;
    group.ball(*scenario.radii.last().expect("checked")).map_err(at("radii"))?;

    let seed = seed_override.unwrap_or(scenario.seed);
    let samples = if scenario.sampler.elements.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = &scenario.sampler;
        (0..s.count)
            .map(|_| {
                if s.scalar {
                    geo.crossed().random_scalar_element(&mut rng, s.support_radius, s.terms)
                } else {
                    geo.crossed().random_element(&mut rng, s.support_radius, s.terms)
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(at("sampler"))?
    } else {
        scenario
            .sampler
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let terms = e
                    .terms
                    .iter()
                    .enumerate()
                    .map(|(j, t)| Ok((GroupElement(t.g.clone()), matrix(&t.x, &format!("sampler.elements[{i}].terms[{j}].x"))?)))
                    .collect::<Result<Vec<_>, RunError>>()?;
                geo.crossed().element(terms).map_err(at(&format!("sampler.elements[{i}]")))
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(Context { scenario, seed, group, length, triple, operator_system, geo, parities, samples })
}
