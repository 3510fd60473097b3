//! The algebraic crossed product `A ⋊_alg Γ` and its covariant
//! representation on `ℓ²(Γ, H)`, compressed to word-metric balls.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{FiniteSpectralTriple, GroupAction};
use crate::error::{Error, Result};
use crate::group::{Ball, GroupElement, GroupModel};
use crate::numerics::{self, c64, CMat, CVec};

/// Relative residual used for every truncated operator norm.
pub const SPECTRAL_TOL: f64 = 1e-12;
pub(crate) const NORM_SEED: u64 = 0x5eed_c0ff_ee00_0001;

/// A finitely supported element `Σ_g π(x_g) λ_g`. Coefficients that are
/// exactly zero are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossedElement {
    m: usize,
    coeffs: BTreeMap<GroupElement, CMat>,
}

/// One term of the JSON form of an element.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Term {
    pub g: Vec<i64>,
    /// Row-major coefficient matrix, each entry `[re, im]`.
    pub x: Vec<Complex64>,
}

impl CrossedElement {
    pub fn zero(m: usize) -> Self {
        CrossedElement { m, coeffs: BTreeMap::new() }
    }

    pub fn from_terms_unchecked(m: usize, terms: impl IntoIterator<Item = (GroupElement, CMat)>) -> Self {
        let mut z = Self::zero(m);
        for (g, x) in terms {
            z.add_term(g, x);
        }
        z
    }

    fn add_term(&mut self, g: GroupElement, x: CMat) {
        let entry = self.coeffs.entry(g.clone()).or_insert_with(|| CMat::zeros(self.m, self.m));
        *entry += x;
        if numerics::max_abs(entry) == 0.0 {
            self.coeffs.remove(&g);
        }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.coeffs.keys()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &CMat)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `E_g(z) = x_g`.
    pub fn slice(&self, g: &GroupElement) -> CMat {
        self.coeffs.get(g).cloned().unwrap_or_else(|| CMat::zeros(self.m, self.m))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, x) in &other.coeffs {
            out.add_term(g.clone(), x.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(c64(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms_unchecked(self.m, self.coeffs.iter().map(|(g, x)| (g.clone(), x * c)))
    }

    /// Multiplies each coefficient `x_g` by a scalar `c(g)`.
    pub fn map_coefficients(&self, mut c: impl FnMut(&GroupElement) -> Complex64) -> Self {
        Self::from_terms_unchecked(self.m, self.coeffs.iter().map(|(g, x)| (g.clone(), x * c(g))))
    }

    /// Whether every coefficient is a multiple of the identity.
    pub fn is_scalar(&self) -> bool {
        self.coeffs.values().all(|x| {
            let c = x[(0, 0)];
            numerics::max_abs(&(x - numerics::identity(self.m) * c)) == 0.0
        })
    }

    pub fn to_terms(&self) -> Vec<Term> {
        self.coeffs
            .iter()
            .map(|(g, x)| Term { g: g.0.clone(), x: (0..self.m * self.m).map(|k| x[(k / self.m, k % self.m)]).collect() })
            .collect()
    }
}

/// The crossed product data: group, base triple and action.
#[derive(Clone, Debug)]
pub struct CrossedProduct {
    group: GroupModel,
    triple: Arc<FiniteSpectralTriple>,
    action: Arc<GroupAction>,
}

/// A compression of the covariant representation to a ball.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub ball: Arc<Ball>,
    pub matrix: CMat,
    pub provenance: &'static str,
}

/// Per-radius norms of a sequence of compressions.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeminormReport {
    pub value: f64,
    pub converged: bool,
    pub trace: Vec<(u32, f64)>,
    pub tol: f64,
}

impl SeminormReport {
    /// Assembles a report from a per-radius trace.
    pub fn from_trace(trace: Vec<(u32, f64)>, tol: f64, exact: bool) -> Self {
        let value = trace.last().map_or(0.0, |t| t.1);
        let converged = exact
            || match trace.len() {
                0 | 1 => false,
                n => {
                    let (a, b) = (trace[n - 2].1, trace[n - 1].1);
                    (b - a).abs() <= tol * b.abs().max(a.abs()) || (a == 0.0 && b == 0.0)
                }
            };
        SeminormReport { value, converged, trace, tol }
    }

    pub fn at(&self, r: u32) -> Option<f64> {
        self.trace.iter().find(|t| t.0 == r).map(|t| t.1)
    }
}

/// A vector functional `η(w) = ⟨ζ, T_R(w) ζ′⟩` with unit vectors on a truncation.
#[derive(Clone, Debug)]
pub struct VectorFunctional {
    pub radius: u32,
    pub zeta: CVec,
    pub zeta_prime: CVec,
}

impl VectorFunctional {
    pub fn new(cp: &CrossedProduct, radius: u32, zeta: CVec, zeta_prime: CVec) -> Result<Self> {
        let dim = cp.group.ball(radius)?.len() * cp.dim();
        for v in [&zeta, &zeta_prime] {
            if v.len() != dim {
                return Err(Error::InvalidFunctional(format!("vectors must have length {dim}")));
            }
            if (v.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidFunctional(format!("vector norm {} is not 1", v.norm())));
            }
        }
        Ok(VectorFunctional { radius, zeta, zeta_prime })
    }

    /// Vector state at `δ_e ⊗ ξ`.
    pub fn state_at_identity(cp: &CrossedProduct, radius: u32, xi: &CVec) -> Result<Self> {
        let dim = cp.group.ball(radius)?.len() * cp.dim();
        let mut v = CVec::zeros(dim);
        v.rows_mut(0, cp.dim()).copy_from(&xi.unscale(xi.norm()));
        Self::new(cp, radius, v.clone(), v)
    }

    pub fn random<R: Rng>(cp: &CrossedProduct, radius: u32, rng: &mut R) -> Result<Self> {
        let dim = cp.group.ball(radius)?.len() * cp.dim();
        let mut draw = || {
            let v = CVec::from_fn(dim, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            v.unscale(v.norm())
        };
        let (a, b) = (draw(), draw());
        Self::new(cp, radius, a, b)
    }

    pub fn eval(&self, cp: &CrossedProduct, z: &CrossedElement) -> Result<Complex64> {
        let t = cp.truncated_matrix(z, self.radius)?;
        Ok(self.zeta.dotc(&(&t.matrix * &self.zeta_prime)))
    }
}

impl CrossedProduct {
    pub fn new(group: GroupModel, triple: FiniteSpectralTriple, action: GroupAction) -> Result<Self> {
        if action.group() != &group {
            return Err(Error::InvalidAction("action is defined on a different group".into()));
        }
        if action.generator_unitaries().first().map_or(false, |u| u.nrows() != triple.dim()) {
            return Err(Error::InvalidAction("action and triple act on different spaces".into()));
        }
        Ok(CrossedProduct { group, triple: Arc::new(triple), action: Arc::new(action) })
    }

    /// `C Γ`: one-point base with the trivial action.
    pub fn group_algebra(group: GroupModel) -> Self {
        let triple = FiniteSpectralTriple::lip_triple(vec![vec![0.0]]).expect("one-point space");
        let action = GroupAction::trivial(group.clone(), &triple);
        CrossedProduct { group, triple: Arc::new(triple), action: Arc::new(action) }
    }

    pub fn group(&self) -> &GroupModel {
        &self.group
    }

    pub fn triple(&self) -> &FiniteSpectralTriple {
        &self.triple
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    pub fn dim(&self) -> usize {
        self.triple.dim()
    }

    fn check_element(&self, z: &CrossedElement) -> Result<()> {
        if z.m != self.dim() {
            return Err(Error::Dimension(format!("element has {}x{} coefficients, expected {}", z.m, z.m, self.dim())));
        }
        for g in z.support() {
            self.group.check(g)?;
        }
        Ok(())
    }

    /// Builds an element from terms, validating coordinates and shapes.
    pub fn element(&self, terms: impl IntoIterator<Item = (GroupElement, CMat)>) -> Result<CrossedElement> {
        let mut z = CrossedElement::zero(self.dim());
        for (g, x) in terms {
            let g = self.group.normalize(g)?;
            if x.shape() != (self.dim(), self.dim()) {
                return Err(Error::Dimension(format!("coefficient at {g} has shape {:?}", x.shape())));
            }
            numerics::ensure_finite(&x)?;
            z.add_term(g, x);
        }
        Ok(z)
    }

    pub fn from_terms(&self, terms: &[Term]) -> Result<CrossedElement> {
        let m = self.dim();
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            if t.x.len() != m * m {
                return Err(Error::Dimension(format!("coefficient needs {} entries, got {}", m * m, t.x.len())));
            }
            out.push((GroupElement(t.g.clone()), CMat::from_row_slice(m, m, &t.x)));
        }
        self.element(out)
    }

    pub fn one(&self) -> CrossedElement {
        CrossedElement::from_terms_unchecked(self.dim(), [(self.group.identity(), numerics::identity(self.dim()))])
    }

    /// `π(x) λ_g`.
    pub fn monomial(&self, x: CMat, g: &GroupElement) -> Result<CrossedElement> {
        self.element([(g.clone(), x)])
    }

    /// `λ_g`.
    pub fn lambda(&self, g: &GroupElement) -> Result<CrossedElement> {
        self.monomial(numerics::identity(self.dim()), g)
    }

    /// `π(x) = π(x) λ_e`.
    pub fn pi(&self, x: CMat) -> Result<CrossedElement> {
        self.monomial(x, &self.group.identity())
    }

    /// Embeds a scalar element of `C Γ` with coefficients `c_g · 1`.
    pub fn embed_scalar(&self, c: &CrossedElement) -> Result<CrossedElement> {
        if c.dim() != 1 {
            return Err(Error::Dimension("expected a scalar-coefficient element".into()));
        }
        let id = numerics::identity(self.dim());
        self.element(c.terms().map(|(g, x)| (g.clone(), &id * x[(0, 0)])))
    }

    /// `(z w)_k = Σ_{gh = k} x_g α_g(y_h)`.
    pub fn multiply(&self, z: &CrossedElement, w: &CrossedElement) -> Result<CrossedElement> {
        self.check_element(z)?;
        self.check_element(w)?;
        let mut out = CrossedElement::zero(self.dim());
        for (g, x) in z.terms() {
            for (h, y) in w.terms() {
                let k = self.group.mul_unchecked(g, h);
                out.add_term(k, x * self.action.act(g, y)?);
            }
        }
        Ok(out)
    }

    /// `(z*)_h = α_h((x_{h⁻¹})*)`.
    pub fn adjoint(&self, z: &CrossedElement) -> Result<CrossedElement> {
        self.check_element(z)?;
        let mut out = CrossedElement::zero(self.dim());
        for (g, x) in z.terms() {
            let h = self.group.inv_unchecked(g);
            let y = self.action.act(&h, &x.adjoint())?;
            out.add_term(h, y);
        }
        Ok(out)
    }

    /// Conditional expectation onto `A`: `E(z) = x_e`.
    pub fn expectation(&self, z: &CrossedElement) -> CMat {
        z.slice(&self.group.identity())
    }

    /// Largest word length in the support.
    pub fn support_radius(&self, z: &CrossedElement) -> Result<u32> {
        self.group.max_length(z.support())
    }

    /// Scalar element `Σ_g η(π(x_g) λ_g) λ_g` of `C Γ`.
    pub fn coaction_slice(&self, eta: &VectorFunctional, z: &CrossedElement) -> Result<CrossedElement> {
        self.check_element(z)?;
        let mut out = CrossedElement::zero(1);
        for (g, x) in z.terms() {
            let v = eta.eval(self, &self.monomial(x.clone(), g)?)?;
            out.add_term(g.clone(), CMat::from_element(1, 1, v));
        }
        Ok(out)
    }

    /// Shared assembler for every operator of the form `Σ_g B_g λ_g`: block
    /// `(t, s)` with `t = g s` is `block(g, t, α_{t⁻¹}(x_g))`, kept only when
    /// both sites lie in the ball.
    pub(crate) fn assemble<F>(&self, z: &CrossedElement, ball: &Ball, bd: usize, block: F) -> Result<CMat>
    where
        F: Fn(&GroupElement, &GroupElement, &CMat) -> Result<CMat>,
    {
        self.check_element(z)?;
        let n = ball.len();
        let mut out = CMat::zeros(n * bd, n * bd);
        if z.is_zero() {
            return Ok(out);
        }
        let unitaries: Option<Vec<CMat>> = match self.action.realization() {
            crate::base::ActionRealization::Trivial => None,
            _ => Some(
                ball.elements
                    .iter()
                    .map(|t| self.action.unitary(&self.group.inv_unchecked(t)))
                    .collect::<Result<_>>()?,
            ),
        };
        for (g, x) in z.terms() {
            for (si, s) in ball.elements.iter().enumerate() {
                let t = self.group.mul_unchecked(g, s);
                let Some(ti) = ball.position(&t) else { continue };
                let ax = match &unitaries {
                    Some(us) => &us[ti] * x * us[ti].adjoint(),
                    None => x.clone(),
                };
                let b = block(g, &t, &ax)?;
                debug_assert_eq!(b.shape(), (bd, bd));
                let mut view = out.view_mut((ti * bd, si * bd), (bd, bd));
                view += b;
            }
        }
        Ok(out)
    }

    /// Compression of `z` to `ℓ²(B_R) ⊗ H`.
    pub fn truncated_matrix(&self, z: &CrossedElement, r: u32) -> Result<TruncatedOperator> {
        let ball = self.group.ball(r)?;
        let matrix = self.assemble(z, &ball, self.dim(), |_, _, ax| Ok(ax.clone()))?;
        Ok(TruncatedOperator { ball, matrix, provenance: "covariant representation on l2(ball) x H" })
    }

    /// Whether the ball of radius `r` already exhausts a finite group.
    pub fn ball_is_whole_group(&self, r: u32) -> Result<bool> {
        Ok(match self.group.family() {
            crate::group::GroupFamily::FiniteCyclic { order } => self.group.ball(r)?.len() as u64 == order,
            _ => false,
        })
    }

    /// Truncated norms along a strictly increasing schedule.
    pub fn operator_norm(&self, z: &CrossedElement, schedule: &[u32], tol: f64) -> Result<SeminormReport> {
        norm_schedule(self, schedule, tol, |r| Ok(self.truncated_matrix(z, r)?.matrix))
    }

    /// Random element with `terms` coefficients drawn from the algebra and
    /// support drawn from `B_r`.
    pub fn random_element<R: Rng>(&self, rng: &mut R, r: u32, terms: usize) -> Result<CrossedElement> {
        let ball = self.group.ball(r)?;
        let mut support: Vec<&GroupElement> = ball.elements.iter().collect();
        support.shuffle(rng);
        let mut z = CrossedElement::zero(self.dim());
        for g in support.into_iter().take(terms.max(1)) {
            z.add_term(g.clone(), self.triple.random_element(rng));
        }
        Ok(z)
    }

    /// Random element of `C Γ ⊂ A ⋊ Γ` supported in `B_r`.
    pub fn random_scalar_element<R: Rng>(&self, rng: &mut R, r: u32, terms: usize) -> Result<CrossedElement> {
        let ball = self.group.ball(r)?;
        let mut support: Vec<&GroupElement> = ball.elements.iter().collect();
        support.shuffle(rng);
        let id = numerics::identity(self.dim());
        let mut z = CrossedElement::zero(self.dim());
        for g in support.into_iter().take(terms.max(1)) {
            z.add_term(g.clone(), &id * c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
        Ok(z)
    }
}

/// Evaluates `‖build(R)‖` for each radius, in parallel, and folds the trace
/// into a report.
pub(crate) fn norm_schedule<F>(cp: &CrossedProduct, schedule: &[u32], tol: f64, build: F) -> Result<SeminormReport>
where
    F: Fn(u32) -> Result<CMat> + Sync,
{
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSchedule);
    }
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    // Resolve the largest ball first so cap errors surface before any work.
    cp.group().ball(*schedule.last().expect("nonempty schedule"))?;
    let values: Vec<Result<(u32, f64)>> = schedule
        .par_iter()
        .map(|&r| {
            let m = build(r)?;
            Ok((r, numerics::spectral_norm(&m, SPECTRAL_TOL, NORM_SEED ^ r as u64)?))
        })
        .collect();
    let trace = values.into_iter().collect::<Result<Vec<_>>>()?;
    let exact = cp.ball_is_whole_group(*schedule.last().expect("nonempty"))?;
    Ok(SeminormReport::from_trace(trace, tol, exact))
}
