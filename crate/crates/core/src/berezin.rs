//! States on the group algebra, Berezin transforms along Følner sets and the
//! approximation inequalities they satisfy.

use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use crate::crossed::{CrossedElement, CrossedProduct, VectorFunctional};
use crate::error::{Error, Result};
use crate::group::{Ball, GroupElement, GroupModel};
use crate::length::MatrixLengthFunction;
use crate::numerics::c64;
use crate::seminorm::CrossedGeometry;

pub const CONTRACTION_SLACK: f64 = 1e-10;
pub const SLICE_SLACK: f64 = 1e-6;
pub const IDENTITY_SLACK: f64 = 1e-10;
pub const BOUND_SLACK: f64 = 1e-8;

/// A state on `C Γ`, or a vector functional on the crossed product.
#[derive(Clone, Debug)]
pub enum StateSpec {
    /// `ε(λ_g) = 1`.
    Counit,
    /// `τ(λ_g) = [g = e]`.
    Trace,
    /// `χ_F(z) = ⟨ξ_F, z ξ_F⟩` with `ξ_F` the normalized indicator of `F`.
    Folner(Arc<Ball>),
    Vector(VectorFunctional),
}

impl StateSpec {
    /// Coefficient multiplying `λ_g` when the state is evaluated on `C Γ`.
    pub fn weight(&self, group: &GroupModel, g: &GroupElement) -> Result<f64> {
        match self {
            StateSpec::Counit => Ok(1.0),
            StateSpec::Trace => Ok(if *g == group.identity() { 1.0 } else { 0.0 }),
            StateSpec::Folner(f) => chi_coefficient(group, f, g),
            StateSpec::Vector(_) => Err(Error::InvalidFunctional("vector functionals have no group weights".into())),
        }
    }

    /// Evaluation. Group-weight states need scalar-coefficient elements.
    pub fn eval(&self, cp: &CrossedProduct, z: &CrossedElement) -> Result<Complex64> {
        if let StateSpec::Vector(eta) = self {
            return eta.eval(cp, z);
        }
        if !z.is_scalar() {
            return Err(Error::InvalidFunctional("state is defined on scalar-coefficient elements only".into()));
        }
        let mut acc = c64(0.0, 0.0);
        for (g, x) in z.terms() {
            acc += x[(0, 0)] * self.weight(cp.group(), g)?;
        }
        Ok(acc)
    }

    pub fn label(&self) -> String {
        match self {
            StateSpec::Counit => "counit".into(),
            StateSpec::Trace => "trace".into(),
            StateSpec::Folner(f) => format!("folner(r={})", f.radius),
            StateSpec::Vector(v) => format!("vector(R={})", v.radius),
        }
    }
}

/// Outcome of one inequality or identity check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub radius: u32,
    pub pass: bool,
    pub slack: f64,
    pub reference: String,
}

impl CheckReport {
    fn le(check: &str, lhs: f64, rhs: f64, radius: u32, slack: f64, reference: &str) -> Self {
        CheckReport { check: check.into(), lhs, rhs, radius, pass: lhs <= rhs + slack, slack, reference: reference.into() }
    }
}

/// `|F ∩ gF| / |F|` as an exact rational.
pub fn chi_coefficient_exact(group: &GroupModel, f: &Ball, g: &GroupElement) -> Result<Rational64> {
    group.folner_overlap(f, g)
}

pub fn chi_coefficient(group: &GroupModel, f: &Ball, g: &GroupElement) -> Result<f64> {
    let c = chi_coefficient_exact(group, f, g)?;
    Ok(*c.numer() as f64 / *c.denom() as f64)
}

/// `β_F(z) = Σ_g c_g x_g λ_g`.
pub fn berezin(cp: &CrossedProduct, f: &Ball, z: &CrossedElement) -> Result<CrossedElement> {
    let mut err = None;
    let out = z.map_coefficients(|g| match chi_coefficient(cp.group(), f, g) {
        Ok(c) => c64(c, 0.0),
        Err(e) => {
            err.get_or_insert(e);
            c64(0.0, 0.0)
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// `‖d_l(β_F z)‖_R ≤ ‖d_l(z)‖_R` at one radius.
pub fn contraction_check(geo: &CrossedGeometry, f: &Ball, z: &CrossedElement, r: u32) -> Result<CheckReport> {
    let bz = berezin(geo.crossed(), f, z)?;
    let lhs = geo.l_l(&bz, &[r], 1.0)?.value;
    let rhs = geo.l_l(z, &[r], 1.0)?.value;
    Ok(CheckReport::le("berezin-contraction", lhs, rhs, r, CONTRACTION_SLACK, "L_l(beta_F z) <= L_l(z)"))
}

/// `‖d_l((η ⊗ 1)δ(z))‖_R ≤ ‖d_l(z)‖_{R′}`, raising `R′` up to `extra` times
/// while the inequality fails.
pub fn slice_contraction_check(
    geo: &CrossedGeometry,
    eta: &VectorFunctional,
    z: &CrossedElement,
    r: u32,
    r_prime: u32,
    extra: u32,
) -> Result<CheckReport> {
    let slice = geo.crossed().coaction_slice(eta, z)?;
    let scalar = scalar_geometry(geo)?;
    let lhs = scalar.l_l(&slice, &[r], 1.0)?.value;
    let mut rp = r_prime;
    loop {
        let rhs = geo.l_l(z, &[rp], 1.0)?.value;
        let rep = CheckReport::le("slice-contraction", lhs, rhs, rp, SLICE_SLACK, "L_l((eta x 1) delta(z)) <= L_l(z)");
        if rep.pass || rp >= r_prime + extra {
            return Ok(rep);
        }
        rp += 1;
    }
}

/// The same length function on `C Γ`.
pub fn scalar_geometry(geo: &CrossedGeometry) -> Result<CrossedGeometry> {
    let group = geo.crossed().group().clone();
    CrossedGeometry::new(CrossedProduct::group_algebra(group), geo.length().clone())
}

/// `η(β_F z − z) = (χ_F − ε)((η ⊗ 1)δ(z))`, both sides evaluated independently.
pub fn approximation_identity_check(cp: &CrossedProduct, eta: &VectorFunctional, f: &Arc<Ball>, z: &CrossedElement) -> Result<CheckReport> {
    let diff = berezin(cp, f, z)?.sub(z);
    let left = eta.eval(cp, &diff)?;
    let slice = cp.coaction_slice(eta, z)?;
    let scalar = CrossedProduct::group_algebra(cp.group().clone());
    let chi = StateSpec::Folner(Arc::clone(f)).eval(&scalar, &slice)?;
    let eps = StateSpec::Counit.eval(&scalar, &slice)?;
    let right = chi - eps;
    let gap = (left - right).norm();
    Ok(CheckReport {
        check: "approximation-identity".into(),
        lhs: gap,
        rhs: 0.0,
        radius: eta.radius,
        pass: gap <= IDENTITY_SLACK,
        slack: IDENTITY_SLACK,
        reference: "eta(beta_F z - z) = (chi_F - epsilon)((eta x 1) delta(z))".into(),
    })
}

/// Surrogate `ρ̂^{(r)} = sqrt(Σ_{g ∈ B_r \ {e}} (1 − c_g)² / σ_min(l(g))²)` for
/// the distance between `χ_F` (or `τ` when `f` is `None`) and `ε`.
pub fn mk_upper(length: &MatrixLengthFunction, f: Option<&Ball>, r: u32) -> Result<f64> {
    let group = length.group();
    let ball = group.ball(r)?;
    let mut acc = 0.0;
    for g in ball.elements.iter().skip(1) {
        let s = length.sigma_min(g)?;
        if !(s > 0.0) {
            return Err(Error::SingularLength(g.to_string()));
        }
        let c = match f {
            Some(f) => chi_coefficient(group, f, g)?,
            None => 0.0,
        };
        acc += (1.0 - c).powi(2) / (s * s);
    }
    Ok(acc.sqrt())
}

/// `‖β_F z − z‖_R ≤ ρ̂^{(r)} · L_l(z)` with `L_l(z)` taken at radius `r_norm`.
pub fn approximation_bound_check(geo: &CrossedGeometry, f: &Ball, z: &CrossedElement, r: u32, r_norm: u32) -> Result<CheckReport> {
    let cp = geo.crossed();
    let support = cp.support_radius(z)?;
    if support > r {
        return Err(Error::Invalid(format!("support radius {support} exceeds surrogate radius {r}")));
    }
    let diff = berezin(cp, f, z)?.sub(z);
    let lhs = cp.operator_norm(&diff, &[r_norm], 1.0)?.value;
    let rho = mk_upper(geo.length(), Some(f), r)?;
    let ll = geo.l_l(z, &[r_norm], 1.0)?.value;
    Ok(CheckReport::le("approximation-bound", lhs, rho * ll, r_norm, BOUND_SLACK, "||beta_F z - z|| <= rho(chi_F, epsilon) L(z)"))
}

#[derive(Clone, Debug, Serialize)]
pub struct FolnerRow {
    pub n: u32,
    pub rho_hat: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FolnerTable {
    pub r: u32,
    pub rows: Vec<FolnerRow>,
    pub strictly_decreasing: bool,
}

/// `n ↦ ρ̂^{(r)}(χ_{B_n}, ε)` over the given schedule.
pub fn folner_convergence(length: &MatrixLengthFunction, r: u32, ns: &[u32]) -> Result<FolnerTable> {
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let f = length.group().ball(n)?;
        rows.push(FolnerRow { n, rho_hat: mk_upper(length, Some(&f), r)? });
    }
    let strictly_decreasing = rows.windows(2).all(|w| w[1].rho_hat < w[0].rho_hat);
    Ok(FolnerTable { r, rows, strictly_decreasing })
}
