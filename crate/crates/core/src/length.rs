//! Matrix-valued length functions `l: Γ → M_n(C)` and their difference maps.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupFamily, GroupModel};
use crate::numerics::{self, c64, CMat};

const AXIOM_TOL: f64 = 1e-12;

/// How a tabulated length is continued outside its table.
#[derive(Clone, Debug)]
pub enum Extension {
    /// Evaluation outside the table is an error.
    Reject,
    /// `l(g) = |g| · P` for a fixed Hermitian matrix `P`.
    WordLengthTimes(CMat),
}

#[derive(Clone, Debug)]
enum Kind {
    Word,
    Torus,
    Tabulated { table: HashMap<GroupElement, CMat>, extension: Extension },
}

#[derive(Clone, Debug)]
pub struct MatrixLengthFunction {
    group: GroupModel,
    n: usize,
    parity: u8,
    grading: Option<CMat>,
    kind: Kind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Properness {
    /// The sphere minima increase over the computed range.
    Diverging,
    /// The group is finite, so properness holds vacuously.
    FiniteGroup,
    /// No divergence visible on the computed range.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropernessProfile {
    /// `(r, min_{|s| = r} σ_min(l(s)))` for every nonempty sphere.
    pub profile: Vec<(u32, f64)>,
    pub r_max: u32,
    pub diagnosis: Properness,
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthAudit {
    pub radius: u32,
    pub hermitian_deviation: f64,
    pub vanishes_only_at_identity: bool,
    pub anticommutator: Option<f64>,
    /// `max_g phi_sup(g, r) / |g|` over `g ≠ e` in the half-radius ball.
    pub phi_slope: f64,
    pub phi_monotone: bool,
    pub inverse_singular_deviation: f64,
    pub pass: bool,
}

impl MatrixLengthFunction {
    /// Scalar word length `g ↦ |g|`, odd.
    pub fn word(group: GroupModel) -> Self {
        MatrixLengthFunction { group, n: 1, parity: 1, grading: None, kind: Kind::Word }
    }

    /// `l(n, m) = [[0, n + im], [n − im, 0]]` on `Z^2`, graded by `diag(1, −1)`.
    pub fn torus_z2(group: GroupModel) -> Result<Self> {
        if group.family() != (GroupFamily::FreeAbelian { rank: 2 }) {
            return Err(Error::InvalidLength(format!("torus length needs z^2, got {}", group.family().label())));
        }
        let grading = CMat::from_diagonal(&numerics::CVec::from_vec(vec![c64(1.0, 0.0), c64(-1.0, 0.0)]));
        Ok(MatrixLengthFunction { group, n: 2, parity: 0, grading: Some(grading), kind: Kind::Torus })
    }

    /// A length given by a finite table plus an extension rule. Axioms are
    /// validated on the table only.
    pub fn tabulated(
        group: GroupModel,
        entries: Vec<(GroupElement, CMat)>,
        parity: u8,
        grading: Option<CMat>,
        extension: Extension,
    ) -> Result<Self> {
        let n = entries
            .first()
            .map(|(_, m)| m.nrows())
            .ok_or_else(|| Error::InvalidLength("empty length table".into()))?;
        if n == 0 {
            return Err(Error::InvalidLength("length matrices must be nonempty".into()));
        }
        check_parity(parity, grading.as_ref(), n)?;
        let mut table = HashMap::new();
        for (g, m) in entries {
            let g = group.normalize(g)?;
            if m.shape() != (n, n) {
                return Err(Error::InvalidLength(format!("entry at {g} is not {n}x{n}")));
            }
            numerics::ensure_finite(&m)?;
            check_entry(&g, &m, &group, grading.as_ref())?;
            if table.insert(g.clone(), m).is_some() {
                return Err(Error::InvalidLength(format!("duplicate entry at {g}")));
            }
        }
        if !table.contains_key(&group.identity()) {
            return Err(Error::InvalidLength("table must contain the identity".into()));
        }
        if let Extension::WordLengthTimes(p) = &extension {
            if p.shape() != (n, n) || !numerics::is_hermitian(p, AXIOM_TOL) || numerics::max_abs(p) == 0.0 {
                return Err(Error::InvalidLength("extension matrix must be a nonzero Hermitian n x n matrix".into()));
            }
            if let Some(gam) = &grading {
                if numerics::anticommutator_max(gam, p) > AXIOM_TOL {
                    return Err(Error::InvalidLength("extension matrix must anticommute with the grading".into()));
                }
            }
        }
        Ok(MatrixLengthFunction { group, n, parity, grading, kind: Kind::Tabulated { table, extension } })
    }

    pub fn group(&self) -> &GroupModel {
        &self.group
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn grading(&self) -> Option<&CMat> {
        self.grading.as_ref()
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            Kind::Word => "word",
            Kind::Torus => "torus_z2",
            Kind::Tabulated { .. } => "tabulated",
        }
    }

    /// `l(g)`.
    pub fn eval(&self, g: &GroupElement) -> Result<CMat> {
        self.group.check(g)?;
        match &self.kind {
            Kind::Word => Ok(CMat::from_element(1, 1, c64(self.group.word_length(g)? as f64, 0.0))),
            Kind::Torus => {
                let (a, b) = (g.0[0] as f64, g.0[1] as f64);
                Ok(CMat::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(a, b), c64(a, -b), c64(0.0, 0.0)]))
            }
            Kind::Tabulated { table, extension } => match table.get(g) {
                Some(m) => Ok(m.clone()),
                None => match extension {
                    Extension::Reject => Err(Error::OutsideTable(g.to_string())),
                    Extension::WordLengthTimes(p) => Ok(p.scale(self.group.word_length(g)? as f64)),
                },
            },
        }
    }

    /// `φ_g(s) = l(s) − l(g⁻¹ s)`.
    pub fn phi(&self, g: &GroupElement, s: &GroupElement) -> Result<CMat> {
        let ginv_s = self.group.multiply(&self.group.invert(g)?, s)?;
        Ok(self.eval(s)? - self.eval(&ginv_s)?)
    }

    /// `max_{s ∈ B_r} ‖φ_g(s)‖`.
    pub fn phi_sup(&self, g: &GroupElement, r: u32) -> Result<f64> {
        let ball = self.group.ball(r)?;
        let mut best = 0.0_f64;
        for s in &ball.elements {
            best = best.max(small_norm(&self.phi(g, s)?));
        }
        Ok(best)
    }

    /// Smallest singular value of `l(g)`.
    pub fn sigma_min(&self, g: &GroupElement) -> Result<f64> {
        Ok(numerics::sigma_min(&self.eval(g)?))
    }

    /// Sphere-wise minima of `σ_min(l(s))` for `1 ≤ r ≤ r_max`.
    pub fn properness_profile(&self, r_max: u32) -> Result<PropernessProfile> {
        if r_max < 1 {
            return Err(Error::Invalid("properness profile needs r_max ≥ 1".into()));
        }
        let ball = self.group.ball(r_max)?;
        let mut profile = Vec::new();
        for r in 1..=r_max {
            let sphere = ball.sphere(r);
            if sphere.is_empty() {
                continue;
            }
            let mut m = f64::INFINITY;
            for s in sphere {
                m = m.min(self.sigma_min(s)?);
            }
            profile.push((r, m));
        }
        let diagnosis = if self.group.family().is_finite() {
            Properness::FiniteGroup
        } else if profile.len() >= 2
            && profile.windows(2).all(|w| w[1].1 >= w[0].1 - AXIOM_TOL)
            && profile.last().map(|p| p.1) > profile.first().map(|p| p.1)
        {
            Properness::Diverging
        } else {
            Properness::Inconclusive
        };
        Ok(PropernessProfile { profile, r_max, diagnosis })
    }

    /// Checks the length axioms on `B_r`.
    pub fn audit(&self, r: u32) -> Result<LengthAudit> {
        let ball = self.group.ball(r)?;
        let e = self.group.identity();
        let mut herm = 0.0_f64;
        let mut zero_ok = true;
        let mut anti: Option<f64> = self.grading.as_ref().map(|_| 0.0);
        let mut inv_dev = 0.0_f64;
        for g in &ball.elements {
            let l = self.eval(g)?;
            herm = herm.max(numerics::hermitian_deviation(&l));
            let is_zero = numerics::max_abs(&l) == 0.0;
            if is_zero != (*g == e) {
                zero_ok = false;
            }
            if let (Some(gam), Some(a)) = (&self.grading, anti.as_mut()) {
                *a = a.max(numerics::anticommutator_max(gam, &l));
            }
            let li = self.eval(&self.group.invert(g)?)?;
            let (sa, sb) = (numerics::singular_values(&l), numerics::singular_values(&li));
            for (x, y) in sa.iter().zip(&sb) {
                inv_dev = inv_dev.max((x - y).abs());
            }
        }
        let half = self.group.ball(r / 2)?;
        let mut slope = 0.0_f64;
        let mut monotone = true;
        for g in half.elements.iter().skip(1) {
            let len = self.group.word_length(g)? as f64;
            let mut prev = 0.0_f64;
            for rr in 0..=r {
                let v = self.phi_sup(g, rr)?;
                if v < prev - AXIOM_TOL {
                    monotone = false;
                }
                prev = v;
            }
            slope = slope.max(prev / len);
        }
        let pass = herm <= AXIOM_TOL && zero_ok && anti.map_or(true, |a| a <= AXIOM_TOL) && monotone;
        Ok(LengthAudit {
            radius: r,
            hermitian_deviation: herm,
            vanishes_only_at_identity: zero_ok,
            anticommutator: anti,
            phi_slope: slope,
            phi_monotone: monotone,
            inverse_singular_deviation: inv_dev,
            pass,
        })
    }
}

pub(crate) fn small_norm(m: &CMat) -> f64 {
    numerics::spectral_norm(m, 1e-14, 0).unwrap_or(f64::NAN)
}

/// Parity 0 requires a selfadjoint unitary grading; parity 1 forbids one.
pub(crate) fn check_parity(parity: u8, grading: Option<&CMat>, n: usize) -> Result<()> {
    match (parity, grading) {
        (0, None) => Err(Error::ParityMismatch("parity 0 requires a grading".into())),
        (1, Some(_)) => Err(Error::ParityMismatch("parity 1 forbids a grading".into())),
        (0, Some(g)) => {
            if g.shape() != (n, n) {
                return Err(Error::ParityMismatch(format!("grading must be {n}x{n}")));
            }
            if !numerics::is_hermitian(g, AXIOM_TOL) || numerics::max_abs(&(g * g - numerics::identity(n))) > AXIOM_TOL {
                return Err(Error::ParityMismatch("grading must be a selfadjoint unitary".into()));
            }
            Ok(())
        }
        (1, None) => Ok(()),
        (p, _) => Err(Error::ParityMismatch(format!("parity must be 0 or 1, got {p}"))),
    }
}

fn check_entry(g: &GroupElement, m: &CMat, group: &GroupModel, grading: Option<&CMat>) -> Result<()> {
    if !numerics::is_hermitian(m, AXIOM_TOL) {
        return Err(Error::InvalidLength(format!("entry at {g} is not selfadjoint")));
    }
    let is_zero = numerics::max_abs(m) == 0.0;
    if is_zero != (*g == group.identity()) {
        return Err(Error::InvalidLength(format!("entry at {g} must vanish exactly at the identity")));
    }
    if let Some(gam) = grading {
        if numerics::anticommutator_max(gam, m) > AXIOM_TOL {
            return Err(Error::InvalidLength(format!("entry at {g} does not anticommute with the grading")));
        }
    }
    Ok(())
}
