//! Dirac operators from length functions, the derivations they induce on the
//! crossed product and the seminorms built from them.
//!
//! Truncated operators live on `ℓ²(B_R) ⊗ C^n ⊗ H` with index
//! `(site · n + i) · m + h`. Doubled spaces put the doubling index outermost.
//! Commutators are assembled from closed forms, never by multiplying a
//! truncated Dirac operator against a truncated element.

use serde::{Deserialize, Serialize};

use crate::base::Equicontinuity;
use crate::crossed::{norm_schedule, CrossedElement, CrossedProduct, SeminormReport, TruncatedOperator};
use crate::error::{Error, Result};
use crate::group::Ball;
use crate::length::MatrixLengthFunction;
use crate::numerics::{self, c64, kron, CMat};

/// Order-preserving norm applied to `g ↦ L_D(x_g)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nvert {
    Sup,
    Lp(f64),
}

impl Nvert {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Nvert::Sup => Ok(()),
            Nvert::Lp(p) if p.is_finite() && p >= 1.0 => Ok(()),
            Nvert::Lp(p) => Err(Error::Invalid(format!("lp exponent must lie in [1, ∞), got {p}"))),
        }
    }

    pub fn apply(&self, values: &[f64]) -> f64 {
        match *self {
            Nvert::Sup => values.iter().fold(0.0, |a, &b| a.max(b)),
            Nvert::Lp(p) => values.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p),
        }
    }
}

/// `D_l` on `ℓ²(B_R) ⊗ C^n`: block `l(s)` at site `s`.
#[derive(Clone, Debug)]
pub struct DiracTruncation {
    pub radius: u32,
    pub matrix: CMat,
}

/// A parity-dependent tensor-sum operator on `ℓ²(B_R) ⊗ C^n ⊗ H` (doubled for
/// parities `(1, 1)`).
#[derive(Clone, Debug)]
pub struct TensorSumOperator {
    pub parities: (u8, u8),
    pub radius: u32,
    pub matrix: CMat,
    pub grading: Option<CMat>,
    pub doubled: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TensorSumAudit {
    pub parities: (u8, u8),
    pub radius: u32,
    pub hermitian_deviation: f64,
    pub grading_anticommutator: Option<f64>,
    pub grading_commutator: Option<f64>,
    pub t_s_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichRow {
    pub radius: u32,
    pub d_v: f64,
    pub d_h: f64,
    pub tensor: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TensorReport {
    pub report: SeminormReport,
    pub equicontinuity: Equicontinuity,
    /// Set when the equicontinuity profile is still growing at the largest radius.
    pub equicontinuity_warning: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolventRow {
    pub radius: u32,
    pub dimension: usize,
    /// Number of singular values of `(D_l + i)⁻¹` at least `threshold`.
    pub above_threshold: usize,
    pub smallest: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolventProfile {
    pub threshold: f64,
    pub rows: Vec<ResolventRow>,
    /// The count above threshold stopped growing over the last two radii.
    pub stabilized: bool,
}

/// A crossed product together with a length function on its group.
#[derive(Clone, Debug)]
pub struct CrossedGeometry {
    cp: CrossedProduct,
    length: MatrixLengthFunction,
}

impl CrossedGeometry {
    pub fn new(cp: CrossedProduct, length: MatrixLengthFunction) -> Result<Self> {
        if length.group() != cp.group() {
            return Err(Error::InvalidLength("length function lives on a different group".into()));
        }
        Ok(CrossedGeometry { cp, length })
    }

    pub fn crossed(&self) -> &CrossedProduct {
        &self.cp
    }

    pub fn length(&self) -> &MatrixLengthFunction {
        &self.length
    }

    fn n(&self) -> usize {
        self.length.n()
    }

    fn m(&self) -> usize {
        self.cp.dim()
    }

    pub fn dirac_truncation(&self, r: u32) -> Result<DiracTruncation> {
        let ball = self.cp.group().ball(r)?;
        let blocks = ball.elements.iter().map(|s| self.length.eval(s)).collect::<Result<Vec<_>>>()?;
        Ok(DiracTruncation { radius: r, matrix: numerics::block_diag(&blocks) })
    }

    /// `z` acting on `ℓ²(B_R) ⊗ C^n ⊗ H`.
    pub fn represent(&self, z: &CrossedElement, ball: &Ball) -> Result<CMat> {
        let id = numerics::identity(self.n());
        self.cp.assemble(z, ball, self.n() * self.m(), |_, _, ax| Ok(kron(&id, ax)))
    }

    /// `d_l(z) = Σ_g M_{φ_g} π(x_g) λ_g`.
    pub fn d_l(&self, z: &CrossedElement, r: u32) -> Result<TruncatedOperator> {
        let ball = self.cp.group().ball(r)?;
        let matrix = self.d_l_on(z, &ball)?;
        Ok(TruncatedOperator { ball, matrix, provenance: "d_l: M_phi_g pi(x) lambda_g" })
    }

    fn d_l_on(&self, z: &CrossedElement, ball: &Ball) -> Result<CMat> {
        self.cp.assemble(z, ball, self.n() * self.m(), |g, t, ax| Ok(kron(&self.length.phi(g, t)?, ax)))
    }

    /// `d_V = d_l ⊗ 1`, which on this space is the same matrix as `d_l`.
    pub fn d_v(&self, z: &CrossedElement, r: u32) -> Result<TruncatedOperator> {
        let mut t = self.d_l(z, r)?;
        t.provenance = "d_V: M_phi_g pi(x) lambda_g on l2 x C^n x H";
        Ok(t)
    }

    /// `d_H(π(x) λ_g)`: block `(t, s)` with `t = g s` is `1 ⊗ d(α_{t⁻¹}(x))`.
    pub fn d_h(&self, z: &CrossedElement, r: u32) -> Result<TruncatedOperator> {
        let ball = self.cp.group().ball(r)?;
        let matrix = self.d_h_on(z, &ball)?;
        Ok(TruncatedOperator { ball, matrix, provenance: "d_H: (1 x d(pi(x))) lambda_g" })
    }

    fn d_h_on(&self, z: &CrossedElement, ball: &Ball) -> Result<CMat> {
        let id = numerics::identity(self.n());
        let triple = self.cp.triple();
        self.cp.assemble(z, ball, self.n() * self.m(), |_, _, ax| Ok(kron(&id, &triple.commutator_d(ax))))
    }

    /// `L_l(z) = ‖d_l(z)‖`.
    pub fn l_l(&self, z: &CrossedElement, schedule: &[u32], tol: f64) -> Result<SeminormReport> {
        norm_schedule(&self.cp, schedule, tol, |r| Ok(self.d_l(z, r)?.matrix))
    }

    pub fn d_h_norm(&self, z: &CrossedElement, schedule: &[u32], tol: f64) -> Result<SeminormReport> {
        norm_schedule(&self.cp, schedule, tol, |r| Ok(self.d_h(z, r)?.matrix))
    }

    /// `|||g ↦ L_D(x_g)|||`.
    pub fn l_h_norm(&self, z: &CrossedElement, nvert: Nvert) -> Result<f64> {
        nvert.validate()?;
        let triple = self.cp.triple();
        let values: Vec<f64> = z.terms().map(|(_, x)| triple.l_d(x)).collect();
        Ok(nvert.apply(&values))
    }

    /// `max{L_l(z), L_H(z), L_H(z*)}` per radius; convergence is that of `L_l`.
    pub fn combined_l(&self, z: &CrossedElement, nvert: Nvert, schedule: &[u32], tol: f64) -> Result<SeminormReport> {
        let ll = self.l_l(z, schedule, tol)?;
        let h = self.l_h_norm(z, nvert)?;
        let hs = self.l_h_norm(&self.cp.adjoint(z)?, nvert)?;
        let trace: Vec<(u32, f64)> = ll.trace.iter().map(|&(r, v)| (r, v.max(h).max(hs))).collect();
        let value = trace.last().map_or(0.0, |t| t.1);
        Ok(SeminormReport { value, converged: ll.converged, trace, tol })
    }

    /// `L_∞ = max{L_l, L_H^∞, L_H^∞(·*)}`.
    pub fn l_inf(&self, z: &CrossedElement, schedule: &[u32], tol: f64) -> Result<SeminormReport> {
        self.combined_l(z, Nvert::Sup, schedule, tol)
    }

    fn check_parities(&self, parities: (u8, u8)) -> Result<()> {
        let actual = (self.length.parity(), self.cp.triple().parity());
        if parities != actual {
            return Err(Error::ParityMismatch(format!(
                "requested parities {parities:?} but length has parity {} and base triple has parity {}",
                actual.0, actual.1
            )));
        }
        Ok(())
    }

    /// Per-site `⊕_s A(s) ⊗ B` helper.
    fn site_sum(&self, ball: &Ball, f: impl Fn(&CMat) -> CMat) -> Result<CMat> {
        let blocks = ball.elements.iter().map(|s| Ok(f(&self.length.eval(s)?))).collect::<Result<Vec<_>>>()?;
        Ok(numerics::block_diag(&blocks))
    }

    fn repeat(&self, ball: &Ball, block: &CMat) -> CMat {
        numerics::block_diag(&vec![block.clone(); ball.len()])
    }

    /// The tensor-sum Dirac operator for the given parities.
    pub fn tensor_sum(&self, parities: (u8, u8), r: u32) -> Result<TensorSumOperator> {
        self.check_parities(parities)?;
        let ball = self.cp.group().ball(r)?;
        let (n, m) = (self.n(), self.m());
        let idn = numerics::identity(n);
        let idm = numerics::identity(m);
        let d = self.cp.triple().dirac().clone();
        let i = c64(0.0, 1.0);
        let (matrix, grading, doubled) = match parities {
            (1, 1) => {
                let x = self.site_sum(&ball, |l| kron(l, &idm))?;
                let y = self.repeat(&ball, &kron(&idn, &d));
                let top = &x + &y * i;
                let bottom = &x - &y * i;
                let dim = x.nrows();
                let zero = CMat::zeros(dim, dim);
                let op = block2(&zero, &top, &bottom, &zero);
                let id = numerics::identity(dim);
                let g = block2(&id, &zero, &zero, &(-&id));
                (op, Some(g), true)
            }
            (0, q) => {
                let gl = self.length.grading().expect("parity 0 length carries a grading").clone();
                let x = self.site_sum(&ball, |l| kron(l, &idm))?;
                let y = self.repeat(&ball, &kron(&gl, &d));
                let grading = if q == 0 {
                    let gb = self.cp.triple().grading().expect("parity 0 triple carries a grading");
                    Some(self.repeat(&ball, &kron(&gl, gb)))
                } else {
                    None
                };
                (x + y, grading, false)
            }
            (1, 0) => {
                let gb = self.cp.triple().grading().expect("parity 0 triple carries a grading").clone();
                let x = self.site_sum(&ball, |l| kron(l, &gb))?;
                let y = self.repeat(&ball, &kron(&idn, &d));
                (x + y, None, false)
            }
            _ => unreachable!("parities validated"),
        };
        Ok(TensorSumOperator { parities, radius: r, matrix, grading, doubled })
    }

    /// Closed-form commutator `[D_l ×_∇ D, z]` on the ball.
    pub fn tensor_commutator(&self, z: &CrossedElement, parities: (u8, u8), r: u32) -> Result<CMat> {
        self.check_parities(parities)?;
        let ball = self.cp.group().ball(r)?;
        let dv = self.d_l_on(z, &ball)?;
        let dh = self.d_h_on(z, &ball)?;
        let i = c64(0.0, 1.0);
        Ok(match parities {
            (1, 1) => {
                let zero = CMat::zeros(dv.nrows(), dv.ncols());
                block2(&zero, &(&dv + &dh * i), &(&dv - &dh * i), &zero)
            }
            (0, _) => {
                let gl = self.length.grading().expect("graded length").clone();
                let g = self.repeat(&ball, &kron(&gl, &numerics::identity(self.m())));
                dv + g * dh
            }
            (1, 0) => {
                let gb = self.cp.triple().grading().expect("graded triple").clone();
                let g = self.repeat(&ball, &kron(&numerics::identity(self.n()), &gb));
                dv * g + dh
            }
            _ => unreachable!("parities validated"),
        })
    }

    /// `z` acting on the tensor-sum space.
    pub fn represent_tensor(&self, z: &CrossedElement, parities: (u8, u8), r: u32) -> Result<CMat> {
        self.check_parities(parities)?;
        let ball = self.cp.group().ball(r)?;
        let p = self.represent(z, &ball)?;
        if parities == (1, 1) {
            let zero = CMat::zeros(p.nrows(), p.ncols());
            Ok(block2(&p, &zero, &zero, &p))
        } else {
            Ok(p)
        }
    }

    /// `‖[D_l ×_∇ D, z]‖` per radius.
    pub fn l_tensor(&self, z: &CrossedElement, parities: (u8, u8), schedule: &[u32], tol: f64) -> Result<TensorReport> {
        self.check_parities(parities)?;
        let report = norm_schedule(&self.cp, schedule, tol, |r| self.tensor_commutator(z, parities, r))?;
        let action = self.cp.action();
        let triple = self.cp.triple();
        let equicontinuity = action.justification(triple);
        let mut warning = false;
        if equicontinuity == Equicontinuity::ProfileOnly {
            let r_max = *schedule.last().expect("validated schedule");
            for (_, x) in z.terms() {
                let prof = action.equicontinuity_profile(triple, x, r_max)?;
                let n = prof.profile.len();
                if n >= 2 && prof.profile[n - 1].1 > prof.profile[n - 2].1 * (1.0 + 1e-12) + 1e-12 {
                    warning = true;
                }
            }
        }
        Ok(TensorReport { report, equicontinuity, equicontinuity_warning: warning })
    }

    /// `(‖d_V‖_R, ‖d_H‖_R, ‖[D, z]‖_R)` per radius.
    pub fn sandwich(&self, z: &CrossedElement, parities: (u8, u8), schedule: &[u32], tol: f64) -> Result<Vec<SandwichRow>> {
        let dv = self.l_l(z, schedule, tol)?;
        let dh = self.d_h_norm(z, schedule, tol)?;
        let t = self.l_tensor(z, parities, schedule, tol)?.report;
        Ok(schedule
            .iter()
            .enumerate()
            .map(|(k, &r)| SandwichRow { radius: r, d_v: dv.trace[k].1, d_h: dh.trace[k].1, tensor: t.trace[k].1 })
            .collect())
    }

    /// Structural audit of the tensor sum at radius `r` against sample elements.
    pub fn audit_tensor_sum(&self, parities: (u8, u8), r: u32, samples: &[CrossedElement]) -> Result<TensorSumAudit> {
        let op = self.tensor_sum(parities, r)?;
        let herm = numerics::hermitian_deviation(&op.matrix);
        let (anti, comm) = match &op.grading {
            Some(g) => {
                let anti = numerics::anticommutator_max(g, &op.matrix);
                let mut comm = numerics::commutator_max(g, &numerics::identity(g.nrows()));
                for z in samples {
                    comm = comm.max(numerics::commutator_max(g, &self.represent_tensor(z, parities, r)?));
                }
                (Some(anti), Some(comm))
            }
            None => (None, None),
        };
        Ok(TensorSumAudit {
            parities,
            radius: r,
            hermitian_deviation: herm,
            grading_anticommutator: anti,
            grading_commutator: comm,
            t_s_deviation: self.t_s_deviation(r)?,
        })
    }

    /// `max_s` selfadjointness defect of `T_s = [[0, l(s) + iD], [l(s) − iD, 0]]`.
    pub fn t_s_deviation(&self, r: u32) -> Result<f64> {
        let ball = self.cp.group().ball(r)?;
        let idm = numerics::identity(self.m());
        let idn = numerics::identity(self.n());
        let dd = kron(&idn, self.cp.triple().dirac());
        let i = c64(0.0, 1.0);
        let mut worst = 0.0_f64;
        for s in &ball.elements {
            let l = kron(&self.length.eval(s)?, &idm);
            let zero = CMat::zeros(l.nrows(), l.ncols());
            let t = block2(&zero, &(&l + &dd * i), &(&l - &dd * i), &zero);
            worst = worst.max(numerics::hermitian_deviation(&t));
        }
        Ok(worst)
    }

    /// Singular values of the truncated resolvent `(D_l + i)⁻¹`.
    pub fn resolvent_profile(&self, radii: &[u32], threshold: f64) -> Result<ResolventProfile> {
        let mut rows = Vec::with_capacity(radii.len());
        for &r in radii {
            let d = self.dirac_truncation(r)?;
            let eigs = numerics::hermitian_eigs(&d.matrix, 1e-12)?;
            let svs: Vec<f64> = eigs.iter().map(|l| 1.0 / (1.0 + l * l).sqrt()).collect();
            rows.push(ResolventRow {
                radius: r,
                dimension: svs.len(),
                above_threshold: svs.iter().filter(|&&s| s >= threshold).count(),
                smallest: svs.iter().copied().fold(f64::INFINITY, f64::min),
            });
        }
        let k = rows.len();
        let stabilized = k >= 2 && rows[k - 1].above_threshold == rows[k - 2].above_threshold;
        Ok(ResolventProfile { threshold, rows, stabilized })
    }
}

fn block2(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    let (r, k) = a.shape();
    let mut out = CMat::zeros(2 * r, 2 * k);
    out.view_mut((0, 0), (r, k)).copy_from(a);
    out.view_mut((0, k), (r, k)).copy_from(b);
    out.view_mut((r, 0), (r, k)).copy_from(c);
    out.view_mut((r, k), (r, k)).copy_from(d);
    out
}
