//! Monge-Kantorovič distances and compact-quantum-metric checks on
//! finite-dimensional systems.
//!
//! A [`FiniteSystem`] is a real span of selfadjoint elements `b_i` with a
//! seminorm of the form `L(θ) = max_k N_k(‖Σ θ_i M_{k,j,i}‖ : j)`, where each
//! group `k` combines its parts `j` with a [`Nvert`] rule. The distance
//! `sup{(φ − ψ)(x) : L(x) ≤ 1, σ(x) = 0}` equals `1 / min{L(θ) : f·θ = 1, σ·θ = 0}`
//! with `f = φ − ψ`, and every iterate of the minimization is feasible.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::base::{FiniteSpectralTriple, OperatorSystemSpec};
use crate::berezin::{self, StateSpec};
use crate::crossed::{CrossedElement, CrossedProduct};
use crate::error::{Error, Result};
use crate::numerics::{self, c64, CMat};
use crate::seminorm::{CrossedGeometry, Nvert};

/// Iterations per restart.
pub const RESTART_LEN: usize = 2000;
pub const KERNEL_TOL: f64 = 1e-8;
const TOP_GAP: f64 = 1e-9;
const STALL: usize = 40;

/// One term of the seminorm: `nvert` over parts `θ ↦ Σ θ_i M_i`.
#[derive(Clone, Debug)]
pub struct PartGroup {
    pub name: String,
    pub nvert: Nvert,
    pub parts: Vec<Vec<CMat>>,
}

#[derive(Clone, Debug)]
pub struct FiniteSystem {
    labels: Vec<String>,
    groups: Vec<PartGroup>,
    sigma: Vec<f64>,
    unit: Option<Vec<f64>>,
    states: Vec<(String, Vec<f64>)>,
    seminorm_radius: Option<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MkCertificate {
    pub lower: f64,
    pub upper: Option<f64>,
    pub radius: u32,
    pub seminorm_radius: Option<u32>,
    pub iterations: usize,
    /// Best value reached by each restart.
    pub trace: Vec<f64>,
    #[serde(skip)]
    pub argmax: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairDistance {
    pub phi: String,
    pub psi: String,
    pub lower: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CqmsReport {
    pub dimension: usize,
    pub kernel_dim: usize,
    pub unit_in_kernel: bool,
    pub totally_bounded: bool,
    pub diameter_bound: Option<f64>,
    pub distances: Vec<PairDistance>,
    pub pass: bool,
    pub reason: Option<String>,
}

impl FiniteSystem {
    /// `sigma`, `unit` and every state are coordinates on the basis.
    pub fn new(
        labels: Vec<String>,
        groups: Vec<PartGroup>,
        sigma: Vec<f64>,
        unit: Option<Vec<f64>>,
        states: Vec<(String, Vec<f64>)>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidOperatorSystem("empty basis".into()));
        }
        for g in &groups {
            g.nvert.validate()?;
            for p in &g.parts {
                if p.len() != n {
                    return Err(Error::Dimension(format!("part of {} has {} maps, expected {n}", g.name, p.len())));
                }
                let shape = p[0].shape();
                if p.iter().any(|m| m.shape() != shape) {
                    return Err(Error::Dimension(format!("part of {} mixes shapes", g.name)));
                }
                for m in p {
                    numerics::ensure_finite(m)?;
                }
            }
        }
        let coords = std::iter::once(&sigma).chain(unit.iter()).chain(states.iter().map(|s| &s.1));
        for c in coords {
            if c.len() != n {
                return Err(Error::Dimension(format!("coordinate vector of length {}, expected {n}", c.len())));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(FiniteSystem { labels, groups, sigma, unit, states, seminorm_radius: None })
    }

    /// The operator system of a finite triple with `L_D(a) = ‖[D, a]‖`,
    /// normalized at the first basis vector of `H`. States are point
    /// evaluations on a metric base and basis vector states otherwise.
    pub fn operator_system(triple: &FiniteSpectralTriple, spec: &OperatorSystemSpec) -> Result<Self> {
        spec.validate(triple, None)?;
        let mut basis: Vec<CMat> = Vec::new();
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for b in &spec.basis {
            let re = (b + b.adjoint()).scale(0.5);
            let im = (b - b.adjoint()) * c64(0.0, 0.5);
            for h in [re, im] {
                let mut trial = cols.clone();
                trial.push(realify(&h));
                if numerics::real_rank(&trial, 1e-10) > cols.len() {
                    cols = trial;
                    basis.push(h);
                }
            }
        }
        let unit = solve_coords(&cols, &realify(&numerics::identity(triple.dim())));
        let vectors: Vec<(String, usize)> = match triple.points() {
            Some(n) => (0..n).map(|x| Ok((format!("point{x}"), triple.evaluation_index(x)?))).collect::<Result<_>>()?,
            None => (0..triple.dim()).map(|j| (format!("e{j}"), j)).collect(),
        };
        let states = vectors
            .iter()
            .map(|(name, j)| (name.clone(), basis.iter().map(|b| b[(*j, *j)].re).collect::<Vec<f64>>()))
            .collect::<Vec<_>>();
        let sigma = states[0].1.clone();
        let parts = vec![basis.iter().map(|b| triple.commutator_d(b)).collect()];
        let labels = (0..basis.len()).map(|i| format!("b{i}")).collect();
        FiniteSystem::new(labels, vec![PartGroup { name: "L_D".into(), nvert: Nvert::Sup, parts }], sigma, unit, states)
    }

    /// Selfadjoint scalar elements of `C·B_r` inside the crossed product, with
    /// `max{L_l, L_H}` where `L_l` is truncated at radius `big_r` and `L_H`
    /// combines the horizontal seminorms of the coefficients with `nvert`.
    /// The normalization is the identity coefficient.
    pub fn scalar_sector(geo: &CrossedGeometry, r: u32, big_r: u32, nvert: Nvert, states: &[(String, StateSpec)]) -> Result<Self> {
        nvert.validate()?;
        if big_r < r {
            return Err(Error::Invalid(format!("seminorm radius {big_r} below support radius {r}")));
        }
        let cp = geo.crossed();
        let scalar = CrossedProduct::group_algebra(cp.group().clone());
        let ball = cp.group().ball(r)?;
        let mut labels = Vec::new();
        let mut elements: Vec<CrossedElement> = Vec::new();
        let one = |c: f64| CMat::from_element(1, 1, c64(c, 0.0));
        let onei = |c: f64| CMat::from_element(1, 1, c64(0.0, c));
        for g in &ball.elements {
            let gi = cp.group().invert(g)?;
            let pos = ball.position(&gi).expect("balls are inverse-closed");
            let here = ball.position(g).expect("element of its own ball");
            if pos < here {
                continue;
            }
            if gi == *g {
                labels.push(format!("{g}"));
                elements.push(scalar.element([(g.clone(), one(1.0))])?);
            } else {
                labels.push(format!("re{g}"));
                elements.push(scalar.element([(g.clone(), one(1.0)), (gi.clone(), one(1.0))])?);
                labels.push(format!("im{g}"));
                elements.push(scalar.element([(g.clone(), onei(1.0)), (gi, onei(-1.0))])?);
            }
        }
        let embedded: Vec<CrossedElement> = elements.iter().map(|e| cp.embed_scalar(e)).collect::<Result<_>>()?;
        // On scalar elements d_l is the C Γ matrix tensored with the identity of H.
        let reduced = berezin::scalar_geometry(geo)?;
        let d_l: Vec<CMat> = elements.par_iter().map(|z| Ok(reduced.d_l(z, big_r)?.matrix)).collect::<Result<_>>()?;
        let triple = cp.triple();
        let horizontal: Vec<Vec<CMat>> = ball
            .elements
            .iter()
            .map(|g| embedded.iter().map(|z| triple.commutator_d(&z.slice(g))).collect())
            .collect();
        let e = cp.group().identity();
        let sigma = embedded.iter().map(|z| z.slice(&e)[(0, 0)].re).collect();
        let mut unit = vec![0.0; embedded.len()];
        unit[0] = 1.0;
        let states = states
            .iter()
            .map(|(name, s)| {
                let vals = embedded.iter().map(|z| Ok(s.eval(cp, z)?.re)).collect::<Result<Vec<f64>>>()?;
                Ok((name.clone(), vals))
            })
            .collect::<Result<Vec<_>>>()?;
        let groups = vec![
            PartGroup { name: "L_l".into(), nvert: Nvert::Sup, parts: vec![d_l] },
            PartGroup { name: "L_H".into(), nvert, parts: horizontal },
        ];
        let mut sys = FiniteSystem::new(labels, groups, sigma, Some(unit), states)?;
        sys.seminorm_radius = Some(big_r);
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Normalization functional in basis coordinates.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn states(&self) -> &[(String, Vec<f64>)] {
        &self.states
    }

    pub fn state(&self, name: &str) -> Result<&[f64]> {
        self.states
            .iter()
            .find(|s| s.0 == name)
            .map(|s| s.1.as_slice())
            .ok_or_else(|| Error::InvalidFunctional(format!("unknown state {name}")))
    }

    fn combination(&self, theta: &[f64], k: usize, j: usize) -> CMat {
        let p = &self.groups[k].parts[j];
        let mut a = CMat::zeros(p[0].nrows(), p[0].ncols());
        for (t, m) in theta.iter().zip(p) {
            if *t != 0.0 {
                a += m * c64(*t, 0.0);
            }
        }
        a
    }

    /// Seminorm value at coordinates `theta`.
    pub fn seminorm(&self, theta: &[f64]) -> f64 {
        self.value_and_subgradient(theta, false).0
    }

    fn value_and_subgradient(&self, theta: &[f64], grad: bool) -> (f64, Vec<f64>) {
        let n = self.dim();
        let mut best = (0.0, vec![0.0; n]);
        let mut have = false;
        for (k, g) in self.groups.iter().enumerate() {
            if g.parts.is_empty() {
                continue;
            }
            let svds: Vec<(f64, Vec<_>)> = (0..g.parts.len())
                .map(|j| {
                    let a = self.combination(theta, k, j);
                    if grad {
                        numerics::top_singular_pairs(&a, TOP_GAP)
                    } else {
                        (numerics::singular_values(&a).first().copied().unwrap_or(0.0), Vec::new())
                    }
                })
                .collect();
            let norms: Vec<f64> = svds.iter().map(|s| s.0).collect();
            let value = g.nvert.apply(&norms);
            if have && value <= best.0 {
                continue;
            }
            have = true;
            let mut sub = vec![0.0; n];
            if grad && value > 0.0 {
                let weights: Vec<f64> = match g.nvert {
                    Nvert::Sup => {
                        let active: Vec<bool> = norms.iter().map(|&v| v >= value * (1.0 - TOP_GAP)).collect();
                        let count = active.iter().filter(|&&a| a).count() as f64;
                        active.iter().map(|&a| if a { 1.0 / count } else { 0.0 }).collect()
                    }
                    Nvert::Lp(p) => norms.iter().map(|&v| (v / value).powf(p - 1.0)).collect(),
                };
                for (j, (w, (_, pairs))) in weights.iter().zip(&svds).enumerate() {
                    if *w == 0.0 || pairs.is_empty() {
                        continue;
                    }
                    let scale = w / pairs.len() as f64;
                    for (i, m) in g.parts[j].iter().enumerate() {
                        let s: f64 = pairs.iter().map(|(u, v)| u.dotc(&(m * v)).re).sum();
                        sub[i] += scale * s;
                    }
                }
            }
            best = (value, sub);
        }
        best
    }

    fn kernel_columns(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| {
                let mut col = Vec::new();
                for g in &self.groups {
                    for p in &g.parts {
                        col.extend(realify(&p[i]));
                    }
                }
                col
            })
            .collect()
    }

    /// `dim {θ : L(θ) = 0}`.
    pub fn kernel_dim(&self) -> usize {
        let cols = self.kernel_columns();
        if cols[0].is_empty() {
            return self.dim();
        }
        self.dim() - numerics::real_rank(&cols, KERNEL_TOL)
    }

    /// Whether `L` vanishes on a nonzero direction with `σ = 0`.
    fn degenerate_on_slice(&self) -> bool {
        let mut cols = self.kernel_columns();
        let scale = cols.iter().flatten().fold(0.0_f64, |a, b| a.max(b.abs())).max(1.0);
        for (c, s) in cols.iter_mut().zip(&self.sigma) {
            c.push(s * scale);
        }
        numerics::real_rank(&cols, KERNEL_TOL) < self.dim()
    }

    /// Lower bound for `sup{(φ − ψ)(x) : L(x) ≤ 1, σ(x) = 0}`, with `budget`
    /// subgradient iterations split into restarts of [`RESTART_LEN`].
    pub fn mk_lower(&self, phi: &[f64], psi: &[f64], budget: usize, seed: u64, warm: Option<&[f64]>) -> Result<MkCertificate> {
        let n = self.dim();
        if phi.len() != n || psi.len() != n {
            return Err(Error::Dimension("state coordinates do not match the basis".into()));
        }
        let f: Vec<f64> = phi.iter().zip(psi).map(|(a, b)| a - b).collect();
        let empty = |lower| MkCertificate {
            lower,
            upper: None,
            radius: 0,
            seminorm_radius: self.seminorm_radius,
            iterations: 0,
            trace: Vec::new(),
            argmax: vec![0.0; n],
        };
        let Some(slice) = AffineSlice::new(&f, &self.sigma) else {
            return Ok(empty(0.0));
        };
        if self.degenerate_on_slice() {
            return Err(Error::DegenerateSeminorm);
        }
        let restarts = budget.div_ceil(RESTART_LEN).max(1);
        let warm_y = warm.map(|w| slice.coords(w));
        let results: Vec<(f64, Vec<f64>)> = (0..restarts)
            .into_par_iter()
            .map(|k| {
                let iters = RESTART_LEN.min(budget.saturating_sub(k * RESTART_LEN));
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
                let start = match (&warm_y, k) {
                    (Some(y), 0) => y.clone(),
                    (_, 0) => DVector::zeros(slice.basis.ncols()),
                    _ => DVector::from_fn(slice.basis.ncols(), |_, _| rng.gen_range(-1.0..1.0) * slice.scale),
                };
                self.descend(&slice, start, iters)
            })
            .collect();
        let trace: Vec<f64> = results.iter().map(|r| inverse(r.0)).collect();
        let (l_best, theta) = results
            .into_iter()
            .fold((f64::INFINITY, Vec::new()), |acc, r| if r.0 < acc.0 { r } else { acc });
        let scale = if l_best > 0.0 { 1.0 / l_best } else { 0.0 };
        Ok(MkCertificate {
            lower: inverse(l_best),
            upper: None,
            radius: 0,
            seminorm_radius: self.seminorm_radius,
            iterations: budget,
            trace,
            argmax: theta.iter().map(|t| t * scale).collect(),
        })
    }

    /// Normalized subgradient descent on `y ↦ L(θ₀ + N y)`, restarting from the
    /// best point with half the step after [`STALL`] iterations without progress.
    fn descend(&self, slice: &AffineSlice, start: DVector<f64>, iters: usize) -> (f64, Vec<f64>) {
        let mut y = start;
        let mut theta = slice.theta(&y);
        let mut best = (self.seminorm(theta.as_slice()), theta.as_slice().to_vec(), y.clone());
        if slice.basis.ncols() == 0 {
            return (best.0, best.1);
        }
        let mut step = slice.scale;
        let mut stall = 0;
        for _ in 0..iters {
            let (value, g) = self.value_and_subgradient(theta.as_slice(), true);
            if value < best.0 {
                best = (value, theta.as_slice().to_vec(), y.clone());
                stall = 0;
            } else {
                stall += 1;
                if stall >= STALL {
                    step *= 0.5;
                    stall = 0;
                    y = best.2.clone();
                    theta = slice.theta(&y);
                    continue;
                }
            }
            let gy = slice.basis.transpose() * DVector::from_vec(g);
            let norm = gy.norm();
            if norm == 0.0 || step < 1e-15 * slice.scale {
                break;
            }
            y -= gy * (step / norm);
            theta = slice.theta(&y);
        }
        (best.0, best.1)
    }

    /// Kernel dimension, unit check and a lower bound on the quotient-norm
    /// constant from every pair of registered states.
    pub fn cqms_finite_check(&self, budget: usize, seed: u64) -> Result<CqmsReport> {
        let kernel_dim = self.kernel_dim();
        let unit_in_kernel = self.unit.as_ref().is_some_and(|u| self.seminorm(u) <= KERNEL_TOL * self.scale());
        let mut report = CqmsReport {
            dimension: self.dim(),
            kernel_dim,
            unit_in_kernel,
            totally_bounded: true,
            diameter_bound: None,
            distances: Vec::new(),
            pass: false,
            reason: None,
        };
        if kernel_dim != 1 || !unit_in_kernel {
            report.reason = Some(if kernel_dim != 1 {
                format!("kernel of L has dimension {kernel_dim}, expected 1")
            } else {
                "the unit is not in the kernel of L".into()
            });
            return Ok(report);
        }
        let mut diam: f64 = 0.0;
        for a in 0..self.states.len() {
            for b in a + 1..self.states.len() {
                let cert = self.mk_lower(&self.states[a].1, &self.states[b].1, budget, seed, None)?;
                diam = diam.max(cert.lower / 2.0);
                report.distances.push(PairDistance { phi: self.states[a].0.clone(), psi: self.states[b].0.clone(), lower: cert.lower });
            }
        }
        report.diameter_bound = Some(diam);
        report.pass = true;
        Ok(report)
    }

    fn scale(&self) -> f64 {
        self.groups
            .iter()
            .flat_map(|g| g.parts.iter().flatten())
            .map(numerics::max_abs)
            .fold(1.0, f64::max)
    }
}

fn inverse(l: f64) -> f64 {
    if l > 0.0 && l.is_finite() {
        1.0 / l
    } else {
        0.0
    }
}

fn realify(m: &CMat) -> Vec<f64> {
    m.iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Least-squares coordinates of `target` in the column span, if it lies there.
fn solve_coords(cols: &[Vec<f64>], target: &[f64]) -> Option<Vec<f64>> {
    let a = DMatrix::from_fn(target.len(), cols.len(), |i, j| cols[j][i]);
    let b = DVector::from_column_slice(target);
    let x = a.clone().svd(true, true).solve(&b, 1e-12).ok()?;
    ((&a * &x - &b).norm() <= 1e-9 * b.norm().max(1.0)).then(|| x.iter().copied().collect())
}

/// `{θ : f·θ = 1, σ·θ = 0} = θ₀ + range(N)` with orthonormal `N`.
struct AffineSlice {
    theta0: DVector<f64>,
    basis: DMatrix<f64>,
    scale: f64,
}

impl AffineSlice {
    fn new(f: &[f64], sigma: &[f64]) -> Option<Self> {
        let n = f.len();
        let c = DMatrix::from_fn(2, n, |i, j| if i == 0 { f[j] } else { sigma[j] });
        let svd = c.clone().svd(true, true);
        let top = svd.singular_values.max();
        if top == 0.0 || svd.singular_values.min() <= 1e-12 * top {
            return None;
        }
        let theta0 = svd.solve(&DVector::from_vec(vec![1.0, 0.0]), 0.0).ok()?;
        let full = DMatrix::from_fn(n, n, |i, j| if j < 2 { c[(j, i)] } else if i == j - 2 { 1.0 } else { 0.0 });
        let q = full.qr().q();
        let basis = if n > 2 { q.columns(2, n - 2).into_owned() } else { DMatrix::zeros(n, 0) };
        let scale = theta0.norm().max(1e-12);
        Some(AffineSlice { theta0, basis, scale })
    }

    fn theta(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.theta0 + &self.basis * y
    }

    fn coords(&self, theta: &[f64]) -> DVector<f64> {
        self.basis.transpose() * (DVector::from_column_slice(theta) - &self.theta0)
    }
}

/// `mk_lower(φ, ψ)` on the scalar sector of radius `r`, with the surrogate
/// upper bound attached when `(φ, ψ)` is `(χ_F or τ, ε)`.
pub fn mk_lower_scalar(
    geo: &CrossedGeometry,
    phi: &StateSpec,
    psi: &StateSpec,
    r: u32,
    big_r: u32,
    budget: usize,
    seed: u64,
) -> Result<MkCertificate> {
    Ok(mk_lower_schedule(geo, phi, psi, &[r], big_r, budget, seed)?.pop().expect("one radius"))
}

/// [`mk_lower_scalar`] over increasing radii; each radius is warm-started at
/// the previous optimum so the lower bounds are nondecreasing in `r`.
pub fn mk_lower_schedule(
    geo: &CrossedGeometry,
    phi: &StateSpec,
    psi: &StateSpec,
    radii: &[u32],
    big_r: u32,
    budget: usize,
    seed: u64,
) -> Result<Vec<MkCertificate>> {
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSchedule);
    }
    let states = vec![("phi".to_string(), phi.clone()), ("psi".to_string(), psi.clone())];
    let mut out: Vec<MkCertificate> = Vec::new();
    let mut prev: Option<(Vec<String>, Vec<f64>)> = None;
    for &r in radii {
        let sys = FiniteSystem::scalar_sector(geo, r, big_r, Nvert::Sup, &states)?;
        let warm = prev.as_ref().map(|(labels, theta)| {
            sys.labels()
                .iter()
                .map(|l| labels.iter().position(|p| p == l).map_or(0.0, |i| theta[i]))
                .collect::<Vec<f64>>()
        });
        let mut cert = sys.mk_lower(sys.state("phi")?, sys.state("psi")?, budget, seed, warm.as_deref())?;
        cert.radius = r;
        cert.upper = surrogate_upper(geo, phi, psi, r)?;
        prev = Some((sys.labels().to_vec(), cert.argmax.clone()));
        out.push(cert);
    }
    Ok(out)
}

fn surrogate_upper(geo: &CrossedGeometry, phi: &StateSpec, psi: &StateSpec, r: u32) -> Result<Option<f64>> {
    let f = match (phi, psi) {
        (StateSpec::Folner(f), StateSpec::Counit) | (StateSpec::Counit, StateSpec::Folner(f)) => Some(f.as_ref()),
        (StateSpec::Trace, StateSpec::Counit) | (StateSpec::Counit, StateSpec::Trace) => None,
        _ => return Ok(None),
    };
    berezin::mk_upper(geo.length(), f, r).map(Some)
}

/// `ℂS` for `S = F·F⁻¹` with `max{L_l, L_H}` and the states `ε`, `τ`, `χ_F`.
pub fn folner_span_system(geo: &CrossedGeometry, f_radius: u32, big_r: u32, nvert: Nvert) -> Result<FiniteSystem> {
    let f = geo.crossed().group().ball(f_radius)?;
    let states = vec![
        ("counit".to_string(), StateSpec::Counit),
        ("trace".to_string(), StateSpec::Trace),
        (format!("folner{f_radius}"), StateSpec::Folner(f)),
    ];
    FiniteSystem::scalar_sector(geo, 2 * f_radius, big_r.max(2 * f_radius), nvert, &states)
}

/// Coordinates of a selfadjoint scalar element on the scalar-sector basis.
pub fn scalar_coordinates(sys: &FiniteSystem, z: &CrossedElement) -> Vec<f64> {
    sys.labels()
        .iter()
        .map(|l| {
            let (kind, g) = split_label(l);
            let c = z.terms().find(|(h, _)| h.to_string() == g).map(|(_, x)| x[(0, 0)]).unwrap_or(c64(0.0, 0.0));
            match kind {
                "im" => c.im,
                _ => c.re,
            }
        })
        .collect()
}

fn split_label(l: &str) -> (&str, &str) {
    for p in ["re", "im"] {
        if let Some(rest) = l.strip_prefix(p) {
            return (p, rest);
        }
    }
    ("", l)
}
