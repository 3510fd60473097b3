//! Finite-dimensional base spectral triples, group actions on them and
//! operator subsystems.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupModel};
use crate::length::{check_parity, small_norm};
use crate::numerics::{self, c64, CMat, CVec};

const TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum BaseKind {
    /// Functions on a finite metric space acting on `⊕_{x<y} C^2`.
    FiniteMetric { distance: Vec<Vec<f64>> },
    /// The full matrix algebra `M_k` acting on `C^k`.
    MatrixInner { k: usize },
    Custom,
}

/// A unital spectral triple `(A, H, D)` with `dim H = m`.
#[derive(Clone, Debug)]
pub struct FiniteSpectralTriple {
    m: usize,
    algebra: Vec<CMat>,
    dirac: CMat,
    parity: u8,
    grading: Option<CMat>,
    kind: BaseKind,
}

impl FiniteSpectralTriple {
    /// Validates and assembles a triple from an algebra basis.
    pub fn new(algebra: Vec<CMat>, dirac: CMat, parity: u8, grading: Option<CMat>) -> Result<Self> {
        let t = FiniteSpectralTriple { m: dirac.nrows(), algebra, dirac, parity, grading, kind: BaseKind::Custom };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        let m = self.m;
        if m == 0 || !self.dirac.is_square() {
            return Err(Error::InvalidTriple("Dirac operator must be a nonempty square matrix".into()));
        }
        numerics::ensure_finite(&self.dirac)?;
        if !numerics::is_hermitian(&self.dirac, TOL) {
            return Err(Error::InvalidTriple("Dirac operator is not selfadjoint".into()));
        }
        if self.algebra.iter().any(|a| a.shape() != (m, m)) {
            return Err(Error::InvalidTriple(format!("algebra elements must be {m}x{m}")));
        }
        check_parity(self.parity, self.grading.as_ref(), m)?;
        if !numerics::in_span(&self.algebra, &numerics::identity(m), 1e-10) {
            return Err(Error::InvalidTriple("algebra does not contain the identity".into()));
        }
        for a in &self.algebra {
            if !numerics::in_span(&self.algebra, &a.adjoint(), 1e-10) {
                return Err(Error::InvalidTriple("algebra is not closed under adjoints".into()));
            }
        }
        let rank = numerics::span_rank(&self.algebra, 1e-10);
        for a in &self.algebra {
            for b in &self.algebra {
                let mut ext = self.algebra.clone();
                ext.push(a * b);
                if numerics::span_rank(&ext, 1e-10) != rank {
                    return Err(Error::InvalidTriple("algebra is not closed under products".into()));
                }
            }
        }
        if let Some(g) = &self.grading {
            if numerics::anticommutator_max(g, &self.dirac) > TOL {
                return Err(Error::InvalidTriple("grading does not anticommute with D".into()));
            }
            if self.algebra.iter().any(|a| numerics::commutator_max(g, a) > TOL) {
                return Err(Error::InvalidTriple("grading does not commute with the algebra".into()));
            }
        }
        Ok(())
    }

    /// Functions on a finite metric space: `H = ⊕_{x<y} C^2`, `D` has blocks
    /// `ρ(x,y)⁻¹ σ_x` and `f` acts on the `(x,y)` block as `diag(f(x), f(y))`.
    /// A single point gives `H = C`, `D = 0`.
    pub fn lip_triple(distance: Vec<Vec<f64>>) -> Result<Self> {
        check_metric(&distance)?;
        let n = distance.len();
        let pairs = pair_list(n);
        let m = if n == 1 { 1 } else { 2 * pairs.len() };
        let mut dirac = CMat::zeros(m, m);
        for (p, &(x, y)) in pairs.iter().enumerate() {
            let w = c64(1.0 / distance[x][y], 0.0);
            dirac[(2 * p, 2 * p + 1)] = w;
            dirac[(2 * p + 1, 2 * p)] = w;
        }
        let t0 = FiniteSpectralTriple { m, algebra: Vec::new(), dirac, parity: 1, grading: None, kind: BaseKind::FiniteMetric { distance } };
        let algebra = (0..n)
            .map(|x| {
                let mut f = vec![c64(0.0, 0.0); n];
                f[x] = c64(1.0, 0.0);
                t0.function(&f)
            })
            .collect();
        let t = FiniteSpectralTriple { algebra, ..t0 };
        t.validate()?;
        Ok(t)
    }

    /// Even version of [`lip_triple`](Self::lip_triple), graded by `diag(1, −1)`
    /// on each pair block.
    pub fn lip_triple_graded(distance: Vec<Vec<f64>>) -> Result<Self> {
        let mut t = Self::lip_triple(distance)?;
        let diag: Vec<_> = (0..t.m).map(|i| c64(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        t.grading = Some(CMat::from_diagonal(&CVec::from_vec(diag)));
        t.parity = 0;
        t.validate()?;
        Ok(t)
    }

    /// `M_k` on `C^k` with the given Dirac operator, `diag(0, …, k−1)` by default.
    pub fn matrix_inner(k: usize, dirac: Option<CMat>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidTriple("matrix size must be positive".into()));
        }
        let dirac = dirac.unwrap_or_else(|| CMat::from_diagonal(&CVec::from_fn(k, |i, _| c64(i as f64, 0.0))));
        if dirac.shape() != (k, k) {
            return Err(Error::InvalidTriple(format!("Dirac operator must be {k}x{k}")));
        }
        let mut algebra = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                let mut e = CMat::zeros(k, k);
                e[(i, j)] = c64(1.0, 0.0);
                algebra.push(e);
            }
        }
        let t = FiniteSpectralTriple { m: k, algebra, dirac, parity: 1, grading: None, kind: BaseKind::MatrixInner { k } };
        t.validate()?;
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn algebra(&self) -> &[CMat] {
        &self.algebra
    }

    pub fn dirac(&self) -> &CMat {
        &self.dirac
    }

    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn grading(&self) -> Option<&CMat> {
        self.grading.as_ref()
    }

    pub fn kind(&self) -> &BaseKind {
        &self.kind
    }

    pub fn points(&self) -> Option<usize> {
        match &self.kind {
            BaseKind::FiniteMetric { distance } => Some(distance.len()),
            _ => None,
        }
    }

    /// Representation of a function on the metric space.
    pub fn function(&self, f: &[num_complex::Complex64]) -> CMat {
        let n = f.len();
        if n == 1 {
            return CMat::from_element(1, 1, f[0]);
        }
        let pairs = pair_list(n);
        let mut diag = Vec::with_capacity(2 * pairs.len());
        for (x, y) in pairs {
            diag.push(f[x]);
            diag.push(f[y]);
        }
        CMat::from_diagonal(&CVec::from_vec(diag))
    }

    /// Index of a basis vector of `H` on which functions act by evaluation at `x`.
    pub fn evaluation_index(&self, x: usize) -> Result<usize> {
        let n = self.points().ok_or_else(|| Error::InvalidTriple("point evaluation needs a finite metric base".into()))?;
        if x >= n {
            return Err(Error::Invalid(format!("point {x} out of range")));
        }
        if n == 1 {
            return Ok(0);
        }
        let pairs = pair_list(n);
        let (p, slot) = pairs
            .iter()
            .enumerate()
            .find_map(|(p, &(a, b))| if a == x { Some((p, 0)) } else if b == x { Some((p, 1)) } else { None })
            .expect("every point lies in a pair");
        Ok(2 * p + slot)
    }

    pub fn contains(&self, a: &CMat) -> bool {
        a.shape() == (self.m, self.m) && numerics::in_span(&self.algebra, a, 1e-10)
    }

    /// `d(a) = Da − aD`.
    pub fn commutator_d(&self, a: &CMat) -> CMat {
        &self.dirac * a - a * &self.dirac
    }

    /// `L_D(a) = ‖[D, a]‖`.
    pub fn l_d(&self, a: &CMat) -> f64 {
        small_norm(&self.commutator_d(a))
    }

    /// Random element of the algebra with coefficients in the unit square.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> CMat {
        let mut out = CMat::zeros(self.m, self.m);
        for b in &self.algebra {
            out += b * c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        out
    }
}

fn pair_list(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            v.push((x, y));
        }
    }
    v
}

fn check_metric(d: &[Vec<f64>]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Err(Error::NotMetric("empty point set".into()));
    }
    for (i, row) in d.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NotMetric(format!("row {i} has length {}, expected {n}", row.len())));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotMetric("distances must be finite".into()));
        }
        if row[i] != 0.0 {
            return Err(Error::NotMetric(format!("d({i},{i}) must vanish")));
        }
    }
    for x in 0..n {
        for y in 0..n {
            if d[x][y] != d[y][x] {
                return Err(Error::NotMetric(format!("d({x},{y}) != d({y},{x})")));
            }
            if x != y && d[x][y] <= 0.0 {
                return Err(Error::NotMetric(format!("d({x},{y}) must be positive")));
            }
            for z in 0..n {
                if d[x][z] > d[x][y] + d[y][z] + 1e-12 * d[x][z].abs().max(1.0) {
                    return Err(Error::NotMetric(format!("triangle inequality fails at ({x},{y},{z})")));
                }
            }
        }
    }
    Ok(())
}

/// How the action is realized.
#[derive(Clone, Debug, PartialEq)]
pub enum ActionRealization {
    Trivial,
    /// Point permutations of a finite metric space, one per abelianization generator.
    Permutation(Vec<Vec<usize>>),
    /// `Ad(u)` for unitaries `u`, one per abelianization generator.
    Inner,
}

/// Action `g ↦ Ad(U_g)` with `U_g = Π u_i^{ab_i(g)}`, factoring through the
/// abelianization of the group.
#[derive(Clone, Debug)]
pub struct GroupAction {
    group: GroupModel,
    unitaries: Vec<CMat>,
    realization: ActionRealization,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Equicontinuity {
    /// Every `U_g` commutes with `D`, so `L_D(α_g(a)) = L_D(a)`.
    Isometric,
    /// Finite group: the supremum is a maximum over the whole group.
    FiniteGroup,
    /// Only the finite-ball profile is available.
    ProfileOnly,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquicontinuityProfile {
    pub profile: Vec<(u32, f64)>,
    pub justification: Equicontinuity,
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionAudit {
    pub identity_error: f64,
    pub homomorphism_error: f64,
    pub automorphism_error: f64,
    pub span_preserved: bool,
    pub dirac_deviation: f64,
    pub pass: bool,
}

impl GroupAction {
    pub fn trivial(group: GroupModel, triple: &FiniteSpectralTriple) -> Self {
        let k = group.family().abelian_rank();
        GroupAction { group, unitaries: vec![numerics::identity(triple.dim()); k], realization: ActionRealization::Trivial }
    }

    /// Action by isometries of a finite metric base, one permutation of the
    /// points per abelianization generator.
    pub fn permutation(group: GroupModel, triple: &FiniteSpectralTriple, perms: Vec<Vec<usize>>) -> Result<Self> {
        let distance = match triple.kind() {
            BaseKind::FiniteMetric { distance } => distance.clone(),
            _ => return Err(Error::InvalidAction("permutation actions need a finite metric base".into())),
        };
        let n = distance.len();
        let k = group.family().abelian_rank();
        if perms.len() != k {
            return Err(Error::InvalidAction(format!("expected {k} permutations, got {}", perms.len())));
        }
        let mut unitaries = Vec::with_capacity(k);
        for (i, p) in perms.iter().enumerate() {
            let mut seen = vec![false; n];
            if p.len() != n || p.iter().any(|&x| x >= n || std::mem::replace(&mut seen[x], true)) {
                return Err(Error::InvalidAction(format!("permutation {i} is not a bijection of {n} points")));
            }
            for x in 0..n {
                for y in 0..n {
                    if distance[p[x]][p[y]] != distance[x][y] {
                        return Err(Error::InvalidAction(format!("permutation {i} is not an isometry")));
                    }
                }
            }
            unitaries.push(permutation_unitary(n, p));
        }
        let a = GroupAction { group, unitaries, realization: ActionRealization::Permutation(perms) };
        a.check_unitaries()?;
        Ok(a)
    }

    /// Inner action by unitaries on `H`, one per abelianization generator.
    pub fn inner(group: GroupModel, triple: &FiniteSpectralTriple, unitaries: Vec<CMat>) -> Result<Self> {
        let k = group.family().abelian_rank();
        if unitaries.len() != k {
            return Err(Error::InvalidAction(format!("expected {k} unitaries, got {}", unitaries.len())));
        }
        let m = triple.dim();
        for (i, u) in unitaries.iter().enumerate() {
            if u.shape() != (m, m) {
                return Err(Error::InvalidAction(format!("unitary {i} must be {m}x{m}")));
            }
            numerics::ensure_finite(u)?;
            if numerics::max_abs(&(u.adjoint() * u - numerics::identity(m))) > 1e-10 {
                return Err(Error::InvalidAction(format!("matrix {i} is not unitary")));
            }
        }
        let a = GroupAction { group, unitaries, realization: ActionRealization::Inner };
        a.check_unitaries()?;
        for b in triple.algebra() {
            for u in &a.unitaries {
                if !triple.contains(&(u * b * u.adjoint())) {
                    return Err(Error::InvalidAction("action does not preserve the algebra".into()));
                }
            }
        }
        Ok(a)
    }

    fn check_unitaries(&self) -> Result<()> {
        for (i, u) in self.unitaries.iter().enumerate() {
            for v in &self.unitaries[i + 1..] {
                if !is_scalar_multiple_of_identity(&(u * v * u.adjoint() * v.adjoint())) {
                    return Err(Error::InvalidAction("unitaries must commute up to a phase".into()));
                }
            }
        }
        if let crate::group::GroupFamily::FiniteCyclic { order } = self.group.family() {
            let mut p = numerics::identity(self.unitaries[0].nrows());
            for _ in 0..order {
                p = &p * &self.unitaries[0];
            }
            if !is_scalar_multiple_of_identity(&p) {
                return Err(Error::InvalidAction(format!("u^{order} must be a scalar")));
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &GroupModel {
        &self.group
    }

    pub fn realization(&self) -> &ActionRealization {
        &self.realization
    }

    pub fn generator_unitaries(&self) -> &[CMat] {
        &self.unitaries
    }

    /// `U_g`.
    pub fn unitary(&self, g: &GroupElement) -> Result<CMat> {
        let ab = self.group.abelianization(g)?;
        let m = self.unitaries[0].nrows();
        let mut out = numerics::identity(m);
        for (u, &e) in self.unitaries.iter().zip(&ab) {
            let base = if e >= 0 { u.clone() } else { u.adjoint() };
            out = out * matrix_power(&base, e.unsigned_abs());
        }
        Ok(out)
    }

    /// `α_g(a) = U_g a U_g*`.
    pub fn act(&self, g: &GroupElement, a: &CMat) -> Result<CMat> {
        if self.realization == ActionRealization::Trivial {
            self.group.check(g)?;
            return Ok(a.clone());
        }
        let u = self.unitary(g)?;
        Ok(&u * a * u.adjoint())
    }

    /// `max_{g ∈ B_r} L_D(α_g(a))`.
    pub fn equicontinuity_sup(&self, triple: &FiniteSpectralTriple, a: &CMat, r: u32) -> Result<f64> {
        let ball = self.group.ball(r)?;
        let mut best = 0.0_f64;
        for g in &ball.elements {
            best = best.max(triple.l_d(&self.act(g, a)?));
        }
        Ok(best)
    }

    pub fn equicontinuity_profile(&self, triple: &FiniteSpectralTriple, a: &CMat, r_max: u32) -> Result<EquicontinuityProfile> {
        let ball = self.group.ball(r_max)?;
        let mut profile = Vec::with_capacity(r_max as usize + 1);
        let mut best = 0.0_f64;
        for r in 0..=r_max {
            for g in ball.sphere(r) {
                best = best.max(triple.l_d(&self.act(g, a)?));
            }
            profile.push((r, best));
        }
        Ok(EquicontinuityProfile { profile, justification: self.justification(triple) })
    }

    pub fn justification(&self, triple: &FiniteSpectralTriple) -> Equicontinuity {
        if self.dirac_deviation(triple) <= 1e-12 {
            Equicontinuity::Isometric
        } else if self.group.family().is_finite() {
            Equicontinuity::FiniteGroup
        } else {
            Equicontinuity::ProfileOnly
        }
    }

    /// `max_i ‖u_i D u_i* − D‖` entrywise.
    pub fn dirac_deviation(&self, triple: &FiniteSpectralTriple) -> f64 {
        self.unitaries
            .iter()
            .map(|u| numerics::max_abs(&(u * triple.dirac() * u.adjoint() - triple.dirac())))
            .fold(0.0, f64::max)
    }

    /// Samples the action axioms on `B_r` against the algebra basis.
    pub fn audit(&self, triple: &FiniteSpectralTriple, r: u32) -> Result<ActionAudit> {
        let ball = self.group.ball(r)?;
        let e = self.group.identity();
        let basis = triple.algebra();
        let mut id_err = 0.0_f64;
        let mut hom = 0.0_f64;
        let mut auto = 0.0_f64;
        let mut span_ok = true;
        for a in basis {
            id_err = id_err.max(numerics::max_abs(&(self.act(&e, a)? - a)));
        }
        for g in &ball.elements {
            for (i, a) in basis.iter().enumerate() {
                let ga = self.act(g, a)?;
                if !triple.contains(&ga) {
                    span_ok = false;
                }
                auto = auto.max(numerics::max_abs(&(self.act(g, &a.adjoint())? - ga.adjoint())));
                let b = &basis[(i + 1) % basis.len()];
                auto = auto.max(numerics::max_abs(&(self.act(g, &(a * b))? - &ga * self.act(g, b)?)));
                let h = &ball.elements[(i * 7 + 3) % ball.len()];
                let lhs = self.act(g, &self.act(h, a)?)?;
                let rhs = self.act(&self.group.multiply(g, h)?, a)?;
                hom = hom.max(numerics::max_abs(&(lhs - rhs)));
            }
            let one = numerics::identity(triple.dim());
            auto = auto.max(numerics::max_abs(&(self.act(g, &one)? - one)));
        }
        let dd = self.dirac_deviation(triple);
        Ok(ActionAudit {
            identity_error: id_err,
            homomorphism_error: hom,
            automorphism_error: auto,
            span_preserved: span_ok,
            dirac_deviation: dd,
            pass: id_err <= TOL && hom <= TOL && auto <= TOL && span_ok,
        })
    }
}

fn is_scalar_multiple_of_identity(m: &CMat) -> bool {
    let c = m[(0, 0)];
    if (c.norm() - 1.0).abs() > 1e-10 {
        return false;
    }
    numerics::max_abs(&(m - numerics::identity(m.nrows()) * c)) <= 1e-10
}

fn matrix_power(m: &CMat, mut e: u64) -> CMat {
    let mut result = numerics::identity(m.nrows());
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    result
}

/// Unitary on `⊕_{x<y} C^2` sending slot `x` of pair `{x, y}` to slot `σx` of
/// pair `{σx, σy}`.
fn permutation_unitary(n: usize, p: &[usize]) -> CMat {
    if n == 1 {
        return numerics::identity(1);
    }
    let pairs = pair_list(n);
    let pos = |a: usize, b: usize| -> usize {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let idx = pairs.iter().position(|&q| q == (lo, hi)).expect("pair exists");
        2 * idx + usize::from(a > b)
    };
    let m = 2 * pairs.len();
    let mut u = CMat::zeros(m, m);
    for &(x, y) in &pairs {
        u[(pos(p[x], p[y]), pos(x, y))] = c64(1.0, 0.0);
        u[(pos(p[y], p[x]), pos(y, x))] = c64(1.0, 0.0);
    }
    u
}

/// A unital `*`-invariant subspace of the base algebra.
#[derive(Clone, Debug)]
pub struct OperatorSystemSpec {
    pub basis: Vec<CMat>,
    pub action_invariant: bool,
}

impl OperatorSystemSpec {
    /// The whole algebra.
    pub fn full(triple: &FiniteSpectralTriple) -> Self {
        OperatorSystemSpec { basis: triple.algebra().to_vec(), action_invariant: true }
    }

    pub fn validate(&self, triple: &FiniteSpectralTriple, action: Option<&GroupAction>) -> Result<()> {
        let m = triple.dim();
        if self.basis.iter().any(|b| b.shape() != (m, m)) {
            return Err(Error::InvalidOperatorSystem(format!("basis elements must be {m}x{m}")));
        }
        if !numerics::in_span(&self.basis, &numerics::identity(m), 1e-10) {
            return Err(Error::InvalidOperatorSystem("span does not contain the identity".into()));
        }
        for b in &self.basis {
            if !triple.contains(b) {
                return Err(Error::InvalidOperatorSystem("basis element outside the algebra".into()));
            }
            if !numerics::in_span(&self.basis, &b.adjoint(), 1e-10) {
                return Err(Error::InvalidOperatorSystem("span is not closed under adjoints".into()));
            }
        }
        if let (true, Some(action)) = (self.action_invariant, action) {
            for s in action.group().generators() {
                for b in &self.basis {
                    if !numerics::in_span(&self.basis, &action.act(s, b)?, 1e-10) {
                        return Err(Error::InvalidOperatorSystem(format!("span is not invariant under {s}")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Pauli matrices used across the test suites and scenarios.
pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_point(d: f64) -> FiniteSpectralTriple {
        FiniteSpectralTriple::lip_triple(vec![vec![0.0, d], vec![d, 0.0]]).unwrap()
    }

    fn brute_lipschitz(dist: &[Vec<f64>], f: &[num_complex::Complex64]) -> f64 {
        let mut best = 0.0_f64;
        for x in 0..f.len() {
            for y in 0..f.len() {
                if x != y {
                    best = best.max((f[x] - f[y]).norm() / dist[x][y]);
                }
            }
        }
        best
    }

    #[test]
    fn lip_triple_examples() {
        let one = FiniteSpectralTriple::lip_triple(vec![vec![0.0]]).unwrap();
        assert_eq!(one.dim(), 1);
        assert_eq!(one.l_d(&one.function(&[c64(3.0, 1.0)])), 0.0);
        let t = two_point(2.0);
        let a = t.function(&[c64(0.0, 0.0), c64(2.0, 0.0)]);
        assert!((t.l_d(&a) - 1.0).abs() < 1e-12);
        let id = numerics::identity(t.dim());
        assert_eq!(numerics::max_abs(&t.commutator_d(&id)), 0.0);
        assert!((t.l_d(&a.scale(2.0)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lip_triple_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dists = [
            vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]],
            vec![vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 0.0, 1.0, 2.0], vec![2.0, 1.0, 0.0, 1.5], vec![3.0, 2.0, 1.5, 0.0]],
        ];
        for d in dists {
            let t = FiniteSpectralTriple::lip_triple(d.clone()).unwrap();
            for _ in 0..20 {
                let f: Vec<_> = (0..d.len()).map(|_| c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
                assert!((t.l_d(&t.function(&f)) - brute_lipschitz(&d, &f)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_non_metrics() {
        assert!(FiniteSpectralTriple::lip_triple(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(FiniteSpectralTriple::lip_triple(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).is_err());
        let bad = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        assert!(matches!(FiniteSpectralTriple::lip_triple(bad), Err(Error::NotMetric(_))));
    }

    #[test]
    fn graded_lip_triple_is_valid() {
        let t = FiniteSpectralTriple::lip_triple_graded(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(t.parity(), 0);
        assert!(numerics::anticommutator_max(t.grading().unwrap(), t.dirac()) == 0.0);
    }

    #[test]
    fn matrix_inner_requires_closed_algebra() {
        let t = FiniteSpectralTriple::matrix_inner(2, None).unwrap();
        assert_eq!(t.algebra().len(), 4);
        let mut upper = CMat::zeros(2, 2);
        upper[(0, 1)] = c64(1.0, 0.0);
        let r = FiniteSpectralTriple::new(vec![numerics::identity(2), upper], numerics::identity(2), 1, None);
        assert!(matches!(r, Err(Error::InvalidTriple(_))));
    }

    #[test]
    fn permutation_action_is_isometric() {
        let d = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]];
        let t = FiniteSpectralTriple::lip_triple(d).unwrap();
        let z = GroupModel::free_abelian(1);
        let act = GroupAction::permutation(z.clone(), &t, vec![vec![2, 1, 0]]).unwrap();
        assert!(act.dirac_deviation(&t) == 0.0);
        let f = t.function(&[c64(1.0, 0.0), c64(5.0, 0.0), c64(-2.0, 0.0)]);
        let g = act.act(&GroupElement(vec![1]), &f).unwrap();
        let expect = t.function(&[c64(-2.0, 0.0), c64(5.0, 0.0), c64(1.0, 0.0)]);
        assert!(numerics::max_abs(&(g - expect)) == 0.0);
        let base = t.l_d(&f);
        for r in 0..4 {
            assert!((act.equicontinuity_sup(&t, &f, r).unwrap() - base).abs() < 1e-12);
        }
        assert!(act.audit(&t, 3).unwrap().pass);
        assert!(GroupAction::permutation(z, &t, vec![vec![1, 0, 2]]).is_err());
    }

    #[test]
    fn inner_heisenberg_action() {
        let t = FiniteSpectralTriple::matrix_inner(2, Some(pauli_z())).unwrap();
        let h = GroupModel::heisenberg();
        let act = GroupAction::inner(h.clone(), &t, vec![pauli_z(), pauli_x()]).unwrap();
        let audit = act.audit(&t, 2).unwrap();
        assert!(audit.pass, "{audit:?}");
        assert_eq!(act.justification(&t), Equicontinuity::ProfileOnly);
        let commuting = GroupAction::inner(h, &t, vec![pauli_z(), numerics::identity(2)]).unwrap();
        let a = t.random_element(&mut ChaCha8Rng::seed_from_u64(1));
        for r in 0..4 {
            assert!((commuting.equicontinuity_sup(&t, &a, r).unwrap() - t.l_d(&a)).abs() < 1e-12);
        }
    }

    #[test]
    fn inner_rejects_bad_unitaries() {
        let t = FiniteSpectralTriple::matrix_inner(2, None).unwrap();
        let z2 = GroupModel::free_abelian(2);
        let hadamard = CMat::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0)])
            .scale(std::f64::consts::FRAC_1_SQRT_2);
        assert!(GroupAction::inner(z2.clone(), &t, vec![hadamard, pauli_z()]).is_err());
        assert!(GroupAction::inner(z2, &t, vec![pauli_x().scale(2.0), pauli_z()]).is_err());
        let c3 = GroupModel::cyclic(3).unwrap();
        assert!(GroupAction::inner(c3, &t, vec![pauli_x()]).is_err());
    }

    #[test]
    fn operator_system_validation() {
        let t = FiniteSpectralTriple::matrix_inner(2, None).unwrap();
        let full = OperatorSystemSpec::full(&t);
        assert!(full.validate(&t, None).is_ok());
        let sa = OperatorSystemSpec { basis: vec![numerics::identity(2), pauli_x(), pauli_z()], action_invariant: true };
        let h = GroupModel::heisenberg();
        let act = GroupAction::inner(h, &t, vec![pauli_z(), pauli_x()]).unwrap();
        assert!(sa.validate(&t, Some(&act)).is_ok());
        let mut e01 = CMat::zeros(2, 2);
        e01[(0, 1)] = c64(1.0, 0.0);
        let bad = OperatorSystemSpec { basis: vec![numerics::identity(2), e01], action_invariant: false };
        assert!(bad.validate(&t, None).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::Rng;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn seminorm_axioms_and_leibniz(seed in 0u64..100_000, which in 0usize..2) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let t = if which == 0 {
                    FiniteSpectralTriple::lip_triple(vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.5], vec![2.0, 1.5, 0.0]]).unwrap()
                } else {
                    FiniteSpectralTriple::matrix_inner(3, None).unwrap()
                };
                let a = t.random_element(&mut rng);
                let b = t.random_element(&mut rng);
                let s: f64 = rng.gen_range(-3.0..3.0);
                prop_assert!((t.l_d(&a.scale(s)) - s.abs() * t.l_d(&a)).abs() <= 1e-10 * (1.0 + t.l_d(&a)));
                prop_assert!(t.l_d(&(&a + &b)) <= t.l_d(&a) + t.l_d(&b) + 1e-10);
                prop_assert!((t.l_d(&a.adjoint()) - t.l_d(&a)).abs() <= 1e-10);
                prop_assert!(t.l_d(&numerics::identity(t.dim()).scale(s)) <= 1e-12);
                let leib = t.commutator_d(&(&a * &b)) - t.commutator_d(&a) * &b - &a * t.commutator_d(&b);
                prop_assert!(numerics::max_abs(&leib) <= 1e-10);
            }
        }
    }
}
