//! Finitely generated groups of polynomial growth with word metrics.
//!
//! Three families are modelled exactly: free abelian groups `Z^d`, the
//! integer Heisenberg group and finite cyclic groups. Word lengths and balls
//! come from a breadth-first search over the Cayley graph whose layers are
//! memoized behind a mutex, so a [`GroupModel`] can be shared across threads.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on the number of enumerated elements.
pub const DEFAULT_BALL_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupFamily {
    FreeAbelian { rank: usize },
    Heisenberg3,
    FiniteCyclic { order: u64 },
}

impl GroupFamily {
    pub fn arity(&self) -> usize {
        match *self {
            GroupFamily::FreeAbelian { rank } => rank,
            GroupFamily::Heisenberg3 => 3,
            GroupFamily::FiniteCyclic { .. } => 1,
        }
    }

    /// Rank of the abelianization target `Z^k` (or `Z/m` for cyclic groups).
    pub fn abelian_rank(&self) -> usize {
        match *self {
            GroupFamily::FreeAbelian { rank } => rank,
            GroupFamily::Heisenberg3 => 2,
            GroupFamily::FiniteCyclic { .. } => 1,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroupFamily::FiniteCyclic { .. })
    }

    pub fn label(&self) -> String {
        match *self {
            GroupFamily::FreeAbelian { rank } => format!("z^{rank}"),
            GroupFamily::Heisenberg3 => "heisenberg3".to_string(),
            GroupFamily::FiniteCyclic { order } => format!("cyclic{order}"),
        }
    }
}

/// A group element in normal-form coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub Vec<i64>);

impl GroupElement {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for GroupElement {
    fn from(v: Vec<i64>) -> Self {
        GroupElement(v)
    }
}

/// Elements of word length at most `radius`, ordered by (length, coordinates).
#[derive(Clone, Debug)]
pub struct Ball {
    pub radius: u32,
    pub elements: Vec<GroupElement>,
    pub index: HashMap<GroupElement, usize>,
    /// `sphere_start[k]` is the position of the first element of length `k`;
    /// the final entry equals `elements.len()`.
    pub sphere_start: Vec<usize>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(g)
    }

    pub fn position(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Elements of word length exactly `k`.
    pub fn sphere(&self, k: u32) -> &[GroupElement] {
        let k = k as usize;
        if k + 1 >= self.sphere_start.len() {
            return &[];
        }
        &self.elements[self.sphere_start[k]..self.sphere_start[k + 1]]
    }

    /// Word length of the element at position `i`.
    pub fn length_at(&self, i: usize) -> u32 {
        (self.sphere_start.partition_point(|&s| s <= i) - 1) as u32
    }
}

#[derive(Debug, Default)]
struct BfsCache {
    layers: Vec<Vec<GroupElement>>,
    dist: HashMap<GroupElement, u32>,
    exhausted: bool,
    balls: HashMap<u32, Arc<Ball>>,
}

/// A group family with a symmetric generating set and memoized word metric.
#[derive(Clone)]
pub struct GroupModel {
    family: GroupFamily,
    generators: Vec<GroupElement>,
    cap: usize,
    cache: Arc<Mutex<BfsCache>>,
}

impl fmt::Debug for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupModel")
            .field("family", &self.family)
            .field("generators", &self.generators)
            .field("cap", &self.cap)
            .finish()
    }
}

impl PartialEq for GroupModel {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.generators == other.generators
    }
}

impl GroupModel {
    /// Model with the family's standard generators.
    pub fn new(family: GroupFamily) -> Result<Self> {
        if let GroupFamily::FiniteCyclic { order } = family {
            if order == 0 || order > i64::MAX as u64 {
                return Err(Error::InvalidGenerators(format!("cyclic order must be positive, got {order}")));
            }
        }
        let generators = standard_generators(family);
        Ok(Self::from_parts(family, generators))
    }

    pub fn free_abelian(rank: usize) -> Self {
        Self::from_parts(GroupFamily::FreeAbelian { rank }, standard_generators(GroupFamily::FreeAbelian { rank }))
    }

    pub fn heisenberg() -> Self {
        Self::from_parts(GroupFamily::Heisenberg3, standard_generators(GroupFamily::Heisenberg3))
    }

    pub fn cyclic(order: u64) -> Result<Self> {
        Self::new(GroupFamily::FiniteCyclic { order })
    }

    /// Model with an explicit generating set. The list must be closed under
    /// inversion, exclude the identity and generate the group.
    pub fn with_generators(family: GroupFamily, generators: Vec<GroupElement>) -> Result<Self> {
        let probe = Self::new(family)?;
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            let g = probe.normalize(g)?;
            if g == probe.identity() {
                return Err(Error::InvalidGenerators(format!("generator {g} is the identity")));
            }
            if !gens.contains(&g) {
                gens.push(g);
            }
        }
        for g in &gens {
            let inv = probe.invert(g)?;
            if !gens.contains(&inv) {
                return Err(Error::InvalidGenerators(format!("inverse of generator {g} is missing")));
            }
        }
        let model = Self::from_parts(family, gens);
        for s in standard_generators(family) {
            match model.word_length(&s) {
                Ok(_) => {}
                Err(Error::Unreachable(_)) | Err(Error::BallCap { .. }) => {
                    return Err(Error::InvalidGenerators(format!(
                        "generators do not reach {s} within the enumeration cap"
                    )));
                }
                Err(e) => return Err(e),
            }
        }
        Ok(model)
    }

    fn from_parts(family: GroupFamily, generators: Vec<GroupElement>) -> Self {
        GroupModel { family, generators, cap: DEFAULT_BALL_CAP, cache: Arc::new(Mutex::new(BfsCache::default())) }
    }

    /// Same model with a different enumeration cap.
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self.cache = Arc::new(Mutex::new(BfsCache::default()));
        self
    }

    pub fn family(&self) -> GroupFamily {
        self.family
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.family.arity()])
    }

    fn mismatch(&self, g: &GroupElement) -> Error {
        Error::ModelMismatch { element: g.to_string(), model: self.family.label() }
    }

    /// Checks that `g` is a normal-form element of this model.
    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if g.0.len() != self.family.arity() {
            return Err(self.mismatch(g));
        }
        if let GroupFamily::FiniteCyclic { order } = self.family {
            if g.0[0] < 0 || g.0[0] as u64 >= order {
                return Err(self.mismatch(g));
            }
        }
        Ok(())
    }

    /// Brings arbitrary coordinates into normal form (reduces cyclic residues).
    pub fn normalize(&self, g: GroupElement) -> Result<GroupElement> {
        if g.0.len() != self.family.arity() {
            return Err(self.mismatch(&g));
        }
        match self.family {
            GroupFamily::FiniteCyclic { order } => Ok(GroupElement(vec![g.0[0].rem_euclid(order as i64)])),
            _ => Ok(g),
        }
    }

    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        self.normalize(GroupElement(coords.to_vec()))
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul_unchecked(g, h))
    }

    pub fn invert(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(self.inv_unchecked(g))
    }

    pub(crate) fn mul_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match self.family {
            GroupFamily::FreeAbelian { .. } => GroupElement(g.0.iter().zip(&h.0).map(|(a, b)| a + b).collect()),
            GroupFamily::Heisenberg3 => {
                let (a, b, c) = (g.0[0], g.0[1], g.0[2]);
                let (a2, b2, c2) = (h.0[0], h.0[1], h.0[2]);
                GroupElement(vec![a + a2, b + b2, c + c2 + a * b2])
            }
            GroupFamily::FiniteCyclic { order } => GroupElement(vec![(g.0[0] + h.0[0]).rem_euclid(order as i64)]),
        }
    }

    pub(crate) fn inv_unchecked(&self, g: &GroupElement) -> GroupElement {
        match self.family {
            GroupFamily::FreeAbelian { .. } => GroupElement(g.0.iter().map(|a| -a).collect()),
            GroupFamily::Heisenberg3 => {
                let (a, b, c) = (g.0[0], g.0[1], g.0[2]);
                GroupElement(vec![-a, -b, -c + a * b])
            }
            GroupFamily::FiniteCyclic { order } => GroupElement(vec![(-g.0[0]).rem_euclid(order as i64)]),
        }
    }

    /// Image in the abelianization: `Z^d` coordinates, `(a, b)` for the
    /// Heisenberg group, the residue for cyclic groups.
    pub fn abelianization(&self, g: &GroupElement) -> Result<Vec<i64>> {
        self.check(g)?;
        Ok(match self.family {
            GroupFamily::Heisenberg3 => vec![g.0[0], g.0[1]],
            _ => g.0.clone(),
        })
    }

    /// Length of a shortest word in the generators equal to `g`.
    pub fn word_length(&self, g: &GroupElement) -> Result<u32> {
        self.check(g)?;
        let mut cache = self.cache.lock().expect("bfs cache poisoned");
        loop {
            if let Some(&d) = cache.dist.get(g) {
                return Ok(d);
            }
            if cache.exhausted {
                return Err(Error::Unreachable(g.to_string()));
            }
            self.grow(&mut cache)?;
        }
    }

    /// Word lengths of several elements under one lock.
    pub fn word_lengths(&self, gs: &[GroupElement]) -> Result<Vec<u32>> {
        gs.iter().map(|g| self.word_length(g)).collect()
    }

    fn grow(&self, cache: &mut BfsCache) -> Result<()> {
        if cache.layers.is_empty() {
            let e = self.identity();
            cache.dist.insert(e.clone(), 0);
            cache.layers.push(vec![e]);
            return Ok(());
        }
        let r = cache.layers.len() as u32;
        let mut next: Vec<GroupElement> = Vec::new();
        {
            let last = cache.layers.last().expect("nonempty layers");
            for g in last {
                for s in &self.generators {
                    let h = self.mul_unchecked(g, s);
                    if !cache.dist.contains_key(&h) {
                        next.push(h);
                    }
                }
            }
        }
        next.sort();
        next.dedup();
        if next.is_empty() {
            cache.exhausted = true;
            return Ok(());
        }
        if cache.dist.len() + next.len() > self.cap {
            return Err(Error::BallCap { radius: r, cap: self.cap });
        }
        for h in &next {
            cache.dist.insert(h.clone(), r);
        }
        cache.layers.push(next);
        Ok(())
    }

    /// Closed-form ball size where one is known (standard generators of `Z^d`).
    pub fn predicted_ball_size(&self, r: u32) -> Option<u128> {
        match self.family {
            GroupFamily::FreeAbelian { rank } if self.generators == standard_generators(self.family) => {
                // |B_r| = sum_k 2^k C(d,k) C(r,k)
                let mut total: u128 = 0;
                for k in 0..=rank.min(r as usize) {
                    let term = 1u128
                        .checked_shl(k as u32)?
                        .checked_mul(binomial(rank as u128, k as u128)?)?
                        .checked_mul(binomial(r as u128, k as u128)?)?;
                    total = total.checked_add(term)?;
                }
                Some(total)
            }
            GroupFamily::FiniteCyclic { order } if self.generators == standard_generators(self.family) => {
                Some((2 * r as u128 + 1).min(order as u128))
            }
            _ => None,
        }
    }

    /// The ball of radius `r`. Refuses radii whose ball would exceed the cap.
    pub fn ball(&self, r: u32) -> Result<Arc<Ball>> {
        if let Some(size) = self.predicted_ball_size(r) {
            if size > self.cap as u128 {
                return Err(Error::BallCap { radius: r, cap: self.cap });
            }
        }
        let mut cache = self.cache.lock().expect("bfs cache poisoned");
        if let Some(b) = cache.balls.get(&r) {
            return Ok(Arc::clone(b));
        }
        while cache.layers.len() <= r as usize && !cache.exhausted {
            self.grow(&mut cache)?;
        }
        let mut elements = Vec::new();
        let mut sphere_start = Vec::new();
        for layer in cache.layers.iter().take(r as usize + 1) {
            sphere_start.push(elements.len());
            elements.extend(layer.iter().cloned());
        }
        sphere_start.push(elements.len());
        let index = elements.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        let ball = Arc::new(Ball { radius: r, elements, index, sphere_start });
        cache.balls.insert(r, Arc::clone(&ball));
        Ok(ball)
    }

    /// Elements of word length exactly `r`.
    pub fn sphere(&self, r: u32) -> Result<Vec<GroupElement>> {
        Ok(self.ball(r)?.sphere(r).to_vec())
    }

    /// Exact overlap ratio `|F ∩ gF| / |F|`.
    pub fn folner_overlap(&self, f: &Ball, g: &GroupElement) -> Result<Rational64> {
        self.check(g)?;
        if f.is_empty() {
            return Err(Error::Invalid("Følner set must be nonempty".into()));
        }
        let ginv = self.inv_unchecked(g);
        let hits = f.elements.iter().filter(|x| f.contains(&self.mul_unchecked(&ginv, x))).count();
        Ok(Rational64::new(hits as i64, f.len() as i64))
    }

    /// Largest word length of a finite set of elements.
    pub fn max_length<'a, I>(&self, it: I) -> Result<u32>
    where
        I: IntoIterator<Item = &'a GroupElement>,
    {
        let mut m = 0;
        for g in it {
            m = m.max(self.word_length(g)?);
        }
        Ok(m)
    }
}

fn standard_generators(family: GroupFamily) -> Vec<GroupElement> {
    match family {
        GroupFamily::FreeAbelian { rank } => {
            let mut gens = Vec::with_capacity(2 * rank);
            for i in 0..rank {
                let mut e = vec![0; rank];
                e[i] = 1;
                gens.push(GroupElement(e.clone()));
                e[i] = -1;
                gens.push(GroupElement(e));
            }
            gens
        }
        GroupFamily::Heisenberg3 => vec![
            GroupElement(vec![1, 0, 0]),
            GroupElement(vec![-1, 0, 0]),
            GroupElement(vec![0, 1, 0]),
            GroupElement(vec![0, -1, 0]),
        ],
        GroupFamily::FiniteCyclic { order } => match order {
            0 | 1 => Vec::new(),
            2 => vec![GroupElement(vec![1])],
            m => vec![GroupElement(vec![1]), GroupElement(vec![m as i64 - 1])],
        },
    }
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(c: &[i64]) -> GroupElement {
        GroupElement(c.to_vec())
    }

    #[test]
    fn arithmetic_examples() {
        let z2 = GroupModel::free_abelian(2);
        assert_eq!(z2.multiply(&el(&[1, 0]), &el(&[0, 1])).unwrap(), el(&[1, 1]));
        let h = GroupModel::heisenberg();
        assert_eq!(h.multiply(&el(&[1, 0, 0]), &el(&[0, 1, 0])).unwrap(), el(&[1, 1, 1]));
        assert_eq!(h.multiply(&el(&[0, 1, 0]), &el(&[1, 0, 0])).unwrap(), el(&[1, 1, 0]));
        let g = el(&[2, -3, 5]);
        assert_eq!(h.multiply(&g, &h.invert(&g).unwrap()).unwrap(), h.identity());
    }

    #[test]
    fn mismatch_rejected() {
        let z2 = GroupModel::free_abelian(2);
        assert!(matches!(z2.multiply(&el(&[1]), &el(&[0, 1])), Err(Error::ModelMismatch { .. })));
        let c = GroupModel::cyclic(5).unwrap();
        assert!(matches!(c.word_length(&el(&[7])), Err(Error::ModelMismatch { .. })));
    }

    #[test]
    fn word_length_examples() {
        let z2 = GroupModel::free_abelian(2);
        assert_eq!(z2.word_length(&z2.identity()).unwrap(), 0);
        assert_eq!(z2.word_length(&el(&[3, 4])).unwrap(), 7);
        let h = GroupModel::heisenberg();
        assert_eq!(h.word_length(&el(&[0, 0, 1])).unwrap(), 4);
        let c = GroupModel::cyclic(7).unwrap();
        assert_eq!(c.word_length(&el(&[4])).unwrap(), 3);
    }

    #[test]
    fn ball_examples() {
        let z = GroupModel::free_abelian(1);
        let b = z.ball(2).unwrap();
        assert_eq!(b.elements, vec![el(&[0]), el(&[-1]), el(&[1]), el(&[-2]), el(&[2])]);
        assert_eq!(b.length_at(4), 2);
        assert_eq!(GroupModel::heisenberg().ball(1).unwrap().len(), 5);
        for m in [GroupModel::free_abelian(3), GroupModel::heisenberg(), GroupModel::cyclic(4).unwrap()] {
            let b0 = m.ball(0).unwrap();
            assert_eq!(b0.elements, vec![m.identity()]);
        }
    }

    #[test]
    fn ball_sizes_match_closed_form() {
        for d in 1..=3 {
            let m = GroupModel::free_abelian(d);
            for r in 0..6 {
                assert_eq!(m.ball(r).unwrap().len() as u128, m.predicted_ball_size(r).unwrap());
            }
        }
    }

    #[test]
    fn cap_enforced() {
        let m = GroupModel::free_abelian(2).with_cap(50);
        assert!(m.ball(4).is_ok());
        assert!(matches!(m.ball(5), Err(Error::BallCap { .. })));
        let h = GroupModel::heisenberg().with_cap(30);
        assert!(matches!(h.ball(4), Err(Error::BallCap { .. })));
    }

    #[test]
    fn explicit_generators_validated() {
        let fam = GroupFamily::FreeAbelian { rank: 1 };
        assert!(GroupModel::with_generators(fam, vec![el(&[2]), el(&[-2])]).is_err());
        assert!(GroupModel::with_generators(fam, vec![el(&[1])]).is_err());
        assert!(GroupModel::with_generators(fam, vec![el(&[0]), el(&[1]), el(&[-1])]).is_err());
        let m = GroupModel::with_generators(fam, vec![el(&[2]), el(&[-2]), el(&[3]), el(&[-3])]).unwrap();
        assert_eq!(m.word_length(&el(&[1])).unwrap(), 2);
        assert_eq!(m.word_length(&el(&[6])).unwrap(), 2);
    }

    #[test]
    fn folner_examples() {
        let z = GroupModel::free_abelian(1);
        for n in 1..6u32 {
            let f = z.ball(n).unwrap();
            assert_eq!(z.folner_overlap(&f, &z.identity()).unwrap(), Rational64::from_integer(1));
            for k in -(2 * n as i64)..=(2 * n as i64) {
                let expect = Rational64::new(2 * n as i64 + 1 - k.abs(), 2 * n as i64 + 1);
                assert_eq!(z.folner_overlap(&f, &el(&[k])).unwrap(), expect);
            }
            assert_eq!(z.folner_overlap(&f, &el(&[2 * n as i64 + 1])).unwrap(), Rational64::from_integer(0));
        }
    }

    /// Lattice-point count of `B_n ∩ (g + B_n)` for the l1 ball.
    fn box_overlap(d: usize, n: i64, g: &[i64]) -> (i64, i64) {
        let mut total = 0;
        let mut hits = 0;
        let mut x = vec![-n; d];
        loop {
            let l1: i64 = x.iter().map(|v| v.abs()).sum();
            if l1 <= n {
                total += 1;
                let l1s: i64 = x.iter().zip(g).map(|(a, b)| (a - b).abs()).sum();
                if l1s <= n {
                    hits += 1;
                }
            }
            let mut i = 0;
            loop {
                if i == d {
                    return (hits, total);
                }
                x[i] += 1;
                if x[i] <= n {
                    break;
                }
                x[i] = -n;
                i += 1;
            }
        }
    }

    #[test]
    fn folner_bound_for_free_abelian() {
        for d in 1..=3 {
            let m = GroupModel::free_abelian(d);
            for s in m.generators().to_vec() {
                let mut prev = Rational64::from_integer(0);
                for n in 1..=8u32 {
                    let f = m.ball(n).unwrap();
                    let c = m.folner_overlap(&f, &s).unwrap();
                    let (hits, total) = box_overlap(d, n as i64, &s.0);
                    assert_eq!(c, Rational64::new(hits, total));
                    assert!(c >= prev);
                    assert!(c > Rational64::from_integer(1) - Rational64::new(4, n as i64 + 1));
                    prev = c;
                }
            }
        }
    }

    #[test]
    fn heisenberg_matches_brute_force_distances() {
        // Independent BFS on raw tuples, without the model's cache.
        let h = GroupModel::heisenberg();
        let gens = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)];
        let mut dist: HashMap<(i64, i64, i64), u32> = HashMap::new();
        let mut frontier = vec![(0i64, 0i64, 0i64)];
        dist.insert((0, 0, 0), 0);
        for r in 1..=5 {
            let mut next = Vec::new();
            for &(a, b, c) in &frontier {
                for &(a2, b2, c2) in &gens {
                    let p = (a + a2, b + b2, c + c2 + a * b2);
                    if !dist.contains_key(&p) {
                        dist.insert(p, r);
                        next.push(p);
                    }
                }
            }
            frontier = next;
        }
        let ball = h.ball(5).unwrap();
        assert_eq!(ball.len(), dist.len());
        for (p, d) in dist {
            assert_eq!(h.word_length(&el(&[p.0, p.1, p.2])).unwrap(), d);
        }
    }

    #[test]
    fn shared_model_is_thread_safe() {
        let h = GroupModel::heisenberg();
        let lens: Vec<u32> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..4)
                .map(|i| {
                    let h = h.clone();
                    s.spawn(move || h.word_length(&el(&[i, 1, i])).unwrap())
                })
                .collect();
            handles.into_iter().map(|t| t.join().unwrap()).collect()
        });
        let fresh = GroupModel::heisenberg();
        for (i, l) in lens.iter().enumerate() {
            assert_eq!(*l, fresh.word_length(&el(&[i as i64, 1, i as i64])).unwrap());
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn models() -> Vec<(GroupModel, u32)> {
            vec![
                (GroupModel::free_abelian(1), 6),
                (GroupModel::free_abelian(2), 4),
                (GroupModel::heisenberg(), 4),
                (GroupModel::cyclic(9).unwrap(), 4),
            ]
        }

        proptest! {
            #[test]
            fn symmetric_and_subadditive(which in 0usize..4, i in 0usize..10_000, j in 0usize..10_000) {
                let (m, r) = models().swap_remove(which);
                let ball = m.ball(r).unwrap();
                let g = &ball.elements[i % ball.len()];
                let h = &ball.elements[j % ball.len()];
                let lg = m.word_length(g).unwrap();
                prop_assert_eq!(lg, m.word_length(&m.invert(g).unwrap()).unwrap());
                let gh = m.multiply(g, h).unwrap();
                prop_assert!(m.word_length(&gh).unwrap() <= lg + m.word_length(h).unwrap());
                let ghi = m.multiply(&gh, &m.invert(&gh).unwrap()).unwrap();
                prop_assert_eq!(ghi, m.identity());
            }

            #[test]
            fn heisenberg_associative(a in proptest::collection::vec(-5i64..5, 9)) {
                let h = GroupModel::heisenberg();
                let (x, y, z) = (el(&a[0..3]), el(&a[3..6]), el(&a[6..9]));
                let l = h.multiply(&h.multiply(&x, &y).unwrap(), &z).unwrap();
                let r = h.multiply(&x, &h.multiply(&y, &z).unwrap()).unwrap();
                prop_assert_eq!(l, r);
            }

            #[test]
            fn balls_nest_as_prefixes(which in 0usize..4, r in 0u32..4) {
                let (m, _) = models().swap_remove(which);
                let small = m.ball(r).unwrap();
                let big = m.ball(r + 1).unwrap();
                prop_assert_eq!(&big.elements[..small.len()], &small.elements[..]);
                for (i, g) in small.elements.iter().enumerate() {
                    prop_assert_eq!(small.length_at(i), m.word_length(g).unwrap());
                    prop_assert_eq!(big.length_at(i), small.length_at(i));
                }
            }
        }
    }
}
