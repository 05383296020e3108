//! Weak poc sets: partial orders on literals closed under contraposition,
//! with `ZERO` below and `ONE` above everything.

use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::literal::{LitSet, Literal, Sensorium};

/// A weak poc set stored as generators plus a reachability bit-matrix over
/// the whole literal universe.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakPocSet {
    sensorium: Sensorium,
    generators: Vec<(Literal, Literal)>,
    up: Vec<LitSet>,
}

/// How two proper literals of different sensors relate.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PairRelation {
    /// `a <= b`
    Below,
    /// `a* <= b`
    StarBelow,
    /// `a <= b*`
    BelowStar,
    /// `a* <= b*`
    StarBelowStar,
    Crossing,
}

impl WeakPocSet {
    /// Smallest weak poc set containing the relations `a <= b`.
    pub fn from_generators(sensorium: Sensorium, relations: &[(Literal, Literal)]) -> Result<Self, Error> {
        let m = sensorium.universe();
        for &(a, b) in relations {
            sensorium.check(a)?;
            sensorium.check(b)?;
        }
        let zero = sensorium.zero();
        let one = sensorium.one();
        let mut up: Vec<LitSet> = (0..m)
            .map(|i| {
                let mut s = LitSet::new(m);
                s.insert(Literal(i as u32));
                s.insert(one);
                s
            })
            .collect();
        up[zero.index()] = LitSet::full(m);
        for &(a, b) in relations {
            up[a.index()].insert(b);
            up[b.star().index()].insert(a.star());
        }
        // Warshall over bit rows.
        for k in 0..m {
            let row_k = up[k].clone();
            let lk = Literal(k as u32);
            for row in up.iter_mut() {
                if row.contains(lk) {
                    row.union_with(&row_k);
                }
            }
        }
        Ok(WeakPocSet { sensorium, generators: relations.to_vec(), up })
    }

    /// Poc set with no relations between proper literals.
    pub fn free(sensorium: Sensorium) -> Self {
        Self::from_generators(sensorium, &[]).expect("no relations")
    }

    pub fn sensorium(&self) -> &Sensorium {
        &self.sensorium
    }

    pub fn generators(&self) -> &[(Literal, Literal)] {
        &self.generators
    }

    pub fn n_sensors(&self) -> usize {
        self.sensorium.len()
    }

    pub fn universe(&self) -> usize {
        self.sensorium.universe()
    }

    pub fn zero(&self) -> Literal {
        self.sensorium.zero()
    }

    pub fn one(&self) -> Literal {
        self.sensorium.one()
    }

    #[inline]
    pub fn leq(&self, a: Literal, b: Literal) -> bool {
        a.index() < self.up.len() && self.up[a.index()].contains(b)
    }

    /// Principal up-set of a single literal.
    pub fn up_of(&self, a: Literal) -> &LitSet {
        &self.up[a.index()]
    }

    pub fn is_negligible(&self, a: Literal) -> bool {
        self.leq(a, a.star())
    }

    pub fn is_ubiquitous(&self, a: Literal) -> bool {
        self.leq(a.star(), a)
    }

    pub fn empty_set(&self) -> LitSet {
        LitSet::new(self.universe())
    }

    pub fn set_of<I: IntoIterator<Item = Literal>>(&self, it: I) -> LitSet {
        LitSet::from_literals(self.universe(), it)
    }

    pub fn classify_pair(&self, a: Literal, b: Literal) -> Result<PairRelation, Error> {
        for l in [a, b] {
            if !self.sensorium.is_proper(l) {
                return Err(Error::ImproperLiteral(l.0));
            }
        }
        if a.sensor() == b.sensor() {
            return Err(Error::SameSensor(a.0, b.0));
        }
        Ok(if self.leq(a, b) {
            PairRelation::Below
        } else if self.leq(a.star(), b) {
            PairRelation::StarBelow
        } else if self.leq(a, b.star()) {
            PairRelation::BelowStar
        } else if self.leq(a.star(), b.star()) {
            PairRelation::StarBelowStar
        } else {
            PairRelation::Crossing
        })
    }

    pub fn up_set(&self, a: &LitSet) -> LitSet {
        let mut s = self.empty_set();
        for l in a.iter() {
            s.union_with(&self.up[l.index()]);
        }
        s
    }

    pub fn down_set(&self, a: &LitSet) -> LitSet {
        self.up_set(&a.star()).star()
    }

    /// No `a, b` in the set with `a <= b*`.
    pub fn is_coherent(&self, a: &LitSet) -> bool {
        let star = a.star();
        a.iter().all(|l| self.up[l.index()].is_disjoint(&star))
    }

    /// `up(A) \ down(A*)`.
    pub fn coherent_projection(&self, a: &LitSet) -> LitSet {
        let up = self.up_set(a);
        up.difference(&up.star())
    }

    /// Classes of mutually reachable proper literals, each sorted, ordered by
    /// smallest member.
    pub fn equivalence_classes(&self) -> Vec<Vec<Literal>> {
        let n = self.sensorium.n_proper();
        let mut seen = alloc::vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let a = Literal(i as u32);
            let class: Vec<Literal> =
                (i..n).map(|j| Literal(j as u32)).filter(|&b| self.leq(a, b) && self.leq(b, a)).collect();
            for b in &class {
                seen[b.index()] = true;
            }
            out.push(class);
        }
        out
    }

    /// All strict relations `a < b` between proper literals (a != b).
    pub fn relations(&self) -> Vec<(Literal, Literal)> {
        let n = self.sensorium.n_proper() as u32;
        let mut out = Vec::new();
        for a in 0..n {
            for b in self.up[a as usize].iter() {
                if b.0 < n && b.0 != a {
                    out.push((Literal(a), b));
                }
            }
        }
        out
    }

    /// Merges negligible literals into `ZERO`, ubiquitous ones into `ONE`
    /// and each class of mutually reachable literals into one literal.
    pub fn canonical_quotient(&self) -> Result<(WeakPocSet, PocMorphism), Error> {
        let n = self.sensorium.n_proper();
        for a in self.sensorium.proper_literals() {
            if self.is_negligible(a) && self.is_ubiquitous(a) {
                return Err(Error::SelfDual(a.0));
            }
        }
        let mut map: Vec<Option<Literal>> = alloc::vec![None; self.universe()];
        let mut sens = Sensorium::new();
        let mut reps: Vec<Literal> = Vec::new();
        for a in self.sensorium.proper_literals() {
            if map[a.index()].is_some() {
                continue;
            }
            if self.is_negligible(a) || self.is_ubiquitous(a) {
                continue;
            }
            let i = sens.add(self.sensorium.sensor_name(a.sensor()), self.sensorium.degree(a.sensor()));
            reps.push(a);
            for b in a.index()..n {
                let b = Literal(b as u32);
                if self.leq(a, b) && self.leq(b, a) {
                    map[b.index()] = Some(Literal::pos(i));
                    map[b.star().index()] = Some(Literal::neg(i));
                }
            }
        }
        let zero = sens.zero();
        let one = sens.one();
        let map: Vec<Literal> = (0..self.universe())
            .map(|i| {
                let a = Literal(i as u32);
                if let Some(m) = map[i] {
                    m
                } else if a == self.zero() || (self.sensorium.is_proper(a) && self.is_negligible(a)) {
                    zero
                } else {
                    one
                }
            })
            .collect();
        let mut rels = Vec::new();
        for (x, &a) in reps.iter().enumerate() {
            for (y, &b) in reps.iter().enumerate() {
                if x == y {
                    continue;
                }
                for (sa, la) in [(a, Literal::pos(x)), (a.star(), Literal::neg(x))] {
                    for (sb, lb) in [(b, Literal::pos(y)), (b.star(), Literal::neg(y))] {
                        if self.leq(sa, sb) {
                            rels.push((la, lb));
                        }
                    }
                }
            }
        }
        let q = WeakPocSet::from_generators(sens, &rels)?;
        Ok((q, PocMorphism { map }))
    }

    /// Disjoint union of two poc sets with no relations across. Literals of
    /// `q` are shifted past those of `self`.
    pub fn direct_sum(&self, q: &WeakPocSet) -> WeakPocSet {
        let mut sens = self.sensorium.clone();
        for i in 0..q.n_sensors() {
            sens.add(q.sensorium.sensor_name(i), q.sensorium.degree(i));
        }
        let rels = {
            let left = self.left_embedding(&sens);
            let right = q.right_embedding(self.n_sensors(), &sens);
            let mut rels: Vec<(Literal, Literal)> = self.generators.iter().map(|&(a, b)| (left(a), left(b))).collect();
            rels.extend(q.generators.iter().map(|&(a, b)| (right(a), right(b))));
            rels
        };
        WeakPocSet::from_generators(sens, &rels).expect("literals in range")
    }

    fn left_embedding<'a>(&'a self, sum: &'a Sensorium) -> impl Fn(Literal) -> Literal + 'a {
        move |a| {
            if a == self.zero() {
                sum.zero()
            } else if a == self.one() {
                sum.one()
            } else {
                a
            }
        }
    }

    fn right_embedding<'a>(&'a self, shift: usize, sum: &'a Sensorium) -> impl Fn(Literal) -> Literal + 'a {
        move |a| {
            if a == self.zero() {
                sum.zero()
            } else if a == self.one() {
                sum.one()
            } else {
                Literal(a.0 + 2 * shift as u32)
            }
        }
    }
}

/// A map of literal universes, indexed by source literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PocMorphism {
    pub map: Vec<Literal>,
}

impl PocMorphism {
    pub fn identity(p: &WeakPocSet) -> Self {
        PocMorphism { map: (0..p.universe() as u32).map(Literal).collect() }
    }

    #[inline]
    pub fn apply(&self, a: Literal) -> Literal {
        self.map[a.index()]
    }

    pub fn apply_set(&self, a: &LitSet, target_universe: usize) -> LitSet {
        LitSet::from_literals(target_universe, a.iter().map(|l| self.apply(l)))
    }

    /// Checks `f(a*) = f(a)*`, `f(0) = 0` and `a <= b => f(a) <= f(b)`.
    pub fn validate(&self, src: &WeakPocSet, dst: &WeakPocSet) -> Result<(), Error> {
        if self.map.len() != src.universe() {
            return Err(Error::SensoriumMismatch);
        }
        for (i, &b) in self.map.iter().enumerate() {
            let a = Literal(i as u32);
            if !dst.sensorium().contains(b) {
                return Err(Error::UnknownLiteral(b.0));
            }
            if self.apply(a.star()) != b.star() {
                return Err(Error::NotMorphism(format!("f({}*) != f({})*", a.0, a.0)));
            }
        }
        if self.apply(src.zero()) != dst.zero() {
            return Err(Error::NotMorphism(format!("f(0) = {}", self.apply(src.zero()).0)));
        }
        for i in 0..src.universe() {
            let a = Literal(i as u32);
            for b in src.up_of(a).iter() {
                if !dst.leq(self.apply(a), self.apply(b)) {
                    return Err(Error::NotMorphism(format!(
                        "{} <= {} but {} !<= {}",
                        src.sensorium().label(a),
                        src.sensorium().label(b),
                        dst.sensorium().label(self.apply(a)),
                        dst.sensorium().label(self.apply(b))
                    )));
                }
            }
        }
        Ok(())
    }

    /// Bijective on proper literals onto proper literals.
    pub fn is_bijective(&self, src: &WeakPocSet, dst: &WeakPocSet) -> bool {
        if src.n_sensors() != dst.n_sensors() {
            return false;
        }
        let mut hit = alloc::vec![false; dst.sensorium().n_proper()];
        for a in src.sensorium().proper_literals() {
            let b = self.apply(a);
            if !dst.sensorium().is_proper(b) || hit[b.index()] {
                return false;
            }
            hit[b.index()] = true;
        }
        true
    }
}
