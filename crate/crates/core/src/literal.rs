//! Literals, sensoria and literal bitsets.
//!
//! Sensor `i` owns the literals `2i` (the sensor) and `2i + 1` (its
//! complement). In a sensorium of `n` sensors the virtual literals are
//! `ZERO = 2n` and `ONE = 2n + 1`, so `star` is a single XOR for every
//! literal.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;

/// A literal index. Meaningful only relative to a [`Sensorium`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Literal(pub u32);

impl Literal {
    /// Positive literal of sensor `i`.
    #[inline]
    pub const fn pos(i: usize) -> Literal {
        Literal((2 * i) as u32)
    }

    /// Starred literal of sensor `i`.
    #[inline]
    pub const fn neg(i: usize) -> Literal {
        Literal((2 * i + 1) as u32)
    }

    /// The involution.
    #[inline]
    pub const fn star(self) -> Literal {
        Literal(self.0 ^ 1)
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    /// Sensor owning this literal.
    #[inline]
    pub const fn sensor(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub const fn is_starred(self) -> bool {
        self.0 & 1 == 1
    }
}

/// Order of a sensor: state sensors read the current position, transition
/// sensors read the last transition.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Degree {
    State,
    Transition,
}

/// A finite set of named sensors.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Sensorium {
    names: Vec<String>,
    degrees: Vec<Degree>,
}

impl Sensorium {
    pub fn new() -> Self {
        Self::default()
    }

    /// `n` state sensors named `s0, s1, ...`.
    pub fn anonymous(n: usize) -> Self {
        let mut s = Self::new();
        for i in 0..n {
            s.add(alloc::format!("s{i}"), Degree::State);
        }
        s
    }

    /// State sensors with the given names.
    pub fn named<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut s = Self::new();
        for n in names {
            s.add(n, Degree::State);
        }
        s
    }

    /// Appends a sensor and returns its index.
    pub fn add(&mut self, name: impl Into<String>, degree: Degree) -> usize {
        self.names.push(name.into());
        self.degrees.push(degree);
        self.names.len() - 1
    }

    /// Number of sensors (proper pairs).
    #[inline]
    pub fn len(&self) -> usize {
        self.names.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Number of proper literals.
    #[inline]
    pub fn n_proper(&self) -> usize {
        2 * self.names.len()
    }

    /// Proper literals plus `ZERO` and `ONE`.
    #[inline]
    pub fn universe(&self) -> usize {
        2 * self.names.len() + 2
    }

    #[inline]
    pub fn zero(&self) -> Literal {
        Literal((2 * self.names.len()) as u32)
    }

    #[inline]
    pub fn one(&self) -> Literal {
        Literal((2 * self.names.len() + 1) as u32)
    }

    #[inline]
    pub fn is_proper(&self, l: Literal) -> bool {
        l.index() < self.n_proper()
    }

    pub fn contains(&self, l: Literal) -> bool {
        l.index() < self.universe()
    }

    pub fn check(&self, l: Literal) -> Result<Literal, Error> {
        if self.contains(l) {
            Ok(l)
        } else {
            Err(Error::UnknownLiteral(l.0))
        }
    }

    pub fn degree(&self, sensor: usize) -> Degree {
        self.degrees[sensor]
    }

    pub fn sensor_name(&self, sensor: usize) -> &str {
        &self.names[sensor]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Text form: `name`, `name*`, `0` or `1`.
    pub fn label(&self, l: Literal) -> String {
        if l == self.zero() {
            return String::from("0");
        }
        if l == self.one() {
            return String::from("1");
        }
        let mut s = self.names[l.sensor()].clone();
        if l.is_starred() {
            s.push('*');
        }
        s
    }

    /// Inverse of [`Sensorium::label`].
    pub fn parse(&self, text: &str) -> Result<Literal, Error> {
        let t = text.trim();
        match t {
            "0" => return Ok(self.zero()),
            "1" => return Ok(self.one()),
            _ => {}
        }
        let (base, starred) = match t.strip_suffix('*') {
            Some(b) => (b, true),
            None => (t, false),
        };
        let i = self.names.iter().position(|n| n == base).ok_or_else(|| Error::UnknownName(String::from(t)))?;
        Ok(if starred { Literal::neg(i) } else { Literal::pos(i) })
    }

    pub fn proper_literals(&self) -> impl Iterator<Item = Literal> {
        (0..self.n_proper() as u32).map(Literal)
    }
}

/// Fixed-universe bitset of literals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LitSet {
    words: Vec<u64>,
    universe: usize,
}

const EVEN: u64 = 0x5555_5555_5555_5555;

impl LitSet {
    pub fn new(universe: usize) -> Self {
        LitSet { words: vec![0; universe.div_ceil(64)], universe }
    }

    pub fn from_literals<I: IntoIterator<Item = Literal>>(universe: usize, it: I) -> Self {
        let mut s = Self::new(universe);
        for l in it {
            s.insert(l);
        }
        s
    }

    /// Every literal of the universe.
    pub fn full(universe: usize) -> Self {
        let mut s = Self::new(universe);
        for i in 0..universe {
            s.insert(Literal(i as u32));
        }
        s
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn insert(&mut self, l: Literal) {
        let i = l.index();
        debug_assert!(i < self.universe);
        self.words[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    pub fn remove(&mut self, l: Literal) {
        let i = l.index();
        self.words[i >> 6] &= !(1 << (i & 63));
    }

    #[inline]
    pub fn contains(&self, l: Literal) -> bool {
        let i = l.index();
        i < self.universe && (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> LitIter<'_> {
        LitIter { words: &self.words, idx: 0, cur: self.words.first().copied().unwrap_or(0) }
    }

    /// Image under the involution.
    pub fn star(&self) -> LitSet {
        let words = self.words.iter().map(|&w| ((w & EVEN) << 1) | ((w >> 1) & EVEN)).collect();
        LitSet { words, universe: self.universe }
    }

    pub fn union_with(&mut self, o: &LitSet) {
        debug_assert_eq!(self.universe, o.universe);
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, o: &LitSet) {
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, o: &LitSet) {
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a &= !b;
        }
    }

    pub fn union(&self, o: &LitSet) -> LitSet {
        let mut s = self.clone();
        s.union_with(o);
        s
    }

    pub fn intersection(&self, o: &LitSet) -> LitSet {
        let mut s = self.clone();
        s.intersect_with(o);
        s
    }

    pub fn difference(&self, o: &LitSet) -> LitSet {
        let mut s = self.clone();
        s.difference_with(o);
        s
    }

    pub fn is_subset(&self, o: &LitSet) -> bool {
        self.words.iter().zip(&o.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, o: &LitSet) -> bool {
        self.words.iter().zip(&o.words).all(|(a, b)| a & b == 0)
    }

    pub fn intersection_len(&self, o: &LitSet) -> usize {
        self.words.iter().zip(&o.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    /// Holds at most one literal of each pair.
    pub fn is_star_selection(&self) -> bool {
        self.words.iter().all(|&w| (w & (w >> 1) & EVEN) == 0)
    }

    /// Holds exactly one literal of each of the first `n_sensors` pairs.
    pub fn is_complete(&self, n_sensors: usize) -> bool {
        self.is_star_selection()
            && (0..n_sensors).all(|i| self.contains(Literal::pos(i)) || self.contains(Literal::neg(i)))
    }

    /// The same literals in a larger or smaller universe; literals outside
    /// the new universe are dropped.
    pub fn resized(&self, universe: usize) -> LitSet {
        LitSet::from_literals(universe, self.iter().filter(|l| l.index() < universe))
    }

    /// Restriction to proper literals of an `n`-sensor sensorium.
    pub fn proper_part(&self, n_sensors: usize) -> LitSet {
        let mut s = self.clone();
        s.remove(Literal((2 * n_sensors) as u32));
        s.remove(Literal((2 * n_sensors + 1) as u32));
        s
    }
}

impl fmt::Debug for LitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|l| l.0)).finish()
    }
}

pub struct LitIter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for LitIter<'_> {
    type Item = Literal;

    #[inline]
    fn next(&mut self) -> Option<Literal> {
        loop {
            if self.cur != 0 {
                let b = self.cur.trailing_zeros();
                self.cur &= self.cur - 1;
                return Some(Literal((self.idx * 64) as u32 + b));
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

/// A validated *-selection of literals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StarSelection(LitSet);

impl StarSelection {
    pub fn new(set: LitSet) -> Result<Self, Error> {
        if set.is_star_selection() {
            Ok(StarSelection(set))
        } else {
            Err(Error::NotStarSelection)
        }
    }

    /// Complete selection from one value per sensor.
    pub fn from_values(values: &[bool]) -> Self {
        let mut s = LitSet::new(2 * values.len() + 2);
        for (i, &v) in values.iter().enumerate() {
            s.insert(if v { Literal::pos(i) } else { Literal::neg(i) });
        }
        StarSelection(s)
    }

    pub fn is_complete(&self, n_sensors: usize) -> bool {
        self.0.is_complete(n_sensors)
    }

    pub fn as_set(&self) -> &LitSet {
        &self.0
    }

    pub fn into_set(self) -> LitSet {
        self.0
    }
}
