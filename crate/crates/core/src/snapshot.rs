//! Snapshots: pairwise co-occurrence weights on the complete graph of
//! proper literals minus the `aa*` edges, learning thresholds, and a
//! coherent state.
//!
//! Weights are stored per unordered sensor pair `i < j` as four quadrants
//! indexed by `(polarity_i << 1) | polarity_j`, with polarity 1 for the
//! starred literal. Marginals `w_a = w_ab + w_ab*` are stored separately so
//! that they exist even for a single sensor.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::graph::PocGraph;
use crate::literal::{LitSet, Literal, Sensorium, StarSelection};
use crate::propagation;

/// Constraint tolerance for probabilistic snapshots.
pub const EPS: f64 = 1e-9;
/// Weights below this are zero when detecting equivalences.
pub const ZERO_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnapshotKind {
    /// Integer counts with a clock.
    Empirical,
    /// Real weights, updated by discounting.
    Probabilistic,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Weights {
    Counts { quad: Vec<[u64; 4]>, marg: Vec<u64> },
    Mass { quad: Vec<[f64; 4]>, marg: Vec<f64> },
}

/// Which defining constraint a snapshot breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    Consistency,
    Normalization,
    Orientation,
    State,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub constraint: Constraint,
    pub literals: Vec<Literal>,
    pub residual: f64,
}

#[inline]
pub fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

#[inline]
fn n_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Sensor pair `(i, j)`, `i < j`, and the quadrant of `w_ab`.
#[inline]
fn locate(a: Literal, b: Literal) -> (usize, usize) {
    let (x, y) = if a.sensor() < b.sensor() { (a, b) } else { (b, a) };
    let q = ((x.0 & 1) << 1 | (y.0 & 1)) as usize;
    (pair_index(x.sensor(), y.sensor()), q)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    sensorium: Sensorium,
    weights: Weights,
    tau: Vec<f64>,
    state: LitSet,
    clock: u64,
    equivalences: bool,
    graph: PocGraph,
    ops: u64,
}

impl Snapshot {
    /// All weights zero, clock zero, empty state.
    pub fn trivial(sensorium: Sensorium, tau: f64, kind: SnapshotKind) -> Result<Self, Error> {
        let n = sensorium.len();
        Self::trivial_with(sensorium, vec![tau; n_pairs(n)], kind)
    }

    /// Trivial snapshot with one threshold per sensor pair (indexed by
    /// [`pair_index`]).
    pub fn trivial_with(sensorium: Sensorium, tau: Vec<f64>, kind: SnapshotKind) -> Result<Self, Error> {
        let n = sensorium.len();
        if tau.len() != n_pairs(n) {
            return Err(Error::ShapeMismatch(tau.len(), n_pairs(n)));
        }
        for &t in &tau {
            if !(0.0..=0.25).contains(&t) {
                return Err(Error::BadThreshold(t));
            }
        }
        let weights = match kind {
            SnapshotKind::Empirical => Weights::Counts { quad: vec![[0; 4]; n_pairs(n)], marg: vec![0; 2 * n] },
            SnapshotKind::Probabilistic => Weights::Mass { quad: vec![[0.0; 4]; n_pairs(n)], marg: vec![0.0; 2 * n] },
        };
        let universe = sensorium.universe();
        Ok(Snapshot {
            sensorium,
            weights,
            tau,
            state: LitSet::new(universe),
            clock: 0,
            equivalences: true,
            graph: PocGraph::new(n),
            ops: 0,
        })
    }

    /// Rebuilds a snapshot from stored parts; the graph is re-derived.
    pub fn from_parts(
        sensorium: Sensorium,
        weights: Weights,
        tau: Vec<f64>,
        state: LitSet,
        clock: u64,
        equivalences: bool,
    ) -> Result<Self, Error> {
        let n = sensorium.len();
        let (ql, ml) = match &weights {
            Weights::Counts { quad, marg } => (quad.len(), marg.len()),
            Weights::Mass { quad, marg } => (quad.len(), marg.len()),
        };
        if ql != n_pairs(n) {
            return Err(Error::ShapeMismatch(ql, n_pairs(n)));
        }
        if ml != 2 * n {
            return Err(Error::ShapeMismatch(ml, 2 * n));
        }
        if state.universe() != sensorium.universe() {
            return Err(Error::ShapeMismatch(state.universe(), sensorium.universe()));
        }
        if !state.is_star_selection() {
            return Err(Error::NotStarSelection);
        }
        let kind = match weights {
            Weights::Counts { .. } => SnapshotKind::Empirical,
            Weights::Mass { .. } => SnapshotKind::Probabilistic,
        };
        let mut s = Self::trivial_with(sensorium, tau, kind)?;
        s.weights = weights;
        s.state = state;
        s.clock = clock;
        s.equivalences = equivalences;
        s.refresh_graph();
        Ok(s)
    }

    /// Probabilistic snapshot of a finite measure: each point carries a
    /// mass and a value for every sensor.
    pub fn from_measure(sensorium: Sensorium, tau: f64, points: &[(f64, Vec<bool>)]) -> Result<Self, Error> {
        let n = sensorium.len();
        let mut s = Self::trivial(sensorium, tau, SnapshotKind::Probabilistic)?;
        if let Weights::Mass { quad, marg } = &mut s.weights {
            for (m, vals) in points {
                if vals.len() != n {
                    return Err(Error::ShapeMismatch(vals.len(), n));
                }
                for i in 0..n {
                    marg[2 * i + usize::from(!vals[i])] += m;
                }
                for j in 1..n {
                    for i in 0..j {
                        let q = (usize::from(!vals[i]) << 1) | usize::from(!vals[j]);
                        quad[pair_index(i, j)][q] += m;
                    }
                }
            }
        }
        s.clock = 1;
        s.refresh_graph();
        Ok(s)
    }

    pub fn sensorium(&self) -> &Sensorium {
        &self.sensorium
    }

    pub fn n_sensors(&self) -> usize {
        self.sensorium.len()
    }

    pub fn kind(&self) -> SnapshotKind {
        match self.weights {
            Weights::Counts { .. } => SnapshotKind::Empirical,
            Weights::Mass { .. } => SnapshotKind::Probabilistic,
        }
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.tau
    }

    pub fn threshold(&self, a: Literal, b: Literal) -> f64 {
        self.tau[locate(a, b).0]
    }

    pub fn state(&self) -> &LitSet {
        &self.state
    }

    pub fn set_state(&mut self, state: LitSet) {
        self.state = state;
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    /// Derived graph, including equivalence edges when enabled.
    pub fn graph(&self) -> &PocGraph {
        &self.graph
    }

    pub fn equivalences(&self) -> bool {
        self.equivalences
    }

    /// Turns equivalence edges on or off and re-derives the graph.
    pub fn set_equivalences(&mut self, on: bool) {
        self.equivalences = on;
        self.refresh_graph();
    }

    /// Operation counter: pair visits in updates and derivation, plus
    /// propagation work.
    pub fn ops(&self) -> u64 {
        self.ops
    }

    /// Extended weight: `w_aa = w_a`, `w_aa* = 0`.
    pub fn weight(&self, a: Literal, b: Literal) -> f64 {
        if a.sensor() == b.sensor() {
            return if a == b { self.marginal(a) } else { 0.0 };
        }
        let (p, q) = locate(a, b);
        match &self.weights {
            Weights::Counts { quad, .. } => quad[p][q] as f64,
            Weights::Mass { quad, .. } => quad[p][q],
        }
    }

    pub fn count(&self, a: Literal, b: Literal) -> Option<u64> {
        match &self.weights {
            Weights::Counts { quad, marg } => Some(if a.sensor() == b.sensor() {
                if a == b {
                    marg[a.index()]
                } else {
                    0
                }
            } else {
                let (p, q) = locate(a, b);
                quad[p][q]
            }),
            Weights::Mass { .. } => None,
        }
    }

    pub fn marginal(&self, a: Literal) -> f64 {
        match &self.weights {
            Weights::Counts { marg, .. } => marg[a.index()] as f64,
            Weights::Mass { marg, .. } => marg[a.index()],
        }
    }

    fn check_observation(&self, o: &StarSelection) -> Result<(), Error> {
        if o.as_set().universe() != self.sensorium.universe() || !o.is_complete(self.n_sensors()) {
            return Err(Error::IncompleteObservation);
        }
        Ok(())
    }

    /// `w_ab += [a∈O][b∈O]`, clock += 1, then graph and state.
    pub fn empirical_update(&mut self, o: &StarSelection) -> Result<(), Error> {
        self.check_observation(o)?;
        let n = self.n_sensors();
        let Weights::Counts { quad, marg } = &mut self.weights else {
            return Err(Error::WrongKind("empirical"));
        };
        let pol: Vec<usize> = (0..n).map(|i| usize::from(o.as_set().contains(Literal::neg(i)))).collect();
        for i in 0..n {
            marg[2 * i + pol[i]] += 1;
        }
        let mut idx = 0;
        for j in 1..n {
            let pj = pol[j];
            for &pi in &pol[..j] {
                quad[idx][(pi << 1) | pj] += 1;
                idx += 1;
            }
        }
        self.ops += idx as u64 + n as u64;
        self.clock += 1;
        self.refresh_graph();
        self.load(o.as_set());
        Ok(())
    }

    /// `w <- q w + (1 - q) indicator`, truncation, then graph and state.
    pub fn discounted_update(&mut self, o: &StarSelection, q: f64) -> Result<(), Error> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::DecayOutOfRange(q));
        }
        self.check_observation(o)?;
        let n = self.n_sensors();
        let Weights::Mass { quad, marg } = &mut self.weights else {
            return Err(Error::WrongKind("probabilistic"));
        };
        let p = 1.0 - q;
        let pol: Vec<usize> = (0..n).map(|i| usize::from(o.as_set().contains(Literal::neg(i)))).collect();
        for i in 0..n {
            marg[2 * i] *= q;
            marg[2 * i + 1] *= q;
            marg[2 * i + pol[i]] += p;
        }
        let mut idx = 0;
        for j in 1..n {
            let pj = pol[j];
            for &pi in &pol[..j] {
                let w = &mut quad[idx];
                for x in w.iter_mut() {
                    *x *= q;
                }
                w[(pi << 1) | pj] += p;
                idx += 1;
            }
        }
        self.ops += idx as u64 + n as u64;
        self.clock += 1;
        self.truncate_weights();
        self.refresh_graph();
        self.load(o.as_set());
        Ok(())
    }

    /// Sets the state to `propagate(graph, ∅, O)` without touching weights.
    pub fn load(&mut self, o: &LitSet) {
        let mut ops = 0;
        self.state = propagation::propagate_counted(&self.graph, &self.graph.empty_set(), o, &mut ops);
        self.ops += ops;
    }

    fn threshold_scale(&self) -> f64 {
        match self.weights {
            Weights::Counts { .. } => self.clock as f64,
            Weights::Mass { .. } => 1.0,
        }
    }

    fn quad_f64(&self, p: usize) -> [f64; 4] {
        match &self.weights {
            Weights::Counts { quad, .. } => quad[p].map(|x| x as f64),
            Weights::Mass { quad, .. } => quad[p],
        }
    }

    /// Orientation of sensor pair `(i, j)` qualifying for an edge: returns
    /// `(pa, pb)` so that `a -> b` is an edge with `a` of polarity `pa` on
    /// sensor `i` and `b` of polarity `pb` on sensor `j`.
    #[inline]
    fn qualifying(w: &[f64; 4], tau: f64) -> Option<(usize, usize)> {
        for pa in 0..2 {
            for pb in 0..2 {
                let small = w[(pa << 1) | (pb ^ 1)];
                let others = [w[(pa << 1) | pb], w[((pa ^ 1) << 1) | pb], w[((pa ^ 1) << 1) | (pb ^ 1)]];
                if small < tau && others.iter().all(|&x| small < x) {
                    return Some((pa, pb));
                }
            }
        }
        None
    }

    /// Edge `ab` iff `w_ab* < min(τ_ab·scale, w_ab, w_a*b, w_a*b*)`, where the
    /// scale is the clock for empirical snapshots and 1 otherwise.
    pub fn derive_poc_graph(&self) -> PocGraph {
        let n = self.n_sensors();
        let scale = self.threshold_scale();
        let mut g = PocGraph::new(n);
        let mut idx = 0;
        for j in 1..n {
            for i in 0..j {
                let w = self.quad_f64(idx);
                if let Some((pa, pb)) = Self::qualifying(&w, self.tau[idx] * scale) {
                    let a = Literal((2 * i + pa) as u32);
                    let b = Literal((2 * j + pb) as u32);
                    g.push_edge(a, b);
                    g.push_edge(b.star(), a.star());
                }
                idx += 1;
            }
        }
        g
    }

    fn equivalence_pairs(&self) -> Vec<(Literal, Literal)> {
        let n = self.n_sensors();
        let mut out = Vec::new();
        let mut idx = 0;
        for j in 1..n {
            for i in 0..j {
                let w = self.quad_f64(idx);
                for pb in 0..2 {
                    // a = pos(i), b of polarity pb: need w_ab* = w_a*b = 0.
                    if w[pb ^ 1] < ZERO_EPS && w[(1 << 1) | pb] < ZERO_EPS {
                        out.push((Literal::pos(i), Literal((2 * j + pb) as u32)));
                    }
                }
                idx += 1;
            }
        }
        out
    }

    fn add_equivalences(&self, g: &mut PocGraph) {
        for (a, b) in self.equivalence_pairs() {
            g.push_edge(a, b);
            g.push_edge(b, a);
            g.push_edge(a.star(), b.star());
            g.push_edge(b.star(), a.star());
        }
    }

    /// Adds both directions for each pair with `w_ab* = w_a*b = 0`, after
    /// checking the triangle inequality.
    pub fn extend_with_equivalences(&self, g: &PocGraph) -> Result<PocGraph, Error> {
        self.check_triangle()?;
        let mut out = g.clone();
        for (a, b) in self.equivalence_pairs() {
            out.add_edge(a, b);
            out.add_edge(b, a);
            out.add_edge(a.star(), b.star());
            out.add_edge(b.star(), a.star());
        }
        Ok(out)
    }

    fn refresh_graph(&mut self) {
        let mut g = self.derive_poc_graph();
        if self.equivalences {
            self.add_equivalences(&mut g);
        }
        self.ops += n_pairs(self.n_sensors()) as u64;
        self.graph = g;
    }

    fn truncate_weights(&mut self) -> usize {
        let n = self.n_sensors();
        let Weights::Mass { quad, .. } = &mut self.weights else {
            return 0;
        };
        let mut count = 0;
        let mut idx = 0;
        for _j in 1..n {
            for _i in 0.._j {
                let w = &mut quad[idx];
                if let Some((pa, pb)) = Self::qualifying(w, self.tau[idx]) {
                    let s = w[(pa << 1) | (pb ^ 1)];
                    if s != 0.0 {
                        w[(pa << 1) | (pb ^ 1)] = 0.0;
                        w[(pa << 1) | pb] += s;
                        w[((pa ^ 1) << 1) | (pb ^ 1)] += s;
                        w[((pa ^ 1) << 1) | pb] -= s;
                        count += 1;
                    }
                }
                idx += 1;
            }
        }
        count
    }

    /// Moves the mass of `w_ab*` into `w_ab` and `w_a*b*` (taking it from
    /// `w_a*b`) for every pair carrying an edge `ab`. Returns the number of
    /// squares changed.
    pub fn truncate(&mut self) -> Result<usize, Error> {
        if self.kind() != SnapshotKind::Probabilistic {
            return Err(Error::WrongKind("probabilistic"));
        }
        let c = self.truncate_weights();
        self.refresh_graph();
        Ok(c)
    }

    /// `ori_ab = w_a*b − w_ab*` on extended weights.
    pub fn orientation_cocycle(&self, a: Literal, b: Literal) -> f64 {
        self.weight(a.star(), b) - self.weight(a, b.star())
    }

    /// Checks consistency, normalization, the orientation cocycle and
    /// coherence of the state.
    pub fn check_probabilistic(&self) -> Result<(), Violation> {
        let n = self.n_sensors();
        let lits: Vec<Literal> = self.sensorium.proper_literals().collect();
        for &a in &lits {
            let wa = self.marginal(a);
            for &b in &lits {
                if b.sensor() == a.sensor() {
                    continue;
                }
                let r = self.weight(a, b) + self.weight(a, b.star()) - wa;
                if r.abs() > EPS {
                    return Err(Violation { constraint: Constraint::Consistency, literals: vec![a, b], residual: r });
                }
            }
            let r = wa + self.marginal(a.star()) - 1.0;
            if r.abs() > EPS {
                return Err(Violation { constraint: Constraint::Normalization, literals: vec![a], residual: r });
            }
        }
        for j in 1..n {
            for i in 0..j {
                let w = self.quad_f64(pair_index(i, j));
                let r = w.iter().sum::<f64>() - 1.0;
                if r.abs() > EPS {
                    return Err(Violation {
                        constraint: Constraint::Normalization,
                        literals: vec![Literal::pos(i), Literal::pos(j)],
                        residual: r,
                    });
                }
            }
        }
        for &a in &lits {
            for &b in &lits {
                if b.sensor() <= a.sensor() {
                    continue;
                }
                for &c in &lits {
                    if c.sensor() <= b.sensor() {
                        continue;
                    }
                    let lhs = self.weight(a.star(), b) + self.weight(b.star(), c) + self.weight(c.star(), a);
                    let rhs = self.weight(a, b.star()) + self.weight(b, c.star()) + self.weight(c, a.star());
                    if (lhs - rhs).abs() > EPS {
                        return Err(Violation {
                            constraint: Constraint::Orientation,
                            literals: vec![a, b, c],
                            residual: lhs - rhs,
                        });
                    }
                }
            }
        }
        self.check_state()
    }

    fn check_state(&self) -> Result<(), Violation> {
        let s = &self.state;
        if !s.is_star_selection() {
            return Err(Violation { constraint: Constraint::State, literals: Vec::new(), residual: 0.0 });
        }
        let up = propagation::closure(&self.graph, s);
        let bad = up.intersection(&s.star());
        if let Some(l) = bad.iter().next() {
            return Err(Violation { constraint: Constraint::State, literals: vec![l], residual: 0.0 });
        }
        Ok(())
    }

    pub fn is_probabilistic(&self) -> bool {
        self.check_probabilistic().is_ok()
    }

    /// `Δ_ac <= Δ_ab + Δ_bc` with `Δ_ab = w_a*b + w_ab*`, over all proper
    /// literal triples.
    pub fn check_triangle(&self) -> Result<(), Error> {
        let lits: Vec<Literal> = self.sensorium.proper_literals().collect();
        let m = lits.len();
        let mut d = vec![0.0; m * m];
        for &a in &lits {
            for &b in &lits {
                d[a.index() * m + b.index()] = self.weight(a.star(), b) + self.weight(a, b.star());
            }
        }
        let tol = EPS * (1.0 + self.clock as f64);
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if d[a * m + c] > d[a * m + b] + d[b * m + c] + tol {
                        return Err(Error::TriangleViolated(a as u32, b as u32, c as u32));
                    }
                }
            }
        }
        Ok(())
    }

    /// Probabilistic copy with every weight divided by the clock.
    pub fn normalized(&self) -> Result<Snapshot, Error> {
        let Weights::Counts { quad, marg } = &self.weights else {
            return Err(Error::WrongKind("empirical"));
        };
        let t = self.clock.max(1) as f64;
        let weights = Weights::Mass {
            quad: quad.iter().map(|w| w.map(|x| x as f64 / t)).collect(),
            marg: marg.iter().map(|&x| x as f64 / t).collect(),
        };
        let mut s = Snapshot::from_parts(
            self.sensorium.clone(),
            weights,
            self.tau.clone(),
            self.state.clone(),
            1,
            self.equivalences,
        )?;
        s.state = self.state.clone();
        Ok(s)
    }

    /// Integer weights, `w_a` independent of the partner sensor and
    /// vanishing only off the state, and a constant clock.
    pub fn is_empirical(&self) -> bool {
        let Weights::Counts { quad, marg } = &self.weights else {
            return false;
        };
        let n = self.n_sensors();
        for i in 0..n {
            if marg[2 * i] + marg[2 * i + 1] != self.clock {
                return false;
            }
            for pol in 0..2 {
                let a = Literal((2 * i + pol) as u32);
                if marg[a.index()] == 0 && self.state.contains(a) {
                    return false;
                }
            }
        }
        for j in 1..n {
            for i in 0..j {
                let w = quad[pair_index(i, j)];
                // rows of i
                if w[0] + w[1] != marg[2 * i] || w[2] + w[3] != marg[2 * i + 1] {
                    return false;
                }
                // rows of j
                if w[0] + w[2] != marg[2 * j] || w[1] + w[3] != marg[2 * j + 1] {
                    return false;
                }
            }
        }
        true
    }

    /// Complete observations `O` with `w_ab >= 1` for all `a, b ∈ O`
    /// (and `w_a >= 1`), optionally containing the state. At most `limit`.
    pub fn candidate_observations(&self, respect_state: bool, limit: usize) -> Vec<LitSet> {
        let n = self.n_sensors();
        let mut out = Vec::new();
        let Weights::Counts { .. } = &self.weights else {
            return out;
        };
        let mut chosen: Vec<Literal> = Vec::with_capacity(n);
        self.search_observations(respect_state, limit, &mut chosen, &mut out);
        out
    }

    fn search_observations(&self, respect: bool, limit: usize, chosen: &mut Vec<Literal>, out: &mut Vec<LitSet>) {
        if out.len() >= limit {
            return;
        }
        let i = chosen.len();
        if i == self.n_sensors() {
            out.push(LitSet::from_literals(self.sensorium.universe(), chosen.iter().copied()));
            return;
        }
        let (p, m) = (Literal::pos(i), Literal::neg(i));
        let mut opts: Vec<Literal> = if respect && self.state.contains(p) {
            vec![p]
        } else if respect && self.state.contains(m) {
            vec![m]
        } else if self.marginal(p) >= self.marginal(m) {
            vec![p, m]
        } else {
            vec![m, p]
        };
        opts.retain(|&a| {
            self.count(a, a).unwrap_or(0) >= 1 && chosen.iter().all(|&b| self.count(a, b).unwrap_or(0) >= 1)
        });
        for a in opts {
            chosen.push(a);
            self.search_observations(respect, limit, chosen, out);
            chosen.pop();
        }
    }

    /// Snapshot `T` with `T` updated by `O` equal to `self` in weights.
    fn predecessor(&self, o: &LitSet) -> Snapshot {
        let n = self.n_sensors();
        let mut t = self.clone();
        if let Weights::Counts { quad, marg } = &mut t.weights {
            let pol: Vec<usize> = (0..n).map(|i| usize::from(o.contains(Literal::neg(i)))).collect();
            for i in 0..n {
                marg[2 * i + pol[i]] -= 1;
            }
            for j in 1..n {
                for i in 0..j {
                    quad[pair_index(i, j)][(pol[i] << 1) | pol[j]] -= 1;
                }
            }
            let mut state = LitSet::new(self.sensorium.universe());
            for i in 0..n {
                if marg[2 * i] > marg[2 * i + 1] {
                    state.insert(Literal::pos(i));
                } else if marg[2 * i + 1] > marg[2 * i] {
                    state.insert(Literal::neg(i));
                }
            }
            t.state = state;
        }
        t.clock -= 1;
        t.refresh_graph();
        t
    }

    /// Inverts one empirical update: returns a predecessor `T` and a complete
    /// observation `O` containing the state with `O * T` equal to `self` in
    /// weights. `None` for the trivial snapshot or when no such `O` exists.
    pub fn decompose_evolution(&self) -> Option<(Snapshot, StarSelection)> {
        if self.kind() != SnapshotKind::Empirical || self.clock == 0 || !self.is_empirical() {
            return None;
        }
        let o = self.candidate_observations(true, 1).pop()?;
        Some((self.predecessor(&o), StarSelection::new(o).ok()?))
    }

    /// Full inversion to the trivial snapshot with backtracking over the
    /// choice of observation. Returns the observations in update order.
    pub fn decompose_to_trivial(&self, budget: usize) -> Option<Vec<StarSelection>> {
        if self.kind() != SnapshotKind::Empirical || !self.is_empirical() {
            return None;
        }
        let mut budget = budget;
        let mut path = Vec::new();
        if self.unwind(true, &vec![true; self.n_sensors()], &mut budget, &mut path) {
            path.reverse();
            Some(path.into_iter().map(|o| StarSelection::new(o).expect("complete selection")).collect())
        } else {
            None
        }
    }

    /// Polarity pattern of a complete observation, `true` for starred.
    fn pattern(&self, o: &LitSet) -> Vec<bool> {
        (0..self.n_sensors()).map(|i| o.contains(Literal::neg(i))).collect()
    }

    /// Every pair quadrant with positive count lies in some candidate.
    fn covered_by(&self, cands: &[LitSet]) -> bool {
        let Weights::Counts { quad, .. } = &self.weights else {
            return false;
        };
        let n = self.n_sensors();
        let mut seen = vec![[false; 4]; quad.len()];
        for o in cands {
            let pol: Vec<usize> = (0..n).map(|i| usize::from(o.contains(Literal::neg(i)))).collect();
            for j in 1..n {
                for i in 0..j {
                    seen[pair_index(i, j)][(pol[i] << 1) | pol[j]] = true;
                }
            }
        }
        quad.iter().zip(&seen).all(|(w, s)| (0..4).all(|k| w[k] == 0 || s[k]))
    }

    // Weights do not depend on the order of updates, so only the last
    // observation (which must contain the state) is free; earlier ones are
    // removed in non-increasing pattern order.
    fn unwind(&self, last: bool, bound: &[bool], budget: &mut usize, path: &mut Vec<LitSet>) -> bool {
        if self.clock == 0 {
            return true;
        }
        let mut cands = self.candidate_observations(last, usize::MAX);
        if !last {
            cands.retain(|o| self.pattern(o).as_slice() <= bound);
            if !self.covered_by(&cands) {
                return false;
            }
        }
        for o in cands {
            let key = self.pattern(&o);
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            let t = self.predecessor(&o);
            path.push(o);
            let next = if last { bound } else { key.as_slice() };
            if t.unwind(false, next, budget, path) {
                return true;
            }
            path.pop();
        }
        false
    }
}
