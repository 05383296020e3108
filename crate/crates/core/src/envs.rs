//! Deterministic test environments with place fields and exact ground truth.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::Error;
use crate::graph::PocGraph;
use crate::literal::{Literal, Sensorium};
use crate::snapshot::{Snapshot, SnapshotKind};

#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    name: String,
    /// Coordinates of each position, for display and grid lookups.
    coords: Vec<(usize, usize)>,
    action_names: Vec<String>,
    /// `trans[x][α]`
    trans: Vec<Vec<usize>>,
    field_names: Vec<String>,
    /// `fields[i][x]`: sensor `i` is on at position `x`.
    fields: Vec<Vec<bool>>,
    position: usize,
    target: Option<usize>,
    dist: Vec<usize>,
}

impl Environment {
    fn new(name: String, coords: Vec<(usize, usize)>, action_names: Vec<String>, trans: Vec<Vec<usize>>) -> Self {
        Environment {
            name,
            coords,
            action_names,
            trans,
            field_names: Vec::new(),
            fields: Vec::new(),
            position: 0,
            target: None,
            dist: Vec::new(),
        }
    }

    /// Positions `0..=l`, sensors `a_k` (k = 1..=l) on iff `pos < k`,
    /// moves `fwd`/`back` clamped at the ends.
    pub fn path(l: usize) -> Self {
        let trans = (0..=l).map(|x| vec![(x + 1).min(l), x.saturating_sub(1)]).collect();
        let mut env = Self::new(
            format!("path({l})"),
            (0..=l).map(|x| (x, 0)).collect(),
            vec!["fwd".into(), "back".into()],
            trans,
        );
        for k in 1..=l {
            env.push_field(format!("a{k}"), (0..=l).map(|x| x < k).collect());
        }
        env
    }

    /// Cycle of `n` positions with beacons `U_i = {i-1, i, i+1}`.
    pub fn cycle(n: usize) -> Self {
        let trans = (0..n).map(|x| vec![(x + 1) % n, (x + n - 1) % n]).collect();
        let mut env = Self::new(
            format!("cycle({n})"),
            (0..n).map(|x| (x, 0)).collect(),
            vec!["fwd".into(), "back".into()],
            trans,
        );
        for i in 0..n {
            env.push_field(format!("u{i}"), (0..n).map(|x| cyc_dist(x, i, n) <= 1).collect());
        }
        env
    }

    /// The cycle used for navigation.
    pub fn circular_rail(n: usize) -> Result<Self, Error> {
        if n < 4 {
            return Err(Error::Invalid(format!("rail needs at least 4 positions, got {n}")));
        }
        let mut env = Self::cycle(n);
        env.name = format!("rail({n})");
        Ok(env)
    }

    /// Positions `(ξ, η) ∈ [0, w] × [0, h]` with axis threshold sensors
    /// `x_k: ξ < k`, `y_k: η < k` and four clamped moves.
    pub fn grid(w: usize, h: usize) -> Self {
        Self::grid_inner(w, h, None)
    }

    fn grid_inner(w: usize, h: usize, hole: Option<(usize, usize)>) -> Self {
        let mut coords = Vec::new();
        for eta in 0..=h {
            for xi in 0..=w {
                if Some((xi, eta)) != hole {
                    coords.push((xi, eta));
                }
            }
        }
        let id = |c: (usize, usize)| coords.iter().position(|&d| d == c);
        let trans = coords
            .iter()
            .enumerate()
            .map(|(x, &(xi, eta))| {
                let moves = [
                    ((xi + 1).min(w), eta),
                    (xi.saturating_sub(1), eta),
                    (xi, (eta + 1).min(h)),
                    (xi, eta.saturating_sub(1)),
                ];
                moves.iter().map(|&m| id(m).unwrap_or(x)).collect()
            })
            .collect();
        let mut env = Self::new(
            format!("grid({w},{h})"),
            coords.clone(),
            vec!["east".into(), "west".into(), "north".into(), "south".into()],
            trans,
        );
        for k in 1..=w {
            env.push_field(format!("x{k}"), coords.iter().map(|c| c.0 < k).collect());
        }
        for k in 1..=h {
            env.push_field(format!("y{k}"), coords.iter().map(|c| c.1 < k).collect());
        }
        env
    }

    /// `grid(n, n)` with the interior vertex `v0` removed; moves into it fail.
    pub fn punctured_grid(n: usize, v0: (usize, usize)) -> Result<Self, Error> {
        if n < 4 {
            return Err(Error::Invalid(format!("punctured grid needs n >= 4, got {n}")));
        }
        let (xi, eta) = v0;
        if xi > n || eta > n {
            return Err(Error::Invalid(format!("vertex ({xi}, {eta}) outside the grid")));
        }
        if xi == 0 || eta == 0 || xi == n || eta == n {
            return Err(Error::BoundaryPuncture(eta * (n + 1) + xi));
        }
        let mut env = Self::grid_inner(n, n, Some(v0));
        env.name = format!("punctured_grid({n},{xi},{eta})");
        Ok(env)
    }

    /// The path's positions and moves with `l` independent uniformly random
    /// place fields.
    pub fn random_fields<R: Rng + ?Sized>(l: usize, rng: &mut R) -> Self {
        let mut env = Self::path(l);
        env.name = format!("random({l})");
        env.fields.clear();
        env.field_names.clear();
        for k in 1..=l {
            let f = (0..=l).map(|_| rng.random_bool(0.5)).collect();
            env.push_field(format!("r{k}"), f);
        }
        env
    }

    /// Adds an action that stays in place.
    pub fn with_wait(mut self) -> Self {
        self.action_names.push("wait".into());
        for (x, t) in self.trans.iter_mut().enumerate() {
            t.push(x);
        }
        self
    }

    fn push_field(&mut self, name: String, f: Vec<bool>) {
        self.field_names.push(name);
        self.fields.push(f);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_positions(&self) -> usize {
        self.trans.len()
    }

    pub fn coords(&self, x: usize) -> (usize, usize) {
        self.coords[x]
    }

    pub fn position_of(&self, c: (usize, usize)) -> Option<usize> {
        self.coords.iter().position(|&d| d == c)
    }

    pub fn n_actions(&self) -> usize {
        self.action_names.len()
    }

    pub fn action_names(&self) -> &[String] {
        &self.action_names
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.action_names.iter().position(|a| a == name)
    }

    pub fn n_fields(&self) -> usize {
        self.fields.len()
    }

    pub fn field_names(&self) -> &[String] {
        &self.field_names
    }

    pub fn field(&self, i: usize, x: usize) -> bool {
        self.fields[i][x]
    }

    pub fn fields(&self) -> &[Vec<bool>] {
        &self.fields
    }

    /// Sensorium of the place fields, all of degree 0.
    pub fn sensorium(&self) -> Sensorium {
        Sensorium::named(self.field_names.iter().cloned())
    }

    /// Complete observation of the fields at `x`.
    pub fn values_at(&self, x: usize) -> Vec<bool> {
        self.fields.iter().map(|f| f[x]).collect()
    }

    pub fn transition(&self, x: usize, action: usize) -> usize {
        self.trans[x][action]
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn set_position(&mut self, x: usize) {
        assert!(x < self.n_positions());
        self.position = x;
    }

    /// Applies an action and returns the new position.
    pub fn step(&mut self, action: usize) -> usize {
        self.position = self.trans[self.position][action];
        self.position
    }

    pub fn target(&self) -> Option<usize> {
        self.target
    }

    /// Sets the target and caches distances to it.
    pub fn set_target(&mut self, x: usize) {
        assert!(x < self.n_positions());
        self.target = Some(x);
        self.dist = self.distances_to(x);
    }

    /// Hop distance to the target; 0 without a target.
    pub fn distance(&self) -> usize {
        self.distance_from(self.position)
    }

    pub fn distance_from(&self, x: usize) -> usize {
        if self.target.is_some() {
            self.dist[x]
        } else {
            0
        }
    }

    /// BFS distances to `y` along actions (`usize::MAX` if unreachable).
    pub fn distances_to(&self, y: usize) -> Vec<usize> {
        let n = self.n_positions();
        let mut rev = vec![Vec::new(); n];
        for (x, t) in self.trans.iter().enumerate() {
            for &z in t {
                rev[z].push(x);
            }
        }
        let mut d = vec![usize::MAX; n];
        d[y] = 0;
        let mut q = VecDeque::from([y]);
        while let Some(z) = q.pop_front() {
            for &x in &rev[z] {
                if d[x] == usize::MAX {
                    d[x] = d[z] + 1;
                    q.push_back(x);
                }
            }
        }
        d
    }

    pub fn is_connected(&self) -> bool {
        (0..self.n_positions()).all(|y| self.distances_to(y).iter().all(|&d| d != usize::MAX))
    }

    /// Every move `x -> y` can be undone by some action.
    pub fn is_reversible(&self) -> bool {
        self.trans.iter().enumerate().all(|(x, t)| t.iter().all(|&y| self.trans[y].contains(&x)))
    }

    /// Transition matrix of the uniform-action walk, row-major.
    pub fn walk_matrix(&self) -> Vec<f64> {
        let n = self.n_positions();
        let p = 1.0 / self.n_actions() as f64;
        let mut m = vec![0.0; n * n];
        for (x, t) in self.trans.iter().enumerate() {
            for &y in t {
                m[x * n + y] += p;
            }
        }
        m
    }

    /// Stationary distribution of the uniform-action walk by power iteration
    /// on the lazy chain. Returns the vector and the final residual.
    pub fn stationary(&self) -> Result<(Vec<f64>, f64), Error> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let n = self.n_positions();
        let m = self.walk_matrix();
        let mut pi = vec![1.0 / n as f64; n];
        let mut res = f64::INFINITY;
        for _ in 0..200_000 {
            let mut next = vec![0.0; n];
            for x in 0..n {
                let half = 0.5 * pi[x];
                next[x] += half;
                for y in 0..n {
                    next[y] += half * m[x * n + y];
                }
            }
            res = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
            pi = next;
            if res < 1e-15 {
                break;
            }
        }
        Ok((pi, res))
    }

    /// Columns of the walk matrix sum to one.
    pub fn is_doubly_stochastic(&self) -> bool {
        let n = self.n_positions();
        let m = self.walk_matrix();
        (0..n).all(|y| ((0..n).map(|x| m[x * n + y]).sum::<f64>() - 1.0).abs() < 1e-12)
    }
}

fn cyc_dist(x: usize, y: usize, n: usize) -> usize {
    let d = x.abs_diff(y);
    d.min(n - d)
}

/// Boolean implication matrix over the proper literals of `n` sensors,
/// indexed `[a][b]` by literal index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl DirMatrix {
    pub fn empty(n_sensors: usize) -> Self {
        DirMatrix { n: n_sensors, bits: vec![false; 4 * n_sensors * n_sensors] }
    }

    pub fn n_sensors(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: Literal, b: Literal) -> bool {
        self.bits[a.index() * 2 * self.n + b.index()]
    }

    pub fn set(&mut self, a: Literal, b: Literal, v: bool) {
        let m = 2 * self.n;
        self.bits[a.index() * m + b.index()] = v;
    }

    /// Number of entries set.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Edges of `g` among the literals of `sensors` (relabelled to
    /// `0..sensors.len()`), ignoring `aa` and `aa*`.
    pub fn from_graph(g: &PocGraph, sensors: &[usize]) -> Self {
        let mut slot = vec![usize::MAX; g.n_sensors()];
        for (k, &i) in sensors.iter().enumerate() {
            slot[i] = k;
        }
        let mut d = DirMatrix::empty(sensors.len());
        for (a, b) in g.edges() {
            if a.sensor() == b.sensor() || a.sensor() >= slot.len() || b.sensor() >= slot.len() {
                continue;
            }
            let (sa, sb) = (slot[a.sensor()], slot[b.sensor()]);
            if sa == usize::MAX || sb == usize::MAX {
                continue;
            }
            d.set(Literal((2 * sa) as u32 | (a.0 & 1)), Literal((2 * sb) as u32 | (b.0 & 1)), true);
        }
        d
    }
}

/// Count of mismatched entries.
pub fn err(learned: &DirMatrix, reference: &DirMatrix) -> Result<usize, Error> {
    if learned.n != reference.n {
        return Err(Error::ShapeMismatch(learned.n, reference.n));
    }
    Ok(learned.bits.iter().zip(&reference.bits).filter(|(a, b)| a != b).count())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TruthMode {
    /// Footprint containment.
    True,
    /// Derived graph of the stationary measure with threshold τ.
    Thresholded(f64),
}

/// Ground-truth implications among the fields in `sensors`.
pub fn ground_truth(env: &Environment, sensors: &[usize], mode: TruthMode) -> Result<DirMatrix, Error> {
    if !env.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = sensors.len();
    match mode {
        TruthMode::True => {
            let mut d = DirMatrix::empty(n);
            let foot = |k: usize, pol: usize, x: usize| env.field(sensors[k], x) == (pol == 0);
            for ka in 0..n {
                for kb in 0..n {
                    if ka == kb {
                        continue;
                    }
                    for pa in 0..2 {
                        for pb in 0..2 {
                            let inside = (0..env.n_positions()).all(|x| !foot(ka, pa, x) || foot(kb, pb, x));
                            if inside {
                                d.set(Literal((2 * ka + pa) as u32), Literal((2 * kb + pb) as u32), true);
                            }
                        }
                    }
                }
            }
            Ok(d)
        }
        TruthMode::Thresholded(tau) => {
            let (pi, _) = env.stationary()?;
            let sens = Sensorium::anonymous(n);
            let points: Vec<(f64, Vec<bool>)> =
                (0..env.n_positions()).map(|x| (pi[x], sensors.iter().map(|&i| env.field(i, x)).collect())).collect();
            let mut s = Snapshot::from_measure(sens, tau, &points)?;
            s.set_equivalences(false);
            debug_assert_eq!(s.kind(), SnapshotKind::Probabilistic);
            let all: Vec<usize> = (0..n).collect();
            Ok(DirMatrix::from_graph(&s.derive_poc_graph(), &all))
        }
    }
}
