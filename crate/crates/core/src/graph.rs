//! Directed graphs on proper literals.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::literal::{LitSet, Literal, Sensorium};
use crate::pocset::WeakPocSet;

/// Directed edges over the proper literals of an `n`-sensor sensorium.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PocGraph {
    n_sensors: usize,
    succ: Vec<Vec<Literal>>,
    n_edges: usize,
}

impl PocGraph {
    pub fn new(n_sensors: usize) -> Self {
        PocGraph { n_sensors, succ: vec![Vec::new(); 2 * n_sensors], n_edges: 0 }
    }

    pub fn n_sensors(&self) -> usize {
        self.n_sensors
    }

    /// Universe of literal sets this graph works with (proper plus virtual).
    pub fn universe(&self) -> usize {
        2 * self.n_sensors + 2
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    /// Adds `a -> b` unless present.
    pub fn add_edge(&mut self, a: Literal, b: Literal) {
        if !self.has_edge(a, b) {
            self.succ[a.index()].push(b);
            self.n_edges += 1;
        }
    }

    /// Adds `a -> b` without a duplicate check.
    pub(crate) fn push_edge(&mut self, a: Literal, b: Literal) {
        self.succ[a.index()].push(b);
        self.n_edges += 1;
    }

    /// Adds `a -> b` and `b* -> a*`.
    pub fn add_relation(&mut self, a: Literal, b: Literal) {
        self.add_edge(a, b);
        self.add_edge(b.star(), a.star());
    }

    pub fn has_edge(&self, a: Literal, b: Literal) -> bool {
        self.succ.get(a.index()).is_some_and(|s| s.contains(&b))
    }

    #[inline]
    pub fn children(&self, a: Literal) -> &[Literal] {
        self.succ.get(a.index()).map_or(&[], |v| v.as_slice())
    }

    pub fn edges(&self) -> impl Iterator<Item = (Literal, Literal)> + '_ {
        self.succ.iter().enumerate().flat_map(|(a, bs)| bs.iter().map(move |&b| (Literal(a as u32), b)))
    }

    /// Sorted edge list, for comparisons.
    pub fn sorted_edges(&self) -> Vec<(Literal, Literal)> {
        let mut e: Vec<_> = self.edges().collect();
        e.sort_unstable();
        e
    }

    pub fn is_closed_under_contraposition(&self) -> bool {
        self.edges().all(|(a, b)| self.has_edge(b.star(), a.star()))
    }

    /// Some directed cycle, if any.
    pub fn find_cycle(&self) -> Option<Vec<Literal>> {
        let n = self.succ.len();
        // 0 = unseen, 1 = on stack, 2 = done
        let mut color = vec![0u8; n];
        let mut parent = vec![usize::MAX; n];
        for root in 0..n {
            if color[root] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            color[root] = 1;
            while let Some(top) = stack.last_mut() {
                let v = top.0;
                if top.1 < self.succ[v].len() {
                    let w = self.succ[v][top.1].index();
                    top.1 += 1;
                    if color[w] == 0 {
                        color[w] = 1;
                        parent[w] = v;
                        stack.push((w, 0));
                    } else if color[w] == 1 {
                        let mut cyc = vec![Literal(w as u32)];
                        let mut x = v;
                        while x != w {
                            cyc.push(Literal(x as u32));
                            x = parent[x];
                        }
                        cyc[1..].reverse();
                        return Some(cyc);
                    }
                } else {
                    color[v] = 2;
                    stack.pop();
                }
            }
        }
        None
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// Transitive closure as a weak poc set. In strict mode a directed cycle
    /// is an error; otherwise cycles become equivalence classes.
    pub fn derived_poc_set(&self, sensorium: &Sensorium, strict: bool) -> Result<WeakPocSet, Error> {
        if sensorium.len() != self.n_sensors {
            return Err(Error::SensoriumMismatch);
        }
        if strict {
            if let Some(c) = self.find_cycle() {
                return Err(Error::Cycle(c.into_iter().map(|l| l.0).collect()));
            }
        }
        let rels: Vec<_> = self.edges().collect();
        WeakPocSet::from_generators(sensorium.clone(), &rels)
    }

    /// Graph of all strict relations of a poc set between proper literals.
    pub fn from_pocset(p: &WeakPocSet) -> Self {
        let mut g = PocGraph::new(p.n_sensors());
        for (a, b) in p.relations() {
            g.push_edge(a, b);
        }
        g
    }

    /// Graph of the given generators plus their contrapositives.
    pub fn from_relations(n_sensors: usize, rels: &[(Literal, Literal)]) -> Self {
        let mut g = PocGraph::new(n_sensors);
        for &(a, b) in rels {
            g.add_relation(a, b);
        }
        g
    }

    pub fn empty_set(&self) -> LitSet {
        LitSet::new(self.universe())
    }
}
