//! Explicit dual median graph of a small weak poc set.
//!
//! Vertices are enumerated on the canonical quotient and are exposed in two
//! coordinate systems: quotient literals (where `|u \ v|` is the hop
//! distance) and pulled-back literals of the original poc set (where
//! `V[B]` is evaluated for literal sets `B` of the original). Negligible
//! literals never occur in a vertex and equivalent literals always occur
//! together, so both views describe the same vertex set.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::literal::{LitSet, Literal};
use crate::pocset::{PocMorphism, WeakPocSet};

pub type VertexId = usize;

/// Size guards for vertex enumeration.
#[derive(Clone, Copy, Debug)]
pub struct CubingLimits {
    pub max_sensors: usize,
    pub max_vertices: usize,
}

impl Default for CubingLimits {
    fn default() -> Self {
        CubingLimits { max_sensors: 16, max_vertices: 1 << 16 }
    }
}

#[derive(Clone, Debug)]
pub struct Cubing {
    pocset: WeakPocSet,
    quotient: WeakPocSet,
    to_quotient: PocMorphism,
    /// Up-sets in the quotient over proper quotient literals.
    qup: Vec<u64>,
    qverts: Vec<u64>,
    pverts: Vec<u64>,
    index: BTreeMap<u64, VertexId>,
    adj: Vec<Vec<VertexId>>,
}

fn bit(l: Literal) -> u64 {
    1u64 << l.0
}

fn mask_to_set(mask: u64, universe: usize) -> LitSet {
    let mut s = LitSet::new(universe);
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros();
        m &= m - 1;
        s.insert(Literal(b));
    }
    s
}

/// Swap each literal with its complement inside a mask.
fn star_mask(m: u64) -> u64 {
    const EVEN: u64 = 0x5555_5555_5555_5555;
    ((m & EVEN) << 1) | ((m >> 1) & EVEN)
}

impl Cubing {
    pub fn build(p: &WeakPocSet) -> Result<Cubing, Error> {
        Self::build_with(p, CubingLimits::default())
    }

    pub fn build_with(p: &WeakPocSet, limits: CubingLimits) -> Result<Cubing, Error> {
        let cap = limits.max_sensors.min(32);
        if p.n_sensors() > cap {
            return Err(Error::CapExceeded { what: "sensors", value: p.n_sensors(), cap });
        }
        let (q, f) = p.canonical_quotient()?;
        let nq = q.n_sensors();
        let proper_q = (2 * nq) as u32;
        let qup: Vec<u64> = (0..2 * nq)
            .map(|i| q.up_of(Literal(i as u32)).iter().filter(|l| l.0 < proper_q).fold(0u64, |m, l| m | bit(l)))
            .collect();
        let mut qverts = Vec::new();
        for sel in 0u64..(1u64 << nq) {
            let mut u = 0u64;
            for i in 0..nq {
                u |= if sel >> i & 1 == 1 { bit(Literal::pos(i)) } else { bit(Literal::neg(i)) };
            }
            let mut m = u;
            let mut ok = true;
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                m &= m - 1;
                if qup[b] & !u != 0 {
                    ok = false;
                    break;
                }
            }
            if ok {
                qverts.push(u);
                if qverts.len() > limits.max_vertices {
                    return Err(Error::CapExceeded { what: "vertices", value: qverts.len(), cap: limits.max_vertices });
                }
            }
        }
        qverts.sort_unstable();
        let np = p.sensorium().n_proper();
        let pverts: Vec<u64> = qverts
            .iter()
            .map(|&u| {
                (0..np)
                    .map(|i| Literal(i as u32))
                    .filter(|&a| {
                        let b = f.apply(a);
                        b == q.one() || (b.0 < proper_q && u & bit(b) != 0)
                    })
                    .fold(0u64, |m, a| m | bit(a))
            })
            .collect();
        let index: BTreeMap<u64, VertexId> = qverts.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let adj = qverts
            .iter()
            .map(|&u| {
                (0..nq)
                    .filter_map(|i| {
                        let v = u ^ (bit(Literal::pos(i)) | bit(Literal::neg(i)));
                        index.get(&v).copied()
                    })
                    .collect()
            })
            .collect();
        Ok(Cubing { pocset: p.clone(), quotient: q, to_quotient: f, qup, qverts, pverts, index, adj })
    }

    pub fn pocset(&self) -> &WeakPocSet {
        &self.pocset
    }

    pub fn quotient(&self) -> &WeakPocSet {
        &self.quotient
    }

    pub fn quotient_map(&self) -> &PocMorphism {
        &self.to_quotient
    }

    pub fn len(&self) -> usize {
        self.qverts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qverts.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.qverts.len()
    }

    /// Vertex as a set of proper literals of the original poc set.
    pub fn vertex(&self, u: VertexId) -> LitSet {
        mask_to_set(self.pverts[u], self.pocset.universe())
    }

    /// Vertex as a set of proper quotient literals.
    pub fn quotient_vertex(&self, u: VertexId) -> LitSet {
        mask_to_set(self.qverts[u], self.quotient.universe())
    }

    /// Looks up a vertex given in original coordinates.
    pub fn vertex_id(&self, v: &LitSet) -> Option<VertexId> {
        let m = self.pset_mask(v)?;
        self.pverts.iter().position(|&u| u == m)
    }

    pub fn neighbors(&self, u: VertexId) -> &[VertexId] {
        &self.adj[u]
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for (u, ns) in self.adj.iter().enumerate() {
            for &v in ns {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn pset_mask(&self, s: &LitSet) -> Option<u64> {
        let np = self.pocset.sensorium().n_proper() as u32;
        let mut m = 0;
        for l in s.iter() {
            if l.0 >= np {
                return None;
            }
            m |= bit(l);
        }
        Some(m)
    }

    /// Image of a literal set of the original poc set in the quotient,
    /// as a proper-literal mask. `None` when it meets `ZERO`.
    fn qmask(&self, s: &LitSet) -> Option<u64> {
        let proper_q = self.quotient.sensorium().n_proper() as u32;
        let mut m = 0;
        for l in s.iter() {
            let b = self.to_quotient.apply(l);
            if b == self.quotient.zero() {
                return None;
            }
            if b.0 < proper_q {
                m |= bit(b);
            }
        }
        Some(m)
    }

    fn qup_mask(&self, m: u64) -> u64 {
        let mut out = 0;
        let mut x = m;
        while x != 0 {
            let b = x.trailing_zeros() as usize;
            x &= x - 1;
            out |= self.qup[b];
        }
        out
    }

    /// `Δ(u, v) = |u \ v|` in quotient coordinates.
    pub fn delta(&self, u: VertexId, v: VertexId) -> usize {
        (self.qverts[u] & !self.qverts[v]).count_ones() as usize
    }

    /// Hop distances from `u` by breadth-first search.
    pub fn hop_distances(&self, u: VertexId) -> Vec<usize> {
        let mut d = vec![usize::MAX; self.len()];
        let mut q = VecDeque::new();
        d[u] = 0;
        q.push_back(u);
        while let Some(x) = q.pop_front() {
            for &y in &self.adj[x] {
                if d[y] == usize::MAX {
                    d[y] = d[x] + 1;
                    q.push_back(y);
                }
            }
        }
        d
    }

    /// Majority vote `(u∩v) ∪ (u∩w) ∪ (v∩w)`.
    pub fn median(&self, u: VertexId, v: VertexId, w: VertexId) -> VertexId {
        let (a, b, c) = (self.qverts[u], self.qverts[v], self.qverts[w]);
        let m = (a & b) | (a & c) | (b & c);
        self.index[&m]
    }

    /// Vertices on some geodesic from `u` to `v`.
    pub fn interval(&self, u: VertexId, v: VertexId) -> Vec<VertexId> {
        let du = self.hop_distances(u);
        let dv = self.hop_distances(v);
        let d = du[v];
        (0..self.len()).filter(|&w| du[w] + dv[w] == d).collect()
    }

    /// `V[B]`: vertices containing every literal of `B` (original
    /// coordinates). `ONE` is in every vertex and `ZERO` in none.
    pub fn halfspace(&self, b: &LitSet) -> Vec<VertexId> {
        let one = self.pocset.one();
        let zero = self.pocset.zero();
        if b.contains(zero) {
            return Vec::new();
        }
        let mut bp = b.clone();
        bp.remove(one);
        let m = match self.pset_mask(&bp) {
            Some(m) => m,
            None => return Vec::new(),
        };
        (0..self.len()).filter(|&u| self.pverts[u] & m == m).collect()
    }

    /// `V[B]` for `B` given in quotient coordinates.
    fn qhalfspace(&self, m: u64) -> Vec<VertexId> {
        (0..self.len()).filter(|&u| self.qverts[u] & m == m).collect()
    }

    pub fn is_convex(&self, set: &[VertexId]) -> bool {
        let mut inside = vec![false; self.len()];
        for &u in set {
            inside[u] = true;
        }
        for (i, &u) in set.iter().enumerate() {
            for &v in &set[i + 1..] {
                if self.interval(u, v).iter().any(|&w| !inside[w]) {
                    return false;
                }
            }
        }
        true
    }

    fn qmin_mask(&self, u: VertexId) -> u64 {
        let uq = self.qverts[u];
        let mut out = 0;
        let mut x = uq;
        while x != 0 {
            let b = x.trailing_zeros();
            x &= x - 1;
            let a = 1u64 << b;
            // a is minimal if no other literal of u lies below it, i.e.
            // no c in u with a in up(c), c != a.
            let mut y = uq & !a;
            let mut minimal = true;
            while y != 0 {
                let c = y.trailing_zeros() as usize;
                y &= y - 1;
                if self.qup[c] & a != 0 {
                    minimal = false;
                    break;
                }
            }
            if minimal {
                out |= a;
            }
        }
        out
    }

    fn pull_back(&self, qmask: u64) -> LitSet {
        let np = self.pocset.sensorium().n_proper();
        LitSet::from_literals(
            self.pocset.universe(),
            (0..np).map(|i| Literal(i as u32)).filter(|&a| {
                let b = self.to_quotient.apply(a);
                b.0 < 64 && b.0 < self.quotient.sensorium().n_proper() as u32 && qmask & bit(b) != 0
            }),
        )
    }

    /// Literals of `u` with nothing of `u` strictly below them (original
    /// coordinates: every literal whose class is minimal).
    pub fn min_set(&self, u: VertexId) -> LitSet {
        self.pull_back(self.qmin_mask(u))
    }

    /// `(u \ {a}) ∪ {a*}`, across the whole class of `a`.
    pub fn flip(&self, u: VertexId, a: Literal) -> Result<VertexId, Error> {
        let b = self.to_quotient.apply(a);
        let proper_q = self.quotient.sensorium().n_proper() as u32;
        if b.0 >= proper_q || self.qmin_mask(u) & bit(b) == 0 {
            return Err(Error::InvalidFlip(a.0));
        }
        let v = self.qverts[u] ^ (bit(b) | bit(b.star()));
        self.index.get(&v).copied().ok_or(Error::InvalidFlip(a.0))
    }

    /// Transverse subsets of the minimal set, one per cube at `u`, each as a
    /// set of quotient literals.
    pub fn cubes_at(&self, u: VertexId) -> Vec<LitSet> {
        let mins: Vec<Literal> = mask_to_set(self.qmin_mask(u), self.quotient.universe()).iter().collect();
        let mut out = Vec::new();
        for sel in 0u64..(1u64 << mins.len()) {
            let chosen: Vec<Literal> = (0..mins.len()).filter(|&i| sel >> i & 1 == 1).map(|i| mins[i]).collect();
            let transverse = chosen.iter().enumerate().all(|(i, &a)| {
                chosen[i + 1..].iter().all(|&b| {
                    let q = &self.quotient;
                    !(q.leq(a, b) || q.leq(b, a) || q.leq(a, b.star()) || q.leq(a.star(), b))
                })
            });
            if transverse {
                out.push(LitSet::from_literals(self.quotient.universe(), chosen));
            }
        }
        out
    }

    fn target_mask(&self, t: &LitSet) -> Result<u64, Error> {
        let m = self.qmask(t).ok_or(Error::EmptyTarget)?;
        let up = self.qup_mask(m);
        if up & star_mask(up) != 0 {
            return Err(Error::EmptyTarget);
        }
        if self.qhalfspace(m).is_empty() {
            return Err(Error::EmptyTarget);
        }
        Ok(m)
    }

    /// Shortest path from `u` into `V[T]` built by repeatedly flipping a
    /// minimal literal lying below some `b*`, `b ∈ T \ u`.
    pub fn geodesic_to_convex(&self, u: VertexId, t: &LitSet) -> Result<Vec<VertexId>, Error> {
        let tm = self.target_mask(t)?;
        let mut path = vec![u];
        let mut cur = u;
        while self.qverts[cur] & tm != tm {
            let missing = tm & !self.qverts[cur];
            let b = missing.trailing_zeros();
            let bstar = Literal(b).star();
            let mins = self.qmin_mask(cur);
            let mut x = mins;
            let mut next = None;
            while x != 0 {
                let c = x.trailing_zeros();
                x &= x - 1;
                if self.qup[c as usize] & bit(bstar) != 0 {
                    let v = self.qverts[cur] ^ (bit(Literal(c)) | bit(Literal(c).star()));
                    next = self.index.get(&v).copied();
                    break;
                }
            }
            cur = next.ok_or(Error::EmptyTarget)?;
            path.push(cur);
        }
        Ok(path)
    }

    /// `(u \ down(T*)) ∪ up(T)`.
    pub fn project_point(&self, u: VertexId, t: &LitSet) -> Result<VertexId, Error> {
        let tm = self.target_mask(t)?;
        let up = self.qup_mask(tm);
        let down_tstar = star_mask(up);
        let v = (self.qverts[u] & !down_tstar) | up;
        self.index.get(&v).copied().ok_or(Error::EmptyTarget)
    }

    /// `V[(up S ∪ up T) \ down T*]`.
    pub fn project_convex(&self, s: &LitSet, t: &LitSet) -> Result<Vec<VertexId>, Error> {
        let sm = self.target_mask(s)?;
        let tm = self.target_mask(t)?;
        let ups = self.qup_mask(sm);
        let upt = self.qup_mask(tm);
        let m = (ups | upt) & !star_mask(upt);
        Ok(self.qhalfspace(m))
    }

    /// Image of `V[S]` under pointwise projection to `V[T]`.
    pub fn project_convex_pointwise(&self, s: &LitSet, t: &LitSet) -> Result<Vec<VertexId>, Error> {
        let sm = self.target_mask(s)?;
        self.target_mask(t)?;
        let mut out: Vec<VertexId> =
            self.qhalfspace(sm).into_iter().map(|u| self.project_point(u, t)).collect::<Result<_, _>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Literals `a` (quotient coordinates) with `K ⊆ V(a)` and `L ⊆ V(a*)`.
    pub fn separator(&self, k: &[VertexId], l: &[VertexId]) -> Result<LitSet, Error> {
        if k.is_empty() || l.is_empty() || !self.is_convex(k) || !self.is_convex(l) {
            return Err(Error::NotConvex);
        }
        let all_k = k.iter().fold(!0u64, |m, &u| m & self.qverts[u]);
        let all_l = l.iter().fold(!0u64, |m, &u| m & self.qverts[u]);
        Ok(mask_to_set(all_k & star_mask(all_l), self.quotient.universe()))
    }

    /// A pair `(u, v)`, `u ∈ K`, `v ∈ L`, at minimal distance.
    pub fn gate(&self, k: &[VertexId], l: &[VertexId]) -> Result<(VertexId, VertexId), Error> {
        if k.is_empty() || l.is_empty() || !self.is_convex(k) || !self.is_convex(l) {
            return Err(Error::NotConvex);
        }
        // Project any point of L to K, then back to L.
        let kt = self.common_literals(k);
        let lt = self.common_literals(l);
        let u = self.project_point(l[0], &kt)?;
        let v = self.project_point(u, &lt)?;
        let u = self.project_point(v, &kt)?;
        Ok((u, v))
    }

    /// Literals shared by every vertex of a set, in original coordinates.
    pub fn common_literals(&self, set: &[VertexId]) -> LitSet {
        let m = set.iter().fold(!0u64, |m, &u| m & self.pverts[u]);
        mask_to_set(m, self.pocset.universe())
    }

    /// Vertices witnessed by the realization.
    pub fn punctured_dual(&self, r: &Realization) -> Result<Vec<VertexId>, Error> {
        r.validate(&self.pocset)?;
        let mut out = Vec::new();
        for x in 0..r.n_points {
            let v = r.vertex_of(x);
            let m = self.pset_mask(&v).ok_or(Error::SensoriumMismatch)?;
            let id = self
                .pverts
                .iter()
                .position(|&u| u == m)
                .ok_or_else(|| Error::NotMorphism(alloc::format!("point {x} is not a vertex")))?;
            out.push(id);
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

/// Pullback of vertices along a morphism `f: P -> Q`, taking each vertex of
/// the dual of `Q` to `f^{-1}(v)`, a vertex of the dual of `P`.
pub fn dual_map(f: &PocMorphism, p: &Cubing, q: &Cubing) -> Result<Vec<VertexId>, Error> {
    f.validate(p.pocset(), q.pocset())?;
    let qone = q.pocset().one();
    let mut out = Vec::with_capacity(q.len());
    for v in q.vertices() {
        let vs = q.vertex(v);
        let pre = LitSet::from_literals(
            p.pocset().universe(),
            p.pocset().sensorium().proper_literals().filter(|&a| {
                let b = f.apply(a);
                b == qone || vs.contains(b)
            }),
        );
        let id = p
            .vertex_id(&pre)
            .ok_or_else(|| Error::NotMorphism(alloc::format!("preimage of vertex {v} is not a vertex")))?;
        out.push(id);
    }
    Ok(out)
}

/// Realization of a sensorium on a finite set of witnesses (states or
/// transitions): `fields[i][x]` is the value of sensor `i` at witness `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub n_points: usize,
    pub fields: Vec<Vec<bool>>,
}

impl Realization {
    pub fn new(n_points: usize, fields: Vec<Vec<bool>>) -> Result<Self, Error> {
        if fields.iter().any(|f| f.len() != n_points) {
            return Err(Error::Invalid("field length differs from point count".into()));
        }
        Ok(Realization { n_points, fields })
    }

    #[inline]
    pub fn value(&self, a: Literal, x: usize) -> bool {
        self.fields[a.sensor()][x] != a.is_starred()
    }

    /// The complete *-selection read at witness `x`.
    pub fn vertex_of(&self, x: usize) -> LitSet {
        let n = self.fields.len();
        LitSet::from_literals(
            2 * n + 2,
            (0..n).map(|i| if self.fields[i][x] { Literal::pos(i) } else { Literal::neg(i) }),
        )
    }

    /// Checks `a <= b  =>  ρ(a) ⊆ ρ(b)` over proper literals.
    pub fn validate(&self, p: &WeakPocSet) -> Result<(), Error> {
        if self.fields.len() != p.n_sensors() {
            return Err(Error::SensoriumMismatch);
        }
        for (a, b) in p.relations() {
            if (0..self.n_points).any(|x| self.value(a, x) && !self.value(b, x)) {
                return Err(Error::NotMorphism(alloc::format!(
                    "{} <= {} is violated",
                    p.sensorium().label(a),
                    p.sensorium().label(b)
                )));
            }
        }
        Ok(())
    }
}
