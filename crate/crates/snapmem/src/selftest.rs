//! Oracle-equivalence suites run by `snapmem selftest` and the acceptance
//! target.

use rand::Rng;

use snapmem_core::propagation::{closure, propagate};
use snapmem_core::{Cubing, LitSet, Literal, PocGraph, Sensorium, Snapshot, VertexId, WeakPocSet};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub first_failure: Option<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport { name: name.into(), ..Default::default() }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(msg());
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0 && self.passed > 0
    }
}

/// Random relations between literals; may produce negligible literals and
/// equivalences.
pub fn random_pocset<R: Rng + ?Sized>(rng: &mut R, max_sensors: usize) -> WeakPocSet {
    let n = rng.random_range(1..=max_sensors);
    let m = rng.random_range(0..=2 * n);
    let mut rels = Vec::with_capacity(m);
    for _ in 0..m {
        let a = Literal(rng.random_range(0..2 * n as u32));
        let b = Literal(rng.random_range(0..2 * n as u32));
        if a != b {
            rels.push((a, b));
        }
    }
    WeakPocSet::from_generators(Sensorium::anonymous(n), &rels).expect("literals in range")
}

/// Random subset of a vertex (hence coherent).
fn random_subset<R: Rng + ?Sized>(rng: &mut R, v: &LitSet) -> LitSet {
    let mut s = LitSet::new(v.universe());
    for l in v.iter() {
        if rng.random_bool(0.5) {
            s.insert(l);
        }
    }
    s
}

fn proper(s: &LitSet, n: usize) -> LitSet {
    s.proper_part(n)
}

/// Random poc set with a buildable, non-empty dual.
fn random_cubing<R: Rng + ?Sized>(
    rng: &mut R,
    max_sensors: usize,
    max_vertices: usize,
) -> Option<(WeakPocSet, Cubing)> {
    let p = random_pocset(rng, max_sensors);
    let c = Cubing::build(&p).ok()?;
    if c.is_empty() || c.len() > max_vertices {
        return None;
    }
    Some((p, c))
}

/// Propagation against coherent projection and against the cubing's
/// convex projection.
pub fn propagation_suite<R: Rng + ?Sized>(rng: &mut R, instances: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("propagation vs cubing");
    let mut done = 0;
    while done < instances {
        let Some((p, c)) = random_cubing(rng, 8, usize::MAX) else {
            rep.skipped += 1;
            continue;
        };
        done += 1;
        let n = p.n_sensors();
        let g = PocGraph::from_relations(n, p.generators());
        for _ in 0..4 {
            let mut o = LitSet::new(p.universe());
            for l in p.sensorium().proper_literals() {
                if rng.random_bool(0.4) {
                    o.insert(l);
                }
            }
            let lhs = propagate(&g, &g.empty_set(), &o);
            let rhs = proper(&p.coherent_projection(&o), n);
            rep.check(proper(&lhs, n) == rhs, || format!("coh mismatch on {:?}: {:?} vs {:?}", o, lhs, rhs));
        }
        for _ in 0..4 {
            let u = rng.random_range(0..c.len());
            let v = rng.random_range(0..c.len());
            let s = random_subset(rng, &c.vertex(u));
            let t = random_subset(rng, &c.vertex(v));
            let r = propagate(&g, &closure(&g, &s), &t);
            let lhs = c.halfspace(&r);
            let rhs = c.project_convex(&s, &t).expect("targets are nonempty");
            rep.check(lhs == rhs, || format!("projection mismatch: S={s:?} T={t:?} R={r:?}"));
            let pointwise = c.project_convex_pointwise(&s, &t).expect("targets are nonempty");
            rep.check(pointwise == rhs, || format!("pointwise projection mismatch: S={s:?} T={t:?}"));
        }
    }
    rep
}

/// Random probabilistic snapshot: a random finite measure on random
/// complete observations.
pub fn random_probabilistic<R: Rng + ?Sized>(rng: &mut R, max_sensors: usize) -> Snapshot {
    let n = rng.random_range(2..=max_sensors);
    let k = rng.random_range(1..=12);
    let mut masses: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0f64)).collect();
    // Occasional exact zeros and ties make the strict threshold matter.
    for m in masses.iter_mut() {
        if rng.random_bool(0.2) {
            *m = 0.0;
        }
    }
    let total: f64 = masses.iter().sum();
    let points: Vec<(f64, Vec<bool>)> = masses
        .iter()
        .map(|&m| {
            let w = if total > 0.0 { m / total } else { 1.0 / k as f64 };
            (w, (0..n).map(|_| rng.random_bool(0.5)).collect())
        })
        .collect();
    let tau = match rng.random_range(0..3) {
        0 => 0.25,
        1 => 0.0,
        _ => rng.random_range(0.0..=0.25),
    };
    Snapshot::from_measure(Sensorium::anonymous(n), tau, &points).expect("valid measure")
}

/// Derived graphs of probabilistic snapshots are acyclic and unchanged by
/// truncation.
pub fn acyclicity_suite<R: Rng + ?Sized>(rng: &mut R, instances: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("acyclicity and truncation");
    for _ in 0..instances {
        let mut s = random_probabilistic(rng, 8);
        let before = s.derive_poc_graph();
        rep.check(s.is_probabilistic(), || {
            format!("generated snapshot not probabilistic: {:?}", s.check_probabilistic())
        });
        rep.check(before.is_acyclic(), || format!("cycle {:?}", before.find_cycle()));
        s.truncate().expect("probabilistic");
        let after = s.derive_poc_graph();
        rep.check(before.sorted_edges() == after.sorted_edges(), || "truncation changed the derived graph".into());
        rep.check(s.check_probabilistic().is_ok(), || {
            format!("truncation broke constraints: {:?}", s.check_probabilistic())
        });
    }
    rep
}

fn all_distances(c: &Cubing) -> Vec<Vec<usize>> {
    c.vertices().map(|u| c.hop_distances(u)).collect()
}

fn convex_by(d: &[Vec<usize>], set: &[VertexId]) -> bool {
    let n = d.len();
    let mut inside = vec![false; n];
    for &u in set {
        inside[u] = true;
    }
    for &u in set {
        for &v in set {
            if u < v {
                for w in 0..n {
                    if !inside[w] && d[u][w] + d[w][v] == d[u][v] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Median, distance, projection, geodesic and halfspace formulas against
/// breadth-first search, on duals with at most 256 vertices.
pub fn median_suite<R: Rng + ?Sized>(rng: &mut R, instances: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("median and convexity");
    let mut done = 0;
    while done < instances {
        let Some((p, c)) = random_cubing(rng, 8, 256) else {
            rep.skipped += 1;
            continue;
        };
        done += 1;
        let d = all_distances(&c);
        let nv = c.len();
        for _ in 0..6 {
            let (u, v, w) = (rng.random_range(0..nv), rng.random_range(0..nv), rng.random_range(0..nv));
            let medians: Vec<VertexId> = (0..nv)
                .filter(|&m| {
                    d[u][m] + d[m][v] == d[u][v] && d[v][m] + d[m][w] == d[v][w] && d[u][m] + d[m][w] == d[u][w]
                })
                .collect();
            rep.check(medians == vec![c.median(u, v, w)], || format!("medians {medians:?} vs formula"));
            rep.check(c.delta(u, v) == d[u][v], || format!("delta {} vs hop {}", c.delta(u, v), d[u][v]));
        }
        for _ in 0..4 {
            let u = rng.random_range(0..nv);
            let tv = c.vertex(rng.random_range(0..nv));
            let t = random_subset(rng, &tv);
            let target = c.halfspace(&t);
            let best = target.iter().map(|&x| d[u][x]).min().expect("nonempty");
            let argmin: Vec<VertexId> = target.iter().copied().filter(|&x| d[u][x] == best).collect();
            let proj = c.project_point(u, &t).expect("nonempty target");
            rep.check(argmin == vec![proj], || format!("projection {proj} vs argmin {argmin:?}"));
            let geo = c.geodesic_to_convex(u, &t).expect("nonempty target");
            let f = c.quotient_map();
            let q = c.quotient();
            let tq = LitSet::from_literals(q.universe(), t.iter().map(|l| f.apply(l)));
            let down = q.down_set(&tq.star());
            let count = c.quotient_vertex(u).intersection(&down).proper_part(q.n_sensors()).len();
            rep.check(geo.len() - 1 == best && best == count, || {
                format!("geodesic {} vs bfs {best} vs formula {count}", geo.len() - 1)
            });
            rep.check(geo.windows(2).all(|e| d[e[0]][e[1]] == 1) && geo.last() == Some(&proj), || {
                "geodesic is not a path ending at the projection".into()
            });
        }
        // Halfspaces: each V[a] and its complement V[a*] are convex and
        // every edge is cut by exactly one quotient sensor.
        let q = c.quotient();
        let f = c.quotient_map();
        for a in p.sensorium().proper_literals() {
            let fa = f.apply(a);
            if !q.sensorium().is_proper(fa) {
                continue;
            }
            let ha = c.halfspace(&LitSet::from_literals(p.universe(), [a]));
            let hb = c.halfspace(&LitSet::from_literals(p.universe(), [a.star()]));
            rep.check(ha.len() + hb.len() == nv && !ha.is_empty() && !hb.is_empty(), || {
                format!("halfspace of {a:?} does not split the vertices")
            });
            rep.check(convex_by(&d, &ha) && convex_by(&d, &hb), || format!("halfspace of {a:?} not convex"));
        }
        for (u, v) in c.edges() {
            let diff = c.quotient_vertex(u).difference(&c.quotient_vertex(v)).len();
            rep.check(diff == 1, || format!("edge {u}-{v} differs in {diff} literals"));
        }
    }
    rep
}

pub fn run_all<R: Rng + ?Sized>(rng: &mut R) -> Vec<SuiteReport> {
    vec![propagation_suite(rng, 500), acyclicity_suite(rng, 1000), median_suite(rng, 300)]
}
