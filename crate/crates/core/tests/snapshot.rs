use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use snapmem_core::propagation::{closure, propagate};
use snapmem_core::{Constraint, Error, LitSet, Literal, Sensorium, Snapshot, SnapshotKind, StarSelection, Weights};

const A: Literal = Literal(0);
const B: Literal = Literal(2);

fn obs(vals: &[bool]) -> StarSelection {
    StarSelection::from_values(vals)
}

/// Two sensors with one square `[ab, ab*, a*b, a*b*]`.
fn square(w: [f64; 4], tau: f64) -> Snapshot {
    let marg = vec![w[0] + w[1], w[2] + w[3], w[0] + w[2], w[1] + w[3]];
    let sens = Sensorium::named(["a", "b"]);
    let u = sens.universe();
    Snapshot::from_parts(sens, Weights::Mass { quad: vec![w], marg }, vec![tau], LitSet::new(u), 1, true).unwrap()
}

fn quad(s: &Snapshot) -> [f64; 4] {
    match s.weights() {
        Weights::Mass { quad, .. } => quad[0],
        Weights::Counts { quad, .. } => quad[0].map(|x| x as f64),
    }
}

fn close(a: [f64; 4], b: [f64; 4]) -> bool {
    a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12)
}

fn random_empirical(rng: &mut ChaCha8Rng, n: usize, steps: usize, patterns: usize) -> Snapshot {
    let pats: Vec<Vec<bool>> = (0..patterns).map(|_| (0..n).map(|_| rng.random_bool(0.5)).collect()).collect();
    let tau = rng.random_range(0.0..=0.25);
    let mut s = Snapshot::trivial(Sensorium::anonymous(n), tau, SnapshotKind::Empirical).unwrap();
    for _ in 0..steps {
        s.empirical_update(&obs(&pats[rng.random_range(0..patterns)])).unwrap();
    }
    s
}

fn random_measure(rng: &mut ChaCha8Rng, n: usize) -> Snapshot {
    let k = rng.random_range(1..=10);
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let points: Vec<(f64, Vec<bool>)> =
        raw.iter().map(|m| (m / total, (0..n).map(|_| rng.random_bool(0.5)).collect())).collect();
    Snapshot::from_measure(Sensorium::anonymous(n), rng.random_range(0.0..=0.25), &points).unwrap()
}

#[test]
fn trivial_snapshots() {
    let s = Snapshot::trivial(Sensorium::anonymous(4), 0.1, SnapshotKind::Empirical).unwrap();
    assert_eq!(s.clock(), 0);
    assert_eq!(s.graph().n_edges(), 0);
    assert!(s.state().is_empty());
    match s.weights() {
        Weights::Counts { quad, marg } => {
            assert_eq!(quad.len(), 6);
            assert!(quad.iter().all(|q| *q == [0; 4]) && marg.iter().all(|&m| m == 0));
        }
        _ => panic!("empirical weights expected"),
    }
    assert!(matches!(
        Snapshot::trivial(Sensorium::anonymous(2), 0.3, SnapshotKind::Empirical),
        Err(Error::BadThreshold(_))
    ));
}

#[test]
fn empirical_update_counts() {
    let mut s = Snapshot::trivial(Sensorium::named(["a", "b"]), 0.1, SnapshotKind::Empirical).unwrap();
    s.empirical_update(&obs(&[true, true])).unwrap();
    assert_eq!(s.count(A, B), Some(1));
    assert_eq!(s.count(A, B.star()), Some(0));
    assert_eq!(s.count(A.star(), B), Some(0));
    assert_eq!(s.count(A.star(), B.star()), Some(0));

    let partial = StarSelection::new(LitSet::from_literals(s.sensorium().universe(), [A])).unwrap();
    assert!(matches!(s.empirical_update(&partial), Err(Error::IncompleteObservation)));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let s = random_empirical(&mut rng, 5, 37, 6);
    assert_eq!(s.clock(), 37);
    for a in s.sensorium().proper_literals() {
        assert_eq!(s.marginal(a) + s.marginal(a.star()), 37.0);
        for b in s.sensorium().proper_literals().filter(|b| b.sensor() > a.sensor()) {
            let t: u64 = [(a, b), (a, b.star()), (a.star(), b), (a.star(), b.star())]
                .iter()
                .map(|&(x, y)| s.count(x, y).unwrap())
                .sum();
            assert_eq!(t, 37);
        }
    }
    assert!(s.is_empirical());
}

#[test]
fn discounted_arithmetic() {
    let mut s = square([1.0, 0.0, 0.0, 0.0], 0.1);
    s.discounted_update(&obs(&[false, true]), 0.75).unwrap();
    assert!((s.weight(A, B) - 0.75).abs() < 1e-12);

    let mut s = square([0.25; 4], 0.1);
    s.discounted_update(&obs(&[true, true]), 0.5).unwrap();
    assert!(close(quad(&s), [0.625, 0.125, 0.125, 0.125]));
    assert!((quad(&s).iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(s.is_probabilistic());

    assert!(matches!(s.discounted_update(&obs(&[true, true]), 1.5), Err(Error::DecayOutOfRange(_))));
    let mut e = Snapshot::trivial(Sensorium::anonymous(2), 0.1, SnapshotKind::Empirical).unwrap();
    assert!(matches!(e.discounted_update(&obs(&[true, true]), 0.5), Err(Error::WrongKind(_))));
}

#[test]
fn truncation_examples() {
    let mut s = square([0.4, 0.05, 0.3, 0.25], 0.1);
    let before = s.graph().sorted_edges();
    assert_eq!(s.truncate().unwrap(), 1);
    assert!(close(quad(&s), [0.45, 0.0, 0.25, 0.3]));
    assert_eq!(s.graph().sorted_edges(), before);
    assert!(s.is_probabilistic());

    let mut s = square([0.25; 4], 0.1);
    assert_eq!(s.truncate().unwrap(), 0);
    assert!(close(quad(&s), [0.25; 4]));
}

#[test]
fn derive_examples() {
    let s = square([0.5, 0.0, 0.2, 0.3], 0.1);
    let g = s.derive_poc_graph();
    assert_eq!(g.sorted_edges(), {
        let mut e = vec![(A, B), (B.star(), A.star())];
        e.sort();
        e
    });

    // Strict inequality: w_ab* equal to τ gives no edge.
    let s = square([0.4, 0.1, 0.2, 0.3], 0.1);
    assert_eq!(s.derive_poc_graph().n_edges(), 0);
}

#[test]
fn equivalence_example() {
    let s = square([0.5, 0.0, 0.0, 0.5], 0.1);
    let g = s.extend_with_equivalences(&s.derive_poc_graph()).unwrap();
    assert!(g.has_edge(A, B) && g.has_edge(B, A));
    assert!(g.has_edge(A.star(), B.star()) && g.has_edge(B.star(), A.star()));

    let s = square([0.4, 0.1, 0.2, 0.3], 0.1);
    let d = s.derive_poc_graph();
    assert_eq!(s.extend_with_equivalences(&d).unwrap(), d);
}

fn three_way(ab: [f64; 4], bc: [f64; 4], ac: [f64; 4]) -> Snapshot {
    let sens = Sensorium::named(["a", "b", "c"]);
    let u = sens.universe();
    // Pair order: (0,1), (0,2), (1,2).
    let weights = Weights::Mass { quad: vec![ab, ac, bc], marg: vec![0.5; 6] };
    Snapshot::from_parts(sens, weights, vec![0.1; 3], LitSet::new(u), 1, false).unwrap()
}

#[test]
fn triangle_inequality() {
    let bad = three_way([0.5, 0.0, 0.0, 0.5], [0.5, 0.0, 0.0, 0.5], [0.0, 0.5, 0.5, 0.0]);
    assert!(matches!(bad.check_triangle(), Err(Error::TriangleViolated(..))));
    assert!(bad.extend_with_equivalences(&bad.derive_poc_graph()).is_err());

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let n = rng.random_range(2..=6);
        random_empirical(&mut rng, n, 30, 4).check_triangle().unwrap();
        random_measure(&mut rng, n).check_triangle().unwrap();
    }
}

#[test]
fn truncation_can_break_the_triangle_inequality() {
    // Discounted updates truncate, and truncated weights need not come from a measure.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let found = (0..200).any(|_| {
        let n = rng.random_range(3..=6);
        let mut d = Snapshot::trivial(Sensorium::anonymous(n), 0.05, SnapshotKind::Probabilistic).unwrap();
        (0..40).any(|_| {
            let v: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            d.discounted_update(&obs(&v), 0.9).unwrap();
            d.check_triangle().is_err()
        })
    });
    assert!(found);
}

#[test]
fn probabilistic_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let e = random_empirical(&mut rng, 4, 20, 5);
    assert!(e.normalized().unwrap().is_probabilistic());

    let sens = Sensorium::named(["a", "b"]);
    let u = sens.universe();
    let w = Weights::Mass { quad: vec![[0.41, 0.1, 0.2, 0.3]], marg: vec![0.5, 0.5, 0.6, 0.4] };
    let s = Snapshot::from_parts(sens, w, vec![0.1], LitSet::new(u), 1, true).unwrap();
    assert_eq!(s.check_probabilistic().unwrap_err().constraint, Constraint::Consistency);

    let t = Snapshot::trivial(Sensorium::anonymous(3), 0.1, SnapshotKind::Probabilistic).unwrap();
    assert_eq!(t.check_probabilistic().unwrap_err().constraint, Constraint::Normalization);
}

#[test]
fn cocycle_basics() {
    let s = square([0.4, 0.05, 0.3, 0.25], 0.1);
    assert_eq!(s.orientation_cocycle(A, A), 0.0);
    assert!((s.orientation_cocycle(A, B) + s.orientation_cocycle(B, A)).abs() < 1e-12);
}

#[test]
fn learn_and_unlearn() {
    let q = 1.0 - 0.5f64.powi(6);
    let tau = 1e-3;
    // All mass on ab*, then only observations avoiding ab*.
    let mut s = square([0.0, 1.0, 0.0, 0.0], tau);
    let others = [[true, true], [false, true], [false, false]];
    let mut appeared = None;
    for dt in 1..=2000 {
        s.discounted_update(&obs(&others[dt % 3]), q).unwrap();
        if s.graph().has_edge(A, B) {
            appeared = Some(dt as f64);
            break;
        }
    }
    let dt = appeared.expect("edge is learned");
    assert!(dt > tau.ln() / q.ln(), "learned after {dt}");

    let mut k = 0usize;
    while s.graph().has_edge(A, B) {
        s.discounted_update(&obs(&[true, false]), q).unwrap();
        k += 1;
    }
    assert!(k as f64 >= tau / (1.0 - q), "unlearned after {k}");
}

#[test]
fn empirical_decomposition() {
    let mut s = Snapshot::trivial(Sensorium::anonymous(3), 0.1, SnapshotKind::Empirical).unwrap();
    assert!(s.decompose_evolution().is_none());
    s.empirical_update(&obs(&[true, false, true])).unwrap();
    s.empirical_update(&obs(&[true, true, false])).unwrap();
    assert!(s.is_empirical());
    let (t, _) = s.decompose_evolution().unwrap();
    assert_eq!(t.clock(), 1);
    let (r, _) = t.decompose_evolution().unwrap();
    assert_eq!(r.clock(), 0);
    assert!(r.decompose_evolution().is_none());
    let obs_seq = s.decompose_to_trivial(1000).unwrap();
    assert_eq!(obs_seq.len(), 2);

    let Weights::Counts { mut quad, marg } = s.weights().clone() else { unreachable!() };
    quad[0][0] += 1;
    let tampered = Snapshot::from_parts(
        s.sensorium().clone(),
        Weights::Counts { quad, marg },
        s.thresholds().to_vec(),
        s.state().clone(),
        s.clock(),
        true,
    )
    .unwrap();
    assert!(!tampered.is_empirical());
}

/// Components of the graph joining `a` and `b` when `w_ab* = w_a*b = 0`.
fn union_find_classes(s: &Snapshot) -> Vec<usize> {
    let m = 2 * s.n_sensors();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for a in 0..m {
        for b in 0..m {
            let (la, lb) = (Literal(a as u32), Literal(b as u32));
            if la.sensor() != lb.sensor() && s.weight(la, lb.star()) == 0.0 && s.weight(la.star(), lb) == 0.0 {
                let (x, y) = (find(&mut parent, a), find(&mut parent, b));
                parent[x] = y;
            }
        }
    }
    (0..m).map(|x| find(&mut parent, x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn derived_graphs_are_acyclic(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_measure(&mut rng, n);
        prop_assert!(s.derive_poc_graph().is_acyclic());
        let e = random_empirical(&mut rng, n, 25, 5);
        prop_assert!(e.derive_poc_graph().is_acyclic());
    }

    #[test]
    fn truncation_is_idempotent_and_preserves_graph(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = random_measure(&mut rng, n);
        let g = s.derive_poc_graph().sorted_edges();
        s.truncate().unwrap();
        let once = s.weights().clone();
        prop_assert_eq!(s.derive_poc_graph().sorted_edges(), g);
        prop_assert_eq!(s.truncate().unwrap(), 0);
        prop_assert_eq!(s.weights(), &once);
    }

    #[test]
    fn cocycle_is_additive(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_measure(&mut rng, n);
        let lits: Vec<Literal> = s.sensorium().proper_literals().collect();
        for &a in &lits {
            for &b in &lits {
                prop_assert!((s.orientation_cocycle(a, b) + s.orientation_cocycle(b, a)).abs() < 1e-9);
                for &c in &lits {
                    let r = s.orientation_cocycle(a, b) + s.orientation_cocycle(b, c) - s.orientation_cocycle(a, c);
                    prop_assert!(r.abs() < 1e-9, "{:?} {:?} {:?}: {}", a, b, c, r);
                }
            }
        }
    }

    #[test]
    fn empirical_and_normalized_graphs_agree(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let steps = rng.random_range(1..40);
        let e = random_empirical(&mut rng, n, steps, 6);
        let p = e.normalized().unwrap();
        prop_assert!(p.is_probabilistic());
        prop_assert_eq!(e.derive_poc_graph().sorted_edges(), p.derive_poc_graph().sorted_edges());
    }

    #[test]
    fn state_is_coherent_projection(seed in any::<u64>(), n in 2usize..7, discounted in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kind = if discounted { SnapshotKind::Probabilistic } else { SnapshotKind::Empirical };
        let mut s = Snapshot::trivial(Sensorium::anonymous(n), 0.05, kind).unwrap();
        s.set_equivalences(false);
        for _ in 0..30 {
            let v: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            let o = obs(&v);
            if discounted {
                s.discounted_update(&o, 0.9).unwrap();
            } else {
                s.empirical_update(&o).unwrap();
            }
            let p = s.graph().derived_poc_set(s.sensorium(), true).unwrap();
            let want = p.coherent_projection(o.as_set()).proper_part(n);
            prop_assert_eq!(s.state().proper_part(n), want);
            prop_assert!(p.is_coherent(s.state()));
            prop_assert_eq!(&closure(s.graph(), s.state()), s.state());
            prop_assert_eq!(&propagate(s.graph(), &s.graph().empty_set(), o.as_set()), s.state());
        }
    }

    #[test]
    fn equivalence_classes_match_union_find(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_empirical(&mut rng, n, 20, 2);
        let classes = union_find_classes(&s);
        let g = s.graph();
        for a in 0..2 * n {
            let ca = closure(g, &LitSet::from_literals(s.sensorium().universe(), [Literal(a as u32)]));
            for b in 0..2 * n {
                if a / 2 == b / 2 {
                    continue;
                }
                let cb = closure(g, &LitSet::from_literals(s.sensorium().universe(), [Literal(b as u32)]));
                let mutual = ca.contains(Literal(b as u32)) && cb.contains(Literal(a as u32));
                prop_assert_eq!(mutual, classes[a] == classes[b], "literals {} {}", a, b);
            }
        }
    }
}
