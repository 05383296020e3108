use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use snapmem_core::{err, ground_truth, DirMatrix, Environment, Error, Literal, TruthMode};

fn all(env: &Environment) -> Vec<usize> {
    (0..env.n_fields()).collect()
}

fn truth(env: &Environment) -> DirMatrix {
    ground_truth(env, &all(env), TruthMode::True).unwrap()
}

#[test]
fn path_truth_is_a_chain() {
    let env = Environment::path(20);
    let d = truth(&env);
    assert_eq!(d.count(), 380);
    for i in 0..20 {
        for j in 0..20 {
            if i != j {
                assert_eq!(d.get(Literal::pos(i), Literal::pos(j)), i < j);
                assert_eq!(d.get(Literal::neg(i), Literal::neg(j)), i > j);
                assert!(!d.get(Literal::pos(i), Literal::neg(j)));
                assert!(!d.get(Literal::neg(i), Literal::pos(j)));
            }
        }
    }
    let edgeless = DirMatrix::empty(20);
    assert_eq!(err(&edgeless, &d).unwrap(), 380);
    assert_eq!(err(&d, &edgeless).unwrap(), 380);
    assert_eq!(err(&d, &d).unwrap(), 0);
    assert!(matches!(err(&DirMatrix::empty(3), &d), Err(Error::ShapeMismatch(3, 20))));
}

#[test]
fn grid_axes_do_not_interact() {
    let env = Environment::grid(10, 10);
    assert_eq!(env.n_positions(), 121);
    let d = truth(&env);
    let mut cross = 0;
    for a in 0..40u32 {
        for b in 0..40u32 {
            let (a, b) = (Literal(a), Literal(b));
            if (a.sensor() < 10) != (b.sensor() < 10) {
                cross += 1;
                assert!(!d.get(a, b));
            }
        }
    }
    assert_eq!(cross, 800);
    assert_eq!(d.count(), 2 * 90);
}

#[test]
fn cycle_beacons_are_disjoint_beyond_distance_two() {
    let n = 20;
    let env = Environment::cycle(n);
    let d = truth(&env);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dist = i.abs_diff(j).min(n - i.abs_diff(j));
            assert_eq!(d.get(Literal::pos(i), Literal::neg(j)), dist > 2, "u{i} u{j}");
            assert!(!d.get(Literal::pos(i), Literal::pos(j)));
        }
    }
}

#[test]
fn punctured_grid_blocks_the_hole() {
    let env = Environment::punctured_grid(4, (2, 2)).unwrap();
    assert_eq!(env.n_positions(), 24);
    assert_eq!(env.position_of((2, 2)), None);
    let west_of_hole = env.position_of((1, 2)).unwrap();
    assert_eq!(env.transition(west_of_hole, env.action_index("east").unwrap()), west_of_hole);
    assert!(env.is_connected());
    assert!(matches!(Environment::punctured_grid(4, (0, 2)), Err(Error::BoundaryPuncture(_))));
    assert!(Environment::punctured_grid(3, (1, 1)).is_err());
}

#[test]
fn circular_rail() {
    let mut env = Environment::circular_rail(12).unwrap();
    env.set_position(0);
    env.set_target(6);
    assert_eq!(env.distance(), 6);
    assert_eq!(env.distances_to(6).iter().max(), Some(&6));
    assert!(Environment::circular_rail(3).is_err());
}

#[test]
fn tiny_threshold_matches_footprints() {
    for env in [Environment::path(8), Environment::cycle(9), Environment::grid(3, 4)] {
        let t = ground_truth(&env, &all(&env), TruthMode::Thresholded(1e-9)).unwrap();
        assert_eq!(t, truth(&env), "{}", env.name());
    }
}

#[test]
fn stationary_measures() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let envs = [
        Environment::path(10),
        Environment::cycle(11),
        Environment::grid(4, 3),
        Environment::punctured_grid(5, (2, 3)).unwrap(),
        Environment::random_fields(7, &mut rng),
    ];
    for env in &envs {
        let (pi, res) = env.stationary().unwrap();
        assert!(res < 1e-12, "{}: residual {res}", env.name());
        assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(env.is_doubly_stochastic());
        let n = env.n_positions();
        assert!(pi.iter().all(|p| (p - 1.0 / n as f64).abs() < 1e-9));
        let m = env.walk_matrix();
        for y in 0..n {
            let flow: f64 = (0..n).map(|x| pi[x] * m[x * n + y]).sum();
            assert!((flow - pi[y]).abs() < 1e-12);
        }
        assert!(env.is_reversible());
    }
}

#[test]
fn random_fields_are_seeded() {
    let a = Environment::random_fields(10, &mut ChaCha8Rng::seed_from_u64(9));
    let b = Environment::random_fields(10, &mut ChaCha8Rng::seed_from_u64(9));
    let c = Environment::random_fields(10, &mut ChaCha8Rng::seed_from_u64(10));
    assert_eq!(a.fields(), b.fields());
    assert_ne!(a.fields(), c.fields());
    assert_eq!(a.n_fields(), 10);
}

#[test]
fn wait_action_stays() {
    let mut env = Environment::grid(3, 3).with_wait();
    let w = env.action_index("wait").unwrap();
    env.set_position(5);
    assert_eq!(env.step(w), 5);
    assert_eq!(env.n_actions(), 5);
}
