use lattice_green::mc::{
    estimate_green, estimate_green_folded, estimate_walk, step, WalkConfig, WalkModel,
};
use lattice_green::network::{build_truncated, killed_green_solve, Construction, HalfVertex};
use lattice_green::reflection::{green_half_reflected, DomainSpec};
use lattice_green::{GreenError, GreenEvaluator, LatticePoint, QuadratureConfig};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p<const N: usize>(c: [i64; N]) -> LatticePoint {
    LatticePoint::from(c)
}

#[test]
fn same_seed_same_estimate() {
    let dom = DomainSpec::strip(4, 3).unwrap();
    let x = p([1, 0, 0, 0]);
    let cfg = WalkConfig::new(2_000, 500, 42);
    let a = estimate_green(&dom, &x, &x, &cfg).unwrap();
    let b = estimate_green(&dom, &x, &x, &cfg).unwrap();
    assert_eq!(a, b);
    let c = estimate_green(&dom, &x, &x, &WalkConfig::new(2_000, 500, 43)).unwrap();
    assert_ne!(a.mean, c.mean);
}

#[test]
fn killed_box_matches_linear_solve() {
    let dom = DomainSpec::full(3).unwrap();
    let graph = build_truncated(&dom, 1, Construction::Plain).unwrap();
    let (x, y) = (p([0, 0, 0]), p([-1, 1, 0]));
    let exact = killed_green_solve(&graph, &HalfVertex::from_lattice(&y))
        .unwrap()
        .get(&HalfVertex::from_lattice(&x))
        .unwrap();
    let cfg = WalkConfig::new(100_000, 10_000, 7);
    let est = estimate_green_folded(&dom, 1, &x, &y, Construction::Plain, &cfg).unwrap();
    assert_eq!(est.horizon_bias_bound, 0.0);
    assert!(est.agrees_with(exact), "{est:?} vs {exact}");
}

#[test]
fn folded_walks_agree() {
    let dom = DomainSpec::half_space(3).unwrap();
    let (x, y) = (p([0, 0, 0]), p([1, 0, 0]));
    let cfg = WalkConfig::new(40_000, 10_000, 11);
    let plain = estimate_green_folded(&dom, 2, &x, &y, Construction::Plain, &cfg).unwrap();
    let hp = estimate_green_folded(&dom, 2, &x, &y, Construction::HPrime, &cfg).unwrap();
    let q = estimate_green_folded(&dom, 2, &x, &y, Construction::Q, &cfg).unwrap();
    assert!(plain.agrees_with_estimate(&hp), "{plain:?} {hp:?}");
    assert!(q.agrees_with_estimate(&hp), "{q:?} {hp:?}");

    let graph = build_truncated(&dom, 2, Construction::HPrime).unwrap();
    let exact = killed_green_solve(&graph, &HalfVertex::from_lattice(&y))
        .unwrap()
        .get(&HalfVertex::from_lattice(&x))
        .unwrap();
    assert!(q.agrees_with(exact), "{q:?} vs {exact}");
}

#[test]
fn stderr_scales_with_walk_count() {
    let dom = DomainSpec::full(3).unwrap();
    let o = p([0, 0, 0]);
    let se: Vec<f64> = [10_000, 40_000, 160_000]
        .iter()
        .map(|&n| {
            estimate_green(&dom, &o, &o, &WalkConfig::new(n, 1_000, 5))
                .unwrap()
                .stderr
        })
        .collect();
    for w in se.windows(2) {
        let ratio = w[0] / w[1];
        assert!((2.0 / 1.5..=2.0 * 1.5).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn reflected_walk_matches_reflected_formula() {
    let ev = GreenEvaluator::new(QuadratureConfig::default());
    let (x, y) = (p([1, 0, 0]), p([0, 0, 0]));
    let exact = green_half_reflected(&ev, 3, &x, &y).unwrap().value;
    let model = WalkModel::ReflectedHalfSpace { d: 3 };
    assert_eq!(model.pi(&y), 3.0);
    let est = estimate_walk(&model, &x, &y, &WalkConfig::new(100_000, 10_000, 3)).unwrap();
    assert!(est.agrees_with(exact), "{est:?} vs {exact}");
}

#[test]
fn steps_stay_in_domain() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dom = DomainSpec::strip(4, 2).unwrap();
    let mut x = p([0, 0, 0, 0]);
    for _ in 0..1000 {
        let next = step(&dom, &x, &mut rng).unwrap();
        assert!(dom.contains(&next));
        assert_eq!(
            next.minus(&x).coords().iter().map(|c| c.abs()).sum::<i64>(),
            1
        );
        x = next;
    }
    assert!(step(&dom, &p([2, 0, 0, 0]), &mut rng).is_err());
}

#[test]
fn rejects_bad_config() {
    let dom = DomainSpec::full(3).unwrap();
    let o = p([0, 0, 0]);
    let zero = WalkConfig::new(0, 100, 1);
    assert!(matches!(
        estimate_green(&dom, &o, &o, &zero),
        Err(GreenError::Config(_))
    ));
    assert!(matches!(
        estimate_green_folded(&dom, 1, &o, &o, Construction::Plain, &zero),
        Err(GreenError::Config(_))
    ));
    assert!(estimate_green(&dom, &o, &p([0, 0]), &WalkConfig::default()).is_err());
}
