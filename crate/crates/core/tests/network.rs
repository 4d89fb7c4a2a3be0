use lattice_green::network::{
    build_truncated, build_unfolded, finite_box_half_green, killed_green_matrix,
    killed_green_solve, lattice_box, reflect_fold, Construction, FiniteBox, FoldComparison,
    HalfVertex, KilledGreenSolver, SplitComparison, WeightedGraph,
};
use lattice_green::reflection::DomainSpec;
use lattice_green::{GreenError, LatticePoint};

fn hv(p: &[i64]) -> HalfVertex {
    HalfVertex::from_lattice(&LatticePoint::new(p.to_vec()))
}

#[test]
fn three_by_three_box_exact_values() {
    // exact inverse of 4I - C over rationals
    let g = killed_green_matrix(&lattice_box(&[-1, -1], &[1, 1]).unwrap()).unwrap();
    let cases = [
        ([0, 0], [0, 0], 3.0 / 8.0),
        ([0, 0], [1, 0], 1.0 / 8.0),
        ([0, 0], [1, 1], 1.0 / 16.0),
        ([1, 1], [1, 1], 67.0 / 224.0),
        ([1, 1], [-1, -1], 3.0 / 224.0),
        ([1, 0], [-1, 0], 5.0 / 112.0),
    ];
    for (x, y, want) in cases {
        let got = g.get(&hv(&x), &hv(&y));
        assert!((got - want).abs() < 1e-14, "{x:?} {y:?}: {got} vs {want}");
    }
}

#[test]
fn three_by_three_box_power_series() {
    // G = sum_n P^n / pi by direct iteration of the killed chain
    let graph = lattice_box(&[-1, -1], &[1, 1]).unwrap();
    let g = killed_green_matrix(&graph).unwrap();
    let idx = |v: &HalfVertex| g.index_of(v).unwrap();
    let n = g.vertices.len();
    let start = idx(&hv(&[1, 0]));
    let mut mass = vec![0.0; n];
    mass[start] = 1.0;
    let mut visits = mass.clone();
    for _ in 0..400 {
        let mut next = vec![0.0; n];
        for (k, v) in g.vertices.iter().enumerate() {
            let gi = graph.index_of(v).unwrap();
            for &(j, c) in graph.neighbors(gi) {
                if !graph.is_boundary(j) {
                    next[idx(graph.vertex(j))] += mass[k] * c / graph.pi(gi);
                }
            }
        }
        for (a, b) in visits.iter_mut().zip(&next) {
            *a += b;
        }
        mass = next;
    }
    for (k, v) in g.vertices.iter().enumerate() {
        let want = visits[k] / graph.pi_of(v).unwrap();
        assert!((g.values[(start, k)] - want).abs() < 1e-13);
    }
}

#[test]
fn dense_and_iterative_solvers_agree() {
    let graph = build_truncated(&DomainSpec::orthant(3).unwrap(), 3, Construction::Plain).unwrap();
    let dense = KilledGreenSolver::new(&graph).unwrap();
    let cg = KilledGreenSolver::with_dense_limit(&graph, 0).unwrap();
    assert!(dense.is_dense() && !cg.is_dense());
    let y = hv(&[1, 2, 0]);
    let a = dense.solve(&graph, &y).unwrap();
    let b = cg.solve(&graph, &y).unwrap();
    assert!(b.residual < 1e-10);
    for v in &a.vertices {
        assert!((a.get(v).unwrap() - b.get(v).unwrap()).abs() < 1e-10);
    }
    let col = killed_green_solve(&graph, &y).unwrap();
    assert_eq!(col.get(&y), a.get(&y));
}

#[test]
fn unkilled_graph_is_singular() {
    let mut g = WeightedGraph::new(1);
    g.add_edge(&hv(&[0]), &hv(&[1]), 1.0).unwrap();
    assert!(matches!(
        killed_green_matrix(&g),
        Err(GreenError::Singular(_))
    ));
    g.add_edge(&hv(&[2]), &hv(&[3]), 1.0).unwrap();
    g.set_boundary(&hv(&[3]), true).unwrap();
    assert!(matches!(
        killed_green_matrix(&g),
        Err(GreenError::Singular(_))
    ));
}

#[test]
fn finite_box_identity() {
    for n in 1..=2 {
        let fb = FiniteBox::new(3, n).unwrap();
        assert!(fb.max_discrepancy().unwrap() < 1e-12);
        let x = LatticePoint::from([n as i64, 0, -1]);
        let y = LatticePoint::from([0, 1, 1]);
        let single = finite_box_half_green(3, n, &x, &y).unwrap();
        assert!((single - fb.direct(&x, &y).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn fold_pushforward_matches_h_prime() {
    let domains = [
        (DomainSpec::half_space(3).unwrap(), 3),
        (DomainSpec::subspace(3, 2).unwrap(), 2),
        (DomainSpec::orthant(3).unwrap(), 2),
        (DomainSpec::strip(4, 2).unwrap(), 1),
        (DomainSpec::strip(4, 3).unwrap(), 1),
    ];
    for (dom, n) in domains {
        let cmp = FoldComparison::new(&dom, n).unwrap();
        assert!(
            cmp.max_discrepancy() < 1e-12,
            "{dom} N={n}: {}",
            cmp.max_discrepancy()
        );
    }
}

#[test]
fn split_graph_reduces_to_lattice() {
    for dom in [
        DomainSpec::half_space(3).unwrap(),
        DomainSpec::orthant(3).unwrap(),
    ] {
        let cmp = SplitComparison::new(&dom, 2).unwrap();
        assert!(cmp.reduces_to_lattice, "{dom}");
        assert!(cmp.max_discrepancy < 1e-12 && cmp.max_discrepancy_reduced < 1e-12);
    }
    let strip = DomainSpec::strip(4, 2).unwrap();
    let cmp = SplitComparison::new(&strip, 1).unwrap();
    assert!(cmp.reduces_to_lattice);
    assert!(cmp.max_discrepancy < 1e-12);
}

#[test]
fn folded_is_h_prime() {
    for dom in [
        DomainSpec::half_space(3).unwrap(),
        DomainSpec::strip(4, 3).unwrap(),
    ] {
        let folded = build_truncated(&dom, 2, Construction::Folded).unwrap();
        let hp = build_truncated(&dom, 2, Construction::HPrime).unwrap();
        assert!(folded.same_as(&hp, 1e-15), "{dom}");
    }
}

#[test]
fn fold_is_idempotent_and_lands_in_folded_graph() {
    for dom in [
        DomainSpec::half_space(3).unwrap(),
        DomainSpec::orthant(3).unwrap(),
        DomainSpec::strip(4, 3).unwrap(),
    ] {
        let q = build_truncated(&dom, 2, Construction::Q).unwrap();
        let folded = build_truncated(&dom, 2, Construction::Folded).unwrap();
        for v in q.vertices() {
            let f = reflect_fold(v, &dom);
            assert_eq!(reflect_fold(&f, &dom), f);
            assert!(folded.contains(&f), "{dom}: {v} -> {f}");
        }
    }
}

#[test]
fn constructions_reject_bad_input() {
    let full = DomainSpec::full(3).unwrap();
    assert!(build_truncated(&full, 2, Construction::HPrime).is_err());
    assert!(build_truncated(&full, 0, Construction::Plain).is_err());
    assert!(build_unfolded(&full, 1).is_ok());
    assert!(lattice_box(&[0, 1], &[1, 0]).is_err());
    assert_eq!(
        "h-prime".parse::<Construction>().unwrap(),
        Construction::HPrime
    );
    assert!("folding".parse::<Construction>().is_err());
}
