mod common;

use common::*;
use proptest::prelude::*;
use robust_dfl::oracles::tour_order;
use robust_dfl::rng::RngStream;
use robust_dfl::{CostVector, Oracle, ProblemInstance, UncertaintyParams};

fn instances() -> Vec<ProblemInstance> {
    vec![
        ProblemInstance::grid(2, 2).unwrap(),
        ProblemInstance::grid(2, 4).unwrap(),
        ProblemInstance::grid(3, 3).unwrap(),
        ProblemInstance::grid(4, 3).unwrap(),
        ProblemInstance::tsp(4).unwrap(),
        ProblemInstance::tsp(5).unwrap(),
        ProblemInstance::tsp(6).unwrap(),
        ProblemInstance::select(5).unwrap(),
    ]
}

#[test]
fn reference_enumeration_sizes() {
    assert_eq!(grid_paths(3, 3).len(), 6);
    assert_eq!(grid_paths(4, 4).len(), 20);
    assert_eq!(grid_paths(2, 5).len(), 5);
    assert_eq!(tsp_tours(5).len(), 12);
    assert_eq!(tsp_tours(7).len(), 360);
    for inst in instances() {
        let o = Oracle::new(inst.clone());
        assert!(
            all_decisions(&inst).iter().all(|x| o.is_feasible(x)),
            "{inst}"
        );
    }
}

#[test]
fn solve_and_top_k_match_enumeration_with_ties() {
    let mut rng = RngStream::new(11, 0);
    for inst in instances() {
        let o = Oracle::new(inst.clone());
        let total = all_decisions(&inst).len();
        for _ in 0..40 {
            let c = integer_costs(&mut rng, inst.num_vars(), -2, 4);
            let reference = ranked(&inst, &c.0);
            assert_eq!(o.solve(&c).unwrap(), reference[0].1, "{inst} {c:?}");
            for k in [1, 2, 3, 5, total, total + 3] {
                let got = o.top_k(&c, k).unwrap();
                let want: Vec<_> = reference.iter().take(k).map(|(_, x)| x.clone()).collect();
                assert_eq!(got, want, "{inst} k={k} {c:?}");
            }
        }
    }
}

#[test]
fn solve_matches_enumeration_on_continuous_costs() {
    let mut rng = RngStream::new(12, 0);
    for inst in instances() {
        let o = Oracle::new(inst.clone());
        for _ in 0..40 {
            let c = uniform_costs(&mut rng, inst.num_vars());
            let reference = ranked(&inst, &c.0);
            let x = o.solve(&c).unwrap();
            assert_eq!(x, reference[0].1);
            let top = o.top_k(&c, 4).unwrap();
            for (got, (v, want)) in top.iter().zip(&reference) {
                assert_eq!(got, want);
                assert!((cost_of(&c.0, got) - v).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn robust_solve_matches_enumeration() {
    let mut rng = RngStream::new(13, 0);
    for inst in instances() {
        let o = Oracle::new(inst.clone());
        let n = inst.num_vars();
        for (rho, gamma) in [
            (0.5, n as f64 / 8.0),
            (0.25, 1.5),
            (0.5, 0.75),
            (1.0, 100.0),
            (0.5, 0.0),
        ] {
            let u = UncertaintyParams::new(rho, gamma).unwrap();
            for _ in 0..15 {
                let c = integer_costs(&mut rng, n, -1, 6);
                let (value, x) = robust_reference(&inst, &c.0, rho, gamma);
                let got = o.robust_solve(&c, &u).unwrap();
                assert_eq!(got, x, "{inst} rho={rho} gamma={gamma} {c:?}");
                assert_eq!(o.worst_case_cost(&c, &got, &u).unwrap(), value);
            }
        }
    }
}

#[test]
fn robust_solve_audit_equals_threshold_count() {
    let o = Oracle::new(ProblemInstance::grid(3, 3).unwrap());
    let c = CostVector(vec![
        1.0, 2.0, 2.0, 3.0, 1.0, 0.0, 4.0, 5.0, 1.0, 2.0, 3.0, 3.0,
    ]);
    let u = UncertaintyParams::new(0.5, 1.5).unwrap();
    let before = o.solve_count();
    o.robust_solve(&c, &u).unwrap();
    // distinct {0.5 |c_i|} ∪ {0} = {0, 0.5, 1, 1.5, 2, 2.5}
    assert_eq!(o.robust_solve_cost(&c, &u), 6);
    assert_eq!(o.solve_count() - before, 6);
}

#[test]
fn tsp_tour_order_visits_every_node() {
    let mut rng = RngStream::new(14, 0);
    let o = Oracle::new(ProblemInstance::tsp(7).unwrap());
    for _ in 0..20 {
        let x = o.solve(&uniform_costs(&mut rng, 21)).unwrap();
        let mut tour = tour_order(7, &x).unwrap();
        assert_eq!(tour[0], 0);
        tour.sort_unstable();
        assert_eq!(tour, (0..7).collect::<Vec<_>>());
    }
}

#[test]
fn euclidean_instance_prefers_convex_hull() {
    let inst = ProblemInstance::tsp_with_coords(vec![
        (0.0, 0.0),
        (2.0, 0.0),
        (2.0, 1.0),
        (0.0, 1.0),
        (1.0, 0.1),
    ])
    .unwrap();
    let o = Oracle::new(inst.clone());
    let c = inst.euclidean_costs().unwrap();
    let x = o.solve(&c).unwrap();
    assert_eq!(x, ranked(&inst, &c.0)[0].1);
    let order = tour_order(5, &x).unwrap();
    let pos = order.iter().position(|&v| v == 4).unwrap();
    // the interior point sits between the two bottom corners
    let (a, b) = (order[(pos + 4) % 5], order[(pos + 1) % 5]);
    assert_eq!([a.min(b), a.max(b)], [0, 1]);
}

#[test]
fn descriptor_round_trip() {
    for s in [
        "grid:3x4",
        "tsp:6",
        "select:3",
        "tsp:3,coords=0.100000,0.200000;1.000000,0.000000;0.500000,0.500000",
    ] {
        let inst: ProblemInstance = s.parse().unwrap();
        assert_eq!(inst.to_string(), s);
    }
    for bad in [
        "grid:3",
        "grid:0x3",
        "tsp:x",
        "tsp:3,coords=0,0;1,1",
        "cube:3",
        "",
    ] {
        assert!(bad.parse::<ProblemInstance>().is_err(), "{bad}");
    }
}

#[test]
fn dimension_and_size_errors() {
    let o = Oracle::new(ProblemInstance::grid(2, 2).unwrap());
    assert!(o.solve(&CostVector(vec![1.0; 3])).is_err());
    assert!(o.solve(&CostVector(vec![1.0, f64::NAN, 1.0, 1.0])).is_err());
    assert!(o.top_k(&CostVector(vec![1.0; 4]), 0).is_err());
    let big = Oracle::new(ProblemInstance::tsp(12).unwrap());
    assert!(big.top_k(&CostVector(vec![1.0; 66]), 2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn grid_solution_is_feasible_and_optimal(c in prop::collection::vec(-5.0f64..5.0, 12)) {
        let inst = ProblemInstance::grid(3, 3).unwrap();
        let o = Oracle::new(inst.clone());
        let c = CostVector(c);
        let x = o.solve(&c).unwrap();
        prop_assert!(o.is_feasible(&x));
        let best = ranked(&inst, &c.0)[0].0;
        prop_assert!((cost_of(&c.0, &x) - best).abs() < 1e-9);
    }

    #[test]
    fn robust_value_bounds(c in prop::collection::vec(0.0f64..5.0, 10), rho in 0.0f64..1.0, gamma in 0.0f64..4.0) {
        let inst = ProblemInstance::tsp(5).unwrap();
        let o = Oracle::new(inst);
        let c = CostVector(c);
        let u = UncertaintyParams::new(rho, gamma).unwrap();
        let nominal = o.solve(&c).unwrap();
        let robust = o.robust_solve(&c, &u).unwrap();
        let wr = o.worst_case_cost(&c, &robust, &u).unwrap();
        let wn = o.worst_case_cost(&c, &nominal, &u).unwrap();
        prop_assert!(wr <= wn + 1e-9);
        prop_assert!(wr >= cost_of(&c.0, &robust) - 1e-12);
        prop_assert!(wr <= (1.0 + rho) * cost_of(&c.0, &robust) + 1e-9);
    }

    #[test]
    fn top_k_is_sorted_and_distinct(c in prop::collection::vec(0.0f64..3.0, 10), k in 1usize..8) {
        let o = Oracle::new(ProblemInstance::grid(4, 2).unwrap());
        let c = CostVector(c);
        let top = o.top_k(&c, k).unwrap();
        prop_assert_eq!(top.len(), k.min(4));
        for w in top.windows(2) {
            prop_assert!(w[0] != w[1]);
            prop_assert!(cost_of(&c.0, &w[0]) <= cost_of(&c.0, &w[1]) + 1e-12);
        }
    }
}
