mod common;

use common::*;
use proptest::prelude::*;
use relaysim::load_solver::{
    backhaul_load, fixed_point, solve_own_load, BackhaulMethod, BackhaulModel, BackhaulOptions,
    FixedPointOptions,
};
use relaysim::scenario::build_association;
use relaysim::sinr_model::{sinr_params, t_factors, CouplingTerms};
use relaysim::{Configuration, EvalOptions, NetworkEvaluator};

fn evaluator(name: &str) -> NetworkEvaluator {
    NetworkEvaluator::new(network(name), EvalOptions::default())
}

#[test]
fn own_load_root_solves_its_equation() {
    // x = Σ_n T_n(x) g_n with W = 3
    let g = [0.05, 0.1, 0.15];
    let x = solve_own_load(&g);
    let t = t_factors(3, x);
    let rhs: f64 = t.iter().zip(&g).map(|(t, g)| t * g).sum();
    assert!((x - rhs).abs() < 1e-10, "{x} vs {rhs}");
    assert!(x > 0.0 && x < g.iter().sum::<f64>());
    assert_eq!(solve_own_load(&[0.0; 4]), 0.0);
}

#[test]
fn iteration_converges_quickly_on_seven_cells() {
    let ev = evaluator("seven_cell.toml");
    for cfg in [
        Configuration::new(vec![], 4, 0, 0),
        Configuration::new(vec![12, 60], 3, 5, 4),
    ] {
        let a = ev.evaluate_full(&cfg).unwrap().loads.access;
        assert!(a.converged && a.stable);
        assert!(a.iterations < 10, "{} iterations", a.iterations);
        assert!(a.history[0].iter().all(|&x| x == 0.0));
    }
}

#[test]
fn iterates_rise_when_interference_dominates() {
    let ev = evaluator("desk_two_station.toml");
    for p in 6..16 {
        let a = ev.evaluate_full(&Configuration::new(vec![], p, 0, 0)).unwrap().loads.access;
        for w in a.history.windows(2) {
            for (x, y) in w[0].iter().zip(&w[1]) {
                assert!(y >= x, "p{p}: iterate decreased {x} -> {y}");
            }
        }
    }
}

#[test]
fn light_bursty_interference_lifts_the_fitted_median() {
    // one interferer, activity ρ: the fitted I+N median drops below N
    // exactly when H/Y > N, whatever the (small) load
    let noise = 1.0;
    for (y, h, below) in [(0.5, 2.0, true), (0.5, 0.2, false)] {
        let terms = CouplingTerms::from_matrices(
            vec![vec![0.0, y], vec![0.0, 0.0]],
            vec![vec![0.0, h], vec![0.0, 0.0]],
        );
        for rho in [1e-3, 1e-2] {
            let clean = sinr_params(1.0, &terms.moments(1, &[0.0, 0.0]), noise).unwrap();
            let busy = sinr_params(1.0, &terms.moments(1, &[rho, 0.0]), noise).unwrap();
            assert_eq!(busy.mu > clean.mu, below, "H={h} ρ={rho}");
        }
    }
}

#[test]
fn tighter_tolerance_refines_the_same_point() {
    let ev = evaluator("desk_three_cell.toml");
    let cfg = Configuration::new(vec![40], 1, 1, 1);
    let full = ev.evaluate_full(&cfg).unwrap();
    let fine = fixed_point(
        &full.model,
        &FixedPointOptions {
            tolerance: 1e-9,
            max_iterations: 500,
        },
    )
    .unwrap();
    assert!(fine.converged);
    for (a, b) in full.loads.access.loads.iter().zip(&fine.loads) {
        assert!((a - b).abs() < 0.02);
    }
}

#[test]
fn saturated_traffic_is_infeasible() {
    let sc = scenario("desk_two_station.toml").modified(|s| s.traffic.mean = 500.0).unwrap();
    let ev = NetworkEvaluator::new(relaysim::Network::new(sc).unwrap(), EvalOptions::default());
    let r = ev.evaluate(&Configuration::new(vec![], 0, 0, 0)).unwrap();
    assert!(!r.feasible);
    assert!(r.energy_per_bit.is_infinite() && r.cell_delay.is_infinite());
    assert!(matches!(ev.baseline(), Err(relaysim::Error::NoFeasible)));
}

#[test]
fn zero_traffic_means_zero_load() {
    let sc = scenario("desk_two_station.toml").modified(|s| s.traffic.mean = 0.0).unwrap();
    let ev = NetworkEvaluator::new(relaysim::Network::new(sc).unwrap(), EvalOptions::default());
    let full = ev.evaluate_full(&Configuration::new(vec![], 0, 0, 0)).unwrap();
    assert!(full.loads.access.loads.iter().all(|&x| x == 0.0));
    assert_eq!(full.loads.access.iterations, 1);
}

#[test]
fn backhaul_load_formula() {
    // ω̄/β Σ Φ_k / R_k
    let rho = backhaul_load(5.0, 0.1, &[1e4, 2e4], &[4e7, 5e7]);
    assert!((rho - 50.0 * (1e4 / 4e7 + 2e4 / 5e7)).abs() < 1e-12);
}

#[test]
fn backhaul_combination_probabilities_sum_to_one() {
    let net = network("seven_cell.toml");
    let dep = net.deploy(&Configuration::new(vec![5, 70], 2, 2, 3), true).unwrap();
    let assoc = build_association(&dep);
    let model = BackhaulModel::new(&dep, &assoc);
    for load in [0.01, 0.2, 0.45] {
        let partial: Vec<f64> = (0..dep.len())
            .map(|k| if dep.stations[k].donor.is_some() { load } else { 0.0 })
            .collect();
        let combos = model.combos(&partial);
        assert_eq!(combos.len(), 3usize.pow(7));
        let total: f64 = combos.iter().map(|c| c.probability).sum();
        assert!((total - 1.0).abs() < 1e-9, "{total}");
    }
}

#[test]
fn backhaul_monte_carlo_agrees_with_enumeration() {
    let net = network("seven_cell.toml");
    let dep = net.deploy(&Configuration::new(vec![5, 70], 2, 2, 3), true).unwrap();
    let assoc = build_association(&dep);
    let model = BackhaulModel::new(&dep, &assoc);
    let partial: Vec<f64> = (0..dep.len())
        .map(|k| if dep.stations[k].donor.is_some() { 0.3 } else { 0.0 })
        .collect();
    let exact = model.rates(
        &partial,
        &BackhaulOptions {
            method: BackhaulMethod::Exact,
            ..Default::default()
        },
    );
    let mc = model.rates(
        &partial,
        &BackhaulOptions {
            method: BackhaulMethod::MonteCarlo,
            seed: 99,
            ..Default::default()
        },
    );
    for (e, m) in exact.iter().zip(&mc) {
        match (e, m) {
            (Some(e), Some(m)) => assert!((m / e - 1.0).abs() < 0.01, "{m} vs {e}"),
            (None, None) => {}
            _ => panic!("methods disagree on which stations are relays"),
        }
    }
}

#[test]
fn small_cells_remove_backhaul_terms() {
    let net = network("desk_three_cell.toml");
    let cfg = Configuration::new(vec![60], 1, 1, 2);
    let relay = NetworkEvaluator::new(net.clone(), EvalOptions::default()).evaluate(&cfg).unwrap();
    let small = NetworkEvaluator::new(
        net,
        EvalOptions {
            small_cell: true,
            ..Default::default()
        },
    )
    .evaluate(&cfg)
    .unwrap();
    assert!(small.loads.backhaul.is_none());
    assert!(small.stations.iter().all(|s| s.backhaul_delay.is_none()));
    assert!(small.cell_delay < relay.cell_delay);
    assert!(small.energy_per_bit <= relay.energy_per_bit * (1.0 + 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn loads_are_bounded(site in 0usize..180, p in 0u32..4, r in 0u32..4, b in 0u32..4) {
        let ev = evaluator("desk_three_cell.toml");
        let full = ev.evaluate_full(&Configuration::new(vec![site], p, r, b)).unwrap();
        let a = &full.loads.access;
        if full.report.feasible {
            for &x in &a.loads {
                prop_assert!((0.0..1.0).contains(&x));
            }
            if let Some(bh) = &full.loads.backhaul {
                for &x in &bh.loads {
                    prop_assert!((0.0..1.0).contains(&x));
                }
            }
        }
    }
}
