//! End-to-end optimizer checks against hand-computed power figures.

use fogsplit::optimizer::{
    baseline_cloud, brute_force_oracle, evaluate, solve_exact, solve_greedy, CandidatePolicy,
    Placement, SolverOpts,
};
use fogsplit::powermodel::Catalog;
use fogsplit::topology::Topology;
use fogsplit::workload::make_demand_set;

fn setup(sites: usize, per_site: usize) -> (Topology, Catalog<f64>) {
    (Topology::build(sites, per_site, 4).unwrap(), Catalog::table1())
}

/// All-cloud power of one 1000 MIPS / 1 Mbps demand, by hand:
/// net = 0.3440741 (IoT) + 9.02 (ONU) + 0.03 (edge-fog) + 0.0103477 (metro sw)
///     + 0.0121875 (metro rt) + 4 x 0.044325 (core) + 0.0225352 (cloud LAN)
///     = 9.6164444; cpu = 2.5 x 251/10800 x 1000 = 58.1018519.
const CLOUD_1000: f64 = 67.7182963;

#[test]
fn hand_checked_cloud_evaluation() {
    let (t, c) = setup(4, 5);
    let set = make_demand_set(&t, &c, 1, 1.0, 1000.0).unwrap();
    let base = baseline_cloud(&t, &c, &set.demands).unwrap();
    assert!((base.power.total - CLOUD_1000).abs() < 1e-6, "{}", base.power.total);
    assert!((base.power.network - 9.6164444).abs() < 1e-6);
    assert!((base.power.processing - 58.1018519).abs() < 1e-6);
    // layer split: cloud layer carries LAN net + server cpu
    assert!((base.power.by_layer.cloud - (58.1018519 + 0.0225352)).abs() < 1e-6);
    assert!((base.power.by_layer.iot - 0.3440741).abs() < 1e-6);
    assert!((base.power.by_layer.core - 0.17730).abs() < 1e-6);
}

#[test]
fn self_hosting_draws_cpu_only() {
    let (t, c) = setup(4, 5);
    let set = make_demand_set(&t, &c, 1, 1.0, 1000.0).unwrap();
    let p = Placement::all_on(&set.demands, set.demands[0].source);
    let power = evaluate(&t, &c, &set.demands, &p).unwrap();
    assert_eq!(power.network, 0.0);
    assert!((power.total - 3.6).abs() < 1e-9);
}

#[test]
fn exact_takes_the_local_device_when_it_fits() {
    let (t, c) = setup(4, 5);
    // 0.5 Mbps -> 500 MIPS; self-hosting costs 0.33 + 3.27 * 0.5 = 1.965 W
    let set = make_demand_set(&t, &c, 1, 0.5, 1000.0).unwrap();
    let r = solve_exact(
        &t,
        &c,
        &set.demands,
        1,
        CandidatePolicy::Hierarchy,
        &SolverOpts::default(),
    )
    .unwrap();
    assert!(r.stats.optimal);
    assert!((r.power.total - 1.965).abs() < 1e-9, "{}", r.power.total);
    assert_eq!(r.placement.shares[0], vec![(set.demands[0].source, 500.0)]);
}

#[test]
fn exact_never_beats_nor_loses_to_the_oracle() {
    let (t, c) = setup(2, 2);
    for (mbps, k) in [(1.0, 1), (2.0, 2), (5.0, 2), (8.0, 3)] {
        let set = make_demand_set(&t, &c, 2, mbps, 1000.0).unwrap();
        let exact = solve_exact(
            &t,
            &c,
            &set.demands,
            k,
            CandidatePolicy::Hierarchy,
            &SolverOpts::default(),
        )
        .unwrap();
        let oracle =
            brute_force_oracle(&t, &c, &set.demands, k, CandidatePolicy::Hierarchy, 1.0).unwrap();
        assert!(exact.stats.optimal);
        let rel = (exact.power.total - oracle.power.total).abs() / oracle.power.total;
        assert!(
            rel < 1e-6,
            "mbps {mbps} k {k}: exact {} vs oracle {}",
            exact.power.total,
            oracle.power.total
        );
    }
}

#[test]
fn greedy_is_feasible_and_exact_is_no_worse() {
    let (t, c) = setup(4, 5);
    for k in [1usize, 2, 4] {
        let set = make_demand_set(&t, &c, 5, 5.0, 1000.0).unwrap();
        let greedy =
            solve_greedy(&t, &c, &set.demands, k, CandidatePolicy::Hierarchy, 1.0).unwrap();
        let exact = solve_exact(
            &t,
            &c,
            &set.demands,
            k,
            CandidatePolicy::Hierarchy,
            &SolverOpts::default(),
        )
        .unwrap();
        assert!(!greedy.stats.optimal);
        assert!(exact.power.total <= greedy.power.total + 1e-9);
        greedy.placement.validate(&set.demands, k, 1.0).unwrap();
        exact.placement.validate(&set.demands, k, 1.0).unwrap();
    }
}

#[test]
fn exact_is_deterministic() {
    let (t, c) = setup(4, 5);
    let set = make_demand_set(&t, &c, 5, 5.0, 1000.0).unwrap();
    let run = || {
        solve_exact(
            &t,
            &c,
            &set.demands,
            3,
            CandidatePolicy::Hierarchy,
            &SolverOpts::default(),
        )
        .unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.placement, b.placement);
    assert_eq!(a.power.total, b.power.total);
    assert_eq!(a.stats.nodes_explored, b.stats.nodes_explored);
}

#[test]
fn warm_start_caps_the_result() {
    let (t, c) = setup(4, 5);
    let set = make_demand_set(&t, &c, 5, 5.0, 1000.0).unwrap();
    let k2 = solve_exact(
        &t,
        &c,
        &set.demands,
        2,
        CandidatePolicy::Hierarchy,
        &SolverOpts::default(),
    )
    .unwrap();
    let k3 = solve_exact(
        &t,
        &c,
        &set.demands,
        3,
        CandidatePolicy::Hierarchy,
        &SolverOpts {
            warm_start: Some(k2.placement.clone()),
            ..Default::default()
        },
    )
    .unwrap();
    assert!(k3.power.total <= k2.power.total + 1e-9);
}

#[test]
fn budget_exhaustion_returns_incumbent_not_error() {
    let (t, c) = setup(4, 5);
    let set = make_demand_set(&t, &c, 20, 5.0, 1000.0).unwrap();
    let r = solve_exact(
        &t,
        &c,
        &set.demands,
        3,
        CandidatePolicy::Hierarchy,
        &SolverOpts {
            max_nodes: 50,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(!r.stats.optimal);
    assert!(r.power.total.is_finite());
    r.placement.validate(&set.demands, 3, 1.0).unwrap();
}

#[test]
fn oracle_refuses_oversized_instances() {
    let (t, c) = setup(4, 5);
    let set = make_demand_set(&t, &c, 3, 1.0, 1000.0).unwrap();
    let err = brute_force_oracle(&t, &c, &set.demands, 1, CandidatePolicy::Hierarchy, 1.0)
        .unwrap_err();
    assert!(matches!(err, fogsplit::Error::OracleCap(_)), "{err}");
    let small = make_demand_set(&t, &c, 1, 1.0, 1000.0).unwrap();
    let err =
        brute_force_oracle(&t, &c, &small.demands, 4, CandidatePolicy::Hierarchy, 1.0).unwrap_err();
    assert!(matches!(err, fogsplit::Error::OracleCap(_)), "{err}");
}

#[test]
fn peers_policy_matches_oracle_too() {
    let (t, c) = setup(2, 2);
    let set = make_demand_set(&t, &c, 2, 3.0, 1000.0).unwrap();
    let policy = CandidatePolicy::Peers { cross_site: false };
    let exact = solve_exact(&t, &c, &set.demands, 2, policy, &SolverOpts::default()).unwrap();
    let oracle = brute_force_oracle(&t, &c, &set.demands, 2, policy, 1.0).unwrap();
    assert!((exact.power.total - oracle.power.total).abs() / oracle.power.total < 1e-6);
}

#[test]
fn f32_pipeline_smoke() {
    let t = Topology::build(2, 2, 4).unwrap();
    let c: Catalog<f32> = Catalog::table1();
    let set = make_demand_set(&t, &c, 2, 2.0, 1000.0).unwrap();
    let r = solve_greedy(&t, &c, &set.demands, 2, CandidatePolicy::Hierarchy, 1.0).unwrap();
    assert!(r.power.total.is_finite() && r.power.total > 0.0);
    let base = baseline_cloud(&t, &c, &set.demands).unwrap();
    assert!(r.power.total <= base.power.total * 1.001);
}
