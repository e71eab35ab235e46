//! Scenario sweep harness: runs a solver over a grid of traffic rates and
//! split limits K, against the all-cloud baseline, and collects one result
//! row per (traffic, K) cell.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::optimizer::{
    baseline_cloud, brute_force_oracle, solve_exact, solve_greedy, CandidatePolicy, SolveResult,
    SolverOpts,
};
use crate::powermodel::Catalog;
use crate::scalar::Scalar;
use crate::topology::Topology;
use crate::workload::{demand_set_from_sources, make_demand_set, DemandSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Exact,
    Greedy,
    Oracle,
}

impl SolverKind {
    pub fn label(&self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Greedy => "greedy",
            SolverKind::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SolverKind::Exact),
            "greedy" => Ok(SolverKind::Greedy),
            "oracle" => Ok(SolverKind::Oracle),
            other => Err(Error::InvalidParameter(format!(
                "unknown solver '{other}' (expected exact, greedy or oracle)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig<T> {
    pub name: String,
    pub site_count: usize,
    pub iot_per_site: usize,
    pub core_hop_count: usize,
    /// Demands are sourced at the first N IoT devices, site-major.
    pub active_iot_count: usize,
    /// Instructions per bit.
    pub intensity: T,
    pub traffic_mbps: Vec<T>,
    pub k_values: Vec<usize>,
    pub solver: SolverKind,
    pub policy: CandidatePolicy,
    pub min_alloc: T,
    pub max_nodes: u64,
    /// Explicit (site, device, Mbps) demand overrides; when set, the traffic
    /// grid and `active_iot_count` are ignored.
    pub sources: Option<Vec<(usize, usize, T)>>,
}

impl<T: Scalar> ScenarioConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.traffic_mbps.is_empty() && self.sources.is_none() {
            return Err(Error::InvalidParameter("empty traffic grid".into()));
        }
        if self.k_values.is_empty() {
            return Err(Error::InvalidParameter("empty K grid".into()));
        }
        if self.k_values.iter().any(|&k| k == 0) {
            return Err(Error::InvalidParameter("K must be >= 1".into()));
        }
        if self.traffic_mbps.iter().any(|&t| t <= T::zero()) {
            return Err(Error::InvalidParameter("traffic must be > 0 Mbps".into()));
        }
        Ok(())
    }
}

/// One sweep cell. Power figures are watts.
#[derive(Debug, Clone)]
pub struct ResultRow<T> {
    pub scenario: String,
    pub demand_mips: T,
    pub traffic_gbps: T,
    pub k: usize,
    pub solver: SolverKind,
    pub total: T,
    pub network: T,
    pub processing: T,
    pub layer: [T; 6],
    pub baseline: T,
    pub savings_vs_cloud_pct: T,
    pub savings_vs_k1_pct: T,
    pub optimal: bool,
    pub wall: Duration,
}

/// Percentage saved relative to `baseline`; rejects degenerate baselines.
pub fn savings<T: Scalar>(total: T, baseline: T) -> Result<T> {
    if baseline <= T::zero() {
        return Err(Error::InvalidParameter(format!(
            "baseline power {baseline} W is not positive"
        )));
    }
    Ok((baseline - total) / baseline * T::c(100.0))
}

fn run_solver<T: Scalar>(
    topology: &Topology,
    catalog: &Catalog<T>,
    demands: &[crate::workload::Demand<T>],
    k: usize,
    cfg: &ScenarioConfig<T>,
    warm: Option<&SolveResult<T>>,
) -> Result<SolveResult<T>> {
    match cfg.solver {
        SolverKind::Greedy => solve_greedy(topology, catalog, demands, k, cfg.policy, cfg.min_alloc),
        SolverKind::Oracle => {
            brute_force_oracle(topology, catalog, demands, k, cfg.policy, cfg.min_alloc)
        }
        SolverKind::Exact => {
            let opts = SolverOpts {
                min_alloc: cfg.min_alloc,
                max_nodes: cfg.max_nodes,
                warm_start: warm.map(|w| w.placement.clone()),
            };
            solve_exact(topology, catalog, demands, k, cfg.policy, &opts)
        }
    }
}

/// Runs the full (traffic x K) grid. K cells are solved in ascending order;
/// with the exact solver each cell warm-starts the next, so reported power
/// never increases with K even when the node budget runs out.
pub fn run_sweep<T: Scalar>(
    cfg: &ScenarioConfig<T>,
    catalog: &Catalog<T>,
) -> Result<Vec<ResultRow<T>>> {
    cfg.validate()?;
    let topology = Topology::build(cfg.site_count, cfg.iot_per_site, cfg.core_hop_count)?;

    let mut ks = cfg.k_values.clone();
    ks.sort_unstable();
    ks.dedup();

    // explicit sources collapse the traffic grid to a single demand set
    let sets: Vec<DemandSet<T>> = match &cfg.sources {
        Some(sources) => {
            let mut pairs = Vec::with_capacity(sources.len());
            for &(site, dev, mbps) in sources {
                if site >= topology.site_count() || dev >= topology.iot_per_site() {
                    return Err(Error::InvalidParameter(format!(
                        "demand source site {site} device {dev} outside the topology"
                    )));
                }
                pairs.push((topology.iot_id(site, dev), mbps));
            }
            vec![demand_set_from_sources(&topology, catalog, &pairs, cfg.intensity)?]
        }
        None => cfg
            .traffic_mbps
            .iter()
            .map(|&mbps| {
                make_demand_set(&topology, catalog, cfg.active_iot_count, mbps, cfg.intensity)
            })
            .collect::<Result<_>>()?,
    };

    let mut rows = Vec::with_capacity(sets.len() * ks.len());
    for set in &sets {
        let demands = &set.demands;
        let baseline = baseline_cloud(&topology, catalog, demands)?;

        let mut prev: Option<SolveResult<T>> = None;
        let mut k1_total: Option<T> = None;
        for &k in &ks {
            let result = run_solver(&topology, catalog, demands, k, cfg, prev.as_ref())?;
            let total = result.power.total;
            let base_total = baseline.power.total;
            let first = *k1_total.get_or_insert(total);
            rows.push(ResultRow {
                scenario: cfg.name.clone(),
                demand_mips: demands.first().map(|d| d.cpu).unwrap_or_else(T::zero),
                traffic_gbps: demands
                    .first()
                    .map(|d| d.traffic)
                    .unwrap_or_else(T::zero),
                k,
                solver: cfg.solver,
                total,
                network: result.power.network,
                processing: result.power.processing,
                layer: [
                    result.power.by_layer.iot,
                    result.power.by_layer.access_fog,
                    result.power.by_layer.edge_fog,
                    result.power.by_layer.metro,
                    result.power.by_layer.core,
                    result.power.by_layer.cloud,
                ],
                baseline: base_total,
                savings_vs_cloud_pct: savings(total, base_total)?,
                savings_vs_k1_pct: savings(total, first)?,
                optimal: result.stats.optimal,
                wall: result.stats.wall,
            });
            prev = Some(result);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_kind_round_trip() {
        for kind in [SolverKind::Exact, SolverKind::Greedy, SolverKind::Oracle] {
            assert_eq!(kind.label().parse::<SolverKind>().unwrap(), kind);
        }
        assert!("simplex".parse::<SolverKind>().is_err());
    }

    #[test]
    fn savings_examples() {
        assert_eq!(savings(50.0, 100.0).unwrap(), 50.0);
        assert_eq!(savings(100.0, 100.0).unwrap(), 0.0);
        assert!(savings(10.0, 0.0).is_err());
        assert!(savings(120.0, 100.0).unwrap() < 0.0);
    }

    fn tiny_config(solver: SolverKind) -> ScenarioConfig<f64> {
        ScenarioConfig {
            name: "tiny".into(),
            site_count: 2,
            iot_per_site: 2,
            core_hop_count: 4,
            active_iot_count: 2,
            intensity: 1000.0,
            traffic_mbps: vec![1.0, 2.0],
            k_values: vec![1, 2],
            solver,
            policy: CandidatePolicy::Hierarchy,
            min_alloc: 1.0,
            max_nodes: 200_000,
            sources: None,
        }
    }

    #[test]
    fn sweep_shape_and_monotonicity() {
        let cfg = tiny_config(SolverKind::Exact);
        let rows = run_sweep(&cfg, &Catalog::table1()).unwrap();
        assert_eq!(rows.len(), 4);
        // ascending K within a traffic level never increases power
        for pair in rows.chunks(2) {
            assert_eq!(pair[0].k, 1);
            assert_eq!(pair[1].k, 2);
            assert!(pair[1].total <= pair[0].total + 1e-9);
            assert_eq!(pair[0].savings_vs_k1_pct, 0.0);
            assert!(pair[0].total <= pair[0].baseline + 1e-9);
        }
        for r in &rows {
            assert!((r.network + r.processing - r.total).abs() < 1e-9);
            assert!((r.layer.iter().sum::<f64>() - r.total).abs() < 1e-9);
        }
    }

    #[test]
    fn greedy_sweep_runs() {
        let cfg = tiny_config(SolverKind::Greedy);
        let rows = run_sweep(&cfg, &Catalog::table1()).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| !r.optimal));
    }

    #[test]
    fn bad_grids_rejected() {
        let mut cfg = tiny_config(SolverKind::Greedy);
        cfg.k_values.clear();
        assert!(run_sweep(&cfg, &Catalog::table1()).is_err());
        let mut cfg = tiny_config(SolverKind::Greedy);
        cfg.traffic_mbps = vec![0.0];
        assert!(run_sweep(&cfg, &Catalog::table1()).is_err());
    }
}
