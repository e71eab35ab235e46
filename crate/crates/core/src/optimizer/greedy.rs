//! Deterministic greedy heuristic: biggest demands first, each filled by
//! repeatedly taking the host with the lowest incremental power per MIPS.

use crate::error::{Error, Result};
use crate::powermodel::{Catalog, Sharing};
use crate::scalar::Scalar;
use crate::topology::{NodeId, Topology};
use crate::workload::Demand;

use super::evaluate::{evaluated_result, Placement, SolveResult, SolverStats};
use super::{candidate_nodes, CandidatePolicy};

struct LoadState<T> {
    traffic: Vec<T>,
    cpu: Vec<T>,
}

impl<T: Scalar> LoadState<T> {
    fn new(n: usize) -> Self {
        LoadState {
            traffic: vec![T::zero(); n],
            cpu: vec![T::zero(); n],
        }
    }

    /// Incremental network power of adding stream `t` along `path`, or
    /// `None` if some device would exceed its Gbps capacity.
    fn network_delta(&self, catalog: &Catalog<T>, topology: &Topology, path: &[NodeId], t: T) -> Option<T> {
        let mut delta = T::zero();
        for &v in path {
            let kind = topology.kind(v).ok()?;
            // devices without a network subsystem (cloud server LAN ingress)
            // carry the stream without drawing network power
            let Some(net) = catalog.network(kind) else {
                continue;
            };
            if self.traffic[v.0] + t > net.capacity {
                return None;
            }
            delta += net.pue * net.proportional_slope() * t;
            if net.sharing == Sharing::Dedicated && self.traffic[v.0] == T::zero() {
                delta += net.pue * net.idle_power;
            }
        }
        Some(delta)
    }

    fn cpu_delta(&self, catalog: &Catalog<T>, topology: &Topology, n: NodeId, amount: T) -> T {
        let kind = topology.kind(n).unwrap();
        let cpu = catalog.processing(kind).unwrap();
        let mut delta = cpu.pue * cpu.proportional_slope() * amount;
        if cpu.sharing == Sharing::Dedicated && self.cpu[n.0] == T::zero() {
            delta += cpu.pue * cpu.idle_power;
        }
        delta
    }

    fn apply(&mut self, path: &[NodeId], t: T, n: NodeId, amount: T) {
        for &v in path {
            self.traffic[v.0] += t;
        }
        self.cpu[n.0] += amount;
    }
}

pub fn solve_greedy<T: Scalar>(
    topology: &Topology,
    catalog: &Catalog<T>,
    demands: &[Demand<T>],
    k: usize,
    policy: CandidatePolicy,
    min_alloc: T,
) -> Result<SolveResult<T>> {
    if k == 0 {
        return Err(Error::InvalidParameter("K must be >= 1".into()));
    }
    let mut order: Vec<usize> = (0..demands.len()).collect();
    order.sort_by(|&a, &b| {
        demands[b]
            .cpu
            .partial_cmp(&demands[a].cpu)
            .unwrap()
            .then(demands[a].id.cmp(&demands[b].id))
    });

    let mut state = LoadState::new(topology.node_count());
    let mut shares: Vec<Vec<(NodeId, T)>> = vec![Vec::new(); demands.len()];

    for &di in &order {
        let d = &demands[di];
        let candidates = candidate_nodes(topology, policy, d.source)?;
        let mut residual = d.cpu;
        let mut splits = 0usize;
        while residual > T::zero() {
            if splits >= k {
                return Err(Error::Infeasible(format!(
                    "demand {} cannot be placed within {k} splits",
                    d.id
                )));
            }
            let last_split = splits == k - 1;
            let mut best: Option<(T, NodeId, T, T, Vec<NodeId>)> = None;
            for &n in &candidates {
                if shares[di].iter().any(|&(h, _)| h == n) {
                    continue;
                }
                let kind = topology.kind(n)?;
                if catalog.processing(kind).is_none() {
                    continue;
                }
                let cap_left = match catalog.cpu_capacity(kind) {
                    None => T::infinity(),
                    Some(cap) => cap - state.cpu[n.0],
                };
                let mut amount = residual.min(cap_left);
                // never leave a sliver below the minimum allocation behind
                if residual - amount > T::zero() && residual - amount < min_alloc {
                    amount = residual - min_alloc;
                }
                if amount < min_alloc {
                    continue;
                }
                if last_split && amount < residual {
                    continue;
                }
                let path = topology.path(d.source, n)?;
                let Some(net_delta) = state.network_delta(catalog, topology, &path, d.traffic)
                else {
                    continue;
                };
                let delta = net_delta + state.cpu_delta(catalog, topology, n, amount);
                let metric = delta / amount;
                let better = match &best {
                    None => true,
                    Some((m, bn, ..)) => metric < *m || (metric == *m && n < *bn),
                };
                if better {
                    best = Some((metric, n, amount, d.traffic, path));
                }
            }
            let Some((_, n, amount, t, path)) = best else {
                return Err(Error::Infeasible(format!(
                    "no feasible host for demand {} (residual {residual} MIPS)",
                    d.id
                )));
            };
            let t = if path.is_empty() { T::zero() } else { t };
            state.apply(&path, t, n, amount);
            shares[di].push((n, amount));
            residual -= amount;
            splits += 1;
        }
    }

    let placement = Placement { shares };
    placement.validate(demands, k, min_alloc)?;
    evaluated_result(
        topology,
        catalog,
        demands,
        placement,
        SolverStats {
            optimal: false,
            bound_gap: f64::NAN,
            ..Default::default()
        },
    )
}
