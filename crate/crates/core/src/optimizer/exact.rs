//! Exact solver: branch-and-bound over per-(demand, host) activation
//! booleans. Each node is lower-bounded by a continuous relaxation in which
//! activation-triggered costs (device idles, full-stream network power)
//! scale with the fraction of the demand routed over the arc; the residual
//! allocation given fixed activations is a transportation problem solved by
//! min-cost flow.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::powermodel::{Catalog, Sharing};
use crate::scalar::Scalar;
use crate::topology::{NodeId, Topology};
use crate::workload::Demand;

use super::evaluate::{evaluate, Placement, SolveResult, SolverStats};
use super::greedy::solve_greedy;
use super::mcf::{self, Transport, TransportArc};
use super::{candidate_nodes, CandidatePolicy};

#[derive(Debug, Clone)]
pub struct SolverOpts<T> {
    /// Smallest positive split in MIPS.
    pub min_alloc: T,
    /// Branch-and-bound node budget; exceeding it returns the incumbent
    /// flagged non-optimal.
    pub max_nodes: u64,
    /// Optional feasible placement used as the initial incumbent.
    pub warm_start: Option<Placement<T>>,
}

impl<T: Scalar> Default for SolverOpts<T> {
    fn default() -> Self {
        SolverOpts {
            min_alloc: T::one(),
            max_nodes: 500_000,
            warm_start: None,
        }
    }
}

/// Subtrees whose bound is within this relative distance of the incumbent
/// are pruned; keeps the result within 1e-7 of the true optimum while
/// collapsing the many symmetric, equal-cost subtrees.
const PRUNE_REL_TOL: f64 = 1e-7;

#[derive(Clone, Copy, PartialEq, Eq)]
enum ArcState {
    Free,
    On,
    Off,
}

struct ArcInfo<T> {
    demand: usize,
    slot: usize,
    node: NodeId,
    /// Devices traversed by the stream (empty for local hosting).
    path: Vec<NodeId>,
    /// Full-stream proportional network power along the path, watts.
    prop_net: T,
    /// Dedicated devices on the path with nonzero idle:
    /// (device, pue x idle, pue x idle x traffic / capacity).
    net_idles: Vec<(NodeId, T, T)>,
}

struct SlotInfo<T> {
    marginal: T,
    /// pue x idle when the processing subsystem is dedicated, else zero.
    idle: T,
    /// pue x idle / capacity (amortized per MIPS), zero when not dedicated.
    idle_amort: T,
    capacity: Option<T>,
}

struct Search<'a, T> {
    topology: &'a Topology,
    catalog: &'a Catalog<T>,
    demands: &'a [Demand<T>],
    k: usize,
    min_alloc: T,
    max_nodes: u64,
    slots: Vec<SlotInfo<T>>,
    arcs: Vec<ArcInfo<T>>,

    state: Vec<ArcState>,
    on_count: Vec<usize>,
    cover_count: Vec<u32>,
    committed_traffic: Vec<T>,
    cpu_on_count: Vec<u32>,

    /// Arc-index lists (in candidate order) of adjacent interchangeable
    /// demands; the first demand's activation mask must stay lexicographically
    /// >= the second's, which collapses permutation-symmetric subtrees.
    sym_pairs: Vec<(Vec<usize>, Vec<usize>)>,

    best_total: T,
    best_placement: Option<Placement<T>>,
    nodes_explored: u64,
    exhausted: bool,
    min_abandoned_bound: T,
    eps_flow: T,
}

impl<'a, T: Scalar> Search<'a, T> {
    fn constants(&self) -> T {
        let mut c = T::zero();
        for node in self.topology.nodes() {
            if self.cover_count[node.id.0] == 0 {
                continue;
            }
            if let Some(net) = self.catalog.network(node.kind) {
                c += net.pue * net.proportional_slope() * self.committed_traffic[node.id.0];
                if net.sharing == Sharing::Dedicated {
                    c += net.pue * net.idle_power;
                }
            }
        }
        for (s, slot) in self.slots.iter().enumerate() {
            if self.cpu_on_count[s] > 0 {
                c += slot.idle;
            }
        }
        c
    }

    fn build_relaxation(&self) -> Transport<T> {
        let mut arcs = Vec::new();
        for (ai, arc) in self.arcs.iter().enumerate() {
            match self.state[ai] {
                ArcState::Off => continue,
                ArcState::On => {
                    arcs.push(TransportArc {
                        demand: arc.demand,
                        node: arc.slot,
                        unit_cost: self.slots[arc.slot].marginal,
                        lower: self.min_alloc,
                    });
                }
                ArcState::Free => {
                    if self.on_count[arc.demand] >= self.k {
                        continue;
                    }
                    let slot = &self.slots[arc.slot];
                    let mut unit = slot.marginal;
                    if self.cpu_on_count[arc.slot] == 0 {
                        unit += slot.idle_amort;
                    }
                    let mut activation = arc.prop_net;
                    for &(v, _, amort) in &arc.net_idles {
                        if self.cover_count[v.0] == 0 {
                            activation += amort;
                        }
                    }
                    unit += activation / self.demands[arc.demand].cpu;
                    arcs.push(TransportArc {
                        demand: arc.demand,
                        node: arc.slot,
                        unit_cost: unit,
                        lower: T::zero(),
                    });
                }
            }
        }
        Transport {
            supplies: self.demands.iter().map(|d| d.cpu).collect(),
            capacities: self.slots.iter().map(|s| s.capacity).collect(),
            arcs,
        }
    }

    fn try_incumbent(&mut self, placement: Placement<T>) {
        if placement
            .validate(self.demands, self.k, self.min_alloc)
            .is_err()
        {
            return;
        }
        match evaluate(self.topology, self.catalog, self.demands, &placement) {
            Ok(power) => {
                if power.total < self.best_total {
                    self.best_total = power.total;
                    self.best_placement = Some(placement);
                }
            }
            Err(_) => {}
        }
    }

    /// Turn per-arc flows into a placement, absorbing float dust into the
    /// largest share of each demand.
    fn placement_from_flows(&self, active: &[(usize, T)]) -> Placement<T> {
        let mut shares: Vec<Vec<(NodeId, T)>> = vec![Vec::new(); self.demands.len()];
        for &(ai, flow) in active {
            let arc = &self.arcs[ai];
            shares[arc.demand].push((arc.node, flow));
        }
        for (d, sh) in shares.iter_mut().enumerate() {
            if sh.is_empty() {
                continue;
            }
            let sum: T = sh.iter().map(|&(_, x)| x).sum();
            let dust = self.demands[d].cpu - sum;
            let widest = sh
                .iter()
                .enumerate()
                .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap().then(b.0.cmp(&a.0)))
                .map(|(i, _)| i)
                .unwrap();
            sh[widest].1 += dust;
        }
        Placement { shares }
    }

    /// Rounding heuristic: keep the activation pattern the relaxation likes,
    /// reallocate exactly, and offer the result as an incumbent.
    fn attempt_rounding(&mut self, relax_arcs: &[(usize, T)]) {
        let mut chosen: Vec<Vec<(usize, T)>> = vec![Vec::new(); self.demands.len()];
        for &(ai, flow) in relax_arcs {
            let arc = &self.arcs[ai];
            if self.state[ai] == ArcState::On || flow > self.eps_flow {
                chosen[arc.demand].push((ai, flow));
            }
        }
        let mut picked = Vec::new();
        for (d, mut list) in chosen.into_iter().enumerate() {
            list.sort_by(|a, b| {
                let on_a = self.state[a.0] == ArcState::On;
                let on_b = self.state[b.0] == ArcState::On;
                on_b.cmp(&on_a)
                    .then(b.1.partial_cmp(&a.1).unwrap())
                    .then(a.0.cmp(&b.0))
            });
            list.truncate(self.k);
            if list.is_empty() {
                return;
            }
            let _ = d;
            picked.extend(list.into_iter().map(|(ai, _)| ai));
        }
        // network feasibility of the chosen activations
        let mut traffic = vec![T::zero(); self.topology.node_count()];
        for &ai in &picked {
            let arc = &self.arcs[ai];
            for &v in &arc.path {
                traffic[v.0] += self.demands[arc.demand].traffic;
            }
        }
        for node in self.topology.nodes() {
            if let Some(net) = self.catalog.network(node.kind) {
                if traffic[node.id.0] > net.capacity {
                    return;
                }
            }
        }
        let transport = Transport {
            supplies: self.demands.iter().map(|d| d.cpu).collect(),
            capacities: self.slots.iter().map(|s| s.capacity).collect(),
            arcs: picked
                .iter()
                .map(|&ai| TransportArc {
                    demand: self.arcs[ai].demand,
                    node: self.arcs[ai].slot,
                    unit_cost: self.slots[self.arcs[ai].slot].marginal,
                    lower: self.min_alloc,
                })
                .collect(),
        };
        let Some(flow) = mcf::solve(&transport) else {
            return;
        };
        let active: Vec<(usize, T)> = picked
            .iter()
            .zip(&flow.flows)
            .map(|(&ai, &f)| (ai, f))
            .collect();
        let placement = self.placement_from_flows(&active);
        self.try_incumbent(placement);
    }

    /// Can the remaining free bits still be set so that demand `a`'s
    /// activation mask is lexicographically >= demand `b`'s? Ignores the
    /// other constraints, so failing here soundly prunes the subtree.
    fn mask_order_possible(&self, a: &[usize], b: &[usize]) -> bool {
        for (&aa, &bb) in a.iter().zip(b) {
            let a_can1 = self.state[aa] != ArcState::Off;
            let a_can0 = self.state[aa] != ArcState::On;
            let b_can1 = self.state[bb] != ArcState::Off;
            let b_can0 = self.state[bb] != ArcState::On;
            if a_can1 && b_can0 {
                return true; // strictly greater here, rest is free
            }
            if !((a_can1 && b_can1) || (a_can0 && b_can0)) {
                return false; // forced a = 0, b = 1
            }
        }
        true // equal masks remain possible
    }

    fn dive(&mut self, parent_bound: T) {
        self.nodes_explored += 1;
        if self.nodes_explored > self.max_nodes {
            self.exhausted = true;
            self.min_abandoned_bound = self.min_abandoned_bound.min(parent_bound);
            return;
        }
        for i in 0..self.sym_pairs.len() {
            let (a, b) = &self.sym_pairs[i];
            if !self.mask_order_possible(a, b) {
                return;
            }
        }

        let transport = self.build_relaxation();
        let Some(flow) = mcf::solve(&transport) else {
            return; // infeasible under current activations
        };
        let bound = self.constants() + flow.cost;
        if self.best_placement.is_some() && bound >= self.best_total * T::c(1.0 - PRUNE_REL_TOL) {
            return;
        }

        // map relaxation arcs back to search arcs
        let mut relax_arcs = Vec::with_capacity(transport.arcs.len());
        {
            let mut it = flow.flows.iter();
            for (ai, arc) in self.arcs.iter().enumerate() {
                let included = match self.state[ai] {
                    ArcState::Off => false,
                    ArcState::On => true,
                    ArcState::Free => self.on_count[arc.demand] < self.k,
                };
                if included {
                    relax_arcs.push((ai, *it.next().unwrap()));
                }
            }
        }

        // branch variable: free arc carrying relaxation flow
        let mut branch: Option<usize> = None;
        for &(ai, f) in &relax_arcs {
            if self.state[ai] != ArcState::Free || f <= self.eps_flow {
                continue;
            }
            let better = match branch {
                None => true,
                Some(cur) => {
                    let (dc, da) = (self.arcs[cur].demand, self.arcs[ai].demand);
                    let key_cur = (self.demands[dc].cpu, self.arcs[cur].node);
                    let key_new = (self.demands[da].cpu, self.arcs[ai].node);
                    key_new.0 > key_cur.0
                        || (key_new.0 == key_cur.0 && da < dc)
                        || (key_new.0 == key_cur.0 && da == dc && key_new.1 < key_cur.1)
                }
            };
            if better {
                branch = Some(ai);
            }
        }

        let Some(branch_arc) = branch else {
            // the relaxation solution is already integral in the activation
            // sense: it is a feasible placement and its cost equals the bound
            let active: Vec<(usize, T)> = relax_arcs
                .into_iter()
                .filter(|&(ai, f)| self.state[ai] == ArcState::On || f > self.eps_flow)
                .collect();
            let placement = self.placement_from_flows(&active);
            self.try_incumbent(placement);
            return;
        };

        self.attempt_rounding(&relax_arcs);
        if self.best_placement.is_some() && bound >= self.best_total * T::c(1.0 - PRUNE_REL_TOL) {
            return;
        }

        // On child first: commit the activation when the network can carry it
        let t = self.demands[self.arcs[branch_arc].demand].traffic;
        let mut net_ok = true;
        for v in &self.arcs[branch_arc].path {
            if let Some(net) = self.catalog.network(self.topology.nodes()[v.0].kind) {
                if self.committed_traffic[v.0] + t > net.capacity {
                    net_ok = false;
                    break;
                }
            }
        }
        if net_ok {
            self.state[branch_arc] = ArcState::On;
            self.on_count[self.arcs[branch_arc].demand] += 1;
            self.cpu_on_count[self.arcs[branch_arc].slot] += 1;
            let path = self.arcs[branch_arc].path.clone();
            for v in &path {
                self.cover_count[v.0] += 1;
                self.committed_traffic[v.0] += t;
            }
            self.dive(bound);
            for v in &path {
                self.cover_count[v.0] -= 1;
                self.committed_traffic[v.0] -= t;
            }
            self.cpu_on_count[self.arcs[branch_arc].slot] -= 1;
            self.on_count[self.arcs[branch_arc].demand] -= 1;
            self.state[branch_arc] = ArcState::Free;
        }

        self.state[branch_arc] = ArcState::Off;
        self.dive(bound);
        self.state[branch_arc] = ArcState::Free;
    }
}

pub fn solve_exact<T: Scalar>(
    topology: &Topology,
    catalog: &Catalog<T>,
    demands: &[Demand<T>],
    k: usize,
    policy: CandidatePolicy,
    opts: &SolverOpts<T>,
) -> Result<SolveResult<T>> {
    if k == 0 {
        return Err(Error::InvalidParameter("K must be >= 1".into()));
    }
    let start = Instant::now();
    if demands.is_empty() {
        let placement = Placement { shares: Vec::new() };
        let power = evaluate(topology, catalog, demands, &placement)?;
        return Ok(SolveResult {
            placement,
            power,
            stats: SolverStats {
                optimal: true,
                wall: start.elapsed(),
                ..Default::default()
            },
        });
    }

    // flatten candidate arcs; slots are the union of all candidate hosts
    let mut slots: Vec<SlotInfo<T>> = Vec::new();
    let mut slot_of = std::collections::HashMap::new();
    let mut arcs: Vec<ArcInfo<T>> = Vec::new();
    let mut arcs_per_demand = vec![0usize; demands.len()];
    for (di, d) in demands.iter().enumerate() {
        for node in candidate_nodes(topology, policy, d.source)? {
            let kind = topology.kind(node)?;
            let Some(cpu) = catalog.processing(kind) else {
                continue;
            };
            let slot = *slot_of.entry(node).or_insert_with(|| {
                slots.push(SlotInfo {
                    marginal: catalog.cpu_marginal(kind),
                    idle: if cpu.sharing == Sharing::Dedicated {
                        cpu.pue * cpu.idle_power
                    } else {
                        T::zero()
                    },
                    idle_amort: if cpu.sharing == Sharing::Dedicated {
                        cpu.pue * cpu.idle_power / cpu.capacity
                    } else {
                        T::zero()
                    },
                    capacity: catalog.cpu_capacity(kind),
                });
                slots.len() - 1
            });
            let path = topology.path(d.source, node)?;
            let mut prop_net = T::zero();
            let mut net_idles = Vec::new();
            for &v in &path {
                let vk = topology.kind(v)?;
                if let Some(net) = catalog.network(vk) {
                    prop_net += net.pue * net.proportional_slope() * d.traffic;
                    if net.sharing == Sharing::Dedicated && net.idle_power > T::zero() {
                        net_idles.push((
                            v,
                            net.pue * net.idle_power,
                            net.pue * net.idle_power * d.traffic / net.capacity,
                        ));
                    }
                }
            }
            arcs_per_demand[di] += 1;
            arcs.push(ArcInfo {
                demand: di,
                slot,
                node,
                path,
                prop_net,
                net_idles,
            });
        }
        if arcs_per_demand[di] == 0 {
            return Err(Error::Infeasible(format!(
                "demand {} has no candidate hosts",
                d.id
            )));
        }
    }

    // Tighten the idle amortizations: a slot's processing load can never
    // exceed the total CPU of the demands that may use it, and a device's
    // traffic can never exceed k streams per demand routed through it.
    // Amortizing over these (instead of raw capacity) keeps the relaxation
    // a valid lower bound while pruning far more aggressively.
    let mut slot_cpu_potential = vec![T::zero(); slots.len()];
    for arc in &arcs {
        slot_cpu_potential[arc.slot] += demands[arc.demand].cpu;
    }
    for (s, slot) in slots.iter_mut().enumerate() {
        if slot.idle > T::zero() {
            let denom = match slot.capacity {
                Some(cap) => cap.min(slot_cpu_potential[s]),
                None => slot_cpu_potential[s],
            };
            if denom > T::zero() {
                slot.idle_amort = slot.idle_amort.max(slot.idle / denom);
            }
        }
    }
    let mut device_arcs: std::collections::HashMap<usize, Vec<usize>> =
        std::collections::HashMap::new();
    for arc in &arcs {
        for v in &arc.path {
            device_arcs.entry(v.0).or_insert_with(|| vec![0; demands.len()])[arc.demand] += 1;
        }
    }
    for arc in arcs.iter_mut() {
        let t_d = demands[arc.demand].traffic;
        for (v, pue_idle, amort) in arc.net_idles.iter_mut() {
            let counts = &device_arcs[&v.0];
            let mut potential = T::zero();
            for (d, &n) in counts.iter().enumerate() {
                potential += T::from_usize(n.min(k)).unwrap() * demands[d].traffic;
            }
            let cap = catalog
                .network(topology.kind(*v)?)
                .map(|net| net.capacity)
                .unwrap_or_else(T::infinity);
            let denom = cap.min(potential);
            if denom > T::zero() {
                *amort = amort.max(*pue_idle * t_d / denom);
            }
        }
    }

    // Adjacent demands are interchangeable when they share a site, size and
    // candidate structure; their only differing hosts must be their own
    // (exclusive) local devices. Swapping two such demands' placements
    // permutes a solution without changing its cost.
    let mut per_demand_arcs: Vec<Vec<usize>> = vec![Vec::new(); demands.len()];
    let mut slot_arc_count = vec![0usize; slots.len()];
    for (ai, arc) in arcs.iter().enumerate() {
        per_demand_arcs[arc.demand].push(ai);
        slot_arc_count[arc.slot] += 1;
    }
    let mut sym_pairs = Vec::new();
    for d in 0..demands.len().saturating_sub(1) {
        let (a, b) = (&demands[d], &demands[d + 1]);
        if a.cpu != b.cpu || a.traffic != b.traffic {
            continue;
        }
        if topology.node(a.source)?.site != topology.node(b.source)?.site {
            continue;
        }
        let (la, lb) = (&per_demand_arcs[d], &per_demand_arcs[d + 1]);
        if la.len() != lb.len() {
            continue;
        }
        let interchangeable = la.iter().zip(lb).all(|(&ia, &ib)| {
            arcs[ia].node == arcs[ib].node
                || (arcs[ia].node == a.source
                    && arcs[ib].node == b.source
                    && slot_arc_count[arcs[ia].slot] == 1
                    && slot_arc_count[arcs[ib].slot] == 1)
        });
        if interchangeable {
            sym_pairs.push((la.clone(), lb.clone()));
        }
    }

    let arc_count = arcs.len();
    let mut search = Search {
        topology,
        catalog,
        demands,
        k,
        min_alloc: opts.min_alloc,
        max_nodes: opts.max_nodes,
        slots,
        arcs,
        state: vec![ArcState::Free; arc_count],
        on_count: vec![0; demands.len()],
        cover_count: vec![0; topology.node_count()],
        committed_traffic: vec![T::zero(); topology.node_count()],
        cpu_on_count: Vec::new(),
        sym_pairs,
        best_total: T::infinity(),
        best_placement: None,
        nodes_explored: 0,
        exhausted: false,
        min_abandoned_bound: T::infinity(),
        eps_flow: T::c(1e-6),
    };
    search.cpu_on_count = vec![0; search.slots.len()];

    // initial incumbents: caller-provided warm start, then the greedy result
    if let Some(warm) = &opts.warm_start {
        search.try_incumbent(warm.clone());
    }
    if let Ok(greedy) = solve_greedy(topology, catalog, demands, k, policy, opts.min_alloc) {
        search.try_incumbent(greedy.placement);
    }

    search.dive(T::zero());

    let Some(placement) = search.best_placement.take() else {
        return Err(Error::Infeasible(
            "no feasible placement found (even the cloud pool could not absorb the demands)"
                .into(),
        ));
    };
    let power = evaluate(topology, catalog, demands, &placement)?;
    let bound_gap = if search.exhausted {
        let lb = search.min_abandoned_bound.as_f64();
        let ub = power.total.as_f64();
        if lb.is_finite() && ub > 0.0 {
            ((ub - lb) / ub).max(0.0)
        } else {
            f64::NAN
        }
    } else {
        0.0
    };
    Ok(SolveResult {
        placement,
        power,
        stats: SolverStats {
            nodes_explored: search.nodes_explored,
            bound_gap,
            wall: start.elapsed(),
            optimal: !search.exhausted,
        },
    })
}
