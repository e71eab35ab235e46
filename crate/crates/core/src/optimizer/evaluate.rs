//! Placement evaluation: builds per-device load ledgers from the tree paths
//! and prices them with the catalog. Every solver and the brute-force
//! oracle report power through this one evaluator.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::powermodel::Catalog;
use crate::scalar::Scalar;
use crate::topology::{Layer, NodeId, Topology};
use crate::workload::Demand;

/// Absolute MIPS tolerance for flow conservation.
pub const CONSERVATION_TOL: f64 = 1e-9;

/// One placement: per demand, the list of (host, MIPS share).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Placement<T> {
    pub shares: Vec<Vec<(NodeId, T)>>,
}

impl<T: Scalar> Placement<T> {
    pub fn all_on(demands: &[Demand<T>], host: NodeId) -> Self {
        Placement {
            shares: demands.iter().map(|d| vec![(host, d.cpu)]).collect(),
        }
    }

    /// Checks the placement-decision invariants: shares sum to each demand's
    /// CPU, at most `k` hosts per demand, every share at least `min_alloc`.
    pub fn validate(&self, demands: &[Demand<T>], k: usize, min_alloc: T) -> Result<()> {
        if self.shares.len() != demands.len() {
            return Err(Error::InvalidParameter(format!(
                "placement covers {} demands, instance has {}",
                self.shares.len(),
                demands.len()
            )));
        }
        let tol = T::c(CONSERVATION_TOL);
        for (d, shares) in demands.iter().zip(&self.shares) {
            if shares.len() > k {
                return Err(Error::InvalidParameter(format!(
                    "demand {} split across {} hosts, limit is {k}",
                    d.id,
                    shares.len()
                )));
            }
            let mut sum = T::zero();
            for &(node, x) in shares {
                if x < min_alloc {
                    return Err(Error::InvalidParameter(format!(
                        "demand {} allocates {x} MIPS on {node}, below the {min_alloc} MIPS minimum",
                        d.id
                    )));
                }
                sum += x;
            }
            if (sum - d.cpu).abs() > tol {
                return Err(Error::InvalidParameter(format!(
                    "demand {} allocations sum to {sum} MIPS, expected {}",
                    d.id, d.cpu
                )));
            }
        }
        Ok(())
    }
}

/// Per-device carried traffic (Gbps) and hosted CPU (MIPS).
#[derive(Debug, Clone)]
pub struct LoadLedger<T> {
    pub traffic: Vec<T>,
    pub cpu: Vec<T>,
}

pub fn build_ledger<T: Scalar>(
    topology: &Topology,
    demands: &[Demand<T>],
    placement: &Placement<T>,
) -> Result<LoadLedger<T>> {
    let mut traffic = vec![T::zero(); topology.node_count()];
    let mut cpu = vec![T::zero(); topology.node_count()];
    for (d, shares) in demands.iter().zip(&placement.shares) {
        for &(host, x) in shares {
            cpu[host.0] += x;
            // every remote host receives the full stream
            for v in topology.path(d.source, host)? {
                traffic[v.0] += d.traffic;
            }
        }
    }
    Ok(LoadLedger { traffic, cpu })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LayerBreakdown<T> {
    pub iot: T,
    pub access_fog: T,
    pub edge_fog: T,
    pub metro: T,
    pub core: T,
    pub cloud: T,
}

impl<T: Scalar> LayerBreakdown<T> {
    pub fn get(&self, layer: Layer) -> T {
        match layer {
            Layer::Iot => self.iot,
            Layer::AccessFog => self.access_fog,
            Layer::EdgeFog => self.edge_fog,
            Layer::Metro => self.metro,
            Layer::Core => self.core,
            Layer::Cloud => self.cloud,
        }
    }

    fn add(&mut self, layer: Layer, v: T) {
        match layer {
            Layer::Iot => self.iot += v,
            Layer::AccessFog => self.access_fog += v,
            Layer::EdgeFog => self.edge_fog += v,
            Layer::Metro => self.metro += v,
            Layer::Core => self.core += v,
            Layer::Cloud => self.cloud += v,
        }
    }

    pub fn sum(&self) -> T {
        self.iot + self.access_fog + self.edge_fog + self.metro + self.core + self.cloud
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PowerSummary<T> {
    pub total: T,
    pub network: T,
    pub processing: T,
    pub by_layer: LayerBreakdown<T>,
}

#[derive(Debug, Clone, Default)]
pub struct SolverStats {
    pub nodes_explored: u64,
    pub bound_gap: f64,
    pub wall: Duration,
    pub optimal: bool,
}

#[derive(Debug, Clone)]
pub struct SolveResult<T> {
    pub placement: Placement<T>,
    pub power: PowerSummary<T>,
    pub stats: SolverStats,
}

impl<T: Scalar> SolveResult<T> {
    pub fn total_power(&self) -> T {
        self.power.total
    }
}

/// Prices a placement. Fails with a capacity verdict naming the device if
/// any subsystem is overloaded.
pub fn evaluate<T: Scalar>(
    topology: &Topology,
    catalog: &Catalog<T>,
    demands: &[Demand<T>],
    placement: &Placement<T>,
) -> Result<PowerSummary<T>> {
    let ledger = build_ledger(topology, demands, placement)?;
    let mut network = T::zero();
    let mut processing = T::zero();
    let mut by_layer = LayerBreakdown::default();
    for node in topology.nodes() {
        let profile = catalog.profile(node.kind);
        let layer = node.kind.layer();
        if let Some(net) = &profile.network {
            let load = ledger.traffic[node.id.0];
            if load > net.capacity {
                return Err(Error::CapacityExceeded {
                    node: node.id,
                    subsystem: "network",
                    load: load.as_f64(),
                    capacity: net.capacity.as_f64(),
                });
            }
            let p = net.power(load, load > T::zero())?;
            network += p;
            by_layer.add(layer, p);
        }
        if let Some(cpu) = &profile.processing {
            let load = ledger.cpu[node.id.0];
            let p = if profile.pooled {
                cpu.power_unchecked(load, load > T::zero())
            } else {
                if load > cpu.capacity {
                    return Err(Error::CapacityExceeded {
                        node: node.id,
                        subsystem: "processing",
                        load: load.as_f64(),
                        capacity: cpu.capacity.as_f64(),
                    });
                }
                cpu.power(load, load > T::zero())?
            };
            processing += p;
            by_layer.add(layer, p);
        }
    }
    Ok(PowerSummary {
        total: network + processing,
        network,
        processing,
        by_layer,
    })
}

/// Evaluate and wrap as a solve result with the given stats.
pub fn evaluated_result<T: Scalar>(
    topology: &Topology,
    catalog: &Catalog<T>,
    demands: &[Demand<T>],
    placement: Placement<T>,
    stats: SolverStats,
) -> Result<SolveResult<T>> {
    let power = evaluate(topology, catalog, demands, &placement)?;
    Ok(SolveResult {
        placement,
        power,
        stats,
    })
}
