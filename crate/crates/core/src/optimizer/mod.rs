//! Power-minimizing placement of splittable demands: exact branch-and-bound
//! solver, greedy heuristic, brute-force oracle and the all-cloud baseline.

pub mod evaluate;
pub mod exact;
pub mod greedy;
pub mod mcf;
pub mod oracle;

pub use evaluate::{
    build_ledger, evaluate, evaluated_result, LayerBreakdown, LoadLedger, Placement, PowerSummary,
    SolveResult, SolverStats, CONSERVATION_TOL,
};
pub use exact::{solve_exact, SolverOpts};
pub use greedy::solve_greedy;
pub use oracle::brute_force_oracle;

use crate::error::Result;
use crate::powermodel::Catalog;
use crate::scalar::Scalar;
use crate::topology::{NodeId, NodeKind, Topology};
use crate::workload::Demand;

/// Which nodes may host (part of) a demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidatePolicy {
    /// Local device plus the fog/cloud hierarchy: every ONU, the Edge Fog
    /// server and the cloud pool. No peer IoT hosts.
    Hierarchy,
    /// Hierarchy plus peer IoT devices. `cross_site` additionally allows
    /// IoT peers (and ONUs) in other sites.
    Peers { cross_site: bool },
    /// Cloud pool only; the all-cloud baseline expressed as a policy.
    CloudOnly,
}

impl CandidatePolicy {
    pub fn label(&self) -> &'static str {
        match self {
            CandidatePolicy::Hierarchy => "hierarchy",
            CandidatePolicy::Peers { .. } => "peers",
            CandidatePolicy::CloudOnly => "cloud-only",
        }
    }
}

/// Candidate hosts for a demand sourced at `src`, ascending node id.
pub fn candidate_nodes(
    topology: &Topology,
    policy: CandidatePolicy,
    src: NodeId,
) -> Result<Vec<NodeId>> {
    let src_site = topology
        .node(src)?
        .site
        .ok_or(crate::error::Error::NotIotSource(src))?;
    let mut out = Vec::new();
    match policy {
        CandidatePolicy::CloudOnly => out.push(topology.cloud_server_id()),
        CandidatePolicy::Hierarchy => {
            out.push(src);
            out.extend(topology.onu_ids());
            out.push(topology.edge_fog_id());
            out.push(topology.cloud_server_id());
        }
        CandidatePolicy::Peers { cross_site } => {
            for node in topology.nodes() {
                let eligible = match node.kind {
                    NodeKind::IotDevice | NodeKind::AccessFog => {
                        cross_site || node.site == Some(src_site)
                    }
                    NodeKind::EdgeFog | NodeKind::CloudServer => true,
                    _ => false,
                };
                if eligible || node.id == src {
                    out.push(node.id);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Places every demand entirely on the cloud server pool.
pub fn baseline_cloud<T: Scalar>(
    topology: &Topology,
    catalog: &Catalog<T>,
    demands: &[Demand<T>],
) -> Result<SolveResult<T>> {
    let placement = Placement::all_on(demands, topology.cloud_server_id());
    evaluated_result(
        topology,
        catalog,
        demands,
        placement,
        SolverStats {
            optimal: true,
            ..Default::default()
        },
    )
}
