//! Energy-aware placement of IoT video-analytics workloads over a
//! PON-based IoT / access-fog / edge-fog / cloud hierarchy.
//!
//! The crate models the four-layer tree topology, prices device power with
//! a profile catalog, and minimizes total network + processing power by
//! splitting each demand across at most K processing hosts. Solvers: an
//! exact branch-and-bound, a greedy heuristic, and a brute-force oracle
//! for verification; `scenarios` sweeps (traffic x K) grids against the
//! all-cloud baseline.
//!
//! Everything numeric is generic over [`Scalar`] (any `num-traits` float);
//! the common instantiations are aliased below.

pub mod config;
pub mod error;
pub mod optimizer;
pub mod powermodel;
pub mod report;
pub mod scalar;
pub mod scenarios;
pub mod topology;
pub mod workload;

pub use error::{Error, Result};
pub use optimizer::{
    baseline_cloud, brute_force_oracle, candidate_nodes, evaluate, solve_exact, solve_greedy,
    CandidatePolicy,
};
pub use powermodel::CATALOG_VERSION;
pub use scalar::Scalar;
pub use scenarios::{run_sweep, SolverKind};
pub use topology::{NodeId, NodeKind, Topology};
pub use workload::DEFAULT_INTENSITY;

/// Concrete f64 instantiations; the solvers and CLI use these.
pub type Catalog = powermodel::Catalog<f64>;
pub type Demand = workload::Demand<f64>;
pub type DemandSet = workload::DemandSet<f64>;
pub type Placement = optimizer::Placement<f64>;
pub type PowerSummary = optimizer::PowerSummary<f64>;
pub type SolveResult = optimizer::SolveResult<f64>;
pub type SolverOpts = optimizer::SolverOpts<f64>;
pub type ScenarioConfig = scenarios::ScenarioConfig<f64>;
pub type ResultRow = scenarios::ResultRow<f64>;
pub type ParsedConfig = config::ParsedConfig<f64>;

/// Single-precision variants, mainly exercised by the f32 smoke tests.
pub mod f32 {
    pub type Catalog = crate::powermodel::Catalog<f32>;
    pub type Demand = crate::workload::Demand<f32>;
    pub type Placement = crate::optimizer::Placement<f32>;
    pub type SolveResult = crate::optimizer::SolveResult<f32>;
}
