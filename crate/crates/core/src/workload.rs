//! Demand generation: homogeneous video-analytics requests whose CPU need
//! is proportional to their traffic through the instructions-per-bit model.

use crate::error::{Error, Result};
use crate::powermodel::Catalog;
use crate::scalar::Scalar;
use crate::topology::{NodeId, Topology};

/// Default CPU intensity: 1000 instructions per bit.
pub const DEFAULT_INTENSITY: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Demand<T> {
    pub id: usize,
    pub source: NodeId,
    /// CPU requirement in MIPS.
    pub cpu: T,
    /// Uplink stream size in Gbps.
    pub traffic: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandSet<T> {
    pub demands: Vec<Demand<T>>,
    pub active_iot_count: usize,
}

impl<T: Scalar> DemandSet<T> {
    pub fn total_cpu(&self) -> T {
        self.demands.iter().map(|d| d.cpu).sum()
    }
}

/// MIPS needed for a stream of `traffic_mbps` at `intensity` instructions
/// per bit. 1 Mbps at 1000 instr/bit works out to 1000 MIPS.
pub fn cpu_from_traffic<T: Scalar>(traffic_mbps: T, intensity: T) -> Result<T> {
    if traffic_mbps < T::zero() {
        return Err(Error::InvalidParameter("traffic must be >= 0".into()));
    }
    if intensity <= T::zero() {
        return Err(Error::InvalidParameter("intensity must be > 0".into()));
    }
    // Mbit/s x instr/bit = M instr/s = MIPS.
    Ok(traffic_mbps * intensity)
}

fn build_demand<T: Scalar>(
    id: usize,
    source: NodeId,
    traffic_mbps: T,
    intensity: T,
    uplink_capacity: T,
) -> Result<Demand<T>> {
    let cpu = cpu_from_traffic(traffic_mbps, intensity)?;
    if traffic_mbps <= T::zero() {
        return Err(Error::InvalidParameter(
            "demand traffic must be > 0".into(),
        ));
    }
    let traffic = traffic_mbps / T::c(1000.0); // Mbps -> Gbps
    if traffic > uplink_capacity {
        return Err(Error::InvalidParameter(format!(
            "demand traffic {traffic} Gbps exceeds the source uplink capacity {uplink_capacity} Gbps"
        )));
    }
    Ok(Demand {
        id,
        source,
        cpu,
        traffic,
    })
}

/// Homogeneous demand set sourced at the first `active_iot_count` IoT
/// devices in site-major order.
pub fn make_demand_set<T: Scalar>(
    topology: &Topology,
    catalog: &Catalog<T>,
    active_iot_count: usize,
    traffic_mbps: T,
    intensity: T,
) -> Result<DemandSet<T>> {
    if active_iot_count > topology.iot_count() {
        return Err(Error::InvalidParameter(format!(
            "active_iot_count {active_iot_count} exceeds the {} IoT devices in the topology",
            topology.iot_count()
        )));
    }
    let uplink = catalog
        .network(crate::topology::NodeKind::IotDevice)
        .map(|s| s.capacity)
        .unwrap_or_else(T::infinity);
    let demands = topology
        .iot_ids()
        .take(active_iot_count)
        .enumerate()
        .map(|(id, source)| build_demand(id, source, traffic_mbps, intensity, uplink))
        .collect::<Result<Vec<_>>>()?;
    Ok(DemandSet {
        demands,
        active_iot_count,
    })
}

/// Demand set from explicit (source, Mbps) pairs; used for per-demand
/// overrides in scenario files.
pub fn demand_set_from_sources<T: Scalar>(
    topology: &Topology,
    catalog: &Catalog<T>,
    sources: &[(NodeId, T)],
    intensity: T,
) -> Result<DemandSet<T>> {
    let uplink = catalog
        .network(crate::topology::NodeKind::IotDevice)
        .map(|s| s.capacity)
        .unwrap_or_else(T::infinity);
    let demands = sources
        .iter()
        .enumerate()
        .map(|(id, &(source, mbps))| {
            if topology.kind(source)? != crate::topology::NodeKind::IotDevice {
                return Err(Error::NotIotSource(source));
            }
            build_demand(id, source, mbps, intensity, uplink)
        })
        .collect::<Result<Vec<_>>>()?;
    let active_iot_count = demands_distinct_sources(&demands);
    Ok(DemandSet {
        demands,
        active_iot_count,
    })
}

fn demands_distinct_sources<T>(demands: &[Demand<T>]) -> usize {
    let mut sources: Vec<_> = demands.iter().map(|d| d.source).collect();
    sources.sort();
    sources.dedup();
    sources.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn setup() -> (Topology, Catalog<f64>) {
        (Topology::build(4, 5, 4).unwrap(), Catalog::table1())
    }

    #[test]
    fn cpu_from_traffic_examples() {
        assert_eq!(cpu_from_traffic(5.0, 1000.0).unwrap(), 5000.0);
        assert_eq!(cpu_from_traffic(10.0, 1000.0).unwrap(), 10000.0);
        assert_eq!(cpu_from_traffic(0.0, 1000.0).unwrap(), 0.0);
        assert!(cpu_from_traffic(-1.0, 1000.0).is_err());
        assert!(cpu_from_traffic(1.0, 0.0).is_err());
    }

    #[test]
    fn scenario_sets() {
        let (t, c) = setup();
        let s1 = make_demand_set(&t, &c, 5, 5.0, 1000.0).unwrap();
        assert_eq!(s1.demands.len(), 5);
        for d in &s1.demands {
            assert_eq!(d.cpu, 5000.0);
            assert_eq!(d.traffic, 0.005);
            // first five devices are site 0's
            assert_eq!(t.node(d.source).unwrap().site, Some(0));
        }
        let s2 = make_demand_set(&t, &c, 20, 5.0, 1000.0).unwrap();
        assert_eq!(s2.demands.len(), 20);
        let tiny = make_demand_set(&t, &c, 1, 1.0, 1000.0).unwrap();
        assert_eq!(tiny.demands[0].cpu, 1000.0);
    }

    #[test]
    fn active_count_overflow_rejected() {
        let (t, c) = setup();
        assert!(make_demand_set(&t, &c, 21, 5.0, 1000.0).is_err());
    }

    #[test]
    fn traffic_above_uplink_rejected() {
        let (t, c) = setup();
        // 54 Mbps WiFi cap: 60 Mbps is not transportable
        assert!(make_demand_set(&t, &c, 1, 60.0, 1000.0).is_err());
        assert!(make_demand_set(&t, &c, 1, 54.0, 1000.0).is_ok());
    }

    #[test]
    fn explicit_sources() {
        let (t, c) = setup();
        let set = demand_set_from_sources(
            &t,
            &c,
            &[(t.iot_id(0, 0), 2.0), (t.iot_id(3, 4), 7.0)],
            1000.0,
        )
        .unwrap();
        assert_eq!(set.demands[1].cpu, 7000.0);
        assert_eq!(set.active_iot_count, 2);
        assert!(demand_set_from_sources(&t, &c, &[(t.onu_id(0), 2.0)], 1000.0).is_err());
    }

    proptest! {
        #[test]
        fn cpu_from_traffic_is_linear(a in 0.0..20.0f64, b in 0.0..20.0f64) {
            let f = |x| cpu_from_traffic(x, 870.0).unwrap();
            prop_assert!((f(a + b) - (f(a) + f(b))).abs() < 1e-9);
        }
    }
}
