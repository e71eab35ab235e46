//! Device power catalog and evaluation rules.
//!
//! Devices carry up to two subsystems (network, processing). Subsystems
//! marked `Shared` are billed purely proportionally to load; `Dedicated`
//! subsystems additionally pay their idle power whenever active. PUE
//! multiplies the whole device draw; IoT and Access Fog devices have no
//! cooling and use PUE 1.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::topology::{NodeKind, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sharing {
    /// Dedicated to the IoT service: pays idle power while active.
    Dedicated,
    /// Multiplexed with other services: load-proportional only.
    Shared,
}

/// One subsystem of a device: network (capacity in Gbps) or processing
/// (capacity in MIPS).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsystemProfile<T> {
    pub idle_power: T,
    pub max_power: T,
    pub capacity: T,
    pub pue: T,
    pub sharing: Sharing,
}

impl<T: Scalar> SubsystemProfile<T> {
    pub fn validate(&self, name: &str) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::InvalidProfile {
                name: name.to_string(),
                reason: reason.to_string(),
            })
        };
        if self.idle_power < T::zero() {
            return fail("idle power must be >= 0");
        }
        if self.idle_power > self.max_power {
            return fail("idle power must not exceed max power");
        }
        if self.capacity <= T::zero() {
            return fail("capacity must be > 0");
        }
        if self.pue < T::one() {
            return fail("PUE must be >= 1");
        }
        Ok(())
    }

    /// Watts per unit load: (max - idle) / capacity.
    pub fn proportional_slope(&self) -> T {
        (self.max_power - self.idle_power) / self.capacity
    }

    /// Power drawn at the given load. `active` matters only for dedicated
    /// subsystems; it must be true whenever load > 0.
    pub fn power(&self, load: T, active: bool) -> Result<T> {
        if load < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "negative subsystem load {load}"
            )));
        }
        if load > self.capacity {
            return Err(Error::InvalidParameter(format!(
                "subsystem load {load} exceeds capacity {}",
                self.capacity
            )));
        }
        if load > T::zero() && !active {
            return Err(Error::InvalidParameter(
                "inactive subsystem cannot carry load".into(),
            ));
        }
        Ok(self.power_unchecked(load, active))
    }

    /// Same as [`power`](Self::power) without the capacity check; used for
    /// the pooled cloud where the catalog row describes a single server but
    /// the pool is unbounded.
    pub fn power_unchecked(&self, load: T, active: bool) -> T {
        match self.sharing {
            Sharing::Shared => self.pue * self.proportional_slope() * load,
            Sharing::Dedicated => {
                if active {
                    self.pue * (self.idle_power + self.proportional_slope() * load)
                } else {
                    T::zero()
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceProfile<T> {
    pub kind: NodeKind,
    pub network: Option<SubsystemProfile<T>>,
    pub processing: Option<SubsystemProfile<T>>,
    /// Processing capacity is a pool (no per-node cap); true for the cloud.
    pub pooled: bool,
}

/// Per-kind device catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog<T> {
    profiles: Vec<DeviceProfile<T>>,
}

pub const CATALOG_VERSION: &str = "table1-v1";

const KIND_ORDER: [NodeKind; 9] = [
    NodeKind::IotDevice,
    NodeKind::AccessFog,
    NodeKind::EdgeFog,
    NodeKind::MetroSwitch,
    NodeKind::MetroRouter,
    NodeKind::CoreNode,
    NodeKind::CloudLanSwitch,
    NodeKind::CloudLanRouter,
    NodeKind::CloudServer,
];

fn kind_slot(kind: NodeKind) -> usize {
    KIND_ORDER.iter().position(|&k| k == kind).unwrap()
}

impl<T: Scalar> Catalog<T> {
    /// Default catalog: per-device max/idle watts, capacities and PUE of the
    /// reference parameter table. Efficiencies are always derived as
    /// (max - idle) / capacity rather than read from printed columns.
    pub fn table1() -> Self {
        let ded = |max: f64, idle: f64, cap: f64, pue: f64| SubsystemProfile {
            idle_power: T::c(idle),
            max_power: T::c(max),
            capacity: T::c(cap),
            pue: T::c(pue),
            sharing: Sharing::Dedicated,
        };
        let shared = |max: f64, cap: f64, pue: f64| SubsystemProfile {
            idle_power: T::zero(),
            max_power: T::c(max),
            capacity: T::c(cap),
            pue: T::c(pue),
            sharing: Sharing::Shared,
        };
        let profiles = vec![
            DeviceProfile {
                kind: NodeKind::IotDevice,
                network: Some(ded(0.56, 0.34, 0.054, 1.0)),
                processing: Some(ded(3.6, 0.33, 1000.0, 1.0)),
                pooled: false,
            },
            DeviceProfile {
                kind: NodeKind::AccessFog,
                network: Some(ded(15.0, 9.0, 0.3, 1.0)),
                processing: Some(ded(12.5, 2.0, 2400.0, 1.0)),
                pooled: false,
            },
            DeviceProfile {
                kind: NodeKind::EdgeFog,
                network: Some(shared(48.0, 2.4, 1.5)),
                processing: Some(ded(363.0, 112.0, 10800.0, 2.5)),
                pooled: false,
            },
            DeviceProfile {
                kind: NodeKind::MetroSwitch,
                network: Some(shared(1766.0, 256.0, 1.5)),
                processing: None,
                pooled: false,
            },
            DeviceProfile {
                kind: NodeKind::MetroRouter,
                network: Some(shared(4550.0, 560.0, 1.5)),
                processing: None,
                pooled: false,
            },
            DeviceProfile {
                kind: NodeKind::CoreNode,
                network: Some(shared(1182.0, 40.0, 1.5)),
                processing: None,
                pooled: false,
            },
            DeviceProfile {
                kind: NodeKind::CloudLanSwitch,
                network: Some(shared(1766.0, 256.0, 1.5)),
                processing: None,
                pooled: false,
            },
            DeviceProfile {
                kind: NodeKind::CloudLanRouter,
                network: Some(shared(4550.0, 560.0, 1.5)),
                processing: None,
                pooled: false,
            },
            DeviceProfile {
                kind: NodeKind::CloudServer,
                network: None,
                processing: Some(SubsystemProfile {
                    idle_power: T::c(112.0),
                    max_power: T::c(363.0),
                    capacity: T::c(10800.0),
                    pue: T::c(2.5),
                    sharing: Sharing::Shared,
                }),
                pooled: true,
            },
        ];
        Catalog { profiles }
    }

    pub fn profile(&self, kind: NodeKind) -> &DeviceProfile<T> {
        &self.profiles[kind_slot(kind)]
    }

    pub fn profile_mut(&mut self, kind: NodeKind) -> &mut DeviceProfile<T> {
        &mut self.profiles[kind_slot(kind)]
    }

    pub fn network(&self, kind: NodeKind) -> Option<&SubsystemProfile<T>> {
        self.profile(kind).network.as_ref()
    }

    pub fn processing(&self, kind: NodeKind) -> Option<&SubsystemProfile<T>> {
        self.profile(kind).processing.as_ref()
    }

    /// Processing capacity usable by the optimizer; `None` means unbounded
    /// (the cloud pool).
    pub fn cpu_capacity(&self, kind: NodeKind) -> Option<T> {
        let p = self.profile(kind);
        match (&p.processing, p.pooled) {
            (Some(_), true) => None,
            (Some(s), false) => Some(s.capacity),
            (None, _) => Some(T::zero()),
        }
    }

    /// Marginal processing cost in W/MIPS, PUE included.
    pub fn cpu_marginal(&self, kind: NodeKind) -> T {
        self.processing(kind)
            .map(|s| s.pue * s.proportional_slope())
            .unwrap_or_else(T::zero)
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.profiles {
            if let Some(net) = &p.network {
                net.validate(&format!("{:?}.net", p.kind))?;
            }
            if let Some(cpu) = &p.processing {
                cpu.validate(&format!("{:?}.cpu", p.kind))?;
            }
        }
        Ok(())
    }

    /// Sum of pue x slope over the shared network devices on the path from
    /// the OLT to the cloud: metro switch + metro router + core hops + cloud
    /// LAN switch + cloud LAN router. W/Gbps.
    pub fn cloud_path_network_slope(&self, topology: &Topology) -> T {
        let per = |kind: NodeKind| {
            self.network(kind)
                .map(|s| s.pue * s.proportional_slope())
                .unwrap_or_else(T::zero)
        };
        let hops = T::from_usize(topology.core_hop_count()).unwrap();
        per(NodeKind::MetroSwitch)
            + per(NodeKind::MetroRouter)
            + hops * per(NodeKind::CoreNode)
            + per(NodeKind::CloudLanSwitch)
            + per(NodeKind::CloudLanRouter)
    }
}
