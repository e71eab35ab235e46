//! Hierarchical PON network: IoT sites behind ONUs, a single OLT acting as
//! the Edge Fog and metro gateway, an IP/WDM core chain and the cloud
//! data-center LAN.
//!
//! The structure is a tree rooted at the cloud server pool, so every path
//! query has a unique deterministic answer.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    IotDevice,
    AccessFog,
    EdgeFog,
    MetroSwitch,
    MetroRouter,
    CoreNode,
    CloudLanSwitch,
    CloudLanRouter,
    CloudServer,
}

impl NodeKind {
    pub fn is_processing_capable(self) -> bool {
        matches!(
            self,
            NodeKind::IotDevice | NodeKind::AccessFog | NodeKind::EdgeFog | NodeKind::CloudServer
        )
    }

    pub fn layer(self) -> Layer {
        match self {
            NodeKind::IotDevice => Layer::Iot,
            NodeKind::AccessFog => Layer::AccessFog,
            NodeKind::EdgeFog => Layer::EdgeFog,
            NodeKind::MetroSwitch | NodeKind::MetroRouter => Layer::Metro,
            NodeKind::CoreNode => Layer::Core,
            NodeKind::CloudLanSwitch | NodeKind::CloudLanRouter | NodeKind::CloudServer => {
                Layer::Cloud
            }
        }
    }
}

/// Reporting layer a device belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layer {
    Iot,
    AccessFog,
    EdgeFog,
    Metro,
    Core,
    Cloud,
}

impl Layer {
    pub const ALL: [Layer; 6] = [
        Layer::Iot,
        Layer::AccessFog,
        Layer::EdgeFog,
        Layer::Metro,
        Layer::Core,
        Layer::Cloud,
    ];

    pub fn index(self) -> usize {
        match self {
            Layer::Iot => 0,
            Layer::AccessFog => 1,
            Layer::EdgeFog => 2,
            Layer::Metro => 3,
            Layer::Core => 4,
            Layer::Cloud => 5,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Layer::Iot => "iot",
            Layer::AccessFog => "accessfog",
            Layer::EdgeFog => "edgefog",
            Layer::Metro => "metro",
            Layer::Core => "core",
            Layer::Cloud => "cloud",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    /// Parent towards the cloud root; `None` for the cloud server pool.
    pub parent: Option<NodeId>,
    /// Site index for IoT devices and ONUs.
    pub site: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Topology {
    nodes: Vec<Node>,
    site_count: usize,
    iot_per_site: usize,
    core_hop_count: usize,
}

impl Topology {
    /// Builds the tree. Node ids are assigned deterministically: IoT devices
    /// site-major, then one ONU per site, then the EdgeFog/OLT, the metro
    /// pair, `core_hop_count` core nodes and the cloud LAN chain.
    pub fn build(site_count: usize, iot_per_site: usize, core_hop_count: usize) -> Result<Self> {
        if site_count == 0 || iot_per_site == 0 || core_hop_count == 0 {
            return Err(Error::InvalidParameter(
                "site_count, iot_per_site and core_hop_count must all be >= 1".into(),
            ));
        }
        let iot_total = site_count * iot_per_site;
        let mut nodes = Vec::with_capacity(iot_total + site_count + 6 + core_hop_count);
        let onu_base = iot_total;
        for site in 0..site_count {
            for dev in 0..iot_per_site {
                nodes.push(Node {
                    id: NodeId(site * iot_per_site + dev),
                    kind: NodeKind::IotDevice,
                    parent: Some(NodeId(onu_base + site)),
                    site: Some(site),
                });
            }
        }
        let edge_fog = NodeId(onu_base + site_count);
        for site in 0..site_count {
            nodes.push(Node {
                id: NodeId(onu_base + site),
                kind: NodeKind::AccessFog,
                parent: Some(edge_fog),
                site: Some(site),
            });
        }
        let metro_switch = NodeId(edge_fog.0 + 1);
        let metro_router = NodeId(edge_fog.0 + 2);
        nodes.push(Node {
            id: edge_fog,
            kind: NodeKind::EdgeFog,
            parent: Some(metro_switch),
            site: None,
        });
        nodes.push(Node {
            id: metro_switch,
            kind: NodeKind::MetroSwitch,
            parent: Some(metro_router),
            site: None,
        });
        let core_base = metro_router.0 + 1;
        nodes.push(Node {
            id: metro_router,
            kind: NodeKind::MetroRouter,
            parent: Some(NodeId(core_base)),
            site: None,
        });
        for hop in 0..core_hop_count {
            let next = if hop + 1 == core_hop_count {
                NodeId(core_base + core_hop_count)
            } else {
                NodeId(core_base + hop + 1)
            };
            nodes.push(Node {
                id: NodeId(core_base + hop),
                kind: NodeKind::CoreNode,
                parent: Some(next),
                site: None,
            });
        }
        let cloud_lan_switch = NodeId(core_base + core_hop_count);
        let cloud_lan_router = NodeId(cloud_lan_switch.0 + 1);
        let cloud_server = NodeId(cloud_lan_switch.0 + 2);
        nodes.push(Node {
            id: cloud_lan_switch,
            kind: NodeKind::CloudLanSwitch,
            parent: Some(cloud_lan_router),
            site: None,
        });
        nodes.push(Node {
            id: cloud_lan_router,
            kind: NodeKind::CloudLanRouter,
            parent: Some(cloud_server),
            site: None,
        });
        nodes.push(Node {
            id: cloud_server,
            kind: NodeKind::CloudServer,
            parent: None,
            site: None,
        });
        nodes.sort_by_key(|n| n.id);
        debug_assert!(nodes.iter().enumerate().all(|(i, n)| n.id.0 == i));
        Ok(Topology {
            nodes,
            site_count,
            iot_per_site,
            core_hop_count,
        })
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes.get(id.0).ok_or(Error::UnknownNode(id))
    }

    pub fn kind(&self, id: NodeId) -> Result<NodeKind> {
        Ok(self.node(id)?.kind)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    pub fn iot_per_site(&self) -> usize {
        self.iot_per_site
    }

    pub fn core_hop_count(&self) -> usize {
        self.core_hop_count
    }

    pub fn iot_count(&self) -> usize {
        self.site_count * self.iot_per_site
    }

    pub fn iot_id(&self, site: usize, dev: usize) -> NodeId {
        NodeId(site * self.iot_per_site + dev)
    }

    pub fn onu_id(&self, site: usize) -> NodeId {
        NodeId(self.iot_count() + site)
    }

    /// ONU serving the given IoT device.
    pub fn onu_of(&self, iot: NodeId) -> Result<NodeId> {
        let node = self.node(iot)?;
        match (node.kind, node.site) {
            (NodeKind::IotDevice, Some(site)) => Ok(self.onu_id(site)),
            _ => Err(Error::NotIotSource(iot)),
        }
    }

    pub fn edge_fog_id(&self) -> NodeId {
        NodeId(self.iot_count() + self.site_count)
    }

    pub fn metro_switch_id(&self) -> NodeId {
        NodeId(self.edge_fog_id().0 + 1)
    }

    pub fn metro_router_id(&self) -> NodeId {
        NodeId(self.edge_fog_id().0 + 2)
    }

    pub fn core_id(&self, hop: usize) -> NodeId {
        NodeId(self.metro_router_id().0 + 1 + hop)
    }

    pub fn cloud_lan_switch_id(&self) -> NodeId {
        NodeId(self.metro_router_id().0 + 1 + self.core_hop_count)
    }

    pub fn cloud_lan_router_id(&self) -> NodeId {
        NodeId(self.cloud_lan_switch_id().0 + 1)
    }

    pub fn cloud_server_id(&self) -> NodeId {
        NodeId(self.cloud_lan_switch_id().0 + 2)
    }

    pub fn iot_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.iot_count()).map(NodeId)
    }

    pub fn onu_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.site_count).map(|s| self.onu_id(s))
    }

    /// All processing-capable node ids, ascending.
    pub fn processing_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .filter(|n| n.kind.is_processing_capable())
            .map(|n| n.id)
    }

    fn ancestors(&self, id: NodeId) -> Vec<NodeId> {
        let mut chain = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur.0].parent {
            chain.push(p);
            cur = p;
        }
        chain
    }

    /// Ordered list of devices whose network subsystem carries a stream from
    /// `src` to `dst`. `src` must be an IoT device, `dst` processing-capable.
    /// Local processing carries no traffic: `path(s, s)` is empty.
    pub fn path(&self, src: NodeId, dst: NodeId) -> Result<Vec<NodeId>> {
        let s = self.node(src)?;
        let d = self.node(dst)?;
        if s.kind != NodeKind::IotDevice {
            return Err(Error::NotIotSource(src));
        }
        if !d.kind.is_processing_capable() {
            return Err(Error::NotProcessingCapable(dst));
        }
        if src == dst {
            return Ok(Vec::new());
        }
        let up = self.ancestors(src);
        if let Some(pos) = up.iter().position(|&v| v == dst) {
            return Ok(up[..=pos].to_vec());
        }
        // dst hangs off a different branch: climb to the lowest common
        // ancestor, then descend.
        let down = self.ancestors(dst);
        let lca_pos = up
            .iter()
            .position(|v| down.contains(v))
            .expect("tree has a common root");
        let mut path = up[..=lca_pos].to_vec();
        let dst_side = down.iter().position(|&v| v == up[lca_pos]).unwrap();
        for &v in down[..dst_side].iter().rev() {
            path.push(v);
        }
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_build_counts() {
        let t = Topology::build(4, 5, 4).unwrap();
        assert_eq!(t.iot_count(), 20);
        assert_eq!(
            t.nodes().iter().filter(|n| n.kind == NodeKind::AccessFog).count(),
            4
        );
        assert_eq!(
            t.nodes().iter().filter(|n| n.kind == NodeKind::EdgeFog).count(),
            1
        );
        assert_eq!(
            t.nodes().iter().filter(|n| n.kind == NodeKind::CoreNode).count(),
            4
        );
        // 20 IoT + 4 ONU + EdgeFog + metro pair + 4 core + cloud chain of 3
        assert_eq!(t.node_count(), 20 + 4 + 1 + 2 + 4 + 3);
    }

    #[test]
    fn minimal_build() {
        let t = Topology::build(1, 1, 1).unwrap();
        assert_eq!(t.iot_count(), 1);
        assert_eq!(t.node_count(), 1 + 1 + 1 + 2 + 1 + 3);
    }

    #[test]
    fn zero_counts_rejected() {
        assert!(Topology::build(0, 5, 4).is_err());
        assert!(Topology::build(4, 0, 4).is_err());
        assert!(Topology::build(4, 5, 0).is_err());
    }

    #[test]
    fn cloud_path_walk() {
        let t = Topology::build(2, 3, 4).unwrap();
        assert_eq!(t.iot_count(), 6);
        let src = t.iot_id(0, 0);
        let path = t.path(src, t.cloud_server_id()).unwrap();
        // src + ONU + OLT + metro switch + metro router + 4 core + LAN pair + server
        assert_eq!(path.len(), 12);
        assert_eq!(path[0], src);
        assert_eq!(path[1], t.onu_id(0));
        assert_eq!(path[2], t.edge_fog_id());
        assert_eq!(path[3], t.metro_switch_id());
        assert_eq!(path[4], t.metro_router_id());
        assert_eq!(path[9], t.cloud_lan_switch_id());
        assert_eq!(path[10], t.cloud_lan_router_id());
        assert_eq!(path[11], t.cloud_server_id());
    }

    #[test]
    fn local_placement_has_empty_path() {
        let t = Topology::build(4, 5, 4).unwrap();
        let iot = t.iot_id(0, 0);
        assert!(t.path(iot, iot).unwrap().is_empty());
    }

    #[test]
    fn own_onu_path() {
        let t = Topology::build(4, 5, 4).unwrap();
        let iot = t.iot_id(0, 0);
        assert_eq!(t.path(iot, t.onu_id(0)).unwrap(), vec![iot, t.onu_id(0)]);
    }

    #[test]
    fn peer_paths_go_through_lowest_common_ancestor() {
        let t = Topology::build(4, 5, 4).unwrap();
        let a = t.iot_id(0, 0);
        let b = t.iot_id(0, 1);
        assert_eq!(t.path(a, b).unwrap(), vec![a, t.onu_id(0), b]);
        let c = t.iot_id(2, 3);
        assert_eq!(
            t.path(a, c).unwrap(),
            vec![a, t.onu_id(0), t.edge_fog_id(), t.onu_id(2), c]
        );
        let onu3 = t.onu_id(3);
        assert_eq!(
            t.path(a, onu3).unwrap(),
            vec![a, t.onu_id(0), t.edge_fog_id(), onu3]
        );
    }

    #[test]
    fn prefix_extension_chain() {
        let t = Topology::build(4, 5, 4).unwrap();
        let iot = t.iot_id(1, 2);
        let p_onu = t.path(iot, t.onu_id(1)).unwrap();
        let p_ef = t.path(iot, t.edge_fog_id()).unwrap();
        let p_cloud = t.path(iot, t.cloud_server_id()).unwrap();
        assert_eq!(&p_ef[..p_onu.len()], &p_onu[..]);
        assert_eq!(&p_cloud[..p_ef.len()], &p_ef[..]);
    }

    #[test]
    fn path_rejects_bad_endpoints() {
        let t = Topology::build(4, 5, 4).unwrap();
        let iot = t.iot_id(0, 0);
        assert!(t.path(t.metro_switch_id(), iot).is_err());
        assert!(t.path(iot, t.metro_switch_id()).is_err());
        assert!(t.path(NodeId(9999), iot).is_err());
        assert!(t.path(iot, NodeId(9999)).is_err());
    }
}
