//! Small min-cost-flow solver for the transportation subproblem: route each
//! demand's MIPS over its allowed arcs at per-arc unit cost, respecting
//! per-node capacities and per-arc lower bounds.
//!
//! Successive shortest paths with Dijkstra and Johnson potentials; all arc
//! costs are non-negative so the zero potential is valid initially.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct TransportArc<T> {
    pub demand: usize,
    pub node: usize,
    pub unit_cost: T,
    pub lower: T,
}

#[derive(Debug, Clone)]
pub struct Transport<T> {
    pub supplies: Vec<T>,
    /// Per node; `None` means unbounded.
    pub capacities: Vec<Option<T>>,
    pub arcs: Vec<TransportArc<T>>,
}

#[derive(Debug, Clone)]
pub struct TransportFlow<T> {
    /// Flow per arc, in input arc order (lower bounds included).
    pub flows: Vec<T>,
    pub cost: T,
}

struct Edge<T> {
    to: usize,
    cap: T,
    cost: T,
    flow: T,
}

struct Graph<T> {
    edges: Vec<Edge<T>>,
    adj: Vec<Vec<usize>>,
}

impl<T: Scalar> Graph<T> {
    fn new(n: usize) -> Self {
        Graph {
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: T, cost: T) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge {
            to,
            cap,
            cost,
            flow: T::zero(),
        });
        self.edges.push(Edge {
            to: from,
            cap: T::zero(),
            cost: -cost,
            flow: T::zero(),
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    fn residual(&self, e: usize) -> T {
        self.edges[e].cap - self.edges[e].flow
    }
}

struct HeapEntry<T> {
    dist: T,
    vertex: usize,
}

impl<T: Scalar> PartialEq for HeapEntry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.vertex == other.vertex
    }
}
impl<T: Scalar> Eq for HeapEntry<T> {}
impl<T: Scalar> PartialOrd for HeapEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for HeapEntry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, vertex); dist is never NaN
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap()
            .then(other.vertex.cmp(&self.vertex))
    }
}

/// Solves the transportation problem; `None` when the demands cannot all be
/// routed within the capacities.
pub fn solve<T: Scalar>(problem: &Transport<T>) -> Option<TransportFlow<T>> {
    let d_count = problem.supplies.len();
    let n_count = problem.capacities.len();
    let total_supply: T = problem.supplies.iter().copied().sum();
    let eps = (total_supply + T::one()) * T::epsilon().sqrt() * T::c(1e-3);

    // Lower bounds are pre-routed; the graph carries residual amounts only.
    let mut pre_demand = vec![T::zero(); d_count];
    let mut pre_node = vec![T::zero(); n_count];
    let mut fixed_cost = T::zero();
    for arc in &problem.arcs {
        pre_demand[arc.demand] += arc.lower;
        pre_node[arc.node] += arc.lower;
        fixed_cost += arc.unit_cost * arc.lower;
    }
    for (d, &pre) in pre_demand.iter().enumerate() {
        if pre > problem.supplies[d] + eps {
            return None;
        }
    }
    for (n, &pre) in pre_node.iter().enumerate() {
        if let Some(cap) = problem.capacities[n] {
            if pre > cap + eps {
                return None;
            }
        }
    }

    // vertices: 0 = source, 1..=d = demands, then nodes, then sink
    let source = 0;
    let node_base = 1 + d_count;
    let sink = node_base + n_count;
    let mut g: Graph<T> = Graph::new(sink + 1);
    for (d, &s) in problem.supplies.iter().enumerate() {
        let residual = (s - pre_demand[d]).max(T::zero());
        g.add(source, 1 + d, residual, T::zero());
    }
    let mut arc_edge = Vec::with_capacity(problem.arcs.len());
    for arc in &problem.arcs {
        let e = g.add(1 + arc.demand, node_base + arc.node, T::infinity(), arc.unit_cost);
        arc_edge.push(e);
    }
    for (n, &cap) in problem.capacities.iter().enumerate() {
        let residual = match cap {
            Some(c) => (c - pre_node[n]).max(T::zero()),
            None => T::infinity(),
        };
        g.add(node_base + n, sink, residual, T::zero());
    }

    let needed: T = (0..d_count)
        .map(|d| (problem.supplies[d] - pre_demand[d]).max(T::zero()))
        .sum();
    let mut routed = T::zero();
    let mut potential = vec![T::zero(); sink + 1];
    let mut dist = vec![T::infinity(); sink + 1];
    let mut prev_edge = vec![usize::MAX; sink + 1];

    while needed - routed > eps {
        // Dijkstra on reduced costs
        for v in dist.iter_mut() {
            *v = T::infinity();
        }
        for v in prev_edge.iter_mut() {
            *v = usize::MAX;
        }
        dist[source] = T::zero();
        let mut heap = BinaryHeap::new();
        heap.push(HeapEntry {
            dist: T::zero(),
            vertex: source,
        });
        while let Some(HeapEntry { dist: du, vertex: u }) = heap.pop() {
            if du > dist[u] {
                continue;
            }
            for &e in &g.adj[u] {
                if g.residual(e) <= eps {
                    continue;
                }
                let v = g.edges[e].to;
                let reduced = g.edges[e].cost + potential[u] - potential[v];
                let nd = du + reduced.max(T::zero());
                if nd + T::epsilon() < dist[v] {
                    dist[v] = nd;
                    prev_edge[v] = e;
                    heap.push(HeapEntry { dist: nd, vertex: v });
                }
            }
        }
        if !dist[sink].is_finite() {
            return None; // some demand cannot be routed
        }
        for v in 0..=sink {
            if dist[v].is_finite() {
                potential[v] += dist[v];
            }
        }
        // bottleneck along the shortest path
        let mut push = needed - routed;
        let mut v = sink;
        while v != source {
            let e = prev_edge[v];
            push = push.min(g.residual(e));
            v = g.edges[e ^ 1].to;
        }
        if push <= eps {
            return None;
        }
        let mut v = sink;
        while v != source {
            let e = prev_edge[v];
            g.edges[e].flow += push;
            g.edges[e ^ 1].flow -= push;
            v = g.edges[e ^ 1].to;
        }
        routed += push;
    }

    let mut cost = fixed_cost;
    let mut flows = Vec::with_capacity(problem.arcs.len());
    for (arc, &e) in problem.arcs.iter().zip(&arc_edge) {
        let f = g.edges[e].flow.max(T::zero()) + arc.lower;
        cost += g.edges[e].flow.max(T::zero()) * arc.unit_cost;
        flows.push(f);
    }
    Some(TransportFlow { flows, cost })
}
