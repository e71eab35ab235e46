//! Verification oracle for tiny instances: exhaustively enumerates every
//! activation subset per demand, and for each combination enumerates the
//! vertices of the residual transportation polytope (a linear objective over
//! a polytope attains its optimum at a vertex). Every candidate placement is
//! priced through the shared evaluator; nothing of the branch-and-bound
//! machinery is reused.

use crate::error::{Error, Result};
use crate::powermodel::Catalog;
use crate::scalar::Scalar;
use crate::topology::{NodeId, Topology};
use crate::workload::Demand;

use super::evaluate::{evaluate, Placement, SolveResult, SolverStats};
use super::{candidate_nodes, CandidatePolicy};

const MAX_DEMANDS: usize = 2;
const MAX_CANDIDATES: usize = 8;
const MAX_K: usize = 3;

/// Solve an m x m linear system in-place; returns `None` when singular.
fn solve_linear<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let m = b.len();
    for col in 0..m {
        let pivot = (col..m).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap()
                .then(j.cmp(&i))
        })?;
        if a[pivot][col].abs() < T::c(1e-9) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in 0..m {
            if row == col {
                continue;
            }
            let factor = a[row][col] / a[col][col];
            if factor == T::zero() {
                continue;
            }
            for c2 in col..m {
                let v = a[col][c2] * factor;
                a[row][c2] = a[row][c2] - v;
            }
            let v = b[col] * factor;
            b[row] -= v;
        }
    }
    for i in 0..m {
        b[i] = b[i] / a[i][i];
    }
    Some(b)
}

struct Combo<'a, T> {
    demands: &'a [Demand<T>],
    /// (demand index, host) per arc.
    arcs: Vec<(usize, NodeId)>,
    residual_supply: Vec<T>,
    /// (node, residual capacity, arc indices touching it) for finite-capacity hosts.
    cap_rows: Vec<(NodeId, T, Vec<usize>)>,
}

impl<'a, T: Scalar> Combo<'a, T> {
    /// All vertices of {y >= 0, per-demand sums fixed, capacity rows <=}.
    fn vertices(&self) -> Vec<Vec<T>> {
        let m = self.arcs.len();
        let d_count = self.demands.len();
        let extra = m - d_count; // additional tight constraints needed
        let mut tights: Vec<usize> = Vec::new(); // 0..m arc-zero, m.. cap rows
        let pool: Vec<usize> = (0..m + self.cap_rows.len()).collect();
        let mut out: Vec<Vec<T>> = Vec::new();
        self.enumerate_tights(&pool, 0, extra, &mut tights, &mut out);
        out
    }

    fn enumerate_tights(
        &self,
        pool: &[usize],
        from: usize,
        need: usize,
        tights: &mut Vec<usize>,
        out: &mut Vec<Vec<T>>,
    ) {
        if need == 0 {
            if let Some(y) = self.solve_vertex(tights) {
                let tol = T::c(1e-6);
                if !out
                    .iter()
                    .any(|v| v.iter().zip(&y).all(|(a, b)| (*a - *b).abs() < tol))
                {
                    out.push(y);
                }
            }
            return;
        }
        for i in from..pool.len() {
            tights.push(pool[i]);
            self.enumerate_tights(pool, i + 1, need - 1, tights, out);
            tights.pop();
        }
    }

    fn solve_vertex(&self, tights: &[usize]) -> Option<Vec<T>> {
        let m = self.arcs.len();
        let mut a = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        for (d, &supply) in self.residual_supply.iter().enumerate() {
            let mut row = vec![T::zero(); m];
            for (ai, &(ad, _)) in self.arcs.iter().enumerate() {
                if ad == d {
                    row[ai] = T::one();
                }
            }
            a.push(row);
            b.push(supply);
        }
        for &t in tights {
            if t < m {
                let mut row = vec![T::zero(); m];
                row[t] = T::one();
                a.push(row);
                b.push(T::zero());
            } else {
                let (_, cap, members) = &self.cap_rows[t - m];
                let mut row = vec![T::zero(); m];
                for &ai in members {
                    row[ai] = T::one();
                }
                a.push(row);
                b.push(*cap);
            }
        }
        let y = solve_linear(a, b)?;
        let tol = T::c(1e-6);
        if y.iter().any(|&v| v < -tol) {
            return None;
        }
        for (_, cap, members) in &self.cap_rows {
            let used: T = members.iter().map(|&ai| y[ai]).sum();
            if used > *cap + tol {
                return None;
            }
        }
        Some(y.into_iter().map(|v| v.max(T::zero())).collect())
    }
}

pub fn brute_force_oracle<T: Scalar>(
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
    if demands.len() > MAX_DEMANDS {
        return Err(Error::OracleCap(format!(
            "{} demands, oracle handles at most {MAX_DEMANDS}",
            demands.len()
        )));
    }
    if k > MAX_K {
        return Err(Error::OracleCap(format!(
            "K = {k}, oracle handles at most {MAX_K}"
        )));
    }
    if demands.is_empty() {
        let placement = Placement { shares: Vec::new() };
        let power = evaluate(topology, catalog, demands, &placement)?;
        return Ok(SolveResult {
            placement,
            power,
            stats: SolverStats {
                optimal: true,
                ..Default::default()
            },
        });
    }

    let candidates: Vec<Vec<NodeId>> = demands
        .iter()
        .map(|d| candidate_nodes(topology, policy, d.source))
        .collect::<Result<Vec<_>>>()?;
    for c in &candidates {
        if c.len() > MAX_CANDIDATES {
            return Err(Error::OracleCap(format!(
                "{} candidate hosts, oracle handles at most {MAX_CANDIDATES}",
                c.len()
            )));
        }
    }

    // per-demand host subsets of size 1..=k
    let subsets: Vec<Vec<Vec<NodeId>>> = candidates
        .iter()
        .map(|cands| {
            let mut subs = Vec::new();
            for mask in 1u32..(1 << cands.len()) {
                if (mask.count_ones() as usize) <= k {
                    subs.push(
                        (0..cands.len())
                            .filter(|&i| mask & (1 << i) != 0)
                            .map(|i| cands[i])
                            .collect(),
                    );
                }
            }
            subs
        })
        .collect();

    let mut best: Option<(T, Placement<T>)> = None;
    let mut combos_examined = 0u64;
    let mut combo_idx = vec![0usize; demands.len()];
    'combos: loop {
        combos_examined += 1;
        let chosen: Vec<&Vec<NodeId>> = combo_idx
            .iter()
            .enumerate()
            .map(|(d, &i)| &subsets[d][i])
            .collect();

        if let Some(combo) = prepare_combo(topology, catalog, demands, &chosen, min_alloc) {
            for y in combo.vertices() {
                let mut shares: Vec<Vec<(NodeId, T)>> = vec![Vec::new(); demands.len()];
                for (ai, &(d, node)) in combo.arcs.iter().enumerate() {
                    shares[d].push((node, y[ai] + min_alloc));
                }
                // absorb float dust into the first share
                for (d, sh) in shares.iter_mut().enumerate() {
                    let sum: T = sh.iter().map(|&(_, x)| x).sum();
                    sh[0].1 += demands[d].cpu - sum;
                }
                let placement = Placement { shares };
                if placement.validate(demands, k, min_alloc).is_err() {
                    continue;
                }
                if let Ok(power) = evaluate(topology, catalog, demands, &placement) {
                    let better = match &best {
                        None => true,
                        Some((b, _)) => power.total < *b,
                    };
                    if better {
                        best = Some((power.total, placement));
                    }
                }
            }
        }

        // next combination
        for d in (0..demands.len()).rev() {
            combo_idx[d] += 1;
            if combo_idx[d] < subsets[d].len() {
                continue 'combos;
            }
            combo_idx[d] = 0;
        }
        break;
    }

    let Some((_, placement)) = best else {
        return Err(Error::Infeasible("oracle found no feasible placement".into()));
    };
    let power = evaluate(topology, catalog, demands, &placement)?;
    Ok(SolveResult {
        placement,
        power,
        stats: SolverStats {
            nodes_explored: combos_examined,
            optimal: true,
            ..Default::default()
        },
    })
}

fn prepare_combo<'a, T: Scalar>(
    topology: &Topology,
    catalog: &Catalog<T>,
    demands: &'a [Demand<T>],
    chosen: &[&Vec<NodeId>],
    min_alloc: T,
) -> Option<Combo<'a, T>> {
    // network feasibility is a function of the activation pattern alone
    let mut traffic = vec![T::zero(); topology.node_count()];
    for (d, hosts) in demands.iter().zip(chosen) {
        for &host in hosts.iter() {
            for v in topology.path(d.source, host).ok()? {
                traffic[v.0] += d.traffic;
            }
        }
    }
    for node in topology.nodes() {
        if let Some(net) = catalog.network(node.kind) {
            if traffic[node.id.0] > net.capacity {
                return None;
            }
        }
    }

    let mut arcs: Vec<(usize, NodeId)> = Vec::new();
    let mut residual_supply = Vec::with_capacity(demands.len());
    for (di, (d, hosts)) in demands.iter().zip(chosen).enumerate() {
        let r = d.cpu - T::from_usize(hosts.len()).unwrap() * min_alloc;
        if r < T::zero() {
            return None;
        }
        residual_supply.push(r);
        for &host in hosts.iter() {
            arcs.push((di, host));
        }
    }

    let mut cap_rows: Vec<(NodeId, T, Vec<usize>)> = Vec::new();
    let mut hosts_seen: Vec<NodeId> = arcs.iter().map(|&(_, h)| h).collect();
    hosts_seen.sort();
    hosts_seen.dedup();
    for host in hosts_seen {
        let kind = topology.kind(host).ok()?;
        let Some(cap) = catalog.cpu_capacity(kind) else {
            continue; // pooled: unconstrained
        };
        let members: Vec<usize> = arcs
            .iter()
            .enumerate()
            .filter(|(_, &(_, h))| h == host)
            .map(|(i, _)| i)
            .collect();
        let reserved = T::from_usize(members.len()).unwrap() * min_alloc;
        let residual = cap - reserved;
        if residual < T::zero() {
            return None;
        }
        cap_rows.push((host, residual, members));
    }

    Some(Combo {
        demands,
        arcs,
        residual_supply,
        cap_rows,
    })
}
