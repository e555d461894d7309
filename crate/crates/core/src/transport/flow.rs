//! Uncapacitated transportation solver: successive shortest paths with node
//! potentials on floating-point costs.
//!
//! Sources ship their supply to sinks through a complete bipartite arc set;
//! only supplies and demands bind. Dense Dijkstra is used per phase, which is
//! the right trade-off at desk-scale instance sizes. Reduced costs are clamped
//! at zero within a 1e-9 optimality tolerance.

use crate::error::{Error, Result};

const REDUCED_COST_TOL: f64 = 1e-9;

pub struct FlowSolution {
    pub cost: f64,
    /// Positive flows as `(source, sink, mass)` triples.
    pub flows: Vec<(usize, usize, f64)>,
}

/// Solve `min sum f_ij c(i, j)` subject to `sum_j f_ij = supply_i`,
/// `sum_i f_ij = demand_j`, `f >= 0`. Total supply and demand must agree up
/// to rounding.
pub fn solve_transport(
    supplies: &[f64],
    demands: &[f64],
    cost: impl Fn(usize, usize) -> f64,
) -> Result<FlowSolution> {
    let m = supplies.len();
    let n = demands.len();
    let total_supply: f64 = supplies.iter().sum();
    let total_demand: f64 = demands.iter().sum();
    let scale = 1.0 + total_supply.abs();
    if (total_supply - total_demand).abs() > 1e-9 * scale {
        return Err(Error::InvalidData(format!(
            "transport imbalance: supply {total_supply} vs demand {total_demand}"
        )));
    }
    if m == 0 || n == 0 || total_supply <= 0.0 {
        return Ok(FlowSolution {
            cost: 0.0,
            flows: Vec::new(),
        });
    }
    for (i, &s) in supplies.iter().enumerate() {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::InvalidData(format!("bad supply {s} at {i}")));
        }
    }
    for (j, &d) in demands.iter().enumerate() {
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Error::InvalidData(format!("bad demand {d} at {j}")));
        }
    }

    let costs: Vec<f64> = (0..m * n).map(|k| cost(k / n, k % n)).collect();
    if costs.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::InvalidData(
            "transport costs must be finite and nonnegative".into(),
        ));
    }

    let mut flow = vec![0.0f64; m * n];
    let mut remaining_supply = supplies.to_vec();
    let mut remaining_demand = demands.to_vec();
    let mass_tol = 1e-12 * scale;

    // Potentials on sources and sinks keep reduced costs nonnegative.
    let mut pot_src = vec![0.0f64; m];
    let mut pot_snk = vec![0.0f64; n];

    let mut dist_src = vec![0.0f64; m];
    let mut dist_snk = vec![0.0f64; n];
    let mut done_src = vec![false; m];
    let mut done_snk = vec![false; n];
    let mut parent_snk = vec![usize::MAX; n]; // source feeding each sink
    let mut parent_src = vec![usize::MAX; m]; // sink feeding each source (reverse arc)

    let max_phases = 100 * (m + n) + 1000;
    let mut phases = 0usize;

    // Ship until one side is exhausted; rounding dust on the other side is
    // covered by the imbalance tolerance above.
    loop {
        let supply_left = remaining_supply.iter().any(|&s| s > mass_tol);
        let demand_left = remaining_demand.iter().any(|&d| d > mass_tol);
        if !supply_left || !demand_left {
            break;
        }
        phases += 1;
        if phases > max_phases {
            return Err(Error::InvalidData(
                "transport solver failed to converge (degenerate instance)".into(),
            ));
        }

        // Multi-source Dijkstra over the residual graph in reduced costs.
        for i in 0..m {
            dist_src[i] = if remaining_supply[i] > mass_tol {
                0.0
            } else {
                f64::INFINITY
            };
            done_src[i] = false;
            parent_src[i] = usize::MAX;
        }
        for j in 0..n {
            dist_snk[j] = f64::INFINITY;
            done_snk[j] = false;
            parent_snk[j] = usize::MAX;
        }

        loop {
            // Extract the unfinished node of smallest tentative distance.
            let mut best = f64::INFINITY;
            let mut pick_src = usize::MAX;
            let mut pick_snk = usize::MAX;
            for i in 0..m {
                if !done_src[i] && dist_src[i] < best {
                    best = dist_src[i];
                    pick_src = i;
                    pick_snk = usize::MAX;
                }
            }
            for j in 0..n {
                if !done_snk[j] && dist_snk[j] < best {
                    best = dist_snk[j];
                    pick_snk = j;
                    pick_src = usize::MAX;
                }
            }
            if best.is_infinite() {
                break;
            }
            if pick_src != usize::MAX {
                let i = pick_src;
                done_src[i] = true;
                // Forward arcs i -> j for every sink.
                let base = i * n;
                for j in 0..n {
                    if done_snk[j] {
                        continue;
                    }
                    let rc = (costs[base + j] + pot_src[i] - pot_snk[j]).max(0.0);
                    let nd = dist_src[i] + rc;
                    if nd < dist_snk[j] {
                        dist_snk[j] = nd;
                        parent_snk[j] = i;
                    }
                }
            } else {
                let j = pick_snk;
                done_snk[j] = true;
                // Reverse arcs j -> i where flow is positive.
                for i in 0..m {
                    if done_src[i] || flow[i * n + j] <= 0.0 {
                        continue;
                    }
                    let rc = (-costs[i * n + j] + pot_snk[j] - pot_src[i]).max(0.0);
                    debug_assert!(rc < REDUCED_COST_TOL.max(1e-6));
                    let nd = dist_snk[j] + rc;
                    if nd < dist_src[i] {
                        dist_src[i] = nd;
                        parent_src[i] = j;
                    }
                }
            }
        }

        // Pick the reachable sink with unmet demand at smallest distance.
        let mut target = usize::MAX;
        let mut target_dist = f64::INFINITY;
        for j in 0..n {
            if remaining_demand[j] > mass_tol && dist_snk[j] < target_dist {
                target_dist = dist_snk[j];
                target = j;
            }
        }
        if target == usize::MAX {
            return Err(Error::InvalidData(
                "transport solver: no augmenting path with demand left".into(),
            ));
        }

        // Walk the path back, collecting the bottleneck.
        let mut path: Vec<(usize, usize, bool)> = Vec::new(); // (i, j, forward)
        let mut delta = remaining_demand[target];
        let mut j = target;
        loop {
            let i = parent_snk[j];
            debug_assert_ne!(i, usize::MAX);
            path.push((i, j, true));
            match parent_src[i] {
                usize::MAX => {
                    delta = delta.min(remaining_supply[i]);
                    break;
                }
                back_j => {
                    path.push((i, back_j, false));
                    delta = delta.min(flow[i * n + back_j]);
                    j = back_j;
                }
            }
        }
        debug_assert!(delta > 0.0);

        for &(i, j, forward) in &path {
            if forward {
                flow[i * n + j] += delta;
            } else {
                let f = &mut flow[i * n + j];
                *f -= delta;
                if *f < mass_tol {
                    *f = 0.0;
                }
            }
        }
        let src = path.last().unwrap().0;
        remaining_supply[src] -= delta;
        if remaining_supply[src] < mass_tol {
            remaining_supply[src] = 0.0;
        }
        remaining_demand[target] -= delta;
        if remaining_demand[target] < mass_tol {
            remaining_demand[target] = 0.0;
        }

        // Johnson-style potential update keeps future reduced costs >= 0.
        let reach = target_dist;
        for i in 0..m {
            pot_src[i] += dist_src[i].min(reach);
        }
        for j in 0..n {
            pot_snk[j] += dist_snk[j].min(reach);
        }
    }

    // Recompute the objective from the final flow in a fixed order.
    let mut flows = Vec::new();
    let mut cost_total = 0.0;
    for i in 0..m {
        for j in 0..n {
            let f = flow[i * n + j];
            if f > 0.0 {
                cost_total += f * costs[i * n + j];
                flows.push((i, j, f));
            }
        }
    }
    Ok(FlowSolution {
        cost: cost_total,
        flows,
    })
}
