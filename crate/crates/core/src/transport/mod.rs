//! Exact partial optimal transport between finite persistence measures,
//! ordinary optimal transport between cross-augmented measures, a brute-force
//! oracle for small counting measures, and the sliced Wasserstein
//! approximation.
//!
//! Partial transport is solved as a min-cost flow with one virtual diagonal
//! node: deleting an atom optimally costs exactly its persistence, and
//! diagonal-to-diagonal slack is free, so the flow value equals the partial
//! transport cost. The cross-augmented problem keeps true diagonal atom
//! locations instead and is genuinely different; the two costs sandwich each
//! other within a factor of two.

mod flow;

pub use flow::{solve_transport, FlowSolution};

use crate::error::{Error, Result};
use crate::measure::{PersistenceMeasure, PlanePoint, Region};
use crate::numeric::fmt_f64;
use crate::sphere::{sample, sup_diff, SphereGrid};
use rand::Rng;

/// One side of a plan row: a concrete atom or the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Atom(usize),
    Diag,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanEntry {
    pub src: Endpoint,
    pub dst: Endpoint,
    pub mass: f64,
}

/// Optimal cost together with the transport plan that attains it.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult {
    pub cost: f64,
    pub plan: Vec<PlanEntry>,
}

impl TransportResult {
    /// Serialize as a `cost,<value>` header followed by `src,dst,mass` rows,
    /// with `DIAG` marking the diagonal.
    pub fn to_csv(&self) -> String {
        let mut out = format!("cost,{}\n", fmt_f64(self.cost));
        for e in &self.plan {
            let fmt_ep = |ep: Endpoint| match ep {
                Endpoint::Atom(i) => i.to_string(),
                Endpoint::Diag => "DIAG".to_string(),
            };
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_ep(e.src),
                fmt_ep(e.dst),
                fmt_f64(e.mass)
            ));
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty transport file".into(),
        })?;
        let cost = header
            .trim()
            .strip_prefix("cost,")
            .and_then(|s| s.trim().parse::<f64>().ok())
            .ok_or(Error::Parse {
                line: 1,
                msg: "expected cost,<value> header".into(),
            })?;
        let mut plan = Vec::new();
        for (idx, raw) in lines {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "expected src,dst,mass".into(),
                });
            }
            let parse_ep = |s: &str| -> Result<Endpoint> {
                if s == "DIAG" {
                    Ok(Endpoint::Diag)
                } else {
                    s.parse::<usize>().map(Endpoint::Atom).map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("bad endpoint {s:?}"),
                    })
                }
            };
            let mass = fields[2].parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad mass {:?}", fields[2]),
            })?;
            plan.push(PlanEntry {
                src: parse_ep(fields[0])?,
                dst: parse_ep(fields[1])?,
                mass,
            });
        }
        Ok(TransportResult { cost, plan })
    }
}

/// Evaluate a partial plan's objective against the two measures it connects:
/// matched mass pays the sup-norm ground distance, mass on `DIAG` rows pays
/// the persistence of the concrete endpoint.
pub fn evaluate_pot_plan(
    mu: &PersistenceMeasure,
    nu: &PersistenceMeasure,
    plan: &[PlanEntry],
) -> f64 {
    plan.iter()
        .map(|e| {
            let c = match (e.src, e.dst) {
                (Endpoint::Atom(i), Endpoint::Atom(j)) => {
                    mu.atoms()[i].point.linf_dist(&nu.atoms()[j].point)
                }
                (Endpoint::Atom(i), Endpoint::Diag) => mu.atoms()[i].point.persistence(),
                (Endpoint::Diag, Endpoint::Atom(j)) => nu.atoms()[j].point.persistence(),
                (Endpoint::Diag, Endpoint::Diag) => 0.0,
            };
            e.mass * c
        })
        .sum()
}

/// Partial optimal transport distance between two finite measures: matched
/// mass pays sup-norm ground cost, unmatched mass pays its persistence.
///
/// Symmetric, nonnegative, zero on identical measures; against the null
/// measure the cost is exactly the total persistence.
pub fn pot1(mu: &PersistenceMeasure, nu: &PersistenceMeasure) -> Result<TransportResult> {
    // Transport to or from the null measure deletes everything; returning
    // the persistence sum directly keeps the identity exact.
    if nu.is_empty() {
        let plan = (0..mu.len())
            .map(|i| PlanEntry {
                src: Endpoint::Atom(i),
                dst: Endpoint::Diag,
                mass: mu.atoms()[i].weight,
            })
            .collect();
        return Ok(TransportResult {
            cost: mu.total_persistence(),
            plan,
        });
    }
    if mu.is_empty() {
        let plan = (0..nu.len())
            .map(|j| PlanEntry {
                src: Endpoint::Diag,
                dst: Endpoint::Atom(j),
                mass: nu.atoms()[j].weight,
            })
            .collect();
        return Ok(TransportResult {
            cost: nu.total_persistence(),
            plan,
        });
    }

    let m = mu.len();
    let n = nu.len();
    let mass_mu = mu.mass();
    let mass_nu = nu.mass();
    let mut supplies: Vec<f64> = mu.atoms().iter().map(|a| a.weight).collect();
    supplies.push(mass_nu);
    let mut demands: Vec<f64> = nu.atoms().iter().map(|a| a.weight).collect();
    demands.push(mass_mu);

    let sol = solve_transport(&supplies, &demands, |i, j| match (i < m, j < n) {
        (true, true) => mu.atoms()[i].point.linf_dist(&nu.atoms()[j].point),
        (true, false) => mu.atoms()[i].point.persistence(),
        (false, true) => nu.atoms()[j].point.persistence(),
        (false, false) => 0.0,
    })?;

    let plan = sol
        .flows
        .iter()
        .filter(|&&(i, j, _)| i < m || j < n)
        .map(|&(i, j, mass)| PlanEntry {
            src: if i < m { Endpoint::Atom(i) } else { Endpoint::Diag },
            dst: if j < n { Endpoint::Atom(j) } else { Endpoint::Diag },
            mass,
        })
        .collect();
    Ok(TransportResult {
        cost: sol.cost,
        plan,
    })
}

/// Ordinary optimal transport between the two cross-augmented measures,
/// with true diagonal atom locations. Plan endpoints index the augmented
/// atom lists: sources `0..mu.len()` are atoms of `mu`, the rest are
/// diagonal projections of `nu` atoms, and symmetrically for targets.
pub fn ot1_cross_augmented(
    mu: &PersistenceMeasure,
    nu: &PersistenceMeasure,
) -> Result<TransportResult> {
    let src: Vec<(PlanePoint, f64)> = mu.cross_augment(nu).atoms().to_vec();
    let dst: Vec<(PlanePoint, f64)> = nu.cross_augment(mu).atoms().to_vec();
    if src.is_empty() && dst.is_empty() {
        return Ok(TransportResult {
            cost: 0.0,
            plan: Vec::new(),
        });
    }
    let supplies: Vec<f64> = src.iter().map(|&(_, w)| w).collect();
    let demands: Vec<f64> = dst.iter().map(|&(_, w)| w).collect();
    let sol = solve_transport(&supplies, &demands, |i, j| src[i].0.linf_dist(&dst[j].0))?;
    let plan = sol
        .flows
        .iter()
        .map(|&(i, j, mass)| PlanEntry {
            src: Endpoint::Atom(i),
            dst: Endpoint::Atom(j),
            mass,
        })
        .collect();
    Ok(TransportResult {
        cost: sol.cost,
        plan,
    })
}

/// Exhaustive partial-transport oracle for counting measures with at most
/// four atoms per side: minimizes over every partial injection between the
/// atom sets, each unmatched atom paying its persistence.
pub fn pot1_bruteforce(mu: &PersistenceMeasure, nu: &PersistenceMeasure) -> Result<f64> {
    if mu.len() > 4 || nu.len() > 4 {
        return Err(Error::SizeLimit(format!(
            "brute-force oracle takes at most 4 atoms per side, got {} and {}",
            mu.len(),
            nu.len()
        )));
    }
    if !mu.is_counting() || !nu.is_counting() {
        return Err(Error::InvalidParameter(
            "brute-force oracle requires unit weights".into(),
        ));
    }
    let ps: Vec<PlanePoint> = mu.atoms().iter().map(|a| a.point).collect();
    let qs: Vec<PlanePoint> = nu.atoms().iter().map(|a| a.point).collect();

    fn go(ps: &[PlanePoint], qs: &[PlanePoint], i: usize, used: &mut [bool]) -> f64 {
        if i == ps.len() {
            return qs
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(q, _)| q.persistence())
                .sum();
        }
        // Delete atom i.
        let mut best = ps[i].persistence() + go(ps, qs, i + 1, used);
        // Or match it to any unused target atom.
        for j in 0..qs.len() {
            if !used[j] {
                used[j] = true;
                let c = ps[i].linf_dist(&qs[j]) + go(ps, qs, i + 1, used);
                used[j] = false;
                best = best.min(c);
            }
        }
        best
    }

    let mut used = vec![false; qs.len()];
    Ok(go(&ps, &qs, 0, &mut used))
}

/// Continued-fraction rational approximation with bounded denominator.
fn to_rational(w: f64, max_den: u64) -> Option<(u64, u64)> {
    if !(w > 0.0) || !w.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut x = w;
    for _ in 0..64 {
        let a = x.floor();
        if a > u64::MAX as f64 {
            return None;
        }
        let a_int = a as u64;
        let p2 = a_int.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a_int.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = x - a;
        if frac < 1e-12 {
            break;
        }
        x = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    // A tight tolerance with a small denominator cap accepts f64-rounded
    // small rationals but rejects genuinely irrational weights, whose best
    // approximants at this cap stay many orders of magnitude further away.
    let approx = p1 as f64 / q1 as f64;
    ((approx - w).abs() <= 1e-12 * w.max(1.0)).then_some((p1, q1))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Expand both measures and their diagonal projections into equal-cardinality
/// unit-mass multisets, returning `(points_a, points_b, scale)`; projected
/// values must later be divided by `scale`.
fn expanded_multisets(
    mu: &PersistenceMeasure,
    nu: &PersistenceMeasure,
) -> Result<(Vec<PlanePoint>, Vec<PlanePoint>, u64)> {
    const MAX_DEN: u64 = 10_000;
    const MAX_POINTS: u64 = 2_000_000;
    let mut rationals = Vec::new();
    for a in mu.atoms().iter().chain(nu.atoms().iter()) {
        let r = to_rational(a.weight, MAX_DEN).ok_or_else(|| {
            Error::WeightExpansion(format!(
                "weight {} has no small rational representation",
                a.weight
            ))
        })?;
        rationals.push(r);
    }
    let mut scale = 1u64;
    for &(_, q) in &rationals {
        scale = scale
            .checked_mul(q / gcd(scale, q))
            .filter(|&l| l <= MAX_DEN)
            .ok_or_else(|| {
                Error::WeightExpansion("common denominator exceeds the expansion cap".into())
            })?;
    }
    let copies: Vec<u64> = rationals.iter().map(|&(p, q)| p * (scale / q)).collect();
    let total: u64 = copies.iter().sum();
    if total > MAX_POINTS {
        return Err(Error::WeightExpansion(format!(
            "expansion needs {total} points, more than the {MAX_POINTS} cap"
        )));
    }

    let m = mu.len();
    let mut side_a = Vec::new();
    let mut side_b = Vec::new();
    for (k, a) in mu.atoms().iter().enumerate() {
        for _ in 0..copies[k] {
            side_a.push(a.point);
            side_b.push(a.point.diag_project());
        }
    }
    for (k, a) in nu.atoms().iter().enumerate() {
        for _ in 0..copies[m + k] {
            side_b.push(a.point);
            side_a.push(a.point.diag_project());
        }
    }
    Ok((side_a, side_b, scale))
}

/// Sliced Wasserstein distance over an explicit list of line angles: each
/// measure is united with the diagonal projection of the other, both
/// multisets are projected onto the line of each angle, and the sorted
/// values are matched in order.
pub fn sliced_wasserstein_with_angles(
    mu: &PersistenceMeasure,
    nu: &PersistenceMeasure,
    angles: &[f64],
) -> Result<f64> {
    if angles.is_empty() {
        return Err(Error::InvalidParameter(
            "sliced Wasserstein needs at least one direction".into(),
        ));
    }
    let (side_a, side_b, scale) = expanded_multisets(mu, nu)?;
    debug_assert_eq!(side_a.len(), side_b.len());
    if side_a.is_empty() {
        return Ok(0.0);
    }
    let mut proj_a = vec![0.0f64; side_a.len()];
    let mut proj_b = vec![0.0f64; side_b.len()];
    let mut acc = 0.0;
    for &theta in angles {
        let (s, c) = theta.sin_cos();
        for (out, p) in proj_a.iter_mut().zip(&side_a) {
            *out = c * p.x + s * p.y;
        }
        for (out, p) in proj_b.iter_mut().zip(&side_b) {
            *out = c * p.x + s * p.y;
        }
        proj_a.sort_by(f64::total_cmp);
        proj_b.sort_by(f64::total_cmp);
        let w1: f64 = proj_a
            .iter()
            .zip(&proj_b)
            .map(|(a, b)| (a - b).abs())
            .sum();
        acc += w1 / scale as f64;
    }
    Ok(acc / angles.len() as f64)
}

/// Sliced Wasserstein with `n_dirs` deterministic, evenly spaced angles
/// (cell midpoints of `[-pi/2, pi/2)`).
pub fn sliced_wasserstein(
    mu: &PersistenceMeasure,
    nu: &PersistenceMeasure,
    n_dirs: usize,
) -> Result<f64> {
    if n_dirs == 0 {
        return Err(Error::InvalidParameter(
            "sliced Wasserstein needs at least one direction".into(),
        ));
    }
    let angles: Vec<f64> = (0..n_dirs)
        .map(|i| -std::f64::consts::FRAC_PI_2 + (i as f64 + 0.5) * std::f64::consts::PI / n_dirs as f64)
        .collect();
    sliced_wasserstein_with_angles(mu, nu, &angles)
}

/// Sliced Wasserstein over `n_dirs` seeded random lines.
pub fn sliced_wasserstein_random(
    mu: &PersistenceMeasure,
    nu: &PersistenceMeasure,
    n_dirs: usize,
    seed: u64,
) -> Result<f64> {
    use rand::SeedableRng;
    if n_dirs == 0 {
        return Err(Error::InvalidParameter(
            "sliced Wasserstein needs at least one direction".into(),
        ));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let angles: Vec<f64> = (0..n_dirs)
        .map(|_| rng.gen_range(-std::f64::consts::FRAC_PI_2..std::f64::consts::FRAC_PI_2))
        .collect();
    sliced_wasserstein_with_angles(mu, nu, &angles)
}

/// One row of the compact-band diagnostic: the grid sup discrepancy of the
/// two spheres, the exact partial transport cost, and the persistence sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderRow {
    pub epsilon: f64,
    pub pot: f64,
    pub pers_sum: f64,
}

/// Tabulate `(epsilon, pot, pers_sum)` for measure pairs supported in a
/// declared compact band. Raw data for offline inspection; no constant is
/// asserted.
pub fn holder_diagnostic(
    pairs: &[(PersistenceMeasure, PersistenceMeasure)],
    band: &Region,
    grid: &SphereGrid,
) -> Result<Vec<HolderRow>> {
    for (k, (mu, nu)) in pairs.iter().enumerate() {
        for a in mu.atoms().iter().chain(nu.atoms().iter()) {
            if !band.contains(&a.point) {
                return Err(Error::InvalidData(format!(
                    "pair {k} has an atom outside the declared band: ({}, {})",
                    a.point.x, a.point.y
                )));
            }
        }
    }
    pairs
        .iter()
        .map(|(mu, nu)| {
            let epsilon = sup_diff(&sample(mu, grid), &sample(nu, grid))?;
            let pot = pot1(mu, nu)?.cost;
            Ok(HolderRow {
                epsilon,
                pot,
                pers_sum: mu.total_persistence() + nu.total_persistence(),
            })
        })
        .collect()
}
