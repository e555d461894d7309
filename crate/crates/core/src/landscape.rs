//! Persistence landscapes sampled on a uniform time grid, with the exact L2
//! distance used by the comparison pipelines.
//!
//! A diagram atom `(x, y)` contributes the tent `t -> max(0, min(t - x, y - t))`,
//! of height `pers(p)` at `d(p)`; the k-th landscape takes the k-th largest
//! tent value pointwise.

use crate::error::{Error, Result};
use crate::measure::PersistenceMeasure;
use crate::numeric::fmt_f64;

/// A uniform grid `t_0 < ... < t_{len-1}` over `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, len: usize) -> Result<Self> {
        if !(end > start) || len < 2 {
            return Err(Error::InvalidParameter(format!(
                "time grid needs end > start and at least 2 points, got [{start}, {end}] x {len}"
            )));
        }
        Ok(Self { start, end, len })
    }

    #[inline]
    pub fn step(&self) -> f64 {
        (self.end - self.start) / (self.len - 1) as f64
    }

    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step()
    }
}

/// The first `k_max` landscape functions of a counting measure, sampled on a
/// [`TimeGrid`]. Values are nonnegative and nonincreasing in the level.
#[derive(Debug, Clone, PartialEq)]
pub struct Landscape {
    pub k_max: usize,
    pub grid: TimeGrid,
    /// `k_max` rows of `grid.len` samples.
    values: Vec<f64>,
}

impl Landscape {
    pub fn value(&self, k: usize, i: usize) -> f64 {
        self.values[k * self.grid.len + i]
    }

    pub fn level(&self, k: usize) -> &[f64] {
        &self.values[k * self.grid.len..(k + 1) * self.grid.len]
    }

    /// Serialize as a `start,end,len,k_max` header followed by `k_max` rows.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "{},{},{},{}\n",
            fmt_f64(self.grid.start),
            fmt_f64(self.grid.end),
            self.grid.len,
            self.k_max
        );
        for k in 0..self.k_max {
            let row: Vec<String> = self.level(k).iter().map(|v| fmt_f64(*v)).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_csv().as_bytes())
    }
}

/// Sample the first `k_max` landscapes of a counting measure on `grid`.
pub fn landscape(mu: &PersistenceMeasure, k_max: usize, grid: &TimeGrid) -> Result<Landscape> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be positive".into()));
    }
    if !mu.is_counting() {
        return Err(Error::InvalidParameter(
            "landscapes are defined here for counting measures (unit weights)".into(),
        ));
    }
    let mut values = vec![0.0f64; k_max * grid.len];
    let mut tents = vec![0.0f64; mu.len()];
    for i in 0..grid.len {
        let t = grid.at(i);
        for (slot, a) in tents.iter_mut().zip(mu.atoms()) {
            *slot = (t - a.point.x).min(a.point.y - t).max(0.0);
        }
        tents.sort_by(|a, b| b.total_cmp(a));
        for (k, row) in tents.iter().take(k_max).enumerate() {
            values[k * grid.len + i] = *row;
        }
    }
    Ok(Landscape {
        k_max,
        grid: *grid,
        values,
    })
}

/// Trapezoid integral of one landscape level over its grid.
pub fn level_area(ls: &Landscape, k: usize) -> f64 {
    trapezoid(ls.level(k), ls.grid.step())
}

fn trapezoid(ys: &[f64], h: f64) -> f64 {
    if ys.len() < 2 {
        return 0.0;
    }
    let inner: f64 = ys[1..ys.len() - 1].iter().sum();
    h * (0.5 * (ys[0] + ys[ys.len() - 1]) + inner)
}

/// Exact-on-the-grid L2 distance `sqrt(sum_k int (a_k - b_k)^2 dt)` via the
/// trapezoid rule. Requires identical grids and level counts.
pub fn landscape_l2(a: &Landscape, b: &Landscape) -> Result<f64> {
    if a.grid != b.grid || a.k_max != b.k_max {
        return Err(Error::GeometryMismatch(format!(
            "landscape grids differ: {:?} x {} vs {:?} x {}",
            a.grid, a.k_max, b.grid, b.k_max
        )));
    }
    let h = a.grid.step();
    let mut total = 0.0;
    let mut sq = vec![0.0f64; a.grid.len];
    for k in 0..a.k_max {
        for (s, (x, y)) in sq.iter_mut().zip(a.level(k).iter().zip(b.level(k))) {
            let d = x - y;
            *s = d * d;
        }
        total += trapezoid(&sq, h);
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(points: &[(f64, f64)]) -> PersistenceMeasure {
        PersistenceMeasure::from_points(points).unwrap()
    }

    #[test]
    fn single_tent_area_is_squared_persistence() {
        let mu = pm(&[(1.0, 4.0)]);
        let grid = TimeGrid::new(0.0, 5.0, 10_001).unwrap();
        let ls = landscape(&mu, 1, &grid).unwrap();
        let pers = 1.5;
        let area = level_area(&ls, 0);
        assert!((area - pers * pers).abs() < 1e-3 * pers * pers);
        // The peak sits at the diagonal coordinate with height pers.
        let peak = ls.level(0).iter().cloned().fold(0.0f64, f64::max);
        assert!((peak - pers).abs() < grid.step());
    }

    #[test]
    fn empty_diagram_is_flat_zero() {
        let grid = TimeGrid::new(0.0, 1.0, 11).unwrap();
        let ls = landscape(&PersistenceMeasure::empty(), 3, &grid).unwrap();
        assert!(ls.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn disjoint_tents_leave_second_level_empty() {
        let mu = pm(&[(0.0, 1.0), (10.0, 11.0)]);
        let grid = TimeGrid::new(-1.0, 12.0, 1301).unwrap();
        let ls = landscape(&mu, 2, &grid).unwrap();
        assert!(ls.level(1).iter().all(|v| *v == 0.0));
        assert!(ls.level(0).iter().any(|v| *v > 0.0));
    }

    #[test]
    fn levels_are_sorted_and_lipschitz() {
        let mu = pm(&[(0.0, 4.0), (1.0, 3.0), (2.0, 6.0)]);
        let grid = TimeGrid::new(-1.0, 7.0, 801).unwrap();
        let ls = landscape(&mu, 3, &grid).unwrap();
        let h = grid.step();
        for k in 0..3 {
            let level = ls.level(k);
            for i in 1..level.len() {
                assert!((level[i] - level[i - 1]).abs() <= h + 1e-12);
            }
            if k > 0 {
                for i in 0..level.len() {
                    assert!(ls.value(k, i) <= ls.value(k - 1, i));
                }
            }
        }
    }

    #[test]
    fn landscape_is_invariant_under_atom_reordering() {
        let grid = TimeGrid::new(-1.0, 7.0, 101).unwrap();
        let a = landscape(&pm(&[(0.0, 4.0), (1.0, 3.0)]), 2, &grid).unwrap();
        let b = landscape(&pm(&[(1.0, 3.0), (0.0, 4.0)]), 2, &grid).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn l2_distance_examples() {
        let grid = TimeGrid::new(-1.0, 5.0, 6001).unwrap();
        let a = landscape(&pm(&[(0.0, 2.0)]), 1, &grid).unwrap();
        assert_eq!(landscape_l2(&a, &a).unwrap(), 0.0);
        // Single tent vs empty: sqrt(2 pers^3 / 3).
        let zero = landscape(&PersistenceMeasure::empty(), 1, &grid).unwrap();
        let pers: f64 = 1.0;
        let expected = (2.0 * pers.powi(3) / 3.0).sqrt();
        let got = landscape_l2(&a, &zero).unwrap();
        assert!((got - expected).abs() < 1e-3 * expected);
        // Grid mismatch is an error.
        let other = TimeGrid::new(-1.0, 5.0, 601).unwrap();
        let c = landscape(&pm(&[(0.0, 2.0)]), 1, &other).unwrap();
        assert!(landscape_l2(&a, &c).is_err());
    }

    #[test]
    fn rejects_weighted_measures() {
        let grid = TimeGrid::new(0.0, 1.0, 11).unwrap();
        let weighted = PersistenceMeasure::from_triples(&[(0.0, 2.0, 2.0)]).unwrap();
        assert!(landscape(&weighted, 1, &grid).is_err());
    }
}
