//! Persistence spheres: the signed lift-zonoid transform evaluated on the
//! unit sphere, polar quadrature grids, analytic test directions, sphere
//! norms, and the classical positive lift-zonoid support function.
//!
//! The grid maximum is the computable surrogate for the true sup norm; it is
//! always a lower bound, so every upper-bound check run against it remains
//! valid. Identities attained at specific directions are made exact by
//! carrying those directions as extra zero-weight nodes of the canonical grid.

use crate::error::{Error, Result};
use crate::measure::{PersistenceMeasure, PlanePoint, Region, SignedAtomSet};
use crate::numeric::{fmt_f64, pairwise_sum, relu};

const UNIT_TOL: f64 = 1e-12;

/// A unit vector of R^3. Coordinates are `(v0, v1, v2)` where `v0` pairs
/// with the lift coordinate and `(v1, v2)` with the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    coords: [f64; 3],
}

impl Direction {
    /// Build from components, requiring unit norm within `1e-12`.
    pub fn new(v0: f64, v1: f64, v2: f64) -> Result<Self> {
        let sq = v0 * v0 + v1 * v1 + v2 * v2;
        if (sq - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidParameter(format!(
                "direction ({v0}, {v1}, {v2}) is not unit: |v|^2 = {sq}"
            )));
        }
        Ok(Self {
            coords: [v0, v1, v2],
        })
    }

    /// Normalize an arbitrary nonzero vector onto the sphere.
    pub fn normalized(v0: f64, v1: f64, v2: f64) -> Result<Self> {
        let n = (v0 * v0 + v1 * v1 + v2 * v2).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidParameter(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Ok(Self {
            coords: [v0 / n, v1 / n, v2 / n],
        })
    }

    pub fn coords(&self) -> [f64; 3] {
        self.coords
    }

    /// Coefficient multiplying the diagonal coordinate `d(p)`: `v1 + v2`.
    #[inline]
    pub fn diag_coeff(&self) -> f64 {
        self.coords[1] + self.coords[2]
    }

    /// Coefficient multiplying the persistence `pers(p)`: `v2 - v1`.
    /// Always bounded by `sqrt(2)` in absolute value.
    #[inline]
    pub fn pers_coeff(&self) -> f64 {
        self.coords[2] - self.coords[1]
    }

    /// Both derived coordinates at once, `(s, t)`.
    #[inline]
    pub fn st_coords(&self) -> (f64, f64) {
        (self.diag_coeff(), self.pers_coeff())
    }

    /// The reflection `(v0, -v2, -v1)`, which flips the sign of the diagonal
    /// coefficient and preserves the persistence coefficient.
    pub fn reflect(&self) -> Direction {
        Direction {
            coords: [self.coords[0], -self.coords[2], -self.coords[1]],
        }
    }
}

/// The direction reading off total persistence: `(0, -1/sqrt2, 1/sqrt2)`.
pub fn v_pers() -> Direction {
    Direction {
        coords: [0.0, -std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
    }
}

/// The hinge direction at threshold `delta >= 0`. Evaluating a sphere here
/// yields `t_delta * sum_i w_i (pers(p_i) - delta)_+`, with
/// `t_delta = sqrt(2 / (1 + 2 delta^2))`. At `delta = 0` this is [`v_pers`].
pub fn v_delta(delta: f64) -> Result<Direction> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "hinge threshold must be nonnegative, got {delta}"
        )));
    }
    let t = hinge_scale(delta);
    Direction::new(-delta * t, -0.5 * t, 0.5 * t)
}

/// The scale `t_delta = sqrt(2 / (1 + 2 delta^2))` of the hinge direction.
pub fn hinge_scale(delta: f64) -> f64 {
    (2.0 / (1.0 + 2.0 * delta * delta)).sqrt()
}

/// A direction vanishing on `{ |d| <= r0, pers <= m0 }` while detecting
/// persistence mass far out along the positive diagonal: the normalization
/// of `(-1, (s0 - t0)/2, (s0 + t0)/2)` with `s0 = 1/(2 r0)`, `t0 = 1/(2 m0)`.
pub fn far_direction(r0: f64, m0: f64) -> Result<Direction> {
    if !(r0 > 0.0) || !(m0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "far direction needs positive bounds, got r0 = {r0}, m0 = {m0}"
        )));
    }
    let s0 = 0.5 / r0;
    let t0 = 0.5 / m0;
    Direction::normalized(-1.0, 0.5 * (s0 - t0), 0.5 * (s0 + t0))
}

/// Pointwise integrand of the sphere transform at direction `v` and point
/// `p`: the difference of ReLU terms at `p` and at its diagonal projection.
/// Bounded by `sqrt(2) * pers(p)` in absolute value.
#[inline]
pub fn integrand(v: &Direction, p: &PlanePoint) -> f64 {
    let (s, t) = v.st_coords();
    let base = v.coords[0] + p.diag_coord() * s;
    relu(base + p.persistence() * t) - relu(base)
}

/// Evaluate the persistence sphere of `mu` at a single direction:
/// `sum_i w_i * integrand(v, p_i)`. Linear in the measure.
pub fn eval(mu: &PersistenceMeasure, v: &Direction) -> f64 {
    mu.atoms()
        .iter()
        .map(|a| a.weight * integrand(v, &a.point))
        .sum()
}

/// The signed lift-zonoid transform of a signed atom set at `v`:
/// `sum_i w_i * relu(<v, (1, p_i)>)`. For the augmentation of a measure this
/// agrees with [`eval`].
pub fn lift_transform(sigma: &SignedAtomSet, v: &Direction) -> f64 {
    let [v0, v1, v2] = v.coords;
    sigma
        .atoms()
        .iter()
        .map(|(p, w)| w * relu(v0 + v1 * p.x + v2 * p.y))
        .sum()
}

/// Support function of the classical (positive) lift zonoid of `mu` at `v`:
/// `sum_i w_i * relu(<v, (1, p_i)>)`. Nonnegative and additive in the measure.
pub fn lift_zonoid_support(mu: &PersistenceMeasure, v: &Direction) -> f64 {
    let [v0, v1, v2] = v.coords;
    mu.atoms()
        .iter()
        .map(|a| a.weight * relu(v0 + v1 * a.point.x + v2 * a.point.y))
        .sum()
}

/// Polar quadrature grid on the sphere with cell-centered colatitudes
/// `theta_i = (i + 1/2) pi / n_lat` and longitudes `phi_j = 2 pi j / n_lon`,
/// plus a finite list of extra zero-weight directions.
///
/// Quadrature weights are `sin(theta_i) * (pi / n_lat) * (2 pi / n_lon)`;
/// their total converges to `4 pi` as the grid refines. No node sits at a
/// pole, so no weight degenerates.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    n_lat: usize,
    n_lon: usize,
    extra: Vec<Direction>,
}

impl SphereGrid {
    /// The canonical grid: the polar lattice augmented with the total
    /// persistence direction as a zero-weight node, so identities attained
    /// there hold exactly under the grid sup.
    pub fn new(n_lat: usize, n_lon: usize) -> Result<Self> {
        Ok(Self {
            extra: vec![v_pers()],
            ..Self::lattice(n_lat, n_lon)?
        })
    }

    /// The bare polar lattice with no extra nodes (the file format carries
    /// exactly this part).
    pub fn lattice(n_lat: usize, n_lon: usize) -> Result<Self> {
        if n_lat == 0 || n_lon == 0 {
            return Err(Error::InvalidParameter(
                "grid dimensions must be positive".into(),
            ));
        }
        Ok(Self {
            n_lat,
            n_lon,
            extra: Vec::new(),
        })
    }

    /// Append further zero-weight directions (test directions for specific
    /// diagnostics).
    pub fn with_extra_directions(mut self, dirs: &[Direction]) -> Self {
        self.extra.extend_from_slice(dirs);
        self
    }

    pub fn n_lat(&self) -> usize {
        self.n_lat
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    pub fn extra_directions(&self) -> &[Direction] {
        &self.extra
    }

    pub fn n_lattice_nodes(&self) -> usize {
        self.n_lat * self.n_lon
    }

    #[inline]
    fn colatitude(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * std::f64::consts::PI / self.n_lat as f64
    }

    /// Lattice node `(i, j)` as a direction.
    pub fn node(&self, i: usize, j: usize) -> Direction {
        let theta = self.colatitude(i);
        let phi = j as f64 * 2.0 * std::f64::consts::PI / self.n_lon as f64;
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        // Renormalize to absorb the last-bit error of sin/cos products.
        Direction::normalized(ct, st * cp, st * sp)
            .expect("polar node is never the zero vector")
    }

    /// Quadrature weight of every node in lattice row `i`.
    pub fn row_weight(&self, i: usize) -> f64 {
        self.colatitude(i).sin() * (std::f64::consts::PI / self.n_lat as f64)
            * (2.0 * std::f64::consts::PI / self.n_lon as f64)
    }

    /// Total quadrature weight over the lattice (extras carry weight zero).
    pub fn total_weight(&self) -> f64 {
        let rows: Vec<f64> = (0..self.n_lat)
            .map(|i| self.row_weight(i) * self.n_lon as f64)
            .collect();
        pairwise_sum(&rows)
    }
}

/// Samples of a function on a [`SphereGrid`]: one value per lattice node
/// (latitude-major) and one per extra direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereFunction {
    grid: SphereGrid,
    values: Vec<f64>,
    extra_values: Vec<f64>,
}

impl SphereFunction {
    pub fn zeros(grid: &SphereGrid) -> Self {
        Self {
            values: vec![0.0; grid.n_lattice_nodes()],
            extra_values: vec![0.0; grid.extra.len()],
            grid: grid.clone(),
        }
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_lon + j]
    }

    pub fn lattice_values(&self) -> &[f64] {
        &self.values
    }

    pub fn extra_values(&self) -> &[f64] {
        &self.extra_values
    }

    /// Nodewise sum, defined on identical grids.
    pub fn plus(&self, other: &SphereFunction) -> Result<SphereFunction> {
        check_same_grid(self, other)?;
        Ok(SphereFunction {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
            extra_values: self
                .extra_values
                .iter()
                .zip(&other.extra_values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Serialize as `n_lat,n_lon` header plus `n_lat` rows of `n_lon`
    /// 17-significant-digit values. Extra nodes are not part of the format.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}\n", self.grid.n_lat, self.grid.n_lon);
        for i in 0..self.grid.n_lat {
            let row: Vec<String> = (0..self.grid.n_lon)
                .map(|j| fmt_f64(self.value(i, j)))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parse the CSV format; the resulting grid is a bare lattice.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse {
                line: 1,
                msg: "empty sphere function file".into(),
            })?;
        let dims: Vec<&str> = header.trim().split(',').collect();
        if dims.len() != 2 {
            return Err(Error::Parse {
                line: 1,
                msg: "expected header n_lat,n_lon".into(),
            });
        }
        let parse_dim = |s: &str| -> Result<usize> {
            s.trim().parse::<usize>().map_err(|_| Error::Parse {
                line: 1,
                msg: format!("bad grid dimension {s:?}"),
            })
        };
        let n_lat = parse_dim(dims[0])?;
        let n_lon = parse_dim(dims[1])?;
        let grid = SphereGrid::lattice(n_lat, n_lon)?;
        let mut values = Vec::with_capacity(n_lat * n_lon);
        let mut rows = 0usize;
        for (idx, raw) in lines {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let row: Result<Vec<f64>> = line
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("bad value {s:?}"),
                    })
                })
                .collect();
            let row = row?;
            if row.len() != n_lon {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected {n_lon} values, got {}", row.len()),
                });
            }
            values.extend(row);
            rows += 1;
        }
        if rows != n_lat {
            return Err(Error::Parse {
                line: rows + 1,
                msg: format!("expected {n_lat} rows, got {rows}"),
            });
        }
        Ok(SphereFunction {
            grid,
            values,
            extra_values: Vec::new(),
        })
    }

    pub fn read_file(path: &std::path::Path) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_csv().as_bytes())
    }
}

fn check_same_grid(f: &SphereFunction, g: &SphereFunction) -> Result<()> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch(format!(
            "({}x{} + {} extras) vs ({}x{} + {} extras)",
            f.grid.n_lat,
            f.grid.n_lon,
            f.grid.extra.len(),
            g.grid.n_lat,
            g.grid.n_lon,
            g.grid.extra.len()
        )));
    }
    Ok(())
}

/// Sample the persistence sphere of `mu` on every node of `grid`.
/// Deterministic; per-node evaluations are independent.
pub fn sample(mu: &PersistenceMeasure, grid: &SphereGrid) -> SphereFunction {
    let mut values = Vec::with_capacity(grid.n_lattice_nodes());
    for i in 0..grid.n_lat {
        for j in 0..grid.n_lon {
            values.push(eval(mu, &grid.node(i, j)));
        }
    }
    let extra_values = grid.extra.iter().map(|v| eval(mu, v)).collect();
    SphereFunction {
        grid: grid.clone(),
        values,
        extra_values,
    }
}

/// Grid maximum of `|f - g|` over all nodes, extras included. A lower bound
/// of the true uniform distance.
pub fn sup_diff(f: &SphereFunction, g: &SphereFunction) -> Result<f64> {
    check_same_grid(f, g)?;
    let lattice = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let extras = f
        .extra_values
        .iter()
        .zip(&g.extra_values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    Ok(lattice.max(extras))
}

/// Quadrature L2 distance `sqrt(sum_ij w_ij (f - g)_ij^2)` over the lattice.
/// Extra nodes carry zero weight and do not contribute. Summation is
/// pairwise for determinism.
pub fn l2_diff(f: &SphereFunction, g: &SphereFunction) -> Result<f64> {
    check_same_grid(f, g)?;
    let grid = &f.grid;
    let mut terms = Vec::with_capacity(grid.n_lattice_nodes());
    for i in 0..grid.n_lat {
        let w = grid.row_weight(i);
        for j in 0..grid.n_lon {
            let d = f.value(i, j) - g.value(i, j);
            terms.push(w * d * d);
        }
    }
    Ok(pairwise_sum(&terms).sqrt())
}

/// Lower bound on the persistence mass of `mu` below threshold `delta`,
/// assembled from three hinge directions:
/// `sum_i w_i g_delta(pers(p_i))` with
/// `g_delta(r) = r - 2 (r - delta)_+ + (r - 2 delta)_+`.
pub fn low_pers_bound(mu: &PersistenceMeasure, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "low-persistence threshold must be positive, got {delta}"
        )));
    }
    let v0 = v_pers();
    let vd = v_delta(delta)?;
    let v2d = v_delta(2.0 * delta)?;
    Ok(std::f64::consts::FRAC_1_SQRT_2 * eval(mu, &v0)
        - 2.0 / hinge_scale(delta) * eval(mu, &vd)
        + 1.0 / hinge_scale(2.0 * delta) * eval(mu, &v2d))
}

/// Grid sup distance between the sphere of `mu` and the sphere of its
/// restriction to `region`, together with the analytic upper bound
/// `sqrt(2) * (persistence excluded by the region)`.
pub fn truncation_gap(
    mu: &PersistenceMeasure,
    region: &Region,
    grid: &SphereGrid,
) -> Result<(f64, f64)> {
    let (inside, outside) = mu.split(region);
    let gap = sup_diff(&sample(mu, grid), &sample(&inside, grid))?;
    let bound = std::f64::consts::SQRT_2 * outside.total_persistence();
    Ok((gap, bound))
}
