//! Seeded generators: the functional-data simulation scenarios and the four
//! planar point-process families, with their canonical parameterizations.
//!
//! Everything is a pure function of a configuration and an RNG state. The
//! named portable generator is ChaCha8; [`replicate_rng`] derives one
//! independent stream per replicate, so replicate generation is
//! embarrassingly parallel and bitwise reproducible.

use crate::error::{Error, Result};
use crate::homology::{PointCloud, SampledCurve};
use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

/// The portable RNG for one `(seed, stream)` pair.
pub fn replicate_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Natural cubic spline through strictly increasing knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Spline {
    ts: Vec<f64>,
    us: Vec<f64>,
    /// Second derivatives at the knots; zero at both ends.
    m2: Vec<f64>,
}

impl Spline {
    /// Fit a natural (zero second derivative at the ends) cubic interpolant.
    pub fn natural(ts: Vec<f64>, us: Vec<f64>) -> Result<Self> {
        let n = ts.len();
        if n != us.len() || n < 2 {
            return Err(Error::InvalidParameter(
                "spline needs matching knot and value lists of length >= 2".into(),
            ));
        }
        if ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "spline knots must be strictly increasing".into(),
            ));
        }
        let mut m2 = vec![0.0f64; n];
        if n > 2 {
            // Tridiagonal system for interior second derivatives.
            let k = n - 2;
            let mut sub = vec![0.0f64; k];
            let mut diag = vec![0.0f64; k];
            let mut sup = vec![0.0f64; k];
            let mut rhs = vec![0.0f64; k];
            for i in 0..k {
                let h0 = ts[i + 1] - ts[i];
                let h1 = ts[i + 2] - ts[i + 1];
                sub[i] = h0 / 6.0;
                diag[i] = (h0 + h1) / 3.0;
                sup[i] = h1 / 6.0;
                rhs[i] = (us[i + 2] - us[i + 1]) / h1 - (us[i + 1] - us[i]) / h0;
            }
            // Thomas algorithm.
            for i in 1..k {
                let w = sub[i] / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m2[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m2[i + 1] = (rhs[i] - sup[i] * m2[i + 2]) / diag[i];
            }
        }
        Ok(Self { ts, us, m2 })
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.ts, &self.us)
    }

    /// Evaluate the interpolant; clamped linear extension outside the knots.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.ts.len();
        let i = match self.ts.partition_point(|&x| x <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let h = t1 - t0;
        let a = (t1 - t) / h;
        let b = (t - t0) / h;
        a * self.us[i]
            + b * self.us[i + 1]
            + ((a * a * a - a) * self.m2[i] + (b * b * b - b) * self.m2[i + 1]) * h * h / 6.0
    }
}

/// Configuration of the functional-data generative model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdaConfig {
    /// Number of control points on the uniform grid over [0, 1].
    pub control_points: usize,
    /// Control values are uniform on `[-value_range, value_range]`.
    pub value_range: f64,
    /// Noise scale; observation noise is `N(0, (noise/3)^2)`.
    pub noise: f64,
    /// Inclusive range for the per-replicate sample count.
    pub n_range: (usize, usize),
    /// Optional fixed values for the first four control points.
    pub fixed_prefix: Option<[f64; 4]>,
    /// Replicates per class.
    pub replicates: usize,
}

impl Default for FdaConfig {
    fn default() -> Self {
        Self {
            control_points: 40,
            value_range: 50.0,
            noise: 10.0,
            n_range: (200, 800),
            fixed_prefix: None,
            replicates: 50,
        }
    }
}

impl FdaConfig {
    /// The counter-bias variant: shared large oscillations and a fixed
    /// sample size.
    pub fn counter_bias(self) -> Self {
        Self {
            fixed_prefix: Some([-100.0, 100.0, -100.0, 100.0]),
            n_range: (200, 200),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.control_points < 2 {
            return Err(Error::InvalidParameter(
                "need at least two control points".into(),
            ));
        }
        if !(self.value_range > 0.0) || !(self.noise >= 0.0) {
            return Err(Error::InvalidParameter(
                "value range must be positive and noise nonnegative".into(),
            ));
        }
        if self.n_range.0 < 2 || self.n_range.1 < self.n_range.0 {
            return Err(Error::InvalidParameter(format!(
                "bad sample count range {:?}",
                self.n_range
            )));
        }
        Ok(())
    }
}

/// Draw one smooth class function: the natural cubic spline through uniform
/// random control values on the regular grid, with the optional fixed prefix.
pub fn fda_smooth(cfg: &FdaConfig, rng: &mut ChaCha8Rng) -> Result<Spline> {
    cfg.validate()?;
    let m = cfg.control_points;
    let ts: Vec<f64> = (0..m).map(|j| j as f64 / (m - 1) as f64).collect();
    let mut us: Vec<f64> = (0..m)
        .map(|_| rng.gen_range(-cfg.value_range..cfg.value_range))
        .collect();
    if let Some(prefix) = cfg.fixed_prefix {
        for (slot, v) in us.iter_mut().zip(prefix) {
            *slot = v;
        }
    }
    Spline::natural(ts, us)
}

/// Observe a smooth function at `n` sorted uniform locations with Gaussian
/// noise of standard deviation `noise / 3`.
pub fn fda_sample(
    f: &Spline,
    n: usize,
    noise: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SampledCurve> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "need at least two observations".into(),
        ));
    }
    let mut xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    xs.sort_by(f64::total_cmp);
    // Uniform draws collide with negligible probability; nudge upward so the
    // abscissae stay strictly increasing.
    for i in 1..n {
        if xs[i] <= xs[i - 1] {
            xs[i] = xs[i - 1].next_up();
        }
    }
    let ys: Vec<f64> = if noise > 0.0 {
        let dist = Normal::new(0.0, noise / 3.0)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        xs.iter().map(|&x| f.eval(x) + dist.sample(rng)).collect()
    } else {
        xs.iter().map(|&x| f.eval(x)).collect()
    };
    SampledCurve::new(xs, ys)
}

/// Configuration of the point-process families on the window `[0, L]^2`.
/// All interaction scales are multiples of the typical spacing
/// `s = L / sqrt(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpConfig {
    /// Target cardinality of every sample.
    pub n: usize,
    /// Window side length.
    pub side: f64,
    /// Thomas offspring spread as a multiple of the spacing.
    pub cluster_spread: f64,
    /// Hard-core radius as a multiple of the spacing.
    pub hardcore: f64,
    /// Poisson candidate mean as a multiple of `n`.
    pub candidates: f64,
    /// Geometric growth factor for candidate resimulation.
    pub growth: f64,
    /// Lattice jitter amplitude as a portion of the cell.
    pub jitter: f64,
    /// Rips diameter cap as a multiple of the spacing.
    pub cap: f64,
}

impl Default for PpConfig {
    fn default() -> Self {
        Self {
            n: 200,
            side: 1000.0,
            cluster_spread: 0.9,
            hardcore: 0.5,
            candidates: 3.0,
            growth: 1.5,
            jitter: 0.75,
            cap: 7.0,
        }
    }
}

impl PpConfig {
    /// Typical spacing `s = L / sqrt(n)`.
    pub fn spacing(&self) -> f64 {
        self.side / (self.n as f64).sqrt()
    }

    /// Rips diameter cap in absolute units.
    pub fn rips_cap(&self) -> f64 {
        self.cap * self.spacing()
    }

    pub fn hardcore_radius(&self) -> f64 {
        self.hardcore * self.spacing()
    }

    fn lattice_cells(&self) -> usize {
        (self.n as f64).sqrt().ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || !(self.side > 0.0) {
            return Err(Error::InvalidParameter(
                "need a positive sample size and window".into(),
            ));
        }
        if !(self.growth > 1.0) {
            return Err(Error::InvalidParameter(
                "candidate growth factor must exceed 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.jitter) {
            return Err(Error::InvalidParameter(format!(
                "jitter must lie in [0, 1], got {}",
                self.jitter
            )));
        }
        let k = self.lattice_cells();
        if k * k < self.n {
            return Err(Error::InvalidParameter(format!(
                "lattice has {} cells for {} points",
                k * k,
                self.n
            )));
        }
        Ok(())
    }
}

/// Complete spatial randomness: `n` i.i.d. uniform points.
pub fn sample_csr(cfg: &PpConfig, rng: &mut ChaCha8Rng) -> Result<PointCloud> {
    cfg.validate()?;
    let l = cfg.side;
    PointCloud::new(
        (0..cfg.n)
            .map(|_| (rng.gen_range(0.0..l), rng.gen_range(0.0..l)))
            .collect(),
    )
}

/// Thomas cluster process: uniform parents, Poisson offspring batches with
/// isotropic Gaussian displacement, boundary rejection, and one final
/// uniform subsample down to exactly `n` points.
pub fn sample_thomas(cfg: &PpConfig, rng: &mut ChaCha8Rng) -> Result<PointCloud> {
    cfg.validate()?;
    let l = cfg.side;
    let n_par = (cfg.n as f64).sqrt().ceil() as usize;
    let lambda_off = cfg.n as f64 / n_par as f64;
    let spread = cfg.cluster_spread * cfg.spacing();
    let parents: Vec<(f64, f64)> = (0..n_par)
        .map(|_| (rng.gen_range(0.0..l), rng.gen_range(0.0..l)))
        .collect();
    let offspring_count =
        Poisson::new(lambda_off).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let displacement =
        Normal::new(0.0, spread).map_err(|e| Error::InvalidParameter(e.to_string()))?;

    let mut points: Vec<(f64, f64)> = Vec::with_capacity(2 * cfg.n);
    while points.len() < cfg.n {
        let parent = parents[rng.gen_range(0..n_par)];
        let k = offspring_count.sample(rng) as usize;
        for _ in 0..k {
            let x = parent.0 + displacement.sample(rng);
            let y = parent.1 + displacement.sample(rng);
            if (0.0..=l).contains(&x) && (0.0..=l).contains(&y) {
                points.push((x, y));
            }
        }
    }
    PointCloud::new(subsample(points, cfg.n, rng))
}

/// Matern type-II hard-core process: Poisson candidates with uniform marks,
/// mark-minimal thinning within the hard-core radius, geometric candidate
/// growth until at least `n` survive, then a uniform subsample.
pub fn sample_matern2(cfg: &PpConfig, rng: &mut ChaCha8Rng) -> Result<PointCloud> {
    cfg.validate()?;
    let l = cfg.side;
    let r = cfg.hardcore_radius();
    let r2 = r * r;
    let mut mean = cfg.candidates * cfg.n as f64;
    loop {
        let m = Poisson::new(mean)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .sample(rng) as usize;
        let pts: Vec<(f64, f64)> = (0..m)
            .map(|_| (rng.gen_range(0.0..l), rng.gen_range(0.0..l)))
            .collect();
        let marks: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
        let mut retained: Vec<(f64, f64)> = Vec::new();
        'cand: for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let dx = pts[i].0 - pts[j].0;
                let dy = pts[i].1 - pts[j].1;
                if dx * dx + dy * dy <= r2 && marks[j] < marks[i] {
                    continue 'cand;
                }
            }
            retained.push(pts[i]);
        }
        if retained.len() >= cfg.n {
            return PointCloud::new(subsample(retained, cfg.n, rng));
        }
        mean *= cfg.growth;
    }
}

/// Jittered lattice: `n` distinct cells of the `k x k` grid chosen without
/// replacement, one point per cell at the center plus a bounded uniform
/// displacement.
pub fn sample_lattice(cfg: &PpConfig, rng: &mut ChaCha8Rng) -> Result<PointCloud> {
    cfg.validate()?;
    let k = cfg.lattice_cells();
    let cell = cfg.side / k as f64;
    let half = 0.5 * cfg.jitter * cell;
    let chosen = sample_indices(rng, k * k, cfg.n);
    let mut points = Vec::with_capacity(cfg.n);
    for idx in chosen.iter() {
        let (row, col) = (idx / k, idx % k);
        let cx = (col as f64 + 0.5) * cell;
        let cy = (row as f64 + 0.5) * cell;
        let (dx, dy) = if half > 0.0 {
            (rng.gen_range(-half..half), rng.gen_range(-half..half))
        } else {
            (0.0, 0.0)
        };
        points.push((cx + dx, cy + dy));
    }
    PointCloud::new(points)
}

fn subsample(points: Vec<(f64, f64)>, n: usize, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    if points.len() == n {
        return points;
    }
    sample_indices(rng, points.len(), n)
        .iter()
        .map(|i| points[i])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_of_constants_is_constant() {
        let ts: Vec<f64> = (0..10).map(|i| i as f64 / 9.0).collect();
        let us = vec![3.5; 10];
        let f = Spline::natural(ts, us).unwrap();
        for i in 0..100 {
            let t = i as f64 / 99.0;
            assert!((f.eval(t) - 3.5).abs() < 1e-12);
        }
    }

    #[test]
    fn spline_interpolates_knots() {
        let mut rng = replicate_rng(11, 0);
        let cfg = FdaConfig::default();
        let f = fda_smooth(&cfg, &mut rng).unwrap();
        let (ts, us) = f.knots();
        for (t, u) in ts.iter().zip(us) {
            assert!((f.eval(*t) - u).abs() < 1e-9);
        }
    }

    #[test]
    fn fixed_prefix_is_honored() {
        let mut rng = replicate_rng(5, 3);
        let cfg = FdaConfig::default().counter_bias();
        let f = fda_smooth(&cfg, &mut rng).unwrap();
        let (ts, _) = f.knots();
        let expect = [-100.0, 100.0, -100.0, 100.0];
        for (t, e) in ts.iter().take(4).zip(expect) {
            assert!((f.eval(*t) - e).abs() < 1e-9);
        }
    }

    #[test]
    fn noiseless_samples_lie_on_the_curve() {
        let mut rng = replicate_rng(2, 0);
        let cfg = FdaConfig::default();
        let f = fda_smooth(&cfg, &mut rng).unwrap();
        let c = fda_sample(&f, 50, 0.0, &mut rng).unwrap();
        assert_eq!(c.len(), 50);
        for (t, y) in c.ts().iter().zip(c.values()) {
            assert_eq!(f.eval(*t), *y);
        }
    }

    #[test]
    fn noise_scale_is_one_third_of_sigma() {
        let mut rng = replicate_rng(3, 1);
        let ts = vec![0.0, 1.0];
        let f = Spline::natural(ts, vec![0.0, 0.0]).unwrap();
        let sigma = 12.0;
        let mut acc = 0.0;
        let mut count = 0usize;
        for _ in 0..20 {
            let c = fda_sample(&f, 5000, sigma, &mut rng).unwrap();
            for y in c.values() {
                acc += y * y;
                count += 1;
            }
        }
        let std = (acc / count as f64).sqrt();
        assert!(
            (std - sigma / 3.0).abs() < 0.02 * (sigma / 3.0),
            "measured {std}"
        );
    }

    #[test]
    fn all_samplers_emit_exactly_n_points_inside_the_window() {
        let cfg = PpConfig::default();
        for stream in 0..3u64 {
            for (name, sampler) in [
                ("csr", sample_csr as fn(&PpConfig, &mut ChaCha8Rng) -> Result<PointCloud>),
                ("thomas", sample_thomas),
                ("matern2", sample_matern2),
                ("lattice", sample_lattice),
            ] {
                let mut rng = replicate_rng(17, stream);
                let cloud = sampler(&cfg, &mut rng).unwrap();
                assert_eq!(cloud.len(), cfg.n, "{name}");
                for &(x, y) in cloud.points() {
                    assert!((0.0..=cfg.side).contains(&x) && (0.0..=cfg.side).contains(&y));
                }
            }
        }
    }

    #[test]
    fn matern_respects_the_hardcore_distance() {
        let cfg = PpConfig::default();
        let r2 = cfg.hardcore_radius() * cfg.hardcore_radius();
        for stream in 0..5u64 {
            let mut rng = replicate_rng(23, stream);
            let cloud = sample_matern2(&cfg, &mut rng).unwrap();
            let pts = cloud.points();
            for i in 0..pts.len() {
                for j in (i + 1)..pts.len() {
                    let dx = pts[i].0 - pts[j].0;
                    let dy = pts[i].1 - pts[j].1;
                    assert!(dx * dx + dy * dy > r2);
                }
            }
        }
    }

    #[test]
    fn lattice_without_jitter_hits_cell_centers() {
        let cfg = PpConfig {
            jitter: 0.0,
            n: 25,
            side: 50.0,
            ..PpConfig::default()
        };
        let mut rng = replicate_rng(7, 0);
        let cloud = sample_lattice(&cfg, &mut rng).unwrap();
        let cell = cfg.side / cfg.lattice_cells() as f64;
        for &(x, y) in cloud.points() {
            let fx = (x / cell - 0.5).fract().abs();
            let fy = (y / cell - 0.5).fract().abs();
            assert!(fx < 1e-9 && fy < 1e-9);
        }
    }

    #[test]
    fn lattice_points_stay_in_their_cells() {
        let cfg = PpConfig::default();
        let mut rng = replicate_rng(31, 2);
        let cloud = sample_lattice(&cfg, &mut rng).unwrap();
        let k = cfg.lattice_cells();
        let cell = cfg.side / k as f64;
        let mut seen = std::collections::HashSet::new();
        for &(x, y) in cloud.points() {
            let col = ((x / cell).floor() as usize).min(k - 1);
            let row = ((y / cell).floor() as usize).min(k - 1);
            assert!(seen.insert((row, col)), "two points in one cell");
        }
    }

    #[test]
    fn identical_seeds_are_bitwise_identical() {
        let cfg = PpConfig::default();
        for sampler in [sample_csr, sample_thomas, sample_matern2, sample_lattice] {
            let a = sampler(&cfg, &mut replicate_rng(99, 4)).unwrap();
            let b = sampler(&cfg, &mut replicate_rng(99, 4)).unwrap();
            for (p, q) in a.points().iter().zip(b.points()) {
                assert_eq!(p.0.to_bits(), q.0.to_bits());
                assert_eq!(p.1.to_bits(), q.1.to_bits());
            }
        }
    }

    #[test]
    fn thomas_clusters_more_than_csr() {
        // Directional diagnostic: mean nearest-neighbor distance under the
        // cluster model is smaller than under CSR, averaged over seeds.
        let cfg = PpConfig::default();
        let mean_nn = |cloud: &PointCloud| -> f64 {
            let pts = cloud.points();
            let mut acc = 0.0;
            for (i, p) in pts.iter().enumerate() {
                let mut best = f64::INFINITY;
                for (j, q) in pts.iter().enumerate() {
                    if i != j {
                        let d = (p.0 - q.0).hypot(p.1 - q.1);
                        best = best.min(d);
                    }
                }
                acc += best;
            }
            acc / pts.len() as f64
        };
        let mut csr_total = 0.0;
        let mut thomas_total = 0.0;
        for stream in 0..100u64 {
            csr_total += mean_nn(&sample_csr(&cfg, &mut replicate_rng(41, stream)).unwrap());
            thomas_total +=
                mean_nn(&sample_thomas(&cfg, &mut replicate_rng(41, stream)).unwrap());
        }
        assert!(thomas_total < csr_total);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let cfg = PpConfig {
            jitter: 1.5,
            ..PpConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = FdaConfig {
            n_range: (10, 5),
            ..FdaConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
