//! The built-in invariant suite: one named pass/fail line per check,
//! nonzero exit on any failure. Mutation mode corrupts the transport cost
//! inside the harness by one percent, demonstrating that the checks detect
//! a miscalibrated constant.

use persphere::corpus::{random_measure, random_pairs, CorpusSpec};
use persphere::generators::{replicate_rng, sample_matern2, PpConfig};
use persphere::homology::{rips_pd, PointCloud};
use persphere::image::{gaussian_l2_closed_form, image_l2, persistence_image, ImageParams, WeightScheme};
use persphere::landscape::{landscape, level_area, TimeGrid};
use persphere::measure::{PersistenceMeasure, PlanePoint, Region};
use persphere::sphere::{
    eval, hinge_scale, l2_diff, low_pers_bound, sample, sup_diff, v_delta, v_pers, SphereFunction,
    SphereGrid,
};
use persphere::transport::{ot1_cross_augmented, pot1, pot1_bruteforce};
use rand::Rng;
use std::f64::consts::{PI, SQRT_2};

pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

struct Harness {
    reports: Vec<CheckReport>,
    /// Multiplies every transport cost seen by the checks; 1.0 normally.
    cost_corruption: f64,
}

impl Harness {
    fn pot_cost(&self, mu: &PersistenceMeasure, nu: &PersistenceMeasure) -> f64 {
        self.cost_corruption * pot1(mu, nu).map(|r| r.cost).unwrap_or(f64::NAN)
    }

    fn check(&mut self, name: &'static str, passed: bool, detail: String) {
        self.reports.push(CheckReport {
            name,
            passed,
            detail,
        });
    }
}

pub fn run(mutate: bool) -> Vec<CheckReport> {
    let mut h = Harness {
        reports: Vec::new(),
        cost_corruption: if mutate { 1.01 } else { 1.0 },
    };
    let grid = SphereGrid::new(50, 100).expect("static grid dims");
    let spec = CorpusSpec {
        counting: false,
        ..CorpusSpec::default()
    };

    // 1. Quadrature weight approaches the sphere area.
    let big = SphereGrid::new(100, 200).expect("static grid dims");
    let total = big.total_weight();
    h.check(
        "quadrature-total",
        (total - 4.0 * PI).abs() < 1e-3,
        format!("|total - 4pi| = {:.2e}", (total - 4.0 * PI).abs()),
    );

    // 2. Total persistence read-off at the dedicated direction.
    let mut rng = replicate_rng(501, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mu = random_measure(&spec, &mut rng);
        let expected = SQRT_2 * mu.total_persistence();
        worst = worst.max((eval(&mu, &v_pers()) - expected).abs() / expected.max(1.0));
    }
    h.check(
        "persistence-readoff",
        worst < 1e-12,
        format!("worst relative error {worst:.2e}"),
    );

    // 3. Distance to the null sphere equals sqrt(2) * persistence.
    let mut rng = replicate_rng(502, 0);
    let zero = SphereFunction::zeros(&grid);
    let mut ok = true;
    for _ in 0..20 {
        let mu = random_measure(&spec, &mut rng);
        let d = sup_diff(&sample(&mu, &grid), &zero).unwrap_or(f64::NAN);
        let expected = SQRT_2 * mu.total_persistence();
        ok &= (d - expected).abs() <= 1e-12 * expected.max(1.0);
    }
    h.check("null-distance", ok, String::new());

    // 4. Sign constraint where the persistence coefficient is nonpositive.
    let mut rng = replicate_rng(503, 0);
    let mut ok = true;
    for _ in 0..30 {
        let mu = random_measure(&spec, &mut rng);
        for i in 0..grid.n_lat() {
            for j in 0..grid.n_lon() {
                let v = grid.node(i, j);
                if v.pers_coeff() <= 0.0 && eval(&mu, &v) > 1e-12 {
                    ok = false;
                }
            }
        }
    }
    h.check("sign-constraint", ok, String::new());

    // 5. Hinge identity at random thresholds.
    let mut rng = replicate_rng(504, 0);
    let mut ok = true;
    for _ in 0..100 {
        let mu = random_measure(&spec, &mut rng);
        let delta = rng.gen_range(0.0..12.0);
        let expected: f64 = hinge_scale(delta)
            * mu.atoms()
                .iter()
                .map(|a| a.weight * (a.point.persistence() - delta).max(0.0))
                .sum::<f64>();
        let got = eval(&mu, &v_delta(delta).expect("nonnegative threshold"));
        ok &= (got - expected).abs() <= 1e-10 * expected.abs().max(1.0);
    }
    h.check("hinge-identity", ok, String::new());

    // 6. Three-direction combination equals the low-persistence functional.
    let mut rng = replicate_rng(505, 0);
    let mut ok = true;
    for _ in 0..50 {
        let mu = random_measure(&spec, &mut rng);
        let delta = rng.gen_range(0.1..8.0);
        let expected: f64 = mu
            .atoms()
            .iter()
            .map(|a| {
                let r = a.point.persistence();
                a.weight * (r - 2.0 * (r - delta).max(0.0) + (r - 2.0 * delta).max(0.0))
            })
            .sum();
        let got = low_pers_bound(&mu, delta).unwrap_or(f64::NAN);
        ok &= (got - expected).abs() <= 1e-9 * expected.abs().max(1.0);
    }
    h.check("low-pers-combination", ok, String::new());

    // 7. Truncation gap against its analytic bound.
    let mut rng = replicate_rng(506, 0);
    let mut ok = true;
    for _ in 0..50 {
        let mu = random_measure(&spec, &mut rng);
        let r = rng.gen_range(0.5..12.0);
        let (gap, bound) =
            persphere::sphere::truncation_gap(&mu, &Region::diag_abs_max(r), &grid)
                .unwrap_or((f64::NAN, 0.0));
        ok &= gap <= bound + 1e-9;
    }
    h.check("truncation-bound", ok, String::new());

    // 8. Stability of spheres under partial transport.
    let mut rng = replicate_rng(507, 0);
    let mut ok = true;
    for (mu, nu) in random_pairs(100, &spec, &mut rng) {
        let sup = sup_diff(&sample(&mu, &grid), &sample(&nu, &grid)).unwrap_or(f64::NAN);
        ok &= sup <= 2.0 * SQRT_2 * h.pot_cost(&mu, &nu) + 1e-7;
    }
    h.check("stability", ok, String::new());

    // 9. Sandwich between partial and cross-augmented transport.
    let mut rng = replicate_rng(508, 0);
    let mut ok = true;
    for (mu, nu) in random_pairs(100, &spec, &mut rng) {
        let pot = h.pot_cost(&mu, &nu);
        let ot = ot1_cross_augmented(&mu, &nu).map(|r| r.cost).unwrap_or(f64::NAN);
        ok &= pot <= ot + 1e-7 && ot <= 2.0 * pot + 1e-7;
    }
    h.check("sandwich", ok, String::new());

    // 10. Flow solver against the exhaustive oracle.
    let mut rng = replicate_rng(509, 0);
    let small = CorpusSpec {
        max_atoms: 4,
        min_atoms: 0,
        ..CorpusSpec::default()
    };
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mu = random_measure(&small, &mut rng);
        let nu = random_measure(&small, &mut rng);
        let fast = h.pot_cost(&mu, &nu);
        let slow = pot1_bruteforce(&mu, &nu).unwrap_or(f64::NAN);
        worst = worst.max((fast - slow).abs());
    }
    h.check(
        "pot1-oracle",
        worst <= 1e-9,
        format!("worst gap {worst:.2e}"),
    );

    // 11. Metric sanity: symmetry and the triangle inequality.
    let mut rng = replicate_rng(510, 0);
    let mut ok = true;
    for _ in 0..30 {
        let a = random_measure(&small, &mut rng);
        let b = random_measure(&small, &mut rng);
        let c = random_measure(&small, &mut rng);
        let ab = h.pot_cost(&a, &b);
        ok &= (ab - h.pot_cost(&b, &a)).abs() <= 1e-7 * (1.0 + ab);
        ok &= ab <= h.pot_cost(&a, &c) + h.pot_cost(&c, &b) + 1e-7;
    }
    h.check("pot1-metric", ok, String::new());

    // 12. Deleting to the null measure costs exactly the total persistence.
    let mut rng = replicate_rng(511, 0);
    let empty = PersistenceMeasure::empty();
    let mut ok = true;
    for _ in 0..30 {
        let mu = random_measure(&spec, &mut rng);
        ok &= h.pot_cost(&mu, &empty) == mu.total_persistence();
    }
    h.check("deletion-exactness", ok, String::new());

    // 13. Uniform decay bound along the diagonal drift.
    let ks: Vec<usize> = (2..=50).collect();
    let rows = persphere::figures::decay_rows(&ks, &grid);
    let ok = rows
        .map(|rows| rows.iter().all(|r| r.sup <= r.bound + 1e-12))
        .unwrap_or(false);
    h.check("decay-bound", ok, String::new());

    // 14. L2 never exceeds the area-scaled uniform norm.
    let mut rng = replicate_rng(512, 0);
    let mut ok = true;
    for _ in 0..20 {
        let mu = random_measure(&spec, &mut rng);
        let nu = random_measure(&spec, &mut rng);
        let f = sample(&mu, &grid);
        let g = sample(&nu, &grid);
        let sup = sup_diff(&f, &g).unwrap_or(f64::NAN);
        let l2 = l2_diff(&f, &g).unwrap_or(f64::NAN);
        ok &= l2 <= ((4.0 * PI).sqrt() + 1e-2) * sup + 1e-12;
    }
    h.check("l2-sup-bridge", ok, String::new());

    // 15. Rips H0 equals the minimum spanning tree.
    let mut rng = replicate_rng(513, 0);
    let mut ok = true;
    for _ in 0..20 {
        let pts: Vec<(f64, f64)> = (0..30)
            .map(|_| (rng.gen_range(0.0..50.0), rng.gen_range(0.0..50.0)))
            .collect();
        let cloud = PointCloud::new(pts.clone()).expect("finite points");
        let (h0, _) = rips_pd(&cloud, 1.0).expect("within size limit");
        let mut bars: Vec<f64> = h0.atoms().iter().map(|a| a.point.y).collect();
        bars.sort_by(f64::total_cmp);
        let mut mst = prim_lengths(&pts);
        mst.sort_by(f64::total_cmp);
        ok &= bars.len() == mst.len()
            && bars.iter().zip(&mst).all(|(a, b)| (a - b).abs() < 1e-12);
    }
    h.check("mst-oracle", ok, String::new());

    // 16. Hard-core exclusion of the Matern sampler.
    let cfg = PpConfig {
        n: 100,
        ..PpConfig::default()
    };
    let r2 = cfg.hardcore_radius() * cfg.hardcore_radius();
    let mut ok = true;
    for stream in 0..10u64 {
        let cloud = sample_matern2(&cfg, &mut replicate_rng(514, stream)).expect("valid config");
        let pts = cloud.points();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let dx = pts[i].0 - pts[j].0;
                let dy = pts[i].1 - pts[j].1;
                ok &= dx * dx + dy * dy > r2;
            }
        }
    }
    h.check("matern-hardcore", ok, String::new());

    // 17. Single-tent landscape area law.
    let mu = PersistenceMeasure::from_points(&[(1.0, 4.0)]).expect("valid atom");
    let tg = TimeGrid::new(0.0, 5.0, 10_001).expect("valid grid");
    let ls = landscape(&mu, 1, &tg).expect("counting measure");
    let area = level_area(&ls, 0);
    let ok = (area - 2.25).abs() < 1e-3 * 2.25;
    h.check("landscape-area", ok, format!("area {area:.6}"));

    // 18. Persistence-image distance against the closed form.
    let sigma = 1.0;
    let params = ImageParams::new((0.0, 30.0), (0.0, 30.0), sigma / 10.0, sigma, WeightScheme::Flat)
        .expect("valid params");
    let a = PersistenceMeasure::from_points(&[(10.0, 20.0)]).expect("valid atom");
    let b = PersistenceMeasure::from_points(&[(14.0, 27.0)]).expect("valid atom");
    let da = persistence_image(&a, &params).expect("render");
    let db = persistence_image(&b, &params).expect("render");
    let got = image_l2(&da, &db).unwrap_or(f64::NAN);
    let expected =
        gaussian_l2_closed_form(PlanePoint::new(10.0, 10.0), PlanePoint::new(14.0, 13.0), sigma);
    h.check(
        "image-closed-form",
        (got - expected).abs() < 0.02 * expected,
        format!("{got:.6} vs {expected:.6}"),
    );

    h.reports
}

fn prim_lengths(points: &[(f64, f64)]) -> Vec<f64> {
    let n = points.len();
    let dist = |a: usize, b: usize| -> f64 {
        (points[a].0 - points[b].0).hypot(points[a].1 - points[b].1)
    };
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    in_tree[0] = true;
    for (j, slot) in best.iter_mut().enumerate().skip(1) {
        *slot = dist(0, j);
    }
    let mut lengths = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let (mut pick, mut pick_d) = (usize::MAX, f64::INFINITY);
        for (j, (&b, &t)) in best.iter().zip(&in_tree).enumerate() {
            if !t && b < pick_d {
                pick_d = b;
                pick = j;
            }
        }
        in_tree[pick] = true;
        lengths.push(pick_d);
        for (j, slot) in best.iter_mut().enumerate() {
            if !in_tree[j] {
                *slot = slot.min(dist(pick, j));
            }
        }
    }
    lengths
}
