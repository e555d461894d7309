//! Property tests for the geometric invariants of measures, spheres, and
//! transport.

use persphere::corpus::{random_measure, random_pairs, CorpusSpec};
use persphere::generators::replicate_rng;
use persphere::measure::{PersistenceMeasure, PlanePoint, Region};
use persphere::sphere::{
    self, eval, hinge_scale, l2_diff, sample, sup_diff, v_delta, v_pers, SphereGrid,
};
use persphere::transport::{ot1_cross_augmented, pot1};
use proptest::prelude::*;

fn plane_point() -> impl Strategy<Value = PlanePoint> {
    (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(x, y)| PlanePoint::new(x, y))
}

fn upper_point() -> impl Strategy<Value = PlanePoint> {
    (-50.0..50.0f64, 1e-6..40.0f64).prop_map(|(x, life)| PlanePoint::new(x, x + life))
}

fn measure(max_atoms: usize) -> impl Strategy<Value = PersistenceMeasure> {
    proptest::collection::vec((upper_point(), 0.01..2.0f64), 0..=max_atoms).prop_map(|atoms| {
        PersistenceMeasure::new(
            atoms
                .into_iter()
                .map(|(point, weight)| persphere::Atom { point, weight })
                .collect(),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn projection_is_idempotent_and_kills_persistence(p in plane_point()) {
        let q = p.diag_project();
        prop_assert_eq!(q.diag_project(), q);
        prop_assert_eq!(q.persistence(), 0.0);
    }

    #[test]
    fn projection_is_one_lipschitz_in_sup_norm(p in plane_point(), q in plane_point()) {
        let lhs = p.diag_project().linf_dist(&q.diag_project());
        prop_assert!(lhs <= p.linf_dist(&q) + 1e-12);
    }

    #[test]
    fn persistence_is_dominated_by_the_euclidean_norm(p in upper_point()) {
        prop_assert!(p.persistence() <= std::f64::consts::FRAC_1_SQRT_2 * p.norm2() + 1e-12);
    }

    #[test]
    fn augmentation_has_zero_signed_mass(mu in measure(8)) {
        prop_assert!(mu.augment().signed_mass().abs() < 1e-12);
    }

    #[test]
    fn cross_augmentations_have_equal_mass(mu in measure(6), nu in measure(6)) {
        let a = mu.cross_augment(&nu).signed_mass();
        let b = nu.cross_augment(&mu).signed_mass();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn restriction_partitions_the_atom_multiset(
        mu in measure(10),
        r in 0.5..20.0f64,
        plo in 0.0..5.0f64,
    ) {
        let region = Region::band(r, plo, plo + 5.0);
        let (inside, outside) = mu.split(&region);
        prop_assert_eq!(inside.len() + outside.len(), mu.len());
        let recombined = inside.plus(&outside).mass();
        prop_assert!((recombined - mu.mass()).abs() <= 1e-12 * (1.0 + mu.mass()));
        prop_assert_eq!(mu.restrict(&region), inside);
    }

    #[test]
    fn diagram_csv_round_trips(mu in measure(10)) {
        let back = PersistenceMeasure::parse_csv(&mu.to_csv()).unwrap();
        prop_assert_eq!(mu, back);
    }

    #[test]
    fn hinge_identity_holds(mu in measure(8), delta in 0.0..30.0f64) {
        let v = v_delta(delta).unwrap();
        let got = eval(&mu, &v);
        let expected: f64 = hinge_scale(delta)
            * mu.atoms()
                .iter()
                .map(|a| a.weight * (a.point.persistence() - delta).max(0.0))
                .sum::<f64>();
        prop_assert!((got - expected).abs() <= 1e-10 * expected.abs().max(1.0));
    }

    #[test]
    fn low_pers_bound_dominates_low_persistence_mass(mu in measure(8), delta in 0.01..20.0f64) {
        let low_mass: f64 = mu
            .atoms()
            .iter()
            .filter(|a| a.point.persistence() < delta)
            .map(|a| a.weight * a.point.persistence())
            .sum();
        let bound = sphere::low_pers_bound(&mu, delta).unwrap();
        prop_assert!(low_mass <= bound + 1e-9 * (1.0 + bound.abs()));
    }

    #[test]
    fn far_direction_vanishes_on_its_band(
        r0 in 0.5..20.0f64,
        m0 in 0.5..20.0f64,
        d_frac in -1.0..1.0f64,
        p_frac in 0.01..1.0f64,
    ) {
        let v = sphere::far_direction(r0, m0).unwrap();
        let d = d_frac * r0;
        let pers = p_frac * m0;
        let p = PlanePoint::new(d - pers, d + pers);
        prop_assert_eq!(sphere::integrand(&v, &p), 0.0);
    }

    #[test]
    fn high_persistence_tail_is_hinge_bounded(mu in measure(8), delta in 0.01..20.0f64) {
        let tail: f64 = mu
            .atoms()
            .iter()
            .filter(|a| a.point.persistence() >= 2.0 * delta)
            .map(|a| a.weight * a.point.persistence())
            .sum();
        let hinge = eval(&mu, &v_delta(delta).unwrap());
        prop_assert!(tail <= 2.0 / hinge_scale(delta) * hinge + 1e-9);
    }

    #[test]
    fn sphere_values_are_linear_in_the_measure(mu in measure(5), nu in measure(5)) {
        let grid = SphereGrid::new(4, 7).unwrap();
        let both = sample(&mu.plus(&nu), &grid);
        let sum = sample(&mu, &grid).plus(&sample(&nu, &grid)).unwrap();
        for (a, b) in both.lattice_values().iter().zip(sum.lattice_values()) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn truncation_gap_obeys_its_bound(mu in measure(10), r in 0.1..15.0f64) {
        let grid = SphereGrid::new(12, 24).unwrap();
        let (gap, bound) = sphere::truncation_gap(&mu, &Region::diag_abs_max(r), &grid).unwrap();
        prop_assert!(gap <= bound + 1e-9);
    }
}

#[test]
fn sign_constraint_on_nonpositive_pers_coefficient() {
    let mut rng = replicate_rng(301, 0);
    let spec = CorpusSpec {
        counting: false,
        ..CorpusSpec::default()
    };
    let grid = SphereGrid::new(30, 60).unwrap();
    for _ in 0..100 {
        let mu = random_measure(&spec, &mut rng);
        for i in 0..grid.n_lat() {
            for j in 0..grid.n_lon() {
                let v = grid.node(i, j);
                if v.pers_coeff() <= 0.0 {
                    assert!(eval(&mu, &v) <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn persistence_readoff_and_null_distance() {
    let mut rng = replicate_rng(302, 0);
    let grid = SphereGrid::new(20, 40).unwrap();
    for _ in 0..50 {
        let mu = random_measure(&CorpusSpec::default(), &mut rng);
        let expected = std::f64::consts::SQRT_2 * mu.total_persistence();
        let got = eval(&mu, &v_pers());
        assert!((got - expected).abs() <= 1e-12 * expected.max(1.0));
        let f = sample(&mu, &grid);
        let z = persphere::sphere::SphereFunction::zeros(&grid);
        let null_dist = sup_diff(&f, &z).unwrap();
        assert!((null_dist - expected).abs() <= 1e-12 * expected.max(1.0));
    }
}

#[test]
fn stability_and_sandwich_on_a_seeded_corpus() {
    let mut rng = replicate_rng(303, 0);
    let spec = CorpusSpec {
        counting: false,
        ..CorpusSpec::default()
    };
    let grid = SphereGrid::new(40, 80).unwrap();
    let two_sqrt2 = 2.0 * std::f64::consts::SQRT_2;
    for (mu, nu) in random_pairs(60, &spec, &mut rng) {
        let pot = pot1(&mu, &nu).unwrap().cost;
        let ot = ot1_cross_augmented(&mu, &nu).unwrap().cost;
        let sup = sup_diff(&sample(&mu, &grid), &sample(&nu, &grid)).unwrap();
        assert!(sup <= two_sqrt2 * pot + 1e-7);
        assert!(pot <= ot + 1e-7);
        assert!(ot <= 2.0 * pot + 1e-7);
    }
}

#[test]
fn pot1_is_a_metric_on_samples() {
    let mut rng = replicate_rng(304, 0);
    let spec = CorpusSpec {
        max_atoms: 5,
        counting: false,
        ..CorpusSpec::default()
    };
    for _ in 0..40 {
        let a = random_measure(&spec, &mut rng);
        let b = random_measure(&spec, &mut rng);
        let c = random_measure(&spec, &mut rng);
        let dab = pot1(&a, &b).unwrap().cost;
        let dba = pot1(&b, &a).unwrap().cost;
        let dac = pot1(&a, &c).unwrap().cost;
        let dcb = pot1(&c, &b).unwrap().cost;
        assert!((dab - dba).abs() <= 1e-7 * (1.0 + dab));
        assert!(dab <= dac + dcb + 1e-7);
        assert!(pot1(&a, &a).unwrap().cost.abs() <= 1e-9);
    }
}

#[test]
fn diagonal_drift_flattens_fixed_directions() {
    let mu = PersistenceMeasure::from_points(&[(0.0, 2.0), (1.0, 4.0)]).unwrap();
    let pers = mu.total_persistence();
    let dirs = [
        sphere::Direction::normalized(-1.0, 0.5, 0.7).unwrap(),
        sphere::Direction::normalized(0.3, -0.8, 0.1).unwrap(),
        sphere::Direction::normalized(0.2, 0.4, -0.9).unwrap(),
        sphere::Direction::normalized(-0.4, -0.3, -0.6).unwrap(),
    ];
    for v in dirs {
        let (s, t) = v.st_coords();
        assert!(s.abs() > 0.05, "test directions must stay off s = 0");
        let limit = if s > 0.0 { t * pers } else { 0.0 };
        let mut last = f64::INFINITY;
        for k in [10.0, 100.0, 1000.0] {
            let shifted = mu.translate(k, k);
            let err = (eval(&shifted, &v) - limit).abs();
            assert!(err <= last + 1e-12, "drift error must not grow");
            last = err;
        }
        assert!(last < 1e-6);
    }
}

#[test]
fn uniform_decay_bound_for_shifted_singletons() {
    let grid = SphereGrid::new(50, 100).unwrap();
    for (p, h) in [
        (PlanePoint::new(0.0, 1.0), 0.5),
        (PlanePoint::new(-2.0, 3.0), 1.0),
        (PlanePoint::new(1.0, 1.5), 0.25),
    ] {
        let pers = p.persistence();
        let d = p.diag_coord();
        let k_min = (d.abs() + 2.0 * h).ceil() as usize;
        for k in [k_min + 1, 4 * (k_min + 1), 20 * (k_min + 1)] {
            let kk = k as f64;
            let mu = PersistenceMeasure::from_points(&[(p.x + kk, p.y + kk)]).unwrap();
            let nu = PersistenceMeasure::from_points(&[(p.x + kk + h, p.y + kk + h)]).unwrap();
            let sup = sup_diff(&sample(&mu, &grid), &sample(&nu, &grid)).unwrap();
            let bound = 2.0 * h * (1.0 + std::f64::consts::SQRT_2 * pers) / kk;
            assert!(sup <= bound + 1e-12, "k = {k}: {sup} > {bound}");
        }
    }
}

#[test]
fn spheres_separate_distinct_small_diagrams() {
    let mut rng = replicate_rng(305, 0);
    let spec = CorpusSpec {
        max_atoms: 3,
        ..CorpusSpec::default()
    };
    let grid = SphereGrid::new(100, 200).unwrap();
    let mut checked = 0;
    while checked < 100 {
        let mu = random_measure(&spec, &mut rng);
        let nu = random_measure(&spec, &mut rng);
        if mu == nu {
            continue;
        }
        let sup = sup_diff(&sample(&mu, &grid), &sample(&nu, &grid)).unwrap();
        assert!(sup > 0.0, "distinct diagrams produced identical samples");
        checked += 1;
    }
}

#[test]
fn holder_diagnostic_tabulates_finite_rows() {
    let mut rng = replicate_rng(307, 0);
    let band = Region::band(15.0, 0.0, 15.0);
    let spec = CorpusSpec {
        coord_range: 8.0,
        ..CorpusSpec::default()
    };
    let grid = SphereGrid::new(20, 40).unwrap();
    let pairs: Vec<_> = (0..100)
        .map(|_| {
            (
                random_measure(&spec, &mut rng),
                random_measure(&spec, &mut rng),
            )
        })
        .collect();
    let rows = persphere::transport::holder_diagnostic(&pairs, &band, &grid).unwrap();
    assert_eq!(rows.len(), 100);
    for r in &rows {
        assert!(r.epsilon.is_finite() && r.pot.is_finite() && r.pers_sum.is_finite());
        assert!(r.epsilon >= 0.0 && r.pot >= 0.0 && r.pers_sum >= 0.0);
    }
}

#[test]
fn l2_and_sup_norms_bracket_each_other() {
    let mut rng = replicate_rng(306, 0);
    let spec = CorpusSpec {
        counting: false,
        ..CorpusSpec::default()
    };
    let grid = SphereGrid::new(100, 200).unwrap();
    let sqrt_area = (4.0 * std::f64::consts::PI).sqrt();
    for _ in 0..25 {
        let mu = random_measure(&spec, &mut rng);
        let nu = random_measure(&spec, &mut rng);
        let f = sample(&mu, &grid);
        let g = sample(&nu, &grid);
        let sup = sup_diff(&f, &g).unwrap();
        let l2 = l2_diff(&f, &g).unwrap();
        assert!(l2 <= (sqrt_area + 1e-2) * sup);
        // Reverse direction via the uniform Lipschitz control of the
        // difference, with the loose envelope constant.
        let lip_envelope: f64 = 2.0
            * mu.atoms()
                .iter()
                .chain(nu.atoms())
                .map(|a| a.weight * (1.0 + a.point.norm2() * a.point.norm2()).sqrt())
                .sum::<f64>();
        let first = std::f64::consts::PI.powf(-0.25) * (2.0 * lip_envelope).sqrt() * l2.sqrt();
        let second = std::f64::consts::PI.powf(-0.5) * l2;
        assert!(sup <= 2.0 * first.max(second) + 1e-2);
    }
}
