//! Independent oracles: threshold-sweep check of sublevel persistence, a
//! Prim MST against the Kruskal-backed Rips H0, a dense textbook reduction
//! against the optimized Rips H1, and the exhaustive transport oracle
//! against the flow solver.

use persphere::corpus::{random_measure, CorpusSpec};
use persphere::generators::replicate_rng;
use persphere::homology::{rips_pd, sublevel_pd0, PointCloud, SampledCurve};
use persphere::measure::PersistenceMeasure;
use persphere::transport::{pot1, pot1_bruteforce};
use rand::Rng;

/// Integral of the sublevel component count over the value range: equals the
/// total bar length (essential bar closed at the global maximum) because
/// each bar contributes its length to the level-set integral.
fn total_bar_length_by_threshold_sweep(ys: &[f64]) -> f64 {
    let mut levels: Vec<f64> = ys.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut acc = 0.0;
    for w in levels.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        acc += components_at(ys, lo) as f64 * (hi - lo);
    }
    acc
}

/// Connected components of `{ i : ys[i] <= level }` in the path graph.
fn components_at(ys: &[f64], level: f64) -> usize {
    let mut count = 0;
    let mut in_run = false;
    for &y in ys {
        let inside = y <= level;
        if inside && !in_run {
            count += 1;
        }
        in_run = inside;
    }
    count
}

#[test]
fn sublevel_total_bar_length_matches_threshold_sweep() {
    let mut rng = replicate_rng(401, 0);
    for _ in 0..100 {
        let n = 20;
        let ts: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let curve = SampledCurve::new(ts, ys.clone()).unwrap();
        let pd = sublevel_pd0(&curve);
        let total: f64 = pd.atoms().iter().map(|a| a.point.y - a.point.x).sum();
        let oracle = total_bar_length_by_threshold_sweep(&ys);
        assert!(
            (total - oracle).abs() < 1e-9,
            "bars {total} vs sweep {oracle}"
        );
        // Births are exactly the local minima values.
        let mut births: Vec<f64> = pd.atoms().iter().map(|a| a.point.x).collect();
        births.sort_by(f64::total_cmp);
        let mut minima: Vec<f64> = (0..n)
            .filter(|&i| {
                (i == 0 || ys[i] < ys[i - 1]) && (i == n - 1 || ys[i] < ys[i + 1])
            })
            .map(|i| ys[i])
            .collect();
        minima.sort_by(f64::total_cmp);
        assert_eq!(births, minima);
    }
}

/// Prim's algorithm, an implementation independent of the Kruskal path.
fn prim_mst_lengths(points: &[(f64, f64)]) -> Vec<f64> {
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

#[test]
fn rips_h0_equals_the_mst_multiset() {
    let mut rng = replicate_rng(402, 0);
    for _ in 0..100 {
        let n = 50;
        let points: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
            .collect();
        let cloud = PointCloud::new(points.clone()).unwrap();
        let (h0, _) = rips_pd(&cloud, 1.0).unwrap();
        let mut bars: Vec<f64> = h0.atoms().iter().map(|a| a.point.y).collect();
        bars.sort_by(f64::total_cmp);
        let mut mst = prim_mst_lengths(&points);
        mst.sort_by(f64::total_cmp);
        assert_eq!(bars.len(), mst.len());
        for (a, b) in bars.iter().zip(&mst) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

/// Textbook global column reduction over every simplex of dimension <= 2,
/// with no clearing and no pivot cache: the `while exists j' < j with
/// low(j') = low(j)` loop, scanning columns to find the collision.
fn brute_force_h1(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let n = points.len();
    let dist = |a: usize, b: usize| -> f64 {
        (points[a].0 - points[b].0).hypot(points[a].1 - points[b].1)
    };
    // Global filtration: (diameter, dim, vertex list).
    let mut simplices: Vec<(f64, usize, Vec<usize>)> = Vec::new();
    for v in 0..n {
        simplices.push((0.0, 0, vec![v]));
    }
    for a in 0..n {
        for b in (a + 1)..n {
            simplices.push((dist(a, b), 1, vec![a, b]));
            for c in (b + 1)..n {
                let diam = dist(a, b).max(dist(a, c)).max(dist(b, c));
                simplices.push((diam, 2, vec![a, b, c]));
            }
        }
    }
    simplices.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(x.1.cmp(&y.1))
            .then(x.2.cmp(&y.2))
    });
    let index_of: std::collections::HashMap<Vec<usize>, usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.2.clone(), i))
        .collect();

    // Dense-ish boundary columns as sorted index sets.
    let mut cols: Vec<Vec<usize>> = simplices
        .iter()
        .map(|(_, dim, verts)| {
            let mut col: Vec<usize> = match dim {
                0 => Vec::new(),
                1 => verts.iter().map(|v| index_of[&vec![*v]]).collect(),
                _ => (0..3)
                    .map(|k| {
                        let mut face = verts.clone();
                        face.remove(k);
                        index_of[&face]
                    })
                    .collect(),
            };
            col.sort_unstable();
            col
        })
        .collect();

    let xor = |a: &[usize], b: &[usize]| -> Vec<usize> {
        let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
        out.sort_unstable();
        let mut dedup = Vec::new();
        for v in out {
            if dedup.last() == Some(&v) {
                dedup.pop();
            } else {
                dedup.push(v);
            }
        }
        dedup
    };

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..cols.len() {
        'reduce: while let Some(&low) = cols[j].last() {
            for jp in 0..j {
                if cols[jp].last() == Some(&low) {
                    cols[j] = xor(&cols[j], &cols[jp]);
                    continue 'reduce;
                }
            }
            pairs.push((low, j));
            break;
        }
    }

    let mut bars = Vec::new();
    for (i, j) in pairs {
        // An H1 bar is an edge killed by a triangle.
        if simplices[i].1 == 1 && simplices[j].1 == 2 && simplices[j].0 > simplices[i].0 {
            bars.push((simplices[i].0, simplices[j].0));
        }
    }
    bars.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    bars
}

#[test]
fn rips_h1_matches_the_textbook_reduction() {
    let mut rng = replicate_rng(403, 0);
    for round in 0..50 {
        let n = 4 + (round % 5); // 4..=8 points
        let points: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)))
            .collect();
        let cloud = PointCloud::new(points.clone()).unwrap();
        let (_, h1) = rips_pd(&cloud, 1e9).unwrap();
        let mut got: Vec<(f64, f64)> =
            h1.atoms().iter().map(|a| (a.point.x, a.point.y)).collect();
        got.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let expected = brute_force_h1(&points);
        assert_eq!(got.len(), expected.len(), "cycle counts differ");
        for (g, e) in got.iter().zip(&expected) {
            assert_eq!(g.0.to_bits(), e.0.to_bits());
            assert_eq!(g.1.to_bits(), e.1.to_bits());
        }
    }
}

#[test]
fn pot1_matches_the_exhaustive_oracle() {
    let mut rng = replicate_rng(404, 0);
    let spec = CorpusSpec {
        max_atoms: 4,
        min_atoms: 0,
        ..CorpusSpec::default()
    };
    for _ in 0..200 {
        let mu = random_measure(&spec, &mut rng);
        let nu = random_measure(&spec, &mut rng);
        let fast = pot1(&mu, &nu).unwrap().cost;
        let slow = pot1_bruteforce(&mu, &nu).unwrap();
        assert!((fast - slow).abs() <= 1e-9, "{fast} vs {slow}");
    }
}

#[test]
fn deletion_cost_is_exactly_total_persistence() {
    let mut rng = replicate_rng(405, 0);
    let empty = PersistenceMeasure::empty();
    for _ in 0..50 {
        let mu = random_measure(
            &CorpusSpec {
                counting: false,
                ..CorpusSpec::default()
            },
            &mut rng,
        );
        assert_eq!(pot1(&mu, &empty).unwrap().cost, mu.total_persistence());
    }
}
