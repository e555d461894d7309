//! Persistence diagrams from data: sublevel-set H0 of piecewise-linear 1-D
//! functions and Vietoris-Rips H0/H1 of planar point clouds.

mod union_find;

pub use union_find::DisjointSets;

use crate::error::{Error, Result};
use crate::measure::{Atom, PersistenceMeasure, PlanePoint};

/// Samples `(t_i, y_i)` of a function, sorted by strictly increasing `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    ts: Vec<f64>,
    ys: Vec<f64>,
}

impl SampledCurve {
    pub fn new(ts: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if ts.len() != ys.len() {
            return Err(Error::InvalidData(format!(
                "coordinate counts differ: {} vs {}",
                ts.len(),
                ys.len()
            )));
        }
        if ts.len() < 2 {
            return Err(Error::InvalidData("a curve needs at least 2 samples".into()));
        }
        for v in ts.iter().chain(ys.iter()) {
            if !v.is_finite() {
                return Err(Error::InvalidData("non-finite curve sample".into()));
            }
        }
        if ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidData(
                "curve abscissae must be strictly increasing".into(),
            ));
        }
        Ok(Self { ts, ys })
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let (ts, ys) = parse_two_column(text)?;
        Self::new(ts, ys)
    }

    pub fn to_csv(&self) -> String {
        two_column_csv(&self.ts, &self.ys)
    }

    pub fn read_file(path: &std::path::Path) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_csv().as_bytes())
    }
}

/// A finite list of points in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<(f64, f64)>,
}

impl PointCloud {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        for &(x, y) in &points {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::InvalidData("non-finite point".into()));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let (xs, ys) = parse_two_column(text)?;
        Self::new(xs.into_iter().zip(ys).collect())
    }

    pub fn to_csv(&self) -> String {
        let xs: Vec<f64> = self.points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = self.points.iter().map(|p| p.1).collect();
        two_column_csv(&xs, &ys)
    }

    pub fn read_file(path: &std::path::Path) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_csv().as_bytes())
    }
}

fn parse_two_column(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected two comma-separated values, got {raw:?}"),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad value {s:?}"),
            })
        };
        a.push(parse(fields[0])?);
        b.push(parse(fields[1])?);
    }
    Ok((a, b))
}

fn two_column_csv(a: &[f64], b: &[f64]) -> String {
    use crate::numeric::fmt_f64;
    let mut out = String::new();
    for (x, y) in a.iter().zip(b) {
        out.push_str(&fmt_f64(*x));
        out.push(',');
        out.push_str(&fmt_f64(*y));
        out.push('\n');
    }
    out
}

/// Degree-0 sublevel-set persistence of the piecewise-linear interpolation
/// of a sampled curve.
///
/// Vertices are swept in increasing value order (ties by index); components
/// merge under the elder rule, the younger component dying at the merge
/// value. The essential component is closed off at the global maximum, so
/// the diagram is finite with one atom per local minimum. Zero-length pairs
/// are dropped.
pub fn sublevel_pd0(curve: &SampledCurve) -> PersistenceMeasure {
    let ys = curve.values();
    let n = ys.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| ys[a].total_cmp(&ys[b]).then(a.cmp(&b)));
    let rank = {
        let mut r = vec![0usize; n];
        for (k, &v) in order.iter().enumerate() {
            r[v] = k;
        }
        r
    };

    let mut ds = DisjointSets::new(n);
    // Birth value of the component containing each root.
    let mut birth = vec![f64::INFINITY; n];
    let mut atoms: Vec<Atom> = Vec::new();

    for &v in &order {
        birth[v] = ys[v];
        for nb in neighbors(v, n) {
            if rank[nb] > rank[v] {
                continue; // not yet present in the sublevel set
            }
            let rv = ds.find(v);
            let rn = ds.find(nb);
            if rv == rn {
                continue;
            }
            // Elder rule: the component with the larger birth dies now.
            let (bv, bn) = (birth[rv], birth[rn]);
            let (dies, survives) = if bn > bv || (bn == bv && rn > rv) {
                (rn, rv)
            } else {
                (rv, rn)
            };
            let death = ys[v];
            if death > birth[dies] {
                atoms.push(Atom {
                    point: PlanePoint::new(birth[dies], death),
                    weight: 1.0,
                });
            }
            let surviving_birth = birth[survives];
            let (kept, _) = ds.union(dies, survives).expect("distinct roots");
            birth[kept] = surviving_birth;
        }
    }

    // Essential component: global minimum paired with the global maximum.
    let global_min = ys[order[0]];
    let global_max = ys[order[n - 1]];
    if global_max > global_min {
        atoms.push(Atom {
            point: PlanePoint::new(global_min, global_max),
            weight: 1.0,
        });
    }
    PersistenceMeasure::new(atoms).expect("bars have positive length by construction")
}

fn neighbors(v: usize, n: usize) -> impl Iterator<Item = usize> {
    let left = v.checked_sub(1);
    let right = (v + 1 < n).then_some(v + 1);
    left.into_iter().chain(right)
}

const MAX_RIPS_POINTS: usize = 400;

/// Vietoris-Rips persistence of a planar point cloud in degrees 0 and 1.
///
/// H0 comes from the minimum spanning tree over all pairwise Euclidean
/// distances: one finite bar `(0, edge length)` per merge, the essential bar
/// dropped. H1 comes from boundary-matrix reduction over GF(2) on edges and
/// triangles of diameter at most `cap`; 1-cycles still open at the cap are
/// dropped, as are zero-length bars. Filtration ties break by lexicographic
/// simplex order.
pub fn rips_pd(
    cloud: &PointCloud,
    cap: f64,
) -> Result<(PersistenceMeasure, PersistenceMeasure)> {
    if cloud.len() > MAX_RIPS_POINTS {
        return Err(Error::SizeLimit(format!(
            "Rips computation takes at most {MAX_RIPS_POINTS} points, got {}",
            cloud.len()
        )));
    }
    if !(cap > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "diameter cap must be positive, got {cap}"
        )));
    }
    let pts = cloud.points();
    let n = pts.len();
    let dist = |a: usize, b: usize| -> f64 {
        let dx = pts[a].0 - pts[b].0;
        let dy = pts[a].1 - pts[b].1;
        dx.hypot(dy)
    };

    // All edges, sorted by (length, lexicographic), for the MST.
    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((dist(u, v), u, v));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut ds = DisjointSets::new(n);
    let mut h0_atoms = Vec::new();
    for &(w, u, v) in &edges {
        if ds.union(u, v).is_some() && w > 0.0 {
            h0_atoms.push(Atom {
                point: PlanePoint::new(0.0, w),
                weight: 1.0,
            });
        }
    }
    let h0 = PersistenceMeasure::new(h0_atoms).expect("positive merge lengths");

    let h1 = rips_h1(pts, &edges, cap, dist)?;
    Ok((h0, h1))
}

fn rips_h1(
    pts: &[(f64, f64)],
    sorted_edges: &[(f64, usize, usize)],
    cap: f64,
    dist: impl Fn(usize, usize) -> f64,
) -> Result<PersistenceMeasure> {
    let n = pts.len();
    // Capped edges in filtration order; remember each pair's edge index.
    let mut edge_id = vec![usize::MAX; n * n];
    let mut edge_diam = Vec::new();
    for &(w, u, v) in sorted_edges.iter().filter(|e| e.0 <= cap) {
        let id = edge_diam.len();
        edge_id[u * n + v] = id;
        edge_id[v * n + u] = id;
        edge_diam.push(w);
    }

    // Triangles with all sides under the cap, in (diameter, lex) order.
    let mut triangles: Vec<(f64, [usize; 3])> = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let dab = dist(a, b);
            if dab > cap {
                continue;
            }
            for c in (b + 1)..n {
                let diam = dab.max(dist(a, c)).max(dist(b, c));
                if diam <= cap {
                    triangles.push((diam, [a, b, c]));
                }
            }
        }
    }
    triangles.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    // Column reduction over GF(2): triangle boundaries expressed in edge
    // indices, pivoting on the largest edge.
    let mut pivot_owner: Vec<usize> = vec![usize::MAX; edge_diam.len()];
    let mut reduced: Vec<Vec<usize>> = Vec::with_capacity(triangles.len());
    let mut atoms = Vec::new();

    for (t_idx, (t_diam, [a, b, c])) in triangles.iter().enumerate() {
        let mut col = vec![
            edge_id[a * n + b],
            edge_id[a * n + c],
            edge_id[b * n + c],
        ];
        col.sort_unstable();
        debug_assert!(col.iter().all(|&e| e != usize::MAX));
        while let Some(&low) = col.last() {
            let owner = pivot_owner[low];
            if owner == usize::MAX {
                pivot_owner[low] = t_idx;
                let birth = edge_diam[low];
                if *t_diam > birth {
                    atoms.push(Atom {
                        point: PlanePoint::new(birth, *t_diam),
                        weight: 1.0,
                    });
                }
                break;
            }
            col = add_gf2(&col, &reduced[owner]);
        }
        reduced.push(col);
    }
    PersistenceMeasure::new(atoms)
}

/// Symmetric difference of two sorted index lists (GF(2) column addition).
fn add_gf2(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
