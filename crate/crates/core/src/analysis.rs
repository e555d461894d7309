//! Distance matrices over datasets, average-linkage hierarchical clustering,
//! the Rand index, and distance-matrix correlation.

use crate::error::{Error, Result};
use crate::numeric::fmt_f64;
use rayon::prelude::*;

/// A symmetric nonnegative matrix with zero diagonal, tagged with the name
/// of the metric that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
    pub metric: String,
}

impl DistanceMatrix {
    pub fn new(n: usize, entries: Vec<f64>, metric: impl Into<String>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidData(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        let m = Self {
            n,
            entries,
            metric: metric.into(),
        };
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(Error::InvalidData(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = m.get(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidData(format!("bad entry at ({i}, {j}): {v}")));
                }
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::InvalidData(format!("asymmetry at ({i}, {j})")));
                }
            }
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Strict upper-triangle entries in row-major order.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// Serialize as an `n` header line then `n` rows of `n` values.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| fmt_f64(self.get(i, j))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty matrix file".into(),
        })?;
        let n: usize = header.trim().parse().map_err(|_| Error::Parse {
            line: 1,
            msg: format!("bad size header {header:?}"),
        })?;
        let mut entries = Vec::with_capacity(n * n);
        let mut rows = 0;
        for (idx, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let row: Result<Vec<f64>> = line
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| Error::Parse {
                        line: idx + 1,
                        msg: format!("bad value {s:?}"),
                    })
                })
                .collect();
            let row = row?;
            if row.len() != n {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected {n} values, got {}", row.len()),
                });
            }
            entries.extend(row);
            rows += 1;
        }
        if rows != n {
            return Err(Error::Parse {
                line: rows + 1,
                msg: format!("expected {n} rows, got {rows}"),
            });
        }
        Self::new(n, entries, "unknown")
    }

    pub fn read_file(path: &std::path::Path) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_csv().as_bytes())
    }
}

/// Compute all pairwise distances under a symmetric metric. Pairs are
/// evaluated concurrently; the result is independent of the schedule.
pub fn distance_matrix<T: Sync>(
    items: &[T],
    metric: &str,
    d: impl Fn(&T, &T) -> Result<f64> + Sync,
) -> Result<DistanceMatrix> {
    let n = items.len();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i, j));
        }
    }
    let computed: Result<Vec<(usize, usize, f64)>> = pairs
        .par_iter()
        .map(|&(i, j)| Ok((i, j, d(&items[i], &items[j])?)))
        .collect();
    let mut entries = vec![0.0; n * n];
    for (i, j, v) in computed? {
        entries[i * n + j] = v;
        entries[j * n + i] = v;
    }
    DistanceMatrix::new(n, entries, metric)
}

/// One merge of the dendrogram: clusters `a` and `b` joined at `height`.
/// Initial clusters are `0..n`; the merge at step `k` creates cluster `n + k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
}

/// The full merge history of an agglomerative clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub n: usize,
    pub merges: Vec<Merge>,
}

/// Average-linkage (UPGMA) clustering: the inter-cluster distance is the
/// size-weighted mean, ties broken by the smallest index pair.
pub fn average_linkage(d: &DistanceMatrix) -> Dendrogram {
    let n = d.len();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    // active[i] = Some(cluster id); dist is kept dense over original slots.
    let mut id: Vec<Option<usize>> = (0..n).map(Some).collect();
    let mut size = vec![1usize; n];
    let mut dist = d.entries.clone();

    for step in 0..n.saturating_sub(1) {
        let mut best = f64::INFINITY;
        let mut pick = (usize::MAX, usize::MAX);
        for i in 0..n {
            if id[i].is_none() {
                continue;
            }
            for j in (i + 1)..n {
                if id[j].is_none() {
                    continue;
                }
                let v = dist[i * n + j];
                if v < best {
                    best = v;
                    pick = (i, j);
                }
            }
        }
        let (i, j) = pick;
        merges.push(Merge {
            a: id[i].unwrap(),
            b: id[j].unwrap(),
            height: best,
        });
        // UPGMA update into slot i.
        let (si, sj) = (size[i] as f64, size[j] as f64);
        for k in 0..n {
            if k == i || k == j || id[k].is_none() {
                continue;
            }
            let dik = dist[i.min(k) * n + i.max(k)];
            let djk = dist[j.min(k) * n + j.max(k)];
            let merged = (si * dik + sj * djk) / (si + sj);
            dist[i.min(k) * n + i.max(k)] = merged;
            dist[k.min(i) * n + k.max(i)] = merged;
        }
        size[i] += size[j];
        id[i] = Some(n + step);
        id[j] = None;
    }
    Dendrogram { n, merges }
}

/// Cut a dendrogram into `k` clusters: apply the first `n - k` merges and
/// label items by order of first appearance.
pub fn cut(dend: &Dendrogram, k: usize) -> Result<Vec<usize>> {
    let n = dend.n;
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "cannot cut {n} items into {k} clusters"
        )));
    }
    let mut ds = crate::homology::DisjointSets::new(n);
    // Track one representative original item per cluster id.
    let mut rep: Vec<usize> = (0..n).collect();
    rep.resize(2 * n, usize::MAX);
    for (step, m) in dend.merges.iter().take(n - k).enumerate() {
        let (ra, rb) = (rep[m.a], rep[m.b]);
        ds.union(ra, rb);
        rep[n + step] = ra;
    }
    let mut labels = vec![usize::MAX; n];
    let mut next = 0usize;
    let mut seen: std::collections::HashMap<usize, usize> = Default::default();
    for (i, label) in labels.iter_mut().enumerate() {
        let root = ds.find(i);
        let l = *seen.entry(root).or_insert_with(|| {
            let l = next;
            next += 1;
            l
        });
        *label = l;
    }
    Ok(labels)
}

/// Fraction of item pairs on which two labelings agree (joined in both or
/// separated in both). Symmetric and invariant under label renaming.
pub fn rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(format!(
            "labelings of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::InvalidParameter(
            "the Rand index needs at least two items".into(),
        ));
    }
    let n = a.len();
    let mut agree = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            let together_a = a[i] == a[j];
            let together_b = b[i] == b[j];
            if together_a == together_b {
                agree += 1;
            }
        }
    }
    Ok(agree as f64 / (n * (n - 1) / 2) as f64)
}

/// Pearson correlation between the strict upper triangles of two matrices.
pub fn matrix_correlation(d1: &DistanceMatrix, d2: &DistanceMatrix) -> Result<f64> {
    if d1.len() != d2.len() {
        return Err(Error::LengthMismatch(format!(
            "matrices of sizes {} and {}",
            d1.len(),
            d2.len()
        )));
    }
    if d1.len() < 3 {
        return Err(Error::InvalidParameter(
            "correlation needs at least three items".into(),
        ));
    }
    let xs = d1.upper_triangle();
    let ys = d2.upper_triangle();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Write one integer label per line.
pub fn labels_to_csv(labels: &[usize]) -> String {
    let mut out = String::new();
    for l in labels {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    out
}

pub fn labels_from_csv(text: &str) -> Result<Vec<usize>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<usize>().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("bad label {l:?}"),
            })
        })
        .collect()
}
