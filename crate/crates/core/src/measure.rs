//! Finitely supported persistence measures on the open half-plane
//! `{(x, y) : x < y}`, diagonal geometry, augmentation, and diagram file I/O.
//!
//! Atoms with equal coordinates are kept as separate entries (multiset
//! semantics); no operation merges atoms.

use crate::error::{Error, Result};
use crate::numeric::fmt_f64;

/// A point of the extended half-plane, carrying birth/death semantics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Coordinate along the diagonal, `(x + y) / 2`.
    #[inline]
    pub fn diag_coord(&self) -> f64 {
        0.5 * (self.x + self.y)
    }

    /// Distance to the diagonal in the sup norm, `(y - x) / 2`.
    ///
    /// Panics if `y < x`: such points lie below the diagonal and have no
    /// persistence reading.
    #[inline]
    pub fn persistence(&self) -> f64 {
        assert!(
            self.y >= self.x,
            "persistence undefined below the diagonal: ({}, {})",
            self.x,
            self.y
        );
        0.5 * (self.y - self.x)
    }

    /// Projection onto the diagonal in the sup norm; idempotent.
    #[inline]
    pub fn diag_project(&self) -> PlanePoint {
        let d = self.diag_coord();
        PlanePoint::new(d, d)
    }

    /// True if the point lies exactly on the diagonal.
    #[inline]
    pub fn on_diagonal(&self) -> bool {
        self.x == self.y
    }

    #[inline]
    pub fn norm2(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Sup-norm distance to another point.
    #[inline]
    pub fn linf_dist(&self, other: &PlanePoint) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}

/// One positively weighted atom of a persistence measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub point: PlanePoint,
    pub weight: f64,
}

/// A finite positive measure on `{x < y}`: a list of weighted atoms.
///
/// Weights are strictly positive and every atom lies strictly above the
/// diagonal. Counting measures carry unit weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceMeasure {
    atoms: Vec<Atom>,
}

impl PersistenceMeasure {
    pub fn empty() -> Self {
        Self { atoms: Vec::new() }
    }

    /// Build a measure, validating every atom.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if !a.point.x.is_finite() || !a.point.y.is_finite() || !a.weight.is_finite() {
                return Err(Error::InvalidData(format!("non-finite atom at index {i}")));
            }
            if a.point.y <= a.point.x {
                return Err(Error::InvalidData(format!(
                    "death <= birth at index {i}: ({}, {})",
                    a.point.x, a.point.y
                )));
            }
            if a.weight <= 0.0 {
                return Err(Error::InvalidData(format!(
                    "non-positive weight at index {i}: {}",
                    a.weight
                )));
            }
        }
        Ok(Self { atoms })
    }

    /// Counting measure over the given (birth, death) pairs.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            points
                .iter()
                .map(|&(x, y)| Atom {
                    point: PlanePoint::new(x, y),
                    weight: 1.0,
                })
                .collect(),
        )
    }

    /// Weighted atoms as `(birth, death, weight)` triples.
    pub fn from_triples(triples: &[(f64, f64, f64)]) -> Result<Self> {
        Self::new(
            triples
                .iter()
                .map(|&(x, y, w)| Atom {
                    point: PlanePoint::new(x, y),
                    weight: w,
                })
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total mass, the sum of weights.
    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// True when every weight is exactly 1.
    pub fn is_counting(&self) -> bool {
        self.atoms.iter().all(|a| a.weight == 1.0)
    }

    /// Persistence-weighted mass, `sum_i w_i * pers(p_i)`.
    pub fn total_persistence(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * a.point.persistence())
            .sum()
    }

    /// Signed augmentation: each atom `(p, w)` contributes `(p, +w)` and
    /// `(proj(p), -w)`. Total signed mass is zero.
    pub fn augment(&self) -> SignedAtomSet {
        let mut atoms = Vec::with_capacity(2 * self.atoms.len());
        for a in &self.atoms {
            atoms.push((a.point, a.weight));
            atoms.push((a.point.diag_project(), -a.weight));
        }
        SignedAtomSet { atoms }
    }

    /// Cross-augmentation: this measure plus the diagonal pushforward of
    /// `other`. The result is a positive atom set on the closed half-plane.
    pub fn cross_augment(&self, other: &PersistenceMeasure) -> SignedAtomSet {
        let mut atoms: Vec<(PlanePoint, f64)> = self
            .atoms
            .iter()
            .map(|a| (a.point, a.weight))
            .collect();
        atoms.extend(
            other
                .atoms
                .iter()
                .map(|a| (a.point.diag_project(), a.weight)),
        );
        SignedAtomSet { atoms }
    }

    /// Keep exactly the atoms whose point lies inside `region`.
    pub fn restrict(&self, region: &Region) -> PersistenceMeasure {
        PersistenceMeasure {
            atoms: self
                .atoms
                .iter()
                .filter(|a| region.contains(&a.point))
                .copied()
                .collect(),
        }
    }

    /// Split into (inside, outside) with respect to `region`; the two halves
    /// partition the atom multiset.
    pub fn split(&self, region: &Region) -> (PersistenceMeasure, PersistenceMeasure) {
        let (inside, outside) = self
            .atoms
            .iter()
            .partition(|a| region.contains(&a.point));
        (
            PersistenceMeasure { atoms: inside },
            PersistenceMeasure { atoms: outside },
        )
    }

    /// Rescale each weight by the scheme's factor at the atom; atoms whose
    /// reweighted mass is exactly zero are dropped.
    pub fn reweight(&self, scheme: &Reweighting) -> Result<PersistenceMeasure> {
        scheme.validate()?;
        let atoms = self
            .atoms
            .iter()
            .filter_map(|a| {
                let w = a.weight * scheme.factor(&a.point);
                (w != 0.0).then_some(Atom {
                    point: a.point,
                    weight: w,
                })
            })
            .collect();
        Ok(PersistenceMeasure { atoms })
    }

    /// Disjoint union of two measures (atom lists concatenated).
    pub fn plus(&self, other: &PersistenceMeasure) -> PersistenceMeasure {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        PersistenceMeasure { atoms }
    }

    /// Translate every atom by `(dx, dy)`.
    pub fn translate(&self, dx: f64, dy: f64) -> PersistenceMeasure {
        PersistenceMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    point: PlanePoint::new(a.point.x + dx, a.point.y + dy),
                    weight: a.weight,
                })
                .collect(),
        }
    }

    /// Parse the diagram CSV format: one `birth,death[,weight]` atom per
    /// line, `#` comments and blank lines ignored, weight defaulting to 1.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected birth,death[,weight], got {:?}", raw),
                });
            }
            let parse = |s: &str, what: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad {what} value {s:?}"),
                })
            };
            let x = parse(fields[0], "birth")?;
            let y = parse(fields[1], "death")?;
            let w = if fields.len() == 3 {
                parse(fields[2], "weight")?
            } else {
                1.0
            };
            if !x.is_finite() || !y.is_finite() || !w.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "non-finite value".into(),
                });
            }
            if y <= x {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("death <= birth at line {line_no}"),
                });
            }
            if w <= 0.0 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("non-positive weight at line {line_no}"),
                });
            }
            atoms.push(Atom {
                point: PlanePoint::new(x, y),
                weight: w,
            });
        }
        Ok(Self { atoms })
    }

    /// Serialize to the diagram CSV format with 17-significant-digit reals.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for a in &self.atoms {
            out.push_str(&fmt_f64(a.point.x));
            out.push(',');
            out.push_str(&fmt_f64(a.point.y));
            out.push(',');
            out.push_str(&fmt_f64(a.weight));
            out.push('\n');
        }
        out
    }

    pub fn read_file(path: &std::path::Path) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_csv().as_bytes())
    }
}

/// Weighted atoms with signed weights; points may lie on the diagonal but
/// never below it. Holds augmented measures and differences of
/// cross-augmentations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignedAtomSet {
    atoms: Vec<(PlanePoint, f64)>,
}

impl SignedAtomSet {
    pub fn new(atoms: Vec<(PlanePoint, f64)>) -> Result<Self> {
        for (i, (p, w)) in atoms.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() || !w.is_finite() {
                return Err(Error::InvalidData(format!("non-finite atom at index {i}")));
            }
            if p.y < p.x {
                return Err(Error::InvalidData(format!(
                    "sub-diagonal point at index {i}: ({}, {})",
                    p.x, p.y
                )));
            }
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(PlanePoint, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Sum of signed weights.
    pub fn signed_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    /// Sum of absolute weights (total variation mass).
    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w.abs()).sum()
    }

    /// Atomwise difference `self - other` (concatenation with negated
    /// weights; no cancellation is performed).
    pub fn minus(&self, other: &SignedAtomSet) -> SignedAtomSet {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().map(|&(p, w)| (p, -w)));
        SignedAtomSet { atoms }
    }

    /// Collapse atoms at identical coordinates by summing their weights and
    /// drop exact zeros. Used to compare signed sets up to cancellation.
    pub fn cancelled(&self) -> Vec<(PlanePoint, f64)> {
        let mut atoms = self.atoms.clone();
        atoms.sort_by(|a, b| {
            a.0.x
                .total_cmp(&b.0.x)
                .then(a.0.y.total_cmp(&b.0.y))
        });
        let mut out: Vec<(PlanePoint, f64)> = Vec::new();
        for (p, w) in atoms {
            match out.last_mut() {
                Some((q, acc)) if q.x == p.x && q.y == p.y => *acc += w,
                _ => out.push((p, w)),
            }
        }
        out.retain(|(_, w)| *w != 0.0);
        out
    }
}

/// Closed interval bounds, possibly infinite on either side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub const ALL: Bounds = Bounds {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    #[inline]
    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

/// A declarative band region: conjunction of interval constraints on the
/// diagonal coordinate, the persistence, and the Euclidean norm of a point.
/// Membership is decidable and deterministic, so restrictions are testable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub diag: Bounds,
    pub pers: Bounds,
    pub norm: Bounds,
}

impl Region {
    /// The whole half-plane.
    pub fn all() -> Self {
        Self {
            diag: Bounds::ALL,
            pers: Bounds::ALL,
            norm: Bounds::ALL,
        }
    }

    /// An empty band (no point satisfies it).
    pub fn none() -> Self {
        Self {
            diag: Bounds::new(1.0, -1.0),
            pers: Bounds::ALL,
            norm: Bounds::ALL,
        }
    }

    /// `{ |d(p)| <= r }`.
    pub fn diag_abs_max(r: f64) -> Self {
        Self {
            diag: Bounds::new(-r, r),
            pers: Bounds::ALL,
            norm: Bounds::ALL,
        }
    }

    /// The compact core `{ |d| <= r, lo <= pers <= hi }`.
    pub fn band(r: f64, pers_lo: f64, pers_hi: f64) -> Self {
        Self {
            diag: Bounds::new(-r, r),
            pers: Bounds::new(pers_lo, pers_hi),
            norm: Bounds::ALL,
        }
    }

    pub fn with_diag(mut self, lo: f64, hi: f64) -> Self {
        self.diag = Bounds::new(lo, hi);
        self
    }

    pub fn with_pers(mut self, lo: f64, hi: f64) -> Self {
        self.pers = Bounds::new(lo, hi);
        self
    }

    pub fn with_norm(mut self, lo: f64, hi: f64) -> Self {
        self.norm = Bounds::new(lo, hi);
        self
    }

    pub fn contains(&self, p: &PlanePoint) -> bool {
        self.diag.contains(p.diag_coord())
            && self.pers.contains(p.persistence())
            && self.norm.contains(p.norm2())
    }
}

/// Weight transformations applied atom by atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reweighting {
    /// Multiply by `pers(p)^n`.
    PersPow(u32),
    /// Multiply by `(2/pi) * atan((y - x) / scale)`; `scale > 0`.
    ArctanStep { scale: f64 },
}

impl Reweighting {
    fn validate(&self) -> Result<()> {
        if let Reweighting::ArctanStep { scale } = self {
            if !(*scale > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "arctan step scale must be positive, got {scale}"
                )));
            }
        }
        Ok(())
    }

    pub fn factor(&self, p: &PlanePoint) -> f64 {
        match *self {
            Reweighting::PersPow(n) => p.persistence().powi(n as i32),
            Reweighting::ArctanStep { scale } => {
                std::f64::consts::FRAC_2_PI * ((p.y - p.x) / scale).atan()
            }
        }
    }
}
