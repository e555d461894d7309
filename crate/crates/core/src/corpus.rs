//! Seeded random measure corpora used by the self-test command and by the
//! invariant suites.

use crate::measure::{Atom, PersistenceMeasure, PlanePoint};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Configuration for random test measures.
#[derive(Debug, Clone, Copy)]
pub struct CorpusSpec {
    pub max_atoms: usize,
    pub min_atoms: usize,
    /// Coordinates are drawn from `[-coord_range, coord_range]`.
    pub coord_range: f64,
    /// Unit weights when true, otherwise weights in `(0, 2]`.
    pub counting: bool,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            max_atoms: 10,
            min_atoms: 1,
            coord_range: 10.0,
            counting: true,
        }
    }
}

/// Draw one random measure: `x` uniform, lifetime positive uniform, so every
/// atom sits strictly above the diagonal.
pub fn random_measure(spec: &CorpusSpec, rng: &mut ChaCha8Rng) -> PersistenceMeasure {
    let n = rng.gen_range(spec.min_atoms..=spec.max_atoms);
    let r = spec.coord_range;
    let atoms = (0..n)
        .map(|_| {
            let x = rng.gen_range(-r..r);
            let life = rng.gen_range(1e-3..r);
            let weight = if spec.counting {
                1.0
            } else {
                rng.gen_range(1e-3..=2.0)
            };
            Atom {
                point: PlanePoint::new(x, x + life),
                weight,
            }
        })
        .collect();
    PersistenceMeasure::new(atoms).expect("atoms are above the diagonal by construction")
}

/// A mixed corpus of measure pairs: the first half counting, the second half
/// with weights in `(0, 2]`.
pub fn random_pairs(
    count: usize,
    spec: &CorpusSpec,
    rng: &mut ChaCha8Rng,
) -> Vec<(PersistenceMeasure, PersistenceMeasure)> {
    (0..count)
        .map(|k| {
            let s = CorpusSpec {
                counting: spec.counting || k < count / 2,
                ..*spec
            };
            (random_measure(&s, rng), random_measure(&s, rng))
        })
        .collect()
}
