//! Persistence spheres and friends: finitely supported persistence measures,
//! the signed lift-zonoid transform sampled on polar sphere grids, exact
//! partial optimal transport with a brute-force oracle, persistence
//! landscapes and Gaussian persistence images, sublevel-set and
//! Vietoris-Rips diagram computation, seeded simulation models, and the
//! clustering utilities used to compare the induced geometries.
//!
//! Everything is plain data plus pure functions: values are immutable after
//! construction and safe to share across threads.
//!
//! ```
//! use persphere::{PersistenceMeasure, sphere, transport};
//!
//! let mu = PersistenceMeasure::from_points(&[(0.0, 2.0), (1.0, 4.0)])?;
//! let nu = PersistenceMeasure::from_points(&[(0.5, 2.5)])?;
//!
//! // Evaluating the sphere at the total-persistence direction reads off
//! // sqrt(2) times the total persistence.
//! let read_off = sphere::eval(&mu, &sphere::v_pers());
//! assert!((read_off - 2.0f64.sqrt() * mu.total_persistence()).abs() < 1e-12);
//!
//! // Sphere functions are uniformly stable under partial transport.
//! let grid = sphere::SphereGrid::new(40, 80)?;
//! let gap = sphere::sup_diff(&sphere::sample(&mu, &grid), &sphere::sample(&nu, &grid))?;
//! let pot = transport::pot1(&mu, &nu)?.cost;
//! assert!(gap <= 2.0 * 2.0f64.sqrt() * pot + 1e-9);
//! # Ok::<(), persphere::Error>(())
//! ```

// Validation guards use `!(x > 0.0)` so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod corpus;
pub mod error;
pub mod figures;
pub mod generators;
pub mod homology;
pub mod image;
pub mod io;
pub mod landscape;
pub mod measure;
pub mod numeric;
pub mod sphere;
pub mod transport;

pub use error::{Error, Result};
pub use measure::{Atom, PersistenceMeasure, PlanePoint, Region, Reweighting, SignedAtomSet};
