//! Gaussian persistence images on the birth-lifetime plane.
//!
//! Each atom `(x, y)` is mapped to `(x, y - x)` and spread as an isotropic
//! Gaussian of bandwidth `sigma`; pixel values are exact per-cell integrals
//! (products of CDF differences), not center samples, so comparisons against
//! the closed-form Gaussian L2 distance are meaningful at coarse grids.

use crate::error::{Error, Result};
use crate::measure::{PersistenceMeasure, PlanePoint};
use crate::numeric::fmt_f64;

/// Per-atom image weight schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightScheme {
    Flat,
    /// `pers(p)^n` with `pers(p) = (y - x) / 2`.
    PersPow(u32),
    /// `(2/pi) atan((y - x) / scale)`.
    ArctanStep { scale: f64 },
}

impl WeightScheme {
    pub fn factor(&self, p: &PlanePoint) -> f64 {
        match *self {
            WeightScheme::Flat => 1.0,
            WeightScheme::PersPow(n) => p.persistence().powi(n as i32),
            WeightScheme::ArctanStep { scale } => {
                std::f64::consts::FRAC_2_PI * ((p.y - p.x) / scale).atan()
            }
        }
    }
}

/// Geometry and kernel parameters of a persistence image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageParams {
    pub birth_range: (f64, f64),
    pub pers_range: (f64, f64),
    pub pixel_size: f64,
    pub sigma: f64,
    pub weight: WeightScheme,
    /// Optional birth-degeneracy fix: an artificial zero-lifetime anchor at
    /// `(a, a)` in diagram coordinates, i.e. `(a, 0)` on the image plane.
    /// Off by default.
    pub h0_anchor: Option<f64>,
}

impl ImageParams {
    pub fn new(
        birth_range: (f64, f64),
        pers_range: (f64, f64),
        pixel_size: f64,
        sigma: f64,
        weight: WeightScheme,
    ) -> Result<Self> {
        if !(pixel_size > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pixel size must be positive, got {pixel_size}"
            )));
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {sigma}"
            )));
        }
        if !(birth_range.1 > birth_range.0) || !(pers_range.1 > pers_range.0) {
            return Err(Error::InvalidParameter(
                "image ranges must be nonempty intervals".into(),
            ));
        }
        if let WeightScheme::ArctanStep { scale } = weight {
            if !(scale > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "arctan scale must be positive, got {scale}"
                )));
            }
        }
        Ok(Self {
            birth_range,
            pers_range,
            pixel_size,
            sigma,
            weight,
            h0_anchor: None,
        })
    }

    pub fn with_h0_anchor(mut self, a: f64) -> Self {
        self.h0_anchor = Some(a);
        self
    }

    pub fn n_birth(&self) -> usize {
        cells(self.birth_range, self.pixel_size)
    }

    pub fn n_pers(&self) -> usize {
        cells(self.pers_range, self.pixel_size)
    }

    /// Common geometry covering a set of diagrams with a margin (in sigma
    /// units) around the mapped atoms.
    pub fn covering(
        diagrams: &[&PersistenceMeasure],
        pixel_size: f64,
        sigma: f64,
        weight: WeightScheme,
        margin_sigmas: f64,
    ) -> Result<Self> {
        let mut b_lo = f64::INFINITY;
        let mut b_hi = f64::NEG_INFINITY;
        let mut p_lo = f64::INFINITY;
        let mut p_hi = f64::NEG_INFINITY;
        for d in diagrams {
            for a in d.atoms() {
                let (b, l) = (a.point.x, a.point.y - a.point.x);
                b_lo = b_lo.min(b);
                b_hi = b_hi.max(b);
                p_lo = p_lo.min(l);
                p_hi = p_hi.max(l);
            }
        }
        if !b_lo.is_finite() {
            // All diagrams empty: a token window.
            b_lo = 0.0;
            b_hi = 1.0;
            p_lo = 0.0;
            p_hi = 1.0;
        }
        let pad = margin_sigmas * sigma;
        ImageParams::new(
            (b_lo - pad, b_hi + pad),
            (p_lo - pad, p_hi + pad),
            pixel_size,
            sigma,
            weight,
        )
    }
}

fn cells(range: (f64, f64), h: f64) -> usize {
    (((range.1 - range.0) / h).ceil() as usize).max(1)
}

/// A rendered persistence image: `n_pers` rows by `n_birth` columns of
/// per-cell Gaussian masses.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceImage {
    pub params: ImageParams,
    pixels: Vec<f64>,
}

impl PersistenceImage {
    pub fn pixel(&self, i: usize, j: usize) -> f64 {
        self.pixels[i * self.params.n_birth() + j]
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn total_mass(&self) -> f64 {
        self.pixels.iter().sum()
    }

    /// Serialize with a geometry header then one row per lifetime cell.
    pub fn to_csv(&self) -> String {
        let p = &self.params;
        let mut out = format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(p.birth_range.0),
            fmt_f64(p.birth_range.1),
            fmt_f64(p.pers_range.0),
            fmt_f64(p.pers_range.1),
            fmt_f64(p.pixel_size),
            fmt_f64(p.sigma),
        );
        for i in 0..p.n_pers() {
            let row: Vec<String> = (0..p.n_birth()).map(|j| fmt_f64(self.pixel(i, j))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_csv().as_bytes())
    }
}

/// Standard normal CDF.
#[inline]
fn phi(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z * std::f64::consts::FRAC_1_SQRT_2))
}

/// Render the persistence image of `mu` under `params`: each pixel holds
/// `sum_i w_i * weight(p_i)` times the exact Gaussian mass of the cell.
pub fn persistence_image(mu: &PersistenceMeasure, params: &ImageParams) -> Result<PersistenceImage> {
    // Re-validate so stale hand-built params cannot sneak through.
    let checked = ImageParams::new(
        params.birth_range,
        params.pers_range,
        params.pixel_size,
        params.sigma,
        params.weight,
    )?;
    debug_assert_eq!(&checked.n_birth(), &params.n_birth());

    let nb = params.n_birth();
    let np = params.n_pers();
    let h = params.pixel_size;
    let s = params.sigma;
    let mut pixels = vec![0.0f64; nb * np];

    // (center birth, center lifetime, total coefficient).
    let mut kernels: Vec<(f64, f64, f64)> = mu
        .atoms()
        .iter()
        .map(|a| {
            (
                a.point.x,
                a.point.y - a.point.x,
                a.weight * params.weight.factor(&a.point),
            )
        })
        .collect();
    if let Some(anchor) = params.h0_anchor {
        let p = PlanePoint::new(anchor, anchor);
        let w = match params.weight {
            WeightScheme::Flat => 1.0,
            WeightScheme::PersPow(_) => 0.0,
            WeightScheme::ArctanStep { .. } => 0.0,
        };
        kernels.push((p.x, p.y - p.x, w));
    }

    // Per-axis CDF differences, combined as an outer product per kernel.
    let mut col_mass = vec![0.0f64; nb];
    let mut row_mass = vec![0.0f64; np];
    for (cb, cl, coeff) in kernels {
        if coeff == 0.0 {
            continue;
        }
        for (j, cm) in col_mass.iter_mut().enumerate() {
            let lo = params.birth_range.0 + j as f64 * h;
            *cm = phi((lo + h - cb) / s) - phi((lo - cb) / s);
        }
        for (i, rm) in row_mass.iter_mut().enumerate() {
            let lo = params.pers_range.0 + i as f64 * h;
            *rm = phi((lo + h - cl) / s) - phi((lo - cl) / s);
        }
        for i in 0..np {
            let rw = coeff * row_mass[i];
            if rw == 0.0 {
                continue;
            }
            let row = &mut pixels[i * nb..(i + 1) * nb];
            for (px, cm) in row.iter_mut().zip(&col_mass) {
                *px += rw * cm;
            }
        }
    }
    Ok(PersistenceImage {
        params: *params,
        pixels,
    })
}

/// Discrete L2 distance between two images of identical geometry:
/// `sqrt(sum (a - b)^2) / pixel_size`, the Riemann approximation of the
/// continuous L2 distance between the underlying surfaces.
pub fn image_l2(a: &PersistenceImage, b: &PersistenceImage) -> Result<f64> {
    let (pa, pb) = (&a.params, &b.params);
    let same = pa.birth_range == pb.birth_range
        && pa.pers_range == pb.pers_range
        && pa.pixel_size == pb.pixel_size
        && pa.n_birth() == pb.n_birth()
        && pa.n_pers() == pb.n_pers();
    if !same {
        return Err(Error::GeometryMismatch(format!(
            "image geometries differ: {:?} vs {:?}",
            pa, pb
        )));
    }
    let ss: f64 = a
        .pixels
        .iter()
        .zip(&b.pixels)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum();
    Ok(ss.sqrt() / pa.pixel_size)
}

/// Exact L2 distance between two isotropic Gaussians of common bandwidth:
/// `(1 - exp(-|p - q|^2 / (4 sigma^2)))^(1/2) / (sqrt(2 pi) sigma)`,
/// with the Euclidean norm. Saturates at `1 / (sqrt(2 pi) sigma)`.
pub fn gaussian_l2_closed_form(p: PlanePoint, q: PlanePoint, sigma: f64) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let d2 = dx * dx + dy * dy;
    (1.0 - (-d2 / (4.0 * sigma * sigma)).exp()).sqrt()
        / ((2.0 * std::f64::consts::PI).sqrt() * sigma)
}

/// L2 norm of a single Gaussian kernel, `1 / (2 sqrt(pi) sigma)`.
pub fn gaussian_l2_norm(sigma: f64) -> f64 {
    1.0 / (2.0 * std::f64::consts::PI.sqrt() * sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_params(extent: f64, pixel: f64, sigma: f64) -> ImageParams {
        ImageParams::new(
            (0.0, extent),
            (0.0, extent),
            pixel,
            sigma,
            WeightScheme::Flat,
        )
        .unwrap()
    }

    /// Diagram atom whose image-plane position is (b, l).
    fn atom_at(b: f64, l: f64) -> PersistenceMeasure {
        PersistenceMeasure::from_points(&[(b, b + l)]).unwrap()
    }

    #[test]
    fn empty_diagram_renders_zero() {
        let img = persistence_image(&PersistenceMeasure::empty(), &flat_params(10.0, 0.5, 1.0))
            .unwrap();
        assert!(img.pixels().iter().all(|p| *p == 0.0));
    }

    #[test]
    fn single_atom_mass_is_conserved() {
        // Window much larger than sigma: the cell masses sum to the weight.
        let params = flat_params(30.0, 0.25, 1.0);
        let img = persistence_image(&atom_at(15.0, 15.0), &params).unwrap();
        assert!((img.total_mass() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn doubling_the_weight_doubles_every_pixel() {
        let params = flat_params(20.0, 0.5, 1.0);
        let one = persistence_image(&atom_at(10.0, 10.0), &params).unwrap();
        let two = persistence_image(
            &PersistenceMeasure::from_triples(&[(10.0, 20.0, 2.0)]).unwrap(),
            &params,
        )
        .unwrap();
        for (a, b) in one.pixels().iter().zip(two.pixels()) {
            assert!((2.0 * a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn image_l2_matches_closed_form_away_from_boundary() {
        let sigma = 1.0;
        let params = flat_params(30.0, sigma / 10.0, sigma);
        let a = atom_at(10.0, 10.0);
        let b = atom_at(13.0, 14.0);
        let da = persistence_image(&a, &params).unwrap();
        let db = persistence_image(&b, &params).unwrap();
        let got = image_l2(&da, &db).unwrap();
        let expected =
            gaussian_l2_closed_form(PlanePoint::new(10.0, 10.0), PlanePoint::new(13.0, 14.0), sigma);
        assert!(
            (got - expected).abs() < 0.02 * expected,
            "{got} vs {expected}"
        );
    }

    #[test]
    fn saturation_at_kernel_ceiling() {
        let sigma = 1.0;
        let params = flat_params(40.0, sigma / 10.0, sigma);
        let a = persistence_image(&atom_at(10.0, 10.0), &params).unwrap();
        let b = persistence_image(&atom_at(25.0, 25.0), &params).unwrap();
        let ceiling = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sigma);
        let got = image_l2(&a, &b).unwrap();
        assert!((got - ceiling).abs() < 0.01 * ceiling, "{got} vs {ceiling}");
    }

    #[test]
    fn closed_form_examples() {
        let p = PlanePoint::new(1.0, 3.0);
        assert_eq!(gaussian_l2_closed_form(p, p, 1.0), 0.0);
        let far = PlanePoint::new(1000.0, 3000.0);
        let lim = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((gaussian_l2_closed_form(p, far, 1.0) - lim).abs() < 1e-12);
        assert!((gaussian_l2_norm(1.0) - 1.0 / (2.0 * std::f64::consts::PI.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn flat_weight_deletion_cost_ignores_persistence() {
        // Distance to the empty image is set by the kernel normalization,
        // independent of the atom's lifetime.
        let sigma = 0.5;
        let params = flat_params(40.0, sigma / 10.0, sigma);
        let empty = persistence_image(&PersistenceMeasure::empty(), &params).unwrap();
        let low = persistence_image(&atom_at(20.0, 5.0), &params).unwrap();
        let high = persistence_image(&atom_at(20.0, 30.0), &params).unwrap();
        let dl = image_l2(&low, &empty).unwrap();
        let dh = image_l2(&high, &empty).unwrap();
        assert!((dl - dh).abs() < 1e-3 * dl);
        assert!((dl - gaussian_l2_norm(sigma)).abs() < 0.01 * dl);
    }

    #[test]
    fn geometry_mismatch_is_rejected() {
        let a = persistence_image(&atom_at(5.0, 5.0), &flat_params(10.0, 0.5, 1.0)).unwrap();
        let b = persistence_image(&atom_at(5.0, 5.0), &flat_params(10.0, 0.25, 1.0)).unwrap();
        assert!(image_l2(&a, &b).is_err());
    }

    #[test]
    fn h0_anchor_only_contributes_under_flat_weight() {
        let params = flat_params(20.0, 0.5, 1.0).with_h0_anchor(2.0);
        let img = persistence_image(&PersistenceMeasure::empty(), &params).unwrap();
        assert!(img.total_mass() > 0.0);
        let arctan = ImageParams::new(
            (0.0, 20.0),
            (0.0, 20.0),
            0.5,
            1.0,
            WeightScheme::ArctanStep { scale: 1.0 },
        )
        .unwrap()
        .with_h0_anchor(2.0);
        let img = persistence_image(&PersistenceMeasure::empty(), &arctan).unwrap();
        assert_eq!(img.total_mass(), 0.0);
    }

    #[test]
    fn invalid_params_are_rejected() {
        assert!(ImageParams::new((0.0, 1.0), (0.0, 1.0), 0.0, 1.0, WeightScheme::Flat).is_err());
        assert!(ImageParams::new((0.0, 1.0), (0.0, 1.0), 0.1, -1.0, WeightScheme::Flat).is_err());
        assert!(ImageParams::new((1.0, 0.0), (0.0, 1.0), 0.1, 1.0, WeightScheme::Flat).is_err());
    }
}
