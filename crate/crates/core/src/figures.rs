//! Data behind the comparison figures: decay of a diagonal offset, deletion
//! cost under diagonal drift, landscape growth along the anti-diagonal, and
//! persistence-image saturation. Each builder returns plain rows; the CLI
//! serializes them as CSV.

use crate::error::Result;
use crate::image::{
    gaussian_l2_closed_form, image_l2, persistence_image, ImageParams, WeightScheme,
};
use crate::landscape::{landscape, landscape_l2, TimeGrid};
use crate::measure::{PersistenceMeasure, PlanePoint};
use crate::sphere::{l2_diff, sample, sup_diff, SphereFunction, SphereGrid};
use crate::transport::pot1;

/// One-point diagrams `p_k = (0,1) + (k,k)` and `q_k = p_k + (1,1)/sqrt(2)`:
/// the sphere discrepancy decays like `1/k` while the transport cost stays
/// constant at the offset.
#[derive(Debug, Clone, Copy)]
pub struct DecayRow {
    pub k: f64,
    pub sup: f64,
    pub l2: f64,
    pub pot: f64,
    /// Uniform upper bound `2 h (1 + sqrt(2) P) / k` (valid for
    /// `k >= |d| + 2h`).
    pub bound: f64,
}

/// Base point of the drift figures.
pub fn drift_base_point() -> PlanePoint {
    PlanePoint::new(0.0, 1.0)
}

/// Offset step of the decay figure along the diagonal, in d-units.
pub fn drift_offset() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2
}

pub fn decay_rows(ks: &[usize], grid: &SphereGrid) -> Result<Vec<DecayRow>> {
    let p = drift_base_point();
    let h = drift_offset();
    let pers = p.persistence();
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let kk = k as f64;
        let mu = PersistenceMeasure::from_points(&[(p.x + kk, p.y + kk)])?;
        let nu = PersistenceMeasure::from_points(&[(p.x + kk + h, p.y + kk + h)])?;
        let fm = sample(&mu, grid);
        let fn_ = sample(&nu, grid);
        rows.push(DecayRow {
            k: kk,
            sup: sup_diff(&fm, &fn_)?,
            l2: l2_diff(&fm, &fn_)?,
            pot: pot1(&mu, &nu)?.cost,
            bound: 2.0 * h * (1.0 + std::f64::consts::SQRT_2 * pers) / kk,
        });
    }
    Ok(rows)
}

/// Deletion cost of `mu_k = delta_{(0,1)+(k,k)}` against the null measure:
/// the sup distance stays pinned at `sqrt(2) * pers` while the L2 average
/// varies mildly, and the transport deletion cost is constant.
#[derive(Debug, Clone, Copy)]
pub struct DeletionRow {
    pub k: f64,
    pub sup: f64,
    pub l2: f64,
    pub pot: f64,
    /// The exact uniform distance `sqrt(2) * pers`.
    pub sup_reference: f64,
}

pub fn deletion_rows(ks: &[usize], grid: &SphereGrid) -> Result<Vec<DeletionRow>> {
    let p = drift_base_point();
    let pers = p.persistence();
    let zero = SphereFunction::zeros(grid);
    let empty = PersistenceMeasure::empty();
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let kk = k as f64;
        let mu = PersistenceMeasure::from_points(&[(p.x + kk, p.y + kk)])?;
        let f = sample(&mu, grid);
        rows.push(DeletionRow {
            k: kk,
            sup: sup_diff(&f, &zero)?,
            l2: l2_diff(&f, &zero)?,
            pot: pot1(&mu, &empty)?.cost,
            sup_reference: std::f64::consts::SQRT_2 * pers,
        });
    }
    Ok(rows)
}

/// Landscape discrepancy between two one-point diagrams drifting together
/// along the anti-diagonal. Both tents keep equal heights `1 + k/sqrt(2)`
/// with centers one apart, so the squared distance is exactly
/// `1 + sqrt(2) k`: the squared curve grows linearly in the drift while the
/// distance itself grows like its square root.
#[derive(Debug, Clone, Copy)]
pub struct PlGrowthRow {
    pub k: f64,
    pub distance: f64,
    pub distance_squared: f64,
}

pub fn pl_growth_rows(ks: &[usize]) -> Result<Vec<PlGrowthRow>> {
    let u = std::f64::consts::FRAC_1_SQRT_2;
    let k_hi = ks.iter().copied().max().unwrap_or(0) as f64;
    // Tents stay inside [-k_hi - 2, k_hi + 6] for the base points below.
    let grid = TimeGrid::new(-(k_hi + 3.0), k_hi + 7.0, 20_001)?;
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let kk = k as f64;
        let a = PersistenceMeasure::from_points(&[(0.0 - kk * u, 2.0 + kk * u)])?;
        let b = PersistenceMeasure::from_points(&[(1.0 - kk * u, 3.0 + kk * u)])?;
        let la = landscape(&a, 1, &grid)?;
        let lb = landscape(&b, 1, &grid)?;
        let distance = landscape_l2(&la, &lb)?;
        rows.push(PlGrowthRow {
            k: kk,
            distance,
            distance_squared: distance * distance,
        });
    }
    Ok(rows)
}

/// Persistence-image distance between two single atoms as their separation
/// grows: saturates at the kernel ceiling `1 / (sqrt(2 pi) sigma)` instead of
/// tracking the transport cost.
#[derive(Debug, Clone, Copy)]
pub struct PiSaturationRow {
    /// Separation of the two atoms on the image plane.
    pub separation: f64,
    pub image_distance: f64,
    pub closed_form: f64,
    pub ceiling: f64,
}

pub fn pi_saturation_rows(sigma: f64, separations: &[f64]) -> Result<Vec<PiSaturationRow>> {
    let sep_hi = separations.iter().cloned().fold(0.0f64, f64::max);
    let margin = 6.0 * sigma;
    let base = margin;
    let extent = base + sep_hi * std::f64::consts::FRAC_1_SQRT_2 + margin;
    let params = ImageParams::new(
        (0.0, extent),
        (0.0, extent),
        sigma / 10.0,
        sigma,
        WeightScheme::Flat,
    )?;
    let ceiling = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sigma);
    // The fixed atom sits at (base, base) on the image plane.
    let fixed = PersistenceMeasure::from_points(&[(base, 2.0 * base)])?;
    let fixed_img = persistence_image(&fixed, &params)?;
    let mut rows = Vec::with_capacity(separations.len());
    for &sep in separations {
        let step = sep * std::f64::consts::FRAC_1_SQRT_2;
        let (b, l) = (base + step, base + step);
        let moving = PersistenceMeasure::from_points(&[(b, b + l)])?;
        let img = persistence_image(&moving, &params)?;
        rows.push(PiSaturationRow {
            separation: sep,
            image_distance: image_l2(&fixed_img, &img)?,
            closed_form: gaussian_l2_closed_form(
                PlanePoint::new(base, base),
                PlanePoint::new(b, l),
                sigma,
            ),
            ceiling,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_rows_satisfy_the_uniform_bound() {
        let grid = SphereGrid::new(40, 80).unwrap();
        let ks: Vec<usize> = (2..=30).collect();
        let rows = decay_rows(&ks, &grid).unwrap();
        for r in &rows {
            assert!(r.sup <= r.bound + 1e-12, "k = {}: {} > {}", r.k, r.sup, r.bound);
            assert!((r.pot - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
        // The measured discrepancy decays.
        assert!(rows.last().unwrap().sup < rows[0].sup);
    }

    #[test]
    fn deletion_rows_are_constant_in_sup() {
        let grid = SphereGrid::new(40, 80).unwrap();
        let rows = deletion_rows(&[1, 10, 100], &grid).unwrap();
        for r in &rows {
            assert!((r.sup - r.sup_reference).abs() < 1e-12);
            assert!((r.pot - 0.5).abs() < 1e-15);
            assert!(r.l2 <= (4.0 * std::f64::consts::PI).sqrt() * r.sup + 1e-9);
        }
    }

    #[test]
    fn pl_growth_squared_curve_is_linear() {
        let ks: Vec<usize> = (0..=10).collect();
        let rows = pl_growth_rows(&ks).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].distance > w[0].distance);
        }
        // Exact closed form of the squared distance for these base points.
        for r in &rows {
            let expected = 1.0 + std::f64::consts::SQRT_2 * r.k;
            assert!(
                (r.distance_squared - expected).abs() < 1e-3 * expected,
                "k = {}: {} vs {}",
                r.k,
                r.distance_squared,
                expected
            );
        }
    }

    #[test]
    fn pi_saturation_approaches_the_ceiling() {
        let sigma = 1.0;
        let seps: Vec<f64> = (0..=14).map(|i| i as f64).collect();
        let rows = pi_saturation_rows(sigma, &seps).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].image_distance >= w[0].image_distance - 1e-12);
        }
        let last = rows.last().unwrap();
        assert!((last.image_distance - last.ceiling).abs() < 0.01 * last.ceiling);
    }
}
