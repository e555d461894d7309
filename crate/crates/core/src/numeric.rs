//! Small numeric helpers shared across modules.

/// `max(0, t)`, with `relu(0) = 0`.
#[inline]
pub fn relu(t: f64) -> f64 {
    if t > 0.0 {
        t
    } else {
        0.0
    }
}

/// Positive part `(t)_+`, an alias of [`relu`] used where the hinge reading
/// is the natural one.
#[inline]
pub fn pos(t: f64) -> f64 {
    relu(t)
}

/// Pairwise (cascade) summation over a slice.
///
/// The reduction tree is a function of the slice layout only, so the result
/// is independent of any parallel schedule that produced the slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Format a float with 17 significant digits, enough for exact f64 round-trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relu_at_zero_is_zero() {
        assert_eq!(relu(0.0), 0.0);
        assert_eq!(relu(-1.5), 0.0);
        assert_eq!(relu(2.5), 2.5);
    }

    #[test]
    fn pairwise_sum_matches_sequential_on_small_input() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64) * 0.1).collect();
        let seq: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - seq).abs() < 1e-9);
    }

    #[test]
    fn fmt_round_trips_exactly() {
        for &x in &[0.1, std::f64::consts::PI, 1e-300, -3.75, 123456.789] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
