use crate::error::{Error, Result};

/// `h_b(q) = −q log2 q − (1−q) log2 (1−q)`, with `h_b(0) = h_b(1) = 0`.
pub fn binary_entropy(q: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    let q = q.clamp(0.0, 1.0);
    term(q) + term(1.0 - q)
}

/// The unique `q ∈ [0, 1/2]` with `h_b(q) = delta`, by bisection.
///
/// Inputs within `1e-12` outside `[0, 1]` are clamped to absorb rounding in
/// oracle values; anything further out is a domain error.
pub fn binary_entropy_inverse(delta: f64) -> Result<f64> {
    if !delta.is_finite() || !(-1e-12..=1.0 + 1e-12).contains(&delta) {
        return Err(Error::domain(format!("binary entropy value {delta} outside [0, 1]")));
    }
    let delta = delta.clamp(0.0, 1.0);
    if delta == 0.0 {
        return Ok(0.0);
    }
    if delta == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if binary_entropy(mid) < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_symmetry() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert_eq!(binary_entropy_inverse(1.0).unwrap(), 0.5);
        assert_eq!(binary_entropy_inverse(0.0).unwrap(), 0.0);
    }

    #[test]
    fn quarter() {
        let want = 2.0 - 0.75 * 3f64.log2();
        assert!((binary_entropy(0.25) - want).abs() < 1e-15);
        assert!((want - 0.811278).abs() < 1e-6);
        assert!((binary_entropy_inverse(want).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        assert!(binary_entropy_inverse(1.5).is_err());
        assert!(binary_entropy_inverse(-0.1).is_err());
        assert!(binary_entropy_inverse(f64::NAN).is_err());
    }
}
