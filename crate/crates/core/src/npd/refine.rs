use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::function::PeriodicFunction;
use crate::npd::{SectionScanner, DEFAULT_RESOLUTION};

const MAX_ITERATIONS: usize = 200;

/// Derivative-free local minimization of `g` around `alpha0`.
///
/// Each round samples `g` at 9 equally spaced points of
/// `[center − radius, center + radius]`, moves the center to the best sample
/// (only on strict improvement) and halves the radius, until the radius drops
/// below `tol`. `g` is a maximum of smooth branches, so it has kinks exactly
/// where two maximizers trade places; this scheme needs no slopes.
pub fn refine_minimum(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
    alpha0: Angle,
    radius: f64,
    tol: f64,
) -> Result<(Angle, f64)> {
    let scanner = SectionScanner::new(phi, psi, DEFAULT_RESOLUTION);
    refine_with(&scanner, alpha0, radius, tol)
}

pub(crate) fn refine_with(
    scanner: &SectionScanner<'_>,
    alpha0: Angle,
    radius: f64,
    tol: f64,
) -> Result<(Angle, f64)> {
    if !(radius > 0.0 && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "refinement needs positive radius and tolerance, got {radius} and {tol}"
        )));
    }
    let mut center = alpha0;
    let mut best = scanner.g(center);
    let mut radius = radius;
    let mut sample_min = best;
    for _ in 0..MAX_ITERATIONS {
        if radius < tol {
            return Ok((center, best));
        }
        let mut next = center;
        sample_min = f64::INFINITY;
        for k in -4i32..=4 {
            if k == 0 {
                continue;
            }
            let alpha = center + radius * k as f64 / 4.0;
            let value = scanner.g(alpha);
            sample_min = sample_min.min(value);
            if value < best {
                next = alpha;
                best = value;
            }
        }
        center = next;
        radius *= 0.5;
    }
    Err(Error::NoImprovement {
        alpha: center,
        center_value: best,
        best_value: sample_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::sine_pair;
    use std::f64::consts::PI;

    #[test]
    fn converges_to_kink_minimum() {
        let (phi, psi) = sine_pair();
        let d = 3.0 * 3f64.sqrt() / 4.0;
        let (a, g) = refine_minimum(&phi, &psi, Angle::new(0.01), 0.02, 1e-10).unwrap();
        assert!(a.signed().abs() < 1e-8, "{a}");
        assert!((g - d).abs() < 1e-9);
        let (a, g) = refine_minimum(&phi, &psi, Angle::new(PI / 2.0 + 0.02), 0.04, 1e-10).unwrap();
        assert!(a.close_to(Angle::new(PI / 2.0), 1e-8), "{a}");
        assert!((g - d).abs() < 1e-9);
    }

    #[test]
    fn identical_functions() {
        let (_, psi) = sine_pair();
        let (a, g) = refine_minimum(&psi, &psi, Angle::new(0.1), 0.2, 1e-10).unwrap();
        assert!(a.signed().abs() < 1e-9);
        assert!(g < 1e-9);
    }

    #[test]
    fn rejects_bad_radius() {
        let (phi, psi) = sine_pair();
        assert!(refine_minimum(&phi, &psi, Angle::ZERO, 0.0, 1e-10).is_err());
    }
}
