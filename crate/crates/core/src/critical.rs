//! Critical points and the Morse test.

use serde::{Deserialize, Serialize};

use crate::angle::{dedup_sorted, Angle};
use crate::error::{Error, Result};
use crate::function::{Grid, PeriodicFunction};
use crate::roots::{scan_roots, Multiplicity, RootSet};

/// Default number of scan samples for derivative roots.
pub const DEFAULT_SCAN_SAMPLES: usize = 4096;
/// Default threshold on `|f''|` at a critical point.
pub const MORSE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremum {
    Max,
    Min,
    /// Vanishing second derivative; only ever reported as a Morse witness.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub theta: Angle,
    pub value: f64,
    pub second_derivative: f64,
    pub kind: Extremum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorseReport {
    pub morse: bool,
    pub witnesses: Vec<CriticalPoint>,
}

/// All critical points of `f`, sorted by angle.
///
/// `tol` is both the bisection width and the threshold below which `|f''|`
/// makes a critical point degenerate. Fails with [`Error::DegenerateRoot`]
/// on the first degenerate point, including `f' ≡ 0`.
pub fn critical_points(f: &PeriodicFunction, tol: f64) -> Result<Vec<CriticalPoint>> {
    critical_points_with(f, tol, DEFAULT_SCAN_SAMPLES)
}

pub fn critical_points_with(
    f: &PeriodicFunction,
    tol: f64,
    samples: usize,
) -> Result<Vec<CriticalPoint>> {
    let points = scan_critical(f, tol, samples)?;
    if let Some(bad) = points.iter().find(|c| c.kind == Extremum::Degenerate) {
        return Err(Error::DegenerateRoot {
            theta: bad.theta,
            second_derivative: bad.second_derivative,
        });
    }
    Ok(points)
}

/// Morse test: every critical point must have `|f''| > tol`.
pub fn is_morse(f: &PeriodicFunction, tol: f64) -> MorseReport {
    match scan_critical(f, tol, DEFAULT_SCAN_SAMPLES) {
        Ok(points) => {
            let witnesses: Vec<_> = points
                .into_iter()
                .filter(|c| c.kind == Extremum::Degenerate)
                .collect();
            MorseReport {
                morse: witnesses.is_empty(),
                witnesses,
            }
        }
        Err(Error::DegenerateRoot {
            theta,
            second_derivative,
        }) => MorseReport {
            morse: false,
            witnesses: vec![CriticalPoint {
                theta,
                value: f.eval(theta),
                second_derivative,
                kind: Extremum::Degenerate,
            }],
        },
        Err(other) => unreachable!("critical scan only reports degeneracy: {other}"),
    }
}

/// Critical points with degenerate ones flagged rather than rejected. Errors
/// only when `f'` vanishes at every sample.
fn scan_critical(f: &PeriodicFunction, tol: f64, samples: usize) -> Result<Vec<CriticalPoint>> {
    let grid = Grid::new(samples);
    let mut d1 = vec![0.0; samples];
    grid.sample(f, 0.0, 1, &mut d1);
    let jet = |t: f64| {
        let j = f.jet(Angle::new(t));
        [j[1], j[2]]
    };
    let roots = match scan_roots(&d1, jet, tol) {
        RootSet::Flat => {
            return Err(Error::DegenerateRoot {
                theta: Angle::ZERO,
                second_derivative: f.deriv(Angle::ZERO, 2),
            })
        }
        RootSet::Roots(r) => r,
    };
    let mut tangent = Vec::new();
    let mut simple = Vec::new();
    for r in roots {
        match r.multiplicity {
            Multiplicity::Double => tangent.push(r.theta),
            Multiplicity::Simple => simple.push(r.theta),
        }
    }
    let mut points: Vec<CriticalPoint> = dedup_sorted(simple, tol)
        .into_iter()
        .map(|theta| classify(f, theta, tol, false))
        .chain(
            tangent
                .into_iter()
                .map(|theta| classify(f, theta, tol, true)),
        )
        .collect();
    points.sort_by(|a, b| a.theta.radians().total_cmp(&b.theta.radians()));
    Ok(points)
}

fn classify(f: &PeriodicFunction, theta: Angle, tol: f64, tangent: bool) -> CriticalPoint {
    let [value, _, second_derivative] = f.jet(theta);
    let kind = if tangent || second_derivative.abs() <= tol {
        Extremum::Degenerate
    } else if second_derivative < 0.0 {
        Extremum::Max
    } else {
        Extremum::Min
    };
    CriticalPoint {
        theta,
        value,
        second_derivative,
        kind,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sin() -> PeriodicFunction {
        PeriodicFunction::fourier(0.0, vec![], vec![1.0]).unwrap()
    }

    #[test]
    fn critical_points_of_sin() {
        let c = critical_points(&sin(), 1e-10).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c[0].theta.close_to(Angle::new(PI / 2.0), 1e-12));
        assert_eq!(c[0].kind, Extremum::Max);
        assert!((c[0].value - 1.0).abs() < 1e-15);
        assert!((c[0].second_derivative + 1.0).abs() < 1e-12);
        assert!(c[1].theta.close_to(Angle::new(1.5 * PI), 1e-12));
        assert_eq!(c[1].kind, Extremum::Min);
        assert!((c[1].value + 1.0).abs() < 1e-15);
    }

    #[test]
    fn critical_points_of_half_sin_two_theta() {
        let f = PeriodicFunction::fourier(0.0, vec![], vec![0.0, 0.5]).unwrap();
        let c = critical_points(&f, 1e-10).unwrap();
        // Roots of cos 2θ, cross-checked by brute force over a fine grid.
        let brute: Vec<f64> = (0..100_000)
            // offset so no sample lands on a root
            .map(|i| (i as f64 + 0.37) * std::f64::consts::TAU / 100_000.0)
            .filter(|t| {
                let h = std::f64::consts::TAU / 100_000.0;
                (2.0 * t).cos() * (2.0 * (t + h)).cos() <= 0.0
            })
            .collect();
        assert_eq!(brute.len(), 4);
        assert_eq!(c.len(), 4);
        for (k, cp) in c.iter().enumerate() {
            assert!((cp.theta.radians() - brute[k]).abs() < 1e-4);
            let expected = (2 * k + 1) as f64 * PI / 4.0;
            assert!(cp.theta.close_to(Angle::new(expected), 1e-12));
            let v = if k % 2 == 0 { 0.5 } else { -0.5 };
            assert!((cp.value - v).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_is_degenerate() {
        let f = PeriodicFunction::fourier(0.0, vec![], vec![]).unwrap();
        assert!(matches!(
            critical_points(&f, 1e-10),
            Err(Error::DegenerateRoot { .. })
        ));
        assert!(!is_morse(&f, MORSE_TOL).morse);
    }

    #[test]
    fn morse_checks() {
        assert!(is_morse(&sin(), MORSE_TOL).morse);
        // sin²θ = 1/2 - cos 2θ / 2
        let sin_sq = PeriodicFunction::fourier(0.5, vec![0.0, -0.5], vec![]).unwrap();
        let r = is_morse(&sin_sq, MORSE_TOL);
        assert!(r.morse);
        assert_eq!(critical_points(&sin_sq, 1e-10).unwrap().len(), 4);
        // sin³θ = (3 sin θ - sin 3θ)/4 has f' = f'' = 0 at 0 and π.
        let sin_cubed = PeriodicFunction::fourier(0.0, vec![], vec![0.75, 0.0, -0.25]).unwrap();
        let r = is_morse(&sin_cubed, MORSE_TOL);
        assert!(!r.morse);
        assert_eq!(r.witnesses.len(), 2);
        assert!(r
            .witnesses
            .iter()
            .any(|w| w.theta.close_to(Angle::ZERO, 1e-6)));
        assert!(r
            .witnesses
            .iter()
            .any(|w| w.theta.close_to(Angle::new(PI), 1e-6)));
        assert!(critical_points(&sin_cubed, 1e-10).is_err());
    }
}
