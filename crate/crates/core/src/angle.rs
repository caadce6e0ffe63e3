use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point of the circle, stored as its canonical representative in `[0, 2π)`.
///
/// The same type is used for positions `θ` and for rotations `α`: the rotation
/// `θ ↦ θ + α` is fully determined by its angle. Arithmetic wraps modulo `2π`.
///
/// Equality of angles is a tolerance question, so `Angle` deliberately offers
/// [`Angle::distance`] and [`Angle::close_to`] instead of a fuzzy `PartialEq`.
/// The derived `PartialEq` compares the canonical representatives bitwise.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    /// Wraps an arbitrary real number of radians into `[0, 2π)`.
    pub fn new(radians: f64) -> Self {
        Angle(wrap(radians))
    }

    /// The `index`-th point of the uniform `n`-point grid `2π·index/n`.
    pub fn grid(index: usize, n: usize) -> Self {
        Angle::new(TAU * (index % n) as f64 / n as f64)
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }

    /// The signed representative in `(-π, π]`.
    pub fn signed(self) -> f64 {
        if self.0 > PI {
            self.0 - TAU
        } else {
            self.0
        }
    }

    /// Geodesic distance on the circle, in `[0, π]`.
    pub fn distance(self, other: Angle) -> f64 {
        let d = (self.0 - other.0).abs();
        d.min(TAU - d)
    }

    pub fn close_to(self, other: Angle, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// Signed offset `other - self` taken in `(-π, π]`.
    pub fn offset_to(self, other: Angle) -> f64 {
        (other - self).signed()
    }
}

/// Reduces radians into `[0, 2π)`.
///
/// `rem_euclid` can round up to exactly `2π` for tiny negative inputs, which is
/// folded back to zero.
#[inline]
pub(crate) fn wrap(radians: f64) -> f64 {
    let r = radians.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle::new(self.0 + rhs.0)
    }
}

impl Add<f64> for Angle {
    type Output = Angle;
    fn add(self, rhs: f64) -> Angle {
        Angle::new(self.0 + rhs)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        Angle::new(self.0 - rhs.0)
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::new(-self.0)
    }
}

impl From<f64> for Angle {
    fn from(radians: f64) -> Self {
        Angle::new(radians)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sorts angles and merges members closer than `tol` (cyclically), keeping
/// the first of each run.
pub(crate) fn dedup_sorted(mut angles: Vec<Angle>, tol: f64) -> Vec<Angle> {
    angles.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<Angle> = Vec::with_capacity(angles.len());
    for a in angles {
        if out.last().is_some_and(|l| l.close_to(a, tol)) {
            continue;
        }
        out.push(a);
    }
    if out.len() > 1 && out[0].close_to(out[out.len() - 1], tol) {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wraps_into_canonical_range() {
        assert_eq!(Angle::new(TAU).radians(), 0.0);
        assert_eq!(Angle::new(-1e-300).radians(), 0.0);
        assert!((Angle::new(-PI / 2.0).radians() - 1.5 * PI).abs() < 1e-15);
        assert!((Angle::new(5.0 * PI).radians() - PI).abs() < 1e-14);
    }

    #[test]
    fn cyclic_distance() {
        let a = Angle::new(0.1);
        let b = Angle::new(TAU - 0.1);
        assert!((a.distance(b) - 0.2).abs() < 1e-15);
        assert!((a.offset_to(b) + 0.2).abs() < 1e-15);
        assert!(a.close_to(b, 0.21));
        assert!(!a.close_to(b, 0.19));
    }

    #[test]
    fn dedup_merges_across_zero() {
        let v = vec![Angle::new(1e-9), Angle::new(1.0), Angle::new(TAU - 1e-9)];
        let d = dedup_sorted(v, 1e-7);
        assert_eq!(d.len(), 2);
    }
}
