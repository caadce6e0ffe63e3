//! Where optimal rotations can be: candidate enumeration from the critical
//! points of `φ` and `ψ` and from crossings of mismatch branches, plus
//! certificates checking the necessary optimality conditions.

mod branches;
mod candidates;
mod certify;

use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::function::PeriodicFunction;
use crate::npd::SMOOTH_THRESHOLD;

pub use branches::{
    branch_crossing_candidates, branch_crossing_candidates_with, branch_roots, BranchRoots,
    DEFAULT_BRANCH_TOL,
};
pub use candidates::{critical_pair_candidates, distinct_alphas};
pub use certify::{certify, Certificate, Condition, MaximizerResidual};

pub(crate) use certify::{certify_with, zero_distance_pairs};

/// Products of signs or slopes below this are treated as zero.
pub const SIGN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignCase {
    SameSign,
    OppositeSign,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CandidateSource {
    /// `θ1` critical for `φ`, `θ2` critical for `ψ`, `α = θ2 − θ1`.
    CriticalPair { theta1: Angle, theta2: Angle },
    /// Two roots of `φ'(θ) − ψ'(θ+α)` whose mismatch magnitudes agree.
    BranchCrossing {
        theta1: Angle,
        theta2: Angle,
        theta1_tilde: Angle,
        theta2_tilde: Angle,
        sign_case: SignCase,
        /// A sign or slope product was within [`SIGN_TOL`] of zero, so the
        /// sign condition was taken as satisfied.
        boundary: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateRotation {
    pub alpha: Angle,
    pub source: CandidateSource,
    /// `|φ − ψ|` at the witness.
    pub candidate_value: f64,
}

/// Second derivative of `F` and its determinant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hessian {
    pub matrix: [[f64; 2]; 2],
    pub det: f64,
}

/// `sgn(v)·[[φ''(θ) − ψ''(θ+α), −ψ''(θ+α)], [−ψ''(θ+α), −ψ''(θ+α)]]`.
///
/// The determinant equals `−φ''(θ)·ψ''(θ+α)`; it vanishes at accumulation
/// points of optimal rotations, which forces a degenerate critical point.
pub fn mismatch_hessian(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
    theta: Angle,
    alpha: Angle,
) -> Result<Hessian> {
    let p = phi.jet(theta);
    let q = psi.jet(theta + alpha);
    let v = p[0] - q[0];
    if v.abs() <= SMOOTH_THRESHOLD {
        return Err(Error::NotDifferentiable {
            theta,
            alpha,
            value: v.abs(),
        });
    }
    let s = v.signum();
    let matrix = [[s * (p[2] - q[2]), -s * q[2]], [-s * q[2], -s * q[2]]];
    let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
    Ok(Hessian { matrix, det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{haversine_pair, sine_pair};
    use std::f64::consts::PI;

    #[test]
    fn hessian_haversine_pair() {
        let (phi, psi) = haversine_pair();
        let h = mismatch_hessian(&phi, &psi, Angle::new(PI), Angle::ZERO).unwrap();
        assert_eq!(h.matrix, [[-0.25, -0.5], [-0.5, -0.5]]);
        assert!((h.det + 0.125).abs() < 1e-15);
    }

    #[test]
    fn hessian_sine_pair() {
        let (phi, psi) = sine_pair();
        let h = mismatch_hessian(&phi, &psi, Angle::new(2.0 * PI / 3.0), Angle::ZERO).unwrap();
        assert!((h.det - 1.5).abs() < 1e-14);
    }

    #[test]
    fn hessian_vanishes_with_psi_inflection() {
        // ψ = sin has ψ'' = 0 at 0; φ = 2 keeps F away from zero.
        let (_, psi) = sine_pair();
        let phi = PeriodicFunction::fourier(2.0, vec![0.3], vec![]).unwrap();
        let h = mismatch_hessian(&phi, &psi, Angle::new(0.4), Angle::new(-0.4)).unwrap();
        assert!(h.det.abs() < 1e-15);
    }
}
