//! The mismatch `F(θ, α) = |φ(θ) − ψ(θ+α)|`, its profile
//! `g(α) = max_θ F(θ, α)`, and the minimization of `g`.

mod compute;
mod oracle;
mod refine;
mod section;

use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::function::PeriodicFunction;

pub use compute::{pseudo_distance, NpdOptions, PseudoDistance};
pub use oracle::{grid_oracle, profile, Bracket, OracleResult};
pub use refine::refine_minimum;
pub use section::{section_max, LocalMax, SectionMax};

pub(crate) use oracle::check_resolution;
pub(crate) use section::SectionScanner;

/// Below this value `F` is treated as non-differentiable.
pub const SMOOTH_THRESHOLD: f64 = 1e-10;
/// Distances below this are handled by critical-point matching.
pub const ZERO_THRESHOLD: f64 = 1e-9;
/// Default `θ` and `α` grid sizes.
pub const DEFAULT_RESOLUTION: usize = 4096;
/// Default stopping radius of the local refinement.
pub const REFINE_TOL: f64 = 1e-10;
/// Seeds closer than this are merged before refinement.
pub const PRE_CLUSTER_TOL: f64 = 1e-4;
/// Refined minimizers closer than this are the same rotation.
pub const POST_CLUSTER_TOL: f64 = 1e-7;

/// `v(θ, α) = φ(θ) − ψ(θ+α)`.
pub fn signed_mismatch(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
    theta: Angle,
    alpha: Angle,
) -> f64 {
    phi.eval(theta) - psi.eval(theta + alpha)
}

/// `F(θ, α) = |φ(θ) − ψ(θ+α)|`.
pub fn mismatch(phi: &PeriodicFunction, psi: &PeriodicFunction, theta: Angle, alpha: Angle) -> f64 {
    signed_mismatch(phi, psi, theta, alpha).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gradient {
    pub d_theta: f64,
    pub d_alpha: f64,
}

impl Gradient {
    /// `max(|∂F/∂θ|, |∂F/∂α|)`.
    pub fn residual(&self) -> f64 {
        self.d_theta.abs().max(self.d_alpha.abs())
    }
}

/// `∇F = sgn(v)·(φ'(θ) − ψ'(θ+α), −ψ'(θ+α))`, defined where `F` exceeds
/// [`SMOOTH_THRESHOLD`].
pub fn mismatch_gradient(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
    theta: Angle,
    alpha: Angle,
) -> Result<Gradient> {
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
    Ok(Gradient {
        d_theta: s * (p[1] - q[1]),
        d_alpha: -s * q[1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{haversine_pair, sine_pair};
    use std::f64::consts::PI;

    #[test]
    fn mismatch_examples() {
        let (phi, psi) = sine_pair();
        let v = mismatch(&phi, &psi, Angle::new(2.0 * PI / 3.0), Angle::ZERO);
        assert!((v - 3.0 * 3f64.sqrt() / 4.0).abs() < 1e-15);
        assert_eq!(mismatch(&psi, &psi, Angle::new(1.234), Angle::ZERO), 0.0);
        let (phi, psi) = haversine_pair();
        // 1/2·sin²(π/2) − sin²(π/2) = −1/2
        assert!((signed_mismatch(&phi, &psi, Angle::new(PI), Angle::ZERO) + 0.5).abs() < 1e-15);
        assert!((mismatch(&phi, &psi, Angle::new(PI), Angle::ZERO) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gradient_examples() {
        let (phi, psi) = haversine_pair();
        let g = mismatch_gradient(&phi, &psi, Angle::new(PI), Angle::ZERO).unwrap();
        assert!(g.d_theta.abs() < 1e-15 && g.d_alpha.abs() < 1e-15);

        let (phi, psi) = sine_pair();
        let g = mismatch_gradient(&phi, &psi, Angle::new(2.0 * PI / 3.0), Angle::ZERO).unwrap();
        assert!(g.d_theta.abs() < 1e-14);
        assert!((g.d_alpha + 0.5).abs() < 1e-14);
        let g = mismatch_gradient(&phi, &psi, Angle::new(4.0 * PI / 3.0), Angle::ZERO).unwrap();
        assert!(g.d_theta.abs() < 1e-14);
        assert!((g.d_alpha - 0.5).abs() < 1e-14);
    }

    #[test]
    fn gradient_undefined_at_zero() {
        let (_, psi) = sine_pair();
        let e = mismatch_gradient(&psi, &psi, Angle::new(0.3), Angle::ZERO).unwrap_err();
        assert!(matches!(e, Error::NotDifferentiable { .. }));
    }
}
