use serde::{Deserialize, Serialize};

use crate::angle::{dedup_sorted, Angle};
use crate::critical::{critical_points, MORSE_TOL};
use crate::error::{Error, Result};
use crate::function::{golden_max, PeriodicFunction};
use crate::localization::mismatch_hessian;
use crate::npd::{
    mismatch_gradient, Gradient, SectionScanner, DEFAULT_RESOLUTION, POST_CLUSTER_TOL,
    ZERO_THRESHOLD,
};

/// Critical points of `φ` and `ψ` must line up within this in the zero regime.
const MATCH_TOL: f64 = 1e-6;

/// One near-maximizer of the section at the certified rotation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximizerResidual {
    pub theta: Angle,
    pub value: f64,
    /// `∇F` at `(theta, alpha)`; absent where `F` is not differentiable.
    pub gradient: Option<Gradient>,
}

/// The necessary optimality condition a rotation satisfies, if any.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Condition {
    /// The single maximizer is a critical point of `F`.
    CriticalPointOfF {
        theta: Angle,
        grad_residual: f64,
    },
    /// Two maximizers whose `∂F/∂α` have opposite signs.
    OppositeSigns {
        theta1: Angle,
        theta2: Angle,
        slope1: f64,
        slope2: f64,
    },
    /// Zero distance: `ψ∘ρ_α` maps every critical point of `φ` onto one of
    /// `ψ`. Each pair is `(c, c + α)`.
    ZeroDistanceMatch {
        pairs: Vec<(Angle, Angle)>,
    },
    Uncertified {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub alpha: Angle,
    pub condition: Condition,
    pub residuals: Vec<MaximizerResidual>,
    /// Hessian determinant of `F` at the certifying maximizer.
    pub hessian_det: Option<f64>,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        !matches!(self.condition, Condition::Uncertified { .. })
    }
}

/// Checks that `alpha` satisfies a necessary condition for realizing the
/// distance `claimed_d`.
///
/// With a single maximizer `θ` the gradient of `F` must vanish at
/// `(θ, α)`. With several, two of them must pull `F` in opposite directions
/// along `α`; failing that, any maximizer that is a critical point of `F`
/// will do. A rotation passing none of these checks is not optimal.
pub fn certify(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
    alpha: Angle,
    claimed_d: f64,
    tol: f64,
) -> Result<Certificate> {
    let scanner = SectionScanner::new(phi, psi, DEFAULT_RESOLUTION);
    certify_with(&scanner, alpha, claimed_d, tol)
}

pub(crate) fn certify_with(
    scanner: &SectionScanner<'_>,
    alpha: Angle,
    claimed_d: f64,
    tol: f64,
) -> Result<Certificate> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "certificate tolerance must be positive, got {tol}"
        )));
    }
    let (phi, psi) = (scanner.phi, scanner.psi);
    let section = scanner.scan(alpha);
    if (claimed_d - section.g_value).abs() > tol {
        return Err(Error::ValueMismatch {
            alpha,
            claimed: claimed_d,
            actual: section.g_value,
        });
    }

    if claimed_d < ZERO_THRESHOLD {
        let residuals = section
            .argmax_set
            .iter()
            .map(|&theta| residual(phi, psi, theta, alpha))
            .collect();
        let condition = match zero_distance_pairs(phi, psi, alpha) {
            Some(pairs) => Condition::ZeroDistanceMatch { pairs },
            None => Condition::Uncertified {
                reason: "critical points do not match under the rotation".into(),
            },
        };
        return Ok(Certificate {
            alpha,
            condition,
            residuals,
            hessian_det: None,
        });
    }

    let thetas = if section.flat {
        // every θ maximizes; ∂F/∂α vanishes where ψ∘ρ_α is critical
        vec![psi_critical_point(psi) - alpha]
    } else {
        let mut near = section.near_maximizers(tol);
        near.sort_by(|a, b| b.value.total_cmp(&a.value));
        let mut t = dedup_sorted(near.iter().map(|m| m.theta).collect(), POST_CLUSTER_TOL);
        t.sort_by(|a, b| a.radians().total_cmp(&b.radians()));
        t
    };
    let residuals: Vec<MaximizerResidual> = thetas
        .iter()
        .map(|&t| residual(phi, psi, t, alpha))
        .collect();

    let critical = |r: &MaximizerResidual| r.gradient.map(|g| g.residual()).filter(|&x| x <= tol);
    let mut condition = None;
    if residuals.len() == 1 {
        if let Some(x) = critical(&residuals[0]) {
            condition = Some((
                residuals[0].theta,
                Condition::CriticalPointOfF {
                    theta: residuals[0].theta,
                    grad_residual: x,
                },
            ));
        }
    } else {
        condition = opposite_signs(&residuals, tol);
    }
    if condition.is_none() {
        condition = residuals.iter().find_map(|r| {
            critical(r).map(|x| {
                (
                    r.theta,
                    Condition::CriticalPointOfF {
                        theta: r.theta,
                        grad_residual: x,
                    },
                )
            })
        });
    }

    let (condition, hessian_det) = match condition {
        Some((theta, c)) => (
            c,
            mismatch_hessian(phi, psi, theta, alpha).ok().map(|h| h.det),
        ),
        None => (
            Condition::Uncertified {
                reason: format!(
                    "{} maximizer(s); no critical point of F and no opposite α-slopes",
                    residuals.len()
                ),
            },
            None,
        ),
    };
    Ok(Certificate {
        alpha,
        condition,
        residuals,
        hessian_det,
    })
}

fn residual(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
    theta: Angle,
    alpha: Angle,
) -> MaximizerResidual {
    MaximizerResidual {
        theta,
        value: crate::npd::mismatch(phi, psi, theta, alpha),
        gradient: mismatch_gradient(phi, psi, theta, alpha).ok(),
    }
}

/// The steepest negative and positive `∂F/∂α` among maximizers that are
/// critical in `θ`, reported in `θ` order.
fn opposite_signs(residuals: &[MaximizerResidual], tol: f64) -> Option<(Angle, Condition)> {
    let slopes: Vec<(Angle, f64)> = residuals
        .iter()
        .filter_map(|r| r.gradient.map(|g| (r.theta, g)))
        .filter(|(_, g)| g.d_theta.abs() <= tol && g.d_alpha.abs() > tol)
        .map(|(t, g)| (t, g.d_alpha))
        .collect();
    let lo = slopes.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1))?;
    let hi = slopes.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1))?;
    if !(lo.1 < 0.0 && hi.1 > 0.0) {
        return None;
    }
    let (first, second) = if lo.0.radians() <= hi.0.radians() {
        (lo, hi)
    } else {
        (hi, lo)
    };
    Some((
        first.0,
        Condition::OppositeSigns {
            theta1: first.0,
            theta2: second.0,
            slope1: first.1,
            slope2: second.1,
        },
    ))
}

/// Pairs `(c, c + α)` matching every critical point of `φ` with one of `ψ`,
/// or `None` if some critical point has no partner.
pub(crate) fn zero_distance_pairs(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
    alpha: Angle,
) -> Option<Vec<(Angle, Angle)>> {
    let cp = critical_points(phi, MORSE_TOL).ok()?;
    let cq = critical_points(psi, MORSE_TOL).ok()?;
    if cp.len() != cq.len() {
        return None;
    }
    let mut pairs = Vec::with_capacity(cp.len());
    for c in &cp {
        let target = c.theta + alpha;
        let partner = cq
            .iter()
            .filter(|q| q.theta.close_to(target, MATCH_TOL) && q.kind == c.kind)
            .min_by(|a, b| {
                a.theta
                    .distance(target)
                    .total_cmp(&b.theta.distance(target))
            })?;
        pairs.push((c.theta, partner.theta));
    }
    Some(pairs)
}

/// The maximizer of `ψ`.
fn psi_critical_point(psi: &PeriodicFunction) -> Angle {
    let n = 1024;
    let h = std::f64::consts::TAU / n as f64;
    let best = (0..n)
        .map(|i| (i, psi.eval(Angle::grid(i, n))))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let t = best as f64 * h;
    Angle::new(golden_max(|x| psi.eval(Angle::new(x)), t - h, t + h).0)
}
