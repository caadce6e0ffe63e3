use thiserror::Error;

use crate::angle::Angle;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A root of the derivative with vanishing second derivative, or a
    /// derivative that vanishes identically.
    #[error("degenerate critical point near θ = {theta} (|f''| = {second_derivative:e})")]
    DegenerateRoot {
        theta: Angle,
        second_derivative: f64,
    },

    #[error("mismatch is not differentiable at (θ = {theta}, α = {alpha}): |φ - ψ∘ρ| = {value:e}")]
    NotDifferentiable {
        theta: Angle,
        alpha: Angle,
        value: f64,
    },

    #[error("local refinement around α = {alpha} did not settle (center {center_value}, best sample {best_value})")]
    NoImprovement {
        alpha: Angle,
        center_value: f64,
        best_value: f64,
    },

    #[error("{which} is not a Morse function ({count} degenerate critical point(s))")]
    NotMorse { which: &'static str, count: usize },

    #[error("refined distance {distance} falls outside the oracle bracket [{lower}, {upper}]")]
    InconsistentOracle {
        distance: f64,
        lower: f64,
        upper: f64,
    },

    #[error(
        "branch tracking unstable: root count changed twice within {window} steps near α = {alpha}"
    )]
    BranchTrackingUnstable { alpha: Angle, window: usize },

    #[error("claimed distance {claimed} differs from the profile value {actual} at α = {alpha}")]
    ValueMismatch {
        alpha: Angle,
        claimed: f64,
        actual: f64,
    },

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
