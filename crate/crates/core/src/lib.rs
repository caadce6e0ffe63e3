//! Natural pseudo-distance between `2π`-periodic Morse functions under
//! rotations of the circle.
//!
//! For two functions `φ, ψ: S¹ → ℝ` the distance is
//!
//! ```text
//! d(φ, ψ) = min over α of  max over θ of  |φ(θ) − ψ(θ + α)|
//! ```
//!
//! and a rotation attaining the minimum is *optimal*. [`pseudo_distance`]
//! returns the value, a rigorous bracket around it, every optimal rotation
//! and a certificate per rotation recording which necessary optimality
//! condition it satisfies.
//!
//! ```
//! use circle_npd::{pseudo_distance, NpdOptions, PeriodicFunction};
//!
//! // φ = ½ sin 2θ, ψ = sin θ
//! let phi = PeriodicFunction::fourier(0.0, vec![], vec![0.0, 0.5])?;
//! let psi = PeriodicFunction::fourier(0.0, vec![], vec![1.0])?;
//! let r = pseudo_distance(&phi, &psi, &NpdOptions::default())?;
//!
//! assert!((r.distance - 3.0 * 3f64.sqrt() / 4.0).abs() < 1e-9);
//! assert_eq!(r.optimal_alphas.len(), 4);
//! assert!(r.certificates.iter().all(|c| c.is_certified()));
//! # Ok::<(), circle_npd::Error>(())
//! ```
//!
//! The pieces are usable on their own: [`section_max`] evaluates the profile
//! `g(α)`, [`grid_oracle`] brackets its minimum, the candidate enumerators
//! in [`localization`] list the rotations where optima can sit, and
//! [`certify`] checks a claimed optimum.

mod angle;
mod critical;
mod error;
pub mod function;
pub mod localization;
pub mod npd;
mod roots;
pub mod spec;

pub use angle::Angle;
pub use critical::{
    critical_points, critical_points_with, is_morse, CriticalPoint, Extremum, MorseReport,
    MORSE_TOL,
};
pub use error::{Error, Result};
pub use function::PeriodicFunction;
pub use localization::{certify, Certificate, Condition};
pub use npd::{grid_oracle, pseudo_distance, section_max, Bracket, NpdOptions, PseudoDistance};
pub use spec::FunctionSpec;


#[cfg(doctest)]
mod booktest {
    macro_rules! booktest {
        ($i:ident) => {
            #[doc = include_str!(concat!("../../../book/src/", stringify!($i), ".md"))]
            mod $i {}
        };
    }
    booktest!(introduction);
    booktest!(functions);
    booktest!(profile);
    booktest!(optimal_rotations);
    booktest!(certificates);
}
