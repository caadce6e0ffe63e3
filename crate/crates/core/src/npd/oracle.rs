use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::function::PeriodicFunction;
use crate::npd::SectionScanner;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        self.lower - slack <= x && x <= self.upper + slack
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub bracket: Bracket,
    /// Grid rotations whose grid maximum is within the bracket width of the
    /// smallest one.
    pub argmin_cells: Vec<Angle>,
    /// `G_j`: grid maximum of `F(·, α_j)` for every `α_j = 2πj/n_alpha`.
    #[serde(skip)]
    pub grid_max: Vec<f64>,
    /// Refined `g(α)` at each argmin cell, aligned with `argmin_cells`.
    #[serde(skip)]
    pub refined: Vec<f64>,
    /// Indices of `argmin_cells` in the `α` grid.
    #[serde(skip)]
    pub cell_indices: Vec<usize>,
    pub n_alpha: usize,
    pub n_theta: usize,
}

/// Brackets the distance from an `n_alpha × n_theta` evaluation of `F`.
///
/// Each grid maximum `G_j` under-estimates `g(α_j)` by at most
/// `(L(φ)+L(ψ))·π/n_theta`, and `g` is `L(ψ)`-Lipschitz in `α`, so
/// `min_j G_j − (L(φ)+L(ψ))·π/n_theta − L(ψ)·π/n_alpha`, clamped at zero, is
/// a lower bound.
/// The upper bound is the smallest refined `g(α_j)` over the argmin cells,
/// which is an attained value.
pub fn grid_oracle(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
    n_alpha: usize,
    n_theta: usize,
) -> Result<OracleResult> {
    check_resolution(n_alpha, "n_alpha")?;
    check_resolution(n_theta, "n_theta")?;
    let scanner = SectionScanner::new(phi, psi, n_theta);
    Ok(run_oracle(&scanner, n_alpha))
}

/// `g(α_j)` at every `α_j = 2πj/n_alpha`, each refined from an `n_theta`
/// scan.
pub fn profile(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
    n_alpha: usize,
    n_theta: usize,
) -> Result<Vec<(Angle, f64)>> {
    check_resolution(n_alpha, "n_alpha")?;
    check_resolution(n_theta, "n_theta")?;
    let scanner = SectionScanner::new(phi, psi, n_theta);
    Ok((0..n_alpha)
        .into_par_iter()
        .map(|j| {
            let a = Angle::grid(j, n_alpha);
            (a, scanner.g(a))
        })
        .collect())
}

pub(crate) fn check_resolution(n: usize, name: &str) -> Result<()> {
    if n < 64 {
        return Err(Error::InvalidArgument(format!(
            "{name} must be at least 64, got {n}"
        )));
    }
    Ok(())
}

pub(crate) fn run_oracle(scanner: &SectionScanner<'_>, n_alpha: usize) -> OracleResult {
    let n_theta = scanner.n_theta();
    let grid_max: Vec<f64> = (0..n_alpha)
        .into_par_iter()
        .map(|j| scanner.grid_max(Angle::grid(j, n_alpha)))
        .collect();

    let (best_j, min_g) =
        grid_max
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |(bj, bg), (j, g)| if g < bg { (j, g) } else { (bj, bg) },
            );

    let lip_phi = scanner.phi.lipschitz_bound();
    let lip_psi = scanner.psi.lipschitz_bound();
    let slack = (lip_phi + lip_psi) * PI / n_theta as f64 + lip_psi * PI / n_alpha as f64;
    // distances are never negative
    let lower = (min_g - slack).max(0.0);
    let first_upper = scanner.g(Angle::grid(best_j, n_alpha));
    // unclamped, so every cell that may hold the minimizer is kept
    let width = first_upper - (min_g - slack);

    let cell_indices: Vec<usize> = (0..n_alpha)
        .filter(|&j| grid_max[j] <= min_g + width)
        .collect();
    let refined: Vec<f64> = cell_indices
        .par_iter()
        .map(|&j| {
            if j == best_j {
                first_upper
            } else {
                scanner.g(Angle::grid(j, n_alpha))
            }
        })
        .collect();
    let upper = refined.iter().copied().fold(first_upper, f64::min);

    OracleResult {
        bracket: Bracket { lower, upper },
        argmin_cells: cell_indices
            .iter()
            .map(|&j| Angle::grid(j, n_alpha))
            .collect(),
        grid_max,
        refined,
        cell_indices,
        n_alpha,
        n_theta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{haversine_pair, sine_pair};

    #[test]
    fn identical_functions() {
        let (_, psi) = sine_pair();
        let r = grid_oracle(&psi, &psi, 256, 256).unwrap();
        assert_eq!(r.bracket.upper, 0.0);
        assert!(r.bracket.contains(0.0, 0.0));
        assert!(r.argmin_cells.contains(&Angle::ZERO));
    }

    #[test]
    fn brackets_known_values() {
        let (phi, psi) = sine_pair();
        let r = grid_oracle(&phi, &psi, 4096, 4096).unwrap();
        let d = 3.0 * 3f64.sqrt() / 4.0;
        assert!(r.bracket.contains(d, 0.0), "{:?}", r.bracket);
        // (1+1)π/4096 + π/4096
        assert!(r.bracket.width() < 0.01);
        assert!(r.bracket.width() <= 3.0 * PI / 4096.0 + 1e-6);

        let (phi, psi) = haversine_pair();
        let r = grid_oracle(&phi, &psi, 512, 512).unwrap();
        assert!(r.bracket.contains(0.5, 0.0), "{:?}", r.bracket);
    }

    #[test]
    fn profile_at_quarter_turns() {
        let (phi, psi) = sine_pair();
        let p = profile(&phi, &psi, 256, 1024).unwrap();
        assert_eq!(p.len(), 256);
        assert!((p[0].1 - 3.0 * 3f64.sqrt() / 4.0).abs() < 1e-12);
        assert!((p[32].1 - 1.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_coarse_grids() {
        let (phi, psi) = sine_pair();
        assert!(grid_oracle(&phi, &psi, 32, 4096).is_err());
    }
}
