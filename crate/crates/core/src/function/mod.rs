//! Periodic C² functions on the circle.

mod spline;
mod trig;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::angle::Angle;

pub use spline::{PeriodicSpline, SPLINE_LIPSCHITZ_SAFETY};
pub use trig::TrigPolynomial;

/// A `2π`-periodic C² real function with exact first and second derivatives.
///
/// Every evaluation first reduces its argument to `[0, 2π)`, so `f(θ + 2π)`
/// and `f(θ)` are computed from the same canonical angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PeriodicFunction {
    Trig(TrigPolynomial),
    Spline(PeriodicSpline),
}

impl PeriodicFunction {
    /// `a0 + Σ cos[k-1]·cos kθ + sin[k-1]·sin kθ`.
    pub fn fourier(a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> crate::Result<Self> {
        TrigPolynomial::new(a0, cos, sin).map(PeriodicFunction::Trig)
    }

    /// Periodic cubic spline through samples at `2πj/M`.
    pub fn samples(values: Vec<f64>) -> crate::Result<Self> {
        PeriodicSpline::new(values).map(PeriodicFunction::Spline)
    }

    pub fn eval(&self, theta: Angle) -> f64 {
        self.jet(theta)[0]
    }

    /// Derivative of order 1 or 2.
    ///
    /// # Panics
    ///
    /// On any other order.
    pub fn deriv(&self, theta: Angle, order: u8) -> f64 {
        match order {
            1 => self.jet(theta)[1],
            2 => self.jet(theta)[2],
            _ => panic!("derivative order must be 1 or 2, got {order}"),
        }
    }

    /// `[f, f', f'']` at `theta`.
    pub fn jet(&self, theta: Angle) -> [f64; 3] {
        match self {
            PeriodicFunction::Trig(p) => p.jet(theta.radians()),
            PeriodicFunction::Spline(s) => s.jet(theta.radians()),
        }
    }

    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            PeriodicFunction::Trig(p) => p.lipschitz_bound(),
            PeriodicFunction::Spline(s) => s.lipschitz_bound(),
        }
    }

    /// `c·f`.
    pub fn scaled(&self, factor: f64) -> PeriodicFunction {
        match self {
            PeriodicFunction::Trig(p) => PeriodicFunction::Trig(p.scaled(factor)),
            PeriodicFunction::Spline(s) => PeriodicFunction::Spline(s.scaled(factor)),
        }
    }

    /// Largest and smallest values over the uniform `n`-grid, refined at the
    /// extreme samples by golden-section search.
    pub fn extrema(&self, n: usize) -> (f64, f64) {
        let grid = Grid::new(n);
        let mut vals = vec![0.0; n];
        grid.sample(self, 0.0, 0, &mut vals);
        let step = TAU / n as f64;
        let (imax, imin) = vals.iter().enumerate().fold((0, 0), |(a, b), (i, v)| {
            (
                if *v > vals[a] { i } else { a },
                if *v < vals[b] { i } else { b },
            )
        });
        let refine = |i: usize, sign: f64| {
            let center = i as f64 * step;
            let (_, best) = golden_max(
                |t| sign * self.eval(Angle::new(t)),
                center - step,
                center + step,
            );
            sign * best.max(sign * vals[i])
        };
        (refine(imax, 1.0), refine(imin, -1.0))
    }
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`;
/// returns the best point seen and its value.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Uniform grid `θ_i = 2πi/n` with cached `cos θ_i`, `sin θ_i` for fast
/// sampling of trigonometric polynomials.
#[derive(Clone, Debug)]
pub(crate) struct Grid {
    n: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Grid {
    pub(crate) fn new(n: usize) -> Self {
        let (sin, cos) = (0..n)
            .map(|i| Angle::grid(i, n).radians().sin_cos())
            .unzip();
        Grid { n, cos, sin }
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    pub(crate) fn step(&self) -> f64 {
        TAU / self.n as f64
    }

    pub(crate) fn theta(&self, i: usize) -> Angle {
        Angle::grid(i, self.n)
    }

    /// Writes the `order`-th derivative of `θ ↦ f(θ + shift)` at every node.
    pub(crate) fn sample(&self, f: &PeriodicFunction, shift: f64, order: u8, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n);
        match f {
            PeriodicFunction::Trig(p) => {
                let mut q = if shift == 0.0 {
                    p.clone()
                } else {
                    p.shifted(shift)
                };
                for _ in 0..order {
                    q = q.derivative();
                }
                q.sample_table(&self.cos, &self.sin, out);
            }
            PeriodicFunction::Spline(s) => {
                for (i, o) in out.iter_mut().enumerate() {
                    let t = Angle::new(self.theta(i).radians() + shift);
                    *o = s.jet(t.radians())[order as usize];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_sampling_agrees_with_eval() {
        let f = PeriodicFunction::fourier(0.1, vec![0.3, -0.7], vec![1.0, 0.2, 0.05]).unwrap();
        let grid = Grid::new(64);
        let mut out = vec![0.0; 64];
        for order in 0..3u8 {
            grid.sample(&f, 0.4, order, &mut out);
            for (i, v) in out.iter().enumerate() {
                let t = Angle::new(grid.theta(i).radians() + 0.4);
                assert!((v - f.jet(t)[order as usize]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn extrema_of_sin() {
        let f = PeriodicFunction::fourier(0.0, vec![], vec![1.0]).unwrap();
        let (hi, lo) = f.extrema(37);
        assert!((hi - 1.0).abs() < 1e-14);
        assert!((lo + 1.0).abs() < 1e-14);
        assert!((f.eval(Angle::new(PI / 2.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    #[should_panic]
    fn deriv_order_out_of_range() {
        let f = PeriodicFunction::fourier(0.0, vec![], vec![1.0]).unwrap();
        f.deriv(Angle::ZERO, 3);
    }
}
