use serde::{Deserialize, Serialize};

use crate::angle::{dedup_sorted, Angle};
use crate::function::{golden_max, Grid, PeriodicFunction};
use crate::npd::{signed_mismatch, POST_CLUSTER_TOL, SMOOTH_THRESHOLD};
use crate::roots::{bisect_polish, FLAT_EPS};

/// A refined local maximum of `θ ↦ |φ(θ) − ψ(θ+α)|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalMax {
    pub theta: Angle,
    /// `|v|` at `theta`.
    pub value: f64,
    /// `v = φ(θ) − ψ(θ+α)` at `theta`.
    pub signed: f64,
    /// `|v'(θ)|`, zero at an exact interior maximum.
    pub residual: f64,
}

/// `g(α) = max_θ |φ(θ) − ψ(θ+α)|` with its maximizers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionMax {
    pub alpha: Angle,
    pub g_value: f64,
    /// Maximizers within `1e-12·max(1, g)` of `g_value`, pairwise more than
    /// `1e-7` apart.
    pub argmax_set: Vec<Angle>,
    /// `|v'|` at each argmax member (zero where `|v|` is below the smooth
    /// threshold).
    pub residuals: Vec<f64>,
    /// The mismatch is constant in `θ`; `argmax_set` then holds `θ = 0` only.
    pub flat: bool,
    /// Every refined local maximum of the section, sorted by `θ`.
    pub local_maxima: Vec<LocalMax>,
}

impl SectionMax {
    /// Local maxima whose value is within `tol` of `g_value`.
    pub fn near_maximizers(&self, tol: f64) -> Vec<LocalMax> {
        self.local_maxima
            .iter()
            .filter(|m| m.value >= self.g_value - tol)
            .copied()
            .collect()
    }
}

/// Maximum of the section `f_α` over `θ`, from an `n_theta` scan refined at
/// each discrete local maximum.
pub fn section_max(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
    alpha: Angle,
    n_theta: usize,
) -> SectionMax {
    SectionScanner::new(phi, psi, n_theta).scan(alpha)
}

/// Reuses the `φ` samples across many `α`.
pub(crate) struct SectionScanner<'a> {
    pub(crate) phi: &'a PeriodicFunction,
    pub(crate) psi: &'a PeriodicFunction,
    grid: Grid,
    phi_samples: Vec<f64>,
}

impl<'a> SectionScanner<'a> {
    pub(crate) fn new(
        phi: &'a PeriodicFunction,
        psi: &'a PeriodicFunction,
        n_theta: usize,
    ) -> Self {
        let grid = Grid::new(n_theta);
        let mut phi_samples = vec![0.0; n_theta];
        grid.sample(phi, 0.0, 0, &mut phi_samples);
        SectionScanner {
            phi,
            psi,
            grid,
            phi_samples,
        }
    }

    pub(crate) fn n_theta(&self) -> usize {
        self.grid.len()
    }

    /// `v(θ_i) = φ(θ_i) − ψ(θ_i + α)` on the grid.
    pub(crate) fn signed_samples(&self, alpha: Angle) -> Vec<f64> {
        let mut v = vec![0.0; self.grid.len()];
        self.grid.sample(self.psi, alpha.radians(), 0, &mut v);
        for (vi, p) in v.iter_mut().zip(&self.phi_samples) {
            *vi = p - *vi;
        }
        v
    }

    /// Grid-only maximum of `|v|` (no refinement).
    pub(crate) fn grid_max(&self, alpha: Angle) -> f64 {
        self.signed_samples(alpha)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub(crate) fn g(&self, alpha: Angle) -> f64 {
        self.scan(alpha).g_value
    }

    pub(crate) fn scan(&self, alpha: Angle) -> SectionMax {
        let v = self.signed_samples(alpha);
        let n = v.len();
        let (vmin, vmax) = v
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
        let scale = vmax.abs().max(vmin.abs());

        if vmax - vmin <= FLAT_EPS * (1.0 + scale) {
            let value = v[0].abs();
            return SectionMax {
                alpha,
                g_value: value,
                argmax_set: vec![Angle::ZERO],
                residuals: vec![0.0],
                flat: true,
                local_maxima: vec![LocalMax {
                    theta: Angle::ZERO,
                    value,
                    signed: v[0],
                    residual: 0.0,
                }],
            };
        }

        let mut maxima = Vec::new();
        for i in 0..n {
            let prev = v[(i + n - 1) % n];
            let next = v[(i + 1) % n];
            let cur = v[i];
            // maxima of |v| are maxima of v (where v ≥ 0) or of −v (where v ≤ 0)
            if cur >= 0.0 && cur > prev && cur >= next {
                maxima.push(self.refine_peak(alpha, i, 1.0, cur));
            }
            if cur <= 0.0 && cur < prev && cur <= next {
                maxima.push(self.refine_peak(alpha, i, -1.0, cur));
            }
        }
        maxima.sort_by(|a, b| a.theta.radians().total_cmp(&b.theta.radians()));

        let g_value = maxima.iter().fold(0.0f64, |m, x| m.max(x.value));
        let tol = 1e-12 * g_value.max(1.0);
        let mut best: Vec<&LocalMax> = maxima.iter().filter(|m| m.value >= g_value - tol).collect();
        best.sort_by(|a, b| b.value.total_cmp(&a.value));
        let keep = dedup_sorted(best.iter().map(|m| m.theta).collect(), POST_CLUSTER_TOL);
        let mut argmax_set = Vec::with_capacity(keep.len());
        let mut residuals = Vec::with_capacity(keep.len());
        for theta in keep {
            let m = best
                .iter()
                .filter(|m| m.theta.close_to(theta, POST_CLUSTER_TOL))
                .max_by(|a, b| a.value.total_cmp(&b.value))
                .expect("cluster member");
            argmax_set.push(m.theta);
            residuals.push(if m.value > SMOOTH_THRESHOLD {
                m.residual
            } else {
                0.0
            });
        }

        SectionMax {
            alpha,
            g_value,
            argmax_set,
            residuals,
            flat: false,
            local_maxima: maxima,
        }
    }

    /// Refines the discrete peak of `sign·v` at sample `i` by locating the
    /// root of `v'` in the two neighbouring cells.
    fn refine_peak(&self, alpha: Angle, i: usize, sign: f64, sample: f64) -> LocalMax {
        let h = self.grid.step();
        let t0 = i as f64 * h;
        let (lo, hi) = (t0 - h, t0 + h);
        let a = alpha.radians();
        let jet = |t: f64| {
            let p = self.phi.jet(Angle::new(t));
            let q = self.psi.jet(Angle::new(t + a));
            [p[1] - q[1], p[2] - q[2]]
        };
        let slope_lo = jet(lo)[0];
        let slope_hi = jet(hi)[0];
        let theta = if slope_lo * sign > 0.0 && slope_hi * sign < 0.0 {
            bisect_polish(&jet, lo, hi, slope_lo, 1e-9)
        } else {
            // no bracketing sign change: fall back to a direct search
            let f = |t: f64| sign * signed_mismatch(self.phi, self.psi, Angle::new(t), alpha);
            golden_max(f, lo, hi).0
        };
        let mut theta = Angle::new(theta);
        let mut signed = signed_mismatch(self.phi, self.psi, theta, alpha);
        if signed.abs() < sample.abs() {
            theta = self.grid.theta(i);
            signed = sample;
        }
        LocalMax {
            theta,
            value: signed.abs(),
            signed,
            residual: jet(theta.radians())[0].abs(),
        }
    }
}
