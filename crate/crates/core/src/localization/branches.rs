//! Branch tracking for the roots of `h_α(θ) = φ'(θ) − ψ'(θ+α)`.
//!
//! Every maximizer of `θ ↦ |φ(θ) − ψ(θ+α)|` away from zero is a root of
//! `h_α`. The roots move continuously with `α` except at tangencies, where
//! pairs are born or die. Along each branch `θ_i(α)` we follow
//! `v_i(α) = φ(θ_i) − ψ(θ_i + α)`; a rotation where two maximizers tie is a
//! zero of `|v_i| − |v_j|`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::angle::Angle;
use crate::critical::DEFAULT_SCAN_SAMPLES;
use crate::error::{Error, Result};
use crate::function::{Grid, PeriodicFunction};
use crate::localization::candidates::snap_alphas;
use crate::localization::{CandidateRotation, CandidateSource, SignCase, SIGN_TOL};
use crate::npd::check_resolution;
use crate::roots::{scan_roots, Multiplicity, RootSet};

/// Default residual tolerance for crossings; bisection runs to 1% of it.
pub const DEFAULT_BRANCH_TOL: f64 = 1e-10;
/// Root counts may not reverse direction within this many `α` steps.
const OSCILLATION_WINDOW: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum BranchRoots {
    /// `h_α ≡ 0`: `φ − ψ∘ρ_α` is constant.
    Flat,
    /// Sorted roots; tangential (double) roots appear twice.
    Roots(Vec<Angle>),
}

/// Roots of `φ'(θ) − ψ'(θ+α)` at one rotation.
pub fn branch_roots(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
    alpha: Angle,
    n_theta: usize,
) -> BranchRoots {
    let t = Tracker::new(phi, psi, n_theta, DEFAULT_BRANCH_TOL);
    match t.roots_at(alpha) {
        None => BranchRoots::Flat,
        Some(r) => BranchRoots::Roots(r.into_iter().map(Angle::new).collect()),
    }
}

/// Candidate rotations at which two root branches carry equal mismatch
/// magnitudes and satisfy the sign pattern required of two maximizers:
/// equal signs need `φ'(θ1)·φ'(θ̃1) < 0`, opposite signs need it `> 0`.
pub fn branch_crossing_candidates(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
    n_alpha: usize,
) -> Result<Vec<CandidateRotation>> {
    branch_crossing_candidates_with(phi, psi, n_alpha, DEFAULT_SCAN_SAMPLES, DEFAULT_BRANCH_TOL)
}

pub fn branch_crossing_candidates_with(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
    n_alpha: usize,
    n_theta: usize,
    tol: f64,
) -> Result<Vec<CandidateRotation>> {
    if n_alpha < 256 {
        return Err(Error::InvalidArgument(format!(
            "n_alpha must be at least 256, got {n_alpha}"
        )));
    }
    check_resolution(n_theta, "n_theta")?;
    let tracker = Tracker::new(phi, psi, n_theta, tol);
    let step = TAU / n_alpha as f64;
    // α_0 … α_n with α_n = 2π closing the loop; no wrap-around linking needed.
    let roots: Vec<Option<Vec<f64>>> = (0..=n_alpha)
        .into_par_iter()
        .map(|j| tracker.roots_at(Angle::new(j as f64 * step)))
        .collect();
    check_oscillation(&roots, step)?;

    let branches = link_branches(&roots);
    let values: Vec<Vec<f64>> = branches
        .iter()
        .map(|b| {
            b.thetas
                .iter()
                .enumerate()
                .map(|(k, &t)| tracker.signed((b.start + k) as f64 * step, t))
                .collect()
        })
        .collect();

    let pairs: Vec<(usize, usize)> = (0..branches.len())
        .flat_map(|a| (a + 1..branches.len()).map(move |b| (a, b)))
        .collect();
    let mut out: Vec<CandidateRotation> = pairs
        .par_iter()
        .flat_map_iter(|&(a, b)| {
            tracker.crossings(&branches[a], &values[a], &branches[b], &values[b], step)
        })
        .collect();

    // flat rotations: φ − ψ∘ρ_α constant, every θ ties
    for (j, r) in roots.iter().enumerate() {
        if r.is_none() && j < n_alpha {
            let alpha = Angle::new(j as f64 * step);
            let v = tracker.signed(alpha.radians(), 0.0);
            out.push(CandidateRotation {
                alpha,
                source: CandidateSource::BranchCrossing {
                    theta1: Angle::ZERO,
                    theta2: alpha,
                    theta1_tilde: Angle::new(PI),
                    theta2_tilde: Angle::new(PI) + alpha,
                    sign_case: SignCase::SameSign,
                    boundary: true,
                },
                candidate_value: v.abs(),
            });
        }
    }

    snap_alphas(&mut out, 1e-9);
    out.dedup_by(|a, b| a.alpha == b.alpha && same_witnesses(&a.source, &b.source));
    Ok(out)
}

fn same_witnesses(a: &CandidateSource, b: &CandidateSource) -> bool {
    match (a, b) {
        (
            CandidateSource::BranchCrossing {
                theta1: a1,
                theta1_tilde: a2,
                ..
            },
            CandidateSource::BranchCrossing {
                theta1: b1,
                theta1_tilde: b2,
                ..
            },
        ) => {
            (a1.close_to(*b1, 1e-9) && a2.close_to(*b2, 1e-9))
                || (a1.close_to(*b2, 1e-9) && a2.close_to(*b1, 1e-9))
        }
        _ => false,
    }
}

/// Root counts that change direction twice in quick succession mean the
/// `α` grid is too coarse to follow the branches.
fn check_oscillation(roots: &[Option<Vec<f64>>], step: f64) -> Result<()> {
    let mut prev_count: Option<usize> = None;
    let mut last_change: Option<(usize, bool)> = None;
    for (j, r) in roots.iter().enumerate() {
        let Some(r) = r else {
            prev_count = None;
            last_change = None;
            continue;
        };
        let count = r.len();
        if let Some(p) = prev_count {
            if count != p {
                let up = count > p;
                if let Some((k, dir)) = last_change {
                    if dir != up && j - k < OSCILLATION_WINDOW {
                        return Err(Error::BranchTrackingUnstable {
                            alpha: Angle::new(j as f64 * step),
                            window: OSCILLATION_WINDOW,
                        });
                    }
                }
                last_change = Some((j, up));
            }
        }
        prev_count = Some(count);
    }
    Ok(())
}

#[derive(Clone, Debug)]
struct Branch {
    start: usize,
    /// Root positions in radians, one per step from `start`.
    thetas: Vec<f64>,
}

/// Nearest-root continuation: greedy matching by cyclic distance, capped at
/// three times the median spacing between adjacent roots. Unmatched roots
/// open new branches; unmatched branches end.
fn link_branches(roots: &[Option<Vec<f64>>]) -> Vec<Branch> {
    let mut done: Vec<Branch> = Vec::new();
    let mut active: Vec<Branch> = Vec::new();
    for (j, r) in roots.iter().enumerate() {
        let Some(current) = r else {
            done.append(&mut active);
            continue;
        };
        if active.is_empty() {
            active = current
                .iter()
                .map(|&t| Branch {
                    start: j,
                    thetas: vec![t],
                })
                .collect();
            continue;
        }
        let previous: Vec<f64> = active.iter().map(|b| *b.thetas.last().unwrap()).collect();
        let cap = (3.0 * median_gap(&previous)).min(PI);
        let mut links: Vec<(f64, usize, usize)> = Vec::new();
        for (p, &tp) in previous.iter().enumerate() {
            for (c, &tc) in current.iter().enumerate() {
                let d = Angle::new(tp).distance(Angle::new(tc));
                if d <= cap {
                    links.push((d, p, c));
                }
            }
        }
        links.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut prev_used = vec![false; previous.len()];
        let mut cur_used = vec![false; current.len()];
        let mut next_of = vec![usize::MAX; previous.len()];
        for (_, p, c) in links {
            if !prev_used[p] && !cur_used[c] {
                prev_used[p] = true;
                cur_used[c] = true;
                next_of[p] = c;
            }
        }
        let mut still: Vec<Branch> = Vec::new();
        for (p, mut b) in active.drain(..).enumerate() {
            if next_of[p] == usize::MAX {
                done.push(b);
            } else {
                b.thetas.push(current[next_of[p]]);
                still.push(b);
            }
        }
        for (c, &t) in current.iter().enumerate() {
            if !cur_used[c] {
                still.push(Branch {
                    start: j,
                    thetas: vec![t],
                });
            }
        }
        active = still;
    }
    done.append(&mut active);
    done
}

fn median_gap(sorted: &[f64]) -> f64 {
    if sorted.len() < 2 {
        return PI;
    }
    let mut s = sorted.to_vec();
    s.sort_by(f64::total_cmp);
    let mut gaps: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.push(TAU - s[s.len() - 1] + s[0]);
    gaps.sort_by(f64::total_cmp);
    gaps[gaps.len() / 2]
}

struct Tracker<'a> {
    phi: &'a PeriodicFunction,
    psi: &'a PeriodicFunction,
    grid: Grid,
    phi_slope: Vec<f64>,
    tol: f64,
}

impl<'a> Tracker<'a> {
    fn new(phi: &'a PeriodicFunction, psi: &'a PeriodicFunction, n_theta: usize, tol: f64) -> Self {
        let grid = Grid::new(n_theta);
        let mut phi_slope = vec![0.0; n_theta];
        grid.sample(phi, 0.0, 1, &mut phi_slope);
        Tracker {
            phi,
            psi,
            grid,
            phi_slope,
            tol,
        }
    }

    /// `[h, h']` at radians `t` for rotation `a`.
    fn h_jet(&self, t: f64, a: f64) -> [f64; 2] {
        let p = self.phi.jet(Angle::new(t));
        let q = self.psi.jet(Angle::new(t + a));
        [p[1] - q[1], p[2] - q[2]]
    }

    fn signed(&self, a: f64, t: f64) -> f64 {
        self.phi.eval(Angle::new(t)) - self.psi.eval(Angle::new(t + a))
    }

    fn roots_at(&self, alpha: Angle) -> Option<Vec<f64>> {
        let mut h = vec![0.0; self.grid.len()];
        self.grid.sample(self.psi, alpha.radians(), 1, &mut h);
        for (x, p) in h.iter_mut().zip(&self.phi_slope) {
            *x = p - *x;
        }
        let a = alpha.radians();
        match scan_roots(&h, |t| self.h_jet(t, a), self.tol * 1e-2) {
            RootSet::Flat => None,
            RootSet::Roots(rs) => {
                let mut out = Vec::with_capacity(rs.len());
                for r in rs {
                    out.push(r.theta.radians());
                    if r.multiplicity == Multiplicity::Double {
                        out.push(r.theta.radians());
                    }
                }
                Some(out)
            }
        }
    }

    /// Newton solve of `h_a(θ) = 0` from `guess`; `None` if it wanders off.
    fn solve(&self, a: f64, guess: f64, reach: f64) -> Option<f64> {
        let mut t = guess;
        for _ in 0..50 {
            let [f, df] = self.h_jet(t, a);
            if df == 0.0 || !f.is_finite() {
                return None;
            }
            let step = f / df;
            t -= step;
            if (t - guess).abs() > reach {
                return None;
            }
            if step.abs() <= 1e-15 * t.abs().max(1.0) {
                return Some(t);
            }
        }
        let [f, _] = self.h_jet(t, a);
        (f.abs() <= self.tol).then_some(t)
    }

    fn crossings(
        &self,
        a: &Branch,
        va: &[f64],
        b: &Branch,
        vb: &[f64],
        step: f64,
    ) -> Vec<CandidateRotation> {
        let lo = a.start.max(b.start);
        let hi = (a.start + a.thetas.len()).min(b.start + b.thetas.len());
        let mut out = Vec::new();
        if lo >= hi {
            return out;
        }
        let at =
            |br: &Branch, vals: &[f64], j: usize| (br.thetas[j - br.start], vals[j - br.start]);
        let diff = |j: usize| {
            let (_, x) = at(a, va, j);
            let (_, y) = at(b, vb, j);
            (x.abs() - y.abs(), 1e-13 * (1.0 + x.abs() + y.abs()))
        };
        for j in lo..hi {
            let (d, noise) = diff(j);
            let alpha = j as f64 * step;
            if d.abs() <= noise {
                let (ta, _) = at(a, va, j);
                let (tb, _) = at(b, vb, j);
                out.extend(self.witness(alpha, ta, tb));
                continue;
            }
            if j + 1 < hi {
                let (d1, noise1) = diff(j + 1);
                if d * d1 < 0.0 && d1.abs() > noise1 {
                    if let Some((alpha, ta, tb)) = self.bisect_crossing(a, b, j, step, d) {
                        out.extend(self.witness(alpha, ta, tb));
                    }
                }
            }
        }
        out
    }

    fn bisect_crossing(
        &self,
        a: &Branch,
        b: &Branch,
        j: usize,
        step: f64,
        d_lo: f64,
    ) -> Option<(f64, f64, f64)> {
        let (a0, a1) = (a.thetas[j - a.start], a.thetas[j + 1 - a.start]);
        let (b0, b1) = (b.thetas[j - b.start], b.thetas[j + 1 - b.start]);
        let da = Angle::new(a0).offset_to(Angle::new(a1));
        let db = Angle::new(b0).offset_to(Angle::new(b1));
        let reach_a = 4.0 * da.abs() + 1e-6;
        let reach_b = 4.0 * db.abs() + 1e-6;
        let base = j as f64 * step;
        let eval = |s: f64| -> Option<(f64, f64, f64)> {
            let alpha = base + s * step;
            let ta = self.solve(alpha, a0 + s * da, reach_a)?;
            let tb = self.solve(alpha, b0 + s * db, reach_b)?;
            let d = self.signed(alpha, ta).abs() - self.signed(alpha, tb).abs();
            Some((d, ta, tb))
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let width = self.tol * 1e-2 / step;
        let mut best = None;
        while hi - lo > width {
            let mid = 0.5 * (lo + hi);
            let (d, ta, tb) = eval(mid)?;
            best = Some((base + mid * step, ta, tb));
            if d == 0.0 {
                break;
            }
            if (d > 0.0) == (d_lo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        best
    }

    /// Checks the sign pattern at a tie and builds the candidate.
    fn witness(&self, alpha: f64, ta: f64, tb: f64) -> Option<CandidateRotation> {
        if Angle::new(ta).close_to(Angle::new(tb), 1e-9) {
            return None;
        }
        let va = self.signed(alpha, ta);
        let vb = self.signed(alpha, tb);
        let sign_product = va * vb;
        let slope_product = self.phi.deriv(Angle::new(ta), 1) * self.phi.deriv(Angle::new(tb), 1);
        let boundary = sign_product.abs() <= SIGN_TOL || slope_product.abs() <= SIGN_TOL;
        let sign_case = if sign_product >= 0.0 {
            SignCase::SameSign
        } else {
            SignCase::OppositeSign
        };
        let ok = boundary
            || match sign_case {
                SignCase::SameSign => slope_product < 0.0,
                SignCase::OppositeSign => slope_product > 0.0,
            };
        if !ok {
            return None;
        }
        let alpha = Angle::new(alpha);
        let (t1, t1t) = (Angle::new(ta), Angle::new(tb));
        Some(CandidateRotation {
            alpha,
            source: CandidateSource::BranchCrossing {
                theta1: t1,
                theta2: t1 + alpha,
                theta1_tilde: t1t,
                theta2_tilde: t1t + alpha,
                sign_case,
                boundary,
            },
            candidate_value: va.abs().max(vb.abs()),
        })
    }
}
