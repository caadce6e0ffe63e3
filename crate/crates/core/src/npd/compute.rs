use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::{dedup_sorted, Angle};
use crate::critical::{is_morse, MORSE_TOL};
use crate::error::{Error, Result};
use crate::function::PeriodicFunction;
use crate::localization::{
    branch_crossing_candidates_with, certify_with, critical_pair_candidates, distinct_alphas,
    zero_distance_pairs, CandidateRotation, Certificate, DEFAULT_BRANCH_TOL,
};
use crate::npd::oracle::{check_resolution, run_oracle};
use crate::npd::refine::refine_with;
use crate::npd::{
    Bracket, SectionScanner, DEFAULT_RESOLUTION, POST_CLUSTER_TOL, PRE_CLUSTER_TOL, REFINE_TOL,
    ZERO_THRESHOLD,
};

/// Tuning knobs for [`pseudo_distance`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NpdOptions {
    pub n_theta: usize,
    pub n_alpha: usize,
    /// Stopping radius of the local refinement in `α`.
    pub tol: f64,
    /// Tolerance of the optimality certificates.
    pub certificate_tol: f64,
    /// Skip the Morse check.
    pub force: bool,
}

impl Default for NpdOptions {
    fn default() -> Self {
        NpdOptions {
            n_theta: DEFAULT_RESOLUTION,
            n_alpha: DEFAULT_RESOLUTION,
            tol: REFINE_TOL,
            certificate_tol: 1e-6,
            force: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoDistance {
    pub distance: f64,
    pub bracket: Bracket,
    /// Sorted, pairwise more than `1e-7` apart.
    pub optimal_alphas: Vec<Angle>,
    /// One per optimal rotation, in the same order.
    pub certificates: Vec<Certificate>,
    /// Number of `α` grid points behind the bracket.
    pub profile_resolution: usize,
    pub candidates: Vec<CandidateRotation>,
    /// Fallbacks taken along the way.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// `min_α max_θ |φ(θ) − ψ(θ+α)|` with every rotation attaining it.
///
/// The grid oracle brackets the value and marks the promising cells. Those
/// cells and the structural candidates seed a local refinement; refined
/// values that tie with the smallest one are the optimal rotations. Each is
/// certified, and the result must land inside the bracket.
pub fn pseudo_distance(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
    opts: &NpdOptions,
) -> Result<PseudoDistance> {
    check_resolution(opts.n_theta, "n_theta")?;
    check_resolution(opts.n_alpha, "n_alpha")?;
    for (name, x) in [("tol", opts.tol), ("certificate_tol", opts.certificate_tol)] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "{name} must be positive, got {x}"
            )));
        }
    }
    if !opts.force {
        for (which, f) in [("phi", phi), ("psi", psi)] {
            let report = is_morse(f, MORSE_TOL);
            if !report.morse {
                return Err(Error::NotMorse {
                    which,
                    count: report.witnesses.len(),
                });
            }
        }
    }

    let scanner = SectionScanner::new(phi, psi, opts.n_theta);
    let oracle = run_oracle(&scanner, opts.n_alpha);
    let bracket = oracle.bracket;
    let mut notes = Vec::new();

    let mut candidates = match critical_pair_candidates(phi, psi) {
        Ok(c) => c,
        Err(e) => {
            notes.push(format!("critical-pair candidates skipped: {e}"));
            Vec::new()
        }
    };
    candidates.extend(branch_candidates(phi, psi, opts, &mut notes));

    // g at every distinct candidate rotation
    let cand_alphas = distinct_alphas(&candidates, 0.0);
    let cand_g: Vec<(Angle, f64)> = cand_alphas.par_iter().map(|&a| (a, scanner.g(a))).collect();

    let mut seeds = cell_minima(&oracle.cell_indices, &oracle.refined, opts.n_alpha);
    let slack = bracket.width();
    seeds.extend(
        cand_g
            .iter()
            .copied()
            .filter(|&(_, g)| g <= bracket.upper + slack),
    );
    let seeds = dedup_seeds(seeds, PRE_CLUSTER_TOL);

    let radius = 2.0 * std::f64::consts::TAU / opts.n_alpha as f64;
    let refined: Vec<(Angle, f64)> = seeds
        .par_iter()
        .map(|&(a, _)| refine_with(&scanner, a, radius, opts.tol))
        .collect::<Result<_>>()?;
    let distance = refined.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);

    if !bracket.contains(distance, 1e-12) {
        return Err(Error::InconsistentOracle {
            distance,
            lower: bracket.lower,
            upper: bracket.upper,
        });
    }

    // g moves by at most L(ψ)·tol within the refinement tolerance
    let value_tol = opts.tol * (1.0 + psi.lipschitz_bound()) + 1e-12 * distance.max(1.0);

    let mut optimal: Vec<(Angle, f64)> = Vec::new();
    if distance < ZERO_THRESHOLD {
        optimal = cand_g
            .iter()
            .copied()
            .filter(|&(a, g)| g < ZERO_THRESHOLD && zero_distance_pairs(phi, psi, a).is_some())
            .collect();
        if optimal.is_empty() {
            notes.push(
                "no critical-point matching at zero distance; using refined minimizers".into(),
            );
        }
    }
    if optimal.is_empty() {
        let snap_slack = 1e-14 * distance.max(1.0);
        optimal = refined
            .iter()
            .filter(|r| r.1 <= distance + value_tol)
            .map(|&(a, g)| {
                // prefer an exact structural rotation over its refined approximation
                cand_g
                    .iter()
                    .filter(|(c, gc)| c.close_to(a, PRE_CLUSTER_TOL) && *gc <= g + snap_slack)
                    .min_by(|x, y| {
                        x.1.total_cmp(&y.1)
                            .then(x.0.distance(a).total_cmp(&y.0.distance(a)))
                    })
                    .copied()
                    .unwrap_or((a, g))
            })
            .collect();
    }
    let optimal = merge_clusters(&scanner, optimal, value_tol);

    let certificates: Vec<Certificate> = optimal
        .par_iter()
        .map(|&a| certify_with(&scanner, a, distance, opts.certificate_tol))
        .collect::<Result<_>>()?;

    Ok(PseudoDistance {
        distance,
        bracket,
        optimal_alphas: optimal,
        certificates,
        profile_resolution: opts.n_alpha,
        candidates,
        notes,
    })
}

/// Branch crossings, retried on finer `α` grids when tracking is unstable.
fn branch_candidates(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
    opts: &NpdOptions,
    notes: &mut Vec<String>,
) -> Vec<CandidateRotation> {
    let base = opts.n_alpha.max(256);
    for n in [base, 2 * base, 4 * base] {
        match branch_crossing_candidates_with(phi, psi, n, opts.n_theta, DEFAULT_BRANCH_TOL) {
            Ok(c) => return c,
            Err(Error::BranchTrackingUnstable { alpha, .. }) => {
                notes.push(format!(
                    "branch tracking unstable near α = {alpha} with {n} steps"
                ));
            }
            Err(e) => {
                notes.push(format!("branch crossings skipped: {e}"));
                return Vec::new();
            }
        }
    }
    notes.push("branch crossings skipped; relying on the grid oracle".into());
    Vec::new()
}

/// Local minima of the refined profile within each run of argmin cells.
fn cell_minima(cells: &[usize], refined: &[f64], n_alpha: usize) -> Vec<(Angle, f64)> {
    let value = |j: usize| cells.binary_search(&j).ok().map(|k| refined[k]);
    cells
        .iter()
        .zip(refined)
        .filter(|&(&j, &g)| {
            let prev = value((j + n_alpha - 1) % n_alpha).unwrap_or(f64::INFINITY);
            let next = value((j + 1) % n_alpha).unwrap_or(f64::INFINITY);
            g <= prev && g <= next
        })
        .map(|(&j, &g)| (Angle::grid(j, n_alpha), g))
        .collect()
}

/// Keeps the lowest seed of each neighbourhood.
fn dedup_seeds(mut seeds: Vec<(Angle, f64)>, tol: f64) -> Vec<(Angle, f64)> {
    seeds.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then(a.0.radians().total_cmp(&b.0.radians()))
    });
    let mut kept: Vec<(Angle, f64)> = Vec::new();
    for s in seeds {
        if !kept.iter().any(|k| k.0.close_to(s.0, tol)) {
            kept.push(s);
        }
    }
    kept
}

/// Collapses coincident minimizers, then joins neighbours with no barrier
/// of `g` between them.
fn merge_clusters(
    scanner: &SectionScanner<'_>,
    mut points: Vec<(Angle, f64)>,
    value_tol: f64,
) -> Vec<Angle> {
    points.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then(a.0.radians().total_cmp(&b.0.radians()))
    });
    let mut reps: Vec<(Angle, f64)> = Vec::new();
    for p in points {
        if !reps.iter().any(|r| r.0.close_to(p.0, POST_CLUSTER_TOL)) {
            reps.push(p);
        }
    }
    let mut kept: Vec<(Angle, f64)> = Vec::new();
    for p in reps {
        let joined = kept.iter().any(|k| {
            k.0.close_to(p.0, PRE_CLUSTER_TOL) && {
                let mid = k.0 + 0.5 * k.0.offset_to(p.0);
                scanner.g(mid) <= k.1.max(p.1) + value_tol
            }
        });
        if !joined {
            kept.push(p);
        }
    }
    let mut out = dedup_sorted(kept.into_iter().map(|k| k.0).collect(), 0.0);
    out.sort_by(|a, b| a.radians().total_cmp(&b.radians()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{haversine_pair, sine_pair};
    use std::f64::consts::PI;

    #[test]
    fn sine_pair_four_rotations() {
        let (phi, psi) = sine_pair();
        let r = pseudo_distance(&phi, &psi, &NpdOptions::default()).unwrap();
        assert!(
            (r.distance - 3.0 * 3f64.sqrt() / 4.0).abs() < 1e-9,
            "{}",
            r.distance
        );
        assert_eq!(r.optimal_alphas.len(), 4, "{:?}", r.optimal_alphas);
        for (k, a) in r.optimal_alphas.iter().enumerate() {
            assert!(a.close_to(Angle::new(k as f64 * PI / 2.0), 1e-7), "{a}");
        }
        assert!(r.certificates.iter().all(|c| c.is_certified()));
    }

    #[test]
    fn haversine_pair_half() {
        let (phi, psi) = haversine_pair();
        let r = pseudo_distance(&phi, &psi, &NpdOptions::default()).unwrap();
        assert!((r.distance - 0.5).abs() < 1e-9);
        assert_eq!(r.optimal_alphas.len(), 1);
        assert!(r.optimal_alphas[0].close_to(Angle::ZERO, 1e-7));
        assert!(r
            .candidates
            .iter()
            .any(|c| c.alpha.close_to(Angle::ZERO, 1e-9)));
    }

    #[test]
    fn identical_functions() {
        let (_, psi) = sine_pair();
        let r = pseudo_distance(&psi, &psi, &NpdOptions::default()).unwrap();
        assert!(r.distance < 1e-12);
        assert_eq!(r.optimal_alphas, vec![Angle::ZERO]);
        assert!(r.certificates[0].is_certified());
    }

    #[test]
    fn rejects_non_morse() {
        let (phi, _) = sine_pair();
        let cube = PeriodicFunction::fourier(0.0, vec![], vec![0.75, 0.0, -0.25]).unwrap();
        let e = pseudo_distance(&phi, &cube, &NpdOptions::default()).unwrap_err();
        assert!(matches!(e, Error::NotMorse { which: "psi", .. }));
    }
}
