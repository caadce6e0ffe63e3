use crate::angle::Angle;
use crate::critical::{critical_points, MORSE_TOL};
use crate::error::Result;
use crate::function::PeriodicFunction;
use crate::localization::{CandidateRotation, CandidateSource};
use crate::npd::POST_CLUSTER_TOL;

/// Rotations aligning a critical point of `φ` with one of `ψ`.
///
/// Every pair `(c1, c2)` contributes `α = c2 − c1` with value
/// `|φ(c1) − ψ(c2)|`. Alphas within `1e-7` of each other are snapped to a
/// common representative; all witnesses are kept. Sorted by `α`.
pub fn critical_pair_candidates(
    phi: &PeriodicFunction,
    psi: &PeriodicFunction,
) -> Result<Vec<CandidateRotation>> {
    let cp = critical_points(phi, MORSE_TOL)?;
    let cq = critical_points(psi, MORSE_TOL)?;
    let mut out: Vec<CandidateRotation> = cp
        .iter()
        .flat_map(|c1| {
            cq.iter().map(move |c2| CandidateRotation {
                alpha: c2.theta - c1.theta,
                source: CandidateSource::CriticalPair {
                    theta1: c1.theta,
                    theta2: c2.theta,
                },
                candidate_value: (c1.value - c2.value).abs(),
            })
        })
        .collect();
    snap_alphas(&mut out, POST_CLUSTER_TOL);
    Ok(out)
}

/// Sorts by `α` and gives near-equal alphas (cyclically) the value of the
/// first member of their run.
pub(crate) fn snap_alphas(cands: &mut [CandidateRotation], tol: f64) {
    cands.sort_by(|a, b| a.alpha.radians().total_cmp(&b.alpha.radians()));
    let mut rep: Option<Angle> = None;
    for c in cands.iter_mut() {
        match rep {
            Some(r) if r.close_to(c.alpha, tol) => c.alpha = r,
            _ => rep = Some(c.alpha),
        }
    }
    if let (Some(first), Some(last)) = (
        cands.first().map(|c| c.alpha),
        cands.last().map(|c| c.alpha),
    ) {
        if first != last && first.close_to(last, tol) {
            for c in cands.iter_mut().rev().take_while(|c| c.alpha == last) {
                c.alpha = first;
            }
            cands.sort_by(|a, b| a.alpha.radians().total_cmp(&b.alpha.radians()));
        }
    }
}

/// The distinct rotations of a candidate list.
pub fn distinct_alphas(cands: &[CandidateRotation], tol: f64) -> Vec<Angle> {
    crate::angle::dedup_sorted(cands.iter().map(|c| c.alpha).collect(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{haversine_pair, sine_pair};
    use std::f64::consts::PI;

    #[test]
    fn sine_pair_pairs() {
        let (phi, psi) = sine_pair();
        let c = critical_pair_candidates(&phi, &psi).unwrap();
        assert_eq!(c.len(), 8);
        let alphas = distinct_alphas(&c, 1e-7);
        // brute force: {π/4, 3π/4, 5π/4, 7π/4} × {π/2, 3π/2}, differences mod 2π
        let mut brute: Vec<Angle> = Vec::new();
        for a in [1.0, 3.0, 5.0, 7.0] {
            for b in [2.0, 6.0] {
                brute.push(Angle::new((b - a) * PI / 4.0));
            }
        }
        let brute = crate::angle::dedup_sorted(brute, 1e-9);
        assert_eq!(alphas.len(), brute.len());
        for (x, y) in alphas.iter().zip(&brute) {
            assert!(x.close_to(*y, 1e-10));
        }
        assert!(c
            .iter()
            .all(|x| (x.candidate_value - 0.5).abs() < 1e-12
                || (x.candidate_value - 1.5).abs() < 1e-12));
    }

    #[test]
    fn identical_sin() {
        let (_, psi) = sine_pair();
        let c = critical_pair_candidates(&psi, &psi).unwrap();
        let alphas = distinct_alphas(&c, 1e-7);
        assert_eq!(alphas.len(), 2);
        assert!(alphas[0].close_to(Angle::ZERO, 1e-10));
        assert!(alphas[1].close_to(Angle::new(PI), 1e-10));
        for x in &c {
            let expect = if x.alpha.close_to(Angle::ZERO, 1e-7) {
                0.0
            } else {
                2.0
            };
            assert!((x.candidate_value - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn haversine_pair_contains_identity() {
        let (phi, psi) = haversine_pair();
        let c = critical_pair_candidates(&phi, &psi).unwrap();
        assert!(c.iter().any(|x| {
            x.alpha.close_to(Angle::ZERO, 1e-10)
                && (x.candidate_value - 0.5).abs() < 1e-12
                && matches!(x.source, CandidateSource::CriticalPair { theta1, theta2 }
                    if theta1.close_to(Angle::new(PI), 1e-10) && theta2.close_to(Angle::new(PI), 1e-10))
        }));
    }
}
