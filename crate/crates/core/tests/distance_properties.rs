//! Properties of the pseudo-distance, its candidates and certificates.

mod common;

use std::f64::consts::TAU;

use circle_npd::localization::{
    branch_crossing_candidates, distinct_alphas, CandidateSource, DEFAULT_BRANCH_TOL,
};
use circle_npd::npd::signed_mismatch;
use circle_npd::{
    certify, grid_oracle, pseudo_distance, section_max, Angle, NpdOptions, PeriodicFunction,
    PseudoDistance,
};
use proptest::prelude::*;

fn arb_pair() -> impl Strategy<Value = (PeriodicFunction, PeriodicFunction, PseudoDistance)> {
    any::<u64>().prop_map(|seed| {
        let (phi, psi) = common::random_pair(&mut common::rng(seed));
        let r = pseudo_distance(&phi, &psi, &NpdOptions::default()).unwrap();
        (phi, psi, r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn distance_is_bracketed_and_bounded((phi, psi, r) in arb_pair(), alphas in prop::collection::vec(0.0..TAU, 100)) {
        prop_assert!(r.distance.is_finite());
        prop_assert!(r.bracket.lower - 1e-12 <= r.distance && r.distance <= r.bracket.upper + 1e-12);
        let oracle = grid_oracle(&phi, &psi, 4096, 4096).unwrap();
        prop_assert_eq!(oracle.bracket, r.bracket);

        let (max_phi, min_phi) = phi.extrema(4096);
        let (max_psi, min_psi) = psi.extrema(4096);
        prop_assert!(r.distance >= (max_phi - max_psi).abs() - 1e-9);
        prop_assert!(r.distance >= (min_phi - min_psi).abs() - 1e-9);

        for a in alphas {
            let g = section_max(&phi, &psi, Angle::new(a), 4096).g_value;
            prop_assert!(r.distance <= g + 1e-12, "g({a}) = {g} below {}", r.distance);
        }
    }

    #[test]
    fn optimal_rotations_are_certified_candidates((phi, psi, r) in arb_pair()) {
        prop_assert!(!r.optimal_alphas.is_empty());
        prop_assert_eq!(r.certificates.len(), r.optimal_alphas.len());
        for (a, c) in r.optimal_alphas.iter().zip(&r.certificates) {
            prop_assert!(c.is_certified(), "{:?}", c);
            prop_assert_eq!(c.alpha, *a);
            let g = section_max(&phi, &psi, *a, 4096).g_value;
            prop_assert!((g - r.distance).abs() <= 1e-9);
            prop_assert!(r.candidates.iter().any(|x| x.alpha.close_to(*a, 1e-4)), "no candidate near {a}");
        }
    }

    #[test]
    fn rejected_candidates_are_worse_or_uncertified((phi, psi, r) in arb_pair()) {
        let tol = 1e-9;
        for a in distinct_alphas(&r.candidates, 1e-7) {
            if r.optimal_alphas.iter().any(|o| o.close_to(a, 1e-7)) {
                continue;
            }
            let g = section_max(&phi, &psi, a, 4096).g_value;
            if g > r.distance + tol {
                continue;
            }
            let c = certify(&phi, &psi, a, g, 1e-6).unwrap();
            prop_assert!(!c.is_certified(), "candidate {a} with g = {g} certified but rejected");
        }
    }

    #[test]
    fn branch_witnesses_are_consistent(seed in any::<u64>()) {
        let (phi, psi) = common::random_pair(&mut common::rng(seed));
        let cands = match branch_crossing_candidates(&phi, &psi, 4096) {
            Ok(c) => c,
            // too coarse for this pair; the solver retries on finer grids
            Err(circle_npd::Error::BranchTrackingUnstable { .. }) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let tol = 10.0 * DEFAULT_BRANCH_TOL;
        for c in cands {
            let CandidateSource::BranchCrossing { theta1, theta2, theta1_tilde, theta2_tilde, .. } = c.source else {
                panic!("unexpected source");
            };
            prop_assert!((phi.deriv(theta1, 1) - psi.deriv(theta2, 1)).abs() <= tol);
            prop_assert!((phi.deriv(theta1_tilde, 1) - psi.deriv(theta2_tilde, 1)).abs() <= tol);
            prop_assert!((theta1 + c.alpha).close_to(theta2, 1e-12));
            prop_assert!((theta1_tilde + c.alpha).close_to(theta2_tilde, 1e-12));
            let v = signed_mismatch(&phi, &psi, theta1, c.alpha).abs();
            let w = signed_mismatch(&phi, &psi, theta1_tilde, c.alpha).abs();
            prop_assert!((v - w).abs() <= tol, "|{v} − {w}| at {}", c.alpha);
        }
    }
}
