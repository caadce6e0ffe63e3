//! Root finding on the circle: dense sign-change scan, bisection to a target
//! width, one Newton polish.
//!
//! Besides sign changes, each local minimum of `|f|` among the samples is
//! probed for a pair of nearby roots the grid cannot separate, and for a
//! tangency (double root).

use crate::angle::Angle;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Multiplicity {
    Simple,
    /// Tangential zero: `f` touches zero without changing sign.
    Double,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Root {
    pub theta: Angle,
    pub multiplicity: Multiplicity,
}

#[derive(Clone, Debug)]
pub(crate) enum RootSet {
    /// The function vanishes (to noise level) at every sample.
    Flat,
    Roots(Vec<Root>),
}

/// Relative size below which a sampled function counts as identically zero.
pub(crate) const FLAT_EPS: f64 = 1e-13;
/// Relative size of a local extremum of `f` that counts as touching zero.
const TANGENT_EPS: f64 = 1e-11;

/// Roots of `f` given its samples on the uniform grid `2πi/n`.
///
/// `jet(t)` returns `[f(t), f'(t)]` for radians `t` (not necessarily reduced).
pub(crate) fn scan_roots<J>(samples: &[f64], jet: J, width: f64) -> RootSet
where
    J: Fn(f64) -> [f64; 2],
{
    let n = samples.len();
    let h = std::f64::consts::TAU / n as f64;
    let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale <= FLAT_EPS {
        return RootSet::Flat;
    }
    let value = |t: f64| jet(t)[0];
    let slope = |t: f64| jet(t)[1];

    let mut roots = Vec::new();
    for i in 0..n {
        let prev = samples[(i + n - 1) % n];
        let cur = samples[i];
        let next = samples[(i + 1) % n];
        let t = i as f64 * h;

        if cur == 0.0 {
            let multiplicity = if prev * next > 0.0 {
                Multiplicity::Double
            } else {
                Multiplicity::Simple
            };
            roots.push(Root {
                theta: Angle::new(t),
                multiplicity,
            });
            continue;
        }
        if cur * next < 0.0 {
            let r = bisect_polish(&jet, t, t + h, cur, width);
            roots.push(Root {
                theta: Angle::new(r),
                multiplicity: Multiplicity::Simple,
            });
        }
        let same_side = prev * cur > 0.0 && cur * next > 0.0;
        if same_side && cur.abs() < prev.abs() && cur.abs() <= next.abs() {
            let (lo, hi) = (t - h, t + h);
            let (slo, shi) = (slope(lo), slope(hi));
            if slo * shi >= 0.0 {
                continue;
            }
            let tip = bisect(slope, lo, hi, slo, width * 1e-2);
            let tip_value = value(tip);
            if tip_value.abs() <= TANGENT_EPS * scale {
                roots.push(Root {
                    theta: Angle::new(tip),
                    multiplicity: Multiplicity::Double,
                });
            } else if tip_value * cur < 0.0 {
                for (a, b) in [(lo, tip), (tip, hi)] {
                    let r = bisect_polish(&jet, a, b, value(a), width);
                    roots.push(Root {
                        theta: Angle::new(r),
                        multiplicity: Multiplicity::Simple,
                    });
                }
            }
        }
    }
    roots.sort_by(|a, b| a.theta.radians().total_cmp(&b.theta.radians()));
    RootSet::Roots(roots)
}

/// Plain bisection of `f` on `[lo, hi]` where `f(lo)` has sign of `flo`.
pub(crate) fn bisect(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    flo: f64,
    width: f64,
) -> f64 {
    let positive_lo = flo > 0.0;
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == positive_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bisection to `width`, then a single Newton step kept only if it stays in
/// the final bracket.
pub(crate) fn bisect_polish<J>(jet: &J, lo: f64, hi: f64, flo: f64, width: f64) -> f64
where
    J: Fn(f64) -> [f64; 2],
{
    let value = |t: f64| jet(t)[0];
    let mid = bisect(value, lo, hi, flo, width);
    let half = 0.5 * width;
    let [f, df] = jet(mid);
    if df != 0.0 && f.is_finite() {
        let step = f / df;
        if step.abs() <= half.max(f64::EPSILON * mid.abs().max(1.0)) {
            return mid - step;
        }
    }
    mid
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn sample(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..n).map(|i| f(TAU * i as f64 / n as f64)).collect()
    }

    fn roots_of(set: RootSet) -> Vec<Root> {
        match set {
            RootSet::Roots(r) => r,
            RootSet::Flat => panic!("unexpected flat"),
        }
    }

    #[test]
    fn simple_roots_of_cos() {
        let s = sample(128, f64::cos);
        let r = roots_of(scan_roots(&s, |t| [t.cos(), -t.sin()], 1e-12));
        assert_eq!(r.len(), 2);
        assert!((r[0].theta.radians() - PI / 2.0).abs() < 1e-14);
        assert!((r[1].theta.radians() - 1.5 * PI).abs() < 1e-14);
    }

    #[test]
    fn resolves_close_pair_inside_one_cell() {
        // cos θ - cos(0.001) has roots ±0.001, closer than the grid step.
        let c = 0.001f64.cos();
        let s = sample(64, |t| t.cos() - c);
        let r = roots_of(scan_roots(&s, |t| [t.cos() - c, -t.sin()], 1e-13));
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|x| x.multiplicity == Multiplicity::Simple));
        assert!(r[0].theta.close_to(Angle::new(0.001), 1e-10));
        assert!(r[1].theta.close_to(Angle::new(-0.001), 1e-10));
    }

    #[test]
    fn tangency_is_a_double_root() {
        // 1 - cos θ touches zero at 0 (off-grid shift so no sample is exact).
        let s = sample(64, |t| 1.0 - (t - 0.01).cos());
        let r = roots_of(scan_roots(
            &s,
            |t| [1.0 - (t - 0.01).cos(), (t - 0.01).sin()],
            1e-12,
        ));
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, Multiplicity::Double);
        assert!(r[0].theta.close_to(Angle::new(0.01), 1e-5));
    }

    #[test]
    fn zero_function_is_flat() {
        let s = vec![0.0; 32];
        assert!(matches!(
            scan_roots(&s, |_| [0.0, 0.0], 1e-10),
            RootSet::Flat
        ));
    }
}
