#![allow(dead_code)]

use circle_npd::{is_morse, PeriodicFunction, MORSE_TOL};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Trig polynomial of degree 1..=5 with coefficients uniform in [-1, 1],
/// redrawn until Morse.
pub fn random_morse(rng: &mut ChaCha8Rng) -> PeriodicFunction {
    loop {
        let degree = rng.gen_range(1..=5);
        let mut coeff = || rng.gen_range(-1.0..=1.0);
        let a0 = coeff();
        let cos: Vec<f64> = (0..degree).map(|_| coeff()).collect();
        let sin: Vec<f64> = (0..degree).map(|_| coeff()).collect();
        let f = PeriodicFunction::fourier(a0, cos, sin).unwrap();
        if is_morse(&f, MORSE_TOL).morse {
            return f;
        }
    }
}

pub fn random_pair(rng: &mut ChaCha8Rng) -> (PeriodicFunction, PeriodicFunction) {
    (random_morse(rng), random_morse(rng))
}

/// `φ = ½ sin²(θ/2)`, `ψ = sin²(θ/2)`.
pub fn haversine_pair() -> (PeriodicFunction, PeriodicFunction) {
    (
        PeriodicFunction::fourier(0.25, vec![-0.25], vec![]).unwrap(),
        PeriodicFunction::fourier(0.5, vec![-0.5], vec![]).unwrap(),
    )
}

/// `φ = ½ sin 2θ`, `ψ = sin θ`.
pub fn sine_pair() -> (PeriodicFunction, PeriodicFunction) {
    (
        PeriodicFunction::fourier(0.0, vec![], vec![0.0, 0.5]).unwrap(),
        PeriodicFunction::fourier(0.0, vec![], vec![1.0]).unwrap(),
    )
}
