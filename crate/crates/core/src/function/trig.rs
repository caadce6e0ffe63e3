use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `a0 + Σ_{k=1..K} a_k cos kθ + b_k sin kθ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    a0: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigPolynomial {
    /// Builds the polynomial, zero-padding the shorter coefficient list.
    pub fn new(a0: f64, mut cos: Vec<f64>, mut sin: Vec<f64>) -> Result<Self> {
        let degree = cos.len().max(sin.len());
        cos.resize(degree, 0.0);
        sin.resize(degree, 0.0);
        if !a0.is_finite() || cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return Err(Error::InvalidFunction(
                "non-finite Fourier coefficient".into(),
            ));
        }
        Ok(TrigPolynomial { a0, cos, sin })
    }

    pub fn constant(a0: f64) -> Self {
        TrigPolynomial {
            a0,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.cos.len()
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    /// Value, first and second derivative at `theta` (already reduced).
    pub(crate) fn jet(&self, theta: f64) -> [f64; 3] {
        let (s1, c1) = theta.sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut out = [self.a0, 0.0, 0.0];
        for (k, (&a, &b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let kf = (k + 1) as f64;
            let base = a * c + b * s;
            out[0] += base;
            out[1] += kf * (b * c - a * s);
            out[2] -= kf * kf * base;
            // angle addition: (k+1)θ -> (k+2)θ
            let (sn, cn) = (s * c1 + c * s1, c * c1 - s * s1);
            s = sn;
            c = cn;
        }
        out
    }

    /// Term-by-term derivative, itself a trigonometric polynomial.
    pub fn derivative(&self) -> TrigPolynomial {
        let (cos, sin) = self
            .cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(k, (&a, &b))| {
                let kf = (k + 1) as f64;
                (kf * b, -kf * a)
            })
            .unzip();
        TrigPolynomial { a0: 0.0, cos, sin }
    }

    /// The polynomial `θ ↦ f(θ + shift)`, obtained by rotating each harmonic.
    pub fn shifted(&self, shift: f64) -> TrigPolynomial {
        let (cos, sin) = self
            .cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(k, (&a, &b))| {
                let (s, c) = ((k + 1) as f64 * shift).sin_cos();
                (a * c + b * s, b * c - a * s)
            })
            .unzip();
        TrigPolynomial {
            a0: self.a0,
            cos,
            sin,
        }
    }

    pub fn scaled(&self, factor: f64) -> TrigPolynomial {
        TrigPolynomial {
            a0: self.a0 * factor,
            cos: self.cos.iter().map(|a| a * factor).collect(),
            sin: self.sin.iter().map(|b| b * factor).collect(),
        }
    }

    /// `Σ k (|a_k| + |b_k|)`, a bound on `sup |f'|`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(k, (a, b))| (k + 1) as f64 * (a.abs() + b.abs()))
            .sum()
    }

    /// Samples on the uniform grid using precomputed `cos`/`sin` tables of
    /// `2πi/n`; harmonic `k` at node `i` reads table entry `k·i mod n`.
    pub(crate) fn sample_table(&self, cos_table: &[f64], sin_table: &[f64], out: &mut [f64]) {
        let n = cos_table.len();
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = self.a0;
            let mut idx = 0usize;
            for (&a, &b) in self.cos.iter().zip(&self.sin) {
                idx += i;
                if idx >= n {
                    idx -= n;
                }
                acc += a * cos_table[idx] + b * sin_table[idx];
            }
            *o = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn jet_of_sin_two_theta() {
        let f = TrigPolynomial::new(0.0, vec![], vec![0.0, 0.5]).unwrap();
        let [v, d1, d2] = f.jet(PI / 4.0);
        assert!((v - 0.5).abs() < 1e-15);
        assert!(d1.abs() < 1e-15);
        assert!((d2 + 2.0).abs() < 1e-14);
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let f = TrigPolynomial::new(0.3, vec![1.0, -0.2, 0.7], vec![0.4, 0.0, -0.9]).unwrap();
        let g = f.shifted(0.77);
        for i in 0..50 {
            let t = i as f64 * 0.13;
            assert!((g.jet(t)[0] - f.jet(t + 0.77)[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_polynomial_matches_jet() {
        let f = TrigPolynomial::new(0.0, vec![0.5, 0.1], vec![-0.3, 0.8]).unwrap();
        let df = f.derivative();
        for i in 0..20 {
            let t = i as f64 * 0.31;
            assert!((df.jet(t)[0] - f.jet(t)[1]).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(TrigPolynomial::new(f64::NAN, vec![], vec![]).is_err());
        assert!(TrigPolynomial::new(0.0, vec![f64::INFINITY], vec![]).is_err());
    }
}
