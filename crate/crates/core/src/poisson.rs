//! Poisson variate generation.
//!
//! Small means use sequential-search inversion; means of 30 and above use
//! Hörmann's transformed rejection with squeeze (PTRS). Both are exact.
//! Means above [`MAX_RATE`] are rejected instead of silently losing accuracy.

use rand::Rng;
use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

pub const MAX_RATE: f64 = 1e9;
const INVERSION_LIMIT: f64 = 30.0;

#[derive(Clone, Copy, Debug)]
pub struct Poisson {
    lambda: f64,
    kind: Kind,
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Zero,
    Inversion { exp_neg: f64 },
    Ptrs { a: f64, b: f64, ln_inv_alpha: f64, v_r: f64, ln_lambda: f64 },
}

impl Poisson {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || !(0.0..=MAX_RATE).contains(&lambda) {
            return Err(Error::PoissonRate(lambda));
        }
        let kind = if lambda == 0.0 {
            Kind::Zero
        } else if lambda < INVERSION_LIMIT {
            Kind::Inversion { exp_neg: (-lambda).exp() }
        } else {
            let s = lambda.sqrt();
            let b = 0.931 + 2.53 * s;
            let a = -0.059 + 0.02483 * b;
            let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
            let v_r = 0.9277 - 3.6224 / (b - 2.0);
            Kind::Ptrs { a, b, ln_inv_alpha: inv_alpha.ln(), v_r, ln_lambda: lambda.ln() }
        };
        Ok(Self { lambda, kind })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self.kind {
            Kind::Zero => 0,
            Kind::Inversion { exp_neg } => self.invert(exp_neg, rng),
            Kind::Ptrs { a, b, ln_inv_alpha, v_r, ln_lambda } => loop {
                let u = rng.random::<f64>() - 0.5;
                let v = rng.random::<f64>();
                let us = 0.5 - u.abs();
                let k = ((2.0 * a / us + b) * u + self.lambda + 0.43).floor();
                if us >= 0.07 && v <= v_r {
                    return k as u64;
                }
                if k < 0.0 || (us < 0.013 && v > us) {
                    continue;
                }
                let lhs = v.ln() + ln_inv_alpha - (a / (us * us) + b).ln();
                let rhs = -self.lambda + k * ln_lambda - ln_gamma(k + 1.0);
                if lhs <= rhs {
                    return k as u64;
                }
            },
        }
    }

    fn invert<R: Rng + ?Sized>(&self, exp_neg: f64, rng: &mut R) -> u64 {
        // The cumulative sum can fall short of u by rounding in the far tail;
        // restart rather than walk forever.
        let cap = (self.lambda + 40.0 * self.lambda.sqrt() + 40.0) as u64;
        'draw: loop {
            let u = rng.random::<f64>();
            let mut k = 0u64;
            let mut p = exp_neg;
            let mut cdf = p;
            while u > cdf {
                k += 1;
                if k > cap {
                    continue 'draw;
                }
                p *= self.lambda / k as f64;
                cdf += p;
            }
            return k;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream;

    fn moments(lambda: f64, n: usize, seed: u64) -> (f64, f64) {
        let p = Poisson::new(lambda).unwrap();
        let mut rng = stream(seed);
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..n {
            let x = p.sample(&mut rng) as f64;
            sum += x;
            sq += x * x;
        }
        let mean = sum / n as f64;
        (mean, sq / n as f64 - mean * mean)
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Poisson::new(-1.0).is_err());
        assert!(Poisson::new(f64::NAN).is_err());
        assert!(Poisson::new(2e9).is_err());
        assert!(Poisson::new(1e9).is_ok());
    }

    #[test]
    fn zero_rate_is_always_zero() {
        let p = Poisson::new(0.0).unwrap();
        let mut rng = stream(3);
        assert!((0..1000).all(|_| p.sample(&mut rng) == 0));
    }

    #[test]
    fn mean_matches_at_operating_point() {
        let lambda = 4.6e3;
        let n = 1_000_000;
        let (mean, _) = moments(lambda, n, 42);
        assert!((mean - lambda).abs() <= 3.0 * (lambda / n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn variance_equals_mean() {
        // Var of the sample variance for Poisson: (λ + 2λ²(n/(n-1)))/n ≈ (λ + 2λ²)/n.
        let n = 1_000_000;
        for (i, lambda) in [0.5, 50.0, 5e3, 5e6].into_iter().enumerate() {
            let (mean, var) = moments(lambda, n, 100 + i as u64);
            let sigma = ((lambda + 2.0 * lambda * lambda) / n as f64).sqrt();
            assert!((var - mean).abs() <= 3.0 * sigma, "λ={lambda}: mean {mean} var {var}");
            assert!((mean - lambda).abs() <= 3.0 * (lambda / n as f64).sqrt(), "λ={lambda}: mean {mean}");
        }
    }

    #[test]
    fn small_rate_pmf() {
        // Frequencies against the exact pmf at λ = 3.
        let lambda = 3.0;
        let n = 200_000;
        let p = Poisson::new(lambda).unwrap();
        let mut rng = stream(9);
        let mut counts = [0usize; 12];
        for _ in 0..n {
            let k = p.sample(&mut rng) as usize;
            if k < counts.len() {
                counts[k] += 1;
            }
        }
        for (k, c) in counts.iter().enumerate() {
            let pmf = (-lambda + k as f64 * lambda.ln() - ln_gamma(k as f64 + 1.0)).exp();
            let sd = (n as f64 * pmf * (1.0 - pmf)).sqrt();
            assert!((*c as f64 - n as f64 * pmf).abs() <= 5.0 * sd + 1.0, "k={k}");
        }
    }

    #[test]
    fn deterministic_given_stream() {
        let p = Poisson::new(1234.5).unwrap();
        let a: Vec<u64> = {
            let mut r = stream(5);
            (0..16).map(|_| p.sample(&mut r)).collect()
        };
        let b: Vec<u64> = {
            let mut r = stream(5);
            (0..16).map(|_| p.sample(&mut r)).collect()
        };
        assert_eq!(a, b);
    }
}
