//! Monte-Carlo estimate of `∫ ‖Σ_J ε_J ξ_J‖_1 dμ^k` over Steinhaus
//! variables.

use rand::Rng;

use crate::linalg::{trace_norm, Complex64, ComplexMatrix};
use crate::opspace::OperatorFamily;
use crate::sampling::steinhaus;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    /// Standard error of the mean.
    pub sigma: f64,
    pub samples: usize,
}

impl MonteCarloEstimate {
    /// `σ / mean`, or 0 for an exactly zero integrand.
    pub fn relative_error(&self) -> f64 {
        if self.mean == 0.0 {
            if self.sigma == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.sigma / self.mean
        }
    }
}

/// Each sample draws `k` independent sequences `(ε_j(t_l))_{j ≤ n}` and
/// sets `ε_J = ε_{j_1}(t_1) ⋯ ε_{j_k}(t_k)`.
pub fn steinhaus_integral<R: Rng + ?Sized>(xi: &OperatorFamily, samples: usize, rng: &mut R) -> MonteCarloEstimate {
    let (n, k, d) = (xi.n(), xi.k(), xi.d());
    let mut eps = vec![Complex64::new(0.0, 0.0); n * k];
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        for e in eps.iter_mut() {
            *e = steinhaus(rng);
        }
        let mut acc = ComplexMatrix::zeros(d, d);
        for (t, a) in xi.entries().iter().enumerate() {
            let j = xi.multi_index(t);
            let w: Complex64 = j.iter().enumerate().map(|(l, &x)| eps[l * n + x]).product();
            for (s, v) in acc.as_mut_slice().iter_mut().zip(a.as_slice()) {
                *s += w * v;
            }
        }
        let value = trace_norm(&acc);
        sum += value;
        sum_sq += value * value;
    }
    let m = samples.max(1) as f64;
    let mean = sum / m;
    let var = if samples > 1 {
        ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0)
    } else {
        0.0
    };
    MonteCarloEstimate {
        mean,
        sigma: (var / m).sqrt(),
        samples,
    }
}
