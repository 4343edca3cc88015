//! Linear maps `u: M_d → M_d` and a certified lower estimate of `‖u‖`.

use rand::Rng;

use crate::linalg::{c64, trace_norm, ComplexMatrix};
use crate::sampling::{gaussian_matrix, random_unitary};

/// `u(x)` is the `d × d` matrix whose row-major vector is `K · vec(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixMap {
    d: usize,
    kernel: ComplexMatrix,
}

impl MatrixMap {
    pub fn from_kernel(d: usize, kernel: ComplexMatrix) -> Self {
        assert_eq!(kernel.shape(), (d * d, d * d), "kernel must be d² × d²");
        Self { d, kernel }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_kernel(d, ComplexMatrix::identity(d * d))
    }

    pub fn transpose(d: usize) -> Self {
        let kernel = ComplexMatrix::from_fn(d * d, d * d, |r, c| {
            let (i, j) = (r / d, r % d);
            if c == j * d + i {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        Self::from_kernel(d, kernel)
    }

    /// `x ↦ tr(x f) · m`.
    pub fn rank_one(f: &ComplexMatrix, m: &ComplexMatrix) -> Self {
        let d = f.rows();
        let ft = f.transpose();
        let kernel = ComplexMatrix::from_fn(d * d, d * d, |r, c| m.as_slice()[r] * ft.as_slice()[c]);
        Self::from_kernel(d, kernel)
    }

    /// Independent complex Gaussian kernel entries scaled by `1/d`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Self {
        Self::from_kernel(d, gaussian_matrix(rng, d * d, d * d))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let v = self.kernel.apply(x.as_slice());
        ComplexMatrix::from_row_major(self.d, self.d, v).expect("d² entries")
    }

    /// Adjoint for the pairing `⟨x, y⟩ = tr(x^* y)`.
    pub fn apply_adjoint(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let v = self.kernel.apply_adjoint(y.as_slice());
        ComplexMatrix::from_row_major(self.d, self.d, v).expect("d² entries")
    }
}

/// Lower estimate of `‖u‖ = sup{‖u(x)‖ : ‖x‖ ≤ 1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapNormEstimate {
    pub value: f64,
    pub restarts: usize,
    pub iterations: usize,
}

const ASCENT_ITERATIONS: usize = 200;
const ASCENT_RANDOM_STARTS: usize = 8;

/// Monotone ascent over unitaries. From `x`, take the top singular pair
/// `(p, q)` of `u(x)`; the next iterate is the polar part of `u^*(p q^*)`,
/// which maximizes the linearization `Re⟨u(·), p q^*⟩` over the unit ball.
/// Each step can only increase `‖u(x)‖`, and every value reported is
/// `‖u(x)‖` for an explicit contraction `x`, so the result never exceeds
/// `‖u‖`.
///
/// Starts: the identity, the polar parts of `hints`, and seeded random
/// unitaries.
pub fn estimate_map_norm<R: Rng + ?Sized>(u: &MatrixMap, hints: &[ComplexMatrix], rng: &mut R) -> MapNormEstimate {
    let d = u.dim();
    let mut starts = vec![ComplexMatrix::identity(d)];
    starts.extend(hints.iter().filter(|h| !h.is_zero()).map(polar));
    starts.extend((0..ASCENT_RANDOM_STARTS).map(|_| random_unitary(rng, d)));
    let mut best = 0.0f64;
    let mut iterations = 0;
    for start in &starts {
        let mut x = start.clone();
        let mut value = spectral_norm(&u.apply(&x));
        for _ in 0..ASCENT_ITERATIONS {
            iterations += 1;
            let y = u.apply(&x);
            let (left, s, right) = y.svd();
            let top = argmax(&s);
            if s[top] == 0.0 {
                break;
            }
            let p = ComplexMatrix::from_fn(d, d, |r, c| left[(r, top)] * right[(c, top)].conj());
            let g = u.apply_adjoint(&p);
            if g.is_zero() {
                break;
            }
            let next = polar(&g);
            let next_value = spectral_norm(&u.apply(&next));
            let improved = next_value > value * (1.0 + 1e-13);
            if next_value > value {
                x = next;
                value = next_value;
            }
            if !improved {
                // Linearized optimum reached: trace norm of the gradient
                // equals the current value.
                debug_assert!(trace_norm(&g) >= value * (1.0 - 1e-9));
                break;
            }
        }
        best = best.max(value);
    }
    MapNormEstimate {
        value: best,
        restarts: starts.len(),
        iterations,
    }
}

fn spectral_norm(m: &ComplexMatrix) -> f64 {
    m.singular_values().into_iter().fold(0.0, f64::max)
}

fn polar(m: &ComplexMatrix) -> ComplexMatrix {
    m.map_singular_values(|_| 1.0)
}

fn argmax(s: &[f64]) -> usize {
    s.iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        )
        .0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::trial_rng;

    #[test]
    fn identity_and_transpose_have_norm_one() {
        let mut rng = trial_rng(3, 0, 0);
        let x = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(MatrixMap::transpose(2).apply(&x), x.transpose());
        assert_eq!(MatrixMap::identity(2).apply(&x), x);
        for u in [MatrixMap::identity(3), MatrixMap::transpose(3)] {
            let est = estimate_map_norm(&u, &[], &mut rng);
            assert!((est.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_norm_is_closed_form() {
        // ‖x ↦ tr(x f) m‖ = ‖f‖_1 ‖m‖.
        let f = ComplexMatrix::from_real(2, 2, &[1.0, 0.5, -0.3, 2.0]);
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 1.0]);
        let u = MatrixMap::rank_one(&f, &m);
        let x = ComplexMatrix::from_real(2, 2, &[1.0, -1.0, 0.5, 2.0]);
        let expected = m.scale((&x * &f).trace());
        assert!((&u.apply(&x) - &expected).max_abs() < 1e-12);
        let exact = trace_norm(&f) * spectral_norm(&m);
        let est = estimate_map_norm(&u, &[], &mut trial_rng(1, 0, 0));
        assert!((est.value - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn adjoint_pairing() {
        let mut rng = trial_rng(5, 0, 0);
        let u = MatrixMap::random(&mut rng, 3);
        let x = gaussian_matrix(&mut rng, 3, 3);
        let y = gaussian_matrix(&mut rng, 3, 3);
        let lhs = y.inner(&u.apply(&x));
        let rhs = u.apply_adjoint(&y).inner(&x);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn estimate_never_exceeds_kernel_bound() {
        // ‖u‖ ≤ ‖K‖_{2→2} · √d since ‖x‖_2 ≤ √d ‖x‖.
        let mut rng = trial_rng(9, 0, 0);
        for _ in 0..5 {
            let u = MatrixMap::random(&mut rng, 3);
            let est = estimate_map_norm(&u, &[], &mut rng);
            let bound = spectral_norm(&u.kernel) * 3f64.sqrt();
            assert!(est.value <= bound + 1e-12);
            assert!(est.value > 0.0);
        }
    }
}
