//! Reduced free products of pointed Hilbert spaces, truncated by tensor
//! length, and the left action of each factor.
//!
//! Factor indices are 0-based. Each factor `H_i = H_i^0 ⊕ Cξ_i` carries an
//! orthonormal frame whose first `dim − 1` columns span `H_i^0` and whose
//! last column is `ξ_i`. A basis label of the free product is an
//! alternating sequence `((i_1, c_1), …, (i_m, c_m))` with `i_j ≠ i_{j+1}`
//! and `c_j` a frame coordinate of `H_{i_j}^0`; the empty label is the
//! vacuum. Labels are enumerated by length, then lexicographically.

use std::collections::HashMap;

use thiserror::Error;

use crate::linalg::{c64, operator_norm, Complex64, ComplexMatrix, LinalgError, SparseOperator, DEFAULT_TOL};

/// Largest free-product basis that will be built.
pub const MAX_FREE_PRODUCT_DIM: usize = 2_000_000;
/// Smallest admissible Gram–Schmidt pivot.
pub const PIVOT_TOL: f64 = 1e-8;
/// Largest `|φ_i(x)|` accepted by [`freeness_decomposition`].
pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FreeProdError {
    #[error("distinguished vector has norm {0}, expected 1")]
    NotUnit(f64),
    #[error("space must have dimension at least 1")]
    ZeroDimension,
    #[error("frame completion hit pivot {0:e} below tolerance")]
    DegenerateFrame(f64),
    #[error("free product needs at least one factor")]
    NoFactors,
    #[error("factor {index} outside 0..{count}")]
    FactorOutOfRange { index: usize, count: usize },
    #[error("expected a {expected}×{expected} matrix, found {found:?}")]
    DimensionMismatch { expected: usize, found: (usize, usize) },
    #[error("free product of depth {depth} exceeds {limit} basis vectors")]
    TooLarge { depth: usize, limit: usize },
    #[error("state of x is {0}, expected 0")]
    NonzeroState(f64),
    #[error("‖x‖ = {0} exceeds 1")]
    NormTooLarge(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `(H, ξ)` with `H = C^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointedSpace {
    dim: usize,
    xi: Vec<Complex64>,
    frame: ComplexMatrix,
}

impl PointedSpace {
    /// Pointed space with a unit vector `ξ`; the frame of `H^0` comes from
    /// Gram–Schmidt on the standard basis, in order.
    pub fn new(xi: Vec<Complex64>) -> Result<Self, FreeProdError> {
        let dim = xi.len();
        if dim == 0 {
            return Err(FreeProdError::ZeroDimension);
        }
        let norm = xi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(FreeProdError::NotUnit(norm));
        }
        let mut kept: Vec<Vec<Complex64>> = vec![xi.clone()];
        let mut best_rejected = 0.0f64;
        for e in 0..dim {
            if kept.len() == dim {
                break;
            }
            let mut v = vec![c64(0.0, 0.0); dim];
            v[e] = c64(1.0, 0.0);
            for _ in 0..2 {
                for q in &kept {
                    let p: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= p * qi;
                    }
                }
            }
            let r = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if r > PIVOT_TOL {
                kept.push(v.into_iter().map(|z| z / r).collect());
            } else {
                best_rejected = best_rejected.max(r);
            }
        }
        if kept.len() < dim {
            return Err(FreeProdError::DegenerateFrame(best_rejected));
        }
        // Columns: H^0 frame first, ξ last.
        kept.rotate_left(1);
        let frame = ComplexMatrix::from_fn(dim, dim, |r, c| kept[c][r]);
        Ok(Self { dim, xi, frame })
    }

    /// `ξ` equal to the standard basis vector `coordinate`.
    pub fn with_coordinate(dim: usize, coordinate: usize) -> Result<Self, FreeProdError> {
        if coordinate >= dim {
            return Err(FreeProdError::DimensionMismatch {
                expected: dim,
                found: (coordinate, coordinate),
            });
        }
        let mut xi = vec![c64(0.0, 0.0); dim];
        xi[coordinate] = c64(1.0, 0.0);
        Self::new(xi)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn xi(&self) -> &[Complex64] {
        &self.xi
    }

    pub fn frame(&self) -> &ComplexMatrix {
        &self.frame
    }

    /// `φ(x) = ⟨xξ, ξ⟩`.
    pub fn state(&self, x: &ComplexMatrix) -> Result<Complex64, FreeProdError> {
        self.check(x)?;
        let xxi = x.apply(&self.xi);
        Ok(self.xi.iter().zip(&xxi).map(|(a, b)| a.conj() * b).sum())
    }

    /// `(b, η, ζ^*, t)` from `Q^* x Q = [[b, η], [ζ^*, t]]`.
    pub fn blocks(&self, x: &ComplexMatrix) -> Result<Blocks, FreeProdError> {
        self.check(x)?;
        let q = &self.frame;
        let m = q.adjoint().matmul(x).matmul(q);
        let h = self.dim - 1;
        Ok(Blocks {
            b: m.block(0, 0, h, h),
            eta: (0..h).map(|r| m[(r, h)]).collect(),
            zeta_star: (0..h).map(|c| m[(h, c)]).collect(),
            t: m[(h, h)],
        })
    }

    fn check(&self, x: &ComplexMatrix) -> Result<(), FreeProdError> {
        if x.shape() != (self.dim, self.dim) {
            return Err(FreeProdError::DimensionMismatch {
                expected: self.dim,
                found: x.shape(),
            });
        }
        Ok(())
    }
}

/// Block form of a factor element relative to `H^0 ⊕ Cξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Blocks {
    pub b: ComplexMatrix,
    pub eta: Vec<Complex64>,
    pub zeta_star: Vec<Complex64>,
    pub t: Complex64,
}

type Label = Vec<(usize, usize)>;

/// `*_i (H_i, ξ_i)` truncated to tensors of length `≤ depth`.
#[derive(Clone, Debug)]
pub struct FreeProductSpace {
    factors: Vec<PointedSpace>,
    depth: usize,
    labels: Vec<Label>,
    index: HashMap<Label, usize>,
}

impl FreeProductSpace {
    pub fn new(factors: Vec<PointedSpace>, depth: usize) -> Result<Self, FreeProdError> {
        if factors.is_empty() {
            return Err(FreeProdError::NoFactors);
        }
        let too_large = FreeProdError::TooLarge {
            depth,
            limit: MAX_FREE_PRODUCT_DIM,
        };
        let mut labels: Vec<Label> = vec![Vec::new()];
        let mut level_start = 0;
        for _ in 0..depth {
            let level_end = labels.len();
            for w in level_start..level_end {
                let last = labels[w].last().map(|&(i, _)| i);
                for (i, f) in factors.iter().enumerate() {
                    if last == Some(i) {
                        continue;
                    }
                    for c in 0..f.dim - 1 {
                        if labels.len() >= MAX_FREE_PRODUCT_DIM {
                            return Err(too_large);
                        }
                        let mut next = labels[w].clone();
                        next.push((i, c));
                        labels.push(next);
                    }
                }
            }
            level_start = level_end;
        }
        let index = labels.iter().cloned().enumerate().map(|(k, l)| (l, k)).collect();
        Ok(Self {
            factors,
            depth,
            labels,
            index,
        })
    }

    pub fn factors(&self) -> &[PointedSpace] {
        &self.factors
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Factor/coordinate sequence of a basis vector.
    pub fn label(&self, k: usize) -> &[(usize, usize)] {
        &self.labels[k]
    }

    pub fn index_of(&self, label: &[(usize, usize)]) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Indicator of tensors of length `≤ depth − 1`.
    pub fn interior_mask(&self) -> Vec<bool> {
        self.labels.iter().map(|l| l.len() < self.depth).collect()
    }

    /// `⟨T ξ, ξ⟩` for the vacuum `ξ`.
    pub fn vacuum_expectation(&self, t: &SparseOperator) -> Complex64 {
        t.get(0, 0)
    }

    fn factor(&self, i: usize) -> Result<&PointedSpace, FreeProdError> {
        self.factors.get(i).ok_or(FreeProdError::FactorOutOfRange {
            index: i,
            count: self.factors.len(),
        })
    }
}

/// Left action of `x ∈ B(H_i)` on the free product.
///
/// With `Q^* x Q = [[b, η], [ζ^*, t]]`:
/// the vacuum goes to `η + tξ`; a tensor `h ⊗ w` with `h ∈ H_i^0` goes to
/// `(bh) ⊗ w + ζ^*(h) w`; a tensor `w` not starting in `H_i^0` goes to
/// `η ⊗ w + t w`. Terms longer than the depth are dropped.
pub fn embed(space: &FreeProductSpace, i: usize, x: &ComplexMatrix) -> Result<SparseOperator, FreeProdError> {
    let f = space.factor(i)?;
    let bl = f.blocks(x)?;
    let h = f.dim - 1;
    let zero = c64(0.0, 0.0);
    let mut trip = Vec::new();
    let mut push = |r: usize, c: usize, v: Complex64| {
        if v != zero {
            trip.push((r, c, v));
        }
    };
    for (col, label) in space.labels.iter().enumerate() {
        match label.first() {
            Some(&(j, c)) if j == i => {
                let rest = &label[1..];
                let mut image: Label = label.clone();
                for c2 in 0..h {
                    image[0] = (i, c2);
                    push(space.index[&image], col, bl.b[(c2, c)]);
                }
                push(space.index[rest], col, bl.zeta_star[c]);
            }
            _ => {
                push(col, col, bl.t);
                if label.len() < space.depth {
                    let mut image: Label = Vec::with_capacity(label.len() + 1);
                    image.push((i, 0));
                    image.extend_from_slice(label);
                    for c2 in 0..h {
                        image[0] = (i, c2);
                        push(space.index[&image], col, bl.eta[c2]);
                    }
                }
            }
        }
    }
    Ok(SparseOperator::from_triplets(space.dim(), space.dim(), trip)?)
}

/// Projection onto tensors whose first leg lies in `H_i^0`.
pub fn factor_projection(space: &FreeProductSpace, i: usize) -> Result<SparseOperator, FreeProdError> {
    space.factor(i)?;
    let mask: Vec<bool> = space
        .labels
        .iter()
        .map(|l| l.first().map(|&(j, _)| j) == Some(i))
        .collect();
    Ok(SparseOperator::coordinate_projection(&mask))
}

/// `u_i = x e_i` and `v_i = e_i x (1 − e_i)` for `x` with `φ_i(x) = 0`,
/// `‖x‖ ≤ 1`, acting in factor `i`.
pub fn freeness_decomposition(
    space: &FreeProductSpace,
    i: usize,
    x: &ComplexMatrix,
) -> Result<(SparseOperator, SparseOperator), FreeProdError> {
    let f = space.factor(i)?;
    let phi = f.state(x)?.norm();
    if phi > STATE_TOL {
        return Err(FreeProdError::NonzeroState(phi));
    }
    let norm = operator_norm(x, DEFAULT_TOL)?;
    if norm > 1.0 + 1e-10 {
        return Err(FreeProdError::NormTooLarge(norm));
    }
    let big = embed(space, i, x)?;
    let e = factor_projection(space, i)?;
    let not_e = SparseOperator::identity(space.dim()).sub(&e);
    Ok((big.matmul(&e), e.matmul(&big).matmul(&not_e)))
}
