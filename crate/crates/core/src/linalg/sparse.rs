use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sparse complex operator in compressed-row form.
///
/// Coordinates are unique; explicit zeros are dropped at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseOperator {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        Self::from_triplets(n, n, values.iter().enumerate().map(|(i, &v)| (i, i, v)))
            .expect("diagonal coordinates are in range")
    }

    /// Projection onto the coordinates selected by `mask`.
    pub fn coordinate_projection(mask: &[bool]) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let values: Vec<Complex64> = mask.iter().map(|&b| if b { one } else { ZERO }).collect();
        Self::diagonal(&values)
    }

    /// Assembles from `(row, col, value)` triplets. Repeated coordinates
    /// are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Result<Self, LinalgError> {
        let mut trip: Vec<(usize, usize, Complex64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(LinalgError::IndexOutOfRange {
                    index: (r, c),
                    shape: (rows, cols),
                });
            }
            trip.push((r, c, v));
        }
        // Stable, so repeated coordinates are summed in input order.
        trip.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; rows + 1];
        let mut col_idx = Vec::with_capacity(trip.len());
        let mut values = Vec::with_capacity(trip.len());
        let mut k = 0;
        while k < trip.len() {
            let (r, c, mut v) = trip[k];
            k += 1;
            while k < trip.len() && trip[k].0 == r && trip[k].1 == c {
                v += trip[k].2;
                k += 1;
            }
            if v.re != 0.0 || v.im != 0.0 {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let trip = (0..m.rows()).flat_map(|r| {
            (0..m.cols()).filter_map(move |c| {
                let v = m[(r, c)];
                (v.re != 0.0 || v.im != 0.0).then_some((r, c, v))
            })
        });
        Self::from_triplets(m.rows(), m.cols(), trip).expect("dense coordinates are in range")
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates stored entries row by row.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(pos) => self.values[span.start + pos],
            Err(_) => ZERO,
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.rows];
        self.apply_into(v, &mut out);
        out
    }

    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(v.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * v[self.col_idx[k]];
            }
            *o = acc;
        }
    }

    pub fn apply_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.cols];
        self.apply_adjoint_into(v, &mut out);
        out
    }

    pub fn apply_adjoint_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(v.len(), self.rows);
        assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|o| *o = ZERO);
        for (r, vr) in v.iter().enumerate() {
            if vr.re == 0.0 && vr.im == 0.0 {
                continue;
            }
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out[self.col_idx[k]] += self.values[k].conj() * vr;
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
            .expect("adjoint coordinates are in range")
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out.prune();
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    fn prune(&mut self) {
        if self.values.iter().all(|v| v.re != 0.0 || v.im != 0.0) {
            return;
        }
        *self = Self::from_triplets(self.rows, self.cols, self.triplets()).expect("coordinates already validated");
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape());
        Self::from_triplets(self.rows, self.cols, self.triplets().chain(other.triplets())).expect("shapes agree")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale_real(-1.0))
    }

    /// Sum of a list of equally shaped operators with complex weights.
    pub fn linear_combination(terms: &[(Complex64, &Self)]) -> Self {
        let (rows, cols) = terms.first().map(|(_, op)| op.shape()).unwrap_or((0, 0));
        Self::from_triplets(
            rows,
            cols,
            terms.iter().flat_map(|(w, op)| {
                assert_eq!(op.shape(), (rows, cols));
                op.triplets().map(move |(r, c, v)| (r, c, w * v))
            }),
        )
        .expect("shapes agree")
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut trip = Vec::new();
        let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
        for r in 0..self.rows {
            acc.clear();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let a = self.values[k];
                let mid = self.col_idx[k];
                for k2 in other.row_ptr[mid]..other.row_ptr[mid + 1] {
                    *acc.entry(other.col_idx[k2]).or_insert(ZERO) += a * other.values[k2];
                }
            }
            trip.extend(acc.iter().map(|(&c, &v)| (r, c, v)));
        }
        Self::from_triplets(self.rows, other.cols, trip).expect("product coordinates are in range")
    }

    /// `self ⊗ m`, with `self` as the outer factor; basis index
    /// `outer * m.rows() + inner`.
    pub fn kron_dense(&self, m: &ComplexMatrix) -> Self {
        let (mr, mc) = m.shape();
        let trip = self.triplets().flat_map(|(r, c, v)| {
            (0..mr).flat_map(move |i| (0..mc).map(move |j| (r * mr + i, c * mc + j, v * m[(i, j)])))
        });
        Self::from_triplets(self.rows * mr, self.cols * mc, trip).expect("kron coordinates are in range")
    }

    /// `Σ_i ops[i] ⊗ coeffs[i]`.
    pub fn tensor_sum(ops: &[&Self], coeffs: &[ComplexMatrix]) -> Result<Self, LinalgError> {
        if ops.len() != coeffs.len() {
            return Err(LinalgError::LengthMismatch {
                left: ops.len(),
                right: coeffs.len(),
            });
        }
        let Some(first) = ops.first() else {
            return Ok(Self::zeros(0, 0));
        };
        let (orows, ocols) = first.shape();
        let (mr, mc) = coeffs[0].shape();
        for (op, m) in ops.iter().zip(coeffs) {
            if op.shape() != (orows, ocols) {
                return Err(LinalgError::ShapeMismatch {
                    expected: (orows, ocols),
                    found: op.shape(),
                });
            }
            if m.shape() != (mr, mc) {
                return Err(LinalgError::ShapeMismatch {
                    expected: (mr, mc),
                    found: m.shape(),
                });
            }
        }
        let trip = ops.iter().zip(coeffs).flat_map(|(op, m)| {
            op.triplets().flat_map(move |(r, c, v)| {
                (0..mr).flat_map(move |i| (0..mc).map(move |j| (r * mr + i, c * mc + j, v * m[(i, j)])))
            })
        });
        Self::from_triplets(orows * mr, ocols * mc, trip)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Rank of a diagonal 0/1 projection (count of unit diagonal entries).
    pub fn diagonal_rank(&self) -> usize {
        self.triplets()
            .filter(|&(r, c, v)| r == c && (v - 1.0).norm() < 1e-12)
            .count()
    }

    /// Restriction to a set of input coordinates: zeroes every column not
    /// selected by `mask`.
    pub fn restrict_columns(&self, mask: &[bool]) -> Self {
        assert_eq!(mask.len(), self.cols);
        Self::from_triplets(self.rows, self.cols, self.triplets().filter(|&(_, c, _)| mask[c]))
            .expect("coordinates already validated")
    }
}
