//! Dense tensors of fixed valence at a point.
//!
//! Components are stored row-major with all contravariant slots first, then
//! all covariant slots: `T^{a1..ap}_{b1..bq}`. Entries are either plain `f64`
//! or [`Jet`]s, so the same contraction code serves numeric values and
//! differentiable jet fields.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

use crate::jet::Jet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("slot {slot} out of range for valence ({upper},{lower})")]
    SlotOutOfRange {
        slot: usize,
        upper: usize,
        lower: usize,
    },
    #[error("slot {slot} is {found}, expected {expected}")]
    SlotKind {
        slot: usize,
        found: &'static str,
        expected: &'static str,
    },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("component count {found} does not match n^(p+q) = {expected}")]
    ComponentCount { found: usize, expected: usize },
    #[error("metric is not symmetric (gap {0:.3e})")]
    NotSymmetric(f64),
    #[error("metric is degenerate (det = {0:.3e})")]
    Degenerate(f64),
}

/// Ring operations needed by tensor algebra.
pub trait Component: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn scaled(&self, s: f64) -> Self;
    /// Constant term (the value itself for `f64`).
    fn value(&self) -> f64;

    fn add_product(&mut self, a: &Self, b: &Self) {
        *self = self.plus(&a.times(b));
    }
}

impl Component for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn scaled(&self, s: f64) -> Self {
        self * s
    }
    fn value(&self) -> f64 {
        *self
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

impl Component for Jet {
    fn zero_like(&self) -> Self {
        Jet::zero_like(self)
    }
    fn plus(&self, other: &Self) -> Self {
        Jet::plus(self, other)
    }
    fn minus(&self, other: &Self) -> Self {
        Jet::minus(self, other)
    }
    fn times(&self, other: &Self) -> Self {
        Jet::times(self, other)
    }
    fn scaled(&self, s: f64) -> Self {
        Jet::scaled(self, s)
    }
    fn value(&self) -> f64 {
        Jet::value(self)
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        Jet::add_product(self, a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Raise,
    Lower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorValue<T> {
    dim: usize,
    upper: usize,
    lower: usize,
    data: Vec<T>,
}

fn pow(n: usize, k: usize) -> usize {
    n.pow(k as u32)
}

/// Iterate over all multi-indices of length `rank` with entries in `0..dim`,
/// in row-major order.
pub fn multi_indices(dim: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = pow(dim, rank);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; rank];
        for slot in (0..rank).rev() {
            idx[slot] = flat % dim;
            flat /= dim;
        }
        idx
    })
}

impl<T: Component> TensorValue<T> {
    pub fn new(dim: usize, upper: usize, lower: usize, data: Vec<T>) -> Result<Self, TensorError> {
        let expected = pow(dim, upper + lower);
        if data.len() != expected {
            return Err(TensorError::ComponentCount {
                found: data.len(),
                expected,
            });
        }
        Ok(TensorValue {
            dim,
            upper,
            lower,
            data,
        })
    }

    pub fn from_fn(
        dim: usize,
        upper: usize,
        lower: usize,
        mut f: impl FnMut(&[usize]) -> T,
    ) -> Self {
        let data = multi_indices(dim, upper + lower).map(|idx| f(&idx)).collect();
        TensorValue {
            dim,
            upper,
            lower,
            data,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.upper, self.lower)
    }

    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &T {
        &self.data[self.offset(idx)]
    }

    pub fn map<U: Component>(&self, f: impl Fn(&T) -> U) -> TensorValue<U> {
        TensorValue {
            dim: self.dim,
            upper: self.upper,
            lower: self.lower,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Numeric value at the center (constant terms).
    pub fn at_center(&self) -> TensorValue<f64> {
        self.map(|c| c.value())
    }

    fn slot_kind(&self, slot: usize) -> Result<bool, TensorError> {
        if slot >= self.rank() {
            return Err(TensorError::SlotOutOfRange {
                slot,
                upper: self.upper,
                lower: self.lower,
            });
        }
        Ok(slot < self.upper)
    }

    /// Sum over one contravariant and one covariant slot (both given as
    /// overall slot positions). Result has valence `(p−1, q−1)`.
    pub fn contract(&self, upper_slot: usize, lower_slot: usize) -> Result<Self, TensorError> {
        if !self.slot_kind(upper_slot)? {
            return Err(TensorError::SlotKind {
                slot: upper_slot,
                found: "covariant",
                expected: "contravariant",
            });
        }
        if self.slot_kind(lower_slot)? {
            return Err(TensorError::SlotKind {
                slot: lower_slot,
                found: "contravariant",
                expected: "covariant",
            });
        }
        let rank = self.rank();
        let remaining: Vec<usize> = (0..rank)
            .filter(|&s| s != upper_slot && s != lower_slot)
            .collect();
        let zero = self.data[0].zero_like();
        let mut full = vec![0; rank];
        let out = Self::from_fn(self.dim, self.upper - 1, self.lower - 1, |idx| {
            for (k, &s) in remaining.iter().enumerate() {
                full[s] = idx[k];
            }
            let mut acc = zero.clone();
            for i in 0..self.dim {
                full[upper_slot] = i;
                full[lower_slot] = i;
                acc = acc.plus(&self.data[self.offset(&full)]);
            }
            acc
        });
        Ok(out)
    }

    /// Outer product; upper slots of `self` precede those of `other`, and
    /// likewise for lower slots.
    pub fn tensor_product(&self, other: &Self) -> Result<Self, TensorError> {
        if self.dim != other.dim {
            return Err(TensorError::DimensionMismatch(self.dim, other.dim));
        }
        let (p1, q1) = (self.upper, self.lower);
        let (p2, _) = (other.upper, other.lower);
        let mut a = vec![0; self.rank()];
        let mut b = vec![0; other.rank()];
        Ok(Self::from_fn(
            self.dim,
            p1 + other.upper,
            q1 + other.lower,
            |idx| {
                a[..p1].copy_from_slice(&idx[..p1]);
                b[..p2].copy_from_slice(&idx[p1..p1 + p2]);
                a[p1..].copy_from_slice(&idx[p1 + p2..p1 + p2 + q1]);
                b[p2..].copy_from_slice(&idx[p1 + p2 + q1..]);
                self.get(&a).times(other.get(&b))
            },
        ))
    }

    /// Lower a contravariant slot with `g` (valence (0,2)), or raise a
    /// covariant slot with `g_inv` (valence (2,0)). A lowered index becomes
    /// the first covariant slot; a raised index becomes the last
    /// contravariant slot.
    pub fn metric_convert_with(
        &self,
        slot: usize,
        direction: Direction,
        metric: &TensorValue<T>,
    ) -> Result<Self, TensorError> {
        if metric.dim != self.dim {
            return Err(TensorError::DimensionMismatch(self.dim, metric.dim));
        }
        let is_upper = self.slot_kind(slot)?;
        let zero = self.data[0].zero_like();
        match direction {
            Direction::Lower => {
                if !is_upper {
                    return Err(TensorError::SlotKind {
                        slot,
                        found: "covariant",
                        expected: "contravariant",
                    });
                }
                let (p, q) = (self.upper, self.lower);
                let mut src = vec![0; self.rank()];
                Ok(Self::from_fn(self.dim, p - 1, q + 1, |idx| {
                    // idx = [uppers without slot (p-1)] [new lower] [old lowers]
                    let new_lower = idx[p - 1];
                    let mut k = 0;
                    for s in 0..p {
                        if s != slot {
                            src[s] = idx[k];
                            k += 1;
                        }
                    }
                    src[p..].copy_from_slice(&idx[p..]);
                    let mut acc = zero.clone();
                    for m in 0..self.dim {
                        src[slot] = m;
                        acc.add_product(metric.get(&[new_lower, m]), self.get(&src));
                    }
                    acc
                }))
            }
            Direction::Raise => {
                if is_upper {
                    return Err(TensorError::SlotKind {
                        slot,
                        found: "contravariant",
                        expected: "covariant",
                    });
                }
                let (p, q) = (self.upper, self.lower);
                let lower_pos = slot - p;
                let mut src = vec![0; self.rank()];
                Ok(Self::from_fn(self.dim, p + 1, q - 1, |idx| {
                    // idx = [old uppers] [new upper] [lowers without slot]
                    src[..p].copy_from_slice(&idx[..p]);
                    let new_upper = idx[p];
                    let mut k = p + 1;
                    for s in 0..q {
                        if s != lower_pos {
                            src[p + s] = idx[k];
                            k += 1;
                        }
                    }
                    let mut acc = zero.clone();
                    for m in 0..self.dim {
                        src[slot] = m;
                        acc.add_product(metric.get(&[new_upper, m]), self.get(&src));
                    }
                    acc
                }))
            }
        }
    }

    /// Exchange two slots of the same kind.
    pub fn swap_slots(&self, a: usize, b: usize) -> Result<Self, TensorError> {
        let ka = self.slot_kind(a)?;
        let kb = self.slot_kind(b)?;
        if ka != kb {
            return Err(TensorError::SlotKind {
                slot: b,
                found: if kb { "contravariant" } else { "covariant" },
                expected: if ka { "contravariant" } else { "covariant" },
            });
        }
        let mut src = vec![0; self.rank()];
        Ok(Self::from_fn(self.dim, self.upper, self.lower, |idx| {
            src.copy_from_slice(idx);
            src.swap(a, b);
            self.get(&src).clone()
        }))
    }

    pub fn plus(&self, other: &Self) -> Self {
        debug_assert_eq!(self.valence(), other.valence());
        TensorValue {
            dim: self.dim,
            upper: self.upper,
            lower: self.lower,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.plus(b))
                .collect(),
        }
    }

    pub fn minus(&self, other: &Self) -> Self {
        debug_assert_eq!(self.valence(), other.valence());
        TensorValue {
            dim: self.dim,
            upper: self.upper,
            lower: self.lower,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.minus(b))
                .collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|c| c.scaled(s))
    }
}

impl TensorValue<f64> {
    pub fn zeros(dim: usize, upper: usize, lower: usize) -> Self {
        Self::from_fn(dim, upper, lower, |_| 0.0)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, 1, 1, |i| if i[0] == i[1] { 1.0 } else { 0.0 })
    }

    pub fn vector(components: &[f64]) -> Self {
        Self::from_fn(components.len(), 1, 0, |i| components[i[0]])
    }

    pub fn covector(components: &[f64]) -> Self {
        Self::from_fn(components.len(), 0, 1, |i| components[i[0]])
    }

    /// Rank-2 tensor (either valence) from a matrix, first index = row.
    pub fn from_matrix(m: &DMatrix<f64>, upper: usize) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), upper, 2 - upper, |i| m[(i[0], i[1])])
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        assert_eq!(self.rank(), 2);
        DMatrix::from_fn(self.dim, self.dim, |i, j| *self.get(&[i, j]))
    }

    pub fn to_vector(&self) -> DVector<f64> {
        assert_eq!(self.rank(), 1);
        DVector::from_column_slice(&self.data)
    }

    pub fn scalar(&self) -> f64 {
        assert_eq!(self.rank(), 0);
        self.data[0]
    }

    /// Contract every covariant slot with the given vectors (in slot order)
    /// and return the remaining contravariant components, flattened.
    pub fn apply_lower(&self, vectors: &[&[f64]]) -> Vec<f64> {
        assert_eq!(vectors.len(), self.lower, "one vector per covariant slot");
        let n = self.dim;
        let mut current: Vec<f64> = self.data.clone();
        // contract the last slot repeatedly
        for v in vectors.iter().rev() {
            let outer = current.len() / n;
            current = (0..outer)
                .map(|o| (0..n).map(|i| current[o * n + i] * v[i]).sum())
                .collect();
        }
        current
    }

    /// `metric_convert_with` using a point metric.
    pub fn metric_convert(
        &self,
        slot: usize,
        direction: Direction,
        metric: &MetricAtPoint,
    ) -> Result<Self, TensorError> {
        match direction {
            Direction::Lower => self.metric_convert_with(slot, direction, &metric.g),
            Direction::Raise => self.metric_convert_with(slot, direction, &metric.g_inv),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// A non-degenerate symmetric bilinear form at a point with its inverse,
/// determinant and index (number of negative eigenvalues).
#[derive(Debug, Clone)]
pub struct MetricAtPoint {
    pub g: TensorValue<f64>,
    pub g_inv: TensorValue<f64>,
    pub index: usize,
    pub det_g: f64,
}

impl MetricAtPoint {
    pub fn new(g: TensorValue<f64>) -> Result<Self, TensorError> {
        assert_eq!(g.valence(), (0, 2), "metric must be a (0,2) tensor");
        let m = g.to_matrix();
        let scale = m.amax().max(f64::MIN_POSITIVE);
        let asym = (&m - m.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(TensorError::NotSymmetric(asym));
        }
        let eigen = SymmetricEigen::new(m.clone());
        let smallest = eigen.eigenvalues.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
        let det_g = m.determinant();
        if smallest <= 1e-12 * scale {
            return Err(TensorError::Degenerate(det_g));
        }
        let inv = m
            .clone()
            .try_inverse()
            .ok_or(TensorError::Degenerate(det_g))?;
        let index = eigen.eigenvalues.iter().filter(|v| **v < 0.0).count();
        Ok(MetricAtPoint {
            g,
            g_inv: TensorValue::from_matrix(&inv, 2),
            index,
            det_g,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        self.g.to_matrix()
    }

    pub fn inverse_matrix(&self) -> DMatrix<f64> {
        self.g_inv.to_matrix()
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.g.apply_lower(&[x, y])[0]
    }

    /// Vector metrically dual to the covector `w`.
    pub fn sharp(&self, w: &[f64]) -> Vec<f64> {
        let inv = self.inverse_matrix();
        (inv * DVector::from_column_slice(w)).as_slice().to_vec()
    }
}

/// A pseudo-orthonormal frame `{e_a}` with signs `s_a = g(e_a, e_a) = ±1`.
#[derive(Debug, Clone)]
pub struct Frame {
    /// Column `a` holds the coordinate components of `e_a`.
    pub vectors: DMatrix<f64>,
    pub signs: Vec<f64>,
}

impl Frame {
    /// Frame from the eigen-decomposition of `g`.
    pub fn orthonormal(metric: &MetricAtPoint) -> Frame {
        let eig = SymmetricEigen::new(metric.matrix());
        let n = metric.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut vectors = DMatrix::zeros(n, n);
        let mut signs = Vec::with_capacity(n);
        for (col, &k) in order.iter().enumerate() {
            let lam = eig.eigenvalues[k];
            let v = eig.eigenvectors.column(k) / lam.abs().sqrt();
            vectors.set_column(col, &v);
            signs.push(lam.signum());
        }
        Frame { vectors, signs }
    }

    /// Frame whose first vector is the normalized `first` (which must be
    /// non-null); the rest span its orthogonal complement.
    pub fn adapted(metric: &MetricAtPoint, first: &[f64]) -> Frame {
        let g = metric.matrix();
        let n = metric.dim();
        let e0 = DVector::from_column_slice(first);
        let norm2 = (e0.transpose() * &g * &e0)[(0, 0)];
        if norm2.abs() < 1e-10 {
            return Frame::orthonormal(metric);
        }
        let s0 = norm2.signum();
        let e0 = e0 / norm2.abs().sqrt();
        // project coordinate basis onto e0's orthogonal complement
        let ge0 = &g * &e0;
        let mut w = DMatrix::<f64>::identity(n, n);
        for j in 0..n {
            let coef = s0 * ge0[j];
            let col = w.column(j) - &e0 * coef;
            w.set_column(j, &col);
        }
        let gram = w.transpose() * &g * &w;
        let eig = SymmetricEigen::new(gram);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .abs()
                .total_cmp(&eig.eigenvalues[a].abs())
        });
        let mut vectors = DMatrix::zeros(n, n);
        let mut signs = vec![s0];
        vectors.set_column(0, &e0);
        let mut chosen: Vec<usize> = order.into_iter().take(n - 1).collect();
        chosen.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        for (col, k) in chosen.into_iter().enumerate() {
            let lam = eig.eigenvalues[k];
            let v = &w * eig.eigenvectors.column(k) / lam.abs().sqrt();
            vectors.set_column(col + 1, &v);
            signs.push(lam.signum());
        }
        Frame { vectors, signs }
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn vector(&self, a: usize) -> Vec<f64> {
        self.vectors.column(a).iter().copied().collect()
    }

    /// Coordinate components of `Σ u_a e_a`.
    pub fn combine(&self, u: &[f64]) -> Vec<f64> {
        (&self.vectors * DVector::from_column_slice(u))
            .as_slice()
            .to_vec()
    }

    /// Frame components `v^a = s_a g(v, e_a)` of a coordinate vector.
    pub fn vector_components(&self, metric: &MetricAtPoint, v: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|a| self.signs[a] * metric.inner(v, &self.vector(a)))
            .collect()
    }

    /// Frame components `T(e_a, e_b)` of a (0,2) tensor.
    pub fn form_components(&self, t: &DMatrix<f64>) -> DMatrix<f64> {
        self.vectors.transpose() * t * &self.vectors
    }

    /// Signed frame sum `Σ s_a T(e_a, e_a)`.
    pub fn signed_trace(&self, t: &DMatrix<f64>) -> f64 {
        let c = self.form_components(t);
        (0..self.dim()).map(|a| self.signs[a] * c[(a, a)]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_metric() -> MetricAtPoint {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, -1.5, 0.2, 0.1, 0.2, 1.0]);
        MetricAtPoint::new(TensorValue::from_matrix(&m, 0)).unwrap()
    }

    #[test]
    fn trace_of_identity_is_dimension() {
        for n in 1..6 {
            let id = TensorValue::identity(n);
            assert_eq!(id.contract(0, 1).unwrap().scalar(), n as f64);
        }
    }

    #[test]
    fn pairing_identity() {
        let v = TensorValue::vector(&[1.0, -2.0, 0.5]);
        let w = TensorValue::covector(&[0.3, 0.7, -4.0]);
        let vw = v.tensor_product(&w).unwrap();
        assert_eq!(vw.valence(), (1, 1));
        let expected = 0.3 - 1.4 - 2.0;
        assert!((vw.contract(0, 1).unwrap().scalar() - expected).abs() < 1e-15);
    }

    #[test]
    fn product_arity_and_symmetry() {
        let g = sample_metric().g;
        assert_eq!(g.tensor_product(&g).unwrap().valence(), (0, 4));
        let eta = TensorValue::covector(&[0.1, 0.2, 0.3]);
        let ee = eta.tensor_product(&eta).unwrap();
        let x = [0.4, -1.0, 2.0];
        let y = [1.5, 0.0, -0.3];
        let a = ee.apply_lower(&[&x, &y])[0];
        let b = ee.apply_lower(&[&y, &x])[0];
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn slot_errors() {
        let id = TensorValue::identity(3);
        assert!(matches!(id.contract(1, 0), Err(TensorError::SlotKind { .. })));
        assert!(matches!(id.contract(0, 5), Err(TensorError::SlotOutOfRange { .. })));
        let metric = sample_metric();
        let v = TensorValue::vector(&[1.0, 2.0, 3.0]);
        assert!(v.metric_convert(0, Direction::Raise, &metric).is_err());
        let a = TensorValue::vector(&[1.0, 2.0]);
        assert!(matches!(
            a.tensor_product(&v),
            Err(TensorError::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn raise_then_lower_is_identity() {
        let metric = sample_metric();
        let t = TensorValue::from_fn(3, 1, 2, |i| (i[0] * 9 + i[1] * 3 + i[2]) as f64 * 0.37 - 2.0);
        let raised = t.metric_convert(1, Direction::Raise, &metric).unwrap();
        assert_eq!(raised.valence(), (2, 1));
        let back = raised.metric_convert(1, Direction::Lower, &metric).unwrap();
        assert!(back.minus(&t).max_abs() < 1e-12);
    }

    #[test]
    fn metric_inertia_and_inverse() {
        let metric = sample_metric();
        assert_eq!(metric.index, 1);
        let prod = metric.matrix() * metric.inverse_matrix();
        assert!((prod - DMatrix::identity(3, 3)).amax() < 1e-12);
        let degenerate = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            MetricAtPoint::new(TensorValue::from_matrix(&degenerate, 0)),
            Err(TensorError::Degenerate(_))
        ));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(MetricAtPoint::new(TensorValue::from_matrix(&asym, 0)).is_err());
    }

    #[test]
    fn adapted_frame_is_pseudo_orthonormal() {
        let metric = sample_metric();
        for first in [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.3, 0.2, 1.0]] {
            let frame = Frame::adapted(&metric, &first);
            let gram = frame.form_components(&metric.matrix());
            for a in 0..3 {
                for b in 0..3 {
                    let want = if a == b { frame.signs[a] } else { 0.0 };
                    assert!((gram[(a, b)] - want).abs() < 1e-12);
                }
            }
            // first vector is parallel to `first`
            let e0 = frame.vector(0);
            let ratio = e0[2] * first[0] - e0[0] * first[2];
            assert!(ratio.abs() < 1e-12);
        }
        assert_eq!(
            Frame::orthonormal(&metric)
                .signs
                .iter()
                .filter(|s| **s < 0.0)
                .count(),
            1
        );
    }
}
