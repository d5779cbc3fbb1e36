//! Dense tensors at a point: contraction, index gymnastics, inner products and
//! orthonormal frames.
//!
//! Components are stored row-major with slot 0 most significant. The same
//! container holds plain values ([`PointTensor`]) and jet-valued fields
//! ([`JetTensor`]), so index manipulation is written once.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::expr::{Jet, MAX_DIM};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variance {
    Up,
    Down,
}

impl Variance {
    pub fn flipped(self) -> Self {
        match self {
            Variance::Up => Variance::Down,
            Variance::Down => Variance::Up,
        }
    }
}

pub use Variance::{Down, Up};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("dimension {0} outside 1..={MAX_DIM}")]
    Dimension(usize),
    #[error("component count {got} does not match dim^rank = {expected}")]
    Length { expected: usize, got: usize },
    #[error("slots {0} and {1} have the same variance")]
    SameVariance(usize, usize),
    #[error("slot {slot} out of range for rank {rank}")]
    Slot { slot: usize, rank: usize },
    #[error("slot {0} has the wrong variance for this operation")]
    WrongVariance(usize),
    #[error("signature mismatch")]
    Signature,
    #[error("metric is not positive definite")]
    NotPositiveDefinite,
}

/// Ring operations the tensor algebra needs from a component type.
pub trait Component<S>:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> + Mul<S, Output = Self>
{
    fn zero_like(&self) -> Self;
}

impl<S: Scalar> Component<S> for S {
    fn zero_like(&self) -> S {
        S::zero()
    }
}

impl<S: Scalar> Component<S> for Jet<S> {
    fn zero_like(&self) -> Jet<S> {
        Jet::zero_like(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<E> {
    dim: usize,
    sig: Vec<Variance>,
    data: Vec<E>,
}

/// Tensor of plain components at a point.
pub type PointTensor<S> = Tensor<S>;
/// Tensor whose components are jets of the component functions at a point.
pub type JetTensor<S> = Tensor<Jet<S>>;

fn check_dim(dim: usize) -> Result<(), TensorError> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(TensorError::Dimension(dim))
    }
}

/// Iterates all multi-indices of `rank` slots over `0..dim`, in storage order.
pub fn multi_indices(dim: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.pow(rank as u32);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; rank];
        for slot in (0..rank).rev() {
            idx[slot] = flat % dim;
            flat /= dim;
        }
        idx
    })
}

impl<E> Tensor<E> {
    pub fn new(dim: usize, sig: Vec<Variance>, data: Vec<E>) -> Result<Self, TensorError> {
        check_dim(dim)?;
        let expected = dim.pow(sig.len() as u32);
        if data.len() != expected {
            return Err(TensorError::Length {
                expected,
                got: data.len(),
            });
        }
        Ok(Self { dim, sig, data })
    }

    /// Builds a tensor from a component function of the multi-index.
    ///
    /// Panics if `dim` is outside `1..=MAX_DIM`.
    pub fn from_fn(dim: usize, sig: &[Variance], mut f: impl FnMut(&[usize]) -> E) -> Self {
        check_dim(dim).expect("tensor dimension");
        let data = multi_indices(dim, sig.len()).map(|idx| f(&idx)).collect();
        Self {
            dim,
            sig: sig.to_vec(),
            data,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.sig.len()
    }

    pub fn signature(&self) -> &[Variance] {
        &self.sig
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &E {
        &self.data[self.offset(idx)]
    }

    pub fn map<F>(&self, f: impl FnMut(&E) -> F) -> Tensor<F> {
        Tensor {
            dim: self.dim,
            sig: self.sig.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    fn check_slot(&self, slot: usize) -> Result<(), TensorError> {
        if slot < self.rank() {
            Ok(())
        } else {
            Err(TensorError::Slot {
                slot,
                rank: self.rank(),
            })
        }
    }
}

impl<E: Clone> Tensor<E> {
    /// Reorders slots: slot `s` of the result is slot `perm[s]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rank());
        let sig: Vec<Variance> = perm.iter().map(|&p| self.sig[p]).collect();
        let mut src = vec![0; self.rank()];
        Self::from_fn(self.dim, &sig, |idx| {
            for (s, &p) in perm.iter().enumerate() {
                src[p] = idx[s];
            }
            self.get(&src).clone()
        })
    }
}

impl<E> Tensor<E> {
    /// Sum of `term(a, b)` over all index pairs, for a component-wise binary op.
    pub fn zip_with<F, G>(&self, other: &Tensor<F>, mut f: impl FnMut(&E, &F) -> G) -> Result<Tensor<G>, TensorError> {
        if self.dim != other.dim || self.sig != other.sig {
            return Err(TensorError::Signature);
        }
        Ok(Tensor {
            dim: self.dim,
            sig: self.sig.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }
}

fn sum_terms<S, E: Component<S>>(mut terms: impl Iterator<Item = E>) -> E {
    let first = terms.next().expect("at least one term");
    terms.fold(first, |acc, t| acc + t)
}

impl<E> Tensor<E> {
    /// Einstein contraction of two slots of opposite variance.
    pub fn contract<S>(&self, slot_a: usize, slot_b: usize) -> Result<Self, TensorError>
    where
        E: Component<S>,
    {
        self.check_slot(slot_a)?;
        self.check_slot(slot_b)?;
        if slot_a == slot_b || self.sig[slot_a] == self.sig[slot_b] {
            return Err(TensorError::SameVariance(slot_a, slot_b));
        }
        let keep: Vec<usize> = (0..self.rank()).filter(|&s| s != slot_a && s != slot_b).collect();
        let sig: Vec<Variance> = keep.iter().map(|&s| self.sig[s]).collect();
        let mut full = vec![0; self.rank()];
        Ok(Self::from_fn(self.dim, &sig, |idx| {
            for (k, &s) in keep.iter().enumerate() {
                full[s] = idx[k];
            }
            sum_terms((0..self.dim).map(|i| {
                full[slot_a] = i;
                full[slot_b] = i;
                self.get(&full).clone()
            }))
        }))
    }

    fn transvect<S>(&self, slot: usize, metric: &Tensor<E>) -> Self
    where
        E: Component<S>,
    {
        let mut sig = self.sig.clone();
        sig[slot] = sig[slot].flipped();
        let mut src = vec![0; self.rank()];
        Self::from_fn(self.dim, &sig, |idx| {
            src.copy_from_slice(idx);
            sum_terms((0..self.dim).map(|p| {
                src[slot] = p;
                metric.get(&[idx[slot], p]).clone() * self.get(&src).clone()
            }))
        })
    }

    /// Raises a covariant slot with the inverse metric.
    pub fn raise_index<S>(&self, slot: usize, g_inv: &Tensor<E>) -> Result<Self, TensorError>
    where
        E: Component<S>,
    {
        self.check_slot(slot)?;
        if self.sig[slot] != Down {
            return Err(TensorError::WrongVariance(slot));
        }
        Ok(self.transvect(slot, g_inv))
    }

    /// Lowers a contravariant slot with the metric.
    pub fn lower_index<S>(&self, slot: usize, g: &Tensor<E>) -> Result<Self, TensorError>
    where
        E: Component<S>,
    {
        self.check_slot(slot)?;
        if self.sig[slot] != Up {
            return Err(TensorError::WrongVariance(slot));
        }
        Ok(self.transvect(slot, g))
    }

    /// Outer product; slots of `self` come first.
    pub fn outer<S>(&self, other: &Self) -> Self
    where
        E: Component<S>,
    {
        let r = self.rank();
        let mut sig = self.sig.clone();
        sig.extend_from_slice(&other.sig);
        Self::from_fn(self.dim, &sig, |idx| {
            self.get(&idx[..r]).clone() * other.get(&idx[r..]).clone()
        })
    }

    pub fn scaled<S: Copy>(&self, s: S) -> Self
    where
        E: Component<S>,
    {
        self.map(|e| e.clone() * s)
    }
}

impl<E> Add for &Tensor<E>
where
    E: Clone + Add<Output = E>,
{
    type Output = Tensor<E>;
    fn add(self, rhs: Self) -> Tensor<E> {
        self.zip_with(rhs, |a, b| a.clone() + b.clone()).expect("matching signatures")
    }
}

impl<E> Sub for &Tensor<E>
where
    E: Clone + Sub<Output = E>,
{
    type Output = Tensor<E>;
    fn sub(self, rhs: Self) -> Tensor<E> {
        self.zip_with(rhs, |a, b| a.clone() - b.clone()).expect("matching signatures")
    }
}

/// A metric together with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric<E> {
    pub g: Tensor<E>,
    pub inv: Tensor<E>,
}

impl<S: Scalar> Metric<S> {
    /// Inverts `g` via Cholesky; fails if `g` is not symmetric positive definite.
    pub fn from_values(g: PointTensor<S>) -> Result<Self, TensorError> {
        if g.sig != [Down, Down] {
            return Err(TensorError::Signature);
        }
        let inv_flat = spd_inverse(g.data(), g.dim())?;
        let inv = Tensor::new(g.dim(), vec![Up, Up], inv_flat)?;
        Ok(Self { g, inv })
    }
}

impl<E> Metric<E> {
    /// Full contraction `⟨a, b⟩` using `g` on contravariant and `g⁻¹` on covariant slot pairs.
    pub fn inner<S>(&self, a: &Tensor<E>, b: &Tensor<E>) -> Result<E, TensorError>
    where
        E: Component<S>,
    {
        if a.dim != b.dim || a.sig != b.sig {
            return Err(TensorError::Signature);
        }
        let mut flipped = a.clone();
        for slot in 0..a.rank() {
            flipped = match a.sig[slot] {
                Down => flipped.transvect(slot, &self.inv),
                Up => flipped.transvect(slot, &self.g),
            };
        }
        Ok(sum_terms(
            flipped.data.iter().zip(&b.data).map(|(x, y)| x.clone() * y.clone()),
        ))
    }
}

/// `inner(g, a, b)` for plain tensors.
pub fn inner<S: Scalar>(g: &PointTensor<S>, a: &PointTensor<S>, b: &PointTensor<S>) -> Result<S, TensorError> {
    Metric::from_values(g.clone())?.inner(a, b)
}

impl<S: Scalar> Tensor<S> {
    pub fn max_abs(&self) -> S {
        self.data.iter().fold(S::zero(), |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> S {
        self.data
            .iter()
            .zip(&other.data)
            .fold(S::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }

    /// Index of the largest absolute component.
    pub fn argmax_abs(&self) -> Vec<usize> {
        let (best, _) = self
            .data
            .iter()
            .enumerate()
            .fold((0, S::zero()), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
        multi_indices(self.dim, self.rank()).nth(best).unwrap_or_default()
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, &[Up, Down], |i| if i[0] == i[1] { S::one() } else { S::zero() })
    }
}

impl<S: Scalar> Tensor<Jet<S>> {
    /// Order-0 values of every component.
    pub fn value(&self) -> PointTensor<S> {
        self.map(|j| j.value())
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|j| j.truncate(order))
    }

    /// Lowest jet order among the components.
    pub fn order(&self) -> usize {
        self.data.iter().map(|j| j.order()).min().unwrap_or(0)
    }

    /// Embeds constant values as jets of the given order.
    pub fn constant(values: &PointTensor<S>, order: usize) -> Self {
        let dim = values.dim();
        values.map(|&v| Jet::constant(v, dim, order))
    }
}

/// Cholesky factor `L` (row-major, lower triangular) with `G = L Lᵀ`.
pub fn cholesky<S: Scalar>(g: &[S], m: usize) -> Result<Vec<S>, TensorError> {
    let mut l = vec![S::zero(); m * m];
    for i in 0..m {
        for j in 0..=i {
            let mut sum = g[i * m + j];
            for k in 0..j {
                sum = sum - l[i * m + k] * l[j * m + k];
            }
            if i == j {
                if !(sum > S::zero()) || !sum.is_finite() {
                    return Err(TensorError::NotPositiveDefinite);
                }
                l[i * m + i] = sum.sqrt();
            } else {
                l[i * m + j] = sum / l[j * m + j];
            }
        }
    }
    Ok(l)
}

/// Inverse of a symmetric positive definite matrix (row-major).
pub fn spd_inverse<S: Scalar>(g: &[S], m: usize) -> Result<Vec<S>, TensorError> {
    for i in 0..m {
        for j in 0..i {
            let (a, b) = (g[i * m + j], g[j * m + i]);
            if (a - b).abs() > S::lit(1e-12) * (S::one() + a.abs().max(b.abs())) {
                return Err(TensorError::NotPositiveDefinite);
            }
        }
    }
    let l = cholesky(g, m)?;
    // L⁻¹ by forward substitution, then G⁻¹ = L⁻ᵀ L⁻¹
    let mut linv = vec![S::zero(); m * m];
    for col in 0..m {
        for i in col..m {
            let mut sum = if i == col { S::one() } else { S::zero() };
            for k in col..i {
                sum = sum - l[i * m + k] * linv[k * m + col];
            }
            linv[i * m + col] = sum / l[i * m + i];
        }
    }
    let mut inv = vec![S::zero(); m * m];
    for i in 0..m {
        for j in 0..m {
            let mut sum = S::zero();
            for k in i.max(j)..m {
                sum = sum + linv[k * m + i] * linv[k * m + j];
            }
            inv[i * m + j] = sum;
        }
    }
    Ok(inv)
}

/// A `g`-orthonormal basis of the tangent space.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalFrame<S> {
    /// `vectors[i][k]` is the `k`-th coordinate component of `e_i`.
    pub vectors: Vec<Vec<S>>,
}

/// Frame from the inverse transpose of the Cholesky factor of `g`.
pub fn orthonormal_frame<S: Scalar>(g: &PointTensor<S>) -> Result<OrthonormalFrame<S>, TensorError> {
    if g.signature() != [Down, Down] {
        return Err(TensorError::Signature);
    }
    let m = g.dim();
    let l = cholesky(g.data(), m)?;
    // Solve Lᵀ E = I column by column (back substitution); E is upper triangular.
    let mut e = vec![S::zero(); m * m];
    for col in 0..m {
        for i in (0..=col).rev() {
            let mut sum = if i == col { S::one() } else { S::zero() };
            for k in i + 1..=col {
                sum = sum - l[k * m + i] * e[k * m + col];
            }
            e[i * m + col] = sum / l[i * m + i];
        }
    }
    let vectors = (0..m).map(|i| (0..m).map(|k| e[k * m + i]).collect()).collect();
    Ok(OrthonormalFrame { vectors })
}

impl<S: Scalar> OrthonormalFrame<S> {
    /// `Σ_i t(e_i, e_i)` for a covariant 2-tensor.
    pub fn trace(&self, t: &PointTensor<S>) -> Result<S, TensorError> {
        if t.signature() != [Down, Down] {
            return Err(TensorError::Signature);
        }
        let m = t.dim();
        let mut acc = S::zero();
        for e in &self.vectors {
            for a in 0..m {
                for b in 0..m {
                    acc = acc + *t.get(&[a, b]) * e[a] * e[b];
                }
            }
        }
        Ok(acc)
    }

    /// Largest entry of `|EᵀGE − I|`.
    pub fn orthonormality_defect(&self, g: &PointTensor<S>) -> S {
        let m = g.dim();
        let mut worst = S::zero();
        for (i, ei) in self.vectors.iter().enumerate() {
            for (j, ej) in self.vectors.iter().enumerate() {
                let mut v = S::zero();
                for a in 0..m {
                    for b in 0..m {
                        v = v + ei[a] * *g.get(&[a, b]) * ej[b];
                    }
                }
                let target = if i == j { S::one() } else { S::zero() };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn metric2(a: f64, b: f64, c: f64) -> PointTensor<f64> {
        Tensor::new(2, vec![Down, Down], vec![a, b, b, c]).unwrap()
    }

    /// Centroaffine metric at (1, 1) for exponents (a1, a2).
    fn centroaffine_g(a1: f64, a2: f64) -> PointTensor<f64> {
        let s = a1 + a2 + 1.0;
        metric2(a1 * (a1 + 1.0) / s, a1 * a2 / s, a2 * (a2 + 1.0) / s)
    }

    #[test]
    fn trace_of_identity_is_dimension() {
        for m in 1..=4 {
            let id = PointTensor::<f64>::identity(m);
            let s = id.contract(0, 1).unwrap();
            assert_eq!(s.rank(), 0);
            assert_eq!(s.data()[0], m as f64);
        }
    }

    #[test]
    fn contract_delta_with_vector() {
        let v = Tensor::new(3, vec![Up], vec![1.0, -2.0, 0.5]).unwrap();
        let t = PointTensor::<f64>::identity(3).outer(&v);
        // δ^i_j v^k, contract j with k
        let out = t.contract(1, 2).unwrap();
        assert_eq!(out.data(), v.data());
    }

    #[test]
    fn contract_rejects_same_variance() {
        let g = metric2(1.0, 0.0, 1.0);
        assert_eq!(g.contract(0, 1), Err(TensorError::SameVariance(0, 1)));
        assert!(matches!(g.contract(0, 2), Err(TensorError::Slot { .. })));
    }

    #[test]
    fn inverse_contraction_is_kronecker() {
        let metric = Metric::from_values(centroaffine_g(1.0, 2.0)).unwrap();
        // hand inverse of [[1/2, 1/2], [1/2, 3/2]]: det = 1/2
        let expected = [3.0, -1.0, -1.0, 1.0];
        for (a, b) in metric.inv.data().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let prod = metric.inv.outer(&metric.g).contract(1, 2).unwrap();
        let id = PointTensor::<f64>::identity(2);
        let prod = Tensor::new(2, vec![Up, Down], prod.data().to_vec()).unwrap();
        assert!(prod.max_abs_diff(&id) < 1e-12);
    }

    #[test]
    fn raising_with_identity_is_noop() {
        let id = metric2(1.0, 0.0, 1.0);
        let inv = Tensor::new(2, vec![Up, Up], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let w = Tensor::new(2, vec![Down], vec![0.3, -0.7]).unwrap();
        let v = w.raise_index(0, &inv).unwrap();
        assert_eq!(v.data(), w.data());
        assert_eq!(v.signature(), &[Up]);
        let back = v.lower_index(0, &id).unwrap();
        assert_eq!(back, w);
        assert_eq!(w.lower_index(0, &id), Err(TensorError::WrongVariance(0)));
    }

    #[test]
    fn centroaffine_covector_raised() {
        // η = (0, -1) at (1, 1) for a = (1, 2); T = g⁻¹η = (1, -1) from the hand inverse
        let metric = Metric::from_values(centroaffine_g(1.0, 2.0)).unwrap();
        let eta = Tensor::new(2, vec![Down], vec![0.0, -1.0]).unwrap();
        let t = eta.raise_index(0, &metric.inv).unwrap();
        assert!((t.data()[0] - 1.0).abs() < 1e-12);
        assert!((t.data()[1] + 1.0).abs() < 1e-12);
        let back = t.lower_index(0, &metric.g).unwrap();
        assert!(back.max_abs_diff(&eta) < 1e-12);
    }

    #[test]
    fn inner_products() {
        let g = centroaffine_g(2.0, 3.0);
        let zero = Tensor::new(2, vec![Down, Down, Down], vec![0.0; 8]).unwrap();
        assert_eq!(inner(&g, &zero, &zero).unwrap(), 0.0);
        assert!((inner(&g, &g, &g).unwrap() - 2.0).abs() < 1e-12);
        let v = Tensor::new(2, vec![Up], vec![1.0]);
        assert!(v.is_err());
        let v = Tensor::new(2, vec![Up], vec![1.0, 0.0]).unwrap();
        assert_eq!(inner(&g, &g, &v), Err(TensorError::Signature));
    }

    #[test]
    fn flat_constant_tchebychev_norm() {
        // flat ℝ², C₁₁₁ = 2, C₁₂₂ = 1: K^k_ij = -C_ijk/2, T^k = Σ_i K^k_ii
        let k = |i: usize, j: usize, l: usize| -> f64 {
            let mut s = [i, j, l];
            s.sort();
            match s {
                [0, 0, 0] => -1.0,
                [0, 1, 1] => -0.5,
                _ => 0.0,
            }
        };
        let t = Tensor::from_fn(2, &[Up], |idx| k(0, 0, idx[0]) + k(1, 1, idx[0]));
        let g = metric2(1.0, 0.0, 1.0);
        // by hand: T = (-1 - 0.5, 0) → |T|² = 2.25
        assert!((inner(&g, &t, &t).unwrap() - 2.25).abs() < 1e-15);
    }

    #[test]
    fn frames() {
        let f = orthonormal_frame(&metric2(1.0, 0.0, 1.0)).unwrap();
        assert_eq!(f.vectors, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let f = orthonormal_frame(&metric2(4.0, 0.0, 9.0)).unwrap();
        assert_eq!(f.vectors, vec![vec![0.5, 0.0], vec![0.0, 1.0 / 3.0]]);
        let g = centroaffine_g(1.0, 1.0);
        let f = orthonormal_frame(&g).unwrap();
        assert!(f.orthonormality_defect(&g) < 1e-12);
        assert_eq!(
            orthonormal_frame(&metric2(1.0, 2.0, 1.0)),
            Err(TensorError::NotPositiveDefinite)
        );
    }

    #[test]
    fn permute_swaps_slots() {
        let t = Tensor::new(2, vec![Up, Down], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let p = t.permute(&[1, 0]);
        assert_eq!(p.signature(), &[Down, Up]);
        assert_eq!(p.data(), &[1.0, 3.0, 2.0, 4.0]);
    }

    fn spd3() -> impl Strategy<Value = PointTensor<f64>> {
        prop::collection::vec(-1.0f64..1.0, 9).prop_map(|a| {
            // A Aᵀ + I
            PointTensor::from_fn(3, &[Down, Down], |i| {
                let dot: f64 = (0..3).map(|k| a[i[0] * 3 + k] * a[i[1] * 3 + k]).sum();
                dot + if i[0] == i[1] { 1.0 } else { 0.0 }
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn frame_trace_equals_metric_trace(g in spd3(), raw in prop::collection::vec(-2.0f64..2.0, 9)) {
            let t = PointTensor::from_fn(3, &[Down, Down], |i| raw[i[0] * 3 + i[1]] + raw[i[1] * 3 + i[0]]);
            let frame = orthonormal_frame(&g).unwrap();
            prop_assert!(frame.orthonormality_defect(&g) < 1e-12);
            let metric = Metric::from_values(g).unwrap();
            let by_metric = t.raise_index(0, &metric.inv).unwrap().contract(0, 1).unwrap().data()[0];
            let by_frame = frame.trace(&t).unwrap();
            prop_assert!((by_metric - by_frame).abs() <= 1e-12 * (1.0 + by_metric.abs()));
        }

        #[test]
        fn inner_invariant_under_raise_lower(g in spd3(), a in prop::collection::vec(-1.0f64..1.0, 9), b in prop::collection::vec(-1.0f64..1.0, 9)) {
            let metric = Metric::from_values(g).unwrap();
            let ta = Tensor::new(3, vec![Down, Down], a).unwrap();
            let tb = Tensor::new(3, vec![Down, Down], b).unwrap();
            let direct = metric.inner(&ta, &tb).unwrap();
            let ra = ta.raise_index(1, &metric.inv).unwrap();
            let rb = tb.raise_index(1, &metric.inv).unwrap();
            let mixed = metric.inner(&ra, &rb).unwrap();
            prop_assert!((direct - mixed).abs() <= 1e-10 * (1.0 + direct.abs()));
            let self_inner = metric.inner(&ta, &ta).unwrap();
            prop_assert!(self_inner >= -1e-12);
        }
    }
}
