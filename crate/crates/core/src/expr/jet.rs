//! Truncated multivariate Taylor jets.
//!
//! A jet of order `o` in `m` variables stores the Taylor coefficients
//! `c_α = ∂^α f / α!` for every multi-index with `|α| ≤ o`. Monomials are
//! enumerated by degree, then lexicographically, so the layout of a lower
//! order is always a prefix of a higher one. Mixed partials are stored once,
//! which makes their symmetry exact.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::scalar::Scalar;

/// Highest supported jet order.
pub const MAX_ORDER: usize = 3;
/// Highest supported number of variables.
pub const MAX_DIM: usize = 8;

/// Index tables shared by all jets of one dimension.
#[derive(Debug)]
pub struct JetFamily {
    dim: usize,
    /// Exponent vectors, degree-graded.
    monomials: Vec<Vec<u8>>,
    /// Number of monomials of degree ≤ o, for o = 0..=MAX_ORDER.
    counts: [usize; MAX_ORDER + 1],
    /// Product table per result order: (lhs, rhs, out).
    products: Vec<Vec<(u16, u16, u16)>>,
    /// `shift[v][i]` is the index of `monomials[i] + e_v`, for `i < counts[MAX_ORDER - 1]`.
    shift: Vec<Vec<u16>>,
}

impl JetFamily {
    fn build(dim: usize) -> Self {
        let mut monomials: Vec<Vec<u8>> = vec![vec![0; dim]];
        let mut counts = [0usize; MAX_ORDER + 1];
        counts[0] = 1;
        let mut prev: Vec<Vec<u8>> = vec![vec![0; dim]];
        for degree in 1..=MAX_ORDER {
            let mut next: Vec<Vec<u8>> = Vec::new();
            for base in &prev {
                // extend only at or after the last nonzero exponent to avoid duplicates
                let start = base.iter().rposition(|&e| e > 0).unwrap_or(0);
                for v in start..dim {
                    let mut m = base.clone();
                    m[v] += 1;
                    next.push(m);
                }
            }
            next.sort_by(|a, b| b.cmp(a));
            monomials.extend(next.iter().cloned());
            counts[degree] = monomials.len();
            prev = next;
        }

        let index_of = |exps: &[u8]| -> Option<usize> { monomials.iter().position(|m| m == exps) };
        let degree_of = |i: usize| -> usize { monomials[i].iter().map(|&e| e as usize).sum() };

        let mut products = Vec::with_capacity(MAX_ORDER + 1);
        for order in 0..=MAX_ORDER {
            let n = counts[order];
            let mut table = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    if degree_of(a) + degree_of(b) > order {
                        continue;
                    }
                    let sum: Vec<u8> = monomials[a]
                        .iter()
                        .zip(&monomials[b])
                        .map(|(x, y)| x + y)
                        .collect();
                    let out = index_of(&sum).expect("product monomial in layout");
                    table.push((a as u16, b as u16, out as u16));
                }
            }
            products.push(table);
        }

        let mut shift = Vec::with_capacity(dim);
        for v in 0..dim {
            let row = (0..counts[MAX_ORDER - 1])
                .map(|i| {
                    let mut m = monomials[i].clone();
                    m[v] += 1;
                    index_of(&m).expect("shifted monomial in layout") as u16
                })
                .collect();
            shift.push(row);
        }

        Self {
            dim,
            monomials,
            counts,
            products,
            shift,
        }
    }

    /// Shared tables for `dim` variables.
    pub fn get(dim: usize) -> &'static JetFamily {
        static FAMILIES: [OnceLock<JetFamily>; MAX_DIM + 1] = [const { OnceLock::new() }; MAX_DIM + 1];
        assert!(dim <= MAX_DIM, "jet dimension {dim} exceeds {MAX_DIM}");
        FAMILIES[dim].get_or_init(|| JetFamily::build(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of coefficients of a jet of the given order.
    pub fn len(&self, order: usize) -> usize {
        self.counts[order]
    }

    /// Exponent vector of the `i`-th coefficient.
    pub fn monomial(&self, i: usize) -> &[u8] {
        &self.monomials[i]
    }

    /// Coefficient index of the monomial with the given exponents.
    pub fn index_of(&self, exponents: &[u8]) -> Option<usize> {
        self.monomials.iter().position(|m| m == exponents)
    }
}

/// Truncated Taylor expansion of a scalar function at a point.
#[derive(Clone, Debug)]
pub struct Jet<S> {
    family: &'static JetFamily,
    order: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn constant(value: S, dim: usize, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let family = JetFamily::get(dim);
        let mut coeffs = vec![S::zero(); family.len(order)];
        coeffs[0] = value;
        Self {
            family,
            order,
            coeffs,
        }
    }

    /// The coordinate function `x_var` expanded at `value`.
    pub fn variable(value: S, var: usize, dim: usize, order: usize) -> Self {
        assert!(var < dim);
        let mut jet = Self::constant(value, dim, order);
        if order >= 1 {
            jet.coeffs[1 + var] = S::one();
        }
        jet
    }

    /// Builds a jet from raw Taylor coefficients in layout order.
    pub fn from_taylor(dim: usize, order: usize, coeffs: Vec<S>) -> Self {
        let family = JetFamily::get(dim);
        assert_eq!(coeffs.len(), family.len(order), "coefficient count");
        Self {
            family,
            order,
            coeffs,
        }
    }

    pub fn dim(&self) -> usize {
        self.family.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn family(&self) -> &'static JetFamily {
        self.family
    }

    pub fn value(&self) -> S {
        self.coeffs[0]
    }

    /// Taylor coefficients in layout order.
    pub fn taylor(&self) -> &[S] {
        &self.coeffs
    }

    /// Partial derivative `∂_{vars[0]} ∂_{vars[1]} …` at the expansion point.
    ///
    /// Returns `None` when more derivatives are requested than the order holds.
    pub fn derivative(&self, vars: &[usize]) -> Option<S> {
        if vars.len() > self.order {
            return None;
        }
        let mut exps = vec![0u8; self.dim()];
        for &v in vars {
            exps[v] += 1;
        }
        let idx = self.family.index_of(&exps)?;
        let factorial: u32 = exps.iter().map(|&e| (1..=e as u32).product::<u32>()).product();
        Some(self.coeffs[idx] * S::lit(factorial as f64))
    }

    pub fn gradient(&self) -> Option<Vec<S>> {
        (0..self.dim()).map(|i| self.derivative(&[i])).collect()
    }

    pub fn hessian(&self) -> Option<Vec<Vec<S>>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.derivative(&[i, j])).collect())
            .collect()
    }

    /// The same jet with orders above `order` dropped.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self {
            family: self.family,
            order,
            coeffs: self.coeffs[..self.family.len(order)].to_vec(),
        }
    }

    pub fn zero_like(&self) -> Self {
        Self {
            family: self.family,
            order: self.order,
            coeffs: vec![S::zero(); self.coeffs.len()],
        }
    }

    /// `∂f/∂x_var` as a jet of one order less.
    pub fn partial(&self, var: usize) -> Option<Self> {
        if self.order == 0 {
            return None;
        }
        let order = self.order - 1;
        let n = self.family.len(order);
        let shift = &self.family.shift[var];
        let coeffs = (0..n)
            .map(|i| {
                let up = shift[i] as usize;
                let factor = self.family.monomials[up][var];
                self.coeffs[up] * S::lit(factor as f64)
            })
            .collect();
        Some(Self {
            family: self.family,
            order,
            coeffs,
        })
    }

    fn check_family(&self, rhs: &Self) {
        assert_eq!(self.family.dim, rhs.family.dim, "jet dimension mismatch");
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self.check_family(rhs);
        let order = self.order.min(rhs.order);
        let mut coeffs = vec![S::zero(); self.family.len(order)];
        for &(a, b, out) in &self.family.products[order] {
            coeffs[out as usize] = coeffs[out as usize] + self.coeffs[a as usize] * rhs.coeffs[b as usize];
        }
        Self {
            family: self.family,
            order,
            coeffs,
        }
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(S, S) -> S) -> Self {
        self.check_family(rhs);
        let order = self.order.min(rhs.order);
        let n = self.family.len(order);
        let coeffs = (0..n).map(|i| f(self.coeffs[i], rhs.coeffs[i])).collect();
        Self {
            family: self.family,
            order,
            coeffs,
        }
    }

    pub fn scale(&self, s: S) -> Self {
        Self {
            family: self.family,
            order: self.order,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// Evaluates `f(self)` from the Taylor coefficients `series[k] = f^{(k)}(a)/k!`
    /// of `f` at `a = self.value()`.
    pub fn compose(&self, series: &[S]) -> Self {
        assert!(series.len() > self.order, "series too short for jet order");
        let mut h = self.clone();
        h.coeffs[0] = S::zero();
        let mut acc = Self::constant(series[self.order], self.dim(), self.order);
        for k in (0..self.order).rev() {
            acc = acc.mul_ref(&h);
            acc.coeffs[0] = acc.coeffs[0] + series[k];
        }
        acc
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        let series: Vec<S> = (0..=self.order)
            .map(|k| e / S::lit(factorial(k)))
            .collect();
        self.compose(&series)
    }

    /// Natural logarithm; `None` unless the value is positive.
    pub fn ln(&self) -> Option<Self> {
        let a = self.value();
        if !(a > S::zero()) {
            return None;
        }
        let series: Vec<S> = (0..=self.order)
            .map(|k| {
                if k == 0 {
                    a.ln()
                } else {
                    let sign = if k % 2 == 1 { S::one() } else { -S::one() };
                    sign / (S::lit(k as f64) * a.powi(k as i32))
                }
            })
            .collect();
        Some(self.compose(&series))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let series: Vec<S> = (0..=self.order)
            .map(|k| cycle[k % 4] / S::lit(factorial(k)))
            .collect();
        self.compose(&series)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let series: Vec<S> = (0..=self.order)
            .map(|k| cycle[k % 4] / S::lit(factorial(k)))
            .collect();
        self.compose(&series)
    }

    /// `1/self`; `None` at a zero value.
    pub fn recip(&self) -> Option<Self> {
        let a = self.value();
        if a == S::zero() || !a.is_finite() {
            return None;
        }
        let series: Vec<S> = (0..=self.order)
            .map(|k| {
                let sign = if k % 2 == 0 { S::one() } else { -S::one() };
                sign / a.powi(k as i32 + 1)
            })
            .collect();
        Some(self.compose(&series))
    }

    /// `self^p` for a constant exponent.
    ///
    /// Non-negative integer exponents are expanded by repeated products and
    /// are valid everywhere; other integers need a nonzero value, and
    /// fractional exponents a positive one (non-negative at order 0).
    pub fn powf(&self, p: S) -> Option<Self> {
        let a = self.value();
        let is_int = p == p.round();
        if is_int && p >= S::zero() && p <= S::lit(64.0) {
            let n = p.to_usize().unwrap_or(0);
            let mut acc = Self::constant(S::one(), self.dim(), self.order);
            for _ in 0..n {
                acc = acc.mul_ref(self);
            }
            return Some(acc);
        }
        let ok = if is_int {
            a != S::zero()
        } else if self.order == 0 {
            a >= S::zero() && p > S::zero() || a > S::zero()
        } else {
            a > S::zero()
        };
        if !ok {
            return None;
        }
        let mut coef = S::one();
        let series: Vec<S> = (0..=self.order)
            .map(|k| {
                if k > 0 {
                    coef = coef * (p - S::lit((k - 1) as f64)) / S::lit(k as f64);
                }
                coef * a.powf(p - S::lit(k as f64))
            })
            .collect();
        Some(self.compose(&series))
    }

    pub fn sqrt(&self) -> Option<Self> {
        self.powf(S::lit(0.5))
    }

    /// Largest absolute difference between matching coefficients over the common order.
    pub fn max_abs_diff(&self, other: &Self) -> S {
        let n = self.family.len(self.order.min(other.order));
        (0..n)
            .map(|i| (self.coeffs[i] - other.coeffs[i]).abs())
            .fold(S::zero(), S::max)
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: Self) -> Self {
        self.zip_with(&rhs, |a, b| a + b)
    }
}

impl<S: Scalar> Add<&Jet<S>> for &Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: &Jet<S>) -> Jet<S> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: Self) -> Self {
        self.zip_with(&rhs, |a, b| a - b)
    }
}

impl<S: Scalar> Sub<&Jet<S>> for &Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: &Jet<S>) -> Jet<S> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<S: Scalar> Mul for Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl<S: Scalar> Mul<&Jet<S>> for &Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: &Jet<S>) -> Jet<S> {
        self.mul_ref(rhs)
    }
}

impl<S: Scalar> Mul<S> for Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: S) -> Self {
        self.scale(rhs)
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Self {
        self.scale(-S::one())
    }
}
