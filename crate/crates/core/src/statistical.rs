//! Statistical structures `(g, ∇)` built from a metric and a totally symmetric cubic form.
//!
//! `g(∇_X Y, Z) = g(∇^g_X Y, Z) − ½ C(X, Y, Z)`, so the difference tensor is
//! `K^k_ij = −½ g^{kl} C_ijl` and the dual connection is `∇̄ = ∇^g − K`.

use thiserror::Error;

use crate::expr::Jet;
use crate::geometry::{self, covariant_derivative, partial, rough_laplacian, GeometryError};
use crate::scalar::Scalar;
use crate::tensor::{multi_indices, Down, JetTensor, Metric, PointTensor, Tensor, Up};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatError {
    #[error("cubic form is not totally symmetric (max asymmetry {max_asymmetry:e} at {at:?})")]
    AsymmetricCubic { max_asymmetry: f64, at: Vec<usize> },
    #[error("constant-curvature fit needs dimension ≥ 2")]
    DimensionTooSmall,
    #[error("no samples to fit")]
    NoSamples,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl From<crate::tensor::TensorError> for StatError {
    fn from(e: crate::tensor::TensorError) -> Self {
        StatError::Geometry(e.into())
    }
}

type Result<T> = std::result::Result<T, StatError>;

/// Largest deviation of a covariant 3-tensor from total symmetry, and where it occurs.
pub fn cubic_asymmetry<S: Scalar>(c: &PointTensor<S>) -> (S, Vec<usize>) {
    let mut worst = (S::zero(), vec![0, 0, 0]);
    for idx in multi_indices(c.dim(), 3) {
        let v = *c.get(&idx);
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        for p in [[j, i, k], [i, k, j], [k, j, i], [j, k, i], [k, i, j]] {
            let d = (v - *c.get(&p)).abs();
            if d > worst.0 {
                worst = (d, idx.clone());
            }
        }
    }
    worst
}

/// `K^k_ij = −½ g^{kl} C_ijl`, rejecting a cubic form that is not totally symmetric.
pub fn difference_tensor<S: Scalar>(metric: &Metric<Jet<S>>, c: &JetTensor<S>) -> Result<JetTensor<S>> {
    let values = c.value();
    let (max, at) = cubic_asymmetry(&values);
    if max > S::lit(1e-12) * (S::one() + values.max_abs()) {
        return Err(StatError::AsymmetricCubic {
            max_asymmetry: max.to_f64_lossy(),
            at,
        });
    }
    Ok(difference_tensor_unchecked(metric, c)?)
}

/// [`difference_tensor`] without the symmetry check; used to build negative controls.
pub fn difference_tensor_unchecked<S: Scalar>(
    metric: &Metric<Jet<S>>,
    c: &JetTensor<S>,
) -> std::result::Result<JetTensor<S>, GeometryError> {
    let raised = c.raise_index(2, &metric.inv)?; // (i, j, k)
    Ok(raised.permute(&[2, 0, 1]).scaled(S::lit(-0.5)))
}

/// `C(X,Y,Z) = −2 g(K_X Y, Z)`.
pub fn cubic_from_difference<S: Scalar>(metric: &Metric<Jet<S>>, k: &JetTensor<S>) -> std::result::Result<JetTensor<S>, GeometryError> {
    let lowered = k.lower_index(0, &metric.g)?; // (k, i, j)
    Ok(lowered.permute(&[1, 2, 0]).scaled(S::lit(-2.0)))
}

/// Coefficients of `∇ = ∇^g + K` and `∇̄ = ∇^g − K`.
pub fn connections<S: Scalar>(gamma: &JetTensor<S>, k: &JetTensor<S>) -> (JetTensor<S>, JetTensor<S>) {
    (gamma + k, gamma - k)
}

/// The conjugate connection from its defining duality `X g(Y,Z) = g(∇_X Y, Z) + g(Y, ∇̄_X Z)`.
pub fn conjugate_by_duality<S: Scalar>(metric: &Metric<Jet<S>>, conn: &JetTensor<S>) -> std::result::Result<JetTensor<S>, GeometryError> {
    let dg = partial(&metric.g)?; // [y][z][x] = ∂_x g_yz
    let m = dg.dim();
    let w = Tensor::from_fn(m, &[Down, Down, Down], |idx| {
        let (y, z, x) = (idx[0], idx[1], idx[2]);
        let mut acc = dg.get(&[y, z, x]).clone();
        for p in 0..m {
            acc = acc - conn.get(&[p, x, y]).clone() * metric.g.get(&[p, z]).clone();
        }
        acc
    });
    // Ā^q_xz = g^{qy} W_yzx
    Ok(w.raise_index(0, &metric.inv)?.permute(&[0, 2, 1]))
}

/// Conjugate of a connection given the Levi-Civita coefficients: `2Γ − A`.
pub fn conjugate<S: Scalar>(gamma: &JetTensor<S>, conn: &JetTensor<S>) -> JetTensor<S> {
    &(gamma + gamma) - conn
}

/// Tchebychev field `T = tr_g K` and its dual covector `η = g(T, ·)`.
pub fn tchebychev<S: Scalar>(metric: &Metric<Jet<S>>, k: &JetTensor<S>) -> std::result::Result<(JetTensor<S>, JetTensor<S>), GeometryError> {
    let t = k.raise_index(2, &metric.inv)?.contract(1, 2)?;
    let eta = t.lower_index(0, &metric.g)?;
    Ok((t, eta))
}

/// Max over coordinate fields of `|(∇_X g)(Y,Z) − (∇_Y g)(X,Z)|`.
pub fn codazzi_residual<S: Scalar>(metric: &Metric<Jet<S>>, conn: &JetTensor<S>) -> std::result::Result<S, GeometryError> {
    let d = covariant_derivative(&metric.g, conn)?.value(); // [y][z][x]
    let mut worst = S::zero();
    for idx in multi_indices(d.dim(), 3) {
        let (y, z, x) = (idx[0], idx[1], idx[2]);
        worst = worst.max((*d.get(&[y, z, x]) - *d.get(&[x, z, y])).abs());
    }
    Ok(worst)
}

/// Max over coordinate fields of `|X g(Y,Z) − g(∇_X Y, Z) − g(Y, ∇̄_X Z)|`.
pub fn duality_residual<S: Scalar>(metric: &Metric<Jet<S>>, conn: &JetTensor<S>, conj: &JetTensor<S>) -> std::result::Result<S, GeometryError> {
    let dg = partial(&metric.g)?.value();
    let g = metric.g.value();
    let (a, b) = (conn.value(), conj.value());
    let m = g.dim();
    let mut worst = S::zero();
    for idx in multi_indices(m, 3) {
        let (x, y, z) = (idx[0], idx[1], idx[2]);
        let mut r = *dg.get(&[y, z, x]);
        for p in 0..m {
            r = r - *a.get(&[p, x, y]) * *g.get(&[p, z]) - *b.get(&[p, x, z]) * *g.get(&[y, p]);
        }
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// `g(R(X,Y)Z, W)` stored as `[x][y][z][w]`.
pub fn lower_curvature<S: Scalar>(r: &PointTensor<S>, g: &PointTensor<S>) -> PointTensor<S> {
    let m = r.dim();
    Tensor::from_fn(m, &[Down, Down, Down, Down], |idx| {
        let (x, y, z, w) = (idx[0], idx[1], idx[2], idx[3]);
        (0..m).fold(S::zero(), |acc, q| acc + *g.get(&[w, q]) * *r.get(&[q, x, y, z]))
    })
}

/// Curvature interchange `g(L(Z,W)X, Y) = g(R(X,Y)Z, W)`, stored like `R`.
pub fn curvature_interchange<S: Scalar>(r: &PointTensor<S>, metric: &Metric<S>) -> PointTensor<S> {
    let low = lower_curvature(r, &metric.g);
    let m = r.dim();
    // L^l_{zwx} = g^{ly} R_low(x, y, z, w)
    Tensor::from_fn(m, &[Up, Down, Down, Down], |idx| {
        let (l, z, w, x) = (idx[0], idx[1], idx[2], idx[3]);
        (0..m).fold(S::zero(), |acc, y| acc + *metric.inv.get(&[l, y]) * *low.get(&[x, y, z, w]))
    })
}

/// Curvature data of a conjugate pair at a point.
#[derive(Debug, Clone)]
pub struct Curvatures<S> {
    pub r: PointTensor<S>,
    pub r_bar: PointTensor<S>,
    pub ric: PointTensor<S>,
    pub l: PointTensor<S>,
    pub l_bar: PointTensor<S>,
}

pub fn curvatures<S: Scalar>(conn: &JetTensor<S>, conj: &JetTensor<S>, metric: &Metric<S>) -> std::result::Result<Curvatures<S>, GeometryError> {
    let r = geometry::riemann(conn)?;
    let ric = geometry::ricci(&r)?.value();
    let r = r.value();
    let r_bar = geometry::riemann(conj)?.value();
    let l = curvature_interchange(&r, metric);
    let l_bar = curvature_interchange(&r_bar, metric);
    Ok(Curvatures {
        r,
        r_bar,
        ric,
        l,
        l_bar,
    })
}

impl<S: Scalar> Curvatures<S> {
    /// `max |g(R̄(X,Y)Z,W) + g(Z,R(X,Y)W)|`.
    pub fn pairing_residual(&self, g: &PointTensor<S>) -> S {
        let low = lower_curvature(&self.r, g);
        let low_bar = lower_curvature(&self.r_bar, g);
        let mut worst = S::zero();
        for idx in multi_indices(g.dim(), 4) {
            let (x, y, z, w) = (idx[0], idx[1], idx[2], idx[3]);
            worst = worst.max((*low_bar.get(&[x, y, z, w]) + *low.get(&[x, y, w, z])).abs());
        }
        worst
    }

    /// `max |(L + L̄) − (R + R̄)|`.
    pub fn interchange_sum_residual(&self) -> S {
        let lhs = &self.l + &self.l_bar;
        let rhs = &self.r + &self.r_bar;
        lhs.max_abs_diff(&rhs)
    }

    /// Largest antisymmetric part of `Ric`.
    pub fn ricci_asymmetry(&self) -> S {
        self.ric.max_abs_diff(&self.ric.permute(&[1, 0]))
    }
}

/// The three equivalent conjugate-symmetry residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugateSymmetry<S> {
    /// `‖R − L‖∞`
    pub r_minus_l: S,
    /// `‖R − R̄‖∞`
    pub r_minus_r_bar: S,
    /// `‖alt(∇^g K)‖∞`
    pub nabla_k_asymmetry: S,
}

impl<S: Scalar> ConjugateSymmetry<S> {
    pub fn max(&self) -> S {
        self.r_minus_l.max(self.r_minus_r_bar).max(self.nabla_k_asymmetry)
    }
}

/// `nabla_k` is `∇^g K` stored as `[k][y][z][x]`.
pub fn conjugate_symmetry_residuals<S: Scalar>(curv: &Curvatures<S>, nabla_k: &PointTensor<S>) -> ConjugateSymmetry<S> {
    let mut alt = S::zero();
    for idx in multi_indices(nabla_k.dim(), 4) {
        let (k, y, z, x) = (idx[0], idx[1], idx[2], idx[3]);
        alt = alt.max((*nabla_k.get(&[k, y, z, x]) - *nabla_k.get(&[k, x, z, y])).abs());
    }
    ConjugateSymmetry {
        r_minus_l: curv.r.max_abs_diff(&curv.l),
        r_minus_r_bar: curv.r.max_abs_diff(&curv.r_bar),
        nabla_k_asymmetry: alt,
    }
}

/// `g(Y,Z)X − g(X,Z)Y` as a (1,3) tensor stored like `R`.
pub fn unit_curvature<S: Scalar>(g: &PointTensor<S>) -> PointTensor<S> {
    Tensor::from_fn(g.dim(), &[Up, Down, Down, Down], |idx| {
        let (l, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
        let d = |a: usize, b: usize| if a == b { S::one() } else { S::zero() };
        *g.get(&[j, k]) * d(l, i) - *g.get(&[i, k]) * d(l, j)
    })
}

/// Least-squares constant-curvature fit of `R ≈ λ (g(Y,Z)X − g(X,Z)Y)` across all samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureFit<S> {
    pub lambda: S,
    /// Max deviation `|R − λ·unit|` over all components and samples.
    pub residual: S,
}

impl<S: Scalar> CurvatureFit<S> {
    /// Constant-curvature gate: residual ≤ 1e-6 (1 + |λ|).
    pub fn is_constant(&self) -> bool {
        self.residual <= S::lit(1e-6) * (S::one() + self.lambda.abs())
    }
}

pub fn constant_curvature_fit<'a, S: Scalar>(
    samples: impl IntoIterator<Item = (&'a PointTensor<S>, &'a PointTensor<S>)>,
) -> Result<CurvatureFit<S>> {
    let samples: Vec<_> = samples.into_iter().collect();
    let Some((first, _)) = samples.first() else {
        return Err(StatError::NoSamples);
    };
    if first.dim() < 2 {
        return Err(StatError::DimensionTooSmall);
    }
    let units: Vec<PointTensor<S>> = samples.iter().map(|(_, g)| unit_curvature(g)).collect();
    let (mut num, mut den) = (S::zero(), S::zero());
    for ((r, _), b) in samples.iter().zip(&units) {
        for (rv, bv) in r.data().iter().zip(b.data()) {
            num = num + *rv * *bv;
            den = den + *bv * *bv;
        }
    }
    let lambda = num / den;
    let residual = samples
        .iter()
        .zip(&units)
        .map(|((r, _), b)| r.max_abs_diff(&b.scaled(lambda)))
        .fold(S::zero(), S::max);
    Ok(CurvatureFit { lambda, residual })
}

/// `(T1)`: `Δ_g T + Σ_i Ric^g(e_i, T) e_i`.
pub fn t1_residual<S: Scalar>(
    metric: &Metric<Jet<S>>,
    gamma: &JetTensor<S>,
    ric_g: &PointTensor<S>,
    t: &JetTensor<S>,
) -> std::result::Result<PointTensor<S>, GeometryError> {
    let lap = rough_laplacian(t, metric, gamma)?.value();
    let ric_t = ricci_sharp(ric_g, &metric.inv.value(), &t.value());
    Ok(&lap + &ric_t)
}

/// `Σ_i Ric(e_i, V) e_i = g^{ka} Ric_ab V^b`.
pub fn ricci_sharp<S: Scalar>(ric: &PointTensor<S>, g_inv: &PointTensor<S>, v: &PointTensor<S>) -> PointTensor<S> {
    let m = v.dim();
    Tensor::from_fn(m, &[Up], |idx| {
        let k = idx[0];
        let mut acc = S::zero();
        for a in 0..m {
            for b in 0..m {
                acc = acc + *g_inv.get(&[k, a]) * *ric.get(&[a, b]) * *v.get(&[b]);
            }
        }
        acc
    })
}

/// `(T2)`: `div^g(T) T + ∇^g_T T`.
pub fn t2_residual<S: Scalar>(gamma: &JetTensor<S>, t: &JetTensor<S>) -> std::result::Result<PointTensor<S>, GeometryError> {
    let nabla_t = covariant_derivative(t, gamma)?.value(); // [k][a]
    let tv = t.value();
    let m = tv.dim();
    let div = (0..m).fold(S::zero(), |acc, a| acc + *nabla_t.get(&[a, a]));
    Ok(Tensor::from_fn(m, &[Up], |idx| {
        let k = idx[0];
        let along = (0..m).fold(S::zero(), |acc, a| acc + *tv.get(&[a]) * *nabla_t.get(&[k, a]));
        div * *tv.get(&[k]) + along
    }))
}

/// `|λ m(m−1) − ρ̂ − g(T,T) + g(K,K)|`.
pub fn scalar_relation_residual<S: Scalar>(
    lambda: S,
    scalar_curvature: S,
    t: &PointTensor<S>,
    k: &PointTensor<S>,
    metric: &Metric<S>,
) -> std::result::Result<S, GeometryError> {
    let m = S::lit(t.dim() as f64);
    let tt = metric.inner(t, t)?;
    let kk = metric.inner(k, k)?;
    Ok((lambda * m * (m - S::one()) - scalar_curvature - tt + kk).abs())
}

/// The three terms of `Δ_g g(K,K) = 2 g(F,K) + 2 g(∇^g K, ∇^g K)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LapCTerms<S> {
    pub laplacian_kk: S,
    pub curvature_term: S,
    pub gradient_term: S,
}

impl<S: Scalar> LapCTerms<S> {
    pub fn residual(&self) -> S {
        (self.laplacian_kk - self.curvature_term - self.gradient_term).abs()
    }
}

/// `F(X,Y) = Σ_l (R^g(e_l, X) K)(e_l, Y)`, with the curvature acting as a derivation on `K`.
pub fn curvature_on_difference<S: Scalar>(r_g: &PointTensor<S>, k: &PointTensor<S>, g_inv: &PointTensor<S>) -> PointTensor<S> {
    let m = k.dim();
    Tensor::from_fn(m, &[Up, Down, Down], |idx| {
        let (out, x, y) = (idx[0], idx[1], idx[2]);
        let mut acc = S::zero();
        for a in 0..m {
            for b in 0..m {
                let gab = *g_inv.get(&[a, b]);
                if gab == S::zero() {
                    continue;
                }
                // (R(∂a,∂x)K)(∂b,∂y)
                let mut v = S::zero();
                for p in 0..m {
                    v = v + *r_g.get(&[out, a, x, p]) * *k.get(&[p, b, y])
                        - *k.get(&[out, p, y]) * *r_g.get(&[p, a, x, b])
                        - *k.get(&[out, b, p]) * *r_g.get(&[p, a, x, y]);
                }
                acc = acc + gab * v;
            }
        }
        acc
    })
}

pub fn lapc_terms<S: Scalar>(
    metric: &Metric<Jet<S>>,
    gamma: &JetTensor<S>,
    r_g: &PointTensor<S>,
    k: &JetTensor<S>,
) -> std::result::Result<LapCTerms<S>, GeometryError> {
    let kk = metric.inner(k, k)?;
    let laplacian_kk = geometry::laplacian_scalar(&kk, metric, gamma)?.value();
    let values = Metric {
        g: metric.g.value(),
        inv: metric.inv.value(),
    };
    let kv = k.value();
    let f = curvature_on_difference(r_g, &kv, &values.inv);
    let nabla_k = covariant_derivative(k, gamma)?.value();
    let two = S::lit(2.0);
    Ok(LapCTerms {
        laplacian_kk,
        curvature_term: two * values.inner(&f, &kv)?,
        gradient_term: two * values.inner(&nabla_k, &nabla_k)?,
    })
}

/// `(‖∇^g_T T + div^g(T) T‖∞, ρ)` where `ρ = −div^g T` is the potential when `T` is geodesic.
pub fn geodesic_potential_check<S: Scalar>(gamma: &JetTensor<S>, t: &JetTensor<S>) -> std::result::Result<(S, S), GeometryError> {
    let residual = t2_residual(gamma, t)?.max_abs();
    let div = geometry::divergence(t, gamma)?.value();
    Ok((residual, -div))
}

/// `|g(∇^g_X T, Y) − g(∇^g_Y T, X)|` max over coordinate fields; zero iff `η` is closed.
pub fn closedness_residual<S: Scalar>(gamma: &JetTensor<S>, eta: &JetTensor<S>) -> std::result::Result<S, GeometryError> {
    let d = covariant_derivative(eta, gamma)?.value(); // [y][x] = (∇_x η)_y
    Ok(d.max_abs_diff(&d.permute(&[1, 0])))
}

/// Statistical data of `(g, ∇)` at one point.
#[derive(Debug, Clone)]
pub struct StatisticalFrame<S> {
    pub point: Vec<S>,
    pub cubic: PointTensor<S>,
    pub difference: PointTensor<S>,
    pub tchebychev: PointTensor<S>,
    pub tchebychev_covector: PointTensor<S>,
    /// `∇^g T`, stored `[k][a]` with direction last.
    pub tchebychev_operator: PointTensor<S>,
    pub connection: PointTensor<S>,
    pub conjugate: PointTensor<S>,
    pub curvatures: Curvatures<S>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{christoffel, metric_inverse};

    fn flat_metric(m: usize, order: usize) -> Metric<Jet<f64>> {
        let g = Tensor::from_fn(m, &[Down, Down], |i| Jet::constant(if i[0] == i[1] { 1.0 } else { 0.0 }, m, order));
        metric_inverse(&g).unwrap()
    }

    fn constant_cubic(m: usize, entries: &[([usize; 3], f64)]) -> JetTensor<f64> {
        Tensor::from_fn(m, &[Down, Down, Down], |idx| {
            let mut s = [idx[0], idx[1], idx[2]];
            s.sort();
            let v = entries.iter().find(|(k, _)| *k == s).map_or(0.0, |(_, v)| *v);
            Jet::constant(v, m, 3)
        })
    }

    #[test]
    fn zero_cubic_gives_levi_civita() {
        let metric = flat_metric(2, 3);
        let c = constant_cubic(2, &[]);
        let k = difference_tensor(&metric, &c).unwrap();
        assert_eq!(k.value().max_abs(), 0.0);
        let (t, _) = tchebychev(&metric, &k).unwrap();
        assert_eq!(t.value().max_abs(), 0.0);
    }

    #[test]
    fn single_cubic_component() {
        let metric = flat_metric(2, 3);
        let c = constant_cubic(2, &[([0, 0, 0], 2.0)]);
        let k = difference_tensor(&metric, &c).unwrap().value();
        assert_eq!(*k.get(&[0, 0, 0]), -1.0);
        assert_eq!(k.max_abs(), 1.0);
        let (t, eta) = tchebychev(&metric, &difference_tensor(&metric, &c).unwrap()).unwrap();
        assert_eq!(t.value().data(), &[-1.0, 0.0]);
        assert_eq!(eta.value().data(), &[-1.0, 0.0]);
    }

    #[test]
    fn cubic_round_trip() {
        let metric = flat_metric(3, 3);
        let c = constant_cubic(3, &[([0, 0, 1], 0.7), ([0, 1, 2], -1.3), ([2, 2, 2], 0.4)]);
        let k = difference_tensor(&metric, &c).unwrap();
        let back = cubic_from_difference(&metric, &k).unwrap();
        assert!(back.value().max_abs_diff(&c.value()) < 1e-12);
    }

    #[test]
    fn asymmetric_cubic_rejected() {
        let metric = flat_metric(2, 3);
        let mut data: Vec<Jet<f64>> = constant_cubic(2, &[]).data().to_vec();
        data[1] = Jet::constant(1.0, 2, 3); // C_{112} only
        let c = Tensor::new(2, vec![Down, Down, Down], data).unwrap();
        match difference_tensor(&metric, &c) {
            Err(StatError::AsymmetricCubic { max_asymmetry, .. }) => assert_eq!(max_asymmetry, 1.0),
            other => panic!("unexpected {other:?}"),
        }
        // negative control for Codazzi: the torsion-carrying connection fails it
        let k = difference_tensor_unchecked(&metric, &c).unwrap();
        let gamma = christoffel(&metric).unwrap();
        let (a, _) = connections(&gamma, &k);
        assert!(codazzi_residual(&metric, &a).unwrap() > 0.1);
    }

    #[test]
    fn duality_route_matches_formula() {
        let metric = flat_metric(2, 3);
        let c = constant_cubic(2, &[([0, 0, 0], 2.0), ([0, 1, 1], -0.5)]);
        let k = difference_tensor(&metric, &c).unwrap();
        let gamma = christoffel(&metric).unwrap();
        let (a, abar) = connections(&gamma, &k);
        let dual = conjugate_by_duality(&metric, &a).unwrap();
        assert!(dual.value().max_abs_diff(&abar.value()) < 1e-15);
        assert!(duality_residual(&metric, &a, &abar).unwrap() < 1e-15);
        assert_eq!(codazzi_residual(&metric, &a).unwrap(), 0.0);
    }

    #[test]
    fn flat_constant_k_curvature_is_commutator() {
        // R(X,Y)Z = [K_X, K_Y] Z for parallel K on flat space
        let metric = flat_metric(2, 3);
        let c = constant_cubic(2, &[([0, 0, 0], 1.0), ([0, 0, 1], 0.5), ([1, 1, 1], -0.3)]);
        let k = difference_tensor(&metric, &c).unwrap();
        let gamma = christoffel(&metric).unwrap();
        let (a, abar) = connections(&gamma, &k);
        let mv = Metric {
            g: metric.g.value(),
            inv: metric.inv.value(),
        };
        let curv = curvatures(&a, &abar, &mv).unwrap();
        let kv = k.value();
        for idx in multi_indices(2, 4) {
            let (l, i, j, z) = (idx[0], idx[1], idx[2], idx[3]);
            let mut e = 0.0;
            for p in 0..2 {
                e += kv.get(&[l, i, p]) * kv.get(&[p, j, z]) - kv.get(&[l, j, p]) * kv.get(&[p, i, z]);
            }
            assert!((curv.r.get(&idx) - e).abs() < 1e-14);
        }
        assert!(curv.pairing_residual(&mv.g) < 1e-14);
        assert!(curv.interchange_sum_residual() < 1e-14);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let empty: Vec<(&PointTensor<f64>, &PointTensor<f64>)> = vec![];
        assert_eq!(constant_curvature_fit(empty), Err(StatError::NoSamples));
        let g = PointTensor::<f64>::from_fn(1, &[Down, Down], |_| 1.0);
        let r = PointTensor::<f64>::from_fn(1, &[Up, Down, Down, Down], |_| 0.0);
        assert_eq!(constant_curvature_fit([(&r, &g)]), Err(StatError::DimensionTooSmall));
    }

    #[test]
    fn fit_recovers_planted_lambda() {
        let g = PointTensor::<f64>::from_fn(3, &[Down, Down], |i| if i[0] == i[1] { 2.0 } else { 0.1 });
        let r = unit_curvature(&g).scaled(-0.75);
        let fit = constant_curvature_fit([(&r, &g), (&r, &g)]).unwrap();
        assert!((fit.lambda + 0.75).abs() < 1e-14);
        assert!(fit.is_constant());
    }
}
