//! Riemannian kernel on jet-valued tensors.
//!
//! Connection coefficients are stored as `A[k][i][j]` with
//! `∇_{∂_i} ∂_j = A^k_{ij} ∂_k`. Every covariant derivative appends its
//! direction as the last slot, so `(∇t)(…; X)` has `X` last.

use thiserror::Error;

use crate::expr::Jet;
use crate::scalar::Scalar;
use crate::tensor::{
    orthonormal_frame, Down, JetTensor, Metric, OrthonormalFrame, PointTensor, Tensor, TensorError, Up,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("jet order too low for a further derivative")]
    InsufficientOrder,
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

type Result<T> = std::result::Result<T, GeometryError>;

/// Coordinate partial derivatives, appended as a trailing covariant slot.
pub fn partial<S: Scalar>(t: &JetTensor<S>) -> Result<JetTensor<S>> {
    if t.order() == 0 {
        return Err(GeometryError::InsufficientOrder);
    }
    let r = t.rank();
    let mut sig = t.signature().to_vec();
    sig.push(Down);
    let out = Tensor::from_fn(t.dim(), &sig, |idx| {
        t.get(&idx[..r]).partial(idx[r]).expect("order checked")
    });
    Ok(out)
}

/// Jet of the inverse metric.
///
/// With `g = g₀ + δ` (δ has no constant term) the Neumann series
/// `Σ_n (−g₀⁻¹δ)^n g₀⁻¹` terminates after `order` terms.
pub fn metric_inverse<S: Scalar>(g: &JetTensor<S>) -> Result<Metric<Jet<S>>> {
    let base = Metric::from_values(g.value())?;
    let order = g.order();
    let m = g.dim();
    let inv0 = JetTensor::constant(&base.inv, order);
    let delta = g.map(|j| {
        let mut d = j.clone();
        d = d - Jet::constant(j.value(), m, j.order());
        d
    });
    // step = −g₀⁻¹ δ as a (1,1) tensor
    let step = inv0.outer(&delta).contract(1, 2)?.scaled(-S::one());
    let mut term = inv0.clone();
    let mut sum = inv0;
    for _ in 0..order {
        term = step.outer(&term).contract(1, 2)?;
        sum = &sum + &term;
    }
    Ok(Metric { g: g.clone(), inv: sum })
}

/// Levi-Civita coefficients `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`.
pub fn christoffel<S: Scalar>(metric: &Metric<Jet<S>>) -> Result<JetTensor<S>> {
    let dg = partial(&metric.g)?; // dg[a][b][c] = ∂_c g_ab
    let m = dg.dim();
    let half = S::lit(0.5);
    let first = Tensor::from_fn(m, &[Down, Down, Down], |idx| {
        let (l, i, j) = (idx[0], idx[1], idx[2]);
        (dg.get(&[j, l, i]).clone() + dg.get(&[i, l, j]).clone() - dg.get(&[i, j, l]).clone()) * half
    });
    Ok(first.raise_index(0, &metric.inv)?)
}

/// Curvature `R(∂_i, ∂_j)∂_k = R^l_{ijk} ∂_l` of a torsion-free connection, stored as `[l][i][j][k]`.
///
/// `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z`.
pub fn riemann<S: Scalar>(conn: &JetTensor<S>) -> Result<JetTensor<S>> {
    let d = partial(conn)?; // d[l][j][k][i] = ∂_i A^l_jk
    let m = conn.dim();
    Ok(Tensor::from_fn(m, &[Up, Down, Down, Down], |idx| {
        let (l, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = d.get(&[l, j, k, i]).clone() - d.get(&[l, i, k, j]).clone();
        for p in 0..m {
            acc = acc + conn.get(&[l, i, p]).clone() * conn.get(&[p, j, k]).clone()
                - conn.get(&[l, j, p]).clone() * conn.get(&[p, i, k]).clone();
        }
        acc
    }))
}

/// `Ric(X,Y) = Σ_i g(R(e_i,X)Y, e_i)`, i.e. the trace of the output slot against the first argument.
pub fn ricci<S: Scalar>(r: &JetTensor<S>) -> Result<JetTensor<S>> {
    Ok(r.contract(0, 1)?)
}

/// `ρ̂ = tr_g Ric`.
pub fn scalar_curvature<S: Scalar>(ric: &JetTensor<S>, metric: &Metric<Jet<S>>) -> Result<Jet<S>> {
    let mixed = ric.raise_index(0, &metric.inv)?;
    Ok(mixed.contract(0, 1)?.data()[0].clone())
}

/// Covariant derivative with respect to `conn`; the direction becomes the last slot.
pub fn covariant_derivative<S: Scalar>(t: &JetTensor<S>, conn: &JetTensor<S>) -> Result<JetTensor<S>> {
    let d = partial(t)?;
    let r = t.rank();
    let m = t.dim();
    let sig = d.signature().to_vec();
    let mut src = vec![0; r];
    Ok(Tensor::from_fn(m, &sig, |idx| {
        let a = idx[r];
        let mut acc = d.get(idx).clone();
        for slot in 0..r {
            src.copy_from_slice(&idx[..r]);
            for p in 0..m {
                src[slot] = p;
                let comp = t.get(&src).clone();
                acc = match sig[slot] {
                    Up => acc + conn.get(&[idx[slot], a, p]).clone() * comp,
                    Down => acc - conn.get(&[p, a, idx[slot]]).clone() * comp,
                };
            }
        }
        acc
    }))
}

/// `div V = tr ∇V`.
pub fn divergence<S: Scalar>(v: &JetTensor<S>, gamma: &JetTensor<S>) -> Result<Jet<S>> {
    let dv = covariant_derivative(v, gamma)?;
    Ok(dv.contract(0, 1)?.data()[0].clone())
}

/// `grad f = g⁻¹ df`.
pub fn gradient<S: Scalar>(f: &Jet<S>, metric: &Metric<Jet<S>>) -> Result<JetTensor<S>> {
    let m = f.dim();
    let df = Tensor::from_fn(m, &[Down], |i| f.partial(i[0]));
    if df.data().iter().any(Option::is_none) {
        return Err(GeometryError::InsufficientOrder);
    }
    let df = df.map(|j| j.clone().expect("checked"));
    Ok(df.raise_index(0, &metric.inv)?)
}

/// Trace with `g⁻¹` over the last two (covariant) slots.
fn trace_last_two<S: Scalar>(t: &JetTensor<S>, metric: &Metric<Jet<S>>) -> Result<JetTensor<S>> {
    let r = t.rank();
    let raised = t.raise_index(r - 1, &metric.inv)?;
    Ok(raised.contract(r - 2, r - 1)?)
}

/// `Δ_g f = tr_g ∇df`.
pub fn laplacian_scalar<S: Scalar>(f: &Jet<S>, metric: &Metric<Jet<S>>, gamma: &JetTensor<S>) -> Result<Jet<S>> {
    let m = f.dim();
    if f.order() < 2 {
        return Err(GeometryError::InsufficientOrder);
    }
    let df = Tensor::from_fn(m, &[Down], |i| f.partial(i[0]).expect("order checked"));
    let hess = covariant_derivative(&df, gamma)?;
    Ok(trace_last_two(&hess, metric)?.data()[0].clone())
}

/// Rough Laplacian `Δ_g t = Σ_i (∇∇t)(…; e_i; e_i)`, the trace of the second covariant derivative.
pub fn rough_laplacian<S: Scalar>(t: &JetTensor<S>, metric: &Metric<Jet<S>>, gamma: &JetTensor<S>) -> Result<JetTensor<S>> {
    let second = covariant_derivative(&covariant_derivative(t, gamma)?, gamma)?;
    trace_last_two(&second, metric)
}

/// Residual of the first Bianchi identity `R(X,Y)Z + R(Y,Z)X + R(Z,X)Y`, max-abs over coordinate fields.
pub fn bianchi_residual<S: Scalar>(r: &PointTensor<S>) -> S {
    let m = r.dim();
    let mut worst = S::zero();
    for l in 0..m {
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let s = *r.get(&[l, i, j, k]) + *r.get(&[l, j, k, i]) + *r.get(&[l, k, i, j]);
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

/// `∇g` for a connection; zero exactly when the connection is metric.
pub fn metricity_defect<S: Scalar>(metric: &Metric<Jet<S>>, conn: &JetTensor<S>) -> Result<PointTensor<S>> {
    Ok(covariant_derivative(&metric.g, conn)?.value())
}

/// Riemannian data of `g` at one point.
#[derive(Debug, Clone)]
pub struct GeometryFrame<S> {
    pub point: Vec<S>,
    pub g: PointTensor<S>,
    pub g_inv: PointTensor<S>,
    pub christoffel: PointTensor<S>,
    /// `[k][i][j][l] = ∂_l Γ^k_ij`.
    pub christoffel_derivative: PointTensor<S>,
    pub riemann: PointTensor<S>,
    pub ricci: PointTensor<S>,
    pub scalar: S,
    pub frame: OrthonormalFrame<S>,
}

impl<S: Scalar> GeometryFrame<S> {
    /// Builds the frame from metric jets of order ≥ 2.
    pub fn from_metric_jets(point: &[S], g: &JetTensor<S>) -> Result<Self> {
        let metric = metric_inverse(g)?;
        let gamma = christoffel(&metric)?;
        let r = riemann(&gamma)?;
        let ric = ricci(&r)?;
        let scalar = scalar_curvature(&ric, &metric)?.value();
        Ok(Self {
            point: point.to_vec(),
            g: metric.g.value(),
            g_inv: metric.inv.value(),
            christoffel: gamma.value(),
            christoffel_derivative: partial(&gamma)?.value(),
            riemann: r.value(),
            ricci: ric.value(),
            scalar,
            frame: orthonormal_frame(&g.value())?,
        })
    }
}
