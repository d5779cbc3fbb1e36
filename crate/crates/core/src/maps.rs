//! Tension and statistical bi-tension fields of the identity maps
//! `id: (M, g, ∇) → (M, g, ∇^g)` and `id: (M, g, ∇̄) → (M, g, ∇^g)`.
//!
//! The bi-tension fields are evaluated twice: once from the general formula
//! (statistical connection Laplacian plus target curvature terms) and once
//! from the closed form in terms of `T`. The two paths must agree.

use crate::expr::Jet;
use crate::geometry::{covariant_derivative, partial, rough_laplacian, GeometryError};
use crate::scalar::Scalar;
use crate::statistical::{curvature_interchange, ricci_sharp, t1_residual, t2_residual};
use crate::tensor::{JetTensor, Metric, PointTensor, Tensor, Up};

type Result<T> = std::result::Result<T, GeometryError>;

/// Tension field of `id: (M, g, A_M) → (M, g, A_N)`: `g^{ij}(A_N^k_ij − A_M^k_ij)`.
pub fn tension<S: Scalar>(metric: &Metric<Jet<S>>, source: &JetTensor<S>, target: &JetTensor<S>) -> Result<JetTensor<S>> {
    let diff = target - source;
    Ok(diff.raise_index(2, &metric.inv)?.contract(1, 2)?)
}

/// Statistical connection Laplacian `tr_g {∇^E_X ∇^E_Y ξ − ∇^E_{∇^M_X Y} ξ}` of a vector field.
pub fn statistical_laplacian<S: Scalar>(
    xi: &JetTensor<S>,
    metric: &Metric<Jet<S>>,
    source: &JetTensor<S>,
    bundle: &JetTensor<S>,
) -> Result<PointTensor<S>> {
    let d = covariant_derivative(xi, bundle)?; // [k][b] = (∇^E_b ξ)^k
    let dd = partial(&d)?.value(); // [k][b][a]
    let d = d.value();
    let g_inv = metric.inv.value();
    let (a_m, a_e) = (source.value(), bundle.value());
    let m = xi.dim();
    Ok(Tensor::from_fn(m, &[Up], |idx| {
        let k = idx[0];
        let mut acc = S::zero();
        for a in 0..m {
            for b in 0..m {
                let gab = *g_inv.get(&[a, b]);
                let mut v = *dd.get(&[k, b, a]);
                for p in 0..m {
                    v = v + *a_e.get(&[k, a, p]) * *d.get(&[p, b]) - *a_m.get(&[p, a, b]) * *d.get(&[k, p]);
                }
                acc = acc + gab * v;
            }
        }
        acc
    }))
}

/// `Σ_i C(e_i, V) e_i = g^{ab} C^k_{a v b} V^v` for a (1,3) curvature-like tensor stored `[k][x][y][z]`.
pub fn frame_curvature_trace<S: Scalar>(c: &PointTensor<S>, v: &PointTensor<S>, g_inv: &PointTensor<S>) -> PointTensor<S> {
    let m = v.dim();
    Tensor::from_fn(m, &[Up], |idx| {
        let k = idx[0];
        let mut acc = S::zero();
        for a in 0..m {
            for b in 0..m {
                let gab = *g_inv.get(&[a, b]);
                for q in 0..m {
                    acc = acc + gab * *c.get(&[k, a, q, b]) * *v.get(&[q]);
                }
            }
        }
        acc
    })
}

/// `K(V, V)` for a (1,2) tensor.
fn quadratic<S: Scalar>(k: &PointTensor<S>, v: &PointTensor<S>) -> PointTensor<S> {
    let m = v.dim();
    Tensor::from_fn(m, &[Up], |idx| {
        let mut acc = S::zero();
        for i in 0..m {
            for j in 0..m {
                acc = acc + *k.get(&[idx[0], i, j]) * *v.get(&[i]) * *v.get(&[j]);
            }
        }
        acc
    })
}

/// Inputs shared by every identity-map computation at one point.
pub struct IdentityMapInputs<'a, S> {
    pub metric: &'a Metric<Jet<S>>,
    pub gamma: &'a JetTensor<S>,
    pub connection: &'a JetTensor<S>,
    pub conjugate: &'a JetTensor<S>,
    pub tchebychev: &'a JetTensor<S>,
    /// `R^g` at the point.
    pub riemann_g: &'a PointTensor<S>,
    /// `Ric^g` at the point.
    pub ricci_g: &'a PointTensor<S>,
}

/// Tension and bi-tension data of both identity maps at one point.
#[derive(Debug, Clone)]
pub struct IdentityMapReport<S> {
    pub tau: PointTensor<S>,
    pub tau_bar: PointTensor<S>,
    pub tau_hat: PointTensor<S>,
    pub tau2: PointTensor<S>,
    pub tau2_bar: PointTensor<S>,
    pub tau2_proof: PointTensor<S>,
    pub tau2_bar_proof: PointTensor<S>,
    pub t1: PointTensor<S>,
    pub t2: PointTensor<S>,
}

impl<S: Scalar> IdentityMapReport<S> {
    pub fn compute(inp: &IdentityMapInputs<'_, S>) -> Result<Self> {
        let metric = inp.metric;
        let m = inp.gamma.dim();
        let tau_j = tension(metric, inp.connection, inp.gamma)?;
        let tau_bar_j = tension(metric, inp.conjugate, inp.gamma)?;
        let tau_hat = tension(metric, inp.gamma, inp.gamma)?.value();
        let g_inv = metric.inv.value();
        let g_vals = Metric {
            g: metric.g.value(),
            inv: g_inv.clone(),
        };

        // target (M, g, ∇^g): L^N from R^g, K^N = 0
        let l_n = curvature_interchange(inp.riemann_g, &g_vals);
        let target_connection = inp.gamma;
        let k_n = (target_connection - inp.gamma).value();
        let k_m = inp.connection - inp.gamma;
        let div_tr = |k: &JetTensor<S>| -> Result<S> {
            let tr = k.raise_index(2, &metric.inv)?.contract(1, 2)?;
            Ok(covariant_derivative(&tr, inp.gamma)?.value().contract(0, 1)?.data()[0])
        };
        let div_t = div_tr(&k_m)?;
        let div_t_bar = div_tr(&(inp.conjugate - inp.gamma))?;

        let general = |tau: &JetTensor<S>, source_conj: &JetTensor<S>, div: S| -> Result<PointTensor<S>> {
            let lap = statistical_laplacian(tau, metric, source_conj, inp.gamma)?;
            let tv = tau.value();
            let curv = frame_curvature_trace(&l_n, &tv, &g_inv);
            let quad = quadratic(&k_n, &tv);
            Ok(Tensor::from_fn(m, &[Up], |i| {
                let k = i[0];
                *lap.get(&[k]) + div * *tv.get(&[k]) - *curv.get(&[k]) - *quad.get(&[k])
            }))
        };
        let tau2 = general(&tau_j, inp.conjugate, div_t)?;
        let tau2_bar = general(&tau_bar_j, inp.connection, div_t_bar)?;

        // closed forms in T
        let t = inp.tchebychev;
        let tv = t.value();
        let lap_t = rough_laplacian(t, metric, inp.gamma)?.value();
        let nabla_t = covariant_derivative(t, inp.gamma)?.value(); // [k][a]
        let div = (0..m).fold(S::zero(), |acc, a| acc + *nabla_t.get(&[a, a]));
        let along = Tensor::from_fn(m, &[Up], |i| {
            (0..m).fold(S::zero(), |acc, a| acc + *tv.get(&[a]) * *nabla_t.get(&[i[0], a]))
        });
        let curv_t = frame_curvature_trace(inp.riemann_g, &tv, &g_inv);
        let tau2_proof = Tensor::from_fn(m, &[Up], |i| {
            let k = i[0];
            -*lap_t.get(&[k]) - *along.get(&[k]) - div * *tv.get(&[k]) + *curv_t.get(&[k])
        });
        let tau2_bar_proof = Tensor::from_fn(m, &[Up], |i| {
            let k = i[0];
            *lap_t.get(&[k]) - *along.get(&[k]) - div * *tv.get(&[k]) - *curv_t.get(&[k])
        });

        Ok(IdentityMapReport {
            tau: tau_j.value(),
            tau_bar: tau_bar_j.value(),
            tau_hat,
            tau2,
            tau2_bar,
            tau2_proof,
            tau2_bar_proof,
            t1: t1_residual(metric, inp.gamma, inp.ricci_g, t)?,
            t2: t2_residual(inp.gamma, t)?,
        })
    }

    /// `‖τ̂ − (τ + τ̄)/2‖∞`.
    pub fn difftension_residual(&self) -> S {
        let half = (&self.tau + &self.tau_bar).scaled(S::lit(0.5));
        self.tau_hat.max_abs_diff(&half)
    }

    /// `max(‖τ + T‖∞, ‖τ̄ − T‖∞)`.
    pub fn tension_residual(&self, t: &PointTensor<S>) -> S {
        (&self.tau + t).max_abs().max(self.tau_bar.max_abs_diff(t))
    }

    /// Disagreement between the general-formula and closed-form bi-tension fields.
    pub fn path_residual(&self) -> S {
        self.tau2
            .max_abs_diff(&self.tau2_proof)
            .max(self.tau2_bar.max_abs_diff(&self.tau2_bar_proof))
    }

    /// `(‖(τ₂ − τ̄₂) + 2·T1‖∞, ‖(τ₂ + τ̄₂) + 2·T2‖∞)`.
    pub fn main1_residuals(&self) -> (S, S) {
        let two = S::lit(2.0);
        let res_a = &(&self.tau2 - &self.tau2_bar) + &self.t1.scaled(two);
        let res_b = &(&self.tau2 + &self.tau2_bar) + &self.t2.scaled(two);
        (res_a.max_abs(), res_b.max_abs())
    }
}

/// `Σ_i R(e_i, T) e_i = −Ric^♯(T)`; exposed for tests of the trace convention.
pub fn curvature_trace_residual<S: Scalar>(r: &PointTensor<S>, ric: &PointTensor<S>, v: &PointTensor<S>, g_inv: &PointTensor<S>) -> S {
    let lhs = frame_curvature_trace(r, v, g_inv);
    let rhs = ricci_sharp(ric, g_inv, v);
    (&lhs + &rhs).max_abs()
}

/// Three-valued outcome of a tolerance gate with a hysteresis band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gate {
    Pass,
    Inconclusive,
    Fail,
}

impl Gate {
    /// `≤ ε` passes, `(ε, 10ε]` is inconclusive, `> 10ε` fails.
    pub fn classify<S: Scalar>(value: S, eps: S) -> Self {
        if value <= eps {
            Gate::Pass
        } else if value <= eps * S::lit(10.0) {
            Gate::Inconclusive
        } else {
            Gate::Fail
        }
    }

    /// Conjunction: any fail fails, otherwise any inconclusive is inconclusive.
    pub fn and(self, other: Gate) -> Gate {
        match (self, other) {
            (Gate::Fail, _) | (_, Gate::Fail) => Gate::Fail,
            (Gate::Inconclusive, _) | (_, Gate::Inconclusive) => Gate::Inconclusive,
            _ => Gate::Pass,
        }
    }
}

/// The two semi-equiaffine flags over a sample set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SemiEquiaffine {
    /// From the (T1) and (T2) residuals.
    pub by_tchebychev: Gate,
    /// From `τ₂ = τ̄₂ = 0`.
    pub by_bitension: Gate,
}

impl SemiEquiaffine {
    pub fn from_maxima<S: Scalar>(t1: S, t2: S, tau2: S, tau2_bar: S, eps: S) -> Self {
        SemiEquiaffine {
            by_tchebychev: Gate::classify(t1, eps).and(Gate::classify(t2, eps)),
            by_bitension: Gate::classify(tau2, eps).and(Gate::classify(tau2_bar, eps)),
        }
    }

    /// Flags agree, or at least one side sits in the hysteresis band.
    pub fn consistent(&self) -> bool {
        self.by_tchebychev == self.by_bitension
            || self.by_tchebychev == Gate::Inconclusive
            || self.by_bitension == Gate::Inconclusive
    }

    pub fn holds(&self) -> bool {
        self.by_tchebychev == Gate::Pass && self.by_bitension == Gate::Pass
    }
}
