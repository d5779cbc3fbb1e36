//! Full per-point evaluation: from jets of `g` and `C` to every residual the
//! diagnostics report needs.

use crate::expr::Jet;
use crate::geometry::{
    self, bianchi_residual, covariant_derivative, divergence, gradient, metric_inverse, rough_laplacian,
    GeometryFrame,
};
use crate::maps::{IdentityMapInputs, IdentityMapReport};
use crate::scalar::Scalar;
use crate::statistical::{
    closedness_residual, codazzi_residual, conjugate, conjugate_by_duality, conjugate_symmetry_residuals,
    connections, curvatures, difference_tensor, duality_residual, geodesic_potential_check, lapc_terms, tchebychev,
    ConjugateSymmetry, LapCTerms, StatError, StatisticalFrame,
};
use crate::tensor::{JetTensor, Metric, PointTensor, Tensor};

/// Jet order required of the metric and cubic-form inputs.
pub const INPUT_ORDER: usize = 3;

/// Smooth test function used for the divergence/Laplacian interchange check.
///
/// `f = exp(0.2 x₁) + Σ (0.3 + 0.1 i) xᵢ² + Σ sin(xᵢ) x_{i+1}` (cyclic).
pub fn test_function<S: Scalar>(point: &[S], order: usize) -> Jet<S> {
    let m = point.len();
    let x: Vec<Jet<S>> = (0..m).map(|i| Jet::variable(point[i], i, m, order)).collect();
    let mut f = (x[0].clone() * S::lit(0.2)).exp();
    for i in 0..m {
        f = f + &x[i] * &x[i] * S::lit(0.3 + 0.1 * i as f64);
        if m > 1 {
            f = f + &x[i].sin() * &x[(i + 1) % m];
        }
    }
    f
}

/// Per-point residuals. Every value is a max-abs norm over components.
#[derive(Debug, Clone)]
pub struct PointResiduals<S> {
    pub codazzi: S,
    /// Defining duality of `∇`, `∇̄` on coordinate fields.
    pub duality: S,
    /// `∇̄ = ∇^g − K` against the conjugate built from duality.
    pub conjugate_formula: S,
    /// `∇^g = (∇ + ∇̄)/2`.
    pub levi_civita_mean: S,
    pub curvature_pairing: S,
    pub interchange_sum: S,
    /// First Bianchi identity, worst of `R^g`, `R`, `R̄`.
    pub bianchi: S,
    pub metricity: S,
    /// `X div V − g(Δ_g V, X) + Ric^g(V, X)` for `V = grad f`.
    pub laplacian_interchange: S,
    /// `(g, −C)` yields `∇̄`, and conjugating twice is the identity.
    pub involution: S,
    pub conjugate_symmetry: ConjugateSymmetry<S>,
    pub ricci_asymmetry: S,
    /// `g(∇^g_X T, Y) − g(∇^g_Y T, X)`.
    pub tchebychev_closedness: S,
    pub tchebychev_norm: S,
    pub tchebychev_operator_norm: S,
    pub t1: S,
    pub t2: S,
    pub geodesic_potential: S,
    pub potential: S,
    pub tension: S,
    pub difftension: S,
    pub bitension_paths: S,
    pub main1_a: S,
    pub main1_b: S,
    pub tau2: S,
    pub tau2_bar: S,
    pub lapc: LapCTerms<S>,
    /// `Σ R(e_i, T) e_i + Ric^{g♯}(T)`.
    pub curvature_trace: S,
    pub scalar_curvature: S,
    pub t_norm_sq: S,
    pub k_norm_sq: S,
}

/// Geometry, statistical data, identity-map fields and residuals at one point.
#[derive(Debug, Clone)]
pub struct PointAnalysis<S> {
    pub geometry: GeometryFrame<S>,
    pub statistical: StatisticalFrame<S>,
    pub maps: IdentityMapReport<S>,
    pub residuals: PointResiduals<S>,
}

impl<S: Scalar> PointAnalysis<S> {
    /// `g` and `C` jets must have order ≥ [`INPUT_ORDER`].
    pub fn new(point: &[S], g: &JetTensor<S>, c: &JetTensor<S>) -> Result<Self, StatError> {
        if g.order() < INPUT_ORDER || c.order() < INPUT_ORDER {
            return Err(StatError::Geometry(geometry::GeometryError::InsufficientOrder));
        }
        let geometry = GeometryFrame::from_metric_jets(point, g)?;
        let metric = metric_inverse(g)?;
        let mv = Metric {
            g: geometry.g.clone(),
            inv: geometry.g_inv.clone(),
        };
        let gamma = geometry::christoffel(&metric)?;
        let k = difference_tensor(&metric, c)?;
        let (a, abar) = connections(&gamma, &k);
        let (t, eta) = tchebychev(&metric, &k)?;
        let nabla_t = covariant_derivative(&t, &gamma)?;
        let nabla_k = covariant_derivative(&k, &gamma)?.value();
        let curv = curvatures(&a, &abar, &mv)?;

        let dual = conjugate_by_duality(&metric, &a)?;
        let (av, abarv, gv, dualv) = (a.value(), abar.value(), gamma.value(), dual.value());
        let mean = (&av + &dualv).scaled(S::lit(0.5));

        let neg_c = c.scaled(-S::one());
        let k_neg = difference_tensor(&metric, &neg_c)?;
        let (a_neg, _) = connections(&gamma, &k_neg);
        let involution = a_neg
            .value()
            .max_abs_diff(&abarv)
            .max(conjugate(&gamma, &conjugate(&gamma, &a)).value().max_abs_diff(&av));

        let r_g = geometry.riemann.clone();
        let ric_g = geometry.ricci.clone();
        let bianchi = bianchi_residual(&r_g)
            .max(bianchi_residual(&curv.r))
            .max(bianchi_residual(&curv.r_bar));
        let metricity = geometry::metricity_defect(&metric, &gamma)?.max_abs();

        let f = test_function(point, INPUT_ORDER);
        let laplacian_interchange = laplacian_interchange_residual(&f, &metric, &gamma, &ric_g)?;

        let maps = IdentityMapReport::compute(&IdentityMapInputs {
            metric: &metric,
            gamma: &gamma,
            connection: &a,
            conjugate: &abar,
            tchebychev: &t,
            riemann_g: &r_g,
            ricci_g: &ric_g,
        })?;
        let tv = t.value();
        let kv = k.value();
        let (main1_a, main1_b) = maps.main1_residuals();
        let (geodesic_potential, potential) = geodesic_potential_check(&gamma, &t)?;

        let residuals = PointResiduals {
            codazzi: codazzi_residual(&metric, &a)?,
            duality: duality_residual(&metric, &a, &abar)?,
            conjugate_formula: dualv.max_abs_diff(&abarv),
            levi_civita_mean: mean.max_abs_diff(&gv),
            curvature_pairing: curv.pairing_residual(&mv.g),
            interchange_sum: curv.interchange_sum_residual(),
            bianchi,
            metricity,
            laplacian_interchange,
            involution,
            conjugate_symmetry: conjugate_symmetry_residuals(&curv, &nabla_k),
            ricci_asymmetry: curv.ricci_asymmetry(),
            tchebychev_closedness: closedness_residual(&gamma, &eta)?,
            tchebychev_norm: tv.max_abs(),
            tchebychev_operator_norm: nabla_t.value().max_abs(),
            t1: maps.t1.max_abs(),
            t2: maps.t2.max_abs(),
            geodesic_potential,
            potential,
            tension: maps.tension_residual(&tv),
            difftension: maps.difftension_residual(),
            bitension_paths: maps.path_residual(),
            main1_a,
            main1_b,
            tau2: maps.tau2.max_abs(),
            tau2_bar: maps.tau2_bar.max_abs(),
            lapc: lapc_terms(&metric, &gamma, &r_g, &k)?,
            curvature_trace: crate::maps::curvature_trace_residual(&r_g, &ric_g, &tv, &mv.inv),
            scalar_curvature: geometry.scalar,
            t_norm_sq: mv.inner(&tv, &tv)?,
            k_norm_sq: mv.inner(&kv, &kv)?,
        };

        let statistical = StatisticalFrame {
            point: point.to_vec(),
            cubic: c.value(),
            difference: kv,
            tchebychev: tv,
            tchebychev_covector: eta.value(),
            tchebychev_operator: nabla_t.value(),
            connection: av,
            conjugate: abarv,
            curvatures: curv,
        };
        Ok(PointAnalysis {
            geometry,
            statistical,
            maps,
            residuals,
        })
    }

    /// `|λ m(m−1) − ρ̂ − g(T,T) + g(K,K)|` for a fitted `λ`.
    pub fn scalar_relation(&self, lambda: S) -> S {
        let m = S::lit(self.geometry.g.dim() as f64);
        let r = &self.residuals;
        (lambda * m * (m - S::one()) - r.scalar_curvature - r.t_norm_sq + r.k_norm_sq).abs()
    }
}

/// `max_x |∂_x div V − g(Δ_g V, ∂_x) + Ric^g(V, ∂_x)|` for `V = grad f`.
pub fn laplacian_interchange_residual<S: Scalar>(
    f: &Jet<S>,
    metric: &Metric<Jet<S>>,
    gamma: &JetTensor<S>,
    ric_g: &PointTensor<S>,
) -> Result<S, geometry::GeometryError> {
    let v = gradient(f, metric)?;
    let div = divergence(&v, gamma)?;
    let ddiv = div.gradient().ok_or(geometry::GeometryError::InsufficientOrder)?;
    let lap = rough_laplacian(&v, metric, gamma)?.value();
    let lap_low = lap.lower_index(0, &metric.g.value())?;
    let vv = v.value();
    let m = vv.dim();
    let ric_v: PointTensor<S> = Tensor::from_fn(m, &[crate::tensor::Down], |i| {
        (0..m).fold(S::zero(), |acc, a| acc + *ric_g.get(&[a, i[0]]) * *vv.get(&[a]))
    });
    let mut worst = S::zero();
    for x in 0..m {
        worst = worst.max((ddiv[x] - *lap_low.get(&[x]) + *ric_v.get(&[x])).abs());
    }
    Ok(worst)
}
