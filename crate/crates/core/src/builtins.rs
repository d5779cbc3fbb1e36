//! Ready-made structures with closed-form oracle data.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spec::{cubic_key, metric_key, ManifoldSpec, Sample, Strategy, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::tensor::{multi_indices, Down, PointTensor, Tensor, Up};

/// Closed-form tensor at a chart point.
pub type Oracle = Box<dyn Fn(&[f64]) -> PointTensor<f64> + Send + Sync>;

/// Flags a builtin is expected to report. `None` means no expectation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExpectedFlags {
    pub codazzi: bool,
    pub conjugate_symmetric: Option<bool>,
    pub equiaffine: Option<bool>,
    pub semi_equiaffine: Option<bool>,
    pub constant_curvature: Option<bool>,
    /// Known curvature constant.
    pub lambda: Option<f64>,
    /// Known `|λ|` when only the magnitude is fixed in advance.
    pub lambda_magnitude: Option<f64>,
}

/// Scalar function with a known eigenvalue of `Δ_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenfunction {
    pub expression: String,
    pub eigenvalue: f64,
}

pub struct BuiltinInstance {
    pub name: String,
    pub spec: ManifoldSpec,
    pub metric: Option<Oracle>,
    pub christoffel: Option<Oracle>,
    /// `∇` coefficients `A^k_ij`.
    pub connection: Option<Oracle>,
    /// `η = g(T, ·)`.
    pub tchebychev_covector: Option<Oracle>,
    /// `∇^g T`.
    pub tchebychev_operator: Option<Oracle>,
    pub eigenfunction: Option<Eigenfunction>,
    pub expected: ExpectedFlags,
}

impl fmt::Debug for BuiltinInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BuiltinInstance")
            .field("name", &self.name)
            .field("spec", &self.spec)
            .field("eigenfunction", &self.eigenfunction)
            .field("expected", &self.expected)
            .finish_non_exhaustive()
    }
}

fn coords(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("x{i}")).collect()
}

fn sample(bounds: Vec<[f64; 2]>) -> Sample {
    Sample {
        bounds,
        count: DEFAULT_SAMPLES,
        seed: DEFAULT_SEED,
        strategy: Strategy::Uniform,
    }
}

fn flat_metric(m: usize) -> BTreeMap<String, String> {
    let mut g = BTreeMap::new();
    for i in 0..m {
        for j in 0..=i {
            g.insert(metric_key(i, j), if i == j { "1" } else { "0" }.to_string());
        }
    }
    g
}

fn zeros(m: usize, sig: &[crate::tensor::Variance]) -> Oracle {
    let sig = sig.to_vec();
    Box::new(move |_| Tensor::from_fn(m, &sig, |_| 0.0))
}

/// Centroaffine power surface `x³ = (x¹)^{−a1} (x²)^{−a2}` with its induced
/// statistical structure on `x¹, x² > 0`.
pub fn centroaffine_power_surface(a1: f64, a2: f64) -> Option<BuiltinInstance> {
    if !(a1 > 0.0 && a2 > 0.0 && a1.is_finite() && a2.is_finite()) {
        return None;
    }
    let name = format!("centroaffine-{a1}-{a2}");
    let s = "(a1+a2+1)";
    let mut metric = BTreeMap::new();
    metric.insert("11".into(), format!("a1*(a1+1)/({s}*x1*x1)"));
    metric.insert("21".into(), format!("a1*a2/({s}*x1*x2)"));
    metric.insert("22".into(), format!("a2*(a2+1)/({s}*x2*x2)"));
    // C_ijk = 2 g_ij a_k/x^k − 2 δ_ij g_ik/x^i
    let mut cubic = BTreeMap::new();
    cubic.insert("111".into(), format!("2*(a1-1)*a1*(a1+1)/({s}*x1*x1*x1)"));
    cubic.insert("112".into(), format!("2*a1*a1*a2/({s}*x1*x1*x2)"));
    cubic.insert("122".into(), format!("2*a1*a2*a2/({s}*x1*x2*x2)"));
    cubic.insert("222".into(), format!("2*(a2-1)*a2*(a2+1)/({s}*x2*x2*x2)"));
    let spec = ManifoldSpec {
        name: name.clone(),
        dim: 2,
        coordinates: coords(2),
        parameters: [("a1".to_string(), a1), ("a2".to_string(), a2)].into_iter().collect(),
        metric,
        cubic,
        sample: sample(vec![[0.5, 3.0], [0.5, 3.0]]),
    };
    let a = [a1, a2];
    let sum = a1 + a2 + 1.0;
    let g = move |x: &[f64]| {
        Tensor::from_fn(2, &[Down, Down], |ix| {
            let (i, j) = (ix[0], ix[1]);
            let d = if i == j { 1.0 } else { 0.0 };
            a[i] * (a[j] + d) / (sum * x[i] * x[j])
        })
    };
    Some(BuiltinInstance {
        name,
        spec,
        metric: Some(Box::new(g)),
        christoffel: Some(Box::new(|x: &[f64]| {
            Tensor::from_fn(2, &[Up, Down, Down], |ix| {
                if ix[0] == ix[1] && ix[1] == ix[2] {
                    -1.0 / x[ix[0]]
                } else {
                    0.0
                }
            })
        })),
        // ∇_{∂i} ∂j = −g_ij (x¹ ∂1 + x² ∂2)
        connection: Some(Box::new(move |x: &[f64]| {
            let gv = g(x);
            Tensor::from_fn(2, &[Up, Down, Down], |ix| -*gv.get(&[ix[1], ix[2]]) * x[ix[0]])
        })),
        tchebychev_covector: Some(Box::new(move |x: &[f64]| {
            Tensor::from_fn(2, &[Down], |ix| (1.0 - a[ix[0]]) / x[ix[0]])
        })),
        tchebychev_operator: Some(zeros(2, &[Up, Down])),
        eigenfunction: None,
        expected: ExpectedFlags {
            codazzi: true,
            conjugate_symmetric: Some(true),
            equiaffine: Some(a1 == 1.0 && a2 == 1.0),
            semi_equiaffine: Some(true),
            constant_curvature: Some(true),
            lambda: None,
            lambda_magnitude: Some(1.0),
        },
    })
}

/// Euclidean chart with constant cubic form; keys are sorted 0-based triples.
pub fn flat_constant_cubic(name: &str, m: usize, constants: &BTreeMap<[usize; 3], f64>) -> Option<BuiltinInstance> {
    if m == 0 || m > crate::expr::MAX_DIM {
        return None;
    }
    let mut cubic = BTreeMap::new();
    for (ix, v) in constants {
        if ix.iter().any(|&i| i >= m) || !(ix[0] <= ix[1] && ix[1] <= ix[2]) {
            return None;
        }
        if *v != 0.0 {
            cubic.insert(cubic_key(ix[0], ix[1], ix[2]), format!("{v}"));
        }
    }
    let spec = ManifoldSpec {
        name: name.to_string(),
        dim: m,
        coordinates: coords(m),
        parameters: BTreeMap::new(),
        metric: flat_metric(m),
        cubic,
        sample: sample(vec![[-1.0, 1.0]; m]),
    };
    let c = constants.clone();
    let entry = move |i: usize, j: usize, k: usize| {
        let mut s = [i, j, k];
        s.sort_unstable();
        c.get(&s).copied().unwrap_or(0.0)
    };
    // η_k = −½ Σ_i C_iik on the Euclidean metric
    let eta: Vec<f64> = (0..m).map(|k| -0.5 * (0..m).map(|i| entry(i, i, k)).sum::<f64>()).collect();
    let equiaffine = eta.iter().all(|&v| v == 0.0);
    let connection = Tensor::from_fn(m, &[Up, Down, Down], |ix| -0.5 * entry(ix[1], ix[2], ix[0]));
    Some(BuiltinInstance {
        name: name.to_string(),
        spec,
        metric: Some(Box::new(move |_| Tensor::identity(m).map(|v| *v))),
        christoffel: Some(zeros(m, &[Up, Down, Down])),
        connection: Some(Box::new(move |_| connection.clone())),
        tchebychev_covector: Some(Box::new(move |_| Tensor::from_fn(m, &[Down], |ix| eta[ix[0]]))),
        tchebychev_operator: Some(zeros(m, &[Up, Down])),
        eigenfunction: None,
        expected: ExpectedFlags {
            codazzi: true,
            conjugate_symmetric: None,
            equiaffine: Some(equiaffine),
            semi_equiaffine: Some(true),
            constant_curvature: None,
            lambda: None,
            lambda_magnitude: None,
        },
    })
}

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

/// Random symmetric constants in `[−1, 1]`, rounded to three decimals.
pub fn random_constants(m: usize, seed: u64) -> BTreeMap<[usize; 3], f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    multi_indices(m, 3)
        .filter(|ix| ix[0] <= ix[1] && ix[1] <= ix[2])
        .map(|ix| ([ix[0], ix[1], ix[2]], round3(rng.gen_range(-1.0..1.0))))
        .collect()
}

pub fn flat_random_cubic(m: usize, seed: u64) -> Option<BuiltinInstance> {
    flat_constant_cubic(&format!("flat-random-{m}-seed{seed}"), m, &random_constants(m, seed))
}

/// Euclidean `ℝ²` with each cubic component a seeded random quadratic polynomial.
pub fn flat_polynomial_cubic(seed: u64) -> BuiltinInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let monomials = ["1", "x1", "x2", "x1*x1", "x1*x2", "x2*x2"];
    let mut cubic = BTreeMap::new();
    for ix in multi_indices(2, 3).filter(|ix| ix[0] <= ix[1] && ix[1] <= ix[2]) {
        let terms: Vec<String> = monomials
            .iter()
            .map(|mono| format!("{}*{mono}", round3(rng.gen_range(-1.0..1.0))))
            .collect();
        cubic.insert(cubic_key(ix[0], ix[1], ix[2]), terms.join(" + "));
    }
    let name = format!("flat-polynomial-2-seed{seed}");
    BuiltinInstance {
        name: name.clone(),
        spec: ManifoldSpec {
            name,
            dim: 2,
            coordinates: coords(2),
            parameters: BTreeMap::new(),
            metric: flat_metric(2),
            cubic,
            sample: sample(vec![[-1.0, 1.0]; 2]),
        },
        metric: Some(Box::new(|_| Tensor::identity(2).map(|v| *v))),
        christoffel: Some(zeros(2, &[Up, Down, Down])),
        connection: None,
        tchebychev_covector: None,
        tchebychev_operator: None,
        eigenfunction: None,
        expected: ExpectedFlags {
            codazzi: true,
            ..ExpectedFlags::default()
        },
    }
}

/// `4/(1 + c|x|²)² δ` with `C = 0`: the round sphere (`c > 0`) in a
/// stereographic chart or the hyperbolic ball (`c < 0`).
pub fn space_form(m: usize, c: f64) -> Option<BuiltinInstance> {
    if !(2..=crate::expr::MAX_DIM).contains(&m) || c == 0.0 || !c.is_finite() {
        return None;
    }
    let (name, r) = if c > 0.0 {
        (format!("sphere-{m}-{c}"), 0.8 / c.sqrt())
    } else {
        // keeps 1 + c|x|² ≥ 3/4 on the box
        (format!("hyperbolic-{m}-m{}", -c), 0.5 / (-c * m as f64).sqrt())
    };
    let r2 = (1..=m).map(|i| format!("x{i}*x{i}")).collect::<Vec<_>>().join("+");
    let mut metric = BTreeMap::new();
    for i in 0..m {
        for j in 0..=i {
            let v = if i == j { format!("4/pow(1+c*({r2}), 2)") } else { "0".into() };
            metric.insert(metric_key(i, j), v);
        }
    }
    let spec = ManifoldSpec {
        name: name.clone(),
        dim: m,
        coordinates: coords(m),
        parameters: [("c".to_string(), c)].into_iter().collect(),
        metric,
        cubic: BTreeMap::new(),
        sample: sample(vec![[-r, r]; m]),
    };
    let conformal = move |x: &[f64]| 1.0 + c * x.iter().map(|v| v * v).sum::<f64>();
    Some(BuiltinInstance {
        name,
        spec,
        metric: Some(Box::new(move |x: &[f64]| {
            let f = 4.0 / conformal(x).powi(2);
            Tensor::from_fn(m, &[Down, Down], |ix| if ix[0] == ix[1] { f } else { 0.0 })
        })),
        // g = e^{2φ} δ with ∂_i φ = −2c xᵢ/(1 + c|x|²)
        christoffel: Some(Box::new(move |x: &[f64]| {
            let q = conformal(x);
            let dphi: Vec<f64> = x.iter().map(|xi| -2.0 * c * xi / q).collect();
            Tensor::from_fn(m, &[Up, Down, Down], |ix| {
                let (k, i, j) = (ix[0], ix[1], ix[2]);
                let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                d(k, i) * dphi[j] + d(k, j) * dphi[i] - d(i, j) * dphi[k]
            })
        })),
        connection: None,
        tchebychev_covector: Some(zeros(m, &[Down])),
        tchebychev_operator: Some(zeros(m, &[Up, Down])),
        eigenfunction: Some(Eigenfunction {
            expression: format!("(1-c*({r2}))/(1+c*({r2}))"),
            eigenvalue: -c * m as f64,
        }),
        expected: ExpectedFlags {
            codazzi: true,
            conjugate_symmetric: Some(true),
            equiaffine: Some(true),
            semi_equiaffine: Some(true),
            constant_curvature: Some(true),
            lambda: Some(c),
            lambda_magnitude: Some(c.abs()),
        },
    })
}

/// Every named builtin, in listing order.
pub fn catalog() -> Vec<BuiltinInstance> {
    let mut out: Vec<BuiltinInstance> = [(1.0, 1.0), (1.0, 2.0), (2.0, 3.0)]
        .into_iter()
        .filter_map(|(a1, a2)| centroaffine_power_surface(a1, a2))
        .collect();
    out.extend(flat_constant_cubic("flat-zero", 2, &BTreeMap::new()));
    out.extend(flat_constant_cubic("flat-c111", 2, &[([0, 0, 0], 2.0)].into_iter().collect()));
    for m in [2, 3] {
        for seed in [1, 2, 3] {
            out.extend(flat_random_cubic(m, seed));
        }
    }
    out.extend(flat_random_cubic(3, 7));
    out.push(flat_polynomial_cubic(1));
    for (m, c) in [(2, 1.0), (3, 1.0), (2, 4.0), (2, -1.0), (3, -1.0)] {
        out.extend(space_form(m, c));
    }
    out
}

pub fn names() -> Vec<String> {
    catalog().into_iter().map(|b| b.name).collect()
}

pub fn get(name: &str) -> Option<BuiltinInstance> {
    catalog().into_iter().find(|b| b.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_unique_and_specs_valid() {
        let cat = catalog();
        let mut names: Vec<_> = cat.iter().map(|b| b.name.clone()).collect();
        for b in &cat {
            assert_eq!(b.spec.name, b.name);
            b.spec.validate().unwrap();
        }
        names.sort();
        names.dedup();
        assert_eq!(names.len(), cat.len());
        assert!(names.contains(&"centroaffine-1-2".to_string()));
        assert!(names.contains(&"hyperbolic-3-m1".to_string()));
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(centroaffine_power_surface(0.0, 1.0).is_none());
        assert!(space_form(1, 1.0).is_none());
        assert!(space_form(2, 0.0).is_none());
        assert!(flat_constant_cubic("x", 2, &[([1, 0, 0], 1.0)].into_iter().collect()).is_none());
    }

    #[test]
    fn centroaffine_metric_at_unit_point() {
        let b = centroaffine_power_surface(1.0, 2.0).unwrap();
        let g = (b.metric.as_ref().unwrap())(&[1.0, 1.0]);
        assert_eq!(g.data(), &[0.5, 0.5, 0.5, 1.5]);
    }
}
