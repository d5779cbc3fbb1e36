//! `ManifoldSpec`: the user-facing definition of `(M, g, C)` on a chart box,
//! its validation, and compilation to jet evaluators.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::expr::{fd_jet, parse_expression, Expr, ExprError, Jet, ParamMode, MAX_DIM};
use crate::scalar::Scalar;
use crate::tensor::{cholesky, Down, JetTensor, Tensor};

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Uniform,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// `[lo, hi]` per coordinate.
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub strategy: Strategy,
}

fn default_count() -> usize {
    DEFAULT_SAMPLES
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// File form of a statistical manifold on a chart.
///
/// Metric keys are `"ij"` with `i ≥ j` (1-based, lower triangle); cubic keys
/// are `"ijk"` with `i ≤ j ≤ k`. Missing cubic keys mean zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    pub name: String,
    pub dim: usize,
    pub coordinates: Vec<String>,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    pub metric: BTreeMap<String, String>,
    #[serde(default)]
    pub cubic: BTreeMap<String, String>,
    pub sample: Sample,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("invalid spec JSON: {0}")]
    Json(String),
    #[error("invalid spec: {0}")]
    Invalid(String),
    #[error("{component}: {source}")]
    Expr {
        component: String,
        #[source]
        source: ExprError,
    },
    #[error("{component} at point {point:?}: {source}")]
    Domain {
        component: String,
        point: Vec<f64>,
        #[source]
        source: ExprError,
    },
    #[error("metric is not positive definite at point {0:?}")]
    NotPositiveDefinite(Vec<f64>),
}

fn invalid(msg: impl Into<String>) -> SpecError {
    SpecError::Invalid(msg.into())
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric())
}

/// Parses a 1-based index key such as `"21"` into 0-based indices.
fn parse_key(key: &str, len: usize, m: usize) -> Option<Vec<usize>> {
    if key.len() != len {
        return None;
    }
    key.chars()
        .map(|c| c.to_digit(10).map(|d| d as usize).filter(|&d| d >= 1 && d <= m).map(|d| d - 1))
        .collect()
}

pub fn metric_key(i: usize, j: usize) -> String {
    let (a, b) = if i >= j { (i, j) } else { (j, i) };
    format!("{}{}", a + 1, b + 1)
}

pub fn cubic_key(i: usize, j: usize, k: usize) -> String {
    let mut s = [i, j, k];
    s.sort_unstable();
    format!("{}{}{}", s[0] + 1, s[1] + 1, s[2] + 1)
}

impl ManifoldSpec {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let spec: ManifoldSpec = serde_json::from_str(text).map_err(|e| SpecError::Json(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Pretty JSON with a trailing newline; stable across round trips.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }

    /// Hex SHA-256 of the compact JSON form.
    pub fn content_hash(&self) -> String {
        let compact = serde_json::to_string(self).expect("spec serializes");
        hex::encode(Sha256::digest(compact.as_bytes()))
    }

    /// Structural checks that need no expression evaluation.
    pub fn validate(&self) -> Result<(), SpecError> {
        let m = self.dim;
        if m == 0 || m > MAX_DIM {
            return Err(invalid(format!("dim must be in 1..={MAX_DIM}, got {m}")));
        }
        if self.coordinates.len() != m {
            return Err(invalid(format!("{} coordinate names for dim {m}", self.coordinates.len())));
        }
        for (i, c) in self.coordinates.iter().enumerate() {
            if !is_identifier(c) {
                return Err(invalid(format!("coordinate name '{c}' is not an identifier")));
            }
            if self.coordinates[..i].contains(c) {
                return Err(invalid(format!("duplicate coordinate '{c}'")));
            }
            if self.parameters.contains_key(c) {
                return Err(invalid(format!("'{c}' is both a coordinate and a parameter")));
            }
        }
        for (p, v) in &self.parameters {
            if !is_identifier(p) {
                return Err(invalid(format!("parameter name '{p}' is not an identifier")));
            }
            if !v.is_finite() {
                return Err(invalid(format!("parameter '{p}' is not finite")));
            }
        }
        for key in self.metric.keys() {
            match parse_key(key, 2, m) {
                Some(ix) if ix[0] >= ix[1] => {}
                _ => return Err(invalid(format!("metric key '{key}' is not a lower-triangle index pair"))),
            }
        }
        for i in 0..m {
            for j in 0..=i {
                let key = metric_key(i, j);
                if !self.metric.contains_key(&key) {
                    return Err(invalid(format!("metric component '{key}' missing")));
                }
            }
        }
        for key in self.cubic.keys() {
            match parse_key(key, 3, m) {
                Some(ix) if ix[0] <= ix[1] && ix[1] <= ix[2] => {}
                Some(_) => {
                    return Err(invalid(format!(
                        "cubic key '{key}' is not sorted; C is totally symmetric, give each component once under its sorted key"
                    )))
                }
                None => return Err(invalid(format!("cubic key '{key}' is not an index triple"))),
            }
        }
        let s = &self.sample;
        if s.bounds.len() != m {
            return Err(invalid(format!("sample box has {} intervals for dim {m}", s.bounds.len())));
        }
        for (i, [lo, hi]) in s.bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(invalid(format!("sample interval {} is not a finite [lo, hi] with lo < hi", i + 1)));
            }
        }
        if s.count == 0 {
            return Err(invalid("sample count must be positive"));
        }
        Ok(())
    }

    /// Parses every component and probes the sample points.
    pub fn compile(&self) -> Result<CompiledSpec, SpecError> {
        self.validate()?;
        let m = self.dim;
        let params: Vec<(String, f64)> = self.parameters.iter().map(|(k, v)| (k.clone(), *v)).collect();
        let parse = |component: String, src: &str| {
            parse_expression(src, &self.coordinates, &params, ParamMode::Substitute)
                .map_err(|source| SpecError::Expr { component, source })
        };
        let mut metric = Vec::new();
        for i in 0..m {
            for j in 0..=i {
                let key = metric_key(i, j);
                metric.push(parse(format!("metric[{key}]"), &self.metric[&key])?);
            }
        }
        let mut cubic = Vec::new();
        for (key, src) in &self.cubic {
            let ix = parse_key(key, 3, m).expect("validated");
            cubic.push(([ix[0], ix[1], ix[2]], key.clone(), parse(format!("cubic[{key}]"), src)?));
        }
        let compiled = CompiledSpec {
            spec: self.clone(),
            metric,
            cubic,
        };
        compiled.probe(&compiled.sample_points(None, None))?;
        Ok(compiled)
    }
}

/// A validated spec with parsed component expressions.
#[derive(Debug, Clone)]
pub struct CompiledSpec {
    spec: ManifoldSpec,
    /// Lower triangle, row-major: `(0,0), (1,0), (1,1), …`.
    metric: Vec<Expr>,
    cubic: Vec<([usize; 3], String, Expr)>,
}

/// A jet evaluator: exact Taylor jets or finite differences with step `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JetSource {
    Exact { order: usize },
    FiniteDifference { order: usize, h: f64 },
}

impl CompiledSpec {
    pub fn spec(&self) -> &ManifoldSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    fn metric_expr(&self, i: usize, j: usize) -> &Expr {
        let (a, b) = if i >= j { (i, j) } else { (j, i) };
        &self.metric[a * (a + 1) / 2 + b]
    }

    fn jet<S: Scalar>(&self, e: &Expr, component: String, point: &[S], src: JetSource) -> Result<Jet<S>, SpecError> {
        let r = match src {
            JetSource::Exact { order } => e.eval_jet(point, order),
            JetSource::FiniteDifference { order, h } => fd_jet(e, point, order, S::lit(h)),
        };
        r.map_err(|source| SpecError::Domain {
            component,
            point: point.iter().map(|x| x.to_f64_lossy()).collect(),
            source,
        })
    }

    /// Jets of `g_ij` and `C_ijk` at a point.
    pub fn jets<S: Scalar>(&self, point: &[S], src: JetSource) -> Result<(JetTensor<S>, JetTensor<S>), SpecError> {
        let m = self.dim();
        let order = match src {
            JetSource::Exact { order } | JetSource::FiniteDifference { order, .. } => order,
        };
        let mut lower = Vec::with_capacity(self.metric.len());
        for i in 0..m {
            for j in 0..=i {
                lower.push(self.jet(self.metric_expr(i, j), format!("metric[{}]", metric_key(i, j)), point, src)?);
            }
        }
        let g = Tensor::from_fn(m, &[Down, Down], |ix| {
            let (a, b) = if ix[0] >= ix[1] { (ix[0], ix[1]) } else { (ix[1], ix[0]) };
            lower[a * (a + 1) / 2 + b].clone()
        });
        let mut entries: BTreeMap<[usize; 3], Jet<S>> = BTreeMap::new();
        for (ix, key, e) in &self.cubic {
            entries.insert(*ix, self.jet(e, format!("cubic[{key}]"), point, src)?);
        }
        let zero = Jet::constant(S::zero(), m, order);
        let c = Tensor::from_fn(m, &[Down, Down, Down], |ix| {
            let mut s = [ix[0], ix[1], ix[2]];
            s.sort_unstable();
            entries.get(&s).cloned().unwrap_or_else(|| zero.clone())
        });
        Ok((g, c))
    }

    /// Sample points: `count` seeded uniform draws (or a grid) plus the box
    /// corners, each inset by 5% of the box width on every side.
    pub fn sample_points(&self, count: Option<usize>, seed: Option<u64>) -> Vec<Vec<f64>> {
        let s = &self.spec.sample;
        let count = count.unwrap_or(s.count);
        let seed = seed.unwrap_or(s.seed);
        let m = self.dim();
        let mut pts = Vec::new();
        match s.strategy {
            Strategy::Uniform => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..count {
                    pts.push(s.bounds.iter().map(|[lo, hi]| rng.gen_range(*lo..*hi)).collect());
                }
            }
            Strategy::Grid => {
                let n = (1..).find(|n: &usize| n.pow(m as u32) >= count).unwrap_or(1);
                for flat in 0..n.pow(m as u32) {
                    let mut r = flat;
                    let p = s
                        .bounds
                        .iter()
                        .map(|[lo, hi]| {
                            let i = r % n;
                            r /= n;
                            lo + (hi - lo) * (i as f64 + 0.5) / n as f64
                        })
                        .collect();
                    pts.push(p);
                }
            }
        }
        for corner in 0..(1usize << m) {
            pts.push(
                s.bounds
                    .iter()
                    .enumerate()
                    .map(|(i, [lo, hi])| {
                        let inset = 0.05 * (hi - lo);
                        if corner >> i & 1 == 1 {
                            hi - inset
                        } else {
                            lo + inset
                        }
                    })
                    .collect(),
            );
        }
        pts
    }

    /// Evaluates every component and checks positive definiteness at each point.
    pub fn probe(&self, points: &[Vec<f64>]) -> Result<(), SpecError> {
        let m = self.dim();
        for p in points {
            let (g, _) = self.jets::<f64>(p, JetSource::Exact { order: 0 })?;
            let gv = g.value();
            if cholesky(gv.data(), m).is_err() {
                return Err(SpecError::NotPositiveDefinite(p.clone()));
            }
        }
        Ok(())
    }
}
