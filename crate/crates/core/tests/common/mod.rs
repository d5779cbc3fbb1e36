#![allow(dead_code)]

use statgeom::builtins::{self, BuiltinInstance};
use statgeom::diagnostics::analyse_points;
use statgeom::spec::{CompiledSpec, ManifoldSpec};
use statgeom::PointAnalysis64;

pub struct Sampled {
    pub compiled: CompiledSpec,
    pub points: Vec<Vec<f64>>,
    pub analyses: Vec<PointAnalysis64>,
}

pub fn sample(spec: &ManifoldSpec) -> Sampled {
    let compiled = spec.compile().expect("spec compiles");
    let points = compiled.sample_points(None, None);
    let analyses = analyse_points(&compiled, &points).expect("pipeline runs");
    Sampled {
        compiled,
        points,
        analyses,
    }
}

pub fn builtin(name: &str) -> BuiltinInstance {
    builtins::get(name).unwrap_or_else(|| panic!("builtin {name}"))
}

pub fn max_over<T>(items: &[T], f: impl Fn(&T) -> f64) -> f64 {
    items.iter().map(f).fold(0.0, f64::max)
}

pub const CENTROAFFINE: [&str; 3] = ["centroaffine-1-1", "centroaffine-1-2", "centroaffine-2-3"];
pub const SPACE_FORMS: [&str; 5] = ["sphere-2-1", "sphere-3-1", "sphere-2-4", "hyperbolic-2-m1", "hyperbolic-3-m1"];

/// Flat instances with constant cubic forms: three seeds in each of m = 2, 3.
pub fn flat_constant_names() -> Vec<String> {
    let mut v = Vec::new();
    for m in [2, 3] {
        for seed in [1, 2, 3] {
            v.push(format!("flat-random-{m}-seed{seed}"));
        }
    }
    v
}

/// Random polynomial cubic forms on flat ℝ², seeds 1..=n.
pub fn polynomial_instances(n: u64) -> Vec<BuiltinInstance> {
    (1..=n).map(builtins::flat_polynomial_cubic).collect()
}
