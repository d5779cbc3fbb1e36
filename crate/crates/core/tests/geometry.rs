mod common;

use common::{builtin, SPACE_FORMS};
use proptest::prelude::*;
use statgeom::expr::Jet;
use statgeom::geometry::{
    christoffel, divergence, laplacian_scalar, metric_inverse, ricci, riemann, rough_laplacian, scalar_curvature,
    GeometryFrame,
};
use statgeom::spec::JetSource;
use statgeom::tensor::{orthonormal_frame, Down, Metric, PointTensor, Tensor, Up};
use statgeom::JetTensor64;

fn euclidean(m: usize, order: usize) -> JetTensor64 {
    Tensor::from_fn(m, &[Down, Down], |i| Jet::constant(if i[0] == i[1] { 1.0 } else { 0.0 }, m, order))
}

/// Curvature constant of a space-form builtin from its parameters.
fn space_form_c(name: &str) -> f64 {
    builtin(name).spec.parameters["c"]
}

/// Christoffel symbols of `e^{2σ} δ` with `σ = ln 2 − ln(1 + c|x|²)`.
fn conformal_christoffel(c: f64, p: &[f64]) -> PointTensor<f64> {
    let r2: f64 = p.iter().map(|x| x * x).sum();
    let ds: Vec<f64> = p.iter().map(|x| -2.0 * c * x / (1.0 + c * r2)).collect();
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    Tensor::from_fn(p.len(), &[Up, Down, Down], |i| {
        let (k, a, b) = (i[0], i[1], i[2]);
        d(k, a) * ds[b] + d(k, b) * ds[a] - d(a, b) * ds[k]
    })
}

#[test]
fn space_form_christoffel_matches_conformal_formula() {
    for name in SPACE_FORMS {
        let c = space_form_c(name);
        let compiled = builtin(name).spec.compile().unwrap();
        for p in compiled.sample_points(Some(20), Some(5)) {
            let (g, _) = compiled.jets::<f64>(&p, JetSource::Exact { order: 2 }).unwrap();
            let gamma = christoffel(&metric_inverse(&g).unwrap()).unwrap().value();
            assert!(gamma.max_abs_diff(&conformal_christoffel(c, &p)) < 1e-12, "{name} {p:?}");
        }
    }
}

#[test]
fn space_form_curvature() {
    for name in SPACE_FORMS {
        let c = space_form_c(name);
        let compiled = builtin(name).spec.compile().unwrap();
        let points = compiled.sample_points(Some(50), Some(11));
        assert!(points.len() >= 50);
        for p in &points {
            let (g, _) = compiled.jets::<f64>(p, JetSource::Exact { order: 3 }).unwrap();
            let f = GeometryFrame::from_metric_jets(p, &g).unwrap();
            let m = p.len();
            let gv = &f.g;
            let expect_r = Tensor::from_fn(m, &[Up, Down, Down, Down], |i| {
                let (l, a, b, k) = (i[0], i[1], i[2], i[3]);
                let d = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
                c * (gv.get(&[b, k]) * d(l, a) - gv.get(&[a, k]) * d(l, b))
            });
            let scale = expect_r.max_abs().max(1.0);
            assert!(f.riemann.max_abs_diff(&expect_r) < 1e-10 * scale, "{name}");
            let expect_ric = gv.scaled(c * (m as f64 - 1.0));
            assert!(f.ricci.max_abs_diff(&expect_ric) < 1e-10 * scale, "{name}");
            let rho = c * (m * (m - 1)) as f64;
            assert!((f.scalar - rho).abs() < 1e-10 * rho.abs(), "{name}: {} vs {rho}", f.scalar);
            assert!(f.frame.orthonormality_defect(gv) < 1e-12);
        }
    }
}

#[test]
fn ricci_trace_in_frame_matches_contraction() {
    let compiled = builtin("sphere-3-1").spec.compile().unwrap();
    for p in compiled.sample_points(Some(10), Some(2)) {
        let (g, _) = compiled.jets::<f64>(&p, JetSource::Exact { order: 2 }).unwrap();
        let metric = metric_inverse(&g).unwrap();
        let r = riemann(&christoffel(&metric).unwrap()).unwrap();
        let ric = ricci(&r).unwrap().value();
        let gv = g.value();
        let frame = orthonormal_frame(&gv).unwrap();
        let rv = r.value();
        let m = p.len();
        for y in 0..m {
            for z in 0..m {
                // Ric(y, z) = Σ_a g(R(e_a, y) z, e_a)
                let t: PointTensor<f64> = Tensor::from_fn(m, &[Down, Down], |i| {
                    (0..m)
                        .map(|l| gv.get(&[l, i[1]]) * rv.get(&[l, i[0], y, z]))
                        .sum()
                });
                assert!((frame.trace(&t).unwrap() - ric.get(&[y, z])).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn radial_field_has_divergence_m() {
    for m in 1..=4 {
        let metric = metric_inverse(&euclidean(m, 2)).unwrap();
        let gamma = christoffel(&metric).unwrap();
        let p: Vec<f64> = (0..m).map(|i| 0.3 * i as f64 - 0.2).collect();
        let v = Tensor::from_fn(m, &[Up], |i| Jet::variable(p[i[0]], i[0], m, 2));
        let div = divergence(&v, &gamma).unwrap();
        assert!((div.value() - m as f64).abs() < 1e-14);
        // Δ|x|² = 2m
        let r2 = p.iter().enumerate().fold(Jet::constant(0.0, m, 2), |acc, (i, x)| {
            let xi = Jet::variable(*x, i, m, 2);
            acc + &xi * &xi
        });
        let lap = laplacian_scalar(&r2, &metric, &gamma).unwrap();
        assert!((lap.value() - 2.0 * m as f64).abs() < 1e-13);
        // rough Laplacian of a linear field vanishes on flat space
        assert!(rough_laplacian(&v, &metric, &gamma).unwrap().value().max_abs() < 1e-14);
    }
}

#[test]
fn index_gymnastics_at_power_surface_point() {
    let compiled = builtin("centroaffine-1-2").spec.compile().unwrap();
    let (g, _) = compiled.jets::<f64>(&[1.0, 1.0], JetSource::Exact { order: 1 }).unwrap();
    let gv = g.value();
    assert_eq!(gv.data(), &[0.5, 0.5, 0.5, 1.5]);
    let metric = Metric::from_values(gv.clone()).unwrap();
    let inv = [3.0, -1.0, -1.0, 1.0];
    for (a, b) in metric.inv.data().iter().zip(inv) {
        assert!((a - b).abs() < 1e-14);
    }
    let eta: PointTensor<f64> = Tensor::new(2, vec![Down], vec![0.0, -1.0]).unwrap();
    let t = eta.raise_index(0, &metric.inv).unwrap();
    assert_eq!(t.signature(), &[Up]);
    assert!((t.data()[0] - 1.0).abs() < 1e-14 && (t.data()[1] + 1.0).abs() < 1e-14);
    assert!(t.lower_index(0, &gv).unwrap().max_abs_diff(&eta) < 1e-14);
    // g^{ij} g_ij = m
    let mixed = gv.raise_index(0, &metric.inv).unwrap();
    assert!((mixed.contract(0, 1).unwrap().data()[0] - 2.0).abs() < 1e-14);
}

#[test]
fn generic_over_f32() {
    let compiled = builtin("sphere-2-1").spec.compile().unwrap();
    let p = [0.1f32, -0.2];
    let (g, _) = compiled.jets::<f32>(&p, JetSource::Exact { order: 2 }).unwrap();
    let metric = metric_inverse(&g).unwrap();
    let ric = ricci(&riemann(&christoffel(&metric).unwrap()).unwrap()).unwrap();
    let rho = scalar_curvature(&ric, &metric).unwrap().value();
    assert!((rho - 2.0).abs() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Γ from the pipeline against the conformal closed form at random points.
    #[test]
    fn hyperbolic_christoffel(x in -0.35..0.35f64, y in -0.35..0.35f64) {
        let compiled = builtin("hyperbolic-2-m1").spec.compile().unwrap();
        let (g, _) = compiled.jets::<f64>(&[x, y], JetSource::Exact { order: 1 }).unwrap();
        let gamma = christoffel(&metric_inverse(&g).unwrap()).unwrap().value();
        prop_assert!(gamma.max_abs_diff(&conformal_christoffel(-1.0, &[x, y])) < 1e-12);
    }

    /// Riemann antisymmetry in its first two lower slots.
    #[test]
    fn riemann_antisymmetry(name in prop::sample::select(SPACE_FORMS.to_vec()), seed in 0u64..1000) {
        let compiled = builtin(name).spec.compile().unwrap();
        let p = compiled.sample_points(Some(1), Some(seed)).pop().unwrap();
        let (g, _) = compiled.jets::<f64>(&p, JetSource::Exact { order: 2 }).unwrap();
        let r = riemann(&christoffel(&metric_inverse(&g).unwrap()).unwrap()).unwrap().value();
        prop_assert!(r.max_abs_diff(&r.permute(&[0, 2, 1, 3]).scaled(-1.0)) < 1e-12);
    }
}
