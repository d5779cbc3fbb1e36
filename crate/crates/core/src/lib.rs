//! Numerical geometry of statistical manifolds `(M, g, ∇)` on a coordinate chart.
//!
//! A structure is entered as a metric `g` and a totally symmetric cubic form
//! `C`, each given by component expressions. Everything else (Levi-Civita and
//! dual connections, curvatures, the Tchebychev field and the tension and
//! bi-tension fields of the identity maps) is derived pointwise from
//! truncated Taylor jets of those components.
//!
//! The kernels are generic over the scalar type; [`f64`] aliases are
//! provided at the crate root for the common case.

pub mod analysis;
pub mod builtins;
pub mod crosscheck;
pub mod diagnostics;
pub mod expr;
pub mod geometry;
pub mod maps;
pub mod report;
pub mod scalar;
pub mod spec;
pub mod statistical;
pub mod tensor;

mod error;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Jet over `f64`.
pub type Jet64 = expr::Jet<f64>;
/// Point tensor over `f64`.
pub type PointTensor64 = tensor::PointTensor<f64>;
/// Jet-valued tensor over `f64`.
pub type JetTensor64 = tensor::JetTensor<f64>;
/// Per-point geometry over `f64`.
pub type PointAnalysis64 = analysis::PointAnalysis<f64>;
pub type GeometryFrame64 = geometry::GeometryFrame<f64>;
pub type StatisticalFrame64 = statistical::StatisticalFrame<f64>;
