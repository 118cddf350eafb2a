//! Ricci curvature of naturally reductive left-invariant metrics on
//! non-compact simple Lie groups, and solvers for the prescribed Ricci
//! curvature problem `Ricci(g) = cT`.
//!
//! Metrics and tensors are diagonal with respect to the decomposition
//! `g = p + k_1 + ... + k_{r+s}` coming from a Cartan decomposition, so each is
//! described by one coefficient per block (see [`Metric`] and
//! [`PrescribedTensor`]).

// Block formulas index several parallel arrays at once.
#![allow(clippy::needless_range_loop)]

pub mod curvature;
pub mod error;
pub mod exact;
pub mod exec;
pub mod optimizer;
pub mod oracle;
pub mod pair;
pub mod scalar;
pub mod scaled;
pub mod scan;

pub use curvature::{
    lagrange_residual, ricci, scalar, trace_ricci, trace_t, LagrangeFit, Metric, PrescribedTensor,
    RicciComponents,
};
pub use error::{Error, Result};
pub use exact::{exact_condition_residual, solve_exact, ExactSolveReport};
pub use exec::Execution;
pub use optimizer::{
    beta_from_alphas, certify_maximum, maximize_on_manifold, OptOptions, OptResult, OptStatus,
    Target,
};
pub use oracle::{
    a_forms_check, build_algebra, derive_pair, kappa_numeric, ricci_numeric, MatrixAlgebra,
};
pub use pair::{
    builtin_pair, catalog, kappa_from_trace_identity, lookup, validate_pair, BuiltinFamily,
    ClassicalFamily, IdealSpec, SymmetricPairSpec,
};
pub use scalar::{ArithmeticMode, Number, Scalar};
pub use scaled::{
    classify_m0, cubic_coefficients, m0_critical_metric, simple_k_count, solve_scaled_all,
    sufficient_conditions, CubicAnalysis, M0Classification, ScaledSolution, ScaledSolveReport,
    ScanOptions, SimpleKCount, SufficiencyReport,
};
