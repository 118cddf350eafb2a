//! The scaled problem `Ricci(g) = cT`: sufficient conditions, a complete root
//! search, closed-form counts for simple `K`, and the critical-point
//! classification on `tr_g T = 0`.

pub mod cubic;
pub mod roots;
pub mod simple_k;
pub mod sufficiency;

pub use cubic::{
    classify_m0, cubic_coefficients, m0_critical_metric, CubicAnalysis, M0Classification,
};
pub use roots::{solve_scaled_all, ScaledEquation, ScaledSolution, ScaledSolveReport, ScanOptions};
pub use simple_k::{simple_k_count, SimpleKCount};
pub use sufficiency::{sufficient_conditions, SufficiencyReport};
