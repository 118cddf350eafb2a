//! Solving `Ricci(g) = T` exactly (no scaling constant).
//!
//! A solution exists iff `4 T_i - kappa_i > 0` for every ideal and the
//! `p`-block equation balances; it is then unique up to scaling, with
//! `alpha_i / beta = sqrt((4 T_i - kappa_i) / (1 - kappa_i))`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::curvature::{check_shape, Metric, PrescribedTensor};
use crate::error::{Error, Result};
use crate::pair::SymmetricPairSpec;
use crate::scalar::{ratio_to_f64, ArithmeticMode, Scalar};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Bits of the fixed-point evaluation used for exact inputs with several ideals.
const FIXED_BITS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactSolveReport {
    pub mode: ArithmeticMode,
    pub positivity_ok: Vec<bool>,
    /// `Tp - sum (2 d_i (1 - kappa_i) + d_i sqrt((4T_i - kappa_i)(1 - kappa_i))) / (2n)`;
    /// absent when some `4T_i - kappa_i < 0`.
    pub tp_residual: Option<f64>,
    /// The solution normalised to `beta = 1`.
    pub solution: Option<Metric<f64>>,
}

/// Residual of the `p`-block balance equation in floating point.
pub fn exact_condition_residual(
    spec: &SymmetricPairSpec,
    t: &PrescribedTensor<f64>,
) -> Result<f64> {
    check_shape(spec, t.ts().len())?;
    let n = f64::from(spec.n);
    let mut sum = 0.0;
    for (index, (ideal, &ti)) in spec.ideals.iter().zip(t.ts()).enumerate() {
        let kappa = ratio_to_f64(&ideal.kappa);
        let d = f64::from(ideal.d);
        let x = 4.0 * ti - kappa;
        if x < 0.0 {
            return Err(Error::PositivityViolated { index, value: x });
        }
        sum += 2.0 * d * (1.0 - kappa) + d * (x * (1.0 - kappa)).sqrt();
    }
    Ok(t.tp() - sum / (2.0 * n))
}

/// Decides solvability of `Ricci(g) = T` and returns the normalised solution.
///
/// Floating inputs use `tol` both for the strict positivity test and the
/// balance equation. Exact inputs decide both conditions exactly (single
/// ideal) or with a 200-bit fixed-point bound (several ideals); `tol` is then
/// only used if positive, as an additional acceptance band.
pub fn solve_exact<S: Scalar>(
    spec: &SymmetricPairSpec,
    t: &PrescribedTensor<S>,
    tol: f64,
) -> Result<ExactSolveReport> {
    check_shape(spec, t.ts().len())?;
    if tol < 0.0 || !tol.is_finite() {
        return Err(Error::ParamOutOfRange(format!("tolerance {tol}")));
    }
    let exact_t = t
        .ts()
        .iter()
        .map(Scalar::to_rational)
        .collect::<Option<Vec<_>>>()
        .zip(t.tp().to_rational());
    match exact_t {
        Some((ts, tp)) => solve_rational(spec, &tp, &ts, tol),
        None => {
            if tol == 0.0 {
                return Err(Error::ParamOutOfRange(
                    "tolerance 0 is only meaningful for exact inputs".into(),
                ));
            }
            solve_float(spec, &t.to_f64(), tol)
        }
    }
}

fn solve_float(
    spec: &SymmetricPairSpec,
    t: &PrescribedTensor<f64>,
    tol: f64,
) -> Result<ExactSolveReport> {
    let positivity_ok: Vec<bool> = spec
        .ideals
        .iter()
        .zip(t.ts())
        .map(|(ideal, &ti)| 4.0 * ti - ratio_to_f64(&ideal.kappa) > tol)
        .collect();
    let tp_residual = match exact_condition_residual(spec, t) {
        Ok(r) => Some(r),
        Err(Error::PositivityViolated { .. }) => None,
        Err(e) => return Err(e),
    };
    let solvable =
        positivity_ok.iter().all(|&ok| ok) && tp_residual.is_some_and(|r| r.abs() <= tol);
    let solution = if solvable {
        Some(alphas_metric(spec, t.ts().iter().copied())?)
    } else {
        None
    };
    Ok(ExactSolveReport {
        mode: ArithmeticMode::Float,
        positivity_ok,
        tp_residual,
        solution,
    })
}

fn solve_rational(
    spec: &SymmetricPairSpec,
    tp: &BigRational,
    ts: &[BigRational],
    tol: f64,
) -> Result<ExactSolveReport> {
    let four = BigRational::from_integer(4.into());
    let xs: Vec<BigRational> = spec
        .ideals
        .iter()
        .zip(ts)
        .map(|(ideal, ti)| &four * ti - &ideal.kappa)
        .collect();
    let positivity_ok: Vec<bool> = xs.iter().map(Signed::is_positive).collect();
    let tp_residual = if xs.iter().any(Signed::is_negative) {
        None
    } else {
        Some(fixed_point_residual(spec, tp, &xs))
    };
    let mut exact_zero = false;
    let balanced = match &tp_residual {
        None => false,
        Some(res) => {
            exact_zero = if spec.ideal_count() == 1 {
                single_ideal_balanced(spec, tp, &xs[0])
            } else {
                res.within_error()
            };
            exact_zero || (tol > 0.0 && res.value.abs() <= tol)
        }
    };
    let solution = if balanced && positivity_ok.iter().all(|&ok| ok) {
        Some(alphas_metric(spec, ts.iter().map(ratio_to_f64))?)
    } else {
        None
    };
    Ok(ExactSolveReport {
        mode: ArithmeticMode::Exact,
        positivity_ok,
        // A decided zero is reported as such rather than as truncation noise.
        tp_residual: tp_residual.map(|r| if exact_zero { 0.0 } else { r.value }),
        solution,
    })
}

/// `Tp = (2d(1-k) + d sqrt(x (1-k))) / (2n)` decided by squaring.
fn single_ideal_balanced(spec: &SymmetricPairSpec, tp: &BigRational, x: &BigRational) -> bool {
    let ideal = &spec.ideals[0];
    let d = BigRational::from_integer(ideal.d.into());
    let n = BigRational::from_integer(spec.n.into());
    let two = BigRational::from_integer(2.into());
    let one_minus = BigRational::one() - &ideal.kappa;
    let lhs = &two * &n * tp - &two * &d * &one_minus;
    if lhs.is_negative() {
        return false;
    }
    &lhs * &lhs == &d * &d * x * &one_minus
}

struct FixedResidual {
    value: f64,
    /// Residual scaled by `2n * 2^FIXED_BITS`, truncated.
    scaled: BigInt,
    /// Bound on the truncation error of `scaled`.
    error_bound: BigInt,
}

impl FixedResidual {
    fn within_error(&self) -> bool {
        self.scaled.abs() <= self.error_bound
    }
}

fn fixed_point_residual(
    spec: &SymmetricPairSpec,
    tp: &BigRational,
    xs: &[BigRational],
) -> FixedResidual {
    let scale = BigInt::one() << FIXED_BITS;
    let floor_scaled = |r: &BigRational| -> BigInt {
        let v = r * BigRational::from_integer(scale.clone());
        v.floor().to_integer()
    };
    let n = BigRational::from_integer(spec.n.into());
    let two = BigRational::from_integer(2.into());
    let mut rational_part = &two * &n * tp;
    let mut root_sum = BigInt::zero();
    let mut error_bound = BigInt::from(2);
    for (ideal, x) in spec.ideals.iter().zip(xs) {
        let d = BigRational::from_integer(ideal.d.into());
        let one_minus = BigRational::one() - &ideal.kappa;
        rational_part -= &two * &d * &one_minus;
        let radicand = x * &one_minus * BigRational::from_integer(&scale * &scale);
        let root = radicand.floor().to_integer().sqrt();
        root_sum += BigInt::from(ideal.d) * root;
        error_bound += BigInt::from(ideal.d);
    }
    let scaled = floor_scaled(&rational_part) - root_sum;
    let value = ratio_to_f64(&BigRational::new(scaled.clone(), scale)) / (2.0 * f64::from(spec.n));
    FixedResidual {
        value,
        scaled,
        error_bound,
    }
}

fn alphas_metric(spec: &SymmetricPairSpec, ts: impl Iterator<Item = f64>) -> Result<Metric<f64>> {
    let alphas = spec
        .ideals
        .iter()
        .zip(ts)
        .map(|(ideal, ti)| {
            let kappa = ratio_to_f64(&ideal.kappa);
            ((4.0 * ti - kappa) / (1.0 - kappa)).sqrt()
        })
        .collect();
    Metric::new(1.0, alphas)
}
