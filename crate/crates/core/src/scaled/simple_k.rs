//! Closed-form solution counts for `Ricci(g) = cT` when `K` is simple.

use serde::Serialize;

use crate::curvature::{check_shape, Consts, PrescribedTensor};
use crate::error::{Error, Result};
use crate::pair::SymmetricPairSpec;
use crate::scalar::{ArithmeticMode, Scalar};

/// Relative tolerance for the trichotomy in floating mode.
pub const FLOAT_REL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimpleKCount {
    pub mode: ArithmeticMode,
    /// Number of pairs `(g, c)` up to scaling: 0, 1 or 2.
    pub count: u8,
    /// `E = T_1^2 + 4 (1 - kappa) Tp (2 T_1 - kappa Tp)`.
    #[serde(rename = "E")]
    pub e: f64,
}

pub fn simple_k_count<S: Scalar>(
    spec: &SymmetricPairSpec,
    t: &PrescribedTensor<S>,
) -> Result<SimpleKCount> {
    if (spec.r, spec.s) != (1, 0) {
        return Err(Error::NotSimpleK {
            r: spec.r,
            s: spec.s,
        });
    }
    check_shape(spec, t.ts().len())?;
    let c = Consts::<S>::of(spec);
    let k = c.kappa[0].clone();
    let tp = t.tp().clone();
    let t1 = t.ts()[0].clone();
    let four = S::from_int(4);
    let sq = t1.clone() * t1.clone();
    let lin = four.clone() * (S::one() - k.clone()) * tp.clone() * S::from_int(2) * t1;
    let quad = four * (S::one() - k.clone()) * tp.clone() * k * tp;
    let scale = sq.abs() + lin.abs() + quad.abs();
    // E - T_1^2
    let excess = lin - quad;
    let e = sq + excess.clone();
    let count = if e.near_zero(&scale, FLOAT_REL_TOL) || excess.near_zero(&scale, FLOAT_REL_TOL) {
        1
    } else if e < S::zero() {
        0
    } else if excess > S::zero() {
        1
    } else {
        2
    };
    Ok(SimpleKCount {
        mode: S::MODE,
        count,
        e: e.to_f64(),
    })
}
