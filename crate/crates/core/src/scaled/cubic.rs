//! Critical points of the scalar curvature on `tr_g T = 0` for one or two ideals.
//!
//! With two ideals the scalar curvature on that manifold is a negative multiple
//! of `P(alpha_2 / beta)` for the cubic `P(x) = a3 x^3 + a2 x^2 + a1 x + a0`,
//! and critical points are exactly the multiple roots of `P` to the right of
//! `d_2 T_2 / (n Tp)`.

use serde::Serialize;

use crate::curvature::{check_shape, Consts, Metric, PrescribedTensor};
use crate::error::{Error, Result};
use crate::pair::SymmetricPairSpec;
use crate::scalar::{ArithmeticMode, Scalar};

/// Relative tolerance for the measure-zero tests in floating mode.
pub const FLOAT_REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum M0Classification {
    NoCriticalPoint,
    Saddle,
    GlobalMax,
    LocalMaxNotGlobal,
    LocalMin,
    AllCritical,
}

impl M0Classification {
    pub fn is_max(self) -> bool {
        matches!(
            self,
            M0Classification::GlobalMax
                | M0Classification::LocalMaxNotGlobal
                | M0Classification::AllCritical
        )
    }
}

impl std::fmt::Display for M0Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Coefficients, discriminant and root data of `P`.
///
/// With a single ideal the critical-point condition is the constant
/// `d_1 T_1^2 + 2n Tp (2 T_1 - kappa_1 Tp)`, stored in `a0` with the other
/// coefficients zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CubicAnalysis<S = f64> {
    pub mode: ArithmeticMode,
    pub a3: S,
    pub a2: S,
    pub a1: S,
    pub a0: S,
    pub disc: S,
    #[serde(rename = "Rt")]
    pub rt: Option<S>,
    #[serde(rename = "Rd")]
    pub rd: Option<S>,
    #[serde(rename = "Rs")]
    pub rs: Option<S>,
    /// `d_2 T_2 / (n Tp)`; the admissible range of `alpha_2 / beta` lies above it.
    pub threshold: S,
    pub classification: Option<M0Classification>,
}

impl<S: Scalar> CubicAnalysis<S> {
    pub fn to_f64(&self) -> CubicAnalysis<f64> {
        let f = |x: &S| x.to_f64();
        CubicAnalysis {
            mode: self.mode,
            a3: f(&self.a3),
            a2: f(&self.a2),
            a1: f(&self.a1),
            a0: f(&self.a0),
            disc: f(&self.disc),
            rt: self.rt.as_ref().map(f),
            rd: self.rd.as_ref().map(f),
            rs: self.rs.as_ref().map(f),
            threshold: f(&self.threshold),
            classification: self.classification,
        }
    }

    /// `P(x)`.
    pub fn eval(&self, x: &S) -> S {
        ((self.a3.clone() * x.clone() + self.a2.clone()) * x.clone() + self.a1.clone()) * x.clone()
            + self.a0.clone()
    }

    fn b2_minus_3ac(&self) -> (S, S) {
        let b2 = self.a2.clone() * self.a2.clone();
        let ac3 = S::from_int(3) * self.a3.clone() * self.a1.clone();
        let scale = b2.abs() + ac3.abs();
        (b2 - ac3, scale)
    }
}

pub fn cubic_coefficients<S: Scalar>(
    spec: &SymmetricPairSpec,
    t: &PrescribedTensor<S>,
) -> Result<CubicAnalysis<S>> {
    if spec.ideal_count() != 2 {
        return Err(Error::WrongIdealCount(spec.ideal_count()));
    }
    check_shape(spec, t.ts().len())?;
    let c = Consts::<S>::of(spec);
    let one = S::one();
    let two = S::from_int(2);
    let n = c.n.clone();
    let tp = t.tp().clone();
    let (t1, t2) = (t.ts()[0].clone(), t.ts()[1].clone());
    let (d1, d2) = (c.d[0].clone(), c.d[1].clone());
    let (k1, k2) = (c.kappa[0].clone(), c.kappa[1].clone());

    let a3 = n.clone() * d2.clone() * (one.clone() - k2.clone()) * tp.clone();
    let a2 = d1.clone() * d1.clone() * (one.clone() - k1.clone()) * t1.clone()
        - d2.clone() * d2.clone() * (one - k2.clone()) * t2.clone()
        + two.clone() * n.clone() * n.clone() * tp.clone()
        - n.clone() * n.clone() * k1.clone() * tp.clone() * tp.clone() / t1.clone();
    let a1 = -(two.clone() * n.clone() * d2.clone() * t2.clone())
        + two * n.clone() * d2.clone() * k1.clone() * tp.clone() * t2.clone() / t1.clone()
        - n.clone() * d2.clone() * k2.clone() * tp.clone();
    let a0 = -(d2.clone() * d2.clone() * k1 * t2.clone() * t2.clone() / t1)
        + k2 * d2.clone() * d2.clone() * t2.clone();
    let threshold = d2 * t2 / (n * tp);
    let disc = discriminant(&a3, &a2, &a1, &a0).0;
    Ok(CubicAnalysis {
        mode: S::MODE,
        a3,
        a2,
        a1,
        a0,
        disc,
        rt: None,
        rd: None,
        rs: None,
        threshold,
        classification: None,
    })
}

/// The discriminant and the sum of absolute values of its terms.
fn discriminant<S: Scalar>(a: &S, b: &S, c: &S, d: &S) -> (S, S) {
    let k = |i: i64| S::from_int(i);
    let terms = [
        k(18) * a.clone() * b.clone() * c.clone() * d.clone(),
        -(k(4) * b.clone() * b.clone() * b.clone() * d.clone()),
        b.clone() * b.clone() * c.clone() * c.clone(),
        -(k(4) * a.clone() * c.clone() * c.clone() * c.clone()),
        -(k(27) * a.clone() * a.clone() * d.clone() * d.clone()),
    ];
    let scale = terms.iter().fold(S::zero(), |acc, x| acc + x.abs());
    let disc = terms.into_iter().fold(S::zero(), |acc, x| acc + x);
    (disc, scale)
}

/// Classifies critical points of the scalar curvature on `tr_g T = 0`.
///
/// Equalities are exact for rational input and use [`FLOAT_REL_TOL`] relative
/// to the magnitude of the summed terms otherwise.
pub fn classify_m0<S: Scalar>(
    spec: &SymmetricPairSpec,
    t: &PrescribedTensor<S>,
) -> Result<CubicAnalysis<S>> {
    check_shape(spec, t.ts().len())?;
    match spec.ideal_count() {
        1 => Ok(classify_single(spec, t)),
        2 => classify_pair(spec, t),
        k => Err(Error::UnsupportedIdealCount(k)),
    }
}

fn classify_single<S: Scalar>(
    spec: &SymmetricPairSpec,
    t: &PrescribedTensor<S>,
) -> CubicAnalysis<S> {
    let c = Consts::<S>::of(spec);
    let two = S::from_int(2);
    let tp = t.tp().clone();
    let t1 = t.ts()[0].clone();
    let sq = c.d[0].clone() * t1.clone() * t1.clone();
    let lin = two.clone() * c.n.clone() * tp.clone() * two * t1;
    let quad = S::from_int(2) * c.n.clone() * tp.clone() * c.kappa[0].clone() * tp.clone();
    let scale = sq.abs() + lin.abs() + quad.abs();
    let value = sq + lin - quad;
    let classification = if value.near_zero(&scale, FLOAT_REL_TOL) {
        M0Classification::AllCritical
    } else {
        M0Classification::NoCriticalPoint
    };
    CubicAnalysis {
        mode: S::MODE,
        a3: S::zero(),
        a2: S::zero(),
        a1: S::zero(),
        a0: value,
        disc: S::zero(),
        rt: None,
        rd: None,
        rs: None,
        threshold: S::zero(),
        classification: Some(classification),
    }
}

fn classify_pair<S: Scalar>(
    spec: &SymmetricPairSpec,
    t: &PrescribedTensor<S>,
) -> Result<CubicAnalysis<S>> {
    let mut an = cubic_coefficients(spec, t)?;
    let (a, b, c, d) = (&an.a3, &an.a2, &an.a1, &an.a0);
    let (_, disc_scale) = discriminant(a, b, c, d);
    let x0 = an.threshold.clone();
    let mut class = M0Classification::NoCriticalPoint;
    if an.disc.near_zero(&disc_scale, FLOAT_REL_TOL) {
        let (delta, delta_scale) = an.b2_minus_3ac();
        if delta.near_zero(&delta_scale, FLOAT_REL_TOL) {
            let rt = -(b.clone()) / (S::from_int(3) * a.clone());
            if x0 < rt {
                class = M0Classification::Saddle;
            }
            an.rt = Some(rt);
        } else {
            let rd = (S::from_int(9) * a.clone() * d.clone() - b.clone() * c.clone())
                / (S::from_int(2) * delta.clone());
            let rs = (S::from_int(4) * a.clone() * b.clone() * c.clone()
                - S::from_int(9) * a.clone() * a.clone() * d.clone()
                - b.clone() * b.clone() * b.clone())
                / (a.clone() * delta);
            class = if rs <= x0 && x0 < rd {
                M0Classification::GlobalMax
            } else if x0 < rs && rs < rd {
                M0Classification::LocalMaxNotGlobal
            } else if x0 < rd && rd < rs {
                M0Classification::LocalMin
            } else {
                M0Classification::NoCriticalPoint
            };
            an.rd = Some(rd);
            an.rs = Some(rs);
        }
    }
    an.classification = Some(class);
    Ok(an)
}

/// The critical metric predicted by `analysis`, normalised to `beta = 1`.
///
/// `alpha_2` is the multiple root of `P` and `alpha_1` follows from
/// `tr_g T = 0`.
pub fn m0_critical_metric<S: Scalar>(
    spec: &SymmetricPairSpec,
    t: &PrescribedTensor<S>,
    analysis: &CubicAnalysis<S>,
) -> Result<Option<Metric<S>>> {
    let root = match analysis.classification {
        Some(M0Classification::Saddle) => analysis.rt.clone(),
        Some(
            M0Classification::GlobalMax
            | M0Classification::LocalMaxNotGlobal
            | M0Classification::LocalMin,
        ) => analysis.rd.clone(),
        _ => None,
    };
    let Some(r) = root else {
        return Ok(None);
    };
    if spec.ideal_count() != 2 {
        return Err(Error::WrongIdealCount(spec.ideal_count()));
    }
    check_shape(spec, t.ts().len())?;
    let c = Consts::<S>::of(spec);
    let (t1, t2) = (t.ts()[0].clone(), t.ts()[1].clone());
    let denom = c.d[1].clone() * t2 - c.n.clone() * t.tp().clone() * r.clone();
    let alpha1 = -(c.d[0].clone() * t1 * r.clone()) / denom;
    if alpha1 <= S::zero() || r <= S::zero() {
        return Err(Error::PositivityFailure(format!(
            "alpha_1 = {alpha1}, alpha_2 = {r}"
        )));
    }
    Metric::new(S::one(), vec![alpha1, r]).map(Some)
}
