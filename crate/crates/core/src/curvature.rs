//! Closed-form Ricci and scalar curvature of `g = beta Q|_p + sum alpha_i Q|_{k_i}`.
//!
//! Ricci curvature of such a metric is block-diagonal with scalar blocks, so
//! everything here is expressed as coefficients against the fixed `Q`-blocks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pair::SymmetricPairSpec;
use crate::scalar::{ArithmeticMode, Scalar};

/// Positive coefficients `(beta; alpha_1, ..., alpha_{r+s})`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metric<S = f64> {
    beta: S,
    alphas: Vec<S>,
}

impl<S: Scalar> Metric<S> {
    pub fn new(beta: S, alphas: Vec<S>) -> Result<Self> {
        let zero = S::zero();
        if beta <= zero || alphas.iter().any(|a| *a <= zero) {
            return Err(Error::NonPositiveMetric(format!(
                "beta = {beta}, alphas = {}",
                join(&alphas)
            )));
        }
        Ok(Metric { beta, alphas })
    }

    /// `beta = alpha_1 = ... = t`.
    pub fn uniform(t: S, count: usize) -> Result<Self> {
        Self::new(t.clone(), vec![t; count])
    }

    pub fn beta(&self) -> &S {
        &self.beta
    }

    pub fn alphas(&self) -> &[S] {
        &self.alphas
    }

    pub fn scaled(&self, tau: &S) -> Self {
        Metric {
            beta: self.beta.clone() * tau.clone(),
            alphas: self
                .alphas
                .iter()
                .map(|a| a.clone() * tau.clone())
                .collect(),
        }
    }

    /// Representative with `beta = 1`.
    pub fn normalized(&self) -> Self {
        let inv = S::one() / self.beta.clone();
        self.scaled(&inv)
    }

    pub fn to_f64(&self) -> Metric<f64> {
        Metric {
            beta: self.beta.to_f64(),
            alphas: self.alphas.iter().map(Scalar::to_f64).collect(),
        }
    }
}

/// Coefficients of `T = -Tp Q|_p + T_1 Q|_{k_1} + ... + T_{r+s} Q|_{k_{r+s}}`,
/// all positive.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrescribedTensor<S = f64> {
    tp: S,
    ts: Vec<S>,
}

impl<S: Scalar> PrescribedTensor<S> {
    pub fn new(tp: S, ts: Vec<S>) -> Result<Self> {
        let zero = S::zero();
        if tp <= zero || ts.iter().any(|t| *t <= zero) {
            return Err(Error::NonPositiveTensor(format!(
                "Tp = {tp}, T = {}",
                join(&ts)
            )));
        }
        Ok(PrescribedTensor { tp, ts })
    }

    pub fn tp(&self) -> &S {
        &self.tp
    }

    pub fn ts(&self) -> &[S] {
        &self.ts
    }

    pub fn scaled(&self, tau: &S) -> Self {
        PrescribedTensor {
            tp: self.tp.clone() * tau.clone(),
            ts: self.ts.iter().map(|t| t.clone() * tau.clone()).collect(),
        }
    }

    pub fn to_f64(&self) -> PrescribedTensor<f64> {
        PrescribedTensor {
            tp: self.tp.to_f64(),
            ts: self.ts.iter().map(Scalar::to_f64).collect(),
        }
    }

    pub fn swap(&self, i: usize, j: usize) -> Self {
        let mut out = self.clone();
        out.ts.swap(i, j);
        out
    }
}

/// `Ricci(g) = ric_p Q|_p + sum_j ric_k[j] Q|_{k_j}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RicciComponents<S = f64> {
    pub ric_p: S,
    pub ric_k: Vec<S>,
}

impl<S: Scalar> RicciComponents<S> {
    pub fn mode(&self) -> ArithmeticMode {
        S::MODE
    }

    /// The tensor `T = Ricci(g)` in the sign convention of [`PrescribedTensor`].
    pub fn as_tensor(&self) -> Result<PrescribedTensor<S>> {
        PrescribedTensor::new(-self.ric_p.clone(), self.ric_k.clone())
    }
}

/// Pair constants lifted into the working scalar type.
#[derive(Clone, Debug)]
pub(crate) struct Consts<S> {
    pub n: S,
    pub d: Vec<S>,
    pub kappa: Vec<S>,
}

impl<S: Scalar> Consts<S> {
    pub fn of(spec: &SymmetricPairSpec) -> Self {
        Consts {
            n: S::from_u32(spec.n),
            d: spec.ideals.iter().map(|i| S::from_u32(i.d)).collect(),
            kappa: spec
                .ideals
                .iter()
                .map(|i| S::from_rational(&i.kappa))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }
}

pub(crate) fn check_shape(spec: &SymmetricPairSpec, got: usize) -> Result<()> {
    let expected = spec.ideal_count();
    if expected != got {
        return Err(Error::ShapeMismatch { expected, got });
    }
    Ok(())
}

fn quarter<S: Scalar>() -> S {
    S::one() / S::from_int(4)
}

fn two<S: Scalar>() -> S {
    S::from_int(2)
}

pub fn ricci<S: Scalar>(spec: &SymmetricPairSpec, g: &Metric<S>) -> Result<RicciComponents<S>> {
    check_shape(spec, g.alphas.len())?;
    let c = Consts::<S>::of(spec);
    let one = S::one();
    let beta = &g.beta;
    let mut ric_p = S::zero();
    let mut ric_k = Vec::with_capacity(c.len());
    for j in 0..c.len() {
        let alpha = &g.alphas[j];
        let one_minus = one.clone() - c.kappa[j].clone();
        let ratio = alpha.clone() / beta.clone();
        ric_p = ric_p
            - (ratio.clone() / two() + one.clone()) * c.d[j].clone() * one_minus.clone()
                / c.n.clone();
        ric_k.push(quarter::<S>() * (ratio.clone() * ratio * one_minus + c.kappa[j].clone()));
    }
    Ok(RicciComponents { ric_p, ric_k })
}

pub fn scalar<S: Scalar>(spec: &SymmetricPairSpec, g: &Metric<S>) -> Result<S> {
    check_shape(spec, g.alphas.len())?;
    let c = Consts::<S>::of(spec);
    let one = S::one();
    let beta = &g.beta;
    let beta_sq = beta.clone() * beta.clone();
    let mut s = -(c.n.clone() / (two::<S>() * beta.clone()));
    for j in 0..c.len() {
        let alpha = &g.alphas[j];
        let one_minus = one.clone() - c.kappa[j].clone();
        s = s - quarter::<S>() * alpha.clone() / beta_sq.clone() * c.d[j].clone() * one_minus;
        if !c.kappa[j].is_zero() {
            s = s + quarter::<S>() * c.d[j].clone() * c.kappa[j].clone() / alpha.clone();
        }
    }
    Ok(s)
}

/// `tr_g T = -n Tp / beta + sum d_i T_i / alpha_i`.
pub fn trace_t<S: Scalar>(
    spec: &SymmetricPairSpec,
    g: &Metric<S>,
    t: &PrescribedTensor<S>,
) -> Result<S> {
    check_shape(spec, g.alphas.len())?;
    check_shape(spec, t.ts.len())?;
    let c = Consts::<S>::of(spec);
    let mut tr = -(c.n.clone() * t.tp.clone() / g.beta.clone());
    for j in 0..c.len() {
        tr = tr + c.d[j].clone() * t.ts[j].clone() / g.alphas[j].clone();
    }
    Ok(tr)
}

/// `tr_g Ricci(g)`; equals [`scalar`] by construction of the closed forms.
pub fn trace_ricci<S: Scalar>(spec: &SymmetricPairSpec, g: &Metric<S>) -> Result<S> {
    let ric = ricci(spec, g)?;
    let c = Consts::<S>::of(spec);
    let mut tr = c.n.clone() * ric.ric_p / g.beta.clone();
    for j in 0..c.len() {
        tr = tr + c.d[j].clone() * ric.ric_k[j].clone() / g.alphas[j].clone();
    }
    Ok(tr)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LagrangeFit<S = f64> {
    /// Least-squares constant `c` in `Ricci(g) ~ c T`.
    pub c_best: S,
    /// Squared `Q`-norm of `Ricci(g) - c_best T`.
    pub residual_sq: S,
    pub residual: f64,
}

/// Fits `Ricci(g) = c T` in the `Q`-norm on diagonal tensors, which weights
/// the `p` block by `n` and block `k_j` by `d_j`.
pub fn lagrange_residual<S: Scalar>(
    spec: &SymmetricPairSpec,
    g: &Metric<S>,
    t: &PrescribedTensor<S>,
) -> Result<LagrangeFit<S>> {
    check_shape(spec, t.ts.len())?;
    let ric = ricci(spec, g)?;
    let c = Consts::<S>::of(spec);
    // T's p-block coefficient is -Tp.
    let tp_coef = -t.tp.clone();
    let mut rt = c.n.clone() * ric.ric_p.clone() * tp_coef.clone();
    let mut tt = c.n.clone() * tp_coef.clone() * tp_coef.clone();
    for j in 0..c.len() {
        rt = rt + c.d[j].clone() * ric.ric_k[j].clone() * t.ts[j].clone();
        tt = tt + c.d[j].clone() * t.ts[j].clone() * t.ts[j].clone();
    }
    let c_best = rt / tt;
    let dp = ric.ric_p - c_best.clone() * tp_coef;
    let mut residual_sq = c.n.clone() * dp.clone() * dp;
    for j in 0..c.len() {
        let dk = ric.ric_k[j].clone() - c_best.clone() * t.ts[j].clone();
        residual_sq = residual_sq + c.d[j].clone() * dk.clone() * dk;
    }
    let residual = residual_sq.to_f64().max(0.0).sqrt();
    Ok(LagrangeFit {
        c_best,
        residual_sq,
        residual,
    })
}

fn join<S: std::fmt::Display>(xs: &[S]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}
