//! Sufficient conditions for two non-homothetic solutions of `Ricci(g) = cT`.

use serde::Serialize;

use crate::curvature::{check_shape, Consts, PrescribedTensor};
use crate::error::Result;
use crate::pair::SymmetricPairSpec;
use crate::scalar::{ArithmeticMode, Scalar};

/// Relative tolerance for argmax ties in floating mode.
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SufficiencyReport {
    pub mode: ArithmeticMode,
    /// Simple ideals (0-based) maximising `kappa_i / T_i`.
    pub m_indices: Vec<usize>,
    /// `zero_lhs < 0`: the scalar curvature attains a global maximum on `tr_g T = -1`.
    pub cond_zero: bool,
    /// `inf_margin > 0`: the scalar curvature attains a global maximum on `tr_g T = 1`.
    pub cond_inf: bool,
    pub zero_lhs: f64,
    /// `RHS - LHS` of the condition at infinity, best over `m_indices`.
    pub inf_margin: Option<f64>,
    pub note: Option<String>,
}

impl SufficiencyReport {
    pub fn both(&self) -> bool {
        self.cond_zero && self.cond_inf
    }
}

/// Evaluates both conditions; comparisons are exact for rational input.
pub fn sufficient_conditions<S: Scalar>(
    spec: &SymmetricPairSpec,
    t: &PrescribedTensor<S>,
) -> Result<SufficiencyReport> {
    check_shape(spec, t.ts().len())?;
    let c = Consts::<S>::of(spec);
    let one = S::one();
    let two = S::from_int(2);
    let three = S::from_int(3);
    let tp = t.tp();
    let ts = t.ts();

    let mut zero_lhs = -(two * c.n.clone());
    let mut tr_q = -(c.n.clone() * tp.clone());
    let mut dim_k = S::zero();
    for i in 0..c.len() {
        let (d, k, ti) = (&c.d[i], &c.kappa[i], &ts[i]);
        let num = c.n.clone() * c.n.clone() * k.clone() * tp.clone() * tp.clone()
            - d.clone() * d.clone() * (one.clone() - k.clone()) * ti.clone() * ti.clone();
        zero_lhs = zero_lhs + num / (c.n.clone() * tp.clone() * ti.clone());
        tr_q = tr_q + d.clone() * ti.clone();
        dim_k = dim_k + d.clone();
    }
    let cond_zero = zero_lhs < S::zero();

    let r = spec.r as usize;
    if r == 0 {
        return Ok(SufficiencyReport {
            mode: S::MODE,
            m_indices: Vec::new(),
            cond_zero,
            cond_inf: false,
            zero_lhs: zero_lhs.to_f64(),
            inf_margin: None,
            note: Some("NoSimpleIdeal: the condition at infinity needs r >= 1".into()),
        });
    }

    let ratios: Vec<S> = (0..r).map(|i| c.kappa[i].clone() / ts[i].clone()).collect();
    let best = ratios
        .iter()
        .cloned()
        .fold(ratios[0].clone(), |a, b| if b > a { b } else { a });
    let m_indices: Vec<usize> = (0..r)
        .filter(|&i| (best.clone() - ratios[i].clone()).near_zero(&best, TIE_TOL))
        .collect();

    let mut margin: Option<S> = None;
    for &m in &m_indices {
        let rhs = dim_k.clone() + c.d[m].clone() * (one.clone() - c.kappa[m].clone())
            - three.clone() * c.n.clone();
        let lhs = c.kappa[m].clone() * tr_q.clone() / ts[m].clone();
        let value = rhs - lhs;
        margin = Some(match margin {
            Some(prev) if prev >= value => prev,
            _ => value,
        });
    }
    let margin = margin.expect("r >= 1 gives at least one maximiser");
    Ok(SufficiencyReport {
        mode: S::MODE,
        m_indices,
        cond_zero,
        cond_inf: margin > S::zero(),
        zero_lhs: zero_lhs.to_f64(),
        inf_margin: Some(margin.to_f64()),
        note: None,
    })
}
