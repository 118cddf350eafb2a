//! Maximising the scalar curvature on `M_T = {g : tr_g T = target}`.
//!
//! `beta` is eliminated through the constraint, leaving an unconstrained
//! problem in `u_j = ln alpha_j`. On `tr_g T = 0` the functional is not bounded
//! along rays, so the scale-invariant `beta * S` is maximised instead; it has
//! the same critical rays.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvature::{check_shape, lagrange_residual, trace_t, Consts, Metric, PrescribedTensor};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::pair::SymmetricPairSpec;
use crate::scalar::Scalar;
use crate::scaled::classify_m0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Target {
    Minus,
    Zero,
    Plus,
}

impl Target {
    pub fn value(self) -> i32 {
        match self {
            Target::Minus => -1,
            Target::Zero => 0,
            Target::Plus => 1,
        }
    }
}

impl TryFrom<i32> for Target {
    type Error = Error;

    fn try_from(v: i32) -> Result<Self> {
        match v {
            -1 => Ok(Target::Minus),
            0 => Ok(Target::Zero),
            1 => Ok(Target::Plus),
            _ => Err(Error::ParamOutOfRange(format!(
                "target must be -1, 0 or 1, got {v}"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptOptions {
    pub max_iterations: usize,
    /// Stationarity threshold on the gradient norm in log coordinates.
    pub grad_tol: f64,
    /// Acceptance threshold for the relative Lagrange residual and the constraint.
    pub residual_threshold: f64,
    pub restarts: usize,
    pub seed: u64,
    /// `|(ln alpha, ln beta)|` beyond which an increasing run counts as escaping to infinity.
    pub divergence_radius: f64,
    pub execution: Execution,
}

impl Default for OptOptions {
    fn default() -> Self {
        OptOptions {
            max_iterations: 10_000,
            grad_tol: 1e-10,
            residual_threshold: 1e-6,
            restarts: 16,
            seed: 0,
            divergence_radius: 40.0,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OptStatus {
    Converged,
    DidNotConverge,
    SupremumAtInfinity,
    /// A stationary point on `tr_g T = 0` not backed by the cubic classification.
    Advisory,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Basin {
    pub metric: Metric<f64>,
    pub s_value: f64,
    pub c_estimate: f64,
    pub starts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptResult {
    pub target: Target,
    /// On the constraint manifold; normalised to `beta = 1` for target 0.
    pub metric: Metric<f64>,
    pub s_value: f64,
    pub c_estimate: f64,
    /// `|Ricci(g) - c T|_Q / (|c| |T|_Q)`.
    pub residual: f64,
    pub converged: bool,
    pub status: OptStatus,
    pub iterations: usize,
    pub restarts_used: usize,
    /// Distinct converged maximisers, best first.
    pub basins: Vec<Basin>,
}

/// `beta = n Tp / (sum d_i T_i / alpha_i - target)`, absent when the
/// denominator is not positive.
pub fn beta_from_alphas<S: Scalar>(
    spec: &SymmetricPairSpec,
    t: &PrescribedTensor<S>,
    alphas: &[S],
    target: Target,
) -> Result<Option<S>> {
    check_shape(spec, t.ts().len())?;
    check_shape(spec, alphas.len())?;
    if alphas.iter().any(|a| *a <= S::zero()) {
        return Err(Error::NonPositiveMetric("alphas must be positive".into()));
    }
    let c = Consts::<S>::of(spec);
    let mut denom = -S::from_int(i64::from(target.value()));
    for j in 0..c.len() {
        denom = denom + c.d[j].clone() * t.ts()[j].clone() / alphas[j].clone();
    }
    if denom <= S::zero() {
        return Ok(None);
    }
    Ok(Some(c.n * t.tp().clone() / denom))
}

/// The reduced problem in log coordinates.
#[derive(Clone, Debug)]
pub struct Reduced {
    n: f64,
    tp: f64,
    target: Target,
    d: Vec<f64>,
    kappa: Vec<f64>,
    ts: Vec<f64>,
}

impl Reduced {
    pub fn new(
        spec: &SymmetricPairSpec,
        t: &PrescribedTensor<f64>,
        target: Target,
    ) -> Result<Self> {
        check_shape(spec, t.ts().len())?;
        let c = Consts::<f64>::of(spec);
        Ok(Reduced {
            n: c.n,
            tp: *t.tp(),
            target,
            d: c.d,
            kappa: c.kappa,
            ts: t.ts().to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn beta(&self, alphas: &[f64]) -> Option<f64> {
        let denom: f64 = self
            .d
            .iter()
            .zip(&self.ts)
            .zip(alphas)
            .map(|((d, t), a)| d * t / a)
            .sum::<f64>()
            - f64::from(self.target.value());
        (denom > 0.0 && denom.is_finite()).then(|| self.n * self.tp / denom)
    }

    /// Objective and gradient at `u = ln alpha`, or `None` off the manifold.
    pub fn eval(&self, u: &[f64]) -> Option<(f64, Vec<f64>)> {
        let alphas: Vec<f64> = u.iter().map(|x| x.exp()).collect();
        let beta = self.beta(&alphas)?;
        let b2 = beta * beta;
        let mut s = -self.n / (2.0 * beta);
        let mut ds_dbeta = self.n / (2.0 * b2);
        for j in 0..self.dim() {
            let w = self.d[j] * (1.0 - self.kappa[j]);
            s += -0.25 * alphas[j] * w / b2 + 0.25 * self.d[j] * self.kappa[j] / alphas[j];
            ds_dbeta += 0.5 * alphas[j] * w / (b2 * beta);
        }
        let mut grad = Vec::with_capacity(self.dim());
        let mut dbeta_du = Vec::with_capacity(self.dim());
        for j in 0..self.dim() {
            let a = alphas[j];
            let ds_da = -0.25 * self.d[j] * (1.0 - self.kappa[j]) / b2
                - 0.25 * self.d[j] * self.kappa[j] / (a * a);
            let db_da = b2 / (self.n * self.tp) * self.d[j] * self.ts[j] / (a * a);
            grad.push(a * (ds_da + ds_dbeta * db_da));
            dbeta_du.push(a * db_da);
        }
        if self.target == Target::Zero {
            for j in 0..self.dim() {
                grad[j] = s * dbeta_du[j] + beta * grad[j];
            }
            s *= beta;
        }
        (s.is_finite() && grad.iter().all(|g| g.is_finite())).then_some((s, grad))
    }

    /// The metric at `u`, normalised to `beta = 1` on `tr_g T = 0`.
    pub fn metric(&self, u: &[f64]) -> Option<Metric<f64>> {
        let alphas: Vec<f64> = u.iter().map(|x| x.exp()).collect();
        let beta = self.beta(&alphas)?;
        let g = Metric::new(beta, alphas).ok()?;
        Some(if self.target == Target::Zero {
            g.normalized()
        } else {
            g
        })
    }

    fn escape_norm(&self, u: &[f64]) -> f64 {
        let alphas: Vec<f64> = u.iter().map(|x| x.exp()).collect();
        let lb = self.beta(&alphas).map_or(f64::INFINITY, f64::ln);
        if self.target == Target::Zero {
            u.iter().map(|x| (x - lb).powi(2)).sum::<f64>().sqrt()
        } else {
            (u.iter().map(|x| x * x).sum::<f64>() + lb * lb).sqrt()
        }
    }

    fn objective(&self, u: &[f64]) -> f64 {
        self.eval(u).map_or(f64::NEG_INFINITY, |(f, _)| f)
    }
}

#[derive(Clone, Debug)]
struct Run {
    u: Vec<f64>,
    f: f64,
    iterations: usize,
    stationary: bool,
    stalled: bool,
    diverged: bool,
}

fn ascend(p: &Reduced, u0: Vec<f64>, opts: &OptOptions) -> Run {
    let (mut f, mut g) = p.eval(&u0).expect("start point is feasible");
    let mut u = u0;
    let mut step = 1e-2 / norm(&g).max(1.0);
    let mut run = Run {
        u: Vec::new(),
        f,
        iterations: 0,
        stationary: false,
        stalled: false,
        diverged: false,
    };
    let mut flat = 0usize;
    for it in 0..opts.max_iterations {
        run.iterations = it + 1;
        let gn = norm(&g);
        if gn <= opts.grad_tol * (1.0 + f.abs()) {
            run.stationary = true;
            run.iterations = it;
            break;
        }
        let mut t = step;
        let accepted = loop {
            let cand: Vec<f64> = u.iter().zip(&g).map(|(x, d)| x + t * d).collect();
            if let Some((fc, gc)) = p.eval(&cand) {
                if fc >= f + 1e-4 * t * gn * gn {
                    break Some((cand, fc, gc));
                }
            }
            t *= 0.5;
            if t * gn < 1e-18 * (1.0 + norm(&u)) {
                break None;
            }
        };
        let Some((un, fnew, gnew)) = accepted else {
            run.stalled = true;
            break;
        };
        let s: Vec<f64> = un.iter().zip(&u).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        // Barzilai-Borwein for the ascent direction; curvature must be negative.
        step = if sy < 0.0 {
            dot(&s, &s) / -sy
        } else {
            (4.0 * t).min(1e6)
        };
        if fnew - f <= 1e-15 * f.abs().max(1e-300) {
            flat += 1;
        } else {
            flat = 0;
        }
        u = un;
        f = fnew;
        g = gnew;
        if flat >= 20 {
            run.stalled = true;
            break;
        }
        if p.escape_norm(&u) > opts.divergence_radius {
            run.diverged = true;
            break;
        }
    }
    run.u = u;
    run.f = f;
    run
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Deterministic feasible starting points around `alpha_i ~ d_i T_i`.
fn starts(p: &Reduced, opts: &OptOptions) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let centre: Vec<f64> = p.d.iter().zip(&p.ts).map(|(d, t)| (d * t).ln()).collect();
    let mut out = Vec::with_capacity(opts.restarts);
    let mut attempts = 0usize;
    while out.len() < opts.restarts {
        attempts += 1;
        if attempts > 1000 * opts.restarts.max(1) {
            return Err(Error::NoFeasiblePoint(format!(
                "no sampled alpha gives a positive beta for target {}",
                p.target.value()
            )));
        }
        let u: Vec<f64> = centre
            .iter()
            .map(|c| c + rng.gen_range(-4.0..2.0))
            .collect();
        if p.eval(&u).is_some() {
            out.push(u);
        }
    }
    Ok(out)
}

pub fn maximize_on_manifold(
    spec: &SymmetricPairSpec,
    t: &PrescribedTensor<f64>,
    target: Target,
    opts: &OptOptions,
) -> Result<OptResult> {
    let p = Reduced::new(spec, t, target)?;
    let starts = starts(&p, opts)?;
    let runs = opts
        .execution
        .map(&starts, |u0| ascend(&p, u0.clone(), opts));

    // Interior maxima on tr_g T = 0 are only claimed where the cubic analysis predicts one.
    let claim_zero = target != Target::Zero
        || classify_m0(spec, t)
            .ok()
            .and_then(|a| a.classification)
            .is_some_and(|c| c.is_max());

    let mut evaluated = Vec::with_capacity(runs.len());
    for run in &runs {
        let Some(metric) = p.metric(&run.u) else {
            continue;
        };
        let fit = lagrange_residual(spec, &metric, t)?;
        let residual = relative_residual(spec, t, fit.residual, fit.c_best);
        let constraint = trace_t(spec, &metric, t)? - f64::from(target.value());
        let ok = !run.diverged
            && run.iterations < opts.max_iterations
            && (run.stationary || run.stalled)
            && residual <= opts.residual_threshold
            && constraint.abs() <= opts.residual_threshold;
        evaluated.push((run, metric, fit.c_best, residual, ok));
    }
    if evaluated.is_empty() {
        return Err(Error::NoFeasiblePoint("every run left the manifold".into()));
    }

    let any_ok = evaluated.iter().any(|e| e.4);
    // Best objective among acceptable runs, earliest start on ties.
    let best = evaluated
        .iter()
        .enumerate()
        .filter(|(_, e)| e.4 || !any_ok)
        .fold(None::<(usize, f64)>, |acc, (i, e)| match acc {
            Some((_, f)) if f >= e.0.f => acc,
            _ => Some((i, e.0.f)),
        })
        .map(|(i, _)| i)
        .expect("non-empty");
    let (run, metric, c_estimate, residual, ok) = evaluated[best].clone();

    let mut basins: Vec<Basin> = Vec::new();
    let mut order: Vec<usize> = (0..evaluated.len()).filter(|&i| evaluated[i].4).collect();
    order.sort_by(|&a, &b| {
        evaluated[b]
            .0
            .f
            .total_cmp(&evaluated[a].0.f)
            .then(a.cmp(&b))
    });
    for i in order {
        let (r, m, c, _, _) = &evaluated[i];
        if let Some(b) = basins.iter_mut().find(|b| same_ray(&b.metric, m)) {
            b.starts += 1;
        } else {
            basins.push(Basin {
                metric: m.clone(),
                s_value: r.f,
                c_estimate: *c,
                starts: 1,
            });
        }
    }

    let status = if ok && claim_zero {
        OptStatus::Converged
    } else if ok {
        OptStatus::Advisory
    } else if run.diverged {
        OptStatus::SupremumAtInfinity
    } else {
        OptStatus::DidNotConverge
    };
    Ok(OptResult {
        target,
        metric,
        s_value: run.f,
        c_estimate,
        residual,
        converged: status == OptStatus::Converged,
        status,
        iterations: run.iterations,
        restarts_used: starts.len(),
        basins,
    })
}

fn relative_residual(spec: &SymmetricPairSpec, t: &PrescribedTensor<f64>, abs: f64, c: f64) -> f64 {
    let mut t_norm_sq = f64::from(spec.n) * t.tp() * t.tp();
    for (ideal, ti) in spec.ideals.iter().zip(t.ts()) {
        t_norm_sq += f64::from(ideal.d) * ti * ti;
    }
    let scale = c.abs() * t_norm_sq.sqrt();
    if scale > 0.0 {
        abs / scale
    } else {
        abs
    }
}

fn same_ray(a: &Metric<f64>, b: &Metric<f64>) -> bool {
    a.alphas().iter().zip(b.alphas()).all(|(x, y)| {
        let (x, y) = (x / a.beta(), y / b.beta());
        (x - y).abs() <= 1e-5 * x.abs().max(y.abs())
    })
}

/// Samples log-uniformly in `[1e-3, 1e3] * alpha*` and reports whether no
/// feasible sample beats the optimum by more than a relative `1e-9`.
pub fn certify_maximum(
    spec: &SymmetricPairSpec,
    t: &PrescribedTensor<f64>,
    result: &OptResult,
    samples: usize,
    seed: u64,
) -> Result<bool> {
    let p = Reduced::new(spec, t, result.target)?;
    let centre: Vec<f64> = result.metric.alphas().iter().map(|a| a.ln()).collect();
    let best = p.objective(&centre);
    let tol = 1e-9 * best.abs().max(1.0);
    let span = 1e3f64.ln();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let u: Vec<f64> = centre
            .iter()
            .map(|c| c + rng.gen_range(-span..span))
            .collect();
        if p.objective(&u) > best + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::scalar;
    use crate::pair::{builtin_pair, BuiltinFamily};
    use crate::scalar::rat;

    fn g2c() -> SymmetricPairSpec {
        builtin_pair(BuiltinFamily::G2COverG2).unwrap()
    }

    #[test]
    fn beta_examples() {
        let t = PrescribedTensor::new(rat(1, 1), vec![rat(1, 1)]).unwrap();
        let a = [rat(1, 1)];
        assert_eq!(
            beta_from_alphas(&g2c(), &t, &a, Target::Plus).unwrap(),
            Some(rat(14, 13))
        );
        assert_eq!(
            beta_from_alphas(&g2c(), &t, &a, Target::Minus).unwrap(),
            Some(rat(14, 15))
        );
        let t = PrescribedTensor::new(rat(1, 1), vec![rat(1, 14)]).unwrap();
        assert_eq!(
            beta_from_alphas(&g2c(), &t, &a, Target::Plus).unwrap(),
            None
        );
    }

    #[test]
    fn objective_matches_scalar_curvature() {
        let spec = builtin_pair(BuiltinFamily::So2q { q: 5 }).unwrap();
        let t = PrescribedTensor::new(1.0, vec![0.5, 2.0]).unwrap();
        let u = [0.3f64, -0.2];
        for target in [Target::Minus, Target::Plus] {
            let p = Reduced::new(&spec, &t, target).unwrap();
            let g = p.metric(&u).unwrap();
            let (f, _) = p.eval(&u).unwrap();
            assert!((f - scalar(&spec, &g).unwrap()).abs() < 1e-12);
            let tr = trace_t(&spec, &g, &t).unwrap();
            assert!((tr - f64::from(target.value())).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let spec = builtin_pair(BuiltinFamily::Supq { p: 2, q: 3 }).unwrap();
        let t = PrescribedTensor::new(1.0, vec![0.5, 0.8, 3.0]).unwrap();
        let u = [0.4f64, 0.9, 1.5];
        for target in [Target::Minus, Target::Zero, Target::Plus] {
            let p = Reduced::new(&spec, &t, target).unwrap();
            let (_, g) = p.eval(&u).unwrap();
            for j in 0..3 {
                let h = 1e-6;
                let mut up = u;
                let mut dn = u;
                up[j] += h;
                dn[j] -= h;
                let fd = (p.eval(&up).unwrap().0 - p.eval(&dn).unwrap().0) / (2.0 * h);
                assert!(
                    (fd - g[j]).abs() <= 1e-6 * g[j].abs().max(1.0),
                    "{target:?} {j}"
                );
            }
        }
    }

    #[test]
    fn two_manifolds_give_two_solutions() {
        let spec = builtin_pair(BuiltinFamily::So2q { q: 10 }).unwrap();
        let t = PrescribedTensor::new(1.0, vec![0.35, 1.0]).unwrap();
        let plus = maximize_on_manifold(&spec, &t, Target::Plus, &OptOptions::default()).unwrap();
        let minus = maximize_on_manifold(&spec, &t, Target::Minus, &OptOptions::default()).unwrap();
        for r in [&plus, &minus] {
            assert!(r.converged, "{r:?}");
            assert!(r.residual <= 1e-6);
            assert!(r.c_estimate > 0.0);
        }
        assert!((plus.c_estimate - minus.c_estimate).abs() > 1e-3 * plus.c_estimate);
        assert!(certify_maximum(&spec, &t, &minus, 2000, 1).unwrap());
        assert!(certify_maximum(&spec, &t, &minus, 0, 1).unwrap());
    }

    #[test]
    fn no_solution_is_not_reported_as_converged() {
        let t = PrescribedTensor::new(1.0, vec![0.2]).unwrap();
        let r = maximize_on_manifold(&g2c(), &t, Target::Plus, &OptOptions::default()).unwrap();
        assert!(!r.converged);
        assert!(matches!(
            r.status,
            OptStatus::DidNotConverge | OptStatus::SupremumAtInfinity
        ));
    }

    #[test]
    fn deterministic_for_a_seed() {
        let spec = builtin_pair(BuiltinFamily::So2q { q: 5 }).unwrap();
        let t = PrescribedTensor::new(1.0, vec![0.3, 1.0]).unwrap();
        let seq = OptOptions {
            execution: Execution::Sequential,
            ..OptOptions::default()
        };
        let a = maximize_on_manifold(&spec, &t, Target::Minus, &seq).unwrap();
        let b = maximize_on_manifold(&spec, &t, Target::Minus, &OptOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn target_parsing() {
        assert_eq!(Target::try_from(-1).unwrap(), Target::Minus);
        assert!(Target::try_from(2).is_err());
    }
}
