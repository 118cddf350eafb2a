//! All solutions of `Ricci(g) = cT` through a one-dimensional root search.
//!
//! With `beta = 1` the `k`-blocks force `alpha_j = x_j(c)` where
//! `x_j(c) = sqrt((4c T_j - kappa_j) / (1 - kappa_j))`, and the `p`-block
//! reduces to `F(c) = 0` with
//! `F(c) = sum_j (x_j(c)/2 + 1) d_j (1 - kappa_j) / n - c Tp`.
//! `F` is concave on `c > c_min = max_j kappa_j / (4 T_j)`.

use serde::Serialize;

use crate::curvature::{check_shape, Metric, PrescribedTensor};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::pair::SymmetricPairSpec;
use crate::scalar::ratio_to_f64;

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub grid_points: usize,
    /// Local refinement rounds for cells that may hide a pair of roots.
    pub refinements: u32,
    pub refine_factor: usize,
    /// `|F| <= zero_tol` counts as a root for tangential and boundary cases.
    pub zero_tol: f64,
    pub execution: Execution,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            grid_points: 4096,
            refinements: 3,
            refine_factor: 4,
            zero_tol: 1e-10,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaledSolution {
    pub c: f64,
    /// Normalised to `beta = 1`.
    pub metric: Metric<f64>,
    pub f_residual: f64,
    /// A double root of `F`, found as an interior minimum of `|F|`.
    pub tangential: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaledSolveReport {
    pub c_min: f64,
    /// Beyond this bound `F < 0`.
    pub c_max: f64,
    pub solutions: Vec<ScaledSolution>,
    /// `ScanResolutionWarning` entries for cells resolved only by a witness point.
    pub warnings: Vec<String>,
}

/// `F` and the root map `c -> alphas` for a fixed pair and tensor.
#[derive(Clone, Debug)]
pub struct ScaledEquation {
    n: f64,
    tp: f64,
    terms: Vec<(f64, f64, f64)>,
}

impl ScaledEquation {
    pub fn new(spec: &SymmetricPairSpec, t: &PrescribedTensor<f64>) -> Result<Self> {
        check_shape(spec, t.ts().len())?;
        let terms = spec
            .ideals
            .iter()
            .zip(t.ts())
            .map(|(ideal, &ti)| (f64::from(ideal.d), ratio_to_f64(&ideal.kappa), ti))
            .collect();
        Ok(ScaledEquation {
            n: f64::from(spec.n),
            tp: *t.tp(),
            terms,
        })
    }

    pub fn c_min(&self) -> f64 {
        self.terms
            .iter()
            .map(|&(_, k, t)| k / (4.0 * t))
            .fold(0.0, f64::max)
    }

    /// Where the bound `F(c) <= A sqrt(c) + 1/2 - c Tp` turns negative.
    pub fn c_bound(&self) -> f64 {
        let a: f64 = self
            .terms
            .iter()
            .map(|&(d, k, t)| d * (t * (1.0 - k)).sqrt())
            .sum::<f64>()
            / self.n;
        let u = (a + (a * a + 2.0 * self.tp).sqrt()) / (2.0 * self.tp);
        u * u
    }

    pub fn alphas(&self, c: f64) -> Vec<f64> {
        self.terms
            .iter()
            .map(|&(_, k, t)| ((4.0 * c * t - k).max(0.0) / (1.0 - k)).sqrt())
            .collect()
    }

    pub fn eval(&self, c: f64) -> f64 {
        let mut f = -c * self.tp;
        for &(d, k, t) in &self.terms {
            let x = ((4.0 * c * t - k).max(0.0) / (1.0 - k)).sqrt();
            f += (x / 2.0 + 1.0) * d * (1.0 - k) / self.n;
        }
        f
    }
}

pub fn solve_scaled_all(
    spec: &SymmetricPairSpec,
    t: &PrescribedTensor<f64>,
    opts: &ScanOptions,
) -> Result<ScaledSolveReport> {
    if opts.grid_points < 3 || opts.refine_factor < 2 {
        return Err(Error::ParamOutOfRange(
            "scan needs at least 3 grid points and a refine factor of at least 2".into(),
        ));
    }
    let eq = ScaledEquation::new(spec, t)?;
    let c_min = eq.c_min();
    let c_max = 2.0 * eq.c_bound();
    let mut report = ScaledSolveReport {
        c_min,
        c_max,
        solutions: Vec::new(),
        warnings: Vec::new(),
    };
    if c_max <= c_min {
        return Ok(report);
    }

    let width = c_max - c_min;
    let last = (opts.grid_points - 1) as f64;
    let mut grid = vec![c_min];
    grid.extend(
        (0..opts.grid_points).map(|i| c_min + width * 10f64.powf(-12.0 + 12.0 * i as f64 / last)),
    );
    let values = opts.execution.map(&grid, |&c| eq.eval(c));

    // A zero at c_min gives a vanishing alpha, which is not a metric.
    let start = usize::from(values[0].abs() <= opts.zero_tol);
    let mut roots: Vec<(f64, bool)> = Vec::new();
    for i in start..grid.len() - 1 {
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 && i > start {
            roots.push((grid[i], false));
        } else if fa * fb < 0.0 {
            roots.push((bisect(&eq, grid[i], grid[i + 1], fa), false));
        }
    }

    // Interior minima of |F| without a sign change: double roots or hidden pairs.
    for i in start.max(1)..grid.len() - 1 {
        let (fl, fm, fr) = (values[i - 1], values[i], values[i + 1]);
        let same_sign = fl * fm > 0.0 && fm * fr > 0.0;
        if !(same_sign && fm.abs() < fl.abs() && fm.abs() <= fr.abs()) {
            continue;
        }
        let (lo, hi) = (grid[i - 1], grid[i + 1]);
        let sign = fm.signum();
        let (c_star, f_star) = golden_min(|c| sign * eq.eval(c), lo, hi);
        let f_star = sign * f_star;
        if f_star.abs() <= opts.zero_tol {
            roots.push((c_star, true));
        } else if f_star * sign < 0.0 {
            let (found, warning) = resolve_hidden_pair(&eq, lo, hi, c_star, sign, opts);
            roots.extend(found.into_iter().map(|c| (c, false)));
            report.warnings.extend(warning);
        }
    }

    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots.dedup_by(|b, a| (b.0 - a.0).abs() <= 1e-14 * a.0.abs().max(1e-300));
    for (c, tangential) in roots {
        let Ok(metric) = Metric::new(1.0, eq.alphas(c)) else {
            continue;
        };
        report.solutions.push(ScaledSolution {
            c,
            metric,
            f_residual: eq.eval(c).abs(),
            tangential,
        });
    }
    Ok(report)
}

/// Rescans `[lo, hi]` on finer grids; falls back to splitting at the witness.
fn resolve_hidden_pair(
    eq: &ScaledEquation,
    lo: f64,
    hi: f64,
    witness: f64,
    sign: f64,
    opts: &ScanOptions,
) -> (Vec<f64>, Option<String>) {
    let mut points = opts.refine_factor;
    for _ in 0..opts.refinements {
        points *= opts.refine_factor;
        let grid: Vec<f64> = (0..=points)
            .map(|i| lo + (hi - lo) * i as f64 / points as f64)
            .collect();
        let values: Vec<f64> = grid.iter().map(|&c| eq.eval(c)).collect();
        let found: Vec<f64> = (0..points)
            .filter(|&i| values[i] * values[i + 1] < 0.0)
            .map(|i| bisect(eq, grid[i], grid[i + 1], values[i]))
            .collect();
        if found.len() >= 2 {
            return (found, None);
        }
    }
    let f_lo = sign * eq.eval(lo).abs();
    let found = vec![
        bisect(eq, lo, witness, f_lo),
        bisect(eq, witness, hi, eq.eval(witness)),
    ];
    let warning = format!(
        "ScanResolutionWarning: two roots in cell [{lo}, {hi}] separated only at c = {witness}"
    );
    (found, Some(warning))
}

pub(crate) fn bisect(eq: &ScaledEquation, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eq.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimum of a unimodal `f` on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if b - a <= 1e-15 * b.abs() {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
