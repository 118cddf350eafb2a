//! Parameter sweeps over `(T_1, T_2)` with CSV output.

use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::curvature::PrescribedTensor;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::pair::SymmetricPairSpec;
use crate::scalar::Number;
use crate::scaled::{
    classify_m0, solve_scaled_all, sufficient_conditions, M0Classification, ScanOptions,
};

pub const CSV_HEADER: [&str; 6] = [
    "T1",
    "T2",
    "cond_zero",
    "cond_inf",
    "count",
    "classification",
];

/// Inclusive linear grid written `a:b:steps`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.start],
            k => (0..k)
                .map(|i| {
                    if i + 1 == k {
                        self.end
                    } else {
                        self.start + (self.end - self.start) * i as f64 / (k - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, k] = parts.as_slice() else {
            return Err(Error::Parse(format!("grid must be a:b:steps, got {s:?}")));
        };
        let start = a.parse::<Number>()?.to_f64();
        let end = b.parse::<Number>()?.to_f64();
        let steps = k
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad step count in {s:?}")))?;
        Ok(Grid { start, end, steps })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanCell {
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    pub cond_zero: bool,
    pub cond_inf: bool,
    pub count: usize,
    pub classification: Option<M0Classification>,
}

#[derive(Clone, Debug)]
pub struct ScanRequest {
    pub tp: f64,
    pub t1: Grid,
    pub t2: Grid,
    /// Fixed trailing components for pairs with more than two ideals.
    pub rest: Vec<f64>,
    pub classify: bool,
    pub execution: Execution,
}

/// Evaluates every cell, `T1` outer and `T2` inner; cells run independently.
pub fn scan(spec: &SymmetricPairSpec, req: &ScanRequest) -> Result<Vec<ScanCell>> {
    let width = 2 + req.rest.len();
    if spec.ideal_count() != width {
        return Err(Error::ShapeMismatch {
            expected: spec.ideal_count(),
            got: width,
        });
    }
    let t1 = req.t1.values();
    let t2 = req.t2.values();
    let points: Vec<(f64, f64)> = t1
        .iter()
        .flat_map(|&a| t2.iter().map(move |&b| (a, b)))
        .collect();
    let inner = ScanOptions {
        execution: Execution::Sequential,
        ..ScanOptions::default()
    };
    req.execution
        .map(&points, |&(a, b)| {
            let mut ts = vec![a, b];
            ts.extend_from_slice(&req.rest);
            let t = PrescribedTensor::new(req.tp, ts)?;
            let suff = sufficient_conditions(spec, &t)?;
            let count = solve_scaled_all(spec, &t, &inner)?.solutions.len();
            let classification = if req.classify && width == 2 {
                classify_m0(spec, &t)?.classification
            } else {
                None
            };
            Ok(ScanCell {
                t1: a,
                t2: b,
                cond_zero: suff.cond_zero,
                cond_inf: suff.cond_inf,
                count,
                classification,
            })
        })
        .into_iter()
        .collect()
}

/// Header plus one LF-terminated row per cell; floats use the shortest
/// round-trip representation.
pub fn write_csv<W: Write>(cells: &[ScanCell], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for c in cells {
        w.write_record([
            c.t1.to_string(),
            c.t2.to_string(),
            c.cond_zero.to_string(),
            c.cond_inf.to_string(),
            c.count.to_string(),
            c.classification.map(|k| k.to_string()).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
