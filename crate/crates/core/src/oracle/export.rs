//! Pair specifications derived from matrix models, and JSON export.

use serde::Serialize;
use serde_json::{json, Value};

use super::{build_algebra, kappa_numeric, MatrixAlgebra};
use crate::error::Result;
use crate::pair::{validate_pair, ClassicalFamily, IdealSpec, SymmetricPairSpec};
use crate::scalar::nearest_rational;

/// Largest denominator tried when rounding numeric `kappa` values.
pub const MAX_DENOMINATOR: u32 = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivedPair {
    pub spec: SymmetricPairSpec,
    pub kappa_numeric: Vec<f64>,
    /// Largest distance between a numeric `kappa` and its rounded value.
    pub rounding_residual: f64,
}

/// Reads `(n, d_i, kappa_i)` off the matrix model, rounding each `kappa` to
/// the nearest rational with denominator at most [`MAX_DENOMINATOR`].
pub fn derive_pair(family: ClassicalFamily, p: u32, q: u32) -> Result<DerivedPair> {
    let alg = build_algebra(family, p, q)?;
    let kappa = kappa_numeric(&alg)?;
    let mut ideals = Vec::new();
    let mut residual: f64 = 0.0;
    for (j, &k) in kappa.iter().enumerate() {
        let d = alg.blocks[j + 1].len() as u32;
        if alg.center[j] {
            ideals.push(IdealSpec::center());
            residual = residual.max(k.abs());
        } else {
            let (r, err) = nearest_rational(k, MAX_DENOMINATOR);
            residual = residual.max(err);
            ideals.push(IdealSpec::simple(d, r));
        }
    }
    let prefix = match family {
        ClassicalFamily::Su => "su",
        ClassicalFamily::So => "so",
    };
    let s = alg.center.iter().filter(|&&c| c).count() as u32;
    let spec = validate_pair(SymmetricPairSpec {
        name: format!("{prefix}_{p}_{q}"),
        n: alg.n() as u32,
        r: ideals.len() as u32 - s,
        s,
        ideals,
    })?;
    Ok(DerivedPair {
        spec,
        kappa_numeric: kappa,
        rounding_residual: residual,
    })
}

impl MatrixAlgebra {
    /// Basis matrices, structure constants `structure[a][b][k]` and the block partition.
    pub fn to_json(&self) -> Value {
        let dim = self.dim();
        let basis: Vec<Vec<Vec<f64>>> = self
            .basis
            .iter()
            .map(|m| {
                (0..m.nrows())
                    .map(|i| m.row(i).iter().copied().collect())
                    .collect()
            })
            .collect();
        let structure: Vec<Vec<Vec<f64>>> = (0..dim)
            .map(|a| {
                (0..dim)
                    .map(|b| (0..dim).map(|k| self.c(a, b, k)).collect())
                    .collect()
            })
            .collect();
        let blocks: Vec<Vec<usize>> = self.blocks.iter().map(|r| r.clone().collect()).collect();
        json!({
            "name": self.name,
            "dim": dim,
            "blocks": blocks,
            "center": self.center,
            "basis": basis,
            "structure": structure,
        })
    }
}
