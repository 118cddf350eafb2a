//! Explicit matrix models of `su(p,q)` and `so(p,q)`.
//!
//! Every catalog constant and curvature quantity is recomputed here from
//! structure constants alone, independently of the closed forms in
//! [`crate::curvature`].

mod checks;
mod construction;
mod export;

use nalgebra::DMatrix;

pub use checks::{
    a_forms_check, kappa_numeric, koszul_deviation, levi_civita, ricci_numeric, structure_checks,
    AFormsReport, StructureChecks,
};
pub use construction::{raw_basis, RawAlgebra, MAX_SIZE};
pub use export::{derive_pair, DerivedPair};

use crate::error::{Error, Result};
use crate::pair::ClassicalFamily;

const CLOSURE_TOL: f64 = 1e-10;

/// A real matrix Lie algebra in a `Q`-orthonormal basis adapted to the
/// Cartan decomposition. Blocks are contiguous: `p` first, then each `k_i`.
#[derive(Clone, Debug)]
pub struct MatrixAlgebra {
    pub name: String,
    pub basis: Vec<DMatrix<f64>>,
    dim: usize,
    structure: Vec<f64>,
    /// Index ranges `[p, k_1, ..., k_{r+s}]`.
    pub blocks: Vec<std::ops::Range<usize>>,
    /// One flag per `k`-block.
    pub center: Vec<bool>,
    pub q_gram: DMatrix<f64>,
    /// Largest relative residual when expressing brackets in the basis.
    pub closure_residual: f64,
}

impl MatrixAlgebra {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `[e_a, e_b] = sum_k c(a, b, k) e_k`.
    #[inline]
    pub fn c(&self, a: usize, b: usize, k: usize) -> f64 {
        self.structure[(a * self.dim + b) * self.dim + k]
    }

    pub fn structure_constants(&self) -> &[f64] {
        &self.structure
    }

    pub fn n(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn ideal_count(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Block index of basis element `a` (0 is `p`).
    pub fn block_of(&self, a: usize) -> usize {
        self.blocks
            .iter()
            .position(|r| r.contains(&a))
            .expect("index within the algebra")
    }

    /// `ad(e_a)` as a matrix: column `l` holds the coordinates of `[e_a, e_l]`.
    pub fn ad(&self, a: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |k, l| self.c(a, l, k))
    }

    /// `B(e_a, e_b) = tr(ad e_a ad e_b)`.
    pub fn killing(&self) -> DMatrix<f64> {
        killing_form(self.dim, &self.structure)
    }

    /// Orthonormalises `raw` blockwise for `Q = B|_p - B|_k` and recomputes
    /// structure constants in the new basis.
    pub fn from_raw(name: impl Into<String>, raw: &RawAlgebra) -> Result<Self> {
        let dim = raw.basis.len();
        let (structure, _) = structure_constants(&raw.basis)?;
        let b = killing_form(dim, &structure);

        let mut basis = Vec::with_capacity(dim);
        let mut blocks = Vec::with_capacity(raw.blocks.len());
        for (bi, idx) in raw.blocks.iter().enumerate() {
            let sign = if bi == 0 { 1.0 } else { -1.0 };
            let q = |u: &[f64], v: &[f64]| -> f64 {
                let mut s = 0.0;
                for (i, &a) in idx.iter().enumerate() {
                    for (j, &c) in idx.iter().enumerate() {
                        s += u[i] * b[(a, c)] * v[j];
                    }
                }
                sign * s
            };
            let start = basis.len();
            let mut done: Vec<Vec<f64>> = Vec::new();
            for i in 0..idx.len() {
                let mut v = vec![0.0; idx.len()];
                v[i] = 1.0;
                // Two passes of modified Gram-Schmidt.
                for _ in 0..2 {
                    for u in &done {
                        let proj = q(&v, u);
                        for (x, y) in v.iter_mut().zip(u) {
                            *x -= proj * y;
                        }
                    }
                }
                let norm_sq = q(&v, &v);
                if norm_sq <= 1e-12 {
                    return Err(Error::NonSimpleInput(format!(
                        "Q is not definite on block {bi}"
                    )));
                }
                let inv = norm_sq.sqrt().recip();
                v.iter_mut().for_each(|x| *x *= inv);
                done.push(v);
            }
            for v in &done {
                let mut m = DMatrix::zeros(raw.basis[0].nrows(), raw.basis[0].ncols());
                for (&a, &w) in idx.iter().zip(v) {
                    m += &raw.basis[a] * w;
                }
                basis.push(m);
            }
            blocks.push(start..basis.len());
        }

        let (structure, closure_residual) = structure_constants(&basis)?;
        let b = killing_form(dim, &structure);
        let q_gram = DMatrix::from_fn(dim, dim, |i, j| {
            if blocks[0].contains(&i) {
                b[(i, j)]
            } else {
                -b[(i, j)]
            }
        });
        Ok(MatrixAlgebra {
            name: name.into(),
            basis,
            dim,
            structure,
            blocks,
            center: raw.center.clone(),
            q_gram,
            closure_residual,
        })
    }
}

/// Builds the model of `su(p,q)` or `so(p,q)`.
pub fn build_algebra(family: ClassicalFamily, p: u32, q: u32) -> Result<MatrixAlgebra> {
    let raw = raw_basis(family, p, q)?;
    let name = match family {
        ClassicalFamily::Su => format!("su({p},{q})"),
        ClassicalFamily::So => format!("so({p},{q})"),
    };
    MatrixAlgebra::from_raw(name, &raw)
}

/// Structure constants by a Frobenius Gram solve, with the worst relative
/// residual of the expansion.
fn structure_constants(basis: &[DMatrix<f64>]) -> Result<(Vec<f64>, f64)> {
    let dim = basis.len();
    let gram = DMatrix::from_fn(dim, dim, |i, j| basis[i].dot(&basis[j]));
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::NonSimpleInput("basis is linearly dependent".into()))?;
    let mut out = vec![0.0; dim * dim * dim];
    let mut worst: f64 = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            let m = &basis[a] * &basis[b] - &basis[b] * &basis[a];
            let rhs = nalgebra::DVector::from_fn(dim, |k, _| basis[k].dot(&m));
            let coords = chol.solve(&rhs);
            let mut rebuilt = m.clone();
            for (k, &x) in coords.iter().enumerate() {
                out[(a * dim + b) * dim + k] = x;
                rebuilt -= &basis[k] * x;
            }
            let scale = m.norm().max(1.0);
            worst = worst.max(rebuilt.norm() / scale);
        }
    }
    if worst > CLOSURE_TOL {
        return Err(Error::NonSimpleInput(format!(
            "basis is not closed under brackets (residual {worst:e})"
        )));
    }
    Ok((out, worst))
}

fn killing_form(dim: usize, c: &[f64]) -> DMatrix<f64> {
    let at = |a: usize, b: usize, k: usize| c[(a * dim + b) * dim + k];
    DMatrix::from_fn(dim, dim, |a, b| {
        let mut s = 0.0;
        for k in 0..dim {
            for l in 0..dim {
                s += at(a, l, k) * at(b, k, l);
            }
        }
        s
    })
}
