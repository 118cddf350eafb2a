//! Raw bases of `su(p,q)` and `so(p,q)` adapted to `g = p + k_1 + ... + k_{r+s}`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::pair::ClassicalFamily;

/// Largest `p + q` accepted by [`raw_basis`].
pub const MAX_SIZE: u32 = 7;

/// Basis matrices with blocks listed as `[p, k_1, ..., k_{r+s}]`.
#[derive(Clone, Debug)]
pub struct RawAlgebra {
    pub basis: Vec<DMatrix<f64>>,
    pub blocks: Vec<Vec<usize>>,
    /// One flag per `k`-block.
    pub center: Vec<bool>,
}

pub fn raw_basis(family: ClassicalFamily, p: u32, q: u32) -> Result<RawAlgebra> {
    if p < 1 || q < p || p + q < 3 {
        return Err(Error::ParamOutOfRange(format!(
            "need 1 <= p <= q and p + q >= 3, got ({p}, {q})"
        )));
    }
    if p + q > MAX_SIZE {
        return Err(Error::ParamOutOfRange(format!(
            "matrix models are limited to p + q <= {MAX_SIZE}, got {}",
            p + q
        )));
    }
    match family {
        ClassicalFamily::Su => Ok(su_basis(p as usize, q as usize)),
        ClassicalFamily::So => {
            if (p, q) == (2, 2) || p == 4 || q == 4 {
                return Err(Error::NonSimpleInput(format!(
                    "so({p},{q}) has a non-simple factor or is not simple"
                )));
            }
            Ok(so_basis(p as usize, q as usize))
        }
    }
}

fn unit(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m
}

/// Real form of `re + i im` acting on `R^{2n}`.
fn embed(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<f64> {
    let n = re.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(re);
    m.view_mut((n, n), (n, n)).copy_from(re);
    m.view_mut((0, n), (n, n)).copy_from(&(-im));
    m.view_mut((n, 0), (n, n)).copy_from(im);
    m
}

struct Builder {
    basis: Vec<DMatrix<f64>>,
    blocks: Vec<Vec<usize>>,
    center: Vec<bool>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            basis: Vec::new(),
            blocks: Vec::new(),
            center: Vec::new(),
        }
    }

    fn block(&mut self, mats: Vec<DMatrix<f64>>, center: Option<bool>) {
        let start = self.basis.len();
        let idx = (start..start + mats.len()).collect();
        self.basis.extend(mats);
        self.blocks.push(idx);
        if let Some(c) = center {
            self.center.push(c);
        }
    }

    fn finish(self) -> RawAlgebra {
        RawAlgebra {
            basis: self.basis,
            blocks: self.blocks,
            center: self.center,
        }
    }
}

fn su_ideal(n: usize, idx: &[usize]) -> Vec<DMatrix<f64>> {
    let zero = DMatrix::zeros(n, n);
    let mut out = Vec::new();
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            out.push(embed(&(unit(n, i, j) - unit(n, j, i)), &zero));
            out.push(embed(&zero, &(unit(n, i, j) + unit(n, j, i))));
        }
    }
    for w in idx.windows(2) {
        out.push(embed(&zero, &(unit(n, w[0], w[0]) - unit(n, w[1], w[1]))));
    }
    out
}

fn su_basis(p: usize, q: usize) -> RawAlgebra {
    let n = p + q;
    let zero = DMatrix::zeros(n, n);
    let first: Vec<usize> = (0..p).collect();
    let second: Vec<usize> = (p..n).collect();
    let mut b = Builder::new();

    let mut pb = Vec::new();
    for &i in &first {
        for &j in &second {
            pb.push(embed(&(unit(n, i, j) + unit(n, j, i)), &zero));
            pb.push(embed(&zero, &(unit(n, i, j) - unit(n, j, i))));
        }
    }
    b.block(pb, None);
    if p >= 2 {
        b.block(su_ideal(n, &first), Some(false));
    }
    b.block(su_ideal(n, &second), Some(false));
    let mut z = DMatrix::zeros(n, n);
    for i in 0..n {
        z[(i, i)] = if i < p { q as f64 } else { -(p as f64) };
    }
    b.block(vec![embed(&zero, &z)], Some(true));
    b.finish()
}

fn so_factor(n: usize, idx: &[usize]) -> Vec<DMatrix<f64>> {
    let mut out = Vec::new();
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            out.push(unit(n, i, j) - unit(n, j, i));
        }
    }
    out
}

fn so_basis(p: usize, q: usize) -> RawAlgebra {
    let n = p + q;
    let first: Vec<usize> = (0..p).collect();
    let second: Vec<usize> = (p..n).collect();
    let mut b = Builder::new();

    let mut pb = Vec::new();
    for &i in &first {
        for &j in &second {
            pb.push(unit(n, i, j) + unit(n, j, i));
        }
    }
    b.block(pb, None);
    // so(1) vanishes and so(2) is abelian; simple factors come first.
    let factors = [first, second];
    for f in factors.iter().filter(|f| f.len() >= 3) {
        b.block(so_factor(n, f), Some(false));
    }
    for f in factors.iter().filter(|f| f.len() == 2) {
        b.block(so_factor(n, f), Some(true));
    }
    b.finish()
}
