//! Killing-form ratios, the Levi-Civita connection and Ricci curvature computed
//! from structure constants.

use serde::Serialize;

use super::MatrixAlgebra;
use crate::curvature::{Metric, RicciComponents};
use crate::error::{Error, Result};

const KAPPA_TOL: f64 = 1e-9;
const RICCI_TOL: f64 = 1e-8;
const A_FORMS_TOL: f64 = 1e-9;
const STRUCTURE_TOL: f64 = 1e-10;

/// `kappa_i` with `B_i = kappa_i B|_{k_i}`, where `B_i` is the Killing form
/// of the ideal `k_i`. Central blocks give 0.
pub fn kappa_numeric(alg: &MatrixAlgebra) -> Result<Vec<f64>> {
    let b = alg.killing();
    let mut out = Vec::with_capacity(alg.ideal_count());
    for (j, r) in alg.blocks.iter().enumerate().skip(1) {
        if alg.center[j - 1] {
            out.push(0.0);
            continue;
        }
        let bi = |a: usize, c: usize| -> f64 {
            let mut s = 0.0;
            for k in r.clone() {
                for l in r.clone() {
                    s += alg.c(a, l, k) * alg.c(c, k, l);
                }
            }
            s
        };
        let (mut num, mut den) = (0.0, 0.0);
        for a in r.clone() {
            num += bi(a, a);
            den += b[(a, a)];
        }
        let kappa = num / den;
        let mut deviation: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for a in r.clone() {
            for c in r.clone() {
                deviation = deviation.max((bi(a, c) - kappa * b[(a, c)]).abs());
                scale = scale.max(b[(a, c)].abs());
            }
        }
        let deviation = deviation / scale.max(f64::MIN_POSITIVE);
        if deviation > KAPPA_TOL {
            return Err(Error::NonProportional {
                block: j,
                deviation,
            });
        }
        out.push(kappa);
    }
    Ok(out)
}

fn weights(alg: &MatrixAlgebra, g: &Metric<f64>) -> Result<Vec<f64>> {
    if g.alphas().len() != alg.ideal_count() {
        return Err(Error::ShapeMismatch {
            expected: alg.ideal_count(),
            got: g.alphas().len(),
        });
    }
    Ok((0..alg.dim())
        .map(|a| match alg.block_of(a) {
            0 => *g.beta(),
            j => g.alphas()[j - 1],
        })
        .collect())
}

/// Christoffel symbols from the general Koszul formula,
/// `2 g(nabla_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y)`.
/// Entry `(a * dim + b) * dim + c` is the `e_c` coefficient of `nabla_{e_a} e_b`.
pub fn levi_civita(alg: &MatrixAlgebra, g: &Metric<f64>) -> Result<Vec<f64>> {
    let w = weights(alg, g)?;
    let dim = alg.dim();
    let mut gamma = vec![0.0; dim * dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                gamma[(a * dim + b) * dim + c] = (w[c] * alg.c(a, b, c) - w[a] * alg.c(b, c, a)
                    + w[b] * alg.c(c, a, b))
                    / (2.0 * w[c]);
            }
        }
    }
    Ok(gamma)
}

/// The connection of a naturally reductive metric by block type.
fn three_case(alg: &MatrixAlgebra, g: &Metric<f64>) -> Result<Vec<f64>> {
    weights(alg, g)?;
    let dim = alg.dim();
    let beta = *g.beta();
    let mut gamma = vec![0.0; dim * dim * dim];
    for a in 0..dim {
        let ba = alg.block_of(a);
        for b in 0..dim {
            let bb = alg.block_of(b);
            let factor = match (ba, bb) {
                (0, 0) => 0.5,
                (x, y) if x > 0 && y > 0 => 0.5,
                (0, j) => -g.alphas()[j - 1] / (2.0 * beta),
                (i, _) => g.alphas()[i - 1] / (2.0 * beta) + 1.0,
            };
            for c in 0..dim {
                gamma[(a * dim + b) * dim + c] = factor * alg.c(a, b, c);
            }
        }
    }
    Ok(gamma)
}

/// Largest difference between the general and the block-type connection.
pub fn koszul_deviation(alg: &MatrixAlgebra, g: &Metric<f64>) -> Result<f64> {
    let general = levi_civita(alg, g)?;
    let cases = three_case(alg, g)?;
    Ok(general
        .iter()
        .zip(&cases)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Block coefficients of `Ricci(g)(X, Y) = -tr(Z -> nabla_{nabla_Z Y} X)`.
pub fn ricci_numeric(alg: &MatrixAlgebra, g: &Metric<f64>) -> Result<RicciComponents<f64>> {
    let gamma = three_case(alg, g)?;
    let dim = alg.dim();
    let gm = |a: usize, b: usize, c: usize| gamma[(a * dim + b) * dim + c];
    let mut ric = vec![0.0; dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            let mut s = 0.0;
            for z in 0..dim {
                for c in 0..dim {
                    let x = gm(z, b, c);
                    if x != 0.0 {
                        s -= x * gm(c, a, z);
                    }
                }
            }
            ric[a * dim + b] = s;
        }
    }
    let scale = ric.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut off: f64 = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            if a != b {
                off = off.max(ric[a * dim + b].abs());
            }
        }
    }
    if off > RICCI_TOL * scale {
        return Err(Error::OffDiagonalNonzero { deviation: off });
    }
    let mut coeffs = Vec::with_capacity(alg.blocks.len());
    for (j, r) in alg.blocks.iter().enumerate() {
        let diag: Vec<f64> = r.clone().map(|a| ric[a * dim + a]).collect();
        let mean = diag.iter().sum::<f64>() / diag.len() as f64;
        let deviation = diag.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max);
        if deviation > RICCI_TOL * scale {
            return Err(Error::BlockNotScalar {
                block: j,
                deviation,
            });
        }
        coeffs.push(mean);
    }
    Ok(RicciComponents {
        ric_p: coeffs[0],
        ric_k: coeffs[1..].to_vec(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AFormsReport {
    /// `tr_{Q|_p} A_j` for each ideal.
    pub traces: Vec<f64>,
    /// `d_j (1 - kappa_j)` with numeric `kappa_j`.
    pub expected: Vec<f64>,
    /// Largest entry of `sum_j A_j - Q|_p / 2`.
    pub sum_deviation: f64,
    pub passed: bool,
}

/// `A_j(X, Y) = tr(pi_{k_j} ad X ad Y)` on `p`.
pub fn a_forms_check(alg: &MatrixAlgebra) -> Result<AFormsReport> {
    let kappa = kappa_numeric(alg)?;
    let p = alg.blocks[0].clone();
    let n = p.len();
    let dim = alg.dim();
    let mut total = vec![0.0; n * n];
    let mut traces = Vec::new();
    let mut expected = Vec::new();
    for (j, r) in alg.blocks.iter().enumerate().skip(1) {
        let mut trace = 0.0;
        for (xi, x) in p.clone().enumerate() {
            for (yi, y) in p.clone().enumerate() {
                let mut s = 0.0;
                for m in r.clone() {
                    for l in 0..dim {
                        s += alg.c(x, l, m) * alg.c(y, m, l);
                    }
                }
                total[xi * n + yi] += s;
                if xi == yi {
                    trace += s;
                }
            }
        }
        traces.push(trace);
        expected.push(r.len() as f64 * (1.0 - kappa[j - 1]));
    }
    let mut sum_deviation: f64 = 0.0;
    for xi in 0..n {
        for yi in 0..n {
            let target = if xi == yi { 0.5 } else { 0.0 };
            sum_deviation = sum_deviation.max((total[xi * n + yi] - target).abs());
        }
    }
    let passed = sum_deviation <= A_FORMS_TOL
        && traces
            .iter()
            .zip(&expected)
            .all(|(t, e)| (t - e).abs() <= A_FORMS_TOL * e.abs().max(1.0));
    Ok(AFormsReport {
        traces,
        expected,
        sum_deviation,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureChecks {
    pub jacobi: f64,
    pub ad_invariance: f64,
    /// `Q([X,Y],Z) + Q(X,[Y,Z])` for `X, Y` in `p` and `Z` in `k`.
    pub symmetric_pair: f64,
    /// Components violating `[k,k] < k`, `[k,p] < p`, `[p,p] < k`.
    pub inclusions: f64,
}

impl StructureChecks {
    pub fn passed(&self) -> bool {
        [
            self.jacobi,
            self.ad_invariance,
            self.symmetric_pair,
            self.inclusions,
        ]
        .iter()
        .all(|&x| x <= STRUCTURE_TOL)
    }
}

pub fn structure_checks(alg: &MatrixAlgebra) -> StructureChecks {
    let dim = alg.dim();
    let scale = alg
        .structure_constants()
        .iter()
        .fold(1.0f64, |m, x| m.max(x.abs()));
    let b = alg.killing();
    let b_scale = b.amax().max(1.0);

    let mut jacobi: f64 = 0.0;
    for a in 0..dim {
        for bb in 0..dim {
            for c in bb + 1..dim {
                for k in 0..dim {
                    let mut s = 0.0;
                    for m in 0..dim {
                        s += alg.c(bb, c, m) * alg.c(a, m, k)
                            + alg.c(c, a, m) * alg.c(bb, m, k)
                            + alg.c(a, bb, m) * alg.c(c, m, k);
                    }
                    jacobi = jacobi.max(s.abs());
                }
            }
        }
    }

    let mut ad_invariance: f64 = 0.0;
    for x in 0..dim {
        for y in 0..dim {
            for z in 0..dim {
                let mut s = 0.0;
                for m in 0..dim {
                    s += alg.c(x, y, m) * b[(m, z)] + alg.c(x, z, m) * b[(y, m)];
                }
                ad_invariance = ad_invariance.max(s.abs());
            }
        }
    }

    let is_p = |a: usize| alg.blocks[0].contains(&a);
    let mut symmetric_pair: f64 = 0.0;
    let mut inclusions: f64 = 0.0;
    for x in 0..dim {
        for y in 0..dim {
            for z in 0..dim {
                let bracket_in_p = is_p(x) != is_p(y);
                if is_p(z) != bracket_in_p {
                    inclusions = inclusions.max(alg.c(x, y, z).abs());
                }
                if is_p(x) && is_p(y) && !is_p(z) {
                    // Q is the identity on the orthonormal basis.
                    symmetric_pair = symmetric_pair.max((alg.c(x, y, z) + alg.c(y, z, x)).abs());
                }
            }
        }
    }

    StructureChecks {
        jacobi: jacobi / (scale * scale),
        ad_invariance: ad_invariance / (scale * b_scale),
        symmetric_pair: symmetric_pair / scale,
        inclusions: inclusions / scale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::ricci;
    use crate::oracle::{build_algebra, derive_pair, MatrixAlgebra, RawAlgebra};
    use crate::pair::ClassicalFamily;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    /// `Ric(Y, Z) = tr(X -> R(X, Y) Z)` with
    /// `R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_{[X,Y]} Z`.
    fn ricci_from_curvature_tensor(alg: &MatrixAlgebra, g: &Metric<f64>) -> Vec<f64> {
        let dim = alg.dim();
        let gamma = levi_civita(alg, g).unwrap();
        let gm = |a: usize, b: usize, c: usize| gamma[(a * dim + b) * dim + c];
        let mut ric = vec![0.0; dim * dim];
        for y in 0..dim {
            for z in 0..dim {
                let mut s = 0.0;
                for x in 0..dim {
                    // e_x coefficient of R(e_x, e_y) e_z.
                    for m in 0..dim {
                        s += gm(y, z, m) * gm(x, m, x)
                            - gm(x, z, m) * gm(y, m, x)
                            - alg.c(x, y, m) * gm(m, z, x);
                    }
                }
                ric[y * dim + z] = s;
            }
        }
        ric
    }

    #[test]
    fn kappa_values() {
        let su23 = build_algebra(ClassicalFamily::Su, 2, 3).unwrap();
        assert!(close(
            &kappa_numeric(&su23).unwrap(),
            &[0.4, 0.6, 0.0],
            1e-9
        ));
        let so25 = build_algebra(ClassicalFamily::So, 2, 5).unwrap();
        assert!(close(&kappa_numeric(&so25).unwrap(), &[0.6, 0.0], 1e-9));
        let su12 = build_algebra(ClassicalFamily::Su, 1, 2).unwrap();
        assert!(close(
            &kappa_numeric(&su12).unwrap(),
            &[2.0 / 3.0, 0.0],
            1e-9
        ));
    }

    #[test]
    fn a_forms() {
        let su23 = build_algebra(ClassicalFamily::Su, 2, 3).unwrap();
        let rep = a_forms_check(&su23).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(close(&rep.traces, &[9.0 / 5.0, 16.0 / 5.0, 1.0], 1e-9));
        let so25 = build_algebra(ClassicalFamily::So, 2, 5).unwrap();
        let rep = a_forms_check(&so25).unwrap();
        assert!(rep.passed);
        assert!(close(&rep.traces, &[4.0, 1.0], 1e-9));
    }

    #[test]
    fn structure_sanity() {
        for (fam, p, q) in [
            (ClassicalFamily::Su, 1, 2),
            (ClassicalFamily::Su, 2, 2),
            (ClassicalFamily::So, 2, 3),
            (ClassicalFamily::So, 3, 3),
        ] {
            let alg = build_algebra(fam, p, q).unwrap();
            let checks = structure_checks(&alg);
            assert!(checks.passed(), "{}: {checks:?}", alg.name);
        }
    }

    #[test]
    fn ricci_matches_closed_form_and_curvature_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (fam, p, q) in [(ClassicalFamily::Su, 1, 2), (ClassicalFamily::So, 2, 5)] {
            let alg = build_algebra(fam, p, q).unwrap();
            let spec = derive_pair(fam, p, q).unwrap().spec;
            for _ in 0..3 {
                let beta = rng.gen_range(0.2..5.0);
                let alphas: Vec<f64> = (0..alg.ideal_count())
                    .map(|_| rng.gen_range(0.2..5.0))
                    .collect();
                let g = Metric::new(beta, alphas).unwrap();
                let num = ricci_numeric(&alg, &g).unwrap();
                let closed = ricci(&spec, &g).unwrap();
                assert!((num.ric_p - closed.ric_p).abs() < 1e-8);
                assert!(close(&num.ric_k, &closed.ric_k, 1e-8));
                assert!(koszul_deviation(&alg, &g).unwrap() < 1e-10);

                let full = ricci_from_curvature_tensor(&alg, &g);
                let dim = alg.dim();
                for a in 0..dim {
                    let expect = match alg.block_of(a) {
                        0 => num.ric_p,
                        j => num.ric_k[j - 1],
                    };
                    assert!((full[a * dim + a] - expect).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn ricci_is_scale_invariant() {
        let alg = build_algebra(ClassicalFamily::Su, 2, 2).unwrap();
        let g = Metric::new(1.3, vec![0.7, 2.1, 0.4]).unwrap();
        let a = ricci_numeric(&alg, &g).unwrap();
        let b = ricci_numeric(&alg, &g.scaled(&3.7)).unwrap();
        assert!((a.ric_p - b.ric_p).abs() < 1e-10);
        assert!(close(&a.ric_k, &b.ric_k, 1e-10));
    }

    #[test]
    fn permuted_basis_gives_identical_blocks() {
        let fam = ClassicalFamily::Su;
        let raw = crate::oracle::raw_basis(fam, 2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut order: Vec<usize> = (0..raw.basis.len()).collect();
        order.shuffle(&mut rng);
        let position: Vec<usize> = {
            let mut pos = vec![0; order.len()];
            for (new, &old) in order.iter().enumerate() {
                pos[old] = new;
            }
            pos
        };
        let shuffled = RawAlgebra {
            basis: order.iter().map(|&i| raw.basis[i].clone()).collect(),
            blocks: raw
                .blocks
                .iter()
                .map(|b| {
                    let mut idx: Vec<usize> = b.iter().map(|&i| position[i]).collect();
                    idx.shuffle(&mut rng);
                    idx
                })
                .collect(),
            center: raw.center.clone(),
        };
        let a = MatrixAlgebra::from_raw("a", &raw).unwrap();
        let b = MatrixAlgebra::from_raw("b", &shuffled).unwrap();
        let g = Metric::new(0.8, vec![1.7, 0.3, 2.2]).unwrap();
        let ra = ricci_numeric(&a, &g).unwrap();
        let rb = ricci_numeric(&b, &g).unwrap();
        assert!((ra.ric_p - rb.ric_p).abs() < 1e-10);
        assert!(close(&ra.ric_k, &rb.ric_k, 1e-10));
        assert!(close(
            &kappa_numeric(&a).unwrap(),
            &kappa_numeric(&b).unwrap(),
            1e-10
        ));
    }

    #[test]
    fn shape_mismatch() {
        let alg = build_algebra(ClassicalFamily::Su, 1, 2).unwrap();
        let g = Metric::new(1.0, vec![1.0]).unwrap();
        assert!(matches!(
            ricci_numeric(&alg, &g).unwrap_err(),
            Error::ShapeMismatch {
                expected: 2,
                got: 1
            }
        ));
    }
}
