//! Lie-algebra stabilizers under `gl(V_1) + ... + gl(V_n)` acting by the
//! Leibniz rule.
//!
//! Unknowns are ordered factor-major, then by matrix entry `(k, l)` in
//! lexicographic order. The column for `(j, k, l)` is the vectorized
//! `leibniz_act` of `E_kl` placed in slot `j`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::matrix::Matrix;
use crate::scalar::{Field, Scalar, PRIME_M61};
use crate::tensor::{strides, Tensor};

/// Above this many unknowns the automatic field is `F_p` with `p = 2^61 - 1`.
pub const RATIONAL_UNKNOWN_LIMIT: usize = 800;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerSystem {
    pub shape: Vec<usize>,
    pub system: Matrix,
}

impl StabilizerSystem {
    pub fn unknowns(&self) -> usize {
        self.system.cols()
    }

    /// Unknown index of `E_kl` in slot `j`.
    pub fn column_of(&self, j: usize, k: usize, l: usize) -> usize {
        let before: usize = self.shape[..j].iter().map(|v| v * v).sum();
        before + k * self.shape[j] + l
    }

    /// Splits a kernel vector into one matrix per factor.
    pub fn unpack(&self, x: &[Scalar]) -> Result<Vec<Matrix>> {
        let mut at = 0;
        self.shape
            .iter()
            .map(|&v| {
                let m = Matrix::from_entries(v, v, x[at..at + v * v].to_vec());
                at += v * v;
                m
            })
            .collect()
    }

    /// Flattens one matrix per factor into the unknown vector.
    pub fn pack(&self, maps: &[Matrix]) -> Vec<Scalar> {
        maps.iter()
            .flat_map(|m| m.entries().iter().cloned())
            .collect()
    }
}

fn column(t: &Tensor, st: &[usize], j: usize, k: usize, l: usize) -> Vec<Scalar> {
    let v = t.shape()[j];
    let zero = Scalar::zero(t.field());
    (0..t.len())
        .map(|f| {
            if (f / st[j]) % v == k {
                t.data()[f - k * st[j] + l * st[j]].clone()
            } else {
                zero.clone()
            }
        })
        .collect()
}

/// The linear system whose kernel is the stabilizer algebra of `t`.
/// Columns are built in parallel and assembled in the fixed unknown order.
pub fn build_system(t: &Tensor) -> StabilizerSystem {
    let shape = t.shape().to_vec();
    let st = strides(&shape);
    let unknowns: Vec<(usize, usize, usize)> = shape
        .iter()
        .enumerate()
        .flat_map(|(j, &v)| (0..v).flat_map(move |k| (0..v).map(move |l| (j, k, l))))
        .collect();
    let cols: Vec<Vec<Scalar>> = unknowns
        .par_iter()
        .map(|&(j, k, l)| column(t, &st, j, k, l))
        .collect();
    let rows = t.len();
    let system = Matrix::from_fn(rows, cols.len(), t.field(), |r, c| cols[c][r].clone());
    StabilizerSystem { shape, system }
}

/// Rational for small systems, `F_p` (`p = 2^61 - 1`) beyond
/// [`RATIONAL_UNKNOWN_LIMIT`] unknowns.
pub fn auto_field(shape: &[usize]) -> Field {
    let unknowns: usize = shape.iter().map(|v| v * v).sum();
    if unknowns <= RATIONAL_UNKNOWN_LIMIT {
        Field::Rational
    } else {
        Field::Prime(PRIME_M61)
    }
}

/// Stabilizer dimension in the automatically chosen field.
pub fn stabilizer_dim(t: &Tensor) -> Result<usize> {
    stabilizer_dim_in(t, auto_field(t.shape()))
}

/// Stabilizer dimension with the system reduced into `field`.
pub fn stabilizer_dim_in(t: &Tensor, field: Field) -> Result<usize> {
    let t = if t.field() == field {
        t.clone()
    } else {
        t.to_field(field)?
    };
    Ok(build_system(&t).system.kernel_dim())
}

pub fn orbit_dim(t: &Tensor) -> Result<usize> {
    orbit_dim_in(t, auto_field(t.shape()))
}

/// `sum v_j^2 - stabilizer_dim`.
pub fn orbit_dim_in(t: &Tensor, field: Field) -> Result<usize> {
    let total: usize = t.shape().iter().map(|v| v * v).sum();
    Ok(total - stabilizer_dim_in(t, field)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizerReport {
    pub stab_dim: usize,
    pub orbit_dim: usize,
    pub field: &'static str,
    pub prime: Option<u64>,
}

pub fn report(t: &Tensor, field: Field) -> Result<StabilizerReport> {
    let stab_dim = stabilizer_dim_in(t, field)?;
    let total: usize = t.shape().iter().map(|v| v * v).sum();
    Ok(StabilizerReport {
        stab_dim,
        orbit_dim: total - stab_dim,
        field: field.label(),
        prime: field.modulus(),
    })
}

/// Basis of `sl(d)`: off-diagonal units, then `E_kk - E_{k+1,k+1}`.
pub fn sl_basis(d: usize, field: Field) -> Vec<Matrix> {
    let mut out = Vec::new();
    for k in 0..d {
        for l in 0..d {
            if k != l {
                out.push(Matrix::unit(d, k, l, field));
            }
        }
    }
    for k in 0..d.saturating_sub(1) {
        out.push(
            Matrix::unit(d, k, k, field)
                .sub(&Matrix::unit(d, k + 1, k + 1, field))
                .expect("same size"),
        );
    }
    out
}

/// Kronecker product `a (x) b` in row-major index order.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (br, bc) = (b.rows(), b.cols());
    Matrix::from_fn(a.rows() * br, a.cols() * bc, a.field(), |r, c| {
        a.get(r / br, c / bc) * b.get(r % br, c % bc)
    })
}

/// The Leibniz tuple on `imm_loop(edge_dims)` induced by `alpha` on edge
/// `s`: `Id (x) alpha` on factor `s`, `-alpha^T (x) Id` on factor `s+1`,
/// zero elsewhere.
pub fn edge_generator(edge_dims: &[usize], s: usize, alpha: &Matrix) -> Vec<Matrix> {
    let n = edge_dims.len();
    let field = alpha.field();
    let d = |j: usize| edge_dims[j % n];
    let mut maps: Vec<Matrix> = (0..n)
        .map(|j| Matrix::zeros(d(j + n - 1) * d(j), d(j + n - 1) * d(j), field))
        .collect();
    let left = kron(&Matrix::identity(d(s + n - 1), field), alpha);
    let right = kron(&alpha.transpose(), &Matrix::identity(d(s + 1), field))
        .scale(&Scalar::from_i64(-1, field));
    maps[s] = left;
    let t = (s + 1) % n;
    maps[t] = maps[t].add(&right).expect("same size");
    maps
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopStabilizerReport {
    pub edge_dims: Vec<usize>,
    pub generators_checked: usize,
    pub all_annihilate: bool,
    pub kernel_dim: usize,
    /// `sum (e_s^2 - 1) + (n - 1)`: edge `sl` images plus trace-zero scalar
    /// tuples.
    pub expected_dim: usize,
}

/// Checks that every `sl(E_s)` edge generator stabilizes `imm_loop` and
/// compares the stabilizer dimension with the count of the expected
/// generators.
pub fn stabilizer_contains_expected(edge_dims: &[usize]) -> Result<LoopStabilizerReport> {
    let t = crate::zoo::imm_loop(edge_dims);
    let n = edge_dims.len();
    let mut checked = 0;
    let mut all = true;
    for s in 0..n {
        for alpha in sl_basis(edge_dims[s], Field::Rational) {
            checked += 1;
            all &= t
                .leibniz_act(&edge_generator(edge_dims, s, &alpha))?
                .is_zero();
        }
    }
    let expected_dim = edge_dims.iter().map(|e| e * e - 1).sum::<usize>() + (n - 1);
    Ok(LoopStabilizerReport {
        edge_dims: edge_dims.to_vec(),
        generators_checked: checked,
        all_annihilate: all,
        kernel_dim: stabilizer_dim(&t)?,
        expected_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::random_tensor;
    use crate::zoo::{imm_loop, mmult};

    #[test]
    fn columns_are_leibniz_images() {
        let t = random_tensor(&[2, 3, 2], 4);
        let sys = build_system(&t);
        assert_eq!(sys.system.rows(), 12);
        assert_eq!(sys.system.cols(), 4 + 9 + 4);
        for (j, k, l) in [(0, 1, 0), (1, 2, 1), (2, 0, 1)] {
            let mut maps: Vec<Matrix> = t
                .shape()
                .iter()
                .map(|&v| Matrix::zeros(v, v, Field::Rational))
                .collect();
            maps[j] = Matrix::unit(t.shape()[j], k, l, Field::Rational);
            let want = t.leibniz_act(&maps).unwrap();
            let c = sys.column_of(j, k, l);
            let got: Vec<Scalar> = (0..12).map(|r| sys.system.get(r, c).clone()).collect();
            assert_eq!(got, want.data());
        }
    }

    #[test]
    fn zero_and_rank_one() {
        let z = Tensor::zeros(&[2, 2, 2], Field::Rational);
        assert_eq!(stabilizer_dim(&z).unwrap(), 12);
        assert_eq!(orbit_dim(&z).unwrap(), 0);
        let u = Tensor::vector(&[3, -1]);
        let v = Tensor::vector(&[2, 5]);
        let w = Tensor::vector(&[7, 1]);
        let r1 = u.outer(&v).unwrap().outer(&w).unwrap();
        assert_eq!(stabilizer_dim(&r1).unwrap(), 8);
    }

    #[test]
    fn small_known_values() {
        assert_eq!(stabilizer_dim(&mmult(2, 2, 2)).unwrap(), 11);
        assert_eq!(orbit_dim(&mmult(2, 2, 2)).unwrap(), 37);
        assert_eq!(stabilizer_dim(&random_tensor(&[2, 2, 2], 9)).unwrap(), 4);
    }

    #[test]
    fn prime_field_agrees() {
        let t = mmult(2, 2, 2);
        assert_eq!(stabilizer_dim_in(&t, Field::Prime(PRIME_M61)).unwrap(), 11);
        let r = report(&t, Field::Prime(PRIME_M61)).unwrap();
        assert_eq!(r.field, "Fp");
        assert_eq!(r.prime, Some(PRIME_M61));
    }

    #[test]
    fn loop_generators() {
        let r = stabilizer_contains_expected(&[2, 2, 2]).unwrap();
        assert_eq!(r.generators_checked, 9);
        assert!(r.all_annihilate);
        assert_eq!((r.kernel_dim, r.expected_dim), (11, 11));
    }

    #[test]
    fn nonzero_scalar_sum_fails() {
        let t = imm_loop(&[2, 2, 2]);
        let s = |a: i64| {
            Matrix::identity(4, Field::Rational).scale(&Scalar::from_i64(a, Field::Rational))
        };
        let out = t.leibniz_act(&[s(1), s(2), s(-1)]).unwrap();
        assert_eq!(out, t.scale(&Scalar::from_i64(2, Field::Rational)));
        assert!(t.leibniz_act(&[s(1), s(2), s(-3)]).unwrap().is_zero());
    }

    #[test]
    fn traceful_alpha_still_annihilates() {
        let t = imm_loop(&[2, 2, 2]);
        let alpha = Matrix::from_rows(&[[3, 1], [4, 1]]);
        assert!(t
            .leibniz_act(&edge_generator(&[2, 2, 2], 1, &alpha))
            .unwrap()
            .is_zero());
    }
}
