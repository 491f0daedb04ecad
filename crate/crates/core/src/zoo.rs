//! Named tensors: matrix multiplication, iterated matrix multiplication on a
//! loop, splitting projectors, and the boundary tensor `M~`.
//!
//! Matrix spaces are linearized row-major. For `mmult(e2, e3, e1)` the three
//! factors are `e2 x e3`, `e3 x e1` and `e1 x e2` matrices, and the tensor
//! evaluates to `trace(P Q R)` on `(vec P, vec Q, vec R)`.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::network::{NetworkGraph, TnsInstance};
use crate::scalar::{Field, Scalar};
use crate::tensor::Tensor;

fn one() -> Scalar {
    Scalar::one(Field::Rational)
}

/// `sum x^i_a (x) y^a_u (x) z^u_i` with `i < e2`, `a < e3`, `u < e1`.
pub fn mmult(e2: usize, e3: usize, e1: usize) -> Tensor {
    imm_loop(&[e3, e1, e2])
}

/// Iterated matrix multiplication `trace(X_0 X_1 ... X_{n-1})`, where
/// `X_j` is an `d_{j-1} x d_j` matrix (indices mod n). Factor `j` has
/// dimension `d_{j-1} d_j`.
pub fn imm_loop(edge_dims: &[usize]) -> Tensor {
    let n = edge_dims.len();
    assert!(
        n >= 1 && edge_dims.iter().all(|&d| d >= 1),
        "need positive edge dims"
    );
    let shape: Vec<usize> = (0..n)
        .map(|j| edge_dims[(j + n - 1) % n] * edge_dims[j])
        .collect();
    let mut t = Tensor::zeros(&shape, Field::Rational);
    let mut loop_idx = vec![0; n];
    loop {
        let pos: Vec<usize> = (0..n)
            .map(|j| loop_idx[(j + n - 1) % n] * edge_dims[j] + loop_idx[j])
            .collect();
        t.set(&pos, one());
        if !crate::tensor::next_index(&mut loop_idx, edge_dims) {
            break;
        }
    }
    t
}

/// Instance of the critical loop whose vertex tensors are the identity
/// reshapes `T_j[i_{j-1} d_j + i_j, i_{j-1}, i_j] = 1`. It contracts to
/// `imm_loop(edge_dims)`.
pub fn loop_identity_instance(edge_dims: &[usize]) -> Result<TnsInstance> {
    let g = NetworkGraph::critical_loop(edge_dims)?;
    let n = edge_dims.len();
    let tensors = (0..n)
        .map(|j| {
            let shape = g.tensor_shape(j);
            let dout = edge_dims[j];
            // axes: vertex, incoming edge j-1, outgoing edge j
            Tensor::from_fn(&shape, Field::Rational, |i| {
                Scalar::from_i64((i[0] == i[1] * dout + i[2]) as i64, Field::Rational)
            })
        })
        .collect();
    TnsInstance::new(g, tensors)
}

/// Projectors `X0, Y0, Z0` on the three triangle factors; the complements
/// `X1 = I - X0` etc. are implied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    x0: Matrix,
    y0: Matrix,
    z0: Matrix,
}

impl Splitting {
    pub fn new(x0: Matrix, y0: Matrix, z0: Matrix) -> Result<Splitting> {
        for (factor, p) in [&x0, &y0, &z0].into_iter().enumerate() {
            if !p.is_square() {
                return Err(Error::Splitting(format!(
                    "projector {factor} is not square"
                )));
            }
            if !p.is_idempotent() {
                return Err(Error::NotIdempotent { factor });
            }
        }
        Ok(Splitting { x0, y0, z0 })
    }

    /// Identity projectors: the trivial splitting with zero complements.
    pub fn identity(dims: [usize; 3]) -> Splitting {
        let [a, b, c] = dims.map(|d| Matrix::identity(d, Field::Rational));
        Splitting {
            x0: a,
            y0: b,
            z0: c,
        }
    }

    pub fn p0(&self) -> [&Matrix; 3] {
        [&self.x0, &self.y0, &self.z0]
    }

    pub fn p1(&self) -> [Matrix; 3] {
        self.p0().map(|p| {
            Matrix::identity(p.rows(), p.field())
                .sub(p)
                .expect("square projector")
        })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.p0().map(Matrix::rows)
    }
}

fn coordinate_projector(rows: usize, cols: usize, keep: impl Fn(usize, usize) -> bool) -> Matrix {
    let n = rows * cols;
    Matrix::from_fn(n, n, Field::Rational, |r, c| {
        Scalar::from_i64((r == c && keep(r / cols, r % cols)) as i64, Field::Rational)
    })
}

/// `X0, Y0` project onto diagonal matrices, `Z0` onto off-diagonal ones.
pub fn diagonal_splitting(e: usize) -> Result<Splitting> {
    if e < 2 {
        return Err(Error::Splitting("diagonal splitting needs e >= 2".into()));
    }
    let diag = coordinate_projector(e, e, |r, c| r == c);
    let off = coordinate_projector(e, e, |r, c| r != c);
    Splitting::new(diag.clone(), diag, off)
}

/// Splitting from `e_j = e_j' + e_j''`, given as
/// `[e1', e1'', e2', e2'', e3', e3'']`. `X0, Y0` keep the diagonal blocks of
/// their `e2 x e3` and `e3 x e1` matrices, `Z0` keeps the off-diagonal blocks
/// of `e1 x e2` matrices, so `X0(P) Y0(Q) Z0(R)` is traceless.
pub fn block_splitting(parts: [usize; 6]) -> Result<Splitting> {
    if parts.contains(&0) {
        return Err(Error::Splitting("every block needs size >= 1".into()));
    }
    let [e1, e2, e3] = [
        parts[0] + parts[1],
        parts[2] + parts[3],
        parts[4] + parts[5],
    ];
    let (c1, c2, c3) = (parts[0], parts[2], parts[4]);
    let x0 = coordinate_projector(e2, e3, |r, c| (r < c2) == (c < c3));
    let y0 = coordinate_projector(e3, e1, |r, c| (r < c3) == (c < c1));
    let z0 = coordinate_projector(e1, e2, |r, c| (r < c1) != (c < c2));
    Splitting::new(x0, y0, z0)
}

/// Boundary tensor for the diagonal splitting:
/// `sum_{i,j} (x^i_j y^j_j + x^i_i y^i_j) z^j_i` with each monomial taken
/// once, i.e. the trilinear form
/// `trace(P0 Q0 R1) + trace(P0 Q1 R0) + trace(P1 Q0 R0)`.
pub fn m_tilde_formula(e: usize) -> Result<Tensor> {
    if e < 2 {
        return Err(Error::Splitting("M~ needs e >= 2".into()));
    }
    let mut t = Tensor::zeros(&[e * e; 3], Field::Rational);
    for i in 0..e {
        for j in 0..e {
            t.set(&[i * e + j, j * e + j, j * e + i], one());
            t.set(&[i * e + i, i * e + j, j * e + i], one());
        }
    }
    Ok(t)
}

/// Row-major vectorization of a matrix.
pub fn vec_of(m: &Matrix) -> Vec<Scalar> {
    m.entries().to_vec()
}

/// Row-major matrix from a vectorization.
pub fn unvec(v: &[Scalar], rows: usize, cols: usize) -> Result<Matrix> {
    Matrix::from_entries(rows, cols, v.to_vec())
}
