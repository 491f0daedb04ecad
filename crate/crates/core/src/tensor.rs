//! Dense order-n tensors over an exact field.
//!
//! Entries are stored in lexicographic multi-index order (last axis fastest),
//! so the linear position of `(i_1, ..., i_n)` is
//! `((i_1 * v_2 + i_2) * v_3 + ...) + i_n`. The JSON format and every
//! flattening use this order.
//!
//! Two actions of matrix tuples are provided. [`Tensor::apply_end`] is the
//! product action `(Z_1, ..., Z_n) . v_1 (x) ... (x) v_n = Z_1 v_1 (x) ... (x) Z_n v_n`;
//! [`Tensor::leibniz_act`] is its derivative at the identity, acting on one
//! factor at a time and summing. Evaluated against argument vectors,
//! `apply_end(T, Z)(a_1, ..., a_n) = T(Z_1^T a_1, ..., Z_n^T a_n)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{random_entry, Matrix};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tensor {
    shape: Vec<usize>,
    field: Field,
    data: Vec<Scalar>,
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

/// Steps a multi-index to its lexicographic successor; returns `false` once
/// it wraps around.
pub(crate) fn next_index(idx: &mut [usize], shape: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < shape[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

impl Tensor {
    pub fn new(shape: Vec<usize>, field: Field, data: Vec<Scalar>) -> Result<Tensor> {
        if shape.contains(&0) {
            return Err(Error::Shape(format!("zero dimension in shape {shape:?}")));
        }
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(Error::Shape(format!(
                "shape {shape:?} needs {len} entries, got {}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|s| s.field() != field) {
            return Err(Error::MixedField {
                left: field,
                right: bad.field(),
            });
        }
        Ok(Tensor { shape, field, data })
    }

    pub fn zeros(shape: &[usize], field: Field) -> Tensor {
        assert!(
            shape.iter().all(|&d| d > 0),
            "zero dimension in shape {shape:?}"
        );
        Tensor {
            shape: shape.to_vec(),
            field,
            data: vec![Scalar::zero(field); shape.iter().product()],
        }
    }

    /// Order-0 tensor.
    pub fn scalar(s: Scalar) -> Tensor {
        Tensor {
            shape: Vec::new(),
            field: s.field(),
            data: vec![s],
        }
    }

    pub fn from_fn(shape: &[usize], field: Field, mut f: impl FnMut(&[usize]) -> Scalar) -> Tensor {
        let mut t = Tensor::zeros(shape, field);
        let mut idx = vec![0; shape.len()];
        let mut pos = 0;
        loop {
            let v = f(&idx);
            assert_eq!(v.field(), field, "entry outside tensor field");
            t.data[pos] = v;
            pos += 1;
            if !next_index(&mut idx, shape) {
                break;
            }
        }
        t
    }

    /// Rational tensor from integer data in lexicographic order.
    pub fn from_i64(shape: &[usize], data: &[i64]) -> Result<Tensor> {
        Tensor::new(
            shape.to_vec(),
            Field::Rational,
            data.iter()
                .map(|&v| Scalar::from_i64(v, Field::Rational))
                .collect(),
        )
    }

    /// Rational vector (order-1 tensor).
    pub fn vector(data: &[i64]) -> Tensor {
        Tensor::from_i64(&[data.len()], data).expect("nonempty vector")
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn data(&self) -> &[Scalar] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.order(), "multi-index of wrong length");
        let mut pos = 0;
        for (k, (&i, &d)) in idx.iter().zip(&self.shape).enumerate() {
            assert!(i < d, "index {i} out of range on axis {k}");
            pos = pos * d + i;
        }
        pos
    }

    pub fn get(&self, idx: &[usize]) -> &Scalar {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Scalar) {
        assert_eq!(v.field(), self.field, "entry outside tensor field");
        let pos = self.offset(idx);
        self.data[pos] = v;
    }

    /// Adds `v` to the entry at `idx`.
    pub fn accumulate(&mut self, idx: &[usize], v: &Scalar) {
        let pos = self.offset(idx);
        self.data[pos] = &self.data[pos] + v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|s| !s.is_zero()).count()
    }

    /// Nonzero entries with their multi-indices, in lexicographic order.
    pub fn nonzero_entries(&self) -> Vec<(Vec<usize>, Scalar)> {
        let mut out = Vec::new();
        if self.data.iter().all(Scalar::is_zero) {
            return out;
        }
        let mut idx = vec![0; self.order()];
        for v in &self.data {
            if !v.is_zero() {
                out.push((idx.clone(), v.clone()));
            }
            next_index(&mut idx, &self.shape);
        }
        out
    }

    fn check_compatible(&self, other: &Tensor) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MixedField {
                left: self.field,
                right: other.field,
            });
        }
        if self.shape != other.shape {
            return Err(Error::Shape(format!(
                "shapes {:?} and {:?} differ",
                self.shape, other.shape
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.check_compatible(other)?;
        Ok(Tensor {
            shape: self.shape.clone(),
            field: self.field,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.check_compatible(other)?;
        Ok(Tensor {
            shape: self.shape.clone(),
            field: self.field,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, s: &Scalar) -> Tensor {
        Tensor {
            shape: self.shape.clone(),
            field: self.field,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn to_field(&self, field: Field) -> Result<Tensor> {
        Ok(Tensor {
            shape: self.shape.clone(),
            field,
            data: self
                .data
                .iter()
                .map(|s| s.to_field(field))
                .collect::<Result<_>>()?,
        })
    }

    pub fn reshape(&self, shape: &[usize]) -> Result<Tensor> {
        Tensor::new(shape.to_vec(), self.field, self.data.clone())
    }

    /// Reorders axes: axis `k` of the result is axis `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Tensor> {
        let n = self.order();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Shape(format!(
                "{perm:?} is not a permutation of {n} axes"
            )));
        }
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return Ok(self.clone());
        }
        let old_strides = strides(&self.shape);
        let new_shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let gather: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
        let mut data = Vec::with_capacity(self.len());
        let mut idx = vec![0; n];
        loop {
            let src: usize = idx.iter().zip(&gather).map(|(i, s)| i * s).sum();
            data.push(self.data[src].clone());
            if !next_index(&mut idx, &new_shape) {
                break;
            }
        }
        Ok(Tensor {
            shape: new_shape,
            field: self.field,
            data,
        })
    }

    /// Tensor product; axes of `self` come first.
    pub fn outer(&self, other: &Tensor) -> Result<Tensor> {
        if self.field != other.field {
            return Err(Error::MixedField {
                left: self.field,
                right: other.field,
            });
        }
        let mut data = Vec::with_capacity(self.len() * other.len());
        let zero = Scalar::zero(self.field);
        for a in &self.data {
            if a.is_zero() {
                data.extend(std::iter::repeat_n(zero.clone(), other.len()));
            } else {
                data.extend(other.data.iter().map(|b| a * b));
            }
        }
        let mut shape = self.shape.clone();
        shape.extend_from_slice(&other.shape);
        Ok(Tensor {
            shape,
            field: self.field,
            data,
        })
    }

    /// Sums the diagonal over two axes of equal dimension. The result keeps
    /// the remaining axes in their original order.
    pub fn contract_pair(&self, axis_a: usize, axis_b: usize) -> Result<Tensor> {
        let n = self.order();
        if axis_a == axis_b || axis_a >= n || axis_b >= n {
            return Err(Error::Shape(format!(
                "cannot contract axes {axis_a} and {axis_b} of an order-{n} tensor"
            )));
        }
        if self.shape[axis_a] != self.shape[axis_b] {
            return Err(Error::Shape(format!(
                "contracted axes have dimensions {} and {}",
                self.shape[axis_a], self.shape[axis_b]
            )));
        }
        let st = strides(&self.shape);
        let keep: Vec<usize> = (0..n).filter(|&k| k != axis_a && k != axis_b).collect();
        let out_shape: Vec<usize> = keep.iter().map(|&k| self.shape[k]).collect();
        let keep_strides: Vec<usize> = keep.iter().map(|&k| st[k]).collect();
        let diag = st[axis_a] + st[axis_b];
        let d = self.shape[axis_a];
        let out_len: usize = out_shape.iter().product();
        let mut data = Vec::with_capacity(out_len);
        let mut idx = vec![0; keep.len()];
        for _ in 0..out_len {
            let base: usize = idx.iter().zip(&keep_strides).map(|(i, s)| i * s).sum();
            let mut acc = Scalar::zero(self.field);
            for k in 0..d {
                let v = &self.data[base + k * diag];
                if !v.is_zero() {
                    acc = &acc + v;
                }
            }
            data.push(acc);
            next_index(&mut idx, &out_shape);
        }
        Ok(Tensor {
            shape: out_shape,
            field: self.field,
            data,
        })
    }

    /// Contracts axis pairs `(axis of self, axis of other)` in one pass. The
    /// result carries the free axes of `self` followed by those of `other`.
    /// Equivalent to `outer` followed by `contract_pair` on each pair.
    pub fn contract_with(&self, other: &Tensor, pairs: &[(usize, usize)]) -> Result<Tensor> {
        if self.field != other.field {
            return Err(Error::MixedField {
                left: self.field,
                right: other.field,
            });
        }
        let (na, nb) = (self.order(), other.order());
        let mut used_a = vec![false; na];
        let mut used_b = vec![false; nb];
        for &(a, b) in pairs {
            if a >= na || b >= nb || used_a[a] || used_b[b] {
                return Err(Error::Shape(format!("invalid contraction pairs {pairs:?}")));
            }
            if self.shape[a] != other.shape[b] {
                return Err(Error::Shape(format!(
                    "contracted axes have dimensions {} and {}",
                    self.shape[a], other.shape[b]
                )));
            }
            used_a[a] = true;
            used_b[b] = true;
        }
        let free_a: Vec<usize> = (0..na).filter(|&k| !used_a[k]).collect();
        let free_b: Vec<usize> = (0..nb).filter(|&k| !used_b[k]).collect();
        let perm_a: Vec<usize> = free_a
            .iter()
            .copied()
            .chain(pairs.iter().map(|p| p.0))
            .collect();
        let perm_b: Vec<usize> = pairs
            .iter()
            .map(|p| p.1)
            .chain(free_b.iter().copied())
            .collect();
        let a = self.permute(&perm_a)?;
        let b = other.permute(&perm_b)?;
        let rows: usize = free_a.iter().map(|&k| self.shape[k]).product();
        let inner: usize = pairs.iter().map(|p| self.shape[p.0]).product();
        let cols: usize = free_b.iter().map(|&k| other.shape[k]).product();
        let mut data = vec![Scalar::zero(self.field); rows * cols];
        for r in 0..rows {
            for k in 0..inner {
                let x = &a.data[r * inner + k];
                if x.is_zero() {
                    continue;
                }
                for c in 0..cols {
                    let y = &b.data[k * cols + c];
                    if !y.is_zero() {
                        let slot = &mut data[r * cols + c];
                        *slot = &*slot + &(x * y);
                    }
                }
            }
        }
        let shape = free_a
            .iter()
            .map(|&k| self.shape[k])
            .chain(free_b.iter().map(|&k| other.shape[k]))
            .collect();
        Ok(Tensor {
            shape,
            field: self.field,
            data,
        })
    }

    /// Flattening at `factor`: the `v_j x (prod of other dims)` matrix whose
    /// columns run over the remaining axes in lexicographic order.
    pub fn flatten(&self, factor: usize) -> Matrix {
        assert!(factor < self.order(), "factor {factor} out of range");
        let mut perm = vec![factor];
        perm.extend((0..self.order()).filter(|&k| k != factor));
        let p = self.permute(&perm).expect("valid permutation");
        let rows = self.shape[factor];
        let cols = self.len() / rows;
        Matrix::new(rows, cols, self.field, p.data).expect("consistent flattening")
    }

    /// Ranks of all flattenings.
    pub fn mlrank(&self) -> Vec<usize> {
        (0..self.order()).map(|j| self.flatten(j).rank()).collect()
    }

    /// Applies `m` (an `r x v_axis` matrix) along one axis:
    /// `out[.., k, ..] = sum_l m[k][l] * self[.., l, ..]`.
    pub fn mode_product(&self, m: &Matrix, axis: usize) -> Result<Tensor> {
        if m.field() != self.field {
            return Err(Error::MixedField {
                left: self.field,
                right: m.field(),
            });
        }
        if axis >= self.order() || m.cols() != self.shape[axis] {
            return Err(Error::Shape(format!(
                "{}x{} map on axis {axis} of shape {:?}",
                m.rows(),
                m.cols(),
                self.shape
            )));
        }
        let outer: usize = self.shape[..axis].iter().product();
        let inner: usize = self.shape[axis + 1..].iter().product();
        let n = self.shape[axis];
        let r = m.rows();
        let mut data = vec![Scalar::zero(self.field); outer * r * inner];
        for o in 0..outer {
            for l in 0..n {
                let src = &self.data[(o * n + l) * inner..(o * n + l + 1) * inner];
                if src.iter().all(Scalar::is_zero) {
                    continue;
                }
                for k in 0..r {
                    let c = m.get(k, l);
                    if c.is_zero() {
                        continue;
                    }
                    let dst = &mut data[(o * r + k) * inner..(o * r + k + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        if !s.is_zero() {
                            *d = &*d + &(c * s);
                        }
                    }
                }
            }
        }
        let mut shape = self.shape.clone();
        shape[axis] = r;
        Ok(Tensor {
            shape,
            field: self.field,
            data,
        })
    }

    fn check_maps(&self, maps: &[Matrix]) -> Result<()> {
        if maps.len() != self.order() {
            return Err(Error::Shape(format!(
                "{} maps for an order-{} tensor",
                maps.len(),
                self.order()
            )));
        }
        for (j, m) in maps.iter().enumerate() {
            if m.rows() != self.shape[j] || m.cols() != self.shape[j] {
                return Err(Error::Shape(format!(
                    "factor {j} has dimension {} but map is {}x{}",
                    self.shape[j],
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(())
    }

    /// Product action of `End(V_1) x ... x End(V_n)`.
    pub fn apply_end(&self, maps: &[Matrix]) -> Result<Tensor> {
        self.check_maps(maps)?;
        let mut t = self.clone();
        for (j, m) in maps.iter().enumerate() {
            t = t.mode_product(m, j)?;
        }
        Ok(t)
    }

    /// Lie-algebra action: `sum_j` (maps\[j\] on factor j alone).
    pub fn leibniz_act(&self, maps: &[Matrix]) -> Result<Tensor> {
        self.check_maps(maps)?;
        let mut acc = Tensor::zeros(&self.shape, self.field);
        for (j, m) in maps.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            acc = acc.add(&self.mode_product(m, j)?)?;
        }
        Ok(acc)
    }

    /// Full contraction against one vector per factor.
    pub fn eval_multilinear(&self, args: &[Vec<Scalar>]) -> Result<Scalar> {
        if args.len() != self.order() {
            return Err(Error::Shape(format!(
                "{} arguments for an order-{} tensor",
                args.len(),
                self.order()
            )));
        }
        for (j, a) in args.iter().enumerate() {
            if a.len() != self.shape[j] {
                return Err(Error::Shape(format!(
                    "argument {j} has length {} but factor has dimension {}",
                    a.len(),
                    self.shape[j]
                )));
            }
            if let Some(bad) = a.iter().find(|s| s.field() != self.field) {
                return Err(Error::MixedField {
                    left: self.field,
                    right: bad.field(),
                });
            }
        }
        // fold the last axis away repeatedly
        let mut cur = self.data.clone();
        for (j, a) in args.iter().enumerate().rev() {
            let d = self.shape[j];
            cur = cur
                .chunks(d)
                .map(|chunk| {
                    chunk
                        .iter()
                        .zip(a)
                        .fold(Scalar::zero(self.field), |acc, (x, y)| {
                            if x.is_zero() || y.is_zero() {
                                acc
                            } else {
                                &acc + &(x * y)
                            }
                        })
                })
                .collect();
        }
        Ok(cur.pop().expect("order-0 remainder"))
    }
}

/// Deterministic rational tensor with entries uniform in
/// `[-ENTRY_BOUND, ENTRY_BOUND]`.
pub fn random_tensor(shape: &[usize], seed: u64) -> Tensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Tensor::from_fn(shape, Field::Rational, |_| random_entry(&mut rng))
}
