//! Integer-power matrix curves acting on tensors, their exact Laurent
//! expansions, and leading terms.
//!
//! A limit is the lowest nonzero Laurent coefficient. Since the sets studied
//! are cones, rescaling a curve by `t^-k` changes nothing projectively, so
//! fractional prefactors such as `t^{-1/2}` are never needed.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Field;
use crate::tensor::Tensor;
use crate::zoo::{mmult, Splitting};

/// Matrix-valued Laurent polynomial `sum_k t^k C_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixCurve {
    terms: Vec<(i64, Matrix)>,
}

impl MatrixCurve {
    /// Powers must be strictly increasing and coefficients square of one size.
    pub fn new(terms: Vec<(i64, Matrix)>) -> Result<MatrixCurve> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::Curve("a curve needs at least one term".into()));
        };
        let (n, field) = (first.rows(), first.field());
        if terms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Curve("powers must be strictly increasing".into()));
        }
        for (k, m) in &terms {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Curve(format!("coefficient of t^{k} is not {n}x{n}")));
            }
            if m.field() != field {
                return Err(Error::MixedField {
                    left: field,
                    right: m.field(),
                });
            }
        }
        Ok(MatrixCurve { terms })
    }

    pub fn constant(m: Matrix) -> Result<MatrixCurve> {
        MatrixCurve::new(vec![(0, m)])
    }

    /// `c0 + t c1`.
    pub fn linear(c0: Matrix, c1: Matrix) -> Result<MatrixCurve> {
        MatrixCurve::new(vec![(0, c0), (1, c1)])
    }

    pub fn terms(&self) -> &[(i64, Matrix)] {
        &self.terms
    }

    pub fn size(&self) -> usize {
        self.terms[0].1.rows()
    }

    pub fn field(&self) -> Field {
        self.terms[0].1.field()
    }

    /// `t^k` times the curve.
    pub fn shift(&self, k: i64) -> MatrixCurve {
        MatrixCurve {
            terms: self.terms.iter().map(|(p, m)| (p + k, m.clone())).collect(),
        }
    }

    /// Sum of the coefficients.
    pub fn at_one(&self) -> Matrix {
        let mut acc = Matrix::zeros(self.size(), self.size(), self.field());
        for (_, m) in &self.terms {
            acc = acc.add(m).expect("uniform size");
        }
        acc
    }
}

/// Tensor-valued Laurent polynomial with nonzero coefficients only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorLaurent {
    terms: Vec<(i64, Tensor)>,
}

impl TensorLaurent {
    pub fn terms(&self) -> &[(i64, Tensor)] {
        &self.terms
    }

    /// Coefficient of `t^k`; `None` means zero.
    pub fn coefficient(&self, k: i64) -> Option<&Tensor> {
        self.terms.iter().find(|(p, _)| *p == k).map(|(_, t)| t)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of the coefficients.
    pub fn at_one(&self, shape: &[usize], field: Field) -> Tensor {
        let mut acc = Tensor::zeros(shape, field);
        for (_, t) in &self.terms {
            acc = acc.add(t).expect("uniform shape");
        }
        acc
    }
}

/// Exact expansion of `apply_end(t, curves(t))`: one product term per choice
/// of curve terms, collected by total power.
pub fn act_curve(t: &Tensor, curves: &[MatrixCurve]) -> Result<TensorLaurent> {
    if curves.len() != t.order() {
        return Err(Error::Shape(format!(
            "{} curves for an order-{} tensor",
            curves.len(),
            t.order()
        )));
    }
    for (j, c) in curves.iter().enumerate() {
        if c.size() != t.shape()[j] {
            return Err(Error::Shape(format!(
                "curve {j} has size {} but factor has dimension {}",
                c.size(),
                t.shape()[j]
            )));
        }
    }
    let counts: Vec<usize> = curves.iter().map(|c| c.terms.len()).collect();
    let mut choices = Vec::new();
    let mut idx = vec![0; counts.len()];
    loop {
        choices.push(idx.clone());
        if !crate::tensor::next_index(&mut idx, &counts) {
            break;
        }
    }
    let products = choices
        .par_iter()
        .map(|choice| {
            let power: i64 = choice
                .iter()
                .enumerate()
                .map(|(j, &c)| curves[j].terms[c].0)
                .sum();
            let maps: Vec<Matrix> = choice
                .iter()
                .enumerate()
                .map(|(j, &c)| curves[j].terms[c].1.clone())
                .collect();
            t.apply_end(&maps).map(|out| (power, out))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut by_power: BTreeMap<i64, Tensor> = BTreeMap::new();
    for (p, out) in products {
        match by_power.get_mut(&p) {
            Some(acc) => *acc = acc.add(&out)?,
            None => {
                by_power.insert(p, out);
            }
        }
    }
    Ok(TensorLaurent {
        terms: by_power.into_iter().filter(|(_, t)| !t.is_zero()).collect(),
    })
}

/// Lowest nonzero power and its coefficient.
pub fn leading_term(l: &TensorLaurent) -> Result<(i64, Tensor)> {
    l.terms.first().cloned().ok_or(Error::DegenerateCurve)
}

/// `(X0 + t X1, Y0 + t Y1, Z0 + t Z1)`.
pub fn splitting_curves(s: &Splitting) -> Vec<MatrixCurve> {
    s.p0()
        .into_iter()
        .zip(s.p1())
        .map(|(p0, p1)| MatrixCurve::linear(p0.clone(), p1).expect("projectors share a size"))
        .collect()
}

fn check_square_dims(s: &Splitting, e: usize) -> Result<()> {
    if s.dims() != [e * e; 3] {
        return Err(Error::Shape(format!(
            "splitting has factor dims {:?}, expected {} each",
            s.dims(),
            e * e
        )));
    }
    Ok(())
}

/// The constant term `apply_end(m, (X0, Y0, Z0))` vanishes.
pub fn vanishing_on(m: &Tensor, s: &Splitting) -> Result<bool> {
    Ok(m.apply_end(&s.p0().map(Clone::clone))?.is_zero())
}

/// [`vanishing_on`] for `mmult(e, e, e)`.
pub fn vanishing_check(s: &Splitting, e: usize) -> Result<bool> {
    check_square_dims(s, e)?;
    vanishing_on(&mmult(e, e, e), s)
}

/// Coefficient of `t` in the splitting curve:
/// `(X0,Y0,Z1) + (X0,Y1,Z0) + (X1,Y0,Z0)` applied to `m`.
pub fn first_order_term(m: &Tensor, s: &Splitting) -> Result<Tensor> {
    let [x0, y0, z0] = s.p0().map(Clone::clone);
    let [x1, y1, z1] = s.p1();
    let a = m.apply_end(&[x0.clone(), y0.clone(), z1])?;
    let b = m.apply_end(&[x0, y1, z0.clone()])?;
    let c = m.apply_end(&[x1, y0, z0])?;
    a.add(&b)?.add(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::random_tensor;
    use crate::zoo::{diagonal_splitting, m_tilde_formula};

    fn id(n: usize) -> Matrix {
        Matrix::identity(n, Field::Rational)
    }

    #[test]
    fn curve_validation() {
        assert!(MatrixCurve::new(vec![]).is_err());
        assert!(MatrixCurve::new(vec![(1, id(2)), (0, id(2))]).is_err());
        assert!(MatrixCurve::new(vec![(0, id(2)), (1, id(3))]).is_err());
    }

    #[test]
    fn constant_identity_curves() {
        let t = random_tensor(&[2, 3, 2], 1);
        let curves: Vec<_> = t
            .shape()
            .iter()
            .map(|&v| MatrixCurve::constant(id(v)).unwrap())
            .collect();
        let l = act_curve(&t, &curves).unwrap();
        assert_eq!(l.terms(), &[(0, t.clone())]);
        assert_eq!(leading_term(&l).unwrap(), (0, t));
    }

    #[test]
    fn homogeneity() {
        let t = random_tensor(&[2, 2, 2], 2);
        let curves = vec![
            MatrixCurve::new(vec![(1, id(2))]).unwrap(),
            MatrixCurve::constant(id(2)).unwrap(),
            MatrixCurve::constant(id(2)).unwrap(),
        ];
        assert_eq!(act_curve(&t, &curves).unwrap().terms(), &[(1, t)]);
    }

    #[test]
    fn diagonal_limit_e2() {
        let s = diagonal_splitting(2).unwrap();
        let l = act_curve(&mmult(2, 2, 2), &splitting_curves(&s)).unwrap();
        assert!(l.coefficient(0).is_none());
        assert_eq!(leading_term(&l).unwrap(), (1, m_tilde_formula(2).unwrap()));
        assert!(vanishing_check(&s, 2).unwrap());
    }

    #[test]
    fn identity_splitting_does_not_vanish() {
        let s = crate::zoo::Splitting::identity([4, 4, 4]);
        assert!(!vanishing_check(&s, 2).unwrap());
        assert!(vanishing_check(&s, 3).is_err());
    }

    #[test]
    fn zero_curve_degenerates() {
        let t = random_tensor(&[2, 2], 3);
        let z = MatrixCurve::constant(Matrix::zeros(2, 2, Field::Rational)).unwrap();
        let l = act_curve(&t, &[z.clone(), z]).unwrap();
        assert!(l.is_zero());
        assert!(matches!(leading_term(&l), Err(Error::DegenerateCurve)));
    }

    #[test]
    fn shift_moves_powers() {
        let t = random_tensor(&[2, 2], 4);
        let c = MatrixCurve::linear(id(2), Matrix::from_rows(&[[1, 2], [0, 1]])).unwrap();
        let base = act_curve(&t, &[c.clone(), c.clone()]).unwrap();
        let shifted = act_curve(&t, &[c.shift(3), c.clone()]).unwrap();
        let moved: Vec<_> = base
            .terms()
            .iter()
            .map(|(p, m)| (p + 3, m.clone()))
            .collect();
        assert_eq!(shifted.terms(), moved.as_slice());
        let at_one = c.at_one();
        assert_eq!(
            base.at_one(&[2, 2], Field::Rational),
            t.apply_end(&[at_one.clone(), at_one]).unwrap()
        );
    }
}
