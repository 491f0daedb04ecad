//! Subspace-variety membership, conciseness, Jacobian dimensions of tensor
//! network sets, and the non-closedness certificate for the triangle.

use rayon::prelude::*;
use serde::Serialize;

use crate::degeneration::{
    act_curve, first_order_term, leading_term, splitting_curves, vanishing_on,
};
use crate::error::{Error, Result};
use crate::lie_stab::{stabilizer_dim, stabilizer_dim_in};
use crate::matrix::Matrix;
use crate::network::{contract_network, random_instance, NetworkGraph, TnsInstance};
use crate::scalar::{Field, Scalar};
use crate::tensor::Tensor;
use crate::zoo::{diagonal_splitting, imm_loop, m_tilde_formula, mmult, Splitting};

/// `mlrank(t) <= f` componentwise. A bound `f_j >= v_j` constrains nothing.
pub fn sub_membership(t: &Tensor, f: &[usize]) -> Result<bool> {
    if f.len() != t.order() {
        return Err(Error::Shape(format!(
            "{} bounds for an order-{} tensor",
            f.len(),
            t.order()
        )));
    }
    Ok((0..t.order()).all(|j| f[j] >= t.shape()[j] || t.flatten(j).rank() <= f[j]))
}

/// Every flattening is injective on the dual factor.
pub fn is_concise(t: &Tensor) -> bool {
    t.mlrank() == t.shape()
}

/// Extra samples drawn after the first two disagree.
pub const MAX_RETRIES: usize = 3;

fn sample_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Differential of the contraction map at `inst`: one column per entry of
/// every vertex tensor, holding the contraction with that entry's unit
/// tensor in place of the vertex tensor.
pub fn jacobian(inst: &TnsInstance) -> Result<Matrix> {
    let g = inst.graph();
    let field = inst.field();
    let slots: Vec<(usize, usize)> = (0..g.vertices().len())
        .flat_map(|pos| (0..inst.tensors()[pos].len()).map(move |k| (pos, k)))
        .collect();
    let cols = slots
        .par_iter()
        .map(|&(pos, k)| {
            let shape = g.tensor_shape(pos);
            let mut unit = Tensor::zeros(&shape, field);
            let idx = unravel(k, &shape);
            unit.set(&idx, Scalar::one(field));
            contract_network(&inst.with_tensor(pos, unit)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: usize = g.vertex_dims().iter().product();
    Ok(Matrix::from_fn(rows, cols.len(), field, |r, c| {
        cols[c].data()[r].clone()
    }))
}

fn unravel(mut k: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for a in (0..shape.len()).rev() {
        idx[a] = k % shape[a];
        k /= shape[a];
    }
    idx
}

/// Jacobian rank at the random instance drawn from `seed`.
pub fn jacobian_rank(g: &NetworkGraph, seed: u64, field: Field) -> Result<usize> {
    let inst = random_instance(g, seed).to_field(field)?;
    Ok(jacobian(&inst)?.rank())
}

/// Dimension of the cone of contracted tensors, as the generic Jacobian
/// rank. Two samples are drawn; if they disagree up to [`MAX_RETRIES`] more
/// are drawn until the maximum is seen twice.
pub fn tns_dim(g: &NetworkGraph, seed: u64, field: Field) -> Result<usize> {
    let mut ranks = Vec::new();
    for k in 0..2 + MAX_RETRIES {
        ranks.push(jacobian_rank(g, sample_seed(seed, k), field)?);
        let max = *ranks.iter().max().expect("nonempty");
        if ranks.iter().filter(|&&r| r == max).count() >= 2 {
            return Ok(max);
        }
    }
    Err(Error::Genericity {
        attempts: ranks.len(),
        ranks,
    })
}

/// On a loop instance, reads each vertex tensor as a map `X_j` from the
/// matrix space of its two edges to `V_j` and checks
/// `contract_network(inst) == apply_end(imm_loop, X)`.
pub fn end_orbit_consistency(inst: &TnsInstance) -> Result<bool> {
    let g = inst.graph();
    let (walk, edges) = g
        .cycle_order()
        .ok_or_else(|| Error::Graph("end-orbit check needs a loop graph".into()))?;
    let n = walk.len();
    let d: Vec<usize> = edges.iter().map(|&s| g.edges()[s].dim).collect();
    let field = inst.field();
    let maps: Vec<Matrix> = (0..n)
        .map(|k| {
            let pos = walk[k];
            let t = &inst.tensors()[pos];
            let axes = g.vertex_axes(pos);
            let (prev, next) = (edges[(k + n - 1) % n], edges[k]);
            let a_prev = 1 + axes.iter().position(|&s| s == prev).expect("incident");
            let a_next = 1 + axes.iter().position(|&s| s == next).expect("incident");
            let dn = d[k];
            Matrix::from_fn(t.shape()[0], d[(k + n - 1) % n] * dn, field, |a, b| {
                let mut idx = vec![0; 3];
                idx[0] = a;
                idx[a_prev] = b / dn;
                idx[a_next] = b % dn;
                t.get(&idx).clone()
            })
        })
        .collect();
    let lhs = contract_network(inst)?;
    let walked = imm_loop(&d).to_field(field)?.apply_end(&maps)?;
    // axis k of `walked` belongs to vertex walk[k]
    let perm: Vec<usize> = (0..n)
        .map(|p| walk.iter().position(|&w| w == p).expect("all vertices"))
        .collect();
    Ok(walked.permute(&perm)? == lhs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    NotClosedCertified,
    Inconclusive,
}

/// Computed premises for non-closedness of the critical triangle set: the
/// limit of a curve in the group orbit of `MMult` is concise (so it is not
/// on the subspace-variety boundary) and has a larger stabilizer than
/// `MMult` (so it is not in the `End`-orbit of `MMult`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub e: usize,
    pub stab_mmult: usize,
    pub stab_mtilde: usize,
    pub mlrank_mtilde: Vec<usize>,
    pub leading_power: i64,
    pub leading_matches_formula: bool,
    pub vanishing: bool,
    pub concise: bool,
    pub conclusion: Conclusion,
    pub reasons: Vec<String>,
}

/// Runs the splitting curve on `mmult(e, e, e)` and checks the premises.
/// `leading_matches_formula` compares the leading coefficient with the
/// three-term first-order route and, for the diagonal splitting, also with
/// `m_tilde_formula(e)`.
pub fn certify_not_closed(s: &Splitting, e: usize) -> Result<Certificate> {
    certify_not_closed_in(s, e, None)
}

/// As [`certify_not_closed`] with stabilizers computed in `field`
/// (`None` picks the field by system size).
pub fn certify_not_closed_in(s: &Splitting, e: usize, field: Option<Field>) -> Result<Certificate> {
    if s.dims() != [e * e; 3] {
        return Err(Error::Shape(format!(
            "splitting has factor dims {:?}, expected {} each",
            s.dims(),
            e * e
        )));
    }
    let m = mmult(e, e, e);
    let vanishing = vanishing_on(&m, s)?;
    let (leading_power, lead) = leading_term(&act_curve(&m, &splitting_curves(s))?)?;
    let leading_matches_formula = leading_power == 1
        && lead == first_order_term(&m, s)?
        && (e < 2 || *s != diagonal_splitting(e)? || lead == m_tilde_formula(e)?);
    let mlrank_mtilde = lead.mlrank();
    let concise = mlrank_mtilde == lead.shape();
    let stab = |t: &Tensor| match field {
        Some(f) => stabilizer_dim_in(t, f),
        None => stabilizer_dim(t),
    };
    let stab_mmult = stab(&m)?;
    let stab_mtilde = stab(&lead)?;

    let mut reasons = Vec::new();
    if !vanishing {
        reasons.push("power-0 term nonzero".to_string());
    }
    if leading_power < 1 {
        reasons.push(format!(
            "leading power {leading_power} < 1: the limit is in the orbit"
        ));
    }
    if !concise {
        reasons.push(format!("limit is not concise (mlrank {mlrank_mtilde:?})"));
    }
    if stab_mtilde <= stab_mmult {
        reasons.push(format!(
            "stabilizer of the limit ({stab_mtilde}) does not exceed that of MMult ({stab_mmult})"
        ));
    }
    let conclusion = if reasons.is_empty() {
        Conclusion::NotClosedCertified
    } else {
        Conclusion::Inconclusive
    };
    Ok(Certificate {
        e,
        stab_mmult,
        stab_mtilde,
        mlrank_mtilde,
        leading_power,
        leading_matches_formula,
        vanishing,
        concise,
        conclusion,
        reasons,
    })
}
