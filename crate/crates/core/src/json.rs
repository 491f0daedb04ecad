//! JSON interchange formats. Scalars are strings `"p"` or `"p/q"`; prime
//! field values are written as residues in `[0, p)`. Tensors list nonzero
//! entries only, in lexicographic index order. Output is byte-stable.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::degeneration::MatrixCurve;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::network::{Edge, NetworkGraph, TnsInstance, Vertex};
use crate::scalar::{Field, Scalar};
use crate::tensor::Tensor;
use crate::zoo::Splitting;

/// A scalar written either as a string or as a JSON integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Text(String),
    Int(i64),
}

impl ScalarJson {
    fn parse(&self) -> Result<Scalar> {
        match self {
            ScalarJson::Text(s) => s.parse(),
            ScalarJson::Int(v) => Ok(Scalar::from_i64(*v, Field::Rational)),
        }
    }
}

impl From<&Scalar> for ScalarJson {
    fn from(s: &Scalar) -> Self {
        ScalarJson::Text(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<ScalarJson>,
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(ScalarJson::from).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for Matrix {
    type Error = Error;
    fn try_from(j: &MatrixJson) -> Result<Matrix> {
        let entries = j
            .entries
            .iter()
            .map(ScalarJson::parse)
            .collect::<Result<Vec<_>>>()?;
        Matrix::new(j.rows, j.cols, Field::Rational, entries)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    pub idx: Vec<usize>,
    pub val: ScalarJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorJson {
    pub shape: Vec<usize>,
    pub entries: Vec<EntryJson>,
}

impl From<&Tensor> for TensorJson {
    fn from(t: &Tensor) -> Self {
        TensorJson {
            shape: t.shape().to_vec(),
            entries: t
                .nonzero_entries()
                .into_iter()
                .map(|(idx, v)| EntryJson {
                    idx,
                    val: ScalarJson::from(&v),
                })
                .collect(),
        }
    }
}

impl TryFrom<&TensorJson> for Tensor {
    type Error = Error;
    fn try_from(j: &TensorJson) -> Result<Tensor> {
        let mut t = Tensor::zeros(&j.shape, Field::Rational);
        let mut seen = std::collections::BTreeSet::new();
        for e in &j.entries {
            if e.idx.len() != j.shape.len() || e.idx.iter().zip(&j.shape).any(|(i, d)| i >= d) {
                return Err(Error::Shape(format!(
                    "index {:?} outside shape {:?}",
                    e.idx, j.shape
                )));
            }
            if !seen.insert(e.idx.clone()) {
                return Err(Error::Parse(format!(
                    "duplicate entry at index {:?}",
                    e.idx
                )));
            }
            t.set(&e.idx, e.val.parse()?);
        }
        Ok(t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl From<&NetworkGraph> for GraphJson {
    fn from(g: &NetworkGraph) -> Self {
        GraphJson {
            vertices: g.vertices().to_vec(),
            edges: g.edges().to_vec(),
        }
    }
}

impl TryFrom<&GraphJson> for NetworkGraph {
    type Error = Error;
    fn try_from(j: &GraphJson) -> Result<NetworkGraph> {
        NetworkGraph::new(j.vertices.clone(), j.edges.clone())
    }
}

/// Graph fields plus one tensor per vertex, keyed by vertex id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceJson {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub tensors: BTreeMap<usize, TensorJson>,
}

impl From<&TnsInstance> for InstanceJson {
    fn from(inst: &TnsInstance) -> Self {
        let g = inst.graph();
        InstanceJson {
            vertices: g.vertices().to_vec(),
            edges: g.edges().to_vec(),
            tensors: g
                .vertices()
                .iter()
                .zip(inst.tensors())
                .map(|(v, t)| (v.id, TensorJson::from(t)))
                .collect(),
        }
    }
}

impl TryFrom<&InstanceJson> for TnsInstance {
    type Error = Error;
    fn try_from(j: &InstanceJson) -> Result<TnsInstance> {
        let g = NetworkGraph::new(j.vertices.clone(), j.edges.clone())?;
        if let Some(id) = j.tensors.keys().find(|&&id| g.vertex_pos(id).is_none()) {
            return Err(Error::Graph(format!(
                "tensor given for unknown vertex {id}"
            )));
        }
        let tensors = g
            .vertices()
            .iter()
            .map(|v| {
                let tj = j
                    .tensors
                    .get(&v.id)
                    .ok_or_else(|| Error::Shape(format!("no tensor for vertex {}", v.id)))?;
                Tensor::try_from(tj)
            })
            .collect::<Result<Vec<_>>>()?;
        TnsInstance::new(g, tensors)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplittingJson {
    #[serde(rename = "X0")]
    pub x0: MatrixJson,
    #[serde(rename = "Y0")]
    pub y0: MatrixJson,
    #[serde(rename = "Z0")]
    pub z0: MatrixJson,
}

impl From<&Splitting> for SplittingJson {
    fn from(s: &Splitting) -> Self {
        let [x0, y0, z0] = s.p0().map(MatrixJson::from);
        SplittingJson { x0, y0, z0 }
    }
}

impl TryFrom<&SplittingJson> for Splitting {
    type Error = Error;
    fn try_from(j: &SplittingJson) -> Result<Splitting> {
        Splitting::new(
            Matrix::try_from(&j.x0)?,
            Matrix::try_from(&j.y0)?,
            Matrix::try_from(&j.z0)?,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveTermJson {
    pub power: i64,
    pub matrix: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveJson {
    pub factor: usize,
    pub terms: Vec<CurveTermJson>,
}

impl CurveJson {
    pub fn new(factor: usize, c: &MatrixCurve) -> CurveJson {
        CurveJson {
            factor,
            terms: c
                .terms()
                .iter()
                .map(|(power, m)| CurveTermJson {
                    power: *power,
                    matrix: MatrixJson::from(m),
                })
                .collect(),
        }
    }
}

/// One curve per factor of a tensor with the given shape. Factors without a
/// curve get the constant identity.
pub fn curves_from_json(curves: &[CurveJson], shape: &[usize]) -> Result<Vec<MatrixCurve>> {
    let mut out: Vec<Option<MatrixCurve>> = vec![None; shape.len()];
    for c in curves {
        let slot = out.get_mut(c.factor).ok_or_else(|| {
            Error::Shape(format!(
                "curve for factor {} of an order-{} tensor",
                c.factor,
                shape.len()
            ))
        })?;
        if slot.is_some() {
            return Err(Error::Curve(format!("two curves for factor {}", c.factor)));
        }
        let terms = c
            .terms
            .iter()
            .map(|t| Ok((t.power, Matrix::try_from(&t.matrix)?)))
            .collect::<Result<Vec<_>>>()?;
        *slot = Some(MatrixCurve::new(terms)?);
    }
    out.into_iter()
        .enumerate()
        .map(|(j, c)| match c {
            Some(c) => Ok(c),
            None => MatrixCurve::constant(Matrix::identity(shape[j], Field::Rational)),
        })
        .collect()
}

/// Parses a JSON document into a format type.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

/// Pretty-printed JSON with a trailing newline.
pub fn render<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory serialization");
    s.push('\n');
    s
}

pub fn tensor_from_str(text: &str) -> Result<Tensor> {
    Tensor::try_from(&parse::<TensorJson>(text)?)
}

pub fn tensor_to_string(t: &Tensor) -> String {
    render(&TensorJson::from(t))
}

pub fn graph_from_str(text: &str) -> Result<NetworkGraph> {
    NetworkGraph::try_from(&parse::<GraphJson>(text)?)
}

pub fn instance_from_str(text: &str) -> Result<TnsInstance> {
    TnsInstance::try_from(&parse::<InstanceJson>(text)?)
}

pub fn splitting_from_str(text: &str) -> Result<Splitting> {
    Splitting::try_from(&parse::<SplittingJson>(text)?)
}
