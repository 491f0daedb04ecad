//! Graphs with vertex and edge dimensions, tensor network instances, and the
//! contraction map.
//!
//! Axis convention for vertex tensors: the vertex tensor `T_j` has axes
//! `(vertex axis, incoming edges by edge id, outgoing edges by edge id)`.
//! Contraction pairs the tail-side and head-side axis of every edge. In
//! coordinates the orientation only decides which side is the dual space,
//! which matters for [`gauge_transform`] and the axis layout, not for the
//! contracted tensor.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{random_entry, Matrix};
use crate::scalar::{Field, Scalar};
use crate::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub tail: usize,
    pub head: usize,
    pub dim: usize,
}

impl Edge {
    pub fn other_end(&self, vertex_id: usize) -> usize {
        if self.tail == vertex_id {
            self.head
        } else {
            self.tail
        }
    }

    pub fn touches(&self, vertex_id: usize) -> bool {
        self.tail == vertex_id || self.head == vertex_id
    }
}

/// A directed multigraph without self-loops. Vertices and edges are kept
/// sorted by id; tensor factors follow vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NetworkGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

/// Position of a vertex dimension relative to the product of its incident
/// edge dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexClass {
    StrictlySub,
    Critical,
    StrictlySuper,
}

impl VertexClass {
    /// `v <= product` (includes critical).
    pub fn is_subcritical(self) -> bool {
        self != VertexClass::StrictlySuper
    }

    /// `v >= product` (includes critical).
    pub fn is_supercritical(self) -> bool {
        self != VertexClass::StrictlySub
    }
}

impl NetworkGraph {
    pub fn new(mut vertices: Vec<Vertex>, mut edges: Vec<Edge>) -> Result<NetworkGraph> {
        vertices.sort_by_key(|v| v.id);
        edges.sort_by_key(|e| e.id);
        if vertices.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(Error::Graph("duplicate vertex id".into()));
        }
        if edges.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(Error::Graph("duplicate edge id".into()));
        }
        if let Some(v) = vertices.iter().find(|v| v.dim == 0) {
            return Err(Error::Graph(format!("vertex {} has dimension 0", v.id)));
        }
        for e in &edges {
            if e.dim == 0 {
                return Err(Error::Graph(format!("edge {} has dimension 0", e.id)));
            }
            if e.tail == e.head {
                return Err(Error::Graph(format!("edge {} is a self-loop", e.id)));
            }
            for end in [e.tail, e.head] {
                if vertices.binary_search_by_key(&end, |v| v.id).is_err() {
                    return Err(Error::Graph(format!(
                        "edge {} references missing vertex {end}",
                        e.id
                    )));
                }
            }
        }
        Ok(NetworkGraph { vertices, edges })
    }

    /// Chain `0 - 1 - ... - (n-1)`; edge `k` runs from vertex `k` to `k+1`.
    pub fn chain(vertex_dims: &[usize], edge_dims: &[usize]) -> Result<NetworkGraph> {
        if edge_dims.len() + 1 != vertex_dims.len() {
            return Err(Error::Graph("a chain of n vertices has n-1 edges".into()));
        }
        NetworkGraph::new(
            vertex_dims
                .iter()
                .enumerate()
                .map(|(id, &dim)| Vertex { id, dim })
                .collect(),
            edge_dims
                .iter()
                .enumerate()
                .map(|(id, &dim)| Edge {
                    id,
                    tail: id,
                    head: id + 1,
                    dim,
                })
                .collect(),
        )
    }

    /// Cycle on `n >= 2` vertices; edge `k` runs from vertex `k` to `k+1 mod n`.
    pub fn cycle(vertex_dims: &[usize], edge_dims: &[usize]) -> Result<NetworkGraph> {
        let n = vertex_dims.len();
        if n < 2 || edge_dims.len() != n {
            return Err(Error::Graph(
                "a cycle needs n >= 2 vertices and n edges".into(),
            ));
        }
        NetworkGraph::new(
            vertex_dims
                .iter()
                .enumerate()
                .map(|(id, &dim)| Vertex { id, dim })
                .collect(),
            edge_dims
                .iter()
                .enumerate()
                .map(|(id, &dim)| Edge {
                    id,
                    tail: id,
                    head: (id + 1) % n,
                    dim,
                })
                .collect(),
        )
    }

    /// Critical cycle: vertex `k` has dimension `e_{k-1} * e_k`, so its
    /// factor is the space of `e_{k-1} x e_k` matrices.
    pub fn critical_loop(edge_dims: &[usize]) -> Result<NetworkGraph> {
        let n = edge_dims.len();
        let vdims: Vec<usize> = (0..n)
            .map(|k| edge_dims[(k + n - 1) % n] * edge_dims[k])
            .collect();
        NetworkGraph::cycle(&vdims, edge_dims)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_dims(&self) -> Vec<usize> {
        self.vertices.iter().map(|v| v.dim).collect()
    }

    pub fn vertex_pos(&self, id: usize) -> Option<usize> {
        self.vertices.binary_search_by_key(&id, |v| v.id).ok()
    }

    pub fn edge_pos(&self, id: usize) -> Option<usize> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok()
    }

    fn require_vertex(&self, id: usize) -> Result<usize> {
        self.vertex_pos(id)
            .ok_or_else(|| Error::Graph(format!("no vertex with id {id}")))
    }

    fn require_edge(&self, id: usize) -> Result<usize> {
        self.edge_pos(id)
            .ok_or_else(|| Error::Graph(format!("no edge with id {id}")))
    }

    /// Positions of all edges touching the vertex at `pos`.
    pub fn incident(&self, pos: usize) -> Vec<usize> {
        let id = self.vertices[pos].id;
        (0..self.edges.len())
            .filter(|&k| self.edges[k].touches(id))
            .collect()
    }

    pub fn degree(&self, pos: usize) -> usize {
        self.incident(pos).len()
    }

    /// Edge positions for the non-vertex axes of the vertex tensor at `pos`:
    /// incoming edges then outgoing edges, each by edge id.
    pub fn vertex_axes(&self, pos: usize) -> Vec<usize> {
        let id = self.vertices[pos].id;
        let incoming = (0..self.edges.len()).filter(|&k| self.edges[k].head == id);
        let outgoing = (0..self.edges.len()).filter(|&k| self.edges[k].tail == id);
        incoming.chain(outgoing).collect()
    }

    /// Shape of the vertex tensor at `pos`.
    pub fn tensor_shape(&self, pos: usize) -> Vec<usize> {
        let mut shape = vec![self.vertices[pos].dim];
        shape.extend(self.vertex_axes(pos).iter().map(|&k| self.edges[k].dim));
        shape
    }

    /// Product of incident edge dimensions (saturating).
    pub fn incident_product(&self, pos: usize) -> usize {
        self.incident(pos)
            .iter()
            .fold(1usize, |acc, &k| acc.saturating_mul(self.edges[k].dim))
    }

    pub fn classify_vertex(&self, id: usize) -> Result<VertexClass> {
        let pos = self.require_vertex(id)?;
        let v = self.vertices[pos].dim;
        let p = self.incident_product(pos);
        Ok(match v.cmp(&p) {
            std::cmp::Ordering::Less => VertexClass::StrictlySub,
            std::cmp::Ordering::Equal => VertexClass::Critical,
            std::cmp::Ordering::Greater => VertexClass::StrictlySuper,
        })
    }

    fn class_at(&self, pos: usize) -> VertexClass {
        self.classify_vertex(self.vertices[pos].id)
            .expect("valid position")
    }

    /// If the graph is a single cycle (every vertex of degree 2, connected,
    /// at least two vertices), returns the vertex positions in traversal order
    /// `w_0 = 0, w_1, ...` and the edge positions `f_k` joining `w_k` and
    /// `w_{k+1}`. Traversal leaves `w_0` along its lowest-id edge.
    pub fn cycle_order(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let n = self.vertices.len();
        if n < 2 || self.edges.len() != n || (0..n).any(|p| self.degree(p) != 2) {
            return None;
        }
        let mut walk_v = vec![0];
        let mut walk_e = Vec::new();
        let mut cur = 0;
        let mut via: Option<usize> = None;
        for _ in 0..n {
            let inc = self.incident(cur);
            let next_e = match via {
                None => inc[0],
                Some(prev) => *inc.iter().find(|&&k| k != prev)?,
            };
            walk_e.push(next_e);
            let nid = self.edges[next_e].other_end(self.vertices[cur].id);
            cur = self.vertex_pos(nid)?;
            via = Some(next_e);
            walk_v.push(cur);
        }
        if walk_v.pop() != Some(0) {
            return None;
        }
        let mut seen = walk_v.clone();
        seen.sort_unstable();
        seen.dedup();
        (seen.len() == n).then_some((walk_v, walk_e))
    }

    fn with_reversed(&self, edge_pos: usize) -> NetworkGraph {
        let mut g = self.clone();
        let e = &mut g.edges[edge_pos];
        std::mem::swap(&mut e.tail, &mut e.head);
        g
    }
}

/// A graph together with one tensor per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TnsInstance {
    graph: NetworkGraph,
    tensors: Vec<Tensor>,
}

impl TnsInstance {
    /// `tensors[k]` belongs to the `k`-th vertex in id order.
    pub fn new(graph: NetworkGraph, tensors: Vec<Tensor>) -> Result<TnsInstance> {
        if tensors.len() != graph.vertices.len() {
            return Err(Error::Shape(format!(
                "{} tensors for {} vertices",
                tensors.len(),
                graph.vertices.len()
            )));
        }
        for (pos, t) in tensors.iter().enumerate() {
            let want = graph.tensor_shape(pos);
            if t.shape() != want.as_slice() {
                return Err(Error::Shape(format!(
                    "vertex {} expects shape {want:?}, got {:?}",
                    graph.vertices[pos].id,
                    t.shape()
                )));
            }
        }
        if let Some(t) = tensors.iter().find(|t| t.field() != tensors[0].field()) {
            return Err(Error::MixedField {
                left: tensors[0].field(),
                right: t.field(),
            });
        }
        Ok(TnsInstance { graph, tensors })
    }

    pub fn graph(&self) -> &NetworkGraph {
        &self.graph
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn tensor(&self, vertex_id: usize) -> Option<&Tensor> {
        self.graph.vertex_pos(vertex_id).map(|p| &self.tensors[p])
    }

    pub fn field(&self) -> Field {
        self.tensors.first().map_or(Field::Rational, Tensor::field)
    }

    /// Same instance with the vertex tensor at `pos` replaced.
    pub fn with_tensor(&self, pos: usize, t: Tensor) -> Result<TnsInstance> {
        let mut tensors = self.tensors.clone();
        tensors[pos] = t;
        TnsInstance::new(self.graph.clone(), tensors)
    }

    pub fn to_field(&self, field: Field) -> Result<TnsInstance> {
        Ok(TnsInstance {
            graph: self.graph.clone(),
            tensors: self
                .tensors
                .iter()
                .map(|t| t.to_field(field))
                .collect::<Result<_>>()?,
        })
    }
}

/// Deterministic random instance with entries uniform in
/// `[-ENTRY_BOUND, ENTRY_BOUND]`, filled vertex by vertex.
pub fn random_instance(graph: &NetworkGraph, seed: u64) -> TnsInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tensors = (0..graph.vertices.len())
        .map(|pos| {
            Tensor::from_fn(&graph.tensor_shape(pos), Field::Rational, |_| {
                random_entry(&mut rng)
            })
        })
        .collect();
    TnsInstance::new(graph.clone(), tensors).expect("shapes follow the graph")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Label {
    Vertex(usize),
    Edge(usize),
}

/// Contracts every edge, pairwise in edge-id order. The result has one axis
/// per vertex, in vertex-id order.
pub fn contract_network(inst: &TnsInstance) -> Result<Tensor> {
    let order: Vec<usize> = (0..inst.graph.edges.len()).collect();
    contract_network_in_order(inst, &order)
}

/// As [`contract_network`] with an explicit edge order (edge positions). The
/// result does not depend on the order.
pub fn contract_network_in_order(inst: &TnsInstance, order: &[usize]) -> Result<Tensor> {
    let g = &inst.graph;
    let m = g.edges.len();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..m).collect::<Vec<_>>() {
        return Err(Error::Graph(format!(
            "{order:?} is not an ordering of the {m} edges"
        )));
    }
    let mut comps: Vec<Option<(Tensor, Vec<Label>)>> = inst
        .tensors
        .iter()
        .enumerate()
        .map(|(pos, t)| {
            let mut labels = vec![Label::Vertex(pos)];
            labels.extend(g.vertex_axes(pos).into_iter().map(Label::Edge));
            Some((t.clone(), labels))
        })
        .collect();
    let mut owner: Vec<usize> = (0..g.vertices.len()).collect();

    for &s in order {
        let e = &g.edges[s];
        let ct = owner[g.vertex_pos(e.tail).expect("validated")];
        let ch = owner[g.vertex_pos(e.head).expect("validated")];
        if ct == ch {
            let (t, labels) = comps[ct].take().expect("live component");
            let axes: Vec<usize> = (0..labels.len())
                .filter(|&k| labels[k] == Label::Edge(s))
                .collect();
            let out = t.contract_pair(axes[0], axes[1])?;
            let rest = labels
                .into_iter()
                .filter(|&l| l != Label::Edge(s))
                .collect();
            comps[ct] = Some((out, rest));
        } else {
            let (a, la) = comps[ct].take().expect("live component");
            let (b, lb) = comps[ch].take().expect("live component");
            let ia = la
                .iter()
                .position(|&l| l == Label::Edge(s))
                .expect("edge axis");
            let ib = lb
                .iter()
                .position(|&l| l == Label::Edge(s))
                .expect("edge axis");
            let out = a.contract_with(&b, &[(ia, ib)])?;
            let labels = la
                .into_iter()
                .filter(|&l| l != Label::Edge(s))
                .chain(lb.into_iter().filter(|&l| l != Label::Edge(s)))
                .collect();
            comps[ct] = Some((out, labels));
            for o in owner.iter_mut() {
                if *o == ch {
                    *o = ct;
                }
            }
        }
    }

    let mut acc: Option<(Tensor, Vec<Label>)> = None;
    for (t, labels) in comps.into_iter().flatten() {
        acc = Some(match acc {
            None => (t, labels),
            Some((a, mut la)) => {
                let out = a.outer(&t)?;
                la.extend(labels);
                (out, la)
            }
        });
    }
    let (t, labels) = acc.ok_or_else(|| Error::Graph("graph has no vertices".into()))?;
    let perm: Vec<usize> = (0..g.vertices.len())
        .map(|pos| {
            labels
                .iter()
                .position(|&l| l == Label::Vertex(pos))
                .expect("vertex axis")
        })
        .collect();
    t.permute(&perm)
}

/// Permutation taking a vertex tensor laid out for `from` to the layout of
/// `to` (same vertex and edge sets, possibly different orientations).
fn relayout(from: &NetworkGraph, to: &NetworkGraph, pos: usize) -> Vec<usize> {
    let old = from.vertex_axes(pos);
    to.vertex_axes(pos)
        .iter()
        .map(|k| {
            1 + old
                .iter()
                .position(|o| o == k)
                .expect("same incident edges")
        })
        .fold(vec![0], |mut perm, a| {
            perm.push(a);
            perm
        })
}

/// Reverses one edge and moves its axis in the two incident tensors so the
/// contraction is unchanged.
pub fn flip_edge(inst: &TnsInstance, edge_id: usize) -> Result<TnsInstance> {
    let s = inst.graph.require_edge(edge_id)?;
    let flipped = inst.graph.with_reversed(s);
    let tensors = (0..inst.tensors.len())
        .map(|pos| inst.tensors[pos].permute(&relayout(&inst.graph, &flipped, pos)))
        .collect::<Result<Vec<_>>>()?;
    TnsInstance::new(flipped, tensors)
}

/// Edge gauge freedom: `g` acts on the edge axis of the tail tensor and
/// `g^{-T}` on the edge axis of the head tensor.
pub fn gauge_transform(inst: &TnsInstance, edge_id: usize, g: &Matrix) -> Result<TnsInstance> {
    let s = inst.graph.require_edge(edge_id)?;
    let e = inst.graph.edges[s];
    if g.rows() != e.dim || g.cols() != e.dim {
        return Err(Error::Shape(format!(
            "gauge matrix is {}x{} but edge {edge_id} has dimension {}",
            g.rows(),
            g.cols(),
            e.dim
        )));
    }
    let g = g.to_field(inst.field())?;
    let inv_t = g.inverse()?.transpose();
    let mut tensors = inst.tensors.clone();
    for (end, m) in [(e.tail, &g), (e.head, &inv_t)] {
        let pos = inst.graph.vertex_pos(end).expect("validated");
        let axis = 1 + inst
            .graph
            .vertex_axes(pos)
            .iter()
            .position(|&k| k == s)
            .expect("incident");
        tensors[pos] = tensors[pos].mode_product(m, axis)?;
    }
    TnsInstance::new(inst.graph.clone(), tensors)
}

/// One step of the valence-one reduction: `removed` (joined only by `edge`)
/// is absorbed into `into`, whose factor becomes `V_removed (x) V_into` with
/// the removed index major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Merge {
    pub removed: usize,
    pub into: usize,
    pub edge: usize,
    pub removed_dim: usize,
    pub into_dim: usize,
    pub edge_dim: usize,
    pub merged_dim: usize,
}

fn apply_merge(g: &NetworkGraph, m: &Merge) -> NetworkGraph {
    let vertices = g
        .vertices
        .iter()
        .filter(|v| v.id != m.removed)
        .map(|v| {
            if v.id == m.into {
                Vertex {
                    id: v.id,
                    dim: m.merged_dim,
                }
            } else {
                *v
            }
        })
        .collect();
    let edges = g.edges.iter().filter(|e| e.id != m.edge).copied().collect();
    NetworkGraph::new(vertices, edges).expect("merge preserves validity")
}

/// Repeatedly absorbs a valence-one vertex `v` with `dim v <= dim e` into its
/// neighbour, lowest vertex id first. The set of contracted tensors is
/// unchanged up to regrouping factors (see [`fold_into_reduced`]).
pub fn reduce_valence_one(g: &NetworkGraph) -> (NetworkGraph, Vec<Merge>) {
    let mut cur = g.clone();
    let mut log = Vec::new();
    loop {
        let candidate = (0..cur.vertices.len()).find_map(|pos| {
            let inc = cur.incident(pos);
            if inc.len() != 1 {
                return None;
            }
            let e = cur.edges[inc[0]];
            let v = cur.vertices[pos];
            (v.dim <= e.dim).then(|| {
                let into = e.other_end(v.id);
                let into_dim = cur.vertices[cur.vertex_pos(into).expect("validated")].dim;
                Merge {
                    removed: v.id,
                    into,
                    edge: e.id,
                    removed_dim: v.dim,
                    into_dim,
                    edge_dim: e.dim,
                    merged_dim: v.dim * into_dim,
                }
            })
        });
        match candidate {
            Some(m) => {
                cur = apply_merge(&cur, &m);
                log.push(m);
            }
            None => return (cur, log),
        }
    }
}

fn replay(original: &NetworkGraph, log: &[Merge]) -> Vec<NetworkGraph> {
    let mut graphs = vec![original.clone()];
    for m in log {
        let next = apply_merge(graphs.last().expect("nonempty"), m);
        graphs.push(next);
    }
    graphs
}

/// Regroups a tensor on the factors of `original` into the factors of the
/// reduced graph described by `log`.
pub fn fold_into_reduced(original: &NetworkGraph, log: &[Merge], t: &Tensor) -> Result<Tensor> {
    if t.shape() != original.vertex_dims().as_slice() {
        return Err(Error::Shape(
            "tensor does not match the original graph".into(),
        ));
    }
    let graphs = replay(original, log);
    let mut cur = t.clone();
    for (k, m) in log.iter().enumerate() {
        let (before, after) = (&graphs[k], &graphs[k + 1]);
        let mut perm = Vec::new();
        for v in &after.vertices {
            if v.id == m.into {
                perm.push(before.vertex_pos(m.removed).expect("present"));
            }
            perm.push(before.vertex_pos(v.id).expect("present"));
        }
        cur = cur.permute(&perm)?.reshape(&after.vertex_dims())?;
    }
    Ok(cur)
}

/// Builds an instance of `original` whose contraction, regrouped by
/// [`fold_into_reduced`], equals the contraction of `reduced`. Each removed
/// vertex gets the identity embedding `V_removed -> E` and its neighbour
/// carries the merged data.
pub fn lift_reduced_instance(
    original: &NetworkGraph,
    log: &[Merge],
    reduced: &TnsInstance,
) -> Result<TnsInstance> {
    let graphs = replay(original, log);
    if graphs.last() != Some(&reduced.graph) {
        return Err(Error::Graph(
            "instance graph does not match the merge log".into(),
        ));
    }
    let field = reduced.field();
    let mut inst = reduced.clone();
    for (k, m) in log.iter().enumerate().rev() {
        let (before, after) = (&graphs[k], &graphs[k + 1]);
        let s = before.edge_pos(m.edge).expect("present");
        let tensors = (0..before.vertices.len())
            .map(|pos| {
                let id = before.vertices[pos].id;
                let shape = before.tensor_shape(pos);
                if id == m.removed {
                    return Tensor::from_fn(&shape, field, |i| {
                        Scalar::from_i64((i[0] == i[1]) as i64, field)
                    });
                }
                let src = &inst.tensors[after.vertex_pos(id).expect("present")];
                if id != m.into {
                    return src.clone();
                }
                let axes = before.vertex_axes(pos);
                let s_axis = 1 + axes.iter().position(|&a| a == s).expect("incident");
                Tensor::from_fn(&shape, field, |i| {
                    let r = i[s_axis];
                    if r >= m.removed_dim {
                        return Scalar::zero(field);
                    }
                    let mut j = vec![r * m.into_dim + i[0]];
                    j.extend(
                        i.iter()
                            .enumerate()
                            .skip(1)
                            .filter(|&(a, _)| a != s_axis)
                            .map(|(_, &x)| x),
                    );
                    src.get(&j).clone()
                })
            })
            .collect();
        inst = TnsInstance::new(before.clone(), tensors)?;
    }
    Ok(inst)
}

/// Replaces each `v_j` by `f_j = min(v_j, prod of incident e_s)`; the offset
/// is `sum f_j (v_j - f_j)`.
pub fn supercritical_truncate(g: &NetworkGraph) -> (NetworkGraph, u64) {
    let mut offset = 0u64;
    let vertices = (0..g.vertices.len())
        .map(|pos| {
            let v = g.vertices[pos];
            let f = v.dim.min(g.incident_product(pos));
            offset += (f as u64) * ((v.dim - f) as u64);
            Vertex { id: v.id, dim: f }
        })
        .collect();
    let out = NetworkGraph::new(vertices, g.edges.clone()).expect("dims stay positive");
    (out, offset)
}

/// Closed-form dimension of the set of contracted tensors, when known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpectedDim {
    Known(u64),
    Unknown,
}

impl ExpectedDim {
    pub fn value(self) -> Option<u64> {
        match self {
            ExpectedDim::Known(d) => Some(d),
            ExpectedDim::Unknown => None,
        }
    }
}

/// Two vertices joined only by parallel edges: the matrices of rank at most
/// `prod e` in `V_a (x) V_b`.
fn two_vertex_dim(g: &NetworkGraph) -> Option<u64> {
    if g.vertices.len() != 2 || g.edges.is_empty() {
        return None;
    }
    let (a, b) = (g.vertices[0].dim as u64, g.vertices[1].dim as u64);
    let e = g
        .edges
        .iter()
        .fold(1u64, |acc, e| acc.saturating_mul(e.dim as u64));
    let r = e.min(a).min(b);
    Some(r * (a + b - r))
}

/// Critical cycle with `n >= 3` and all edge dims `>= 2`:
/// `sum v_j^2 - (sum e_s^2 - 1)`.
fn critical_loop_dim(g: &NetworkGraph) -> Option<u64> {
    let (walk, _) = g.cycle_order()?;
    if walk.len() < 3 || g.edges.iter().any(|e| e.dim < 2) {
        return None;
    }
    if (0..g.vertices.len()).any(|p| g.class_at(p) != VertexClass::Critical) {
        return None;
    }
    let sv: u64 = g.vertices.iter().map(|v| (v.dim as u64).pow(2)).sum();
    let se: u64 = g.edges.iter().map(|e| (e.dim as u64).pow(2)).sum();
    Some(sv - (se - 1))
}

/// Closed-form dimension: two-vertex graphs via the secant formula; other
/// graphs after supercritical truncation and valence-one reduction when they
/// collapse to a single vertex (the whole space) or a critical loop.
pub fn expected_dim(g: &NetworkGraph) -> ExpectedDim {
    if let Some(d) = two_vertex_dim(g) {
        return ExpectedDim::Known(d);
    }
    let (trunc, offset) = supercritical_truncate(g);
    let (red, _) = reduce_valence_one(&trunc);
    if red.vertices.len() == 1 && red.edges.is_empty() {
        return ExpectedDim::Known(red.vertices[0].dim as u64 + offset);
    }
    if let Some(d) = two_vertex_dim(&red).or_else(|| critical_loop_dim(&red)) {
        return ExpectedDim::Known(d + offset);
    }
    ExpectedDim::Unknown
}

/// Vertex classes keyed by vertex id.
pub fn classify_all(g: &NetworkGraph) -> BTreeMap<usize, VertexClass> {
    g.vertices
        .iter()
        .map(|v| (v.id, g.classify_vertex(v.id).expect("own vertex")))
        .collect()
}
