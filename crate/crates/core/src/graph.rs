//! Modular graphs with an `N^k`-structure.
//!
//! A graph is a set of flags (half-edges) and a set of vertices, a boundary
//! map sending every flag to its vertex, and an involution on flags. Fixed
//! points of the involution are tails, two-element orbits are edges. Each
//! vertex carries a genus and a class in `N^k`; a plain modular graph is the
//! rank-0 case.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result, Violation};
use crate::semigroup::{MonoidElement, MonoidHom};
use crate::util::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FlagId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for FlagId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// An edge as an unordered pair of flags, stored with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub lo: FlagId,
    pub hi: FlagId,
}

impl Edge {
    pub fn new(a: FlagId, b: FlagId) -> Self {
        if a <= b {
            Edge { lo: a, hi: b }
        } else {
            Edge { lo: b, hi: a }
        }
    }

    pub fn contains(&self, f: FlagId) -> bool {
        self.lo == f || self.hi == f
    }

    pub fn other(&self, f: FlagId) -> FlagId {
        if self.lo == f {
            self.hi
        } else {
            self.lo
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub genus: u32,
    pub class: MonoidElement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Flag {
    vertex: VertexId,
    partner: FlagId,
}

/// A modular graph with `N^k`-structure (an "A-graph").
///
/// Ids are opaque; two graphs are isomorphic when they agree after a
/// relabelling, see [`crate::canon`]. Equality (`==`) is literal equality of
/// the labelled data.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AGraph {
    rank: usize,
    vertices: BTreeMap<VertexId, Vertex>,
    flags: BTreeMap<FlagId, Flag>,
}

/// Equivalence classes of flags under the closure of "partner of" and
/// "shares a vertex of genus 0 and class 0".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagPartition {
    blocks: Vec<Vec<FlagId>>,
    block_of: BTreeMap<FlagId, usize>,
}

impl FlagPartition {
    pub fn blocks(&self) -> &[Vec<FlagId>] {
        &self.blocks
    }

    pub fn block_of(&self, f: FlagId) -> Option<usize> {
        self.block_of.get(&f).copied()
    }

    pub fn same_block(&self, a: FlagId, b: FlagId) -> bool {
        match (self.block_of(a), self.block_of(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }
}

impl AGraph {
    /// One genus-0 vertex with class 0 and three tails.
    pub fn tripod(rank: usize) -> Self {
        let mut b = GraphBuilder::new(rank);
        let v = b.vertex(0, &vec![0; rank]);
        for _ in 0..3 {
            b.tail(v);
        }
        b.build()
    }

    pub fn empty(rank: usize) -> Self {
        AGraph {
            rank,
            vertices: BTreeMap::new(),
            flags: BTreeMap::new(),
        }
    }

    /// Builds and validates a graph from its raw structure maps.
    pub fn from_parts(
        rank: usize,
        vertices: impl IntoIterator<Item = (VertexId, Vertex)>,
        boundary: &BTreeMap<FlagId, VertexId>,
        involution: &BTreeMap<FlagId, FlagId>,
    ) -> Result<Self> {
        let mut violations = Vec::new();
        let mut vmap = BTreeMap::new();
        for (id, v) in vertices {
            if v.class.rank() != rank {
                violations.push(Violation::new(
                    "class-rank",
                    format!("class of {id} has rank {}, expected {rank}", v.class.rank()),
                ));
            }
            if vmap.insert(id, v).is_some() {
                violations.push(Violation::new("duplicate-id", format!("vertex {id} repeated")));
            }
        }
        let mut flags = BTreeMap::new();
        for (&f, &v) in boundary {
            if !vmap.contains_key(&v) {
                violations.push(Violation::new(
                    "boundary-total",
                    format!("flag {f} is attached to unknown vertex {v}"),
                ));
            }
            let partner = match involution.get(&f) {
                Some(&p) => p,
                None => {
                    violations.push(Violation::new(
                        "j-total",
                        format!("involution undefined on {f}"),
                    ));
                    f
                }
            };
            flags.insert(f, Flag { vertex: v, partner });
        }
        for (&f, &p) in involution {
            if !boundary.contains_key(&f) {
                violations.push(Violation::new(
                    "boundary-total",
                    format!("flag {f} has no boundary vertex"),
                ));
                continue;
            }
            if involution.get(&p) != Some(&f) {
                violations.push(Violation::new(
                    "j-involution",
                    format!("j({f}) = {p} but j({p}) != {f}"),
                ));
            }
        }
        check(violations)?;
        Ok(AGraph {
            rank,
            vertices: vmap,
            flags,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_flags(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.flags.is_empty()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    pub fn flag_ids(&self) -> impl Iterator<Item = FlagId> + '_ {
        self.flags.keys().copied()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains_key(&v)
    }

    pub fn has_flag(&self, f: FlagId) -> bool {
        self.flags.contains_key(&f)
    }

    pub fn vertex(&self, v: VertexId) -> Result<&Vertex> {
        self.vertices.get(&v).ok_or(Error::UnknownVertex(v))
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, &Vertex)> + '_ {
        self.vertices.iter().map(|(&id, v)| (id, v))
    }

    pub fn genus_of(&self, v: VertexId) -> u32 {
        self.vertices[&v].genus
    }

    pub fn class_of(&self, v: VertexId) -> &MonoidElement {
        &self.vertices[&v].class
    }

    /// Boundary vertex of a flag. Panics on an unknown flag.
    pub fn boundary(&self, f: FlagId) -> VertexId {
        self.flags[&f].vertex
    }

    /// Involution on flags. Panics on an unknown flag.
    pub fn partner(&self, f: FlagId) -> FlagId {
        self.flags[&f].partner
    }

    pub fn try_boundary(&self, f: FlagId) -> Result<VertexId> {
        self.flags.get(&f).map(|x| x.vertex).ok_or(Error::UnknownFlag(f))
    }

    pub fn try_partner(&self, f: FlagId) -> Result<FlagId> {
        self.flags.get(&f).map(|x| x.partner).ok_or(Error::UnknownFlag(f))
    }

    pub fn is_tail(&self, f: FlagId) -> bool {
        self.flags.get(&f).is_some_and(|x| x.partner == f)
    }

    pub fn flags_at(&self, v: VertexId) -> Vec<FlagId> {
        self.flags
            .iter()
            .filter(|(_, x)| x.vertex == v)
            .map(|(&f, _)| f)
            .collect()
    }

    pub fn tails(&self) -> Vec<FlagId> {
        self.flags
            .iter()
            .filter(|(&f, x)| x.partner == f)
            .map(|(&f, _)| f)
            .collect()
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.flags
            .iter()
            .filter(|(&f, x)| x.partner > f)
            .map(|(&f, x)| Edge::new(f, x.partner))
            .collect()
    }

    pub fn edge_of(&self, f: FlagId) -> Result<Edge> {
        let p = self.try_partner(f)?;
        if p == f {
            Err(Error::NotAnEdge(f))
        } else {
            Ok(Edge::new(f, p))
        }
    }

    pub fn is_loop(&self, e: Edge) -> bool {
        self.boundary(e.lo) == self.boundary(e.hi)
    }

    pub fn valence(&self, v: VertexId) -> Result<usize> {
        self.vertex(v)?;
        Ok(self.flags.values().filter(|x| x.vertex == v).count())
    }

    pub fn max_flag_id(&self) -> Option<FlagId> {
        self.flags.keys().next_back().copied()
    }

    pub fn max_vertex_id(&self) -> Option<VertexId> {
        self.vertices.keys().next_back().copied()
    }

    /// First unused flag id above every id in use.
    pub fn fresh_flag(&self) -> FlagId {
        FlagId(self.max_flag_id().map_or(0, |f| f.0 + 1))
    }

    pub fn fresh_vertex(&self) -> VertexId {
        VertexId(self.max_vertex_id().map_or(0, |v| v.0 + 1))
    }

    /// Connected components of the geometric realization, as sorted vertex lists.
    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let ids: Vec<VertexId> = self.vertex_ids().collect();
        let index: BTreeMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = UnionFind::new(ids.len());
        for e in self.edges() {
            uf.union(index[&self.boundary(e.lo)], index[&self.boundary(e.hi)]);
        }
        uf.classes()
            .into_iter()
            .map(|c| c.into_iter().map(|i| ids[i]).collect())
            .collect()
    }

    pub fn num_components(&self) -> usize {
        self.connected_components().len()
    }

    /// Cycle rank `#E - #V + #components` of the geometric realization.
    pub fn betti1(&self) -> usize {
        self.edges().len() + self.num_components() - self.num_vertices()
    }

    /// `χ(|τ|) - Σ g(v)`; the empty graph has `χ = 0`.
    pub fn euler_characteristic(&self) -> i64 {
        let top = self.num_components() as i64 - self.betti1() as i64;
        top - self.vertices.values().map(|v| i64::from(v.genus)).sum::<i64>()
    }

    /// `1 - χ`, defined for non-empty connected graphs.
    pub fn genus(&self) -> Result<u64> {
        match self.num_components() {
            0 => Err(Error::Precondition("genus of the empty graph".into())),
            1 => Ok((1 - self.euler_characteristic()) as u64),
            n => Err(Error::Precondition(format!(
                "genus of a disconnected graph ({n} components)"
            ))),
        }
    }

    pub fn total_class(&self) -> MonoidElement {
        self.vertices
            .values()
            .fold(MonoidElement::zero(self.rank), |acc, v| &acc + &v.class)
    }

    pub fn is_stable_vertex(&self, v: VertexId) -> Result<bool> {
        let data = self.vertex(v)?;
        Ok(!data.class.is_zero() || 2 * data.genus as usize + self.valence(v)? >= 3)
    }

    pub fn is_stable(&self) -> bool {
        self.vertex_ids()
            .all(|v| self.is_stable_vertex(v).unwrap_or(false))
    }

    pub fn unstable_vertices(&self) -> Vec<VertexId> {
        self.vertex_ids()
            .filter(|&v| !self.is_stable_vertex(v).unwrap_or(true))
            .collect()
    }

    /// Vertex of genus 0 and class 0.
    pub fn is_null_vertex(&self, v: VertexId) -> bool {
        let d = &self.vertices[&v];
        d.genus == 0 && d.class.is_zero()
    }

    pub fn flag_partition(&self) -> FlagPartition {
        let ids: Vec<FlagId> = self.flag_ids().collect();
        let index: BTreeMap<FlagId, usize> =
            ids.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let mut uf = UnionFind::new(ids.len());
        for (&f, x) in &self.flags {
            uf.union(index[&f], index[&x.partner]);
        }
        for v in self.vertex_ids().filter(|&v| self.is_null_vertex(v)) {
            let at = self.flags_at(v);
            for w in at.windows(2) {
                uf.union(index[&w[0]], index[&w[1]]);
            }
        }
        let blocks: Vec<Vec<FlagId>> = uf
            .classes()
            .into_iter()
            .map(|c| c.into_iter().map(|i| ids[i]).collect())
            .collect();
        let block_of = blocks
            .iter()
            .enumerate()
            .flat_map(|(b, fs)| fs.iter().map(move |&f| (f, b)))
            .collect();
        FlagPartition { blocks, block_of }
    }

    /// No cycles and every genus zero.
    pub fn is_forest(&self) -> bool {
        self.betti1() == 0 && self.vertices.values().all(|v| v.genus == 0)
    }

    /// Same graph with every class pushed along `h`.
    pub fn map_classes(&self, h: &MonoidHom) -> Result<AGraph> {
        if h.source_rank() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: h.source_rank(),
            });
        }
        let mut out = AGraph::empty(h.target_rank());
        out.flags = self.flags.clone();
        for (&id, v) in &self.vertices {
            out.vertices.insert(
                id,
                Vertex {
                    genus: v.genus,
                    class: h.apply(&v.class)?,
                },
            );
        }
        Ok(out)
    }

    /// The underlying modular graph (all classes forgotten, rank 0).
    pub fn underlying_modular(&self) -> AGraph {
        self.map_classes(&MonoidHom::to_trivial(self.rank))
            .expect("rank checked")
    }

    /// Disjoint union; ids of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &AGraph) -> Result<DisjointUnion> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: other.rank,
            });
        }
        let flag_shift = self.fresh_flag().0;
        let vertex_shift = self.fresh_vertex().0;
        let mut graph = self.clone();
        for (&id, v) in &other.vertices {
            graph.vertices.insert(VertexId(id.0 + vertex_shift), v.clone());
        }
        for (&f, x) in &other.flags {
            graph.flags.insert(
                FlagId(f.0 + flag_shift),
                Flag {
                    vertex: VertexId(x.vertex.0 + vertex_shift),
                    partner: FlagId(x.partner.0 + flag_shift),
                },
            );
        }
        Ok(DisjointUnion {
            graph,
            flag_shift,
            vertex_shift,
        })
    }

    // ---- crate-internal mutation, used by the constructions ----

    pub(crate) fn insert_vertex(&mut self, id: VertexId, genus: u32, class: MonoidElement) {
        debug_assert_eq!(class.rank(), self.rank);
        self.vertices.insert(id, Vertex { genus, class });
    }

    pub(crate) fn set_genus(&mut self, v: VertexId, genus: u32) {
        self.vertices.get_mut(&v).expect("vertex").genus = genus;
    }

    pub(crate) fn set_class(&mut self, v: VertexId, class: MonoidElement) {
        self.vertices.get_mut(&v).expect("vertex").class = class;
    }

    pub(crate) fn remove_vertex(&mut self, v: VertexId) {
        self.vertices.remove(&v);
    }

    /// Inserts a flag as a tail.
    pub(crate) fn insert_flag(&mut self, f: FlagId, v: VertexId) {
        self.flags.insert(
            f,
            Flag {
                vertex: v,
                partner: f,
            },
        );
    }

    /// Removes a flag; its partner, if any, becomes a tail.
    pub(crate) fn remove_flag(&mut self, f: FlagId) {
        if let Some(x) = self.flags.remove(&f) {
            if x.partner != f {
                if let Some(p) = self.flags.get_mut(&x.partner) {
                    p.partner = x.partner;
                }
            }
        }
    }

    pub(crate) fn move_flag(&mut self, f: FlagId, v: VertexId) {
        self.flags.get_mut(&f).expect("flag").vertex = v;
    }

    /// Makes `a` and `b` partners, turning their previous partners into tails.
    pub(crate) fn join(&mut self, a: FlagId, b: FlagId) {
        for f in [a, b] {
            let p = self.flags[&f].partner;
            if p != f {
                self.flags.get_mut(&p).expect("flag").partner = p;
            }
        }
        self.flags.get_mut(&a).expect("flag").partner = b;
        self.flags.get_mut(&b).expect("flag").partner = a;
    }

    pub(crate) fn detach(&mut self, f: FlagId) {
        let p = self.flags[&f].partner;
        self.flags.get_mut(&f).expect("flag").partner = f;
        self.flags.get_mut(&p).expect("flag").partner = p;
    }

    pub fn boundary_map(&self) -> BTreeMap<FlagId, VertexId> {
        self.flags.iter().map(|(&f, x)| (f, x.vertex)).collect()
    }

    pub fn involution_map(&self) -> BTreeMap<FlagId, FlagId> {
        self.flags.iter().map(|(&f, x)| (f, x.partner)).collect()
    }
}

/// Result of [`AGraph::disjoint_union`]: ids of the right operand are shifted.
#[derive(Clone, Debug)]
pub struct DisjointUnion {
    pub graph: AGraph,
    pub flag_shift: u32,
    pub vertex_shift: u32,
}

impl DisjointUnion {
    pub fn right_flag(&self, f: FlagId) -> FlagId {
        FlagId(f.0 + self.flag_shift)
    }

    pub fn right_vertex(&self, v: VertexId) -> VertexId {
        VertexId(v.0 + self.vertex_shift)
    }
}

impl fmt::Debug for AGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AGraph(rank {}) {{", self.rank)?;
        for (&v, data) in &self.vertices {
            write!(f, " {v}[g={} β={}]:", data.genus, data.class)?;
            for fl in self.flags_at(v) {
                let p = self.partner(fl);
                if p == fl {
                    write!(f, " {fl}")?;
                } else {
                    write!(f, " {fl}-{p}")?;
                }
            }
            write!(f, ";")?;
        }
        write!(f, " }}")
    }
}

/// Convenience builder with automatically numbered ids.
///
/// ```
/// use modgraph::graph::GraphBuilder;
/// let mut b = GraphBuilder::new(1);
/// let v = b.vertex(0, &[0]);
/// for _ in 0..3 { b.tail(v); }
/// let tripod = b.build();
/// assert_eq!(tripod.tails().len(), 3);
/// ```
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    graph: AGraph,
}

impl GraphBuilder {
    pub fn new(rank: usize) -> Self {
        GraphBuilder {
            graph: AGraph::empty(rank),
        }
    }

    pub fn vertex(&mut self, genus: u32, class: &[u64]) -> VertexId {
        assert_eq!(class.len(), self.graph.rank, "class rank");
        let id = self.graph.fresh_vertex();
        self.graph
            .insert_vertex(id, genus, MonoidElement::new(class.to_vec()));
        id
    }

    pub fn tail(&mut self, v: VertexId) -> FlagId {
        let f = self.graph.fresh_flag();
        self.graph.insert_flag(f, v);
        f
    }

    pub fn edge(&mut self, v: VertexId, w: VertexId) -> (FlagId, FlagId) {
        let a = self.tail(v);
        let b = self.tail(w);
        self.graph.join(a, b);
        (a, b)
    }

    pub fn build(self) -> AGraph {
        self.graph
    }
}
