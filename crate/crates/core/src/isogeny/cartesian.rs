//! Families of V-graphs over a stable modular graph, and their behaviour
//! under elementary extended isogenies.

use std::collections::{BTreeMap, BTreeSet};

use crate::canon::relabel;
use crate::error::{check, Error, Result, Violation};
use crate::graph::{AGraph, FlagId, VertexId};
use crate::morphism::{CombinatorialMorphism, Contraction};
use crate::semigroup::{MonoidElement, MonoidHom};
use crate::stabilize::pushforward;

use super::{deg_graph, ExtendedIsogeny, ForgetType, Isogeny, IsogenyStep, VarietyProfile};

/// Whether `a: τ -> τ'` exhibits `τ` as the rank-0 stabilization of `τ'`.
pub fn identifies_stabilization(a: &CombinatorialMorphism) -> bool {
    if a.source.rank() != 0 || a.hom != MonoidHom::to_trivial(a.target.rank()) {
        return false;
    }
    if a.validate().is_err() {
        return false;
    }
    let Ok((s, _)) = pushforward(&a.hom, &a.target) else {
        return false;
    };
    let flags: BTreeSet<FlagId> = a.flag_map.values().copied().collect();
    let vertices: BTreeSet<VertexId> = a.vertex_map.values().copied().collect();
    flags.len() == a.flag_map.len()
        && vertices.len() == a.vertex_map.len()
        && flags.iter().copied().eq(s.flag_ids())
        && vertices.iter().copied().eq(s.vertex_ids())
        && relabel(&a.source, &a.vertex_map, &a.flag_map) == s.underlying_modular()
}

/// A stable modular graph with a finite family of V-graphs stabilizing to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartesianObject {
    pub base: AGraph,
    /// Rank of the class monoid of the members.
    pub rank: usize,
    /// `a_i: base -> τ_i`; `τ_i` is `family[i].target`.
    pub family: Vec<CombinatorialMorphism>,
}

impl CartesianObject {
    pub fn new(base: AGraph, rank: usize, family: Vec<CombinatorialMorphism>) -> Result<Self> {
        let x = CartesianObject { base, rank, family };
        x.validate()?;
        Ok(x)
    }

    /// The tensor unit: the empty graph with a one-member family.
    pub fn unit(rank: usize) -> Self {
        let empty = AGraph::empty(0);
        CartesianObject {
            family: vec![CombinatorialMorphism::inclusion(
                &empty,
                &AGraph::empty(rank),
                MonoidHom::to_trivial(rank),
            )],
            base: empty,
            rank,
        }
    }

    pub fn member(&self, i: usize) -> &AGraph {
        &self.family[i].target
    }

    pub fn members(&self) -> impl Iterator<Item = &AGraph> {
        self.family.iter().map(|a| &a.target)
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.base.rank() != 0 || !self.base.is_stable() {
            out.push(Violation::new("cart-base", "base must be a stable modular graph"));
        }
        for (i, a) in self.family.iter().enumerate() {
            if a.source != self.base || a.target.rank() != self.rank {
                out.push(Violation::new("cart-member", format!("member {i} has wrong endpoints")));
            } else if !a.target.is_stable() {
                out.push(Violation::new("cart-member", format!("member {i} is unstable")));
            } else if !identifies_stabilization(a) {
                out.push(Violation::new(
                    "cart-stabilization",
                    format!("member {i} does not stabilize to the base"),
                ));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        check(self.violations())
    }
}

/// One member `(a_i, τ_i, Φ_i)` of a cartesian family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartesianMember {
    pub a: CombinatorialMorphism,
    pub phi: ExtendedIsogeny,
    pub deg: i64,
}

impl CartesianMember {
    pub fn graph(&self) -> &AGraph {
        &self.a.target
    }
}

/// Hands out ids, preferring a suggested one when it is still free.
struct IdPool {
    used: BTreeSet<u32>,
}

impl IdPool {
    fn new(used: impl IntoIterator<Item = u32>) -> Self {
        IdPool {
            used: used.into_iter().collect(),
        }
    }

    fn take(&mut self, preferred: u32) -> u32 {
        let id = if self.used.contains(&preferred) {
            self.used.last().map_or(0, |m| m + 1)
        } else {
            preferred
        };
        self.used.insert(id);
        id
    }
}

fn flag_pool(g: &AGraph) -> IdPool {
    IdPool::new(g.flag_ids().map(|f| f.0))
}

enum Elementary<'a> {
    Contract(&'a Contraction),
    Forget(&'a super::StableForget),
    Glue(FlagId, FlagId),
}

fn classify(phi: &ExtendedIsogeny) -> Result<Elementary<'_>> {
    if !phi.is_elementary() {
        return Err(Error::Precondition("extended isogeny is not elementary".into()));
    }
    if let Some(&(f, fbar)) = phi.glued.first() {
        return Ok(Elementary::Glue(f, fbar));
    }
    Ok(match &phi.iso.steps[0] {
        IsogenyStep::Contract(c) => Elementary::Contract(c),
        IsogenyStep::Forget(s) => Elementary::Forget(s),
    })
}

/// Maps of `b ∘ (σ-side of the step)`: for each τ flag/vertex not touched by
/// the step, its image in σ'.
fn through_contraction(
    c: &Contraction,
    b: &CombinatorialMorphism,
) -> (BTreeMap<FlagId, FlagId>, BTreeMap<VertexId, VertexId>) {
    let flags = c
        .flag_map
        .iter()
        .map(|(&s, &t)| (t, b.flag_map[&s]))
        .collect();
    let vertices = c
        .vertex_map
        .iter()
        .map(|(&t, s)| (t, b.vertex_map[s]))
        .collect();
    (flags, vertices)
}

fn member(
    p: &VarietyProfile,
    tau: &AGraph,
    graph: AGraph,
    flag_map: BTreeMap<FlagId, FlagId>,
    vertex_map: BTreeMap<VertexId, VertexId>,
    phi: ExtendedIsogeny,
    target: &AGraph,
) -> Result<CartesianMember> {
    let a = CombinatorialMorphism {
        source: tau.clone(),
        hom: MonoidHom::to_trivial(graph.rank()),
        target: graph,
        flag_map,
        vertex_map,
    };
    if phi.target() != target || !a.target.is_stable() || !identifies_stabilization(&a) {
        return Err(Error::invalid(
            "cart-construction",
            "constructed member does not lift the elementary morphism",
        ));
    }
    Ok(CartesianMember {
        deg: deg_graph(p, &a.target)?,
        a,
        phi,
    })
}

/// The cartesian family of `σ'` under the elementary extended isogeny `Φ: τ -> σ`
/// of modular graphs, where `b: σ -> σ'` identifies `σ` as the rank-0
/// stabilization of `σ'`.
pub fn cartesian_pullback(
    p: &VarietyProfile,
    phi: &ExtendedIsogeny,
    b: &CombinatorialMorphism,
) -> Result<Vec<CartesianMember>> {
    let tau = &phi.source;
    let sigma_p = &b.target;
    if tau.rank() != 0 || !tau.is_stable() {
        return Err(Error::Precondition(
            "source must be a stable modular graph".into(),
        ));
    }
    if sigma_p.rank() != p.rank() {
        return Err(Error::RankMismatch {
            expected: p.rank(),
            found: sigma_p.rank(),
        });
    }
    if &b.source != phi.target() {
        return Err(Error::EndpointMismatch(
            "stabilization map does not start at the isogeny target".into(),
        ));
    }
    phi.validate()?;
    if !sigma_p.is_stable() || !identifies_stabilization(b) {
        return Err(Error::invalid(
            "cart-stabilization",
            "b does not identify its source as the stabilization of its target",
        ));
    }

    match classify(phi)? {
        Elementary::Contract(c) => {
            let e = c.contracted_edges()[0];
            let (f, fbar) = (e.lo, e.hi);
            let (v1, v2) = (tau.boundary(f), tau.boundary(fbar));
            let w0 = b.vertex_map[&c.vertex_map[&v1]];
            let (mut flags, mut vertices) = through_contraction(c, b);
            if v1 == v2 {
                let mut graph = sigma_p.clone();
                let mut pool = flag_pool(&graph);
                let (x, y) = (FlagId(pool.take(f.0)), FlagId(pool.take(fbar.0)));
                let g = graph.genus_of(w0);
                graph.set_genus(w0, g.checked_sub(1).expect("loop contracted onto genus 0"));
                graph.insert_flag(x, w0);
                graph.insert_flag(y, w0);
                graph.join(x, y);
                flags.insert(f, x);
                flags.insert(fbar, y);
                vertices.insert(v1, w0);
                let lift = ExtendedIsogeny::from_isogeny(Isogeny::identity(&graph).contract(x)?);
                Ok(vec![member(p, tau, graph, flags, vertices, lift, sigma_p)?])
            } else {
                let mut pool = flag_pool(sigma_p);
                let (x, y) = (FlagId(pool.take(f.0)), FlagId(pool.take(fbar.0)));
                let w2 = sigma_p.fresh_vertex();
                vertices.insert(v1, w0);
                vertices.insert(v2, w2);
                flags.insert(f, x);
                flags.insert(fbar, y);
                let moved: Vec<FlagId> = flags
                    .iter()
                    .filter(|(&t, _)| tau.boundary(t) == v2 && t != fbar)
                    .map(|(_, &s)| s)
                    .collect();
                let mut out = Vec::new();
                for (c1, c2) in sigma_p.class_of(w0).pair_decompositions() {
                    let mut graph = sigma_p.clone();
                    graph.set_genus(w0, tau.genus_of(v1));
                    graph.set_class(w0, c1);
                    graph.insert_vertex(w2, tau.genus_of(v2), c2);
                    for &z in &moved {
                        graph.move_flag(z, w2);
                    }
                    graph.insert_flag(x, w0);
                    graph.insert_flag(y, w2);
                    graph.join(x, y);
                    assert!(graph.is_stable(), "a split of a stable rank-0 vertex is stable");
                    let lift =
                        ExtendedIsogeny::from_isogeny(Isogeny::identity(&graph).contract(x)?);
                    out.push(member(
                        p,
                        tau,
                        graph,
                        flags.clone(),
                        vertices.clone(),
                        lift,
                        sigma_p,
                    )?);
                }
                Ok(out)
            }
        }
        Elementary::Forget(s) => {
            let f = s.forgotten;
            // σ sits inside τ with the same ids
            let mut flags: BTreeMap<FlagId, FlagId> = s
                .target
                .flag_ids()
                .map(|x| (x, b.flag_map[&x]))
                .collect();
            let mut vertices: BTreeMap<VertexId, VertexId> = s
                .target
                .vertex_ids()
                .map(|v| (v, b.vertex_map[&v]))
                .collect();
            let mut graph = sigma_p.clone();
            let mut pool = flag_pool(&graph);
            let v = tau.boundary(f);
            let nf = FlagId(pool.take(f.0));
            flags.insert(f, nf);
            match s.kind {
                ForgetType::I => {
                    graph.insert_flag(nf, vertices[&v]);
                }
                ForgetType::II | ForgetType::III => {
                    let nv = if graph.has_vertex(v) {
                        graph.fresh_vertex()
                    } else {
                        v
                    };
                    vertices.insert(v, nv);
                    graph.insert_vertex(nv, 0, MonoidElement::zero(graph.rank()));
                    graph.insert_flag(nf, nv);
                    let mut others: Vec<FlagId> =
                        tau.flags_at(v).into_iter().filter(|&x| x != f).collect();
                    // the edge flag first, so its far end is the anchor in σ'
                    others.sort_by_key(|&x| (tau.is_tail(x), x));
                    let anchor_in_sigma = tau.partner(others[0]);
                    let y = b.flag_map[&anchor_in_sigma];
                    let n0 = FlagId(pool.take(others[0].0));
                    let n1 = FlagId(pool.take(others[1].0));
                    graph.insert_flag(n0, nv);
                    graph.insert_flag(n1, nv);
                    flags.insert(others[0], n0);
                    flags.insert(others[1], n1);
                    if graph.is_tail(y) {
                        graph.join(n0, y);
                    } else {
                        let x = graph.partner(y);
                        graph.detach(y);
                        graph.join(n0, y);
                        graph.join(n1, x);
                    }
                }
                ForgetType::IV => {
                    return Err(Error::Precondition(
                        "forgetting a whole component is not an isogeny".into(),
                    ))
                }
            }
            let lift = ExtendedIsogeny::from_isogeny(Isogeny::identity(&graph).forget(nf)?);
            Ok(vec![member(p, tau, graph, flags, vertices, lift, sigma_p)?])
        }
        Elementary::Glue(f, fbar) => {
            let _ = fbar;
            let y = b.flag_map[&f];
            if sigma_p.is_tail(y) {
                return Err(Error::invalid(
                    "cart-stabilization",
                    "glued edge is a tail in the stabilized graph",
                ));
            }
            let x = sigma_p.partner(y);
            let mut graph = sigma_p.clone();
            graph.detach(y);
            let flags: BTreeMap<FlagId, FlagId> =
                tau.flag_ids().map(|t| (t, b.flag_map[&t])).collect();
            let vertices: BTreeMap<VertexId, VertexId> =
                tau.vertex_ids().map(|v| (v, b.vertex_map[&v])).collect();
            let lift = ExtendedIsogeny::gluing(&graph, &[(y, x)])?;
            Ok(vec![member(p, tau, graph, flags, vertices, lift, sigma_p)?])
        }
    }
}

/// An elementary morphism of cartesian objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryCartesianMorphism {
    pub source: CartesianObject,
    pub target: CartesianObject,
    pub base: ExtendedIsogeny,
    /// `λ: I -> J`.
    pub index_map: Vec<usize>,
    /// `Φ_i: τ_i -> σ_{λ(i)}`.
    pub lifts: Vec<ExtendedIsogeny>,
}

impl ElementaryCartesianMorphism {
    /// Packages a cartesian family over the single-member target `(σ, b)`.
    pub fn from_pullback(
        base: &ExtendedIsogeny,
        b: &CombinatorialMorphism,
        family: &[CartesianMember],
    ) -> Self {
        ElementaryCartesianMorphism {
            source: CartesianObject {
                base: base.source.clone(),
                rank: b.target.rank(),
                family: family.iter().map(|m| m.a.clone()).collect(),
            },
            target: CartesianObject {
                base: b.source.clone(),
                rank: b.target.rank(),
                family: vec![b.clone()],
            },
            base: base.clone(),
            index_map: vec![0; family.len()],
            lifts: family.iter().map(|m| m.phi.clone()).collect(),
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = self.source.violations();
        out.extend(self.target.violations());
        if !self.base.is_elementary() {
            out.push(Violation::new("cart-elementary", "base isogeny is not elementary"));
        }
        if self.base.source != self.source.base || self.base.target() != &self.target.base {
            out.push(Violation::new("cart-endpoints", "base isogeny has wrong endpoints"));
        }
        out.extend(self.base.violations());
        let n = self.source.family.len();
        if self.index_map.len() != n || self.lifts.len() != n {
            out.push(Violation::new("cart-shape", "index map or lifts have the wrong length"));
        }
        if !out.is_empty() {
            return out;
        }
        for (i, (&j, lift)) in self.index_map.iter().zip(&self.lifts).enumerate() {
            if j >= self.target.family.len() {
                out.push(Violation::new("cart-shape", format!("index {i} maps outside the target family")));
                return out;
            }
            if &lift.source != self.source.member(i) || lift.target() != self.target.member(j) {
                out.push(Violation::new("cart-endpoints", format!("lift {i} has wrong endpoints")));
            }
            out.extend(lift.violations());
        }
        if !out.is_empty() {
            return out;
        }
        for j in 0..self.target.family.len() {
            let fibre: Vec<usize> = (0..n).filter(|&i| self.index_map[i] == j).collect();
            out.extend(self.fibre_violations(j, &fibre));
        }
        out
    }

    fn fibre_violations(&self, j: usize, fibre: &[usize]) -> Vec<Violation> {
        let mut out = Vec::new();
        let b = &self.target.family[j];
        let tau = &self.base.source;
        let a = |i: usize| &self.source.family[i];
        let singleton = |out: &mut Vec<Violation>| {
            if fibre.len() != 1 {
                out.push(Violation::new(
                    "cart-singleton",
                    format!("fibre over {j} must have exactly one member"),
                ));
                false
            } else {
                true
            }
        };
        let Ok(kind) = classify(&self.base) else {
            return out;
        };
        match kind {
            Elementary::Contract(c) => {
                let e = c.contracted_edges()[0];
                let (v1, v2) = (tau.boundary(e.lo), tau.boundary(e.hi));
                let w0 = b.vertex_map[&c.vertex_map[&v1]];
                for &i in fibre {
                    let lift = &self.lifts[i];
                    let ok = lift.glued.is_empty()
                        && matches!(lift.iso.steps.as_slice(), [IsogenyStep::Contract(d)]
                            if d.contracted_edges() == vec![crate::graph::Edge::new(a(i).flag_map[&e.lo], a(i).flag_map[&e.hi])]
                            && d.vertex_map[&a(i).vertex_map[&v1]] == w0);
                    if !ok {
                        out.push(Violation::new(
                            "cart-contraction",
                            format!("lift {i} does not contract exactly the lifted edge onto its image"),
                        ));
                    }
                }
                if v1 == v2 {
                    singleton(&mut out);
                } else {
                    let wanted = self.target.member(j).class_of(w0).pair_decompositions();
                    let mut seen = BTreeSet::new();
                    for &i in fibre {
                        let g = self.source.member(i);
                        let pair = (
                            g.class_of(a(i).vertex_map[&v1]).clone(),
                            g.class_of(a(i).vertex_map[&v2]).clone(),
                        );
                        if !wanted.contains(&pair) {
                            out.push(Violation::new(
                                "cart-class",
                                format!("lift {i} splits the class into a pair with the wrong sum"),
                            ));
                        } else if !seen.insert(pair) {
                            out.push(Violation::new(
                                "repetitive",
                                format!("class split of lift {i} occurs twice"),
                            ));
                        }
                    }
                    if wanted.iter().any(|w| !seen.contains(w)) {
                        out.push(Violation::new(
                            "incomplete list",
                            "some class split is missing from the family",
                        ));
                    }
                }
            }
            Elementary::Forget(s) => {
                if singleton(&mut out) {
                    let i = fibre[0];
                    let ok = self.lifts[i].glued.is_empty()
                        && matches!(self.lifts[i].iso.steps.as_slice(), [IsogenyStep::Forget(t)]
                            if t.forgotten == a(i).flag_map[&s.forgotten]);
                    if !ok {
                        out.push(Violation::new(
                            "cart-forget",
                            format!("lift {i} must stably forget the lifted tail and nothing else"),
                        ));
                    }
                }
            }
            Elementary::Glue(..) => {
                if singleton(&mut out) {
                    let i = fibre[0];
                    let lift = &self.lifts[i];
                    if lift.glued.len() != 1 || !lift.iso.steps.is_empty() {
                        out.push(Violation::new(
                            "cart-glue",
                            format!("lift {i} must glue one pair of tails and nothing else"),
                        ));
                    }
                    // Φ_0 ∘ a_0 = b ∘ c, with both gluings identities on ids
                    let commutes = tau.flag_ids().all(|t| {
                        lift.glue.flag_map.get(&a(i).flag_map[&t])
                            == b.flag_map.get(&self.base.glue.flag_map[&t])
                    }) && tau.vertex_ids().all(|v| {
                        lift.glue.vertex_map.get(&a(i).vertex_map[&v])
                            == b.vertex_map.get(&self.base.glue.vertex_map[&v])
                    });
                    if !commutes {
                        out.push(Violation::new(
                            "cart-glue",
                            format!("gluing square does not commute for lift {i}"),
                        ));
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        check(self.violations())
    }
}

/// A morphism of cartesian objects with its factorization into elementary
/// morphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartesianMorphism {
    pub source: CartesianObject,
    pub target: CartesianObject,
    pub factors: Vec<ElementaryCartesianMorphism>,
}

pub fn validate_cartesian_morphism(m: &CartesianMorphism) -> Result<()> {
    let mut out = Vec::new();
    if m.factors.is_empty() && m.source != m.target {
        out.push(Violation::new(
            "missing witness",
            "no factorization into elementary morphisms is stored",
        ));
    }
    let mut current = &m.source;
    for (k, factor) in m.factors.iter().enumerate() {
        if &factor.source != current {
            out.push(Violation::new(
                "cart-chain",
                format!("factor {k} does not start where the previous ended"),
            ));
        }
        out.extend(factor.violations());
        current = &factor.target;
    }
    if current != &m.target {
        out.push(Violation::new("cart-chain", "factors do not end at the target"));
    }
    check(out)
}

/// Family indexed by the disjoint union of the two index sets.
pub fn oplus(x: &CartesianObject, y: &CartesianObject) -> Result<CartesianObject> {
    if x.base != y.base || x.rank != y.rank {
        return Err(Error::EndpointMismatch(
            "direct sum needs the same base graph".into(),
        ));
    }
    let mut family = x.family.clone();
    family.extend(y.family.iter().cloned());
    Ok(CartesianObject {
        base: x.base.clone(),
        rank: x.rank,
        family,
    })
}

/// Disjoint unions of bases and of all pairs of members.
pub fn otimes(x: &CartesianObject, y: &CartesianObject) -> Result<CartesianObject> {
    if x.rank != y.rank {
        return Err(Error::RankMismatch {
            expected: x.rank,
            found: y.rank,
        });
    }
    let base = x.base.disjoint_union(&y.base)?;
    let mut family = Vec::with_capacity(x.family.len() * y.family.len());
    for a in &x.family {
        for b in &y.family {
            let target = a.target.disjoint_union(&b.target)?;
            let mut flag_map = a.flag_map.clone();
            let mut vertex_map = a.vertex_map.clone();
            for (f, g) in &b.flag_map {
                flag_map.insert(
                    FlagId(f.0 + base.flag_shift),
                    FlagId(g.0 + target.flag_shift),
                );
            }
            for (v, w) in &b.vertex_map {
                vertex_map.insert(
                    VertexId(v.0 + base.vertex_shift),
                    VertexId(w.0 + target.vertex_shift),
                );
            }
            family.push(CombinatorialMorphism {
                source: base.graph.clone(),
                target: target.graph,
                hom: MonoidHom::to_trivial(x.rank),
                flag_map,
                vertex_map,
            });
        }
    }
    Ok(CartesianObject {
        base: base.graph,
        rank: x.rank,
        family,
    })
}

/// Splits a family by the degree of its members.
pub fn homogeneous_decomposition(
    p: &VarietyProfile,
    x: &CartesianObject,
) -> Result<BTreeMap<i64, CartesianObject>> {
    let mut parts: BTreeMap<i64, CartesianObject> = BTreeMap::new();
    for a in &x.family {
        let d = deg_graph(p, &a.target)?;
        parts
            .entry(d)
            .or_insert_with(|| CartesianObject {
                base: x.base.clone(),
                rank: x.rank,
                family: Vec::new(),
            })
            .family
            .push(a.clone());
    }
    Ok(parts)
}
