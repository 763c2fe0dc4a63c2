//! Isogenies of stable graphs and the bookkeeping attached to a target variety.
//!
//! A [`VarietyProfile`] is the numerical shadow of a smooth projective
//! variety `V`: its dimension, the canonical class and an ample class, both
//! as linear forms on the class monoid. That is enough to evaluate
//! [`dim_graph`] and [`deg_graph`].
//!
//! Isogenies are built from elementary steps: stably forgetting a tail
//! ([`stably_forget_tail`]) and contracting a single edge. Extended
//! isogenies first glue pairs of tails into edges.

mod cartesian;
mod enumerate;

pub use cartesian::{
    cartesian_pullback, homogeneous_decomposition, identifies_stabilization, oplus, otimes, validate_cartesian_morphism,
    CartesianMember, CartesianMorphism, CartesianObject, ElementaryCartesianMorphism,
};
pub use enumerate::{
    enumerate_stable_graphs, is_admissible_member, AdmissibleFilter, EnumerationConstraints,
    DEFAULT_ENUMERATION_CAP,
};

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{check, Error, Result, Violation};
use crate::graph::{AGraph, FlagId};
use crate::morphism::{contract_edges, forget_tail, glue_tails, CombinatorialMorphism, Contraction};
use crate::pullback::{compose_marked, lift_combinatorial, lift_contraction, MarkedMorphism};
use crate::semigroup::{LinearForm, MonoidHom};
use crate::stabilize::{pushforward, stabilize, StabilizationCase};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VarietyProfile {
    pub dimension: u32,
    pub canonical: LinearForm,
    pub ample: LinearForm,
}

impl VarietyProfile {
    pub fn new(dimension: u32, canonical: LinearForm, ample: LinearForm) -> Result<Self> {
        if canonical.rank() != ample.rank() {
            return Err(Error::RankMismatch {
                expected: canonical.rank(),
                found: ample.rank(),
            });
        }
        if !ample.is_positive() {
            return Err(Error::invalid(
                "ample-positive",
                "ample form must have positive coefficients",
            ));
        }
        Ok(VarietyProfile {
            dimension,
            canonical,
            ample,
        })
    }

    pub fn rank(&self) -> usize {
        self.canonical.rank()
    }

    /// Projective space of dimension `r`: one generator, `ω = -(r+1)`.
    pub fn projective_space(r: u32) -> Self {
        VarietyProfile {
            dimension: r,
            canonical: LinearForm::new(vec![-(i64::from(r) + 1)]),
            ample: LinearForm::new(vec![1]),
        }
    }

    pub fn point() -> Self {
        VarietyProfile {
            dimension: 0,
            canonical: LinearForm::zero(0),
            ample: LinearForm::zero(0),
        }
    }

    /// `P1`, `P2`, `P3` or `point`.
    pub fn named(name: &str) -> Option<Self> {
        match name {
            "P1" => Some(Self::projective_space(1)),
            "P2" => Some(Self::projective_space(2)),
            "P3" => Some(Self::projective_space(3)),
            "point" => Some(Self::point()),
            _ => None,
        }
    }

    fn check_rank(&self, g: &AGraph) -> Result<()> {
        if g.rank() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                found: g.rank(),
            });
        }
        Ok(())
    }
}

/// `χ(τ)(dim V − 3) − β(τ)(ω_V) + #S − #E`.
pub fn dim_graph(p: &VarietyProfile, g: &AGraph) -> Result<i64> {
    p.check_rank(g)?;
    let d = i64::from(p.dimension);
    Ok(g.euler_characteristic() * (d - 3) - p.canonical.eval(&g.total_class())?
        + g.tails().len() as i64
        - g.edges().len() as i64)
}

/// Dimension of a stable modular graph: the point profile applied to it.
pub fn dim_modular(g: &AGraph) -> Result<i64> {
    dim_graph(&VarietyProfile::point(), g)
}

/// `β(τ)(ω_V) + (dim V − 3)(χ(τˢ) − χ(τ)) + (#S_τˢ − #S_τ) − (#E_τˢ − #E_τ)`,
/// with `τˢ` the rank-0 stabilization.
pub fn deg_graph(p: &VarietyProfile, g: &AGraph) -> Result<i64> {
    p.check_rank(g)?;
    let (s, _) = pushforward(&MonoidHom::to_trivial(g.rank()), g)?;
    let d = i64::from(p.dimension);
    let tails = |h: &AGraph| h.tails().len() as i64;
    let edges = |h: &AGraph| h.edges().len() as i64;
    Ok(p.canonical.eval(&g.total_class())?
        + (d - 3) * (s.euler_characteristic() - g.euler_characteristic())
        + (tails(&s) - tails(g))
        - (edges(&s) - edges(g)))
}

/// A map from the tails of one graph to the tails of another.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct TailMap(pub BTreeMap<FlagId, FlagId>);

impl TailMap {
    pub fn identity(tails: impl IntoIterator<Item = FlagId>) -> Self {
        TailMap(tails.into_iter().map(|t| (t, t)).collect())
    }

    pub fn get(&self, f: FlagId) -> Option<FlagId> {
        self.0.get(&f).copied()
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &TailMap) -> TailMap {
        TailMap(inner.0.iter().map(|(&k, v)| (k, self.0[v])).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ForgetType {
    /// Nothing to stabilize.
    I,
    /// A tripod on a tail disappears; the tail map records which tail survives.
    II,
    /// A tripod on an edge disappears.
    III,
    /// A whole component disappears.
    IV,
}

/// The result of stably forgetting a tail of a stable graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableForget {
    pub source: AGraph,
    pub target: AGraph,
    pub forgotten: FlagId,
    /// Inclusion `target -> source`.
    pub morphism: CombinatorialMorphism,
    /// `S_target -> S_source`.
    pub tail_map: TailMap,
    pub kind: ForgetType,
}

pub fn stably_forget_tail(g: &AGraph, f: FlagId) -> Result<StableForget> {
    if !g.is_stable() {
        return Err(Error::Precondition("graph must be stable".into()));
    }
    let (forgotten, inclusion) = forget_tail(g, f)?;
    let st = stabilize(&forgotten);
    let kind = match st.steps.as_slice() {
        [] => ForgetType::I,
        [step] => match step.case {
            StabilizationCase::II => ForgetType::II,
            StabilizationCase::III => ForgetType::III,
            StabilizationCase::IV => ForgetType::IV,
            StabilizationCase::I => unreachable!("a stable graph never loses a leaf"),
        },
        _ => unreachable!("forgetting one tail unsettles at most one vertex"),
    };
    let mut tail_map = TailMap::identity(st.graph.tails().into_iter().filter(|&t| g.is_tail(t)));
    if kind == ForgetType::II {
        let step = &st.steps[0];
        let survivor = *step
            .removed_flags
            .iter()
            .find(|&&x| g.is_tail(x))
            .expect("the removed tripod kept one tail");
        tail_map.0.insert(step.new_tails[0], survivor);
    }
    Ok(StableForget {
        source: g.clone(),
        morphism: inclusion.after(&st.morphism)?,
        target: st.graph,
        forgotten: f,
        tail_map,
        kind,
    })
}

impl StableForget {
    /// The three defining clauses, checked literally.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        match forget_tail(&self.source, self.forgotten) {
            Ok((raw, _)) if stabilize(&raw).graph == self.target => {}
            _ => out.push(Violation::new(
                "dsft-1",
                "target is not the stabilization after forgetting the tail",
            )),
        }
        let tails = self.target.tails();
        for &h in &tails {
            let image = self.morphism.flag_map.get(&h).copied();
            match (image, self.tail_map.get(h)) {
                (_, None) => out.push(Violation::new("dsft-tails", format!("tail map misses {h}"))),
                (Some(a), Some(m)) if self.source.has_flag(a) && self.source.is_tail(a) && a != m => {
                    out.push(Violation::new("dsft-2", format!("tail map moves tail {h}")))
                }
                (_, Some(m)) if m == self.forgotten => out.push(Violation::new(
                    "dsft-3",
                    "the forgotten tail is in the image of the tail map",
                )),
                _ => {}
            }
        }
        out.extend(self.morphism.violations());
        out
    }

    pub fn validate(&self) -> Result<()> {
        check(self.violations())
    }
}

/// One elementary piece of an isogeny.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsogenyStep {
    Forget(StableForget),
    /// A single-edge contraction.
    Contract(Contraction),
}

impl IsogenyStep {
    pub fn source(&self) -> &AGraph {
        match self {
            IsogenyStep::Forget(s) => &s.source,
            IsogenyStep::Contract(c) => &c.source,
        }
    }

    pub fn target(&self) -> &AGraph {
        match self {
            IsogenyStep::Forget(s) => &s.target,
            IsogenyStep::Contract(c) => &c.target,
        }
    }

    /// `S_target -> S_source`.
    pub fn tail_map(&self) -> TailMap {
        match self {
            IsogenyStep::Forget(s) => s.tail_map.clone(),
            IsogenyStep::Contract(c) => TailMap(
                c.target
                    .tails()
                    .into_iter()
                    .map(|t| (t, c.flag_map[&t]))
                    .collect(),
            ),
        }
    }

    pub fn as_marked(&self) -> Result<MarkedMorphism> {
        match self {
            IsogenyStep::Forget(s) => lift_combinatorial(&s.morphism),
            IsogenyStep::Contract(c) => lift_contraction(c),
        }
    }
}

/// An isogeny, stored as its path of elementary steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isogeny {
    pub source: AGraph,
    pub steps: Vec<IsogenyStep>,
}

impl Isogeny {
    pub fn identity(g: &AGraph) -> Self {
        Isogeny {
            source: g.clone(),
            steps: Vec::new(),
        }
    }

    pub fn target(&self) -> &AGraph {
        self.steps.last().map_or(&self.source, IsogenyStep::target)
    }

    /// Appends stably forgetting tail `f` of the current target.
    pub fn forget(mut self, f: FlagId) -> Result<Self> {
        let step = stably_forget_tail(self.target(), f)?;
        if step.kind == ForgetType::IV {
            return Err(Error::Precondition(format!(
                "forgetting {f} removes a component"
            )));
        }
        self.steps.push(IsogenyStep::Forget(step));
        Ok(self)
    }

    /// Appends contracting the edge through `f`.
    pub fn contract(mut self, f: FlagId) -> Result<Self> {
        let edge = self.target().edge_of(f)?;
        let c = contract_edges(self.target(), &[edge])?;
        self.steps.push(IsogenyStep::Contract(c));
        Ok(self)
    }

    pub fn is_elementary(&self) -> bool {
        self.steps.len() == 1
    }

    /// `Φ^S: S_target -> S_source`.
    pub fn tail_map(&self) -> TailMap {
        self.steps
            .iter()
            .fold(TailMap::identity(self.source.tails()), |acc, s| {
                acc.after(&s.tail_map())
            })
    }

    /// `self` then `next`.
    pub fn then(&self, next: &Isogeny) -> Result<Isogeny> {
        if self.target() != &next.source {
            return Err(Error::EndpointMismatch(
                "isogenies do not compose: target differs from source".into(),
            ));
        }
        let mut steps = self.steps.clone();
        steps.extend(next.steps.iter().cloned());
        Ok(Isogeny {
            source: self.source.clone(),
            steps,
        })
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut current = &self.source;
        for (i, step) in self.steps.iter().enumerate() {
            if step.source() != current {
                out.push(Violation::new("isogeny-chain", format!("step {i} does not start where the previous ended")));
            }
            match step {
                IsogenyStep::Forget(s) => {
                    out.extend(s.violations());
                    if s.kind == ForgetType::IV {
                        out.push(Violation::new("isogeny-pi0", format!("step {i} removes a component")));
                    }
                }
                IsogenyStep::Contract(c) => {
                    out.extend(c.violations());
                    if !c.is_elementary() {
                        out.push(Violation::new("isogeny-step", format!("step {i} contracts several edges")));
                    }
                }
            }
            current = step.target();
        }
        if self.source.num_components() != self.target().num_components() {
            out.push(Violation::new("isogeny-pi0", "component count changes"));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        check(self.violations())
    }

    /// The isogeny as a morphism of stable graphs.
    pub fn as_marked(&self) -> Result<MarkedMorphism> {
        let mut m = MarkedMorphism::identity(&self.source);
        for step in &self.steps {
            m = compose_marked(&step.as_marked()?, &m)?;
        }
        Ok(m)
    }
}

/// Glue some pairs of tails into edges, then apply an isogeny.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedIsogeny {
    pub source: AGraph,
    /// Tail pairs of `source` glued into edges, each stored as `(lo, hi)`.
    pub glued: Vec<(FlagId, FlagId)>,
    /// `source -> iso.source`, the inclusion of the cut graph.
    pub glue: CombinatorialMorphism,
    pub iso: Isogeny,
}

impl ExtendedIsogeny {
    pub fn identity(g: &AGraph) -> Self {
        Self::from_isogeny(Isogeny::identity(g))
    }

    pub fn from_isogeny(iso: Isogeny) -> Self {
        ExtendedIsogeny {
            source: iso.source.clone(),
            glued: Vec::new(),
            glue: CombinatorialMorphism::identity(&iso.source),
            iso,
        }
    }

    /// Glues tail pairs of `g`, with no isogeny after.
    pub fn gluing(g: &AGraph, pairs: &[(FlagId, FlagId)]) -> Result<Self> {
        let mut glued = g.clone();
        let mut seen = BTreeSet::new();
        let mut stored = Vec::new();
        for &(f, fbar) in pairs {
            if !seen.insert(f) || !seen.insert(fbar) {
                return Err(Error::Precondition("a tail is glued twice".into()));
            }
            glued = glue_tails(&glued, f, fbar)?.0;
            stored.push((f.min(fbar), f.max(fbar)));
        }
        stored.sort();
        Ok(ExtendedIsogeny {
            source: g.clone(),
            glued: stored,
            glue: CombinatorialMorphism::inclusion(g, &glued, MonoidHom::identity(g.rank())),
            iso: Isogeny::identity(&glued),
        })
    }

    pub fn target(&self) -> &AGraph {
        self.iso.target()
    }

    pub fn is_elementary(&self) -> bool {
        self.glued.len() + self.iso.steps.len() == 1
    }

    /// `S_target -> S_source`.
    pub fn tail_map(&self) -> TailMap {
        self.iso.tail_map()
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut expected = self.source.clone();
        for &(f, fbar) in &self.glued {
            match glue_tails(&expected, f, fbar) {
                Ok((g, _)) => expected = g,
                Err(e) => out.push(Violation::new("extended-glue", e.to_string())),
            }
        }
        if expected != self.iso.source {
            out.push(Violation::new("extended-glue", "glued graph differs from isogeny source"));
        }
        if self.glue.source != self.source || self.glue.target != self.iso.source {
            out.push(Violation::new("extended-glue", "gluing morphism has wrong endpoints"));
        }
        out.extend(self.glue.violations());
        out.extend(self.iso.violations());
        out
    }

    pub fn validate(&self) -> Result<()> {
        check(self.violations())
    }
}

/// `second ∘ first`. Edges glued by `second` are pulled back through the
/// tail map of `first` and glued before `first`'s isogeny, which is then
/// replayed on the glued graphs.
pub fn compose_extended(second: &ExtendedIsogeny, first: &ExtendedIsogeny) -> Result<ExtendedIsogeny> {
    if first.target() != &second.source {
        return Err(Error::EndpointMismatch(
            "first extended isogeny does not end where the second starts".into(),
        ));
    }
    // pairs to glue in each intermediate graph of first.iso, last graph first
    let mut pairs: Vec<(FlagId, FlagId)> = second.glued.clone();
    let mut per_graph = vec![pairs.clone()];
    for step in first.iso.steps.iter().rev() {
        let m = step.tail_map();
        pairs = pairs
            .iter()
            .map(|&(x, y)| {
                let (a, b) = (m.0[&x], m.0[&y]);
                (a.min(b), a.max(b))
            })
            .collect();
        per_graph.push(pairs.clone());
    }
    per_graph.reverse();

    let mut all_glued = first.glued.clone();
    all_glued.extend(per_graph[0].iter().copied());
    let head = ExtendedIsogeny::gluing(&first.source, &all_glued)?;

    let mut iso = Isogeny::identity(&head.iso.source);
    for step in &first.iso.steps {
        iso = match step {
            IsogenyStep::Forget(s) => iso.forget(s.forgotten)?,
            IsogenyStep::Contract(c) => iso.contract(c.contracted_edges()[0].lo)?,
        };
    }
    if iso.target() != &second.iso.source {
        return Err(Error::Precondition(
            "replayed isogeny does not reach the glued target".into(),
        ));
    }
    let iso = iso.then(&second.iso)?;
    let out = ExtendedIsogeny {
        source: first.source.clone(),
        glued: head.glued,
        glue: head.glue,
        iso,
    };
    debug_assert!(out.validate().is_ok());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphBuilder, VertexId};
    use crate::morphism::cut_edge;

    fn vertex_with_tails(genus: u32, n: usize) -> AGraph {
        let mut b = GraphBuilder::new(0);
        let v = b.vertex(genus, &[]);
        for _ in 0..n {
            b.tail(v);
        }
        b.build()
    }

    #[test]
    fn dimension_examples() {
        let p2 = VarietyProfile::projective_space(2);
        for d in 0..4 {
            let mut b = GraphBuilder::new(1);
            let v = b.vertex(0, &[d]);
            for _ in 0..3 {
                b.tail(v);
            }
            assert_eq!(dim_graph(&p2, &b.build()).unwrap(), 3 * d as i64 + 2);
        }
        assert_eq!(dim_modular(&vertex_with_tails(2, 1)).unwrap(), 4);
        assert_eq!(dim_modular(&vertex_with_tails(0, 3)).unwrap(), 0);
        assert!(dim_graph(&p2, &vertex_with_tails(0, 3)).is_err());
    }

    #[test]
    fn degree_examples() {
        for r in 1..=3u32 {
            let p = VarietyProfile::projective_space(r);
            for d in 0..4u64 {
                let mut b = GraphBuilder::new(1);
                let v = b.vertex(0, &[d]);
                for _ in 0..3 {
                    b.tail(v);
                }
                let g = b.build();
                assert_eq!(deg_graph(&p, &g).unwrap(), -(d as i64) * (i64::from(r) + 1));
            }
        }
    }

    #[test]
    fn forget_types() {
        let g = vertex_with_tails(0, 4);
        let s = stably_forget_tail(&g, FlagId(0)).unwrap();
        assert_eq!(s.kind, ForgetType::I);
        s.validate().unwrap();

        let tripod = vertex_with_tails(0, 3);
        let s = stably_forget_tail(&tripod, FlagId(1)).unwrap();
        assert_eq!(s.kind, ForgetType::IV);
        assert!(s.target.is_empty());

        // tripod hanging off a genus-1 vertex by an edge
        let mut b = GraphBuilder::new(0);
        let v = b.vertex(0, &[]);
        let w = b.vertex(1, &[]);
        let t1 = b.tail(v);
        let t2 = b.tail(v);
        let (_, far) = b.edge(v, w);
        let g = b.build();
        let s = stably_forget_tail(&g, t1).unwrap();
        assert_eq!(s.kind, ForgetType::II);
        assert_eq!(s.tail_map.get(far), Some(t2));
        assert_eq!(s.target.num_vertices(), 1);
        s.validate().unwrap();

        // tripod sitting on an edge between two genus-1 vertices
        let mut b = GraphBuilder::new(0);
        let x = b.vertex(1, &[]);
        let v = b.vertex(0, &[]);
        let y = b.vertex(1, &[]);
        b.edge(x, v);
        b.edge(v, y);
        let t = b.tail(v);
        let g = b.build();
        let s = stably_forget_tail(&g, t).unwrap();
        assert_eq!(s.kind, ForgetType::III);
        assert_eq!(s.target.edges().len(), 1);
        s.validate().unwrap();

        let lonely = vertex_with_tails(1, 1);
        assert_eq!(stably_forget_tail(&lonely, FlagId(0)).unwrap().kind, ForgetType::IV);
    }

    #[test]
    fn bad_tail_map_is_caught() {
        let mut b = GraphBuilder::new(0);
        let v = b.vertex(0, &[]);
        let w = b.vertex(1, &[]);
        let t1 = b.tail(v);
        b.tail(v);
        let (_, far) = b.edge(v, w);
        let g = b.build();
        let mut s = stably_forget_tail(&g, t1).unwrap();
        s.tail_map.0.insert(far, t1);
        let err = s.validate().unwrap_err();
        assert!(err.violations().iter().any(|v| v.condition == "dsft-3"));
    }

    #[test]
    fn isogeny_preserves_chi_and_composes() {
        let mut b = GraphBuilder::new(0);
        let v = b.vertex(0, &[]);
        let w = b.vertex(0, &[]);
        let t: Vec<_> = (0..2).map(|_| b.tail(v)).collect();
        b.tail(w);
        b.tail(w);
        let (e, _) = b.edge(v, w);
        let g = b.build();
        let iso = Isogeny::identity(&g).forget(t[0]).unwrap();
        assert_eq!(iso.target().num_vertices(), 1);
        iso.validate().unwrap();
        assert_eq!(iso.target().euler_characteristic(), g.euler_characteristic());
        assert_eq!(iso.tail_map().0.len(), 3);
        let m = iso.as_marked().unwrap();
        m.validate().unwrap();

        let iso2 = Isogeny::identity(&g).contract(e).unwrap();
        let both = iso2.then(&Isogeny::identity(iso2.target()).forget(t[0]).unwrap()).unwrap();
        both.validate().unwrap();
        assert_eq!(both.target().euler_characteristic(), g.euler_characteristic());
        assert!(Isogeny::identity(&vertex_with_tails(0, 3)).forget(FlagId(0)).is_err());
    }

    #[test]
    fn extended_composition_regains_edge() {
        // 2-vertex graph with one edge, genus 1 on each side, one tail each
        let mut b = GraphBuilder::new(0);
        let v = b.vertex(1, &[]);
        let w = b.vertex(1, &[]);
        b.tail(v);
        b.tail(w);
        let (x, y) = b.edge(v, w);
        let g = b.build();
        let (cut, _) = cut_edge(&g, x).unwrap();
        // isogeny on the cut graph: forget the tail x? it is needed; forget tail 0 instead
        let first = ExtendedIsogeny::from_isogeny(Isogeny::identity(&cut).forget(FlagId(0)).unwrap());
        let second = ExtendedIsogeny::gluing(first.target(), &[(x, y)]).unwrap();
        let comp = compose_extended(&second, &first).unwrap();
        comp.validate().unwrap();
        assert_eq!(comp.glued, vec![(x, y)]);
        assert_eq!(comp.iso.source.edges().len(), 1);
        assert_eq!(comp.target(), second.target());
        assert_eq!(comp.source.euler_characteristic() - 1, comp.target().euler_characteristic());

        let id = ExtendedIsogeny::identity(&cut);
        assert_eq!(compose_extended(&first, &id).unwrap(), first);
        let id = ExtendedIsogeny::identity(first.target());
        assert_eq!(compose_extended(&id, &first).unwrap(), first);
        let _ = VertexId(0);
    }
}
