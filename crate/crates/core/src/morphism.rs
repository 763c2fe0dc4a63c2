//! Contractions and combinatorial morphisms of A-graphs.
//!
//! A [`Contraction`] collapses a set of edges; its flag map runs
//! *backwards*, from target flags to source flags, while its vertex map runs
//! forwards. A [`CombinatorialMorphism`] maps flags and vertices forwards and
//! covers a monoid homomorphism from the target's monoid to the source's.
//!
//! Validators report every violated condition with a stable code (`doc-*`
//! for contractions, `commor-*` for combinatorial morphisms).

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{check, Error, Result, Violation};
use crate::graph::{AGraph, Edge, FlagId, VertexId};
use crate::semigroup::{MonoidElement, MonoidHom};
use crate::util::UnionFind;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub source: AGraph,
    pub target: AGraph,
    /// target flag -> source flag
    pub flag_map: BTreeMap<FlagId, FlagId>,
    /// source vertex -> target vertex
    pub vertex_map: BTreeMap<VertexId, VertexId>,
}

impl Contraction {
    pub fn identity(g: &AGraph) -> Self {
        Contraction {
            source: g.clone(),
            target: g.clone(),
            flag_map: g.flag_ids().map(|f| (f, f)).collect(),
            vertex_map: g.vertex_ids().map(|v| (v, v)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self.flag_map.iter().all(|(a, b)| a == b)
            && self.vertex_map.iter().all(|(a, b)| a == b)
    }

    fn image(&self) -> BTreeSet<FlagId> {
        self.flag_map.values().copied().collect()
    }

    /// Source flags outside the image of the flag map.
    pub fn contracted_flags(&self) -> BTreeSet<FlagId> {
        let image = self.image();
        self.source.flag_ids().filter(|f| !image.contains(f)).collect()
    }

    pub fn contracted_edges(&self) -> Vec<Edge> {
        let flags = self.contracted_flags();
        let mut edges: Vec<Edge> = flags
            .iter()
            .map(|&f| Edge::new(f, self.source.partner(f)))
            .collect();
        edges.sort();
        edges.dedup();
        edges
    }

    pub fn is_elementary(&self) -> bool {
        self.contracted_edges().len() == 1
    }

    /// All violated conditions; `Ok(())` for a valid contraction of A-graphs.
    pub fn validate(&self) -> Result<()> {
        check(self.violations())
    }

    pub fn violations(&self) -> Vec<Violation> {
        let (src, tgt) = (&self.source, &self.target);
        let mut out = Vec::new();
        if src.rank() != tgt.rank() {
            out.push(Violation::new("rank", "source and target ranks differ"));
            return out;
        }

        // (1) totality, injectivity, surjectivity
        for f in tgt.flag_ids() {
            match self.flag_map.get(&f) {
                Some(g) if src.has_flag(*g) => {}
                Some(g) => out.push(Violation::new("doc-1", format!("{f} maps to unknown {g}"))),
                None => out.push(Violation::new("doc-1", format!("flag map undefined on {f}"))),
            }
        }
        for f in self.flag_map.keys().filter(|f| !tgt.has_flag(**f)) {
            out.push(Violation::new("doc-1", format!("flag map defined on unknown {f}")));
        }
        for v in src.vertex_ids() {
            match self.vertex_map.get(&v) {
                Some(w) if tgt.has_vertex(*w) => {}
                _ => out.push(Violation::new("doc-1", format!("vertex map bad at {v}"))),
            }
        }
        if !out.is_empty() {
            return out;
        }
        if self.image().len() != self.flag_map.len() {
            out.push(Violation::new("doc-1", "flag map is not injective"));
        }
        let hit: BTreeSet<VertexId> = self.vertex_map.values().copied().collect();
        if let Some(v) = tgt.vertex_ids().find(|v| !hit.contains(v)) {
            out.push(Violation::new("doc-1", format!("vertex map misses {v}")));
        }

        // (2) boundary square, (3) involution square
        for (&f, &g) in &self.flag_map {
            if self.vertex_map[&src.boundary(g)] != tgt.boundary(f) {
                out.push(Violation::new(
                    "doc-2",
                    format!("boundary of {f} does not commute"),
                ));
            }
            if self.flag_map.get(&tgt.partner(f)) != Some(&src.partner(g)) {
                out.push(Violation::new(
                    "doc-3",
                    format!("involution does not commute at {f}"),
                ));
            }
        }

        // (4) every tail survives
        let image = self.image();
        for t in src.tails() {
            if !image.contains(&t) {
                out.push(Violation::new("doc-4", format!("tail {t} is contracted")));
            }
        }
        if !out.is_empty() {
            return out;
        }

        // (5) fibres are the classes generated by contracted edges
        let ids: Vec<VertexId> = src.vertex_ids().collect();
        let index: BTreeMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = UnionFind::new(ids.len());
        for f in self.contracted_flags() {
            uf.union(
                index[&src.boundary(f)],
                index[&src.boundary(src.partner(f))],
            );
        }
        let classes = uf.classes();
        let mut seen = BTreeMap::new();
        for class in &classes {
            let images: BTreeSet<VertexId> =
                class.iter().map(|&i| self.vertex_map[&ids[i]]).collect();
            if images.len() != 1 {
                out.push(Violation::new(
                    "doc-5",
                    "a class of contracted vertices maps to several vertices",
                ));
                continue;
            }
            let w = *images.iter().next().expect("one image");
            if seen.insert(w, ()).is_some() {
                out.push(Violation::new(
                    "doc-5",
                    format!("{w} receives two classes of vertices"),
                ));
            }
        }
        if !out.is_empty() {
            return out;
        }

        // genus and class conditions
        for w in tgt.vertex_ids() {
            let sub = self.contracted_subgraph(w).expect("valid so far");
            let genus: u64 = sub.vertices().map(|(_, d)| u64::from(d.genus)).sum::<u64>()
                + sub.betti1() as u64;
            if u64::from(tgt.genus_of(w)) != genus {
                out.push(Violation::new(
                    "doc-genus",
                    format!(
                        "genus of {w} is {}, contracted graph gives {genus}",
                        tgt.genus_of(w)
                    ),
                ));
            }
            if *tgt.class_of(w) != sub.total_class() {
                out.push(Violation::new(
                    "doc-class",
                    format!("class of {w} is not the sum over its fibre"),
                ));
            }
        }
        out
    }

    /// The graph being contracted onto `v`.
    pub fn contracted_subgraph(&self, v: VertexId) -> Result<AGraph> {
        self.target.vertex(v)?;
        let mut sub = AGraph::empty(self.source.rank());
        for (&u, &w) in &self.vertex_map {
            if w == v {
                let d = self.source.vertex(u)?;
                sub.insert_vertex(u, d.genus, d.class.clone());
            }
        }
        let contracted = self.contracted_flags();
        for &f in &contracted {
            if self.vertex_map[&self.source.boundary(f)] == v {
                sub.insert_flag(f, self.source.boundary(f));
            }
        }
        for &f in &contracted {
            let p = self.source.partner(f);
            if f < p && sub.has_flag(f) && sub.has_flag(p) {
                sub.join(f, p);
            }
        }
        Ok(sub)
    }

    /// `self ∘ first`: contract along `first`, then along `self`.
    pub fn after(&self, first: &Contraction) -> Result<Contraction> {
        if first.target != self.source {
            return Err(Error::EndpointMismatch(
                "first contraction's target is not the second's source".into(),
            ));
        }
        Ok(Contraction {
            source: first.source.clone(),
            target: self.target.clone(),
            flag_map: self
                .flag_map
                .iter()
                .map(|(&f, g)| (f, first.flag_map[g]))
                .collect(),
            vertex_map: first
                .vertex_map
                .iter()
                .map(|(&v, w)| (v, self.vertex_map[w]))
                .collect(),
        })
    }

    /// Factors into elementary contractions, one per contracted edge in
    /// ascending order; the last factor lands on `self.target` exactly.
    pub fn decompose_elementary(&self) -> Result<Vec<Contraction>> {
        self.validate()?;
        let edges = self.contracted_edges();
        self.decompose_in_order(&edges)
    }

    /// Factors along a chosen ordering of the contracted edges.
    pub fn decompose_in_order(&self, order: &[Edge]) -> Result<Vec<Contraction>> {
        let mut wanted = self.contracted_edges();
        let mut given = order.to_vec();
        wanted.sort();
        given.sort();
        if wanted != given {
            return Err(Error::Precondition(
                "ordering must list each contracted edge once".into(),
            ));
        }
        let mut steps = Vec::with_capacity(order.len());
        let mut current = self.source.clone();
        for (i, &e) in order.iter().enumerate() {
            let mut step = contract_edges(&current, &[e])?;
            if i + 1 == order.len() {
                // every surviving id in `current` is a source id; route to the real target
                step = Contraction {
                    flag_map: self.flag_map.clone(),
                    vertex_map: step
                        .source
                        .vertex_ids()
                        .map(|v| (v, self.vertex_map[&v]))
                        .collect(),
                    target: self.target.clone(),
                    source: step.source,
                };
            }
            current = step.target.clone();
            steps.push(step);
        }
        Ok(steps)
    }
}

/// Contracts `edges` of `g`. Surviving flags keep their ids and each fibre
/// is represented by its least vertex id.
pub fn contract_edges(g: &AGraph, edges: &[Edge]) -> Result<Contraction> {
    let mut contracted = BTreeSet::new();
    for e in edges {
        if !g.has_flag(e.lo) || !g.has_flag(e.hi) || g.partner(e.lo) != e.hi || e.lo == e.hi {
            return Err(Error::NotAnEdge(e.lo));
        }
        contracted.insert(e.lo);
        contracted.insert(e.hi);
    }
    let ids: Vec<VertexId> = g.vertex_ids().collect();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(ids.len());
    for &f in &contracted {
        uf.union(index[&g.boundary(f)], index[&g.boundary(g.partner(f))]);
    }
    let mut vertex_map = BTreeMap::new();
    let mut target = AGraph::empty(g.rank());
    for class in uf.classes() {
        let rep = ids[class[0]];
        let members: BTreeSet<VertexId> = class.iter().map(|&i| ids[i]).collect();
        let inner_edges = contracted
            .iter()
            .filter(|&&f| members.contains(&g.boundary(f)))
            .count()
            / 2;
        let genus: u32 = members.iter().map(|&v| g.genus_of(v)).sum::<u32>()
            + (inner_edges + 1 - members.len()) as u32;
        let class_sum = members
            .iter()
            .fold(MonoidElement::zero(g.rank()), |acc, &v| &acc + g.class_of(v));
        target.insert_vertex(rep, genus, class_sum);
        for &v in &members {
            vertex_map.insert(v, rep);
        }
    }
    for f in g.flag_ids().filter(|f| !contracted.contains(f)) {
        target.insert_flag(f, vertex_map[&g.boundary(f)]);
    }
    for e in g.edges() {
        if !contracted.contains(&e.lo) {
            target.join(e.lo, e.hi);
        }
    }
    Ok(Contraction {
        source: g.clone(),
        flag_map: target.flag_ids().map(|f| (f, f)).collect(),
        target,
        vertex_map,
    })
}

pub fn compose_contractions(second: &Contraction, first: &Contraction) -> Result<Contraction> {
    second.after(first)
}

/// A combinatorial morphism `source -> target` covering `hom`, where `hom`
/// runs from the target's monoid to the source's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialMorphism {
    pub source: AGraph,
    pub target: AGraph,
    pub hom: MonoidHom,
    pub flag_map: BTreeMap<FlagId, FlagId>,
    pub vertex_map: BTreeMap<VertexId, VertexId>,
}

impl CombinatorialMorphism {
    /// Inclusion of a graph whose ids are a subset of `target`'s ids.
    pub fn inclusion(source: &AGraph, target: &AGraph, hom: MonoidHom) -> Self {
        CombinatorialMorphism {
            flag_map: source.flag_ids().map(|f| (f, f)).collect(),
            vertex_map: source.vertex_ids().map(|v| (v, v)).collect(),
            source: source.clone(),
            target: target.clone(),
            hom,
        }
    }

    pub fn identity(g: &AGraph) -> Self {
        Self::inclusion(g, g, MonoidHom::identity(g.rank()))
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self.hom.is_identity()
            && self.flag_map.iter().all(|(a, b)| a == b)
            && self.vertex_map.iter().all(|(a, b)| a == b)
    }

    pub fn validate(&self) -> Result<()> {
        check(self.violations())
    }

    pub fn violations(&self) -> Vec<Violation> {
        let (src, tgt) = (&self.source, &self.target);
        let mut out = Vec::new();
        if self.hom.source_rank() != tgt.rank() || self.hom.target_rank() != src.rank() {
            out.push(Violation::new(
                "commor-hom",
                "homomorphism does not run from the target monoid to the source monoid",
            ));
            return out;
        }
        for f in src.flag_ids() {
            if !self.flag_map.get(&f).is_some_and(|g| tgt.has_flag(*g)) {
                out.push(Violation::new("map-total", format!("flag map bad at {f}")));
            }
        }
        for v in src.vertex_ids() {
            if !self.vertex_map.get(&v).is_some_and(|w| tgt.has_vertex(*w)) {
                out.push(Violation::new("map-total", format!("vertex map bad at {v}")));
            }
        }
        if !out.is_empty() {
            return out;
        }

        for (&f, &g) in &self.flag_map {
            if self.vertex_map[&src.boundary(f)] != tgt.boundary(g) {
                out.push(Violation::new(
                    "commor-1",
                    format!("boundary of {f} does not commute"),
                ));
            }
        }
        for v in src.vertex_ids() {
            let images: BTreeSet<FlagId> =
                src.flags_at(v).iter().map(|f| self.flag_map[f]).collect();
            if images.len() != src.valence(v).expect("vertex") {
                out.push(Violation::new(
                    "commor-2",
                    format!("flag map is not injective at {v}"),
                ));
            }
        }

        let pushed = tgt.map_classes(&self.hom).expect("rank checked");
        if !preserves_partition(src, &pushed, &self.flag_map) {
            out.push(Violation::new(
                "commor-3",
                "flag map does not preserve flag equivalence",
            ));
        }

        for (&v, &w) in &self.vertex_map {
            if src.class_of(v) != pushed.class_of(w) {
                out.push(Violation::new(
                    "commor-4",
                    format!("class of {v} differs from the pushed class of {w}"),
                ));
            }
            if src.genus_of(v) != tgt.genus_of(w) {
                out.push(Violation::new(
                    "commor-5",
                    format!("genus of {v} differs from genus of {w}"),
                ));
            }
        }
        out
    }

    /// Bijective on the flags at every vertex.
    pub fn is_complete(&self) -> bool {
        self.source.vertex_ids().all(|v| {
            let w = self.vertex_map[&v];
            self.source.valence(v).ok() == self.target.valence(w).ok()
        })
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &CombinatorialMorphism) -> Result<CombinatorialMorphism> {
        if first.target != self.source {
            return Err(Error::EndpointMismatch(
                "first morphism's target is not the second's source".into(),
            ));
        }
        Ok(CombinatorialMorphism {
            source: first.source.clone(),
            target: self.target.clone(),
            hom: first.hom.compose(&self.hom)?,
            flag_map: first
                .flag_map
                .iter()
                .map(|(&f, g)| (f, self.flag_map[g]))
                .collect(),
            vertex_map: first
                .vertex_map
                .iter()
                .map(|(&v, w)| (v, self.vertex_map[w]))
                .collect(),
        })
    }
}

/// Every valid combinatorial morphism `source -> target` covering `hom`,
/// found by backtracking over vertex maps and then per-vertex flag injections.
pub fn enumerate_combinatorial_morphisms(
    source: &AGraph,
    target: &AGraph,
    hom: &MonoidHom,
) -> Result<Vec<CombinatorialMorphism>> {
    if hom.source_rank() != target.rank() || hom.target_rank() != source.rank() {
        return Err(Error::RankMismatch {
            expected: target.rank(),
            found: hom.source_rank(),
        });
    }
    let pushed = target.map_classes(hom)?;
    let vertices: Vec<VertexId> = source.vertex_ids().collect();
    let candidates: Vec<Vec<VertexId>> = vertices
        .iter()
        .map(|&v| {
            pushed
                .vertex_ids()
                .filter(|&w| {
                    pushed.genus_of(w) == source.genus_of(v)
                        && pushed.class_of(w) == source.class_of(v)
                        && pushed.flags_at(w).len() >= source.flags_at(v).len()
                })
                .collect()
        })
        .collect();

    struct Search<'a> {
        source: &'a AGraph,
        target: &'a AGraph,
        pushed: &'a AGraph,
        hom: &'a MonoidHom,
        vertices: Vec<VertexId>,
        candidates: Vec<Vec<VertexId>>,
        vertex_map: BTreeMap<VertexId, VertexId>,
        flag_map: BTreeMap<FlagId, FlagId>,
        found: Vec<CombinatorialMorphism>,
    }

    impl Search<'_> {
        fn vertex(&mut self, i: usize) {
            if i == self.vertices.len() {
                if preserves_partition(self.source, self.pushed, &self.flag_map) {
                    self.found.push(CombinatorialMorphism {
                        source: self.source.clone(),
                        target: self.target.clone(),
                        hom: self.hom.clone(),
                        flag_map: self.flag_map.clone(),
                        vertex_map: self.vertex_map.clone(),
                    });
                }
                return;
            }
            let v = self.vertices[i];
            for w in self.candidates[i].clone() {
                self.vertex_map.insert(v, w);
                let flags = self.source.flags_at(v);
                let slots = self.target.flags_at(w);
                let mut used = vec![false; slots.len()];
                self.flags(i, &flags, &slots, &mut used, 0);
            }
            self.vertex_map.remove(&v);
        }

        fn flags(
            &mut self,
            i: usize,
            flags: &[FlagId],
            slots: &[FlagId],
            used: &mut [bool],
            k: usize,
        ) {
            if k == flags.len() {
                self.vertex(i + 1);
                return;
            }
            for s in 0..slots.len() {
                if !used[s] {
                    used[s] = true;
                    self.flag_map.insert(flags[k], slots[s]);
                    self.flags(i, flags, slots, used, k + 1);
                    used[s] = false;
                }
            }
            self.flag_map.remove(&flags[k]);
        }
    }

    let mut search = Search {
        source,
        target,
        pushed: &pushed,
        hom,
        vertices,
        candidates,
        vertex_map: BTreeMap::new(),
        flag_map: BTreeMap::new(),
        found: Vec::new(),
    };
    search.vertex(0);
    Ok(search.found)
}

/// Every block of the source flag partition lands inside one block of the target's.
pub(crate) fn preserves_partition(
    src: &AGraph,
    tgt: &AGraph,
    flag_map: &BTreeMap<FlagId, FlagId>,
) -> bool {
    let target_partition = tgt.flag_partition();
    src.flag_partition().blocks().iter().all(|block| {
        let mut images = block
            .iter()
            .map(|f| target_partition.block_of(flag_map[f]));
        let first = images.next().flatten();
        images.all(|b| b == first)
    })
}

pub fn compose_combinatorial(
    second: &CombinatorialMorphism,
    first: &CombinatorialMorphism,
) -> Result<CombinatorialMorphism> {
    second.after(first)
}

/// Cuts the edge through `f`; the returned morphism maps the cut graph onto `g`.
pub fn cut_edge(g: &AGraph, f: FlagId) -> Result<(AGraph, CombinatorialMorphism)> {
    g.edge_of(f)?;
    let mut cut = g.clone();
    cut.detach(f);
    let a = CombinatorialMorphism::inclusion(&cut, g, MonoidHom::identity(g.rank()));
    Ok((cut, a))
}

/// Forgets the tail `f` (no stabilization).
pub fn forget_tail(g: &AGraph, f: FlagId) -> Result<(AGraph, CombinatorialMorphism)> {
    if !g.has_flag(f) {
        return Err(Error::UnknownFlag(f));
    }
    if !g.is_tail(f) {
        return Err(Error::NotATail(f));
    }
    let mut forgotten = g.clone();
    forgotten.remove_flag(f);
    let a = CombinatorialMorphism::inclusion(&forgotten, g, MonoidHom::identity(g.rank()));
    Ok((forgotten, a))
}

/// Glues the tails `f` and `fbar` into an edge; the morphism maps `g` into the result.
pub fn glue_tails(g: &AGraph, f: FlagId, fbar: FlagId) -> Result<(AGraph, CombinatorialMorphism)> {
    for t in [f, fbar] {
        if !g.has_flag(t) {
            return Err(Error::UnknownFlag(t));
        }
        if !g.is_tail(t) {
            return Err(Error::NotATail(t));
        }
    }
    if f == fbar {
        return Err(Error::Precondition("cannot glue a tail to itself".into()));
    }
    let mut glued = g.clone();
    glued.join(f, fbar);
    let c = CombinatorialMorphism::inclusion(g, &glued, MonoidHom::identity(g.rank()));
    Ok((glued, c))
}
