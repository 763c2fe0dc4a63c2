//! Seeded random generators for graphs and morphisms.
//!
//! Everything here is deterministic given the generator state, which makes
//! the randomized suites reproducible from a single seed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::canon::relabel;
use crate::graph::{AGraph, FlagId, GraphBuilder, VertexId};
use crate::isogeny::{stably_forget_tail, ForgetType, Isogeny};
use crate::morphism::{contract_edges, CombinatorialMorphism, Contraction};
use crate::pullback::MarkedMorphism;
use crate::semigroup::MonoidHom;
use crate::stabilize::stabilize;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Size and shape bounds for [`random_graph`].
#[derive(Clone, Debug)]
pub struct GraphParams {
    pub rank: usize,
    pub max_vertices: usize,
    pub max_flags: usize,
    pub max_genus: u32,
    pub max_class: u64,
    pub connected: bool,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams {
            rank: 1,
            max_vertices: 4,
            max_flags: 12,
            max_genus: 1,
            max_class: 2,
            connected: true,
        }
    }
}

// small values are much more likely, so that null vertices show up often
fn skewed<R: Rng>(rng: &mut R, max: u64) -> u64 {
    if max == 0 || rng.gen_bool(0.5) {
        0
    } else {
        rng.gen_range(1..=max)
    }
}

/// A random graph within the bounds; not necessarily stable.
pub fn random_graph<R: Rng>(rng: &mut R, p: &GraphParams) -> AGraph {
    let mut b = GraphBuilder::new(p.rank);
    let cap = if p.connected {
        p.max_flags / 2 + 1
    } else {
        p.max_vertices
    };
    let nv = rng.gen_range(1..=p.max_vertices.min(cap).max(1));
    let vs: Vec<VertexId> = (0..nv)
        .map(|_| {
            let genus = skewed(rng, u64::from(p.max_genus)) as u32;
            let class: Vec<u64> = (0..p.rank).map(|_| skewed(rng, p.max_class)).collect();
            b.vertex(genus, &class)
        })
        .collect();
    let mut budget = p.max_flags;
    if p.connected {
        for i in 1..nv {
            let j = rng.gen_range(0..i);
            b.edge(vs[j], vs[i]);
            budget -= 2;
        }
    }
    let extra = rng.gen_range(0..=budget);
    let mut used = 0;
    while used < extra {
        let v = vs[rng.gen_range(0..nv)];
        if extra - used >= 2 && rng.gen_bool(0.35) {
            let w = vs[rng.gen_range(0..nv)];
            b.edge(v, w);
            used += 2;
        } else {
            b.tail(v);
            used += 1;
        }
    }
    b.build()
}

/// A random stable graph: unstable vertices get tails while the flag budget
/// lasts, and just enough genus after that.
pub fn random_stable_graph<R: Rng>(rng: &mut R, p: &GraphParams) -> AGraph {
    let g = random_graph(rng, p);
    let mut b = GraphBuilder::new(p.rank);
    let mut ids = BTreeMap::new();
    for (v, data) in g.vertices() {
        ids.insert(v, b.vertex(data.genus, data.class.coords()));
    }
    let mut budget = p.max_flags.saturating_sub(g.num_flags());
    for t in g.tails() {
        b.tail(ids[&g.boundary(t)]);
    }
    for e in g.edges() {
        b.edge(ids[&g.boundary(e.lo)], ids[&g.boundary(e.hi)]);
    }
    let mut fixed = b.build();
    for v in fixed.unstable_vertices() {
        while !fixed.is_stable_vertex(v).expect("vertex") && budget > 0 {
            let f = fixed.fresh_flag();
            fixed.insert_flag(f, v);
            budget -= 1;
        }
        if !fixed.is_stable_vertex(v).expect("vertex") {
            let valence = fixed.valence(v).expect("vertex") as u32;
            fixed.set_genus(v, (3 - valence).div_ceil(2));
        }
    }
    fixed
}

/// A random graph with at least one unstable vertex, or `None` after a few
/// attempts.
pub fn random_unstable_graph<R: Rng>(rng: &mut R, p: &GraphParams) -> Option<AGraph> {
    let loose = GraphParams {
        max_genus: p.max_genus.min(1),
        ..p.clone()
    };
    (0..64)
        .map(|_| random_graph(rng, &loose))
        .find(|g| !g.is_stable())
}

/// A random homomorphism `N^source -> N^target` with entries at most `max`.
pub fn random_hom<R: Rng>(rng: &mut R, source: usize, target: usize, max: u64) -> MonoidHom {
    let rows = (0..target)
        .map(|_| (0..source).map(|_| rng.gen_range(0..=max)).collect())
        .collect();
    MonoidHom::from_rows(source, rows).expect("shape")
}

/// The same graph with shuffled ids drawn from `0..2n`.
pub fn shuffle_ids<R: Rng>(
    rng: &mut R,
    g: &AGraph,
) -> (AGraph, BTreeMap<VertexId, VertexId>, BTreeMap<FlagId, FlagId>) {
    let mut vpool: Vec<u32> = (0..2 * g.num_vertices() as u32 + 1).collect();
    let mut fpool: Vec<u32> = (0..2 * g.num_flags() as u32 + 1).collect();
    vpool.shuffle(rng);
    fpool.shuffle(rng);
    let vmap: BTreeMap<VertexId, VertexId> =
        g.vertex_ids().zip(vpool).map(|(v, w)| (v, VertexId(w))).collect();
    let fmap: BTreeMap<FlagId, FlagId> =
        g.flag_ids().zip(fpool).map(|(f, h)| (f, FlagId(h))).collect();
    (relabel(g, &vmap, &fmap), vmap, fmap)
}

/// Random stable `ρ` with a combinatorial morphism `ρ -> τ`, built by
/// pushing classes, cutting edges, forgetting tails and stabilizing.
/// `target_rank` is the rank of `ρ`.
pub fn random_combinatorial_into<R: Rng>(
    rng: &mut R,
    tau: &AGraph,
    target_rank: usize,
) -> CombinatorialMorphism {
    let xi = if target_rank == tau.rank() && rng.gen_bool(0.5) {
        MonoidHom::identity(tau.rank())
    } else {
        random_hom(rng, tau.rank(), target_rank, 1)
    };
    let mut g = tau.map_classes(&xi).expect("rank");
    for e in tau.edges() {
        if rng.gen_bool(0.25) {
            g.detach(e.lo);
        }
    }
    for t in g.tails() {
        if rng.gen_bool(0.2) {
            g.remove_flag(t);
        }
    }
    let mut rho = stabilize(&g).graph;
    if rho.is_empty() {
        rho = tau.map_classes(&xi).expect("rank");
        if !rho.is_stable() {
            rho = stabilize(&rho).graph;
        }
    }
    let a = CombinatorialMorphism::inclusion(&rho, tau, xi);
    let (shuffled, vmap, fmap) = shuffle_ids(rng, &rho);
    let inverse_f: BTreeMap<FlagId, FlagId> = fmap.iter().map(|(&a, &b)| (b, a)).collect();
    let inverse_v: BTreeMap<VertexId, VertexId> = vmap.iter().map(|(&a, &b)| (b, a)).collect();
    CombinatorialMorphism {
        flag_map: inverse_f.iter().map(|(&n, o)| (n, a.flag_map[o])).collect(),
        vertex_map: inverse_v.iter().map(|(&n, o)| (n, a.vertex_map[o])).collect(),
        source: shuffled,
        target: a.target,
        hom: a.hom,
    }
}

/// Contraction of `k` distinct random edges, if `g` has that many.
pub fn random_contraction<R: Rng>(rng: &mut R, g: &AGraph, k: usize) -> Option<Contraction> {
    let mut edges = g.edges();
    if edges.len() < k {
        return None;
    }
    edges.shuffle(rng);
    edges.truncate(k);
    Some(contract_edges(g, &edges).expect("edges of g"))
}

/// A random marked morphism out of the stable graph `x`.
pub fn random_marked<R: Rng>(rng: &mut R, x: &AGraph, target_rank: usize) -> MarkedMorphism {
    let comb = random_combinatorial_into(rng, x, target_rank);
    let k = rng.gen_range(0..=comb.source.edges().len().min(2));
    let contr = random_contraction(rng, &comb.source, k).expect("enough edges");
    MarkedMorphism {
        hom: comb.hom.clone(),
        comb,
        contr,
    }
}

/// A random isogeny with at most `steps` elementary steps.
pub fn random_isogeny<R: Rng>(rng: &mut R, g: &AGraph, steps: usize) -> Isogeny {
    let mut iso = Isogeny::identity(g);
    for _ in 0..steps {
        let cur = iso.target().clone();
        let forgettable: Vec<FlagId> = cur
            .tails()
            .into_iter()
            .filter(|&t| stably_forget_tail(&cur, t).is_ok_and(|s| s.kind != ForgetType::IV))
            .collect();
        let edges = cur.edges();
        let forget = !forgettable.is_empty() && (edges.is_empty() || rng.gen_bool(0.5));
        iso = if forget {
            iso.forget(*forgettable.choose(rng).expect("nonempty"))
        } else if let Some(e) = edges.choose(rng) {
            iso.contract(e.lo)
        } else {
            break;
        }
        .expect("step chosen from valid candidates");
    }
    iso
}
