//! Independent oracles and instance pools shared by the integration tests.
//!
//! Nothing here calls the library's own versions of what it checks: betti
//! numbers come from an incidence matrix over GF(2), flag equivalence from a
//! literal chain search, morphisms from brute force.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use modgraph::graph::{AGraph, FlagId, VertexId};
use modgraph::morphism::CombinatorialMorphism;
use modgraph::sample::{self, GraphParams};
use modgraph::semigroup::MonoidHom;
use modgraph::{GraphBuilder, MonoidElement};
use rand::Rng;

/// First Betti number as `#E - rank` of the edge-vertex incidence matrix
/// over GF(2); loops give zero rows.
pub fn gf2_betti(g: &AGraph) -> usize {
    let vs: Vec<VertexId> = g.vertex_ids().collect();
    let col = |v: VertexId| vs.iter().position(|&w| w == v).unwrap();
    let mut seen = BTreeSet::new();
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for f in g.flag_ids() {
        let p = g.partner(f);
        if p == f || !seen.insert(f.min(p)) {
            continue;
        }
        let mut row = vec![0u8; vs.len()];
        row[col(g.boundary(f))] ^= 1;
        row[col(g.boundary(p))] ^= 1;
        rows.push(row);
    }
    let edges = rows.len();
    let mut rank = 0;
    for c in 0..vs.len() {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c] == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] == 1 {
                let pivot_row = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot_row) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    edges - rank
}

fn is_null(g: &AGraph, v: VertexId) -> bool {
    g.genus_of(v) == 0 && g.class_of(v).is_zero()
}

/// Whether a chain `f_1, f̄_1, ..., f_n, f̄_n` in `tgt` runs from `start` to
/// `end`: consecutive pairs are partners, and a step to a different flag at
/// the same vertex is allowed only at a null vertex.
pub fn chain_exists(tgt: &AGraph, start: FlagId, end: FlagId) -> bool {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(f) = queue.pop_front() {
        let fbar = tgt.partner(f);
        if fbar == end {
            return true;
        }
        let v = tgt.boundary(fbar);
        let mut next = vec![fbar];
        if is_null(tgt, v) {
            next.extend(tgt.flags_at(v));
        }
        for n in next {
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    false
}

/// Condition 3 of a combinatorial morphism, read literally: every edge of
/// the source has a chain between the images of its two flags in the target
/// with classes pushed along the homomorphism.
pub fn literal_condition_three(a: &CombinatorialMorphism) -> bool {
    let pushed = a.target.map_classes(&a.hom).unwrap();
    a.source.flag_ids().all(|f| {
        let fbar = a.source.partner(f);
        f == fbar || chain_exists(&pushed, a.flag_map[&f], a.flag_map[&fbar])
    })
}

/// All five conditions, checked from scratch.
pub fn oracle_is_morphism(a: &CombinatorialMorphism) -> bool {
    let (s, t) = (&a.source, &a.target);
    let pushed = t.map_classes(&a.hom).unwrap();
    let commutes = s
        .flag_ids()
        .all(|f| a.vertex_map[&s.boundary(f)] == t.boundary(a.flag_map[&f]));
    let injective = s.vertex_ids().all(|v| {
        let imgs: BTreeSet<FlagId> = s.flags_at(v).iter().map(|f| a.flag_map[f]).collect();
        imgs.len() == s.flags_at(v).len()
    });
    let data = s.vertex_ids().all(|v| {
        let w = a.vertex_map[&v];
        s.genus_of(v) == t.genus_of(w) && s.class_of(v) == pushed.class_of(w)
    });
    commutes && injective && data && literal_condition_three(a)
}

/// Every combinatorial morphism `s -> t` covering `hom`, by brute force over
/// vertex maps and then injections of flags at each vertex.
pub fn brute_force_morphisms(
    s: &AGraph,
    t: &AGraph,
    hom: &MonoidHom,
) -> Vec<CombinatorialMorphism> {
    let svs: Vec<VertexId> = s.vertex_ids().collect();
    let tvs: Vec<VertexId> = t.vertex_ids().collect();
    let mut out = Vec::new();
    if tvs.is_empty() && !svs.is_empty() {
        return out;
    }
    let mut choice = vec![0usize; svs.len()];
    loop {
        let vmap: BTreeMap<VertexId, VertexId> =
            svs.iter().zip(&choice).map(|(&v, &i)| (v, tvs[i])).collect();
        let mut partial: Vec<BTreeMap<FlagId, FlagId>> = vec![BTreeMap::new()];
        for &v in &svs {
            let avail = t.flags_at(vmap[&v]);
            let mut next = Vec::new();
            for m in &partial {
                for inj in injections(&s.flags_at(v), &avail) {
                    let mut m2 = m.clone();
                    m2.extend(inj);
                    next.push(m2);
                }
            }
            partial = next;
        }
        for fmap in partial {
            let a = CombinatorialMorphism {
                source: s.clone(),
                target: t.clone(),
                hom: hom.clone(),
                flag_map: fmap,
                vertex_map: vmap.clone(),
            };
            if oracle_is_morphism(&a) {
                out.push(a);
            }
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < tvs.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn injections(from: &[FlagId], to: &[FlagId]) -> Vec<Vec<(FlagId, FlagId)>> {
    let Some((&first, rest)) = from.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    for &x in to {
        let remaining: Vec<FlagId> = to.iter().copied().filter(|&y| y != x).collect();
        for mut tail in injections(rest, &remaining) {
            tail.insert(0, (first, x));
            out.push(tail);
        }
    }
    out
}

/// Complete isomorphism invariant for graphs with at most two vertices:
/// per-vertex (genus, class, tails, loops) and the number of edges between
/// the two vertices, minimized over vertex orders.
pub fn small_graph_invariant(g: &AGraph) -> (Vec<(u32, Vec<u64>, usize, usize)>, usize) {
    assert!(g.num_vertices() <= 2);
    let vs: Vec<VertexId> = g.vertex_ids().collect();
    let data = |v: VertexId| {
        let flags = g.flags_at(v);
        let tails = flags.iter().filter(|&&f| g.partner(f) == f).count();
        let loops = flags
            .iter()
            .filter(|&&f| g.partner(f) != f && g.boundary(g.partner(f)) == v)
            .count()
            / 2;
        (g.genus_of(v), g.class_of(v).coords().to_vec(), tails, loops)
    };
    let between = g
        .flag_ids()
        .filter(|&f| g.partner(f) != f && g.boundary(g.partner(f)) != g.boundary(f))
        .count()
        / 2;
    let mut vdata: Vec<_> = vs.iter().map(|&v| data(v)).collect();
    vdata.sort();
    (vdata, between)
}

/// Generate-filter-dedup listing of connected stable graphs with at most two
/// vertices, given genus total, tail count and a bound on the total class of
/// a rank-1 graph. Involutions are taken in a fixed normal form: tails
/// first, then consecutive pairs.
pub fn brute_force_small_stable(
    genus: u32,
    tails: usize,
    max_class: u64,
    max_edges: usize,
) -> BTreeSet<(Vec<(u32, Vec<u64>, usize, usize)>, usize)> {
    let mut out = BTreeSet::new();
    for nv in 1..=2usize {
        for ne in 0..=max_edges {
            let nf = tails + 2 * ne;
            let total = nv.pow(nf as u32);
            for code in 0..total {
                let mut c = code;
                let bnd: Vec<usize> = (0..nf)
                    .map(|_| {
                        let x = c % nv;
                        c /= nv;
                        x
                    })
                    .collect();
                for genera in 0..(genus as usize + 1).pow(nv as u32) {
                    for classes in 0..(max_class as usize + 1).pow(nv as u32) {
                        let gs: Vec<u32> = (0..nv)
                            .map(|i| ((genera / (genus as usize + 1).pow(i as u32)) % (genus as usize + 1)) as u32)
                            .collect();
                        let cs: Vec<u64> = (0..nv)
                            .map(|i| ((classes / (max_class as usize + 1).pow(i as u32)) % (max_class as usize + 1)) as u64)
                            .collect();
                        if cs.iter().sum::<u64>() > max_class {
                            continue;
                        }
                        let mut b = GraphBuilder::new(1);
                        let vs: Vec<VertexId> =
                            (0..nv).map(|i| b.vertex(gs[i], &[cs[i]])).collect();
                        for &x in bnd.iter().take(tails) {
                            b.tail(vs[x]);
                        }
                        for e in 0..ne {
                            b.edge(vs[bnd[tails + 2 * e]], vs[bnd[tails + 2 * e + 1]]);
                        }
                        let g = b.build();
                        if !oracle_connected(&g) {
                            continue;
                        }
                        let h: u32 = gf2_betti(&g) as u32 + gs.iter().sum::<u32>();
                        if h != genus {
                            continue;
                        }
                        let stable = g.vertex_ids().all(|v| {
                            !g.class_of(v).is_zero()
                                || 2 * g.genus_of(v) as usize + g.flags_at(v).len() >= 3
                        });
                        if stable {
                            out.insert(small_graph_invariant(&g));
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn oracle_connected(g: &AGraph) -> bool {
    let vs: Vec<VertexId> = g.vertex_ids().collect();
    let Some(&start) = vs.first() else {
        return false;
    };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for f in g.flags_at(v) {
            let w = g.boundary(g.partner(f));
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == vs.len()
}

/// A random candidate morphism that satisfies every condition except
/// possibly the third: source vertices copy target vertex data, source flags
/// inject into the flags at the image vertex, and source edges pair them up
/// at random.
pub fn random_candidate<R: Rng>(rng: &mut R, t: &AGraph) -> Option<CombinatorialMorphism> {
    let tvs: Vec<VertexId> = t.vertex_ids().collect();
    if tvs.is_empty() {
        return None;
    }
    let mut b = GraphBuilder::new(t.rank());
    let mut images = Vec::new();
    let mut vmap = BTreeMap::new();
    let nv = rng.gen_range(1..=3);
    for _ in 0..nv {
        let w = tvs[rng.gen_range(0..tvs.len())];
        let v = b.vertex(t.genus_of(w), t.class_of(w).coords());
        vmap.insert(v, w);
        let mut avail = t.flags_at(w);
        let k = rng.gen_range(0..=avail.len());
        for _ in 0..k {
            let x = avail.remove(rng.gen_range(0..avail.len()));
            images.push((v, x));
        }
    }
    // build every flag as a tail, then pair some of them into edges
    let mut flags = Vec::new();
    for &(v, x) in &images {
        flags.push((b.tail(v), x));
    }
    let g = b.build();
    let boundary: BTreeMap<FlagId, VertexId> = g.boundary_map();
    let mut involution: BTreeMap<FlagId, FlagId> = g.involution_map();
    let mut order: Vec<FlagId> = flags.iter().map(|p| p.0).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    for pair in order.chunks(2) {
        if pair.len() == 2 && rng.gen_bool(0.6) {
            involution.insert(pair[0], pair[1]);
            involution.insert(pair[1], pair[0]);
        }
    }
    let vertices = g
        .vertices()
        .map(|(id, v)| (id, v.clone()))
        .collect::<Vec<_>>();
    let source = AGraph::from_parts(t.rank(), vertices, &boundary, &involution).unwrap();
    Some(CombinatorialMorphism {
        source,
        target: t.clone(),
        hom: MonoidHom::identity(t.rank()),
        flag_map: flags.into_iter().collect(),
        vertex_map: vmap,
    })
}

pub fn small_params(rank: usize, max_flags: usize) -> GraphParams {
    GraphParams {
        rank,
        max_vertices: 4,
        max_flags,
        max_genus: 1,
        max_class: 1,
        connected: true,
    }
}

/// At least `n` unstable graphs with at most `max_flags` flags.
pub fn unstable_pool(seed: u64, n: usize, max_flags: usize) -> Vec<AGraph> {
    let mut rng = sample::rng(seed);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    while out.len() < n {
        let rank = rng.gen_range(0..=1);
        let p = small_params(rank, max_flags);
        if let Some(g) = sample::random_unstable_graph(&mut rng, &p) {
            if seen.insert(format!("{:?}", modgraph::canon::graph_key(&g))) {
                out.push(g);
            }
        }
    }
    out
}

pub fn el(v: &[u64]) -> MonoidElement {
    MonoidElement::new(v.to_vec())
}
