//! Canonical labelling of small graphs.
//!
//! Vertices are ordered by colour refinement followed by an exhaustive
//! individualization search, keeping the lexicographically least encoding.
//! Connected components are canonized separately and concatenated in key
//! order, and vertices that are interchangeable twins are explored once.
//!
//! Extra labels on vertices and flags let the same machinery compare
//! morphisms: label every vertex and flag of the middle graph by its images
//! under the morphism's maps and compare the resulting keys.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{AGraph, FlagId, VertexId};
use crate::semigroup::MonoidElement;

pub const DEFAULT_MAX_FLAGS: usize = 16;

/// Complete isomorphism invariant of a labelled graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey<L, M> {
    rank: usize,
    vertices: Vec<(u32, MonoidElement, L, Vec<M>)>,
    edges: Vec<(u32, M, u32, M)>,
}

/// Canonical key together with the relabelling that realises it.
#[derive(Clone, Debug)]
pub struct Labeling<L, M> {
    pub key: CanonicalKey<L, M>,
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub flag_map: BTreeMap<FlagId, FlagId>,
}

pub type GraphKey = CanonicalKey<(), ()>;

struct Problem<'a, L, M> {
    ids: Vec<VertexId>,
    genus: Vec<u32>,
    class: Vec<&'a MonoidElement>,
    vlabel: Vec<L>,
    tails: Vec<Vec<M>>,
    /// (neighbour, own flag label, neighbour's flag label) per edge flag
    adj: Vec<Vec<(usize, M, M)>>,
    /// every edge once, as (end, label, end, label)
    edges: Vec<(usize, M, usize, M)>,
}

impl<'a, L: Ord + Clone, M: Ord + Clone> Problem<'a, L, M> {
    fn new(
        g: &'a AGraph,
        vlabel: &impl Fn(VertexId) -> L,
        flabel: &impl Fn(FlagId) -> M,
    ) -> Self {
        let ids: Vec<VertexId> = g.vertex_ids().collect();
        let index: BTreeMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut tails = vec![Vec::new(); ids.len()];
        let mut adj = vec![Vec::new(); ids.len()];
        let edges = g
            .edges()
            .into_iter()
            .map(|e| {
                (
                    index[&g.boundary(e.lo)],
                    flabel(e.lo),
                    index[&g.boundary(e.hi)],
                    flabel(e.hi),
                )
            })
            .collect();
        for f in g.flag_ids() {
            let i = index[&g.boundary(f)];
            let p = g.partner(f);
            if p == f {
                tails[i].push(flabel(f));
            } else {
                adj[i].push((index[&g.boundary(p)], flabel(f), flabel(p)));
            }
        }
        for t in &mut tails {
            t.sort();
        }
        Problem {
            genus: ids.iter().map(|&v| g.genus_of(v)).collect(),
            class: ids.iter().map(|&v| g.class_of(v)).collect(),
            vlabel: ids.iter().map(|&v| vlabel(v)).collect(),
            ids,
            tails,
            adj,
            edges,
        }
    }

    fn base(&self, i: usize) -> (u32, &MonoidElement, &L, &Vec<M>) {
        (self.genus[i], self.class[i], &self.vlabel[i], &self.tails[i])
    }

    fn initial_colors(&self, members: &[usize]) -> BTreeMap<usize, usize> {
        rank_by(members, |&i| self.base(i))
    }

    fn refine(&self, colors: &mut BTreeMap<usize, usize>) {
        loop {
            let before = distinct(colors);
            let members: Vec<usize> = colors.keys().copied().collect();
            let next = rank_by(&members, |&i| {
                let mut nb: Vec<(usize, &M, &M)> = self.adj[i]
                    .iter()
                    .map(|(j, a, b)| (colors[j], a, b))
                    .collect();
                nb.sort();
                (colors[&i], nb)
            });
            *colors = next;
            if distinct(colors) == before {
                return;
            }
        }
    }

    /// Swapping `u` and `v` preserves all structure and colours.
    fn twins(&self, u: usize, v: usize, colors: &BTreeMap<usize, usize>) -> bool {
        if colors[&u] != colors[&v] || self.base(u) != self.base(v) {
            return false;
        }
        let swap = |x: usize| {
            if x == u {
                v
            } else if x == v {
                u
            } else {
                x
            }
        };
        let profile = |x: usize, relabel: bool| {
            let mut p: Vec<(usize, &M, &M)> = self.adj[x]
                .iter()
                .map(|(j, a, b)| (if relabel { swap(*j) } else { *j }, a, b))
                .collect();
            p.sort();
            p
        };
        // adjacency of u after swapping must equal adjacency of v, and the
        // rest of the graph only sees u and v through their own lists
        if profile(u, true) != profile(v, false) {
            return false;
        }
        colors.keys().all(|&x| {
            x == u || x == v || {
                let mut mapped: Vec<(usize, &M, &M)> = self.adj[x]
                    .iter()
                    .map(|(j, a, b)| (swap(*j), a, b))
                    .collect();
                mapped.sort();
                mapped == profile(x, false)
            }
        })
    }

    fn encode(&self, order: &[usize]) -> CanonicalKey<L, M> {
        let pos: BTreeMap<usize, u32> = order
            .iter()
            .enumerate()
            .map(|(p, &i)| (i, p as u32))
            .collect();
        let vertices = order
            .iter()
            .map(|&i| {
                (
                    self.genus[i],
                    self.class[i].clone(),
                    self.vlabel[i].clone(),
                    self.tails[i].clone(),
                )
            })
            .collect();
        let mut edges: Vec<(u32, M, u32, M)> = self
            .edges
            .iter()
            .filter(|(i, _, _, _)| pos.contains_key(i))
            .map(|(i, a, j, b)| {
                let x = (pos[i], a.clone());
                let y = (pos[j], b.clone());
                let (x, y) = if x <= y { (x, y) } else { (y, x) };
                (x.0, x.1, y.0, y.1)
            })
            .collect();
        edges.sort();
        CanonicalKey {
            rank: self.class.first().map_or(0, |c| c.rank()),
            vertices,
            edges,
        }
    }

    fn search(&self, colors: BTreeMap<usize, usize>, best: &mut Option<(CanonicalKey<L, M>, Vec<usize>)>) {
        let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&i, &c) in &colors {
            cells.entry(c).or_default().push(i);
        }
        let target = cells.values().find(|c| c.len() > 1).cloned();
        match target {
            None => {
                let order: Vec<usize> = cells.values().map(|c| c[0]).collect();
                let key = self.encode(&order);
                if best.as_ref().is_none_or(|(b, _)| key < *b) {
                    *best = Some((key, order));
                }
            }
            Some(cell) => {
                let mut explored: Vec<usize> = Vec::new();
                for &v in &cell {
                    if explored.iter().any(|&u| self.twins(u, v, &colors)) {
                        continue;
                    }
                    explored.push(v);
                    let mut next: BTreeMap<usize, usize> = colors
                        .iter()
                        .map(|(&i, &c)| (i, 2 * c + usize::from(cell.contains(&i) && i != v)))
                        .collect();
                    let members: Vec<usize> = next.keys().copied().collect();
                    let snapshot = next.clone();
                    next = rank_by(&members, |i| snapshot[i]);
                    self.refine(&mut next);
                    self.search(next, best);
                }
            }
        }
    }

    fn component_order(&self, members: &[usize]) -> (CanonicalKey<L, M>, Vec<usize>) {
        let mut colors = self.initial_colors(members);
        self.refine(&mut colors);
        let mut best = None;
        self.search(colors, &mut best);
        best.expect("non-empty component")
    }
}

fn distinct(colors: &BTreeMap<usize, usize>) -> usize {
    let mut v: Vec<usize> = colors.values().copied().collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn rank_by<K: Ord>(members: &[usize], key: impl Fn(&usize) -> K) -> BTreeMap<usize, usize> {
    let keyed: Vec<(K, usize)> = members.iter().map(|i| (key(i), *i)).collect();
    let mut sorted: Vec<&K> = keyed.iter().map(|(k, _)| k).collect();
    sorted.sort();
    sorted.dedup();
    keyed
        .iter()
        .map(|(k, i)| (*i, sorted.binary_search(&k).expect("present")))
        .collect()
}

/// Canonical labelling of `g` with extra vertex and flag labels.
pub fn canonical_labeling<L: Ord + Clone, M: Ord + Clone>(
    g: &AGraph,
    vlabel: impl Fn(VertexId) -> L,
    flabel: impl Fn(FlagId) -> M,
) -> Labeling<L, M> {
    let problem = Problem::new(g, &vlabel, &flabel);
    let mut comps: Vec<(CanonicalKey<L, M>, Vec<usize>)> = g
        .connected_components()
        .iter()
        .map(|c| {
            let members: Vec<usize> = c
                .iter()
                .map(|v| problem.ids.binary_search(v).expect("vertex"))
                .collect();
            problem.component_order(&members)
        })
        .collect();
    comps.sort_by(|a, b| a.0.cmp(&b.0));
    let order: Vec<usize> = comps.into_iter().flat_map(|(_, o)| o).collect();
    let mut key = problem.encode(&order);
    key.rank = g.rank();

    let vertex_map: BTreeMap<VertexId, VertexId> = order
        .iter()
        .enumerate()
        .map(|(p, &i)| (problem.ids[i], VertexId(p as u32)))
        .collect();

    // tails first, by position then label; then edges in key order
    let mut tails: Vec<(u32, M, FlagId)> = g
        .tails()
        .into_iter()
        .map(|f| (vertex_map[&g.boundary(f)].0, flabel(f), f))
        .collect();
    tails.sort();
    let mut edges: Vec<((u32, M), (u32, M), FlagId, FlagId)> = g
        .edges()
        .into_iter()
        .map(|e| {
            let a = ((vertex_map[&g.boundary(e.lo)].0, flabel(e.lo)), e.lo);
            let b = ((vertex_map[&g.boundary(e.hi)].0, flabel(e.hi)), e.hi);
            let (x, y) = if a.0 <= b.0 { (a, b) } else { (b, a) };
            (x.0, y.0, x.1, y.1)
        })
        .collect();
    edges.sort();
    let mut flag_map = BTreeMap::new();
    let mut next = 0u32;
    for (_, _, f) in tails {
        flag_map.insert(f, FlagId(next));
        next += 1;
    }
    for (_, _, a, b) in edges {
        flag_map.insert(a, FlagId(next));
        flag_map.insert(b, FlagId(next + 1));
        next += 2;
    }
    Labeling {
        key,
        vertex_map,
        flag_map,
    }
}

/// Isomorphism invariant of the bare A-graph.
pub fn graph_key(g: &AGraph) -> GraphKey {
    canonical_labeling(g, |_| (), |_| ()).key
}

fn capped(g: &AGraph, max_flags: usize) -> Result<()> {
    if g.num_flags() > max_flags {
        Err(Error::SizeCap {
            flags: g.num_flags(),
            cap: max_flags,
        })
    } else {
        Ok(())
    }
}

/// Applies a relabelling to a graph.
pub fn relabel(
    g: &AGraph,
    vertex_map: &BTreeMap<VertexId, VertexId>,
    flag_map: &BTreeMap<FlagId, FlagId>,
) -> AGraph {
    let mut out = AGraph::empty(g.rank());
    for (v, data) in g.vertices() {
        out.insert_vertex(vertex_map[&v], data.genus, data.class.clone());
    }
    for f in g.flag_ids() {
        out.insert_flag(flag_map[&f], vertex_map[&g.boundary(f)]);
    }
    for e in g.edges() {
        out.join(flag_map[&e.lo], flag_map[&e.hi]);
    }
    out
}

/// Canonically relabelled copy: identical for isomorphic inputs.
pub fn canonical_form(g: &AGraph, max_flags: usize) -> Result<AGraph> {
    capped(g, max_flags)?;
    let l = canonical_labeling(g, |_| (), |_| ());
    Ok(relabel(g, &l.vertex_map, &l.flag_map))
}

pub fn is_isomorphic(a: &AGraph, b: &AGraph, max_flags: usize) -> Result<bool> {
    capped(a, max_flags)?;
    capped(b, max_flags)?;
    Ok(a.num_flags() == b.num_flags()
        && a.num_vertices() == b.num_vertices()
        && graph_key(a) == graph_key(b))
}

/// Isomorphism test without a size cap, for internal comparisons.
pub fn isomorphic(a: &AGraph, b: &AGraph) -> bool {
    a.num_flags() == b.num_flags()
        && a.num_vertices() == b.num_vertices()
        && a.rank() == b.rank()
        && graph_key(a) == graph_key(b)
}
