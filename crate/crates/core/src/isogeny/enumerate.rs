//! Admissible subcategories and exhaustive listing of stable graphs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::canon::{canonical_form, graph_key};
use crate::error::{Error, Result};
use crate::graph::{AGraph, GraphBuilder};
use crate::semigroup::{LinearForm, MonoidElement};

use super::VarietyProfile;

/// Flag cap applied by [`enumerate_stable_graphs`] unless overridden.
pub const DEFAULT_ENUMERATION_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdmissibleFilter {
    /// Tree level: no cycles, every genus zero.
    Forest,
    /// Every vertex class has degree below `bound` under `form`.
    DegreeBound { form: LinearForm, bound: i64 },
}

pub fn is_admissible_member(g: &AGraph, filter: &AdmissibleFilter) -> Result<bool> {
    match filter {
        AdmissibleFilter::Forest => Ok(g.is_forest()),
        AdmissibleFilter::DegreeBound { form, bound } => {
            for (_, v) in g.vertices() {
                if form.eval(&v.class)? >= *bound {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationConstraints {
    /// Total genus `h¹ + Σ g(v)`.
    pub genus: u32,
    pub tails: usize,
    /// Bound on the ample degree of the total class.
    pub max_degree: u64,
    pub max_vertices: usize,
    #[serde(default)]
    pub filter: Option<AdmissibleFilter>,
    /// Largest flag count that may be generated.
    #[serde(default = "default_cap")]
    pub max_flags: usize,
}

fn default_cap() -> usize {
    DEFAULT_ENUMERATION_CAP
}

impl EnumerationConstraints {
    pub fn new(genus: u32, tails: usize, max_degree: u64, max_vertices: usize) -> Self {
        EnumerationConstraints {
            genus,
            tails,
            max_degree,
            max_vertices,
            filter: None,
            max_flags: DEFAULT_ENUMERATION_CAP,
        }
    }
}

/// All classes of ample degree at most `bound`, lexicographically.
fn classes_up_to(ample: &LinearForm, bound: u64) -> Vec<(MonoidElement, u64)> {
    fn go(
        coeffs: &[i64],
        left: u64,
        prefix: &mut Vec<u64>,
        used: u64,
        out: &mut Vec<(MonoidElement, u64)>,
    ) {
        let Some((&c, rest)) = coeffs.split_first() else {
            out.push((MonoidElement::new(prefix.clone()), used));
            return;
        };
        let c = c as u64;
        for x in 0..=left / c {
            prefix.push(x);
            go(rest, left - x * c, prefix, used + x * c, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(ample.coeffs(), bound, &mut Vec::new(), 0, &mut out);
    out
}

/// Non-decreasing sequences of length `len` drawn from `0..n`.
fn multisets(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn go(n: usize, len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(n, len, i, cur, out);
            cur.pop();
        }
    }
    go(n, len, 0, &mut cur, &mut out);
    out
}

/// Ways to write `total` as an ordered sum of `parts` naturals.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut comps = n;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    comps == 1
}

/// Every connected stable graph within the constraints, one canonical form
/// per isomorphism class, ordered by canonical key.
pub fn enumerate_stable_graphs(
    p: &VarietyProfile,
    c: &EnumerationConstraints,
) -> Result<Vec<AGraph>> {
    let worst = c.tails + 2 * (c.max_vertices.saturating_sub(1) + c.genus as usize);
    if worst > c.max_flags {
        return Err(Error::SizeCap {
            flags: worst,
            cap: c.max_flags,
        });
    }
    let classes = classes_up_to(&p.ample, c.max_degree);
    let mut found = BTreeMap::new();
    for nv in 1..=c.max_vertices {
        let pairs: Vec<(usize, usize)> = (0..nv)
            .flat_map(|i| (i..nv).map(move |j| (i, j)))
            .collect();
        for betti in 0..=c.genus as usize {
            let ne = nv - 1 + betti;
            for pick in multisets(pairs.len(), ne) {
                let edges: Vec<(usize, usize)> = pick.iter().map(|&i| pairs[i]).collect();
                if !connected(nv, &edges) {
                    continue;
                }
                for genera in compositions(c.genus as usize - betti, nv) {
                    for tails in compositions(c.tails, nv) {
                        let mut choice = vec![0; nv];
                        loop {
                            let degree: u64 = choice.iter().map(|&i| classes[i].1).sum();
                            if degree <= c.max_degree {
                                let g = build(p.rank(), &edges, &genera, &tails, &choice, &classes);
                                if g.is_stable()
                                    && match &c.filter {
                                        Some(f) => is_admissible_member(&g, f)?,
                                        None => true,
                                    }
                                {
                                    found
                                        .entry(graph_key(&g))
                                        .or_insert(canonical_form(&g, c.max_flags)?);
                                }
                            }
                            if !advance(&mut choice, classes.len()) {
                                break;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(found.into_values().collect())
}

fn advance(choice: &mut [usize], n: usize) -> bool {
    for x in choice.iter_mut().rev() {
        *x += 1;
        if *x < n {
            return true;
        }
        *x = 0;
    }
    false
}

fn build(
    rank: usize,
    edges: &[(usize, usize)],
    genera: &[usize],
    tails: &[usize],
    choice: &[usize],
    classes: &[(MonoidElement, u64)],
) -> AGraph {
    let mut b = GraphBuilder::new(rank);
    let vs: Vec<_> = genera
        .iter()
        .zip(choice)
        .map(|(&g, &k)| b.vertex(g as u32, classes[k].0.coords()))
        .collect();
    for (&v, &n) in vs.iter().zip(tails) {
        for _ in 0..n {
            b.tail(v);
        }
    }
    for &(i, j) in edges {
        b.edge(vs[i], vs[j]);
    }
    b.build()
}
