//! Stable pullback and the category of marked stable graphs.
//!
//! Given a contraction `φ: σ → τ` of A-graphs and a combinatorial morphism
//! `a: ρ → τ` covering `ξ: A → B` with `ρ` a stable B-graph, the stable
//! pullback produces
//!
//! ```text
//!     π ──ψ──▶ ρ
//!     │b       │a
//!     ▼        ▼
//!     σ ──φ──▶ τ
//! ```
//!
//! with `π` stable over `B`. Only the vertex square commutes in general.

use std::collections::BTreeMap;

use crate::canon::{canonical_labeling, isomorphic};
use crate::error::{check, Error, Result, Violation};
use crate::graph::{AGraph, Edge, FlagId, VertexId};
use crate::morphism::{CombinatorialMorphism, Contraction};
use crate::semigroup::MonoidHom;

/// A morphism `(A, τ) → (B, σ)`: a homomorphism `ξ: A → B`, a stable
/// B-graph `τ'`, a combinatorial morphism `τ' → τ` covering `ξ`, and a
/// contraction `τ' → σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedMorphism {
    pub hom: MonoidHom,
    pub comb: CombinatorialMorphism,
    pub contr: Contraction,
}

impl MarkedMorphism {
    pub fn source(&self) -> &AGraph {
        &self.comb.target
    }

    pub fn target(&self) -> &AGraph {
        &self.contr.target
    }

    pub fn mid(&self) -> &AGraph {
        &self.contr.source
    }

    pub fn identity(g: &AGraph) -> Self {
        MarkedMorphism {
            hom: MonoidHom::identity(g.rank()),
            comb: CombinatorialMorphism::identity(g),
            contr: Contraction::identity(g),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut out = Vec::new();
        if self.comb.source != self.contr.source {
            out.push(Violation::new(
                "marked-mid",
                "combinatorial morphism and contraction start at different graphs",
            ));
        }
        if self.comb.hom != self.hom {
            out.push(Violation::new(
                "marked-hom",
                "combinatorial morphism does not cover the homomorphism",
            ));
        }
        for (name, g) in [
            ("source", self.source()),
            ("middle", self.mid()),
            ("target", self.target()),
        ] {
            if !g.is_stable() {
                out.push(Violation::new("stable", format!("{name} graph is unstable")));
            }
        }
        out.extend(self.comb.violations());
        out.extend(self.contr.violations());
        check(out)
    }

    /// Isomorphism class of the quadruple with fixed endpoints.
    pub fn equivalent(&self, other: &MarkedMorphism) -> bool {
        self.hom == other.hom
            && self.source() == other.source()
            && self.target() == other.target()
            && isomorphic(self.mid(), other.mid())
            && self.key() == other.key()
    }

    fn key(&self) -> impl Eq + std::fmt::Debug {
        let preimage: BTreeMap<FlagId, FlagId> =
            self.contr.flag_map.iter().map(|(&t, &s)| (s, t)).collect();
        canonical_labeling(
            self.mid(),
            |v| (self.comb.vertex_map[&v], self.contr.vertex_map[&v]),
            |f| (self.comb.flag_map[&f], preimage.get(&f).copied()),
        )
        .key
    }
}

/// A contraction between stable graphs, seen as a morphism in the same direction.
pub fn lift_contraction(phi: &Contraction) -> Result<MarkedMorphism> {
    if !phi.source.is_stable() {
        return Err(Error::Precondition("contraction source is unstable".into()));
    }
    phi.validate()?;
    Ok(MarkedMorphism {
        hom: MonoidHom::identity(phi.source.rank()),
        comb: CombinatorialMorphism::identity(&phi.source),
        contr: phi.clone(),
    })
}

/// A combinatorial morphism `σ → τ` between stable graphs, seen as a
/// morphism `τ → σ`.
pub fn lift_combinatorial(a: &CombinatorialMorphism) -> Result<MarkedMorphism> {
    if !a.source.is_stable() || !a.target.is_stable() {
        return Err(Error::Precondition(
            "combinatorial morphism between unstable graphs".into(),
        ));
    }
    a.validate()?;
    Ok(MarkedMorphism {
        hom: a.hom.clone(),
        comb: a.clone(),
        contr: Contraction::identity(&a.source),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pullback {
    pub pi: AGraph,
    pub psi: Contraction,
    pub b: CombinatorialMorphism,
}

impl Pullback {
    /// Isomorphism invariant of `(π, ψ, b)` relative to the fixed `ρ` and `σ`.
    pub fn key(&self) -> impl Eq + std::fmt::Debug {
        let preimage: BTreeMap<FlagId, FlagId> =
            self.psi.flag_map.iter().map(|(&t, &s)| (s, t)).collect();
        canonical_labeling(
            &self.pi,
            |v| (self.b.vertex_map[&v], self.psi.vertex_map[&v]),
            |f| (self.b.flag_map[&f], preimage.get(&f).copied()),
        )
        .key
    }

    pub fn equivalent(&self, other: &Pullback) -> bool {
        self.psi.target == other.psi.target
            && self.b.target == other.b.target
            && self.b.hom == other.b.hom
            && isomorphic(&self.pi, &other.pi)
            && self.key() == other.key()
    }

    /// `ψ_V` then `a_V` equals `b_V` then `φ_V`.
    pub fn vertex_square_commutes(&self, phi: &Contraction, a: &CombinatorialMorphism) -> bool {
        self.pi.vertex_ids().all(|v| {
            a.vertex_map[&self.psi.vertex_map[&v]] == phi.vertex_map[&self.b.vertex_map[&v]]
        })
    }
}

fn check_inputs(phi: &Contraction, a: &CombinatorialMorphism) -> Result<()> {
    if a.target != phi.target {
        return Err(Error::EndpointMismatch(
            "combinatorial morphism and contraction have different targets".into(),
        ));
    }
    if !a.source.is_stable() {
        return Err(Error::Precondition("pulled back graph is unstable".into()));
    }
    phi.validate()?;
    a.validate()
}

/// Stable pullback of `a.source` under `phi`, decomposing `phi` by
/// ascending contracted edge.
pub fn stable_pullback(phi: &Contraction, a: &CombinatorialMorphism) -> Result<Pullback> {
    let order = phi.contracted_edges();
    stable_pullback_in_order(phi, a, &order)
}

/// Stable pullback along an explicit order of the contracted edges; the
/// first edge listed is contracted first.
pub fn stable_pullback_in_order(
    phi: &Contraction,
    a: &CombinatorialMorphism,
    order: &[Edge],
) -> Result<Pullback> {
    check_inputs(phi, a)?;
    let steps = phi.decompose_in_order(order)?;
    let mut current = Pullback {
        pi: a.source.clone(),
        psi: Contraction::identity(&a.source),
        b: a.clone(),
    };
    for step in steps.iter().rev() {
        let next = pullback_elementary(step, &current.b)?;
        current = Pullback {
            psi: current.psi.after(&next.psi)?,
            pi: next.pi,
            b: next.b,
        };
    }
    Ok(current)
}

/// Stable pullback along a single-edge contraction.
fn pullback_elementary(phi: &Contraction, a: &CombinatorialMorphism) -> Result<Pullback> {
    let sigma = &phi.source;
    let rho = &a.source;
    let xi = &a.hom;
    let edge = phi.contracted_edges()[0];
    let (f, fbar) = (edge.lo, edge.hi);
    let (v1, v2) = (sigma.boundary(f), sigma.boundary(fbar));
    let v0 = phi.vertex_map[&v1];

    // σ vertex over each τ vertex away from v0
    let mut preimage = BTreeMap::new();
    for (&s, &t) in &phi.vertex_map {
        preimage.insert(t, s);
    }
    let over: Vec<VertexId> = rho.vertex_ids().filter(|w| a.vertex_map[w] == v0).collect();

    let mut pi = rho.clone();
    let mut b_flags: BTreeMap<FlagId, FlagId> = rho
        .flag_ids()
        .map(|x| (x, phi.flag_map[&a.flag_map[&x]]))
        .collect();
    let mut b_vertices: BTreeMap<VertexId, VertexId> = rho
        .vertex_ids()
        .map(|w| (w, preimage[&a.vertex_map[&w]]))
        .collect();
    let mut psi_vertices: BTreeMap<VertexId, VertexId> = rho.vertex_ids().map(|w| (w, w)).collect();
    let mut next_flag = rho.fresh_flag().0;
    let mut next_vertex = rho.fresh_vertex().0;

    if v1 == v2 {
        for &w in &over {
            let g = rho.genus_of(w);
            if g == 0 {
                return Err(Error::Precondition(format!(
                    "{w} lies over a contracted loop but has genus 0"
                )));
            }
            let (x, y) = (FlagId(next_flag), FlagId(next_flag + 1));
            next_flag += 2;
            pi.set_genus(w, g - 1);
            pi.insert_flag(x, w);
            pi.insert_flag(y, w);
            pi.join(x, y);
            b_flags.insert(x, f);
            b_flags.insert(y, fbar);
            b_vertices.insert(w, v1);
        }
    } else {
        let class1 = xi.apply(sigma.class_of(v1))?;
        let class2 = xi.apply(sigma.class_of(v2))?;
        let (g1, g2) = (sigma.genus_of(v1), sigma.genus_of(v2));
        for &w in &over {
            let flags = rho.flags_at(w);
            let (side1, side2): (Vec<FlagId>, Vec<FlagId>) = flags
                .iter()
                .partition(|&&x| sigma.boundary(b_flags[&x]) == v1);
            let stable = |g: u32, class: &crate::semigroup::MonoidElement, n: usize| {
                !class.is_zero() || 2 * g as usize + n + 1 >= 3
            };
            let ok1 = stable(g1, &class1, side1.len());
            let ok2 = stable(g2, &class2, side2.len());
            assert!(ok1 || ok2, "both halves of a split stable vertex are unstable");
            if ok1 && ok2 {
                let w2 = VertexId(next_vertex);
                next_vertex += 1;
                let (x, y) = (FlagId(next_flag), FlagId(next_flag + 1));
                next_flag += 2;
                pi.set_genus(w, g1);
                pi.set_class(w, class1.clone());
                pi.insert_vertex(w2, g2, class2.clone());
                for &z in &side2 {
                    pi.move_flag(z, w2);
                }
                pi.insert_flag(x, w);
                pi.insert_flag(y, w2);
                pi.join(x, y);
                b_flags.insert(x, f);
                b_flags.insert(y, fbar);
                b_vertices.insert(w, v1);
                b_vertices.insert(w2, v2);
                psi_vertices.insert(w2, w);
            } else if ok1 {
                b_vertices.insert(w, v1);
                for z in side2 {
                    b_flags.insert(z, f);
                }
            } else {
                b_vertices.insert(w, v2);
                for z in side1 {
                    b_flags.insert(z, fbar);
                }
            }
        }
    }

    let psi = Contraction {
        source: pi.clone(),
        target: rho.clone(),
        flag_map: rho.flag_ids().map(|x| (x, x)).collect(),
        vertex_map: psi_vertices,
    };
    let b = CombinatorialMorphism {
        source: pi.clone(),
        target: sigma.clone(),
        hom: xi.clone(),
        flag_map: b_flags,
        vertex_map: b_vertices,
    };
    Ok(Pullback { pi, psi, b })
}

/// `second ∘ first`, composing through the stable pullback of
/// `second`'s middle graph under `first`'s contraction. Endpoints need only
/// agree up to isomorphism.
pub fn compose_marked(second: &MarkedMorphism, first: &MarkedMorphism) -> Result<MarkedMorphism> {
    let second = if second.source() == first.target() {
        second.clone()
    } else {
        transport_source(second, first.target())?
    };
    let pb = stable_pullback(&first.contr, &second.comb)?;
    Ok(MarkedMorphism {
        hom: second.hom.compose(&first.hom)?,
        comb: first.comb.after(&pb.b)?,
        contr: second.contr.after(&pb.psi)?,
    })
}

/// Rewrites `m` so that its source is literally `onto`, given that they are isomorphic.
fn transport_source(m: &MarkedMorphism, onto: &AGraph) -> Result<MarkedMorphism> {
    if !isomorphic(m.source(), onto) {
        return Err(Error::EndpointMismatch(
            "target of the first morphism is not isomorphic to source of the second".into(),
        ));
    }
    let from = canonical_labeling(m.source(), |_| (), |_| ());
    let to = canonical_labeling(onto, |_| (), |_| ());
    let back_v: BTreeMap<VertexId, VertexId> =
        to.vertex_map.iter().map(|(&a, &b)| (b, a)).collect();
    let back_f: BTreeMap<FlagId, FlagId> = to.flag_map.iter().map(|(&a, &b)| (b, a)).collect();
    let mut comb = m.comb.clone();
    comb.target = onto.clone();
    for y in comb.flag_map.values_mut() {
        *y = back_f[&from.flag_map[y]];
    }
    for w in comb.vertex_map.values_mut() {
        *w = back_v[&from.vertex_map[w]];
    }
    Ok(MarkedMorphism {
        hom: m.hom.clone(),
        comb,
        contr: m.contr.clone(),
    })
}
