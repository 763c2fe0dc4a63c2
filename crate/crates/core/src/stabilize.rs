//! Stabilization of A-graphs and pushforward along monoid homomorphisms.
//!
//! [`stabilize`] removes one unstable vertex at a time, scanning vertex ids
//! in ascending order and trying the rewrite cases in the order I, II, III, IV:
//!
//! * **I**: a genus-0, class-0 vertex whose only flag is half of an edge.
//!   The vertex goes, the other half becomes a tail.
//! * **II**: a genus-0, class-0 vertex with one tail and one edge flag.
//!   Both flags go, the far end of the edge becomes a tail.
//! * **III**: a genus-0, class-0 vertex with two edge flags that are not a
//!   loop. The vertex goes and the two far ends are joined.
//! * **IV**: a class-0 vertex with `2g + |v| < 3` whose flags are tails or
//!   loops at the vertex. Vertex and flags vanish.
//!
//! Every surviving flag and vertex keeps its id, so the structure map
//! `τˢ → τ` is an inclusion.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{AGraph, FlagId, VertexId};
use crate::morphism::{enumerate_combinatorial_morphisms, CombinatorialMorphism, Contraction};
use crate::pullback::MarkedMorphism;
use crate::semigroup::MonoidHom;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum StabilizationCase {
    I,
    II,
    III,
    IV,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizationStep {
    pub case: StabilizationCase,
    pub vertex: VertexId,
    pub removed_flags: Vec<FlagId>,
    /// Flags that were half of an edge before the step and are tails after it.
    pub new_tails: Vec<FlagId>,
    /// The edge created by Case III.
    pub joined: Option<(FlagId, FlagId)>,
}

#[derive(Clone, Debug)]
pub struct Stabilization {
    pub graph: AGraph,
    /// The inclusion `graph -> original`.
    pub morphism: CombinatorialMorphism,
    pub steps: Vec<StabilizationStep>,
}

/// Which rewrite applies at `v`, if any.
pub fn stabilization_case(g: &AGraph, v: VertexId) -> Option<StabilizationCase> {
    let data = g.vertex(v).ok()?;
    if !data.class.is_zero() {
        return None;
    }
    let flags = g.flags_at(v);
    if data.genus == 0 {
        match flags[..] {
            [f] if !g.is_tail(f) => return Some(StabilizationCase::I),
            [a, b] => {
                let (ta, tb) = (g.is_tail(a), g.is_tail(b));
                if ta != tb {
                    return Some(StabilizationCase::II);
                }
                if !ta && g.partner(a) != b {
                    return Some(StabilizationCase::III);
                }
            }
            _ => {}
        }
    }
    let closed = flags.iter().all(|&f| g.boundary(g.partner(f)) == v);
    if 2 * data.genus as usize + flags.len() < 3 && closed {
        return Some(StabilizationCase::IV);
    }
    None
}

/// Applies one rewrite at `v` in place.
fn apply(g: &mut AGraph, v: VertexId, case: StabilizationCase) -> StabilizationStep {
    let flags = g.flags_at(v);
    let mut step = StabilizationStep {
        case,
        vertex: v,
        removed_flags: flags.clone(),
        new_tails: Vec::new(),
        joined: None,
    };
    match case {
        StabilizationCase::I | StabilizationCase::II => {
            let edge_flag = *flags.iter().find(|&&f| !g.is_tail(f)).expect("edge flag");
            step.new_tails.push(g.partner(edge_flag));
        }
        StabilizationCase::III => {
            let (p, q) = (g.partner(flags[0]), g.partner(flags[1]));
            step.joined = Some((p.min(q), p.max(q)));
        }
        StabilizationCase::IV => {}
    }
    for &f in &flags {
        g.remove_flag(f);
    }
    if let Some((p, q)) = step.joined {
        g.join(p, q);
    }
    g.remove_vertex(v);
    step
}

pub fn stabilize(g: &AGraph) -> Stabilization {
    let mut current = g.clone();
    let mut steps = Vec::new();
    loop {
        let next = current
            .vertex_ids()
            .find_map(|v| stabilization_case(&current, v).map(|c| (v, c)));
        match next {
            Some((v, case)) => steps.push(apply(&mut current, v, case)),
            None => break,
        }
    }
    Stabilization {
        morphism: CombinatorialMorphism::inclusion(&current, g, MonoidHom::identity(g.rank())),
        graph: current,
        steps,
    }
}

/// Applies the rewrites in a caller-chosen vertex order: at each step the
/// first vertex of `order` that admits a case is rewritten.
pub fn stabilize_in_order(g: &AGraph, order: &[VertexId]) -> Stabilization {
    let mut current = g.clone();
    let mut steps = Vec::new();
    while let Some((v, case)) = order
        .iter()
        .find_map(|&v| stabilization_case(&current, v).map(|c| (v, c)))
    {
        steps.push(apply(&mut current, v, case));
    }
    let rest = stabilize(&current);
    steps.extend(rest.steps);
    Stabilization {
        morphism: CombinatorialMorphism::inclusion(&rest.graph, g, MonoidHom::identity(g.rank())),
        graph: rest.graph,
        steps,
    }
}

/// Relabels classes along `xi` and stabilizes. The marked morphism is
/// `(ξ, a, ξ_*τ, id)` with `a` the structure inclusion.
pub fn pushforward(xi: &MonoidHom, g: &AGraph) -> Result<(AGraph, MarkedMorphism)> {
    let relabelled = g.map_classes(xi)?;
    let st = stabilize(&relabelled);
    let comb = CombinatorialMorphism::inclusion(&st.graph, g, xi.clone());
    let m = MarkedMorphism {
        hom: xi.clone(),
        comb,
        contr: Contraction::identity(&st.graph),
    };
    Ok((st.graph, m))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct UniversalPropertyReport {
    pub sources_checked: usize,
    pub morphisms_checked: usize,
    pub counterexamples: Vec<String>,
}

impl UniversalPropertyReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Largest graph accepted by [`check_universal_property`].
pub const UNIVERSAL_CHECK_MAX_FLAGS: usize = 10;

/// Brute-force check that every morphism from a stable graph of `pool` into
/// `g` factors through the stabilization in exactly one way.
pub fn check_universal_property(g: &AGraph, pool: &[AGraph]) -> Result<UniversalPropertyReport> {
    if g.num_flags() > UNIVERSAL_CHECK_MAX_FLAGS {
        return Err(Error::SizeCap {
            flags: g.num_flags(),
            cap: UNIVERSAL_CHECK_MAX_FLAGS,
        });
    }
    let st = stabilize(g);
    let id = MonoidHom::identity(g.rank());
    let mut report = UniversalPropertyReport::default();
    if !st.graph.is_stable() {
        report.counterexamples.push("stabilization is not stable".into());
    }
    if let Err(e) = st.morphism.validate() {
        report.counterexamples.push(format!("structure map invalid: {e}"));
    }
    for sigma in pool.iter().filter(|s| s.rank() == g.rank()) {
        if !sigma.is_stable() {
            continue;
        }
        report.sources_checked += 1;
        let direct = enumerate_combinatorial_morphisms(sigma, g, &id)?;
        let through = enumerate_combinatorial_morphisms(sigma, &st.graph, &id)?;
        let composites: Vec<CombinatorialMorphism> = through
            .iter()
            .map(|n| st.morphism.after(n))
            .collect::<Result<_>>()?;
        for m in &direct {
            report.morphisms_checked += 1;
            let hits = composites
                .iter()
                .filter(|c| c.flag_map == m.flag_map && c.vertex_map == m.vertex_map)
                .count();
            if hits != 1 {
                report.counterexamples.push(format!(
                    "{hits} factorizations of a morphism {sigma:?} -> {g:?}"
                ));
            }
        }
        for c in &composites {
            if c.validate().is_err() {
                report
                    .counterexamples
                    .push(format!("composite through stabilization invalid for {sigma:?}"));
            }
        }
    }
    Ok(report)
}
