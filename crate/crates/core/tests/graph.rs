mod common;

use std::collections::BTreeMap;

use modgraph::canon::{canonical_form, graph_key, isomorphic};
use modgraph::graph::{AGraph, FlagId};
use modgraph::sample::{self, GraphParams};
use proptest::prelude::*;

fn params(rank: usize, connected: bool) -> GraphParams {
    GraphParams {
        rank,
        max_vertices: 5,
        max_flags: 12,
        max_genus: 2,
        max_class: 2,
        connected,
    }
}

fn graph(seed: u64, rank: usize, connected: bool) -> AGraph {
    sample::random_graph(&mut sample::rng(seed), &params(rank, connected))
}

/// Finest partition containing every edge and every null vertex's star,
/// by plain union-find.
fn oracle_partition(g: &AGraph) -> BTreeMap<FlagId, FlagId> {
    let mut parent: BTreeMap<FlagId, FlagId> = g.flag_ids().map(|f| (f, f)).collect();
    fn find(p: &mut BTreeMap<FlagId, FlagId>, f: FlagId) -> FlagId {
        let up = p[&f];
        if up == f {
            return f;
        }
        let r = find(p, up);
        p.insert(f, r);
        r
    }
    let union = |p: &mut BTreeMap<FlagId, FlagId>, a: FlagId, b: FlagId| {
        let (x, y) = (find(p, a), find(p, b));
        if x != y {
            p.insert(x.max(y), x.min(y));
        }
    };
    for f in g.flag_ids() {
        union(&mut parent, f, g.partner(f));
    }
    for v in g.vertex_ids() {
        if g.genus_of(v) == 0 && g.class_of(v).is_zero() {
            let fs = g.flags_at(v);
            for w in fs.windows(2) {
                union(&mut parent, w[0], w[1]);
            }
        }
    }
    let ids: Vec<FlagId> = g.flag_ids().collect();
    ids.into_iter().map(|f| (f, find(&mut parent, f))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn flag_counts(seed in any::<u64>(), connected in any::<bool>()) {
        let g = graph(seed, 1, connected);
        let by_vertex: usize = g.vertex_ids().map(|v| g.valence(v).unwrap()).sum();
        prop_assert_eq!(by_vertex, g.num_flags());
        prop_assert_eq!(g.num_flags(), g.tails().len() + 2 * g.edges().len());
    }

    #[test]
    fn betti_matches_gf2(seed in any::<u64>(), connected in any::<bool>()) {
        let g = graph(seed, 0, connected);
        prop_assert_eq!(g.betti1(), common::gf2_betti(&g));
        prop_assert_eq!(g.num_components(), g.connected_components().len());
        prop_assert_eq!(g.num_components() == 1, common::oracle_connected(&g));
    }

    #[test]
    fn chi_and_class_are_additive(a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (graph(a, 2, false), graph(b, 2, true));
        let u = x.disjoint_union(&y).unwrap().graph;
        prop_assert_eq!(u.euler_characteristic(), x.euler_characteristic() + y.euler_characteristic());
        prop_assert_eq!(
            u.total_class(),
            modgraph::semigroup::add(&x.total_class(), &y.total_class()).unwrap()
        );
        prop_assert_eq!(u.num_components(), x.num_components() + y.num_components());
    }

    #[test]
    fn flag_partition_is_the_finest_closure(seed in any::<u64>()) {
        let g = graph(seed, 1, true);
        let oracle = oracle_partition(&g);
        let p = g.flag_partition();
        for a in g.flag_ids() {
            for b in g.flag_ids() {
                prop_assert_eq!(p.same_block(a, b), oracle[&a] == oracle[&b]);
            }
        }
        prop_assert!(p.blocks().iter().all(|b| !b.is_empty()));
    }

    #[test]
    fn canonical_form_is_an_isomorphic_fixpoint(seed in any::<u64>(), connected in any::<bool>()) {
        let g = graph(seed, 1, connected);
        let c = canonical_form(&g, 16).unwrap();
        prop_assert!(isomorphic(&g, &c));
        prop_assert_eq!(&canonical_form(&c, 16).unwrap(), &c);
        let (shuffled, _, _) = sample::shuffle_ids(&mut sample::rng(seed ^ 1), &g);
        prop_assert_eq!(canonical_form(&shuffled, 16).unwrap(), c);
        prop_assert_eq!(graph_key(&shuffled), graph_key(&g));
    }

    #[test]
    fn stable_generator_output_is_stable(seed in any::<u64>()) {
        let g = sample::random_stable_graph(&mut sample::rng(seed), &params(1, true));
        prop_assert!(g.is_stable());
        prop_assert!(g.unstable_vertices().is_empty());
    }
}

#[test]
fn empty_graph_has_zero_invariants() {
    let e = AGraph::empty(1);
    assert_eq!(e.euler_characteristic(), 0);
    assert_eq!(e.betti1(), 0);
    assert!(e.is_stable());
    assert!(e.genus().is_err());
}

#[test]
fn tripod_invariants() {
    let t = AGraph::tripod(0);
    assert_eq!(t.euler_characteristic(), 1);
    assert_eq!(t.genus().unwrap(), 0);
    assert!(t.is_stable() && t.is_forest());
    assert_eq!(t.flag_partition().blocks().len(), 1);
}
