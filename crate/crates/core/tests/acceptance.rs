//! The acceptance suite: eleven criteria, one line of output each.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;
mod golden;

use std::time::Instant;

use itertools::Itertools;
use modgraph::canon::isomorphic;
use modgraph::graph::AGraph;
use modgraph::isogeny::{
    cartesian_pullback, deg_graph, dim_graph, dim_modular, enumerate_stable_graphs,
    ElementaryCartesianMorphism, EnumerationConstraints, ExtendedIsogeny, Isogeny, VarietyProfile,
};
use modgraph::io::GraphDoc;
use modgraph::morphism::CombinatorialMorphism;
use modgraph::pullback::{compose_marked, stable_pullback_in_order};
use modgraph::sample::{self, GraphParams};
use modgraph::semigroup::{LinearForm, MonoidHom};
use modgraph::stabilize::{pushforward, stabilize};
use modgraph::GraphBuilder;
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, secs: u64) -> Result<(), String> {
    let t = start.elapsed().as_secs_f64();
    ensure(t < secs as f64, || format!("took {t:.1}s, limit {secs}s"))
}

fn pullback_order_independence() -> Outcome {
    let start = Instant::now();
    let mut rng = sample::rng(1);
    let mut instances = 0;
    let mut orders = 0;
    while instances < 200 {
        let rank = rng.gen_range(0..=2);
        let params = GraphParams {
            rank,
            max_vertices: 5,
            max_flags: 12,
            max_genus: 1,
            max_class: 1,
            connected: true,
        };
        let sigma = sample::random_stable_graph(&mut rng, &params);
        let k = rng.gen_range(2..=3);
        let Some(phi) = sample::random_contraction(&mut rng, &sigma, k) else {
            continue;
        };
        let a = sample::random_combinatorial_into(&mut rng, &phi.target, rank);
        let edges = phi.contracted_edges();
        let results: Vec<_> = edges
            .iter()
            .copied()
            .permutations(edges.len())
            .map(|order| stable_pullback_in_order(&phi, &a, &order))
            .collect::<Result<_, _>>()
            .map_err(|e| format!("pullback failed: {e}"))?;
        for r in &results[1..] {
            ensure(r.equivalent(&results[0]), || {
                format!("orders disagree for {phi:?} and {a:?}")
            })?;
        }
        orders += results.len();
        instances += 1;
    }
    within(start, 30)?;
    Ok(format!("{instances} instances, {orders} orders"))
}

fn composition_associativity() -> Outcome {
    let start = Instant::now();
    let mut rng = sample::rng(2);
    let params = GraphParams {
        max_flags: 10,
        ..GraphParams::default()
    };
    let mut triples = 0;
    while triples < 100 {
        let g0 = sample::random_stable_graph(&mut rng, &params);
        let r1 = rng.gen_range(0..=1);
        let m1 = sample::random_marked(&mut rng, &g0, r1);
        let m2 = sample::random_marked(&mut rng, m1.target(), r1);
        let r3 = rng.gen_range(0..=r1);
        let m3 = sample::random_marked(&mut rng, m2.target(), r3);
        let left = compose_marked(&m3, &compose_marked(&m2, &m1).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let right = compose_marked(&compose_marked(&m3, &m2).map_err(|e| e.to_string())?, &m1)
            .map_err(|e| e.to_string())?;
        left.validate().map_err(|e| e.to_string())?;
        ensure(left.equivalent(&right), || {
            format!("associativity fails on {m1:?} / {m2:?} / {m3:?}")
        })?;
        triples += 1;
    }
    within(start, 60)?;
    Ok(format!("{triples} triples"))
}

fn universal_property() -> Outcome {
    let start = Instant::now();
    let pool = common::unstable_pool(3, 50, 8);
    let mut rng = sample::rng(3);
    let (mut sources, mut morphisms) = (0, 0);
    for tau in &pool {
        let st = stabilize(tau);
        let mut candidates: Vec<AGraph> = Vec::new();
        for _ in 0..4 {
            let p = common::small_params(tau.rank(), 6);
            candidates.push(sample::random_stable_graph(&mut rng, &p));
            if !st.graph.is_empty() {
                let a = sample::random_combinatorial_into(&mut rng, &st.graph, tau.rank());
                if a.hom.is_identity() {
                    candidates.push(a.source);
                }
            }
        }
        candidates.push(AGraph::tripod(tau.rank()));
        let id = MonoidHom::identity(tau.rank());
        for sigma in candidates.iter().filter(|s| s.num_flags() <= 6 && s.is_stable()) {
            sources += 1;
            let direct = common::brute_force_morphisms(sigma, tau, &id);
            let through = common::brute_force_morphisms(sigma, &st.graph, &id);
            for m in &direct {
                morphisms += 1;
                let hits = through
                    .iter()
                    .filter(|n| {
                        let c = st.morphism.after(n).expect("composable");
                        c.flag_map == m.flag_map && c.vertex_map == m.vertex_map
                    })
                    .count();
                ensure(hits == 1, || {
                    format!("{hits} factorizations of a map {sigma:?} -> {tau:?}")
                })?;
            }
            for n in &through {
                let c = st.morphism.after(n).expect("composable");
                ensure(common::oracle_is_morphism(&c), || {
                    format!("composite through stabilization is not a morphism: {c:?}")
                })?;
            }
        }
    }
    within(start, 300)?;
    Ok(format!(
        "{} unstable graphs, {sources} sources, {morphisms} morphisms",
        pool.len()
    ))
}

fn stabilization_functoriality() -> Outcome {
    let start = Instant::now();
    let mut rng = sample::rng(4);
    for _ in 0..200 {
        let k = rng.gen_range(0..=2);
        let params = GraphParams {
            rank: k,
            ..GraphParams::default()
        };
        let g = sample::random_graph(&mut rng, &params);
        let once = stabilize(&g);
        let twice = stabilize(&once.graph);
        ensure(twice.graph == once.graph && twice.steps.is_empty(), || {
            format!("stabilization not idempotent on {g:?}")
        })?;
        let m = rng.gen_range(0..=2);
        let l = rng.gen_range(0..=2);
        let xi = sample::random_hom(&mut rng, k, m, 2);
        let eta = sample::random_hom(&mut rng, m, l, 2);
        let composite = eta.compose(&xi).map_err(|e| e.to_string())?;
        let (direct, _) = pushforward(&composite, &g).map_err(|e| e.to_string())?;
        let (mid, _) = pushforward(&xi, &g).map_err(|e| e.to_string())?;
        let (stepwise, _) = pushforward(&eta, &mid).map_err(|e| e.to_string())?;
        ensure(isomorphic(&direct, &stepwise), || {
            format!("pushforward is not functorial on {g:?}")
        })?;
    }
    within(start, 30)?;
    Ok("200 instances".into())
}

fn betti_oracle() -> Outcome {
    let mut rng = sample::rng(5);
    for i in 0..500 {
        let params = GraphParams {
            rank: 0,
            max_vertices: 5,
            max_flags: 12,
            max_genus: 0,
            max_class: 0,
            connected: i % 3 != 0,
        };
        let g = sample::random_graph(&mut rng, &params);
        ensure(g.betti1() == common::gf2_betti(&g), || {
            format!("betti mismatch on {g:?}")
        })?;
    }
    Ok("500 graphs".into())
}

fn condition_three_oracle() -> Outcome {
    let mut rng = sample::rng(6);
    let (mut total, mut accepted) = (0, 0);
    while total < 300 {
        let params = GraphParams {
            rank: rng.gen_range(0..=1),
            max_vertices: 4,
            max_flags: 10,
            max_genus: 1,
            max_class: 1,
            connected: true,
        };
        let t = sample::random_graph(&mut rng, &params);
        let Some(a) = common::random_candidate(&mut rng, &t) else {
            continue;
        };
        let lib = !a.violations().iter().any(|v| v.condition == "commor-3");
        let oracle = common::literal_condition_three(&a);
        ensure(lib == oracle, || {
            format!("library says {lib}, chain search says {oracle} for {a:?}")
        })?;
        total += 1;
        accepted += usize::from(oracle);
    }
    ensure(accepted > 0 && accepted < total, || {
        "candidates did not exercise both outcomes".into()
    })?;
    Ok(format!("{total} candidates, {accepted} satisfy the condition"))
}

fn dimension_degree_ledger() -> Outcome {
    let mut rng = sample::rng(7);
    let profiles = [1, 2, 3].map(VarietyProfile::projective_space);
    for i in 0..500 {
        let p = &profiles[i % 3];
        let g = sample::random_stable_graph(&mut rng, &GraphParams::default());
        let (s, _) = pushforward(&MonoidHom::to_trivial(1), &g).map_err(|e| e.to_string())?;
        let lhs = dim_graph(p, &g).map_err(|e| e.to_string())? - dim_modular(&s).map_err(|e| e.to_string())?;
        let rhs = s.euler_characteristic() * i64::from(p.dimension)
            - deg_graph(p, &g).map_err(|e| e.to_string())?;
        ensure(lhs == rhs, || format!("ledger fails on {g:?}: {lhs} != {rhs}"))?;
    }
    for r in 1..=3u32 {
        for d in 0..=3u64 {
            for n in 3..=6usize {
                let mut b = GraphBuilder::new(1);
                let v = b.vertex(0, &[d]);
                for _ in 0..n {
                    b.tail(v);
                }
                let got = dim_graph(&VarietyProfile::projective_space(r), &b.build())
                    .map_err(|e| e.to_string())?;
                let want = (i64::from(r) + 1) * d as i64 + i64::from(r) - 3 + n as i64;
                ensure(got == want, || format!("dim on P^{r}, d={d}, n={n}: {got} != {want}"))?;
            }
        }
    }
    Ok("500 graphs, 48 closed forms".into())
}

fn split_graph() -> AGraph {
    let mut b = GraphBuilder::new(0);
    let v = b.vertex(0, &[]);
    let w = b.vertex(0, &[]);
    b.tail(v);
    b.tail(v);
    b.tail(w);
    b.tail(w);
    b.edge(v, w);
    b.build()
}

fn case_two_family() -> Outcome {
    let tau = split_graph();
    let e = tau.edges()[0];
    let phi = ExtendedIsogeny::from_isogeny(
        Isogeny::identity(&tau).contract(e.lo).map_err(|e| e.to_string())?,
    );
    let sigma = phi.target().clone();
    let w0 = sigma.vertex_ids().next().unwrap();
    let mut cases: Vec<(VarietyProfile, Vec<u64>)> = (0..=4)
        .map(|b| (VarietyProfile::projective_space(2), vec![b]))
        .collect();
    let p1p1 = VarietyProfile::new(2, LinearForm::new(vec![-2, -2]), LinearForm::new(vec![1, 1]))
        .map_err(|e| e.to_string())?;
    for b1 in 0..=2 {
        for b2 in 0..=2 {
            cases.push((p1p1.clone(), vec![b1, b2]));
        }
    }
    let mut members = 0;
    for (p, class) in &cases {
        let mut doc = GraphDoc::from(&sigma);
        doc.rank = Some(class.len());
        for v in &mut doc.vertices {
            v.class = if v.id == w0 { class.clone() } else { vec![0; class.len()] };
        }
        let sp = doc.to_graph().map_err(|e| e.to_string())?;
        let b = CombinatorialMorphism::inclusion(&sigma, &sp, MonoidHom::to_trivial(class.len()));
        let family = cartesian_pullback(p, &phi, &b).map_err(|e| e.to_string())?;
        let want: usize = class.iter().map(|&x| x as usize + 1).product();
        ensure(family.len() == want, || {
            format!("class {class:?}: {} members, expected {want}", family.len())
        })?;
        let mut splits = std::collections::BTreeSet::new();
        let target_deg = deg_graph(p, &sp).map_err(|e| e.to_string())?;
        let vs: Vec<_> = tau.vertex_ids().collect();
        for m in &family {
            let g = m.graph();
            ensure(g.is_stable(), || format!("unstable member {g:?}"))?;
            ensure(m.deg == target_deg, || {
                format!("member degree {} differs from {target_deg}", m.deg)
            })?;
            let c1 = g.class_of(m.a.vertex_map[&vs[0]]).coords().to_vec();
            let c2 = g.class_of(m.a.vertex_map[&vs[1]]).coords().to_vec();
            ensure(
                c1.iter().zip(&c2).map(|(x, y)| x + y).eq(class.iter().copied()),
                || format!("split {c1:?} + {c2:?} does not sum to {class:?}"),
            )?;
            ensure(splits.insert(c1), || format!("repeated split for {class:?}"))?;
        }
        ensure(splits.len() == want, || "incomplete list".into())?;
        ElementaryCartesianMorphism::from_pullback(&phi, &b, &family)
            .validate()
            .map_err(|e| e.to_string())?;
        members += family.len();
    }
    Ok(format!("{} classes, {members} members", cases.len()))
}

fn chi_invariance() -> Outcome {
    let mut rng = sample::rng(9);
    let mut checked = 0;
    for _ in 0..200 {
        let g = sample::random_stable_graph(&mut rng, &GraphParams::default());
        let n = rng.gen_range(1..=4);
        let first = sample::random_isogeny(&mut rng, &g, n);
        let second = sample::random_isogeny(&mut rng, first.target(), n);
        let both = first.then(&second).map_err(|e| e.to_string())?;
        both.validate().map_err(|e| e.to_string())?;
        for (iso, what) in [(&first, "isogeny"), (&both, "composite")] {
            ensure(
                iso.source.euler_characteristic() == iso.target().euler_characteristic(),
                || format!("{what} changes chi on {g:?}"),
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} isogenies"))
}

fn enumeration_soundness() -> Outcome {
    let start = Instant::now();
    let listed = enumerate_stable_graphs(
        &VarietyProfile::projective_space(1),
        &EnumerationConstraints::new(0, 4, 1, 2),
    )
    .map_err(|e| e.to_string())?;
    let mine: std::collections::BTreeSet<_> =
        listed.iter().map(common::small_graph_invariant).collect();
    ensure(mine.len() == listed.len(), || "duplicates in the listing".into())?;
    let oracle = common::brute_force_small_stable(0, 4, 1, 2);
    ensure(mine == oracle, || {
        format!("listing {mine:?} differs from brute force {oracle:?}")
    })?;
    within(start, 60)?;
    Ok(format!("{} isomorphism classes", listed.len()))
}

fn cli_determinism() -> Outcome {
    let cases = golden::cases();
    for case in &cases {
        let first = golden::invoke(case);
        let second = golden::invoke(case);
        ensure(first == second, || format!("{} differs between runs", case.name))?;
        let expected = golden::expected(case);
        ensure(first.0 == expected, || {
            format!("{} differs from its golden file", case.name)
        })?;
        ensure(first.1 == case.code, || {
            format!("{} exited with {}, expected {}", case.name, first.1, case.code)
        })?;
    }
    Ok(format!("{} golden files", cases.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("stable pullback order independence", pullback_order_independence),
        ("marked composition associativity", composition_associativity),
        ("stabilization universal property", universal_property),
        ("stabilization idempotence and pushforward functoriality", stabilization_functoriality),
        ("betti1 against GF(2) rank", betti_oracle),
        ("condition 3 against chain search", condition_three_oracle),
        ("dimension/degree ledger", dimension_degree_ledger),
        ("cartesian Case II families", case_two_family),
        ("chi invariance under isogenies", chi_invariance),
        ("enumeration soundness", enumeration_soundness),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
