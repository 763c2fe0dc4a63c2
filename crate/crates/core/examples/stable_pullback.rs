//! Pulls a stable graph back along a contraction, in every edge order.

use itertools::Itertools;
use modgraph::pullback::stable_pullback_in_order;
use modgraph::sample::{self, GraphParams};

fn main() {
    let mut rng = sample::rng(3);
    let p = GraphParams { max_vertices: 5, ..GraphParams::default() };
    let (phi, a) = loop {
        let sigma = sample::random_stable_graph(&mut rng, &p);
        if let Some(phi) = sample::random_contraction(&mut rng, &sigma, 2) {
            let a = sample::random_combinatorial_into(&mut rng, &phi.target, 1);
            break (phi, a);
        }
    };
    let edges = phi.contracted_edges();
    let results: Vec<_> = edges
        .iter()
        .copied()
        .permutations(edges.len())
        .map(|order| stable_pullback_in_order(&phi, &a, &order).unwrap())
        .collect();
    for r in &results {
        println!(
            "pi has {} vertices and {} flags; vertex square commutes: {}",
            r.pi.num_vertices(),
            r.pi.num_flags(),
            r.vertex_square_commutes(&phi, &a)
        );
    }
    println!("orders agree: {}", results.iter().all(|r| r.equivalent(&results[0])));
}
