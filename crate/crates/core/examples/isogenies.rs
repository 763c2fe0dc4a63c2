//! Stably forgetting each tail of a graph, then a random isogeny.

use modgraph::isogeny::stably_forget_tail;
use modgraph::sample::{self, GraphParams};
use modgraph::GraphBuilder;

fn main() {
    let mut b = GraphBuilder::new(0);
    let v = b.vertex(0, &[]);
    let w = b.vertex(1, &[]);
    b.tail(v);
    b.tail(v);
    b.tail(w);
    b.edge(v, w);
    let g = b.build();
    for t in g.tails() {
        let s = stably_forget_tail(&g, t).unwrap();
        println!(
            "forget {t}: type {:?}, {} vertices left, tail map {:?}",
            s.kind,
            s.target.num_vertices(),
            s.tail_map.0
        );
    }

    let mut rng = sample::rng(5);
    let g = sample::random_stable_graph(&mut rng, &GraphParams::default());
    let iso = sample::random_isogeny(&mut rng, &g, 4);
    println!(
        "{} steps, chi {} -> {}",
        iso.steps.len(),
        g.euler_characteristic(),
        iso.target().euler_characteristic()
    );
}
