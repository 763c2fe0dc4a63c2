//! Composes three marked morphisms both ways round.

use modgraph::pullback::compose_marked;
use modgraph::sample::{self, GraphParams};

fn main() {
    let mut rng = sample::rng(8);
    let g = sample::random_stable_graph(&mut rng, &GraphParams::default());
    let m1 = sample::random_marked(&mut rng, &g, 1);
    let m2 = sample::random_marked(&mut rng, m1.target(), 1);
    let m3 = sample::random_marked(&mut rng, m2.target(), 0);
    let left = compose_marked(&m3, &compose_marked(&m2, &m1).unwrap()).unwrap();
    let right = compose_marked(&compose_marked(&m3, &m2).unwrap(), &m1).unwrap();
    println!("source flags {}, target flags {}", left.source().num_flags(), left.target().num_flags());
    println!("associative: {}", left.equivalent(&right));
}
