//! Cutting, gluing, forgetting and contracting on a two-vertex graph.

use modgraph::morphism::{contract_edges, cut_edge, forget_tail, glue_tails};
use modgraph::GraphBuilder;

fn main() {
    let mut b = GraphBuilder::new(0);
    let v = b.vertex(0, &[]);
    let w = b.vertex(0, &[]);
    let t = b.tail(v);
    b.tail(v);
    b.tail(w);
    b.tail(w);
    let (e, ebar) = b.edge(v, w);
    let g = b.build();

    let (cut, a) = cut_edge(&g, e).unwrap();
    println!("cut:      {} tails, {} components", cut.tails().len(), cut.num_components());
    a.validate().unwrap();

    let (glued, _) = glue_tails(&cut, e, ebar).unwrap();
    println!("reglued:  equal to original: {}", glued == g);

    let (forgot, _) = forget_tail(&g, t).unwrap();
    println!("forget:   stable afterwards: {}", forgot.is_stable());

    let phi = contract_edges(&g, &g.edges()).unwrap();
    println!(
        "contract: {} vertex, {} tails, elementary: {}",
        phi.target.num_vertices(),
        phi.target.tails().len(),
        phi.is_elementary()
    );
}
