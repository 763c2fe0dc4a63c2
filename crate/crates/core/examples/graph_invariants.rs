//! Builds a small genus-two graph and prints its invariants.

use modgraph::GraphBuilder;

fn main() {
    let mut b = GraphBuilder::new(1);
    let v = b.vertex(0, &[1]);
    let w = b.vertex(1, &[0]);
    b.edge(v, w);
    b.edge(v, v);
    b.tail(v);
    b.tail(w);
    let g = b.build();

    println!("tails      {}", g.tails().len());
    println!("edges      {}", g.edges().len());
    println!("betti1     {}", g.betti1());
    println!("chi        {}", g.euler_characteristic());
    println!("genus      {}", g.genus().unwrap());
    println!("class      {:?}", g.total_class().coords());
    println!("stable     {}", g.is_stable());
    println!("partition  {:?}", g.flag_partition().blocks());
}
