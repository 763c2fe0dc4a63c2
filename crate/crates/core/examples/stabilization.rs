//! Stabilizing a chain of null vertices.

use modgraph::stabilize::stabilize;
use modgraph::GraphBuilder;

fn main() {
    let mut b = GraphBuilder::new(0);
    let ends = [b.vertex(1, &[]), b.vertex(0, &[])];
    let mid = b.vertex(0, &[]);
    b.tail(ends[1]);
    b.edge(ends[0], mid);
    b.edge(mid, ends[1]);
    let g = b.build();

    let s = stabilize(&g);
    for step in &s.steps {
        println!("case {:?} at {} removes {:?}", step.case, step.vertex, step.removed_flags);
    }
    println!(
        "{} -> {} vertices, stable: {}",
        g.num_vertices(),
        s.graph.num_vertices(),
        s.graph.is_stable()
    );
}
