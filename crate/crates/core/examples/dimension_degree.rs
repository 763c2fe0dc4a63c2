//! Expected dimensions of a few graphs over projective spaces.

use modgraph::isogeny::{deg_graph, dim_graph, VarietyProfile};
use modgraph::GraphBuilder;

fn main() {
    for r in 1..=3 {
        let p = VarietyProfile::projective_space(r);
        for d in 0..=3 {
            let mut b = GraphBuilder::new(1);
            let v = b.vertex(0, &[d]);
            for _ in 0..3 {
                b.tail(v);
            }
            let g = b.build();
            println!(
                "P{r}, degree {d}, three points: dim {}, deg {}",
                dim_graph(&p, &g).unwrap(),
                deg_graph(&p, &g).unwrap()
            );
        }
    }
}
