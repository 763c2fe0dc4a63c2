//! Prints a graph in Graphviz format.

use modgraph::io::export_dot;
use modgraph::GraphBuilder;

fn main() {
    let mut b = GraphBuilder::new(1);
    let v = b.vertex(0, &[1]);
    let w = b.vertex(1, &[0]);
    b.tail(v);
    b.tail(v);
    b.edge(v, w);
    print!("{}", export_dot(&b.build()));
}
