//! The family of degree splittings over a contracted edge, for conics in P2.

use modgraph::io::GraphDoc;
use modgraph::isogeny::{cartesian_pullback, ExtendedIsogeny, Isogeny, VarietyProfile};
use modgraph::morphism::CombinatorialMorphism;
use modgraph::{GraphBuilder, MonoidHom};

fn main() {
    let mut b = GraphBuilder::new(0);
    let v = b.vertex(0, &[]);
    let w = b.vertex(0, &[]);
    for x in [v, v, w, w] {
        b.tail(x);
    }
    let (e, _) = b.edge(v, w);
    let tau = b.build();
    let phi = ExtendedIsogeny::from_isogeny(Isogeny::identity(&tau).contract(e).unwrap());

    let sigma = phi.target().clone();
    let mut doc = GraphDoc::from(&sigma);
    doc.rank = Some(1);
    doc.vertices[0].class = vec![2];
    let conic = doc.to_graph().unwrap();
    let base = CombinatorialMorphism::inclusion(&sigma, &conic, MonoidHom::to_trivial(1));

    let p2 = VarietyProfile::projective_space(2);
    for m in cartesian_pullback(&p2, &phi, &base).unwrap() {
        let classes: Vec<_> = m.graph().vertices().map(|(_, d)| d.class.coords()[0]).collect();
        println!("split {classes:?}, deg {}", m.deg);
    }
}
