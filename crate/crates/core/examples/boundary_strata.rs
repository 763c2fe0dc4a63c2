//! Lists the stable graphs of genus zero with four tails and degree at most
//! one in P1, with at most two vertices.

use modgraph::isogeny::{enumerate_stable_graphs, EnumerationConstraints, VarietyProfile};

fn main() {
    let p = VarietyProfile::projective_space(1);
    let graphs = enumerate_stable_graphs(&p, &EnumerationConstraints::new(0, 4, 1, 2)).unwrap();
    println!("{} graphs", graphs.len());
    for g in &graphs {
        let rows: Vec<String> = g
            .vertex_ids()
            .map(|v| format!("{}:{}t,d={}", v, g.flags_at(v).iter().filter(|&&f| g.is_tail(f)).count(), g.class_of(v).coords()[0]))
            .collect();
        println!("  {}", rows.join("  "));
    }
}
