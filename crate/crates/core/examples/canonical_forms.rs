//! Two labellings of the same graph share one canonical form.

use modgraph::canon::{canonical_form, graph_key};
use modgraph::sample::{self, GraphParams};

fn main() {
    let mut rng = sample::rng(42);
    let g = sample::random_stable_graph(&mut rng, &GraphParams::default());
    let (h, _, _) = sample::shuffle_ids(&mut rng, &g);
    println!("same ids:        {}", g == h);
    println!("same key:        {}", graph_key(&g) == graph_key(&h));
    let c = canonical_form(&g, 16).unwrap();
    println!("same canonical:  {}", c == canonical_form(&h, 16).unwrap());
    println!("canonical flags: {:?}", c.flag_ids().collect::<Vec<_>>());
}
