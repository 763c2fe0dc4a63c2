//! Every way to split a class in N^2 into two summands.

use modgraph::semigroup::enumerate_pair_decompositions;
use modgraph::{MonoidElement, MonoidHom};

fn main() {
    let b = MonoidElement::new(vec![2, 1]);
    let splits = enumerate_pair_decompositions(&b);
    println!("{} splits of {:?}:", splits.len(), b.coords());
    for (x, y) in &splits {
        println!("  {:?} + {:?}", x.coords(), y.coords());
    }

    let total = MonoidHom::from_rows(2, vec![vec![1, 1]]).unwrap();
    println!("bidegree {:?} has total degree {:?}", b.coords(), total.apply(&b).unwrap().coords());
}
