//! Round-trips a graph through its JSON document and runs a CLI verb in process.

use modgraph::cli::{run, CommandRequest, Verb};
use modgraph::io::GraphDoc;
use modgraph::AGraph;

fn main() {
    let doc = GraphDoc::from(&AGraph::tripod(0));
    let text = serde_json::to_string_pretty(&doc).unwrap();
    println!("{text}");
    let back: GraphDoc = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_graph().unwrap(), AGraph::tripod(0));

    let out = run(&CommandRequest {
        verb: Verb::Invariants,
        payload: text,
        profile: None,
        max_flags: 16,
    });
    print!("exit {}: {}", out.code, out.text);
}
