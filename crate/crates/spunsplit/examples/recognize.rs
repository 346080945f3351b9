//! Recognize a digraph as series-parallel and print its sp-tree.
//!
//! cargo run --example recognize [instance.json]

use spunsplit::io::InstanceFile;
use spunsplit::sptree::recognize_sp;
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/example1.json"));
    let raw = InstanceFile::load(&path)?.resolve()?;
    let g = &raw.graph;
    match recognize_sp(g, raw.terminals.0, raw.terminals.1) {
        Ok(tree) => {
            println!("{}", tree.to_expr().display(g));
            for w in tree.preorder() {
                let n = tree.node(w);
                let indent = "  ".repeat(n.depth);
                println!("{indent}ω{w} {:?} ({}, {})", n.kind, g.nodes[n.u], g.nodes[n.v]);
            }
        }
        Err(w) => {
            println!("{w}");
            for (t, h, arcs) in &w.kernel_arcs {
                println!("  {} -> {} carries {} arc(s)", g.nodes[*t], g.nodes[*h], arcs.len());
            }
        }
    }
    Ok(())
}
