//! Classical, strengthened and strong cut conditions on the two-commodity
//! instance where only the strengthened one fails, and on the acyclic
//! instance separating the last two.

use spunsplit::cuts::{check_cut_on, CutLimits, CutMode, Witness};
use spunsplit::io::InstanceFile;
use spunsplit::rational::fmt_rational;
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for file in ["fig1.json", "strengthened_vs_strong.json"] {
        let raw = InstanceFile::load(&dir.join(file))?.resolve()?;
        println!("{file}");
        for mode in [CutMode::Classical, CutMode::Strengthened, CutMode::Strong] {
            match check_cut_on(&raw.graph, &raw.commodities, mode, CutLimits::default())? {
                None => println!("  {mode:<12} ok"),
                Some(c) => {
                    let w: Vec<&str> = match &c.witness {
                        Witness::Nodes(x) => x.iter().map(|&v| raw.graph.nodes[v].as_str()).collect(),
                        Witness::Arcs(f) => f.iter().map(|&e| raw.graph.arcs[e].name.as_str()).collect(),
                    };
                    println!(
                        "  {mode:<12} violated by {{{}}}: capacity {} < demand {}",
                        w.join(", "),
                        fmt_rational(&c.capacity),
                        fmt_rational(&c.blocked_demand)
                    );
                }
            }
        }
    }
    Ok(())
}
