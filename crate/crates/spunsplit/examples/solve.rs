//! Feasibility through alignment, node splitting and a single-commodity
//! transshipment.

use spunsplit::align::{align_instance, feasible_integer_multiflow, to_transshipment, Solve};
use spunsplit::io::{flow_to_record, InstanceFile};
use spunsplit::rational::fmt_rational;
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for file in ["fig1.json", "split_counterexample.json", "single_arc.json"] {
        let (inst, _) = InstanceFile::load(&dir.join(file))?.to_instance()?;
        let (aligned, map) = align_instance(&inst)?;
        let b: Vec<String> = to_transshipment(&aligned).iter().map(fmt_rational).collect();
        println!("{file}: {} subcommodities, {} split node(s), b = {:?}", aligned.k(), map.splits.len(), b);
        match feasible_integer_multiflow(&inst)? {
            Solve::Feasible(x) => println!("  feasible: {:?}", flow_to_record(&inst, &x)),
            Solve::Infeasible { split_cut, cut } => {
                let cut: Vec<&str> = cut.iter().map(|&v| inst.graph.nodes[v].as_str()).collect();
                println!("  infeasible, cut {cut:?} (split graph {split_cut:?})");
            }
        }
    }
    Ok(())
}
