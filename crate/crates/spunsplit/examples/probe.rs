//! The counter-example: its total flow decomposes, its flow matrix does not.

use spunsplit::decompose::{decompose_unsplittable, Bound};
use spunsplit::io::InstanceFile;
use spunsplit::oracle::{matrix_decomposability_probe, Probe, DEFAULT_ENUM_CAP};
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/counterexample.json");
    let (inst, x) = InstanceFile::load(&path)?.to_instance()?;
    let x = x.ok_or("no flow")?;
    let d = decompose_unsplittable(&inst, &x, Bound::DMax)?;
    println!("total flow: {} unsplittable terms", d.decomposition.terms.len());
    match matrix_decomposability_probe(&inst, &x, DEFAULT_ENUM_CAP)? {
        Probe::Impossible(c) => {
            let arcs: Vec<&str> = c.forced_arcs.iter().map(|&e| inst.graph.arcs[e].name.as_str()).collect();
            println!("flow matrix: impossible, arcs {arcs:?} admit no integer member ({} states)", c.explored);
        }
        other => println!("flow matrix: {other:?}"),
    }
    Ok(())
}
