//! Write the total flow of the six-arc example instance as a convex
//! combination of integer flows within the floor/ceiling of every arc.

use spunsplit::align::{integer_decomposition, to_transshipment};
use spunsplit::instance::total_flow;
use spunsplit::io::InstanceFile;
use spunsplit::rational::fmt_rational;
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/example1.json");
    let (inst, x) = InstanceFile::load(&path)?.to_instance()?;
    let y = total_flow(inst.graph.arc_count(), &x.ok_or("no flow")?);
    let b = to_transshipment(&inst);
    for (rho, z) in integer_decomposition(&inst.graph, &b, &y)? {
        let z: Vec<String> = z.iter().map(fmt_rational).collect();
        println!("{:>8} · ({})", fmt_rational(&rho), z.join(", "));
    }
    Ok(())
}
