//! Round-trip a decomposition through its file format, then tamper with it.

use spunsplit::decompose::{decompose_unsplittable, verify_decomposition, Bound};
use spunsplit::io::{DecompositionFile, InstanceFile};
use spunsplit::rational::q;
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/example1.json");
    let (inst, x) = InstanceFile::load(&path)?.to_instance()?;
    let x = x.ok_or("no flow")?;
    let d = decompose_unsplittable(&inst, &x, Bound::DMax)?.decomposition;
    let text = serde_json::to_string(&DecompositionFile::from_decomposition(&inst, &d, Bound::DMax))?;
    let back = DecompositionFile::parse(&text)?.to_decomposition(&inst)?;
    println!("round trip: {:?}", verify_decomposition(&inst, &x, &back, Bound::DMax, None).failures);
    let mut bad = back.clone();
    bad.terms[0].rho += q(1, 1000);
    for f in verify_decomposition(&inst, &x, &bad, Bound::DMax, None).failures {
        println!("tampered: {} ({})", f.check, f.detail);
    }
    Ok(())
}
