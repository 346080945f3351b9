//! Decompose the total flow of the six-arc example instance into
//! unsplittable flows whose arc flows stay within d_max of it.

use spunsplit::decompose::{decompose_unsplittable, verify_decomposition, Bound};
use spunsplit::instance::total_flow;
use spunsplit::io::InstanceFile;
use spunsplit::rational::fmt_rational;
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/example1.json"));
    let (inst, x) = InstanceFile::load(&path)?.to_instance()?;
    let x = x.ok_or("the instance has no flow")?;
    let out = decompose_unsplittable(&inst, &x, Bound::DMax)?;
    let show = |v: &[spunsplit::rational::Rational]| v.iter().map(fmt_rational).collect::<Vec<_>>().join(" ");
    println!("x      = {}", show(&total_flow(inst.graph.arc_count(), &x)));
    for t in &out.decomposition.terms {
        println!("{:>6} · {}", fmt_rational(&t.rho), show(&t.totals(&inst)));
    }
    println!("max |y_e - x_e| = {} < d_max = {}", fmt_rational(&out.report.max_deviation), fmt_rational(&out.report.d_max));
    let rep = verify_decomposition(&inst, &x, &out.decomposition, Bound::DMax, Some(&out.almost));
    println!("verified: {}", rep.ok());
    Ok(())
}
