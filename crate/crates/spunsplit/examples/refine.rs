//! Refinement of two convex combinations, and the series/parallel
//! combination steps on the shipped worked examples.

use spunsplit::decompose::{combine_weights, general_rows, lambda, mu, refine_convex, series_rows};
use spunsplit::io::CombinationFixture;
use spunsplit::rational::{fmt_rational, q};
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = [q(1, 4), q(1, 2), q(1, 4)];
    let b = [q(1, 6), q(1, 3), q(1, 3), q(1, 6)];
    for (i, j, w) in refine_convex(&a, &b)? {
        println!("(v{} w{}) {}", i + 1, j + 1, fmt_rational(&w));
    }
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/combination");
    for file in ["s_node_example.json", "p_node_example.json"] {
        let fx = CombinationFixture::load(&dir.join(file))?;
        let z = fx.shares()?;
        let rows = match fx.case.as_str() {
            "series" => series_rows(&mu(&z[0], &z[1])?),
            _ => general_rows(&lambda(&z[0], &z[1], &z[2])?),
        };
        let (first, second, _) = fx.groups()?;
        println!("{}", fx.description);
        for (g, group) in combine_weights(&rows, &first, &second)?.iter().enumerate() {
            let w: Vec<String> = group.iter().map(|t| fmt_rational(&t.2)).collect();
            println!("  group {}: {}", g + 1, w.join(", "));
        }
    }
    Ok(())
}
