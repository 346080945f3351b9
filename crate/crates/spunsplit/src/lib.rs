//! Unsplittable flows on series-parallel digraphs.
//!
//! Given a fractional multiflow on a two-terminal series-parallel digraph,
//! [`decompose::decompose_unsplittable`] writes its total flow as a convex
//! combination of unsplittable flows, each within `d_max` of it on every
//! arc. Along the way the crate recognizes sp-digraphs ([`sptree`]), checks
//! cut conditions ([`cuts`]), solves feasibility through alignment and a
//! single-commodity transshipment ([`align`]) and reduces a flow to an
//! almost unsplittable one ([`almost`]). [`oracle`] holds brute-force
//! references for small instances.
//!
//! All arithmetic is exact (`num::BigRational`).
//!
//! ```text
//! cargo run --example recognize [instance.json]
//! cargo run --example cut_check
//! cargo run --example solve
//! cargo run --example almost [seed]
//! cargo run --example decompose [instance.json]
//! cargo run --example refine
//! cargo run --example integer_decomposition
//! cargo run --example probe
//! cargo run --example verify
//! ```
//!
//! ```
//! use num::One;
//! use spunsplit::decompose::{decompose_unsplittable, Bound};
//! use spunsplit::io::InstanceFile;
//!
//! let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/example1.json");
//! let (inst, x) = InstanceFile::load(path.as_ref()).unwrap().to_instance().unwrap();
//! let out = decompose_unsplittable(&inst, &x.unwrap(), Bound::DMax).unwrap();
//! assert!(out.decomposition.weight().is_one());
//! ```

pub mod align;
pub mod cli;
pub mod almost;
pub mod cuts;
pub mod decompose;
pub mod error;
pub mod graph;
pub mod instance;
pub mod io;
pub mod maxflow;
pub mod oracle;
pub mod random;
pub mod rational;
pub mod sptree;
