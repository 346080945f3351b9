//! JSON file formats. Rationals are strings such as `"3/8"`, never floats.

use crate::decompose::{Bound, ConvexDecomposition, Term};
use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::instance::{total_flow, validate_commodities, Commodity, Instance, Multiflow};
use crate::rational::{fmt_rational, parse_rational, Rational};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Terminals {
    pub source: String,
    pub sink: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcRecord {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub capacity: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommodityRecord {
    pub id: String,
    pub source: String,
    pub sink: String,
    pub demand: String,
}

/// arc id → commodity id → value
pub type FlowRecord = BTreeMap<String, BTreeMap<String, String>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub nodes: Vec<String>,
    pub terminals: Terminals,
    pub arcs: Vec<ArcRecord>,
    pub commodities: Vec<CommodityRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowRecord>,
}

/// An instance file resolved to indices, without series-parallel recognition.
#[derive(Debug, Clone, PartialEq)]
pub struct RawInstance {
    pub graph: Digraph,
    pub terminals: (usize, usize),
    pub commodities: Vec<Commodity>,
    pub flow: Option<Multiflow>,
}

impl RawInstance {
    pub fn into_instance(self) -> Result<(Instance, Option<Multiflow>)> {
        let inst = Instance::new(self.graph, self.terminals, self.commodities)?;
        Ok((inst, self.flow))
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read(path)?)
    }

    pub fn resolve(&self) -> Result<RawInstance> {
        let parse_err = |e: Error| match e {
            Error::Argument(m) => Error::Parse(m),
            other => other,
        };
        let mut g = Digraph::new();
        for n in &self.nodes {
            g.add_node(n).map_err(parse_err)?;
        }
        for a in &self.arcs {
            let cap = a.capacity.as_deref().map(parse_rational).transpose()?;
            if cap.as_ref().is_some_and(|c| c < &Rational::from_integer(0.into())) {
                return Err(Error::Parse(format!("arc {} has negative capacity", a.id)));
            }
            let (t, h) = (g.node_index(&a.tail).map_err(parse_err)?, g.node_index(&a.head).map_err(parse_err)?);
            g.add_arc(&a.id, t, h, cap).map_err(parse_err)?;
        }
        let terminals =
            (g.node_index(&self.terminals.source).map_err(parse_err)?, g.node_index(&self.terminals.sink).map_err(parse_err)?);
        let mut commodities = Vec::new();
        for c in &self.commodities {
            if commodities.iter().any(|x: &Commodity| x.name == c.id) {
                return Err(Error::Parse(format!("duplicate commodity {:?}", c.id)));
            }
            commodities.push(Commodity {
                name: c.id.clone(),
                source: g.node_index(&c.source).map_err(parse_err)?,
                sink: g.node_index(&c.sink).map_err(parse_err)?,
                demand: parse_rational(&c.demand)?,
            });
        }
        validate_commodities(&g, &commodities).map_err(parse_err)?;
        let flow = self.flow.as_ref().map(|f| flow_from_record(&g, &commodities, f)).transpose()?;
        Ok(RawInstance { graph: g, terminals, commodities, flow })
    }

    pub fn to_instance(&self) -> Result<(Instance, Option<Multiflow>)> {
        self.resolve()?.into_instance()
    }

    pub fn from_instance(inst: &Instance, flow: Option<&Multiflow>) -> InstanceFile {
        let g = &inst.graph;
        InstanceFile {
            nodes: g.nodes.clone(),
            terminals: Terminals {
                source: g.nodes[inst.terminals.0].clone(),
                sink: g.nodes[inst.terminals.1].clone(),
            },
            arcs: g
                .arcs
                .iter()
                .map(|a| ArcRecord {
                    id: a.name.clone(),
                    tail: g.nodes[a.tail].clone(),
                    head: g.nodes[a.head].clone(),
                    capacity: a.capacity.as_ref().map(fmt_rational),
                })
                .collect(),
            commodities: inst
                .commodities
                .iter()
                .map(|c| CommodityRecord {
                    id: c.name.clone(),
                    source: g.nodes[c.source].clone(),
                    sink: g.nodes[c.sink].clone(),
                    demand: fmt_rational(&c.demand),
                })
                .collect(),
            flow: flow.map(|x| flow_to_record(inst, x)),
        }
    }
}

pub fn flow_from_record(g: &Digraph, commodities: &[Commodity], f: &FlowRecord) -> Result<Multiflow> {
    let mut x = Multiflow::zero(commodities.len());
    for (arc, row) in f {
        let e = g.arc_index(arc).map_err(|_| Error::Parse(format!("unknown arc {arc:?} in flow")))?;
        for (name, v) in row {
            let i = commodities
                .iter()
                .position(|c| &c.name == name)
                .ok_or_else(|| Error::Parse(format!("unknown commodity {name:?} in flow")))?;
            let v = parse_rational(v)?;
            if v < Rational::from_integer(0.into()) {
                return Err(Error::Parse(format!("negative flow on arc {arc}")));
            }
            x.set(e, i, v);
        }
    }
    Ok(x)
}

/// Nonzero entries only.
pub fn flow_to_record(inst: &Instance, x: &Multiflow) -> FlowRecord {
    let mut out = FlowRecord::new();
    for (e, a) in inst.graph.arcs.iter().enumerate() {
        let row: BTreeMap<String, String> = (0..inst.k())
            .filter(|&i| x.get(e, i) != Rational::from_integer(0.into()))
            .map(|i| (inst.commodities[i].name.clone(), fmt_rational(&x.get(e, i))))
            .collect();
        if !row.is_empty() {
            out.insert(a.name.clone(), row);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub rho: String,
    /// commodity id → arc ids
    pub paths: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub d_max: String,
    pub bound: String,
    pub support_size: usize,
    /// sha256 of the canonical rendering of Σ ρ y
    pub reconstruction_hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionFile {
    pub terms: Vec<TermRecord>,
    pub metadata: Metadata,
}

/// `arc=value;` for every arc in id order, hashed.
pub fn totals_hash(inst: &Instance, totals: &[Rational]) -> String {
    let mut s = String::new();
    for (a, v) in inst.graph.arcs.iter().zip(totals) {
        s.push_str(&format!("{}={};", a.name, fmt_rational(v)));
    }
    let digest = Sha256::digest(s.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl DecompositionFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read(path)?)
    }

    pub fn from_decomposition(inst: &Instance, d: &ConvexDecomposition, bound: Bound) -> DecompositionFile {
        let g = &inst.graph;
        let terms = d
            .terms
            .iter()
            .map(|t| TermRecord {
                rho: fmt_rational(&t.rho),
                paths: t
                    .paths
                    .iter()
                    .map(|(&i, p)| (inst.commodities[i].name.clone(), p.iter().map(|&e| g.arcs[e].name.clone()).collect()))
                    .collect(),
            })
            .collect();
        DecompositionFile {
            terms,
            metadata: Metadata {
                d_max: fmt_rational(&inst.d_max()),
                bound: bound.to_string(),
                support_size: d.terms.len(),
                reconstruction_hash: totals_hash(inst, &d.combined_totals(inst)),
            },
        }
    }

    pub fn to_decomposition(&self, inst: &Instance) -> Result<ConvexDecomposition> {
        let mut terms = Vec::new();
        for t in &self.terms {
            let mut paths = BTreeMap::new();
            for (name, arcs) in &t.paths {
                let i = inst.commodity_index(name)?;
                let p = arcs
                    .iter()
                    .map(|a| inst.graph.arc_index(a).map_err(|_| Error::Parse(format!("unknown arc {a:?}"))))
                    .collect::<Result<Vec<usize>>>()?;
                paths.insert(i, p);
            }
            terms.push(Term { rho: parse_rational(&t.rho)?, paths });
        }
        Ok(ConvexDecomposition { terms })
    }

    pub fn bound(&self) -> Result<Bound> {
        self.metadata.bound.parse().map_err(|_| Error::Parse(format!("unknown bound {:?}", self.metadata.bound)))
    }
}

/// The rational totals of a flow rendered for reports.
pub fn totals_record(inst: &Instance, x: &Multiflow) -> BTreeMap<String, String> {
    total_flow(inst.graph.arc_count(), x)
        .iter()
        .zip(&inst.graph.arcs)
        .map(|(v, a)| (a.name.clone(), fmt_rational(v)))
        .collect()
}

/// Child decompositions and row weights for checking one combination step
/// without a concrete graph. `groups` are the per-option coefficient lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombinationFixture {
    pub description: String,
    /// "series", "general" or "p_eq_r"
    pub case: String,
    /// `[z_p, z_q]` for series, `[z_p, z_r, z_q]` otherwise
    pub shares: Vec<String>,
    pub first: [Vec<String>; 4],
    pub second: [Vec<String>; 4],
    /// per parent group
    pub expected: [Vec<String>; 4],
}

fn parse_list(v: &[String]) -> Result<Vec<Rational>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

impl CombinationFixture {
    pub fn load(path: &Path) -> Result<Self> {
        parse_json(&read(path)?)
    }

    pub fn shares(&self) -> Result<Vec<Rational>> {
        parse_list(&self.shares)
    }

    pub fn groups(&self) -> Result<([Vec<Rational>; 4], [Vec<Rational>; 4], [Vec<Rational>; 4])> {
        let conv = |g: &[Vec<String>; 4]| -> Result<[Vec<Rational>; 4]> {
            Ok([parse_list(&g[0])?, parse_list(&g[1])?, parse_list(&g[2])?, parse_list(&g[3])?])
        };
        Ok((conv(&self.first)?, conv(&self.second)?, conv(&self.expected)?))
    }
}
