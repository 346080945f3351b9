//! Classical, strengthened and strong cut conditions by exhaustive
//! enumeration. Subsets are visited by cardinality, then lexicographically,
//! so the reported certificate is a smallest violating witness.

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::instance::{Commodity, Instance};
use crate::rational::{zero, Rational};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CutMode {
    Classical,
    Strengthened,
    Strong,
}

impl fmt::Display for CutMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            CutMode::Classical => "classical",
            CutMode::Strengthened => "strengthened",
            CutMode::Strong => "strong",
        })
    }
}

impl std::str::FromStr for CutMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(CutMode::Classical),
            "strengthened" => Ok(CutMode::Strengthened),
            "strong" => Ok(CutMode::Strong),
            _ => Err(Error::Argument(format!("unknown cut mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Nodes(Vec<usize>),
    Arcs(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutCertificate {
    pub kind: CutMode,
    pub witness: Witness,
    pub capacity: Rational,
    pub blocked_demand: Rational,
    pub blocked: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutLimits {
    pub max_nodes: usize,
    pub max_arcs: usize,
}

impl Default for CutLimits {
    fn default() -> Self {
        CutLimits { max_nodes: 22, max_arcs: 20 }
    }
}

/// K(F): commodities without an `s_i`–`t_i` path once `F` is removed.
pub fn blocked_commodities(g: &Digraph, commodities: &[Commodity], removed: &[usize]) -> Vec<usize> {
    let mut mask = vec![false; g.arc_count()];
    for &e in removed {
        mask[e] = true;
    }
    blocked_by_mask(g, commodities, &mask)
}

fn blocked_by_mask(g: &Digraph, commodities: &[Commodity], mask: &[bool]) -> Vec<usize> {
    commodities
        .iter()
        .enumerate()
        .filter(|(_, c)| !g.reachable(c.source, mask)[c.sink])
        .map(|(i, _)| i)
        .collect()
}

/// Visits all k-subsets of `0..n` for k = 0..=n in lexicographic order,
/// stopping at the first `Some`.
fn first_subset<T>(n: usize, mut f: impl FnMut(&[usize]) -> Option<T>) -> Option<T> {
    for k in 0..=n {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            if let Some(t) = f(&idx) {
                return Some(t);
            }
            let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else { break };
            idx[pos] += 1;
            for p in pos + 1..k {
                idx[p] = idx[p - 1] + 1;
            }
        }
    }
    None
}

fn demand_of(commodities: &[Commodity], set: &[usize]) -> Rational {
    set.iter().map(|&i| &commodities[i].demand).sum()
}

fn evaluate_nodes(g: &Digraph, commodities: &[Commodity], mode: CutMode, x: &[usize]) -> Option<CutCertificate> {
    let mut inside = vec![false; g.node_count()];
    for &v in x {
        inside[v] = true;
    }
    let delta = g.delta_out(&inside);
    let capacity = g.capacity_of(&delta)?;
    let blocked: Vec<usize> = match mode {
        CutMode::Classical => (0..commodities.len())
            .filter(|&i| inside[commodities[i].source] && !inside[commodities[i].sink])
            .collect(),
        _ => blocked_commodities(g, commodities, &delta),
    };
    let blocked_demand = demand_of(commodities, &blocked);
    (capacity < blocked_demand).then(|| CutCertificate {
        kind: mode,
        witness: Witness::Nodes(x.to_vec()),
        capacity,
        blocked_demand,
        blocked,
    })
}

fn evaluate_arcs(g: &Digraph, commodities: &[Commodity], f: &[usize]) -> Option<CutCertificate> {
    let capacity = g.capacity_of(f)?;
    let blocked = blocked_commodities(g, commodities, f);
    let blocked_demand = demand_of(commodities, &blocked);
    (capacity < blocked_demand).then(|| CutCertificate {
        kind: CutMode::Strong,
        witness: Witness::Arcs(f.to_vec()),
        capacity,
        blocked_demand,
        blocked,
    })
}

/// Checks a cut condition on an arbitrary digraph. `Ok(None)` means the
/// condition holds.
pub fn check_cut_on(
    g: &Digraph,
    commodities: &[Commodity],
    mode: CutMode,
    limits: CutLimits,
) -> Result<Option<CutCertificate>> {
    match mode {
        CutMode::Strong => {
            if g.arc_count() > limits.max_arcs {
                return Err(Error::Size { what: "arcs for strong-cut enumeration".into(), cap: limits.max_arcs });
            }
            Ok(first_subset(g.arc_count(), |f| evaluate_arcs(g, commodities, f)))
        }
        _ => {
            if g.node_count() > limits.max_nodes {
                return Err(Error::Size { what: "nodes for cut enumeration".into(), cap: limits.max_nodes });
            }
            Ok(first_subset(g.node_count(), |x| evaluate_nodes(g, commodities, mode, x)))
        }
    }
}

pub fn check_cut(inst: &Instance, mode: CutMode) -> Result<Option<CutCertificate>> {
    check_cut_on(&inst.graph, &inst.commodities, mode, CutLimits::default())
}

/// Re-evaluates a certificate from scratch.
pub fn certificate_is_valid(g: &Digraph, commodities: &[Commodity], cert: &CutCertificate) -> bool {
    let fresh = match &cert.witness {
        Witness::Nodes(x) => evaluate_nodes(g, commodities, cert.kind, x),
        Witness::Arcs(f) => evaluate_arcs(g, commodities, f),
    };
    fresh.as_ref() == Some(cert) && cert.capacity < cert.blocked_demand && cert.blocked_demand > zero()
}
