//! Multiflow instances, flow matrices and demand shares.

use crate::error::{arg, Error, Result};
use crate::graph::Digraph;
use crate::rational::{fmt_rational, zero, Rational};
use crate::sptree::{recognize_sp, Kind, SpTree};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct Commodity {
    pub name: String,
    pub source: usize,
    pub sink: usize,
    pub demand: Rational,
}

/// A digraph with terminals, its sp-tree and a list of commodities.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: Digraph,
    pub terminals: (usize, usize),
    pub tree: SpTree,
    pub commodities: Vec<Commodity>,
}

impl Instance {
    /// Validates the commodities and recognizes the graph.
    pub fn new(graph: Digraph, terminals: (usize, usize), commodities: Vec<Commodity>) -> Result<Instance> {
        let tree = recognize_sp(&graph, terminals.0, terminals.1)
            .map_err(|e| Error::Argument(e.to_string()))?;
        Instance::with_tree(graph, terminals, tree, commodities)
    }

    pub fn with_tree(graph: Digraph, terminals: (usize, usize), tree: SpTree, commodities: Vec<Commodity>) -> Result<Instance> {
        validate_commodities(&graph, &commodities)?;
        Ok(Instance { graph, terminals, tree, commodities })
    }

    pub fn k(&self) -> usize {
        self.commodities.len()
    }

    pub fn d_max(&self) -> Rational {
        self.commodities.iter().map(|c| c.demand.clone()).max().unwrap_or_else(zero)
    }

    pub fn commodity_index(&self, name: &str) -> Result<usize> {
        self.commodities
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::Parse(format!("unknown commodity {name:?}")))
    }

    pub fn demands_integral(&self) -> bool {
        self.commodities.iter().all(|c| c.demand.is_integer())
    }
}

pub fn validate_commodities(g: &Digraph, commodities: &[Commodity]) -> Result<()> {
    for c in commodities {
        if c.source >= g.node_count() || c.sink >= g.node_count() {
            return arg(format!("commodity {} references an unknown node", c.name));
        }
        if c.source == c.sink {
            return arg(format!("commodity {} has equal source and sink", c.name));
        }
        if !c.demand.is_positive() {
            return arg(format!("commodity {} has non-positive demand", c.name));
        }
        if !g.has_path(c.source, c.sink) {
            return arg(format!("commodity {}: no path from {} to {}", c.name, g.nodes[c.source], g.nodes[c.sink]));
        }
    }
    Ok(())
}

/// Per-commodity sparse arc flows: `flows[i][e] = X_{e,i}`. Zero entries are not stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Multiflow {
    pub flows: Vec<BTreeMap<usize, Rational>>,
}

impl Multiflow {
    pub fn zero(k: usize) -> Multiflow {
        Multiflow { flows: vec![BTreeMap::new(); k] }
    }

    pub fn k(&self) -> usize {
        self.flows.len()
    }

    pub fn get(&self, e: usize, i: usize) -> Rational {
        self.flows[i].get(&e).cloned().unwrap_or_else(zero)
    }

    pub fn set(&mut self, e: usize, i: usize, value: Rational) {
        if value.is_zero() {
            self.flows[i].remove(&e);
        } else {
            self.flows[i].insert(e, value);
        }
    }

    pub fn add(&mut self, e: usize, i: usize, delta: &Rational) {
        let v = self.get(e, i) + delta;
        self.set(e, i, v);
    }

    /// Routes `amount` of commodity `i` along `path`.
    pub fn add_path(&mut self, i: usize, path: &[usize], amount: &Rational) {
        for &e in path {
            self.add(e, i, amount);
        }
    }

    pub fn scaled(&self, factor: &Rational) -> Multiflow {
        Multiflow {
            flows: self
                .flows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|(e, v)| (*e, v * factor))
                        .filter(|(_, v)| !v.is_zero())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn plus(&self, other: &Multiflow) -> Multiflow {
        let mut out = self.clone();
        for (i, row) in other.flows.iter().enumerate() {
            for (e, v) in row {
                out.add(*e, i, v);
            }
        }
        out
    }

    pub fn is_integral(&self) -> bool {
        self.flows.iter().all(|row| row.values().all(|v| v.is_integer()))
    }
}

/// `x_e = Σ_i X_{e,i}` for every arc.
pub fn total_flow(m: usize, x: &Multiflow) -> Vec<Rational> {
    let mut t = vec![zero(); m];
    for row in &x.flows {
        for (e, v) in row {
            t[*e] += v;
        }
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservationViolation {
    pub node: usize,
    pub commodity: usize,
    /// outflow minus inflow minus the required net supply
    pub imbalance: Rational,
}

/// Checks every balance equation; returns the first failing `(v, i)` in commodity-major order.
pub fn check_conservation(inst: &Instance, x: &Multiflow) -> std::result::Result<(), ConservationViolation> {
    let g = &inst.graph;
    for (i, c) in inst.commodities.iter().enumerate() {
        let mut net = vec![zero(); g.node_count()];
        for (e, v) in x.flows.get(i).into_iter().flatten() {
            net[g.arcs[*e].tail] += v;
            net[g.arcs[*e].head] -= v;
        }
        // sources first so that an empty matrix reports the source
        let mut order: Vec<usize> = vec![c.source];
        order.extend((0..g.node_count()).filter(|&v| v != c.source));
        for v in order {
            let want = if v == c.source {
                c.demand.clone()
            } else if v == c.sink {
                -c.demand.clone()
            } else {
                zero()
            };
            if net[v] != want {
                return Err(ConservationViolation { node: v, commodity: i, imbalance: &net[v] - want });
            }
        }
    }
    for (i, row) in x.flows.iter().enumerate() {
        if let Some((e, _)) = row.iter().find(|(_, v)| v.is_negative()) {
            return Err(ConservationViolation { node: inst.graph.arcs[*e].tail, commodity: i, imbalance: zero() });
        }
    }
    Ok(())
}

/// `z_{ω,i}` for every commodity.
pub fn demand_shares(inst: &Instance, x: &Multiflow, w: usize) -> Vec<Rational> {
    let out = inst.tree.arcs_out_of_source(&inst.graph, w);
    inst.commodities
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if inst.tree.is_inner(w, c.source) || inst.tree.is_inner(w, c.sink) {
                Rational::one()
            } else {
                let s: Rational = out.iter().map(|&e| x.get(e, i)).sum();
                s / &c.demand
            }
        })
        .collect()
}

/// `z_{ω,i}` for every tree node, indexed `[ω][i]`.
pub fn share_table(inst: &Instance, x: &Multiflow) -> Vec<Vec<Rational>> {
    (0..inst.tree.len()).map(|w| demand_shares(inst, x, w)).collect()
}

/// I_ω: commodities with `0 < z < 1`.
pub fn fractional_set(z: &[Rational]) -> Vec<usize> {
    (0..z.len()).filter(|&i| z[i].is_positive() && z[i] < Rational::one()).collect()
}

/// Ī_ω: commodities with `z = 1`.
pub fn full_set(z: &[Rational]) -> Vec<usize> {
    (0..z.len()).filter(|&i| z[i].is_one()).collect()
}

/// Checks the parent/child share recurrences on a precomputed table.
pub fn check_share_table(inst: &Instance, z: &[Vec<Rational>]) -> std::result::Result<(), usize> {
    let t = &inst.tree;
    for w in 0..t.len() {
        let Some((c1, c2)) = t.node(w).children else { continue };
        for (i, c) in inst.commodities.iter().enumerate() {
            let ok = match t.node(w).kind {
                Kind::P => z[w][i] == &z[c1][i] + &z[c2][i],
                Kind::S if t.is_inner(w, c.source) || t.is_inner(w, c.sink) => {
                    let unit = |r: &Rational| r.is_zero() || r.is_one();
                    z[w][i].is_one() && unit(&z[c1][i]) && unit(&z[c2][i])
                }
                Kind::S => z[w][i] == z[c1][i] && z[c1][i] == z[c2][i],
                Kind::Q => true,
            };
            if !ok {
                return Err(w);
            }
        }
    }
    Ok(())
}

/// Verifies the share recurrences for a conserving flow. Returns the first failing ω.
pub fn check_share_recurrences(inst: &Instance, x: &Multiflow) -> std::result::Result<(), usize> {
    check_share_table(inst, &share_table(inst, x))
}

/// Human-readable rendering of a share vector.
pub fn fmt_shares(z: &[Rational]) -> String {
    let parts: Vec<String> = z.iter().map(fmt_rational).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::{int, q};

    pub(crate) fn example1() -> (Instance, Multiflow) {
        let g = Digraph::from_parts(
            &["u0", "v", "v0"],
            &[
                ("e1", "u0", "v", None),
                ("e2", "v", "v0", None),
                ("e3", "v", "v0", None),
                ("e4", "v", "v0", None),
                ("e5", "u0", "v0", None),
                ("e6", "u0", "v0", None),
            ],
        )
        .unwrap();
        let d = [1, 2, 1, 1, 1, 2, 1, 1];
        let comms = d
            .iter()
            .enumerate()
            .map(|(i, &d)| Commodity { name: format!("{}", i + 1), source: 0, sink: 2, demand: int(d) })
            .collect();
        let inst = Instance::new(g, (0, 2), comms).unwrap();
        let table: [[Rational; 8]; 6] = [
            [int(1), int(2), int(1), int(1), int(1), q(1, 2), int(0), int(0)],
            [int(1), q(5, 4), int(0), int(0), int(0), int(0), int(0), int(0)],
            [int(0), q(3, 4), int(1), q(1, 2), int(0), int(0), int(0), int(0)],
            [int(0), int(0), int(0), q(1, 2), int(1), q(1, 2), int(0), int(0)],
            [int(0), int(0), int(0), int(0), int(0), q(3, 2), q(1, 2), int(0)],
            [int(0), int(0), int(0), int(0), int(0), int(0), q(1, 2), int(1)],
        ];
        let mut x = Multiflow::zero(8);
        for (e, row) in table.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                x.set(e, i, v.clone());
            }
        }
        (inst, x)
    }

    #[test]
    fn example1_conserves_and_totals() {
        let (inst, x) = example1();
        assert!(check_conservation(&inst, &x).is_ok());
        let t = total_flow(6, &x);
        assert_eq!(t, vec![q(13, 2), q(9, 4), q(9, 4), int(2), int(2), q(3, 2)]);
    }

    #[test]
    fn zero_matrix_violates_at_source() {
        let (inst, _) = example1();
        let v = check_conservation(&inst, &Multiflow::zero(8)).unwrap_err();
        assert_eq!(v.node, 0);
        assert_eq!(v.commodity, 0);
        assert_eq!(total_flow(6, &Multiflow::zero(8)), vec![zero(); 6]);
    }

    #[test]
    fn edit_breaks_balance_at_v() {
        let (inst, mut x) = example1();
        x.set(1, 0, zero());
        let v = check_conservation(&inst, &x).unwrap_err();
        assert_eq!(inst.graph.nodes[v.node], "v");
        assert_eq!(v.commodity, 0);
    }

    #[test]
    fn shares_of_example1() {
        let (inst, x) = example1();
        let z6 = demand_shares(&inst, &x, 6);
        assert_eq!(z6, vec![int(0), q(3, 8), int(1), int(1), int(1), q(1, 4), int(0), int(0)]);
        assert_eq!(fractional_set(&z6), vec![1, 5]);
        assert_eq!(demand_shares(&inst, &x, 7), vec![int(0), q(3, 8), int(1), q(1, 2), int(0), int(0), int(0), int(0)]);
        assert!(demand_shares(&inst, &x, 0).iter().all(|z| z.is_one()));
        assert!(check_share_recurrences(&inst, &x).is_ok());
    }

    #[test]
    fn corrupted_table_is_caught() {
        let (inst, x) = example1();
        let mut z = share_table(&inst, &x);
        z[6][1] += q(1, 16);
        let w = check_share_table(&inst, &z).unwrap_err();
        assert!(w == 6 || w == inst.tree.node(6).parent.unwrap());
    }

    #[test]
    fn linear_totals() {
        let (_, x) = example1();
        let a = q(1, 3);
        let b = q(2, 5);
        let combo = x.scaled(&a).plus(&x.scaled(&b));
        let lhs = total_flow(6, &combo);
        let t = total_flow(6, &x);
        for e in 0..6 {
            assert_eq!(lhs[e], &t[e] * (&a + &b));
        }
    }
}
