//! Swaps between parallel branches and the top-down sweep producing an
//! almost unsplittable multiflow with the same total flow.

use crate::error::{arg, internal, Error, Result};
use crate::instance::{demand_shares, fractional_set, share_table, Instance, Multiflow};
use crate::rational::Rational;
use crate::sptree::Kind;
use num::{Signed, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct AlmostUnsplittableFlow {
    pub flow: Multiflow,
    /// I_ω for every tree node
    pub fractional: Vec<Vec<usize>>,
    /// for P-nodes, the commodity split between both children, if any
    pub split: Vec<Option<usize>>,
    /// inner swap iterations performed
    pub iterations: usize,
}

/// A `u_ω`–`v_ω` path inside `G_ω` on which commodity `i` has positive flow.
/// Depth-first, trying arcs in increasing id order.
pub fn flow_carrying_path(inst: &Instance, x: &Multiflow, i: usize, w: usize) -> Result<Vec<usize>> {
    let tree = &inst.tree;
    let c = inst.commodities.get(i).ok_or_else(|| Error::Argument(format!("unknown commodity {i}")))?;
    let arcs = tree.sp_arcs(w)?;
    if tree.is_inner(w, c.source) || tree.is_inner(w, c.sink) {
        return arg(format!("commodity {} has an endpoint inside the component", c.name));
    }
    if !demand_shares(inst, x, w)[i].is_positive() {
        return arg(format!("commodity {} has no flow in the component", c.name));
    }
    let g = &inst.graph;
    let mut usable = vec![false; g.arc_count()];
    for &e in arcs {
        usable[e] = x.get(e, i).is_positive();
    }
    let (u, v) = (tree.node(w).u, tree.node(w).v);
    let mut seen = vec![false; g.node_count()];
    let mut path = Vec::new();
    if dfs(inst, &usable, u, v, &mut seen, &mut path) {
        Ok(path)
    } else {
        internal(format!("no flow-carrying path for commodity {} in component {w}", c.name))
    }
}

fn dfs(inst: &Instance, usable: &[bool], at: usize, goal: usize, seen: &mut [bool], path: &mut Vec<usize>) -> bool {
    if at == goal {
        return true;
    }
    seen[at] = true;
    let mut out: Vec<usize> = inst.graph.out_arcs(at).iter().copied().filter(|&e| usable[e]).collect();
    out.sort_unstable();
    for e in out {
        let h = inst.graph.arcs[e].head;
        if seen[h] {
            continue;
        }
        path.push(e);
        if dfs(inst, usable, h, goal, seen, path) {
            return true;
        }
        path.pop();
    }
    false
}

fn siblings(inst: &Instance, w1: usize, w2: usize) -> Result<usize> {
    let t = &inst.tree;
    let p = t.node(w1).parent.ok_or_else(|| Error::Argument("the root has no sibling".into()))?;
    if t.node(p).kind != Kind::P || t.node(w2).parent != Some(p) || w1 == w2 {
        return arg("swap needs the two children of a parallel node");
    }
    Ok(p)
}

/// Exchanges commodity `i1` (fractional in child `w1`) against `i2`
/// (fractional in its sibling `w2`) until one of them leaves its child.
/// Returns the new flow and the number of exchange steps.
pub fn swap(inst: &Instance, x: &Multiflow, w1: usize, i1: usize, w2: usize, i2: usize) -> Result<(Multiflow, usize)> {
    let parent = siblings(inst, w1, w2)?;
    if i1 == i2 {
        return arg("swap needs two distinct commodities");
    }
    for &(w, i) in &[(w1, i1), (w2, i2)] {
        if i >= inst.k() {
            return arg(format!("unknown commodity {i}"));
        }
        if !fractional_set(&demand_shares(inst, x, w)).contains(&i) {
            return arg(format!("commodity {} is not fractional in component {w}", inst.commodities[i].name));
        }
        let c = &inst.commodities[i];
        if inst.tree.is_inner(parent, c.source) || inst.tree.is_inner(parent, c.sink) {
            return arg(format!("commodity {} has an endpoint inside the parallel node", c.name));
        }
    }
    let cap = inst.tree.arcs_of(parent).len();
    let mut x = x.clone();
    let mut steps = 0;
    loop {
        let z1 = &demand_shares(inst, &x, w1)[i1];
        let z2 = &demand_shares(inst, &x, w2)[i2];
        if z1.is_zero() || z2.is_zero() {
            return Ok((x, steps));
        }
        if steps == cap {
            return internal(format!("swap exceeded {cap} iterations"));
        }
        let p1 = flow_carrying_path(inst, &x, i1, w1)?;
        let p2 = flow_carrying_path(inst, &x, i2, w2)?;
        let delta: Rational = p1
            .iter()
            .map(|&e| x.get(e, i1))
            .chain(p2.iter().map(|&e| x.get(e, i2)))
            .min()
            .expect("paths are non-empty");
        x.add_path(i1, &p1, &-&delta);
        x.add_path(i1, &p2, &delta);
        x.add_path(i2, &p2, &-&delta);
        x.add_path(i2, &p1, &delta);
        steps += 1;
    }
}

fn shared(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|i| b.contains(i)).collect()
}

fn child_sets(inst: &Instance, x: &Multiflow, w: usize) -> (usize, usize, Vec<usize>, Vec<usize>) {
    let (c1, c2) = inst.tree.node(w).children.expect("parallel node");
    (c1, c2, fractional_set(&demand_shares(inst, x, c1)), fractional_set(&demand_shares(inst, x, c2)))
}

/// Swaps the smallest shared pair until the children of P-node `w` share at
/// most one fractional commodity.
pub fn reduce_shared_fractional(inst: &Instance, x: &Multiflow, w: usize) -> Result<(Multiflow, usize)> {
    if inst.tree.node(w).kind != Kind::P {
        return arg("not a parallel node");
    }
    let mut x = x.clone();
    let mut total = 0;
    loop {
        let (c1, c2, i1, i2) = child_sets(inst, &x, w);
        let common = shared(&i1, &i2);
        if common.len() < 2 {
            return Ok((x, total));
        }
        let (next, steps) = swap(inst, &x, c1, common[0], c2, common[1])?;
        let (_, _, j1, j2) = child_sets(inst, &next, w);
        if shared(&j1, &j2).len() >= common.len() {
            return internal("swap did not reduce the shared fractional set");
        }
        x = next;
        total += steps;
    }
}

/// Returns the first tree node violating the almost-unsplittable conditions.
pub fn certify_almost_unsplittable(inst: &Instance, x: &Multiflow) -> std::result::Result<(), usize> {
    let z = share_table(inst, x);
    let sets: Vec<Vec<usize>> = z.iter().map(|row| fractional_set(row)).collect();
    for w in inst.tree.preorder() {
        if sets[w].len() > 2 {
            return Err(w);
        }
        if inst.tree.node(w).kind == Kind::P {
            let (c1, c2) = inst.tree.node(w).children.unwrap();
            if shared(&sets[c1], &sets[c2]).len() > 1 {
                return Err(w);
            }
        }
    }
    Ok(())
}

/// Top-down sweep over the parallel nodes. Total flow is preserved arc by arc.
pub fn make_almost_unsplittable(inst: &Instance, x: &Multiflow) -> Result<AlmostUnsplittableFlow> {
    if let Err(v) = crate::instance::check_conservation(inst, x) {
        return arg(format!(
            "flow does not conserve commodity {} at node {}",
            inst.commodities[v.commodity].name, inst.graph.nodes[v.node]
        ));
    }
    let mut x = x.clone();
    let mut iterations = 0;
    for w in inst.tree.preorder() {
        if inst.tree.node(w).kind != Kind::P {
            continue;
        }
        let (next, steps) = reduce_shared_fractional(inst, &x, w)?;
        x = next;
        iterations += steps;
        let (c1, c2, i1, i2) = child_sets(inst, &x, w);
        let small_large = match (i1.len(), i2.len()) {
            (1, 3) => Some((c1, &i1, c2, &i2)),
            (3, 1) => Some((c2, &i2, c1, &i1)),
            _ => None,
        };
        if let Some((small, si, large, li)) = small_large {
            let parent_set = fractional_set(&demand_shares(inst, &x, w));
            let a = si[0];
            let b = li
                .iter()
                .copied()
                .find(|i| *i != a && parent_set.contains(i))
                .ok_or_else(|| Error::Internal("no parent-fractional commodity in the larger child".into()))?;
            let (next, steps) = swap(inst, &x, small, a, large, b)?;
            x = next;
            iterations += steps;
        }
    }
    if let Err(w) = certify_almost_unsplittable(inst, &x) {
        return internal(format!("sweep left tree node {w} violating the almost-unsplittable conditions"));
    }
    let z = share_table(inst, &x);
    let fractional: Vec<Vec<usize>> = z.iter().map(|row| fractional_set(row)).collect();
    let split = (0..inst.tree.len())
        .map(|w| match inst.tree.node(w).children {
            Some((c1, c2)) if inst.tree.node(w).kind == Kind::P => shared(&fractional[c1], &fractional[c2]).first().copied(),
            _ => None,
        })
        .collect();
    Ok(AlmostUnsplittableFlow { flow: x, fractional, split, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Digraph;
    use crate::instance::{check_conservation, tests::example1, total_flow, Commodity};
    use crate::rational::{int, q};

    fn two_parallel() -> (Instance, Multiflow) {
        let g = Digraph::from_parts(&["s", "t"], &[("a", "s", "t", Some(int(1))), ("b", "s", "t", Some(int(1)))]).unwrap();
        let c = (1..=2).map(|n| Commodity { name: n.to_string(), source: 0, sink: 1, demand: int(1) }).collect();
        let inst = Instance::new(g, (0, 1), c).unwrap();
        let mut x = Multiflow::zero(2);
        for e in 0..2 {
            for i in 0..2 {
                x.set(e, i, q(1, 2));
            }
        }
        (inst, x)
    }

    #[test]
    fn example1_paths() {
        let (inst, x) = example1();
        // ω6 = P(e3, e4)
        let w6 = inst.tree.node(inst.tree.leaf_of_arc(2)).parent.unwrap();
        assert_eq!(w6, 6);
        assert_eq!(flow_carrying_path(&inst, &x, 1, w6).unwrap(), vec![2]);
        assert_eq!(flow_carrying_path(&inst, &x, 5, w6).unwrap(), vec![3]);
    }

    #[test]
    fn symmetric_swap() {
        let (inst, x) = two_parallel();
        let (a, b) = (inst.tree.leaf_of_arc(0), inst.tree.leaf_of_arc(1));
        let (y, steps) = swap(&inst, &x, a, 0, b, 1).unwrap();
        assert_eq!(steps, 1);
        assert_eq!(y.get(0, 0), int(0));
        assert_eq!(y.get(1, 0), int(1));
        assert_eq!(y.get(0, 1), int(1));
        assert_eq!(total_flow(2, &y), total_flow(2, &x));
    }

    #[test]
    fn swap_rejects_non_fractional() {
        let (inst, x) = example1();
        let (l3, l4) = (inst.tree.leaf_of_arc(2), inst.tree.leaf_of_arc(3));
        assert!(matches!(swap(&inst, &x, l3, 0, l4, 5), Err(Error::Argument(_))));
    }

    #[test]
    fn example1_swap_on_e3_e4() {
        let (inst, x) = example1();
        let (l3, l4) = (inst.tree.leaf_of_arc(2), inst.tree.leaf_of_arc(3));
        let (y, _) = swap(&inst, &x, l3, 1, l4, 5).unwrap();
        assert!(y.get(2, 1).is_zero() || y.get(3, 5).is_zero());
        assert_eq!(total_flow(6, &y), total_flow(6, &x));
        assert!(check_conservation(&inst, &y).is_ok());
    }

    #[test]
    fn example1_sweep() {
        let (inst, x) = example1();
        let out = make_almost_unsplittable(&inst, &x).unwrap();
        assert_eq!(total_flow(6, &out.flow), vec![q(13, 2), q(9, 4), q(9, 4), int(2), int(2), q(3, 2)]);
        assert!(check_conservation(&inst, &out.flow).is_ok());
        assert!(certify_almost_unsplittable(&inst, &out.flow).is_ok());
        let again = make_almost_unsplittable(&inst, &out.flow).unwrap();
        assert_eq!(again.flow, out.flow);
        assert_eq!(again.iterations, 0);
    }

    #[test]
    fn unsplittable_is_unchanged() {
        let (inst, _) = two_parallel();
        let mut x = Multiflow::zero(2);
        x.set(0, 0, int(1));
        x.set(1, 1, int(1));
        let out = make_almost_unsplittable(&inst, &x).unwrap();
        assert_eq!(out.flow, x);
        assert!(out.fractional.iter().all(|s| s.is_empty()));
    }
}
