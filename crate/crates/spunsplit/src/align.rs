//! Aligned instances, node splitting, the b-transshipment relaxation and
//! integer multiflows.

use crate::error::{arg, internal, Error, Result};
use crate::graph::Digraph;
use crate::instance::{Commodity, Instance, Multiflow};
use crate::maxflow::FlowNetwork;
use crate::rational::{common_denominator, scaled, unscaled, zero, Rational};
use crate::sptree::{Kind, SpExpr, SpTree};
use num::{BigInt, Signed, Zero};

/// A node that was split into `v_in → v_out` by an unbounded arc.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitRecord {
    /// index of the node in the original graph
    pub original: usize,
    pub v_in: usize,
    pub v_out: usize,
    pub arc: usize,
}

/// How an aligned instance relates to the instance it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentMap {
    /// original commodity → its subcommodities in path order
    pub chains: Vec<Vec<usize>>,
    pub splits: Vec<SplitRecord>,
    /// aligned node → original node
    pub node_origin: Vec<usize>,
    /// arcs `0..original_arcs` are shared with the original graph
    pub original_arcs: usize,
}

impl AlignmentMap {
    pub fn is_identity(&self) -> bool {
        self.splits.is_empty() && self.chains.iter().all(|c| c.len() == 1)
    }
}

/// The minimal-depth tree node with terminals `(s, t)`, if any.
pub fn commodity_node(tree: &SpTree, s: usize, t: usize) -> Option<usize> {
    (0..tree.len())
        .filter(|&w| tree.node(w).u == s && tree.node(w).v == t)
        .min_by_key(|&w| (tree.node(w).depth, w))
}

fn min_depth_with(tree: &SpTree, pred: impl Fn(usize) -> bool) -> Option<usize> {
    (0..tree.len()).filter(|&w| pred(w)).min_by_key(|&w| (tree.node(w).depth, w))
}

fn mandatory_node(tree: &SpTree, s: usize, t: usize) -> Option<usize> {
    if commodity_node(tree, s, t).is_some() {
        return None;
    }
    let w = min_depth_with(tree, |w| tree.node(w).u == s)?;
    if !tree.contains_node(w, t) {
        return Some(tree.node(w).v);
    }
    let w2 = min_depth_with(tree, |w| tree.node(w).v == t)?;
    let u = tree.node(w2).u;
    (u != s).then_some(u)
}

/// A node other than `s_i, t_i` lying on every `s_i`–`t_i` path, or `None`
/// when commodity `i` is already aligned.
pub fn find_mandatory_node(inst: &Instance, i: usize) -> Option<usize> {
    let c = &inst.commodities[i];
    mandatory_node(&inst.tree, c.source, c.sink)
}

pub fn is_aligned(inst: &Instance) -> bool {
    inst.commodities
        .iter()
        .all(|c| commodity_node(&inst.tree, c.source, c.sink).is_some())
}

/// True when no node is the source of one commodity and the sink of another.
pub fn sources_and_sinks_disjoint(inst: &Instance) -> bool {
    conflict_node(inst).is_none()
}

fn conflict_node(inst: &Instance) -> Option<usize> {
    (0..inst.graph.node_count()).find(|&v| {
        inst.commodities.iter().any(|c| c.source == v) && inst.commodities.iter().any(|c| c.sink == v)
    })
}

/// Subdivides every commodity at mandatory nodes until all are aligned.
pub fn subdivide_commodities(inst: &Instance) -> (Instance, Vec<Vec<usize>>) {
    let mut pieces: Vec<Vec<(usize, usize)>> = inst.commodities.iter().map(|c| vec![(c.source, c.sink)]).collect();
    for chain in pieces.iter_mut() {
        let mut j = 0;
        while j < chain.len() {
            let (s, t) = chain[j];
            match mandatory_node(&inst.tree, s, t) {
                Some(v) => {
                    chain[j] = (s, v);
                    chain.insert(j + 1, (v, t));
                }
                None => j += 1,
            }
        }
    }
    let mut commodities = Vec::new();
    let mut chains = Vec::new();
    for (c, chain) in inst.commodities.iter().zip(&pieces) {
        let mut ids = Vec::new();
        for (k, &(s, t)) in chain.iter().enumerate() {
            let name = if chain.len() == 1 { c.name.clone() } else { format!("{}_{}", c.name, k + 1) };
            ids.push(commodities.len());
            commodities.push(Commodity { name, source: s, sink: t, demand: c.demand.clone() });
        }
        chains.push(ids);
    }
    let out = Instance { commodities, ..inst.clone() };
    (out, chains)
}

fn replace_subtree(tree: &SpTree, w: usize, target: usize, with: &SpExpr) -> SpExpr {
    if w == target {
        return with.clone();
    }
    let n = tree.node(w);
    match (n.kind, n.children) {
        (Kind::Q, _) => SpExpr::Q(n.arc.unwrap()),
        (Kind::S, Some((a, b))) => SpExpr::s(replace_subtree(tree, a, target, with), replace_subtree(tree, b, target, with)),
        (_, Some((a, b))) => SpExpr::p(replace_subtree(tree, a, target, with), replace_subtree(tree, b, target, with)),
        _ => unreachable!(),
    }
}

/// Splits one node that is both a source and a sink. The sp-tree is
/// updated in place of re-recognition: `S(σ1, σ2)` with middle node `v`
/// becomes `S(σ1, S(v_in→v_out, σ2))`.
fn split_node(inst: &Instance, v: usize) -> Result<(Instance, SplitRecord)> {
    let tree = &inst.tree;
    let w = min_depth_with(tree, |w| {
        let n = tree.node(w);
        n.kind == Kind::S && tree.node(n.children.unwrap().0).v == v
    })
    .ok_or_else(|| Error::Internal(format!("node {} is not the middle of a series composition", inst.graph.nodes[v])))?;
    let (c1, c2) = tree.node(w).children.unwrap();
    let mut g = inst.graph.clone();
    let name = g.nodes[v].clone();
    g.rename_node(v, format!("{name}/in"));
    let v_out = g.add_node(&format!("{name}/out"))?;
    for e in g.out_arcs(v).to_vec() {
        let h = g.arcs[e].head;
        g.set_endpoints(e, v_out, h);
    }
    let arc = g.add_arc(&format!("split:{name}"), v, v_out, None)?;
    let replacement = SpExpr::s(tree.expr_at(c1), SpExpr::s(SpExpr::Q(arc), tree.expr_at(c2)));
    let expr = replace_subtree(tree, 0, w, &replacement);
    let new_tree = SpTree::from_expr(&g, &expr)?;
    let commodities = inst
        .commodities
        .iter()
        .map(|c| Commodity { source: if c.source == v { v_out } else { c.source }, ..c.clone() })
        .collect();
    let out = Instance { graph: g, terminals: inst.terminals, tree: new_tree, commodities };
    Ok((out, SplitRecord { original: v, v_in: v, v_out, arc }))
}

/// Subdivides commodities and splits source/sink nodes. The result is
/// aligned and satisfies `s_i ≠ t_j` for all `i ≠ j`.
pub fn align_instance(inst: &Instance) -> Result<(Instance, AlignmentMap)> {
    let (mut cur, chains) = subdivide_commodities(inst);
    let mut splits = Vec::new();
    let mut node_origin: Vec<usize> = (0..inst.graph.node_count()).collect();
    while let Some(v) = conflict_node(&cur) {
        let (next, mut rec) = split_node(&cur, v)?;
        node_origin.push(node_origin[v]);
        rec.original = node_origin[v];
        splits.push(rec);
        cur = next;
    }
    if !is_aligned(&cur) {
        return internal("alignment left a commodity unaligned");
    }
    let map = AlignmentMap { chains, splits, node_origin, original_arcs: inst.graph.arc_count() };
    Ok((cur, map))
}

/// Maps a multiflow of the aligned instance back to the original one.
pub fn map_back(original: &Instance, map: &AlignmentMap, x: &Multiflow) -> Multiflow {
    let mut out = Multiflow::zero(original.k());
    for (i, chain) in map.chains.iter().enumerate() {
        for &j in chain {
            for (e, v) in &x.flows[j] {
                if *e < map.original_arcs {
                    out.add(*e, i, v);
                }
            }
        }
    }
    out
}

/// `b_v = Σ_{s_i = v} d_i − Σ_{t_i = v} d_i`
pub fn to_transshipment(inst: &Instance) -> Vec<Rational> {
    let mut b = vec![zero(); inst.graph.node_count()];
    for c in &inst.commodities {
        b[c.source] += &c.demand;
        b[c.sink] -= &c.demand;
    }
    b
}

#[derive(Debug, Clone, PartialEq)]
pub enum Transshipment {
    Feasible(Vec<Rational>),
    /// Nodes reachable from the super-source in the final residual network.
    Infeasible { cut: Vec<usize> },
}

/// Exact b-transshipment by common-denominator scaling and integer max-flow.
/// Arcs without capacity are unbounded.
pub fn solve_transshipment(g: &Digraph, b: &[Rational]) -> Result<Transshipment> {
    if b.len() != g.node_count() {
        return arg("supply vector length differs from the node count");
    }
    if b.iter().sum::<Rational>() != zero() {
        return arg("supplies do not sum to zero");
    }
    let scale = common_denominator(b.iter().chain(g.arcs.iter().filter_map(|a| a.capacity.as_ref())));
    let n = g.node_count();
    let (ss, tt) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2);
    let mut supply = BigInt::zero();
    for (v, bv) in b.iter().enumerate() {
        let s = scaled(bv, &scale)?;
        if s.is_positive() {
            supply += &s;
            net.add_edge(ss, v, s);
        } else if s.is_negative() {
            net.add_edge(v, tt, -s);
        }
    }
    let mut handles = Vec::with_capacity(g.arc_count());
    for a in &g.arcs {
        let cap = match &a.capacity {
            Some(c) => scaled(c, &scale)?,
            None => supply.clone(),
        };
        handles.push(net.add_edge(a.tail, a.head, cap));
    }
    let value = net.max_flow(ss, tt, None);
    if value == supply {
        Ok(Transshipment::Feasible(handles.iter().map(|&h| unscaled(&net.flow(h), &scale)).collect()))
    } else {
        let r = net.residual_reachable(ss);
        Ok(Transshipment::Infeasible { cut: (0..n).filter(|&v| r[v]).collect() })
    }
}

/// Turns a b-transshipment of an aligned instance with `s_i ≠ t_j` into a
/// multiflow with the same arc totals, peeling commodities deepest first.
pub fn multiflow_from_transshipment(inst: &Instance, y: &[Rational]) -> Result<Multiflow> {
    if !is_aligned(inst) {
        return arg("instance is not aligned");
    }
    if !sources_and_sinks_disjoint(inst) {
        return arg("some node is a source of one commodity and a sink of another");
    }
    if y.len() != inst.graph.arc_count() || y.iter().any(|v| v.is_negative()) {
        return arg("flow vector must be non-negative with one entry per arc");
    }
    let tree = &inst.tree;
    let mut order: Vec<(usize, usize, usize)> = inst
        .commodities
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let w = commodity_node(tree, c.source, c.sink).unwrap();
            (tree.node(w).depth, i, w)
        })
        .collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut rest = y.to_vec();
    let mut x = Multiflow::zero(inst.k());
    for (_, i, w) in order {
        let c = &inst.commodities[i];
        let arcs: Vec<usize> = tree.arcs_of(w).iter().copied().filter(|&e| rest[e].is_positive()).collect();
        let scale = common_denominator(arcs.iter().map(|&e| &rest[e]).chain([&c.demand]));
        let mut net = FlowNetwork::new(inst.graph.node_count());
        let handles: Vec<usize> = arcs
            .iter()
            .map(|&e| {
                let a = &inst.graph.arcs[e];
                scaled(&rest[e], &scale).map(|cap| net.add_edge(a.tail, a.head, cap))
            })
            .collect::<Result<_>>()?;
        let want = scaled(&c.demand, &scale)?;
        let got = net.max_flow(c.source, c.sink, Some(&want));
        if got != want {
            return arg(format!("flow is not a b-transshipment: commodity {} cannot be peeled", c.name));
        }
        for (&e, &h) in arcs.iter().zip(&handles) {
            let f = unscaled(&net.flow(h), &scale);
            if f.is_positive() {
                rest[e] -= &f;
                x.set(e, i, f);
            }
        }
    }
    if rest.iter().any(|r| !r.is_zero()) {
        return arg("flow is not a b-transshipment: residual flow remains");
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Solve {
    Feasible(Multiflow),
    Infeasible {
        /// witness in the aligned, split graph (node names)
        split_cut: Vec<String>,
        /// the same witness with split nodes contracted (original indices)
        cut: Vec<usize>,
    },
}

/// Feasibility through a single-commodity flow: align, split, solve, peel, map back.
pub fn solve_multiflow(inst: &Instance) -> Result<Solve> {
    let (aligned, map) = align_instance(inst)?;
    let b = to_transshipment(&aligned);
    match solve_transshipment(&aligned.graph, &b)? {
        Transshipment::Feasible(y) => {
            let xa = multiflow_from_transshipment(&aligned, &y)?;
            Ok(Solve::Feasible(map_back(inst, &map, &xa)))
        }
        Transshipment::Infeasible { cut } => {
            let mut orig: Vec<usize> = cut.iter().map(|&v| map.node_origin[v]).collect();
            orig.sort_unstable();
            orig.dedup();
            Ok(Solve::Infeasible { split_cut: cut.iter().map(|&v| aligned.graph.nodes[v].clone()).collect(), cut: orig })
        }
    }
}

/// Integer capacities and demands give an integer multiflow, if any exists.
pub fn feasible_integer_multiflow(inst: &Instance) -> Result<Solve> {
    if !inst.demands_integral() {
        return arg("demands must be integers");
    }
    if inst.graph.arcs.iter().any(|a| a.capacity.as_ref().is_some_and(|c| !c.is_integer())) {
        return arg("capacities must be integers");
    }
    let out = solve_multiflow(inst)?;
    if let Solve::Feasible(x) = &out {
        if !x.is_integral() {
            return internal("integer data produced a fractional multiflow");
        }
    }
    Ok(out)
}

fn excess(g: &Digraph, y: &[Rational]) -> Vec<Rational> {
    let mut ex = vec![zero(); g.node_count()];
    for (e, a) in g.arcs.iter().enumerate() {
        ex[a.tail] += &y[e];
        ex[a.head] -= &y[e];
    }
    ex
}

/// Writes the b-transshipment `y` (integral `b`) as a convex combination of
/// integer b-transshipments within `⌊y_e⌋ ≤ · ≤ ⌈y_e⌉`.
///
/// Each round finds an integer flow `z` in the current rounding box, then moves
/// `y` away from `z` until one more arc becomes integral. At most `m + 1` terms.
pub fn integer_decomposition(g: &Digraph, b: &[Rational], y: &[Rational]) -> Result<Vec<(Rational, Vec<Rational>)>> {
    if b.iter().any(|v| !v.is_integer()) {
        return arg("supplies must be integral");
    }
    if y.len() != g.arc_count() {
        return arg("flow vector length differs from the arc count");
    }
    if excess(g, y) != b {
        return arg("flow does not meet the supplies");
    }
    let mut out = Vec::new();
    let mut weight = Rational::from_integer(1.into());
    let mut cur = y.to_vec();
    for _ in 0..=g.arc_count() {
        if cur.iter().all(|v| v.is_integer()) {
            out.push((weight, cur));
            return Ok(out);
        }
        let lo: Vec<Rational> = cur.iter().map(|v| v.floor()).collect();
        let hi: Vec<Rational> = cur.iter().map(|v| v.ceil()).collect();
        let z = integer_flow_in_box(g, b, &lo, &hi)?;
        let mut t: Option<Rational> = None;
        for e in 0..cur.len() {
            let room = if cur[e] > z[e] {
                (&hi[e] - &cur[e]) / (&cur[e] - &z[e])
            } else if cur[e] < z[e] {
                (&cur[e] - &lo[e]) / (&z[e] - &cur[e])
            } else {
                continue;
            };
            if t.as_ref().is_none_or(|t| &room < t) {
                t = Some(room);
            }
        }
        let t = t.ok_or_else(|| Error::Internal("fractional flow equals its integer rounding".into()))?;
        let one = Rational::from_integer(1.into());
        let zw = &weight * &t / (&one + &t);
        if zw.is_positive() {
            out.push((zw, z.clone()));
        }
        weight = &weight / (&one + &t);
        cur = cur.iter().zip(&z).map(|(c, zz)| c + &t * (c - zz)).collect();
    }
    internal("integer decomposition did not terminate within m + 1 rounds")
}

fn integer_flow_in_box(g: &Digraph, b: &[Rational], lo: &[Rational], hi: &[Rational]) -> Result<Vec<Rational>> {
    let mut h = g.clone();
    for (e, a) in h.arcs.iter_mut().enumerate() {
        a.capacity = Some(&hi[e] - &lo[e]);
    }
    let ex = excess(g, lo);
    let b2: Vec<Rational> = b.iter().zip(&ex).map(|(bv, l)| bv - l).collect();
    match solve_transshipment(&h, &b2)? {
        Transshipment::Feasible(f) => {
            let z: Vec<Rational> = f.iter().zip(lo).map(|(a, l)| a + l).collect();
            if z.iter().any(|v| !v.is_integer()) {
                return internal("box flow is not integral");
            }
            Ok(z)
        }
        Transshipment::Infeasible { .. } => internal("no integer flow inside the rounding box"),
    }
}
