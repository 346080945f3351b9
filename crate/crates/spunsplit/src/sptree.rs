//! Series-parallel recognition and the sp-tree.
//!
//! Tree node ids follow a fixed numbering: the root is 0, both children
//! of a node are numbered consecutively when it is visited, and the walk
//! then descends into the first child before the second. For the 6-arc
//! example graph this yields `P(S(e1, P(e2, P(e3, e4))), P(e5, e6))` with
//! `ω6 = P(e3, e4)`.

use crate::error::{arg, internal, Error, Result};
use crate::graph::Digraph;
use std::collections::BTreeMap;
use std::fmt;

/// A series-parallel expression over arc indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpExpr {
    Q(usize),
    S(Box<SpExpr>, Box<SpExpr>),
    P(Box<SpExpr>, Box<SpExpr>),
}

impl SpExpr {
    pub fn s(a: SpExpr, b: SpExpr) -> SpExpr {
        SpExpr::S(Box::new(a), Box::new(b))
    }

    pub fn p(a: SpExpr, b: SpExpr) -> SpExpr {
        SpExpr::P(Box::new(a), Box::new(b))
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            SpExpr::Q(_) => 1,
            SpExpr::S(a, b) | SpExpr::P(a, b) => a.leaf_count() + b.leaf_count(),
        }
    }

    pub fn min_arc(&self) -> usize {
        match self {
            SpExpr::Q(e) => *e,
            SpExpr::S(a, b) | SpExpr::P(a, b) => a.min_arc().min(b.min_arc()),
        }
    }

    fn render(&self, g: &Digraph, out: &mut String) {
        match self {
            SpExpr::Q(e) => out.push_str(&g.arcs[*e].name),
            SpExpr::S(a, b) | SpExpr::P(a, b) => {
                out.push(if matches!(self, SpExpr::S(..)) { 'S' } else { 'P' });
                out.push('(');
                a.render(g, out);
                out.push_str(", ");
                b.render(g, out);
                out.push(')');
            }
        }
    }

    /// Compact form using arc names, e.g. `P(S(a1, S(a3, a4)), a2)`.
    pub fn display(&self, g: &Digraph) -> String {
        let mut s = String::new();
        self.render(g, &mut s);
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    P,
    S,
    Q,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::P => "P",
            Kind::S => "S",
            Kind::Q => "Q",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub kind: Kind,
    pub u: usize,
    pub v: usize,
    pub children: Option<(usize, usize)>,
    pub arc: Option<usize>,
    pub parent: Option<usize>,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpTree {
    nodes: Vec<TreeNode>,
    arcs: Vec<Vec<usize>>,
    in_component: Vec<Vec<bool>>,
    leaf_of_arc: Vec<usize>,
}

/// Why a digraph was rejected, plus the graph left after all reductions.
#[derive(Debug, Clone, PartialEq)]
pub struct NotSeriesParallel {
    pub reason: String,
    pub kernel_nodes: Vec<usize>,
    /// `(tail, head, original arcs merged into this kernel arc)`
    pub kernel_arcs: Vec<(usize, usize, Vec<usize>)>,
}

impl fmt::Display for NotSeriesParallel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not series-parallel: {} ({} kernel arcs)", self.reason, self.kernel_arcs.len())
    }
}

impl SpTree {
    /// Builds the tree for an expression whose leaves are exactly the arcs of `g`.
    pub fn from_expr(g: &Digraph, expr: &SpExpr) -> Result<SpTree> {
        let total = expr.leaf_count();
        let mut nodes: Vec<Option<TreeNode>> = vec![None; 2 * total - 1];
        let mut exprs: Vec<Option<&SpExpr>> = vec![None; 2 * total - 1];
        exprs[0] = Some(expr);
        let mut next = 1;
        // ids are handed out before descending, matching the numbering above
        fn assign<'a>(id: usize, e: &'a SpExpr, next: &mut usize, exprs: &mut Vec<Option<&'a SpExpr>>, kids: &mut BTreeMap<usize, (usize, usize)>) {
            if let SpExpr::S(a, b) | SpExpr::P(a, b) = e {
                let (c1, c2) = (*next, *next + 1);
                *next += 2;
                exprs[c1] = Some(a);
                exprs[c2] = Some(b);
                kids.insert(id, (c1, c2));
                assign(c1, a, next, exprs, kids);
                assign(c2, b, next, exprs, kids);
            }
        }
        let mut kids = BTreeMap::new();
        assign(0, expr, &mut next, &mut exprs, &mut kids);

        let mut leaf_of_arc = vec![usize::MAX; g.arc_count()];
        // labels bottom-up: children always have larger ids than parents
        let mut labels = vec![(0usize, 0usize); nodes.len()];
        for id in (0..nodes.len()).rev() {
            let e = exprs[id].ok_or_else(|| Error::Internal("tree numbering gap".into()))?;
            let (kind, label, arc) = match e {
                SpExpr::Q(a) => {
                    let arc = g.arcs.get(*a).ok_or_else(|| Error::Argument(format!("arc index {a} out of range")))?;
                    if leaf_of_arc[*a] != usize::MAX {
                        return arg(format!("arc {} appears twice in the expression", arc.name));
                    }
                    leaf_of_arc[*a] = id;
                    (Kind::Q, (arc.tail, arc.head), Some(*a))
                }
                SpExpr::S(..) => {
                    let (c1, c2) = kids[&id];
                    if labels[c1].1 != labels[c2].0 {
                        return arg("series composition of components that do not meet");
                    }
                    (Kind::S, (labels[c1].0, labels[c2].1), None)
                }
                SpExpr::P(..) => {
                    let (c1, c2) = kids[&id];
                    if labels[c1] != labels[c2] {
                        return arg("parallel composition of components with different terminals");
                    }
                    (Kind::P, labels[c1], None)
                }
            };
            labels[id] = label;
            nodes[id] = Some(TreeNode {
                kind,
                u: label.0,
                v: label.1,
                children: kids.get(&id).copied(),
                arc,
                parent: None,
                depth: 0,
            });
        }
        if let Some(e) = leaf_of_arc.iter().position(|&x| x == usize::MAX) {
            return arg(format!("arc {} has no leaf in the expression", g.arcs[e].name));
        }
        let mut nodes: Vec<TreeNode> = nodes.into_iter().map(|n| n.unwrap()).collect();
        for id in 0..nodes.len() {
            if let Some((c1, c2)) = nodes[id].children {
                let d = nodes[id].depth + 1;
                for c in [c1, c2] {
                    nodes[c].parent = Some(id);
                    nodes[c].depth = d;
                }
            }
        }
        let mut arcs: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        for id in (0..nodes.len()).rev() {
            arcs[id] = match (nodes[id].arc, nodes[id].children) {
                (Some(a), _) => vec![a],
                (None, Some((c1, c2))) => {
                    let mut v: Vec<usize> = arcs[c1].iter().chain(arcs[c2].iter()).copied().collect();
                    v.sort_unstable();
                    v
                }
                _ => return internal("inner tree node without children"),
            };
        }
        let in_component = arcs
            .iter()
            .map(|set| {
                let mut mask = vec![false; g.node_count()];
                for &e in set {
                    mask[g.arcs[e].tail] = true;
                    mask[g.arcs[e].head] = true;
                }
                mask
            })
            .collect();
        Ok(SpTree { nodes, arcs, in_component, leaf_of_arc })
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, w: usize) -> &TreeNode {
        &self.nodes[w]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// E_ω, sorted by arc id.
    pub fn sp_arcs(&self, w: usize) -> Result<&[usize]> {
        self.arcs
            .get(w)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::Argument(format!("unknown tree node {w}")))
    }

    pub fn arcs_of(&self, w: usize) -> &[usize] {
        &self.arcs[w]
    }

    /// v ∈ V_ω
    pub fn contains_node(&self, w: usize, v: usize) -> bool {
        self.in_component[w][v]
    }

    /// v ∈ V°_ω = V_ω minus the terminals
    pub fn is_inner(&self, w: usize, v: usize) -> bool {
        let n = &self.nodes[w];
        self.in_component[w][v] && v != n.u && v != n.v
    }

    pub fn inner_nodes(&self, w: usize) -> Vec<usize> {
        (0..self.in_component[w].len()).filter(|&v| self.is_inner(w, v)).collect()
    }

    pub fn leaf_of_arc(&self, e: usize) -> usize {
        self.leaf_of_arc[e]
    }

    /// Arcs of E_ω leaving u_ω.
    pub fn arcs_out_of_source(&self, g: &Digraph, w: usize) -> Vec<usize> {
        let u = self.nodes[w].u;
        self.arcs[w].iter().copied().filter(|&e| g.arcs[e].tail == u).collect()
    }

    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![0];
        while let Some(w) = stack.pop() {
            out.push(w);
            if let Some((c1, c2)) = self.nodes[w].children {
                stack.push(c2);
                stack.push(c1);
            }
        }
        out
    }

    /// Children before parents.
    pub fn postorder(&self) -> Vec<usize> {
        let mut v = self.preorder();
        v.reverse();
        v
    }

    pub fn to_expr(&self) -> SpExpr {
        self.expr_at(0)
    }

    pub fn expr_at(&self, w: usize) -> SpExpr {
        let n = &self.nodes[w];
        match (n.kind, n.children) {
            (Kind::Q, _) => SpExpr::Q(n.arc.unwrap()),
            (Kind::S, Some((a, b))) => SpExpr::s(self.expr_at(a), self.expr_at(b)),
            (_, Some((a, b))) => SpExpr::p(self.expr_at(a), self.expr_at(b)),
            _ => unreachable!("inner node without children"),
        }
    }
}

/// Recognizes `g` as series-parallel between `u0` and `v0` by repeated
/// parallel merges and series contractions.
pub fn recognize_sp(g: &Digraph, u0: usize, v0: usize) -> std::result::Result<SpTree, NotSeriesParallel> {
    let fail = |reason: &str, comps: &[Option<Comp>]| NotSeriesParallel {
        reason: reason.to_string(),
        kernel_nodes: kernel_nodes(comps),
        kernel_arcs: comps
            .iter()
            .flatten()
            .map(|c| (c.tail, c.head, leaves(&c.expr)))
            .collect(),
    };
    let mut comps: Vec<Option<Comp>> = g
        .arcs
        .iter()
        .enumerate()
        .map(|(i, a)| Some(Comp { tail: a.tail, head: a.head, expr: SpExpr::Q(i) }))
        .collect();
    if g.arc_count() == 0 {
        return Err(fail("graph has no arcs", &comps));
    }
    if u0 == v0 || u0 >= g.node_count() || v0 >= g.node_count() {
        return Err(fail("terminals must be two distinct nodes", &comps));
    }
    if let Some(v) = (0..g.node_count()).find(|&v| g.out_arcs(v).is_empty() && g.in_arcs(v).is_empty()) {
        return Err(fail(&format!("node {} is isolated", g.nodes[v]), &comps));
    }

    loop {
        let mut progress = false;

        // parallel bundles
        let mut bundles: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, c) in comps.iter().enumerate() {
            if let Some(c) = c {
                bundles.entry((c.tail, c.head)).or_default().push(i);
            }
        }
        for ((t, h), mut ids) in bundles {
            if ids.len() < 2 {
                continue;
            }
            ids.sort_by_key(|&i| comps[i].as_ref().unwrap().expr.min_arc());
            let parts: Vec<SpExpr> = ids.iter().map(|&i| comps[i].take().unwrap().expr).collect();
            let expr = nest(parts, SpExpr::p);
            comps.push(Some(Comp { tail: t, head: h, expr }));
            progress = true;
        }

        // series chains through nodes of in-degree and out-degree one
        let n = g.node_count();
        let mut ins: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut outs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, c) in comps.iter().enumerate() {
            if let Some(c) = c {
                outs[c.tail].push(i);
                ins[c.head].push(i);
            }
        }
        let contractible = |v: usize| v != u0 && v != v0 && ins[v].len() == 1 && outs[v].len() == 1;
        let mut used = vec![false; n];
        for m in 0..n {
            if used[m] || !contractible(m) {
                continue;
            }
            // walk back to the first node of the chain
            let mut start = m;
            let mut cyclic = false;
            loop {
                let prev = comps[ins[start][0]].as_ref().unwrap().tail;
                if !contractible(prev) {
                    break;
                }
                if prev == m {
                    cyclic = true;
                    break;
                }
                start = prev;
            }
            if cyclic {
                continue;
            }
            let mut chain = vec![ins[start][0]];
            let mut v = start;
            while contractible(v) {
                used[v] = true;
                let next = outs[v][0];
                chain.push(next);
                v = comps[next].as_ref().unwrap().head;
            }
            let tail = comps[chain[0]].as_ref().unwrap().tail;
            let parts: Vec<SpExpr> = chain.iter().map(|&i| comps[i].take().unwrap().expr).collect();
            comps.push(Some(Comp { tail, head: v, expr: nest(parts, SpExpr::s) }));
            progress = true;
        }

        let alive: Vec<&Comp> = comps.iter().flatten().collect();
        if alive.len() == 1 {
            let c = alive[0];
            if (c.tail, c.head) == (u0, v0) {
                let expr = c.expr.clone();
                return SpTree::from_expr(g, &expr).map_err(|e| fail(&e.to_string(), &comps));
            }
            return Err(fail("the reduced arc does not join the terminals", &comps));
        }
        if !progress {
            return Err(fail("no series or parallel reduction applies", &comps));
        }
        comps.retain(|c| c.is_some());
    }
}

#[derive(Debug, Clone)]
struct Comp {
    tail: usize,
    head: usize,
    expr: SpExpr,
}

fn nest(mut parts: Vec<SpExpr>, join: fn(SpExpr, SpExpr) -> SpExpr) -> SpExpr {
    let mut acc = parts.pop().unwrap();
    while let Some(p) = parts.pop() {
        acc = join(p, acc);
    }
    acc
}

fn leaves(e: &SpExpr) -> Vec<usize> {
    let mut v = Vec::new();
    fn walk(e: &SpExpr, v: &mut Vec<usize>) {
        match e {
            SpExpr::Q(a) => v.push(*a),
            SpExpr::S(a, b) | SpExpr::P(a, b) => {
                walk(a, v);
                walk(b, v);
            }
        }
    }
    walk(e, &mut v);
    v.sort_unstable();
    v
}

fn kernel_nodes(comps: &[Option<Comp>]) -> Vec<usize> {
    let mut v: Vec<usize> = comps.iter().flatten().flat_map(|c| [c.tail, c.head]).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Emits the digraph described by an expression, naming arcs `e1, e2, …`
/// in leaf order and nodes `n0` (source), `n1` (sink), `n2, …`.
pub fn graph_from_expr(expr: &SpExpr) -> (Digraph, SpExpr) {
    let mut g = Digraph::new();
    g.add_node("n0").unwrap();
    g.add_node("n1").unwrap();
    let mut counter = 0usize;
    fn build(e: &SpExpr, u: usize, v: usize, g: &mut Digraph, counter: &mut usize) -> SpExpr {
        match e {
            SpExpr::Q(_) => {
                *counter += 1;
                let id = g.add_arc(&format!("e{counter}"), u, v, None).unwrap();
                SpExpr::Q(id)
            }
            SpExpr::S(a, b) => {
                let name = format!("n{}", g.node_count());
                let m = g.add_node(&name).unwrap();
                let a = build(a, u, m, g, counter);
                let b = build(b, m, v, g, counter);
                SpExpr::s(a, b)
            }
            SpExpr::P(a, b) => {
                let a = build(a, u, v, g, counter);
                let b = build(b, u, v, g, counter);
                SpExpr::p(a, b)
            }
        }
    }
    let e = build(expr, 0, 1, &mut g, &mut counter);
    (g, e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> Digraph {
        Digraph::from_parts(
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
        .unwrap()
    }

    #[test]
    fn example1_tree_shape() {
        let g = example1();
        let t = recognize_sp(&g, 0, 2).unwrap();
        assert_eq!(t.len(), 11);
        assert_eq!(t.to_expr().display(&g), "P(S(e1, P(e2, P(e3, e4))), P(e5, e6))");
        assert_eq!(t.node(0).kind, Kind::P);
        assert_eq!(t.node(1).kind, Kind::S);
        for w in [2, 4, 6] {
            assert_eq!(t.node(w).kind, Kind::P);
        }
        assert_eq!(t.sp_arcs(6).unwrap(), &[2, 3]);
        assert_eq!(t.sp_arcs(0).unwrap(), &[0, 1, 2, 3, 4, 5]);
        assert_eq!(t.node(t.leaf_of_arc(2)).arc, Some(2));
        assert!(t.sp_arcs(99).is_err());
        assert!(t.is_inner(1, 1));
        assert!(!t.is_inner(1, 0));
    }

    #[test]
    fn fig1_tree() {
        let g = Digraph::from_parts(
            &["s1", "s2", "t1", "t2"],
            &[("a1", "s1", "s2", None), ("a2", "s1", "t2", None), ("a3", "s2", "t1", None), ("a4", "t1", "t2", None)],
        )
        .unwrap();
        let t = recognize_sp(&g, 0, 3).unwrap();
        assert_eq!(t.to_expr().display(&g), "P(S(a1, S(a3, a4)), a2)");
    }

    #[test]
    fn single_arc() {
        let g = Digraph::from_parts(&["a", "b"], &[("e", "a", "b", None)]).unwrap();
        let t = recognize_sp(&g, 0, 1).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.node(0).kind, Kind::Q);
    }

    #[test]
    fn k4_is_rejected_with_whole_kernel() {
        let names = ["1", "2", "3", "4"];
        let mut arcs = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                arcs.push((format!("a{i}{j}"), names[i].to_string(), names[j].to_string(), None));
            }
        }
        let arcs: Vec<(&str, &str, &str, Option<_>)> =
            arcs.iter().map(|(a, b, c, d)| (a.as_str(), b.as_str(), c.as_str(), d.clone())).collect();
        let g = Digraph::from_parts(&names, &arcs).unwrap();
        let err = recognize_sp(&g, 0, 3).unwrap_err();
        assert_eq!(err.kernel_arcs.len(), 6);
        assert_eq!(err.kernel_nodes, vec![0, 1, 2, 3]);
    }

    #[test]
    fn rejects_cycles_and_wrong_orientation() {
        let g = Digraph::from_parts(&["a", "b", "c"], &[("x", "a", "b", None), ("y", "b", "a", None), ("z", "a", "c", None)]).unwrap();
        assert!(recognize_sp(&g, 0, 2).is_err());
        let g = Digraph::from_parts(&["a", "b"], &[("x", "b", "a", None)]).unwrap();
        assert!(recognize_sp(&g, 0, 1).is_err());
        let g = Digraph::from_parts(&["a", "b", "c"], &[("x", "a", "b", None)]).unwrap();
        assert!(recognize_sp(&g, 0, 1).unwrap_err().reason.contains("isolated"));
    }

    #[test]
    fn deterministic_and_replayable() {
        let e = SpExpr::p(
            SpExpr::s(SpExpr::Q(0), SpExpr::p(SpExpr::Q(0), SpExpr::s(SpExpr::Q(0), SpExpr::Q(0)))),
            SpExpr::Q(0),
        );
        let (g, _) = graph_from_expr(&e);
        let t1 = recognize_sp(&g, 0, 1).unwrap();
        let t2 = recognize_sp(&g, 0, 1).unwrap();
        assert_eq!(t1, t2);
        let rebuilt = SpTree::from_expr(&g, &t1.to_expr()).unwrap();
        assert_eq!(rebuilt, t1);
        assert_eq!(t1.sp_arcs(0).unwrap().len(), g.arc_count());
    }
}
