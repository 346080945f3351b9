//! Directed multigraphs with optional arc capacities.
//!
//! Nodes and arcs are addressed by dense indices. The index order of arcs
//! is the "arc id order" used for every deterministic tie-break.

use crate::error::{arg, Error, Result};
use crate::rational::Rational;
use std::collections::{HashMap, VecDeque};

#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub name: String,
    pub tail: usize,
    pub head: usize,
    /// `None` means unbounded.
    pub capacity: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Digraph {
    pub nodes: Vec<String>,
    pub arcs: Vec<Arc>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from node names and `(name, tail, head, capacity)` tuples.
    pub fn from_parts<S: AsRef<str>>(
        nodes: &[S],
        arcs: &[(S, S, S, Option<Rational>)],
    ) -> Result<Self> {
        let mut g = Digraph::new();
        for n in nodes {
            g.add_node(n.as_ref())?;
        }
        for (name, t, h, c) in arcs {
            let t = g.node_index(t.as_ref())?;
            let h = g.node_index(h.as_ref())?;
            g.add_arc(name.as_ref(), t, h, c.clone())?;
        }
        Ok(g)
    }

    pub fn add_node(&mut self, name: &str) -> Result<usize> {
        if self.nodes.iter().any(|n| n == name) {
            return Err(Error::Parse(format!("duplicate node id {name:?}")));
        }
        self.nodes.push(name.to_string());
        self.out_arcs.push(Vec::new());
        self.in_arcs.push(Vec::new());
        Ok(self.nodes.len() - 1)
    }

    pub fn add_arc(&mut self, name: &str, tail: usize, head: usize, capacity: Option<Rational>) -> Result<usize> {
        if tail >= self.nodes.len() || head >= self.nodes.len() {
            return arg(format!("arc {name:?} references an unknown node"));
        }
        if tail == head {
            return Err(Error::Parse(format!("self-loop {name:?} at node {:?}", self.nodes[tail])));
        }
        if self.arcs.iter().any(|a| a.name == name) {
            return Err(Error::Parse(format!("duplicate arc id {name:?}")));
        }
        if let Some(c) = &capacity {
            if c < &num::Zero::zero() {
                return Err(Error::Parse(format!("negative capacity on arc {name:?}")));
            }
        }
        let id = self.arcs.len();
        self.arcs.push(Arc { name: name.to_string(), tail, head, capacity });
        self.out_arcs[tail].push(id);
        self.in_arcs[head].push(id);
        Ok(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn node_index(&self, name: &str) -> Result<usize> {
        self.nodes
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Parse(format!("unknown node {name:?}")))
    }

    pub fn arc_index(&self, name: &str) -> Result<usize> {
        self.arcs
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::Parse(format!("unknown arc {name:?}")))
    }

    pub fn name_lookup(&self) -> (HashMap<&str, usize>, HashMap<&str, usize>) {
        let n = self.nodes.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let a = self.arcs.iter().enumerate().map(|(i, s)| (s.name.as_str(), i)).collect();
        (n, a)
    }

    /// δ⁺(v), in arc id order.
    pub fn out_arcs(&self, v: usize) -> &[usize] {
        &self.out_arcs[v]
    }

    /// δ⁻(v), in arc id order.
    pub fn in_arcs(&self, v: usize) -> &[usize] {
        &self.in_arcs[v]
    }

    /// Arcs leaving the node set `inside` (a membership mask).
    pub fn delta_out(&self, inside: &[bool]) -> Vec<usize> {
        (0..self.arcs.len())
            .filter(|&e| inside[self.arcs[e].tail] && !inside[self.arcs[e].head])
            .collect()
    }

    /// Nodes reachable from `s` using only arcs not in `removed`.
    pub fn reachable(&self, s: usize, removed: &[bool]) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(v) = queue.pop_front() {
            for &e in &self.out_arcs[v] {
                if removed.get(e).copied().unwrap_or(false) {
                    continue;
                }
                let h = self.arcs[e].head;
                if !seen[h] {
                    seen[h] = true;
                    queue.push_back(h);
                }
            }
        }
        seen
    }

    pub fn has_path(&self, s: usize, t: usize) -> bool {
        self.reachable(s, &[])[t]
    }

    /// True if the arc sequence is a simple directed path from `s` to `t`.
    pub fn is_simple_path(&self, path: &[usize], s: usize, t: usize) -> bool {
        if path.is_empty() {
            return s == t;
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut cur = s;
        seen[cur] = true;
        for &e in path {
            match self.arcs.get(e) {
                Some(a) if a.tail == cur => {
                    cur = a.head;
                    if seen[cur] {
                        return false;
                    }
                    seen[cur] = true;
                }
                _ => return false,
            }
        }
        cur == t
    }

    /// Capacity of an arc set; `None` if any arc is unbounded.
    pub fn capacity_of(&self, arcs: &[usize]) -> Option<Rational> {
        let mut total = Rational::from_integer(0.into());
        for &e in arcs {
            total += self.arcs[e].capacity.as_ref()?;
        }
        Some(total)
    }

    /// Topological order, or `None` when the graph has a directed cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg: Vec<usize> = self.in_arcs.iter().map(|v| v.len()).collect();
        let mut queue: VecDeque<usize> = (0..self.nodes.len()).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &e in &self.out_arcs[v] {
                let h = self.arcs[e].head;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    queue.push_back(h);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }

    /// Redirects the endpoints of an arc, keeping adjacency lists sorted.
    pub(crate) fn set_endpoints(&mut self, e: usize, tail: usize, head: usize) {
        let old = (self.arcs[e].tail, self.arcs[e].head);
        self.out_arcs[old.0].retain(|&x| x != e);
        self.in_arcs[old.1].retain(|&x| x != e);
        self.arcs[e].tail = tail;
        self.arcs[e].head = head;
        insert_sorted(&mut self.out_arcs[tail], e);
        insert_sorted(&mut self.in_arcs[head], e);
    }

    pub(crate) fn rename_node(&mut self, v: usize, name: String) {
        self.nodes[v] = name;
    }
}

fn insert_sorted(v: &mut Vec<usize>, x: usize) {
    let pos = v.partition_point(|&y| y < x);
    v.insert(pos, x);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn fig1() -> Digraph {
        Digraph::from_parts(
            &["s1", "s2", "t1", "t2"],
            &[
                ("a1", "s1", "s2", Some(int(1))),
                ("a2", "s1", "t2", Some(int(1))),
                ("a3", "s2", "t1", Some(int(1))),
                ("a4", "t1", "t2", Some(int(1))),
            ],
        )
        .unwrap()
    }

    #[test]
    fn adjacency_and_delta() {
        let g = fig1();
        assert_eq!(g.out_arcs(0), &[0, 1]);
        assert_eq!(g.in_arcs(3), &[1, 3]);
        let mut inside = vec![false; 4];
        inside[1] = true;
        assert_eq!(g.delta_out(&inside), vec![2]);
        assert_eq!(g.capacity_of(&[0, 2]), Some(int(2)));
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        let mut g = Digraph::new();
        let a = g.add_node("a").unwrap();
        assert!(g.add_node("a").is_err());
        assert!(g.add_arc("x", a, a, None).is_err());
    }

    #[test]
    fn paths_and_reachability() {
        let g = fig1();
        assert!(g.has_path(0, 2));
        assert!(!g.has_path(2, 0));
        assert!(g.is_simple_path(&[0, 2, 3], 0, 3));
        assert!(!g.is_simple_path(&[0, 3], 0, 3));
        let mut removed = vec![false; 4];
        removed[2] = true;
        assert!(!g.reachable(0, &removed)[2]);
        assert!(g.topological_order().is_some());
    }
}
