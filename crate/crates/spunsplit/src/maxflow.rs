//! Integer max-flow (Edmonds–Karp) over arbitrary precision capacities.

use num::{BigInt, Signed, Zero};
use std::collections::VecDeque;

#[derive(Debug, Clone, Default)]
pub struct FlowNetwork {
    n: usize,
    to: Vec<usize>,
    cap: Vec<BigInt>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork { n, to: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); n] }
    }

    /// Adds `u → v` with the given capacity; returns the edge handle.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: BigInt) -> usize {
        let id = self.to.len();
        self.to.push(v);
        self.cap.push(cap);
        self.adj[u].push(id);
        self.to.push(u);
        self.cap.push(BigInt::zero());
        self.adj[v].push(id + 1);
        id
    }

    /// Flow currently on a forward edge.
    pub fn flow(&self, edge: usize) -> BigInt {
        self.cap[edge ^ 1].clone()
    }

    /// Augments from `s` to `t` until no path remains or `limit` is reached.
    pub fn max_flow(&mut self, s: usize, t: usize, limit: Option<&BigInt>) -> BigInt {
        let mut total = BigInt::zero();
        loop {
            if let Some(l) = limit {
                if &total >= l {
                    break;
                }
            }
            let mut pred = vec![usize::MAX; self.n];
            let mut seen = vec![false; self.n];
            seen[s] = true;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                if v == t {
                    break;
                }
                for &e in &self.adj[v] {
                    let w = self.to[e];
                    if !seen[w] && self.cap[e].is_positive() {
                        seen[w] = true;
                        pred[w] = e;
                        q.push_back(w);
                    }
                }
            }
            if !seen[t] {
                break;
            }
            let mut bottleneck: Option<BigInt> = limit.map(|l| l - &total);
            let mut v = t;
            while v != s {
                let e = pred[v];
                bottleneck = Some(match bottleneck {
                    Some(b) if b <= self.cap[e] => b,
                    _ => self.cap[e].clone(),
                });
                v = self.to[e ^ 1];
            }
            let b = bottleneck.unwrap();
            let mut v = t;
            while v != s {
                let e = pred[v];
                self.cap[e] -= &b;
                self.cap[e ^ 1] += &b;
                v = self.to[e ^ 1];
            }
            total += b;
        }
        total
    }

    /// Nodes reachable from `s` in the residual network.
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &e in &self.adj[v] {
                let w = self.to[e];
                if !seen[w] && self.cap[e].is_positive() {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diamond() {
        let mut f = FlowNetwork::new(4);
        let a = f.add_edge(0, 1, 3.into());
        f.add_edge(0, 2, 2.into());
        f.add_edge(1, 3, 2.into());
        f.add_edge(2, 3, 3.into());
        f.add_edge(1, 2, 5.into());
        assert_eq!(f.max_flow(0, 3, None), BigInt::from(5));
        assert_eq!(f.flow(a), BigInt::from(3));
        let r = f.residual_reachable(0);
        assert!(!r[3]);
    }

    #[test]
    fn limited() {
        let mut f = FlowNetwork::new(2);
        f.add_edge(0, 1, 10.into());
        assert_eq!(f.max_flow(0, 1, Some(&BigInt::from(4))), BigInt::from(4));
    }
}
