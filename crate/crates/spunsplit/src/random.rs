//! Seeded generators of series-parallel instances and multiflows, used by
//! the property suites and the examples.

use crate::graph::Digraph;
use crate::instance::{Commodity, Instance, Multiflow};
use crate::oracle::enumerate_paths;
use crate::rational::{int, Rational};
use crate::sptree::{graph_from_expr, SpExpr, SpTree};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random composition with exactly `leaves` arcs.
pub fn random_expr(rng: &mut impl Rng, leaves: usize) -> SpExpr {
    assert!(leaves > 0);
    if leaves == 1 {
        return SpExpr::Q(0);
    }
    let left = rng.gen_range(1..leaves);
    let a = random_expr(rng, left);
    let b = random_expr(rng, leaves - left);
    if rng.gen_bool(0.5) {
        SpExpr::s(a, b)
    } else {
        SpExpr::p(a, b)
    }
}

/// Draws `k` commodities with distinct endpoints and a path between them.
pub fn random_commodities(rng: &mut impl Rng, g: &Digraph, demands: &[Rational]) -> Vec<Commodity> {
    let mut pairs = Vec::new();
    for s in 0..g.node_count() {
        for t in 0..g.node_count() {
            if s != t && g.has_path(s, t) {
                pairs.push((s, t));
            }
        }
    }
    demands
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let &(s, t) = pairs.choose(rng).expect("the graph has an arc");
            Commodity { name: format!("{}", i + 1), source: s, sink: t, demand: d.clone() }
        })
        .collect()
}

/// Spreads every commodity over up to `max_paths` random paths with random
/// rational weights.
pub fn random_multiflow(rng: &mut impl Rng, inst: &Instance, max_paths: usize) -> Multiflow {
    let mut x = Multiflow::zero(inst.k());
    for (i, c) in inst.commodities.iter().enumerate() {
        let paths = enumerate_paths(&inst.graph, c.source, c.sink, 10_000).expect("small graph");
        let n = rng.gen_range(1..=max_paths.min(paths.len()));
        let chosen: Vec<&Vec<usize>> = paths.choose_multiple(rng, n).collect();
        let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
        let total: i64 = weights.iter().sum();
        for (p, w) in chosen.into_iter().zip(weights) {
            x.add_path(i, p, &(&c.demand * Rational::new(w.into(), total.into())));
        }
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomConfig {
    pub max_arcs: usize,
    pub max_commodities: usize,
    pub max_paths: usize,
    pub max_demand: i64,
    /// demands are drawn as `n` or `n/2` when false
    pub integer_demands: bool,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig { max_arcs: 30, max_commodities: 8, max_paths: 3, max_demand: 3, integer_demands: false }
    }
}

fn build(g: Digraph, expr: &SpExpr, commodities: Vec<Commodity>) -> Instance {
    let tree = SpTree::from_expr(&g, expr).expect("generated expression matches its graph");
    Instance::with_tree(g, (0, 1), tree, commodities).expect("generated commodities are routable")
}

/// A random instance with a random multiflow of its demands.
pub fn random_instance(rng: &mut impl Rng, cfg: &RandomConfig) -> (Instance, Multiflow) {
    let arcs = rng.gen_range(1..=cfg.max_arcs);
    let (g, expr) = graph_from_expr(&random_expr(rng, arcs));
    let k = rng.gen_range(1..=cfg.max_commodities);
    let demands: Vec<Rational> = (0..k)
        .map(|_| {
            let n = rng.gen_range(1..=cfg.max_demand);
            if cfg.integer_demands || rng.gen_bool(0.5) {
                int(n)
            } else {
                Rational::new((2 * n - 1).into(), 2.into())
            }
        })
        .collect();
    let commodities = random_commodities(rng, &g, &demands);
    let inst = build(g, &expr, commodities);
    let x = random_multiflow(rng, &inst, cfg.max_paths);
    (inst, x)
}

/// A small instance with capacities and demands in {1, 2}, for cut checks.
pub fn random_cut_instance(rng: &mut impl Rng, max_nodes: usize, max_commodities: usize) -> Instance {
    loop {
        let arcs = rng.gen_range(1..=max_nodes + 2);
        let (mut g, expr) = graph_from_expr(&random_expr(rng, arcs));
        if g.node_count() > max_nodes {
            continue;
        }
        for a in g.arcs.iter_mut() {
            a.capacity = Some(int(rng.gen_range(1..=2)));
        }
        let k = rng.gen_range(1..=max_commodities);
        let demands: Vec<Rational> = (0..k).map(|_| int(rng.gen_range(1..=2))).collect();
        let commodities = random_commodities(rng, &g, &demands);
        return build(g, &expr, commodities);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::check_conservation;

    #[test]
    fn generated_flows_conserve() {
        let mut r = rng(7);
        for _ in 0..20 {
            let (inst, x) = random_instance(&mut r, &RandomConfig::default());
            assert!(inst.graph.arc_count() <= 30 && inst.k() <= 8);
            assert!(check_conservation(&inst, &x).is_ok());
        }
    }

    #[test]
    fn seeds_replay() {
        let a = random_instance(&mut rng(3), &RandomConfig::default());
        let b = random_instance(&mut rng(3), &RandomConfig::default());
        assert_eq!(a, b);
    }

    #[test]
    fn cut_instances_are_small() {
        let mut r = rng(11);
        for _ in 0..20 {
            let inst = random_cut_instance(&mut r, 6, 3);
            assert!(inst.graph.node_count() <= 6);
        }
    }
}
