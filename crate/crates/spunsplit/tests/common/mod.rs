//! Independent reference computations shared by the integration suites.
#![allow(dead_code)]

use num::{Signed, Zero};
use spunsplit::decompose::ConvexDecomposition;
use spunsplit::instance::{fractional_set, full_set, share_table, total_flow, Instance, Multiflow};
use spunsplit::io::InstanceFile;
use spunsplit::rational::Rational;
use std::path::PathBuf;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load(name: &str) -> (Instance, Option<Multiflow>) {
    InstanceFile::load(&fixture(name)).unwrap().to_instance().unwrap()
}

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// The option weights for shares `(a, b)`: the unique non-negative solution
/// of `w2 + w4 = a`, `w3 + w4 = b`, `Σ w = 1` with `w1 · w4 = 0`.
pub fn option_weights(a: &Rational, b: &Rational) -> [Rational; 4] {
    let one = r(1, 1);
    if a + b <= one {
        [&one - a - b, a.clone(), b.clone(), Rational::zero()]
    } else {
        [Rational::zero(), &one - b, &one - a, a + b - &one]
    }
}

/// Every check the main theorem promises, recomputed from scratch.
/// Returns a description of the first failure.
pub fn check_main_theorem(inst: &Instance, x: &Multiflow, almost: &Multiflow, d: &ConvexDecomposition) -> Result<(), String> {
    let m = inst.graph.arc_count();
    let totals = total_flow(m, x);
    let d_max = inst.d_max();
    let sum: Rational = d.terms.iter().map(|t| &t.rho).sum();
    if sum != r(1, 1) {
        return Err(format!("coefficients sum to {sum}"));
    }
    let mut combined = vec![Rational::zero(); m];
    for (k, t) in d.terms.iter().enumerate() {
        if !t.rho.is_positive() {
            return Err(format!("term {k} has a non-positive coefficient"));
        }
        let mut y = vec![Rational::zero(); m];
        for (i, c) in inst.commodities.iter().enumerate() {
            let p = t.paths.get(&i).ok_or(format!("term {k} misses commodity {i}"))?;
            if !inst.graph.is_simple_path(p, c.source, c.sink) {
                return Err(format!("term {k} commodity {i} is not on one simple path"));
            }
            for &e in p {
                y[e] += &c.demand;
            }
        }
        for e in 0..m {
            if (&y[e] - &totals[e]).abs() >= d_max {
                return Err(format!("term {k} arc {e}: {} vs {}", y[e], totals[e]));
            }
            combined[e] += &t.rho * &y[e];
        }
    }
    if combined != totals {
        return Err("reconstruction differs".into());
    }
    // every routing option, weighted or not, is within 2·d_max of the component flow
    let two = &d_max * r(2, 1);
    for z in share_table(inst, almost) {
        let xbar: Rational = z.iter().zip(&inst.commodities).map(|(s, c)| s * &c.demand).sum();
        let base: Rational = full_set(&z).iter().map(|&i| &inst.commodities[i].demand).sum();
        let frac = fractional_set(&z);
        for mask in 0..4usize {
            let mut y = base.clone();
            for (bit, &i) in frac.iter().enumerate().take(2) {
                if mask & (1 << bit) != 0 {
                    y += &inst.commodities[i].demand;
                }
            }
            if (&y - &xbar).abs() >= two {
                return Err("routing option outside 2·d_max".into());
            }
        }
    }
    Ok(())
}

/// Conservation, demands and capacities of a candidate multiflow.
pub fn check_multiflow(inst: &Instance, x: &Multiflow) {
    spunsplit::instance::check_conservation(inst, x).expect("conservation");
    let t = total_flow(inst.graph.arc_count(), x);
    for (e, a) in inst.graph.arcs.iter().enumerate() {
        if let Some(c) = &a.capacity {
            assert!(t[e] <= *c, "arc {e} carries {} over capacity {c}", t[e]);
        }
    }
}
