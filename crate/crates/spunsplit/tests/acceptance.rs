//! Acceptance criteria 1 to 9. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.

mod common;

use common::{check_main_theorem, fixture, load, r};
use num::{Signed, Zero};
use rand::Rng;
use spunsplit::align::{integer_decomposition, solve_multiflow, to_transshipment, Solve};
use spunsplit::almost::{certify_almost_unsplittable, make_almost_unsplittable};
use spunsplit::cuts::{check_cut, check_cut_on, CutLimits, CutMode, Witness};
use spunsplit::decompose::{
    combine_weights, decompose_unsplittable, general_rows, lambda, lambda_p_eq_r, mu, refine_convex, refine_linear,
    series_rows, Bound,
};
use spunsplit::instance::{demand_shares, full_set, total_flow};
use spunsplit::io::{CombinationFixture, InstanceFile};
use spunsplit::oracle::{matrix_decomposability_probe, Probe, DEFAULT_ENUM_CAP};
use spunsplit::random::{random_cut_instance, random_instance, rng, RandomConfig};
use spunsplit::rational::Rational;
use std::time::{Duration, Instant};

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion1() -> Outcome {
    let (inst, x) = load("example1.json");
    let x = x.ok_or("fixture has no flow")?;
    let t = total_flow(6, &x);
    ensure(t == vec![r(13, 2), r(9, 4), r(9, 4), r(2, 1), r(2, 1), r(3, 2)], || format!("totals {t:?}"))?;
    ensure(inst.tree.len() == 11, || "tree size".into())?;
    let z = demand_shares(&inst, &x, 6);
    let want = [r(0, 1), r(3, 8), r(1, 1), r(1, 1), r(1, 1), r(1, 4), r(0, 1), r(0, 1)];
    ensure(z == want, || format!("z at ω6 {z:?}"))?;
    let m = mu(&z[1], &z[5]).map_err(|e| e.to_string())?;
    ensure(m == [r(3, 8), r(3, 8), r(1, 4), r(0, 1)], || format!("μ at ω6 {m:?}"))?;
    let base: Rational = full_set(&z).iter().map(|&i| &inst.commodities[i].demand).sum();
    let (dp, dq) = (&inst.commodities[1].demand, &inst.commodities[5].demand);
    let flows = [base.clone(), &base + dp, &base + dq, &base + dp + dq];
    ensure(flows == [r(3, 1), r(5, 1), r(5, 1), r(7, 1)], || format!("option flows {flows:?}"))?;
    let mixed: Rational = m.iter().zip(&flows).map(|(a, b)| a * b).sum();
    let xbar: Rational = z.iter().zip(&inst.commodities).map(|(s, c)| s * &c.demand).sum();
    ensure(mixed == r(17, 4) && xbar == r(17, 4), || format!("{mixed} vs {xbar}"))
}

type Small = num::rational::Ratio<i64>;

fn random_share(rng: &mut impl Rng, open: bool) -> Small {
    let d: i64 = rng.gen_range(1..=24);
    let hi = if open { d - 1 } else { d };
    Small::new(rng.gen_range(0..=hi), d)
}

fn big(z: &Small) -> Rational {
    r(*z.numer(), *z.denom())
}

fn small<const N: usize>(v: Result<[Rational; N], spunsplit::error::Error>) -> Result<[Small; N], String> {
    let v = v.map_err(|e| e.to_string())?;
    let conv = |x: &Rational| -> Option<Small> {
        use num::ToPrimitive;
        Some(Small::new(x.numer().to_i64()?, x.denom().to_i64()?))
    };
    let out: Option<Vec<Small>> = v.iter().map(conv).collect();
    out.and_then(|o| o.try_into().ok()).ok_or_else(|| "coefficient out of range".to_string())
}

/// Same characterisation as `common::option_weights`, in machine rationals.
fn weights(a: Small, b: Small) -> [Small; 4] {
    let (zero, one) = (Small::from(0), Small::from(1));
    if a + b <= one {
        [one - a - b, a, b, zero]
    } else {
        [zero, one - b, one - a, a + b - one]
    }
}

fn shaped<const N: usize>(v: &[Small; N], bound: usize) -> bool {
    let (zero, one) = (Small::from(0), Small::from(1));
    v.iter().sum::<Small>() == one && v.iter().all(|x| *x >= zero && *x <= one) && v.iter().filter(|x| **x != zero).count() <= bound
}

fn criterion2() -> Outcome {
    let mut g = rng(2);
    let (zero, one) = (Small::from(0), Small::from(1));
    for n in 0..10_000 {
        let (zp, zq) = (random_share(&mut g, true), random_share(&mut g, true));
        let m = small(mu(&big(&zp), &big(&zq)))?;
        ensure(m == weights(zp, zq), || format!("μ case {n}"))?;
        ensure(m[1] + m[3] == zp && m[2] + m[3] == zq, || format!("μ marginals case {n}"))?;
        ensure(shaped(&m, 3), || format!("μ shape {n}"))?;

        let (zp, zr, zq) = (random_share(&mut g, false), random_share(&mut g, false), random_share(&mut g, false));
        let l = small(lambda(&big(&zp), &big(&zr), &big(&zq)))?;
        let parent = [l[0] + l[1], l[2] + l[3], l[4] + l[5], l[6] + l[7]];
        let first = [l[1] + l[5], l[3] + l[7], l[0] + l[4], l[2] + l[6]];
        let second = [l[0] + l[2], l[1] + l[3], l[4] + l[6], l[5] + l[7]];
        ensure(parent == weights(zp, zq), || format!("λ parent case {n}"))?;
        ensure(first == weights(zp, one - zr), || format!("λ first child case {n}"))?;
        ensure(second == weights(zr, zq), || format!("λ second child case {n}"))?;
        ensure(shaped(&l, 4), || format!("λ shape {n}"))?;

        let (mut zp, mut zr) = (random_share(&mut g, false), random_share(&mut g, false));
        if zr > zp {
            std::mem::swap(&mut zp, &mut zr);
        }
        let zq = random_share(&mut g, false);
        let l = small(lambda_p_eq_r(&big(&zp), &big(&zr), &big(&zq)))?;
        let parent = [l[0], l[1] + l[2], l[3], l[4] + l[5]];
        let first = [l[0] + l[2] + l[3] + l[5], l[1] + l[4], zero, zero];
        let second = [l[0] + l[1], l[2], l[3] + l[4], l[5]];
        ensure(parent == weights(zp, zq), || format!("p=r parent case {n}"))?;
        ensure(first == weights(zp - zr, zero), || format!("p=r first child case {n}"))?;
        ensure(second == weights(zr, zq), || format!("p=r second child case {n}"))?;
        ensure(shaped(&l, 6), || format!("p=r shape {n}"))?;
    }
    Ok(())
}

fn random_weights(g: &mut impl Rng, total: &Rational) -> Vec<Rational> {
    let n = g.gen_range(1..=8);
    let raw: Vec<i64> = (0..n).map(|_| g.gen_range(1..=20)).collect();
    let s: i64 = raw.iter().sum();
    raw.iter().map(|&w| r(w, s) * total).collect()
}

fn marginals(pairs: &[(usize, usize, Rational)], la: usize, lb: usize) -> (Vec<Rational>, Vec<Rational>) {
    let mut a = vec![Rational::zero(); la];
    let mut b = vec![Rational::zero(); lb];
    for (i, j, w) in pairs {
        a[*i] += w;
        b[*j] += w;
    }
    (a, b)
}

fn criterion3() -> Outcome {
    let pairs = refine_convex(&[r(1, 4), r(1, 2), r(1, 4)], &[r(1, 6), r(1, 3), r(1, 3), r(1, 6)]).map_err(|e| e.to_string())?;
    let want = vec![
        (0, 0, r(1, 6)),
        (0, 1, r(1, 12)),
        (1, 1, r(1, 4)),
        (1, 2, r(1, 4)),
        (2, 2, r(1, 12)),
        (2, 3, r(1, 6)),
    ];
    ensure(pairs == want, || format!("figure example {pairs:?}"))?;
    let mut g = rng(3);
    for n in 0..1000 {
        let a = random_weights(&mut g, &r(1, 1));
        let b = random_weights(&mut g, &r(1, 1));
        let p = refine_convex(&a, &b).map_err(|e| e.to_string())?;
        ensure(p.len() < a.len() + b.len(), || format!("length case {n}"))?;
        ensure(marginals(&p, a.len(), b.len()) == (a.clone(), b.clone()), || format!("marginals case {n}"))?;
        let rho = r(g.gen_range(1..=9), 10);
        let a2: Vec<Rational> = a.iter().map(|w| w * r(3, 7)).collect();
        let p = refine_linear(&a2, &b, &rho).map_err(|e| e.to_string())?;
        let (ma, mb) = marginals(&p, a.len(), b.len());
        let sa: Rational = a2.iter().sum();
        ensure(ma == a2.iter().map(|w| w / &sa * &rho).collect::<Vec<_>>(), || format!("linear a {n}"))?;
        ensure(mb == b.iter().map(|w| w * &rho).collect::<Vec<_>>(), || format!("linear b {n}"))?;
    }
    Ok(())
}

fn criterion4() -> Outcome {
    for (file, count) in [("s_node_example.json", 10), ("p_node_example.json", 13)] {
        let fx = CombinationFixture::load(&fixture("combination").join(file)).map_err(|e| e.to_string())?;
        let z = fx.shares().map_err(|e| e.to_string())?;
        let rows = match fx.case.as_str() {
            "series" => series_rows(&mu(&z[0], &z[1]).map_err(|e| e.to_string())?),
            "general" => general_rows(&lambda(&z[0], &z[1], &z[2]).map_err(|e| e.to_string())?),
            other => return Err(format!("unexpected case {other}")),
        };
        let (first, second, expected) = fx.groups().map_err(|e| e.to_string())?;
        let got = combine_weights(&rows, &first, &second).map_err(|e| e.to_string())?;
        let got: Vec<Vec<Rational>> = got.iter().map(|g| g.iter().map(|t| t.2.clone()).collect()).collect();
        ensure(got == expected.to_vec(), || format!("{file}: {got:?}"))?;
        ensure(got.iter().map(Vec::len).sum::<usize>() == count, || format!("{file}: term count"))?;
    }
    Ok(())
}

fn criterion5() -> Outcome {
    let mut g = rng(5);
    for n in 0..200 {
        let (inst, x) = random_instance(&mut g, &RandomConfig::default());
        let out = decompose_unsplittable(&inst, &x, Bound::DMax).map_err(|e| format!("instance {n}: {e}"))?;
        check_main_theorem(&inst, &x, &out.almost, &out.decomposition).map_err(|e| format!("instance {n}: {e}"))?;
    }
    Ok(())
}

fn criterion6() -> Outcome {
    let mut g = rng(5);
    for n in 0..200 {
        let (inst, x) = random_instance(&mut g, &RandomConfig::default());
        let a = make_almost_unsplittable(&inst, &x).map_err(|e| format!("instance {n}: {e}"))?;
        let z = spunsplit::instance::share_table(&inst, &a.flow);
        for w in 0..inst.tree.len() {
            let f = spunsplit::instance::fractional_set(&z[w]);
            ensure(f.len() <= 2, || format!("instance {n}: |I| = {} at {w}", f.len()))?;
            if let (spunsplit::sptree::Kind::P, Some((c1, c2))) = (inst.tree.node(w).kind, inst.tree.node(w).children) {
                let f1 = spunsplit::instance::fractional_set(&z[c1]);
                let f2 = spunsplit::instance::fractional_set(&z[c2]);
                let shared = f1.iter().filter(|i| f2.contains(i)).count();
                ensure(shared <= 1, || format!("instance {n}: {shared} shared at {w}"))?;
            }
        }
        ensure(certify_almost_unsplittable(&inst, &a.flow).is_ok(), || format!("instance {n}: certificate"))?;
        let m = inst.graph.arc_count();
        ensure(total_flow(m, &a.flow) == total_flow(m, &x), || format!("instance {n}: totals"))?;
        let again = make_almost_unsplittable(&inst, &a.flow).map_err(|e| e.to_string())?;
        ensure(again.flow == a.flow, || format!("instance {n}: not idempotent"))?;
    }
    Ok(())
}

fn criterion7() -> Outcome {
    let mut g = rng(7);
    let cfg = RandomConfig { integer_demands: true, ..RandomConfig::default() };
    for n in 0..100 {
        let (inst, x) = random_instance(&mut g, &cfg);
        let y = total_flow(inst.graph.arc_count(), &x);
        let b = to_transshipment(&inst);
        let d = integer_decomposition(&inst.graph, &b, &y).map_err(|e| format!("instance {n}: {e}"))?;
        let mut sum = vec![Rational::zero(); y.len()];
        let mut weight = Rational::zero();
        for (rho, z) in &d {
            ensure(rho.is_positive(), || format!("instance {n}: coefficient"))?;
            weight += rho;
            for e in 0..y.len() {
                ensure(z[e].is_integer() && z[e] >= y[e].floor() && z[e] <= y[e].ceil(), || {
                    format!("instance {n}: arc {e} value {}", z[e])
                })?;
                sum[e] += rho * &z[e];
            }
        }
        ensure(weight == r(1, 1) && sum == y, || format!("instance {n}: reconstruction"))?;
    }
    Ok(())
}

fn criterion8() -> Outcome {
    let mut g = rng(8);
    let mut seen = std::collections::HashSet::new();
    let (mut feasible, mut infeasible) = (0, 0);
    while seen.len() < 600 {
        let inst = random_cut_instance(&mut g, 6, 3);
        if !seen.insert(format!("{:?}", InstanceFile::from_instance(&inst, None))) {
            continue;
        }
        let cut_ok = check_cut(&inst, CutMode::Strengthened).map_err(|e| e.to_string())?.is_none();
        let flow_ok = matches!(solve_multiflow(&inst).map_err(|e| e.to_string())?, Solve::Feasible(_));
        ensure(cut_ok == flow_ok, || {
            format!("cut {cut_ok} vs flow {flow_ok} on {}", serde_json::to_string(&InstanceFile::from_instance(&inst, None)).unwrap())
        })?;
        if flow_ok {
            feasible += 1;
        } else {
            infeasible += 1;
        }
    }
    ensure(feasible > 0 && infeasible > 0, || "generator produced one-sided instances".into())?;
    let (fig1, _) = load("fig1.json");
    ensure(check_cut(&fig1, CutMode::Classical).map_err(|e| e.to_string())?.is_none(), || "fig1 classical".into())?;
    let c = check_cut(&fig1, CutMode::Strengthened).map_err(|e| e.to_string())?.ok_or("fig1 strengthened ok")?;
    ensure(c.witness == Witness::Nodes(vec![fig1.graph.node_index("s2").unwrap()]), || format!("{:?}", c.witness))?;
    let raw = InstanceFile::load(&fixture("strengthened_vs_strong.json")).and_then(|f| f.resolve()).map_err(|e| e.to_string())?;
    let lim = CutLimits::default();
    let s = check_cut_on(&raw.graph, &raw.commodities, CutMode::Strengthened, lim).map_err(|e| e.to_string())?;
    ensure(s.is_none(), || "strengthened should hold".into())?;
    let st = check_cut_on(&raw.graph, &raw.commodities, CutMode::Strong, lim).map_err(|e| e.to_string())?;
    let solid: Vec<usize> = ["s1m", "mt2", "e1e2"].iter().map(|a| raw.graph.arc_index(a).unwrap()).collect();
    ensure(st.map(|c| c.witness) == Some(Witness::Arcs(solid)), || "strong witness".into())
}

fn criterion9() -> Outcome {
    let (inst, x) = load("counterexample.json");
    let x = x.ok_or("fixture has no flow")?;
    let out = decompose_unsplittable(&inst, &x, Bound::DMax).map_err(|e| e.to_string())?;
    check_main_theorem(&inst, &x, &out.almost, &out.decomposition)?;
    match matrix_decomposability_probe(&inst, &x, DEFAULT_ENUM_CAP).map_err(|e| e.to_string())? {
        Probe::Impossible(c) => {
            let names: Vec<&str> = c.forced_arcs.iter().map(|&e| inst.graph.arcs[e].name.as_str()).collect();
            ensure(names == ["e1", "e2", "e3"], || format!("forced arcs {names:?}"))
        }
        other => Err(format!("probe returned {other:?}")),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("example instance pipeline reproduction", criterion1, 1),
        ("coefficient-formula suite", criterion2, 5),
        ("refinement", criterion3, 2),
        ("worked combination examples", criterion4, 1),
        ("main theorem property suite", criterion5, 60),
        ("almost-unsplittable suite", criterion6, 30),
        ("integrality", criterion7, 10),
        ("cut-condition theorem", criterion8, 120),
        ("counter-example contrast", criterion9, 5),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = run();
        let took = start.elapsed();
        let res = res.and_then(|()| {
            ensure(took <= Duration::from_secs(*limit), || format!("took {took:.2?}, limit {limit} s"))
        });
        match res {
            Ok(()) => println!("criterion {}: PASS  {name} ({took:.2?})", k + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({took:.2?}): {e}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
