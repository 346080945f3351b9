mod common;

use common::{check_multiflow, load, option_weights, r};
use spunsplit::align::{align_instance, feasible_integer_multiflow, is_aligned, map_back, solve_multiflow, Solve};
use spunsplit::cuts::{check_cut, CutMode};
use spunsplit::decompose::mu;
use spunsplit::instance::total_flow;
use spunsplit::oracle::{count_paths_by_matrix_powers, enumerate_paths, exhaustive_feasibility, DEFAULT_ENUM_CAP};
use spunsplit::random::{random_cut_instance, random_instance, rng, RandomConfig};

#[test]
fn exhaustive_oracle_agrees_with_solvers() {
    let mut g = rng(41);
    for _ in 0..150 {
        let inst = random_cut_instance(&mut g, 5, 3);
        let brute = exhaustive_feasibility(&inst, DEFAULT_ENUM_CAP).unwrap();
        let integer = feasible_integer_multiflow(&inst).unwrap();
        let fractional = solve_multiflow(&inst).unwrap();
        let cut_ok = check_cut(&inst, CutMode::Strengthened).unwrap().is_none();
        assert_eq!(brute.is_some(), matches!(integer, Solve::Feasible(_)));
        assert_eq!(brute.is_some(), matches!(fractional, Solve::Feasible(_)));
        assert_eq!(brute.is_some(), cut_ok);
        if let Solve::Feasible(x) = integer {
            check_multiflow(&inst, &x);
            assert!(x.is_integral());
        }
    }
}

#[test]
fn path_counts_agree() {
    let mut g = rng(42);
    for _ in 0..50 {
        let (inst, _) = random_instance(&mut g, &RandomConfig::default());
        for c in &inst.commodities {
            let paths = enumerate_paths(&inst.graph, c.source, c.sink, 100_000).unwrap();
            assert_eq!(paths.len() as u128, count_paths_by_matrix_powers(&inst.graph, c.source, c.sink));
            for p in &paths {
                assert!(inst.graph.is_simple_path(p, c.source, c.sink));
            }
        }
    }
}

#[test]
fn alignment_round_trips_random_flows() {
    let mut g = rng(43);
    for _ in 0..60 {
        let inst = random_cut_instance(&mut g, 6, 3);
        let (aligned, map) = align_instance(&inst).unwrap();
        assert!(is_aligned(&aligned));
        if let Solve::Feasible(y) = solve_multiflow(&aligned).unwrap() {
            let x = map_back(&inst, &map, &y);
            check_multiflow(&inst, &x);
        }
    }
}

#[test]
fn fig1_is_infeasible_everywhere() {
    let (inst, _) = load("fig1.json");
    assert!(exhaustive_feasibility(&inst, DEFAULT_ENUM_CAP).unwrap().is_none());
    assert!(matches!(solve_multiflow(&inst).unwrap(), Solve::Infeasible { .. }));
}

#[test]
fn example1_totals_respect_capacities() {
    let (inst, x) = load("example1.json");
    let t = total_flow(inst.graph.arc_count(), &x.unwrap());
    assert_eq!(t[0], r(13, 2));
}

#[test]
fn mu_matches_characterisation() {
    for a in 0..8 {
        for b in 0..8 {
            let (za, zb) = (r(a, 8), r(b, 8));
            assert_eq!(mu(&za, &zb).unwrap(), option_weights(&za, &zb));
        }
    }
}
