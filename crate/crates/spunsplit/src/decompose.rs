//! Convex decomposition of a multiflow's total flow into unsplittable
//! routings, built bottom-up over the sp-tree.
//!
//! Every tree node `ω` carries two labels `(p, q)`, its fractional
//! commodities padded with dummies (`None`). A term at `ω` respects routing
//! option `j ∈ 1..=4` when the labels it routes through `G_ω` are
//! `∅, {p}, {q}, {p, q}` respectively.

use crate::almost::make_almost_unsplittable;
use crate::error::{arg, internal, Error, Result};
use crate::instance::{demand_shares, fractional_set, full_set, share_table, total_flow, Instance, Multiflow};
use crate::rational::{fmt_rational, in_unit_interval, max2, min2, one, positive_part, second_max, zero, Rational};
use crate::sptree::Kind;
use num::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Label = Option<usize>;
pub type Paths = BTreeMap<usize, Vec<usize>>;

/// One unsplittable routing with its coefficient. At inner tree nodes the
/// paths are the segments inside `G_ω`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Term {
    pub rho: Rational,
    pub paths: Paths,
}

impl Term {
    pub fn flow(&self, inst: &Instance) -> Multiflow {
        let mut y = Multiflow::zero(inst.k());
        for (&i, p) in &self.paths {
            y.add_path(i, p, &inst.commodities[i].demand);
        }
        y
    }

    pub fn totals(&self, inst: &Instance) -> Vec<Rational> {
        total_flow(inst.graph.arc_count(), &self.flow(inst))
    }

    fn routes(&self, l: Label) -> bool {
        l.is_some_and(|i| self.paths.contains_key(&i))
    }

    /// Routing option in `1..=4` relative to `labels`.
    pub fn option(&self, labels: [Label; 2]) -> usize {
        1 + usize::from(self.routes(labels[0])) + 2 * usize::from(self.routes(labels[1]))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexDecomposition {
    pub terms: Vec<Term>,
}

impl ConvexDecomposition {
    pub fn weight(&self) -> Rational {
        self.terms.iter().map(|t| &t.rho).sum()
    }

    /// Σ ρ_ℓ y_ℓ
    pub fn combined_totals(&self, inst: &Instance) -> Vec<Rational> {
        let mut out = vec![zero(); inst.graph.arc_count()];
        for t in &self.terms {
            for (&i, p) in &t.paths {
                let w = &t.rho * &inst.commodities[i].demand;
                for &e in p {
                    out[e] += &w;
                }
            }
        }
        out
    }

    /// Σ ρ_ℓ Y_ℓ
    pub fn combined_flow(&self, inst: &Instance) -> Multiflow {
        let mut out = Multiflow::zero(inst.k());
        for t in &self.terms {
            for (&i, p) in &t.paths {
                out.add_path(i, p, &(&t.rho * &inst.commodities[i].demand));
            }
        }
        out
    }
}

fn check_unit(values: &[&Rational], half_open: bool) -> Result<()> {
    for v in values {
        if !in_unit_interval(v) || (half_open && v == &&one()) {
            return arg(format!("share {} outside the admissible range", fmt_rational(v)));
        }
    }
    Ok(())
}

/// μ₁..μ₄ for the fractional pair `(p, q)`.
pub fn mu(zp: &Rational, zq: &Rational) -> Result<[Rational; 4]> {
    check_unit(&[zp, zq], true)?;
    let cq = one() - zq;
    Ok([positive_part(&(&cq - zp)), min2(zp, &cq), one() - max2(zp, &cq), positive_part(&(zp - &cq))])
}

/// λ₁..λ₈ for a parallel node whose split commodity `r` differs from `p, q`.
pub fn lambda(zp: &Rational, zr: &Rational, zq: &Rational) -> Result<[Rational; 8]> {
    check_unit(&[zp, zr, zq], false)?;
    let cq = one() - zq;
    let m = second_max(&[zp.clone(), zr.clone(), cq.clone()])?;
    Ok([
        positive_part(&(&cq - &m)),
        positive_part(&(&m - zp)),
        positive_part(&(&m - zr)),
        min2(&min2(zp, zr), &cq),
        one() - max2(&max2(zp, zr), &cq),
        positive_part(&(zr - &m)),
        positive_part(&(zp - &m)),
        positive_part(&(&m - &cq)),
    ])
}

/// λ₁..λ₆ for a parallel node whose split commodity is `p` itself; `zr` is
/// the share of `p` in the child that also holds `q`.
pub fn lambda_p_eq_r(zp: &Rational, zr: &Rational, zq: &Rational) -> Result<[Rational; 6]> {
    check_unit(&[zp, zr, zq], false)?;
    if zr > zp {
        return arg("the split share cannot exceed the parent share");
    }
    let cq = one() - zq;
    let m = second_max(&[zp.clone(), zr.clone(), cq.clone()])?;
    Ok([
        positive_part(&(&cq - zp)),
        &m - zr,
        min2(zr, &cq),
        one() - max2(zp, &cq),
        zp - &m,
        positive_part(&(zr - &cq)),
    ])
}

/// Two-pointer refinement of two convex combinations with equal totals.
/// Returns `(index in a, index in b, weight)` triples.
pub fn refine_convex(a: &[Rational], b: &[Rational]) -> Result<Vec<(usize, usize, Rational)>> {
    if a.iter().sum::<Rational>() != b.iter().sum::<Rational>() {
        return arg("refinement inputs have different totals");
    }
    if a.iter().chain(b).any(|w| w.is_negative()) {
        return arg("refinement weights must be non-negative");
    }
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a.first().cloned().unwrap_or_default(), b.first().cloned().unwrap_or_default());
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() && j < b.len() {
        let w = min2(&ra, &rb);
        if w.is_positive() {
            out.push((i, j, w.clone()));
        }
        ra -= &w;
        rb -= &w;
        if ra.is_zero() {
            i += 1;
            ra = a.get(i).cloned().unwrap_or_default();
        }
        if rb.is_zero() {
            j += 1;
            rb = b.get(j).cloned().unwrap_or_default();
        }
    }
    Ok(out)
}

/// Refinement of two non-negative combinations, rescaled to total `rho_bar`.
pub fn refine_linear(a: &[Rational], b: &[Rational], rho_bar: &Rational) -> Result<Vec<(usize, usize, Rational)>> {
    if !rho_bar.is_positive() {
        return arg("target weight must be positive");
    }
    let (sa, sb): (Rational, Rational) = (a.iter().sum(), b.iter().sum());
    if !sa.is_positive() || !sb.is_positive() {
        return arg("cannot refine a group of zero weight");
    }
    let na: Vec<Rational> = a.iter().map(|w| w / &sa).collect();
    let nb: Vec<Rational> = b.iter().map(|w| w / &sb).collect();
    Ok(refine_convex(&na, &nb)?.into_iter().map(|(i, j, w)| (i, j, w * rho_bar)).collect())
}

/// Combines child group `a` with child group `b` into parent group `parent`
/// (all options `1..=4`), carrying total weight `weight`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub weight: Rational,
    pub a: usize,
    pub b: usize,
    pub parent: usize,
}

fn row(weight: &Rational, a: usize, b: usize, parent: usize) -> Row {
    Row { weight: weight.clone(), a, b, parent }
}

/// Rows of a series node: option `j` of both children gives option `j`.
pub fn series_rows(mu: &[Rational; 4]) -> Vec<Row> {
    (0..4).map(|j| row(&mu[j], j + 1, j + 1, j + 1)).collect()
}

/// Rows of the general parallel case; child labels `(p, r)` and `(r, q)`.
pub fn general_rows(l: &[Rational; 8]) -> Vec<Row> {
    let t = [(3, 1, 1), (1, 2, 1), (4, 1, 2), (2, 2, 2), (3, 3, 3), (1, 4, 3), (4, 3, 4), (2, 4, 4)];
    t.iter().zip(l).map(|(&(a, b, p), w)| row(w, a, b, p)).collect()
}

/// Rows of the parallel case with `r = p`; child labels `(r, ·)` and `(r, q)`.
pub fn p_eq_r_rows(l: &[Rational; 6]) -> Vec<Row> {
    let t = [(1, 1, 1), (2, 1, 2), (1, 2, 2), (1, 3, 3), (2, 3, 4), (1, 4, 4)];
    t.iter().zip(l).map(|(&(a, b, p), w)| row(w, a, b, p)).collect()
}

/// Weight-level combination: for every row with positive weight, refine the
/// two child groups. Returns per parent group the list of
/// `(index in child group a, index in child group b, weight, row)`.
pub fn combine_weights(
    rows: &[Row],
    groups_a: &[Vec<Rational>; 4],
    groups_b: &[Vec<Rational>; 4],
) -> Result<[Vec<(usize, usize, Rational, usize)>; 4]> {
    for (groups, pick, side) in [(groups_a, 0, "first"), (groups_b, 1, "second")] {
        for o in 1..=4 {
            let used: Rational = rows.iter().filter(|r| [r.a, r.b][pick] == o).map(|r| &r.weight).sum();
            let have: Rational = groups[o - 1].iter().sum();
            if used != have {
                return internal(format!(
                    "{side} child group {o} has weight {} but the rows need {}",
                    fmt_rational(&have),
                    fmt_rational(&used)
                ));
            }
        }
    }
    let mut out: [Vec<(usize, usize, Rational, usize)>; 4] = Default::default();
    for (k, r) in rows.iter().enumerate() {
        if !r.weight.is_positive() {
            continue;
        }
        let pairs = refine_linear(&groups_a[r.a - 1], &groups_b[r.b - 1], &r.weight)
            .map_err(|e| Error::Internal(format!("row {}: {e}", k + 1)))?;
        out[r.parent - 1].extend(pairs.into_iter().map(|(i, j, w)| (i, j, w, k)));
    }
    Ok(out)
}

fn group_terms(terms: &[Term], labels: [Label; 2]) -> [Vec<&Term>; 4] {
    let mut g: [Vec<&Term>; 4] = Default::default();
    for t in terms {
        g[t.option(labels) - 1].push(t);
    }
    g
}

fn combine_terms(
    rows: &[Row],
    a: &[Term],
    la: [Label; 2],
    b: &[Term],
    lb: [Label; 2],
    join: fn(&Paths, &Paths) -> Result<Paths>,
) -> Result<Vec<Term>> {
    let ga = group_terms(a, la);
    let gb = group_terms(b, lb);
    let wa: [Vec<Rational>; 4] = std::array::from_fn(|o| ga[o].iter().map(|t| t.rho.clone()).collect());
    let wb: [Vec<Rational>; 4] = std::array::from_fn(|o| gb[o].iter().map(|t| t.rho.clone()).collect());
    let groups = combine_weights(rows, &wa, &wb)?;
    let mut out = Vec::new();
    for group in groups {
        for (i, j, w, k) in group {
            let paths = join(&ga[rows[k].a - 1][i].paths, &gb[rows[k].b - 1][j].paths)?;
            out.push(Term { rho: w, paths });
        }
    }
    Ok(merge_duplicates(out))
}

fn join_series(a: &Paths, b: &Paths) -> Result<Paths> {
    let mut out = a.clone();
    for (i, p) in b {
        out.entry(*i).or_default().extend(p);
    }
    Ok(out)
}

fn join_parallel(a: &Paths, b: &Paths) -> Result<Paths> {
    let mut out = a.clone();
    for (i, p) in b {
        if out.insert(*i, p.clone()).is_some() {
            return internal(format!("commodity {i} routed through both parallel branches"));
        }
    }
    Ok(out)
}

/// Sums the coefficients of identical routings, keeping first-seen order.
pub fn merge_duplicates(terms: Vec<Term>) -> Vec<Term> {
    let mut index: BTreeMap<Paths, usize> = BTreeMap::new();
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    for t in terms {
        match index.get(&t.paths) {
            Some(&k) => out[k].rho += t.rho,
            None => {
                index.insert(t.paths.clone(), out.len());
                out.push(t);
            }
        }
    }
    out
}

/// Fractional commodities sorted and padded with dummies. The single real
/// commodity of a one-element set is `p`.
pub fn canonical_labels(frac: &[usize]) -> Result<[Label; 2]> {
    match frac {
        [] => Ok([None, None]),
        [a] => Ok([Some(*a), None]),
        [a, b] => Ok([Some(*a.min(b)), Some(*a.max(b))]),
        _ => internal(format!("{} fractional commodities at one tree node", frac.len())),
    }
}

fn share(z: &[Rational], l: Label) -> Rational {
    l.map_or_else(zero, |i| z[i].clone())
}

/// Routing options of a node: `(labels, μ)`.
pub fn node_options(inst: &Instance, x: &Multiflow, w: usize) -> Result<([Label; 2], [Rational; 4])> {
    let z = demand_shares(inst, x, w);
    let labels = canonical_labels(&fractional_set(&z))?;
    let m = mu(&share(&z, labels[0]), &share(&z, labels[1]))?;
    Ok((labels, m))
}

/// The four terms (or fewer) at a leaf.
pub fn leaf_decomposition(inst: &Instance, x: &Multiflow, w: usize) -> Result<Vec<Term>> {
    let node = inst.tree.node(w);
    let e = node.arc.ok_or_else(|| Error::Argument(format!("tree node {w} is not a leaf")))?;
    let z = demand_shares(inst, x, w);
    let full = full_set(&z);
    let (labels, m) = node_options(inst, x, w)?;
    let mut out = Vec::new();
    for (j, weight) in m.iter().enumerate() {
        if !weight.is_positive() {
            continue;
        }
        let mut paths: Paths = full.iter().map(|&i| (i, vec![e])).collect();
        for (bit, l) in labels.iter().enumerate() {
            if let Some(i) = l {
                if j & (1 << bit) != 0 {
                    paths.insert(*i, vec![e]);
                }
            }
        }
        out.push(Term { rho: weight.clone(), paths });
    }
    Ok(out)
}

fn check_parent_groups(terms: &[Term], labels: [Label; 2], m: &[Rational; 4], w: usize) -> Result<()> {
    let mut sums = [zero(), zero(), zero(), zero()];
    for t in terms {
        sums[t.option(labels) - 1] += &t.rho;
    }
    if &sums != m {
        return internal(format!("group weights at tree node {w} differ from the node's coefficients"));
    }
    Ok(())
}

/// Combines the decompositions of the two children of series node `w`.
pub fn series_combine(inst: &Instance, x: &Multiflow, w: usize, d1: &[Term], d2: &[Term]) -> Result<Vec<Term>> {
    let (c1, c2) = inst.tree.node(w).children.ok_or_else(|| Error::Argument("not an inner node".into()))?;
    let frac = fractional_set(&demand_shares(inst, x, w));
    for c in [c1, c2] {
        if fractional_set(&demand_shares(inst, x, c)) != frac {
            return internal(format!("series children of tree node {w} have different fractional sets"));
        }
    }
    let (labels, m) = node_options(inst, x, w)?;
    let out = combine_terms(&series_rows(&m), d1, labels, d2, labels, join_series)?;
    check_parent_groups(&out, labels, &m, w)?;
    Ok(out)
}

/// Which of the parallel cases applies at a node.
#[derive(Debug, Clone, PartialEq)]
pub enum ParallelCase {
    /// split commodity `r` is routed completely through the node
    General { r: usize },
    /// split commodity is one of the node's fractional commodities
    SplitIsFractional { r: usize },
    NoSplit,
}

/// Combines the decompositions of the two children of parallel node `w`.
pub fn parallel_combine(
    inst: &Instance,
    x: &Multiflow,
    w: usize,
    d1: &[Term],
    d2: &[Term],
) -> Result<(ParallelCase, Vec<Term>)> {
    let (c1, c2) = inst.tree.node(w).children.ok_or_else(|| Error::Argument("not an inner node".into()))?;
    let z = demand_shares(inst, x, w);
    let z1 = demand_shares(inst, x, c1);
    let z2 = demand_shares(inst, x, c2);
    let (i0, i1, i2) = (fractional_set(&z), fractional_set(&z1), fractional_set(&z2));
    let shared: Vec<usize> = i1.iter().copied().filter(|i| i2.contains(i)).collect();
    let [p, q] = canonical_labels(&i0)?;
    let in1 = |l: Label| l.is_some_and(|i| i1.contains(&i));
    let in2 = |l: Label| l.is_some_and(|i| i2.contains(&i));
    let (case, rows, labels, first_is_1, la, lb) = match shared.as_slice() {
        [r] if !i0.contains(r) => {
            let r = Some(*r);
            let first_is_1 = p.is_none() || in1(p);
            let (zb, q_in_b) = if first_is_1 { (&z2, q.is_none() || in2(q)) } else { (&z1, q.is_none() || in1(q)) };
            if !q_in_b {
                return internal(format!("both fractional commodities of tree node {w} lie in one branch"));
            }
            let l = lambda(&share(&z, p), &share(zb, r), &share(&z, q))?;
            (ParallelCase::General { r: r.unwrap() }, general_rows(&l), [p, q], first_is_1, [p, r], [r, q])
        }
        [r] => {
            let q = if p == Some(*r) { q } else { p };
            let r = Some(*r);
            let first_is_1 = !(q.is_some() && in1(q));
            let zb = if first_is_1 { &z2 } else { &z1 };
            let l = lambda_p_eq_r(&share(&z, r), &share(zb, r), &share(&z, q))?;
            (ParallelCase::SplitIsFractional { r: r.unwrap() }, p_eq_r_rows(&l), [r, q], first_is_1, [r, None], [r, q])
        }
        [] => {
            let mut union = i1.clone();
            union.extend(&i2);
            union.sort_unstable();
            if union != i0 {
                return internal(format!("fractional commodities of tree node {w} differ from its branches"));
            }
            let m = mu(&share(&z, p), &share(&z, q))?;
            let pick = |l: Label, ins: bool| if ins { l } else { None };
            let la = [pick(p, in1(p)), pick(q, in1(q))];
            let lb = [pick(p, in2(p)), pick(q, in2(q))];
            let rows = (0..4)
                .map(|j| {
                    let (rp, rq) = (j & 1 != 0, j & 2 != 0);
                    let a = 1 + usize::from(rp && in1(p)) + 2 * usize::from(rq && in1(q));
                    let b = 1 + usize::from(rp && in2(p)) + 2 * usize::from(rq && in2(q));
                    row(&m[j], a, b, j + 1)
                })
                .collect();
            (ParallelCase::NoSplit, rows, [p, q], true, la, lb)
        }
        _ => return internal(format!("branches of tree node {w} share {} fractional commodities", shared.len())),
    };
    let (da, db) = if first_is_1 { (d1, d2) } else { (d2, d1) };
    let out = combine_terms(&rows, da, la, db, lb, join_parallel)?;
    let m = mu(&share(&z, labels[0]), &share(&z, labels[1]))?;
    check_parent_groups(&out, labels, &m, w)?;
    Ok((case, out))
}

fn component_flow(inst: &Instance, z: &[Rational]) -> Rational {
    z.iter().zip(&inst.commodities).map(|(s, c)| s * &c.demand).sum()
}

fn routed_demand(inst: &Instance, set: impl IntoIterator<Item = usize>) -> Rational {
    set.into_iter().map(|i| &inst.commodities[i].demand).sum()
}

/// Checks that every routing option at every node stays strictly within
/// `2·d_max` of the component flow.
fn check_option_bounds(inst: &Instance, x: &Multiflow) -> Result<()> {
    let two = &inst.d_max() * Rational::from_integer(2.into());
    for (w, z) in share_table(inst, x).iter().enumerate() {
        let xbar = component_flow(inst, z);
        let base = routed_demand(inst, full_set(z));
        let labels = canonical_labels(&fractional_set(z))?;
        for j in 0..4 {
            let mut y = base.clone();
            for (bit, l) in labels.iter().enumerate() {
                if let (Some(i), true) = (l, j & (1 << bit) != 0) {
                    y += &inst.commodities[*i].demand;
                }
            }
            if (&y - &xbar).abs() >= two {
                return internal(format!("routing option {} at tree node {w} exceeds the 2·d_max bound", j + 1));
            }
        }
    }
    Ok(())
}

/// Bottom-up construction for an almost unsplittable flow. Reconstruction is
/// checked at every tree node.
pub fn decompose_recursive(inst: &Instance, x: &Multiflow) -> Result<ConvexDecomposition> {
    if let Err(w) = crate::almost::certify_almost_unsplittable(inst, x) {
        return arg(format!("flow is not almost unsplittable at tree node {w}"));
    }
    check_option_bounds(inst, x)?;
    let tree = &inst.tree;
    let mut at: Vec<Option<Vec<Term>>> = vec![None; tree.len()];
    for w in tree.postorder() {
        let node = tree.node(w);
        let terms = match (node.kind, node.children) {
            (Kind::Q, _) => leaf_decomposition(inst, x, w)?,
            (kind, Some((c1, c2))) => {
                let d1 = at[c1].take().expect("child done");
                let d2 = at[c2].take().expect("child done");
                if kind == Kind::S {
                    series_combine(inst, x, w, &d1, &d2)?
                } else {
                    parallel_combine(inst, x, w, &d1, &d2)?.1
                }
            }
            _ => return internal("inner node without children"),
        };
        check_reconstruction(inst, x, w, &terms)?;
        at[w] = Some(terms);
    }
    let mut terms = at[tree.root()].take().unwrap_or_default();
    terms.retain(|t| t.rho.is_positive());
    terms.sort_by(|a, b| a.paths.cmp(&b.paths));
    Ok(ConvexDecomposition { terms })
}

fn check_reconstruction(inst: &Instance, x: &Multiflow, w: usize, terms: &[Term]) -> Result<()> {
    let arcs = inst.tree.arcs_of(w);
    let mut sum: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for t in terms {
        for (&i, p) in &t.paths {
            for &e in p {
                *sum.entry((e, i)).or_insert_with(zero) += &t.rho * &inst.commodities[i].demand;
            }
        }
    }
    for &e in arcs {
        for i in 0..inst.k() {
            let got = sum.remove(&(e, i)).unwrap_or_else(zero);
            if got != x.get(e, i) {
                return internal(format!("decomposition at tree node {w} misses flow of commodity {i} on arc {e}"));
            }
        }
    }
    if !sum.is_empty() {
        return internal(format!("decomposition at tree node {w} routes outside its component"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Bound {
    #[default]
    DMax,
    TwoDMax,
}

impl Bound {
    pub fn factor(self) -> i64 {
        match self {
            Bound::DMax => 1,
            Bound::TwoDMax => 2,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Bound::DMax => "dmax",
            Bound::TwoDMax => "2dmax",
        })
    }
}

impl std::str::FromStr for Bound {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dmax" => Ok(Bound::DMax),
            "2dmax" => Ok(Bound::TwoDMax),
            _ => Err(Error::Argument(format!("unknown bound {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation {
    pub term: usize,
    pub arc: usize,
    pub term_flow: Rational,
    pub total_flow: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub mode: Bound,
    pub d_max: Rational,
    /// max over terms and arcs of `|y_e − x_e|`
    pub max_deviation: Rational,
    pub violations: Vec<BoundViolation>,
}

impl BoundReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Strict per-arc bound `|y_e − x_e| < d_max` (or `2·d_max`) for every term.
pub fn bound_report(inst: &Instance, x: &[Rational], d: &ConvexDecomposition, mode: Bound) -> BoundReport {
    let d_max = inst.d_max();
    let limit = &d_max * Rational::from_integer(mode.factor().into());
    let mut max_deviation = zero();
    let mut violations = Vec::new();
    for (k, t) in d.terms.iter().enumerate() {
        for (e, y) in t.totals(inst).into_iter().enumerate() {
            let dev = (&y - &x[e]).abs();
            if dev > max_deviation {
                max_deviation = dev.clone();
            }
            if dev >= limit {
                violations.push(BoundViolation { term: k, arc: e, term_flow: y, total_flow: x[e].clone() });
            }
        }
    }
    BoundReport { mode, d_max, max_deviation, violations }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposed {
    pub almost: Multiflow,
    pub decomposition: ConvexDecomposition,
    pub report: BoundReport,
}

/// The full pipeline: almost unsplittable sweep, bottom-up combination,
/// bound verification.
pub fn decompose_unsplittable(inst: &Instance, x: &Multiflow, mode: Bound) -> Result<Decomposed> {
    let almost = make_almost_unsplittable(inst, x)?.flow;
    let decomposition = decompose_recursive(inst, &almost)?;
    let totals = total_flow(inst.graph.arc_count(), x);
    let report = bound_report(inst, &totals, &decomposition, mode);
    if let Some(v) = report.violations.first() {
        return internal(format!(
            "term {} has flow {} on arc {} against total {}",
            v.term,
            fmt_rational(&v.term_flow),
            inst.graph.arcs[v.arc].name,
            fmt_rational(&v.total_flow)
        ));
    }
    Ok(Decomposed { almost, decomposition, report })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub check: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn has(&self, check: &str) -> bool {
        self.failures.iter().any(|f| f.check == check)
    }

    fn fail(&mut self, check: &'static str, detail: String) {
        self.failures.push(Failure { check, detail });
    }
}

/// Independent re-check of a decomposition against the flow it came from.
/// When the almost unsplittable flow is given, routing-option respect is
/// checked at every tree node too.
pub fn verify_decomposition(
    inst: &Instance,
    x: &Multiflow,
    d: &ConvexDecomposition,
    mode: Bound,
    almost: Option<&Multiflow>,
) -> VerifyReport {
    let mut r = VerifyReport::default();
    for (k, t) in d.terms.iter().enumerate() {
        if !t.rho.is_positive() {
            r.fail("positive", format!("term {k} has coefficient {}", fmt_rational(&t.rho)));
        }
        for (i, c) in inst.commodities.iter().enumerate() {
            match t.paths.get(&i) {
                Some(p) if inst.graph.is_simple_path(p, c.source, c.sink) => {}
                Some(_) => r.fail("paths", format!("term {k} routes commodity {} on a non-path", c.name)),
                None => r.fail("paths", format!("term {k} does not route commodity {}", c.name)),
            }
        }
        if t.paths.keys().any(|&i| i >= inst.k()) {
            r.fail("paths", format!("term {k} routes an unknown commodity"));
        }
    }
    if d.weight() != one() {
        r.fail("sum-to-one", format!("coefficients sum to {}", fmt_rational(&d.weight())));
    }
    let totals = total_flow(inst.graph.arc_count(), x);
    let got = d.combined_totals(inst);
    for (e, (a, b)) in got.iter().zip(&totals).enumerate() {
        if a != b {
            r.fail(
                "reconstruction",
                format!("arc {}: {} instead of {}", inst.graph.arcs[e].name, fmt_rational(a), fmt_rational(b)),
            );
        }
    }
    let report = bound_report(inst, &totals, d, mode);
    for v in &report.violations {
        r.fail("arc-bound", format!("term {} on arc {}", v.term, inst.graph.arcs[v.arc].name));
    }
    let limit = &inst.d_max() * Rational::from_integer(mode.factor().into());
    let z = share_table(inst, x);
    let tree = &inst.tree;
    for (w, zw) in z.iter().enumerate() {
        let xbar = component_flow(inst, zw);
        let arcs = tree.arcs_of(w);
        for (k, t) in d.terms.iter().enumerate() {
            let through: Vec<usize> =
                t.paths.iter().filter(|(_, p)| p.iter().any(|e| arcs.binary_search(e).is_ok())).map(|(&i, _)| i).collect();
            if (routed_demand(inst, through.iter().copied()) - &xbar).abs() >= limit {
                r.fail("component-bound", format!("term {k} at tree node {w}"));
            }
        }
    }
    if let Some(xt) = almost {
        if total_flow(inst.graph.arc_count(), xt) != totals {
            r.fail("almost", "the almost unsplittable flow has different totals".into());
        }
        for w in 0..tree.len() {
            let (labels, m) = match node_options(inst, xt, w) {
                Ok(o) => o,
                Err(e) => {
                    r.fail("options", format!("tree node {w}: {e}"));
                    continue;
                }
            };
            let full = full_set(&demand_shares(inst, xt, w));
            let arcs = tree.arcs_of(w);
            for (k, t) in d.terms.iter().enumerate() {
                let through: Vec<usize> = t
                    .paths
                    .iter()
                    .filter(|(_, p)| p.iter().any(|e| arcs.binary_search(e).is_ok()))
                    .map(|(&i, _)| i)
                    .collect();
                let respects = (0..4).any(|j| {
                    let mut want = full.clone();
                    for (bit, l) in labels.iter().enumerate() {
                        if let (Some(i), true) = (l, j & (1 << bit) != 0) {
                            want.push(*i);
                        }
                    }
                    want.sort_unstable();
                    m[j].is_positive() && want == through
                });
                if !respects {
                    r.fail("options", format!("term {k} respects no routing option at tree node {w}"));
                }
            }
        }
    }
    r
}
