//! Brute-force references for cross-checking at desk scale.

use crate::error::{arg, Error, Result};
use crate::graph::Digraph;
use crate::instance::{total_flow, Instance, Multiflow};
use crate::rational::Rational;
use num::{Signed, ToPrimitive};

pub const DEFAULT_PATH_CAP: usize = 10_000;
pub const DEFAULT_ENUM_CAP: usize = 1_000_000;

/// Routing-enumeration cap, overridable through `SPUNSPLIT_ENUM_CAP`.
pub fn enum_cap() -> usize {
    std::env::var("SPUNSPLIT_ENUM_CAP").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_ENUM_CAP)
}

/// All simple `s`–`t` paths in lexicographic order of arc ids.
pub fn enumerate_paths(g: &Digraph, s: usize, t: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
    enumerate_paths_within(g, s, t, cap, |_| true)
}

fn enumerate_paths_within(
    g: &Digraph,
    s: usize,
    t: usize,
    cap: usize,
    allowed: impl Fn(usize) -> bool,
) -> Result<Vec<Vec<usize>>> {
    if cap == 0 {
        return arg("path cap must be positive");
    }
    let mut out = Vec::new();
    let mut on_path = vec![false; g.node_count()];
    let mut path = Vec::new();
    fn go(
        g: &Digraph,
        v: usize,
        t: usize,
        cap: usize,
        allowed: &dyn Fn(usize) -> bool,
        on_path: &mut [bool],
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if v == t {
            if out.len() == cap {
                return Err(Error::Size { what: "simple paths".into(), cap });
            }
            out.push(path.clone());
            return Ok(());
        }
        on_path[v] = true;
        let mut arcs: Vec<usize> = g.out_arcs(v).iter().copied().filter(|&e| allowed(e)).collect();
        arcs.sort_unstable();
        for e in arcs {
            let h = g.arcs[e].head;
            if !on_path[h] {
                path.push(e);
                go(g, h, t, cap, allowed, on_path, path, out)?;
                path.pop();
            }
        }
        on_path[v] = false;
        Ok(())
    }
    go(g, s, t, cap, &allowed, &mut on_path, &mut path, &mut out)?;
    Ok(out)
}

/// Number of `s`–`t` walks summed over all lengths, via adjacency-matrix
/// powers. On acyclic graphs this counts simple paths.
pub fn count_paths_by_matrix_powers(g: &Digraph, s: usize, t: usize) -> u128 {
    let n = g.node_count();
    let mut adj = vec![vec![0u128; n]; n];
    for a in &g.arcs {
        adj[a.tail][a.head] += 1;
    }
    let mut row = vec![0u128; n];
    row[s] = 1;
    let mut total = u128::from(s == t);
    for _ in 0..n {
        let mut next = vec![0u128; n];
        for (u, &c) in row.iter().enumerate() {
            if c != 0 {
                for v in 0..n {
                    next[v] += c * adj[u][v];
                }
            }
        }
        total += next[t];
        row = next;
    }
    total
}

fn as_units(r: &Rational) -> Option<usize> {
    (r.is_integer() && !r.is_negative()).then(|| r.to_integer().to_usize()).flatten()
}

struct Search<'a> {
    paths: &'a [Vec<Vec<usize>>],
    units: &'a [usize],
    upper: &'a [i64],
    lower: &'a [i64],
    cap: usize,
    explored: usize,
    loads: Vec<i64>,
    chosen: Vec<Vec<usize>>,
}

impl Search<'_> {
    /// Picks unit paths of commodity `c` with non-decreasing indices from `start`.
    fn go(&mut self, c: usize, placed: usize, start: usize) -> Result<bool> {
        self.explored += 1;
        if self.explored > self.cap {
            return Err(Error::Size { what: "routings".into(), cap: self.cap });
        }
        if c == self.units.len() {
            return Ok(self.loads.iter().zip(self.lower).all(|(l, lo)| l >= lo));
        }
        if placed == self.units[c] {
            return self.go(c + 1, 0, 0);
        }
        for k in start..self.paths[c].len() {
            let p = &self.paths[c][k];
            if p.iter().any(|&e| self.loads[e] + 1 > self.upper[e]) {
                continue;
            }
            for &e in p {
                self.loads[e] += 1;
            }
            self.chosen[c].push(k);
            if self.go(c, placed + 1, k)? {
                return Ok(true);
            }
            self.chosen[c].pop();
            for &e in p {
                self.loads[e] -= 1;
            }
        }
        Ok(false)
    }
}

fn run_search(
    inst: &Instance,
    paths: &[Vec<Vec<usize>>],
    upper: &[i64],
    lower: &[i64],
    cap: usize,
) -> Result<(Option<Multiflow>, usize)> {
    let units: Vec<usize> = inst
        .commodities
        .iter()
        .map(|c| as_units(&c.demand).ok_or_else(|| Error::Argument(format!("demand of {} is not an integer", c.name))))
        .collect::<Result<_>>()?;
    let mut s = Search {
        paths,
        units: &units,
        upper,
        lower,
        cap,
        explored: 0,
        loads: vec![0; inst.graph.arc_count()],
        chosen: vec![Vec::new(); units.len()],
    };
    if !s.go(0, 0, 0)? {
        return Ok((None, s.explored));
    }
    let mut x = Multiflow::zero(inst.k());
    let unit = Rational::from_integer(1.into());
    for (c, ks) in s.chosen.iter().enumerate() {
        for &k in ks {
            x.add_path(c, &paths[c][k], &unit);
        }
    }
    Ok((Some(x), s.explored))
}

fn integer_capacity(c: &Option<Rational>) -> i64 {
    c.as_ref().map_or(i64::MAX, |c| c.floor().to_integer().to_i64().unwrap_or(i64::MAX))
}

/// Searches integer multiflows (each commodity as a multiset of unit paths)
/// within the capacities. Returns the first one found.
pub fn exhaustive_feasibility(inst: &Instance, cap: usize) -> Result<Option<Multiflow>> {
    let paths: Vec<Vec<Vec<usize>>> = inst
        .commodities
        .iter()
        .map(|c| enumerate_paths(&inst.graph, c.source, c.sink, DEFAULT_PATH_CAP))
        .collect::<Result<_>>()?;
    let upper: Vec<i64> = inst.graph.arcs.iter().map(|a| integer_capacity(&a.capacity)).collect();
    let lower = vec![i64::MIN; upper.len()];
    Ok(run_search(inst, &paths, &upper, &lower, cap)?.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeCertificate {
    /// arcs whose total is integral, so every integer member must match it
    pub forced_arcs: Vec<usize>,
    /// per commodity, the arcs it may use
    pub support: Vec<Vec<usize>>,
    /// search nodes visited before exhaustion
    pub explored: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Probe {
    /// no integer multiflow inside the commodity supports meets the rounding bounds
    Impossible(ProbeCertificate),
    Inconclusive { reason: String },
    /// the matrix is already integral
    TriviallyDecomposable,
}

/// Looks for an integer multiflow that could appear in a convex decomposition
/// of the matrix `x` whose members meet the rounding bounds. Finding none
/// proves that no such decomposition exists.
pub fn matrix_decomposability_probe(inst: &Instance, x: &Multiflow, cap: usize) -> Result<Probe> {
    if x.is_integral() {
        return Ok(Probe::TriviallyDecomposable);
    }
    let m = inst.graph.arc_count();
    let totals = total_flow(m, x);
    let support: Vec<Vec<usize>> =
        (0..inst.k()).map(|i| (0..m).filter(|&e| x.get(e, i).is_positive()).collect()).collect();
    let mut paths = Vec::new();
    for (i, c) in inst.commodities.iter().enumerate() {
        let allowed = &support[i];
        match enumerate_paths_within(&inst.graph, c.source, c.sink, DEFAULT_PATH_CAP, |e| allowed.contains(&e)) {
            Ok(p) => paths.push(p),
            Err(Error::Size { .. }) => return Ok(Probe::Inconclusive { reason: "path cap exceeded".into() }),
            Err(e) => return Err(e),
        }
    }
    let to_i64 = |r: Rational| r.to_integer().to_i64().unwrap_or(i64::MAX);
    let upper: Vec<i64> = totals.iter().map(|t| to_i64(t.ceil())).collect();
    let lower: Vec<i64> = totals.iter().map(|t| to_i64(t.floor())).collect();
    match run_search(inst, &paths, &upper, &lower, cap) {
        Ok((None, explored)) => Ok(Probe::Impossible(ProbeCertificate {
            forced_arcs: (0..m).filter(|&e| totals[e].is_integer()).collect(),
            support,
            explored,
        })),
        Ok((Some(_), _)) => Ok(Probe::Inconclusive { reason: "a support-respecting integer multiflow exists".into() }),
        Err(Error::Size { cap, .. }) => Ok(Probe::Inconclusive { reason: format!("enumeration cap {cap} exceeded") }),
        Err(e) => Err(e),
    }
}
