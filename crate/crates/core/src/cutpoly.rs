//! Cuts and cliques of the complete graph `K_n`, the clique-inequality slack
//! matrix, the clique/cut incompatibility graph `G`, the disjointness graphs
//! on `l`-subsets, and the finite check behind the reduction from covers of
//! `G` to covers of the disjointness graph avoiding unique intersections.
//!
//! Vertices are `1..=n`; vertex `i` is bit `i - 1` of a `u64` mask.

use itertools::Itertools;
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{QMatrix, Rational};
use crate::pattern::BipartiteGraph;

/// Largest `n` for which `G` and the slack matrix are materialised.
pub const MAX_CUT_N: usize = 8;
/// Default largest `n` for [`appendix_reduction_check`].
pub const DEFAULT_APPENDIX_CAP: usize = 18;
/// Default cap on the number of `l`-subsets in [`graph_h`].
pub const DEFAULT_SUBSET_CAP: u64 = 5000;

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Vertex list (1-based) of a mask.
pub fn mask_vertices(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

/// Cut `δ(W)` of `K_n`. `W` and its complement give the same cut; the stored
/// side is the one not containing vertex `n` (the smaller mask).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Cut {
    n: usize,
    side: u64,
}

impl Cut {
    pub fn new(n: usize, side: u64) -> Self {
        assert!((1..=64).contains(&n), "n out of range");
        let side = side & full_mask(n);
        let other = !side & full_mask(n);
        Self { n, side: side.min(other) }
    }

    pub fn side(&self) -> u64 {
        self.side
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// All `2^(n-1)` cuts of `K_n`, ordered by stored side.
pub fn cuts(n: usize) -> Vec<Cut> {
    (0..1u64 << (n - 1)).map(|w| Cut::new(n, w)).collect()
}

/// Vertex set of a clique of `K_n`, at least two vertices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Clique {
    n: usize,
    vertices: u64,
}

impl Clique {
    pub fn new(n: usize, vertices: u64) -> Result<Self> {
        if vertices & !full_mask(n) != 0 {
            return Err(Error::Precondition(format!("clique uses a vertex beyond {n}")));
        }
        if vertices.count_ones() < 2 {
            return Err(Error::Precondition("a clique needs at least two vertices".into()));
        }
        Ok(Self { n, vertices })
    }

    pub fn vertices(&self) -> u64 {
        self.vertices
    }

    pub fn size(&self) -> u32 {
        self.vertices.count_ones()
    }
}

/// All cliques of `K_n` with at least two vertices, ordered by mask.
pub fn cliques(n: usize) -> Vec<Clique> {
    (0..=full_mask(n))
        .filter(|m| m.count_ones() >= 2)
        .map(|m| Clique { n, vertices: m })
        .collect()
}

/// `|U|^2/4 - |U ∩ δ(W)|`, where the cut edges inside `U` are the pairs
/// split by `W`, so `|U ∩ δ(W)| = |U ∩ W| * |U \ W|`.
pub fn cut_clique_slack(u: &Clique, w: &Cut) -> Result<Rational> {
    if u.n != w.n {
        return Err(Error::DimensionMismatch {
            expected: format!("K_{}", u.n),
            found: format!("K_{}", w.n),
        });
    }
    let size = i64::from(u.size());
    let inside = i64::from((u.vertices & w.side).count_ones());
    let split = inside * (size - inside);
    Ok(Rational::new(BigInt::from(size * size - 4 * split), BigInt::from(4)))
}

fn check_cut_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Precondition("n must be at least 2".into()));
    }
    if n > MAX_CUT_N {
        return Err(Error::CapExceeded {
            what: "n for cut constructions",
            value: n as u128,
            cap: MAX_CUT_N as u128,
        });
    }
    Ok(())
}

/// The clique/cut graph together with its vertex labels.
#[derive(Clone, Debug)]
pub struct CutCliqueGraph {
    pub cliques: Vec<Clique>,
    pub cuts: Vec<Cut>,
    pub graph: BipartiteGraph,
}

/// Graph `G` on cliques x cuts with an edge when the cut edges inside the
/// clique number strictly fewer than `|U|^2/4`. Each pair is also checked
/// against the balanced-split form: no edge iff `|U ∩ W| = |U|/2`.
pub fn graph_g(n: usize) -> Result<CutCliqueGraph> {
    check_cut_n(n)?;
    let cl = cliques(n);
    let cs = cuts(n);
    let mut graph = BipartiteGraph::empty(cl.len(), cs.len());
    for (i, u) in cl.iter().enumerate() {
        for (j, w) in cs.iter().enumerate() {
            let edge = cut_clique_slack(u, w)? > Rational::from_integer(0.into());
            let inside = (u.vertices & w.side).count_ones();
            let balanced = 2 * inside == u.size();
            assert_eq!(edge, !balanced, "slack and balanced-split criteria disagree");
            if edge {
                graph.add_edge(i, j);
            }
        }
    }
    Ok(CutCliqueGraph {
        cliques: cl,
        cuts: cs,
        graph,
    })
}

/// Integer clique-inequality slack `floor(|U|^2/4) - |U ∩ W| |U \ W|` for one
/// clique against every cut, in [`cuts`] order.
pub fn slack_row(u: &Clique) -> Vec<i64> {
    let size = i64::from(u.size());
    let rhs = size * size / 4;
    cuts(u.n)
        .iter()
        .map(|w| {
            let inside = i64::from((u.vertices & w.side).count_ones());
            rhs - inside * (size - inside)
        })
        .collect()
}

/// Rows of the slack matrix, one clique at a time.
pub fn slack_rows(n: usize) -> Result<impl Iterator<Item = (Clique, Vec<i64>)>> {
    check_cut_n(n)?;
    Ok(cliques(n).into_iter().map(|u| {
        let row = slack_row(&u);
        (u, row)
    }))
}

/// Slack matrix of the clique inequalities on the cuts of `K_n`: rows are
/// cliques (|U| ≥ 2), columns are cuts.
pub fn slack_matrix_cut_clique(n: usize) -> Result<QMatrix> {
    let rows: Vec<Vec<Rational>> = slack_rows(n)?
        .map(|(_, r)| r.into_iter().map(|x| Rational::from_integer(x.into())).collect())
        .collect();
    QMatrix::from_rows(rows)
}

/// `l`-element subsets of `{1..N}` in lexicographic order, as masks.
pub fn subsets(big_n: usize, l: usize) -> Vec<u64> {
    (0..big_n)
        .combinations(l)
        .map(|c| c.into_iter().fold(0u64, |m, i| m | 1 << i))
        .collect()
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// The disjointness graph `H` (edge iff `x ∩ y = ∅`) and the
/// unique-intersection graph `H̄` (edge iff `|x ∩ y| = 1`) on `l`-subsets.
#[derive(Clone, Debug)]
pub struct DisjointnessGraphs {
    pub vertices: Vec<u64>,
    pub h: BipartiteGraph,
    pub hbar: BipartiteGraph,
}

pub fn graph_h(big_n: usize, l: usize, cap: u64) -> Result<DisjointnessGraphs> {
    if l == 0 || l > big_n || big_n > 64 {
        return Err(Error::Precondition(format!("need 1 ≤ l ≤ N ≤ 64, got N = {big_n}, l = {l}")));
    }
    let count = binomial(big_n as u64, l as u64);
    if count > u128::from(cap) {
        return Err(Error::CapExceeded {
            what: "number of l-subsets",
            value: count,
            cap: u128::from(cap),
        });
    }
    let vertices = subsets(big_n, l);
    let k = vertices.len();
    let h = BipartiteGraph::from_fn(k, k, |i, j| vertices[i] & vertices[j] == 0);
    let hbar = BipartiteGraph::from_fn(k, k, |i, j| (vertices[i] & vertices[j]).count_ones() == 1);
    Ok(DisjointnessGraphs { vertices, h, hbar })
}

/// Outcome of [`appendix_reduction_check`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ReductionCheck {
    pub n: usize,
    pub big_n: usize,
    pub l: usize,
    pub pairs_checked: u64,
    /// Offending `(x, y)` masks, at most a handful.
    pub failures: Vec<(u64, u64)>,
    pub pass: bool,
}

/// Exhaustive check of the reduction from `G` to the unique-intersection
/// graph for `n ≡ 2 (mod 8)`: with `N = n/2`, `l = floor(N/4)` and the fixed
/// tail `{N+1, ..., N+l-2}`, every pair of `l`-subsets `x, y` of `{1..N}`
/// gives `U = x ∪ tail`, `W = y ∪ tail`, and
/// `|U ∩ W| = |U|/2 ⟺ slack(U, W) = 0 ⟺ |x ∩ y| = 1`.
pub fn appendix_reduction_check(n: usize, cap: usize) -> Result<ReductionCheck> {
    if n % 8 != 2 {
        return Err(Error::Precondition(format!("n = {n} is not 2 mod 8")));
    }
    if n > cap || n > 64 {
        return Err(Error::CapExceeded {
            what: "n for the reduction check",
            value: n as u128,
            cap: cap.min(64) as u128,
        });
    }
    let big_n = n / 2;
    let l = big_n / 4;
    if l < 2 {
        return Err(Error::Precondition(format!(
            "n = {n} gives l = {l}, so the cliques have {} vertices",
            (2 * l).saturating_sub(2)
        )));
    }
    let tail: u64 = (big_n..big_n + l - 2).fold(0, |m, i| m | 1 << i);
    let sets = subsets(big_n, l);
    let failures: Vec<(u64, u64)> = sets
        .par_iter()
        .flat_map_iter(|&x| {
            let sets = &sets;
            sets.iter().filter_map(move |&y| {
                let u = Clique::new(n, x | tail).expect("2l - 2 ≥ 2 vertices");
                let w = Cut::new(n, y | tail);
                let unique = (x & y).count_ones() == 1;
                // W as given, not its canonical side
                let balanced = 2 * ((x | tail) & (y | tail)).count_ones() == u.size();
                let tight = cut_clique_slack(&u, &w).expect("same n") == Rational::from_integer(0.into());
                (balanced != unique || tight != unique).then_some((x, y))
            })
        })
        .collect();
    let pairs = (sets.len() * sets.len()) as u64;
    let pass = failures.is_empty();
    Ok(ReductionCheck {
        n,
        big_n,
        l,
        pairs_checked: pairs,
        failures: failures.into_iter().take(10).collect(),
        pass,
    })
}
