use std::collections::BTreeSet;

use serde::Serialize;

use super::{BicliqueCover, Biclique, BipartiteGraph, BitSet, SupportPattern};
use crate::error::{mismatch, Error, Result};

/// Outcome of an exact cover search under a node budget.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CoverResult {
    Exact {
        value: usize,
        #[serde(skip)]
        cover: BicliqueCover,
        nodes: u64,
    },
    /// Budget exhausted; the true value lies in `[lower, upper]`.
    Unknown {
        lower: usize,
        upper: usize,
        #[serde(skip)]
        cover: BicliqueCover,
        nodes: u64,
    },
}

impl CoverResult {
    pub fn exact(&self) -> Option<usize> {
        match self {
            CoverResult::Exact { value, .. } => Some(*value),
            CoverResult::Unknown { .. } => None,
        }
    }

    pub fn bounds(&self) -> (usize, usize) {
        match self {
            CoverResult::Exact { value, .. } => (*value, *value),
            CoverResult::Unknown { lower, upper, .. } => (*lower, *upper),
        }
    }

    /// Best cover found; optimal when the result is exact.
    pub fn cover(&self) -> &BicliqueCover {
        match self {
            CoverResult::Exact { cover, .. } | CoverResult::Unknown { cover, .. } => cover,
        }
    }
}

/// Boolean rank of `p`: the fewest all-ones submatrices covering every set
/// entry.
pub fn boolean_rank(p: &SupportPattern, budget: u64) -> CoverResult {
    let ones = BipartiteGraph::from_pattern(p);
    let forbidden = BipartiteGraph::from_pattern(&p.complement());
    cover_search(&ones, &forbidden, budget)
}

/// Fewest bicliques covering every edge of `ones` such that no biclique
/// contains an edge of `forbidden`. Bicliques may contain pairs that are
/// edges of neither graph.
pub fn feasible_biclique_cover(
    ones: &BipartiteGraph,
    forbidden: &BipartiteGraph,
    budget: u64,
) -> Result<CoverResult> {
    if !ones.same_vertices(forbidden) {
        return Err(mismatch(
            format!("{}+{} vertices", ones.left_count(), ones.right_count()),
            format!("{}+{}", forbidden.left_count(), forbidden.right_count()),
        ));
    }
    if !ones.is_edge_disjoint(forbidden) {
        return Err(Error::Precondition("edge sets of the two graphs intersect".into()));
    }
    Ok(cover_search(ones, forbidden, budget))
}

/// Inclusion-maximal bicliques avoiding `forbidden`, restricted to those that
/// contain at least one edge of `ones`.
///
/// Maximal bicliques of the allowed graph are the closed pairs of its Galois
/// connection. Closed right sets are exactly the intersections of left
/// neighbourhoods (plus the full right side), so they are generated by
/// repeatedly intersecting known closed sets with each neighbourhood until no
/// new set appears.
pub fn maximal_feasible_bicliques(ones: &BipartiteGraph, forbidden: &BipartiteGraph) -> Vec<Biclique> {
    let (left, right) = (ones.left_count(), ones.right_count());
    let allowed: Vec<BitSet> = (0..left)
        .map(|u| BitSet::full(right).difference(forbidden.neighbors(u)))
        .collect();
    let mut closed: BTreeSet<BitSet> = BTreeSet::new();
    let mut frontier = vec![BitSet::full(right)];
    closed.insert(BitSet::full(right));
    while let Some(c) = frontier.pop() {
        for a in &allowed {
            let next = c.intersection(a);
            if !next.is_empty() && closed.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    closed
        .into_iter()
        .filter_map(|cols| {
            let rows = BitSet::from_indices(left, (0..left).filter(|&u| cols.is_subset(&allowed[u])));
            let useful = rows.iter().any(|u| ones.neighbors(u).intersects(&cols));
            useful.then_some(Biclique {
                left_set: rows,
                right_set: cols,
            })
        })
        .collect()
}

fn cover_search(ones: &BipartiteGraph, forbidden: &BipartiteGraph, budget: u64) -> CoverResult {
    let cells: Vec<(usize, usize)> = ones.edges().collect();
    if cells.is_empty() {
        return CoverResult::Exact {
            value: 0,
            cover: BicliqueCover::default(),
            nodes: 0,
        };
    }
    let bicliques = maximal_feasible_bicliques(ones, forbidden);
    let sets: Vec<BitSet> = bicliques
        .iter()
        .map(|b| {
            BitSet::from_indices(
                cells.len(),
                cells.iter().enumerate().filter(|(_, &(u, v))| b.contains_edge(u, v)).map(|(i, _)| i),
            )
        })
        .collect();
    // two cells fit in one biclique iff both cross pairs are allowed
    let compatible: Vec<BitSet> = cells
        .iter()
        .map(|&(u1, v1)| {
            BitSet::from_indices(
                cells.len(),
                cells
                    .iter()
                    .enumerate()
                    .filter(|(_, &(u2, v2))| !forbidden.has_edge(u1, v2) && !forbidden.has_edge(u2, v1))
                    .map(|(i, _)| i),
            )
        })
        .collect();
    let sets_of_cell: Vec<Vec<usize>> = (0..cells.len())
        .map(|e| (0..sets.len()).filter(|&s| sets[s].contains(e)).collect())
        .collect();

    let mut solver = SetCover {
        n: cells.len(),
        sets: &sets,
        sets_of_cell: &sets_of_cell,
        compatible: &compatible,
        best: greedy(cells.len(), &sets),
        chosen: Vec::new(),
        nodes: 0,
        budget,
        exhausted: false,
    };
    let root_lower = solver.fooling_bound(&BitSet::new(cells.len()));
    if root_lower < solver.best.len() {
        solver.branch(&BitSet::new(cells.len()));
    }
    let cover = BicliqueCover {
        bicliques: solver.best.iter().map(|&s| bicliques[s].clone()).collect(),
    };
    let upper = cover.len();
    if solver.exhausted {
        CoverResult::Unknown {
            lower: root_lower,
            upper,
            cover,
            nodes: solver.nodes,
        }
    } else {
        CoverResult::Exact {
            value: upper,
            cover,
            nodes: solver.nodes,
        }
    }
}

fn greedy(n: usize, sets: &[BitSet]) -> Vec<usize> {
    let mut covered = BitSet::new(n);
    let mut picked = Vec::new();
    while covered.count() < n {
        let best = (0..sets.len())
            .max_by_key(|&s| (sets[s].count_difference(&covered), std::cmp::Reverse(s)))
            .expect("every cell lies in some biclique");
        covered.union_with(&sets[best]);
        picked.push(best);
    }
    picked
}

struct SetCover<'a> {
    n: usize,
    sets: &'a [BitSet],
    sets_of_cell: &'a [Vec<usize>],
    compatible: &'a [BitSet],
    best: Vec<usize>,
    chosen: Vec<usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl SetCover<'_> {
    /// Size of a greedily built set of uncovered cells, no two of which fit
    /// in a common biclique; each needs its own biclique.
    fn fooling_bound(&self, covered: &BitSet) -> usize {
        let mut candidates = BitSet::full(self.n).difference(covered);
        let mut size = 0;
        // cells with fewest compatible partners first
        let mut order: Vec<usize> = candidates.iter().collect();
        order.sort_by_key(|&e| (self.compatible[e].count_difference(covered), e));
        for e in order {
            if candidates.contains(e) {
                size += 1;
                candidates = candidates.difference(&self.compatible[e]);
            }
        }
        size
    }

    fn branch(&mut self, covered: &BitSet) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if covered.count() == self.n {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        }
        if self.chosen.len() + self.fooling_bound(covered) >= self.best.len() {
            return;
        }
        let cell = (0..self.n)
            .filter(|&e| !covered.contains(e))
            .min_by_key(|&e| (self.sets_of_cell[e].len(), e))
            .expect("some cell is uncovered");
        let mut options = self.sets_of_cell[cell].clone();
        options.sort_by_key(|&s| (std::cmp::Reverse(self.sets[s].count_difference(covered)), s));
        for s in options {
            self.chosen.push(s);
            self.branch(&covered.union(&self.sets[s]));
            self.chosen.pop();
            if self.exhausted {
                return;
            }
        }
    }
}
