//! Support patterns, their bipartite graph views, triangular rank and exact
//! Boolean rank (biclique cover number), including covers that must avoid a
//! forbidden edge set.
//!
//! The poset attached to a nonnegative matrix `S` is encoded by its Hasse
//! diagram: row `k` lies below column `l` exactly when `S(k, l) = 0`. This is
//! the zero convention under which a subspace embedding realises
//! `U_k ⊆ V_l ⟺ S(k, l) = 0`. (One could also read the order relation off the
//! nonzero entries; that convention reverses every containment and is not
//! used anywhere in this crate.)

mod bitset;
mod cover;
mod triangular;

pub use bitset::BitSet;
pub use cover::{boolean_rank, feasible_biclique_cover, maximal_feasible_bicliques, CoverResult};
pub use triangular::{triangular_rank, TriangularWitness};

use crate::error::{mismatch, Result};
use crate::exact::{ExactMatrix, Field};

/// Boolean `rows x cols` matrix, stored one bitset per row.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SupportPattern {
    rows: usize,
    cols: usize,
    bits: Vec<BitSet>,
}

impl SupportPattern {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: vec![BitSet::new(cols); rows],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: vec![BitSet::full(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| i == j)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let bits = (0..rows)
            .map(|i| BitSet::from_indices(cols, (0..cols).filter(|&j| f(i, j))))
            .collect();
        Self { rows, cols, bits }
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(mismatch(cols, bad.len()));
        }
        Ok(Self::from_fn(rows.len(), cols, |i, j| rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i].contains(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if value {
            self.bits[i].insert(j);
        } else {
            self.bits[i].remove(j);
        }
    }

    pub fn row_bits(&self, i: usize) -> &BitSet {
        &self.bits[i]
    }

    pub fn column_bits(&self, j: usize) -> BitSet {
        BitSet::from_indices(self.rows, (0..self.rows).filter(|&i| self.get(i, j)))
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(BitSet::count).sum()
    }

    pub fn count_zeros(&self) -> usize {
        self.rows * self.cols - self.count_ones()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn complement(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| !self.get(i, j))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    /// The pattern as a 0/1 rational matrix.
    pub fn to_matrix<F: Field>(&self) -> ExactMatrix<F> {
        ExactMatrix::from_fn(self.rows, self.cols, |i, j| if self.get(i, j) { F::one() } else { F::zero() })
    }
}

/// Nonzero pattern of an exact matrix.
pub fn support<F: Field>(m: &ExactMatrix<F>) -> SupportPattern {
    SupportPattern::from_fn(m.rows(), m.cols(), |i, j| !m.get(i, j).is_zero())
}

/// Bipartite graph with left vertices `0..left` and right vertices
/// `0..right`; `adj[u]` holds the right neighbours of `u`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    adj: Vec<BitSet>,
}

impl BipartiteGraph {
    pub fn empty(left: usize, right: usize) -> Self {
        Self {
            left,
            right,
            adj: vec![BitSet::new(right); left],
        }
    }

    pub fn from_fn(left: usize, right: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        Self {
            left,
            right,
            adj: SupportPattern::from_fn(left, right, f).bits,
        }
    }

    /// Edges at the set entries of `p`.
    pub fn from_pattern(p: &SupportPattern) -> Self {
        Self {
            left: p.rows,
            right: p.cols,
            adj: p.bits.clone(),
        }
    }

    /// Biadjacency matrix as a pattern.
    pub fn to_pattern(&self) -> SupportPattern {
        SupportPattern {
            rows: self.left,
            cols: self.right,
            bits: self.adj.clone(),
        }
    }

    pub fn left_count(&self) -> usize {
        self.left
    }

    pub fn right_count(&self) -> usize {
        self.right
    }

    pub fn neighbors(&self, u: usize) -> &BitSet {
        &self.adj[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.adj[u].insert(v);
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BitSet::count).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, n)| n.iter().map(move |v| (u, v)))
    }

    pub fn same_vertices(&self, other: &Self) -> bool {
        self.left == other.left && self.right == other.right
    }

    pub fn is_edge_disjoint(&self, other: &Self) -> bool {
        self.same_vertices(other) && self.adj.iter().zip(&other.adj).all(|(a, b)| !a.intersects(b))
    }
}

/// Hasse diagram of the poset of a pattern: left = rows, right = columns,
/// edge `(k, l)` exactly at the zero entries.
pub fn poset_of(p: &SupportPattern) -> BipartiteGraph {
    BipartiteGraph::from_pattern(&p.complement())
}

/// Complete bipartite subgraph `left_set x right_set`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Biclique {
    pub left_set: BitSet,
    pub right_set: BitSet,
}

impl Biclique {
    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        self.left_set.contains(u) && self.right_set.contains(v)
    }

    /// Whether any edge of `g` lies inside the biclique.
    pub fn touches(&self, g: &BipartiteGraph) -> bool {
        self.left_set.iter().any(|u| g.neighbors(u).intersects(&self.right_set))
    }
}

/// Set of bicliques whose union is checked against a target edge set.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BicliqueCover {
    pub bicliques: Vec<Biclique>,
}

impl BicliqueCover {
    pub fn len(&self) -> usize {
        self.bicliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bicliques.is_empty()
    }

    /// Every edge of `ones` lies in some biclique and no biclique contains an
    /// edge of `forbidden`.
    pub fn verify(&self, ones: &BipartiteGraph, forbidden: &BipartiteGraph) -> bool {
        let covered = ones.edges().all(|(u, v)| self.bicliques.iter().any(|b| b.contains_edge(u, v)));
        covered && self.bicliques.iter().all(|b| !b.touches(forbidden))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, QMatrix};

    #[test]
    fn support_examples() {
        assert_eq!(support(&QMatrix::zeros(2, 3)), SupportPattern::zeros(2, 3));
        let ones = QMatrix::from_fn(3, 2, |_, _| int(1));
        assert_eq!(support(&ones), SupportPattern::ones(3, 2));
        let m = QMatrix::from_rows(vec![vec![int(0), int(-2)], vec![int(5), int(0)]]).unwrap();
        assert_eq!(support(&m), SupportPattern::identity(2).complement());
    }

    #[test]
    fn poset_examples() {
        let g = poset_of(&SupportPattern::identity(2));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
        assert_eq!(poset_of(&SupportPattern::ones(3, 4)).edge_count(), 0);
    }

    #[test]
    fn cover_verification() {
        let ones = BipartiteGraph::from_pattern(&SupportPattern::ones(2, 2));
        let none = BipartiteGraph::empty(2, 2);
        let whole = Biclique {
            left_set: BitSet::full(2),
            right_set: BitSet::full(2),
        };
        let cover = BicliqueCover { bicliques: vec![whole] };
        assert!(cover.verify(&ones, &none));
        let diag = BipartiteGraph::from_pattern(&SupportPattern::identity(2));
        assert!(!cover.verify(&ones, &diag));
        assert!(!BicliqueCover::default().verify(&ones, &none));
    }
}
