use std::collections::HashSet;

use super::{BitSet, SupportPattern};

/// Index sequences realising a triangular submatrix: `pattern[rows[i]][cols[i]]`
/// is set and `pattern[rows[i]][cols[j]]` is clear for every `j < i`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TriangularWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl TriangularWitness {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_valid_for(&self, p: &SupportPattern) -> bool {
        let distinct = |v: &[usize]| v.iter().collect::<HashSet<_>>().len() == v.len();
        self.rows.len() == self.cols.len()
            && distinct(&self.rows)
            && distinct(&self.cols)
            && self.rows.iter().enumerate().all(|(i, &k)| {
                p.get(k, self.cols[i]) && self.cols[..i].iter().all(|&l| !p.get(k, l))
            })
    }
}

/// Triangular rank: the longest index sequence forming a permuted triangular
/// submatrix with set diagonal. Any matrix with this support has rank at
/// least this value.
///
/// Depth-first search over partial sequences. A node is the pair (used rows,
/// used columns); the rows still usable are those clear on every used column,
/// and a maximum matching between usable rows and unused columns bounds how
/// far the sequence can grow. States are identified by their sets, so a
/// state reached through a different ordering is skipped.
pub fn triangular_rank(p: &SupportPattern) -> (usize, TriangularWitness) {
    let mut search = Search {
        p,
        col_bits: (0..p.cols()).map(|j| p.column_bits(j)).collect(),
        best: TriangularWitness::default(),
        seen: HashSet::new(),
        current: TriangularWitness::default(),
    };
    let usable = BitSet::from_indices(p.rows(), (0..p.rows()).filter(|&i| !p.row_bits(i).is_empty()));
    search.dfs(&usable, &BitSet::new(p.rows()), &BitSet::new(p.cols()));
    (search.best.len(), search.best)
}

struct Search<'a> {
    p: &'a SupportPattern,
    col_bits: Vec<BitSet>,
    best: TriangularWitness,
    seen: HashSet<(BitSet, BitSet)>,
    current: TriangularWitness,
}

impl Search<'_> {
    fn dfs(&mut self, usable: &BitSet, used_rows: &BitSet, used_cols: &BitSet) {
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
        }
        if !self.seen.insert((used_rows.clone(), used_cols.clone())) {
            return;
        }
        let free_cols = BitSet::full(self.p.cols()).difference(used_cols);
        let bound = max_matching(self.p, usable, &free_cols);
        if self.current.len() + bound <= self.best.len() {
            return;
        }
        for k in usable.iter() {
            let options = self.p.row_bits(k).intersection(&free_cols);
            for l in options.iter() {
                // rows that stay usable must be clear in column l
                let mut next = usable.difference(&self.col_bits[l]);
                next.remove(k);
                let mut rows = used_rows.clone();
                rows.insert(k);
                let mut cols = used_cols.clone();
                cols.insert(l);
                self.current.rows.push(k);
                self.current.cols.push(l);
                self.dfs(&next, &rows, &cols);
                self.current.rows.pop();
                self.current.cols.pop();
            }
        }
    }
}

/// Maximum matching between `rows` and `cols` along set entries (Kuhn).
fn max_matching(p: &SupportPattern, rows: &BitSet, cols: &BitSet) -> usize {
    let mut match_of_col: Vec<Option<usize>> = vec![None; p.cols()];
    let mut size = 0;
    for r in rows.iter() {
        let mut visited = vec![false; p.cols()];
        if augment(p, r, cols, &mut visited, &mut match_of_col) {
            size += 1;
        }
    }
    size
}

fn augment(
    p: &SupportPattern,
    r: usize,
    cols: &BitSet,
    visited: &mut [bool],
    match_of_col: &mut [Option<usize>],
) -> bool {
    for c in p.row_bits(r).intersection(cols).iter() {
        if visited[c] {
            continue;
        }
        visited[c] = true;
        if match_of_col[c].is_none_or(|r2| augment(p, r2, cols, visited, match_of_col)) {
            match_of_col[c] = Some(r);
            return true;
        }
    }
    false
}
