//! Brute-force oracles shared by the integration tests. They deliberately
//! avoid the search code paths of the library.
#![allow(dead_code)]

use itertools::Itertools;
use psdrank::exact::{frac, QMatrix, Rational};
use psdrank::pattern::SupportPattern;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random rational matrix with 1..=max rows/cols; each entry is zero with
/// probability 1/3, otherwise a nonzero fraction.
pub fn random_rational(rng: &mut ChaCha8Rng, max: usize) -> QMatrix {
    let rows = rng.random_range(1..=max);
    let cols = rng.random_range(1..=max);
    QMatrix::from_fn(rows, cols, |_, _| {
        if rng.random_range(0..3) == 0 {
            frac(0, 1)
        } else {
            let mut n = rng.random_range(-5i64..=4);
            if n >= 0 {
                n += 1;
            }
            frac(n, rng.random_range(1i64..=4))
        }
    })
}

pub fn random_pattern(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> SupportPattern {
    let bits: Vec<bool> = (0..rows * cols).map(|_| rng.random_bool(0.5)).collect();
    SupportPattern::from_fn(rows, cols, |i, j| bits[i * cols + j])
}

/// Minimum number of rectangles covering every set cell of `ones` while
/// avoiding every set cell of `forbidden`. Rectangles are generated from
/// every row subset and closed up to maximality, then combinations are tried
/// in increasing size.
pub fn brute_force_cover(ones: &SupportPattern, forbidden: &SupportPattern) -> usize {
    let (m, n) = (ones.rows(), ones.cols());
    let cells: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| ones.get(i, j))
        .collect();
    if cells.is_empty() {
        return 0;
    }
    let mut rects: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for mask in 1u32..(1 << m) {
        let rows: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let cols: Vec<usize> = (0..n).filter(|&j| rows.iter().all(|&i| !forbidden.get(i, j))).collect();
        if cols.is_empty() {
            continue;
        }
        let closed: Vec<usize> = (0..m).filter(|&i| cols.iter().all(|&j| !forbidden.get(i, j))).collect();
        if !rects.contains(&(closed.clone(), cols.clone())) {
            rects.push((closed, cols));
        }
    }
    let covers = |r: &(Vec<usize>, Vec<usize>), c: &(usize, usize)| r.0.contains(&c.0) && r.1.contains(&c.1);
    for k in 1..=cells.len() {
        for combo in rects.iter().combinations(k) {
            if cells.iter().all(|c| combo.iter().any(|r| covers(r, c))) {
                return k;
            }
        }
    }
    unreachable!("single cells are always feasible rectangles")
}

pub fn brute_force_boolean_rank(p: &SupportPattern) -> usize {
    brute_force_cover(p, &p.complement())
}

/// Longest triangular index sequence by trying every ordered choice of
/// distinct rows and columns, longest first.
pub fn brute_force_triangular_rank(p: &SupportPattern) -> usize {
    let top = p.rows().min(p.cols());
    for t in (1..=top).rev() {
        for rows in (0..p.rows()).permutations(t) {
            for cols in (0..p.cols()).permutations(t) {
                let ok = (0..t).all(|i| p.get(rows[i], cols[i]) && (0..i).all(|j| !p.get(rows[i], cols[j])));
                if ok {
                    return t;
                }
            }
        }
    }
    0
}

/// Plain Gaussian elimination over the rationals.
pub fn naive_rank(m: &QMatrix) -> usize {
    let mut rows: Vec<Vec<Rational>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let mut rank = 0;
    for c in 0..m.cols() {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] != frac(0, 1)) else {
            continue;
        };
        rows.swap(rank, p);
        for i in rank + 1..rows.len() {
            let f = &rows[i][c] / &rows[rank][c];
            for j in 0..m.cols() {
                let v = &rows[i][j] - &f * &rows[rank][j];
                rows[i][j] = v;
            }
        }
        rank += 1;
    }
    rank
}
