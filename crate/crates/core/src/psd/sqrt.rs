use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{sqrt_embed, ExactMatrix, Field, MultiQuad, QMatrix, Rational};
use crate::pattern::{support, SupportPattern};

/// Default cap on the number of nonzero entries whose signs are enumerated.
pub const DEFAULT_SIGN_CAP: usize = 24;

/// Signs attached to the nonzero entries of a submatrix, listed row-major.
/// `negative[i]` selects `-sqrt` at `positions[i]`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SignAssignment {
    pub positions: Vec<(usize, usize)>,
    pub negative: Vec<bool>,
}

impl SignAssignment {
    pub fn flipped(&self) -> Self {
        Self {
            positions: self.positions.clone(),
            negative: self.negative.iter().map(|b| !b).collect(),
        }
    }

    /// `+`/`-` string in position order.
    pub fn signs_string(&self) -> String {
        self.negative.iter().map(|&n| if n { '-' } else { '+' }).collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SqrtOptions {
    /// Fix the sign of the first nonzero entry; `Y` and `-Y` share a rank.
    pub fix_global_sign: bool,
    pub cap: usize,
}

impl Default for SqrtOptions {
    fn default() -> Self {
        Self {
            fix_global_sign: true,
            cap: DEFAULT_SIGN_CAP,
        }
    }
}

/// Result of enumerating the entrywise square roots of a submatrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SqrtRank {
    pub min_rank: usize,
    pub witness: SignAssignment,
    /// The signed square-root matrix realising `min_rank`.
    pub witness_matrix: ExactMatrix<MultiQuad>,
    pub assignments_checked: u64,
    /// Number of assignments per rank value.
    pub rank_counts: BTreeMap<usize, u64>,
}

/// Minimum rank over all matrices `Y` with `Y ∘ Y` equal to the selected
/// submatrix `S[rows, cols]`.
///
/// Zero entries stay zero; each nonzero entry takes `±sqrt(S(k, l))` in the
/// multi-quadratic field generated by the square-free parts, and the exact
/// rank of every sign choice is computed. Indices are 0-based. The minimum is
/// merged deterministically by (rank, lexicographically smallest signs), so
/// the witness does not depend on the thread count.
pub fn min_sqrt_rank(s: &QMatrix, rows: &[usize], cols: &[usize], opts: SqrtOptions) -> Result<SqrtRank> {
    if let Some(&bad) = rows.iter().find(|&&r| r >= s.rows()) {
        return Err(Error::Precondition(format!("row index {} out of range", bad + 1)));
    }
    if let Some(&bad) = cols.iter().find(|&&c| c >= s.cols()) {
        return Err(Error::Precondition(format!("column index {} out of range", bad + 1)));
    }
    let sub = s.submatrix(rows, cols);
    if let Some(neg) = sub.entries().iter().find(|x| *x < &Rational::zero()) {
        return Err(Error::NegativeSqrt(neg.to_string()));
    }
    let mut positions = Vec::new();
    let mut roots = Vec::new();
    for i in 0..sub.rows() {
        for j in 0..sub.cols() {
            if !sub.get(i, j).is_zero() {
                positions.push((i, j));
                roots.push(sqrt_embed(sub.get(i, j))?);
            }
        }
    }
    let z = positions.len();
    if z > opts.cap {
        return Err(Error::CapExceeded {
            what: "nonzero entries in sign enumeration",
            value: z as u128,
            cap: opts.cap as u128,
        });
    }
    let free = if opts.fix_global_sign && z > 0 { z - 1 } else { z };
    let total: u64 = 1 << free;

    let signs_of = |mask: u64| -> Vec<bool> {
        // with the global sign fixed, position 0 is always positive
        let offset = z - free;
        (0..z).map(|i| i >= offset && (mask >> (i - offset)) & 1 == 1).collect()
    };
    let build = |negative: &[bool]| -> ExactMatrix<MultiQuad> {
        let mut y = ExactMatrix::zeros(sub.rows(), sub.cols());
        for (idx, &(i, j)) in positions.iter().enumerate() {
            let v = if negative[idx] { roots[idx].negated() } else { roots[idx].clone() };
            y.set(i, j, v);
        }
        y
    };

    let (best, counts) = (0..total)
        .into_par_iter()
        .map(|mask| {
            let negative = signs_of(mask);
            let rank = build(&negative).rank();
            let mut counts = BTreeMap::new();
            counts.insert(rank, 1u64);
            ((rank, negative), counts)
        })
        .reduce(
            || ((usize::MAX, Vec::new()), BTreeMap::new()),
            |(a, mut ca), (b, cb)| {
                for (k, v) in cb {
                    *ca.entry(k).or_insert(0) += v;
                }
                (a.min(b), ca)
            },
        );
    let (min_rank, negative) = best;
    let witness = SignAssignment {
        positions: positions.iter().map(|&(i, j)| (rows[i], cols[j])).collect(),
        negative,
    };
    Ok(SqrtRank {
        min_rank,
        witness_matrix: build(&witness.negative),
        witness,
        assignments_checked: total,
        rank_counts: counts,
    })
}

/// Why a row is forced to a rank-one factor in an order-3 factorization:
/// it has a nonzero, and two of its zeros sit in columns that have nonzeros
/// and different zero patterns (0-based indices).
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RowCheck {
    pub row: usize,
    pub zero_cols: (usize, usize),
}

/// Why a column is forced to a rank-one factor: it has a nonzero, and two of
/// its zeros sit in rows that have nonzeros and different zero patterns.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ColCheck {
    pub col: usize,
    pub zero_rows: (usize, usize),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionStatus {
    /// No psd factorization of order 3 (or less) exists.
    PsdRankAtLeast4,
    Inconclusive,
}

/// Certificate produced by [`order3_exclusion`]. Indices are 0-based and
/// refer to the full input matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Order3Certificate {
    pub status: ExclusionStatus,
    /// Size of the leading window the argument ran on, `(rows, cols)`.
    pub window: (usize, usize),
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub row_checks: Vec<RowCheck>,
    pub col_checks: Vec<ColCheck>,
    /// Sign enumeration on `rows x cols`; absent when the selection is empty.
    pub enumeration: Option<SqrtRank>,
    /// Leading windows skipped because their selection exceeded the cap.
    pub skipped_windows: Vec<(usize, usize)>,
}

impl Order3Certificate {
    pub fn proves_bound(&self) -> bool {
        self.status == ExclusionStatus::PsdRankAtLeast4
    }
}

/// Attempts to prove that no psd factorization of order 3 exists.
///
/// In an order-3 factorization the images `U_k` of the row factors and the
/// kernels `V_l` of the column factors satisfy `U_k ⊆ V_l` exactly at the
/// zeros. A row with a nonzero has `dim U_k ≥ 1`; a column with a nonzero has
/// `dim V_l ≤ 2`. If row `k` is zero in two such columns with different zero
/// patterns, `dim U_k = 2` would force both kernels to equal `U_k`, so
/// `A_k` has rank one; dually for columns. On the rows and columns forced to
/// rank one, `S(k, l) = (u_k · v_l)^2`, so some entrywise square root of that
/// block has rank at most 3. When every square root has rank at least 4, no
/// factorization of order 3 exists, and padding rules out smaller orders.
///
/// The checks compare zero patterns only. Leading windows `s x s` are tried
/// in increasing size (the psd rank of a submatrix is a lower bound), then
/// the full matrix when it is not square; the first conclusive window wins.
pub fn order3_exclusion(s: &QMatrix, opts: SqrtOptions) -> Result<Order3Certificate> {
    if let Some(neg) = s.entries().iter().find(|x| *x < &Rational::zero()) {
        return Err(Error::NegativeSqrt(neg.to_string()));
    }
    let mut windows: Vec<(usize, usize)> = (1..=s.rows().min(s.cols())).map(|k| (k, k)).collect();
    if s.rows() != s.cols() {
        windows.push((s.rows(), s.cols()));
    }
    let mut skipped = Vec::new();
    let mut last = None;
    for (wr, wc) in windows {
        let rows: Vec<usize> = (0..wr).collect();
        let cols: Vec<usize> = (0..wc).collect();
        let window = s.submatrix(&rows, &cols);
        let mut cert = exclusion_on(&window, opts)?;
        cert.window = (wr, wc);
        if cert.enumeration.is_none() && !cert.rows.is_empty() && !cert.cols.is_empty() {
            skipped.push((wr, wc));
            continue;
        }
        if cert.proves_bound() {
            cert.skipped_windows = skipped;
            return Ok(cert);
        }
        last = Some(cert);
    }
    let mut cert = last.unwrap_or(Order3Certificate {
        status: ExclusionStatus::Inconclusive,
        window: (s.rows(), s.cols()),
        rows: Vec::new(),
        cols: Vec::new(),
        row_checks: Vec::new(),
        col_checks: Vec::new(),
        enumeration: None,
        skipped_windows: Vec::new(),
    });
    cert.skipped_windows = skipped;
    Ok(cert)
}

/// The argument on one matrix. Leaves `enumeration` empty when the selected
/// block is empty or too large for the sign cap.
fn exclusion_on(s: &QMatrix, opts: SqrtOptions) -> Result<Order3Certificate> {
    let p = support(s);
    let row_checks = forced_rows(&p);
    let col_checks: Vec<ColCheck> = forced_rows(&p.transpose())
        .into_iter()
        .map(|r| ColCheck {
            col: r.row,
            zero_rows: r.zero_cols,
        })
        .collect();
    let rows: Vec<usize> = row_checks.iter().map(|c| c.row).collect();
    let cols: Vec<usize> = col_checks.iter().map(|c| c.col).collect();
    let mut cert = Order3Certificate {
        status: ExclusionStatus::Inconclusive,
        window: (s.rows(), s.cols()),
        rows,
        cols,
        row_checks,
        col_checks,
        enumeration: None,
        skipped_windows: Vec::new(),
    };
    if cert.rows.is_empty() || cert.cols.is_empty() {
        return Ok(cert);
    }
    match min_sqrt_rank(s, &cert.rows, &cert.cols, opts) {
        Ok(e) => {
            if e.min_rank >= 4 {
                cert.status = ExclusionStatus::PsdRankAtLeast4;
            }
            cert.enumeration = Some(e);
            Ok(cert)
        }
        Err(Error::CapExceeded { .. }) => Ok(cert),
        Err(e) => Err(e),
    }
}

/// Rows whose factor must have rank one in an order-3 factorization.
fn forced_rows(p: &SupportPattern) -> Vec<RowCheck> {
    let cols_with_nonzero: Vec<bool> = (0..p.cols()).map(|j| !p.column_bits(j).is_empty()).collect();
    let col_patterns: Vec<_> = (0..p.cols()).map(|j| p.column_bits(j)).collect();
    (0..p.rows())
        .filter(|&k| !p.row_bits(k).is_empty())
        .filter_map(|k| {
            let zeros: Vec<usize> = (0..p.cols()).filter(|&l| !p.get(k, l) && cols_with_nonzero[l]).collect();
            zeros
                .iter()
                .enumerate()
                .flat_map(|(i, &a)| zeros[i + 1..].iter().map(move |&b| (a, b)))
                .find(|&(a, b)| col_patterns[a] != col_patterns[b])
                .map(|zero_cols| RowCheck { row: k, zero_cols })
        })
        .collect()
}
