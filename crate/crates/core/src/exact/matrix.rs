use std::fmt;

use super::{fmt_rational, Field, MultiQuad, Rational};
use crate::error::{mismatch, Error, Result};

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> ExactMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = F::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(mismatch(rows * cols, data.len()));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from rows of equal length. An empty row list gives a
    /// `0 x cols` matrix only through [`ExactMatrix::zeros`].
    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(mismatch(cols, bad.len()));
        }
        let n = rows.len();
        Ok(Self {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: F) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F::is_zero)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> ExactMatrix<G> {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(mismatch(
                format!("{} rows on the right", self.cols),
                rhs.rows,
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let idx = i * rhs.cols + j;
                        out.data[idx] = out.data[idx].plus(&a.times(b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, F::plus)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, F::minus)
    }

    fn zip(&self, rhs: &Self, op: impl Fn(&F, &F) -> F) -> Result<Self> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(mismatch(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| op(a, b)).collect(),
        })
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|x| x.times(s))
    }

    pub fn trace(&self) -> Result<F> {
        self.require_square()?;
        Ok((0..self.rows).fold(F::zero(), |acc, i| acc.plus(self.get(i, i))))
    }

    /// `tr(self * rhs)` without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> Result<F> {
        if self.cols != rhs.rows || self.rows != rhs.cols {
            return Err(mismatch(
                format!("{}x{}", self.cols, self.rows),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        let mut acc = F::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = rhs.get(k, i);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.plus(&a.times(b));
                }
            }
        }
        Ok(acc)
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Exact rank by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        bareiss(self.data.clone(), self.rows, self.cols).rank
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<F> {
        self.require_square()?;
        if self.rows == 0 {
            return Ok(F::one());
        }
        let out = bareiss(self.data.clone(), self.rows, self.cols);
        if out.rank < self.rows {
            return Ok(F::zero());
        }
        let d = out.last_pivot;
        Ok(if out.swaps % 2 == 1 { d.negated() } else { d })
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = F::one().over(m.get(r, c));
            for j in c..self.cols {
                let v = m.get(r, j).times(&inv);
                m.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let v = m.get(i, j).minus(&f.times(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Inverse via Gauss-Jordan; `None` when singular.
    pub fn inverse(&self) -> Result<Option<Self>> {
        self.require_square()?;
        let n = self.rows;
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                F::one()
            } else {
                F::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Ok(None);
        }
        Ok(Some(Self::from_fn(n, n, |i, j| r.get(i, n + j).clone())))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

struct Bareiss<F> {
    rank: usize,
    swaps: usize,
    last_pivot: F,
}

/// Fraction-free elimination: after step `k` every entry of the trailing
/// block equals a `(k+1)`-minor, so the division by the previous pivot is exact.
fn bareiss<F: Field>(mut a: Vec<F>, rows: usize, cols: usize) -> Bareiss<F> {
    let mut prev = F::one();
    let mut rank = 0;
    let mut swaps = 0;
    let mut col = 0;
    while rank < rows && col < cols {
        let Some(p) = (rank..rows).find(|&i| !a[i * cols + col].is_zero()) else {
            col += 1;
            continue;
        };
        if p != rank {
            for j in 0..cols {
                a.swap(p * cols + j, rank * cols + j);
            }
            swaps += 1;
        }
        let pivot = a[rank * cols + col].clone();
        for i in rank + 1..rows {
            let lead = a[i * cols + col].clone();
            for j in col + 1..cols {
                let v = pivot
                    .times(&a[i * cols + j])
                    .minus(&lead.times(&a[rank * cols + j]))
                    .over(&prev);
                a[i * cols + j] = v;
            }
            a[i * cols + col] = F::zero();
        }
        prev = pivot;
        rank += 1;
        col += 1;
    }
    Bareiss {
        rank,
        swaps,
        last_pivot: prev,
    }
}

impl ExactMatrix<Rational> {
    /// Embeds a rational matrix into the multi-quadratic field.
    pub fn to_multiquad(&self) -> ExactMatrix<MultiQuad> {
        self.map(|r| MultiQuad::from(r.clone()))
    }
}

impl<F: Field> fmt::Display for ExactMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for ExactMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

impl ExactMatrix<Rational> {
    /// Rows of `p` / `p/q` strings, the JSON-facing form.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(fmt_rational).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, int, QMatrix};
    use proptest::prelude::*;

    fn q(rows: &[&[i64]]) -> QMatrix {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(QMatrix::identity(3).rank(), 3);
        assert_eq!(QMatrix::zeros(2, 3).rank(), 0);
        assert_eq!(q(&[&[1, 2], &[2, 4], &[0, 1]]).rank(), 2);
        assert_eq!(q(&[&[0, 0, 1], &[0, 0, 2]]).rank(), 1);
    }

    #[test]
    fn det_examples() {
        assert_eq!(QMatrix::identity(4).det().unwrap(), int(1));
        assert_eq!(q(&[&[0, 1], &[1, 0]]).det().unwrap(), int(-1));
        assert_eq!(q(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]).det().unwrap(), int(18));
        assert_eq!(q(&[&[1, 2], &[2, 4]]).det().unwrap(), int(0));
        assert!(matches!(QMatrix::zeros(2, 3).det(), Err(Error::NotSquare { .. })));

        let r2 = MultiQuad::term(int(1), 2);
        let r3 = MultiQuad::term(int(1), 3);
        let d = ExactMatrix::from_rows(vec![vec![r2, MultiQuad::zero()], vec![MultiQuad::zero(), r3]]).unwrap();
        assert_eq!(d.det().unwrap(), MultiQuad::term(int(1), 6));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = q(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), QMatrix::identity(2));
        assert!(q(&[&[1, 2], &[2, 4]]).inverse().unwrap().is_none());
        assert_eq!(q(&[&[4]]).inverse().unwrap().unwrap(), ExactMatrix::from_rows(vec![vec![frac(1, 4)]]).unwrap());
    }

    /// Plain Gaussian elimination with division, kept separate from Bareiss.
    fn naive_rank(m: &QMatrix) -> usize {
        let mut rows = m.row_vecs();
        let mut rank = 0;
        for c in 0..m.cols() {
            let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
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

    fn small_matrix() -> impl Strategy<Value = QMatrix> {
        (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
            prop::collection::vec((-3i64..=3, 1i64..=3), r * c).prop_map(move |v| {
                ExactMatrix::from_vec(r, c, v.into_iter().map(|(n, d)| frac(n, d)).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn bareiss_matches_naive(m in small_matrix()) {
            prop_assert_eq!(m.rank(), naive_rank(&m));
            prop_assert_eq!(m.transpose().rank(), m.rank());
        }

        #[test]
        fn det_is_multiplicative(a in small_matrix(), b in small_matrix()) {
            let n = a.rows().min(a.cols()).min(b.rows()).min(b.cols());
            let idx: Vec<usize> = (0..n).collect();
            let (a, b) = (a.submatrix(&idx, &idx), b.submatrix(&idx, &idx));
            let ab = a.mul(&b).unwrap();
            prop_assert_eq!(ab.det().unwrap(), a.det().unwrap() * b.det().unwrap());
        }
    }
}
