use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{mismatch, Error, Result};
use crate::exact::{Field, QMatrix, Rational};
use crate::pattern::support;

/// Psd factorization of order `q`: `S(k, l) = tr(A_k B_l)` with symmetric
/// positive semidefinite `q x q` factors. Symmetry is checked on
/// construction; positive semidefiniteness is certified on demand.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PsdFactorization {
    order: usize,
    a: Vec<QMatrix>,
    b: Vec<QMatrix>,
}

impl PsdFactorization {
    pub fn new(order: usize, a: Vec<QMatrix>, b: Vec<QMatrix>) -> Result<Self> {
        for (i, m) in a.iter().chain(&b).enumerate() {
            if m.rows() != order || m.cols() != order {
                return Err(mismatch(
                    format!("{order}x{order} factor"),
                    format!("{}x{} at factor {}", m.rows(), m.cols(), i + 1),
                ));
            }
            if !m.is_symmetric() {
                return Err(Error::Precondition(format!("factor {} is not symmetric", i + 1)));
            }
        }
        Ok(Self { order, a, b })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn row_factors(&self) -> &[QMatrix] {
        &self.a
    }

    pub fn col_factors(&self) -> &[QMatrix] {
        &self.b
    }

    /// The matrix this factorization represents, `tr(A_k B_l)`.
    pub fn product_matrix(&self) -> QMatrix {
        QMatrix::from_fn(self.a.len(), self.b.len(), |k, l| {
            self.a[k].trace_product(&self.b[l]).expect("square factors of one order")
        })
    }

    /// Exact psd certificate for every factor, row factors first.
    pub fn certify_psd(&self) -> Result<()> {
        for (i, m) in self.a.iter().enumerate() {
            if !is_psd(m) {
                return Err(Error::NotPsd(format!("A{}", i + 1)));
            }
        }
        for (i, m) in self.b.iter().enumerate() {
            if !is_psd(m) {
                return Err(Error::NotPsd(format!("B{}", i + 1)));
            }
        }
        Ok(())
    }
}

/// Exact positive semidefiniteness test for a symmetric rational matrix.
///
/// Symmetric Gaussian elimination with diagonal pivots only (an LDL^T
/// factorization): a negative diagonal entry refutes psd-ness, a zero
/// diagonal entry requires its whole row to vanish, and a positive pivot is
/// eliminated through its Schur complement.
pub fn is_psd(m: &QMatrix) -> bool {
    if !m.is_symmetric() {
        return false;
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        if active.iter().any(|&i| a.get(i, i) < &Rational::zero()) {
            return false;
        }
        let Some(pos) = active.iter().position(|&i| !a.get(i, i).is_zero()) else {
            // all remaining diagonal entries vanish, so the block must be zero
            return active.iter().all(|&i| active.iter().all(|&j| a.get(i, j).is_zero()));
        };
        for &i in &active {
            if a.get(i, i).is_zero() && active.iter().any(|&j| !a.get(i, j).is_zero()) {
                return false;
            }
        }
        let p = active.remove(pos);
        let pivot = a.get(p, p).clone();
        for &i in &active {
            let f = a.get(i, p).over(&pivot);
            if f.is_zero() {
                continue;
            }
            for &j in &active {
                let v = a.get(i, j).minus(&f.times(a.get(p, j)));
                a.set(i, j, v);
            }
        }
    }
    true
}

/// Outcome of checking a factorization against a target matrix.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PsdReport {
    /// `(label, psd)` for every factor, row factors first.
    pub factors_psd: Vec<(String, bool)>,
    /// 0-based `(row, col)` entries where `tr(A_k B_l) != S(k, l)`.
    pub mismatches: Vec<(usize, usize)>,
    pub pass: bool,
}

pub fn verify_psd_factorization(f: &PsdFactorization, s: &QMatrix) -> Result<PsdReport> {
    if f.a.len() != s.rows() || f.b.len() != s.cols() {
        return Err(mismatch(
            format!("{}x{} target", f.a.len(), f.b.len()),
            format!("{}x{}", s.rows(), s.cols()),
        ));
    }
    let factors_psd: Vec<(String, bool)> = f
        .a
        .iter()
        .enumerate()
        .map(|(i, m)| (format!("A{}", i + 1), is_psd(m)))
        .chain(f.b.iter().enumerate().map(|(i, m)| (format!("B{}", i + 1), is_psd(m))))
        .collect();
    let product = f.product_matrix();
    let mut mismatches = Vec::new();
    for k in 0..s.rows() {
        for l in 0..s.cols() {
            if product.get(k, l) != s.get(k, l) {
                mismatches.push((k, l));
            }
        }
    }
    let pass = mismatches.is_empty() && factors_psd.iter().all(|(_, ok)| *ok);
    Ok(PsdReport {
        factors_psd,
        mismatches,
        pass,
    })
}

/// A realized matrix and the number of sampling rounds it took.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Realization {
    pub matrix: QMatrix,
    pub tries: usize,
}

/// Half-width of the integer sampling range for `realize_support`.
pub fn sample_bound(rows: usize, cols: usize) -> i64 {
    17.max(rows * cols) as i64
}

/// Turns a psd factorization of order `q` into a matrix `T` of rank at most
/// `q` with the same support as `S_F(k, l) = tr(A_k B_l)`.
///
/// Sets `T(k, l) = <A_k x_k, B_l y_l>` for random integer vectors. Entries
/// with `A_k B_l = 0` vanish identically; every other entry is a nonzero
/// polynomial in the samples and is nonzero away from a proper variety, so
/// a fresh draw is taken until the support matches.
pub fn realize_support(f: &PsdFactorization, seed: u64, max_tries: usize) -> Result<Realization> {
    f.certify_psd()?;
    let target = support(&f.product_matrix());
    let (m, n, q) = (f.a.len(), f.b.len(), f.order);
    let bound = sample_bound(m, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<Rational> {
        (0..q).map(|_| Rational::from_integer(rng.random_range(-bound..=bound).into())).collect()
    };
    for attempt in 1..=max_tries {
        let xs: Vec<Vec<Rational>> = f.a.iter().map(|a| apply(a, &draw(&mut rng))).collect();
        let ys: Vec<Vec<Rational>> = f.b.iter().map(|b| apply(b, &draw(&mut rng))).collect();
        let t = QMatrix::from_fn(m, n, |k, l| dot(&xs[k], &ys[l]));
        if support(&t) == target {
            return Ok(Realization { matrix: t, tries: attempt });
        }
    }
    Err(Error::TriesExhausted(max_tries))
}

fn apply(m: &QMatrix, v: &[Rational]) -> Vec<Rational> {
    (0..m.rows()).map(|i| dot(m.row(i), v)).collect()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc.plus(&x.times(y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, int};

    fn q(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn psd_test_examples() {
        assert!(is_psd(&QMatrix::identity(3)));
        assert!(is_psd(&QMatrix::zeros(2, 2)));
        assert!(is_psd(&q(&[&[1, 1], &[1, 1]])));
        assert!(is_psd(&q(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]])));
        assert!(!is_psd(&q(&[&[1, 2], &[2, 1]])));
        assert!(!is_psd(&q(&[&[0, 1], &[1, 0]])));
        assert!(!is_psd(&q(&[&[-1]])));
        assert!(!is_psd(&q(&[&[1, 0], &[1, 1]])));
        // singular psd with a zero pivot appearing after elimination
        assert!(is_psd(&q(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 0]])));
        assert!(!is_psd(&q(&[&[1, 1, 1], &[1, 1, 0], &[1, 0, 1]])));
    }

    fn diag(v: &[i64]) -> QMatrix {
        QMatrix::from_fn(v.len(), v.len(), |i, j| if i == j { int(v[i]) } else { int(0) })
    }

    #[test]
    fn verify_examples() {
        let f = PsdFactorization::new(2, vec![diag(&[1, 0]), diag(&[0, 1])], vec![diag(&[1, 0]), diag(&[0, 1])]).unwrap();
        let r = verify_psd_factorization(&f, &QMatrix::identity(2)).unwrap();
        assert!(r.pass);
        let bad = PsdFactorization::new(2, vec![diag(&[-1, 0]), diag(&[0, 1])], vec![diag(&[1, 0]), diag(&[0, 1])]).unwrap();
        let r = verify_psd_factorization(&bad, &QMatrix::identity(2)).unwrap();
        assert!(!r.pass);
        assert_eq!(r.factors_psd[0], ("A1".to_string(), false));
        assert!(verify_psd_factorization(&f, &QMatrix::identity(3)).is_err());

        // order-1 factorization of a positive column
        let col = [3, 1, 4];
        let f = PsdFactorization::new(1, col.iter().map(|&c| q(&[&[c]])).collect(), vec![q(&[&[1]])]).unwrap();
        let s = QMatrix::from_fn(3, 1, |k, _| int(col[k]));
        assert!(verify_psd_factorization(&f, &s).unwrap().pass);
    }

    #[test]
    fn construction_rejects_asymmetric() {
        assert!(PsdFactorization::new(2, vec![q(&[&[1, 1], &[0, 1]])], vec![]).is_err());
        assert!(PsdFactorization::new(2, vec![QMatrix::identity(3)], vec![]).is_err());
    }

    #[test]
    fn realize_identity_pattern() {
        let f = PsdFactorization::new(2, vec![diag(&[1, 0]), diag(&[0, 1])], vec![diag(&[1, 0]), diag(&[0, 1])]).unwrap();
        let r = realize_support(&f, 7, 5).unwrap();
        assert_eq!(support(&r.matrix), support(&QMatrix::identity(2)));
        assert!(r.matrix.rank() <= 2);
        let again = realize_support(&f, 7, 5).unwrap();
        assert_eq!(r, again);

        let one = PsdFactorization::new(1, vec![q(&[&[1]])], vec![q(&[&[1]])]).unwrap();
        let r = realize_support(&one, 1, 5).unwrap();
        assert!(!r.matrix.get(0, 0).is_zero());
    }

    #[test]
    fn realize_rejects_non_psd() {
        let f = PsdFactorization::new(1, vec![QMatrix::from_rows(vec![vec![frac(-1, 2)]]).unwrap()], vec![q(&[&[1]])]).unwrap();
        assert!(matches!(realize_support(&f, 0, 5), Err(Error::NotPsd(_))));
    }
}
