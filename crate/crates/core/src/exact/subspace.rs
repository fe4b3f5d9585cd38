use super::{Field, QMatrix, Rational};
use crate::error::{mismatch, Result};

/// Linear subspace of `Q^q`, stored as the reduced row echelon form of a
/// basis. The representation is canonical: equal subspaces have identical
/// bases, so `==` is subspace equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: QMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: QMatrix::zeros(0, ambient_dim),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::from_spanning(&QMatrix::identity(ambient_dim))
    }

    /// Span of the rows of `m`.
    pub fn from_spanning(m: &QMatrix) -> Self {
        let (r, pivots) = m.rref();
        let keep: Vec<usize> = (0..pivots.len()).collect();
        let all: Vec<usize> = (0..m.cols()).collect();
        Self {
            ambient_dim: m.cols(),
            basis: r.submatrix(&keep, &all),
            pivots,
        }
    }

    pub fn from_vectors(ambient_dim: usize, vectors: &[Vec<Rational>]) -> Result<Self> {
        if vectors.is_empty() {
            return Ok(Self::zero(ambient_dim));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(mismatch(ambient_dim, v.len()));
        }
        Ok(Self::from_spanning(&QMatrix::from_rows(vectors.to_vec())?))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Basis rows in reduced row echelon form.
    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    /// Whether `v` lies in the subspace: reduce against the pivots and test
    /// for zero.
    pub fn contains_vector(&self, v: &[Rational]) -> Result<bool> {
        if v.len() != self.ambient_dim {
            return Err(mismatch(self.ambient_dim, v.len()));
        }
        let mut w = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            let f = w[p].clone();
            if f.is_zero() {
                continue;
            }
            for (j, b) in self.basis.row(i).iter().enumerate() {
                if !b.is_zero() {
                    w[j] = w[j].minus(&f.times(b));
                }
            }
        }
        Ok(w.iter().all(Field::is_zero))
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        for i in 0..other.dim() {
            if !self.contains_vector(other.basis.row(i))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut rows = self.basis.row_vecs();
        rows.extend(other.basis.row_vecs());
        Self::from_vectors(self.ambient_dim, &rows)
    }

    /// Orthogonal projection onto the subspace for the standard inner
    /// product: `P = B^T (B B^T)^{-1} B` with `B` the basis rows.
    pub fn projection_matrix(&self) -> QMatrix {
        if self.dim() == 0 {
            return QMatrix::zeros(self.ambient_dim, self.ambient_dim);
        }
        let b = &self.basis;
        let bt = b.transpose();
        let gram = b.mul(&bt).expect("shapes agree");
        let gram_inv = gram
            .inverse()
            .expect("gram matrix is square")
            .expect("basis rows are independent");
        bt.mul(&gram_inv)
            .and_then(|x| x.mul(b))
            .expect("shapes agree")
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(mismatch(
                format!("ambient dimension {}", self.ambient_dim),
                other.ambient_dim,
            ));
        }
        Ok(())
    }
}

impl QMatrix {
    /// Null space `{x : M x = 0}`.
    pub fn kernel(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let n = self.cols();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let vectors: Vec<Vec<Rational>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); n];
                v[f] = Rational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = r.get(i, f).negated();
                }
                v
            })
            .collect();
        Subspace::from_vectors(n, &vectors).expect("lengths agree")
    }

    /// Column space.
    pub fn image(&self) -> Subspace {
        Subspace::from_spanning(&self.transpose())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, int, ExactMatrix};
    use proptest::prelude::*;

    fn span(q: usize, vs: &[&[i64]]) -> Subspace {
        let rows: Vec<Vec<Rational>> = vs.iter().map(|v| v.iter().map(|&x| int(x)).collect()).collect();
        Subspace::from_vectors(q, &rows).unwrap()
    }

    #[test]
    fn kernel_and_image_examples() {
        assert_eq!(QMatrix::identity(3).kernel().dim(), 0);
        assert_eq!(QMatrix::zeros(3, 3).image(), Subspace::zero(3));
        let m = ExactMatrix::from_rows(vec![vec![int(1), int(1)]]).unwrap();
        assert_eq!(m.kernel(), span(2, &[&[1, -1]]));
        assert_eq!(QMatrix::zeros(2, 2).kernel(), Subspace::full(2));
    }

    #[test]
    fn containment_and_sum() {
        let e1 = span(2, &[&[1, 0]]);
        let e2 = span(2, &[&[0, 1]]);
        assert!(Subspace::full(2).contains(&e1).unwrap());
        assert!(!e1.contains(&e2).unwrap());
        assert_eq!(e1.sum(&e2).unwrap(), Subspace::full(2));
        assert!(e1.contains(&Subspace::zero(2)).unwrap());
        assert!(e1.contains(&Subspace::zero(3)).is_err());
        // canonical form does not depend on the spanning set
        assert_eq!(span(3, &[&[1, 2, 3], &[2, 4, 7]]), span(3, &[&[0, 0, 1], &[3, 6, 0]]));
    }

    #[test]
    fn projection_examples() {
        let p = span(2, &[&[1, 0]]).projection_matrix();
        assert_eq!(p, ExactMatrix::from_rows(vec![vec![int(1), int(0)], vec![int(0), int(0)]]).unwrap());
        assert_eq!(Subspace::zero(2).projection_matrix(), QMatrix::zeros(2, 2));
        let h = frac(1, 2);
        let p = span(2, &[&[1, 1]]).projection_matrix();
        assert_eq!(p, ExactMatrix::from_rows(vec![vec![h.clone(), h.clone()], vec![h.clone(), h]]).unwrap());
    }

    fn subspace_strategy() -> impl Strategy<Value = Subspace> {
        (0usize..=4).prop_flat_map(|k| {
            prop::collection::vec(prop::collection::vec(-2i64..=2, 4), k).prop_map(|vs| {
                let rows: Vec<Vec<Rational>> = vs.iter().map(|v| v.iter().map(|&x| int(x)).collect()).collect();
                Subspace::from_vectors(4, &rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn mutual_containment_is_equality(a in subspace_strategy(), b in subspace_strategy()) {
            let both = a.contains(&b).unwrap() && b.contains(&a).unwrap();
            prop_assert_eq!(both, a == b);
            let s = a.sum(&b).unwrap();
            prop_assert!(s.contains(&a).unwrap() && s.contains(&b).unwrap());
        }

        #[test]
        fn projection_is_orthogonal_idempotent(u in subspace_strategy()) {
            let p = u.projection_matrix();
            prop_assert_eq!(p.transpose(), p.clone());
            prop_assert_eq!(p.mul(&p).unwrap(), p.clone());
            prop_assert_eq!(p.image(), u);
        }

        #[test]
        fn rank_nullity(m in prop::collection::vec(-2i64..=2, 12)) {
            let m = ExactMatrix::from_vec(3, 4, m.into_iter().map(int).collect()).unwrap();
            prop_assert_eq!(m.kernel().dim() + m.rank(), 4);
            prop_assert_eq!(m.image().dim(), m.rank());
        }
    }
}
