//! Subspace embeddings of support patterns and the conversions between
//! rank factorizations, embeddings and psd factorizations.
//!
//! An embedding of an `m x n` pattern into `Q^q` is a family of subspaces
//! `U_1..U_m`, `V_1..V_n` with `U_k ⊆ V_l` exactly where the pattern is zero.

use serde::Serialize;

use crate::error::{mismatch, Result};
use crate::exact::{Field, QMatrix, Subspace};
use crate::pattern::{support, triangular_rank, SupportPattern};
use crate::psd::PsdFactorization;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubspaceEmbedding {
    ambient_dim: usize,
    u: Vec<Subspace>,
    v: Vec<Subspace>,
}

impl SubspaceEmbedding {
    pub fn new(ambient_dim: usize, u: Vec<Subspace>, v: Vec<Subspace>) -> Result<Self> {
        if let Some(s) = u.iter().chain(&v).find(|s| s.ambient_dim() != ambient_dim) {
            return Err(mismatch(format!("ambient dimension {ambient_dim}"), s.ambient_dim()));
        }
        Ok(Self { ambient_dim, u, v })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn row_spaces(&self) -> &[Subspace] {
        &self.u
    }

    pub fn col_spaces(&self) -> &[Subspace] {
        &self.v
    }

    /// The pattern this embedding realises: set where `U_k ⊄ V_l`.
    pub fn pattern(&self) -> SupportPattern {
        SupportPattern::from_fn(self.u.len(), self.v.len(), |k, l| {
            !self.v[l].contains(&self.u[k]).expect("common ambient dimension")
        })
    }
}

/// Whether `U_k ⊆ V_l` holds exactly at the zeros of `p`.
pub fn verify_embedding(e: &SubspaceEmbedding, p: &SupportPattern) -> Result<bool> {
    if e.u.len() != p.rows() || e.v.len() != p.cols() {
        return Err(mismatch(
            format!("{}x{} pattern", e.u.len(), e.v.len()),
            format!("{}x{}", p.rows(), p.cols()),
        ));
    }
    Ok(e.pattern() == *p)
}

/// Embedding of `supp(S)` of dimension `rank(S)`.
///
/// `U_k` is spanned by row `k` and `V_l` by the rows vanishing in column `l`.
/// Coordinates are taken in the reduced row echelon basis of the row space,
/// where a row's coordinates are its entries at the pivot columns.
pub fn embedding_from_rank_factorization(s: &QMatrix) -> SubspaceEmbedding {
    let (_, pivots) = s.rref();
    let q = pivots.len();
    let coords: Vec<Vec<_>> = (0..s.rows())
        .map(|k| pivots.iter().map(|&c| s.get(k, c).clone()).collect())
        .collect();
    let u = coords
        .iter()
        .map(|c| Subspace::from_vectors(q, std::slice::from_ref(c)).expect("length q"))
        .collect();
    let v = (0..s.cols())
        .map(|l| {
            let rows: Vec<Vec<_>> = (0..s.rows())
                .filter(|&k| s.get(k, l).is_zero())
                .map(|k| coords[k].clone())
                .collect();
            Subspace::from_vectors(q, &rows).expect("length q")
        })
        .collect();
    SubspaceEmbedding { ambient_dim: q, u, v }
}

/// Psd factorization from an embedding: `A_k` projects onto `U_k`,
/// `B_l = I - P(V_l)`. Returns the factorization and `T(k, l) = tr(A_k B_l)`,
/// which vanishes exactly where `U_k ⊆ V_l`.
pub fn psd_from_embedding(e: &SubspaceEmbedding) -> (PsdFactorization, QMatrix) {
    let id = QMatrix::identity(e.ambient_dim);
    let a: Vec<QMatrix> = e.u.iter().map(Subspace::projection_matrix).collect();
    let b: Vec<QMatrix> = e
        .v
        .iter()
        .map(|v| id.sub(&v.projection_matrix()).expect("same order"))
        .collect();
    let f = PsdFactorization::new(e.ambient_dim, a, b).expect("projections are symmetric");
    let t = f.product_matrix();
    (f, t)
}

/// Embedding from a psd factorization: `U_k = img A_k`, `V_l = ker B_l`.
/// For psd factors `tr(A_k B_l) = 0` iff `A_k B_l = 0` iff `U_k ⊆ V_l`.
pub fn embedding_from_psd(f: &PsdFactorization) -> Result<SubspaceEmbedding> {
    f.certify_psd()?;
    let u = f.row_factors().iter().map(QMatrix::image).collect();
    let v = f.col_factors().iter().map(QMatrix::kernel).collect();
    SubspaceEmbedding::new(f.order(), u, v)
}

/// Bounds on the smallest embedding dimension of `supp(S)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct EmbeddingBounds {
    /// Triangular rank of the support.
    pub lower: usize,
    /// Rank of `S`.
    pub upper: usize,
}

pub fn embrkl_bounds(s: &QMatrix) -> EmbeddingBounds {
    let (lower, _) = triangular_rank(&support(s));
    EmbeddingBounds {
        lower,
        upper: s.rank(),
    }
}
