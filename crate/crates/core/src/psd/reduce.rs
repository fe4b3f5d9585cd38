use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

/// Floating-point symmetric psd matrix, stored through a factor `G` with
/// `X = G G^T`, so symmetry and positive semidefiniteness hold by
/// construction up to rounding.
#[derive(Clone, Debug)]
pub struct FloatPsdMatrix {
    factor: DMatrix<f64>,
}

impl FloatPsdMatrix {
    /// Factors a symmetric matrix, dropping eigenvalues at or below
    /// `eig_tol * max(1, λ_max)`. Fails if some eigenvalue is below `-eig_tol`
    /// on the same scale.
    pub fn from_symmetric(x: &DMatrix<f64>, eig_tol: f64) -> Result<Self> {
        if !x.is_square() {
            return Err(Error::NotSquare {
                rows: x.nrows(),
                cols: x.ncols(),
            });
        }
        let sym = (x + x.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -eig_tol * scale {
            return Err(Error::NotPsd(format!("minimum eigenvalue {min:e}")));
        }
        Ok(Self {
            factor: factor_from_eigen(&eig, eig_tol * scale),
        })
    }

    pub fn from_factor(factor: DMatrix<f64>) -> Self {
        Self { factor }
    }

    pub fn order(&self) -> usize {
        self.factor.nrows()
    }

    /// Number of retained eigen-directions.
    pub fn rank(&self) -> usize {
        self.factor.ncols()
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        &self.factor * self.factor.transpose()
    }

    /// Eigenvalue count above `eig_tol * max(1, λ_max)` of the assembled matrix.
    pub fn numerical_rank(&self, eig_tol: f64) -> usize {
        let eig = SymmetricEigen::new(self.matrix());
        let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        eig.eigenvalues.iter().filter(|&&v| v > eig_tol * scale).count()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        if self.order() == 0 {
            return 0.0;
        }
        SymmetricEigen::new(self.matrix())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

fn factor_from_eigen(eig: &SymmetricEigen<f64, nalgebra::Dyn>, cut: f64) -> DMatrix<f64> {
    let n = eig.eigenvalues.len();
    let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > cut).collect();
    DMatrix::from_fn(n, keep.len(), |i, j| {
        eig.eigenvectors[(i, keep[j])] * eig.eigenvalues[keep[j]].sqrt()
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReduceOptions {
    /// Relative eigenvalue threshold for numerical rank.
    pub eig_tol: f64,
    /// Absolute bound on every constraint residual `|<A_j, X> - α_j|`.
    pub residual_tol: f64,
    pub max_iterations: usize,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self {
            eig_tol: 1e-9,
            residual_tol: 1e-6,
            max_iterations: 1000,
        }
    }
}

/// Largest `r` with `r(r+1)/2 ≤ m`, i.e. `floor((sqrt(8m+1) - 1) / 2)`.
pub fn rank_bound(m: usize) -> usize {
    let mut r = 0;
    while (r + 1) * (r + 2) / 2 <= m {
        r += 1;
    }
    r
}

#[derive(Clone, Debug, Serialize)]
pub struct Reduction {
    #[serde(skip)]
    pub matrix: FloatPsdMatrix,
    /// Rank before the first step and after every step.
    pub ranks: Vec<usize>,
    /// Largest constraint residual before the first step and after every step.
    pub residuals: Vec<f64>,
    pub min_eigenvalue: f64,
}

impl Reduction {
    pub fn final_rank(&self) -> usize {
        *self.ranks.last().expect("at least the initial rank")
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

fn frob(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(b).sum()
}

fn max_residual(x: &DMatrix<f64>, constraints: &[(DMatrix<f64>, f64)]) -> f64 {
    constraints
        .iter()
        .map(|(a, alpha)| (frob(a, x) - alpha).abs())
        .fold(0.0, f64::max)
}

/// Moves a psd solution of `m` linear equations `<A_j, X> = α_j` to a psd
/// solution of rank `r` with `r(r+1)/2 ≤ m`.
///
/// With `X = G G^T` and `G` of full column rank `r`, any symmetric `Δ` with
/// `<G^T A_j G, Δ> = 0` for all `j` keeps `G (I + tΔ) G^T` feasible. When
/// `r(r+1)/2 > m` such a `Δ` exists; `t` is chosen so `I + tΔ` is singular
/// and psd, which drops the rank by at least one.
pub fn barvinok_reduce(
    x: &FloatPsdMatrix,
    constraints: &[(DMatrix<f64>, f64)],
    opts: ReduceOptions,
) -> Result<Reduction> {
    let q = x.order();
    for (a, _) in constraints {
        if a.nrows() != q || a.ncols() != q {
            return Err(Error::DimensionMismatch {
                expected: format!("{q}x{q} constraint"),
                found: format!("{}x{}", a.nrows(), a.ncols()),
            });
        }
    }
    let m = constraints.len();
    let mut g = x.factor().clone();
    let initial = max_residual(&x.matrix(), constraints);
    if initial > opts.residual_tol {
        return Err(Error::Precondition(format!(
            "start point violates constraints (residual {initial:e})"
        )));
    }
    let mut ranks = vec![g.ncols()];
    let mut residuals = vec![initial];

    let mut iterations = 0;
    while g.ncols() * (g.ncols() + 1) / 2 > m {
        iterations += 1;
        if iterations > opts.max_iterations {
            return Err(Error::Numerical("iteration limit reached".into()));
        }
        let r = g.ncols();
        let delta = null_direction(&g, constraints, r)?;
        let eig = SymmetricEigen::new(delta.clone());
        let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // walk towards the side with a negative eigenvalue
        let (dir, lmin) = if lo < -1e-9 * hi.abs().max(lo.abs()) { (delta, lo) } else { (-delta, -hi) };
        let t = -1.0 / lmin;
        let step = DMatrix::<f64>::identity(r, r) + dir * t;
        let step_eig = SymmetricEigen::new((&step + step.transpose()) * 0.5);
        let scale = step_eig.eigenvalues.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let w = factor_from_eigen(&step_eig, 1e-9 * scale);
        let next = &g * w;
        if next.ncols() >= r {
            return Err(Error::Numerical(format!("boundary step did not reduce rank {r}")));
        }
        g = next;
        let res = max_residual(&(&g * g.transpose()), constraints);
        ranks.push(g.ncols());
        residuals.push(res);
        if res > opts.residual_tol {
            return Err(Error::Numerical(format!("residual {res:e} after reduction to rank {}", g.ncols())));
        }
    }
    let matrix = FloatPsdMatrix::from_factor(g);
    Ok(Reduction {
        min_eigenvalue: matrix.min_eigenvalue(),
        matrix,
        ranks,
        residuals,
    })
}

/// Nonzero symmetric `Δ` (unit Frobenius norm in the packed coordinates) in
/// the null space of `Δ ↦ (<G^T A_j G, Δ>)_j`.
fn null_direction(g: &DMatrix<f64>, constraints: &[(DMatrix<f64>, f64)], r: usize) -> Result<DMatrix<f64>> {
    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|a| (a..r).map(move |b| (a, b))).collect();
    let d = pairs.len();
    // pad to square so the SVD returns a full right basis
    let mut sys = DMatrix::<f64>::zeros(d.max(constraints.len()), d);
    for (j, (a, _)) in constraints.iter().enumerate() {
        let c = g.transpose() * a * g;
        for (col, &(p, s)) in pairs.iter().enumerate() {
            sys[(j, col)] = if p == s { c[(p, p)] } else { c[(p, s)] + c[(s, p)] };
        }
    }
    let svd = sys.clone().svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let (idx, smallest) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty system");
    let largest = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    if smallest > 1e-8 * largest.max(1.0) {
        return Err(Error::Numerical(format!(
            "constraint system has no null direction (smallest singular value {smallest:e}, {} unknowns, {} equations)",
            d,
            constraints.len()
        )));
    }
    let v = v_t.row(idx);
    let mut delta = DMatrix::<f64>::zeros(r, r);
    for (col, &(p, s)) in pairs.iter().enumerate() {
        delta[(p, s)] = v[col];
        delta[(s, p)] = v[col];
    }
    Ok(delta)
}

/// Per-factor outcome of [`reduce_factor_ranks`].
#[derive(Clone, Debug, Serialize)]
pub struct FactorReduction {
    pub row_ranks_before: Vec<usize>,
    pub row_ranks: Vec<usize>,
    pub col_ranks_before: Vec<usize>,
    pub col_ranks: Vec<usize>,
    /// Largest `|tr(A_k B_l) - S(k, l)|` after both passes.
    pub max_residual: f64,
    pub min_eigenvalue: f64,
    #[serde(skip)]
    pub row_factors: Vec<FloatPsdMatrix>,
    #[serde(skip)]
    pub col_factors: Vec<FloatPsdMatrix>,
}

/// Lowers the rank of every factor of a floating-point psd factorization of
/// `s`: each `A_k` is reduced against the `n` equations `tr(A_k B_l) = S(k, l)`
/// with the `B_l` fixed, then each `B_l` against the `m` equations with the
/// new `A_k` fixed. Final ranks satisfy `r(r+1)/2 ≤ n` for row factors and
/// `r(r+1)/2 ≤ m` for column factors.
pub fn reduce_factor_ranks(
    a: &[DMatrix<f64>],
    b: &[DMatrix<f64>],
    s: &DMatrix<f64>,
    opts: ReduceOptions,
) -> Result<FactorReduction> {
    if s.nrows() != a.len() || s.ncols() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{} target", a.len(), b.len()),
            found: format!("{}x{}", s.nrows(), s.ncols()),
        });
    }
    let mut row_factors = a
        .iter()
        .map(|x| FloatPsdMatrix::from_symmetric(x, opts.eig_tol))
        .collect::<Result<Vec<_>>>()?;
    let mut col_factors = b
        .iter()
        .map(|x| FloatPsdMatrix::from_symmetric(x, opts.eig_tol))
        .collect::<Result<Vec<_>>>()?;
    let row_ranks_before = row_factors.iter().map(FloatPsdMatrix::rank).collect();
    let col_ranks_before = col_factors.iter().map(FloatPsdMatrix::rank).collect();

    let col_mats: Vec<DMatrix<f64>> = col_factors.iter().map(FloatPsdMatrix::matrix).collect();
    for (k, f) in row_factors.iter_mut().enumerate() {
        let cons: Vec<(DMatrix<f64>, f64)> = col_mats.iter().enumerate().map(|(l, bm)| (bm.clone(), s[(k, l)])).collect();
        *f = barvinok_reduce(f, &cons, opts)?.matrix;
    }
    let row_mats: Vec<DMatrix<f64>> = row_factors.iter().map(FloatPsdMatrix::matrix).collect();
    for (l, f) in col_factors.iter_mut().enumerate() {
        let cons: Vec<(DMatrix<f64>, f64)> = row_mats.iter().enumerate().map(|(k, am)| (am.clone(), s[(k, l)])).collect();
        *f = barvinok_reduce(f, &cons, opts)?.matrix;
    }

    let col_mats: Vec<DMatrix<f64>> = col_factors.iter().map(FloatPsdMatrix::matrix).collect();
    let mut worst = 0.0f64;
    for (k, am) in row_factors.iter().map(FloatPsdMatrix::matrix).enumerate() {
        for (l, bm) in col_mats.iter().enumerate() {
            worst = worst.max((frob(&am, bm) - s[(k, l)]).abs());
        }
    }
    let min_eigenvalue = row_factors
        .iter()
        .chain(&col_factors)
        .map(FloatPsdMatrix::min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    Ok(FactorReduction {
        row_ranks_before,
        row_ranks: row_factors.iter().map(FloatPsdMatrix::rank).collect(),
        col_ranks_before,
        col_ranks: col_factors.iter().map(FloatPsdMatrix::rank).collect(),
        max_residual: worst,
        min_eigenvalue,
        row_factors,
        col_factors,
    })
}
