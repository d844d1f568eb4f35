//! Least-squares recovery of the soliton velocity.
//!
//! Each non-degenerate sample contributes the row `<N, v> = 2H`, i.e. the
//! soliton equation divided by `-|EG-F^2|^(3/2)`. Rank deficiency is part of
//! the answer: a cylinder only fixes `v` modulo its ruling direction, so the
//! fit reports the minimum-norm solution together with a nullspace basis.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

use crate::surface::{fundamental_data, Grid, ParametricSurface, SurfaceError, DEFAULT_DEGENERACY_TOL};
use crate::Vec3;

/// Singular values below `RANK_TOL * sigma_max` count as zero.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("only {usable} usable sample rows, need at least 3")]
    TooFewPoints { usable: usize },
    #[error("linear system has rank 0 (nullspace dimension {nullspace_dim})")]
    RankDeficient { nullspace_dim: usize },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// One linear equation `coeff . v = rhs` (Euclidean dot).
pub type Row = (Vec3, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityFit {
    /// Minimum-norm least-squares solution.
    pub v: Vec3,
    /// Root-mean-square defect of the rows at `v`.
    pub rms: f64,
    pub max_defect: f64,
    pub rank: usize,
    /// Orthonormal (Euclidean) basis of directions that leave every row unchanged.
    pub nullspace: Vec<Vec3>,
    pub singular_values: Vec<f64>,
    pub rows: usize,
    pub degenerate: usize,
}

impl VelocityFit {
    pub fn nullspace_dim(&self) -> usize {
        self.nullspace.len()
    }

    /// Euclidean distance from `v` to the affine solution set `fit.v + span(nullspace)`.
    pub fn solution_distance(&self, v: Vec3) -> f64 {
        let mut d = v - self.v;
        for n in &self.nullspace {
            d -= *n * d.euclid_dot(*n);
        }
        d.euclid_norm()
    }
}

/// Least squares over `rows`, restricted to `{v : <c, v> = 0}` for each
/// Minkowski constraint `c`.
pub fn fit_rows(rows: &[Row], constraints: &[Vec3]) -> Result<VelocityFit, FitError> {
    if rows.len() < 3 {
        return Err(FitError::TooFewPoints { usable: rows.len() });
    }
    let basis = complement_basis(constraints);
    let d = basis.len();
    let m = rows.len();
    let a = DMatrix::from_fn(m, d, |i, j| rows[i].0.euclid_dot(basis[j]));
    let b = DVector::from_iterator(m, rows.iter().map(|r| r.1));

    let (y, rank, null_y, sv) = if d == 0 {
        (DVector::zeros(0), 0, Vec::new(), Vec::new())
    } else {
        min_norm_solve(&a, &b)
    };
    if d > 0 && rank == 0 {
        return Err(FitError::RankDeficient { nullspace_dim: d });
    }
    let lift = |c: &DVector<f64>| {
        basis
            .iter()
            .zip(c.iter())
            .fold(Vec3::zero(), |acc, (bv, &k)| acc + *bv * k)
    };
    let v = lift(&y);
    let nullspace = null_y.iter().map(lift).collect();
    let defects: Vec<f64> = rows.iter().map(|(c, r)| c.euclid_dot(v) - r).collect();
    let rms = (defects.iter().map(|x| x * x).sum::<f64>() / m as f64).sqrt();
    let max_defect = defects.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    Ok(VelocityFit {
        v,
        rms,
        max_defect,
        rank,
        nullspace,
        singular_values: sv,
        rows: m,
        degenerate: 0,
    })
}

/// Euclidean orthonormal basis of `{v : <c_i, v> = 0 for all i}`.
fn complement_basis(constraints: &[Vec3]) -> Vec<Vec3> {
    if constraints.is_empty() {
        return vec![Vec3::e1(), Vec3::e2(), Vec3::e3()];
    }
    let k = constraints.len().max(3);
    let c = DMatrix::from_fn(k, 3, |i, j| constraints.get(i).map_or(0.0, |c| c.lower().to_array()[j]));
    let svd = c.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.max();
    (0..3)
        .filter(|&i| svd.singular_values[i] <= RANK_TOL * smax.max(f64::MIN_POSITIVE))
        .map(|i| Vec3::new(vt[(i, 0)], vt[(i, 1)], vt[(i, 2)]))
        .collect()
}

/// Minimum-norm solution, numerical rank, nullspace basis and singular values.
fn min_norm_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, usize, Vec<DVector<f64>>, Vec<f64>) {
    let n = a.ncols();
    // pad so the thin factorization still yields a full right basis
    let a = if a.nrows() < n {
        a.clone().resize_vertically(n, 0.0)
    } else {
        a.clone()
    };
    let b = if b.len() < n {
        b.clone().resize_vertically(n, 0.0)
    } else {
        b.clone()
    };
    let svd = a.svd(true, true);
    let u = svd.u.expect("requested u");
    let vt = svd.v_t.expect("requested v_t");
    let sv = svd.singular_values;
    let smax = sv.max();
    let cut = RANK_TOL * smax;
    let mut y = DVector::zeros(n);
    let mut rank = 0;
    let mut null = Vec::new();
    for i in 0..n {
        let vi = vt.row(i).transpose();
        if sv[i] > cut && smax > 0.0 {
            rank += 1;
            let coef = u.column(i).dot(&b) / sv[i];
            y += vi * coef;
        } else {
            null.push(vi);
        }
    }
    (y, rank, null, sv.iter().copied().collect())
}

/// Rows `<N,v> = 2H` at the non-degenerate interior grid points, plus the
/// number of degenerate points skipped.
pub fn velocity_rows(surface: &ParametricSurface<f64>, grid: Grid) -> Result<(Vec<Row>, usize), FitError> {
    let grid = grid.validate()?;
    let points = surface.domain.interior_grid(grid);
    let rows: Vec<Option<Row>> = points
        .par_iter()
        .map(|&(s, t)| {
            let jet = surface.jet(s, t)?;
            match fundamental_data(&jet, DEFAULT_DEGENERACY_TOL) {
                Ok(fd) => Ok(Some((fd.normal.lower(), 2.0 * fd.mean_curvature))),
                Err(SurfaceError::DegeneratePoint { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_, SurfaceError>>()?;
    let degenerate = rows.iter().filter(|r| r.is_none()).count();
    Ok((rows.into_iter().flatten().collect(), degenerate))
}

pub fn solve_velocity(surface: &ParametricSurface<f64>, grid: Grid) -> Result<VelocityFit, FitError> {
    solve_velocity_constrained(surface, grid, &[])
}

/// As [`solve_velocity`], with `v` confined to `{<c, v> = 0}` for each `c`.
pub fn solve_velocity_constrained(
    surface: &ParametricSurface<f64>,
    grid: Grid,
    constraints: &[Vec3],
) -> Result<VelocityFit, FitError> {
    let (rows, degenerate) = velocity_rows(surface, grid)?;
    let mut fit = fit_rows(&rows, constraints)?;
    fit.degenerate = degenerate;
    Ok(fit)
}
