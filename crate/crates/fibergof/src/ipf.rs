//! Maximum-likelihood fitting by iterative proportional scaling.
//!
//! For a log-linear model with design matrix `A`, the MLE of the cell means
//! is the unique vector `m` in the model's closure with `Am = Au`. The
//! fitter cycles through the rows of `A`, rescaling the supported cells by a
//! damped power of the margin ratio; with damping exponent `A_rc / s`, where
//! `s` is the largest column sum of `A`, the iteration is the generalized
//! scaling scheme that converges for overlapping (non-partition) rows such
//! as degree and reciprocity constraints.

use serde::Serialize;

use crate::design::DesignMatrix;
use crate::error::{Error, Result};
use crate::table::{DyadTable, Mode, TableShape};

/// Outcome of an iterative scaling fit.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    /// Fitted cell means, in table cell order.
    pub fitted: Vec<f64>,
    /// Observed sufficient statistics (the margins being matched).
    pub targets: Vec<i64>,
    /// Full cycles performed.
    pub iterations: u64,
    /// Whether the margin gap reached the tolerance.
    pub converged: bool,
    /// Final `max_r |(A m)_r - (A u)_r|`.
    pub max_gap: f64,
}

/// Fits cell means to the margins of `t` under `a`.
///
/// Cells supporting a zero margin are pinned to zero up front (the MLE puts
/// no mass there), then multiplicative updates cycle the remaining rows until
/// every margin matches within `tol` or `max_iter` cycles pass. Failure to
/// converge is reported through the `converged` flag, not an error, so
/// callers can decide how much to trust the fit.
pub fn ipf_fit(a: &DesignMatrix, t: &DyadTable, tol: f64, max_iter: u64) -> Result<FitResult> {
    if t.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: t.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let targets = a.mul_cells(t.cells())?;
    let rows = a.rows();
    let cols = a.cols();

    // Start from the dyad-block totals spread evenly over states, or from a
    // flat table of ones; both are strictly positive and inside the model.
    let mut m: Vec<f64> = match t.shape() {
        TableShape::Dyadic { .. } => {
            let s = t.shape().states_per_dyad().expect("dyadic");
            let mut m = vec![0.0; cols];
            for (d, block) in t.cells().chunks_exact(s).enumerate() {
                let total: i64 = block.iter().sum();
                for k in 0..s {
                    m[d * s + k] = total as f64 / s as f64;
                }
            }
            m
        }
        TableShape::Flat { .. } => vec![1.0; cols],
    };

    for r in 0..rows {
        if targets[r] == 0 {
            for c in 0..cols {
                if a.get(r, c) != 0 {
                    m[c] = 0.0;
                }
            }
        }
    }

    let max_col_sum: i64 = (0..cols)
        .map(|c| (0..rows).map(|r| a.get(r, c)).sum())
        .max()
        .expect("design has columns");
    let damp = 1.0 / max_col_sum as f64;

    let margin_gap = |m: &[f64]| -> f64 {
        (0..rows)
            .map(|r| {
                let got: f64 = a.row(r).iter().zip(m).map(|(&e, &v)| e as f64 * v).sum();
                (got - targets[r] as f64).abs()
            })
            .fold(0.0, f64::max)
    };

    let mut iterations = 0;
    let mut max_gap = margin_gap(&m);
    while max_gap > tol && iterations < max_iter {
        for r in 0..rows {
            if targets[r] == 0 {
                continue;
            }
            let row = a.row(r);
            let current: f64 = row.iter().zip(&m).map(|(&e, &v)| e as f64 * v).sum();
            if current <= 0.0 {
                // No mass left on this margin's support; the gap check below
                // reports the failure.
                continue;
            }
            let base = (targets[r] as f64 / current).powf(damp);
            for (c, &e) in row.iter().enumerate() {
                if e != 0 {
                    m[c] *= base.powi(e as i32);
                }
            }
        }
        iterations += 1;
        max_gap = margin_gap(&m);
    }

    Ok(FitResult {
        fitted: m,
        targets,
        iterations,
        converged: max_gap <= tol,
        max_gap,
    })
}

/// Quick necessary condition for the MLE to exist in the model's interior:
/// no margin may sit on the boundary of its achievable range. In simple mode
/// each row's range over valid tables is bracketed by taking every dyad's
/// least and most contributing state; rows whose range is a single point
/// (dyad normalizers) are structural and never flagged. For count data only
/// the zero boundary is finite. Passing this test does not prove existence —
/// hence "heuristic" — but failing it proves nonexistence.
pub fn mle_existence_heuristic(a: &DesignMatrix, t: &DyadTable) -> Result<bool> {
    let targets = a.mul_cells(t.cells())?;
    if t.mode() == Mode::Simple {
        let s = t.shape().states_per_dyad().expect("simple tables are dyadic");
        for r in 0..a.rows() {
            let row = a.row(r);
            let min_possible: i64 = row
                .chunks_exact(s)
                .map(|b| b.iter().copied().min().unwrap())
                .sum();
            let max_possible: i64 = row
                .chunks_exact(s)
                .map(|b| b.iter().copied().max().unwrap())
                .sum();
            if min_possible < max_possible
                && (targets[r] == min_possible || targets[r] == max_possible)
            {
                return Ok(false);
            }
        }
        Ok(true)
    } else {
        Ok(targets.iter().all(|&v| v != 0))
    }
}
