//! Exhaustive reference solver for small designs.
//!
//! Every subset of penalized columns is tried as the active set: the
//! equality-constrained least-squares problem on that subset is solved in
//! closed form from an SVD of the active block, candidates with a negative
//! coefficient are discarded, and the cheapest feasible one wins. Exponential
//! in the column count, so only meant for checking [`fit_window`](super::fit_window).

use nalgebra::{DMatrix, DVector};

use crate::geometry::Vec2;
use crate::{Error, Result};

use super::design::DesignMatrix;
use super::solver::FitResult;

pub const ORACLE_MAX_COLUMNS: usize = 6;

pub fn oracle_fit(design: &DesignMatrix, lambda: f64) -> Result<FitResult> {
    let m = design.penalized_columns();
    if m > ORACLE_MAX_COLUMNS {
        return Err(Error::Capability(format!(
            "exhaustive fit supports at most {ORACLE_MAX_COLUMNS} penalized columns, got {m}"
        )));
    }
    if !design.is_finite() {
        return Err(Error::input("design contains non-finite values"));
    }
    let rows = design.rows();
    let y = DVector::from_column_slice(design.target());

    let mut best: Option<(f64, Vec<f64>, Vec2)> = None;
    for mask in 0u32..(1 << m) {
        let active: Vec<usize> = (0..m).filter(|c| mask & (1 << c) != 0).collect();
        let k = active.len();
        // Active penalized columns, then the x and y offset indicators.
        let x = DMatrix::from_fn(rows, k + 2, |r, c| {
            if c < k {
                design.column(active[c])[r]
            } else if c - k == r % 2 {
                1.0
            } else {
                0.0
            }
        });
        // Stationarity: X^T X beta = X^T y - lambda e, with e marking the
        // penalized entries. With X = U S V^T that is
        // beta = V S^-1 U^T y - lambda V S^-2 V^T e, which avoids squaring
        // the condition number. Directions below the rank cutoff are dropped.
        let svd = x.svd(true, true);
        let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
            continue;
        };
        let sigma = svd.singular_values;
        let cutoff = rows.max(k + 2) as f64 * f64::EPSILON * sigma.max();
        let uty = u.transpose() * &y;
        let mut e = DVector::zeros(k + 2);
        for c in 0..k {
            e[c] = 1.0;
        }
        let vte = &v_t * e;
        let mut coord = DVector::zeros(sigma.len());
        for r in 0..sigma.len() {
            if sigma[r] > cutoff {
                coord[r] = uty[r] / sigma[r] - lambda * vte[r] / (sigma[r] * sigma[r]);
            }
        }
        let beta = v_t.transpose() * coord;
        if beta.iter().take(k).any(|&v| v < 0.0) {
            continue;
        }
        let mut coefs = vec![0.0; m];
        for (c, &col) in active.iter().enumerate() {
            coefs[col] = beta[c];
        }
        let offset = Vec2::new(beta[k], beta[k + 1]);
        let objective = design.objective(&coefs, offset, lambda);
        if best.as_ref().is_none_or(|(o, _, _)| objective < *o) {
            best = Some((objective, coefs, offset));
        }
    }
    let (objective, coefs, offset) =
        best.ok_or_else(|| Error::input("no feasible active set found"))?;
    Ok(FitResult::from_coefficients(coefs, offset, objective, 1 << m, true))
}
