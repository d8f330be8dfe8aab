//! Non-negative lasso with a free, unpenalized 2-vector offset, solved by
//! cyclic projected coordinate descent on the Gram matrix.

use nalgebra::{DMatrix, DVector};

use crate::geometry::Vec2;
use crate::{Error, Result};

use super::design::DesignMatrix;

/// Solution of one window fit for one individual.
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    /// Neighbor weights in ascending neighbor ID.
    pub neighbor_weights: Vec<f64>,
    pub stim_weight: f64,
    /// Unpenalized autonomous vector `b = w_ii * d_i`.
    pub autonomous: Vec2,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    /// Penalized coefficients in column order (neighbors, then stimulus).
    pub fn coefficients(&self) -> Vec<f64> {
        let mut c = self.neighbor_weights.clone();
        c.push(self.stim_weight);
        c
    }

    pub(crate) fn from_coefficients(
        mut coefs: Vec<f64>,
        autonomous: Vec2,
        objective: f64,
        iterations: usize,
        converged: bool,
    ) -> Self {
        let stim_weight = coefs.pop().unwrap_or(0.0);
        FitResult {
            neighbor_weights: coefs,
            stim_weight,
            autonomous,
            objective,
            iterations,
            converged,
        }
    }
}

/// Sufficient statistics of a design with the offset profiled out.
///
/// For fixed `w` the optimal offset is `b(w) = (y_sum - sum_c w_c s_c) / n`
/// where `s_c` are per-column x/y row sums. Substituting it back leaves a
/// non-negative lasso on per-component centered columns, whose Gram matrix
/// is `X^T X - s_a . s_b / n`. Coordinate steps on it therefore keep `b` at
/// its closed-form optimum after every update.
struct Gram {
    m: usize,
    /// Centered `X^T X`, row-major `m x m`.
    xtx: Vec<f64>,
    /// Centered `X^T y`.
    xty: Vec<f64>,
    col_sums: Vec<Vec2>,
    y_sum: Vec2,
    /// Centered `y^T y`.
    yty: f64,
    samples: f64,
}

impl Gram {
    fn new(design: &DesignMatrix) -> Self {
        let m = design.penalized_columns();
        let y = design.target();
        let n = design.samples() as f64;
        let col_sums: Vec<Vec2> = (0..m).map(|c| pair_sums(design.column(c))).collect();
        let y_sum = pair_sums(y);
        let mut xtx = vec![0.0; m * m];
        for a in 0..m {
            for b in a..m {
                let g = dot(design.column(a), design.column(b)) - col_sums[a].dot(col_sums[b]) / n;
                xtx[a * m + b] = g;
                xtx[b * m + a] = g;
            }
        }
        Gram {
            m,
            xtx,
            xty: (0..m)
                .map(|c| dot(design.column(c), y) - col_sums[c].dot(y_sum) / n)
                .collect(),
            yty: dot(y, y) - y_sum.dot(y_sum) / n,
            col_sums,
            y_sum,
            samples: n,
        }
    }

    fn g(&self, a: usize, b: usize) -> f64 {
        self.xtx[a * self.m + b]
    }

    /// Least-squares offset given the penalized coefficients.
    /// Unconstrained minimizer on the support of `w` nearest to `w`, if it is
    /// strictly positive there. On a singular block this is `w` plus the
    /// minimum-norm correction, so flat directions are left where they are.
    fn polish(&self, w: &[f64], lambda: f64) -> Option<Vec<f64>> {
        let active: Vec<usize> = (0..self.m).filter(|&a| w[a] > 0.0).collect();
        if active.is_empty() {
            return None;
        }
        let k = active.len();
        let block = DMatrix::from_fn(k, k, |r, c| self.g(active[r], active[c]));
        let residual = DVector::from_fn(k, |r, _| {
            let a = active[r];
            self.xty[a] - lambda - active.iter().map(|&c| self.g(a, c) * w[c]).sum::<f64>()
        });
        let svd = block.svd(true, true);
        let cutoff = 1e-12 * svd.singular_values.max();
        let step = svd.solve(&residual, cutoff).ok()?;
        let mut out = vec![0.0; self.m];
        for (r, &a) in active.iter().enumerate() {
            let v = w[a] + step[r];
            if !(v > 0.0 && v.is_finite()) {
                return None;
            }
            out[a] = v;
        }
        Some(out)
    }

    fn best_offset(&self, w: &[f64]) -> Vec2 {
        let mut s = self.y_sum;
        for (c, wc) in self.col_sums.iter().zip(w) {
            s = s - *c * *wc;
        }
        s * (1.0 / self.samples)
    }

    /// Objective with the offset at its optimum, up to the constant dropped
    /// by centering.
    fn objective(&self, w: &[f64], lambda: f64) -> f64 {
        let mut value = 0.5 * self.yty;
        for a in 0..self.m {
            value -= self.xty[a] * w[a];
            for c in 0..self.m {
                value += 0.5 * w[a] * self.g(a, c) * w[c];
            }
        }
        value + lambda * w.iter().sum::<f64>()
    }

    /// Magnitude of the terms summed by [`Gram::objective`], for judging
    /// its rounding error.
    #[cfg(debug_assertions)]
    fn objective_scale(&self, w: &[f64], lambda: f64) -> f64 {
        let mut scale = self.yty.abs();
        for a in 0..self.m {
            scale += (self.xty[a] * w[a]).abs() + lambda * w[a];
            for c in 0..self.m {
                scale += (w[a] * self.g(a, c) * w[c]).abs();
            }
        }
        scale
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn pair_sums(rows: &[f64]) -> Vec2 {
    rows.chunks_exact(2)
        .fold(Vec2::ZERO, |acc, r| acc + Vec2::new(r[0], r[1]))
}

/// Smallest penalty at which every penalized coefficient is zero: the largest
/// absolute correlation between a penalized column and the residual of the
/// offset-only fit.
pub fn lambda_max(design: &DesignMatrix) -> f64 {
    Gram::new(design).xty.iter().fold(0.0, |acc, c| acc.max(c.abs()))
}

/// Minimizes `1/2 |y - X w - b|^2 + lambda * sum(w)` subject to `w >= 0`, with
/// `b` free.
///
/// Sweeps the penalized coordinates in column order with a non-negative
/// soft-threshold update; `b` is held at its closed-form optimum throughout
/// (see [`Gram`]) and read off at the end. Whenever the support survives a
/// sweep unchanged, the least-squares solution restricted to it is tried and
/// kept if it stays positive and lowers the objective, which cuts the long
/// tail of sweeps on nearly collinear windows. Stops once the largest change
/// in any coordinate, `b` included, during a sweep is below `tol`.
pub fn fit_window(
    design: &DesignMatrix,
    lambda: f64,
    tol: f64,
    max_iters: usize,
) -> Result<FitResult> {
    if !design.is_finite() {
        return Err(Error::input("design contains non-finite values"));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::input(format!("penalty must be non-negative, got {lambda}")));
    }
    let gram = Gram::new(design);
    let m = gram.m;
    let mut w = vec![0.0; m];
    let mut iterations = 0;
    let mut converged = false;
    let mut support: Vec<bool> = vec![false; m];
    let mut polished_support: Option<Vec<bool>> = None;
    #[cfg(debug_assertions)]
    let mut previous = gram.objective(&w, lambda);

    while iterations < max_iters {
        iterations += 1;
        let mut max_change: f64 = 0.0;
        let mut offset_shift = Vec2::ZERO;
        for a in 0..m {
            let gaa = gram.g(a, a);
            // Columns constant over the window are absorbed by the offset.
            let updated = if gaa > 1e-14 * gram.samples {
                let mut partial = gram.xty[a];
                for c in (0..m).filter(|&c| c != a) {
                    partial -= gram.g(a, c) * w[c];
                }
                ((partial - lambda) / gaa).max(0.0)
            } else {
                0.0
            };
            let delta = updated - w[a];
            max_change = max_change.max(delta.abs());
            offset_shift = offset_shift - gram.col_sums[a] * (delta / gram.samples);
            w[a] = updated;
        }
        max_change = max_change.max(offset_shift.x.abs()).max(offset_shift.y.abs());

        #[cfg(debug_assertions)]
        {
            let current = gram.objective(&w, lambda);
            let slack = 1e-10 * (1.0 + gram.objective_scale(&w, lambda));
            debug_assert!(
                current <= previous + slack,
                "objective increased from {previous} to {current}"
            );
            previous = current;
        }

        if max_change < tol {
            converged = true;
            break;
        }

        let current: Vec<bool> = w.iter().map(|&v| v > 0.0).collect();
        if current == support && polished_support.as_ref() != Some(&current) {
            if let Some(candidate) = gram.polish(&w, lambda) {
                if gram.objective(&candidate, lambda) <= gram.objective(&w, lambda) {
                    w = candidate;
                    #[cfg(debug_assertions)]
                    {
                        previous = gram.objective(&w, lambda);
                    }
                }
            }
            polished_support = Some(current.clone());
        }
        support = current;
    }

    let b = gram.best_offset(&w);
    let objective = design.objective(&w, b, lambda);
    Ok(FitResult::from_coefficients(w, b, objective, iterations, converged))
}
