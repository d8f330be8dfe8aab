//! Accuracy of an estimated series against planted parameters.

use crate::estimate::{EstimateSeries, WindowEstimate};
use crate::{Error, Result};

fn check_aligned(est: &EstimateSeries, truth: &EstimateSeries) -> Result<()> {
    if est.len() != truth.len() {
        return Err(Error::input(format!(
            "{} estimated windows against {} planted",
            est.len(),
            truth.len()
        )));
    }
    for (e, t) in est.iter().zip(truth) {
        if e.num_individuals() != t.num_individuals() || e.window_index != t.window_index {
            return Err(Error::input(format!(
                "window {} does not line up with planted window {}",
                e.window_index, t.window_index
            )));
        }
    }
    Ok(())
}

/// Largest absolute difference over every weight (diagonal included) and
/// every stimulus weight, across all windows.
pub fn max_abs_error(est: &EstimateSeries, truth: &EstimateSeries) -> Result<f64> {
    check_aligned(est, truth)?;
    let mut worst: f64 = 0.0;
    for (e, t) in est.iter().zip(truth) {
        let pairs = e
            .weights
            .as_row_major()
            .iter()
            .zip(t.weights.as_row_major())
            .chain(e.stim_weights.iter().zip(&t.stim_weights));
        for (a, b) in pairs {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// Penalized coefficients of a window: off-diagonal weights row by row,
/// then stimulus weights. The diagonal is unpenalized and left out.
fn penalized(w: &WindowEstimate) -> impl Iterator<Item = f64> + '_ {
    let n = w.num_individuals();
    (0..n)
        .flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| w.weights.get(i, j)))
        .chain(w.stim_weights.iter().copied())
}

/// F1 score of the nonzero pattern of one window's penalized coefficients.
///
/// Two empty supports agree perfectly and score 1.
pub fn window_support_f1(est: &WindowEstimate, truth: &WindowEstimate) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (e, t) in penalized(est).zip(penalized(truth)) {
        match (e > 0.0, t > 0.0) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    if tp + fp + fn_ == 0 {
        1.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
    }
}

/// Support F1 averaged over windows.
pub fn support_f1(est: &EstimateSeries, truth: &EstimateSeries) -> Result<f64> {
    check_aligned(est, truth)?;
    if est.is_empty() {
        return Err(Error::input("no windows to score"));
    }
    let total: f64 = est.iter().zip(truth).map(|(e, t)| window_support_f1(e, t)).sum();
    Ok(total / est.len() as f64)
}
