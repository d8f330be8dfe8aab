//! Schooling indices computed from estimated (or planted) window parameters.

use serde::{Deserialize, Serialize};

use crate::estimate::{EstimateSeries, WindowEstimate};

/// Totals below this make a normalization undefined.
pub const EPS_SHARE: f64 = 1e-12;

/// Influence exerted by each individual: `I_i = sum_{j != i} w_ji`, the
/// column sums of the weight matrix without the diagonal.
pub fn influences(est: &WindowEstimate) -> Vec<f64> {
    let n = est.num_individuals();
    (0..n).map(|i| individual_influence(est, i)).collect()
}

pub fn individual_influence(est: &WindowEstimate, i: usize) -> f64 {
    (0..est.num_individuals())
        .filter(|&j| j != i)
        .map(|j| est.weights.get(j, i))
        .sum()
}

/// `S_att`: total off-diagonal weight.
///
/// Accumulated column by column so that it equals the sum of [`influences`]
/// bit for bit.
pub fn coordination_strength(est: &WindowEstimate) -> f64 {
    influences(est).iter().sum()
}

/// `S_stim`: total stimulus weight.
pub fn stimulus_responsiveness(est: &WindowEstimate) -> f64 {
    est.stim_weights.iter().sum()
}

/// Total autonomous magnitude, `sum_i w_ii`.
pub fn autonomous_sum(est: &WindowEstimate) -> f64 {
    (0..est.num_individuals()).map(|i| est.weights.get(i, i)).sum()
}

/// Relative contribution of coordination, stimulus, and autonomy to one
/// individual's response; the three add up to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shares {
    pub coordination: f64,
    pub stimulus: f64,
    pub autonomous: f64,
}

/// Normalized components of individual `i`, or `None` when all three vanish.
pub fn component_shares(est: &WindowEstimate, i: usize) -> Option<Shares> {
    let a: f64 = (0..est.num_individuals())
        .filter(|&j| j != i)
        .map(|j| est.weights.get(i, j))
        .sum();
    let s = est.stim_weights[i];
    let u = est.weights.get(i, i);
    let z = a + s + u;
    (z >= EPS_SHARE).then(|| Shares {
        coordination: a / z,
        stimulus: s / z,
        autonomous: u / z,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowIndices {
    pub window_index: usize,
    pub s_att: f64,
    pub s_stim: f64,
    pub s_auto: f64,
    pub influence: Vec<f64>,
    pub shares: Vec<Option<Shares>>,
}

impl WindowIndices {
    pub fn compute(est: &WindowEstimate) -> Self {
        let n = est.num_individuals();
        let influence = influences(est);
        WindowIndices {
            window_index: est.window_index,
            s_att: influence.iter().sum(),
            s_stim: stimulus_responsiveness(est),
            s_auto: autonomous_sum(est),
            shares: (0..n).map(|i| component_shares(est, i)).collect(),
            influence,
        }
    }
}

pub fn index_series(series: &EstimateSeries) -> Vec<WindowIndices> {
    series.iter().map(WindowIndices::compute).collect()
}

/// Per-individual time averages of the defined share rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShareSummary {
    /// `None` if every window was undefined for that individual.
    pub mean: Vec<Option<Shares>>,
    /// Undefined windows excluded from each average.
    pub excluded: Vec<usize>,
}

pub fn mean_shares(indices: &[WindowIndices]) -> ShareSummary {
    let n = indices.first().map_or(0, |w| w.shares.len());
    let mut mean = Vec::with_capacity(n);
    let mut excluded = Vec::with_capacity(n);
    for i in 0..n {
        let rows: Vec<Shares> = indices.iter().filter_map(|w| w.shares[i]).collect();
        excluded.push(indices.len() - rows.len());
        mean.push((!rows.is_empty()).then(|| {
            let k = rows.len() as f64;
            Shares {
                coordination: rows.iter().map(|r| r.coordination).sum::<f64>() / k,
                stimulus: rows.iter().map(|r| r.stimulus).sum::<f64>() / k,
                autonomous: rows.iter().map(|r| r.autonomous).sum::<f64>() / k,
            }
        }));
    }
    ShareSummary { mean, excluded }
}

/// Entropy of a time-averaged distribution over individuals, in base `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedEntropy {
    /// In `[0, 1]`; `None` when every window was skipped.
    pub value: Option<f64>,
    pub r_bar: Option<Vec<f64>>,
    /// Windows whose total fell below [`EPS_SHARE`].
    pub skipped_windows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub influence: NormalizedEntropy,
    pub stimulus: NormalizedEntropy,
}

impl EntropyReport {
    pub fn compute(series: &EstimateSeries) -> Self {
        EntropyReport {
            influence: influence_entropy(series),
            stimulus: stim_entropy(series),
        }
    }
}

/// `-sum_i r_i log_N r_i` with `0 log 0 = 0`, `N = r.len()`, clamped to `[0, 1]`.
pub fn normalized_entropy(r: &[f64]) -> f64 {
    let n = r.len() as f64;
    if r.len() < 2 {
        return 0.0;
    }
    let h: f64 = r
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    (h / n.ln()).clamp(0.0, 1.0)
}

fn time_averaged_entropy<F>(series: &EstimateSeries, per_window: F) -> NormalizedEntropy
where
    F: Fn(&WindowEstimate) -> Vec<f64>,
{
    let n = series.num_individuals().unwrap_or(0);
    let mut sum = vec![0.0; n];
    let mut used = 0usize;
    let mut skipped = 0usize;
    for est in series {
        let values = per_window(est);
        let total: f64 = values.iter().sum();
        if total < EPS_SHARE {
            skipped += 1;
            continue;
        }
        used += 1;
        for (s, v) in sum.iter_mut().zip(&values) {
            *s += v / total;
        }
    }
    if used == 0 {
        return NormalizedEntropy {
            value: None,
            r_bar: None,
            skipped_windows: skipped,
        };
    }
    let r_bar: Vec<f64> = sum.iter().map(|s| s / used as f64).collect();
    NormalizedEntropy {
        value: Some(normalized_entropy(&r_bar)),
        r_bar: Some(r_bar),
        skipped_windows: skipped,
    }
}

/// `H_influ`: entropy of the time-averaged relative influence.
pub fn influence_entropy(series: &EstimateSeries) -> NormalizedEntropy {
    time_averaged_entropy(series, influences)
}

/// `H_stim`: entropy of the time-averaged relative stimulus weight.
pub fn stim_entropy(series: &EstimateSeries) -> NormalizedEntropy {
    time_averaged_entropy(series, |est| est.stim_weights.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::WeightMatrix;
    use crate::geometry::Vec2;

    fn estimate(n: usize, entries: &[(usize, usize, f64)], stim: Vec<f64>) -> WindowEstimate {
        let mut weights = WeightMatrix::zeros(n);
        let mut dirs = vec![Vec2::ZERO; n];
        for &(i, j, w) in entries {
            weights.set(i, j, w);
            if i == j && w > 0.0 {
                dirs[i] = Vec2::new(0.0, 1.0);
            }
        }
        WindowEstimate {
            window_index: 0,
            weights,
            stim_weights: stim,
            preferred_dirs: dirs,
        }
    }

    #[test]
    fn group_sums() {
        let zero = estimate(3, &[], vec![0.0; 3]);
        assert_eq!(coordination_strength(&zero), 0.0);
        assert_eq!(stimulus_responsiveness(&zero), 0.0);
        let all: Vec<_> = (0..3)
            .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j, 0.5)))
            .collect();
        assert_eq!(coordination_strength(&estimate(3, &all, vec![0.0; 3])), 3.0);
        let stim = estimate(5, &[], vec![0.2; 5]);
        assert!((stimulus_responsiveness(&stim) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn influence_reads_columns() {
        // Individual 2 (index 1) responds to individual 1 (index 0).
        let e = estimate(2, &[(1, 0, 0.7)], vec![0.0; 2]);
        assert_eq!(individual_influence(&e, 0), 0.7);
        assert_eq!(individual_influence(&e, 1), 0.0);
        let sym = estimate(3, &[(0, 1, 0.2), (1, 0, 0.2), (0, 2, 0.4), (2, 0, 0.4), (1, 2, 0.1), (2, 1, 0.1)], vec![0.0; 3]);
        for i in 0..3 {
            let row: f64 = (0..3).filter(|&j| j != i).map(|j| sym.weights.get(i, j)).sum();
            assert_eq!(individual_influence(&sym, i), row);
        }
    }

    #[test]
    fn shares_examples() {
        let e = estimate(2, &[(0, 1, 1.0), (0, 0, 1.0), (1, 0, 2.0)], vec![1.0, 0.0]);
        let s = component_shares(&e, 0).unwrap();
        for v in [s.coordination, s.stimulus, s.autonomous] {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(
            component_shares(&e, 1),
            Some(Shares { coordination: 1.0, stimulus: 0.0, autonomous: 0.0 })
        );
        assert_eq!(component_shares(&estimate(2, &[], vec![0.0; 2]), 0), None);
    }

    #[test]
    fn undefined_shares_are_excluded_from_means() {
        let defined = estimate(2, &[(0, 1, 1.0), (1, 0, 1.0)], vec![0.0; 2]);
        let empty = estimate(2, &[], vec![0.0; 2]);
        let idx = index_series(&vec![defined, empty].into());
        let summary = mean_shares(&idx);
        assert_eq!(summary.excluded, vec![1, 1]);
        assert_eq!(summary.mean[0].unwrap().coordination, 1.0);
    }

    #[test]
    fn entropy_closed_forms() {
        assert!((normalized_entropy(&[0.2; 5]) - 1.0).abs() < 1e-12);
        assert_eq!(normalized_entropy(&[1.0, 0.0, 0.0, 0.0, 0.0]), 0.0);
        let h = normalized_entropy(&[0.5, 0.5, 0.0, 0.0, 0.0]);
        assert!((h - 2f64.ln() / 5f64.ln()).abs() < 1e-15);
        assert!((h - 0.4307).abs() < 1e-4);
    }

    // Reference from a 50-digit evaluation (mpmath):
    // -sum(p*log(p, 5) for p in (0.4, 0.3, 0.2, 0.1)) = 0.79521814165420441...
    #[test]
    fn heterogeneous_stimulus_entropy() {
        let est = estimate(5, &[], vec![0.4, 0.3, 0.2, 0.1, 0.0]);
        let h = stim_entropy(&vec![est.clone(), est].into());
        assert!((h.value.unwrap() - 0.795_218_141_654_204).abs() < 1e-10);
        assert_eq!(h.skipped_windows, 0);
    }

    #[test]
    fn all_windows_skipped_is_undefined() {
        let empty = estimate(3, &[], vec![0.0; 3]);
        let h = influence_entropy(&vec![empty.clone(), empty].into());
        assert_eq!(h.value, None);
        assert_eq!(h.skipped_windows, 2);
    }

    #[test]
    fn time_average_precedes_entropy() {
        // Each window is a point mass (entropy 0) but the average is uniform.
        let a = estimate(2, &[(1, 0, 1.0)], vec![1.0, 0.0]);
        let b = estimate(2, &[(0, 1, 1.0)], vec![0.0, 1.0]);
        let series: EstimateSeries = vec![a, b].into();
        assert!((influence_entropy(&series).value.unwrap() - 1.0).abs() < 1e-12);
        assert!((stim_entropy(&series).value.unwrap() - 1.0).abs() < 1e-12);
    }
}
