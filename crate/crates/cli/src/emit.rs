//! Output files. Everything is rendered in memory first and then written
//! through temp file + rename, so a failed run leaves no partial files.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use schoolnet::indices::{index_series, mean_shares, NormalizedEntropy, ShareSummary, Shares};
use schoolnet::{EntropyReport, EstimateSeries, Vec2, WeightMatrix, WindowEstimate, WindowIndices};
use serde::{Deserialize, Serialize};

use crate::config::Emit;
use crate::error::{CliError, Result};
use crate::format::{round9, sig9};

/// One line of estimates.jsonl.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EstimateLine {
    k: usize,
    #[serde(rename = "W")]
    w: Vec<Vec<f64>>,
    stim: Vec<f64>,
    d_hat: Vec<[f64; 2]>,
}

pub fn render_estimates(series: &EstimateSeries) -> String {
    let mut out = String::new();
    for est in series {
        let n = est.num_individuals();
        let line = EstimateLine {
            k: est.window_index,
            w: (0..n).map(|i| est.weights.row(i).iter().copied().map(round9).collect()).collect(),
            stim: est.stim_weights.iter().copied().map(round9).collect(),
            d_hat: est.preferred_dirs.iter().map(|d| [round9(d.x), round9(d.y)]).collect(),
        };
        out.push_str(&serde_json::to_string(&line).expect("plain data serializes"));
        out.push('\n');
    }
    out
}

/// Reads estimates.jsonl back. Preferred directions more than 1e-9 off the
/// unit circle are renormalized; 9-digit output always stays inside that.
pub fn parse_estimates(text: &str, path: &Path) -> Result<EstimateSeries> {
    let mut windows = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let err = |message: String| CliError::Parse {
            path: path.to_owned(),
            line: no as u64 + 1,
            message,
        };
        let line: EstimateLine = serde_json::from_str(raw).map_err(|e| err(e.to_string()))?;
        let n = line.w.len();
        let weights = WeightMatrix::try_from(line.w).map_err(|e| err(e.to_string()))?;
        let est = WindowEstimate {
            window_index: line.k,
            weights,
            stim_weights: line.stim,
            preferred_dirs: line
                .d_hat
                .iter()
                .map(|&[x, y]| {
                    let d = Vec2::new(x, y);
                    if d == Vec2::ZERO || (d.norm() - 1.0).abs() <= 1e-9 {
                        d
                    } else {
                        d.normalized_or_zero()
                    }
                })
                .collect(),
        };
        est.validate().map_err(|e| err(e.to_string()))?;
        if let Some(first) = windows.first().map(WindowEstimate::num_individuals) {
            if first != n {
                return Err(err(format!("{n} individuals, earlier lines have {first}")));
            }
        }
        windows.push(est);
    }
    Ok(EstimateSeries::new(windows))
}

pub fn render_indices(indices: &[WindowIndices]) -> String {
    let n = indices.first().map_or(0, |w| w.influence.len());
    let mut out = String::from("window,s_att,s_stim,s_auto");
    for i in 1..=n {
        out.push_str(&format!(",I_{i}"));
    }
    out.push('\n');
    for w in indices {
        out.push_str(&format!(
            "{},{},{},{}",
            w.window_index,
            sig9(w.s_att),
            sig9(w.s_stim),
            sig9(w.s_auto)
        ));
        for v in &w.influence {
            out.push(',');
            out.push_str(&sig9(*v));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct SharesOut {
    coordination: f64,
    stimulus: f64,
    autonomous: f64,
}

impl From<&Shares> for SharesOut {
    fn from(s: &Shares) -> Self {
        SharesOut {
            coordination: round9(s.coordination),
            stimulus: round9(s.stimulus),
            autonomous: round9(s.autonomous),
        }
    }
}

#[derive(Serialize)]
struct EntropyOut {
    windows: usize,
    h_influ: Option<f64>,
    h_stim: Option<f64>,
    r_bar: Option<Vec<f64>>,
    r_bar_stim: Option<Vec<f64>>,
    skipped_windows_influ: usize,
    skipped_windows_stim: usize,
    mean_shares: Vec<Option<SharesOut>>,
    undefined_share_windows: Vec<usize>,
}

fn rounded(h: &NormalizedEntropy) -> (Option<f64>, Option<Vec<f64>>) {
    (
        h.value.map(round9),
        h.r_bar.as_ref().map(|r| r.iter().copied().map(round9).collect()),
    )
}

pub fn render_entropy(windows: usize, report: &EntropyReport, shares: &ShareSummary) -> String {
    let (h_influ, r_bar) = rounded(&report.influence);
    let (h_stim, r_bar_stim) = rounded(&report.stimulus);
    let out = EntropyOut {
        windows,
        h_influ,
        h_stim,
        r_bar,
        r_bar_stim,
        skipped_windows_influ: report.influence.skipped_windows,
        skipped_windows_stim: report.stimulus.skipped_windows,
        mean_shares: shares.mean.iter().map(|s| s.as_ref().map(SharesOut::from)).collect(),
        undefined_share_windows: shares.excluded.clone(),
    };
    let mut text = serde_json::to_string_pretty(&out).expect("plain data serializes");
    text.push('\n');
    text
}

/// Edge list `k,i,j,w` (1-based ids, `w = W[i][j]`, the pull of `j` on `i`)
/// for off-diagonal weights at or above `threshold`.
pub fn render_networks(series: &EstimateSeries, threshold: f64) -> String {
    let mut out = String::from("k,i,j,w\n");
    for est in series {
        let n = est.num_individuals();
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let w = est.weights.get(i, j);
                if w >= threshold {
                    out.push_str(&format!("{},{},{},{}\n", est.window_index, i + 1, j + 1, sig9(w)));
                }
            }
        }
    }
    out
}

/// Renders the selected files for a fitted series.
pub fn render_outputs(
    series: &EstimateSeries,
    emit: &BTreeSet<Emit>,
    network_threshold: f64,
) -> Vec<(&'static str, String)> {
    let indices = index_series(series);
    emit.iter()
        .map(|&e| {
            let text = match e {
                Emit::Estimates => render_estimates(series),
                Emit::Indices => render_indices(&indices),
                Emit::Entropy => render_entropy(
                    series.len(),
                    &EntropyReport::compute(series),
                    &mean_shares(&indices),
                ),
                Emit::Networks => render_networks(series, network_threshold),
            };
            (e.file_name(), text)
        })
        .collect()
}

/// Writes every file to a temp name first and renames only once all of them
/// are on disk.
pub fn write_atomically(dir: &Path, files: &[(&str, String)]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::with_capacity(files.len());
    let cleanup = |staged: &[(PathBuf, PathBuf)]| {
        for (tmp, _) in staged {
            let _ = std::fs::remove_file(tmp);
        }
    };
    for (name, text) in files {
        let target = dir.join(name);
        let tmp = dir.join(format!(".{name}.tmp"));
        let written = std::fs::File::create(&tmp)
            .and_then(|mut f| f.write_all(text.as_bytes()).and_then(|_| f.sync_all()));
        staged.push((tmp.clone(), target));
        if let Err(e) = written {
            cleanup(&staged);
            return Err(CliError::io(tmp, e));
        }
    }
    for (i, (tmp, target)) in staged.iter().enumerate() {
        if let Err(e) = std::fs::rename(tmp, target) {
            cleanup(&staged[i..]);
            return Err(CliError::io(target, e));
        }
    }
    Ok(staged.into_iter().map(|(_, target)| target).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EstimateSeries {
        let mut w = WeightMatrix::zeros(3);
        w.set(0, 1, 0.25);
        w.set(1, 0, 1.0 / 3.0);
        w.set(2, 2, 0.5);
        w.set(2, 0, 0.01);
        let est = WindowEstimate {
            window_index: 4,
            weights: w,
            stim_weights: vec![0.1, 0.0, 2.0],
            preferred_dirs: vec![Vec2::ZERO, Vec2::ZERO, Vec2::new(0.6, -0.8)],
        };
        EstimateSeries::new(vec![est])
    }

    #[test]
    fn estimates_line_layout() {
        let text = render_estimates(&sample());
        assert_eq!(
            text,
            "{\"k\":4,\"W\":[[0.0,0.25,0.0],[0.333333333,0.0,0.0],[0.01,0.0,0.5]],\
             \"stim\":[0.1,0.0,2.0],\"d_hat\":[[0.0,0.0],[0.0,0.0],[0.6,-0.8]]}\n"
        );
        let back = parse_estimates(&text, Path::new("e.jsonl")).unwrap();
        assert_eq!(back.windows()[0].window_index, 4);
        assert!((back.windows()[0].weights.get(1, 0) - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn malformed_lines_are_rejected() {
        let p = Path::new("e.jsonl");
        assert!(parse_estimates("{\"k\":0}\n", p).is_err());
        let negative = "{\"k\":0,\"W\":[[0,-1],[0,0]],\"stim\":[0,0],\"d_hat\":[[0,0],[0,0]]}";
        assert_eq!(parse_estimates(negative, p).unwrap_err().exit_code(), 15);
    }

    #[test]
    fn csv_layouts() {
        let series = sample();
        let idx = render_indices(&index_series(&series));
        assert_eq!(idx, "window,s_att,s_stim,s_auto,I_1,I_2,I_3\n4,0.593333333,2.1,0.5,0.343333333,0.25,0\n");
        let net = render_networks(&series, 0.05);
        assert_eq!(net, "k,i,j,w\n4,1,2,0.25\n4,2,1,0.333333333\n");
        assert_eq!(render_networks(&series, 0.0).lines().count(), 7);
    }

    #[test]
    fn entropy_json_fields() {
        let series = sample();
        let files = render_outputs(&series, &[Emit::Entropy].into_iter().collect(), 0.0);
        let v: serde_json::Value = serde_json::from_str(&files[0].1).unwrap();
        for key in ["h_influ", "h_stim", "r_bar", "r_bar_stim", "skipped_windows_influ", "mean_shares"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["windows"], 1);
    }

    #[test]
    fn atomic_write_replaces_files() {
        let dir = tempfile::tempdir().unwrap();
        let files = vec![("a.csv", "1\n".to_owned()), ("b.csv", "2\n".to_owned())];
        write_atomically(dir.path(), &files).unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("b.csv")).unwrap(), "2\n");
        let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 2);
    }
}
