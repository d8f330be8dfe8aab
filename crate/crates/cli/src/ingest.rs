//! Tracked trajectories in `frame,id,x,y` CSV form.

use std::collections::BTreeMap;
use std::path::Path;

use schoolnet::{TrajectoryDataset, Vec2};

use crate::error::{CliError, Result};
use crate::format::sig9;

const COLUMNS: [&str; 4] = ["frame", "id", "x", "y"];

#[derive(Clone, Debug, PartialEq)]
pub struct IngestOptions {
    pub flip_y: bool,
    pub max_gap: usize,
    pub frame_rate: f64,
    pub length_unit: String,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            flip_y: false,
            max_gap: 5,
            frame_rate: 60.0,
            length_unit: "cm".to_owned(),
        }
    }
}

pub fn ingest_csv(path: &Path, opts: &IngestOptions) -> Result<TrajectoryDataset> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    ingest_reader(file, path, opts)
}

/// Parses CSV from any reader; `path` only labels errors.
pub fn ingest_reader(
    reader: impl std::io::Read,
    path: &Path,
    opts: &IngestOptions,
) -> Result<TrajectoryDataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let parse_err = |line: u64, message: String| CliError::Parse {
        path: path.to_owned(),
        line,
        message,
    };
    let headers = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let mut idx = [0usize; 4];
    let mut missing = Vec::new();
    for (slot, name) in idx.iter_mut().zip(COLUMNS) {
        match headers.iter().position(|h| h == name) {
            Some(c) => *slot = c,
            None => missing.push(name.to_owned()),
        }
    }
    if !missing.is_empty() {
        return Err(CliError::MissingColumns {
            path: path.to_owned(),
            missing,
        });
    }

    let mut tracks: BTreeMap<usize, BTreeMap<i64, Vec2>> = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |c: usize| record.get(idx[c]).unwrap_or("");
        let frame: i64 = field(0)
            .parse()
            .map_err(|_| parse_err(line, format!("frame {:?} is not an integer", field(0))))?;
        let id: usize = field(1)
            .parse()
            .map_err(|_| parse_err(line, format!("id {:?} is not a positive integer", field(1))))?;
        let coord = |c: usize| -> Result<f64> {
            match field(c).parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(parse_err(
                    line,
                    format!("{} {:?} is not a finite number", COLUMNS[c], field(c)),
                )),
            }
        };
        let p = Vec2::new(coord(2)?, coord(3)?);
        if tracks.entry(id).or_default().insert(frame, p).is_some() {
            return Err(CliError::Duplicate {
                path: path.to_owned(),
                id,
                frame,
            });
        }
    }

    let ids: Vec<usize> = tracks.keys().copied().collect();
    let n = ids.len();
    if n == 0 || ids.iter().copied().ne(1..=n) {
        return Err(CliError::NonContiguousIds {
            path: path.to_owned(),
            expected: n,
            found: ids,
        });
    }
    let first = tracks.values().filter_map(|t| t.keys().next()).copied().min().unwrap_or(0);
    let last = tracks.values().filter_map(|t| t.keys().last()).copied().max().unwrap_or(0);
    let num_frames = (last - first + 1) as usize;

    let mut columns: Vec<Vec<Vec2>> = Vec::with_capacity(n);
    for (&id, track) in &tracks {
        let own_first = *track.keys().next().expect("ids come from rows");
        let own_last = *track.keys().last().expect("ids come from rows");
        if own_first != first || own_last != last {
            return Err(CliError::TruncatedTrack {
                path: path.to_owned(),
                id,
                first,
                last,
                own_first,
                own_last,
            });
        }
        columns.push(fill_gaps(path, id, track, opts.max_gap)?);
    }

    if opts.flip_y {
        let ys = columns.iter().flatten().map(|p| p.y);
        let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| {
            (lo.min(y), hi.max(y))
        });
        for p in columns.iter_mut().flatten() {
            p.y = lo + hi - p.y;
        }
    }

    let frames: Vec<Vec<Vec2>> = (0..num_frames)
        .map(|t| columns.iter().map(|c| c[t]).collect())
        .collect();
    Ok(TrajectoryDataset::new(
        frames,
        1.0 / opts.frame_rate,
        opts.length_unit.clone(),
    )?)
}

/// Dense track from the first to the last recorded frame, with short gaps
/// linearly interpolated.
fn fill_gaps(path: &Path, id: usize, track: &BTreeMap<i64, Vec2>, max_gap: usize) -> Result<Vec<Vec2>> {
    let mut out = Vec::with_capacity(track.len());
    let mut prev: Option<(i64, Vec2)> = None;
    for (&frame, &p) in track {
        if let Some((f0, p0)) = prev {
            let missing = (frame - f0 - 1) as usize;
            if missing > max_gap {
                return Err(CliError::GapTooLong {
                    path: path.to_owned(),
                    id,
                    first: f0 + 1,
                    last: frame - 1,
                    len: missing,
                    max_gap,
                });
            }
            let span = (frame - f0) as f64;
            for g in 1..=missing {
                let a = g as f64 / span;
                out.push(p0 * (1.0 - a) + p * a);
            }
        }
        out.push(p);
        prev = Some((frame, p));
    }
    Ok(out)
}

/// Renders a dataset as `frame,id,x,y` rows sorted by frame then id.
pub fn render_trajectories_csv(ds: &TrajectoryDataset) -> String {
    let mut out = String::from("frame,id,x,y\n");
    for (t, row) in ds.frames().enumerate() {
        for (i, p) in row.iter().enumerate() {
            out.push_str(&format!("{t},{},{},{}\n", i + 1, sig9(p.x), sig9(p.y)));
        }
    }
    out
}
