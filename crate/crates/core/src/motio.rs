//! MOTChallenge text files in, evaluation reports out.
//!
//! Files are comma separated with one box per line:
//! `frame,id,left,top,width,height[,conf[,class[,visibility[,...]]]]`.
//! Frames are 1-based; time steps are 0-based after rebasing.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::boxmetrics::BoundingBox;
use crate::error::{Error, Result};
use crate::tgospa::{Solver, TgospaParams, TgospaResult};
use crate::trajectories::{Trajectory, TrajectorySet};

/// Id used for unassociated detections.
pub const DETECTION_ID: i64 = -1;

/// Totals closer than this share a rank.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotRecord {
    pub frame: i64,
    pub id: i64,
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub conf: f64,
    pub class: i64,
    pub visibility: f64,
}

fn field<T: std::str::FromStr>(parts: &[&str], idx: usize, name: &str, line: usize) -> Result<T> {
    let raw = parts[idx].trim();
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("field {} ({name}) is not a valid number: {raw:?}", idx + 1),
    })
}

/// Integer fields sometimes appear as `5.0`; accept them when integral.
fn int_field(parts: &[&str], idx: usize, name: &str, line: usize) -> Result<i64> {
    let v: f64 = field(parts, idx, name, line)?;
    if v.fract() != 0.0 || !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("field {} ({name}) must be an integer, got {v}", idx + 1),
        });
    }
    Ok(v as i64)
}

/// Parses a MOTChallenge file. Blank lines are skipped; missing trailing
/// fields default to 1.
pub fn parse_mot(content: &str) -> Result<Vec<MotRecord>> {
    let mut out = Vec::new();
    for (n, raw) in content.lines().enumerate() {
        let line = n + 1;
        let text = raw.trim();
        if text.is_empty() {
            continue;
        }
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() < 6 {
            return Err(Error::Parse {
                line,
                message: format!("expected at least 6 fields, found {}", parts.len()),
            });
        }
        let frame = int_field(&parts, 0, "frame", line)?;
        if frame < 1 {
            return Err(Error::Parse {
                line,
                message: format!("frame numbers start at 1, got {frame}"),
            });
        }
        out.push(MotRecord {
            frame,
            id: int_field(&parts, 1, "id", line)?,
            left: field(&parts, 2, "left", line)?,
            top: field(&parts, 3, "top", line)?,
            width: field(&parts, 4, "width", line)?,
            height: field(&parts, 5, "height", line)?,
            conf: if parts.len() > 6 { field(&parts, 6, "conf", line)? } else { 1.0 },
            class: if parts.len() > 7 { int_field(&parts, 7, "class", line)? } else { 1 },
            visibility: if parts.len() > 8 { field(&parts, 8, "visibility", line)? } else { 1.0 },
        });
    }
    Ok(out)
}

/// Which records become trajectories, and how frames map to steps.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Filter {
    /// Inclusive frame range `[k0, kF]`. Without it all frames are kept and
    /// the range is `[1, last frame]`.
    pub window: Option<(i64, i64)>,
    pub keep_ids: Option<BTreeSet<i64>>,
    pub min_visibility: Option<f64>,
    /// Map frame `k0` to step 0. Otherwise frame `f` is step `f`.
    pub time_rebase: bool,
}

impl Filter {
    fn k0(&self) -> i64 {
        self.window.map_or(1, |w| w.0)
    }
}

/// Trajectories built from MOT records, with their external ids.
#[derive(Debug, Clone, PartialEq)]
pub struct MotScene {
    pub set: TrajectorySet<BoundingBox>,
    /// External id of every trajectory, in set order.
    pub ids: Vec<i64>,
    /// Frame number of step 0.
    pub frame_offset: i64,
}

/// Groups records into trajectories, ordered by id. Records with id −1 become
/// one single-instance trajectory each, placed after all identified
/// trajectories in frame order.
/// `last_frame` extends the horizon (e.g. to match the ground truth) when no
/// window is given.
pub fn to_trajectories(records: &[MotRecord], filter: &Filter, last_frame: Option<i64>) -> Result<MotScene> {
    if let Some((k0, kf)) = filter.window {
        if k0 > kf {
            return Err(Error::Domain(format!("window start {k0} is after its end {kf}")));
        }
        if k0 < 1 {
            return Err(Error::Domain(format!("window start must be a frame number >= 1, got {k0}")));
        }
    }
    let offset = if filter.time_rebase { filter.k0() } else { 0 };
    let kept: Vec<&MotRecord> = records
        .iter()
        .filter(|r| filter.window.map_or(true, |(a, b)| (a..=b).contains(&r.frame)))
        .filter(|r| filter.keep_ids.as_ref().map_or(true, |ids| ids.contains(&r.id)))
        .filter(|r| filter.min_visibility.map_or(true, |v| r.visibility >= v))
        .collect();

    let mut seen = HashSet::new();
    let mut tracks: BTreeMap<i64, Vec<(usize, BoundingBox)>> = BTreeMap::new();
    let mut detections = Vec::new();
    for r in &kept {
        if r.frame < offset {
            return Err(Error::Domain(format!("frame {} precedes the first step {offset}", r.frame)));
        }
        let step = (r.frame - offset) as usize;
        let bbox = BoundingBox::new(r.left, r.top, r.width, r.height)?;
        if r.id == DETECTION_ID {
            detections.push(Trajectory::single(step, vec![bbox])?);
        } else {
            if !seen.insert((r.frame, r.id)) {
                return Err(Error::DuplicateRecord { frame: r.frame, id: r.id });
            }
            tracks.entry(r.id).or_default().push((step, bbox));
        }
    }

    let last = match filter.window {
        Some((_, kf)) => kf,
        None => kept
            .iter()
            .map(|r| r.frame)
            .chain(last_frame)
            .max()
            .unwrap_or(offset.max(1)),
    };
    let horizon = (last - offset).max(0) as usize;

    let mut ids = Vec::with_capacity(tracks.len() + detections.len());
    let mut trajectories = Vec::with_capacity(tracks.len() + detections.len());
    for (id, instances) in tracks {
        ids.push(id);
        trajectories.push(Trajectory::from_instances(instances)?);
    }
    // Detections in frame order, file order within a frame.
    detections.sort_by_key(|t| t.start());
    ids.extend(std::iter::repeat(DETECTION_ID).take(detections.len()));
    trajectories.extend(detections);
    Ok(MotScene {
        set: TrajectorySet::new(trajectories, horizon)?,
        ids,
        frame_offset: offset,
    })
}

/// Writes a scene back in MOTChallenge format, sorted by frame then id.
pub fn write_mot(scene: &MotScene) -> String {
    let mut rows: Vec<(i64, i64, &BoundingBox)> = Vec::new();
    for (traj, id) in scene.set.trajectories().iter().zip(&scene.ids) {
        for (k, b) in traj.iter() {
            rows.push((k as i64 + scene.frame_offset, *id, b));
        }
    }
    rows.sort_by_key(|(f, id, _)| (*f, *id));
    let mut out = String::new();
    for (frame, id, b) in rows {
        let _ = writeln!(out, "{frame},{id},{},{},{},{},1,1,1", b.left(), b.top(), b.width(), b.height());
    }
    out
}

/// Competition ranking (1, 2, 2, 4) with ties within [`RANK_TOL`].
pub fn competition_ranks(values: &[f64], descending: bool) -> Vec<usize> {
    values
        .iter()
        .map(|v| {
            1 + values
                .iter()
                .filter(|w| if descending { **w > v + RANK_TOL } else { **w < v - RANK_TOL })
                .count()
        })
        .collect()
}

/// One evaluated tracker, laid out like a results table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub tracker: String,
    pub total: f64,
    pub loc_cost: f64,
    pub miss_cost: f64,
    pub false_cost: f64,
    pub switch_cost: f64,
    pub n_proper: f64,
    pub n_missed: f64,
    pub n_false: f64,
    pub n_switches: f64,
    pub p_avg_loc: f64,
    pub rank: usize,
    pub solver: Solver,
    /// False when the LP optimum was fractional and the numbers are a lower
    /// bound of a soft assignment.
    pub is_hard: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub params: TgospaParams,
    pub metric: String,
    pub rows: Vec<ReportRow>,
}

impl EvalReport {
    /// Builds rows in input order and ranks them by ascending total.
    pub fn new(params: TgospaParams, metric: impl Into<String>, results: Vec<(String, TgospaResult)>) -> Self {
        let totals: Vec<f64> = results.iter().map(|(_, r)| r.total).collect();
        let ranks = competition_ranks(&totals, false);
        let rows = results
            .into_iter()
            .zip(ranks)
            .map(|((tracker, r), rank)| ReportRow {
                tracker,
                total: r.total,
                loc_cost: r.loc_cost,
                miss_cost: r.miss_cost,
                false_cost: r.false_cost,
                switch_cost: r.switch_cost,
                n_proper: r.n_proper,
                n_missed: r.n_missed,
                n_false: r.n_false,
                n_switches: r.n_switches,
                p_avg_loc: r.p_avg_loc,
                rank,
                solver: r.solver,
                is_hard: r.is_hard,
            })
            .collect();
        Self {
            params,
            metric: metric.into(),
            rows,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "table" | "pretty-table" => Ok(Format::Table),
            _ => Err(Error::Domain(format!("unknown output format {s:?} (json, csv, table)"))),
        }
    }
}

/// Plain rows of strings, written as CSV or an aligned table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 input")
    }

    /// Left-aligned first column, right-aligned numbers.
    pub fn to_text(&self) -> String {
        let cols = self.header.len();
        let mut width = vec![0; cols];
        for row in std::iter::once(&self.header).chain(&self.rows) {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        for row in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = row
                .iter()
                .zip(&width)
                .enumerate()
                .map(|(i, (cell, w))| if i == 0 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
        out
    }
}

/// Column order of tabular reports.
pub const REPORT_COLUMNS: [&str; 14] = [
    "tracker",
    "total",
    "loc_cost",
    "miss_cost",
    "false_cost",
    "switch_cost",
    "n_proper",
    "n_missed",
    "n_false",
    "n_switches",
    "p_avg_loc",
    "rank",
    "solver",
    "is_hard",
];

fn report_table(report: &EvalReport, digits: Option<usize>) -> Table {
    let num = |v: f64| match digits {
        Some(d) => format!("{v:.d$}"),
        None => v.to_string(),
    };
    Table {
        header: REPORT_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows: report
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.tracker.clone(),
                    num(r.total),
                    num(r.loc_cost),
                    num(r.miss_cost),
                    num(r.false_cost),
                    num(r.switch_cost),
                    num(r.n_proper),
                    num(r.n_missed),
                    num(r.n_false),
                    num(r.n_switches),
                    num(r.p_avg_loc),
                    r.rank.to_string(),
                    r.solver.to_string(),
                    r.is_hard.to_string(),
                ]
            })
            .collect(),
    }
}

/// Serialises a report. JSON and CSV keep full precision; the text table
/// rounds to four decimals.
pub fn write_report(report: &EvalReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report is serialisable");
            s.push('\n');
            s
        }
        Format::Csv => report_table(report, None).to_csv(),
        Format::Table => report_table(report, Some(4)).to_text(),
    }
}
