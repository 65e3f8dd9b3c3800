//! CSV emission and parsing for run outputs.
//!
//! Every float is written with 17 significant digits, which is lossless for
//! `f64`; parsing a file therefore recovers the emitted values bit for bit.
//! Files are comma separated with LF line endings and a fixed header.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{Mode, TracerSample, TracerTrack};
use crate::integrator::RunSink;
use crate::params::{DiagnosticsRow, FieldState, Grid};

pub const SNAPSHOT_HEADER: &str = "t,x,u,v";
pub const DIAGNOSTICS_HEADER: &str = "t,energy,momentum,energy_drift,u_min_left,u_max_left,\
u_min_right,u_max_right,rot_origin,rot_left,rot_right";
pub const TRACER_HEADER: &str = "probe_x,t,u,v";
pub const SWEEP_HEADER: &str = "A,label,m_left,m_right,rot_left,rot_origin,max_drift";

/// `x` with 17 significant digits in exponent notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn malformed(file: &str, line: usize, message: impl std::fmt::Display) -> Error {
    Error::Malformed {
        file: file.to_string(),
        message: format!("line {line}: {message}"),
    }
}

/// Splits a CSV body into numeric records after checking the header.
fn numeric_records(text: &str, file: &str, header: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header => {}
        Some(h) => return Err(malformed(file, 1, format!("unexpected header {h:?}"))),
        None => return Err(malformed(file, 1, "empty file")),
    }
    let width = header.split(',').count();
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let fields: Vec<&str> = l.split(',').collect();
            if fields.len() != width {
                return Err(malformed(file, i + 2, format!("expected {width} fields")));
            }
            fields
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| malformed(file, i + 2, format!("{f:?}: {e}")))
                })
                .collect()
        })
        .collect()
}

pub fn write_snapshot(out: &mut String, state: &FieldState, grid: &Grid) {
    let t = fmt_num(state.t);
    for ((x, u), v) in grid.nodes().iter().zip(&state.u).zip(&state.v) {
        let _ = writeln!(out, "{t},{},{},{}", fmt_num(*x), fmt_num(*u), fmt_num(*v));
    }
}

pub fn write_diagnostics_row(out: &mut String, r: &DiagnosticsRow) {
    let fields = [
        r.t,
        r.energy,
        r.momentum,
        r.energy_drift,
        r.u_min_left,
        r.u_max_left,
        r.u_min_right,
        r.u_max_right,
        r.rot_origin,
        r.rot_left,
        r.rot_right,
    ];
    let line = fields
        .iter()
        .map(|&x| fmt_num(x))
        .collect::<Vec<_>>()
        .join(",");
    out.push_str(&line);
    out.push('\n');
}

pub fn tracers_csv(tracks: &[TracerTrack]) -> String {
    let mut out = format!("{TRACER_HEADER}\n");
    for track in tracks {
        let x = fmt_num(track.probe_x);
        for s in &track.samples {
            let _ = writeln!(
                out,
                "{x},{},{},{}",
                fmt_num(s.t),
                fmt_num(s.u),
                fmt_num(s.v)
            );
        }
    }
    out
}

/// Snapshots in file order, with the node coordinates of the first one.
pub fn read_snapshots(text: &str) -> Result<(Vec<f64>, Vec<FieldState>)> {
    let records = numeric_records(text, "snapshots.csv", SNAPSHOT_HEADER)?;
    let mut states: Vec<FieldState> = Vec::new();
    let mut nodes: Vec<f64> = Vec::new();
    for r in records {
        let (t, x, u, v) = (r[0], r[1], r[2], r[3]);
        match states.last_mut() {
            Some(s) if s.t.to_bits() == t.to_bits() => {
                s.u.push(u);
                s.v.push(v);
            }
            _ => states.push(FieldState {
                t,
                u: vec![u],
                v: vec![v],
            }),
        }
        if states.len() == 1 {
            nodes.push(x);
        }
    }
    if let Some(bad) = states.iter().find(|s| s.u.len() != nodes.len()) {
        return Err(malformed(
            "snapshots.csv",
            0,
            format!(
                "snapshot at t = {} has {} nodes, expected {}",
                bad.t,
                bad.u.len(),
                nodes.len()
            ),
        ));
    }
    Ok((nodes, states))
}

pub fn read_diagnostics(text: &str) -> Result<Vec<DiagnosticsRow>> {
    Ok(
        numeric_records(text, "diagnostics.csv", DIAGNOSTICS_HEADER)?
            .into_iter()
            .map(|r| DiagnosticsRow {
                t: r[0],
                energy: r[1],
                momentum: r[2],
                energy_drift: r[3],
                u_min_left: r[4],
                u_max_left: r[5],
                u_min_right: r[6],
                u_max_right: r[7],
                rot_origin: r[8],
                rot_left: r[9],
                rot_right: r[10],
            })
            .collect(),
    )
}

/// Tracks in order of first appearance of each probe.
pub fn read_tracers(text: &str) -> Result<Vec<TracerTrack>> {
    let mut tracks: Vec<TracerTrack> = Vec::new();
    for r in numeric_records(text, "tracers.csv", TRACER_HEADER)? {
        let sample = TracerSample {
            t: r[1],
            u: r[2],
            v: r[3],
        };
        let idx = match tracks
            .iter()
            .position(|tr| tr.probe_x.to_bits() == r[0].to_bits())
        {
            Some(i) => i,
            None => {
                tracks.push(TracerTrack::new(r[0]));
                tracks.len() - 1
            }
        };
        tracks[idx].try_push(sample)?;
    }
    Ok(tracks)
}

/// One line of `sweep.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub amplitude: f64,
    pub mode: Mode,
    pub m_left: f64,
    pub m_right: f64,
    pub rot_left: f64,
    pub rot_origin: f64,
    pub max_drift: f64,
    /// Failure description when the run did not complete; not written to CSV.
    pub note: Option<String>,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_num(r.amplitude),
            r.mode.as_str(),
            fmt_num(r.m_left),
            fmt_num(r.m_right),
            fmt_num(r.rot_left),
            fmt_num(r.rot_origin),
            fmt_num(r.max_drift)
        );
    }
    out
}

pub fn read_sweep(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(SWEEP_HEADER) {
        return Err(malformed("sweep.csv", 1, "unexpected header"));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 7 {
                return Err(malformed("sweep.csv", i + 2, "expected 7 fields"));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| malformed("sweep.csv", i + 2, e))
            };
            Ok(SweepRow {
                amplitude: num(f[0])?,
                mode: f[1].parse()?,
                m_left: num(f[2])?,
                m_right: num(f[3])?,
                rot_left: num(f[4])?,
                rot_origin: num(f[5])?,
                max_drift: num(f[6])?,
                note: None,
            })
        })
        .collect()
}

/// Run sink that renders CSV bodies in memory and keeps the diagnostics
/// rows and tracer tracks for classification.
#[derive(Debug)]
pub struct CsvRecorder {
    grid: Grid,
    pub snapshots: String,
    pub diagnostics: String,
    pub rows: Vec<DiagnosticsRow>,
    pub tracks: Vec<TracerTrack>,
}

impl CsvRecorder {
    pub fn new(grid: &Grid, probes: &[f64]) -> Self {
        CsvRecorder {
            grid: grid.clone(),
            snapshots: format!("{SNAPSHOT_HEADER}\n"),
            diagnostics: format!("{DIAGNOSTICS_HEADER}\n"),
            rows: Vec::new(),
            tracks: probes.iter().map(|&x| TracerTrack::new(x)).collect(),
        }
    }

    pub fn tracers(&self) -> String {
        tracers_csv(&self.tracks)
    }
}

impl RunSink for CsvRecorder {
    fn snapshot(&mut self, state: &FieldState) {
        write_snapshot(&mut self.snapshots, state, &self.grid);
    }

    fn diagnostics(&mut self, row: &DiagnosticsRow) {
        write_diagnostics_row(&mut self.diagnostics, row);
        self.rows.push(*row);
    }

    fn tracer(&mut self, index: usize, sample: &TracerSample) {
        if let Some(track) = self.tracks.get_mut(index) {
            track.push(*sample);
        }
    }
}
