//! The simulate / sweep / classify / plot operations behind the CLI.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use crate::dynamics::fixed_points;
use crate::error::{Error, Result};
use crate::geometry::{classify_mode, phase_loop, Mode, ModeLabel, TracerTrack};
use crate::integrator::{integrate, RunSummary};
use crate::io::config::{parse_config, render_config};
use crate::io::manifest::{digest_file, write_atomic, GridInfo, RunManifest, RunStatus};
use crate::io::records::{
    read_diagnostics, read_snapshots, read_tracers, sweep_csv, CsvRecorder, SweepRow,
};
use crate::io::svg::{phase_svg, waveform_svg};
use crate::params::{energy_drift, SimParams};

pub const SNAPSHOTS_FILE: &str = "snapshots.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const TRACERS_FILE: &str = "tracers.csv";
pub const SWEEP_FILE: &str = "sweep.csv";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::Usage(_) | Error::Parse { .. } | Error::Validation(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Reads and validates a configuration file; `None` means all defaults.
pub fn load_params(config: Option<&Path>) -> Result<SimParams> {
    match config {
        Some(path) => parse_config(&fs::read_to_string(path)?),
        None => SimParams::default().validated(),
    }
}

fn unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Result of [`simulate`]. `failure` is set when the integrator aborted; the
/// partial outputs are still on disk.
#[derive(Debug)]
pub struct SimulateOutcome {
    pub manifest: RunManifest,
    pub summary: Option<RunSummary>,
    pub label: Option<ModeLabel>,
    pub tracks: Vec<TracerTrack>,
    pub failure: Option<Error>,
}

/// Runs one simulation and writes its CSVs and manifest into `out_dir`.
/// Only I/O problems and invalid parameters are returned as errors.
pub fn simulate(params: &SimParams, out_dir: &Path) -> Result<SimulateOutcome> {
    let params = params.clone().validated()?;
    let grid = params.grid()?;
    fs::create_dir_all(out_dir)?;
    let started = unix_ms();

    let mut rec = CsvRecorder::new(&grid, &params.probes);
    let result = integrate(&params, &mut rec);

    write_atomic(out_dir, SNAPSHOTS_FILE, rec.snapshots.as_bytes())?;
    write_atomic(out_dir, DIAGNOSTICS_FILE, rec.diagnostics.as_bytes())?;
    write_atomic(out_dir, TRACERS_FILE, rec.tracers().as_bytes())?;

    let (summary, failure) = match result {
        Ok(s) => (Some(s), None),
        Err(e) => (None, Some(e)),
    };
    let label = match &summary {
        Some(_) => classify_mode(&rec.tracks, &rec.rows, &params).ok(),
        None => None,
    };
    let (max_drift, max_residual) = match &summary {
        Some(s) => (s.max_abs_drift, s.max_residual),
        None => {
            let e0 = rec.rows.first().map_or(0.0, |r| r.energy);
            let drift = rec
                .rows
                .iter()
                .map(|r| energy_drift(r.energy, e0).abs())
                .fold(0.0, f64::max);
            (drift, f64::NAN)
        }
    };
    let files = [SNAPSHOTS_FILE, DIAGNOSTICS_FILE, TRACERS_FILE]
        .iter()
        .map(|name| digest_file(out_dir, name))
        .collect::<Result<Vec<_>>>()?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: render_config(&params),
        params: params.clone(),
        grid: GridInfo::from(&grid),
        started_unix_ms: started,
        finished_unix_ms: unix_ms(),
        status: if failure.is_some() {
            RunStatus::Failed
        } else {
            RunStatus::Completed
        },
        failure: failure.as_ref().map(ToString::to_string),
        max_energy_drift: max_drift,
        max_stage_residual: if max_residual.is_finite() {
            max_residual
        } else {
            -1.0
        },
        label: label.map(|l| l.mode.as_str().to_string()),
        files,
    };
    manifest.write(out_dir)?;
    Ok(SimulateOutcome {
        manifest,
        summary,
        label,
        tracks: rec.tracks,
        failure,
    })
}

/// Re-derives the mode label of a finished run from its files.
pub fn classify_dir(dir: &Path) -> Result<ModeLabel> {
    let manifest = RunManifest::read(dir)?;
    let rows = read_diagnostics(&fs::read_to_string(dir.join(DIAGNOSTICS_FILE))?)?;
    let tracks = read_tracers(&fs::read_to_string(dir.join(TRACERS_FILE))?)?;
    classify_mode(&tracks, &rows, &manifest.params)
}

pub fn classification_report(label: &ModeLabel) -> String {
    let e = &label.evidence;
    format!(
        "label: {}\n\
         m_left (min u, 0 < x < L/2, t >= {t}): {:.6e}\n\
         m_right (max u, L/2 < x < L, t >= {t}): {:.6e}\n\
         turns of first tracer about (+sqrt(mu/beta), 0): {:.6}\n\
         turns of first tracer about (0, 0): {:.6}\n\
         threshold: {} full turn(s)\n",
        label.mode.as_str(),
        e.m_left,
        e.m_right,
        e.rot_plus,
        e.rot_origin,
        e.min_turns,
        t = e.t_skip,
    )
}

fn amplitude_dir(out: &Path, a: f64) -> PathBuf {
    out.join(format!("A_{a}"))
}

/// Runs and classifies one simulation per amplitude, concurrently, each in
/// its own subdirectory, and writes `sweep.csv`.
pub fn sweep(base: &SimParams, amplitudes: &[f64], out_dir: &Path) -> Result<Vec<SweepRow>> {
    if amplitudes.is_empty() {
        return Err(Error::Usage("amplitude list is empty".into()));
    }
    if !amplitudes.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Usage(
            "amplitudes must be strictly increasing".into(),
        ));
    }
    fs::create_dir_all(out_dir)?;
    let rows: Vec<SweepRow> = amplitudes
        .par_iter()
        .map(|&a| {
            let params = SimParams {
                amplitude: a,
                ..base.clone()
            };
            let failed = |note: String| SweepRow {
                amplitude: a,
                mode: Mode::Indeterminate,
                m_left: f64::NAN,
                m_right: f64::NAN,
                rot_left: f64::NAN,
                rot_origin: f64::NAN,
                max_drift: f64::NAN,
                note: Some(note),
            };
            match simulate(&params, &amplitude_dir(out_dir, a)) {
                Ok(outcome) => match (outcome.failure, outcome.label) {
                    (None, Some(label)) => SweepRow {
                        amplitude: a,
                        mode: label.mode,
                        m_left: label.evidence.m_left,
                        m_right: label.evidence.m_right,
                        rot_left: label.evidence.rot_plus,
                        rot_origin: label.evidence.rot_origin,
                        max_drift: outcome.manifest.max_energy_drift,
                        note: None,
                    },
                    (None, None) => {
                        let mut row = failed("insufficient data to classify".into());
                        row.max_drift = outcome.manifest.max_energy_drift;
                        row
                    }
                    (Some(e), _) => failed(e.to_string()),
                },
                Err(e) => failed(e.to_string()),
            }
        })
        .collect();
    write_atomic(out_dir, SWEEP_FILE, sweep_csv(&rows).as_bytes())?;
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Waveform,
    Phase,
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Renders SVGs for the selected snapshot times (all snapshots when `times`
/// is empty) into `out_dir`, returning the written paths.
pub fn plot(run_dir: &Path, kind: PlotKind, times: &[f64], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let manifest = RunManifest::read(run_dir)?;
    let params = &manifest.params;
    let (nodes, states) = read_snapshots(&fs::read_to_string(run_dir.join(SNAPSHOTS_FILE))?)?;
    let selected: Vec<usize> = if times.is_empty() {
        (0..states.len()).collect()
    } else {
        times
            .iter()
            .map(|&t| {
                states
                    .iter()
                    .position(|s| same_time(s.t, t))
                    .ok_or(Error::MissingSnapshot(t))
            })
            .collect::<Result<_>>()?
    };
    let tracks = match kind {
        PlotKind::Phase => read_tracers(&fs::read_to_string(run_dir.join(TRACERS_FILE))?)?,
        PlotKind::Waveform => Vec::new(),
    };
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for idx in selected {
        let state = &states[idx];
        let (name, body) = match kind {
            PlotKind::Waveform => {
                let prev_t = state.t - params.snapshot_every;
                let previous = states
                    .iter()
                    .find(|s| same_time(s.t, prev_t))
                    .map(|s| (s.t, s.u.as_slice()));
                (
                    format!("waveform_t{}.svg", state.t),
                    waveform_svg(state.t, &nodes, params.domain_length, &state.u, previous),
                )
            }
            PlotKind::Phase => {
                let fp = fixed_points(params)?;
                let lp = phase_loop(state)?;
                let trails: Vec<TracerTrack> = tracks
                    .iter()
                    .map(|tr| TracerTrack {
                        probe_x: tr.probe_x,
                        samples: tr
                            .samples
                            .iter()
                            .copied()
                            .filter(|s| s.t <= state.t)
                            .collect(),
                    })
                    .collect();
                (
                    format!("phase_t{}.svg", state.t),
                    phase_svg(&lp, &[fp.origin, fp.plus, fp.minus], &trails),
                )
            }
        };
        write_atomic(out_dir, &name, body.as_bytes())?;
        written.push(out_dir.join(name));
    }
    Ok(written)
}
