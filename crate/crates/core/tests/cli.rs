//! End-to-end tests of the `kg-breather` binary and the command layer.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::OnceLock;

use kg_breather::dynamics::fixed_points;
use kg_breather::geometry::{cumulative_rotation, phase_loop, Mode, TracerSample, TracerTrack};
use kg_breather::io::commands::{self, PlotKind};
use kg_breather::io::config::render_config;
use kg_breather::io::manifest::{digest_file, GridInfo, RunManifest, RunStatus};
use kg_breather::io::records::{
    read_diagnostics, read_snapshots, read_sweep, read_tracers, tracers_csv, write_diagnostics_row,
    DIAGNOSTICS_HEADER,
};
use kg_breather::params::{half_domain_extrema, DiagnosticsRow, SimParams};
use tempfile::TempDir;

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kg-breather"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn data_rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

/// One default run shared by the read-only tests.
fn default_run() -> &'static Path {
    static RUN: OnceLock<TempDir> = OnceLock::new();
    RUN.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let out = bin(&["simulate", "--out", "run"], dir.path());
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        dir
    })
    .path()
    .join("run")
    .leak()
}

#[test]
fn default_run_writes_expected_rows() {
    let run = default_run();
    assert_eq!(data_rows(&run.join("diagnostics.csv")), 129);
    assert_eq!(data_rows(&run.join("snapshots.csv")), 129 * 128);
    assert_eq!(data_rows(&run.join("tracers.csv")), 2 * 129);
    let header = fs::read_to_string(run.join("diagnostics.csv")).unwrap();
    assert_eq!(header.lines().next().unwrap(), DIAGNOSTICS_HEADER);
    assert!(!header.contains('\r'));
}

#[test]
fn default_run_conserves_energy() {
    let run = default_run();
    let rows = read_diagnostics(&fs::read_to_string(run.join("diagnostics.csv")).unwrap()).unwrap();
    assert!(rows.last().unwrap().energy_drift.abs() <= 1e-8);
    let m = RunManifest::read(run).unwrap();
    assert_eq!(m.status, RunStatus::Completed);
    assert!(m.max_energy_drift <= 1e-8);
    assert!(m.max_stage_residual <= 1e-13);
    assert_eq!(m.params, SimParams::default());
    assert!(m.verify(run).is_empty());
}

#[test]
fn classify_from_files_matches_in_process_label() {
    let run = default_run();
    let m = RunManifest::read(run).unwrap();
    let label = commands::classify_dir(run).unwrap();
    assert_eq!(m.label.as_deref(), Some(label.mode.as_str()));
    let tmp = tempfile::tempdir().unwrap();
    let out = bin(&["classify", run.to_str().unwrap()], tmp.path());
    assert_eq!(code(&out), 0);
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.starts_with(&format!("label: {}", label.mode.as_str())));
    assert!(report.contains("m_left") && report.contains("m_right"));
}

#[test]
fn default_run_is_labeled_breather() {
    let label = commands::classify_dir(default_run()).unwrap();
    assert_eq!(label.mode, Mode::Breather, "evidence {:?}", label.evidence);
}

#[test]
fn default_tracer_turns_about_positive_vacuum() {
    let run = default_run();
    let tracks = read_tracers(&fs::read_to_string(run.join("tracers.csv")).unwrap()).unwrap();
    let fp = fixed_points(&SimParams::default()).unwrap();
    let about_vacuum = cumulative_rotation(&tracks[0], fp.plus).unwrap();
    let about_origin = cumulative_rotation(&tracks[0], fp.origin).unwrap();
    assert!(
        about_vacuum.abs() >= 1.0 && about_origin.abs() < about_vacuum.abs(),
        "turns about vacuum {about_vacuum}, about origin {about_origin}"
    );
}

#[test]
fn zero_length_run_holds_initial_state_only() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "t_end = 0\n");
    let out = bin(&["simulate", "--config", &cfg, "--out", "z"], tmp.path());
    assert_eq!(code(&out), 0);
    let z = tmp.path().join("z");
    assert_eq!(data_rows(&z.join("snapshots.csv")), 128);
    assert_eq!(data_rows(&z.join("diagnostics.csv")), 1);
    let (_, states) =
        read_snapshots(&fs::read_to_string(z.join("snapshots.csv")).unwrap()).unwrap();
    assert_eq!(states[0].t, 0.0);
    assert!(states[0].v.iter().all(|&v| v == 0.0));
    // too short to classify
    let out = bin(&["classify", "z"], tmp.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_and_validation_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "dt = -1\n");
    let out = bin(&["simulate", "--config", &cfg, "--out", "x"], tmp.path());
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dt"));
    let cfg = write_config(tmp.path(), "colour = blue\n");
    assert_eq!(code(&bin(&["simulate", "--config", &cfg], tmp.path())), 1);
    assert_eq!(code(&bin(&["frobnicate"], tmp.path())), 1);
    assert_eq!(code(&bin(&["plot", "--kind", "histogram"], tmp.path())), 1);
}

#[test]
fn io_errors_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("blocker"), "not a directory").unwrap();
    let cfg = write_config(tmp.path(), "t_end = 0\n");
    let out = bin(
        &["simulate", "--config", &cfg, "--out", "blocker/run"],
        tmp.path(),
    );
    assert_eq!(code(&out), 3);
    assert_eq!(
        code(&bin(&["simulate", "--config", "missing.cfg"], tmp.path())),
        3
    );
    assert_eq!(code(&bin(&["classify", "nowhere"], tmp.path())), 3);
}

#[test]
fn integrator_abort_keeps_partial_outputs() {
    // the literal sign makes short waves grow until the capped stage solve
    // can no longer converge
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "laplacian_sign = as_written\nstage_max_iter = 6\nt_end = 256\n",
    );
    let out = bin(&["simulate", "--config", &cfg, "--out", "bad"], tmp.path());
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    let bad = tmp.path().join("bad");
    let m = RunManifest::read(&bad).unwrap();
    assert_eq!(m.status, RunStatus::Failed);
    assert!(m.failure.is_some());
    assert!(m.verify(&bad).is_empty());
    let rows = data_rows(&bad.join("diagnostics.csv"));
    assert!((1..17).contains(&rows), "{rows} rows");
}

#[test]
fn rerun_from_manifest_is_byte_identical() {
    let run = default_run();
    let tmp = tempfile::tempdir().unwrap();
    let manifest = run.join("manifest.json");
    let out = bin(
        &[
            "simulate",
            "--from-manifest",
            manifest.to_str().unwrap(),
            "--out",
            "again",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    for name in ["snapshots.csv", "diagnostics.csv", "tracers.csv"] {
        assert_eq!(
            fs::read(run.join(name)).unwrap(),
            fs::read(tmp.path().join("again").join(name)).unwrap(),
            "{name}"
        );
    }
    // the embedded config reproduces the same parameters
    let m = RunManifest::read(run).unwrap();
    let cfg = write_config(tmp.path(), &m.config);
    let out = bin(&["simulate", "--config", &cfg, "--out", "cfg"], tmp.path());
    assert_eq!(code(&out), 0);
    assert_eq!(
        fs::read(run.join("snapshots.csv")).unwrap(),
        fs::read(tmp.path().join("cfg/snapshots.csv")).unwrap()
    );
}

/// A run directory whose data follow `u = a sin(kx) cos(wt)`, an exact
/// solution of the cubic-free equation, so the x = 2 tracer circles the origin.
fn synthetic_linear_run(dir: &Path) {
    let params = SimParams::default();
    let grid = params.grid().unwrap();
    let (a, k, w) = (0.04, PI / 4.0, 2.0 * PI / 100.0);
    let mut diag = format!("{DIAGNOSTICS_HEADER}\n");
    let mut track = TracerTrack::new(2.0);
    let mut i = 0.0;
    while i * params.snapshot_every <= params.t_end {
        let t = i * params.snapshot_every;
        let u: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| a * (k * x).sin() * (w * t).cos())
            .collect();
        let (u_min_left, u_max_left, u_min_right, u_max_right) = half_domain_extrema(&u, &grid);
        write_diagnostics_row(
            &mut diag,
            &DiagnosticsRow {
                t,
                energy: 0.0,
                momentum: 0.0,
                energy_drift: 0.0,
                u_min_left,
                u_max_left,
                u_min_right,
                u_max_right,
                rot_origin: 0.0,
                rot_left: 0.0,
                rot_right: 0.0,
            },
        );
        track
            .try_push(TracerSample {
                t,
                u: a * (w * t).cos(),
                v: -a * w * (w * t).sin(),
            })
            .unwrap();
        i += 1.0;
    }
    fs::create_dir_all(dir).unwrap();
    fs::write(dir.join("diagnostics.csv"), diag).unwrap();
    fs::write(dir.join("tracers.csv"), tracers_csv(&[track])).unwrap();
    let manifest = RunManifest {
        tool: "kg-breather".into(),
        version: "test".into(),
        config: render_config(&params),
        grid: GridInfo::from(&grid),
        params,
        started_unix_ms: 0,
        finished_unix_ms: 0,
        status: RunStatus::Completed,
        failure: None,
        max_energy_drift: 0.0,
        max_stage_residual: 0.0,
        label: None,
        files: vec![
            digest_file(dir, "diagnostics.csv").unwrap(),
            digest_file(dir, "tracers.csv").unwrap(),
        ],
    };
    manifest.write(dir).unwrap();
}

#[test]
fn origin_circling_run_is_ordinary() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("linear");
    synthetic_linear_run(&dir);
    let label = commands::classify_dir(&dir).unwrap();
    assert_eq!(label.mode, Mode::Ordinary);
    assert!(label.evidence.m_left < 0.0);
    assert!(label.evidence.rot_origin.abs() >= 20.0);
    let out = bin(&["classify", "linear"], tmp.path());
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("label: ordinary"));
}

#[test]
fn truncated_diagnostics_are_insufficient() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("cut");
    synthetic_linear_run(&dir);
    let text = fs::read_to_string(dir.join("diagnostics.csv")).unwrap();
    let first_two: Vec<&str> = text.lines().take(2).collect();
    fs::write(dir.join("diagnostics.csv"), first_two.join("\n") + "\n").unwrap();
    assert!(matches!(
        commands::classify_dir(&dir),
        Err(kg_breather::Error::InsufficientData(_))
    ));
    assert_eq!(code(&bin(&["classify", "cut"], tmp.path())), 2);
}

#[test]
fn manifest_detects_mutation() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("m");
    synthetic_linear_run(&dir);
    let m = RunManifest::read(&dir).unwrap();
    assert!(m.verify(&dir).is_empty());
    let mut bytes = fs::read(dir.join("tracers.csv")).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x20;
    fs::write(dir.join("tracers.csv"), bytes).unwrap();
    assert_eq!(m.verify(&dir), vec!["tracers.csv".to_string()]);
}

#[test]
fn waveform_plot_has_previous_snapshot_companion() {
    let run = default_run();
    let tmp = tempfile::tempdir().unwrap();
    let out = bin(
        &[
            "plot",
            run.to_str().unwrap(),
            "--kind",
            "waveform",
            "--times",
            "16",
            "--out",
            "p",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let svg = fs::read_to_string(tmp.path().join("p/waveform_t16.svg")).unwrap();
    assert!(svg.contains("class=\"previous\" data-t=\"0\""));
    assert!(svg.contains("class=\"current\" data-t=\"16\""));
    // the first snapshot has no companion
    commands::plot(run, PlotKind::Waveform, &[0.0], &tmp.path().join("q")).unwrap();
    let svg = fs::read_to_string(tmp.path().join("q/waveform_t0.svg")).unwrap();
    assert!(!svg.contains("class=\"previous\""));
}

#[test]
fn phase_plots_follow_the_run() {
    let run = default_run();
    let tmp = tempfile::tempdir().unwrap();
    let written = commands::plot(run, PlotKind::Phase, &[0.0, 2048.0], tmp.path()).unwrap();
    assert_eq!(written.len(), 2);
    let first = fs::read_to_string(&written[0]).unwrap();
    assert_eq!(first.matches("class=\"fixed-point\"").count(), 3);
    assert!(first.contains("<polygon class=\"loop\""));
    assert_eq!(first.matches("<g class=\"trail\"").count(), 2);

    let (_, states) =
        read_snapshots(&fs::read_to_string(run.join("snapshots.csv")).unwrap()).unwrap();
    // t = 0: a segment on the u-axis spanning [-A, A]
    let (u0, u1, v0, v1) = phase_loop(&states[0]).unwrap().bounds();
    assert!((u0 + 0.04).abs() < 1e-15 && (u1 - 0.04).abs() < 1e-15);
    assert_eq!((v0, v1), (0.0, 0.0));
    // late: the loop straddles u = 0 while the x = 2 tracer stays positive
    let (u0, u1, _, _) = phase_loop(states.last().unwrap()).unwrap().bounds();
    assert!(u0 < 0.0 && u1 > 0.0);
    let tracks = read_tracers(&fs::read_to_string(run.join("tracers.csv")).unwrap()).unwrap();
    assert!(tracks[0].samples.iter().all(|s| s.u > 0.0));

    let again =
        commands::plot(run, PlotKind::Phase, &[0.0, 2048.0], &tmp.path().join("b")).unwrap();
    for (a, b) in written.iter().zip(&again) {
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
    }
}

#[test]
fn plot_of_missing_time_fails() {
    let run = default_run();
    let tmp = tempfile::tempdir().unwrap();
    assert!(matches!(
        commands::plot(run, PlotKind::Waveform, &[5.0], tmp.path()),
        Err(kg_breather::Error::MissingSnapshot(t)) if t == 5.0
    ));
    let out = bin(
        &["plot", run.to_str().unwrap(), "--times", "5", "--out", "p"],
        tmp.path(),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn sweep_rejects_bad_amplitude_lists() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&bin(&["sweep", "--out", "s"], tmp.path())), 1);
    assert_eq!(
        code(&bin(
            &["sweep", "--amplitudes", "0.04,0.02", "--out", "s"],
            tmp.path()
        )),
        1
    );
    assert_eq!(
        code(&bin(
            &["sweep", "--amplitudes", "0.02,0.02", "--out", "s"],
            tmp.path()
        )),
        1
    );
}

#[test]
fn sweep_single_amplitude() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin(&["sweep", "--amplitudes", "0.04", "--out", "s"], tmp.path());
    assert_eq!(code(&out), 0);
    let rows = read_sweep(&fs::read_to_string(tmp.path().join("s/sweep.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].amplitude, 0.04);
    assert!(tmp.path().join("s/A_0.04/manifest.json").exists());
    assert_eq!(rows[0].mode, Mode::Breather, "{:?}", rows[0]);
}

#[test]
fn sweep_ladder_contains_breather_and_is_not_uniform() {
    let ladder: Vec<f64> = (0..13)
        .map(|i| 0.005 * 16f64.powf(i as f64 / 12.0))
        .collect();
    let tmp = tempfile::tempdir().unwrap();
    let base = SimParams::default();
    let rows = commands::sweep(&base, &ladder, tmp.path()).unwrap();
    assert_eq!(rows.len(), 13);
    assert!(rows.windows(2).all(|w| w[0].amplitude < w[1].amplitude));
    let on_disk = read_sweep(&fs::read_to_string(tmp.path().join("sweep.csv")).unwrap()).unwrap();
    assert_eq!(on_disk.len(), 13);
    assert!(
        rows.iter().any(|r| r.mode != rows[0].mode),
        "uniform labels"
    );
    assert!(
        rows.iter().any(|r| r.mode == Mode::Breather),
        "labels {:?}",
        rows.iter().map(|r| r.mode).collect::<Vec<_>>()
    );
}
