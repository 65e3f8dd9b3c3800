//! Run configuration, the periodic grid, and the state/record types shared
//! by every other module.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign convention for the dispersive `alpha * u_xx` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianSign {
    /// `u_tt = +alpha u_xx + mu u - beta u^3` (hyperbolic wave operator).
    StandardWave,
    /// `u_tt = -alpha u_xx + mu u - beta u^3`, the literal transcription of
    /// `u_tt + alpha u_xx + (beta u^2 - mu) u = 0`.
    AsWritten,
}

impl LaplacianSign {
    pub fn sigma(self) -> f64 {
        match self {
            LaplacianSign::StandardWave => 1.0,
            LaplacianSign::AsWritten => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LaplacianSign::StandardWave => "standard_wave",
            LaplacianSign::AsWritten => "as_written",
        }
    }
}

/// How the cubic term is evaluated on the collocation grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dealias {
    None,
    Pad2x,
}

impl Dealias {
    pub fn as_str(self) -> &'static str {
        match self {
            Dealias::None => "none",
            Dealias::Pad2x => "pad2x",
        }
    }
}

/// All coefficients and discretization controls of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub amplitude: f64,
    pub domain_length: f64,
    pub grid_points: usize,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_every: f64,
    pub laplacian_sign: LaplacianSign,
    pub dealias: Dealias,
    pub irk_stages: usize,
    pub stage_tol: f64,
    pub stage_max_iter: usize,
    pub probes: Vec<f64>,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            alpha: 1.0 / 256.0,
            beta: 1.0,
            mu: 0.00305,
            amplitude: 0.04,
            domain_length: 8.0,
            grid_points: 128,
            dt: 0.125,
            t_end: 2048.0,
            snapshot_every: 16.0,
            laplacian_sign: LaplacianSign::StandardWave,
            dealias: Dealias::Pad2x,
            irk_stages: 2,
            stage_tol: 1e-13,
            stage_max_iter: 100,
            probes: vec![2.0, 6.0],
        }
    }
}

/// A single failed rule from [`validate_params`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

const MULTIPLE_TOL: f64 = 1e-12;

/// Ratio `a / b` rounded to the nearest integer when it is one to within a
/// relative tolerance of 1e-12.
pub(crate) fn integer_ratio(a: f64, b: f64) -> Option<u64> {
    let r = a / b;
    if !r.is_finite() || r < 0.0 {
        return None;
    }
    let n = r.round();
    if (r - n).abs() <= MULTIPLE_TOL * n.max(1.0) {
        Some(n as u64)
    } else {
        None
    }
}

/// Checks every [`SimParams`] invariant and reports each failure. Never fails itself.
pub fn validate_params(p: &SimParams) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |field: &'static str, rule: &str| {
        out.push(Violation {
            field,
            rule: rule.to_string(),
        })
    };

    let positive = [
        ("alpha", p.alpha),
        ("beta", p.beta),
        ("mu", p.mu),
        ("domain_length", p.domain_length),
        ("dt", p.dt),
        ("stage_tol", p.stage_tol),
    ];
    for (name, value) in positive {
        if !(value.is_finite() && value > 0.0) {
            push(name, "must be finite and > 0");
        }
    }
    if !(p.amplitude.is_finite() && p.amplitude >= 0.0) {
        push("amplitude", "must be finite and >= 0");
    }
    if !(p.t_end.is_finite() && p.t_end >= 0.0) {
        push("t_end", "must be finite and >= 0");
    }
    if p.grid_points < 8 || !p.grid_points.is_multiple_of(2) {
        push("grid_points", "must be even and >= 8");
    }
    if !matches!(p.irk_stages, 1..=3) {
        push("irk_stages", "must be 1, 2 or 3");
    }
    if p.stage_max_iter == 0 {
        push("stage_max_iter", "must be >= 1");
    }

    let dt_ok = p.dt.is_finite() && p.dt > 0.0;
    if dt_ok {
        match integer_ratio(p.snapshot_every, p.dt) {
            Some(k) if k >= 1 => {}
            _ => push(
                "snapshot_every",
                "must be a positive integer multiple of dt",
            ),
        }
        if p.t_end.is_finite() && p.t_end >= 0.0 && integer_ratio(p.t_end, p.dt).is_none() {
            push("t_end", "must be an integer multiple of dt");
        }
    }

    let grid_ok = p.grid_points >= 8 && p.domain_length.is_finite() && p.domain_length > 0.0;
    for &x in &p.probes {
        if !(x.is_finite() && x >= 0.0 && (!grid_ok || x < p.domain_length)) {
            push("probes", &format!("probe {x} must satisfy 0 <= x < L"));
        } else if grid_ok && integer_ratio(x * p.grid_points as f64, p.domain_length).is_none() {
            push("probes", &format!("probe {x} not on grid node"));
        }
    }
    out
}

impl SimParams {
    /// Returns `self` if [`validate_params`] is empty.
    pub fn validated(self) -> Result<Self> {
        let violations = validate_params(&self);
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(Error::Validation(violations))
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid_points, self.domain_length)
    }

    /// Number of fixed steps from 0 to `t_end`.
    pub fn step_count(&self) -> u64 {
        integer_ratio(self.t_end, self.dt).unwrap_or(0)
    }

    /// Steps between emitted snapshots.
    pub fn snapshot_stride(&self) -> u64 {
        integer_ratio(self.snapshot_every, self.dt)
            .unwrap_or(1)
            .max(1)
    }
}

/// Equispaced periodic grid on `[0, L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
    nodes: Vec<f64>,
    wavenumbers: Vec<f64>,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "point count {n} must be even and >= 8"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length {length} must be > 0")));
        }
        let nodes = (0..n).map(|j| j as f64 * length / n as f64).collect();
        let wavenumbers = (0..n)
            .map(|slot| 2.0 * PI * mode_index(slot, n) as f64 / length)
            .collect();
        Ok(Grid {
            n,
            length,
            nodes,
            wavenumbers,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Wavenumbers `k_m = 2 pi m / L` in transform storage order:
    /// `m = 0, 1, .., N/2 - 1, -N/2, .., -1`.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Mode index `m` stored at transform slot `slot`.
    pub fn mode_index(&self, slot: usize) -> i64 {
        mode_index(slot, self.n)
    }

    /// Transform slot holding mode `m`, for `m` in `[-N/2, N/2)`.
    pub fn slot(&self, m: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if m < -half || m >= half {
            None
        } else if m >= 0 {
            Some(m as usize)
        } else {
            Some((m + self.n as i64) as usize)
        }
    }

    /// Node index for coordinate `x`, if `x` lies on a node.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        integer_ratio(x * self.n as f64, self.length)
            .map(|j| j as usize)
            .filter(|&j| j < self.n)
    }
}

pub(crate) fn mode_index(slot: usize, n: usize) -> i64 {
    if slot < n / 2 {
        slot as i64
    } else {
        slot as i64 - n as i64
    }
}

/// Time plus collocated samples of `u` and `v = u_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FieldState {
    pub fn new(t: f64, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::LengthMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        Ok(FieldState { t, u, v })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }

    pub(crate) fn check_grid(&self, grid: &Grid) -> Result<()> {
        for len in [self.u.len(), self.v.len()] {
            if len != grid.n() {
                return Err(Error::LengthMismatch {
                    expected: grid.n(),
                    found: len,
                });
            }
        }
        Ok(())
    }
}

/// `sin(pi * x)` with exact argument reduction, so that
/// `sin_pi(x + 1) == -sin_pi(x)` and `sin_pi(k) == 0` hold bitwise.
pub fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    let (r, sign) = if r >= 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * (PI * r).sin()
}

/// `u = A sin(pi x / 4)`, `v = 0` at `t = 0`.
pub fn initial_state(params: &SimParams, grid: &Grid) -> Result<FieldState> {
    if grid.n() != params.grid_points || grid.length() != params.domain_length {
        return Err(Error::IncompatibleDomain(format!(
            "grid ({}, {}) does not match params ({}, {})",
            grid.n(),
            grid.length(),
            params.grid_points,
            params.domain_length
        )));
    }
    match integer_ratio(params.domain_length, 8.0) {
        Some(k) if k >= 1 => {}
        _ => {
            return Err(Error::IncompatibleDomain(format!(
                "domain length {} is not a positive multiple of 8",
                params.domain_length
            )))
        }
    }
    let u = grid
        .nodes()
        .iter()
        .map(|&x| params.amplitude * sin_pi(x / 4.0))
        .collect();
    Ok(FieldState {
        t: 0.0,
        u,
        v: vec![0.0; grid.n()],
    })
}

/// Per-output-time conserved quantities, sign margins, and tracer rotations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub energy: f64,
    pub momentum: f64,
    pub energy_drift: f64,
    pub u_min_left: f64,
    pub u_max_left: f64,
    pub u_min_right: f64,
    pub u_max_right: f64,
    pub rot_origin: f64,
    pub rot_left: f64,
    pub rot_right: f64,
}

/// Guard in the relative drift denominator.
pub const ENERGY_FLOOR: f64 = 1e-30;

pub fn energy_drift(energy: f64, initial: f64) -> f64 {
    (energy - initial) / initial.abs().max(ENERGY_FLOOR)
}

/// Extrema of `u` over nodes strictly inside `(0, L/2)` and `(L/2, L)`:
/// `(min_left, max_left, min_right, max_right)`.
pub fn half_domain_extrema(u: &[f64], grid: &Grid) -> (f64, f64, f64, f64) {
    let half = grid.length() / 2.0;
    let mut left = (f64::INFINITY, f64::NEG_INFINITY);
    let mut right = (f64::INFINITY, f64::NEG_INFINITY);
    for (&x, &value) in grid.nodes().iter().zip(u) {
        let slot = if x > 0.0 && x < half {
            &mut left
        } else if x > half {
            &mut right
        } else {
            continue;
        };
        slot.0 = slot.0.min(value);
        slot.1 = slot.1.max(value);
    }
    (left.0, left.1, right.0, right.1)
}
