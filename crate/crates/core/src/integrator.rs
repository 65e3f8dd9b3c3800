//! Gauss-Legendre implicit Runge-Kutta stepping and the fixed-step run loop.
//!
//! The stage equations `G_i = X + dt sum_j a_ij F(G_j)` are solved by a
//! linearly implicit fixed-point iteration: the linear part of `F` is
//! diagonal in Fourier space and is inverted exactly per wavenumber, while
//! the cubic term is lagged from the previous sweep.

use rustfft::num_complex::Complex64;

use crate::dynamics::{fixed_points, KleinGordon};
use crate::error::{Error, Result};
use crate::geometry::{cumulative_rotation, TracerSample, TracerTrack};
use crate::params::{
    energy_drift, half_domain_extrema, initial_state, Dealias, DiagnosticsRow, FieldState,
    SimParams,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl ButcherTableau {
    pub fn stages(&self) -> usize {
        self.b.len()
    }
}

/// Collocation tableau at the `s` Gauss-Legendre points on (0, 1); order `2s`.
pub fn gauss_tableau(s: usize) -> Result<ButcherTableau> {
    let t = match s {
        1 => ButcherTableau {
            a: vec![vec![0.5]],
            b: vec![1.0],
            c: vec![0.5],
        },
        2 => {
            let r = 3f64.sqrt() / 6.0;
            ButcherTableau {
                a: vec![vec![0.25, 0.25 - r], vec![0.25 + r, 0.25]],
                b: vec![0.5, 0.5],
                c: vec![0.5 - r, 0.5 + r],
            }
        }
        3 => {
            let r = 15f64.sqrt();
            ButcherTableau {
                a: vec![
                    vec![5.0 / 36.0, 2.0 / 9.0 - r / 15.0, 5.0 / 36.0 - r / 30.0],
                    vec![5.0 / 36.0 + r / 24.0, 2.0 / 9.0, 5.0 / 36.0 - r / 24.0],
                    vec![5.0 / 36.0 + r / 30.0, 2.0 / 9.0 + r / 15.0, 5.0 / 36.0],
                ],
                b: vec![5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0],
                c: vec![0.5 - r / 10.0, 0.5, 0.5 + r / 10.0],
            }
        }
        _ => return Err(Error::Unsupported(format!("{s}-stage Gauss method"))),
    };
    Ok(t)
}

/// Outcome of one stage solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    /// Fixed-point sweeps used.
    pub iterations: usize,
    /// Max-norm stage residual after the last sweep.
    pub residual: f64,
    pub accepted: bool,
}

/// Sweeps with a non-decreasing residual tolerated before giving up.
const STALL_LIMIT: usize = 5;

/// Inverts a small dense matrix by Gauss-Jordan elimination with partial pivoting.
fn invert(mut m: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col] == 0.0 || !m[pivot][col].is_finite() {
            return None;
        }
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col];
        for j in 0..n {
            m[col][j] /= p;
            inv[col][j] /= p;
        }
        for row in 0..n {
            if row != col {
                let f = m[row][col];
                if f != 0.0 {
                    for j in 0..n {
                        m[row][j] -= f * m[col][j];
                        inv[row][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// A Gauss IRK stepper bound to one model, tableau and step size. The
/// per-wavenumber stage matrices are factorized once on construction.
#[derive(Debug, Clone)]
pub struct GaussStepper {
    model: KleinGordon,
    tableau: ButcherTableau,
    dt: f64,
    tol: f64,
    max_iter: usize,
    symbols: Vec<f64>,
    /// Per slot, the inverse of `I - dt^2 lambda A^2`.
    stage_inverse: Vec<Vec<Vec<f64>>>,
}

impl GaussStepper {
    pub fn new(
        model: KleinGordon,
        tableau: ButcherTableau,
        dt: f64,
        tol: f64,
        max_iter: usize,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParams(format!("dt = {dt} must be > 0")));
        }
        let s = tableau.stages();
        let a2: Vec<Vec<f64>> = (0..s)
            .map(|i| {
                (0..s)
                    .map(|j| (0..s).map(|l| tableau.a[i][l] * tableau.a[l][j]).sum())
                    .collect()
            })
            .collect();
        let symbols = model.linear_symbols();
        let stage_inverse = symbols
            .iter()
            .map(|&lambda| {
                let m = (0..s)
                    .map(|i| {
                        (0..s)
                            .map(|j| {
                                let id = if i == j { 1.0 } else { 0.0 };
                                id - dt * dt * lambda * a2[i][j]
                            })
                            .collect()
                    })
                    .collect();
                invert(m).ok_or_else(|| {
                    Error::InvalidParams(format!("singular stage matrix for lambda = {lambda}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GaussStepper {
            model,
            tableau,
            dt,
            tol,
            max_iter: max_iter.max(1),
            symbols,
            stage_inverse,
        })
    }

    pub fn from_params(params: &SimParams) -> Result<Self> {
        let grid = params.grid()?;
        let model = KleinGordon::new(params, &grid);
        Self::new(
            model,
            gauss_tableau(params.irk_stages)?,
            params.dt,
            params.stage_tol,
            params.stage_max_iter,
        )
    }

    pub fn model(&self) -> &KleinGordon {
        &self.model
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn nonlinear(&self, coeffs: &[Complex64], physical: &[f64]) -> Vec<Complex64> {
        let c = self.model.coefficients();
        let transform = self.model.transform();
        let mut cube = match c.dealias {
            Dealias::Pad2x => transform.cube_padded(coeffs),
            Dealias::None => transform.cube_spectrum(physical, Dealias::None),
        };
        cube.iter_mut().for_each(|z| *z *= -c.beta);
        cube
    }

    /// Advances `state` by one step of size `dt`.
    pub fn step(&self, state: &FieldState) -> Result<(FieldState, StepReport)> {
        state.check_grid(self.model.grid())?;
        if !state.is_finite() {
            return Err(Error::NonFinite("state"));
        }
        let transform = self.model.transform();
        let n = transform.n();
        let s = self.tableau.stages();
        let (a, dt) = (&self.tableau.a, self.dt);

        let u_hat = transform.forward(&state.u);
        let v_hat = transform.forward(&state.v);

        let mut stage_u = vec![state.u.clone(); s];
        let mut stage_v = vec![state.v.clone(); s];
        let mut stage_f = vec![vec![0.0; n]; s];
        let mut nl_hat: Vec<Vec<Complex64>> =
            (0..s).map(|_| self.nonlinear(&u_hat, &state.u)).collect();

        let mut best = f64::INFINITY;
        let mut stalled = 0;
        let mut residual;
        let mut iterations = 0;
        let zero = Complex64::new(0.0, 0.0);
        let mut uh = vec![vec![zero; n]; s];
        let mut vh = vec![vec![zero; n]; s];

        loop {
            iterations += 1;
            // linear solve per wavenumber with the cubic term frozen
            let mut rhs = vec![zero; s];
            for slot in 0..n {
                let lambda = self.symbols[slot];
                let minv = &self.stage_inverse[slot];
                for i in 0..s {
                    let mut r = v_hat[slot] + u_hat[slot] * (dt * lambda * self.tableau.c[i]);
                    for j in 0..s {
                        r += nl_hat[j][slot] * (dt * a[i][j]);
                    }
                    rhs[i] = r;
                }
                for i in 0..s {
                    vh[i][slot] = (0..s).map(|j| rhs[j] * minv[i][j]).sum();
                }
                for i in 0..s {
                    let mut x = u_hat[slot];
                    for j in 0..s {
                        x += vh[j][slot] * (dt * a[i][j]);
                    }
                    uh[i][slot] = x;
                }
            }

            for i in 0..s {
                stage_u[i] = transform.inverse_real(&uh[i]);
                stage_v[i] = transform.inverse_real(&vh[i]);
                nl_hat[i] = self.nonlinear(&uh[i], &stage_u[i]);
                let force: Vec<Complex64> = uh[i]
                    .iter()
                    .zip(&nl_hat[i])
                    .zip(&self.symbols)
                    .map(|((&x, &nl), &lambda)| x * lambda + nl)
                    .collect();
                stage_f[i] = transform.inverse_real(&force);
            }

            residual = 0.0f64;
            for i in 0..s {
                for p in 0..n {
                    let mut ru = stage_u[i][p] - state.u[p];
                    let mut rv = stage_v[i][p] - state.v[p];
                    for j in 0..s {
                        ru -= dt * a[i][j] * stage_v[j][p];
                        rv -= dt * a[i][j] * stage_f[j][p];
                    }
                    residual = residual.max(ru.abs()).max(rv.abs());
                }
            }
            if !residual.is_finite() {
                return Err(Error::NonFinite("stage solve"));
            }
            if residual <= self.tol {
                break;
            }
            if residual < best {
                best = residual;
                stalled = 0;
            } else {
                stalled += 1;
            }
            if stalled >= STALL_LIMIT || iterations >= self.max_iter {
                return Err(Error::StageSolveDiverged {
                    iterations,
                    residual,
                });
            }
        }

        let mut u = state.u.clone();
        let mut v = state.v.clone();
        for i in 0..s {
            let w = dt * self.tableau.b[i];
            for p in 0..n {
                u[p] += w * stage_v[i][p];
                v[p] += w * stage_f[i][p];
            }
        }
        let next = FieldState {
            t: state.t + dt,
            u,
            v,
        };
        if !next.is_finite() {
            return Err(Error::NonFinite("state"));
        }
        Ok((
            next,
            StepReport {
                iterations,
                residual,
                accepted: true,
            },
        ))
    }
}

/// One step with a freshly built stepper.
pub fn irk_step(
    state: &FieldState,
    dt: f64,
    tableau: &ButcherTableau,
    params: &SimParams,
) -> Result<(FieldState, StepReport)> {
    let grid = params.grid()?;
    let stepper = GaussStepper::new(
        KleinGordon::new(params, &grid),
        tableau.clone(),
        dt,
        params.stage_tol,
        params.stage_max_iter,
    )?;
    stepper.step(state)
}

/// Consumer of run output. All methods default to no-ops.
pub trait RunSink {
    fn snapshot(&mut self, _state: &FieldState) {}
    fn diagnostics(&mut self, _row: &DiagnosticsRow) {}
    /// `index` is the position of the probe in `SimParams::probes`.
    fn tracer(&mut self, _index: usize, _sample: &TracerSample) {}
}

/// Sink that discards everything.
pub struct NullSink;

impl RunSink for NullSink {}

/// Sink that keeps everything in memory.
#[derive(Debug, Default, Clone)]
pub struct Recorder {
    pub snapshots: Vec<FieldState>,
    pub rows: Vec<DiagnosticsRow>,
}

impl RunSink for Recorder {
    fn snapshot(&mut self, state: &FieldState) {
        self.snapshots.push(state.clone());
    }

    fn diagnostics(&mut self, row: &DiagnosticsRow) {
        self.rows.push(*row);
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub final_state: FieldState,
    pub initial_energy: f64,
    /// Largest `|energy_drift|` over every step.
    pub max_abs_drift: f64,
    pub max_residual: f64,
    pub total_sweeps: u64,
    pub steps: u64,
    pub tracks: Vec<TracerTrack>,
}

/// Runs from the configured initial data to `t_end`.
pub fn integrate(params: &SimParams, sink: &mut dyn RunSink) -> Result<RunSummary> {
    let grid = params.grid()?;
    let initial = initial_state(params, &grid)?;
    integrate_from(params, initial, sink)
}

/// Runs `params.step_count()` steps from `initial`, emitting a snapshot and a
/// diagnostics row at `initial.t` and after every `snapshot_every`.
pub fn integrate_from(
    params: &SimParams,
    initial: FieldState,
    sink: &mut dyn RunSink,
) -> Result<RunSummary> {
    let params = params.clone().validated()?;
    let stepper = GaussStepper::from_params(&params)?;
    let model = stepper.model();
    let grid = model.grid().clone();
    initial.check_grid(&grid)?;
    if !initial.is_finite() {
        return Err(Error::NonFinite("initial state"));
    }
    let fp = fixed_points(&params)?;
    let probe_nodes: Vec<usize> = params
        .probes
        .iter()
        .map(|&x| {
            grid.node_index(x)
                .ok_or_else(|| Error::InvalidParams(format!("probe {x} not on grid node")))
        })
        .collect::<Result<_>>()?;
    let centers: Vec<(f64, f64)> = probe_nodes
        .iter()
        .map(|&j| {
            if initial.u[j] >= 0.0 {
                fp.plus
            } else {
                fp.minus
            }
        })
        .collect();
    let mut tracks: Vec<TracerTrack> = params.probes.iter().map(|&x| TracerTrack::new(x)).collect();

    let t0 = initial.t;
    let e0 = model.energy(&initial)?;
    let steps = params.step_count();
    let stride = params.snapshot_stride();

    let mut emit = |state: &FieldState, tracks: &mut Vec<TracerTrack>| -> Result<()> {
        sink.snapshot(state);
        for (i, (track, &j)) in tracks.iter_mut().zip(&probe_nodes).enumerate() {
            let sample = TracerSample {
                t: state.t,
                u: state.u[j],
                v: state.v[j],
            };
            track.push(sample);
            sink.tracer(i, &sample);
        }
        let energy = model.energy(state)?;
        let (u_min_left, u_max_left, u_min_right, u_max_right) =
            half_domain_extrema(&state.u, &grid);
        let rotation = |i: usize, center: (f64, f64)| {
            tracks
                .get(i)
                .and_then(|tr| cumulative_rotation(tr, center).ok())
                .unwrap_or(f64::NAN)
        };
        sink.diagnostics(&DiagnosticsRow {
            t: state.t,
            energy,
            momentum: model.momentum(state)?,
            energy_drift: energy_drift(energy, e0),
            u_min_left,
            u_max_left,
            u_min_right,
            u_max_right,
            rot_origin: rotation(0, fp.origin),
            rot_left: centers.first().map_or(f64::NAN, |&c| rotation(0, c)),
            rot_right: centers.get(1).map_or(f64::NAN, |&c| rotation(1, c)),
        });
        Ok(())
    };

    emit(&initial, &mut tracks)?;
    let mut state = initial;
    let mut max_abs_drift = 0.0f64;
    let mut max_residual = 0.0f64;
    let mut total_sweeps = 0u64;
    for i in 1..=steps {
        let (mut next, report) = stepper.step(&state).map_err(|e| Error::Aborted {
            t: state.t,
            source: Box::new(e),
        })?;
        next.t = t0 + i as f64 * params.dt;
        total_sweeps += report.iterations as u64;
        max_residual = max_residual.max(report.residual);
        max_abs_drift = max_abs_drift.max(energy_drift(model.energy(&next)?, e0).abs());
        state = next;
        if i % stride == 0 {
            emit(&state, &mut tracks)?;
        }
    }

    Ok(RunSummary {
        final_state: state,
        initial_energy: e0,
        max_abs_drift,
        max_residual,
        total_sweeps,
        steps,
        tracks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Coefficients;
    use crate::params::Grid;

    /// Gauss points as roots of the shifted Legendre polynomial by Newton
    /// iteration, and `a_ij = int_0^{c_i} l_j` from the Lagrange basis.
    fn collocation_oracle(s: usize) -> ButcherTableau {
        let legendre = |x: f64| -> (f64, f64) {
            // P_s and P_s' on [-1, 1]
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=s {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let (p, pm1) = if s == 1 { (x, 1.0) } else { (p1, p0) };
            let dp = s as f64 * (x * p - pm1) / (x * x - 1.0);
            (p, dp)
        };
        let mut c: Vec<f64> = (0..s)
            .map(|i| {
                let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (s as f64 + 0.5)).cos();
                for _ in 0..50 {
                    let (p, dp) = legendre(x);
                    x -= p / dp;
                }
                0.5 * (x + 1.0)
            })
            .collect();
        c.sort_by(f64::total_cmp);
        // integrate Lagrange basis polynomials exactly via monomial coefficients
        let basis_integral = |j: usize, upper: f64| -> f64 {
            let mut poly = vec![1.0];
            let mut denom = 1.0;
            for (m, &cm) in c.iter().enumerate() {
                if m == j {
                    continue;
                }
                let mut next = vec![0.0; poly.len() + 1];
                for (d, &q) in poly.iter().enumerate() {
                    next[d + 1] += q;
                    next[d] -= q * cm;
                }
                poly = next;
                denom *= c[j] - cm;
            }
            poly.iter()
                .enumerate()
                .map(|(d, &q)| q * upper.powi(d as i32 + 1) / (d + 1) as f64)
                .sum::<f64>()
                / denom
        };
        ButcherTableau {
            a: (0..s)
                .map(|i| (0..s).map(|j| basis_integral(j, c[i])).collect())
                .collect(),
            b: (0..s).map(|j| basis_integral(j, 1.0)).collect(),
            c,
        }
    }

    #[test]
    fn tableaux_match_collocation_construction() {
        for s in 1..=3 {
            let t = gauss_tableau(s).unwrap();
            let o = collocation_oracle(s);
            for i in 0..s {
                assert!((t.b[i] - o.b[i]).abs() < 1e-14, "s={s} b");
                assert!((t.c[i] - o.c[i]).abs() < 1e-14, "s={s} c");
                for j in 0..s {
                    assert!((t.a[i][j] - o.a[i][j]).abs() < 1e-14, "s={s} a{i}{j}");
                }
            }
        }
        let t1 = gauss_tableau(1).unwrap();
        assert_eq!((t1.a[0][0], t1.b[0], t1.c[0]), (0.5, 1.0, 0.5));
    }

    #[test]
    fn tableau_invariants_and_order_conditions() {
        for s in 1..=3 {
            let t = gauss_tableau(s).unwrap();
            assert!((t.b.iter().sum::<f64>() - 1.0).abs() <= 1e-15);
            for i in 0..s {
                assert!((t.a[i].iter().sum::<f64>() - t.c[i]).abs() <= 1e-15);
                for j in 0..s {
                    let sym = t.b[j] * t.a[j][i] + t.b[i] * t.a[i][j] - t.b[i] * t.b[j];
                    assert!(sym.abs() <= 1e-14);
                }
            }
            // quadrature order 2s: sum b_i c_i^(q-1) = 1/q
            for q in 1..=2 * s {
                let sum: f64 =
                    t.b.iter()
                        .zip(&t.c)
                        .map(|(b, c)| b * c.powi(q as i32 - 1))
                        .sum();
                assert!((sum - 1.0 / q as f64).abs() < 1e-15, "s={s} q={q}");
            }
        }
        let t2 = gauss_tableau(2).unwrap();
        let b_c3: f64 = t2.b.iter().zip(&t2.c).map(|(b, c)| b * c.powi(3)).sum();
        assert!((b_c3 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn unsupported_stage_counts() {
        assert!(matches!(gauss_tableau(0), Err(Error::Unsupported(_))));
        assert!(matches!(gauss_tableau(4), Err(Error::Unsupported(_))));
    }

    #[test]
    fn equilibrium_is_fixed() {
        let p = SimParams::default();
        let g = p.grid().unwrap();
        let u = (p.mu / p.beta).sqrt();
        let s = FieldState::new(0.0, vec![u; 128], vec![0.0; 128]).unwrap();
        let t = gauss_tableau(2).unwrap();
        for dt in [0.01, 0.125, 1.0] {
            let (next, report) = irk_step(&s, dt, &t, &p).unwrap();
            assert_eq!(report.iterations, 1);
            assert!(report.accepted);
            for j in 0..g.n() {
                assert!((next.u[j] - u).abs() < 1e-14);
                assert!(next.v[j].abs() < 1e-14);
            }
        }
    }

    fn linear_stepper(s: usize, dt: f64, mass: f64) -> GaussStepper {
        let g = Grid::new(16, 8.0).unwrap();
        let coeffs = Coefficients {
            alpha: 1.0 / 256.0,
            beta: 0.0,
            mu: -mass * mass,
            sigma: 1.0,
            dealias: Dealias::Pad2x,
        };
        GaussStepper::new(
            KleinGordon::with_coefficients(&g, coeffs),
            gauss_tableau(s).unwrap(),
            dt,
            1e-13,
            100,
        )
        .unwrap()
    }

    #[test]
    fn midpoint_local_error_is_third_order() {
        // exact solution sin(kx) cos(wt)
        let mass = 1.0;
        let k = std::f64::consts::PI / 4.0;
        let w = (k * k / 256.0 + mass * mass).sqrt();
        let one_step_error = |dt: f64| {
            let st = linear_stepper(1, dt, mass);
            let g = st.model().grid().clone();
            let u0: Vec<f64> = g.nodes().iter().map(|&x| (k * x).sin()).collect();
            let (next, _) = st
                .step(&FieldState::new(0.0, u0, vec![0.0; 16]).unwrap())
                .unwrap();
            g.nodes()
                .iter()
                .enumerate()
                .map(|(j, &x)| {
                    let eu = next.u[j] - (k * x).sin() * (w * dt).cos();
                    let ev = next.v[j] + w * (k * x).sin() * (w * dt).sin();
                    eu.abs().max(ev.abs())
                })
                .fold(0.0, f64::max)
        };
        let ratio = one_step_error(0.1) / one_step_error(0.05);
        assert!((ratio - 8.0).abs() < 0.5, "ratio {ratio}");
    }

    #[test]
    fn linear_mode_action_is_conserved() {
        let mass = 1.0;
        let st = linear_stepper(2, 0.3, mass);
        let g = st.model().grid().clone();
        let k = 2.0 * std::f64::consts::PI * 3.0 / 8.0;
        let w = (k * k / 256.0 + mass * mass).sqrt();
        let mut s = FieldState::new(
            0.0,
            g.nodes().iter().map(|&x| (k * x).sin()).collect(),
            g.nodes().iter().map(|&x| 0.4 * (k * x).sin()).collect(),
        )
        .unwrap();
        let action = |s: &FieldState| s.u[1] * s.u[1] + (s.v[1] / w) * (s.v[1] / w);
        let a0 = action(&s);
        for _ in 0..200 {
            s = st.step(&s).unwrap().0;
            assert!((action(&s) - a0).abs() < 1e-13);
        }
    }

    #[test]
    fn default_breather_step_is_healthy() {
        let p = SimParams::default();
        let g = p.grid().unwrap();
        let s0 = initial_state(&p, &g).unwrap();
        let (next, report) = irk_step(&s0, 0.125, &gauss_tableau(2).unwrap(), &p).unwrap();
        assert!(report.accepted);
        assert!(report.residual <= 1e-13);
        assert!(report.iterations <= 10, "{report:?}");
        assert_eq!(next.t, 0.125);
    }

    #[test]
    fn iteration_cap_reports_divergence() {
        let p = SimParams {
            stage_max_iter: 1,
            stage_tol: 1e-30,
            ..SimParams::default()
        };
        let g = p.grid().unwrap();
        let s0 = initial_state(&p, &g).unwrap();
        assert!(matches!(
            irk_step(&s0, 0.125, &gauss_tableau(2).unwrap(), &p),
            Err(Error::StageSolveDiverged { iterations: 1, .. })
        ));
    }

    #[test]
    fn zero_length_run_emits_initial_only() {
        let p = SimParams {
            t_end: 0.0,
            ..SimParams::default()
        };
        let mut rec = Recorder::default();
        let summary = integrate(&p, &mut rec).unwrap();
        assert_eq!(rec.snapshots.len(), 1);
        assert_eq!(rec.rows.len(), 1);
        assert_eq!(rec.rows[0].energy_drift, 0.0);
        assert_eq!(summary.steps, 0);
    }

    #[test]
    fn runs_are_deterministic() {
        let p = SimParams {
            t_end: 64.0,
            ..SimParams::default()
        };
        let a = integrate(&p, &mut NullSink).unwrap();
        let b = integrate(&p, &mut NullSink).unwrap();
        assert_eq!(a.final_state, b.final_state);
        assert_eq!(a.max_abs_drift.to_bits(), b.max_abs_drift.to_bits());
        assert_eq!(a.total_sweeps, b.total_sweeps);
    }
}
