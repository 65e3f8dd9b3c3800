//! Phase-plane geometry of a field snapshot.
//!
//! A snapshot `(u(t, x_j), v(t, x_j))` read in grid order traces a closed
//! polygon in the `(u, v)` plane (closed because the grid is periodic). This
//! module measures how that loop and the trajectories of individual nodes
//! wind around the equilibria, finds the loop's self-crossings, and labels a
//! run as an ordinary oscillation or a breather.

use std::f64::consts::PI;

use crate::dynamics::fixed_points;
use crate::error::{Error, Result};
use crate::params::{DiagnosticsRow, FieldState, SimParams};

pub type Point = (f64, f64);

/// Minimum distance between a loop or track and the center it is measured around.
pub const CENTER_EPS: f64 = 1e-12;
/// Allowed distance of a raw winding sum from the nearest integer.
pub const INTEGER_GUARD: f64 = 1e-6;

/// Closed polyline of `(u, v)` points; the edge from the last point back to
/// the first is implied.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseLoop {
    pub t: f64,
    pub points: Vec<Point>,
}

impl PhaseLoop {
    pub fn new(t: f64, points: Vec<Point>) -> Result<Self> {
        if points.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
            return Err(Error::NonFinite("phase loop"));
        }
        Ok(PhaseLoop { t, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Closure-inclusive edges `(p_i, p_{i+1 mod n})`.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    /// Axis-aligned bounding box `(u_min, u_max, v_min, v_max)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.points.iter().fold(
            (
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
            ),
            |b, p| (b.0.min(p.0), b.1.max(p.0), b.2.min(p.1), b.3.max(p.1)),
        )
    }

    /// Splits the loop at vertices `i < j` into the sub-loops `p_i..=p_j` and
    /// `p_j..=p_i` (wrapping), each closed by the chord between `p_i` and `p_j`.
    pub fn split(&self, i: usize, j: usize) -> (PhaseLoop, PhaseLoop) {
        let n = self.points.len();
        assert!(i < j && j < n, "split indices must satisfy i < j < n");
        let first = self.points[i..=j].to_vec();
        let second = self.points[j..]
            .iter()
            .chain(&self.points[..=i])
            .copied()
            .collect();
        (
            PhaseLoop {
                t: self.t,
                points: first,
            },
            PhaseLoop {
                t: self.t,
                points: second,
            },
        )
    }
}

pub fn phase_loop(state: &FieldState) -> Result<PhaseLoop> {
    if !state.is_finite() {
        return Err(Error::NonFinite("field state"));
    }
    if state.u.len() != state.v.len() {
        return Err(Error::LengthMismatch {
            expected: state.u.len(),
            found: state.v.len(),
        });
    }
    PhaseLoop::new(
        state.t,
        state
            .u
            .iter()
            .copied()
            .zip(state.v.iter().copied())
            .collect(),
    )
}

/// Principal-value angle swept from `a` to `b` as seen from `center`, in `(-pi, pi]`.
fn angle_increment(a: Point, b: Point, center: Point) -> f64 {
    let (ax, ay) = (a.0 - center.0, a.1 - center.1);
    let (bx, by) = (b.0 - center.0, b.1 - center.1);
    let d = (ax * by - ay * bx).atan2(ax * bx + ay * by);
    if d == -PI {
        PI
    } else {
        d
    }
}

fn distance(a: Point, b: Point) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Signed number of turns of the closed loop around `center`.
pub fn winding_number(lp: &PhaseLoop, center: Point) -> Result<i64> {
    if lp.points.iter().any(|&p| distance(p, center) <= CENTER_EPS) {
        return Err(Error::CenterOnLoop);
    }
    let raw = lp
        .edges()
        .map(|(a, b)| angle_increment(a, b, center))
        .sum::<f64>()
        / (2.0 * PI);
    let rounded = raw.round();
    if (raw - rounded).abs() >= INTEGER_GUARD {
        return Err(Error::NonInteger(raw));
    }
    Ok(rounded as i64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracerSample {
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

/// Time series of `(u, v)` at one probe location.
#[derive(Debug, Clone, PartialEq)]
pub struct TracerTrack {
    pub probe_x: f64,
    pub samples: Vec<TracerSample>,
}

impl TracerTrack {
    pub fn new(probe_x: f64) -> Self {
        TracerTrack {
            probe_x,
            samples: Vec::new(),
        }
    }

    /// Builds a track, rejecting non-increasing times or non-finite entries.
    pub fn from_samples(probe_x: f64, samples: Vec<TracerSample>) -> Result<Self> {
        let mut track = TracerTrack::new(probe_x);
        for s in samples {
            track.try_push(s)?;
        }
        Ok(track)
    }

    pub fn try_push(&mut self, s: TracerSample) -> Result<()> {
        if !(s.t.is_finite() && s.u.is_finite() && s.v.is_finite()) {
            return Err(Error::NonFinite("tracer sample"));
        }
        if let Some(last) = self.samples.last() {
            if s.t <= last.t {
                return Err(Error::Malformed {
                    file: "tracer track".into(),
                    message: format!("time {} does not follow {}", s.t, last.t),
                });
            }
        }
        self.samples.push(s);
        Ok(())
    }

    pub(crate) fn push(&mut self, s: TracerSample) {
        self.samples.push(s);
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.samples.iter().map(|s| (s.u, s.v))
    }
}

/// Total angle, in turns, swept by the open track around `center`.
pub fn cumulative_rotation(track: &TracerTrack, center: Point) -> Result<f64> {
    if track.points().any(|p| distance(p, center) <= CENTER_EPS) {
        return Err(Error::CenterOnTrack);
    }
    let pts: Vec<Point> = track.points().collect();
    Ok(pts
        .windows(2)
        .map(|w| angle_increment(w[0], w[1], center))
        .fold(0.0, |acc, d| acc + d)
        / (2.0 * PI))
}

/// A crossing between edges `edges.0 < edges.1`. Positions are loop
/// parameters `edge index + fraction along the edge`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub edges: (usize, usize),
    pub positions: (f64, f64),
    pub point: Point,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CrossingSet {
    pub crossings: Vec<Crossing>,
}

impl CrossingSet {
    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Intersection of segments `p0p1` and `q0q1` with tolerance `eps` on the
/// orientation tests; returns the fractions along each segment.
fn segment_intersection(
    p0: Point,
    p1: Point,
    q0: Point,
    q1: Point,
    eps: f64,
) -> Option<(f64, f64)> {
    let r = (p1.0 - p0.0, p1.1 - p0.1);
    let s = (q1.0 - q0.0, q1.1 - q0.1);
    let (lr, ls) = (r.0.hypot(r.1), s.0.hypot(s.1));
    // signed distances of each endpoint from the other segment's line
    let dq0 = cross(p0, p1, q0) / lr;
    let dq1 = cross(p0, p1, q1) / lr;
    let dp0 = cross(q0, q1, p0) / ls;
    let dp1 = cross(q0, q1, p1) / ls;
    let straddles = |a: f64, b: f64| !((a > eps && b > eps) || (a < -eps && b < -eps));
    if !(straddles(dq0, dq1) && straddles(dp0, dp1)) {
        return None;
    }
    let denom = r.0 * s.1 - r.1 * s.0;
    let w = (q0.0 - p0.0, q0.1 - p0.1);
    if denom.abs() > 1e-14 * lr * ls {
        let tp = (w.0 * s.1 - w.1 * s.0) / denom;
        let tq = (w.0 * r.1 - w.1 * r.0) / denom;
        let slack_p = eps / lr;
        let slack_q = eps / ls;
        if tp < -slack_p || tp > 1.0 + slack_p || tq < -slack_q || tq > 1.0 + slack_q {
            return None;
        }
        return Some((tp.clamp(0.0, 1.0), tq.clamp(0.0, 1.0)));
    }
    // collinear within tolerance: report the first overlapping point
    let proj = |pt: Point| ((pt.0 - p0.0) * r.0 + (pt.1 - p0.1) * r.1) / (lr * lr);
    let (a, b) = (proj(q0), proj(q1));
    let (lo, hi) = (a.min(b).max(0.0), a.max(b).min(1.0));
    if lo > hi + eps / lr {
        return None;
    }
    let tp = lo.clamp(0.0, 1.0);
    let pt = (p0.0 + tp * r.0, p0.1 + tp * r.1);
    let tq = ((pt.0 - q0.0) * s.0 + (pt.1 - q0.1) * s.1) / (ls * ls);
    Some((tp, tq.clamp(0.0, 1.0)))
}

/// All crossings between non-adjacent edges, by exhaustive pair testing.
///
/// Consecutive duplicate points are merged first. A crossing exactly at a
/// shared vertex is attributed to the edge that starts there, so it is
/// reported once.
pub fn self_intersections(lp: &PhaseLoop) -> Result<CrossingSet> {
    if lp
        .points
        .iter()
        .any(|p| !(p.0.is_finite() && p.1.is_finite()))
    {
        return Err(Error::NonFinite("phase loop"));
    }
    // merge consecutive duplicates, remembering original indices
    let mut pts: Vec<(usize, Point)> = Vec::with_capacity(lp.points.len());
    for (i, &p) in lp.points.iter().enumerate() {
        if pts.last().is_none_or(|&(_, q)| q != p) {
            pts.push((i, p));
        }
    }
    while pts.len() > 1 && pts[0].1 == pts[pts.len() - 1].1 {
        pts.pop();
    }
    if pts.len() < 2 {
        return Err(Error::DegenerateLoop);
    }
    let (u0, u1, v0, v1) = lp.bounds();
    let diameter = (u1 - u0).hypot(v1 - v0);
    let eps = 1e-12 * diameter;

    let n = pts.len();
    let mut out = Vec::new();
    if n < 4 {
        return Ok(CrossingSet { crossings: out });
    }
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (p0, p1) = (pts[i].1, pts[(i + 1) % n].1);
            let (q0, q1) = (pts[j].1, pts[(j + 1) % n].1);
            let Some((tp, tq)) = segment_intersection(p0, p1, q0, q1, eps) else {
                continue;
            };
            // half-open edges: end vertices belong to the next edge
            let end_p = distance((p0.0 + tp * (p1.0 - p0.0), p0.1 + tp * (p1.1 - p0.1)), p1) <= eps;
            let end_q = distance((q0.0 + tq * (q1.0 - q0.0), q0.1 + tq * (q1.1 - q0.1)), q1) <= eps;
            if end_p || end_q {
                continue;
            }
            let point = (p0.0 + tp * (p1.0 - p0.0), p0.1 + tp * (p1.1 - p0.1));
            let (ei, ej) = (pts[i].0, pts[j].0);
            out.push(Crossing {
                edges: (ei, ej),
                positions: (ei as f64 + tp, ej as f64 + tq),
                point,
            });
        }
    }
    Ok(CrossingSet { crossings: out })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Ordinary,
    Breather,
    Indeterminate,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Ordinary => "ordinary",
            Mode::Breather => "breather",
            Mode::Indeterminate => "indeterminate",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordinary" => Ok(Mode::Ordinary),
            "breather" => Ok(Mode::Breather),
            "indeterminate" => Ok(Mode::Indeterminate),
            other => Err(Error::Usage(format!("unknown mode label {other:?}"))),
        }
    }
}

/// The numbers a [`ModeLabel`] was decided from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEvidence {
    /// Minimum of `u_min_left` over the kept rows.
    pub m_left: f64,
    /// Maximum of `u_max_right` over the kept rows.
    pub m_right: f64,
    /// Turns of the first tracer around `(+sqrt(mu/beta), 0)`; NaN if undefined.
    pub rot_plus: f64,
    /// Turns of the first tracer around the origin; NaN if undefined.
    pub rot_origin: f64,
    pub t_skip: f64,
    pub min_turns: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeLabel {
    pub mode: Mode,
    pub evidence: ModeEvidence,
}

/// Full turns needed around a center.
pub const MIN_TURNS: f64 = 1.0;

/// Classifies a run from its diagnostics rows and tracer tracks.
///
/// Rows before `t_end / 8` are ignored for the sign margins. A run is a
/// breather when the left half stays positive, the right half stays
/// negative, and the first tracer turns at least once around the positive
/// vacuum; it is ordinary when the first tracer turns at least once around
/// the origin and the sign confinement fails.
pub fn classify_mode(
    tracks: &[TracerTrack],
    rows: &[DiagnosticsRow],
    params: &SimParams,
) -> Result<ModeLabel> {
    if rows.is_empty() {
        return Err(Error::InsufficientData("no diagnostics rows".into()));
    }
    if params.t_end < 4.0 * params.snapshot_every {
        return Err(Error::InsufficientData(format!(
            "t_end = {} is shorter than four snapshot intervals",
            params.t_end
        )));
    }
    let track = tracks
        .first()
        .ok_or_else(|| Error::InsufficientData("no tracer tracks".into()))?;
    let t_skip = params.t_end / 8.0;
    let kept: Vec<&DiagnosticsRow> = rows.iter().filter(|r| r.t >= t_skip).collect();
    if kept.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no diagnostics rows after t = {t_skip}"
        )));
    }
    let m_left = kept
        .iter()
        .map(|r| r.u_min_left)
        .fold(f64::INFINITY, f64::min);
    let m_right = kept
        .iter()
        .map(|r| r.u_max_right)
        .fold(f64::NEG_INFINITY, f64::max);

    let fp = fixed_points(params)?;
    let rot_plus = cumulative_rotation(track, fp.plus).unwrap_or(f64::NAN);
    let rot_origin = cumulative_rotation(track, fp.origin).unwrap_or(f64::NAN);

    let confined = m_left > 0.0 && m_right < 0.0;
    let mode = if confined && rot_plus.abs() >= MIN_TURNS {
        Mode::Breather
    } else if rot_origin.abs() >= MIN_TURNS && !confined {
        Mode::Ordinary
    } else {
        Mode::Indeterminate
    };
    Ok(ModeLabel {
        mode,
        evidence: ModeEvidence {
            m_left,
            m_right,
            rot_plus,
            rot_origin,
            t_skip,
            min_turns: MIN_TURNS,
        },
    })
}
