//! Pseudospectral solver for the periodic nonlinear Klein-Gordon equation
//!
//! ```text
//! u_tt = alpha u_xx + mu u - beta u^3,   x in [0, L) periodic
//! ```
//!
//! with Gauss-Legendre implicit Runge-Kutta time stepping, plus tools to
//! study each snapshot as a closed loop `{(u(t, x), u_t(t, x))}` in the phase
//! plane: winding around the equilibria `(0, 0)` and `(+-sqrt(mu/beta), 0)`,
//! rotation of material tracers, self-crossings, and a breather/ordinary
//! classification.

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod integrator;
pub mod io;
pub mod params;
pub mod spectral;

pub use error::{Error, Result};
pub use params::{FieldState, Grid, SimParams};
