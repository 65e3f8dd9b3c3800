//! Right-hand side of the first-order system
//!
//! ```text
//! u_t = v
//! v_t = sigma * alpha * u_xx + mu * u - beta * u^3
//! ```
//!
//! together with its conserved functionals and the equilibria of the
//! double-well force.

use crate::error::{Error, Result};
use crate::params::{Dealias, FieldState, Grid, SimParams};
use crate::spectral::Transform;

/// Equation coefficients as used by the solver. Unlike [`SimParams`] these
/// are not validated, so `mu <= 0` or `beta = 0` can be used to set up linear
/// reference problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    /// `+1` for the standard wave operator, `-1` for the literal sign.
    pub sigma: f64,
    pub dealias: Dealias,
}

impl Coefficients {
    pub fn from_params(p: &SimParams) -> Self {
        Coefficients {
            alpha: p.alpha,
            beta: p.beta,
            mu: p.mu,
            sigma: p.laplacian_sign.sigma(),
            dealias: p.dealias,
        }
    }

    /// Multiplier of the linear part of `v_t` acting on a mode of wavenumber `k`.
    pub fn linear_symbol(&self, k: f64) -> f64 {
        -self.sigma * self.alpha * k * k + self.mu
    }
}

/// The discretized Klein-Gordon model on one grid.
#[derive(Debug, Clone)]
pub struct KleinGordon {
    grid: Grid,
    coeffs: Coefficients,
    transform: Transform,
}

impl KleinGordon {
    pub fn new(params: &SimParams, grid: &Grid) -> Self {
        Self::with_coefficients(grid, Coefficients::from_params(params))
    }

    pub fn with_coefficients(grid: &Grid, coeffs: Coefficients) -> Self {
        KleinGordon {
            grid: grid.clone(),
            coeffs,
            transform: Transform::new(grid),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    /// Linear multiplier per transform slot.
    pub fn linear_symbols(&self) -> Vec<f64> {
        self.grid
            .wavenumbers()
            .iter()
            .map(|&k| self.coeffs.linear_symbol(k))
            .collect()
    }

    /// `v_t` as a function of `u` alone.
    pub fn force(&self, u: &[f64]) -> Result<Vec<f64>> {
        let c = &self.coeffs;
        let uxx = self.transform.second_derivative(u)?;
        let cube = self.transform.cube(u, c.dealias)?;
        let out: Vec<f64> = u
            .iter()
            .zip(&uxx)
            .zip(&cube)
            .map(|((&u, &uxx), &u3)| c.sigma * c.alpha * uxx + c.mu * u - c.beta * u3)
            .collect();
        if out.iter().all(|x| x.is_finite()) {
            Ok(out)
        } else {
            Err(Error::NonFinite("rhs"))
        }
    }

    pub fn rhs(&self, state: &FieldState) -> Result<(Vec<f64>, Vec<f64>)> {
        state.check_grid(&self.grid)?;
        let dv = self.force(&state.u)?;
        if !state.v.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("rhs"));
        }
        Ok((state.v.clone(), dv))
    }

    /// `dx * sum [v^2/2 + sigma alpha u_x^2/2 - mu u^2/2 + beta u^4/4]`.
    pub fn energy(&self, state: &FieldState) -> Result<f64> {
        state.check_grid(&self.grid)?;
        let c = &self.coeffs;
        let ux = self.transform.first_derivative(&state.u)?;
        let density: f64 = state
            .u
            .iter()
            .zip(&state.v)
            .zip(&ux)
            .map(|((&u, &v), &ux)| {
                let u2 = u * u;
                0.5 * v * v + 0.5 * c.sigma * c.alpha * ux * ux - 0.5 * c.mu * u2
                    + 0.25 * c.beta * u2 * u2
            })
            .sum();
        Ok(self.grid.dx() * density)
    }

    /// `dx * sum v u_x`.
    pub fn momentum(&self, state: &FieldState) -> Result<f64> {
        state.check_grid(&self.grid)?;
        let ux = self.transform.first_derivative(&state.u)?;
        Ok(self.grid.dx() * state.v.iter().zip(&ux).map(|(v, ux)| v * ux).sum::<f64>())
    }
}

pub fn rhs(state: &FieldState, params: &SimParams, grid: &Grid) -> Result<(Vec<f64>, Vec<f64>)> {
    KleinGordon::new(params, grid).rhs(state)
}

pub fn energy(state: &FieldState, params: &SimParams, grid: &Grid) -> Result<f64> {
    KleinGordon::new(params, grid).energy(state)
}

pub fn momentum(state: &FieldState, params: &SimParams, grid: &Grid) -> Result<f64> {
    KleinGordon::new(params, grid).momentum(state)
}

/// Equilibria of the local force `mu u - beta u^3` in the `(u, v)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointSet {
    pub origin: (f64, f64),
    pub plus: (f64, f64),
    pub minus: (f64, f64),
}

impl FixedPointSet {
    /// `sqrt(mu / beta)`.
    pub fn vacuum(&self) -> f64 {
        self.plus.0
    }
}

pub fn fixed_points(params: &SimParams) -> Result<FixedPointSet> {
    fixed_points_for(params.mu, params.beta)
}

pub fn fixed_points_for(mu: f64, beta: f64) -> Result<FixedPointSet> {
    if !(mu > 0.0 && beta > 0.0 && mu.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "fixed points need mu > 0 and beta > 0 (mu = {mu}, beta = {beta})"
        )));
    }
    let u = (mu / beta).sqrt();
    Ok(FixedPointSet {
        origin: (0.0, 0.0),
        plus: (u, 0.0),
        minus: (-u, 0.0),
    })
}
