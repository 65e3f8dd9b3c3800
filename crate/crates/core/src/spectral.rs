//! Discrete Fourier analysis and synthesis on the periodic grid.
//!
//! Coefficients use the normalization `c_m = (1/N) sum_j u_j exp(-i k_m x_j)`,
//! so that `u_j = sum_m c_m exp(i k_m x_j)` and band-limited fields have
//! coefficients equal to their continuum Fourier coefficients. Storage order
//! follows the grid: `m = 0, .., N/2 - 1, -N/2, .., -1`.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::params::{mode_index, Dealias, Grid};

/// Fourier coefficients of a grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        Spectrum { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of mode `m`, `-N/2 <= m < N/2`.
    pub fn coeff(&self, m: i64) -> Option<Complex64> {
        let n = self.coeffs.len() as i64;
        if m < -n / 2 || m >= n / 2 {
            return None;
        }
        Some(self.coeffs[m.rem_euclid(n) as usize])
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// FFT plans and wavenumbers for one grid, plus the doubled grid used for
/// dealiased cubes. Cheap to clone; plans are shared.
#[derive(Clone)]
pub struct Transform {
    n: usize,
    k: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    forward_padded: Arc<dyn Fft<f64>>,
    inverse_padded: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform").field("n", &self.n).finish()
    }
}

impl Transform {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        Transform {
            n,
            k: grid.wavenumbers().to_vec(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            forward_padded: planner.plan_fft_forward(2 * n),
            inverse_padded: planner.plan_fft_inverse(2 * n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.n,
                found: len,
            })
        }
    }

    /// Normalized forward transform. Caller guarantees `samples.len() == n`.
    pub fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(samples.len(), self.n);
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    /// Synthesis, keeping only the real part.
    pub fn inverse_real(&self, coeffs: &[Complex64]) -> Vec<f64> {
        self.inverse_complex(coeffs)
            .into_iter()
            .map(|c| c.re)
            .collect()
    }

    fn inverse_complex(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(coeffs.len(), self.n);
        let mut buf = coeffs.to_vec();
        self.inverse.process(&mut buf);
        buf
    }

    /// Multiplies each coefficient by `symbol(slot)` and synthesizes.
    fn apply_symbol(&self, samples: &[f64], symbol: impl Fn(usize) -> Complex64) -> Vec<f64> {
        let mut c = self.forward(samples);
        for (slot, ci) in c.iter_mut().enumerate() {
            *ci *= symbol(slot);
        }
        self.inverse_real(&c)
    }

    /// `u_xx` via multiplication by `-k^2`, Nyquist mode included.
    pub fn second_derivative(&self, samples: &[f64]) -> Result<Vec<f64>> {
        self.check_len(samples.len())?;
        Ok(self.apply_symbol(samples, |slot| {
            Complex64::new(-self.k[slot] * self.k[slot], 0.0)
        }))
    }

    /// `u_x` via multiplication by `i k`, Nyquist mode annihilated.
    pub fn first_derivative(&self, samples: &[f64]) -> Result<Vec<f64>> {
        self.check_len(samples.len())?;
        let nyquist = self.n / 2;
        Ok(self.apply_symbol(samples, |slot| {
            if slot == nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, self.k[slot])
            }
        }))
    }

    /// Pointwise cube, or its alias-free projection onto the grid modes.
    pub fn cube(&self, samples: &[f64], mode: Dealias) -> Result<Vec<f64>> {
        self.check_len(samples.len())?;
        Ok(match mode {
            Dealias::None => samples.iter().map(|&u| u * u * u).collect(),
            Dealias::Pad2x => self.inverse_real(&self.cube_padded(&self.forward(samples))),
        })
    }

    /// Coefficients of the cube of the field with coefficients `coeffs`,
    /// evaluated on the doubled grid and truncated back to `N` modes.
    ///
    /// The Nyquist coefficient is split evenly between `+N/2` and `-N/2` on
    /// the doubled grid so the padded field stays real; on the way back both
    /// halves fold onto the single Nyquist slot.
    pub(crate) fn cube_padded(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let half = n / 2;
        let n2 = 2 * n;
        let slot2 = |m: i64| m.rem_euclid(n2 as i64) as usize;

        let mut padded = vec![Complex64::new(0.0, 0.0); n2];
        for (slot, &c) in coeffs.iter().enumerate() {
            if slot == half {
                padded[slot2(half as i64)] = c * 0.5;
                padded[slot2(-(half as i64))] = c * 0.5;
            } else {
                padded[slot2(mode_index(slot, n))] = c;
            }
        }
        self.inverse_padded.process(&mut padded);
        for z in padded.iter_mut() {
            let u = z.re;
            *z = Complex64::new(u * u * u, 0.0);
        }
        self.forward_padded.process(&mut padded);
        let scale = 1.0 / n2 as f64;

        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (slot, o) in out.iter_mut().enumerate() {
            *o = if slot == half {
                (padded[slot2(half as i64)] + padded[slot2(-(half as i64))]) * scale
            } else {
                padded[slot2(mode_index(slot, n))] * scale
            };
        }
        out
    }

    /// Cube coefficients for either dealiasing mode.
    pub(crate) fn cube_spectrum(&self, samples: &[f64], mode: Dealias) -> Vec<Complex64> {
        match mode {
            Dealias::None => {
                let cubed: Vec<f64> = samples.iter().map(|&u| u * u * u).collect();
                self.forward(&cubed)
            }
            Dealias::Pad2x => self.cube_padded(&self.forward(samples)),
        }
    }
}

fn check_grid_len(len: usize, grid: &Grid) -> Result<()> {
    if len == grid.n() {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected: grid.n(),
            found: len,
        })
    }
}

pub fn dft_forward(samples: &[f64], grid: &Grid) -> Result<Spectrum> {
    check_grid_len(samples.len(), grid)?;
    Ok(Spectrum::from_coeffs(Transform::new(grid).forward(samples)))
}

/// Synthesizes real samples, rejecting spectra whose synthesis carries an
/// imaginary residue above `1e-13 * max(1, N max|c|)`.
pub fn dft_inverse(spec: &Spectrum, grid: &Grid) -> Result<Vec<f64>> {
    check_grid_len(spec.len(), grid)?;
    let values = Transform::new(grid).inverse_complex(spec.coeffs());
    let tolerance = 1e-13 * (spec.max_abs() * grid.n() as f64).max(1.0);
    let residue = values.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residue > tolerance || !residue.is_finite() {
        return Err(Error::NonHermitianSpectrum { residue, tolerance });
    }
    Ok(values.into_iter().map(|z| z.re).collect())
}

pub fn second_derivative(samples: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    check_grid_len(samples.len(), grid)?;
    Transform::new(grid).second_derivative(samples)
}

pub fn first_derivative(samples: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    check_grid_len(samples.len(), grid)?;
    Transform::new(grid).first_derivative(samples)
}

pub fn cube_dealiased(samples: &[f64], grid: &Grid, mode: Dealias) -> Result<Vec<f64>> {
    check_grid_len(samples.len(), grid)?;
    Transform::new(grid).cube(samples, mode)
}
