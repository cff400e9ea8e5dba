//! Wavefunctions sampled on a uniform 1-D grid, and numerical action of
//! normal-ordered operators on them.
//!
//! `q` acts by multiplication and `p = -i hbar d/dx` by a spectral
//! derivative, so expectation values of polynomial operators are accurate
//! to near machine precision for smooth, well-contained states.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::algebra::OperatorPoly;
use crate::error::{Error, Result};
use crate::format::format_g;
use crate::spectral::{pairwise_sum, SpectralAxis};

/// Boundary amplitude above which a state is considered cut off by the grid.
pub const BOUNDARY_TOLERANCE: f64 = 1e-14;
/// Spectral tail mass above which spectral derivatives are not trusted.
pub const SPECTRAL_TAIL_LIMIT: f64 = 1e-8;

/// Uniform grid `x_j = x_min + j dx`, `j = 0..nx`, periodic for FFT purposes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub dx: f64,
    pub nx: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, dx: f64, nx: usize) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite() && x_min.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacing must be positive and finite, got {dx}")));
        }
        if nx < 4 || !nx.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("point count must be a power of two >= 4, got {nx}")));
        }
        Ok(GridSpec { x_min, dx, nx })
    }

    /// `nx` points covering `[x_min, x_max)`.
    pub fn from_range(nx: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if !(x_max > x_min) {
            return Err(Error::InvalidGrid(format!("empty range [{x_min}, {x_max})")));
        }
        GridSpec::new(x_min, (x_max - x_min) / nx as f64, nx)
    }

    /// 512 points on `[-12, 12)`.
    pub fn desk() -> Self {
        GridSpec::from_range(512, -12.0, 12.0).expect("valid default grid")
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|j| self.x(j)).collect()
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.nx - 1)
    }

    /// Conjugate momentum grid `p_k = 2 pi hbar (k - nx/2) / (nx dx)`.
    pub fn momenta(&self, hbar: f64) -> Vec<f64> {
        (0..self.nx)
            .map(|k| 2.0 * PI * hbar * (k as f64 - (self.nx / 2) as f64) / (self.nx as f64 * self.dx))
            .collect()
    }

    /// Largest momentum magnitude representable on the grid, `pi hbar / dx`.
    pub fn p_max(&self, hbar: f64) -> f64 {
        PI * hbar / self.dx
    }
}

/// Complex samples of a wavefunction.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveGrid {
    pub grid: GridSpec,
    pub hbar: f64,
    pub values: Vec<Complex64>,
}

impl WaveGrid {
    pub fn new(grid: GridSpec, hbar: f64, values: Vec<Complex64>) -> Result<Self> {
        check_hbar(hbar)?;
        if values.len() != grid.nx {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.nx,
                values.len()
            )));
        }
        Ok(WaveGrid { grid, hbar, values })
    }

    /// `<self|other> = Σ conj(self) other dx`.
    pub fn inner(&self, other: &WaveGrid) -> Complex64 {
        let terms: Vec<Complex64> = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).collect();
        pairwise_sum(&terms) * self.grid.dx
    }

    pub fn norm_sqr(&self) -> f64 {
        let terms: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        pairwise_sum(&terms) * self.grid.dx
    }

    /// Largest amplitude at the two grid ends.
    pub fn boundary_amplitude(&self) -> f64 {
        self.values[0].norm().max(self.values[self.grid.nx - 1].norm())
    }

    /// `psi(-x)`, assuming a grid symmetric about the origin.
    pub fn reflected(&self) -> WaveGrid {
        let n = self.grid.nx;
        let values = (0..n).map(|j| if j == 0 { self.values[0] } else { self.values[n - j] }).collect();
        WaveGrid { values, ..self.clone() }
    }

    /// CSV with header `x,re,im`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,re,im")?;
        for (j, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{},{}", format_g(self.grid.x(j), 17), format_g(v.re, 17), format_g(v.im, 17))?;
        }
        Ok(())
    }
}

fn check_hbar(hbar: f64) -> Result<()> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")))
    }
}

fn check_boundary(psi: WaveGrid) -> Result<WaveGrid> {
    let edge = psi.boundary_amplitude();
    if edge >= BOUNDARY_TOLERANCE {
        return Err(Error::GridTooNarrow { value: edge, limit: BOUNDARY_TOLERANCE });
    }
    Ok(psi)
}

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence.
/// Intended for `n <= 64`.
pub fn hermite(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Normalized oscillator eigenfunction at `hbar = 1`, evaluated by the
/// stable recurrence for `H_n(x) e^{-x^2/2} / sqrt(2^n n! sqrt(pi))`.
fn unit_eigenfunction(n: u32, x: f64) -> f64 {
    let mut prev = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = 2f64.sqrt() * x * prev;
    for k in 1..n {
        let k = k as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * x * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Oscillator eigenstate (`m = omega = 1`) for general hbar:
/// `psi_n(x) = hbar^{-1/4} phi_n(x / sqrt(hbar))`.
pub fn ho_eigenstate(n: u32, grid: &GridSpec, hbar: f64) -> Result<WaveGrid> {
    check_hbar(hbar)?;
    let required = 1.5 * (hbar * (2 * n + 1) as f64).sqrt();
    let p_max = grid.p_max(hbar);
    if p_max <= required {
        return Err(Error::Unresolved { n, p_max, required });
    }
    let scale = hbar.sqrt();
    let amp = hbar.powf(-0.25);
    let values = grid
        .xs()
        .into_iter()
        .map(|x| Complex64::new(amp * unit_eigenfunction(n, x / scale), 0.0))
        .collect();
    check_boundary(WaveGrid { grid: *grid, hbar, values })
}

/// Normalized Gaussian `(pi alpha^2)^{-1/4} exp(-(x-x0)^2 / 2 alpha^2 + i k0 x)`,
/// so that `Δx = alpha / sqrt(2)` and `<p> = hbar k0`.
pub fn gaussian_packet(x0: f64, k0: f64, alpha: f64, grid: &GridSpec, hbar: f64) -> Result<WaveGrid> {
    check_hbar(hbar)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let norm = (PI * alpha * alpha).powf(-0.25);
    let values = grid
        .xs()
        .into_iter()
        .map(|x| {
            let envelope = norm * (-(x - x0).powi(2) / (2.0 * alpha * alpha)).exp();
            Complex64::from_polar(envelope, k0 * x)
        })
        .collect();
    check_boundary(WaveGrid { grid: *grid, hbar, values })
}

/// Apply a normal-ordered operator: each word `q^a p^b` acts as
/// `x^a (-i hbar d/dx)^b`.
pub fn apply_operator(op: &OperatorPoly, psi: &WaveGrid) -> Result<WaveGrid> {
    let n = psi.grid.nx;
    let axis = SpectralAxis::new(n, psi.grid.dx);
    let mut spectrum = psi.values.clone();
    axis.forward(&mut spectrum);
    let tail = axis.tail_fraction(&spectrum);
    if tail > SPECTRAL_TAIL_LIMIT {
        return Err(Error::SpectralResolution { tail, limit: SPECTRAL_TAIL_LIMIT });
    }

    let max_b = op.terms().map(|(&(_, b), _)| b).max().unwrap_or(0);
    // p^b psi for each needed b
    let mut p_powers: Vec<Option<Vec<Complex64>>> = vec![None; max_b as usize + 1];
    for (&(_, b), _) in op.terms() {
        if p_powers[b as usize].is_some() {
            continue;
        }
        if b == 0 {
            p_powers[0] = Some(psi.values.clone());
            continue;
        }
        let mut buf: Vec<Complex64> = spectrum
            .iter()
            .zip(axis.wavenumbers())
            .map(|(&v, &k)| v * (psi.hbar * k).powi(b as i32))
            .collect();
        axis.inverse(&mut buf);
        p_powers[b as usize] = Some(buf);
    }

    let xs = psi.grid.xs();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (&(a, b), c) in op.terms() {
        let c = c.eval(psi.hbar);
        let pb = p_powers[b as usize].as_ref().expect("computed above");
        for j in 0..n {
            out[j] += c * xs[j].powi(a as i32) * pb[j];
        }
    }
    Ok(WaveGrid { grid: psi.grid, hbar: psi.hbar, values: out })
}

/// `<psi| op |psi>` on the grid.
pub fn expectation(op: &OperatorPoly, psi: &WaveGrid) -> Result<Complex64> {
    let applied = apply_operator(op, psi)?;
    Ok(psi.inner(&applied))
}
