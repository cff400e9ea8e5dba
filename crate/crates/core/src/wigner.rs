//! Wigner phase-space distributions: the transform of a sampled
//! wavefunction, closed forms for oscillator eigenstates and Gaussian
//! packets, marginals and negativity diagnostics.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::format::format_g;
use crate::spectral::pairwise_sum;
use crate::wavefunctions::{GridSpec, WaveGrid};

/// Largest imaginary residue tolerated in the transform output.
pub const REALNESS_TOLERANCE: f64 = 1e-10;
/// Largest boundary amplitude accepted by [`wigner_transform`].
pub const TRANSFORM_TAIL_LIMIT: f64 = 1e-12;

/// Position and momentum axes of a phase-space grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseGrid {
    pub x: GridSpec,
    pub p: GridSpec,
}

impl PhaseGrid {
    pub fn new(x: GridSpec, p: GridSpec) -> Self {
        PhaseGrid { x, p }
    }

    /// Momentum axis produced by [`wigner_transform`] for a wavefunction on
    /// `x`: `nx` points spaced `pi hbar / (nx dx)`, centred on zero.
    pub fn for_wavefunction(x: &GridSpec, hbar: f64) -> Self {
        let dp = PI * hbar / (x.nx as f64 * x.dx);
        let p = GridSpec { x_min: -((x.nx / 2) as f64) * dp, dx: dp, nx: x.nx };
        PhaseGrid { x: *x, p }
    }

    /// Same axis for position and momentum.
    pub fn square(axis: GridSpec) -> Self {
        PhaseGrid { x: axis, p: axis }
    }

    pub fn len(&self) -> usize {
        self.x.nx * self.p.nx
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell(&self) -> f64 {
        self.x.dx * self.p.dx
    }
}

/// Real phase-space distribution, row-major with the momentum index
/// fastest: `values[ix * np + ip]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub axes: PhaseGrid,
    pub hbar: f64,
    pub values: Vec<f64>,
}

pub(crate) fn trapezoid_weights(n: usize) -> Vec<f64> {
    let mut w = vec![1.0; n];
    if n > 1 {
        w[0] = 0.5;
        w[n - 1] = 0.5;
    }
    w
}

impl WignerGrid {
    pub fn from_fn(axes: PhaseGrid, hbar: f64, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        let np = axes.p.nx;
        let mut values = vec![0.0; axes.len()];
        values.par_chunks_mut(np).enumerate().for_each(|(ix, row)| {
            let x = axes.x.x(ix);
            for (ip, v) in row.iter_mut().enumerate() {
                *v = f(x, axes.p.x(ip));
            }
        });
        WignerGrid { axes, hbar, values }
    }

    pub fn nx(&self) -> usize {
        self.axes.x.nx
    }

    pub fn np(&self) -> usize {
        self.axes.p.nx
    }

    pub fn at(&self, ix: usize, ip: usize) -> f64 {
        self.values[ix * self.np() + ip]
    }

    pub fn x_values(&self) -> Vec<f64> {
        self.axes.x.xs()
    }

    pub fn p_values(&self) -> Vec<f64> {
        self.axes.p.xs()
    }

    /// Trapezoid integral of `weight(ix, ip) · F` over the grid.
    pub fn integrate_with(&self, weight: impl Fn(usize, usize) -> f64 + Sync) -> f64 {
        let np = self.np();
        let wp = trapezoid_weights(np);
        let wx = trapezoid_weights(self.nx());
        let rows: Vec<f64> = self
            .values
            .par_chunks(np)
            .enumerate()
            .map(|(ix, row)| {
                let terms: Vec<f64> = row.iter().enumerate().map(|(ip, &f)| wp[ip] * weight(ix, ip) * f).collect();
                wx[ix] * pairwise_sum(&terms)
            })
            .collect();
        pairwise_sum(&rows) * self.axes.cell()
    }

    pub fn integral(&self) -> f64 {
        self.integrate_with(|_, _| 1.0)
    }

    pub fn max_abs_diff(&self, other: &WignerGrid) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Long-format CSV `x,p,F`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,p,F")?;
        let ps = self.p_values();
        for (ix, x) in self.x_values().into_iter().enumerate() {
            let xs = format_g(x, 17);
            for (ip, p) in ps.iter().enumerate() {
                writeln!(w, "{},{},{}", xs, format_g(*p, 17), format_g(self.at(ix, ip), 17))?;
            }
        }
        Ok(())
    }
}

/// `F(x,p) = (1/2 pi hbar) ∫ psi*(x - s/2) psi(x + s/2) e^{-i p s / hbar} ds`.
///
/// The lag `s` runs over multiples of `2 dx` so both arguments land on grid
/// points; samples outside the grid are zero rather than wrapped. Each row is
/// one FFT, giving momenta on [`PhaseGrid::for_wavefunction`].
pub fn wigner_transform(psi: &WaveGrid) -> Result<WignerGrid> {
    let norm = psi.norm_sqr();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(norm));
    }
    let edge = psi.boundary_amplitude();
    if edge >= TRANSFORM_TAIL_LIMIT {
        return Err(Error::GridTooNarrow { value: edge, limit: TRANSFORM_TAIL_LIMIT });
    }
    let n = psi.grid.nx;
    let axes = PhaseGrid::for_wavefunction(&psi.grid, psi.hbar);
    let fft = FftPlanner::new().plan_fft_forward(n);
    let scale = psi.grid.dx / (PI * psi.hbar);
    let half = (n / 2) as i64;
    let sample = |j: i64| -> Complex64 {
        if (0..n as i64).contains(&j) {
            psi.values[j as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    };

    let rows: Vec<(Vec<f64>, f64)> = (0..n)
        .into_par_iter()
        .map(|ix| {
            let j = ix as i64;
            let mut buf: Vec<Complex64> = (0..n as i64)
                .map(|m| {
                    let l = if m < half { m } else { m - n as i64 };
                    sample(j - l).conj() * sample(j + l)
                })
                .collect();
            fft.process(&mut buf);
            let mut row = vec![0.0; n];
            let mut residue = 0.0f64;
            for (k, r) in row.iter_mut().enumerate() {
                // momentum index k sits at FFT bin (k - n/2) mod n
                let v = buf[(k + n / 2) % n] * scale;
                *r = v.re;
                residue = residue.max(v.im.abs());
            }
            (row, residue)
        })
        .collect();

    let residue = rows.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    if residue > REALNESS_TOLERANCE {
        return Err(Error::NotReal(residue));
    }
    let values = rows.into_iter().flat_map(|(row, _)| row).collect();
    Ok(WignerGrid { axes, hbar: psi.hbar, values })
}

/// Laguerre polynomial `L_n(x)` by `(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}`.
pub fn laguerre(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `F_n = ((-1)^n / pi hbar) L_n(2H) e^{-H}` with `H = (x^2 + p^2) / hbar`,
/// the Wigner function of the `m = omega = 1` oscillator eigenstate.
pub fn ho_wigner_analytic(n: u32, axes: &PhaseGrid, hbar: f64) -> WignerGrid {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let pre = sign / (PI * hbar);
    WignerGrid::from_fn(*axes, hbar, |x, p| {
        let h = (x * x + p * p) / hbar;
        pre * laguerre(n, 2.0 * h) * (-h).exp()
    })
}

/// Wigner function of [`crate::wavefunctions::gaussian_packet`]:
/// `(1/pi hbar) exp(-(x-x0)^2/alpha^2 - alpha^2 (p - hbar k0)^2 / hbar^2)`.
pub fn gaussian_wigner_analytic(x0: f64, k0: f64, alpha: f64, axes: &PhaseGrid, hbar: f64) -> WignerGrid {
    let pre = 1.0 / (PI * hbar);
    WignerGrid::from_fn(*axes, hbar, |x, p| {
        let dx = (x - x0) / alpha;
        let dp = alpha * (p - hbar * k0) / hbar;
        pre * (-dx * dx - dp * dp).exp()
    })
}

/// Position and momentum densities, each integrated with the trapezoid rule.
pub fn marginals(f: &WignerGrid) -> (Vec<f64>, Vec<f64>) {
    let (nx, np) = (f.nx(), f.np());
    let wx = trapezoid_weights(nx);
    let wp = trapezoid_weights(np);
    let x_density: Vec<f64> = f
        .values
        .par_chunks(np)
        .map(|row| {
            let terms: Vec<f64> = row.iter().zip(&wp).map(|(v, w)| v * w).collect();
            pairwise_sum(&terms) * f.axes.p.dx
        })
        .collect();
    let p_density: Vec<f64> = (0..np)
        .into_par_iter()
        .map(|ip| {
            let terms: Vec<f64> = (0..nx).map(|ix| f.at(ix, ip) * wx[ix]).collect();
            pairwise_sum(&terms) * f.axes.x.dx
        })
        .collect();
    (x_density, p_density)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Negativity {
    pub min_value: f64,
    /// `∫ |min(F, 0)| dx dp`.
    pub negative_volume: f64,
}

pub fn negativity(f: &WignerGrid) -> Negativity {
    let min_value = f.values.iter().copied().fold(f64::INFINITY, f64::min);
    let np = f.np();
    let negative_volume = f.integrate_with(|ix, ip| if f.values[ix * np + ip] < 0.0 { -1.0 } else { 0.0 });
    Negativity { min_value, negative_volume }
}

/// Sign changes of `F(x, 0)` for `x > 0`, skipping samples with
/// `|F| <= floor · max|F|`. For an oscillator eigenstate this counts the
/// nodal rings.
pub fn radial_sign_changes(f: &WignerGrid, floor: f64) -> usize {
    let ps = f.p_values();
    let ip = (0..ps.len()).min_by(|&a, &b| ps[a].abs().total_cmp(&ps[b].abs())).unwrap_or(0);
    let peak = f.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut last = 0.0f64;
    let mut changes = 0;
    for ix in 0..f.nx() {
        if f.axes.x.x(ix) <= 0.0 {
            continue;
        }
        let v = f.at(ix, ip);
        if v.abs() <= floor * peak {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            changes += 1;
        }
        last = v;
    }
    changes
}
