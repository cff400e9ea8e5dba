//! Phase-space averages and the oscillator dispersion table.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::format::format_g;
use crate::quantizer::PhasePoly;
use crate::wavefunctions::{ho_eigenstate, GridSpec};
use crate::wigner::{ho_wigner_analytic, wigner_transform, PhaseGrid, WignerGrid};

/// Variances below this are treated as quadrature failure, not round-off.
pub const VARIANCE_FLOOR: f64 = -1e-9;

/// `∫∫ f(q, p) F(q, p) dq dp`, with hbar in `f` replaced by `F.hbar`.
pub fn phase_expectation(f: &PhasePoly, dist: &WignerGrid) -> Result<f64> {
    let mut terms = Vec::new();
    for ((n, m), c) in f.numeric_terms(dist.hbar) {
        if c.im != 0.0 {
            return Err(Error::NonRealSymbol);
        }
        terms.push((n as i32, m as i32, c.re));
    }
    let xs = dist.x_values();
    let ps = dist.p_values();
    let value = dist.integrate_with(|ix, ip| {
        let (x, p) = (xs[ix], ps[ip]);
        terms.iter().map(|&(n, m, c)| c * x.powi(n) * p.powi(m)).sum()
    });
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite)
    }
}

/// Moments of one distribution for the oscillator `E = (p^2 + omega^2 q^2) / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub n_label: Option<u32>,
    pub mean_e: f64,
    pub delta_x: f64,
    pub delta_p: f64,
    pub uncertainty_product: f64,
    pub delta_e: f64,
    pub delta_t: f64,
    pub energy_band_low: f64,
    pub energy_band_high: f64,
    pub omega: f64,
    pub hbar: f64,
}

fn root_variance(name: &'static str, second: f64, first: f64) -> Result<f64> {
    let var = second - first * first;
    if var < VARIANCE_FLOOR {
        return Err(Error::NegativeVariance { name, value: var });
    }
    Ok(var.max(0.0).sqrt())
}

/// Means and dispersions of position, momentum and oscillator energy.
pub fn dispersion_report(dist: &WignerGrid, omega: f64) -> Result<MomentReport> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
    }
    let norm = dist.integral();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(norm));
    }
    let xs = dist.x_values();
    let ps = dist.p_values();
    let w2 = omega * omega;
    let moment = |g: &(dyn Fn(f64, f64) -> f64 + Sync)| -> Result<f64> {
        let v = dist.integrate_with(|ix, ip| g(xs[ix], ps[ip]));
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite)
        }
    };
    let mq = moment(&|x, _| x)?;
    let mp = moment(&|_, p| p)?;
    let mq2 = moment(&|x, _| x * x)?;
    let mp2 = moment(&|_, p| p * p)?;
    let me = moment(&|x, p| 0.5 * (p * p + w2 * x * x))?;
    let me2 = moment(&|x, p| {
        let e = 0.5 * (p * p + w2 * x * x);
        e * e
    })?;
    let delta_x = root_variance("q", mq2, mq)?;
    let delta_p = root_variance("p", mp2, mp)?;
    let delta_e = root_variance("E", me2, me)?;
    Ok(MomentReport {
        n_label: None,
        mean_e: me,
        delta_x,
        delta_p,
        uncertainty_product: delta_x * delta_p,
        delta_e,
        delta_t: 1.0 / omega,
        energy_band_low: me - delta_e,
        energy_band_high: me + delta_e,
        omega,
        hbar: dist.hbar,
    })
}

/// Where the oscillator distributions come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableSource {
    /// Laguerre closed form sampled on the grid.
    Analytic,
    /// FFT Wigner transform of the sampled eigenfunction.
    Transform,
}

/// One [`MomentReport`] per eigenstate `n = 0..=n_max` at `omega = 1`.
pub fn oscillator_table_with(n_max: u32, source: TableSource, grid: &GridSpec, hbar: f64) -> Result<Vec<MomentReport>> {
    if n_max > 20 {
        return Err(Error::InvalidArgument(format!("n_max must be <= 20, got {n_max}")));
    }
    let axes = PhaseGrid::for_wavefunction(grid, hbar);
    (0..=n_max)
        .map(|n| {
            let dist = match source {
                TableSource::Analytic => ho_wigner_analytic(n, &axes, hbar),
                TableSource::Transform => wigner_transform(&ho_eigenstate(n, grid, hbar)?)?,
            };
            let mut report = dispersion_report(&dist, 1.0)?;
            report.n_label = Some(n);
            Ok(report)
        })
        .collect()
}

/// The oscillator table on the default grid at `hbar = omega = 1`.
pub fn oscillator_table(n_max: u32) -> Result<Vec<MomentReport>> {
    oscillator_table_with(n_max, TableSource::Analytic, &GridSpec::desk(), 1.0)
}

/// CSV `n,energy,dq_dp,dE,dt,band_low,band_high`, 12 significant digits.
pub fn write_table_csv<W: Write>(rows: &[MomentReport], mut w: W) -> io::Result<()> {
    writeln!(w, "n,energy,dq_dp,dE,dt,band_low,band_high")?;
    for r in rows {
        let n = r.n_label.map(|n| n.to_string()).unwrap_or_default();
        let cols = [r.mean_e, r.uncertainty_product, r.delta_e, r.delta_t, r.energy_band_low, r.energy_band_high];
        let cols: Vec<String> = cols.iter().map(|v| format_g(*v, 12)).collect();
        writeln!(w, "{n},{}", cols.join(","))?;
    }
    Ok(())
}
