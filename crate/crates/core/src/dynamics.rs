//! Classical Liouville and quantum Moyal evolution of phase-space
//! distributions for `H = p^2 / 2m + V(q)` with polynomial `V`.
//!
//! Both right-hand sides are evaluated spectrally on a periodic box. For a
//! polynomial potential the Moyal sine series terminates, so it is summed
//! exactly:
//!
//! ```text
//! dF/dt = -(p/m) dF/dx + Σ_l (-1)^l (hbar/2)^(2l) / (2l+1)! V^(2l+1)(x) d^(2l+1)F/dp^(2l+1)
//! ```
//!
//! The Liouville equation keeps only `l = 0`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::format_g;
use crate::quantizer::PhasePoly;
use crate::spectral::SpectralAxis;
use crate::wavefunctions::SPECTRAL_TAIL_LIMIT;
use crate::wigner::{PhaseGrid, WignerGrid};

/// Normalization drift that aborts an integration.
pub const INSTABILITY_DRIFT: f64 = 1e-3;

/// `H = p^2 / 2m + V(q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    pub potential: PhasePoly,
    pub mass: f64,
}

impl HamiltonianSpec {
    pub fn new(potential: PhasePoly, mass: f64) -> Result<Self> {
        if potential.p_degree() != 0 {
            return Err(Error::InvalidPotential(format!("{potential} depends on p")));
        }
        if !potential.is_real() {
            return Err(Error::InvalidPotential(format!("{potential} has imaginary coefficients")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
        }
        Ok(HamiltonianSpec { potential, mass })
    }

    /// `V = q^2 / 2`.
    pub fn harmonic() -> Self {
        HamiltonianSpec::new("1/2 q^2".parse().expect("literal"), 1.0).expect("valid")
    }

    /// `V = q^4 / 4`.
    pub fn quartic() -> Self {
        HamiltonianSpec::new("1/4 q^4".parse().expect("literal"), 1.0).expect("valid")
    }

    /// `V^(k)(x)` at each point, with hbar substituted.
    fn potential_derivative(&self, k: u32, xs: &[f64], hbar: f64) -> Vec<f64> {
        let d = self.potential.derivative(k, 0);
        let terms: Vec<(i32, f64)> = d.numeric_terms(hbar).into_iter().map(|((n, _), c)| (n as i32, c.re)).collect();
        xs.iter().map(|&x| terms.iter().map(|&(n, c)| c * x.powi(n)).sum()).collect()
    }

    pub fn energy(&self, x: f64, p: f64, hbar: f64) -> f64 {
        p * p / (2.0 * self.mass) + self.potential.eval(x, 0.0, hbar).re
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dynamics {
    Liouville,
    Moyal,
}

impl FromStr for Dynamics {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "liouville" => Ok(Dynamics::Liouville),
            "moyal" => Ok(Dynamics::Moyal),
            _ => Err(Error::InvalidArgument(format!("unknown dynamics {s:?}"))),
        }
    }
}

/// Precomputed spectral generator for one Hamiltonian on one grid.
struct Generator {
    x_axis: SpectralAxis,
    p_axis: SpectralAxis,
    nx: usize,
    np: usize,
    /// `-p / m` for each momentum column.
    drift: Vec<f64>,
    /// `(order, coefficient per x row)` for the momentum-derivative terms.
    kicks: Vec<(u32, Vec<f64>)>,
}

impl Generator {
    fn new(h: &HamiltonianSpec, axes: &PhaseGrid, hbar: f64, dynamics: Dynamics) -> Self {
        let xs = axes.x.xs();
        let degree = h.potential.q_degree();
        let mut kicks = Vec::new();
        let mut l = 0u32;
        loop {
            let order = 2 * l + 1;
            if order > degree || (dynamics == Dynamics::Liouville && l > 0) {
                break;
            }
            let mut factor = (hbar / 2.0).powi(2 * l as i32) / (1..=order).map(f64::from).product::<f64>();
            if l % 2 == 1 {
                factor = -factor;
            }
            let coeffs: Vec<f64> = h.potential_derivative(order, &xs, hbar).into_iter().map(|v| v * factor).collect();
            if coeffs.iter().any(|&c| c != 0.0) {
                kicks.push((order, coeffs));
            }
            l += 1;
        }
        Generator {
            x_axis: SpectralAxis::new(axes.x.nx, axes.x.dx),
            p_axis: SpectralAxis::new(axes.p.nx, axes.p.dx),
            nx: axes.x.nx,
            np: axes.p.nx,
            drift: axes.p.xs().into_iter().map(|p| -p / h.mass).collect(),
            kicks,
        }
    }

    fn apply(&self, f: &[f64], out: &mut [f64]) {
        let (nx, np) = (self.nx, self.np);

        // momentum-derivative terms: one forward and one inverse FFT per row
        out.par_chunks_mut(np).enumerate().for_each(|(ix, row)| {
            if self.kicks.is_empty() {
                row.fill(0.0);
                return;
            }
            let mut spec: Vec<Complex64> = f[ix * np..(ix + 1) * np].iter().map(|&v| Complex64::new(v, 0.0)).collect();
            self.p_axis.forward(&mut spec);
            for (j, s) in spec.iter_mut().enumerate() {
                let mut m = Complex64::new(0.0, 0.0);
                for (order, coeffs) in &self.kicks {
                    m += self.p_axis.derivative_factor(j, *order) * coeffs[ix];
                }
                *s *= m;
            }
            self.p_axis.inverse(&mut spec);
            for (r, s) in row.iter_mut().zip(&spec) {
                *r = s.re;
            }
        });

        // -(p/m) dF/dx: one column per momentum value
        let columns: Vec<Vec<f64>> = (0..np)
            .into_par_iter()
            .map(|ip| {
                let mut spec: Vec<Complex64> = (0..nx).map(|ix| Complex64::new(f[ix * np + ip], 0.0)).collect();
                self.x_axis.forward(&mut spec);
                for (j, s) in spec.iter_mut().enumerate() {
                    *s *= self.x_axis.derivative_factor(j, 1) * self.drift[ip];
                }
                self.x_axis.inverse(&mut spec);
                spec.into_iter().map(|s| s.re).collect()
            })
            .collect();
        for (ip, col) in columns.iter().enumerate() {
            for (ix, v) in col.iter().enumerate() {
                out[ix * np + ip] += v;
            }
        }
    }
}

/// Fraction of spectral power in the outer 10% of bins, worst of both axes.
pub fn spectral_tail(dist: &WignerGrid) -> f64 {
    let (nx, np) = (dist.nx(), dist.np());
    let x_axis = SpectralAxis::new(nx, dist.axes.x.dx);
    let p_axis = SpectralAxis::new(np, dist.axes.p.dx);
    let mut p_power = vec![Complex64::new(0.0, 0.0); np];
    for row in dist.values.chunks(np) {
        let mut spec: Vec<Complex64> = row.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        p_axis.forward(&mut spec);
        for (acc, s) in p_power.iter_mut().zip(&spec) {
            acc.re += s.norm_sqr();
        }
    }
    let mut x_power = vec![Complex64::new(0.0, 0.0); nx];
    for ip in 0..np {
        let mut spec: Vec<Complex64> = (0..nx).map(|ix| Complex64::new(dist.at(ix, ip), 0.0)).collect();
        x_axis.forward(&mut spec);
        for (acc, s) in x_power.iter_mut().zip(&spec) {
            acc.re += s.norm_sqr();
        }
    }
    // tail_fraction squares its input, so pass amplitudes
    let to_amp = |v: Vec<Complex64>| -> Vec<Complex64> { v.into_iter().map(|c| Complex64::new(c.re.sqrt(), 0.0)).collect() };
    p_axis.tail_fraction(&to_amp(p_power)).max(x_axis.tail_fraction(&to_amp(x_power)))
}

fn check_resolution(dist: &WignerGrid) -> Result<()> {
    let tail = spectral_tail(dist);
    if tail > SPECTRAL_TAIL_LIMIT {
        return Err(Error::SpectralResolution { tail, limit: SPECTRAL_TAIL_LIMIT });
    }
    Ok(())
}

fn rhs(h: &HamiltonianSpec, dist: &WignerGrid, dynamics: Dynamics) -> Result<Vec<f64>> {
    check_resolution(dist)?;
    let gen = Generator::new(h, &dist.axes, dist.hbar, dynamics);
    let mut out = vec![0.0; dist.values.len()];
    gen.apply(&dist.values, &mut out);
    Ok(out)
}

/// `dF/dt = -(p/m) dF/dx + V'(x) dF/dp`, same layout as `dist.values`.
pub fn liouville_rhs(h: &HamiltonianSpec, dist: &WignerGrid) -> Result<Vec<f64>> {
    rhs(h, dist, Dynamics::Liouville)
}

/// Liouville terms plus the terminating odd-derivative Moyal corrections.
pub fn moyal_rhs(h: &HamiltonianSpec, dist: &WignerGrid) -> Result<Vec<f64>> {
    rhs(h, dist, Dynamics::Moyal)
}

/// Observables recorded along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tracker {
    Norm,
    MeanE,
    MeanE2,
    DeltaE,
    NegativityMin,
}

impl Tracker {
    pub const ALL: [Tracker; 5] = [Tracker::Norm, Tracker::MeanE, Tracker::MeanE2, Tracker::DeltaE, Tracker::NegativityMin];

    pub fn label(&self) -> &'static str {
        match self {
            Tracker::Norm => "norm",
            Tracker::MeanE => "mean_E",
            Tracker::MeanE2 => "mean_E2",
            Tracker::DeltaE => "delta_E",
            Tracker::NegativityMin => "negativity_min",
        }
    }
}

impl fmt::Display for Tracker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Tracker {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Tracker::ALL
            .into_iter()
            .find(|t| t.label() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown tracker {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct EvolveConfig {
    pub dynamics: Dynamics,
    pub dt: f64,
    pub steps: usize,
    pub trackers: Vec<Tracker>,
    /// Keep a copy of the distribution every this many steps.
    pub snapshot_every: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    /// `0, dt, ..., steps·dt`.
    pub times: Vec<f64>,
    pub tracked: Vec<(Tracker, Vec<f64>)>,
    pub frames: Vec<(f64, WignerGrid)>,
    pub final_state: WignerGrid,
    /// Largest `|∫F(t) − ∫F(0)|` seen.
    pub norm_drift: f64,
}

impl EvolutionResult {
    pub fn series(&self, t: Tracker) -> Option<&[f64]> {
        self.tracked.iter().find(|(k, _)| *k == t).map(|(_, v)| v.as_slice())
    }

    /// CSV `t,<tracker>,...`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header: Vec<&str> = std::iter::once("t").chain(self.tracked.iter().map(|(t, _)| t.label())).collect();
        writeln!(w, "{}", header.join(","))?;
        for (i, t) in self.times.iter().enumerate() {
            let mut row = vec![format_g(*t, 17)];
            row.extend(self.tracked.iter().map(|(_, s)| format_g(s[i], 17)));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// RK4 reaches `2√2` along the imaginary axis; keep a margin.
const RK4_IMAGINARY_REACH: f64 = 2.5;

/// Largest accepted step: the smaller of `0.5 · min(dx / max|p/m|, dp / max|V'|)`
/// and `2.5 / ρ`, where `ρ` bounds the generator's spectral radius including
/// the higher Moyal terms.
pub fn stability_bound(h: &HamiltonianSpec, axes: &PhaseGrid, hbar: f64, dynamics: Dynamics) -> f64 {
    let pi = std::f64::consts::PI;
    let p_max = axes.p.xs().into_iter().map(f64::abs).fold(0.0, f64::max) / h.mass;
    let force_max = h.potential_derivative(1, &axes.x.xs(), hbar).into_iter().map(f64::abs).fold(0.0, f64::max);
    let mut cfl = f64::INFINITY;
    if p_max > 0.0 {
        cfl = cfl.min(axes.x.dx / p_max);
    }
    if force_max > 0.0 {
        cfl = cfl.min(axes.p.dx / force_max);
    }

    let k_p = pi / axes.p.dx;
    let mut radius = p_max * pi / axes.x.dx;
    for (order, coeffs) in Generator::new(h, axes, hbar, dynamics).kicks {
        let c_max = coeffs.into_iter().map(f64::abs).fold(0.0, f64::max);
        radius += c_max * k_p.powi(order as i32);
    }
    let rk4 = if radius > 0.0 { RK4_IMAGINARY_REACH / radius } else { f64::INFINITY };
    (0.5 * cfl).min(rk4)
}

struct Observables {
    energy: Vec<f64>,
}

impl Observables {
    fn new(h: &HamiltonianSpec, axes: &PhaseGrid, hbar: f64) -> Self {
        let ps = axes.p.xs();
        let energy = axes.x.xs().into_iter().flat_map(|x| ps.iter().map(move |&p| (x, p))).map(|(x, p)| h.energy(x, p, hbar)).collect();
        Observables { energy }
    }

    fn record(&self, dist: &WignerGrid, trackers: &[Tracker], out: &mut [(Tracker, Vec<f64>)]) -> f64 {
        let np = dist.np();
        let e = &self.energy;
        let norm = dist.integral();
        let needs_e = trackers.iter().any(|t| matches!(t, Tracker::MeanE | Tracker::MeanE2 | Tracker::DeltaE));
        let (mean_e, mean_e2) = if needs_e {
            (
                dist.integrate_with(|ix, ip| e[ix * np + ip]),
                dist.integrate_with(|ix, ip| e[ix * np + ip] * e[ix * np + ip]),
            )
        } else {
            (0.0, 0.0)
        };
        for (t, series) in out.iter_mut() {
            series.push(match t {
                Tracker::Norm => norm,
                Tracker::MeanE => mean_e,
                Tracker::MeanE2 => mean_e2,
                Tracker::DeltaE => (mean_e2 - mean_e * mean_e).max(0.0).sqrt(),
                Tracker::NegativityMin => dist.values.iter().copied().fold(f64::INFINITY, f64::min),
            });
        }
        norm
    }
}

/// Fixed-step classical fourth-order Runge–Kutta integration.
pub fn evolve(h: &HamiltonianSpec, initial: &WignerGrid, config: &EvolveConfig) -> Result<EvolutionResult> {
    let dt = config.dt;
    if !(dt > 0.0 && dt.is_finite()) || config.steps == 0 {
        return Err(Error::InvalidArgument("dt must be positive and steps nonzero".into()));
    }
    let bound = stability_bound(h, &initial.axes, initial.hbar, config.dynamics);
    if dt > bound {
        return Err(Error::TimeStepTooLarge { dt, bound });
    }
    let norm0 = initial.integral();
    if (norm0 - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized(norm0));
    }
    check_resolution(initial)?;

    let gen = Generator::new(h, &initial.axes, initial.hbar, config.dynamics);
    let obs = Observables::new(h, &initial.axes, initial.hbar);
    let mut tracked: Vec<(Tracker, Vec<f64>)> = config.trackers.iter().map(|&t| (t, Vec::with_capacity(config.steps + 1))).collect();
    let mut frames = Vec::new();
    let mut times = Vec::with_capacity(config.steps + 1);

    let mut state = initial.clone();
    let len = state.values.len();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let mut stage = vec![0.0; len];
    let mut norm_drift = 0.0f64;

    times.push(0.0);
    obs.record(&state, &config.trackers, &mut tracked);
    if config.snapshot_every.is_some() {
        frames.push((0.0, state.clone()));
    }

    for step in 1..=config.steps {
        let y = &mut state.values;
        gen.apply(y, &mut k1);
        for i in 0..len {
            stage[i] = y[i] + 0.5 * dt * k1[i];
        }
        gen.apply(&stage, &mut k2);
        for i in 0..len {
            stage[i] = y[i] + 0.5 * dt * k2[i];
        }
        gen.apply(&stage, &mut k3);
        for i in 0..len {
            stage[i] = y[i] + dt * k3[i];
        }
        gen.apply(&stage, &mut k4);
        for i in 0..len {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        let t = step as f64 * dt;
        times.push(t);
        let norm = obs.record(&state, &config.trackers, &mut tracked);
        let drift = (norm - norm0).abs();
        if !(drift <= INSTABILITY_DRIFT) {
            return Err(Error::Unstable { step, drift });
        }
        norm_drift = norm_drift.max(drift);
        if let Some(every) = config.snapshot_every {
            if every > 0 && step % every == 0 {
                frames.push((t, state.clone()));
            }
        }
    }

    Ok(EvolutionResult { times, tracked, frames, final_state: state, norm_drift })
}

/// Exact harmonic flow (`m = omega = 1`) for time `theta`, realized by
/// bilinear resampling: `F_theta(x, p) = F(x cos θ − p sin θ, x sin θ + p cos θ)`.
pub fn rotate_reference(dist: &WignerGrid, theta: f64) -> WignerGrid {
    let (c, s) = (theta.cos(), theta.sin());
    let axes = dist.axes;
    let (nx, np) = (dist.nx(), dist.np());
    let sample = |ix: i64, ip: i64| -> f64 {
        if ix < 0 || ip < 0 || ix >= nx as i64 || ip >= np as i64 {
            0.0
        } else {
            dist.at(ix as usize, ip as usize)
        }
    };
    let snap = |v: f64| if (v - v.round()).abs() < 1e-9 { v.round() } else { v };
    let out = WignerGrid::from_fn(axes, dist.hbar, |x, p| {
        let fx = snap((x * c - p * s - axes.x.x_min) / axes.x.dx);
        let fp = snap((x * s + p * c - axes.p.x_min) / axes.p.dx);
        let (ix, ip) = (fx.floor(), fp.floor());
        let (tx, tp) = (fx - ix, fp - ip);
        let (ix, ip) = (ix as i64, ip as i64);
        (1.0 - tx) * (1.0 - tp) * sample(ix, ip)
            + tx * (1.0 - tp) * sample(ix + 1, ip)
            + (1.0 - tx) * tp * sample(ix, ip + 1)
            + tx * tp * sample(ix + 1, ip + 1)
    });
    // resampling moves the integral by O(dx^2); restore it
    let before = dist.integral();
    let after = out.integral();
    let mut out = out;
    if after != 0.0 {
        let scale = before / after;
        out.values.iter_mut().for_each(|v| *v *= scale);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunctions::GridSpec;

    fn box_axes(n: usize, half: f64) -> PhaseGrid {
        PhaseGrid::square(GridSpec::from_range(n, -half, half).unwrap())
    }

    #[test]
    fn uniform_distribution_is_stationary() {
        let axes = box_axes(32, 4.0);
        let f = WignerGrid::from_fn(axes, 1.0, |_, _| 1.0 / 64.0);
        for rhs in [liouville_rhs(&HamiltonianSpec::quartic(), &f).unwrap(), moyal_rhs(&HamiltonianSpec::quartic(), &f).unwrap()] {
            assert!(rhs.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn potential_must_not_depend_on_p() {
        assert!(HamiltonianSpec::new("q p".parse().unwrap(), 1.0).is_err());
        assert!(HamiltonianSpec::new("i q^2".parse().unwrap(), 1.0).is_err());
    }

    #[test]
    fn quartic_has_one_correction_term() {
        let gen = Generator::new(&HamiltonianSpec::quartic(), &box_axes(16, 4.0), 1.0, Dynamics::Moyal);
        assert_eq!(gen.kicks.len(), 2);
        assert_eq!(gen.kicks[1].0, 3);
        // -(hbar^2/24) * 6x at x = -4
        assert!((gen.kicks[1].1[0] - (-1.0 / 24.0 * 6.0 * -4.0)).abs() < 1e-15);
        let gen = Generator::new(&HamiltonianSpec::quartic(), &box_axes(16, 4.0), 1.0, Dynamics::Liouville);
        assert_eq!(gen.kicks.len(), 1);
    }

    #[test]
    fn tracker_labels_round_trip() {
        for t in Tracker::ALL {
            assert_eq!(t.label().parse::<Tracker>().unwrap(), t);
        }
        assert!("energy".parse::<Tracker>().is_err());
    }

    #[test]
    fn oversized_step_is_rejected() {
        let axes = box_axes(64, 8.0);
        let f = crate::wigner::gaussian_wigner_analytic(0.0, 0.0, 1.0, &axes, 1.0);
        let cfg = EvolveConfig { dynamics: Dynamics::Moyal, dt: 0.1, steps: 1, trackers: vec![], snapshot_every: None };
        assert!(matches!(evolve(&HamiltonianSpec::harmonic(), &f, &cfg), Err(Error::TimeStepTooLarge { .. })));
    }

    #[test]
    fn rotation_by_zero_is_identity() {
        let axes = box_axes(64, 8.0);
        let f = crate::wigner::gaussian_wigner_analytic(1.0, 0.5, 1.0, &axes, 1.0);
        let r = rotate_reference(&f, 0.0);
        assert!(r.max_abs_diff(&f) < 1e-15);
    }
}
