//! Deterministic reductions and FFT-based derivatives on uniform periodic
//! grids.

use std::f64::consts::PI;
use std::ops::Add;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Pairwise (cascade) summation with a fixed split, so the result depends
/// only on the input order and never on scheduling.
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Default + Add<Output = T>,
{
    const BLOCK: usize = 8;
    if xs.len() <= BLOCK {
        return xs.iter().fold(T::default(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Signed FFT frequency index of bin `j` for a length-`n` transform, with
/// the Nyquist bin mapped to `-n/2`.
pub fn signed_frequency(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Forward/inverse FFT plans and angular wavenumbers for one axis.
#[derive(Clone)]
pub struct SpectralAxis {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl SpectralAxis {
    pub fn new(n: usize, spacing: f64) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let wavenumbers = (0..n)
            .map(|j| 2.0 * PI * signed_frequency(j, n) as f64 / (n as f64 * spacing))
            .collect();
        SpectralAxis { n, forward, inverse, wavenumbers }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Angular wavenumber of each FFT bin.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// Inverse transform including the `1/n` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let scale = 1.0 / self.n as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    /// Multiplier of the `order`-th derivative for bin `j`. For odd orders
    /// the Nyquist bin is dropped so real input gives real output.
    pub fn derivative_factor(&self, j: usize, order: u32) -> Complex64 {
        if !order.is_multiple_of(2) && self.n.is_multiple_of(2) && j == self.n / 2 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(0.0, self.wavenumbers[j]).powu(order)
    }

    /// Fraction of spectral power in the outer 10% of bins (by |frequency|).
    pub fn tail_fraction(&self, spectrum: &[Complex64]) -> f64 {
        let cutoff = 0.9 * (self.n / 2) as f64;
        let mut total = Vec::with_capacity(self.n);
        let mut tail = Vec::with_capacity(self.n);
        for (j, v) in spectrum.iter().enumerate() {
            let p = v.norm_sqr();
            total.push(p);
            tail.push(if (signed_frequency(j, self.n).abs() as f64) >= cutoff { p } else { 0.0 });
        }
        let total = pairwise_sum(&total);
        if total == 0.0 {
            0.0
        } else {
            pairwise_sum(&tail) / total
        }
    }

    /// Derivatives of real samples for each requested order.
    pub fn derivatives(&self, data: &[f64], orders: &[u32]) -> Vec<Vec<f64>> {
        let mut spectrum: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward(&mut spectrum);
        orders
            .iter()
            .map(|&order| {
                let mut buf: Vec<Complex64> = spectrum
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| v * self.derivative_factor(j, order))
                    .collect();
                self.inverse(&mut buf);
                buf.into_iter().map(|v| v.re).collect()
            })
            .collect()
    }
}
