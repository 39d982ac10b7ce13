//! Source wavelet evaluation and convolution of Green traces into physical
//! seismograms.

use crate::{Error, Result};

/// Source time function families. Only the fourth-derivative-of-Gaussian
/// shape ships; the enum leaves room for more.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveletKind {
    GaussianD4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavelet {
    /// Dominant frequency (Hz), > 0.
    pub f0: f64,
    pub kind: WaveletKind,
}

impl Wavelet {
    pub fn gaussian_d4(f0: f64) -> Result<Self> {
        if !(f0 > 0.0) {
            return Err(Error::Domain(format!("wavelet f0 must be > 0, got {f0}")));
        }
        Ok(Self { f0, kind: WaveletKind::GaussianD4 })
    }

    /// Half-width beyond which |f| < 1e-12 * max|f|; the envelope solves
    /// (3 + 12 s + 4 s^2) e^-s = 3e-12 at s = a*tau^2.
    pub fn effective_half_width(&self) -> f64 {
        let a = self.a();
        (40.0 / a).sqrt()
    }

    #[inline]
    fn a(&self) -> f64 {
        std::f64::consts::PI * std::f64::consts::PI / (self.f0 * self.f0)
    }
}

/// Wavelet value, symmetric about t = 1/f0.
pub fn wavelet_value(w: &Wavelet, t: f64) -> f64 {
    let a = w.a();
    let tau = t - 1.0 / w.f0;
    let s = a * tau * tau;
    2.0 * a * (3.0 + 12.0 * s + 4.0 * s * s) * (-s).exp()
}

/// Analytic time derivative of [`wavelet_value`].
pub fn wavelet_derivative(w: &Wavelet, t: f64) -> f64 {
    let a = w.a();
    let tau = t - 1.0 / w.f0;
    let s = a * tau * tau;
    4.0 * a * a * tau * (9.0 - 4.0 * s - 4.0 * s * s) * (-s).exp()
}

/// A uniformly sampled time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub t_start: f64,
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl Trace {
    pub fn new(t_start: f64, dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Domain(format!("trace dt must be > 0, got {dt}")));
        }
        if samples.len() < 2 {
            return Err(Error::Domain("trace needs at least 2 samples".into()));
        }
        Ok(Self { t_start, dt, samples })
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.dt
    }
}

/// Trapezoid convolution of a Green trace with the wavelet on the trace's
/// own grid: out(t_n) = integral g(tau) f(t_n - tau) dtau.
pub fn convolve(green: &Trace, w: &Wavelet) -> Result<Trace> {
    convolve_kernel(green, w, &[], wavelet_value)
}

/// Same quadrature, but against the wavelet time derivative: yields the
/// time-derivative seismogram without differentiating the Green trace.
pub fn convolve_derivative(green: &Trace, w: &Wavelet) -> Result<Trace> {
    convolve_kernel(green, w, &[], wavelet_derivative)
}

/// Convolution with the known wave-arrival times supplied: cells holding a
/// discontinuity are integrated piecewise with the one-sided sample values,
/// which keeps the trapezoid rule second order despite the jumps.
pub fn convolve_with_jumps(
    green: &Trace,
    w: &Wavelet,
    jumps: &[f64],
    derivative_kernel: bool,
) -> Result<Trace> {
    let kernel = if derivative_kernel { wavelet_derivative } else { wavelet_value };
    convolve_kernel(green, w, jumps, kernel)
}

fn convolve_kernel(
    green: &Trace,
    w: &Wavelet,
    jumps: &[f64],
    kernel: fn(&Wavelet, f64) -> f64,
) -> Result<Trace> {
    let spp = 1.0 / (w.f0 * green.dt);
    if spp < 20.0 {
        return Err(Error::UndersampledWavelet { dt: green.dt, spp });
    }
    let n = green.samples.len();
    let dt = green.dt;
    // The kernel argument is t_n - tau_j = (n - j) dt; precompute over the
    // full lag range (the shape has no compact support worth exploiting).
    let lags: Vec<f64> = (0..n).map(|k| kernel(w, k as f64 * dt)).collect();
    let mut out = vec![0.0f64; n];
    for (nn, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for j in 0..=nn {
            let f = lags[nn - j];
            let weight = if j == 0 || j == nn { 0.5 } else { 1.0 };
            acc += weight * green.samples[j] * f;
        }
        *o = acc * dt;
    }
    // Piecewise correction of every cell that straddles an arrival: the
    // trace is smooth on either side, so linear one-sided extensions up to
    // the jump leave only O(dt^3) per cell.
    for &tj in jumps {
        let pos = (tj - green.t_start) / dt;
        if !(pos > 0.0) || pos >= (n - 1) as f64 {
            continue;
        }
        let k = pos.floor() as usize;
        let tau_l = green.time(k);
        let tau_r = green.time(k + 1);
        if tj <= tau_l || tj >= tau_r {
            continue;
        }
        // One-sided linear models of the trace on each side of the jump.
        let slope_l = if k >= 1 { (green.samples[k] - green.samples[k - 1]) / dt } else { 0.0 };
        let slope_r = if k + 2 < n {
            (green.samples[k + 2] - green.samples[k + 1]) / dt
        } else {
            0.0
        };
        let mid_l = 0.5 * (tau_l + tj);
        let mid_r = 0.5 * (tj + tau_r);
        let g_ml = green.samples[k] + slope_l * (mid_l - tau_l);
        let g_mr = green.samples[k + 1] + slope_r * (mid_r - tau_r);
        for (nn, o) in out.iter_mut().enumerate().skip(k + 1) {
            let t_n = green.t_start + nn as f64 * dt;
            let f_l = kernel(w, t_n - mid_l);
            let f_r = kernel(w, t_n - mid_r);
            let exact = g_ml * f_l * (tj - tau_l) + g_mr * f_r * (tau_r - tj);
            let trap = 0.5
                * dt
                * (green.samples[k] * lags[nn - k] + green.samples[k + 1] * lags[nn - k - 1]);
            *o += exact - trap;
        }
    }
    Trace::new(green.t_start, dt, out)
}
