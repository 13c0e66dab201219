// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

//! Stroboscopic observables: Loschmidt echoes, long-time memory,
//! autocorrelation, Rabi-frequency extraction and the band-overlap order
//! parameter.
//!
//! All time series are evaluated from a stored eigendecomposition, so the
//! cost of a trace does not grow with the number of matrix powers.

use std::fmt::Write as _;

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, Par};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::floquet::{FloquetResult, BAND_TOLERANCE};
use crate::hamiltonian::SpectralDecomposition;
use crate::lattice::{Configuration, LatticeSpec};
use crate::linalg::phase_distance;
use crate::{Error, Result};

/// Values sampled at stroboscopic times `n·τ`, `n = 0, 1, …`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: values.len(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter {
                name: "times",
                reason: "times must be strictly increasing".into(),
            });
        }
        Ok(Self { times, values })
    }

    pub fn stroboscopic(period: f64, values: Vec<f64>) -> Self {
        let times = (0..values.len()).map(|n| n as f64 * period).collect();
        Self { times, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mean of the last `fraction` of the samples.
    pub fn tail_mean(&self, fraction: f64) -> f64 {
        let take = ((self.len() as f64 * fraction).ceil() as usize).clamp(1, self.len().max(1));
        let tail = &self.values[self.len() - take..];
        tail.iter().sum::<f64>() / tail.len() as f64
    }

    /// `n,time,value` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,time,value\n");
        for (n, (t, v)) in self.times.iter().zip(&self.values).enumerate() {
            let _ = writeln!(out, "{n},{t},{v:.15e}");
        }
        out
    }

    pub fn to_svg(&self, title: &str, y_label: &str) -> String {
        svg_line_plot(title, "t", y_label, &self.times, &self.values)
    }
}

/// Columns evaluated per matrix product in [`dephasing_series`].
const CHUNK: usize = 256;

/// `f(n) = Σ_{k,l} M_kl cos((θ_k − θ_l)·n)` for `n = 0..=n_max`, with `M`
/// symmetric.
///
/// Evaluated in blocks of time points as `Σ_k c_k(n)(M c(n))_k + s_k(n)(M s(n))_k`.
/// Each block is computed sequentially, so results do not depend on the
/// number of worker threads.
fn dephasing_series(phases: &[f64], m: &Mat<f64>, n_max: usize) -> Vec<f64> {
    let d = phases.len();
    let starts: Vec<usize> = (0..=n_max).step_by(CHUNK).collect();
    let block = |start: usize| -> Vec<f64> {
        let width = CHUNK.min(n_max + 1 - start);
        let cos = Mat::from_fn(d, width, |k, c| (phases[k] * (start + c) as f64).cos());
        let sin = Mat::from_fn(d, width, |k, c| (phases[k] * (start + c) as f64).sin());
        let mut mc = Mat::<f64>::zeros(d, width);
        let mut ms = Mat::<f64>::zeros(d, width);
        matmul(&mut mc, Accum::Replace, m, &cos, 1.0, Par::Seq);
        matmul(&mut ms, Accum::Replace, m, &sin, 1.0, Par::Seq);
        (0..width)
            .map(|c| {
                let mut acc = 0.0;
                for k in 0..d {
                    acc += cos[(k, c)] * mc[(k, c)] + sin[(k, c)] * ms[(k, c)];
                }
                acc
            })
            .collect()
    };
    #[cfg(feature = "parallel")]
    let blocks: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        starts.par_iter().map(|&s| block(s)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let blocks: Vec<Vec<f64>> = starts.iter().map(|&s| block(s)).collect();
    blocks.concat()
}

fn probabilities(result: &FloquetResult) -> Mat<f64> {
    let d = result.dim();
    Mat::from_fn(d, d, |i, k| result.modes[(i, k)].norm_sqr())
}

/// Return probability `|⟨φ_i|U^n|φ_i⟩|²` of basis state `i`.
pub fn loschmidt_echo(result: &FloquetResult, i: usize, n_max: usize) -> Result<TimeSeries> {
    let d = result.dim();
    if i >= d {
        return Err(Error::IndexOutOfRange { index: i, dim: d });
    }
    let weights: Vec<f64> = (0..d).map(|k| result.modes[(i, k)].norm_sqr()).collect();
    let values = (0..=n_max)
        .map(|n| {
            if n == 0 {
                return 1.0;
            }
            let (mut re, mut im) = (0.0, 0.0);
            for (w, theta) in weights.iter().zip(&result.phases) {
                let arg = theta * n as f64;
                re += w * arg.cos();
                im -= w * arg.sin();
            }
            (re * re + im * im).min(1.0)
        })
        .collect();
    Ok(TimeSeries::stroboscopic(result.period, values))
}

/// Echo averaged uniformly over all basis states.
pub fn averaged_loschmidt(result: &FloquetResult, n_max: usize) -> TimeSeries {
    let d = result.dim();
    if d == 0 {
        return TimeSeries::stroboscopic(result.period, vec![1.0; n_max + 1]);
    }
    let p = probabilities(result);
    let mut m = Mat::<f64>::zeros(d, d);
    matmul(&mut m, Accum::Replace, p.transpose(), &p, 1.0 / d as f64, Par::Seq);
    let mut values = dephasing_series(&result.phases, &m, n_max);
    values[0] = 1.0;
    for v in &mut values {
        *v = v.clamp(0.0, 1.0);
    }
    TimeSeries::stroboscopic(result.period, values)
}

/// Diagonal-ensemble value of the averaged echo,
/// `(1/D) Σ_i Σ_bands (Σ_{k∈band} |V_ik|²)²`, with bands split at
/// [`BAND_TOLERANCE`].
pub fn long_time_memory(result: &FloquetResult) -> f64 {
    long_time_memory_with(result, BAND_TOLERANCE)
}

pub fn long_time_memory_with(result: &FloquetResult, tol: f64) -> f64 {
    let d = result.dim();
    if d == 0 {
        return 1.0;
    }
    let bands = result.bands(tol);
    let mut total = 0.0;
    for i in 0..d {
        for band in &bands {
            let w: f64 = band.iter().map(|&k| result.modes[(i, k)].norm_sqr()).sum();
            total += w * w;
        }
    }
    total / d as f64
}

/// Infinite-temperature density autocorrelation,
/// `C(n) = (raw(n) − C*)/(1 − C*)` with `C* = (2ρ − 1)²` and
/// `raw(n) = (1/(S·D)) Σ_s Tr[Z_s U^{−n} Z_s U^n]`, `Z_s = 2n̂_s − 1`.
pub fn autocorrelation(
    result: &FloquetResult,
    lattice: &LatticeSpec,
    configs: &[Configuration],
    n_max: usize,
) -> Result<TimeSeries> {
    let d = result.dim();
    if configs.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: configs.len(),
        });
    }
    let sites = lattice.sites();
    let particles = configs.first().map_or(0, |c| c.particle_count());
    let rho = particles as f64 / sites as f64;
    let c_star = (2.0 * rho - 1.0).powi(2);
    if (1.0 - c_star).abs() < 1e-15 {
        return Err(Error::DegenerateDensity { density: rho });
    }

    let v = &result.modes;
    let mut g = Mat::<f64>::zeros(d, d);
    for s in 0..sites {
        let z: Vec<f64> = configs
            .iter()
            .map(|c| if c.is_occupied(s) { 1.0 } else { -1.0 })
            .collect();
        let zv = Mat::from_fn(d, d, |i, k| v[(i, k)] * z[i]);
        let a = v.adjoint() * &zv;
        for l in 0..d {
            for k in 0..d {
                g[(k, l)] += a[(k, l)].norm_sqr();
            }
        }
    }
    let scale = 1.0 / (sites * d) as f64;
    let g = Mat::from_fn(d, d, |k, l| g[(k, l)] * scale);
    let mut values: Vec<f64> = dephasing_series(&result.phases, &g, n_max)
        .into_iter()
        .map(|raw| (raw - c_star) / (1.0 - c_star))
        .collect();
    if let Some(first) = values.first_mut() {
        *first = 1.0;
    }
    Ok(TimeSeries::stroboscopic(result.period, values))
}

/// One spectral line of a time series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RabiPeak {
    /// Cycles per sampling step (per drive period for stroboscopic data).
    pub frequency: f64,
    /// Cosine amplitude `2|X_k|/N`.
    pub weight: f64,
    /// DFT bin.
    pub bin: usize,
}

/// Default threshold: a peak must exceed this multiple of the median
/// magnitude.
pub const PEAK_THRESHOLD: f64 = 3.0;

/// Peaks of the mean-subtracted DFT, strongest first.
pub fn rabi_frequencies(series: &TimeSeries) -> Result<Vec<RabiPeak>> {
    rabi_frequencies_with(series, PEAK_THRESHOLD)
}

pub fn rabi_frequencies_with(series: &TimeSeries, threshold: f64) -> Result<Vec<RabiPeak>> {
    let n = series.len();
    if n < 64 {
        return Err(Error::InvalidParameter {
            name: "series",
            reason: format!("need at least 64 samples, got {n}"),
        });
    }
    let step = series.times[1] - series.times[0];
    if series
        .times
        .windows(2)
        .any(|w| ((w[1] - w[0]) - step).abs() > 1e-9 * step.abs().max(1.0))
    {
        return Err(Error::InvalidParameter {
            name: "series",
            reason: "samples must be uniformly spaced".into(),
        });
    }
    let magnitudes = dft_magnitudes(&series.values);
    let half = magnitudes.len();
    let mut sorted = magnitudes[1..].to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let scale = series.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let floor = (threshold * median).max(1e-9 * n as f64 * scale);

    let mut peaks: Vec<RabiPeak> = (1..half)
        .filter(|&k| {
            let m = magnitudes[k];
            m > floor && m > magnitudes[k - 1] && (k + 1 == half || m >= magnitudes[k + 1])
        })
        .map(|k| RabiPeak {
            frequency: k as f64 / n as f64,
            weight: 2.0 * magnitudes[k] / n as f64,
            bin: k,
        })
        .collect();
    peaks.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(a.bin.cmp(&b.bin)));
    Ok(peaks)
}

/// `|X_k|` for `k = 0..=N/2` of the mean-subtracted signal.
pub fn dft_magnitudes(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = values.iter().map(|v| Complex::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf[..=n / 2].iter().map(|z| z.norm()).collect()
}

/// Spectra whose eigenvectors can be weighed against basis states.
pub trait BandSpectrum {
    fn dim(&self) -> usize;
    /// Band coordinate of mode `k`: an energy, or a phase `ε·τ`.
    fn coordinate(&self, k: usize) -> f64;
    /// Distance between two band coordinates.
    fn distance(&self, a: f64, b: f64) -> f64;
    /// `|⟨φ_i|mode_k⟩|²`.
    fn weight(&self, i: usize, k: usize) -> f64;
}

impl BandSpectrum for FloquetResult {
    fn dim(&self) -> usize {
        self.phases.len()
    }

    fn coordinate(&self, k: usize) -> f64 {
        self.phases[k]
    }

    fn distance(&self, a: f64, b: f64) -> f64 {
        phase_distance(a, b)
    }

    fn weight(&self, i: usize, k: usize) -> f64 {
        self.modes[(i, k)].norm_sqr()
    }
}

impl BandSpectrum for SpectralDecomposition {
    fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    fn coordinate(&self, k: usize) -> f64 {
        self.eigenvalues[k]
    }

    fn distance(&self, a: f64, b: f64) -> f64 {
        (a - b).abs()
    }

    fn weight(&self, i: usize, k: usize) -> f64 {
        self.eigenvectors[(i, k)].powi(2)
    }
}

/// `α^BO(ℓ, ε)` for every basis state, sorted descending.
#[derive(Clone, Debug, PartialEq)]
pub struct BandOverlapCurve {
    pub band: f64,
    /// Modes in the band.
    pub members: Vec<usize>,
    /// `(basis_index, alpha)`, descending in alpha.
    pub values: Vec<(usize, f64)>,
}

impl BandOverlapCurve {
    pub fn count_above(&self, threshold: f64) -> usize {
        self.values.iter().filter(|v| v.1 > threshold).count()
    }

    pub fn max(&self) -> f64 {
        self.values.first().map_or(0.0, |v| v.1)
    }

    /// `rank,basis_index,alpha_bo` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,basis_index,alpha_bo\n");
        for (rank, (i, a)) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{rank},{i},{a:.15e}");
        }
        out
    }

    pub fn to_svg(&self, title: &str) -> String {
        let xs: Vec<f64> = (0..self.values.len()).map(|r| r as f64).collect();
        let ys: Vec<f64> = self.values.iter().map(|v| v.1).collect();
        svg_line_plot(title, "rank", "alpha_bo", &xs, &ys)
    }
}

/// Weight of every basis state on the modes within `tolerance` of `band`.
pub fn band_overlap<S: BandSpectrum + ?Sized>(
    spectrum: &S,
    band: f64,
    tolerance: f64,
) -> Result<BandOverlapCurve> {
    let d = spectrum.dim();
    let members: Vec<usize> = (0..d)
        .filter(|&k| spectrum.distance(spectrum.coordinate(k), band) <= tolerance)
        .collect();
    if members.is_empty() {
        return Err(Error::EmptyBand {
            target: band,
            tolerance,
        });
    }
    let mut values: Vec<(usize, f64)> = (0..d)
        .map(|i| (i, members.iter().map(|&k| spectrum.weight(i, k)).sum()))
        .collect();
    values.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(BandOverlapCurve {
        band,
        members,
        values,
    })
}

/// Minimal SVG line chart.
pub fn svg_line_plot(title: &str, x_label: &str, y_label: &str, xs: &[f64], ys: &[f64]) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let finite = |v: &&f64| v.is_finite();
    let (x0, x1) = bounds(xs.iter().filter(finite));
    let (y0, y1) = bounds(ys.iter().filter(finite));
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let mut path = String::new();
    for (k, (x, y)) in xs.iter().zip(ys).enumerate() {
        if x.is_finite() && y.is_finite() {
            let _ = write!(path, "{}{:.2},{:.2} ", if k == 0 { "M" } else { "L" }, sx(*x), sy(*y));
        }
    }
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">\n",
            "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
            "<text x=\"{cx}\" y=\"20\" text-anchor=\"middle\">{title}</text>\n",
            "<line x1=\"{pad}\" y1=\"{by}\" x2=\"{rx}\" y2=\"{by}\" stroke=\"black\"/>\n",
            "<line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{by}\" stroke=\"black\"/>\n",
            "<text x=\"{cx}\" y=\"{xl}\" text-anchor=\"middle\">{x_label} [{x0:.3}, {x1:.3}]</text>\n",
            "<text x=\"14\" y=\"{cy}\" transform=\"rotate(-90 14 {cy})\" text-anchor=\"middle\">{y_label} [{y0:.3}, {y1:.3}]</text>\n",
            "<path d=\"{path}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\"/>\n",
            "</svg>\n"
        ),
        w = w,
        h = h,
        pad = pad,
        cx = w / 2.0,
        cy = h / 2.0,
        by = h - pad,
        rx = w - pad,
        xl = h - 15.0,
        title = escape(title),
        x_label = escape(x_label),
        y_label = escape(y_label),
        x0 = x0,
        x1 = x1,
        y0 = y0,
        y1 = y1,
        path = path.trim_end(),
    )
}

fn bounds<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
