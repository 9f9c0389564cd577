//! Power spectral density: closed form and Welch estimate.
//!
//! The transmitted stream is cyclostationary with period `N_t`; averaging
//! its autocorrelation over one period gives the stationary spectrum
//!
//! ```text
//! S(f) = (M sigma_x2 / (N_t N^2))
//!        sum_{r=0}^{M-1} | sum_s H_{sM+r} Psi(f - (sM+r)/N) |^2
//! ```
//!
//! with `f` in cycles per transmitted sample and `Psi` the spectrum of the
//! length-`N_t` block pulse. The inner sum is coherent: window bins `M`
//! apart ride the same input symbol, so `Psi` keeps the linear phase of
//! the causal pulse rather than just the dirichlet magnitude.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;

use crate::dft::forward_dft;
use crate::error::{Error, Result};
use crate::geometry::SystemGeometry;
use crate::shaping::SpectralWindow;

/// Periodic sinc `sin(N_t w / 2) / (N_t sin(w / 2))`, with the removable
/// singularities at multiples of `2 pi` evaluated as the limit
/// `(-1)^(q (N_t - 1))` for `w = 2 pi q`.
pub fn dirichlet(w: f64, n_t: usize) -> f64 {
    let q = w / TAU;
    let q_round = q.round();
    if (q - q_round).abs() < 1e-12 * (1.0 + q.abs()) {
        let q_int = q_round as i64;
        let exponent = q_int * (n_t as i64 - 1);
        return if exponent.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
    }
    (n_t as f64 * w / 2.0).sin() / (n_t as f64 * (w / 2.0).sin())
}

/// Spectrum of the per-block transmit pulse.
#[derive(Clone)]
pub enum PulseShape {
    /// Digital all-ones pulse of length `N_t` (plain block transmission).
    RectangularNt { len: usize },
    /// User-supplied pulse spectrum (coherent amplitude, not magnitude).
    Custom {
        len: usize,
        transfer: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    },
}

impl PulseShape {
    /// The rectangular block pulse of a geometry (`len = N_t`).
    pub fn rectangular(g: &SystemGeometry) -> Self {
        Self::RectangularNt { len: g.n_t() }
    }

    /// Pulse length in samples.
    pub fn len(&self) -> usize {
        match self {
            Self::RectangularNt { len } => *len,
            Self::Custom { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coherent spectrum `sum_n pulse(n) e^{-j 2 pi n f}` at normalized
    /// frequency `f`. For the rectangular pulse this is the dirichlet
    /// kernel scaled by `N_t` with the linear phase of the causal pulse.
    pub fn transfer(&self, f: f64) -> Complex64 {
        match self {
            Self::RectangularNt { len } => {
                let n_t = *len;
                let amplitude = n_t as f64 * dirichlet(TAU * f, n_t);
                // Phase reduced modulo 2 before scaling by pi so that
                // large shift arguments do not lose precision.
                let phase = -PI * ((f * (n_t as f64 - 1.0)) % 2.0);
                Complex64::cis(phase) * amplitude
            }
            Self::Custom { transfer, .. } => transfer(f),
        }
    }
}

impl std::fmt::Debug for PulseShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::RectangularNt { len } => write!(f, "RectangularNt({len})"),
            Self::Custom { len, .. } => write!(f, "Custom({len})"),
        }
    }
}

/// Which estimator produced a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveLabel {
    Analytical,
    Estimated,
}

/// A spectrum on a strictly increasing grid of normalized frequencies
/// (cycles per sample at the transmit rate), linear power density.
#[derive(Debug, Clone)]
pub struct PsdCurve {
    pub freqs: Vec<f64>,
    pub values: Vec<f64>,
    pub label: CurveLabel,
}

impl PsdCurve {
    /// Values in dB, floored far below any physical level.
    pub fn db_values(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|&v| 10.0 * v.max(1e-40).log10())
            .collect()
    }
}

/// Evaluates the closed-form spectrum of the shaped stream on `grid`.
///
/// The sum over window aliases touches only nonzero bins, so the
/// rectangular window collapses to one dirichlet kernel per occupied bin
/// and a raised-cosine window to at most two coherent terms.
pub fn analytical_psd(
    w: &SpectralWindow,
    g: &SystemGeometry,
    pulse: &PulseShape,
    grid: &[f64],
    sigma_x2: f64,
) -> PsdCurve {
    let m = g.m();
    let n = g.n() as f64;
    // Nonzero (shift, coefficient) pairs per residue class r = k mod M.
    let mut classes: Vec<Vec<(f64, Complex64)>> = vec![Vec::new(); m];
    for &k in w.support() {
        classes[k % m].push((k as f64 / n, w.freq()[k]));
    }
    let scale = m as f64 * sigma_x2 / (pulse.len() as f64 * n * n);
    let values = grid
        .iter()
        .map(|&f| {
            // The spectrum has period one; canonicalizing keeps the
            // evaluation bit-identical across periods.
            let fc = f.rem_euclid(1.0);
            let mut acc = 0.0;
            for class in &classes {
                let inner: Complex64 = class
                    .iter()
                    .map(|&(shift, coeff)| coeff * pulse.transfer(fc - shift))
                    .sum();
                acc += inner.norm_sqr();
            }
            scale * acc
        })
        .collect();
    PsdCurve {
        freqs: grid.to_vec(),
        values,
        label: CurveLabel::Analytical,
    }
}

/// Deterministic stream of `frames` shaped blocks (cyclic prefixes
/// included), as fed to the Welch estimator.
pub fn simulate_stream(
    w: &SpectralWindow,
    g: &SystemGeometry,
    frames: usize,
    sigma_x2: f64,
    seed: u64,
) -> Result<Vec<Complex64>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut stream = Vec::with_capacity(frames * g.n_t());
    for _ in 0..frames {
        let xb = crate::txchain::SymbolBlock::qpsk(&mut rng, g.m(), sigma_x2);
        let body = crate::txchain::tx_reference(&xb, w, g)?;
        stream.extend(crate::txchain::add_cp(&body, g)?.samples);
    }
    Ok(stream)
}

/// Segment window for the Welch estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WelchWindow {
    Rectangular,
    Hann,
}

impl WelchWindow {
    fn values(&self, len: usize) -> Vec<f64> {
        match self {
            WelchWindow::Rectangular => vec![1.0; len],
            WelchWindow::Hann => (0..len)
                .map(|i| 0.5 - 0.5 * (TAU * i as f64 / len as f64).cos())
                .collect(),
        }
    }
}

/// Centered grid of `len` bins, `(k - len/2) / len` for `k` in `[0, len)`.
pub fn centered_grid(len: usize) -> Vec<f64> {
    (0..len)
        .map(|k| (k as f64 - (len / 2) as f64) / len as f64)
        .collect()
}

/// Averaged modified periodogram over overlapping segments, normalized so
/// white input of unit variance gives a flat curve at one (density per
/// unit normalized frequency). The curve is returned on the centered grid
/// of [`centered_grid`].
pub fn welch_estimate(
    samples: &[Complex64],
    segment_len: usize,
    overlap: f64,
    window: WelchWindow,
) -> Result<PsdCurve> {
    if segment_len == 0 || samples.len() < 2 * segment_len {
        return Err(Error::Config(format!(
            "need at least {} samples for segments of {segment_len}",
            2 * segment_len
        )));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::Config(format!("overlap {overlap} outside [0, 1)")));
    }
    let step = ((segment_len as f64 * (1.0 - overlap)).floor() as usize).max(1);
    let win = window.values(segment_len);
    let win_power: f64 = win.iter().map(|v| v * v).sum();

    let mut acc = vec![0.0; segment_len];
    let mut segments = 0usize;
    let mut start = 0usize;
    while start + segment_len <= samples.len() {
        let tapered: Vec<Complex64> = samples[start..start + segment_len]
            .iter()
            .zip(&win)
            .map(|(s, w)| s * w)
            .collect();
        let spectrum = forward_dft(&tapered);
        for (a, v) in acc.iter_mut().zip(&spectrum) {
            *a += v.norm_sqr();
        }
        segments += 1;
        start += step;
    }
    let scale = 1.0 / (segments as f64 * win_power);
    // Reorder to the centered grid.
    let half = segment_len / 2;
    let values: Vec<f64> = (0..segment_len)
        .map(|i| acc[(i + segment_len - half) % segment_len] * scale)
        .collect();
    Ok(PsdCurve {
        freqs: centered_grid(segment_len),
        values,
        label: CurveLabel::Estimated,
    })
}
