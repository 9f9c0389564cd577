//! Transmit spectral windows: rectangular mapping and root-raised-cosine
//! shaping, both expressed as a length-`L` frequency response `H` with its
//! time-domain filter `h = IFFT_L(H)`.

use num_complex::Complex64;

use crate::dft::inverse_dft;
use crate::error::{Error, Result};
use crate::geometry::SystemGeometry;

/// Window family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Rectangular,
    RootRaisedCosine,
}

/// Shaping selection as it appears in experiment configurations.
///
/// `user_block_index` selects which block of `M` subcarriers the user
/// occupies. The rectangular window defaults to block 0; the raised-cosine
/// window defaults to block 1 so its excess band does not touch the grid
/// borders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapingConfig {
    pub kind: WindowKind,
    /// Roll-off factor in `[0, 1]`; ignored for rectangular shaping.
    pub alpha: f64,
    pub user_block_index: usize,
}

impl ShapingConfig {
    pub fn rectangular() -> Self {
        Self {
            kind: WindowKind::Rectangular,
            alpha: 0.0,
            user_block_index: 0,
        }
    }

    pub fn root_raised_cosine(alpha: f64) -> Self {
        Self {
            kind: WindowKind::RootRaisedCosine,
            alpha,
            user_block_index: 1,
        }
    }
}

/// Length-`L` transmit window.
///
/// The frequency response is exactly zero outside `support`, and the time
/// filter always equals the inverse transform of the frequency response
/// (both are computed at construction and never mutated).
#[derive(Debug, Clone)]
pub struct SpectralWindow {
    freq: Vec<Complex64>,
    time: Vec<Complex64>,
    support: Vec<usize>,
    kind: WindowKind,
}

impl SpectralWindow {
    /// Wraps an arbitrary length-`L` frequency response. The support is
    /// the set of exactly-nonzero bins.
    pub fn from_freq(freq: Vec<Complex64>, kind: WindowKind) -> Self {
        let support = freq
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm_sqr() != 0.0)
            .map(|(k, _)| k)
            .collect();
        let time = inverse_dft(&freq);
        Self {
            freq,
            time,
            support,
            kind,
        }
    }

    /// Rectangular window: ones on the `M` contiguous bins of the chosen
    /// block, zero elsewhere over length `L`.
    pub fn rectangular(g: &SystemGeometry, user_block_index: usize) -> Result<Self> {
        let start = user_block_index * g.m();
        if start + g.m() > g.n() {
            return Err(Error::Window(format!(
                "block {user_block_index} of {} bins does not fit in N = {}",
                g.m(),
                g.n()
            )));
        }
        let mut freq = vec![Complex64::ZERO; g.l()];
        for bin in freq.iter_mut().skip(start).take(g.m()) {
            *bin = Complex64::ONE;
        }
        Ok(Self::from_freq(freq, WindowKind::Rectangular))
    }

    /// Root-raised-cosine window with roll-off `alpha`, user in block 1.
    ///
    /// The occupied band has `U = M + 2*M_a` bins with `M_a = floor(alpha*M/2)`,
    /// at indices `{M - M_a, ..., 2M + M_a - 1}`. Rejects roll-offs outside
    /// `[0, 1]` and configurations violating `N >= 2 (1 + alpha) M`.
    pub fn root_raised_cosine(g: &SystemGeometry, alpha: f64) -> Result<Self> {
        if !g.nyquist_check(alpha) {
            return Err(Error::Window(format!(
                "N = {} cannot carry excess bandwidth alpha = {alpha} over M = {}",
                g.n(),
                g.m()
            )));
        }
        Self::from_config(g, &ShapingConfig::root_raised_cosine(alpha))
    }

    /// Builds the window described by a [`ShapingConfig`].
    ///
    /// Unlike [`SpectralWindow::root_raised_cosine`] this only requires the
    /// shifted support to fit inside `[0, L)`; it is the entry point for
    /// experiment drivers that deliberately probe undersampled setups.
    pub fn from_config(g: &SystemGeometry, cfg: &ShapingConfig) -> Result<Self> {
        match cfg.kind {
            WindowKind::Rectangular => Self::rectangular(g, cfg.user_block_index),
            WindowKind::RootRaisedCosine => {
                if !(0.0..=1.0).contains(&cfg.alpha) {
                    return Err(Error::Window(format!(
                        "roll-off {} outside [0, 1]",
                        cfg.alpha
                    )));
                }
                let m = g.m();
                let m_a = (cfg.alpha * m as f64 / 2.0).floor() as usize;
                let u = m + 2 * m_a;
                let start = (cfg.user_block_index * m).checked_sub(m_a).ok_or_else(|| {
                    Error::Window(format!(
                        "excess band of {m_a} bins underflows below bin 0 in block {}",
                        cfg.user_block_index
                    ))
                })?;
                if start + u > g.l() {
                    return Err(Error::Window(format!(
                        "support of {u} bins starting at {start} exceeds L = {}",
                        g.l()
                    )));
                }
                let mut freq = vec![Complex64::ZERO; g.l()];
                for (i, bin) in freq.iter_mut().skip(start).take(u).enumerate() {
                    *bin = Complex64::new(rrc_amplitude(i, m, m_a), 0.0);
                }
                Ok(Self::from_freq(freq, WindowKind::RootRaisedCosine))
            }
        }
    }

    /// Frequency response `H`, length `L`.
    pub fn freq(&self) -> &[Complex64] {
        &self.freq
    }

    /// Time-domain filter `h = IFFT_L(H)`, length `L`.
    pub fn time(&self) -> &[Complex64] {
        &self.time
    }

    /// Sorted bin indices where `H` is nonzero.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }
}

/// Amplitude of the root-raised-cosine window at support index `i` of `U`.
///
/// The magnitude-squared profile is a raised cosine whose transition bands
/// are exactly `2*M_a` bins wide, so shifted copies `M` bins apart satisfy
/// `|H_k|^2 + |H_{k+M}|^2 = 1` bin-exactly and the total window power is
/// exactly `M`.
fn rrc_amplitude(i: usize, m: usize, m_a: usize) -> f64 {
    if m_a == 0 {
        return 1.0;
    }
    let u = m + 2 * m_a;
    let center = (u as f64 - 1.0) / 2.0;
    let dist = (i as f64 - center).abs();
    let flat_edge = (m as f64 - 2.0 * m_a as f64) / 2.0;
    if dist <= flat_edge {
        1.0
    } else {
        let t = dist - flat_edge; // in (0, 2*M_a)
        (std::f64::consts::PI * t / (4.0 * m_a as f64)).cos()
    }
}
