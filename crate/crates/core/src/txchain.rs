//! Transmitter and receiver chains, along two equivalent routes.
//!
//! The reference route works in the frequency domain:
//!
//! ```text
//! TX: x -> FFT_M -> repeat L_M -> (.) H -> stack to N -> IFFT_N -> x L_N
//! RX: r -> FFT_N -> repeat L_N -> (.) G -> stack to M -> IFFT_M -> x L_M
//! ```
//!
//! The time route replaces the inner blocks by a circular convolution at
//! the common length `L`:
//!
//! ```text
//! TX: x -> upsample L_M -> (*) h -> take every L_N-th sample -> x L_N
//! RX: r -> upsample L_N -> (*) g -> take every L_M-th sample -> x L_M
//! ```
//!
//! Both routes are kept permanently: the frequency route is the reference
//! implementation, the time route is what the interference and noise
//! analysis is written on, and their agreement is asserted by the
//! validation suite.

use num_complex::Complex64;
use rand::Rng;

use crate::dft::{circular_convolve, forward_dft, inverse_dft, repeat, stack, upsample};
use crate::equalize::{EqualizerResponse, OverallResponse};
use crate::error::{Error, Result};
use crate::geometry::SystemGeometry;
use crate::shaping::SpectralWindow;

/// One block of `M` zero-mean i.i.d. data symbols with its variance.
#[derive(Debug, Clone)]
pub struct SymbolBlock {
    pub symbols: Vec<Complex64>,
    pub sigma_x2: f64,
}

impl SymbolBlock {
    /// QPSK block: unit-modulus symbols scaled so `E|x|^2 = sigma_x2`.
    pub fn qpsk<R: Rng>(rng: &mut R, m: usize, sigma_x2: f64) -> Self {
        let amp = (sigma_x2 / 2.0).sqrt();
        let symbols = (0..m)
            .map(|_| {
                let re = if rng.random::<bool>() { amp } else { -amp };
                let im = if rng.random::<bool>() { amp } else { -amp };
                Complex64::new(re, im)
            })
            .collect();
        Self { symbols, sigma_x2 }
    }

    /// Wraps symbols from any zero-mean i.i.d. constellation; the analysis
    /// only uses the declared variance.
    pub fn from_symbols(symbols: Vec<Complex64>, sigma_x2: f64) -> Self {
        Self { symbols, sigma_x2 }
    }
}

/// Block of time samples, length `N` bare or `N_t` with cyclic prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFrame {
    pub samples: Vec<Complex64>,
    pub has_cp: bool,
}

impl TimeFrame {
    pub fn new(samples: Vec<Complex64>) -> Self {
        Self {
            samples,
            has_cp: false,
        }
    }
}

fn check_block(len: usize, expected: usize) -> Result<()> {
    if len != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: len,
        });
    }
    Ok(())
}

/// Frequency-route transmitter; returns the length-`N` body (no CP).
pub fn tx_reference(xb: &SymbolBlock, w: &SpectralWindow, g: &SystemGeometry) -> Result<TimeFrame> {
    check_block(xb.symbols.len(), g.m())?;
    check_block(w.freq().len(), g.l())?;
    let spread = forward_dft(&xb.symbols);
    let mut wide = repeat(&spread, g.l_m());
    for (v, h) in wide.iter_mut().zip(w.freq()) {
        *v *= h;
    }
    let stacked = stack(&wide, g.n())?;
    let mut body = inverse_dft(&stacked);
    let l_n = g.l_n() as f64;
    for v in &mut body {
        *v *= l_n;
    }
    Ok(TimeFrame::new(body))
}

/// Time-route transmitter: `y(n) = L_N * (h (*) upsample(x, L_M))(n L_N)`.
pub fn tx_time_equivalent(
    xb: &SymbolBlock,
    w: &SpectralWindow,
    g: &SystemGeometry,
) -> Result<TimeFrame> {
    check_block(xb.symbols.len(), g.m())?;
    check_block(w.freq().len(), g.l())?;
    let wide = upsample(&xb.symbols, g.l_m());
    let filtered = circular_convolve(&wide, w.time())?;
    let l_n = g.l_n() as f64;
    let body = (0..g.n()).map(|n| filtered[n * g.l_n()] * l_n).collect();
    Ok(TimeFrame::new(body))
}

/// Prepends the last `N_g` body samples.
pub fn add_cp(frame: &TimeFrame, g: &SystemGeometry) -> Result<TimeFrame> {
    if frame.has_cp {
        return Err(Error::CyclicPrefix("frame already carries a prefix".into()));
    }
    check_block(frame.samples.len(), g.n())?;
    let mut samples = Vec::with_capacity(g.n_t());
    samples.extend_from_slice(&frame.samples[g.n() - g.n_g()..]);
    samples.extend_from_slice(&frame.samples);
    Ok(TimeFrame {
        samples,
        has_cp: true,
    })
}

/// Drops the first `N_g` samples.
pub fn remove_cp(frame: &TimeFrame, g: &SystemGeometry) -> Result<TimeFrame> {
    if !frame.has_cp {
        return Err(Error::CyclicPrefix("frame carries no prefix".into()));
    }
    check_block(frame.samples.len(), g.n_t())?;
    Ok(TimeFrame::new(frame.samples[g.n_g()..].to_vec()))
}

/// Frequency-route receiver; consumes a bare length-`N` frame and returns
/// the `M` estimated symbols.
///
/// The stack onto `M` bins realizes the frequency combining needed when
/// the window support exceeds `M` bins.
pub fn rx_reference(
    frame: &TimeFrame,
    eq: &EqualizerResponse,
    g: &SystemGeometry,
) -> Result<Vec<Complex64>> {
    if frame.has_cp {
        return Err(Error::CyclicPrefix(
            "remove the prefix before receiving".into(),
        ));
    }
    check_block(frame.samples.len(), g.n())?;
    check_block(eq.freq().len(), g.l())?;
    let spectrum = forward_dft(&frame.samples);
    let mut wide = repeat(&spectrum, g.l_n());
    for (v, gk) in wide.iter_mut().zip(eq.freq()) {
        *v *= gk;
    }
    let stacked = stack(&wide, g.m())?;
    let mut out = inverse_dft(&stacked);
    let l_m = g.l_m() as f64;
    for v in &mut out {
        *v *= l_m;
    }
    Ok(out)
}

/// Time-route receiver: `x^(n) = L_M * (g (*) upsample(r, L_N))(n L_M)`.
pub fn rx_time_equivalent(
    frame: &TimeFrame,
    eq: &EqualizerResponse,
    g: &SystemGeometry,
) -> Result<Vec<Complex64>> {
    if frame.has_cp {
        return Err(Error::CyclicPrefix(
            "remove the prefix before receiving".into(),
        ));
    }
    check_block(frame.samples.len(), g.n())?;
    check_block(eq.freq().len(), g.l())?;
    let wide = upsample(&frame.samples, g.l_n());
    let filtered = circular_convolve(&wide, eq.time())?;
    let l_m = g.l_m() as f64;
    Ok((0..g.m()).map(|n| filtered[n * g.l_m()] * l_m).collect())
}

/// Output of the simplified single-response model, split into the exact
/// useful / interference / noise parts.
#[derive(Debug, Clone)]
pub struct SimplifiedOutput {
    /// `x^ = useful + interference + noise`.
    pub estimate: Vec<Complex64>,
    /// `L_M p(0) x(n)`.
    pub useful: Vec<Complex64>,
    /// `L_M sum_{m != n} p((n-m) L_M mod L) x(m)`.
    pub interference: Vec<Complex64>,
    /// The provided equivalent-noise samples.
    pub noise: Vec<Complex64>,
}

/// Runs the whole link as one circular filter `p` at the symbol rate:
///
/// ```text
/// x^(n) = L_M sum_m p((n - m) L_M mod L) x(m) + noise(n)
/// ```
///
/// which only touches the decimated response `p~`. The decomposition is
/// computed from the known symbols and response, not estimated.
pub fn end_to_end_simplified(
    xb: &SymbolBlock,
    p: &OverallResponse,
    noise: &[Complex64],
    g: &SystemGeometry,
) -> Result<SimplifiedOutput> {
    let m = g.m();
    check_block(xb.symbols.len(), m)?;
    check_block(noise.len(), m)?;
    let l_m = g.l_m() as f64;
    let p_dec = p.decimated();
    let mut estimate = Vec::with_capacity(m);
    let mut useful = Vec::with_capacity(m);
    let mut interference = Vec::with_capacity(m);
    for n in 0..m {
        let mut acc = Complex64::ZERO;
        for (mm, x) in xb.symbols.iter().enumerate() {
            acc += p_dec[(n + m - mm) % m] * x;
        }
        let total = acc * l_m;
        let u = p_dec[0] * xb.symbols[n] * l_m;
        useful.push(u);
        interference.push(total - u);
        estimate.push(total + noise[n]);
    }
    Ok(SimplifiedOutput {
        estimate,
        useful,
        interference,
        noise: noise.to_vec(),
    })
}
