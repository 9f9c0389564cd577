//! Transform conventions, the stacking operator and rate-change primitives.
//!
//! All spectra in this crate follow one asymmetric convention:
//!
//! ```text
//! X_k = sum_p x_p e^{-j 2 pi p k / A}          (forward, no scaling)
//! x_n = (1/A) sum_p X_p e^{+j 2 pi p n / A}    (inverse, 1/A)
//! ```
//!
//! Every constant in the spectral-density and SINR formulas assumes this
//! convention, so the FFT backend is wrapped here and used nowhere else.
//! Lengths are arbitrary composites (least common multiples such as 2560
//! are the normal case, not powers of two).

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan_forward(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

fn plan_inverse(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// Forward transform, unnormalized: `X_k = sum_p x_p e^{-j2pi pk/A}`.
pub fn forward_dft(x: &[Complex64]) -> Vec<Complex64> {
    assert!(!x.is_empty(), "transform length must be at least 1");
    let mut buf = x.to_vec();
    plan_forward(buf.len()).process(&mut buf);
    buf
}

/// Inverse transform carrying the `1/A` factor; exact inverse of
/// [`forward_dft`] up to rounding.
pub fn inverse_dft(x: &[Complex64]) -> Vec<Complex64> {
    assert!(!x.is_empty(), "transform length must be at least 1");
    let mut buf = x.to_vec();
    plan_inverse(buf.len()).process(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Stacking: folds a length-`L` block onto `out_len` outputs at spacing
/// `out_len`, averaging the `L / out_len` aliases:
///
/// ```text
/// out(r) = (1/F) sum_{s=0}^{F-1} d(s*out_len + r),   F = L / out_len
/// ```
///
/// This is the frequency-domain dual of time decimation. When at most
/// `out_len` entries of `d` are nonzero and they all fall in the first
/// fold, stacking reduces to a `1/F` scaling of those entries.
pub fn stack(d: &[Complex64], out_len: usize) -> Result<Vec<Complex64>> {
    if out_len == 0 || !d.len().is_multiple_of(out_len) {
        return Err(Error::NotDivisible {
            divisor: out_len,
            value: d.len(),
        });
    }
    let folds = d.len() / out_len;
    let scale = 1.0 / folds as f64;
    Ok((0..out_len)
        .map(|r| {
            let mut acc = Complex64::ZERO;
            let mut idx = r;
            for _ in 0..folds {
                acc += d[idx];
                idx += out_len;
            }
            acc * scale
        })
        .collect())
}

/// Concatenates `times` copies of the block.
pub fn repeat(x: &[Complex64], times: usize) -> Vec<Complex64> {
    assert!(times >= 1, "repetition factor must be at least 1");
    let mut out = Vec::with_capacity(x.len() * times);
    for _ in 0..times {
        out.extend_from_slice(x);
    }
    out
}

/// Zero-insertion upsampling: `out(n) = x(n/factor)` when `factor | n`,
/// zero otherwise.
pub fn upsample(x: &[Complex64], factor: usize) -> Vec<Complex64> {
    assert!(factor >= 1, "upsampling factor must be at least 1");
    let mut out = vec![Complex64::ZERO; x.len() * factor];
    for (i, &v) in x.iter().enumerate() {
        out[i * factor] = v;
    }
    out
}

/// Plain decimation: `out(n) = x(n*factor)`.
pub fn downsample(x: &[Complex64], factor: usize) -> Result<Vec<Complex64>> {
    if factor == 0 || !x.len().is_multiple_of(factor) {
        return Err(Error::NotDivisible {
            divisor: factor,
            value: x.len(),
        });
    }
    Ok(x.iter().step_by(factor).copied().collect())
}

/// Circular convolution `out(n) = sum_m x(m) h((n - m) mod L)` computed
/// through the transform domain. The contract is the modular sum; see
/// [`circular_convolve_direct`] for the reference evaluation.
pub fn circular_convolve(x: &[Complex64], h: &[Complex64]) -> Result<Vec<Complex64>> {
    if x.len() != h.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: h.len(),
        });
    }
    let mut xs = forward_dft(x);
    let hs = forward_dft(h);
    for (a, b) in xs.iter_mut().zip(&hs) {
        *a *= b;
    }
    Ok(inverse_dft(&xs))
}

/// O(L^2) modular-sum convolution, kept as an independent reference for
/// the transform-based path.
pub fn circular_convolve_direct(x: &[Complex64], h: &[Complex64]) -> Result<Vec<Complex64>> {
    if x.len() != h.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: h.len(),
        });
    }
    let l = x.len();
    Ok((0..l)
        .map(|n| {
            let mut acc = Complex64::ZERO;
            for (m, xm) in x.iter().enumerate() {
                acc += xm * h[(n + l - m) % l];
            }
            acc
        })
        .collect())
}
