//! Time-domain model of localised DFT-spread OFDM.
//!
//! A block of `M` user symbols is spread by an `M`-point DFT, shaped by a
//! length-`L` spectral window (`L = lcm(M, N)`), and carried on `N`
//! subcarriers; fractional rates (`N` not a multiple of `M`) are first
//! class. Next to the classical frequency-domain chain the crate carries
//! the equivalent single-rate description built on circular convolution
//! of upsampled filters, which is what the spectral-density and SINR
//! analysis is written on. The two are interchangeable and their agreement
//! is continuously asserted.
//!
//! Module map:
//!
//! * [`geometry`] — the integer rate structure `(M, N, L, L_M, L_N, N_g, N_t)`.
//! * [`dft`] — transform conventions (unnormalized forward, `1/A` inverse),
//!   stacking, rate changers, circular convolution.
//! * [`shaping`] — rectangular and root-raised-cosine transmit windows.
//! * [`txchain`] — both transmit/receive routes, cyclic prefix, and the
//!   single-filter simplified link.
//! * [`channel`] — block-fading tapped-delay channels and noise.
//! * [`equalize`] — ZF and MMSE joint demapper/equalizers, overall response.
//! * [`psd`] — closed-form spectrum and Welch estimation.
//! * [`sinr`] — useful/interference/noise powers, analytical SINR and
//!   Monte Carlo campaigns.
//! * [`validate`] — the cross-module consistency suite.

pub mod channel;
pub mod dft;
pub mod equalize;
pub mod error;
pub mod geometry;
pub mod psd;
pub mod shaping;
pub mod sinr;
pub mod txchain;
pub mod validate;

pub use error::{Error, Result};
pub use geometry::SystemGeometry;
