//! Block-fading tapped-delay-line channel and additive noise.
//!
//! A realization is drawn once per block: each tap gets an independent
//! circularly-symmetric complex Gaussian gain whose variance is the tap's
//! average power. The frequency response `C` lives on the `N` subcarriers;
//! analysis at the common length `L` uses the zero-extension `C~` (equal to
//! `C` on `[0, N)`, zero on `[N, L)`) and its time filter `c~ = IFFT_L(C~)`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dft::inverse_dft;
use crate::error::{Error, Result};
use crate::geometry::SystemGeometry;

/// One power-delay-profile entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TapEntry {
    pub delay_ns: f64,
    pub avg_power_db: f64,
}

/// Average power-delay profile with the sample duration used to quantize
/// delays to sample indices (nearest-sample rounding).
#[derive(Debug, Clone, PartialEq)]
pub struct TapProfile {
    entries: Vec<TapEntry>,
    sample_duration_ns: f64,
}

impl TapProfile {
    pub fn new(entries: Vec<TapEntry>, sample_duration_ns: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Profile("profile has no taps".into()));
        }
        if !sample_duration_ns.is_finite() || sample_duration_ns <= 0.0 {
            return Err(Error::Profile("sample duration must be positive".into()));
        }
        if entries
            .iter()
            .any(|e| e.delay_ns < 0.0 || !e.delay_ns.is_finite())
        {
            return Err(Error::Profile("tap delays must be finite and >= 0".into()));
        }
        Ok(Self {
            entries,
            sample_duration_ns,
        })
    }

    /// Simplified three-tap pedestrian profile on the 5 MHz grid (sample
    /// duration 66.67 us / 512 = 130.2 ns): (0 ns, 0 dB),
    /// (130.2 ns, -9.24 dB), (390.6 ns, -22.8 dB).
    pub fn pedestrian_a() -> Self {
        Self::new(
            vec![
                TapEntry {
                    delay_ns: 0.0,
                    avg_power_db: 0.0,
                },
                TapEntry {
                    delay_ns: 130.2,
                    avg_power_db: -9.24,
                },
                TapEntry {
                    delay_ns: 390.6,
                    avg_power_db: -22.8,
                },
            ],
            130.2,
        )
        .expect("static profile is valid")
    }

    /// Single tap at delay zero, 0 dB.
    pub fn single_tap() -> Self {
        Self::new(
            vec![TapEntry {
                delay_ns: 0.0,
                avg_power_db: 0.0,
            }],
            1.0,
        )
        .expect("static profile is valid")
    }

    /// Parses `delay_ns,power_db` rows. Blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str, sample_duration_ns: f64) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',').map(str::trim);
            let parse = |field: Option<&str>| -> Result<f64> {
                field.and_then(|v| v.parse::<f64>().ok()).ok_or_else(|| {
                    Error::Profile(format!("line {}: expected `delay_ns,power_db`", lineno + 1))
                })
            };
            let delay_ns = parse(parts.next())?;
            let avg_power_db = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::Profile(format!(
                    "line {}: trailing fields",
                    lineno + 1
                )));
            }
            entries.push(TapEntry {
                delay_ns,
                avg_power_db,
            });
        }
        Self::new(entries, sample_duration_ns)
    }

    pub fn entries(&self) -> &[TapEntry] {
        &self.entries
    }

    /// Tap delays quantized to sample indices.
    pub fn sample_delays(&self) -> Vec<usize> {
        self.entries
            .iter()
            .map(|e| (e.delay_ns / self.sample_duration_ns).round() as usize)
            .collect()
    }

    /// Average tap powers in linear scale, optionally normalized to unit
    /// total power.
    pub fn linear_powers(&self, normalize: bool) -> Vec<f64> {
        let mut powers: Vec<f64> = self
            .entries
            .iter()
            .map(|e| 10f64.powf(e.avg_power_db / 10.0))
            .collect();
        if normalize {
            let total: f64 = powers.iter().sum();
            for p in &mut powers {
                *p /= total;
            }
        }
        powers
    }

    pub fn max_delay_samples(&self) -> usize {
        self.sample_delays().into_iter().max().unwrap_or(0)
    }
}

/// One block-fading channel realization.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    taps: Vec<(usize, Complex64)>,
    freq: Vec<Complex64>,
    ext: Vec<Complex64>,
    time: Vec<Complex64>,
}

impl ChannelRealization {
    /// Draws tap gains from `profile` and derives the responses. Requires
    /// the channel memory to be covered by the cyclic prefix.
    pub fn draw<R: Rng>(
        profile: &TapProfile,
        rng: &mut R,
        g: &SystemGeometry,
        normalize: bool,
    ) -> Result<Self> {
        let delays = profile.sample_delays();
        let powers = profile.linear_powers(normalize);
        let taps: Vec<(usize, Complex64)> = delays
            .into_iter()
            .zip(powers)
            .map(|(d, p)| {
                let sigma = (p / 2.0).sqrt();
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                (d, Complex64::new(re * sigma, im * sigma))
            })
            .collect();
        Self::from_taps(taps, g)
    }

    /// Deterministic flat channel: a single unit tap at delay zero, so
    /// `C_k = 1` on every subcarrier.
    pub fn flat_unit(g: &SystemGeometry) -> Self {
        Self::from_taps(vec![(0, Complex64::ONE)], g).expect("flat channel is always valid")
    }

    /// Builds the responses from explicit `(delay, gain)` taps.
    pub fn from_taps(taps: Vec<(usize, Complex64)>, g: &SystemGeometry) -> Result<Self> {
        let max_delay = taps.iter().map(|&(d, _)| d).max().unwrap_or(0);
        if max_delay > g.n_g() {
            return Err(Error::Profile(format!(
                "max tap delay {max_delay} samples exceeds cyclic prefix {}",
                g.n_g()
            )));
        }
        let n = g.n();
        let freq: Vec<Complex64> = (0..n)
            .map(|k| {
                taps.iter()
                    .map(|&(d, gain)| {
                        gain * Complex64::cis(
                            -std::f64::consts::TAU * k as f64 * d as f64 / n as f64,
                        )
                    })
                    .sum()
            })
            .collect();
        let mut ext = vec![Complex64::ZERO; g.l()];
        ext[..n].copy_from_slice(&freq);
        let time = inverse_dft(&ext);
        Ok(Self {
            taps,
            freq,
            ext,
            time,
        })
    }

    pub fn taps(&self) -> &[(usize, Complex64)] {
        &self.taps
    }

    /// Frequency response `C` over the `N` subcarriers.
    pub fn freq(&self) -> &[Complex64] {
        &self.freq
    }

    /// Zero-extended response `C~` over length `L`.
    pub fn ext(&self) -> &[Complex64] {
        &self.ext
    }

    /// Length-`L` time filter `c~ = IFFT_L(C~)`.
    pub fn time(&self) -> &[Complex64] {
        &self.time
    }
}

/// Per-sample complex noise variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub sigma_w2: f64,
}

/// Circularly-symmetric complex Gaussian samples with per-sample variance
/// `sigma_w2` (real and imaginary parts independent `N(0, sigma_w2/2)`).
pub fn awgn<R: Rng>(rng: &mut R, count: usize, noise: &NoiseModel) -> Vec<Complex64> {
    assert!(count >= 1, "sample count must be at least 1");
    if noise.sigma_w2 == 0.0 {
        return vec![Complex64::ZERO; count];
    }
    let sigma = (noise.sigma_w2 / 2.0).sqrt();
    (0..count)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re * sigma, im * sigma)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dft::forward_dft;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn geo() -> SystemGeometry {
        SystemGeometry::new(10, 512, 31).unwrap()
    }

    #[test]
    fn pedestrian_a_quantization() {
        let p = TapProfile::pedestrian_a();
        assert_eq!(p.sample_delays(), vec![0, 1, 3]);
        let powers = p.linear_powers(false);
        assert!((powers[0] - 1.0).abs() < 1e-12);
        assert!((powers[1] - 10f64.powf(-0.924)).abs() < 1e-12);
        assert!((powers[2] - 10f64.powf(-2.28)).abs() < 1e-12);
        assert!(p.max_delay_samples() <= 31);
    }

    #[test]
    fn parse_profile_rows() {
        let p = TapProfile::parse("# tap list\n0,0\n130.2, -9.24\n\n390.6,-22.8\n", 130.2).unwrap();
        assert_eq!(p, TapProfile::pedestrian_a());
        assert!(TapProfile::parse("not,a,profile\n", 130.2).is_err());
        assert!(TapProfile::parse("", 130.2).is_err());
    }

    #[test]
    fn single_tap_is_flat() {
        let g = geo();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let ch = ChannelRealization::draw(&TapProfile::single_tap(), &mut rng, &g, true).unwrap();
        let mag0 = ch.freq()[0].norm();
        for v in ch.freq() {
            assert!((v.norm() - mag0).abs() < 1e-12);
        }
    }

    #[test]
    fn normalized_energy_is_unit_on_average() {
        let g = geo();
        let profile = TapProfile::pedestrian_a();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let trials = 100_000;
        let mut acc = 0.0;
        for _ in 0..trials {
            let ch = ChannelRealization::draw(&profile, &mut rng, &g, true).unwrap();
            acc += ch.taps().iter().map(|(_, g)| g.norm_sqr()).sum::<f64>();
        }
        let mean = acc / trials as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean tap energy {mean}");
    }

    #[test]
    fn extension_tail_is_exactly_zero() {
        let g = geo();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ch = ChannelRealization::draw(&TapProfile::pedestrian_a(), &mut rng, &g, true).unwrap();
        assert_eq!(ch.ext().len(), g.l());
        for v in &ch.ext()[g.n()..] {
            assert_eq!(v.norm_sqr(), 0.0);
        }
        assert_eq!(&ch.ext()[..g.n()], ch.freq());
    }

    #[test]
    fn frequency_response_matches_transform_of_impulse_response() {
        let g = geo();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = ChannelRealization::draw(&TapProfile::pedestrian_a(), &mut rng, &g, true).unwrap();
        let mut impulse = vec![Complex64::ZERO; g.n()];
        for &(d, gain) in ch.taps() {
            impulse[d] += gain;
        }
        let freq = forward_dft(&impulse);
        for (a, b) in freq.iter().zip(ch.freq()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_memory_beyond_cp() {
        let g = SystemGeometry::new(4, 8, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = ChannelRealization::draw(&TapProfile::pedestrian_a(), &mut rng, &g, true);
        assert!(err.is_err());
    }

    #[test]
    fn awgn_variance_and_circularity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 1_000_000;
        let sigma_w2 = 0.7;
        let w = awgn(&mut rng, n, &NoiseModel { sigma_w2 });
        let var = w.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
        assert!((var - sigma_w2).abs() < 0.005 * sigma_w2, "variance {var}");

        // Non-conjugate second moment vanishes for a circular process.
        let pseudo = w.iter().map(|v| v * v).sum::<Complex64>() / n as f64;
        let bound = 3.0 * 2f64.sqrt() * sigma_w2 / (n as f64).sqrt();
        assert!(pseudo.norm() < bound, "pseudo-variance {pseudo}");
    }

    #[test]
    fn zero_variance_noise_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = awgn(&mut rng, 16, &NoiseModel { sigma_w2: 0.0 });
        assert!(w.iter().all(|v| v.norm_sqr() == 0.0));
    }

    #[test]
    fn same_seed_same_realizations() {
        let g = geo();
        let profile = TapProfile::pedestrian_a();
        let draw_seq = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..8)
                .map(|_| {
                    ChannelRealization::draw(&profile, &mut rng, &g, true)
                        .unwrap()
                        .taps()
                        .to_vec()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(draw_seq(123), draw_seq(123));
        assert_ne!(draw_seq(123), draw_seq(124));
    }
}
