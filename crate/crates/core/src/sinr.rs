//! Analytical and empirical signal-to-interference-and-noise ratio.
//!
//! For an overall response `P` and equalizer `G` the mean SINR is
//!
//! ```text
//!                      |sum_k P_k|^2
//! ---------------------------------------------------------------------
//! M sum_r |sum_l P_{lM+r}|^2 - |sum_k P_k|^2 + (es_n0)^-1 sum|H C~|^2 sum|G|^2
//! ```
//!
//! equivalently `P_u / (sigma_i^2 + sigma_w~^2)` with the powers below and
//! the per-sample noise variance tied to `Es/N0` through
//! `N sigma_w^2 / sigma_x^2 = (Es/N0)^-1 sum_k |H_k C~_k|^2`.
//!
//! The empirical estimate replays the exact three-way decomposition of the
//! simplified model over block-fading realizations, with equivalent noise
//! drawn through the receive chain; only the noise stationarization (the
//! average over symbol positions) is statistical.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{awgn, ChannelRealization, NoiseModel, TapProfile};
use crate::equalize::{EqualizerKind, EqualizerResponse, OverallResponse};
use crate::error::{Error, Result};
use crate::geometry::SystemGeometry;
use crate::shaping::SpectralWindow;
use crate::txchain::{end_to_end_simplified, rx_reference, SymbolBlock, TimeFrame};

/// `10 log10(x)`.
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Inverse of [`to_db`].
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Symbol-energy budget: `Es/N0` with the symbol and per-sample noise
/// variances it implies.
#[derive(Debug, Clone, Copy)]
pub struct LinkBudget {
    /// `Es/N0`, linear.
    pub es_n0: f64,
    pub sigma_x2: f64,
    pub sigma_w2: f64,
}

impl LinkBudget {
    pub fn from_es_n0(
        es_n0: f64,
        sigma_x2: f64,
        w: &SpectralWindow,
        ch: &ChannelRealization,
        g: &SystemGeometry,
    ) -> Result<Self> {
        let sigma_w2 = es_n0_to_sigma_w2(es_n0, sigma_x2, w, ch, g)?;
        Ok(Self {
            es_n0,
            sigma_x2,
            sigma_w2,
        })
    }
}

/// Per-sample noise variance realizing a target `Es/N0`:
/// `sigma_w2 = sigma_x2 * sum_k |H_k C~_k|^2 / (N * es_n0)`.
pub fn es_n0_to_sigma_w2(
    es_n0: f64,
    sigma_x2: f64,
    w: &SpectralWindow,
    ch: &ChannelRealization,
    g: &SystemGeometry,
) -> Result<f64> {
    assert!(es_n0 > 0.0 && sigma_x2 > 0.0);
    let gain = window_channel_power(w, ch);
    if gain == 0.0 {
        return Err(Error::ZeroOverlap);
    }
    Ok(sigma_x2 * gain / (g.n() as f64 * es_n0))
}

/// `sum_k |H_k C~_k|^2` over the full length.
pub fn window_channel_power(w: &SpectralWindow, ch: &ChannelRealization) -> f64 {
    w.support()
        .iter()
        .map(|&k| (w.freq()[k] * ch.ext()[k]).norm_sqr())
        .sum()
}

/// Useful-term power `P_u = (sigma_x2 / M^2) |sum_k P_k|^2`.
pub fn useful_power(p: &OverallResponse, sigma_x2: f64, g: &SystemGeometry) -> f64 {
    let m2 = (g.m() * g.m()) as f64;
    sigma_x2 / m2 * p.total_sum().norm_sqr()
}

/// Interference power
/// `(sigma_x2 / M^2) (M sum_r |sum_l P_{lM+r}|^2 - |sum_k P_k|^2)`,
/// with negative round-off clamped to zero.
pub fn interference_power(p: &OverallResponse, sigma_x2: f64, g: &SystemGeometry) -> f64 {
    let m = g.m() as f64;
    let stacked: f64 = p.stacked_sums(g).iter().map(|v| v.norm_sqr()).sum();
    let total = p.total_sum().norm_sqr();
    let raw = sigma_x2 / (m * m) * (m * stacked - total);
    raw.max(0.0)
}

/// Stationarized equivalent-noise power
/// `(sigma_w2 N / M^2) sum_k |G_k|^2` (sum over the full length-`L`
/// response; `G` vanishes off its support).
pub fn noise_power(eq: &EqualizerResponse, g: &SystemGeometry, sigma_w2: f64) -> f64 {
    let m2 = (g.m() * g.m()) as f64;
    let gain: f64 = eq.freq().iter().map(|v| v.norm_sqr()).sum();
    sigma_w2 * g.n() as f64 / m2 * gain
}

/// Mean SINR in the `Es/N0` form (see module docs). Agrees with the
/// composition `P_u / (sigma_i^2 + sigma_w~^2)` to machine precision when
/// the noise variance comes from the same budget.
pub fn analytical_sinr(
    p: &OverallResponse,
    eq: &EqualizerResponse,
    w: &SpectralWindow,
    ch: &ChannelRealization,
    g: &SystemGeometry,
    link: &LinkBudget,
) -> Result<f64> {
    let m = g.m() as f64;
    let total = p.total_sum().norm_sqr();
    let stacked: f64 = p.stacked_sums(g).iter().map(|v| v.norm_sqr()).sum();
    let interference = (m * stacked - total).max(0.0);
    let eq_gain: f64 = eq.freq().iter().map(|v| v.norm_sqr()).sum();
    let noise = window_channel_power(w, ch) * eq_gain / link.es_n0;
    let den = interference + noise;
    if total == 0.0 {
        return Err(Error::Config("degenerate all-zero system".into()));
    }
    if den == 0.0 {
        // Interference-free and noiseless; flag rather than divide.
        return Ok(f64::INFINITY);
    }
    Ok(total / den)
}

/// Equivalent receiver noise: the receive chain applied to a block of `N`
/// channel-noise samples (upsample by `L_N`, convolve with `g`, take every
/// `L_M`-th sample, scale by `L_M`), yielding `M` noise samples at the
/// symbol rate.
pub fn equivalent_noise(
    w_samples: &[Complex64],
    eq: &EqualizerResponse,
    g: &SystemGeometry,
) -> Result<Vec<Complex64>> {
    rx_reference(&TimeFrame::new(w_samples.to_vec()), eq, g)
}

/// Channel model for a campaign.
#[derive(Debug, Clone)]
pub enum ChannelSource {
    /// Block-fading draws from a tap profile.
    Profile {
        profile: TapProfile,
        normalize: bool,
    },
    /// Deterministic all-pass channel (`C_k = 1`).
    FlatUnit,
}

impl ChannelSource {
    fn max_attempts(&self) -> usize {
        match self {
            ChannelSource::Profile { .. } => 10_000,
            ChannelSource::FlatUnit => 1,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, g: &SystemGeometry) -> Result<ChannelRealization> {
        match self {
            ChannelSource::Profile { profile, normalize } => {
                ChannelRealization::draw(profile, rng, g, *normalize)
            }
            ChannelSource::FlatUnit => Ok(ChannelRealization::flat_unit(g)),
        }
    }
}

/// Monte Carlo campaign description.
#[derive(Debug, Clone)]
pub struct SinrConfig {
    pub equalizer: EqualizerKind,
    pub channel: ChannelSource,
    pub sigma_x2: f64,
    /// `Es/N0` grid in dB.
    pub es_n0_db: Vec<f64>,
    pub realizations: usize,
    pub frames_per_realization: usize,
    pub seed: u64,
}

/// One `Es/N0` grid point of a campaign.
#[derive(Debug, Clone, Copy)]
pub struct SinrPoint {
    pub es_n0_db: f64,
    /// Mean of per-realization SINR in dB (dB-domain averaging).
    pub analytical_db_mean: f64,
    pub empirical_db_mean: f64,
    /// 95% half-width of the empirical dB mean across realizations.
    pub ci_halfwidth_db: f64,
    /// Mean per-symbol powers across realizations, linear.
    pub useful: f64,
    pub interference: f64,
    pub noise: f64,
    /// Linear-domain means, used for theory/empirics comparison.
    pub analytical_linear_mean: f64,
    pub empirical_linear_mean: f64,
}

/// Campaign result.
#[derive(Debug, Clone)]
pub struct SinrReport {
    pub points: Vec<SinrPoint>,
    /// Realizations redrawn because zero-forcing hit an exact channel null.
    pub dropped_realizations: usize,
    pub realizations: usize,
    pub frames_per_realization: usize,
}

struct RealizationStats {
    analytical: Vec<f64>,
    empirical: Vec<f64>,
    useful: Vec<f64>,
    interference: Vec<f64>,
    noise: Vec<f64>,
    dropped: usize,
}

/// Runs a block-fading campaign: per realization, builds the equalizer and
/// overall response, evaluates the analytical SINR, and accumulates the
/// exact useful/interference powers plus equivalent-noise power over
/// `frames_per_realization` symbol blocks.
///
/// Realizations use independent seeded substreams indexed by realization
/// number, so results are identical for any worker count. Realizations on
/// which zero-forcing is singular are redrawn and counted.
pub fn run_campaign(
    w: &SpectralWindow,
    g: &SystemGeometry,
    cfg: &SinrConfig,
) -> Result<SinrReport> {
    if cfg.realizations == 0 || cfg.es_n0_db.is_empty() {
        return Err(Error::Config(
            "need at least one realization and one grid point".into(),
        ));
    }
    if cfg.equalizer == EqualizerKind::Custom {
        return Err(Error::Config("campaigns support ZF and MMSE only".into()));
    }
    let es_n0: Vec<f64> = cfg.es_n0_db.iter().map(|&db| from_db(db)).collect();

    let stats: Vec<Result<RealizationStats>> = (0..cfg.realizations)
        .into_par_iter()
        .map(|idx| run_realization(idx as u64, w, g, cfg, &es_n0))
        .collect();

    let grid_len = es_n0.len();
    let r = cfg.realizations as f64;
    let mut dropped = 0usize;
    let mut analytical_lin = vec![0.0; grid_len];
    let mut analytical_db = vec![0.0; grid_len];
    let mut empirical_lin = vec![0.0; grid_len];
    let mut empirical_db: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.realizations); grid_len];
    let mut useful = vec![0.0; grid_len];
    let mut interference = vec![0.0; grid_len];
    let mut noise = vec![0.0; grid_len];
    for s in stats {
        let s = s?;
        dropped += s.dropped;
        for i in 0..grid_len {
            analytical_lin[i] += s.analytical[i];
            analytical_db[i] += to_db(s.analytical[i]);
            empirical_lin[i] += s.empirical[i];
            empirical_db[i].push(to_db(s.empirical[i]));
            useful[i] += s.useful[i];
            interference[i] += s.interference[i];
            noise[i] += s.noise[i];
        }
    }

    let points = (0..grid_len)
        .map(|i| {
            let db_samples = &empirical_db[i];
            let db_mean = db_samples.iter().sum::<f64>() / r;
            let var = if db_samples.len() > 1 {
                db_samples
                    .iter()
                    .map(|&v| (v - db_mean) * (v - db_mean))
                    .sum::<f64>()
                    / (r - 1.0)
            } else {
                0.0
            };
            SinrPoint {
                es_n0_db: cfg.es_n0_db[i],
                analytical_db_mean: analytical_db[i] / r,
                empirical_db_mean: db_mean,
                ci_halfwidth_db: 1.96 * (var / r).sqrt(),
                useful: useful[i] / r,
                interference: interference[i] / r,
                noise: noise[i] / r,
                analytical_linear_mean: analytical_lin[i] / r,
                empirical_linear_mean: empirical_lin[i] / r,
            }
        })
        .collect();

    Ok(SinrReport {
        points,
        dropped_realizations: dropped,
        realizations: cfg.realizations,
        frames_per_realization: cfg.frames_per_realization,
    })
}

fn run_realization(
    idx: u64,
    w: &SpectralWindow,
    g: &SystemGeometry,
    cfg: &SinrConfig,
    es_n0: &[f64],
) -> Result<RealizationStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(idx);

    // Redraw until zero-forcing is constructible; an exact null across all
    // aliases of a bin has probability zero under continuous fading, but a
    // silent drop would bias the mean, so redraws are counted.
    let mut dropped = 0usize;
    let (ch, zf_eq) = loop {
        let ch = cfg.channel.draw(&mut rng, g)?;
        match cfg.equalizer {
            EqualizerKind::Zf => match EqualizerResponse::zero_forcing(w, &ch, g) {
                Ok(eq) => break (ch, Some(eq)),
                Err(Error::SingularSubchannel { .. }) => {
                    dropped += 1;
                    if dropped >= cfg.channel.max_attempts() {
                        return Err(Error::Config(format!(
                            "zero-forcing singular on {dropped} consecutive draws"
                        )));
                    }
                }
                Err(other) => return Err(other),
            },
            _ => break (ch, None),
        }
    };

    let grid_len = es_n0.len();
    let mut stats = RealizationStats {
        analytical: vec![0.0; grid_len],
        empirical: vec![0.0; grid_len],
        useful: vec![0.0; grid_len],
        interference: vec![0.0; grid_len],
        noise: vec![0.0; grid_len],
        dropped,
    };
    let zf_overall = zf_eq.as_ref().map(|eq| OverallResponse::new(w, &ch, eq, g));

    for (i, &snr) in es_n0.iter().enumerate() {
        let mmse_built = match &zf_eq {
            Some(_) => None,
            None => {
                let eq = EqualizerResponse::mmse(w, &ch, g, snr)?;
                let p = OverallResponse::new(w, &ch, &eq, g);
                Some((eq, p))
            }
        };
        let (eq, p): (&EqualizerResponse, &OverallResponse) = match (&zf_eq, &zf_overall) {
            (Some(eq), Some(p)) => (eq, p),
            _ => {
                let built = mmse_built.as_ref().expect("built above");
                (&built.0, &built.1)
            }
        };
        let link = LinkBudget::from_es_n0(snr, cfg.sigma_x2, w, &ch, g)?;
        stats.analytical[i] = analytical_sinr(p, eq, w, &ch, g, &link)?;

        let mut u_acc = 0.0;
        let mut i_acc = 0.0;
        let mut w_acc = 0.0;
        for _ in 0..cfg.frames_per_realization {
            let xb = SymbolBlock::qpsk(&mut rng, g.m(), cfg.sigma_x2);
            let w_chan = awgn(
                &mut rng,
                g.n(),
                &NoiseModel {
                    sigma_w2: link.sigma_w2,
                },
            );
            let w_eq = equivalent_noise(&w_chan, eq, g)?;
            let out = end_to_end_simplified(&xb, p, &w_eq, g)?;
            u_acc += out.useful.iter().map(|v| v.norm_sqr()).sum::<f64>();
            i_acc += out.interference.iter().map(|v| v.norm_sqr()).sum::<f64>();
            w_acc += out.noise.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        let samples = (cfg.frames_per_realization * g.m()) as f64;
        stats.useful[i] = u_acc / samples;
        stats.interference[i] = i_acc / samples;
        stats.noise[i] = w_acc / samples;
        stats.empirical[i] = if i_acc + w_acc > 0.0 {
            u_acc / (i_acc + w_acc)
        } else {
            // Interference-free, noiseless: flag as infinite rather than
            // dividing by zero.
            f64::INFINITY
        };
    }
    Ok(stats)
}
