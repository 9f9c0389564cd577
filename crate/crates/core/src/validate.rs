//! Cross-module consistency suite behind the `validate` CLI subcommand.
//!
//! Each check exercises an identity that holds across module boundaries:
//! multirate transform identities, agreement of the frequency and time
//! processing routes, channel circularization by the cyclic prefix, the
//! zero-forcing structure, agreement of the two SINR forms, and the
//! equivalent-noise variance.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{awgn, ChannelRealization, NoiseModel, TapProfile};
use crate::dft::{downsample, forward_dft, inverse_dft, repeat, stack, upsample};
use crate::equalize::{EqualizerResponse, OverallResponse};
use crate::error::Result;
use crate::geometry::SystemGeometry;
use crate::shaping::{ShapingConfig, SpectralWindow};
use crate::sinr::{
    analytical_sinr, equivalent_noise, interference_power, noise_power, useful_power, LinkBudget,
};
use crate::txchain::{
    add_cp, remove_cp, rx_reference, rx_time_equivalent, tx_reference, tx_time_equivalent,
    SymbolBlock, TimeFrame,
};

/// Outcome of one invariant check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// All checks of one run.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn push_bound(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.push(
            name,
            value <= bound,
            format!("{value:.3e} (bound {bound:.1e})"),
        );
    }
}

/// The geometry triples `(M, N, N_g)` validated when none is given.
pub const DEFAULT_GEOMETRIES: &[(usize, usize, usize)] = &[(4, 8, 2), (6, 8, 0), (10, 512, 31)];

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn random_block(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect()
}

/// A profile whose memory fits under the geometry's cyclic prefix: the
/// pedestrian profile where it fits, shorter surrogates otherwise.
fn profile_for(g: &SystemGeometry) -> TapProfile {
    if g.n_g() >= TapProfile::pedestrian_a().max_delay_samples() {
        TapProfile::pedestrian_a()
    } else if g.n_g() >= 1 {
        TapProfile::parse("0,0\n1,-6\n", 1.0).expect("static profile")
    } else {
        TapProfile::single_tap()
    }
}

fn windows_for(g: &SystemGeometry) -> Vec<SpectralWindow> {
    let mut out = vec![SpectralWindow::rectangular(g, 0).expect("block 0 fits")];
    if let Ok(w) = SpectralWindow::from_config(g, &ShapingConfig::root_raised_cosine(0.35)) {
        out.push(w);
    }
    out
}

/// Noble identities on random data at the given geometry.
fn check_noble_identities(report: &mut ValidationReport, g: &SystemGeometry, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_up = 0.0f64;
    let mut worst_down = 0.0f64;
    for _ in 0..20 {
        let x = random_block(&mut rng, g.m());
        let lhs = forward_dft(&upsample(&x, g.l_m()));
        let rhs = repeat(&forward_dft(&x), g.l_m());
        worst_up = worst_up.max(max_abs_diff(&lhs, &rhs));

        let d = random_block(&mut rng, g.l());
        let lhs = downsample(&inverse_dft(&d), g.l_n()).expect("L_N divides L");
        let rhs = inverse_dft(&stack(&d, g.n()).expect("N divides L"));
        worst_down = worst_down.max(max_abs_diff(&lhs, &rhs));
    }
    let label = format!("(M={}, N={})", g.m(), g.n());
    report.push_bound(
        format!("noble identity, up-sampling {label}"),
        worst_up,
        1e-10,
    );
    report.push_bound(
        format!("noble identity, down-sampling {label}"),
        worst_down,
        1e-10,
    );
}

/// Largest transmit-route deviation over random blocks, with a scale knob
/// on the time route so a deliberately wrong normalization is detectable.
#[doc(hidden)]
pub fn tx_path_deviation_scaled(
    g: &SystemGeometry,
    w: &SpectralWindow,
    frames: usize,
    seed: u64,
    time_route_scale: f64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..frames {
        let xb = SymbolBlock::qpsk(&mut rng, g.m(), 1.0);
        let a = tx_reference(&xb, w, g)?;
        let mut b = tx_time_equivalent(&xb, w, g)?;
        for v in &mut b.samples {
            *v *= time_route_scale;
        }
        worst = worst.max(max_abs_diff(&a.samples, &b.samples));
    }
    Ok(worst)
}

/// Largest receive-route deviation over random frames.
pub fn rx_path_deviation(
    g: &SystemGeometry,
    eq: &EqualizerResponse,
    frames: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..frames {
        let frame = TimeFrame::new(random_block(&mut rng, g.n()));
        let a = rx_reference(&frame, eq, g)?;
        let b = rx_time_equivalent(&frame, eq, g)?;
        worst = worst.max(max_abs_diff(&a, &b));
    }
    Ok(worst)
}

fn check_path_equivalence(
    report: &mut ValidationReport,
    g: &SystemGeometry,
    seed: u64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
    let ch = ChannelRealization::draw(&profile_for(g), &mut rng, g, true)?;
    for w in windows_for(g) {
        let label = format!("(M={}, N={}, {:?})", g.m(), g.n(), w.kind());
        let tx = tx_path_deviation_scaled(g, &w, 50, seed, 1.0)?;
        report.push_bound(format!("tx route equivalence {label}"), tx, 1e-9);
        let eq = EqualizerResponse::mmse(&w, &ch, g, 10.0)?;
        let rx = rx_path_deviation(g, &eq, 50, seed)?;
        report.push_bound(format!("rx route equivalence {label}"), rx, 1e-9);
    }
    Ok(())
}

/// Multi-frame linear convolution with per-frame channels against the
/// per-frame circular model.
pub fn cp_circularization_deviation(
    g: &SystemGeometry,
    w: &SpectralWindow,
    profile: &TapProfile,
    frames: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut channels = Vec::with_capacity(frames);
    let mut stream: Vec<Complex64> = Vec::with_capacity(frames * g.n_t());
    let mut bodies = Vec::with_capacity(frames);
    for _ in 0..frames {
        let xb = SymbolBlock::qpsk(&mut rng, g.m(), 1.0);
        let body = tx_reference(&xb, w, g)?;
        let framed = add_cp(&body, g)?;
        stream.extend_from_slice(&framed.samples);
        bodies.push(body);
        channels.push(ChannelRealization::draw(profile, &mut rng, g, true)?);
    }

    // Tapped-delay line over the whole stream; each output sample uses the
    // taps of the frame it lands in (the channel is constant per block).
    let received: Vec<Complex64> = (0..stream.len())
        .map(|i| {
            let ch = &channels[i / g.n_t()];
            ch.taps()
                .iter()
                .map(|&(d, gain)| {
                    if i >= d {
                        gain * stream[i - d]
                    } else {
                        Complex64::ZERO
                    }
                })
                .sum()
        })
        .collect();

    let mut worst = 0.0f64;
    for (l, body) in bodies.iter().enumerate() {
        let framed = TimeFrame {
            samples: received[l * g.n_t()..(l + 1) * g.n_t()].to_vec(),
            has_cp: true,
        };
        let linear = remove_cp(&framed, g)?;

        let mut spectrum = forward_dft(&body.samples);
        for (v, c) in spectrum.iter_mut().zip(channels[l].freq()) {
            *v *= c;
        }
        let circular = inverse_dft(&spectrum);
        worst = worst.max(max_abs_diff(&linear.samples, &circular));
    }
    Ok(worst)
}

fn check_cp_circularization(
    report: &mut ValidationReport,
    g: &SystemGeometry,
    seed: u64,
) -> Result<()> {
    let w = SpectralWindow::rectangular(g, 0)?;
    let deviation = cp_circularization_deviation(g, &w, &profile_for(g), 20, seed)?;
    report.push_bound(
        format!(
            "cyclic prefix circularizes the channel (M={}, N={})",
            g.m(),
            g.n()
        ),
        deviation,
        1e-9,
    );
    Ok(())
}

/// Whether zero-forcing is structurally possible: every alias class the
/// window occupies must keep at least one bin on a live subcarrier
/// (`k < N`, where the extended channel response is nonzero).
pub fn zero_forcing_applicable(w: &SpectralWindow, g: &SystemGeometry) -> bool {
    let mut live = vec![false; g.m()];
    let mut occupied = vec![false; g.m()];
    for &k in w.support() {
        occupied[k % g.m()] = true;
        if k < g.n() {
            live[k % g.m()] = true;
        }
    }
    occupied.iter().zip(&live).all(|(o, l)| !o || *l)
}

fn check_zero_forcing(report: &mut ValidationReport, g: &SystemGeometry, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51f0);
    let profile = profile_for(g);
    for w in windows_for(g) {
        // Windows whose excess band has alias classes without any live
        // subcarrier cannot be zero-forced at all; nothing to check.
        if !zero_forcing_applicable(&w, g) {
            continue;
        }
        let label = format!("(M={}, N={}, {:?})", g.m(), g.n(), w.kind());
        let mut worst_sum = 0.0f64;
        let mut worst_interf = 0.0f64;
        for _ in 0..20 {
            let ch = ChannelRealization::draw(&profile, &mut rng, g, true)?;
            let eq = EqualizerResponse::zero_forcing(&w, &ch, g)?;
            let p = OverallResponse::new(&w, &ch, &eq, g);
            for s in p.stacked_sums(g) {
                worst_sum = worst_sum.max((s - Complex64::ONE).norm());
            }
            let pu = useful_power(&p, 1.0, g);
            worst_interf = worst_interf.max(interference_power(&p, 1.0, g) / pu);
        }
        report.push_bound(
            format!("zero-forcing stacked sums equal one {label}"),
            worst_sum,
            1e-10,
        );
        report.push_bound(
            format!("zero-forcing interference-free {label}"),
            worst_interf,
            1e-10,
        );
    }
    Ok(())
}

fn check_sinr_forms(report: &mut ValidationReport, g: &SystemGeometry, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
    let profile = profile_for(g);
    let w = SpectralWindow::rectangular(g, 0)?;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let ch = ChannelRealization::draw(&profile, &mut rng, g, true)?;
        let eq = EqualizerResponse::mmse(&w, &ch, g, 31.6)?;
        let p = OverallResponse::new(&w, &ch, &eq, g);
        let link = LinkBudget::from_es_n0(31.6, 1.0, &w, &ch, g)?;
        let direct = analytical_sinr(&p, &eq, &w, &ch, g, &link)?;
        let composed = useful_power(&p, 1.0, g)
            / (interference_power(&p, 1.0, g) + noise_power(&eq, g, link.sigma_w2));
        worst = worst.max((direct - composed).abs() / direct);
    }
    report.push_bound(
        format!(
            "SINR budget and power forms agree (M={}, N={})",
            g.m(),
            g.n()
        ),
        worst,
        1e-12,
    );
    Ok(())
}

fn check_noise_variance(
    report: &mut ValidationReport,
    g: &SystemGeometry,
    seed: u64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7777);
    let ch = ChannelRealization::draw(&profile_for(g), &mut rng, g, true)?;
    let w = SpectralWindow::rectangular(g, 0)?;
    let eq = EqualizerResponse::mmse(&w, &ch, g, 10.0)?;
    let sigma_w2 = 0.5;
    let expected = noise_power(&eq, g, sigma_w2);
    let draws = 50_000;
    let mut acc = 0.0;
    for _ in 0..draws {
        let samples = awgn(&mut rng, g.n(), &NoiseModel { sigma_w2 });
        let w_eq = equivalent_noise(&samples, &eq, g)?;
        acc += w_eq.iter().map(|v| v.norm_sqr()).sum::<f64>();
    }
    let measured = acc / (draws * g.m()) as f64;
    report.push_bound(
        format!(
            "equivalent-noise variance matches budget (M={}, N={})",
            g.m(),
            g.n()
        ),
        (measured - expected).abs() / expected,
        0.02,
    );
    Ok(())
}

/// Runs the full suite over the given geometries.
pub fn run(geometries: &[(usize, usize, usize)], seed: u64) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    for &(m, n, n_g) in geometries {
        let g = SystemGeometry::new(m, n, n_g)?;
        check_noble_identities(&mut report, &g, seed);
        check_path_equivalence(&mut report, &g, seed)?;
        check_cp_circularization(&mut report, &g, seed)?;
        check_zero_forcing(&mut report, &g, seed)?;
        check_sinr_forms(&mut report, &g, seed)?;
    }
    // One statistical check is enough; run it on the smallest geometry.
    if let Some(&(m, n, n_g)) = geometries.first() {
        let g = SystemGeometry::new(m, n, n_g)?;
        check_noise_variance(&mut report, &g, seed)?;
    }
    Ok(report)
}
