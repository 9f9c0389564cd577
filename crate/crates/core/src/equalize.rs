//! Joint demapper/equalizer responses and the overall system response.
//!
//! The equalizer is a length-`L` frequency response `G`, nonzero only on
//! the transmit window's support (demapping folded in). The overall system
//! response is `P_k = H_k C~_k G_k`, with time filter `p = IFFT_L(P)` and
//! its decimation `p~(n) = p(n L_M)` of length `M`, which is all the
//! interference analysis needs.

use num_complex::Complex64;

use crate::channel::ChannelRealization;
use crate::dft::{inverse_dft, stack};
use crate::error::{Error, Result};
use crate::geometry::SystemGeometry;
use crate::shaping::SpectralWindow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualizerKind {
    Zf,
    Mmse,
    Custom,
}

/// Length-`L` equalizer response with its time filter.
#[derive(Debug, Clone)]
pub struct EqualizerResponse {
    freq: Vec<Complex64>,
    time: Vec<Complex64>,
    kind: EqualizerKind,
}

impl EqualizerResponse {
    /// Wraps an arbitrary length-`L` response.
    pub fn from_freq(freq: Vec<Complex64>, kind: EqualizerKind) -> Self {
        let time = inverse_dft(&freq);
        Self { freq, time, kind }
    }

    /// Zero-forcing equalizer for window `w` and channel `ch`:
    ///
    /// ```text
    /// G_k = conj(H_k C~_k) / sum_s |H_{sM+<k>_M} C~_{sM+<k>_M}|^2
    /// ```
    ///
    /// on the window support, zero elsewhere. The alias-class sums make the
    /// overall response satisfy `sum_s P_{sM+r} = 1` for every `r`. Errors
    /// when the channel nulls every alias of some occupied bin (a class
    /// power at the floating-point noise floor relative to the strongest
    /// class counts as a null); no flooring is applied, so the noise
    /// enhancement of a merely weak class is reported faithfully.
    pub fn zero_forcing(
        w: &SpectralWindow,
        ch: &ChannelRealization,
        g: &SystemGeometry,
    ) -> Result<Self> {
        let d = alias_class_power(w, ch, g);
        let floor = 1e-14 * d.iter().copied().fold(0.0, f64::max);
        let mut freq = vec![Complex64::ZERO; g.l()];
        for &k in w.support() {
            let num = (w.freq()[k] * ch.ext()[k]).conj();
            let den = d[k % g.m()];
            if den <= floor {
                return Err(Error::SingularSubchannel { bin: k % g.m() });
            }
            freq[k] = num / den;
        }
        Ok(Self::from_freq(freq, EqualizerKind::Zf))
    }

    /// MMSE equalizer at symbol-energy-to-noise ratio `es_n0` (linear):
    ///
    /// ```text
    /// G_k = conj(H_k C~_k) / (sum_s |H C~|^2  +  (1/M)(1/es_n0) sum_k |H_k C~_k|^2)
    /// ```
    ///
    /// The regularizer keeps the denominator positive whenever the channel
    /// is not identically zero on the support.
    pub fn mmse(
        w: &SpectralWindow,
        ch: &ChannelRealization,
        g: &SystemGeometry,
        es_n0: f64,
    ) -> Result<Self> {
        assert!(es_n0 > 0.0, "es_n0 must be positive");
        let d = alias_class_power(w, ch, g);
        let total: f64 = d.iter().sum();
        if total == 0.0 {
            return Err(Error::ZeroOverlap);
        }
        let kappa = total / (g.m() as f64 * es_n0);
        let mut freq = vec![Complex64::ZERO; g.l()];
        for &k in w.support() {
            let num = (w.freq()[k] * ch.ext()[k]).conj();
            freq[k] = num / (d[k % g.m()] + kappa);
        }
        Ok(Self::from_freq(freq, EqualizerKind::Mmse))
    }

    /// Frequency response `G`, length `L`.
    pub fn freq(&self) -> &[Complex64] {
        &self.freq
    }

    /// Time filter `g = IFFT_L(G)`, length `L`.
    pub fn time(&self) -> &[Complex64] {
        &self.time
    }

    pub fn kind(&self) -> EqualizerKind {
        self.kind
    }
}

/// Per-alias-class power `d[r] = sum_s |H_{sM+r} C~_{sM+r}|^2`.
fn alias_class_power(w: &SpectralWindow, ch: &ChannelRealization, g: &SystemGeometry) -> Vec<f64> {
    let mut d = vec![0.0; g.m()];
    for &k in w.support() {
        d[k % g.m()] += (w.freq()[k] * ch.ext()[k]).norm_sqr();
    }
    d
}

/// Overall system response `P = H o C~ o G` with its time filter and the
/// length-`M` decimation `p~(n) = p(n L_M)`.
#[derive(Debug, Clone)]
pub struct OverallResponse {
    freq: Vec<Complex64>,
    time: Vec<Complex64>,
    decimated: Vec<Complex64>,
}

impl OverallResponse {
    pub fn new(
        w: &SpectralWindow,
        ch: &ChannelRealization,
        eq: &EqualizerResponse,
        g: &SystemGeometry,
    ) -> Self {
        let freq: Vec<Complex64> = (0..g.l())
            .map(|k| w.freq()[k] * ch.ext()[k] * eq.freq()[k])
            .collect();
        let time = inverse_dft(&freq);
        // Down-sampling identity: decimating p by L_M equals the M-point
        // inverse transform of the spectrum stacked onto M bins.
        let decimated = inverse_dft(&stack(&freq, g.m()).expect("M divides L"));
        Self {
            freq,
            time,
            decimated,
        }
    }

    /// Frequency response `P`, length `L`.
    pub fn freq(&self) -> &[Complex64] {
        &self.freq
    }

    /// Time filter `p`, length `L`.
    pub fn time(&self) -> &[Complex64] {
        &self.time
    }

    /// `p~(n) = p(n L_M)`, length `M`.
    pub fn decimated(&self) -> &[Complex64] {
        &self.decimated
    }

    /// `sum_k P_k` over the full length.
    pub fn total_sum(&self) -> Complex64 {
        self.freq.iter().sum()
    }

    /// Alias-class sums `sum_s P_{sM+r}` for `r` in `[0, M)`.
    pub fn stacked_sums(&self, g: &SystemGeometry) -> Vec<Complex64> {
        let mut sums = vec![Complex64::ZERO; g.m()];
        for (k, v) in self.freq.iter().enumerate() {
            sums[k % g.m()] += v;
        }
        sums
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::TapProfile;
    use crate::dft::circular_convolve_direct;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lte5_geo() -> SystemGeometry {
        SystemGeometry::new(10, 512, 31).unwrap()
    }

    #[test]
    fn zf_flat_unit_channel_is_identity_on_support() {
        let g = lte5_geo();
        let w = SpectralWindow::rectangular(&g, 0).unwrap();
        let ch = ChannelRealization::flat_unit(&g);
        let eq = EqualizerResponse::zero_forcing(&w, &ch, &g).unwrap();
        for &k in w.support() {
            assert!((eq.freq()[k] - Complex64::ONE).norm() < 1e-13);
        }
        for (k, v) in eq.freq().iter().enumerate() {
            if !w.support().contains(&k) {
                assert_eq!(v.norm_sqr(), 0.0);
            }
        }
    }

    #[test]
    fn zf_rectangular_gives_unit_overall_response() {
        let g = lte5_geo();
        let w = SpectralWindow::rectangular(&g, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let ch = ChannelRealization::draw(&TapProfile::pedestrian_a(), &mut rng, &g, true).unwrap();
        let eq = EqualizerResponse::zero_forcing(&w, &ch, &g).unwrap();
        let p = OverallResponse::new(&w, &ch, &eq, &g);
        for &k in w.support() {
            assert!((p.freq()[k] - Complex64::ONE).norm() < 1e-10, "bin {k}");
        }
    }

    #[test]
    fn zf_defining_property_for_rrc() {
        let g = lte5_geo();
        let w = SpectralWindow::root_raised_cosine(&g, 0.35).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..50 {
            let ch =
                ChannelRealization::draw(&TapProfile::pedestrian_a(), &mut rng, &g, true).unwrap();
            let eq = EqualizerResponse::zero_forcing(&w, &ch, &g).unwrap();
            let p = OverallResponse::new(&w, &ch, &eq, &g);
            for (r, s) in p.stacked_sums(&g).iter().enumerate() {
                assert!((s - Complex64::ONE).norm() < 1e-10, "class {r}");
            }
        }
    }

    #[test]
    fn zf_reports_singular_class() {
        let g = SystemGeometry::new(4, 8, 2).unwrap();
        let w = SpectralWindow::rectangular(&g, 0).unwrap();
        // Channel with an exact null on subcarrier 2: taps 1, +1 at delays
        // 0 and 2 give C_k = 1 + e^{-j pi k} ... C_2 = 1 + e^{-j pi} = 0.
        let ch = ChannelRealization::from_taps(vec![(0, Complex64::ONE), (2, Complex64::ONE)], &g)
            .unwrap();
        let err = EqualizerResponse::zero_forcing(&w, &ch, &g).unwrap_err();
        match err {
            Error::SingularSubchannel { bin } => assert_eq!(bin, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn mmse_approaches_zf_at_high_snr() {
        let g = lte5_geo();
        let w = SpectralWindow::root_raised_cosine(&g, 0.35).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = ChannelRealization::draw(&TapProfile::pedestrian_a(), &mut rng, &g, true).unwrap();
        let zf = EqualizerResponse::zero_forcing(&w, &ch, &g).unwrap();
        let mmse = EqualizerResponse::mmse(&w, &ch, &g, 1e12).unwrap();
        let max_diff = zf
            .freq()
            .iter()
            .zip(mmse.freq())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let scale = zf.freq().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(max_diff < 1e-9 * scale);
    }

    #[test]
    fn mmse_flat_channel_closed_form() {
        let g = lte5_geo();
        let w = SpectralWindow::rectangular(&g, 0).unwrap();
        let ch = ChannelRealization::flat_unit(&g);
        let es_n0 = 4.0;
        let eq = EqualizerResponse::mmse(&w, &ch, &g, es_n0).unwrap();
        let expected = 1.0 / (1.0 + 1.0 / es_n0);
        for &k in w.support() {
            assert!((eq.freq()[k].re - expected).abs() < 1e-12);
            assert!(eq.freq()[k].im.abs() < 1e-15);
        }
    }

    #[test]
    fn mmse_variance_form_matches_budget_form() {
        // Building the regularizer from the per-sample variances
        // (N sigma_w^2 / (M sigma_x^2)) must reproduce the Es/N0-form
        // equalizer when the variance realizes that same budget.
        let g = lte5_geo();
        let w = SpectralWindow::root_raised_cosine(&g, 0.35).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let ch = ChannelRealization::draw(&TapProfile::pedestrian_a(), &mut rng, &g, true).unwrap();
        let es_n0 = 31.6;
        let sigma_x2 = 1.7;
        let sigma_w2 =
            crate::sinr::es_n0_to_sigma_w2(es_n0, sigma_x2, &w, &ch, &g).unwrap();
        let eq = EqualizerResponse::mmse(&w, &ch, &g, es_n0).unwrap();

        let kappa = g.n() as f64 * sigma_w2 / (g.m() as f64 * sigma_x2);
        let mut d = vec![0.0; g.m()];
        for &k in w.support() {
            d[k % g.m()] += (w.freq()[k] * ch.ext()[k]).norm_sqr();
        }
        for &k in w.support() {
            let expected = (w.freq()[k] * ch.ext()[k]).conj() / (d[k % g.m()] + kappa);
            assert!((eq.freq()[k] - expected).norm() < 1e-12 * expected.norm());
        }
    }

    #[test]
    fn zf_rectangular_decimated_response_is_scaled_impulse() {
        let g = lte5_geo();
        let w = SpectralWindow::rectangular(&g, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ch = ChannelRealization::draw(&TapProfile::pedestrian_a(), &mut rng, &g, true).unwrap();
        let eq = EqualizerResponse::zero_forcing(&w, &ch, &g).unwrap();
        let p = OverallResponse::new(&w, &ch, &eq, &g);
        let inv_lm = 1.0 / g.l_m() as f64;
        assert!((p.decimated()[0] - Complex64::new(inv_lm, 0.0)).norm() < 1e-12);
        for v in &p.decimated()[1..] {
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn decimated_matches_direct_decimation_of_time_filter() {
        let g = lte5_geo();
        let w = SpectralWindow::root_raised_cosine(&g, 0.35).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let ch = ChannelRealization::draw(&TapProfile::pedestrian_a(), &mut rng, &g, true).unwrap();
        let eq = EqualizerResponse::mmse(&w, &ch, &g, 10.0).unwrap();
        let p = OverallResponse::new(&w, &ch, &eq, &g);
        for (n, v) in p.decimated().iter().enumerate() {
            assert!((v - p.time()[n * g.l_m()]).norm() < 1e-10, "tap {n}");
        }
    }

    #[test]
    fn zero_equalizer_zero_response() {
        let g = SystemGeometry::new(4, 8, 2).unwrap();
        let w = SpectralWindow::rectangular(&g, 0).unwrap();
        let ch = ChannelRealization::flat_unit(&g);
        let eq = EqualizerResponse::from_freq(vec![Complex64::ZERO; g.l()], EqualizerKind::Custom);
        let p = OverallResponse::new(&w, &ch, &eq, &g);
        assert!(p.freq().iter().all(|v| v.norm_sqr() == 0.0));
        assert!(p.decimated().iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn time_filter_is_convolution_of_the_three_filters() {
        // p = h (*) c~ (*) g, checked against the direct modular sum on a
        // small geometry.
        let g = SystemGeometry::new(6, 8, 3).unwrap();
        let w = SpectralWindow::rectangular(&g, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let ch = ChannelRealization::draw(
            &TapProfile::parse("0,0\n1,-3\n2,-6\n", 1.0).unwrap(),
            &mut rng,
            &g,
            true,
        )
        .unwrap();
        let eq = EqualizerResponse::mmse(&w, &ch, &g, 10.0).unwrap();
        let p = OverallResponse::new(&w, &ch, &eq, &g);
        let hc = circular_convolve_direct(w.time(), ch.time()).unwrap();
        let hcg = circular_convolve_direct(&hc, eq.time()).unwrap();
        for (a, b) in p.time().iter().zip(&hcg) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn off_support_response_is_exactly_zero() {
        let g = lte5_geo();
        let w = SpectralWindow::root_raised_cosine(&g, 0.35).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let ch = ChannelRealization::draw(&TapProfile::pedestrian_a(), &mut rng, &g, true).unwrap();
        let eq = EqualizerResponse::zero_forcing(&w, &ch, &g).unwrap();
        let p = OverallResponse::new(&w, &ch, &eq, &g);
        let support: std::collections::HashSet<_> = w.support().iter().copied().collect();
        for k in 0..g.l() {
            if !support.contains(&k) {
                assert_eq!(eq.freq()[k].norm_sqr(), 0.0);
                assert_eq!(p.freq()[k].norm_sqr(), 0.0);
            }
        }
    }
}
