use std::fmt::Write as _;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};

use scfdma::channel::TapProfile;
use scfdma::equalize::EqualizerKind;
use scfdma::geometry::SystemGeometry;
use scfdma::psd::{
    analytical_psd, centered_grid, simulate_stream, welch_estimate, PulseShape, WelchWindow,
};
use scfdma::shaping::{ShapingConfig, SpectralWindow, WindowKind};
use scfdma::sinr::{run_campaign, ChannelSource, SinrConfig, SinrReport};
use scfdma::validate;

use crate::args::{
    ChannelArgs, ChannelKind, Cli, Command, EqualizerArg, GeometryArgs, Preset, PsdArgs,
    ShapingArgs, ShapingKind, SinrArgs, ValidateArgs, WelchWindowArg, WindowArgs,
};

pub fn dispatch(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Psd(args) => {
            let csv = run_psd(args)?;
            emit(args.out.as_deref(), &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sinr(args) => {
            let csv = run_sinr(args)?;
            emit(args.out.as_deref(), &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Window(args) => {
            let csv = run_window(args)?;
            emit(args.out.as_deref(), &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate(args) => run_validate(args),
    }
}

fn emit(path: Option<&std::path::Path>, content: &str) -> Result<()> {
    match path {
        Some(path) => {
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn resolve_geometry(args: &GeometryArgs) -> Result<SystemGeometry> {
    let (mut m, mut n, mut ng) = match args.preset {
        Some(Preset::Lte5) => (Some(10), Some(512), Some(31)),
        Some(Preset::Toy) => (Some(4), Some(8), Some(2)),
        None => (None, None, None),
    };
    m = args.m.or(m);
    n = args.n.or(n);
    ng = args.ng.or(ng);
    let (Some(m), Some(n), Some(ng)) = (m, n, ng) else {
        bail!("geometry underspecified: give --preset or all of --m, --n, --ng");
    };
    Ok(SystemGeometry::new(m, n, ng)?)
}

fn resolve_window(g: &SystemGeometry, args: &ShapingArgs) -> Result<SpectralWindow> {
    let w = match (args.shaping, args.block) {
        (ShapingKind::Rect, block) => SpectralWindow::rectangular(g, block.unwrap_or(0))?,
        // Default placement enforces the full construction contract
        // (band fits and the grid satisfies N >= 2 (1 + alpha) M); an
        // explicit --block is the escape hatch for probing other layouts.
        (ShapingKind::Rrc, None) => SpectralWindow::root_raised_cosine(g, args.rolloff)?,
        (ShapingKind::Rrc, Some(block)) => SpectralWindow::from_config(
            g,
            &ShapingConfig {
                kind: WindowKind::RootRaisedCosine,
                alpha: args.rolloff,
                user_block_index: block,
            },
        )?,
    };
    Ok(w)
}

fn shaping_echo(args: &ShapingArgs) -> String {
    match args.shaping {
        ShapingKind::Rect => format!("shaping=rect block={}", args.block.unwrap_or(0)),
        ShapingKind::Rrc => format!(
            "shaping=rrc rolloff={} block={}",
            args.rolloff,
            args.block.unwrap_or(1)
        ),
    }
}

fn geometry_echo(g: &SystemGeometry) -> String {
    format!(
        "m={} n={} ng={} (l={} l_m={} l_n={} n_t={})",
        g.m(),
        g.n(),
        g.n_g(),
        g.l(),
        g.l_m(),
        g.l_n(),
        g.n_t()
    )
}

fn parse_es_n0_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .with_context(|| format!("bad Es/N0 component `{s}`"))
    };
    match parts.as_slice() {
        [single] => Ok(vec![parse(single)?]),
        [start, step, stop] => {
            let (start, step, stop) = (parse(start)?, parse(step)?, parse(stop)?);
            if step <= 0.0 || stop < start {
                bail!("Es/N0 grid must satisfy start <= stop with positive step");
            }
            let mut grid = Vec::new();
            let mut i = 0usize;
            loop {
                let v = start + step * i as f64;
                if v > stop + 1e-9 {
                    break;
                }
                grid.push(v);
                i += 1;
            }
            Ok(grid)
        }
        _ => bail!("Es/N0 grid must be `value` or `start:step:stop`"),
    }
}

fn resolve_channel(args: &ChannelArgs) -> Result<(ChannelSource, String)> {
    let normalize = !args.no_normalize;
    if let Some(path) = &args.profile {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let profile = TapProfile::parse(&text, args.sample_ns)?;
        let echo = format!(
            "channel=profile:{} sample_ns={} normalize={normalize}",
            path.display(),
            args.sample_ns
        );
        return Ok((ChannelSource::Profile { profile, normalize }, echo));
    }
    Ok(match args.channel {
        ChannelKind::PedestrianA => (
            ChannelSource::Profile {
                profile: TapProfile::pedestrian_a(),
                normalize,
            },
            format!("channel=pedestrian-a normalize={normalize}"),
        ),
        ChannelKind::Flat => (ChannelSource::FlatUnit, "channel=flat".to_string()),
    })
}

pub fn run_psd(args: &PsdArgs) -> Result<String> {
    let g = resolve_geometry(&args.geometry)?;
    let w = resolve_window(&g, &args.shaping)?;
    if args.frames < 8 {
        bail!("--frames must be at least 8");
    }
    if !args.sigma_x2.is_finite() || args.sigma_x2 <= 0.0 {
        bail!("--sigma-x2 must be positive");
    }
    let segment_len = args.segment_len.unwrap_or(4 * g.n_t());
    let welch_window = match args.welch_window {
        WelchWindowArg::Rect => WelchWindow::Rectangular,
        WelchWindowArg::Hann => WelchWindow::Hann,
    };

    let stream = simulate_stream(&w, &g, args.frames, args.sigma_x2, args.seed)?;
    let estimated = welch_estimate(&stream, segment_len, args.overlap, welch_window)?;
    let pulse = PulseShape::rectangular(&g);
    let grid = centered_grid(segment_len);
    let analytical = analytical_psd(&w, &g, &pulse, &grid, args.sigma_x2);

    let mut out = String::new();
    let _ = writeln!(out, "# scfdma psd v1");
    let _ = writeln!(out, "# geometry: {}", geometry_echo(&g));
    let _ = writeln!(
        out,
        "# config: {} frames={} segment_len={segment_len} overlap={} welch_window={:?} sigma_x2={} seed={}",
        shaping_echo(&args.shaping),
        args.frames,
        args.overlap,
        args.welch_window,
        args.sigma_x2,
        args.seed
    );
    let _ = writeln!(out, "# freq in cycles per transmit sample; densities in dB");
    let _ = writeln!(out, "freq_normalized,psd_db_analytical,psd_db_estimated");
    let ana_db = analytical.db_values();
    let est_db = estimated.db_values();
    for ((f, a), e) in grid.iter().zip(&ana_db).zip(&est_db) {
        let _ = writeln!(out, "{f:.8},{a:.6},{e:.6}");
    }
    Ok(out)
}

pub fn run_sinr(args: &SinrArgs) -> Result<String> {
    let g = resolve_geometry(&args.geometry)?;
    let w = resolve_window(&g, &args.shaping)?;
    let grid = parse_es_n0_grid(&args.esn0)?;
    let (channel, channel_echo) = resolve_channel(&args.channel)?;
    if args.realizations == 0 || args.frames == 0 {
        bail!("--realizations and --frames must be positive");
    }
    if !args.sigma_x2.is_finite() || args.sigma_x2 <= 0.0 {
        bail!("--sigma-x2 must be positive");
    }

    let kinds: Vec<(EqualizerKind, &str)> = match args.equalizer {
        EqualizerArg::Zf => vec![(EqualizerKind::Zf, "zf")],
        EqualizerArg::Mmse => vec![(EqualizerKind::Mmse, "mmse")],
        EqualizerArg::Both => vec![(EqualizerKind::Zf, "zf"), (EqualizerKind::Mmse, "mmse")],
    };

    let mut out = String::new();
    let _ = writeln!(out, "# scfdma sinr v1");
    let _ = writeln!(out, "# geometry: {}", geometry_echo(&g));
    let _ = writeln!(
        out,
        "# config: {} {channel_echo} esn0={} realizations={} frames={} sigma_x2={} seed={}",
        shaping_echo(&args.shaping),
        args.esn0,
        args.realizations,
        args.frames,
        args.sigma_x2,
        args.seed
    );
    let _ = writeln!(
        out,
        "# db columns average per-realization SINR in dB; *_linavg_db are linear-domain means"
    );
    let _ = writeln!(
        out,
        "esn0_db,sinr_analytical_db,sinr_empirical_db,ci_halfwidth_db,useful,interference,noise,dropped_realizations,sinr_analytical_linavg_db,sinr_empirical_linavg_db,equalizer"
    );
    for (kind, name) in kinds {
        let cfg = SinrConfig {
            equalizer: kind,
            channel: channel.clone(),
            sigma_x2: args.sigma_x2,
            es_n0_db: grid.clone(),
            realizations: args.realizations,
            frames_per_realization: args.frames,
            seed: args.seed,
        };
        let report = run_campaign(&w, &g, &cfg)?;
        write_sinr_rows(&mut out, &report, name);
    }
    Ok(out)
}

fn write_sinr_rows(out: &mut String, report: &SinrReport, equalizer: &str) {
    for p in &report.points {
        let _ = writeln!(
            out,
            "{:.2},{:.6},{:.6},{:.6},{:.6e},{:.6e},{:.6e},{},{:.6},{:.6},{equalizer}",
            p.es_n0_db,
            p.analytical_db_mean,
            p.empirical_db_mean,
            p.ci_halfwidth_db,
            p.useful,
            p.interference,
            p.noise,
            report.dropped_realizations,
            10.0 * p.analytical_linear_mean.log10(),
            10.0 * p.empirical_linear_mean.log10(),
        );
    }
}

pub fn run_window(args: &WindowArgs) -> Result<String> {
    let g = resolve_geometry(&args.geometry)?;
    let w = resolve_window(&g, &args.shaping)?;
    let mut out = String::new();
    let _ = writeln!(out, "# scfdma window v1");
    let _ = writeln!(out, "# geometry: {}", geometry_echo(&g));
    let _ = writeln!(out, "# config: {}", shaping_echo(&args.shaping));
    let _ = writeln!(out, "bin,magnitude");
    for (k, v) in w.freq().iter().enumerate() {
        let _ = writeln!(out, "{k},{:.9}", v.norm());
    }
    Ok(out)
}

/// Renders the consistency-suite report; the boolean is true when every
/// check passed.
pub fn validate_text(args: &ValidateArgs) -> Result<(String, bool)> {
    let geometries: Vec<(usize, usize, usize)> = match (&args.geometry.preset, args.geometry.m) {
        (None, None) if args.geometry.n.is_none() && args.geometry.ng.is_none() => {
            validate::DEFAULT_GEOMETRIES.to_vec()
        }
        _ => {
            let g = resolve_geometry(&args.geometry)?;
            vec![(g.m(), g.n(), g.n_g())]
        }
    };
    let report = validate::run(&geometries, args.seed)?;
    let mut out = String::new();
    for check in &report.checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status} {} [{}]", check.name, check.detail);
    }
    if report.all_passed() {
        let _ = writeln!(out, "all {} checks passed", report.checks.len());
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(out, "{failed} of {} checks failed", report.checks.len());
    }
    Ok((out, report.all_passed()))
}

pub fn run_validate(args: &ValidateArgs) -> Result<ExitCode> {
    let (text, all_passed) = validate_text(args)?;
    print!("{text}");
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
