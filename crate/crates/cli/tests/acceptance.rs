//! Acceptance: reproducibility of the emitted CSV, plus spot checks of the
//! subcommand outputs themselves.

use scfdma_cli::args::{
    ChannelArgs, ChannelKind, EqualizerArg, GeometryArgs, Preset, PsdArgs, ShapingArgs,
    ShapingKind, SinrArgs, ValidateArgs, WelchWindowArg, WindowArgs,
};
use scfdma_cli::run;

fn lte5_geometry() -> GeometryArgs {
    GeometryArgs {
        preset: Some(Preset::Lte5),
        m: None,
        n: None,
        ng: None,
    }
}

fn rect_shaping() -> ShapingArgs {
    ShapingArgs {
        shaping: ShapingKind::Rect,
        rolloff: 0.35,
        block: None,
    }
}

fn rrc_shaping() -> ShapingArgs {
    ShapingArgs {
        shaping: ShapingKind::Rrc,
        rolloff: 0.35,
        block: None,
    }
}

fn pedestrian_channel() -> ChannelArgs {
    ChannelArgs {
        channel: ChannelKind::PedestrianA,
        profile: None,
        sample_ns: 130.2,
        no_normalize: false,
    }
}

fn sinr_args() -> SinrArgs {
    SinrArgs {
        geometry: lte5_geometry(),
        shaping: rrc_shaping(),
        channel: pedestrian_channel(),
        equalizer: EqualizerArg::Both,
        esn0: "0:10:20".to_string(),
        realizations: 40,
        frames: 4,
        sigma_x2: 1.0,
        seed: 7,
        out: None,
    }
}

fn psd_args() -> PsdArgs {
    PsdArgs {
        geometry: lte5_geometry(),
        shaping: rect_shaping(),
        frames: 200,
        segment_len: None,
        overlap: 0.5,
        welch_window: WelchWindowArg::Rect,
        sigma_x2: 1.0,
        seed: 7,
        out: None,
    }
}

#[test]
fn criterion_10_byte_identical_output_across_runs_and_worker_counts() {
    let run_sinr_with = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| run::run_sinr(&sinr_args()).unwrap())
    };
    let single = run_sinr_with(1);
    let single_again = run_sinr_with(1);
    let pooled = run_sinr_with(4);
    assert_eq!(single, single_again, "repeat run differs");
    assert_eq!(single, pooled, "worker count changes output");

    let psd_a = run::run_psd(&psd_args()).unwrap();
    let psd_b = run::run_psd(&psd_args()).unwrap();
    assert_eq!(psd_a, psd_b);
    println!(
        "PASS criterion 10: byte-identical CSV across runs and worker counts ({} sinr bytes, {} psd bytes)",
        single.len(),
        psd_a.len()
    );
}

#[test]
fn flat_channel_analytical_column_equals_es_n0() {
    let mut args = sinr_args();
    args.shaping = rect_shaping();
    args.channel.channel = ChannelKind::Flat;
    args.equalizer = EqualizerArg::Zf;
    args.esn0 = "0:5:30".to_string();
    args.realizations = 3;
    args.frames = 2;
    let csv = run::run_sinr(&args).unwrap();
    let mut rows = 0;
    for line in csv.lines() {
        if line.starts_with('#') || line.starts_with("esn0_db") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let esn0: f64 = fields[0].parse().unwrap();
        assert_eq!(
            fields[1],
            format!("{:.6}", esn0),
            "analytical column diverges from Es/N0 at {esn0} dB"
        );
        rows += 1;
    }
    assert_eq!(rows, 7);
}

#[test]
fn psd_csv_shape() {
    let csv = run::run_psd(&psd_args()).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "# scfdma psd v1");
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "freq_normalized,psd_db_analytical,psd_db_estimated");
    let rows = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("freq_"))
        .count();
    assert_eq!(rows, 4 * 543); // default segment length is 4 N_t
}

#[test]
fn window_csv_lists_every_bin() {
    let args = WindowArgs {
        geometry: lte5_geometry(),
        shaping: rrc_shaping(),
        out: None,
    };
    let csv = run::run_window(&args).unwrap();
    let rows: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("bin,"))
        .collect();
    assert_eq!(rows.len(), 2560);
    for (k, row) in rows.iter().enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], k.to_string());
        let mag: f64 = fields[1].parse().unwrap();
        if (9..=20).contains(&k) {
            assert!(mag > 0.0, "bin {k} should be occupied");
        } else {
            assert_eq!(mag, 0.0, "bin {k} should be empty");
        }
    }
}

#[test]
fn validate_subcommand_passes_on_toy_geometry() {
    let args = ValidateArgs {
        geometry: GeometryArgs {
            preset: Some(Preset::Toy),
            m: None,
            n: None,
            ng: None,
        },
        seed: 11,
    };
    let (text, all_passed) = run::validate_text(&args).unwrap();
    assert!(all_passed, "{text}");
    assert!(text.contains("all "));
    assert!(!text.contains("FAIL"));
}

#[test]
fn invalid_configs_are_rejected_with_diagnostics() {
    // Geometry underspecified.
    let mut args = sinr_args();
    args.geometry = GeometryArgs {
        preset: None,
        m: Some(10),
        n: None,
        ng: None,
    };
    let err = run::run_sinr(&args).unwrap_err().to_string();
    assert!(err.contains("geometry"), "{err}");

    // Roll-off violating the carrier budget on the toy grid.
    let mut args = sinr_args();
    args.geometry = GeometryArgs {
        preset: Some(Preset::Toy),
        m: None,
        n: None,
        ng: None,
    };
    args.shaping = rrc_shaping();
    assert!(run::run_sinr(&args).is_err());

    // Malformed Es/N0 grid.
    let mut args = sinr_args();
    args.esn0 = "10:0:20".to_string();
    assert!(run::run_sinr(&args).is_err());
}
