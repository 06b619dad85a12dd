//! `headshadow` command-line tool.
//!
//! Exit codes: 0 success, 1 runtime or data error, 2 config or validation
//! error (including bad command-line usage).

mod pipeline;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use headshadow::analysis::BimodalStage;
use headshadow::bimodal::Vocoder;
use headshadow::experiments::{condition_scenes, run_srt_experiment, SrtConfig};
use headshadow::io::report::{write_csv, write_json, ExperimentRow, ReportMeta};
use headshadow::io::wav;
use headshadow::presets::{
    band_snr_rows, band_snr_table, localization_rows, DirectivityRecipe, HrtfSource, IldRecipe,
    LocalizationRecipe, Preset,
};
use headshadow::spatial::{load_hrtf_set, render_scene};
use headshadow::{
    simulate_bimodal, BeamformerParams, CiSide, Condition, Error, HeadShadowEnhancer, HrtfSet,
    Result, VocoderParams,
};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::pipeline::PipelineConfig;

#[derive(Parser, Debug)]
#[command(
    name = "headshadow",
    version,
    about = "Head shadow enhancement and bimodal listening simulation"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// JSON config for the command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for reports and default file names.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Omit the timestamp from JSON reports.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Named recipe: a condition (S0NCI, S0NHA, S0N360) for render, a figure
    /// (fig1b, fig2a, fig2bc, fig3a, fig3b) for the experiment commands.
    #[arg(long, global = true)]
    preset: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render a scene or pipeline to a stereo WAV.
    Render {
        #[command(flatten)]
        hrtf: HrtfArgs,
        #[arg(long, value_enum, default_value = "left")]
        ci_side: Side,
        /// Signal length for presets.
        #[arg(long, default_value_t = 2.0)]
        seconds: f64,
    },
    /// Head shadow enhancement of a stereo WAV.
    Enhance {
        #[command(flatten)]
        io: FileArgs,
        /// Pass the input through unchanged.
        #[arg(long)]
        disable: bool,
    },
    /// Noise-band vocoder on a mono WAV.
    Vocode {
        #[command(flatten)]
        io: FileArgs,
        #[arg(long)]
        channels: Option<usize>,
    },
    /// Vocode the CI ear and low-pass the hearing-aid ear of a stereo WAV.
    Bimodal {
        #[command(flatten)]
        io: FileArgs,
        #[arg(long, value_enum)]
        ci_side: Option<Side>,
        #[arg(long)]
        channels: Option<usize>,
    },
    /// Low/high band directivity patterns.
    Directivity {
        #[command(flatten)]
        hrtf: HrtfArgs,
    },
    /// Natural and enhanced ILD against azimuth.
    IldCurve {
        #[command(flatten)]
        hrtf: HrtfArgs,
    },
    /// Third-octave band SNRs per condition.
    Snr {
        #[command(flatten)]
        hrtf: HrtfArgs,
    },
    /// Ideal-observer localization experiment.
    Localize {
        #[command(flatten)]
        hrtf: HrtfArgs,
    },
    /// Simulated-listener SRT experiment.
    Srt {
        #[command(flatten)]
        hrtf: HrtfArgs,
    },
}

#[derive(Args, Debug)]
struct FileArgs {
    /// Input WAV.
    input: PathBuf,
    /// Output WAV (default: a file in --out).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HrtfArgs {
    /// HRTF directory; the synthetic spherical-head set otherwise.
    #[arg(long)]
    hrtf: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Side {
    Left,
    Right,
}

impl From<Side> for CiSide {
    fn from(s: Side) -> Self {
        match s {
            Side::Left => CiSide::Left,
            Side::Right => CiSide::Right,
        }
    }
}

fn read_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn check_preset(g: &Global, command: &str) -> Result<()> {
    if let Some(name) = &g.preset {
        let p: Preset = name.parse()?;
        if p.command() != command {
            return Err(Error::Config(format!(
                "preset {} belongs to `{}`, not `{command}`",
                p.name(),
                p.command()
            )));
        }
    }
    Ok(())
}

fn apply_hrtf(source: &mut HrtfSource, args: &HrtfArgs) {
    if let Some(dir) = &args.hrtf {
        source.dir = Some(dir.clone());
    }
}

fn report<T: Serialize>(g: &Global, name: &str, command: &str, seed: u64, body: &T) -> Result<()> {
    write_json(
        &g.out.join(name),
        &ReportMeta::new(command, seed, !g.no_timestamp),
        body,
    )
}

fn output_path(g: &Global, io: &FileArgs, default: &str) -> PathBuf {
    io.output.clone().unwrap_or_else(|| g.out.join(default))
}

fn load_hrtfs(args: &HrtfArgs) -> Result<HrtfSet> {
    match &args.hrtf {
        Some(dir) => load_hrtf_set(dir),
        None => HrtfSet::synthetic(headshadow::buffer::DEFAULT_SAMPLE_RATE),
    }
}

fn render(g: &Global, hrtf: &HrtfArgs, ci_side: Side, seconds: f64) -> Result<()> {
    if let Some(name) = &g.preset {
        if g.config.is_some() {
            return Err(Error::Config(
                "use either --preset or --config for render".into(),
            ));
        }
        let condition: Condition = name.parse()?;
        if !(seconds > 0.0 && seconds.is_finite()) {
            return Err(Error::Config("--seconds must be positive".into()));
        }
        let hrtfs = load_hrtfs(hrtf)?;
        let fs = hrtfs.sample_rate();
        let len = (seconds * fs as f64).round() as usize;
        let seed = g.seed.unwrap_or(1);
        let (speech, noise) = condition_scenes(condition, ci_side.into(), fs, len, seed)?;
        wav::write_stereo(&g.out.join("speech.wav"), &render_scene(&speech, &hrtfs)?)?;
        wav::write_stereo(&g.out.join("noise.wav"), &render_scene(&noise, &hrtfs)?)?;
        return Ok(());
    }
    let path = g
        .config
        .as_deref()
        .ok_or_else(|| Error::Config("render needs --config or --preset".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg: PipelineConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    cfg.rebase(path.parent().unwrap_or(Path::new(".")));
    if let Some(dir) = &hrtf.hrtf {
        cfg.hrtf = Some(dir.clone());
    }
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    let y = cfg.run()?;
    let out = if cfg.output.is_absolute() {
        cfg.output.clone()
    } else {
        g.out.join(&cfg.output)
    };
    wav::write_stereo(&out, &y)
}

fn enhance(g: &Global, io: &FileArgs, disable: bool) -> Result<()> {
    let mut p: BeamformerParams = read_config(g.config.as_deref())?;
    if disable {
        p.enabled = false;
    }
    let x = wav::read_stereo(&io.input)?;
    let y = HeadShadowEnhancer::new(p, x.sample_rate())?.process(&x)?;
    wav::write_stereo(&output_path(g, io, "enhanced.wav"), &y)
}

fn vocoder_params(g: &Global, base: VocoderParams, channels: Option<usize>) -> VocoderParams {
    let mut p = base;
    if let Some(n) = channels {
        p.n_channels = n;
    }
    if let Some(seed) = g.seed {
        p.seed = seed;
    }
    p
}

fn vocode(g: &Global, io: &FileArgs, channels: Option<usize>) -> Result<()> {
    let p = vocoder_params(g, read_config(g.config.as_deref())?, channels);
    let x = wav::read_mono(&io.input)?;
    let y = Vocoder::new(p, x.sample_rate())?.process(&x)?;
    wav::write_mono(&output_path(g, io, "vocoded.wav"), &y)
}

fn bimodal(
    g: &Global,
    io: &FileArgs,
    ci_side: Option<Side>,
    channels: Option<usize>,
) -> Result<()> {
    let mut stage: BimodalStage = match g.config.as_deref() {
        Some(path) => read_config::<Option<BimodalStage>>(Some(path))?
            .ok_or_else(|| Error::Config("empty bimodal config".into()))?,
        None => BimodalStage::new(CiSide::Left, VocoderParams::localization()),
    };
    if let Some(side) = ci_side {
        stage.ci_side = side.into();
    }
    stage.vocoder = vocoder_params(g, stage.vocoder, channels);
    let x = wav::read_stereo(&io.input)?;
    let y = simulate_bimodal(&x, stage.ci_side, &stage.vocoder, &stage.hearing_loss)?;
    wav::write_stereo(&output_path(g, io, "bimodal.wav"), &y.signal)
}

fn directivity(g: &Global, hrtf: &HrtfArgs) -> Result<()> {
    check_preset(g, "directivity")?;
    let mut r: DirectivityRecipe = read_config(g.config.as_deref())?;
    apply_hrtf(&mut r.hrtf, hrtf);
    if hrtf.hrtf.is_some() {
        r.free_field = false;
    }
    if let Some(seed) = g.seed {
        r.seed = seed;
    }
    let rows = r.run()?;
    write_csv(&g.out.join("directivity.csv"), &rows)?;
    report(
        g,
        "directivity.json",
        "directivity",
        r.seed,
        &serde_json::json!({ "recipe": r }),
    )
}

fn ild(g: &Global, hrtf: &HrtfArgs) -> Result<()> {
    check_preset(g, "ild-curve")?;
    let mut r: IldRecipe = read_config(g.config.as_deref())?;
    apply_hrtf(&mut r.hrtf, hrtf);
    if let Some(seed) = g.seed {
        r.stimulus_seed = seed;
        if let Some(b) = &mut r.bimodal {
            b.vocoder.seed = seed;
        }
    }
    let pair = r.run()?;
    write_csv(&g.out.join("ild_curve.csv"), &pair.rows())?;
    let body = serde_json::json!({
        "recipe": r,
        "natural_range_db": pair.natural.range(),
        "enhanced_range_db": pair.enhanced.range(),
        "natural_monotonic": pair.natural.is_strictly_increasing(),
        "enhanced_monotonic": pair.enhanced.is_strictly_increasing(),
    });
    report(g, "ild_curve.json", "ild-curve", r.stimulus_seed, &body)
}

fn srt_config(g: &Global) -> Result<SrtConfig> {
    let mut cfg: SrtConfig = read_config(g.config.as_deref())?;
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn snr(g: &Global, hrtf: &HrtfArgs) -> Result<()> {
    check_preset(g, "snr")?;
    let cfg = srt_config(g)?;
    let table = band_snr_table(&cfg, &load_hrtfs(hrtf)?)?;
    write_csv(&g.out.join("band_snr.csv"), &band_snr_rows(&table))?;
    let effective: Vec<_> = table
        .iter()
        .map(|s| {
            serde_json::json!({
                "condition": s.condition,
                "processing": s.processing,
                "effective": s.effective,
            })
        })
        .collect();
    report(
        g,
        "snr.json",
        "snr",
        cfg.seed,
        &serde_json::json!({ "config": cfg, "effective": effective }),
    )
}

fn localize(g: &Global, hrtf: &HrtfArgs) -> Result<()> {
    check_preset(g, "localize")?;
    let mut r: LocalizationRecipe = read_config(g.config.as_deref())?;
    apply_hrtf(&mut r.hrtf, hrtf);
    if hrtf.hrtf.is_some() {
        r.hrtf.bright_spot_db = None;
    }
    if let Some(seed) = g.seed {
        r.experiment.seed = seed;
    }
    let results = r.run()?;
    let trials: Vec<_> = results
        .iter()
        .flat_map(|res| {
            let p = res.template.processing.clone();
            res.trials.iter().map(move |t| TrialRow {
                processing: p.clone(),
                target: t.target,
                trial: t.trial,
                rove_db: t.rove_db,
                ild_db: t.ild,
                perceived_ild_db: t.perceived_ild,
                response: t.response,
            })
        })
        .collect();
    write_csv(&g.out.join("localization_trials.csv"), &trials)?;
    write_csv(
        &g.out.join("localization.csv"),
        &localization_rows(&results),
    )?;
    let summary: Vec<_> = results
        .iter()
        .map(|res| serde_json::json!({ "processing": res.template.processing, "mean_rms_error": res.metrics.mean_rms }))
        .collect();
    report(
        g,
        "localization.json",
        "localize",
        r.experiment.seed,
        &serde_json::json!({ "recipe": r, "summary": summary }),
    )
}

#[derive(Serialize)]
struct TrialRow {
    processing: String,
    target: i32,
    trial: usize,
    rove_db: f64,
    ild_db: f64,
    perceived_ild_db: f64,
    response: i32,
}

fn srt(g: &Global, hrtf: &HrtfArgs) -> Result<()> {
    check_preset(g, "srt")?;
    let cfg = srt_config(g)?;
    let res = run_srt_experiment(&cfg, &load_hrtfs(hrtf)?)?;
    let rows: Vec<ExperimentRow> = res
        .runs
        .iter()
        .map(|r| ExperimentRow {
            run: r.run,
            condition: r.condition.label().into(),
            processing: r.processing.label().into(),
            metric: "srt_db".into(),
            value: r.srt,
        })
        .collect();
    write_csv(&g.out.join("srt_runs.csv"), &rows)?;
    report(
        g,
        "srt.json",
        "srt",
        cfg.seed,
        &serde_json::json!({ "config": cfg, "summary": res.summary }),
    )
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    if !matches!(cli.command, Command::Render { .. }) {
        if let Some(name) = &g.preset {
            // Condition names are only meaningful for render.
            if name.parse::<Condition>().is_ok() {
                return Err(Error::Config(format!("preset {name} is for `render`")));
            }
        }
    }
    match &cli.command {
        Command::Render {
            hrtf,
            ci_side,
            seconds,
        } => render(g, hrtf, *ci_side, *seconds),
        Command::Enhance { io, disable } => enhance(g, io, *disable),
        Command::Vocode { io, channels } => vocode(g, io, *channels),
        Command::Bimodal {
            io,
            ci_side,
            channels,
        } => bimodal(g, io, *ci_side, *channels),
        Command::Directivity { hrtf } => directivity(g, hrtf),
        Command::IldCurve { hrtf } => ild(g, hrtf),
        Command::Snr { hrtf } => snr(g, hrtf),
        Command::Localize { hrtf } => localize(g, hrtf),
        Command::Srt { hrtf } => srt(g, hrtf),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.global.jobs {
        Some(0) => Err(Error::Config("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))
            .and_then(|pool| pool.install(|| run(cli))),
        None => run(cli),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
