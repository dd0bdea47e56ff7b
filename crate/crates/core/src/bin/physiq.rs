use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use physiq::bench::{
    compute_variance_baseline, evaluate_model, load_report, summary_table, write_report,
    write_summary, Dataset, EvalReport, ReportFormat, VarianceBaseline,
};
use physiq::frameseq::{
    load_sequence, read_meta, resample_fps, save_raw, save_sequence, split_at_switch, SplitSpec,
};
use physiq::judge::{
    build_pairs, mllm_score, run_judge, stub_judge, EndpointConfig, HttpJudge, Judge, JudgeRun,
    RetryPolicy, GRANULARITY,
};
use physiq::metrics::{evaluate_pair, MetricRecord, StMode};
use physiq::motionmask::{compute_mask_video, save_mask_video, MaskParams};
use physiq::synthlab::{
    render_scenario, write_mini_benchmark, write_model_outputs, write_single_scenario, SynthKind,
    SynthSpec,
};
use physiq::{Error, Result};

#[derive(Parser)]
#[command(
    name = "physiq",
    version,
    about = "Physical-plausibility scoring for generated video continuations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resample a frame sequence to a new frame rate and optional size
    Ingest {
        input: PathBuf,
        output: PathBuf,
        #[arg(long)]
        fps: f64,
        /// Target size as WxH
        #[arg(long, value_parser = parse_size)]
        size: Option<(u32, u32)>,
        /// Write a single raw frames.piqf instead of PNG frames
        #[arg(long)]
        raw: bool,
    },
    /// Compute a motion-mask video
    Mask {
        frames: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Score generated continuations against the real ones
    Evaluate(EvaluateArgs),
    /// Check a dataset manifest
    Validate {
        manifest: PathBuf,
        /// Allow fewer than 66 scenarios or 3 perspectives
        #[arg(long)]
        partial: bool,
    },
    /// Measure take-1 vs take-2 physical variance
    Variance {
        manifest: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "volume", value_parser = parse_mode)]
        mode: StMode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare model reports in one table
    Report {
        #[arg(long, num_args = 1.., required = true)]
        models: Vec<PathBuf>,
        /// Summary table, .csv or .json
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-category breakdown of every model as JSON
        #[arg(long)]
        breakdown: Option<PathBuf>,
    },
    /// Render synthetic scenarios
    Synth(SynthArgs),
    /// Run the two-alternative forced-choice realism judge
    Judge(JudgeArgs),
}

#[derive(Args)]
struct ParamArgs {
    /// Mask parameters as JSON; the flags below override single fields
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    window: Option<usize>,
}

impl ParamArgs {
    fn given(&self) -> bool {
        self.params.is_some() || self.tau.is_some() || self.alpha.is_some() || self.window.is_some()
    }

    fn resolve(&self) -> Result<MaskParams> {
        let mut p = match &self.params {
            Some(path) => MaskParams::from_json_file(path)?,
            None => MaskParams::default(),
        };
        if let Some(t) = self.tau {
            p.threshold = t;
        }
        if let Some(a) = self.alpha {
            p.update_rate = a;
        }
        if let Some(w) = self.window {
            p.window = w;
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args)]
struct EvaluateArgs {
    /// Real sequence; split at its recorded switch frame when it has one
    #[arg(long, conflicts_with = "manifest", requires = "generated")]
    real: Option<PathBuf>,
    /// Generated sequence, or with --manifest a directory of <scenario>/<perspective>/ sequences
    #[arg(long)]
    generated: PathBuf,
    #[arg(long, requires = "baseline")]
    manifest: Option<PathBuf>,
    #[arg(long)]
    baseline: Option<PathBuf>,
    #[arg(long, default_value = "model")]
    model: String,
    #[arg(long)]
    scenario_id: Option<String>,
    #[arg(long)]
    perspective: Option<String>,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<StMode>,
    /// .json, or .csv for per-pair rows of a dataset report
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// One scene kind; omit for the five-scene mini-benchmark
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// With --kind, write only this take as a bare sequence
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    take: Option<u8>,
    /// Take-2 perturbation scale in [0, 1]
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    /// Also write stand-in model outputs (noisy take-1 test segments) here
    #[arg(long)]
    generated: Option<PathBuf>,
    /// Uniform pixel noise level for --generated
    #[arg(long, default_value_t = 0)]
    pixel_noise: u8,
}

#[derive(Args)]
struct JudgeArgs {
    #[arg(long)]
    real: PathBuf,
    #[arg(long)]
    generated: PathBuf,
    #[arg(long, conflicts_with = "stub", required_unless_present = "stub")]
    endpoint: Option<String>,
    #[arg(long)]
    stub: Option<String>,
    /// Environment variable holding the endpoint's bearer token
    #[arg(long)]
    token_env: Option<String>,
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    #[arg(long, default_value_t = 4)]
    in_flight: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_size(s: &str) -> std::result::Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<u32>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(w)?, parse(h)?))
}

fn parse_mode(s: &str) -> std::result::Result<StMode, String> {
    match s {
        "volume" => Ok(StMode::Volume),
        "frame-mean" => Ok(StMode::FrameMean),
        _ => Err(format!("expected volume or frame-mean, got {s:?}")),
    }
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn ingest(
    input: &Path,
    output: &Path,
    fps: f64,
    size: Option<(u32, u32)>,
    raw: bool,
) -> Result<()> {
    let seq = load_sequence(input)?;
    let out = resample_fps(&seq, fps, size)?;
    if raw {
        save_raw(&out, output)?;
    } else {
        save_sequence(&out, output)?;
    }
    println!(
        "{} frames @ {} fps -> {} frames @ {} fps, {}x{}",
        seq.len(),
        seq.fps(),
        out.len(),
        fps,
        out.width(),
        out.height()
    );
    Ok(())
}

fn mask(frames: &Path, output: &Path, params: &ParamArgs) -> Result<()> {
    let seq = load_sequence(frames)?;
    let mask = compute_mask_video(&seq, &params.resolve()?)?;
    save_mask_video(&mask, seq.fps(), output)?;
    println!(
        "{} frames, {} moving voxels",
        mask.frame_count(),
        mask.active_voxels()
    );
    Ok(())
}

fn evaluate(args: &EvaluateArgs) -> Result<()> {
    if let Some(manifest) = &args.manifest {
        let dataset = Dataset::load(manifest)?;
        let baseline =
            VarianceBaseline::load(args.baseline.as_ref().expect("clap requires --baseline"))?;
        if args.params.given() && args.params.resolve()? != baseline.mask_params {
            return Err(Error::InvalidParams(
                "mask params differ from the variance baseline's".into(),
            ));
        }
        if args.mode.is_some_and(|m| m != baseline.mode) {
            return Err(Error::InvalidParams(
                "spatiotemporal mode differs from the variance baseline's".into(),
            ));
        }
        let scored = evaluate_model(
            &dataset,
            &args.generated,
            &baseline.mask_params,
            baseline.mode,
        )?;
        let report = EvalReport::build(&args.model, scored, &baseline)?;
        write_report(&report, ReportFormat::from_path(&args.out), &args.out)?;
        println!(
            "{}: Physics-IQ {:.2} over {} pairs ({} missing)",
            report.model,
            report.physics_iq,
            report.entries.len(),
            report.missing
        );
        return Ok(());
    }
    let real_path = args
        .real
        .as_ref()
        .ok_or_else(|| Error::InvalidParams("need --real or --manifest".into()))?;
    let real = load_sequence(real_path)?;
    let real_test = match read_meta(real_path)?.switch_index {
        Some(switch) => split_at_switch(&real, &SplitSpec::at(switch))?.1,
        None => real,
    };
    let generated = load_sequence(&args.generated)?;
    let params = args.params.resolve()?;
    let mode = args.mode.unwrap_or_default();
    let set = evaluate_pair(&real_test, &generated, &params, mode)?;
    let records = MetricRecord::from_set(
        &set,
        args.scenario_id.as_deref(),
        args.perspective.as_deref(),
        mode,
        &params,
    );
    write_json(&records, &args.out)?;
    for r in &records {
        println!("{} {}", r.metric.as_str(), r.value);
    }
    Ok(())
}

fn validate(manifest: &Path, partial: bool) -> Result<()> {
    let summary = Dataset::load(manifest)?.validate(partial)?;
    println!(
        "ok: {} scenarios, {} scenario-perspective pairs, {} records",
        summary.scenarios, summary.pairs, summary.records
    );
    Ok(())
}

fn variance(manifest: &Path, params: &ParamArgs, mode: StMode, out: &Path) -> Result<()> {
    let dataset = Dataset::load(manifest)?;
    let baseline = compute_variance_baseline(&dataset, &params.resolve()?, mode)?;
    baseline.save(out)?;
    let a = baseline.aggregate;
    println!(
        "spatial_iou {} spatiotemporal_iou {} weighted_spatial_iou {} mse {}",
        a.spatial_iou, a.spatiotemporal_iou, a.weighted_spatial_iou, a.mse
    );
    Ok(())
}

fn report(models: &[PathBuf], out: Option<&Path>, breakdown: Option<&Path>) -> Result<()> {
    let reports = models
        .iter()
        .map(|p| load_report(p))
        .collect::<Result<Vec<_>>>()?;
    let rows = summary_table(&reports)?;
    println!(
        "{:<28} {:>8} {:>8} {:>8} {:>9} {:>10} {:>6}",
        "model", "spatial", "st", "weighted", "mse", "physics_iq", "rank"
    );
    for r in &rows {
        let rank = r.mean_rank.map_or_else(String::new, |v| format!("{v:.2}"));
        println!(
            "{:<28} {:>8.3} {:>8.3} {:>8.3} {:>9.5} {:>10.1} {:>6}",
            r.model,
            r.spatial_iou,
            r.spatiotemporal_iou,
            r.weighted_spatial_iou,
            r.mse,
            r.physics_iq,
            rank
        );
    }
    if let Some(path) = out {
        write_summary(&rows, ReportFormat::from_path(path), path)?;
    }
    if let Some(path) = breakdown {
        let table: BTreeMap<&str, _> = reports
            .iter()
            .map(|r| (r.model.as_str(), &r.categories))
            .collect();
        write_json(&table, path)?;
    }
    Ok(())
}

fn synth(args: &SynthArgs) -> Result<()> {
    match (&args.kind, args.take) {
        (Some(kind), Some(take)) => {
            let spec =
                SynthSpec::preset(kind.parse::<SynthKind>()?).with_noise(args.seed, args.noise);
            let seq = render_scenario(&spec, take.try_into()?)?;
            physiq::frameseq::save_sequence_tagged(
                &seq,
                &args.out,
                Some(kind),
                Some(spec.split().switch_index),
            )?;
            println!("{kind} take {take}: {} frames", seq.len());
            return Ok(());
        }
        (None, Some(_)) => return Err(Error::InvalidParams("--take needs --kind".into())),
        _ => {}
    }
    let dataset = match &args.kind {
        None => write_mini_benchmark(&args.out, args.seed)?,
        Some(kind) => {
            let spec =
                SynthSpec::preset(kind.parse::<SynthKind>()?).with_noise(args.seed, args.noise);
            write_single_scenario(&args.out, &spec)?
        }
    };
    println!(
        "{} records -> {}",
        dataset.records.len(),
        args.out.join("dataset.json").display()
    );
    if let Some(gen) = &args.generated {
        let n = write_model_outputs(&dataset, gen, args.pixel_noise, args.seed)?;
        println!("{n} generated continuations -> {}", gen.display());
    }
    Ok(())
}

fn judge(args: &JudgeArgs) -> Result<()> {
    let dataset = Dataset::load(&args.real)?;
    let mut real = BTreeMap::new();
    let mut generated = BTreeMap::new();
    for pair in dataset.pairs()? {
        let key = format!("{}/{}", pair.scenario_id, pair.perspective);
        real.insert(key.clone(), pair.take1.to_string_lossy().into_owned());
        let gen_dir = args
            .generated
            .join(&pair.scenario_id)
            .join(pair.perspective.as_str());
        if gen_dir.exists() {
            generated.insert(key, gen_dir.to_string_lossy().into_owned());
        }
    }
    let pairs = build_pairs(&real, &generated, args.seed)?;
    let judge: Box<dyn Judge> = match (&args.stub, &args.endpoint) {
        (Some(name), _) => stub_judge(name, args.seed)?,
        (None, Some(url)) => Box::new(HttpJudge::new(EndpointConfig {
            base_url: url.clone(),
            token_env: args.token_env.clone(),
            timeout_secs: args.timeout,
        })),
        (None, None) => unreachable!("clap requires --endpoint or --stub"),
    };
    let verdicts = run_judge(
        &pairs,
        judge.as_ref(),
        args.in_flight,
        &RetryPolicy::default(),
    )?;
    let score = mllm_score(&verdicts).ok();
    let run = JudgeRun {
        judge: judge.name(),
        granularity: GRANULARITY.into(),
        seed: args.seed,
        score,
        verdicts,
    };
    write_json(&run, &args.out)?;
    match score {
        Some(s) => println!(
            "accuracy {:.1}% ({} of {} parseable, {} unparseable)",
            s.accuracy, s.correct, s.parseable, s.unparseable
        ),
        None => println!("no parseable verdicts out of {}", run.verdicts.len()),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest {
            input,
            output,
            fps,
            size,
            raw,
        } => ingest(&input, &output, fps, size, raw),
        Command::Mask {
            frames,
            output,
            params,
        } => mask(&frames, &output, &params),
        Command::Evaluate(args) => evaluate(&args),
        Command::Validate { manifest, partial } => validate(&manifest, partial),
        Command::Variance {
            manifest,
            params,
            mode,
            out,
        } => variance(&manifest, &params, mode, &out),
        Command::Report {
            models,
            out,
            breakdown,
        } => report(&models, out.as_deref(), breakdown.as_deref()),
        Command::Synth(args) => synth(&args),
        Command::Judge(args) => judge(&args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
