use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use blockiq::codec::{encode, CodecConfig, EncodedImage};
use blockiq::deblock::{LowPassConfig, Method, PocsConfig};
use blockiq::harness::{
    corpus, run_sweep, synthetic_corpus, write_outputs, ConfigFile, SweepError, SweepInput, SweepSpec,
};
use blockiq::metrics::{score, BefConfig, DiagonalCounts, MetricReport, PairMode, SsimConfig};
use blockiq::{pgm, Image};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Block-DCT coding simulator, deblocking filters and blockiness-aware quality metrics.
#[derive(Parser)]
#[command(name = "blockiq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Code an image with the block-DCT quantizer and write the decoded result.
    Code(CodeArgs),
    /// Deblock a decoded image.
    Deblock(DeblockArgs),
    /// Score test images against a reference, one JSON line per test image.
    Score(ScoreArgs),
    /// Run the quantization-step sweep and write CSV and SVG results.
    Sweep(SweepArgs),
    /// Write the synthetic corpus as PGM files.
    GenCorpus(GenCorpusArgs),
}

#[derive(Args)]
struct CodecArgs {
    /// Quantization step.
    #[arg(long)]
    delta: f64,
    /// Transform block size.
    #[arg(long, default_value_t = CodecConfig::DEFAULT_BLOCK_SIZE)]
    block_size: usize,
}

impl CodecArgs {
    fn config(&self) -> anyhow::Result<CodecConfig> {
        Ok(CodecConfig::new(self.block_size, self.delta)?)
    }
}

#[derive(Args)]
struct CodeArgs {
    /// Input PGM (or PPM, converted to luma).
    input: PathBuf,
    #[command(flatten)]
    codec: CodecArgs,
    /// Output PGM.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct DeblockArgs {
    /// Decoded image, as written by `code` with the same step and block size.
    input: PathBuf,
    #[command(flatten)]
    codec: CodecArgs,
    /// One of none, lowpass3, lowpass7, pocs.
    #[arg(long, default_value = "pocs")]
    method: Method,
    /// Treat the input as the uncoded original and code it first.
    #[arg(long)]
    from_original: bool,
    #[arg(long, default_value_t = PocsConfig::DEFAULT_ITERATIONS)]
    pocs_iterations: usize,
    /// Side of the uniform smoothing kernel used inside POCS.
    #[arg(long, default_value_t = 3)]
    pocs_kernel: usize,
    /// Output PGM.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct MetricArgs {
    /// Comma-separated BEF block sizes.
    #[arg(long, value_delimiter = ',', default_value = "8")]
    bef_block_sizes: Vec<usize>,
    /// Normalize diagonal sums by the horizontal/vertical non-boundary counts
    /// instead of the enumerated diagonal counts.
    #[arg(long)]
    axial_counts: bool,
    #[arg(long, default_value_t = 11)]
    ssim_window: usize,
    #[arg(long, default_value_t = 1.5)]
    ssim_sigma: f64,
}

#[derive(Args)]
struct ScoreArgs {
    /// Reference image.
    #[arg(long)]
    reference: PathBuf,
    /// Test images.
    #[arg(required = true)]
    tests: Vec<PathBuf>,
    /// Comma-separated pair modes: hv, diagonal, combined.
    #[arg(long, value_delimiter = ',', default_value = "hv,diagonal,combined")]
    modes: Vec<PairMode>,
    #[command(flatten)]
    metrics: MetricArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Input images; the synthetic corpus is used when none are given.
    inputs: Vec<PathBuf>,
    /// Output directory.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Comma-separated, strictly increasing quantization steps.
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    /// Comma-separated deblocking methods.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    #[arg(long)]
    block_size: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    bef_block_sizes: Option<Vec<usize>>,
    #[arg(long)]
    axial_counts: bool,
    #[arg(long)]
    pocs_iterations: Option<usize>,
    #[arg(long)]
    pocs_kernel: Option<usize>,
    #[arg(long)]
    ssim_window: Option<usize>,
    #[arg(long)]
    ssim_sigma: Option<f64>,
    /// Side of the synthetic corpus images.
    #[arg(long, default_value_t = corpus::CORPUS_SIZE)]
    corpus_size: usize,
    /// `key = value` file; its entries override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct GenCorpusArgs {
    /// Output directory.
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value_t = corpus::CORPUS_SIZE)]
    size: usize,
}

fn read_image(path: &Path) -> anyhow::Result<Image> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    pgm::load_luma(&bytes).with_context(|| format!("decoding {}", path.display()))
}

fn write_image(path: &Path, img: &Image) -> anyhow::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, pgm::save_pgm(img)).with_context(|| format!("writing {}", path.display()))
}

fn code(args: CodeArgs) -> anyhow::Result<ExitCode> {
    let img = read_image(&args.input)?;
    let decoded = encode(&img, args.codec.config()?)?.decode();
    write_image(&args.output, &decoded)?;
    Ok(ExitCode::SUCCESS)
}

fn deblock(args: DeblockArgs) -> anyhow::Result<ExitCode> {
    let img = read_image(&args.input)?;
    let cfg = args.codec.config()?;
    let (decoded, encoded): (Image, EncodedImage) = if args.from_original {
        let encoded = encode(&img, cfg)?;
        (encoded.decode(), encoded)
    } else {
        // re-coding a decoded image at its own step recovers its coefficients
        // as long as storage rounding moves none of them across a cell edge
        (img.clone(), encode(&img, cfg)?)
    };
    let pocs_cfg = PocsConfig::new(args.pocs_iterations, LowPassConfig::uniform(args.pocs_kernel)?)?;
    let out = args.method.apply(&decoded, &encoded, &pocs_cfg)?;
    write_image(&args.output, &out)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ScoreLine<'a> {
    reference: String,
    test: String,
    #[serde(flatten)]
    report: &'a MetricReport,
}

fn score_cmd(args: ScoreArgs) -> anyhow::Result<ExitCode> {
    let reference = read_image(&args.reference)?;
    let counts = if args.metrics.axial_counts {
        DiagonalCounts::Axial
    } else {
        DiagonalCounts::Enumerated
    };
    let bef = BefConfig::new(args.metrics.bef_block_sizes.clone(), PairMode::Hv)?.with_counts(counts);
    let ssim = SsimConfig::new(args.metrics.ssim_window, args.metrics.ssim_sigma)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for path in &args.tests {
        let test = read_image(path)?;
        let report = score(&reference, &test, &ssim, &bef, &args.modes)?;
        let line = ScoreLine {
            reference: args.reference.display().to_string(),
            test: path.display().to_string(),
            report: &report,
        };
        serde_json::to_writer(&mut out, &line)?;
        writeln!(out)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Flags expressed as configuration entries, so that a config file applied
/// afterwards overrides them key by key.
fn flag_entries(args: &SweepArgs) -> Vec<(String, String)> {
    let mut e: Vec<(&str, String)> = Vec::new();
    if let Some(v) = &args.deltas {
        e.push(("deltas", join(v)));
    }
    if let Some(v) = &args.methods {
        e.push(("methods", join(v)));
    }
    if let Some(v) = args.block_size {
        e.push(("block_size", v.to_string()));
    }
    if let Some(v) = &args.bef_block_sizes {
        e.push(("bef_block_sizes", join(v)));
    }
    if args.axial_counts {
        e.push(("axial_counts", "true".into()));
    }
    if let Some(v) = args.pocs_iterations {
        e.push(("pocs_iterations", v.to_string()));
    }
    if let Some(v) = args.pocs_kernel {
        e.push(("pocs_kernel", v.to_string()));
    }
    if let Some(v) = args.ssim_window {
        e.push(("ssim_window", v.to_string()));
    }
    if let Some(v) = args.ssim_sigma {
        e.push(("ssim_sigma", v.to_string()));
    }
    e.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn sweep(args: SweepArgs) -> anyhow::Result<ExitCode> {
    let inputs = args.inputs.iter().map(SweepInput::path).collect();
    let mut spec = SweepSpec::new(inputs);
    let mut output = args.output.clone();
    ConfigFile {
        entries: flag_entries(&args),
    }
    .apply(&mut spec, &mut output)?;
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        ConfigFile::parse(&text)?.apply(&mut spec, &mut output)?;
    }
    let Some(output) = output else {
        bail!("no output directory (use --output or an `output` config entry)");
    };
    if spec.inputs.is_empty() {
        spec.inputs = synthetic_corpus(args.corpus_size)
            .into_iter()
            .map(|(name, img)| SweepInput::image(name, img))
            .collect();
    }
    let outcome = match run_sweep(&spec) {
        Ok(o) => o,
        Err(SweepError::AllInputsFailed(skips)) => {
            for s in &skips {
                eprintln!("skipped {}: {}", s.image, s.reason);
            }
            bail!("every input failed");
        }
        Err(e) => return Err(e.into()),
    };
    let written = write_outputs(&output, &outcome.rows)?;
    eprintln!(
        "{} rows, {} files written to {}",
        outcome.rows.len(),
        written.len(),
        output.display()
    );
    for s in &outcome.skipped {
        eprintln!("skipped {}: {}", s.image, s.reason);
    }
    Ok(if outcome.skipped.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn gen_corpus(args: GenCorpusArgs) -> anyhow::Result<ExitCode> {
    if args.size == 0 || !args.size.is_multiple_of(CodecConfig::DEFAULT_BLOCK_SIZE) {
        bail!(
            "corpus size must be a positive multiple of {}",
            CodecConfig::DEFAULT_BLOCK_SIZE
        );
    }
    for (name, img) in synthetic_corpus(args.size) {
        let path = args.output.join(format!("{name}.pgm"));
        write_image(&path, &img)?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Code(a) => code(a),
        Command::Deblock(a) => deblock(a),
        Command::Score(a) => score_cmd(a),
        Command::Sweep(a) => sweep(a),
        Command::GenCorpus(a) => gen_corpus(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
