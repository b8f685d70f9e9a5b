use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chartparser::eval::{component_accuracy, Criteria, EvalReport};
use chartparser::ocr::{load_fixture, FixtureFile, HttpProvider, OcrProvider};
use chartparser::output::{default_caption, render, Format};
use chartparser::pipeline::{run, Extraction, Thresholds};
use chartparser::raster::{decode_image, encode_png};
use chartparser::synthgen::{corpus_chart, perturb, GroundTruth, Perturbation, Variant};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

const OCR_URL_ENV: &str = "CHARTPARSER_OCR_URL";

/// Extract data tables from bar chart images.
#[derive(Parser)]
#[command(name = "chartparser", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse chart images into data tables.
    Parse(ParseArgs),
    /// Generate a synthetic chart corpus with ground truth and OCR fixtures.
    Gen(GenArgs),
    /// Score extractions against ground truth.
    Eval(EvalArgs),
}

#[derive(Args)]
struct ThresholdArgs {
    /// Luminance below this value counts as ink.
    #[arg(long, default_value_t = 128)]
    binarize_threshold: u8,
    /// Axis candidates must lie within this many pixels of the longest run.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    axis_band: u32,
    /// Legend words closer than this many pixels are merged.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    merge_gap: u32,
    /// Per-channel tolerance when growing legend swatches.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u8).range(1..))]
    color_tolerance: u8,
}

#[derive(Args)]
struct ParseArgs {
    /// Image files (PNG or JPEG) or directories containing them.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Text source: fixture:<path> or http:<url>. Falls back to $CHARTPARSER_OCR_URL.
    #[arg(long)]
    ocr: Option<String>,
    #[arg(long, default_value_t = Format::Json)]
    format: Format,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write <stem>.extraction.json with every intermediate result.
    #[arg(long)]
    extraction: bool,
    #[command(flatten)]
    thresholds: ThresholdArgs,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Per-channel pixel jitter applied to the rendered images (0-10).
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=10))]
    perturb: u8,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory of <id>.truth.json files.
    #[arg(long)]
    truth: PathBuf,
    /// Directory of <id>.extraction.json files.
    #[arg(long)]
    pred: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the accuracy table as plain text.
    #[arg(long)]
    text: bool,
    /// Minimum IoU for a text box match.
    #[arg(long, default_value_t = 0.5)]
    iou: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Parse(a) => cmd_parse(a),
        Command::Gen(a) => cmd_gen(a).map(|()| ExitCode::SUCCESS),
        Command::Eval(a) => cmd_eval(a).map(|()| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(1)
    })
}

fn provider(ocr: Option<&str>) -> Result<Box<dyn OcrProvider>> {
    let spec = match ocr {
        Some(s) => s.to_string(),
        None => match std::env::var(OCR_URL_ENV) {
            Ok(url) if !url.is_empty() => format!("http:{url}"),
            _ => bail!("no OCR source: pass --ocr or set {OCR_URL_ENV}"),
        },
    };
    if let Some(path) = spec.strip_prefix("fixture:") {
        return Ok(Box::new(load_fixture(path)?));
    }
    if let Some(rest) = spec.strip_prefix("http:") {
        let url = if rest.starts_with("//") { spec.as_str() } else { rest };
        return Ok(Box::new(HttpProvider::new(url)));
    }
    bail!("unrecognized --ocr value '{spec}' (expected fixture:<path> or http:<url>)")
}

fn is_image(path: &Path) -> bool {
    matches!(
        path.extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref(),
        Some("png" | "jpg" | "jpeg")
    )
}

fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(input)
                .with_context(|| format!("reading {}", input.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| is_image(p))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(input.clone());
        }
    }
    if out.is_empty() {
        bail!("no input images");
    }
    Ok(out)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn parse_one(path: &Path, provider: &dyn OcrProvider, th: &Thresholds) -> Extraction {
    let id = stem(path);
    let decoded = fs::read(path)
        .map_err(|e| e.to_string())
        .and_then(|bytes| decode_image(&bytes).map_err(|e| e.to_string()));
    match decoded {
        Ok(img) => run(&img, &id, provider, th),
        Err(detail) => Extraction::failed(&id, "UnreadableImage", &detail),
    }
}

fn cmd_parse(a: ParseArgs) -> Result<ExitCode> {
    let provider = provider(a.ocr.as_deref())?;
    let inputs = expand_inputs(&a.inputs)?;
    let th = Thresholds {
        binarize: a.thresholds.binarize_threshold,
        axis_band: a.thresholds.axis_band,
        merge_gap: a.thresholds.merge_gap,
        color_tolerance: a.thresholds.color_tolerance,
        ..Thresholds::default()
    };
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;

    let results: Vec<Extraction> = inputs
        .par_iter()
        .map(|p| parse_one(p, provider.as_ref(), &th))
        .collect();

    let mut failed = 0;
    for ex in &results {
        for w in &ex.warnings {
            eprintln!("WARN {} {} {}", ex.image_id, w.code, w.detail);
        }
        if let Some(e) = &ex.error {
            eprintln!("ERROR {} {} {}", ex.image_id, e.code, e.detail);
        }
        if a.extraction {
            write_json(&a.out.join(format!("{}.extraction.json", ex.image_id)), ex)?;
        }
        match &ex.table {
            Some(table) if ex.error.is_none() => {
                let rendered = render(table, a.format, &default_caption(table));
                let path = a.out.join(format!("{}.{}", ex.image_id, a.format.extension()));
                fs::write(&path, &rendered.bytes).with_context(|| format!("writing {}", path.display()))?;
            }
            _ => failed += 1,
        }
    }
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

#[derive(Serialize)]
struct ManifestEntry {
    image_id: String,
    variant: Variant,
    image: String,
    truth: String,
    ocr: String,
}

#[derive(Serialize)]
struct Manifest {
    count: usize,
    seed: u64,
    perturb: u8,
    ocr_fixture: String,
    charts: Vec<ManifestEntry>,
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let charts: Vec<_> = (0..a.count)
        .into_par_iter()
        .map(|i| {
            let mut chart = corpus_chart(a.seed, i);
            if a.perturb > 0 {
                let p = Perturbation {
                    jitter: a.perturb,
                    antialias: false,
                    seed: a.seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                };
                chart.raster = perturb(&chart.raster, &p);
            }
            let png = encode_png(&chart.raster)?;
            Ok((chart, png))
        })
        .collect::<Result<_>>()?;

    let mut fixture = FixtureFile::default();
    let mut entries = Vec::new();
    for (chart, png) in &charts {
        let id = chart.image_id();
        let image = format!("{id}.png");
        let truth = format!("{id}.truth.json");
        let ocr = format!("{id}.ocr.json");
        fs::write(a.out.join(&image), png)?;
        write_json(&a.out.join(&truth), &chart.truth)?;
        let mut single = FixtureFile::default();
        single.images.insert(id.to_string(), chart.fixture_entry());
        write_json(&a.out.join(&ocr), &single)?;
        fixture.images.insert(id.to_string(), chart.fixture_entry());
        entries.push(ManifestEntry {
            image_id: id.to_string(),
            variant: chart.truth.variant,
            image,
            truth,
            ocr,
        });
    }
    write_json(&a.out.join("ocr_fixture.json"), &fixture)?;
    let manifest = Manifest {
        count: a.count,
        seed: a.seed,
        perturb: a.perturb,
        ocr_fixture: "ocr_fixture.json".into(),
        charts: entries,
    };
    write_json(&a.out.join("manifest.json"), &manifest)
}

fn read_dir_json<T: serde::de::DeserializeOwned>(dir: &Path, suffix: &str) -> Result<Vec<T>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.ends_with(suffix))
        })
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        })
        .collect()
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    if !(a.iou > 0.0 && a.iou < 1.0) {
        bail!("--iou must lie strictly between 0 and 1");
    }
    let truths: Vec<GroundTruth> = read_dir_json(&a.truth, ".truth.json")?;
    let preds: Vec<Extraction> = read_dir_json(&a.pred, ".extraction.json")?;
    let criteria = Criteria {
        iou: a.iou,
        ..Criteria::default()
    };
    let report: EvalReport = component_accuracy(&preds, &truths, &criteria)?;
    if a.text {
        print!("{}", report.to_text());
    }
    match &a.out {
        Some(path) => write_json(path, &report),
        None if !a.text => {
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
        None => Ok(()),
    }
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
