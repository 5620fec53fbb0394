use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tablegrid::eval::{evaluate_dirs, EvalReport};
use tablegrid::pipeline::{list_images, run_pipeline, PipelineConfig};
use tablegrid::preprocess::{deskew, normalize_colors};
use tablegrid::raster::{binarize, load_gray, save_binary_pgm, save_pgm, Threshold};
use tablegrid::synth::{corpus, write_corpus};
use tablegrid::tsr::TsrMode;

#[derive(Parser)]
#[command(name = "tablegrid", version, about = "Table structure recognition for document images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recognise tables in page images and write one JSON file per table.
    Run {
        /// Image files or directories of .pgm/.png pages.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// TOML config; flags below override it.
        #[arg(long, env = "TABLEGRID_CONFIG")]
        config: Option<PathBuf>,
        #[arg(long)]
        mode: Option<TsrMode>,
        /// Width of the column-finding strip [default: 8].
        #[arg(long)]
        v_strip_width: Option<usize>,
        /// Height of the row-finding strip [default: 3].
        #[arg(long)]
        h_strip_height: Option<usize>,
        /// Length of both line-detection strips [default: 20].
        #[arg(long)]
        line_len: Option<usize>,
        /// Detector output JSON; without it each page is one table.
        #[arg(long)]
        detections: Option<PathBuf>,
        #[arg(long)]
        no_deskew: bool,
        #[arg(long)]
        no_normalize: bool,
        /// Worker threads, 0 for one per core.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score predicted table files against ground truth.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Also write the report JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Row label in the printed table.
        #[arg(long, default_value = "tablegrid")]
        name: String,
    },
    /// Write a synthetic corpus of tables with ground truth.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Straighten a skewed page.
    Deskew { input: PathBuf, output: PathBuf },
    /// Binarise a page and force black content on white.
    Normalize { input: PathBuf, output: PathBuf },
}

fn run(cli: Cli) -> tablegrid::Result<ExitCode> {
    match cli.command {
        Command::Run {
            inputs,
            config,
            mode,
            v_strip_width,
            h_strip_height,
            line_len,
            detections,
            no_deskew,
            no_normalize,
            jobs,
            out,
        } => {
            let mut cfg = match config {
                Some(p) => PipelineConfig::load(p)?,
                None => PipelineConfig::default(),
            };
            if let Some(m) = mode {
                cfg.tsr_mode = m;
            }
            if let Some(v) = v_strip_width {
                cfg.tsr.v_strip_width = v;
            }
            if let Some(h) = h_strip_height {
                cfg.tsr.h_strip_height = h;
            }
            if let Some(l) = line_len {
                cfg.tsr.v_line_len = l;
                cfg.tsr.h_line_len = l;
            }
            if detections.is_some() {
                cfg.detections_path = detections;
            }
            cfg.deskew &= !no_deskew;
            cfg.color_normalize &= !no_normalize;
            if let Some(j) = jobs {
                cfg.jobs = j;
            }
            if let Some(o) = out {
                cfg.output_dir = o;
            }
            let mut pages = Vec::new();
            for input in inputs {
                if input.is_dir() {
                    pages.extend(list_images(&input)?);
                } else {
                    pages.push(input);
                }
            }
            let manifest = run_pipeline(&pages, &cfg)?;
            let tables: usize = manifest.pages.iter().map(|p| p.outputs.len()).sum();
            println!(
                "{} pages, {tables} tables, {} failed -> {}",
                manifest.pages.len(),
                manifest.n_failed,
                cfg.output_dir.display()
            );
            for p in manifest.pages.iter().filter(|p| p.error.is_some()) {
                eprintln!("{}: {}", p.path.display(), p.error.as_deref().unwrap_or_default());
            }
            Ok(if manifest.success() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Evaluate { pred, gt, out, name } => {
            let (report, notes) = evaluate_dirs(&pred, &gt)?;
            for n in &notes {
                eprintln!("{n}");
            }
            print!("{}", EvalReport::table([(name.as_str(), &report)]));
            let json = serde_json::to_string_pretty(&report)?;
            match out {
                Some(p) => std::fs::write(&p, json + "\n").map_err(|e| tablegrid::Error::Io { path: p, source: e })?,
                None => println!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth { out, count, seed } => {
            let paths = write_corpus(&out, &corpus(count, seed))?;
            println!("{} fixtures -> {}", paths.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Deskew { input, output } => {
            let d = deskew(&load_gray(&input)?)?;
            save_pgm(&output, &d.image)?;
            println!("applied {:.3} degrees", d.applied_angle);
            Ok(ExitCode::SUCCESS)
        }
        Command::Normalize { input, output } => {
            let bin = binarize(&load_gray(&input)?, Threshold::Auto);
            save_binary_pgm(&output, &normalize_colors(&bin))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
