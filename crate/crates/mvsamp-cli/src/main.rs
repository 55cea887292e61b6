//! `mvsamp` — sample, query, reconstruct and evaluate multivariate grids.
//!
//! Every subcommand is a thin wrapper over the library: identical arguments
//! give identical results to calling the library directly. Exit codes:
//! 0 success, 1 validation error, 2 I/O error, 3 internal invariant
//! violation.

mod commands;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "mvsamp", version, about = "Association-driven sub-sampling of multivariate gridded data")]
struct Cli {
    /// Worker threads for bench (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Log level: error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset from a spec file.
    Synth {
        /// JSON file describing dimensions, variables and feature regions.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Sidecar path to write; bricks go next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a sampled point set from a dataset.
    Sample {
        /// Dataset sidecar JSON.
        #[arg(long)]
        input: PathBuf,
        /// Sampling method: random or pmi.
        #[arg(long)]
        method: String,
        /// Comma-separated variables driving the joint histogram.
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = mvsamp::histogram::DEFAULT_BIN_COUNT)]
        bins: usize,
        #[arg(long)]
        seed: u64,
        /// Per-bin exact quotas instead of independent Bernoulli draws.
        #[arg(long)]
        exact_quota: bool,
        /// Normalization of the information table: minmax or clampmax.
        #[arg(long, default_value = "minmax")]
        normalization: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the 2-D pointwise information table as CSV and a PNG heatmap.
    PmiPlot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        #[arg(long, default_value_t = mvsamp::histogram::DEFAULT_BIN_COUNT)]
        bins: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        png: Option<PathBuf>,
        /// Also dump nonzero histogram bins as CSV.
        #[arg(long)]
        counts_csv: Option<PathBuf>,
    },
    /// Materialize the per-point information field as a brick.
    PmiField {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        #[arg(long, default_value_t = mvsamp::histogram::DEFAULT_BIN_COUNT)]
        bins: usize,
        /// raw or normalized.
        #[arg(long, default_value = "raw")]
        mode: String,
        #[arg(long)]
        out: PathBuf,
        /// Optional sidecar describing the output brick.
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Evaluate a range query against a dataset or a sampled point set.
    Query {
        /// Query expression, e.g. "0.3 < mixfrac < 0.7 AND y_oh > 0.0006".
        #[arg(long)]
        query: String,
        /// Dataset sidecar (JSON) or point-set file (MVSP), sniffed by magic.
        #[arg(long)]
        input: PathBuf,
        /// Raw dataset sidecar; when given, reports the Jaccard index of the
        /// input's result against this ground truth.
        #[arg(long)]
        ground_truth: Option<PathBuf>,
        /// Write matching indices: .csv for text, anything else as
        /// little-endian u64.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interpolate a sampled point set back onto its full grid.
    Reconstruct {
        /// Point-set file (MVSP).
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        var: String,
        /// delaunay, idw or nearest.
        #[arg(long, default_value = "delaunay")]
        mode: String,
        #[arg(long, default_value_t = mvsamp::reconstruct::DEFAULT_IDW_NEIGHBORS)]
        idw_neighbors: usize,
        #[arg(long, default_value_t = mvsamp::reconstruct::DEFAULT_IDW_POWER)]
        idw_power: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Compare reconstructed bricks against the raw dataset.
    Eval {
        /// Raw dataset sidecar.
        #[arg(long)]
        raw: PathBuf,
        /// Reconstructed brick as NAME=PATH; repeat for several variables.
        #[arg(long = "recon")]
        recon: Vec<String>,
        /// Comma-separated: ssim, mse, pearson, dcor.
        #[arg(long, value_delimiter = ',')]
        metrics: Vec<String>,
        /// Slice for image metrics as axis:index, e.g. z:25.
        #[arg(long)]
        slice: Option<String>,
        /// Region of interest "x0:x1,y0:y1,z0:z1" for correlation metrics.
        #[arg(long)]
        roi: Option<String>,
        /// Dump compared slices as PNGs into this directory.
        #[arg(long)]
        png_dir: Option<PathBuf>,
        /// Write the metric report as JSON here (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full sampling-vs-random comparison pipeline from a config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .parse_filters(&cli.log_level)
        .format_timestamp(None)
        .init();

    let threads = cli.threads;
    let outcome = std::panic::catch_unwind(move || run(cli.command, threads));
    let code = match outcome {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => {
            eprintln!("error: internal invariant violation");
            3
        }
    };
    std::process::exit(code);
}

fn run(command: Command, threads: usize) -> mvsamp::Result<()> {
    match command {
        Command::Synth { spec, seed, out } => commands::synth(&spec, seed, &out),
        Command::Sample {
            input,
            method,
            vars,
            alpha,
            bins,
            seed,
            exact_quota,
            normalization,
            out,
        } => commands::sample(
            &input,
            &method,
            &vars,
            alpha,
            bins,
            seed,
            exact_quota,
            &normalization,
            &out,
        ),
        Command::PmiPlot {
            input,
            vars,
            bins,
            csv,
            png,
            counts_csv,
        } => commands::pmi_plot(
            &input,
            &vars,
            bins,
            csv.as_deref(),
            png.as_deref(),
            counts_csv.as_deref(),
        ),
        Command::PmiField {
            input,
            vars,
            bins,
            mode,
            out,
            sidecar,
        } => commands::pmi_field_cmd(&input, &vars, bins, &mode, &out, sidecar.as_deref()),
        Command::Query {
            query,
            input,
            ground_truth,
            out,
        } => commands::query(&query, &input, ground_truth.as_deref(), out.as_deref()),
        Command::Reconstruct {
            input,
            var,
            mode,
            idw_neighbors,
            idw_power,
            out,
            sidecar,
        } => commands::reconstruct_cmd(
            &input,
            &var,
            &mode,
            idw_neighbors,
            idw_power,
            &out,
            sidecar.as_deref(),
        ),
        Command::Eval {
            raw,
            recon,
            metrics,
            slice,
            roi,
            png_dir,
            out,
        } => commands::eval(
            &raw,
            &recon,
            &metrics,
            slice.as_deref(),
            roi.as_deref(),
            png_dir.as_deref(),
            out.as_deref(),
        ),
        Command::Bench { config, out_dir } => commands::bench(&config, &out_dir, threads),
    }
}
