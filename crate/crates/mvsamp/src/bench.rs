//! End-to-end comparison pipeline: synthesize or load data, sample with both
//! methods across a fraction grid and seed list, evaluate queries and
//! reconstructions, and emit a reproducible report.
//!
//! The run fans (method x fraction x seed) cells across a worker pool. Cells
//! are independent and every random decision is keyed on explicit seeds, so
//! the report is byte-identical for a given config regardless of thread
//! count. Reports carry the config echo, the raw-data reference values, and
//! one row per (kind, target, method, fraction) with per-seed values.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::{
    distance_correlation, mse, mse_fields, pearson, rasterize_slice, ssim, RasterImage,
    RegionOfInterest, DCOR_DEFAULT_SEED, DCOR_MAX_POINTS,
};
use crate::fieldio::{make_synthetic, Axis, MultiField, SyntheticSpec};
use crate::histogram::{build_joint, BinAssignment, DEFAULT_BIN_COUNT};
use crate::pointinfo::pmi_table;
use crate::query::{jaccard, parse_query, query_raw, query_sampled, QueryExpr, QueryResult};
use crate::reconstruct::{reconstruct, ReconstructionMode};
use crate::sampler::{build_acceptance, pmi_sample, random_sample, AcceptanceTable, SamplingFraction};

/// Supported config schema version.
pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedQuery {
    pub name: String,
    pub expr: String,
}

fn default_metrics() -> Vec<String> {
    vec!["ssim".into(), "mse_slice".into(), "mse_roi".into()]
}

fn default_dcor_max_points() -> usize {
    DCOR_MAX_POINTS
}

fn default_dcor_seed() -> u64 {
    DCOR_DEFAULT_SEED
}

fn default_mode() -> String {
    "delaunay".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconConfig {
    /// Variables to reconstruct; correlation metrics use the first two.
    pub variables: Vec<String>,
    #[serde(default = "default_mode")]
    pub mode: String,
    pub slice_axis: Axis,
    pub slice_index: u32,
    #[serde(default)]
    pub roi: Option<RegionOfInterest>,
    /// Any of: ssim, mse_slice, mse_roi, pearson_roi, dcor_roi,
    /// pearson_full, dcor_full.
    #[serde(default = "default_metrics")]
    pub metrics: Vec<String>,
    #[serde(default = "default_dcor_max_points")]
    pub dcor_max_points: usize,
    #[serde(default = "default_dcor_seed")]
    pub dcor_seed: u64,
}

fn default_bins() -> usize {
    DEFAULT_BIN_COUNT
}

/// One experiment bundle: dataset, sampling setup, queries, reconstruction
/// metrics and the seed list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub version: u32,
    /// Inline synthetic dataset description...
    #[serde(default)]
    pub synthetic: Option<SyntheticSpec>,
    /// ...or a path to a JSON sidecar of an existing dataset.
    #[serde(default)]
    pub dataset: Option<String>,
    /// Seed for synthetic generation.
    #[serde(default)]
    pub synth_seed: u64,
    /// Variables entering the joint histogram (sampling criterion).
    pub variables: Vec<String>,
    #[serde(default = "default_bins")]
    pub bins: usize,
    pub alphas: Vec<f64>,
    /// Sampling seeds; every randomized step is keyed on these explicitly.
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub queries: Vec<NamedQuery>,
    #[serde(default)]
    pub reconstruction: Option<ReconConfig>,
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: BenchConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        match (&self.synthetic, &self.dataset) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "config must set either synthetic or dataset, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config(
                    "config must set synthetic or dataset".into(),
                ))
            }
            _ => {}
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("config needs at least one seed".into()));
        }
        if self.alphas.is_empty() {
            return Err(Error::Config("config needs at least one alpha".into()));
        }
        for &a in &self.alphas {
            SamplingFraction::new(a)?;
        }
        if self.variables.len() < 2 {
            return Err(Error::Config(
                "sampling needs at least two variables".into(),
            ));
        }
        if let Some(rc) = &self.reconstruction {
            if rc.variables.is_empty() {
                return Err(Error::Config("reconstruction.variables is empty".into()));
            }
            rc.mode.parse::<ReconstructionMode>()?;
            let known = [
                "ssim",
                "mse_slice",
                "mse_roi",
                "pearson_roi",
                "dcor_roi",
                "pearson_full",
                "dcor_full",
            ];
            for m in &rc.metrics {
                if !known.contains(&m.as_str()) {
                    return Err(Error::Config(format!("unknown metric {m:?}")));
                }
            }
            let needs_roi = rc
                .metrics
                .iter()
                .any(|m| m == "mse_roi" || m == "pearson_roi" || m == "dcor_roi");
            if needs_roi && rc.roi.is_none() {
                return Err(Error::Config(
                    "ROI metrics requested but no roi given".into(),
                ));
            }
            let needs_pair = rc
                .metrics
                .iter()
                .any(|m| m.starts_with("pearson") || m.starts_with("dcor"));
            if needs_pair && rc.variables.len() < 2 {
                return Err(Error::Config(
                    "correlation metrics need two reconstructed variables".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Raw-data values reconstruction metrics are compared against.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct References {
    pub queries: Vec<QueryReference>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pearson_roi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dcor_roi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pearson_full: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dcor_full: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct QueryReference {
    pub name: String,
    pub canonical: String,
    pub ground_truth_points: u64,
}

/// One aggregated measurement across seeds.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportRow {
    /// Measurement kind: yield, jaccard, ssim, mse_slice, mse_roi,
    /// pearson_roi, dcor_roi, pearson_full, dcor_full.
    pub kind: String,
    /// Query name, variable name, or variable pair.
    pub target: String,
    pub method: String,
    pub alpha: f64,
    pub seed_count: usize,
    pub mean: f64,
    pub stddev: f64,
    /// Per-seed values in the order of `config.seeds`.
    pub values: Vec<f64>,
}

/// Full pipeline output: the config echo, raw references and sorted rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: BenchConfig,
    pub references: References,
    pub rows: Vec<ReportRow>,
}

impl BenchmarkReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))
    }

    /// Markdown tables, one per (kind, target), columns by alpha and method.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("# Benchmark report\n");
        let mut groups: Vec<(String, String)> = self
            .rows
            .iter()
            .map(|r| (r.kind.clone(), r.target.clone()))
            .collect();
        groups.sort();
        groups.dedup();
        let mut alphas: Vec<f64> = self.rows.iter().map(|r| r.alpha).collect();
        alphas.sort_by(f64::total_cmp);
        alphas.dedup();
        for (kind, target) in groups {
            out.push_str(&format!("\n## {kind}: {target}\n\n| method |"));
            for a in &alphas {
                out.push_str(&format!(" alpha {a} |"));
            }
            out.push_str("\n|---|");
            for _ in &alphas {
                out.push_str("---|");
            }
            out.push('\n');
            for method in ["random", "pmi"] {
                out.push_str(&format!("| {method} |"));
                for &a in &alphas {
                    let cell = self
                        .rows
                        .iter()
                        .find(|r| {
                            r.kind == kind && r.target == target && r.method == method && r.alpha == a
                        })
                        .map(|r| format!(" {:.6} |", r.mean))
                        .unwrap_or_else(|| " - |".into());
                    out.push_str(&cell);
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Options controlling a pipeline run (not part of the experiment identity).
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; 0 means the available parallelism.
    pub threads: usize,
    /// If set, point sets, reconstructed bricks and the report are written
    /// here.
    pub out_dir: Option<std::path::PathBuf>,
}

struct QueryPlan {
    name: String,
    expr: QueryExpr,
    raw: QueryResult,
}

struct ReconPlan {
    cfg: ReconConfig,
    mode: ReconstructionMode,
    /// Per reconstructed variable: (name, raw value range, raw slice image).
    raw_slices: Vec<(String, (f64, f64), RasterImage)>,
}

struct Context<'a> {
    mf: &'a MultiField,
    assign: &'a BinAssignment,
    acceptance: Vec<AcceptanceTable>,
    alphas: Vec<SamplingFraction>,
    queries: Vec<QueryPlan>,
    recon: Option<ReconPlan>,
    seeds: &'a [u64],
    out_dir: Option<&'a Path>,
}

struct CellResult {
    /// (kind, target, value) measurements for this cell.
    values: Vec<(String, String, f64)>,
}

/// Run the full pipeline described by `config`.
pub fn run_pipeline(config: &BenchConfig, options: &RunOptions) -> Result<BenchmarkReport> {
    config.validate()?;
    let mf = load_dataset(config)?;
    let (hist, assign) = build_joint(&mf, &config.variables, config.bins)?;
    let table = pmi_table(&hist)?;

    let mut alphas = Vec::new();
    let mut acceptance = Vec::new();
    for &a in &config.alphas {
        let alpha = SamplingFraction::new(a)?;
        acceptance.push(build_acceptance(&table, &hist, alpha)?);
        alphas.push(alpha);
    }

    let mut queries = Vec::new();
    for q in &config.queries {
        let parsed = parse_query(&q.expr)?;
        for w in &parsed.warnings {
            log::warn!("query {:?}: {w}", q.name);
        }
        let raw = query_raw(&mf, &parsed.expr)?;
        queries.push(QueryPlan {
            name: q.name.clone(),
            expr: parsed.expr,
            raw,
        });
    }

    let recon = match &config.reconstruction {
        None => None,
        Some(rc) => {
            let mode: ReconstructionMode = rc.mode.parse()?;
            let mut raw_slices = Vec::new();
            for var in &rc.variables {
                let f = mf.field(var)?;
                let range = f.min_max();
                let img = rasterize_slice(f, rc.slice_axis, rc.slice_index, range)?;
                raw_slices.push((var.clone(), range, img));
            }
            Some(ReconPlan {
                cfg: rc.clone(),
                mode,
                raw_slices,
            })
        }
    };

    let references = compute_references(&mf, &queries, recon.as_ref())?;

    if let Some(dir) = &options.out_dir {
        std::fs::create_dir_all(dir.join("artifacts"))?;
    }
    let ctx = Context {
        mf: &mf,
        assign: &assign,
        acceptance,
        alphas,
        queries,
        recon,
        seeds: &config.seeds,
        out_dir: options.out_dir.as_deref(),
    };

    // method x alpha x seed cells, processed by a small worker pool. Results
    // land in per-cell slots, so assembly is order-independent.
    let methods = ["random", "pmi"];
    let n_cells = methods.len() * ctx.alphas.len() * ctx.seeds.len();
    let results: Mutex<Vec<Option<Result<CellResult>>>> = Mutex::new((0..n_cells).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let threads = if options.threads == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        options.threads
    }
    .min(n_cells.max(1));

    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let cell = next.fetch_add(1, Ordering::Relaxed);
                if cell >= n_cells {
                    break;
                }
                let per_seed = ctx.seeds.len();
                let per_alpha = ctx.alphas.len() * per_seed;
                let method = methods[cell / per_alpha];
                let alpha_idx = (cell % per_alpha) / per_seed;
                let seed_idx = cell % per_seed;
                let out = run_cell(&ctx, method, alpha_idx, seed_idx);
                results.lock().expect("no poisoned cells")[cell] = Some(out);
            });
        }
    });

    let collected = results.into_inner().expect("worker pool finished");
    let mut per_cell = Vec::with_capacity(n_cells);
    for (i, slot) in collected.into_iter().enumerate() {
        match slot {
            Some(Ok(r)) => per_cell.push(r),
            Some(Err(e)) => return Err(e),
            None => {
                return Err(Error::Internal(format!("benchmark cell {i} never ran")));
            }
        }
    }

    let rows = aggregate_rows(config, &methods, &per_cell);
    let report = BenchmarkReport {
        config: config.clone(),
        references,
        rows,
    };

    if let Some(dir) = &options.out_dir {
        std::fs::write(dir.join("report.json"), report.to_json()?)?;
        std::fs::write(dir.join("report.md"), report.to_markdown())?;
    }
    Ok(report)
}

fn load_dataset(config: &BenchConfig) -> Result<MultiField> {
    match (&config.synthetic, &config.dataset) {
        (Some(spec), None) => make_synthetic(spec, config.synth_seed),
        (None, Some(path)) => MultiField::load_sidecar(path),
        _ => Err(Error::Config("exactly one data source required".into())),
    }
}

fn compute_references(
    mf: &MultiField,
    queries: &[QueryPlan],
    recon: Option<&ReconPlan>,
) -> Result<References> {
    let query_refs = queries
        .iter()
        .map(|q| QueryReference {
            name: q.name.clone(),
            canonical: q.expr.to_string(),
            ground_truth_points: q.raw.len() as u64,
        })
        .collect();
    let mut refs = References {
        queries: query_refs,
        pearson_roi: None,
        dcor_roi: None,
        pearson_full: None,
        dcor_full: None,
    };
    if let Some(plan) = recon {
        let rc = &plan.cfg;
        if rc.variables.len() >= 2 {
            let x = mf.field(&rc.variables[0])?;
            let y = mf.field(&rc.variables[1])?;
            if rc.metrics.iter().any(|m| m == "pearson_roi") {
                refs.pearson_roi = Some(pearson(x, y, rc.roi.as_ref())?);
            }
            if rc.metrics.iter().any(|m| m == "dcor_roi") {
                refs.dcor_roi = Some(distance_correlation(
                    x,
                    y,
                    rc.roi.as_ref(),
                    rc.dcor_max_points,
                    rc.dcor_seed,
                )?);
            }
            if rc.metrics.iter().any(|m| m == "pearson_full") {
                refs.pearson_full = Some(pearson(x, y, None)?);
            }
            if rc.metrics.iter().any(|m| m == "dcor_full") {
                refs.dcor_full = Some(distance_correlation(
                    x,
                    y,
                    None,
                    rc.dcor_max_points,
                    rc.dcor_seed,
                )?);
            }
        }
    }
    Ok(refs)
}

fn run_cell(ctx: &Context<'_>, method: &str, alpha_idx: usize, seed_idx: usize) -> Result<CellResult> {
    let alpha = ctx.alphas[alpha_idx];
    let seed = ctx.seeds[seed_idx];
    let ps = match method {
        "random" => random_sample(ctx.mf, alpha, seed),
        "pmi" => pmi_sample(ctx.mf, ctx.assign, &ctx.acceptance[alpha_idx], seed)?,
        other => return Err(Error::Internal(format!("unknown method {other}"))),
    };

    let mut values = Vec::new();
    values.push(("yield".into(), "points".into(), ps.len() as f64));

    if let Some(dir) = ctx.out_dir {
        let stem = format!("{method}_a{}_s{seed}", fmt_alpha(alpha.value()));
        ps.save(dir.join("artifacts").join(format!("{stem}.mvsp")))?;
    }

    for q in &ctx.queries {
        let sampled = query_sampled(&ps, &q.expr)?;
        let j = jaccard(&q.raw, &sampled)?;
        values.push(("jaccard".into(), q.name.clone(), j));
    }

    if let Some(plan) = &ctx.recon {
        let rc = &plan.cfg;
        let mut recon_fields = Vec::new();
        for (var, range, raw_img) in &plan.raw_slices {
            let rec = reconstruct(&ps, var, plan.mode)?;
            if let Some(dir) = ctx.out_dir {
                let stem = format!("{method}_a{}_s{seed}_{var}", fmt_alpha(alpha.value()));
                rec.save_brick(dir.join("artifacts").join(format!("{stem}.f32")))?;
            }
            let rec_img = rasterize_slice(&rec, rc.slice_axis, rc.slice_index, *range)?;
            if rc.metrics.iter().any(|m| m == "ssim") {
                values.push(("ssim".into(), var.clone(), ssim(raw_img, &rec_img)?));
            }
            if rc.metrics.iter().any(|m| m == "mse_slice") {
                values.push(("mse_slice".into(), var.clone(), mse(raw_img, &rec_img)?));
            }
            if rc.metrics.iter().any(|m| m == "mse_roi") {
                let raw_field = ctx.mf.field(var)?;
                values.push((
                    "mse_roi".into(),
                    var.clone(),
                    mse_fields(raw_field, &rec, rc.roi.as_ref())?,
                ));
            }
            recon_fields.push(rec);
        }
        if recon_fields.len() >= 2 {
            let pair = format!("{}~{}", rc.variables[0], rc.variables[1]);
            let (x, y) = (&recon_fields[0], &recon_fields[1]);
            if rc.metrics.iter().any(|m| m == "pearson_roi") {
                values.push(("pearson_roi".into(), pair.clone(), pearson(x, y, rc.roi.as_ref())?));
            }
            if rc.metrics.iter().any(|m| m == "dcor_roi") {
                values.push((
                    "dcor_roi".into(),
                    pair.clone(),
                    distance_correlation(x, y, rc.roi.as_ref(), rc.dcor_max_points, rc.dcor_seed)?,
                ));
            }
            if rc.metrics.iter().any(|m| m == "pearson_full") {
                values.push(("pearson_full".into(), pair.clone(), pearson(x, y, None)?));
            }
            if rc.metrics.iter().any(|m| m == "dcor_full") {
                values.push((
                    "dcor_full".into(),
                    pair.clone(),
                    distance_correlation(x, y, None, rc.dcor_max_points, rc.dcor_seed)?,
                ));
            }
        }
    }
    Ok(CellResult { values })
}

fn fmt_alpha(a: f64) -> String {
    format!("{a}").replace('.', "p")
}

fn aggregate_rows(config: &BenchConfig, methods: &[&str], per_cell: &[CellResult]) -> Vec<ReportRow> {
    let per_seed = config.seeds.len();
    let per_alpha = config.alphas.len() * per_seed;
    // (kind, target, method, alpha) -> per-seed values.
    let mut map: std::collections::BTreeMap<(String, String, String, u64), Vec<f64>> =
        std::collections::BTreeMap::new();
    for (cell, result) in per_cell.iter().enumerate() {
        let method = methods[cell / per_alpha];
        let alpha = config.alphas[(cell % per_alpha) / per_seed];
        for (kind, target, value) in &result.values {
            map.entry((kind.clone(), target.clone(), method.to_string(), alpha.to_bits()))
                .or_insert_with(|| Vec::with_capacity(per_seed))
                .push(*value);
        }
    }
    let mut rows: Vec<ReportRow> = map
        .into_iter()
        .map(|((kind, target, method, alpha_bits), values)| {
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let stddev = if values.len() > 1 {
                (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            ReportRow {
                kind,
                target,
                method,
                alpha: f64::from_bits(alpha_bits),
                seed_count: values.len(),
                mean,
                stddev,
                values,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        (&a.kind, &a.target, &a.method)
            .cmp(&(&b.kind, &b.target, &b.method))
            .then(a.alpha.total_cmp(&b.alpha))
    });
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldio::{Background, Band, FeatureRegion, GridDims, VariableSpec};

    fn tiny_config() -> BenchConfig {
        BenchConfig {
            version: 1,
            synthetic: Some(SyntheticSpec {
                dims: GridDims::new(12, 12, 12).unwrap(),
                variables: vec![
                    VariableSpec {
                        name: "u".into(),
                        background: Background::Levels {
                            lo: 0.0,
                            hi: 1.0,
                            levels: 4,
                        },
                    },
                    VariableSpec {
                        name: "v".into(),
                        background: Background::Levels {
                            lo: 0.0,
                            hi: 1.0,
                            levels: 4,
                        },
                    },
                ],
                features: vec![FeatureRegion {
                    center: [6.0, 6.0, 6.0],
                    radii: [3.0, 3.0, 3.0],
                    bands: vec![
                        Band {
                            variable: "u".into(),
                            lo: 1.2,
                            hi: 1.25,
                            ripples: 0.0,
                        },
                        Band {
                            variable: "v".into(),
                            lo: 1.2,
                            hi: 1.25,
                            ripples: 0.0,
                        },
                    ],
                }],
            }),
            dataset: None,
            synth_seed: 5,
            variables: vec!["u".into(), "v".into()],
            bins: 16,
            alphas: vec![0.2],
            seeds: vec![1, 2],
            queries: vec![NamedQuery {
                name: "feature".into(),
                expr: "u > 1.1 AND v > 1.1".into(),
            }],
            reconstruction: Some(ReconConfig {
                variables: vec!["u".into(), "v".into()],
                mode: "idw".into(),
                slice_axis: Axis::Z,
                slice_index: 6,
                roi: Some(RegionOfInterest::new([3, 3, 3], [9, 9, 9]).unwrap()),
                metrics: vec![
                    "ssim".into(),
                    "mse_slice".into(),
                    "mse_roi".into(),
                    "pearson_roi".into(),
                    "dcor_roi".into(),
                ],
                dcor_max_points: 512,
                dcor_seed: DCOR_DEFAULT_SEED,
            }),
        }
    }

    #[test]
    fn pipeline_runs_and_is_deterministic_across_threads() {
        let cfg = tiny_config();
        let r1 = run_pipeline(&cfg, &RunOptions { threads: 1, out_dir: None }).unwrap();
        let r3 = run_pipeline(&cfg, &RunOptions { threads: 3, out_dir: None }).unwrap();
        assert_eq!(r1.to_json().unwrap(), r3.to_json().unwrap());
        assert!(!r1.rows.is_empty());
        // The feature query must favor the guided sampler even at toy scale.
        let j = |method: &str| {
            r1.rows
                .iter()
                .find(|r| r.kind == "jaccard" && r.method == method)
                .unwrap()
                .mean
        };
        assert!(j("pmi") > j("random"), "pmi {} vs random {}", j("pmi"), j("random"));
    }

    #[test]
    fn config_schema_violations() {
        let mut cfg = tiny_config();
        cfg.seeds.clear();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));

        let mut cfg = tiny_config();
        cfg.version = 2;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));

        let mut cfg = tiny_config();
        cfg.dataset = Some("also.json".into());
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));

        let bad_json = r#"{"version": 1, "unknown_field": 3}"#;
        assert!(matches!(
            BenchConfig::from_json(bad_json),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn artifacts_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny_config();
        cfg.reconstruction = None;
        let opts = RunOptions {
            threads: 2,
            out_dir: Some(dir.path().to_path_buf()),
        };
        run_pipeline(&cfg, &opts).unwrap();
        assert!(dir.path().join("report.json").exists());
        assert!(dir.path().join("report.md").exists());
        let n_artifacts = std::fs::read_dir(dir.path().join("artifacts")).unwrap().count();
        assert_eq!(n_artifacts, 2 * 1 * 2, "method x alpha x seed point sets");
        // Reports must not depend on where artifacts went.
        let plain = run_pipeline(&cfg, &RunOptions::default()).unwrap();
        let written = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
        assert_eq!(plain.to_json().unwrap(), written);
    }
}
