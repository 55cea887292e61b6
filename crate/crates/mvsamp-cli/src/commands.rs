//! Subcommand implementations: argument parsing glue around the library.

use std::fs;
use std::io::Write;
use std::path::Path;

use mvsamp::bench::{run_pipeline, BenchConfig, RunOptions};
use mvsamp::error::{Error, Result};
use mvsamp::evaluate::{
    distance_correlation, mse, mse_fields, pearson, rasterize_slice, ssim, RasterImage,
    RegionOfInterest, DCOR_DEFAULT_SEED, DCOR_MAX_POINTS,
};
use mvsamp::fieldio::{make_synthetic, Axis, Field, MultiField, SampledPointSet, SyntheticSpec};
use mvsamp::histogram::{build_joint, write_counts_csv};
use mvsamp::pointinfo::{pmi_table_with, write_table_csv, Normalization, TableMode};
use mvsamp::query::{jaccard, parse_query, query_raw, query_sampled, QueryResult};
use mvsamp::reconstruct::{reconstruct, ReconstructionMode};
use mvsamp::sampler::{
    build_acceptance, pmi_sample, pmi_sample_exact, random_sample, SamplingFraction,
};

pub fn synth(spec_path: &Path, seed: u64, out: &Path) -> Result<()> {
    let text = fs::read_to_string(spec_path)?;
    let spec: SyntheticSpec = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: spec_path.to_path_buf(),
        source,
    })?;
    let mf = make_synthetic(&spec, seed)?;
    mf.save_sidecar(out)?;
    println!(
        "wrote {} ({} points, {} variables)",
        out.display(),
        mf.dims().total(),
        mf.fields().len()
    );
    Ok(())
}

fn parse_normalization(name: &str) -> Result<Normalization> {
    match name {
        "minmax" => Ok(Normalization::MinMax),
        "clampmax" => Ok(Normalization::ClampZeroMax),
        other => Err(Error::InvalidArgument(format!(
            "unknown normalization {other:?} (expected minmax or clampmax)"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn sample(
    input: &Path,
    method: &str,
    vars: &[String],
    alpha: f64,
    bins: usize,
    seed: u64,
    exact_quota: bool,
    normalization: &str,
    out: &Path,
) -> Result<()> {
    let mf = MultiField::load_sidecar(input)?;
    let alpha = SamplingFraction::new(alpha)?;
    let ps = match method {
        "random" => random_sample(&mf, alpha, seed),
        "pmi" => {
            let (hist, assign) = build_joint(&mf, vars, bins)?;
            let table = pmi_table_with(&hist, parse_normalization(normalization)?)?;
            let acc = build_acceptance(&table, &hist, alpha)?;
            if exact_quota {
                pmi_sample_exact(&mf, &assign, &acc, seed)?
            } else {
                pmi_sample(&mf, &assign, &acc, seed)?
            }
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown method {other:?} (expected random or pmi)"
            )))
        }
    };
    ps.save(out)?;
    println!(
        "kept {} of {} points ({:.4}%) -> {}",
        ps.len(),
        mf.dims().total(),
        100.0 * ps.len() as f64 / mf.dims().total() as f64,
        out.display()
    );
    Ok(())
}

pub fn pmi_plot(
    input: &Path,
    vars: &[String],
    bins: usize,
    csv: Option<&Path>,
    png: Option<&Path>,
    counts_csv: Option<&Path>,
) -> Result<()> {
    if vars.len() != 2 {
        return Err(Error::InvalidArgument(
            "pmi-plot needs exactly two variables".into(),
        ));
    }
    let mf = MultiField::load_sidecar(input)?;
    let (hist, _) = build_joint(&mf, vars, bins)?;
    let table = pmi_table_with(&hist, Normalization::MinMax)?;
    if let Some(path) = csv {
        let mut w = fs::File::create(path)?;
        write_table_csv(&table, &mut w)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = counts_csv {
        let mut w = fs::File::create(path)?;
        write_counts_csv(&hist, &mut w)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = png {
        // Row = y bin (increasing downward), column = x bin; brightness is
        // the normalized information value.
        let bx = table.axes()[0].bin_count as u32;
        let by = table.axes()[1].bin_count as u32;
        let mut img = image::GrayImage::new(bx, by);
        for y in 0..by {
            for x in 0..bx {
                let flat = x as u64 * by as u64 + y as u64;
                let v = table.normalized(flat);
                img.put_pixel(x, y, image::Luma([(v * 255.0).round() as u8]));
            }
        }
        img.save(path)
            .map_err(|e| Error::InvalidArgument(format!("PNG write failed: {e}")))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn pmi_field_cmd(
    input: &Path,
    vars: &[String],
    bins: usize,
    mode: &str,
    out: &Path,
    sidecar: Option<&Path>,
) -> Result<()> {
    let mf = MultiField::load_sidecar(input)?;
    let (hist, assign) = build_joint(&mf, vars, bins)?;
    let table = pmi_table_with(&hist, Normalization::MinMax)?;
    let mode = match mode {
        "raw" => TableMode::Raw,
        "normalized" => TableMode::Normalized,
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown mode {other:?} (expected raw or normalized)"
            )))
        }
    };
    let field = mvsamp::pointinfo::pmi_field(&table, &assign, mf.dims(), mode)?;
    field.save_brick(out)?;
    println!("wrote {}", out.display());
    if let Some(side) = sidecar {
        let named = Field::new("pointinfo", mf.dims(), field.values().to_vec())?;
        let single = MultiField::new(vec![named])?;
        // save_sidecar writes the brick next to the sidecar under the
        // variable's name; keep the explicit brick as well.
        single.save_sidecar(side)?;
        println!("wrote {}", side.display());
    }
    Ok(())
}

/// Load either a dataset sidecar or a point set, sniffing the MVSP magic.
enum QueryInput {
    Raw(MultiField),
    Sampled(SampledPointSet),
}

fn load_query_input(path: &Path) -> Result<QueryInput> {
    let mut head = [0u8; 4];
    {
        use std::io::Read;
        let mut f = fs::File::open(path)?;
        let _ = f.read(&mut head)?;
    }
    if &head == b"MVSP" {
        Ok(QueryInput::Sampled(SampledPointSet::load(path)?))
    } else {
        Ok(QueryInput::Raw(MultiField::load_sidecar(path)?))
    }
}

pub fn query(
    text: &str,
    input: &Path,
    ground_truth: Option<&Path>,
    out: Option<&Path>,
) -> Result<()> {
    let parsed = parse_query(text)?;
    for w in &parsed.warnings {
        log::warn!("{w}");
    }
    println!("query: {}", parsed.expr);
    let result: QueryResult = match load_query_input(input)? {
        QueryInput::Raw(mf) => query_raw(&mf, &parsed.expr)?,
        QueryInput::Sampled(ps) => query_sampled(&ps, &parsed.expr)?,
    };
    println!("matched {} points", result.len());

    if let Some(gt_path) = ground_truth {
        let gt = MultiField::load_sidecar(gt_path)?;
        let raw = query_raw(&gt, &parsed.expr)?;
        if raw.is_empty() {
            log::warn!("ground truth result is empty; Jaccard is 1 only for an empty result");
        }
        let j = jaccard(&raw, &result)?;
        println!("ground truth: {} points, jaccard: {:.6}", raw.len(), j);
    }

    if let Some(path) = out {
        if path.extension().map(|e| e == "csv").unwrap_or(false) {
            let mut w = std::io::BufWriter::new(fs::File::create(path)?);
            writeln!(w, "linear_index")?;
            for idx in &result.indices {
                writeln!(w, "{idx}")?;
            }
        } else {
            let mut bytes = Vec::with_capacity(result.indices.len() * 8);
            for idx in &result.indices {
                bytes.extend_from_slice(&idx.to_le_bytes());
            }
            fs::write(path, bytes)?;
        }
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn reconstruct_cmd(
    input: &Path,
    var: &str,
    mode: &str,
    idw_neighbors: usize,
    idw_power: f64,
    out: &Path,
    sidecar: Option<&Path>,
) -> Result<()> {
    let ps = SampledPointSet::load(input)?;
    let mode = match mode {
        "idw" => ReconstructionMode::ShepardIdw {
            neighbors: idw_neighbors,
            power: idw_power,
        },
        other => other.parse()?,
    };
    let field = reconstruct(&ps, var, mode)?;
    field.save_brick(out)?;
    println!(
        "reconstructed {:?} from {} samples onto {} -> {}",
        var,
        ps.len(),
        ps.dims(),
        out.display()
    );
    if let Some(side) = sidecar {
        let single = MultiField::new(vec![field])?;
        single.save_sidecar(side)?;
        println!("wrote {}", side.display());
    }
    Ok(())
}

fn parse_slice(text: &str) -> Result<(Axis, u32)> {
    let (axis, idx) = text.split_once(':').ok_or_else(|| {
        Error::InvalidArgument(format!("slice {text:?} must be axis:index, e.g. z:25"))
    })?;
    let axis: Axis = axis.parse()?;
    let idx: u32 = idx
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad slice index {idx:?}")))?;
    Ok((axis, idx))
}

fn save_png(img: &RasterImage, path: &Path) -> Result<()> {
    let mut out = image::GrayImage::new(img.width as u32, img.height as u32);
    for y in 0..img.height {
        for x in 0..img.width {
            let v = (img.pixel(x, y) * 255.0).round() as u8;
            out.put_pixel(x as u32, y as u32, image::Luma([v]));
        }
    }
    out.save(path)
        .map_err(|e| Error::InvalidArgument(format!("PNG write failed: {e}")))?;
    Ok(())
}

pub fn eval(
    raw_path: &Path,
    recon_args: &[String],
    metrics: &[String],
    slice: Option<&str>,
    roi: Option<&str>,
    png_dir: Option<&Path>,
    out: Option<&Path>,
) -> Result<()> {
    if recon_args.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one --recon NAME=PATH is required".into(),
        ));
    }
    for m in metrics {
        if !["ssim", "mse", "pearson", "dcor"].contains(&m.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "unknown metric {m:?} (expected ssim, mse, pearson, dcor)"
            )));
        }
    }
    let raw = MultiField::load_sidecar(raw_path)?;
    let roi = roi.map(RegionOfInterest::parse).transpose()?;

    let mut recons: Vec<(String, Field)> = Vec::new();
    for arg in recon_args {
        let (name, path) = arg.split_once('=').ok_or_else(|| {
            Error::InvalidArgument(format!("--recon {arg:?} must be NAME=PATH"))
        })?;
        let dims = raw.dims();
        recons.push((name.to_string(), Field::load_brick(path, dims, name)?));
    }

    let mut report = serde_json::Map::new();
    let slice_parsed = slice.map(parse_slice).transpose()?;
    if let Some(dir) = png_dir {
        fs::create_dir_all(dir)?;
    }

    for (name, rec) in &recons {
        let raw_field = raw.field(name)?;
        let mut entry = serde_json::Map::new();
        if metrics.iter().any(|m| m == "ssim" || m == "mse") {
            let (axis, idx) = slice_parsed.ok_or_else(|| {
                Error::InvalidArgument("ssim/mse need --slice axis:index".into())
            })?;
            let range = raw_field.min_max();
            let raw_img = rasterize_slice(raw_field, axis, idx, range)?;
            let rec_img = rasterize_slice(rec, axis, idx, range)?;
            if metrics.iter().any(|m| m == "ssim") {
                entry.insert("ssim".into(), ssim(&raw_img, &rec_img)?.into());
            }
            if metrics.iter().any(|m| m == "mse") {
                entry.insert("mse_slice".into(), mse(&raw_img, &rec_img)?.into());
                entry.insert(
                    "mse_field".into(),
                    mse_fields(raw_field, rec, roi.as_ref())?.into(),
                );
            }
            if let Some(dir) = png_dir {
                save_png(&raw_img, &dir.join(format!("{name}_raw.png")))?;
                save_png(&rec_img, &dir.join(format!("{name}_recon.png")))?;
            }
        }
        report.insert(name.clone(), entry.into());
    }

    if metrics.iter().any(|m| m == "pearson" || m == "dcor") {
        let mut entry = serde_json::Map::new();
        if recons.len() >= 2 {
            // Correlation between the first two variables, reconstructed vs
            // raw.
            let (xn, xf) = &recons[0];
            let (yn, yf) = &recons[1];
            let rx = raw.field(xn)?;
            let ry = raw.field(yn)?;
            entry.insert("pair".into(), format!("{xn}~{yn}").into());
            if metrics.iter().any(|m| m == "pearson") {
                entry.insert("pearson_recon".into(), pearson(xf, yf, roi.as_ref())?.into());
                entry.insert("pearson_raw".into(), pearson(rx, ry, roi.as_ref())?.into());
            }
            if metrics.iter().any(|m| m == "dcor") {
                entry.insert(
                    "dcor_recon".into(),
                    distance_correlation(xf, yf, roi.as_ref(), DCOR_MAX_POINTS, DCOR_DEFAULT_SEED)?
                        .into(),
                );
                entry.insert(
                    "dcor_raw".into(),
                    distance_correlation(rx, ry, roi.as_ref(), DCOR_MAX_POINTS, DCOR_DEFAULT_SEED)?
                        .into(),
                );
            }
        } else {
            // Single variable: how well the reconstruction tracks the raw
            // field itself.
            let (name, rec) = &recons[0];
            let raw_field = raw.field(name)?;
            if metrics.iter().any(|m| m == "pearson") {
                entry.insert(
                    "pearson_recon_vs_raw".into(),
                    pearson(raw_field, rec, roi.as_ref())?.into(),
                );
            }
            if metrics.iter().any(|m| m == "dcor") {
                entry.insert(
                    "dcor_recon_vs_raw".into(),
                    distance_correlation(
                        raw_field,
                        rec,
                        roi.as_ref(),
                        DCOR_MAX_POINTS,
                        DCOR_DEFAULT_SEED,
                    )?
                    .into(),
                );
            }
        }
        report.insert("correlation".into(), entry.into());
    }

    let text = serde_json::to_string_pretty(&serde_json::Value::Object(report))
        .map_err(|e| Error::Internal(e.to_string()))?;
    match out {
        Some(path) => {
            fs::write(path, &text)?;
            println!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

pub fn bench(config_path: &Path, out_dir: &Path, threads: usize) -> Result<()> {
    let text = fs::read_to_string(config_path)?;
    let config = BenchConfig::from_json(&text)?;
    let options = RunOptions {
        threads,
        out_dir: Some(out_dir.to_path_buf()),
    };
    let report = run_pipeline(&config, &options)?;
    println!("{}", report.to_markdown());
    println!("report written to {}", out_dir.join("report.json").display());
    Ok(())
}
