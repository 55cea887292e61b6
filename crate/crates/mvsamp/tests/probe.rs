// Temporary diagnostics for calibrating the acceptance dataset. Not a test
// of behavior; prints the numbers the acceptance thresholds rely on.

use mvsamp::evaluate::{
    distance_correlation, mse, mse_fields, pearson, rasterize_slice, ssim, RegionOfInterest,
    DCOR_DEFAULT_SEED,
};
use mvsamp::fieldio::{
    make_synthetic, Axis, Background, Band, FeatureRegion, GridDims, SyntheticSpec, VariableSpec,
};
use mvsamp::histogram::build_joint;
use mvsamp::pointinfo::pmi_table;
use mvsamp::reconstruct::{reconstruct, ReconstructionMode};
use mvsamp::sampler::{build_acceptance, pmi_sample, random_sample, SamplingFraction};

fn recon_spec() -> SyntheticSpec {
    SyntheticSpec {
        dims: GridDims::new(64, 64, 64).unwrap(),
        variables: vec![
            VariableSpec {
                name: "v0".into(),
                background: Background::Harmonic {
                    axis: Axis::X,
                    lo: 0.0,
                    hi: 1.0,
                    wiggle: 0.08,
                    freq: [0.0, 1.1, 0.7],
                },
            },
            VariableSpec {
                name: "v1".into(),
                background: Background::Harmonic {
                    axis: Axis::Y,
                    lo: 0.0,
                    hi: 1.0,
                    wiggle: 0.08,
                    freq: [0.9, 0.0, 0.6],
                },
            },
        ],
        features: vec![FeatureRegion {
            center: [32.0, 32.0, 32.0],
            radii: [12.0, 12.0, 12.0],
            bands: vec![
                Band { variable: "v0".into(), lo: 1.1, hi: 1.4, ripples: 2.5 },
                Band { variable: "v1".into(), lo: 1.2, hi: 1.21, ripples: 0.0 },
            ],
        }],
    }
}

#[test]
fn probe_recon() {
    let spec = recon_spec();
    let mf = make_synthetic(&spec, 1).unwrap();
    let vars = vec!["v0".to_string(), "v1".to_string()];
    let (h, assign) = build_joint(&mf, &vars, 32).unwrap();
    let t = pmi_table(&h).unwrap();
    let (min_raw, max_raw) = t.raw_range();
    println!(
        "recon dataset: feature {} pts, raw range [{min_raw:.3}, {max_raw:.3}], occupied {}",
        spec.feature_indices().len(),
        t.occupied_bins()
    );
    let roi = RegionOfInterest::new([18, 18, 18], [46, 46, 46]).unwrap();

    let raw0 = mf.field("v0").unwrap();
    let raw1 = mf.field("v1").unwrap();
    let range0 = raw0.min_max();
    let raw_img = rasterize_slice(raw0, Axis::Z, 32, range0).unwrap();
    let p_raw = pearson(raw0, raw1, Some(&roi)).unwrap();
    let d_raw = distance_correlation(raw0, raw1, Some(&roi), 4096, DCOR_DEFAULT_SEED).unwrap();
    println!("raw ROI pearson {p_raw:.4} dcor {d_raw:.4}");

    for alpha_v in [0.01, 0.05] {
        let alpha = SamplingFraction::new(alpha_v).unwrap();
        let acc = build_acceptance(&t, &h, alpha).unwrap();
        println!("  alpha {alpha_v}: gamma {:.4}", acc.gamma);
        let mut ssim_wins = 0;
        let mut mse_slice_wins = 0;
        let mut mse_roi_wins = 0;
        let mut pear_wins = 0;
        let mut dcor_wins = 0;
        let seeds: Vec<u64> = (101..111).collect();
        let t0 = std::time::Instant::now();
        for &seed in &seeds {
            let ps_p = pmi_sample(&mf, &assign, &acc, seed).unwrap();
            let ps_r = random_sample(&mf, alpha, seed);
            let rec_p0 = reconstruct(&ps_p, "v0", ReconstructionMode::DelaunayLinear).unwrap();
            let rec_r0 = reconstruct(&ps_r, "v0", ReconstructionMode::DelaunayLinear).unwrap();

            let img_p = rasterize_slice(&rec_p0, Axis::Z, 32, range0).unwrap();
            let img_r = rasterize_slice(&rec_r0, Axis::Z, 32, range0).unwrap();
            let ss_p = ssim(&raw_img, &img_p).unwrap();
            let ss_r = ssim(&raw_img, &img_r).unwrap();
            let ms_p = mse(&raw_img, &img_p).unwrap();
            let ms_r = mse(&raw_img, &img_r).unwrap();
            let mr_p = mse_fields(raw0, &rec_p0, Some(&roi)).unwrap();
            let mr_r = mse_fields(raw0, &rec_r0, Some(&roi)).unwrap();
            if ss_p > ss_r {
                ssim_wins += 1;
            }
            if ms_p < ms_r {
                mse_slice_wins += 1;
            }
            if mr_p < mr_r {
                mse_roi_wins += 1;
            }

            if alpha_v == 0.05 {
                let rec_p1 = reconstruct(&ps_p, "v1", ReconstructionMode::DelaunayLinear).unwrap();
                let rec_r1 = reconstruct(&ps_r, "v1", ReconstructionMode::DelaunayLinear).unwrap();
                let pp = pearson(&rec_p0, &rec_p1, Some(&roi)).unwrap();
                let pr = pearson(&rec_r0, &rec_r1, Some(&roi)).unwrap();
                let dp =
                    distance_correlation(&rec_p0, &rec_p1, Some(&roi), 4096, DCOR_DEFAULT_SEED)
                        .unwrap();
                let dr =
                    distance_correlation(&rec_r0, &rec_r1, Some(&roi), 4096, DCOR_DEFAULT_SEED)
                        .unwrap();
                if (pp - p_raw).abs() <= (pr - p_raw).abs() {
                    pear_wins += 1;
                }
                if (dp - d_raw).abs() <= (dr - d_raw).abs() {
                    dcor_wins += 1;
                }
                println!(
                    "  alpha 0.05 seed {seed}: pearson p={pp:.4} r={pr:.4} raw={p_raw:.4}; dcor p={dp:.4} r={dr:.4} raw={d_raw:.4}"
                );
            }
            if seed == 101 {
                println!(
                    "  alpha {alpha_v} seed {seed}: ssim p={ss_p:.4} r={ss_r:.4}; mse_slice p={ms_p:.5} r={ms_r:.5}; mse_roi p={mr_p:.5} r={mr_r:.5}"
                );
            }
        }
        println!(
            "alpha {alpha_v}: ssim {ssim_wins}/10 mse_slice {mse_slice_wins}/10 mse_roi {mse_roi_wins}/10 pearson {pear_wins}/10 dcor {dcor_wins}/10 ({:.1}s)",
            t0.elapsed().as_secs_f64()
        );
    }
}
