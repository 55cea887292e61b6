//! Reconstruction and sampling quality metrics.
//!
//! Rendering is replaced by a deterministic rasterization: a grid slice is
//! value-mapped to a grayscale image in [0, 1] using a caller-supplied value
//! range (both images of a comparison must share it, conventionally the raw
//! data's range). On those images this module computes mean local SSIM and
//! MSE; on fields it computes MSE, Pearson correlation and Székely distance
//! correlation, optionally restricted to an axis-aligned region of interest.
//!
//! SSIM uses 8x8 non-overlapping patches (trailing partial patches are
//! dropped), population moments, and stabilization constants
//! C1 = (0.01 L)^2, C2 = (0.03 L)^2, C3 = C2 / 2 with L = 1, combining
//! luminance, contrast and structure with unit exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldio::{Axis, Field, GridDims};
use crate::rng::{SplitMix64, STREAM_DCOR_SUBSAMPLE};

/// SSIM patch edge length.
pub const SSIM_WINDOW: usize = 8;
/// Cap on points entering the quadratic distance-correlation computation.
pub const DCOR_MAX_POINTS: usize = 4096;
/// Seed for the deterministic distance-correlation subsample.
pub const DCOR_DEFAULT_SEED: u64 = 0x0dc0;

const SSIM_C1: f64 = 0.01 * 0.01;
const SSIM_C2: f64 = 0.03 * 0.03;
const SSIM_C3: f64 = SSIM_C2 / 2.0;

/// A grayscale image with pixels in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f64>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(RasterImage {
            width,
            height,
            pixels,
        })
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }
}

/// Extract a 2-D slice of a field and map values linearly onto [0, 1],
/// clamping values outside `value_range`.
///
/// Image layout: slicing along Z gives width = nx, height = ny with rows
/// indexed by y; along Y width = nx, height = nz; along X width = ny,
/// height = nz. Row 0 is the lowest coordinate.
pub fn rasterize_slice(
    field: &Field,
    axis: Axis,
    index: u32,
    value_range: (f64, f64),
) -> Result<RasterImage> {
    let dims = field.dims();
    let (lo, hi) = value_range;
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "value range [{lo}, {hi}] must have lo < hi"
        )));
    }
    let len = dims.len_along(axis);
    if index >= len {
        return Err(Error::IndexOutOfRange {
            index: index as usize,
            len: len as usize,
        });
    }
    let (width, height) = match axis {
        Axis::X => (dims.ny() as usize, dims.nz() as usize),
        Axis::Y => (dims.nx() as usize, dims.nz() as usize),
        Axis::Z => (dims.nx() as usize, dims.ny() as usize),
    };
    let mut pixels = Vec::with_capacity(width * height);
    for v in 0..height as u32 {
        for u in 0..width as u32 {
            let (i, j, k) = match axis {
                Axis::X => (index, u, v),
                Axis::Y => (u, index, v),
                Axis::Z => (u, v, index),
            };
            let raw = field.value_at(dims.linear(i, j, k));
            pixels.push(((raw - lo) / (hi - lo)).clamp(0.0, 1.0));
        }
    }
    RasterImage::new(width, height, pixels)
}

/// Mean local structural similarity of two images of equal size.
pub fn ssim(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    if a.width < SSIM_WINDOW || a.height < SSIM_WINDOW {
        return Err(Error::TooSmall {
            width: a.width,
            height: a.height,
            min: SSIM_WINDOW,
        });
    }
    let px = a.width / SSIM_WINDOW;
    let py = a.height / SSIM_WINDOW;
    let m = (SSIM_WINDOW * SSIM_WINDOW) as f64;
    let mut sum = 0.0;
    for ty in 0..py {
        for tx in 0..px {
            let mut mean_a = 0.0;
            let mut mean_b = 0.0;
            for y in 0..SSIM_WINDOW {
                for x in 0..SSIM_WINDOW {
                    mean_a += a.pixel(tx * SSIM_WINDOW + x, ty * SSIM_WINDOW + y);
                    mean_b += b.pixel(tx * SSIM_WINDOW + x, ty * SSIM_WINDOW + y);
                }
            }
            mean_a /= m;
            mean_b /= m;
            let mut var_a = 0.0;
            let mut var_b = 0.0;
            let mut cov = 0.0;
            for y in 0..SSIM_WINDOW {
                for x in 0..SSIM_WINDOW {
                    let da = a.pixel(tx * SSIM_WINDOW + x, ty * SSIM_WINDOW + y) - mean_a;
                    let db = b.pixel(tx * SSIM_WINDOW + x, ty * SSIM_WINDOW + y) - mean_b;
                    var_a += da * da;
                    var_b += db * db;
                    cov += da * db;
                }
            }
            var_a /= m;
            var_b /= m;
            cov /= m;
            let sd_a = var_a.sqrt();
            let sd_b = var_b.sqrt();
            let luminance = (2.0 * mean_a * mean_b + SSIM_C1) / (mean_a * mean_a + mean_b * mean_b + SSIM_C1);
            let contrast = (2.0 * sd_a * sd_b + SSIM_C2) / (var_a + var_b + SSIM_C2);
            let structure = (cov + SSIM_C3) / (sd_a * sd_b + SSIM_C3);
            sum += luminance * contrast * structure;
        }
    }
    Ok(sum / (px * py) as f64)
}

/// Mean squared difference of two images.
pub fn mse(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    Ok(mse_slices(&a.pixels, &b.pixels))
}

/// Mean squared difference of two fields on the same grid, optionally within
/// a region of interest.
pub fn mse_fields(a: &Field, b: &Field, roi: Option<&RegionOfInterest>) -> Result<f64> {
    let (xs, ys) = masked_pair(a, b, roi)?;
    Ok(mse_slices(&xs, &ys))
}

fn mse_slices(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum::<f64>()
        / n
}

/// Axis-aligned box of grid coordinates, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionOfInterest {
    pub lo: [u32; 3],
    pub hi: [u32; 3],
}

impl RegionOfInterest {
    pub fn new(lo: [u32; 3], hi: [u32; 3]) -> Result<Self> {
        for a in 0..3 {
            if lo[a] > hi[a] {
                return Err(Error::InvalidArgument(format!(
                    "ROI lo {lo:?} exceeds hi {hi:?}"
                )));
            }
        }
        Ok(RegionOfInterest { lo, hi })
    }

    /// Parse "x0:x1,y0:y1,z0:z1".
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidArgument(format!(
                "ROI {text:?} must be x0:x1,y0:y1,z0:z1"
            )));
        }
        let mut lo = [0u32; 3];
        let mut hi = [0u32; 3];
        for (a, part) in parts.iter().enumerate() {
            let (s, e) = part.split_once(':').ok_or_else(|| {
                Error::InvalidArgument(format!("ROI range {part:?} must be lo:hi"))
            })?;
            lo[a] = s
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad ROI bound {s:?}")))?;
            hi[a] = e
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad ROI bound {e:?}")))?;
        }
        RegionOfInterest::new(lo, hi)
    }

    pub fn contains(&self, i: u32, j: u32, k: u32) -> bool {
        (self.lo[0]..=self.hi[0]).contains(&i)
            && (self.lo[1]..=self.hi[1]).contains(&j)
            && (self.lo[2]..=self.hi[2]).contains(&k)
    }

    /// Linear indices inside both the box and the grid, ascending.
    pub fn indices(&self, dims: GridDims) -> Vec<u64> {
        let mut out = Vec::new();
        for k in self.lo[2]..=self.hi[2].min(dims.nz() - 1) {
            for j in self.lo[1]..=self.hi[1].min(dims.ny() - 1) {
                for i in self.lo[0]..=self.hi[0].min(dims.nx() - 1) {
                    out.push(dims.linear(i, j, k));
                }
            }
        }
        out
    }
}

fn masked_pair(
    x: &Field,
    y: &Field,
    roi: Option<&RegionOfInterest>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.dims() != y.dims() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {}",
            x.dims(),
            y.dims()
        )));
    }
    match roi {
        None => Ok((x.values().to_vec(), y.values().to_vec())),
        Some(r) => {
            let idx = r.indices(x.dims());
            if idx.is_empty() {
                return Err(Error::EmptyRoi);
            }
            Ok((
                idx.iter().map(|&i| x.value_at(i)).collect(),
                idx.iter().map(|&i| y.value_at(i)).collect(),
            ))
        }
    }
}

/// Pearson correlation of two fields over a region of interest (or the whole
/// grid).
pub fn pearson(x: &Field, y: &Field, roi: Option<&RegionOfInterest>) -> Result<f64> {
    let (xs, ys) = masked_pair(x, y, roi)?;
    if xs.len() < 2 {
        return Err(Error::EmptyRoi);
    }
    pearson_slices(&xs, &ys)
}

fn pearson_slices(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("the first field".into()));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("the second field".into()));
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Székely sample distance correlation of two fields over a region of
/// interest, with deterministic seeded subsampling to `max_points` (the
/// computation is quadratic in the point count). Result in [0, 1].
pub fn distance_correlation(
    x: &Field,
    y: &Field,
    roi: Option<&RegionOfInterest>,
    max_points: usize,
    seed: u64,
) -> Result<f64> {
    let (xs, ys) = masked_pair(x, y, roi)?;
    if xs.len() < 2 {
        return Err(Error::EmptyRoi);
    }
    if max_points < 2 {
        return Err(Error::InvalidArgument("max_points must be >= 2".into()));
    }
    let (xs, ys) = if xs.len() > max_points {
        // Deterministic subsample: partial Fisher-Yates over the index list,
        // then re-sorted so the pair order is canonical.
        let mut order: Vec<u32> = (0..xs.len() as u32).collect();
        let mut rng = SplitMix64::new(crate::rng::point_bits(seed, STREAM_DCOR_SUBSAMPLE, 0));
        for i in 0..max_points {
            let j = i + rng.next_below((order.len() - i) as u64) as usize;
            order.swap(i, j);
        }
        let mut chosen = order[..max_points].to_vec();
        chosen.sort_unstable();
        (
            chosen.iter().map(|&i| xs[i as usize]).collect::<Vec<_>>(),
            chosen.iter().map(|&i| ys[i as usize]).collect::<Vec<_>>(),
        )
    } else {
        (xs, ys)
    };
    Ok(dcor_slices(&xs, &ys))
}

/// Double-centered distance correlation without materializing the n x n
/// matrices: two passes, O(n) memory.
fn dcor_slices(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    let nf = n as f64;
    let mut row_a = vec![0.0f64; n];
    let mut row_b = vec![0.0f64; n];
    for j in 0..n {
        let mut sa = 0.0;
        let mut sb = 0.0;
        for k in 0..n {
            sa += (xs[j] - xs[k]).abs();
            sb += (ys[j] - ys[k]).abs();
        }
        row_a[j] = sa / nf;
        row_b[j] = sb / nf;
    }
    let grand_a = row_a.iter().sum::<f64>() / nf;
    let grand_b = row_b.iter().sum::<f64>() / nf;

    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for j in 0..n {
        for k in 0..n {
            let a = (xs[j] - xs[k]).abs() - row_a[j] - row_a[k] + grand_a;
            let b = (ys[j] - ys[k]).abs() - row_b[j] - row_b[k] + grand_b;
            cov += a * b;
            var_a += a * a;
            var_b += b * b;
        }
    }
    if var_a <= 0.0 || var_b <= 0.0 {
        return 0.0;
    }
    let r2 = cov / (var_a * var_b).sqrt();
    r2.max(0.0).sqrt().min(1.0)
}
