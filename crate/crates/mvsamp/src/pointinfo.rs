//! Pointwise information measures over histogram bins.
//!
//! For a bin `b` with joint probability `p(b)` and per-axis marginal
//! probabilities `p_k(b_k)`, the pointwise measure is the natural-log ratio
//!
//! ```text
//! raw(b) = ln( p(b) / (p_1(b_1) * ... * p_d(b_d)) )
//! ```
//!
//! which is pointwise mutual information for two variables and its specific-
//! correlation generalization for more. Positive values mean the tuple
//! co-occurs more often than independence predicts. Empty bins get raw value
//! 0 rather than negative infinity; no grid point ever lands in one.
//!
//! Aggregates over the table give mutual information (d = 2) and total
//! correlation (any d): the probability-weighted sum of raw values over
//! occupied bins. Both serve as consistency oracles for the table itself.

use crate::error::{Error, Result};
use crate::fieldio::{Field, GridDims};
use crate::histogram::{AxisBinning, BinAssignment, BinStore, JointHistogram};

/// How raw log-ratios are mapped onto [0, 1] acceptance weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Min–max over occupied bins: `(raw - min) / (max - min)`. Preserves the
    /// full ranking; anti-associated bins keep a small nonzero weight.
    #[default]
    MinMax,
    /// Clamp negatives to zero, then divide by the maximum. Anti-associated
    /// bins drop to weight 0.
    ClampZeroMax,
}

/// Which table column a lookup reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableMode {
    Raw,
    Normalized,
}

/// Per-bin pointwise information, raw and normalized.
#[derive(Debug, Clone)]
pub struct PointInfoTable {
    axes: Vec<AxisBinning>,
    flat_bin_count: u64,
    raw: BinStore<f64>,
    normalized: BinStore<f64>,
    occupied: u64,
    min_raw: f64,
    max_raw: f64,
    /// Occupied bin with the largest raw value (lowest flat index on ties).
    argmax: u64,
}

impl PointInfoTable {
    pub fn axes(&self) -> &[AxisBinning] {
        &self.axes
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn flat_bin_count(&self) -> u64 {
        self.flat_bin_count
    }

    pub fn occupied_bins(&self) -> u64 {
        self.occupied
    }

    /// Raw log-ratio of a bin; 0 for empty bins.
    pub fn raw(&self, flat: u64) -> f64 {
        self.raw.get(flat)
    }

    /// Normalized value in [0, 1]; 0 for empty bins.
    pub fn normalized(&self, flat: u64) -> f64 {
        self.normalized.get(flat)
    }

    /// Extremes of the raw values over occupied bins.
    pub fn raw_range(&self) -> (f64, f64) {
        (self.min_raw, self.max_raw)
    }

    /// Flat index of the occupied bin with the maximum raw value.
    pub fn argmax_raw(&self) -> u64 {
        self.argmax
    }

    /// Value at the lookup mode.
    pub fn value(&self, flat: u64, mode: TableMode) -> f64 {
        match mode {
            TableMode::Raw => self.raw(flat),
            TableMode::Normalized => self.normalized(flat),
        }
    }

    /// Test-only: craft a table with explicit normalized weights.
    #[cfg(test)]
    pub(crate) fn with_normalized_for_tests(
        axes: Vec<AxisBinning>,
        entries: Vec<(u64, f64)>,
    ) -> Self {
        let flat_bin_count = axes.iter().map(|a| a.bin_count as u64).product();
        let occupied = entries.len() as u64;
        let argmax = entries
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|&(f, _)| f)
            .unwrap_or(0);
        PointInfoTable {
            axes,
            flat_bin_count,
            raw: BinStore::Sparse(entries.clone()),
            normalized: BinStore::Sparse(entries),
            occupied,
            min_raw: 0.0,
            max_raw: 0.0,
            argmax,
        }
    }
}

/// Compute the pointwise information table with the default min–max
/// normalization.
pub fn pmi_table(h: &JointHistogram) -> Result<PointInfoTable> {
    pmi_table_with(h, Normalization::MinMax)
}

/// Compute the pointwise information table with an explicit normalization.
pub fn pmi_table_with(h: &JointHistogram, norm: Normalization) -> Result<PointInfoTable> {
    let probs = h.probabilities()?;
    let d = h.dims();

    // Strides to decode axis coordinates from a flat index.
    let mut strides = vec![1u64; d];
    for k in (0..d.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * h.axes()[k + 1].bin_count as u64;
    }

    let mut entries: Vec<(u64, f64)> = Vec::new();
    let mut min_raw = f64::INFINITY;
    let mut max_raw = f64::NEG_INFINITY;
    let mut argmax = 0u64;
    for (flat, p) in probs.joint_nonzero() {
        let mut denom = 1.0;
        for k in 0..d {
            let coord = (flat / strides[k]) % h.axes()[k].bin_count as u64;
            denom *= probs.marginals[k][coord as usize];
        }
        let raw = (p / denom).ln();
        if raw > max_raw {
            max_raw = raw;
            argmax = flat;
        }
        if raw < min_raw {
            min_raw = raw;
        }
        entries.push((flat, raw));
    }

    let normalize = |raw: f64| -> f64 {
        match norm {
            Normalization::MinMax => {
                if max_raw > min_raw {
                    (raw - min_raw) / (max_raw - min_raw)
                } else {
                    1.0
                }
            }
            Normalization::ClampZeroMax => {
                if max_raw > 0.0 {
                    (raw.max(0.0)) / max_raw
                } else if raw == max_raw {
                    1.0
                } else {
                    0.0
                }
            }
        }
    };

    let flat_bins = h.flat_bin_count();
    let occupied = entries.len() as u64;
    let (raw_store, norm_store) = if flat_bins <= (1 << 21) {
        let mut raw = vec![0.0; flat_bins as usize];
        let mut normalized = vec![0.0; flat_bins as usize];
        for &(flat, r) in &entries {
            raw[flat as usize] = r;
            normalized[flat as usize] = normalize(r);
        }
        (BinStore::Dense(raw), BinStore::Dense(normalized))
    } else {
        let raw = entries.clone();
        let normalized = entries.iter().map(|&(f, r)| (f, normalize(r))).collect();
        (BinStore::Sparse(raw), BinStore::Sparse(normalized))
    };

    Ok(PointInfoTable {
        axes: h.axes().to_vec(),
        flat_bin_count: flat_bins,
        raw: raw_store,
        normalized: norm_store,
        occupied,
        min_raw,
        max_raw,
        argmax,
    })
}

/// Probability-weighted sum of raw log-ratios over occupied bins.
fn weighted_log_ratio_sum(h: &JointHistogram) -> Result<f64> {
    let probs = h.probabilities()?;
    let d = h.dims();
    let mut strides = vec![1u64; d];
    for k in (0..d.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * h.axes()[k + 1].bin_count as u64;
    }
    let mut sum = 0.0;
    for (flat, p) in probs.joint_nonzero() {
        let mut denom = 1.0;
        for k in 0..d {
            let coord = (flat / strides[k]) % h.axes()[k].bin_count as u64;
            denom *= probs.marginals[k][coord as usize];
        }
        sum += p * (p / denom).ln();
    }
    Ok(sum)
}

/// Mutual information of a two-variable histogram: the expected pointwise
/// value. Defined only for d = 2.
pub fn mutual_information(h: &JointHistogram) -> Result<f64> {
    if h.dims() != 2 {
        return Err(Error::WrongDimensionality {
            expected: "exactly 2 variables".into(),
            actual: h.dims(),
        });
    }
    weighted_log_ratio_sum(h)
}

/// Total correlation of a d-variable histogram (d >= 2): total shared
/// information among the variables. Coincides with mutual information at
/// d = 2 and is non-negative up to rounding.
pub fn total_correlation(h: &JointHistogram) -> Result<f64> {
    if h.dims() < 2 {
        return Err(Error::WrongDimensionality {
            expected: "at least 2 variables".into(),
            actual: h.dims(),
        });
    }
    weighted_log_ratio_sum(h)
}

/// Materialize the per-grid-point information field: each point gets its
/// bin's table value.
pub fn pmi_field(
    table: &PointInfoTable,
    assign: &BinAssignment,
    dims: GridDims,
    mode: TableMode,
) -> Result<Field> {
    if assign.len() as u64 != dims.total() {
        return Err(Error::LengthMismatch(format!(
            "assignment covers {} points but grid {dims} has {}",
            assign.len(),
            dims.total()
        )));
    }
    if assign.flat_bin_count() != table.flat_bin_count {
        return Err(Error::LengthMismatch(format!(
            "assignment has {} bins but table has {}",
            assign.flat_bin_count(),
            table.flat_bin_count
        )));
    }
    let values: Vec<f64> = assign
        .per_point()
        .iter()
        .map(|&flat| table.value(flat, mode))
        .collect();
    Field::new("pointinfo", dims, values)
}

/// Write the 2-D table as CSV rows `bin_x, bin_y, raw, normalized`.
pub fn write_table_csv(table: &PointInfoTable, mut w: impl std::io::Write) -> Result<()> {
    if table.dims() != 2 {
        return Err(Error::WrongDimensionality {
            expected: "exactly 2 variables".into(),
            actual: table.dims(),
        });
    }
    let by = table.axes[1].bin_count as u64;
    writeln!(w, "bin_x,bin_y,raw,normalized")?;
    for (flat, raw) in table.raw.iter_present() {
        let x = flat / by;
        let y = flat % by;
        writeln!(w, "{x},{y},{raw},{}", table.normalized.get(flat))?;
    }
    Ok(())
}
