//! Joint and marginal distribution estimation with d-dimensional histograms.
//!
//! Each selected variable gets a uniform-width binning spanning its exact data
//! min/max; the joint histogram tallies every grid point into the bin tuple of
//! its values. Counts are stored densely while the total bin count is small
//! and as a sorted sparse table above that, since joint histograms of real
//! fields are mostly empty.

use crate::error::{Error, Result};
use crate::fieldio::MultiField;

/// Per-axis bin count used throughout unless overridden.
pub const DEFAULT_BIN_COUNT: usize = 128;
/// Most variables that can enter one joint histogram.
pub const DEFAULT_MAX_DIMS: usize = 4;
/// Memory budget for per-bin tables: flat bin count x 8 bytes must fit.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;
/// Dense storage is used up to this many flat bins (128^3); sparse above.
const DENSE_BIN_LIMIT: u128 = 1 << 21;

/// Uniform-width binning of one variable's value range.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBinning {
    pub variable: String,
    pub min_value: f64,
    pub max_value: f64,
    pub bin_count: usize,
}

impl AxisBinning {
    pub fn from_values(variable: impl Into<String>, values: &[f64], bin_count: usize) -> Self {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in values {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        AxisBinning {
            variable: variable.into(),
            min_value: lo,
            max_value: hi,
            bin_count,
        }
    }

    pub fn width(&self) -> f64 {
        (self.max_value - self.min_value) / self.bin_count as f64
    }

    /// Bin of a value: `clamp(floor((v - min) / width), 0, B - 1)`.
    /// Values equal to the maximum land in the last bin; a degenerate axis
    /// (min == max) maps everything to bin 0.
    #[inline]
    pub fn bin_of(&self, v: f64) -> usize {
        if self.max_value <= self.min_value {
            return 0;
        }
        let w = self.width();
        let b = ((v - self.min_value) / w).floor();
        if b < 0.0 {
            0
        } else {
            (b as usize).min(self.bin_count - 1)
        }
    }

    /// Value at the center of a bin.
    pub fn center(&self, bin: usize) -> f64 {
        self.min_value + (bin as f64 + 0.5) * self.width()
    }
}

/// Per-bin table keyed by flat (row-major) bin index. Dense for small bin
/// spaces, sparse (sorted by flat index) otherwise. Absent sparse entries
/// read as `T::default()`.
#[derive(Debug, Clone, PartialEq)]
pub enum BinStore<T> {
    Dense(Vec<T>),
    Sparse(Vec<(u64, T)>),
}

impl<T: Copy + Default + PartialEq> BinStore<T> {
    #[inline]
    pub fn get(&self, flat: u64) -> T {
        match self {
            BinStore::Dense(v) => v[flat as usize],
            BinStore::Sparse(entries) => entries
                .binary_search_by_key(&flat, |&(f, _)| f)
                .map(|i| entries[i].1)
                .unwrap_or_default(),
        }
    }

    /// Iterate stored entries that differ from the default, in ascending flat
    /// order. Iteration order is deterministic for both representations.
    pub fn iter_present(&self) -> Box<dyn Iterator<Item = (u64, T)> + '_> {
        match self {
            BinStore::Dense(v) => Box::new(
                v.iter()
                    .enumerate()
                    .filter(|(_, x)| **x != T::default())
                    .map(|(i, x)| (i as u64, *x)),
            ),
            BinStore::Sparse(entries) => Box::new(entries.iter().copied()),
        }
    }
}

/// A d-dimensional histogram over d variables with shared binning metadata.
#[derive(Debug, Clone)]
pub struct JointHistogram {
    axes: Vec<AxisBinning>,
    counts: BinStore<u64>,
    total: u64,
}

impl JointHistogram {
    /// Number of variables (histogram dimensionality).
    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[AxisBinning] {
        &self.axes
    }

    pub fn total_count(&self) -> u64 {
        self.total
    }

    /// Product of per-axis bin counts.
    pub fn flat_bin_count(&self) -> u64 {
        self.axes.iter().map(|a| a.bin_count as u64).product()
    }

    pub fn count(&self, flat: u64) -> u64 {
        self.counts.get(flat)
    }

    /// Occupied bins as `(flat index, count)`, ascending by flat index.
    pub fn nonzero(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter_present()
    }

    /// Row-major flat index of a bin coordinate tuple.
    pub fn flatten(&self, coords: &[usize]) -> u64 {
        debug_assert_eq!(coords.len(), self.axes.len());
        let mut flat = 0u64;
        for (c, a) in coords.iter().zip(&self.axes) {
            debug_assert!(*c < a.bin_count);
            flat = flat * a.bin_count as u64 + *c as u64;
        }
        flat
    }

    /// Bin coordinates of a flat index.
    pub fn unflatten(&self, mut flat: u64) -> Vec<usize> {
        let mut coords = vec![0usize; self.axes.len()];
        for (c, a) in coords.iter_mut().zip(&self.axes).rev() {
            *c = (flat % a.bin_count as u64) as usize;
            flat /= a.bin_count as u64;
        }
        coords
    }

    /// Marginal counts along one axis; sums to the total count.
    pub fn marginal(&self, axis: usize) -> Result<Vec<u64>> {
        if axis >= self.axes.len() {
            return Err(Error::AxisOutOfRange {
                index: axis,
                dims: self.axes.len(),
            });
        }
        // Stride arithmetic avoids materializing coordinates per bin.
        let mut inner: u64 = 1;
        for a in &self.axes[axis + 1..] {
            inner *= a.bin_count as u64;
        }
        let b = self.axes[axis].bin_count as u64;
        let mut out = vec![0u64; b as usize];
        for (flat, count) in self.nonzero() {
            let coord = (flat / inner) % b;
            out[coord as usize] += count;
        }
        Ok(out)
    }

    /// Joint and marginal probabilities.
    pub fn probabilities(&self) -> Result<Probabilities> {
        if self.total == 0 {
            return Err(Error::EmptyHistogram);
        }
        let total = self.total as f64;
        let mut marginals = Vec::with_capacity(self.axes.len());
        for axis in 0..self.axes.len() {
            let m = self.marginal(axis)?;
            marginals.push(m.into_iter().map(|c| c as f64 / total).collect());
        }
        let joint = match &self.counts {
            BinStore::Dense(v) => BinStore::Dense(v.iter().map(|&c| c as f64 / total).collect()),
            BinStore::Sparse(entries) => BinStore::Sparse(
                entries
                    .iter()
                    .map(|&(f, c)| (f, c as f64 / total))
                    .collect(),
            ),
        };
        Ok(Probabilities { joint, marginals })
    }
}

/// Probabilities derived from a histogram: `p = counts / total`.
#[derive(Debug, Clone)]
pub struct Probabilities {
    joint: BinStore<f64>,
    /// One vector per axis, each summing to 1.
    pub marginals: Vec<Vec<f64>>,
}

impl Probabilities {
    pub fn joint(&self, flat: u64) -> f64 {
        self.joint.get(flat)
    }

    pub fn joint_nonzero(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.joint.iter_present()
    }
}

/// Flat bin index of every grid point, row-major over the histogram axes.
#[derive(Debug, Clone)]
pub struct BinAssignment {
    per_point: Vec<u64>,
    flat_bin_count: u64,
}

impl BinAssignment {
    pub fn per_point(&self) -> &[u64] {
        &self.per_point
    }

    pub fn len(&self) -> usize {
        self.per_point.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_point.is_empty()
    }

    pub fn flat_bin_count(&self) -> u64 {
        self.flat_bin_count
    }
}

/// Build the joint histogram of the selected variables with `bins` bins per
/// axis, plus the per-point bin assignment.
pub fn build_joint(
    mf: &MultiField,
    selected: &[String],
    bins: usize,
) -> Result<(JointHistogram, BinAssignment)> {
    build_joint_with_limits(mf, selected, bins, DEFAULT_MAX_DIMS, DEFAULT_MEMORY_BUDGET)
}

/// [`build_joint`] with explicit dimensionality and memory limits.
pub fn build_joint_with_limits(
    mf: &MultiField,
    selected: &[String],
    bins: usize,
    max_dims: usize,
    budget_bytes: u64,
) -> Result<(JointHistogram, BinAssignment)> {
    if selected.is_empty() {
        return Err(Error::InvalidArgument("no variables selected".into()));
    }
    if bins == 0 {
        return Err(Error::InvalidArgument("bin count must be positive".into()));
    }
    if selected.len() > max_dims {
        return Err(Error::DimensionalityTooHigh {
            requested: selected.len(),
            max: max_dims,
        });
    }
    let fields: Vec<_> = selected
        .iter()
        .map(|name| mf.field(name))
        .collect::<Result<_>>()?;

    let flat_bins: u128 = (bins as u128).pow(selected.len() as u32);
    if flat_bins.saturating_mul(8) > budget_bytes as u128 {
        return Err(Error::MemoryBudgetExceeded {
            requested_bins: flat_bins,
            budget_bytes,
        });
    }

    let axes: Vec<AxisBinning> = fields
        .iter()
        .map(|f| AxisBinning::from_values(f.name(), f.values(), bins))
        .collect();

    let n = mf.dims().total() as usize;
    let mut per_point = Vec::with_capacity(n);
    for p in 0..n {
        let mut flat = 0u64;
        for (f, a) in fields.iter().zip(&axes) {
            flat = flat * a.bin_count as u64 + a.bin_of(f.values()[p]) as u64;
        }
        per_point.push(flat);
    }

    let counts = if flat_bins <= DENSE_BIN_LIMIT {
        let mut dense = vec![0u64; flat_bins as usize];
        for &flat in &per_point {
            dense[flat as usize] += 1;
        }
        BinStore::Dense(dense)
    } else {
        let mut map = std::collections::HashMap::new();
        for &flat in &per_point {
            *map.entry(flat).or_insert(0u64) += 1;
        }
        let mut entries: Vec<(u64, u64)> = map.into_iter().collect();
        entries.sort_unstable_by_key(|&(f, _)| f);
        BinStore::Sparse(entries)
    };

    let hist = JointHistogram {
        axes,
        counts,
        total: n as u64,
    };
    let assign = BinAssignment {
        per_point,
        flat_bin_count: hist.flat_bin_count(),
    };
    Ok((hist, assign))
}

/// Build a histogram directly from explicit counts; used by tests and tools
/// that work in bin space.
pub fn from_counts(axes: Vec<AxisBinning>, dense_counts: Vec<u64>) -> Result<JointHistogram> {
    let flat: u64 = axes.iter().map(|a| a.bin_count as u64).product();
    if dense_counts.len() as u64 != flat {
        return Err(Error::LengthMismatch(format!(
            "{} counts for {flat} bins",
            dense_counts.len()
        )));
    }
    let total = dense_counts.iter().sum();
    Ok(JointHistogram {
        axes,
        counts: BinStore::Dense(dense_counts),
        total,
    })
}

/// Write occupied bins as CSV rows `bin coords..., count`.
pub fn write_counts_csv(h: &JointHistogram, mut w: impl std::io::Write) -> Result<()> {
    for a in h.axes() {
        write!(w, "bin_{},", a.variable)?;
    }
    writeln!(w, "count")?;
    for (flat, count) in h.nonzero() {
        for c in h.unflatten(flat) {
            write!(w, "{c},")?;
        }
        writeln!(w, "{count}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldio::{Field, GridDims};
    use proptest::prelude::*;

    pub(crate) fn axis(bins: usize) -> AxisBinning {
        AxisBinning {
            variable: "v".into(),
            min_value: 0.0,
            max_value: 1.0,
            bin_count: bins,
        }
    }

    fn grid_1d(values: Vec<f64>) -> MultiField {
        let dims = GridDims::new(values.len() as u32, 1, 1).unwrap();
        MultiField::new(vec![Field::new("x", dims, values).unwrap()]).unwrap()
    }

    fn grid_2v(x: Vec<f64>, y: Vec<f64>) -> MultiField {
        let dims = GridDims::new(x.len() as u32, 1, 1).unwrap();
        MultiField::new(vec![
            Field::new("x", dims, x).unwrap(),
            Field::new("y", dims, y).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn single_variable_two_bins() {
        let mf = grid_1d(vec![0.0, 0.0, 1.0, 1.0]);
        let (h, _) = build_joint(&mf, &["x".into()], 2).unwrap();
        assert_eq!(h.count(0), 2);
        assert_eq!(h.count(1), 2);
        assert_eq!(h.total_count(), 4);
    }

    #[test]
    fn independent_two_by_two() {
        let mf = grid_2v(vec![0.0, 0.0, 1.0, 1.0], vec![0.0, 1.0, 0.0, 1.0]);
        let (h, assign) = build_joint(&mf, &["x".into(), "y".into()], 2).unwrap();
        for flat in 0..4 {
            assert_eq!(h.count(flat), 1, "bin {flat}");
        }
        assert_eq!(assign.per_point(), &[0, 1, 2, 3]);
    }

    #[test]
    fn marginals_sum_to_total() {
        let axes = vec![axis(2), axis(2)];
        let h = from_counts(axes, vec![2, 0, 0, 2]).unwrap();
        assert_eq!(h.marginal(0).unwrap(), vec![2, 2]);
        assert_eq!(h.marginal(1).unwrap(), vec![2, 2]);
        assert!(matches!(
            h.marginal(2),
            Err(Error::AxisOutOfRange { index: 2, dims: 2 })
        ));
    }

    #[test]
    fn marginal_of_1d_is_identity() {
        let h = from_counts(vec![axis(3)], vec![5, 0, 7]).unwrap();
        assert_eq!(h.marginal(0).unwrap(), vec![5, 0, 7]);
    }

    #[test]
    fn probabilities_normalize() {
        let h = from_counts(vec![axis(2), axis(2)], vec![2, 0, 0, 2]).unwrap();
        let p = h.probabilities().unwrap();
        assert_eq!(p.joint(0), 0.5);
        assert_eq!(p.joint(3), 0.5);
        assert_eq!(p.joint(1), 0.0);
        assert_eq!(p.marginals[0], vec![0.5, 0.5]);
        let sum: f64 = p.joint_nonzero().map(|(_, v)| v).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn max_value_lands_in_last_bin() {
        let a = axis(4);
        assert_eq!(a.bin_of(1.0), 3);
        assert_eq!(a.bin_of(0.0), 0);
        assert_eq!(a.bin_of(0.9999), 3);
    }

    #[test]
    fn degenerate_axis_maps_to_bin_zero() {
        let mf = grid_1d(vec![2.5, 2.5, 2.5]);
        let (h, assign) = build_joint(&mf, &["x".into()], 8).unwrap();
        assert_eq!(h.count(0), 3);
        assert!(assign.per_point().iter().all(|&b| b == 0));
    }

    #[test]
    fn unknown_variable_and_limits() {
        let mf = grid_1d(vec![0.0, 1.0]);
        assert!(matches!(
            build_joint(&mf, &["nope".into()], 2),
            Err(Error::UnknownVariable(_))
        ));
        let many: Vec<String> = (0..5).map(|i| format!("v{i}")).collect();
        assert!(matches!(
            build_joint(&mf, &many, 2),
            Err(Error::DimensionalityTooHigh { requested: 5, max: 4 })
        ));
        assert!(matches!(
            build_joint_with_limits(&mf, &["x".into()], 1 << 30, 4, 1 << 20),
            Err(Error::MemoryBudgetExceeded { .. })
        ));
    }

    #[test]
    fn sparse_storage_above_dense_limit() {
        let mf = grid_2v(vec![0.0, 0.25, 0.5, 1.0], vec![1.0, 0.5, 0.25, 0.0]);
        // 2048^2 = 4M flat bins > dense limit.
        let (h, _) = build_joint(&mf, &["x".into(), "y".into()], 2048).unwrap();
        assert!(matches!(h_counts(&h), BinStore::Sparse(_)));
        assert_eq!(h.total_count(), 4);
        assert_eq!(h.nonzero().map(|(_, c)| c).sum::<u64>(), 4);
    }

    fn h_counts(h: &JointHistogram) -> &BinStore<u64> {
        &h.counts
    }

    proptest! {
        #[test]
        fn assignment_matches_bin_of(
            x in proptest::collection::vec(-10.0f64..10.0, 4..40),
            bins in 1usize..9,
        ) {
            let y: Vec<f64> = x.iter().map(|v| v * 0.5 + 1.0).collect();
            let mf = grid_2v(x.clone(), y.clone());
            let (h, assign) = build_joint(&mf, &["x".into(), "y".into()], bins).unwrap();
            prop_assert_eq!(h.total_count() as usize, x.len());
            let sum: u64 = h.nonzero().map(|(_, c)| c).sum();
            prop_assert_eq!(sum, h.total_count());
            for (p, &flat) in assign.per_point().iter().enumerate() {
                let coords = h.unflatten(flat);
                prop_assert_eq!(coords[0], h.axes()[0].bin_of(x[p]));
                prop_assert_eq!(coords[1], h.axes()[1].bin_of(y[p]));
            }
            for axis in 0..2 {
                let m = h.marginal(axis).unwrap();
                prop_assert_eq!(m.iter().sum::<u64>(), h.total_count());
            }
        }
    }
}
