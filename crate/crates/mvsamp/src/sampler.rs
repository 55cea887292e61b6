//! Uniform and association-driven sub-sampling.
//!
//! Both samplers make an independent Bernoulli decision per grid point using
//! the counter-based generator from [`crate::rng`], so output is deterministic
//! for a seed and independent of iteration order. The association-driven
//! sampler accepts a point with its bin's scaled normalized information value:
//! a bin with weight 0.7 keeps about 70% of its points.
//!
//! The scale factor gamma solves `sum_b gamma * w(b) * f(b) = n` for the
//! target count `n = round(alpha * N)`. Because acceptance probabilities
//! saturate at 1, the initial `gamma = n / sum_b w(b) * f(b)` can undershoot;
//! a calibration loop re-solves for gamma over the unsaturated bins until the
//! expected yield is within 0.5% of the target.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldio::{MultiField, SampledPointSet};
use crate::histogram::{BinAssignment, BinStore, JointHistogram};
use crate::pointinfo::PointInfoTable;
use crate::rng::{point_unit, SplitMix64, STREAM_PMI_SAMPLE, STREAM_QUOTA_SAMPLE, STREAM_RANDOM_SAMPLE};

/// Fraction of grid points to keep; strictly between 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SamplingFraction(f64);

impl SamplingFraction {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "sampling fraction must be in (0, 1), got {alpha}"
            )));
        }
        Ok(SamplingFraction(alpha))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// Target point count for a grid of `total` points (round half up).
    pub fn target_count(&self, total: u64) -> u64 {
        (self.0 * total as f64 + 0.5).floor() as u64
    }
}

impl TryFrom<f64> for SamplingFraction {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        SamplingFraction::new(v)
    }
}

impl From<SamplingFraction> for f64 {
    fn from(a: SamplingFraction) -> f64 {
        a.0
    }
}

/// Relative tolerance of the calibrated expected yield.
pub const YIELD_TOLERANCE: f64 = 0.005;
const MAX_CALIBRATION_ITERS: usize = 64;

/// Per-bin acceptance probabilities, calibrated to an expected yield.
#[derive(Debug, Clone)]
pub struct AcceptanceTable {
    per_bin: BinStore<f64>,
    flat_bin_count: u64,
    pub gamma: f64,
    pub target_count: u64,
    /// `sum_b per_bin(b) * f(b)` after calibration.
    pub expected_yield: f64,
}

impl AcceptanceTable {
    /// Acceptance probability of a bin (0 for bins no point occupies).
    pub fn probability(&self, flat: u64) -> f64 {
        self.per_bin.get(flat)
    }

    pub fn flat_bin_count(&self) -> u64 {
        self.flat_bin_count
    }
}

/// Uniform random sub-sampling: every point is kept independently with
/// probability `alpha`.
pub fn random_sample(mf: &MultiField, alpha: SamplingFraction, seed: u64) -> SampledPointSet {
    let a = alpha.value();
    collect_points(mf, |p| point_unit(seed, STREAM_RANDOM_SAMPLE, p) < a)
}

/// Build the acceptance table for a target fraction from a pointwise
/// information table and its histogram.
pub fn build_acceptance(
    table: &PointInfoTable,
    h: &JointHistogram,
    alpha: SamplingFraction,
) -> Result<AcceptanceTable> {
    if table.flat_bin_count() != h.flat_bin_count() {
        return Err(Error::LengthMismatch(format!(
            "table has {} bins but histogram has {}",
            table.flat_bin_count(),
            h.flat_bin_count()
        )));
    }
    let total = h.total_count();
    if total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let n = alpha.target_count(total);
    if n == 0 {
        return Err(Error::InvalidArgument(format!(
            "target count rounds to zero for alpha {} on {total} points",
            alpha.value()
        )));
    }

    // Occupied bins with their frequencies and normalized weights.
    let occupied: Vec<(u64, u64, f64)> = h
        .nonzero()
        .map(|(flat, f)| (flat, f, table.normalized(flat)))
        .collect();

    let weighted_mass: f64 = occupied.iter().map(|&(_, f, w)| w * f as f64).sum();
    if weighted_mass <= 0.0 {
        // Everything weighs zero: no ranking to follow. Fall back to uniform
        // acceptance at alpha.
        log::warn!(
            "degenerate information table (all normalized values zero); \
             falling back to uniform acceptance {}",
            alpha.value()
        );
        let a = alpha.value();
        let per_bin = store_from(&occupied, h, |_| a);
        return Ok(AcceptanceTable {
            per_bin,
            flat_bin_count: h.flat_bin_count(),
            gamma: a,
            target_count: n,
            expected_yield: a * total as f64,
        });
    }

    let mut gamma = n as f64 / weighted_mass;
    let mut expected = expected_yield(&occupied, gamma);
    let tolerance = YIELD_TOLERANCE * n as f64;
    let mut iterations = 0;
    while (expected - n as f64).abs() > tolerance && iterations < MAX_CALIBRATION_ITERS {
        // Re-solve for gamma over the bins the current gamma leaves
        // unsaturated.
        let mut saturated_count = 0.0;
        let mut unsaturated_mass = 0.0;
        for &(_, f, w) in &occupied {
            if gamma * w >= 1.0 {
                saturated_count += f as f64;
            } else {
                unsaturated_mass += w * f as f64;
            }
        }
        if unsaturated_mass <= 0.0 {
            // All occupied bins saturated: the yield is the full point count.
            if (total as f64) < n as f64 {
                return Err(Error::Unachievable { target: n, max: total });
            }
            break;
        }
        let remaining = n as f64 - saturated_count;
        if remaining <= 0.0 {
            // The saturated set alone overshoots; shrink gamma just below the
            // largest saturation threshold and keep iterating.
            gamma *= 0.5;
        } else {
            gamma = remaining / unsaturated_mass;
        }
        expected = expected_yield(&occupied, gamma);
        iterations += 1;
    }
    if (expected - n as f64).abs() > tolerance {
        log::warn!(
            "acceptance calibration stopped after {iterations} iterations at \
             expected yield {expected:.1} for target {n}"
        );
    }

    let per_bin = store_from(&occupied, h, |w| (gamma * w).clamp(0.0, 1.0));
    Ok(AcceptanceTable {
        per_bin,
        flat_bin_count: h.flat_bin_count(),
        gamma,
        target_count: n,
        expected_yield: expected,
    })
}

fn expected_yield(occupied: &[(u64, u64, f64)], gamma: f64) -> f64 {
    occupied
        .iter()
        .map(|&(_, f, w)| (gamma * w).clamp(0.0, 1.0) * f as f64)
        .sum()
}

fn store_from(
    occupied: &[(u64, u64, f64)],
    h: &JointHistogram,
    prob: impl Fn(f64) -> f64,
) -> BinStore<f64> {
    let flat_bins = h.flat_bin_count();
    if flat_bins <= (1 << 21) {
        let mut dense = vec![0.0; flat_bins as usize];
        for &(flat, _, w) in occupied {
            dense[flat as usize] = prob(w);
        }
        BinStore::Dense(dense)
    } else {
        BinStore::Sparse(occupied.iter().map(|&(flat, _, w)| (flat, prob(w))).collect())
    }
}

/// Information-guided sub-sampling: point `p` is kept independently with its
/// bin's acceptance probability.
pub fn pmi_sample(
    mf: &MultiField,
    assign: &BinAssignment,
    acc: &AcceptanceTable,
    seed: u64,
) -> Result<SampledPointSet> {
    check_assignment(mf, assign, acc)?;
    let per_point = assign.per_point();
    Ok(collect_points(mf, |p| {
        let prob = acc.probability(per_point[p as usize]);
        point_unit(seed, STREAM_PMI_SAMPLE, p) < prob
    }))
}

/// Exact-quota variant: each bin contributes `round(p_b * f_b)` points chosen
/// without replacement, for callers that need per-bin counts to be exact
/// rather than binomial.
pub fn pmi_sample_exact(
    mf: &MultiField,
    assign: &BinAssignment,
    acc: &AcceptanceTable,
    seed: u64,
) -> Result<SampledPointSet> {
    check_assignment(mf, assign, acc)?;
    let n = mf.dims().total();

    // Group point ids by bin via counting sort on the flat bin index.
    let mut order: Vec<u64> = (0..n).collect();
    order.sort_by_key(|&p| assign.per_point()[p as usize]);

    let mut keep = vec![false; n as usize];
    let mut start = 0usize;
    while start < order.len() {
        let bin = assign.per_point()[order[start] as usize];
        let mut end = start;
        while end < order.len() && assign.per_point()[order[end] as usize] == bin {
            end += 1;
        }
        let members = &mut order[start..end];
        let quota = (acc.probability(bin) * members.len() as f64 + 0.5).floor() as usize;
        let quota = quota.min(members.len());
        if quota > 0 {
            // Partial Fisher-Yates keyed on (seed, bin): deterministic and
            // independent of other bins.
            let mut rng = SplitMix64::new(
                crate::rng::point_bits(seed, STREAM_QUOTA_SAMPLE, bin),
            );
            for i in 0..quota {
                let j = i + rng.next_below((members.len() - i) as u64) as usize;
                members.swap(i, j);
            }
            for &p in members[..quota].iter() {
                keep[p as usize] = true;
            }
        }
        start = end;
    }
    Ok(collect_points(mf, |p| keep[p as usize]))
}

fn check_assignment(mf: &MultiField, assign: &BinAssignment, acc: &AcceptanceTable) -> Result<()> {
    if assign.len() as u64 != mf.dims().total() {
        return Err(Error::LengthMismatch(format!(
            "assignment covers {} points but the grid has {}",
            assign.len(),
            mf.dims().total()
        )));
    }
    if assign.flat_bin_count() != acc.flat_bin_count() {
        return Err(Error::LengthMismatch(format!(
            "assignment has {} bins but the acceptance table has {}",
            assign.flat_bin_count(),
            acc.flat_bin_count()
        )));
    }
    Ok(())
}

/// Walk the grid in ascending linear order and keep the selected points,
/// copying their values verbatim. Ascending order makes the result canonical.
fn collect_points(mf: &MultiField, mut keep: impl FnMut(u64) -> bool) -> SampledPointSet {
    let dims = mf.dims();
    let n = dims.total();
    let mut indices = Vec::new();
    let mut values = Vec::new();
    for p in 0..n {
        if keep(p) {
            indices.push(p);
            for f in mf.fields() {
                values.push(f.values()[p as usize]);
            }
        }
    }
    SampledPointSet::new(dims, mf.variable_names(), indices, values)
        .expect("sampler output is canonical by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldio::{Field, GridDims, MultiField};
    use crate::histogram::{build_joint, from_counts, AxisBinning};
    use crate::pointinfo::{pmi_table, PointInfoTable};

    fn axis(bins: usize) -> AxisBinning {
        AxisBinning {
            variable: "v".into(),
            min_value: 0.0,
            max_value: 1.0,
            bin_count: bins,
        }
    }

    fn small_mf(n: u32) -> MultiField {
        let dims = GridDims::new(n, 1, 1).unwrap();
        let x: Vec<f64> = (0..n).map(|i| (i % 2) as f64).collect();
        let y: Vec<f64> = (0..n).map(|i| (i % 2) as f64).collect();
        MultiField::new(vec![
            Field::new("x", dims, x).unwrap(),
            Field::new("y", dims, y).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn uniform_weights_reduce_to_alpha() {
        // A one-variable table has constant raw value, so every occupied bin
        // normalizes to 1.0 and the sampler degenerates to uniform alpha.
        let h = from_counts(vec![axis(2)], vec![400, 600]).unwrap();
        let t = pmi_table(&h).unwrap();
        let alpha = SamplingFraction::new(0.3).unwrap();
        let acc = build_acceptance(&t, &h, alpha).unwrap();
        // alpha * N is integral here, so gamma equals alpha exactly.
        assert_eq!(acc.gamma, 0.3);
        assert_eq!(acc.probability(0), 0.3);
        assert_eq!(acc.probability(1), 0.3);
        assert!((acc.expected_yield - 300.0).abs() < 1e-9);
    }

    #[test]
    fn hand_solved_two_bin_case() {
        // f = (100, 100), weights (1.0, 0.5), n = 90 => gamma = 0.6 and
        // acceptance (0.6, 0.3), yield exactly 90.
        let h = from_counts(vec![axis(2)], vec![100, 100]).unwrap();
        let t = PointInfoTable::with_normalized_for_tests(
            h.axes().to_vec(),
            vec![(0, 1.0), (1, 0.5)],
        );
        let alpha = SamplingFraction::new(0.45).unwrap();
        assert_eq!(alpha.target_count(200), 90);
        let acc = build_acceptance(&t, &h, alpha).unwrap();
        assert!((acc.gamma - 0.6).abs() < 1e-12);
        assert!((acc.probability(0) - 0.6).abs() < 1e-12);
        assert!((acc.probability(1) - 0.3).abs() < 1e-12);
        assert!((acc.expected_yield - 90.0).abs() < 1e-9);
    }

    #[test]
    fn saturating_two_bin_case() {
        // f = (100, 100), weights (1.0, 0.1), n = 150: the initial
        // gamma = 150/110 saturates bin 0, calibration raises bin 1 to 0.5.
        let h = from_counts(vec![axis(2)], vec![100, 100]).unwrap();
        let t = PointInfoTable::with_normalized_for_tests(
            h.axes().to_vec(),
            vec![(0, 1.0), (1, 0.1)],
        );
        let alpha = SamplingFraction::new(0.75).unwrap();
        assert_eq!(alpha.target_count(200), 150);
        let acc = build_acceptance(&t, &h, alpha).unwrap();
        assert!((acc.probability(0) - 1.0).abs() < 1e-12);
        assert!((acc.probability(1) - 0.5).abs() < 1e-12);
        assert!((acc.expected_yield - 150.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_table_falls_back_to_alpha() {
        let h = from_counts(vec![axis(2)], vec![100, 100]).unwrap();
        let t = PointInfoTable::with_normalized_for_tests(
            h.axes().to_vec(),
            vec![(0, 0.0), (1, 0.0)],
        );
        let alpha = SamplingFraction::new(0.25).unwrap();
        let acc = build_acceptance(&t, &h, alpha).unwrap();
        assert_eq!(acc.probability(0), 0.25);
        assert_eq!(acc.probability(1), 0.25);
    }

    #[test]
    fn random_sample_is_deterministic() {
        let mf = small_mf(512);
        let alpha = SamplingFraction::new(0.25).unwrap();
        let a = random_sample(&mf, alpha, 42);
        let b = random_sample(&mf, alpha, 42);
        assert_eq!(a, b);
        let c = random_sample(&mf, alpha, 43);
        assert_ne!(a.indices(), c.indices());
    }

    #[test]
    fn four_point_grid_exhaustive_seeds() {
        let mf = small_mf(4);
        let alpha = SamplingFraction::new(0.5).unwrap();
        let mut subset_seen = std::collections::HashSet::new();
        let mut per_point = [0u32; 4];
        let seeds = 4000u64;
        for seed in 0..seeds {
            let ps = random_sample(&mf, alpha, seed);
            let mask: u8 = ps.indices().iter().fold(0, |m, &i| m | (1 << i));
            subset_seen.insert(mask);
            for &i in ps.indices() {
                per_point[i as usize] += 1;
            }
        }
        assert_eq!(subset_seen.len(), 16, "every subset of 4 points occurs");
        for &c in &per_point {
            let freq = c as f64 / seeds as f64;
            // 3 sigma of a binomial(4000, 0.5) frequency is ~0.024.
            assert!((freq - 0.5).abs() < 0.024, "inclusion frequency {freq}");
        }
    }

    #[test]
    fn pmi_sample_zero_and_one_probabilities() {
        let mf = small_mf(64);
        let (h, assign) = build_joint(&mf, &["x".into(), "y".into()], 2).unwrap();
        let t = pmi_table(&h).unwrap();
        let alpha = SamplingFraction::new(0.5).unwrap();
        let mut acc = build_acceptance(&t, &h, alpha).unwrap();

        acc.per_bin = BinStore::Dense(vec![0.0; acc.flat_bin_count() as usize]);
        let none = pmi_sample(&mf, &assign, &acc, 1).unwrap();
        assert!(none.is_empty());

        acc.per_bin = BinStore::Dense(vec![1.0; acc.flat_bin_count() as usize]);
        let all = pmi_sample(&mf, &assign, &acc, 1).unwrap();
        assert_eq!(all.len(), 64);
    }

    #[test]
    fn exact_quota_hits_round_counts() {
        let mf = small_mf(1000);
        let (h, assign) = build_joint(&mf, &["x".into(), "y".into()], 2).unwrap();
        let t = pmi_table(&h).unwrap();
        let alpha = SamplingFraction::new(0.2).unwrap();
        let acc = build_acceptance(&t, &h, alpha).unwrap();
        let ps = pmi_sample_exact(&mf, &assign, &acc, 9).unwrap();
        // Both occupied bins have 500 points and equal weights; quota is
        // round(0.2 * 500) each.
        assert_eq!(ps.len(), 200);
        let again = pmi_sample_exact(&mf, &assign, &acc, 9).unwrap();
        assert_eq!(ps, again);
    }

    #[test]
    fn monotone_weights_give_monotone_probabilities() {
        let h = from_counts(vec![axis(3)], vec![100, 300, 600]).unwrap();
        let t = pmi_table(&h).unwrap();
        let alpha = SamplingFraction::new(0.1).unwrap();
        let acc = build_acceptance(&t, &h, alpha).unwrap();
        let mut pairs: Vec<(f64, f64)> = (0..3)
            .map(|b| (t.normalized(b), acc.probability(b)))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in pairs.windows(2) {
            assert!(w[0].1 <= w[1].1);
        }
    }

    #[test]
    fn sampled_values_match_raw_bit_exact() {
        let mf = small_mf(256);
        let alpha = SamplingFraction::new(0.3).unwrap();
        let ps = random_sample(&mf, alpha, 5);
        for (i, &idx) in ps.indices().iter().enumerate() {
            for (v, f) in ps.point_values(i).iter().zip(mf.fields()) {
                assert_eq!(v.to_bits(), f.values()[idx as usize].to_bits());
            }
        }
    }
}
