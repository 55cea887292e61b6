//! Synthetic multivariate test data with planted joint features.
//!
//! The generator draws every variable independently from a background noise
//! process, except inside ellipsoidal feature regions where the listed
//! variables are confined to narrow value bands. Points inside a feature
//! therefore carry a strongly co-occurring value tuple, giving the dataset a
//! known ground-truth region of high statistical association that tests and
//! benchmarks can target.
//!
//! Generation is deterministic: variable `k`'s value at grid point `p` depends
//! only on `(seed, k, p)` via the counter-based generator in [`crate::rng`].
//! Values are quantized to f32 so that writing and re-reading a brick
//! reproduces the in-memory data bit-exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldio::{Axis, Field, GridDims, MultiField};
use crate::rng::{point_unit, STREAM_SYNTH_BASE};

/// Counter reserved for per-variable phase draws (outside any grid range).
const PHASE_COUNTER: u64 = u64::MAX;

/// Background process for one variable.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Background {
    /// Continuous uniform noise on [lo, hi).
    Uniform { lo: f64, hi: f64 },
    /// Quantized uniform noise: one of `levels` evenly spaced values
    /// `lo + (level + 0.5) / levels * (hi - lo)`. Coarse level sets keep
    /// per-bin histogram counts high, which stabilizes log-ratio estimates.
    Levels { lo: f64, hi: f64, levels: u32 },
    /// Smooth deterministic background: a linear ramp along one axis,
    /// displaced by a low-frequency periodic wave over all axes and folded
    /// back into [lo, hi] at the edges. `wiggle` in [0, 1) is the
    /// displacement amplitude as a fraction of the range; `freq` gives wave
    /// periods across each axis; the wave phase is drawn from the seed. The
    /// wave is a smoothstepped triangle, so values are reproducible
    /// bit-for-bit everywhere (no libm). The folding keeps the value
    /// distribution near-uniform over the full range, and the field stays
    /// easy to reconstruct from sparse samples.
    Harmonic {
        axis: Axis,
        lo: f64,
        hi: f64,
        wiggle: f64,
        freq: [f64; 3],
    },
}

impl Background {
    fn validate(&self, var: &str) -> Result<()> {
        let (lo, hi) = match self {
            Background::Uniform { lo, hi } => (*lo, *hi),
            Background::Levels { lo, hi, levels } => {
                if *levels == 0 {
                    return Err(Error::InvalidSpec(format!(
                        "variable {var:?}: levels must be positive"
                    )));
                }
                (*lo, *hi)
            }
            Background::Harmonic { lo, hi, wiggle, .. } => {
                if !(0.0..1.0).contains(wiggle) {
                    return Err(Error::InvalidSpec(format!(
                        "variable {var:?}: wiggle must be in [0, 1)"
                    )));
                }
                (*lo, *hi)
            }
        };
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidSpec(format!(
                "variable {var:?}: background range [{lo}, {hi}) is invalid"
            )));
        }
        Ok(())
    }
}

/// Periodic triangle wave with period 1; 0 at integers, 1 at half-integers.
#[inline]
fn triangle(u: f64) -> f64 {
    2.0 * (u - (u + 0.5).floor()).abs()
}

/// Hermite smoothstep; turns the triangle into a C1 sine-like wave.
#[inline]
fn smoothstep(x: f64) -> f64 {
    x * x * (3.0 - 2.0 * x)
}

/// One variable of a synthetic dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub background: Background,
}

/// The in-feature value band of one variable.
///
/// With `ripples == 0` (the default) values are drawn uniformly from the
/// band. A positive `ripples` instead lays a deterministic radial wave with
/// that many periods across the region, still confined to the band: the
/// feature then carries fine internal structure that sparse sampling blurs,
/// while the variables keep co-occurring in the band.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Band {
    pub variable: String,
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub ripples: f64,
}

/// An axis-aligned ellipsoid in grid coordinates. Inside it, each banded
/// variable draws uniformly from its (narrow) band instead of the background.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureRegion {
    pub center: [f64; 3],
    pub radii: [f64; 3],
    pub bands: Vec<Band>,
}

impl FeatureRegion {
    /// Squared normalized ellipsoid radius of a grid point (1 on the
    /// surface).
    pub fn radius2(&self, i: u32, j: u32, k: u32) -> f64 {
        let dx = (i as f64 - self.center[0]) / self.radii[0];
        let dy = (j as f64 - self.center[1]) / self.radii[1];
        let dz = (k as f64 - self.center[2]) / self.radii[2];
        dx * dx + dy * dy + dz * dz
    }

    pub fn contains(&self, i: u32, j: u32, k: u32) -> bool {
        self.radius2(i, j, k) <= 1.0
    }

    fn band_for(&self, variable: &str) -> Option<&Band> {
        self.bands.iter().find(|b| b.variable == variable)
    }
}

/// Full description of a synthetic dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub dims: GridDims,
    pub variables: Vec<VariableSpec>,
    #[serde(default)]
    pub features: Vec<FeatureRegion>,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.variables.is_empty() {
            return Err(Error::InvalidSpec("empty variable list".into()));
        }
        for v in &self.variables {
            v.background.validate(&v.name)?;
        }
        for (i, v) in self.variables.iter().enumerate() {
            if self.variables[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::InvalidSpec(format!(
                    "duplicate variable name {:?}",
                    v.name
                )));
            }
        }
        for f in &self.features {
            if f.radii.iter().any(|&r| !(r > 0.0)) {
                return Err(Error::InvalidSpec("feature radii must be positive".into()));
            }
            if f.bands.is_empty() {
                return Err(Error::InvalidSpec("feature has no bands".into()));
            }
            for b in &f.bands {
                if !self.variables.iter().any(|v| v.name == b.variable) {
                    return Err(Error::InvalidSpec(format!(
                        "band references unknown variable {:?}",
                        b.variable
                    )));
                }
                if !(b.lo.is_finite() && b.hi.is_finite()) || b.lo >= b.hi {
                    return Err(Error::InvalidSpec(format!(
                        "band for {:?} has invalid range [{}, {})",
                        b.variable, b.lo, b.hi
                    )));
                }
            }
        }
        Ok(())
    }

    /// Linear indices of all grid points inside any feature region
    /// (ascending). This is the ground-truth mask used by tests and the
    /// benchmark harness.
    pub fn feature_indices(&self) -> Vec<u64> {
        let mut out = Vec::new();
        if self.features.is_empty() {
            return out;
        }
        for k in 0..self.dims.nz() {
            for j in 0..self.dims.ny() {
                for i in 0..self.dims.nx() {
                    if self.features.iter().any(|f| f.contains(i, j, k)) {
                        out.push(self.dims.linear(i, j, k));
                    }
                }
            }
        }
        out
    }
}

/// Generate the dataset described by `spec`, deterministically for a given
/// seed. When several features overlap, the first one listed wins.
pub fn make_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<MultiField> {
    spec.validate()?;
    let dims = spec.dims;
    let n = dims.total() as usize;

    let axis_t = |len: u32, c: u32| -> f64 {
        if len <= 1 {
            0.5
        } else {
            c as f64 / (len - 1) as f64
        }
    };

    let mut fields = Vec::with_capacity(spec.variables.len());
    for (v_idx, var) in spec.variables.iter().enumerate() {
        let stream = STREAM_SYNTH_BASE + v_idx as u64;
        let phase = point_unit(seed, stream, PHASE_COUNTER);
        let mut values = Vec::with_capacity(n);
        let mut p: u64 = 0;
        for k in 0..dims.nz() {
            for j in 0..dims.ny() {
                for i in 0..dims.nx() {
                    let band = spec
                        .features
                        .iter()
                        .find(|f| f.contains(i, j, k))
                        .and_then(|f| f.band_for(&var.name).map(|b| (f, b)));
                    let raw = match band {
                        Some((region, b)) if b.ripples > 0.0 => {
                            let rho = region.radius2(i, j, k).sqrt();
                            let wave = smoothstep(triangle(b.ripples * rho + phase));
                            b.lo + wave * (b.hi - b.lo)
                        }
                        Some((_, b)) => {
                            let u = point_unit(seed, stream, p);
                            b.lo + u * (b.hi - b.lo)
                        }
                        None => match var.background {
                            Background::Uniform { lo, hi } => {
                                let u = point_unit(seed, stream, p);
                                lo + u * (hi - lo)
                            }
                            Background::Levels { lo, hi, levels } => {
                                let u = point_unit(seed, stream, p);
                                let level = ((u * levels as f64) as u32).min(levels - 1);
                                lo + (level as f64 + 0.5) / levels as f64 * (hi - lo)
                            }
                            Background::Harmonic {
                                axis,
                                lo,
                                hi,
                                wiggle,
                                freq,
                            } => {
                                let t = match axis {
                                    Axis::X => axis_t(dims.nx(), i),
                                    Axis::Y => axis_t(dims.ny(), j),
                                    Axis::Z => axis_t(dims.nz(), k),
                                };
                                let u = freq[0] * axis_t(dims.nx(), i)
                                    + freq[1] * axis_t(dims.ny(), j)
                                    + freq[2] * axis_t(dims.nz(), k)
                                    + phase;
                                let wave = smoothstep(triangle(u));
                                let s = t + wiggle * (2.0 * wave - 1.0);
                                // Reflect at the range edges; keeps the value
                                // distribution near-uniform.
                                let v01 = if s < 0.0 {
                                    -s
                                } else if s > 1.0 {
                                    2.0 - s
                                } else {
                                    s
                                };
                                lo + (hi - lo) * v01
                            }
                        },
                    };
                    // Quantize to storage precision so brick round-trips are
                    // bit-exact.
                    values.push(raw as f32 as f64);
                    p += 1;
                }
            }
        }
        fields.push(Field::new(var.name.clone(), dims, values)?);
    }
    MultiField::new(fields)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_var_spec(features: Vec<FeatureRegion>) -> SyntheticSpec {
        SyntheticSpec {
            dims: GridDims::new(16, 16, 16).unwrap(),
            variables: vec![
                VariableSpec {
                    name: "v0".into(),
                    background: Background::Uniform { lo: 0.0, hi: 1.0 },
                },
                VariableSpec {
                    name: "v1".into(),
                    background: Background::Uniform { lo: 0.0, hi: 1.0 },
                },
            ],
            features,
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let spec = two_var_spec(vec![FeatureRegion {
            center: [8.0, 8.0, 8.0],
            radii: [4.0, 4.0, 4.0],
            bands: vec![
                Band {
                    variable: "v0".into(),
                    lo: 2.0,
                    hi: 2.1,
                    ripples: 0.0,
                },
                Band {
                    variable: "v1".into(),
                    lo: 2.0,
                    hi: 2.1,
                    ripples: 0.0,
                },
            ],
        }]);
        let a = make_synthetic(&spec, 7).unwrap();
        let b = make_synthetic(&spec, 7).unwrap();
        for (fa, fb) in a.fields().iter().zip(b.fields()) {
            assert_eq!(fa.values(), fb.values());
        }
        let c = make_synthetic(&spec, 8).unwrap();
        assert_ne!(a.fields()[0].values(), c.fields()[0].values());
    }

    #[test]
    fn band_values_inside_feature() {
        let spec = two_var_spec(vec![FeatureRegion {
            center: [8.0, 8.0, 8.0],
            radii: [4.0, 4.0, 4.0],
            bands: vec![Band {
                variable: "v0".into(),
                lo: 5.0,
                hi: 5.5,
                ripples: 0.0,
            }],
        }]);
        let mf = make_synthetic(&spec, 3).unwrap();
        let v0 = mf.field("v0").unwrap();
        let v1 = mf.field("v1").unwrap();
        let inside = spec.feature_indices();
        assert!(!inside.is_empty());
        for &idx in &inside {
            let v = v0.value_at(idx);
            assert!((5.0..5.5).contains(&v), "in-band value {v}");
            // v1 has no band here, stays on its background.
            assert!((0.0..1.0).contains(&v1.value_at(idx)));
        }
    }

    #[test]
    fn empty_variable_list_rejected() {
        let spec = SyntheticSpec {
            dims: GridDims::new(4, 4, 4).unwrap(),
            variables: vec![],
            features: vec![],
        };
        assert!(matches!(make_synthetic(&spec, 0), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn levels_background_is_quantized() {
        let spec = SyntheticSpec {
            dims: GridDims::new(8, 8, 8).unwrap(),
            variables: vec![VariableSpec {
                name: "q".into(),
                background: Background::Levels {
                    lo: 0.0,
                    hi: 1.0,
                    levels: 4,
                },
            }],
            features: vec![],
        };
        let mf = make_synthetic(&spec, 11).unwrap();
        let mut distinct: Vec<f64> = mf.field("q").unwrap().values().to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        assert_eq!(distinct.len(), 4);
    }
}
