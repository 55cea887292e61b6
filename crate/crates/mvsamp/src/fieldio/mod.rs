//! Regular-grid multivariate fields and their on-disk formats.
//!
//! A dataset is one or more scalar variables sampled on a common regular 3-D
//! grid. On disk each variable is a headerless brick of little-endian IEEE-754
//! f32 values in x-fastest order; a JSON sidecar carries the grid dimensions
//! and the variable-name-to-brick mapping:
//!
//! ```json
//! {"dims": [250, 250, 50], "variables": [{"name": "pressure", "file": "p.f32"}]}
//! ```
//!
//! In memory values are widened to f64 so histogram edges and log ratios are
//! computed in full precision. Values loaded from disk are always exactly
//! representable in f32, which is what makes save/load round-trips bit-exact.

mod pointset;
mod synth;

pub use pointset::SampledPointSet;
pub use synth::{make_synthetic, Background, Band, FeatureRegion, SyntheticSpec, VariableSpec};

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid extent per axis. Linearization is x-fastest:
/// `linear(i, j, k) = i + nx * (j + ny * k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[u64; 3]", into = "[u64; 3]")]
pub struct GridDims {
    nx: u32,
    ny: u32,
    nz: u32,
}

impl GridDims {
    pub fn new(nx: u32, ny: u32, nz: u32) -> Result<Self> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid dimensions must be positive, got ({nx}, {ny}, {nz})"
            )));
        }
        Ok(GridDims { nx, ny, nz })
    }

    pub fn nx(&self) -> u32 {
        self.nx
    }

    pub fn ny(&self) -> u32 {
        self.ny
    }

    pub fn nz(&self) -> u32 {
        self.nz
    }

    /// Total number of grid points.
    pub fn total(&self) -> u64 {
        self.nx as u64 * self.ny as u64 * self.nz as u64
    }

    #[inline]
    pub fn linear(&self, i: u32, j: u32, k: u32) -> u64 {
        debug_assert!(i < self.nx && j < self.ny && k < self.nz);
        i as u64 + self.nx as u64 * (j as u64 + self.ny as u64 * k as u64)
    }

    #[inline]
    pub fn delinearize(&self, index: u64) -> (u32, u32, u32) {
        debug_assert!(index < self.total());
        let nx = self.nx as u64;
        let ny = self.ny as u64;
        let i = index % nx;
        let j = (index / nx) % ny;
        let k = index / (nx * ny);
        (i as u32, j as u32, k as u32)
    }

    pub fn len_along(&self, axis: Axis) -> u32 {
        match axis {
            Axis::X => self.nx,
            Axis::Y => self.ny,
            Axis::Z => self.nz,
        }
    }
}

impl TryFrom<[u64; 3]> for GridDims {
    type Error = Error;

    fn try_from(d: [u64; 3]) -> Result<Self> {
        for v in d {
            if v == 0 || v > u32::MAX as u64 {
                return Err(Error::InvalidArgument(format!(
                    "grid dimension {v} out of range"
                )));
            }
        }
        GridDims::new(d[0] as u32, d[1] as u32, d[2] as u32)
    }
}

impl From<GridDims> for [u64; 3] {
    fn from(d: GridDims) -> [u64; 3] {
        [d.nx as u64, d.ny as u64, d.nz as u64]
    }
}

impl std::fmt::Display for GridDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.nx, self.ny, self.nz)
    }
}

/// Grid axis selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(Error::InvalidArgument(format!("unknown axis {other:?}"))),
        }
    }
}

/// One scalar variable on a regular grid. All values are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    name: String,
    dims: GridDims,
    values: Vec<f64>,
}

impl Field {
    /// Build a field, checking length and finiteness.
    pub fn new(name: impl Into<String>, dims: GridDims, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.len() as u64 != dims.total() {
            return Err(Error::LengthMismatch(format!(
                "field {name:?}: {} values for a {dims} grid ({} points)",
                values.len(),
                dims.total()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                name,
                index: bad as u64,
            });
        }
        Ok(Field { name, dims, values })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value_at(&self, index: u64) -> f64 {
        self.values[index as usize]
    }

    /// Exact data minimum and maximum.
    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.values {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        (lo, hi)
    }

    /// Load a headerless little-endian f32 brick.
    ///
    /// The file must contain exactly `dims.total()` floats; values are widened
    /// to f64. Non-finite values are rejected.
    pub fn load_brick(path: impl AsRef<Path>, dims: GridDims, name: impl Into<String>) -> Result<Self> {
        let path = path.as_ref();
        let name = name.into();
        let expected = dims
            .total()
            .checked_mul(4)
            .ok_or_else(|| Error::InvalidArgument(format!("grid {dims} too large")))?;
        let meta = fs::metadata(path)?;
        if meta.len() != expected {
            return Err(Error::SizeMismatch {
                path: path.to_path_buf(),
                expected,
                actual: meta.len(),
            });
        }
        let mut file = fs::File::open(path)?;
        let mut buf = vec![0u8; expected as usize];
        file.read_exact(&mut buf)?;
        let mut values = Vec::with_capacity(dims.total() as usize);
        for (i, chunk) in buf.chunks_exact(4).enumerate() {
            let v = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
            if !v.is_finite() {
                return Err(Error::NonFiniteValue {
                    name,
                    index: i as u64,
                });
            }
            values.push(v as f64);
        }
        Ok(Field { name, dims, values })
    }

    /// Write the field as a headerless little-endian f32 brick.
    ///
    /// Values are narrowed to f32; fields whose values came from a brick (or
    /// from [`make_synthetic`], which quantizes to f32) round-trip bit-exactly.
    pub fn save_brick(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut buf = Vec::with_capacity(self.values.len() * 4);
        for &v in &self.values {
            buf.extend_from_slice(&(v as f32).to_le_bytes());
        }
        let mut file = fs::File::create(path.as_ref())?;
        file.write_all(&buf)?;
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SidecarVariable {
    name: String,
    file: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    dims: GridDims,
    variables: Vec<SidecarVariable>,
}

/// An ordered set of variables sharing one grid.
#[derive(Debug, Clone)]
pub struct MultiField {
    dims: GridDims,
    fields: Vec<Field>,
}

impl MultiField {
    pub fn new(fields: Vec<Field>) -> Result<Self> {
        let first = fields
            .first()
            .ok_or_else(|| Error::InvalidArgument("a dataset needs at least one variable".into()))?;
        let dims = first.dims;
        for f in &fields {
            if f.dims != dims {
                return Err(Error::DimensionMismatch(format!(
                    "variable {:?} has dims {} but the dataset uses {}",
                    f.name, f.dims, dims
                )));
            }
        }
        for (i, f) in fields.iter().enumerate() {
            if fields[..i].iter().any(|g| g.name == f.name) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate variable name {:?}",
                    f.name
                )));
            }
        }
        Ok(MultiField { dims, fields })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn variable_names(&self) -> Vec<String> {
        self.fields.iter().map(|f| f.name.clone()).collect()
    }

    pub fn field(&self, name: &str) -> Result<&Field> {
        self.fields
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Load a dataset from a JSON sidecar; brick paths are resolved relative
    /// to the sidecar's directory.
    pub fn load_sidecar(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let sidecar: Sidecar = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let mut fields = Vec::with_capacity(sidecar.variables.len());
        for v in &sidecar.variables {
            fields.push(Field::load_brick(base.join(&v.file), sidecar.dims, &v.name)?);
        }
        MultiField::new(fields)
    }

    /// Write all bricks next to `sidecar_path` and the sidecar itself.
    /// Brick files are named `<variable>.f32`.
    pub fn save_sidecar(&self, sidecar_path: impl AsRef<Path>) -> Result<()> {
        let sidecar_path = sidecar_path.as_ref();
        let base = sidecar_path.parent().unwrap_or_else(|| Path::new("."));
        fs::create_dir_all(base)?;
        let mut variables = Vec::with_capacity(self.fields.len());
        for f in &self.fields {
            let file = format!("{}.f32", f.name);
            f.save_brick(base.join(&file))?;
            variables.push(SidecarVariable {
                name: f.name.clone(),
                file,
            });
        }
        let sidecar = Sidecar {
            dims: self.dims,
            variables,
        };
        let text = serde_json::to_string_pretty(&sidecar).map_err(|source| Error::Json {
            path: sidecar_path.to_path_buf(),
            source,
        })?;
        fs::write(sidecar_path, text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn load_zero_field() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("z.f32");
        fs::write(&p, [0u8; 32]).unwrap();
        let dims = GridDims::new(2, 2, 2).unwrap();
        let f = Field::load_brick(&p, dims, "z").unwrap();
        assert_eq!(f.values(), &[0.0; 8]);
    }

    #[test]
    fn load_size_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("short.f32");
        fs::write(&p, [0u8; 28]).unwrap();
        let dims = GridDims::new(2, 2, 2).unwrap();
        match Field::load_brick(&p, dims, "short") {
            Err(Error::SizeMismatch { expected, actual, .. }) => {
                assert_eq!((expected, actual), (32, 28));
            }
            other => panic!("expected SizeMismatch, got {other:?}"),
        }
    }

    #[test]
    fn load_rejects_nan() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("nan.f32");
        let mut bytes = Vec::new();
        for i in 0..8 {
            let v: f32 = if i == 3 { f32::NAN } else { 1.0 };
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        fs::write(&p, bytes).unwrap();
        let dims = GridDims::new(2, 2, 2).unwrap();
        match Field::load_brick(&p, dims, "nan") {
            Err(Error::NonFiniteValue { index, .. }) => assert_eq!(index, 3),
            other => panic!("expected NonFiniteValue, got {other:?}"),
        }
    }

    #[test]
    fn brick_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("rt.f32");
        let dims = GridDims::new(3, 2, 2).unwrap();
        let values: Vec<f64> = (0..12).map(|i| (i as f32 * 0.37 - 1.5) as f64).collect();
        let f = Field::new("v", dims, values).unwrap();
        f.save_brick(&p).unwrap();
        let g = Field::load_brick(&p, dims, "v").unwrap();
        assert_eq!(f.values(), g.values());
    }

    proptest! {
        #[test]
        fn linearization_bijection(nx in 1u32..9, ny in 1u32..9, nz in 1u32..9) {
            let dims = GridDims::new(nx, ny, nz).unwrap();
            let mut seen = vec![false; dims.total() as usize];
            for k in 0..nz {
                for j in 0..ny {
                    for i in 0..nx {
                        let l = dims.linear(i, j, k);
                        prop_assert!(l < dims.total());
                        prop_assert!(!seen[l as usize]);
                        seen[l as usize] = true;
                        prop_assert_eq!(dims.delinearize(l), (i, j, k));
                    }
                }
            }
            prop_assert!(seen.iter().all(|&s| s));
        }

        #[test]
        fn brick_round_trip_any_f32(values in proptest::collection::vec(-1e30f32..1e30, 8)) {
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("any.f32");
            let dims = GridDims::new(2, 2, 2).unwrap();
            let f = Field::new("v", dims, values.iter().map(|&v| v as f64).collect()).unwrap();
            f.save_brick(&p).unwrap();
            let g = Field::load_brick(&p, dims, "v").unwrap();
            prop_assert_eq!(f.values(), g.values());
        }
    }

    #[test]
    fn sidecar_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let dims = GridDims::new(2, 3, 1).unwrap();
        let a = Field::new("a", dims, (0..6).map(|i| i as f64).collect()).unwrap();
        let b = Field::new("b", dims, (0..6).map(|i| (i * i) as f64).collect()).unwrap();
        let mf = MultiField::new(vec![a, b]).unwrap();
        let sidecar = dir.path().join("data.json");
        mf.save_sidecar(&sidecar).unwrap();
        let back = MultiField::load_sidecar(&sidecar).unwrap();
        assert_eq!(back.variable_names(), vec!["a", "b"]);
        assert_eq!(back.field("b").unwrap().values(), mf.field("b").unwrap().values());
    }

    #[test]
    fn duplicate_names_rejected() {
        let dims = GridDims::new(1, 1, 1).unwrap();
        let a = Field::new("a", dims, vec![0.0]).unwrap();
        let a2 = Field::new("a", dims, vec![1.0]).unwrap();
        assert!(MultiField::new(vec![a, a2]).is_err());
    }
}
