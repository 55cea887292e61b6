//! Sampled point sets and the MVSP binary format.
//!
//! A sampled point set is an unstructured subset of grid points, each carrying
//! its linear grid index plus one value per variable. Points are kept in
//! canonical ascending-index order, which makes set operations, diffs and
//! round-trips deterministic.
//!
//! On-disk layout (all integers little-endian):
//!
//! ```text
//! magic  "MVSP"                      4 bytes
//! version u16 = 1, reserved u16 = 0
//! n_vars  u32
//! n_points u64
//! nx, ny, nz  u32 each
//! n_vars names: u16 length + UTF-8 bytes
//! n_points records: u64 linear index, n_vars f32 values
//! ```

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fieldio::{GridDims, MultiField};

const MAGIC: [u8; 4] = *b"MVSP";
const VERSION: u16 = 1;

/// A canonical (ascending by linear index) subset of grid points with all
/// variable values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPointSet {
    dims: GridDims,
    variable_names: Vec<String>,
    indices: Vec<u64>,
    /// Row-major: `values[p * n_vars + v]` is point `p`'s value of variable `v`.
    values: Vec<f64>,
}

impl SampledPointSet {
    /// Build a point set, validating canonical order, index range and value
    /// array shape.
    pub fn new(
        dims: GridDims,
        variable_names: Vec<String>,
        indices: Vec<u64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let n_vars = variable_names.len();
        if n_vars == 0 {
            return Err(Error::InvalidArgument(
                "a point set needs at least one variable".into(),
            ));
        }
        if values.len() != indices.len() * n_vars {
            return Err(Error::LengthMismatch(format!(
                "{} values for {} points x {} variables",
                values.len(),
                indices.len(),
                n_vars
            )));
        }
        let total = dims.total();
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidArgument(
                    "point indices must be strictly ascending".into(),
                ));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= total {
                return Err(Error::InvalidArgument(format!(
                    "point index {last} out of range for grid {dims}"
                )));
            }
        }
        Ok(SampledPointSet {
            dims,
            variable_names,
            indices,
            values,
        })
    }

    /// The degenerate 100% sample: every grid point.
    pub fn full(mf: &MultiField) -> Self {
        let dims = mf.dims();
        let n = dims.total() as usize;
        let n_vars = mf.fields().len();
        let indices: Vec<u64> = (0..n as u64).collect();
        let mut values = Vec::with_capacity(n * n_vars);
        for p in 0..n {
            for f in mf.fields() {
                values.push(f.values()[p]);
            }
        }
        SampledPointSet {
            dims,
            variable_names: mf.variable_names(),
            indices,
            values,
        }
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.variable_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    /// Values of point `p`, one per variable.
    pub fn point_values(&self, p: usize) -> &[f64] {
        let n = self.variable_names.len();
        &self.values[p * n..(p + 1) * n]
    }

    /// One variable's values across all points, in point order.
    pub fn variable_values(&self, name: &str) -> Result<Vec<f64>> {
        let v = self.var_index(name)?;
        let n = self.variable_names.len();
        Ok(self.values.iter().skip(v).step_by(n).copied().collect())
    }

    /// Write in MVSP format. Values are narrowed to f32 (the storage
    /// precision); inputs produced by this crate are already representable.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = fs::File::create(path.as_ref())?;
        let mut w = BufWriter::new(file);
        w.write_all(&MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&0u16.to_le_bytes())?;
        w.write_all(&(self.variable_names.len() as u32).to_le_bytes())?;
        w.write_all(&(self.indices.len() as u64).to_le_bytes())?;
        w.write_all(&self.dims.nx().to_le_bytes())?;
        w.write_all(&self.dims.ny().to_le_bytes())?;
        w.write_all(&self.dims.nz().to_le_bytes())?;
        for name in &self.variable_names {
            let bytes = name.as_bytes();
            if bytes.len() > u16::MAX as usize {
                return Err(Error::InvalidArgument(format!(
                    "variable name too long ({} bytes)",
                    bytes.len()
                )));
            }
            w.write_all(&(bytes.len() as u16).to_le_bytes())?;
            w.write_all(bytes)?;
        }
        let n_vars = self.variable_names.len();
        for (p, &idx) in self.indices.iter().enumerate() {
            w.write_all(&idx.to_le_bytes())?;
            for v in 0..n_vars {
                let val = self.values[p * n_vars + v] as f32;
                w.write_all(&val.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Read an MVSP file, validating the header, canonical ordering and exact
    /// file length.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = fs::File::open(path.as_ref())?;
        let mut r = BufReader::new(file);

        let mut magic = [0u8; 4];
        read_exact(&mut r, &mut magic, "magic")?;
        if magic != MAGIC {
            return Err(Error::MalformedHeader(format!(
                "bad magic {:02x?}, expected \"MVSP\"",
                magic
            )));
        }
        let version = read_u16(&mut r, "version")?;
        if version != VERSION {
            return Err(Error::MalformedHeader(format!(
                "unsupported version {version}"
            )));
        }
        let _reserved = read_u16(&mut r, "reserved")?;
        let n_vars = read_u32(&mut r, "variable count")? as usize;
        if n_vars == 0 {
            return Err(Error::MalformedHeader("zero variables".into()));
        }
        let n_points = read_u64(&mut r, "point count")?;
        let nx = read_u32(&mut r, "nx")?;
        let ny = read_u32(&mut r, "ny")?;
        let nz = read_u32(&mut r, "nz")?;
        let dims = GridDims::new(nx, ny, nz)
            .map_err(|_| Error::MalformedHeader(format!("bad dims ({nx}, {ny}, {nz})")))?;

        let mut variable_names = Vec::with_capacity(n_vars);
        for _ in 0..n_vars {
            let len = read_u16(&mut r, "name length")? as usize;
            let mut buf = vec![0u8; len];
            read_exact(&mut r, &mut buf, "variable name")?;
            let name = String::from_utf8(buf)
                .map_err(|_| Error::MalformedHeader("variable name is not UTF-8".into()))?;
            variable_names.push(name);
        }

        let mut indices = Vec::with_capacity(n_points.min(1 << 24) as usize);
        let mut values = Vec::with_capacity((n_points as usize).saturating_mul(n_vars).min(1 << 26));
        let mut prev: Option<u64> = None;
        for _ in 0..n_points {
            let idx = read_u64(&mut r, "point record")?;
            if let Some(p) = prev {
                if idx <= p {
                    return Err(Error::MalformedHeader(format!(
                        "point indices not strictly ascending ({p} then {idx})"
                    )));
                }
            }
            if idx >= dims.total() {
                return Err(Error::MalformedHeader(format!(
                    "point index {idx} out of range for grid {dims}"
                )));
            }
            prev = Some(idx);
            indices.push(idx);
            for _ in 0..n_vars {
                let mut b = [0u8; 4];
                read_exact(&mut r, &mut b, "point value")?;
                let v = f32::from_le_bytes(b);
                if !v.is_finite() {
                    return Err(Error::MalformedHeader(format!(
                        "non-finite value at point index {idx}"
                    )));
                }
                values.push(v as f64);
            }
        }
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::MalformedHeader("trailing bytes after records".into()));
        }
        Ok(SampledPointSet {
            dims,
            variable_names,
            indices,
            values,
        })
    }
}

fn read_exact(r: &mut impl Read, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf)
        .map_err(|_| Error::MalformedHeader(format!("truncated while reading {what}")))
}

fn read_u16(r: &mut impl Read, what: &str) -> Result<u16> {
    let mut b = [0u8; 2];
    read_exact(r, &mut b, what)?;
    Ok(u16::from_le_bytes(b))
}

fn read_u32(r: &mut impl Read, what: &str) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b, what)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read, what: &str) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b, what)?;
    Ok(u64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dims222() -> GridDims {
        GridDims::new(2, 2, 2).unwrap()
    }

    #[test]
    fn empty_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.mvsp");
        let ps = SampledPointSet::new(
            dims222(),
            vec!["a".into(), "b".into()],
            Vec::new(),
            Vec::new(),
        )
        .unwrap();
        ps.save(&p).unwrap();
        assert_eq!(SampledPointSet::load(&p).unwrap(), ps);
    }

    #[test]
    fn three_point_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("three.mvsp");
        let ps = SampledPointSet::new(
            dims222(),
            vec!["a".into(), "b".into()],
            vec![0, 3, 7],
            vec![1.5, -2.0, 0.25, 8.0, -0.5, 100.0],
        )
        .unwrap();
        ps.save(&p).unwrap();
        assert_eq!(SampledPointSet::load(&p).unwrap(), ps);
    }

    #[test]
    fn wrong_magic() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.mvsp");
        fs::write(&p, b"NOPE\x01\x00\x00\x00").unwrap();
        match SampledPointSet::load(&p) {
            Err(Error::MalformedHeader(msg)) => assert!(msg.contains("magic"), "{msg}"),
            other => panic!("expected MalformedHeader, got {other:?}"),
        }
    }

    #[test]
    fn truncation_detected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("trunc.mvsp");
        let ps = SampledPointSet::new(dims222(), vec!["a".into()], vec![1, 5], vec![2.0, 3.0])
            .unwrap();
        ps.save(&p).unwrap();
        let bytes = fs::read(&p).unwrap();
        fs::write(&p, &bytes[..bytes.len() - 2]).unwrap();
        assert!(matches!(
            SampledPointSet::load(&p),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn non_canonical_order_rejected() {
        let err = SampledPointSet::new(dims222(), vec!["a".into()], vec![3, 1], vec![0.0, 0.0]);
        assert!(err.is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(
            picks in proptest::collection::btree_set(0u64..8, 0..8),
            raw in proptest::collection::vec(-1e20f32..1e20, 16),
        ) {
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("prop.mvsp");
            let indices: Vec<u64> = picks.into_iter().collect();
            let values: Vec<f64> = raw.iter().take(indices.len() * 2).map(|&v| v as f64).collect();
            let ps = SampledPointSet::new(
                dims222(),
                vec!["a".into(), "b".into()],
                indices,
                values,
            ).unwrap();
            ps.save(&p).unwrap();
            prop_assert_eq!(SampledPointSet::load(&p).unwrap(), ps);
        }
    }
}
