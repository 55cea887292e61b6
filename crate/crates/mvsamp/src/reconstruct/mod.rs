//! Scattered-data reconstruction of a full grid from a sampled point set.
//!
//! The primary mode tetrahedralizes the sample locations (grid-index
//! coordinates, unit spacing) and linearly interpolates inside each
//! tetrahedron with barycentric weights; grid points outside the convex hull
//! take the nearest sample's value. Inverse-distance weighting and nearest-
//! neighbor modes are simpler fallbacks, and degenerate sample geometry
//! (collinear or coplanar sites) degrades explicitly: collinear sites get
//! exact 1-D linear interpolation along their line, coplanar sites fall back
//! to inverse-distance weighting with a warning.
//!
//! Interpolated values are convex combinations of sample values, so every
//! reconstructed value stays within the sampled value range, and a grid point
//! that is itself a sample reproduces its value bit-exactly.

mod delaunay;
mod kdtree;

use crate::error::{Error, Result};
use crate::fieldio::{Field, SampledPointSet};
use delaunay::{Delaunay3, Flatness};
use kdtree::KdTree;

/// Neighbor count for inverse-distance weighting.
pub const DEFAULT_IDW_NEIGHBORS: usize = 8;
/// Distance exponent for inverse-distance weighting.
pub const DEFAULT_IDW_POWER: f64 = 2.0;

/// Interpolation scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReconstructionMode {
    /// Delaunay tetrahedralization + barycentric linear interpolation.
    DelaunayLinear,
    /// Inverse-distance weighted mean of the k nearest samples.
    ShepardIdw { neighbors: usize, power: f64 },
    /// Value of the closest sample; ties break to the lowest linear index.
    NearestNeighbor,
}

impl ReconstructionMode {
    pub fn idw_default() -> Self {
        ReconstructionMode::ShepardIdw {
            neighbors: DEFAULT_IDW_NEIGHBORS,
            power: DEFAULT_IDW_POWER,
        }
    }
}

impl std::str::FromStr for ReconstructionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delaunay" => Ok(ReconstructionMode::DelaunayLinear),
            "idw" => Ok(ReconstructionMode::idw_default()),
            "nearest" => Ok(ReconstructionMode::NearestNeighbor),
            other => Err(Error::InvalidArgument(format!(
                "unknown reconstruction mode {other:?} (expected delaunay, idw or nearest)"
            ))),
        }
    }
}

/// Rebuild one variable on the point set's originating grid.
pub fn reconstruct(ps: &SampledPointSet, variable: &str, mode: ReconstructionMode) -> Result<Field> {
    let values = ps.variable_values(variable)?;
    if ps.is_empty() {
        return Err(Error::DegenerateGeometry(
            "cannot reconstruct from an empty point set".into(),
        ));
    }
    if let ReconstructionMode::ShepardIdw { neighbors, power } = mode {
        if neighbors == 0 || !(power > 0.0) {
            return Err(Error::InvalidArgument(
                "IDW needs neighbors >= 1 and power > 0".into(),
            ));
        }
    }

    let dims = ps.dims();
    let sites: Vec<[i64; 3]> = ps
        .indices()
        .iter()
        .map(|&idx| {
            let (i, j, k) = dims.delinearize(idx);
            [i as i64, j as i64, k as i64]
        })
        .collect();

    let out = match mode {
        ReconstructionMode::NearestNeighbor => {
            let tree = KdTree::build(sites, ps.indices().to_vec());
            grid_map(ps, |q| values[tree.nearest(q).id as usize])
        }
        ReconstructionMode::ShepardIdw { neighbors, power } => {
            let tree = KdTree::build(sites, ps.indices().to_vec());
            grid_map(ps, |q| idw_value(&tree, &values, q, neighbors, power))
        }
        ReconstructionMode::DelaunayLinear => {
            match Delaunay3::build(sites.clone(), ps.indices().to_vec()) {
                Ok(dt) => delaunay_evaluate(ps, &dt, &values)?,
                Err(Flatness::Single) => {
                    // One distinct site: constant field.
                    vec![values[0]; dims.total() as usize]
                }
                Err(Flatness::Collinear) => {
                    log::warn!(
                        "samples are collinear; using exact linear interpolation along the line"
                    );
                    collinear_evaluate(ps, &sites, &values)
                }
                Err(Flatness::Coplanar) => {
                    log::warn!(
                        "samples are coplanar; falling back to inverse-distance weighting"
                    );
                    let tree = KdTree::build(sites, ps.indices().to_vec());
                    grid_map(ps, |q| {
                        idw_value(&tree, &values, q, DEFAULT_IDW_NEIGHBORS, DEFAULT_IDW_POWER)
                    })
                }
            }
        }
    };
    Field::new(variable, dims, out)
}

/// Evaluate a per-grid-point closure over the whole grid.
fn grid_map(ps: &SampledPointSet, f: impl Fn([i64; 3]) -> f64) -> Vec<f64> {
    let dims = ps.dims();
    let mut out = Vec::with_capacity(dims.total() as usize);
    for k in 0..dims.nz() {
        for j in 0..dims.ny() {
            for i in 0..dims.nx() {
                out.push(f([i as i64, j as i64, k as i64]));
            }
        }
    }
    out
}

fn idw_value(tree: &KdTree, values: &[f64], q: [i64; 3], neighbors: usize, power: f64) -> f64 {
    let near = tree.k_nearest(q, neighbors);
    if near[0].dist2 == 0 {
        return values[near[0].id as usize];
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for n in &near {
        let v = values[n.id as usize];
        let w = 1.0 / (n.dist2 as f64).powf(power / 2.0);
        num += w * v;
        den += w;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    // The quotient is a convex combination; clamp away last-ulp excursions.
    (num / den).clamp(lo, hi)
}

/// Exact interpolation for collinear sites: grid points on the segment
/// interpolate between their bracketing samples, everything else takes the
/// nearest sample's value.
fn collinear_evaluate(ps: &SampledPointSet, sites: &[[i64; 3]], values: &[f64]) -> Vec<f64> {
    let origin = sites[0];
    let dir = sites
        .iter()
        .map(|s| sub(*s, origin))
        .find(|d| *d != [0, 0, 0])
        .expect("at least two distinct collinear sites");

    // Parameter of each site along the line, in direction-dot units.
    let mut params: Vec<(i64, usize)> = sites
        .iter()
        .enumerate()
        .map(|(i, s)| (dot(sub(*s, origin), dir), i))
        .collect();
    params.sort_unstable();

    let tree = KdTree::build(sites.to_vec(), ps.indices().to_vec());
    grid_map(ps, |q| {
        let rel = sub(q, origin);
        if cross(rel, dir) != [0, 0, 0] {
            // Off the line: outside the (measure-zero) hull.
            return values[tree.nearest(q).id as usize];
        }
        let t = dot(rel, dir);
        match params.binary_search_by_key(&t, |&(p, _)| p) {
            Ok(i) => values[params[i].1],
            Err(pos) => {
                if pos == 0 {
                    values[params[0].1]
                } else if pos == params.len() {
                    values[params[params.len() - 1].1]
                } else {
                    let (ta, ia) = params[pos - 1];
                    let (tb, ib) = params[pos];
                    let frac = (t - ta) as f64 / (tb - ta) as f64;
                    values[ia] + (values[ib] - values[ia]) * frac
                }
            }
        }
    })
}

/// Rasterize every real tet onto the grid and interpolate; uncovered points
/// are outside the hull and take the nearest sample's value.
fn delaunay_evaluate(ps: &SampledPointSet, dt: &Delaunay3, values: &[f64]) -> Result<Vec<f64>> {
    let dims = ps.dims();
    let n = dims.total() as usize;

    // Owner of each grid point: the covering tet with the smallest sorted
    // vertex-priority key, so ownership of shared faces is independent of
    // tet iteration order (and of thread split, if parallelized).
    let tets = dt.real_tets();
    let mut keys: Vec<[u64; 4]> = Vec::with_capacity(tets.len());
    for t in &tets {
        let mut key = t.map(|v| ps.indices()[v as usize]);
        key.sort_unstable();
        keys.push(key);
    }
    let mut owner: Vec<u32> = vec![u32::MAX; n];

    for (ti, t) in tets.iter().enumerate() {
        let corners = t.map(|v| dt.point(v));
        let (lo, hi) = bbox(&corners, dims);
        for k in lo[2]..=hi[2] {
            for j in lo[1]..=hi[1] {
                for i in lo[0]..=hi[0] {
                    let q = [i, j, k];
                    if !inside_tet(&corners, q) {
                        continue;
                    }
                    let linear =
                        dims.linear(i as u32, j as u32, k as u32) as usize;
                    let prev = owner[linear];
                    if prev == u32::MAX || keys[ti] < keys[prev as usize] {
                        owner[linear] = ti as u32;
                    }
                }
            }
        }
    }

    // Nearest-sample fallback for points outside the hull.
    let sites: Vec<[i64; 3]> = (0..ps.len() as u32).map(|i| dt.point(i)).collect();
    let tree = KdTree::build(sites, ps.indices().to_vec());

    let mut out = Vec::with_capacity(n);
    let mut linear = 0usize;
    for k in 0..dims.nz() {
        for j in 0..dims.ny() {
            for i in 0..dims.nx() {
                let q = [i as i64, j as i64, k as i64];
                let ti = owner[linear];
                if ti == u32::MAX {
                    out.push(values[tree.nearest(q).id as usize]);
                } else {
                    out.push(barycentric_value(&tets[ti as usize], dt, values, q)?);
                }
                linear += 1;
            }
        }
    }
    Ok(out)
}

fn bbox(corners: &[[i64; 3]; 4], dims: crate::fieldio::GridDims) -> ([i64; 3], [i64; 3]) {
    let mut lo = [i64::MAX; 3];
    let mut hi = [i64::MIN; 3];
    for c in corners {
        for a in 0..3 {
            lo[a] = lo[a].min(c[a]);
            hi[a] = hi[a].max(c[a]);
        }
    }
    let max = [
        dims.nx() as i64 - 1,
        dims.ny() as i64 - 1,
        dims.nz() as i64 - 1,
    ];
    for a in 0..3 {
        lo[a] = lo[a].max(0);
        hi[a] = hi[a].min(max[a]);
    }
    (lo, hi)
}

/// Face k of a positively oriented tet, ordered so the opposite vertex is on
/// the positive side (same table as the triangulation uses).
const FACES: [[usize; 3]; 4] = [[1, 3, 2], [0, 2, 3], [0, 3, 1], [0, 1, 2]];

fn orient(a: [i64; 3], b: [i64; 3], c: [i64; 3], d: [i64; 3]) -> i128 {
    let u = sub(b, a);
    let v = sub(c, a);
    let w = sub(d, a);
    let ux = u[0] as i128;
    let uy = u[1] as i128;
    let uz = u[2] as i128;
    let vx = v[0] as i128;
    let vy = v[1] as i128;
    let vz = v[2] as i128;
    let wx = w[0] as i128;
    let wy = w[1] as i128;
    let wz = w[2] as i128;
    ux * (vy * wz - vz * wy) - uy * (vx * wz - vz * wx) + uz * (vx * wy - vy * wx)
}

fn inside_tet(corners: &[[i64; 3]; 4], q: [i64; 3]) -> bool {
    for f in FACES {
        if orient(corners[f[0]], corners[f[1]], corners[f[2]], q) < 0 {
            return false;
        }
    }
    true
}

/// Linear interpolation at `q` inside a tet: barycentric weights are ratios
/// of exact integer orientation determinants, so weights at a vertex are
/// exactly (1, 0, 0, 0) and sample values reproduce bit-for-bit.
fn barycentric_value(t: &[u32; 4], dt: &Delaunay3, values: &[f64], q: [i64; 3]) -> Result<f64> {
    let corners = t.map(|v| dt.point(v));
    let vol = orient(corners[0], corners[1], corners[2], corners[3]);
    if vol <= 0 {
        return Err(Error::Internal(
            "tetrahedron with non-positive volume in interpolation".into(),
        ));
    }
    let vol_f = vol as f64;
    let mut acc = 0.0;
    for (k, f) in FACES.iter().enumerate() {
        let o = orient(corners[f[0]], corners[f[1]], corners[f[2]], q);
        debug_assert!(o >= 0);
        let lambda = o as f64 / vol_f;
        acc += lambda * values[t[k] as usize];
    }
    Ok(acc)
}

fn sub(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [i64; 3], b: [i64; 3]) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
