//! Incremental 3-D Delaunay tetrahedralization with exact integer predicates.
//!
//! Sites are grid points, so coordinates are small integers and both the
//! orientation and in-sphere determinants evaluate exactly in i128 — no
//! floating-point filters, no epsilons. Grid data is also maximally
//! degenerate (lattice points are cospherical in bulk), which is handled by a
//! symbolic perturbation of the paraboloid lift: site `i` is lifted by an
//! infinitesimal `eps^rank(i)` keyed on its priority (originating linear
//! index). Because all perturbations live in one matrix column, the perturbed
//! in-sphere determinant is affine in them and the tie-break terminates after
//! scanning at most five cofactors, the last of which is the tet's own
//! orientation and never zero. The perturbed point set is in general
//! position, so the triangulation is unique and independent of insertion
//! order.
//!
//! The hull is closed with ghost tets sharing a symbolic vertex at infinity.
//! A ghost tet conflicts with a point strictly outside its hull facet; for
//! points exactly on the facet plane the conflict is decided by the adjacent
//! real tet's perturbed in-sphere test, which on the plane reduces to the
//! facet's circumdisk test.

use crate::rng::SplitMix64;

/// Symbolic vertex at infinity.
pub(crate) const GHOST: u32 = u32::MAX;

/// Face k of a tet is opposite vertex k, ordered so that
/// `orient3d(face, v[k])` equals the tet's orientation determinant.
const FACES: [[usize; 3]; 4] = [[1, 3, 2], [0, 2, 3], [0, 3, 1], [0, 1, 2]];

/// Even permutations that move a given slot to slot 3 (so ghost tets keep the
/// symbolic vertex in a fixed place without flipping orientation).
const TO_SLOT3: [[usize; 4]; 4] = [
    [3, 2, 1, 0], // swap (0,3) and (1,2)
    [2, 3, 0, 1], // swap (1,3) and (0,2)
    [1, 0, 3, 2], // swap (2,3) and (0,1)
    [0, 1, 2, 3],
];

#[derive(Debug, Clone)]
struct Tet {
    v: [u32; 4],
    /// Neighbor opposite vertex k.
    n: [u32; 4],
    alive: bool,
}

/// Why a point set cannot be tetrahedralized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Flatness {
    /// Fewer than two distinct points.
    Single,
    /// All points on one line.
    Collinear,
    /// All points on one plane.
    Coplanar,
}

pub(crate) struct Delaunay3 {
    pts: Vec<[i64; 3]>,
    prio: Vec<u64>,
    tets: Vec<Tet>,
    free: Vec<u32>,
    hint: u32,
}

#[inline]
fn orient3d(a: [i64; 3], b: [i64; 3], c: [i64; 3], d: [i64; 3]) -> i128 {
    let ux = (b[0] - a[0]) as i128;
    let uy = (b[1] - a[1]) as i128;
    let uz = (b[2] - a[2]) as i128;
    let vx = (c[0] - a[0]) as i128;
    let vy = (c[1] - a[1]) as i128;
    let vz = (c[2] - a[2]) as i128;
    let wx = (d[0] - a[0]) as i128;
    let wy = (d[1] - a[1]) as i128;
    let wz = (d[2] - a[2]) as i128;
    ux * (vy * wz - vz * wy) - uy * (vx * wz - vz * wx) + uz * (vx * wy - vy * wx)
}

/// 3x3 determinant of rows (p - e) for p in [r0, r1, r2].
#[inline]
fn det3_rows(r0: [i128; 3], r1: [i128; 3], r2: [i128; 3]) -> i128 {
    r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
}

impl Delaunay3 {
    /// Build the triangulation of distinct points with distinct priorities.
    /// Returns the flatness class instead if the points are degenerate.
    pub fn build(pts: Vec<[i64; 3]>, prio: Vec<u64>) -> Result<Self, Flatness> {
        assert_eq!(pts.len(), prio.len());
        let n = pts.len();
        if n < 2 {
            return Err(Flatness::Single);
        }
        // Seed the triangulation with four affinely independent points.
        let p0 = 0usize;
        let p1 = (1..n)
            .find(|&i| pts[i] != pts[p0])
            .ok_or(Flatness::Single)?;
        let p2 = (1..n)
            .find(|&i| {
                let o = cross_norm2(pts[p0], pts[p1], pts[i]);
                o != 0
            })
            .ok_or(Flatness::Collinear)?;
        let p3 = (1..n)
            .find(|&i| orient3d(pts[p0], pts[p1], pts[p2], pts[i]) != 0)
            .ok_or(Flatness::Coplanar)?;

        let mut dt = Delaunay3 {
            pts,
            prio,
            tets: Vec::new(),
            free: Vec::new(),
            hint: 0,
        };
        dt.init_tet(p0 as u32, p1 as u32, p2 as u32, p3 as u32);

        let mut rest: Vec<u32> = (0..n as u32)
            .filter(|&i| ![p0, p1, p2, p3].contains(&(i as usize)))
            .collect();
        // Randomized insertion order keeps cavities small; the result does
        // not depend on it.
        let mut rng = SplitMix64::new(0x3d3a_u64);
        rng.shuffle(&mut rest);
        for p in rest {
            dt.insert(p);
        }
        Ok(dt)
    }

    fn init_tet(&mut self, a: u32, b: u32, c: u32, d: u32) {
        let (a, b) = if orient3d(
            self.pts[a as usize],
            self.pts[b as usize],
            self.pts[c as usize],
            self.pts[d as usize],
        ) < 0
        {
            (b, a)
        } else {
            (a, b)
        };
        let real = self.alloc(Tet {
            v: [a, b, c, d],
            n: [0; 4],
            alive: true,
        });
        let mut ghosts = [0u32; 4];
        for k in 0..4 {
            let f = FACES[k].map(|s| self.tets[real as usize].v[s]);
            // Reversed facet puts the interior on the negative side.
            let g = self.alloc(Tet {
                v: [f[0], f[2], f[1], GHOST],
                n: [0; 4],
                alive: true,
            });
            ghosts[k] = g;
        }
        for k in 0..4 {
            self.tets[real as usize].n[k] = ghosts[k];
            self.tets[ghosts[k] as usize].n[3] = real;
        }
        // Wire ghost-to-ghost adjacency: ghost k's face j (j < 3) is shared
        // with the ghost across the real edge it keeps.
        for k in 0..4 {
            for j in 0..3 {
                let g = ghosts[k];
                let face: Vec<u32> = FACES[j]
                    .iter()
                    .map(|&s| self.tets[g as usize].v[s])
                    .collect();
                // The two real vertices of this infinite face.
                let mut reals: Vec<u32> = face.iter().copied().filter(|&x| x != GHOST).collect();
                reals.sort_unstable();
                // Find the other ghost sharing both real vertices.
                for &g2 in &ghosts {
                    if g2 == g {
                        continue;
                    }
                    let vs = self.tets[g2 as usize].v;
                    let mut shared: Vec<u32> =
                        vs.iter().copied().filter(|&x| x != GHOST && reals.contains(&x)).collect();
                    shared.sort_unstable();
                    if shared == reals {
                        self.tets[g as usize].n[j] = g2;
                        break;
                    }
                }
            }
        }
        self.hint = real;
    }

    fn alloc(&mut self, t: Tet) -> u32 {
        if let Some(id) = self.free.pop() {
            self.tets[id as usize] = t;
            id
        } else {
            self.tets.push(t);
            (self.tets.len() - 1) as u32
        }
    }

    #[inline]
    fn is_ghost(&self, t: u32) -> bool {
        self.tets[t as usize].v[3] == GHOST
    }

    /// Perturbed in-sphere test for the positively oriented real tet
    /// (a, b, c, d): positive when `e` lies strictly inside the perturbed
    /// circumsphere. Never returns zero.
    fn insphere_sos(&self, a: u32, b: u32, c: u32, d: u32, e: u32) -> i32 {
        let pe = self.pts[e as usize];
        let ids = [a, b, c, d];
        let mut rows = [[0i128; 3]; 4];
        let mut lift = [0i128; 4];
        for (i, &id) in ids.iter().enumerate() {
            let p = self.pts[id as usize];
            let dx = (p[0] - pe[0]) as i128;
            let dy = (p[1] - pe[1]) as i128;
            let dz = (p[2] - pe[2]) as i128;
            rows[i] = [dx, dy, dz];
            lift[i] = dx * dx + dy * dy + dz * dz;
        }
        // Cofactors of the lifted column.
        let m = |skip: usize| -> i128 {
            let mut r = [[0i128; 3]; 3];
            let mut w = 0;
            for i in 0..4 {
                if i != skip {
                    r[w] = rows[i];
                    w += 1;
                }
            }
            det3_rows(r[0], r[1], r[2])
        };
        let cof = [m(0), -m(1), m(2), -m(3)];
        let det: i128 = (0..4).map(|i| lift[i] * cof[i]).sum();
        if det != 0 {
            return sign(det);
        }
        // Symbolic perturbation: lift each site by eps^rank, strongest for the
        // lowest priority. The first nonzero cofactor in rank order decides.
        // e's cofactor is minus the tet orientation, which is never zero.
        let mut order: Vec<(u64, usize)> = (0..4).map(|i| (self.prio[ids[i] as usize], i)).collect();
        order.push((self.prio[e as usize], 4));
        order.sort_unstable();
        for &(_, who) in &order {
            let c = if who == 4 { -cof.iter().sum::<i128>() } else { cof[who] };
            if c != 0 {
                return sign(c);
            }
        }
        unreachable!("perturbed in-sphere test cannot be zero for a valid tet");
    }

    /// Does tet `t` conflict with point `p` in the perturbed metric?
    fn conflicts(&self, t: u32, p: u32) -> bool {
        let tet = &self.tets[t as usize];
        if tet.v[3] == GHOST {
            let [a, b, c] = [tet.v[0], tet.v[1], tet.v[2]];
            let o = orient3d(
                self.pts[a as usize],
                self.pts[b as usize],
                self.pts[c as usize],
                self.pts[p as usize],
            );
            if o != 0 {
                return o > 0;
            }
            // On the hull facet plane: in conflict exactly when inside the
            // facet's circumdisk, i.e. in conflict with the adjacent real tet.
            let inner = tet.n[3];
            debug_assert!(!self.is_ghost(inner));
            let iv = self.tets[inner as usize].v;
            self.insphere_sos(iv[0], iv[1], iv[2], iv[3], p) > 0
        } else {
            let v = tet.v;
            self.insphere_sos(v[0], v[1], v[2], v[3], p) > 0
        }
    }

    /// Find some tet in conflict with `p` by walking real tets from the hint,
    /// falling back to a scan if the walk stalls.
    fn locate_conflict(&self, p: u32) -> u32 {
        let mut cur = self.hint;
        if cur as usize >= self.tets.len() || !self.tets[cur as usize].alive || self.is_ghost(cur) {
            cur = match self.first_alive_real() {
                Some(t) => t,
                None => return self.scan_conflict(p),
            };
        }
        let pq = self.pts[p as usize];
        let max_steps = 4 * self.tets.len() + 64;
        let mut steps = 0usize;
        loop {
            steps += 1;
            if steps > max_steps {
                return self.scan_conflict(p);
            }
            let tet = &self.tets[cur as usize];
            let mut moved = false;
            // Rotate the face scan so degenerate walks cannot ping-pong on a
            // fixed face pair.
            let rot = (steps + p as usize) & 3;
            for kk in 0..4 {
                let k = (kk + rot) & 3;
                let f = FACES[k].map(|s| tet.v[s]);
                let o = orient3d(
                    self.pts[f[0] as usize],
                    self.pts[f[1] as usize],
                    self.pts[f[2] as usize],
                    pq,
                );
                if o < 0 {
                    let nb = tet.n[k];
                    if self.is_ghost(nb) {
                        // p sees this hull facet from outside: the ghost is in
                        // conflict.
                        return nb;
                    }
                    cur = nb;
                    moved = true;
                    break;
                }
            }
            if !moved {
                // Inside or on the boundary of a real tet: strict conflict.
                return cur;
            }
        }
    }

    fn first_alive_real(&self) -> Option<u32> {
        (0..self.tets.len() as u32).find(|&t| self.tets[t as usize].alive && !self.is_ghost(t))
    }

    fn scan_conflict(&self, p: u32) -> u32 {
        for t in 0..self.tets.len() as u32 {
            if self.tets[t as usize].alive && self.conflicts(t, p) {
                return t;
            }
        }
        unreachable!("an uninserted point conflicts with at least one tet");
    }

    /// Bowyer-Watson insertion of point `p`.
    fn insert(&mut self, p: u32) {
        let start = self.locate_conflict(p);
        debug_assert!(self.conflicts(start, p));

        // Flood the conflict region.
        let mut region = vec![start];
        let mut marked = std::collections::HashSet::new();
        marked.insert(start);
        let mut boundary: Vec<(u32, usize)> = Vec::new();
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            for k in 0..4 {
                let nb = self.tets[t as usize].n[k];
                if marked.contains(&nb) {
                    continue;
                }
                if self.conflicts(nb, p) {
                    marked.insert(nb);
                    region.push(nb);
                    stack.push(nb);
                } else {
                    boundary.push((t, k));
                }
            }
        }

        // One new tet per boundary facet: [facet as seen from the conflict
        // side, p]. Ghost-bearing facets produce new ghost tets.
        let mut created: Vec<u32> = Vec::with_capacity(boundary.len());
        let mut facet_of: Vec<[u32; 3]> = Vec::with_capacity(boundary.len());
        let mut survivor_of: Vec<(u32, usize)> = Vec::with_capacity(boundary.len());
        for &(t, k) in &boundary {
            let f = FACES[k].map(|s| self.tets[t as usize].v[s]);
            let survivor = self.tets[t as usize].n[k];
            // A survivor may border the cavity through several faces; find
            // the one shared with this particular conflict tet.
            let back = (0..4)
                .find(|&j| self.tets[survivor as usize].n[j] == t)
                .expect("survivor points back at the conflict tet");
            let mut v = [f[0], f[1], f[2], p];
            if let Some(gslot) = v.iter().position(|&x| x == GHOST) {
                v = TO_SLOT3[gslot].map(|s| v[s]);
            } else {
                debug_assert!(
                    orient3d(
                        self.pts[v[0] as usize],
                        self.pts[v[1] as usize],
                        self.pts[v[2] as usize],
                        self.pts[v[3] as usize],
                    ) > 0,
                    "new tet must be positively oriented"
                );
            }
            let id = self.alloc(Tet {
                v,
                n: [u32::MAX; 4],
                alive: true,
            });
            created.push(id);
            facet_of.push(f);
            survivor_of.push((survivor, back));
        }

        // Wire each new tet to its boundary survivor (across the face
        // opposite p) and to sibling new tets (across faces containing p).
        let mut side_faces: std::collections::HashMap<(u32, u32), (u32, usize)> =
            std::collections::HashMap::new();
        for (idx, &id) in created.iter().enumerate() {
            let (survivor, back) = survivor_of[idx];
            let p_slot = self.tets[id as usize]
                .v
                .iter()
                .position(|&x| x == p)
                .expect("new tet contains p");
            self.tets[id as usize].n[p_slot] = survivor;
            self.tets[survivor as usize].n[back] = id;

            // Side faces: the three faces of the new tet that contain p.
            let f = facet_of[idx];
            for pair_drop in 0..3 {
                let mut pair: Vec<u32> = (0..3).filter(|&x| x != pair_drop).map(|x| f[x]).collect();
                pair.sort_unstable();
                let key = (pair[0], pair[1]);
                // The face of `id` containing p and the two pair vertices is
                // the one opposite the dropped facet vertex.
                let opp = self.tets[id as usize]
                    .v
                    .iter()
                    .position(|&x| x == f[pair_drop])
                    .expect("facet vertex present");
                match side_faces.remove(&key) {
                    None => {
                        side_faces.insert(key, (id, opp));
                    }
                    Some((other, other_face)) => {
                        self.tets[id as usize].n[opp] = other;
                        self.tets[other as usize].n[other_face] = id;
                    }
                }
            }
        }
        debug_assert!(side_faces.is_empty(), "cavity boundary must close");

        for t in region {
            self.tets[t as usize].alive = false;
            self.free.push(t);
        }
        // Prefer a real tet as the next walk start.
        self.hint = created
            .iter()
            .copied()
            .find(|&t| !self.is_ghost(t))
            .unwrap_or(self.hint);
    }

    /// All alive real tets as vertex quadruples (ids into the input points).
    pub fn real_tets(&self) -> Vec<[u32; 4]> {
        self.tets
            .iter()
            .filter(|t| t.alive && t.v[3] != GHOST)
            .map(|t| t.v)
            .collect()
    }

    pub fn point(&self, id: u32) -> [i64; 3] {
        self.pts[id as usize]
    }

    /// Validation for tests: checks orientation, neighbor symmetry, the ghost
    /// facet convention and the empty-circumsphere property against every
    /// site. Quadratic; call on small inputs only.
    #[cfg(test)]
    pub fn validate(&self) -> std::result::Result<(), String> {
        let alive: Vec<u32> = (0..self.tets.len() as u32)
            .filter(|&t| self.tets[t as usize].alive)
            .collect();
        for &t in &alive {
            let tet = &self.tets[t as usize];
            if tet.v[3] == GHOST {
                // Ghost facet must face outward: the adjacent real tet's
                // opposite vertex lies on its negative side.
                let inner = tet.n[3];
                let itet = &self.tets[inner as usize];
                if itet.v[3] == GHOST || !itet.alive {
                    return Err(format!("ghost {t} has bad inner neighbor"));
                }
                let shared: Vec<u32> = tet.v[..3].to_vec();
                let opp = itet
                    .v
                    .iter()
                    .copied()
                    .find(|x| !shared.contains(x))
                    .ok_or_else(|| format!("ghost {t} does not share a facet"))?;
                let o = orient3d(
                    self.pts[tet.v[0] as usize],
                    self.pts[tet.v[1] as usize],
                    self.pts[tet.v[2] as usize],
                    self.pts[opp as usize],
                );
                if o >= 0 {
                    return Err(format!("ghost {t} facet not outward (o = {o})"));
                }
            } else {
                let o = orient3d(
                    self.pts[tet.v[0] as usize],
                    self.pts[tet.v[1] as usize],
                    self.pts[tet.v[2] as usize],
                    self.pts[tet.v[3] as usize],
                );
                if o <= 0 {
                    return Err(format!("real tet {t} not positively oriented (o = {o})"));
                }
                for site in 0..self.pts.len() as u32 {
                    if tet.v.contains(&site) {
                        continue;
                    }
                    if self.insphere_sos(tet.v[0], tet.v[1], tet.v[2], tet.v[3], site) > 0 {
                        return Err(format!(
                            "site {site} is inside the circumsphere of tet {t}"
                        ));
                    }
                }
            }
            for k in 0..4 {
                let nb = tet.n[k];
                if !self.tets[nb as usize].alive {
                    return Err(format!("tet {t} has dead neighbor {nb}"));
                }
                if !self.tets[nb as usize].n.contains(&t) {
                    return Err(format!("neighbor link {t} -> {nb} not symmetric"));
                }
            }
        }
        Ok(())
    }
}

#[inline]
fn sign(x: i128) -> i32 {
    match x.cmp(&0) {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    }
}

/// Squared norm of the cross product (a-o) x (b-o); zero iff collinear.
fn cross_norm2(o: [i64; 3], a: [i64; 3], b: [i64; 3]) -> i128 {
    let ux = (a[0] - o[0]) as i128;
    let uy = (a[1] - o[1]) as i128;
    let uz = (a[2] - o[2]) as i128;
    let vx = (b[0] - o[0]) as i128;
    let vy = (b[1] - o[1]) as i128;
    let vz = (b[2] - o[2]) as i128;
    let cx = uy * vz - uz * vy;
    let cy = uz * vx - ux * vz;
    let cz = ux * vy - uy * vx;
    cx * cx + cy * cy + cz * cz
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn volumes_sum(dt: &Delaunay3) -> i128 {
        dt.real_tets()
            .iter()
            .map(|t| {
                orient3d(
                    dt.point(t[0]),
                    dt.point(t[1]),
                    dt.point(t[2]),
                    dt.point(t[3]),
                )
            })
            .sum()
    }

    #[test]
    fn single_tet() {
        let pts = vec![[0, 0, 0], [4, 0, 0], [0, 4, 0], [0, 0, 4]];
        let dt = Delaunay3::build(pts, vec![0, 1, 2, 3]).unwrap();
        dt.validate().unwrap();
        assert_eq!(dt.real_tets().len(), 1);
    }

    #[test]
    fn unit_cube_is_fully_degenerate() {
        // All eight corners are cospherical; the perturbation must still
        // produce a valid triangulation that fills the cube.
        let mut pts = Vec::new();
        for z in 0..2 {
            for y in 0..2 {
                for x in 0..2 {
                    pts.push([x, y, z]);
                }
            }
        }
        let prio: Vec<u64> = (0..8).collect();
        let dt = Delaunay3::build(pts, prio).unwrap();
        dt.validate().unwrap();
        // 6 * volume of the cube.
        assert_eq!(volumes_sum(&dt), 6);
        let n = dt.real_tets().len();
        assert!((5..=6).contains(&n), "cube splits into 5 or 6 tets, got {n}");
    }

    #[test]
    fn full_lattice_fills_space() {
        let mut pts = Vec::new();
        for z in 0..4i64 {
            for y in 0..4 {
                for x in 0..4 {
                    pts.push([x, y, z]);
                }
            }
        }
        let prio: Vec<u64> = (0..pts.len() as u64).collect();
        let dt = Delaunay3::build(pts, prio).unwrap();
        dt.validate().unwrap();
        assert_eq!(volumes_sum(&dt), 6 * 27);
    }

    #[test]
    fn insertion_order_does_not_change_the_result() {
        let mut rng = SplitMix64::new(4);
        let mut pts = Vec::new();
        while pts.len() < 24 {
            let p = [
                rng.next_below(6) as i64,
                rng.next_below(6) as i64,
                rng.next_below(6) as i64,
            ];
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        let prio: Vec<u64> = (0..pts.len() as u64).map(|i| i * 7 + 3).collect();
        let dt1 = Delaunay3::build(pts.clone(), prio.clone()).unwrap();
        // Same sites presented in reverse: priorities travel with the points,
        // so the triangulation must be identical as a set of vertex tuples.
        let mut rev_pts = pts.clone();
        rev_pts.reverse();
        let mut rev_prio = prio.clone();
        rev_prio.reverse();
        let dt2 = Delaunay3::build(rev_pts, rev_prio).unwrap();
        dt1.validate().unwrap();
        dt2.validate().unwrap();

        let canon = |dt: &Delaunay3| -> Vec<[[i64; 3]; 4]> {
            let mut tets: Vec<[[i64; 3]; 4]> = dt
                .real_tets()
                .iter()
                .map(|t| {
                    let mut ps = t.map(|v| dt.point(v));
                    ps.sort_unstable();
                    ps
                })
                .collect();
            tets.sort_unstable();
            tets
        };
        assert_eq!(canon(&dt1), canon(&dt2));
    }

    #[test]
    fn random_lattice_subsets_validate() {
        let mut rng = SplitMix64::new(99);
        for round in 0..8 {
            let mut pts = Vec::new();
            let target = 10 + 6 * round;
            while pts.len() < target {
                let p = [
                    rng.next_below(7) as i64,
                    rng.next_below(7) as i64,
                    rng.next_below(7) as i64,
                ];
                if !pts.contains(&p) {
                    pts.push(p);
                }
            }
            let prio: Vec<u64> = pts
                .iter()
                .map(|p| (p[0] + 7 * (p[1] + 7 * p[2])) as u64)
                .collect();
            match Delaunay3::build(pts, prio) {
                Ok(dt) => dt.validate().unwrap(),
                Err(f) => panic!("unexpected flatness {f:?}"),
            }
        }
    }

    #[test]
    fn flatness_detection() {
        assert_eq!(
            Delaunay3::build(vec![[1, 2, 3]], vec![0]).err(),
            Some(Flatness::Single)
        );
        let line: Vec<[i64; 3]> = (0..5).map(|i| [i, 0, 0]).collect();
        assert_eq!(
            Delaunay3::build(line, (0..5).collect()).err(),
            Some(Flatness::Collinear)
        );
        let mut plane = Vec::new();
        for y in 0..3 {
            for x in 0..3 {
                plane.push([x, y, 2]);
            }
        }
        assert_eq!(
            Delaunay3::build(plane, (0..9).collect()).err(),
            Some(Flatness::Coplanar)
        );
    }
}
