//! A small kd-tree over integer 3-D points with deterministic tie-breaking.
//!
//! Queries compare candidates by `(squared distance, priority)` so that
//! equidistant sites resolve to the one with the lowest priority (the lowest
//! originating linear index), independent of build or traversal order.

/// Balanced kd-tree storing point ids into a caller-owned point array.
pub(crate) struct KdTree {
    pts: Vec<[i64; 3]>,
    prio: Vec<u64>,
    /// Point ids arranged as an implicit tree: each node's subrange is split
    /// at its median.
    order: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Neighbor {
    pub dist2: i64,
    pub prio: u64,
    pub id: u32,
}

impl Neighbor {
    fn key(&self) -> (i64, u64) {
        (self.dist2, self.prio)
    }
}

impl KdTree {
    pub fn build(pts: Vec<[i64; 3]>, prio: Vec<u64>) -> Self {
        assert_eq!(pts.len(), prio.len());
        let mut order: Vec<u32> = (0..pts.len() as u32).collect();
        let mut tree = KdTree { pts, prio, order: Vec::new() };
        build_recursive(&tree.pts, &tree.prio, &mut order, 0);
        tree.order = order;
        tree
    }

    /// Nearest site to `q`; equidistant sites resolve to the lowest priority.
    pub fn nearest(&self, q: [i64; 3]) -> Neighbor {
        debug_assert!(!self.pts.is_empty());
        let mut best = Neighbor {
            dist2: i64::MAX,
            prio: u64::MAX,
            id: u32::MAX,
        };
        self.search(q, 0, self.order.len(), 0, &mut best);
        best
    }

    /// The `k` nearest sites, sorted ascending by `(distance, priority)`.
    pub fn k_nearest(&self, q: [i64; 3], k: usize) -> Vec<Neighbor> {
        let k = k.min(self.pts.len()).max(1);
        let mut heap: Vec<Neighbor> = Vec::with_capacity(k);
        self.search_k(q, 0, self.order.len(), 0, k, &mut heap);
        heap.sort_by_key(Neighbor::key);
        heap
    }

    fn search(&self, q: [i64; 3], lo: usize, hi: usize, depth: usize, best: &mut Neighbor) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let id = self.order[mid];
        let p = self.pts[id as usize];
        let cand = Neighbor {
            dist2: dist2(p, q),
            prio: self.prio[id as usize],
            id,
        };
        if cand.key() < best.key() {
            *best = cand;
        }
        let axis = depth % 3;
        let delta = q[axis] - p[axis];
        let (near, far) = if delta < 0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(q, near.0, near.1, depth + 1, best);
        // Equal plane distance must still be explored: a tie in distance can
        // win on priority.
        if delta * delta <= best.dist2 {
            self.search(q, far.0, far.1, depth + 1, best);
        }
    }

    fn search_k(
        &self,
        q: [i64; 3],
        lo: usize,
        hi: usize,
        depth: usize,
        k: usize,
        heap: &mut Vec<Neighbor>,
    ) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let id = self.order[mid];
        let p = self.pts[id as usize];
        let cand = Neighbor {
            dist2: dist2(p, q),
            prio: self.prio[id as usize],
            id,
        };
        push_bounded(heap, k, cand);
        let axis = depth % 3;
        let delta = q[axis] - p[axis];
        let (near, far) = if delta < 0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search_k(q, near.0, near.1, depth + 1, k, heap);
        let worst = if heap.len() < k {
            i64::MAX
        } else {
            heap.iter().map(|n| n.dist2).max().unwrap_or(i64::MAX)
        };
        if delta * delta <= worst {
            self.search_k(q, far.0, far.1, depth + 1, k, heap);
        }
    }
}

fn push_bounded(heap: &mut Vec<Neighbor>, k: usize, cand: Neighbor) {
    if heap.len() < k {
        heap.push(cand);
        return;
    }
    // Replace the worst entry if the candidate beats it.
    let worst = heap
        .iter()
        .enumerate()
        .max_by_key(|(_, n)| n.key())
        .map(|(i, _)| i)
        .expect("heap is non-empty");
    if cand.key() < heap[worst].key() {
        heap[worst] = cand;
    }
}

fn build_recursive(pts: &[[i64; 3]], prio: &[u64], order: &mut [u32], depth: usize) {
    if order.len() <= 1 {
        return;
    }
    let axis = depth % 3;
    let mid = order.len() / 2;
    order.select_nth_unstable_by_key(mid, |&id| {
        (pts[id as usize][axis], prio[id as usize])
    });
    let (left, rest) = order.split_at_mut(mid);
    build_recursive(pts, prio, left, depth + 1);
    build_recursive(pts, prio, &mut rest[1..], depth + 1);
}

fn dist2(a: [i64; 3], b: [i64; 3]) -> i64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn brute_nearest(pts: &[[i64; 3]], prio: &[u64], q: [i64; 3]) -> Neighbor {
        let mut best = Neighbor {
            dist2: i64::MAX,
            prio: u64::MAX,
            id: u32::MAX,
        };
        for (id, &p) in pts.iter().enumerate() {
            let cand = Neighbor {
                dist2: dist2(p, q),
                prio: prio[id],
                id: id as u32,
            };
            if cand.key() < best.key() {
                best = cand;
            }
        }
        best
    }

    #[test]
    fn matches_brute_force_with_ties() {
        let mut rng = SplitMix64::new(77);
        for _ in 0..50 {
            let n = 1 + rng.next_below(60) as usize;
            let mut pts = Vec::with_capacity(n);
            let mut prio = Vec::with_capacity(n);
            for i in 0..n {
                // A tight coordinate range forces plenty of exact ties.
                pts.push([
                    rng.next_below(5) as i64,
                    rng.next_below(5) as i64,
                    rng.next_below(5) as i64,
                ]);
                prio.push(i as u64 * 3 + 1);
            }
            let tree = KdTree::build(pts.clone(), prio.clone());
            for _ in 0..30 {
                let q = [
                    rng.next_below(7) as i64 - 1,
                    rng.next_below(7) as i64 - 1,
                    rng.next_below(7) as i64 - 1,
                ];
                assert_eq!(tree.nearest(q), brute_nearest(&pts, &prio, q));

                let k = 1 + rng.next_below(8) as usize;
                let got = tree.k_nearest(q, k);
                let mut all: Vec<Neighbor> = (0..n as u32)
                    .map(|id| Neighbor {
                        dist2: dist2(pts[id as usize], q),
                        prio: prio[id as usize],
                        id,
                    })
                    .collect();
                all.sort_by_key(Neighbor::key);
                all.truncate(k.min(n));
                assert_eq!(got, all);
            }
        }
    }
}
