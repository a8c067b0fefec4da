//! Uniform cell list for fixed-radius pair queries.

/// Cell list over an axis-aligned bounding box of the points, rebuilt on every
/// query batch. Cells are at least `cutoff` wide, so every pair closer than
/// `cutoff` lies in the same or an adjacent cell.
#[derive(Debug, Default, Clone)]
pub(crate) struct CellGrid {
    origin: [f64; 3],
    inv_cell: f64,
    dims: [usize; 3],
    cell_start: Vec<usize>,
    order: Vec<usize>,
    cell_of: Vec<usize>,
}

/// Forward half of the 26-neighborhood plus the cell itself.
const HALF_SHELL: [[i64; 3]; 13] = [
    [1, 0, 0],
    [-1, 1, 0],
    [0, 1, 0],
    [1, 1, 0],
    [-1, -1, 1],
    [0, -1, 1],
    [1, -1, 1],
    [-1, 0, 1],
    [0, 0, 1],
    [1, 0, 1],
    [-1, 1, 1],
    [0, 1, 1],
    [1, 1, 1],
];

impl CellGrid {
    /// Returns false when the points are spread too thin for a dense grid to
    /// pay off; the caller then falls back to the all-pairs loop.
    pub(crate) fn rebuild(&mut self, coords: &[f64], cutoff: f64) -> bool {
        let n = coords.len() / 3;
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in coords.chunks_exact(3) {
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let mut total = 1usize;
        for a in 0..3 {
            let cells = ((hi[a] - lo[a]) / cutoff).floor() + 1.0;
            if !cells.is_finite() || cells > (64 * n + 64) as f64 {
                return false;
            }
            self.dims[a] = cells as usize;
            total = match total.checked_mul(self.dims[a]) {
                Some(t) if t <= 64 * n + 64 => t,
                _ => return false,
            };
        }
        self.origin = lo;
        self.inv_cell = 1.0 / cutoff;

        let mut cell_of = std::mem::take(&mut self.cell_of);
        cell_of.clear();
        cell_of.extend(coords.chunks_exact(3).map(|p| self.cell_index(p)));
        self.cell_of = cell_of;
        self.cell_start.clear();
        self.cell_start.resize(total + 1, 0);
        for &c in &self.cell_of {
            self.cell_start[c + 1] += 1;
        }
        for c in 0..total {
            self.cell_start[c + 1] += self.cell_start[c];
        }
        let mut fill = self.cell_start.clone();
        self.order.clear();
        self.order.resize(n, 0);
        for (i, &c) in self.cell_of.iter().enumerate() {
            self.order[fill[c]] = i;
            fill[c] += 1;
        }
        true
    }

    fn cell_coords(&self, p: &[f64]) -> [usize; 3] {
        let mut out = [0; 3];
        for a in 0..3 {
            let k = ((p[a] - self.origin[a]) * self.inv_cell).floor();
            out[a] = (k.max(0.0) as usize).min(self.dims[a] - 1);
        }
        out
    }

    fn cell_index(&self, p: &[f64]) -> usize {
        let [x, y, z] = self.cell_coords(p);
        (z * self.dims[1] + y) * self.dims[0] + x
    }

    fn members(&self, cell: usize) -> &[usize] {
        &self.order[self.cell_start[cell]..self.cell_start[cell + 1]]
    }

    /// Calls `f(i, j)` once for every unordered pair sharing a cell or lying in
    /// adjacent cells. The visiting order depends only on the coordinates.
    pub(crate) fn for_each_candidate_pair(&self, mut f: impl FnMut(usize, usize)) {
        let [nx, ny, nz] = self.dims;
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    let here = (z * ny + y) * nx + x;
                    let own = self.members(here);
                    for (k, &i) in own.iter().enumerate() {
                        for &j in &own[k + 1..] {
                            f(i, j);
                        }
                    }
                    for off in HALF_SHELL {
                        let (qx, qy, qz) = (x as i64 + off[0], y as i64 + off[1], z as i64 + off[2]);
                        if qx < 0
                            || qy < 0
                            || qz < 0
                            || qx >= nx as i64
                            || qy >= ny as i64
                            || qz >= nz as i64
                        {
                            continue;
                        }
                        let there = (qz as usize * ny + qy as usize) * nx + qx as usize;
                        for &i in own {
                            for &j in self.members(there) {
                                f(i, j);
                            }
                        }
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn finds_every_close_pair_exactly_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1usize, 2, 7, 60, 300] {
            let coords: Vec<f64> = (0..3 * n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let cutoff = 1.0;
            let mut grid = CellGrid::default();
            assert!(grid.rebuild(&coords, cutoff));
            let mut seen = std::collections::BTreeSet::new();
            grid.for_each_candidate_pair(|i, j| {
                let key = (i.min(j), i.max(j));
                assert!(seen.insert(key), "pair {key:?} visited twice");
            });
            let dist = |i: usize, j: usize| {
                (0..3)
                    .map(|a| (coords[3 * i + a] - coords[3 * j + a]).powi(2))
                    .sum::<f64>()
                    .sqrt()
            };
            for i in 0..n {
                for j in i + 1..n {
                    if dist(i, j) < cutoff {
                        assert!(seen.contains(&(i, j)), "missed close pair ({i}, {j})");
                    }
                }
            }
        }
    }

    #[test]
    fn refuses_sparse_layouts() {
        let coords = [0.0, 0.0, 0.0, 1e9, 1e9, 1e9];
        assert!(!CellGrid::default().rebuild(&coords, 1.0));
    }
}
