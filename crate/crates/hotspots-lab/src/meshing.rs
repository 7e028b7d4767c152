//! Uniform nested triangulations of a triangle with side-tagged boundaries.
//!
//! Level `L` splits each side into `n = 2^L` segments, producing `n^2`
//! congruent sub-triangles. Nodes live on the barycentric integer grid
//! `{(i, j) : i + j <= m}` with `m = order * n` (`order` 1 for P1, 2 for P2);
//! node `(i, j)` sits at `((m-i-j) z1 + i z2 + j z3) / m`. Because node
//! coordinates are computed from integer barycentrics in a fixed evaluation
//! order, the level-`L` grid is a bit-identical subset of the level-`L+1`
//! grid (every integer doubles and the division by `m` doubles with it), so
//! refinement studies compare values at exactly coincident points.

use crate::geometry::{Point, Side, Triangle};
use serde::{Deserialize, Serialize};

/// Hard cap on refinement level (`n = 2^12 = 4096` cells per side).
pub const MAX_LEVEL: u32 = 12;

/// Barycentric slack used by point location.
pub const LOCATE_SLAB: f64 = 1e-14;

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("refinement level {0} exceeds the maximum {MAX_LEVEL}")]
    LevelTooDeep(u32),
    #[error("unsupported element order {0} (expected 1 or 2)")]
    BadOrder(u32),
    #[error("mesh integrity violated: {0}")]
    Corrupt(String),
}

/// One triangular element. `corners` are node ids in counter-clockwise
/// order; for quadratic meshes `mids[k]` is the node on the edge opposite
/// `corners[k]` (joining corners `k+1` and `k+2`), and for linear meshes the
/// mid slots hold `usize::MAX`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Element {
    pub corners: [usize; 3],
    pub mids: [usize; 3],
}

/// A boundary edge of the cell grid, tagged with the canonical side it lies
/// on. `ends` follow the counter-clockwise boundary orientation; `mid` is the
/// P2 edge node (`usize::MAX` for P1).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub side: Side,
    pub ends: [usize; 2],
    pub mid: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Mesh {
    pub triangle: Triangle,
    pub level: u32,
    pub order: u32,
    /// Cells per side, `2^level`.
    pub n: usize,
    /// Node-grid resolution, `order * n`.
    pub m: usize,
    pub nodes: Vec<Point>,
    /// Integer grid coordinates `(i, j)` of each node in the `m`-grid.
    pub node_grid: Vec<(u32, u32)>,
    pub elements: Vec<Element>,
    pub boundary: Vec<BoundaryEdge>,
    /// Element ids of upward cells, indexed `j * n + i` (`usize::MAX` where
    /// no such cell exists), and likewise for downward cells.
    up_ids: Vec<usize>,
    down_ids: Vec<usize>,
}

/// Node index in the row-major lexicographic ordering of
/// `{(i, j) : i + j <= m}`: all of row `j = 0` first, then row 1, ...
#[inline]
fn grid_index(m: usize, i: usize, j: usize) -> usize {
    // Row r has m - r + 1 nodes; rows 0..j contribute
    // sum_{r<j} (m - r + 1) = j (2m + 3 - j) / 2.
    j * (2 * m + 3 - j) / 2 + i
}

pub fn uniform_mesh(t: &Triangle, level: u32, order: u32) -> Result<Mesh, MeshError> {
    if level > MAX_LEVEL {
        return Err(MeshError::LevelTooDeep(level));
    }
    if order != 1 && order != 2 {
        return Err(MeshError::BadOrder(order));
    }
    let n = 1usize << level;
    let m = order as usize * n;
    let mf = m as f64;

    let node_count = (m + 1) * (m + 2) / 2;
    let mut nodes = Vec::with_capacity(node_count);
    let mut node_grid = Vec::with_capacity(node_count);
    for j in 0..=m {
        for i in 0..=(m - j) {
            let a = (m - i - j) as f64;
            let bi = i as f64;
            let cj = j as f64;
            // Fixed evaluation order keeps nesting bit-identical across
            // levels: doubling every integer doubles each product, each sum
            // and the divisor exactly.
            let x = (a * t.z1.x + bi * t.z2.x + cj * t.z3.x) / mf;
            let y = (a * t.z1.y + bi * t.z2.y + cj * t.z3.y) / mf;
            nodes.push(Point::new(x, y));
            node_grid.push((i as u32, j as u32));
        }
    }
    debug_assert_eq!(nodes.len(), node_count);

    // Vertex-grid node id (cell grid is n x n; node grid is m = order * n).
    let vid = |i: usize, j: usize| grid_index(m, order as usize * i, order as usize * j);
    // P2 edge node between two vertex-grid points (their m-grid midpoint).
    let mid_id = |a: (usize, usize), b: (usize, usize)| -> usize {
        if order == 1 {
            usize::MAX
        } else {
            grid_index(m, a.0 + b.0, a.1 + b.1) // order 2: coordinates are 2i, sum of endpoints' = midpoint's m-grid coords
        }
    };

    let mut elements = Vec::with_capacity(n * n);
    let mut up_ids = vec![usize::MAX; n * n];
    let mut down_ids = vec![usize::MAX; n * n];
    for j in 0..n {
        for i in 0..(n - j) {
            // Upward cell: (i,j), (i+1,j), (i,j+1) — counter-clockwise when
            // the parent triangle is counter-clockwise.
            let c = [(i, j), (i + 1, j), (i, j + 1)];
            up_ids[j * n + i] = elements.len();
            elements.push(Element {
                corners: [vid(c[0].0, c[0].1), vid(c[1].0, c[1].1), vid(c[2].0, c[2].1)],
                mids: [
                    mid_id(c[1], c[2]),
                    mid_id(c[2], c[0]),
                    mid_id(c[0], c[1]),
                ],
            });
            if i + j < n - 1 {
                // Downward cell sharing the diagonal.
                let d = [(i + 1, j), (i + 1, j + 1), (i, j + 1)];
                down_ids[j * n + i] = elements.len();
                elements.push(Element {
                    corners: [vid(d[0].0, d[0].1), vid(d[1].0, d[1].1), vid(d[2].0, d[2].1)],
                    mids: [
                        mid_id(d[1], d[2]),
                        mid_id(d[2], d[0]),
                        mid_id(d[0], d[1]),
                    ],
                });
            }
        }
    }
    debug_assert_eq!(elements.len(), n * n);

    // Boundary edges in counter-clockwise traversal: side S from z1 to z2,
    // side L from z2 to z3, side M from z3 back to z1.
    let mut boundary = Vec::with_capacity(3 * n);
    for k in 0..n {
        let (a, b) = ((k, 0), (k + 1, 0));
        boundary.push(BoundaryEdge {
            side: Side::Short,
            ends: [vid(a.0, a.1), vid(b.0, b.1)],
            mid: mid_id(a, b),
        });
    }
    for k in 0..n {
        let (a, b) = ((n - k, k), (n - k - 1, k + 1));
        boundary.push(BoundaryEdge {
            side: Side::Long,
            ends: [vid(a.0, a.1), vid(b.0, b.1)],
            mid: mid_id(a, b),
        });
    }
    for k in 0..n {
        let (a, b) = ((0, n - k), (0, n - k - 1));
        boundary.push(BoundaryEdge {
            side: Side::Medium,
            ends: [vid(a.0, a.1), vid(b.0, b.1)],
            mid: mid_id(a, b),
        });
    }

    Ok(Mesh {
        triangle: *t,
        level,
        order,
        n,
        m,
        nodes,
        node_grid,
        elements,
        boundary,
        up_ids,
        down_ids,
    })
}

impl Mesh {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn dofs_per_element(&self) -> usize {
        if self.order == 1 {
            3
        } else {
            6
        }
    }

    /// Node ids of the three triangle vertices `z1`, `z2`, `z3`.
    pub fn vertex_nodes(&self) -> [usize; 3] {
        [
            0,
            grid_index(self.m, self.m, 0),
            self.nodes.len() - 1,
        ]
    }

    /// Element dof list: corners, then (order 2) opposite-edge midpoints.
    pub fn element_dofs(&self, e: usize) -> Vec<usize> {
        let el = &self.elements[e];
        let mut v = el.corners.to_vec();
        if self.order == 2 {
            v.extend_from_slice(&el.mids);
        }
        v
    }

    pub fn element_corners(&self, e: usize) -> [Point; 3] {
        let el = &self.elements[e];
        [
            self.nodes[el.corners[0]],
            self.nodes[el.corners[1]],
            self.nodes[el.corners[2]],
        ]
    }

    /// Whether a node lies on each of the three sides `[S, L, M]`, read off
    /// the integer grid (exact; corners belong to two sides).
    pub fn node_sides(&self, node: usize) -> [bool; 3] {
        let (i, j) = self.node_grid[node];
        let on_s = j == 0;
        let on_l = (i + j) as usize == self.m;
        let on_m = i == 0;
        [on_s, on_l, on_m]
    }

    /// Longest element edge (mesh size): diameter / n.
    pub fn h(&self) -> f64 {
        self.triangle.diameter() / self.n as f64
    }

    /// Locate the element containing `p`. Returns the element id and the
    /// barycentric coordinates of `p` with respect to that element's corners.
    /// Points within `LOCATE_SLAB` (barycentric) of an element boundary may
    /// match several elements; the lowest element id wins. Points outside
    /// the triangle (beyond the slab) return `None`.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        let l = self.triangle.barycentric(p);
        let n = self.n as f64;
        let (u, v) = (l[1] * n, l[2] * n);
        // Candidate cells around (floor(u), floor(v)); the slab is far
        // smaller than a cell, so a containing element's cell is within one
        // step of the nominal cell.
        let iu = u.floor() as isize;
        let iv = v.floor() as isize;
        let mut best: Option<(usize, [f64; 3])> = None;
        for dj in -1..=1isize {
            for di in -1..=1isize {
                let (ci, cj) = (iu + di, iv + dj);
                if ci < 0 || cj < 0 {
                    continue;
                }
                let (ci, cj) = (ci as usize, cj as usize);
                if ci >= self.n || cj >= self.n || ci + cj > self.n - 1 {
                    continue;
                }
                for id in [self.up_ids[cj * self.n + ci], self.down_ids[cj * self.n + ci]] {
                    if id == usize::MAX {
                        continue;
                    }
                    let [a, b, c] = self.element_corners(id);
                    let et = Triangle { z1: a, z2: b, z3: c };
                    let lb = et.barycentric(p);
                    if lb.iter().all(|&x| x >= -LOCATE_SLAB)
                        && best.map_or(true, |(bid, _)| id < bid)
                    {
                        best = Some((id, lb));
                    }
                }
            }
        }
        best
    }

    /// Structural integrity check: counts, orientation, boundary tags.
    /// Used by the CLI to detect (injected or real) mesh corruption.
    pub fn validate(&self) -> Result<(), MeshError> {
        let expect_nodes = (self.m + 1) * (self.m + 2) / 2;
        if self.nodes.len() != expect_nodes {
            return Err(MeshError::Corrupt(format!(
                "node count {} != {}",
                self.nodes.len(),
                expect_nodes
            )));
        }
        if self.elements.len() != self.n * self.n {
            return Err(MeshError::Corrupt(format!(
                "element count {} != {}",
                self.elements.len(),
                self.n * self.n
            )));
        }
        if self.boundary.len() != 3 * self.n {
            return Err(MeshError::Corrupt(format!(
                "boundary edge count {} != {}",
                self.boundary.len(),
                3 * self.n
            )));
        }
        let parent_area = self.triangle.area();
        let cell_area = parent_area / (self.n * self.n) as f64;
        let mut total = 0.0;
        for e in 0..self.elements.len() {
            let [a, b, c] = self.element_corners(e);
            let sa = 0.5 * (b - a).cross(c - a);
            if sa <= 0.0 {
                return Err(MeshError::Corrupt(format!(
                    "element {e} is not counter-clockwise (signed area {sa})"
                )));
            }
            if (sa - cell_area).abs() > 1e-9 * parent_area {
                return Err(MeshError::Corrupt(format!(
                    "element {e} area {sa} deviates from uniform cell area {cell_area}"
                )));
            }
            total += sa;
        }
        if (total - parent_area).abs() > 1e-9 * parent_area {
            return Err(MeshError::Corrupt(format!(
                "element areas sum to {total}, triangle area is {parent_area}"
            )));
        }
        for be in &self.boundary {
            for &node in be.ends.iter() {
                let sides = self.node_sides(node);
                let on = match be.side {
                    Side::Short => sides[0],
                    Side::Long => sides[1],
                    Side::Medium => sides[2],
                };
                if !on {
                    return Err(MeshError::Corrupt(format!(
                        "boundary node {node} not on side {:?}",
                        be.side
                    )));
                }
            }
        }
        Ok(())
    }
}
