//! Eigenfunction fields and qualitative-structure analysis.
//!
//! A [`Field`] wraps a mesh plus nodal coefficients and evaluates values,
//! gradients and (P2) per-element Hessians anywhere in the triangle. On top
//! of it sit the qualitative probes the laboratory is about:
//!
//! * [`critical_point_census`] — locate and classify every non-vertex
//!   critical point (P2 gradients are affine per element, so zeros are found
//!   by exact 2x2 solves; boundary edges get a tangential search since a
//!   boundary critical point's gradient zero may fall a hair outside the
//!   mesh);
//! * [`nodal_chains`] — march the zero set into polylines and attribute
//!   endpoints to sides;
//! * [`directional_derivative_range`] — min/max of a directional derivative
//!   over element centroids (monotonicity probe);
//! * [`rotation_range`] — sign of the rotation field
//!   `R_p u = -(y - p_y) du/dx + (x - p_x) du/dy` above a pivot;
//! * [`reflection_dominance`] — mirror comparison `u(reflected) - u(x)` over
//!   a cap polygon;
//! * [`moving_plane_min`] — the sliding-plane comparison on vertical caps;
//! * [`vertex_report`] — vertex values, tolerance-banded signs, ordering;
//! * [`fold_asymmetry`] — sup of the symmetrization of `u` across the
//!   bisector at `z1`, which vanishes exactly when the triangle is isosceles
//!   with apex `z1` and the mode is antisymmetric.
//!
//! All probe tolerances are the caller's. The natural scale for predicate
//! slack is `sup|u| * (h / diam)^2` — interpolation error of a smooth mode —
//! exposed as [`Field::qual_scale`].

use crate::geometry::{
    clip_halfplane, polygon_area, Point, ReflectionAxis, Side, Triangle,
};
use crate::meshing::Mesh;
use serde::{Deserialize, Serialize};

/// A finite-element function: nodal coefficients over a mesh.
#[derive(Clone, Debug)]
pub struct Field<'a> {
    pub mesh: &'a Mesh,
    pub values: Vec<f64>,
    sup: f64,
}

impl<'a> Field<'a> {
    pub fn new(mesh: &'a Mesh, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mesh.num_nodes());
        let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Field { mesh, values, sup }
    }

    /// Fix the overall sign so the value at vertex `z3` is positive (the
    /// canonical orientation: the top vertex carries the maximum for the
    /// low modes studied here). When `u(z3)` is within `vertex_tol * sup|u|`
    /// of zero -- the antisymmetric degenerate case -- fall back to making
    /// the vertex of largest magnitude positive. Returns whether a flip was
    /// applied.
    pub fn oriented(mesh: &'a Mesh, values: Vec<f64>, vertex_tol: f64) -> (Self, bool) {
        let vs = mesh.vertex_nodes();
        let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let anchor = if values[vs[2]].abs() > vertex_tol * sup {
            values[vs[2]]
        } else {
            let mut best = values[vs[0]];
            for &n in &vs[1..] {
                if values[n].abs() > best.abs() {
                    best = values[n];
                }
            }
            best
        };
        let flip = anchor < 0.0;
        let values = if flip {
            values.into_iter().map(|v| -v).collect()
        } else {
            values
        };
        (Field::new(mesh, values), flip)
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup
    }

    /// Mesh size `h`.
    pub fn h(&self) -> f64 {
        self.mesh.h()
    }

    /// Natural qualitative tolerance: `c * sup|u| * (h/diam)^2`.
    pub fn qual_scale(&self, c: f64) -> f64 {
        let r = self.mesh.h() / self.mesh.triangle.diameter();
        c * self.sup * r * r
    }

    pub fn value_at_vertex(&self, k: usize) -> f64 {
        self.values[self.mesh.vertex_nodes()[k]]
    }

    fn shape_dot(&self, e: usize, l: [f64; 3]) -> f64 {
        let dofs = self.mesh.element_dofs(e);
        if self.mesh.order == 1 {
            l[0] * self.values[dofs[0]] + l[1] * self.values[dofs[1]] + l[2] * self.values[dofs[2]]
        } else {
            let s = crate::assembly::p2_shape_values(l);
            (0..6).map(|i| s[i] * self.values[dofs[i]]).sum()
        }
    }

    /// Value at an arbitrary point (`None` outside the triangle).
    pub fn eval(&self, p: Point) -> Option<f64> {
        let (e, l) = self.mesh.locate(p)?;
        Some(self.shape_dot(e, l))
    }

    /// Gradient at a barycentric point of a given element.
    pub fn gradient_in(&self, e: usize, l: [f64; 3]) -> Point {
        let corners = self.mesh.element_corners(e);
        let geo = crate::assembly::element_geometry(&corners);
        let dofs = self.mesh.element_dofs(e);
        if self.mesh.order == 1 {
            let mut g = Point::new(0.0, 0.0);
            for i in 0..3 {
                g = g + geo.grad_l[i] * self.values[dofs[i]];
            }
            g
        } else {
            let gs = crate::assembly::p2_shape_gradients(l, &geo.grad_l);
            let mut g = Point::new(0.0, 0.0);
            for i in 0..6 {
                g = g + gs[i] * self.values[dofs[i]];
            }
            g
        }
    }

    /// Gradient at an arbitrary point (`None` outside).
    pub fn gradient(&self, p: Point) -> Option<Point> {
        let (e, l) = self.mesh.locate(p)?;
        Some(self.gradient_in(e, l))
    }

    /// Per-element (constant) Hessian `[h_xx, h_xy, h_yy]`; meaningful for
    /// quadratic elements only (zero for P1).
    pub fn hessian(&self, e: usize) -> [f64; 3] {
        if self.mesh.order == 1 {
            return [0.0, 0.0, 0.0];
        }
        let corners = self.mesh.element_corners(e);
        let geo = crate::assembly::element_geometry(&corners);
        let g = &geo.grad_l;
        let dofs = self.mesh.element_dofs(e);
        let mut h = [0.0f64; 3];
        let mut add_outer = |a: Point, b: Point, c: f64| {
            h[0] += c * a.x * b.x;
            h[1] += c * 0.5 * (a.x * b.y + a.y * b.x);
            h[2] += c * a.y * b.y;
        };
        for i in 0..3 {
            // corner shape L_i (2 L_i - 1): Hessian 4 grad L_i (x) grad L_i
            add_outer(g[i], g[i], 4.0 * self.values[dofs[i]]);
        }
        for k in 0..3 {
            // mid shape 4 L_a L_b: Hessian 4 (grad L_a (x) grad L_b + sym)
            let a = (k + 1) % 3;
            let b = (k + 2) % 3;
            let c = self.values[dofs[3 + k]];
            add_outer(g[a], g[b], 4.0 * c);
            add_outer(g[b], g[a], 4.0 * c);
        }
        h
    }

    /// Max gradient magnitude over element centroids (a robust scale for
    /// derivative tolerances).
    pub fn gradient_sup(&self) -> f64 {
        let c = [1.0 / 3.0; 3];
        (0..self.mesh.elements.len())
            .map(|e| self.gradient_in(e, c).norm())
            .fold(0.0f64, f64::max)
    }
}

/// Classification of a critical point by its Hessian eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    Maximum,
    Minimum,
    Saddle,
    Degenerate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub location: Point,
    pub kind: CriticalKind,
    pub hessian_eigenvalues: [f64; 2],
    /// Magnitude of the (discrete) gradient at the reported location.
    pub gradient_norm: f64,
    /// Side the point lies on (within `h`), if any; `None` means interior.
    pub on_side: Option<Side>,
    pub distance_to_nearest_vertex: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusReport {
    pub points: Vec<CriticalPoint>,
    pub saddle_count: usize,
    pub max_count: usize,
    pub min_count: usize,
    pub degenerate_count: usize,
    /// Candidates dropped for sitting within the vertex-exclusion radius.
    pub vertex_excluded: usize,
    /// Tolerances the census ran with.
    pub params: CensusParams,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CensusParams {
    /// Hessian eigenvalues below `hessian_rel_tol * sup|u| / h^2` in
    /// magnitude are treated as zero (degenerate direction).
    pub hessian_rel_tol: f64,
    /// Cluster radius in units of `h` for merging duplicate detections.
    pub cluster_radius_h: f64,
    /// Candidates within this many `h` of a vertex are excluded.
    pub vertex_exclusion_h: f64,
    /// A boundary tangential zero only counts as a critical point when the
    /// full gradient there is below `boundary_grad_rel_tol * (h / diam)`
    /// times the gradient sup (a Neumann mode's normal derivative vanishes
    /// to discretization order; a transversal crossing does not).
    pub boundary_grad_rel_tol: f64,
}

impl Default for CensusParams {
    fn default() -> Self {
        CensusParams {
            hessian_rel_tol: 1e-6,
            cluster_radius_h: 2.0,
            vertex_exclusion_h: 1.0,
            boundary_grad_rel_tol: 1.0,
        }
    }
}

/// Locate and classify all non-vertex critical points of a quadratic field.
///
/// Element interiors: the gradient of a P2 function is affine per element,
/// so its zero is one exact 2x2 solve; a zero landing inside the element
/// (tiny slack) is a candidate. Boundary edges: the trace of the field is a
/// 1D quadratic whose tangential critical point is linear to find; these
/// are included because a genuine boundary critical point's 2D gradient zero
/// may land just outside the mesh. Candidates are clustered (radius
/// `cluster_radius_h * h`), vertex-adjacent ones dropped, and each cluster
/// classified by the Hessian of its lowest-id element.
pub fn critical_point_census(field: &Field, params: &CensusParams) -> CensusReport {
    let mesh = field.mesh;
    let h = mesh.h();
    let tri = &mesh.triangle;
    let hess_floor = params.hessian_rel_tol * field.sup_norm() / (h * h);
    let quadratic = mesh.order == 2;

    // (location, element id) candidates, element order = deterministic.
    let mut candidates: Vec<(Point, usize)> = Vec::new();

    for e in 0..mesh.elements.len() {
        if !quadratic {
            break; // P1 gradients are constant: no isolated interior zeros
        }
        let hm = field.hessian(e);
        let corners = mesh.element_corners(e);
        let centroid = Point::new(
            (corners[0].x + corners[1].x + corners[2].x) / 3.0,
            (corners[0].y + corners[1].y + corners[2].y) / 3.0,
        );
        let g0 = field.gradient_in(e, [1.0 / 3.0; 3]);
        // grad u(x) = g0 + H (x - centroid); solve for the zero.
        let det = hm[0] * hm[2] - hm[1] * hm[1];
        let scale = hm[0].abs().max(hm[2].abs()).max(hm[1].abs());
        if det.abs() <= 1e-12 * scale * scale || scale == 0.0 {
            continue; // degenerate element Hessian: no isolated zero here
        }
        let dx = (-g0.x * hm[2] + g0.y * hm[1]) / det;
        let dy = (-hm[0] * g0.y + hm[1] * g0.x) / det;
        let zero = centroid + Point::new(dx, dy);
        let et = Triangle {
            z1: corners[0],
            z2: corners[1],
            z3: corners[2],
        };
        if et.barycentric(zero).iter().all(|&b| b >= -1e-9) {
            candidates.push((zero, e));
        }
    }

    // Boundary tangential zeros: u along a P2 boundary edge is quadratic, so
    // its tangential derivative is linear with one-sided end slopes
    // u'(0) = a and u'(1) = a + b. Along each side the edges are chained; a
    // sign change inside an edge gives a zero at t = -a/b, and a sign change
    // across a shared node (the P2 gradient kinks there, so neither edge
    // owns the zero -- this happens exactly at symmetric saddles) gives the
    // node itself. Candidates must also have a small full gradient, since a
    // tangential extremum with a transversal derivative is not critical.
    let grad_floor = params.boundary_grad_rel_tol * (h / tri.diameter()) * field.gradient_sup();
    let push_boundary = |p: Point, side: Side, candidates: &mut Vec<(Point, usize)>| {
        let inward = crate::geometry::direction_frame(tri, side).normal;
        if let Some((e, l)) = mesh.locate(p + inward * (1e-6 * h)) {
            if field.gradient_in(e, l).norm() <= grad_floor {
                candidates.push((p, e));
            }
        }
    };
    let mut prev: Option<(Side, usize, f64)> = None; // (side, end node, end slope)
    for be in &mesh.boundary {
        let v0 = field.values[be.ends[0]];
        let v1 = field.values[be.ends[1]];
        // Quadratic trace u(t) = v0 + a t + (b/2) t^2 for P2; linear for P1.
        let (a, b) = if quadratic {
            let vm = field.values[be.mid];
            (-3.0 * v0 + 4.0 * vm - v1, 2.0 * (2.0 * v0 + 2.0 * v1 - 4.0 * vm))
        } else {
            (v1 - v0, 0.0)
        };
        let slope_end = a + b;
        let p0 = mesh.nodes[be.ends[0]];
        let p1 = mesh.nodes[be.ends[1]];
        if let Some((pside, pnode, pslope)) = prev {
            if pside == be.side && pnode == be.ends[0] && pslope * a < 0.0 {
                push_boundary(p0, be.side, &mut candidates);
            }
        }
        if a * slope_end <= 0.0 && b.abs() > 1e-300 {
            let t = (-a / b).clamp(0.0, 1.0);
            push_boundary(p0.lerp(p1, t), be.side, &mut candidates);
        }
        prev = Some((be.side, be.ends[1], slope_end));
    }

    // Cluster (greedy, deterministic order), excluding vertex-adjacent hits.
    let vr = params.vertex_exclusion_h * h;
    let cr = params.cluster_radius_h * h;
    let mut vertex_excluded = 0usize;
    let mut clusters: Vec<(Point, usize)> = Vec::new();
    'cand: for &(p, e) in &candidates {
        let dv = tri
            .vertices()
            .iter()
            .map(|v| v.dist(p))
            .fold(f64::MAX, f64::min);
        if dv < vr {
            vertex_excluded += 1;
            continue;
        }
        for &(q, _) in &clusters {
            if q.dist(p) < cr {
                continue 'cand; // duplicate of an existing cluster
            }
        }
        clusters.push((p, e));
    }

    let mut points = Vec::new();
    for (p, e) in clusters {
        let gradient_norm = mesh
            .locate(p)
            .map(|(le, ll)| field.gradient_in(le, ll).norm())
            .unwrap_or(f64::NAN);
        let hm = field.hessian(e);
        // Eigenvalues of [[hxx, hxy], [hxy, hyy]].
        let tr = hm[0] + hm[2];
        let d = ((hm[0] - hm[2]).powi(2) + 4.0 * hm[1] * hm[1]).sqrt();
        let l1 = 0.5 * (tr - d);
        let l2 = 0.5 * (tr + d);
        let kind = if l1.abs() <= hess_floor || l2.abs() <= hess_floor {
            CriticalKind::Degenerate
        } else if l1 < 0.0 && l2 < 0.0 {
            CriticalKind::Maximum
        } else if l1 > 0.0 && l2 > 0.0 {
            CriticalKind::Minimum
        } else {
            CriticalKind::Saddle
        };
        // Side attribution within h.
        let mut on_side = None;
        let mut best = h;
        for side in Side::ALL {
            let (a, b) = tri.side_endpoints(side);
            let dist = ((p - a).cross(b - a) / a.dist(b)).abs();
            if dist < best {
                best = dist;
                on_side = Some(side);
            }
        }
        let dv = tri
            .vertices()
            .iter()
            .map(|v| v.dist(p))
            .fold(f64::MAX, f64::min);
        points.push(CriticalPoint {
            location: p,
            kind,
            hessian_eigenvalues: [l1, l2],
            gradient_norm,
            on_side,
            distance_to_nearest_vertex: dv,
        });
    }

    let count = |k: CriticalKind| points.iter().filter(|p| p.kind == k).count();
    CensusReport {
        saddle_count: count(CriticalKind::Saddle),
        max_count: count(CriticalKind::Maximum),
        min_count: count(CriticalKind::Minimum),
        degenerate_count: count(CriticalKind::Degenerate),
        vertex_excluded,
        points,
        params: *params,
    }
}

/// A chained piece of the zero set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodalChain {
    pub points: Vec<Point>,
    pub length: f64,
    /// Side attribution of the two endpoints (within `h` of a side), `None`
    /// for endpoints dangling in the interior.
    pub endpoint_sides: [Option<Side>; 2],
    /// Vertex index (0..3 for z1, z2, z3) when an endpoint lies within `h`
    /// of a vertex; such an endpoint belongs to both adjacent sides.
    pub endpoint_vertices: [Option<usize>; 2],
}

impl NodalChain {
    /// Whether an endpoint of this chain touches the given side, counting a
    /// vertex endpoint as touching both sides meeting there.
    pub fn touches(&self, side: Side) -> bool {
        for k in 0..2 {
            if self.endpoint_sides[k] == Some(side) {
                return true;
            }
            if let Some(v) = self.endpoint_vertices[k] {
                // Side s spans vertices s.index() and (s.index() + 1) % 3
                // in the canonical labeling (S = z1 z2, L = z2 z3, M = z3 z1).
                let i = side.index();
                if v == i || v == (i + 1) % 3 {
                    return true;
                }
            }
        }
        false
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodalReport {
    pub chains: Vec<NodalChain>,
    /// Sides connected by the longest chain.
    pub connects: [Option<Side>; 2],
    pub total_length: f64,
    /// Number of chains longer than `2h` (mesh-scale fragments excluded).
    pub substantive_chains: usize,
    /// More than one substantive component: for a second eigenfunction this
    /// contradicts the nodal-domain count and is reported as an anomaly.
    pub component_anomaly: bool,
}

/// March the zero set of the field. Quadratic fields are sampled on the
/// four-fold linear subdivision induced by their edge nodes; linear fields
/// march their elements directly. Segments are chained by endpoint
/// proximity, endpoints attributed to sides within `h`.
pub fn nodal_chains(field: &Field) -> NodalReport {
    let mesh = field.mesh;
    let tri = &mesh.triangle;
    let h = mesh.h();

    // Collect linear sub-triangles as (point, value) triples.
    let mut segments: Vec<(Point, Point)> = Vec::new();
    let mut march = |p: [Point; 3], v: [f64; 3]| {
        let mut crossings = Vec::new();
        for k in 0..3 {
            let (va, vb) = (v[k], v[(k + 1) % 3]);
            let (pa, pb) = (p[k], p[(k + 1) % 3]);
            let sa = if va > 0.0 { 1 } else if va < 0.0 { -1 } else { 0 };
            let sb = if vb > 0.0 { 1 } else if vb < 0.0 { -1 } else { 0 };
            if sa * sb < 0 {
                crossings.push(pa.lerp(pb, va / (va - vb)));
            } else if sa == 0 && sb != 0 {
                crossings.push(pa);
            }
        }
        crossings.dedup_by(|a, b| a.dist(*b) < 1e-30);
        if crossings.len() == 2 && crossings[0].dist(crossings[1]) > 0.0 {
            segments.push((crossings[0], crossings[1]));
        }
    };

    for e in 0..mesh.elements.len() {
        let dofs = mesh.element_dofs(e);
        let c = mesh.element_corners(e);
        if mesh.order == 1 {
            march(c, [
                field.values[dofs[0]],
                field.values[dofs[1]],
                field.values[dofs[2]],
            ]);
        } else {
            let v: Vec<f64> = dofs.iter().map(|&d| field.values[d]).collect();
            let m = [c[1].midpoint(c[2]), c[2].midpoint(c[0]), c[0].midpoint(c[1])];
            // Sub-triangles: three corner caps and the central one.
            march([c[0], m[2], m[1]], [v[0], v[5], v[4]]);
            march([m[2], c[1], m[0]], [v[5], v[1], v[3]]);
            march([m[1], m[0], c[2]], [v[4], v[3], v[2]]);
            march([m[2], m[0], m[1]], [v[5], v[3], v[4]]);
        }
    }

    // Chain segments endpoint-to-endpoint.
    let join_tol = 1e-9 * tri.diameter().max(1.0) + 1e-12;
    let mut used = vec![false; segments.len()];
    let mut chains: Vec<Vec<Point>> = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut chain = vec![segments[start].0, segments[start].1];
        // Grow forward then backward.
        loop {
            let tail = *chain.last().unwrap();
            let mut found = false;
            for (i, seg) in segments.iter().enumerate() {
                if used[i] {
                    continue;
                }
                if seg.0.dist(tail) < join_tol {
                    chain.push(seg.1);
                    used[i] = true;
                    found = true;
                    break;
                }
                if seg.1.dist(tail) < join_tol {
                    chain.push(seg.0);
                    used[i] = true;
                    found = true;
                    break;
                }
            }
            if !found {
                break;
            }
        }
        loop {
            let head = chain[0];
            let mut found = false;
            for (i, seg) in segments.iter().enumerate() {
                if used[i] {
                    continue;
                }
                if seg.0.dist(head) < join_tol {
                    chain.insert(0, seg.1);
                    used[i] = true;
                    found = true;
                    break;
                }
                if seg.1.dist(head) < join_tol {
                    chain.insert(0, seg.0);
                    used[i] = true;
                    found = true;
                    break;
                }
            }
            if !found {
                break;
            }
        }
        chains.push(chain);
    }

    let side_of = |p: Point| -> Option<Side> {
        let mut best: Option<(f64, Side)> = None;
        for side in Side::ALL {
            let (a, b) = tri.side_endpoints(side);
            let d = ((p - a).cross(b - a) / a.dist(b)).abs();
            if d < h && best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, side));
            }
        }
        best.map(|(_, s)| s)
    };

    let vertex_of = |p: Point| -> Option<usize> {
        tri.vertices()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.dist(p) < h)
            .min_by(|a, b| a.1.dist(p).total_cmp(&b.1.dist(p)))
            .map(|(k, _)| k)
    };

    let mut out: Vec<NodalChain> = chains
        .into_iter()
        .map(|points| {
            let length: f64 = points.windows(2).map(|w| w[0].dist(w[1])).sum();
            let ends = [points[0], *points.last().unwrap()];
            NodalChain {
                endpoint_sides: [side_of(ends[0]), side_of(ends[1])],
                endpoint_vertices: [vertex_of(ends[0]), vertex_of(ends[1])],
                points,
                length,
            }
        })
        .collect();
    out.sort_by(|a, b| b.length.total_cmp(&a.length));
    let connects = out
        .first()
        .map(|c| c.endpoint_sides)
        .unwrap_or([None, None]);
    let total_length = out.iter().map(|c| c.length).sum();
    let substantive = out.iter().filter(|c| c.length > 2.0 * h).count();
    NodalReport {
        chains: out,
        connects,
        total_length,
        substantive_chains: substantive,
        component_anomaly: substantive > 1,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RangeReport {
    pub min: f64,
    pub max: f64,
    pub min_location: Point,
    pub samples: usize,
}

/// Min/max of the directional derivative `d . grad u` over all element
/// centroids (for P2, also the three edge-midpoint barycenters, which
/// together see the full affine gradient range of each element).
pub fn directional_derivative_range(field: &Field, dir: Point) -> RangeReport {
    let mesh = field.mesh;
    let pts: &[[f64; 3]] = if mesh.order == 1 {
        &[[1.0 / 3.0; 3]]
    } else {
        &[
            [1.0 / 3.0; 3],
            [0.5, 0.5, 0.0],
            [0.0, 0.5, 0.5],
            [0.5, 0.0, 0.5],
        ]
    };
    let mut min = f64::MAX;
    let mut max = f64::MIN;
    let mut min_location = Point::new(f64::NAN, f64::NAN);
    let mut samples = 0;
    for e in 0..mesh.elements.len() {
        let corners = mesh.element_corners(e);
        for l in pts {
            let g = field.gradient_in(e, *l);
            let v = g.dot(dir);
            samples += 1;
            if v < min {
                min = v;
                min_location = Point::new(
                    l[0] * corners[0].x + l[1] * corners[1].x + l[2] * corners[2].x,
                    l[0] * corners[0].y + l[1] * corners[1].y + l[2] * corners[2].y,
                );
            }
            max = max.max(v);
        }
    }
    RangeReport {
        min,
        max,
        min_location,
        samples,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub direction: Point,
    pub min: f64,
    pub min_location: Point,
    /// Sample points whose directional derivative fell below `-threshold`,
    /// with their values.
    pub violations: Vec<(Point, f64)>,
    pub threshold: f64,
    pub samples: usize,
}

/// Directional monotonicity with an explicit violation list: every sample
/// whose derivative `d . grad u` drops below `-threshold` is recorded.
pub fn directional_monotonicity(field: &Field, dir: Point, threshold: f64) -> MonotonicityReport {
    let mesh = field.mesh;
    let pts: &[[f64; 3]] = if mesh.order == 1 {
        &[[1.0 / 3.0; 3]]
    } else {
        &[
            [1.0 / 3.0; 3],
            [0.5, 0.5, 0.0],
            [0.0, 0.5, 0.5],
            [0.5, 0.0, 0.5],
        ]
    };
    let mut min = f64::MAX;
    let mut min_location = Point::new(f64::NAN, f64::NAN);
    let mut violations = Vec::new();
    let mut samples = 0;
    for e in 0..mesh.elements.len() {
        let corners = mesh.element_corners(e);
        for l in pts {
            let g = field.gradient_in(e, *l);
            let v = g.dot(dir);
            samples += 1;
            let x = Point::new(
                l[0] * corners[0].x + l[1] * corners[1].x + l[2] * corners[2].x,
                l[0] * corners[0].y + l[1] * corners[1].y + l[2] * corners[2].y,
            );
            if v < min {
                min = v;
                min_location = x;
            }
            if v < -threshold {
                violations.push((x, v));
            }
        }
    }
    MonotonicityReport {
        direction: dir,
        min,
        min_location,
        violations,
        threshold,
        samples,
    }
}

/// Where a point sits relative to the triangle, with tolerance `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Locus {
    Vertex(usize),
    OnSide(Side),
    Interior,
}

pub fn locate_locus(tri: &Triangle, p: Point, h: f64) -> Locus {
    let vs = tri.vertices();
    let mut best_v: Option<(f64, usize)> = None;
    for (k, v) in vs.iter().enumerate() {
        let d = v.dist(p);
        if d < h && best_v.map_or(true, |(bd, _)| d < bd) {
            best_v = Some((d, k));
        }
    }
    if let Some((_, k)) = best_v {
        return Locus::Vertex(k);
    }
    let mut best_s: Option<(f64, Side)> = None;
    for side in Side::ALL {
        let (a, b) = tri.side_endpoints(side);
        let d = ((p - a).cross(b - a) / a.dist(b)).abs();
        if d < h && best_s.map_or(true, |(bd, _)| d < bd) {
            best_s = Some((d, side));
        }
    }
    match best_s {
        Some((_, s)) => Locus::OnSide(s),
        None => Locus::Interior,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtremaReport {
    pub max_value: f64,
    pub max_location: Point,
    pub max_locus: Locus,
    pub min_value: f64,
    pub min_location: Point,
    pub min_locus: Locus,
    /// True when either extremum sits in the interior -- a contradiction of
    /// the boundary-extrema property, surfaced as an anomaly.
    pub interior_extremum: bool,
}

/// Global extrema of the nodal values with locus classification.
pub fn extrema_location(field: &Field) -> ExtremaReport {
    let mesh = field.mesh;
    let (mut imax, mut imin) = (0usize, 0usize);
    for (i, &v) in field.values.iter().enumerate() {
        if v > field.values[imax] {
            imax = i;
        }
        if v < field.values[imin] {
            imin = i;
        }
    }
    let h = mesh.h();
    let tri = &mesh.triangle;
    let max_location = mesh.nodes[imax];
    let min_location = mesh.nodes[imin];
    let max_locus = locate_locus(tri, max_location, h);
    let min_locus = locate_locus(tri, min_location, h);
    ExtremaReport {
        max_value: field.values[imax],
        max_location,
        max_locus,
        min_value: field.values[imin],
        min_location,
        min_locus,
        interior_extremum: max_locus == Locus::Interior || min_locus == Locus::Interior,
    }
}

/// Min/max of the rotation field `R_p u = -(y - p_y) u_x + (x - p_x) u_y`
/// over element centroids lying strictly above the horizontal line through
/// `p` (margin `0.5 h`).
pub fn rotation_range(field: &Field, p: Point) -> RangeReport {
    let mesh = field.mesh;
    let h = mesh.h();
    let mut min = f64::MAX;
    let mut max = f64::MIN;
    let mut min_location = Point::new(f64::NAN, f64::NAN);
    let mut samples = 0;
    for e in 0..mesh.elements.len() {
        let corners = mesh.element_corners(e);
        let c = Point::new(
            (corners[0].x + corners[1].x + corners[2].x) / 3.0,
            (corners[0].y + corners[1].y + corners[2].y) / 3.0,
        );
        if c.y <= p.y + 0.5 * h {
            continue;
        }
        let g = field.gradient_in(e, [1.0 / 3.0; 3]);
        let v = -(c.y - p.y) * g.x + (c.x - p.x) * g.y;
        samples += 1;
        if v < min {
            min = v;
            min_location = c;
        }
        max = max.max(v);
    }
    if samples == 0 {
        min = 0.0;
        max = 0.0;
    }
    RangeReport {
        min,
        max,
        min_location,
        samples,
    }
}

/// Deterministic sample lattice over a convex polygon: fan-triangulate from
/// the centroid and place a barycentric lattice (including edges) of
/// refinement `k` in each fan triangle.
pub fn sample_convex_polygon(poly: &[Point], k: usize) -> Vec<Point> {
    if poly.len() < 3 {
        return Vec::new();
    }
    let mut cx = 0.0;
    let mut cy = 0.0;
    for p in poly {
        cx += p.x;
        cy += p.y;
    }
    let c = Point::new(cx / poly.len() as f64, cy / poly.len() as f64);
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        for ii in 0..=k {
            for jj in 0..=(k - ii) {
                let l1 = ii as f64 / k as f64;
                let l2 = jj as f64 / k as f64;
                let l0 = 1.0 - l1 - l2;
                out.push(Point::new(
                    l0 * c.x + l1 * a.x + l2 * b.x,
                    l0 * c.y + l1 * a.y + l2 * b.y,
                ));
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DominanceReport {
    /// Minimum of `u(mirror x) - u(x)` over the cap samples: negative values
    /// are dominance violations.
    pub worst_margin: f64,
    pub worst_location: Point,
    pub samples: usize,
    pub cap_area: f64,
    /// Samples whose mirror image landed outside the triangle by more than
    /// 1e-12 (a geometry anomaly: the cap is constructed so mirrors stay
    /// inside).
    pub outside_anomalies: usize,
}

/// Reflection dominance across an axis: for every sample `x` in the cap,
/// the mirror value should not fall below the original.
pub fn reflection_dominance(field: &Field, axis: &ReflectionAxis, k: usize) -> DominanceReport {
    let tri = &field.mesh.triangle;
    let samples = sample_convex_polygon(&axis.cap, k);
    let mut worst = f64::MAX;
    let mut worst_location = Point::new(f64::NAN, f64::NAN);
    let mut used = 0;
    let mut outside_anomalies = 0;
    for &x in &samples {
        let mx = axis.reflect(x);
        let (Some(ux), Some(umx)) = (field.eval(x), field.eval(mx)) else {
            if tri.outside_distance(mx) > 1e-12 {
                outside_anomalies += 1;
            }
            continue;
        };
        used += 1;
        let margin = umx - ux;
        if margin < worst {
            worst = margin;
            worst_location = x;
        }
    }
    if used == 0 {
        worst = 0.0;
    }
    DominanceReport {
        worst_margin: worst,
        worst_location,
        samples: used,
        cap_area: polygon_area(&axis.cap),
        outside_anomalies,
    }
}

/// Minimum of the moving-plane comparison
/// `w(x) = u(2 lambda - x_1, x_2) - u(x)` over the cap right of the vertical
/// plane `x_1 = lambda`, clipped so mirrors stay inside the triangle.
pub fn moving_plane_min(field: &Field, lambda: f64, k: usize) -> DominanceReport {
    let tri = &field.mesh.triangle;
    let poly0 = vec![tri.z1, tri.z2, tri.z3];
    // Right of the plane.
    let mut cap = clip_halfplane(&poly0, Point::new(lambda, 0.0), Point::new(1.0, 0.0));
    // Inside the reflected triangle.
    let reflect = |p: Point| Point::new(2.0 * lambda - p.x, p.y);
    let rt: Vec<Point> = poly0.iter().map(|&p| reflect(p)).collect();
    let rt_tri = Triangle {
        z1: rt[0],
        z2: rt[1],
        z3: rt[2],
    };
    let sgn = if rt_tri.is_ccw() { 1.0 } else { -1.0 };
    for i in 0..3 {
        let a = rt[i];
        let b = rt[(i + 1) % 3];
        let inward = (b - a).unit().rot90() * sgn;
        cap = clip_halfplane(&cap, a, inward);
        if cap.len() < 3 {
            break;
        }
    }
    let samples = sample_convex_polygon(&cap, k);
    let mut worst = f64::MAX;
    let mut worst_location = Point::new(f64::NAN, f64::NAN);
    let mut used = 0;
    for &x in &samples {
        let (Some(ux), Some(umx)) = (field.eval(x), field.eval(reflect(x))) else {
            continue;
        };
        used += 1;
        let w = umx - ux;
        if w < worst {
            worst = w;
            worst_location = x;
        }
    }
    if used == 0 {
        worst = 0.0;
    }
    DominanceReport {
        worst_margin: worst,
        worst_location,
        samples: used,
        cap_area: polygon_area(&cap),
        outside_anomalies: 0,
    }
}

/// The moving-plane comparison at a grid of plane positions: `lambda` runs
/// from `z3.x` (leftmost valid pivot) to the short-side midpoint `1/2` in
/// the canonical frame.
pub fn moving_plane_profile(field: &Field, n: usize, k: usize) -> Vec<(f64, DominanceReport)> {
    let tri = &field.mesh.triangle;
    let lo = tri.z3.x;
    let hi = 0.5 * (tri.z1.x + tri.z2.x);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Stay strictly inside the valid interval: the endpoints give
        // degenerate caps.
        let f = (i as f64 + 0.5) / n as f64;
        let lambda = lo + (hi - lo) * f;
        out.push((lambda, moving_plane_min(field, lambda, k)));
    }
    out
}

/// Tolerance-banded sign of a vertex value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignBand {
    Positive,
    Zero,
    Negative,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexReport {
    /// Values at `[z1, z2, z3]`.
    pub values: [f64; 3],
    pub signs: [SignBand; 3],
    /// `u(z3) >= u(z1) >= u(z2)` within the sign tolerance.
    pub ordering_holds: bool,
    pub sign_tol: f64,
}

pub fn vertex_report(field: &Field, sign_rel_tol: f64) -> VertexReport {
    let values = [
        field.value_at_vertex(0),
        field.value_at_vertex(1),
        field.value_at_vertex(2),
    ];
    let tol = sign_rel_tol * field.sup_norm();
    let band = |v: f64| {
        if v > tol {
            SignBand::Positive
        } else if v < -tol {
            SignBand::Negative
        } else {
            SignBand::Zero
        }
    };
    VertexReport {
        values,
        signs: [band(values[0]), band(values[1]), band(values[2])],
        ordering_holds: values[2] >= values[0] - tol && values[0] >= values[1] - tol,
        sign_tol: tol,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FoldReport {
    /// sup of `|u(x) + u(mirror x)|` over the kite: the antisymmetrization
    /// defect across the bisector at the chosen vertex. Identically zero
    /// exactly for an antisymmetric mode on a triangle isosceles at that
    /// vertex.
    pub sup_antisym_defect: f64,
    /// Same normalized by `sup|u|`.
    pub sup_antisym_rel: f64,
    /// sup of `|u(x) - u(mirror x)|`: the symmetry defect (zero for a mode
    /// symmetric about the bisector).
    pub sup_sym_defect: f64,
    pub sup_sym_rel: f64,
    /// Twice the value at the fold vertex — a lower bound for the
    /// antisymmetrization defect by continuity.
    pub twice_apex_value: f64,
    pub samples: usize,
}

/// Fold defects across the interior bisector at vertex `v` (0, 1, 2 for
/// `z1`, `z2`, `z3`).
pub fn fold_asymmetry(field: &Field, v: usize, k: usize) -> FoldReport {
    let tri = &field.mesh.triangle;
    let vs = tri.vertices();
    let apex = vs[v];
    let d1 = (vs[(v + 1) % 3] - apex).unit();
    let d2 = (vs[(v + 2) % 3] - apex).unit();
    let axis_dir = (d1 + d2).unit();
    let mirror = |p: Point| {
        let w = p - apex;
        let along = axis_dir * w.dot(axis_dir);
        apex + along * 2.0 - w
    };
    // Kite = T intersect mirror(T).
    let poly0 = vec![tri.z1, tri.z2, tri.z3];
    let mt: Vec<Point> = poly0.iter().map(|&p| mirror(p)).collect();
    let m_tri = Triangle {
        z1: mt[0],
        z2: mt[1],
        z3: mt[2],
    };
    let sgn = if m_tri.is_ccw() { 1.0 } else { -1.0 };
    let mut kite = poly0.clone();
    for i in 0..3 {
        let a = mt[i];
        let b = mt[(i + 1) % 3];
        let inward = (b - a).unit().rot90() * sgn;
        kite = clip_halfplane(&kite, a, inward);
        if kite.len() < 3 {
            break;
        }
    }
    let samples = sample_convex_polygon(&kite, k);
    let mut sup_anti = 0.0f64;
    let mut sup_sym = 0.0f64;
    let mut used = 0;
    for &x in &samples {
        let (Some(ux), Some(umx)) = (field.eval(x), field.eval(mirror(x))) else {
            continue;
        };
        used += 1;
        sup_anti = sup_anti.max((ux + umx).abs());
        sup_sym = sup_sym.max((ux - umx).abs());
    }
    let sup = field.sup_norm();
    let rel = |x: f64| if sup > 0.0 { x / sup } else { 0.0 };
    FoldReport {
        sup_antisym_defect: sup_anti,
        sup_antisym_rel: rel(sup_anti),
        sup_sym_defect: sup_sym,
        sup_sym_rel: rel(sup_sym),
        twice_apex_value: 2.0 * field.value_at_vertex(v),
        samples: used,
    }
}
