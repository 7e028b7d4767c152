//! Planar triangle geometry: canonical placement, classification, bisectors,
//! direction frames and reflection axes.
//!
//! Everything downstream (meshing, spectral analysis, inequality checks) works
//! on a *canonical* triangle: `z1 = (0,0)`, `z2 = (1,0)`, `z3` in the upper
//! half-plane, with side lengths ordered `|z2 z3| >= |z3 z1| >= |z1 z2|`
//! (longest side opposite `z1`, shortest side on the x-axis). `canonicalize`
//! maps an arbitrary labeled triangle onto that frame by a similarity
//! transform (rotation + scaling + translation + optional mirror) and a vertex
//! relabeling, and returns the transform record so results can be mapped back.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Relative tolerance for declaring two side lengths equal (isosceles ties).
///
/// Relative to the longest side. Ties feed the deterministic relabeling rule
/// and the symmetry classification; 1e-9 is far above f64 noise from the
/// similarity arithmetic (~1e-15) and far below any meaningful shape gap.
pub const SIDE_TIE_REL_TOL: f64 = 1e-9;

/// Absolute tolerance (radians) for angle classification boundaries.
pub const ANGLE_TIE_TOL: f64 = 1e-9;

/// Relative area floor below which a vertex triple is considered degenerate.
pub const DEGENERATE_REL_AREA: f64 = 1e-14;

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("degenerate triangle: vertices are (numerically) collinear")]
    Degenerate,
    #[error("cannot parse triangle literal: {0}")]
    Parse(String),
}

/// A point (or free vector) in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product `self × other`.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn unit(self) -> Point {
        let n = self.norm();
        Point::new(self.x / n, self.y / n)
    }

    /// Counter-clockwise rotation by 90 degrees.
    pub fn rot90(self) -> Point {
        Point::new(-self.y, self.x)
    }

    /// Complex multiplication treating points as `x + iy`.
    pub fn cmul(self, other: Point) -> Point {
        Point::new(
            self.x * other.x - self.y * other.y,
            self.x * other.y + self.y * other.x,
        )
    }

    /// Complex reciprocal `1/z`.
    pub fn cinv(self) -> Point {
        let d = self.x * self.x + self.y * self.y;
        Point::new(self.x / d, -self.y / d)
    }

    pub fn conj(self) -> Point {
        Point::new(self.x, -self.y)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(self.x + t * (other.x - self.x), self.y + t * (other.y - self.y))
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl std::ops::Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [x, y] = <[f64; 2]>::deserialize(deserializer)?;
        Ok(Point::new(x, y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Sides of a (canonical) triangle, numbered cyclically: side `i` joins
/// vertex `i` to vertex `i+1 mod 3`. In the canonical frame side 0 (`z1 z2`)
/// is the shortest, side 1 (`z2 z3`) the longest and side 2 (`z3 z1`) the
/// middle one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// `z1 z2`, the shortest side of a canonical triangle.
    Short,
    /// `z2 z3`, the longest side of a canonical triangle.
    Long,
    /// `z3 z1`, the middle side of a canonical triangle.
    Medium,
}

impl Side {
    pub const ALL: [Side; 3] = [Side::Short, Side::Long, Side::Medium];

    /// Cyclic index: side `i` joins vertex `i` and vertex `i+1`.
    pub fn index(self) -> usize {
        match self {
            Side::Short => 0,
            Side::Long => 1,
            Side::Medium => 2,
        }
    }

    pub fn from_index(i: usize) -> Side {
        match i {
            0 => Side::Short,
            1 => Side::Long,
            2 => Side::Medium,
            _ => panic!("side index out of range: {i}"),
        }
    }

    /// One-letter name used in CLI boundary specs (`S`, `L`, `M`).
    pub fn letter(self) -> char {
        match self {
            Side::Short => 'S',
            Side::Long => 'L',
            Side::Medium => 'M',
        }
    }
}

/// A labeled triangle. Vertex order carries meaning: all canonical-frame
/// conventions (side names, direction frames, reflection axes) are defined
/// relative to the labels `z1, z2, z3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub z1: Point,
    pub z2: Point,
    pub z3: Point,
}

impl Triangle {
    pub fn new(z1: Point, z2: Point, z3: Point) -> Result<Self, GeometryError> {
        let t = Triangle { z1, z2, z3 };
        let scale = t.longest_side_length();
        if t.signed_area().abs() <= DEGENERATE_REL_AREA * scale * scale {
            return Err(GeometryError::Degenerate);
        }
        Ok(t)
    }

    /// Parse the plain-text literal `x1,y1;x2,y2;x3,y3`.
    pub fn from_literal(s: &str) -> Result<Self, GeometryError> {
        let mut pts = Vec::with_capacity(3);
        for part in s.split(';') {
            let coords: Vec<&str> = part.split(',').map(str::trim).collect();
            if coords.len() != 2 {
                return Err(GeometryError::Parse(format!(
                    "expected `x,y` pair, got `{part}`"
                )));
            }
            let x: f64 = coords[0]
                .parse()
                .map_err(|e| GeometryError::Parse(format!("bad coordinate `{}`: {e}", coords[0])))?;
            let y: f64 = coords[1]
                .parse()
                .map_err(|e| GeometryError::Parse(format!("bad coordinate `{}`: {e}", coords[1])))?;
            if !x.is_finite() || !y.is_finite() {
                return Err(GeometryError::Parse("non-finite coordinate".into()));
            }
            pts.push(Point::new(x, y));
        }
        if pts.len() != 3 {
            return Err(GeometryError::Parse(format!(
                "expected 3 vertices separated by `;`, got {}",
                pts.len()
            )));
        }
        Triangle::new(pts[0], pts[1], pts[2])
    }

    /// Parse the JSON literal `[[x1,y1],[x2,y2],[x3,y3]]`.
    pub fn from_json(s: &str) -> Result<Self, GeometryError> {
        let pts: [[f64; 2]; 3] =
            serde_json::from_str(s).map_err(|e| GeometryError::Parse(e.to_string()))?;
        Triangle::new(
            Point::new(pts[0][0], pts[0][1]),
            Point::new(pts[1][0], pts[1][1]),
            Point::new(pts[2][0], pts[2][1]),
        )
    }

    pub fn vertices(&self) -> [Point; 3] {
        [self.z1, self.z2, self.z3]
    }

    pub fn vertex(&self, i: usize) -> Point {
        match i {
            0 => self.z1,
            1 => self.z2,
            2 => self.z3,
            _ => panic!("vertex index out of range: {i}"),
        }
    }

    /// Endpoints of a side in cyclic orientation (`z1->z2`, `z2->z3`, `z3->z1`).
    pub fn side_endpoints(&self, side: Side) -> (Point, Point) {
        match side {
            Side::Short => (self.z1, self.z2),
            Side::Long => (self.z2, self.z3),
            Side::Medium => (self.z3, self.z1),
        }
    }

    pub fn side_length(&self, side: Side) -> f64 {
        let (a, b) = self.side_endpoints(side);
        a.dist(b)
    }

    /// Side lengths in cyclic order `[|z1 z2|, |z2 z3|, |z3 z1|]`.
    pub fn side_lengths(&self) -> [f64; 3] {
        [
            self.z1.dist(self.z2),
            self.z2.dist(self.z3),
            self.z3.dist(self.z1),
        ]
    }

    pub fn longest_side_length(&self) -> f64 {
        let l = self.side_lengths();
        l[0].max(l[1]).max(l[2])
    }

    pub fn diameter(&self) -> f64 {
        self.longest_side_length()
    }

    /// Interior angle at vertex `i` (radians), computed via `atan2` so it is
    /// accurate for both thin and flat corners.
    pub fn angle(&self, i: usize) -> f64 {
        let v = self.vertex(i);
        let a = self.vertex((i + 1) % 3) - v;
        let b = self.vertex((i + 2) % 3) - v;
        a.cross(b).abs().atan2(a.dot(b))
    }

    /// Interior angles `[at z1, at z2, at z3]`.
    pub fn angles(&self) -> [f64; 3] {
        [self.angle(0), self.angle(1), self.angle(2)]
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * (self.z2 - self.z1).cross(self.z3 - self.z1)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn is_ccw(&self) -> bool {
        self.signed_area() > 0.0
    }

    /// Barycentric coordinates of `p` with respect to `(z1, z2, z3)`.
    pub fn barycentric(&self, p: Point) -> [f64; 3] {
        let d = (self.z2 - self.z1).cross(self.z3 - self.z1);
        let l2 = (p - self.z1).cross(self.z3 - self.z1) / d;
        let l3 = (self.z2 - self.z1).cross(p - self.z1) / d;
        [1.0 - l2 - l3, l2, l3]
    }

    pub fn barycentric_point(&self, l: [f64; 3]) -> Point {
        Point::new(
            l[0] * self.z1.x + l[1] * self.z2.x + l[2] * self.z3.x,
            l[0] * self.z1.y + l[1] * self.z2.y + l[2] * self.z3.y,
        )
    }

    /// Closed-triangle membership with an absolute slack on the barycentric
    /// coordinates (scaled test: negative coordinates beyond `tol` reject).
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        let l = self.barycentric(p);
        l.iter().all(|&c| c >= -tol)
    }

    /// How far outside the closed triangle `p` lies, in absolute distance
    /// units (0 for interior/boundary points).
    pub fn outside_distance(&self, p: Point) -> f64 {
        let mut worst = 0.0f64;
        for side in Side::ALL {
            let (a, b) = self.side_endpoints(side);
            let tau = (b - a).unit();
            let inward = tau.rot90() * if self.is_ccw() { 1.0 } else { -1.0 };
            let d = (p - a).dot(inward);
            if d < 0.0 {
                worst = worst.max(-d);
            }
        }
        worst
    }

    pub fn centroid(&self) -> Point {
        Point::new(
            (self.z1.x + self.z2.x + self.z3.x) / 3.0,
            (self.z1.y + self.z2.y + self.z3.y) / 3.0,
        )
    }
}

/// Similarity transform `w(z) = a*z + b` (or `w(z) = a*conj(z) + b` when
/// `conjugate` is set) in complex notation, together with the vertex
/// relabeling it was composed with. `permutation[k]` is the original vertex
/// index that became canonical vertex `k`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Similarity {
    pub a: Point,
    pub b: Point,
    pub conjugate: bool,
    pub permutation: [usize; 3],
}

impl Similarity {
    pub fn apply(&self, p: Point) -> Point {
        let z = if self.conjugate { p.conj() } else { p };
        self.a.cmul(z) + self.b
    }

    pub fn scale(&self) -> f64 {
        self.a.norm()
    }

    pub fn is_identity(&self) -> bool {
        self.a == Point::new(1.0, 0.0)
            && self.b == Point::new(0.0, 0.0)
            && !self.conjugate
            && self.permutation == [0, 1, 2]
    }
}

/// Canonicalize a labeled triangle: relabel vertices so that
/// `|z2 z3| >= |z3 z1| >= |z1 z2|` (ties resolved toward the lexicographically
/// smallest permutation of original indices), then map `z1 -> (0,0)`,
/// `z2 -> (1,0)` by a similarity, mirroring if needed so `z3` lands in the
/// open upper half-plane.
///
/// Idempotent: running it on an already-canonical triangle returns the
/// identity transform and bit-identical vertices.
pub fn canonicalize(t: &Triangle) -> Result<(Triangle, Similarity), GeometryError> {
    let scale = t.longest_side_length();
    if t.signed_area().abs() <= DEGENERATE_REL_AREA * scale * scale {
        return Err(GeometryError::Degenerate);
    }
    let v = t.vertices();
    let tie = SIDE_TIE_REL_TOL * scale;

    // All labelings (p1,p2,p3) with |p2 p3| >= |p3 p1| >= |p1 p2| up to ties,
    // lexicographically smallest first.
    let mut best: Option<[usize; 3]> = None;
    for p1 in 0..3 {
        for p2 in 0..3 {
            if p2 == p1 {
                continue;
            }
            let p3 = 3 - p1 - p2;
            let l12 = v[p1].dist(v[p2]);
            let l23 = v[p2].dist(v[p3]);
            let l31 = v[p3].dist(v[p1]);
            if l23 >= l31 - tie && l31 >= l12 - tie {
                best = Some([p1, p2, p3]);
                break;
            }
        }
        if best.is_some() {
            break;
        }
    }
    let perm = best.expect("a nondegenerate triangle always admits a canonical labeling");
    let (a_pt, b_pt, c_pt) = (v[perm[0]], v[perm[1]], v[perm[2]]);

    // Orientation after relabeling decides whether we need the mirror branch.
    let ccw = (b_pt - a_pt).cross(c_pt - a_pt) > 0.0;
    let (a, b, conjugate) = if ccw {
        let a = (b_pt - a_pt).cinv();
        (a, -a.cmul(a_pt), false)
    } else {
        let a = (b_pt - a_pt).conj().cinv();
        (a, -a.cmul(a_pt.conj()), true)
    };
    let sim = Similarity {
        a,
        b,
        conjugate,
        permutation: perm,
    };

    // The images of the first two vertices are (0,0) and (1,0) by
    // construction; pin them exactly (discarding last-bit rounding from the
    // complex arithmetic) so canonical output is exactly canonical and
    // idempotence is exact.
    let canonical = Triangle {
        z1: Point::new(0.0, 0.0),
        z2: Point::new(1.0, 0.0),
        z3: sim.apply(c_pt),
    };
    Ok((canonical, sim))
}

/// Angle classification of a triangle (largest interior angle vs right angle).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleClass {
    Acute,
    Right,
    Obtuse,
}

/// Symmetry classification. For isosceles triangles the *apex* is the vertex
/// shared by the two equal sides; `SubEquilateral` means apex angle < 60°
/// (equal sides are the two longest), `SuperEquilateral` apex angle > 60°
/// (equal sides are the two shortest). `OtherIsosceles` covers the sliver of
/// isosceles triangles whose apex angle is within tolerance of 60° without
/// all three sides tying.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    Equilateral,
    SubEquilateral,
    SuperEquilateral,
    OtherIsosceles,
    Scalene,
}

/// Classification record: the two classes plus how far (dimensionless) the
/// triangle sits from the nearest classification boundary, so callers can see
/// when a label is numerically fragile.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TriangleClass {
    pub angle_class: AngleClass,
    pub symmetry_class: SymmetryClass,
    /// min( |largest angle − π/2| , smallest relative side-length gap ) —
    /// distance to the nearest angle- or symmetry-class boundary.
    pub boundary_distance: f64,
}

pub fn classify(t: &Triangle) -> TriangleClass {
    let angles = t.angles();
    let max_angle = angles.iter().cloned().fold(f64::MIN, f64::max);
    let angle_class = if (max_angle - std::f64::consts::FRAC_PI_2).abs() <= ANGLE_TIE_TOL {
        AngleClass::Right
    } else if max_angle > std::f64::consts::FRAC_PI_2 {
        AngleClass::Obtuse
    } else {
        AngleClass::Acute
    };

    let l = t.side_lengths();
    let lmax = t.longest_side_length();
    let tie = SIDE_TIE_REL_TOL * lmax;
    // Pairs of equal sides; side i is opposite vertex (i+2)%3 in cyclic
    // numbering, and the apex of an isosceles pair is the vertex the two
    // sides share.
    let eq01 = (l[0] - l[1]).abs() <= tie;
    let eq12 = (l[1] - l[2]).abs() <= tie;
    let eq20 = (l[2] - l[0]).abs() <= tie;
    let third = std::f64::consts::FRAC_PI_3;

    let symmetry_class = if eq01 && eq12 && eq20 {
        SymmetryClass::Equilateral
    } else if eq01 || eq12 || eq20 {
        // shared vertex of the two equal sides
        let apex = if eq01 {
            1 // sides z1z2 and z2z3 meet at z2
        } else if eq12 {
            2 // sides z2z3 and z3z1 meet at z3
        } else {
            0 // sides z3z1 and z1z2 meet at z1
        };
        let apex_angle = t.angle(apex);
        if apex_angle < third - ANGLE_TIE_TOL {
            SymmetryClass::SubEquilateral
        } else if apex_angle > third + ANGLE_TIE_TOL {
            SymmetryClass::SuperEquilateral
        } else {
            SymmetryClass::OtherIsosceles
        }
    } else {
        SymmetryClass::Scalene
    };

    let min_rel_gap = [
        (l[0] - l[1]).abs(),
        (l[1] - l[2]).abs(),
        (l[2] - l[0]).abs(),
    ]
    .into_iter()
    .fold(f64::MAX, f64::min)
        / lmax;
    let boundary_distance = (max_angle - std::f64::consts::FRAC_PI_2).abs().min(min_rel_gap);

    TriangleClass {
        angle_class,
        symmetry_class,
        boundary_distance,
    }
}

/// Positional side indices ordered by true length, shortest first, stable
/// under ties. Works on any vertex labeling, not just the canonical one.
pub fn sides_by_length(t: &Triangle) -> [usize; 3] {
    let mut idx = [0usize, 1, 2];
    let len: Vec<f64> = (0..3)
        .map(|k| t.vertex(k).dist(t.vertex((k + 1) % 3)))
        .collect();
    idx.sort_by(|&a, &b| len[a].partial_cmp(&len[b]).unwrap().then(a.cmp(&b)));
    idx
}

/// Direction along which the second Neumann mode is expected monotone,
/// computed from the true side lengths (any vertex labeling): perpendicular
/// to the shortest side and pointing into the triangle when every angle is
/// acute, otherwise parallel to the longest side, oriented away from its
/// endpoint on the shortest side (where the mode takes its minimum).
pub fn monotone_direction(t: &Triangle, angle_class: AngleClass) -> Point {
    let [ks, _, kl] = sides_by_length(t);
    match angle_class {
        AngleClass::Acute => {
            let a = t.vertex(ks);
            let b = t.vertex((ks + 1) % 3);
            let opposite = t.vertex((ks + 2) % 3);
            let mut dir = (b - a).unit().rot90();
            if dir.dot(opposite - a) < 0.0 {
                dir = dir * -1.0;
            }
            dir
        }
        AngleClass::Right | AngleClass::Obtuse => {
            // Endpoint of the longest side shared with the shortest side,
            // i.e. the vertex between them.
            let shared = if kl == (ks + 1) % 3 { kl } else { ks };
            let far = if shared == kl { (kl + 1) % 3 } else { kl };
            (t.vertex(far) - t.vertex(shared)).unit()
        }
    }
}

/// Foot of the internal angle bisector from vertex `i` on the opposite side.
///
/// The foot divides the opposite side `(u, w)` in the ratio of the adjacent
/// side lengths: `p = u + |i u| / (|i u| + |i w|) * (w - u)`.
pub fn bisector_foot(t: &Triangle, i: usize) -> Point {
    let v = t.vertex(i);
    let u = t.vertex((i + 1) % 3);
    let w = t.vertex((i + 2) % 3);
    let lu = v.dist(u);
    let lw = v.dist(w);
    u.lerp(w, lu / (lu + lw))
}

/// Length of the internal bisector segment from vertex `i` to its foot,
/// via the closed form `2 l1 l2 cos(α/2) / (l1 + l2)` with `l1, l2` the
/// adjacent side lengths and `α` the interior angle at `i`.
pub fn bisector_length(t: &Triangle, i: usize) -> f64 {
    let l1 = t.vertex(i).dist(t.vertex((i + 1) % 3));
    let l2 = t.vertex(i).dist(t.vertex((i + 2) % 3));
    let alpha = t.angle(i);
    2.0 * l1 * l2 * (alpha / 2.0).cos() / (l1 + l2)
}

/// Foot of the perpendicular dropped from vertex `from` onto the line through
/// the side joining the other two vertices.
pub fn perpendicular_foot(t: &Triangle, from: usize) -> Point {
    let p = t.vertex(from);
    let a = t.vertex((from + 1) % 3);
    let b = t.vertex((from + 2) % 3);
    let d = (b - a).unit();
    a + d * (p - a).dot(d)
}

/// Unit tangent and inward unit normal of a side. Tangents follow the cyclic
/// orientation (`z1->z2`, `z2->z3`, `z3->z1`), so for counter-clockwise
/// triangles the 90°-rotated tangent points inward.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DirectionFrame {
    pub tau: Point,
    pub normal: Point,
}

pub fn direction_frame(t: &Triangle, side: Side) -> DirectionFrame {
    let (a, b) = t.side_endpoints(side);
    let tau = (b - a).unit();
    let normal = tau.rot90() * if t.is_ccw() { 1.0 } else { -1.0 };
    DirectionFrame { tau, normal }
}

/// A reflection axis of the moving-plane construction: the perpendicular
/// bisector of one side, together with the cap polygon on which reflected
/// values are compared against original ones. Reflecting the cap across the
/// axis stays inside the closed triangle by construction (the cap is clipped
/// against both the triangle and the reflected triangle); any residual
/// protrusion of the *unclipped* natural cap is recorded in
/// `containment_violation` (absolute distance units).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReflectionAxis {
    /// A point on the axis (the side midpoint).
    pub origin: Point,
    /// Unit direction along the axis.
    pub direction: Point,
    /// Which canonical side's perpendicular bisector this is.
    pub side: Side,
    /// Cap polygon (counter-clockwise, clipped against the triangle and the
    /// reflected triangle). Points `x` in the cap satisfy: `x` and its mirror
    /// both lie in the closed triangle, with the mirror on the dominant side.
    pub cap: Vec<Point>,
    /// Max distance by which reflecting the unclipped cap would exit the
    /// closed triangle (0 when the natural cap reflects inside).
    pub containment_violation: f64,
    /// Unit normal of the axis pointing toward the cap side.
    pub cap_side_normal: Point,
}

impl ReflectionAxis {
    fn new(origin: Point, direction: Point, side: Side, cap_normal: Point) -> Self {
        ReflectionAxis {
            origin,
            direction,
            side,
            cap: Vec::new(),
            containment_violation: 0.0,
            cap_side_normal: cap_normal,
        }
    }

    /// Mirror image of `p` across the axis line.
    pub fn reflect(&self, p: Point) -> Point {
        let v = p - self.origin;
        let along = self.direction * v.dot(self.direction);
        self.origin + along * 2.0 - v
    }

    /// Signed distance of `p` from the axis, positive on the cap side.
    pub fn signed_distance(&self, p: Point) -> f64 {
        (p - self.origin).dot(self.cap_side_normal)
    }
}

/// Clip a convex polygon against the half-plane `{ x : n·(x − p0) >= 0 }`.
pub fn clip_halfplane(poly: &[Point], p0: Point, n: Point) -> Vec<Point> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let m = poly.len();
    for i in 0..m {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        let da = (a - p0).dot(n);
        let db = (b - p0).dot(n);
        if da >= 0.0 {
            out.push(a);
        }
        if (da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0) {
            let t = da / (da - db);
            out.push(a.lerp(b, t));
        }
    }
    out
}

pub fn polygon_area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        s += a.cross(b);
    }
    0.5 * s.abs()
}

/// Reflection axes for a canonical triangle.
///
/// * axis `S`: perpendicular bisector of the shortest side `z1 z2`; its cap
///   is the part of the triangle on the `z2` side (mirrors map toward `z1`).
/// * axis `M`: perpendicular bisector of the middle side `z3 z1`; its cap is
///   the part on the `z1` side (mirrors map toward `z3`).
///
/// For each axis the cap polygon is `T ∩ {cap side} ∩ reflect(T)`, so every
/// cap point and its mirror lie in the closed triangle.
pub fn reflection_axes(t: &Triangle) -> (ReflectionAxis, ReflectionAxis) {
    let s_axis = reflection_axis(t, Side::Short, t.z2);
    let m_axis = reflection_axis(t, Side::Medium, t.z1);
    (s_axis, m_axis)
}

/// Reflection axis across the perpendicular bisector of any positional
/// side, with the cap on the side of `cap_vertex` (one of the two endpoints
/// of `side`). Needed for triangles whose positional labels do not follow
/// the canonical length ordering.
pub fn reflection_axis(t: &Triangle, side: Side, cap_vertex: Point) -> ReflectionAxis {
    let (a, b) = t.side_endpoints(side);
    let origin = a.midpoint(b);
    // Axis runs perpendicular to the side.
    let direction = (b - a).unit().rot90();
    // Outward from the axis toward the cap vertex.
    let to_cap = cap_vertex - origin;
    let n_raw = to_cap - direction * to_cap.dot(direction);
    let cap_normal = n_raw.unit();
    let mut axis = ReflectionAxis::new(origin, direction, side, cap_normal);

    let tri_poly = [t.z1, t.z2, t.z3];
    // Natural cap: triangle clipped to the cap side of the axis.
    let natural = clip_halfplane(&tri_poly, origin, cap_normal);
    // Containment violation of the natural cap under reflection.
    let mut violation = 0.0f64;
    for &p in &natural {
        violation = violation.max(t.outside_distance(axis.reflect(p)));
    }
    // Reflected triangle as a polygon (reflection preserves convexity).
    let refl_tri: Vec<Point> = tri_poly.iter().map(|&p| axis.reflect(p)).collect();
    // Clip the natural cap against the reflected triangle's half-planes so
    // the published cap always mirrors inside the original triangle.
    let mut cap = natural;
    let rt = Triangle {
        z1: refl_tri[0],
        z2: refl_tri[1],
        z3: refl_tri[2],
    };
    let ccw = if rt.is_ccw() { 1.0 } else { -1.0 };
    for i in 0..3 {
        let p0 = refl_tri[i];
        let p1 = refl_tri[(i + 1) % 3];
        let inward = (p1 - p0).unit().rot90() * ccw;
        cap = clip_halfplane(&cap, p0, inward);
        if cap.is_empty() {
            break;
        }
    }
    axis.cap = cap;
    axis.containment_violation = violation;
    axis
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tri(ax: f64, ay: f64, bx: f64, by: f64, cx: f64, cy: f64) -> Triangle {
        Triangle::new(
            Point::new(ax, ay),
            Point::new(bx, by),
            Point::new(cx, cy),
        )
        .expect("test triangle must be nondegenerate")
    }

    #[test]
    fn literal_roundtrip() {
        let t = Triangle::from_literal("0,0;1,0;0.3,0.9").unwrap();
        assert_eq!(t.z3, Point::new(0.3, 0.9));
        let t2 = Triangle::from_json("[[0,0],[1,0],[0.3,0.9]]").unwrap();
        assert_eq!(t, t2);
    }

    #[test]
    fn literal_rejects_malformed() {
        assert!(Triangle::from_literal("0,0;1,0").is_err());
        assert!(Triangle::from_literal("0,0;1,0;a,b").is_err());
        assert!(Triangle::from_literal("0,0;1,0;2,0").is_err(), "collinear");
        assert!(Triangle::from_json("[[0,0],[1,0]]").is_err());
    }

    #[test]
    fn angles_sum_to_pi() {
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.3, 0.9);
        let s: f64 = t.angles().iter().sum();
        assert!((s - std::f64::consts::PI).abs() < 1e-12, "angle sum {s}");
    }

    #[test]
    fn canonicalize_scales_half_equilateral() {
        // 30-60-90 triangle at twice the canonical size.
        let t = tri(0.0, 0.0, 2.0, 0.0, 0.0, 2.0 * 3.0f64.sqrt());
        let (c, sim) = canonicalize(&t).unwrap();
        assert_eq!(c.z1, Point::new(0.0, 0.0));
        assert_eq!(c.z2, Point::new(1.0, 0.0));
        assert!((c.z3.x - 0.0).abs() < 1e-15);
        assert!((c.z3.y - 3.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(sim.permutation, [0, 1, 2]);
        assert!((sim.scale() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn canonicalize_relabels_and_mirrors() {
        // Shortest side is z3 z1 here; canonical labeling keeps z1 first,
        // makes the old z3 the new z2, and needs the mirror branch.
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.3, 0.9);
        let (c, sim) = canonicalize(&t).unwrap();
        assert_eq!(sim.permutation, [0, 2, 1]);
        assert!(sim.conjugate);
        assert!((c.z3.x - 1.0 / 3.0).abs() < 1e-14);
        assert!((c.z3.y - 1.0).abs() < 1e-14);
        let l = c.side_lengths();
        assert!(l[1] >= l[2] && l[2] >= l[0], "side ordering {:?}", l);
        // The original shortest side maps to unit length.
        assert!((sim.scale() - 1.0 / 0.9f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn canonicalize_is_idempotent_exactly() {
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.3, 0.9);
        let (c, _) = canonicalize(&t).unwrap();
        let (c2, sim2) = canonicalize(&c).unwrap();
        assert!(sim2.is_identity(), "second transform: {sim2:?}");
        assert_eq!(c.z3, c2.z3);
    }

    #[test]
    fn canonicalize_equilateral_prefers_identity_labeling() {
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.5, 3.0f64.sqrt() / 2.0);
        let (_, sim) = canonicalize(&t).unwrap();
        assert_eq!(sim.permutation, [0, 1, 2]);
        assert!(!sim.conjugate);
    }

    #[test]
    fn classify_named_shapes() {
        let eq = tri(0.0, 0.0, 1.0, 0.0, 0.5, 3.0f64.sqrt() / 2.0);
        assert_eq!(classify(&eq).symmetry_class, SymmetryClass::Equilateral);
        assert_eq!(classify(&eq).angle_class, AngleClass::Acute);

        // Right isosceles: legs 1, apex (right angle) at z1.
        let right = tri(0.0, 0.0, 1.0, 0.0, 0.0, 1.0);
        let cls = classify(&right);
        assert_eq!(cls.angle_class, AngleClass::Right);
        assert_eq!(cls.symmetry_class, SymmetryClass::SuperEquilateral);

        // Tall isosceles: apex angle < 60 degrees.
        let tall = tri(0.0, 0.0, 1.0, 0.0, 0.5, 2.0);
        assert_eq!(classify(&tall).symmetry_class, SymmetryClass::SubEquilateral);

        let scalene = tri(0.0, 0.0, 1.0, 0.0, 0.3, 0.9);
        let cls = classify(&scalene);
        assert_eq!(cls.symmetry_class, SymmetryClass::Scalene);
        assert!(cls.boundary_distance > 0.0);

        let obtuse = tri(0.0, 0.0, 1.0, 0.0, -0.3, 0.4);
        assert_eq!(classify(&obtuse).angle_class, AngleClass::Obtuse);
    }

    #[test]
    fn monotone_direction_depends_on_the_angle_class() {
        // Canonical acute scalene: shortest side on the x-axis, so the
        // expected direction is straight up.
        let acute = tri(0.0, 0.0, 1.0, 0.0, 0.45, 1.1);
        let d = monotone_direction(&acute, AngleClass::Acute);
        let up = (acute.z2 - acute.z1).unit().rot90();
        assert!((d - up).dot(d - up) < 1e-28);

        // Canonical obtuse: direction runs along the longest side from the
        // vertex it shares with the shortest side (z2) toward the far one.
        let obtuse = Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(-0.4, 0.8),
        );
        let (c, _) = canonicalize(&obtuse).unwrap();
        let d = monotone_direction(&c, classify(&c).angle_class);
        let along = (c.z3 - c.z2).unit();
        assert!((d - along).dot(d - along) < 1e-28, "{d:?} vs {along:?}");

        // A rotated copy must give the rotated direction (no reliance on
        // canonical labels).
        let rot = |p: Point| Point::new(-p.y, p.x);
        let spun = Triangle::new(rot(acute.z2), rot(acute.z3), rot(acute.z1));
        let d2 = monotone_direction(&spun, AngleClass::Acute);
        let want = rot(up);
        assert!((d2 - want).dot(d2 - want) < 1e-28, "{d2:?} vs {want:?}");
    }

    #[test]
    fn bisector_foot_on_opposite_side() {
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.3, 0.9);
        let p = bisector_foot(&t, 0);
        // Foot lies on segment z2 z3.
        let l = t.barycentric(p);
        assert!(l[0].abs() < 1e-14, "foot off the opposite side: {l:?}");
        assert!(l[1] > 0.0 && l[2] > 0.0);
        // Angle bisection: the two half-angles agree.
        let v = t.z1;
        let a1 = ((t.z2 - v).unit().dot((p - v).unit())).acos();
        let a2 = ((t.z3 - v).unit().dot((p - v).unit())).acos();
        assert!((a1 - a2).abs() < 1e-12, "bisector halves differ: {a1} vs {a2}");
    }

    #[test]
    fn perpendicular_foot_is_orthogonal() {
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.3, 0.9);
        let h = perpendicular_foot(&t, 1); // from z2 onto line z3 z1
        let d = (t.z1 - t.z3).unit();
        assert!((h - t.z2).dot(d).abs() < 1e-14);
    }

    #[test]
    fn direction_frames_point_inward() {
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.3, 0.9);
        let c = t.centroid();
        for side in Side::ALL {
            let f = direction_frame(&t, side);
            let (a, b) = t.side_endpoints(side);
            let mid = a.midpoint(b);
            assert!((f.tau.norm() - 1.0).abs() < 1e-15);
            assert!((f.normal.norm() - 1.0).abs() < 1e-15);
            assert!(f.tau.dot(f.normal).abs() < 1e-15);
            assert!(
                (c - mid).dot(f.normal) > 0.0,
                "normal of {side:?} does not point inward"
            );
        }
    }

    #[test]
    fn canonical_direction_frames_match_angle_formulas() {
        // For canonical triangles the medium-side frame can be written in
        // terms of the angle at z1 and the long-side frame in terms of the
        // angle at z2.
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.3, 0.9);
        let (c, _) = canonicalize(&t).unwrap();
        let alpha = c.angle(0);
        let beta = c.angle(1);
        let fm = direction_frame(&c, Side::Medium);
        assert!((fm.tau.x - (-alpha.cos())).abs() < 1e-14);
        assert!((fm.tau.y - (-alpha.sin())).abs() < 1e-14);
        assert!((fm.normal.x - alpha.sin()).abs() < 1e-14);
        assert!((fm.normal.y - (-alpha.cos())).abs() < 1e-14);
        let fl = direction_frame(&c, Side::Long);
        assert!((fl.tau.x - (-beta.cos())).abs() < 1e-14);
        assert!((fl.tau.y - beta.sin()).abs() < 1e-14);
    }

    #[test]
    fn reflection_axis_short_side_cap_for_half_equilateral() {
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.0, 3.0f64.sqrt());
        let (s, m) = reflection_axes(&t);
        // Axis S is the vertical line x = 1/2; the cap is the right portion,
        // a triangle with corners (1/2, 0), (1, 0), (1/2, sqrt(3)/2).
        assert!((s.origin.x - 0.5).abs() < 1e-15 && s.origin.y == 0.0);
        assert!(s.direction.x.abs() < 1e-15);
        let area = polygon_area(&s.cap);
        let expected = 0.25 * 3.0f64.sqrt() / 2.0; // ½·½·(√3/2)
        assert!(
            (area - expected).abs() < 1e-12,
            "cap area {area} vs {expected}"
        );
        assert!(s.containment_violation < 1e-12);
        // Axis M caps the z1 corner; every cap point mirrors into the triangle.
        for &p in &m.cap {
            assert!(t.contains(m.reflect(p), 1e-10));
            assert!(m.signed_distance(p) >= -1e-12);
        }
    }

    #[test]
    fn isosceles_short_axis_is_symmetry_axis() {
        // |z3 z1| = |z3 z2| makes axis S the symmetry axis; the cap is half
        // the triangle.
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.5, 1.2);
        let (s, _) = reflection_axes(&t);
        assert!((polygon_area(&s.cap) - 0.5 * t.area()).abs() < 1e-12);
        assert!(s.containment_violation < 1e-12);
    }

    #[test]
    fn clip_halfplane_square() {
        let square = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let right = clip_halfplane(&square, Point::new(0.5, 0.0), Point::new(1.0, 0.0));
        assert!((polygon_area(&right) - 0.5).abs() < 1e-15);
        let empty = clip_halfplane(&square, Point::new(2.0, 0.0), Point::new(1.0, 0.0));
        assert!(polygon_area(&empty) == 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        /// Bisector segment length matches the closed form to 1e-12 relative
        /// over random nondegenerate triangles.
        #[test]
        fn bisector_length_closed_form(
            bx in 0.2f64..3.0,
            cx in -2.0f64..2.0,
            cy in 0.05f64..3.0,
        ) {
            let t = Triangle::new(
                Point::new(0.0, 0.0),
                Point::new(bx, 0.0),
                Point::new(cx, cy),
            );
            prop_assume!(t.is_ok());
            let t = t.unwrap();
            prop_assume!(t.area() > 1e-3 * t.longest_side_length().powi(2));
            for i in 0..3 {
                let foot = bisector_foot(&t, i);
                let measured = t.vertex(i).dist(foot);
                let formula = bisector_length(&t, i);
                prop_assert!(
                    (measured - formula).abs() <= 1e-12 * formula,
                    "vertex {}: measured {} vs formula {}", i, measured, formula
                );
            }
        }

        /// Canonicalization always produces the canonical frame and is
        /// idempotent with an exact-identity second transform.
        #[test]
        fn canonicalize_properties(
            bx in 0.2f64..3.0,
            cx in -2.0f64..2.0,
            cy in 0.05f64..3.0,
            flip in proptest::bool::ANY,
        ) {
            let c3 = if flip { Point::new(cx, -cy) } else { Point::new(cx, cy) };
            let t = Triangle::new(Point::new(0.0, 0.0), Point::new(bx, 0.0), c3);
            prop_assume!(t.is_ok());
            let t = t.unwrap();
            prop_assume!(t.area() > 1e-3 * t.longest_side_length().powi(2));
            let (c, sim) = canonicalize(&t).unwrap();
            prop_assert!(c.z3.y > 0.0, "z3 must land in the upper half-plane");
            let l = c.side_lengths();
            let tie = SIDE_TIE_REL_TOL * c.longest_side_length();
            prop_assert!(l[1] >= l[2] - tie && l[2] >= l[0] - tie, "ordering {:?}", l);
            prop_assert!((l[0] - 1.0).abs() < 1e-12, "unit shortest side");
            // Transform maps original labeled vertices onto canonical ones.
            let v = t.vertices();
            prop_assert!(sim.apply(v[sim.permutation[0]]).dist(c.z1) < 1e-12);
            prop_assert!(sim.apply(v[sim.permutation[1]]).dist(c.z2) < 1e-12);
            prop_assert!(sim.apply(v[sim.permutation[2]]).dist(c.z3) < 1e-12);
            // Idempotence.
            let (_, sim2) = canonicalize(&c).unwrap();
            prop_assert!(sim2.is_identity());
            // Angles are preserved by the similarity (as a set).
            let mut a0 = t.angles();
            let mut a1 = c.angles();
            a0.sort_by(f64::total_cmp);
            a1.sort_by(f64::total_cmp);
            for (x, y) in a0.iter().zip(a1.iter()) {
                prop_assert!((x - y).abs() < 1e-9, "angles changed: {:?} vs {:?}", a0, a1);
            }
        }

        /// Cap polygons always reflect into the closed triangle.
        #[test]
        fn reflection_caps_contained(
            cx in 0.0f64..0.5,
            cy in 0.2f64..2.5,
        ) {
            let t = Triangle::new(
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(cx, cy),
            );
            prop_assume!(t.is_ok());
            let t = t.unwrap();
            let (c, _) = canonicalize(&t).unwrap();
            let (s_axis, m_axis) = reflection_axes(&c);
            for axis in [&s_axis, &m_axis] {
                for &p in &axis.cap {
                    prop_assert!(c.contains(p, 1e-10));
                    prop_assert!(c.contains(axis.reflect(p), 1e-10),
                        "mirror of cap vertex {:?} exits the triangle", p);
                }
            }
        }
    }
}
