//! Run configuration, the per-triangle property battery, and report
//! serialization (JSON reports, JSON-lines traces, CSV plot data).
//!
//! Reports are deterministic: identical configuration and seed produce
//! byte-identical output (struct-ordered JSON fields, no timestamps, no
//! map iteration).

use serde::{Deserialize, Serialize};

use crate::assembly::DirichletSides;
use crate::eigensolve::{solve_modes, SolveError, DEFAULT_SEED};
use crate::geometry::{
    canonicalize, classify, monotone_direction, AngleClass, Point, Side, SymmetryClass, Triangle,
    TriangleClass,
};
use crate::inequalities::{estimate_eigenvalue, EigenEstimate};
use crate::spectral::{
    critical_point_census, directional_monotonicity, extrema_location, fold_asymmetry,
    nodal_chains, reflection_dominance, vertex_report, CensusParams, CensusReport,
    CriticalKind, DominanceReport, ExtremaReport, Field, FoldReport, Locus, MonotonicityReport,
    NodalReport, SignBand, VertexReport,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Everything that determines a run's output, echoed verbatim into every
/// report for provenance.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub command: String,
    /// Raw triangle spec as given on the command line (`"x,y;x,y;x,y"`).
    pub triangle: Option<String>,
    pub levels: (u32, u32),
    pub order: u32,
    /// Angle-simplex resolution for sweeps.
    pub grid: usize,
    /// Homotopy step count for traces.
    pub steps: usize,
    /// Boundary gradient threshold factor for the critical point census.
    pub grad_tol: f64,
    /// Monotonicity tolerance factor: the allowed dip of the directional
    /// derivative is `mono_tol * sup|grad u| * (diam/h)^2` — a fixed budget
    /// at the diameter reference scale that the h^2-order discretization
    /// error of the sampled gradient stays under while genuine violations
    /// (O(1) of the gradient scale) exceed it by orders of magnitude.
    pub mono_tol: f64,
    /// Relative sign band: vertex values within `vertex_tol * sup|u|` of
    /// zero count as zero.
    pub vertex_tol: f64,
    /// Refinement-level cap (solver resource cap).
    pub max_level: u32,
    pub jobs: usize,
    pub seed: u64,
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: String::new(),
            triangle: None,
            levels: (4, 6),
            order: 2,
            grid: 12,
            steps: 32,
            grad_tol: 1.0,
            mono_tol: 1e-6,
            vertex_tol: 1e-4,
            max_level: 9,
            jobs: 1,
            seed: DEFAULT_SEED,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.levels.0 > self.levels.1 {
            return Err(format!(
                "empty level range {}:{}",
                self.levels.0, self.levels.1
            ));
        }
        if self.levels.0 < 1 {
            return Err("levels must start at 1 or higher".into());
        }
        if self.levels.1 > self.max_level {
            return Err(format!(
                "level {} exceeds the cap {}",
                self.levels.1, self.max_level
            ));
        }
        if self.order != 1 && self.order != 2 {
            return Err(format!("order must be 1 or 2, got {}", self.order));
        }
        for (name, v) in [
            ("grad_tol", self.grad_tol),
            ("mono_tol", self.mono_tol),
            ("vertex_tol", self.vertex_tol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if self.grid < 2 {
            return Err(format!("grid must be at least 2, got {}", self.grid));
        }
        if self.steps < 1 {
            return Err(format!("steps must be at least 1, got {}", self.steps));
        }
        if self.jobs < 1 {
            return Err(format!("jobs must be at least 1, got {}", self.jobs));
        }
        Ok(())
    }

    /// Monotonicity threshold for a field solved at `level`.
    pub fn mono_threshold(&self, grad_sup: f64, level: u32) -> f64 {
        self.mono_tol * grad_sup * 4.0f64.powi(level as i32)
    }

    /// Value-comparison tolerance (dominance minima, sign bands on values)
    /// for a field solved at `level`, on the same fixed-budget scaling.
    pub fn value_threshold(&self, sup: f64, level: u32) -> f64 {
        self.mono_tol * sup * 4.0f64.powi(level as i32)
    }
}

/// Report envelope: schema version + full config + payload.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report<T> {
    pub schema_version: u32,
    pub config: RunConfig,
    pub body: T,
}

pub fn render_json<T: Serialize>(config: &RunConfig, body: &T) -> String {
    let report = Report {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        body,
    };
    let mut s = serde_json::to_string_pretty(&report).expect("reports are serializable");
    s.push('\n');
    s
}

/// 17-significant-digit decimal: round-trips every finite double.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

// ---------------------------------------------------------------------------
// Triangle spec parsing
// ---------------------------------------------------------------------------

/// Parse `"x1,y1;x2,y2;x3,y3"` into a triangle (validated non-degenerate).
pub fn parse_triangle(spec: &str) -> Result<Triangle, String> {
    let parts: Vec<&str> = spec.split(';').collect();
    if parts.len() != 3 {
        return Err(format!(
            "triangle spec needs three `x,y` pairs separated by `;`, got {} part(s) in {spec:?}",
            parts.len()
        ));
    }
    let mut pts = [Point::new(0.0, 0.0); 3];
    for (i, part) in parts.iter().enumerate() {
        let coords: Vec<&str> = part.split(',').collect();
        if coords.len() != 2 {
            return Err(format!("vertex {} is not an `x,y` pair: {part:?}", i + 1));
        }
        let x: f64 = coords[0]
            .trim()
            .parse()
            .map_err(|e| format!("vertex {} x-coordinate {:?}: {e}", i + 1, coords[0]))?;
        let y: f64 = coords[1]
            .trim()
            .parse()
            .map_err(|e| format!("vertex {} y-coordinate {:?}: {e}", i + 1, coords[1]))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(format!("vertex {} is not finite: {part:?}", i + 1));
        }
        pts[i] = Point::new(x, y);
    }
    Triangle::new(pts[0], pts[1], pts[2]).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// The per-triangle property battery
// ---------------------------------------------------------------------------

/// Full qualitative battery for one triangle: eigenvalue estimates with
/// error bars, and the mode-shape structures (vertex signs, critical
/// points, nodal line, monotonicity, reflection dominance, extrema, fold
/// defects) evaluated on a quadratic solve at the finest level, with the
/// census cross-checked one level coarser.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TriangleBattery {
    pub triangle_input: Triangle,
    /// Canonically placed similar copy all structures refer to.
    pub triangle: Triangle,
    pub class: TriangleClass,
    pub mu2: EigenEstimate,
    pub mu3: f64,
    pub gap: f64,
    pub relative_gap: f64,
    /// Element order of the qualitative battery (always 2; `config.order`
    /// governs the eigenvalue estimate).
    pub battery_order: u32,
    pub battery_level: u32,
    pub vertex: VertexReport,
    pub census: CensusReport,
    /// Census one level coarser, for stability.
    pub census_coarse: CensusReport,
    /// Same non-vertex critical point count and kinds at both levels.
    pub census_stable: bool,
    pub nodal: NodalReport,
    pub monotonicity: MonotonicityReport,
    pub monotonicity_direction: Point,
    pub dominance_s: DominanceReport,
    pub dominance_m: DominanceReport,
    pub dominance_tolerance: f64,
    pub extrema: ExtremaReport,
    /// Fold defects across the bisector at canonical `z1` (the vertex
    /// joining the two shortest sides): near-zero antisymmetric defect
    /// detects super-equilateral symmetry, near-zero symmetric defect
    /// sub-equilateral symmetry.
    pub fold: FoldReport,
    /// Property violations (contradictions of the expected qualitative
    /// structure), gated on the triangle's class where the structure is
    /// class-dependent. Empty means the battery is clean.
    pub anomalies: Vec<String>,
}

/// How far inside a class a triangle must sit (radians / relative side gap)
/// before class-dependent predictions are enforced as anomalies.
const CLASS_GATE: f64 = 0.02;

pub fn run_battery(input: &Triangle, config: &RunConfig) -> Result<TriangleBattery, SolveError> {
    run_battery_full(input, config, false).map(|(b, _)| b)
}

/// Battery plus (optionally) the CSV plot files rendered from the same
/// finest-level solve, so `solve` does not pay for a second one.
pub fn run_battery_full(
    input: &Triangle,
    config: &RunConfig,
    with_csvs: bool,
) -> Result<(TriangleBattery, Option<(String, String)>), SolveError> {
    let (tri, _) = canonicalize(input)?;
    let class = classify(&tri);
    let level = config.levels.1;

    let mu2 = estimate_eigenvalue(&tri, DirichletSides::NEUMANN, config.levels, config.order, config.seed)?;

    let (mesh, modes) = solve_modes(&tri, level, 2, DirichletSides::NEUMANN, 2, config.seed)?;
    let mu3 = modes[1].eigenvalue;
    let mu2_fine = modes[0].eigenvalue;
    let gap = mu3 - mu2_fine;
    let relative_gap = gap / mu2_fine;
    let (field, _) = Field::oriented(&mesh, modes[0].values.clone(), config.vertex_tol);

    let census_params = CensusParams {
        boundary_grad_rel_tol: config.grad_tol,
        ..CensusParams::default()
    };
    let census = critical_point_census(&field, &census_params);
    let (mesh_c, modes_c) = solve_modes(&tri, level - 1, 2, DirichletSides::NEUMANN, 1, config.seed)?;
    let (field_c, _) = Field::oriented(&mesh_c, modes_c[0].values.clone(), config.vertex_tol);
    let census_coarse = critical_point_census(&field_c, &census_params);
    let census_stable = census.points.len() == census_coarse.points.len()
        && census
            .points
            .iter()
            .zip(&census_coarse.points)
            .all(|(a, b)| a.kind == b.kind);

    let vertex = vertex_report(&field, config.vertex_tol);
    let nodal = nodal_chains(&field);
    let extrema = extrema_location(&field);
    let fold = fold_asymmetry(&field, 0, 32);

    // Monotone direction: away from the shortest side (canonical: +y) for
    // acute triangles, along the longest side for right/obtuse ones.
    let dir = monotone_direction(&tri, class.angle_class);
    let mono_threshold = config.mono_threshold(field.gradient_sup(), level);
    let monotonicity = directional_monotonicity(&field, dir, mono_threshold);

    let (axis_s, axis_m) = crate::geometry::reflection_axes(&tri);
    let dominance_s = reflection_dominance(&field, &axis_s, 32);
    let dominance_m = reflection_dominance(&field, &axis_m, 32);
    let dominance_tolerance = config.value_threshold(field.sup_norm(), level);

    let anomalies = collect_anomalies(
        &class,
        relative_gap,
        &vertex,
        &census,
        &nodal,
        &monotonicity,
        &dominance_s,
        &dominance_m,
        dominance_tolerance,
        &extrema,
    );

    let csvs = with_csvs.then(|| (nodal_csv(&nodal), gradient_csv(&field)));

    Ok((
        TriangleBattery {
            triangle_input: *input,
            triangle: tri,
            class,
            mu2,
            mu3,
            gap,
            relative_gap,
            battery_order: 2,
            battery_level: level,
            vertex,
            census,
            census_coarse,
            census_stable,
            nodal,
            monotonicity,
            monotonicity_direction: dir,
            dominance_s,
            dominance_m,
            dominance_tolerance,
            extrema,
            fold,
            anomalies,
        },
        csvs,
    ))
}

#[allow(clippy::too_many_arguments)]
fn collect_anomalies(
    class: &TriangleClass,
    relative_gap: f64,
    vertex: &VertexReport,
    census: &CensusReport,
    nodal: &NodalReport,
    monotonicity: &MonotonicityReport,
    dominance_s: &DominanceReport,
    dominance_m: &DominanceReport,
    dominance_tolerance: f64,
    extrema: &ExtremaReport,
) -> Vec<String> {
    let mut anomalies = Vec::new();
    if relative_gap <= 1e-3 {
        // Numerically multiple eigenvalue: the mode shape is not
        // well-defined, so shape predictions are not enforceable.
        return anomalies;
    }
    if extrema.interior_extremum {
        anomalies.push(format!(
            "interior extremum at ({}, {})",
            if extrema.max_locus == Locus::Interior {
                extrema.max_location.x
            } else {
                extrema.min_location.x
            },
            if extrema.max_locus == Locus::Interior {
                extrema.max_location.y
            } else {
                extrema.min_location.y
            },
        ));
    }
    if nodal.component_anomaly {
        anomalies.push(format!(
            "nodal set has {} substantive components (expected one)",
            nodal.substantive_chains
        ));
    }
    if census.degenerate_count > 0 {
        anomalies.push(format!(
            "{} degenerate critical point(s)",
            census.degenerate_count
        ));
    }

    let gated = class.boundary_distance > CLASS_GATE;
    if gated {
        // Class-dependent census count: one shortest-side saddle for acute
        // non-super-equilateral, none for right/obtuse/super-equilateral.
        let expect_saddle = class.angle_class == AngleClass::Acute
            && class.symmetry_class != SymmetryClass::SuperEquilateral
            && class.symmetry_class != SymmetryClass::Equilateral;
        if expect_saddle {
            let ok = census.points.len() == 1
                && census.points[0].kind == CriticalKind::Saddle
                && census.points[0].on_side == Some(Side::Short);
            if !ok {
                anomalies.push(format!(
                    "acute census: expected one saddle on the shortest side, found {} point(s)",
                    census.points.len()
                ));
            }
        } else if class.symmetry_class != SymmetryClass::Equilateral
            && !census.points.is_empty()
        {
            anomalies.push(format!(
                "census: expected no non-vertex critical points, found {}",
                census.points.len()
            ));
        }

        if class.symmetry_class != SymmetryClass::Equilateral {
            // Extrema at the endpoints of the longest side (z2 min, z3 max).
            if extrema.max_locus != Locus::Vertex(2) || extrema.min_locus != Locus::Vertex(1) {
                anomalies.push(format!(
                    "extrema not at the longest side's endpoints (max {:?}, min {:?})",
                    extrema.max_locus, extrema.min_locus
                ));
            }
            if !vertex.ordering_holds {
                anomalies.push(format!(
                    "vertex ordering u(z3) >= u(z1) >= u(z2) violated: {:?}",
                    vertex.values
                ));
            }
            if vertex.signs[2] != SignBand::Positive || vertex.signs[1] != SignBand::Negative {
                anomalies.push(format!("vertex sign pattern violated: {:?}", vertex.signs));
            }
            if !monotonicity.violations.is_empty() {
                anomalies.push(format!(
                    "{} monotonicity violation(s) perpendicular to the shortest side, min {:e}",
                    monotonicity.violations.len(),
                    monotonicity.min
                ));
            }
            for (name, d) in [("S", dominance_s), ("M", dominance_m)] {
                if d.worst_margin < -dominance_tolerance {
                    anomalies.push(format!(
                        "reflection dominance across the {name}-axis violated: worst margin {:e}",
                        d.worst_margin
                    ));
                }
                if d.outside_anomalies > 0 {
                    anomalies.push(format!(
                        "{} dominance mirror point(s) landed outside the triangle ({name}-axis)",
                        d.outside_anomalies
                    ));
                }
            }
        }
    }
    anomalies
}

// ---------------------------------------------------------------------------
// CSV plot data
// ---------------------------------------------------------------------------

/// Nodal-line polylines: `chain,point,x,y`.
pub fn nodal_csv(nodal: &NodalReport) -> String {
    let mut out = String::from("chain,point,x,y\n");
    for (ci, chain) in nodal.chains.iter().enumerate() {
        for (pi, p) in chain.points.iter().enumerate() {
            out.push_str(&format!(
                "{ci},{pi},{},{}\n",
                csv_float(p.x),
                csv_float(p.y)
            ));
        }
    }
    out
}

/// One quadratic solve at the battery level producing both plot files:
/// the nodal-line polylines and the centroid gradient field.
pub fn solve_csvs(input: &Triangle, config: &RunConfig) -> Result<(String, String), SolveError> {
    let (tri, _) = canonicalize(input)?;
    let (mesh, modes) = solve_modes(
        &tri,
        config.levels.1,
        2,
        DirichletSides::NEUMANN,
        1,
        config.seed,
    )?;
    let (field, _) = Field::oriented(&mesh, modes[0].values.clone(), config.vertex_tol);
    let nodal = nodal_chains(&field);
    Ok((nodal_csv(&nodal), gradient_csv(&field)))
}

/// Gradient field at element centroids: `x,y,u,gx,gy`.
pub fn gradient_csv(field: &Field) -> String {
    let mesh = field.mesh;
    let mut out = String::from("x,y,u,gx,gy\n");
    let third = [1.0 / 3.0; 3];
    for e in 0..mesh.elements.len() {
        let c = mesh.element_corners(e);
        let x = (c[0].x + c[1].x + c[2].x) / 3.0;
        let y = (c[0].y + c[1].y + c[2].y) / 3.0;
        let u = field
            .eval(Point::new(x, y))
            .unwrap_or(f64::NAN);
        let g = field.gradient_in(e, third);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_float(x),
            csv_float(y),
            csv_float(u),
            csv_float(g.x),
            csv_float(g.y)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_spec_round_trip_and_errors() {
        let t = parse_triangle("0,0;1,0;0,1.7320508").unwrap();
        assert_eq!(t.z3.y, 1.7320508);
        assert!(parse_triangle("0,0;1,0").is_err());
        assert!(parse_triangle("0,0;1,0;bad,1").is_err());
        assert!(parse_triangle("0,0;1,0;2,0").is_err()); // collinear
        assert!(parse_triangle("0,0;1,0;0,inf").is_err());
    }

    #[test]
    fn config_validation_rejects_bad_inputs() {
        let ok = RunConfig::default();
        assert!(ok.validate().is_ok());
        let bad_levels = RunConfig {
            levels: (5, 4),
            ..RunConfig::default()
        };
        assert!(bad_levels.validate().is_err());
        let over_cap = RunConfig {
            levels: (4, 10),
            ..RunConfig::default()
        };
        assert!(over_cap.validate().is_err());
        let bad_order = RunConfig {
            order: 3,
            ..RunConfig::default()
        };
        assert!(bad_order.validate().is_err());
        let bad_tol = RunConfig {
            mono_tol: 0.0,
            ..RunConfig::default()
        };
        assert!(bad_tol.validate().is_err());
    }

    #[test]
    fn config_serialization_round_trips() {
        let cfg = RunConfig {
            command: "solve".into(),
            triangle: Some("0,0;1,0;0.3,0.9".into()),
            seed: 0xDEADBEEF,
            ..RunConfig::default()
        };
        let s = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn csv_floats_round_trip_doubles() {
        for &x in &[
            std::f64::consts::PI,
            -1.0 / 3.0,
            6.02e23,
            5e-324,
            -0.1,
            1.0,
        ] {
            let s = csv_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(x, back, "{s}");
        }
    }

    #[test]
    fn battery_is_clean_on_an_acute_scalene_triangle() {
        let t = parse_triangle("0,0;1,0;0.45,1.1").unwrap();
        let cfg = RunConfig {
            levels: (4, 5),
            ..RunConfig::default()
        };
        let b = run_battery(&t, &cfg).unwrap();
        assert!(b.anomalies.is_empty(), "{:?}", b.anomalies);
        assert_eq!(b.census.points.len(), 1);
        assert!(b.census_stable);
        assert!(b.relative_gap > 0.0);
        assert!(b.fold.sup_antisym_rel > 0.1);
        assert!(b.monotonicity.violations.is_empty());
        // Deterministic rendering.
        let r1 = render_json(&cfg, &b);
        let b2 = run_battery(&t, &cfg).unwrap();
        assert_eq!(r1, render_json(&cfg, &b2));
    }

    #[test]
    fn battery_super_equilateral_has_zero_apex_and_antisymmetry() {
        let t = parse_triangle("0,0;1,0;0,1").unwrap();
        let cfg = RunConfig {
            levels: (4, 5),
            ..RunConfig::default()
        };
        let b = run_battery(&t, &cfg).unwrap();
        assert!(b.anomalies.is_empty(), "{:?}", b.anomalies);
        assert_eq!(b.census.points.len(), 0);
        assert_eq!(b.vertex.signs[0], SignBand::Zero);
        assert!(b.fold.sup_antisym_rel < 5e-3, "{}", b.fold.sup_antisym_rel);
    }

    #[test]
    fn battery_flags_a_planted_interior_extremum() {
        // Solve a clean obtuse triangle, then corrupt the field with an
        // interior bump; the battery's anomaly logic sees the planted max.
        let t = parse_triangle("0,0;1,0;0.2,0.25").unwrap();
        let cfg = RunConfig {
            levels: (3, 4),
            ..RunConfig::default()
        };
        let (tri, _) = canonicalize(&t).unwrap();
        let (mesh, modes) =
            solve_modes(&tri, 4, 2, DirichletSides::NEUMANN, 2, cfg.seed).unwrap();
        let (field, _) = Field::oriented(&mesh, modes[0].values.clone(), cfg.vertex_tol);
        let planted = plant_interior_max(&field);
        let field2 = Field::new(&mesh, planted);
        let extrema = extrema_location(&field2);
        assert!(extrema.interior_extremum);
        let anomalies = collect_anomalies(
            &classify(&tri),
            1.0,
            &vertex_report(&field2, cfg.vertex_tol),
            &critical_point_census(&field2, &CensusParams::default()),
            &nodal_chains(&field2),
            &directional_monotonicity(&field2, Point::new(0.0, 1.0), 1e-3),
            &reflection_dominance(&field2, &crate::geometry::reflection_axes(&tri).0, 8),
            &reflection_dominance(&field2, &crate::geometry::reflection_axes(&tri).1, 8),
            1e-3,
            &extrema,
        );
        assert!(
            anomalies.iter().any(|a| a.contains("interior extremum")),
            "{anomalies:?}"
        );
    }

    #[test]
    fn csv_writers_emit_headers_and_rows() {
        let t = parse_triangle("0,0;1,0;0.45,1.1").unwrap();
        let (tri, _) = canonicalize(&t).unwrap();
        let (mesh, modes) =
            solve_modes(&tri, 3, 2, DirichletSides::NEUMANN, 1, DEFAULT_SEED).unwrap();
        let (field, _) = Field::oriented(&mesh, modes[0].values.clone(), 1e-4);
        let nodal = nodal_chains(&field);
        let ncsv = nodal_csv(&nodal);
        assert!(ncsv.starts_with("chain,point,x,y\n"));
        assert!(ncsv.lines().count() > 2);
        let gcsv = gradient_csv(&field);
        assert!(gcsv.starts_with("x,y,u,gx,gy\n"));
        assert_eq!(gcsv.lines().count(), 1 + mesh.elements.len());
    }
}

/// Failure-path test hook: re-solve a triangle, corrupt the mode with a
/// planted interior bump, and return the anomalies the battery's checks
/// raise against the corrupted field.
pub fn planted_interior_max_anomalies(
    input: &Triangle,
    config: &RunConfig,
) -> Result<Vec<String>, SolveError> {
    let (tri, _) = canonicalize(input)?;
    let class = classify(&tri);
    let level = config.levels.1;
    let (mesh, modes) = solve_modes(&tri, level, 2, DirichletSides::NEUMANN, 2, config.seed)?;
    let relative_gap = (modes[1].eigenvalue - modes[0].eigenvalue) / modes[0].eigenvalue;
    let (clean, _) = Field::oriented(&mesh, modes[0].values.clone(), config.vertex_tol);
    let field = Field::new(&mesh, plant_interior_max(&clean));
    let census_params = CensusParams {
        boundary_grad_rel_tol: config.grad_tol,
        ..CensusParams::default()
    };
    let dir = monotone_direction(&tri, class.angle_class);
    let (axis_s, axis_m) = crate::geometry::reflection_axes(&tri);
    Ok(collect_anomalies(
        &class,
        relative_gap,
        &vertex_report(&field, config.vertex_tol),
        &critical_point_census(&field, &census_params),
        &nodal_chains(&field),
        &directional_monotonicity(&field, dir, config.mono_threshold(field.gradient_sup(), level)),
        &reflection_dominance(&field, &axis_s, 32),
        &reflection_dominance(&field, &axis_m, 32),
        config.value_threshold(field.sup_norm(), level),
        &extrema_location(&field),
    ))
}

/// Synthetic interior-extremum injection for failure-path testing: adds a
/// smooth bump (height twice the field's sup) centered at the centroid.
pub fn plant_interior_max(field: &Field) -> Vec<f64> {
    let mesh = field.mesh;
    let c = mesh.triangle.centroid();
    let r = 0.2 * mesh.triangle.diameter();
    let amp = 2.0 * field.sup_norm().max(1.0);
    field
        .values
        .iter()
        .zip(&mesh.nodes)
        .map(|(v, p)| {
            let d2 = p.dist(c).powi(2) / (r * r);
            v + if d2 < 1.0 {
                amp * (1.0 - d2).powi(2)
            } else {
                0.0
            }
        })
        .collect()
}
