//! Homotopy traces of the second Neumann eigenfunction.
//!
//! A trace interpolates linearly between two triangles and solves at each
//! step, recording the qualitative properties whose persistence the
//! continuity method relies on: the simplicity gap, vertex signs, the
//! monotonicity margin perpendicular to the shortest side, the critical
//! point census and locus, and the reflection-dominance minima.
//!
//! Signs are carried along the path by maximizing the mass-matrix inner
//! product with the previous step's coefficients (meshes at a fixed level
//! share connectivity, so coefficient vectors correspond node-by-node).
//! Because side-length orderings can change along a path, vertex data is
//! reported twice: in path labels (the vertices as interpolated, signs of
//! the sign-carried branch) and in canonical labels (vertices relabeled by
//! side lengths, orientation fixed by a positive value at the vertex
//! joining the two longest sides). The canonical pattern is the one the
//! theory constrains; the path-label pattern can legitimately flip when the
//! path crosses an isosceles configuration with two equal shortest sides,
//! and such crossings surface as margin flags with bisection-refined
//! locations.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::assembly::{assemble, DirichletSides};
use crate::eigensolve::{solve_modes, SolveError, DEFAULT_SEED};
use crate::geometry::{
    classify, monotone_direction, reflection_axis, GeometryError, Point, Side, SymmetryClass,
    Triangle,
};
use crate::linalg::BandMatrix;
use crate::meshing::{uniform_mesh, Mesh};
use crate::spectral::{
    critical_point_census, directional_monotonicity, reflection_dominance, vertex_report,
    CensusParams, Field, SignBand,
};

// ---------------------------------------------------------------------------
// Closed-form seeds
// ---------------------------------------------------------------------------

/// The two triangles whose second Neumann eigenfunction is known in closed
/// form, used to validate the solver before a trace starts from them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedKind {
    /// Right triangle with legs 1 and sqrt(3) (half of a side-2 equilateral).
    HalfEquilateral,
    /// Right isosceles triangle with unit legs.
    IsoscelesRight,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Seed {
    pub kind: SeedKind,
    pub triangle: Triangle,
    pub eigenvalue: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum ContinuationError {
    #[error("unknown seed name {0:?} (expected half_equilateral or isosceles_right)")]
    UnknownSeed(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Closed-form second-Neumann-eigenpair seed by name.
///
/// * `half_equilateral`: legs 1 and sqrt(3), eigenvalue `4 pi^2 / 9`,
///   eigenfunction `(16/27)^(1/4) (cos(2 pi x / 3) - 2 cos(pi y / sqrt 3) cos(pi x / 3))`.
/// * `isosceles_right`: unit legs, eigenvalue `pi^2`, eigenfunction
///   `sqrt(2) (cos(pi x) - cos(pi y))`.
///
/// Both eigenfunctions have unit L2 norm over their triangle.
pub fn seed_field(name: &str) -> Result<Seed, ContinuationError> {
    match name {
        "half_equilateral" => Ok(Seed {
            kind: SeedKind::HalfEquilateral,
            triangle: Triangle::new(
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(0.0, 3.0f64.sqrt()),
            )?,
            eigenvalue: 4.0 * PI * PI / 9.0,
        }),
        "isosceles_right" => Ok(Seed {
            kind: SeedKind::IsoscelesRight,
            triangle: Triangle::new(
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(0.0, 1.0),
            )?,
            eigenvalue: PI * PI,
        }),
        other => Err(ContinuationError::UnknownSeed(other.to_string())),
    }
}

impl Seed {
    /// Closed-form eigenfunction value at a point.
    pub fn eval(&self, p: Point) -> f64 {
        match self.kind {
            SeedKind::HalfEquilateral => {
                let k = (16.0 / 27.0f64).powf(0.25);
                k * ((2.0 * PI * p.x / 3.0).cos()
                    - 2.0 * (PI * p.y / 3.0f64.sqrt()).cos() * (PI * p.x / 3.0).cos())
            }
            SeedKind::IsoscelesRight => {
                2.0f64.sqrt() * ((PI * p.x).cos() - (PI * p.y).cos())
            }
        }
    }

    /// Nodal interpolation of the closed form on a mesh of the seed triangle.
    pub fn nodal_values(&self, mesh: &Mesh) -> Vec<f64> {
        mesh.nodes.iter().map(|&p| self.eval(p)).collect()
    }
}

/// Residual of a closed-form seed against the assembled discrete operator,
/// per refinement level.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeedConsistency {
    pub levels: Vec<u32>,
    /// `|| K v - lambda M v ||_{M^{-1}} / || v ||_M` with `v` the nodal
    /// interpolant, mean-corrected in the M inner product.
    pub residual_norms: Vec<f64>,
    /// Discrete Rayleigh quotients of the interpolant per level.
    pub rayleigh: Vec<f64>,
    /// M-norm distance between the solved discrete mode and the closed-form
    /// interpolant (both unit M-norm, signs aligned). Decays one order
    /// faster than the operator residual: `h^2` for linear elements, `h^3`
    /// for quadratic.
    pub mode_errors: Vec<f64>,
    /// log2 ratios of successive residual norms.
    pub residual_orders: Vec<f64>,
    /// log2 ratios of successive mode errors.
    pub mode_orders: Vec<f64>,
    pub order: u32,
}

pub fn seed_consistency(
    seed: &Seed,
    levels: (u32, u32),
    order: u32,
) -> Result<SeedConsistency, SolveError> {
    let mut lv = Vec::new();
    let mut norms = Vec::new();
    let mut rayleigh = Vec::new();
    let mut mode_errors = Vec::new();
    for level in levels.0..=levels.1 {
        let mesh = uniform_mesh(&seed.triangle, level, order)?;
        let sys = assemble(&mesh, DirichletSides::NEUMANN)?;
        let n = sys.dofs();
        let mut v = seed.nodal_values(&mesh);
        // M-orthogonalize against constants (the continuous eigenfunction
        // is mean-free; its interpolant only up to interpolation error).
        let ones = vec![1.0; n];
        let mut mv = vec![0.0; n];
        sys.mass.matvec(&v, &mut mv);
        let mut m1 = vec![0.0; n];
        sys.mass.matvec(&ones, &mut m1);
        let mean: f64 = ones.iter().zip(&mv).map(|(a, b)| a * b).sum::<f64>()
            / ones.iter().zip(&m1).map(|(a, b)| a * b).sum::<f64>();
        for x in v.iter_mut() {
            *x -= mean;
        }
        sys.mass.matvec(&v, &mut mv);
        let mut kv = vec![0.0; n];
        sys.stiffness.matvec(&v, &mut kv);
        let vmv: f64 = v.iter().zip(&mv).map(|(a, b)| a * b).sum();
        let vkv: f64 = v.iter().zip(&kv).map(|(a, b)| a * b).sum();
        rayleigh.push(vkv / vmv);
        let r: Vec<f64> = kv
            .iter()
            .zip(&mv)
            .map(|(k, m)| k - seed.eigenvalue * m)
            .collect();
        // || r ||_{M^{-1}} via a mass-matrix Cholesky solve.
        let mut band = BandMatrix::from_shifted(&sys.mass, &sys.mass, 0.0)?;
        band.cholesky()?;
        let w = band.solve(&r);
        let rr: f64 = r.iter().zip(&w).map(|(a, b)| a * b).sum();
        norms.push(rr.max(0.0).sqrt() / vmv.sqrt());

        // Distance of the solved mode from the (normalized) interpolant.
        let (_, modes) = solve_modes(
            &seed.triangle,
            level,
            order,
            DirichletSides::NEUMANN,
            1,
            DEFAULT_SEED,
        )?;
        let scale = vmv.sqrt();
        let vn: Vec<f64> = v.iter().map(|x| x / scale).collect();
        let mut u = modes[0].values.clone();
        let mut mu = vec![0.0; n];
        sys.mass.matvec(&u, &mut mu);
        let umu: f64 = u.iter().zip(&mu).map(|(a, b)| a * b).sum();
        let uscale = umu.sqrt();
        for x in u.iter_mut() {
            *x /= uscale;
        }
        let uv: f64 = u
            .iter()
            .zip(&mv)
            .map(|(a, b)| a * b / scale)
            .sum();
        if uv < 0.0 {
            for x in u.iter_mut() {
                *x = -*x;
            }
        }
        let e: Vec<f64> = u.iter().zip(&vn).map(|(a, b)| a - b).collect();
        let mut me = vec![0.0; n];
        sys.mass.matvec(&e, &mut me);
        let emem: f64 = e.iter().zip(&me).map(|(a, b)| a * b).sum();
        mode_errors.push(emem.max(0.0).sqrt());
        lv.push(level);
    }
    let log_ratios =
        |xs: &[f64]| xs.windows(2).map(|w| (w[0] / w[1]).log2()).collect::<Vec<_>>();
    let residual_orders = log_ratios(&norms);
    let mode_orders = log_ratios(&mode_errors);
    Ok(SeedConsistency {
        levels: lv,
        residual_norms: norms,
        rayleigh,
        mode_errors,
        residual_orders,
        mode_orders,
        order,
    })
}

// ---------------------------------------------------------------------------
// Trace configuration and reports
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceConfig {
    /// Number of intervals; the trace reports `steps + 1` configurations.
    pub steps: usize,
    pub level: u32,
    pub order: u32,
    pub seed: u64,
    /// Bisection stops when the flagged bracket is this narrow in `t`.
    pub refine_resolution: f64,
    /// The simplicity margin is `(mu3 - mu2)/mu2 - gap_rel_floor`.
    pub gap_rel_floor: f64,
    /// Vertex values within `sign_rel_tol * sup|u|` of zero count as zero.
    pub sign_rel_tol: f64,
    /// Monotonicity threshold factor: the allowed dip below zero is
    /// `mono_tol_factor * sup|grad u| * h / diam`.
    pub mono_tol_factor: f64,
    /// Value-comparison tolerance factor for reflection dominance, in units
    /// of `sup|u| (h/diam)^2`.
    pub value_tol_factor: f64,
    pub census: CensusParams,
    /// Sample density per cap for reflection dominance.
    pub dominance_samples: usize,
    /// Locus-jump anomaly threshold: Hausdorff distance between consecutive
    /// critical-point sets above `locus_jump_factor * dt * diam + 4 h`.
    pub locus_jump_factor: f64,
    /// Solve all steps first (in parallel when the process runs inside a
    /// rayon pool), then align signs in a post-pass. Output is identical to
    /// the sequential mode.
    pub parallel: bool,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            steps: 32,
            level: 5,
            order: 2,
            seed: DEFAULT_SEED,
            refine_resolution: 1e-3,
            gap_rel_floor: 1e-3,
            sign_rel_tol: 1e-4,
            mono_tol_factor: 1.0,
            value_tol_factor: 1.0,
            census: CensusParams::default(),
            dominance_samples: 24,
            locus_jump_factor: 10.0,
            parallel: false,
        }
    }
}

/// Full property battery of one trace step.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StepProperties {
    pub mu2: f64,
    pub mu3: f64,
    pub gap: f64,
    pub relative_gap: f64,
    /// The relative gap sits at or below the floor: the mode is numerically
    /// degenerate, so mode-shape anomalies are not recorded for this step
    /// (the gap-floor margin flag already reports the multiplicity).
    pub degenerate_mode: bool,
    pub sup_norm: f64,
    /// Values at the path vertices `[z1, z2, z3]` of the sign-carried branch.
    pub vertex_values: [f64; 3],
    pub vertex_signs: [SignBand; 3],
    /// Signs at the canonical vertices `[z1, z2, z3]` (relabeled by side
    /// lengths) of the canonically oriented eigenfunction.
    pub canonical_vertex_signs: [SignBand; 3],
    /// `u(z3) >= u(z1) >= u(z2)` in canonical labels and orientation.
    pub canonical_ordering_holds: bool,
    pub symmetry_class: SymmetryClass,
    /// Whether the sign-carried branch currently disagrees with the
    /// canonical orientation.
    pub orientation_flipped: bool,
    /// `threshold + min directional derivative` for the expected monotone
    /// direction — perpendicular to the shortest side when all angles are
    /// acute, parallel to the longest side otherwise (positive = monotone
    /// within tolerance).
    pub monotonicity_margin: f64,
    pub monotonicity_direction: Point,
    pub monotonicity_violations: usize,
    pub critical_count: usize,
    pub critical_points: Vec<Point>,
    pub saddle_count: usize,
    /// `worst dominance defect + value tolerance` for the axes through the
    /// shortest and the middle side (positive = dominance holds within
    /// tolerance).
    pub dominance_margin_s: f64,
    pub dominance_margin_m: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContinuationStep {
    pub index: usize,
    pub t: f64,
    pub triangle: Triangle,
    /// Set when the solver failed at this step; `properties` is then absent
    /// and the trace continues.
    pub failed: Option<String>,
    pub properties: Option<StepProperties>,
    pub anomalies: Vec<String>,
}

/// A tracked margin changed sign between two consecutive steps; the bracket
/// is bisection-refined to `refine_resolution` in `t`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarginFlag {
    pub property: String,
    /// Index of the step at the right end of the original bracket.
    pub step_index: usize,
    pub t_before: f64,
    pub t_after: f64,
    pub margin_before: f64,
    pub margin_after: f64,
    pub bisection_solves: usize,
    /// A bisection solve failed; the bracket is as narrow as it got.
    pub bisection_failed: bool,
}

/// The critical-point count changed between two consecutive steps (for
/// example, a saddle emerging from a right-angle vertex as the path enters
/// the acute class). Refined like a margin flag, but kept separate: count
/// changes across class boundaries are predicted behavior, not anomalies.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusEvent {
    pub step_index: usize,
    pub count_before: usize,
    pub count_after: usize,
    pub t_before: f64,
    pub t_after: f64,
    pub bisection_solves: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceReport {
    pub from: Triangle,
    pub to: Triangle,
    pub config: TraceConfig,
    pub steps: Vec<ContinuationStep>,
    pub flags: Vec<MarginFlag>,
    pub census_events: Vec<CensusEvent>,
    pub failed_steps: usize,
}

// ---------------------------------------------------------------------------
// Per-step battery
// ---------------------------------------------------------------------------

fn lerp_triangle(a: &Triangle, b: &Triangle, t: f64) -> Result<Triangle, GeometryError> {
    // Exact at the endpoints and exactly constant when a == b, so a
    // degenerate homotopy reports bit-identical steps.
    let mix = |p: Point, q: Point| {
        if t == 0.0 {
            p
        } else if t == 1.0 {
            q
        } else {
            Point::new(p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t)
        }
    };
    Triangle::new(mix(a.z1, b.z1), mix(a.z2, b.z2), mix(a.z3, b.z3))
}

/// Positional side indices ordered by true length: (shortest, middle,
/// longest). Stable under ties.
fn side_order(t: &Triangle) -> (usize, usize, usize) {
    let mut idx = [0usize, 1, 2];
    let len = [
        t.side_length(Side::Short),
        t.side_length(Side::Long),
        t.side_length(Side::Medium),
    ];
    idx.sort_by(|&a, &b| len[a].partial_cmp(&len[b]).unwrap().then(a.cmp(&b)));
    (idx[0], idx[1], idx[2])
}

/// The vertex shared by positional sides `a` and `b` (side `k` joins
/// vertices `k` and `k+1`).
fn common_vertex(a: usize, b: usize) -> usize {
    for v in [a, (a + 1) % 3] {
        if v == b || v == (b + 1) % 3 {
            return v;
        }
    }
    unreachable!("two distinct triangle sides always share one vertex")
}

struct BatteryOutput {
    props: StepProperties,
    /// Sign-carried coefficients (aligned with `align_with` when given).
    values: Vec<f64>,
    anomalies: Vec<String>,
}

fn step_battery(
    tri: &Triangle,
    align_with: Option<&[f64]>,
    cfg: &TraceConfig,
) -> Result<BatteryOutput, SolveError> {
    let (mesh, modes) = solve_modes(tri, cfg.level, cfg.order, DirichletSides::NEUMANN, 2, cfg.seed)?;
    let mu2 = modes[0].eigenvalue;
    let mu3 = modes[1].eigenvalue;
    let mut values = modes[0].values.clone();

    // Sign continuity: maximize the mass inner product with the previous
    // coefficients (same connectivity at a fixed level/order).
    match align_with {
        Some(prev) if prev.len() == values.len() => {
            let sys = assemble(&mesh, DirichletSides::NEUMANN)?;
            let mut mp = vec![0.0; prev.len()];
            sys.mass.matvec(prev, &mut mp);
            let ip: f64 = values.iter().zip(&mp).map(|(a, b)| a * b).sum();
            if ip < 0.0 {
                for x in values.iter_mut() {
                    *x = -*x;
                }
            }
        }
        _ => {
            let (field, _) = Field::oriented(&mesh, values, cfg.sign_rel_tol);
            values = field.values;
        }
    }

    let field = Field::new(&mesh, values.clone());
    let sup = field.sup_norm();
    let vrep = vertex_report(&field, cfg.sign_rel_tol);

    // Canonical relabeling by true side lengths.
    let (ks, km, kl) = side_order(tri);
    let i1c = common_vertex(ks, km);
    let i2c = common_vertex(ks, kl);
    let i3c = common_vertex(km, kl);
    let v3c = field.value_at_vertex(i3c);
    let flip = v3c < 0.0;
    let hat_values: Vec<f64> = if flip {
        values.iter().map(|x| -x).collect()
    } else {
        values.clone()
    };
    let hat = Field::new(&mesh, hat_values);
    let tol = cfg.sign_rel_tol * sup;
    let band = |v: f64| {
        if v > tol {
            SignBand::Positive
        } else if v < -tol {
            SignBand::Negative
        } else {
            SignBand::Zero
        }
    };
    let h1 = hat.value_at_vertex(i1c);
    let h2 = hat.value_at_vertex(i2c);
    let h3 = hat.value_at_vertex(i3c);
    let canonical_vertex_signs = [band(h1), band(h2), band(h3)];
    let canonical_ordering_holds = h3 >= h1 - tol && h1 >= h2 - tol;

    // Monotonicity on the canonically oriented branch, along the
    // class-dependent direction (away from the shortest side when acute,
    // along the longest side otherwise).
    let class = classify(tri);
    let dir = monotone_direction(tri, class.angle_class);
    let mono_threshold = cfg.mono_tol_factor * hat.gradient_sup() * hat.h() / tri.diameter();
    let mono = directional_monotonicity(&hat, dir, mono_threshold);

    // Census (sign-independent up to max/min swap; run on the canonical
    // branch so the classification matches the theory's orientation).
    let census = critical_point_census(&hat, &cfg.census);

    // Reflection dominance across the perpendicular bisectors of the true
    // shortest and middle sides, caps toward the vertex shared with the
    // longest / shortest side respectively.
    let axis_s = reflection_axis(tri, Side::from_index(ks), tri.vertex(common_vertex(ks, kl)));
    let axis_m = reflection_axis(tri, Side::from_index(km), tri.vertex(common_vertex(km, ks)));
    let dom_s = reflection_dominance(&hat, &axis_s, cfg.dominance_samples);
    let dom_m = reflection_dominance(&hat, &axis_m, cfg.dominance_samples);
    let value_tol = hat.qual_scale(cfg.value_tol_factor);

    let relative_gap = (mu3 - mu2) / mu2;
    let degenerate_mode = relative_gap <= cfg.gap_rel_floor;
    let mut anomalies = Vec::new();
    if dom_s.outside_anomalies > 0 || dom_m.outside_anomalies > 0 {
        anomalies.push(format!(
            "dominance mirror outside triangle: S {}, M {}",
            dom_s.outside_anomalies, dom_m.outside_anomalies
        ));
    }
    if !degenerate_mode {
        if census.degenerate_count > 0 {
            anomalies.push(format!(
                "degenerate critical points: {}",
                census.degenerate_count
            ));
        }
        if !canonical_ordering_holds {
            anomalies.push("canonical vertex ordering violated".to_string());
        }
    }

    let props = StepProperties {
        mu2,
        mu3,
        gap: mu3 - mu2,
        relative_gap,
        degenerate_mode,
        sup_norm: sup,
        vertex_values: vrep.values,
        vertex_signs: vrep.signs,
        canonical_vertex_signs,
        canonical_ordering_holds,
        symmetry_class: class.symmetry_class,
        orientation_flipped: flip,
        monotonicity_margin: mono_threshold + mono.min,
        monotonicity_direction: dir,
        monotonicity_violations: mono.violations.len(),
        critical_count: census.points.len(),
        critical_points: census.points.iter().map(|p| p.location).collect(),
        saddle_count: census.saddle_count,
        dominance_margin_s: dom_s.worst_margin + value_tol,
        dominance_margin_m: dom_m.worst_margin + value_tol,
    };
    Ok(BatteryOutput {
        props,
        values,
        anomalies,
    })
}

/// Tracked margins: name and signed value, positive in the healthy state.
fn margins(p: &StepProperties, cfg: &TraceConfig) -> Vec<(&'static str, f64)> {
    let sup = p.sup_norm.max(1e-300);
    let b = cfg.sign_rel_tol;
    vec![
        ("gap_floor", p.relative_gap - cfg.gap_rel_floor),
        ("vertex_z3", p.vertex_values[2] / sup - b),
        ("vertex_z1_negative", -p.vertex_values[0] / sup - b),
        ("vertex_z2_negative", -p.vertex_values[1] / sup - b),
        ("monotonicity", p.monotonicity_margin),
        ("dominance_s", p.dominance_margin_s),
        ("dominance_m", p.dominance_margin_m),
    ]
}

fn margin_by_name(p: &StepProperties, cfg: &TraceConfig, name: &str) -> f64 {
    margins(p, cfg)
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, v)| v)
        .expect("margin name")
}

fn hausdorff(a: &[Point], b: &[Point]) -> f64 {
    let one_way = |xs: &[Point], ys: &[Point]| {
        xs.iter()
            .map(|x| {
                ys.iter()
                    .map(|y| x.dist(*y))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

// ---------------------------------------------------------------------------
// The trace driver
// ---------------------------------------------------------------------------

/// Trace the linear homotopy from `from` to `to`. Solver failures mark the
/// step and the trace continues. Margin sign changes and census count
/// changes between consecutive successful steps are refined by bisection.
pub fn trace(from: &Triangle, to: &Triangle, cfg: &TraceConfig) -> TraceReport {
    let steps = cfg.steps.max(1);
    let ts: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();

    // Solve raw batteries. In parallel mode everything is solved against no
    // alignment first and signs are fixed in a sequential post-pass.
    let mut outputs: Vec<Result<BatteryOutput, String>> = Vec::with_capacity(ts.len());
    if cfg.parallel {
        use rayon::prelude::*;
        outputs = ts
            .par_iter()
            .map(|&t| run_one(from, to, t, None, cfg))
            .collect();
        // Post-pass: flip whole batteries to restore sign continuity.
        let mut prev: Option<Vec<f64>> = None;
        for out in outputs.iter_mut() {
            if let Ok(b) = out {
                if let Some(p) = &prev {
                    if p.len() == b.values.len() {
                        let ip: f64 = b.values.iter().zip(p.iter()).map(|(a, q)| a * q).sum();
                        if ip < 0.0 {
                            flip_battery(b);
                        }
                    }
                }
                prev = Some(b.values.clone());
            }
        }
    } else {
        let mut prev: Option<Vec<f64>> = None;
        for &t in &ts {
            let out = run_one(from, to, t, prev.as_deref(), cfg);
            if let Ok(b) = &out {
                prev = Some(b.values.clone());
            }
            outputs.push(out);
        }
    }

    // Assemble step reports and cross-step anomalies.
    let mut steps_out: Vec<ContinuationStep> = Vec::with_capacity(ts.len());
    for (k, (t, out)) in ts.iter().zip(outputs.iter()).enumerate() {
        let tri = lerp_triangle(from, to, *t).expect("endpoints are valid triangles");
        let (failed, properties, mut anomalies) = match out {
            Ok(b) => (None, Some(b.props.clone()), b.anomalies.clone()),
            Err(e) => (Some(e.clone()), None, Vec::new()),
        };
        // Locus continuity against the previous successful step.
        if let (Some(p), Some(ContinuationStep {
            properties: Some(q), ..
        })) = (&properties, steps_out.last())
        {
            if p.critical_count == q.critical_count
                && p.critical_count > 0
                && !p.degenerate_mode
                && !q.degenerate_mode
            {
                let dt = 1.0 / steps as f64;
                let diam = tri.diameter();
                let mesh_term = 4.0 * diam / (1 << cfg.level) as f64;
                let d = hausdorff(&p.critical_points, &q.critical_points);
                if d > cfg.locus_jump_factor * dt * diam + mesh_term {
                    anomalies.push(format!("critical point locus jumped by {d:.3e}"));
                }
            }
        }
        steps_out.push(ContinuationStep {
            index: k,
            t: *t,
            triangle: tri,
            failed,
            properties,
            anomalies,
        });
    }

    // Margin flags and census events between consecutive successful steps.
    let mut flags = Vec::new();
    let mut census_events = Vec::new();
    for k in 1..steps_out.len() {
        let (left, right) = (&steps_out[k - 1], &steps_out[k]);
        let (Some(pl), Some(pr)) = (&left.properties, &right.properties) else {
            continue;
        };
        let va = match &outputs[k - 1] {
            Ok(b) => b.values.clone(),
            Err(_) => continue,
        };
        for (name, ml) in margins(pl, cfg) {
            let mr = margin_by_name(pr, cfg, name);
            if (ml > 0.0) != (mr > 0.0) {
                flags.push(refine_margin(
                    from, to, cfg, name, k, left.t, right.t, ml, mr, &va,
                ));
            }
        }
        if pl.critical_count != pr.critical_count {
            census_events.push(refine_census(
                from,
                to,
                cfg,
                k,
                left.t,
                right.t,
                pl.critical_count,
                pr.critical_count,
                &va,
            ));
        }
    }

    let failed_steps = steps_out.iter().filter(|s| s.failed.is_some()).count();
    TraceReport {
        from: *from,
        to: *to,
        config: cfg.clone(),
        steps: steps_out,
        flags,
        census_events,
        failed_steps,
    }
}

fn run_one(
    from: &Triangle,
    to: &Triangle,
    t: f64,
    align: Option<&[f64]>,
    cfg: &TraceConfig,
) -> Result<BatteryOutput, String> {
    let tri = lerp_triangle(from, to, t).map_err(|e| e.to_string())?;
    step_battery(&tri, align, cfg).map_err(|e| e.to_string())
}

fn flip_battery(b: &mut BatteryOutput) {
    for x in b.values.iter_mut() {
        *x = -*x;
    }
    for v in b.props.vertex_values.iter_mut() {
        *v = -*v;
    }
    b.props.vertex_signs = [
        flip_band(b.props.vertex_signs[0]),
        flip_band(b.props.vertex_signs[1]),
        flip_band(b.props.vertex_signs[2]),
    ];
    b.props.orientation_flipped = !b.props.orientation_flipped;
    // Canonical data, margins, census, and dominance are orientation-free.
}

fn flip_band(s: SignBand) -> SignBand {
    match s {
        SignBand::Positive => SignBand::Negative,
        SignBand::Negative => SignBand::Positive,
        SignBand::Zero => SignBand::Zero,
    }
}

#[allow(clippy::too_many_arguments)]
fn refine_margin(
    from: &Triangle,
    to: &Triangle,
    cfg: &TraceConfig,
    name: &'static str,
    step_index: usize,
    mut ta: f64,
    mut tb: f64,
    mut ma: f64,
    mut mb: f64,
    left_values: &[f64],
) -> MarginFlag {
    let mut va = left_values.to_vec();
    let mut solves = 0usize;
    let mut failed = false;
    while tb - ta > cfg.refine_resolution && solves < 48 {
        let tm = 0.5 * (ta + tb);
        match run_one(from, to, tm, Some(&va), cfg) {
            Ok(b) => {
                let mm = margin_by_name(&b.props, cfg, name);
                if (mm > 0.0) == (ma > 0.0) {
                    ta = tm;
                    ma = mm;
                    va = b.values;
                } else {
                    tb = tm;
                    mb = mm;
                }
            }
            Err(_) => {
                failed = true;
                break;
            }
        }
        solves += 1;
    }
    MarginFlag {
        property: name.to_string(),
        step_index,
        t_before: ta,
        t_after: tb,
        margin_before: ma,
        margin_after: mb,
        bisection_solves: solves,
        bisection_failed: failed,
    }
}

#[allow(clippy::too_many_arguments)]
fn refine_census(
    from: &Triangle,
    to: &Triangle,
    cfg: &TraceConfig,
    step_index: usize,
    mut ta: f64,
    mut tb: f64,
    count_before: usize,
    count_after: usize,
    left_values: &[f64],
) -> CensusEvent {
    let mut va = left_values.to_vec();
    let mut solves = 0usize;
    while tb - ta > cfg.refine_resolution && solves < 48 {
        let tm = 0.5 * (ta + tb);
        match run_one(from, to, tm, Some(&va), cfg) {
            Ok(b) => {
                if b.props.critical_count == count_before {
                    ta = tm;
                    va = b.values;
                } else {
                    tb = tm;
                }
            }
            Err(_) => break,
        }
        solves += 1;
    }
    CensusEvent {
        step_index,
        count_before,
        count_after,
        t_before: ta,
        t_after: tb,
        bisection_solves: solves,
    }
}

/// JSON-lines rendering: one header line, one line per step, then one line
/// per flag and census event.
pub fn trace_jsonl(report: &TraceReport) -> String {
    #[derive(Serialize)]
    struct Header<'a> {
        kind: &'static str,
        from: &'a Triangle,
        to: &'a Triangle,
        config: &'a TraceConfig,
        failed_steps: usize,
    }
    #[derive(Serialize)]
    struct StepLine<'a> {
        kind: &'static str,
        #[serde(flatten)]
        step: &'a ContinuationStep,
    }
    #[derive(Serialize)]
    struct FlagLine<'a> {
        kind: &'static str,
        #[serde(flatten)]
        flag: &'a MarginFlag,
    }
    #[derive(Serialize)]
    struct EventLine<'a> {
        kind: &'static str,
        #[serde(flatten)]
        event: &'a CensusEvent,
    }
    let mut out = String::new();
    out.push_str(
        &serde_json::to_string(&Header {
            kind: "trace",
            from: &report.from,
            to: &report.to,
            config: &report.config,
            failed_steps: report.failed_steps,
        })
        .expect("serializable"),
    );
    out.push('\n');
    for step in &report.steps {
        out.push_str(&serde_json::to_string(&StepLine { kind: "step", step }).expect("serializable"));
        out.push('\n');
    }
    for flag in &report.flags {
        out.push_str(&serde_json::to_string(&FlagLine { kind: "flag", flag }).expect("serializable"));
        out.push('\n');
    }
    for event in &report.census_events {
        out.push_str(
            &serde_json::to_string(&EventLine {
                kind: "census_event",
                event,
            })
            .expect("serializable"),
        );
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(ax: f64, ay: f64, bx: f64, by: f64, cx: f64, cy: f64) -> Triangle {
        Triangle::new(Point::new(ax, ay), Point::new(bx, by), Point::new(cx, cy)).unwrap()
    }

    #[test]
    fn seeds_have_exact_eigenvalues_and_reject_unknown_names() {
        let he = seed_field("half_equilateral").unwrap();
        assert_eq!(he.eigenvalue, 4.0 * PI * PI / 9.0);
        let ir = seed_field("isosceles_right").unwrap();
        assert_eq!(ir.eigenvalue, PI * PI);
        assert!(matches!(
            seed_field("equilateral"),
            Err(ContinuationError::UnknownSeed(_))
        ));
    }

    #[test]
    fn seed_closed_forms_satisfy_the_eigenvalue_equation() {
        // Five-point finite-difference Laplacian at interior points.
        for name in ["half_equilateral", "isosceles_right"] {
            let seed = seed_field(name).unwrap();
            let h = 1e-4;
            for &(x, y) in &[(0.21, 0.33), (0.4, 0.11), (0.12, 0.55)] {
                let p = Point::new(x, y);
                let lap = (seed.eval(Point::new(x + h, y))
                    + seed.eval(Point::new(x - h, y))
                    + seed.eval(Point::new(x, y + h))
                    + seed.eval(Point::new(x, y - h))
                    - 4.0 * seed.eval(p))
                    / (h * h);
                let expect = -seed.eigenvalue * seed.eval(p);
                assert!(
                    (lap - expect).abs() < 1e-4 * seed.eigenvalue.max(1.0),
                    "{name} at ({x},{y}): FD {lap} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn seed_closed_forms_are_unit_mass_norm() {
        for name in ["half_equilateral", "isosceles_right"] {
            let seed = seed_field(name).unwrap();
            let mesh = uniform_mesh(&seed.triangle, 6, 2).unwrap();
            let sys = assemble(&mesh, DirichletSides::NEUMANN).unwrap();
            let v = seed.nodal_values(&mesh);
            let mut mv = vec![0.0; v.len()];
            sys.mass.matvec(&v, &mut mv);
            let norm2: f64 = v.iter().zip(&mv).map(|(a, b)| a * b).sum();
            assert!(
                (norm2 - 1.0).abs() < 1e-3,
                "{name}: interpolated mass norm^2 = {norm2}"
            );
        }
    }

    #[test]
    fn seed_discrete_residual_decays_at_the_expected_order() {
        let seed = seed_field("half_equilateral").unwrap();
        let p1 = seed_consistency(&seed, (3, 6), 1).unwrap();
        for (i, w) in p1.residual_norms.windows(2).enumerate() {
            assert!(
                w[1] < w[0],
                "P1 residuals not decreasing at step {i}: {:?}",
                p1.residual_norms
            );
        }
        // The solved mode approaches the closed form at second order for
        // linear elements, third order for quadratic.
        let p1_order = *p1.mode_orders.last().unwrap();
        assert!(
            (1.5..=2.7).contains(&p1_order),
            "P1 mode-error order {p1_order}, errors {:?}",
            p1.mode_errors
        );
        let p2 = seed_consistency(&seed, (3, 6), 2).unwrap();
        let p2_order = *p2.mode_orders.last().unwrap();
        assert!(
            (2.4..=4.2).contains(&p2_order),
            "P2 mode-error order {p2_order}, errors {:?}",
            p2.mode_errors
        );
        assert!(p2.residual_norms.last().unwrap() < p2.residual_norms.first().unwrap());
        // Rayleigh quotients of the interpolant home in on the eigenvalue.
        let dev = (p2.rayleigh.last().unwrap() - seed.eigenvalue).abs();
        assert!(dev < 1e-6 * seed.eigenvalue, "Rayleigh dev {dev}");
    }

    #[test]
    fn constant_family_reports_identical_steps() {
        let seed = seed_field("half_equilateral").unwrap();
        let cfg = TraceConfig {
            steps: 3,
            level: 3,
            ..TraceConfig::default()
        };
        let rep = trace(&seed.triangle, &seed.triangle, &cfg);
        assert_eq!(rep.steps.len(), 4);
        assert_eq!(rep.failed_steps, 0);
        assert!(rep.flags.is_empty());
        assert!(rep.census_events.is_empty());
        let first = serde_json::to_string(&rep.steps[0].properties).unwrap();
        for s in &rep.steps[1..] {
            assert_eq!(serde_json::to_string(&s.properties).unwrap(), first);
            assert!(s.anomalies.is_empty());
        }
    }

    #[test]
    fn acute_path_keeps_gap_signs_and_margins() {
        let seed = seed_field("half_equilateral").unwrap();
        // Target chosen so the side-length ordering never changes along the
        // path: |z3 z1| stays above |z1 z2| for every t.
        let target = tri(0.0, 0.0, 1.0, 0.0, 0.45, 1.1);
        let cfg = TraceConfig {
            steps: 8,
            level: 4,
            ..TraceConfig::default()
        };
        let rep = trace(&seed.triangle, &target, &cfg);
        assert_eq!(rep.failed_steps, 0);
        assert!(rep.flags.is_empty(), "{:#?}", rep.flags);
        for s in &rep.steps {
            let p = s.properties.as_ref().unwrap();
            assert!(p.gap > 0.0);
            assert!(s.anomalies.is_empty(), "t={}: {:?}", s.t, s.anomalies);
            assert_eq!(
                p.canonical_vertex_signs,
                [SignBand::Negative, SignBand::Negative, SignBand::Positive],
                "t={}", s.t
            );
            // No label swaps on this path: path-label signs agree.
            assert_eq!(p.vertex_signs, p.canonical_vertex_signs, "t={}", s.t);
            assert!(p.canonical_ordering_holds);
            assert!(p.monotonicity_margin > 0.0, "t={}", s.t);
            assert!(p.dominance_margin_s > 0.0, "t={}", s.t);
            assert!(p.dominance_margin_m > 0.0, "t={}", s.t);
        }
        // The saddle emerges from the right-angle vertex as the path enters
        // the acute class: exactly one census event, near the start, and
        // every acute step has the single shortest-side saddle.
        assert_eq!(rep.census_events.len(), 1, "{:#?}", rep.census_events);
        let ev = &rep.census_events[0];
        assert_eq!((ev.count_before, ev.count_after), (0, 1));
        assert!(ev.t_after - ev.t_before <= cfg.refine_resolution + 1e-12);
        let last = rep.steps.last().unwrap().properties.as_ref().unwrap();
        assert_eq!(last.critical_count, 1);
        assert_eq!(last.saddle_count, 1);
    }

    #[test]
    fn label_swap_path_flags_the_vertex_crossing() {
        // This target crosses the class of isosceles triangles with two
        // equal shortest sides (|z3 z1| = |z1 z2|) near t = 0.886; the
        // path-label z1 value crosses zero there while the canonical
        // pattern survives.
        let seed = seed_field("half_equilateral").unwrap();
        let target = tri(0.0, 0.0, 1.0, 0.0, 0.35, 0.85);
        let cfg = TraceConfig {
            steps: 16,
            level: 4,
            ..TraceConfig::default()
        };
        let rep = trace(&seed.triangle, &target, &cfg);
        assert_eq!(rep.failed_steps, 0);
        let crossing: Vec<_> = rep
            .flags
            .iter()
            .filter(|f| f.property == "vertex_z1_negative")
            .collect();
        assert_eq!(crossing.len(), 1, "{:#?}", rep.flags);
        let f = crossing[0];
        assert!(f.t_after - f.t_before <= cfg.refine_resolution + 1e-12);
        assert!(
            f.t_before > 0.85 && f.t_after < 0.92,
            "crossing localized at [{}, {}]",
            f.t_before,
            f.t_after
        );
        assert!(!f.bisection_failed);
        // At the refined crossing the two shortest sides tie to ~1e-3.
        let tm = 0.5 * (f.t_before + f.t_after);
        let tc = lerp_triangle(&seed.triangle, &target, tm).unwrap();
        let d_s = tc.side_length(Side::Short);
        let d_m = tc.side_length(Side::Medium);
        assert!(
            (d_s - d_m).abs() < 8e-3,
            "sides at crossing: {d_s} vs {d_m}"
        );
        // Canonical signs hold at every grid step (the grid misses the
        // exact crossing).
        for s in &rep.steps {
            let p = s.properties.as_ref().unwrap();
            assert!(p.gap > 0.0);
            assert_eq!(
                p.canonical_vertex_signs,
                [SignBand::Negative, SignBand::Negative, SignBand::Positive],
                "t={}", s.t
            );
            assert!(p.canonical_ordering_holds, "t={}", s.t);
        }
    }

    #[test]
    fn obtuse_two_leg_path_has_empty_census_and_nonzero_apex() {
        let seed = seed_field("half_equilateral").unwrap();
        let mid = tri(0.0, 0.0, 1.0, 0.0, 0.0, 0.8);
        let obtuse = tri(0.0, 0.0, 1.0, 0.0, -0.4, 0.8);
        let cfg = TraceConfig {
            steps: 6,
            level: 4,
            ..TraceConfig::default()
        };
        let mut reports = Vec::new();
        for (a, b) in [(&seed.triangle, &mid), (&mid, &obtuse)] {
            let rep = trace(a, b, &cfg);
            assert_eq!(rep.failed_steps, 0);
            assert!(rep.census_events.is_empty(), "{:#?}", rep.census_events);
            for s in &rep.steps {
                let p = s.properties.as_ref().unwrap();
                assert_eq!(p.critical_count, 0, "t={}", s.t);
                // The apex value stays well clear of zero on both legs.
                assert!(
                    p.vertex_values[2].abs() / p.sup_norm > 0.05,
                    "t={}: apex {:e}",
                    s.t,
                    p.vertex_values[2]
                );
            }
            reports.push(rep);
        }
        // The first leg crosses the isosceles-right configuration (legs tie
        // at apex height 1, i.e. t* below) where the right-angle vertex
        // value of the now-antisymmetric mode passes through zero: the
        // path-label z1 margin must flag it with a tight bracket around t*.
        let crossing: Vec<_> = reports[0]
            .flags
            .iter()
            .filter(|f| f.property == "vertex_z1_negative")
            .collect();
        assert_eq!(crossing.len(), 1, "{:#?}", reports[0].flags);
        let f = crossing[0];
        let t_star = (3.0f64.sqrt() - 1.0) / (3.0f64.sqrt() - 0.8);
        assert!(f.t_after - f.t_before <= cfg.refine_resolution + 1e-12);
        assert!(
            (0.5 * (f.t_before + f.t_after) - t_star).abs() < 0.02,
            "bracket [{}, {}] should sit near {t_star}",
            f.t_before,
            f.t_after
        );
    }

    #[test]
    fn equilateral_endpoint_flags_the_gap_floor_late() {
        let seed = seed_field("half_equilateral").unwrap();
        let eq = tri(0.0, 0.0, 1.0, 0.0, 0.5, 0.5 * 3.0f64.sqrt());
        let cfg = TraceConfig {
            steps: 8,
            level: 4,
            ..TraceConfig::default()
        };
        let rep = trace(&seed.triangle, &eq, &cfg);
        assert_eq!(rep.failed_steps, 0);
        let gap_flags: Vec<_> = rep
            .flags
            .iter()
            .filter(|f| f.property == "gap_floor")
            .collect();
        assert_eq!(gap_flags.len(), 1, "{:#?}", rep.flags);
        assert!(
            gap_flags[0].t_before > 0.8,
            "gap floor crossed at t > 0.8, got {}",
            gap_flags[0].t_before
        );
        let last = rep.steps.last().unwrap().properties.as_ref().unwrap();
        assert!(last.relative_gap < cfg.gap_rel_floor);
        let second_last = rep.steps[rep.steps.len() - 2]
            .properties
            .as_ref()
            .unwrap();
        assert!(second_last.relative_gap > cfg.gap_rel_floor);
    }

    #[test]
    fn parallel_mode_matches_sequential_output() {
        let seed = seed_field("half_equilateral").unwrap();
        let target = tri(0.0, 0.0, 1.0, 0.0, 0.45, 1.1);
        let base = TraceConfig {
            steps: 4,
            level: 3,
            ..TraceConfig::default()
        };
        let seq = trace(&seed.triangle, &target, &base);
        let par = trace(
            &seed.triangle,
            &target,
            &TraceConfig {
                parallel: true,
                ..base.clone()
            },
        );
        let strip = |r: &TraceReport| {
            (
                serde_json::to_string(&r.steps).unwrap(),
                serde_json::to_string(&r.flags).unwrap(),
                serde_json::to_string(&r.census_events).unwrap(),
            )
        };
        assert_eq!(strip(&seq), strip(&par));
    }

    #[test]
    fn jsonl_rendering_is_line_per_record() {
        let seed = seed_field("isosceles_right").unwrap();
        let cfg = TraceConfig {
            steps: 2,
            level: 3,
            ..TraceConfig::default()
        };
        let rep = trace(&seed.triangle, &seed.triangle, &cfg);
        let text = trace_jsonl(&rep);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + rep.steps.len());
        assert!(lines[0].contains("\"kind\":\"trace\""));
        for l in &lines[1..] {
            assert!(l.contains("\"kind\":\"step\""));
            serde_json::from_str::<serde_json::Value>(l).unwrap();
        }
        // Deterministic rendering.
        assert_eq!(text, trace_jsonl(&trace(&seed.triangle, &seed.triangle, &cfg)));
    }
}
