//! Mixed-eigenvalue inequality checks and closed-form scan functions.
//!
//! Two kinds of verification live here:
//!
//! * **Eigenvalue comparisons** computed by the finite-element solver with
//!   Richardson error bars: the six-link chain of first mixed eigenvalues
//!   over the side subsets `S < M < L < MS < LS < LM < D`, the bisector
//!   sub-triangle comparisons, the flat-Neumann lower bound for the second
//!   Neumann eigenvalue, Bessel-based closed-form bounds, sector (cone)
//!   lower bounds, and the monotonicity of the mixed eigenvalue of the
//!   sheared triangle family `T_{a,b}`.
//! * **Closed-form scans** of the comparison functions `F(beta, gamma)`
//!   (angle form) and `cal_f(s, t)` (tangent-half-angle form), including the
//!   exact integer-polynomial positivity certificate behind the `s >= 1`
//!   branch and the quartic discriminant factorization behind the
//!   unimodality argument.
//!
//! Verdicts follow the error-bar semantics of
//! [`compare_with_error_bars`]: a strict inequality is only reported when
//! the bars separate; overlap yields "inconclusive", never "violated".

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::assembly::DirichletSides;
use crate::eigensolve::{
    compare_with_error_bars, richardson, solve_modes, ComparisonVerdict, SolveError,
};
use crate::geometry::{bisector_foot, canonicalize, classify, Point, Side, SymmetryClass, Triangle};
use crate::polynomial::IntPoly;
use crate::special::j0_first_zero;

// ---------------------------------------------------------------------------
// Closed-form comparison functions
// ---------------------------------------------------------------------------

/// Angle-form comparison function
/// `F(beta, gamma) = cos^2((beta-gamma)/2) sin(beta) /
/// (4 cos((beta+gamma)/2) sin^2(gamma)) * (theta / sin(theta))`
/// with `theta = (pi - beta + gamma)/2`. Here `beta` and `gamma` are the
/// angles at `z2` and `z3`; the function compares the Bessel upper bound for
/// the second Neumann eigenvalue with the sector lower bound for the mixed
/// eigenvalue of the bisector sub-triangle, and the target inequality holds
/// whenever `F > 1`.
pub fn f_angles(beta: f64, gamma: f64) -> f64 {
    let half_diff = 0.5 * (beta - gamma);
    let half_sum = 0.5 * (beta + gamma);
    let theta = 0.5 * (PI - beta + gamma);
    (half_diff.cos().powi(2) * beta.sin()) / (4.0 * half_sum.cos() * gamma.sin().powi(2))
        * (theta / theta.sin())
}

/// Tangent-half-angle form: `cal_f(s, t) = F(2 atan s, 2 atan t)` written
/// directly in `s = tan(beta/2)`, `t = tan(gamma/2)`; requires `s > 0` and
/// `0 < s t < 1`.
pub fn cal_f(s: f64, t: f64) -> f64 {
    let x = s * t;
    (1.0 + t * t).powi(2) / (8.0 * t * t) * ((1.0 + x) * s) / ((1.0 - x) * (1.0 + s * s))
        * ((1.0 / s).atan() + t.atan())
}

/// First factor of the closed form of `F` along the curve `gamma = 3 beta - pi`:
/// `1 / (8 cos(beta) (1 - 4 cos^2(beta))^2)`.
pub fn curve_first_factor(beta: f64) -> f64 {
    let c = beta.cos();
    1.0 / (8.0 * c * (1.0 - 4.0 * c * c).powi(2))
}

/// Second factor `beta / sin(beta)` (increasing on `(0, pi)`).
pub fn curve_second_factor(beta: f64) -> f64 {
    beta / beta.sin()
}

/// Closed form of the scan function along the lower boundary curve:
/// `F(beta, 3 beta - pi) = curve_first_factor * curve_second_factor`,
/// valid for `beta` in `(pi/3, pi/2)`.
pub fn boundary_curve(beta: f64) -> f64 {
    curve_first_factor(beta) * curve_second_factor(beta)
}

/// The product of the two factor-wise minima of [`boundary_curve`] over
/// `(pi/3, pi/2)`: `25 sqrt(5) pi / (96 sqrt(3)) ~= 1.0562`, a rigorous
/// lower bound for the whole curve (both factors are positive).
pub fn curve_lower_bound_constant() -> f64 {
    25.0 * 5.0f64.sqrt() * PI / (96.0 * 3.0f64.sqrt())
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
fn golden_min(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let m = 0.5 * (a + b);
    (m, f(m))
}

// ---------------------------------------------------------------------------
// Region scan
// ---------------------------------------------------------------------------

/// Scan-grid configuration for [`f_scan`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScanGrid {
    /// Number of grid points per parameter direction.
    pub resolution: usize,
    /// Inset from open region boundaries (the integrand diverges at
    /// `gamma -> 0` and `beta + gamma -> pi`).
    pub epsilon: f64,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid {
            resolution: 512,
            epsilon: 1e-4,
        }
    }
}

/// Lower edge of the scan region in `beta` for a given `gamma`:
/// `beta >= max{ (pi + gamma)/3, (pi - gamma)/2 }`.
pub fn region_lower_beta(gamma: f64) -> f64 {
    ((PI + gamma) / 3.0).max((PI - gamma) / 2.0)
}

/// One scan sample (kept optionally for CSV export).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScanRow {
    pub beta: f64,
    pub gamma: f64,
    pub value: f64,
}

/// Result of scanning `F` over the region
/// `gamma in (0, pi/2), beta in [max{(pi+gamma)/3, (pi-gamma)/2}, pi - gamma)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanReport {
    pub grid: ScanGrid,
    pub samples: usize,
    pub min: f64,
    pub argmin_beta: f64,
    pub argmin_gamma: f64,
    /// `min - 1`: how far above the critical threshold the scan stays.
    pub margin: f64,
}

/// Exhaustive grid scan of [`f_angles`] over the region where the
/// closed-form argument must exceed one. Optionally collects every sample.
pub fn f_scan_collect(grid: &ScanGrid, mut rows: Option<&mut Vec<ScanRow>>) -> ScanReport {
    let n = grid.resolution.max(2);
    let eps = grid.epsilon;
    let mut min = f64::INFINITY;
    let (mut arg_b, mut arg_g) = (f64::NAN, f64::NAN);
    let mut samples = 0usize;
    for i in 0..n {
        let gamma = eps + (PI / 2.0 - 2.0 * eps) * (i as f64) / ((n - 1) as f64);
        let lo = region_lower_beta(gamma);
        let hi = PI - gamma - eps;
        if hi <= lo {
            continue;
        }
        for j in 0..n {
            let beta = lo + (hi - lo) * (j as f64) / ((n - 1) as f64);
            let v = f_angles(beta, gamma);
            samples += 1;
            if let Some(out) = rows.as_deref_mut() {
                out.push(ScanRow {
                    beta,
                    gamma,
                    value: v,
                });
            }
            if v < min {
                min = v;
                arg_b = beta;
                arg_g = gamma;
            }
        }
    }
    ScanReport {
        grid: *grid,
        samples,
        min,
        argmin_beta: arg_b,
        argmin_gamma: arg_g,
        margin: min - 1.0,
    }
}

/// [`f_scan_collect`] without sample retention.
pub fn f_scan(grid: &ScanGrid) -> ScanReport {
    f_scan_collect(grid, None)
}

// ---------------------------------------------------------------------------
// The three scan claims
// ---------------------------------------------------------------------------

/// Grid verification that `cal_f > 1` for `s >= 1`, `0 < s t < 1`, together
/// with the square-root lower bound used to prove it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Claim1Report {
    pub s_range: (f64, f64),
    pub samples: usize,
    pub min_value: f64,
    pub argmin: (f64, f64),
    /// Smallest ratio `cal_f / sqrt-bound`; the derivation needs it `>= 1`.
    pub min_bound_ratio: f64,
    pub pass: bool,
}

/// The radical lower bound `sqrt((1+x)^4 (1+x^2)^3 / (512 (1-x)^2 x^4))`
/// with `x = s t`, valid for `s >= 1`.
pub fn claim1_sqrt_bound(x: f64) -> f64 {
    ((1.0 + x).powi(4) * (1.0 + x * x).powi(3) / (512.0 * (1.0 - x).powi(2) * x.powi(4))).sqrt()
}

pub fn claim1_scan(n_s: usize, n_x: usize) -> Claim1Report {
    let (s_lo, s_hi) = (1.0, 50.0);
    let eps = 1e-4;
    let mut min_value = f64::INFINITY;
    let mut argmin = (f64::NAN, f64::NAN);
    let mut min_ratio = f64::INFINITY;
    let mut samples = 0usize;
    for i in 0..n_s {
        let s = s_lo + (s_hi - s_lo) * (i as f64) / ((n_s - 1) as f64);
        for j in 0..n_x {
            // Sample x = s t uniformly in (0,1); this follows the
            // singularity structure better than uniform t.
            let x = eps + (1.0 - 2.0 * eps) * ((j as f64) + 0.5) / (n_x as f64);
            let t = x / s;
            let v = cal_f(s, t);
            let ratio = v / claim1_sqrt_bound(x);
            samples += 1;
            if v < min_value {
                min_value = v;
                argmin = (s, t);
            }
            if ratio < min_ratio {
                min_ratio = ratio;
            }
        }
    }
    Claim1Report {
        s_range: (s_lo, s_hi),
        samples,
        min_value,
        argmin,
        min_bound_ratio: min_ratio,
        pass: min_value > 1.0 && min_ratio >= 1.0 - 1e-12,
    }
}

/// Verification of the boundary-curve claim: the closed form of
/// `F(beta, 3 beta - pi)` matches the direct evaluation, and the product of
/// the factor-wise minima reproduces the constant
/// `25 sqrt(5) pi / (96 sqrt(3))`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Claim2Report {
    pub grid_points: usize,
    /// Worst relative deviation between `F(beta, 3 beta - pi)` and the
    /// closed-form product along the curve.
    pub max_closed_form_rel_dev: f64,
    /// Numerically minimized first factor and its closed form `25 sqrt(5)/64`.
    pub factor1_min: f64,
    pub factor1_min_closed_form: f64,
    /// Product of factor-wise minima (the curve's rigorous lower bound) and
    /// the closed-form constant it must reproduce.
    pub lower_bound: f64,
    pub lower_bound_closed_form: f64,
    pub lower_bound_dev: f64,
    /// Smallest curve value seen on the grid (must sit above the bound).
    pub curve_min_on_grid: f64,
    pub pass: bool,
}

pub fn claim2_check(n: usize) -> Claim2Report {
    let (lo, hi) = (PI / 3.0, PI / 2.0);
    let mut max_dev = 0.0f64;
    let mut curve_min = f64::INFINITY;
    for i in 0..n {
        // Open interval: sample strictly inside.
        let beta = lo + (hi - lo) * ((i as f64) + 0.5) / (n as f64);
        let direct = f_angles(beta, 3.0 * beta - PI);
        let closed = boundary_curve(beta);
        max_dev = max_dev.max((direct - closed).abs() / closed.abs());
        curve_min = curve_min.min(closed);
    }
    let (_, factor1_min) = golden_min(lo + 1e-9, hi - 1e-9, curve_first_factor);
    let factor1_closed = 25.0 * 5.0f64.sqrt() / 64.0;
    // The second factor is increasing, so its infimum over the open interval
    // is the limit value at the left endpoint.
    let lower_bound = factor1_min * curve_second_factor(lo);
    let bound_closed = curve_lower_bound_constant();
    let dev = (lower_bound - bound_closed).abs();
    Claim2Report {
        grid_points: n,
        max_closed_form_rel_dev: max_dev,
        factor1_min,
        factor1_min_closed_form: factor1_closed,
        lower_bound,
        lower_bound_closed_form: bound_closed,
        lower_bound_dev: dev,
        curve_min_on_grid: curve_min,
        pass: max_dev <= 1e-10
            && (factor1_min - factor1_closed).abs() <= 1e-9
            && dev <= 1e-6
            && lower_bound > 1.0
            && curve_min >= lower_bound - 1e-9,
    }
}

/// Finite-difference shape check for `s -> cal_f(s, t)` on `(0, 1)`:
/// the derivative sign pattern must be all `+`, or `+` then `-` with a
/// single change (every interior critical point is a maximum).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Claim3Report {
    pub t_values: Vec<f64>,
    pub s_samples: usize,
    /// Per `t`: number of derivative sign changes observed.
    pub sign_changes: Vec<usize>,
    /// Per `t`: whether the first nonzero derivative sign is positive.
    pub starts_increasing: Vec<bool>,
    pub pass: bool,
}

pub fn claim3_signs(t_values: &[f64], n_s: usize) -> Claim3Report {
    let eps = 1e-4;
    let mut sign_changes = Vec::with_capacity(t_values.len());
    let mut starts_increasing = Vec::with_capacity(t_values.len());
    let mut pass = true;
    for &t in t_values {
        let values: Vec<f64> = (0..n_s)
            .map(|k| {
                let s = eps + (1.0 - 2.0 * eps) * (k as f64) / ((n_s - 1) as f64);
                cal_f(s, t)
            })
            .collect();
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let dead_band = 1e-13 * scale;
        let mut signs: Vec<i8> = Vec::new();
        for w in values.windows(2) {
            let d = w[1] - w[0];
            let sgn = if d > dead_band {
                1
            } else if d < -dead_band {
                -1
            } else {
                0
            };
            if sgn != 0 && signs.last() != Some(&sgn) {
                signs.push(sgn);
            }
        }
        let changes = signs.len().saturating_sub(1);
        let starts_up = signs.first() == Some(&1);
        let monotone_or_unimodal = match signs.as_slice() {
            [1] => true,
            [1, -1] => true,
            _ => false,
        };
        sign_changes.push(changes);
        starts_increasing.push(starts_up);
        pass &= monotone_or_unimodal;
    }
    Claim3Report {
        t_values: t_values.to_vec(),
        s_samples: n_s,
        sign_changes,
        starts_increasing,
        pass,
    }
}

// ---------------------------------------------------------------------------
// Exact polynomial identities
// ---------------------------------------------------------------------------

/// Outcome of the exact (integer and high-precision rational) identity
/// checks behind the scan claims.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    /// Whether the positivity decomposition as printed in the source text
    /// reproduces `(1+x)^4 (1+x^2)^3 - 512 (1-x)^2 x^4`. It does not — the
    /// printed sum has a transcription error — so this is recorded as data,
    /// and the corrected certificate below carries the proof obligation.
    pub printed_sum_matches: bool,
    /// Coefficients of (target minus printed sum), ascending degree.
    pub printed_difference: Vec<i64>,
    /// Whether the corrected certificate is exact:
    /// `25 * target = 25 (1-x)^10 + 350 x (1-x)^8 + 1900 x^2 (1-x)^6
    ///  + 8 x^3 (25 x^2 - 66 x + 25)^2 + 1152 x^5`,
    /// every summand nonnegative for `x >= 0` and the last strictly positive
    /// for `x > 0`, so the target is strictly positive there.
    pub certificate_matches: bool,
    /// First differing coefficient index when the certificate fails.
    pub certificate_mismatch_index: Option<usize>,
    /// Coefficients of `25 * target`, ascending degree.
    pub certificate_coefficients: Vec<i64>,
    /// Whether `4 c0 c2 - c1^2` equals `4 (x+1)^2 [(x^2+1)^2 - 2x(x^2+1) - 9x^2]`
    /// exactly in integer arithmetic (the radical-free form of the
    /// discriminant factorization).
    pub quartic_integer_form_matches: bool,
    /// Worst absolute deviation of the sqrt(10)-split factorization
    /// `4 (x+1)^2 [x^2+1+(sqrt(10)-1)x] [x^2+1-(sqrt(10)+1)x]`
    /// from the integer form at 64 rational sample points (degree 6, so 64
    /// agreement points force polynomial identity).
    pub quartic_factorization_max_dev: f64,
    pub pass: bool,
}

pub fn exact_identities() -> IdentityReport {
    let x = IntPoly::x();
    let one = IntPoly::constant(1);
    let one_minus = one.sub(&x);
    let one_plus = one.add(&x);

    // Target: (1+x)^4 (1+x^2)^3 - 512 (1-x)^2 x^4.
    let target = one_plus
        .pow(4)
        .mul(&one.add(&x.pow(2)).pow(3))
        .sub(&one_minus.pow(2).mul(&x.pow(4)).scale(512));

    // The sum as printed in the source text.
    let printed = one_minus
        .pow(10)
        .add(&x.mul(&one_minus.pow(8)).scale(14))
        .add(&x.pow(2).mul(&one_minus.pow(6)).scale(76))
        .add(&x.pow(3).mul(&one_minus.pow(4)).scale(72))
        .add(
            &x.pow(3)
                .mul(&one.sub(&x.scale(2)).pow(2))
                .scale(128),
        );
    let printed_diff = target.sub(&printed);

    // Corrected certificate for 25 * target.
    let quad = IntPoly::from_coeffs(&[25, -66, 25]);
    let cert = one_minus
        .pow(10)
        .scale(25)
        .add(&x.mul(&one_minus.pow(8)).scale(350))
        .add(&x.pow(2).mul(&one_minus.pow(6)).scale(1900))
        .add(&x.pow(3).mul(&quad.pow(2)).scale(8))
        .add(&x.pow(5).scale(1152));
    let target25 = target.scale(25);
    let cert_diff = target25.sub(&cert);
    let certificate_matches = cert_diff.is_zero();
    let mismatch_index = if certificate_matches {
        None
    } else {
        cert_diff.coeffs().iter().position(|&c| c != 0)
    };

    // Quartic discriminant: with c0 = (x+1)^3 - 2 x^3, c1 = -2x(1-x),
    // c2 = 2 - (x+1)^3, check 4 c0 c2 - c1^2 against its factorizations.
    let cube = one_plus.pow(3);
    let c0 = cube.sub(&x.pow(3).scale(2));
    let c1 = IntPoly::from_coeffs(&[0, -2, 2]);
    let c2 = IntPoly::constant(2).sub(&cube);
    let disc = c0.mul(&c2).scale(4).sub(&c1.mul(&c1));
    // Radical-free integer form: 4 (x+1)^2 [(x^2+1)^2 - 2 x (x^2+1) - 9 x^2].
    let x2p1 = one.add(&x.pow(2));
    let bracket = x2p1.pow(2).sub(&x.mul(&x2p1).scale(2)).sub(&x.pow(2).scale(9));
    let integer_form = one_plus.pow(2).mul(&bracket).scale(4);
    let quartic_integer_ok = disc.sub(&integer_form).is_zero();
    // sqrt(10)-split at 64 rational points.
    let sqrt10 = 10.0f64.sqrt();
    let mut max_dev = 0.0f64;
    for k in 1..=64 {
        let xv = k as f64 / 65.0;
        let lhs = disc.eval_f64(xv);
        let q1 = xv * xv + 1.0 + (sqrt10 - 1.0) * xv;
        let q2 = xv * xv + 1.0 - (sqrt10 + 1.0) * xv;
        let rhs = 4.0 * (xv + 1.0).powi(2) * q1 * q2;
        let scale = lhs.abs().max(1.0);
        max_dev = max_dev.max((lhs - rhs).abs() / scale);
    }

    IdentityReport {
        printed_sum_matches: printed_diff.is_zero(),
        printed_difference: printed_diff.coeffs().to_vec(),
        certificate_matches,
        certificate_mismatch_index: mismatch_index,
        certificate_coefficients: target25.coeffs().to_vec(),
        quartic_integer_form_matches: quartic_integer_ok,
        quartic_factorization_max_dev: max_dev,
        pass: certificate_matches && quartic_integer_ok && max_dev <= 1e-12,
    }
}

// ---------------------------------------------------------------------------
// Eigenvalue estimation with error bars
// ---------------------------------------------------------------------------

/// A Richardson-extrapolated eigenvalue with a conservative error bar.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenEstimate {
    pub value: f64,
    pub error_bar: f64,
    pub by_level: Vec<f64>,
    pub level_range: (u32, u32),
    pub order: u32,
    pub extrapolated: bool,
    pub observed_order: Option<f64>,
}

/// Solve the first mode of the given boundary-value problem across a level
/// range and extrapolate. For all-Neumann conditions the first mode is the
/// first nonconstant one. When the level sequence has not settled into
/// monotone convergence, the finest value is returned with a crude bar of
/// three times the last difference.
pub fn estimate_eigenvalue(
    t: &Triangle,
    bc: DirichletSides,
    levels: (u32, u32),
    order: u32,
    seed: u64,
) -> Result<EigenEstimate, SolveError> {
    let mut by_level = Vec::new();
    for level in levels.0..=levels.1 {
        let (_, modes) = solve_modes(t, level, order, bc, 1, seed)?;
        by_level.push(modes[0].eigenvalue);
    }
    let (goal, window) = if order == 1 { (2.0, 0.3) } else { (4.0, 0.5) };
    let est = richardson(&by_level, goal, window);
    let k = by_level.len();
    let (value, error_bar, extrapolated) = match (est.extrapolated, est.error_bar) {
        (Some(v), Some(e)) => (v, e.max(1e-12 * v.abs()), true),
        _ => {
            let last = by_level[k - 1];
            let bar = if k >= 2 {
                (3.0 * (last - by_level[k - 2]).abs()).max(1e-12 * last.abs())
            } else {
                last.abs()
            };
            (last, bar, false)
        }
    };
    Ok(EigenEstimate {
        value,
        error_bar,
        by_level,
        level_range: levels,
        order,
        extrapolated,
        observed_order: est.observed_order,
    })
}

/// Build a counter-clockwise triangle from three vertices, reflecting
/// across the `x`-axis when the triple is clockwise. Reflection preserves
/// side lengths, positional side indexing, and the spectrum.
fn ccw_triangle(v: [Point; 3]) -> Result<Triangle, SolveError> {
    let cross = (v[1] - v[0]).cross(v[2] - v[0]);
    let pts = if cross < 0.0 {
        [
            Point::new(v[0].x, -v[0].y),
            Point::new(v[1].x, -v[1].y),
            Point::new(v[2].x, -v[2].y),
        ]
    } else {
        v
    };
    Ok(Triangle::new(pts[0], pts[1], pts[2])?)
}

/// First mixed eigenvalue of the triangle spanned by `v` with Dirichlet
/// conditions on the positional sides listed in `dirichlet` (side `k` spans
/// vertices `k` and `k+1 mod 3`).
pub fn mixed_eigenvalue_of(
    v: [Point; 3],
    dirichlet: &[Side],
    levels: (u32, u32),
    order: u32,
    seed: u64,
) -> Result<EigenEstimate, SolveError> {
    let tri = ccw_triangle(v)?;
    estimate_eigenvalue(&tri, DirichletSides::from_sides(dirichlet), levels, order, seed)
}

// ---------------------------------------------------------------------------
// The seven-eigenvalue chain
// ---------------------------------------------------------------------------

/// Boundary-condition keys of the chain, in the proven strict order.
pub const CHAIN_KEYS: [&str; 7] = ["S", "M", "L", "MS", "LS", "LM", "D"];

fn chain_bc(key: &str) -> DirichletSides {
    match key {
        "S" => DirichletSides::from_sides(&[Side::Short]),
        "M" => DirichletSides::from_sides(&[Side::Medium]),
        "L" => DirichletSides::from_sides(&[Side::Long]),
        "MS" => DirichletSides::from_sides(&[Side::Medium, Side::Short]),
        "LS" => DirichletSides::from_sides(&[Side::Long, Side::Short]),
        "LM" => DirichletSides::from_sides(&[Side::Long, Side::Medium]),
        "D" => DirichletSides::ALL,
        _ => unreachable!("chain key"),
    }
}

/// Apex angle of the sector that certifies the cone lower bound for one
/// chain entry: the triangle's angle at its all-Neumann vertex for a single
/// Dirichlet side, a half-plane (`pi`) when only one side is Neumann, and
/// the full plane (`2 pi`) for pure Dirichlet conditions.
fn chain_cone_alpha(key: &str, t: &Triangle) -> f64 {
    match key {
        "S" => t.angle(2),
        "M" => t.angle(1),
        "L" => t.angle(0),
        "MS" | "LS" | "LM" => PI,
        "D" => 2.0 * PI,
        _ => unreachable!("chain key"),
    }
}

/// Planar sector lower bound for a first mixed eigenvalue: a domain of the
/// given area inside a wedge of opening `alpha`, Dirichlet on the part of
/// the boundary interior to the wedge, satisfies
/// `lambda >= (alpha / 2) j01^2 / area`.
pub fn cone_bound(alpha: f64, area: f64) -> f64 {
    0.5 * alpha * j0_first_zero().powi(2) / area
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainEntry {
    pub key: String,
    pub estimate: EigenEstimate,
    pub cone_alpha: f64,
    pub cone_floor: f64,
    /// Verdict of `cone_floor < estimate` under error bars; the floor is a
    /// proven bound, so anything but `violated` is consistent.
    pub cone_verdict: ComparisonVerdict,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairVerdict {
    pub lhs: String,
    pub rhs: String,
    /// Verdict of `lhs < rhs` under error bars.
    pub verdict: ComparisonVerdict,
    /// `rhs - lhs` midpoint gap.
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InequalityChainReport {
    pub triangle: Triangle,
    pub scalene: bool,
    pub entries: Vec<ChainEntry>,
    /// Six adjacent comparisons in chain order.
    pub adjacent: Vec<PairVerdict>,
    pub strict_count: usize,
    pub inconclusive_count: usize,
    pub violated_count: usize,
    /// Flat-Neumann comparisons: the second Neumann eigenvalue is at most
    /// every mixed eigenvalue whose Neumann part lies in a single line
    /// (the three two-Dirichlet-side problems), and a fortiori the pure
    /// Dirichlet one.
    pub flat_neumann: Vec<PairVerdict>,
    pub mu2: EigenEstimate,
    /// Set when any adjacent verdict is inconclusive: rerun at finer levels.
    pub refinement_suggested: bool,
}

/// Compute all seven chain eigenvalues of the canonicalized triangle and
/// compare adjacent pairs under error-bar semantics.
pub fn chain(
    t: &Triangle,
    levels: (u32, u32),
    order: u32,
    seed: u64,
) -> Result<InequalityChainReport, SolveError> {
    let (tri, _) = canonicalize(t)?;
    let scalene = classify(&tri).symmetry_class == SymmetryClass::Scalene;
    let area = tri.area();
    let mut entries = Vec::with_capacity(7);
    for key in CHAIN_KEYS {
        let estimate = estimate_eigenvalue(&tri, chain_bc(key), levels, order, seed)?;
        let alpha = chain_cone_alpha(key, &tri);
        let floor = cone_bound(alpha, area);
        let cone_verdict =
            compare_with_error_bars(floor, 0.0, estimate.value, estimate.error_bar);
        entries.push(ChainEntry {
            key: key.to_string(),
            estimate,
            cone_alpha: alpha,
            cone_floor: floor,
            cone_verdict,
        });
    }
    let mut adjacent = Vec::with_capacity(6);
    for w in entries.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        adjacent.push(PairVerdict {
            lhs: a.key.clone(),
            rhs: b.key.clone(),
            verdict: compare_with_error_bars(
                a.estimate.value,
                a.estimate.error_bar,
                b.estimate.value,
                b.estimate.error_bar,
            ),
            gap: b.estimate.value - a.estimate.value,
        });
    }
    let strict_count = adjacent
        .iter()
        .filter(|p| p.verdict == ComparisonVerdict::Strict)
        .count();
    let violated_count = adjacent
        .iter()
        .filter(|p| p.verdict == ComparisonVerdict::Violated)
        .count();
    let inconclusive_count = adjacent.len() - strict_count - violated_count;

    let mu2 = estimate_eigenvalue(&tri, DirichletSides::NEUMANN, levels, order, seed)?;
    let mut flat_neumann = Vec::new();
    for key in ["MS", "LS", "LM", "D"] {
        let entry = entries.iter().find(|e| e.key == key).unwrap();
        flat_neumann.push(PairVerdict {
            lhs: "mu2".to_string(),
            rhs: key.to_string(),
            verdict: compare_with_error_bars(
                mu2.value,
                mu2.error_bar,
                entry.estimate.value,
                entry.estimate.error_bar,
            ),
            gap: entry.estimate.value - mu2.value,
        });
    }

    Ok(InequalityChainReport {
        triangle: tri,
        scalene,
        entries,
        adjacent,
        strict_count,
        inconclusive_count,
        violated_count,
        flat_neumann,
        mu2,
        refinement_suggested: inconclusive_count > 0,
    })
}

// ---------------------------------------------------------------------------
// Bessel-based bounds and bisector comparisons
// ---------------------------------------------------------------------------

/// One closed-form-versus-computed comparison; `skipped` carries the reason
/// when the hypothesis of the bound does not hold for this triangle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub lhs_error: f64,
    pub rhs: f64,
    pub rhs_error: f64,
    /// Verdict of `lhs < rhs` under error bars.
    pub verdict: Option<ComparisonVerdict>,
    pub skipped: Option<String>,
}

impl BoundCheck {
    fn strict(name: &str, lhs: f64, lhs_err: f64, rhs: f64, rhs_err: f64) -> Self {
        BoundCheck {
            name: name.to_string(),
            lhs,
            lhs_error: lhs_err,
            rhs,
            rhs_error: rhs_err,
            verdict: Some(compare_with_error_bars(lhs, lhs_err, rhs, rhs_err)),
            skipped: None,
        }
    }

    fn skipped(name: &str, reason: &str) -> Self {
        BoundCheck {
            name: name.to_string(),
            lhs: f64::NAN,
            lhs_error: 0.0,
            rhs: f64::NAN,
            rhs_error: 0.0,
            verdict: None,
            skipped: Some(reason.to_string()),
        }
    }

    pub fn violated(&self) -> bool {
        self.verdict == Some(ComparisonVerdict::Violated)
    }
}

/// Closed-form bounds batch: the diameter upper bound for the second
/// Neumann eigenvalue, the Bessel and height lower bounds for the mixed
/// eigenvalue of the bisector sub-triangle at `z1`, and their comparison
/// consequences under the stated angle hypotheses.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lemma75Report {
    pub triangle: Triangle,
    pub p: Point,
    pub mu2: EigenEstimate,
    pub lambda_sub: EigenEstimate,
    pub checks: Vec<BoundCheck>,
}

impl Lemma75Report {
    pub fn any_violated(&self) -> bool {
        self.checks.iter().any(|c| c.violated())
    }
}

pub fn lemma75_bounds(
    t: &Triangle,
    levels: (u32, u32),
    order: u32,
    seed: u64,
) -> Result<Lemma75Report, SolveError> {
    let (tri, _) = canonicalize(t)?;
    let j01 = j0_first_zero();
    let p = bisector_foot(&tri, 0);
    let mu2 = estimate_eigenvalue(&tri, DirichletSides::NEUMANN, levels, order, seed)?;
    // lambda_1 of triangle (z1, z2, p) with Dirichlet on segment z1 z2.
    let lambda_sub = mixed_eigenvalue_of([tri.z1, tri.z2, p], &[Side::Short], levels, order, seed)?;

    let alpha = tri.angle(0); // at z1
    let beta = tri.angle(1); // at z2
    let gamma = tri.angle(2); // at z3
    let mut checks = Vec::new();

    // Diameter bound: mu2 < (2 j01 / diam)^2, any triangle.
    let diam_bound = (2.0 * j01 / tri.diameter()).powi(2);
    checks.push(BoundCheck::strict(
        "mu2 < (2 j01 / diam)^2",
        mu2.value,
        mu2.error_bar,
        diam_bound,
        0.0,
    ));

    // Bessel radial bound: lambda_sub > (j01 / max(|p z1|, |p z2|))^2.
    let l = p.dist(tri.z1).max(p.dist(tri.z2));
    let radial_bound = (j01 / l).powi(2);
    checks.push(BoundCheck::strict(
        "lambda_sub > (j01 / max|p zi|)^2",
        radial_bound,
        0.0,
        lambda_sub.value,
        lambda_sub.error_bar,
    ));

    // Sector bound at p: lambda_sub > (angle(z1 p z2)/2) j01^2 / area.
    let ang_p = {
        let a = (tri.z1 - p).unit();
        let b = (tri.z2 - p).unit();
        a.dot(b).clamp(-1.0, 1.0).acos()
    };
    let sub_area = 0.5 * ((tri.z2 - tri.z1).cross(p - tri.z1)).abs();
    checks.push(BoundCheck::strict(
        "lambda_sub > sector bound at p",
        cone_bound(ang_p, sub_area),
        0.0,
        lambda_sub.value,
        lambda_sub.error_bar,
    ));

    // Height bound: lambda_sub > (pi / (2 h0))^2 with h0 = |p z2| sin(beta),
    // valid when the angle at z2 is at most pi/2.
    if beta <= PI / 2.0 + 1e-12 {
        let h0 = p.dist(tri.z2) * beta.sin();
        checks.push(BoundCheck::strict(
            "lambda_sub > (pi / 2 h0)^2",
            (PI / (2.0 * h0)).powi(2),
            0.0,
            lambda_sub.value,
            lambda_sub.error_bar,
        ));
    } else {
        checks.push(BoundCheck::skipped(
            "lambda_sub > (pi / 2 h0)^2",
            "angle at z2 exceeds pi/2",
        ));
    }

    // Height upper bound for mu2: mu2 < ((j01 + pi/2) / h)^2 with
    // h = |z3 z2| sin(beta), valid when both base angles at z1 and z2 are
    // at most pi/2.
    if beta <= PI / 2.0 + 1e-12 && alpha <= PI / 2.0 + 1e-12 {
        let h = tri.z3.dist(tri.z2) * beta.sin();
        checks.push(BoundCheck::strict(
            "mu2 < ((j01 + pi/2) / h)^2",
            mu2.value,
            mu2.error_bar,
            ((j01 + PI / 2.0) / h).powi(2),
            0.0,
        ));
    } else {
        checks.push(BoundCheck::skipped(
            "mu2 < ((j01 + pi/2) / h)^2",
            "an angle at z1 or z2 exceeds pi/2",
        ));
    }

    // Acute/right consequence: lambda_sub > mu2 when sin(beta)/sin(gamma)
    // is at least 2 j01 / pi.
    let acute_or_right = alpha <= PI / 2.0 + 1e-12 && beta <= PI / 2.0 + 1e-12;
    if acute_or_right && beta.sin() / gamma.sin() >= 2.0 * j01 / PI {
        checks.push(BoundCheck::strict(
            "lambda_sub > mu2 (sine-ratio case)",
            mu2.value,
            mu2.error_bar,
            lambda_sub.value,
            lambda_sub.error_bar,
        ));
    } else {
        checks.push(BoundCheck::skipped(
            "lambda_sub > mu2 (sine-ratio case)",
            "triangle not acute/right with sine ratio >= 2 j01 / pi",
        ));
    }

    // Obtuse-apex consequence: lambda_sub > mu2 when the angle at z1 is at
    // least pi/2 (the side ordering |z3 z1| >= |z1 z2| holds canonically).
    if alpha >= PI / 2.0 - 1e-12 {
        checks.push(BoundCheck::strict(
            "lambda_sub > mu2 (obtuse-apex case)",
            mu2.value,
            mu2.error_bar,
            lambda_sub.value,
            lambda_sub.error_bar,
        ));
    } else {
        checks.push(BoundCheck::skipped(
            "lambda_sub > mu2 (obtuse-apex case)",
            "angle at z1 below pi/2",
        ));
    }

    Ok(Lemma75Report {
        triangle: tri,
        p,
        mu2,
        lambda_sub,
        checks,
    })
}

/// The bisector comparison: the first mixed eigenvalue of the sub-triangle
/// `z1 z2 p` (Dirichlet on `z1 z2`, `p` the bisector foot from `z1`)
/// exceeds the second Neumann eigenvalue of the full triangle whenever
/// `|z1 z3| >= |z1 z2|`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BisectorComparisonReport {
    pub triangle: Triangle,
    pub p: Point,
    pub hypothesis_met: bool,
    pub mu2: Option<EigenEstimate>,
    pub lambda_mixed: Option<EigenEstimate>,
    /// Verdict of `mu2 < lambda_mixed` under error bars.
    pub verdict: Option<ComparisonVerdict>,
}

pub fn bisector_comparison(
    t: &Triangle,
    levels: (u32, u32),
    order: u32,
    seed: u64,
) -> Result<BisectorComparisonReport, SolveError> {
    let (tri, _) = canonicalize(t)?;
    let p = bisector_foot(&tri, 0);
    // Canonical placement has |z3 z1| >= |z1 z2|; keep the check explicit
    // for non-canonical callers.
    let hypothesis_met = tri.z1.dist(tri.z3) >= tri.z1.dist(tri.z2) - 1e-12 * tri.diameter();
    if !hypothesis_met {
        return Ok(BisectorComparisonReport {
            triangle: tri,
            p,
            hypothesis_met,
            mu2: None,
            lambda_mixed: None,
            verdict: None,
        });
    }
    let mu2 = estimate_eigenvalue(&tri, DirichletSides::NEUMANN, levels, order, seed)?;
    let lambda =
        mixed_eigenvalue_of([tri.z1, tri.z2, p], &[Side::Short], levels, order, seed)?;
    let verdict = compare_with_error_bars(mu2.value, mu2.error_bar, lambda.value, lambda.error_bar);
    Ok(BisectorComparisonReport {
        triangle: tri,
        p,
        hypothesis_met,
        mu2: Some(mu2),
        lambda_mixed: Some(lambda),
        verdict: Some(verdict),
    })
}

/// Bisector split comparison: cutting along the bisector from `z1` to `p`,
/// (i) the second Neumann eigenvalue is at most the larger of the two
/// mixed eigenvalues of the halves (Dirichlet on the cut), and (ii) the
/// half adjacent to the longer of `|z1 z3|`, `|z1 z2|` has the smaller
/// eigenvalue, with equality exactly in the isosceles case.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BisectorSplitReport {
    pub triangle: Triangle,
    pub p: Point,
    pub mu2: EigenEstimate,
    /// Mixed eigenvalue of triangle `z1 p z3` (Dirichlet on `z1 p`).
    pub lambda_half_z3: EigenEstimate,
    /// Mixed eigenvalue of triangle `z1 p z2` (Dirichlet on `z1 p`).
    pub lambda_half_z2: EigenEstimate,
    /// Verdict of `mu2 <= max(half eigenvalues)`; passing means not violated.
    pub upper_bound_verdict: ComparisonVerdict,
    /// Whether `|z1 z3| > |z1 z2|` beyond the side-tie tolerance.
    pub sides_differ: bool,
    /// For differing sides: verdict of `lambda(z1 p z3) < lambda(z1 p z2)`.
    pub ordering_verdict: Option<ComparisonVerdict>,
    /// For tied sides: whether the two halves agree within error bars.
    pub equal_within_bars: Option<bool>,
}

impl BisectorSplitReport {
    pub fn any_violated(&self) -> bool {
        self.upper_bound_verdict == ComparisonVerdict::Violated
            || self.ordering_verdict == Some(ComparisonVerdict::Violated)
            || self.equal_within_bars == Some(false)
    }
}

pub fn bisector_split(
    t: &Triangle,
    levels: (u32, u32),
    order: u32,
    seed: u64,
) -> Result<BisectorSplitReport, SolveError> {
    let (tri, _) = canonicalize(t)?;
    let p = bisector_foot(&tri, 0);
    let mu2 = estimate_eigenvalue(&tri, DirichletSides::NEUMANN, levels, order, seed)?;
    let half_z3 = mixed_eigenvalue_of([tri.z1, p, tri.z3], &[Side::Short], levels, order, seed)?;
    let half_z2 = mixed_eigenvalue_of([tri.z1, p, tri.z2], &[Side::Short], levels, order, seed)?;
    let (max_v, max_e) = if half_z3.value >= half_z2.value {
        (half_z3.value, half_z3.error_bar)
    } else {
        (half_z2.value, half_z2.error_bar)
    };
    let upper = compare_with_error_bars(mu2.value, mu2.error_bar, max_v, max_e);
    let d3 = tri.z1.dist(tri.z3);
    let d2 = tri.z1.dist(tri.z2);
    let sides_differ = (d3 - d2).abs() > 1e-9 * tri.diameter();
    let (ordering, equal) = if sides_differ {
        // Canonically |z1 z3| >= |z1 z2|, so the z3-half must be smaller.
        let v = compare_with_error_bars(
            half_z3.value,
            half_z3.error_bar,
            half_z2.value,
            half_z2.error_bar,
        );
        (Some(v), None)
    } else {
        let agree =
            (half_z3.value - half_z2.value).abs() <= half_z3.error_bar + half_z2.error_bar;
        (None, Some(agree))
    };
    Ok(BisectorSplitReport {
        triangle: tri,
        p,
        mu2,
        lambda_half_z3: half_z3,
        lambda_half_z2: half_z2,
        upper_bound_verdict: upper,
        sides_differ,
        ordering_verdict: ordering,
        equal_within_bars: equal,
    })
}

// ---------------------------------------------------------------------------
// Sheared-family monotonicity
// ---------------------------------------------------------------------------

/// Monotonicity of the first mixed eigenvalue of `T_{a,b}` — the triangle
/// `(0,0), (1,0), (a,b)` with Dirichlet on the side from `(1,0)` to
/// `(a,b)` — which must strictly decrease in `a` on `[0, 1]` for fixed `b`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShearMonotonicityReport {
    pub b: f64,
    pub a_grid: Vec<f64>,
    pub estimates: Vec<EigenEstimate>,
    pub adjacent: Vec<PairVerdict>,
    pub strictly_decreasing: bool,
    pub violated_count: usize,
}

pub fn shear_monotonicity(
    b: f64,
    a_grid: &[f64],
    levels: (u32, u32),
    order: u32,
    seed: u64,
) -> Result<ShearMonotonicityReport, SolveError> {
    let mut estimates = Vec::with_capacity(a_grid.len());
    for &a in a_grid {
        let tri = Triangle::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(a, b))?;
        // Dirichlet on the positional side from vertex 1 to vertex 2.
        let est = estimate_eigenvalue(
            &tri,
            DirichletSides::from_sides(&[Side::Long]),
            levels,
            order,
            seed,
        )?;
        estimates.push(est);
    }
    let mut adjacent = Vec::new();
    for (i, w) in estimates.windows(2).enumerate() {
        // Decreasing: lambda(a_{i+1}) < lambda(a_i).
        adjacent.push(PairVerdict {
            lhs: format!("a={}", a_grid[i + 1]),
            rhs: format!("a={}", a_grid[i]),
            verdict: compare_with_error_bars(
                w[1].value,
                w[1].error_bar,
                w[0].value,
                w[0].error_bar,
            ),
            gap: w[0].value - w[1].value,
        });
    }
    let strictly_decreasing = adjacent
        .iter()
        .all(|p| p.verdict == ComparisonVerdict::Strict);
    let violated_count = adjacent
        .iter()
        .filter(|p| p.verdict == ComparisonVerdict::Violated)
        .count();
    Ok(ShearMonotonicityReport {
        b,
        a_grid: a_grid.to_vec(),
        estimates,
        adjacent,
        strictly_decreasing,
        violated_count,
    })
}

// ---------------------------------------------------------------------------
// Aggregate analytic suite
// ---------------------------------------------------------------------------

/// Everything in this module that needs no finite-element solve: special
/// function values, exact identities, the three scan claims, the region
/// scan, and the change-of-variables consistency between the two forms of
/// the comparison function.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub j01: f64,
    pub j01_reference_dev: f64,
    /// `2 cos(pi/5)` and `2 j01 / pi`; the first must exceed the second.
    pub golden_threshold: (f64, f64),
    pub golden_threshold_holds: bool,
    /// Deviation of `2 cos(pi/5)` from `(sqrt(5)+1)/2`.
    pub golden_closed_form_dev: f64,
    /// Deviation of the sine-ratio infimum `1/(4 sin^2(2 pi/5) - 3)` from
    /// the same golden-ratio constant.
    pub sine_ratio_infimum_dev: f64,
    /// Worst relative difference of `cal_f(tan(beta/2), tan(gamma/2))`
    /// against `f_angles(beta, gamma)` over a validity-region grid.
    pub change_of_variables_max_rel_dev: f64,
    pub identities: IdentityReport,
    pub claim1: Claim1Report,
    pub claim2: Claim2Report,
    pub claim3: Claim3Report,
    pub scan: ScanReport,
    pub pass: bool,
}

pub fn analytic_suite(grid: &ScanGrid) -> AnalyticReport {
    let j01 = j0_first_zero();
    let j01_dev = (j01 - 2.404_825_557_695_773).abs();
    let golden = (2.0 * (PI / 5.0).cos(), 2.0 * j01 / PI);
    let golden_dev = (golden.0 - 0.5 * (5.0f64.sqrt() + 1.0)).abs();
    let sine_ratio_dev =
        (1.0 / (4.0 * (2.0 * PI / 5.0).sin().powi(2) - 3.0) - 0.5 * (5.0f64.sqrt() + 1.0)).abs();

    // Change of variables on a grid of valid angle pairs.
    let mut cov_dev = 0.0f64;
    let n = 40;
    for i in 1..n {
        let beta = PI * (i as f64) / (n as f64);
        for j in 1..n {
            let gamma = (PI - beta - 1e-3) * (j as f64) / (n as f64);
            if gamma <= 1e-3 {
                continue;
            }
            let a = f_angles(beta, gamma);
            let b = cal_f((0.5 * beta).tan(), (0.5 * gamma).tan());
            cov_dev = cov_dev.max((a - b).abs() / a.abs().max(1e-300));
        }
    }

    let identities = exact_identities();
    let claim1 = claim1_scan(128, 128);
    let claim2 = claim2_check(4096);
    let claim3 = claim3_signs(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9], 2001);
    let scan = f_scan(grid);

    let pass = j01_dev <= 1e-12
        && golden.0 > golden.1
        && golden_dev <= 1e-12
        && sine_ratio_dev <= 1e-12
        && cov_dev <= 1e-12
        && identities.pass
        && claim1.pass
        && claim2.pass
        && claim3.pass
        && scan.min > 1.0
        && scan.margin > 0.05;

    AnalyticReport {
        j01,
        j01_reference_dev: j01_dev,
        golden_threshold: golden,
        golden_threshold_holds: golden.0 > golden.1,
        golden_closed_form_dev: golden_dev,
        sine_ratio_infimum_dev: sine_ratio_dev,
        change_of_variables_max_rel_dev: cov_dev,
        identities,
        claim1,
        claim2,
        claim3,
        scan,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn change_of_variables_is_exact_to_rounding() {
        for (beta, gamma) in [
            (1.0, 0.7),
            (2.0, 0.9),
            (0.4, 0.3),
            (1.5, 1.5),
            (2.8, 0.2),
            (PI / 2.0, PI / 3.0),
        ] {
            let a = f_angles(beta, gamma);
            let b = cal_f((0.5 * beta).tan(), (0.5 * gamma).tan());
            assert!(
                ((a - b) / a).abs() < 1e-12,
                "F({beta},{gamma}) = {a} vs tan-half form {b}"
            );
        }
    }

    #[test]
    fn boundary_curve_matches_direct_evaluation() {
        for i in 1..200 {
            let beta = PI / 3.0 + (PI / 6.0) * (i as f64) / 200.0;
            let direct = f_angles(beta, 3.0 * beta - PI);
            let closed = boundary_curve(beta);
            assert!(
                ((direct - closed) / closed).abs() < 1e-10,
                "beta={beta}: {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn claim2_reproduces_its_constant() {
        let rep = claim2_check(2048);
        assert!(rep.pass, "{rep:?}");
        assert!(rep.lower_bound_dev < 1e-9, "dev {}", rep.lower_bound_dev);
        // The constant itself: 25 sqrt(5) pi / (96 sqrt(3)) ~ 1.0562.
        assert!((rep.lower_bound_closed_form - 1.0562).abs() < 5e-4);
        assert!(rep.lower_bound > 1.0);
        // The factor-wise bound is attained by neither factor at the same
        // point, so the true curve minimum sits strictly above it.
        assert!(rep.curve_min_on_grid > rep.lower_bound + 0.1);
    }

    #[test]
    fn golden_ratio_threshold_comparison() {
        let two_cos = 2.0 * (PI / 5.0).cos();
        assert!((two_cos - 0.5 * (5.0f64.sqrt() + 1.0)).abs() < 1e-15);
        let bessel_ratio = 2.0 * j0_first_zero() / PI;
        assert!((bessel_ratio - 1.5309).abs() < 1e-4);
        assert!(two_cos > bessel_ratio);
        // The sine-ratio infimum over the closed sub-interval equals the
        // same golden-ratio constant.
        let inf = 1.0 / (4.0 * (2.0 * PI / 5.0).sin().powi(2) - 3.0);
        assert!((inf - two_cos).abs() < 1e-12);
    }

    #[test]
    fn region_scan_stays_above_threshold() {
        let rep = f_scan(&ScanGrid {
            resolution: 128,
            epsilon: 1e-4,
        });
        assert!(rep.samples > 10_000);
        assert!(rep.min > 1.05, "scan min {} at ({}, {})", rep.min, rep.argmin_beta, rep.argmin_gamma);
    }

    #[test]
    fn claim1_holds_on_grid() {
        let rep = claim1_scan(64, 64);
        assert!(rep.pass, "{rep:?}");
        assert!(rep.min_value > 1.0);
        assert!(rep.min_bound_ratio >= 1.0 - 1e-12);
    }

    #[test]
    fn claim3_sign_pattern_is_unimodal() {
        let rep = claim3_signs(&[0.1, 0.3, 0.5, 0.7, 0.9], 1001);
        assert!(rep.pass, "{rep:?}");
        for (k, &t) in rep.t_values.iter().enumerate() {
            assert!(rep.starts_increasing[k], "t={t} starts decreasing");
            assert!(rep.sign_changes[k] <= 1, "t={t}: {} changes", rep.sign_changes[k]);
        }
    }

    #[test]
    fn exact_identities_certify_positivity() {
        let rep = exact_identities();
        assert!(rep.certificate_matches);
        assert!(rep.certificate_mismatch_index.is_none());
        assert!(rep.quartic_integer_form_matches);
        assert!(rep.quartic_factorization_max_dev < 1e-12);
        assert!(rep.pass);
        // The sum as printed in the source text does not reproduce the
        // target (transcription error); the corrected certificate does.
        assert!(!rep.printed_sum_matches);
        assert!(!rep.printed_difference.is_empty());
        // Spot values of the target itself.
        let x = IntPoly::x();
        let one = IntPoly::constant(1);
        let target = one
            .add(&x)
            .pow(4)
            .mul(&one.add(&x.pow(2)).pow(3))
            .sub(&one.sub(&x).pow(2).mul(&x.pow(4)).scale(512));
        assert_eq!(target.eval_i128(0), 1);
        assert_eq!(target.eval_i128(1), 128);
    }

    #[test]
    fn cone_bound_scaling_and_reference_value() {
        let j01 = j0_first_zero();
        let b = cone_bound(PI / 2.0, 1.0);
        assert!((b - 0.25 * PI * j01 * j01).abs() < 1e-12);
        assert!((b - 4.542).abs() < 2e-3);
        // Doubling the area halves the bound.
        assert!((cone_bound(1.3, 2.0) - 0.5 * cone_bound(1.3, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn sector_triangle_approaches_cone_bound() {
        // A thin isosceles wedge with Dirichlet on the chord approximates
        // the circular sector, where the bound is attained exactly.
        let alpha = 0.3f64;
        let tri = Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(alpha.cos(), alpha.sin()),
        )
        .unwrap();
        let est = estimate_eigenvalue(
            &tri,
            DirichletSides::from_sides(&[Side::Long]),
            (3, 5),
            2,
            0x5EED,
        )
        .unwrap();
        let floor = cone_bound(alpha, tri.area());
        let ratio = est.value / floor;
        assert!(ratio > 1.0 - 1e-9, "ratio {ratio}");
        assert!(ratio < 1.05, "ratio {ratio}");
    }

    #[test]
    fn chain_is_strict_for_a_scalene_triangle() {
        let t = Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.3, 0.9),
        )
        .unwrap();
        let rep = chain(&t, (3, 5), 2, 0x5EED).unwrap();
        assert!(rep.scalene);
        assert_eq!(rep.entries.len(), 7);
        assert_eq!(rep.adjacent.len(), 6);
        assert_eq!(rep.violated_count, 0, "{:#?}", rep.adjacent);
        assert_eq!(
            rep.strict_count, 6,
            "expected all strict at these levels: {:#?}",
            rep.adjacent
        );
        for e in &rep.entries {
            assert_ne!(
                e.cone_verdict,
                ComparisonVerdict::Violated,
                "{} below its sector floor",
                e.key
            );
        }
        for fv in &rep.flat_neumann {
            assert_ne!(fv.verdict, ComparisonVerdict::Violated, "{fv:?}");
        }
    }

    #[test]
    fn chain_of_equilateral_has_symmetric_ties() {
        let t = Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 0.5 * 3.0f64.sqrt()),
        )
        .unwrap();
        let rep = chain(&t, (3, 5), 2, 0x5EED).unwrap();
        assert!(!rep.scalene);
        // Single-side eigenvalues agree within bars.
        let (s, m, l) = (
            &rep.entries[0].estimate,
            &rep.entries[1].estimate,
            &rep.entries[2].estimate,
        );
        assert!((s.value - m.value).abs() <= s.error_bar + m.error_bar + 1e-9 * s.value);
        assert!((m.value - l.value).abs() <= m.error_bar + l.error_bar + 1e-9 * m.value);
        assert_eq!(rep.violated_count, 0);
    }

    #[test]
    fn chain_right_isosceles_hypotenuse_value() {
        // Legs 1: Dirichlet on the hypotenuse gives exactly pi^2.
        let t = Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        )
        .unwrap();
        let rep = chain(&t, (3, 5), 2, 0x5EED).unwrap();
        let l = rep.entries.iter().find(|e| e.key == "L").unwrap();
        assert!(
            (l.estimate.value - PI * PI).abs() < 1e-5 * PI * PI,
            "lambda_L = {}",
            l.estimate.value
        );
    }

    #[test]
    fn bisector_comparison_is_strict_for_samples() {
        for (cx, cy) in [(0.3, 0.9), (0.5, 0.5 * 3.0f64.sqrt())] {
            let t = Triangle::new(
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(cx, cy),
            )
            .unwrap();
            let rep = bisector_comparison(&t, (3, 5), 2, 0x5EED).unwrap();
            assert!(rep.hypothesis_met);
            assert_eq!(
                rep.verdict,
                Some(ComparisonVerdict::Strict),
                "triangle ({cx},{cy}): {:?} vs {:?}",
                rep.mu2,
                rep.lambda_mixed
            );
        }
    }

    #[test]
    fn bisector_split_ordering_follows_side_lengths() {
        let t = Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.3, 0.9),
        )
        .unwrap();
        let rep = bisector_split(&t, (3, 5), 2, 0x5EED).unwrap();
        assert!(rep.sides_differ);
        assert_eq!(rep.ordering_verdict, Some(ComparisonVerdict::Strict), "{rep:?}");
        assert_ne!(rep.upper_bound_verdict, ComparisonVerdict::Violated);
        assert!(!rep.any_violated());
    }

    #[test]
    fn bisector_split_is_symmetric_for_isosceles() {
        // The halves are mirror images when the two sides adjacent to the
        // canonical z1 are equal, i.e. the shortest two sides tie: a wide
        // isosceles (equal legs 1, base 1.4).
        let t = Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(1.4, 0.0),
            Point::new(0.7, 0.51f64.sqrt()),
        )
        .unwrap();
        let (tri, _) = canonicalize(&t).unwrap();
        // Sanity: canonical z1 is the apex (equal adjacent sides).
        let d3 = tri.z1.dist(tri.z3);
        let d2 = tri.z1.dist(tri.z2);
        assert!((d3 - d2).abs() < 1e-12 * tri.diameter());
        let rep = bisector_split(&t, (3, 5), 2, 0x5EED).unwrap();
        assert!(!rep.sides_differ);
        assert_eq!(rep.equal_within_bars, Some(true), "{rep:?}");
        assert!(!rep.any_violated());
    }

    #[test]
    fn closed_form_bounds_hold_for_half_equilateral() {
        let t = Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 3.0f64.sqrt()),
        )
        .unwrap();
        let rep = lemma75_bounds(&t, (3, 5), 2, 0x5EED).unwrap();
        assert!(!rep.any_violated(), "{:#?}", rep.checks);
        // Diameter 2: bound (2 j01 / 2)^2 ~ 5.783 above mu2 = 4 pi^2 / 9.
        let diam_check = &rep.checks[0];
        assert!((diam_check.rhs - j0_first_zero().powi(2)).abs() < 1e-12);
        assert!((rep.mu2.value - 4.0 * PI * PI / 9.0).abs() < 1e-4);
        // Height-bound hypotheses hold for this right triangle, so no skips
        // there; the obtuse-apex consequence is skipped (apex is right).
        assert!(rep.checks[3].skipped.is_none());
        assert!(rep.checks[4].skipped.is_none());
    }

    #[test]
    fn closed_form_bounds_skip_reports_for_obtuse() {
        let t = Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.2, 0.25),
        )
        .unwrap();
        let (tri, _) = canonicalize(&t).unwrap();
        assert!(tri.angle(0) > PI / 2.0);
        let rep = lemma75_bounds(&t, (3, 5), 2, 0x5EED).unwrap();
        assert!(!rep.any_violated(), "{:#?}", rep.checks);
        // The two-acute-base-angles bound must be skipped, and the
        // obtuse-apex comparison must run (and not be violated).
        assert!(rep.checks[4].skipped.is_some());
        assert!(rep.checks[5].skipped.is_some()); // sine-ratio needs acute/right
        assert!(rep.checks[6].skipped.is_none());
    }

    #[test]
    fn shear_family_eigenvalue_decreases() {
        let rep = shear_monotonicity(1.0, &[0.0, 0.25, 0.5, 0.75, 1.0], (3, 5), 2, 0x5EED).unwrap();
        assert!(rep.strictly_decreasing, "{:#?}", rep.adjacent);
        assert_eq!(rep.violated_count, 0);
        for w in rep.estimates.windows(2) {
            assert!(w[1].value < w[0].value);
        }
    }

    #[test]
    fn analytic_suite_passes_quickly() {
        let start = std::time::Instant::now();
        let rep = analytic_suite(&ScanGrid {
            resolution: 256,
            epsilon: 1e-4,
        });
        assert!(rep.pass, "failed analytic suite: j01_dev={}, cov={}, id={:?}, c1={}, c2={}, c3={}, scan_min={}",
            rep.j01_reference_dev, rep.change_of_variables_max_rel_dev, rep.identities.pass,
            rep.claim1.pass, rep.claim2.pass, rep.claim3.pass, rep.scan.min);
        assert!(start.elapsed().as_secs_f64() < 10.0);
    }
}
