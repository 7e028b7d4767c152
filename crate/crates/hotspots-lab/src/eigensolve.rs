//! Generalized eigensolver for `K u = lambda M u` and mesh-refinement
//! extrapolation.
//!
//! The solver is shift-invert Lanczos in the `M` inner product with full
//! reorthogonalization:
//! * factor `A = K - sigma M` once with banded Cholesky (`sigma < 0` for
//!   Neumann problems, where `K` is only semidefinite; `sigma = 0` for mixed
//!   problems, where `K` is definite);
//! * run Lanczos on `A^{-1} M`, whose eigenvalues `1/(lambda - sigma)` put
//!   the smallest `lambda` first;
//! * deflate the constant mode explicitly for Neumann problems, lock
//!   converged Ritz vectors, and restart with a fresh random vector until the
//!   requested count converges — restarts are what pick up multiple
//!   eigenvalues (a single Krylov sequence only ever finds one vector per
//!   eigenvalue cluster).
//!
//! Every returned pair carries an explicit residual
//! `||K x - lambda M x||_2 / ||x||_M`, checked against
//! `1e-9 * max(lambda, 1)` — an absolute floor of 1e-9 near zero.

use crate::assembly::{assemble, AssembledSystem, AssemblyError, DirichletSides};
use crate::geometry::{GeometryError, Triangle};
use crate::linalg::{axpy, dot, jacobi_eigen, norm2, BandMatrix, LinalgError};
use crate::meshing::{uniform_mesh, Mesh, MeshError};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Default RNG seed for starting vectors (any fixed value works; this one is
/// easy to spot in configs).
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Relative residual target for accepted eigenpairs.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error("factorization failed for every shift tried: {0}")]
    Factorization(#[from] LinalgError),
    #[error("eigensolver did not reach residual tolerance: worst residual {worst:.3e} for eigenvalue {value:.6}")]
    NotConverged { value: f64, worst: f64 },
    #[error("requested {requested} eigenpairs but the reduced system has only {available} dofs")]
    TooFewDofs { requested: usize, available: usize },
}

/// One converged eigenpair on a given mesh. `values` holds the eigenfunction
/// coefficients at *all* mesh nodes (Dirichlet nodes hold 0); the vector is
/// M-normalized.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolvedMode {
    pub eigenvalue: f64,
    pub residual: f64,
    pub values: Vec<f64>,
}

/// Smallest eigenpairs of the reduced system. For all-Neumann systems the
/// zero eigenvalue (constant mode) is deflated away and *not* returned: the
/// first returned pair is the first nonconstant mode.
pub fn smallest_eigenpairs(
    sys: &AssembledSystem,
    num: usize,
    deflate_constant: bool,
    shift_scale: f64,
    seed: u64,
) -> Result<Vec<(f64, Vec<f64>, f64)>, SolveError> {
    let k = &sys.stiffness;
    let m = &sys.mass;
    let n = k.n;
    let reserved = if deflate_constant { 1 } else { 0 };
    if num + reserved > n {
        return Err(SolveError::TooFewDofs {
            requested: num,
            available: n.saturating_sub(reserved),
        });
    }

    // Shift: strictly negative for semidefinite K, zero otherwise. Retry
    // with progressively more negative shifts if the factorization stumbles.
    let base = if deflate_constant { -shift_scale } else { 0.0 };
    let mut factored: Option<(BandMatrix, f64)> = None;
    let mut last_err: Option<LinalgError> = None;
    for attempt in 0..4 {
        let sigma = if attempt == 0 {
            base
        } else {
            base - shift_scale * (10.0f64).powi(attempt)
        };
        let mut band = BandMatrix::from_shifted(k, m, -sigma)?;
        match band.cholesky() {
            Ok(()) => {
                factored = Some((band, sigma));
                break;
            }
            Err(e) => last_err = Some(e),
        }
    }
    let (chol, _sigma) = match factored {
        Some(f) => f,
        None => return Err(SolveError::Factorization(last_err.unwrap())),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m_norm = |x: &[f64]| m.quadratic_form(x, x).max(0.0).sqrt();

    // Deflation space: M-orthonormal basis of vectors to keep out of the
    // Krylov space (the constant mode, then locked converged vectors).
    let mut deflation: Vec<Vec<f64>> = Vec::new();
    let mut deflation_m: Vec<Vec<f64>> = Vec::new(); // cached M * basis vector
    let push_deflated = |v: Vec<f64>, deflation: &mut Vec<Vec<f64>>, deflation_m: &mut Vec<Vec<f64>>| {
        let mut mv = vec![0.0; n];
        m.matvec(&v, &mut mv);
        deflation.push(v);
        deflation_m.push(mv);
    };
    if deflate_constant {
        let c = vec![1.0; n];
        let nc = m_norm(&c);
        push_deflated(
            c.into_iter().map(|x| x / nc).collect(),
            &mut deflation,
            &mut deflation_m,
        );
    }

    // M-orthogonalize `w` against the deflation space (two passes).
    let orth_deflation = |w: &mut [f64], deflation: &[Vec<f64>], deflation_m: &[Vec<f64>]| {
        for _ in 0..2 {
            for (v, mv) in deflation.iter().zip(deflation_m.iter()) {
                let c = dot(w, mv);
                axpy(-c, v, w);
            }
        }
    };

    let mut locked: Vec<(f64, Vec<f64>, f64)> = Vec::new(); // (lambda, x, residual)
    let steps = n.min(40.max(2 * num + 30));

    for _round in 0..8 {
        if locked.len() >= num {
            break;
        }
        // Fresh random start, deflated and normalized.
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        orth_deflation(&mut v, &deflation, &deflation_m);
        let nv = m_norm(&v);
        if nv < 1e-300 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= nv;
        }

        let mut basis: Vec<Vec<f64>> = vec![v];
        let mut basis_m: Vec<Vec<f64>> = {
            let mut mv = vec![0.0; n];
            m.matvec(&basis[0], &mut mv);
            vec![mv]
        };
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();

        for j in 0..steps {
            // w = A^{-1} (M v_j)
            let mut w = chol.solve(&basis_m[j]);
            // Deflate, then full M-reorthogonalization against the basis.
            orth_deflation(&mut w, &deflation, &deflation_m);
            let alpha = dot(&w, &basis_m[j]);
            for _pass in 0..2 {
                for (vb, mvb) in basis.iter().zip(basis_m.iter()) {
                    let c = dot(&w, mvb);
                    axpy(-c, vb, &mut w);
                }
            }
            alphas.push(alpha);
            let beta = m_norm(&w);
            if j + 1 == steps || beta < 1e-13 * (1.0 + alpha.abs()) {
                break; // Krylov space exhausted (invariant subspace found)
            }
            betas.push(beta);
            for x in w.iter_mut() {
                *x /= beta;
            }
            let mut mw = vec![0.0; n];
            m.matvec(&w, &mut mw);
            basis.push(w);
            basis_m.push(mw);
        }

        // Ritz pairs of the tridiagonal projection.
        let t_dim = alphas.len();
        if t_dim == 0 {
            continue;
        }
        let mut t = vec![0.0; t_dim * t_dim];
        for i in 0..t_dim {
            t[i * t_dim + i] = alphas[i];
            if i + 1 < t_dim {
                t[i * t_dim + (i + 1)] = betas[i];
                t[(i + 1) * t_dim + i] = betas[i];
            }
        }
        let (theta, y) = jacobi_eigen(&t, t_dim);

        // Largest theta corresponds to the smallest lambda = sigma + 1/theta.
        let mut order: Vec<usize> = (0..t_dim).collect();
        order.sort_by(|&a, &b| theta[b].total_cmp(&theta[a]));
        for &col in order.iter().take(num - locked.len() + 2) {
            if locked.len() >= num {
                break;
            }
            let th = theta[col];
            if th <= 0.0 {
                continue; // spurious: A^{-1}M is positive definite on the deflated space
            }
            // Assemble the Ritz vector x = V y_col.
            let mut x = vec![0.0; n];
            for (i, vb) in basis.iter().enumerate() {
                axpy(y[i * t_dim + col], vb, &mut x);
            }
            orth_deflation(&mut x, &deflation, &deflation_m);
            let nx = m_norm(&x);
            if nx < 1e-12 {
                continue;
            }
            for xi in x.iter_mut() {
                *xi /= nx;
            }
            // Rayleigh quotient and explicit residual.
            let lambda = k.quadratic_form(&x, &x);
            let mut r = vec![0.0; n];
            k.matvec(&x, &mut r);
            let mut mx = vec![0.0; n];
            m.matvec(&x, &mut mx);
            axpy(-lambda, &mx, &mut r);
            let res = norm2(&r);
            if res <= RESIDUAL_TOL * lambda.abs().max(1.0) {
                push_deflated(x.clone(), &mut deflation, &mut deflation_m);
                locked.push((lambda, x, res));
            }
        }
    }

    if locked.len() < num {
        let worst = locked
            .iter()
            .map(|(_, _, r)| *r)
            .fold(f64::INFINITY, f64::min);
        return Err(SolveError::NotConverged {
            value: locked.last().map(|(l, _, _)| *l).unwrap_or(f64::NAN),
            worst: if worst.is_finite() { worst } else { f64::NAN },
        });
    }
    locked.sort_by(|a, b| a.0.total_cmp(&b.0));
    locked.truncate(num);
    Ok(locked)
}

/// High-level driver: mesh the triangle, assemble with the given boundary
/// conditions, and return the smallest `num` modes with full-node
/// coefficient vectors. For all-Neumann problems the constant mode is
/// deflated, so the first returned mode is the first nonconstant one.
pub fn solve_modes(
    triangle: &Triangle,
    level: u32,
    order: u32,
    bc: DirichletSides,
    num: usize,
    seed: u64,
) -> Result<(Mesh, Vec<SolvedMode>), SolveError> {
    let mesh = uniform_mesh(triangle, level, order)?;
    let sys = assemble(&mesh, bc)?;
    let neumann = bc.is_all_neumann();
    // Shift scale ~ a crude lower-bound for the first nonzero eigenvalue:
    // convex-domain bound pi^2 / diam^2, halved for slack.
    let shift_scale = 0.5 * std::f64::consts::PI.powi(2) / triangle.diameter().powi(2);
    let pairs = smallest_eigenpairs(&sys, num, neumann, shift_scale, seed)?;
    let modes = pairs
        .into_iter()
        .map(|(lambda, x, res)| SolvedMode {
            eigenvalue: lambda,
            residual: res,
            values: sys.expand(&x),
        })
        .collect();
    Ok((mesh, modes))
}

/// Result of a mesh-refinement (Richardson) study of one scalar quantity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RefinementEstimate {
    /// Raw values per level, coarsest first.
    pub values: Vec<f64>,
    /// Observed convergence order from the last three levels, when the
    /// successive differences have a consistent sign.
    pub observed_order: Option<f64>,
    /// Extrapolated limit; `None` when the sequence is non-monotone (no
    /// blind extrapolation from unsettled data).
    pub extrapolated: Option<f64>,
    /// Conservative error bar: `3 |extrapolated - finest value|`.
    pub error_bar: Option<f64>,
    /// Whether the difference sequence had consistent sign.
    pub monotone: bool,
    /// Whether the observed order lies within the expected window.
    pub order_in_window: Option<bool>,
}

/// Richardson extrapolation on a refinement sequence (mesh size halving per
/// step). `goal_order` is the theoretical convergence order (2 for P1
/// eigenvalues, 4 for P2); `window` the allowed deviation.
pub fn richardson(values: &[f64], goal_order: f64, window: f64) -> RefinementEstimate {
    if values.len() < 3 {
        return RefinementEstimate {
            values: values.to_vec(),
            observed_order: None,
            extrapolated: None,
            error_bar: None,
            monotone: false,
            order_in_window: None,
        };
    }
    let k = values.len();
    let d1 = values[k - 2] - values[k - 3];
    let d2 = values[k - 1] - values[k - 2];
    // Consistent sign and genuine decay are required before extrapolating.
    let monotone = d1 * d2 > 0.0 && d2.abs() < d1.abs();
    if !monotone {
        return RefinementEstimate {
            values: values.to_vec(),
            observed_order: None,
            extrapolated: None,
            error_bar: None,
            monotone: false,
            order_in_window: None,
        };
    }
    let p = (d1 / d2).abs().log2();
    let factor = (2.0f64).powf(p) - 1.0;
    let extrapolated = values[k - 1] + d2 / factor;
    let error_bar = 3.0 * (extrapolated - values[k - 1]).abs();
    RefinementEstimate {
        values: values.to_vec(),
        observed_order: Some(p),
        extrapolated: Some(extrapolated),
        error_bar: Some(error_bar),
        monotone: true,
        order_in_window: Some((p - goal_order).abs() <= window),
    }
}

/// Verdict when comparing two quantities `a < b` that carry error bars.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonVerdict {
    /// `a + err_a < b - err_b`: the inequality holds beyond the error bars.
    Strict,
    /// Error bars overlap: no conclusion either way.
    Inconclusive,
    /// `a - err_a > b + err_b`: the inequality fails beyond the error bars.
    Violated,
}

pub fn compare_with_error_bars(a: f64, err_a: f64, b: f64, err_b: f64) -> ComparisonVerdict {
    if a + err_a < b - err_b {
        ComparisonVerdict::Strict
    } else if a - err_a > b + err_b {
        ComparisonVerdict::Violated
    } else {
        ComparisonVerdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use std::f64::consts::PI;

    fn tri(ax: f64, ay: f64, bx: f64, by: f64, cx: f64, cy: f64) -> Triangle {
        Triangle::new(
            Point::new(ax, ay),
            Point::new(bx, by),
            Point::new(cx, cy),
        )
        .unwrap()
    }

    #[test]
    fn neumann_right_isosceles_matches_closed_form() {
        // Unit right isosceles: first nonconstant Neumann eigenvalue is pi^2
        // (mode cos(pi x) - cos(pi y)), the next is 2 pi^2.
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.0, 1.0);
        let (_, modes) = solve_modes(&t, 5, 2, DirichletSides::NEUMANN, 2, DEFAULT_SEED).unwrap();
        assert!(
            (modes[0].eigenvalue - PI * PI).abs() < 1e-5 * PI * PI,
            "mu2 = {}, want pi^2 = {}",
            modes[0].eigenvalue,
            PI * PI
        );
        assert!(
            (modes[1].eigenvalue - 2.0 * PI * PI).abs() < 1e-4 * PI * PI,
            "mu3 = {}",
            modes[1].eigenvalue
        );
        for m in &modes {
            assert!(m.residual <= RESIDUAL_TOL * m.eigenvalue.max(1.0));
        }
    }

    #[test]
    fn neumann_half_equilateral_matches_closed_form() {
        // (0,0), (1,0), (0, sqrt3): mu2 = 4 pi^2 / 9.
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.0, 3.0f64.sqrt());
        let (_, modes) = solve_modes(&t, 5, 2, DirichletSides::NEUMANN, 1, DEFAULT_SEED).unwrap();
        let want = 4.0 * PI * PI / 9.0;
        assert!(
            (modes[0].eigenvalue - want).abs() < 1e-5 * want,
            "mu2 = {}, want {}",
            modes[0].eigenvalue,
            want
        );
    }

    #[test]
    fn equilateral_double_eigenvalue_is_found_twice() {
        // Equilateral side 1: mu2 = mu3 = 16 pi^2 / 9, an exact double
        // eigenvalue; restart-with-deflation must find both copies.
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.5, 3.0f64.sqrt() / 2.0);
        let (_, modes) = solve_modes(&t, 5, 2, DirichletSides::NEUMANN, 2, DEFAULT_SEED).unwrap();
        let want = 16.0 * PI * PI / 9.0;
        for m in &modes {
            assert!(
                (m.eigenvalue - want).abs() < 1e-5 * want,
                "eigenvalue {} vs {}",
                m.eigenvalue,
                want
            );
        }
        // The discrete mesh preserves the symmetry, so the two discrete
        // eigenvalues agree far beyond the discretization error.
        assert!((modes[0].eigenvalue - modes[1].eigenvalue).abs() < 1e-8 * want);
    }

    #[test]
    fn mixed_dirichlet_hypotenuse_matches_closed_form() {
        // Unit right isosceles, Dirichlet on the hypotenuse (positional side
        // z2 z3): lambda_1 = pi^2, mode cos(pi x) + cos(pi y).
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.0, 1.0);
        let bc = DirichletSides::parse("L").unwrap();
        let (_, modes) = solve_modes(&t, 5, 2, bc, 1, DEFAULT_SEED).unwrap();
        assert!(
            (modes[0].eigenvalue - PI * PI).abs() < 1e-5 * PI * PI,
            "lambda = {}",
            modes[0].eigenvalue
        );
    }

    #[test]
    fn full_dirichlet_right_isosceles_matches_closed_form() {
        // lambda_1 = 5 pi^2 for the unit right isosceles (fold of the square).
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.0, 1.0);
        let (_, modes) = solve_modes(&t, 5, 2, DirichletSides::ALL, 1, DEFAULT_SEED).unwrap();
        let want = 5.0 * PI * PI;
        assert!(
            (modes[0].eigenvalue - want).abs() < 2e-5 * want,
            "lambda = {}",
            modes[0].eigenvalue
        );
    }

    #[test]
    fn p1_converges_from_above_at_order_two() {
        // P1 Rayleigh–Ritz overestimates eigenvalues; order ~ 2.
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.0, 1.0);
        let mut values = Vec::new();
        for level in 3..=6 {
            let (_, modes) =
                solve_modes(&t, level, 1, DirichletSides::NEUMANN, 1, DEFAULT_SEED).unwrap();
            values.push(modes[0].eigenvalue);
        }
        let est = richardson(&values, 2.0, 0.3);
        assert!(est.monotone);
        assert_eq!(est.order_in_window, Some(true), "order {:?}", est.observed_order);
        let want = PI * PI;
        assert!((est.extrapolated.unwrap() - want).abs() < 1e-4 * want);
        for w in values.windows(2) {
            assert!(w[1] < w[0], "P1 values should decrease toward the limit");
        }
        assert!(values[0] > want, "P1 overestimates");
    }

    #[test]
    fn richardson_recovers_geometric_sequence_exactly() {
        // v_k = 7 + 3 * 4^{-k}: observed order 2, limit 7.
        let values: Vec<f64> = (0..5).map(|k| 7.0 + 3.0 * 0.25f64.powi(k)).collect();
        let est = richardson(&values, 2.0, 0.3);
        assert!(est.monotone);
        assert!((est.observed_order.unwrap() - 2.0).abs() < 1e-9);
        assert!((est.extrapolated.unwrap() - 7.0).abs() < 1e-12);
        assert_eq!(est.order_in_window, Some(true));
    }

    #[test]
    fn richardson_flags_non_monotone_sequences() {
        let est = richardson(&[1.0, 1.5, 1.2], 2.0, 0.3);
        assert!(!est.monotone);
        assert!(est.extrapolated.is_none());
        assert!(est.error_bar.is_none());
        // Too few values likewise.
        let est2 = richardson(&[1.0, 1.1], 2.0, 0.3);
        assert!(est2.extrapolated.is_none());
    }

    #[test]
    fn comparison_verdicts() {
        use ComparisonVerdict::*;
        assert_eq!(compare_with_error_bars(1.0, 0.1, 2.0, 0.1), Strict);
        assert_eq!(compare_with_error_bars(1.0, 0.6, 2.0, 0.6), Inconclusive);
        assert_eq!(compare_with_error_bars(2.0, 0.1, 1.0, 0.1), Violated);
        // A violated ordering is never reported as strict merely because the
        // bars are big.
        assert_eq!(compare_with_error_bars(2.0, 5.0, 1.0, 5.0), Inconclusive);
    }

    #[test]
    fn determinism_same_seed_same_bits() {
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.3, 0.9);
        let (_, a) = solve_modes(&t, 4, 2, DirichletSides::NEUMANN, 2, DEFAULT_SEED).unwrap();
        let (_, b) = solve_modes(&t, 4, 2, DirichletSides::NEUMANN, 2, DEFAULT_SEED).unwrap();
        assert_eq!(a[0].eigenvalue.to_bits(), b[0].eigenvalue.to_bits());
        assert_eq!(a[1].eigenvalue.to_bits(), b[1].eigenvalue.to_bits());
        for (x, y) in a[0].values.iter().zip(b[0].values.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn too_few_dofs_is_reported() {
        let t = tri(0.0, 0.0, 1.0, 0.0, 0.0, 1.0);
        let mesh = uniform_mesh(&t, 1, 1).unwrap();
        let sys = assemble(&mesh, DirichletSides::parse("S").unwrap()).unwrap();
        assert!(matches!(
            smallest_eigenpairs(&sys, 10, false, 1.0, DEFAULT_SEED),
            Err(SolveError::TooFewDofs { .. })
        ));
    }
}
