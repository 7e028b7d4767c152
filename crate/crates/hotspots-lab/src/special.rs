//! Bessel functions `J0`, `J1` and the first positive zero of `J0`.
//!
//! Eigenvalue bounds for cones and circular sectors need `J0`'s first zero
//! and occasional point evaluations of `J0`/`J1`; nothing else from the
//! Bessel family is used, so the two functions are implemented directly:
//!
//! * `|x| <= 16`: the ascending power series, accumulated in double-double
//!   arithmetic. The alternating terms grow to ~2e5 before decaying at
//!   `x = 16`, which would cost ~10 digits in plain f64; the ~32-digit
//!   double-double accumulator absorbs that cancellation and returns a value
//!   correct to f64 round-off over the whole branch.
//! * `x > 16`: the Hankel asymptotic expansion. Its smallest term at `x = 16`
//!   is ~1e-14 and shrinks rapidly for larger `x`, so truncating at the
//!   smallest term keeps the absolute error at or below 1e-14 everywhere the
//!   branch is used. The phase `x - pi/4` is carried as a two-term sum so
//!   large arguments do not lose absolute accuracy to subtraction rounding.
//!
//! The split point balances the two branches so the absolute error stays
//! ≤ 1e-14 uniformly; the tests pin both branches against externally
//! computed 50-digit references, including points that straddle the split.

/// Double-double value: an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
/// giving roughly 32 significant digits.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

/// Error-free sum: returns `(s, e)` with `s = fl(a+b)` and `a + b = s + e`.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free product via FMA: `a * b = p + e` exactly.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl Dd {
    #[inline]
    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    fn value(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    fn mul_f64(self, s: f64) -> Dd {
        let (p, e) = two_prod(self.hi, s);
        let e = e + self.lo * s;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    /// Division by an exact f64 (one Newton correction on the f64 quotient).
    #[inline]
    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let r = ((self.hi - p) - e) + self.lo;
        let q2 = r / d;
        let (hi, lo) = two_sum(q1, q2);
        Dd { hi, lo }
    }
}

/// Split point between the power-series and asymptotic branches.
const SERIES_ASYMPTOTIC_SPLIT: f64 = 16.0;

/// `pi/4` as a two-term sum (`hi + lo` accurate to ~1e-33).
const PI_4_HI: f64 = 0.7853981633974483;
const PI_4_LO: f64 = 3.061616997868383e-17;

/// Ascending series for `J0` in double-double arithmetic.
fn j0_series(x: f64) -> f64 {
    let (q_hi, q_lo) = two_prod(x, x);
    let q = Dd { hi: q_hi, lo: q_lo }.div_f64(4.0); // x^2 / 4
    let mut term = Dd::from(1.0);
    let mut sum = Dd::from(1.0);
    for k in 1..200u32 {
        let kk = (k as f64) * (k as f64);
        term = term.mul(q).div_f64(-kk);
        sum = sum.add(term);
        if term.hi.abs() < 1e-40 {
            break;
        }
    }
    sum.value()
}

/// Ascending series for `J1` in double-double arithmetic.
fn j1_series(x: f64) -> f64 {
    let (q_hi, q_lo) = two_prod(x, x);
    let q = Dd { hi: q_hi, lo: q_lo }.div_f64(4.0);
    let mut term = Dd::from(1.0);
    let mut sum = Dd::from(1.0);
    for k in 1..200u32 {
        let d = (k as f64) * ((k + 1) as f64);
        term = term.mul(q).div_f64(-d);
        sum = sum.add(term);
        if term.hi.abs() < 1e-40 {
            break;
        }
    }
    sum.mul_f64(0.5 * x).value()
}

/// Hankel asymptotic expansion for `J_nu`, `nu` in {0, 1}, truncated at the
/// smallest term. `omega = x - (2 nu + 1) pi / 4` is evaluated as a two-term
/// sum so the phase keeps full absolute accuracy for large `x`.
fn j_asymptotic(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    // Even-index terms multiply cos(omega), odd-index terms sin(omega):
    //   J_nu ~ sqrt(2/(pi x)) [ cos(omega) * P(x) - sin(omega) * Q(x) ]
    // with P = sum (-1)^k a_{2k} / x^{2k}, Q = sum (-1)^k a_{2k+1} / x^{2k+1},
    // a_k = a_{k-1} (mu - (2k-1)^2) / (8k).
    let mut p = 0.0f64;
    let mut q = 0.0f64;
    let mut a = 1.0f64; // a_k / x^k, running value
    let mut prev = f64::MAX;
    for k in 0..60u32 {
        if k > 0 {
            let m = (2 * k - 1) as f64;
            a *= (mu - m * m) / (8.0 * k as f64 * x);
            if a.abs() >= prev {
                break; // smallest term reached; stop before divergence
            }
        }
        prev = a.abs();
        let signed = if (k / 2) % 2 == 0 { a } else { -a };
        if k % 2 == 0 {
            p += signed;
        } else {
            q += signed;
        }
    }
    // omega = x - (2 nu + 1) pi/4, kept as hi + lo.
    let c = (2 * nu + 1) as f64;
    let (omega_hi, e) = two_sum(x, -c * PI_4_HI);
    let omega_lo = e - c * PI_4_LO;
    let (s, co) = omega_hi.sin_cos();
    // First-order phase correction: trig of (hi + lo).
    let cos_omega = co - s * omega_lo;
    let sin_omega = s + co * omega_lo;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (cos_omega * p - sin_omega * q)
}

/// Bessel function of the first kind, order 0. Absolute error ≤ 1e-14 for
/// all finite `x` arising here (|x| up to ~1e3).
pub fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= SERIES_ASYMPTOTIC_SPLIT {
        j0_series(ax)
    } else {
        j_asymptotic(0, ax)
    }
}

/// Bessel function of the first kind, order 1 (odd in `x`). Absolute error
/// ≤ 1e-14 for |x| up to ~1e3.
pub fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_ASYMPTOTIC_SPLIT {
        j1_series(ax)
    } else {
        j_asymptotic(1, ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// First positive zero of `J0`, computed by Newton iteration
/// (`J0' = -J1`) from a seed accurate to 1e-15. Converges to f64 round-off
/// in two steps; the result is cached.
pub fn j0_first_zero() -> f64 {
    use std::sync::OnceLock;
    static ZERO: OnceLock<f64> = OnceLock::new();
    *ZERO.get_or_init(|| {
        let mut x = 2.404825557695773f64;
        for _ in 0..4 {
            let f = j0(x);
            let fp = -j1(x);
            let step = f / fp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 50-digit external references, rounded to 20 significant digits.
    const J0_REFS: &[(f64, f64)] = &[
        (0.0, 1.0),
        (1e-08, 0.999999999999999975),
        (0.1, 0.99750156206604003228),
        (0.5, 0.93846980724081290423),
        (1.0, 0.76519768655796655145),
        (2.0, 0.22389077914123566805),
        (2.404825557695773, -1.2011950073676861231e-16),
        (3.0, -0.26005195490193343762),
        (5.0, -0.17759677131433830435),
        (7.0, 0.30007927051955559665),
        (8.0, 0.17165080713755390609),
        (10.0, -0.2459357644513483352),
        (12.0, 0.047689310796833536624),
        (15.0, -0.014224472826780773234),
        (15.999, -0.17480858654665344215),
        (16.0, -0.17489907398362918483),
        (16.001, -0.17498938087172279977),
        (17.0, -0.16985425215118354791),
        (20.0, 0.16702466434058315473),
        (25.0, 0.096266783275958116174),
        (30.0, -0.086367983581040211336),
        (50.0, 0.055812327669251815005),
        (100.0, 0.019985850304223122424),
        (700.0, -0.0062882724650687667615),
    ];

    const J1_REFS: &[(f64, f64)] = &[
        (0.0, 0.0),
        (1e-08, 4.9999999999999999375e-9),
        (0.1, 0.049937526036241997556),
        (0.5, 0.24226845767487388638),
        (1.0, 0.44005058574493351596),
        (2.0, 0.5767248077568733872),
        (2.404825557695773, 0.51914749728946673819),
        (3.0, 0.33905895852593645893),
        (5.0, -0.32757913759146522204),
        (7.0, -0.0046828234823458326991),
        (8.0, 0.23463634685391462438),
        (10.0, 0.04347274616886143667),
        (12.0, -0.22344710449062761237),
        (15.0, 0.20510403861352276115),
        (15.999, 0.090577685148222171815),
        (16.0, 0.090397175661304186239),
        (16.001, 0.090216587414636148897),
        (17.0, -0.097668492757780650236),
        (20.0, 0.066833124175850045579),
        (25.0, -0.12535024958028990465),
        (30.0, -0.11875106261662293652),
        (50.0, -0.097511828125175137661),
        (100.0, -0.077145352014112158033),
        (700.0, 0.02948982408403033108),
    ];

    #[test]
    fn j0_matches_references_to_1e14() {
        for &(x, want) in J0_REFS {
            let got = j0(x);
            assert!(
                (got - want).abs() <= 1e-14,
                "J0({x}): got {got}, want {want}, err {:.3e}",
                (got - want).abs()
            );
        }
    }

    #[test]
    fn j1_matches_references_to_1e14() {
        for &(x, want) in J1_REFS {
            let got = j1(x);
            assert!(
                (got - want).abs() <= 1e-14,
                "J1({x}): got {got}, want {want}, err {:.3e}",
                (got - want).abs()
            );
        }
    }

    #[test]
    fn branches_agree_across_the_split() {
        // The series branch is f64-exact throughout; the asymptotic branch's
        // truncation error scales like exp(-2x), so grade the tolerance
        // accordingly. At the split (x = 16) agreement must be ~1e-14.
        let mut x = 12.0f64;
        while x <= 20.0 {
            let tol = 5e-14 + 0.5 * (-2.0 * x).exp();
            let d0 = (j0_series(x) - j_asymptotic(0, x)).abs();
            let d1 = (j1_series(x) - j_asymptotic(1, x)).abs();
            assert!(d0 <= tol, "J0 branches differ by {d0:.3e} at x = {x}");
            assert!(d1 <= tol, "J1 branches differ by {d1:.3e} at x = {x}");
            x += 0.25;
        }
        let d0 = (j0_series(16.0) - j_asymptotic(0, 16.0)).abs();
        assert!(d0 <= 2e-14, "splice jump {d0:.3e}");
    }

    #[test]
    fn j1_is_odd_and_j0_is_even() {
        for x in [0.3, 1.7, 5.5, 18.0, 42.0] {
            assert_eq!(j0(x), j0(-x));
            assert_eq!(j1(x), -j1(-x));
        }
    }

    #[test]
    fn first_zero_matches_reference() {
        let z = j0_first_zero();
        // 25-digit external reference.
        let want = 2.404825557695772768621632;
        assert!(
            (z - want).abs() <= 1e-12,
            "first J0 zero {z} vs {want}"
        );
        // Much tighter in practice: Newton converges to round-off.
        assert!((z - want).abs() <= 5e-16);
        assert!(j0(z).abs() <= 1e-15);
        assert!((j1(z) - 0.51914749728946678814).abs() <= 1e-14);
    }

    #[test]
    fn derivative_relation_j0_prime_is_minus_j1() {
        // Central difference of J0 against -J1 at assorted points.
        for x in [0.8, 2.0, 6.5, 14.0, 22.0] {
            let h = 1e-5;
            let fd = (j0(x + h) - j0(x - h)) / (2.0 * h);
            assert!(
                (fd + j1(x)).abs() <= 1e-9,
                "J0'({x}) = {fd} vs -J1 = {}",
                -j1(x)
            );
        }
    }
}
