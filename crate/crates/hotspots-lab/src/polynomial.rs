//! Exact integer polynomial arithmetic.
//!
//! The analytic positivity certificates in [`crate::inequalities`] reduce to
//! identities between small integer polynomials (degree ≤ 10, coefficients
//! well inside `i64`). Verifying those identities coefficient-by-coefficient
//! in exact arithmetic — rather than sampling floats — is what turns a
//! numerical check into a proof-grade check, so this module keeps everything
//! in integers and panics loudly on any overflow.

/// Dense univariate polynomial with `i64` coefficients;
/// `coeffs[k]` multiplies `x^k`. Trailing zeros are trimmed, so equality of
/// values implies equality of representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: i64) -> Self {
        IntPoly { coeffs: vec![c] }.trimmed()
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        IntPoly {
            coeffs: vec![0, 1],
        }
    }

    /// `coeffs[k]` is the coefficient of `x^k`.
    pub fn from_coeffs(coeffs: &[i64]) -> Self {
        IntPoly {
            coeffs: coeffs.to_vec(),
        }
        .trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the zero polynomial is reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> i64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn neg(&self) -> Self {
        IntPoly {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                self.coeff(k)
                    .checked_add(other.coeff(k))
                    .expect("integer polynomial coefficient overflow in add")
            })
            .collect();
        IntPoly { coeffs }.trimmed()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: i64) -> Self {
        IntPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| c.checked_mul(s).expect("coefficient overflow in scale"))
                .collect(),
        }
        .trimmed()
    }

    /// Exact product by convolution, accumulated in `i128` and checked back
    /// into `i64`.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut acc = vec![0i128; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                acc[i + j] += (a as i128) * (b as i128);
            }
        }
        let coeffs = acc
            .into_iter()
            .map(|c| i64::try_from(c).expect("coefficient overflow in mul"))
            .collect();
        IntPoly { coeffs }.trimmed()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = IntPoly::constant(1);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Horner evaluation in f64 (coefficients convert exactly for the sizes
    /// used here).
    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut v = 0.0f64;
        for &c in self.coeffs.iter().rev() {
            v = v * x + c as f64;
        }
        v
    }

    /// Exact evaluation at an integer point.
    pub fn eval_i128(&self, x: i128) -> i128 {
        let mut v = 0i128;
        for &c in self.coeffs.iter().rev() {
            v = v
                .checked_mul(x)
                .and_then(|t| t.checked_add(c as i128))
                .expect("overflow in exact evaluation");
        }
        v
    }
}

/// Convenience: `c0 + c1 x` etc. via small builders.
pub fn linear(c0: i64, c1: i64) -> IntPoly {
    IntPoly::from_coeffs(&[c0, c1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> IntPoly {
        IntPoly::x()
    }

    fn one() -> IntPoly {
        IntPoly::constant(1)
    }

    #[test]
    fn basic_algebra() {
        let p = one().add(&x()); // 1 + x
        assert_eq!(p.pow(2), IntPoly::from_coeffs(&[1, 2, 1]));
        let q = x().sub(&one()).mul(&x().add(&one())); // (x-1)(x+1)
        assert_eq!(q, IntPoly::from_coeffs(&[-1, 0, 1]));
        assert_eq!(p.pow(0), one());
        assert!(p.sub(&p).is_zero());
        assert_eq!(p.pow(3).degree(), 3);
    }

    #[test]
    fn eval_consistency() {
        let p = IntPoly::from_coeffs(&[3, -2, 0, 7, 1]);
        for k in -5i64..=5 {
            assert_eq!(p.eval_i128(k as i128) as f64, p.eval_f64(k as f64));
        }
    }

    /// The degree-10 positivity certificate: 25 times the target quantity
    /// decomposes into terms each visibly nonnegative on x >= 0,
    ///   25 [ (1+x)^4 (1+x^2)^3 - 512 (1-x)^2 x^4 ]
    ///     = 25 (1-x)^10 + 350 x (1-x)^8 + 1900 x^2 (1-x)^6
    ///       + 8 x^3 (25 x^2 - 66 x + 25)^2 + 1152 x^5,
    /// an exact identity in Z[x]. The x^5 term makes positivity strict for
    /// every x > 0, which is what the sign analysis downstream needs.
    #[test]
    fn degree_ten_positivity_certificate_is_exact() {
        let xm = x();
        let lhs = one()
            .add(&xm)
            .pow(4)
            .mul(&one().add(&xm.pow(2)).pow(3))
            .sub(&one().sub(&xm).pow(2).mul(&xm.pow(4)).scale(512))
            .scale(25);
        let omx = one().sub(&xm); // 1 - x
        let square = IntPoly::from_coeffs(&[25, -66, 25]).pow(2);
        let rhs = omx
            .pow(10)
            .scale(25)
            .add(&xm.mul(&omx.pow(8)).scale(350))
            .add(&xm.pow(2).mul(&omx.pow(6)).scale(1900))
            .add(&xm.pow(3).mul(&square).scale(8))
            .add(&xm.pow(5).scale(1152));
        assert_eq!(lhs, rhs, "certificate identity must hold coefficientwise");
        // Spot values of the unscaled quantity: x = 0 gives 1, and x = 1
        // gives 2^4 * 2^3 - 0 = 128.
        assert_eq!(lhs.eval_i128(0), 25);
        assert_eq!(lhs.eval_i128(1), 25 * 128);
        // Each right-hand term is nonnegative at every sample in [0, 2].
        for i in 0..=20 {
            let xv = i as f64 / 10.0;
            assert!(omx.pow(10).eval_f64(xv) >= 0.0);
            assert!(square.eval_f64(xv) >= 0.0);
        }
    }

    /// Discriminant identity for the sign-pattern quadratic: with
    ///   c0 = (x+1)^3 - 2 x^3,  c1 = -2 x (1 - x),  c2 = 2 - (x+1)^3,
    /// the discriminant combination factors exactly:
    ///   4 c0 c2 - c1^2 = 4 (x+1)^2 [ (x^2+1)^2 - 2 x (x^2+1) - 9 x^2 ].
    #[test]
    fn quadratic_discriminant_factors_exactly() {
        let xm = x();
        let xp1 = one().add(&xm);
        let c0 = xp1.pow(3).sub(&xm.pow(3).scale(2));
        let c1 = xm.scale(-2).mul(&one().sub(&xm));
        let c2 = IntPoly::constant(2).sub(&xp1.pow(3));
        let lhs = c0.mul(&c2).scale(4).sub(&c1.mul(&c1));
        let x2p1 = one().add(&xm.pow(2));
        let quartic = x2p1
            .pow(2)
            .sub(&xm.mul(&x2p1).scale(2))
            .sub(&xm.pow(2).scale(9));
        let rhs = xp1.pow(2).mul(&quartic).scale(4);
        assert_eq!(lhs, rhs);
        // Spot value x = 1: both sides equal -144.
        assert_eq!(lhs.eval_i128(1), -144);
        assert_eq!(rhs.eval_i128(1), -144);
    }

    /// The quartic above splits over Q(sqrt(10)):
    ///   (x^2+1)^2 - 2x(x^2+1) - 9x^2
    ///     = [x^2 + 1 + (sqrt(10)-1) x] [x^2 + 1 - (sqrt(10)+1) x],
    /// verified numerically at 64 rational points.
    #[test]
    fn quartic_splits_over_sqrt_ten() {
        let xm = x();
        let x2p1 = one().add(&xm.pow(2));
        let quartic = x2p1
            .pow(2)
            .sub(&xm.mul(&x2p1).scale(2))
            .sub(&xm.pow(2).scale(9));
        let r = 10.0f64.sqrt();
        for i in 0..64 {
            // rational points p/q spread over (-4, 4)
            let p = i as f64 - 31.5;
            let xv = p / 8.0;
            let lhs = quartic.eval_f64(xv);
            let f1 = xv * xv + 1.0 + (r - 1.0) * xv;
            let f2 = xv * xv + 1.0 - (r + 1.0) * xv;
            let rhs = f1 * f2;
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            assert!(
                (lhs - rhs).abs() <= 1e-12 * scale,
                "split mismatch at x = {xv}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn multiplication_overflow_panics() {
        let big = IntPoly::constant(i64::MAX / 2);
        let _ = big.mul(&IntPoly::constant(4));
    }
}
