//! Exact homotopy probability for Vietoris–Rips complexes of uniform circle samples.
//!
//! For `0 < r < 1/3` and `n` i.i.d. uniform points on the circle of length
//! one,
//!
//! ```text
//! P(n, r) = n r^(n-1) [ ∫_0^r g(n-1, (1-x)/r) dx - r g(n-1, 1/r - 1) ]
//! g(m, x) = Σ_{k=0}^{m} (-1)^k C(m, k) (x - k)_+^m
//! ```
//!
//! is the probability that `VR(X, r)` is homotopy equivalent to the circle.
//! `g(m, ·)/m!` is the Irwin–Hall distribution function. In this scale range
//! the first Betti number is a Bernoulli variable with mean `P(n, r)`.
//!
//! # Evaluation
//!
//! Substituting `u = (1-x)/r` turns the integral into `r ∫_{1/r-1}^{1/r} g(n-1, u) du`
//! and `(u - k)_+^n / n` is an antiderivative of each term, so the bracket is
//! a finite alternating sum. A double `r` is an exact dyadic rational
//! `p / 2^e`; multiplying through by `2^(e n)` makes every term an integer:
//!
//! ```text
//! P 2^(en) = Σ_k (-1)^k C(n-1, k) [ a_k^n - a_{k+1}^n - n p a_{k+1}^(n-1) ],
//! a_k = (2^e - k p)_+
//! ```
//!
//! The sum is accumulated in arbitrary-precision integers and rounded once,
//! so the only error is the final conversion to `f64`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper end (exclusive) of the scale range where the oracle holds.
pub const MAX_SCALE: f64 = 1.0 / 3.0;

/// Largest sample count the oracle evaluates. The arithmetic is exact for any
/// `n`; the limit bounds the integer sizes, which grow like `53 n` bits.
pub const MAX_ORACLE_N: usize = 4096;

/// Exact oracle values at one `(n, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleOracleEval {
    pub n: usize,
    pub r: f64,
    pub p_circle: f64,
    pub expected_b1: f64,
    pub variance_b1: f64,
}

impl CircleOracleEval {
    pub fn at(n: usize, r: f64) -> Result<Self> {
        let p = circle_homotopy_prob(n, r)?;
        Ok(Self {
            n,
            r,
            p_circle: p,
            expected_b1: p,
            variance_b1: p * (1.0 - p),
        })
    }
}

/// `x` as an exact fraction `numer / 2^shift` with `shift >= 0`.
fn dyadic(x: f64) -> (BigInt, u32) {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1 << 52) - 1);
    let (mant, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1 << 52), exp - 1075)
    };
    let mut numer = BigInt::from(mant);
    if x.is_sign_negative() {
        numer = -numer;
    }
    if e >= 0 {
        (numer << e as usize, 0)
    } else {
        (numer, (-e) as u32)
    }
}

/// Row `m` of Pascal's triangle.
fn binomial_row(m: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(m + 1);
    let mut c = BigInt::one();
    for k in 0..=m {
        row.push(c.clone());
        c = c * (m - k) / (k + 1);
    }
    row
}

fn ratio_to_f64(numer: BigInt, denom: BigInt) -> f64 {
    BigRational::new(numer, denom).to_f64().unwrap_or(f64::NAN)
}

/// `y_+^e` with `0^0 = 1`.
fn pos_pow(y: &BigInt, e: usize) -> BigInt {
    if y.is_negative() {
        BigInt::zero()
    } else {
        num_traits::pow(y.clone(), e)
    }
}

/// `g(n, x) = Σ_{k=0}^{n} (-1)^k C(n, k) (x - k)_+^n`, equal to `n!` times the
/// Irwin–Hall distribution function of `n` uniforms.
///
/// Returns 0 for `x <= 0` and `n!` for `x >= n`; in between the sum is
/// evaluated exactly and rounded once.
pub fn irwin_hall_g(n: usize, x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 0.0;
    }
    if x >= n as f64 {
        return (1..=n).map(|k| k as f64).product();
    }
    let (numer, shift) = dyadic(x);
    let one = BigInt::one() << shift as usize;
    let binom = binomial_row(n);
    let mut sum = BigInt::zero();
    for (k, c) in binom.iter().enumerate() {
        let y = &numer - &one * k;
        if !y.is_positive() {
            break;
        }
        let term = c * pos_pow(&y, n);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    ratio_to_f64(sum, BigInt::one() << (shift as usize * n))
}

/// Probability that the Vietoris–Rips complex of `n` uniform circle points at
/// scale `r` is homotopy equivalent to the circle, for `0 < r < 1/3`.
pub fn circle_homotopy_prob(n: usize, r: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    if !(r > 0.0 && r < MAX_SCALE) {
        return Err(Error::Domain(format!("scale r = {r} outside (0, 1/3)")));
    }
    if n > MAX_ORACLE_N {
        return Err(Error::Precision(format!(
            "circle oracle evaluates n <= {MAX_ORACLE_N}, got {n}"
        )));
    }
    let (p, e) = dyadic(r);
    let d = BigInt::one() << e as usize;
    let m = n - 1;
    let binom = binomial_row(m);
    let a = |k: usize| &d - &p * k;
    let np = &p * n;
    let mut sum = BigInt::zero();
    for (k, c) in binom.iter().enumerate() {
        let ak = a(k);
        if !ak.is_positive() {
            break;
        }
        let ak1 = a(k + 1);
        let term = pos_pow(&ak, n) - pos_pow(&ak1, n) - &np * pos_pow(&ak1, m);
        let term = c * term;
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(ratio_to_f64(sum, num_traits::pow(d, n)))
}

/// Oracle values over a strictly increasing grid inside `(0, 1/3)`.
pub fn circle_oracle_curve(n: usize, r_grid: &[f64]) -> Result<Vec<CircleOracleEval>> {
    if let Some(w) = r_grid.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::invalid(format!(
            "grid is not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    if let Some(r) = r_grid.iter().find(|r| !(**r > 0.0 && **r < MAX_SCALE)) {
        return Err(Error::Domain(format!("grid point r = {r} outside (0, 1/3)")));
    }
    r_grid.iter().map(|&r| CircleOracleEval::at(n, r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dyadic_is_exact() {
        for x in [0.375, 6.0, 0.1, 1.0 / 3.0, 5e-324, 1e300] {
            let (m, s) = dyadic(x);
            let exact = BigRational::from_float(x).unwrap();
            assert_eq!(BigRational::new(m, BigInt::one() << s as usize), exact, "x = {x}");
        }
    }

    #[test]
    fn irwin_hall_values() {
        assert_eq!(irwin_hall_g(3, 1.5), 3.0);
        assert_eq!(irwin_hall_g(2, 2.0), 2.0);
        assert_eq!(irwin_hall_g(5, 0.0), 0.0);
        assert_eq!(irwin_hall_g(4, -1.0), 0.0);
        assert_eq!(irwin_hall_g(4, 10.0), 24.0);
        assert_eq!(irwin_hall_g(0, 0.5), 1.0);
        assert_eq!(irwin_hall_g(1, 0.25), 0.25);
    }

    #[test]
    fn small_samples_never_close_a_loop() {
        for r in [1e-3, 0.05, 0.1, 0.2, 0.3, 0.333] {
            assert_eq!(circle_homotopy_prob(1, r).unwrap(), 0.0);
            assert_eq!(circle_homotopy_prob(2, r).unwrap(), 0.0);
            assert_eq!(circle_homotopy_prob(3, r).unwrap(), 0.0);
        }
    }

    #[test]
    fn domain_errors() {
        for r in [0.0, -0.1, MAX_SCALE, 0.5, f64::NAN] {
            assert!(matches!(circle_homotopy_prob(10, r), Err(Error::Domain(_))), "r = {r}");
        }
        assert!(matches!(circle_homotopy_prob(0, 0.1), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            circle_homotopy_prob(MAX_ORACLE_N + 1, 0.1),
            Err(Error::Precision(_))
        ));
    }

    #[test]
    fn curve_checks_grid() {
        let c = circle_oracle_curve(2, &[0.05, 0.1, 0.2]).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.iter().all(|e| e.expected_b1 == 0.0 && e.variance_b1 == 0.0));
        let err = circle_oracle_curve(10, &[0.1, 0.4]).unwrap_err();
        assert!(err.to_string().contains("0.4"));
        assert!(circle_oracle_curve(10, &[0.2, 0.1]).is_err());
        let c = circle_oracle_curve(50, &[0.05, 0.15]).unwrap();
        assert!(c[0].p_circle <= c[1].p_circle);
    }

    #[test]
    fn bernoulli_moments() {
        let e = CircleOracleEval::at(12, 0.3).unwrap();
        assert_eq!(e.variance_b1, e.p_circle * (1.0 - e.p_circle));
        assert_relative_eq!(e.p_circle, 0.76548902928, max_relative = 1e-9);
    }
}
