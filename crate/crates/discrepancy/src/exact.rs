//! Exact coordinate arithmetic.
//!
//! Point coordinates are either exact rationals (as read from file input or
//! produced by the deterministic generators) or binary64 values (random
//! generators). Every grid operation that decides a box membership — floor
//! snapping, nearest snapping, b-adic cell location — must be exact, or a
//! coordinate sitting on a cell boundary is misclassified and the exact Haar
//! identities downstream silently break. This module therefore never forms
//! the product `M * x` in floating point: binary64 inputs are decomposed
//! into `mantissa * 2^exp` and handled with u128 integer shifts.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// One point coordinate in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coord {
    /// Binary64 coordinate (itself an exact dyadic rational).
    Float(f64),
    /// Reduced rational `num/den` with `den > 0`.
    Ratio { num: i64, den: i64 },
}

impl Coord {
    pub fn from_f64(x: f64) -> Result<Self> {
        if !(x.is_finite() && (0.0..1.0).contains(&x)) {
            return Err(Error::CoordinateRange {
                value: format!("{x}"),
            });
        }
        Ok(Coord::Float(x))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den <= 0 || num < 0 || num >= den {
            return Err(Error::CoordinateRange {
                value: format!("{num}/{den}"),
            });
        }
        let g = gcd_i64(num, den);
        Ok(Coord::Ratio {
            num: num / g,
            den: den / g,
        })
    }

    pub fn zero() -> Self {
        Coord::Ratio { num: 0, den: 1 }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Coord::Float(x) => x,
            Coord::Ratio { num, den } => num as f64 / den as f64,
        }
    }

    pub fn to_big_rational(self) -> BigRational {
        match self {
            Coord::Float(x) => {
                let (mant, exp) = decompose_f64(x);
                let num = BigInt::from(mant);
                if exp >= 0 {
                    BigRational::from_integer(num << (exp as usize))
                } else {
                    BigRational::new(num, BigInt::one() << ((-exp) as usize))
                }
            }
            Coord::Ratio { num, den } => {
                BigRational::new(BigInt::from(num), BigInt::from(den))
            }
        }
    }

    /// `floor(m * x)` together with a flag telling whether `m * x` is an
    /// exact integer. Exact for every `m <= 2^62` and every representable
    /// coordinate.
    pub fn floor_scaled_exact(self, m: u64) -> (u64, bool) {
        debug_assert!(m <= 1 << 62);
        match self {
            Coord::Float(x) => {
                if x == 0.0 {
                    return (0, true);
                }
                let (mant, exp) = decompose_f64(x);
                let p = (m as u128) * (mant as u128);
                if exp >= 0 {
                    // x < 1 makes positive exponents impossible for nonzero
                    // mantissas of this size, but handle it anyway.
                    ((p << exp.min(63)) as u64, true)
                } else {
                    let s = (-exp) as u32;
                    if s >= 128 {
                        (0, p == 0)
                    } else {
                        let q = p >> s;
                        let rem = p & ((1u128 << s) - 1);
                        (q as u64, rem == 0)
                    }
                }
            }
            Coord::Ratio { num, den } => {
                let p = (m as u128) * (num as u128);
                let q = p / den as u128;
                (q as u64, p % den as u128 == 0)
            }
        }
    }

    /// `floor(m * x)`.
    pub fn floor_scaled(self, m: u64) -> u64 {
        self.floor_scaled_exact(m).0
    }

    /// Nearest integer to `m * x`, with the exact half rounding up so the
    /// residual `x - round/m` lands in `[-1/(2m), 1/(2m))`.
    pub fn round_scaled_half_up(self, m: u64) -> u64 {
        let (t, _) = self.floor_scaled_exact(2 * m);
        (t + 1) / 2
    }

    /// Exact comparison of `x` against `num/den` (`den > 0`). The bound may
    /// lie anywhere in `[0, 1]`, e.g. a b-adic interval endpoint.
    pub fn cmp_ratio(self, num: i128, den: i128) -> Ordering {
        debug_assert!(den > 0 && num >= 0);
        match self {
            Coord::Ratio { num: a, den: b } => {
                // a/b vs num/den  <=>  a*den vs num*b, both < 2^127
                (a as i128 * den).cmp(&(num * b as i128))
            }
            Coord::Float(x) => {
                if x == 0.0 {
                    return 0i128.cmp(&num);
                }
                let (mant, exp) = decompose_f64(x);
                // mant * 2^exp vs num/den  <=>  mant*den*2^exp vs num
                let lhs = match (mant as u128).checked_mul(den as u128) {
                    Some(v) => v,
                    None => {
                        // bounds this large never come from grid geometry;
                        // fall back to arbitrary precision
                        let b = BigRational::new(BigInt::from(num), BigInt::from(den));
                        return self.to_big_rational().cmp(&b);
                    }
                };
                let rhs = num as u128;
                if exp >= 0 {
                    return shifted_cmp(lhs, exp as u32, rhs);
                }
                let s = (-exp) as u32;
                // lhs vs rhs << s
                match shifted_cmp(rhs, s, lhs) {
                    Ordering::Less => Ordering::Greater,
                    Ordering::Greater => Ordering::Less,
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    /// Exact residual `x - z/m` as a rational (used by the ball engine for
    /// boundary-accurate membership tests).
    pub fn sub_grid(self, z: i64, m: u64) -> BigRational {
        let grid = BigRational::new(BigInt::from(z), BigInt::from(m));
        self.to_big_rational() - grid
    }

    pub fn is_zero(self) -> bool {
        match self {
            Coord::Float(x) => x == 0.0,
            Coord::Ratio { num, .. } => num == 0,
        }
    }
}

/// Compare `a * 2^s` against `b` without overflow.
fn shifted_cmp(a: u128, s: u32, b: u128) -> Ordering {
    if a == 0 {
        return 0u128.cmp(&b);
    }
    if s >= 128 || a.leading_zeros() < s {
        return Ordering::Greater; // a * 2^s >= 2^128 > b
    }
    (a << s).cmp(&b)
}

/// Decompose a finite positive f64 into `(mantissa, exponent)` with
/// `value = mantissa * 2^exponent` exactly.
fn decompose_f64(x: f64) -> (u64, i32) {
    debug_assert!(x > 0.0 && x.is_finite());
    let bits = x.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_field == 0 {
        (frac, -1074) // subnormal
    } else {
        (frac | (1u64 << 52), exp_field - 1075)
    }
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// gcd of two unsigned words; gcd(0, n) = n.
pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exact `base^exp` as u128, erroring out on overflow.
pub fn checked_pow_u128(base: u64, exp: u32) -> Result<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc
            .checked_mul(base as u128)
            .ok_or_else(|| Error::InvalidParameter(format!("{base}^{exp} overflows")))?;
    }
    Ok(acc)
}

/// Rational as an exact `BigRational` from a signed numerator and power base.
pub fn big_ratio(num: i128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `BigRational` zero, spelled out for call sites that fold.
pub fn big_zero() -> BigRational {
    BigRational::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_scaled_matches_hand_values() {
        // floor(8 * 0.37) = 2, floor(8 * 0.91) = 7
        assert_eq!(Coord::from_f64(0.37).unwrap().floor_scaled(8), 2);
        assert_eq!(Coord::from_f64(0.91).unwrap().floor_scaled(8), 7);
        // on-grid rational: floor(10 * 3/10) = 3, exactly
        let c = Coord::from_ratio(3, 10).unwrap();
        assert_eq!(c.floor_scaled_exact(10), (3, true));
    }

    #[test]
    fn floor_scaled_boundary_float() {
        // 0.5 is exactly representable: floor(4 * 0.5) = 2 with exact flag
        let c = Coord::from_f64(0.5).unwrap();
        assert_eq!(c.floor_scaled_exact(4), (2, true));
        // 0.1 is not: floor(10 * 0.1) must still be 1 (0.1 > 1/10 in binary64)
        let c = Coord::from_f64(0.1).unwrap();
        let (z, exact) = c.floor_scaled_exact(10);
        assert_eq!(z, 1);
        assert!(!exact);
    }

    #[test]
    fn round_half_up_residual_interval() {
        // M*p integer + 1/2 rounds up, so q = -1/(2M) is attained
        let c = Coord::from_ratio(3, 16).unwrap(); // 8 * 3/16 = 1.5
        assert_eq!(c.round_scaled_half_up(8), 2);
        // p = 0.37, M = 8 -> nearest multiple is 3/8
        assert_eq!(Coord::from_f64(0.37).unwrap().round_scaled_half_up(8), 3);
        // p = 0.9999, M = 8 -> rounds to 8 (wraps to 0 mod 8 at the caller)
        assert_eq!(Coord::from_f64(0.9999).unwrap().round_scaled_half_up(8), 8);
    }

    #[test]
    fn cmp_ratio_exact() {
        let c = Coord::from_f64(1.0 / 3.0).unwrap(); // slightly below 1/3
        assert_eq!(c.cmp_ratio(1, 3), Ordering::Less);
        let c = Coord::from_ratio(1, 3).unwrap();
        assert_eq!(c.cmp_ratio(1, 3), Ordering::Equal);
        assert_eq!(c.cmp_ratio(333, 1000), Ordering::Greater);
        let tiny = Coord::from_f64(f64::MIN_POSITIVE / 8.0).unwrap(); // subnormal
        assert_eq!(tiny.cmp_ratio(1, i128::MAX / 2), Ordering::Less);
        assert_eq!(tiny.cmp_ratio(0, 1), Ordering::Greater);
    }

    #[test]
    fn big_rational_round_trip() {
        let c = Coord::from_f64(0.37).unwrap();
        let r = c.to_big_rational();
        let back = r.numer().to_string().parse::<f64>().unwrap()
            / r.denom().to_string().parse::<f64>().unwrap();
        assert!((back - 0.37).abs() < 1e-15);
    }

    mod properties {
        use super::*;
        use num_traits::{Signed, ToPrimitive, Zero};
        use proptest::prelude::*;

        fn any_coord() -> impl Strategy<Value = Coord> {
            prop_oneof![
                (0.0f64..1.0).prop_map(|x| Coord::from_f64(x).unwrap()),
                (0i64..10_000, 1i64..10_000).prop_filter_map("num < den", |(a, b)| {
                    (a < b).then(|| Coord::from_ratio(a, b).unwrap())
                }),
                // subnormal and near-boundary floats
                (1u64..100).prop_map(|k| Coord::from_f64(f64::MIN_POSITIVE / k as f64).unwrap()),
                (1u64..100)
                    .prop_map(|k| Coord::from_f64(1.0 - k as f64 * f64::EPSILON).unwrap()),
            ]
        }

        proptest! {
            // integer-shift arithmetic against arbitrary-precision truth
            #[test]
            fn floor_scaled_matches_big_rational(c in any_coord(), m in 1u64..(1 << 26)) {
                let (got, exact) = c.floor_scaled_exact(m);
                let prod = c.to_big_rational() * BigRational::from_integer(m.into());
                let want = prod.floor();
                prop_assert_eq!(BigInt::from(got), want.to_integer());
                prop_assert_eq!(exact, prod.is_integer());
            }

            #[test]
            fn round_half_up_matches_big_rational(c in any_coord(), m in 1u64..(1 << 25)) {
                let got = c.round_scaled_half_up(m);
                let shifted = c.to_big_rational() * BigRational::from_integer(m.into())
                    + BigRational::new(1.into(), 2.into());
                prop_assert_eq!(BigInt::from(got), shifted.floor().to_integer());
                // residual lands in [-1/(2m), 1/(2m))
                let q = c.to_big_rational()
                    - BigRational::new(BigInt::from(got), BigInt::from(m));
                let half = BigRational::new(1.into(), BigInt::from(2 * m));
                prop_assert!(q >= -half.clone() && q < half);
            }

            #[test]
            fn cmp_ratio_matches_big_rational(
                c in any_coord(),
                num in 0i64..1000,
                den in 1i64..1000,
            ) {
                let got = c.cmp_ratio(num as i128, den as i128);
                let want = c
                    .to_big_rational()
                    .cmp(&BigRational::new(num.into(), den.into()));
                prop_assert_eq!(got, want);
            }

            #[test]
            fn sub_grid_is_exact(c in any_coord(), m in 2u64..1000, z in 0i64..1000) {
                let z = z % m as i64;
                let diff = c.sub_grid(z, m);
                let back = diff + BigRational::new(z.into(), BigInt::from(m));
                prop_assert_eq!(back, c.to_big_rational());
                let zero = Coord::zero();
                prop_assert!(zero.sub_grid(0, m).is_zero());
                prop_assert!(!zero.to_big_rational().is_negative());
            }
        }
    }
}
