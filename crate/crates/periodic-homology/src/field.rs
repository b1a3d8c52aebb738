//! Exact coefficient fields for chain complexes.
//!
//! Two implementations are provided: arbitrary-precision rationals (the
//! default everywhere) and prime fields `Fp<P>` for faster arithmetic on
//! large inputs. Both are exact; no floating point is used anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::Debug;

/// An exact field. All chain-complex and spectral-sequence code is generic
/// over this trait.
pub trait Field: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Panics on division by zero; callers guarantee nonzero divisors.
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// 0 for the rationals, p for a prime field.
    fn characteristic() -> u64;
}

impl Field for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        assert!(!Zero::is_zero(other), "division by zero");
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn characteristic() -> u64 {
        0
    }
}

/// Element of the prime field with `P` elements. `P` must be prime and small
/// enough that `(P - 1)^2` fits in a `u64`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fp<const P: u64>(pub u64);

impl<const P: u64> Fp<P> {
    fn pow(mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= P;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % P;
            }
            base = base * base % P;
            exp >>= 1;
        }
        acc
    }

    fn inverse(v: u64) -> u64 {
        assert!(v % P != 0, "division by zero in F_{}", P);
        Self::pow(v, P - 2)
    }
}

impl<const P: u64> Field for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1 % P)
    }
    fn from_int(n: i64) -> Self {
        let p = P as i64;
        Fp(n.rem_euclid(p) as u64)
    }
    fn add(&self, other: &Self) -> Self {
        Fp((self.0 + other.0) % P)
    }
    fn sub(&self, other: &Self) -> Self {
        Fp((self.0 + P - other.0) % P)
    }
    fn mul(&self, other: &Self) -> Self {
        Fp(self.0 * other.0 % P)
    }
    fn div(&self, other: &Self) -> Self {
        Fp(self.0 * Self::inverse(other.0) % P)
    }
    fn neg(&self) -> Self {
        Fp((P - self.0) % P)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn characteristic() -> u64 {
        P
    }
}

/// Exact rationals, the default coefficient field.
pub type Rational = BigRational;

/// The prime field used when a fast exact field is preferred over the
/// rationals. 46337 is the largest prime below 2^15.5, so products stay
/// well inside `u64`.
pub type F46337 = Fp<46337>;
