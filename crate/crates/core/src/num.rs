//! Exact rational scalars and coordinate vectors.
//!
//! Every quantity in this crate is a `Rational` (arbitrary-precision, always
//! in lowest terms with a positive denominator); there is no floating-point
//! fallback anywhere.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// A point or row vector with exact rational coordinates.
pub type QVector = Vec<Rational>;

/// Rational from an integer.
pub fn qint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics on `d == 0`.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Vector of integers as rationals.
pub fn qvec(coords: &[i64]) -> QVector {
    coords.iter().map(|&c| qint(c)).collect()
}

pub fn zeros(n: usize) -> QVector {
    vec![Rational::zero(); n]
}

/// Standard basis vector `e_i` (0-indexed) in dimension `n`.
pub fn unit(n: usize, i: usize) -> QVector {
    let mut v = zeros(n);
    v[i] = Rational::one();
    v
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[Rational], b: &[Rational]) -> QVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> QVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rational], c: &Rational) -> QVector {
    a.iter().map(|x| x * c).collect()
}

/// `a + c*b`.
pub fn add_scaled(a: &[Rational], b: &[Rational], c: &Rational) -> QVector {
    a.iter().zip(b).map(|(x, y)| x + &(y * c)).collect()
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

pub fn is_binary(x: &Rational) -> bool {
    x.is_zero() || x.is_one()
}

/// Midpoint of two points.
pub fn midpoint(a: &[Rational], b: &[Rational]) -> QVector {
    let half = q(1, 2);
    a.iter().zip(b).map(|(x, y)| (x + y) * &half).collect()
}

/// Scale a vector by a positive rational so that all entries become coprime
/// integers. The zero vector is returned unchanged. Sign is preserved, so the
/// result represents the same ray / inequality.
pub fn primitive(v: &[Rational]) -> QVector {
    if is_zero_vec(v) {
        return v.to_vec();
    }
    let mut lcm = BigInt::one();
    for x in v {
        lcm = num_integer::lcm(lcm, x.denom().clone());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * &lcm / x.denom()).collect();
    let mut gcd = BigInt::zero();
    for n in &ints {
        gcd = num_integer::gcd(gcd, n.abs());
    }
    ints.into_iter()
        .map(|n| Rational::from_integer(n / &gcd))
        .collect()
}
