//! Exact scalar fields: the rationals for the public API and small prime
//! fields for brute-force cross-checks.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub trait Field: Clone + Eq + Ord + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;
    /// Distinct roots lying in the field of `c[0] + c[1] t + ... + c[d] t^d`.
    fn roots(coeffs: &[Self]) -> Vec<Self>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// Every element, for finite fields.
    fn all_elements() -> Option<Vec<Self>> {
        None
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
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
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn roots(coeffs: &[Self]) -> Vec<Self> {
        rational_roots(coeffs)
    }
}

/// Rational roots via the rational root theorem on the integer-scaled polynomial.
fn rational_roots(coeffs: &[BigRational]) -> Vec<BigRational> {
    let mut c: Vec<BigRational> = coeffs.to_vec();
    while c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let lcm = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = c.iter().map(|x| (x * &lcm).to_integer()).collect();
    let mut roots = Vec::new();
    if ints[0].is_zero() {
        roots.push(<BigRational as Zero>::zero());
        let shift = ints.iter().take_while(|x| Zero::is_zero(*x)).count();
        ints.drain(..shift);
    }
    if ints.len() > 1 {
        let lead = ints.last().unwrap().abs();
        let constant = ints[0].abs();
        for p in divisors(&constant) {
            for q in divisors(&lead) {
                if p.gcd(&q) != BigInt::one() {
                    continue;
                }
                for sign in [1, -1] {
                    let r = BigRational::new(&p * sign, q.clone());
                    if Zero::is_zero(&horner(&ints, &r)) {
                        roots.push(r);
                    }
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

fn horner(ints: &[BigInt], r: &BigRational) -> BigRational {
    ints.iter()
        .rev()
        .fold(<BigRational as Zero>::zero(), |acc, c| acc * r + BigRational::from_integer(c.clone()))
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    debug_assert!(n.is_positive());
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            let other = n / &d;
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// The prime field `F_P`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub fn new(v: i64) -> Self {
        Self(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn elements() -> impl Iterator<Item = Self> {
        (0..P).map(Self)
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Field for Fp<P> {
    fn zero() -> Self {
        Self(0)
    }
    fn one() -> Self {
        Self(1 % P)
    }
    fn from_i64(v: i64) -> Self {
        Self::new(v)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, o: &Self) -> Self {
        Self((self.0 + o.0) % P)
    }
    fn sub(&self, o: &Self) -> Self {
        Self((self.0 + P - o.0) % P)
    }
    fn mul(&self, o: &Self) -> Self {
        Self((self.0 * o.0) % P)
    }
    fn neg(&self) -> Self {
        Self((P - self.0) % P)
    }
    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            return None;
        }
        // Fermat: a^(P-2)
        let (mut base, mut exp, mut acc) = (self.0, P - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % P;
            }
            base = base * base % P;
            exp >>= 1;
        }
        Some(Self(acc))
    }
    fn all_elements() -> Option<Vec<Self>> {
        Some(Self::elements().collect())
    }
    fn roots(coeffs: &[Self]) -> Vec<Self> {
        if coeffs.iter().all(|c| c.is_zero()) {
            return Vec::new();
        }
        Self::elements()
            .filter(|t| coeffs.iter().rev().fold(Self(0), |acc, c| acc.mul(t).add(c)).is_zero())
            .collect()
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            (!q.is_zero()).then(|| BigRational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// Renders as `"p/q"`, or `"p"` for integers.
pub fn format_rational(q: &BigRational) -> String {
    q.to_string()
}

/// Small helper for tests and examples.
pub fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}
