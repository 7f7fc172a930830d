//! Exact multivariate Laurent polynomials over `Z`, their quotients, and the
//! cluster X-/A-transformations as birational maps of tori.

mod gcd;
mod modgcd;
mod map;
mod rational;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use gcd::{poly_gcd, poly_gcd_prs};
pub use map::RationalMap;
pub use rational::RationalExpr;

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<i64>);

impl Monomial {
    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A Laurent polynomial in `nvars` variables with integer coefficients.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Laurent {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Laurent {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        Self::term(vec![0; nvars], c)
    }

    /// `c * z^exp`.
    pub fn term(exp: Vec<i64>, c: BigInt) -> Self {
        let nvars = exp.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial(exp), c);
        }
        Self { nvars, terms }
    }

    pub fn monomial(exp: &[i64]) -> Self {
        Self::term(exp.to_vec(), BigInt::one())
    }

    /// `1 + c z^exp`.
    pub fn one_plus(exp: &[i64], c: i64) -> Self {
        &Self::one(exp.len()) + &Self::term(exp.to_vec(), c.into())
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<i64>, BigInt)>) -> Self {
        let mut out = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length mismatch");
            out.add_term(Monomial(e), c);
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().all(|(m, c)| c.is_one() && m.0.iter().all(|&e| e == 0))
    }

    /// Ascending graded-lex iteration.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &[i64]) -> BigInt {
        self.terms.get(&Monomial(exp.to_vec())).cloned().unwrap_or_default()
    }

    /// The single term, if this is `c z^e`.
    pub fn as_term(&self) -> Option<(&Monomial, &BigInt)> {
        (self.terms.len() == 1).then(|| self.terms.iter().next().unwrap())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|&e| e == 0))
    }

    /// Graded-lex largest term.
    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Graded-lex smallest term.
    pub fn trailing(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next()
    }

    /// Componentwise minimum exponent (zero vector for the zero polynomial).
    pub fn min_exponents(&self) -> Vec<i64> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.nvars];
        };
        let mut lo = first.0.clone();
        for m in it {
            for (l, &e) in lo.iter_mut().zip(&m.0) {
                *l = (*l).min(e);
            }
        }
        lo
    }

    pub fn max_exponents(&self) -> Vec<i64> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.nvars];
        };
        let mut hi = first.0.clone();
        for m in it {
            for (h, &e) in hi.iter_mut().zip(&m.0) {
                *h = (*h).max(e);
            }
        }
        hi
    }

    /// Multiplication by `z^shift`.
    pub fn shift(&self, shift: &[i64]) -> Self {
        if shift.iter().all(|&s| s == 0) {
            return self.clone();
        }
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial(m.0.iter().zip(shift).map(|(a, b)| a + b).collect()), c.clone()))
                .collect(),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|&e| e >= 0))
    }

    /// gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    /// Exact division of every coefficient by `c`.
    pub fn div_int(&self, c: &BigInt) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, x)| {
                    debug_assert!((x % c).is_zero(), "inexact integer division");
                    (m.clone(), x / c)
                })
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Product, or `None` once more than `cap` terms accumulate.
    pub fn mul_capped(&self, rhs: &Laurent, cap: usize) -> Option<Laurent> {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = Monomial(ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect());
                *acc.entry(m).or_default() += ca * cb;
            }
            if acc.len() > cap {
                return None;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Some(Laurent { nvars: self.nvars, terms: acc })
    }

    /// Power by squaring, or `None` if an intermediate exceeds `cap` terms.
    pub fn pow_capped(&self, e: u32, cap: usize) -> Option<Self> {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_capped(&base, cap)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_capped(&base, cap)?;
            }
        }
        Some(acc)
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`
    /// in the polynomial ring. Both must be polynomials.
    pub fn div_exact(&self, d: &Laurent) -> Option<Laurent> {
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.terms.clone();
        let mut quot = Laurent::zero(self.nvars);
        while let Some((rm, rc)) = rem.last_key_value() {
            let exp: Vec<i64> = rm.0.iter().zip(&dm.0).map(|(a, b)| a - b).collect();
            if exp.iter().any(|&e| e < 0) {
                return None;
            }
            let (q, r) = rc.div_rem(&dc);
            if !r.is_zero() {
                return None;
            }
            for (m, c) in &d.terms {
                let key = Monomial(m.0.iter().zip(&exp).map(|(a, b)| a + b).collect());
                let entry = rem.entry(key).or_default();
                *entry -= &q * c;
                if entry.is_zero() {
                    let key = Monomial(m.0.iter().zip(&exp).map(|(a, b)| a + b).collect());
                    rem.remove(&key);
                }
            }
            quot.terms.insert(Monomial(exp), q);
        }
        Some(quot)
    }

    /// Evaluates at a point with nonzero coordinates.
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars, "evaluation point has the wrong length");
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = BigRational::from_integer(c.clone());
            for (x, &e) in point.iter().zip(&m.0) {
                if e != 0 {
                    v *= num_traits::pow::Pow::pow(x, e as i32);
                }
            }
            total += v;
        }
        total
    }

    fn map_terms(&self, f: impl Fn(&BigInt) -> BigInt) -> Self {
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), f(c))).collect() }
    }
}

impl std::ops::Add for &Laurent {
    type Output = Laurent;
    fn add(self, rhs: &Laurent) -> Laurent {
        let (mut big, small) = if self.len() >= rhs.len() { (self.clone(), rhs) } else { (rhs.clone(), self) };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }
}

impl std::ops::Sub for &Laurent {
    type Output = Laurent;
    fn sub(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl std::ops::Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        self.map_terms(|c| -c)
    }
}

impl std::ops::Mul for &Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = Monomial(ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect());
                *acc.entry(m).or_default() += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Laurent { nvars: self.nvars, terms: acc }
    }
}

/// Wire rendering: `c*z[(a1,...,am)]` terms joined by ` + ` / ` - `, leading
/// term first; `0` for the zero polynomial.
impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let exps: Vec<String> = m.0.iter().map(ToString::to_string).collect();
            let body = format!("{}*z[({})]", c.abs(), exps.join(","));
            match (i, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl Laurent {
    /// Parses the wire rendering; `nvars` is needed for the bare `0`.
    pub fn parse(s: &str, nvars: usize) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero(nvars));
        }
        let bad = || Error::Parse(format!("bad Laurent expression {s:?}"));
        let mut out = Self::zero(nvars);
        let mut rest = s;
        let mut negative = false;
        if let Some(r) = rest.strip_prefix('-') {
            negative = true;
            rest = r;
        }
        loop {
            let end = rest.find(")]").ok_or_else(bad)? + 2;
            let (term, tail) = rest.split_at(end);
            let (c, exps) = term.split_once("*z[(").ok_or_else(bad)?;
            let exps = exps.strip_suffix(")]").ok_or_else(bad)?;
            let mut c: BigInt = c.trim().parse().map_err(|_| bad())?;
            if negative {
                c = -c;
            }
            let exp: Vec<i64> = if exps.is_empty() {
                Vec::new()
            } else {
                exps.split(',').map(|e| e.trim().parse::<i64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?
            };
            if exp.len() != nvars {
                return Err(bad());
            }
            out.add_term(Monomial(exp), c);
            if tail.is_empty() {
                break;
            }
            if let Some(t) = tail.strip_prefix(" + ") {
                negative = false;
                rest = t;
            } else if let Some(t) = tail.strip_prefix(" - ") {
                negative = true;
                rest = t;
            } else {
                return Err(bad());
            }
        }
        Ok(out)
    }
}

impl FromStr for Monomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("bad exponent {s:?}")))?;
        inner
            .split(',')
            .map(|e| e.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent {s:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Monomial)
    }
}
