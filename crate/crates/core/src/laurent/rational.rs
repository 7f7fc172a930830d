use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{poly_gcd, Laurent};
use crate::error::{Error, Result};

/// A quotient of Laurent polynomials in canonical form:
///
/// * `den` is a polynomial not divisible by any variable, all monomial
///   factors live in the exponents of `num`;
/// * `num` and `den` share no common factor in `Z[z]` (integer content
///   included);
/// * the graded-lex smallest term of `den` has a positive coefficient.
///
/// Equal values therefore have equal representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalExpr {
    num: Laurent,
    den: Laurent,
}

fn negate(v: &[i64]) -> Vec<i64> {
    v.iter().map(|x| -x).collect()
}

impl RationalExpr {
    pub fn new(num: Laurent, den: Laurent) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZeroExpr);
        }
        let n = num.nvars();
        if num.is_zero() {
            return Ok(Self::zero(n));
        }
        let (alpha, beta) = (num.min_exponents(), den.min_exponents());
        let np = num.shift(&negate(&alpha));
        let dp = den.shift(&negate(&beta));
        let g = poly_gcd(&np, &dp);
        let (np, dp) = if g.is_one() {
            (np, dp)
        } else {
            (np.div_exact(&g).expect("gcd divides"), dp.div_exact(&g).expect("gcd divides"))
        };
        let shift: Vec<i64> = alpha.iter().zip(&beta).map(|(a, b)| a - b).collect();
        Ok(Self::signed(np.shift(&shift), dp))
    }

    /// Canonicalizes a quotient already known to be coprime up to monomials;
    /// only monomial factors and the sign are normalized.
    pub(crate) fn new_coprime(num: Laurent, den: Laurent) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return Self::zero(num.nvars());
        }
        let beta = den.min_exponents();
        let dp = den.shift(&negate(&beta));
        let np = num.shift(&negate(&beta));
        Self::signed(np, dp)
    }

    fn signed(num: Laurent, den: Laurent) -> Self {
        let negative = den.trailing().is_some_and(|(_, c)| c.is_negative());
        if negative {
            Self { num: -&num, den: -&den }
        } else {
            Self { num, den }
        }
    }

    pub fn zero(nvars: usize) -> Self {
        Self { num: Laurent::zero(nvars), den: Laurent::one(nvars) }
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_laurent(Laurent::one(nvars))
    }

    pub fn from_laurent(l: Laurent) -> Self {
        let n = l.nvars();
        if l.is_zero() {
            return Self::zero(n);
        }
        Self { num: l, den: Laurent::one(n) }
    }

    pub fn monomial(exp: &[i64]) -> Self {
        Self::from_laurent(Laurent::monomial(exp))
    }

    pub fn num(&self) -> &Laurent {
        &self.num
    }

    pub fn den(&self) -> &Laurent {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    /// Monomials stored in numerator plus denominator.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }

    /// The exponent if this is exactly `z^e`.
    pub fn as_monomial(&self) -> Option<Vec<i64>> {
        if !self.den.is_one() {
            return None;
        }
        let (m, c) = self.num.as_term()?;
        (*c == BigInt::from(1)).then(|| m.0.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::new(&self.num + &other.num, self.den.clone()).expect("nonzero denominator");
        }
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        Self::new(num, &self.den * &other.den).expect("nonzero denominator")
    }

    pub fn neg(&self) -> Self {
        Self { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product with cross-cancellation, so only the two smaller gcds are taken.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.nvars());
        }
        let (a, b) = split_monomial(&self.num);
        let (c, d) = split_monomial(&other.num);
        let g1 = poly_gcd(&b, &other.den);
        let g2 = poly_gcd(&d, &self.den);
        let b = b.div_exact(&g1).expect("gcd divides");
        let od = other.den.div_exact(&g1).expect("gcd divides");
        let d = d.div_exact(&g2).expect("gcd divides");
        let sd = self.den.div_exact(&g2).expect("gcd divides");
        let shift: Vec<i64> = a.iter().zip(&c).map(|(x, y)| x + y).collect();
        Self::signed((&b * &d).shift(&shift), &sd * &od)
    }

    /// [`Self::mul`] failing with `ExpressionTooLarge` when a product would
    /// exceed `cap` monomials.
    pub fn mul_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.nvars()));
        }
        let too_large = || Error::ExpressionTooLarge { cap };
        let (a, b) = split_monomial(&self.num);
        let (c, d) = split_monomial(&other.num);
        let g1 = poly_gcd(&b, &other.den);
        let g2 = poly_gcd(&d, &self.den);
        let b = b.div_exact(&g1).expect("gcd divides");
        let od = other.den.div_exact(&g1).expect("gcd divides");
        let d = d.div_exact(&g2).expect("gcd divides");
        let sd = self.den.div_exact(&g2).expect("gcd divides");
        let shift: Vec<i64> = a.iter().zip(&c).map(|(x, y)| x + y).collect();
        let num = b.mul_capped(&d, cap).ok_or_else(too_large)?;
        let den = sd.mul_capped(&od, cap).ok_or_else(too_large)?;
        Ok(Self::signed(num.shift(&shift), den))
    }

    /// [`Self::pow`] with the same cap on every intermediate.
    pub fn pow_capped(&self, e: i64, cap: usize) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = u32::try_from(e.unsigned_abs()).map_err(|_| Error::Overflow)?;
        if k == 0 {
            return Ok(Self::one(self.nvars()));
        }
        let too_large = || Error::ExpressionTooLarge { cap };
        let num = base.num.pow_capped(k, cap).ok_or_else(too_large)?;
        let den = base.den.pow_capped(k, cap).ok_or_else(too_large)?;
        Ok(Self::signed(num, den))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZeroExpr);
        }
        let (shift, core) = split_monomial(&self.num);
        Ok(Self::signed(self.den.shift(&negate(&shift)), core))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Integer power; coprime factors stay coprime so no gcd is needed.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = u32::try_from(e.unsigned_abs()).map_err(|_| Error::Overflow)?;
        if k == 0 {
            return Ok(Self::one(self.nvars()));
        }
        Ok(Self::signed(base.num.pow(k), base.den.pow(k)))
    }

    /// Value equality by cross-multiplication; the normative comparison.
    pub fn cross_eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::PoleAtPoint);
        }
        Ok(self.num.eval(point) / d)
    }

    /// Parses `L` or `(L)/(L)` where `L` is a rendered Laurent polynomial.
    pub fn parse(s: &str, nvars: usize) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('(') {
            let (num, den) = rest
                .split_once(")/(")
                .ok_or_else(|| Error::Parse(format!("bad rational expression {s:?}")))?;
            let den = den
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("bad rational expression {s:?}")))?;
            return Self::new(Laurent::parse(num, nvars)?, Laurent::parse(den, nvars)?);
        }
        Ok(Self::from_laurent(Laurent::parse(s, nvars)?))
    }
}

/// `p = z^shift * core` with `core` not divisible by any variable.
fn split_monomial(p: &Laurent) -> (Vec<i64>, Laurent) {
    let shift = p.min_exponents();
    let core = p.shift(&negate(&shift));
    (shift, core)
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
