use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::{Laurent, RationalExpr};
use crate::error::{check_index, Error, Result};
use crate::seed::Seed;

/// A birational self-map of the rank-`m` torus, stored as the pullbacks of
/// the coordinate monomials `z^{b_1}, ..., z^{b_m}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalMap {
    images: Vec<RationalExpr>,
}

fn unit_vector(m: usize, j: usize) -> Vec<i64> {
    let mut v = vec![0; m];
    v[j] = 1;
    v
}

impl RationalMap {
    pub fn new(images: Vec<RationalExpr>) -> Result<Self> {
        let m = images.len();
        for img in &images {
            if img.nvars() != m {
                return Err(Error::RankMismatch(m, img.nvars()));
            }
            if img.is_zero() {
                return Err(Error::DivisionByZeroExpr);
            }
        }
        Ok(Self { images })
    }

    pub fn identity(m: usize) -> Self {
        Self { images: (0..m).map(|j| RationalExpr::monomial(&unit_vector(m, j))).collect() }
    }

    /// The monomial map `z^{b_j} -> signs[j] * z^{columns[j]}`.
    pub fn monomial(columns: &[Vec<i64>], signs: &[i64]) -> Result<Self> {
        let images = columns
            .iter()
            .zip(signs)
            .map(|(c, s)| RationalExpr::from_laurent(Laurent::term(c.clone(), BigInt::from(*s))))
            .collect();
        Self::new(images)
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[RationalExpr] {
        &self.images
    }

    pub fn into_images(self) -> Vec<RationalExpr> {
        self.images
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rank())
    }

    /// Largest monomial count over the coordinate images.
    pub fn size(&self) -> usize {
        self.images.iter().map(RationalExpr::size).max().unwrap_or(0)
    }

    /// The cluster X-transformation at `k`:
    /// `z^n -> z^n (1 + eps z^{e_k})^{{e_k, n}}` with `eps = (-1)^{sigma_k}`
    /// when `signed`, else `eps = 1`.
    pub fn x_mutation(seed: &Seed, k: usize, signed: bool) -> Result<Self> {
        check_index(k, seed.len())?;
        let m = seed.lattice().rank();
        let ek = &seed.vectors()[k];
        let eps = if signed && seed.signing()[k] { -1 } else { 1 };
        let row = seed.lattice().contract(ek);
        let factor = RationalExpr::from_laurent(Laurent::one_plus(ek, eps));
        let images = (0..m)
            .map(|j| {
                let base = RationalExpr::monomial(&unit_vector(m, j));
                Ok(if row[j] == 0 { base } else { base.mul(&factor.pow(row[j])?) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { images })
    }

    /// The cluster A-transformation at `k` on the dual torus:
    /// `z^f -> z^f (1 + eps z^{{e_k,-}})^{-<e_k, f>}`.
    pub fn a_mutation(seed: &Seed, k: usize, signed: bool) -> Result<Self> {
        check_index(k, seed.len())?;
        let m = seed.lattice().rank();
        let ek = &seed.vectors()[k];
        let eps = if signed && seed.signing()[k] { -1 } else { 1 };
        let w = seed.lattice().contract(ek);
        if w.iter().all(|&x| x == 0) {
            return Err(Error::NonMonomialConstant);
        }
        let factor = RationalExpr::from_laurent(Laurent::one_plus(&w, eps));
        let images = (0..m)
            .map(|j| {
                let base = RationalExpr::monomial(&unit_vector(m, j));
                Ok(if ek[j] == 0 { base } else { base.mul(&factor.pow(-ek[j])?) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { images })
    }

    /// `f^*(z^exp)`.
    pub fn pullback_monomial(&self, exp: &[i64]) -> Result<RationalExpr> {
        let mut acc = RationalExpr::one(self.rank());
        for (img, &e) in self.images.iter().zip(exp) {
            if e != 0 {
                acc = acc.mul(&img.pow(e)?);
            }
        }
        Ok(acc)
    }

    /// `f^*(r)`, substituting the images into `r`.
    pub fn pullback(&self, r: &RationalExpr) -> Result<RationalExpr> {
        if r.nvars() != self.rank() {
            return Err(Error::RankMismatch(self.rank(), r.nvars()));
        }
        if let Some(exp) = r.as_monomial() {
            return self.pullback_monomial(&exp);
        }
        let (na, xa_num, xa_den) = self.pullback_parts(r.num());
        if r.is_laurent() {
            return RationalExpr::new(&na * &xa_num, xa_den);
        }
        let (nb, xb_num, xb_den) = self.pullback_parts(r.den());
        let den = &(&xa_den * &nb) * &xb_num;
        if den.is_zero() {
            return Err(Error::DivisionByZeroExpr);
        }
        RationalExpr::new(&(&na * &xa_num) * &xb_den, den)
    }

    /// `f^*(L) = N * extra_num / extra_den` with all three Laurent: each term
    /// is brought over the common denominator `prod p_j^{-lo_j} q_j^{hi_j}`
    /// where `p_j / q_j` is the j-th image.
    fn pullback_parts(&self, l: &Laurent) -> (Laurent, Laurent, Laurent) {
        let m = self.rank();
        let lo = l.min_exponents();
        let hi = l.max_exponents();
        let span: Vec<usize> = lo.iter().zip(&hi).map(|(a, b)| (b - a) as usize).collect();
        let p_pow: Vec<Vec<Laurent>> =
            (0..m).map(|j| powers(self.images[j].num(), span[j])).collect();
        let q_pow: Vec<Vec<Laurent>> =
            (0..m).map(|j| powers(self.images[j].den(), span[j])).collect();
        let mut n = Laurent::zero(m);
        for (mono, c) in l.terms() {
            let mut t = Laurent::constant(m, c.clone());
            for j in 0..m {
                let up = (mono.0[j] - lo[j]) as usize;
                let down = (hi[j] - mono.0[j]) as usize;
                if up > 0 {
                    t = &t * &p_pow[j][up];
                }
                if down > 0 {
                    t = &t * &q_pow[j][down];
                }
            }
            n = &n + &t;
        }
        // remaining factor prod p_j^{lo_j} q_j^{-hi_j}
        let mut xn = Laurent::one(m);
        let mut xd = Laurent::one(m);
        for j in 0..m {
            let (p, q) = (self.images[j].num(), self.images[j].den());
            if lo[j] > 0 {
                xn = &xn * &p.pow(lo[j] as u32);
            } else if lo[j] < 0 {
                xd = &xd * &p.pow((-lo[j]) as u32);
            }
            if hi[j] > 0 {
                xd = &xd * &q.pow(hi[j] as u32);
            } else if hi[j] < 0 {
                xn = &xn * &q.pow((-hi[j]) as u32);
            }
        }
        (n, xn, xd)
    }

    /// `f o g`, whose pullback is `g^* o f^*`. Coordinates are computed in
    /// parallel; each one is independent so the result is deterministic.
    pub fn compose(f: &Self, g: &Self) -> Result<Self> {
        if f.rank() != g.rank() {
            return Err(Error::RankMismatch(f.rank(), g.rank()));
        }
        let images = f.images.par_iter().map(|img| g.pullback(img)).collect::<Result<Vec<_>>>()?;
        Self::new(images)
    }

    /// The map in coordinates: the point's j-th entry is the value of `z^{b_j}`.
    /// Fails unless both the point and its image lie on the torus.
    pub fn evaluate(&self, point: &[BigRational]) -> Result<Vec<BigRational>> {
        if point.len() != self.rank() {
            return Err(Error::RankMismatch(self.rank(), point.len()));
        }
        if point.iter().any(Zero::is_zero) {
            return Err(Error::PoleAtPoint);
        }
        let values = self.images.iter().map(|img| img.eval(point)).collect::<Result<Vec<_>>>()?;
        // A vanishing coordinate leaves the torus: the inverse has a pole there.
        if values.iter().any(Zero::is_zero) {
            return Err(Error::PoleAtPoint);
        }
        Ok(values)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.images.iter().map(ToString::to_string).collect()
    }

    pub fn from_strings(images: &[String]) -> Result<Self> {
        let m = images.len();
        Self::new(images.iter().map(|s| RationalExpr::parse(s, m)).collect::<Result<Vec<_>>>()?)
    }
}

fn powers(p: &Laurent, upto: usize) -> Vec<Laurent> {
    let mut out = Vec::with_capacity(upto + 1);
    out.push(Laurent::one(p.nvars()));
    for i in 1..=upto {
        let next = &out[i - 1] * p;
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{Seed, SkewLattice};

    fn a2(signing: Vec<bool>) -> Seed {
        Seed::new(SkewLattice::torus(), vec![vec![1, 0], vec![0, 1]], signing).unwrap()
    }

    fn r(s: &str) -> RationalExpr {
        RationalExpr::parse(s, 2).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn a2_x_maps() {
        let f = RationalMap::x_mutation(&a2(vec![false, false]), 0, false).unwrap();
        assert_eq!(f.images()[0], r("1*z[(1,0)]"));
        assert_eq!(f.images()[1], r("1*z[(1,1)] + 1*z[(0,1)]"));
        assert_eq!(f.evaluate(&[q(2), q(3)]).unwrap(), vec![q(2), q(9)]);
        let g = RationalMap::x_mutation(&a2(vec![true, false]), 0, true).unwrap();
        assert_eq!(g.images()[1], r("-1*z[(1,1)] + 1*z[(0,1)]"));
        assert!(matches!(g.evaluate(&[q(1), q(5)]), Err(Error::PoleAtPoint)));
    }

    #[test]
    fn a2_a_map() {
        let f = RationalMap::a_mutation(&a2(vec![false, false]), 0, false).unwrap();
        assert_eq!(f.images()[0], r("(1*z[(1,0)])/(1*z[(0,1)] + 1*z[(0,0)])"));
        assert_eq!(f.images()[1], r("1*z[(0,1)]"));
        let zero = Seed::new(SkewLattice::new(vec![vec![0]]).unwrap(), vec![vec![1]], vec![false]).unwrap();
        assert!(matches!(RationalMap::a_mutation(&zero, 0, false), Err(Error::NonMonomialConstant)));
    }

    #[test]
    fn composition_identity_laws() {
        let f = RationalMap::x_mutation(&a2(vec![false, false]), 1, false).unwrap();
        let id = RationalMap::identity(2);
        assert_eq!(RationalMap::compose(&id, &f).unwrap(), f);
        assert_eq!(RationalMap::compose(&f, &id).unwrap(), f);
    }

    #[test]
    fn composition_matches_pointwise() {
        let s = a2(vec![false, false]);
        let f = RationalMap::x_mutation(&s, 0, false).unwrap();
        let g = RationalMap::x_mutation(&s, 1, false).unwrap();
        let fg = RationalMap::compose(&f, &g).unwrap();
        // (f o g)(p) = f(g(p))
        let p = [q(2), q(5)];
        assert_eq!(fg.evaluate(&p).unwrap(), f.evaluate(&g.evaluate(&p).unwrap()).unwrap());
    }

    #[test]
    fn string_round_trip() {
        let f = RationalMap::a_mutation(&a2(vec![true, true]), 1, true).unwrap();
        assert_eq!(RationalMap::from_strings(&f.to_strings()).unwrap(), f);
    }
}
