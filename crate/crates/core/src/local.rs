//! Local systems on the torus: rank-1 characters and commuting matrix pairs,
//! and their mutation across a curve `C_k`.
//!
//! A path `γ` crossing the mutated curve picks up the factor
//! `(Id - Hol(v_k))^{c(γ)}` with `c(γ) = det(v_k, γ)`. This is the sign for
//! which the rank-1 formula is the evaluation of the signed (`σ = 1`) cluster
//! X-transformation of the curve seed.

use num_integer::Integer;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::curves::{det, Class, GeodesicConfig};
use crate::error::{Error, Result};
use crate::field::{format_rational, parse_rational};
use crate::linalg::{Matrix, RationalRows};
use crate::Q;

/// Holonomies `(x_a, x_b)` on the basis `a = (1,0)`, `b = (0,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CharacterJson", into = "CharacterJson")]
pub struct Character {
    a: Q,
    b: Q,
}

#[derive(Serialize, Deserialize)]
struct CharacterJson {
    a: String,
    b: String,
}

impl TryFrom<CharacterJson> for Character {
    type Error = Error;
    fn try_from(j: CharacterJson) -> Result<Self> {
        let parse = |s: &str| parse_rational(s).ok_or_else(|| Error::Parse(format!("bad rational {s:?}")));
        Self::new(parse(&j.a)?, parse(&j.b)?)
    }
}

impl From<Character> for CharacterJson {
    fn from(c: Character) -> Self {
        CharacterJson { a: format_rational(&c.a), b: format_rational(&c.b) }
    }
}

/// `u` with `det(u, v) = 1`, for primitive `v`.
pub fn complement(v: Class) -> Result<Class> {
    let g = v[0].extended_gcd(&v[1]);
    let (x, y) = match g.gcd {
        1 => (g.x, g.y),
        -1 => (-g.x, -g.y),
        _ => return Err(Error::NonPrimitiveClass(v[0], v[1])),
    };
    // x v0 + y v1 = 1, so det((y, -x), v) = y v1 + x v0 = 1
    Ok([y, -x])
}

impl Character {
    pub fn new(a: Q, b: Q) -> Result<Self> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::InvalidConfig("character values must be nonzero".into()));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &Q {
        &self.a
    }

    pub fn b(&self) -> &Q {
        &self.b
    }

    pub fn values(&self) -> [Q; 2] {
        [self.a.clone(), self.b.clone()]
    }

    /// `x(p, q) = x_a^p x_b^q`.
    pub fn holonomy(&self, cls: Class) -> Q {
        let p = i32::try_from(cls[0]).expect("class entry fits in i32");
        let q = i32::try_from(cls[1]).expect("class entry fits in i32");
        Pow::pow(&self.a, p) * Pow::pow(&self.b, q)
    }

    /// Mutation across a curve of class `vk`.
    pub fn mutate_at_class(&self, vk: Class) -> Result<Self> {
        let t = Q::one() - self.holonomy(vk);
        if t.is_zero() {
            return Err(Error::NotRegular);
        }
        let factor = |gamma: Class| -> Q {
            let c = i32::try_from(det(vk, gamma)).expect("crossing count fits in i32");
            Pow::pow(&t, c)
        };
        Self::new(&self.a * factor([1, 0]), &self.b * factor([0, 1]))
    }

    pub fn mutate(&self, cfg: &GeodesicConfig, k: usize) -> Result<Self> {
        self.mutate_at_class(cfg.class(k)?)
    }

    pub fn to_pair(&self) -> CommutingPair {
        CommutingPair::new(Matrix::scalar(1, self.a.clone()), Matrix::scalar(1, self.b.clone()))
            .expect("nonzero scalars commute")
    }
}

/// A rank-`n` local system: commuting invertible holonomies `A`, `B` on `a`, `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CommutingPair {
    a: Matrix<Q>,
    b: Matrix<Q>,
}

impl CommutingPair {
    pub fn new(a: Matrix<Q>, b: Matrix<Q>) -> Result<Self> {
        if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
            return Err(Error::InvalidConfig("holonomies must be square of equal size".into()));
        }
        if !a.is_invertible() || !b.is_invertible() {
            return Err(Error::InvalidConfig("holonomies must be invertible".into()));
        }
        if !a.commutes_with(&b) {
            return Err(Error::InvalidConfig("holonomies must commute".into()));
        }
        Ok(Self { a, b })
    }

    pub fn rank(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Matrix<Q> {
        &self.a
    }

    pub fn b(&self) -> &Matrix<Q> {
        &self.b
    }

    /// `A^p B^q`.
    pub fn holonomy(&self, cls: Class) -> Matrix<Q> {
        let ap = self.a.pow(cls[0]).expect("A is invertible");
        let bq = self.b.pow(cls[1]).expect("B is invertible");
        ap.mul(&bq)
    }

    /// Rank-n mutation across a curve of class `vk`, computed in a basis
    /// `(u, vk)` with `det(u, vk) = 1` and converted back to `(a, b)`.
    pub fn mutate_at_class(&self, vk: Class) -> Result<Self> {
        let n = self.rank();
        let h = self.holonomy(vk);
        let m = Matrix::identity(n).sub(&h);
        if !m.is_invertible() {
            return Err(Error::NotRegular);
        }
        let u = complement(vk)?;
        let hu = self.holonomy(u).mul(&m.pow(det(vk, u)).expect("invertible"));
        let hv = h;
        // a = v1 u - u1 vk, b = -v0 u + u0 vk
        let combine = |alpha: i64, beta: i64| -> Matrix<Q> {
            hu.pow(alpha).expect("invertible").mul(&hv.pow(beta).expect("invertible"))
        };
        let a = combine(vk[1], -u[1]);
        let b = combine(-vk[0], u[0]);
        Self::new(a, b)
    }

    pub fn mutate(&self, cfg: &GeodesicConfig, k: usize) -> Result<Self> {
        self.mutate_at_class(cfg.class(k)?)
    }

    pub fn to_json(&self) -> CommutingPairJson {
        CommutingPairJson { n: self.rank(), a: self.a.to_strings(), b: self.b.to_strings() }
    }

    pub fn from_json(j: &CommutingPairJson) -> Result<Self> {
        Self::new(Matrix::from_strings(j.n, j.n, &j.a)?, Matrix::from_strings(j.n, j.n, &j.b)?)
    }
}

/// Row-major rational matrices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutingPairJson {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: RationalRows,
    #[serde(rename = "B")]
    pub b: RationalRows,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q;

    fn ch(a: (i64, i64), b: (i64, i64)) -> Character {
        Character::new(q(a.0, a.1), q(b.0, b.1)).unwrap()
    }

    #[test]
    fn holonomy_examples() {
        assert_eq!(ch((3, 1), (5, 1)).holonomy([2, -1]), q(9, 5));
        let pair = CommutingPair::new(Matrix::from_i64(&[vec![1, 1], vec![0, 1]]), Matrix::identity(2)).unwrap();
        assert_eq!(pair.holonomy([3, 0]), Matrix::from_i64(&[vec![1, 3], vec![0, 1]]));
    }

    #[test]
    fn crossing_sign_example() {
        // v_k = b: x_b fixed, x_a picks up (1 - x_b)^{det(b, a)} = (1 - 3)^{-1}
        let out = ch((2, 1), (3, 1)).mutate_at_class([0, 1]).unwrap();
        assert_eq!(out, ch((-1, 1), (3, 1)));
        assert!(matches!(ch((2, 1), (1, 1)).mutate_at_class([0, 1]), Err(Error::NotRegular)));
    }

    #[test]
    fn complement_has_unit_determinant() {
        for v in [[0, 1], [1, 0], [-2, -1], [5, -3], [-7, 4], [0, -1]] {
            assert_eq!(det(complement(v).unwrap(), v), 1);
        }
        assert!(complement([2, 4]).is_err());
    }

    #[test]
    fn diagonal_pair_splits_into_characters() {
        let a = Matrix::from_i64(&[vec![2, 0], vec![0, 5]]);
        let b = Matrix::from_i64(&[vec![3, 0], vec![0, 7]]);
        let out = CommutingPair::new(a, b).unwrap().mutate_at_class([0, 1]).unwrap();
        let top = ch((2, 1), (3, 1)).mutate_at_class([0, 1]).unwrap();
        let bottom = ch((5, 1), (7, 1)).mutate_at_class([0, 1]).unwrap();
        assert_eq!(out.a()[(0, 0)], *top.a());
        assert_eq!(out.a()[(1, 1)], *bottom.a());
        assert_eq!(out.b()[(0, 0)], *top.b());
        assert_eq!(out.b()[(1, 1)], *bottom.b());
        assert!(out.a()[(0, 1)].is_zero() && out.a()[(1, 0)].is_zero());
    }

    #[test]
    fn json_round_trip() {
        let c = ch((-3, 6), (4, 1));
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"a":"-1/2","b":"4"}"#);
        assert_eq!(serde_json::from_str::<Character>(&s).unwrap(), c);
        let pair = c.to_pair();
        assert_eq!(CommutingPair::from_json(&pair.to_json()).unwrap(), pair);
    }
}
