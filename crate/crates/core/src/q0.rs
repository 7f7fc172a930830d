//! Representations `(A, B, x: A -> B, y: B -> A)` of the cylinder-with-disk
//! quiver with invertible monodromies `m_A = 1 - yx`, `m_B = 1 - xy`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{Matrix, RationalRows};
use crate::Q;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Q0Rep<F> {
    a: usize,
    b: usize,
    /// `b x a`
    x: Matrix<F>,
    /// `a x b`
    y: Matrix<F>,
}

impl<F: Field> fmt::Debug for Q0Rep<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q0Rep(a={}, b={}, x={:?}, y={:?})", self.a, self.b, self.x, self.y)
    }
}

/// The simple objects.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Simple<F> {
    SA,
    SB,
    /// `(1, 1, x = [1], y = [1 - m])`, monodromy `m`.
    P(F),
}

impl<F: Field> fmt::Display for Simple<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Simple::SA => write!(f, "S_A"),
            Simple::SB => write!(f, "S_B"),
            Simple::P(m) => write!(f, "P({m})"),
        }
    }
}

impl<F: Field> Simple<F> {
    /// Image under mutation: `S_A <-> S_B`, `P(m) -> P(1/m)`.
    pub fn mutated(&self) -> Self {
        match self {
            Simple::SA => Simple::SB,
            Simple::SB => Simple::SA,
            Simple::P(m) => Simple::P(m.inv().expect("monodromy is nonzero")),
        }
    }

    pub fn rep(&self) -> Q0Rep<F> {
        match self {
            Simple::SA => Q0Rep::simple_a(),
            Simple::SB => Q0Rep::simple_b(),
            Simple::P(m) => Q0Rep::p(m.clone()).expect("monodromy is nonzero"),
        }
    }
}

/// A semisimple splitting with its change-of-basis witness: the columns of
/// `t_a`, `t_b` carry the standard direct sum onto the input.
#[derive(Clone, PartialEq, Eq)]
pub struct Decomposition<F> {
    /// Sorted multiset as `(simple, multiplicity)`.
    pub parts: Vec<(Simple<F>, usize)>,
    pub t_a: Matrix<F>,
    pub t_b: Matrix<F>,
}

impl<F: Field> fmt::Debug for Decomposition<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Decomposition")
            .field("parts", &self.parts)
            .field("t_a", &self.t_a)
            .field("t_b", &self.t_b)
            .finish()
    }
}

impl<F: Field> Decomposition<F> {
    /// `S_A^{..} + S_B^{..} + P(m_1)^{..} + ...` in the order of `parts`.
    pub fn standard_rep(&self) -> Q0Rep<F> {
        Q0Rep::from_parts(&self.parts)
    }

    pub fn mutated_parts(&self) -> Vec<(Simple<F>, usize)> {
        let mut out: Vec<_> = self.parts.iter().map(|(s, d)| (s.mutated(), *d)).collect();
        out.sort();
        out
    }
}

impl<F: Field> Q0Rep<F> {
    pub fn new(x: Matrix<F>, y: Matrix<F>) -> Result<Self> {
        let (b, a) = (x.rows(), x.cols());
        if y.rows() != a || y.cols() != b {
            return Err(Error::InvalidRep(format!("x is {b}x{a} so y must be {a}x{b}")));
        }
        let r = Self { a, b, x, y };
        if !r.m_a().is_invertible() || !r.m_b().is_invertible() {
            return Err(Error::InvalidRep("monodromies 1 - yx and 1 - xy must be invertible".into()));
        }
        Ok(r)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn x(&self) -> &Matrix<F> {
        &self.x
    }

    pub fn y(&self) -> &Matrix<F> {
        &self.y
    }

    pub fn m_a(&self) -> Matrix<F> {
        Matrix::identity(self.a).sub(&self.y.mul(&self.x))
    }

    pub fn m_b(&self) -> Matrix<F> {
        Matrix::identity(self.b).sub(&self.x.mul(&self.y))
    }

    pub fn simple_a() -> Self {
        Self { a: 1, b: 0, x: Matrix::zeros(0, 1), y: Matrix::zeros(1, 0) }
    }

    pub fn simple_b() -> Self {
        Self { a: 0, b: 1, x: Matrix::zeros(1, 0), y: Matrix::zeros(0, 1) }
    }

    /// `P(m) = (1, 1, [1], [1 - m])`.
    pub fn p(m: F) -> Result<Self> {
        if m.is_zero() {
            return Err(Error::ZeroMonodromy);
        }
        Ok(Self { a: 1, b: 1, x: Matrix::scalar(1, F::one()), y: Matrix::scalar(1, F::one().sub(&m)) })
    }

    /// `P_B^m = (1, 1, [1 - m], [1])`, the same simple with the roles of
    /// `x` and `y` swapped.
    pub fn p_b(m: F) -> Result<Self> {
        if m.is_zero() {
            return Err(Error::ZeroMonodromy);
        }
        Ok(Self { a: 1, b: 1, x: Matrix::scalar(1, F::one().sub(&m)), y: Matrix::scalar(1, F::one()) })
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self {
            a: self.a + other.a,
            b: self.b + other.b,
            x: self.x.direct_sum(&other.x),
            y: self.y.direct_sum(&other.y),
        }
    }

    pub fn from_parts(parts: &[(Simple<F>, usize)]) -> Self {
        let mut out = Self { a: 0, b: 0, x: Matrix::zeros(0, 0), y: Matrix::zeros(0, 0) };
        // S_A's first, then S_B's, then the P's, matching the decomposition witness.
        for pass in 0..3 {
            for (s, d) in parts {
                let hit = matches!((pass, s), (0, Simple::SA) | (1, Simple::SB) | (2, Simple::P(_)));
                if hit {
                    for _ in 0..*d {
                        out = out.direct_sum(&s.rep());
                    }
                }
            }
        }
        out
    }

    /// Transport of structure along invertible `t_a`, `t_b`: the rep
    /// `(t_b x t_a^{-1}, t_a y t_b^{-1})`.
    pub fn conjugate(&self, t_a: &Matrix<F>, t_b: &Matrix<F>) -> Result<Self> {
        let ia = t_a.inverse().ok_or_else(|| Error::InvalidRep("t_a is singular".into()))?;
        let ib = t_b.inverse().ok_or_else(|| Error::InvalidRep("t_b is singular".into()))?;
        Self::new(t_b.mul(&self.x).mul(&ia), t_a.mul(&self.y).mul(&ib))
    }

    /// `(B, A, -(1 - yx)^{-1} y, x)`.
    pub fn mutate(&self) -> Self {
        let inv = self.m_a().inverse().expect("m_A is invertible");
        let x_new = inv.mul(&self.y).neg();
        let out = Self { a: self.b, b: self.a, x: x_new, y: self.x.clone() };
        debug_assert_eq!(Some(out.m_a()), self.m_b().inverse());
        debug_assert_eq!(Some(out.m_b()), self.m_a().inverse());
        out
    }

    /// The isomorphism `r -> mutate(mutate(r))`: `f_A = 1`, `f_B = -m_B`.
    pub fn double_mutation_isomorphism(&self) -> (Matrix<F>, Matrix<F>) {
        (Matrix::identity(self.a), self.m_b().neg())
    }

    /// Whether `(f_a, f_b)` is a morphism `self -> other`.
    pub fn is_morphism(&self, other: &Self, f_a: &Matrix<F>, f_b: &Matrix<F>) -> bool {
        f_a.rows() == other.a
            && f_a.cols() == self.a
            && f_b.rows() == other.b
            && f_b.cols() == self.b
            && f_b.mul(&self.x) == other.x.mul(f_a)
            && f_a.mul(&self.y) == other.y.mul(f_b)
    }

    /// Basis of `Hom(self, other)` as pairs `(f_A, f_B)`.
    pub fn hom_basis(&self, other: &Self) -> Vec<(Matrix<F>, Matrix<F>)> {
        let (ar, br, as_, bs) = (self.a, self.b, other.a, other.b);
        let nfa = as_ * ar;
        let nvars = nfa + bs * br;
        let fa = |i: usize, j: usize| i * ar + j;
        let fb = |i: usize, j: usize| nfa + i * br + j;
        let mut rows: Vec<Vec<F>> = Vec::new();
        // f_B x_r - x_s f_A = 0, shape bs x ar
        for i in 0..bs {
            for j in 0..ar {
                let mut eq = vec![F::zero(); nvars];
                for l in 0..br {
                    eq[fb(i, l)] = eq[fb(i, l)].add(&self.x[(l, j)]);
                }
                for l in 0..as_ {
                    eq[fa(l, j)] = eq[fa(l, j)].sub(&other.x[(i, l)]);
                }
                rows.push(eq);
            }
        }
        // f_A y_r - y_s f_B = 0, shape as x br
        for i in 0..as_ {
            for j in 0..br {
                let mut eq = vec![F::zero(); nvars];
                for l in 0..ar {
                    eq[fa(i, l)] = eq[fa(i, l)].add(&self.y[(l, j)]);
                }
                for l in 0..bs {
                    eq[fb(l, j)] = eq[fb(l, j)].sub(&other.y[(i, l)]);
                }
                rows.push(eq);
            }
        }
        let kernel = if rows.is_empty() {
            (0..nvars).map(|v| (0..nvars).map(|w| if v == w { F::one() } else { F::zero() }).collect()).collect()
        } else {
            Matrix::from_rows(rows).expect("rectangular").kernel()
        };
        kernel
            .into_iter()
            .map(|v| {
                let a = Matrix::from_shape(as_, ar, v[..nfa].to_vec()).expect("shape");
                let b = Matrix::from_shape(bs, br, v[nfa..].to_vec()).expect("shape");
                (a, b)
            })
            .collect()
    }

    /// Searches `Hom(self, other)` for an isomorphism. Exhaustive over small
    /// finite fields; over infinite fields a deterministic sequence of
    /// integer combinations of a Hom basis is tried.
    pub fn find_isomorphism(&self, other: &Self) -> Option<(Matrix<F>, Matrix<F>)> {
        if self.dims() != other.dims() {
            return None;
        }
        let basis = self.hom_basis(other);
        let combine = |coeffs: &[F]| {
            let mut fa = Matrix::zeros(self.a, self.a);
            let mut fb = Matrix::zeros(self.b, self.b);
            for ((ba, bb), c) in basis.iter().zip(coeffs) {
                fa = fa.add(&ba.scale(c));
                fb = fb.add(&bb.scale(c));
            }
            (fa, fb)
        };
        let is_iso = |(fa, fb): &(Matrix<F>, Matrix<F>)| fa.is_invertible() && fb.is_invertible();
        let d = basis.len();
        if let Some(elems) = F::all_elements() {
            let total = (elems.len() as u64).checked_pow(d as u32);
            if total.is_some_and(|t| t <= 200_000) {
                let mut idx = vec![0usize; d];
                loop {
                    let coeffs: Vec<F> = idx.iter().map(|&i| elems[i].clone()).collect();
                    let cand = combine(&coeffs);
                    if is_iso(&cand) {
                        return Some(cand);
                    }
                    let mut pos = 0;
                    loop {
                        if pos == d {
                            return None;
                        }
                        idx[pos] += 1;
                        if idx[pos] < elems.len() {
                            break;
                        }
                        idx[pos] = 0;
                        pos += 1;
                    }
                }
            }
        }
        for trial in 0..400i64 {
            let coeffs: Vec<F> = (0..d as i64)
                .map(|i| F::from_i64((trial + 1) * (i + 2) * (i + 2) % 101 + i * trial % 7 + 1))
                .collect();
            let cand = combine(&coeffs);
            if is_iso(&cand) {
                return Some(cand);
            }
        }
        None
    }

    /// Splits into simples by eigenspace peeling of `yx`.
    pub fn decompose(&self) -> Result<Decomposition<F>> {
        let (a, b) = (self.a, self.b);
        let n = self.y.mul(&self.x);
        let roots = F::roots(&n.char_poly());
        let gen_kernel = |m: &Matrix<F>, dim: usize| -> Vec<Vec<F>> {
            if dim == 0 {
                return Vec::new();
            }
            m.pow(dim as i64).expect("nonnegative power").kernel()
        };
        let shifted = |lambda: &F| n.sub(&Matrix::scalar(a, lambda.clone()));
        let mut total = 0;
        let mut eigen: Vec<(F, Vec<Vec<F>>)> = Vec::new();
        let mut a0 = Vec::new();
        for lambda in &roots {
            let g = gen_kernel(&shifted(lambda), a);
            total += g.len();
            if lambda.is_zero() {
                a0 = g;
            } else {
                let e = shifted(lambda).kernel();
                if e.len() != g.len() {
                    return Err(Error::NotSemisimple);
                }
                eigen.push((lambda.clone(), e));
            }
        }
        if total != a {
            return Err(Error::NotSplitOverBase);
        }
        let b0 = gen_kernel(&self.x.mul(&self.y), b);
        if a0.iter().any(|v| self.x.mul_vec(v).iter().any(|c| !c.is_zero()))
            || b0.iter().any(|v| self.y.mul_vec(v).iter().any(|c| !c.is_zero()))
        {
            return Err(Error::NotSemisimple);
        }
        // order the P blocks by monodromy m = 1 - lambda
        let mut blocks: Vec<(F, Vec<Vec<F>>)> =
            eigen.into_iter().map(|(l, e)| (F::one().sub(&l), e)).collect();
        blocks.sort_by(|p, q| p.0.cmp(&q.0));
        let mut parts = Vec::new();
        if !a0.is_empty() {
            parts.push((Simple::SA, a0.len()));
        }
        if !b0.is_empty() {
            parts.push((Simple::SB, b0.len()));
        }
        let mut cols_a = a0.clone();
        let mut cols_b = b0.clone();
        for (m, vecs) in &blocks {
            parts.push((Simple::P(m.clone()), vecs.len()));
            for v in vecs {
                cols_a.push(v.clone());
                cols_b.push(self.x.mul_vec(v));
            }
        }
        let t_a = Matrix::from_columns(a, &cols_a);
        let t_b = Matrix::from_columns(b, &cols_b);
        if cols_a.len() != a || cols_b.len() != b || !t_a.is_invertible() || !t_b.is_invertible() {
            return Err(Error::NotSemisimple);
        }
        let dec = Decomposition { parts, t_a, t_b };
        let std = dec.standard_rep();
        // witness: the standard sum is carried onto self
        debug_assert!(std.is_morphism(self, &dec.t_a, &dec.t_b));
        if !std.is_morphism(self, &dec.t_a, &dec.t_b) {
            return Err(Error::NotSemisimple);
        }
        Ok(dec)
    }
}

impl Q0Rep<Q> {
    pub fn to_json(&self) -> Q0RepJson {
        Q0RepJson { a: self.a, b: self.b, x: self.x.to_strings(), y: self.y.to_strings() }
    }

    pub fn from_json(j: &Q0RepJson) -> Result<Self> {
        Self::new(Matrix::from_strings(j.b, j.a, &j.x)?, Matrix::from_strings(j.a, j.b, &j.y)?)
    }
}

/// `{"a": a, "b": b, "x": [[..]], "y": [[..]]}` with rational strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Q0RepJson {
    pub a: usize,
    pub b: usize,
    pub x: RationalRows,
    pub y: RationalRows,
}

/// Brute force over a finite field: every subrepresentation is enumerated,
/// which decides semisimplicity and gives a composition series directly.
pub mod oracle {
    use std::collections::BTreeSet;

    use super::{Q0Rep, Simple};
    use crate::error::Error;
    use crate::field::Field;
    use crate::linalg::Matrix;

    /// A composition factor; `Other` is a simple of larger dimension, which
    /// only exists when `yx` has eigenvalues outside the field.
    #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
    pub enum Factor<F> {
        Simple(Simple<F>),
        Other(usize, usize),
    }

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub struct Report<F> {
        pub semisimple: bool,
        /// Sorted.
        pub factors: Vec<Factor<F>>,
        pub subreps: usize,
    }

    type Space<F> = Vec<Vec<F>>;

    fn reduce<F: Field>(vectors: Vec<Vec<F>>, n: usize) -> Space<F> {
        if vectors.is_empty() || n == 0 {
            return Vec::new();
        }
        let m = Matrix::from_rows(vectors).expect("equal lengths").rref();
        m.to_rows().into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect()
    }

    fn contains<F: Field>(space: &Space<F>, v: &[F], n: usize) -> bool {
        let mut with = space.clone();
        with.push(v.to_vec());
        reduce(with, n).len() == space.len()
    }

    fn includes<F: Field>(big: &Space<F>, small: &Space<F>, n: usize) -> bool {
        small.iter().all(|v| contains(big, v, n))
    }

    fn subspaces<F: Field>(n: usize) -> Vec<Space<F>> {
        let elems = F::all_elements().expect("finite field");
        let mut vectors: Vec<Vec<F>> = vec![Vec::new()];
        for _ in 0..n {
            vectors = vectors
                .into_iter()
                .flat_map(|v| elems.iter().map(move |e| [v.clone(), vec![e.clone()]].concat()))
                .collect();
        }
        let mut seen: BTreeSet<Space<F>> = BTreeSet::from([Vec::new()]);
        let mut frontier = vec![Vec::new()];
        while let Some(s) = frontier.pop() {
            for v in &vectors {
                let mut with = s.clone();
                with.push(v.clone());
                let t = reduce(with, n);
                if seen.insert(t.clone()) {
                    frontier.push(t);
                }
            }
        }
        seen.into_iter().collect()
    }

    fn image<F: Field>(m: &Matrix<F>, v: &[F]) -> Vec<F> {
        m.mul_vec(v)
    }

    /// `None` unless the field is finite.
    pub fn analyze<F: Field>(r: &Q0Rep<F>) -> Option<Report<F>> {
        F::all_elements()?;
        let (a, b) = r.dims();
        let mut subs: Vec<(Space<F>, Space<F>)> = Vec::new();
        let sa = subspaces::<F>(a);
        let sb = subspaces::<F>(b);
        for u in &sa {
            for v in &sb {
                let x_ok = u.iter().all(|w| contains(v, &image(r.x(), w), b));
                let y_ok = v.iter().all(|w| contains(u, &image(r.y(), w), a));
                if x_ok && y_ok {
                    subs.push((u.clone(), v.clone()));
                }
            }
        }
        let dim = |s: &(Space<F>, Space<F>)| s.0.len() + s.1.len();
        let full = a + b;
        let semisimple = subs.iter().all(|w| {
            subs.iter().any(|c| {
                dim(w) + dim(c) == full
                    && reduce([w.0.clone(), c.0.clone()].concat(), a).len() == a
                    && reduce([w.1.clone(), c.1.clone()].concat(), b).len() == b
            })
        });
        let m_a = r.m_a();
        let mut factors = Vec::new();
        let mut cur: (Space<F>, Space<F>) = (Vec::new(), Vec::new());
        while dim(&cur) < full {
            let next = subs
                .iter()
                .filter(|s| dim(s) > dim(&cur) && includes(&s.0, &cur.0, a) && includes(&s.1, &cur.1, b))
                .min_by_key(|s| dim(s))
                .expect("the whole representation contains every subrepresentation")
                .clone();
            let (da, db) = (next.0.len() - cur.0.len(), next.1.len() - cur.1.len());
            factors.push(match (da, db) {
                (1, 0) => Factor::Simple(Simple::SA),
                (0, 1) => Factor::Simple(Simple::SB),
                (1, 1) => {
                    let u = next.0.iter().find(|u| !contains(&cur.0, u, a)).expect("new direction");
                    let mu = image(&m_a, u);
                    let lambda = F::all_elements()
                        .expect("finite")
                        .into_iter()
                        .find(|l| {
                            let d: Vec<F> = mu.iter().zip(u).map(|(p, q)| p.sub(&l.mul(q))).collect();
                            contains(&cur.0, &d, a)
                        })
                        .expect("m_A acts by a scalar on a one-dimensional quotient");
                    Factor::Simple(Simple::P(lambda))
                }
                _ => Factor::Other(da, db),
            });
            cur = next;
        }
        factors.sort();
        Some(Report { semisimple, factors, subreps: subs.len() })
    }

    /// Whether [`Q0Rep::decompose`] matches the brute-force report.
    pub fn agrees<F: Field>(r: &Q0Rep<F>) -> Option<bool> {
        let report = analyze(r)?;
        let split = report.factors.iter().all(|f| matches!(f, Factor::Simple(_)));
        Some(match r.decompose() {
            Ok(d) => {
                let mut listed: Vec<Factor<F>> = d
                    .parts
                    .iter()
                    .flat_map(|(s, m)| std::iter::repeat_n(Factor::Simple(s.clone()), *m))
                    .collect();
                listed.sort();
                report.semisimple && listed == report.factors && d.standard_rep().is_morphism(r, &d.t_a, &d.t_b)
            }
            Err(Error::NotSplitOverBase) => !split,
            Err(Error::NotSemisimple) => split && !report.semisimple,
            Err(_) => false,
        })
    }
}
