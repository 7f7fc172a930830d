//! Seeds, their mutation, and the (generalized) quivers attached to them.
//!
//! A seed lives in a fixed ambient lattice `Z^m` with an explicit integer
//! skew form. Its vectors keep their index positions under mutation.

use std::fmt::Write as _;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{check_index, Error, Result};

/// `Z^m` with a skew-symmetric integer form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SkewLattice {
    form: Vec<Vec<i64>>,
}

impl SkewLattice {
    pub fn new(form: Vec<Vec<i64>>) -> Result<Self> {
        let m = form.len();
        for (i, row) in form.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidSeed(format!("form row {i} has length {}, expected {m}", row.len())));
            }
        }
        for i in 0..m {
            for j in 0..m {
                if form[i][j] != -form[j][i] {
                    return Err(Error::InvalidSeed(format!("form is not skew-symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { form })
    }

    /// The rank-2 lattice `H_1(T^2)` with the intersection form `det`.
    pub fn torus() -> Self {
        Self { form: vec![vec![0, 1], vec![-1, 0]] }
    }

    pub fn rank(&self) -> usize {
        self.form.len()
    }

    pub fn form(&self) -> &[Vec<i64>] {
        &self.form
    }

    /// `{u, v} = u^T Ω v`, or `None` on overflow.
    pub fn checked_pair(&self, u: &[i64], v: &[i64]) -> Option<i64> {
        let mut acc: i128 = 0;
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for (j, &vj) in v.iter().enumerate() {
                acc = acc.checked_add(ui as i128 * self.form[i][j] as i128 * vj as i128)?;
            }
        }
        i64::try_from(acc).ok()
    }

    pub fn pair(&self, u: &[i64], v: &[i64]) -> i64 {
        self.checked_pair(u, v).expect("skew pairing overflowed i64")
    }

    /// The covector `{u, -}` written in the dual basis.
    pub fn contract(&self, u: &[i64]) -> Vec<i64> {
        self.checked_contract(u).expect("contraction overflowed i64")
    }

    pub fn checked_contract(&self, u: &[i64]) -> Option<Vec<i64>> {
        let m = self.rank();
        (0..m)
            .map(|j| {
                let acc: i128 = (0..m).map(|i| i128::from(u[i]) * i128::from(self.form[i][j])).sum();
                i64::try_from(acc).ok()
            })
            .collect()
    }
}

/// gcd of the entries; 0 for the zero vector.
pub fn content(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

pub fn is_primitive(v: &[i64]) -> bool {
    content(v) == 1
}

/// A seed: lattice, indexed primitive vectors and a signing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SeedJson", into = "SeedJson")]
pub struct Seed {
    lattice: SkewLattice,
    vectors: Vec<Vec<i64>>,
    signing: Vec<bool>,
    degenerate_vectors: bool,
}

impl Seed {
    /// Builds a seed, requiring nonzero, primitive, pairwise distinct vectors.
    pub fn new(lattice: SkewLattice, vectors: Vec<Vec<i64>>, signing: Vec<bool>) -> Result<Self> {
        let seed = Self::new_allow_degenerate(lattice, vectors, signing)?;
        if seed.degenerate_vectors {
            return Err(Error::InvalidSeed("seed vectors are not pairwise distinct".into()));
        }
        Ok(seed)
    }

    /// Like [`Seed::new`] but coinciding vectors only set the
    /// `degenerate_vectors` flag.
    pub fn new_allow_degenerate(lattice: SkewLattice, vectors: Vec<Vec<i64>>, signing: Vec<bool>) -> Result<Self> {
        let m = lattice.rank();
        if signing.len() != vectors.len() {
            return Err(Error::InvalidSeed(format!(
                "signing has length {}, expected {}",
                signing.len(),
                vectors.len()
            )));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != m {
                return Err(Error::InvalidSeed(format!("vector {i} has length {}, expected {m}", v.len())));
            }
            if !is_primitive(v) {
                return Err(Error::InvalidSeed(format!("vector {i} = {v:?} is not primitive")));
            }
            if lattice.pair(v, v) != 0 {
                return Err(Error::InvalidSeed(format!("vector {i} pairs nontrivially with itself")));
            }
        }
        check_pairings(&lattice, &vectors)?;
        let degenerate_vectors = has_duplicates(&vectors);
        Ok(Self { lattice, vectors, signing, degenerate_vectors })
    }

    /// The standard seed of a skew-symmetric exchange matrix: `e_i` the basis of `Z^n`.
    pub fn from_exchange_matrix(b: Vec<Vec<i64>>, signing: Vec<bool>) -> Result<Self> {
        let n = b.len();
        let lattice = SkewLattice::new(b)?;
        let vectors = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        Self::new(lattice, vectors, signing)
    }

    pub fn lattice(&self) -> &SkewLattice {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> Result<&[i64]> {
        check_index(i, self.len())?;
        Ok(&self.vectors[i])
    }

    pub fn signing(&self) -> &[bool] {
        &self.signing
    }

    pub fn degenerate_vectors(&self) -> bool {
        self.degenerate_vectors
    }

    /// `{e_i, e_j}`.
    pub fn pairing(&self, i: usize, j: usize) -> Result<i64> {
        check_index(i, self.len())?;
        check_index(j, self.len())?;
        self.lattice
            .checked_pair(&self.vectors[i], &self.vectors[j])
            .ok_or(Error::Overflow)
    }

    /// The exchange matrix `b_ij = {e_i, e_j}`.
    pub fn exchange_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.lattice.pair(&self.vectors[i], &self.vectors[j])).collect())
            .collect()
    }

    /// Seed mutation at `k`: `e_k -> -e_k`, `e_i -> e_i + [{e_i, e_k}]_+ e_k`.
    pub fn mutate(&self, k: usize) -> Result<Seed> {
        check_index(k, self.len())?;
        let ek = &self.vectors[k];
        let mut vectors = Vec::with_capacity(self.len());
        for (i, ei) in self.vectors.iter().enumerate() {
            if i == k {
                vectors.push(ei.iter().map(|x| -x).collect());
                continue;
            }
            let c = self.lattice.checked_pair(ei, ek).ok_or(Error::Overflow)?.max(0);
            vectors.push(add_multiple(ei, c, ek)?);
        }
        check_pairings(&self.lattice, &vectors)?;
        let degenerate_vectors = has_duplicates(&vectors);
        Ok(Seed {
            lattice: self.lattice.clone(),
            vectors,
            signing: self.signing.clone(),
            degenerate_vectors,
        })
    }

    /// Applies a mutation word (0-based indices) left to right.
    pub fn mutate_word(&self, word: &[usize]) -> Result<Seed> {
        word.iter().try_fold(self.clone(), |s, &k| s.mutate(k))
    }

    /// Replaces the vector tuple, keeping lattice and signing. Used by
    /// curve-configuration mutation, which follows the geometric crossing
    /// counts rather than the algebraic pairing.
    pub fn with_vectors(&self, vectors: Vec<Vec<i64>>) -> Result<Seed> {
        Seed::new_allow_degenerate(self.lattice.clone(), vectors, self.signing.clone())
    }

    /// Reindexes: position `i` of the result holds index `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Seed {
        Seed {
            lattice: self.lattice.clone(),
            vectors: perm.iter().map(|&p| self.vectors[p].clone()).collect(),
            signing: perm.iter().map(|&p| self.signing[p]).collect(),
            degenerate_vectors: self.degenerate_vectors,
        }
    }

    pub fn quiver(&self) -> Quiver {
        Quiver::of_seed(self)
    }
}

fn add_multiple(u: &[i64], c: i64, v: &[i64]) -> Result<Vec<i64>> {
    u.iter()
        .zip(v)
        .map(|(&a, &b)| c.checked_mul(b).and_then(|cb| a.checked_add(cb)).ok_or(Error::Overflow))
        .collect()
}

/// Every pairing and contraction the seed will be asked for fits in `i64`.
fn check_pairings(lattice: &SkewLattice, vectors: &[Vec<i64>]) -> Result<()> {
    for u in vectors {
        lattice.checked_contract(u).ok_or(Error::Overflow)?;
        for v in vectors {
            lattice.checked_pair(u, v).ok_or(Error::Overflow)?;
        }
    }
    Ok(())
}

fn has_duplicates(vectors: &[Vec<i64>]) -> bool {
    let mut sorted: Vec<&Vec<i64>> = vectors.iter().collect();
    sorted.sort();
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// Wire format `{"rank": m, "form": [[..]], "vectors": [[..]], "signing": [0|1, ..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedJson {
    pub rank: usize,
    pub form: Vec<Vec<i64>>,
    pub vectors: Vec<Vec<i64>>,
    pub signing: Vec<u8>,
}

impl TryFrom<SeedJson> for Seed {
    type Error = Error;

    fn try_from(j: SeedJson) -> Result<Self> {
        if j.form.len() != j.rank {
            return Err(Error::InvalidSeed(format!("form has {} rows, rank is {}", j.form.len(), j.rank)));
        }
        let signing = j
            .signing
            .iter()
            .map(|&s| match s {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::InvalidSeed(format!("signing entry {other} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Seed::new_allow_degenerate(SkewLattice::new(j.form)?, j.vectors, signing)
    }
}

impl From<Seed> for SeedJson {
    fn from(s: Seed) -> Self {
        SeedJson {
            rank: s.rank(),
            signing: s.signing.iter().map(|&b| u8::from(b)).collect(),
            form: s.lattice.form,
            vectors: s.vectors,
        }
    }
}

/// A quiver that may carry oriented 2-cycles and self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quiver {
    /// `arrows[i][j]` arrows `i -> j`; the diagonal stays zero.
    pub arrows: Vec<Vec<u64>>,
    /// Self-loop count per vertex.
    pub loops: Vec<u64>,
}

impl Quiver {
    pub fn new(arrows: Vec<Vec<u64>>, loops: Vec<u64>) -> Result<Self> {
        let n = arrows.len();
        if loops.len() != n || arrows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidQuiver("arrow matrix and loop vector sizes disagree".into()));
        }
        if (0..n).any(|i| arrows[i][i] != 0) {
            return Err(Error::InvalidQuiver("self-loops belong in `loops`, not on the diagonal".into()));
        }
        Ok(Self { arrows, loops })
    }

    pub fn empty(n: usize) -> Self {
        Self { arrows: vec![vec![0; n]; n], loops: vec![0; n] }
    }

    pub fn vertex_count(&self) -> usize {
        self.loops.len()
    }

    /// Reduced quiver of a seed: `[{e_i, e_j}]_+` arrows `i -> j`.
    pub fn of_seed(seed: &Seed) -> Self {
        Self::from_exchange_matrix(&seed.exchange_matrix())
    }

    /// Positive part of a skew-symmetric integer matrix.
    pub fn from_exchange_matrix(b: &[Vec<i64>]) -> Self {
        let arrows = b
            .iter()
            .map(|row| row.iter().map(|&x| x.max(0) as u64).collect())
            .collect();
        Self { arrows, loops: vec![0; b.len()] }
    }

    /// Signed arrow counts `a[i][j] - a[j][i]`; loops are ignored.
    pub fn exchange_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.vertex_count();
        (0..n)
            .map(|i| (0..n).map(|j| self.arrows[i][j] as i64 - self.arrows[j][i] as i64).collect())
            .collect()
    }

    pub fn total_arrows(&self) -> u64 {
        self.arrows.iter().flatten().sum::<u64>() + self.loops.iter().sum::<u64>()
    }

    /// Generalized mutation at a loop-free vertex: keep arrows away from `k`,
    /// reverse arrows at `k`, add one composite `i -> j` per path `i -> k -> j`.
    /// Composites with `i == j` become loops. No 2-cycles are cancelled.
    pub fn mutate(&self, k: usize) -> Result<Quiver> {
        let n = self.vertex_count();
        check_index(k, n)?;
        if self.loops[k] > 0 {
            return Err(Error::LoopAtVertex(k));
        }
        let a = &self.arrows;
        let mut out = Quiver::empty(n);
        out.loops.clone_from(&self.loops);
        for i in 0..n {
            for j in 0..n {
                if i == k || j == k {
                    out.arrows[i][j] = a[j][i];
                } else if i != j {
                    out.arrows[i][j] = a[i][j] + a[i][k] * a[k][j];
                }
            }
            if i != k {
                out.loops[i] += a[i][k] * a[k][i];
            }
        }
        Ok(out)
    }

    /// Erases loops and cancels 2-cycles.
    pub fn reduce(&self) -> Quiver {
        let n = self.vertex_count();
        let mut out = Quiver::empty(n);
        for i in 0..n {
            for j in 0..n {
                out.arrows[i][j] = self.arrows[i][j].saturating_sub(self.arrows[j][i]);
            }
        }
        out
    }

    pub fn is_two_acyclic(&self) -> bool {
        let n = self.vertex_count();
        self.loops.iter().all(|&l| l == 0)
            && (0..n).all(|i| (0..n).all(|j| self.arrows[i][j] == 0 || self.arrows[j][i] == 0))
    }

    /// DOT rendering: one edge per vertex pair with its multiplicity as label.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph quiver {\n");
        for i in 0..self.vertex_count() {
            let _ = writeln!(out, "  v{};", i + 1);
        }
        for (i, row) in self.arrows.iter().enumerate() {
            for (j, &m) in row.iter().enumerate() {
                if m > 0 {
                    let _ = writeln!(out, "  v{} -> v{} [label=\"{}\"];", i + 1, j + 1, m);
                }
            }
        }
        for (i, &l) in self.loops.iter().enumerate() {
            if l > 0 {
                let _ = writeln!(out, "  v{} -> v{} [label=\"{}\"];", i + 1, i + 1, l);
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Fomin–Zelevinsky matrix mutation:
/// `b'_ij = -b_ij` if `k ∈ {i, j}`, else `b_ij + sgn(b_ik) [b_ik b_kj]_+`.
pub fn mutate_exchange_matrix(b: &[Vec<i64>], k: usize) -> Result<Vec<Vec<i64>>> {
    let n = b.len();
    check_index(k, n)?;
    let mut out = b.to_vec();
    for i in 0..n {
        for j in 0..n {
            out[i][j] = if i == k || j == k {
                -b[i][j]
            } else {
                b[i][j] + b[i][k].signum() * (b[i][k] * b[k][j]).max(0)
            };
        }
    }
    Ok(out)
}
