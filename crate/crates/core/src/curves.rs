//! Curve configurations: co-oriented geodesics on the flat torus, and the
//! signed intersection ledger for configurations on a general surface.
//!
//! Curves are oriented along their class `v` and co-oriented by `v` rotated
//! by +90 degrees. The algebraic intersection number is `det(v_i, v_j)`.

use serde::{Deserialize, Serialize};

use crate::error::{check_index, Error, Result};
use crate::seed::{is_primitive, Quiver, Seed, SkewLattice};

/// A homology class in `H_1(T^2) = Z^2`.
pub type Class = [i64; 2];

/// `det(u, v)` with `u`, `v` as columns.
pub fn det(u: Class, v: Class) -> i64 {
    u[0] * v[1] - u[1] * v[0]
}

fn checked_det(u: Class, v: Class) -> Result<i64> {
    u[0].checked_mul(v[1])
        .zip(u[1].checked_mul(v[0]))
        .and_then(|(a, b)| a.checked_sub(b))
        .ok_or(Error::Overflow)
}

fn add_multiple(u: Class, c: i64, v: Class) -> Result<Class> {
    let f = |a: i64, b: i64| c.checked_mul(b).and_then(|cb| a.checked_add(cb)).ok_or(Error::Overflow);
    Ok([f(u[0], v[0])?, f(u[1], v[1])?])
}

/// Primitive classes of co-oriented closed geodesics on `R^2 / Z^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GeodesicJson", into = "GeodesicJson")]
pub struct GeodesicConfig {
    classes: Vec<Class>,
}

#[derive(Serialize, Deserialize)]
struct GeodesicJson {
    classes: Vec<Class>,
}

impl TryFrom<GeodesicJson> for GeodesicConfig {
    type Error = Error;
    fn try_from(j: GeodesicJson) -> Result<Self> {
        Self::new(j.classes)
    }
}

impl From<GeodesicConfig> for GeodesicJson {
    fn from(c: GeodesicConfig) -> Self {
        GeodesicJson { classes: c.classes }
    }
}

impl GeodesicConfig {
    pub fn new(classes: Vec<Class>) -> Result<Self> {
        if let Some(c) = classes.iter().find(|c| !is_primitive(&c[..])) {
            return Err(Error::NonPrimitiveClass(c[0], c[1]));
        }
        // every later determinant must fit in i64
        for u in &classes {
            for v in &classes {
                checked_det(*u, *v)?;
            }
        }
        Ok(Self { classes })
    }

    pub fn classes(&self) -> &[Class] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, i: usize) -> Result<Class> {
        check_index(i, self.len())?;
        Ok(self.classes[i])
    }

    /// Straightened ledger: all crossings of two geodesics have the same sign.
    pub fn ledger(&self) -> IntersectionLedger {
        IntersectionLedger::from_geodesics(self)
    }

    /// `v_k -> -v_k`, `v_i -> v_i + [det(v_i, v_k)]_+ v_k`.
    pub fn mutate(&self, k: usize) -> Result<Self> {
        check_index(k, self.len())?;
        let vk = self.classes[k];
        let classes = self
            .classes
            .iter()
            .enumerate()
            .map(|(i, &vi)| {
                if i == k {
                    Ok([-vk[0], -vk[1]])
                } else {
                    add_multiple(vi, checked_det(vi, vk)?.max(0), vk)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(classes)
    }

    pub fn mutate_word(&self, word: &[usize]) -> Result<Self> {
        word.iter().try_fold(self.clone(), |c, &k| c.mutate(k))
    }

    /// The seed `(H_1(T^2), {[C_i]})` with every `sigma_i = 1`.
    pub fn seed(&self) -> Seed {
        self.seed_with_signing(vec![true; self.len()]).expect("signing length matches")
    }

    pub fn seed_with_signing(&self, signing: Vec<bool>) -> Result<Seed> {
        let vectors = self.classes.iter().map(|c| c.to_vec()).collect();
        Seed::new_allow_degenerate(SkewLattice::torus(), vectors, signing)
    }
}

/// Positive crossing counts `P[i][j]` and self-crossing counts `s[i]`.
/// Negative crossings are read off the transpose.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LedgerJson", into = "LedgerJson")]
pub struct IntersectionLedger {
    p: Vec<Vec<u64>>,
    s: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct LedgerJson {
    #[serde(rename = "P")]
    p: Vec<Vec<u64>>,
    s: Vec<u64>,
}

impl TryFrom<LedgerJson> for IntersectionLedger {
    type Error = Error;
    fn try_from(j: LedgerJson) -> Result<Self> {
        Self::new(j.p, j.s)
    }
}

impl From<IntersectionLedger> for LedgerJson {
    fn from(l: IntersectionLedger) -> Self {
        LedgerJson { p: l.p, s: l.s }
    }
}

impl IntersectionLedger {
    pub fn new(p: Vec<Vec<u64>>, s: Vec<u64>) -> Result<Self> {
        let n = s.len();
        if p.len() != n || p.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidConfig("ledger P must be n x n with n = len(s)".into()));
        }
        if (0..n).any(|i| p[i][i] != 0) {
            return Err(Error::InvalidConfig("ledger P must have a zero diagonal".into()));
        }
        // algebraic intersections are taken in i64
        if p.iter().flatten().any(|&x| i64::try_from(x).is_err()) {
            return Err(Error::Overflow);
        }
        Ok(Self { p, s })
    }

    pub fn from_geodesics(cfg: &GeodesicConfig) -> Self {
        let c = cfg.classes();
        let p = c
            .iter()
            .map(|&vi| c.iter().map(|&vj| det(vi, vj).max(0) as u64).collect())
            .collect();
        Self { p, s: vec![0; c.len()] }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn positive(&self) -> &[Vec<u64>] {
        &self.p
    }

    pub fn self_intersections(&self) -> &[u64] {
        &self.s
    }

    /// `<C_i, C_j> = P[i][j] - P[j][i]`.
    pub fn algebraic(&self, i: usize, j: usize) -> i64 {
        self.p[i][j] as i64 - self.p[j][i] as i64
    }

    pub fn algebraic_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.algebraic(i, j)).collect()).collect()
    }

    /// Mutation is only defined at embedded curves.
    pub fn is_mutable(&self, k: usize) -> Result<bool> {
        check_index(k, self.len())?;
        Ok(self.s[k] == 0)
    }

    /// Twists every curve along `C_k` at its positive crossings with `C_k`
    /// and reverses the co-orientation of `C_k`.
    pub fn mutate(&self, k: usize) -> Result<Self> {
        check_index(k, self.len())?;
        if self.s[k] > 0 {
            return Err(Error::NotSimple(k));
        }
        let n = self.len();
        let p = &self.p;
        let prod = |a: u64, b: u64| a.checked_mul(b).ok_or(Error::Overflow);
        let mut out = vec![vec![0u64; n]; n];
        let mut s = self.s.clone();
        for i in 0..n {
            for j in 0..n {
                out[i][j] = if i == j {
                    0
                } else if i == k || j == k {
                    p[j][i]
                } else {
                    p[i][j].checked_add(prod(p[i][k], p[k][j])?).ok_or(Error::Overflow)?
                };
            }
            if i != k {
                s[i] = s[i].checked_add(prod(p[i][k], p[k][i])?).ok_or(Error::Overflow)?;
            }
        }
        Self::new(out, s)
    }

    /// The intersection quiver: `P[i][j]` arrows `i -> j`, one loop per
    /// self-crossing.
    pub fn quiver(&self) -> Quiver {
        Quiver::new(self.p.clone(), self.s.clone()).expect("ledger shape is a valid quiver")
    }
}

/// A curve configuration tracked jointly with its seed.
///
/// In geodesic mode the classes determine everything and the ledger is
/// re-straightened after every mutation. In ledger mode the crossing counts
/// are given explicitly and never auto-cancel; the seed lives on `Z^n` with
/// form `P - P^T`, and both the seed vectors and the (optional) classes are
/// updated by `v_i -> v_i + P[i][k] v_k`, which keeps
/// `P[i][j] - P[j][i] = {e_i, e_j}` exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    geodesic: bool,
    classes: Option<Vec<Class>>,
    ledger: IntersectionLedger,
    seed: Seed,
}

impl Configuration {
    pub fn geodesic(cfg: &GeodesicConfig, signing: Option<Vec<bool>>) -> Result<Self> {
        let signing = signing.unwrap_or_else(|| vec![true; cfg.len()]);
        Ok(Self {
            geodesic: true,
            classes: Some(cfg.classes().to_vec()),
            ledger: cfg.ledger(),
            seed: cfg.seed_with_signing(signing)?,
        })
    }

    pub fn with_ledger(classes: Option<Vec<Class>>, ledger: IntersectionLedger, signing: Option<Vec<bool>>) -> Result<Self> {
        let n = ledger.len();
        if let Some(c) = &classes {
            if c.len() != n {
                return Err(Error::InvalidConfig(format!("{} classes for {n} ledger curves", c.len())));
            }
            for i in 0..n {
                for j in 0..n {
                    if ledger.algebraic(i, j) != det(c[i], c[j]) {
                        return Err(Error::InvalidConfig(format!(
                            "P[{i}][{j}] - P[{j}][{i}] disagrees with det of the classes"
                        )));
                    }
                }
            }
        }
        let signing = signing.unwrap_or_else(|| vec![true; n]);
        let basis = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        let seed = Seed::new_allow_degenerate(SkewLattice::new(ledger.algebraic_matrix())?, basis, signing)?;
        Ok(Self { geodesic: false, classes, ledger, seed })
    }

    /// Reassembles a configuration from its stored parts, checking that the
    /// seed pairings agree with the ledger (and, in geodesic mode, that the
    /// ledger and vectors are the ones the classes determine).
    pub fn from_parts(
        geodesic: bool,
        classes: Option<Vec<Class>>,
        ledger: IntersectionLedger,
        seed: Seed,
    ) -> Result<Self> {
        let n = ledger.len();
        if seed.len() != n {
            return Err(Error::InvalidConfig(format!("{} seed vectors for {n} ledger curves", seed.len())));
        }
        if geodesic {
            let Some(c) = &classes else {
                return Err(Error::InvalidConfig("geodesic mode needs classes".into()));
            };
            let cfg = GeodesicConfig::new(c.clone())?;
            if cfg.ledger() != ledger || *seed.lattice() != SkewLattice::torus() {
                return Err(Error::InvalidConfig("ledger or lattice disagrees with the classes".into()));
            }
            if seed.vectors().iter().zip(c).any(|(e, v)| e[..] != v[..]) {
                return Err(Error::InvalidConfig("seed vectors disagree with the classes".into()));
            }
        } else if let Some(c) = &classes {
            if c.len() != n || (0..n).any(|i| (0..n).any(|j| ledger.algebraic(i, j) != det(c[i], c[j]))) {
                return Err(Error::InvalidConfig("classes disagree with the ledger".into()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if seed.pairing(i, j)? != ledger.algebraic(i, j) {
                    return Err(Error::InvalidConfig(format!("pairing of {i}, {j} disagrees with the ledger")));
                }
            }
        }
        Ok(Self { geodesic, classes, ledger, seed })
    }

    pub fn is_geodesic(&self) -> bool {
        self.geodesic
    }

    pub fn classes(&self) -> Option<&[Class]> {
        self.classes.as_deref()
    }

    pub fn ledger(&self) -> &IntersectionLedger {
        &self.ledger
    }

    pub fn seed(&self) -> &Seed {
        &self.seed
    }

    pub fn len(&self) -> usize {
        self.ledger.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ledger.is_empty()
    }

    pub fn is_mutable(&self, k: usize) -> Result<bool> {
        self.ledger.is_mutable(k)
    }

    pub fn mutable_indices(&self) -> Vec<bool> {
        self.ledger.self_intersections().iter().map(|&s| s == 0).collect()
    }

    pub fn mutate(&self, k: usize) -> Result<Self> {
        if !self.ledger.is_mutable(k)? {
            return Err(Error::NotSimple(k));
        }
        if self.geodesic {
            let classes = self.classes.as_ref().expect("geodesic mode has classes");
            let cfg = GeodesicConfig::new(classes.clone())?.mutate(k)?;
            return Ok(Self {
                geodesic: true,
                ledger: cfg.ledger(),
                seed: self.seed.mutate(k)?,
                classes: Some(cfg.classes),
            });
        }
        let p = self.ledger.positive();
        let coeff = |i: usize| -> Result<i64> {
            if i == k {
                Ok(-1)
            } else {
                i64::try_from(p[i][k]).map_err(|_| Error::Overflow)
            }
        };
        let classes = match &self.classes {
            None => None,
            Some(c) => Some(
                (0..c.len())
                    .map(|i| if i == k { Ok([-c[k][0], -c[k][1]]) } else { add_multiple(c[i], coeff(i)?, c[k]) })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let ek = &self.seed.vectors()[k];
        let vectors = self
            .seed
            .vectors()
            .iter()
            .enumerate()
            .map(|(i, ei)| {
                let c = coeff(i)?;
                if i == k {
                    return Ok(ek.iter().map(|x| -x).collect());
                }
                ei.iter()
                    .zip(ek)
                    .map(|(&a, &b)| c.checked_mul(b).and_then(|cb| a.checked_add(cb)).ok_or(Error::Overflow))
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            geodesic: false,
            classes,
            ledger: self.ledger.mutate(k)?,
            seed: self.seed.with_vectors(vectors)?,
        })
    }

    /// Parses `{"classes": [...]}` (geodesic mode) or
    /// `{"classes"?: [...], "ledger": {"P": .., "s": ..}}` (ledger mode); an
    /// optional `"signing": [0|1, ..]` defaults to all ones.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Input {
            classes: Option<Vec<Class>>,
            ledger: Option<IntersectionLedger>,
            signing: Option<Vec<u8>>,
        }
        let input: Input =
            serde_json::from_value(value.clone()).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let signing = input
            .signing
            .map(|s| {
                s.into_iter()
                    .map(|b| match b {
                        0 => Ok(false),
                        1 => Ok(true),
                        other => Err(Error::InvalidConfig(format!("signing entry {other} is not 0 or 1"))),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        match (input.classes, input.ledger) {
            (classes, Some(ledger)) => Self::with_ledger(classes, ledger, signing),
            (Some(classes), None) => Self::geodesic(&GeodesicConfig::new(classes)?, signing),
            (None, None) => Err(Error::InvalidConfig("configuration needs \"classes\" or \"ledger\"".into())),
        }
    }
}
