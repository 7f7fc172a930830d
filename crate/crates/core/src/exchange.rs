//! Decorated seeds and the exchange graph.
//!
//! A decorated seed carries its chart: the composite X-transformation from
//! the root torus. Its X-variables `X_i = chart^*(z^{e_i})` together with the
//! exchange matrix identify the vertex, up to simultaneous relabeling.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::curves::Configuration;
use crate::error::{check_index, Error, Result};
use crate::laurent::{RationalExpr, RationalMap};
use crate::seed::{mutate_exchange_matrix, Seed};

/// Default cap on the monomials of any expression produced while exploring.
pub const DEFAULT_MONOMIAL_BUDGET: usize = 10_000;

/// Reads `MUTWB_BUDGET`, falling back to [`DEFAULT_MONOMIAL_BUDGET`].
pub fn monomial_budget_from_env() -> usize {
    std::env::var("MUTWB_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&b: &usize| b > 0)
        .unwrap_or(DEFAULT_MONOMIAL_BUDGET)
}

/// Something carrying a seed that can be mutated, possibly refusing some
/// directions.
pub trait MutationState: Clone + Send + Sync {
    fn seed(&self) -> &Seed;
    /// `Ok(None)` when mutation at `k` is not allowed from this state.
    fn try_mutate(&self, k: usize) -> Result<Option<Self>>;
}

impl MutationState for Seed {
    fn seed(&self) -> &Seed {
        self
    }

    fn try_mutate(&self, k: usize) -> Result<Option<Self>> {
        self.mutate(k).map(Some)
    }
}

impl MutationState for Configuration {
    fn seed(&self) -> &Seed {
        Configuration::seed(self)
    }

    fn try_mutate(&self, k: usize) -> Result<Option<Self>> {
        if !self.is_mutable(k)? {
            return Ok(None);
        }
        self.mutate(k).map(Some)
    }
}

/// Prime for the evaluation fingerprints.
pub const FINGERPRINT_PRIME: u64 = (1 << 61) - 1;
const POINTS: usize = 4;

/// Values of one X-variable at the fixed evaluation points, modulo
/// [`FINGERPRINT_PRIME`].
pub type Fingerprint = [u64; POINTS];

fn fp_mul(a: u64, b: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(FINGERPRINT_PRIME)) as u64
}

fn fp_pow(a: u64, e: i64) -> Result<u64> {
    let p = FINGERPRINT_PRIME;
    let mut base = if e < 0 {
        if a == 0 {
            return Err(Error::PoleAtPoint);
        }
        fp_pow(a, i64::try_from(p - 2).expect("fits"))?
    } else {
        a
    };
    let mut e = e.unsigned_abs();
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mul(acc, base);
        }
        base = fp_mul(base, base);
        e >>= 1;
    }
    Ok(acc)
}

/// Coordinate `j` of evaluation point `t`: a fixed scrambling of `(t, j)`.
fn point_coordinate(t: usize, j: usize) -> u64 {
    let mut z = (t as u64) << 32 ^ (j as u64) ^ 0x9e37_79b9_7f4a_7c15;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    z % (FINGERPRINT_PRIME - 2) + 2
}

fn fingerprint_of_monomial(e: &[i64]) -> Result<Fingerprint> {
    let mut out = [1; POINTS];
    for (t, slot) in out.iter_mut().enumerate() {
        for (j, &x) in e.iter().enumerate() {
            *slot = fp_mul(*slot, fp_pow(point_coordinate(t, j), x)?);
        }
    }
    Ok(out)
}

/// Evaluates an expression at the fingerprint points.
pub fn fingerprint_of(r: &RationalExpr) -> Result<Fingerprint> {
    let p = num_bigint::BigInt::from(FINGERPRINT_PRIME);
    let eval = |l: &crate::laurent::Laurent, t: usize| -> Result<u64> {
        let mut total = 0u64;
        for (m, c) in l.terms() {
            let mut v = u64::try_from(num_integer::Integer::mod_floor(c, &p)).expect("reduced");
            for (j, &x) in m.0.iter().enumerate() {
                v = fp_mul(v, fp_pow(point_coordinate(t, j), x)?);
            }
            total = (total + v) % FINGERPRINT_PRIME;
        }
        Ok(total)
    };
    let mut out = [0; POINTS];
    for (t, slot) in out.iter_mut().enumerate() {
        let d = eval(r.den(), t)?;
        *slot = fp_mul(eval(r.num(), t)?, fp_pow(d, -1)?);
    }
    Ok(out)
}

/// How decorated seeds are told apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// Canonical renderings of the X-variables as exact rational functions.
    Exact,
    /// Values of the X-variables at fixed points modulo a 61-bit prime.
    /// Equal functions always agree; distinct ones collide with probability
    /// of order `degree / 2^61`. No expressions are kept, so there is no
    /// size limit.
    Fingerprint,
}

#[derive(Debug, Clone)]
struct Exact {
    chart: RationalMap,
    xvars: Vec<RationalExpr>,
}

/// A state together with its chart and X-variables.
#[derive(Debug, Clone)]
pub struct DecoratedSeed<S> {
    state: S,
    exact: Option<Exact>,
    fingerprint: Vec<Fingerprint>,
    signed: bool,
    cap: usize,
}

impl<S: MutationState> DecoratedSeed<S> {
    /// The root: identity chart, `X_i = z^{e_i}`, exact identity, and the
    /// monomial cap taken from the environment.
    pub fn root(state: S, signed: bool) -> Self {
        let m = state.seed().rank();
        let xvars = state.seed().vectors().iter().map(|e| RationalExpr::monomial(e)).collect();
        let fingerprint = state
            .seed()
            .vectors()
            .iter()
            .map(|e| fingerprint_of_monomial(e))
            .collect::<Result<Vec<_>>>()
            .expect("points are nonzero");
        Self {
            state,
            exact: Some(Exact { chart: RationalMap::identity(m), xvars }),
            fingerprint,
            signed,
            cap: monomial_budget_from_env(),
        }
    }

    /// A root that keeps only fingerprints.
    pub fn root_fingerprint(state: S, signed: bool) -> Self {
        let mut d = Self::root(state, signed);
        d.exact = None;
        d
    }

    pub fn with_identity(mut self, identity: Identity) -> Self {
        if identity == Identity::Fingerprint {
            self.exact = None;
        }
        self
    }

    /// Caps the monomial count of every expression built by later mutations.
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// Reassembles a decorated seed, deriving the X-variables from the chart.
    pub fn from_parts(state: S, chart: RationalMap, signed: bool) -> Result<Self> {
        if chart.rank() != state.seed().rank() {
            return Err(Error::RankMismatch(state.seed().rank(), chart.rank()));
        }
        let xvars = xvars_of(state.seed(), &chart)?;
        let fingerprint = xvars.iter().map(fingerprint_of).collect::<Result<Vec<_>>>()?;
        Ok(Self { state, exact: Some(Exact { chart, xvars }), fingerprint, signed, cap: monomial_budget_from_env() })
    }

    pub fn identity(&self) -> Identity {
        if self.exact.is_some() {
            Identity::Exact
        } else {
            Identity::Fingerprint
        }
    }

    pub fn state(&self) -> &S {
        &self.state
    }

    pub fn seed(&self) -> &Seed {
        self.state.seed()
    }

    /// The chart, unless only fingerprints are kept.
    pub fn chart(&self) -> Option<&RationalMap> {
        self.exact.as_ref().map(|e| &e.chart)
    }

    pub fn xvars(&self) -> Option<&[RationalExpr]> {
        self.exact.as_ref().map(|e| e.xvars.as_slice())
    }

    pub fn fingerprint(&self) -> &[Fingerprint] {
        &self.fingerprint
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Largest monomial count among the chart images and X-variables.
    pub fn size(&self) -> usize {
        self.exact.as_ref().map_or(0, |e| {
            e.chart.size().max(e.xvars.iter().map(RationalExpr::size).max().unwrap_or(0))
        })
    }

    /// Mutation at `k`, or `Ok(None)` if the state refuses it.
    ///
    /// With `F = 1 + eps X_k` the chart images pick up `F^{{e_k, b_j}}` and,
    /// writing `e'_i = e_i + c_i e_k`, the X-variables become
    /// `X'_i = X_i X_k^{c_i} F^{{e_k, e_i}}`; in particular `X'_k = 1 / X_k`.
    /// Fails with `ExpressionTooLarge` if any product exceeds the cap.
    pub fn mutate(&self, k: usize) -> Result<Option<Self>> {
        check_index(k, self.seed().len())?;
        let Some(state) = self.state.try_mutate(k)? else { return Ok(None) };
        let old = self.seed();
        let ek = &old.vectors()[k];
        let eps: i64 = if self.signed && old.signing()[k] { -1 } else { 1 };
        let coeffs: Vec<(i64, i64)> = (0..old.len())
            .map(|i| {
                let c = transvection_coefficient(&old.vectors()[i], &state.seed().vectors()[i], ek)?;
                Ok((c, old.lattice().pair(ek, &old.vectors()[i])))
            })
            .collect::<Result<_>>()?;

        let mut fingerprint = self.fingerprint.clone();
        let xk = self.fingerprint[k];
        for t in 0..POINTS {
            let f = if eps == 1 { (1 + xk[t]) % FINGERPRINT_PRIME } else { (1 + FINGERPRINT_PRIME - xk[t]) % FINGERPRINT_PRIME };
            if f == 0 || xk[t] == 0 {
                return Err(Error::PoleAtPoint);
            }
            for (i, &(c, b)) in coeffs.iter().enumerate() {
                fingerprint[i][t] = if i == k {
                    fp_pow(xk[t], -1)?
                } else {
                    fp_mul(fp_mul(self.fingerprint[i][t], fp_pow(xk[t], c)?), fp_pow(f, b)?)
                };
            }
        }

        let exact = match &self.exact {
            None => None,
            Some(ex) => Some(self.mutate_exact(ex, k, eps, &coeffs)?),
        };
        Ok(Some(Self { state, exact, fingerprint, signed: self.signed, cap: self.cap }))
    }

    fn mutate_exact(&self, ex: &Exact, k: usize, eps: i64, coeffs: &[(i64, i64)]) -> Result<Exact> {
        let cap = self.cap;
        let old = self.seed();
        let xk = &ex.xvars[k];
        let f_num = xk.den() + &xk.num().scale(&eps.into());
        if f_num.is_zero() {
            return Err(Error::DivisionByZeroExpr);
        }
        let factor = RationalExpr::new_coprime(f_num, xk.den().clone());
        let row = old.lattice().contract(&old.vectors()[k]);
        let mut powers: BTreeMap<i64, RationalExpr> = BTreeMap::new();
        let mut power = |e: i64| -> Result<RationalExpr> {
            if let Some(p) = powers.get(&e) {
                return Ok(p.clone());
            }
            let p = factor.pow_capped(e, cap)?;
            powers.insert(e, p.clone());
            Ok(p)
        };
        let mut images = Vec::with_capacity(row.len());
        for (img, &r) in ex.chart.images().iter().zip(&row) {
            images.push(if r == 0 { img.clone() } else { img.mul_capped(&power(r)?, cap)? });
        }
        let chart = RationalMap::new(images)?;
        let mut xvars = Vec::with_capacity(ex.xvars.len());
        for (i, x) in ex.xvars.iter().enumerate() {
            if i == k {
                xvars.push(xk.inv()?);
                continue;
            }
            let (c, b) = coeffs[i];
            let mut y = x.clone();
            if c != 0 {
                y = y.mul_capped(&xk.pow_capped(c, cap)?, cap)?;
            }
            if b != 0 {
                y = y.mul_capped(&power(b)?, cap)?;
            }
            xvars.push(y);
        }
        Ok(Exact { chart, xvars })
    }

    /// Canonical labeling: by rendered X-variables under exact identity,
    /// by fingerprints otherwise.
    pub fn canonical(&self) -> Canonical {
        let b = self.seed().exchange_matrix();
        match &self.exact {
            Some(ex) => canonical_form(&ex.xvars.iter().map(ToString::to_string).collect::<Vec<_>>(), &b),
            None => canonical_form(&self.fingerprint.iter().map(render_fingerprint).collect::<Vec<_>>(), &b),
        }
    }
}

fn render_fingerprint(f: &Fingerprint) -> String {
    f.iter().map(|v| format!("{v:016x}")).collect::<Vec<_>>().join(":")
}

/// `c` with `new = old + c * ek`.
fn transvection_coefficient(old: &[i64], new: &[i64], ek: &[i64]) -> Result<i64> {
    let Some(t) = ek.iter().position(|&x| x != 0) else {
        return if old == new { Ok(0) } else { Err(Error::InvalidSeed("mutation changed a vector by a non-multiple".into())) };
    };
    let diff = new[t] - old[t];
    let c = diff / ek[t];
    let ok = diff % ek[t] == 0 && old.iter().zip(new).zip(ek).all(|((o, n), e)| n - o == c * e);
    if ok {
        Ok(c)
    } else {
        Err(Error::InvalidSeed("mutation changed a vector by a non-multiple".into()))
    }
}

/// A canonical labeling of a decorated seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    /// The full key; equal exactly when the X-variables and exchange matrices
    /// agree after some simultaneous permutation.
    pub key: String,
    /// `perm[p]` is the original index shown at canonical position `p`.
    pub perm: Vec<usize>,
}

impl Canonical {
    /// A short stable digest of the key, used as the public vertex id.
    pub fn id(&self) -> String {
        short_id(&self.key)
    }

    /// Canonical position of the original index `i`.
    pub fn position(&self, i: usize) -> usize {
        self.perm.iter().position(|&p| p == i).expect("index in permutation")
    }
}

pub fn short_id(key: &str) -> String {
    let digest = Sha256::digest(key.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

const MAX_TIE_PERMUTATIONS: usize = 40_320;

fn render(strings: &[String], b: &[Vec<i64>], perm: &[usize]) -> String {
    let mut out = String::new();
    for &p in perm {
        out.push_str(&strings[p]);
        out.push(';');
    }
    out.push('|');
    for &p in perm {
        for &q in perm {
            out.push_str(&b[p][q].to_string());
            out.push(',');
        }
        out.push(';');
    }
    out
}

/// Sorts by rendered X-variable; ties are broken by trying every ordering
/// within the tied groups and keeping the smallest key.
pub fn canonical_form(strings: &[String], b: &[Vec<i64>]) -> Canonical {
    let mut order: Vec<usize> = (0..strings.len()).collect();
    order.sort_by(|&i, &j| strings[i].cmp(&strings[j]).then_with(|| b[i].cmp(&b[j])));
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for p in 1..=order.len() {
        if p == order.len() || strings[order[p]] != strings[order[start]] {
            groups.push((start, p));
            start = p;
        }
    }
    let total: usize = groups
        .iter()
        .map(|&(s, e)| (1..=e - s).product::<usize>())
        .try_fold(1usize, |acc, f| acc.checked_mul(f))
        .unwrap_or(usize::MAX);
    if total <= 1 || total > MAX_TIE_PERMUTATIONS {
        let key = render(strings, b, &order);
        return Canonical { key, perm: order };
    }
    let mut best: Option<(String, Vec<usize>)> = None;
    let mut current = order.clone();
    search_ties(strings, b, &groups, 0, &mut current, &mut best);
    let (key, perm) = best.expect("at least one ordering");
    Canonical { key, perm }
}

fn search_ties(
    strings: &[String],
    b: &[Vec<i64>],
    groups: &[(usize, usize)],
    g: usize,
    current: &mut Vec<usize>,
    best: &mut Option<(String, Vec<usize>)>,
) {
    if g == groups.len() {
        let key = render(strings, b, current);
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            *best = Some((key, current.clone()));
        }
        return;
    }
    let (s, e) = groups[g];
    permute_range(current, s, e, &mut |cur| search_ties(strings, b, groups, g + 1, cur, best));
}

fn permute_range(v: &mut Vec<usize>, at: usize, e: usize, f: &mut dyn FnMut(&mut Vec<usize>)) {
    if at + 1 >= e {
        f(v);
        return;
    }
    for i in at..e {
        v.swap(at, i);
        permute_range(v, at + 1, e, f);
        v.swap(at, i);
    }
}

/// Exploration limits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExploreOptions {
    /// Breadth-first depth; `None` runs until the graph closes.
    pub depth: Option<usize>,
    pub max_vertices: Option<usize>,
    pub max_monomials: usize,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        Self { depth: None, max_vertices: None, max_monomials: DEFAULT_MONOMIAL_BUDGET }
    }
}

impl ExploreOptions {
    pub fn depth(depth: usize) -> Self {
        Self { depth: Some(depth), ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct Vertex<S> {
    pub id: String,
    pub depth: usize,
    /// Canonical labels along a shortest path from the root.
    pub word: Vec<usize>,
    pub perm: Vec<usize>,
    pub decorated: DecoratedSeed<S>,
    pub expanded: bool,
}

impl<S: MutationState> Vertex<S> {
    /// Vectors in canonical order.
    pub fn vectors(&self) -> Vec<Vec<i64>> {
        self.perm.iter().map(|&p| self.decorated.seed().vectors()[p].clone()).collect()
    }

    /// X-variables in canonical order, under exact identity.
    pub fn xvars(&self) -> Option<Vec<RationalExpr>> {
        let xs = self.decorated.xvars()?;
        Some(self.perm.iter().map(|&p| xs[p].clone()).collect())
    }

    pub fn exchange_matrix(&self) -> Vec<Vec<i64>> {
        let b = self.decorated.seed().exchange_matrix();
        self.perm.iter().map(|&p| self.perm.iter().map(|&q| b[p][q]).collect()).collect()
    }

    /// Mutation at the canonical label `k`.
    pub fn mutate(&self, k: usize) -> Result<Option<DecoratedSeed<S>>> {
        check_index(k, self.perm.len())?;
        self.decorated.mutate(self.perm[k])
    }
}

/// A labeled edge: mutating `from` at canonical label `k` lands on `to`,
/// where the mutated direction has canonical label `k_to`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub from: String,
    pub k: usize,
    pub to: String,
    pub k_to: usize,
}

#[derive(Debug, Clone)]
pub struct ExchangeGraph<S> {
    vertices: BTreeMap<String, Vertex<S>>,
    ids: BTreeMap<String, String>,
    edges: BTreeSet<Edge>,
    root: String,
    complete: bool,
}

#[derive(Debug)]
pub enum ExploreError<S> {
    BudgetExceeded { graph: Box<ExchangeGraph<S>>, reason: String },
    Failed(Error),
}

impl<S> From<Error> for ExploreError<S> {
    fn from(e: Error) -> Self {
        Self::Failed(e)
    }
}

impl<S> std::fmt::Display for ExploreError<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::BudgetExceeded { reason, .. } => write!(f, "budget exceeded: {reason}"),
            Self::Failed(e) => write!(f, "{e}"),
        }
    }
}

impl<S> ExploreError<S> {
    pub fn is_budget(&self) -> bool {
        matches!(self, Self::BudgetExceeded { .. })
    }

    pub fn partial_graph(&self) -> Option<&ExchangeGraph<S>> {
        match self {
            Self::BudgetExceeded { graph, .. } => Some(graph),
            Self::Failed(_) => None,
        }
    }
}

enum Step<S> {
    Blocked,
    Found(DecoratedSeed<S>, Canonical),
}

/// Breadth-first exploration. Each level is expanded in key order and the
/// mutations within a level run in parallel, so the result does not depend
/// on thread scheduling.
pub fn explore<S: MutationState>(
    root: DecoratedSeed<S>,
    opts: &ExploreOptions,
) -> std::result::Result<ExchangeGraph<S>, ExploreError<S>> {
    let root = root.with_cap(opts.max_monomials);
    let canon = root.canonical();
    let root_key = canon.key.clone();
    let mut graph = ExchangeGraph {
        vertices: BTreeMap::new(),
        ids: BTreeMap::new(),
        edges: BTreeSet::new(),
        root: root_key.clone(),
        complete: false,
    };
    graph.insert(canon, root, 0, Vec::new());
    if root_size_exceeds(&graph, opts) {
        return Err(ExploreError::BudgetExceeded { graph: Box::new(graph), reason: "monomial cap".into() });
    }
    let mut level = vec![root_key];
    let mut depth = 0;
    loop {
        if level.is_empty() {
            graph.complete = true;
            return Ok(graph);
        }
        if opts.depth.is_some_and(|d| depth >= d) {
            return Ok(graph);
        }
        level.sort();
        let tasks: Vec<(String, usize)> = level
            .iter()
            .flat_map(|key| (0..graph.vertices[key].perm.len()).map(move |k| (key.clone(), k)))
            .collect();
        let results: Vec<Result<Step<S>>> = tasks
            .par_iter()
            .map(|(key, k)| {
                Ok(match graph.vertices[key].mutate(*k)? {
                    None => Step::Blocked,
                    Some(d) => {
                        let c = d.canonical();
                        Step::Found(d, c)
                    }
                })
            })
            .collect();
        let mut next = Vec::new();
        let mut overflow = None;
        for ((from, k), res) in tasks.into_iter().zip(results) {
            let (d, c) = match res {
                Ok(Step::Blocked) => continue,
                Ok(Step::Found(d, c)) => (d, c),
                Err(Error::ExpressionTooLarge { cap }) => {
                    overflow = Some(format!("an expression exceeded {cap} monomials"));
                    break;
                }
                Err(e) => return Err(e.into()),
            };
            if d.size() > opts.max_monomials {
                overflow = Some(format!("an expression exceeded {} monomials", opts.max_monomials));
                break;
            }
            let mutated = graph.vertices[&from].perm[k];
            let k_to = c.position(mutated);
            graph.edges.insert(Edge { from: from.clone(), k, to: c.key.clone(), k_to });
            if !graph.vertices.contains_key(&c.key) {
                let mut word = graph.vertices[&from].word.clone();
                word.push(k);
                next.push(c.key.clone());
                graph.insert(c, d, depth + 1, word);
                if opts.max_vertices.is_some_and(|m| graph.vertices.len() > m) {
                    overflow = Some(format!("more than {} vertices", opts.max_vertices.unwrap_or(0)));
                    break;
                }
            }
        }
        if let Some(reason) = overflow {
            return Err(ExploreError::BudgetExceeded { graph: Box::new(graph), reason });
        }
        for key in &level {
            graph.vertices.get_mut(key).expect("vertex").expanded = true;
        }
        level = next;
        depth += 1;
    }
}

fn root_size_exceeds<S: MutationState>(graph: &ExchangeGraph<S>, opts: &ExploreOptions) -> bool {
    graph.vertices.values().any(|v| v.decorated.size() > opts.max_monomials)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiniteType {
    Finite(usize),
    Exceeded,
}

/// Explores until the graph closes or `budget` vertices are exceeded. The
/// monomial cap comes from the environment and only matters under exact
/// identity.
pub fn is_finite_type<S: MutationState>(root: DecoratedSeed<S>, budget: usize) -> Result<FiniteType> {
    let opts = ExploreOptions { max_vertices: Some(budget), max_monomials: monomial_budget_from_env(), ..Default::default() };
    match explore(root, &opts) {
        Ok(g) => Ok(FiniteType::Finite(g.len())),
        Err(ExploreError::BudgetExceeded { .. }) => Ok(FiniteType::Exceeded),
        Err(ExploreError::Failed(e)) => Err(e),
    }
}

impl<S: MutationState> ExchangeGraph<S> {
    fn insert(&mut self, c: Canonical, decorated: DecoratedSeed<S>, depth: usize, word: Vec<usize>) {
        let id = c.id();
        self.ids.insert(id.clone(), c.key.clone());
        self.vertices.insert(c.key, Vertex { id, depth, word, perm: c.perm, decorated, expanded: false });
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// True when exploration stopped because no new vertices appeared.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn root(&self) -> &Vertex<S> {
        &self.vertices[&self.root]
    }

    /// Vertices sorted by key.
    pub fn vertices(&self) -> impl Iterator<Item = &Vertex<S>> {
        self.vertices.values()
    }

    pub fn vertex(&self, id: &str) -> Option<&Vertex<S>> {
        self.ids.get(id).and_then(|k| self.vertices.get(k))
    }

    /// Edges with ids in place of full keys.
    pub fn edges(&self) -> Vec<Edge> {
        self.edges
            .iter()
            .map(|e| Edge {
                from: self.vertices[&e.from].id.clone(),
                k: e.k,
                to: self.vertices[&e.to].id.clone(),
                k_to: e.k_to,
            })
            .collect()
    }

    /// Number of vertices at each depth.
    pub fn depth_counts(&self) -> Vec<usize> {
        let mut counts = Vec::new();
        for v in self.vertices.values() {
            if counts.len() <= v.depth {
                counts.resize(v.depth + 1, 0);
            }
            counts[v.depth] += 1;
        }
        counts
    }

    /// Every edge between expanded vertices has a reverse edge back along the
    /// mutated direction.
    pub fn is_involutive(&self) -> bool {
        self.edges.iter().all(|e| {
            if !self.vertices[&e.to].expanded {
                return true;
            }
            self.edges
                .range(Edge { from: e.to.clone(), k: e.k_to, to: String::new(), k_to: 0 }..)
                .take_while(|r| r.from == e.to && r.k == e.k_to)
                .any(|r| r.to == e.from)
        })
    }

    /// Neighbor of `id` at canonical label `k`, if explored.
    pub fn neighbor(&self, id: &str, k: usize) -> Option<(&Vertex<S>, usize)> {
        let key = self.ids.get(id)?;
        let e = self
            .edges
            .range(Edge { from: key.clone(), k, to: String::new(), k_to: 0 }..)
            .find(|e| e.from == *key && e.k == k)?;
        Some((&self.vertices[&e.to], e.k_to))
    }

    /// Labels of a shortest path from `from` to `to` along explored edges.
    pub fn path(&self, from: &str, to: &str) -> Option<Vec<usize>> {
        let (start, goal) = (self.ids.get(from)?, self.ids.get(to)?);
        let mut prev: BTreeMap<&String, (&String, usize)> = BTreeMap::new();
        let mut queue = VecDeque::from([start]);
        let mut seen = BTreeSet::from([start]);
        while let Some(u) = queue.pop_front() {
            if u == goal {
                let mut labels = Vec::new();
                let mut cur = goal;
                while cur != start {
                    let (p, k) = prev[cur];
                    labels.push(k);
                    cur = p;
                }
                labels.reverse();
                return Some(labels);
            }
            for e in self.edges.range(Edge { from: u.clone(), k: 0, to: String::new(), k_to: 0 }..) {
                if e.from != *u {
                    break;
                }
                if seen.insert(&e.to) {
                    prev.insert(&e.to, (u, e.k));
                    queue.push_back(&e.to);
                }
            }
        }
        None
    }

    /// Re-derives the chart along a closed walk by composing the elementary
    /// X-transformations and checks that the X-variables come back.
    pub fn verify_closed_walk(&self, start: &str, labels: &[usize]) -> Result<bool> {
        let Some(v) = self.vertex(start) else { return Err(Error::InvalidConfig(format!("unknown vertex {start}"))) };
        let (Some(start_chart), Some(start_x)) = (v.decorated.chart(), v.decorated.xvars()) else {
            return Err(Error::InvalidConfig("closed walks need exact identity".into()));
        };
        let signed = v.decorated.is_signed();
        let mut state = v.decorated.state().clone();
        let mut perm = v.perm.clone();
        let mut walk = RationalMap::identity(state.seed().rank());
        for &k in labels {
            check_index(k, perm.len())?;
            let i = perm[k];
            let step = RationalMap::x_mutation(state.seed(), i, signed)?;
            let Some(next) = state.try_mutate(i)? else { return Ok(false) };
            walk = RationalMap::compose(&step, &walk)?;
            state = next;
            let chart = RationalMap::compose(&walk, start_chart)?;
            let xs: Vec<String> = xvars_of(state.seed(), &chart)?.iter().map(ToString::to_string).collect();
            perm = canonical_form(&xs, &state.seed().exchange_matrix()).perm;
        }
        let chart = RationalMap::compose(&walk, start_chart)?;
        let xs = state.seed().vectors().iter().map(|e| chart.pullback_monomial(e)).collect::<Result<Vec<_>>>()?;
        let b_end = state.seed().exchange_matrix();
        let b_start = v.decorated.seed().exchange_matrix();
        Ok((0..perm.len()).all(|p| {
            xs[perm[p]].cross_eq(&start_x[v.perm[p]])
                && (0..perm.len()).all(|q| b_end[perm[p]][perm[q]] == b_start[v.perm[p]][v.perm[q]])
        }))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vertices: Vec<serde_json::Value> = self
            .vertices
            .values()
            .map(|v| {
                serde_json::json!({
                    "key": v.id,
                    "depth": v.depth,
                    "vectors": v.vectors(),
                    "xvars": v.xvars().map(|xs| xs.iter().map(ToString::to_string).collect::<Vec<_>>()),
                })
            })
            .collect();
        let edges: Vec<serde_json::Value> =
            self.edges().into_iter().map(|e| serde_json::json!([e.from, e.k + 1, e.to])).collect();
        serde_json::json!({
            "root": self.root().id,
            "complete": self.complete,
            "vertices": vertices,
            "edges": edges,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph exchange {\n");
        for v in self.vertices.values() {
            out.push_str(&format!("  \"{}\" [label=\"{}\"];\n", v.id, v.id));
        }
        for e in self.edges() {
            out.push_str(&format!("  \"{}\" -> \"{}\" [label=\"{}\"];\n", e.from, e.to, e.k + 1));
        }
        out.push_str("}\n");
        out
    }
}

/// A deliberately naive second implementation: words are extended level by
/// level, X-variables follow the textbook Y-seed rule read off the exchange
/// matrix alone, and vertices are told apart by pairwise cross-multiplication,
/// without charts, keys or hashing.
pub mod oracle {
    use super::*;

    struct Found {
        b: Vec<Vec<i64>>,
        xvars: Vec<RationalExpr>,
    }

    fn same(a: &Found, b: &Found) -> bool {
        let n = a.xvars.len();
        let (ba, bb) = (&a.b, &b.b);
        let candidates: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| a.xvars[i].cross_eq(&b.xvars[j])).collect())
            .collect();
        let mut assign = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn search(
            i: usize,
            cand: &[Vec<usize>],
            assign: &mut Vec<usize>,
            used: &mut Vec<bool>,
            ba: &[Vec<i64>],
            bb: &[Vec<i64>],
        ) -> bool {
            if i == cand.len() {
                return (0..i).all(|p| (0..i).all(|q| ba[p][q] == bb[assign[p]][assign[q]]));
            }
            for &j in &cand[i] {
                if !used[j] {
                    used[j] = true;
                    assign[i] = j;
                    if search(i + 1, cand, assign, used, ba, bb) {
                        return true;
                    }
                    used[j] = false;
                }
            }
            false
        }
        search(0, &candidates, &mut assign, &mut used, ba, bb)
    }

    fn root_found(root: &Seed) -> Found {
        Found {
            b: root.exchange_matrix(),
            xvars: root.vectors().iter().map(|e| RationalExpr::monomial(e)).collect(),
        }
    }

    /// `X'_k = 1 / X_k`, `X'_i = X_i (1 + X_k^{-sgn b_ik})^{-b_ik}` with
    /// `b_ik = {e_i, e_k}`.
    fn step(f: &Found, k: usize) -> Result<Found> {
        let xk = &f.xvars[k];
        let one = RationalExpr::one(xk.nvars());
        let up = one.add(xk);
        let down = one.add(&xk.inv()?);
        let xvars = f
            .xvars
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let b = f.b[i][k];
                match b.signum() {
                    _ if i == k => xk.inv(),
                    0 => Ok(x.clone()),
                    1 => Ok(x.mul(&down.pow(-b)?)),
                    _ => Ok(x.mul(&up.pow(-b)?)),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Found { b: mutate_exchange_matrix(&f.b, k)?, xvars })
    }

    /// Distinct decorated seeds reachable from `root` by unsigned mutations,
    /// or `None` if more than `cap` appear.
    pub fn count_vertices(root: &Seed, cap: usize) -> Result<Option<usize>> {
        let mut found = vec![root_found(root)];
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &f in &frontier {
                for k in 0..root.len() {
                    let cand = step(&found[f], k)?;
                    if !found.iter().any(|g| same(g, &cand)) {
                        found.push(cand);
                        next.push(found.len() - 1);
                        if found.len() > cap {
                            return Ok(None);
                        }
                    }
                }
            }
            frontier = next;
        }
        Ok(Some(found.len()))
    }

    /// Distinct decorated seeds among all words of length at most `len`,
    /// repeated letters included.
    pub fn count_words(root: &Seed, len: usize) -> Result<usize> {
        let mut found: Vec<Found> = Vec::new();
        let mut stack = vec![(root_found(root), 0usize)];
        while let Some((cand, depth)) = stack.pop() {
            if depth < len {
                for k in 0..root.len() {
                    stack.push((step(&cand, k)?, depth + 1));
                }
            }
            if !found.iter().any(|g| same(g, &cand)) {
                found.push(cand);
            }
        }
        Ok(found.len())
    }

    impl std::fmt::Debug for Found {
        fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
            f.debug_struct("Found").field("xvars", &self.xvars).field("b", &self.b).finish()
        }
    }
}

/// The X-variables of `seed` under `chart`, as a Laurent-free check helper.
pub fn xvars_of(seed: &Seed, chart: &RationalMap) -> Result<Vec<RationalExpr>> {
    seed.vectors().iter().map(|e| chart.pullback_monomial(e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry;

    fn size_of(seed: Seed) -> usize {
        let g = explore(DecoratedSeed::root(seed, false), &ExploreOptions::default()).unwrap();
        assert!(g.is_complete());
        assert!(g.is_involutive());
        g.len()
    }

    #[test]
    fn finite_types() {
        assert_eq!(size_of(registry::a2()), 5);
        assert_eq!(size_of(registry::a3()), 14);
    }

    #[test]
    fn keys_ignore_relabeling() {
        let s = registry::a3();
        let a = DecoratedSeed::root(s.clone(), false).canonical();
        let b = DecoratedSeed::root(s.permuted(&[2, 0, 1]), false).canonical();
        assert_eq!(a.key, b.key);
        let c = DecoratedSeed::root(s, false).mutate(1).unwrap().unwrap().canonical();
        assert_ne!(a.key, c.key);
    }

    #[test]
    fn pentagon_agrees_with_oracle() {
        assert_eq!(oracle::count_vertices(&registry::a2(), 100).unwrap(), Some(5));
        assert_eq!(oracle::count_words(&registry::a2(), 6).unwrap(), 5);
    }

    #[test]
    fn closed_walks() {
        let g = explore(DecoratedSeed::root(registry::a3(), false), &ExploreOptions::default()).unwrap();
        let root = g.root().id.clone();
        for v in g.vertices() {
            let mut labels = g.path(&root, &v.id).unwrap();
            labels.extend(g.path(&v.id, &root).unwrap());
            assert!(g.verify_closed_walk(&root, &labels).unwrap());
        }
        let (_, back) = g.neighbor(&root, 0).unwrap();
        assert!(g.verify_closed_walk(&root, &[0, back]).unwrap());
        assert!(!g.verify_closed_walk(&root, &[0]).unwrap());
    }

    #[test]
    fn fingerprints_track_exact_values() {
        let mut d = DecoratedSeed::root(registry::d4(), false);
        for k in [0, 1, 3, 1, 2, 0] {
            d = d.mutate(k).unwrap().unwrap();
            let direct: Vec<Fingerprint> = d.xvars().unwrap().iter().map(|x| fingerprint_of(x).unwrap()).collect();
            assert_eq!(direct, d.fingerprint());
        }
    }

    #[test]
    fn identities_agree_on_finite_types() {
        for seed in [registry::a2(), registry::a3(), registry::d4()] {
            let exact = explore(DecoratedSeed::root(seed.clone(), false), &ExploreOptions::default()).unwrap();
            let fast = explore(DecoratedSeed::root_fingerprint(seed, false), &ExploreOptions::default()).unwrap();
            assert_eq!(exact.len(), fast.len());
            assert_eq!(exact.depth_counts(), fast.depth_counts());
        }
    }

    #[test]
    fn markov_exceeds_vertex_budget() {
        let root = DecoratedSeed::root_fingerprint(registry::markov(), false);
        assert_eq!(is_finite_type(root, 500).unwrap(), FiniteType::Exceeded);
        let d4 = DecoratedSeed::root_fingerprint(registry::d4(), false);
        assert_eq!(is_finite_type(d4, 500).unwrap(), FiniteType::Finite(50));
    }

    #[test]
    fn monomial_cap_stops_exact_growth() {
        let opts = ExploreOptions { max_monomials: 200, ..Default::default() };
        let err = explore(DecoratedSeed::root(registry::markov(), false), &opts).unwrap_err();
        let g = err.partial_graph().expect("budget error carries the graph");
        assert!(g.len() > 1);
    }
}
