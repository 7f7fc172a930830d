//! Session state: a seed or curve configuration together with its chart,
//! X-variables, an optional rank-1 character and the mutation history.
//!
//! Indices are 0-based in memory and 1-based in every JSON rendering.

use std::fmt::Write as _;

use mutwb_core::curves::{Class, Configuration, IntersectionLedger};
use mutwb_core::exchange::{DecoratedSeed, MutationState};
use mutwb_core::laurent::RationalMap;
use mutwb_core::local::Character;
use mutwb_core::registry::{self, Example};
use mutwb_core::seed::{Quiver, Seed, SeedJson};
use mutwb_core::Error;
use serde::{Deserialize, Serialize};

/// What a session mutates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Workbench {
    Seed(Seed),
    Config(Configuration),
}

impl MutationState for Workbench {
    fn seed(&self) -> &Seed {
        match self {
            Workbench::Seed(s) => s,
            Workbench::Config(c) => c.seed(),
        }
    }

    fn try_mutate(&self, k: usize) -> mutwb_core::Result<Option<Self>> {
        Ok(match self {
            Workbench::Seed(s) => s.try_mutate(k)?.map(Workbench::Seed),
            Workbench::Config(c) => c.try_mutate(k)?.map(Workbench::Config),
        })
    }
}

impl From<Example> for Workbench {
    fn from(e: Example) -> Self {
        match e {
            Example::Seed(s) => Workbench::Seed(s),
            Example::Config(c) => Workbench::Config(c),
        }
    }
}

/// Where a session starts. Exactly one of `example`, `config`, `seed` and
/// `state` must be given; `character` only goes with the first three.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Source {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<SeedJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub character: Option<Character>,
    /// Track the chart and X-variables (default true). Without them a state
    /// can be mutated indefinitely; with them the monomial cap applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expressions: Option<bool>,
}

impl Source {
    pub fn example(key: &str) -> Self {
        Self { example: Some(key.to_string()), ..Self::default() }
    }

    /// The unmutated state (or the stored one for `state`).
    pub fn build(&self) -> Result<SessionState, Error> {
        let given = [self.example.is_some(), self.config.is_some(), self.seed.is_some(), self.state.is_some()];
        if given.iter().filter(|&&b| b).count() != 1 {
            return Err(Error::Parse("give exactly one of example, config, seed, state".into()));
        }
        if let Some(state) = &self.state {
            if self.character.is_some() || self.expressions.is_some() {
                return Err(Error::Parse("a stored state already fixes its character and expressions".into()));
            }
            return SessionState::from_json(state.clone());
        }
        SessionState::new(self.workbench()?, self.character.clone(), self.expressions.unwrap_or(true))
    }

    pub fn workbench(&self) -> Result<Workbench, Error> {
        if let Some(key) = &self.example {
            return Ok(registry::lookup(key)?.into());
        }
        if let Some(cfg) = &self.config {
            return Ok(Workbench::Config(Configuration::from_json(cfg)?));
        }
        if let Some(seed) = &self.seed {
            return Ok(Workbench::Seed(Seed::try_from(seed.clone())?));
        }
        if let Some(state) = &self.state {
            return Ok(SessionState::from_json(state.clone())?.work);
        }
        Err(Error::Parse("no source given".into()))
    }
}

/// Why one mutation step did not happen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepError {
    /// The curve has self-crossings.
    NotSimple { index: usize },
    /// `1 - x(v_k)` vanishes for the session character.
    NotRegular { index: usize },
    TooLarge { cap: usize },
    OutOfRange { index: usize, len: usize },
    Failed(Error),
}

impl StepError {
    /// Machine-readable reason.
    pub fn reason(&self) -> &'static str {
        match self {
            StepError::NotSimple { .. } => "not-simple",
            StepError::NotRegular { .. } => "not-regular",
            StepError::TooLarge { .. } => "budget-exceeded",
            StepError::OutOfRange { .. } => "index-out-of-range",
            StepError::Failed(_) => "failed",
        }
    }
}

impl std::fmt::Display for StepError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepError::NotSimple { index } => write!(f, "curve {} is not simple", index + 1),
            StepError::NotRegular { index } => {
                write!(f, "not regular: 1 - x(v_{}) vanishes for the current character", index + 1)
            }
            StepError::TooLarge { cap } => write!(f, "an expression exceeded the cap of {cap} monomials"),
            StepError::OutOfRange { index, len } => write!(f, "index {} out of range 1..={len}", index + 1),
            StepError::Failed(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for StepError {
    fn from(e: Error) -> Self {
        match e {
            Error::ExpressionTooLarge { cap } => StepError::TooLarge { cap },
            other => StepError::Failed(other),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SessionState {
    work: Workbench,
    /// Chart and X-variables, when tracked.
    decorated: Option<DecoratedSeed<Workbench>>,
    character: Option<Character>,
    history: Vec<usize>,
}

impl SessionState {
    /// A fresh state with the identity chart. The chart uses the signed
    /// transformations, so for a configuration (all signs one) evaluating it
    /// at the starting character gives the current character.
    pub fn new(work: Workbench, character: Option<Character>, expressions: bool) -> Result<Self, Error> {
        if character.is_some() && classes_of(&work).is_none() {
            return Err(Error::InvalidConfig("a character needs a configuration with classes".into()));
        }
        let decorated = expressions.then(|| DecoratedSeed::root(work.clone(), true));
        Ok(Self { work, decorated, character, history: Vec::new() })
    }

    pub fn workbench(&self) -> &Workbench {
        &self.work
    }

    pub fn seed(&self) -> &Seed {
        self.work.seed()
    }

    pub fn decorated(&self) -> Option<&DecoratedSeed<Workbench>> {
        self.decorated.as_ref()
    }

    pub fn character(&self) -> Option<&Character> {
        self.character.as_ref()
    }

    /// Applied indices, 0-based.
    pub fn history(&self) -> &[usize] {
        &self.history
    }

    pub fn len(&self) -> usize {
        self.seed().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn chart(&self) -> Option<&RationalMap> {
        self.decorated.as_ref().and_then(DecoratedSeed::chart)
    }

    /// Mutation at the 0-based index `k`.
    pub fn mutate(&self, k: usize) -> Result<Self, StepError> {
        let len = self.len();
        if k >= len {
            return Err(StepError::OutOfRange { index: k, len });
        }
        let work = self.workbench();
        if let Workbench::Config(c) = work {
            if !c.is_mutable(k)? {
                return Err(StepError::NotSimple { index: k });
            }
        }
        let character = match &self.character {
            None => None,
            Some(ch) => {
                let class = classes_of(work).expect("checked on creation")[k];
                Some(ch.mutate_at_class(class).map_err(|e| match e {
                    Error::NotRegular => StepError::NotRegular { index: k },
                    other => StepError::Failed(other),
                })?)
            }
        };
        let decorated = match &self.decorated {
            Some(d) => Some(d.mutate(k)?.expect("mutability was checked")),
            None => None,
        };
        let work = match &decorated {
            Some(d) => d.state().clone(),
            None => work.try_mutate(k)?.expect("mutability was checked"),
        };
        let mut history = self.history.clone();
        history.push(k);
        Ok(Self { work, decorated, character, history })
    }

    /// Applies a word of 0-based indices. On failure returns the 0-based
    /// position of the offending letter and the state reached before it.
    pub fn mutate_word(&self, word: &[usize]) -> Result<Self, (usize, StepError, Box<Self>)> {
        let mut cur = self.clone();
        for (step, &k) in word.iter().enumerate() {
            cur = match cur.mutate(k) {
                Ok(next) => next,
                Err(e) => return Err((step, e, Box::new(cur))),
            };
        }
        Ok(cur)
    }

    pub fn to_json(&self) -> StateJson {
        let seed = self.seed();
        let (kind, config) = match self.workbench() {
            Workbench::Seed(_) => (Kind::Seed, None),
            Workbench::Config(c) => (
                Kind::Config,
                Some(ConfigJson {
                    mode: if c.is_geodesic() { Mode::Geodesic } else { Mode::Ledger },
                    classes: c.classes().map(<[Class]>::to_vec),
                    ledger: c.ledger().clone(),
                    intersection_quiver: c.ledger().quiver(),
                }),
            ),
        };
        let mutable = match self.workbench() {
            Workbench::Seed(s) => vec![true; s.len()],
            Workbench::Config(c) => c.mutable_indices(),
        };
        StateJson {
            kind,
            seed: SeedJson::from(seed.clone()),
            exchange_matrix: seed.exchange_matrix(),
            quiver: seed.quiver(),
            config,
            mutable,
            signed: self.decorated.as_ref().is_none_or(DecoratedSeed::is_signed),
            chart: self.chart().map(RationalMap::to_strings),
            xvars: self
                .decorated
                .as_ref()
                .and_then(DecoratedSeed::xvars)
                .map(|xs| xs.iter().map(ToString::to_string).collect()),
            character: self.character.clone(),
            history: self.history.iter().map(|k| k + 1).collect(),
        }
    }

    /// Compact JSON, the wire form shared by the CLI and the service.
    pub fn render(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("state serializes")
    }

    /// Rebuilds a state and rejects it unless every derived field matches.
    pub fn from_json(j: StateJson) -> Result<Self, Error> {
        let seed = Seed::try_from(j.seed.clone())?;
        let work = match (&j.kind, &j.config) {
            (Kind::Seed, None) => Workbench::Seed(seed),
            (Kind::Config, Some(c)) => Workbench::Config(Configuration::from_parts(
                c.mode == Mode::Geodesic,
                c.classes.clone(),
                c.ledger.clone(),
                seed,
            )?),
            _ => return Err(Error::Parse("config must be present exactly for kind \"config\"".into())),
        };
        if j.character.is_some() && classes_of(&work).is_none() {
            return Err(Error::InvalidConfig("a character needs a configuration with classes".into()));
        }
        let decorated = match &j.chart {
            Some(c) => Some(DecoratedSeed::from_parts(work.clone(), RationalMap::from_strings(c)?, j.signed)?),
            None => None,
        };
        let history = j
            .history
            .iter()
            .map(|&k| k.checked_sub(1).ok_or_else(|| Error::Parse("history indices start at 1".into())))
            .collect::<Result<Vec<_>, _>>()?;
        let state = Self { work, decorated, character: j.character.clone(), history };
        let expected = serde_json::to_value(&j).expect("serializes");
        let rebuilt = serde_json::to_value(state.to_json()).expect("serializes");
        if expected != rebuilt {
            return Err(Error::Parse("state fields are not mutually consistent".into()));
        }
        Ok(state)
    }

    /// Human-readable summary.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let j = self.to_json();
        if let Some(c) = &j.config {
            if let Some(classes) = &c.classes {
                let cs: Vec<String> = classes.iter().map(|v| format!("({},{})", v[0], v[1])).collect();
                let _ = writeln!(out, "classes: {}", cs.join(" "));
            }
            let _ = writeln!(out, "ledger P: {:?}", c.ledger.positive());
            let _ = writeln!(out, "ledger s: {:?}", c.ledger.self_intersections());
        } else {
            let _ = writeln!(out, "vectors: {:?}", j.seed.vectors);
        }
        let _ = writeln!(out, "exchange matrix: {:?}", j.exchange_matrix);
        let _ = writeln!(out, "quiver: {}", format_quiver(&j.quiver));
        if let Some(c) = &j.config {
            let _ = writeln!(out, "intersection quiver: {}", format_quiver(&c.intersection_quiver));
        }
        let blocked: Vec<String> =
            j.mutable.iter().enumerate().filter(|(_, &m)| !m).map(|(i, _)| (i + 1).to_string()).collect();
        if !blocked.is_empty() {
            let _ = writeln!(out, "blocked: {}", blocked.join(" "));
        }
        for (i, x) in j.xvars.iter().flatten().enumerate() {
            let _ = writeln!(out, "X_{} = {x}", i + 1);
        }
        if let Some(ch) = &self.character {
            let _ = writeln!(
                out,
                "character: x_a = {}, x_b = {}",
                mutwb_core::field::format_rational(ch.a()),
                mutwb_core::field::format_rational(ch.b())
            );
        }
        let hist: Vec<String> = j.history.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "history: {}", if hist.is_empty() { "(none)".into() } else { hist.join(",") });
        out
    }
}

fn classes_of(work: &Workbench) -> Option<&[Class]> {
    match work {
        Workbench::Config(c) => c.classes(),
        Workbench::Seed(_) => None,
    }
}

/// `1->3:3, 3->2:3, 2->1:6`, plus self-loops as `1@:2`.
pub fn format_quiver(q: &Quiver) -> String {
    let mut parts = Vec::new();
    for (i, row) in q.arrows.iter().enumerate() {
        for (j, &m) in row.iter().enumerate() {
            if m > 0 {
                parts.push(format!("{}->{}:{m}", i + 1, j + 1));
            }
        }
    }
    for (i, &l) in q.loops.iter().enumerate() {
        if l > 0 {
            parts.push(format!("{}@:{l}", i + 1));
        }
    }
    if parts.is_empty() {
        "(no arrows)".into()
    } else {
        parts.join(", ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Seed,
    Config,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Geodesic,
    Ledger,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigJson {
    pub mode: Mode,
    pub classes: Option<Vec<Class>>,
    pub ledger: IntersectionLedger,
    pub intersection_quiver: Quiver,
}

/// The JSON rendering of a state. Field order is fixed so that equal states
/// render to identical bytes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub kind: Kind,
    pub seed: SeedJson,
    pub exchange_matrix: Vec<Vec<i64>>,
    /// Reduced quiver of the exchange matrix.
    pub quiver: Quiver,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigJson>,
    pub mutable: Vec<bool>,
    pub signed: bool,
    /// `null` when expressions are not tracked.
    pub chart: Option<Vec<String>>,
    pub xvars: Option<Vec<String>>,
    pub character: Option<Character>,
    pub history: Vec<usize>,
}
