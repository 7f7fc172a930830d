//! Named example seeds and curve configurations.

use crate::curves::{Configuration, GeodesicConfig};
use crate::error::{Error, Result};
use crate::seed::Seed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Example {
    /// An abstract seed, explored with the unsigned transformations.
    Seed(Seed),
    /// A curve configuration; its seed carries the all-ones signing.
    Config(Configuration),
}

pub struct ExampleInfo {
    pub key: &'static str,
    pub description: &'static str,
}

pub const EXAMPLES: &[ExampleInfo] = &[
    ExampleInfo {
        key: "vianna-p2",
        description: "three geodesics (1,-1), (1,2), (-2,-1): tripled oriented 3-cycle",
    },
    ExampleInfo {
        key: "keating-p-q-r",
        description: "p curves (0,-1), q curves (1,0), r curves (-1,1); e.g. keating-2-1-3 (bare key is 1-1-1)",
    },
    ExampleInfo { key: "torus-one-disk", description: "a single geodesic (1,0)" },
    ExampleInfo { key: "a2", description: "abstract A2 seed, one arrow 1 -> 2" },
    ExampleInfo { key: "a3", description: "abstract A3 seed, 1 -> 2 -> 3" },
    ExampleInfo { key: "d4", description: "abstract D4 seed, 1, 3, 4 -> 2" },
    ExampleInfo { key: "markov", description: "abstract doubled oriented 3-cycle" },
];

fn geodesic(classes: Vec<[i64; 2]>) -> Result<Example> {
    Ok(Example::Config(Configuration::geodesic(&GeodesicConfig::new(classes)?, None)?))
}

pub fn vianna() -> GeodesicConfig {
    GeodesicConfig::new(vec![[1, -1], [1, 2], [-2, -1]]).expect("primitive classes")
}

pub fn keating(p: usize, q: usize, r: usize) -> GeodesicConfig {
    let mut classes = vec![[0, -1]; p];
    classes.extend(std::iter::repeat_n([1, 0], q));
    classes.extend(std::iter::repeat_n([-1, 1], r));
    GeodesicConfig::new(classes).expect("primitive classes")
}

pub fn a2() -> Seed {
    Seed::from_exchange_matrix(vec![vec![0, 1], vec![-1, 0]], vec![false; 2]).expect("valid seed")
}

pub fn a3() -> Seed {
    Seed::from_exchange_matrix(vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]], vec![false; 3])
        .expect("valid seed")
}

pub fn d4() -> Seed {
    Seed::from_exchange_matrix(
        vec![vec![0, 1, 0, 0], vec![-1, 0, -1, -1], vec![0, 1, 0, 0], vec![0, 1, 0, 0]],
        vec![false; 4],
    )
    .expect("valid seed")
}

pub fn markov() -> Seed {
    Seed::from_exchange_matrix(vec![vec![0, 2, -2], vec![-2, 0, 2], vec![2, -2, 0]], vec![false; 3])
        .expect("valid seed")
}

pub fn lookup(key: &str) -> Result<Example> {
    match key {
        "vianna-p2" => Ok(Example::Config(Configuration::geodesic(&vianna(), None)?)),
        "torus-one-disk" => geodesic(vec![[1, 0]]),
        "a2" => Ok(Example::Seed(a2())),
        "a3" => Ok(Example::Seed(a3())),
        "d4" => Ok(Example::Seed(d4())),
        "markov" => Ok(Example::Seed(markov())),
        "keating-p-q-r" | "keating" => Ok(Example::Config(Configuration::geodesic(&keating(1, 1, 1), None)?)),
        _ => {
            let parts: Option<Vec<usize>> = key
                .strip_prefix("keating-")
                .and_then(|rest| rest.split('-').map(|t| t.parse().ok()).collect::<Option<Vec<usize>>>());
            match parts.as_deref() {
                Some(&[p, q, r]) => Ok(Example::Config(Configuration::geodesic(&keating(p, q, r), None)?)),
                _ => Err(Error::InvalidConfig(format!("unknown example {key:?}"))),
            }
        }
    }
}
