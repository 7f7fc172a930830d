//! Random inputs shared by the property suites. Generators take an explicit
//! rng so proptest drives them through a `u64` seed.
#![allow(dead_code)]

use mutwb_core::curves::{Class, GeodesicConfig};
use mutwb_core::field::q;
use mutwb_core::laurent::Laurent;
use mutwb_core::linalg::Matrix;
use mutwb_core::q0::Q0Rep;
use mutwb_core::seed::{is_primitive, Seed, SkewLattice};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn skew_form(rng: &mut StdRng, m: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut form = vec![vec![0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let x = rng.gen_range(-bound..=bound);
            form[i][j] = x;
            form[j][i] = -x;
        }
    }
    form
}

fn primitive_vector(rng: &mut StdRng, m: usize, bound: i64) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..m).map(|_| rng.gen_range(-bound..=bound)).collect();
        if is_primitive(&v) {
            return v;
        }
    }
}

/// Lattice rank and vector count at most `max`, form entries at most `form_bound`.
pub fn random_seed(rng: &mut StdRng, max: usize, form_bound: i64) -> Seed {
    loop {
        let m = rng.gen_range(1..=max);
        let n = rng.gen_range(1..=max);
        let lattice = SkewLattice::new(skew_form(rng, m, form_bound)).unwrap();
        let vectors = (0..n).map(|_| primitive_vector(rng, m, 2)).collect();
        let signing = (0..n).map(|_| rng.gen()).collect();
        if let Ok(s) = Seed::new(lattice, vectors, signing) {
            return s;
        }
    }
}

pub fn independent(seed: &Seed) -> bool {
    let rows: Vec<Vec<i64>> = seed.vectors().to_vec();
    Matrix::<BigRational>::from_i64(&rows).rank() == rows.len()
}

pub fn random_classes(rng: &mut StdRng, max: usize) -> Vec<Class> {
    let n = rng.gen_range(1..=max);
    (0..n)
        .map(|_| {
            let v = primitive_vector(rng, 2, 3);
            [v[0], v[1]]
        })
        .collect()
}

pub fn random_geodesics(rng: &mut StdRng, max: usize) -> GeodesicConfig {
    GeodesicConfig::new(random_classes(rng, max)).unwrap()
}

pub fn random_poly(rng: &mut StdRng, n: usize, terms: usize, lo: i64, hi: i64) -> Laurent {
    Laurent::from_terms(
        n,
        (0..terms).map(|_| {
            let e: Vec<i64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
            (e, BigInt::from(rng.gen_range(-6i64..=6)))
        }),
    )
}

pub fn small_rational(rng: &mut StdRng) -> BigRational {
    loop {
        let r = q(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        if r != q(0, 1) {
            return r;
        }
    }
}

/// A representation with both monodromies invertible; dims at most `max`.
pub fn random_rep(rng: &mut StdRng, max: usize) -> Q0Rep<BigRational> {
    loop {
        let a = rng.gen_range(0..=max);
        let b = rng.gen_range(0..=max);
        let mut entry = |_| rng.gen_range(-2i64..=2);
        let x: Vec<Vec<i64>> = (0..b).map(|_| (0..a).map(&mut entry).collect()).collect();
        let y: Vec<Vec<i64>> = (0..a).map(|_| (0..b).map(&mut entry).collect()).collect();
        let x = if b == 0 || a == 0 { Matrix::zeros(b, a) } else { Matrix::from_i64(&x) };
        let y = if b == 0 || a == 0 { Matrix::zeros(a, b) } else { Matrix::from_i64(&y) };
        if let Ok(r) = Q0Rep::new(x, y) {
            return r;
        }
    }
}
