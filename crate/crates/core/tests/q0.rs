mod common;

use common::{random_rep, rng};
use mutwb_core::field::{q, Field, Fp};
use mutwb_core::linalg::Matrix;
use mutwb_core::q0::{oracle, Q0Rep, Simple};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;

type Q = BigRational;
type F5 = Fp<5>;
type F7 = Fp<7>;

#[test]
fn simples_mutate_as_expected() {
    assert_eq!(Q0Rep::<Q>::simple_a().mutate(), Q0Rep::simple_b());
    assert_eq!(Q0Rep::<Q>::simple_b().mutate(), Q0Rep::simple_a());
    for m in [q(2, 1), q(-1, 1), q(1, 3)] {
        let inv = q(1, 1) / &m;
        assert_eq!(Q0Rep::p(m.clone()).unwrap().mutate(), Q0Rep::p_b(inv.clone()).unwrap());
        assert_eq!(Simple::P(m).mutated(), Simple::P(inv));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn monodromies_invert_under_mutation(s in any::<u64>()) {
        let r = random_rep(&mut rng(s), 4);
        let m = r.mutate();
        prop_assert_eq!(m.dims(), (r.dims().1, r.dims().0));
        prop_assert_eq!(m.m_a(), r.m_b().inverse().unwrap());
        prop_assert_eq!(m.m_b(), r.m_a().inverse().unwrap());
        let back = m.mutate();
        let (fa, fb) = r.double_mutation_isomorphism();
        prop_assert!(r.is_morphism(&back, &fa, &fb));
        prop_assert!(fa.is_invertible() && fb.is_invertible());
        if let Ok(d) = r.decompose() {
            prop_assert!(r.find_isomorphism(&back).is_some());
            prop_assert_eq!(m.decompose().unwrap().parts, d.mutated_parts());
        }
    }
}

fn matrix<F: Field>(rows: usize, cols: usize, entries: &[F]) -> Matrix<F> {
    if rows == 0 || cols == 0 {
        return Matrix::zeros(rows, cols);
    }
    Matrix::from_rows(entries.chunks(cols).map(<[F]>::to_vec).collect()).unwrap()
}

/// Every valid representation of dimension `(a, b)`, or `limit` random ones.
fn reps<F: Field>(a: usize, b: usize, limit: Option<usize>) -> Vec<Q0Rep<F>> {
    let elems = F::all_elements().unwrap();
    let len = 2 * a * b;
    let build = |entries: &[F]| Q0Rep::new(matrix(b, a, &entries[..a * b]), matrix(a, b, &entries[a * b..])).ok();
    match limit {
        None => {
            let mut out = Vec::new();
            let mut idx = vec![0usize; len];
            loop {
                let entries: Vec<F> = idx.iter().map(|&i| elems[i].clone()).collect();
                out.extend(build(&entries));
                let Some(pos) = idx.iter().position(|&i| i + 1 < elems.len()) else { break };
                idx[pos] += 1;
                idx[..pos].iter_mut().for_each(|i| *i = 0);
            }
            out
        }
        Some(n) => {
            let mut r = rng(len as u64);
            (0..n * 4)
                .filter_map(|_| {
                    let entries: Vec<F> = (0..len).map(|_| elems[r.gen_range(0..elems.len())].clone()).collect();
                    build(&entries)
                })
                .take(n)
                .collect()
        }
    }
}

fn check_oracle<F: Field>(rep: &Q0Rep<F>) {
    assert_eq!(oracle::agrees(rep), Some(true), "{rep:?}");
    if let Ok(d) = rep.decompose() {
        let back = rep.mutate().mutate();
        let (fa, fb) = rep.double_mutation_isomorphism();
        assert!(rep.is_morphism(&back, &fa, &fb));
        assert!(d.standard_rep().find_isomorphism(rep).is_some());
    }
}

#[test]
fn decompose_matches_enumeration_over_f5() {
    let mut semisimple = 0;
    let mut total = 0;
    for a in 0..=2 {
        for b in 0..=2 {
            let limit = (a == 2 && b == 2).then_some(400);
            for rep in reps::<F5>(a, b, limit) {
                check_oracle(&rep);
                total += 1;
                semisimple += usize::from(oracle::analyze(&rep).unwrap().semisimple);
            }
        }
    }
    // every shape contributes, and both outcomes of the semisimplicity test occur
    assert!(total > 1000 && semisimple > 0 && semisimple < total);
}

#[test]
fn decompose_matches_enumeration_over_f7() {
    for (a, b) in [(1, 1), (1, 2), (2, 1), (3, 0), (0, 3)] {
        for rep in reps::<F7>(a, b, None) {
            check_oracle(&rep);
        }
    }
    for rep in reps::<F7>(2, 2, Some(100)) {
        check_oracle(&rep);
    }
}

#[test]
fn irreducible_blocks_over_f5_are_not_split() {
    // yx = [[0, 1], [3, 0]] has characteristic polynomial t^2 - 3, irreducible mod 5
    let x = Matrix::<F5>::identity(2);
    let y = Matrix::<F5>::from_i64(&[vec![0, 1], vec![3, 0]]);
    let r = Q0Rep::new(x, y).unwrap();
    let report = oracle::analyze(&r).unwrap();
    assert_eq!(report.factors, vec![oracle::Factor::Other(2, 2)]);
    assert!(report.semisimple);
    assert_eq!(oracle::agrees(&r), Some(true));
}
