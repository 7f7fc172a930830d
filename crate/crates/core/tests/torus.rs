mod common;

use common::{random_classes, random_geodesics, rng, small_rational};
use mutwb_core::curves::{det, Configuration, GeodesicConfig};
use mutwb_core::error::Error;
use mutwb_core::field::q;
use mutwb_core::laurent::RationalMap;
use mutwb_core::local::Character;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

fn check_straightened(cfg: &Configuration) -> Result<(), TestCaseError> {
    let ledger = cfg.ledger();
    let classes = cfg.classes().expect("geodesic mode keeps classes");
    prop_assert!(ledger.self_intersections().iter().all(|&s| s == 0));
    let p = ledger.positive();
    for i in 0..classes.len() {
        for j in 0..classes.len() {
            prop_assert_eq!(p[i][j] as i64 - p[j][i] as i64, det(classes[i], classes[j]));
            prop_assert!(p[i][j] == 0 || p[j][i] == 0, "straightened curves cross with one sign");
        }
    }
    prop_assert_eq!(cfg.ledger(), &GeodesicConfig::new(classes.to_vec()).unwrap().ledger());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // five words per configuration, 1000 in all
    #[test]
    fn geodesic_configurations_stay_embedded(s in any::<u64>()) {
        let mut r = rng(s);
        let start = Configuration::geodesic(&random_geodesics(&mut r, 6), None).unwrap();
        check_straightened(&start)?;
        for _ in 0..5 {
            let len = r.gen_range(0..=10);
            let mut cfg = start.clone();
            for _ in 0..len {
                let k = r.gen_range(0..cfg.len());
                prop_assert!(cfg.is_mutable(k).unwrap());
                cfg = match cfg.mutate(k) {
                    Ok(c) => c,
                    Err(Error::Overflow) => break,
                    Err(e) => return Err(TestCaseError::fail(e.to_string())),
                };
                check_straightened(&cfg)?;
                let classes: Vec<Vec<i64>> = cfg.classes().unwrap().iter().map(|c| c.to_vec()).collect();
                prop_assert_eq!(cfg.seed().vectors(), &classes[..]);
            }
        }
    }
}

fn character(r: &mut rand::rngs::StdRng) -> Character {
    // roots of unity make 1 - x(v) vanish often enough to exercise the check
    let pick = |r: &mut rand::rngs::StdRng| match r.gen_range(0..4) {
        0 => q(1, 1),
        1 => q(-1, 1),
        _ => small_rational(r),
    };
    Character::new(pick(r), pick(r)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn character_mutation_is_the_signed_x_map(s in any::<u64>()) {
        let mut r = rng(s);
        let ch = character(&mut r);
        let cfg = GeodesicConfig::new(random_classes(&mut r, 6)).unwrap();
        let seed = cfg.seed();
        prop_assert!(seed.signing().iter().all(|&b| b));
        for k in 0..cfg.len() {
            let vk = cfg.class(k).unwrap();
            let singular = (q(1, 1) - ch.holonomy(vk)).is_zero();
            let map = RationalMap::x_mutation(&seed, k, true).unwrap();
            match ch.mutate(&cfg, k) {
                Ok(next) => {
                    prop_assert!(!singular);
                    prop_assert_eq!(map.evaluate(&ch.values()).unwrap(), next.values().to_vec());
                }
                Err(Error::NotRegular) => {
                    prop_assert!(singular);
                    // v_k is nonzero so it crosses a or b, and that coordinate hits the pole
                    prop_assert_eq!(map.evaluate(&ch.values()), Err(Error::PoleAtPoint));
                }
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }
}

#[test]
fn trivial_character_blocks_everything() {
    let ch = Character::new(q(1, 1), q(1, 1)).unwrap();
    let cfg = mutwb_core::registry::vianna();
    for k in 0..3 {
        assert_eq!(ch.mutate(&cfg, k), Err(Error::NotRegular));
    }
    let ch = Character::new(q(2, 1), q(-1, 3)).unwrap();
    let next = ch.mutate(&cfg, 2).unwrap();
    assert!(!next.a().is_one() || !next.b().is_one());
}
