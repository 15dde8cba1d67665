use ggt_core::coset::{
    enumerate, enumerate_with, permutation_image, verify_table, Presentation, Strategy, DEFAULT_CAP,
};
use ggt_core::perm::cycle_type;
use ggt_core::words::{dictionary, parse_word, Word};
use proptest::prelude::*;

fn cases() -> Vec<(Presentation, Vec<Word>)> {
    let g0 = Presentation::g0();
    let sl2 = Presentation::sl2z();
    let st = |s: &str| parse_word(s, sl2.alphabet()).unwrap();
    vec![
        (g0.clone(), vec![dictionary::xy("xyx^-2"), dictionary::xy("y")]),
        (g0.clone(), vec![dictionary::xy("x"), dictionary::xy("y")]),
        (g0, vec![dictionary::xy("xyx^-2"), dictionary::xy("x")]),
        (sl2.clone(), vec![st("sst"), st("ssst")]),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn count_ignores_strategy_and_relator_order(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for (p, gens) in cases() {
            let base = enumerate(&p, &gens, DEFAULT_CAP).unwrap().count();
            let mut rels = p.relators().to_vec();
            rels.shuffle(&mut rng);
            let shuffled = p.with_relators(rels);
            for strategy in [Strategy::Hlt, Strategy::Felsch] {
                let t = enumerate_with(&shuffled, &gens, DEFAULT_CAP, strategy).unwrap();
                prop_assert_eq!(t.count(), base);
                prop_assert!(verify_table(&shuffled, &gens, &t));
            }
        }
    }
}

#[test]
fn g1_coset_action() {
    let g0 = Presentation::g0();
    let gens = [dictionary::xy("xyx^-2"), dictionary::xy("y")];
    let t = enumerate(&g0, &gens, DEFAULT_CAP).unwrap();
    assert_eq!(t.count(), 4);
    let images = permutation_image(&t);
    let by_name = |c: char| {
        let i = t.generators().iter().position(|g| g.symbol() == c).unwrap();
        images[i].clone()
    };
    // x acts as a 4-cycle, y as a 3-cycle fixing the subgroup coset
    assert_eq!(cycle_type(&by_name('x')), vec![4]);
    assert_eq!(cycle_type(&by_name('y')), vec![3, 1]);
    assert_eq!(by_name('y')[0], 0);
    for r in g0.relators() {
        for c in 0..t.count() {
            assert_eq!(t.trace(c, r), Some(c));
        }
    }
}

#[test]
fn overflow_is_reported() {
    let g0 = Presentation::g0();
    assert!(enumerate(&g0, &[dictionary::xy("x")], 50).is_err());
}
