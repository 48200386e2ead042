use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qtop_core::borel::{diff_hier_eval, hk_decompose};
use qtop_core::domains::{fxomega_order, random_presentation, way_below, FinPoset, FxOmegaElem};
use qtop_core::quasimetric::{ball_topology, qm_axioms_check, specialization_qm, sym_metrize, metric_axioms_check};
use qtop_core::representations::{
    admissible_translate, all_prefixes, delta_prefix, f_conditions_check, random_index_set, FTables, NbhdSurjection,
    PrefixTable, RTable,
};
use qtop_core::space::random_t0_space;
use qtop_core::{PointSet, Rat};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rat() -> impl Strategy<Value = Rat> {
    (-50i64..50, 1i64..20).prop_map(|(p, q)| Rat::frac(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pointset_laws(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (a, b, c) = (PointSet(a), PointSet(b), PointSet(c));
        prop_assert_eq!(a.union(b.intersect(c)), a.union(b).intersect(a.union(c)));
        prop_assert_eq!(a.minus(b), a.intersect(b.complement(64)));
        prop_assert!(a.intersect(b).is_subset(a));
        prop_assert_eq!(a.union(b).len() + a.intersect(b).len(), a.len() + b.len());
        prop_assert_eq!(PointSet::from_points(a.iter()), a);
    }

    #[test]
    fn rat_laws(a in rat(), b in rat(), c in rat()) {
        prop_assert_eq!(&a + &(&b + &c), &(&a + &b) + &c);
        prop_assert_eq!(a.monus(&b), (&a - &b).max(Rat::zero()));
        prop_assert!(a.clone().min(b.clone()) <= a.clone().max(b.clone()));
        let s = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Rat>(&s).unwrap(), a);
    }

    #[test]
    fn delta_is_monotone(s in prop::collection::vec(0u64..6, 0..8), t in prop::collection::vec(0u64..6, 0..4)) {
        let mut ext = s.clone();
        ext.extend(&t);
        prop_assert!(delta_prefix(&s).is_subset(&delta_prefix(&ext)));
        let expect: BTreeSet<u64> = s.iter().filter(|&&v| v > 0).map(|v| v - 1).collect();
        prop_assert_eq!(delta_prefix(&s), expect);
    }

    #[test]
    fn diff_hier_matches_first_entry_parity(raw in prop::collection::vec(any::<u16>(), 0..6)) {
        let mut acc = 0u64;
        let sets: Vec<PointSet> = raw.iter().map(|&r| { acc |= r as u64; PointSet(acc) }).collect();
        let got = diff_hier_eval(&sets).unwrap();
        for x in 0..16 {
            let first = sets.iter().position(|s| s.contains(x));
            let expect = first.is_some_and(|b| b % 2 != sets.len() % 2);
            prop_assert_eq!(got.contains(x), expect, "point {}", x);
        }
    }

    #[test]
    fn hk_decomposition_is_sound(seed in any::<u64>(), target in 0u64..16) {
        let space = random_t0_space(&mut rng(seed), 4, 0.4);
        if let Some((alpha, seq)) = hk_decompose(&space, PointSet(target), 4) {
            prop_assert_eq!(seq.len(), alpha);
            prop_assert!(seq.iter().all(|&u| space.is_open(u)));
            prop_assert_eq!(diff_hier_eval(&seq).unwrap(), PointSet(target));
        }
    }

    #[test]
    fn specialization_metric_is_compatible(seed in any::<u64>(), n in 1usize..7) {
        let space = random_t0_space(&mut rng(seed), n, 0.35);
        let d = specialization_qm(&space);
        prop_assert!(qm_axioms_check(&d).passed());
        prop_assert!(ball_topology(&d).same_topology(&space));
        prop_assert!(metric_axioms_check(&sym_metrize(&d)).passed());
    }

    #[test]
    fn finite_way_below_is_the_order(seed in any::<u64>(), n in 1usize..7) {
        let p = FinPoset::random(&mut rng(seed), n, 0.4);
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(way_below(&p, x, y), p.leq(x, y));
            }
        }
    }

    #[test]
    fn fxomega_order_is_a_partial_order(seed in any::<u64>(), fs in prop::collection::vec((0u64..8, 0usize..4), 3)) {
        let pres = random_presentation(&mut rng(seed), 2, 3);
        let e: Vec<FxOmegaElem> = fs.iter().map(|&(f, n)| FxOmegaElem { f, n }).collect();
        let le = |a: &FxOmegaElem, b: &FxOmegaElem| fxomega_order(a, b, &pres).unwrap();
        for a in &e {
            prop_assert!(le(a, a));
            for b in &e {
                if le(a, b) && le(b, a) {
                    prop_assert_eq!(a, b);
                }
                for c in &e {
                    if le(a, b) && le(b, c) {
                        prop_assert!(le(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn f_conditions_relational_matches_formulas(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let space = random_t0_space(&mut r, n, 0.4);
        let surj = NbhdSurjection::new(space).unwrap();
        let table = PrefixTable::new(n as u64, 2);
        let (tables, images) = FTables::from_surjection(&surj, &table);
        tables.check_consistent().unwrap();
        let family = random_index_set(&mut r, &images, n);
        let report = f_conditions_check(&family, &tables).unwrap();
        prop_assert!(report.agree);
    }
}

#[test]
fn translate_sweep_is_exhaustive() {
    assert_eq!(all_prefixes(4, 5).len(), 1365);
    let f = qtop_core::representations::fixture("delta", 4, 5).unwrap();
    let report = admissible_translate(&f, &RTable::cantor(4096)).unwrap();
    assert_eq!(report.prefixes_tested, 1365);
    assert!(report.holds());
}
