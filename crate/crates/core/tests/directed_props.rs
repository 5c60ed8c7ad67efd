mod common;

use common::*;
use proptest::prelude::*;
use ringforge::directed::*;
use ringforge::generate::rng_from_seed;
use ringforge::model::{enumerate_cuts, Cut};
use ringforge::oracle::{exact_directed_opt, OracleBudget};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn shortening_yields_the_structure(inst in instances(8, 12, 9), seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let f = seeded_directed(&mut rng, &inst);
        let report = verify_structure(&inst, &f.links);
        prop_assert!(report.passed(), "{:?}", report.violations);
        prop_assert!(is_directed_solution(&inst, &f.links));
        let mut again = make_non_shortenable(&inst, &f.links).unwrap().links;
        let mut before = f.links.clone();
        again.sort();
        before.sort();
        prop_assert_eq!(again, before);
    }

    #[test]
    fn responsibilities_partition_the_cuts(inst in instances(8, 12, 9), seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let f = seeded_directed(&mut rng, &inst);
        let arb = Arborescence::build(&inst, &f).unwrap();
        let resp = responsibilities(&inst, &arb);
        prop_assert_eq!(&resp, &responsibilities_by_descendants(&inst, &arb));
        for cut in enumerate_cuts(&inst) {
            let owners: Vec<usize> = (0..resp.len()).filter(|&i| resp[i].contains(&cut)).collect();
            prop_assert_eq!(owners.len(), 1, "cut {:?}", cut);
            prop_assert!(arb.links()[owners[0]].enters(cut));
        }
    }

    #[test]
    fn descendants_form_intervals(inst in instances(8, 12, 9), seed in any::<u64>(), pick in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let f = seeded_directed(&mut rng, &inst);
        let arb = Arborescence::build(&inst, &f).unwrap();
        let n = inst.n();
        for v in 0..n {
            let below: Vec<usize> = (0..n)
                .filter(|&x| {
                    let mut y = x;
                    loop {
                        if y == v { break true; }
                        match arb.parent(y) { Some(p) => y = p, None => break false }
                    }
                })
                .collect();
            let (lo, hi) = arb.descendants(v);
            prop_assert_eq!(below, (lo..=hi).collect::<Vec<_>>());
        }
        let set: Vec<usize> = (0..n).filter(|x| pick >> x & 1 == 1).collect();
        if !set.is_empty() {
            let top = arb.lca(&set);
            prop_assert!(set.iter().all(|&x| arb.is_descendant(x, top)));
            prop_assert!(top == 0 || (set[0] <= top && top <= *set.last().unwrap()), "lca {} of {:?}", top, set);
        }
    }

    #[test]
    fn shadows_only_weaken(inst in instances(8, 12, 9)) {
        for l in inst.links() {
            let right = DirectedLink::new(l.u, l.v, l);
            let left = DirectedLink::new(l.v, l.u, l);
            for s in shadows(l) {
                let full = if s.head == l.v { right } else { left };
                for cut in enumerate_cuts(&inst) {
                    prop_assert!(!s.enters(cut) || full.enters(cut));
                }
                prop_assert!(is_shadow(&inst, &s));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cheapest_directed_solution_is_optimal(inst in instances(7, 10, 9)) {
        let f = min_cost_directed_solution(&inst).unwrap();
        prop_assert!(is_directed_solution(&inst, &f.links));
        let (_, best) = exact_directed_opt(&inst, &OracleBudget::default()).unwrap();
        prop_assert_eq!(f.cost(), best);
    }
}

#[test]
fn entering_means_head_in_tail_out() {
    let inst = ringforge::Instance::new(5, [(1, 4, 1)]).unwrap();
    let d = DirectedLink::new(1, 4, inst.link(0));
    for cut in enumerate_cuts(&inst) {
        assert_eq!(d.enters(cut), naive_enters(1, 4, (cut.lo, cut.hi)));
    }
    assert!(d.enters(Cut::new(2, 4)));
    assert!(!d.enters(Cut::new(1, 4)));
}
