mod common;

use common::*;
use proptest::prelude::*;
use ringforge::directed::Arborescence;
use ringforge::dropcalc::*;
use ringforge::generate::rng_from_seed;
use ringforge::model::{enumerate_cuts, LinkId};

fn subset(m: usize, mask: u64) -> Vec<LinkId> {
    (0..m).filter(|&i| mask >> i & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn three_drop_computations_agree(inst in instances(8, 12, 9), seed in any::<u64>(), mask in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let f = seeded_directed(&mut rng, &inst);
        let arb = Arborescence::build(&inst, &f).unwrap();
        let k = subset(inst.links().len(), mask);
        let by_definition = drop_by_definition(&inst, &arb, &k);
        prop_assert_eq!(&by_definition, &drop_by_characterization(&inst, &arb, &k));
        prop_assert_eq!(&by_definition, &drop_componentwise(&inst, &arb, &k));
        if components(&inst, &k).len() == 1 {
            let mut connected = drop_connected(&inst, &arb, &k).unwrap();
            connected.sort_unstable();
            prop_assert_eq!(&by_definition, &connected);
        }
    }

    #[test]
    fn drop_is_monotone_and_keeps_a_mixed_solution(
        inst in instances(8, 12, 9), seed in any::<u64>(), mask in any::<u64>(), extra in any::<u64>()
    ) {
        let mut rng = rng_from_seed(seed);
        let f = seeded_directed(&mut rng, &inst);
        let arb = Arborescence::build(&inst, &f).unwrap();
        let m = inst.links().len();
        let small = subset(m, mask);
        let large = subset(m, mask | extra);
        let d_small = drop_set(&inst, &arb, &small);
        let d_large = drop_set(&inst, &arb, &large);
        prop_assert!(d_small.iter().all(|i| d_large.contains(i)));
        prop_assert!(mixed_solution(&inst, arb.links(), &d_small, &small));
        let removable = removable_one_at_a_time(&inst, &arb, &small);
        prop_assert!(d_small.iter().all(|i| removable.contains(i)));
    }

    #[test]
    fn coverage_follows_connectivity(inst in instances(8, 12, 9), mask in any::<u64>()) {
        let k = subset(inst.links().len(), mask);
        let comps = components(&inst, &k);
        for cut in enumerate_cuts(&inst) {
            let escapes = comps.iter().any(|comp| {
                let vs = endpoints(&inst, comp);
                vs.iter().any(|&x| cut.contains(x)) && vs.iter().any(|&x| !cut.contains(x))
            });
            prop_assert_eq!(covered_by(&inst, &k, cut), escapes, "cut {:?}", cut);
        }
    }
}

#[test]
fn components_join_intersecting_links_only() {
    let inst = ringforge::Instance::new(8, [(1, 3, 1), (2, 5, 1), (6, 7, 1), (0, 4, 1)]).unwrap();
    assert_eq!(components(&inst, &[0, 1, 2]), vec![vec![0, 1], vec![2]]);
    assert!(intersects(inst.link(0), inst.link(1)));
    assert!(!intersects(inst.link(0), inst.link(2)));
    assert!(connected_vertices(&inst, &[0, 1], 1, 5));
    assert!(!connected_vertices(&inst, &[0, 1], 1, 6));
}
