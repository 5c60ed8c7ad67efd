mod common;

use common::*;
use num_rational::Ratio;
use proptest::prelude::*;
use rand::Rng;
use ringforge::decomposition::*;
use ringforge::generate::rng_from_seed;
use ringforge::model::{is_wrap_solution, LinkId};
use ringforge::oracle::{exact_opt, OracleBudget};

fn eps_choice() -> impl Strategy<Value = Ratio<i64>> {
    prop_oneof![Just(Ratio::new(1, 1)), Just(Ratio::new(1, 2)), Just(Ratio::new(1, 3)), Just(Ratio::new(1, 4))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn decomposition_holds_for_any_solution(inst in instances(8, 12, 9), seed in any::<u64>(), eps in eps_choice()) {
        let mut rng = rng_from_seed(seed);
        let f0 = seeded_directed(&mut rng, &inst);
        let solution: Vec<LinkId> = if rng.gen_bool(0.5) {
            exact_opt(&inst, &OracleBudget::default()).unwrap().0
        } else {
            let extra: Vec<LinkId> = inst.all_ids().into_iter().filter(|_| rng.gen_bool(0.5)).collect();
            if is_wrap_solution(&inst, &extra) { extra } else { inst.all_ids() }
        };
        let d = decompose(&inst, &solution, &f0, eps).unwrap();
        prop_assert_eq!(check_decomposition(&inst, &solution, &f0, eps, &d), Ok(()));
    }

    #[test]
    fn partition_is_laminar_and_tangling_is_consistent(inst in instances(10, 14, 1)) {
        let festoons = partition_into_festoons(&inst, &inst.all_ids()).unwrap();
        let mut seen: Vec<LinkId> = festoons.iter().flat_map(|f| f.links.clone()).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, inst.all_ids());
        for (i, a) in festoons.iter().enumerate() {
            prop_assert!(is_festoon(&inst, &a.links));
            for b in &festoons[i + 1..] {
                let (small, big) = if a.within(b) { (a, b) } else { (b, a) };
                if small.within(big) {
                    prop_assert_eq!(tangled(&inst, small, big), tangled_by_interval(&inst, small, big));
                } else {
                    prop_assert!(small.interval.1 < big.interval.0 || big.interval.1 < small.interval.0);
                }
            }
        }
    }
}

#[test]
fn chain_of_three_festoons_gives_a_two_arc_path() {
    let graph = DependencyGraph::build(3, &[(3, vec![2, 1, 0])]).unwrap();
    let arcs: Vec<_> = graph.arcs.iter().map(|a| (a.from, a.to, a.owner)).collect();
    assert_eq!(arcs, vec![(1, 2, 3), (0, 1, 3)]);
    assert!(graph.incoming(0).is_none());
    assert!(DependencyGraph::build(3, &[(1, vec![2, 0]), (2, vec![2, 1])]).is_err());
}
