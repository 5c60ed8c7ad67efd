mod common;

use common::*;
use num_rational::Ratio;
use proptest::prelude::*;
use ringforge::model::is_wrap_solution;
use ringforge::oracle::{exact_opt, OracleBudget};
use ringforge::solvers::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn two_approx_is_within_twice_optimum(inst in instances(7, 10, 9)) {
        let report = two_approx(&inst).unwrap();
        let (_, opt) = exact_opt(&inst, &OracleBudget::default()).unwrap();
        prop_assert!(is_wrap_solution(&inst, &report.solution));
        prop_assert!(report.cost <= 2 * opt);
    }

    #[test]
    fn greedy_steps_never_lose(inst in instances(7, 10, 9)) {
        let report = relative_greedy(&inst, Ratio::new(1, 4)).unwrap();
        prop_assert!(is_wrap_solution(&inst, &report.solution));
        prop_assert!(report.iterations < inst.n());
        prop_assert_eq!(report.trace.len(), report.iterations);
        for step in &report.trace {
            prop_assert!(step.component_cost <= step.dropped_cost);
            prop_assert!(!step.dropped.is_empty());
        }
        let (_, opt) = exact_opt(&inst, &OracleBudget::default()).unwrap();
        prop_assert!(report.cost as i128 * 10000 <= 19432 * opt as i128);
        prop_assert!(report.cost <= report.initial_cost);
    }

    #[test]
    fn local_search_potential_falls_as_promised(inst in instances(7, 10, 9)) {
        let report = local_search(&inst, Ratio::new(1, 2)).unwrap();
        prop_assert!(is_wrap_solution(&inst, &report.solution));
        for step in &report.trace {
            let (before, after, promised) = (
                step.potential2_before.unwrap(),
                step.potential2_after.unwrap(),
                step.promised_decrease2.unwrap(),
            );
            prop_assert!(after < before);
            prop_assert!(before - after >= promised);
        }
        let (_, opt) = exact_opt(&inst, &OracleBudget::default()).unwrap();
        prop_assert!(report.cost <= 2 * opt);
    }

    #[test]
    fn mixed_state_from_any_solution_is_valid(inst in instances(8, 12, 9), mask in any::<u64>()) {
        let all = inst.all_ids();
        let chosen: Vec<usize> = all.iter().copied().filter(|i| mask >> i & 1 == 1).collect();
        let start = if is_wrap_solution(&inst, &chosen) { chosen } else { all };
        let state = MixedState::from_links(&inst, &start).unwrap();
        prop_assert_eq!(state.validate(&inst), Ok(()));
        prop_assert!(state.links().iter().all(|l| start.contains(l)));
        prop_assert!(is_wrap_solution(&inst, &state.links()));
    }
}

#[test]
fn epsilon_parsing_accepts_fractions_and_decimals() {
    assert_eq!(parse_epsilon("1/4").unwrap(), Ratio::new(1, 4));
    assert_eq!(parse_epsilon("0.25").unwrap(), Ratio::new(1, 4));
    assert_eq!(parse_epsilon("1").unwrap(), Ratio::new(1, 1));
    for bad in ["0", "-0.5", "x", "1/0", ""] {
        assert!(parse_epsilon(bad).is_err(), "{bad}");
    }
    assert_eq!(thin_parameter(2, Ratio::new(1, 4)), (8, true));
    assert_eq!(thin_parameter(1, Ratio::new(1, 1)), (4, false));
}
