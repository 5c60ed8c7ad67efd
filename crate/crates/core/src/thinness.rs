//! Thinness certificates built from maximal laminar families of 2-cuts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Cut, Instance, LinkId};

/// Largest α the component search accepts; the pattern count grows as
/// `|L|^α`, so larger requests are capped and reported.
pub const ALPHA_CAP: usize = 8;

/// A laminar family over `ground` that contains every singleton and `ground`
/// itself, and splits every non-singleton member into two members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LaminarFamily {
    pub ground: Cut,
    pub cuts: Vec<Cut>,
}

impl LaminarFamily {
    /// Verifies the family from scratch: maximal laminar structure and the
    /// crossing bound.
    pub fn check(&self, inst: &Instance, set: &[LinkId], alpha: usize) -> std::result::Result<(), String> {
        let g = self.ground;
        let mut cuts = self.cuts.clone();
        cuts.sort();
        cuts.dedup();
        if cuts.len() != self.cuts.len() {
            return Err("duplicate member".into());
        }
        if !cuts.contains(&g) {
            return Err("ground interval missing".into());
        }
        for v in g.lo..=g.hi {
            if !cuts.contains(&Cut::singleton(v)) {
                return Err(format!("singleton {{{v}}} missing"));
            }
        }
        for (i, a) in cuts.iter().enumerate() {
            if !a.is_subset_of(&g) {
                return Err(format!("{a:?} leaves the ground interval"));
            }
            for b in &cuts[i + 1..] {
                let disjoint = a.hi < b.lo || b.hi < a.lo;
                if !(disjoint || a.is_subset_of(b) || b.is_subset_of(a)) {
                    return Err(format!("{a:?} and {b:?} cross"));
                }
            }
            if a.len() > 1 {
                let split =
                    (a.lo..a.hi).any(|m| cuts.contains(&Cut::new(a.lo, m)) && cuts.contains(&Cut::new(m + 1, a.hi)));
                if !split {
                    return Err(format!("{a:?} is not split into two members"));
                }
            }
            let crossing = crossing_count(inst, set, *a);
            if crossing > alpha {
                return Err(format!("{a:?} is crossed by {crossing} links"));
            }
        }
        Ok(())
    }
}

/// `|δ_set(cut)|`.
pub fn crossing_count(inst: &Instance, set: &[LinkId], cut: Cut) -> usize {
    set.iter().filter(|&&i| inst.link(i).covers(cut)).count()
}

/// Interval DP over splits of `ground`; smallest feasible split wins.
fn witness(inst: &Instance, set: &[LinkId], alpha: usize, ground: Cut) -> Option<LaminarFamily> {
    let (base, len) = (ground.lo, ground.len());
    let mut split: Vec<Vec<Option<usize>>> = vec![vec![None; len]; len];
    let mut ok = vec![vec![false; len]; len];
    for width in 0..len {
        for i in 0..len - width {
            let j = i + width;
            if crossing_count(inst, set, Cut::new(base + i, base + j)) > alpha {
                continue;
            }
            if width == 0 {
                ok[i][j] = true;
            } else if let Some(m) = (i..j).find(|&m| ok[i][m] && ok[m + 1][j]) {
                ok[i][j] = true;
                split[i][j] = Some(m);
            }
        }
    }
    if !ok[0][len - 1] {
        return None;
    }
    let mut cuts = Vec::with_capacity(2 * len - 1);
    let mut stack = vec![(0, len - 1)];
    while let Some((i, j)) = stack.pop() {
        cuts.push(Cut::new(base + i, base + j));
        if let Some(m) = split[i][j] {
            stack.push((i, m));
            stack.push((m + 1, j));
        }
    }
    cuts.sort();
    Some(LaminarFamily { ground, cuts })
}

pub fn alpha_thin_witness(inst: &Instance, set: &[LinkId], alpha: usize) -> Option<LaminarFamily> {
    witness(inst, set, alpha, inst.full_cut())
}

pub fn is_alpha_thin(inst: &Instance, set: &[LinkId], alpha: usize) -> bool {
    alpha_thin_witness(inst, set, alpha).is_some()
}

/// The local variant over subintervals of `ground`; every link needs an
/// endpoint in `ground`.
pub fn alpha_thin_witness_within(
    inst: &Instance,
    set: &[LinkId],
    alpha: usize,
    ground: Cut,
) -> Result<Option<LaminarFamily>> {
    if let Some(&bad) = set.iter().find(|&&i| {
        let l = inst.link(i);
        !ground.contains(l.u) && !ground.contains(l.v)
    }) {
        return Err(Error::LinkOutsideCut { link: bad, lo: ground.lo, hi: ground.hi });
    }
    Ok(witness(inst, set, alpha, ground))
}

pub fn is_alpha_thin_within(inst: &Instance, set: &[LinkId], alpha: usize, ground: Cut) -> Result<bool> {
    Ok(alpha_thin_witness_within(inst, set, alpha, ground)?.is_some())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Every maximal laminar family over `ground`, one per binary split tree.
    pub(crate) fn all_families(ground: Cut) -> Vec<Vec<Cut>> {
        if ground.len() == 1 {
            return vec![vec![ground]];
        }
        let mut out = Vec::new();
        for m in ground.lo..ground.hi {
            for left in all_families(Cut::new(ground.lo, m)) {
                for right in all_families(Cut::new(m + 1, ground.hi)) {
                    let mut fam = vec![ground];
                    fam.extend(left.iter().copied());
                    fam.extend(right.iter().copied());
                    out.push(fam);
                }
            }
        }
        out
    }

    fn r3() -> Instance {
        Instance::new(3, [(0, 2, 10), (1, 2, 1), (0, 1, 1)]).unwrap()
    }

    #[test]
    fn family_counts_are_catalan() {
        let counts: Vec<_> = (1..=6).map(|k| all_families(Cut::new(1, k)).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 14, 42]);
    }

    #[test]
    fn trivial_cases() {
        let inst = r3();
        for id in 0..3 {
            assert!(is_alpha_thin(&inst, &[id], 1));
        }
        assert!(is_alpha_thin(&inst, &[], 1));
        assert!(is_alpha_thin_within(&inst, &[1], 1, Cut::new(1, 2)).unwrap());
        assert!(is_alpha_thin_within(&inst, &[1, 2], 2, Cut::singleton(1)).unwrap());
        assert!(matches!(is_alpha_thin_within(&inst, &[0], 1, Cut::singleton(1)), Err(Error::LinkOutsideCut { .. })));
    }

    #[test]
    fn parallel_links_need_their_multiplicity() {
        // Every maximal family holds the singleton {1}, which all copies cross.
        let inst = Instance::new(5, [(1, 2, 1), (1, 2, 1), (1, 2, 1), (0, 3, 1)]).unwrap();
        let all = inst.all_ids();
        let fam = alpha_thin_witness(&inst, &all, 3).expect("3-thin");
        fam.check(&inst, &all, 3).unwrap();
        assert!(!is_alpha_thin(&inst, &all, 2));
    }

    fn arb_instance() -> impl Strategy<Value = (Instance, Vec<LinkId>, usize)> {
        (3usize..=7).prop_flat_map(|n| {
            let link = (0..n, 0..n).prop_filter("distinct", |(a, b)| a != b);
            (Just(n), proptest::collection::vec(link, 0..8), 1usize..=3).prop_map(|(n, links, alpha)| {
                let inst = Instance::new(n, links.into_iter().map(|(a, b)| (a, b, 1))).unwrap();
                let ids = inst.all_ids();
                (inst, ids, alpha)
            })
        })
    }

    proptest! {
        #[test]
        fn dp_matches_family_enumeration((inst, ids, alpha) in arb_instance()) {
            let brute = all_families(inst.full_cut())
                .into_iter()
                .any(|fam| fam.iter().all(|&c| crossing_count(&inst, &ids, c) <= alpha));
            let dp = alpha_thin_witness(&inst, &ids, alpha);
            prop_assert_eq!(brute, dp.is_some());
            if let Some(fam) = dp {
                prop_assert_eq!(fam.check(&inst, &ids, alpha), Ok(()));
                prop_assert_eq!(fam.cuts.len(), 2 * (inst.n() - 1) - 1);
            }
        }

        #[test]
        fn thinness_is_monotone((inst, ids, alpha) in arb_instance(), mask in any::<u16>()) {
            if is_alpha_thin(&inst, &ids, alpha) {
                prop_assert!(is_alpha_thin(&inst, &ids, alpha + 1));
                let sub: Vec<_> = ids.iter().copied().filter(|&i| mask >> i & 1 == 1).collect();
                prop_assert!(is_alpha_thin(&inst, &sub, alpha));
            }
        }
    }
}
