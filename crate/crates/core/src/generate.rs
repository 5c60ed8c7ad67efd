//! Seeded random instances and directed solutions.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::directed::{all_shadows, is_directed_solution, DirectedLink};
use crate::error::{Error, Result};
use crate::model::{is_feasible, Cost, Instance};

/// Attempts before a generator gives up on finding a feasible instance.
pub const MAX_TRIES: usize = 1000;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `m` links with distinct uniform endpoints and costs in `0..=max_cost`,
/// redrawn until the instance is feasible.
pub fn random_instance_with<R: Rng>(rng: &mut R, n: usize, m: usize, max_cost: Cost) -> Result<Instance> {
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    if max_cost < 0 {
        return Err(Error::InvalidArgument("max cost must be non-negative".into()));
    }
    for _ in 0..MAX_TRIES {
        let links: Vec<_> = (0..m)
            .map(|_| {
                let u = rng.gen_range(0..n);
                let v = (u + rng.gen_range(1..n)) % n;
                (u, v, rng.gen_range(0..=max_cost))
            })
            .collect();
        let inst = Instance::new(n, links)?;
        if is_feasible(&inst) {
            return Ok(inst);
        }
    }
    Err(Error::Infeasible)
}

pub fn random_instance(n: usize, m: usize, max_cost: Cost, seed: u64) -> Result<Instance> {
    random_instance_with(&mut rng_from_seed(seed), n, m, max_cost)
}

/// A random directed solution made of shadows: a random subset, completed
/// in random order until every cut is entered.
pub fn random_directed_solution<R: Rng>(rng: &mut R, inst: &Instance, keep: f64) -> Result<Vec<DirectedLink>> {
    let mut pool = all_shadows(inst);
    if !is_directed_solution(inst, &pool) {
        return Err(Error::Infeasible);
    }
    pool.shuffle(rng);
    let (mut chosen, mut rest): (Vec<_>, Vec<_>) = pool.into_iter().partition(|_| rng.gen_bool(keep));
    while !is_directed_solution(inst, &chosen) {
        chosen.push(rest.pop().expect("all shadows form a directed solution"));
    }
    Ok(chosen)
}
