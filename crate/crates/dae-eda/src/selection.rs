//! Tournament selection without replacement, tournament size two.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::population::Population;
use crate::rng::RngState;

/// Randomly pair the population without replacement and keep the fitter
/// member of each pair. With an odd population the single unpaired
/// individual advances unexamined, so the output has `ceil(len / 2)`
/// members. Fitness ties are broken by a fair coin.
pub fn tournament_select(pop: &Population, rng: &mut RngState) -> Result<Population> {
    if pop.len() < 2 {
        return Err(Error::InvalidArgument(
            "tournament selection needs at least two individuals".into(),
        ));
    }
    if !pop.fully_evaluated() {
        return Err(Error::Unevaluated);
    }
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.shuffle(rng);
    select_in_order(pop, &order, rng)
}

/// Selection with an explicit pairing order: `(order[0], order[1])`,
/// `(order[2], order[3])`, ... Exposed for tests that need forced pairings.
pub(crate) fn select_in_order(
    pop: &Population,
    order: &[usize],
    rng: &mut RngState,
) -> Result<Population> {
    let members = pop.members();
    let mut winners = Vec::with_capacity(order.len().div_ceil(2));
    for pair in order.chunks(2) {
        let winner = match *pair {
            [lone] => lone,
            [a, b] => {
                let fa = members[a].fitness().ok_or(Error::Unevaluated)?;
                let fb = members[b].fitness().ok_or(Error::Unevaluated)?;
                if fa > fb {
                    a
                } else if fb > fa {
                    b
                } else if rng.gen_bool(0.5) {
                    a
                } else {
                    b
                }
            }
            _ => unreachable!("chunks(2) yields one- or two-element slices"),
        };
        winners.push(members[winner].clone());
    }
    Population::new(winners)
}
