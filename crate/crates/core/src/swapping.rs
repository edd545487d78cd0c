//! Pairwise swapping for binary symmetric valuations.
//!
//! Repeatedly swaps a 2PS blocking pair chosen by a [`PairSelection`] rule.
//! With 0/1 symmetric values each such swap raises social welfare by at
//! least 2, so at most `2n` swaps happen before the assignment is 2PS.

use serde::Serialize;

use crate::checks::{blocking_pairs, StabilityKind};
use crate::error::{Error, Result};
use crate::model::{Assignment, Instance, MechanismTrace, StepKind};
use crate::sd::validate_order;

/// Which blocking pair to swap when several exist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairSelection {
    /// Lexicographically smallest `(i, j)`.
    Lex,
    /// Pairs ranked by `(min rank, max rank)` of their members in the given
    /// agent order.
    SdOrder(Vec<usize>),
}

impl PairSelection {
    fn pick(&self, pairs: &[(usize, usize)]) -> Option<(usize, usize)> {
        match self {
            PairSelection::Lex => pairs.first().copied(),
            PairSelection::SdOrder(order) => {
                let mut rank = vec![0; order.len()];
                for (k, &a) in order.iter().enumerate() {
                    rank[a] = k;
                }
                pairs.iter().copied().min_by_key(|&(i, j)| {
                    let (a, b) = (rank[i], rank[j]);
                    (a.min(b), a.max(b))
                })
            }
        }
    }
}

/// Runs the swapping mechanism from `mu0`.
///
/// Each trace step carries the slack `X`, the swappers' combined utility
/// gain.
pub fn swapping(inst: &Instance, mu0: &Assignment, rule: &PairSelection) -> Result<(Assignment, MechanismTrace)> {
    if !inst.is_binary_symmetric() {
        return Err(Error::NotBinarySymmetric);
    }
    if let PairSelection::SdOrder(order) = rule {
        validate_order(order, inst.agent_count())?;
    }
    let mut mu = mu0.clone();
    let mut trace = MechanismTrace::default();
    loop {
        let report = blocking_pairs(inst, &mu, StabilityKind::TwoPerson);
        let Some((i, j)) = rule.pick(&report.pair_indices()) else {
            return Ok((mu, trace));
        };
        if trace.moves() >= inst.agent_count() {
            return Err(Error::NonTerminating(format!(
                "more than {} swaps on a binary symmetric instance",
                inst.agent_count()
            )));
        }
        let pair = report.pairs.iter().find(|p| (p.i, p.j) == (i, j)).expect("picked from report");
        let slack = pair.delta_i + pair.delta_j;
        let next = mu.swap(i, j)?;
        trace.push(StepKind::Swap, vec![i, j], inst.social_welfare(&mu), inst.social_welfare(&next));
        trace.steps.last_mut().expect("just pushed").slack = Some(slack);
        mu = next;
    }
}
