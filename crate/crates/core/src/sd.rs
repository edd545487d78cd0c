//! Serial dictatorship over a fixed agent order.

use crate::error::{Error, Result};
use crate::model::{Assignment, Instance, MechanismTrace, StepKind, Triple};

/// Checks that `order` is a permutation of `0..agents`.
pub fn validate_order(order: &[usize], agents: usize) -> Result<()> {
    if order.len() != agents {
        return Err(Error::InvalidOrder(format!(
            "expected {agents} agents, got {}",
            order.len()
        )));
    }
    let mut seen = vec![false; agents];
    for &i in order {
        if i >= agents {
            return Err(Error::InvalidOrder(format!("agent {i} out of range")));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidOrder(format!("agent {i} listed twice")));
        }
    }
    Ok(())
}

/// Each unmatched agent in `order` picks its favourite unmatched roommate
/// and, independently, its favourite free room. Ties go to the lowest index.
///
/// The trace has one `Pick` step per dictator, with the welfare of the
/// triples formed so far.
pub fn serial_dictatorship(inst: &Instance, order: &[usize]) -> Result<(Assignment, MechanismTrace)> {
    let agents = inst.agent_count();
    validate_order(order, agents)?;
    let mut matched = vec![false; agents];
    let mut room_taken = vec![false; inst.room_count()];
    let mut triples = Vec::with_capacity(inst.room_count());
    let mut trace = MechanismTrace::default();

    for &i in order {
        if matched[i] {
            continue;
        }
        // max_by_key keeps the last maximum, so scan in reverse to prefer
        // the lowest index.
        let j = (0..agents)
            .rev()
            .filter(|&j| j != i && !matched[j])
            .max_by_key(|&j| inst.agent_value(i, j))
            .expect("an unmatched partner always remains");
        let r = (0..inst.room_count())
            .rev()
            .filter(|&r| !room_taken[r])
            .max_by_key(|&r| inst.room_value(i, r))
            .expect("a free room always remains");
        matched[i] = true;
        matched[j] = true;
        room_taken[r] = true;
        let before = inst.partial_welfare(&triples);
        triples.push(Triple::new(i, j, r));
        trace.push(StepKind::Pick, vec![i, j, r], before, inst.partial_welfare(&triples));
    }
    Ok((Assignment::from_triples(triples, agents)?, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_instance_pairs_by_index() {
        let inst = Instance::zeros(6).unwrap();
        let (mu, trace) = serial_dictatorship(&inst, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(mu, Assignment::identity(3));
        assert_eq!(trace.count(StepKind::Pick), 3);
    }

    #[test]
    fn rejects_bad_orders() {
        let inst = Instance::zeros(4).unwrap();
        assert!(matches!(serial_dictatorship(&inst, &[0, 1, 2]), Err(Error::InvalidOrder(_))));
        assert!(matches!(serial_dictatorship(&inst, &[0, 1, 1, 3]), Err(Error::InvalidOrder(_))));
        assert!(matches!(serial_dictatorship(&inst, &[0, 1, 2, 4]), Err(Error::InvalidOrder(_))));
    }

    #[test]
    fn dictator_takes_favourites() {
        // agent 3 goes first, loves agent 0 and room 1
        let mut h = vec![vec![0; 4]; 4];
        h[3][0] = 5;
        let mut v = vec![vec![0; 2]; 4];
        v[3][1] = 2;
        let inst = Instance::new(h, v).unwrap();
        let (mu, trace) = serial_dictatorship(&inst, &[3, 2, 1, 0]).unwrap();
        assert_eq!(mu, Assignment::from_tuples(&[(1, 2, 0), (0, 3, 1)]).unwrap());
        assert_eq!(trace.steps[0].sw_after, 7);
        assert_eq!(trace.steps[1].sw_after, inst.social_welfare(&mu));
    }
}
