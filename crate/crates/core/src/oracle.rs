//! Exhaustive ground truth for small instances.
//!
//! Assignments are enumerated as agent pairings in lexicographic order, and
//! for each pairing every room permutation in lexicographic order. There are
//! `(2n)! / 2^n` assignments, so everything here is capped at
//! [`ENUMERATION_CAP`] agents.

use itertools::Itertools;

use crate::checks::{is_stable, StabilityKind};
use crate::error::{Error, Result};
use crate::model::{Assignment, Instance, Triple, Value};

/// Hard upper bound on the number of agents the oracle will enumerate.
pub const ENUMERATION_CAP: usize = 12;

/// Default cap used by the command line front end.
pub const DEFAULT_CLI_CAP: usize = 10;

pub(crate) fn check_cap(agents: usize, cap: usize) -> Result<()> {
    if agents > cap.min(ENUMERATION_CAP) {
        Err(Error::InstanceTooLarge {
            agents,
            cap: cap.min(ENUMERATION_CAP),
        })
    } else {
        Ok(())
    }
}

/// All perfect pairings of `0..agents`, each as a list of `(a, b)` with
/// `a < b` sorted by `a`, in lexicographic order.
pub fn pairings(agents: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(free: &mut Vec<usize>, current: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(current.clone());
            return;
        }
        let first = free.remove(0);
        for k in 0..free.len() {
            let partner = free.remove(k);
            current.push((first, partner));
            go(free, current, out);
            current.pop();
            free.insert(k, partner);
        }
        free.insert(0, first);
    }
    let mut out = Vec::new();
    go(&mut (0..agents).collect(), &mut Vec::new(), &mut out);
    out
}

/// Number of assignments of `agents` agents: `agents! / 2^(agents/2)`.
pub fn assignment_count(agents: usize) -> u128 {
    let fact: u128 = (1..=agents as u128).product();
    fact >> (agents / 2)
}

/// Iterator over every assignment of an instance, in canonical order.
pub struct Assignments {
    agents: usize,
    pairings: std::vec::IntoIter<Vec<(usize, usize)>>,
    current: Option<Vec<(usize, usize)>>,
    perms: Vec<Vec<usize>>,
    next_perm: usize,
}

impl Iterator for Assignments {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        if self.current.is_none() || self.next_perm == self.perms.len() {
            self.current = Some(self.pairings.next()?);
            self.next_perm = 0;
        }
        let pairing = self.current.as_ref().expect("pairing loaded");
        let perm = &self.perms[self.next_perm];
        self.next_perm += 1;
        let triples = pairing
            .iter()
            .zip(perm)
            .map(|(&(a, b), &r)| Triple::new(a, b, r))
            .collect();
        Some(Assignment::from_triples(triples, self.agents).expect("enumerated assignment is valid"))
    }
}

/// Streams every assignment of `inst` exactly once.
pub fn enumerate_assignments(inst: &Instance) -> Result<Assignments> {
    enumerate_for(inst.agent_count())
}

pub(crate) fn enumerate_for(agents: usize) -> Result<Assignments> {
    check_cap(agents, ENUMERATION_CAP)?;
    let rooms = agents / 2;
    Ok(Assignments {
        agents,
        pairings: pairings(agents).into_iter(),
        current: None,
        perms: (0..rooms).permutations(rooms).collect(),
        next_perm: 0,
    })
}

/// Every assignment without a blocking pair of the given kind.
pub fn all_stable(inst: &Instance, kind: StabilityKind) -> Result<Vec<Assignment>> {
    Ok(enumerate_assignments(inst)?.filter(|mu| is_stable(inst, mu, kind)).collect())
}

/// First stable assignment in enumeration order.
pub fn first_stable(inst: &Instance, kind: StabilityKind) -> Result<Option<Assignment>> {
    Ok(enumerate_assignments(inst)?.find(|mu| is_stable(inst, mu, kind)))
}

fn dominates(a: &[Value], b: &[Value]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y)
}

/// Assignments that no other assignment Pareto dominates, in enumeration
/// order.
pub fn pareto_front(inst: &Instance) -> Result<Vec<Assignment>> {
    let all: Vec<(Assignment, Vec<Value>)> = enumerate_assignments(inst)?
        .map(|mu| {
            let u = inst.utilities(&mu);
            (mu, u)
        })
        .collect();
    // A dominator has strictly larger welfare, and domination is transitive,
    // so scanning by decreasing welfare only needs to test against the front
    // found so far.
    let mut order: Vec<usize> = (0..all.len()).collect();
    order.sort_by_key(|&k| std::cmp::Reverse(all[k].1.iter().sum::<Value>()));
    let mut front: Vec<usize> = Vec::new();
    for k in order {
        if !front.iter().any(|&f| dominates(&all[f].1, &all[k].1)) {
            front.push(k);
        }
    }
    front.sort_unstable();
    Ok(front.into_iter().map(|k| all[k].0.clone()).collect())
}

pub fn is_pareto_optimal(inst: &Instance, mu: &Assignment) -> Result<bool> {
    let base = inst.utilities(mu);
    Ok(!enumerate_assignments(inst)?.any(|other| dominates(&inst.utilities(&other), &base)))
}

/// An assignment Pareto dominating `mu`, if one exists.
pub fn find_dominating(inst: &Instance, mu: &Assignment) -> Result<Option<Assignment>> {
    let base = inst.utilities(mu);
    Ok(enumerate_assignments(inst)?.find(|other| dominates(&inst.utilities(other), &base)))
}

/// Maximum social welfare and the first assignment attaining it.
pub fn max_social_welfare(inst: &Instance) -> Result<(Value, Assignment)> {
    let mut best: Option<(Value, Assignment)> = None;
    for mu in enumerate_assignments(inst)? {
        let sw = inst.social_welfare(&mu);
        if best.as_ref().is_none_or(|(b, _)| sw > *b) {
            best = Some((sw, mu));
        }
    }
    Ok(best.expect("at least one assignment exists"))
}
