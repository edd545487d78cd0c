//! Searching for profitable misreports.
//!
//! A misreport replaces one agent's two value rows. The manipulator's gain is
//! always measured with its true values.

use std::collections::HashSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::model::{Assignment, Instance, Value};

/// Default cap on the number of misreports a search may try.
pub const DEFAULT_BUDGET: u128 = 2_000_000;

/// Reported value rows for one agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Misreport {
    pub agent_values: Vec<Value>,
    pub room_values: Vec<Value>,
}

impl Misreport {
    /// The agent's true rows.
    pub fn truthful(inst: &Instance, agent: usize) -> Self {
        Misreport {
            agent_values: inst.agent_values()[agent].clone(),
            room_values: inst.room_values()[agent].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManipulationCheck {
    pub improved: bool,
    pub truthful: Value,
    /// `None` when the mechanism rejects the misreported instance.
    pub manipulated: Option<Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchSpace {
    /// Rearrangements of the agent's true roommate values (diagonal fixed)
    /// combined with rearrangements of its true room values.
    Permutations,
    /// Every pair of rows with entries in `0..=max`.
    Grid { max: Value },
}

fn truthful_utility(inst: &Instance, mechanism: &Mechanism, initial: Option<&Assignment>, agent: usize) -> Result<Value> {
    let out = mechanism.run(inst, initial)?;
    Ok(inst.utility(&out.assignment, agent))
}

fn manipulated_utility(
    inst: &Instance,
    mechanism: &Mechanism,
    initial: Option<&Assignment>,
    agent: usize,
    report: &Misreport,
) -> Result<Option<Value>> {
    let lied = inst.with_report(agent, &report.agent_values, &report.room_values)?;
    Ok(mechanism.run(&lied, initial).ok().map(|out| inst.utility(&out.assignment, agent)))
}

/// Runs `mechanism` truthfully and with `agent` reporting `report`.
pub fn verify_manipulation(
    inst: &Instance,
    mechanism: &Mechanism,
    initial: Option<&Assignment>,
    agent: usize,
    report: &Misreport,
) -> Result<ManipulationCheck> {
    let truthful = truthful_utility(inst, mechanism, initial, agent)?;
    let manipulated = manipulated_utility(inst, mechanism, initial, agent, report)?;
    Ok(ManipulationCheck {
        improved: manipulated.is_some_and(|m| m > truthful),
        truthful,
        manipulated,
    })
}

/// Number of candidate misreports in `space` before deduplication.
pub fn space_size(inst: &Instance, space: SearchSpace) -> u128 {
    let others = inst.agent_count() as u128 - 1;
    let rooms = inst.room_count() as u128;
    let fact = |k: u128| (1..=k).product::<u128>();
    match space {
        SearchSpace::Permutations => fact(others).saturating_mul(fact(rooms)),
        SearchSpace::Grid { max } => (max as u128 + 1).saturating_pow((others + rooms) as u32),
    }
}

fn candidates(inst: &Instance, agent: usize, space: SearchSpace) -> Box<dyn Iterator<Item = Misreport> + '_> {
    let n = inst.agent_count();
    let rooms = inst.room_count();
    let others: Vec<usize> = (0..n).filter(|&j| j != agent).collect();
    let with_diagonal = move |vals: &[Value]| {
        let mut row = vec![0; n];
        for (&j, &x) in others.iter().zip(vals) {
            row[j] = x;
        }
        row
    };
    match space {
        SearchSpace::Permutations => {
            let h: Vec<Value> = (0..n).filter(|&j| j != agent).map(|j| inst.agent_value(agent, j)).collect();
            let v = inst.room_values()[agent].clone();
            let hs: Vec<Vec<Value>> = h.iter().copied().permutations(h.len()).unique().collect();
            let vs: Vec<Vec<Value>> = v.iter().copied().permutations(v.len()).unique().collect();
            Box::new(hs.into_iter().cartesian_product(vs).map(move |(hp, vp)| Misreport {
                agent_values: with_diagonal(&hp),
                room_values: vp,
            }))
        }
        SearchSpace::Grid { max } => Box::new(
            std::iter::repeat_n(0..=max, n - 1 + rooms)
                .multi_cartesian_product()
                .map(move |vals| Misreport {
                    agent_values: with_diagonal(&vals[..n - 1]),
                    room_values: vals[n - 1..].to_vec(),
                }),
        ),
    }
}

/// First misreport in enumeration order that strictly improves `agent`.
pub fn manipulation_search(
    inst: &Instance,
    mechanism: &Mechanism,
    initial: Option<&Assignment>,
    agent: usize,
    space: SearchSpace,
    budget: u128,
) -> Result<Option<(Misreport, ManipulationCheck)>> {
    let size = space_size(inst, space);
    if size > budget {
        return Err(Error::SpaceTooLarge { size, budget });
    }
    let truthful = truthful_utility(inst, mechanism, initial, agent)?;
    let honest = Misreport::truthful(inst, agent);
    let mut tried = HashSet::new();
    for report in candidates(inst, agent, space) {
        if report == honest || !tried.insert(report.clone()) {
            continue;
        }
        let manipulated = manipulated_utility(inst, mechanism, initial, agent, &report)?;
        if manipulated.is_some_and(|m| m > truthful) {
            let check = ManipulationCheck {
                improved: true,
                truthful,
                manipulated,
            };
            return Ok(Some((report, check)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_report_never_improves() {
        let inst = Instance::new(
            vec![vec![0, 3, 1, 2], vec![1, 0, 2, 3], vec![2, 3, 0, 1], vec![3, 1, 2, 0]],
            vec![vec![1, 2], vec![2, 1], vec![0, 3], vec![3, 0]],
        )
        .unwrap();
        for agent in 0..4 {
            let check = verify_manipulation(&inst, &Mechanism::sd(), None, agent, &Misreport::truthful(&inst, agent)).unwrap();
            assert!(!check.improved);
            assert_eq!(check.manipulated, Some(check.truthful));
        }
    }

    #[test]
    fn zero_instance_has_nothing_to_gain() {
        let inst = Instance::zeros(4).unwrap();
        let found = manipulation_search(&inst, &Mechanism::cttcr(), None, 0, SearchSpace::Grid { max: 1 }, DEFAULT_BUDGET).unwrap();
        assert!(found.is_none());
    }

    #[test]
    fn budget_enforced() {
        let inst = Instance::zeros(10).unwrap();
        assert_eq!(space_size(&inst, SearchSpace::Grid { max: 3 }), 4u128.pow(14));
        assert!(matches!(
            manipulation_search(&inst, &Mechanism::sd(), None, 0, SearchSpace::Grid { max: 3 }, 1000),
            Err(Error::SpaceTooLarge { .. })
        ));
    }

    #[test]
    fn grid_candidates_keep_diagonal_zero() {
        let inst = Instance::zeros(4).unwrap();
        let all: Vec<Misreport> = candidates(&inst, 2, SearchSpace::Grid { max: 1 }).collect();
        assert_eq!(all.len(), 32);
        assert!(all.iter().all(|m| m.agent_values[2] == 0 && m.agent_values.len() == 4));
    }
}
