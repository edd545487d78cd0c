//! Top trading cycles over swaps: the naive variant, the contractual variant
//! (CTTC) and the contractual variant with removal (CTTCR).
//!
//! Every agent points at most once, at the agent whose place it most wants.
//! A cycle `(i_1, ..., i_k)` is traded by moving each `i_t` into the place
//! (roommate and room) of `i_{t+1}`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::checks::is_4ps_blocking;
use crate::error::{Error, Result};
use crate::model::{Assignment, Instance, MechanismTrace, StepKind, Triple, Value};

/// How an agent chooses the target of its outgoing arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcRule {
    /// Point at the best place, whether or not its occupant's roommate agrees.
    Naive,
    /// Point at the best place only if the roommate living there consents;
    /// otherwise point nowhere.
    StrictConsent,
    /// Point at the best place among improving places whose roommate consents.
    BestConsenting,
}

impl fmt::Display for ArcRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArcRule::Naive => "naive",
            ArcRule::StrictConsent => "strict",
            ArcRule::BestConsenting => "best",
        })
    }
}

impl FromStr for ArcRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "naive" => Ok(ArcRule::Naive),
            "strict" | "strict-consent" => Ok(ArcRule::StrictConsent),
            "best" | "best-consenting" => Ok(ArcRule::BestConsenting),
            other => Err(format!("unknown arc rule {other:?}")),
        }
    }
}

/// Deterministic choice among several executable cycles. Cycles are compared
/// as agent sequences rotated to start at their smallest agent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleSelection {
    #[default]
    LexSmallest,
    LexLargest,
}

impl FromStr for CycleSelection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lex-smallest" | "smallest" | "first" => Ok(CycleSelection::LexSmallest),
            "lex-largest" | "largest" | "last" => Ok(CycleSelection::LexLargest),
            other => Err(format!("unknown cycle selection {other:?}")),
        }
    }
}

/// Successor graph over the active agents of one assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradingGraph {
    rule: ArcRule,
    active: Vec<bool>,
    successor: Vec<Option<usize>>,
    rooms: Vec<usize>,
}

impl TradingGraph {
    pub fn rule(&self) -> ArcRule {
        self.rule
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.active[i]
    }

    pub fn successor(&self, i: usize) -> Option<usize> {
        self.successor[i]
    }

    /// Arcs as `(from, to)` pairs, sorted by source.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.successor
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.map(|j| (i, j)))
            .collect()
    }

    /// Active agents without an outgoing arc.
    pub fn sinks(&self) -> Vec<usize> {
        (0..self.active.len())
            .filter(|&i| self.active[i] && self.successor[i].is_none())
            .collect()
    }

    /// Every directed cycle, rotated to start at its smallest agent, sorted.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.successor.len();
        // 0 = unvisited, 1 = on the current walk, 2 = done
        let mut state = vec![0u8; n];
        let mut out = Vec::new();
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            let mut path = Vec::new();
            let mut x = Some(start);
            while let Some(cur) = x {
                if state[cur] != 0 {
                    break;
                }
                state[cur] = 1;
                path.push(cur);
                x = self.successor[cur];
            }
            if let Some(cur) = x {
                if state[cur] == 1 {
                    let pos = path.iter().position(|&p| p == cur).expect("on current walk");
                    let mut cycle = path[pos..].to_vec();
                    let min_at = cycle.iter().enumerate().min_by_key(|(_, &a)| a).map(|(k, _)| k).unwrap_or(0);
                    cycle.rotate_left(min_at);
                    out.push(cycle);
                }
            }
            for p in path {
                state[p] = 2;
            }
        }
        out.sort();
        out
    }

    /// A cycle can be traded only if its members live in distinct rooms.
    pub fn is_well_formed(&self, cycle: &[usize]) -> bool {
        well_formed(&self.rooms, cycle)
    }
}

fn well_formed(rooms: &[usize], cycle: &[usize]) -> bool {
    cycle.len() >= 2 && {
        let mut seen: Vec<usize> = cycle.iter().map(|&a| rooms[a]).collect();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

/// The roommate of `j` is at least as happy living with `i` as with `j`.
#[inline]
pub fn consents(inst: &Instance, mu: &Assignment, i: usize, j: usize) -> bool {
    let p = mu.roommate(j);
    inst.agent_value(p, i) >= inst.agent_value(p, j)
}

/// Computes each active agent's arc. Targets are restricted to active agents
/// other than the agent itself and its roommate. Ties go to the lowest
/// target index.
pub fn build_graph(inst: &Instance, mu: &Assignment, rule: ArcRule, active: &[bool]) -> TradingGraph {
    let n = inst.agent_count();
    let mut successor = vec![None; n];
    for i in (0..n).filter(|&i| active[i]) {
        let current = inst.utility(mu, i);
        let candidates = (0..n).filter(|&j| active[j] && j != i && j != mu.roommate(i));
        // (utility after swap, target), first max wins
        let mut best: Option<(Value, usize)> = None;
        let mut offer = |u: Value, j: usize| {
            if best.is_none_or(|(b, _)| u > b) {
                best = Some((u, j));
            }
        };
        match rule {
            ArcRule::Naive | ArcRule::StrictConsent => {
                let mut global: Option<Value> = None;
                for j in candidates.clone() {
                    let u = inst.utility_in_place_of(mu, i, j);
                    global = Some(global.map_or(u, |g| g.max(u)));
                }
                let Some(g) = global.filter(|&g| g > current) else {
                    continue;
                };
                for j in candidates {
                    if inst.utility_in_place_of(mu, i, j) == g
                        && (rule == ArcRule::Naive || consents(inst, mu, i, j))
                    {
                        offer(g, j);
                    }
                }
            }
            ArcRule::BestConsenting => {
                for j in candidates {
                    let u = inst.utility_in_place_of(mu, i, j);
                    if u > current && consents(inst, mu, i, j) {
                        offer(u, j);
                    }
                }
            }
        }
        successor[i] = best.map(|(_, j)| j);
    }
    TradingGraph {
        rule,
        active: active.to_vec(),
        successor,
        rooms: (0..n).map(|i| mu.room(i)).collect(),
    }
}

/// The selected well-formed cycle, if any. Cycles with two members in the
/// same room cannot be traded and are skipped.
pub fn select_cycle(graph: &TradingGraph, rule: CycleSelection) -> Option<Vec<usize>> {
    let mut cycles = graph.cycles().into_iter().filter(|c| graph.is_well_formed(c));
    match rule {
        CycleSelection::LexSmallest => cycles.next(),
        CycleSelection::LexLargest => cycles.next_back(),
    }
}

/// Moves each `cycle[t]` into the place of `cycle[t + 1]` (wrapping around).
pub fn apply_cycle(mu: &Assignment, cycle: &[usize]) -> Result<Assignment> {
    let n = mu.agent_count();
    if cycle.iter().any(|&a| a >= n) {
        return Err(Error::MalformedCycle(cycle.to_vec()));
    }
    let rooms: Vec<usize> = (0..n).map(|i| mu.room(i)).collect();
    if !well_formed(&rooms, cycle) {
        return Err(Error::MalformedCycle(cycle.to_vec()));
    }
    let mut triples = mu.triples().to_vec();
    for (t, &a) in cycle.iter().enumerate() {
        let b = cycle[(t + 1) % cycle.len()];
        triples[mu.room(b)] = Triple::new(a, mu.roommate(b), mu.room(b));
    }
    Assignment::from_triples(triples, n)
}

fn record_trade(trace: &mut MechanismTrace, inst: &Instance, kind: StepKind, who: Vec<usize>, before: &Assignment, after: &Assignment) {
    trace.push(kind, who, inst.social_welfare(before), inst.social_welfare(after));
}

/// Result of running naive TTC.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NaiveOutcome {
    /// No executable cycle remains.
    Converged { assignment: Assignment, trace: MechanismTrace },
    /// An assignment was revisited. `states` lists the assignments from the
    /// first visit of the repeated state up to (not including) the revisit,
    /// so `states.len() == length`.
    NonTerminating {
        length: usize,
        states: Vec<Assignment>,
        trace: MechanismTrace,
    },
    /// `max_iters` trades were made without converging or repeating.
    Exhausted { assignment: Assignment, trace: MechanismTrace },
}

/// Naive TTC: unconsented arcs, trade the selected cycle, repeat.
pub fn naive_ttc(inst: &Instance, mu0: &Assignment, selection: CycleSelection, max_iters: usize) -> NaiveOutcome {
    let all = vec![true; inst.agent_count()];
    let mut mu = mu0.clone();
    let mut history = vec![mu.clone()];
    let mut seen: HashMap<Assignment, usize> = HashMap::from([(mu.clone(), 0)]);
    let mut trace = MechanismTrace::default();
    for _ in 0..max_iters {
        let graph = build_graph(inst, &mu, ArcRule::Naive, &all);
        let Some(cycle) = select_cycle(&graph, selection) else {
            return NaiveOutcome::Converged { assignment: mu, trace };
        };
        let next = apply_cycle(&mu, &cycle).expect("selected cycles are well formed");
        record_trade(&mut trace, inst, StepKind::TradeCycle, cycle, &mu, &next);
        mu = next;
        if let Some(&first) = seen.get(&mu) {
            let states = history.split_off(first);
            return NaiveOutcome::NonTerminating {
                length: states.len(),
                states,
                trace,
            };
        }
        seen.insert(mu.clone(), history.len());
        history.push(mu.clone());
    }
    NaiveOutcome::Exhausted { assignment: mu, trace }
}

/// Upper bound on the number of strict improvements a run can make: every
/// trade lifts at least one agent to a higher utility level and lowers none.
pub fn trade_bound(inst: &Instance) -> usize {
    (0..inst.agent_count()).map(|i| inst.utility_levels(i) - 1).sum()
}

/// Contractual TTC: trade consented cycles among all agents until none is
/// left.
pub fn cttc(
    inst: &Instance,
    mu0: &Assignment,
    rule: ArcRule,
    selection: CycleSelection,
) -> Result<(Assignment, MechanismTrace)> {
    let all = vec![true; inst.agent_count()];
    let mut mu = mu0.clone();
    let mut trace = MechanismTrace::default();
    let bound = trade_bound(inst);
    loop {
        let graph = build_graph(inst, &mu, rule, &all);
        let Some(cycle) = select_cycle(&graph, selection) else {
            return Ok((mu, trace));
        };
        if trace.moves() > bound {
            return Err(Error::NonTerminating(format!("more than {bound} trades")));
        }
        let next = apply_cycle(&mu, &cycle)?;
        record_trade(&mut trace, inst, StepKind::TradeCycle, cycle, &mu, &next);
        mu = next;
    }
}

/// Contractual TTC with removal.
///
/// Cycles are traded on the graph over all non-removed agents; after each
/// trade the removed set is emptied. When no cycle is left, agents without an
/// arc are removed and the graph is rebuilt on the rest, until every agent
/// has been removed.
///
/// If every active agent has an arc yet all cycles are malformed, the
/// lexicographically first 4PS blocking pair among active agents is swapped
/// (or, if none exists, all active agents are removed). A malformed cycle
/// can hide such a pair, and without this step the output would not be 4PS.
pub fn cttcr(
    inst: &Instance,
    mu0: &Assignment,
    rule: ArcRule,
    selection: CycleSelection,
) -> Result<(Assignment, MechanismTrace)> {
    let n = inst.agent_count();
    let mut mu = mu0.clone();
    let mut removed = vec![false; n];
    let mut trace = MechanismTrace::default();
    let bound = trade_bound(inst);
    let sw = |mu: &Assignment| inst.social_welfare(mu);

    while removed.iter().any(|r| !r) {
        if trace.moves() > bound {
            return Err(Error::NonTerminating(format!("more than {bound} trades")));
        }
        let active: Vec<bool> = removed.iter().map(|r| !r).collect();
        let graph = build_graph(inst, &mu, rule, &active);
        if let Some(cycle) = select_cycle(&graph, selection) {
            let next = apply_cycle(&mu, &cycle)?;
            record_trade(&mut trace, inst, StepKind::TradeCycle, cycle, &mu, &next);
            mu = next;
            removed.fill(false);
            continue;
        }
        let sinks = graph.sinks();
        if !sinks.is_empty() {
            for &i in &sinks {
                removed[i] = true;
            }
            let s = sw(&mu);
            trace.push(StepKind::Removal, sinks, s, s);
            continue;
        }
        match first_active_blocking_pair(inst, &mu, &active) {
            Some((i, j)) => {
                let next = mu.swap(i, j)?;
                record_trade(&mut trace, inst, StepKind::Swap, vec![i, j], &mu, &next);
                mu = next;
                removed.fill(false);
            }
            None => {
                let rest: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
                removed.fill(true);
                let s = sw(&mu);
                trace.push(StepKind::Removal, rest, s, s);
            }
        }
    }
    Ok((mu, trace))
}

/// Lexicographically first 4PS blocking pair with both members active.
fn first_active_blocking_pair(inst: &Instance, mu: &Assignment, active: &[bool]) -> Option<(usize, usize)> {
    let n = inst.agent_count();
    (0..n)
        .filter(|&i| active[i])
        .flat_map(|i| (i + 1..n).filter(|&j| active[j]).map(move |j| (i, j)))
        .find(|&(i, j)| mu.room(i) != mu.room(j) && is_4ps_blocking(inst, mu, i, j).unwrap_or(false))
}
