//! Double matching and 4PS local search.
//!
//! Double matching combines a maximum-weight perfect matching of agents (M1)
//! with a maximum-weight assignment of agents to rooms, two per room (M2).
//! Their union splits into alternating cycles; in every cycle with more than
//! one room the lightest of the three residue classes of edges is dropped,
//! which leaves agent-agent-room paths, i.e. triples.
//!
//! Both matchings are solved exactly by enumeration, which limits instances
//! to [`ENUMERATION_CAP`] agents.

use serde::Serialize;

use crate::checks::{first_blocking_pair, StabilityKind};
use crate::error::Result;
use crate::model::{Assignment, Instance, MechanismTrace, StepKind, Triple, Value};
use crate::oracle::{check_cap, pairings, ENUMERATION_CAP};

/// Maximum-weight perfect matching on a symmetric weight matrix. Among
/// optimal matchings the lexicographically first edge list wins.
pub fn max_weight_perfect_matching(weights: &[Vec<Value>]) -> Result<(Vec<(usize, usize)>, Value)> {
    check_cap(weights.len(), ENUMERATION_CAP)?;
    let mut best: Option<(Vec<(usize, usize)>, Value)> = None;
    for pairing in pairings(weights.len()) {
        let w = pairing.iter().map(|&(a, b)| weights[a][b]).sum();
        if best.as_ref().is_none_or(|(_, b)| w > *b) {
            best = Some((pairing, w));
        }
    }
    Ok(best.unwrap_or_default())
}

/// Maximum-weight assignment of agents to rooms with exactly two agents per
/// room. Returns each agent's room; ties go to the lexicographically
/// smallest room vector.
pub fn max_weight_one_two_matching(values: &[Vec<Value>]) -> Result<(Vec<usize>, Value)> {
    let agents = values.len();
    check_cap(agents, ENUMERATION_CAP)?;
    let rooms = agents / 2;

    struct Search<'a> {
        values: &'a [Vec<Value>],
        load: Vec<u8>,
        current: Vec<usize>,
        best: Option<(Vec<usize>, Value)>,
    }
    impl Search<'_> {
        fn go(&mut self, agent: usize, acc: Value) {
            if agent == self.values.len() {
                if self.best.as_ref().is_none_or(|(_, b)| acc > *b) {
                    self.best = Some((self.current.clone(), acc));
                }
                return;
            }
            for r in 0..self.load.len() {
                if self.load[r] < 2 {
                    self.load[r] += 1;
                    self.current.push(r);
                    self.go(agent + 1, acc + self.values[agent][r]);
                    self.current.pop();
                    self.load[r] -= 1;
                }
            }
        }
    }

    let mut search = Search {
        values,
        load: vec![0; rooms],
        current: Vec::with_capacity(agents),
        best: None,
    };
    search.go(0, 0);
    Ok(search.best.unwrap_or_default())
}

/// Per-cycle record of the double-matching cut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleCut {
    /// Agents in walk order, starting from the smallest.
    pub agents: Vec<usize>,
    /// `weights[t]` sums the edges whose index is congruent to `t` mod 3.
    pub weights: [Value; 3],
    pub removed_class: usize,
    pub removed_weight: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoubleMatchingReport {
    pub agent_matching: Vec<(usize, usize)>,
    pub agent_matching_weight: Value,
    pub room_of: Vec<usize>,
    pub room_matching_weight: Value,
    /// Only cycles spanning two or more rooms appear here.
    pub cycles: Vec<CycleCut>,
}

enum Vertex {
    Agent(usize),
    Room(usize),
}

/// Runs double matching and returns the assignment with its diagnostics.
///
/// Each cycle is walked from its smallest agent `a`: edge 1 is the room edge
/// of `a`, edge 2 its agent edge, edge 3 the partner's room edge, edge 4 the
/// edge from that room to its other occupant, and so on.
pub fn double_matching(inst: &Instance) -> Result<(Assignment, DoubleMatchingReport)> {
    let agents = inst.agent_count();
    let pair_weights: Vec<Vec<Value>> = (0..agents)
        .map(|i| (0..agents).map(|j| if i == j { 0 } else { inst.agent_value(i, j) + inst.agent_value(j, i) }).collect())
        .collect();
    let (m1, w1) = max_weight_perfect_matching(&pair_weights)?;
    let (room_of, w2) = max_weight_one_two_matching(inst.room_values())?;

    let mut partner = vec![0; agents];
    for &(a, b) in &m1 {
        partner[a] = b;
        partner[b] = a;
    }
    let mut occupants = vec![Vec::with_capacity(2); inst.room_count()];
    for (i, &r) in room_of.iter().enumerate() {
        occupants[r].push(i);
    }
    let other_in_room = |i: usize| {
        let occ = &occupants[room_of[i]];
        if occ[0] == i {
            occ[1]
        } else {
            occ[0]
        }
    };

    let mut visited = vec![false; agents];
    let mut triples = Vec::with_capacity(inst.room_count());
    let mut cycles = Vec::new();
    for start in 0..agents {
        if visited[start] {
            continue;
        }
        // vertices v_0 = room(start), v_1 = start, v_2 = partner, v_3 = room, ...
        let mut walk = vec![Vertex::Room(room_of[start])];
        let mut weights = Vec::new();
        let mut cycle_agents = Vec::new();
        let mut a = start;
        loop {
            let p = partner[a];
            visited[a] = true;
            visited[p] = true;
            cycle_agents.extend([a, p]);
            weights.push(inst.room_value(a, room_of[a]));
            weights.push(pair_weights[a][p]);
            weights.push(inst.room_value(p, room_of[p]));
            walk.extend([Vertex::Agent(a), Vertex::Agent(p), Vertex::Room(room_of[p])]);
            a = other_in_room(p);
            if a == start {
                break;
            }
        }
        let len = weights.len();
        if len == 3 {
            triples.push(Triple::new(start, partner[start], room_of[start]));
            continue;
        }
        // weights[k - 1] is edge e_k = (v_{k-1}, v_k)
        let mut class = [0; 3];
        for (k, w) in weights.iter().enumerate() {
            class[(k + 1) % 3] += w;
        }
        let removed = (0..3).min_by_key(|&t| class[t]).expect("three classes");
        // kept edges e_k, e_{k+1} with k = removed + 1 (mod 3) span v_{k-1}, v_k, v_{k+1}
        let mut k = (removed + 1) % 3;
        if k == 0 {
            k = 3;
        }
        while k <= len {
            let path = [(k - 1) % len, k % len, (k + 1) % len];
            let mut people = Vec::with_capacity(2);
            let mut room = 0;
            for idx in path {
                match walk[idx] {
                    Vertex::Agent(x) => people.push(x),
                    Vertex::Room(r) => room = r,
                }
            }
            triples.push(Triple::new(people[0], people[1], room));
            k += 3;
        }
        cycles.push(CycleCut {
            agents: cycle_agents,
            weights: class,
            removed_class: removed,
            removed_weight: class[removed],
        });
    }
    let mu = Assignment::from_triples(triples, agents)?;
    Ok((
        mu,
        DoubleMatchingReport {
            agent_matching: m1,
            agent_matching_weight: w1,
            room_of,
            room_matching_weight: w2,
            cycles,
        },
    ))
}

/// Swaps the lexicographically first 4PS blocking pair until none is left.
/// Every such swap makes all four people involved strictly happier, so this
/// terminates.
pub fn local_search(inst: &Instance, mu: &Assignment) -> (Assignment, MechanismTrace) {
    let mut mu = mu.clone();
    let mut trace = MechanismTrace::default();
    while let Some((i, j)) = first_blocking_pair(inst, &mu, StabilityKind::FourPerson) {
        let next = mu.swap(i, j).expect("blocking pairs live in different rooms");
        trace.push(StepKind::Swap, vec![i, j], inst.social_welfare(&mu), inst.social_welfare(&next));
        mu = next;
    }
    (mu, trace)
}

/// Double matching followed by local search.
pub fn double_matching_local_search(inst: &Instance) -> Result<(Assignment, MechanismTrace, DoubleMatchingReport)> {
    let (dm, report) = double_matching(inst)?;
    let (mu, trace) = local_search(inst, &dm);
    Ok((mu, trace, report))
}
