//! Instances, assignments, utilities and the swap operation.
//!
//! An [`Instance`] describes `2n` agents and `n` rooms. Every agent has an
//! additive utility: the value it places on its roommate plus the value it
//! places on its room. An [`Assignment`] places exactly two agents in every
//! room.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::error::{AssignmentError, Error, InstanceError, Result};

/// Non-negative valuation and utility domain.
pub type Value = u64;

/// Largest admissible valuation. Stands in for an "infinitely large" value in
/// hand-built examples; it dwarfs every competing utility sum we construct.
pub const BIG: Value = 1_000_000;

/// A validated market of `2n` agents and `n` rooms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    agent_values: Vec<Vec<Value>>,
    room_values: Vec<Vec<Value>>,
    agent_labels: Vec<String>,
    room_labels: Vec<String>,
    provenance: Option<String>,
}

impl Instance {
    /// Builds an instance with default labels `a1..a2n` and `r1..rn`.
    pub fn new(agent_values: Vec<Vec<Value>>, room_values: Vec<Vec<Value>>) -> Result<Self> {
        let agents = agent_values.len();
        let agent_labels = (1..=agents).map(|i| format!("a{i}")).collect();
        let room_labels = (1..=agents / 2).map(|r| format!("r{r}")).collect();
        Self::with_labels(agent_values, room_values, agent_labels, room_labels)
    }

    pub fn with_labels(
        agent_values: Vec<Vec<Value>>,
        room_values: Vec<Vec<Value>>,
        agent_labels: Vec<String>,
        room_labels: Vec<String>,
    ) -> Result<Self> {
        let to_signed = |m: &[Vec<Value>]| -> Vec<Vec<i64>> {
            m.iter()
                .map(|row| row.iter().map(|&x| i64::try_from(x).unwrap_or(i64::MAX)).collect())
                .collect()
        };
        validate_parts(
            agent_labels,
            room_labels,
            to_signed(&agent_values),
            to_signed(&room_values),
            None,
        )
    }

    /// A zero-valued instance with `agents` agents.
    pub fn zeros(agents: usize) -> Result<Self> {
        Self::new(vec![vec![0; agents]; agents], vec![vec![0; agents / 2]; agents])
    }

    pub fn agent_count(&self) -> usize {
        self.agent_values.len()
    }

    pub fn room_count(&self) -> usize {
        self.agent_values.len() / 2
    }

    /// Value agent `i` places on having `j` as roommate.
    #[inline]
    pub fn agent_value(&self, i: usize, j: usize) -> Value {
        self.agent_values[i][j]
    }

    /// Value agent `i` places on room `r`.
    #[inline]
    pub fn room_value(&self, i: usize, r: usize) -> Value {
        self.room_values[i][r]
    }

    pub fn agent_values(&self) -> &[Vec<Value>] {
        &self.agent_values
    }

    pub fn room_values(&self) -> &[Vec<Value>] {
        &self.room_values
    }

    pub fn agent_labels(&self) -> &[String] {
        &self.agent_labels
    }

    pub fn room_labels(&self) -> &[String] {
        &self.room_labels
    }

    pub fn agent_label(&self, i: usize) -> &str {
        &self.agent_labels[i]
    }

    pub fn room_label(&self, r: usize) -> &str {
        &self.room_labels[r]
    }

    pub fn agent_index(&self, label: &str) -> Option<usize> {
        self.agent_labels.iter().position(|l| l == label)
    }

    pub fn room_index(&self, label: &str) -> Option<usize> {
        self.room_labels.iter().position(|l| l == label)
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    pub fn set_provenance(&mut self, note: Option<String>) {
        self.provenance = note;
    }

    /// Returns a copy in which agent `i` reports the given rows instead of
    /// its own. The rows are validated like any other instance data.
    pub fn with_report(&self, i: usize, agent_row: &[Value], room_row: &[Value]) -> Result<Self> {
        let mut agent_values = self.agent_values.clone();
        let mut room_values = self.room_values.clone();
        agent_values[i] = agent_row.to_vec();
        room_values[i] = room_row.to_vec();
        let mut inst = Self::with_labels(
            agent_values,
            room_values,
            self.agent_labels.clone(),
            self.room_labels.clone(),
        )?;
        inst.provenance = self.provenance.clone();
        Ok(inst)
    }

    /// True iff every value is 0 or 1 and roommate values are mutual.
    pub fn is_binary_symmetric(&self) -> bool {
        let n = self.agent_count();
        let binary = self
            .agent_values
            .iter()
            .chain(self.room_values.iter())
            .flatten()
            .all(|&x| x <= 1);
        binary && (0..n).all(|i| (0..i).all(|j| self.agent_values[i][j] == self.agent_values[j][i]))
    }

    /// Utility of agent `i` under `mu`.
    #[inline]
    pub fn utility(&self, mu: &Assignment, i: usize) -> Value {
        self.agent_values[i][mu.roommate(i)] + self.room_values[i][mu.room(i)]
    }

    /// Utility agent `i` would get from the roommate and room of agent `j`,
    /// i.e. its utility after swapping places with `j`.
    #[inline]
    pub fn utility_in_place_of(&self, mu: &Assignment, i: usize, j: usize) -> Value {
        self.agent_values[i][mu.roommate(j)] + self.room_values[i][mu.room(j)]
    }

    pub fn utilities(&self, mu: &Assignment) -> Vec<Value> {
        (0..self.agent_count()).map(|i| self.utility(mu, i)).collect()
    }

    pub fn social_welfare(&self, mu: &Assignment) -> Value {
        (0..self.agent_count()).map(|i| self.utility(mu, i)).sum()
    }

    /// Welfare of a partial list of triples (used while a mechanism is still
    /// filling rooms).
    pub fn partial_welfare(&self, triples: &[Triple]) -> Value {
        triples
            .iter()
            .map(|t| {
                self.agent_values[t.agent_a][t.agent_b]
                    + self.agent_values[t.agent_b][t.agent_a]
                    + self.room_values[t.agent_a][t.room]
                    + self.room_values[t.agent_b][t.room]
            })
            .sum()
    }

    /// Number of distinct utility levels agent `i` can reach over all
    /// (roommate, room) combinations.
    pub fn utility_levels(&self, i: usize) -> usize {
        let mut levels = HashSet::new();
        for j in (0..self.agent_count()).filter(|&j| j != i) {
            for r in 0..self.room_count() {
                levels.insert(self.agent_values[i][j] + self.room_values[i][r]);
            }
        }
        levels.len()
    }

    /// True iff every agent ranks all (roommate, room) combinations strictly.
    pub fn has_strict_utilities(&self) -> bool {
        let per_agent = (self.agent_count() - 1) * self.room_count();
        (0..self.agent_count()).all(|i| self.utility_levels(i) == per_agent)
    }
}

pub(crate) fn validate_parts(
    agent_labels: Vec<String>,
    room_labels: Vec<String>,
    agent_values: Vec<Vec<i64>>,
    room_values: Vec<Vec<i64>>,
    provenance: Option<String>,
) -> Result<Instance> {
    let agents = agent_labels.len();
    if agents == 0 || agents % 2 == 1 {
        return Err(InstanceError::OddAgentCount(agents).into());
    }
    let rooms = agents / 2;
    let mismatch = |what: String, expected: usize, found: usize| -> Error {
        InstanceError::SizeMismatch { what, expected, found }.into()
    };
    if room_labels.len() != rooms {
        return Err(mismatch("rooms".into(), rooms, room_labels.len()));
    }
    if agent_values.len() != agents {
        return Err(mismatch("agent_values".into(), agents, agent_values.len()));
    }
    if room_values.len() != agents {
        return Err(mismatch("room_values".into(), agents, room_values.len()));
    }
    for (i, row) in agent_values.iter().enumerate() {
        if row.len() != agents {
            return Err(mismatch(format!("agent_values[{i}]"), agents, row.len()));
        }
    }
    for (i, row) in room_values.iter().enumerate() {
        if row.len() != rooms {
            return Err(mismatch(format!("room_values[{i}]"), rooms, row.len()));
        }
    }
    let check = |matrix: &'static str, m: &[Vec<i64>]| -> Result<Vec<Vec<Value>>> {
        m.iter()
            .enumerate()
            .map(|(row, values)| {
                values
                    .iter()
                    .enumerate()
                    .map(|(col, &value)| {
                        if value < 0 {
                            Err(InstanceError::NegativeValue { matrix, row, col, value }.into())
                        } else if value as u64 > BIG {
                            Err(InstanceError::ValueAboveBig { matrix, row, col, value, cap: BIG }.into())
                        } else {
                            Ok(value as Value)
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let h = check("agent_values", &agent_values)?;
    let v = check("room_values", &room_values)?;
    for (i, row) in agent_values.iter().enumerate() {
        if row[i] != 0 {
            return Err(InstanceError::NonzeroDiagonal { agent: i, value: row[i] }.into());
        }
    }
    for labels in [&agent_labels, &room_labels] {
        let mut seen = HashSet::new();
        for l in labels {
            if !seen.insert(l.as_str()) {
                return Err(InstanceError::DuplicateLabel(l.clone()).into());
            }
        }
    }
    Ok(Instance {
        agent_values: h,
        room_values: v,
        agent_labels,
        room_labels,
        provenance,
    })
}

/// Two agents sharing a room.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Triple {
    pub agent_a: usize,
    pub agent_b: usize,
    pub room: usize,
}

impl Triple {
    pub fn new(a: usize, b: usize, room: usize) -> Self {
        Triple {
            agent_a: a.min(b),
            agent_b: a.max(b),
            room,
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, r{})", self.agent_a, self.agent_b, self.room)
    }
}

/// `n` disjoint triples covering every agent and every room.
///
/// Always held in canonical form: `agent_a < agent_b` inside a triple and
/// triples ordered by room, so structural equality is set equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    triples: Vec<Triple>,
    roommate: Vec<usize>,
    room: Vec<usize>,
}

impl Assignment {
    /// Validates that `triples` partition `0..agents` and `0..agents/2`.
    pub fn from_triples(triples: Vec<Triple>, agents: usize) -> Result<Self> {
        let rooms = agents / 2;
        if agents == 0 || agents % 2 == 1 {
            return Err(InstanceError::OddAgentCount(agents).into());
        }
        if triples.len() != rooms {
            return Err(AssignmentError::WrongTripleCount {
                expected: rooms,
                found: triples.len(),
            }
            .into());
        }
        let mut roommate = vec![usize::MAX; agents];
        let mut room = vec![usize::MAX; agents];
        let mut room_used = vec![false; rooms];
        let mut canonical = Vec::with_capacity(rooms);
        for t in triples {
            let t = Triple::new(t.agent_a, t.agent_b, t.room);
            for x in [t.agent_a, t.agent_b] {
                if x >= agents {
                    return Err(AssignmentError::AgentOutOfRange(x).into());
                }
            }
            if t.agent_a == t.agent_b || roommate[t.agent_a] != usize::MAX {
                return Err(AssignmentError::DuplicateAgent(t.agent_a).into());
            }
            if roommate[t.agent_b] != usize::MAX {
                return Err(AssignmentError::DuplicateAgent(t.agent_b).into());
            }
            if t.room >= rooms {
                return Err(AssignmentError::RoomOutOfRange(t.room).into());
            }
            if std::mem::replace(&mut room_used[t.room], true) {
                return Err(AssignmentError::DuplicateRoom(t.room).into());
            }
            roommate[t.agent_a] = t.agent_b;
            roommate[t.agent_b] = t.agent_a;
            room[t.agent_a] = t.room;
            room[t.agent_b] = t.room;
            canonical.push(t);
        }
        canonical.sort_by_key(|t| t.room);
        Ok(Assignment {
            triples: canonical,
            roommate,
            room,
        })
    }

    /// Convenience constructor from `(a, b, room)` tuples.
    pub fn from_tuples(tuples: &[(usize, usize, usize)]) -> Result<Self> {
        let triples = tuples.iter().map(|&(a, b, r)| Triple::new(a, b, r)).collect();
        Self::from_triples(triples, tuples.len() * 2)
    }

    /// `{(0, 1, r0), (2, 3, r1), ...}`.
    pub fn identity(rooms: usize) -> Self {
        let triples = (0..rooms).map(|t| Triple::new(2 * t, 2 * t + 1, t)).collect();
        Self::from_triples(triples, rooms * 2).expect("identity pairing is valid")
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn agent_count(&self) -> usize {
        self.roommate.len()
    }

    pub fn room_count(&self) -> usize {
        self.triples.len()
    }

    #[inline]
    pub fn roommate(&self, i: usize) -> usize {
        self.roommate[i]
    }

    #[inline]
    pub fn room(&self, i: usize) -> usize {
        self.room[i]
    }

    pub fn occupants(&self, room: usize) -> (usize, usize) {
        let t = &self.triples[room];
        (t.agent_a, t.agent_b)
    }

    /// Exchanges agents `i` and `j`, who must live in different rooms.
    pub fn swap(&self, i: usize, j: usize) -> Result<Assignment> {
        if i >= self.agent_count() || j >= self.agent_count() {
            return Err(AssignmentError::AgentOutOfRange(i.max(j)).into());
        }
        if self.room[i] == self.room[j] {
            return Err(Error::SameRoomSwap(i, j));
        }
        let (pi, ri) = (self.roommate[i], self.room[i]);
        let (pj, rj) = (self.roommate[j], self.room[j]);
        let mut next = self.clone();
        next.triples[ri] = Triple::new(j, pi, ri);
        next.triples[rj] = Triple::new(i, pj, rj);
        next.roommate[i] = pj;
        next.roommate[pj] = i;
        next.roommate[j] = pi;
        next.roommate[pi] = j;
        next.room[i] = rj;
        next.room[j] = ri;
        Ok(next)
    }

    /// Lowers the assignment to `(a, b, room)` tuples.
    pub fn to_tuples(&self) -> Vec<(usize, usize, usize)> {
        self.triples.iter().map(|t| (t.agent_a, t.agent_b, t.room)).collect()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, t) in self.triples.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "}}")
    }
}

/// What a single mechanism step did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Pick,
    Swap,
    TradeCycle,
    Removal,
    NoOp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub kind: StepKind,
    pub participants: Vec<usize>,
    pub sw_before: Value,
    pub sw_after: Value,
    /// Combined utility gain of the two swappers, recorded by the swapping
    /// mechanism.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<i64>,
}

/// Ordered log of mechanism steps.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MechanismTrace {
    pub steps: Vec<TraceStep>,
}

impl MechanismTrace {
    pub fn push(&mut self, kind: StepKind, participants: Vec<usize>, sw_before: Value, sw_after: Value) {
        self.steps.push(TraceStep {
            kind,
            participants,
            sw_before,
            sw_after,
            slack: None,
        });
    }

    /// Steps that changed the assignment (swaps and cycle trades).
    pub fn moves(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s.kind, StepKind::Swap | StepKind::TradeCycle))
            .count()
    }

    pub fn count(&self, kind: StepKind) -> usize {
        self.steps.iter().filter(|s| s.kind == kind).count()
    }
}
