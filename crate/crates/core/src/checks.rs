//! Exchange-stability and dominance diagnostics for a fixed assignment.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Assignment, Instance};

/// Which stability notion a blocking pair violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StabilityKind {
    /// Both swappers strictly gain.
    #[serde(rename = "2PS")]
    TwoPerson,
    /// Both swappers and both of their roommates strictly gain.
    #[serde(rename = "4PS")]
    FourPerson,
}

impl fmt::Display for StabilityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StabilityKind::TwoPerson => "2PS",
            StabilityKind::FourPerson => "4PS",
        })
    }
}

impl FromStr for StabilityKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "2ps" | "2" => Ok(StabilityKind::TwoPerson),
            "4ps" | "4" => Ok(StabilityKind::FourPerson),
            other => Err(format!("unknown stability kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BlockingPair {
    pub i: usize,
    pub j: usize,
    pub delta_i: i64,
    pub delta_j: i64,
}

/// All blocking pairs of one kind, sorted lexicographically by `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockingReport {
    pub kind: StabilityKind,
    pub pairs: Vec<BlockingPair>,
}

impl BlockingReport {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        let (i, j) = (i.min(j), i.max(j));
        self.pairs.iter().any(|p| p.i == i && p.j == j)
    }

    pub fn pair_indices(&self) -> Vec<(usize, usize)> {
        self.pairs.iter().map(|p| (p.i, p.j)).collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["kind", "i", "j", "delta_i", "delta_j"])?;
        for p in &self.pairs {
            w.write_record([
                self.kind.to_string(),
                p.i.to_string(),
                p.j.to_string(),
                p.delta_i.to_string(),
                p.delta_j.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Gains of `i` and `j` if they swapped places, without checking rooms.
#[inline]
fn swap_gains(inst: &Instance, mu: &Assignment, i: usize, j: usize) -> (i64, i64) {
    let gi = inst.utility_in_place_of(mu, i, j) as i64 - inst.utility(mu, i) as i64;
    let gj = inst.utility_in_place_of(mu, j, i) as i64 - inst.utility(mu, j) as i64;
    (gi, gj)
}

#[inline]
fn roommates_consent_strictly(inst: &Instance, mu: &Assignment, i: usize, j: usize) -> bool {
    let (pi, pj) = (mu.roommate(i), mu.roommate(j));
    inst.agent_value(pi, j) > inst.agent_value(pi, i) && inst.agent_value(pj, i) > inst.agent_value(pj, j)
}

fn require_cross_room(mu: &Assignment, i: usize, j: usize) -> Result<()> {
    if mu.room(i) == mu.room(j) {
        Err(Error::SameRoomSwap(i, j))
    } else {
        Ok(())
    }
}

/// Both `i` and `j` strictly gain by swapping.
pub fn is_2ps_blocking(inst: &Instance, mu: &Assignment, i: usize, j: usize) -> Result<bool> {
    require_cross_room(mu, i, j)?;
    let (gi, gj) = swap_gains(inst, mu, i, j);
    Ok(gi > 0 && gj > 0)
}

/// `i` and `j` strictly gain and each of their roommates strictly prefers the
/// incoming agent to the outgoing one.
pub fn is_4ps_blocking(inst: &Instance, mu: &Assignment, i: usize, j: usize) -> Result<bool> {
    Ok(is_2ps_blocking(inst, mu, i, j)? && roommates_consent_strictly(inst, mu, i, j))
}

pub fn is_blocking(inst: &Instance, mu: &Assignment, i: usize, j: usize, kind: StabilityKind) -> Result<bool> {
    match kind {
        StabilityKind::TwoPerson => is_2ps_blocking(inst, mu, i, j),
        StabilityKind::FourPerson => is_4ps_blocking(inst, mu, i, j),
    }
}

/// Enumerates every cross-room pair violating `kind`.
pub fn blocking_pairs(inst: &Instance, mu: &Assignment, kind: StabilityKind) -> BlockingReport {
    let n = inst.agent_count();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if mu.room(i) == mu.room(j) {
                continue;
            }
            let (gi, gj) = swap_gains(inst, mu, i, j);
            if gi <= 0 || gj <= 0 {
                continue;
            }
            if kind == StabilityKind::FourPerson && !roommates_consent_strictly(inst, mu, i, j) {
                continue;
            }
            pairs.push(BlockingPair {
                i,
                j,
                delta_i: gi,
                delta_j: gj,
            });
        }
    }
    BlockingReport { kind, pairs }
}

/// First blocking pair in lexicographic order, if any. Cheaper than a full
/// report when only existence matters.
pub fn first_blocking_pair(inst: &Instance, mu: &Assignment, kind: StabilityKind) -> Option<(usize, usize)> {
    let n = inst.agent_count();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| {
            mu.room(i) != mu.room(j) && {
                let (gi, gj) = swap_gains(inst, mu, i, j);
                gi > 0
                    && gj > 0
                    && (kind == StabilityKind::TwoPerson || roommates_consent_strictly(inst, mu, i, j))
            }
        })
}

pub fn is_stable(inst: &Instance, mu: &Assignment, kind: StabilityKind) -> bool {
    first_blocking_pair(inst, mu, kind).is_none()
}

/// Nobody is worse off under `candidate` and somebody is strictly better off.
pub fn pareto_dominates(inst: &Instance, candidate: &Assignment, base: &Assignment) -> bool {
    let mut strict = false;
    for i in 0..inst.agent_count() {
        let (new, old) = (inst.utility(candidate, i), inst.utility(base, i));
        if new < old {
            return false;
        }
        strict |= new > old;
    }
    strict
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table11() -> (Instance, Assignment) {
        let inst = Instance::new(
            vec![
                vec![0, 4, 1, 2],
                vec![4, 0, 2, 1],
                vec![1, 2, 0, 4],
                vec![2, 1, 4, 0],
            ],
            vec![vec![1, 4], vec![4, 1], vec![4, 1], vec![1, 4]],
        )
        .unwrap();
        (inst, Assignment::identity(2))
    }

    #[test]
    fn table11_pair_ac_is_2ps_blocking() {
        let (inst, mu) = table11();
        assert!(is_2ps_blocking(&inst, &mu, 0, 2).unwrap());
        let report = blocking_pairs(&inst, &mu, StabilityKind::TwoPerson);
        let ac = report.pairs.iter().find(|p| (p.i, p.j) == (0, 2)).unwrap();
        assert_eq!((ac.delta_i, ac.delta_j), (1, 1));
    }

    #[test]
    fn zero_instance_has_no_blocking_pairs() {
        let inst = Instance::zeros(6).unwrap();
        let mu = Assignment::identity(3);
        for kind in [StabilityKind::TwoPerson, StabilityKind::FourPerson] {
            assert!(blocking_pairs(&inst, &mu, kind).is_empty());
        }
        assert!(!is_2ps_blocking(&inst, &mu, 0, 5).unwrap());
    }

    #[test]
    fn roommates_cannot_block() {
        let (inst, mu) = table11();
        assert!(matches!(is_4ps_blocking(&inst, &mu, 0, 1), Err(Error::SameRoomSwap(0, 1))));
    }

    #[test]
    fn dominance_is_irreflexive() {
        let (inst, mu) = table11();
        assert!(!pareto_dominates(&inst, &mu, &mu));
    }

    #[test]
    fn csv_layout() {
        let (inst, mu) = table11();
        let csv = blocking_pairs(&inst, &mu, StabilityKind::TwoPerson).to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("kind,i,j,delta_i,delta_j"));
        assert_eq!(lines.next(), Some("2PS,0,2,1,1"));
    }
}
