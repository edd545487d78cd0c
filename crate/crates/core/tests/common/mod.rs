//! Deliberately naive reference implementations. They share no code with
//! the library beyond reading the value matrices, so agreement between the
//! two is meaningful.

#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use roommates::{Assignment, Instance};

/// `(a, b, room)` with `a < b`, sorted by room.
pub type Tuples = Vec<(usize, usize, usize)>;

pub fn canon(mut t: Tuples) -> Tuples {
    for x in t.iter_mut() {
        if x.0 > x.1 {
            *x = (x.1, x.0, x.2);
        }
    }
    t.sort_by_key(|x| x.2);
    t
}

/// Every assignment, from every ordering of the agents.
pub fn all_assignments(agents: usize) -> BTreeSet<Tuples> {
    (0..agents)
        .permutations(agents)
        .map(|p| canon((0..agents / 2).map(|t| (p[2 * t], p[2 * t + 1], t)).collect()))
        .collect()
}

pub fn place(mu: &Tuples, i: usize) -> (usize, usize) {
    for &(a, b, r) in mu {
        if a == i {
            return (b, r);
        }
        if b == i {
            return (a, r);
        }
    }
    panic!("agent {i} unassigned");
}

pub fn utility(inst: &Instance, mu: &Tuples, i: usize) -> u64 {
    let (mate, room) = place(mu, i);
    inst.agent_values()[i][mate] + inst.room_values()[i][room]
}

pub fn welfare(inst: &Instance, mu: &Tuples) -> u64 {
    (0..inst.agent_count()).map(|i| utility(inst, mu, i)).sum()
}

/// Rebuilds the assignment with `i` and `j` exchanged.
pub fn swapped(mu: &Tuples, i: usize, j: usize) -> Tuples {
    let rename = |x: usize| if x == i { j } else if x == j { i } else { x };
    canon(mu.iter().map(|&(a, b, r)| (rename(a), rename(b), r)).collect())
}

/// Blocking pairs found by literally performing each swap.
pub fn blocking(inst: &Instance, mu: &Tuples, four: bool) -> Vec<(usize, usize)> {
    let n = inst.agent_count();
    let h = inst.agent_values();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let ((pi, ri), (pj, rj)) = (place(mu, i), place(mu, j));
            if ri == rj {
                continue;
            }
            let after = swapped(mu, i, j);
            let ok2 = utility(inst, &after, i) > utility(inst, mu, i) && utility(inst, &after, j) > utility(inst, mu, j);
            let ok4 = h[pi][j] > h[pi][i] && h[pj][i] > h[pj][j];
            if ok2 && (!four || ok4) {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn dominates(inst: &Instance, a: &Tuples, b: &Tuples) -> bool {
    let n = inst.agent_count();
    (0..n).all(|i| utility(inst, a, i) >= utility(inst, b, i)) && (0..n).any(|i| utility(inst, a, i) > utility(inst, b, i))
}

pub fn pareto_front(inst: &Instance) -> BTreeSet<Tuples> {
    let all = all_assignments(inst.agent_count());
    all.iter()
        .filter(|mu| !all.iter().any(|o| dominates(inst, o, mu)))
        .cloned()
        .collect()
}

pub fn tuples(mu: &Assignment) -> Tuples {
    mu.to_tuples()
}

/// Builds an assignment from agent labels, e.g. `[("a", "c", "i"), ...]`.
pub fn by_label(inst: &Instance, triples: &[(&str, &str, &str)]) -> Assignment {
    let t: Vec<(usize, usize, usize)> = triples
        .iter()
        .map(|&(a, b, r)| {
            (
                inst.agent_index(a).unwrap_or_else(|| panic!("agent {a}")),
                inst.agent_index(b).unwrap_or_else(|| panic!("agent {b}")),
                inst.room_index(r).unwrap_or_else(|| panic!("room {r}")),
            )
        })
        .collect();
    Assignment::from_tuples(&t).expect("valid labelled assignment")
}

pub fn agent(inst: &Instance, label: &str) -> usize {
    inst.agent_index(label).unwrap_or_else(|| panic!("agent {label}"))
}
