//! JSON file formats for instances and assignments.
//!
//! Instance files are objects with `agents`, `rooms`, `agent_values` and
//! `room_values` (plus an optional `provenance` note). Assignment files are
//! arrays of `[agent, agent, room]` label triples. The writers emit a single
//! canonical layout, so reading a canonical file and writing it back yields
//! the same bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::error::{AssignmentError, Result};
use crate::model::{validate_parts, Assignment, Instance, Triple};

/// Instance data as decoded from JSON, before validation.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInstance {
    #[serde(default)]
    pub provenance: Option<String>,
    pub agents: Vec<String>,
    pub rooms: Vec<String>,
    pub agent_values: Vec<Vec<i64>>,
    pub room_values: Vec<Vec<i64>>,
}

/// Checks every instance invariant and returns the validated instance.
pub fn validate_instance(raw: RawInstance) -> Result<Instance> {
    validate_parts(raw.agents, raw.rooms, raw.agent_values, raw.room_values, raw.provenance)
}

pub fn parse_instance(json: &str) -> Result<Instance> {
    let raw: RawInstance = serde_json::from_str(json)?;
    validate_instance(raw)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn label_list(labels: &[String]) -> String {
    let items: Vec<String> = labels.iter().map(|l| quote(l)).collect();
    format!("[{}]", items.join(", "))
}

fn matrix(out: &mut String, rows: &[Vec<u64>]) {
    out.push_str("[\n");
    for (k, row) in rows.iter().enumerate() {
        let items: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        let sep = if k + 1 < rows.len() { "," } else { "" };
        let _ = writeln!(out, "    [{}]{sep}", items.join(", "));
    }
    out.push_str("  ]");
}

/// Canonical JSON text of an instance (trailing newline included).
pub fn instance_to_json(inst: &Instance) -> String {
    let mut out = String::from("{\n");
    if let Some(p) = inst.provenance() {
        let _ = writeln!(out, "  \"provenance\": {},", quote(p));
    }
    let _ = writeln!(out, "  \"agents\": {},", label_list(inst.agent_labels()));
    let _ = writeln!(out, "  \"rooms\": {},", label_list(inst.room_labels()));
    out.push_str("  \"agent_values\": ");
    matrix(&mut out, inst.agent_values());
    out.push_str(",\n  \"room_values\": ");
    matrix(&mut out, inst.room_values());
    out.push_str("\n}\n");
    out
}

/// Resolves a label-based assignment against an instance.
pub fn parse_assignment(inst: &Instance, json: &str) -> Result<Assignment> {
    let raw: Vec<(String, String, String)> = serde_json::from_str(json)?;
    let mut triples = Vec::with_capacity(raw.len());
    for (a, b, r) in raw {
        let ai = inst.agent_index(&a).ok_or(AssignmentError::UnknownAgent(a))?;
        let bi = inst.agent_index(&b).ok_or(AssignmentError::UnknownAgent(b))?;
        let ri = inst.room_index(&r).ok_or(AssignmentError::UnknownRoom(r))?;
        triples.push(Triple::new(ai, bi, ri));
    }
    Assignment::from_triples(triples, inst.agent_count())
}

pub fn read_assignment(inst: &Instance, path: impl AsRef<Path>) -> Result<Assignment> {
    parse_assignment(inst, &std::fs::read_to_string(path)?)
}

/// Canonical JSON text of an assignment: one triple per line, ordered by room.
pub fn assignment_to_json(inst: &Instance, mu: &Assignment) -> String {
    let mut out = String::from("[\n");
    for (k, t) in mu.triples().iter().enumerate() {
        let sep = if k + 1 < mu.room_count() { "," } else { "" };
        let _ = writeln!(
            out,
            "  [{}, {}, {}]{sep}",
            quote(inst.agent_label(t.agent_a)),
            quote(inst.agent_label(t.agent_b)),
            quote(inst.room_label(t.room))
        );
    }
    out.push_str("]\n");
    out
}

/// Compact single-line label form, e.g. `{(a, b, r1), (c, d, r2)}`.
pub fn assignment_to_text(inst: &Instance, mu: &Assignment) -> String {
    let parts: Vec<String> = mu
        .triples()
        .iter()
        .map(|t| {
            format!(
                "({}, {}, {})",
                inst.agent_label(t.agent_a),
                inst.agent_label(t.agent_b),
                inst.room_label(t.room)
            )
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}
