//! Hand-built instances shipped with the crate. The JSON files live in the
//! workspace `fixtures/` directory and are embedded at compile time.

use crate::io::{parse_assignment, parse_instance};
use crate::model::{Assignment, Instance};

#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub instance_json: &'static str,
    pub assignment_json: Option<&'static str>,
}

impl Fixture {
    pub fn instance(&self) -> Instance {
        parse_instance(self.instance_json).expect("embedded fixture is valid")
    }

    /// The starting assignment shipped with the fixture, if any.
    pub fn initial(&self) -> Option<Assignment> {
        self.assignment_json
            .map(|json| parse_assignment(&self.instance(), json).expect("embedded assignment is valid"))
    }
}

macro_rules! fixture {
    ($name:literal) => {
        Fixture {
            name: $name,
            instance_json: include_str!(concat!("../../../fixtures/", $name, ".json")),
            assignment_json: None,
        }
    };
    ($name:literal, with_assignment) => {
        Fixture {
            name: $name,
            instance_json: include_str!(concat!("../../../fixtures/", $name, ".json")),
            assignment_json: Some(include_str!(concat!("../../../fixtures/", $name, ".assignment.json"))),
        }
    };
}

pub const ALL: &[Fixture] = &[
    fixture!("table3", with_assignment),
    fixture!("table4"),
    fixture!("table5", with_assignment),
    fixture!("table6"),
    fixture!("sd_example"),
    fixture!("table8"),
    fixture!("table9", with_assignment),
    fixture!("table10", with_assignment),
    fixture!("table11", with_assignment),
    fixture!("sp_example", with_assignment),
    fixture!("swap_non_po", with_assignment),
    fixture!("swap_non_sp", with_assignment),
];

pub fn get(name: &str) -> Option<&'static Fixture> {
    ALL.iter().find(|f| f.name == name)
}

/// Instance of the named fixture. Panics on unknown names.
pub fn instance(name: &str) -> Instance {
    get(name).unwrap_or_else(|| panic!("no fixture named {name}")).instance()
}
