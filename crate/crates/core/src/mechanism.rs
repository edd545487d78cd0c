//! A single entry point for running any mechanism by configuration.

use std::fmt;
use std::str::FromStr;

use crate::checks::StabilityKind;
use crate::dmls::{double_matching, double_matching_local_search, local_search, DoubleMatchingReport};
use crate::error::{Error, Result};
use crate::model::{Assignment, Instance, MechanismTrace};
use crate::oracle::first_stable;
use crate::sd::serial_dictatorship;
use crate::swapping::{swapping, PairSelection};
use crate::ttc::{cttc, cttcr, naive_ttc, ArcRule, CycleSelection, NaiveOutcome};

/// Default trade limit for naive TTC.
pub const DEFAULT_MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mechanism {
    /// Serial dictatorship; `None` means the identity order.
    SerialDictatorship { order: Option<Vec<usize>> },
    NaiveTtc { selection: CycleSelection, max_iters: usize },
    Cttc { rule: ArcRule, selection: CycleSelection },
    Cttcr { rule: ArcRule, selection: CycleSelection },
    Swapping { rule: PairSelection },
    DoubleMatching,
    DoubleMatchingLocalSearch,
    LocalSearch,
    /// First stable assignment in enumeration order.
    StableOracle { kind: StabilityKind },
}

impl Mechanism {
    pub fn sd() -> Self {
        Mechanism::SerialDictatorship { order: None }
    }

    pub fn cttc() -> Self {
        Mechanism::Cttc {
            rule: ArcRule::StrictConsent,
            selection: CycleSelection::LexSmallest,
        }
    }

    pub fn cttcr() -> Self {
        Mechanism::Cttcr {
            rule: ArcRule::BestConsenting,
            selection: CycleSelection::LexSmallest,
        }
    }

    pub fn swapping() -> Self {
        Mechanism::Swapping { rule: PairSelection::Lex }
    }

    /// Short name used in reports and on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::SerialDictatorship { .. } => "sd",
            Mechanism::NaiveTtc { .. } => "naive-ttc",
            Mechanism::Cttc { .. } => "cttc",
            Mechanism::Cttcr { .. } => "cttcr",
            Mechanism::Swapping { .. } => "swap",
            Mechanism::DoubleMatching => "dm",
            Mechanism::DoubleMatchingLocalSearch => "dm-ls",
            Mechanism::LocalSearch => "ls",
            Mechanism::StableOracle { kind: StabilityKind::TwoPerson } => "oracle-2ps",
            Mechanism::StableOracle { kind: StabilityKind::FourPerson } => "oracle-4ps",
        }
    }

    /// Whether the mechanism starts from an initial assignment.
    pub fn uses_initial(&self) -> bool {
        matches!(
            self,
            Mechanism::NaiveTtc { .. }
                | Mechanism::Cttc { .. }
                | Mechanism::Cttcr { .. }
                | Mechanism::Swapping { .. }
                | Mechanism::LocalSearch
        )
    }

    /// Runs the mechanism. Mechanisms that need a starting point use
    /// `initial`, or the identity pairing when it is `None`.
    pub fn run(&self, inst: &Instance, initial: Option<&Assignment>) -> Result<Outcome> {
        let identity = Assignment::identity(inst.room_count());
        let mu0 = initial.unwrap_or(&identity);
        let plain = |(assignment, trace): (Assignment, MechanismTrace)| Outcome {
            assignment,
            trace,
            double_matching: None,
        };
        match self {
            Mechanism::SerialDictatorship { order } => {
                let identity_order: Vec<usize> = (0..inst.agent_count()).collect();
                serial_dictatorship(inst, order.as_deref().unwrap_or(&identity_order)).map(plain)
            }
            Mechanism::NaiveTtc { selection, max_iters } => match naive_ttc(inst, mu0, *selection, *max_iters) {
                NaiveOutcome::Converged { assignment, trace } => Ok(plain((assignment, trace))),
                NaiveOutcome::NonTerminating { length, .. } => Err(Error::NonTerminating(format!(
                    "assignment revisited after a state cycle of length {length}"
                ))),
                NaiveOutcome::Exhausted { .. } => {
                    Err(Error::NonTerminating(format!("no convergence within {max_iters} trades")))
                }
            },
            Mechanism::Cttc { rule, selection } => cttc(inst, mu0, *rule, *selection).map(plain),
            Mechanism::Cttcr { rule, selection } => cttcr(inst, mu0, *rule, *selection).map(plain),
            Mechanism::Swapping { rule } => swapping(inst, mu0, rule).map(plain),
            Mechanism::DoubleMatching => {
                let (assignment, report) = double_matching(inst)?;
                Ok(Outcome {
                    assignment,
                    trace: MechanismTrace::default(),
                    double_matching: Some(report),
                })
            }
            Mechanism::DoubleMatchingLocalSearch => {
                let (assignment, trace, report) = double_matching_local_search(inst)?;
                Ok(Outcome {
                    assignment,
                    trace,
                    double_matching: Some(report),
                })
            }
            Mechanism::LocalSearch => Ok(plain(local_search(inst, mu0))),
            Mechanism::StableOracle { kind } => match first_stable(inst, *kind)? {
                Some(mu) => Ok(plain((mu, MechanismTrace::default()))),
                None => Err(Error::NoStableAssignment(kind.to_string())),
            },
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mechanism {
    type Err = String;

    /// Parses a short name with default options.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "sd" => Mechanism::sd(),
            "naive-ttc" | "ttc" => Mechanism::NaiveTtc {
                selection: CycleSelection::LexSmallest,
                max_iters: DEFAULT_MAX_ITERS,
            },
            "cttc" => Mechanism::cttc(),
            "cttcr" => Mechanism::cttcr(),
            "swap" | "swapping" => Mechanism::swapping(),
            "dm" => Mechanism::DoubleMatching,
            "dm-ls" => Mechanism::DoubleMatchingLocalSearch,
            "ls" => Mechanism::LocalSearch,
            "oracle-2ps" => Mechanism::StableOracle {
                kind: StabilityKind::TwoPerson,
            },
            "oracle-4ps" => Mechanism::StableOracle {
                kind: StabilityKind::FourPerson,
            },
            other => return Err(format!("unknown mechanism {other:?}")),
        })
    }
}

/// What a mechanism run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub assignment: Assignment,
    pub trace: MechanismTrace,
    pub double_matching: Option<DoubleMatchingReport>,
}
