//! Batch runs and the property summary table.

use std::fmt;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checks::{blocking_pairs, StabilityKind};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::gen::{gen_binary_symmetric, gen_random};
use crate::io::{parse_assignment, read_assignment, read_instance};
use crate::mechanism::Mechanism;
use crate::model::{Assignment, Instance};
use crate::oracle::{check_cap, is_pareto_optimal, max_social_welfare};
use crate::probe::{manipulation_search, verify_manipulation, Misreport, SearchSpace, DEFAULT_BUDGET};
use crate::swapping::PairSelection;

/// One unit of batch work.
#[derive(Debug, Clone)]
pub struct ReportJob {
    pub id: String,
    pub instance: Instance,
    pub initial: Option<Assignment>,
    pub mechanism: Mechanism,
    /// Compare against the exhaustive optimum, refusing instances with more
    /// agents than this.
    pub oracle_cap: Option<usize>,
}

/// One output row. Column order is fixed; bump [`REPORT_VERSION`] when it
/// changes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub version: u32,
    pub id: String,
    pub algo: String,
    pub agents: usize,
    pub sw: Option<u64>,
    pub oracle_max_sw: Option<u64>,
    pub sw_ratio: Option<f64>,
    pub blocking_2ps: Option<usize>,
    pub blocking_4ps: Option<usize>,
    pub moves: Option<usize>,
    pub wall_ms: f64,
    pub error: Option<String>,
}

pub const REPORT_VERSION: u32 = 1;

fn run_job(job: &ReportJob) -> ReportRow {
    let start = Instant::now();
    let mut row = ReportRow {
        version: REPORT_VERSION,
        id: job.id.clone(),
        algo: job.mechanism.name().to_string(),
        agents: job.instance.agent_count(),
        sw: None,
        oracle_max_sw: None,
        sw_ratio: None,
        blocking_2ps: None,
        blocking_4ps: None,
        moves: None,
        wall_ms: 0.0,
        error: None,
    };
    let fail = |e: Error| format!("{}: {e}", e.code());
    match job.mechanism.run(&job.instance, job.initial.as_ref()) {
        Ok(out) => {
            let inst = &job.instance;
            let sw = inst.social_welfare(&out.assignment);
            row.sw = Some(sw);
            row.blocking_2ps = Some(blocking_pairs(inst, &out.assignment, StabilityKind::TwoPerson).len());
            row.blocking_4ps = Some(blocking_pairs(inst, &out.assignment, StabilityKind::FourPerson).len());
            row.moves = Some(out.trace.moves());
            if let Some(cap) = job.oracle_cap {
                match check_cap(inst.agent_count(), cap).and_then(|_| max_social_welfare(inst)) {
                    Ok((best, _)) => {
                        row.oracle_max_sw = Some(best);
                        row.sw_ratio = Some(if best == 0 { 1.0 } else { sw as f64 / best as f64 });
                    }
                    Err(e) => row.error = Some(fail(e)),
                }
            }
        }
        Err(e) => row.error = Some(fail(e)),
    }
    row.wall_ms = start.elapsed().as_secs_f64() * 1000.0;
    row
}

/// Runs every job, using up to `jobs` worker threads. Row order follows job
/// order; a failing row records its error and the batch continues.
pub fn run_report(batch: &[ReportJob], jobs: usize) -> Result<Vec<ReportRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(pool.install(|| batch.par_iter().map(run_job).collect()))
}

/// One entry of a batch file. Exactly one of `instance` (a path, relative
/// to the batch file) and `fixture` (a shipped fixture name) is given.
/// A fixture's own starting assignment is used unless `initial` is set.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchEntry {
    pub id: Option<String>,
    pub instance: Option<String>,
    pub fixture: Option<String>,
    pub initial: Option<String>,
    pub algo: String,
    #[serde(default)]
    pub oracle: bool,
}

/// Reads a JSON array of [`BatchEntry`] and resolves it into jobs.
pub fn load_batch(json: &str, base_dir: &Path, oracle_cap: usize) -> Result<Vec<ReportJob>> {
    let entries: Vec<BatchEntry> = serde_json::from_str(json)?;
    entries
        .into_iter()
        .enumerate()
        .map(|(k, e)| {
            let (instance, fixture_initial, default_id) = match (&e.instance, &e.fixture) {
                (Some(path), None) => (read_instance(base_dir.join(path))?, None, path.clone()),
                (None, Some(name)) => {
                    let f = fixtures::get(name)
                        .ok_or_else(|| Error::InvalidParameter(format!("unknown fixture {name:?}")))?;
                    (f.instance(), f.assignment_json, name.clone())
                }
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "batch entry {k}: give exactly one of \"instance\" and \"fixture\""
                    )))
                }
            };
            let initial = match (&e.initial, fixture_initial) {
                (Some(path), _) => Some(read_assignment(&instance, base_dir.join(path))?),
                (None, Some(json)) => Some(parse_assignment(&instance, json)?),
                (None, None) => None,
            };
            let mechanism: Mechanism = e.algo.parse().map_err(Error::InvalidParameter)?;
            Ok(ReportJob {
                id: e.id.unwrap_or(default_id),
                instance,
                initial,
                mechanism,
                oracle_cap: e.oracle.then_some(oracle_cap),
            })
        })
        .collect()
}

/// The four summary-table mechanisms on every shipped fixture.
pub fn fixture_batch(oracle_cap: usize) -> Vec<ReportJob> {
    let mut jobs = Vec::new();
    for f in fixtures::ALL {
        for mechanism in [Mechanism::sd(), Mechanism::cttc(), Mechanism::cttcr(), Mechanism::swapping()] {
            jobs.push(ReportJob {
                id: f.name.to_string(),
                instance: f.instance(),
                initial: f.initial(),
                mechanism,
                oracle_cap: Some(oracle_cap),
            });
        }
    }
    jobs
}

const CSV_HEADER: [&str; 12] = [
    "version",
    "id",
    "algo",
    "agents",
    "sw",
    "oracle_max_sw",
    "sw_ratio",
    "blocking_2ps",
    "blocking_4ps",
    "moves",
    "wall_ms",
    "error",
];

pub fn rows_to_csv(rows: &[ReportRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    // Written by hand so an empty report still carries its header.
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn rows_to_json(rows: &[ReportRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

/// One cell of the summary table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cell {
    Yes,
    /// Holds on every instance with strict utilities.
    YesStrict,
    No,
    /// The search found nothing, which proves nothing.
    NoCounterexample,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cell::Yes => "✓",
            Cell::YesStrict => "✓ (strict)",
            Cell::No => "✗",
            Cell::NoCounterexample => "no counterexample found",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SummaryRow {
    pub algo: &'static str,
    pub two_ps: Cell,
    pub four_ps: Cell,
    pub po: Cell,
    pub sp: Cell,
    /// Human-readable notes naming the instance behind each ✗.
    pub evidence: Vec<String>,
}

/// A recorded profitable misreport.
#[derive(Debug, Clone)]
pub struct Witness {
    pub fixture: &'static str,
    pub mechanism: Mechanism,
    pub agent: &'static str,
    pub misreport: Misreport,
}

impl Witness {
    fn from_fixture(fixture: &'static str, mechanism: Mechanism, agent: &'static str, edit: impl FnOnce(&mut Misreport)) -> Self {
        let inst = fixtures::instance(fixture);
        let mut misreport = Misreport::truthful(&inst, inst.agent_index(agent).expect("agent exists"));
        edit(&mut misreport);
        Witness {
            fixture,
            mechanism,
            agent,
            misreport,
        }
    }
}

/// Known manipulations for a summary row, by mechanism name.
pub fn known_witnesses(algo: &str) -> Vec<Witness> {
    match algo {
        // a1 hides its interest in a3, so the first cycle never forms
        "cttc" | "cttcr" => vec![Witness::from_fixture("sp_example", algo.parse().expect("known name"), "a1", |m| {
            m.agent_values[2] = 1
        })],
        "swap" => vec![Witness::from_fixture(
            "swap_non_sp",
            Mechanism::Swapping {
                rule: PairSelection::SdOrder(vec![1, 2, 0, 3, 4, 5]),
            },
            "b",
            |m| m.room_values = vec![0, 0, 0],
        )],
        _ => Vec::new(),
    }
}

struct Case {
    id: String,
    instance: Instance,
    initial: Option<Assignment>,
}

fn summary_cases() -> Result<Vec<Case>> {
    let mut cases: Vec<Case> = fixtures::ALL
        .iter()
        .map(|f| Case {
            id: f.name.to_string(),
            instance: f.instance(),
            initial: f.initial(),
        })
        .collect();
    for seed in 0..20u64 {
        let two_n = if seed % 2 == 0 { 4 } else { 6 };
        cases.push(Case {
            id: format!("strict-{seed}"),
            instance: gen_random(two_n, 100, 100, seed, true)?,
            initial: None,
        });
        cases.push(Case {
            id: format!("binary-{seed}"),
            instance: gen_binary_symmetric(two_n, 0.5, 0.5, seed)?,
            initial: None,
        });
    }
    Ok(cases)
}

/// Agents of instances with at most this many agents are searched for
/// permutation misreports when no witness is known.
const SP_SEARCH_AGENTS: usize = 6;
/// Pareto optimality is only checked exhaustively up to this size.
const PO_CHECK_AGENTS: usize = 10;

/// Rebuilds the summary table (SD, CTTC, CTTCR, swapping) from the fixture
/// corpus plus seeded random instances.
///
/// A property cell is ✓ when every output satisfies it and ✗ otherwise.
/// Serial dictatorship's Pareto cell is judged on strict instances only.
/// A strategy-proofness cell is ✗ when a known misreport verifies, otherwise
/// permutation misreports are searched on small instances.
pub fn summary_table() -> Result<Vec<SummaryRow>> {
    let cases = summary_cases()?;
    let rows = [
        ("SD", Mechanism::sd()),
        ("CTTC", Mechanism::cttc()),
        ("CTTCR", Mechanism::cttcr()),
        ("Swapping", Mechanism::swapping()),
    ];
    let mut out = Vec::new();
    for (label, mech) in rows {
        let strict_only = matches!(mech, Mechanism::SerialDictatorship { .. });
        let mut evidence = Vec::new();
        let (mut two_ps, mut four_ps, mut po) = (true, true, true);
        let mut domain = Vec::new();
        for case in &cases {
            let outcome = match mech.run(&case.instance, case.initial.as_ref()) {
                Ok(o) => o,
                Err(Error::NotBinarySymmetric) => continue,
                Err(e) => return Err(e),
            };
            domain.push(case);
            let inst = &case.instance;
            let mu = &outcome.assignment;
            let b2 = blocking_pairs(inst, mu, StabilityKind::TwoPerson).len();
            let b4 = blocking_pairs(inst, mu, StabilityKind::FourPerson).len();
            if b2 > 0 && two_ps {
                two_ps = false;
                evidence.push(format!("2PS fails on {}: {b2} blocking pairs", case.id));
            }
            if b4 > 0 && four_ps {
                four_ps = false;
                evidence.push(format!("4PS fails on {}: {b4} blocking pairs", case.id));
            }
            let judged = !strict_only || inst.has_strict_utilities();
            if po && judged && inst.agent_count() <= PO_CHECK_AGENTS && !is_pareto_optimal(inst, mu)? {
                po = false;
                evidence.push(format!("PO fails on {}", case.id));
            }
        }
        let mut sp = Cell::NoCounterexample;
        for w in known_witnesses(mech.name()) {
            let f = fixtures::get(w.fixture).expect("witness fixture exists");
            let inst = f.instance();
            let agent = inst.agent_index(w.agent).expect("witness agent exists");
            let check = verify_manipulation(&inst, &w.mechanism, f.initial().as_ref(), agent, &w.misreport)?;
            if check.improved {
                sp = Cell::No;
                evidence.push(format!(
                    "SP fails on {}: {} goes from {} to {}",
                    w.fixture,
                    w.agent,
                    check.truthful,
                    check.manipulated.unwrap_or_default()
                ));
                break;
            }
        }
        if sp == Cell::NoCounterexample {
            'search: for case in domain.iter().filter(|c| c.instance.agent_count() <= SP_SEARCH_AGENTS) {
                for agent in 0..case.instance.agent_count() {
                    let found = manipulation_search(
                        &case.instance,
                        &mech,
                        case.initial.as_ref(),
                        agent,
                        SearchSpace::Permutations,
                        DEFAULT_BUDGET,
                    )?;
                    if found.is_some() {
                        sp = Cell::No;
                        evidence.push(format!("SP fails on {} for agent {agent}", case.id));
                        break 'search;
                    }
                }
            }
        }
        let yes = |holds: bool| if holds { Cell::Yes } else { Cell::No };
        out.push(SummaryRow {
            algo: label,
            two_ps: yes(two_ps),
            four_ps: yes(four_ps),
            po: match (po, strict_only) {
                (true, true) => Cell::YesStrict,
                (holds, _) => yes(holds),
            },
            sp,
            evidence,
        });
    }
    Ok(out)
}

/// Plain-text rendering of the summary table.
pub fn summary_to_text(rows: &[SummaryRow]) -> String {
    let mut s = format!("{:<10} {:<12} {:<12} {:<12} {}\n", "algorithm", "2PS", "4PS", "PO", "SP");
    for r in rows {
        s.push_str(&format!(
            "{:<10} {:<12} {:<12} {:<12} {}\n",
            r.algo,
            r.two_ps.to_string(),
            r.four_ps.to_string(),
            r.po.to_string(),
            r.sp
        ));
    }
    s
}

pub fn summary_to_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["algo", "2ps", "4ps", "po", "sp", "evidence"])?;
    for r in rows {
        w.write_record([
            r.algo.to_string(),
            r.two_ps.to_string(),
            r.four_ps.to_string(),
            r.po.to_string(),
            r.sp.to_string(),
            r.evidence.join("; "),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn summary_to_json(rows: &[SummaryRow]) -> String {
    serde_json::to_string_pretty(rows).expect("summary serializes")
}
