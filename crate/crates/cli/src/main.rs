use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use roommates::io::{assignment_to_json, assignment_to_text, instance_to_json, read_assignment, read_instance};
use roommates::mechanism::DEFAULT_MAX_ITERS;
use roommates::oracle::{all_stable, assignment_count, find_dominating, max_social_welfare, pareto_front, DEFAULT_CLI_CAP, ENUMERATION_CAP};
use roommates::probe::{manipulation_search, verify_manipulation, Misreport, SearchSpace, DEFAULT_BUDGET};
use roommates::report::{
    fixture_batch, load_batch, rows_to_csv, rows_to_json, run_report, summary_table, summary_to_csv, summary_to_json,
    summary_to_text,
};
use roommates::swapping::PairSelection;
use roommates::ttc::{ArcRule, CycleSelection};
use roommates::{blocking_pairs, gen, Assignment, BlockingReport, Error, Instance, Mechanism, Result, StabilityKind};
use serde_json::json;

#[derive(Parser)]
#[command(name = "roommates", version, about = "Roommate and room matching mechanisms, checks and oracles")]
struct Cli {
    /// Instance file (JSON).
    #[arg(long, global = true)]
    instance: Option<PathBuf>,
    /// Assignment file (JSON). Used as the starting point or the assignment to check.
    #[arg(long, global = true)]
    assignment: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for batch reports.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run a mechanism on an instance.
    Solve(AlgoArgs),
    /// List blocking pairs of an assignment.
    Check {
        #[arg(long, value_enum, default_value_t = KindArg::Both)]
        kind: KindArg,
    },
    /// Exhaustive queries over every assignment.
    Oracle {
        #[arg(long, value_enum, default_value_t = Query::MaxSw)]
        query: Query,
        #[arg(long, value_enum, default_value_t = KindArg::Four)]
        kind: KindArg,
        /// Refuse instances with more agents than this.
        #[arg(long, default_value_t = DEFAULT_CLI_CAP)]
        cap: usize,
    },
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Write the instance here instead of stdout.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Look for or verify a profitable misreport.
    Probe {
        #[command(flatten)]
        algo: AlgoArgs,
        /// Label of the manipulating agent.
        #[arg(long)]
        agent: String,
        #[arg(long, value_enum, default_value_t = SpaceArg::Permutations)]
        space: SpaceArg,
        #[arg(long, default_value_t = 2)]
        grid_max: u64,
        /// Verify this misreport instead of searching.
        #[arg(long)]
        misreport: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Batch runs and the property summary table.
    Report {
        /// JSON array of {id?, instance | fixture, initial?, algo, oracle?}.
        #[arg(long, conflicts_with_all = ["fixtures", "summary"])]
        batch: Option<PathBuf>,
        /// Run SD, CTTC, CTTCR and swapping on every shipped fixture.
        #[arg(long, conflicts_with = "summary")]
        fixtures: bool,
        /// Rebuild the property summary table.
        #[arg(long)]
        summary: bool,
        #[arg(long, default_value_t = DEFAULT_CLI_CAP)]
        oracle_cap: usize,
    },
}

#[derive(Args)]
struct AlgoArgs {
    #[arg(long, default_value = "sd")]
    algo: String,
    /// Agent order as comma-separated labels or indices (SD and sd-order swapping).
    #[arg(long)]
    order: Option<String>,
    /// Arc rule for the trading mechanisms. Defaults to strict for cttc and best for cttcr.
    #[arg(long)]
    arc_rule: Option<ArcRule>,
    #[arg(long, default_value = "lex-smallest")]
    selection: CycleSelection,
    /// Pair rule for swapping.
    #[arg(long, value_enum, default_value_t = RuleArg::Lex)]
    rule: RuleArg,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    #[value(name = "2ps")]
    Two,
    #[value(name = "4ps")]
    Four,
    Both,
}

impl KindArg {
    fn kinds(self) -> Vec<StabilityKind> {
        match self {
            KindArg::Two => vec![StabilityKind::TwoPerson],
            KindArg::Four => vec![StabilityKind::FourPerson],
            KindArg::Both => vec![StabilityKind::TwoPerson, StabilityKind::FourPerson],
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Query {
    /// Every stable assignment of the chosen kind.
    Stable,
    /// The Pareto front.
    Pareto,
    /// Whether --assignment is Pareto optimal, with a dominating witness.
    Po,
    /// Maximum social welfare and its first witness.
    MaxSw,
    /// Number of assignments.
    Count,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    Permutations,
    Grid,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    Lex,
    SdOrder,
}

#[derive(Subcommand)]
enum GenKind {
    /// Uniform random values.
    Random {
        #[arg(long)]
        agents: usize,
        #[arg(long, default_value_t = 10)]
        max_h: u64,
        #[arg(long, default_value_t = 10)]
        max_v: u64,
        /// Redraw until each agent's utilities are all distinct.
        #[arg(long)]
        strict: bool,
    },
    /// Symmetric 0/1 roommate values and 0/1 room values.
    Binary {
        #[arg(long)]
        agents: usize,
        #[arg(long, default_value_t = 0.5)]
        density_h: f64,
        #[arg(long, default_value_t = 0.5)]
        density_v: f64,
    },
    /// The family on which CTTCR leaves 2n²−2n 2PS blocking pairs.
    Family {
        /// Number of rooms.
        #[arg(long)]
        n: usize,
        /// Also write the starting assignment here.
        #[arg(long)]
        initial_out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InstanceTooLarge { .. } | Error::SpaceTooLarge { .. } => 3,
        Error::NotBinarySymmetric | Error::NonTerminating(_) | Error::NoStableAssignment(_) | Error::MalformedCycle(_) => 4,
        _ => 2,
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn load_instance(cli: &Cli) -> Result<Instance> {
    let path = cli.instance.as_ref().ok_or_else(|| invalid("--instance is required"))?;
    read_instance(path)
}

fn load_assignment(cli: &Cli, inst: &Instance) -> Result<Option<Assignment>> {
    cli.assignment.as_ref().map(|p| read_assignment(inst, p)).transpose()
}

fn require_assignment(cli: &Cli, inst: &Instance) -> Result<Assignment> {
    load_assignment(cli, inst)?.ok_or_else(|| invalid("--assignment is required"))
}

fn agent_by_label(inst: &Instance, label: &str) -> Result<usize> {
    inst.agent_index(label)
        .or_else(|| label.parse().ok().filter(|&i| i < inst.agent_count()))
        .ok_or_else(|| invalid(format!("unknown agent {label:?}")))
}

fn parse_order(inst: &Instance, list: &str) -> Result<Vec<usize>> {
    list.split(',')
        .map(|s| agent_by_label(inst, s.trim()).map_err(|_| Error::InvalidOrder(format!("unknown agent {s:?}"))))
        .collect()
}

fn check_cap(inst: &Instance, cap: usize) -> Result<()> {
    if cap > ENUMERATION_CAP {
        return Err(invalid(format!("cap {cap} exceeds the hard limit of {ENUMERATION_CAP}")));
    }
    if inst.agent_count() > cap {
        return Err(Error::InstanceTooLarge {
            agents: inst.agent_count(),
            cap,
        });
    }
    Ok(())
}

fn build_mechanism(inst: &Instance, a: &AlgoArgs) -> Result<Mechanism> {
    let base: Mechanism = a.algo.parse().map_err(Error::InvalidParameter)?;
    let order = a.order.as_deref().map(|s| parse_order(inst, s)).transpose()?;
    Ok(match base {
        Mechanism::SerialDictatorship { .. } => Mechanism::SerialDictatorship { order },
        Mechanism::NaiveTtc { .. } => Mechanism::NaiveTtc {
            selection: a.selection,
            max_iters: a.max_iters,
        },
        Mechanism::Cttc { rule, .. } => Mechanism::Cttc {
            rule: a.arc_rule.unwrap_or(rule),
            selection: a.selection,
        },
        Mechanism::Cttcr { rule, .. } => Mechanism::Cttcr {
            rule: a.arc_rule.unwrap_or(rule),
            selection: a.selection,
        },
        Mechanism::Swapping { .. } => Mechanism::Swapping {
            rule: match a.rule {
                RuleArg::Lex => PairSelection::Lex,
                RuleArg::SdOrder => PairSelection::SdOrder(order.unwrap_or_else(|| (0..inst.agent_count()).collect())),
            },
        },
        other => other,
    })
}

fn labelled(inst: &Instance, mu: &Assignment) -> serde_json::Value {
    mu.triples()
        .iter()
        .map(|t| json!([inst.agent_label(t.agent_a), inst.agent_label(t.agent_b), inst.room_label(t.room)]))
        .collect()
}

fn utilities_json(inst: &Instance, mu: &Assignment) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = (0..inst.agent_count())
        .map(|i| (inst.agent_label(i).to_string(), json!(inst.utility(mu, i))))
        .collect();
    serde_json::Value::Object(map)
}

fn assignment_csv(inst: &Instance, mu: &Assignment) -> String {
    let mut s = String::from("agent,roommate,room,utility\n");
    for i in 0..inst.agent_count() {
        s.push_str(&format!(
            "{},{},{},{}\n",
            inst.agent_label(i),
            inst.agent_label(mu.roommate(i)),
            inst.room_label(mu.room(i)),
            inst.utility(mu, i)
        ));
    }
    s
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn solve(cli: &Cli, a: &AlgoArgs) -> Result<String> {
    let inst = load_instance(cli)?;
    let initial = load_assignment(cli, &inst)?;
    let mech = build_mechanism(&inst, a)?;
    let out = mech.run(&inst, initial.as_ref())?;
    let mu = &out.assignment;
    let sw = inst.social_welfare(mu);
    Ok(match cli.format.unwrap_or(Format::Text) {
        Format::Json => pretty(&json!({
            "algo": mech.name(),
            "assignment": labelled(&inst, mu),
            "social_welfare": sw,
            "utilities": utilities_json(&inst, mu),
            "trace": out.trace,
            "double_matching": out.double_matching,
        })),
        Format::Csv => assignment_csv(&inst, mu),
        Format::Text => {
            let mut s = format!("{}\nSW = {sw}, moves = {}\n", assignment_to_text(&inst, mu), out.trace.moves());
            if let Some(dm) = &out.double_matching {
                for c in &dm.cycles {
                    let names: Vec<&str> = c.agents.iter().map(|&i| inst.agent_label(i)).collect();
                    s.push_str(&format!(
                        "cycle [{}]: W = {:?}, removed class {} (weight {})\n",
                        names.join(", "),
                        c.weights,
                        c.removed_class,
                        c.removed_weight
                    ));
                }
            }
            s
        }
    })
}

fn check(cli: &Cli, kind: KindArg) -> Result<String> {
    let inst = load_instance(cli)?;
    let mu = require_assignment(cli, &inst)?;
    let reports: Vec<BlockingReport> = kind.kinds().into_iter().map(|k| blocking_pairs(&inst, &mu, k)).collect();
    Ok(match cli.format.unwrap_or(Format::Text) {
        Format::Json => pretty(&json!({
            "social_welfare": inst.social_welfare(&mu),
            "utilities": utilities_json(&inst, &mu),
            "reports": reports,
        })),
        Format::Csv => {
            let mut s = String::new();
            for (k, r) in reports.iter().enumerate() {
                let csv = r.to_csv()?;
                // one header for the whole table
                let body = if k == 0 { csv.as_str() } else { csv.split_once('\n').map_or("", |x| x.1) };
                s.push_str(body);
            }
            s
        }
        Format::Text => {
            let mut s = format!("SW = {}\n", inst.social_welfare(&mu));
            for r in &reports {
                s.push_str(&format!("{}: {} blocking pairs\n", r.kind, r.len()));
                for p in &r.pairs {
                    s.push_str(&format!(
                        "  ({}, {}) gains {:+} {:+}\n",
                        inst.agent_label(p.i),
                        inst.agent_label(p.j),
                        p.delta_i,
                        p.delta_j
                    ));
                }
            }
            s
        }
    })
}

fn assignment_list(inst: &Instance, list: &[Assignment], format: Format) -> String {
    match format {
        Format::Json => pretty(&json!(list.iter().map(|mu| labelled(inst, mu)).collect::<Vec<_>>())),
        Format::Csv => {
            let mut s = String::from("index,agent_a,agent_b,room\n");
            for (k, mu) in list.iter().enumerate() {
                for t in mu.triples() {
                    s.push_str(&format!(
                        "{k},{},{},{}\n",
                        inst.agent_label(t.agent_a),
                        inst.agent_label(t.agent_b),
                        inst.room_label(t.room)
                    ));
                }
            }
            s
        }
        Format::Text => {
            let mut s = format!("{} assignments\n", list.len());
            for mu in list {
                s.push_str(&format!("{}  SW = {}\n", assignment_to_text(inst, mu), inst.social_welfare(mu)));
            }
            s
        }
    }
}

fn oracle(cli: &Cli, query: Query, kind: KindArg, cap: usize) -> Result<String> {
    let inst = load_instance(cli)?;
    check_cap(&inst, cap)?;
    let format = cli.format.unwrap_or(Format::Text);
    Ok(match query {
        Query::Stable => {
            let kind = match kind {
                KindArg::Two => StabilityKind::TwoPerson,
                KindArg::Four => StabilityKind::FourPerson,
                KindArg::Both => return Err(invalid("--kind must be 2ps or 4ps for stable queries")),
            };
            assignment_list(&inst, &all_stable(&inst, kind)?, format)
        }
        Query::Pareto => assignment_list(&inst, &pareto_front(&inst)?, format),
        Query::Po => {
            let mu = require_assignment(cli, &inst)?;
            let witness = find_dominating(&inst, &mu)?;
            match format {
                Format::Json => pretty(&json!({
                    "pareto_optimal": witness.is_none(),
                    "dominated_by": witness.as_ref().map(|w| labelled(&inst, w)),
                })),
                Format::Csv => format!(
                    "pareto_optimal,dominated_by\n{},\"{}\"\n",
                    witness.is_none(),
                    witness.as_ref().map(|w| assignment_to_text(&inst, w)).unwrap_or_default()
                ),
                Format::Text => match witness {
                    None => "Pareto optimal\n".to_string(),
                    Some(w) => format!(
                        "dominated by {} (SW {} vs {})\n",
                        assignment_to_text(&inst, &w),
                        inst.social_welfare(&w),
                        inst.social_welfare(&mu)
                    ),
                },
            }
        }
        Query::MaxSw => {
            let (best, mu) = max_social_welfare(&inst)?;
            match format {
                Format::Json => pretty(&json!({ "max_social_welfare": best, "witness": labelled(&inst, &mu) })),
                Format::Csv => format!("max_social_welfare,witness\n{best},\"{}\"\n", assignment_to_text(&inst, &mu)),
                Format::Text => format!("max SW = {best}\n{}\n", assignment_to_text(&inst, &mu)),
            }
        }
        Query::Count => {
            let n = assignment_count(inst.agent_count());
            match format {
                Format::Json => pretty(&json!({ "assignments": n.to_string() })),
                Format::Csv => format!("assignments\n{n}\n"),
                Format::Text => format!("{n}\n"),
            }
        }
    })
}

fn write_or_return(path: Option<&Path>, text: String) -> Result<String> {
    match path {
        Some(p) => {
            fs::write(p, text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn generate(cli: &Cli, kind: &GenKind, out: Option<&Path>) -> Result<String> {
    let inst = match kind {
        GenKind::Random {
            agents,
            max_h,
            max_v,
            strict,
        } => gen::gen_random(*agents, *max_h, *max_v, cli.seed, *strict)?,
        GenKind::Binary {
            agents,
            density_h,
            density_v,
        } => gen::gen_binary_symmetric(*agents, *density_h, *density_v, cli.seed)?,
        GenKind::Family { n, initial_out } => {
            let (inst, mu) = gen::gen_cttcr_2ps_family(*n)?;
            if let Some(p) = initial_out {
                fs::write(p, assignment_to_json(&inst, &mu))?;
            }
            inst
        }
    };
    write_or_return(out, instance_to_json(&inst))
}

#[allow(clippy::too_many_arguments)]
fn probe(
    cli: &Cli,
    a: &AlgoArgs,
    agent: &str,
    space: SpaceArg,
    grid_max: u64,
    misreport: Option<&Path>,
    budget: u128,
) -> Result<String> {
    let inst = load_instance(cli)?;
    let initial = load_assignment(cli, &inst)?;
    let mech = build_mechanism(&inst, a)?;
    let i = agent_by_label(&inst, agent)?;
    let (report, check) = match misreport {
        Some(path) => {
            let report: Misreport = serde_json::from_str(&fs::read_to_string(path)?)?;
            let check = verify_manipulation(&inst, &mech, initial.as_ref(), i, &report)?;
            (Some(report), Some(check))
        }
        None => {
            let space = match space {
                SpaceArg::Permutations => SearchSpace::Permutations,
                SpaceArg::Grid => SearchSpace::Grid { max: grid_max },
            };
            match manipulation_search(&inst, &mech, initial.as_ref(), i, space, budget)? {
                Some((r, c)) => (Some(r), Some(c)),
                None => (None, None),
            }
        }
    };
    Ok(match cli.format.unwrap_or(Format::Text) {
        Format::Json => pretty(&json!({
            "algo": mech.name(),
            "agent": inst.agent_label(i),
            "found": check.as_ref().is_some_and(|c| c.improved),
            "misreport": report,
            "check": check,
        })),
        Format::Csv => {
            let cell = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
            format!(
                "algo,agent,improved,truthful,manipulated\n{},{},{},{},{}\n",
                mech.name(),
                inst.agent_label(i),
                check.as_ref().is_some_and(|c| c.improved),
                cell(check.as_ref().map(|c| c.truthful)),
                cell(check.as_ref().and_then(|c| c.manipulated))
            )
        }
        Format::Text => match (&report, &check) {
            (Some(r), Some(c)) => format!(
                "{} with agent_values {:?} room_values {:?}: {} -> {}{}\n",
                inst.agent_label(i),
                r.agent_values,
                r.room_values,
                c.truthful,
                c.manipulated.map_or("rejected".to_string(), |m| m.to_string()),
                if c.improved { " (profitable)" } else { "" }
            ),
            _ => "no counterexample found\n".to_string(),
        },
    })
}

fn report(cli: &Cli, batch: Option<&Path>, fixtures: bool, summary: bool, oracle_cap: usize) -> Result<String> {
    let format = cli.format.unwrap_or(Format::Csv);
    if summary {
        let rows = summary_table()?;
        return match format {
            Format::Json => Ok(summary_to_json(&rows) + "\n"),
            Format::Csv => summary_to_csv(&rows),
            Format::Text => {
                let mut s = summary_to_text(&rows);
                for r in &rows {
                    for e in &r.evidence {
                        s.push_str(&format!("  {}: {e}\n", r.algo));
                    }
                }
                Ok(s)
            }
        };
    }
    if oracle_cap > ENUMERATION_CAP {
        return Err(invalid(format!("cap {oracle_cap} exceeds the hard limit of {ENUMERATION_CAP}")));
    }
    let jobs = match (batch, fixtures) {
        (Some(path), _) => {
            let base = path.parent().unwrap_or(Path::new("."));
            load_batch(&fs::read_to_string(path)?, base, oracle_cap)?
        }
        (None, true) => fixture_batch(oracle_cap),
        (None, false) => return Err(invalid("give one of --batch, --fixtures or --summary")),
    };
    let rows = run_report(&jobs, cli.jobs)?;
    match format {
        Format::Json => Ok(rows_to_json(&rows) + "\n"),
        Format::Csv | Format::Text => rows_to_csv(&rows),
    }
}

fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Solve(a) => solve(cli, a),
        Command::Check { kind } => check(cli, *kind),
        Command::Oracle { query, kind, cap } => oracle(cli, *query, *kind, *cap),
        Command::Gen { kind, out } => generate(cli, kind, out.as_deref()),
        Command::Probe {
            algo,
            agent,
            space,
            grid_max,
            misreport,
            budget,
        } => probe(cli, algo, agent, *space, *grid_max, misreport.as_deref(), *budget),
        Command::Report {
            batch,
            fixtures,
            summary,
            oracle_cap,
        } => report(cli, batch.as_deref(), *fixtures, *summary, *oracle_cap),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            ExitCode::from(exit_code(&e))
        }
    }
}
