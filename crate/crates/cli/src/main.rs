//! `tasep` command-line entry point.
//!
//! Exit codes: 0 success, 1 validation or lint failure, 2 usage or I/O error.

use std::fmt::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use tasep_core::character::CharacterFile;
use tasep_core::probability::{
    balance_report, exact_check_probability, monte_carlo_probability, Rolls,
};
use tasep_core::scenario::{
    has_errors, lint_scenario, parse_scenario, verify_intended_solution, Scenario, Severity,
};
use tasep_core::session::{parse_log, replay, SessionState};
use tasep_core::taxonomy::{Skill, SuperCategory};

#[derive(Parser)]
#[command(name = "tasep", version, about = "Rules, scenarios and sessions for the TASEP tabletop game")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Character sheets.
    Character {
        #[command(subcommand)]
        command: CharacterCmd,
    },
    /// Exact success probabilities.
    Probability {
        #[command(subcommand)]
        command: ProbabilityCmd,
    },
    /// The skill-system balance derivation.
    Balance {
        #[command(subcommand)]
        command: BalanceCmd,
    },
    /// Scenario files.
    Scenario {
        #[command(subcommand)]
        command: ScenarioCmd,
    },
    /// Monte Carlo estimate of a check, compared with the exact value.
    Simulate {
        /// Effective skill.
        #[arg(long)]
        skill: u32,
        /// Adjusted threshold the total must exceed.
        #[arg(long, allow_negative_numbers = true)]
        threshold: i32,
        /// Roll two dice and keep the better one.
        #[arg(long)]
        proficient: bool,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recorded sessions.
    Session {
        #[command(subcommand)]
        command: SessionCmd,
    },
    /// Start the HTTP service.
    Serve {
        /// Bind address; loopback by default.
        #[arg(long, env = "TASEP_ADDR", default_value = tasep_service::DEFAULT_ADDR)]
        addr: SocketAddr,
        /// Directory holding the session logs.
        #[arg(long, env = "TASEP_DATA_DIR", default_value = tasep_service::DEFAULT_DATA_DIR)]
        data_dir: PathBuf,
        /// Built console assets to serve as static files.
        #[arg(long, env = "TASEP_CONSOLE_DIR")]
        console_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CharacterCmd {
    /// Check a character file against the creation rules.
    Validate { file: PathBuf },
}

#[derive(Subcommand)]
enum ProbabilityCmd {
    /// Success probability for a range of effective skills.
    Table {
        /// Inclusive range, e.g. `0..20`.
        #[arg(long, default_value = "0..20", value_parser = parse_range)]
        skill_range: (u32, u32),
        #[arg(long, default_value_t = 18, allow_negative_numbers = true)]
        threshold: i32,
        #[arg(long)]
        proficient: bool,
    },
}

#[derive(Subcommand)]
enum BalanceCmd {
    /// Recompute the derivation and flag where it misses its targets.
    Report,
}

#[derive(Subcommand)]
enum ScenarioCmd {
    /// Authoring checks.
    Lint { file: PathBuf },
    /// Walk the intended solution with every check succeeding.
    Verify { file: PathBuf },
}

#[derive(Subcommand)]
enum SessionCmd {
    /// Fold an event log and summarize the final state.
    Replay {
        /// Log file, or a session id under `TASEP_DATA_DIR`.
        log: String,
    },
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected A..B, got `{s}`"))?;
    let a: u32 = a.trim().parse().map_err(|e| format!("`{a}`: {e}"))?;
    let b: u32 = b.trim().parse().map_err(|e| format!("`{b}`: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

/// Why a command did not succeed.
enum Failure {
    /// Input was read but broke a rule: exit 1.
    Invalid(Option<String>),
    /// Bad usage or unreadable input: exit 2.
    Usage(String),
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("output serializes"));
}

fn character_validate(file: &Path, format: Format) -> Outcome {
    let text = read(file)?;
    let cf = CharacterFile::from_json(&text)
        .map_err(|e| Failure::Invalid(Some(format!("{}: {e}", file.display()))))?;
    match cf.validate() {
        Ok(c) => {
            if format == Format::Json {
                print_json(&json!({ "valid": true, "character": c }));
                return Ok(());
            }
            let top_cat = SuperCategory::ALL
                .into_iter()
                .max_by_key(|cat| (c.super_bonus(*cat), std::cmp::Reverse(*cat)))
                .unwrap();
            let top_skill = Skill::ALL
                .into_iter()
                .max_by_key(|s| (c.effective_skill(*s), std::cmp::Reverse(*s)))
                .unwrap();
            println!(
                "{}: {} bonus {}, {} {}, valid",
                c.name(),
                top_cat,
                c.super_bonus(top_cat),
                top_skill,
                c.effective_skill(top_skill)
            );
            let bonuses: Vec<String> = SuperCategory::ALL
                .iter()
                .map(|cat| format!("{cat} {}", c.super_bonus(*cat)))
                .collect();
            println!("bonuses: {}", bonuses.join(", "));
            println!("{:<16} {:>8} {:>9}  proficient", "skill", "invested", "effective");
            for s in Skill::ALL {
                println!(
                    "{:<16} {:>8} {:>9}  {}",
                    s.label(),
                    c.allocation().invested(s),
                    c.effective_skill(s),
                    if c.is_proficient(s) { "yes" } else { "" }
                );
            }
            let items: Vec<String> = c.inventory().iter().map(|i| i.to_string()).collect();
            println!("inventory: {}", if items.is_empty() { "none".into() } else { items.join(", ") });
            if c.unspent_points() > 0 {
                println!("warning: {} of 21 points unspent", c.unspent_points());
            }
            Ok(())
        }
        Err(violations) => {
            if format == Format::Json {
                let list: Vec<_> = violations
                    .iter()
                    .map(|v| json!({ "rule": v.rule(), "message": v.to_string() }))
                    .collect();
                print_json(&json!({ "valid": false, "violations": list }));
            } else {
                println!("{}: invalid", cf.name);
                for v in &violations {
                    println!("  {v}");
                }
            }
            Err(Failure::Invalid(None))
        }
    }
}

fn probability_table(range: (u32, u32), threshold: i32, proficient: bool, format: Format) -> Outcome {
    let rolls = Rolls::proficient(proficient);
    let rows: Vec<_> = (range.0..=range.1)
        .map(|s| (s, exact_check_probability(s, threshold, rolls)))
        .collect();
    if format == Format::Json {
        let list: Vec<_> = rows
            .iter()
            .map(|(s, p)| {
                json!({
                    "effectiveSkill": s,
                    "threshold": threshold,
                    "dice": rolls.count(),
                    "probability": p,
                })
            })
            .collect();
        print_json(&list);
        return Ok(());
    }
    let dice = if proficient { "best of 2 dice" } else { "1 die" };
    println!("threshold {threshold}, {dice}");
    println!("{:>5}  success", "skill");
    for (s, p) in rows {
        println!("{s:>5}  {p}");
    }
    Ok(())
}

fn load_scenario(file: &Path) -> Result<Scenario, Failure> {
    let text = read(file)?;
    parse_scenario(&text).map_err(|errors| {
        let mut msg = String::new();
        for e in &errors {
            let _ = writeln!(msg, "{}:{e}", file.display());
        }
        Failure::Invalid(Some(msg.trim_end().to_string()))
    })
}

fn scenario_lint(file: &Path, format: Format) -> Outcome {
    let s = load_scenario(file)?;
    let findings = lint_scenario(&s);
    if format == Format::Json {
        print_json(&json!({ "scenario": s.id, "findings": findings }));
    } else {
        for f in &findings {
            println!("{f}");
        }
        let errors = findings.iter().filter(|f| f.severity == Severity::Error).count();
        println!(
            "{}: {errors} error(s), {} warning(s)",
            s.id,
            findings.len() - errors
        );
    }
    if has_errors(&findings) {
        Err(Failure::Invalid(None))
    } else {
        Ok(())
    }
}

fn scenario_verify(file: &Path, format: Format) -> Outcome {
    let s = load_scenario(file)?;
    let v = verify_intended_solution(&s);
    if format == Format::Json {
        print_json(&v);
    } else {
        for f in &v.lint_errors {
            println!("{f}");
        }
        for st in &v.steps {
            let mut line = format!("step {} `{}`", st.step, st.description);
            if !st.unlocked.is_empty() {
                let _ = write!(line, ": unlocks {}", st.unlocked.join(", "));
            }
            if let Some(o) = &st.completed {
                let _ = write!(line, "; completes {o}");
            }
            println!("{line}");
        }
        match &v.failure {
            None => println!("{}: intended solution completes {}", s.id, v.completed_objectives.join(", ")),
            Some(why) => println!("{}: FAILED: {why}", s.id),
        }
    }
    if v.passed {
        Ok(())
    } else {
        Err(Failure::Invalid(None))
    }
}

fn simulate(skill: u32, threshold: i32, proficient: bool, trials: u64, seed: u64, format: Format) -> Outcome {
    if trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    let rolls = Rolls::proficient(proficient);
    let exact = exact_check_probability(skill, threshold, rolls);
    let est = monte_carlo_probability(skill, threshold, rolls, trials, seed);
    let z = (est.estimate - exact.decimal()).abs() / est.standard_error;
    if format == Format::Json {
        print_json(&json!({
            "exact": exact,
            "estimate": est,
            "deviationInStandardErrors": z,
        }));
    } else {
        println!("exact:    {exact}");
        println!(
            "estimate: {}/{} = {:.4} (standard error {:.4})",
            est.successes, est.trials, est.estimate, est.standard_error
        );
        println!("deviation: {z:.2} standard errors");
    }
    Ok(())
}

/// A path, or failing that a session id in the data directory.
fn resolve_log(arg: &str) -> PathBuf {
    let direct = PathBuf::from(arg);
    if direct.exists() {
        return direct;
    }
    if let Some(dir) = std::env::var_os("TASEP_DATA_DIR") {
        let candidate = Path::new(&dir).join("sessions").join(format!("{arg}.jsonl"));
        if candidate.exists() {
            return candidate;
        }
    }
    direct
}

fn summary(state: &SessionState, events: usize) -> String {
    let join = |items: Vec<String>| if items.is_empty() { "none".to_string() } else { items.join(", ") };
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}", state.scenario_id);
    let _ = writeln!(out, "status: {}", serde_json::to_value(state.status).unwrap().as_str().unwrap());
    let _ = writeln!(out, "version: {} ({events} events)", state.version);
    let _ = writeln!(out, "seed: {}", state.seed);
    let _ = writeln!(out, "characters: {}", join(state.characters.keys().cloned().collect()));
    let _ = writeln!(out, "alertness: {} (cap {})", state.alertness, state.failure_cap);
    let _ = writeln!(
        out,
        "revealed floors: {}",
        join(state.revealed_floors.iter().map(|f| f.to_string()).collect())
    );
    let _ = writeln!(out, "knowledge: {}", join(state.knowledge.iter().cloned().collect()));
    let consumed: Vec<String> = state
        .consumed_items
        .iter()
        .flat_map(|(a, items)| items.iter().map(move |i| format!("{a}: {i}")))
        .collect();
    let _ = writeln!(out, "consumed items: {}", join(consumed));
    let _ = writeln!(
        out,
        "objectives completed: {}",
        join(state.completed_objectives.iter().cloned().collect())
    );
    let _ = write!(out, "dice drawn: {}", state.dice_position);
    out
}

fn session_replay(arg: &str, format: Format) -> Outcome {
    let path = resolve_log(arg);
    let text = read(&path)?;
    let records = parse_log(&text).map_err(|e| Failure::Invalid(Some(format!("{}: {e}", path.display()))))?;
    let state = replay(&records).map_err(|e| Failure::Invalid(Some(format!("{}: {e}", path.display()))))?;
    if format == Format::Json {
        print_json(&state);
    } else {
        println!("{}", summary(&state, records.len()));
    }
    Ok(())
}

fn serve(addr: SocketAddr, data_dir: PathBuf, console_dir: Option<PathBuf>) -> Outcome {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Usage(e.to_string()))?;
    let config = tasep_service::Config {
        data_dir,
        addr,
        console_dir,
    };
    runtime
        .block_on(tasep_service::serve(config))
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Outcome {
    let format = cli.format;
    match cli.command {
        Cmd::Character {
            command: CharacterCmd::Validate { file },
        } => character_validate(&file, format),
        Cmd::Probability {
            command:
                ProbabilityCmd::Table {
                    skill_range,
                    threshold,
                    proficient,
                },
        } => probability_table(skill_range, threshold, proficient, format),
        Cmd::Balance {
            command: BalanceCmd::Report,
        } => {
            let r = balance_report();
            if format == Format::Json {
                print_json(&r);
            } else {
                print!("{}", r.render());
            }
            Ok(())
        }
        Cmd::Scenario { command } => match command {
            ScenarioCmd::Lint { file } => scenario_lint(&file, format),
            ScenarioCmd::Verify { file } => scenario_verify(&file, format),
        },
        Cmd::Simulate {
            skill,
            threshold,
            proficient,
            trials,
            seed,
        } => simulate(skill, threshold, proficient, trials, seed, format),
        Cmd::Session {
            command: SessionCmd::Replay { log },
        } => session_replay(&log, format),
        Cmd::Serve {
            addr,
            data_dir,
            console_dir,
        } => serve(addr, data_dir, console_dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            if let Some(m) = msg {
                eprintln!("error: {m}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
