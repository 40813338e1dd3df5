//! The `pcsp` command line.
//!
//! ```text
//! pcsp solve  FILE [--order v1,v2,..] [--heuristic H] [--value-order V]
//!                  [--alpha A] [--beta B] [--all-best] [--forward-check]
//!                  [--node-limit N] [--trace] [--json]
//! pcsp ac     FILE [--gamma G] [--output OUT] [--json]
//! pcsp oracle FILE [--all-best] [--budget N] [--json]
//! pcsp check  FILE [--json]
//! ```
//!
//! `FILE` may be `menu` or `queens:<n>` to use a built-in problem.
//! Exit status: 0 on success, 1 on usage, parse or validation errors, 2 when
//! the search proves no labeling exceeds `--alpha`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::io::{builtin_menu, builtin_queens, parse_problem, write_problem};
use crate::model::{Labeling, Problem};
use crate::oracle::enumerate_best_with_budget;
use crate::propagate::enforce_ac;
use crate::search::{solve_traced, Heuristic, SearchOptions, Status, ValueOrder};

#[derive(Parser, Debug)]
#[command(name = "pcsp", version, about = "Possibilistic constraint satisfaction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Branch and bound search for the consistency degree and best labelings.
    Solve(SolveArgs),
    /// Possibilistic arc-consistency.
    Ac(AcArgs),
    /// Exhaustive enumeration of all complete labelings.
    Oracle(OracleArgs),
    /// Parse and validate a problem file.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct Input {
    /// Problem file, or `menu` / `queens:<n>` for a built-in problem.
    file: String,
    /// Print a JSON report instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    input: Input,
    /// Explicit variable order, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "heuristic")]
    order: Option<Vec<String>>,
    #[arg(long, value_parser = parse_tag::<Heuristic>)]
    heuristic: Option<Heuristic>,
    #[arg(long, value_parser = parse_tag::<ValueOrder>)]
    value_order: Option<ValueOrder>,
    /// Initial cutoff floor.
    #[arg(long, default_value = "0", value_parser = parse_tag::<Degree>)]
    alpha: Degree,
    /// Sufficiency ceiling.
    #[arg(long, default_value = "1", value_parser = parse_tag::<Degree>)]
    beta: Degree,
    #[arg(long)]
    all_best: bool,
    #[arg(long)]
    forward_check: bool,
    #[arg(long)]
    node_limit: Option<u64>,
    /// Print one line per expanded node.
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug)]
struct AcArgs {
    #[command(flatten)]
    input: Input,
    /// Install only inferences with at least this necessity.
    #[arg(long, default_value = "0", value_parser = parse_tag::<Degree>)]
    gamma: Degree,
    /// Write the closed problem here.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    all_best: bool,
    /// Maximum number of complete labelings to enumerate.
    #[arg(long, default_value_t = crate::oracle::DEFAULT_BUDGET)]
    budget: u128,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    input: Input,
}

fn parse_tag<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Structured form of one invocation.
#[derive(Serialize, Debug)]
pub struct RunReport {
    pub command: Vec<String>,
    pub input: InputDigest,
    pub result: Value,
    pub exit_code: i32,
}

#[derive(Serialize, Debug)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

struct Loaded {
    problem: Problem,
    digest: InputDigest,
}

fn load(file: &str) -> Result<Loaded, String> {
    let text = if file == "menu" {
        crate::io::MENU_PCSP.to_string()
    } else if let Some(n) = file.strip_prefix("queens:") {
        let n: usize = n.parse().map_err(|_| format!("bad queens size `{n}`"))?;
        if n == 0 {
            return Err("queens size must be positive".into());
        }
        write_problem(&builtin_queens(n))
    } else {
        std::fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))?
    };
    let problem = if file == "menu" {
        builtin_menu()
    } else {
        parse_problem(&text).map_err(|e| format!("{file}: {e}"))?
    };
    Ok(Loaded {
        problem,
        digest: InputDigest {
            path: file.to_string(),
            sha256: hex::encode(Sha256::digest(text.as_bytes())),
        },
    })
}

fn labeling_json(p: &Problem, l: &Labeling) -> Value {
    let map: Map<String, Value> = p
        .variables()
        .iter()
        .filter_map(|v| l.get(v.name()).map(|lab| (v.name().to_string(), json!(lab.as_str()))))
        .collect();
    Value::Object(map)
}

/// Human output lines, the JSON payload, and the exit code.
struct Outcome {
    lines: Vec<String>,
    notes: Vec<String>,
    result: Value,
    exit_code: i32,
}

fn cmd_solve(p: &Problem, a: &SolveArgs) -> Result<Outcome> {
    let mut opts = SearchOptions::default()
        .with_cutoffs(a.alpha, a.beta)?
        .all_best(a.all_best)
        .forward_check(a.forward_check);
    if let Some(order) = &a.order {
        opts = opts.order(order.iter().map(|s| s.trim().to_string()));
    }
    if let Some(h) = a.heuristic {
        opts = opts.heuristic(h);
    }
    if let Some(v) = a.value_order {
        opts = opts.value_order(v);
    }
    if let Some(n) = a.node_limit {
        opts = opts.node_limit(n);
    }
    let mut trace = Vec::new();
    let result = solve_traced(p, &opts, &mut |e| {
        if a.trace {
            trace.push(e.to_string());
        }
    })?;

    let mut lines = trace.clone();
    let exit_code = if result.status == Status::AlphaPruned {
        lines.push(format!("no labeling with compatibility above {}", a.alpha));
        2
    } else {
        lines.push(format!("consistency {}", result.best_value));
        lines.extend(result.best_labelings.iter().map(|l| p.format_labeling(l)));
        0
    };
    if result.status != Status::Optimal {
        lines.push(format!("status {}", result.status));
    }
    let payload = json!({
        "consistency": result.best_value,
        "status": result.status,
        "labelings": result.best_labelings.iter().map(|l| labeling_json(p, l)).collect::<Vec<_>>(),
        "nodes_expanded": result.nodes_expanded,
        "cutoffs": result.cutoffs,
        "trace": trace,
    });
    Ok(Outcome {
        lines,
        notes: vec![format!("nodes {} cutoffs {}", result.nodes_expanded, result.cutoffs)],
        result: payload,
        exit_code,
    })
}

fn cmd_ac(p: &Problem, a: &AcArgs) -> Result<Outcome, String> {
    let r = enforce_ac(p, a.gamma).map_err(|e| e.to_string())?;
    let mut lines = vec![format!("delta {}", r.delta)];
    lines.extend(
        r.inferences
            .iter()
            .map(|i| format!("forbid {}={} necessity {}", i.variable, i.label, i.necessity)),
    );
    if let Some(path) = &a.output {
        std::fs::write(path, write_problem(&r.closed_problem)).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let payload = json!({
        "delta": r.delta,
        "arc_consistent": r.arc_consistent,
        "rounds": r.rounds,
        "inferences": r.inferences,
        "output": a.output.as_ref().map(|p| p.display().to_string()),
    });
    Ok(Outcome {
        lines,
        notes: vec![format!("rounds {}", r.rounds)],
        result: payload,
        exit_code: 0,
    })
}

fn cmd_oracle(p: &Problem, a: &OracleArgs) -> Result<Outcome> {
    let best = enumerate_best_with_budget(p, a.budget)?;
    let mut lines = vec![format!("consistency {}", best.consistency)];
    let mut payload = json!({
        "consistency": best.consistency,
        "best_count": best.labelings.len(),
    });
    if a.all_best {
        lines.extend(best.labelings.iter().map(|l| p.format_labeling(l)));
        payload["labelings"] = best.labelings.iter().map(|l| labeling_json(p, l)).collect();
    }
    Ok(Outcome {
        lines,
        notes: Vec::new(),
        result: payload,
        exit_code: 0,
    })
}

fn cmd_check(p: &Problem) -> Outcome {
    Outcome {
        lines: vec![
            format!("problem {}", p.name()),
            format!("variables {}", p.variables().len()),
            format!("constraints {}", p.constraints().len()),
            format!("max-arity {}", p.max_arity()),
        ],
        notes: Vec::new(),
        result: json!({
            "problem": p.name(),
            "variables": p.variables().len(),
            "constraints": p.constraints().len(),
            "max_arity": p.max_arity(),
        }),
        exit_code: 0,
    }
}

/// Runs one invocation. `args` includes the program name. Returns the exit code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return code;
        }
    };
    let input = match &cli.command {
        Command::Solve(a) => &a.input,
        Command::Ac(a) => &a.input,
        Command::Oracle(a) => &a.input,
        Command::Check(a) => &a.input,
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();

    let outcome = load(&input.file).and_then(|loaded| {
        let outcome = match &cli.command {
            Command::Solve(a) => cmd_solve(&loaded.problem, a).map_err(|e| e.to_string()),
            Command::Ac(a) => cmd_ac(&loaded.problem, a),
            Command::Oracle(a) => cmd_oracle(&loaded.problem, a).map_err(|e| e.to_string()),
            Command::Check(_) => Ok(cmd_check(&loaded.problem)),
        }?;
        Ok((loaded.digest, outcome))
    });

    match outcome {
        Err(message) => {
            if input.json {
                let report = json!({ "command": echo, "error": message, "exit_code": 1 });
                let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&report).expect("plain json"));
            }
            let _ = writeln!(stderr, "error: {message}");
            1
        }
        Ok((digest, outcome)) => {
            if input.json {
                let report = RunReport {
                    command: echo,
                    input: digest,
                    result: outcome.result,
                    exit_code: outcome.exit_code,
                };
                let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&report).expect("plain json"));
            } else {
                for line in &outcome.lines {
                    let _ = writeln!(stdout, "{line}");
                }
                for note in &outcome.notes {
                    let _ = writeln!(stderr, "{note}");
                }
            }
            outcome.exit_code
        }
    }
}
