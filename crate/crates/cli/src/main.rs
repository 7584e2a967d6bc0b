//! `ogk`: load a textual game description, translate it, and solve for Nash
//! equilibria by the compositional method, the brute-force search, or both.
//!
//! Exit codes: 0 success, 1 parse/validation failure, 2 enumeration cap
//! exceeded, 3 method disagreement from `check`.

mod output;

use clap::{Parser, Subcommand, ValueEnum};
use ogk::error::Error as OgkError;
use ogk::gamefile::{self, GameDoc};
use ogk::gen::{self, TreeGenConfig};
use ogk::solve::{self, Method, SolveReport};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_INVALID: u8 = 1;
const EXIT_CAP: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(name = "ogk", version, about = "Compositional game solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodFlag {
    Compositional,
    Oracle,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFlag {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game file and report its equilibria.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "compositional")]
        method: MethodFlag,
        #[arg(long, value_enum, default_value = "text")]
        output: OutputFlag,
        /// Enumeration cap (overrides the OGK_CAP environment variable).
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Solve by both methods and compare the equilibrium sets exactly.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        output: OutputFlag,
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Summarize a game file: players, strategy counts, profile/path counts.
    Info {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        output: OutputFlag,
    },
    /// Play one labelled strategy profile and report the path and payoffs.
    Play {
        file: PathBuf,
        /// Profile, e.g. "p1=L;p2=L,R" (one move per decision point).
        #[arg(long)]
        profile: String,
    },
    /// Emit random valid game files (fuzzing helper).
    #[command(hide = true)]
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Directory to write into; stdout when omitted (count must be 1).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        players: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve { file, method, output, cap } => cmd_solve(&file, method, output, cap),
        Command::Check { file, output, cap } => cmd_check(&file, output, cap),
        Command::Info { file, output } => cmd_info(&file, output),
        Command::Play { file, profile } => cmd_play(&file, &profile),
        Command::Gen { seed, count, out, players } => cmd_gen(seed, count, out, players),
    };
    ExitCode::from(code)
}

fn effective_cap(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("OGK_CAP").ok().and_then(|v| v.parse().ok())
    })
    .unwrap_or(ogk::DEFAULT_ENUM_CAP)
}

fn load(path: &Path) -> Result<GameDoc, u8> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(EXIT_INVALID);
        }
    };
    match gamefile::parse(&text) {
        Ok((doc, warnings)) => {
            for w in warnings {
                eprintln!("{w}");
            }
            Ok(doc)
        }
        Err(diags) => {
            for d in diags {
                eprintln!("{d}");
            }
            Err(EXIT_INVALID)
        }
    }
}

fn solve_or_exit(doc: &GameDoc, method: Method, cap: u64) -> Result<SolveReport, u8> {
    match solve::solve(doc, method, cap) {
        Ok(report) => Ok(report),
        Err(OgkError::CapExceeded { needed, cap }) => {
            eprintln!("error: enumeration of {needed} values exceeds cap {cap}");
            Err(EXIT_CAP)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(EXIT_INVALID)
        }
    }
}

fn cmd_solve(path: &Path, method: MethodFlag, output: OutputFlag, cap: Option<u64>) -> u8 {
    let doc = match load(path) {
        Ok(doc) => doc,
        Err(code) => return code,
    };
    let cap = effective_cap(cap);
    let methods: &[Method] = match method {
        MethodFlag::Compositional => &[Method::Compositional],
        MethodFlag::Oracle => &[Method::Oracle],
        MethodFlag::Both => &[Method::Compositional, Method::Oracle],
    };
    let mut reports = Vec::new();
    for &m in methods {
        match solve_or_exit(&doc, m, cap) {
            Ok(r) => reports.push(r),
            Err(code) => return code,
        }
    }
    match output {
        OutputFlag::Text => {
            for r in &reports {
                output::print_report_text(r);
            }
        }
        OutputFlag::Json => {
            let rendered: Vec<serde_json::Value> =
                reports.iter().map(output::report_json).collect();
            let doc = if rendered.len() == 1 {
                rendered.into_iter().next().unwrap()
            } else {
                serde_json::Value::Array(rendered)
            };
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    EXIT_OK
}

fn cmd_check(path: &Path, output: OutputFlag, cap: Option<u64>) -> u8 {
    let doc = match load(path) {
        Ok(doc) => doc,
        Err(code) => return code,
    };
    let cap = effective_cap(cap);
    let compositional = match solve_or_exit(&doc, Method::Compositional, cap) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let oracle = match solve_or_exit(&doc, Method::Oracle, cap) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let diff = solve::diff_reports(&compositional, &oracle);
    match output {
        OutputFlag::Text => {
            if diff.is_empty() {
                println!(
                    "check ok: {} equilibria agree ({} profiles searched)",
                    compositional.equilibria.len(),
                    compositional.counts.profiles
                );
            } else {
                println!("check FAILED: methods disagree");
                for line in &diff {
                    println!("  {line}");
                }
            }
        }
        OutputFlag::Json => {
            let value = serde_json::json!({
                "agree": diff.is_empty(),
                "diff": diff,
                "compositional": output::report_json(&compositional),
                "oracle": output::report_json(&oracle),
            });
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
        }
    }
    if diff.is_empty() { EXIT_OK } else { EXIT_MISMATCH }
}

fn cmd_info(path: &Path, output: OutputFlag) -> u8 {
    let doc = match load(path) {
        Ok(doc) => doc,
        Err(code) => return code,
    };
    let counts = match solve::info(&doc) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    match output {
        OutputFlag::Text => output::print_info_text(&doc, &counts),
        OutputFlag::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&output::info_json(&doc, &counts)).unwrap()
            );
        }
    }
    EXIT_OK
}

fn cmd_play(path: &Path, profile: &str) -> u8 {
    let doc = match load(path) {
        Ok(doc) => doc,
        Err(code) => return code,
    };
    let assignment = match solve::parse_assignment(profile) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    match solve::play_labelled(&doc, &assignment) {
        Ok((path_labels, payoffs)) => {
            if path_labels.is_empty() {
                println!("path: (empty)");
            } else {
                println!("path: {}", path_labels.join(" "));
            }
            let rendered: Vec<String> =
                payoffs.iter().map(|(p, v)| format!("{p}:{v}")).collect();
            println!("payoff: ({})", rendered.join(", "));
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

fn cmd_gen(seed: u64, count: u64, out: Option<PathBuf>, players: usize) -> u8 {
    let cfg = TreeGenConfig { players, ..TreeGenConfig::default() };
    if let Some(dir) = out {
        if let Err(e) = std::fs::create_dir_all(&dir) {
            eprintln!("error: cannot create {}: {e}", dir.display());
            return EXIT_INVALID;
        }
        for i in 0..count {
            let doc = gen::gen_doc(seed + i, &cfg);
            let path = dir.join(format!("gen_{:04}.game", seed + i));
            if let Err(e) = std::fs::write(&path, gamefile::print(&doc)) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_INVALID;
            }
            println!("{}", path.display());
        }
    } else {
        if count != 1 {
            eprintln!("error: --count > 1 requires --out");
            return EXIT_INVALID;
        }
        print!("{}", gamefile::print(&gen::gen_doc(seed, &cfg)));
    }
    EXIT_OK
}
