use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use msr_core::MonomialOrder;
use msr_scenario::ast::{Query, QueryKind, Statement, StatementKind};
use msr_scenario::builtins::{builtin_source, multicotangent_source};
use msr_scenario::model::analyze;
use msr_scenario::parser::parse;
use msr_scenario::run::{run_model, Report};
use msr_scenario::{ScenarioError, Span};

#[derive(Parser)]
#[command(
    name = "msr",
    version,
    about = "Check reduction scenarios for multisymplectic observables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Lex,
    Grevlex,
}

impl From<Order> for MonomialOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::Lex => MonomialOrder::Lex,
            Order::Grevlex => MonomialOrder::GrevLex,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every query of a scenario file.
    Run {
        file: PathBuf,
        /// Print the verdicts as JSON.
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, default_value = "grevlex")]
        order: Order,
    },
    /// Print a built-in scenario, or run it with --run.
    Builtin {
        name: String,
        #[arg(long)]
        run: bool,
        #[arg(long)]
        json: bool,
        /// Form degree of the multicotangent builtin.
        #[arg(long)]
        n: Option<usize>,
        /// Base dimension of the multicotangent builtin.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, value_enum, default_value = "grevlex")]
        order: Order,
    },
    /// Check the higher Jacobi identities on the sample of a scenario.
    CheckJacobi {
        file: PathBuf,
        #[arg(long)]
        arity: u32,
        /// Random combinations per arity.
        #[arg(long)]
        random: Option<u32>,
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, default_value = "grevlex")]
        order: Order,
    },
}

enum Failure {
    Io(String),
    Scenario(ScenarioError, Option<String>),
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn run_text(
    src: &str,
    name: Option<&str>,
    order: MonomialOrder,
    only_jacobi: Option<(u32, Option<u32>)>,
) -> Result<Report, Failure> {
    let with_src = |e: ScenarioError| Failure::Scenario(e, Some(src.to_string()));
    let mut scenario = parse(src).map_err(with_src)?;
    if let Some((arity, random)) = only_jacobi {
        scenario
            .statements
            .retain(|s| !matches!(s.kind, StatementKind::Query(_)));
        scenario.statements.push(Statement {
            kind: StatementKind::Query(Query {
                expect: true,
                kind: QueryKind::Jacobi { arity, random },
            }),
            span: Span::default(),
        });
    }
    let model = analyze(&scenario, order).map_err(with_src)?;
    Ok(run_model(&model, name))
}

fn emit(report: &Report, json: bool) -> ExitCode {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(report).expect("verdicts serialize")
        );
    } else {
        print!("{}", report.to_text());
    }
    ExitCode::from(report.exit_code() as u8)
}

fn source_line(src: &str, line: u32) -> Option<&str> {
    src.lines().nth(line.checked_sub(1)? as usize)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { file, json, order } => read(&file).and_then(|src| {
            let name = file.file_stem().map(|s| s.to_string_lossy().into_owned());
            run_text(&src, name.as_deref(), order.into(), None).map(|r| emit(&r, json))
        }),
        Command::Builtin {
            name,
            run,
            json,
            n,
            dim,
            order,
        } => {
            let src = if name == "multicotangent" && (n.is_some() || dim.is_some()) {
                let (dn, ddim) = msr_scenario::builtins::MULTICOTANGENT_DEFAULT;
                multicotangent_source(n.unwrap_or(dn), dim.unwrap_or(ddim))
            } else {
                builtin_source(&name)
            };
            match src {
                Err(e) => Err(Failure::Scenario(e, None)),
                Ok(src) if run => {
                    run_text(&src, Some(&name), order.into(), None).map(|r| emit(&r, json))
                }
                Ok(src) => {
                    print!("{src}");
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::CheckJacobi {
            file,
            arity,
            random,
            json,
            order,
        } => read(&file).and_then(|src| {
            let name = file.file_stem().map(|s| s.to_string_lossy().into_owned());
            run_text(&src, name.as_deref(), order.into(), Some((arity, random)))
                .map(|r| emit(&r, json))
        }),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Scenario(e, src)) => {
            eprintln!("error: {e}");
            if let (Some(span), Some(src)) = (e.span(), src) {
                if let Some(line) = source_line(&src, span.line) {
                    eprintln!("  | {line}");
                    eprintln!(
                        "  | {}^",
                        " ".repeat(span.column.saturating_sub(1) as usize)
                    );
                }
            }
            ExitCode::from(2)
        }
    }
}
