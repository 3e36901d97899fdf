use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use loopchart::chart::Label;
use loopchart::{
    bisimilar, chart_of, check_properties, collapse, labeled_onechart_of, lee, onechart_of,
    parse_star_expr, verify_llee, verify_llee_alt, verify_projection, verify_witness, AnyChart,
    CorpusConfig, LeeError, LeeOutcome, LleeVerdict, Lts, MutationTally, StarExpr, DEFAULT_BUDGET,
    DEFAULT_CAP,
};

#[derive(Parser)]
#[command(
    name = "loopchart",
    version,
    about = "Charts of star expressions, loop elimination and bisimulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an expression and print its canonical form.
    Parse { expr: String },
    /// Chart interpretation of an expression.
    Chart(GenArgs),
    /// 1-chart interpretation of an expression.
    Onechart(GenArgs),
    /// Labeled 1-chart interpretation of an expression.
    Labeled(GenArgs),
    /// Induced chart of a 1-chart (from @FILE or an expression).
    Induce {
        input: String,
        /// Drop unreachable vertices.
        #[arg(long)]
        gc: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Search for a successful loop elimination run.
    Lee {
        /// Chart JSON file.
        #[arg(required_unless_present = "expr", conflicts_with = "expr")]
        file: Option<String>,
        /// Use the chart interpretation of this expression.
        #[arg(long)]
        expr: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Check that a labeled chart is a LLEE-witness.
    LleeVerify {
        file: String,
        /// Use the step-wise characterization instead of the definition.
        #[arg(long)]
        alt: bool,
    },
    /// Largest bisimulation between two charts.
    Bisim { left: String, right: String },
    /// Bisimulation collapse of a chart (from @FILE or an expression).
    Collapse {
        input: String,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Projection from the induced 1-chart onto the chart is a functional bisimulation.
    Thm59 {
        expr: String,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// The labeled 1-chart is a LLEE-witness and its elimination strategy succeeds.
    Thm514 {
        expr: String,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Run checks over a seeded random corpus.
    Corpus {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        max_depth: usize,
        #[arg(long, default_value_t = 3)]
        alphabet: usize,
        #[arg(long)]
        cap: Option<usize>,
        /// Comma-separated subset of thm59, thm514, props.
        #[arg(long, value_delimiter = ',', default_value = "thm59,thm514")]
        check: Vec<CorpusCheck>,
    },
}

#[derive(clap::Args)]
struct GenArgs {
    expr: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CorpusCheck {
    Thm59,
    Thm514,
    Props,
}

/// Outcome of a command: printed text and whether the checked property held.
enum Outcome {
    Pass(String),
    Fail(String),
}

type Result<T> = std::result::Result<T, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Pass(out)) => {
            emit(&out);
            ExitCode::SUCCESS
        }
        Ok(Outcome::Fail(out)) => {
            emit(&out);
            ExitCode::from(1)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

// A closed pipe downstream is not an error worth a panic.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn cap_of(flag: Option<usize>) -> Result<usize> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var("LOOPCHART_CAP") {
        Ok(v) => v
            .parse()
            .map_err(|_| format!("LOOPCHART_CAP is not a number: `{v}`")),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

fn expr(text: &str) -> Result<StarExpr> {
    let text = match text.strip_prefix('@') {
        Some(path) => read(path)?,
        None => text.to_string(),
    };
    parse_star_expr(text.trim()).map_err(|e| e.to_string())
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
}

fn chart_file(path: &str) -> Result<AnyChart> {
    let path = path.strip_prefix('@').unwrap_or(path);
    AnyChart::from_json_str(&read(path)?).map_err(|e| format!("{path}: {e}"))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn render<L: Label>(g: &Lts<L>, format: Format) -> String {
    match format {
        Format::Json => g.to_json_string(),
        Format::Dot => g.to_dot(),
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Parse { expr: text } => Ok(Outcome::Pass(expr(&text)?.render())),
        Command::Chart(args) => {
            let g = chart_of(&expr(&args.expr)?, cap_of(args.cap)?).map_err(|e| e.to_string())?;
            Ok(Outcome::Pass(render(&g, args.format)))
        }
        Command::Onechart(args) => {
            let g =
                onechart_of(&expr(&args.expr)?, cap_of(args.cap)?).map_err(|e| e.to_string())?;
            Ok(Outcome::Pass(render(&g, args.format)))
        }
        Command::Labeled(args) => {
            let g = labeled_onechart_of(&expr(&args.expr)?, cap_of(args.cap)?)
                .map_err(|e| e.to_string())?;
            Ok(Outcome::Pass(render(&g, args.format)))
        }
        Command::Induce {
            input,
            gc,
            format,
            cap,
        } => {
            let one = if input.starts_with('@') {
                chart_file(&input)?.to_onechart()
            } else {
                onechart_of(&expr(&input)?, cap_of(cap)?).map_err(|e| e.to_string())?
            };
            let mut induced = one.induce();
            if gc {
                induced = induced.restrict_reachable();
            }
            Ok(Outcome::Pass(render(&induced, format)))
        }
        Command::Lee {
            file,
            expr: text,
            budget,
            cap,
        } => match (file, text) {
            (_, Some(text)) => {
                let g = chart_of(&expr(&text)?, cap_of(cap)?).map_err(|e| e.to_string())?;
                lee_report(&g, budget)
            }
            (Some(file), None) => match chart_file(&file)? {
                AnyChart::Chart(g) => lee_report(&g, budget),
                AnyChart::OneChart(g) => lee_report(&g, budget),
                AnyChart::Labeled(g) => lee_report(&g.erase_markings(), budget),
            },
            (None, None) => Err("give a chart file or --expr".into()),
        },
        Command::LleeVerify { file, alt } => {
            let h = match chart_file(&file)? {
                AnyChart::Labeled(h) => h,
                _ => return Err(format!("{file}: expected a labeled chart")),
            };
            let verdict = if alt {
                verify_llee_alt(&h)
            } else {
                verify_llee(&h)
            };
            Ok(match verdict {
                LleeVerdict::Pass => Outcome::Pass(pretty(&json!({"verdict": "PASS"}))),
                LleeVerdict::Fail(f) => Outcome::Fail(pretty(&json!({
                    "verdict": "FAIL",
                    "condition": f.condition(),
                    "witness": f,
                }))),
            })
        }
        Command::Bisim { left, right } => {
            let relation = match (chart_file(&left)?, chart_file(&right)?) {
                (AnyChart::Chart(a), AnyChart::Chart(b)) => bisimilar(&a, &b),
                (AnyChart::Labeled(a), AnyChart::Labeled(b)) => bisimilar(&a, &b),
                (a, b) => bisimilar(&a.to_onechart(), &b.to_onechart()),
            };
            Ok(match relation {
                Some(r) => Outcome::Pass(r.to_json_string()),
                None => Outcome::Fail(pretty(&json!({"bisimilar": false}))),
            })
        }
        Command::Collapse { input, cap } => {
            let (chart, map) = if input.starts_with('@') {
                match chart_file(&input)? {
                    AnyChart::Chart(g) => collapse_json(&g),
                    AnyChart::OneChart(g) => collapse_json(&g),
                    AnyChart::Labeled(g) => collapse_json(&g),
                }
            } else {
                collapse_json(&chart_of(&expr(&input)?, cap_of(cap)?).map_err(|e| e.to_string())?)
            };
            Ok(Outcome::Pass(pretty(
                &json!({"chart": chart, "map": {"map": map}}),
            )))
        }
        Command::Thm59 { expr: text, cap } => {
            let report =
                verify_projection(&expr(&text)?, cap_of(cap)?).map_err(|e| e.to_string())?;
            let out = pretty(&serde_json::to_value(&report).expect("report serializes"));
            Ok(if report.passed() {
                Outcome::Pass(out)
            } else {
                Outcome::Fail(out)
            })
        }
        Command::Thm514 { expr: text, cap } => {
            let report = verify_witness(&expr(&text)?, cap_of(cap)?).map_err(|e| e.to_string())?;
            let out = pretty(&serde_json::to_value(&report).expect("report serializes"));
            Ok(if report.passed() {
                Outcome::Pass(out)
            } else {
                Outcome::Fail(out)
            })
        }
        Command::Corpus {
            seed,
            count,
            max_depth,
            alphabet,
            cap,
            check,
        } => {
            let config = CorpusConfig {
                seed,
                count,
                max_depth,
                alphabet_size: alphabet,
                vertex_cap: cap_of(cap)?,
            };
            config.validate()?;
            corpus(&config, &check)
        }
    }
}

fn collapse_json<L: Label>(g: &Lts<L>) -> (Value, Value) {
    let (q, map) = collapse(g);
    (
        serde_json::to_value(q.to_json()).expect("chart serializes"),
        serde_json::to_value(map).expect("map serializes"),
    )
}

fn lee_report<L: Label>(g: &Lts<L>, budget: usize) -> Result<Outcome> {
    match lee(g, budget) {
        Ok(LeeOutcome::Success(run)) => Ok(Outcome::Pass(run.to_json_string())),
        Ok(LeeOutcome::Failure { explored }) => Ok(Outcome::Fail(pretty(&json!({
            "verdict": "NO",
            "explored": explored,
        })))),
        Err(LeeError::BudgetExceeded { budget }) => {
            emit(&pretty(&json!({"verdict": "BUDGET", "budget": budget})));
            Err(format!("search budget of {budget} states exceeded"))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn corpus(config: &CorpusConfig, checks: &[CorpusCheck]) -> Result<Outcome> {
    let cap = config.vertex_cap;
    let mut failures = Vec::new();
    let mut tally = MutationTally::default();
    for (index, e) in config.exprs().enumerate() {
        let text = e.render();
        let fail = |check: &str, detail: Value| json!({"index": index, "expr": text, "check": check, "detail": detail});
        let cap_err = |err: loopchart::ChartError| format!("expression {index} `{text}`: {err}");
        if checks.contains(&CorpusCheck::Thm59) {
            let report = verify_projection(&e, cap).map_err(cap_err)?;
            if !report.passed() {
                failures.push(fail(
                    "thm59",
                    serde_json::to_value(&report).expect("serializes"),
                ));
            }
        }
        if checks.contains(&CorpusCheck::Thm514) {
            let report = verify_witness(&e, cap).map_err(cap_err)?;
            if !report.passed() {
                failures.push(fail(
                    "thm514",
                    serde_json::to_value(&report).expect("serializes"),
                ));
            }
        }
        if checks.contains(&CorpusCheck::Props) {
            let report = check_properties(&e, cap, config.seed ^ index as u64).map_err(cap_err)?;
            tally.add(report.mutations);
            if !report.passed() {
                failures.push(fail(
                    "props",
                    serde_json::to_value(&report.failures).expect("serializes"),
                ));
            }
        }
    }
    let mut summary = json!({
        "seed": config.seed,
        "count": config.count,
        "max_depth": config.max_depth,
        "alphabet": config.alphabet_size,
        "failures": failures,
    });
    if checks.contains(&CorpusCheck::Props) {
        summary["mutations"] = serde_json::to_value(tally).expect("serializes");
    }
    let out = pretty(&summary);
    Ok(if failures_empty(&summary) {
        Outcome::Pass(out)
    } else {
        Outcome::Fail(out)
    })
}

fn failures_empty(summary: &Value) -> bool {
    summary["failures"].as_array().is_some_and(|f| f.is_empty())
}
