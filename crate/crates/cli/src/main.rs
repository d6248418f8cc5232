use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rheight::numerics::LambdaGrid;
use rheight::varchenko::DEFAULT_STEP_BUDGET;
use rheight_cli::commands::{
    cmd_analyze, cmd_decay, cmd_diagram, cmd_knapp, cmd_trace, parse_input, threads_from_env, EXIT_OK, EXIT_USAGE,
};
use rheight_cli::parse::strip_comments;
use rheight_cli::{CliError, Options, Output};

#[derive(Parser)]
#[command(name = "rheight", version, about = "Newton-polyhedron heights and restriction exponents of polynomial surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: distance, heights, adapted coordinates, r-height, p_c', class, Knapp certificates.
    Analyze(Common),
    /// SVG Newton diagram.
    Diagram(Common),
    /// Knapp certificates.
    Knapp(Common),
    /// Decay fits as JSON lines; pass `catalogue` for the built-in catalogue.
    Decay(Common),
    /// Fine-splitting forest.
    Trace(Common),
}

#[derive(Args)]
struct Common {
    /// Expression such as "(x2 - x1^2)^5", or a file containing one.
    input: String,
    /// Write JSON here instead of stdout.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Write SVG here (diagram prints to stdout otherwise).
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    #[arg(long, default_value_t = 1e2)]
    lambda_min: f64,
    #[arg(long, default_value_t = 1e5)]
    lambda_max: f64,
    #[arg(long, default_value_t = 40)]
    points: usize,
    /// Step budget for adapted coordinates and fine splitting.
    #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
    max_steps: usize,
    /// Truncation order for the normal-form series.
    #[arg(long)]
    series_order: Option<usize>,
}

fn read_input(arg: &str) -> Result<String, CliError> {
    let p = Path::new(arg);
    if p.is_file() {
        let text = fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{arg}: {e}")))?;
        Ok(strip_comments(&text))
    } else {
        Ok(arg.to_string())
    }
}

fn write_out(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, body).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, (CliError, Option<PathBuf>)> {
    let (cmd, c): (fn(&str, &Options) -> Result<Output, CliError>, Common) = match cli.command {
        Command::Analyze(c) => (|s, o| cmd_analyze(&parse_input(s)?, o), c),
        Command::Diagram(c) => (|s, o| cmd_diagram(&parse_input(s)?, o), c),
        Command::Knapp(c) => (|s, o| cmd_knapp(&parse_input(s)?, o), c),
        Command::Decay(c) => (cmd_decay, c),
        Command::Trace(c) => (|s, o| cmd_trace(&parse_input(s)?, o), c),
    };
    let fail = |e: CliError| (e, c.json.clone());
    let grid = LambdaGrid::new(c.lambda_min, c.lambda_max, c.points).map_err(|e| fail(e.into()))?;
    let opts = Options { max_steps: c.max_steps, series_order: c.series_order, grid };
    let text = read_input(&c.input).map_err(fail)?;
    let out = cmd(&text, &opts).map_err(fail)?;
    if let Some(j) = &out.json {
        write_out(c.json.as_deref(), j).map_err(fail)?;
    }
    if let Some(s) = &out.svg {
        match (&c.svg, &out.json) {
            (Some(p), _) => write_out(Some(p), s).map_err(fail)?,
            (None, None) => write_out(None, s).map_err(fail)?,
            (None, Some(_)) => {}
        }
    }
    Ok(out.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK } as u8);
        }
    };
    if let Some(n) = threads_from_env() {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err((e, json)) => {
            eprintln!("error: {e}");
            let doc = serde_json::to_string_pretty(&e.document()).expect("serializable") + "\n";
            if let Some(p) = json {
                let _ = fs::write(p, &doc);
            } else {
                print!("{doc}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
