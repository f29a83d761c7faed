use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use dentelle::descent::{self, DescentReport};
use dentelle::scenario::{self, Document, ScenarioFile};
use dentelle::{Error, Gamma};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "dentelle", version, about = "Galois descent for polydiscs and polyannuli")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the obstruction checks without descending.
    Check(RunArgs),
    /// Descend the scenario and print the report.
    Descend(RunArgs),
    /// Write the example gallery.
    Examples {
        dir: Option<PathBuf>,
        #[arg(long, env = "DENTELLE_OUT_DIR", hide_env_values = true)]
        out_dir: Option<PathBuf>,
    },
    /// Expand a generator configuration into scenario files.
    Generate {
        config: PathBuf,
        dir: Option<PathBuf>,
        #[arg(long, env = "DENTELLE_OUT_DIR", hide_env_values = true)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Target precision, e.g. "3^(-20)".
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    json: bool,
    /// Also write each report into this directory.
    #[arg(long, env = "DENTELLE_OUT_DIR", hide_env_values = true)]
    out_dir: Option<PathBuf>,
}

fn load(path: &Path, args: &RunArgs) -> anyhow::Result<ScenarioFile> {
    let src = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut file = scenario::parse_scenario(&src).map_err(|e| match e {
        Error::Parse { line, column, message } => {
            anyhow::anyhow!("{}:{line}:{column}: {message}", path.display())
        }
        other => anyhow::anyhow!("{}: {other}", path.display()),
    })?;
    let scn = file.scenario;
    let eps = match &args.epsilon {
        Some(e) => e.parse::<Gamma>().with_context(|| format!("bad --epsilon `{e}`"))?,
        None => scn.eps.clone(),
    };
    let max_iter = args.max_iter.unwrap_or(scn.max_iter);
    file.scenario = scn.with_precision(eps, max_iter);
    Ok(file)
}

fn report_json(report: &DescentReport) -> Value {
    let point = |p: &Option<Vec<Gamma>>| {
        p.as_ref()
            .map(|p| Value::from(p.iter().map(|g| g.to_string()).collect::<Vec<_>>()))
    };
    let shape = report.shape.as_ref().map(|u| {
        u.vertices()
            .iter()
            .map(|v| v.iter().map(|g| g.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    });
    json!({
        "scenario": report.scenario,
        "verdict": report.verdict.name(),
        "exit_code": report.exit_code(),
        "detail": report.detail,
        "lines": report.lines,
        "radii": point(&report.radii),
        "scale": point(&report.scale),
        "shape_vertices": shape,
        "coordinates": report.coordinates.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
    })
}

fn run_one(path: &Path, args: &RunArgs, descend: bool) -> anyhow::Result<(String, i32)> {
    let file = load(path, args)?;
    let scn = &file.scenario;
    let report = if descend {
        descent::descend(scn)?
    } else {
        descent::check(scn)?
    };
    if descend {
        report
            .reverify(&scn.tower)
            .with_context(|| format!("{}: transcript does not re-verify", path.display()))?;
    }
    let text = if args.json {
        serde_json::to_string_pretty(&report_json(&report))? + "\n"
    } else {
        report.to_string()
    };
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir)?;
        let ext = if args.json { "json" } else { "txt" };
        let stem = path.file_stem().map_or("report".into(), |s| s.to_string_lossy());
        fs::write(dir.join(format!("{stem}.report.{ext}")), &text)?;
    }
    Ok((text, report.exit_code()))
}

fn run(args: &RunArgs, descend: bool) -> i32 {
    let results: Vec<anyhow::Result<(String, i32)>> = std::thread::scope(|s| {
        let handles: Vec<_> = args
            .files
            .iter()
            .map(|p| s.spawn(move || run_one(p, args, descend)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(anyhow::anyhow!("worker panicked"))))
            .collect()
    });
    let mut code = 0;
    let mut failed = false;
    for r in results {
        match r {
            Ok((text, c)) => {
                let _ = io::stdout().write_all(text.as_bytes());
                code = code.max(c);
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                failed = true;
            }
        }
    }
    if failed {
        1
    } else {
        code
    }
}

fn pick_dir(dir: Option<PathBuf>, out_dir: Option<PathBuf>, fallback: &str) -> PathBuf {
    dir.or(out_dir).unwrap_or_else(|| PathBuf::from(fallback))
}

fn examples(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir)?;
    for entry in scenario::gallery() {
        let path = dir.join(entry.file);
        fs::write(&path, &entry.contents)?;
        match entry.expected {
            Some(v) => writeln!(io::stdout(), "{}  ({v})", path.display()),
            None => writeln!(io::stdout(), "{}  (generator)", path.display()),
        }
        .ok();
    }
    Ok(())
}

fn generate(config: &Path, dir: &Path) -> anyhow::Result<()> {
    let src = fs::read_to_string(config).with_context(|| format!("cannot read {}", config.display()))?;
    let Document::Generator(cfg) = scenario::parse_document(&src)? else {
        bail!("{} has no [generator] table", config.display());
    };
    fs::create_dir_all(dir)?;
    for file in scenario::generate(&cfg)? {
        let text = scenario::print_scenario(&file);
        let back = scenario::parse_scenario(&text)?;
        let verdict = descent::check(&back.scenario)?.verdict;
        let path = dir.join(format!("{}.toml", file.scenario.name));
        fs::write(&path, text)?;
        let _ = writeln!(io::stdout(), "{}  ({verdict})", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check(args) => run(&args, false),
        Command::Descend(args) => run(&args, true),
        Command::Examples { dir, out_dir } => match examples(&pick_dir(dir, out_dir, "examples")) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e:#}");
                1
            }
        },
        Command::Generate { config, dir, out_dir } => {
            match generate(&config, &pick_dir(dir, out_dir, "generated")) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    1
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
