use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use ckv_core::contact::validate_structure;
use ckv_core::fuzz::{run_campaign, FuzzConfig, DEFAULT_SEED};
use ckv_core::scenario::{load_scenario, run, ChecksSection, ScenarioFile, STRUCTURE_TOL};
use ckv_core::{equality_instance, verify, ConnectionKind, EqualityKind, TheoremId, ValidationReport};

#[derive(Parser)]
#[command(
    name = "ckv",
    version,
    about = "Curvature inequality verifier for submanifolds of contact space forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the contact structure axioms of a scenario.
    Validate { file: PathBuf },
    /// Run theorems on a scenario.
    Verify {
        file: PathBuf,
        /// comma-separated theorem ids, e.g. 3.1,3.3,3.5i
        #[arg(long, value_delimiter = ',')]
        theorems: Option<Vec<String>>,
        #[arg(long)]
        tol: Option<f64>,
        /// one JSON report per line instead of a table
        #[arg(long)]
        json: bool,
        /// also write the full run report here
        #[arg(long)]
        report: Option<PathBuf>,
        /// record wall time in the run report
        #[arg(long)]
        timing: bool,
    },
    /// Seeded campaign over random instances.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, env = "CKV_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        kind: Option<u8>,
        /// directory for report.json and finding files; stdout otherwise
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an equality instance and print its slack.
    Case {
        #[arg(long)]
        id: String,
        /// comma-separated key=value pairs
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Input problems map to exit code 2, everything else that goes wrong to 1.
enum Failure {
    Input(anyhow::Error),
    Other(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Other(e.into())
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(anyhow!("{e}"))
}

type CmdResult = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Verify {
            file,
            theorems,
            tol,
            json,
            report,
            timing,
        } => cmd_verify(&file, theorems, tol, json, report.as_deref(), timing),
        Command::Fuzz {
            count,
            seed,
            n,
            m,
            kind,
            out,
        } => cmd_fuzz(count, seed, n, m, kind, out.as_deref()),
        Command::Case {
            id,
            params,
            n,
            seed,
            out,
        } => cmd_case(&id, &params, n, seed, out.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn print_validation(report: &ValidationReport) {
    for check in &report.checks {
        println!(
            "{:<24} {:>12.3e}  {}",
            check.name,
            check.max_residual,
            if check.pass { "ok" } else { "FAIL" }
        );
    }
}

fn cmd_validate(file: &Path) -> CmdResult {
    let scenario = load_scenario(file).map_err(input)?;
    let built = scenario.build().map_err(input)?;
    let report = validate_structure(&built.model, STRUCTURE_TOL).map_err(input)?;
    print_validation(&report);
    let pass = report.pass();
    if !pass {
        let names: Vec<&str> = report.failing().map(|c| c.name.as_str()).collect();
        println!("failing axioms: {}", names.join(", "));
    }
    Ok(pass)
}

fn cmd_verify(
    file: &Path,
    theorems: Option<Vec<String>>,
    tol: Option<f64>,
    json: bool,
    report_path: Option<&Path>,
    timing: bool,
) -> CmdResult {
    let start = Instant::now();
    let scenario = load_scenario(file).map_err(input)?;
    let mut built = scenario.build().map_err(input)?;
    if let Some(tol) = tol {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(input(format!("--tol must be finite and nonnegative, got {tol}")));
        }
        built.args.tol = Some(tol);
    }
    let ids = match theorems {
        Some(list) => list
            .iter()
            .map(|s| s.trim().parse::<TheoremId>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(input)?,
        None => built.selected_theorems(),
    };
    // kind mismatches and missing arguments surface here as input errors
    let mut report = run(&built, &ids).map_err(input)?;
    if timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if json {
        for v in &report.verdicts {
            writeln!(out, "{}", serde_json::to_string(v)?)?;
        }
    } else {
        writeln!(
            out,
            "{:<8} {:>16} {:>16} {:>14}  holds",
            "theorem", "lhs", "rhs", "slack"
        )?;
        for v in &report.verdicts {
            writeln!(
                out,
                "{:<8} {:>16.6} {:>16.6} {:>14.6}  {}",
                v.theorem_id.as_str(),
                v.lhs,
                v.rhs,
                v.slack + 0.0,
                if v.holds { "yes" } else { "NO" }
            )?;
        }
        if !report.validation.pass() {
            let names: Vec<&str> = report.validation.failing().map(|c| c.name.as_str()).collect();
            writeln!(out, "structure axioms failing: {}", names.join(", "))?;
        }
        let cc = &report.cross_check;
        writeln!(
            out,
            "cross-check: max residual {:.3e}, Q min {:.3e}  {}",
            cc.max_residual(),
            cc.q_min,
            if cc.pass { "ok" } else { "FAIL" }
        )?;
    }
    if let Some(path) = report_path {
        fs::write(path, serde_json::to_string_pretty(&report)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(report.verdicts.iter().all(|v| v.holds) && report.validation.pass() && report.cross_check.pass)
}

fn cmd_fuzz(
    count: usize,
    seed: u64,
    n: Option<usize>,
    m: Option<usize>,
    kind: Option<u8>,
    out: Option<&Path>,
) -> CmdResult {
    let kind = kind.map(|k| {
        if k == 1 {
            ConnectionKind::First
        } else {
            ConnectionKind::Second
        }
    });
    let config = FuzzConfig {
        count,
        seed,
        n,
        m,
        kind,
    };
    config.check().map_err(input)?;
    let report = run_campaign(&config);
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            fs::write(dir.join("report.json"), &text)?;
            for f in &report.findings {
                fs::write(
                    dir.join(format!("finding-{}.json", f.index)),
                    f.minimized.to_json_pretty() + "\n",
                )?;
                fs::write(
                    dir.join(format!("finding-{}-original.json", f.index)),
                    f.scenario.to_json_pretty() + "\n",
                )?;
            }
            println!("instances: {}", report.instances);
            for (key, s) in &report.checks {
                println!(
                    "{key:<12} runs {:>6}  min slack {:>12.4e}  failures {}",
                    s.runs, s.min_slack, s.failures
                );
            }
            let max_res = report.max_residuals.values().copied().fold(0.0, f64::max);
            println!("max cross-check residual {max_res:.3e}, min Q {:.3e}", report.min_q);
            println!("findings: {}", report.findings.len());
            for f in &report.findings {
                println!("  instance {}: {}", f.index, f.failed.join(", "));
            }
        }
        None => print!("{text}"),
    }
    Ok(report.pass())
}

fn parse_params(text: &str) -> Result<BTreeMap<String, f64>, Failure> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| input(format!("expected key=value, got `{item}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| input(format!("parameter `{}` is not a number", k.trim())))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

fn cmd_case(id: &str, params: &str, n: usize, seed: u64, out: Option<&Path>) -> CmdResult {
    let kind: EqualityKind = id.parse().map_err(input)?;
    let params = parse_params(params)?;
    let case = equality_instance(kind, n, &params, seed).map_err(input)?;
    let verdict = verify(&case.sub, case.theorem, &case.args).map_err(input)?;
    if let Some(path) = out {
        let checks = ChecksSection {
            theorems: vec![case.theorem.to_string()],
            plane: case.plane_indices,
            x: case.args.x.as_ref().map(|x| x.iter().copied().collect()),
            k: case.args.k,
            tol: None,
            alternate_lambda: false,
        };
        let file = ScenarioFile::from_point(&case.sub, checks);
        fs::write(path, file.to_json_pretty() + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    println!("theorem {}  slack {:.3e}", case.theorem, verdict.slack + 0.0);
    let tol = 1e-6 * (1.0 + verdict.lhs.abs() + verdict.rhs.abs());
    Ok(verdict.slack.abs() <= tol)
}
