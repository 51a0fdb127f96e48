mod analysis;
mod config;
mod error;
mod files;
mod report;
mod spec;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pexp::generators::GroundTruth;
use pexp::FilterBank;

use config::{AnalysisConfig, Overrides};
use error::CliResult;
use report::{Report, Status};
use spec::{Data, GeneratorSpec};

/// Wavelet p-exponent, lacunarity and multifractal spectrum estimation.
#[derive(Debug, Parser)]
#[command(name = "pexp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic signal or coefficient field with its ground truth.
    Synth {
        /// Output directory.
        #[arg(long, short, global = true, default_value = ".")]
        out: PathBuf,
        #[command(subcommand)]
        generator: GeneratorSpec,
    },
    /// Run the estimation pipeline and write CSV tables plus report.json.
    Analyze {
        /// JSON config; flags override its keys.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Box<Overrides>,
    },
    /// Re-evaluate the checks of a report against a ground-truth file.
    Report {
        #[arg(long)]
        compare: PathBuf,
        #[arg(long, default_value = "out/report.json")]
        report: PathBuf,
        /// Write the re-evaluated report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn synth(out: &Path, spec: &GeneratorSpec) -> CliResult<Status> {
    let g = spec.generate()?;
    let mut written = Vec::new();
    match &g.data {
        Data::Signal(s) => written.push(files::write_signal(out, "signal", s, Some(spec))?),
        Data::Field(f) => {
            let bank = FilterBank::default();
            written.push(files::write_field(out, "field", f, None, Some(spec))?);
            let s = pexp::wavelet::synthesize(f, &bank)?;
            written.push(files::write_signal(out, "signal", &s, Some(spec))?);
        }
    }
    written.push(files::write_truth(out, &g.truth)?);
    for path in written {
        println!("{}", path.display());
    }
    Ok(Status::Pass)
}

fn print_checks(report: &Report) {
    for c in &report.checks {
        println!("{}", c.line());
    }
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    println!(
        "{}: {} checks, {} failed",
        if report.status == Status::Pass {
            "pass"
        } else {
            "fail"
        },
        report.checks.len(),
        failed
    );
}

fn analyze(config_path: Option<&Path>, overrides: Overrides) -> CliResult<Status> {
    let config = AnalysisConfig::load(config_path, overrides)?;
    let outcome = analysis::run(&config)?;
    let dir = &config.output;
    for (name, table) in &outcome.tables {
        files::write_atomic(&dir.join(name), table.to_csv().as_bytes())?;
    }
    files::write_json(&dir.join("report.json"), &outcome.report)?;
    for w in &outcome.report.warnings {
        eprintln!("warning: {w}");
    }
    print_checks(&outcome.report);
    Ok(outcome.report.status)
}

fn compare(truth: &Path, report: &Path, out: Option<&Path>) -> CliResult<Status> {
    let truth: GroundTruth = files::read_json(truth)?;
    let mut rep: Report = files::read_json(report)?;
    if rep.schema != report::SCHEMA || rep.schema_version != report::SCHEMA_VERSION {
        return Err(error::CliError::usage(format!(
            "{}: unsupported report schema {} v{}",
            report.display(),
            rep.schema,
            rep.schema_version
        )));
    }
    rep.recheck(&truth);
    if let Some(path) = out {
        files::write_json(path, &rep)?;
    }
    print_checks(&rep);
    Ok(rep.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth { out, generator } => synth(&out, &generator),
        Command::Analyze { config, overrides } => analyze(config.as_deref(), *overrides),
        Command::Report {
            compare: truth,
            report,
            out,
        } => compare(&truth, &report, out.as_deref()),
    };
    match result {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("pexp: {e}");
            e.exit_code()
        }
    }
}
