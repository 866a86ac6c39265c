//! `embed`: runs the tree-product embedding pipeline and its verification suites.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use treeprod::metric_space::SpaceKind;
use treeprod::pipeline::{
    run, summary_lines, verify, write_artifacts, write_report, CoveringSource, PipelineConfig, SpaceSource, Suite,
};
use treeprod::rational::parse_rational;
use treeprod::Error;

#[derive(Parser)]
#[command(name = "embed", version, about = "Quasi-isometric embeddings into products of trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build every stage, verify it and write all artifacts.
    Run(Common),
    /// Run one verification suite and write report.json.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// Write graph, trees, covering and embedding dumps.
    Export(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Cantor,
    Circle,
    Grid,
}

#[derive(Args)]
struct Common {
    /// Shipped parameter set: cantor, circle or grid.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_enum)]
    space: Option<SpaceArg>,
    /// Distance matrix CSV: first line n, then n rows.
    #[arg(long, conflicts_with = "space")]
    space_file: Option<PathBuf>,
    /// Cantor depth.
    #[arg(long)]
    depth: Option<u32>,
    /// Circle points or grid side.
    #[arg(long)]
    n: Option<u32>,
    /// Scale parameter as p/q or a decimal.
    #[arg(long)]
    r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    max_level: Option<i32>,
    /// Diary constant; defaults to 15|C| + 1.
    #[arg(long, conflicts_with = "research_kappa")]
    kappa: Option<usize>,
    /// Diary constant allowed below 15|C| + 1.
    #[arg(long)]
    research_kappa: Option<usize>,
    /// Number of covering colors for shifted families.
    #[arg(long)]
    colors: Option<usize>,
    /// Covering sequence JSON, as written by export.
    #[arg(long)]
    covering_file: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn config(&self) -> Result<PipelineConfig, Error> {
        let mut config = match (&self.preset, self.space, &self.space_file) {
            (Some(name), None, None) => PipelineConfig::preset(name)?,
            (Some(_), _, _) => return Err(Error::Config("--preset cannot be combined with --space".into())),
            (None, Some(space), None) => {
                let kind = match space {
                    SpaceArg::Cantor => SpaceKind::Cantor { depth: self.depth.unwrap_or(4) },
                    SpaceArg::Circle => SpaceKind::Circle { n: self.n.unwrap_or(81) },
                    SpaceArg::Grid => SpaceKind::Grid { n: self.n.unwrap_or(9) },
                };
                PipelineConfig::generated(kind, self.colors)
            }
            (None, None, Some(path)) => {
                let Some(cov) = &self.covering_file else {
                    return Err(Error::Config("--space-file needs --covering-file".into()));
                };
                let mut c = PipelineConfig::generated(SpaceKind::Cantor { depth: 1 }, None);
                c.space = SpaceSource::File(path.clone());
                c.covering = CoveringSource::File(cov.clone());
                c
            }
            (None, None, None) => return Err(Error::Config("one of --preset, --space or --space-file is required".into())),
            (None, Some(_), Some(_)) => unreachable!("clap rejects the combination"),
        };
        if self.preset.is_some() && (self.depth.is_some() || self.n.is_some() || self.colors.is_some()) {
            return Err(Error::Config("--depth, --n and --colors do not apply to presets".into()));
        }
        if let Some(r) = &self.r {
            config.r = parse_rational(r)?;
        }
        if self.max_level.is_some() {
            config.max_level = self.max_level;
        }
        if let Some(path) = &self.covering_file {
            config.covering = CoveringSource::File(path.clone());
        }
        if let Some(k) = self.kappa {
            config.kappa = Some(k);
        }
        if let Some(k) = self.research_kappa {
            config.kappa = Some(k);
            config.research_kappa = true;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        Ok(config)
    }
}

fn execute(cli: Cli) -> Result<bool, Error> {
    let common = match &cli.command {
        Command::Run(c) | Command::Export(c) | Command::Verify { common: c, .. } => c,
    };
    if let Some(jobs) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let spaceless = matches!(&cli.command, Command::Verify { suite, .. } if suite == "diary" || suite.starts_with("morse"));
    let config = if spaceless && common.preset.is_none() && common.space.is_none() && common.space_file.is_none() {
        let mut c = PipelineConfig::preset("cantor")?;
        c.seed = common.seed.unwrap_or(c.seed);
        c
    } else {
        common.config()?
    };
    match &cli.command {
        Command::Run(c) => {
            let output = run(&config)?;
            write_artifacts(&c.out, &output)?;
            print_report(&output.report);
            Ok(output.report.passed)
        }
        Command::Verify { suite, common } => {
            let suite: Suite = suite.parse()?;
            let report = verify(&config, suite)?;
            write_report(&common.out, &report)?;
            print_report(&report);
            Ok(report.passed)
        }
        Command::Export(c) => {
            let output = run(&config)?;
            write_artifacts(&c.out, &output)?;
            println!("wrote artifacts to {}", c.out.display());
            Ok(true)
        }
    }
}

fn print_report(report: &treeprod::pipeline::PipelineReport) {
    for line in summary_lines(report) {
        println!("{line}");
    }
    println!("{}", if report.passed { "PASS" } else { "FAIL" });
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e.root() {
                Error::Config(_) | Error::Parse(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
