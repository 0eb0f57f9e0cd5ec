use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jdebloat::commands::{cmd_compare, cmd_debloat, cmd_fixtures, cmd_scan};
use jdebloat::config::{ConfigFile, ConfigOverrides, RunConfig};
use jdebloat::pipeline::{RunError, EXIT_CONFIG};

/// Removes unused dependency classes from a Java application.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute used classes and write the debloated jar and reports
    Debloat(RunArgs),
    /// Compare two used-class lists
    Compare { first: PathBuf, second: PathBuf },
    /// Write the F1 fixture corpus and the seeded knowledge base
    Fixtures {
        #[arg(long)]
        out: PathBuf,
    },
    /// Report known-vulnerable classes in the un-debloated inputs
    Scan {
        #[command(flatten)]
        run: RunArgs,
        /// Exit with status 4 when anything is found
        #[arg(long)]
        fail_on_findings: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    app: Option<PathBuf>,
    /// Dependency archive; repeat in classpath order
    #[arg(long = "dep")]
    deps: Vec<PathBuf>,
    /// Extra entry class (dotted name)
    #[arg(long = "entry")]
    entries: Vec<String>,
    /// Entry classes by glob over dotted names (`*`, `**`, `?`)
    #[arg(long = "entry-pattern")]
    patterns: Vec<String>,
    #[arg(long)]
    no_reflection: bool,
    #[arg(long)]
    no_spi: bool,
    #[arg(long)]
    no_package_info: bool,
    /// Use every application class as an entry point (the default)
    #[arg(long, overrides_with = "no_app_roots")]
    include_app_classes_as_roots: bool,
    #[arg(long)]
    no_app_roots: bool,
    /// Also treat application test classes as entry points
    #[arg(long)]
    include_tests: bool,
    #[arg(long)]
    kb: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn flag(set: bool, value: bool) -> Option<bool> {
    set.then_some(value)
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, RunError> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let app_roots = if self.no_app_roots {
            Some(false)
        } else {
            flag(self.include_app_classes_as_roots, true)
        };
        let overrides = ConfigOverrides {
            app_archive: self.app,
            dependency_archives: self.deps,
            explicit_classes: self.entries,
            patterns: self.patterns,
            include_all_application: app_roots,
            include_tests: flag(self.include_tests, true),
            reflection_literals: flag(self.no_reflection, false),
            spi_expansion: flag(self.no_spi, false),
            package_info_retention: flag(self.no_package_info, false),
            kb_path: self.kb,
            output_dir: self.out,
        };
        Ok(RunConfig::resolve(file, overrides)?)
    }
}

fn run(cli: Cli) -> Result<u8, RunError> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Debloat(args) => cmd_debloat(&args.into_config()?, &mut stdout),
        Command::Compare { first, second } => cmd_compare(&first, &second, &mut stdout),
        Command::Fixtures { out } => cmd_fixtures(&out),
        Command::Scan {
            run,
            fail_on_findings,
        } => cmd_scan(&run.into_config()?, fail_on_findings, &mut stdout),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = e.exit_code();
            eprintln!("error: {:#}", anyhow::Error::new(e));
            ExitCode::from(code)
        }
    }
}
