use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

use condsym_cli::config::{Format, Suite, SuiteConfig};
use condsym_cli::report::Report;
use condsym_cli::suites::run_suites;
use condsym_cli::{catalog_list, catalog_list_text, catalog_show, catalog_show_text, CliError};

/// Symbolic and numeric checks of conditionally invariant Schrodinger and
/// diffusion equations.
#[derive(Parser)]
#[command(name = "condsym", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Browse the catalog of representations.
    Catalog {
        #[command(subcommand)]
        action: CatalogCmd,
    },
    /// Symbolic verification suites.
    Verify {
        #[command(subcommand)]
        target: VerifyCmd,
    },
    /// Floating-point cross-checks.
    Numeric {
        #[command(subcommand)]
        target: NumericCmd,
    },
    /// Describe one catalog entry.
    Explain {
        /// A row 1-8, or fixed-sch, fixed-sch-g, fixed-age-g.
        case: String,
    },
    /// Run selected suites and write report.json, report.md and run.json.
    Run {
        /// Suites to run (comma list or repeated): algebra, roots, invariance, potentials, numeric, bridge, all.
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Every catalog entry with its algebra and representation
    List {
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Generators and operators of one entry; `--case` takes a row 1-8,
    /// or fixed-sch, fixed-sch-g, fixed-age-g.
    Show(Common),
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Bracket closure of every representation and the root weights.
    Algebra(Common),
    /// Conditional invariance of the operator lists.
    Invariance(Common),
    /// Invariance of the potentials.
    Potentials(Common),
}

#[derive(Subcommand)]
enum NumericCmd {
    /// Residuals of transformed solutions.
    Covariance(Common),
    /// Fourier map from the zeta representation.
    Bridge(Common),
}

#[derive(Args, Default)]
struct Common {
    /// Restrict to table rows (comma list of 1-8).
    #[arg(long)]
    case: Option<String>,
    /// Parameter values, `name=value,...`.
    #[arg(long)]
    params: Option<String>,
    /// Real (diffusion) mass in the numeric suites.
    #[arg(long)]
    real: bool,
    /// Scaling dimension: 1/2, generic, or a rational value.
    #[arg(long)]
    x: Option<String>,
    /// Numeric grid `n,h,dt`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output directory; defaults to $CONDSYM_OUT.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key = value` file with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn into_config(self, suites: Vec<Suite>) -> Result<SuiteConfig, CliError> {
        let mut cfg = SuiteConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
            cfg.apply_file(&text)?;
        }
        if !suites.is_empty() {
            cfg.suites = suites;
        }
        let flags = [("case", self.case), ("params", self.params), ("x", self.x), ("grid", self.grid)];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        if self.real {
            cfg.real = true;
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(o) = self.out {
            cfg.out = Some(o);
        }
        Ok(cfg)
    }
}

fn emit(report: &Report, cfg: &SuiteConfig, default_dir: Option<&str>) -> Result<i32, CliError> {
    match cfg.format {
        Format::Json => print!("{}", report.to_json()?),
        Format::Markdown => print!("{}", report.to_markdown()),
    }
    if let Some(dir) = cfg.out_dir(default_dir) {
        for p in report.write(&dir)? {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(report.exit_code())
}

fn run_config(cfg: SuiteConfig, default_dir: Option<&str>) -> Result<i32, CliError> {
    cfg.validate()?;
    let results = run_suites(&cfg)?;
    let report = Report::new(cfg.clone(), results);
    emit(&report, &cfg, default_dir)
}

fn dispatch(cmd: Cmd) -> Result<i32, CliError> {
    match cmd {
        Cmd::Catalog { action: CatalogCmd::List { format } } => {
            let entries = catalog_list()?;
            match format.unwrap_or_default() {
                Format::Json => println!("{}", serde_json::to_string_pretty(&entries).map_err(|e| CliError::Internal(e.to_string()))?),
                Format::Markdown => print!("{}", catalog_list_text(&entries)),
            }
            Ok(0)
        }
        Cmd::Catalog { action: CatalogCmd::Show(mut common) } => {
            let case = common.case.take().ok_or_else(|| CliError::Usage("catalog show needs --case".into()))?;
            let cfg = common.into_config(Vec::new())?;
            let views = catalog_show(&case, &cfg)?;
            match cfg.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&views).map_err(|e| CliError::Internal(e.to_string()))?),
                Format::Markdown => print!("{}", catalog_show_text(&views)),
            }
            Ok(0)
        }
        Cmd::Explain { case } => {
            print!("{}", condsym_cli::explain::explain(&case)?);
            Ok(0)
        }
        Cmd::Verify { target } => {
            let (suites, common) = match target {
                VerifyCmd::Algebra(c) => (vec![Suite::Algebra, Suite::Roots], c),
                VerifyCmd::Invariance(c) => (vec![Suite::Invariance], c),
                VerifyCmd::Potentials(c) => (vec![Suite::Potentials], c),
            };
            run_config(common.into_config(suites)?, None)
        }
        Cmd::Numeric { target } => {
            let (suites, common) = match target {
                NumericCmd::Covariance(c) => (vec![Suite::Numeric], c),
                NumericCmd::Bridge(c) => (vec![Suite::Bridge], c),
            };
            run_config(common.into_config(suites)?, None)
        }
        Cmd::Run { suites, common } => {
            let mut selected = Vec::new();
            for s in &suites {
                selected.extend(Suite::parse_list(s)?);
            }
            run_config(common.into_config(selected)?, Some("condsym-report"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.message());
            if let CliError::Usage(_) = e {
                let mut cmd = Cli::command();
                let run = cmd.find_subcommand_mut("run").expect("run subcommand");
                eprintln!("\n{}", run.render_help());
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
