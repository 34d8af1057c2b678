use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use iwalab::commands::{
    self, CampaignOptions, GenOptions, Input, LevelRange, Suite, VerifyOptions,
};
use iwalab::gen::GenConfig;
use iwalab::{CliError, CliResult};

/// Finite-level computations for Iwasawa modules.
#[derive(Parser)]
#[command(name = "iwalab", version)]
struct Cli {
    /// Exit with status 3 when any level hits the precision limit
    /// (also enabled by IWALAB_STRICT=1).
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weierstrass preparation of a power series given by its coefficients.
    Prepare {
        file: PathBuf,
        /// Ascending coefficients, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
    /// Invariant factors, sizes and p-ranks of the finite levels.
    Levels {
        file: PathBuf,
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
    },
    /// Runs a check suite over a range of levels.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum)]
        suite: Suite,
        /// Inclusive range such as 1..4.
        #[arg(long, default_value = "1..3", value_parser = parse_range)]
        levels: LevelRange,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// For the propf suite: also test the subgroup p^c·M, which must fail.
        #[arg(long)]
        inject_counterexample: bool,
    },
    /// Prints random module descriptions.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        max_deg: usize,
        #[arg(long)]
        allow_mu: bool,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 10)]
        precision: u32,
    },
    /// Fits the growth law to a series written by `levels`.
    Fukuda {
        file: PathBuf,
        /// Prime, if the series header does not record it.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Generates a corpus and checks the growth law on every module.
    Campaign {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        count: usize,
        #[arg(long, default_value = "1..5", value_parser = parse_range)]
        levels: LevelRange,
    },
}

fn parse_range(s: &str) -> Result<LevelRange, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn run(cli: Cli, strict: bool) -> CliResult<i32> {
    let report = match cli.command {
        Command::Prepare { file, poly } => commands::prepare(&Input::read(&file)?, &poly)?,
        Command::Levels { file, from, to } => {
            commands::levels(&Input::read(&file)?, LevelRange::new(from, to)?)?
        }
        Command::Verify {
            file,
            suite,
            levels,
            seed,
            inject_counterexample,
        } => commands::verify(
            &Input::read(&file)?,
            &VerifyOptions {
                suite,
                levels,
                seed,
                inject_counterexample,
            },
        )?,
        Command::Gen {
            seed,
            count,
            max_deg,
            allow_mu,
            p,
            k,
            precision,
        } => {
            let text = commands::gen(&GenOptions {
                seed,
                count,
                config: GenConfig::simple(p, k, precision, max_deg, allow_mu),
            })?;
            print!("{text}");
            return Ok(0);
        }
        Command::Fukuda { file, p, k } => commands::fukuda(&Input::read(&file)?, p, k)?,
        Command::Campaign {
            seed,
            count,
            levels,
        } => commands::campaign(&CampaignOptions {
            seed,
            count,
            levels,
        })?,
    };
    print!("{}", report.render());
    Ok(report.exit_code(strict))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let strict = cli.strict || std::env::var("IWALAB_STRICT").is_ok_and(|v| v == "1");
    let code = run(cli, strict).unwrap_or_else(|e| {
        eprintln!("iwalab: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
