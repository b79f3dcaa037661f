use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use polarq::cli::{self, Command, Kind, OutputFormat, Preset, RunConfig};
use polarq::state::DEFAULT_N_MAX_CAP;
use polarq::WignerMethod;

#[derive(Parser)]
#[command(
    name = "polarq",
    version,
    about = "Polarization quasidistributions on the Poincaré sphere"
)]
struct Args {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate Q, W or f on a sphere grid and export it.
    Eval {
        /// State spec: a JSON file or inline JSON.
        #[arg(long)]
        state: String,
        #[arg(long, value_enum, default_value = "wigner")]
        kind: KindArg,
        /// Polar and azimuthal node counts, `P,A`.
        #[arg(long, default_value = "64,128", value_parser = parse_grid)]
        grid: (usize, usize),
        #[arg(long, value_enum, default_value = "triple")]
        method: MethodArg,
        /// Cross-check against the kernel oracle when the state is small enough.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long, default_value_t = DEFAULT_N_MAX_CAP)]
        n_max_cap: usize,
    },
    /// Run the self-consistency checks for a state.
    Check {
        #[arg(long)]
        state: String,
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value = "64,128", value_parser = parse_grid)]
        grid: (usize, usize),
        #[arg(long, default_value_t = DEFAULT_N_MAX_CAP)]
        n_max_cap: usize,
    },
    /// Export the normalized distribution for one of the preset states.
    Figure {
        #[arg(long, value_enum)]
        preset: PresetArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long, default_value_t = DEFAULT_N_MAX_CAP)]
        n_max_cap: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Q,
    Wigner,
    F,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Triple,
    Double,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (p, a) = s.split_once(',').ok_or("expected P,A")?;
    let p = p.trim().parse().map_err(|e| format!("polar count: {e}"))?;
    let a = a
        .trim()
        .parse()
        .map_err(|e| format!("azimuthal count: {e}"))?;
    Ok((p, a))
}

fn format(f: FormatArg) -> OutputFormat {
    match f {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    }
}

fn main() {
    let args = Args::parse();
    let config = match args.command {
        Cmd::Eval {
            state,
            kind,
            grid,
            method,
            oracle,
            out,
            format: fmt,
            n_max_cap,
        } => RunConfig {
            command: Command::Eval,
            state: Some(state),
            kind: match kind {
                KindArg::Q => Kind::Q,
                KindArg::Wigner => Kind::Wigner,
                KindArg::F => Kind::F,
            },
            grid,
            method: match method {
                MethodArg::Triple => WignerMethod::TripleSum,
                MethodArg::Double => WignerMethod::DoubleSum,
            },
            oracle,
            output: out,
            format: format(fmt),
            n_max_cap,
            ..RunConfig::default()
        },
        Cmd::Check {
            state,
            oracle,
            grid,
            n_max_cap,
        } => RunConfig {
            command: Command::Check,
            state: Some(state),
            oracle,
            grid,
            n_max_cap,
            ..RunConfig::default()
        },
        Cmd::Figure {
            preset,
            out,
            format: fmt,
            n_max_cap,
        } => RunConfig {
            command: Command::Figure,
            preset: Some(match preset {
                PresetArg::Fig1 => Preset::Fig1,
                PresetArg::Fig2 => Preset::Fig2,
                PresetArg::Fig3 => Preset::Fig3,
                PresetArg::Fig4 => Preset::Fig4,
            }),
            output: Some(out),
            format: format(fmt),
            n_max_cap,
            ..RunConfig::default()
        },
    };
    let status = cli::run(&config, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(status.code());
}
