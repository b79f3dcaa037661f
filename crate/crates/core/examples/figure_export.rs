//! Exports all figure presets as CSV plus metadata into a directory.
//!
//! `cargo run --release --example figure_export -- out/`
use polarq::cli::{run_figure, Command, Preset, RunConfig};

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "figures".into());
    std::fs::create_dir_all(&dir).expect("create output directory");
    for preset in [Preset::Fig1, Preset::Fig2, Preset::Fig3, Preset::Fig4] {
        let config = RunConfig {
            command: Command::Figure,
            preset: Some(preset),
            output: Some(format!("{dir}/{}.csv", preset.name()).into()),
            ..RunConfig::default()
        };
        let status = run_figure(&config, &mut std::io::stdout(), &mut std::io::stderr());
        if status.code() != 0 {
            std::process::exit(status.code());
        }
    }
}
