use std::path::{Path, PathBuf};

use clap::Args;

use crate::csvio::read_table;
use crate::error::{exit, CliError, CliResult};
use crate::svg;

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Max-regret CSV written by `bench`.
    #[arg(long)]
    pub csv: PathBuf,
    /// SVG destination.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub title: Option<String>,
}

/// Renders the CSV at `csv` into `out`; nothing is recomputed.
pub fn render_file(csv: &Path, out: &Path, title: &str) -> CliResult<()> {
    let (_, series) = read_table(csv)?;
    if series.is_empty() {
        return Err(CliError::config(format!(
            "{} has no data rows",
            csv.display()
        )));
    }
    let doc = svg::render(title, "round", "max regret", &series);
    std::fs::write(out, doc).map_err(|e| CliError::io(out, e))
}

pub fn run(args: &PlotArgs) -> CliResult<u8> {
    let title = args
        .title
        .clone()
        .unwrap_or_else(|| "Max regret by round".into());
    render_file(&args.csv, &args.out, &title)?;
    Ok(exit::OK)
}
