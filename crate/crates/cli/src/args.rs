use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "hrwave",
    version,
    about = "Low-regularity integrators with high-frequency recovery for semilinear wave equations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrate one configuration and write snapshots.
    Run(SimOpts),
    /// Error-versus-step sweep against a reference solution.
    Converge(SimOpts),
    /// Run several methods at the same (N, tau) and compare profiles.
    Compare(SimOpts),
    /// Render existing CSV tables or snapshots.
    Plot(PlotOpts),
}

#[derive(Args, Debug, Clone)]
#[command(args_override_self = true)]
pub struct SimOpts {
    /// key=value file merged under the explicit flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Spatial dimension (defaults to the dimension of the preset).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Nonlinearity: sine:A, cubic:LAMBDA or linear.
    #[arg(long, default_value = "sine:1")]
    pub g: String,
    /// Mass shift m > 0 of the linear part.
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    /// Preset (boxes:sg1d, boxes:sg2d-one, boxes:sg2d-two, boxes:kg1d,
    /// rough2d, smooth:sin) or a .hrwv snapshot file.
    #[arg(long, default_value = "smooth:sin")]
    pub init: String,
    /// Number of Fourier modes per direction (power of two).
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Recovery exponent for hrlri.
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// tau = ratio / N.
    #[arg(long = "tau-ratio", default_value_t = 0.25)]
    pub tau_ratio: f64,
    /// Final time.
    #[arg(long = "T", default_value_t = 0.25)]
    pub t_final: f64,
    /// Comma-separated methods: hrlri[:alpha=A], lie, strang, deuflhard.
    #[arg(long)]
    pub method: Option<String>,
    /// Comma-separated N values for converge.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Reference bandwidth.
    #[arg(long = "ref-N")]
    pub ref_n: Option<usize>,
    /// Reference recovery exponent (default: that of each method).
    #[arg(long = "ref-alpha")]
    pub ref_alpha: Option<f64>,
    /// Required ratio between the reference bandwidth and the largest N.
    #[arg(long = "ref-min-ratio", default_value_t = 4)]
    pub ref_min_ratio: usize,
    /// Seed for random initial data.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Also write SVG figures.
    #[arg(long)]
    pub svg: bool,
    /// Comma-separated snapshot times.
    #[arg(long)]
    pub snapshots: Option<String>,
    /// Record wall-clock times (makes outputs machine dependent).
    #[arg(long)]
    pub timing: bool,
    /// Fine-grid factor for profiles and overshoot.
    #[arg(long = "grid-factor", default_value_t = 8)]
    pub grid_factor: usize,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Args, Debug, Clone)]
#[command(args_override_self = true)]
pub struct PlotOpts {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Convergence CSV written by `converge`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Snapshot files to overlay (repeatable).
    #[arg(long)]
    pub snapshot: Vec<PathBuf>,
    /// Check a linear run directory: final snapshot vs group-propagated
    /// initial snapshot.
    #[arg(long = "verify-linear")]
    pub verify_linear: Option<PathBuf>,
    /// Points per direction for profile plots.
    #[arg(long, default_value_t = 1024)]
    pub points: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

const BOOL_KEYS: [&str; 2] = ["svg", "timing"];

/// Turns `key = value` lines into flags. Blank lines and `#` comments are
/// ignored; boolean keys take `true`/`false`.
pub fn config_args(text: &str, origin: &str) -> anyhow::Result<Vec<String>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{origin}:{}: expected key=value, got '{line}'", i + 1);
        };
        let (key, value) = (key.trim().trim_start_matches("--"), value.trim());
        if key.is_empty() || key == "config" {
            bail!("{origin}:{}: invalid key '{key}'", i + 1);
        }
        if BOOL_KEYS.contains(&key) {
            match value {
                "true" | "1" | "yes" => out.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                _ => bail!("{origin}:{}: '{key}' expects true or false", i + 1),
            }
        } else {
            out.push(format!("--{key}={value}"));
        }
    }
    Ok(out)
}

/// Inserts the arguments of a `--config` file right after the subcommand so
/// that explicit flags, which come later, take precedence.
pub fn expand_config(argv: Vec<String>) -> anyhow::Result<Vec<String>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
            break;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
            break;
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text =
        std::fs::read_to_string(&path).with_context(|| format!("reading config file {path}"))?;
    let extra = config_args(&text, &path)?;
    let sub = argv
        .iter()
        .position(|a| ["run", "converge", "compare", "plot"].contains(&a.as_str()))
        .unwrap_or(0);
    let mut merged = argv[..=sub].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&argv[sub + 1..]);
    Ok(merged)
}
