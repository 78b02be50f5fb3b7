use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gillum::emit::{render, Format};
use gillum::figures::{run_figure, Figure, SweepConfig};
use gillum::{Error, Result};

#[derive(Parser)]
#[command(name = "gillum", version, about = "Receiver SNR and Chernoff-bound sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one figure and write it as CSV, JSON or SVG.
    Figure(FigureArgs),
}

#[derive(Args, Default)]
struct FigureArgs {
    /// fig1, fig2, fig3, fig4, fig5a, fig5b, s1, s2 or custom.
    figure: String,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    nb: Option<f64>,
    /// Lower end of the swept axis (kappa for fig5a).
    #[arg(long, alias = "x-min")]
    ns_min: Option<f64>,
    #[arg(long, alias = "x-max")]
    ns_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    modes: Option<u64>,
    #[arg(long)]
    noise: Option<String>,
    /// Comma-separated curve labels.
    #[arg(long)]
    receivers: Option<String>,
    #[arg(long)]
    format: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

const KEYS: [&str; 10] = ["kappa", "nb", "ns-min", "ns-max", "points", "modes", "noise", "receivers", "format", "out"];

fn read_config_file(path: &PathBuf) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "{}:{}: unknown key '{key}'; known keys: {}",
                path.display(),
                n + 1,
                KEYS.join(", ")
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| Error::Config(format!("invalid value '{value}' for {key}: {e}")))
}

/// Fills every flag the user left out from the config file.
fn merge(mut args: FigureArgs) -> Result<FigureArgs> {
    let Some(path) = args.config.clone() else { return Ok(args) };
    let file = read_config_file(&path)?;
    for (key, value) in &file {
        match key.as_str() {
            "kappa" if args.kappa.is_none() => args.kappa = Some(parse_value(key, value)?),
            "nb" if args.nb.is_none() => args.nb = Some(parse_value(key, value)?),
            "ns-min" if args.ns_min.is_none() => args.ns_min = Some(parse_value(key, value)?),
            "ns-max" if args.ns_max.is_none() => args.ns_max = Some(parse_value(key, value)?),
            "points" if args.points.is_none() => args.points = Some(parse_value(key, value)?),
            "modes" if args.modes.is_none() => args.modes = Some(parse_value(key, value)?),
            "noise" if args.noise.is_none() => args.noise = Some(value.clone()),
            "receivers" if args.receivers.is_none() => args.receivers = Some(value.clone()),
            "format" if args.format.is_none() => args.format = Some(value.clone()),
            "out" if args.out.is_none() => args.out = Some(PathBuf::from(value)),
            _ => {}
        }
    }
    Ok(args)
}

fn build_config(args: &FigureArgs) -> Result<(SweepConfig, Format)> {
    let figure: Figure = args.figure.parse()?;
    let mut cfg = SweepConfig::preset(figure);
    if let Some(noise) = &args.noise {
        cfg.params.noise_model = noise.parse()?;
    }
    if let Some(v) = args.kappa {
        cfg.params.kappa = v;
    }
    if let Some(v) = args.nb {
        cfg.params.n_b = v;
    }
    if let Some(v) = args.modes {
        cfg.params.m_modes = v;
    }
    if let Some(v) = args.ns_min {
        cfg.sweep.min = v;
    }
    if let Some(v) = args.ns_max {
        cfg.sweep.max = v;
    }
    if let Some(v) = args.points {
        cfg.sweep.points = v;
    }
    if let Some(list) = &args.receivers {
        let labels: Vec<String> =
            list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect();
        cfg.receivers = Some(labels);
    }
    let format = match &args.format {
        Some(f) => f.parse()?,
        None => Format::Csv,
    };
    cfg.validate()?;
    Ok((cfg, format))
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var("GILLUM_THREADS") {
        let n: usize = parse_value("GILLUM_THREADS", value.trim())?;
        if n == 0 {
            return Err(Error::Config("GILLUM_THREADS must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Config(format!("cannot start worker threads: {e}")))
}

fn figure(args: FigureArgs) -> Result<()> {
    let args = merge(args)?;
    let (cfg, format) = build_config(&args)?;
    let set = thread_pool()?.install(|| run_figure(&cfg))?;
    let text = render(&set, format)?;
    match &args.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io { path: "<stdout>".into(), message: e.to_string() }),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Domain(_) | Error::Io { .. } => 2,
        Error::Numerical(_) | Error::Unphysical(_) | Error::Dimension { .. } => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Figure(args) => figure(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gillum: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
