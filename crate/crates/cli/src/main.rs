use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rbswipt_core::config::{CONFIG_ENV_VAR, DEFAULT_CONFIG_TEMPLATE};
use rbswipt_core::diffraction::{fox_li_solve, intensity_at_plane};
use rbswipt_core::pipeline::{records_to_csv, records_to_json, run_sweep_with_cache, ModeCache, ResultFormat};
use rbswipt_core::{load_config, run_point, Config, E2eRecord, SweepSpec};

const EXIT_EVALUATION: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Resonant-beam simultaneous wireless information and power transfer simulator.
#[derive(Debug, Parser)]
#[command(name = "rbswipt", version)]
struct Cli {
    /// Configuration file (TOML). Defaults apply when omitted.
    #[arg(long, global = true, env = CONFIG_ENV_VAR)]
    config: Option<PathBuf>,

    /// Print progress and timing to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one operating point end to end.
    Point {
        #[command(flatten)]
        overrides: Overrides,
        /// Split ratio γ (share of the beam sent to the PV panel).
        #[arg(long, value_parser = unit_interval)]
        gamma: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate the Cartesian product of lengths, radii and split ratios.
    Sweep {
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        /// Cavity lengths in m, comma separated.
        #[arg(long, value_delimiter = ',', value_parser = positive_f64, allow_negative_numbers = true)]
        lengths: Vec<f64>,
        /// Reflector radii in m, comma separated.
        #[arg(long, value_delimiter = ',', value_parser = positive_f64, allow_negative_numbers = true)]
        radii: Vec<f64>,
        /// Split ratios, comma separated.
        #[arg(long, value_delimiter = ',', value_parser = unit_interval, allow_negative_numbers = true)]
        gammas: Vec<f64>,
        #[command(flatten)]
        overrides: Overrides,
        /// Directory for on-disk cavity-mode memo files.
        #[arg(long)]
        memo_dir: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Export the peak-normalized mode intensity on a plane inside the cavity.
    Intensity {
        #[command(flatten)]
        overrides: Overrides,
        /// Plane position measured from S1 toward S2, in m.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        z: f64,
        /// Write the binary dump instead of CSV (requires --output).
        #[arg(long)]
        binary: bool,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print (or write) a fully commented default configuration.
    InitConfig {
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Overwrite an existing file.
        #[arg(long)]
        force: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    /// 1-5 m, 1-5 mm, γ in {0.1, 0.3, 0.5, 0.7, 0.9}.
    Paper,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Overrides {
    /// Cavity length in m.
    #[arg(long, value_parser = positive_f64, allow_negative_numbers = true)]
    length: Option<f64>,
    /// Radius of both retro-reflectors in m.
    #[arg(long, value_parser = positive_f64, allow_negative_numbers = true)]
    radius: Option<f64>,
    /// Wavelength in nm.
    #[arg(long, value_parser = positive_f64, allow_negative_numbers = true)]
    wavelength: Option<f64>,
    /// Grid samples per side (power of two, >= 64).
    #[arg(long)]
    grid_n: Option<usize>,
}

impl Overrides {
    fn apply(&self, config: &mut Config) {
        if let Some(l) = self.length {
            config.cavity.length_m = l;
        }
        if let Some(a) = self.radius {
            config.cavity.reflector_radius_in_mm = a * 1e3;
            config.cavity.reflector_radius_out_mm = a * 1e3;
        }
        if let Some(nm) = self.wavelength {
            config.cavity.wavelength_nm = nm;
        }
        if let Some(n) = self.grid_n {
            config.grid.samples_per_side = n;
        }
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Result file; format follows --format, else the extension.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

impl OutputArgs {
    fn format(&self, fallback: ResultFormat) -> ResultFormat {
        match (self.format, &self.output) {
            (Some(FormatArg::Csv), _) => ResultFormat::Csv,
            (Some(FormatArg::Json), _) => ResultFormat::Json,
            (None, Some(path)) => ResultFormat::from_path(path),
            (None, None) => fallback,
        }
    }
}

fn positive_f64(text: &str) -> Result<f64, String> {
    match text.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("{v} is not a positive number")),
        Err(e) => Err(e.to_string()),
    }
}

fn unit_interval(text: &str) -> Result<f64, String> {
    match text.parse::<f64>() {
        Ok(v) if (0.0..=1.0).contains(&v) => Ok(v),
        Ok(v) => Err(format!("{v} is outside [0, 1]")),
        Err(e) => Err(e.to_string()),
    }
}

enum Failure {
    Usage(String),
    Evaluation(String),
}

fn usage(err: impl Display) -> Failure {
    Failure::Usage(err.to_string())
}

fn evaluation(err: impl Display) -> Failure {
    Failure::Evaluation(err.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("rbswipt: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Evaluation(msg)) => {
            eprintln!("rbswipt: {msg}");
            ExitCode::from(EXIT_EVALUATION)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Command::InitConfig { output, force } = &cli.command {
        return init_config(output.as_deref(), *force);
    }
    let mut config = match &cli.config {
        Some(path) => load_config(path).map_err(usage)?,
        None => Config::default(),
    };
    let verbose = cli.verbose;
    match cli.command {
        Command::Point { overrides, gamma, output } => {
            overrides.apply(&mut config);
            if let Some(g) = gamma {
                config.split.power_splitting_ratio = g;
            }
            config.validate().map_err(usage)?;
            cmd_point(&config, &output, verbose)
        }
        Command::Sweep {
            preset,
            lengths,
            radii,
            gammas,
            overrides,
            memo_dir,
            output,
        } => {
            overrides.apply(&mut config);
            config.validate().map_err(usage)?;
            let mut spec = match preset {
                Some(Preset::Paper) => SweepSpec::paper(),
                None => SweepSpec::single(
                    config.cavity.length_m,
                    config.cavity.reflector_radius_in_mm * 1e-3,
                    config.split.power_splitting_ratio,
                ),
            };
            if !lengths.is_empty() {
                spec.lengths_m = lengths;
            }
            if !radii.is_empty() {
                spec.radii_m = radii;
            }
            if !gammas.is_empty() {
                spec.gammas = gammas;
            }
            cmd_sweep(&config, &spec, memo_dir, &output, verbose)
        }
        Command::Intensity {
            overrides,
            z,
            binary,
            output,
        } => {
            overrides.apply(&mut config);
            config.validate().map_err(usage)?;
            if binary && output.is_none() {
                return Err(usage("--binary needs --output"));
            }
            cmd_intensity(&config, z, binary, output.as_deref(), verbose)
        }
        Command::InitConfig { .. } => unreachable!("handled above"),
    }
}

fn run_header(config: &Config) -> String {
    format!(
        "wavelength {} nm, grid {}x{} (window factor {}), at most {} transits",
        sig(config.cavity.wavelength_nm),
        config.grid.samples_per_side,
        config.grid.samples_per_side,
        sig(config.grid.window_factor),
        config.fox_li.max_iterations
    )
}

fn cmd_point(config: &Config, output: &OutputArgs, verbose: bool) -> Result<(), Failure> {
    let geom = config.geometry();
    if !geom.is_symmetric() {
        return Err(usage(
            "point evaluates symmetric cavities; set reflector_radius_in_mm = reflector_radius_out_mm or pass --radius",
        ));
    }
    let start = Instant::now();
    let record = run_point(
        config,
        geom.cavity_length_m,
        geom.reflector_radius_in_m,
        config.split.power_splitting_ratio,
    )
    .map_err(evaluation)?;
    if verbose {
        eprintln!("solved in {:.2} s", start.elapsed().as_secs_f64());
    }
    println!("{}", run_header(config));
    print!("{}", describe(&record));
    if let Some(path) = &output.output {
        write_records(&[record], output.format(ResultFormat::Json), Some(path))?;
    }
    Ok(())
}

fn describe(r: &E2eRecord) -> String {
    let rows: [(&str, String, &str); 13] = [
        ("cavity length", sig(r.cavity_length_m), "m"),
        ("reflector radius", sig(r.reflector_radius_m), "m"),
        ("split ratio", sig(r.gamma), ""),
        ("one-pass loss", sig(r.delta), ""),
        ("transmission", sig(r.epsilon), ""),
        ("converged", format!("{} ({} transits)", r.converged, r.iterations), ""),
        ("lasing", r.lasing.to_string(), ""),
        ("output beam power", sig(r.p_out_w), "W"),
        ("electric power", sig(r.p_e_w), "W"),
        ("spectral efficiency", sig(r.c_nats), "nats/s/Hz"),
        ("spectral efficiency", sig(r.c_bits), "bits/s/Hz"),
        ("end-to-end efficiency", sig(r.eta_e2e), ""),
        ("status", r.status.clone(), ""),
    ];
    let mut out = String::new();
    for (label, value, unit) in rows {
        out.push_str(format!("{label:<22} {value:>14} {unit}").trim_end());
        out.push('\n');
    }
    out
}

fn cmd_sweep(
    config: &Config,
    spec: &SweepSpec,
    memo_dir: Option<PathBuf>,
    output: &OutputArgs,
    verbose: bool,
) -> Result<(), Failure> {
    spec.validate().map_err(usage)?;
    let cache = match memo_dir {
        Some(dir) => ModeCache::with_memo_dir(dir),
        None => ModeCache::new(),
    };
    eprintln!("{}", run_header(config));
    let start = Instant::now();
    let records = run_sweep_with_cache(spec, config, &cache).map_err(evaluation)?;
    if verbose {
        eprintln!(
            "{} cavity solves in {:.2} s",
            cache.solve_count(),
            start.elapsed().as_secs_f64()
        );
    }
    write_records(&records, output.format(ResultFormat::Csv), output.output.as_deref())?;

    let ok: Vec<&E2eRecord> = records.iter().filter(|r| r.is_ok()).collect();
    let lasing = ok.iter().filter(|r| r.lasing).count();
    let etas = ok.iter().map(|r| r.eta_e2e);
    let eta_min = etas.clone().fold(f64::INFINITY, f64::min);
    let eta_max = etas.fold(f64::NEG_INFINITY, f64::max);
    eprintln!(
        "{} points evaluated, {} lasing, {} failed",
        records.len(),
        lasing,
        records.len() - ok.len()
    );
    if !ok.is_empty() {
        eprintln!("end-to-end efficiency: min {}, max {}", sig(eta_min), sig(eta_max));
    }
    for r in records.iter().filter(|r| !r.is_ok()) {
        eprintln!(
            "  L = {} m, a = {} m, gamma = {}: {}",
            sig(r.cavity_length_m),
            sig(r.reflector_radius_m),
            sig(r.gamma),
            r.status
        );
    }
    Ok(())
}

fn cmd_intensity(config: &Config, z: f64, binary: bool, output: Option<&Path>, verbose: bool) -> Result<(), Failure> {
    let geom = config.geometry();
    let grid = config.grid_for(&geom);
    if !(0.0..=geom.cavity_length_m).contains(&z) {
        return Err(evaluation(format!(
            "plane z = {z} m lies outside the cavity [0, {}] m",
            geom.cavity_length_m
        )));
    }
    let start = Instant::now();
    let mode = fox_li_solve(&geom, &grid, &config.fox_li()).map_err(evaluation)?;
    let map = intensity_at_plane(&mode, z, &geom, &grid).map_err(evaluation)?;
    if verbose {
        eprintln!("solved in {:.2} s", start.elapsed().as_secs_f64());
    }
    eprintln!("{}", run_header(config));
    eprintln!(
        "one-pass loss {}, converged {} ({} transits), center intensity {}",
        sig(mode.one_pass_loss),
        mode.converged,
        mode.iterations_run,
        sig(map.at(grid.center_index(), grid.center_index()))
    );
    match (output, binary) {
        (Some(path), true) => map.write_binary(path).map_err(evaluation),
        (Some(path), false) => map.write_csv(path).map_err(evaluation),
        (None, _) => emit_stdout(map.to_csv_string().as_bytes()),
    }
}

fn init_config(output: Option<&Path>, force: bool) -> Result<(), Failure> {
    match output {
        None => emit_stdout(DEFAULT_CONFIG_TEMPLATE.as_bytes()),
        Some(path) => {
            if path.exists() && !force {
                return Err(usage(format!("{} exists; pass --force to overwrite", path.display())));
            }
            std::fs::write(path, DEFAULT_CONFIG_TEMPLATE).map_err(|e| evaluation(format!("{}: {e}", path.display())))
        }
    }
}

fn write_records(records: &[E2eRecord], format: ResultFormat, path: Option<&Path>) -> Result<(), Failure> {
    let text = match format {
        ResultFormat::Csv => records_to_csv(records),
        ResultFormat::Json => records_to_json(records),
    }
    .map_err(evaluation)?;
    match path {
        Some(path) if path != Path::new("-") => {
            std::fs::write(path, text).map_err(|e| evaluation(format!("{}: {e}", path.display())))
        }
        _ => emit_stdout(text.as_bytes()),
    }
}

fn emit_stdout(bytes: &[u8]) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| evaluation(format!("stdout: {e}")))
}

/// Six significant digits, switching to exponent form outside [1e-4, 1e6).
fn sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let text = format!("{x:.decimals$}");
    // A value like 9.999996 rounds up into the next decade.
    let rounded: f64 = text.parse().unwrap_or(x);
    if rounded.abs().log10().floor() as i32 > magnitude && decimals > 0 {
        return format!("{x:.prec$}", prec = decimals - 1);
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(42.108335027938566), "42.1083");
        assert_eq!(sig(0.0020992), "0.00209920");
        assert_eq!(sig(12.284781040168491), "12.2848");
        assert_eq!(sig(1064.0), "1064.00");
        assert_eq!(sig(9.9999996), "10.0000");
        assert_eq!(sig(1.26e7), "1.26000e7");
        assert_eq!(sig(-3.5e-9), "-3.50000e-9");
        assert_eq!(sig(f64::NAN), "NaN");
    }

    #[test]
    fn value_parsers() {
        assert!(positive_f64("1e-3").is_ok());
        assert!(positive_f64("-1").is_err());
        assert!(positive_f64("0").is_err());
        assert!(positive_f64("inf").is_err());
        assert!(unit_interval("1").is_ok());
        assert!(unit_interval("1.01").is_err());
    }

    #[test]
    fn command_line_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
