use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kgdefect::Potential64;
use kgdefect_cli::analyze::{analyze, read_trace_csv, write_analysis};
use kgdefect_cli::config::{parse_config, parse_table, split_assignment};
use kgdefect_cli::experiment::run_experiment;
use kgdefect_cli::sweep::sweep;
use kgdefect_cli::table::{solitary_rows, write_rows};
use kgdefect_cli::{run_preset, CliError, Manifest, Preset, Result};

#[derive(Parser, Debug)]
#[command(
    name = "kgdefect",
    version,
    about = "Klein-Gordon field with a nonlinear point oscillator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the sampled solitary manifold as CSV.
    Solitary {
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        /// Potential coefficients u_0, u_1, ... separated by commas.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        coeffs: Vec<f64>,
        #[arg(long, default_value_t = 512)]
        omega_samples: usize,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the experiment described by a TOML config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named preset experiment.
    Preset {
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
        /// Override a preset value, e.g. `--set time.T=100`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Spectrum, bound/dispersive split and concentration of a trace CSV.
    Analyze {
        #[arg(long)]
        trace: PathBuf,
        /// Spectral window `t_start,t_end`.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        window: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        /// Bound part keeps |omega| <= m + margin.
        #[arg(long, default_value_t = 0.05)]
        margin: f64,
        /// Output directory, by default the trace's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a config once per value of one key.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Key to vary, as `section.key`.
        #[arg(long)]
        axis: String,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        values: Vec<String>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_text(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn report(m: &Manifest) -> Result<()> {
    for f in &m.files {
        println!("{}", m.dir.join(&f.name).display());
    }
    match &m.failure {
        Some(f) => Err(CliError::Numerical(format!(
            "run stopped early, outputs are partial: {f}"
        ))),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solitary {
            m,
            coeffs,
            omega_samples,
            out,
        } => {
            let p =
                Potential64::new(coeffs).map_err(|e| CliError::config("coeffs", e.to_string()))?;
            let rows = solitary_rows(&p, m, omega_samples)?;
            match out {
                Some(path) => write_rows(
                    fs::File::create(&path).map_err(|e| CliError::io(&path, e))?,
                    &rows,
                ),
                None => write_rows(io::stdout().lock(), &rows),
            }
        }
        Command::Simulate { config, out } => {
            let cfg = parse_config(&read_text(&config)?)?;
            let name = config
                .file_stem()
                .map_or("simulate".into(), |s| s.to_string_lossy().into_owned());
            report(&run_experiment(&name, &cfg, &out)?)
        }
        Command::Preset {
            name,
            out,
            overrides,
        } => {
            let preset = Preset::from_name(&name)?;
            let overrides = overrides
                .iter()
                .map(|s| split_assignment(s))
                .collect::<Result<Vec<_>>>()?;
            let run = run_preset(preset, &overrides, &out)?;
            if let Some(refined) = &run.refined {
                report(refined)?;
            }
            if let Some(ratio) = run.convergence_ratio() {
                println!(
                    "error ratio {ratio:.4} (observed order {:.3})",
                    ratio.log2()
                );
            }
            report(&run.main)
        }
        Command::Analyze {
            trace,
            window,
            m,
            margin,
            out,
        } => {
            let [t0, t1] = window[..] else {
                return Err(CliError::Input(
                    "--window takes two times, `t_start,t_end`".into(),
                ));
            };
            let series = read_trace_csv(&trace)?;
            let analysis = analyze(&series, (t0, t1), m, margin)?;
            let dir = out.unwrap_or_else(|| trace.parent().map(PathBuf::from).unwrap_or_default());
            write_analysis(&dir, &series, &analysis)?;
            let c = &analysis.concentration;
            println!(
                "dominant {} width {} band_mass {}",
                c.dominant, c.width, analysis.band_mass
            );
            Ok(())
        }
        Command::Sweep {
            config,
            axis,
            values,
            jobs,
            out,
        } => {
            let base = parse_table(&read_text(&config)?)?;
            let rows = sweep(&base, &axis, &values, jobs, &out)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            println!("{}", out.join("sweep.csv").display());
            if failed > 0 {
                eprintln!(
                    "{failed} of {} runs failed, see the error column",
                    rows.len()
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
