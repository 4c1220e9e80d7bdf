//! Command-line front end: run scenarios, prepare ground states, compare
//! against the two-mode reference, capture momentum spectra, and sweep
//! parameters.
//!
//! Exit codes: 0 for completed runs and expected control breakdowns, 2 for
//! invalid configurations or I/O problems, 3 when a run blows up.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ptlattice::ground_state::{ground_state, stationarity_residual, GroundStateRequest};
use ptlattice::scenario::{
    compare_embedded, export_csv, export_momentum_csv, run, InitialStateConfig, ScenarioConfig,
    Termination,
};
use ptlattice::{LatticeParameters, Simulation};

#[derive(Parser)]
#[command(
    name = "ptlattice",
    version,
    about = "Hermitian multi-well chains emulating a gain/loss double well"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write the sampled time series as CSV.
    Run {
        config: PathBuf,
        /// Override the integrator step size.
        #[arg(long)]
        dt: Option<f64>,
        /// Override the end time.
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prepare the configured ground state and write it as CSV.
    GroundState {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario and compare the embedded pair against the
    /// independently integrated two-mode reference.
    Compare {
        config: PathBuf,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long = "t-end")]
        t_end: Option<f64>,
    },
    /// Capture momentum-space snapshots at the requested times.
    Spectrum {
        config: PathBuf,
        /// Comma-separated snapshot times.
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long = "t-end")]
        t_end: Option<f64>,
    },
    /// Run the scenario once per value of one configuration entry, in
    /// parallel, writing each run to its own directory.
    Sweep {
        config: PathBuf,
        /// Dot-separated path into the configuration, e.g. `gamma.target`.
        #[arg(long)]
        param: String,
        /// Comma-separated values to substitute.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            config,
            dt,
            t_end,
            out,
        } => cmd_run(&config, dt, t_end, out),
        Command::GroundState { config, out } => cmd_ground_state(&config, out),
        Command::Compare { config, dt, t_end } => cmd_compare(&config, dt, t_end),
        Command::Spectrum {
            config,
            times,
            out,
            dt,
            t_end,
        } => cmd_spectrum(&config, &times, out, dt, t_end),
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => cmd_sweep(&config, &param, &values, out),
    };
    match code {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn load_config(
    path: &Path,
    dt: Option<f64>,
    t_end: Option<f64>,
    out: Option<PathBuf>,
) -> Result<ScenarioConfig, String> {
    let mut config = ScenarioConfig::from_file(path).map_err(|e| e.to_string())?;
    if let Some(dt) = dt {
        config.integrator.dt = dt;
    }
    if let Some(t_end) = t_end {
        config.integrator.t_end = t_end;
    }
    if let Some(out) = out {
        config.output.dir = out.to_string_lossy().into_owned();
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn output_dir(config: &ScenarioConfig) -> Result<PathBuf, String> {
    let dir = PathBuf::from(&config.output.dir);
    std::fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    Ok(dir)
}

fn exit_for(termination: &Termination) -> ExitCode {
    ExitCode::from(termination.exit_code() as u8)
}

fn print_summary(record: &ptlattice::RunRecord) {
    println!("termination:     {}", record.termination);
    println!("final time:      {:.6}", record.final_time());
    println!("samples:         {}", record.samples.len());
    println!(
        "max residuals:   r1 {:.3e}  r2 {:.3e}  r3 {:.3e}  r4 {:.3e}",
        record.max_residuals[0],
        record.max_residuals[1],
        record.max_residuals[2],
        record.max_residuals[3]
    );
    println!("max norm drift:  {:.3e}", record.max_norm_drift);
}

fn cmd_run(
    path: &Path,
    dt: Option<f64>,
    t_end: Option<f64>,
    out: Option<PathBuf>,
) -> Result<ExitCode, String> {
    let config = load_config(path, dt, t_end, out)?;
    let record = run(&config).map_err(|e| e.to_string())?;
    let dir = output_dir(&config)?;
    let csv = dir.join("run.csv");
    export_csv(&record, &csv).map_err(|e| e.to_string())?;
    print_summary(&record);
    println!("wrote {}", csv.display());
    Ok(exit_for(&record.termination))
}

fn cmd_ground_state(path: &Path, out: Option<PathBuf>) -> Result<ExitCode, String> {
    let config = load_config(path, None, None, out)?;
    let onsite = match &config.initial_state {
        InitialStateConfig::GroundState { onsite, .. } => onsite.clone(),
        _ => {
            return Err("the configuration does not use a ground-state initial state".into());
        }
    };
    let norm = match &config.initial_state {
        InitialStateConfig::GroundState { norm, .. } => *norm,
        _ => unreachable!(),
    };
    let params = LatticeParameters {
        onsite,
        tunneling: vec![config.tunneling; config.wells - 1],
        interaction: vec![config.interaction; config.wells],
    };
    let (psi, mu) =
        ground_state(&GroundStateRequest::new(params.clone(), norm)).map_err(|e| e.to_string())?;
    let (_, residual) = stationarity_residual(&psi, &params).map_err(|e| e.to_string())?;
    let dir = output_dir(&config)?;
    let file = dir.join("ground_state.csv");
    let mut text = String::from("k,n,re,im\n");
    for (k, a) in psi.amplitudes.iter().enumerate() {
        text.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e}\n",
            k + 1,
            a.norm_sqr(),
            a.re,
            a.im
        ));
    }
    std::fs::write(&file, text).map_err(|e| format!("{}: {e}", file.display()))?;
    println!("chemical potential: {mu:.12}");
    println!("residual:           {residual:.3e}");
    println!("wrote {}", file.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(path: &Path, dt: Option<f64>, t_end: Option<f64>) -> Result<ExitCode, String> {
    let config = load_config(path, dt, t_end, None)?;
    let record = run(&config).map_err(|e| e.to_string())?;
    let report = compare_embedded(&record, &config).map_err(|e| e.to_string())?;
    print_summary(&record);
    println!("{report}");
    Ok(exit_for(&record.termination))
}

fn cmd_spectrum(
    path: &Path,
    times: &[f64],
    out: Option<PathBuf>,
    dt: Option<f64>,
    t_end: Option<f64>,
) -> Result<ExitCode, String> {
    let config = load_config(path, dt, t_end, out)?;
    let mut sim = Simulation::from_config(&config).map_err(|e| e.to_string())?;
    let step = config.integrator.dt;
    let mut targets: Vec<usize> = times
        .iter()
        .map(|t| (t / step).round().max(0.0) as usize)
        .collect();
    targets.sort_unstable();
    targets.dedup();
    let mut snapshots = Vec::new();
    loop {
        if targets.contains(&sim.step_index()) {
            snapshots.push((sim.time(), sim.state().clone()));
        }
        if sim.step_index() >= *targets.last().unwrap_or(&0) {
            break;
        }
        if !sim.advance() {
            break;
        }
    }
    let dir = output_dir(&config)?;
    let file = dir.join("spectrum.csv");
    export_momentum_csv(&snapshots, &file).map_err(|e| e.to_string())?;
    println!(
        "captured {} snapshot(s) up to t = {:.4}",
        snapshots.len(),
        snapshots.last().map_or(0.0, |s| s.0)
    );
    if let Some(term) = sim.termination() {
        if !matches!(term, Termination::Completed) {
            println!("run ended early: {term}");
        }
    }
    println!("wrote {}", file.display());
    match sim.termination() {
        Some(Termination::BlowUp) => Ok(ExitCode::from(3)),
        _ => Ok(ExitCode::SUCCESS),
    }
}

fn set_json_path(
    value: &mut serde_json::Value,
    path: &str,
    new_value: serde_json::Value,
) -> Result<(), String> {
    let mut cursor = value;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, segment) in segments.iter().enumerate() {
        let object = cursor
            .as_object_mut()
            .ok_or_else(|| format!("`{}` is not an object", segments[..i].join(".")))?;
        if i + 1 == segments.len() {
            object.insert((*segment).to_string(), new_value);
            return Ok(());
        }
        cursor = object.get_mut(*segment).ok_or_else(|| {
            format!(
                "no entry `{}` in the configuration",
                segments[..=i].join(".")
            )
        })?;
    }
    Err("empty parameter path".into())
}

fn cmd_sweep(
    path: &Path,
    param: &str,
    values: &[String],
    out: Option<PathBuf>,
) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let base: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("invalid configuration: {e}"))?;
    let out_root = out.unwrap_or_else(|| PathBuf::from("out"));

    // Parse every configuration up front so a typo fails the whole sweep.
    let mut jobs = Vec::new();
    for raw in values {
        let parsed: serde_json::Value =
            serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.clone()));
        let mut json = base.clone();
        set_json_path(&mut json, param, parsed)?;
        let config = ScenarioConfig::from_json(&json.to_string()).map_err(|e| e.to_string())?;
        let dir = out_root.join(format!("{param}={raw}"));
        jobs.push((raw.clone(), config, dir));
    }

    let mut worst = ExitCode::SUCCESS;
    let results: Vec<Result<(String, Termination, PathBuf), String>> =
        std::thread::scope(|scope| {
            let handles: Vec<_> = jobs
                .into_iter()
                .map(|(label, config, dir)| {
                    scope.spawn(move || -> Result<(String, Termination, PathBuf), String> {
                        let record = run(&config).map_err(|e| e.to_string())?;
                        std::fs::create_dir_all(&dir)
                            .map_err(|e| format!("{}: {e}", dir.display()))?;
                        let csv = dir.join("run.csv");
                        export_csv(&record, &csv).map_err(|e| e.to_string())?;
                        Ok((label, record.termination, csv))
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sweep worker"))
                .collect()
        });
    for result in results {
        match result {
            Ok((label, termination, csv)) => {
                println!("{param} = {label}: {termination} -> {}", csv.display());
                if termination.exit_code() != 0 {
                    worst = ExitCode::from(termination.exit_code() as u8);
                }
            }
            Err(message) => return Err(message),
        }
    }
    Ok(worst)
}
