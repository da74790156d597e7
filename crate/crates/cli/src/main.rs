//! `spinlab`: command-line front end for the simulator.
//!
//! Exit codes: 0 on success, 1 for usage, parse and input errors, 2 when a
//! numerical step fails.

mod output;

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use spinlab::config::ErrorConfig;
use spinlab::dsl::{self, CompiledProgram};
use spinlab::readout::{
    deviation_error_norm, readout_unitary, simulate_fid, spectrum, Acquisition, Tomography, DEFAULT_ZERO_FILL,
};
use spinlab::sequence::{grover_run, labeling_capacity, labeling_sequence, parse_x0, x0_label, PulseMode, PulseSequence, RunOptions, Simulator};
use spinlab::spin::{thermal_state, Axis, DensityMatrix, Polarization, SpinSystem};
use spinlab::{Error, Execution};

#[derive(Parser)]
#[command(name = "spinlab", version, about = "Bulk-NMR quantum computation simulator")]
struct Cli {
    /// Worker threads for independent experiments (1 = sequential).
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Thermal-equilibrium populations.
    Thermal {
        #[arg(long)]
        system: Option<PathBuf>,
        /// Polarization a = ħω/kT.
        #[arg(long, default_value_t = 1e-5, allow_negative_numbers = true)]
        a: f64,
    },
    /// Populations before and after logical labeling.
    Label {
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-5, allow_negative_numbers = true)]
        a: f64,
    },
    /// Grover search on the labeled two-spin subspace.
    Grover {
        #[arg(long)]
        system: Option<PathBuf>,
        /// Marked item, 00, 01, 10 or 11.
        #[arg(long)]
        x0: String,
        #[arg(long, default_value_t = 1)]
        iterations: usize,
        /// Overrides the pulse model of the error file.
        #[arg(long, value_enum)]
        pulses: Option<Pulses>,
        /// Error-model TOML file.
        #[arg(long)]
        errors: Option<PathBuf>,
        /// Directory for population and spectrum CSV files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a pulse program from thermal equilibrium.
    Run {
        program: PathBuf,
        /// Overrides the program's `system` line.
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-5, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, value_enum)]
        tomography: Option<TomographyMode>,
        /// Deviation-matrix JSON to compare against; defaults to an ideal run.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, value_enum)]
        pulses: Option<Pulses>,
        #[arg(long)]
        errors: Option<PathBuf>,
        /// Directory for spectra of `acquire` statements.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Number of effective-pure qubits obtainable by labeling n spins.
    Capacity {
        #[arg(long)]
        n: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Pulses {
    Ideal,
    Shaped,
}

#[derive(Clone, Copy, ValueEnum)]
enum TomographyMode {
    Full,
}

enum Failure {
    Usage(String),
    Numeric(String),
}

type CliResult<T> = Result<T, Failure>;

fn at(context: impl Display) -> impl FnOnce(Error) -> Failure {
    move |e| {
        let msg = format!("{context}: {e}");
        if e.is_usage() {
            Failure::Usage(msg)
        } else {
            Failure::Numeric(msg)
        }
    }
}

fn io_at(context: impl Display) -> impl FnOnce(std::io::Error) -> Failure {
    move |e| Failure::Usage(format!("{context}: {e}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs as usize).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(1);
        }
    };
    let execution = if cli.jobs > 1 { Execution::Parallel } else { Execution::Sequential };
    match pool.install(|| dispatch(cli.command, execution)) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command, execution: Execution) -> CliResult<String> {
    match command {
        Command::Thermal { system, a } => thermal(system.as_deref(), a),
        Command::Label { system, a } => label(system.as_deref(), a),
        Command::Grover { system, x0, iterations, pulses, errors, out } => {
            grover(system.as_deref(), &x0, iterations, pulses, errors.as_deref(), out.as_deref())
        }
        Command::Run { program, system, a, tomography, reference, pulses, errors, out } => run(RunArgs {
            program: &program,
            system: system.as_deref(),
            a,
            tomography,
            reference: reference.as_deref(),
            pulses,
            errors: errors.as_deref(),
            out: out.as_deref(),
            execution,
        }),
        Command::Capacity { n } => {
            let c = labeling_capacity(n).map_err(at("--n"))?;
            Ok(format!("{{\"k\": {:.2}, \"k_int\": {}}}\n", c.k, c.k_int))
        }
    }
}

fn load_system(path: Option<&Path>) -> CliResult<SpinSystem> {
    match path {
        Some(p) => SpinSystem::from_config_file(p).map_err(at(p.display())),
        None => Ok(SpinSystem::bromotrifluoroethylene()),
    }
}

fn thermal_at(sys: &SpinSystem, a: f64) -> CliResult<DensityMatrix> {
    thermal_state(sys, &Polarization::Homonuclear(a)).map_err(at("--a"))
}

fn states(sys: &SpinSystem) -> Vec<String> {
    (0..sys.dim()).map(|i| sys.basis_label(i)).collect()
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn thermal(system: Option<&Path>, a: f64) -> CliResult<String> {
    let sys = load_system(system)?;
    let rho = thermal_at(&sys, a)?;
    Ok(pretty(&json!({ "a": a, "states": states(&sys), "populations": rho.populations() })))
}

fn label(system: Option<&Path>, a: f64) -> CliResult<String> {
    let sys = load_system(system)?;
    let rho = thermal_at(&sys, a)?;
    let seq = labeling_sequence(&sys).map_err(at("labeling"))?;
    let after = Simulator::ideal(&sys).and_then(|s| s.run(&rho, &seq)).map_err(at("labeling"))?;
    let d = sys.dim() as f64;
    // Populations as multiples of a/2ⁿ around the mixed state.
    let scaled = |p: Vec<f64>| -> Vec<f64> {
        if a == 0.0 {
            vec![0.0; p.len()]
        } else {
            p.iter().map(|x| (x * d - 1.0) / a).collect()
        }
    };
    Ok(pretty(&json!({
        "a": a,
        "states": states(&sys),
        "before": rho.populations(),
        "after": after.populations(),
        "before_scaled": scaled(rho.populations()),
        "after_scaled": scaled(after.populations()),
    })))
}

fn simulator(sys: &SpinSystem, pulses: Option<Pulses>, errors: Option<&Path>) -> CliResult<Simulator> {
    let cfg = match errors {
        Some(p) => ErrorConfig::from_file(p).map_err(at("--errors"))?,
        None => ErrorConfig::default(),
    };
    let mut options: RunOptions = cfg.run_options();
    match pulses {
        Some(Pulses::Ideal) => options.mode = PulseMode::Ideal,
        Some(Pulses::Shaped) => {
            options.mode = PulseMode::Shaped { envelope: cfg.envelope(), duration: cfg.pulse_duration_us * 1e-6 }
        }
        None => {}
    }
    Simulator::new(sys, options).map_err(at("pulse calibration"))
}

fn grover(
    system: Option<&Path>,
    x0: &str,
    iterations: usize,
    pulses: Option<Pulses>,
    errors: Option<&Path>,
    out: Option<&Path>,
) -> CliResult<String> {
    let sys = load_system(system)?;
    let x0 = parse_x0(x0).map_err(at("--x0"))?;
    let sim = simulator(&sys, pulses, errors)?;
    let run = grover_run(&sim, x0, iterations, None).map_err(at("grover"))?;
    let label = x0_label(x0);

    if let Some(dir) = out {
        let rows = run.population.iter().enumerate().map(|(k, &p)| (k as f64, num_complex::Complex64::new(p, 0.0)));
        output::write(dir, "population.csv", &output::csv(rows)).map_err(io_at(dir.display()))?;
        let acq = Acquisition::default();
        for spin in 1..sys.n() {
            let read = run.final_state.transformed(&readout_unitary(&sys, &[spin], Axis::Y).map_err(at("readout"))?);
            let fid = simulate_fid(&read, &sys, &run.final_frame, &[spin], &acq).map_err(at("readout"))?;
            let s = spectrum(&fid.channels[0], acq.dt, DEFAULT_ZERO_FILL).map_err(at("spectrum"))?;
            let name = format!("spectrum_{}.csv", sys.label(spin));
            output::write(dir, &name, &output::spectrum_csv(&s)).map_err(io_at(dir.display()))?;
        }
        let meta = json!({
            "x0": label,
            "iterations": iterations,
            "z_variant": run.variant.name(),
            "pulses": run.pulse_count,
            "duration_s": run.duration,
            "iteration_duration_s": run.iteration_duration,
            "labeling_duration_s": run.labeling_duration,
        });
        output::write(dir, "run.json", &pretty(&meta)).map_err(io_at(dir.display()))?;
    }

    let final_population = run.population[iterations];
    Ok(format!(
        "x0 = {label}\niterations = {iterations}\npulses = {}\nduration_ms = {:.3}\npopulation({label}) = {final_population:.6}\n",
        run.pulse_count,
        run.duration * 1e3,
    ))
}

struct RunArgs<'a> {
    program: &'a Path,
    system: Option<&'a Path>,
    a: f64,
    tomography: Option<TomographyMode>,
    reference: Option<&'a Path>,
    pulses: Option<Pulses>,
    errors: Option<&'a Path>,
    out: Option<&'a Path>,
    execution: Execution,
}

fn run(args: RunArgs) -> CliResult<String> {
    let path = args.program;
    let text = std::fs::read_to_string(path).map_err(io_at(path.display()))?;
    let sys = match args.system {
        Some(p) => load_system(Some(p))?,
        None => match dsl::system_path(&text).map_err(|e| at(path.display())(e.into()))? {
            Some(rel) => {
                let p = path.parent().unwrap_or(Path::new(".")).join(rel);
                load_system(Some(&p))?
            }
            None => load_system(None)?,
        },
    };
    let program = dsl::parse_program(&text, &sys).map_err(at(path.display()))?;
    let rho0 = thermal_at(&sys, args.a)?;
    let sim = simulator(&sys, args.pulses, args.errors)?;
    let (rho, frame) = sim.run_to_end(&rho0, &program.sequence).map_err(at(path.display()))?;

    if let Some(dir) = args.out {
        write_acquisitions(&sim, &rho0, &program, dir)?;
    }

    let reference = match args.reference {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(io_at(p.display()))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            let m = v.get("deviation").unwrap_or(&v);
            output::matrix_from_json(m).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
        }
        None => Simulator::ideal(&sys)
            .and_then(|s| s.run(&rho0, &program.sequence))
            .map_err(at("reference"))?
            .deviation(),
    };

    let mut report = serde_json::Map::new();
    let deviation = match args.tomography {
        Some(TomographyMode::Full) => {
            let acq = program.acquisitions.last().map(|s| s.acquisition).unwrap_or_default();
            let result = Tomography::new(&sys, &frame, &acq)
                .map(|t| t.with_execution(args.execution))
                .and_then(|t| t.measure(&rho))
                .map_err(at("tomography"))?;
            report.insert("condition_number".into(), json!(result.condition_number));
            report.insert("residual".into(), json!(result.residual));
            result.deviation
        }
        None => rho.deviation(),
    };
    let norm = deviation_error_norm(&deviation, &reference).map_err(at("reference"))?;
    report.insert("deviation".into(), output::matrix_json(&deviation));
    report.insert("error_norm".into(), json!(norm));
    report.insert("states".into(), json!(states(&sys)));
    Ok(pretty(&Value::Object(report)))
}

fn write_acquisitions(sim: &Simulator, rho0: &DensityMatrix, program: &CompiledProgram, dir: &Path) -> CliResult<()> {
    let sys = sim.system();
    for (i, step) in program.acquisitions.iter().enumerate() {
        let mut head: PulseSequence = program.sequence.clone();
        head.events.truncate(step.after_event);
        let (rho, frame) = sim.run_to_end(rho0, &head).map_err(at(format!("acquire #{}", i + 1)))?;
        let fid = simulate_fid(&rho, sys, &frame, &step.spins, &step.acquisition).map_err(at(format!("acquire #{}", i + 1)))?;
        for ch in &fid.channels {
            let s = spectrum(ch, fid.dt, DEFAULT_ZERO_FILL).map_err(at("spectrum"))?;
            let name = format!("acquire{}_{}.csv", i + 1, sys.label(ch.spin));
            output::write(dir, &name, &output::spectrum_csv(&s)).map_err(io_at(dir.display()))?;
        }
    }
    Ok(())
}
