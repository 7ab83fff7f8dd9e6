mod args;
mod plot;

use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use anyhow::Context;
use bandtouch::dynamics::{self, Protocol};
use bandtouch::sweep::{self, SweepSpec};
use bandtouch::{fis, ModelSpec};
use clap::{Parser, Subcommand};
use serde_json::json;

use args::{AxisArg, Format, MeasureArg, ModelArgs, OutputArgs, ProtocolArgs, Range};

/// Rejected input detected by the front end itself.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug)]
struct OracleMismatch(String);

impl std::fmt::Display for OracleMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for OracleMismatch {}

/// Fidelity susceptibility and driven dynamics of two-band touching points.
#[derive(Parser, Debug)]
#[command(name = "bandtouch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample χ(λ) and locate its peaks and the minimum gap.
    Fis {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "-2:2:400", allow_hyphen_values = true)]
        range: Range,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Integrate one drive and report the excitation probability.
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        /// Record every k-th step; 0 keeps the endpoints only.
        #[arg(long, default_value_t = 100)]
        sample_every: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Split a pl2 drive at its midpoint into interfering paths.
    Phase {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Final probability (and optionally the phase) over a parameter grid.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// Evenly spaced grid `min:max:steps`.
        #[arg(long, conflicts_with = "values", required_unless_present = "values")]
        range: Option<Range>,
        /// Explicit comma-separated grid.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "p")]
        measure: Vec<MeasureArg>,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare the production integrator with the independent ones.
    OracleCheck {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        /// Largest accepted difference in the final probability.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if cause.is::<OracleMismatch>() {
            return 3;
        }
        if let Some(err) = cause.downcast_ref::<bandtouch::Error>() {
            return match err {
                _ if err.is_numerical() => 3,
                bandtouch::Error::Io { .. } | bandtouch::Error::Json(_) => 1,
                bandtouch::Error::AtAxisValue { source, .. } if matches!(**source, bandtouch::Error::Io { .. }) => 1,
                _ => 2,
            };
        }
    }
    1
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Fis { model, range, output } => run_fis(&model, range, &output),
        Command::Evolve { model, protocol, sample_every, output } => run_evolve(&model, &protocol, sample_every, &output),
        Command::Phase { model, protocol, output } => run_phase(&model, &protocol, &output),
        Command::Sweep { model, protocol, axis, range, values, measure, threads, output } => {
            let values = match (range, values) {
                (Some(r), None) => r.values(),
                (None, Some(v)) => v,
                _ => return Err(UsageError("give exactly one of --range or --values".into()).into()),
            };
            run_sweep(&model, &protocol, axis, values, &measure, threads, &output)
        }
        Command::OracleCheck { model, protocol, tol } => run_oracle(&model, &protocol, tol),
    }
}

fn print_config(value: serde_json::Value) {
    eprintln!("{}", serde_json::to_string_pretty(&value).expect("json value"));
}

/// Writes `data` to `--out` (or stdout) and prints `summary` to whichever
/// stream does not carry the data.
fn emit(output: &OutputArgs, data: &str, summary: &str, script: impl FnOnce(&Path, &Path) -> String) -> anyhow::Result<()> {
    match &output.out {
        Some(path) => {
            std::fs::write(path, data)
                .map_err(|e| bandtouch::Error::Io { path: path.clone(), source: e })
                .context("writing output")?;
            if let Some(sp) = &output.plot_script {
                std::fs::write(sp, script(sp, path))
                    .map_err(|e| bandtouch::Error::Io { path: sp.clone(), source: e })
                    .context("writing plot script")?;
            }
            print!("{summary}");
        }
        None => {
            print!("{data}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn run_fis(model: &ModelArgs, range: Range, output: &OutputArgs) -> anyhow::Result<()> {
    output.validate()?;
    let model = model.resolve()?;
    print_config(json!({ "command": "fis", "model": model, "range": [range.min, range.max, range.steps] }));
    let profile = fis::fis_profile(&model, range.min, range.max, range.steps)?;
    let data = match output.format {
        Format::Csv => {
            let mut s = String::from("lambda,chi\n");
            for (l, c) in profile.lambdas.iter().zip(&profile.chi) {
                let _ = writeln!(s, "{l:?},{c:?}");
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&profile)? + "\n",
    };
    let summary = format!("mfp = {:?}\nmgp = {:?}\nchi(0) = {:?}\n", profile.mfp, profile.mgp, profile.chi_at_zero);
    emit(output, &data, &summary, plot::fis)
}

fn run_evolve(model: &ModelArgs, protocol: &ProtocolArgs, sample_every: usize, output: &OutputArgs) -> anyhow::Result<()> {
    output.validate()?;
    let model = model.resolve()?;
    let protocol = protocol.resolve()?;
    print_config(json!({ "command": "evolve", "model": model, "protocol": protocol, "sample_every": sample_every }));
    let traj = dynamics::evolve(&model, &protocol, sample_every)?;
    let p = dynamics::transition_probability(&traj)?;
    let data = match output.format {
        Format::Csv => traj.to_csv(),
        Format::Json => serde_json::to_string_pretty(&traj)? + "\n",
    };
    emit(output, &data, &format!("P = {p:?}\n"), plot::evolve)
}

fn run_phase(model: &ModelArgs, protocol: &ProtocolArgs, output: &OutputArgs) -> anyhow::Result<()> {
    output.validate()?;
    if output.plot_script.is_some() {
        return Err(UsageError("phase has no plot script".into()).into());
    }
    let model = model.resolve()?;
    let protocol = protocol.resolve()?;
    print_config(json!({ "command": "phase", "model": model, "protocol": protocol }));
    let d = dynamics::split_phase_analysis(&model, &protocol)?;
    let data = match output.format {
        Format::Csv => {
            let mut s = String::from("quantity,re,im\n");
            for (name, z) in [
                ("alpha_plus", d.alpha_plus),
                ("alpha_minus", d.alpha_minus),
                ("beta_pp", d.beta_pp),
                ("beta_pm", d.beta_pm),
                ("beta_mp", d.beta_mp),
                ("beta_mm", d.beta_mm),
            ] {
                let _ = writeln!(s, "{name},{:?},{:?}", z.re, z.im);
            }
            for (name, x) in [
                ("delta_phi", d.delta_phi),
                ("p_reconstructed", d.p_reconstructed),
                ("p_direct", d.p_direct),
                ("midpoint", d.midpoint),
            ] {
                let _ = writeln!(s, "{name},{x:?},0.0");
            }
            s
        }
        Format::Json => d.to_json() + "\n",
    };
    let summary = format!(
        "delta_phi = {:?}\np_direct = {:?}\np_reconstructed = {:?}\n",
        d.delta_phi, d.p_direct, d.p_reconstructed
    );
    emit(output, &data, &summary, |_, _| String::new())
}

fn run_sweep(
    model: &ModelArgs,
    protocol: &ProtocolArgs,
    axis: AxisArg,
    values: Vec<f64>,
    measure: &[MeasureArg],
    threads: Option<usize>,
    output: &OutputArgs,
) -> anyhow::Result<()> {
    output.validate()?;
    if threads == Some(0) {
        return Err(UsageError("--threads must be positive".into()).into());
    }
    let model = model.resolve()?;
    let protocol = protocol.resolve()?;
    let measures: Vec<sweep::Measure> = measure.iter().map(|&m| m.into()).collect();
    let spec = SweepSpec::new(model, axis.into(), values, protocol, measures).map_err(|e| UsageError(e.to_string()))?;
    let workers = sweep::resolve_workers(threads);
    print_config(json!({ "command": "sweep", "spec": spec, "workers": workers }));
    let result = sweep::run_sweep(&spec, workers)?;
    let data = match output.format {
        Format::Csv => result.to_csv(),
        Format::Json => result.to_json(),
    };
    let p = result.p();
    let x = result.axis_values();
    let mut summary = format!("points = {}\n", p.len());
    let maxima: Vec<f64> = sweep::local_maxima(&p, sweep::PROMINENCE_FLOOR).into_iter().map(|i| x[i]).collect();
    let _ = writeln!(summary, "maxima at {maxima:?}");
    if let Some(period) = sweep::oscillation_period(&x, &p) {
        let _ = writeln!(summary, "period = {period:?}");
    }
    let axis_name = match axis {
        AxisArg::Delta => "coupling",
        AxisArg::Speed => "c",
        AxisArg::Exponent => "n",
    };
    let phase = spec.wants_phase();
    emit(output, &data, &summary, |sp, d| plot::sweep(sp, d, axis_name, phase))
}

fn run_oracle(model: &ModelArgs, protocol: &ProtocolArgs, tol: f64) -> anyhow::Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(UsageError("--tol must be positive".into()).into());
    }
    let model: ModelSpec = model.resolve()?;
    let protocol: Protocol = protocol.resolve()?;
    print_config(json!({ "command": "oracle-check", "model": model, "protocol": protocol, "tol": tol }));
    let cn = dynamics::final_probability(&model, &protocol)?;
    let rk4 = dynamics::transition_probability(&dynamics::rk4_oracle_evolve(&model, &protocol, protocol.dt / 5.0)?)?;
    let adiabatic = match dynamics::adiabatic_frame_evolve(&model, &protocol) {
        Ok(r) => Some(r.p_excited()),
        Err(bandtouch::Error::GapCollapse { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let mut worst = (cn - rk4).abs();
    println!("cn = {cn:?}");
    println!("rk4 = {rk4:?} (|diff| = {:.3e})", (cn - rk4).abs());
    match adiabatic {
        Some(a) => {
            worst = worst.max((cn - a).abs());
            println!("adiabatic = {a:?} (|diff| = {:.3e})", (cn - a).abs());
        }
        None => println!("adiabatic = skipped (path crosses the touching point)"),
    }
    if worst > tol {
        return Err(OracleMismatch(format!("integrators disagree by {worst:.3e} > {tol:.3e}")).into());
    }
    println!("ok: worst |diff| = {worst:.3e} <= {tol:.3e}");
    Ok(())
}
