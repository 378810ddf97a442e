//! Command-line front end.
//!
//! Exit codes: 0 success, 1 runtime error, 2 usage or config error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;

use crate::analysis::{run_error_experiment, sweep_input_output, write_sweep_csv, SweepSpec};
use crate::config::{RunConfig, Workload};
use crate::device::{VariationModel, Weight};
use crate::energy::{inference_energy_report, neuron_energy, EnergyReport, OPS_PER_SYNAPSE};
use crate::error::{Error, Result};
use crate::network::{forward_network, load_weights, LayerSpec, Network, NetworkSpec, WeightMatrix};
use crate::neuron::{simulate_neuron, NeuronOutput};
use crate::report::{load_vector, parse_vector, write_key_values};
use crate::rng::stream_rng;
use crate::signal::{encode_value, PwmSignal};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Stream for randomly generated weights and workloads.
const WORKLOAD_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "tact-pwm", version, about = "Time-domain analog PWM neural network simulator")]
pub struct Cli {
    /// Run configuration (TOML with unit-suffixed quantities).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the mismatch and experiment seeds.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file for CSV data.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one dual-rail neuron and its energy.
    Neuron {
        /// Input values in [0, 1], comma separated. Defaults to all zero.
        #[arg(long, allow_hyphen_values = true)]
        inputs: Option<String>,
        /// File with input values.
        #[arg(long, conflicts_with = "inputs")]
        inputs_file: Option<PathBuf>,
        /// 1 x N weight file. Defaults to all +1.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Sweep input width and record mean and deviation of the output.
    Sweep,
    /// Random-weight, random-input error experiment.
    Montecarlo,
    /// Run a network given weight files (one per layer, in order).
    Infer {
        #[arg(long, required = true)]
        weights: Vec<PathBuf>,
        #[arg(long)]
        input: PathBuf,
    },
    /// Energy, throughput and efficiency of one layer inference.
    Energy {
        /// Weight file; defaults to a random n_neurons x n_inputs matrix.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
}

/// Parses `args` and runs the command, writing results to `stdout` and
/// diagnostics to `stderr`. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

fn load_config(cli: &Cli, stderr: &mut dyn Write) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(|e| match e {
            // an unreadable config is a usage problem
            Error::Io { path, source } => Error::config(format!("{}: {source}", path.display())),
            other => other,
        })?,
        None => RunConfig::default(),
    };
    for w in &cfg.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    if let Some(seed) = cli.seed {
        cfg = cfg.with_seed(seed);
    }
    Ok(cfg)
}

fn out_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn create_out(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = load_config(cli, stderr)?;
    match &cli.command {
        Command::Neuron {
            inputs,
            inputs_file,
            weights,
        } => cmd_neuron(&cfg, cli, inputs.as_deref(), inputs_file.as_deref(), weights.as_deref(), stdout),
        Command::Sweep => cmd_sweep(&cfg, cli, stdout),
        Command::Montecarlo => cmd_montecarlo(&cfg, cli, stdout),
        Command::Infer { weights, input } => cmd_infer(&cfg, cli, weights, input, stdout),
        Command::Energy { weights } => cmd_energy(&cfg, cli, weights.as_deref(), stdout),
    }
}

#[derive(Serialize)]
struct NeuronReport<'a> {
    neuron: &'a NeuronOutput,
    energy: &'a EnergyReport,
}

fn neuron_key_values(out: &NeuronOutput) -> Vec<(&'static str, f64)> {
    vec![
        ("w_plus_s", out.w_plus),
        ("w_minus_s", out.w_minus),
        ("w_relu_s", out.w_relu),
        ("v_mac_plus_v", out.plus.v_mac),
        ("v_mac_minus_v", out.minus.v_mac),
        ("q_plus_c", out.plus.charge),
        ("q_minus_c", out.minus.charge),
        ("saturated_plus", f64::from(u8::from(out.plus.saturated))),
        ("saturated_minus", f64::from(u8::from(out.minus.saturated))),
    ]
}

fn single_row(matrix: WeightMatrix) -> Result<Vec<Weight>> {
    if matrix.rows() != 1 {
        return Err(Error::config(format!(
            "neuron weights must have exactly 1 row, got {}",
            matrix.rows()
        )));
    }
    Ok(matrix.row(0).to_vec())
}

fn cmd_neuron(
    cfg: &RunConfig,
    cli: &Cli,
    inputs: Option<&str>,
    inputs_file: Option<&Path>,
    weights: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let weights = match weights {
        Some(p) => Some(single_row(load_weights(p)?)?),
        None => None,
    };
    let values = match (inputs, inputs_file) {
        (Some(s), _) => parse_vector(s, Path::new("--inputs"))?,
        (None, Some(p)) => load_vector(p)?,
        (None, None) => vec![0.0; weights.as_ref().map_or(cfg.experiment.n_inputs, Vec::len)],
    };
    let weights = weights.unwrap_or_else(|| vec![Weight::Plus; values.len()]);
    if weights.len() != values.len() {
        return Err(Error::config(format!(
            "{} inputs for {} weights",
            values.len(),
            weights.len()
        )));
    }
    let pulses = values
        .iter()
        .map(|&x| encode_value(x, &cfg.neuron.frame))
        .collect::<Result<Vec<PwmSignal>>>()
        .map_err(|e| Error::config(e.to_string()))?;
    let setup = cfg.setup();
    let synapses = setup.synapses(&weights, Some(&cfg.variation));
    let out = simulate_neuron(&pulses, &synapses, &cfg.device, &cfg.neuron)?;
    let (e_mac, e_vpc) = neuron_energy(&cfg.neuron, &out, &cfg.energy.params);
    let ops = weights.len() as u64 * OPS_PER_SYNAPSE;
    let energy = EnergyReport::new(e_mac, e_vpc, ops, cfg.energy.cycle_freq);

    match cli.format {
        Format::Json => {
            serde_json::to_writer_pretty(
                &mut *stdout,
                &NeuronReport {
                    neuron: &out,
                    energy: &energy,
                },
            )
            .map_err(|e| out_err(e.into()))?;
            writeln!(stdout).map_err(out_err)?;
        }
        Format::Text | Format::Csv => {
            let mut kv = neuron_key_values(&out);
            kv.extend(energy.key_values());
            write_key_values(stdout, &kv).map_err(out_err)?;
        }
    }
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let setup = cfg.setup();
    let n = cfg.experiment.n_inputs;
    let sweep = SweepSpec {
        synapses: setup.synapses(&vec![Weight::Plus; n], Some(&cfg.variation)),
        base_inputs: vec![PwmSignal::ZERO; n],
        swept: (0..cfg.experiment.sweep_inputs).collect(),
        n_points: cfg.experiment.sweep_points,
        averaging_runs: cfg.experiment.averaging_runs,
        jitter: cfg.variation,
    };
    let points = sweep_input_output(&setup, &sweep)?;
    match &cli.out {
        Some(path) => {
            let mut f = create_out(path)?;
            write_sweep_csv(&points, &mut f)?;
            f.flush().map_err(|e| Error::io(path, e))?;
        }
        None => match cli.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *stdout, &points).map_err(|e| out_err(e.into()))?;
                writeln!(stdout).map_err(out_err)?;
            }
            _ => write_sweep_csv(&points, &mut *stdout)?,
        },
    }
    Ok(())
}

fn cmd_montecarlo(cfg: &RunConfig, cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let stats = run_error_experiment(&cfg.trial_config(), &cfg.setup())?;
    if let Some(path) = &cli.out {
        let mut f = create_out(path)?;
        stats.write_csv(&mut f)?;
        f.flush().map_err(|e| Error::io(path, e))?;
    }
    match cli.format {
        Format::Json => {
            let summary: serde_json::Map<String, serde_json::Value> = stats
                .key_values()
                .into_iter()
                .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
                .collect();
            serde_json::to_writer_pretty(&mut *stdout, &summary).map_err(|e| out_err(e.into()))?;
            writeln!(stdout).map_err(out_err)?;
        }
        Format::Csv if cli.out.is_none() => stats.write_csv(&mut *stdout)?,
        _ => write_key_values(stdout, &stats.key_values()).map_err(out_err)?,
    }
    Ok(())
}

fn layer_spec(cfg: &RunConfig, weights: WeightMatrix) -> LayerSpec {
    LayerSpec {
        weights,
        neuron_cfg: cfg.neuron,
        device_params: cfg.device,
    }
}

fn mismatch(cfg: &RunConfig) -> Option<VariationModel> {
    (cfg.variation.sigma_vth > 0.0).then_some(cfg.variation)
}

fn cmd_infer(cfg: &RunConfig, cli: &Cli, weights: &[PathBuf], input: &Path, stdout: &mut dyn Write) -> Result<()> {
    let layers = weights
        .iter()
        .map(|p| load_weights(p).map(|m| layer_spec(cfg, m)))
        .collect::<Result<Vec<_>>>()?;
    let net = Network::build(NetworkSpec { layers }, mismatch(cfg).as_ref())?;
    let x = load_vector(input)?;
    if x.len() != net.n_inputs() {
        return Err(Error::config(format!(
            "input has {} values, network takes {}",
            x.len(),
            net.n_inputs()
        )));
    }
    let y = forward_network(&net, &x).map_err(|e| match e {
        Error::Domain(msg) => Error::config(msg),
        other => other,
    })?;
    match cli.format {
        Format::Json => {
            serde_json::to_writer(&mut *stdout, &y).map_err(|e| out_err(e.into()))?;
            writeln!(stdout).map_err(out_err)?;
        }
        Format::Csv => {
            writeln!(stdout, "index,value").map_err(out_err)?;
            for (i, v) in y.iter().enumerate() {
                writeln!(stdout, "{i},{v:e}").map_err(out_err)?;
            }
        }
        Format::Text => {
            for v in &y {
                writeln!(stdout, "{v:e}").map_err(out_err)?;
            }
        }
    }
    Ok(())
}

/// Random `n_neurons x layer_inputs` weights and the configured input workload, both drawn
/// from the experiment seed.
pub fn energy_workload(cfg: &RunConfig) -> (WeightMatrix, Vec<f64>) {
    let ex = &cfg.experiment;
    let mut rng = stream_rng(ex.seed, WORKLOAD_STREAM);
    let data = (0..ex.n_neurons * ex.layer_inputs)
        .map(|_| if rng.random_bool(0.5) { Weight::Plus } else { Weight::Minus })
        .collect();
    let weights = WeightMatrix::new(ex.n_neurons, ex.layer_inputs, data).expect("sized above");
    let input = match cfg.energy.workload {
        Workload::Level(x) => vec![x; ex.layer_inputs],
        Workload::Named(_) => (0..ex.layer_inputs).map(|_| rng.random_range(0.0..=1.0)).collect(),
    };
    (weights, input)
}

/// Energy report of one layer inference under the configured workload.
pub fn layer_energy_report(cfg: &RunConfig, weights: Option<WeightMatrix>) -> Result<EnergyReport> {
    let (random_weights, mut input) = energy_workload(cfg);
    let weights = weights.unwrap_or(random_weights);
    if weights.cols() != input.len() {
        input = match cfg.energy.workload {
            Workload::Level(x) => vec![x; weights.cols()],
            Workload::Named(_) => {
                let mut rng = stream_rng(cfg.experiment.seed, WORKLOAD_STREAM + 1);
                (0..weights.cols()).map(|_| rng.random_range(0.0..=1.0)).collect()
            }
        };
    }
    let net = Network::build(
        NetworkSpec {
            layers: vec![layer_spec(cfg, weights)],
        },
        mismatch(cfg).as_ref(),
    )?;
    inference_energy_report(&net, &input, &cfg.energy.params, cfg.energy.cycle_freq)
}

fn cmd_energy(cfg: &RunConfig, cli: &Cli, weights: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let weights = weights.map(load_weights).transpose()?;
    let report = layer_energy_report(cfg, weights)?;
    match cli.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *stdout, &report).map_err(|e| out_err(e.into()))?;
            writeln!(stdout).map_err(out_err)?;
        }
        _ => write_key_values(stdout, &report.key_values()).map_err(out_err)?,
    }
    Ok(())
}
