//! `nbqc` subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use nbqc_core::ace_opt::{
    construct, spectrum_search_with_walks, EdgeOrderPolicy, FailureReport, OptError,
    OptimizerConfig, SearchConfig,
};
use nbqc_core::gf2m::{min_lambda, FieldDesc};
use nbqc_core::qclift::{spectra_from_walks, AceSpectrum, QcCode, DEFAULT_WALK_CAP};

use crate::descriptor::{self, CodeDescriptor};
use crate::simulator::{self, SimConfig, Transmission};
use crate::{formats, Error};

/// Environment variable with the default simulation thread count.
pub const THREADS_ENV: &str = "NBQC_THREADS";

#[derive(Debug, Parser)]
#[command(name = "nbqc", version, about = "Non-binary quasi-cyclic LDPC construction and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lift a protograph under ACE constraints and label it.
    Construct(ConstructArgs),
    /// Replace a code's labels with uniformly random ones.
    Relabel(RelabelArgs),
    /// Print the binary or non-binary ACE spectrum of a code.
    Spectrum(SpectrumArgs),
    /// Monte-Carlo BLER/BER over BPSK-AWGN.
    Simulate(SimulateArgs),
    /// Write the parity-check matrix or base matrices in a text format.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EdgeOrder {
    Fixed,
    Shuffled,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Base matrix file (rows of edge multiplicities).
    #[arg(long)]
    pub proto: PathBuf,
    /// Lifting order.
    #[arg(long = "Z", visible_alias = "z")]
    pub z: u32,
    /// Field size, a power of two.
    #[arg(long)]
    pub q: u32,
    /// MCPM exponent step; defaults to the smallest admissible value.
    #[arg(long)]
    pub lambda: Option<u32>,
    /// Primitive polynomial as an integer; defaults to the built-in one.
    #[arg(long)]
    pub poly: Option<u32>,
    /// Binary ACE constraint, e.g. `inf,inf,inf,4`, or `auto`.
    #[arg(long)]
    pub ace_b: String,
    /// Non-binary ACE constraint, or `auto`.
    #[arg(long)]
    pub ace_nb: String,
    #[arg(long)]
    pub seed: u64,
    /// Maximum depth for `auto` searches.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub max_sweeps: u32,
    #[arg(long, default_value_t = 20)]
    pub max_restarts: u32,
    #[arg(long, value_enum, default_value_t = EdgeOrder::Shuffled)]
    pub edge_order: EdgeOrder,
    /// Output descriptor.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RelabelArgs {
    pub code: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Depth of the recorded spectra.
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    pub code: PathBuf,
    #[arg(long)]
    pub depth: usize,
    #[arg(long, conflicts_with = "nb")]
    pub binary: bool,
    #[arg(long)]
    pub nb: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mode {
    AllZero,
    RandomMessage,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub code: PathBuf,
    /// Comma-separated Eb/N0 values in dB; `inf` is noiseless.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub snr: Vec<String>,
    #[arg(long, default_value_t = 100_000)]
    pub max_frames: u64,
    #[arg(long, default_value_t = 100)]
    pub min_errors: u64,
    #[arg(long, default_value_t = 80)]
    pub max_iters: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::AllZero)]
    pub mode: Mode,
    /// Worker threads; falls back to the NBQC_THREADS environment variable.
    #[arg(long)]
    pub threads: Option<usize>,
    /// CSV output.
    #[arg(long, short)]
    pub out: PathBuf,
    /// JSON sidecar; defaults to the CSV path with `.json` appended.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Alist,
    NbAlist,
    BaseMatrix,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    pub code: PathBuf,
    #[arg(long, value_enum)]
    pub format: Format,
    #[arg(long, short)]
    pub out: PathBuf,
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io { path: "<stdout>".into(), source: e }
}

fn parse_constraint(s: &str, what: &str) -> Result<AceSpectrum, Error> {
    s.parse().map_err(|_| Error::Input(format!("{what}: expected comma-separated integers or `inf`, got `{s}`")))
}

#[derive(Serialize)]
struct FailureJson {
    residual: usize,
    worst_cycle: Option<WorstJson>,
    sweeps_used: u32,
    restarts_used: u32,
    best_assignment: Vec<u32>,
}

#[derive(Serialize)]
struct WorstJson {
    length: usize,
    ace: u64,
    total_shift: u32,
    base_length: usize,
}

/// JSON form of an optimizer failure.
pub fn failure_json(r: &FailureReport) -> String {
    let j = FailureJson {
        residual: r.residual,
        worst_cycle: r.worst.map(|w| WorstJson {
            length: w.lifted_len,
            ace: w.lifted_ace,
            total_shift: w.total_shift,
            base_length: w.base_len,
        }),
        sweeps_used: r.sweeps_used,
        restarts_used: r.restarts_used,
        best_assignment: r.best.clone(),
    };
    serde_json::to_string_pretty(&j).expect("report serializes")
}

pub fn cmd_construct(a: &ConstructArgs, out: &mut dyn Write) -> Result<(), Error> {
    let proto = formats::parse_protograph(&read(&a.proto)?)?;
    let field = match a.poly {
        Some(p) => {
            let r = a.q.checked_ilog2().filter(|r| 1 << r == a.q).ok_or_else(|| Error::Input(format!("q = {} is not a power of two", a.q)))?;
            FieldDesc::new(r, Some(p))?
        }
        None => FieldDesc::with_size(a.q)?,
    };
    if a.z == 0 {
        return Err(Error::Input("Z must be positive".into()));
    }
    let lambda = a.lambda.unwrap_or_else(|| min_lambda(field.q(), a.z));
    let cfg = OptimizerConfig {
        max_sweeps: a.max_sweeps,
        max_restarts: a.max_restarts,
        rng_seed: a.seed,
        edge_order: match a.edge_order {
            EdgeOrder::Fixed => EdgeOrderPolicy::Fixed,
            EdgeOrder::Shuffled => EdgeOrderPolicy::Shuffled,
        },
    };
    cfg.validate()?;
    // Validate lambda before any search.
    QcCode::new(proto.clone(), a.z, vec![0; proto.n_edges()], None, lambda, field.clone())?;

    let built = match (a.ace_b.as_str(), a.ace_nb.as_str()) {
        ("auto", "auto") => {
            let depth = a.depth.unwrap_or(10);
            if depth % 2 != 0 || depth < 2 {
                return Err(Error::Input(format!("depth {depth} must be even and at least 2")));
            }
            let walks = proto.enumerate_closed_walks(depth, DEFAULT_WALK_CAP)?;
            let search = SearchConfig { optimizer: cfg, ..SearchConfig::new(a.seed, depth) };
            let outcome = spectrum_search_with_walks(&proto, a.z, &field, lambda, &search, &walks)?;
            for c in &outcome.pareto {
                writeln!(out, "candidate: binary {} nb {}", c.binary, c.nb).map_err(io_err)?;
            }
            outcome.best
        }
        ("auto", _) | (_, "auto") => {
            return Err(Error::Input("`auto` must be given for both --ace-b and --ace-nb".into()));
        }
        (b, nb) => {
            let tb = parse_constraint(b, "--ace-b")?;
            let tnb = parse_constraint(nb, "--ace-nb")?;
            if tb.depth() == 0 || tnb.depth() == 0 {
                return Err(Error::Input("constraints must not be empty".into()));
            }
            let depth = tb.depth().max(tnb.depth());
            let walks = proto.enumerate_closed_walks(depth, DEFAULT_WALK_CAP)?;
            construct(&proto, a.z, &field, lambda, &tb, &tnb, &cfg, &walks)?
        }
    };
    let d = CodeDescriptor::from_code(&built.code, Some(a.seed), Some(&built.binary), Some(&built.nb));
    write(&a.out, &d.to_json())?;
    writeln!(out, "binary: {}\nnb: {}", built.binary, built.nb).map_err(io_err)?;
    Ok(())
}

pub fn cmd_relabel(a: &RelabelArgs, out: &mut dyn Write) -> Result<(), Error> {
    let (_, code) = descriptor::load(&a.code)?;
    if a.depth % 2 != 0 {
        return Err(Error::Input(format!("depth {} is not even", a.depth)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let labels = (0..code.proto().n_edges()).map(|_| rng.random_range(0..code.field().order())).collect();
    let code = code.with_labels(labels)?;
    let walks = code.proto().enumerate_closed_walks(a.depth, DEFAULT_WALK_CAP)?;
    let s = spectra_from_walks(&code, &walks, a.depth);
    let nb = s.nb.expect("labelled");
    let d = CodeDescriptor::from_code(&code, Some(a.seed), Some(&s.binary), Some(&nb));
    write(&a.out, &d.to_json())?;
    writeln!(out, "binary: {}\nnb: {}", s.binary, nb).map_err(io_err)?;
    Ok(())
}

pub fn cmd_spectrum(a: &SpectrumArgs, out: &mut dyn Write) -> Result<(), Error> {
    let (_, code) = descriptor::load(&a.code)?;
    if a.depth % 2 != 0 {
        return Err(Error::Input(format!("depth {} is not even", a.depth)));
    }
    if a.nb && code.labels().is_none() {
        return Err(Error::Input("code has no labels".into()));
    }
    let walks = code.proto().enumerate_closed_walks(a.depth, DEFAULT_WALK_CAP)?;
    let s = spectra_from_walks(&code, &walks, a.depth);
    let (kind, spectrum) = if a.nb { ("nb", s.nb.expect("labelled")) } else { ("binary", s.binary) };
    if a.json {
        let j = serde_json::json!({ "kind": kind, "depth": a.depth, "spectrum": spectrum.to_text() });
        writeln!(out, "{j}").map_err(io_err)?;
    } else {
        writeln!(out, "{spectrum}").map_err(io_err)?;
    }
    Ok(())
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Error> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Error::Input(format!("{THREADS_ENV}={v} is not a number"))),
        Err(_) => Ok(None),
    }
}

pub fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<(), Error> {
    let (d, code) = descriptor::load(&a.code)?;
    let h = code.expand()?;
    let snr_db = a
        .snr
        .iter()
        .map(|s| match s.trim() {
            "inf" | "+inf" => Ok(f64::INFINITY),
            t => t.parse::<f64>().map_err(|_| Error::Input(format!("bad SNR `{t}`"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = SimConfig {
        snr_db,
        max_frames: a.max_frames,
        min_block_errors: a.min_errors,
        max_iters: a.max_iters,
        seed: a.seed,
        mode: match a.mode {
            Mode::AllZero => Transmission::AllZero,
            Mode::RandomMessage => Transmission::RandomMessage,
        },
    };
    let rate = code.proto().design_rate();
    let digest = d.digest();
    let run = || simulator::run_campaign(&h, rate, &digest, &cfg);
    let result = match thread_count(a.threads)? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Input(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let csv = simulator::to_csv(&result);
    write(&a.out, &csv)?;
    let sidecar = a.sidecar.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".json");
        p.into()
    });
    write(&sidecar, &simulator::sidecar_json(&cfg, rate, &result))?;
    out.write_all(csv.as_bytes()).map_err(io_err)?;
    Ok(())
}

pub fn cmd_export(a: &ExportArgs, _out: &mut dyn Write) -> Result<(), Error> {
    let (_, code) = descriptor::load(&a.code)?;
    let text = match a.format {
        Format::Alist => formats::write_alist(&code.expand_binary()?),
        Format::NbAlist => {
            if code.labels().is_none() {
                return Err(Error::Input("nb-alist needs a labelled code".into()));
            }
            formats::write_nb_alist(&code.expand()?)
        }
        Format::BaseMatrix => formats::write_base_matrix(&code),
    };
    write(&a.out, &text)
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), Error> {
    match &cli.command {
        Command::Construct(a) => cmd_construct(a, out),
        Command::Relabel(a) => cmd_relabel(a, out),
        Command::Spectrum(a) => cmd_spectrum(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Export(a) => cmd_export(a, out),
    }
}

/// Message for stderr, with the failure report for constraint failures.
pub fn describe(e: &Error) -> String {
    match e {
        Error::Opt(OptError::Failed(r)) => format!("error: {e}\n{}", failure_json(r)),
        _ => format!("error: {e}"),
    }
}
