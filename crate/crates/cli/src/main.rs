use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use agcodes::codec::{
    self, decode, format_word, parse_word, unique_decode, AGCode, Backend, CodeDescriptor, CodecError, DecodeParams,
};
use agcodes::curve::{CurveCtx, CurveKind};
use agcodes::experiment::{corrupt, rows_to_csv, run_experiment, trial_rng, ExperimentError, ExperimentSpec};
use agcodes::modform;
use agcodes::oracle::{exhaustive_list, OracleBudget, OracleError};
use agcodes::radius::{self, tau_best, tau_classic, tau_general, Frac, GsParams};
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "agcodes", version, about = "List decoding of one-point AG codes")]
struct Cli {
    /// Interpolation backend
    #[arg(long, global = true)]
    backend: Option<Backend>,
    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Code descriptors
    Code {
        #[command(subcommand)]
        action: CodeAction,
    },
    /// Encode a message file (space-separated field elements)
    Encode { code: PathBuf, message: PathBuf },
    /// Change exactly `weight` symbols of a word
    Corrupt { code: PathBuf, word: PathBuf, weight: usize },
    /// Decode a received word
    Decode(DecodeArgs),
    /// CSV of decoding radii over a parameter grid
    RadiusTable {
        code: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2])]
        s: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3])]
        ell: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0u32, 1, 2])]
        e: Vec<u32>,
    },
    /// Monte-Carlo decoding experiment, CSV output
    Experiment { spec: PathBuf },
    /// Compare the decoder list with brute-force enumeration
    OracleCheck {
        code: PathBuf,
        word: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Subcommand)]
enum CodeAction {
    /// Write a descriptor for the code of L(m P_inf)
    New {
        kind: CurveKind,
        base: u32,
        m: u32,
        /// Excluded affine places as "(a,b)"; the last one is reserved
        #[arg(long)]
        exclude: Vec<String>,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 1)]
    s: u64,
    #[arg(long, default_value_t = 1)]
    ell: u64,
    #[arg(long, default_value_t = 0)]
    e: u32,
    /// Target radius; defaults to the guaranteed one
    #[arg(long)]
    tau: Option<u64>,
}

#[derive(Args)]
struct DecodeArgs {
    code: PathBuf,
    word: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Try e = 0 first, then the penalty-free exponent
    #[arg(long, conflicts_with_all = ["unique", "tau"])]
    adaptive: bool,
    /// Bounded-distance decoding to half the designed distance
    #[arg(long)]
    unique: bool,
    /// Write the module basis before and after reduction to this file
    #[arg(long)]
    dump_module: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("oracle mismatch: decoder found {decoder}, oracle found {oracle}")]
    Mismatch { decoder: usize, oracle: usize },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Codec(CodecError::UniqueDecodingFailure) => 3,
            CliError::Mismatch { .. } => 1,
            _ => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn load_code(path: &Path) -> Result<AGCode, CliError> {
    Ok(AGCode::from_descriptor(&CodeDescriptor::from_toml(&read(path)?)?)?)
}

fn load_word(code: &AGCode, path: &Path) -> Result<Vec<agcodes::gf::Gf>, CliError> {
    Ok(parse_word(&read(path)?, code.field())?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Config(format!("{}: {e}", path.display()))),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn decode_params(p: &ParamArgs, backend: Backend) -> DecodeParams {
    let mut params = DecodeParams::new(p.s, p.ell, p.e).with_backend(backend);
    if let Some(t) = p.tau {
        params = params.with_tau(t);
    }
    params
}

fn code_new(kind: CurveKind, base: u32, m: u32, exclude: &[String]) -> Result<String, CliError> {
    let curve = Arc::new(CurveCtx::new(kind, base).map_err(CodecError::from)?);
    let code = if exclude.is_empty() {
        AGCode::with_default_exclusion(curve, m)?
    } else {
        let places = exclude
            .iter()
            .map(|s| curve.parse_place(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(CodecError::from)?;
        AGCode::new(curve, m, &places)?
    };
    eprintln!("{code}");
    Ok(code.descriptor().to_toml())
}

fn cmd_decode(args: &DecodeArgs, backend: Backend) -> Result<String, CliError> {
    let code = load_code(&args.code)?;
    let received = load_word(&code, &args.word)?;
    if args.unique {
        let entry = unique_decode(&code, &received, backend)?;
        return Ok(format!("{}\t{}\t{}\n", entry.distance, format_word(&entry.message), format_word(&entry.codeword)));
    }
    let mut params = decode_params(&args.params, backend);
    if args.adaptive {
        params = params.adaptive();
    }
    if let Some(path) = &args.dump_module {
        let gs = params.gs();
        let tau = codec::resolve_tau(&code, &gs, params.tau)?;
        let mx = codec::module_matrix(&code, &received, &gs, tau);
        let reduced = modform::shifted_reduce(&mx, code.field());
        let text = format!("{}# reduced\n{}", mx.to_text(), reduced.to_text());
        fs::write(path, text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    }
    let res = decode(&code, &received, &params)?;
    let mut out = format!(
        "# backend={} e={} tau={} q_found={} entries={}\n",
        res.backend,
        res.e_used,
        res.tau,
        res.q_found,
        res.entries.len()
    );
    for e in &res.entries {
        out.push_str(&format!("{}\t{}\t{}\n", e.distance, format_word(&e.message), format_word(&e.codeword)));
    }
    Ok(out)
}

fn radius_table(code: &AGCode, s_list: &[u64], ell_list: &[u64], e_list: &[u32]) -> String {
    let shape = code.shape();
    let mut out = String::from("n,degG,g,p,s,ℓ,e,t*,tau,tau_classic,penalty_reduction\n");
    for &s in s_list {
        for &ell in ell_list {
            for &e in e_list {
                let params = GsParams { s, ell, e };
                if radius::check_feasible(&shape, &params).is_err() {
                    continue;
                }
                let (tau, t) = tau_best(&shape, &params);
                let reduction = tau - tau_general(&shape, &GsParams { e: 0, ..params }, t);
                out.push_str(&format!(
                    "{},{},{},{},{s},{ell},{e},{t},{},{},{}\n",
                    shape.n,
                    shape.deg_g,
                    shape.g,
                    shape.p,
                    Frac(&tau),
                    Frac(&tau_classic(&shape, s, ell)),
                    Frac(&reduction)
                ));
            }
        }
    }
    out
}

fn run(cli: Cli) -> Result<(), CliError> {
    let backend = cli.backend.unwrap_or_default();
    let text = match &cli.command {
        Command::Code { action: CodeAction::New { kind, base, m, exclude } } => code_new(*kind, *base, *m, exclude)?,
        Command::Encode { code, message } => {
            let code = load_code(code)?;
            let msg = parse_word(&read(message)?, code.field())?;
            format_word(&code.encode(&msg)?) + "\n"
        }
        Command::Corrupt { code, word, weight } => {
            let code = load_code(code)?;
            let w = load_word(&code, word)?;
            let mut rng = trial_rng(cli.seed, 0, 0);
            format_word(&corrupt(&w, *weight, code.field(), &mut rng)?) + "\n"
        }
        Command::Decode(args) => cmd_decode(args, backend)?,
        Command::RadiusTable { code, s, ell, e } => radius_table(&load_code(code)?, s, ell, e),
        Command::Experiment { spec } => {
            let mut spec = ExperimentSpec::from_toml(&read(spec)?)?;
            if cli.backend.is_some() {
                spec.backend = cli.backend;
            }
            rows_to_csv(&run_experiment(&spec)?)
        }
        Command::OracleCheck { code, word, params } => {
            let code = load_code(code)?;
            let received = load_word(&code, word)?;
            let res = decode(&code, &received, &decode_params(params, backend))?;
            let want = exhaustive_list(&code, &received, res.tau, &OracleBudget::default())?;
            if res.entries != want {
                return Err(CliError::Mismatch { decoder: res.entries.len(), oracle: want.len() });
            }
            format!("ok tau={} entries={}\n", res.tau, want.len())
        }
    };
    emit(&cli.out, &text)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
