//! `grain-ple` command-line tool.
//!
//! Exit codes: 0 success, 2 usage error, 1 runtime error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use grain_ple::channel::{self, SweepConfig};
use grain_ple::frame::{self, file::FrameFile, Frame};
use grain_ple::grain::{self, golden, GrainCipher, WordGrain};
use grain_ple::session::{FileStore, FrameDecision, KeyId, SessionRecord};
use grain_ple::{Backend, Codec, Grain, KeyMaterial, Nonce, PipelineConfig};

const STORE_ENV: &str = "GRAIN_PLE_STORE_DIR";

#[derive(Parser)]
#[command(name = "grain-ple", version, about = "Grain-128PLE physical-layer encryption toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print keystream bits as hex (MSB-first packing).
    Keystream(KeystreamArgs),
    /// Encrypt a PLE1 frame file.
    Encrypt(CryptArgs),
    /// Decrypt a PLE1 frame file.
    Decrypt(CryptArgs),
    /// Wrap raw bytes into a PLE1 frame file.
    Frame(FrameArgs),
    /// Simulate the coded, encrypted link over a BSC and print CSV.
    Simulate(SimulateArgs),
    /// Print register snapshots (rounds 320, 384, 512) and a keystream prefix.
    Vectors(VectorArgs),
    /// Measure keystream throughput of both backends.
    Bench(BenchArgs),
}

fn parse_key(s: &str) -> Result<KeyMaterial, String> {
    KeyMaterial::from_hex(s).map_err(|e| format!("key must be 32 hex characters: {e}"))
}

fn parse_nonce(s: &str) -> Result<Nonce, String> {
    Nonce::from_hex(s).map_err(|e| format!("nonce must be 24 hex characters: {e}"))
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("{p} is outside [0, 1]"))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args)]
struct KeystreamArgs {
    #[arg(long, value_parser = parse_key)]
    key: KeyMaterial,
    #[arg(long, value_parser = parse_nonce)]
    nonce: Nonce,
    #[arg(long)]
    bits: usize,
    #[arg(long, default_value = "optimized")]
    backend: Backend,
}

#[derive(Args)]
struct CryptArgs {
    #[arg(long, value_parser = parse_key)]
    key: KeyMaterial,
    /// Nonce to use. When omitted, `encrypt` issues the next counter nonce
    /// from the session store in $GRAIN_PLE_STORE_DIR.
    #[arg(long, value_parser = parse_nonce)]
    nonce: Option<Nonce>,
    /// Override the disclosed prefix recorded in the input file (encrypt only).
    #[arg(long)]
    disclosed_prefix: Option<usize>,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    output: PathBuf,
    #[arg(long, default_value = "optimized")]
    backend: Backend,
}

#[derive(Args)]
struct FrameArgs {
    /// Raw input bytes; every bit becomes a frame bit.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    output: PathBuf,
    #[arg(long)]
    codeword_len: usize,
    #[arg(long, default_value_t = 0)]
    disclosed_prefix: usize,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_parser = parse_key, default_value = "000102030405060708090a0b0c0d0e0f")]
    key: KeyMaterial,
    /// Nonce of the first trial; later trials count up from it.
    #[arg(long, value_parser = parse_nonce, default_value = "000000000000000000000000")]
    nonce: Nonce,
    #[arg(long, default_value = "hamming74")]
    codec: Codec,
    /// Crossover probabilities, comma-separated.
    #[arg(long, value_parser = parse_probability, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "on")]
    ple: Toggle,
    #[arg(long, default_value_t = 0)]
    disclosed_prefix: usize,
    /// Data bits per trial.
    #[arg(long, default_value_t = 4096)]
    bits: usize,
    #[arg(long, default_value = "optimized")]
    backend: Backend,
    #[arg(long = "out")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VectorArgs {
    #[arg(long, value_parser = parse_key, default_value = "00000000000000000000000000000000")]
    key: KeyMaterial,
    #[arg(long, value_parser = parse_nonce, default_value = "000000000000000000000000")]
    nonce: Nonce,
    #[arg(long, default_value_t = 128)]
    bits: usize,
    #[arg(long, default_value = "reference")]
    backend: Backend,
    #[arg(long = "out")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 1_000_000)]
    bits: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Keystream(a) => cmd_keystream(a),
        Command::Encrypt(a) => cmd_encrypt(a),
        Command::Decrypt(a) => cmd_decrypt(a),
        Command::Frame(a) => cmd_frame(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Vectors(a) => cmd_vectors(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn cmd_keystream(a: KeystreamArgs) -> Result<()> {
    if a.bits == 0 {
        return Ok(());
    }
    let z = grain::keystream(a.backend, &a.key, &a.nonce, a.bits);
    println!("{}", z.to_hex());
    Ok(())
}

fn store() -> Result<Option<FileStore>> {
    match std::env::var_os(STORE_ENV) {
        Some(dir) => Ok(Some(FileStore::new(&dir).with_context(|| format!("opening session store {dir:?}"))?)),
        None => Ok(None),
    }
}

fn read_frame_file(path: &Path) -> Result<FrameFile> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    FrameFile::from_bytes(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_encrypt(a: CryptArgs) -> Result<()> {
    let mut file = read_frame_file(&a.input)?;
    if let Some(p) = a.disclosed_prefix {
        file.disclosed_prefix = p;
    }
    let frame = file.into_frame()?;

    let nonce = match a.nonce {
        Some(n) => n,
        None => {
            let Some(mut store) = store()? else {
                bail!("no --nonce given and {STORE_ENV} is not set");
            };
            let id = KeyId::for_key(&a.key);
            let mut session = SessionRecord::restore(&store, id)?;
            let nonce = session.issue_nonce(&mut store)?;
            println!("nonce={}", nonce.to_hex());
            nonce
        }
    };

    let z = Grain::initialize(a.backend, &a.key, &nonce).generate_keystream(frame.encrypted_len())?;
    let encrypted = frame::encrypt_frame(&frame, &z)?;
    write_output(Some(&a.output), &FrameFile::from(&encrypted).to_bytes())
}

fn cmd_decrypt(a: CryptArgs) -> Result<()> {
    let Some(nonce) = a.nonce else {
        bail!("decrypt needs --nonce (the frame counter as 24 hex characters)");
    };
    if a.disclosed_prefix.is_some() {
        bail!("--disclosed-prefix is read from the frame file when decrypting");
    }
    let received = read_frame_file(&a.input)?.into_encrypted()?;

    if let Some(mut store) = store()? {
        let id = KeyId::for_key(&a.key);
        let mut session = SessionRecord::restore(&store, id)?;
        match session.accept_frame(nonce.counter()) {
            FrameDecision::Accept(_) => session.persist(&mut store)?,
            other => bail!("frame counter {} refused: {other:?}", nonce.counter()),
        }
    }

    let z = Grain::initialize(a.backend, &a.key, &nonce).generate_keystream(received.encrypted_len())?;
    let plain = frame::decrypt_frame(&received, &z)?;
    write_output(Some(&a.output), &FrameFile::from(&plain).to_bytes())
}

fn cmd_frame(a: FrameArgs) -> Result<()> {
    let raw = fs::read(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let bits = grain_ple::bits::unpack(&raw, raw.len() * 8);
    let frame = Frame::segment(bits, a.codeword_len)?.with_disclosed_prefix(a.disclosed_prefix)?;
    write_output(Some(&a.output), &FrameFile::from(&frame).to_bytes())
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let config = SweepConfig {
        p_values: a.p,
        trials: a.trials,
        data_bits: a.bits,
        base_seed: a.seed,
        pipeline: PipelineConfig {
            key: a.key,
            nonce: a.nonce,
            codec: a.codec,
            ple_enabled: matches!(a.ple, Toggle::On),
            disclosed_prefix: a.disclosed_prefix,
            backend: a.backend,
        },
    };
    let reports = channel::sweep(&config)?;
    write_output(a.output.as_deref(), channel::to_csv_string(&reports)?.as_bytes())
}

fn cmd_vectors(a: VectorArgs) -> Result<()> {
    let mut g = Grain::load_initial_state(a.backend, &a.key, &a.nonce);
    let mut out = String::new();
    for stop in [320, 384, 512] {
        g.clock_rounds(stop - g.round());
        out.push_str(&golden::snapshot_line(&g.diagnostic_snapshot()));
        out.push('\n');
    }
    let z = g.generate_keystream(a.bits)?;
    out.push_str(&golden::keystream_line(&z));
    out.push('\n');
    write_output(a.output.as_deref(), out.as_bytes())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let key = KeyMaterial::from_hex("0123456789abcdeffedcba9876543210")?;
    let nonce = Nonce::from_counter(1).expect("small counter");

    let reference = grain::keystream(Backend::Reference, &key, &nonce, a.bits);
    let optimized = grain::keystream(Backend::Optimized, &key, &nonce, a.bits);
    if reference != optimized {
        bail!("backends disagree; refusing to benchmark");
    }

    for backend in Backend::ALL {
        let start = Instant::now();
        let z = grain::keystream(backend, &key, &nonce, a.bits);
        let secs = start.elapsed().as_secs_f64().max(1e-9);
        std::hint::black_box(&z);
        println!("{backend}: {:.0} bits/s ({} bits in {:.3} s)", a.bits as f64 / secs, a.bits, secs);
    }

    let bytes = a.bits / 8;
    let start = Instant::now();
    let mut g = WordGrain::initialize(&key, &nonce);
    let mut buf = Vec::new();
    g.fill_keystream_bytes(&mut buf, bytes)?;
    let secs = start.elapsed().as_secs_f64().max(1e-9);
    std::hint::black_box(&buf);
    println!("optimized-bytes: {:.0} bits/s ({} bits in {:.3} s)", (bytes * 8) as f64 / secs, bytes * 8, secs);
    Ok(())
}
