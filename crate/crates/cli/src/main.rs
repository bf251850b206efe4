//! Command-line front end: key generation, signcryption round trips, ledger
//! inspection, rating evaluation, scenario simulation, and benchmark tables.
//!
//! Exit codes: 0 on success, 1 on domain errors (bad inputs, failed
//! validation), 2 on usage errors. Every subcommand is deterministic for a
//! fixed seed, and nothing is written outside the paths given on the
//! command line.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use prodchain_core::consensus_poa::{
    access_decision, evaluate_service, update_rating, AccessDecision, PoAConfig, RatingState,
    ServiceRecord, ServiceType,
};
use prodchain_core::identity::{DocumentType, StakeholderRole, StakeholderWallet, WalletRegistry};
use prodchain_core::ledger::{load_chain, save_chain, validate_chain, Chain, ChainVerdict};
use prodchain_core::metrics::{
    export, measure, stamp_block_count_fits, ExportFormat, MetricReport,
};
use prodchain_core::netsim::{
    calibrated_error_rates, run_scenario, sweep_blocksize, sweep_endorsers, Scenario,
};
use prodchain_core::signcryption::{signcrypt, unsigncrypt, Ciphertext, Plaintext};
use prodchain_core::{GroupElement, GroupParams, ProofMetrics};

#[derive(Parser)]
#[command(
    name = "prodchain",
    version,
    about = "Product-chain toolkit: keys, signcryption, ledger, ratings, and simulation",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive a stakeholder wallet from credential documents
    Keygen(KeygenArgs),
    /// Signcrypt a product message to one or more receivers
    Signcrypt(SigncryptArgs),
    /// Verify and decrypt a signcrypted message as one of its receivers
    Unsigncrypt(UnsigncryptArgs),
    /// Inspect and validate ledger files
    #[command(subcommand)]
    Chain(ChainCmd),
    /// Rating and access evaluation
    #[command(subcommand)]
    Poa(PoaCmd),
    /// Network simulation
    #[command(subcommand)]
    Sim(SimCmd),
    /// Benchmark table generators
    #[command(subcommand)]
    Bench(BenchCmd),
}

/// Credentials identifying one stakeholder; the wallet they derive is a
/// pure function of these three values.
#[derive(Args)]
struct CredentialArgs {
    /// path to the credential document
    #[arg(long)]
    doc: PathBuf,
    /// document type: trade-license, national-id, or international-id
    #[arg(long = "type", value_name = "TYPE")]
    doc_type: DocumentType,
    /// stakeholder role, e.g. supplier or manufacturer
    #[arg(long)]
    role: StakeholderRole,
}

impl CredentialArgs {
    fn wallet(&self) -> Result<StakeholderWallet> {
        let document = fs::read(&self.doc)
            .with_context(|| format!("reading credential document {}", self.doc.display()))?;
        let pm = ProofMetrics::new(self.doc_type, document, self.role);
        let mut registry = WalletRegistry::new();
        let wallet = registry.register(&pm).context("deriving wallet")?;
        Ok(wallet.clone())
    }
}

#[derive(Args)]
struct KeygenArgs {
    #[command(flatten)]
    cred: CredentialArgs,
    /// write the public wallet record here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// also write the private key to this separate file; keep it secret
    #[arg(long)]
    out_private: Option<PathBuf>,
}

#[derive(Args)]
struct SigncryptArgs {
    #[command(flatten)]
    cred: CredentialArgs,
    /// receiver public key in hex; repeat once per receiver, order matters
    #[arg(long = "receiver", value_name = "HEX", required = true)]
    receivers: Vec<String>,
    /// product information carried by the message
    #[arg(long)]
    info: String,
    /// seed for the encryption randomness
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// write the hex transcript here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct UnsigncryptArgs {
    #[command(flatten)]
    cred: CredentialArgs,
    /// this receiver's position in the receiver list
    #[arg(long)]
    index: usize,
    /// sender public key in hex
    #[arg(long, value_name = "HEX")]
    sender_pub: String,
    /// the full receiver list the message was addressed to, in order
    #[arg(long = "receiver", value_name = "HEX", required = true)]
    receivers: Vec<String>,
    /// path to the hex transcript produced by signcrypt
    #[arg(long)]
    ciphertext: PathBuf,
    /// write the recovered message here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ChainCmd {
    /// Check hash linkage and report the first bad block, if any
    Validate { file: PathBuf },
    /// Print block headers, or one block with --height
    Show {
        file: PathBuf,
        #[arg(long)]
        height: Option<u64>,
    },
}

#[derive(Subcommand)]
enum PoaCmd {
    /// Rate one service completion and report the access decision
    Rate {
        /// scheduled completion time, in days
        #[arg(long)]
        scheduled: f64,
        /// actual completion time, in days
        #[arg(long)]
        actual: f64,
        /// lateness tolerated before the rating drops, in days
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
        /// kind of service rendered
        #[arg(long, default_value = "transport")]
        service: ServiceType,
    },
}

#[derive(Subcommand)]
enum SimCmd {
    /// Run one scenario file and report its metrics
    Run {
        /// scenario file of key=value lines
        scenario: PathBuf,
        /// override the scenario's rng_seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "csv")]
        format: ExportFormat,
        /// write metrics here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
        /// also write the simulated ledger to this file
        #[arg(long)]
        chain_out: Option<PathBuf>,
    },
    /// Sweep transactions per block and report one row per size
    SweepBlocksize {
        /// scenario file; defaults apply when omitted
        scenario: Option<PathBuf>,
        /// comma-separated block sizes
        #[arg(long, value_delimiter = ',', default_value = "1,10,100,250,600,800,1000")]
        sizes: Vec<u64>,
        /// override the scenario's rng_seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "csv")]
        format: ExportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the endorser count and report one row per count
    SweepEndorsers {
        /// scenario file; defaults apply when omitted
        scenario: Option<PathBuf>,
        /// comma-separated endorser counts
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19")]
        counts: Vec<usize>,
        /// override the scenario's rng_seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "csv")]
        format: ExportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Latency scaling over 10..100 blocks with the default workload
    Table3 {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "csv")]
        format: ExportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Success rates and block throughput over 10..100 blocks under
    /// calibrated failure injection
    Table5 {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "csv")]
        format: ExportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_output(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes)
            .with_context(|| format!("writing output {}", path.display())),
        None => {
            std::io::stdout().write_all(bytes).context("writing standard output")?;
            Ok(())
        }
    }
}

fn decode_group_element(params: GroupParams, hex_key: &str) -> Result<GroupElement> {
    let bytes = hex::decode(hex_key.trim())
        .with_context(|| format!("public key {hex_key} is not hex"))?;
    GroupElement::decode(params, &bytes)
        .map_err(|e| anyhow::anyhow!("public key {hex_key} is not a group element: {e}"))
}

fn decode_receivers(params: GroupParams, hex_keys: &[String]) -> Result<Vec<GroupElement>> {
    hex_keys.iter().map(|k| decode_group_element(params, k)).collect()
}

fn load_scenario(path: &PathBuf) -> Result<Scenario> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading scenario {}", path.display()))?;
    Scenario::from_kv_text(&text).context("parsing scenario")
}

fn scenario_or_default(path: &Option<PathBuf>, seed: Option<u64>) -> Result<Scenario> {
    let mut scenario = match path {
        Some(p) => load_scenario(p)?,
        None => Scenario::default_scenario(),
    };
    if let Some(seed) = seed {
        scenario.rng_seed = seed;
    }
    Ok(scenario)
}

fn export_reports(
    reports: &[MetricReport],
    format: ExportFormat,
    out: &Option<PathBuf>,
) -> Result<()> {
    let mut buf = Vec::new();
    export(reports, format, &mut buf).context("exporting metrics")?;
    write_output(out, &buf)
}

fn run_keygen(args: &KeygenArgs) -> Result<i32> {
    let wallet = args.cred.wallet()?;
    let record = format!(
        "pseudo_id={}\nrole={}\npublic_key={}\n",
        wallet.pseudo_id.to_hex(),
        wallet.role,
        hex::encode(wallet.keys.public().encode()),
    );
    write_output(&args.out, record.as_bytes())?;
    if let Some(path) = &args.out_private {
        let secret = format!(
            "# private key; grant no one else read access\nprivate_key={}\n",
            hex::encode(wallet.keys.private().value().to_le_bytes()),
        );
        fs::write(path, secret)
            .with_context(|| format!("writing private key {}", path.display()))?;
    }
    Ok(0)
}

fn run_signcrypt(args: &SigncryptArgs) -> Result<i32> {
    let wallet = args.cred.wallet()?;
    let params = wallet.keys.public().params();
    let receivers = decode_receivers(params, &args.receivers)?;
    let m = Plaintext::new(
        args.info.clone().into_bytes(),
        wallet.pseudo_id.clone(),
        wallet.keys.public(),
    )?;
    let c = signcrypt(&wallet.keys, &receivers, &m, &args.seed.to_le_bytes())?;
    let mut line = hex::encode(c.encode());
    line.push('\n');
    write_output(&args.out, line.as_bytes())?;
    Ok(0)
}

fn run_unsigncrypt(args: &UnsigncryptArgs) -> Result<i32> {
    let wallet = args.cred.wallet()?;
    let params = wallet.keys.public().params();
    let sender_pub = decode_group_element(params, &args.sender_pub)?;
    let receivers = decode_receivers(params, &args.receivers)?;
    let hex_text = fs::read_to_string(&args.ciphertext)
        .with_context(|| format!("reading ciphertext {}", args.ciphertext.display()))?;
    let wire = hex::decode(hex_text.trim()).context("ciphertext file is not hex")?;
    let c = Ciphertext::decode(params, &wire)?;
    let m = unsigncrypt(args.index, &wallet.keys, &sender_pub, &receivers, &c)?;
    let text = format!(
        "initiator_id={}\ninitiator_pub={}\nproduct_info={}\n",
        m.initiator_id().to_hex(),
        hex::encode(m.initiator_pub().encode()),
        String::from_utf8_lossy(m.product_info()),
    );
    write_output(&args.out, text.as_bytes())?;
    Ok(0)
}

fn open_chain(path: &PathBuf) -> Result<Chain> {
    let mut file = fs::File::open(path)
        .with_context(|| format!("opening ledger {}", path.display()))?;
    load_chain(&mut file).with_context(|| format!("loading ledger {}", path.display()))
}

fn block_line(block: &prodchain_core::Prodblock) -> String {
    format!(
        "height={} timestamp_micros={} initiator={} payload_bytes={} hash={}\n",
        block.height(),
        block.timestamp_micros(),
        block.initiator().to_hex(),
        block.payload().encode().len(),
        block.block_hash().to_hex(),
    )
}

fn run_chain(cmd: &ChainCmd) -> Result<i32> {
    match cmd {
        ChainCmd::Validate { file } => {
            let chain = open_chain(file)?;
            match validate_chain(&chain) {
                ChainVerdict::Valid => {
                    println!("valid blocks={}", chain.len());
                    Ok(0)
                }
                ChainVerdict::FirstBadIndex(i) => {
                    println!("invalid first_bad_index={i}");
                    Ok(1)
                }
            }
        }
        ChainCmd::Show { file, height } => {
            let chain = open_chain(file)?;
            let mut text = String::new();
            match height {
                Some(h) => {
                    let block = chain
                        .blocks()
                        .iter()
                        .find(|b| b.height() == *h)
                        .with_context(|| format!("no block at height {h}"))?;
                    text.push_str(&block_line(block));
                }
                None => {
                    for block in chain.blocks() {
                        text.push_str(&block_line(block));
                    }
                }
            }
            print!("{text}");
            Ok(0)
        }
    }
}

fn run_poa(cmd: &PoaCmd) -> Result<i32> {
    match *cmd {
        PoaCmd::Rate { scheduled, actual, threshold, service } => {
            let cfg = PoAConfig { upper_threshold: threshold, ..PoAConfig::default_config() };
            let record = ServiceRecord::new(service, scheduled, actual)?;
            let rating = evaluate_service(&record, &cfg);
            let state = update_rating(&RatingState::new(), record, &cfg);
            let access = match access_decision(&state) {
                AccessDecision::Allow => "allow",
                AccessDecision::SeverityConcern => "severity-concern",
            };
            println!("rating={rating}\naccess={access}");
            Ok(0)
        }
    }
}

fn run_sim(cmd: &SimCmd) -> Result<i32> {
    match cmd {
        SimCmd::Run { scenario, seed, format, out, chain_out } => {
            let mut s = load_scenario(scenario)?;
            if let Some(seed) = seed {
                s.rng_seed = *seed;
            }
            let result = run_scenario(&s)?;
            let report = measure(&result, "seed", s.rng_seed)?;
            export_reports(&[report], *format, out)?;
            if let Some(path) = chain_out {
                let mut file = fs::File::create(path)
                    .with_context(|| format!("creating ledger file {}", path.display()))?;
                save_chain(&result.chain, &mut file)
                    .with_context(|| format!("writing ledger file {}", path.display()))?;
            }
            Ok(0)
        }
        SimCmd::SweepBlocksize { scenario, sizes, seed, format, out } => {
            let base = scenario_or_default(scenario, *seed)?;
            let points = sweep_blocksize(&base, sizes)?;
            let reports = points
                .iter()
                .map(|p| measure(&p.result, "tx_per_block", p.x))
                .collect::<Result<Vec<_>, _>>()?;
            export_reports(&reports, *format, out)?;
            Ok(0)
        }
        SimCmd::SweepEndorsers { scenario, counts, seed, format, out } => {
            let base = scenario_or_default(scenario, *seed)?;
            let points = sweep_endorsers(&base, counts)?;
            let reports = points
                .iter()
                .map(|p| measure(&p.result, "endorser_count", p.x))
                .collect::<Result<Vec<_>, _>>()?;
            export_reports(&reports, *format, out)?;
            Ok(0)
        }
    }
}

const BENCH_BLOCK_COUNTS: [usize; 10] = [10, 20, 30, 40, 50, 60, 70, 80, 90, 100];

/// the latency-scaling table: default workload, no failures
fn bench_table3_rows(seed: u64) -> Result<Vec<MetricReport>> {
    let mut reports = Vec::with_capacity(BENCH_BLOCK_COUNTS.len());
    for &blocks in &BENCH_BLOCK_COUNTS {
        let s = Scenario {
            block_count: blocks,
            rng_seed: seed,
            ..Scenario::default_scenario()
        };
        let result = run_scenario(&s)?;
        reports.push(measure(&result, "block_count", blocks as u64)?);
    }
    stamp_block_count_fits(&mut reports);
    Ok(reports)
}

/// the success-rate table: single-transaction blocks under calibrated
/// failure injection, so block and transaction rates coincide
fn bench_table5_rows(seed: u64) -> Result<Vec<MetricReport>> {
    let mut reports = Vec::with_capacity(BENCH_BLOCK_COUNTS.len());
    for &blocks in &BENCH_BLOCK_COUNTS {
        let s = Scenario {
            block_count: blocks,
            tx_per_block: 1,
            error_rates: calibrated_error_rates(blocks),
            rng_seed: seed,
            ..Scenario::default_scenario()
        };
        let result = run_scenario(&s)?;
        reports.push(measure(&result, "block_count", blocks as u64)?);
    }
    stamp_block_count_fits(&mut reports);
    Ok(reports)
}

fn run_bench(cmd: &BenchCmd) -> Result<i32> {
    match cmd {
        BenchCmd::Table3 { seed, format, out } => {
            export_reports(&bench_table3_rows(*seed)?, *format, out)?;
            Ok(0)
        }
        BenchCmd::Table5 { seed, format, out } => {
            export_reports(&bench_table5_rows(*seed)?, *format, out)?;
            Ok(0)
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match &cli.command {
        Command::Keygen(args) => run_keygen(args),
        Command::Signcrypt(args) => run_signcrypt(args),
        Command::Unsigncrypt(args) => run_unsigncrypt(args),
        Command::Chain(cmd) => run_chain(cmd),
        Command::Poa(cmd) => run_poa(cmd),
        Command::Sim(cmd) => run_sim(cmd),
        Command::Bench(cmd) => run_bench(cmd),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
