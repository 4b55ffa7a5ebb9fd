use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use vss_core::benaloh::{default_key_bits, keygen, smallest_keypair};
use vss_core::field::{FieldParams, Share};
use vss_core::format::{PublicFile, ShareFile};
use vss_core::harness::{
    run_scenario, scenario_expectations, InconsistentVariant, KeyProfile, Scenario, ScenarioKind, TamperRule,
};
use vss_core::protocol::{self, BroadcastMessage, DealParams, ProtocolError, VerificationVerdict};

const EXIT_USAGE: u8 = 2;
const EXIT_SELF_CHECK: u8 = 3;
const EXIT_REJECT: u8 = 4;
const EXIT_INSUFFICIENT: u8 = 5;
const EXIT_UNVERIFIED: u8 = 6;
const EXIT_UNEXPECTED: u8 = 7;

#[derive(Parser)]
#[command(name = "vss", version, about = "Verifiable secret sharing with hash-registered shares")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a secret and write public.json plus one share file per shareholder.
    Deal(DealArgs),
    /// Check one share against the public file.
    Verify {
        #[arg(long)]
        public: PathBuf,
        #[arg(long)]
        share: PathBuf,
    },
    /// Recover the secret from submitted share files.
    Reconstruct {
        #[arg(long)]
        public: PathBuf,
        #[arg(long = "share", required = true)]
        shares: Vec<PathBuf>,
    },
    /// Run a scripted scenario and print its transcript.
    Simulate(SimulateArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("field").required(true).args(["field_prime", "field_bits"])))]
struct DealArgs {
    #[arg(long)]
    secret: BigUint,
    #[arg(long)]
    threshold: usize,
    #[arg(long)]
    shares: usize,
    #[arg(long)]
    field_prime: Option<BigUint>,
    /// Generate a random field prime of this many bits.
    #[arg(long)]
    field_bits: Option<u64>,
    /// Width of the encryption key primes.
    #[arg(long)]
    key_bits: Option<u64>,
    /// Omit for OS entropy.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_parser = parse_kind)]
    scenario: ScenarioKind,
    #[arg(long)]
    seed: u64,
    /// Draw the parameters from the seed instead of the fixed defaults.
    #[arg(long)]
    sample: bool,
    #[arg(long)]
    field_prime: Option<BigUint>,
    #[arg(long)]
    threshold: Option<usize>,
    #[arg(long)]
    shares: Option<usize>,
    #[arg(long)]
    secret: Option<BigUint>,
    /// Comma-separated shareholder indices hit by the adversary.
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<u64>>,
    /// Add this to each tampered value.
    #[arg(long, conflicts_with = "randomize")]
    offset: Option<BigUint>,
    /// Replace each tampered value with a random different one.
    #[arg(long)]
    randomize: bool,
    /// The inconsistent dealer also changes the secret.
    #[arg(long)]
    different_secret: bool,
    /// Use the smallest valid key instead of a random one.
    #[arg(long, conflicts_with = "key_bits")]
    smallest_key: bool,
    #[arg(long)]
    key_bits: Option<u64>,
}

fn parse_kind(s: &str) -> Result<ScenarioKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = ScenarioKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown scenario, expected one of {}", names.join(", "))
    })
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Deal(args) => cmd_deal(args),
        Command::Verify { public, share } => cmd_verify(&public, &share),
        Command::Reconstruct { public, shares } => cmd_reconstruct(&public, &shares),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn rng_for(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn cmd_deal(args: DealArgs) -> CmdResult {
    let mut rng = rng_for(args.seed);
    let field = match (&args.field_prime, args.field_bits) {
        (Some(p), _) => FieldParams::new(p.clone()),
        (None, Some(bits)) => FieldParams::random(bits, &mut rng),
        (None, None) => unreachable!("clap requires one of the field flags"),
    }
    .map_err(|e| fail(EXIT_USAGE, format!("field: {e}")))?;
    if args.field_bits.is_some() {
        println!("field prime: {}", field.prime());
    }
    if args.threshold < 1 {
        return Err(fail(EXIT_USAGE, "threshold must be at least 1"));
    }
    if args.threshold > args.shares {
        return Err(fail(
            EXIT_USAGE,
            format!("threshold {} exceeds the number of shares {}", args.threshold, args.shares),
        ));
    }
    if BigUint::from(args.shares) >= *field.prime() {
        return Err(fail(EXIT_USAGE, format!("shares {} must be below the field prime", args.shares)));
    }
    let secret =
        field.element(args.secret.clone()).map_err(|_| fail(EXIT_USAGE, "secret must be below the field prime"))?;

    let bits = args.key_bits.unwrap_or_else(|| default_key_bits(field.prime()));
    let (pk, _sk) =
        keygen(field.prime(), bits, &mut rng).map_err(|e| fail(EXIT_USAGE, format!("key generation: {e}")))?;
    let params =
        DealParams::new(args.threshold, args.shares, field, pk).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    let mut d = protocol::deal(&secret, &params, None, &mut rng).map_err(|e| fail(EXIT_SELF_CHECK, e.to_string()))?;

    // Self-check through the serialized form, exactly as a shareholder sees it.
    let public = PublicFile::from_broadcast(&d.broadcast).to_canonical_string();
    let share_texts: Vec<(u64, String)> =
        d.messages.iter().map(|pm| (pm.share.index, ShareFile::from_private(pm).to_canonical_string())).collect();
    let mut verdicts = Vec::with_capacity(share_texts.len());
    {
        let bm = PublicFile::parse(public.as_bytes())
            .and_then(|pf| pf.to_broadcast())
            .map_err(|e| fail(EXIT_SELF_CHECK, format!("self-check: {e}")))?;
        for (index, text) in &share_texts {
            let verdict = ShareFile::parse(text.as_bytes())
                .and_then(|sf| sf.to_private(bm.params()))
                .map_err(|e| e.to_string())
                .and_then(|pm| protocol::verify_share(&bm, &pm).map_err(|e| e.to_string()))
                .map_err(|e| fail(EXIT_SELF_CHECK, format!("self-check of share {index}: {e}")))?;
            if let VerificationVerdict::Rejected(f) = verdict {
                return Err(fail(EXIT_SELF_CHECK, format!("self-check of share {index}: {f}")));
            }
            verdicts.push(verdict);
        }
    }
    d.state.discard(&verdicts).map_err(|e| fail(EXIT_SELF_CHECK, e.to_string()))?;

    fs::create_dir_all(&args.out).map_err(|e| io_fail(&args.out, e))?;
    write(&args.out.join("public.json"), &public)?;
    for (index, text) in &share_texts {
        write(&args.out.join(format!("share_{index}.json")), text)?;
    }
    println!("wrote public.json and {} share files to {}", share_texts.len(), args.out.display());
    Ok(0)
}

fn io_fail(path: &Path, e: std::io::Error) -> Failure {
    fail(1, format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_fail(path, e))
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load_public(path: &Path) -> Result<BroadcastMessage, Failure> {
    PublicFile::parse(&read(path)?)
        .and_then(|pf| pf.to_broadcast())
        .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load_share(path: &Path) -> Result<ShareFile, Failure> {
    ShareFile::parse(&read(path)?).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn cmd_verify(public: &Path, share: &Path) -> CmdResult {
    let bm = load_public(public)?;
    let pm = load_share(share)?
        .to_private(bm.params())
        .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", share.display())))?;
    let verdict = protocol::verify_share(&bm, &pm).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    println!("{verdict}");
    Ok(if verdict.is_accepted() { 0 } else { EXIT_REJECT })
}

fn cmd_reconstruct(public: &Path, paths: &[PathBuf]) -> CmdResult {
    let bm = load_public(public)?;
    let field = bm.params().field();
    let mut submitted = Vec::with_capacity(paths.len());
    // A value outside the field cannot be a share; its holder is a cheater.
    let mut out_of_range = BTreeSet::new();
    for path in paths {
        let sf = load_share(path)?;
        match field.element(sf.value) {
            Ok(v) => submitted.push(Share::new(sf.index, v)),
            Err(_) => {
                out_of_range.insert(sf.index);
            }
        }
    }
    submitted.retain(|s| !out_of_range.contains(&s.index));
    let result = protocol::reconstruct(&bm, &submitted);

    let rejected: BTreeSet<u64> = result.rejected_shares.union(&out_of_range).copied().collect();
    if !rejected.is_empty() {
        let list: Vec<String> = rejected.iter().map(u64::to_string).collect();
        eprintln!("rejected: {}", list.join(","));
    }
    match &result.secret {
        None => Err(fail(
            EXIT_INSUFFICIENT,
            format!(
                "insufficient shares: {} accepted, threshold {}",
                result.accepted_shares.len(),
                bm.params().threshold()
            ),
        )),
        Some(s) if result.secret_verified => {
            println!("{s} VERIFIED");
            Ok(0)
        }
        Some(s) => {
            println!("{s} UNVERIFIED");
            Ok(EXIT_UNVERIFIED)
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> CmdResult {
    let mut sc =
        if args.sample { Scenario::sample(args.scenario, args.seed) } else { Scenario::new(args.scenario, args.seed) };
    if let Some(p) = args.field_prime {
        sc.key = KeyProfile::Random { bits: default_key_bits(&p) };
        sc.field_prime = p;
    }
    if let Some(t) = args.threshold {
        sc.threshold = t;
    }
    if let Some(n) = args.shares {
        sc.shares = n;
    }
    if let Some(s) = args.secret {
        sc.secret = s;
    }
    if let Some(t) = args.targets {
        sc.targets = t.into_iter().collect();
    }
    if let Some(k) = args.offset {
        sc.rule = TamperRule::Offset(k);
    }
    if args.randomize {
        sc.rule = TamperRule::Randomize;
    }
    if args.different_secret {
        sc.variant = InconsistentVariant::DifferentSecret;
    }
    if args.smallest_key {
        sc.key = KeyProfile::Smallest;
    }
    if let Some(bits) = args.key_bits {
        sc.key = KeyProfile::Random { bits };
    }
    if sc.key == KeyProfile::Smallest {
        smallest_keypair(&sc.field_prime).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    }
    sc.validate().map_err(|e| fail(EXIT_USAGE, e.to_string()))?;

    let transcript = run_scenario(&sc).map_err(|e| match e {
        vss_core::harness::HarnessError::InvalidScenario(m) => fail(EXIT_USAGE, m),
        vss_core::harness::HarnessError::Protocol(ProtocolError::Encryption(e)) => {
            fail(EXIT_USAGE, format!("key generation: {e}"))
        }
        other => fail(EXIT_UNEXPECTED, other.to_string()),
    })?;
    print!("{}", transcript.to_canonical_string());
    let mismatches = scenario_expectations(&sc).mismatches(&transcript);
    if mismatches.is_empty() {
        Ok(0)
    } else {
        for m in mismatches {
            eprintln!("expectation mismatch: {m}");
        }
        Ok(EXIT_UNEXPECTED)
    }
}
