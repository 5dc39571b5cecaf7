mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};

use epm_core::action::ActionVector;
use epm_core::attack::{
    attack_dhdp_via_central, attack_egdp_via_central, attack_sap, brute_force_unit_attack,
    AttackOutcome, AttackStatus,
};
use epm_core::center::{default_base, is_central, make_corner_m, make_two_entry_m, SamplingConfig};
use epm_core::codec::{
    beta_decode, beta_encode, pack_message_element, pack_message_vector, unpack_message_element,
    unpack_message_vector, Kind, Record, Transcript,
};
use epm_core::dp::{
    dhdp_init, egdp_decrypt_add, egdp_decrypt_xor, egdp_encrypt_add, egdp_encrypt_xor, egdp_keygen,
    egdp_validate_key, sample_noncommuting, EgdpCiphertextAdd, EgdpCiphertextXor, EgdpPrivateKey,
    EgdpPublicKey, Role,
};
use epm_core::sap::{
    sap_decrypt, sap_encrypt, sap_keygen, sap_validate_key, SapCiphertext, SapPrivateKey,
    SapPublicKey,
};
use epm_core::{oracle, RingElement, RingParams};

use io::{
    emit_bytes, make_rng, read_as, read_bytes, read_record, read_transcript, write_bytes,
    write_record, write_transcript, CliError, CliResult,
};

#[derive(Parser)]
#[command(
    name = "epm",
    version,
    about = "Protocols over the matrix ring E_p^(m)"
)]
struct Cli {
    /// Seed for the ChaCha20 generator (EPM_SEED takes precedence).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write records base64-wrapped instead of raw.
    #[arg(long, global = true)]
    base64: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Public parameters: p, m and the base element M.
    Params {
        #[command(subcommand)]
        command: ParamsCommand,
    },
    /// The cryptosystem over the action on Z_p x ... x Z_{p^m}.
    Sap {
        #[command(subcommand)]
        command: SapCommand,
    },
    /// The key exchange.
    Dhdp {
        #[command(subcommand)]
        command: DhdpCommand,
    },
    /// The ElGamal-style cryptosystem.
    Egdp {
        #[command(subcommand)]
        command: EgdpCommand,
    },
    /// Attacks on public data collected in a transcript.
    Attack {
        #[command(subcommand)]
        command: AttackCommand,
    },
    /// Closed-form counts against exhaustive enumeration.
    VerifyParams {
        #[arg(long)]
        p: BigUint,
        #[arg(long)]
        m: usize,
    },
    /// Base64-wrap a file, or pack a message into a vector or element record.
    Encode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Pack the raw message into this plaintext space.
        #[arg(long, value_enum, requires = "params")]
        pack: Option<Space>,
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Undo `encode`: base64 to binary, or a packed record back to bytes.
    Decode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        unpack: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Vector,
    Element,
}

#[derive(Clone, Copy, Default, ValueEnum, PartialEq, Eq)]
enum Mode {
    #[default]
    Add,
    Xor,
}

#[derive(Subcommand)]
enum ParamsCommand {
    New {
        #[arg(long)]
        p: BigUint,
        #[arg(long)]
        m: usize,
        /// M with the single entry x at (m, m).
        #[arg(long, conflicts_with = "two_entry")]
        corner_x: Option<BigInt>,
        /// M with x at (m, m) and y at (m, 1), written `x,y`.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        two_entry: Option<Vec<BigInt>>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct KeygenArgs {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    public: PathBuf,
    #[arg(long)]
    private: PathBuf,
}

#[derive(Subcommand)]
enum SapCommand {
    Keygen(KeygenArgs),
    Encrypt {
        #[arg(long)]
        public: PathBuf,
        /// Raw message bytes.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write a transcript with the public key and ciphertext.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    Decrypt {
        #[arg(long)]
        private: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Validate {
        #[arg(long)]
        public: PathBuf,
    },
}

#[derive(Subcommand)]
enum DhdpCommand {
    /// Runs both parties and reports whether their secrets agree.
    Simulate {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum EgdpCommand {
    Keygen(KeygenArgs),
    Encrypt {
        #[arg(long)]
        public: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        mode: Mode,
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    Decrypt {
        #[arg(long)]
        private: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        mode: Mode,
    },
    Validate {
        #[arg(long)]
        public: PathBuf,
    },
}

#[derive(Subcommand)]
enum AttackCommand {
    /// Central solution of the public SAP instance, then decryption.
    CentralSap {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Central solution of `M_c X = P`, against an encryption or an exchange.
    CentralDp {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive search for commuting central pairs.
    UnitBruteforce {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1 << 24)]
        search_bound: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = SamplingConfig::default();
    let armor = cli.base64;
    match cli.command {
        Command::Params {
            command:
                ParamsCommand::New {
                    p,
                    m,
                    corner_x,
                    two_entry,
                    out,
                },
        } => {
            let params = RingParams::new(p, m)?;
            params.require_protocol_size()?;
            let base = match (corner_x, two_entry) {
                (Some(x), _) => make_corner_m(&params, &x)?,
                (None, Some(xy)) => make_two_entry_m(&params, &xy[0], &xy[1])?,
                (None, None) => default_base(&params, &mut make_rng(cli.seed)?)?,
            };
            if is_central(&base) {
                return Err(CliError::Usage("base element must not be central".into()));
            }
            println!("M = {base}");
            write_record(&out, &Record::PublicBase(base), armor)
        }
        Command::Sap { command } => run_sap(command, cli.seed, armor, &cfg),
        Command::Dhdp {
            command: DhdpCommand::Simulate { params, transcript },
        } => {
            let mut rng = make_rng(cli.seed)?;
            let base = read_record(&params)?.into_public_base()?;
            let x = sample_noncommuting(&base, &cfg, &mut rng)?;
            let mut alice = dhdp_init(&x, &base, Role::Alice, &cfg, &mut rng)?;
            let mut bob = dhdp_init(&x, &base, Role::Bob, &cfg, &mut rng)?;
            let g_a = alice.outbound().clone();
            let g_b = bob.outbound().clone();
            let k_a = alice.complete(&g_b)?;
            let k_b = bob.complete(&g_a)?;
            println!("X = {x}");
            println!("G_A = {g_a}");
            println!("G_B = {g_b}");
            println!("shared secrets match: {}", k_a == k_b);
            if let Some(path) = transcript {
                let mut t = Transcript::default();
                t.push("M", Record::PublicBase(base));
                t.push("X", Record::Element(x));
                t.push("G_A", Record::Element(g_a));
                t.push("G_B", Record::Element(g_b));
                write_transcript(&path, &t)?;
            }
            if k_a == k_b {
                Ok(())
            } else {
                Err(CliError::Validation("shared secrets differ".into()))
            }
        }
        Command::Egdp { command } => run_egdp(command, cli.seed, armor, &cfg),
        Command::Attack { command } => run_attack(command, cli.seed),
        Command::VerifyParams { p, m } => {
            let params = RingParams::new(p, m)?;
            let rows = oracle::verify_params(&params);
            println!(
                "{:<12} {:>24} {:>24}  match",
                "quantity", "formula", "enumerated"
            );
            let mut all_match = true;
            for row in &rows {
                let (enumerated, ok) = match (&row.enumerated, row.matches()) {
                    (Some(e), Some(ok)) => (e.to_string(), ok.to_string()),
                    _ => ("-".to_string(), "skipped".to_string()),
                };
                all_match &= row.matches() != Some(false);
                println!(
                    "{:<12} {:>24} {:>24}  {ok}",
                    row.quantity, row.formula, enumerated
                );
            }
            let (num, den) = oracle::unit_fraction(&params);
            println!("unit fraction ((p-1)/p)^m = {num}/{den}");
            if all_match {
                Ok(())
            } else {
                Err(CliError::Validation(
                    "enumeration disagrees with a formula".into(),
                ))
            }
        }
        Command::Encode {
            input,
            out,
            pack,
            params,
        } => {
            let data = read_bytes(&input)?;
            let Some(space) = pack else {
                use base64::Engine;
                let mut text = base64::engine::general_purpose::STANDARD.encode(&data);
                text.push('\n');
                return match out {
                    Some(p) => write_bytes(&p, text.as_bytes()),
                    None => {
                        print!("{text}");
                        Ok(())
                    }
                };
            };
            let base = read_record(&params.expect("clap enforces --params"))?;
            let record = match space {
                Space::Vector => Record::Vector(pack_message_vector(&data, base.params())?),
                Space::Element => Record::Element(pack_message_element(&data, base.params())?),
            };
            match out {
                Some(p) => write_record(&p, &record, armor),
                None => emit_bytes(None, &epm_core::codec::serialize(&record)),
            }
        }
        Command::Decode { input, out, unpack } => {
            if unpack {
                let bytes = match read_record(&input)? {
                    Record::Vector(v) => unpack_message_vector(&v)?,
                    Record::Element(a) => unpack_message_element(&a)?,
                    other => {
                        return Err(epm_core::Error::KindMismatch {
                            expected: "vector or element".into(),
                            found: other.kind().name().into(),
                        }
                        .into())
                    }
                };
                return emit_bytes(out.as_deref(), &bytes);
            }
            use base64::Engine;
            let text: Vec<u8> = read_bytes(&input)?
                .into_iter()
                .filter(|b| !b.is_ascii_whitespace())
                .collect();
            let data = base64::engine::general_purpose::STANDARD
                .decode(&text)
                .map_err(|e| epm_core::Error::Malformed(format!("base64: {e}")))?;
            let out = out.ok_or_else(|| CliError::Usage("decode needs --out".into()))?;
            write_bytes(&out, &data)
        }
    }
}

fn run_sap(
    command: SapCommand,
    seed: Option<u64>,
    armor: bool,
    cfg: &SamplingConfig,
) -> CliResult<()> {
    match command {
        SapCommand::Keygen(args) => {
            let mut rng = make_rng(seed)?;
            let base = read_record(&args.params)?.into_public_base()?;
            let (public, private) = sap_keygen(&base, cfg, &mut rng)?;
            if !sap_validate_key(&public).is_valid() {
                return Err(CliError::Validation(
                    "generated key failed validation".into(),
                ));
            }
            write_record(&args.public, &Record::SapPublic(public), armor)?;
            write_record(&args.private, &Record::SapPrivate(private), armor)
        }
        SapCommand::Encrypt {
            public,
            input,
            out,
            transcript,
        } => {
            let mut rng = make_rng(seed)?;
            let key: SapPublicKey = read_as(&public)?;
            let message = pack_message_vector(&read_bytes(&input)?, key.params())?;
            let ct = sap_encrypt(&key, &message, cfg, &mut rng)?;
            if let Some(path) = transcript {
                let mut t = Transcript::default();
                t.push("public", Record::SapPublic(key));
                t.push("ciphertext", Record::SapCiphertext(ct.clone()));
                write_transcript(&path, &t)?;
            }
            write_record(&out, &Record::SapCiphertext(ct), armor)
        }
        SapCommand::Decrypt {
            private,
            input,
            out,
        } => {
            let key: SapPrivateKey = read_as(&private)?;
            let ct: SapCiphertext = read_as(&input)?;
            let plain = sap_decrypt(&key, &ct)?;
            emit_bytes(out.as_deref(), &unpack_message_vector(&plain)?)
        }
        SapCommand::Validate { public } => {
            let key: SapPublicKey = read_as(&public)?;
            let v = sap_validate_key(&key);
            println!("components prime to p: {}", v.coprime);
            match v.differing_index {
                Some(k) => println!("differing ratio at component: {}", k + 1),
                None => println!("differing ratio at component: none"),
            }
            println!("valid: {}", v.is_valid());
            if v.is_valid() {
                Ok(())
            } else {
                Err(CliError::Validation(
                    "public key admits a central solution".into(),
                ))
            }
        }
    }
}

fn run_egdp(
    command: EgdpCommand,
    seed: Option<u64>,
    armor: bool,
    cfg: &SamplingConfig,
) -> CliResult<()> {
    match command {
        EgdpCommand::Keygen(args) => {
            let mut rng = make_rng(seed)?;
            let base = read_record(&args.params)?.into_public_base()?;
            let (public, private) = egdp_keygen(&base, cfg, &mut rng)?;
            if !egdp_validate_key(&public).is_valid() {
                return Err(CliError::Validation(
                    "generated key failed validation".into(),
                ));
            }
            write_record(&args.public, &Record::EgdpPublic(public), armor)?;
            write_record(&args.private, &Record::EgdpPrivate(private), armor)
        }
        EgdpCommand::Encrypt {
            public,
            input,
            out,
            mode,
            transcript,
        } => {
            let mut rng = make_rng(seed)?;
            let key: EgdpPublicKey = read_as(&public)?;
            let message = pack_message_element(&read_bytes(&input)?, key.params())?;
            let record = match mode {
                Mode::Add => {
                    Record::EgdpCiphertextAdd(egdp_encrypt_add(&key, &message, cfg, &mut rng)?)
                }
                Mode::Xor => {
                    let bits = beta_encode(&message);
                    Record::EgdpCiphertextXor(egdp_encrypt_xor(&key, &bits, cfg, &mut rng)?)
                }
            };
            if let Some(path) = transcript {
                let mut t = Transcript::default();
                t.push("public", Record::EgdpPublic(key));
                t.push("ciphertext", record.clone());
                write_transcript(&path, &t)?;
            }
            write_record(&out, &record, armor)
        }
        EgdpCommand::Decrypt {
            private,
            input,
            out,
            mode,
        } => {
            let key: EgdpPrivateKey = read_as(&private)?;
            let plain = match mode {
                Mode::Add => {
                    let ct: EgdpCiphertextAdd = read_as(&input)?;
                    egdp_decrypt_add(&key, &ct)?
                }
                Mode::Xor => {
                    let ct: EgdpCiphertextXor = read_as(&input)?;
                    beta_decode(key.a1.params(), &egdp_decrypt_xor(&key, &ct)?)?
                }
            };
            emit_bytes(out.as_deref(), &unpack_message_element(&plain)?)
        }
        EgdpCommand::Validate { public } => {
            let key: EgdpPublicKey = read_as(&public)?;
            let v = egdp_validate_key(&key);
            let cols: Vec<String> = v
                .qualifying_columns
                .iter()
                .map(|c| (c + 1).to_string())
                .collect();
            println!("qualifying columns: [{}]", cols.join(", "));
            println!("valid: {}", v.is_valid());
            if v.is_valid() {
                Ok(())
            } else {
                Err(CliError::Validation(
                    "no column of X with unit entries and differing ratios".into(),
                ))
            }
        }
    }
}

fn find_kind(t: &Transcript, kind: Kind) -> CliResult<Record> {
    t.entries
        .iter()
        .find(|e| e.record.kind() == kind)
        .map(|e| e.record.clone())
        .ok_or_else(|| {
            epm_core::Error::Malformed(format!("transcript has no {kind} record")).into()
        })
}

fn finish_attack<T>(outcome: AttackOutcome<T>) -> CliResult<T> {
    println!("status: {:?}", outcome.status);
    match outcome.recovered {
        Some(v) if outcome.status == AttackStatus::Recovered => Ok(v),
        _ => Err(CliError::Attack(outcome.status)),
    }
}

fn report_message(bytes: epm_core::Result<Vec<u8>>, out: Option<&Path>) -> CliResult<()> {
    match bytes {
        Ok(b) => emit_bytes(out, &b),
        Err(e) => {
            println!("recovered value is not a packed message: {e}");
            Ok(())
        }
    }
}

fn run_attack(command: AttackCommand, seed: Option<u64>) -> CliResult<()> {
    match command {
        AttackCommand::CentralSap { transcript, out } => {
            let t = read_transcript(&transcript)?;
            let key = SapPublicKey::try_from(find_kind(&t, Kind::SapPublic)?)?;
            let ct = SapCiphertext::try_from(find_kind(&t, Kind::SapCiphertext)?)?;
            let plain: ActionVector = finish_attack(attack_sap(&key, &ct))?;
            println!("plaintext: {plain}");
            report_message(unpack_message_vector(&plain), out.as_deref())
        }
        AttackCommand::CentralDp { transcript, out } => {
            let mut rng = make_rng(seed)?;
            let t = read_transcript(&transcript)?;
            if let Ok(pk) = find_kind(&t, Kind::EgdpPublic) {
                let key = EgdpPublicKey::try_from(pk)?;
                let ct = EgdpCiphertextAdd::try_from(find_kind(&t, Kind::EgdpCiphertextAdd)?)?;
                let plain: RingElement =
                    finish_attack(attack_egdp_via_central(&key, &ct, &mut rng))?;
                println!("plaintext: {plain}");
                return report_message(unpack_message_element(&plain), out.as_deref());
            }
            let x = t.require("X")?.clone().into_element()?;
            let g_a = t.require("G_A")?.clone().into_element()?;
            let g_b = t.require("G_B")?.clone().into_element()?;
            let shared = finish_attack(attack_dhdp_via_central(&x, &g_a, &g_b, &mut rng))?;
            println!("shared secret: {shared}");
            if let Some(p) = out {
                write_record(&p, &Record::Element(shared), false)?;
            }
            Ok(())
        }
        AttackCommand::UnitBruteforce {
            transcript,
            out,
            search_bound,
        } => {
            let t = read_transcript(&transcript)?;
            let key = EgdpPublicKey::try_from(find_kind(&t, Kind::EgdpPublic)?)?;
            let ct = EgdpCiphertextAdd::try_from(find_kind(&t, Kind::EgdpCiphertextAdd)?)?;
            let plain = finish_attack(brute_force_unit_attack(&key, &ct, search_bound)?)?;
            println!("plaintext: {plain}");
            report_message(unpack_message_element(&plain), out.as_deref())
        }
    }
}
