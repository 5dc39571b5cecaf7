use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use epm_core::attack::AttackStatus;
use epm_core::codec::{deserialize, serialize, Record, Transcript};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub const SEED_ENV: &str = "EPM_SEED";

#[derive(Debug)]
pub enum CliError {
    Core(epm_core::Error),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Usage(String),
    /// A key or table failed its check; carries the reason.
    Validation(String),
    Attack(AttackStatus),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
            CliError::Validation(_) => "validation_failed",
            CliError::Attack(AttackStatus::NoCentralSolution) => "no_central_solution",
            CliError::Attack(AttackStatus::NotFound) => "not_found",
            CliError::Attack(_) => "attack_not_applicable",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Core(epm_core::Error::InvalidKey(_)) => 2,
            CliError::Attack(_) => 3,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "code": self.code(), "detail": self.to_string() }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Usage(s) | CliError::Validation(s) => f.write_str(s),
            CliError::Attack(s) => write!(f, "attack failed: {s:?}"),
        }
    }
}

impl From<epm_core::Error> for CliError {
    fn from(e: epm_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// `EPM_SEED` wins over `--seed`; with neither the generator is seeded from
/// the OS.
pub fn make_rng(seed: Option<u64>) -> CliResult<ChaCha20Rng> {
    let env = match std::env::var(SEED_ENV) {
        Ok(s) => Some(
            s.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be a u64, got {s:?}")))?,
        ),
        Err(_) => None,
    };
    Ok(match env.or(seed) {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    })
}

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_bytes(path: &Path, data: &[u8]) -> CliResult<()> {
    fs::write(path, data).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Accepts raw records and base64-wrapped ones.
pub fn read_record(path: &Path) -> CliResult<Record> {
    let raw = read_bytes(path)?;
    if raw.starts_with(epm_core::codec::wire::MAGIC) {
        return Ok(deserialize(&raw)?);
    }
    let text: Vec<u8> = raw
        .into_iter()
        .filter(|b| !b.is_ascii_whitespace())
        .collect();
    let bytes = STANDARD.decode(&text).map_err(|e| {
        epm_core::Error::Malformed(format!("{}: not a record: {e}", path.display()))
    })?;
    Ok(deserialize(&bytes)?)
}

pub fn read_as<T>(path: &Path) -> CliResult<T>
where
    T: TryFrom<Record, Error = epm_core::Error>,
{
    Ok(T::try_from(read_record(path)?)?)
}

pub fn write_record(path: &Path, record: &Record, base64: bool) -> CliResult<()> {
    let bytes = serialize(record);
    if base64 {
        let mut text = STANDARD.encode(bytes);
        text.push('\n');
        write_bytes(path, text.as_bytes())
    } else {
        write_bytes(path, &bytes)
    }
}

pub fn read_transcript(path: &Path) -> CliResult<Transcript> {
    let raw = read_bytes(path)?;
    let text = String::from_utf8(raw)
        .map_err(|_| epm_core::Error::Malformed(format!("{}: not UTF-8", path.display())))?;
    Ok(Transcript::from_json_lines(&text)?)
}

pub fn write_transcript(path: &Path, t: &Transcript) -> CliResult<()> {
    write_bytes(path, t.to_json_lines().as_bytes())
}

/// Writes to `path`, or to stdout as base64 when no path was given.
pub fn emit_bytes(path: Option<&Path>, data: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => write_bytes(p, data),
        None => {
            println!("{}", STANDARD.encode(data));
            Ok(())
        }
    }
}
