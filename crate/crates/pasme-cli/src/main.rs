//! Command-line front end: hybrid file encryption into `.pasme`
//! containers, trailer steganography, container inspection, and the
//! built-in attack demos. Output files are written through a temp file
//! in the destination directory, so a failed run leaves nothing behind.

use clap::{Args, Parser, Subcommand};
use pasme::audit::{dictionary_attack, encoding_leak_report, known_plaintext_recover_q, AttackReport};
use pasme::container::{describe, read_header, write_header, ContainerError};
use pasme::hybrid::{recover_keysheet, seal_keysheet, stream_xor_at, HybridError, DEFAULT_SHEET_LEN};
use pasme::protocol::{self, ProtocolError};
use pasme::stego::{StegoError, TRAILER_LEN};
use pasme::{DigitString, SecurityConfig};
use rand::RngCore;
use rand_chacha::ChaCha20Rng;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, IsTerminal, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use tempfile::NamedTempFile;

const CHUNK: usize = 64 * 1024;

/// Exit codes: 1 usage or I/O, 2 rejected passphrase, 3 malformed input.
const EXIT_USAGE: u8 = 1;
const EXIT_KEY_REJECTED: u8 = 2;
const EXIT_MALFORMED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "pasme",
    version,
    about = "Toy PASME cipher: seal files in prime-number envelopes, hide them in carriers, and attack the result.",
    after_help = "pasme is a study object. Every mode it offers is breakable (run `pasme audit`)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encrypt a file into a .pasme container
    Encrypt(EncryptArgs),
    /// Decrypt a .pasme container
    Decrypt(DecryptArgs),
    /// Append a payload to a carrier file, with a length trailer
    Hide(HideArgs),
    /// Extract a payload appended by `hide`
    Reveal(RevealArgs),
    /// Show the public numbers' sizes in a container
    Inspect(InspectArgs),
    /// Run the built-in attacks against a demo bundle
    Audit(AuditArgs),
}

#[derive(Args)]
struct PassphraseOpts {
    /// Read the passphrase from this environment variable
    #[arg(long, value_name = "VAR", group = "pass")]
    passphrase_env: Option<String>,
    /// Pass the passphrase on the command line (visible in process listings)
    #[arg(long, value_name = "PHRASE", group = "pass")]
    passphrase_unsafe: Option<String>,
}

#[derive(Args)]
struct EncryptArgs {
    /// File to encrypt
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Container to write
    #[arg(long = "out", value_name = "FILE")]
    output: PathBuf,
    #[command(flatten)]
    pass: PassphraseOpts,
    /// Generate a random passphrase and print it to stdout
    #[arg(long, group = "pass")]
    generate_passphrase: bool,
    /// Key-sheet length in bytes; longer sheets slow encryption sharply
    #[arg(long, value_name = "BYTES", default_value_t = DEFAULT_SHEET_LEN,
          value_parser = clap::value_parser!(usize))]
    sheet_len: usize,
    /// Bit size of the main secret draws
    #[arg(long, value_name = "BITS", default_value_t = 256,
          value_parser = clap::value_parser!(u64).range(8..=4096))]
    security_bits: u64,
    /// Skip the plaintext CRC-32 (no corruption detection on decrypt)
    #[arg(long)]
    no_checksum: bool,
    /// Deterministic randomness for testing; insecure by construction
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Args)]
struct DecryptArgs {
    /// Container to read
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Plaintext file to write
    #[arg(long = "out", value_name = "FILE")]
    output: PathBuf,
    #[command(flatten)]
    pass: PassphraseOpts,
}

#[derive(Args)]
struct HideArgs {
    /// Carrier file, copied through untouched
    #[arg(long, value_name = "FILE")]
    carrier: PathBuf,
    /// Payload to append
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Stego file to write
    #[arg(long = "out", value_name = "FILE")]
    output: PathBuf,
}

#[derive(Args)]
struct RevealArgs {
    /// Stego file produced by `hide`
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Payload file to write
    #[arg(long = "out", value_name = "FILE")]
    output: PathBuf,
}

#[derive(Args)]
struct InspectArgs {
    /// Container to describe
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Args)]
struct AuditArgs {
    /// Bit size of the demo bundle's secret draws
    #[arg(long, value_name = "BITS", default_value_t = 64,
          value_parser = clap::value_parser!(u64).range(8..=4096))]
    security_bits: u64,
    /// Deterministic randomness for reproducible reports
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        fail(EXIT_USAGE, e.to_string())
    }
}

impl From<ContainerError> for Failure {
    fn from(e: ContainerError) -> Self {
        match e {
            ContainerError::Io(inner) => fail(EXIT_USAGE, inner.to_string()),
            other => fail(EXIT_MALFORMED, other.to_string()),
        }
    }
}

impl From<HybridError> for Failure {
    fn from(e: HybridError) -> Self {
        let code = match &e {
            HybridError::Protocol(ProtocolError::KeyRejected) => EXIT_KEY_REJECTED,
            HybridError::ChecksumMismatch
            | HybridError::EmptyKeySheet
            | HybridError::Protocol(ProtocolError::Malformed(_))
            | HybridError::Protocol(ProtocolError::InconsistentEnvelope) => EXIT_MALFORMED,
            _ => EXIT_USAGE,
        };
        fail(code, e.to_string())
    }
}

impl From<ProtocolError> for Failure {
    fn from(e: ProtocolError) -> Self {
        Failure::from(HybridError::Protocol(e))
    }
}

impl From<StegoError> for Failure {
    fn from(e: StegoError) -> Self {
        let code = match e {
            StegoError::PayloadTooLarge => EXIT_USAGE,
            StegoError::MalformedStego(_) => EXIT_MALFORMED,
        };
        fail(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Encrypt(args) => encrypt(args),
        Command::Decrypt(args) => decrypt(args),
        Command::Hide(args) => hide(args),
        Command::Reveal(args) => reveal(args),
        Command::Inspect(args) => inspect(args),
        Command::Audit(args) => audit(args),
    }
}

fn banner() {
    eprintln!("warning: pasme is a toy cipher for study; do not protect real secrets with it");
}

fn make_rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(seed) => {
            eprintln!("warning: --seed makes every output predictable; test use only");
            pasme::seeded_source(seed)
        }
        None => pasme::entropy_source(),
    }
}

fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Resolves the passphrase from, in priority order: generation, the
/// environment, the explicit flag, or a prompt. Generated phrases go to
/// stdout — the one place secret material is ever printed, because the
/// user cannot use the container without it.
fn resolve_passphrase(
    opts: &PassphraseOpts,
    generate: bool,
    rng: &mut ChaCha20Rng,
    confirm: bool,
) -> Result<Vec<u8>, Failure> {
    let phrase: Vec<u8> = if generate {
        let mut raw = [0u8; 16];
        rng.fill_bytes(&mut raw);
        let phrase = to_hex(&raw);
        println!("passphrase: {phrase}");
        phrase.into_bytes()
    } else if let Some(var) = &opts.passphrase_env {
        std::env::var(var)
            .map_err(|_| fail(EXIT_USAGE, format!("environment variable {var} is not set")))?
            .into_bytes()
    } else if let Some(phrase) = &opts.passphrase_unsafe {
        phrase.clone().into_bytes()
    } else if io::stdin().is_terminal() {
        let first = rpassword::prompt_password("passphrase: ")
            .map_err(|e| fail(EXIT_USAGE, format!("cannot read passphrase: {e}")))?;
        if confirm {
            let second = rpassword::prompt_password("confirm passphrase: ")
                .map_err(|e| fail(EXIT_USAGE, format!("cannot read passphrase: {e}")))?;
            if first != second {
                return Err(fail(EXIT_USAGE, "passphrases do not match"));
            }
        }
        first.into_bytes()
    } else {
        let mut line = String::new();
        io::stdin().read_line(&mut line)?;
        line.trim_end_matches(['\n', '\r']).as_bytes().to_vec()
    };
    if phrase.is_empty() {
        return Err(fail(EXIT_USAGE, "passphrase must not be empty"));
    }
    Ok(phrase)
}

/// Temp file in the destination's directory, so the final persist is a
/// rename and interrupted runs leave no partial output.
fn staging_file(output: &Path) -> Result<NamedTempFile, Failure> {
    let dir = match output.parent() {
        Some(parent) if parent != Path::new("") => parent,
        _ => Path::new("."),
    };
    NamedTempFile::new_in(dir)
        .map_err(|e| fail(EXIT_USAGE, format!("cannot stage output in {}: {e}", dir.display())))
}

fn persist(tmp: NamedTempFile, output: &Path) -> Result<(), Failure> {
    tmp.persist(output)
        .map(|_| ())
        .map_err(|e| fail(EXIT_USAGE, format!("cannot write {}: {}", output.display(), e.error)))
}

fn encrypt(args: EncryptArgs) -> Result<(), Failure> {
    banner();
    let mut rng = make_rng(args.seed);
    let passphrase = resolve_passphrase(&args.pass, args.generate_passphrase, &mut rng, true)?;
    let cfg = SecurityConfig::with_main_bits(args.security_bits);
    if args.sheet_len == 0 {
        return Err(fail(EXIT_USAGE, "key-sheet length must be at least 1 byte"));
    }

    let payload_len = std::fs::metadata(&args.input)
        .map_err(|e| fail(EXIT_USAGE, format!("cannot read {}: {e}", args.input.display())))?
        .len();
    let (sheet, bundle) = seal_keysheet(&passphrase, &cfg, args.sheet_len, &mut rng)?;

    let mut reader = BufReader::new(File::open(&args.input)?);
    let tmp = staging_file(&args.output)?;
    let mut writer = BufWriter::new(tmp);
    write_header(&bundle, payload_len, !args.no_checksum, &mut writer)?;

    let mut hasher = crc32fast::Hasher::new();
    let mut buf = vec![0u8; CHUNK];
    let mut offset = 0u64;
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        stream_xor_at(&mut buf[..n], &sheet, offset);
        writer.write_all(&buf[..n])?;
        offset += n as u64;
    }
    if offset != payload_len {
        return Err(fail(
            EXIT_USAGE,
            format!("{} changed size while reading", args.input.display()),
        ));
    }
    if !args.no_checksum {
        writer.write_all(&hasher.finalize().to_le_bytes())?;
    }
    let tmp = writer
        .into_inner()
        .map_err(|e| fail(EXIT_USAGE, format!("write failed: {e}")))?;
    persist(tmp, &args.output)
}

fn decrypt(args: DecryptArgs) -> Result<(), Failure> {
    banner();
    let mut rng = make_rng(None);
    let passphrase = resolve_passphrase(&args.pass, false, &mut rng, false)?;

    let mut reader = BufReader::new(
        File::open(&args.input)
            .map_err(|e| fail(EXIT_USAGE, format!("cannot read {}: {e}", args.input.display())))?,
    );
    let header = read_header(&mut reader)?;
    let sheet = recover_keysheet(&header.bundle, &passphrase)?;

    let tmp = staging_file(&args.output)?;
    let mut writer = BufWriter::new(tmp);
    let mut hasher = crc32fast::Hasher::new();
    let mut remaining = header.ciphertext_len;
    let mut buf = vec![0u8; CHUNK];
    let mut offset = 0u64;
    while remaining > 0 {
        let want = remaining.min(CHUNK as u64) as usize;
        reader
            .read_exact(&mut buf[..want])
            .map_err(|e| match e.kind() {
                io::ErrorKind::UnexpectedEof => Failure::from(ContainerError::Truncated),
                _ => Failure::from(e),
            })?;
        stream_xor_at(&mut buf[..want], &sheet, offset);
        hasher.update(&buf[..want]);
        writer.write_all(&buf[..want])?;
        offset += want as u64;
        remaining -= want as u64;
    }
    if header.has_checksum {
        let mut crc = [0u8; 4];
        reader.read_exact(&mut crc).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof => Failure::from(ContainerError::Truncated),
            _ => Failure::from(e),
        })?;
        if hasher.finalize() != u32::from_le_bytes(crc) {
            return Err(HybridError::ChecksumMismatch.into());
        }
    }
    if reader.read(&mut [0u8; 1])? != 0 {
        return Err(ContainerError::TrailingData.into());
    }
    let tmp = writer
        .into_inner()
        .map_err(|e| fail(EXIT_USAGE, format!("write failed: {e}")))?;
    persist(tmp, &args.output)
}

fn hide(args: HideArgs) -> Result<(), Failure> {
    let payload_len = std::fs::metadata(&args.input)
        .map_err(|e| fail(EXIT_USAGE, format!("cannot read {}: {e}", args.input.display())))?
        .len();
    let declared =
        u32::try_from(payload_len).map_err(|_| Failure::from(StegoError::PayloadTooLarge))?;

    let mut carrier = BufReader::new(File::open(&args.carrier).map_err(|e| {
        fail(EXIT_USAGE, format!("cannot read {}: {e}", args.carrier.display()))
    })?);
    let mut payload = BufReader::new(File::open(&args.input)?);
    let tmp = staging_file(&args.output)?;
    let mut writer = BufWriter::new(tmp);
    io::copy(&mut carrier, &mut writer)?;
    let copied = io::copy(&mut payload, &mut writer)?;
    if copied != payload_len {
        return Err(fail(
            EXIT_USAGE,
            format!("{} changed size while reading", args.input.display()),
        ));
    }
    writer.write_all(&declared.to_le_bytes())?;
    let tmp = writer
        .into_inner()
        .map_err(|e| fail(EXIT_USAGE, format!("write failed: {e}")))?;
    persist(tmp, &args.output)
}

fn reveal(args: RevealArgs) -> Result<(), Failure> {
    let mut file = File::open(&args.input)
        .map_err(|e| fail(EXIT_USAGE, format!("cannot read {}: {e}", args.input.display())))?;
    let total = file.metadata()?.len();
    if total < TRAILER_LEN as u64 {
        return Err(StegoError::MalformedStego("shorter than the length trailer").into());
    }
    file.seek(SeekFrom::End(-(TRAILER_LEN as i64)))?;
    let mut trailer = [0u8; TRAILER_LEN];
    file.read_exact(&mut trailer)?;
    let declared = u32::from_le_bytes(trailer) as u64;
    if declared + TRAILER_LEN as u64 > total {
        return Err(StegoError::MalformedStego("declared payload exceeds file size").into());
    }
    file.seek(SeekFrom::Start(total - TRAILER_LEN as u64 - declared))?;
    let tmp = staging_file(&args.output)?;
    let mut writer = BufWriter::new(tmp);
    let copied = io::copy(&mut file.take(declared), &mut writer)?;
    if copied != declared {
        return Err(fail(
            EXIT_USAGE,
            format!("{} changed size while reading", args.input.display()),
        ));
    }
    let tmp = writer
        .into_inner()
        .map_err(|e| fail(EXIT_USAGE, format!("write failed: {e}")))?;
    persist(tmp, &args.output)
}

fn inspect(args: InspectArgs) -> Result<(), Failure> {
    let mut reader = BufReader::new(
        File::open(&args.input)
            .map_err(|e| fail(EXIT_USAGE, format!("cannot read {}: {e}", args.input.display())))?,
    );
    let header = read_header(&mut reader)?;
    // body is not parsed, but its size must account for the rest of the file
    let consumed = reader.stream_position()?;
    let total = std::fs::metadata(&args.input)?.len();
    let trailer = if header.has_checksum { 4u64 } else { 0 };
    let expected = consumed
        .checked_add(header.ciphertext_len)
        .and_then(|n| n.checked_add(trailer))
        .ok_or(ContainerError::Truncated)?;
    if total < expected {
        return Err(ContainerError::Truncated.into());
    }
    if total > expected {
        return Err(ContainerError::TrailingData.into());
    }
    print!("{}", describe(&header));
    Ok(())
}

fn audit(args: AuditArgs) -> Result<(), Failure> {
    banner();
    let mut rng = make_rng(args.seed);
    let cfg = SecurityConfig::with_main_bits(args.security_bits);
    let message = b"attack at dawn";
    let passphrase = b"hunter2"; // deliberately weak: it is in the wordlist below
    eprintln!(
        "building a demo bundle ({}-bit draws, passphrase from a common-password list)...",
        args.security_bits
    );
    let bundle = protocol::encrypt(
        &DigitString::from_bytes(message),
        &DigitString::from_bytes(passphrase),
        &cfg,
        &mut rng,
    )?;

    // 1: guess the plaintext, recover the envelope prime and divisor
    let start = Instant::now();
    let recovered = known_plaintext_recover_q(&bundle, &DigitString::from_bytes(message));
    let kpa = AttackReport {
        attack: "known-plaintext",
        trials: 1,
        successes: recovered.is_ok() as u64,
        elapsed: start.elapsed(),
        recovered: recovered
            .map(|r| {
                vec![
                    format!("q recovered ({} bits)", r.q.bits()),
                    format!("w recovered ({} bits): passphrase-equivalent", r.w.bits()),
                ]
            })
            .unwrap_or_default(),
    };
    print_report(&kpa);

    // 2: the validation residue is a free oracle for passphrase guessing
    let wordlist = [
        "password", "123456", "12345678", "qwerty", "abc123", "letmein", "dragon", "111111",
        "baseball", "iloveyou", "trustno1", "hunter2", "sunshine", "master", "welcome",
        "shadow", "ashley", "football", "jesus", "michael",
    ];
    let candidates: Vec<DigitString> = wordlist
        .iter()
        .map(|w| DigitString::from_bytes(w.as_bytes()))
        .collect();
    print_report(&dictionary_attack(&bundle, &candidates));

    // 3: the digit encoding inverts from public parameters alone
    let samples: Vec<DigitString> = [
        &b"attack at dawn"[..],
        b"attack at dusk",
        b"hold position",
        b"attack at dawn",
        b"",
    ]
    .iter()
    .map(|m| DigitString::from_bytes(m))
    .collect();
    print_report(&encoding_leak_report(
        &samples,
        &bundle.params.k3,
        &bundle.params.k5,
    ));
    Ok(())
}

fn print_report(report: &AttackReport) {
    println!("{report}");
    println!("{}", report.record());
    println!();
}
