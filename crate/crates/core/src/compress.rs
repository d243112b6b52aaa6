//! Compressor proxies for `K̂`.
//!
//! The built-in coder is an LZ78 dictionary coder over bits. External
//! compressors are executables that read raw bytes on stdin and write the
//! compressed bytes on stdout; a nonzero exit status is an error.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use crate::bitcode::{decode_nat, encode_nat, gamma_len, BitString};
use crate::error::{Error, Result};

pub const LZ78_ID: &str = "lz78";
pub const LZ78_VERSION: &str = "lz78-bits-v1";
pub const EXTERNAL_ID: &str = "external";
pub const COMPRESSOR_ENV: &str = "NAQKIT_COMPRESSOR_PATH";

pub trait Compressor: Send + Sync {
    fn id(&self) -> &str;
    fn version(&self) -> String;
    /// Compressed size in bits of `r`, before framing.
    fn compressed_bits(&self, r: &BitString) -> Result<u64>;
}

/// Width of a dictionary index when `entries` phrases are available.
fn index_width(entries: usize) -> usize {
    if entries <= 1 {
        0
    } else {
        (usize::BITS - (entries - 1).leading_zeros()) as usize
    }
}

/// `γ(n+1)` followed by LZ78 phrases `(index, bit)`. A trailing phrase that
/// matches a dictionary entry exactly is sent as an index alone.
pub fn lz78_encode(input: &BitString) -> BitString {
    use std::collections::HashMap;
    let bits = input.bits();
    let mut out = encode_nat(bits.len() as u64 + 1).expect("len + 1 >= 1");
    let mut dict: HashMap<(usize, bool), usize> = HashMap::new();
    let mut entries = 1usize; // entry 0 is the empty phrase
    let mut cur = 0usize;
    let emit_index = |out: &mut BitString, idx: usize, entries: usize| {
        out.extend_from(&BitString::from_u64(idx as u64, index_width(entries)));
    };
    for &b in bits {
        match dict.get(&(cur, b)) {
            Some(&next) => cur = next,
            None => {
                emit_index(&mut out, cur, entries);
                out.push(b);
                dict.insert((cur, b), entries);
                entries += 1;
                cur = 0;
            }
        }
    }
    if cur != 0 {
        emit_index(&mut out, cur, entries);
    }
    out
}

pub fn lz78_decode(code: &BitString) -> Result<BitString> {
    let bad = || Error::Parse("malformed lz78 stream".into());
    let (n1, mut pos) = decode_nat(code.bits()).ok_or_else(bad)?;
    let n = (n1 - 1) as usize;
    let mut phrases: Vec<BitString> = vec![BitString::new()];
    let mut out = BitString::new();
    let bits = code.bits();
    while out.len() < n {
        let w = index_width(phrases.len());
        if pos + w > bits.len() {
            return Err(bad());
        }
        let idx = BitString::from_bits(bits[pos..pos + w].to_vec()).to_u64() as usize;
        pos += w;
        let p = phrases.get(idx).ok_or_else(bad)?.clone();
        if out.len() + p.len() == n {
            out.extend_from(&p);
            break;
        }
        let b = *bits.get(pos).ok_or_else(bad)?;
        pos += 1;
        let mut q = p;
        q.push(b);
        out.extend_from(&q);
        phrases.push(q);
    }
    if pos != bits.len() || out.len() != n {
        return Err(bad());
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Lz78;

impl Compressor for Lz78 {
    fn id(&self) -> &str {
        LZ78_ID
    }

    fn version(&self) -> String {
        LZ78_VERSION.into()
    }

    fn compressed_bits(&self, r: &BitString) -> Result<u64> {
        Ok(lz78_encode(r).len() as u64)
    }
}

/// Subprocess adapter. The input is the packed form of `r`.
#[derive(Clone, Debug)]
pub struct ExternalCompressor {
    pub path: PathBuf,
}

impl ExternalCompressor {
    pub fn from_env() -> Result<Self> {
        std::env::var_os(COMPRESSOR_ENV)
            .map(|p| Self { path: p.into() })
            .ok_or_else(|| Error::Compressor {
                id: EXTERNAL_ID.into(),
                diagnostics: format!("{COMPRESSOR_ENV} is not set"),
            })
    }
}

impl Compressor for ExternalCompressor {
    fn id(&self) -> &str {
        EXTERNAL_ID
    }

    fn version(&self) -> String {
        format!("external:{}", self.path.display())
    }

    fn compressed_bits(&self, r: &BitString) -> Result<u64> {
        let fail = |d: String| Error::Compressor { id: EXTERNAL_ID.into(), diagnostics: d };
        let mut child = Command::new(&self.path)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| fail(format!("spawn {}: {e}", self.path.display())))?;
        let input = r.to_packed();
        {
            let mut stdin = child.stdin.take().expect("piped stdin");
            // a compressor that exits early closes the pipe; report via status
            let _ = stdin.write_all(&input);
        }
        let out = child.wait_with_output().map_err(|e| fail(e.to_string()))?;
        if !out.status.success() {
            return Err(fail(format!("exit {}: {}", out.status, String::from_utf8_lossy(&out.stderr).trim())));
        }
        Ok(8 * out.stdout.len() as u64)
    }
}

/// Look up a compressor by id.
pub fn compressor(id: &str) -> Result<Box<dyn Compressor>> {
    match id {
        LZ78_ID => Ok(Box::new(Lz78)),
        EXTERNAL_ID => Ok(Box::new(ExternalCompressor::from_env()?)),
        other => Err(Error::UnknownCompressor(other.to_string())),
    }
}

/// Framed proxy value: payload bits plus the self-delimiting length charge
/// `|encode_nat(payload + 1)|`.
pub fn framed_value(payload_bits: u64) -> u64 {
    payload_bits + gamma_len(payload_bits + 1) as u64
}
