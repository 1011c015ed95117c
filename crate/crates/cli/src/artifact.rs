//! Content-hashed files in the output directory.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `body` under a header carrying the input hash and the body hash.
pub fn write_hashed(path: &Path, kind: &str, input: &str, body: &str) -> io::Result<String> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let sha = sha256_hex(body.as_bytes());
    let text = format!("{kind}\ninput {input}\nsha256 {sha}\n\n{body}");
    let tmp = path.with_extension("partial");
    fs::write(&tmp, &text)?;
    fs::rename(&tmp, path)?;
    Ok(sha256_hex(text.as_bytes()))
}

#[derive(Debug)]
pub enum ReadHashed {
    Missing,
    /// Written for a different input.
    Outdated,
    /// The body does not match its recorded hash.
    Corrupt(PathBuf),
    Valid(String),
}

pub fn read_hashed(path: &Path, kind: &str, input: &str) -> io::Result<ReadHashed> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(ReadHashed::Missing),
        Err(e) => return Err(e),
    };
    let Some((head, body)) = text.split_once("\n\n") else {
        return Ok(ReadHashed::Corrupt(path.to_path_buf()));
    };
    let mut lines = head.lines();
    if lines.next() != Some(kind) {
        return Ok(ReadHashed::Corrupt(path.to_path_buf()));
    }
    let field = |l: Option<&str>, name: &str| {
        l.and_then(|l| l.strip_prefix(name))
            .map(|v| v.trim().to_string())
    };
    let recorded_input = field(lines.next(), "input ");
    let recorded_sha = field(lines.next(), "sha256 ");
    if recorded_sha.as_deref() != Some(sha256_hex(body.as_bytes()).as_str()) {
        return Ok(ReadHashed::Corrupt(path.to_path_buf()));
    }
    if recorded_input.as_deref() != Some(input) {
        return Ok(ReadHashed::Outdated);
    }
    Ok(ReadHashed::Valid(body.to_string()))
}

pub fn write_plain(path: &Path, body: &str) -> io::Result<String> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, body)?;
    Ok(sha256_hex(body.as_bytes()))
}
