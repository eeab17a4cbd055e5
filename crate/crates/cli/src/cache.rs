//! Append-only (h0, rank) cache file.
//!
//! Layout: one entry per line, `<sha256 hex> <h0> <rank>`.  The key hashes
//! the scheme's canonical description (weights, field, points,
//! multiplicities) together with the cell coordinates (n, m), so
//!   * different schemes and different fields never collide,
//!   * a file may safely accumulate entries from many runs.
//!
//! Corrupt lines are skipped with a warning on the error stream.  Writers
//! are serialized through one mutex; a key is appended at most once per
//! process, and re-appending an existing key in a later run is harmless
//! (last load wins with identical values).

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use fatpoints::{Error, RankCache, Result};
use sha2::{Digest, Sha256};

struct Inner {
    map: HashMap<[u8; 32], (usize, usize)>,
    file: std::fs::File,
}

pub struct FileRankCache {
    /// Canonical scheme description prefixing every key.
    scope: String,
    path: PathBuf,
    inner: Mutex<Inner>,
    hits: AtomicU64,
    misses: AtomicU64,
    appends: AtomicU64,
}

impl FileRankCache {
    /// Opens (creating if absent) the cache file and scopes lookups to one
    /// scheme.
    pub fn open(path: &Path, scheme_description: &str) -> Result<FileRankCache> {
        let existing = match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
            Err(e) => {
                return Err(Error::invalid(format!(
                    "cannot read cache `{}`: {e}",
                    path.display()
                )))
            }
        };
        let mut map = HashMap::new();
        for (lineno, line) in existing.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match parse_line(line) {
                Some((key, value)) => {
                    map.insert(key, value);
                }
                None => eprintln!(
                    "warning: cache `{}` line {}: unreadable entry skipped",
                    path.display(),
                    lineno + 1
                ),
            }
        }
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| {
                Error::invalid(format!("cannot open cache `{}`: {e}", path.display()))
            })?;
        Ok(FileRankCache {
            scope: scheme_description.to_string(),
            path: path.to_path_buf(),
            inner: Mutex::new(Inner { map, file }),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            appends: AtomicU64::new(0),
        })
    }

    fn key(&self, n: i64, m: u32) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update(self.scope.as_bytes());
        hasher.update(format!(";n={n};m={m}").as_bytes());
        hasher.finalize().into()
    }

    /// One-line usage summary on the error stream.
    pub fn log_stats(&self) {
        eprintln!(
            "cache `{}`: {} hits, {} misses, {} new entries",
            self.path.display(),
            self.hits.load(Ordering::Relaxed),
            self.misses.load(Ordering::Relaxed),
            self.appends.load(Ordering::Relaxed),
        );
    }
}

impl RankCache for FileRankCache {
    fn get(&self, n: i64, m: u32) -> Option<(usize, usize)> {
        let key = self.key(n, m);
        let found = self.inner.lock().unwrap().map.get(&key).copied();
        match found {
            Some(v) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Some(v)
            }
            None => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    fn put(&self, n: i64, m: u32, h0: usize, rank: usize) {
        let key = self.key(n, m);
        let mut inner = self.inner.lock().unwrap();
        if inner.map.insert(key, (h0, rank)).is_none() {
            let line = format!("{} {h0} {rank}\n", hex(&key));
            if inner.file.write_all(line.as_bytes()).is_err() {
                eprintln!("warning: cache `{}`: write failed", self.path.display());
            }
            self.appends.fetch_add(1, Ordering::Relaxed);
        }
    }
}

fn hex(bytes: &[u8; 32]) -> String {
    let mut out = String::with_capacity(64);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

fn parse_line(line: &str) -> Option<([u8; 32], (usize, usize))> {
    let mut parts = line.split_whitespace();
    let hex_key = parts.next()?;
    let h0 = parts.next()?.parse::<usize>().ok()?;
    let rank = parts.next()?.parse::<usize>().ok()?;
    if parts.next().is_some() || hex_key.len() != 64 {
        return None;
    }
    let mut key = [0u8; 32];
    for (i, chunk) in hex_key.as_bytes().chunks(2).enumerate() {
        let s = std::str::from_utf8(chunk).ok()?;
        key[i] = u8::from_str_radix(s, 16).ok()?;
    }
    Some((key, (h0, rank)))
}
