//! Binary table cache.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! "ARF1" | version u16 | kind u8 | offset u64 | length u64 | payload | checksum u64
//! ```
//!
//! The payload stores one `i8` per entry for {mobius, liouville, unit,
//! squarefree-indicator}, one `u32` for omega and one `f64` for {mangoldt,
//! custom}. The checksum is the first eight bytes of the SHA-256 digest of the
//! payload, read as a little-endian `u64`.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{sieve_window, FunctionKind, FunctionTable, SieveConfig};
use crate::error::{ArfError, Result};

pub const MAGIC: &[u8; 4] = b"ARF1";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 1 + 8 + 8;

fn tag(kind: FunctionKind) -> u8 {
    match kind {
        FunctionKind::Mobius => 0,
        FunctionKind::Liouville => 1,
        FunctionKind::Mangoldt => 2,
        FunctionKind::Omega => 3,
        FunctionKind::Unit => 4,
        FunctionKind::SquarefreeIndicator => 5,
        FunctionKind::Custom => 6,
    }
}

fn kind_from_tag(t: u8) -> Result<FunctionKind> {
    FunctionKind::ALL
        .into_iter()
        .find(|&k| tag(k) == t)
        .ok_or_else(|| ArfError::Format(format!("unknown kind tag {t}")))
}

#[derive(Clone, Copy)]
enum Width {
    I8,
    U32,
    F64,
}

impl Width {
    fn of(kind: FunctionKind) -> Width {
        match kind {
            FunctionKind::Mobius
            | FunctionKind::Liouville
            | FunctionKind::Unit
            | FunctionKind::SquarefreeIndicator => Width::I8,
            FunctionKind::Omega => Width::U32,
            FunctionKind::Mangoldt | FunctionKind::Custom => Width::F64,
        }
    }

    fn bytes(self) -> usize {
        match self {
            Width::I8 => 1,
            Width::U32 => 4,
            Width::F64 => 8,
        }
    }
}

fn encode_into(width: Width, values: &[f64], out: &mut Vec<u8>) -> Result<()> {
    for &v in values {
        match width {
            Width::I8 => {
                if v.fract() != 0.0 || !(-128.0..=127.0).contains(&v) {
                    return Err(ArfError::usage(format!("value {v} does not fit an i8 entry")));
                }
                out.push(v as i8 as u8);
            }
            Width::U32 => {
                if v.fract() != 0.0 || !(0.0..=u32::MAX as f64).contains(&v) {
                    return Err(ArfError::usage(format!("value {v} does not fit a u32 entry")));
                }
                out.extend_from_slice(&(v as u32).to_le_bytes());
            }
            Width::F64 => out.extend_from_slice(&v.to_le_bytes()),
        }
    }
    Ok(())
}

pub fn save_table(table: &FunctionTable, path: impl AsRef<Path>) -> Result<()> {
    let width = Width::of(table.kind());
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&[tag(table.kind())])?;
    w.write_all(&table.offset().to_le_bytes())?;
    w.write_all(&table.len().to_le_bytes())?;

    let mut hasher = Sha256::new();
    let mut buf = Vec::with_capacity(1 << 16);
    for chunk in table.values().chunks(1 << 13) {
        buf.clear();
        encode_into(width, chunk, &mut buf)?;
        hasher.update(&buf);
        w.write_all(&buf)?;
    }
    w.write_all(&checksum(hasher).to_le_bytes())?;
    w.flush()?;
    Ok(())
}

fn checksum(hasher: Sha256) -> u64 {
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

pub fn load_table(path: impl AsRef<Path>) -> Result<FunctionTable> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 4 {
        return Err(ArfError::Corruption(format!(
            "file is {} bytes, too short for a header",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(ArfError::Format("bad magic bytes".into()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(ArfError::Corruption("truncated header".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(ArfError::Format(format!(
            "format version {version}, expected {FORMAT_VERSION}"
        )));
    }
    let kind = kind_from_tag(bytes[6])?;
    let offset = u64::from_le_bytes(bytes[7..15].try_into().unwrap());
    let length = u64::from_le_bytes(bytes[15..23].try_into().unwrap());
    let width = Width::of(kind);

    let payload_len = (length as usize)
        .checked_mul(width.bytes())
        .ok_or_else(|| ArfError::Corruption("length field overflows".into()))?;
    let expected = HEADER_LEN + payload_len + 8;
    if bytes.len() != expected {
        return Err(ArfError::Corruption(format!(
            "expected {expected} bytes, found {}",
            bytes.len()
        )));
    }
    let payload = &bytes[HEADER_LEN..HEADER_LEN + payload_len];
    let stored = u64::from_le_bytes(bytes[HEADER_LEN + payload_len..].try_into().unwrap());
    let mut hasher = Sha256::new();
    hasher.update(payload);
    if checksum(hasher) != stored {
        return Err(ArfError::Corruption("checksum mismatch".into()));
    }

    let values: Vec<f64> = match width {
        Width::I8 => payload.iter().map(|&b| f64::from(b as i8)).collect(),
        Width::U32 => payload
            .chunks_exact(4)
            .map(|c| f64::from(u32::from_le_bytes(c.try_into().unwrap())))
            .collect(),
        Width::F64 => payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect(),
    };
    FunctionTable::new(kind, offset, values).map_err(|e| ArfError::Corruption(e.to_string()))
}

/// A directory of sieved tables keyed by kind and limit.
#[derive(Debug, Clone)]
pub struct TableCache {
    dir: PathBuf,
    config: SieveConfig,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>, config: SieveConfig) -> Self {
        TableCache {
            dir: dir.into(),
            config,
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn config(&self) -> &SieveConfig {
        &self.config
    }

    fn path_for(&self, kind: FunctionKind, limit: u64) -> PathBuf {
        self.dir.join(format!("{kind}-{limit}.arf"))
    }

    /// Loads `[1, limit]` for `kind` from the cache, sieving and storing it
    /// on a miss. A corrupt entry is re-sieved and overwritten.
    pub fn table(&self, kind: FunctionKind, limit: u64) -> Result<FunctionTable> {
        if kind == FunctionKind::Unit {
            return sieve_window(kind, 1, limit, &self.config);
        }
        let path = self.path_for(kind, limit);
        if path.exists() {
            match load_table(&path) {
                Ok(t) if t.kind() == kind && t.offset() == 1 && t.len() == limit => return Ok(t),
                Ok(_) | Err(ArfError::Corruption(_)) | Err(ArfError::Format(_)) => {}
                Err(e) => return Err(e),
            }
        }
        let table = sieve_window(kind, 1, limit, &self.config)?;
        fs::create_dir_all(&self.dir)?;
        let tmp = path.with_extension("arf.tmp");
        save_table(&table, &tmp)?;
        fs::rename(&tmp, &path)?;
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::sieve_table;

    #[test]
    fn round_trip_every_width() {
        let dir = tempfile::tempdir().unwrap();
        for kind in [
            FunctionKind::Mobius,
            FunctionKind::Liouville,
            FunctionKind::Mangoldt,
            FunctionKind::Omega,
            FunctionKind::SquarefreeIndicator,
        ] {
            let t = sieve_table(kind, 10_000).unwrap();
            let p = dir.path().join(format!("{kind}.arf"));
            save_table(&t, &p).unwrap();
            let back = load_table(&p).unwrap();
            assert_eq!(back, t);
            assert!(back
                .values()
                .iter()
                .zip(t.values())
                .all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }

    #[test]
    fn header_layout() {
        let dir = tempfile::tempdir().unwrap();
        let t = sieve_table(FunctionKind::Liouville, 3).unwrap();
        let p = dir.path().join("l.arf");
        save_table(&t, &p).unwrap();
        let bytes = fs::read(&p).unwrap();
        assert_eq!(&bytes[..4], b"ARF1");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(bytes[6], 1);
        assert_eq!(&bytes[7..15], &1u64.to_le_bytes());
        assert_eq!(&bytes[15..23], &3u64.to_le_bytes());
        assert_eq!(&bytes[23..26], &[1, 0xff, 0xff]);
        assert_eq!(bytes.len(), 23 + 3 + 8);
    }

    #[test]
    fn empty_file_is_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.arf");
        fs::write(&p, b"").unwrap();
        assert!(matches!(load_table(&p), Err(ArfError::Corruption(_))));
    }

    #[test]
    fn wrong_magic_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.arf");
        fs::write(&p, b"ARF2\x01\x00\x00aaaaaaaabbbbbbbb").unwrap();
        assert!(matches!(load_table(&p), Err(ArfError::Format(_))));
    }

    #[test]
    fn version_mismatch_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let t = sieve_table(FunctionKind::Mobius, 10).unwrap();
        let p = dir.path().join("v.arf");
        save_table(&t, &p).unwrap();
        let mut bytes = fs::read(&p).unwrap();
        bytes[4] = 9;
        fs::write(&p, &bytes).unwrap();
        assert!(matches!(load_table(&p), Err(ArfError::Format(_))));
    }

    #[test]
    fn truncation_and_bit_flips_are_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let t = sieve_table(FunctionKind::Mangoldt, 100).unwrap();
        let p = dir.path().join("m.arf");
        save_table(&t, &p).unwrap();
        let bytes = fs::read(&p).unwrap();

        fs::write(&p, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(load_table(&p), Err(ArfError::Corruption(_))));

        let mut flipped = bytes.clone();
        flipped[40] ^= 0x10;
        fs::write(&p, &flipped).unwrap();
        assert!(matches!(load_table(&p), Err(ArfError::Corruption(_))));
    }

    #[test]
    fn cache_reuses_and_repairs() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TableCache::new(dir.path(), SieveConfig::default());
        let a = cache.table(FunctionKind::Mobius, 5000).unwrap();
        let path = dir.path().join("mobius-5000.arf");
        assert!(path.exists());
        let b = cache.table(FunctionKind::Mobius, 5000).unwrap();
        assert_eq!(a, b);
        fs::write(&path, b"junk").unwrap();
        let c = cache.table(FunctionKind::Mobius, 5000).unwrap();
        assert_eq!(a, c);
        assert_eq!(load_table(&path).unwrap(), a);
    }
}
