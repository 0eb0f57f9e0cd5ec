//! Reading and writing the zip container of a JAR.
//!
//! Only what JARs use: single-disk archives, stored and deflated entries, no
//! encryption, no zip64. Sizes and offsets come from the central directory;
//! local headers are checked against it.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use flate2::read::DeflateDecoder;
use flate2::write::DeflateEncoder;
use flate2::Compression;
use jdebloat_core::archive::{validate_entry_path, Archive};

const LOCAL_SIG: u32 = 0x0403_4b50;
const CENTRAL_SIG: u32 = 0x0201_4b50;
const EOCD_SIG: u32 = 0x0605_4b50;
const EOCD_LEN: usize = 22;
const MAX_COMMENT: usize = 0xFFFF;

const METHOD_STORED: u16 = 0;
const METHOD_DEFLATE: u16 = 8;
const FLAG_ENCRYPTED: u16 = 0x0001;
const FLAG_UTF8: u16 = 0x0800;

/// 1980-01-01 00:00:00 in MS-DOS format, the earliest representable time.
const DOS_TIME: u16 = 0;
const DOS_DATE: u16 = (1 << 5) | 1;
const VERSION: u16 = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZipError {
    #[error("not a zip archive: {0}")]
    NotAZip(&'static str),
    #[error("corrupt entry `{path}`: {reason}")]
    CorruptEntry { path: String, reason: String },
    #[error("duplicate entry path `{0}`")]
    DuplicateEntryPath(String),
    #[error("unsupported zip feature: {0}")]
    Unsupported(String),
    #[error("invalid entry path `{0}`")]
    InvalidEntryPath(String),
}

fn u16_at(b: &[u8], at: usize) -> Option<u16> {
    Some(u16::from_le_bytes(b.get(at..at + 2)?.try_into().ok()?))
}

fn u32_at(b: &[u8], at: usize) -> Option<u32> {
    Some(u32::from_le_bytes(b.get(at..at + 4)?.try_into().ok()?))
}

struct Eocd {
    entries: u16,
    cd_size: u32,
    cd_offset: u32,
}

fn find_eocd(bytes: &[u8]) -> Result<(usize, Eocd), ZipError> {
    if bytes.len() < EOCD_LEN {
        return Err(ZipError::NotAZip("too short"));
    }
    let last = bytes.len() - EOCD_LEN;
    let first = last.saturating_sub(MAX_COMMENT);
    let pos = (first..=last)
        .rev()
        .find(|&i| {
            u32_at(bytes, i) == Some(EOCD_SIG)
                && u16_at(bytes, i + 20).map(usize::from) == Some(bytes.len() - i - EOCD_LEN)
        })
        .ok_or(ZipError::NotAZip("no end of central directory record"))?;
    let field = |off| u16_at(bytes, pos + off).unwrap();
    if field(4) != 0 || field(6) != 0 {
        return Err(ZipError::Unsupported("multi-disk archive".into()));
    }
    let eocd = Eocd {
        entries: field(10),
        cd_size: u32_at(bytes, pos + 12).unwrap(),
        cd_offset: u32_at(bytes, pos + 16).unwrap(),
    };
    if eocd.entries == 0xFFFF || eocd.cd_size == u32::MAX || eocd.cd_offset == u32::MAX {
        return Err(ZipError::Unsupported("zip64".into()));
    }
    if field(8) != eocd.entries {
        return Err(ZipError::NotAZip("inconsistent entry counts"));
    }
    Ok((pos, eocd))
}

struct CentralEntry {
    name: String,
    flags: u16,
    method: u16,
    crc: u32,
    compressed: u32,
    size: u32,
    local_offset: u32,
}

fn corrupt(path: &str, reason: impl Into<String>) -> ZipError {
    ZipError::CorruptEntry {
        path: path.into(),
        reason: reason.into(),
    }
}

fn read_central_directory(
    bytes: &[u8],
    eocd_pos: usize,
    eocd: &Eocd,
) -> Result<Vec<CentralEntry>, ZipError> {
    let start = eocd.cd_offset as usize;
    let end = start
        .checked_add(eocd.cd_size as usize)
        .filter(|&e| e <= eocd_pos)
        .ok_or(ZipError::NotAZip("central directory out of bounds"))?;
    let cd = &bytes[start..end];
    let mut out = Vec::with_capacity(eocd.entries.into());
    let mut at = 0;
    for _ in 0..eocd.entries {
        if u32_at(cd, at) != Some(CENTRAL_SIG) || cd.len() < at + 46 {
            return Err(ZipError::NotAZip("bad central directory header"));
        }
        let f16 = |off| u16_at(cd, at + off).unwrap();
        let f32 = |off| u32_at(cd, at + off).unwrap();
        let (name_len, extra_len, comment_len) =
            (f16(28) as usize, f16(30) as usize, f16(32) as usize);
        let raw_name = cd
            .get(at + 46..at + 46 + name_len)
            .ok_or(ZipError::NotAZip("truncated central directory"))?;
        let name = String::from_utf8(raw_name.to_vec()).map_err(|_| {
            ZipError::InvalidEntryPath(String::from_utf8_lossy(raw_name).into_owned())
        })?;
        out.push(CentralEntry {
            name,
            flags: f16(8),
            method: f16(10),
            crc: f32(16),
            compressed: f32(20),
            size: f32(24),
            local_offset: f32(42),
        });
        at += 46 + name_len + extra_len + comment_len;
    }
    if at > cd.len() {
        return Err(ZipError::NotAZip("truncated central directory"));
    }
    Ok(out)
}

fn read_payload(bytes: &[u8], e: &CentralEntry) -> Result<Vec<u8>, ZipError> {
    let name = e.name.as_str();
    if e.flags & FLAG_ENCRYPTED != 0 {
        return Err(ZipError::Unsupported(format!("encrypted entry `{name}`")));
    }
    if e.size == u32::MAX || e.compressed == u32::MAX || e.local_offset == u32::MAX {
        return Err(ZipError::Unsupported("zip64".into()));
    }
    let at = e.local_offset as usize;
    if u32_at(bytes, at) != Some(LOCAL_SIG) {
        return Err(corrupt(name, "missing local header"));
    }
    let name_len =
        u16_at(bytes, at + 26).ok_or_else(|| corrupt(name, "truncated local header"))? as usize;
    let extra_len =
        u16_at(bytes, at + 28).ok_or_else(|| corrupt(name, "truncated local header"))? as usize;
    if bytes.get(at + 30..at + 30 + name_len) != Some(name.as_bytes()) {
        return Err(corrupt(name, "local header names a different entry"));
    }
    let data_start = at + 30 + name_len + extra_len;
    let data = data_start
        .checked_add(e.compressed as usize)
        .and_then(|end| bytes.get(data_start..end))
        .ok_or_else(|| corrupt(name, "data runs past end of archive"))?;
    let payload = match e.method {
        METHOD_STORED => data.to_vec(),
        METHOD_DEFLATE => {
            let mut out = Vec::with_capacity(e.size as usize);
            DeflateDecoder::new(data)
                .take(u64::from(e.size) + 1)
                .read_to_end(&mut out)
                .map_err(|err| corrupt(name, err.to_string()))?;
            out
        }
        m => {
            return Err(ZipError::Unsupported(format!(
                "compression method {m} for `{name}`"
            )))
        }
    };
    if payload.len() != e.size as usize {
        return Err(corrupt(
            name,
            format!("expected {} bytes, got {}", e.size, payload.len()),
        ));
    }
    if crc32fast::hash(&payload) != e.crc {
        return Err(corrupt(name, "CRC mismatch"));
    }
    Ok(payload)
}

/// Opens zip bytes as an [`Archive`] labelled `label`. Directory entries are
/// skipped; every file entry is decompressed and CRC-checked.
pub fn open_archive(bytes: &[u8], label: &str) -> Result<Archive, ZipError> {
    let (eocd_pos, eocd) = find_eocd(bytes)?;
    let mut entries = BTreeMap::new();
    for e in read_central_directory(bytes, eocd_pos, &eocd)? {
        if e.name.ends_with('/') {
            continue;
        }
        validate_entry_path(&e.name).map_err(|_| ZipError::InvalidEntryPath(e.name.clone()))?;
        if entries.contains_key(&e.name) {
            return Err(ZipError::DuplicateEntryPath(e.name));
        }
        let payload = read_payload(bytes, &e)?;
        entries.insert(e.name, payload);
    }
    Ok(Archive::new(label, entries).expect("entry paths validated above"))
}

fn too_large(what: &str) -> ZipError {
    ZipError::Unsupported(format!("{what} needs zip64"))
}

/// Deterministic zip bytes for `entries`: path order, fixed timestamp,
/// deflate at the default level, UTF-8 names, no extra fields.
pub fn write_archive(entries: &BTreeMap<String, Vec<u8>>) -> Result<Vec<u8>, ZipError> {
    let count = u16::try_from(entries.len()).map_err(|_| too_large("entry count"))?;
    let mut out = Vec::new();
    let mut central = Vec::new();
    for (path, payload) in entries {
        validate_entry_path(path).map_err(|_| ZipError::InvalidEntryPath(path.clone()))?;
        let name_len =
            u16::try_from(path.len()).map_err(|_| ZipError::InvalidEntryPath(path.clone()))?;
        let mut encoder = DeflateEncoder::new(Vec::new(), Compression::default());
        encoder.write_all(payload).expect("writing to a Vec");
        let compressed = encoder.finish().expect("writing to a Vec");
        let size = u32::try_from(payload.len()).map_err(|_| too_large(path))?;
        let csize = u32::try_from(compressed.len()).map_err(|_| too_large(path))?;
        let offset = u32::try_from(out.len()).map_err(|_| too_large("archive"))?;
        let crc = crc32fast::hash(payload);

        let mut common = Vec::with_capacity(26);
        for v in [VERSION, FLAG_UTF8, METHOD_DEFLATE, DOS_TIME, DOS_DATE] {
            common.extend_from_slice(&v.to_le_bytes());
        }
        for v in [crc, csize, size] {
            common.extend_from_slice(&v.to_le_bytes());
        }
        common.extend_from_slice(&name_len.to_le_bytes());
        common.extend_from_slice(&0u16.to_le_bytes());

        out.extend_from_slice(&LOCAL_SIG.to_le_bytes());
        out.extend_from_slice(&common);
        out.extend_from_slice(path.as_bytes());
        out.extend_from_slice(&compressed);

        central.extend_from_slice(&CENTRAL_SIG.to_le_bytes());
        central.extend_from_slice(&VERSION.to_le_bytes());
        central.extend_from_slice(&common);
        // comment length, disk, internal and external attributes
        central.extend_from_slice(&[0; 10]);
        central.extend_from_slice(&offset.to_le_bytes());
        central.extend_from_slice(path.as_bytes());
    }
    let cd_offset = u32::try_from(out.len()).map_err(|_| too_large("archive"))?;
    let cd_size = u32::try_from(central.len()).map_err(|_| too_large("central directory"))?;
    out.extend_from_slice(&central);
    out.extend_from_slice(&EOCD_SIG.to_le_bytes());
    out.extend_from_slice(&[0; 4]);
    out.extend_from_slice(&count.to_le_bytes());
    out.extend_from_slice(&count.to_le_bytes());
    out.extend_from_slice(&cd_size.to_le_bytes());
    out.extend_from_slice(&cd_offset.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(entries: &[(&str, &[u8])]) -> BTreeMap<String, Vec<u8>> {
        entries
            .iter()
            .map(|(p, b)| (p.to_string(), b.to_vec()))
            .collect()
    }

    #[test]
    fn empty_archive() {
        let bytes = write_archive(&BTreeMap::new()).unwrap();
        assert_eq!(bytes.len(), EOCD_LEN);
        assert!(open_archive(&bytes, "e").unwrap().is_empty());
    }

    #[test]
    fn single_entry_round_trip() {
        let m = map(&[("a.txt", b"x")]);
        let a = open_archive(&write_archive(&m).unwrap(), "t").unwrap();
        assert_eq!(a.entries(), &m);
        assert_eq!(a.label, "t");
    }

    #[test]
    fn deterministic_bytes() {
        let m = map(&[
            ("b/c.class", &[0xCA, 0xFE]),
            ("a.txt", b"hello hello hello"),
        ]);
        assert_eq!(write_archive(&m).unwrap(), write_archive(&m).unwrap());
    }

    #[test]
    fn rejects_invalid_paths_on_write() {
        let m = map(&[("../evil", b"")]);
        assert_eq!(
            write_archive(&m),
            Err(ZipError::InvalidEntryPath("../evil".into()))
        );
    }

    #[test]
    fn not_a_zip() {
        assert!(matches!(open_archive(b"", "x"), Err(ZipError::NotAZip(_))));
        assert!(matches!(
            open_archive(&[0xCA; 100], "x"),
            Err(ZipError::NotAZip(_))
        ));
    }

    #[test]
    fn crc_mismatch_detected() {
        let m = map(&[("a.txt", b"payload")]);
        let mut bytes = write_archive(&m).unwrap();
        // CRC field of the central header.
        let cd = u32_at(&bytes, bytes.len() - 6).unwrap() as usize;
        bytes[cd + 16] ^= 0xFF;
        assert!(
            matches!(open_archive(&bytes, "x"), Err(ZipError::CorruptEntry { reason, .. }) if reason == "CRC mismatch")
        );
    }

    #[test]
    fn encrypted_and_unknown_methods_unsupported() {
        let m = map(&[("a.txt", b"payload")]);
        let bytes = write_archive(&m).unwrap();
        let cd = u32_at(&bytes, bytes.len() - 6).unwrap() as usize;

        let mut enc = bytes.clone();
        enc[cd + 8] |= 1;
        assert!(matches!(
            open_archive(&enc, "x"),
            Err(ZipError::Unsupported(_))
        ));

        let mut bzip = bytes;
        bzip[cd + 10] = 12;
        assert!(matches!(
            open_archive(&bzip, "x"),
            Err(ZipError::Unsupported(_))
        ));
    }

    #[test]
    fn duplicate_names_rejected() {
        let m = map(&[("a", b"1"), ("b", b"2")]);
        let mut bytes = write_archive(&m).unwrap();
        // Rename the second entry in both headers.
        let cd = u32_at(&bytes, bytes.len() - 6).unwrap() as usize;
        let second_cd = cd + 46 + 1;
        bytes[second_cd + 46] = b'a';
        let second_local = u32_at(&bytes, second_cd + 42).unwrap() as usize;
        bytes[second_local + 30] = b'a';
        assert_eq!(
            open_archive(&bytes, "x"),
            Err(ZipError::DuplicateEntryPath("a".into()))
        );
    }
}
