//! The JVM's "modified UTF-8" encoding of `CONSTANT_Utf8` payloads.

use alloc::string::String;
use alloc::vec::Vec;

/// Decodes modified UTF-8. Structural errors (bad lead or continuation
/// bytes, raw NUL, 4-byte forms) return `None`; unpaired surrogates are
/// valid in Java strings but not in Rust ones and become U+FFFD.
pub(crate) fn decode(bytes: &[u8]) -> Option<String> {
    if bytes.iter().all(|&b| b != 0 && b < 0x80) {
        return core::str::from_utf8(bytes).ok().map(String::from);
    }
    let mut units: Vec<u16> = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            0x01..=0x7F => {
                units.push(u16::from(b));
                i += 1;
            }
            0xC0..=0xDF => {
                let c = *bytes.get(i + 1)?;
                if c & 0xC0 != 0x80 {
                    return None;
                }
                units.push((u16::from(b & 0x1F) << 6) | u16::from(c & 0x3F));
                i += 2;
            }
            0xE0..=0xEF => {
                let c1 = *bytes.get(i + 1)?;
                let c2 = *bytes.get(i + 2)?;
                if c1 & 0xC0 != 0x80 || c2 & 0xC0 != 0x80 {
                    return None;
                }
                units.push(
                    (u16::from(b & 0x0F) << 12)
                        | (u16::from(c1 & 0x3F) << 6)
                        | u16::from(c2 & 0x3F),
                );
                i += 3;
            }
            _ => return None,
        }
    }
    Some(
        char::decode_utf16(units)
            .map(|r| r.unwrap_or(char::REPLACEMENT_CHARACTER))
            .collect(),
    )
}

/// Encodes a string as modified UTF-8 (NUL as `C0 80`, supplementary
/// characters as surrogate pairs).
pub(crate) fn encode(s: &str) -> Vec<u8> {
    let mut out = Vec::with_capacity(s.len());
    for unit in s.encode_utf16() {
        match unit {
            0x0001..=0x007F => out.push(unit as u8),
            0x0000 | 0x0080..=0x07FF => {
                out.push(0xC0 | (unit >> 6) as u8);
                out.push(0x80 | (unit & 0x3F) as u8);
            }
            _ => {
                out.push(0xE0 | (unit >> 12) as u8);
                out.push(0x80 | ((unit >> 6) & 0x3F) as u8);
                out.push(0x80 | (unit & 0x3F) as u8);
            }
        }
    }
    out
}
