//! Known-vulnerable class detection by fully qualified name.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::name::ClassName;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvalidRecord {
    #[error("empty CVE identifier")]
    EmptyCveId,
    #[error("record {0} names no classes")]
    NoClasses(String),
}

/// Classes touched by the fix of one vulnerability.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VulnRecord {
    pub cve_id: String,
    pub classes: Vec<ClassName>,
    pub fix_ref: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VulnRecord {
    pub fn new(
        cve_id: impl Into<String>,
        classes: Vec<ClassName>,
        fix_ref: impl Into<String>,
        note: Option<String>,
    ) -> Result<Self, InvalidRecord> {
        let cve_id = cve_id.into();
        if cve_id.trim().is_empty() {
            return Err(InvalidRecord::EmptyCveId);
        }
        if classes.is_empty() {
            return Err(InvalidRecord::NoClasses(cve_id));
        }
        Ok(VulnRecord {
            cve_id,
            classes,
            fix_ref: fix_ref.into(),
            note,
        })
    }
}

/// A vulnerable class present in a shipped archive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct VulnFinding {
    pub cve_id: String,
    pub class: ClassName,
    pub archive: String,
    pub present_before: bool,
    /// Unknown until a delta has been computed.
    pub present_after: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VulnDeltaReport {
    pub removed: Vec<VulnFinding>,
    pub remaining: Vec<VulnFinding>,
}

/// One finding per (record, class) pair whose class is present, sorted by
/// CVE id then class.
pub fn scan_classes(classes: &BTreeMap<ClassName, String>, kb: &[VulnRecord]) -> Vec<VulnFinding> {
    let mut findings = BTreeSet::new();
    for record in kb {
        for class in &record.classes {
            if let Some(archive) = classes.get(class) {
                findings.insert(VulnFinding {
                    cve_id: record.cve_id.clone(),
                    class: class.clone(),
                    archive: archive.clone(),
                    present_before: true,
                    present_after: None,
                });
            }
        }
    }
    findings.into_iter().collect()
}

/// Splits pre-debloat findings by whether their class survived.
pub fn vulnerability_delta(
    before: &[VulnFinding],
    after_classes: &BTreeSet<ClassName>,
) -> VulnDeltaReport {
    let mut report = VulnDeltaReport::default();
    for finding in before {
        let present = after_classes.contains(&finding.class);
        let f = VulnFinding {
            present_after: Some(present),
            ..finding.clone()
        };
        if present {
            report.remaining.push(f);
        } else {
            report.removed.push(f);
        }
    }
    report
}
