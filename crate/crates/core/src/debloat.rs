//! Used-class lists, debloated archive contents and size reports.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::archive::{
    list_class_entries, render_service_file, Archive, ArchiveError, SERVICES_DIR,
};
use crate::name::ClassName;
use crate::reach::ReachabilityResult;
use crate::refgraph::{AnalysisOptions, ClassUniverse};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DebloatError {
    #[error("no bytes for used class {0}")]
    MissingClassBytes(ClassName),
    #[error("archive `{0}` was not supplied")]
    MissingArchive(String),
    #[error(transparent)]
    Archive(#[from] ArchiveError),
}

/// Used dependency classes, one dotted name per line, sorted.
pub fn emit_used_class_list(r: &ReachabilityResult) -> String {
    let names: BTreeSet<String> = r
        .used_dependency_classes()
        .map(ClassName::to_dotted)
        .collect();
    let mut out = String::new();
    for name in names {
        out.push_str(&name);
        out.push('\n');
    }
    out
}

/// JAR signature metadata, invalidated by any change to the archive.
pub fn is_signature_file(path: &str) -> bool {
    let Some(file) = path.strip_prefix("META-INF/") else {
        return false;
    };
    if file.contains('/') {
        return false;
    }
    let upper = file.to_ascii_uppercase();
    [".SF", ".RSA", ".DSA", ".EC"]
        .iter()
        .any(|ext| upper.ends_with(ext))
        || upper.starts_with("SIG-")
}

fn find<'a>(archives: &[&'a Archive], label: &str) -> Result<&'a Archive, DebloatError> {
    archives
        .iter()
        .copied()
        .find(|a| a.label == label)
        .ok_or_else(|| DebloatError::MissingArchive(label.into()))
}

/// Entries of the debloated archive: every application entry except
/// signature files, each used dependency class with its original bytes,
/// and service files listing only retained providers.
pub fn debloated_entries(
    u: &ClassUniverse,
    archives: &[&Archive],
    r: &ReachabilityResult,
) -> Result<BTreeMap<String, Vec<u8>>, DebloatError> {
    let app = find(archives, u.application_label())?;
    let mut out: BTreeMap<String, Vec<u8>> = app
        .entries()
        .iter()
        .filter(|(path, _)| !is_signature_file(path) && !path.starts_with(SERVICES_DIR))
        .map(|(p, b)| (p.clone(), b.clone()))
        .collect();

    for class in r.used_dependency_classes() {
        let label = u
            .owner_of(class)
            .ok_or_else(|| DebloatError::MissingClassBytes(class.clone()))?;
        let bytes = find(archives, label)?
            .class_bytes(class)
            .ok_or_else(|| DebloatError::MissingClassBytes(class.clone()))?;
        out.insert(class.entry_path(), bytes.to_vec());
    }

    let retained = |c: &ClassName| u.is_application_class(c) || r.used.contains(c);
    let mut services: BTreeMap<&ClassName, Vec<ClassName>> = BTreeMap::new();
    for decl in u.services() {
        let providers = services.entry(&decl.service).or_default();
        for p in decl.providers.iter().filter(|p| retained(p)) {
            if !providers.contains(p) {
                providers.push(p.clone());
            }
        }
    }
    for (service, providers) in services {
        if !providers.is_empty() {
            let path = alloc::format!("{SERVICES_DIR}{}", service.to_dotted());
            out.insert(path, render_service_file(&providers));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SizeRow {
    pub label: String,
    pub classes_before: u64,
    pub classes_after: u64,
    pub bytes_before: u64,
    pub bytes_after: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SizeTotals {
    pub classes_before: u64,
    pub classes_after: u64,
    pub bytes_before: u64,
    pub bytes_after: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DebloatReport {
    pub per_archive: Vec<SizeRow>,
    pub totals: SizeTotals,
    pub options_used: AnalysisOptions,
    pub roots_count: u64,
}

/// Class counts and class-payload byte sizes per dependency archive,
/// before and after debloating. The application archive has no row.
pub fn build_size_report(
    u: &ClassUniverse,
    archives: &[&Archive],
    r: &ReachabilityResult,
    options: &AnalysisOptions,
) -> Result<DebloatReport, DebloatError> {
    let mut per_archive = Vec::new();
    let mut totals = SizeTotals::default();
    for label in u.order().iter().skip(1) {
        let archive = find(archives, label)?;
        let mut row = SizeRow {
            label: label.clone(),
            ..SizeRow::default()
        };
        let empty = BTreeSet::new();
        let used = r.used_by_archive.get(label).unwrap_or(&empty);
        for class in list_class_entries(archive)? {
            let size = archive.class_bytes(&class).map_or(0, |b| b.len() as u64);
            row.classes_before += 1;
            row.bytes_before += size;
            if used.contains(&class) {
                row.classes_after += 1;
                row.bytes_after += size;
            }
        }
        totals.classes_before += row.classes_before;
        totals.classes_after += row.classes_after;
        totals.bytes_before += row.bytes_before;
        totals.bytes_after += row.bytes_after;
        per_archive.push(row);
    }
    Ok(DebloatReport {
        per_archive,
        totals,
        options_used: *options,
        roots_count: r.roots.len() as u64,
    })
}
