//! In-memory archive model: class entries, resources and SPI declarations.
//!
//! Reading and writing the zip container lives in the `jdebloat` crate; this
//! module only sees `(path, bytes)` entries.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::name::ClassName;

pub const SERVICES_DIR: &str = "META-INF/services/";
pub const VERSIONS_DIR: &str = "META-INF/versions/";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArchiveError {
    #[error("invalid entry path `{0}`")]
    InvalidEntryPath(String),
    #[error("duplicate entry path `{0}`")]
    DuplicateEntryPath(String),
    #[error("`{0}` is not a valid class entry path")]
    InvalidClassPath(String),
    #[error("invalid service file `{path}` line {line}: `{text}`")]
    InvalidServiceFile {
        path: String,
        line: usize,
        text: String,
    },
}

/// Checks the archive path rules: nonempty, `/`-separated, relative, no
/// empty, `.` or `..` segments.
pub fn validate_entry_path(path: &str) -> Result<(), ArchiveError> {
    let bad = path.is_empty()
        || path.contains('\\')
        || path.contains('\0')
        || path
            .split('/')
            .any(|seg| seg.is_empty() || seg == "." || seg == "..");
    if bad {
        Err(ArchiveError::InvalidEntryPath(path.into()))
    } else {
        Ok(())
    }
}

/// A JAR's file entries (directories excluded), keyed by path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Archive {
    pub label: String,
    entries: BTreeMap<String, Vec<u8>>,
}

impl Archive {
    pub fn new(
        label: impl Into<String>,
        entries: BTreeMap<String, Vec<u8>>,
    ) -> Result<Self, ArchiveError> {
        for path in entries.keys() {
            validate_entry_path(path)?;
        }
        Ok(Archive {
            label: label.into(),
            entries,
        })
    }

    /// Builds an archive from entries in arbitrary order, rejecting repeats.
    pub fn from_entries<I>(label: impl Into<String>, entries: I) -> Result<Self, ArchiveError>
    where
        I: IntoIterator<Item = (String, Vec<u8>)>,
    {
        let mut map = BTreeMap::new();
        for (path, bytes) in entries {
            validate_entry_path(&path)?;
            if map.contains_key(&path) {
                return Err(ArchiveError::DuplicateEntryPath(path));
            }
            map.insert(path, bytes);
        }
        Ok(Archive {
            label: label.into(),
            entries: map,
        })
    }

    pub fn entries(&self) -> &BTreeMap<String, Vec<u8>> {
        &self.entries
    }

    pub fn into_entries(self) -> BTreeMap<String, Vec<u8>> {
        self.entries
    }

    pub fn get(&self, path: &str) -> Option<&[u8]> {
        self.entries.get(path).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Bytes of a class entry, if present.
    pub fn class_bytes(&self, class: &ClassName) -> Option<&[u8]> {
        self.get(&class.entry_path())
    }
}

fn is_analyzed_class_path(path: &str) -> bool {
    path.ends_with(".class")
        && !path.starts_with(VERSIONS_DIR)
        && path.rsplit('/').next() != Some("module-info.class")
}

/// Classes stored in `a`. Multi-release entries under `META-INF/versions/`
/// and `module-info.class` are not part of the analyzed class set.
pub fn list_class_entries(a: &Archive) -> Result<BTreeSet<ClassName>, ArchiveError> {
    a.entries
        .keys()
        .filter(|p| is_analyzed_class_path(p))
        .map(|p| {
            ClassName::from_internal(&p[..p.len() - ".class".len()])
                .map_err(|_| ArchiveError::InvalidClassPath(p.clone()))
        })
        .collect()
}

/// One `META-INF/services/<service>` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceDeclaration {
    pub service: ClassName,
    /// Nonempty, no repeats, in file order.
    pub providers: Vec<ClassName>,
    pub origin: String,
}

/// Parses every SPI configuration file of `a`, ordered by entry path.
/// Files that declare no provider yield no declaration.
pub fn service_declarations(a: &Archive) -> Result<Vec<ServiceDeclaration>, ArchiveError> {
    let mut out = Vec::new();
    for (path, body) in &a.entries {
        let Some(service) = path.strip_prefix(SERVICES_DIR) else {
            continue;
        };
        if service.contains('/') {
            continue;
        }
        let invalid = |line: usize, text: &str| ArchiveError::InvalidServiceFile {
            path: path.clone(),
            line,
            text: text.into(),
        };
        let service = ClassName::from_dotted(service).map_err(|_| invalid(0, service))?;
        let text = core::str::from_utf8(body).map_err(|_| invalid(0, "<not UTF-8>"))?;
        let mut providers: Vec<ClassName> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let provider = ClassName::from_dotted(content).map_err(|_| invalid(n + 1, content))?;
            if !providers.contains(&provider) {
                providers.push(provider);
            }
        }
        if !providers.is_empty() {
            out.push(ServiceDeclaration {
                service,
                providers,
                origin: a.label.clone(),
            });
        }
    }
    Ok(out)
}

/// Renders a services file body listing `providers` in dotted form.
pub fn render_service_file(providers: &[ClassName]) -> Vec<u8> {
    let mut out = String::new();
    for p in providers {
        out.push_str(&p.to_dotted());
        out.push('\n');
    }
    out.into_bytes()
}
