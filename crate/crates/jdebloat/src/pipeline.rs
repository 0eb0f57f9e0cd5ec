//! The end-to-end pipeline over files: open archives, analyze, and produce
//! the debloating artifacts in memory.

use std::collections::BTreeSet;
use std::io;
use std::path::{Path, PathBuf};

use jdebloat_core::archive::{list_class_entries, Archive};
use jdebloat_core::debloat::{
    build_size_report, debloated_entries, emit_used_class_list, DebloatError, DebloatReport,
};
use jdebloat_core::reach::{
    compute_reachable, resolve_entry_points, EntryPointSpec, ReachError, ReachabilityResult,
    ResolvedEntryPoints,
};
use jdebloat_core::refgraph::{
    build_reference_graph, build_universe, parse_universe, AnalysisOptions, ClassUniverse,
    GraphError, ReferenceGraph, UniverseError,
};
use jdebloat_core::vuln::{
    scan_classes, vulnerability_delta, VulnDeltaReport, VulnFinding, VulnRecord,
};
use jdebloat_core::ClassName;
use serde::Serialize;

use crate::config::{ConfigError, RunConfig};
use crate::kb::{load_knowledge_base, MalformedKb};
use crate::zip::{open_archive, write_archive, ZipError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_DIFFERENT: u8 = 3;
pub const EXIT_FINDINGS: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read {path}")]
    Input {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{0} has no file name to label the archive with")]
    Label(PathBuf),
    #[error("archive {label}")]
    Zip {
        label: String,
        #[source]
        source: ZipError,
    },
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Reach(#[from] ReachError),
    #[error(transparent)]
    Debloat(#[from] DebloatError),
    #[error("knowledge base {path}")]
    Kb {
        path: PathBuf,
        #[source]
        source: MalformedKb,
    },
    #[error("{path} line {line}: `{text}` is not a class name")]
    ClassList {
        path: PathBuf,
        line: usize,
        text: String,
    },
    #[error("cannot write {path}")]
    Output {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot write debloated archive")]
    Emit(#[source] ZipError),
}

impl RunError {
    /// 2 for problems with what the user asked for, 1 for failures while
    /// doing it.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_)
            | RunError::Input { .. }
            | RunError::Label(_)
            | RunError::Kb { .. }
            | RunError::ClassList { .. }
            | RunError::Universe(UniverseError::DuplicateArchiveLabel(_))
            | RunError::Reach(ReachError::UnknownEntryClass(_) | ReachError::InvalidPattern(_)) => {
                EXIT_CONFIG
            }
            _ => EXIT_FAILURE,
        }
    }
}

/// Reads a zip file, labelling the archive with its file name.
pub fn read_archive(path: &Path) -> Result<Archive, RunError> {
    let label = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| RunError::Label(path.into()))?
        .to_string();
    let bytes = std::fs::read(path).map_err(|source| RunError::Input {
        path: path.into(),
        source,
    })?;
    open_archive(&bytes, &label).map_err(|source| RunError::Zip { label, source })
}

pub fn read_knowledge_base(path: &Path) -> Result<Vec<VulnRecord>, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Input {
        path: path.into(),
        source,
    })?;
    load_knowledge_base(&text).map_err(|source| RunError::Kb {
        path: path.into(),
        source,
    })
}

/// The application archive followed by the dependencies, in order.
pub fn read_archives(config: &RunConfig) -> Result<Vec<Archive>, RunError> {
    std::iter::once(&config.app_archive)
        .chain(&config.dependency_archives)
        .map(|p| read_archive(p))
        .collect()
}

pub struct Analysis {
    pub universe: ClassUniverse,
    pub graph: ReferenceGraph,
    pub entry_points: ResolvedEntryPoints,
    pub result: ReachabilityResult,
}

/// Runs the analysis over `archives`, the first being the application.
pub fn analyze(
    archives: &[Archive],
    entry: &EntryPointSpec,
    options: &AnalysisOptions,
) -> Result<Analysis, RunError> {
    let (app, deps) = archives
        .split_first()
        .expect("at least the application archive");
    let universe = build_universe(app, deps)?;
    for (class, shadowed) in universe.duplicates() {
        log::warn!(
            "{class} in {shadowed} is shadowed by {}",
            universe.owner_of(class).unwrap_or("?")
        );
    }
    let refs: Vec<&Archive> = archives.iter().collect();
    let classes = parse_universe(&universe, &refs)?;
    let graph = build_reference_graph(&universe, &classes, options)?;
    let entry_points = resolve_entry_points(&universe, entry)?;
    let result = compute_reachable(&graph, &universe, &entry_points.roots, options)?;
    Ok(Analysis {
        universe,
        graph,
        entry_points,
        result,
    })
}

/// Bytes of the debloated JAR.
pub fn emit_debloated_jar(
    u: &ClassUniverse,
    archives: &[&Archive],
    r: &ReachabilityResult,
) -> Result<Vec<u8>, RunError> {
    let entries = debloated_entries(u, archives, r)?;
    write_archive(&entries).map_err(RunError::Emit)
}

/// Every artifact of a debloating run, not yet written anywhere.
pub struct DebloatOutput {
    pub used_classes: String,
    pub jar: Vec<u8>,
    pub report: DebloatReport,
    pub vuln: Option<VulnDeltaReport>,
}

pub fn debloat(config: &RunConfig) -> Result<DebloatOutput, RunError> {
    let kb = config
        .kb_path
        .as_deref()
        .map(read_knowledge_base)
        .transpose()?;
    let archives = read_archives(config)?;
    let analysis = analyze(&archives, &config.entry_points, &config.options)?;
    let refs: Vec<&Archive> = archives.iter().collect();
    let (u, r) = (&analysis.universe, &analysis.result);

    let entries = debloated_entries(u, &refs, r)?;
    let jar = write_archive(&entries).map_err(RunError::Emit)?;
    let report = build_size_report(u, &refs, r, &config.options)?;
    let vuln = kb.map(|kb| -> Result<_, RunError> {
        let before = scan_universe(u, &kb);
        let shipped = Archive::new("debloated.jar", entries).map_err(DebloatError::from)?;
        let after = list_class_entries(&shipped).map_err(DebloatError::from)?;
        Ok(vulnerability_delta(&before, &after))
    });
    Ok(DebloatOutput {
        used_classes: emit_used_class_list(r),
        jar,
        report,
        vuln: vuln.transpose()?,
    })
}

/// Findings over every class of the un-debloated universe.
pub fn scan_universe(u: &ClassUniverse, kb: &[VulnRecord]) -> Vec<VulnFinding> {
    scan_classes(u.owner(), kb)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Parses a used-class list: one dotted class name per line.
pub fn parse_class_list(path: &Path, text: &str) -> Result<BTreeSet<ClassName>, RunError> {
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            ClassName::from_dotted(line).map_err(|_| RunError::ClassList {
                path: path.into(),
                line: i + 1,
                text: line.into(),
            })
        })
        .collect()
}
