//! The subcommands. Each returns the process exit status.

use std::io::Write;
use std::path::Path;

use jdebloat_core::fixtures::{f1_app, f1_lib};
use jdebloat_core::reach::diff_used_sets;
use jdebloat_core::refgraph::build_universe;

use crate::config::{ConfigError, RunConfig};
use crate::kb::SEEDED_KB;
use crate::pipeline::{
    debloat, parse_class_list, read_archives, read_knowledge_base, scan_universe, to_json,
    RunError, EXIT_DIFFERENT, EXIT_FINDINGS, EXIT_OK,
};
use crate::zip::write_archive;

pub const USED_CLASSES_FILE: &str = "used-classes.txt";
pub const DEBLOATED_JAR_FILE: &str = "debloated.jar";
pub const REPORT_FILE: &str = "report.json";
pub const VULN_REPORT_FILE: &str = "vuln-report.json";

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), RunError> {
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|source| RunError::Output { path, source })
}

fn create_dir(dir: &Path) -> Result<(), RunError> {
    std::fs::create_dir_all(dir).map_err(|source| RunError::Output {
        path: dir.into(),
        source,
    })
}

fn stdout_line(out: &mut impl Write, line: std::fmt::Arguments) {
    // A closed stdout is not worth failing the run over.
    let _ = writeln!(out, "{line}");
}

/// Writes `used-classes.txt`, `debloated.jar`, `report.json` and, with a
/// knowledge base, `vuln-report.json`, then prints one size line per
/// dependency.
pub fn cmd_debloat(config: &RunConfig, out: &mut impl Write) -> Result<u8, RunError> {
    let dir = config
        .output_dir
        .as_deref()
        .ok_or(ConfigError::Missing("output directory"))?;
    let result = debloat(config)?;
    create_dir(dir)?;
    write_file(dir, USED_CLASSES_FILE, result.used_classes.as_bytes())?;
    write_file(dir, DEBLOATED_JAR_FILE, &result.jar)?;
    write_file(dir, REPORT_FILE, to_json(&result.report).as_bytes())?;
    if let Some(vuln) = &result.vuln {
        write_file(dir, VULN_REPORT_FILE, to_json(vuln).as_bytes())?;
    }
    for row in &result.report.per_archive {
        stdout_line(
            out,
            format_args!(
                "{}: {} -> {} classes, {} -> {} bytes",
                row.label, row.classes_before, row.classes_after, row.bytes_before, row.bytes_after
            ),
        );
    }
    if let Some(vuln) = &result.vuln {
        stdout_line(
            out,
            format_args!(
                "vulnerable classes: {} removed, {} remaining",
                vuln.removed.len(),
                vuln.remaining.len()
            ),
        );
    }
    Ok(EXIT_OK)
}

/// Prints `- name` for classes only in the first list and `+ name` for
/// classes only in the second. Exit 3 when they differ.
pub fn cmd_compare(list_a: &Path, list_b: &Path, out: &mut impl Write) -> Result<u8, RunError> {
    let read = |p: &Path| {
        std::fs::read_to_string(p)
            .map_err(|source| RunError::Input {
                path: p.into(),
                source,
            })
            .and_then(|text| parse_class_list(p, &text))
    };
    let (a, b) = (read(list_a)?, read(list_b)?);
    let diff = diff_used_sets(&a, &b);
    for c in &diff.only_in_first {
        stdout_line(out, format_args!("- {}", c.to_dotted()));
    }
    for c in &diff.only_in_second {
        stdout_line(out, format_args!("+ {}", c.to_dotted()));
    }
    Ok(if diff.is_empty() {
        EXIT_OK
    } else {
        EXIT_DIFFERENT
    })
}

/// Writes the F1 corpus (`app.jar`, `lib.jar`) and the seeded `kb.json`.
pub fn cmd_fixtures(output_dir: &Path) -> Result<u8, RunError> {
    create_dir(output_dir)?;
    for archive in [f1_app(), f1_lib()] {
        let bytes = write_archive(archive.entries()).map_err(RunError::Emit)?;
        write_file(output_dir, &archive.label, &bytes)?;
    }
    write_file(output_dir, "kb.json", SEEDED_KB.as_bytes())?;
    Ok(EXIT_OK)
}

/// Prints one line per finding in the un-debloated universe.
pub fn cmd_scan(
    config: &RunConfig,
    fail_on_findings: bool,
    out: &mut impl Write,
) -> Result<u8, RunError> {
    let kb_path = config
        .kb_path
        .as_deref()
        .ok_or(ConfigError::Missing("knowledge base"))?;
    let kb = read_knowledge_base(kb_path)?;
    let archives = read_archives(config)?;
    let (app, deps) = archives
        .split_first()
        .expect("at least the application archive");
    let universe = build_universe(app, deps)?;
    let findings = scan_universe(&universe, &kb);
    for f in &findings {
        stdout_line(
            out,
            format_args!("{} {} ({})", f.cve_id, f.class.to_dotted(), f.archive),
        );
    }
    Ok(if fail_on_findings && !findings.is_empty() {
        EXIT_FINDINGS
    } else {
        EXIT_OK
    })
}
