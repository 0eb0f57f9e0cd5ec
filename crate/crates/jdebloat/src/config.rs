//! Run configuration from an optional JSON file plus command-line overrides.
//!
//! The file mirrors [`RunConfig`]; every field is optional and relative paths
//! are resolved against the file's directory:
//!
//! ```json
//! {
//!   "app_archive": "app.jar",
//!   "dependency_archives": ["lib.jar"],
//!   "entry_points": { "include_all_application": true, "include_tests": false,
//!                     "explicit_classes": ["org.lib.SpiImpl"], "patterns": ["org.lib.**"] },
//!   "options": { "reflection_literals": true, "spi_expansion": true, "package_info_retention": true },
//!   "kb_path": "kb.json",
//!   "output_dir": "out"
//! }
//! ```

use std::path::{Path, PathBuf};

use jdebloat_core::reach::EntryPointSpec;
use jdebloat_core::refgraph::AnalysisOptions;
use jdebloat_core::ClassName;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config file {path}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid entry class `{0}`")]
    EntryClass(String),
    #[error("no {0} given")]
    Missing(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub app_archive: PathBuf,
    /// Earlier archives win when two define the same class.
    pub dependency_archives: Vec<PathBuf>,
    pub entry_points: EntryPointSpec,
    pub options: AnalysisOptions,
    pub kb_path: Option<PathBuf>,
    /// Required by `debloat` only.
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub app_archive: Option<PathBuf>,
    pub dependency_archives: Option<Vec<PathBuf>>,
    #[serde(default)]
    pub entry_points: EntryPointsFile,
    #[serde(default)]
    pub options: OptionsFile,
    pub kb_path: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryPointsFile {
    pub include_all_application: Option<bool>,
    pub include_tests: Option<bool>,
    pub explicit_classes: Option<Vec<String>>,
    pub patterns: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsFile {
    pub reflection_literals: Option<bool>,
    pub spi_expansion: Option<bool>,
    pub package_info_retention: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.into(),
            source,
        })?;
        let mut file: ConfigFile =
            serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
                path: path.into(),
                source,
            })?;
        if let Some(base) = path.parent() {
            file.rebase(base);
        }
        Ok(file)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.app_archive.iter_mut().for_each(fix);
        self.dependency_archives.iter_mut().flatten().for_each(fix);
        self.kb_path.iter_mut().for_each(fix);
        self.output_dir.iter_mut().for_each(fix);
    }
}

/// Settings given on the command line. `None` and empty lists defer to the
/// config file; a nonempty list replaces the file's list.
#[derive(Debug, Default, Clone)]
pub struct ConfigOverrides {
    pub app_archive: Option<PathBuf>,
    pub dependency_archives: Vec<PathBuf>,
    pub explicit_classes: Vec<String>,
    pub patterns: Vec<String>,
    pub include_all_application: Option<bool>,
    pub include_tests: Option<bool>,
    pub reflection_literals: Option<bool>,
    pub spi_expansion: Option<bool>,
    pub package_info_retention: Option<bool>,
    pub kb_path: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

fn pick_list<T>(flag: Vec<T>, file: Option<Vec<T>>) -> Vec<T> {
    if flag.is_empty() {
        file.unwrap_or_default()
    } else {
        flag
    }
}

impl RunConfig {
    pub fn resolve(file: ConfigFile, flags: ConfigOverrides) -> Result<Self, ConfigError> {
        let defaults = EntryPointSpec::default();
        let explicit_classes =
            pick_list(flags.explicit_classes, file.entry_points.explicit_classes)
                .iter()
                .map(|name| {
                    ClassName::from_dotted(name).map_err(|_| ConfigError::EntryClass(name.clone()))
                })
                .collect::<Result<_, _>>()?;
        let entry_points = EntryPointSpec {
            include_all_application: flags
                .include_all_application
                .or(file.entry_points.include_all_application)
                .unwrap_or(defaults.include_all_application),
            include_tests: flags
                .include_tests
                .or(file.entry_points.include_tests)
                .unwrap_or(defaults.include_tests),
            explicit_classes,
            patterns: pick_list(flags.patterns, file.entry_points.patterns),
        };
        let base = AnalysisOptions::default();
        let options = AnalysisOptions {
            reflection_literals: flags
                .reflection_literals
                .or(file.options.reflection_literals)
                .unwrap_or(base.reflection_literals),
            spi_expansion: flags
                .spi_expansion
                .or(file.options.spi_expansion)
                .unwrap_or(base.spi_expansion),
            package_info_retention: flags
                .package_info_retention
                .or(file.options.package_info_retention)
                .unwrap_or(base.package_info_retention),
        };
        Ok(RunConfig {
            app_archive: flags
                .app_archive
                .or(file.app_archive)
                .ok_or(ConfigError::Missing("application archive"))?,
            dependency_archives: pick_list(flags.dependency_archives, file.dependency_archives),
            entry_points,
            options,
            kb_path: flags.kb_path.or(file.kb_path),
            output_dir: flags.output_dir.or(file.output_dir),
        })
    }
}
