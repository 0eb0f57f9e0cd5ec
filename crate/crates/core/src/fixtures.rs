//! Synthetic archives used by tests and the `fixtures` command.
//!
//! Corpus F1 models a service consumer that references only the service
//! interface while the implementation is declared in a services file:
//!
//! ```text
//! app.jar  com/app/Main        -> org/lib/A, org/lib/Spi
//! lib.jar  org/lib/Spi         (interface)
//!          org/lib/SpiImpl     implements Spi, -> org/lib/D
//!          org/lib/A           -> org/lib/B
//!          org/lib/B, org/lib/C (unreferenced), org/lib/D
//!          org/lib/package-info
//!          META-INF/services/org.lib.Spi = org.lib.SpiImpl
//! ```

use alloc::string::String;
use alloc::vec::Vec;

use crate::archive::Archive;
use crate::classfile::{
    synthesize_class, FixtureClassSpec, ACC_ABSTRACT, ACC_INTERFACE, ACC_PUBLIC, ACC_SYNTHETIC,
};

pub const F1_APP_LABEL: &str = "app.jar";
pub const F1_LIB_LABEL: &str = "lib.jar";

const MANIFEST: &str = "Manifest-Version: 1.0\r\nCreated-By: jdebloat fixtures\r\n\r\n";

/// Builds an archive from class specs plus text resources.
///
/// Panics if a spec is invalid; fixture specs are constants.
pub fn archive_from_specs(
    label: &str,
    classes: &[FixtureClassSpec],
    resources: &[(&str, &str)],
) -> Archive {
    let mut entries: Vec<(String, Vec<u8>)> = classes
        .iter()
        .map(|spec| {
            let bytes = synthesize_class(spec).expect("fixture spec is valid");
            (alloc::format!("{}.class", spec.name), bytes)
        })
        .collect();
    entries.extend(
        resources
            .iter()
            .map(|(path, body)| (String::from(*path), body.as_bytes().to_vec())),
    );
    Archive::from_entries(label, entries).expect("fixture entries are valid")
}

fn interface(name: &str) -> FixtureClassSpec {
    FixtureClassSpec::new(name).access(ACC_PUBLIC | ACC_INTERFACE | ACC_ABSTRACT)
}

pub fn f1_app() -> Archive {
    archive_from_specs(
        F1_APP_LABEL,
        &[FixtureClassSpec::new("com/app/Main")
            .references("org/lib/A")
            .references("org/lib/Spi")],
        &[("META-INF/MANIFEST.MF", MANIFEST)],
    )
}

pub fn f1_lib() -> Archive {
    archive_from_specs(
        F1_LIB_LABEL,
        &[
            interface("org/lib/Spi"),
            FixtureClassSpec::new("org/lib/SpiImpl")
                .implements("org/lib/Spi")
                .references("org/lib/D"),
            FixtureClassSpec::new("org/lib/A").references("org/lib/B"),
            FixtureClassSpec::new("org/lib/B"),
            FixtureClassSpec::new("org/lib/C"),
            FixtureClassSpec::new("org/lib/D"),
            interface("org/lib/package-info").access(ACC_INTERFACE | ACC_ABSTRACT | ACC_SYNTHETIC),
        ],
        &[
            ("META-INF/MANIFEST.MF", MANIFEST),
            ("META-INF/services/org.lib.Spi", "org.lib.SpiImpl\n"),
        ],
    )
}

/// An application whose only mention of `org/lib/A` is the literal
/// `"org.lib.A"`, as in `Class.forName("org.lib.A")`.
pub fn reflection_app() -> Archive {
    archive_from_specs(
        "reflect-app.jar",
        &[FixtureClassSpec::new("com/app/Reflective").literal("org.lib.A")],
        &[],
    )
}

/// A commons-io lookalike holding `FilenameUtils`, and an application that
/// uses only `IOUtils`.
pub fn vulnerable_dependency() -> (Archive, Archive) {
    let app = archive_from_specs(
        "vuln-app.jar",
        &[FixtureClassSpec::new("com/app/Copier").references("org/apache/commons/io/IOUtils")],
        &[],
    );
    let lib = archive_from_specs(
        "commons-io-fixture.jar",
        &[
            FixtureClassSpec::new("org/apache/commons/io/IOUtils"),
            FixtureClassSpec::new("org/apache/commons/io/FilenameUtils")
                .references("org/apache/commons/io/IOUtils"),
        ],
        &[],
    );
    (app, lib)
}
