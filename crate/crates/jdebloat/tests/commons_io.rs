//! The pipeline on a real library: commons-io 2.22.0. Expected closures were
//! computed by `tests/oracle/closure.py` from the same jar.

mod common;

use std::collections::BTreeMap;
use std::ffi::OsStr;

use common::{jdebloat, lines, write_jar};
use jdebloat::core::archive::Archive;
use jdebloat::core::classfile::{parse_class, FixtureClassSpec};
use jdebloat::core::fixtures::archive_from_specs;
use jdebloat::core::reach::{explain_reachability, EntryPointSpec};
use jdebloat::core::refgraph::{edge_has_provenance, AnalysisOptions, EdgeKind};
use jdebloat::core::ClassName;
use jdebloat::pipeline::analyze;
use jdebloat::zip::open_archive;
use tempfile::tempdir;

const JAR: &[u8] = include_bytes!("data/commons-io-2.22.0.jar");

fn commons_io() -> Archive {
    open_archive(JAR, "commons-io-2.22.0.jar").unwrap()
}

fn driver(target: &str) -> Archive {
    archive_from_specs(
        "driver.jar",
        &[FixtureClassSpec::new("com/example/Driver").references(target)],
        &[],
    )
}

#[test]
fn ioutils_closure_matches_oracle() {
    let expected = include_str!("data/commons-io-ioutils-closure.txt");
    let archives = [driver("org/apache/commons/io/IOUtils"), commons_io()];
    let a = analyze(
        &archives,
        &EntryPointSpec::default(),
        &AnalysisOptions::default(),
    )
    .unwrap();
    let ours: Vec<String> = a
        .result
        .used_dependency_classes()
        .map(ClassName::to_dotted)
        .collect();
    assert_eq!(ours, lines(expected));
}

#[test]
fn edges_and_traces_are_sound_on_real_bytecode() {
    let archives = [driver("org/apache/commons/io/IOUtils"), commons_io()];
    let a = analyze(
        &archives,
        &EntryPointSpec::default(),
        &AnalysisOptions::default(),
    )
    .unwrap();
    let lib = &archives[1];
    let parsed: BTreeMap<ClassName, _> = a
        .universe
        .classes_owned_by(&lib.label)
        .map(|c| (c.clone(), parse_class(lib.class_bytes(c).unwrap()).unwrap()))
        .collect();
    for e in a.graph.edges() {
        if let Some(cf) = parsed.get(&e.from) {
            assert!(edge_has_provenance(e, cf), "{e:?}");
        }
    }
    for class in &a.result.used {
        let chain = explain_reachability(&a.result, class).unwrap();
        assert_eq!(chain[0].class.as_str(), "com/example/Driver");
        for pair in chain.windows(2) {
            let kind = pair[1].via.unwrap();
            if kind == EdgeKind::PackageInfo {
                assert_eq!(pair[0].class.package(), pair[1].class.package());
            } else {
                assert!(a.graph.contains_edge(&pair[0].class, &pair[1].class, kind));
            }
        }
    }
    assert!(a
        .result
        .unresolved
        .iter()
        .any(|c| c.as_str() == "java/lang/Object"));
}

#[test]
fn options_only_grow_the_used_set() {
    let archives = [driver("org/apache/commons/io/IOUtils"), commons_io()];
    let used = |reflection, package_info| {
        let opts = AnalysisOptions {
            reflection_literals: reflection,
            spi_expansion: true,
            package_info_retention: package_info,
        };
        analyze(&archives, &EntryPointSpec::default(), &opts)
            .unwrap()
            .result
            .used
    };
    let all = used(true, true);
    for (r, p) in [(false, false), (false, true), (true, false)] {
        assert!(used(r, p).is_subset(&all));
    }
}

#[test]
fn debloating_commons_io_through_the_binary() {
    let dir = tempdir().unwrap();
    let app = write_jar(dir.path(), &driver("org/apache/commons/io/FilenameUtils"));
    let lib = dir.path().join("commons-io-2.22.0.jar");
    std::fs::write(&lib, JAR).unwrap();
    let out = dir.path().join("out");
    let run = jdebloat([
        OsStr::new("debloat"),
        "--app".as_ref(),
        app.as_os_str(),
        "--dep".as_ref(),
        lib.as_os_str(),
        "--out".as_ref(),
        out.as_os_str(),
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(
        run.stdout
            .starts_with("commons-io-2.22.0.jar: 428 -> 8 classes"),
        "{}",
        run.stdout
    );

    let debloated = open_archive(&std::fs::read(out.join("debloated.jar")).unwrap(), "d").unwrap();
    let source = commons_io();
    let classes: Vec<&String> = debloated
        .entries()
        .keys()
        .filter(|p| p.ends_with(".class"))
        .collect();
    assert_eq!(classes.len(), 9);
    for path in classes.iter().filter(|p| !p.starts_with("com/example/")) {
        assert_eq!(debloated.get(path), source.get(path), "{path}");
    }
    // Dependency resources, such as the license files, are not carried over.
    assert!(!debloated
        .entries()
        .keys()
        .any(|p| p.starts_with("META-INF/LICENSE")));
}
