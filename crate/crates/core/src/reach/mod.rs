//! Used-class fixed point over the reference graph.

mod glob;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

pub use glob::{ClassGlob, InvalidPattern};

use crate::name::ClassName;
use crate::refgraph::{AnalysisOptions, ClassUniverse, EdgeKind, ReferenceGraph};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReachError {
    #[error("entry class {0} is not in any archive")]
    UnknownEntryClass(ClassName),
    #[error(transparent)]
    InvalidPattern(#[from] InvalidPattern),
    #[error("root {0} is not in the class universe")]
    RootNotInUniverse(ClassName),
    #[error("class {0} is not used")]
    NotUsed(ClassName),
}

/// Which classes seed the analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryPointSpec {
    pub include_all_application: bool,
    /// Whether application test classes (Surefire naming) are roots too.
    pub include_tests: bool,
    pub explicit_classes: Vec<ClassName>,
    /// Globs over dotted names, see [`ClassGlob`].
    pub patterns: Vec<String>,
}

impl Default for EntryPointSpec {
    fn default() -> Self {
        EntryPointSpec {
            include_all_application: true,
            include_tests: false,
            explicit_classes: Vec::new(),
            patterns: Vec::new(),
        }
    }
}

/// Surefire's default test includes: `Test*`, `*Test`, `*Tests`, `*TestCase`.
/// Nested classes follow their outermost class.
pub fn is_test_class(class: &ClassName) -> bool {
    let simple = class.simple_name();
    let outer = simple.split('$').next().unwrap_or(simple);
    outer.starts_with("Test")
        || outer.ends_with("Test")
        || outer.ends_with("Tests")
        || outer.ends_with("TestCase")
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResolvedEntryPoints {
    pub roots: BTreeSet<ClassName>,
    /// Patterns that matched nothing; reported, not fatal.
    pub unmatched_patterns: Vec<String>,
}

pub fn resolve_entry_points(
    u: &ClassUniverse,
    spec: &EntryPointSpec,
) -> Result<ResolvedEntryPoints, ReachError> {
    let globs = spec
        .patterns
        .iter()
        .map(|p| ClassGlob::new(p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = ResolvedEntryPoints::default();
    if spec.include_all_application && !u.is_empty() {
        out.roots.extend(
            u.classes_owned_by(u.application_label())
                .filter(|c| spec.include_tests || !is_test_class(c))
                .cloned(),
        );
    }
    for class in &spec.explicit_classes {
        if !u.contains(class) {
            return Err(ReachError::UnknownEntryClass(class.clone()));
        }
        out.roots.insert(class.clone());
    }
    for glob in &globs {
        let mut matched = false;
        for class in u.owner().keys() {
            if glob.matches(&class.to_dotted()) {
                matched = true;
                out.roots.insert(class.clone());
            }
        }
        if !matched {
            log::warn!("entry pattern `{}` matched no class", glob.as_str());
            out.unmatched_patterns.push(glob.as_str().into());
        }
    }
    Ok(out)
}

/// The used-class fixed point with one witness predecessor per non-root.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReachabilityResult {
    pub application_label: String,
    pub roots: BTreeSet<ClassName>,
    pub used: BTreeSet<ClassName>,
    pub used_by_archive: BTreeMap<String, BTreeSet<ClassName>>,
    /// Out-of-universe names referenced by used classes.
    pub unresolved: BTreeSet<ClassName>,
    pub trace: BTreeMap<ClassName, (ClassName, EdgeKind)>,
}

impl ReachabilityResult {
    /// Used classes not owned by the application archive.
    pub fn used_dependency_classes(&self) -> impl Iterator<Item = &ClassName> {
        self.used_by_archive
            .iter()
            .filter(|(label, _)| **label != self.application_label)
            .flat_map(|(_, set)| set)
    }
}

/// Least set containing `roots` and closed under graph edges (service edges
/// only with SPI expansion on). Afterwards, with package-info retention on,
/// each `<pkg>/package-info` joins when another class of `<pkg>` is used.
///
/// The worklist is drained in class-name order, so traces are reproducible.
pub fn compute_reachable(
    g: &ReferenceGraph,
    u: &ClassUniverse,
    roots: &BTreeSet<ClassName>,
    opts: &AnalysisOptions,
) -> Result<ReachabilityResult, ReachError> {
    if let Some(missing) = roots.iter().find(|r| !u.contains(r)) {
        return Err(ReachError::RootNotInUniverse(missing.clone()));
    }
    let mut used = roots.clone();
    let mut trace = BTreeMap::new();
    let mut worklist = roots.clone();
    while let Some(class) = worklist.pop_first() {
        for (target, kind) in g.successors(&class) {
            let follow = match kind {
                EdgeKind::PackageInfo => false,
                EdgeKind::Service => opts.spi_expansion,
                _ => true,
            };
            if follow && u.contains(target) && used.insert(target.clone()) {
                trace.insert(target.clone(), (class.clone(), *kind));
                worklist.insert(target.clone());
            }
        }
    }

    if opts.package_info_retention {
        let mut witness: BTreeMap<&str, &ClassName> = BTreeMap::new();
        for class in used.iter().filter(|c| !c.is_package_info()) {
            witness.entry(class.package()).or_insert(class);
        }
        let added: Vec<(ClassName, ClassName)> = u
            .owner()
            .keys()
            .filter(|c| c.is_package_info() && !used.contains(*c))
            .filter_map(|c| witness.get(c.package()).map(|w| (c.clone(), (*w).clone())))
            .collect();
        for (info, pred) in added {
            used.insert(info.clone());
            trace.insert(info, (pred, EdgeKind::PackageInfo));
        }
    }

    let unresolved = used
        .iter()
        .flat_map(|c| g.unresolved_from(c))
        .cloned()
        .collect();
    let mut used_by_archive: BTreeMap<String, BTreeSet<ClassName>> = u
        .order()
        .iter()
        .map(|l| (l.clone(), BTreeSet::new()))
        .collect();
    for class in &used {
        if let Some(label) = u.owner_of(class) {
            used_by_archive
                .entry(label.into())
                .or_default()
                .insert(class.clone());
        }
    }
    Ok(ReachabilityResult {
        application_label: u.order().first().cloned().unwrap_or_default(),
        roots: roots.clone(),
        used,
        used_by_archive,
        unresolved,
        trace,
    })
}

/// One step of a witness chain. The root step has no edge kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessStep {
    pub class: ClassName,
    pub via: Option<EdgeKind>,
}

/// The chain root → … → `class` recorded in the trace.
pub fn explain_reachability(
    r: &ReachabilityResult,
    class: &ClassName,
) -> Result<Vec<WitnessStep>, ReachError> {
    if !r.used.contains(class) {
        return Err(ReachError::NotUsed(class.clone()));
    }
    let mut chain = Vec::new();
    let mut current = class.clone();
    while !r.roots.contains(&current) {
        let (pred, kind) = r
            .trace
            .get(&current)
            .ok_or_else(|| ReachError::NotUsed(current.clone()))?;
        chain.push(WitnessStep {
            class: current,
            via: Some(*kind),
        });
        if chain.len() > r.used.len() {
            // A cyclic trace cannot come from compute_reachable.
            return Err(ReachError::NotUsed(class.clone()));
        }
        current = pred.clone();
    }
    chain.push(WitnessStep {
        class: current,
        via: None,
    });
    chain.reverse();
    Ok(chain)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UsedSetDiff {
    pub only_in_first: BTreeSet<ClassName>,
    pub only_in_second: BTreeSet<ClassName>,
}

impl UsedSetDiff {
    pub fn is_empty(&self) -> bool {
        self.only_in_first.is_empty() && self.only_in_second.is_empty()
    }
}

pub fn diff_used_sets(a: &BTreeSet<ClassName>, b: &BTreeSet<ClassName>) -> UsedSetDiff {
    UsedSetDiff {
        only_in_first: a.difference(b).cloned().collect(),
        only_in_second: b.difference(a).cloned().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::archive::Archive;
    use crate::refgraph::{build_universe, Edge};

    fn name(s: &str) -> ClassName {
        ClassName::from_internal(s).unwrap()
    }

    fn set(names: &[&str]) -> BTreeSet<ClassName> {
        names.iter().map(|n| name(n)).collect()
    }

    fn universe(app: &[&str], lib: &[&str]) -> ClassUniverse {
        let mk = |label: &str, classes: &[&str]| {
            Archive::from_entries(
                label,
                classes
                    .iter()
                    .map(|c| (alloc::format!("{c}.class"), Vec::new())),
            )
            .unwrap()
        };
        build_universe(&mk("app", app), &[mk("lib", lib)]).unwrap()
    }

    fn edge(from: &str, to: &str, kind: EdgeKind) -> Edge {
        Edge {
            from: name(from),
            to: name(to),
            kind,
        }
    }

    #[test]
    fn isolated_root() {
        let u = universe(&["X"], &[]);
        let g = ReferenceGraph::from_edges(set(&["X"]), []).unwrap();
        let r = compute_reachable(&g, &u, &set(&["X"]), &AnalysisOptions::NONE).unwrap();
        assert_eq!(r.used, set(&["X"]));
        assert!(r.trace.is_empty());
    }

    #[test]
    fn empty_universe_is_empty_result() {
        let u = universe(&[], &[]);
        let g = ReferenceGraph::default();
        let r = compute_reachable(&g, &u, &BTreeSet::new(), &AnalysisOptions::default()).unwrap();
        assert!(r.used.is_empty());
        let roots = resolve_entry_points(&u, &EntryPointSpec::default()).unwrap();
        assert!(roots.roots.is_empty());
    }

    #[test]
    fn root_outside_universe() {
        let u = universe(&["X"], &[]);
        let g = ReferenceGraph::default();
        assert_eq!(
            compute_reachable(&g, &u, &set(&["Y"]), &AnalysisOptions::NONE),
            Err(ReachError::RootNotInUniverse(name("Y")))
        );
    }

    #[test]
    fn service_edges_gated_by_option() {
        let u = universe(&["app/Main"], &["lib/Spi", "lib/Impl"]);
        let g = ReferenceGraph::from_edges(
            u.owner().keys().cloned().collect(),
            [
                edge("app/Main", "lib/Spi", EdgeKind::ConstantPool),
                edge("lib/Spi", "lib/Impl", EdgeKind::Service),
            ],
        )
        .unwrap();
        let roots = set(&["app/Main"]);
        let off = compute_reachable(&g, &u, &roots, &AnalysisOptions::NONE).unwrap();
        assert_eq!(off.used, set(&["app/Main", "lib/Spi"]));
        let on = AnalysisOptions {
            spi_expansion: true,
            ..AnalysisOptions::NONE
        };
        let r = compute_reachable(&g, &u, &roots, &on).unwrap();
        assert_eq!(r.used, set(&["app/Main", "lib/Spi", "lib/Impl"]));
        assert_eq!(
            r.trace[&name("lib/Impl")],
            (name("lib/Spi"), EdgeKind::Service)
        );
        let chain = explain_reachability(&r, &name("lib/Impl")).unwrap();
        let classes: Vec<&str> = chain.iter().map(|s| s.class.as_str()).collect();
        assert_eq!(classes, ["app/Main", "lib/Spi", "lib/Impl"]);
        assert_eq!(chain[0].via, None);
    }

    #[test]
    fn package_info_needs_a_used_sibling() {
        let u = universe(
            &["app/Main"],
            &[
                "lib/A",
                "lib/package-info",
                "other/package-info",
                "lib/sub/B",
            ],
        );
        let g = ReferenceGraph::from_edges(
            u.owner().keys().cloned().collect(),
            [edge("app/Main", "lib/sub/B", EdgeKind::ConstantPool)],
        )
        .unwrap();
        let opts = AnalysisOptions::default();
        let r = compute_reachable(&g, &u, &set(&["app/Main"]), &opts).unwrap();
        // lib/sub/B lives in lib/sub, not lib
        assert_eq!(r.used, set(&["app/Main", "lib/sub/B"]));

        let g = ReferenceGraph::from_edges(
            u.owner().keys().cloned().collect(),
            [edge("app/Main", "lib/A", EdgeKind::ConstantPool)],
        )
        .unwrap();
        let r = compute_reachable(&g, &u, &set(&["app/Main"]), &opts).unwrap();
        assert_eq!(r.used, set(&["app/Main", "lib/A", "lib/package-info"]));
        assert_eq!(
            r.trace[&name("lib/package-info")],
            (name("lib/A"), EdgeKind::PackageInfo)
        );
    }

    #[test]
    fn explain_root_and_unused() {
        let u = universe(&["X"], &["C"]);
        let g = ReferenceGraph::from_edges(set(&["X", "C"]), []).unwrap();
        let r = compute_reachable(&g, &u, &set(&["X"]), &AnalysisOptions::NONE).unwrap();
        assert_eq!(
            explain_reachability(&r, &name("X")).unwrap(),
            [WitnessStep {
                class: name("X"),
                via: None
            }]
        );
        assert_eq!(
            explain_reachability(&r, &name("C")),
            Err(ReachError::NotUsed(name("C")))
        );
    }

    #[test]
    fn entry_point_resolution() {
        let u = universe(
            &["com/app/Main", "com/app/MainTest"],
            &["org/lib/SpiImpl", "org/lib/A"],
        );
        let mut spec = EntryPointSpec::default();
        assert_eq!(
            resolve_entry_points(&u, &spec).unwrap().roots,
            set(&["com/app/Main"])
        );
        spec.include_tests = true;
        assert_eq!(
            resolve_entry_points(&u, &spec).unwrap().roots,
            set(&["com/app/Main", "com/app/MainTest"])
        );
        spec.include_tests = false;
        spec.explicit_classes.push(name("org/lib/SpiImpl"));
        assert_eq!(
            resolve_entry_points(&u, &spec).unwrap().roots,
            set(&["com/app/Main", "org/lib/SpiImpl"])
        );
        spec.explicit_classes.push(name("org/none/X"));
        assert_eq!(
            resolve_entry_points(&u, &spec),
            Err(ReachError::UnknownEntryClass(name("org/none/X")))
        );
    }

    #[test]
    fn patterns_and_unmatched_warning() {
        let u = universe(
            &["com/app/Main"],
            &["org/lib/A", "org/lib/B", "org/lib/sub/C"],
        );
        let spec = EntryPointSpec {
            include_all_application: false,
            patterns: alloc::vec!["org.lib.*".into(), "net.**".into()],
            ..EntryPointSpec::default()
        };
        let resolved = resolve_entry_points(&u, &spec).unwrap();
        assert_eq!(resolved.roots, set(&["org/lib/A", "org/lib/B"]));
        assert_eq!(resolved.unmatched_patterns, ["net.**"]);
        let bad = EntryPointSpec {
            patterns: alloc::vec!["org/lib".into()],
            ..EntryPointSpec::default()
        };
        assert!(matches!(
            resolve_entry_points(&u, &bad),
            Err(ReachError::InvalidPattern(_))
        ));
    }

    #[test]
    fn test_class_naming() {
        for t in [
            "a/TestFoo",
            "a/FooTest",
            "a/FooTests",
            "a/FooTestCase",
            "a/FooTest$1",
        ] {
            assert!(is_test_class(&name(t)), "{t}");
        }
        for t in ["a/Main", "a/Contest1", "a/Attestation"] {
            assert!(!is_test_class(&name(t)), "{t}");
        }
    }

    #[test]
    fn diffs() {
        let d = diff_used_sets(&set(&["A", "B"]), &set(&["A", "B"]));
        assert!(d.is_empty());
        let d = diff_used_sets(&set(&["A", "B"]), &set(&["A", "B", "lib/package-info"]));
        assert!(d.only_in_first.is_empty());
        assert_eq!(d.only_in_second, set(&["lib/package-info"]));
        let d = diff_used_sets(&set(&["A"]), &set(&["B"]));
        assert_eq!(d.only_in_first, set(&["A"]));
        assert_eq!(d.only_in_second, set(&["B"]));
    }
}
