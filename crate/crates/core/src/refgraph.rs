//! The closed class universe and the provenance-tagged reference graph.

use alloc::collections::btree_map::Entry;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::archive::{
    list_class_entries, service_declarations, Archive, ArchiveError, ServiceDeclaration,
};
use crate::classfile::{
    descriptor_class_refs, hierarchy_class_refs, parse_class, pool_class_refs,
    referenced_class_names, string_literals, ClassFile, ClassFileError,
};
use crate::name::ClassName;

/// Toggles for the analysis behaviors that go beyond plain bytecode
/// references. All default to on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct AnalysisOptions {
    /// String literals naming a universe class count as references.
    pub reflection_literals: bool,
    /// SPI providers become reachable with their service interface.
    pub spi_expansion: bool,
    /// Keep `package-info` when another class of its package is kept.
    pub package_info_retention: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            reflection_literals: true,
            spi_expansion: true,
            package_info_retention: true,
        }
    }
}

impl AnalysisOptions {
    pub const NONE: AnalysisOptions = AnalysisOptions {
        reflection_literals: false,
        spi_expansion: false,
        package_info_retention: false,
    };
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UniverseError {
    #[error("archive label `{0}` given more than once")]
    DuplicateArchiveLabel(String),
    #[error("archive `{label}`")]
    Archive { label: String, source: ArchiveError },
}

/// Every class of the application and its dependencies, each owned by
/// exactly one archive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassUniverse {
    owner: BTreeMap<ClassName, String>,
    order: Vec<String>,
    duplicates: Vec<(ClassName, String)>,
    services: Vec<ServiceDeclaration>,
}

impl ClassUniverse {
    pub fn owner(&self) -> &BTreeMap<ClassName, String> {
        &self.owner
    }

    pub fn owner_of(&self, class: &ClassName) -> Option<&str> {
        self.owner.get(class).map(String::as_str)
    }

    pub fn contains(&self, class: &ClassName) -> bool {
        self.owner.contains_key(class)
    }

    /// Archive labels, application first.
    pub fn order(&self) -> &[String] {
        &self.order
    }

    pub fn application_label(&self) -> &str {
        &self.order[0]
    }

    pub fn is_application_class(&self, class: &ClassName) -> bool {
        self.owner_of(class) == Some(self.application_label())
    }

    /// Classes present in a later archive but owned by an earlier one.
    pub fn duplicates(&self) -> &[(ClassName, String)] {
        &self.duplicates
    }

    pub fn services(&self) -> &[ServiceDeclaration] {
        &self.services
    }

    pub fn classes_owned_by<'a>(
        &'a self,
        label: &'a str,
    ) -> impl Iterator<Item = &'a ClassName> + 'a {
        self.owner
            .iter()
            .filter(move |(_, l)| l.as_str() == label)
            .map(|(c, _)| c)
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }
}

/// Builds the universe with first-archive-wins ownership, application first.
pub fn build_universe(app: &Archive, deps: &[Archive]) -> Result<ClassUniverse, UniverseError> {
    let mut order: Vec<String> = Vec::with_capacity(deps.len() + 1);
    let mut owner = BTreeMap::new();
    let mut duplicates = Vec::new();
    let mut services = Vec::new();
    for archive in core::iter::once(app).chain(deps) {
        if order.contains(&archive.label) {
            return Err(UniverseError::DuplicateArchiveLabel(archive.label.clone()));
        }
        order.push(archive.label.clone());
        let wrap = |source| UniverseError::Archive {
            label: archive.label.clone(),
            source,
        };
        for class in list_class_entries(archive).map_err(wrap)? {
            match owner.entry(class) {
                Entry::Occupied(e) => duplicates.push((e.key().clone(), archive.label.clone())),
                Entry::Vacant(e) => {
                    e.insert(archive.label.clone());
                }
            }
        }
        services.extend(service_declarations(archive).map_err(wrap)?);
    }
    Ok(ClassUniverse {
        owner,
        order,
        duplicates,
        services,
    })
}

/// How a reference between two classes was discovered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EdgeKind {
    ConstantPool,
    Descriptor,
    Hierarchy,
    StringLiteral,
    Service,
    PackageInfo,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: ClassName,
    pub to: ClassName,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("class {class}")]
    Parse {
        class: ClassName,
        source: ClassFileError,
    },
    #[error("no class data for {0}")]
    MissingClassData(ClassName),
    #[error("entry {entry} declares class {declared}")]
    NameMismatch {
        entry: ClassName,
        declared: ClassName,
    },
    #[error("edge endpoint {0} is not a graph node")]
    UnknownNode(ClassName),
    #[error("self-loop on {0}")]
    SelfLoop(ClassName),
}

/// Directed class-to-class references within the universe. References to
/// classes outside the universe are kept per source in `unresolved`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReferenceGraph {
    nodes: BTreeSet<ClassName>,
    edges: BTreeSet<Edge>,
    successors: BTreeMap<ClassName, BTreeSet<(ClassName, EdgeKind)>>,
    unresolved: BTreeMap<ClassName, BTreeSet<ClassName>>,
}

impl ReferenceGraph {
    /// Assembles a graph from explicit edges, checking endpoints and loops.
    pub fn from_edges(
        nodes: BTreeSet<ClassName>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, GraphError> {
        let mut g = ReferenceGraph {
            nodes,
            ..ReferenceGraph::default()
        };
        for edge in edges {
            for end in [&edge.from, &edge.to] {
                if !g.nodes.contains(end) {
                    return Err(GraphError::UnknownNode(end.clone()));
                }
            }
            if edge.from == edge.to {
                return Err(GraphError::SelfLoop(edge.from));
            }
            g.insert(edge);
        }
        Ok(g)
    }

    fn insert(&mut self, edge: Edge) {
        self.successors
            .entry(edge.from.clone())
            .or_default()
            .insert((edge.to.clone(), edge.kind));
        self.edges.insert(edge);
    }

    fn add(&mut self, from: &ClassName, to: &ClassName, kind: EdgeKind) {
        if from != to {
            self.insert(Edge {
                from: from.clone(),
                to: to.clone(),
                kind,
            });
        }
    }

    pub fn nodes(&self) -> &BTreeSet<ClassName> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn contains_edge(&self, from: &ClassName, to: &ClassName, kind: EdgeKind) -> bool {
        self.successors
            .get(from)
            .is_some_and(|s| s.contains(&(to.clone(), kind)))
    }

    /// Outgoing `(target, kind)` pairs of `class`, sorted.
    pub fn successors(&self, class: &ClassName) -> impl Iterator<Item = &(ClassName, EdgeKind)> {
        self.successors.get(class).into_iter().flatten()
    }

    /// References from `class` to names outside the universe.
    pub fn unresolved_from(&self, class: &ClassName) -> impl Iterator<Item = &ClassName> {
        self.unresolved.get(class).into_iter().flatten()
    }

    pub fn unresolved(&self) -> BTreeSet<&ClassName> {
        self.unresolved.values().flatten().collect()
    }
}

/// Parses the owning archive's bytes for every universe class.
pub fn parse_universe(
    u: &ClassUniverse,
    archives: &[&Archive],
) -> Result<BTreeMap<ClassName, ClassFile>, GraphError> {
    let mut out = BTreeMap::new();
    for (class, label) in u.owner() {
        let bytes = archives
            .iter()
            .find(|a| &a.label == label)
            .and_then(|a| a.class_bytes(class))
            .ok_or_else(|| GraphError::MissingClassData(class.clone()))?;
        let cf = parse_class(bytes).map_err(|source| GraphError::Parse {
            class: class.clone(),
            source,
        })?;
        if &cf.this_class != class {
            return Err(GraphError::NameMismatch {
                entry: class.clone(),
                declared: cf.this_class,
            });
        }
        out.insert(class.clone(), cf);
    }
    Ok(out)
}

fn literal_target(literal: &str) -> Option<ClassName> {
    ClassName::from_dotted(literal)
        .or_else(|_| ClassName::from_internal(literal))
        .ok()
}

/// Builds the reference graph over `u` from the parsed classes.
///
/// Service edges run from the service interface to each provider. When the
/// interface itself is outside the universe (a platform API), they run
/// instead from every universe class that references the interface.
pub fn build_reference_graph(
    u: &ClassUniverse,
    classes: &BTreeMap<ClassName, ClassFile>,
    opts: &AnalysisOptions,
) -> Result<ReferenceGraph, GraphError> {
    let mut g = ReferenceGraph {
        nodes: u.owner().keys().cloned().collect(),
        ..ReferenceGraph::default()
    };
    let mut external_refs: BTreeMap<ClassName, BTreeSet<ClassName>> = BTreeMap::new();

    for class in u.owner().keys() {
        let cf = classes
            .get(class)
            .ok_or_else(|| GraphError::MissingClassData(class.clone()))?;
        if cf.is_module() {
            continue;
        }
        let sources = [
            (pool_class_refs(cf), EdgeKind::ConstantPool),
            (descriptor_class_refs(cf), EdgeKind::Descriptor),
            (hierarchy_class_refs(cf), EdgeKind::Hierarchy),
        ];
        for (targets, kind) in sources {
            for target in targets {
                if u.contains(&target) {
                    g.add(class, &target, kind);
                } else {
                    external_refs
                        .entry(target.clone())
                        .or_default()
                        .insert(class.clone());
                    g.unresolved
                        .entry(class.clone())
                        .or_default()
                        .insert(target);
                }
            }
        }
        if opts.reflection_literals {
            for literal in string_literals(cf) {
                if let Some(target) = literal_target(&literal).filter(|t| u.contains(t)) {
                    g.add(class, &target, EdgeKind::StringLiteral);
                }
            }
        }
    }

    if opts.spi_expansion {
        for decl in u.services() {
            let sources: Vec<ClassName> = if u.contains(&decl.service) {
                Vec::from([decl.service.clone()])
            } else {
                external_refs
                    .get(&decl.service)
                    .map(|s| s.iter().cloned().collect())
                    .unwrap_or_default()
            };
            for provider in decl.providers.iter().filter(|p| u.contains(p)) {
                for source in &sources {
                    g.add(source, provider, EdgeKind::Service);
                }
            }
        }
    }
    Ok(g)
}

/// Brute-force check of edge provenance: every non-service edge target is
/// among the source's referenced classes or (as a class name) its literals.
pub fn edge_has_provenance(edge: &Edge, source: &ClassFile) -> bool {
    match edge.kind {
        EdgeKind::Service | EdgeKind::PackageInfo => true,
        EdgeKind::StringLiteral => string_literals(source)
            .iter()
            .any(|l| literal_target(l).as_ref() == Some(&edge.to)),
        _ => referenced_class_names(source).contains(&edge.to),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classfile::{synthesize_class, FixtureClassSpec};
    use alloc::vec;

    fn name(s: &str) -> ClassName {
        ClassName::from_internal(s).unwrap()
    }

    fn archive(label: &str, specs: &[FixtureClassSpec], extra: &[(&str, &str)]) -> Archive {
        let mut entries: Vec<(String, Vec<u8>)> = specs
            .iter()
            .map(|s| {
                (
                    alloc::format!("{}.class", s.name),
                    synthesize_class(s).unwrap(),
                )
            })
            .collect();
        entries.extend(
            extra
                .iter()
                .map(|(p, b)| (String::from(*p), b.as_bytes().to_vec())),
        );
        Archive::from_entries(label, entries).unwrap()
    }

    fn graph(
        app: &Archive,
        deps: &[Archive],
        opts: AnalysisOptions,
    ) -> (ClassUniverse, ReferenceGraph) {
        let u = build_universe(app, deps).unwrap();
        let all: Vec<&Archive> = core::iter::once(app).chain(deps).collect();
        let classes = parse_universe(&u, &all).unwrap();
        let g = build_reference_graph(&u, &classes, &opts).unwrap();
        (u, g)
    }

    #[test]
    fn disjoint_universe() {
        let app = archive("app", &[FixtureClassSpec::new("com/app/Main")], &[]);
        let lib = archive("lib", &[FixtureClassSpec::new("org/lib/A")], &[]);
        let u = build_universe(&app, &[lib]).unwrap();
        assert_eq!(u.owner_of(&name("com/app/Main")), Some("app"));
        assert_eq!(u.owner_of(&name("org/lib/A")), Some("lib"));
        assert!(u.duplicates().is_empty());
    }

    #[test]
    fn first_archive_wins() {
        let app = archive("app", &[], &[]);
        let d1 = archive("dep1", &[FixtureClassSpec::new("org/lib/A")], &[]);
        let d2 = archive("dep2", &[FixtureClassSpec::new("org/lib/A")], &[]);
        let u = build_universe(&app, &[d1, d2]).unwrap();
        assert_eq!(u.owner_of(&name("org/lib/A")), Some("dep1"));
        assert_eq!(u.duplicates(), &[(name("org/lib/A"), String::from("dep2"))]);
    }

    #[test]
    fn duplicate_label_rejected() {
        let app = archive("x", &[], &[]);
        let dep = archive("x", &[], &[]);
        assert_eq!(
            build_universe(&app, &[dep]),
            Err(UniverseError::DuplicateArchiveLabel("x".into()))
        );
    }

    #[test]
    fn literal_edge_follows_flag() {
        let app = archive(
            "app",
            &[FixtureClassSpec::new("com/app/R").literal("org.lib.A")],
            &[],
        );
        let lib = archive("lib", &[FixtureClassSpec::new("org/lib/A")], &[]);
        let (_, off) = graph(&app, core::slice::from_ref(&lib), AnalysisOptions::NONE);
        assert!(off.edges().is_empty());
        let (_, on) = graph(&app, &[lib], AnalysisOptions::default());
        assert!(on.contains_edge(
            &name("com/app/R"),
            &name("org/lib/A"),
            EdgeKind::StringLiteral
        ));
        assert_eq!(on.edges().len(), 1);
    }

    #[test]
    fn internal_form_literal_also_matches() {
        let app = archive(
            "app",
            &[FixtureClassSpec::new("com/app/R").literal("org/lib/A")],
            &[],
        );
        let lib = archive("lib", &[FixtureClassSpec::new("org/lib/A")], &[]);
        let (_, g) = graph(&app, &[lib], AnalysisOptions::default());
        assert!(g.contains_edge(
            &name("com/app/R"),
            &name("org/lib/A"),
            EdgeKind::StringLiteral
        ));
    }

    #[test]
    fn package_prefix_literal_is_not_a_reference() {
        let app = archive(
            "app",
            &[FixtureClassSpec::new("com/app/R").literal("org.lib.")],
            &[],
        );
        let lib = archive("lib", &[FixtureClassSpec::new("org/lib/A")], &[]);
        let (_, g) = graph(&app, &[lib], AnalysisOptions::default());
        assert!(g.edges().is_empty());
    }

    #[test]
    fn platform_references_are_unresolved() {
        let app = archive(
            "app",
            &[FixtureClassSpec::new("com/app/Main").references("java/util/List")],
            &[],
        );
        let (_, g) = graph(&app, &[], AnalysisOptions::default());
        let unresolved: Vec<&str> = g.unresolved().into_iter().map(|c| c.as_str()).collect();
        assert_eq!(unresolved, ["java/lang/Object", "java/util/List"]);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn service_edges_from_interface() {
        let app = archive(
            "app",
            &[FixtureClassSpec::new("com/app/Main").references("org/lib/Spi")],
            &[],
        );
        let lib = archive(
            "lib",
            &[
                FixtureClassSpec::new("org/lib/Spi"),
                FixtureClassSpec::new("org/lib/SpiImpl").implements("org/lib/Spi"),
            ],
            &[(
                "META-INF/services/org.lib.Spi",
                "org.lib.SpiImpl\norg.lib.Missing\n",
            )],
        );
        let (_, g) = graph(
            &app,
            core::slice::from_ref(&lib),
            AnalysisOptions::default(),
        );
        assert!(g.contains_edge(
            &name("org/lib/Spi"),
            &name("org/lib/SpiImpl"),
            EdgeKind::Service
        ));
        assert!(g.contains_edge(
            &name("org/lib/SpiImpl"),
            &name("org/lib/Spi"),
            EdgeKind::Hierarchy
        ));
        assert!(g.contains_edge(
            &name("org/lib/SpiImpl"),
            &name("org/lib/Spi"),
            EdgeKind::ConstantPool
        ));
        let no_spi = AnalysisOptions {
            spi_expansion: false,
            ..AnalysisOptions::default()
        };
        let (_, g) = graph(&app, &[lib], no_spi);
        assert!(g.edges().iter().all(|e| e.kind != EdgeKind::Service));
    }

    #[test]
    fn external_service_edges_from_referencing_classes() {
        let app = archive(
            "app",
            &[FixtureClassSpec::new("com/app/Main").references("javax/xml/bind/JAXBContext")],
            &[],
        );
        let lib = archive(
            "moxy",
            &[FixtureClassSpec::new("org/moxy/Factory")],
            &[(
                "META-INF/services/javax.xml.bind.JAXBContext",
                "org.moxy.Factory\n",
            )],
        );
        let (_, g) = graph(&app, &[lib], AnalysisOptions::default());
        let edges: Vec<_> = g.edges().iter().cloned().collect();
        assert_eq!(
            edges,
            vec![Edge {
                from: name("com/app/Main"),
                to: name("org/moxy/Factory"),
                kind: EdgeKind::Service
            }]
        );
    }

    #[test]
    fn from_edges_validates() {
        let nodes: BTreeSet<_> = [name("a/A"), name("a/B")].into_iter().collect();
        let self_loop = Edge {
            from: name("a/A"),
            to: name("a/A"),
            kind: EdgeKind::ConstantPool,
        };
        assert_eq!(
            ReferenceGraph::from_edges(nodes.clone(), [self_loop]),
            Err(GraphError::SelfLoop(name("a/A")))
        );
        let outside = Edge {
            from: name("a/A"),
            to: name("z/Z"),
            kind: EdgeKind::ConstantPool,
        };
        assert_eq!(
            ReferenceGraph::from_edges(nodes, [outside]),
            Err(GraphError::UnknownNode(name("z/Z")))
        );
    }

    #[test]
    fn name_mismatch_detected() {
        let bytes = synthesize_class(&FixtureClassSpec::new("org/lib/B")).unwrap();
        let app = Archive::from_entries("app", [(String::from("org/lib/A.class"), bytes)]).unwrap();
        let u = build_universe(&app, &[]).unwrap();
        assert!(matches!(
            parse_universe(&u, &[&app]),
            Err(GraphError::NameMismatch { .. })
        ));
    }

    #[test]
    fn parse_errors_carry_class_name() {
        let app = Archive::from_entries("app", [(String::from("org/lib/A.class"), vec![1, 2, 3])])
            .unwrap();
        let u = build_universe(&app, &[]).unwrap();
        match parse_universe(&u, &[&app]) {
            Err(GraphError::Parse { class, .. }) => assert_eq!(class, name("org/lib/A")),
            other => panic!("{other:?}"),
        }
    }
}
