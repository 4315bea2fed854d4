//! Inter-module dependency graph: construction, main-module identification,
//! and reachability with a deterministic topological order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::keywords::{DependencyClass, KeywordTable};
use crate::model::{Diagnostic, DiagnosticCode, ModuleId};
use crate::script::{DeclarationRecord, Payload};

/// One project-to-project dependency, keeping the declaring keyword so the
/// packaging predicate can be evaluated per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleEdge {
    pub from: ModuleId,
    pub to: ModuleId,
    pub keyword: String,
}

#[derive(Debug, Clone, Default)]
pub struct ModuleGraph {
    pub nodes: BTreeSet<ModuleId>,
    pub edges: Vec<ModuleEdge>,
    pub main: Option<ModuleId>,
    /// Modules left out of the reachable set, with the reason: the keyword of
    /// the excluding edge (e.g. `wearApp`) or `unreachable`.
    pub excluded: BTreeMap<ModuleId, String>,
}

/// Builds the graph from module-reference declarations. References to
/// unknown modules produce diagnostics, never edges.
pub fn build_graph(
    nodes: &BTreeSet<ModuleId>,
    declarations: &[DeclarationRecord],
) -> (ModuleGraph, Vec<Diagnostic>) {
    let mut graph = ModuleGraph {
        nodes: nodes.clone(),
        ..ModuleGraph::default()
    };
    let mut diagnostics = Vec::new();

    for record in declarations {
        let mut refs = Vec::new();
        collect_module_refs(&record.payload, &mut refs);
        for target in refs {
            let resolved = if graph.nodes.contains(&target) {
                Some(target.clone())
            } else {
                // Type-safe accessors camel-case the real path; fold back.
                let kebab = ModuleId::new(&kebab_case_path(target.as_str()));
                graph.nodes.contains(&kebab).then_some(kebab)
            };
            match resolved {
                Some(to) => graph.edges.push(ModuleEdge {
                    from: record.origin_module.clone(),
                    to,
                    keyword: record.keyword.clone(),
                }),
                None => diagnostics.push(
                    Diagnostic::warning(
                        DiagnosticCode::DanglingModuleRef,
                        format!(
                            "module '{}' references '{}', which is not declared in settings",
                            record.origin_module, target
                        ),
                    )
                    .at(record.location.clone()),
                ),
            }
        }
    }

    (graph, diagnostics)
}

fn collect_module_refs(payload: &Payload, refs: &mut Vec<ModuleId>) {
    match payload {
        Payload::ModuleRef(id) => refs.push(id.clone()),
        Payload::PlatformBom(inner) => collect_module_refs(inner, refs),
        Payload::Multi(parts) => parts.iter().for_each(|p| collect_module_refs(p, refs)),
        _ => {}
    }
}

/// `:colorPickerLib` → `:color-picker-lib`, per path segment.
fn kebab_case_path(path: &str) -> String {
    let mut out = String::with_capacity(path.len() + 4);
    for c in path.chars() {
        if c.is_ascii_uppercase() {
            out.push('-');
            out.push(c.to_ascii_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

/// Plugin ids that mark a module as an APK-producing application.
pub const APPLICATION_PLUGIN_IDS: [&str; 2] = ["com.android.application", "android"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MainModuleError {
    #[error("several modules apply an application plugin: {}; pass an explicit main module", .0.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(", "))]
    Multiple(Vec<ModuleId>),
    #[error("no module applies an application plugin and no module is named ':app'")]
    NoneFound,
    #[error("requested main module '{0}' is not a module of this project")]
    UnknownOverride(ModuleId),
}

/// Picks the main application module: the unique module applying an
/// application plugin, an explicit override, or a module named `:app`.
pub fn identify_main(
    nodes: &BTreeSet<ModuleId>,
    plugin_ids: &BTreeMap<ModuleId, Vec<String>>,
    requested: Option<&ModuleId>,
) -> Result<ModuleId, MainModuleError> {
    if let Some(wanted) = requested {
        return if nodes.contains(wanted) {
            Ok(wanted.clone())
        } else {
            Err(MainModuleError::UnknownOverride(wanted.clone()))
        };
    }

    let candidates: Vec<ModuleId> = nodes
        .iter()
        .filter(|m| {
            plugin_ids
                .get(*m)
                .is_some_and(|ids| ids.iter().any(|id| APPLICATION_PLUGIN_IDS.contains(&id.as_str())))
        })
        .cloned()
        .collect();

    match candidates.len() {
        1 => Ok(candidates.into_iter().next().unwrap()),
        0 => {
            let app = ModuleId::new(":app");
            if nodes.contains(&app) {
                Ok(app)
            } else {
                Err(MainModuleError::NoneFound)
            }
        }
        _ => Err(MainModuleError::Multiple(candidates)),
    }
}

pub struct ReachabilityInput<'a> {
    pub graph: &'a ModuleGraph,
    pub main: &'a ModuleId,
    pub keywords: &'a KeywordTable,
    pub known_variants: &'a BTreeSet<String>,
    pub selected_variants: &'a BTreeSet<String>,
    /// Edge keywords excluded from packaging even when include-classified.
    pub phi_exclusions: &'a BTreeSet<String>,
}

#[derive(Debug, Default)]
pub struct Reachability {
    /// Reachable modules, dependencies before dependents, ties lexicographic.
    pub order: Vec<ModuleId>,
    pub excluded: BTreeMap<ModuleId, String>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Walks kept edges from the main module, then orders the result
/// topologically. Cycles are broken deterministically and flagged.
pub fn reachable_modules(input: &ReachabilityInput<'_>) -> Reachability {
    let mut result = Reachability::default();
    let kept: Vec<&ModuleEdge> = input
        .graph
        .edges
        .iter()
        .filter(|e| edge_kept(input, &e.keyword))
        .collect();

    let mut reachable: BTreeSet<ModuleId> = BTreeSet::new();
    let mut queue = VecDeque::from([input.main.clone()]);
    while let Some(module) = queue.pop_front() {
        if !reachable.insert(module.clone()) {
            continue;
        }
        for edge in kept.iter().filter(|e| e.from == module) {
            if !reachable.contains(&edge.to) {
                queue.push_back(edge.to.clone());
            }
        }
    }

    for module in input.graph.nodes.difference(&reachable) {
        let reason = input
            .graph
            .edges
            .iter()
            .filter(|e| e.to == *module && reachable.contains(&e.from))
            .map(|e| e.keyword.clone())
            .min()
            .unwrap_or_else(|| "unreachable".to_string());
        result.excluded.insert(module.clone(), reason);
    }

    // Dependencies-first emission; the smallest ready module goes next.
    let dependencies: BTreeMap<&ModuleId, BTreeSet<&ModuleId>> = reachable
        .iter()
        .map(|m| {
            let deps: BTreeSet<&ModuleId> = kept
                .iter()
                .filter(|e| e.from == *m && reachable.contains(&e.to) && e.to != *m)
                .map(|e| &e.to)
                .collect();
            (m, deps)
        })
        .collect();

    let mut emitted: BTreeSet<&ModuleId> = BTreeSet::new();
    let mut cycle_reported = false;
    while emitted.len() < reachable.len() {
        let ready = reachable
            .iter()
            .find(|m| !emitted.contains(*m) && dependencies[*m].iter().all(|d| emitted.contains(*d)));
        let next = match ready {
            Some(m) => m,
            None => {
                let forced = reachable.iter().find(|m| !emitted.contains(*m)).unwrap();
                if !cycle_reported {
                    result.diagnostics.push(Diagnostic::warning(
                        DiagnosticCode::Cycle,
                        format!(
                            "module dependencies form a cycle; ordering forced at '{forced}'"
                        ),
                    ));
                    cycle_reported = true;
                }
                forced
            }
        };
        emitted.insert(next);
        result.order.push(next.clone());
    }

    result
}

fn edge_kept(input: &ReachabilityInput<'_>, keyword: &str) -> bool {
    if input.phi_exclusions.contains(keyword) {
        return false;
    }
    let class = input.keywords.classify(keyword, input.known_variants);
    match class.class {
        DependencyClass::Include => true,
        DependencyClass::Variant => class
            .variant_prefix
            .as_deref()
            .is_some_and(|p| input.selected_variants.contains(p)),
        DependencyClass::Exclude => false,
    }
}
