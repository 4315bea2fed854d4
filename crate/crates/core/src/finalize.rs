//! End-to-end extraction: wires discovery, parsing, environment layering,
//! graph reachability and normalization into one report, then deduplicates,
//! recovers versions from IDE metadata and settles version conflicts.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

use crate::discovery::{
    discover_project, mark_referenced_artifacts, relative_path, DiscoveryError, LocalArtifact,
};
use crate::graph::{
    build_graph, identify_main, reachable_modules, MainModuleError, ReachabilityInput,
    APPLICATION_PLUGIN_IDS,
};
use crate::keywords::{DependencyClass, KeywordTable};
use crate::model::{
    compare_versions, Coordinate, CoordinateStatus, Diagnostic, DiagnosticCode, ModuleId,
};
use crate::resolve::{
    compose_environment, normalize, ExcludedItem, LabelEntry, NormalizeInput, VariableEnvironment,
};
use crate::script::{
    extract_bindings, extract_declarations, extract_plugins, extract_variant_names,
    parse_catalog, parse_properties, BindingScope, CatalogModel, DeclarationRecord, Dialect,
    Payload, PluginRef, RawBinding, VariantNames,
};

// ─── Options and errors ─────────────────────────────────────────────────────

/// Knobs for one extraction run.
#[derive(Debug, Clone)]
pub struct ExtractOptions {
    /// Flavor prefixes to select. `None` keeps the release build plus every
    /// declared flavor; an explicit set keeps exactly those plus `release`.
    pub variants: Option<BTreeSet<String>>,
    /// Main-module override; skips application-plugin detection.
    pub main_module: Option<ModuleId>,
    pub keyword_table: KeywordTable,
    /// Edge keywords whose targets never reach the APK, like `wearApp`.
    pub phi_exclusions: BTreeSet<String>,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            variants: None,
            main_module: None,
            keyword_table: KeywordTable::default(),
            phi_exclusions: ["wearApp".to_string()].into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("no Gradle settings or build file found at or above {}", .0.display())]
    NotAGradleProject(PathBuf),
    #[error("several modules apply an application plugin: {}; pass an explicit main module", .candidates.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(", "))]
    MultipleApkModules { candidates: Vec<ModuleId> },
    #[error("requested main module '{0}' is not a module of this project")]
    UnknownModule(ModuleId),
    #[error("no module applies an application plugin and no module is named ':app'")]
    NoApplicationModule,
    #[error("failed reading {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ExtractError {
    /// Stable machine-readable tag for structured error output.
    pub fn code(&self) -> &'static str {
        match self {
            ExtractError::NotAGradleProject(_) => "NOT_A_GRADLE_PROJECT",
            ExtractError::MultipleApkModules { .. } => "MULTI_APK",
            ExtractError::UnknownModule(_) => "UNKNOWN_MODULE",
            ExtractError::NoApplicationModule => "NO_APPLICATION_MODULE",
            ExtractError::Io { .. } => "IO",
        }
    }

    /// Process exit code: 1 for structured analysis failures, 2 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExtractError::Io { .. } => 2,
            _ => 1,
        }
    }
}

impl From<DiscoveryError> for ExtractError {
    fn from(err: DiscoveryError) -> Self {
        match err {
            DiscoveryError::NotAGradleProject(p) => ExtractError::NotAGradleProject(p),
            DiscoveryError::Io { path, source } => ExtractError::Io { path, source },
        }
    }
}

// ─── Report ─────────────────────────────────────────────────────────────────

/// Everything one extraction produced, serializable as the JSON report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub project: String,
    pub main_module: ModuleId,
    /// Modules contributing dependencies, dependencies before dependents.
    pub module_order: Vec<ModuleId>,
    pub dependencies: Vec<LabelEntry>,
    pub excluded: Vec<ExcludedItem>,
    pub local_artifacts: Vec<LocalArtifact>,
    pub diagnostics: Vec<Diagnostic>,
    pub tool_version: String,
}

impl ExtractionReport {
    /// The label set as canonical `group:artifact:version` strings.
    pub fn label_set(&self) -> BTreeSet<String> {
        self.dependencies.iter().map(|e| e.coordinate.text()).collect()
    }

    /// Plain-text rendering: one sorted coordinate per line, with a status
    /// suffix on every entry whose version is not a plain resolved string.
    pub fn lines(&self) -> String {
        let mut rows: Vec<String> = self
            .dependencies
            .iter()
            .map(|e| {
                let c = &e.coordinate;
                match c.status {
                    CoordinateStatus::Resolved => c.text(),
                    other => format!("{}:{}", c.text(), status_tag(other)),
                }
            })
            .collect();
        rows.sort();
        let mut out = rows.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }
}

fn status_tag(status: CoordinateStatus) -> &'static str {
    match status {
        CoordinateStatus::Resolved => "RESOLVED",
        CoordinateStatus::Ambiguous => "AMBIGUOUS",
        CoordinateStatus::Unresolved => "UNRESOLVED",
        CoordinateStatus::BomDerived => "BOM_DERIVED",
        CoordinateStatus::ImlRecovered => "IML_RECOVERED",
    }
}

// ─── Pipeline ───────────────────────────────────────────────────────────────

/// Runs the whole pipeline against a project directory.
pub fn extract_project(
    start_dir: &Path,
    options: &ExtractOptions,
) -> Result<ExtractionReport, ExtractError> {
    let (layout, mut diagnostics) = discover_project(start_dir)?;
    let root = layout.root_dir.clone();

    // Merged version catalog; later files override earlier ones.
    let mut catalog = CatalogModel::default();
    for path in &layout.catalog_files {
        if let Some(text) = read_text(&root, path, &mut diagnostics) {
            let (model, diags) = parse_catalog(&text, &relative_path(&root, path));
            diagnostics.extend(diags);
            catalog.merge(model);
        }
    }

    // Project-scope bindings: property files, then root build scripts, then
    // shared scripts nothing applied at module level.
    let mut project_bindings: Vec<RawBinding> = Vec::new();
    for path in &layout.property_files {
        if let Some(text) = read_text(&root, path, &mut diagnostics) {
            project_bindings.extend(parse_properties(
                &text,
                &BindingScope::Project,
                &relative_path(&root, path),
            ));
        }
    }
    for path in &layout.root_build_files {
        if let Some(text) = read_text(&root, path, &mut diagnostics) {
            project_bindings.extend(extract_bindings(
                &text,
                Dialect::of_path(path),
                &BindingScope::Project,
                &relative_path(&root, path),
            ));
        }
    }
    for script in layout.custom_scripts.iter().filter(|s| s.applied_by.is_empty()) {
        if let Some(text) = read_text(&root, &script.path, &mut diagnostics) {
            project_bindings.extend(extract_bindings(
                &text,
                Dialect::of_path(&script.path),
                &BindingScope::Project,
                &relative_path(&root, &script.path),
            ));
        }
    }

    // Per-module parsing: bindings, declarations, plugins, variant names.
    let mut module_bindings: BTreeMap<ModuleId, Vec<RawBinding>> = BTreeMap::new();
    let mut decl_by_module: BTreeMap<ModuleId, Vec<DeclarationRecord>> = BTreeMap::new();
    let mut plugin_ids: BTreeMap<ModuleId, Vec<String>> = BTreeMap::new();
    let mut variant_names = VariantNames::default();

    for module in &layout.modules {
        let scope = BindingScope::Module(module.id.clone());
        let mut sources: Vec<PathBuf> = module.build_files.clone();
        sources.extend(
            layout
                .custom_scripts
                .iter()
                .filter(|s| s.applied_by.contains(&module.id))
                .map(|s| s.path.clone()),
        );
        for path in sources {
            let Some(text) = read_text(&root, &path, &mut diagnostics) else {
                continue;
            };
            let rel = relative_path(&root, &path);
            let dialect = Dialect::of_path(&path);
            module_bindings
                .entry(module.id.clone())
                .or_default()
                .extend(extract_bindings(&text, dialect, &scope, &rel));
            let (declarations, diags) = extract_declarations(&text, dialect, &module.id, &rel);
            decl_by_module.entry(module.id.clone()).or_default().extend(declarations);
            diagnostics.extend(diags);
            let ids = plugin_ids.entry(module.id.clone()).or_default();
            for (plugin, _) in extract_plugins(&text, &rel) {
                match plugin {
                    PluginRef::Id(id) => ids.push(id),
                    PluginRef::Alias(alias) => {
                        if let Some(id) = catalog.plugin_id(&alias) {
                            ids.push(id.to_string());
                        }
                    }
                }
            }
            variant_names.merge(extract_variant_names(&text));
        }
    }

    // Variant selection: the release build type plus either every declared
    // flavor or the explicitly requested ones.
    let known_variants = variant_names.all();
    let mut selected_variants = options
        .variants
        .clone()
        .unwrap_or_else(|| variant_names.flavors.clone());
    selected_variants.insert("release".to_string());

    // Environments: project-layer duplicates reported once, module-layer
    // duplicates per module.
    let (_, project_layer_diags) = compose_environment(&project_bindings, &[]);
    let project_dup_count = project_layer_diags.len();
    diagnostics.extend(project_layer_diags);
    let empty_bindings = Vec::new();
    let mut environments: BTreeMap<ModuleId, VariableEnvironment> = BTreeMap::new();
    for module in &layout.modules {
        let own = module_bindings.get(&module.id).unwrap_or(&empty_bindings);
        let (env, mut diags) = compose_environment(&project_bindings, own);
        diagnostics.extend(diags.drain(project_dup_count..));
        environments.insert(module.id.clone(), env);
    }

    // Graph, main module, reachability.
    let nodes: BTreeSet<ModuleId> = layout.modules.iter().map(|m| m.id.clone()).collect();
    let all_declarations: Vec<DeclarationRecord> =
        decl_by_module.values().flatten().cloned().collect();
    let (graph, graph_diags) = build_graph(&nodes, &all_declarations);
    diagnostics.extend(graph_diags);

    let main = identify_main(&nodes, &plugin_ids, options.main_module.as_ref()).map_err(
        |err| match err {
            MainModuleError::Multiple(candidates) => ExtractError::MultipleApkModules { candidates },
            MainModuleError::NoneFound => ExtractError::NoApplicationModule,
            MainModuleError::UnknownOverride(id) => ExtractError::UnknownModule(id),
        },
    )?;
    if options.main_module.is_some() {
        let apk_modules: Vec<&ModuleId> = nodes
            .iter()
            .filter(|m| {
                plugin_ids.get(*m).is_some_and(|ids| {
                    ids.iter().any(|id| APPLICATION_PLUGIN_IDS.contains(&id.as_str()))
                })
            })
            .collect();
        if apk_modules.len() > 1 {
            diagnostics.push(Diagnostic::warning(
                DiagnosticCode::MultiApk,
                format!(
                    "modules {} all apply an application plugin; proceeding with '{main}'",
                    apk_modules.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(", ")
                ),
            ));
        }
    }

    let reach = reachable_modules(&ReachabilityInput {
        graph: &graph,
        main: &main,
        keywords: &options.keyword_table,
        known_variants: &known_variants,
        selected_variants: &selected_variants,
        phi_exclusions: &options.phi_exclusions,
    });
    diagnostics.extend(reach.diagnostics);

    // Aggregate declarations of reachable modules in topological order and
    // normalize them into coordinates.
    let empty_decls = Vec::new();
    let aggregated: Vec<DeclarationRecord> = reach
        .order
        .iter()
        .flat_map(|m| decl_by_module.get(m).unwrap_or(&empty_decls))
        .cloned()
        .collect();
    let normalized = normalize(&NormalizeInput {
        declarations: &aggregated,
        environments: &environments,
        catalog: &catalog,
        keywords: &options.keyword_table,
        known_variants: &known_variants,
        selected_variants: &selected_variants,
    });
    diagnostics.extend(normalized.diagnostics);
    let mut excluded = normalized.excluded;

    let mut entries = dedup_entries(normalized.entries);
    recover_ambiguous_from_iml(&root, &mut entries, &mut diagnostics);
    resolve_conflicts(&mut entries, &mut excluded);

    // Declarations of modules that did not make the reachable set would have
    // contributed labels; list them with the module-level reason.
    for module in &layout.modules {
        let Some(reason) = reach.excluded.get(&module.id) else {
            continue;
        };
        for record in decl_by_module.get(&module.id).unwrap_or(&empty_decls) {
            if !payload_is_external(&record.payload) {
                continue;
            }
            let class = options.keyword_table.classify(&record.keyword, &known_variants);
            let kept = match class.class {
                DependencyClass::Include => true,
                DependencyClass::Variant => class
                    .variant_prefix
                    .as_deref()
                    .is_some_and(|p| selected_variants.contains(p)),
                DependencyClass::Exclude => false,
            };
            if kept {
                excluded.push(ExcludedItem {
                    text: record.payload.display_text(),
                    reason: reason.clone(),
                    origin_module: module.id.clone(),
                    location: record.location.clone(),
                });
            }
        }
    }

    let mut local_artifacts = layout.local_artifacts.clone();
    mark_referenced_artifacts(&layout, &mut local_artifacts, &normalized.file_trees);

    entries.sort_by(|a, b| {
        (&a.coordinate.group, &a.coordinate.artifact)
            .cmp(&(&b.coordinate.group, &b.coordinate.artifact))
    });
    excluded.sort_by(|a, b| {
        (&a.text, &a.reason, &a.origin_module, &a.location)
            .cmp(&(&b.text, &b.reason, &b.origin_module, &b.location))
    });
    diagnostics.sort_by_key(|d| {
        let (placed, file, line) = match &d.location {
            Some(loc) => (0u8, loc.file.clone(), loc.line),
            None => (1, String::new(), 0),
        };
        (placed, file, line, d.code, d.severity, d.message.clone())
    });

    let project = root
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "project".to_string());

    Ok(ExtractionReport {
        project,
        main_module: main,
        module_order: reach.order,
        dependencies: entries,
        excluded,
        local_artifacts,
        diagnostics,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

fn read_text(root: &Path, path: &Path, diagnostics: &mut Vec<Diagnostic>) -> Option<String> {
    match fs::read_to_string(path) {
        Ok(text) => Some(text),
        Err(err) => {
            diagnostics.push(Diagnostic::warning(
                DiagnosticCode::UnreadablePath,
                format!("could not read '{}': {err}", relative_path(root, path)),
            ));
            None
        }
    }
}

/// True when the payload could contribute an external coordinate.
fn payload_is_external(payload: &Payload) -> bool {
    match payload {
        Payload::CoordinateText(_) | Payload::CatalogRef { .. } => true,
        Payload::PlatformBom(inner) => payload_is_external(inner),
        Payload::Multi(parts) => parts.iter().any(payload_is_external),
        Payload::ModuleRef(_) | Payload::FileTree { .. } => false,
    }
}

// ─── Deduplication and conflict resolution ──────────────────────────────────

/// Collapses exact `(group, artifact, version)` repeats; the first occurrence
/// keeps its metadata and collects the other origin modules.
pub fn dedup_entries(entries: Vec<LabelEntry>) -> Vec<LabelEntry> {
    let mut index: BTreeMap<(String, String, Option<String>), usize> = BTreeMap::new();
    let mut out: Vec<LabelEntry> = Vec::new();
    for entry in entries {
        let key = (
            entry.coordinate.group.clone(),
            entry.coordinate.artifact.clone(),
            entry.coordinate.version.clone(),
        );
        match index.get(&key) {
            Some(&at) => {
                let first = &mut out[at];
                if entry.origin_module != first.origin_module
                    && !first.other_origins.contains(&entry.origin_module)
                {
                    first.other_origins.push(entry.origin_module);
                }
            }
            None => {
                index.insert(key, out.len());
                out.push(entry);
            }
        }
    }
    out
}

/// One artifact, one version: within each `(group, artifact)` bucket the
/// highest concrete version wins; with no concrete candidate the highest
/// versioned entry represents the bucket with its own status. Losers are
/// recorded as version conflicts.
pub fn resolve_conflicts(entries: &mut Vec<LabelEntry>, excluded: &mut Vec<ExcludedItem>) {
    let mut buckets: BTreeMap<(String, String), Vec<usize>> = BTreeMap::new();
    for (idx, entry) in entries.iter().enumerate() {
        buckets
            .entry((entry.coordinate.group.clone(), entry.coordinate.artifact.clone()))
            .or_default()
            .push(idx);
    }

    let mut dropped: BTreeSet<usize> = BTreeSet::new();
    for indices in buckets.values() {
        if indices.len() < 2 {
            continue;
        }
        let winner = *indices
            .iter()
            .max_by(|&&a, &&b| {
                let (ca, cb) = (&entries[a].coordinate, &entries[b].coordinate);
                rank_candidate(ca)
                    .cmp(&rank_candidate(cb))
                    .then_with(|| match (&ca.version, &cb.version) {
                        (Some(va), Some(vb)) => compare_versions(va, vb),
                        (a, b) => a.is_some().cmp(&b.is_some()),
                    })
                    // Earlier declaration wins exact ties.
                    .then_with(|| b.cmp(&a))
            })
            .unwrap();
        for &idx in indices {
            if idx != winner {
                dropped.insert(idx);
                let loser = &entries[idx];
                excluded.push(ExcludedItem {
                    text: loser.coordinate.text(),
                    reason: "version-conflict".to_string(),
                    origin_module: loser.origin_module.clone(),
                    location: loser.location.clone(),
                });
            }
        }
    }

    if !dropped.is_empty() {
        let mut idx = 0;
        entries.retain(|_| {
            let keep = !dropped.contains(&idx);
            idx += 1;
            keep
        });
    }
}

/// Concrete versions outrank dynamic or unresolved ones; versioned entries
/// outrank versionless ones.
fn rank_candidate(c: &Coordinate) -> u8 {
    match (&c.version, c.status.is_concrete()) {
        (Some(_), true) => 2,
        (Some(_), false) => 1,
        (None, _) => 0,
    }
}

// ─── IDE-metadata version recovery ──────────────────────────────────────────

/// Tries to pin dynamic versions from committed `.iml` files. Only entries
/// whose version is ambiguous are touched; a unique concrete version wins,
/// conflicting candidates are reported and left alone.
fn recover_ambiguous_from_iml(
    root: &Path,
    entries: &mut [LabelEntry],
    diagnostics: &mut Vec<Diagnostic>,
) {
    if !entries.iter().any(|e| e.coordinate.status == CoordinateStatus::Ambiguous) {
        return;
    }

    let mut texts = Vec::new();
    for entry in WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| {
            !(e.file_type().is_dir()
                && e.file_name()
                    .to_str()
                    .is_some_and(|n| ["build", ".gradle", ".git"].contains(&n)))
        })
        .filter_map(Result::ok)
    {
        if entry.file_type().is_file()
            && entry.path().extension().and_then(|e| e.to_str()) == Some("iml")
        {
            if let Ok(text) = fs::read_to_string(entry.path()) {
                texts.push(text);
            }
        }
    }
    if texts.is_empty() {
        return;
    }

    // "Gradle: group:artifact:version" library names.
    let triple = Regex::new(r#"Gradle:\s*([A-Za-z0-9_.\-]+):([A-Za-z0-9_.\-]+):([^":@\s]+)"#)
        .expect("static pattern");
    let mut by_pair: BTreeMap<(String, String), BTreeSet<String>> = BTreeMap::new();
    for text in &texts {
        for caps in triple.captures_iter(text) {
            let version = caps[3].to_string();
            if crate::model::classify_version(Some(&version)) == CoordinateStatus::Resolved {
                by_pair
                    .entry((caps[1].to_string(), caps[2].to_string()))
                    .or_default()
                    .insert(version);
            }
        }
    }

    for entry in entries.iter_mut() {
        if entry.coordinate.status != CoordinateStatus::Ambiguous {
            continue;
        }
        let pair = (entry.coordinate.group.clone(), entry.coordinate.artifact.clone());
        let mut candidates: BTreeSet<String> = by_pair.get(&pair).cloned().unwrap_or_default();
        if candidates.is_empty() {
            // Bare "artifact-1.2.3.jar" spellings in library paths.
            let bare = Regex::new(&format!(
                r"[/\\]{}-([0-9][A-Za-z0-9_.\-]*?)\.(?:jar|aar)",
                regex::escape(&entry.coordinate.artifact)
            ))
            .expect("escaped pattern");
            for text in &texts {
                for caps in bare.captures_iter(text) {
                    let version = caps[1].to_string();
                    if crate::model::classify_version(Some(&version)) == CoordinateStatus::Resolved {
                        candidates.insert(version);
                    }
                }
            }
        }
        match candidates.len() {
            0 => {}
            1 => {
                entry.coordinate.version = candidates.into_iter().next();
                entry.coordinate.status = CoordinateStatus::ImlRecovered;
            }
            _ => diagnostics.push(
                Diagnostic::warning(
                    DiagnosticCode::ImlConflict,
                    format!(
                        "IDE metadata offers several versions for {}:{}: {}",
                        entry.coordinate.group,
                        entry.coordinate.artifact,
                        candidates.into_iter().collect::<Vec<_>>().join(", ")
                    ),
                )
                .at(entry.location.clone()),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SourceLocation;
    use crate::resolve::SourceKind;

    fn write(root: &Path, rel: &str, content: &str) {
        let path = root.join(rel);
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, content).unwrap();
    }

    fn entry(g: &str, a: &str, v: Option<&str>, status: CoordinateStatus) -> LabelEntry {
        LabelEntry {
            coordinate: Coordinate {
                group: g.to_string(),
                artifact: a.to_string(),
                version: v.map(str::to_string),
                status,
                classifier: None,
            },
            keyword: "implementation".to_string(),
            origin_module: ModuleId::new(":app"),
            source: SourceKind::Remote,
            location: SourceLocation::new("app/build.gradle", 1),
            other_origins: Vec::new(),
        }
    }

    #[test]
    fn dedup_collapses_exact_triples_and_tracks_origins() {
        let mut second = entry("a", "b", Some("1.0"), CoordinateStatus::Resolved);
        second.origin_module = ModuleId::new(":lib");
        let out = dedup_entries(vec![
            entry("a", "b", Some("1.0"), CoordinateStatus::Resolved),
            second,
            entry("a", "b", Some("1.0"), CoordinateStatus::Resolved),
        ]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].origin_module, ModuleId::new(":app"));
        assert_eq!(out[0].other_origins, vec![ModuleId::new(":lib")]);
    }

    #[test]
    fn conflict_keeps_highest_concrete_version() {
        let mut entries = vec![
            entry("com.google.code.gson", "gson", Some("2.8.1"), CoordinateStatus::Resolved),
            entry("com.google.code.gson", "gson", Some("2.9.0"), CoordinateStatus::Resolved),
        ];
        let mut excluded = Vec::new();
        resolve_conflicts(&mut entries, &mut excluded);
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].coordinate.version.as_deref(), Some("2.9.0"));
        assert_eq!(excluded.len(), 1);
        assert_eq!(excluded[0].reason, "version-conflict");
        assert_eq!(excluded[0].text, "com.google.code.gson:gson:2.8.1");
    }

    #[test]
    fn concrete_beats_higher_dynamic_and_versionless() {
        let mut entries = vec![
            entry("g", "a", None, CoordinateStatus::Unresolved),
            entry("g", "a", Some("9.+"), CoordinateStatus::Ambiguous),
            entry("g", "a", Some("2.0"), CoordinateStatus::Resolved),
        ];
        let mut excluded = Vec::new();
        resolve_conflicts(&mut entries, &mut excluded);
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].coordinate.version.as_deref(), Some("2.0"));
        assert_eq!(excluded.len(), 2);
    }

    #[test]
    fn all_inexact_bucket_keeps_highest_versioned_with_own_status() {
        let mut entries = vec![
            entry("g", "a", Some("1.+"), CoordinateStatus::Ambiguous),
            entry("g", "a", Some("3.+"), CoordinateStatus::Ambiguous),
        ];
        let mut excluded = Vec::new();
        resolve_conflicts(&mut entries, &mut excluded);
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].coordinate.version.as_deref(), Some("3.+"));
        assert_eq!(entries[0].coordinate.status, CoordinateStatus::Ambiguous);
    }

    #[test]
    fn end_to_end_single_module_project() {
        let tmp = tempfile::tempdir().unwrap();
        write(
            tmp.path(),
            "build.gradle",
            "apply plugin: 'com.android.application'\n\next.gsonVersion = '2.10.1'\n\ndependencies {\n    implementation \"com.google.code.gson:gson:$gsonVersion\"\n    implementation 'com.squareup.okhttp3:okhttp:4.11.0'\n    testImplementation 'junit:junit:4.13.2'\n}\n",
        );
        let report = extract_project(tmp.path(), &ExtractOptions::default()).unwrap();
        assert!(report.main_module.is_root());
        assert_eq!(report.module_order, vec![ModuleId::root()]);
        assert_eq!(
            report.label_set(),
            BTreeSet::from([
                "com.google.code.gson:gson:2.10.1".to_string(),
                "com.squareup.okhttp3:okhttp:4.11.0".to_string(),
            ])
        );
        assert!(report
            .excluded
            .iter()
            .any(|e| e.reason == "excluded-keyword:testImplementation"));
        assert_eq!(
            report.lines(),
            "com.google.code.gson:gson:2.10.1\ncom.squareup.okhttp3:okhttp:4.11.0\n"
        );
    }

    #[test]
    fn end_to_end_multi_module_with_pruning_and_conflict() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "settings.gradle", "include ':app', ':data', ':wear'\n");
        write(tmp.path(), "build.gradle", "ext.retrofitVersion = '2.9.0'\n");
        write(
            tmp.path(),
            "app/build.gradle",
            "apply plugin: 'com.android.application'\n\ndependencies {\n    implementation project(':data')\n    wearApp project(':wear')\n    implementation 'com.google.code.gson:gson:2.8.1'\n}\n",
        );
        write(
            tmp.path(),
            "data/build.gradle",
            "apply plugin: 'com.android.library'\n\ndependencies {\n    api \"com.squareup.retrofit2:retrofit:$retrofitVersion\"\n    implementation 'com.google.code.gson:gson:2.9.0'\n}\n",
        );
        write(
            tmp.path(),
            "wear/build.gradle",
            "apply plugin: 'com.android.application'\n\ndependencies {\n    implementation 'com.google.android.support:wearable:2.9.0'\n}\n",
        );

        let options = ExtractOptions {
            main_module: Some(ModuleId::new(":app")),
            ..ExtractOptions::default()
        };
        let report = extract_project(tmp.path(), &options).unwrap();

        assert_eq!(report.main_module, ModuleId::new(":app"));
        assert_eq!(
            report.module_order,
            vec![ModuleId::new(":data"), ModuleId::new(":app")]
        );
        assert_eq!(
            report.label_set(),
            BTreeSet::from([
                "com.google.code.gson:gson:2.9.0".to_string(),
                "com.squareup.retrofit2:retrofit:2.9.0".to_string(),
            ])
        );
        // The wear module's declaration surfaces with the edge keyword.
        assert!(report
            .excluded
            .iter()
            .any(|e| e.reason == "wearApp"
                && e.text == "com.google.android.support:wearable:2.9.0"));
        // The losing gson pick is a version conflict.
        assert!(report
            .excluded
            .iter()
            .any(|e| e.reason == "version-conflict"
                && e.text == "com.google.code.gson:gson:2.8.1"));
        // Proceeding under an override with two application modules warns.
        assert!(report
            .diagnostics
            .iter()
            .any(|d| d.code == DiagnosticCode::MultiApk));
    }

    #[test]
    fn multi_apk_without_override_is_structured_error() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "settings.gradle", "include ':mobile', ':tv'\n");
        for m in ["mobile", "tv"] {
            write(
                tmp.path(),
                &format!("{m}/build.gradle"),
                "apply plugin: 'com.android.application'\n",
            );
        }
        let err = extract_project(tmp.path(), &ExtractOptions::default()).unwrap_err();
        assert_eq!(err.code(), "MULTI_APK");
        assert_eq!(err.exit_code(), 1);
        match err {
            ExtractError::MultipleApkModules { candidates } => {
                assert_eq!(candidates, vec![ModuleId::new(":mobile"), ModuleId::new(":tv")]);
            }
            other => panic!("expected MultipleApkModules, got {other:?}"),
        }
    }

    #[test]
    fn not_a_project_error_code() {
        let tmp = tempfile::tempdir().unwrap();
        let err = extract_project(tmp.path(), &ExtractOptions::default()).unwrap_err();
        assert_eq!(err.code(), "NOT_A_GRADLE_PROJECT");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn project_layer_variables_reach_modules_and_module_layer_shadows() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "settings.gradle", "include ':app'\n");
        write(tmp.path(), "gradle.properties", "coreVersion=1.0.0\n");
        write(
            tmp.path(),
            "build.gradle",
            "ext {\n    okhttpVersion = '4.9.0'\n}\n",
        );
        write(
            tmp.path(),
            "app/build.gradle",
            "apply plugin: 'com.android.application'\n\next.okhttpVersion = '4.11.0'\n\ndependencies {\n    implementation \"androidx.core:core-ktx:$coreVersion\"\n    implementation \"com.squareup.okhttp3:okhttp:$okhttpVersion\"\n}\n",
        );
        let report = extract_project(tmp.path(), &ExtractOptions::default()).unwrap();
        assert_eq!(
            report.label_set(),
            BTreeSet::from([
                "androidx.core:core-ktx:1.0.0".to_string(),
                "com.squareup.okhttp3:okhttp:4.11.0".to_string(),
            ])
        );
    }

    #[test]
    fn iml_recovery_pins_unique_version_and_flags_conflicts() {
        let tmp = tempfile::tempdir().unwrap();
        write(
            tmp.path(),
            "app.iml",
            r#"<module><orderEntry type="library" name="Gradle: com.google.code.gson:gson:2.8.5" level="project" /><root url="jar://$USER_HOME$/.gradle/caches/files/picasso-2.5.2.jar!/" /><orderEntry name="Gradle: com.x:dup:1.0" /><orderEntry name="Gradle: com.x:dup:2.0" /></module>"#,
        );
        let mut entries = vec![
            entry("com.google.code.gson", "gson", Some("2.+"), CoordinateStatus::Ambiguous),
            entry("com.squareup.picasso", "picasso", Some("2.+"), CoordinateStatus::Ambiguous),
            entry("com.x", "dup", Some("1.+"), CoordinateStatus::Ambiguous),
            entry("untouched", "lib", Some("3.0"), CoordinateStatus::Resolved),
        ];
        let mut diagnostics = Vec::new();
        recover_ambiguous_from_iml(tmp.path(), &mut entries, &mut diagnostics);

        assert_eq!(entries[0].coordinate.version.as_deref(), Some("2.8.5"));
        assert_eq!(entries[0].coordinate.status, CoordinateStatus::ImlRecovered);
        assert_eq!(entries[1].coordinate.version.as_deref(), Some("2.5.2"));
        assert_eq!(entries[1].coordinate.status, CoordinateStatus::ImlRecovered);
        assert_eq!(entries[2].coordinate.status, CoordinateStatus::Ambiguous);
        assert!(diagnostics
            .iter()
            .any(|d| d.code == DiagnosticCode::ImlConflict && d.message.contains("com.x:dup")));
        assert_eq!(entries[3].coordinate.version.as_deref(), Some("3.0"));
    }

    #[test]
    fn variant_selection_defaults_to_all_flavors_and_narrows_on_request() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "settings.gradle", "include ':app'\n");
        write(
            tmp.path(),
            "app/build.gradle",
            "apply plugin: 'com.android.application'\n\nandroid {\n    productFlavors {\n        gplay {}\n        foss {}\n    }\n}\n\ndependencies {\n    gplayImplementation 'com.google.firebase:firebase-core:21.1.1'\n    fossImplementation 'org.osmdroid:osmdroid-android:6.1.14'\n}\n",
        );

        let all = extract_project(tmp.path(), &ExtractOptions::default()).unwrap();
        assert_eq!(all.label_set().len(), 2);

        let narrowed = extract_project(
            tmp.path(),
            &ExtractOptions {
                variants: Some(["foss".to_string()].into()),
                ..ExtractOptions::default()
            },
        )
        .unwrap();
        assert_eq!(
            narrowed.label_set(),
            BTreeSet::from(["org.osmdroid:osmdroid-android:6.1.14".to_string()])
        );
        assert!(narrowed
            .excluded
            .iter()
            .any(|e| e.reason == "variant-not-selected:gplay"));
    }

    #[test]
    fn catalog_and_bom_flow_through_the_pipeline() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "settings.gradle", "include ':app'\n");
        write(
            tmp.path(),
            "gradle/libs.versions.toml",
            "[versions]\ncore = \"1.9.0\"\n\n[libraries]\ncore-ktx = { module = \"androidx.core:core-ktx\", version.ref = \"core\" }\nokhttp-bom = { module = \"com.squareup.okhttp3:okhttp-bom\", version = \"4.11.0\" }\nokhttp = { module = \"com.squareup.okhttp3:okhttp\" }\n",
        );
        write(
            tmp.path(),
            "app/build.gradle.kts",
            "plugins {\n    id(\"com.android.application\")\n}\n\ndependencies {\n    implementation(libs.core.ktx)\n    implementation(platform(libs.okhttp.bom))\n    implementation(libs.okhttp)\n}\n",
        );
        let report = extract_project(tmp.path(), &ExtractOptions::default()).unwrap();
        assert_eq!(
            report.label_set(),
            BTreeSet::from([
                "androidx.core:core-ktx:1.9.0".to_string(),
                "com.squareup.okhttp3:okhttp:4.11.0".to_string(),
            ])
        );
        let okhttp = report
            .dependencies
            .iter()
            .find(|e| e.coordinate.artifact == "okhttp")
            .unwrap();
        assert_eq!(okhttp.coordinate.status, CoordinateStatus::BomDerived);
        assert_eq!(okhttp.source, SourceKind::Bom);
        assert!(report
            .excluded
            .iter()
            .any(|e| e.reason == "platform-bom"
                && e.text == "com.squareup.okhttp3:okhttp-bom:4.11.0"));
    }

    #[test]
    fn local_artifacts_marked_by_file_tree() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "settings.gradle", "include ':app'\n");
        write(
            tmp.path(),
            "app/build.gradle",
            "apply plugin: 'com.android.application'\n\ndependencies {\n    implementation fileTree(dir: 'libs', include: ['*.jar'])\n}\n",
        );
        write(tmp.path(), "app/libs/legacy-sdk.jar", "bytes");
        write(tmp.path(), "app/other/loose.jar", "bytes");
        let report = extract_project(tmp.path(), &ExtractOptions::default()).unwrap();
        let by_path: BTreeMap<&str, bool> = report
            .local_artifacts
            .iter()
            .map(|a| (a.path.as_str(), a.referenced))
            .collect();
        assert_eq!(by_path["app/libs/legacy-sdk.jar"], true);
        assert_eq!(by_path["app/other/loose.jar"], false);
    }

    #[test]
    fn report_json_round_trips() {
        let tmp = tempfile::tempdir().unwrap();
        write(
            tmp.path(),
            "build.gradle",
            "apply plugin: 'com.android.application'\ndependencies {\n    implementation 'a.b:c:1.0'\n}\n",
        );
        let report = extract_project(tmp.path(), &ExtractOptions::default()).unwrap();
        let json = serde_json::to_string_pretty(&report).unwrap();
        for key in [
            "\"project\"",
            "\"main_module\"",
            "\"module_order\"",
            "\"dependencies\"",
            "\"excluded\"",
            "\"local_artifacts\"",
            "\"diagnostics\"",
            "\"tool_version\"",
        ] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
        let back: ExtractionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.label_set(), report.label_set());
        assert_eq!(back.tool_version, env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn diagnostics_and_report_are_deterministic() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "settings.gradle", "include ':app', ':lib'\n");
        write(
            tmp.path(),
            "app/build.gradle",
            "apply plugin: 'com.android.application'\ndependencies {\n    implementation project(':lib')\n    implementation 'x.y:z:1.0'\n    implementation 'dyn.a:b:1.+'\n}\n",
        );
        write(
            tmp.path(),
            "lib/build.gradle",
            "dependencies {\n    api 'x.y:z:1.0'\n    weirdConfig 'q.r:s:2.0'\n}\n",
        );
        let a = extract_project(tmp.path(), &ExtractOptions::default()).unwrap();
        let b = extract_project(tmp.path(), &ExtractOptions::default()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        // The shared x.y:z:1.0 carries both origin modules.
        let shared = a.dependencies.iter().find(|e| e.coordinate.artifact == "z").unwrap();
        assert_eq!(shared.origin_module, ModuleId::new(":lib"));
        assert_eq!(shared.other_origins, vec![ModuleId::new(":app")]);
    }
}
