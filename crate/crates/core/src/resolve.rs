//! Variable environments, reference resolution, catalog and BOM expansion,
//! and normalization of declarations into explicit coordinates.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::keywords::{DependencyClass, KeywordTable};
use crate::model::{
    classify_version, parse_coordinate, Coordinate, CoordinateStatus, Diagnostic, DiagnosticCode,
    ModuleId, SourceLocation,
};
use crate::script::{
    BindingValue, CatalogModel, DeclarationRecord, Payload, Piece, RawBinding,
    tokenize_string_expr,
};

// ─── Variable environment ───────────────────────────────────────────────────

/// Two-layer variable store: project-wide bindings shadowed by module-local
/// ones. Lookup strips accessor prefixes (`rootProject.`, `project.`, `ext.`,
/// `extra.`) so every spelling of a variable reaches the same key.
#[derive(Debug, Clone, Default)]
pub struct VariableEnvironment {
    project: BTreeMap<String, BindingValue>,
    module: BTreeMap<String, BindingValue>,
}

impl VariableEnvironment {
    pub fn lookup(&self, path: &str) -> Option<&BindingValue> {
        let key = strip_alias_prefixes(path);
        self.module
            .get(key)
            .or_else(|| self.project.get(key))
            .or_else(|| case_fallback(&self.module, key))
            .or_else(|| case_fallback(&self.project, key))
    }

    pub fn is_empty(&self) -> bool {
        self.project.is_empty() && self.module.is_empty()
    }
}

/// Drops leading accessor aliases, repeatedly, so
/// `rootProject.ext.versions.core` and `versions.core` coincide.
fn strip_alias_prefixes(path: &str) -> &str {
    let mut p = path;
    loop {
        let before = p;
        for prefix in ["rootProject.", "project.", "ext.", "extra."] {
            if let Some(rest) = p.strip_prefix(prefix) {
                p = rest;
            }
        }
        if p == before {
            return p;
        }
    }
}

/// Exact-tail lookup with a case-insensitive first segment, bridging Groovy
/// `versions.core` to a Kotlin `object Versions` definition and back.
fn case_fallback<'a>(
    map: &'a BTreeMap<String, BindingValue>,
    key: &str,
) -> Option<&'a BindingValue> {
    let (head, tail) = split_head(key);
    map.iter().find_map(|(k, v)| {
        let (kh, kt) = split_head(k);
        (kh.eq_ignore_ascii_case(head) && kt == tail).then_some(v)
    })
}

fn split_head(key: &str) -> (&str, Option<&str>) {
    match key.split_once('.') {
        Some((h, t)) => (h, Some(t)),
        None => (key, None),
    }
}

/// Layers module bindings over project bindings. Within one layer the
/// last-parsed binding wins; a rebound key is reported once per rebind.
pub fn compose_environment(
    project_bindings: &[RawBinding],
    module_bindings: &[RawBinding],
) -> (VariableEnvironment, Vec<Diagnostic>) {
    let mut env = VariableEnvironment::default();
    let mut diagnostics = Vec::new();
    fill_layer(&mut env.project, project_bindings, "project", &mut diagnostics);
    fill_layer(&mut env.module, module_bindings, "module", &mut diagnostics);
    (env, diagnostics)
}

fn fill_layer(
    layer: &mut BTreeMap<String, BindingValue>,
    bindings: &[RawBinding],
    layer_name: &str,
    diagnostics: &mut Vec<Diagnostic>,
) {
    for binding in bindings {
        let previous = layer.insert(binding.key.clone(), binding.value.clone());
        if let Some(prev) = previous {
            if prev != binding.value {
                diagnostics.push(
                    Diagnostic::warning(
                        DiagnosticCode::DuplicateBinding,
                        format!(
                            "variable '{}' is bound more than once in the {} scope; the later value wins",
                            binding.key, layer_name
                        ),
                    )
                    .at(binding.location.clone()),
                );
            }
        }
    }
}

// ─── Reference resolution ───────────────────────────────────────────────────

/// Outcome of resolving a value against an environment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResolvedValue {
    Resolved(String),
    /// Best-effort text with `${name}` holes for every missing variable.
    Unresolved { partial: String, missing: Vec<String> },
}

const MAX_RESOLUTION_DEPTH: usize = 32;

/// Resolves a binding value, chasing references recursively.
pub fn resolve_value(env: &VariableEnvironment, value: &BindingValue) -> ResolvedValue {
    match value {
        BindingValue::Literal(s) => ResolvedValue::Resolved(s.clone()),
        BindingValue::Reference(path) => resolve_pieces(env, &[Piece::Ref(path.clone())]),
        BindingValue::Concat(pieces) => resolve_pieces(env, pieces),
    }
}

/// Resolves a tokenized string expression piece by piece.
pub fn resolve_pieces(env: &VariableEnvironment, pieces: &[Piece]) -> ResolvedValue {
    let mut out = String::new();
    let mut missing = Vec::new();
    for piece in pieces {
        match piece {
            Piece::Lit(text) => out.push_str(text),
            Piece::Ref(path) => {
                let mut visiting = HashSet::new();
                match chase(env, path, &mut visiting, 0) {
                    Some(text) => out.push_str(&text),
                    None => {
                        out.push_str("${");
                        out.push_str(path);
                        out.push('}');
                        missing.push(path.clone());
                    }
                }
            }
        }
    }
    if missing.is_empty() {
        ResolvedValue::Resolved(out)
    } else {
        ResolvedValue::Unresolved { partial: out, missing }
    }
}

fn chase(
    env: &VariableEnvironment,
    path: &str,
    visiting: &mut HashSet<String>,
    depth: usize,
) -> Option<String> {
    if depth >= MAX_RESOLUTION_DEPTH {
        return None;
    }
    let key = strip_alias_prefixes(path).to_string();
    if !visiting.insert(key.clone()) {
        return None;
    }
    let result = env.lookup(path).and_then(|value| match value {
        BindingValue::Literal(s) => Some(s.clone()),
        BindingValue::Reference(next) => chase(env, next, visiting, depth + 1),
        BindingValue::Concat(pieces) => {
            let mut out = String::new();
            for piece in pieces {
                match piece {
                    Piece::Lit(s) => out.push_str(s),
                    Piece::Ref(next) => out.push_str(&chase(env, next, visiting, depth + 1)?),
                }
            }
            Some(out)
        }
    });
    visiting.remove(&key);
    result
}

// ─── Catalog and BOM expansion ──────────────────────────────────────────────

/// Expands a `libs.` accessor into coordinates. A bundle yields its members
/// in catalog order; `Err` carries the alias that matched nothing.
pub fn expand_catalog_ref(
    catalog: &CatalogModel,
    alias_path: &str,
    is_bundle: bool,
) -> Result<Vec<Coordinate>, String> {
    if is_bundle {
        let members = catalog
            .bundle(alias_path)
            .ok_or_else(|| alias_path.to_string())?;
        // Bundle membership is validated at parse time, so members resolve.
        Ok(members
            .iter()
            .filter_map(|m| catalog.library(m))
            .map(|lib| catalog_coordinate(catalog, lib))
            .collect())
    } else {
        let library = catalog
            .library(alias_path)
            .ok_or_else(|| alias_path.to_string())?;
        Ok(vec![catalog_coordinate(catalog, library)])
    }
}

fn catalog_coordinate(catalog: &CatalogModel, library: &crate::script::CatalogLibrary) -> Coordinate {
    let version = catalog.version_of(library);
    Coordinate {
        group: library.group.clone(),
        artifact: library.artifact.clone(),
        status: classify_version(version.as_deref()),
        version,
        classifier: None,
    }
}

/// Fills versionless coordinates of the BOM's own group with the BOM version.
pub fn expand_bom(bom: &Coordinate, coordinates: Vec<Coordinate>) -> Vec<Coordinate> {
    let Some(bom_version) = bom.version.as_ref().filter(|_| bom.status.is_concrete()) else {
        return coordinates;
    };
    coordinates
        .into_iter()
        .map(|c| {
            if c.version.is_none() && c.group == bom.group {
                Coordinate {
                    version: Some(bom_version.clone()),
                    status: CoordinateStatus::BomDerived,
                    ..c
                }
            } else {
                c
            }
        })
        .collect()
}

// ─── Normalization ──────────────────────────────────────────────────────────

/// Mechanism that produced a dependency entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    Remote,
    Catalog,
    Bom,
    LocalFiletree,
}

/// One normalized dependency, ready for the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelEntry {
    #[serde(flatten)]
    pub coordinate: Coordinate,
    pub keyword: String,
    pub origin_module: ModuleId,
    pub source: SourceKind,
    pub location: SourceLocation,
    /// Further origin modules collapsed by deduplication.
    #[serde(skip)]
    pub other_origins: Vec<ModuleId>,
}

/// A declaration that did not make it into the label set, and why. The
/// reason strings form a closed vocabulary: `excluded-keyword:<kw>`,
/// `unknown-keyword:<kw>`, `variant-not-selected:<prefix>`,
/// `unresolved-variable`, `malformed-coordinate`, `unknown-catalog-alias`,
/// `platform-bom`, `version-conflict`, an excluding edge keyword such as
/// `wearApp`, or `unreachable`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedItem {
    pub text: String,
    pub reason: String,
    pub origin_module: ModuleId,
    pub location: SourceLocation,
}

/// A `fileTree`/`files` declaration kept under an included keyword; used to
/// mark local artifacts as referenced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileTreeRef {
    pub origin_module: ModuleId,
    pub dir: String,
    pub patterns: Vec<String>,
    pub location: SourceLocation,
}

impl FileTreeRef {
    /// True when a module-relative file path falls under this declaration.
    /// An empty pattern list matches everything below the directory, and a
    /// `files(...)` entry naming one exact path matches just that file.
    pub fn matches(&self, rel_path: &str) -> bool {
        let dir = self.dir.trim_matches('/');
        let rest = if dir.is_empty() {
            rel_path
        } else if rel_path == dir {
            ""
        } else {
            match rel_path.strip_prefix(dir).and_then(|r| r.strip_prefix('/')) {
                Some(rest) => rest,
                None => return false,
            }
        };
        if self.patterns.is_empty() || rest.is_empty() {
            return true;
        }
        let name = rest.rsplit('/').next().unwrap_or(rest);
        self.patterns.iter().any(|p| glob_match(p, name) || glob_match(p, rest))
    }
}

/// Minimal `*`-wildcard match, enough for `*.jar`-style include patterns.
fn glob_match(pattern: &str, name: &str) -> bool {
    fn inner(p: &[u8], n: &[u8]) -> bool {
        match (p.first(), n.first()) {
            (None, None) => true,
            (Some(b'*'), _) => {
                inner(&p[1..], n) || (!n.is_empty() && inner(p, &n[1..]))
            }
            (Some(pc), Some(nc)) if pc == nc => inner(&p[1..], &n[1..]),
            _ => false,
        }
    }
    inner(pattern.as_bytes(), name.as_bytes())
}

/// Everything normalization needs, borrowed from the pipeline state.
pub struct NormalizeInput<'a> {
    pub declarations: &'a [DeclarationRecord],
    pub environments: &'a BTreeMap<ModuleId, VariableEnvironment>,
    pub catalog: &'a CatalogModel,
    pub keywords: &'a KeywordTable,
    /// Variant names declared by the project (flavors and build types).
    pub known_variants: &'a BTreeSet<String>,
    /// Variant prefixes whose declarations are kept.
    pub selected_variants: &'a BTreeSet<String>,
}

#[derive(Debug, Default)]
pub struct NormalizeOutput {
    pub entries: Vec<LabelEntry>,
    pub excluded: Vec<ExcludedItem>,
    pub file_trees: Vec<FileTreeRef>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Turns raw declarations into explicit coordinates: keyword filtering,
/// variable substitution, catalog expansion, BOM application and syntax
/// unification. Declarations keep their input order; duplicates survive for
/// the later deduplication stage.
pub fn normalize(input: &NormalizeInput<'_>) -> NormalizeOutput {
    let mut out = NormalizeOutput::default();
    let empty_env = VariableEnvironment::default();
    // BOM coordinates registered per module, applied after the scan.
    let mut boms: BTreeMap<ModuleId, Vec<Coordinate>> = BTreeMap::new();

    for record in input.declarations {
        let class = input.keywords.classify(&record.keyword, input.known_variants);
        match class.class {
            DependencyClass::Exclude if !class.known => {
                out.diagnostics.push(
                    Diagnostic::warning(
                        DiagnosticCode::UnknownKeyword,
                        format!(
                            "configuration '{}' is not recognized; its declarations are excluded",
                            record.keyword
                        ),
                    )
                    .at(record.location.clone()),
                );
                out.excluded.push(ExcludedItem {
                    text: record.payload.display_text(),
                    reason: format!("unknown-keyword:{}", record.keyword),
                    origin_module: record.origin_module.clone(),
                    location: record.location.clone(),
                });
                continue;
            }
            DependencyClass::Exclude => {
                out.excluded.push(ExcludedItem {
                    text: record.payload.display_text(),
                    reason: format!("excluded-keyword:{}", record.keyword),
                    origin_module: record.origin_module.clone(),
                    location: record.location.clone(),
                });
                continue;
            }
            DependencyClass::Variant => {
                let prefix = class.variant_prefix.as_deref().unwrap_or_default();
                if !input.selected_variants.contains(prefix) {
                    out.excluded.push(ExcludedItem {
                        text: record.payload.display_text(),
                        reason: format!("variant-not-selected:{prefix}"),
                        origin_module: record.origin_module.clone(),
                        location: record.location.clone(),
                    });
                    continue;
                }
                out.diagnostics.push(
                    Diagnostic::info(
                        DiagnosticCode::VariantKept,
                        format!(
                            "declaration under '{}' kept for selected variant '{prefix}'",
                            record.keyword
                        ),
                    )
                    .at(record.location.clone()),
                );
            }
            DependencyClass::Include => {}
        }

        let env = input
            .environments
            .get(&record.origin_module)
            .unwrap_or(&empty_env);
        expand_payload(&record.payload, record, env, input.catalog, false, &mut boms, &mut out);
    }

    apply_boms(&boms, &mut out.entries);
    emit_version_diagnostics(&mut out);
    out
}

/// Recursive payload expansion. `in_platform` marks payloads inside a
/// `platform(...)` wrapper: their coordinates manage versions rather than
/// contribute packaged labels.
fn expand_payload(
    payload: &Payload,
    record: &DeclarationRecord,
    env: &VariableEnvironment,
    catalog: &CatalogModel,
    in_platform: bool,
    boms: &mut BTreeMap<ModuleId, Vec<Coordinate>>,
    out: &mut NormalizeOutput,
) {
    match payload {
        Payload::Multi(parts) => {
            for part in parts {
                expand_payload(part, record, env, catalog, in_platform, boms, out);
            }
        }
        Payload::PlatformBom(inner) => {
            expand_payload(inner, record, env, catalog, true, boms, out);
        }
        Payload::ModuleRef(_) => {}
        Payload::FileTree { dir, patterns } => {
            out.file_trees.push(FileTreeRef {
                origin_module: record.origin_module.clone(),
                dir: dir.clone(),
                patterns: patterns.clone(),
                location: record.location.clone(),
            });
        }
        Payload::CatalogRef { alias, bundle } => {
            match expand_catalog_ref(catalog, alias, *bundle) {
                Ok(coordinates) => {
                    for coordinate in coordinates {
                        accept_coordinate(
                            coordinate,
                            SourceKind::Catalog,
                            record,
                            in_platform,
                            boms,
                            out,
                        );
                    }
                }
                Err(alias) => {
                    out.diagnostics.push(
                        Diagnostic::error(
                            DiagnosticCode::UnknownCatalogAlias,
                            format!("catalog defines no library or bundle named '{alias}'"),
                        )
                        .at(record.location.clone()),
                    );
                    out.excluded.push(ExcludedItem {
                        text: payload.display_text(),
                        reason: "unknown-catalog-alias".to_string(),
                        origin_module: record.origin_module.clone(),
                        location: record.location.clone(),
                    });
                }
            }
        }
        Payload::CoordinateText(raw) => {
            let pieces = tokenize_string_expr(raw);
            match resolve_pieces(env, &pieces) {
                ResolvedValue::Resolved(text) => match parse_coordinate(&text) {
                    Ok(coordinate) => {
                        accept_coordinate(
                            coordinate,
                            SourceKind::Remote,
                            record,
                            in_platform,
                            boms,
                            out,
                        );
                    }
                    Err(err) => {
                        out.diagnostics.push(
                            Diagnostic::warning(
                                DiagnosticCode::MalformedCoordinate,
                                err.to_string(),
                            )
                            .at(record.location.clone()),
                        );
                        out.excluded.push(ExcludedItem {
                            text: text.clone(),
                            reason: "malformed-coordinate".to_string(),
                            origin_module: record.origin_module.clone(),
                            location: record.location.clone(),
                        });
                    }
                },
                ResolvedValue::Unresolved { partial, missing } => {
                    // The group and artifact may still be literal; keep the
                    // coordinate with its version hole if so.
                    match parse_coordinate(&partial) {
                        Ok(coordinate) => {
                            out.diagnostics.push(
                                Diagnostic::warning(
                                    DiagnosticCode::UnresolvedVar,
                                    format!(
                                        "could not resolve {} in declaration of {}:{}",
                                        name_list(&missing),
                                        coordinate.group,
                                        coordinate.artifact
                                    ),
                                )
                                .at(record.location.clone()),
                            );
                            accept_coordinate(
                                coordinate,
                                SourceKind::Remote,
                                record,
                                in_platform,
                                boms,
                                out,
                            );
                        }
                        Err(_) => {
                            out.diagnostics.push(
                                Diagnostic::warning(
                                    DiagnosticCode::UnresolvedVar,
                                    format!(
                                        "could not resolve {} in '{}'",
                                        name_list(&missing),
                                        partial
                                    ),
                                )
                                .at(record.location.clone()),
                            );
                            out.excluded.push(ExcludedItem {
                                text: partial,
                                reason: "unresolved-variable".to_string(),
                                origin_module: record.origin_module.clone(),
                                location: record.location.clone(),
                            });
                        }
                    }
                }
            }
        }
    }
}

fn accept_coordinate(
    coordinate: Coordinate,
    source: SourceKind,
    record: &DeclarationRecord,
    in_platform: bool,
    boms: &mut BTreeMap<ModuleId, Vec<Coordinate>>,
    out: &mut NormalizeOutput,
) {
    if in_platform {
        out.excluded.push(ExcludedItem {
            text: coordinate.text(),
            reason: "platform-bom".to_string(),
            origin_module: record.origin_module.clone(),
            location: record.location.clone(),
        });
        boms.entry(record.origin_module.clone()).or_default().push(coordinate);
        return;
    }
    out.entries.push(LabelEntry {
        coordinate,
        keyword: record.keyword.clone(),
        origin_module: record.origin_module.clone(),
        source,
        location: record.location.clone(),
        other_origins: Vec::new(),
    });
}

/// Applies each module's BOMs to that module's versionless entries.
fn apply_boms(boms: &BTreeMap<ModuleId, Vec<Coordinate>>, entries: &mut [LabelEntry]) {
    for entry in entries.iter_mut() {
        if entry.coordinate.version.is_some() {
            continue;
        }
        let Some(module_boms) = boms.get(&entry.origin_module) else {
            continue;
        };
        for bom in module_boms {
            if bom.group == entry.coordinate.group {
                if let Some(v) = bom.version.as_ref().filter(|_| bom.status.is_concrete()) {
                    entry.coordinate.version = Some(v.clone());
                    entry.coordinate.status = CoordinateStatus::BomDerived;
                    entry.source = SourceKind::Bom;
                    break;
                }
            }
        }
    }
}

/// Post-pass warnings for entries whose version stayed inexact. Unresolved
/// variables were already reported at resolution time.
fn emit_version_diagnostics(out: &mut NormalizeOutput) {
    for entry in &out.entries {
        let c = &entry.coordinate;
        match c.status {
            CoordinateStatus::Ambiguous => {
                out.diagnostics.push(
                    Diagnostic::warning(
                        DiagnosticCode::AmbiguousVersion,
                        format!(
                            "version of {}:{} is dynamic ('{}'); the packaged version cannot be pinned",
                            c.group,
                            c.artifact,
                            c.version.as_deref().unwrap_or_default()
                        ),
                    )
                    .at(entry.location.clone()),
                );
            }
            CoordinateStatus::Unresolved if c.version.is_none() => {
                out.diagnostics.push(
                    Diagnostic::warning(
                        DiagnosticCode::MissingVersion,
                        format!(
                            "{}:{} declares no version and no platform declaration in scope supplies one",
                            c.group, c.artifact
                        ),
                    )
                    .at(entry.location.clone()),
                );
            }
            _ => {}
        }
    }
}

fn name_list(names: &[String]) -> String {
    let quoted: Vec<String> = names.iter().map(|n| format!("'{n}'")).collect();
    match quoted.len() {
        1 => format!("variable {}", quoted[0]),
        _ => format!("variables {}", quoted.join(", ")),
    }
}
