//! Version-catalog files (`libs.versions.toml`).

use std::collections::BTreeMap;

use toml::Value;

use crate::model::{Diagnostic, DiagnosticCode, SourceLocation};

/// How a library entry's version was written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatalogVersion {
    /// Inline requirement, or the strongest bound of a rich version table.
    Literal(String),
    /// `version.ref = "alias"` pointing into `[versions]`.
    Ref(String),
}

/// One `[libraries]` entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogLibrary {
    pub group: String,
    pub artifact: String,
    pub version: Option<CatalogVersion>,
}

/// Parsed catalog. All alias keys are canonical: `-` and `_` folded to `.`,
/// matching how build scripts spell the generated accessors.
#[derive(Debug, Clone, Default)]
pub struct CatalogModel {
    pub versions: BTreeMap<String, String>,
    pub libraries: BTreeMap<String, CatalogLibrary>,
    pub bundles: BTreeMap<String, Vec<String>>,
    pub plugins: BTreeMap<String, String>,
}

impl CatalogModel {
    pub fn library(&self, alias: &str) -> Option<&CatalogLibrary> {
        self.libraries.get(&canonical_alias(alias))
    }

    pub fn bundle(&self, alias: &str) -> Option<&Vec<String>> {
        self.bundles.get(&canonical_alias(alias))
    }

    pub fn plugin_id(&self, alias: &str) -> Option<&str> {
        self.plugins.get(&canonical_alias(alias)).map(String::as_str)
    }

    /// The concrete version text of a library entry, following `version.ref`.
    pub fn version_of(&self, library: &CatalogLibrary) -> Option<String> {
        match &library.version {
            None => None,
            Some(CatalogVersion::Literal(v)) => Some(v.clone()),
            Some(CatalogVersion::Ref(alias)) => self.versions.get(&canonical_alias(alias)).cloned(),
        }
    }

    /// Overlays `other` onto `self`; entries of `other` win per alias.
    pub fn merge(&mut self, other: CatalogModel) {
        self.versions.extend(other.versions);
        self.libraries.extend(other.libraries);
        self.bundles.extend(other.bundles);
        self.plugins.extend(other.plugins);
    }

    pub fn is_empty(&self) -> bool {
        self.versions.is_empty()
            && self.libraries.is_empty()
            && self.bundles.is_empty()
            && self.plugins.is_empty()
    }
}

/// Accessor form of an alias: `core-ktx` and `core_ktx` both become `core.ktx`.
pub fn canonical_alias(alias: &str) -> String {
    alias.replace(['-', '_'], ".")
}

/// Parses one catalog file. A TOML syntax error yields an empty model and an
/// error diagnostic; structurally bad entries are dropped individually.
pub fn parse_catalog(text: &str, file_rel: &str) -> (CatalogModel, Vec<Diagnostic>) {
    let mut diagnostics = Vec::new();

    let table: toml::Table = match toml::from_str(text) {
        Ok(t) => t,
        Err(err) => {
            let line = err
                .span()
                .map(|span| line_at_offset(text, span.start))
                .unwrap_or(1);
            diagnostics.push(
                Diagnostic::error(
                    DiagnosticCode::CatalogError,
                    format!("catalog file does not parse: {}", first_line(&err.to_string())),
                )
                .at(SourceLocation::new(file_rel, line)),
            );
            return (CatalogModel::default(), diagnostics);
        }
    };

    let mut model = CatalogModel::default();

    if let Some(Value::Table(versions)) = table.get("versions") {
        for (alias, value) in versions {
            match version_text(value) {
                Some(v) => {
                    model.versions.insert(canonical_alias(alias), v);
                }
                None => diagnostics.push(entry_warning(text, file_rel, alias, "versions")),
            }
        }
    }

    if let Some(Value::Table(libraries)) = table.get("libraries") {
        for (alias, value) in libraries {
            match library_entry(value) {
                Some(lib) => {
                    if let Some(CatalogVersion::Ref(r)) = &lib.version {
                        if !model.versions.contains_key(&canonical_alias(r)) {
                            diagnostics.push(
                                Diagnostic::error(
                                    DiagnosticCode::DanglingVersionRef,
                                    format!(
                                        "library '{alias}' references version '{r}' which is not defined"
                                    ),
                                )
                                .at(key_location(text, file_rel, alias)),
                            );
                            continue;
                        }
                    }
                    model.libraries.insert(canonical_alias(alias), lib);
                }
                None => diagnostics.push(entry_warning(text, file_rel, alias, "libraries")),
            }
        }
    }

    if let Some(Value::Table(bundles)) = table.get("bundles") {
        for (alias, value) in bundles {
            let members: Option<Vec<String>> = match value {
                Value::Array(items) => items
                    .iter()
                    .map(|m| m.as_str().map(canonical_alias))
                    .collect(),
                _ => None,
            };
            let Some(members) = members else {
                diagnostics.push(entry_warning(text, file_rel, alias, "bundles"));
                continue;
            };
            if let Some(missing) = members.iter().find(|m| !model.libraries.contains_key(*m)) {
                diagnostics.push(
                    Diagnostic::error(
                        DiagnosticCode::DanglingBundleMember,
                        format!("bundle '{alias}' lists unknown library '{missing}'"),
                    )
                    .at(key_location(text, file_rel, alias)),
                );
                continue;
            }
            model.bundles.insert(canonical_alias(alias), members);
        }
    }

    if let Some(Value::Table(plugins)) = table.get("plugins") {
        for (alias, value) in plugins {
            let id = match value {
                Value::String(s) => s.split(':').next().map(str::to_string),
                Value::Table(t) => t.get("id").and_then(Value::as_str).map(str::to_string),
                _ => None,
            };
            match id {
                Some(id) if !id.is_empty() => {
                    model.plugins.insert(canonical_alias(alias), id);
                }
                _ => diagnostics.push(entry_warning(text, file_rel, alias, "plugins")),
            }
        }
    }

    (model, diagnostics)
}

/// A version value: plain string, or a rich table where the strongest
/// constraint wins (`strictly`, then `require`, then `prefer`).
fn version_text(value: &Value) -> Option<String> {
    match value {
        Value::String(s) => Some(s.clone()),
        Value::Table(t) => ["strictly", "require", "prefer"]
            .iter()
            .find_map(|k| t.get(*k).and_then(Value::as_str).map(str::to_string)),
        _ => None,
    }
}

fn library_entry(value: &Value) -> Option<CatalogLibrary> {
    match value {
        // Shorthand: "group:artifact:version" or "group:artifact".
        Value::String(s) => {
            let parts: Vec<&str> = s.split(':').collect();
            match parts.as_slice() {
                [g, a] if !g.is_empty() && !a.is_empty() => Some(CatalogLibrary {
                    group: g.to_string(),
                    artifact: a.to_string(),
                    version: None,
                }),
                [g, a, v] if !g.is_empty() && !a.is_empty() && !v.is_empty() => {
                    Some(CatalogLibrary {
                        group: g.to_string(),
                        artifact: a.to_string(),
                        version: Some(CatalogVersion::Literal(v.to_string())),
                    })
                }
                _ => None,
            }
        }
        Value::Table(t) => {
            let (group, artifact) = if let Some(module) = t.get("module").and_then(Value::as_str) {
                let (g, a) = module.split_once(':')?;
                (g.to_string(), a.to_string())
            } else {
                let g = t.get("group").and_then(Value::as_str)?;
                let a = t.get("name").and_then(Value::as_str)?;
                (g.to_string(), a.to_string())
            };
            if group.is_empty() || artifact.is_empty() {
                return None;
            }
            let version = match t.get("version") {
                None => None,
                Some(Value::Table(vt)) if vt.contains_key("ref") => {
                    Some(CatalogVersion::Ref(vt.get("ref")?.as_str()?.to_string()))
                }
                Some(v) => Some(CatalogVersion::Literal(version_text(v)?)),
            };
            Some(CatalogLibrary { group, artifact, version })
        }
        _ => None,
    }
}

fn entry_warning(text: &str, file_rel: &str, alias: &str, section: &str) -> Diagnostic {
    Diagnostic::warning(
        DiagnosticCode::CatalogError,
        format!("catalog entry '{alias}' in [{section}] has an unrecognized shape"),
    )
    .at(key_location(text, file_rel, alias))
}

/// Best-effort source line of a top-level key: the first line that starts
/// with the alias followed by `=`.
fn key_location(text: &str, file_rel: &str, alias: &str) -> SourceLocation {
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim_start();
        if let Some(rest) = t.strip_prefix(alias) {
            if rest.trim_start().starts_with('=') {
                return SourceLocation::new(file_rel, idx + 1);
            }
        }
    }
    SourceLocation::new(file_rel, 1)
}

fn line_at_offset(text: &str, offset: usize) -> usize {
    let clamped = offset.min(text.len());
    text[..clamped].bytes().filter(|&b| b == b'\n').count() + 1
}

fn first_line(message: &str) -> &str {
    message.lines().find(|l| !l.trim().is_empty()).unwrap_or(message).trim()
}
