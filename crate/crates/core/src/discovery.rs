//! Project layout discovery: root location, module enumeration, settings
//! parsing, custom-script search and local binary inventory.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

use crate::model::{Diagnostic, DiagnosticCode, ModuleId, SourceLocation};
use crate::resolve::FileTreeRef;
use crate::script::strip_comments;

/// Base names under which projects hide shared dependency declarations,
/// matched case-sensitively anywhere in the tree.
pub const CUSTOM_SCRIPT_NAMES: [&str; 17] = [
    "constants.gradle",
    "versions.gradle",
    "config.gradle",
    "dependencies_groups.gradle",
    "dependencies.gradle",
    "dependency-versions.gradle",
    "variables.gradle",
    "deps.gradle",
    "sdkVersion.gradle",
    "standalone.gradle",
    "root_all_projects_ext.gradle",
    "dependencies.kt",
    "dependencies.gradle.kts",
    "Deps.kt",
    "deps.kt",
    "Vers.kt",
    "Versions.kt",
];

const SETTINGS_NAMES: [&str; 2] = ["settings.gradle", "settings.gradle.kts"];
const BUILD_NAMES: [&str; 2] = ["build.gradle", "build.gradle.kts"];
const CATALOG_CANDIDATES: [&str; 6] = [
    "gradle/libs.versions.toml",
    "gradle/libs.toml",
    "gradle/libs.version.toml",
    "libs.versions.toml",
    "libs.toml",
    "libs.version.toml",
];
const SKIPPED_DIRS: [&str; 3] = ["build", ".gradle", ".git"];

#[derive(Debug, Error)]
pub enum DiscoveryError {
    #[error("no Gradle settings or build file found at or above {}", .0.display())]
    NotAGradleProject(PathBuf),
    #[error("failed reading {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// One module of the project.
#[derive(Debug, Clone)]
pub struct ModuleEntry {
    pub id: ModuleId,
    pub dir: PathBuf,
    pub build_files: Vec<PathBuf>,
}

/// A shared script, with the modules whose build files applied it. An empty
/// list means the script was found by name only and binds at project scope.
#[derive(Debug, Clone)]
pub struct CustomScript {
    pub path: PathBuf,
    pub applied_by: Vec<ModuleId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ArtifactKind {
    Jar,
    Aar,
    So,
}

/// A binary artifact committed inside the project tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalArtifact {
    /// Root-relative path with forward slashes.
    pub path: String,
    pub kind: ArtifactKind,
    pub size_bytes: u64,
    pub referenced: bool,
}

#[derive(Debug, Clone)]
pub struct ProjectLayout {
    pub root_dir: PathBuf,
    pub modules: Vec<ModuleEntry>,
    pub settings_file: Option<PathBuf>,
    /// Root build scripts; always parsed at project scope.
    pub root_build_files: Vec<PathBuf>,
    pub property_files: Vec<PathBuf>,
    pub catalog_files: Vec<PathBuf>,
    pub custom_scripts: Vec<CustomScript>,
    pub local_artifacts: Vec<LocalArtifact>,
}

impl ProjectLayout {
    pub fn module(&self, id: &ModuleId) -> Option<&ModuleEntry> {
        self.modules.iter().find(|m| &m.id == id)
    }
}

/// Renders a path root-relative with forward slashes, for locations and
/// reports. Paths outside the root stay absolute.
pub fn relative_path(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.to_string_lossy().replace('\\', "/")
}

/// Finds the project root: the nearest ancestor-or-self holding a settings
/// file, or failing that, the nearest holding a build file.
pub fn locate_root(start_dir: &Path) -> Result<PathBuf, DiscoveryError> {
    let ancestors: Vec<&Path> = start_dir.ancestors().collect();
    for dir in &ancestors {
        if SETTINGS_NAMES.iter().any(|n| dir.join(n).is_file()) {
            return Ok(dir.to_path_buf());
        }
    }
    for dir in &ancestors {
        if BUILD_NAMES.iter().any(|n| dir.join(n).is_file()) {
            return Ok(dir.to_path_buf());
        }
    }
    Err(DiscoveryError::NotAGradleProject(start_dir.to_path_buf()))
}

/// Parses a settings script into `(module id, optional dir override)` pairs.
/// Overrides are root-relative paths; unparseable override expressions are
/// reported and skipped.
pub fn parse_settings(text: &str, file_rel: &str) -> (Vec<(ModuleId, Option<String>)>, Vec<Diagnostic>) {
    let src = strip_comments(text);
    let mut diagnostics = Vec::new();
    let mut ids: Vec<ModuleId> = Vec::new();
    let mut overrides: BTreeMap<ModuleId, String> = BTreeMap::new();

    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let rest = &src[i..];
        if rest.starts_with("include") && !starts_word(rest, "includeBuild") {
            if let Some(after) = word_tail(rest, "include") {
                let span_end = statement_span(after);
                for id in quoted_strings(&after[..span_end]) {
                    let module = ModuleId::new(&id);
                    if !ids.contains(&module) {
                        ids.push(module);
                    }
                }
                i += "include".len() + span_end;
                continue;
            }
        }
        if rest.starts_with("project") {
            if let Some((module, consumed)) = parse_dir_override(rest, &src, i, file_rel, &mut overrides, &mut diagnostics) {
                let _ = module;
                i += consumed;
                continue;
            }
        }
        i += rest.chars().next().map_or(1, char::len_utf8);
    }

    let list = ids
        .into_iter()
        .map(|id| {
            let over = overrides.get(&id).cloned();
            (id, over)
        })
        .collect();
    (list, diagnostics)
}

fn starts_word(text: &str, word: &str) -> bool {
    text.strip_prefix(word)
        .is_some_and(|r| !r.starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_'))
}

/// Text after `word`, provided `text` begins with it at a word boundary.
fn word_tail<'a>(text: &'a str, word: &str) -> Option<&'a str> {
    starts_word(text, word).then(|| &text[word.len()..])
}

/// Length of the statement starting at `text`: a parenthesized argument list
/// or everything to the end of line.
fn statement_span(text: &str) -> usize {
    let trimmed = text.trim_start();
    if trimmed.starts_with('(') {
        let open = text.len() - trimmed.len();
        if let Some(close) = matching_paren(text, open) {
            return close + 1;
        }
    }
    text.find('\n').unwrap_or(text.len())
}

fn matching_paren(text: &str, open: usize) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut depth = 0;
    let mut quote: Option<u8> = None;
    for (idx, &b) in bytes.iter().enumerate().skip(open) {
        match quote {
            Some(q) => {
                if b == q {
                    quote = None;
                }
            }
            None => match b {
                b'\'' | b'"' => quote = Some(b),
                b'(' => depth += 1,
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(idx);
                    }
                }
                _ => {}
            },
        }
    }
    None
}

fn quoted_strings(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b == b'\'' || b == b'"' {
            if let Some(rel) = text[i + 1..].find(b as char) {
                out.push(text[i + 1..i + 1 + rel].to_string());
                i += rel + 2;
                continue;
            }
        }
        i += 1;
    }
    out
}

/// Handles `project(':x').projectDir = ...`; returns consumed length.
fn parse_dir_override(
    rest: &str,
    src: &str,
    offset: usize,
    file_rel: &str,
    overrides: &mut BTreeMap<ModuleId, String>,
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<(ModuleId, usize)> {
    let after = word_tail(rest, "project")?;
    let after_trim = after.trim_start();
    if !after_trim.starts_with('(') {
        return None;
    }
    let paren_at = rest.len() - after_trim.len();
    let close = matching_paren(rest, paren_at)?;
    let module_text = quoted_strings(&rest[paren_at..close]).into_iter().next()?;
    let module = ModuleId::new(&module_text);

    let tail = rest[close + 1..].trim_start();
    let tail = tail.strip_prefix('.')?.trim_start();
    let tail = word_tail(tail, "projectDir")?;
    let tail = tail.trim_start();
    let tail = tail.strip_prefix('=')?;

    let line_end = tail.find('\n').unwrap_or(tail.len());
    let expr = tail[..line_end].trim();
    let consumed = rest.len() - tail.len() + line_end;

    let parts = quoted_strings(expr);
    if parts.is_empty() {
        diagnostics.push(
            Diagnostic::warning(
                DiagnosticCode::SettingsOverrideIgnored,
                format!("could not understand projectDir override for '{module}': '{expr}'"),
            )
            .at(SourceLocation::new(file_rel, line_of_offset(src, offset))),
        );
        return Some((module, consumed));
    }
    let joined = parts.join("/").replace('\\', "/");
    overrides.insert(module.clone(), joined);
    Some((module, consumed))
}

fn line_of_offset(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Full discovery pass over a directory tree.
pub fn discover_project(start_dir: &Path) -> Result<(ProjectLayout, Vec<Diagnostic>), DiscoveryError> {
    let root = locate_root(start_dir)?;
    let mut diagnostics = Vec::new();

    let settings_file = SETTINGS_NAMES
        .iter()
        .map(|n| root.join(n))
        .find(|p| p.is_file());

    let root_build_files: Vec<PathBuf> = BUILD_NAMES
        .iter()
        .map(|n| root.join(n))
        .filter(|p| p.is_file())
        .collect();

    let mut declared: Vec<(ModuleId, Option<String>)> = Vec::new();
    if let Some(settings_path) = &settings_file {
        let text = fs::read_to_string(settings_path).map_err(|source| DiscoveryError::Io {
            path: settings_path.clone(),
            source,
        })?;
        let (modules, settings_diags) =
            parse_settings(&text, &relative_path(&root, settings_path));
        declared = modules;
        diagnostics.extend(settings_diags);
    }

    let mut modules = Vec::new();
    if declared.is_empty() {
        modules.push(ModuleEntry {
            id: ModuleId::root(),
            dir: root.clone(),
            build_files: root_build_files.clone(),
        });
    } else {
        for (id, dir_override) in declared {
            let dir = match &dir_override {
                Some(rel) => root.join(rel),
                None => root.join(id.default_rel_path()),
            };
            let build_files: Vec<PathBuf> = BUILD_NAMES
                .iter()
                .map(|n| dir.join(n))
                .filter(|p| p.is_file())
                .collect();
            if build_files.len() == 2 {
                diagnostics.push(Diagnostic::warning(
                    DiagnosticCode::MixedDsl,
                    format!("module '{id}' has both a Groovy and a Kotlin build script; both are read"),
                ));
            }
            if build_files.is_empty() {
                diagnostics.push(Diagnostic::warning(
                    DiagnosticCode::MissingBuildFile,
                    format!(
                        "module '{id}' has no build file under '{}'",
                        relative_path(&root, &dir)
                    ),
                ));
            }
            modules.push(ModuleEntry { id, dir, build_files });
        }
    }

    let property_files: Vec<PathBuf> = [root.join("gradle.properties")]
        .into_iter()
        .filter(|p| p.is_file())
        .collect();

    let catalog_files: Vec<PathBuf> = CATALOG_CANDIDATES
        .iter()
        .map(|n| root.join(n))
        .filter(|p| p.is_file())
        .collect();

    let custom_scripts = discover_custom_scripts(&root, &modules, &root_build_files, &mut diagnostics);

    let mut layout = ProjectLayout {
        root_dir: root,
        modules,
        settings_file,
        root_build_files,
        property_files,
        catalog_files,
        custom_scripts,
        local_artifacts: Vec::new(),
    };
    layout.local_artifacts = scan_local_artifacts(&layout, &mut diagnostics);
    Ok((layout, diagnostics))
}

/// Finds shared scripts two ways: well-known base names anywhere under the
/// root, and `apply from:` targets inside build scripts.
pub fn discover_custom_scripts(
    root: &Path,
    modules: &[ModuleEntry],
    root_build_files: &[PathBuf],
    diagnostics: &mut Vec<Diagnostic>,
) -> Vec<CustomScript> {
    let mut scripts: BTreeMap<PathBuf, Vec<ModuleId>> = BTreeMap::new();

    let module_build_files: BTreeSet<&Path> = modules
        .iter()
        .flat_map(|m| m.build_files.iter().map(PathBuf::as_path))
        .collect();

    for entry in WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| !is_skipped_dir(e))
        .filter_map(Result::ok)
    {
        if !entry.file_type().is_file() {
            continue;
        }
        let name = entry.file_name().to_string_lossy();
        if !CUSTOM_SCRIPT_NAMES.contains(&name.as_ref()) {
            continue;
        }
        // Module build scripts can collide with the name list
        // (`dependencies.gradle.kts` vs a module's own build file); the
        // list targets shared scripts, so skip real build files.
        if module_build_files.contains(entry.path()) || root_build_files.contains(&entry.path().to_path_buf()) {
            continue;
        }
        if entry.depth() > 3 {
            diagnostics.push(Diagnostic::info(
                DiagnosticCode::DeepCustomScript,
                format!(
                    "shared script '{}' sits unusually deep in the tree",
                    relative_path(root, entry.path())
                ),
            ));
        }
        scripts.entry(entry.path().to_path_buf()).or_default();
    }

    // apply from: targets, resolved relative to the declaring file.
    let mut apply_sources: Vec<(PathBuf, Option<ModuleId>)> = Vec::new();
    for file in root_build_files {
        apply_sources.push((file.clone(), None));
    }
    for module in modules {
        for file in &module.build_files {
            // Root build files double as the root module's build files.
            if root_build_files.contains(file) {
                continue;
            }
            apply_sources.push((file.clone(), Some(module.id.clone())));
        }
    }
    for path in scripts.keys().cloned().collect::<Vec<_>>() {
        apply_sources.push((path, None));
    }

    for (file, module) in apply_sources {
        let Ok(text) = fs::read_to_string(&file) else {
            diagnostics.push(Diagnostic::warning(
                DiagnosticCode::UnreadablePath,
                format!("could not read '{}'", relative_path(root, &file)),
            ));
            continue;
        };
        let file_rel = relative_path(root, &file);
        for (target, line) in apply_from_targets(&text) {
            let resolved = resolve_apply_target(root, &file, &target);
            match resolved {
                Some(path) => {
                    let entry = scripts.entry(path).or_default();
                    if let Some(id) = &module {
                        if !entry.contains(id) {
                            entry.push(id.clone());
                        }
                    }
                }
                None => diagnostics.push(
                    Diagnostic::warning(
                        DiagnosticCode::MissingApplyTarget,
                        format!("applied script '{target}' does not exist"),
                    )
                    .at(SourceLocation::new(file_rel.clone(), line)),
                ),
            }
        }
    }

    scripts
        .into_iter()
        .map(|(path, applied_by)| CustomScript { path, applied_by })
        .collect()
}

fn is_skipped_dir(entry: &walkdir::DirEntry) -> bool {
    entry.file_type().is_dir()
        && entry
            .file_name()
            .to_str()
            .is_some_and(|n| SKIPPED_DIRS.contains(&n))
}

/// `apply from:` / `apply(from =` targets with their line numbers.
fn apply_from_targets(text: &str) -> Vec<(String, usize)> {
    let src = strip_comments(text);
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(rel) = src[from..].find("apply") {
        let at = from + rel;
        from = at + "apply".len();
        let Some(tail) = word_tail(&src[at..], "apply") else {
            continue;
        };
        let tail = tail.trim_start_matches(['(', ' ', '\t']);
        let Some(tail) = word_tail(tail, "from") else {
            continue;
        };
        let tail = tail.trim_start();
        let Some(tail) = tail.strip_prefix(':').or_else(|| tail.strip_prefix('=')) else {
            continue;
        };
        let line_end = tail.find('\n').unwrap_or(tail.len());
        if let Some(target) = quoted_strings(&tail[..line_end]).into_iter().next() {
            out.push((target, line_of_offset(&src, at)));
        }
    }
    out
}

/// Resolves an `apply from:` path. Root-anchored interpolations resolve
/// against the root; everything else against the declaring file's directory.
fn resolve_apply_target(root: &Path, declaring_file: &Path, target: &str) -> Option<PathBuf> {
    let cleaned = target.replace('\\', "/");
    let root_prefixes = [
        "${rootDir}/",
        "$rootDir/",
        "${project.rootDir}/",
        "$project.rootDir/",
        "${rootProject.projectDir}/",
        "$rootProject.projectDir/",
    ];
    let candidate = if let Some(rest) = root_prefixes.iter().find_map(|p| cleaned.strip_prefix(p)) {
        root.join(rest)
    } else if cleaned.contains('$') {
        return None;
    } else if let Some(rest) = cleaned.strip_prefix('/') {
        // Absolute paths occur in the wild; try them as given.
        PathBuf::from("/").join(rest)
    } else {
        declaring_file.parent()?.join(&cleaned)
    };
    candidate.is_file().then(|| normalize_path(&candidate))
}

/// Lexically folds `.` and `..` segments.
fn normalize_path(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for component in path.components() {
        match component {
            std::path::Component::CurDir => {}
            std::path::Component::ParentDir => {
                out.pop();
            }
            other => out.push(other),
        }
    }
    out
}

/// Inventories `.jar`/`.aar`/`.so` files under every module directory,
/// skipping build outputs. `referenced` starts false and is filled once
/// declarations are known.
pub fn scan_local_artifacts(layout: &ProjectLayout, diagnostics: &mut Vec<Diagnostic>) -> Vec<LocalArtifact> {
    let mut found: BTreeMap<String, LocalArtifact> = BTreeMap::new();
    for module in &layout.modules {
        if !module.dir.is_dir() {
            continue;
        }
        for entry in WalkDir::new(&module.dir)
            .sort_by_file_name()
            .into_iter()
            .filter_entry(|e| !is_skipped_dir(e))
        {
            let entry = match entry {
                Ok(e) => e,
                Err(err) => {
                    diagnostics.push(Diagnostic::warning(
                        DiagnosticCode::UnreadablePath,
                        format!("could not scan part of the tree: {err}"),
                    ));
                    continue;
                }
            };
            if !entry.file_type().is_file() {
                continue;
            }
            let kind = match entry
                .path()
                .extension()
                .and_then(|e| e.to_str())
                .map(|e| e.to_ascii_lowercase())
                .as_deref()
            {
                Some("jar") => ArtifactKind::Jar,
                Some("aar") => ArtifactKind::Aar,
                Some("so") => ArtifactKind::So,
                _ => continue,
            };
            let size_bytes = entry.metadata().map(|m| m.len()).unwrap_or(0);
            let path = relative_path(&layout.root_dir, entry.path());
            found.entry(path.clone()).or_insert(LocalArtifact {
                path,
                kind,
                size_bytes,
                referenced: false,
            });
        }
    }
    found.into_values().collect()
}

/// Marks artifacts matched by a kept `fileTree`/`files` declaration of their
/// own module.
pub fn mark_referenced_artifacts(
    layout: &ProjectLayout,
    artifacts: &mut [LocalArtifact],
    file_trees: &[FileTreeRef],
) {
    // Longest module dir wins for nested module directories.
    let mut module_dirs: Vec<(&ModuleId, String)> = layout
        .modules
        .iter()
        .map(|m| (&m.id, relative_path(&layout.root_dir, &m.dir)))
        .collect();
    module_dirs.sort_by_key(|(_, dir)| std::cmp::Reverse(dir.len()));

    for artifact in artifacts.iter_mut() {
        let owner = module_dirs.iter().find(|(_, dir)| {
            dir.is_empty()
                || dir == "."
                || artifact.path.strip_prefix(dir.as_str()).is_some_and(|r| r.starts_with('/'))
        });
        let Some((module_id, dir)) = owner else {
            continue;
        };
        let module_rel = if dir.is_empty() || dir == "." {
            artifact.path.as_str()
        } else {
            &artifact.path[dir.len() + 1..]
        };
        artifact.referenced = file_trees
            .iter()
            .any(|tree| tree.origin_module == **module_id && tree.matches(module_rel));
    }
}
