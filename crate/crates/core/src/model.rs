//! Shared vocabulary types: coordinates, module ids, diagnostics.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::version::compare_versions;

// ─── Module identity ────────────────────────────────────────────────────────

/// Gradle-style module path, always normalized to a leading colon (`:app`,
/// `:core:ui`). The root project itself is `:`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModuleId(String);

impl ModuleId {
    pub fn new(path: &str) -> Self {
        let trimmed = path.trim();
        if trimmed.is_empty() || trimmed == ":" {
            return ModuleId(":".to_string());
        }
        let mut normalized = String::new();
        if !trimmed.starts_with(':') {
            normalized.push(':');
        }
        normalized.push_str(trimmed.trim_end_matches(':'));
        ModuleId(normalized)
    }

    pub fn root() -> Self {
        ModuleId(":".to_string())
    }

    pub fn is_root(&self) -> bool {
        self.0 == ":"
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Default directory for the module relative to the project root:
    /// `:pages:madani` lives in `pages/madani`.
    pub fn default_rel_path(&self) -> String {
        self.0.trim_start_matches(':').replace(':', "/")
    }
}

impl fmt::Display for ModuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

// ─── Source locations and diagnostics ───────────────────────────────────────

/// Position of a parsed construct. `file` is relative to the project root and
/// always uses forward slashes so reports are stable across platforms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceLocation {
    pub file: String,
    pub line: usize,
}

impl SourceLocation {
    pub fn new(file: impl Into<String>, line: usize) -> Self {
        SourceLocation { file: file.into(), line }
    }
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.line)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Severity {
    Info,
    Warning,
    Error,
}

/// Closed set of diagnostic codes. Consumers may match on these; adding a
/// code is a report-format change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiagnosticCode {
    /// A module carries both a Groovy and a Kotlin DSL build file.
    MixedDsl,
    /// More than one module applies an application plugin.
    MultiApk,
    /// A variable reference could not be resolved in any environment layer.
    UnresolvedVar,
    /// A version survived extraction in dynamic form (`1.1.+`, ranges, ...).
    AmbiguousVersion,
    /// A coordinate has no version and no BOM supplied one.
    MissingVersion,
    /// Text in a dependency position did not parse as a coordinate.
    MalformedCoordinate,
    /// A statement inside a dependencies block had no recognizable shape.
    MalformedDeclaration,
    /// The module graph contains a cycle; order was forced deterministically.
    Cycle,
    /// A `project(...)` reference points at a module the settings never declared.
    DanglingModuleRef,
    /// A declared module directory has no build file.
    MissingBuildFile,
    /// A configuration keyword matched no table entry and no variant rule.
    UnknownKeyword,
    /// The same key was bound twice in one environment layer; last wins.
    DuplicateBinding,
    /// A `libs.` reference names no catalog entry.
    UnknownCatalogAlias,
    /// The version catalog failed to parse or an entry was unusable.
    CatalogError,
    /// A catalog `version.ref` names no `[versions]` entry.
    DanglingVersionRef,
    /// A catalog bundle lists an alias that no `[libraries]` entry defines.
    DanglingBundleMember,
    /// An `apply from:` target does not exist on disk.
    MissingApplyTarget,
    /// A known helper script was found unusually deep in the tree.
    DeepCustomScript,
    /// A file or directory could not be read while scanning.
    UnreadablePath,
    /// A declaration was kept because its variant prefix is selected.
    VariantKept,
    /// A declaration sits inside a conditional block; it was taken anyway.
    ConditionalDeclaration,
    /// A resolutionStrategy/force override was seen but not applied.
    ForceDetected,
    /// A settings.gradle projectDir override could not be parsed.
    SettingsOverrideIgnored,
    /// IDE metadata offered several conflicting versions for one artifact.
    ImlConflict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagnosticCode,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub location: Option<SourceLocation>,
}

impl Diagnostic {
    pub fn info(code: DiagnosticCode, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Info, code, message: message.into(), location: None }
    }

    pub fn warning(code: DiagnosticCode, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, code, message: message.into(), location: None }
    }

    pub fn error(code: DiagnosticCode, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, code, message: message.into(), location: None }
    }

    pub fn at(mut self, location: SourceLocation) -> Self {
        self.location = Some(location);
        self
    }

    pub fn at_opt(mut self, location: Option<SourceLocation>) -> Self {
        self.location = location;
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Some(loc) => write!(f, "{:?} {:?} at {}: {}", self.severity, self.code, loc, self.message),
            None => write!(f, "{:?} {:?}: {}", self.severity, self.code, self.message),
        }
    }
}

// ─── Coordinates ────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CoordinateStatus {
    /// Concrete version straight from the build sources.
    Resolved,
    /// Version present but dynamic (`+`, `latest.`, range syntax).
    Ambiguous,
    /// Version absent or still containing an unexpanded variable.
    Unresolved,
    /// Version supplied by a platform/BOM declaration of the same group.
    BomDerived,
    /// Version recovered from IDE module metadata (`.iml`).
    ImlRecovered,
}

impl CoordinateStatus {
    /// True when the version is a usable concrete string.
    pub fn is_concrete(self) -> bool {
        matches!(
            self,
            CoordinateStatus::Resolved | CoordinateStatus::BomDerived | CoordinateStatus::ImlRecovered
        )
    }
}

/// A Maven-style library coordinate as reconstructed from build sources.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coordinate {
    pub group: String,
    pub artifact: String,
    pub version: Option<String>,
    pub status: CoordinateStatus,
    /// Classifier or `@type` suffix (`aar` in `g:a:v@aar`), when present.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classifier: Option<String>,
}

impl Coordinate {
    /// Identity used for deduplication: exact `(group, artifact, version)`.
    /// Status and classifier deliberately do not participate.
    pub fn identity(&self) -> (&str, &str, Option<&str>) {
        (&self.group, &self.artifact, self.version.as_deref())
    }

    /// Canonical `group:artifact:version` text (`group:artifact` when the
    /// version is absent).
    pub fn text(&self) -> String {
        match &self.version {
            Some(v) => format!("{}:{}:{}", self.group, self.artifact, v),
            None => format!("{}:{}", self.group, self.artifact),
        }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoordinateError {
    #[error("coordinate {0:?} has fewer than two segments")]
    TooFewSegments(String),
    #[error("coordinate {0:?} has more than four segments")]
    TooManySegments(String),
    #[error("coordinate {0:?} contains an empty segment")]
    EmptySegment(String),
    #[error("coordinate {0:?} still contains an unexpanded variable in its group or artifact")]
    UnexpandedInterpolation(String),
    #[error("coordinate {0:?} contains whitespace inside a segment")]
    EmbeddedWhitespace(String),
}

/// Markers that make a version dynamic rather than concrete.
fn is_dynamic_version(version: &str) -> bool {
    version.contains('+')
        || version.contains("latest.")
        || version.contains('[')
        || version.contains('(')
}

/// Status a version string earns on its own: absent or variable-bearing is
/// unresolved, dynamic syntax is ambiguous, anything else is resolved.
pub fn classify_version(version: Option<&str>) -> CoordinateStatus {
    match version {
        None => CoordinateStatus::Unresolved,
        Some(v) if v.contains('$') => CoordinateStatus::Unresolved,
        Some(v) if is_dynamic_version(v) => CoordinateStatus::Ambiguous,
        Some(_) => CoordinateStatus::Resolved,
    }
}

/// Strips one layer of matching quotes, if any.
fn unquote(text: &str) -> &str {
    let t = text.trim();
    for q in ['\'', '"'] {
        if t.len() >= 2 && t.starts_with(q) && t.ends_with(q) {
            return &t[1..t.len() - 1];
        }
    }
    t
}

/// Parses colon-joined coordinate text into a [`Coordinate`].
///
/// Accepts two segments (`group:artifact`, version unresolved), three
/// (`group:artifact:version`) or four (trailing classifier), plus an optional
/// `@type` suffix. The status is derived from the version: absent or still
/// variable-bearing means [`CoordinateStatus::Unresolved`], dynamic syntax
/// means [`CoordinateStatus::Ambiguous`], anything else is resolved.
///
/// Group and artifact are guaranteed free of `$`, whitespace and emptiness;
/// text that cannot honor that is rejected rather than half-parsed.
pub fn parse_coordinate(text: &str) -> Result<Coordinate, CoordinateError> {
    let raw = unquote(text).trim();
    let original = || text.trim().to_string();

    // Split off an @type suffix first: "g:a:1.0.0@aar".
    let (body, type_suffix) = match raw.rsplit_once('@') {
        Some((body, suffix)) if !suffix.is_empty() && !suffix.contains(':') && !body.is_empty() => {
            (body, Some(suffix.to_string()))
        }
        _ => (raw, None),
    };

    let segments: Vec<&str> = body.split(':').map(str::trim).collect();
    if segments.len() < 2 {
        return Err(CoordinateError::TooFewSegments(original()));
    }
    if segments.len() > 4 {
        return Err(CoordinateError::TooManySegments(original()));
    }
    if segments.iter().any(|s| s.is_empty()) {
        return Err(CoordinateError::EmptySegment(original()));
    }

    let group = segments[0];
    let artifact = segments[1];
    for id_part in [group, artifact] {
        if id_part.contains('$') {
            return Err(CoordinateError::UnexpandedInterpolation(original()));
        }
        if id_part.chars().any(char::is_whitespace) {
            return Err(CoordinateError::EmbeddedWhitespace(original()));
        }
    }

    let version = segments.get(2).map(|s| s.to_string());
    let classifier = match (segments.get(3), type_suffix) {
        (Some(c), Some(t)) => Some(format!("{c}@{t}")),
        (Some(c), None) => Some(c.to_string()),
        (None, t) => t,
    };

    let status = classify_version(version.as_deref());

    Ok(Coordinate {
        group: group.to_string(),
        artifact: artifact.to_string(),
        version,
        status,
        classifier,
    })
}
