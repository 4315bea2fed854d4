//! Variable-binding extraction from build scripts and helper files.
//!
//! Version and coordinate variables reach build scripts through several
//! syntaxes, all captured here into flat dotted keys:
//!
//! * `ext.anko_version = '0.10.0'` → `anko_version`
//! * `ext { playServicesVersion = '17.0.0' }` → `playServicesVersion`
//! * `ext.versions = [play: '11.6.2']` → `versions.play`
//! * `ext { libVersions = [android: [espresso: '3.0.2']] }`
//!   → `libVersions.android.espresso`
//! * `def support_lib_version = '28.0.0'`, `val coreKtx = "1.7.0"`
//! * `extra["nav_version"] = "2.5.3"` (Kotlin DSL)
//! * `object Versions { const val core = "1.0.0" }` in helper `.kt` files
//!   → `Versions.core`
//!
//! Map keys may themselves be quoted coordinate text (`'g:a'`), so key
//! segments are joined verbatim; lookups use the exact joined string.

use crate::model::{ModuleId, SourceLocation};

use super::scanner::{
    find_blocks, line_of, match_delimiter, split_top_level, strip_comments, tokenize_string_expr,
};
use super::{BindingValue, Dialect};

/// Which environment layer a binding belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BindingScope {
    /// Project-wide: root build script, property files, helper scripts.
    Project,
    /// Script of one module; shadows project bindings for that module.
    Module(ModuleId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawBinding {
    pub key: String,
    pub value: BindingValue,
    pub scope: BindingScope,
    pub location: SourceLocation,
}

/// Extracts every recognizable variable binding from one script.
pub fn extract_bindings(
    script_text: &str,
    dialect: Dialect,
    scope: &BindingScope,
    file_rel: &str,
) -> Vec<RawBinding> {
    let src = strip_comments(script_text);
    let mut bindings = Vec::new();

    // Kotlin `object` bodies are scanned separately with dotted keys; mask
    // them out of the flat pass so their members are not captured twice.
    let flat_view = if dialect == Dialect::Kts { mask_object_bodies(&src) } else { src.clone() };
    scan_assignments(&src, &flat_view, 0, scope, file_rel, "", &mut bindings, false);

    // `ext { ... }` blocks: bare assignments inside are ext properties.
    for block in find_blocks(&src, "ext") {
        scan_assignments(
            &src,
            block.body,
            block.body_offset,
            scope,
            file_rel,
            "",
            &mut bindings,
            true,
        );
    }

    if dialect == Dialect::Kts {
        scan_kotlin_objects(&src, &src, 0, scope, file_rel, "", &mut bindings);
    }

    bindings
}

/// Blanks the bodies of top-level `object` declarations, newlines preserved.
fn mask_object_bodies(src: &str) -> String {
    let mut masked = src.as_bytes().to_vec();
    let mut search = 0;
    while let Some(rel) = src[search..].find("object ") {
        let at = search + rel;
        search = at + "object ".len();
        if at > 0 {
            let before = src.as_bytes()[at - 1];
            if before.is_ascii_alphanumeric() || before == b'_' {
                continue;
            }
        }
        let Some(brace_rel) = src[at..].find('{') else { continue };
        let brace = at + brace_rel;
        let Some(close) = match_delimiter(src, brace) else { continue };
        for b in &mut masked[brace + 1..close] {
            if *b != b'\n' {
                *b = b' ';
            }
        }
        search = close + 1;
    }
    String::from_utf8_lossy(&masked).into_owned()
}

/// Java-properties flavor used by `gradle.properties`: `key=value` lines,
/// `#`/`!` comments. Values are plain literals.
pub fn parse_properties(text: &str, scope: &BindingScope, file_rel: &str) -> Vec<RawBinding> {
    let mut bindings = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('!') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else { continue };
        let key = key.trim();
        if key.is_empty() {
            continue;
        }
        bindings.push(RawBinding {
            key: key.to_string(),
            value: BindingValue::Literal(value.trim().to_string()),
            scope: scope.clone(),
            location: SourceLocation::new(file_rel, idx + 1),
        });
    }
    bindings
}

/// Assignment prefixes that mark a binding at statement level.
/// `bare_allowed` additionally accepts `name = value` with no prefix (inside
/// `ext { }` blocks).
#[allow(clippy::too_many_arguments)]
fn scan_assignments(
    src: &str,
    body: &str,
    body_offset: usize,
    scope: &BindingScope,
    file_rel: &str,
    key_prefix: &str,
    bindings: &mut Vec<RawBinding>,
    bare_allowed: bool,
) {
    let bytes = body.as_bytes();
    let mut i = 0;

    while i < bytes.len() {
        // Start-of-line scanning: assignments begin a statement.
        let line_start = i;
        let mut j = line_start;
        while j < bytes.len() && (bytes[j] == b' ' || bytes[j] == b'\t') {
            j += 1;
        }

        let rest = &body[j..];
        if let Some((key, value_text, consumed)) = parse_assignment_at(rest, bare_allowed) {
            let line = line_of(src, body_offset + j);
            record_value(key_prefix, &key, value_text, scope, file_rel, line, bindings);
            i = j + consumed;
        } else {
            i = j;
        }

        // Advance to the next line (or past the value if it spanned lines).
        match body[i..].find('\n') {
            Some(rel) => i += rel + 1,
            None => break,
        }
    }
}

/// Tries to parse one assignment starting exactly at `rest`. Returns the
/// dotted key, the raw value text and how many bytes were consumed.
fn parse_assignment_at<'a>(
    rest: &'a str,
    bare_allowed: bool,
) -> Option<(String, &'a str, usize)> {
    let after_intro;

    if let Some(r) = rest.strip_prefix("ext.") {
        after_intro = r;
    } else if let Some(r) = rest.strip_prefix("rootProject.ext.") {
        after_intro = r;
    } else if let Some(r) = rest.strip_prefix("project.ext.") {
        after_intro = r;
    } else if let Some(r) = strip_keyword(rest, "def")
        .or_else(|| strip_keyword(rest, "val"))
        .or_else(|| strip_keyword(rest, "var"))
        .or_else(|| strip_keyword(rest, "const val"))
    {
        after_intro = r;
    } else if let Some(r) = rest.strip_prefix("extra[") {
        // extra["name"] = value
        let close = rest.find(']')?;
        let key = r[..close - "extra[".len()].trim().trim_matches(|c| c == '\'' || c == '"');
        let after = rest[close + 1..].trim_start();
        let value_text = after.strip_prefix('=')?.trim_start();
        let (value, consumed_in_value) = capture_value(value_text)?;
        let consumed = rest.len() - value_text.len() + consumed_in_value;
        return Some((key.to_string(), value, consumed));
    } else if bare_allowed {
        after_intro = rest;
    } else {
        return None;
    }

    let mut chars = after_intro.char_indices();
    let mut key_end = 0;
    for (idx, c) in chars.by_ref() {
        if c.is_ascii_alphanumeric() || c == '_' {
            key_end = idx + c.len_utf8();
        } else {
            break;
        }
    }
    if key_end == 0 {
        return None;
    }
    let key = &after_intro[..key_end];
    if matches!(key, "if" | "else" | "return" | "for" | "while" | "fun" | "object" | "class") {
        return None;
    }

    // Kotlin type annotation: `val x: String = ...`
    let mut after_key = after_intro[key_end..].trim_start();
    if let Some(stripped) = after_key.strip_prefix(':') {
        let eq = stripped.find('=')?;
        after_key = stripped[eq..].trim_start();
    }

    let value_text = after_key.strip_prefix('=')?;
    // `==` is a comparison, not an assignment.
    if value_text.starts_with('=') {
        return None;
    }
    let value_text = value_text.trim_start();
    let (value, consumed_in_value) = capture_value(value_text)?;
    let consumed = rest.len() - value_text.len() + consumed_in_value;
    Some((key.to_string(), value, consumed))
}

fn strip_keyword<'a>(rest: &'a str, kw: &str) -> Option<&'a str> {
    let r = rest.strip_prefix(kw)?;
    if r.starts_with(' ') || r.starts_with('\t') {
        Some(r.trim_start())
    } else {
        None
    }
}

/// Captures a value expression: balanced across newlines for `[...]` map
/// literals, to end of line otherwise.
fn capture_value(text: &str) -> Option<(&str, usize)> {
    if text.is_empty() {
        return None;
    }
    if text.starts_with('[') {
        let close = match_delimiter(text, 0)?;
        return Some((&text[..close + 1], close + 1));
    }
    let end = text.find('\n').unwrap_or(text.len());
    let value = text[..end].trim_end();
    if value.is_empty() {
        return None;
    }
    Some((&text[..value.len()], end))
}

/// Converts one captured value into bindings: map literals flatten
/// recursively, everything else tokenizes into a single value.
fn record_value(
    key_prefix: &str,
    key: &str,
    value_text: &str,
    scope: &BindingScope,
    file_rel: &str,
    line: usize,
    bindings: &mut Vec<RawBinding>,
) {
    let full_key = if key_prefix.is_empty() {
        key.to_string()
    } else {
        format!("{key_prefix}.{key}")
    };
    let v = value_text.trim();

    if v.starts_with('[') {
        let inner = &v[1..v.len() - 1];
        if !looks_like_map(inner) {
            // A list literal; not variable material.
            return;
        }
        for entry in split_top_level(inner, b',') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let Some((map_key, map_value)) = split_map_entry(entry) else { continue };
            record_value(&full_key, map_key, map_value, scope, file_rel, line, bindings);
        }
        return;
    }

    let value = BindingValue::from_pieces(tokenize_string_expr(v));
    // A lone reference to nothing (e.g. numeric literals tokenize oddly) is
    // still stored; resolution decides what it means.
    bindings.push(RawBinding {
        key: full_key,
        value: normalize_scalar(value, v),
        scope: scope.clone(),
        location: SourceLocation::new(file_rel, line),
    });
}

/// Numbers and booleans are literals of their source text, not references.
fn normalize_scalar(value: BindingValue, source: &str) -> BindingValue {
    let s = source.trim();
    let scalar = s.chars().all(|c| c.is_ascii_digit() || c == '.')
        || s == "true"
        || s == "false";
    if scalar {
        BindingValue::Literal(s.to_string())
    } else {
        value
    }
}

/// True when a bracket literal is a map (`[k: v, ...]`) rather than a list.
fn looks_like_map(inner: &str) -> bool {
    split_top_level(inner, b',')
        .first()
        .map(|first| split_map_entry(first.trim()).is_some())
        .unwrap_or(false)
}

/// Splits `key: value` where the key may be bare or quoted (quoted keys may
/// contain `:` and `.`, e.g. `'com.android.support:design'`).
fn split_map_entry(entry: &str) -> Option<(&str, &str)> {
    let e = entry.trim();
    if e.is_empty() {
        return None;
    }
    let (key_end, colon_at) = if e.starts_with('\'') || e.starts_with('"') {
        let q = e.as_bytes()[0];
        let close = e[1..].find(q as char)? + 1;
        let after = e[close + 1..].find(':')? + close + 1;
        (close + 1, after)
    } else {
        let colon = e.find(':')?;
        (colon, colon)
    };
    let key = e[..key_end].trim().trim_matches(|c| c == '\'' || c == '"');
    if key.is_empty() {
        return None;
    }
    let value = e[colon_at + 1..].trim();
    if value.is_empty() {
        return None;
    }
    Some((key, value))
}

/// Kotlin helper files: `object Versions { const val core = "1.0.0" }`,
/// possibly nested. Keys join object names with dots.
#[allow(clippy::too_many_arguments)]
fn scan_kotlin_objects(
    src: &str,
    body: &str,
    body_offset: usize,
    scope: &BindingScope,
    file_rel: &str,
    key_prefix: &str,
    bindings: &mut Vec<RawBinding>,
) {
    let mut search = 0;
    while let Some(rel) = body[search..].find("object ") {
        let at = search + rel;
        search = at + "object ".len();
        if at > 0 {
            let before = body.as_bytes()[at - 1];
            if before.is_ascii_alphanumeric() || before == b'_' {
                continue;
            }
        }
        let after = &body[at + "object ".len()..];
        let name_len = after
            .char_indices()
            .take_while(|(_, c)| c.is_ascii_alphanumeric() || *c == '_')
            .map(|(i, c)| i + c.len_utf8())
            .last()
            .unwrap_or(0);
        if name_len == 0 {
            continue;
        }
        let name = &after[..name_len];
        let brace_rel = match after[name_len..].find('{') {
            Some(r) if after[name_len..name_len + r].trim().is_empty() => name_len + r,
            _ => continue,
        };
        let brace_abs = at + "object ".len() + brace_rel;
        let Some(close) = match_delimiter(body, brace_abs) else { continue };

        let nested_prefix = if key_prefix.is_empty() {
            name.to_string()
        } else {
            format!("{key_prefix}.{name}")
        };
        let inner = &body[brace_abs + 1..close];
        let inner_offset = body_offset + brace_abs + 1;
        scan_assignments(
            src,
            inner,
            inner_offset,
            scope,
            file_rel,
            &nested_prefix,
            bindings,
            false,
        );
        scan_kotlin_objects(src, inner, inner_offset, scope, file_rel, &nested_prefix, bindings);
        search = close + 1;
    }
}
