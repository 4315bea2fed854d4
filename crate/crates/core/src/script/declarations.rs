//! Extraction of dependency declarations from `dependencies { ... }` blocks.
//!
//! The scanner walks statements inside every dependencies block (buildscript
//! blocks excluded: their classpath entries configure the build, not the
//! APK), reads the leading configuration keyword and classifies the payload
//! into one of a small set of shapes. Conditionals are descended into and
//! their declarations taken unconditionally, with a diagnostic recording the
//! approximation. Payload text keeps its source spelling; interpolation is
//! resolved later against the variable environment.

use crate::model::{Diagnostic, DiagnosticCode, ModuleId, SourceLocation};

use super::scanner::{
    find_blocks, line_of, match_delimiter, read_path, split_top_level, strip_comments,
};
use super::Dialect;

/// Shape of one declaration payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    /// Coordinate-valued expression in source spelling; may contain
    /// interpolation and concatenation, resolved later.
    CoordinateText(String),
    /// Reference to another module of this project.
    ModuleRef(ModuleId),
    /// Local file collection (`fileTree`, `files`).
    FileTree { dir: String, patterns: Vec<String> },
    /// Version-catalog accessor (`libs.foo.bar`), dotted alias path.
    CatalogRef { alias: String, bundle: bool },
    /// `platform(...)` / `enforcedPlatform(...)` wrapper around a payload.
    PlatformBom(Box<Payload>),
    /// Several payloads declared in one statement. Always two or more.
    Multi(Vec<Payload>),
}

impl Payload {
    /// Source-faithful text for reports and excluded-item entries.
    pub fn display_text(&self) -> String {
        match self {
            Payload::CoordinateText(raw) => {
                raw.trim().trim_matches(|c| c == '\'' || c == '"').to_string()
            }
            Payload::ModuleRef(id) => format!("project('{id}')"),
            Payload::FileTree { dir, .. } => format!("fileTree('{dir}')"),
            Payload::CatalogRef { alias, bundle } => {
                if *bundle {
                    format!("libs.bundles.{alias}")
                } else {
                    format!("libs.{alias}")
                }
            }
            Payload::PlatformBom(inner) => format!("platform({})", inner.display_text()),
            Payload::Multi(items) => items
                .iter()
                .map(Payload::display_text)
                .collect::<Vec<_>>()
                .join(", "),
        }
    }
}

/// One parsed dependency declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclarationRecord {
    pub keyword: String,
    pub payload: Payload,
    pub origin_module: ModuleId,
    pub location: SourceLocation,
}

/// Parses every dependency declaration in one build script.
///
/// Never fails: unreadable statements become diagnostics, not errors, and an
/// empty or garbage input simply yields no records.
pub fn extract_declarations(
    script_text: &str,
    _dialect: Dialect,
    origin_module: &ModuleId,
    file_rel: &str,
) -> (Vec<DeclarationRecord>, Vec<Diagnostic>) {
    let src = strip_comments(script_text);
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();

    // Spans of buildscript blocks, so their dependencies are skipped.
    let buildscript_spans: Vec<(usize, usize)> = find_blocks(&src, "buildscript")
        .iter()
        .map(|b| (b.body_offset, b.body_offset + b.body.len()))
        .collect();

    for block in find_blocks(&src, "dependencies") {
        let inside_buildscript = buildscript_spans
            .iter()
            .any(|&(start, end)| block.name_offset >= start && block.name_offset < end);
        if inside_buildscript {
            continue;
        }
        scan_statements(
            &src,
            block.body,
            block.body_offset,
            origin_module,
            file_rel,
            &mut records,
            &mut diagnostics,
        );
    }

    detect_force_overrides(&src, file_rel, &mut diagnostics);

    (records, diagnostics)
}

/// Walks the statements of a dependencies-block body (or of a nested
/// conditional arm). `body_offset` is the body's position in `src` for line
/// mapping.
fn scan_statements(
    src: &str,
    body: &str,
    body_offset: usize,
    origin_module: &ModuleId,
    file_rel: &str,
    records: &mut Vec<DeclarationRecord>,
    diagnostics: &mut Vec<Diagnostic>,
) {
    let bytes = body.as_bytes();
    let mut i = 0;

    while i < bytes.len() {
        while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b';') {
            i += 1;
        }
        if i >= bytes.len() {
            break;
        }

        let word_start = i;
        if !(bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
            // Not a statement start we understand; resynchronize at the next
            // line.
            i = next_line(body, i);
            continue;
        }
        while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
            i += 1;
        }
        let word = &body[word_start..i];
        let word_line = line_of(src, body_offset + word_start);

        match word {
            "if" | "else" => {
                if word == "if" {
                    diagnostics.push(
                        Diagnostic::info(
                            DiagnosticCode::ConditionalDeclaration,
                            "declarations inside this conditional are extracted unconditionally",
                        )
                        .at(SourceLocation::new(file_rel, word_line)),
                    );
                }
                i = skip_spaces(bytes, i);
                // else-if: consume the "if" and fall through to its condition.
                if word == "else" && body[i..].starts_with("if") {
                    i += 2;
                    i = skip_spaces(bytes, i);
                }
                if i < bytes.len() && bytes[i] == b'(' {
                    match match_delimiter(body, i) {
                        Some(close) => i = close + 1,
                        None => break,
                    }
                }
                i = skip_spaces(bytes, i);
                if i < bytes.len() && bytes[i] == b'{' {
                    match match_delimiter(body, i) {
                        Some(close) => {
                            scan_statements(
                                src,
                                &body[i + 1..close],
                                body_offset + i + 1,
                                origin_module,
                                file_rel,
                                records,
                                diagnostics,
                            );
                            i = close + 1;
                        }
                        None => break,
                    }
                }
                // Braceless arm: the next statement parses normally.
                continue;
            }
            "constraints" => {
                i = skip_spaces(bytes, i);
                if i < bytes.len() && bytes[i] == b'{' {
                    match match_delimiter(body, i) {
                        Some(close) => i = close + 1,
                        None => break,
                    }
                }
                continue;
            }
            _ => {}
        }

        // Configuration keyword followed by a payload.
        i = skip_spaces(bytes, i);
        let payload_text: String;
        if i < bytes.len() && bytes[i] == b'(' {
            match match_delimiter(body, i) {
                Some(close) => {
                    payload_text = body[i + 1..close].to_string();
                    i = close + 1;
                }
                None => break,
            }
        } else if i < bytes.len() && bytes[i] == b'{' {
            // `keyword { ... }` with no payload: a nested block we do not
            // model (e.g. a scoped helper). Step over it.
            match match_delimiter(body, i) {
                Some(close) => {
                    i = close + 1;
                    continue;
                }
                None => break,
            }
        } else {
            let (text, end) = capture_until_statement_end(body, i);
            payload_text = text;
            i = end;
        }

        // Optional trailing configuration closure: implementation('x') { ... }
        i = skip_spaces(bytes, i);
        if i < bytes.len() && bytes[i] == b'{' {
            match match_delimiter(body, i) {
                Some(close) => i = close + 1,
                None => break,
            }
        }

        let trimmed = payload_text.trim();
        if trimmed.is_empty() {
            continue;
        }
        match classify_payload(trimmed) {
            Some(payload) => records.push(DeclarationRecord {
                keyword: word.to_string(),
                payload,
                origin_module: origin_module.clone(),
                location: SourceLocation::new(file_rel, word_line),
            }),
            None => diagnostics.push(
                Diagnostic::warning(
                    DiagnosticCode::MalformedDeclaration,
                    format!("unrecognized dependency payload: {trimmed:?}"),
                )
                .at(SourceLocation::new(file_rel, word_line)),
            ),
        }
    }
}

fn skip_spaces(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && (bytes[i] == b' ' || bytes[i] == b'\t') {
        i += 1;
    }
    i
}

fn next_line(body: &str, i: usize) -> usize {
    match body[i..].find('\n') {
        Some(rel) => i + rel + 1,
        None => body.len(),
    }
}

/// Captures a space-form payload (`compile 'g:a:v', 'g2:b:w'`), continuing
/// across newlines while a delimiter is open or the previous line ends in a
/// continuation character.
fn capture_until_statement_end(body: &str, start: usize) -> (String, usize) {
    let bytes = body.as_bytes();
    let mut depth = 0i32;
    let mut quote: Option<u8> = None;
    let mut i = start;
    let mut last_significant: u8 = 0;

    while i < bytes.len() {
        let b = bytes[i];
        match quote {
            Some(q) => {
                if b == b'\\' {
                    i += 2;
                    continue;
                }
                if b == q {
                    quote = None;
                    last_significant = b;
                }
            }
            None => match b {
                b'\'' | b'"' => {
                    quote = Some(b);
                    last_significant = b;
                }
                b'(' | b'[' => {
                    depth += 1;
                    last_significant = b;
                }
                b')' | b']' => {
                    depth -= 1;
                    last_significant = b;
                }
                b';' if depth == 0 => {
                    return (body[start..i].to_string(), i + 1);
                }
                b'{' if depth == 0 => {
                    // Trailing closure starts; payload ends here.
                    return (body[start..i].to_string(), i);
                }
                b'}' if depth == 0 => {
                    return (body[start..i].to_string(), i);
                }
                b'\n' => {
                    let continues = depth > 0
                        || matches!(last_significant, b',' | b'+' | b':' | b'=' | b'\\');
                    if !continues {
                        return (body[start..i].to_string(), i + 1);
                    }
                }
                _ => {
                    if !b.is_ascii_whitespace() {
                        last_significant = b;
                    }
                }
            },
        }
        i += 1;
    }
    (body[start..i].to_string(), i)
}

/// Named-argument keys that identify map-notation coordinates.
const MAP_KEYS: [&str; 6] = ["group", "name", "version", "module", "classifier", "ext"];

/// Classifies one payload expression. `None` means no recognizable shape.
fn classify_payload(text: &str) -> Option<Payload> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }

    let parts = split_top_level(t, b',');
    if parts.len() > 1 {
        if let Some(coordinate) = try_map_notation(&parts) {
            return Some(Payload::CoordinateText(coordinate));
        }
        let mut items = Vec::new();
        for part in &parts {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            items.push(classify_single(part)?);
        }
        return match items.len() {
            0 => None,
            1 => items.pop(),
            _ => Some(Payload::Multi(items)),
        };
    }

    classify_single(t)
}

fn classify_single(part: &str) -> Option<Payload> {
    let p = part.trim();
    if p.is_empty() {
        return None;
    }

    for wrapper in ["platform", "enforcedPlatform"] {
        if let Some(inner) = call_argument(p, wrapper) {
            return classify_payload(&inner).map(|payload| Payload::PlatformBom(Box::new(payload)));
        }
    }

    if let Some(args) = call_argument(p, "project") {
        let path = first_quoted(&args)?;
        return Some(Payload::ModuleRef(ModuleId::new(&path)));
    }

    if p.starts_with("projects.") {
        let (path, end) = read_path(p, 0)?;
        if !p[end..].trim().is_empty() {
            return None;
        }
        let module_path: String = path.split('.').skip(1).collect::<Vec<_>>().join(":");
        return Some(Payload::ModuleRef(ModuleId::new(&module_path)));
    }

    if let Some(args) = call_argument(p, "fileTree") {
        return Some(parse_file_tree(&args));
    }

    if let Some(args) = call_argument(p, "files") {
        let mut trees: Vec<Payload> = split_top_level(&args, b',')
            .iter()
            .filter_map(|a| first_quoted(a.trim()))
            .map(|path| Payload::FileTree { dir: path, patterns: Vec::new() })
            .collect();
        return match trees.len() {
            0 => None,
            1 => trees.pop(),
            _ => Some(Payload::Multi(trees)),
        };
    }

    if p.starts_with("libs.") {
        let (path, end) = read_path(p, 0)?;
        if !p[end..].trim().is_empty() {
            return None;
        }
        let rest = path.strip_prefix("libs.")?;
        return match rest.strip_prefix("bundles.") {
            Some(bundle) => Some(Payload::CatalogRef { alias: bundle.to_string(), bundle: true }),
            None => Some(Payload::CatalogRef { alias: rest.to_string(), bundle: false }),
        };
    }

    let starts_quoted = p.starts_with('\'') || p.starts_with('"');
    if starts_quoted {
        return Some(Payload::CoordinateText(p.to_string()));
    }

    // Bare identifier path: a helper-script object (deps.kotlin.stdlib.jdk8)
    // or a plain variable holding coordinate text.
    if let Some((_, end)) = read_path(p, 0) {
        let rest = p[end..].trim();
        if rest.is_empty() || rest.starts_with('+') {
            return Some(Payload::CoordinateText(p.to_string()));
        }
    }

    None
}

/// `name(args)` → `Some(args)` when `p` is exactly one call of `name`.
fn call_argument(p: &str, name: &str) -> Option<String> {
    let rest = p.strip_prefix(name)?;
    let rest_trim = rest.trim_start();
    if !rest_trim.starts_with('(') {
        return None;
    }
    let open = p.len() - rest_trim.len();
    let close = match_delimiter(p, open)?;
    if !p[close + 1..].trim().is_empty() {
        return None;
    }
    Some(p[open + 1..close].to_string())
}

fn first_quoted(text: &str) -> Option<String> {
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'\'' || bytes[i] == b'"' {
            let q = bytes[i];
            let mut j = i + 1;
            while j < bytes.len() && bytes[j] != q {
                if bytes[j] == b'\\' {
                    j += 1;
                }
                j += 1;
            }
            if j < bytes.len() {
                return Some(text[i + 1..j].to_string());
            }
            return None;
        }
        i += 1;
    }
    None
}

/// Map-notation coordinates: `group: 'g', name: 'a', version: 'v'` (Groovy)
/// or `group = "g", name = "a", version = "v"` (Kotlin). Produces a synthetic
/// interpolated string so the normal tokenizer applies: bare-identifier
/// values become `${...}` references.
fn try_map_notation(parts: &[&str]) -> Option<String> {
    let mut group = None;
    let mut name = None;
    let mut version = None;
    let mut module = None;

    for part in parts {
        let (key, value) = split_named_arg(part)?;
        if !MAP_KEYS.contains(&key) {
            return None;
        }
        let rendered = render_map_value(value);
        match key {
            "group" => group = Some(rendered),
            "name" => name = Some(rendered),
            "version" => version = Some(rendered),
            "module" => module = Some(rendered),
            _ => {}
        }
    }

    let base = match (module, group, name) {
        (Some(m), _, _) => m,
        (None, Some(g), Some(n)) => format!("{g}:{n}"),
        _ => return None,
    };
    let text = match version {
        Some(v) => format!("\"{base}:{v}\""),
        None => format!("\"{base}\""),
    };
    Some(text)
}

fn split_named_arg(part: &str) -> Option<(&str, &str)> {
    let p = part.trim();
    let colon = p.find(':');
    let equals = p.find('=');
    let (split_at, skip) = match (colon, equals) {
        (Some(c), Some(e)) if c < e => (c, 1),
        (Some(c), None) => (c, 1),
        (_, Some(e)) => (e, 1),
        (None, None) => return None,
    };
    let key = p[..split_at].trim();
    if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return None;
    }
    Some((key, p[split_at + skip..].trim()))
}

/// Quoted values keep their inner text (interpolations intact); bare
/// identifier paths become `${path}` references.
fn render_map_value(value: &str) -> String {
    let v = value.trim();
    if (v.starts_with('\'') || v.starts_with('"')) && v.len() >= 2 {
        return v[1..v.len() - 1].to_string();
    }
    format!("${{{v}}}")
}

/// `fileTree(dir: 'libs', include: ['*.jar'])`, `fileTree('libs')` and the
/// named-argument permutations.
fn parse_file_tree(args: &str) -> Payload {
    let mut dir = None;
    let mut patterns = Vec::new();

    for part in split_top_level(args, b',') {
        let part = part.trim();
        if let Some((key, value)) = split_named_arg(part) {
            match key {
                "dir" => dir = first_quoted(value),
                "include" | "includes" => {
                    let list = value.trim().trim_start_matches('[').trim_end_matches(']');
                    for item in split_top_level(list, b',') {
                        if let Some(q) = first_quoted(item.trim()) {
                            patterns.push(q);
                        }
                    }
                }
                _ => {}
            }
        } else if dir.is_none() {
            dir = first_quoted(part);
        }
    }

    Payload::FileTree { dir: dir.unwrap_or_default(), patterns }
}

/// `resolutionStrategy`/`force` overrides are surfaced but never applied.
fn detect_force_overrides(src: &str, file_rel: &str, diagnostics: &mut Vec<Diagnostic>) {
    let bytes = src.as_bytes();
    let mut from = 0;
    while let Some(rel) = src[from..].find("force") {
        let at = from + rel;
        from = at + "force".len();
        let before_ok = at == 0 || !bytes[at - 1].is_ascii_alphanumeric();
        let after = at + "force".len();
        let after_ok = matches!(
            src[after..].trim_start().as_bytes().first(),
            Some(b'\'') | Some(b'"') | Some(b'(')
        );
        let forced_versions = before_ok && after_ok && src.contains("resolutionStrategy");
        if forced_versions {
            diagnostics.push(
                Diagnostic::info(
                    DiagnosticCode::ForceDetected,
                    "resolutionStrategy force override detected; reported but not applied",
                )
                .at(SourceLocation::new(file_rel, line_of(src, at))),
            );
        }
    }
}
