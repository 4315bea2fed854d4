//! Plugin applications and build-variant names.

use std::collections::BTreeSet;

use crate::model::SourceLocation;

use super::scanner::{find_blocks, line_of, read_path, strip_comments};

/// One plugin application found in a build script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PluginRef {
    /// Direct id: `apply plugin: 'com.android.application'`, `id("...")`.
    Id(String),
    /// Catalog alias: `alias(libs.plugins.android.application)`, stored as
    /// the dotted path after `libs.plugins.`.
    Alias(String),
}

impl PluginRef {
    pub fn location_less_id(&self) -> &str {
        match self {
            PluginRef::Id(id) => id,
            PluginRef::Alias(alias) => alias,
        }
    }
}

/// Collects plugin ids from both application syntaxes.
pub fn extract_plugins(script_text: &str, file_rel: &str) -> Vec<(PluginRef, SourceLocation)> {
    let src = strip_comments(script_text);
    let mut plugins = Vec::new();

    // apply plugin: 'id'  /  apply(plugin = "id")
    let mut from = 0;
    while let Some(rel) = src[from..].find("apply") {
        let at = from + rel;
        from = at + "apply".len();
        let rest = &src[at + "apply".len()..];
        let rest = rest.trim_start_matches(['(', ' ', '\t']);
        let rest = match rest.strip_prefix("plugin") {
            Some(r) => r,
            None => continue,
        };
        let rest = rest.trim_start();
        let rest = rest.strip_prefix(':').or_else(|| rest.strip_prefix('=')).unwrap_or(rest);
        let rest = rest.trim_start();
        if let Some(id) = leading_quoted(rest) {
            plugins.push((PluginRef::Id(id), SourceLocation::new(file_rel, line_of(&src, at))));
        }
    }

    // plugins { id 'x'; id("y") version "1"; kotlin("android"); alias(libs.plugins.foo) }
    for block in find_blocks(&src, "plugins") {
        let body = block.body;
        for (offset, line) in line_spans(body) {
            let abs = block.body_offset + offset;
            let loc = SourceLocation::new(file_rel, line_of(&src, abs));
            let t = line.trim();
            if let Some(rest) = t.strip_prefix("id") {
                let rest = rest.trim_start_matches(['(', ' ', '\t']);
                if let Some(id) = leading_quoted(rest) {
                    plugins.push((PluginRef::Id(id), loc));
                }
            } else if let Some(rest) = t.strip_prefix("kotlin") {
                let rest = rest.trim_start_matches(['(', ' ', '\t']);
                if let Some(target) = leading_quoted(rest) {
                    plugins.push((PluginRef::Id(format!("org.jetbrains.kotlin.{target}")), loc));
                }
            } else if let Some(rest) = t.strip_prefix("alias") {
                let rest = rest.trim_start_matches(['(', ' ', '\t']);
                if let Some((path, _)) = read_path(rest, 0) {
                    if let Some(alias) = path.strip_prefix("libs.plugins.") {
                        plugins.push((PluginRef::Alias(alias.to_string()), loc));
                    }
                }
            }
        }
    }

    plugins
}

/// Declared build variants of one script: flavor and build-type names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VariantNames {
    pub flavors: BTreeSet<String>,
    pub build_types: BTreeSet<String>,
}

impl VariantNames {
    /// Every name, for keyword classification.
    pub fn all(&self) -> BTreeSet<String> {
        self.flavors.union(&self.build_types).cloned().collect()
    }

    pub fn merge(&mut self, other: VariantNames) {
        self.flavors.extend(other.flavors);
        self.build_types.extend(other.build_types);
    }
}

/// Reads `productFlavors { ... }` and `buildTypes { ... }` entries. The
/// implicit `debug`/`release` build types are always present.
pub fn extract_variant_names(script_text: &str) -> VariantNames {
    let src = strip_comments(script_text);
    let mut names = VariantNames::default();
    names.build_types.insert("debug".to_string());
    names.build_types.insert("release".to_string());

    for block in find_blocks(&src, "productFlavors") {
        names.flavors.extend(block_entry_names(block.body));
    }
    for block in find_blocks(&src, "buildTypes") {
        names.build_types.extend(block_entry_names(block.body));
    }
    names
}

/// Names of the entries of a container block: `gplay { ... }`,
/// `create("gplay") { ... }`, `register("gplay")`, `getByName("release")`.
fn block_entry_names(body: &str) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    let bytes = body.as_bytes();
    let mut depth = 0i32;
    let mut quote: Option<u8> = None;
    let mut i = 0;

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
                }
                i += 1;
            }
            None => match b {
                b'\'' | b'"' => {
                    quote = Some(b);
                    i += 1;
                }
                b'{' | b'(' | b'[' => {
                    depth += 1;
                    i += 1;
                }
                b'}' | b')' | b']' => {
                    depth -= 1;
                    i += 1;
                }
                _ if depth == 0 && (b.is_ascii_alphabetic() || b == b'_') => {
                    let start = i;
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    let word = &body[start..i];
                    let rest = body[i..].trim_start();
                    if matches!(word, "create" | "register" | "maybeCreate" | "getByName") {
                        if let Some(arg) = rest.strip_prefix('(') {
                            if let Some(name) = leading_quoted(arg.trim_start()) {
                                names.insert(name);
                            }
                        }
                    } else if rest.starts_with('{') {
                        names.insert(word.to_string());
                    }
                }
                _ => i += 1,
            },
        }
    }
    names
}

/// Each line of `text` with its byte offset.
fn line_spans(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut offset = 0;
    text.split('\n').map(move |line| {
        let here = offset;
        offset += line.len() + 1;
        (here, line)
    })
}

/// The quoted string starting exactly at `text`, if any.
fn leading_quoted(text: &str) -> Option<String> {
    let bytes = text.as_bytes();
    let q = *bytes.first()?;
    if q != b'\'' && q != b'"' {
        return None;
    }
    let close = text[1..].find(q as char)?;
    Some(text[1..1 + close].to_string())
}
