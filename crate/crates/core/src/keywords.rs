//! Configuration-keyword taxonomy.
//!
//! Every dependency declaration hangs off a configuration keyword
//! (`implementation`, `testImplementation`, `gplayImplementation`, ...) and
//! the keyword alone decides whether the declared library reaches the APK:
//! INCLUDE keywords package, EXCLUDE keywords never package (test, lint and
//! annotation-processing configurations), VARIANT keywords package only when
//! their build-variant prefix is part of the selected variant set.
//!
//! The default tables below reproduce the keyword survey of a large corpus of
//! real Android projects verbatim, including its quirks (`Kapt` with a capital
//! K, `debugcompile` in lowercase); matching is exact. Unknown keywords fall
//! back to EXCLUDE so an unrecognized configuration can only ever cost recall,
//! never invent a packaged dependency.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Keywords whose declarations always package into the APK.
pub const INCLUDE_KEYWORDS: [&str; 9] = [
    "withAnalyticsImplementation",
    "natives",
    "api",
    "compile",
    "androidImplementation",
    "implementation",
    "releaseImplementation",
    "releaseCompile",
    "coreLibraryDesugaring",
];

/// Keywords whose declarations never package (tests, tooling, processors).
pub const EXCLUDE_KEYWORDS: [&str; 21] = [
    "testImplementation",
    "androidTestImplementation",
    "Kapt",
    "compileOnly",
    "debugImplementation",
    "androidTestApt",
    "annotationProcessor",
    "testApi",
    "apt",
    "jnaForTest",
    "retrolambdaConfig",
    "detektPlugins",
    "debugcompile",
    "androidTestApi",
    "androidTestUtil",
    "errorprone",
    "ksp",
    "kaptAndroidTest",
    "testAnnotationProcessor",
    "ktlint",
    "androidTestAnnotationProcessor",
];

/// Keywords tied to a build variant, with the variant prefix they carry.
pub const VARIANT_KEYWORDS: [(&str, &str); 15] = [
    ("PlayStoreImplementation", "PlayStore"),
    ("nightlyImplementation", "nightly"),
    ("gplayImplementation", "gplay"),
    ("playImplementation", "play"),
    ("largeImplementation", "large"),
    ("playstoreImplementation", "playstore"),
    ("amazonImplementation", "amazon"),
    ("githubImplementation", "github"),
    ("pureImplementation", "pure"),
    ("prodImplementation", "prod"),
    ("betaImplementation", "beta"),
    ("alphaImplementation", "alpha"),
    ("devImplementation", "dev"),
    ("customImplementation", "custom"),
    ("appengineSdk", "appengine"),
];

/// Variant keywords decompose as `<prefix><Base>` where the lowercased base
/// is itself an INCLUDE keyword.
const VARIANT_BASES: [&str; 3] = ["Implementation", "Api", "Compile"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DependencyClass {
    Include,
    Exclude,
    Variant,
}

/// Result of classifying one configuration keyword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordClass {
    pub keyword: String,
    pub class: DependencyClass,
    /// For VARIANT keywords, the build-variant prefix (`gplay`).
    pub variant_prefix: Option<String>,
    /// False when the keyword matched neither a table entry nor the variant
    /// decomposition rule and was defaulted to EXCLUDE.
    pub known: bool,
}

#[derive(Debug, Error)]
pub enum KeywordTableError {
    #[error("line {line}: expected keyword<TAB>CLASS[<TAB>prefix], got {content:?}")]
    BadLine { line: usize, content: String },
    #[error("line {line}: unknown class {class:?} (expected INCLUDE, EXCLUDE or VARIANT)")]
    BadClass { line: usize, class: String },
}

/// Keyword classification table: built-in defaults plus optional overrides.
#[derive(Debug, Clone)]
pub struct KeywordTable {
    entries: BTreeMap<String, (DependencyClass, Option<String>)>,
}

impl Default for KeywordTable {
    fn default() -> Self {
        let mut entries = BTreeMap::new();
        for kw in INCLUDE_KEYWORDS {
            entries.insert(kw.to_string(), (DependencyClass::Include, None));
        }
        for kw in EXCLUDE_KEYWORDS {
            entries.insert(kw.to_string(), (DependencyClass::Exclude, None));
        }
        for (kw, prefix) in VARIANT_KEYWORDS {
            entries.insert(kw.to_string(), (DependencyClass::Variant, Some(prefix.to_string())));
        }
        // Build-plugin classpaths live in every root script and never package
        // into the APK; listing the keyword here keeps them out of the
        // unknown-keyword noise.
        entries.insert("classpath".to_string(), (DependencyClass::Exclude, None));
        KeywordTable { entries }
    }
}

impl KeywordTable {
    /// Parses override lines (`keyword<TAB>CLASS` with an optional third
    /// prefix column, `#` comments allowed) and applies them over the
    /// defaults. Overrides replace individual entries, they do not wipe the
    /// table.
    pub fn with_overrides(text: &str) -> Result<Self, KeywordTableError> {
        let mut table = KeywordTable::default();
        table.apply_overrides(text)?;
        Ok(table)
    }

    pub fn apply_overrides(&mut self, text: &str) -> Result<(), KeywordTableError> {
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = raw_line.split('\t');
            let keyword = fields.next().map(str::trim).unwrap_or_default();
            let class = fields.next().map(str::trim);
            let prefix = fields.next().map(str::trim);
            let (keyword, class) = match (keyword, class) {
                (k, Some(c)) if !k.is_empty() && !c.is_empty() => (k, c),
                _ => {
                    return Err(KeywordTableError::BadLine { line, content: raw_line.to_string() })
                }
            };
            let class = match class {
                "INCLUDE" => DependencyClass::Include,
                "EXCLUDE" => DependencyClass::Exclude,
                "VARIANT" => DependencyClass::Variant,
                other => {
                    return Err(KeywordTableError::BadClass { line, class: other.to_string() })
                }
            };
            let prefix = match class {
                DependencyClass::Variant => Some(
                    prefix
                        .filter(|p| !p.is_empty())
                        .map(str::to_string)
                        .unwrap_or_else(|| derive_variant_prefix(keyword)),
                ),
                _ => None,
            };
            self.entries.insert(keyword.to_string(), (class, prefix));
        }
        Ok(())
    }

    /// Classifies one keyword. Exact table match wins; otherwise a
    /// `<prefix><Implementation|Api|Compile>` shape with a declared variant
    /// prefix (or, when no variants are known, any lowercase-led prefix)
    /// classifies as VARIANT; everything else defaults to EXCLUDE with
    /// `known = false` so the caller can surface an UNKNOWN_KEYWORD
    /// diagnostic.
    pub fn classify(&self, keyword: &str, known_variants: &BTreeSet<String>) -> KeywordClass {
        if let Some((class, prefix)) = self.entries.get(keyword) {
            return KeywordClass {
                keyword: keyword.to_string(),
                class: *class,
                variant_prefix: prefix.clone(),
                known: true,
            };
        }

        if let Some(prefix) = split_variant_prefix(keyword) {
            let accepted = if known_variants.is_empty() {
                prefix.chars().next().is_some_and(|c| c.is_ascii_lowercase())
            } else {
                known_variants.contains(prefix)
            };
            if accepted {
                return KeywordClass {
                    keyword: keyword.to_string(),
                    class: DependencyClass::Variant,
                    variant_prefix: Some(prefix.to_string()),
                    known: true,
                };
            }
        }

        KeywordClass {
            keyword: keyword.to_string(),
            class: DependencyClass::Exclude,
            variant_prefix: None,
            known: false,
        }
    }
}

/// `gplayImplementation` → `gplay`; `None` when the keyword does not end in a
/// capitalized INCLUDE base or has nothing before it.
fn split_variant_prefix(keyword: &str) -> Option<&str> {
    for base in VARIANT_BASES {
        if let Some(prefix) = keyword.strip_suffix(base) {
            if !prefix.is_empty() {
                return Some(prefix);
            }
        }
    }
    None
}

fn derive_variant_prefix(keyword: &str) -> String {
    split_variant_prefix(keyword).unwrap_or(keyword).to_string()
}
