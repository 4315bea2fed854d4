//! Tolerant build-script parsing.
//!
//! Build scripts come in two DSLs (Groovy and Kotlin) and this module never
//! evaluates either; it scans for the handful of shapes that matter for
//! dependency reconstruction: `dependencies { ... }` statements, variable
//! bindings (`ext` properties, `def`/`val` assignments, helper-script
//! objects), plugin applications and variant declarations. Anything it cannot
//! understand it steps over, preserving the raw text in a diagnostic instead
//! of failing the whole file.

mod bindings;
mod catalog;
mod declarations;
mod plugins;
mod scanner;

pub use bindings::{extract_bindings, parse_properties, BindingScope, RawBinding};
pub use catalog::{parse_catalog, CatalogLibrary, CatalogModel, CatalogVersion};
pub use declarations::{extract_declarations, DeclarationRecord, Payload};
pub use plugins::{extract_plugins, extract_variant_names, PluginRef, VariantNames};
pub use scanner::{strip_comments, tokenize_string_expr, Piece};

/// Which DSL a script file is written in. Decided by file extension; the
/// scanners are shared and only a few string rules differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    Groovy,
    Kts,
}

impl Dialect {
    pub fn of_path(path: &std::path::Path) -> Dialect {
        match path.extension().and_then(|e| e.to_str()) {
            Some("kts") | Some("kt") => Dialect::Kts,
            _ => Dialect::Groovy,
        }
    }
}

/// A string-literal value or a value assembled from literals and variable
/// references. Produced by the tokenizer, consumed by the resolver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BindingValue {
    Literal(String),
    Reference(String),
    Concat(Vec<Piece>),
}

impl BindingValue {
    /// Collapses a tokenized piece list into the simplest value form.
    pub fn from_pieces(pieces: Vec<Piece>) -> BindingValue {
        match pieces.as_slice() {
            [] => BindingValue::Literal(String::new()),
            [Piece::Lit(_)] => match pieces.into_iter().next() {
                Some(Piece::Lit(s)) => BindingValue::Literal(s),
                _ => unreachable!(),
            },
            [Piece::Ref(_)] => match pieces.into_iter().next() {
                Some(Piece::Ref(r)) => BindingValue::Reference(r),
                _ => unreachable!(),
            },
            _ => BindingValue::Concat(pieces),
        }
    }
}
