//! Static reconstruction of an Android application's packaged dependency set.
//!
//! Given the on-disk sources of a Gradle project (build scripts, settings,
//! property files, version catalogs, helper scripts), this crate computes the
//! set of third-party coordinates `group:artifact:version` that the main
//! application module would package, without executing Gradle. The pipeline:
//!
//! 1. [`discovery`] locates the project root and enumerates modules, property
//!    files, catalogs, helper scripts and local binary artifacts.
//! 2. [`script`] parses build scripts (Groovy and Kotlin DSL, tolerantly) into
//!    declaration records, variable bindings, plugin ids and variant names.
//! 3. [`graph`] builds the inter-module dependency graph, finds the main
//!    application module and computes the reachable module set.
//! 4. [`resolve`] layers variable environments, expands catalog references and
//!    BOM-managed versions, and normalizes declarations into coordinates.
//! 5. [`finalize`] aggregates, deduplicates, recovers ambiguous versions from
//!    IDE metadata and resolves conflicts into the final report.
//! 6. [`metrics`] scores extracted sets against golden dependency lists.
//!
//! The extraction is deliberately an over-approximation in places (conditional
//! declarations are taken unconditionally) and an under-approximation in
//! others (no plugin execution, no transitive resolution); every holder of an
//! inexact result carries a diagnostic saying why.

pub mod discovery;
pub mod finalize;
pub mod graph;
pub mod keywords;
pub mod metrics;
pub mod model;
pub mod resolve;
pub mod script;

mod version;

pub use finalize::{extract_project, ExtractError, ExtractOptions, ExtractionReport};
pub use model::{compare_versions, parse_coordinate, Coordinate, CoordinateStatus, Diagnostic};
