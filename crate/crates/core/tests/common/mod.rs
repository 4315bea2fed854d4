//! Shared test fixtures: the hand-built version-ordering reference table.
//!
//! The table below was derived by hand, on paper, from the documented
//! comparison rules (split on `.` `-` `_` `+`; numeric parts by magnitude;
//! plain alphabetic parts case-insensitively lexicographic, ranked between
//! `dev` and `rc`; the suffix ladder dev < rc < snapshot < release = ga =
//! final = absent; an extra trailing numeric part outranks its prefix).
//! It is frozen here as an oracle and must never be regenerated from the
//! comparator under test.

#![allow(dead_code)]

/// Strictly ascending reference chain. For all i < j, version[i] < version[j].
pub const ORDERED_VERSIONS: [&str; 30] = [
    "0.1",            // baseline
    "0.9",            // 9 > 1 numerically
    "0.9.1",          // extra numeric part beats its prefix
    "1.0-dev",        // 1 > 0; dev is the lowest suffix rank
    "1.0-dev-2",      // extra numeric part after dev
    "1.0-alpha",      // plain word ranks above dev
    "1.0-alpha-5",    // extra numeric part after alpha
    "1.0-b",          // "alpha" < "b" lexicographically
    "1.0-beta",       // "b" < "beta" (prefix is smaller)
    "1.0-beta10",     // "beta" < "beta10" (prefix is smaller)
    "1.0-beta2",      // "beta10" < "beta2": plain parts compare as text, '1' < '2'
    "1.0-milestone",  // 'b' < 'm'
    "1.0-rc2",        // "rc2" is a plain word, not the rc token; 'm' < 'r'
    "1.0-rc",         // the exact rc token outranks every plain word
    "1.0-rc-10",      // extra numeric part after rc
    "1.0-SNAPSHOT",   // snapshot outranks rc; token match is case-insensitive
    "1.0",            // absence of a suffix outranks snapshot
    "1.0.0",          // extra trailing zero still beats its prefix
    "1.0.1",
    "1.0.2",
    "1.0.10",         // 10 > 2 numerically, not lexicographically
    "1.0.10.1",
    "1.1-rc",         // second part decides before the suffix is reached
    "1.1",
    "1.2.0",
    "1.10.0",         // 10 > 2 in the middle position
    "2.8.1-SNAPSHOT",
    "2.8.1",
    "2.11.0",
    "10.0",           // 10 > 2 in the leading position
];

/// Pairs that must compare equal: release/ga/final are synonyms for an absent
/// suffix, token matching ignores case, and every separator splits alike.
pub const EQUAL_VERSION_PAIRS: [(&str, &str); 8] = [
    ("1.0", "1.0-release"),
    ("1.0", "1.0-ga"),
    ("1.0", "1.0.final"),
    ("1.0-ga", "1.0.final"),
    ("1.0-RELEASE", "1.0-release"),
    ("2.0-FINAL", "2.0"),
    ("1.0-alpha", "1.0-ALPHA"),
    ("1.0_0", "1.0.0"),
];
