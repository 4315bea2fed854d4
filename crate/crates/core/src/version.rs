//! Version-string ordering.
//!
//! Conflict resolution keeps the highest version, so the comparator has to be
//! a total order over arbitrary version strings, not just semver. Rules:
//!
//! * the string splits into parts on `.`, `-`, `_` and `+` (empty parts are
//!   dropped, so every separator is equivalent);
//! * numeric parts compare by magnitude, non-numeric parts compare
//!   case-insensitively as text;
//! * at the same position a numeric part outranks any non-numeric part;
//! * when one version is a prefix of the other, an extra numeric part makes
//!   the longer one greater (`1.0 < 1.0.0`);
//! * the suffix tokens form a ladder: `dev` < any plain word < `rc` <
//!   `snapshot` < (`release` = `ga` = `final` = no suffix at all).
//!
//! Plain words sit in a single slot of the ladder rather than interleaving
//! with the special tokens; interleaving lexicographically would make the
//! order intransitive (consider a word between "release" and "snapshot").

use std::cmp::Ordering;

const SEPARATORS: [char; 4] = ['.', '-', '_', '+'];

/// Rank slots for non-numeric parts. Text only participates inside `Plain`.
const RANK_DEV: u8 = 0;
const RANK_PLAIN: u8 = 1;
const RANK_RC: u8 = 2;
const RANK_SNAPSHOT: u8 = 3;
const RANK_RELEASE: u8 = 4;

enum Part<'a> {
    Number(&'a str),
    Word(u8, &'a str),
}

fn word_rank(part: &str) -> u8 {
    if part.eq_ignore_ascii_case("dev") {
        RANK_DEV
    } else if part.eq_ignore_ascii_case("rc") {
        RANK_RC
    } else if part.eq_ignore_ascii_case("snapshot") {
        RANK_SNAPSHOT
    } else if part.eq_ignore_ascii_case("release")
        || part.eq_ignore_ascii_case("ga")
        || part.eq_ignore_ascii_case("final")
    {
        RANK_RELEASE
    } else {
        RANK_PLAIN
    }
}

fn classify(part: Option<&str>) -> Part<'_> {
    match part {
        None => Part::Word(RANK_RELEASE, ""),
        Some(p) if p.bytes().all(|b| b.is_ascii_digit()) => Part::Number(p),
        Some(p) => Part::Word(word_rank(p), p),
    }
}

/// Compares two digit strings by magnitude without parsing into an integer,
/// so date-style parts of any length are safe.
fn compare_digits(a: &str, b: &str) -> Ordering {
    let a = a.trim_start_matches('0');
    let b = b.trim_start_matches('0');
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

fn compare_text(a: &str, b: &str) -> Ordering {
    let mut ai = a.chars().map(|c| c.to_ascii_lowercase());
    let mut bi = b.chars().map(|c| c.to_ascii_lowercase());
    loop {
        match (ai.next(), bi.next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => match x.cmp(&y) {
                Ordering::Equal => continue,
                other => return other,
            },
        }
    }
}

fn compare_parts(a: Part<'_>, b: Part<'_>) -> Ordering {
    match (a, b) {
        (Part::Number(x), Part::Number(y)) => compare_digits(x, y),
        (Part::Number(_), Part::Word(..)) => Ordering::Greater,
        (Part::Word(..), Part::Number(_)) => Ordering::Less,
        (Part::Word(ra, ta), Part::Word(rb, tb)) => ra.cmp(&rb).then_with(|| {
            if ra == RANK_PLAIN {
                compare_text(ta, tb)
            } else {
                Ordering::Equal
            }
        }),
    }
}

/// Total order over version strings as described in the module docs.
pub fn compare_versions(a: &str, b: &str) -> Ordering {
    let parts_a: Vec<&str> = a.split(SEPARATORS).filter(|p| !p.is_empty()).collect();
    let parts_b: Vec<&str> = b.split(SEPARATORS).filter(|p| !p.is_empty()).collect();
    for i in 0..parts_a.len().max(parts_b.len()) {
        let pa = classify(parts_a.get(i).copied());
        let pb = classify(parts_b.get(i).copied());
        match compare_parts(pa, pb) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}
