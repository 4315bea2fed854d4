//! Low-level text scanning shared by the script parsers.
//!
//! Everything here works on raw source text with a small amount of state:
//! string literals are honored (a `//` inside a URL is not a comment, a brace
//! inside a string does not nest) but no grammar is assumed beyond that.

/// One piece of an interpolated string value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    Lit(String),
    Ref(String),
}

/// Replaces `//` line comments and `/* */` block comments with spaces,
/// preserving every newline so byte offsets keep mapping to the same lines.
/// Quoted strings are left untouched.
pub fn strip_comments(src: &str) -> String {
    let bytes = src.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    let mut quote: Option<u8> = None;

    while i < bytes.len() {
        let b = bytes[i];
        match quote {
            Some(q) => {
                out.push(b);
                if b == b'\\' && i + 1 < bytes.len() {
                    out.push(bytes[i + 1]);
                    i += 2;
                    continue;
                }
                if b == q {
                    quote = None;
                }
                i += 1;
            }
            None => {
                if b == b'\'' || b == b'"' {
                    quote = Some(b);
                    out.push(b);
                    i += 1;
                } else if b == b'/' && i + 1 < bytes.len() && bytes[i + 1] == b'/' {
                    while i < bytes.len() && bytes[i] != b'\n' {
                        out.push(b' ');
                        i += 1;
                    }
                } else if b == b'/' && i + 1 < bytes.len() && bytes[i + 1] == b'*' {
                    while i < bytes.len() {
                        if bytes[i] == b'\n' {
                            out.push(b'\n');
                        } else {
                            out.push(b' ');
                        }
                        if bytes[i] == b'*' && i + 1 < bytes.len() && bytes[i + 1] == b'/' {
                            out.push(b' ');
                            i += 2;
                            break;
                        }
                        i += 1;
                    }
                } else {
                    out.push(b);
                    i += 1;
                }
            }
        }
    }
    String::from_utf8_lossy(&out).into_owned()
}

/// 1-based line number of a byte offset.
pub fn line_of(src: &str, offset: usize) -> usize {
    src.as_bytes()[..offset.min(src.len())].iter().filter(|&&b| b == b'\n').count() + 1
}

/// Given the offset of an opening delimiter, returns the offset of its
/// matching closer, honoring nesting and string literals. `None` when the
/// text ends first.
pub fn match_delimiter(src: &str, open_idx: usize) -> Option<usize> {
    let bytes = src.as_bytes();
    let open = bytes[open_idx];
    let close = match open {
        b'{' => b'}',
        b'(' => b')',
        b'[' => b']',
        _ => return None,
    };
    let mut depth = 0usize;
    let mut quote: Option<u8> = None;
    let mut i = open_idx;
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
            }
            None => {
                if b == b'\'' || b == b'"' {
                    quote = Some(b);
                } else if b == open {
                    depth += 1;
                } else if b == close {
                    depth -= 1;
                    if depth == 0 {
                        return Some(i);
                    }
                }
            }
        }
        i += 1;
    }
    None
}

/// A named `{}` block found in source text.
pub struct Block<'a> {
    /// Offset of the block name in the (comment-stripped) source.
    pub name_offset: usize,
    /// Body text between the braces.
    pub body: &'a str,
    /// Offset of the body within the source.
    pub body_offset: usize,
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

/// Finds every `name { ... }` block (the brace may sit on the same statement
/// after whitespace). Works on comment-stripped text.
pub fn find_blocks<'a>(src: &'a str, name: &str) -> Vec<Block<'a>> {
    let mut found = Vec::new();
    let bytes = src.as_bytes();
    let mut search_from = 0;
    while let Some(rel) = src[search_from..].find(name) {
        let at = search_from + rel;
        search_from = at + name.len();
        // Word boundaries: reject "xdependencies" and "dependenciesx".
        if at > 0 && is_ident_byte(bytes[at - 1]) {
            continue;
        }
        let after = at + name.len();
        if after < bytes.len() && is_ident_byte(bytes[after]) {
            continue;
        }
        if in_string_at(src, at) {
            continue;
        }
        // Skip whitespace (including newlines) to the next non-space char.
        let mut j = after;
        while j < bytes.len() && bytes[j].is_ascii_whitespace() {
            j += 1;
        }
        if j >= bytes.len() || bytes[j] != b'{' {
            continue;
        }
        if let Some(close) = match_delimiter(src, j) {
            found.push(Block { name_offset: at, body: &src[j + 1..close], body_offset: j + 1 });
            search_from = j + 1;
        }
    }
    found
}

/// True when `offset` falls inside a string literal. Linear scan; fine for
/// the file sizes build scripts have.
fn in_string_at(src: &str, offset: usize) -> bool {
    let bytes = src.as_bytes();
    let mut quote: Option<u8> = None;
    let mut i = 0;
    while i < offset.min(bytes.len()) {
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
            }
            None => {
                if b == b'\'' || b == b'"' {
                    quote = Some(b);
                }
            }
        }
        i += 1;
    }
    quote.is_some()
}

/// Splits on a separator at delimiter depth zero, respecting strings.
pub fn split_top_level(src: &str, sep: u8) -> Vec<&str> {
    let bytes = src.as_bytes();
    let mut parts = Vec::new();
    let mut start = 0;
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
            }
            None => match b {
                b'\'' | b'"' => quote = Some(b),
                b'(' | b'[' | b'{' => depth += 1,
                b')' | b']' | b'}' => depth -= 1,
                _ if b == sep && depth == 0 => {
                    parts.push(&src[start..i]);
                    start = i + 1;
                }
                _ => {}
            },
        }
        i += 1;
    }
    parts.push(&src[start..]);
    parts
}

/// Reads an identifier path starting at `idx`: `deps.kotlin.stdlib`,
/// `rootProject.ext.versions.core`, `dependencies["key"]`. Subscripts are
/// folded into dotted segments. Returns the path and the end offset.
pub fn read_path(src: &str, idx: usize) -> Option<(String, usize)> {
    let bytes = src.as_bytes();
    let mut i = idx;
    let mut path = String::new();
    if i >= bytes.len() || !(bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
        return None;
    }
    loop {
        let seg_start = i;
        while i < bytes.len() && is_ident_byte(bytes[i]) {
            i += 1;
        }
        if i == seg_start {
            return None;
        }
        path.push_str(&src[seg_start..i]);
        // Subscript: ident["key"] or ident['key'] folds to ident.key
        while i < bytes.len() && bytes[i] == b'[' {
            let close = match_delimiter(src, i)?;
            let inner = src[i + 1..close].trim();
            let key = inner.trim_matches(|c| c == '\'' || c == '"');
            path.push('.');
            path.push_str(key);
            i = close + 1;
        }
        if i + 1 < bytes.len()
            && bytes[i] == b'.'
            && (bytes[i + 1].is_ascii_alphabetic() || bytes[i + 1] == b'_')
        {
            path.push('.');
            i += 1;
            continue;
        }
        break;
    }
    Some((path, i))
}

/// Tokenizes a string-valued expression into literal and reference pieces.
///
/// Handles, in any combination:
/// * quoted literals with `$name`, `$a.b.c` and `${expr}` interpolation,
/// * `+` concatenation between terms,
/// * bare identifier paths (`versions.core`, `deps["x"]`) as references.
///
/// `${...}` contents that are not a plain path (method calls, arithmetic)
/// become references to their raw text; resolution will fail on them and
/// report the variable as unresolved, which is the honest outcome.
pub fn tokenize_string_expr(expr: &str) -> Vec<Piece> {
    let mut pieces = Vec::new();
    for term in split_top_level(expr, b'+') {
        let term = term.trim();
        if term.is_empty() {
            continue;
        }
        let bytes = term.as_bytes();
        if bytes[0] == b'\'' || bytes[0] == b'"' {
            let inner = term.trim_matches(|c| c == '\'' || c == '"');
            tokenize_interpolations(inner, &mut pieces);
        } else if let Some((path, end)) = read_path(term, 0) {
            if term[end..].trim().is_empty() {
                pieces.push(Piece::Ref(path));
            } else {
                // Trailing junk we do not understand: keep the raw text as a
                // reference so it surfaces as unresolved.
                pieces.push(Piece::Ref(term.to_string()));
            }
        } else {
            pieces.push(Piece::Ref(term.to_string()));
        }
    }
    coalesce(pieces)
}

/// Scans quoted-string content for `$` interpolations.
fn tokenize_interpolations(text: &str, pieces: &mut Vec<Piece>) {
    let bytes = text.as_bytes();
    let mut lit = String::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b == b'\\' && i + 1 < bytes.len() {
            lit.push(bytes[i + 1] as char);
            i += 2;
            continue;
        }
        if b == b'$' && i + 1 < bytes.len() {
            if bytes[i + 1] == b'{' {
                if let Some(close) = match_delimiter(text, i + 1) {
                    let inner = text[i + 2..close].trim();
                    if !lit.is_empty() {
                        pieces.push(Piece::Lit(std::mem::take(&mut lit)));
                    }
                    let reference = match read_path(inner, 0) {
                        Some((path, end)) if inner[end..].trim().is_empty() => path,
                        _ => inner.to_string(),
                    };
                    pieces.push(Piece::Ref(reference));
                    i = close + 1;
                    continue;
                }
            } else if let Some((path, end)) = read_path(text, i + 1) {
                if !lit.is_empty() {
                    pieces.push(Piece::Lit(std::mem::take(&mut lit)));
                }
                pieces.push(Piece::Ref(path));
                i = end;
                continue;
            }
        }
        lit.push(text[i..].chars().next().unwrap());
        i += text[i..].chars().next().unwrap().len_utf8();
    }
    if !lit.is_empty() {
        pieces.push(Piece::Lit(lit));
    }
}

/// Merges adjacent literal pieces.
fn coalesce(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for piece in pieces {
        match (out.last_mut(), piece) {
            (Some(Piece::Lit(tail)), Piece::Lit(s)) => tail.push_str(&s),
            (_, p) => out.push(p),
        }
    }
    out
}
