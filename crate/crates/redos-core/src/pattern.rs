//! Pattern inputs: raw bytes, flags, and where they came from.

use std::fmt;

/// Flags honored or recorded by the parser. Only case-insensitivity
/// changes the analysis; the rest are recorded so reports can explain
/// what was ignored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PatternFlags {
    pub case_insensitive: bool,
}

/// Where a pattern came from, for report records.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Origin {
    /// 1-based line number in the ingested file.
    pub line: usize,
}

/// A pattern as ingested: bytes, flags, provenance, and any warnings
/// produced while reading it (e.g. unknown delimiter flags).
#[derive(Clone, Debug)]
pub struct SourcePattern {
    pub text: Vec<u8>,
    pub flags: PatternFlags,
    pub origin: Option<Origin>,
    pub warnings: Vec<String>,
}

impl SourcePattern {
    pub fn new(text: impl Into<Vec<u8>>) -> Self {
        SourcePattern {
            text: text.into(),
            flags: PatternFlags::default(),
            origin: None,
            warnings: Vec::new(),
        }
    }

    pub fn with_flags(mut self, flags: PatternFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn with_origin(mut self, line: usize) -> Self {
        self.origin = Some(Origin { line });
        self
    }

    /// Accepts either bare pattern text or the delimited form
    /// `/pattern/flags`. Unknown flag letters become warnings, not errors.
    pub fn from_line(line: &[u8]) -> Self {
        if line.len() >= 2 && line[0] == b'/' {
            if let Some(close) = find_closing_slash(line) {
                let body = unescape_delimiters(&line[1..close]);
                let mut sp = SourcePattern::new(body);
                apply_flag_letters(&line[close + 1..], &mut sp);
                return sp;
            }
        }
        SourcePattern::new(line.to_vec())
    }

    /// Lossy display form for report records.
    pub fn display(&self) -> String {
        crate::report::escape_bytes(&self.text)
    }
}

impl fmt::Display for SourcePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

/// Index of the unescaped `/` closing a delimited pattern, if the line is
/// well-formed (`/.../flags` with only flag letters after it).
fn find_closing_slash(line: &[u8]) -> Option<usize> {
    let mut close = None;
    let mut i = 1;
    while i < line.len() {
        match line[i] {
            b'\\' => i += 1,
            b'/' => close = Some(i),
            _ => {}
        }
        i += 1;
    }
    let close = close?;
    if line[close + 1..].iter().all(|b| b.is_ascii_alphabetic()) {
        Some(close)
    } else {
        None
    }
}

/// Within `/.../`, only the delimiter escape `\/` is consumed; every other
/// backslash sequence is part of the pattern itself.
fn unescape_delimiters(body: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(body.len());
    let mut i = 0;
    while i < body.len() {
        if body[i] == b'\\' && i + 1 < body.len() && body[i + 1] == b'/' {
            out.push(b'/');
            i += 2;
        } else {
            out.push(body[i]);
            i += 1;
        }
    }
    out
}

pub(crate) fn apply_flag_letters(letters: &[u8], sp: &mut SourcePattern) {
    for &f in letters {
        match f {
            b'i' => sp.flags.case_insensitive = true,
            _ => sp.warnings.push(format!(
                "flag '{}' has no effect on this analysis and was ignored",
                f as char
            )),
        }
    }
}
