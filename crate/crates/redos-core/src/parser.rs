//! Recursive-descent parser for the supported PCRE subset.
//!
//! Output is the desugared [`Ast`]: `e+`, `e?`, `e{m,n}` and `e{m,}` are
//! expanded during parsing (`e+` → `e·e*`, `e?` → `e|ε`, bounded
//! repetition → mandatory copies followed by nested optionals), so bound
//! expansion stays linear in the bound. Constructs whose semantics the
//! analysis cannot honor (look-around, back-references, word boundaries,
//! possessive quantifiers, anchors in positions other than the ends of
//! the top-level concatenation) are rejected as unsupported rather than
//! silently misread. Constructs that parse fine but have no effect here
//! (lazy quantifiers, capture-group names, most inline flags) are
//! accepted and recorded as warnings.

use crate::ast::Ast;
use crate::charset::CharSet;
use crate::pattern::SourcePattern;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("unbalanced group")]
    UnbalancedGroup,
    #[error("unterminated character class")]
    UnterminatedClass,
    #[error("bad character range (start exceeds end)")]
    BadRange,
    #[error("bad repetition bounds {{{m},{n}}} (min exceeds max)")]
    BadRepetitionBounds { m: u32, n: u32 },
    #[error("repetition bound {bound} exceeds the expansion limit of {MAX_REPETITION}")]
    RepetitionBoundTooLarge { bound: u32 },
    #[error("character class matches no byte")]
    EmptyClass,
    #[error("quantifier with nothing to repeat")]
    NothingToRepeat,
    #[error("trailing backslash")]
    TrailingBackslash,
    #[error("malformed \\x escape")]
    BadHexEscape,
    #[error("groups nested too deeply")]
    NestingTooDeep,
    #[error("unsupported construct: {construct}")]
    UnsupportedConstruct { construct: String },
}

impl ParseError {
    /// True for constructs we recognize but do not model, as opposed to
    /// malformed input.
    pub fn is_unsupported(&self) -> bool {
        matches!(self, ParseError::UnsupportedConstruct { .. })
    }
}

/// Upper bound on counted-repetition expansion.
pub const MAX_REPETITION: u32 = 1000;

const MAX_DEPTH: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseOutcome {
    pub ast: Ast,
    pub warnings: Vec<String>,
}

/// Parses a source pattern into the desugared core syntax.
pub fn parse(sp: &SourcePattern) -> Result<ParseOutcome, ParseError> {
    if sp.text.iter().all(|b| b.is_ascii_whitespace()) {
        return Ok(ParseOutcome {
            ast: Ast::Epsilon,
            warnings: sp.warnings.clone(),
        });
    }
    let mut p = Parser {
        input: &sp.text,
        pos: 0,
        ci: sp.flags.case_insensitive,
        warnings: sp.warnings.clone(),
        depth: 0,
    };
    let ast = p.parse_alternation()?;
    if p.pos < p.input.len() {
        // The only way parse_alternation stops early is an unmatched ')'.
        return Err(ParseError::UnbalancedGroup);
    }
    validate_anchors(&ast)?;
    Ok(ParseOutcome {
        ast,
        warnings: p.warnings,
    })
}

/// One line per supported construct, plus the explicit exclusions.
/// Deterministic; shown by the CLI's --syntax flag.
pub fn supported_syntax_report() -> &'static str {
    "\
supported syntax (byte-oriented, ASCII case folding):
  literals            any byte; metacharacters via backslash escape
  .                   any byte except \\n
  escapes             \\d \\D \\w \\W \\s \\S \\n \\r \\t \\f \\v \\a \\e \\0 \\xHH \\x{HH}
  classes             [...] with ranges, negation, class escapes; ] literal when first
  alternation         a|b (left branch preferred); empty branches allowed
  grouping            (...) and (?:...); group names parsed, capture semantics ignored
  quantifiers         * + ? {m} {m,} {m,n}; bounds expand up to 1000
  lazy quantifiers    *? +? ?? {m,n}? parsed, analyzed as greedy (warning)
  anchors             ^ at pattern start, $ at pattern end
  inline flags        (?i) (?i:...) honored; other flag letters warned and ignored
  delimited form      /pattern/flags; flag i honored, others warned
not supported (reported, never guessed):
  look-around (?= (?! (?<= (?<!, back-references \\1 \\k<...>,
  word boundaries \\b \\B, \\A \\z \\Z \\G, possessive quantifiers,
  \\Q...\\E quoting, \\cX, \\p{...}, POSIX [:class:], anchors mid-pattern"
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    ci: bool,
    warnings: Vec<String>,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unsupported(&self, construct: &str) -> ParseError {
        ParseError::UnsupportedConstruct {
            construct: construct.to_string(),
        }
    }

    fn parse_alternation(&mut self) -> Result<Ast, ParseError> {
        let mut branches = vec![self.parse_concat()?];
        while self.eat(b'|') {
            branches.push(self.parse_concat()?);
        }
        let mut it = branches.into_iter().rev();
        let last = it.next().unwrap();
        Ok(it.fold(last, |acc, b| Ast::alt(b, acc)))
    }

    fn parse_concat(&mut self) -> Result<Ast, ParseError> {
        let mut items: Vec<Ast> = Vec::new();
        loop {
            match self.peek() {
                None | Some(b'|') | Some(b')') => break,
                Some(b'*') | Some(b'+') => return Err(ParseError::NothingToRepeat),
                Some(b'?') => return Err(ParseError::NothingToRepeat),
                Some(b'{') if self.repetition_ahead() => {
                    return Err(ParseError::NothingToRepeat)
                }
                _ => {
                    let atom = self.parse_atom()?;
                    items.push(self.parse_quantifiers(atom)?);
                }
            }
        }
        Ok(Ast::concat_all(items))
    }

    /// Applies any run of quantifiers to `atom`. Stacked quantifiers are
    /// legal and nest left-to-right, so `a**` is `Star(Star(a))`.
    fn parse_quantifiers(&mut self, atom: Ast) -> Result<Ast, ParseError> {
        let mut node = atom;
        loop {
            let quant = match self.peek() {
                Some(b'*') => Quant::Star,
                Some(b'+') => Quant::Plus,
                Some(b'?') => Quant::Opt,
                Some(b'{') if self.repetition_ahead() => Quant::Bounds,
                _ => return Ok(node),
            };
            if matches!(node, Ast::AnchorStart | Ast::AnchorEnd) {
                return Err(ParseError::NothingToRepeat);
            }
            let (m, n) = match quant {
                Quant::Bounds => {
                    self.bump();
                    self.parse_bounds()?
                }
                _ => {
                    self.bump();
                    (0, 0)
                }
            };
            let mut greedy = true;
            if self.eat(b'?') {
                greedy = false;
                self.warnings
                    .push("lazy quantifier analyzed as greedy".to_string());
            } else if self.peek() == Some(b'+') {
                // `x*+`, `x++`, `x?+`, `x{m,n}+` are possessive.
                return Err(self.unsupported("possessive quantifier"));
            }
            node = match quant {
                Quant::Star => star(node, greedy),
                Quant::Plus => {
                    let s = star(node.clone(), greedy);
                    Ast::concat_all(vec![node, s])
                }
                Quant::Opt => Ast::alt(node, Ast::Epsilon),
                Quant::Bounds => expand_bounds(node, m, n, greedy)?,
            };
        }
    }

    /// True when the text at `pos` (a '{') is a well-formed repetition
    /// spec. A malformed one is a literal brace, as in PCRE.
    fn repetition_ahead(&self) -> bool {
        let rest = &self.input[self.pos..];
        if rest.first() != Some(&b'{') {
            return false;
        }
        let mut i = 1;
        let mut digits = 0;
        while i < rest.len() && rest[i].is_ascii_digit() {
            digits += 1;
            i += 1;
        }
        if digits == 0 {
            return false;
        }
        if i < rest.len() && rest[i] == b'}' {
            return true;
        }
        if i < rest.len() && rest[i] == b',' {
            i += 1;
            while i < rest.len() && rest[i].is_ascii_digit() {
                i += 1;
            }
            return i < rest.len() && rest[i] == b'}';
        }
        false
    }

    /// Parses `m}`, `m,}` or `m,n}` after the opening brace. Returns
    /// (min, max) with max = u32::MAX for an open upper bound.
    fn parse_bounds(&mut self) -> Result<(u32, u32), ParseError> {
        let m = self.parse_number()?;
        let n = if self.eat(b',') {
            if self.peek() == Some(b'}') {
                u32::MAX
            } else {
                self.parse_number()?
            }
        } else {
            m
        };
        if !self.eat(b'}') {
            return Err(ParseError::UnbalancedGroup);
        }
        if n != u32::MAX && m > n {
            return Err(ParseError::BadRepetitionBounds { m, n });
        }
        let largest = if n == u32::MAX { m } else { n };
        if largest > MAX_REPETITION {
            return Err(ParseError::RepetitionBoundTooLarge { bound: largest });
        }
        Ok((m, n))
    }

    fn parse_number(&mut self) -> Result<u32, ParseError> {
        let mut v: u32 = 0;
        let mut any = false;
        while let Some(b) = self.peek() {
            if !b.is_ascii_digit() {
                break;
            }
            any = true;
            v = v.saturating_mul(10).saturating_add((b - b'0') as u32);
            self.bump();
        }
        if any {
            Ok(v)
        } else {
            Err(ParseError::UnbalancedGroup)
        }
    }

    fn parse_atom(&mut self) -> Result<Ast, ParseError> {
        match self.bump().expect("caller checked for input") {
            b'(' => self.parse_group(),
            b'[' => self.parse_class(),
            b'.' => Ok(Ast::Constant(CharSet::dot())),
            b'\\' => self.parse_escape_atom(),
            b'^' => Ok(Ast::AnchorStart),
            b'$' => Ok(Ast::AnchorEnd),
            b => Ok(self.literal(b)),
        }
    }

    fn literal(&self, b: u8) -> Ast {
        let cs = CharSet::byte(b);
        Ast::Constant(if self.ci { cs.case_fold() } else { cs })
    }

    fn parse_group(&mut self) -> Result<Ast, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::NestingTooDeep);
        }
        let result = self.parse_group_inner();
        self.depth -= 1;
        result
    }

    fn parse_group_inner(&mut self) -> Result<Ast, ParseError> {
        // Flags set inside this group end with it; a bare "(?i)" group
        // instead leaks its flags into the enclosing scope.
        let saved_ci = self.ci;
        if self.eat(b'?') {
            match self.peek() {
                Some(b':') => {
                    self.bump();
                }
                Some(b'=') => return Err(self.unsupported("lookahead (?=")),
                Some(b'!') => return Err(self.unsupported("negative lookahead (?!")),
                Some(b'<') => {
                    self.bump();
                    match self.peek() {
                        Some(b'=') => return Err(self.unsupported("lookbehind (?<=")),
                        Some(b'!') => {
                            return Err(self.unsupported("negative lookbehind (?<!"))
                        }
                        _ => self.skip_group_name(b'>')?,
                    }
                }
                Some(b'P') => {
                    self.bump();
                    if self.eat(b'<') {
                        self.skip_group_name(b'>')?;
                    } else {
                        return Err(self.unsupported("(?P construct"));
                    }
                }
                Some(b'\'') => {
                    self.bump();
                    self.skip_group_name(b'\'')?;
                }
                Some(c) if c == b'-' || c.is_ascii_alphabetic() => {
                    self.parse_inline_flags()?;
                    // "(?i)" style: the group is empty and its flags
                    // stay in force for the rest of the enclosing scope.
                    if self.eat(b')') {
                        return Ok(Ast::Epsilon);
                    }
                    if !self.eat(b':') {
                        return Err(self.unsupported("inline-flag group"));
                    }
                }
                Some(b'#') => {
                    // Comment group: skip to the closing paren.
                    while let Some(b) = self.bump() {
                        if b == b')' {
                            return Ok(Ast::Epsilon);
                        }
                    }
                    return Err(ParseError::UnbalancedGroup);
                }
                _ => return Err(self.unsupported("(? construct")),
            }
        }
        let inner = self.parse_alternation()?;
        if !self.eat(b')') {
            return Err(ParseError::UnbalancedGroup);
        }
        self.ci = saved_ci;
        Ok(inner)
    }

    fn skip_group_name(&mut self, close: u8) -> Result<(), ParseError> {
        while let Some(b) = self.bump() {
            if b == close {
                self.warnings
                    .push("group name parsed; capture semantics ignored".to_string());
                return Ok(());
            }
            if b == b')' {
                return Err(self.unsupported("malformed group name"));
            }
        }
        Err(ParseError::UnbalancedGroup)
    }

    /// Parses the letters of `(?flags)` / `(?flags:`; stops at ')' or ':'.
    fn parse_inline_flags(&mut self) -> Result<(), ParseError> {
        let mut negate = false;
        while let Some(b) = self.peek() {
            match b {
                b')' | b':' => return Ok(()),
                b'-' => {
                    negate = true;
                    self.bump();
                }
                b'i' => {
                    self.ci = !negate;
                    self.bump();
                }
                c if b"msxuUJnX".contains(&c) => {
                    self.warnings.push(format!(
                        "inline flag '{}' has no effect on this analysis and was ignored",
                        c as char
                    ));
                    self.bump();
                }
                c => {
                    return Err(self.unsupported(&format!(
                        "(?{} construct",
                        c as char
                    )))
                }
            }
        }
        Err(ParseError::UnbalancedGroup)
    }

    fn parse_escape_atom(&mut self) -> Result<Ast, ParseError> {
        let b = self.bump().ok_or(ParseError::TrailingBackslash)?;
        if let Some(cs) = self.class_escape(b)? {
            return Ok(Ast::Constant(cs));
        }
        match b {
            b'b' => Err(self.unsupported("word boundary \\b")),
            b'B' => Err(self.unsupported("word boundary \\B")),
            b'A' | b'z' | b'Z' | b'G' => {
                Err(self.unsupported(&format!("anchor escape \\{}", b as char)))
            }
            b'Q' => Err(self.unsupported("\\Q...\\E quoting")),
            b'c' => Err(self.unsupported("control escape \\c")),
            b'p' | b'P' => Err(self.unsupported("unicode property escape")),
            b'k' => Err(self.unsupported("named back-reference")),
            b'1'..=b'9' => Err(self.unsupported(&format!("back-reference \\{}", b as char))),
            c if c.is_ascii_alphanumeric() => {
                Err(self.unsupported(&format!("unknown escape \\{}", c as char)))
            }
            c => Ok(self.literal(c)),
        }
    }

    /// Escapes meaningful both standalone and inside classes. Returns
    /// None for letters that are not simple byte/set escapes.
    fn class_escape(&mut self, b: u8) -> Result<Option<CharSet>, ParseError> {
        let fold = |cs: CharSet, ci: bool| if ci { cs.case_fold() } else { cs };
        let set = match b {
            b'd' => Some(CharSet::digit()),
            b'D' => Some(CharSet::digit().complement()),
            b'w' => Some(CharSet::word()),
            b'W' => Some(CharSet::word().complement()),
            b's' => Some(CharSet::space()),
            b'S' => Some(CharSet::space().complement()),
            b'n' => Some(CharSet::byte(b'\n')),
            b'r' => Some(CharSet::byte(b'\r')),
            b't' => Some(CharSet::byte(b'\t')),
            b'f' => Some(CharSet::byte(0x0c)),
            b'v' => Some(CharSet::byte(0x0b)),
            b'a' => Some(CharSet::byte(0x07)),
            b'e' => Some(CharSet::byte(0x1b)),
            b'0' => Some(CharSet::byte(0x00)),
            b'x' => Some(self.parse_hex_escape()?),
            _ => None,
        };
        // Case folding matters only for letter bytes; \xHH of a letter
        // under (?i) folds like a literal.
        Ok(set.map(|cs| match b {
            b'x' => fold(cs, self.ci),
            _ => cs,
        }))
    }

    fn parse_hex_escape(&mut self) -> Result<CharSet, ParseError> {
        if self.eat(b'{') {
            let mut v: u32 = 0;
            let mut digits = 0;
            while let Some(b) = self.peek() {
                if b == b'}' {
                    break;
                }
                let d = (b as char).to_digit(16).ok_or(ParseError::BadHexEscape)?;
                v = v * 16 + d;
                digits += 1;
                if digits > 6 {
                    return Err(ParseError::BadHexEscape);
                }
                self.bump();
            }
            if !self.eat(b'}') || digits == 0 {
                return Err(ParseError::BadHexEscape);
            }
            if v > 0xff {
                return Err(self.unsupported("hex escape beyond \\xff"));
            }
            return Ok(CharSet::byte(v as u8));
        }
        // Up to two hex digits; none at all means NUL, as in PCRE.
        let mut v: u32 = 0;
        for _ in 0..2 {
            match self.peek().and_then(|b| (b as char).to_digit(16)) {
                Some(d) => {
                    v = v * 16 + d;
                    self.bump();
                }
                None => break,
            }
        }
        Ok(CharSet::byte(v as u8))
    }

    fn parse_class(&mut self) -> Result<Ast, ParseError> {
        let negated = self.eat(b'^');
        let mut set = CharSet::empty();
        let mut first = true;
        loop {
            let b = self.bump().ok_or(ParseError::UnterminatedClass)?;
            match b {
                b']' if !first => break,
                b'[' if self.peek() == Some(b':') => {
                    return Err(self.unsupported("POSIX [:class:]"));
                }
                _ => {}
            }
            first = false;
            match self.parse_class_element(b)? {
                ClassElement::Byte(lo) => {
                    // A '-' between two single bytes forms a range; a '-'
                    // at the end of the class is a literal.
                    if self.peek() == Some(b'-') && self.input.get(self.pos + 1) != Some(&b']')
                    {
                        self.bump();
                        let hb = self.bump().ok_or(ParseError::UnterminatedClass)?;
                        match self.parse_class_element(hb)? {
                            ClassElement::Byte(hi) => {
                                if lo > hi {
                                    return Err(ParseError::BadRange);
                                }
                                set = set.union(&CharSet::range(lo, hi));
                            }
                            ClassElement::Set(_) => return Err(ParseError::BadRange),
                        }
                    } else {
                        set = set.union(&CharSet::byte(lo));
                    }
                }
                ClassElement::Set(s) => set = set.union(&s),
            }
        }
        if self.ci {
            set = set.case_fold();
        }
        if negated {
            set = set.complement();
        }
        if set.is_empty() {
            return Err(ParseError::EmptyClass);
        }
        Ok(Ast::Constant(set))
    }

    fn parse_class_element(&mut self, b: u8) -> Result<ClassElement, ParseError> {
        if b != b'\\' {
            return Ok(ClassElement::Byte(b));
        }
        let e = self.bump().ok_or(ParseError::UnterminatedClass)?;
        if let Some(cs) = self.class_escape(e)? {
            return Ok(if cs.len() == 1 {
                ClassElement::Byte(cs.min_byte().unwrap())
            } else {
                ClassElement::Set(cs)
            });
        }
        match e {
            b'b' => Ok(ClassElement::Byte(0x08)),
            c if c.is_ascii_alphanumeric() => {
                Err(self.unsupported(&format!("unknown class escape \\{}", c as char)))
            }
            c => Ok(ClassElement::Byte(c)),
        }
    }
}

enum ClassElement {
    Byte(u8),
    Set(CharSet),
}

enum Quant {
    Star,
    Plus,
    Opt,
    Bounds,
}

fn star(body: Ast, greedy: bool) -> Ast {
    Ast::Star {
        body: Box::new(body),
        greedy,
    }
}

/// `e{m,n}` → m copies of e followed by nested optionals
/// (opt(n-m) = ε | e·opt(n-m-1), innermost `e|ε`); `e{m,}` → m copies
/// followed by `e*`. Expansion is linear in the larger bound.
fn expand_bounds(e: Ast, m: u32, n: u32, greedy: bool) -> Result<Ast, ParseError> {
    let mut items: Vec<Ast> = Vec::new();
    for _ in 0..m {
        items.push(e.clone());
    }
    if n == u32::MAX {
        items.push(star(e, greedy));
    } else {
        let extra = n - m;
        if extra > 0 {
            let mut chain = Ast::alt(e.clone(), Ast::Epsilon);
            for _ in 1..extra {
                chain = Ast::alt(Ast::concat_all(vec![e.clone(), chain]), Ast::Epsilon);
            }
            items.push(chain);
        }
    }
    Ok(Ast::concat_all(items))
}

/// Anchors are first-class nodes but may appear only at the outer edges
/// of the pattern: `^` as the head of the flattened top-level
/// concatenation, `$` as its tail. Anywhere else their positional
/// semantics cannot be represented, so the pattern is unsupported.
fn validate_anchors(ast: &Ast) -> Result<(), ParseError> {
    let mut spine = Vec::new();
    flatten_concat(ast, &mut spine);
    let last = spine.len() - 1;
    for (i, item) in spine.iter().enumerate() {
        match item {
            Ast::AnchorStart if i == 0 => {}
            Ast::AnchorEnd if i == last => {}
            _ => {
                if contains_anchor(item) {
                    return Err(ParseError::UnsupportedConstruct {
                        construct: "anchor not at pattern edge".to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}

fn flatten_concat<'a>(ast: &'a Ast, out: &mut Vec<&'a Ast>) {
    match ast {
        Ast::Concat(l, r) => {
            flatten_concat(l, out);
            flatten_concat(r, out);
        }
        other => out.push(other),
    }
}

fn contains_anchor(ast: &Ast) -> bool {
    match ast {
        Ast::AnchorStart | Ast::AnchorEnd => true,
        Ast::Epsilon | Ast::Constant(_) => false,
        Ast::Star { body, .. } => contains_anchor(body),
        Ast::Concat(l, r) | Ast::Alt(l, r) => contains_anchor(l) || contains_anchor(r),
    }
}
