//! Desugared pattern syntax.
//!
//! The analysis works over a minimal core: alternation, concatenation,
//! Kleene star, byte-set constants, epsilon, and the two anchors. The
//! parser expands `e+`, `e?` and `e{m,n}` into this core, so everything
//! past the parser deals with exactly these seven shapes.
//!
//! Concatenations and alternations fold to the right, so `abc` is
//! `Concat(a, Concat(b, c))`. Quantifier greediness is recorded on `Star`
//! for reporting but has no semantic effect here.

use crate::charset::CharSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ast {
    /// Matches the empty string.
    Epsilon,
    /// Matches one byte from the set. The set is never empty.
    Constant(CharSet),
    Concat(Box<Ast>, Box<Ast>),
    Alt(Box<Ast>, Box<Ast>),
    Star { body: Box<Ast>, greedy: bool },
    /// `^`: matches the empty string at offset 0 only.
    AnchorStart,
    /// `$`: matches the empty string at end of input only.
    AnchorEnd,
}

impl Ast {
    pub fn concat(l: Ast, r: Ast) -> Ast {
        Ast::Concat(Box::new(l), Box::new(r))
    }

    pub fn alt(l: Ast, r: Ast) -> Ast {
        Ast::Alt(Box::new(l), Box::new(r))
    }

    pub fn star(body: Ast) -> Ast {
        Ast::Star {
            body: Box::new(body),
            greedy: true,
        }
    }

    /// Right-folds a sequence into nested concats; empty yields Epsilon.
    /// Right-folds items into a concatenation. Epsilon items (empty
    /// groups, zero-width leftovers of desugaring) are dropped so they
    /// never separate an anchor from the pattern edge.
    pub fn concat_all(items: Vec<Ast>) -> Ast {
        let mut it = items
            .into_iter()
            .filter(|x| !matches!(x, Ast::Epsilon))
            .rev();
        let Some(last) = it.next() else {
            return Ast::Epsilon;
        };
        it.fold(last, |acc, x| Ast::concat(x, acc))
    }

    pub fn node_count(&self) -> usize {
        match self {
            Ast::Epsilon | Ast::Constant(_) | Ast::AnchorStart | Ast::AnchorEnd => 1,
            Ast::Star { body, .. } => 1 + body.node_count(),
            Ast::Concat(l, r) | Ast::Alt(l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    /// Renders the desugared tree back to pattern syntax. Parsing the
    /// result reproduces the tree up to concatenation regrouping:
    /// alternation and star grouping is explicit, no sugar is
    /// reintroduced, but juxtaposition cannot record how a chain of
    /// concatenations was nested, so it folds back to the right.
    pub fn to_pattern(&self) -> String {
        let mut s = String::new();
        self.write_pattern(&mut s);
        s
    }

    fn write_pattern(&self, out: &mut String) {
        match self {
            Ast::Epsilon => out.push_str("(?:)"),
            Ast::Constant(cs) => write_charset(cs, out),
            Ast::Concat(l, r) => {
                write_child(l, out, matches!(**l, Ast::Alt(..)));
                write_child(r, out, matches!(**r, Ast::Alt(..)));
            }
            Ast::Alt(l, r) => {
                out.push_str("(?:");
                l.write_pattern(out);
                out.push('|');
                r.write_pattern(out);
                out.push(')');
            }
            Ast::Star { body, greedy } => {
                // Grouping every body keeps the printer simple and unambiguous.
                out.push_str("(?:");
                body.write_pattern(out);
                out.push_str(")*");
                if !greedy {
                    out.push('?');
                }
            }
            Ast::AnchorStart => out.push('^'),
            Ast::AnchorEnd => out.push('$'),
        }
    }
}

fn write_child(child: &Ast, out: &mut String, group: bool) {
    if group {
        out.push_str("(?:");
        child.write_pattern(out);
        out.push(')');
    } else {
        child.write_pattern(out);
    }
}

fn write_charset(cs: &CharSet, out: &mut String) {
    if cs.len() == 1 {
        write_literal_byte(cs.min_byte().unwrap(), out);
        return;
    }
    if *cs == CharSet::dot() {
        out.push('.');
        return;
    }
    out.push('[');
    for &(lo, hi) in cs.ranges() {
        if lo == hi {
            write_class_byte(lo, out);
        } else if hi == lo + 1 {
            write_class_byte(lo, out);
            write_class_byte(hi, out);
        } else {
            write_class_byte(lo, out);
            out.push('-');
            write_class_byte(hi, out);
        }
    }
    out.push(']');
}

fn write_literal_byte(b: u8, out: &mut String) {
    match b {
        b'\\' | b'.' | b'*' | b'+' | b'?' | b'(' | b')' | b'[' | b']' | b'{' | b'}' | b'|'
        | b'^' | b'$' | b'/' => {
            out.push('\\');
            out.push(b as char);
        }
        0x20..=0x7e => out.push(b as char),
        _ => out.push_str(&format!("\\x{:02x}", b)),
    }
}

fn write_class_byte(b: u8, out: &mut String) {
    match b {
        b'\\' | b']' | b'^' | b'-' => {
            out.push('\\');
            out.push(b as char);
        }
        0x21..=0x7e => out.push(b as char),
        _ => out.push_str(&format!("\\x{:02x}", b)),
    }
}
