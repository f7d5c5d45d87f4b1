//! Byte sets used by `Constant` nodes.
//!
//! The alphabet is the full byte range 0..=255. A `CharSet` is stored as a
//! normalized list of closed ranges: sorted, non-overlapping, non-adjacent.
//! Negated character classes are resolved to their complement at
//! construction time, so downstream code never sees a negation flag.

use std::fmt;

/// A set of bytes, normalized as sorted disjoint non-adjacent ranges.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CharSet {
    ranges: Vec<(u8, u8)>,
}

impl CharSet {
    /// The empty set.
    pub fn empty() -> Self {
        CharSet { ranges: Vec::new() }
    }

    /// The full byte range 0..=255.
    pub fn any() -> Self {
        CharSet {
            ranges: vec![(0, 255)],
        }
    }

    /// A single byte.
    pub fn byte(b: u8) -> Self {
        CharSet {
            ranges: vec![(b, b)],
        }
    }

    /// A closed range `lo..=hi`. Empty if `lo > hi`.
    pub fn range(lo: u8, hi: u8) -> Self {
        if lo > hi {
            CharSet::empty()
        } else {
            CharSet {
                ranges: vec![(lo, hi)],
            }
        }
    }

    /// Builds from arbitrary (possibly overlapping, unsorted) ranges.
    pub fn from_ranges(ranges: impl IntoIterator<Item = (u8, u8)>) -> Self {
        let mut set = CharSet::empty();
        for (lo, hi) in ranges {
            set = set.union(&CharSet::range(lo, hi));
        }
        set
    }

    /// `[0-9]`.
    pub fn digit() -> Self {
        CharSet::range(b'0', b'9')
    }

    /// `[0-9A-Za-z_]`.
    pub fn word() -> Self {
        CharSet::from_ranges([(b'0', b'9'), (b'A', b'Z'), (b'a', b'z'), (b'_', b'_')])
    }

    /// `[\t\n\x0B\f\r ]`.
    pub fn space() -> Self {
        CharSet::from_ranges([(b'\t', b'\r'), (b' ', b' ')])
    }

    /// `.`: every byte except `\n`.
    pub fn dot() -> Self {
        CharSet::byte(b'\n').complement()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn contains(&self, b: u8) -> bool {
        self.ranges
            .binary_search_by(|&(lo, hi)| {
                if b < lo {
                    std::cmp::Ordering::Greater
                } else if b > hi {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .is_ok()
    }

    pub fn len(&self) -> usize {
        self.ranges
            .iter()
            .map(|&(lo, hi)| hi as usize - lo as usize + 1)
            .sum()
    }

    pub fn ranges(&self) -> &[(u8, u8)] {
        &self.ranges
    }

    /// Smallest member, if any.
    pub fn min_byte(&self) -> Option<u8> {
        self.ranges.first().map(|&(lo, _)| lo)
    }

    /// Members in ascending order.
    pub fn iter_bytes(&self) -> impl Iterator<Item = u8> + '_ {
        self.ranges.iter().flat_map(|&(lo, hi)| lo..=hi)
    }

    pub fn union(&self, other: &CharSet) -> CharSet {
        let mut all: Vec<(u8, u8)> = self
            .ranges
            .iter()
            .chain(other.ranges.iter())
            .copied()
            .collect();
        all.sort_unstable();
        let mut out: Vec<(u8, u8)> = Vec::with_capacity(all.len());
        for (lo, hi) in all {
            match out.last_mut() {
                // Merge overlapping or adjacent ranges.
                Some(&mut (_, ref mut phi)) if lo as u16 <= *phi as u16 + 1 => {
                    *phi = (*phi).max(hi);
                }
                _ => out.push((lo, hi)),
            }
        }
        CharSet { ranges: out }
    }

    pub fn complement(&self) -> CharSet {
        let mut out = Vec::new();
        let mut next: u16 = 0;
        for &(lo, hi) in &self.ranges {
            if (lo as u16) > next {
                out.push((next as u8, lo - 1));
            }
            next = hi as u16 + 1;
        }
        if next <= 255 {
            out.push((next as u8, 255));
        }
        CharSet { ranges: out }
    }

    /// Adds the ASCII case partner of every letter in the set.
    pub fn case_fold(&self) -> CharSet {
        let mut extra = CharSet::empty();
        for b in self.iter_bytes() {
            if b.is_ascii_uppercase() {
                extra = extra.union(&CharSet::byte(b.to_ascii_lowercase()));
            } else if b.is_ascii_lowercase() {
                extra = extra.union(&CharSet::byte(b.to_ascii_uppercase()));
            }
        }
        self.union(&extra)
    }

    /// Compact display used by the arena dump and text reports: a lone
    /// printable byte shows as itself, everything else as ranges.
    pub fn describe(&self) -> String {
        if self.len() == 1 {
            let b = self.min_byte().unwrap();
            return crate::report::escape_byte(b);
        }
        if self.len() == 256 {
            return "[\\x00-\\xff]".to_string();
        }
        let mut s = String::from("[");
        for &(lo, hi) in &self.ranges {
            if lo == hi {
                s.push_str(&crate::report::escape_byte(lo));
            } else {
                s.push_str(&crate::report::escape_byte(lo));
                s.push('-');
                s.push_str(&crate::report::escape_byte(hi));
            }
        }
        s.push(']');
        s
    }
}

impl fmt::Debug for CharSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CharSet({})", self.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: membership decided per byte against the raw constructor
    /// arguments, independent of the normalized representation.
    fn naive_member(ranges: &[(u8, u8)], b: u8) -> bool {
        ranges.iter().any(|&(lo, hi)| lo <= b && b <= hi)
    }

    fn assert_normalized(set: &CharSet) {
        let r = set.ranges();
        for w in r.windows(2) {
            let (_, hi0) = w[0];
            let (lo1, _) = w[1];
            assert!(
                (hi0 as u16) + 1 < lo1 as u16,
                "ranges not disjoint/non-adjacent: {:?}",
                r
            );
        }
        for &(lo, hi) in r {
            assert!(lo <= hi);
        }
    }

    #[test]
    fn union_normalizes_and_preserves_membership() {
        let raw = [(10u8, 20u8), (15, 30), (31, 31), (200, 255), (0, 0)];
        let set = CharSet::from_ranges(raw);
        assert_normalized(&set);
        for b in 0..=255u8 {
            assert_eq!(set.contains(b), naive_member(&raw, b), "byte {}", b);
        }
    }

    #[test]
    fn complement_is_exact() {
        let set = CharSet::from_ranges([(b'a', b'z'), (0, 5)]);
        let co = set.complement();
        assert_normalized(&co);
        for b in 0..=255u8 {
            assert_eq!(co.contains(b), !set.contains(b));
        }
        assert_eq!(CharSet::any().complement().len(), 0);
        assert_eq!(CharSet::empty().complement().len(), 256);
    }

    #[test]
    fn dot_excludes_newline_only() {
        let dot = CharSet::dot();
        assert!(!dot.contains(b'\n'));
        assert_eq!(dot.len(), 255);
    }

    #[test]
    fn case_fold_adds_partners() {
        let set = CharSet::range(b'a', b'c').case_fold();
        for b in [b'a', b'b', b'c', b'A', b'B', b'C'] {
            assert!(set.contains(b));
        }
        assert_eq!(set.len(), 6);
        // Non-letters unaffected.
        let digits = CharSet::digit().case_fold();
        assert_eq!(digits, CharSet::digit());
    }

    #[test]
    fn iter_bytes_ascending() {
        let set = CharSet::from_ranges([(5, 7), (1, 2)]);
        let v: Vec<u8> = set.iter_bytes().collect();
        assert_eq!(v, vec![1, 2, 5, 6, 7]);
        assert_eq!(set.min_byte(), Some(1));
    }
}
