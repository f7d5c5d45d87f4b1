//! Static detection of ambiguous Kleene iteration. The analysis tracks the
//! frontier of constant nodes a pattern fragment can be at after consuming a
//! string, one list entry per distinct way of getting there. A star whose
//! body can consume some non-empty string in two distinct ways and return to
//! the star is pumpable: repeating that string multiplies the number of ways
//! a backtracking matcher must try, which is the seed of exponential blowup.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::arena::{Code, ExprArena, NodeId, NodeKind};
use crate::charset::CharSet;
use crate::machine;

/// Constant nodes reachable from `p` without consuming input, in
/// depth-first order, one occurrence per distinct route (capped at two
/// occurrences per node, the multiplicity the search distinguishes).
pub fn evolve(arena: &ExprArena, p: NodeId) -> Vec<NodeId> {
    machine::eps_constant_arrivals(arena, Code::Node(p))
}

/// Advances a frontier by one consumed byte: constants that match emit
/// their continuation; non-constants are expanded in place via [`evolve`]
/// first. Occurrences of the same continuation are capped at two.
pub fn derive(arena: &ExprArena, byte: u8, p: &[Code]) -> Vec<Code> {
    Frontier::new(arena).derive(byte, p)
}

/// The bytes that advance the frontier at all: the union of the character
/// sets of every constant in the evolved view of `p`.
pub fn relevant_symbols(arena: &ExprArena, p: &[Code]) -> CharSet {
    Frontier::new(arena).relevant_symbols(p)
}

/// A pumpable string found for one star node, together with the search
/// effort spent finding it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PumpableWitness {
    pub kleene: NodeId,
    pub pump: Vec<u8>,
    pub hfpi_steps: u64,
}

/// Result of the pumpable-string search for one star node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PumpOutcome {
    Pumpable(PumpableWitness),
    NotPumpable { steps: u64 },
    CapExceeded { steps: u64 },
}

impl PumpOutcome {
    pub fn steps(&self) -> u64 {
        match self {
            PumpOutcome::Pumpable(w) => w.hfpi_steps,
            PumpOutcome::NotPumpable { steps } | PumpOutcome::CapExceeded { steps } => *steps,
        }
    }

    pub fn is_pumpable(&self) -> bool {
        matches!(self, PumpOutcome::Pumpable(_))
    }
}

/// Searches breadth-first for the shortest string the body of `kleene` can
/// consume in two distinct ways while returning to the star. Frontiers are
/// explored one representative byte per equivalence class, and a frontier
/// whose canonical key was already seen is not queued again, which makes
/// the state space finite. Every returned witness is re-checked by path
/// enumeration before it is reported.
///
/// Panics if `kleene` is not a star node.
pub fn find_pumpable(arena: &ExprArena, kleene: NodeId, cap: u64) -> PumpOutcome {
    let NodeKind::Star { body, .. } = *arena.kind(kleene) else {
        panic!("find_pumpable requires a star node");
    };
    let mut frontier = Frontier::new(arena);
    let seed: Vec<Code> = evolve(arena, body).into_iter().map(Code::Node).collect();
    let mut steps: u64 = 0;
    if seed.is_empty() {
        return PumpOutcome::NotPumpable { steps };
    }
    let mut history: HashSet<Vec<Code>> = HashSet::new();
    history.insert(canonical_key(&seed));
    let mut queue: VecDeque<(Vec<u8>, Vec<Code>)> = VecDeque::new();
    queue.push_back((Vec::new(), seed));

    while let Some((w, p)) = queue.pop_front() {
        if steps == cap {
            return PumpOutcome::CapExceeded { steps };
        }
        if ambiguous(arena, &p, kleene) && witness_verified(arena, body, &w, kleene) {
            return PumpOutcome::Pumpable(PumpableWitness {
                kleene,
                pump: w,
                hfpi_steps: steps,
            });
        }
        for byte in frontier.class_representatives(&p) {
            let next = frontier.derive(byte, &p);
            if next.is_empty() {
                continue;
            }
            if history.insert(canonical_key(&next)) {
                let mut grown = w.clone();
                grown.push(byte);
                queue.push_back((grown, next));
            }
        }
        steps += 1;
    }
    PumpOutcome::NotPumpable { steps }
}

/// Two or more frontier positions with an epsilon route back to the star
/// mean the consumed string admits two distinct iteration histories.
fn ambiguous(arena: &ExprArena, p: &[Code], kleene: NodeId) -> bool {
    p.iter()
        .filter(|&&c| machine::eps_reaches(arena, c, kleene))
        .count()
        >= 2
}

fn witness_verified(arena: &ExprArena, body: NodeId, w: &[u8], kleene: NodeId) -> bool {
    machine::enumerate_paths_to(arena, body, w, kleene, 2)
        .paths()
        .len()
        >= 2
}

fn canonical_key(p: &[Code]) -> Vec<Code> {
    let mut key = p.to_vec();
    key.sort_unstable();
    key
}

fn cap_multiplicity(list: Vec<Code>) -> Vec<Code> {
    let mut counts: HashMap<Code, u8> = HashMap::new();
    list.into_iter()
        .filter(|c| {
            let n = counts.entry(*c).or_insert(0);
            *n += 1;
            *n <= 2
        })
        .collect()
}

/// Frontier operations with a per-arena cache of evolve results, shared
/// across the many derive calls of one search.
struct Frontier<'a> {
    arena: &'a ExprArena,
    evolved: HashMap<Code, Vec<NodeId>>,
}

impl<'a> Frontier<'a> {
    fn new(arena: &'a ExprArena) -> Frontier<'a> {
        Frontier {
            arena,
            evolved: HashMap::new(),
        }
    }

    fn evolved(&mut self, code: Code) -> Vec<NodeId> {
        let arena = self.arena;
        self.evolved
            .entry(code)
            .or_insert_with(|| machine::eps_constant_arrivals(arena, code))
            .clone()
    }

    /// The evolved view of a frontier: every position flattened to the
    /// constants it stands for.
    fn constants_of(&mut self, p: &[Code]) -> Vec<NodeId> {
        let mut out = Vec::new();
        for &h in p {
            match h {
                Code::Node(id) if matches!(self.arena.kind(id), NodeKind::Constant(_)) => {
                    out.push(id)
                }
                _ => out.extend(self.evolved(h)),
            }
        }
        out
    }

    fn derive(&mut self, byte: u8, p: &[Code]) -> Vec<Code> {
        let mut out = Vec::new();
        for id in self.constants_of(p) {
            if let NodeKind::Constant(cs) = self.arena.kind(id) {
                if cs.contains(byte) {
                    out.push(self.arena.kont(id));
                }
            }
        }
        cap_multiplicity(out)
    }

    fn relevant_symbols(&mut self, p: &[Code]) -> CharSet {
        let mut set = CharSet::empty();
        for id in self.constants_of(p) {
            if let NodeKind::Constant(cs) = self.arena.kind(id) {
                set = set.union(cs);
            }
        }
        set
    }

    /// One byte per class of bytes indistinguishable by the frontier (they
    /// match exactly the same constants), ascending. Expanding only the
    /// representatives loses nothing: equal derive results would be
    /// history-deduplicated anyway.
    fn class_representatives(&mut self, p: &[Code]) -> Vec<u8> {
        let mut sets: Vec<CharSet> = Vec::new();
        for id in self.constants_of(p) {
            if let NodeKind::Constant(cs) = self.arena.kind(id) {
                if !sets.contains(cs) {
                    sets.push(cs.clone());
                }
            }
        }
        let mut union = CharSet::empty();
        for cs in &sets {
            union = union.union(cs);
        }
        let mut seen: HashSet<Vec<bool>> = HashSet::new();
        let mut reps = Vec::new();
        for byte in union.iter_bytes() {
            let signature: Vec<bool> = sets.iter().map(|cs| cs.contains(byte)).collect();
            if seen.insert(signature) {
                reps.push(byte);
            }
        }
        reps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;
    use crate::pattern::SourcePattern;

    fn arena_of(pattern: &str) -> ExprArena {
        let outcome = parse(&SourcePattern::new(pattern.as_bytes().to_vec())).unwrap();
        ExprArena::build(&outcome.ast)
    }

    fn n(i: u32) -> NodeId {
        NodeId::from_u32(i)
    }

    fn star_of(arena: &ExprArena, index: usize) -> NodeId {
        arena.kleene_nodes()[index]
    }

    fn witness(pattern: &str, index: usize) -> PumpOutcome {
        let arena = arena_of(pattern);
        find_pumpable(&arena, star_of(&arena, index), 100_000)
    }

    fn pump_of(outcome: &PumpOutcome) -> &[u8] {
        match outcome {
            PumpOutcome::Pumpable(w) => &w.pump,
            other => panic!("expected a pumpable witness, got {other:?}"),
        }
    }

    #[test]
    fn evolve_collects_the_constant_frontier() {
        // (a|b)*c: 0 cat, 1 star, 2 alt, 3 const a, 4 const b, 5 const c.
        let arena = arena_of("(a|b)*c");
        assert_eq!(evolve(&arena, n(2)), vec![n(3), n(4)]);
        assert_eq!(evolve(&arena, n(3)), vec![n(3)]);
    }

    #[test]
    fn evolve_sees_through_nullable_loops_exactly_once() {
        // (a?)*: 0 star, 1 alt, 2 const a, 3 epsilon.
        let arena = arena_of("(a?)*");
        assert_eq!(evolve(&arena, n(1)), vec![n(2)]);
        // (|a)* behaves the same with the branches flipped.
        let arena = arena_of("(|a)*");
        assert_eq!(evolve(&arena, n(1)), vec![n(3)]);
    }

    #[test]
    fn evolve_counts_reentry_through_an_outer_star() {
        // a**: 0 outer star, 1 inner star, 2 const a.
        let arena = arena_of("a**");
        assert_eq!(evolve(&arena, n(1)), vec![n(2), n(2)]);
    }

    #[test]
    fn derive_steps_to_continuations() {
        let arena = arena_of("(a|b)*c");
        assert_eq!(
            derive(&arena, b'a', &[Code::Node(n(3)), Code::Node(n(4))]),
            vec![Code::Node(n(1))]
        );
        assert_eq!(derive(&arena, b'c', &[]), vec![]);
    }

    #[test]
    fn derive_preserves_ambiguous_multiplicity() {
        // (a|a)*: 0 star, 1 alt, 2 const a, 3 const a.
        let arena = arena_of("(a|a)*");
        let body = evolve(&arena, n(1));
        assert_eq!(body, vec![n(2), n(3)]);
        let frontier: Vec<Code> = body.into_iter().map(Code::Node).collect();
        assert_eq!(
            derive(&arena, b'a', &frontier),
            vec![Code::Node(n(0)), Code::Node(n(0))]
        );
    }

    #[test]
    fn derive_caps_each_value_at_two_occurrences() {
        // (a|a|a)* has three constants all continuing to the star.
        let arena = arena_of("(a|a|a)*");
        let star = star_of(&arena, 0);
        let NodeKind::Star { body, .. } = *arena.kind(star) else {
            unreachable!()
        };
        let frontier: Vec<Code> = evolve(&arena, body).into_iter().map(Code::Node).collect();
        assert_eq!(frontier.len(), 3);
        let next = derive(&arena, b'a', &frontier);
        assert_eq!(next, vec![Code::Node(star), Code::Node(star)]);
    }

    #[test]
    fn derive_splices_nonconstant_positions() {
        // a*: 0 star, 1 const a. Deriving from the star position itself
        // expands it to its constant frontier first.
        let arena = arena_of("a*");
        assert_eq!(
            derive(&arena, b'a', &[Code::Node(n(0))]),
            vec![Code::Node(n(0))]
        );
        assert_eq!(derive(&arena, b'b', &[Code::Node(n(0))]), vec![]);
        assert_eq!(derive(&arena, b'a', &[Code::Terminal]), vec![]);
    }

    #[test]
    fn relevant_symbols_are_the_frontier_union() {
        let arena = arena_of("(a|b)*c");
        let set = relevant_symbols(&arena, &[Code::Node(n(3)), Code::Node(n(4))]);
        assert!(set.contains(b'a') && set.contains(b'b') && !set.contains(b'c'));
        assert!(relevant_symbols(&arena, &[]).is_empty());

        let negated = arena_of("[^\\x00]*");
        let star = star_of(&negated, 0);
        let set = relevant_symbols(&negated, &[Code::Node(star)]);
        assert_eq!(set.len(), 255);
        assert!(!set.contains(0));
    }

    #[test]
    fn ambiguous_alternation_is_pumpable() {
        let outcome = witness("(a|a)*", 0);
        assert_eq!(pump_of(&outcome), b"a");
    }

    #[test]
    fn plain_star_is_not_pumpable() {
        assert!(matches!(
            witness("a*", 0),
            PumpOutcome::NotPumpable { .. }
        ));
    }

    #[test]
    fn nested_stars_are_pumpable_from_both_levels() {
        let outcome = witness("(a*)*", 0);
        assert_eq!(pump_of(&outcome), b"a");
        // The inner star is pumpable too: its body can return to it either
        // directly or by exiting to the outer star and re-entering.
        let inner = witness("(a*)*", 1);
        assert_eq!(pump_of(&inner), b"aa");
    }

    #[test]
    fn double_star_is_pumpable_from_both_levels() {
        let outer = witness("a**", 0);
        assert_eq!(pump_of(&outer), b"a");
        let inner = witness("a**", 1);
        assert_eq!(pump_of(&inner), b"aa");
    }

    #[test]
    fn nullable_bodies_without_ambiguity_are_not_pumpable() {
        assert!(matches!(
            witness("(a?)*", 0),
            PumpOutcome::NotPumpable { .. }
        ));
        assert!(matches!(
            witness("(|a)*", 0),
            PumpOutcome::NotPumpable { .. }
        ));
        assert!(matches!(witness("()*", 0), PumpOutcome::NotPumpable { steps: 0 }));
    }

    #[test]
    fn unambiguous_alternation_and_sequence_are_not_pumpable() {
        assert!(matches!(
            witness("(a|b)*", 0),
            PumpOutcome::NotPumpable { .. }
        ));
        assert!(matches!(
            witness("(ab)*", 0),
            PumpOutcome::NotPumpable { .. }
        ));
    }

    #[test]
    fn overlapping_alternatives_pump_with_the_longer_word() {
        let outcome = witness("(aa|aa)*", 0);
        assert_eq!(pump_of(&outcome), b"aa");
        let outcome = witness("(a|aa)*", 0);
        assert_eq!(pump_of(&outcome), b"aa");
    }

    #[test]
    fn nested_pair_star_pumps_with_doubled_body() {
        let outer = witness("((aa)*)*", 0);
        assert_eq!(pump_of(&outer), b"aa");
        let inner = witness("((aa)*)*", 1);
        assert_eq!(pump_of(&inner), b"aaaa");
    }

    #[test]
    fn clock_pattern_pumps_with_a_five_byte_witness() {
        let pattern = "^(([01][0-9]|[012][0-3]):([0-5][0-9]))*$";
        let arena = arena_of(pattern);
        let star = star_of(&arena, 0);
        let outcome = find_pumpable(&arena, star, 100_000);
        let PumpOutcome::Pumpable(w) = &outcome else {
            panic!("expected pumpable, got {outcome:?}");
        };
        assert_eq!(w.pump, b"00:00");
        assert_eq!(w.kleene, star);
        assert!(w.hfpi_steps < 50, "took {} steps", w.hfpi_steps);
    }

    #[test]
    fn cap_stops_the_search_and_reports_it() {
        let pattern = "^(([01][0-9]|[012][0-3]):([0-5][0-9]))*$";
        let arena = arena_of(pattern);
        let outcome = find_pumpable(&arena, star_of(&arena, 0), 3);
        assert_eq!(outcome, PumpOutcome::CapExceeded { steps: 3 });
    }

    #[test]
    fn witnesses_are_shortest_for_their_star() {
        // The inner star of a** pumps with "aa"; no single byte admits two
        // routes from its body back to it.
        let arena = arena_of("a**");
        let paths = machine::enumerate_paths_to(&arena, n(2), b"a", n(1), 2);
        assert_eq!(paths.paths().len(), 1);
    }

    #[test]
    fn search_is_deterministic() {
        let pattern = "^(([01][0-9]|[012][0-3]):([0-5][0-9]))*$";
        let arena = arena_of(pattern);
        let first = find_pumpable(&arena, star_of(&arena, 0), 100_000);
        let second = find_pumpable(&arena, star_of(&arena, 0), 100_000);
        assert_eq!(first, second);
    }
}
