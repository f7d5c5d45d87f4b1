//! Randomized properties tying the layers together: the printer against
//! the parser, desugaring against a naive interpreter, continuation links
//! against their structural rules, frontier derivation against path
//! enumeration, the matcher against plain reachability, and report
//! structure against its documented invariants.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use proptest::prelude::*;

use redos_core::analysis::{derive, evolve};
use redos_core::arena::{Code, ExprArena, NodeId, NodeKind};
use redos_core::attack::{classify, AnalysisConfig, Classification};
use redos_core::charset::CharSet;
use redos_core::machine::{self, pwf_run, MatchStatus, PwConfig};
use redos_core::pattern::SourcePattern;
use redos_core::report;

fn ast_for(text: &str) -> redos_core::ast::Ast {
    let sp = SourcePattern::new(text.as_bytes().to_vec());
    let outcome = redos_core::parser::parse(&sp)
        .unwrap_or_else(|e| panic!("generated pattern {text:?} failed to parse: {e}"));
    outcome.ast
}

fn arena_for(text: &str) -> ExprArena {
    ExprArena::build(&ast_for(text))
}

/// Rebuilds every concatenation chain as a right fold, the one grouping
/// choice pattern text cannot record.
fn reassociate(ast: &redos_core::ast::Ast) -> redos_core::ast::Ast {
    use redos_core::ast::Ast;
    fn flatten(ast: &Ast, out: &mut Vec<Ast>) {
        if let Ast::Concat(l, r) = ast {
            flatten(l, out);
            flatten(r, out);
        } else {
            out.push(reassociate(ast));
        }
    }
    match ast {
        Ast::Concat(..) => {
            let mut items = Vec::new();
            flatten(ast, &mut items);
            items
                .into_iter()
                .rev()
                .reduce(|acc, x| Ast::concat(x, acc))
                .unwrap()
        }
        Ast::Alt(l, r) => Ast::alt(reassociate(l), reassociate(r)),
        Ast::Star { body, greedy } => Ast::Star {
            body: Box::new(reassociate(body)),
            greedy: *greedy,
        },
        other => other.clone(),
    }
}

/// Random pattern text over {a, b} with groups, alternation, and the
/// quantifiers the parser desugars. Always well formed.
fn pattern_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        4 => Just("a".to_string()),
        3 => Just("b".to_string()),
        1 => Just("()".to_string()),
    ];
    leaf.prop_recursive(4, 48, 2, |inner| {
        prop_oneof![
            3 => (inner.clone(), inner.clone()).prop_map(|(l, r)| format!("{l}{r}")),
            3 => (inner.clone(), inner.clone()).prop_map(|(l, r)| format!("({l}|{r})")),
            2 => inner.clone().prop_map(|e| format!("({e})*")),
            1 => inner.clone().prop_map(|e| format!("({e})*?")),
            1 => inner.clone().prop_map(|e| format!("({e})?")),
            1 => inner.clone().prop_map(|e| format!("({e})+")),
        ]
    })
}

fn ab_input(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(prop_oneof![Just(b'a'), Just(b'b')], 0..=max)
}

/// Quantified expressions kept in sugared form, so a naive interpreter
/// can define their language independently of the parser's rewriting.
#[derive(Clone, Debug)]
enum Sugar {
    Lit(u8),
    Eps,
    Concat(Box<Sugar>, Box<Sugar>),
    Alt(Box<Sugar>, Box<Sugar>),
    Star(Box<Sugar>),
    Plus(Box<Sugar>),
    Opt(Box<Sugar>),
    Rep(Box<Sugar>, u32, Option<u32>),
}

fn sugar() -> impl Strategy<Value = Sugar> {
    let leaf = prop_oneof![
        4 => Just(Sugar::Lit(b'a')),
        3 => Just(Sugar::Lit(b'b')),
        1 => Just(Sugar::Eps),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            3 => (inner.clone(), inner.clone())
                .prop_map(|(l, r)| Sugar::Concat(l.into(), r.into())),
            2 => (inner.clone(), inner.clone()).prop_map(|(l, r)| Sugar::Alt(l.into(), r.into())),
            2 => inner.clone().prop_map(|e| Sugar::Star(e.into())),
            1 => inner.clone().prop_map(|e| Sugar::Plus(e.into())),
            1 => inner.clone().prop_map(|e| Sugar::Opt(e.into())),
            2 => (inner, 0u32..=2, prop::option::of(0u32..=2)).prop_map(|(e, m, extra)| {
                Sugar::Rep(e.into(), m, extra.map(|x| m + x))
            }),
        ]
    })
}

fn render(e: &Sugar) -> String {
    match e {
        Sugar::Lit(b) => (*b as char).to_string(),
        Sugar::Eps => "()".to_string(),
        Sugar::Concat(l, r) => format!("{}{}", render(l), render(r)),
        Sugar::Alt(l, r) => format!("({}|{})", render(l), render(r)),
        Sugar::Star(b) => format!("({})*", render(b)),
        Sugar::Plus(b) => format!("({})+", render(b)),
        Sugar::Opt(b) => format!("({})?", render(b)),
        Sugar::Rep(b, m, None) => format!("({}){{{m},}}", render(b)),
        Sugar::Rep(b, m, Some(mx)) => format!("({}){{{m},{mx}}}", render(b)),
    }
}

/// End offsets reachable by matching `e` starting at `at`.
fn ends(e: &Sugar, input: &[u8], at: usize) -> BTreeSet<usize> {
    match e {
        Sugar::Lit(b) => {
            if input.get(at) == Some(b) {
                BTreeSet::from([at + 1])
            } else {
                BTreeSet::new()
            }
        }
        Sugar::Eps => BTreeSet::from([at]),
        Sugar::Concat(l, r) => ends(l, input, at)
            .into_iter()
            .flat_map(|m| ends(r, input, m))
            .collect(),
        Sugar::Alt(l, r) => {
            let mut s = ends(l, input, at);
            s.extend(ends(r, input, at));
            s
        }
        Sugar::Opt(b) => {
            let mut s = BTreeSet::from([at]);
            s.extend(ends(b, input, at));
            s
        }
        Sugar::Star(b) => closure(b, input, BTreeSet::from([at])),
        Sugar::Plus(b) => closure(b, input, ends(b, input, at)),
        Sugar::Rep(b, m, max) => {
            let mut set = BTreeSet::from([at]);
            for _ in 0..*m {
                set = set.into_iter().flat_map(|p| ends(b, input, p)).collect();
            }
            match max {
                None => closure(b, input, set),
                Some(mx) => {
                    let mut acc = set.clone();
                    let mut cur = set;
                    for _ in *m..*mx {
                        cur = cur.into_iter().flat_map(|p| ends(b, input, p)).collect();
                        acc.extend(cur.iter().copied());
                    }
                    acc
                }
            }
        }
    }
}

fn closure(b: &Sugar, input: &[u8], start: BTreeSet<usize>) -> BTreeSet<usize> {
    let mut acc = start.clone();
    let mut frontier = start;
    while !frontier.is_empty() {
        let next: BTreeSet<usize> = frontier
            .iter()
            .flat_map(|&p| ends(b, input, p))
            .filter(|p| !acc.contains(p))
            .collect();
        acc.extend(next.iter().copied());
        frontier = next;
    }
    acc
}

/// Offsets at which the configuration graph can reach the end of the
/// pattern, ignoring search order and guards.
fn terminal_offsets(arena: &ExprArena, input: &[u8]) -> HashSet<usize> {
    let start = PwConfig::new(Code::Node(arena.root()), 0);
    let mut seen: HashSet<PwConfig> = HashSet::from([start]);
    let mut queue: VecDeque<PwConfig> = VecDeque::from([start]);
    let mut offsets = HashSet::new();
    while let Some(config) = queue.pop_front() {
        if config.code == Code::Terminal {
            offsets.insert(config.offset);
            continue;
        }
        for succ in machine::successors(arena, config, input) {
            if seen.insert(succ) {
                queue.push_back(succ);
            }
        }
    }
    offsets
}

proptest! {
    #[test]
    fn printed_patterns_reparse_to_the_same_program(
        text in pattern_text(),
        lead in any::<bool>(),
        trail in any::<bool>(),
    ) {
        let full = format!(
            "{}{}{}",
            if lead { "^" } else { "" },
            text,
            if trail { "$" } else { "" }
        );
        let ast = ast_for(&full);
        let printed = ast.to_pattern();
        let reparsed = ast_for(&printed);
        prop_assert_eq!(
            reassociate(&ast),
            reassociate(&reparsed),
            "printed form {:?} parsed to a different program",
            printed
        );
    }

    #[test]
    fn continuation_links_follow_the_structural_rules(text in pattern_text()) {
        let arena = arena_for(&text);
        let root = arena.root();
        prop_assert_eq!(arena.kont(root), Code::Terminal);
        for i in 0..arena.len() as u32 {
            let id = NodeId::from_u32(i);
            match *arena.kind(id) {
                NodeKind::Concat(l, r) => {
                    prop_assert_eq!(arena.kont(l), Code::Node(r));
                    prop_assert_eq!(arena.kont(r), arena.kont(id));
                }
                NodeKind::Alt(l, r) => {
                    prop_assert_eq!(arena.kont(l), arena.kont(id));
                    prop_assert_eq!(arena.kont(r), arena.kont(id));
                }
                NodeKind::Star { body, .. } => {
                    prop_assert_eq!(arena.kont(body), Code::Node(id));
                }
                _ => {}
            }
        }
    }

    #[test]
    fn charset_algebra_matches_byte_membership(
        raw in prop::collection::vec((any::<u8>(), any::<u8>()), 0..4),
        probe in any::<u8>(),
    ) {
        let ranges: Vec<(u8, u8)> = raw
            .into_iter()
            .map(|(x, y)| (x.min(y), x.max(y)))
            .collect();
        let cs = CharSet::from_ranges(ranges.clone());
        let member = ranges.iter().any(|&(lo, hi)| lo <= probe && probe <= hi);
        prop_assert_eq!(cs.contains(probe), member);
        prop_assert_eq!(cs.complement().contains(probe), !member);
        prop_assert_eq!(cs.complement().complement().contains(probe), member);
        prop_assert_eq!(cs.len(), (0u16..=255).filter(|b| cs.contains(*b as u8)).count());
        let folded = cs.case_fold();
        let sibling = if probe.is_ascii_alphabetic() {
            probe ^ 0x20
        } else {
            probe
        };
        prop_assert_eq!(folded.contains(probe), member || cs.contains(sibling));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn sugared_and_desugared_accept_the_same_strings(e in sugar(), input in ab_input(6)) {
        let text = format!("^{}$", render(&e));
        let arena = arena_for(&text);
        let outcome = pwf_run(&arena, &input, 10_000_000);
        prop_assume!(outcome.status != MatchStatus::BudgetExceeded);
        let expected = ends(&e, &input, 0).contains(&input.len());
        match outcome.status {
            MatchStatus::Matched(k) => {
                prop_assert!(expected, "{} should reject {:?}", text, input);
                prop_assert_eq!(k, input.len(), "anchored match must span the input");
            }
            MatchStatus::NoMatch => {
                prop_assert!(!expected, "{} should accept {:?}", text, input)
            }
            MatchStatus::BudgetExceeded => unreachable!(),
        }
    }

    #[test]
    fn matcher_agrees_with_configuration_reachability(
        text in pattern_text(),
        lead in any::<bool>(),
        trail in any::<bool>(),
        input in ab_input(5),
    ) {
        let full = format!(
            "{}{}{}",
            if lead { "^" } else { "" },
            text,
            if trail { "$" } else { "" }
        );
        let arena = arena_for(&full);
        let outcome = pwf_run(&arena, &input, 100_000_000);
        prop_assume!(outcome.status != MatchStatus::BudgetExceeded);
        let offsets = terminal_offsets(&arena, &input);
        match outcome.status {
            MatchStatus::Matched(k) => prop_assert!(
                offsets.contains(&k),
                "{} matched {} bytes of {:?}, unreachable per the config graph",
                full, k, input
            ),
            MatchStatus::NoMatch => prop_assert!(
                offsets.is_empty(),
                "{} found no match on {:?}, but offsets {:?} are reachable",
                full, input, offsets
            ),
            MatchStatus::BudgetExceeded => unreachable!(),
        }
    }

    #[test]
    fn derive_multiplicities_match_clamped_path_counts(
        text in pattern_text(),
        w in ab_input(4),
    ) {
        prop_assume!(!w.is_empty());
        let arena = arena_for(&text);
        let seed: Vec<Code> = evolve(&arena, arena.root()).into_iter().map(Code::Node).collect();
        let frontier = w.iter().fold(seed, |p, &b| derive(&arena, b, &p));
        let enumeration = machine::enumerate_paths(&arena, arena.root(), &w, 4096);
        prop_assume!(enumeration.is_complete());
        let mut expected: HashMap<Code, usize> = HashMap::new();
        for path in enumeration.paths() {
            *expected.entry(*path.nodes.last().unwrap()).or_default() += 1;
        }
        let mut got: HashMap<Code, usize> = HashMap::new();
        for c in &frontier {
            *got.entry(*c).or_default() += 1;
        }
        for (code, count) in &expected {
            prop_assert_eq!(
                got.get(code).copied().unwrap_or(0),
                (*count).min(2),
                "{}: w={:?}: frontier multiplicity diverged at {:?}",
                &text, &w, code
            );
        }
        for code in got.keys() {
            prop_assert!(
                expected.contains_key(code),
                "{}: w={:?}: frontier holds {:?} but no path ends there",
                &text, &w, code
            );
        }
    }

    #[test]
    fn verification_reports_are_internally_consistent(text in pattern_text()) {
        let config = AnalysisConfig::default();
        let verdict = classify(&SourcePattern::new(text.as_bytes().to_vec()), &config);
        if !matches!(
            verdict.classification,
            Classification::Unsupported { .. } | Classification::Malformed { .. }
        ) {
            prop_assert!(verdict.hfpi_steps <= config.hfpi_cap);
        }
        if let Classification::Vulnerable { triple, report } = &verdict.classification {
            prop_assert!(report.confirmed);
            prop_assert!(!triple.pump.is_empty());
            let mut rebuilt = triple.prefix.clone();
            rebuilt.extend_from_slice(&triple.pump);
            rebuilt.extend_from_slice(&triple.pump);
            rebuilt.extend_from_slice(&triple.suffix);
            prop_assert_eq!(&rebuilt, &triple.input_for(2));
            prop_assert_eq!(report.pump_counts.first().copied(), Some(2));
            for pair in report.pump_counts.windows(2) {
                prop_assert_eq!(pair[1], pair[0] + 1, "pump counts must be consecutive");
            }
            prop_assert_eq!(report.steps.len(), report.pump_counts.len());
            let fully_explored = report.steps.len()
                - usize::from(report.budget_exhausted_at.is_some());
            prop_assert_eq!(report.ratios.len(), fully_explored.saturating_sub(1));
            for ratio in &report.ratios {
                prop_assert!(
                    *ratio >= config.threshold,
                    "confirmed report carries ratio {} below the threshold",
                    ratio
                );
            }
            if let Some(n) = report.budget_exhausted_at {
                prop_assert_eq!(report.pump_counts.last().copied(), Some(n));
                prop_assert_eq!(report.steps.last().copied(), Some(config.budget));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn json_reports_are_deterministic_outside_timings(
        texts in prop::collection::vec(pattern_text(), 1..8),
    ) {
        let config = AnalysisConfig::default();
        let patterns = || -> Vec<SourcePattern> {
            texts
                .iter()
                .map(|t| SourcePattern::new(t.as_bytes().to_vec()))
                .collect()
        };
        let first = report::run(&config, patterns());
        let second = report::run(&config, patterns());
        prop_assert_eq!(first.summary, second.summary);
        let strip = |s: &str| -> String {
            s.lines()
                .filter(|l| !l.contains("duration_us"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        prop_assert_eq!(
            strip(&report::render_json(&first)),
            strip(&report::render_json(&second))
        );
        for (i, record) in first.records.iter().enumerate() {
            prop_assert_eq!(record.index, i);
            prop_assert_eq!(&record.pattern.text, &texts[i].as_bytes().to_vec());
        }
    }

    #[test]
    fn summaries_add_up(texts in prop::collection::vec(pattern_text(), 0..12)) {
        let config = AnalysisConfig::default();
        let patterns = texts
            .iter()
            .map(|t| SourcePattern::new(t.as_bytes().to_vec()))
            .collect();
        let report = report::run(&config, patterns);
        let s = report.summary;
        prop_assert_eq!(s.total, report.records.len());
        prop_assert_eq!(
            s.vulnerable + s.pumpable_only + s.safe + s.inconclusive + s.unsupported + s.malformed,
            s.total
        );
        prop_assert_eq!(s.analyzable, s.total - s.unsupported - s.malformed);
        prop_assert!(s.uses_kleene <= s.analyzable);
        let mut counted = report::Summary::default();
        counted.total = report.records.len();
        for record in &report.records {
            match report::verdict_name(&record.verdict.classification) {
                "vulnerable" => counted.vulnerable += 1,
                "pumpable-only" => counted.pumpable_only += 1,
                "safe" => counted.safe += 1,
                "inconclusive" => counted.inconclusive += 1,
                "unsupported" => counted.unsupported += 1,
                "malformed" => counted.malformed += 1,
                other => prop_assert!(false, "unknown verdict name {}", other),
            }
        }
        prop_assert_eq!(counted.vulnerable, s.vulnerable);
        prop_assert_eq!(counted.pumpable_only, s.pumpable_only);
        prop_assert_eq!(counted.safe, s.safe);
        prop_assert_eq!(counted.inconclusive, s.inconclusive);
        prop_assert_eq!(counted.unsupported, s.unsupported);
        prop_assert_eq!(counted.malformed, s.malformed);
    }
}
