//! Attack assembly for pumpable stars: a prefix that steers the matcher to
//! the star, a suffix that forces the overall match to fail, and a growth
//! check that measures matcher work on pumped inputs. Nothing is reported
//! as vulnerable without a confirming measurement.

use std::collections::{HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use crate::analysis::{self, PumpOutcome, PumpableWitness};
use crate::arena::{Code, ExprArena, NodeId, NodeKind};
use crate::charset::CharSet;
use crate::machine::{self, MatchStatus};
use crate::parser::{self, ParseError};
use crate::pattern::SourcePattern;

/// Tunable limits for one classification run.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisConfig {
    /// Step cap for the pumpable-string search, per star node.
    pub hfpi_cap: u64,
    /// Step budget for each backtracking run during verification.
    pub budget: u64,
    /// Highest pump count tried during verification.
    pub pump_max: u32,
    /// Minimum growth ratio between consecutive pump counts.
    pub threshold: f64,
    /// Maximum suffix candidates tested per pattern.
    pub suffix_trials: usize,
    /// When false, pumpable patterns are reported without attack synthesis
    /// or dynamic confirmation.
    pub verify: bool,
}

impl Default for AnalysisConfig {
    fn default() -> AnalysisConfig {
        AnalysisConfig {
            hfpi_cap: 100_000,
            budget: 1_000_000,
            pump_max: 20,
            threshold: 1.8,
            suffix_trials: 64,
            verify: true,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.hfpi_cap == 0 {
            return Err("hfpi-cap must be positive".into());
        }
        if self.budget == 0 {
            return Err("budget must be positive".into());
        }
        if self.pump_max < 4 {
            return Err("pump-max must be at least 4".into());
        }
        if !(self.threshold > 1.0) {
            return Err("threshold must exceed 1".into());
        }
        if self.suffix_trials == 0 {
            return Err("suffix-trials must be positive".into());
        }
        Ok(())
    }
}

/// A complete attack input scheme: prefix · pumpⁿ · suffix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackTriple {
    pub prefix: Vec<u8>,
    pub pump: Vec<u8>,
    pub suffix: Vec<u8>,
    pub kleene: NodeId,
}

impl AttackTriple {
    pub fn input_for(&self, pump_count: u32) -> Vec<u8> {
        let mut input = self.prefix.clone();
        for _ in 0..pump_count {
            input.extend_from_slice(&self.pump);
        }
        input.extend_from_slice(&self.suffix);
        input
    }
}

/// Step measurements across pump counts and the confirmation decision.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    /// Pump counts tested, in order.
    pub pump_counts: Vec<u32>,
    /// Matcher steps per tested pump count.
    pub steps: Vec<u64>,
    /// Growth ratios between consecutive fully explored runs.
    pub ratios: Vec<f64>,
    /// Pump count whose run hit the step budget, if any (that run's steps
    /// are recorded but excluded from ratios).
    pub budget_exhausted_at: Option<u32>,
    pub confirmed: bool,
}

/// A tested input matched: the suffix failed to force failure, so the
/// triple is discarded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RejectedTriple {
    pub pump_count: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PumpableOnlyReason {
    SuffixNotFound,
    PrefixNotFound,
    GrowthUnconfirmed,
    VerificationSkipped,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SafeReason {
    NoKleene,
    NoPumpable,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Classification {
    /// A pumpable star with a verified, growth-confirmed attack input.
    Vulnerable {
        triple: AttackTriple,
        report: VerificationReport,
    },
    /// A pumpable star exists but no full attack was confirmed.
    PumpableOnly {
        kleene: NodeId,
        pump: Vec<u8>,
        reason: PumpableOnlyReason,
    },
    Safe {
        reason: SafeReason,
    },
    /// Some star's pumpable-string search hit its cap and none was
    /// pumpable; Safe would overclaim.
    Inconclusive,
    Unsupported {
        construct: String,
    },
    Malformed {
        message: String,
    },
}

/// Everything the analysis concluded about one pattern.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub classification: Classification,
    /// Largest pumpable-search step count over all star nodes.
    pub hfpi_steps: u64,
    /// Pumpable stars beyond the first, which is the one weaponized.
    pub secondary: Vec<PumpableWitness>,
    pub duration: Duration,
}

/// Shortest input that steers the matcher from the pattern start to the
/// star node, built by breadth-first search where epsilon moves are free
/// and consuming a byte costs one. Within each constant the smallest
/// printable byte is chosen, falling back to the smallest byte. Returns
/// None when the star cannot be reached (for example behind an
/// end-anchor).
pub fn gen_prefix(arena: &ExprArena, kleene: NodeId) -> Option<Vec<u8>> {
    let start = Code::Node(arena.root());
    let target = Code::Node(kleene);
    let mut dist: HashMap<Code, usize> = HashMap::from([(start, 0)]);
    let mut parent: HashMap<Code, (Code, Option<u8>)> = HashMap::new();
    let mut settled: HashSet<Code> = HashSet::new();
    let mut deque: VecDeque<Code> = VecDeque::from([start]);

    while let Some(code) = deque.pop_front() {
        if !settled.insert(code) {
            continue;
        }
        if code == target {
            let mut bytes = Vec::new();
            let mut cur = code;
            while cur != start {
                let (prev, byte) = parent[&cur];
                bytes.extend(byte);
                cur = prev;
            }
            bytes.reverse();
            return Some(bytes);
        }
        let d = dist[&code];
        let Code::Node(id) = code else { continue };

        let mut relax = |next: Code,
                         nd: usize,
                         byte: Option<u8>,
                         dist: &mut HashMap<Code, usize>,
                         deque: &mut VecDeque<Code>| {
            if dist.get(&next).is_none_or(|&old| nd < old) {
                dist.insert(next, nd);
                parent.insert(next, (code, byte));
                if nd == d {
                    deque.push_front(next);
                } else {
                    deque.push_back(next);
                }
            }
        };

        match arena.kind(id) {
            NodeKind::Constant(cs) => {
                if let Some(byte) = preferred_byte(cs) {
                    relax(arena.kont(id), d + 1, Some(byte), &mut dist, &mut deque);
                }
            }
            NodeKind::AnchorStart => {
                if d == 0 {
                    relax(arena.kont(id), d, None, &mut dist, &mut deque);
                }
            }
            NodeKind::AnchorEnd => {}
            NodeKind::Epsilon => relax(arena.kont(id), d, None, &mut dist, &mut deque),
            NodeKind::Concat(left, _) => {
                relax(Code::Node(*left), d, None, &mut dist, &mut deque)
            }
            NodeKind::Alt(left, right) => {
                relax(Code::Node(*left), d, None, &mut dist, &mut deque);
                relax(Code::Node(*right), d, None, &mut dist, &mut deque);
            }
            NodeKind::Star { body, .. } => {
                relax(Code::Node(*body), d, None, &mut dist, &mut deque);
                relax(arena.kont(id), d, None, &mut dist, &mut deque);
            }
        }
    }
    None
}

fn preferred_byte(cs: &CharSet) -> Option<u8> {
    cs.iter_bytes()
        .find(|b| (0x20..=0x7e).contains(b))
        .or_else(|| cs.min_byte())
}

/// True when the pattern's final mandatory element is an end anchor.
pub(crate) fn end_anchored(arena: &ExprArena) -> bool {
    let mut id = arena.root();
    loop {
        match arena.kind(id) {
            NodeKind::AnchorEnd => return true,
            NodeKind::Concat(_, right) => id = *right,
            _ => return false,
        }
    }
}

/// The frontier of the whole pattern after consuming `input` from the
/// start, anchors treated as pass-through.
fn frontier_after(arena: &ExprArena, input: &[u8]) -> Vec<Code> {
    let mut p = vec![Code::Node(arena.root())];
    for &byte in input {
        p = analysis::derive(arena, byte, &p);
        if p.is_empty() {
            break;
        }
    }
    p
}

/// Union of every character set the matcher could still consume at or
/// after the given frontier, however many bytes later.
fn consumable_closure(arena: &ExprArena, p: &[Code]) -> CharSet {
    let mut union = CharSet::empty();
    let mut seen_codes: HashSet<Code> = HashSet::new();
    let mut seen_constants: HashSet<NodeId> = HashSet::new();
    let mut work: Vec<Code> = p.to_vec();
    while let Some(code) = work.pop() {
        if !seen_codes.insert(code) {
            continue;
        }
        for c in machine::eps_constant_arrivals(arena, code) {
            if seen_constants.insert(c) {
                if let NodeKind::Constant(cs) = arena.kind(c) {
                    union = union.union(cs);
                }
                work.push(arena.kont(c));
            }
        }
    }
    union
}

/// Ordered suffix candidates: the empty string first when the pattern is
/// end-anchored (the pumped input then fails at the anchor), then single
/// bytes no reachable constant can consume (printable first), then short
/// paddings of those bytes.
pub(crate) fn suffix_candidates(
    arena: &ExprArena,
    prefix: &[u8],
    pump: &[u8],
    trials: usize,
) -> Vec<Vec<u8>> {
    let mut doubled = prefix.to_vec();
    doubled.extend_from_slice(pump);
    doubled.extend_from_slice(pump);
    let reachable = consumable_closure(arena, &frontier_after(arena, &doubled));
    let dead = reachable.complement();

    let mut candidates: Vec<Vec<u8>> = Vec::new();
    if end_anchored(arena) {
        candidates.push(Vec::new());
    }
    let printable: Vec<u8> = dead
        .iter_bytes()
        .filter(|b| (0x20..=0x7e).contains(b))
        .collect();
    let unprintable: Vec<u8> = dead
        .iter_bytes()
        .filter(|b| !(0x20..=0x7e).contains(b))
        .collect();
    for &b in printable.iter().chain(&unprintable) {
        candidates.push(vec![b]);
    }
    for &b in printable.iter().take(8) {
        candidates.push(vec![b; 3]);
    }
    candidates.truncate(trials);
    candidates
}

/// First suffix candidate that makes prefix · pump² · suffix fail to
/// match, or None when no candidate does within the trial budget.
pub fn gen_suffix(
    arena: &ExprArena,
    prefix: &[u8],
    pump: &[u8],
    trials: usize,
    budget: u64,
) -> Option<Vec<u8>> {
    for z in suffix_candidates(arena, prefix, pump, trials) {
        let mut input = prefix.to_vec();
        input.extend_from_slice(pump);
        input.extend_from_slice(pump);
        input.extend_from_slice(&z);
        if machine::pwf_run(arena, &input, budget).status == MatchStatus::NoMatch {
            return Some(z);
        }
    }
    None
}

/// Measures matcher steps for pump counts 2..=pump_max and decides
/// whether growth is exponential: confirmed when at least three
/// consecutive ratios meet the threshold, or when the budget ran out
/// with every observed ratio (at least one) meeting it.
pub fn verify_attack(
    arena: &ExprArena,
    triple: &AttackTriple,
    pump_max: u32,
    budget: u64,
    threshold: f64,
) -> Result<VerificationReport, RejectedTriple> {
    let mut pump_counts: Vec<u32> = Vec::new();
    let mut steps: Vec<u64> = Vec::new();
    let mut budget_exhausted_at = None;
    for n in 2..=pump_max {
        let outcome = machine::pwf_run(arena, &triple.input_for(n), budget);
        match outcome.status {
            MatchStatus::Matched(_) => return Err(RejectedTriple { pump_count: n }),
            MatchStatus::NoMatch => {
                pump_counts.push(n);
                steps.push(outcome.steps);
            }
            MatchStatus::BudgetExceeded => {
                pump_counts.push(n);
                steps.push(outcome.steps);
                budget_exhausted_at = Some(n);
                break;
            }
        }
    }
    let fully_explored = steps.len() - usize::from(budget_exhausted_at.is_some());
    let ratios: Vec<f64> = (1..fully_explored)
        .map(|i| steps[i] as f64 / steps[i - 1] as f64)
        .collect();
    let sustained = ratios.windows(3).any(|w| w.iter().all(|r| *r >= threshold));
    let until_exhaustion = budget_exhausted_at.is_some()
        && !ratios.is_empty()
        && ratios.iter().all(|r| *r >= threshold);
    Ok(VerificationReport {
        pump_counts,
        steps,
        ratios,
        budget_exhausted_at,
        confirmed: sustained || until_exhaustion,
    })
}

/// Full pipeline for one pattern: parse, find pumpable stars, weaponize
/// the first one, and fold the results into a single verdict.
/// Deterministic for a fixed configuration, except for the duration.
pub fn classify(sp: &SourcePattern, config: &AnalysisConfig) -> Verdict {
    let started = Instant::now();
    let done = |classification, hfpi_steps, secondary| Verdict {
        classification,
        hfpi_steps,
        secondary,
        duration: started.elapsed(),
    };

    let parsed = match parser::parse(sp) {
        Ok(outcome) => outcome,
        Err(ParseError::UnsupportedConstruct { construct }) => {
            return done(Classification::Unsupported { construct }, 0, Vec::new());
        }
        Err(err) => {
            return done(
                Classification::Malformed {
                    message: err.to_string(),
                },
                0,
                Vec::new(),
            );
        }
    };
    let arena = ExprArena::build(&parsed.ast);
    let kleenes = arena.kleene_nodes();
    if kleenes.is_empty() {
        return done(
            Classification::Safe {
                reason: SafeReason::NoKleene,
            },
            0,
            Vec::new(),
        );
    }

    let mut hfpi_steps: u64 = 0;
    let mut capped = false;
    let mut witnesses: Vec<PumpableWitness> = Vec::new();
    for &kleene in &kleenes {
        let outcome = analysis::find_pumpable(&arena, kleene, config.hfpi_cap);
        hfpi_steps = hfpi_steps.max(outcome.steps());
        match outcome {
            PumpOutcome::Pumpable(w) => witnesses.push(w),
            PumpOutcome::NotPumpable { .. } => {}
            PumpOutcome::CapExceeded { .. } => capped = true,
        }
    }

    let mut witnesses = witnesses.into_iter();
    let Some(primary) = witnesses.next() else {
        let classification = if capped {
            Classification::Inconclusive
        } else {
            Classification::Safe {
                reason: SafeReason::NoPumpable,
            }
        };
        return done(classification, hfpi_steps, Vec::new());
    };
    let secondary: Vec<PumpableWitness> = witnesses.collect();

    let pumpable_only = |reason| Classification::PumpableOnly {
        kleene: primary.kleene,
        pump: primary.pump.clone(),
        reason,
    };

    let Some(prefix) = gen_prefix(&arena, primary.kleene) else {
        return done(
            pumpable_only(PumpableOnlyReason::PrefixNotFound),
            hfpi_steps,
            secondary,
        );
    };
    if !config.verify {
        return done(
            pumpable_only(PumpableOnlyReason::VerificationSkipped),
            hfpi_steps,
            secondary,
        );
    }

    for suffix in suffix_candidates(&arena, &prefix, &primary.pump, config.suffix_trials) {
        let triple = AttackTriple {
            prefix: prefix.clone(),
            pump: primary.pump.clone(),
            suffix,
            kleene: primary.kleene,
        };
        match verify_attack(
            &arena,
            &triple,
            config.pump_max,
            config.budget,
            config.threshold,
        ) {
            Ok(report) if report.confirmed => {
                return done(
                    Classification::Vulnerable { triple, report },
                    hfpi_steps,
                    secondary,
                );
            }
            Ok(_) => {
                return done(
                    pumpable_only(PumpableOnlyReason::GrowthUnconfirmed),
                    hfpi_steps,
                    secondary,
                );
            }
            Err(RejectedTriple { .. }) => continue,
        }
    }
    done(
        pumpable_only(PumpableOnlyReason::SuffixNotFound),
        hfpi_steps,
        secondary,
    )
}
