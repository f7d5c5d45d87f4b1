//! Static detection of regexes vulnerable to catastrophic backtracking.
//!
//! The pipeline: parse a pattern into a desugared core syntax, number
//! its subexpressions in an arena with continuation links, then decide
//! for each Kleene subexpression whether some pump word can reach two
//! simultaneous copies of it. A positive finding is turned into a
//! concrete attack input `prefix · pumpᵏ · suffix` and confirmed by
//! running a step-counted backtracking matcher on growing inputs.
//!
//! Entry points: [`attack::classify`] analyzes one pattern,
//! [`report::run`] a batch; the `redos` binary wraps both in a CLI.

pub mod analysis;
pub mod arena;
pub mod attack;
pub mod ast;
pub mod charset;
pub mod machine;
pub mod parser;
pub mod pattern;
pub mod report;

pub use analysis::{find_pumpable, PumpOutcome, PumpableWitness};
pub use arena::{Code, ExprArena, NodeId};
pub use attack::{
    classify, AnalysisConfig, AttackTriple, Classification, Verdict, VerificationReport,
};
pub use machine::{pwf_run, MatchOutcome, MatchStatus};
pub use parser::{parse, ParseError};
pub use pattern::SourcePattern;
pub use report::{run, CorpusReport, Summary};
