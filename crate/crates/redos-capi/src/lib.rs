//! C ABI over the analyzer: opaque handles, status codes, and borrowed
//! byte views. Every function is panic-proof at the boundary; pattern
//! and input buffers are arbitrary bytes, never NUL-terminated strings.

use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use redos_core::arena::ExprArena;
use redos_core::attack::{self, AnalysisConfig, Classification, Verdict};
use redos_core::machine::{self, MatchStatus};
use redos_core::parser;
use redos_core::pattern::SourcePattern;
use redos_core::report;

/// Outcome of a C API call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RxStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A configuration value is out of range.
    InvalidConfig = 2,
    /// The pattern does not parse.
    ParseError = 3,
    /// The verdict carries no attack of the requested shape.
    NoAttack = 4,
    /// An internal error was caught at the boundary.
    Internal = 5,
}

/// Top-level classification of one pattern.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RxVerdictKind {
    Vulnerable = 0,
    PumpableOnly = 1,
    Safe = 2,
    Inconclusive = 3,
    Unsupported = 4,
    Malformed = 5,
}

/// Result of one backtracking-matcher run.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RxMatchStatus {
    Matched = 0,
    NoMatch = 1,
    BudgetExceeded = 2,
}

/// A borrowed byte view into an analyzer result. Valid until the verdict
/// it was read from is freed; never NUL-terminated.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RxBytes {
    pub data: *const u8,
    pub len: usize,
}

/// Step count and match result of one simulation run. `matched_len` is
/// meaningful only when `status` is `RX_MATCH_STATUS_MATCHED`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RxMatchResult {
    pub status: RxMatchStatus,
    pub steps: u64,
    pub matched_len: u64,
}

/// Opaque analyzer handle holding the analysis configuration.
pub struct RxAnalyzer {
    config: AnalysisConfig,
}

/// Opaque result handle for one analyzed pattern.
pub struct RxVerdict {
    verdict: Verdict,
    detail: Vec<u8>,
}

fn bytes_view(bytes: &[u8]) -> RxBytes {
    RxBytes {
        data: bytes.as_ptr(),
        len: bytes.len(),
    }
}

/// Builds byte slices from (pointer, length), accepting a null pointer
/// only for length zero.
unsafe fn slice_arg<'a>(data: *const u8, len: usize) -> Option<&'a [u8]> {
    if data.is_null() {
        if len == 0 {
            Some(&[])
        } else {
            None
        }
    } else {
        Some(std::slice::from_raw_parts(data, len))
    }
}

/// Creates an analyzer with default limits. Free with
/// [`rx_analyzer_free`]. Never returns null.
#[no_mangle]
pub extern "C" fn rx_analyzer_new() -> *mut RxAnalyzer {
    Box::into_raw(Box::new(RxAnalyzer {
        config: AnalysisConfig::default(),
    }))
}

/// Replaces the analyzer's numeric limits. On `RX_STATUS_INVALID_CONFIG`
/// the previous limits are kept.
///
/// # Safety
/// `analyzer` must be a live pointer from [`rx_analyzer_new`].
#[no_mangle]
pub unsafe extern "C" fn rx_analyzer_set_limits(
    analyzer: *mut RxAnalyzer,
    hfpi_cap: u64,
    budget: u64,
    pump_max: u32,
    threshold: f64,
) -> RxStatus {
    let Some(analyzer) = analyzer.as_mut() else {
        return RxStatus::NullArgument;
    };
    let config = AnalysisConfig {
        hfpi_cap,
        budget,
        pump_max,
        threshold,
        ..analyzer.config.clone()
    };
    if config.validate().is_err() {
        return RxStatus::InvalidConfig;
    }
    analyzer.config = config;
    RxStatus::Ok
}

/// Enables or disables attack synthesis and dynamic confirmation. With
/// verification off, no pattern is ever reported vulnerable.
///
/// # Safety
/// `analyzer` must be a live pointer from [`rx_analyzer_new`].
#[no_mangle]
pub unsafe extern "C" fn rx_analyzer_set_verify(
    analyzer: *mut RxAnalyzer,
    verify: bool,
) -> RxStatus {
    let Some(analyzer) = analyzer.as_mut() else {
        return RxStatus::NullArgument;
    };
    analyzer.config.verify = verify;
    RxStatus::Ok
}

/// Frees an analyzer. Null is ignored.
///
/// # Safety
/// `analyzer` must be null or a live pointer from [`rx_analyzer_new`],
/// not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rx_analyzer_free(analyzer: *mut RxAnalyzer) {
    if !analyzer.is_null() {
        drop(Box::from_raw(analyzer));
    }
}

/// Classifies one pattern and writes a verdict handle to `out`. The
/// pattern is raw bytes, not NUL-terminated. Parse failures still
/// produce a verdict (unsupported or malformed), not an error status.
///
/// # Safety
/// `analyzer` must be a live pointer from [`rx_analyzer_new`]; `pattern`
/// must point to `pattern_len` readable bytes (null only if the length
/// is zero); `out` must be a valid destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rx_analyze(
    analyzer: *const RxAnalyzer,
    pattern: *const u8,
    pattern_len: usize,
    out: *mut *mut RxVerdict,
) -> RxStatus {
    let Some(analyzer) = analyzer.as_ref() else {
        return RxStatus::NullArgument;
    };
    if out.is_null() {
        return RxStatus::NullArgument;
    }
    let Some(pattern) = slice_arg(pattern, pattern_len) else {
        return RxStatus::NullArgument;
    };
    let sp = SourcePattern::new(pattern.to_vec());
    let config = analyzer.config.clone();
    let classified = panic::catch_unwind(AssertUnwindSafe(|| attack::classify(&sp, &config)));
    let Ok(verdict) = classified else {
        out.write(ptr::null_mut());
        return RxStatus::Internal;
    };
    let detail = report::verdict_detail(&verdict.classification)
        .unwrap_or_default()
        .into_bytes();
    out.write(Box::into_raw(Box::new(RxVerdict { verdict, detail })));
    RxStatus::Ok
}

/// The verdict's top-level classification.
///
/// # Safety
/// `verdict` must be a live pointer from [`rx_analyze`].
#[no_mangle]
pub unsafe extern "C" fn rx_verdict_kind(verdict: *const RxVerdict) -> RxVerdictKind {
    let Some(v) = verdict.as_ref() else {
        return RxVerdictKind::Malformed;
    };
    match v.verdict.classification {
        Classification::Vulnerable { .. } => RxVerdictKind::Vulnerable,
        Classification::PumpableOnly { .. } => RxVerdictKind::PumpableOnly,
        Classification::Safe { .. } => RxVerdictKind::Safe,
        Classification::Inconclusive => RxVerdictKind::Inconclusive,
        Classification::Unsupported { .. } => RxVerdictKind::Unsupported,
        Classification::Malformed { .. } => RxVerdictKind::Malformed,
    }
}

/// Steps spent by the pumpable-string search, maximized over the
/// pattern's star nodes.
///
/// # Safety
/// `verdict` must be a live pointer from [`rx_analyze`].
#[no_mangle]
pub unsafe extern "C" fn rx_verdict_hfpi_steps(verdict: *const RxVerdict) -> u64 {
    verdict.as_ref().map_or(0, |v| v.verdict.hfpi_steps)
}

/// True exactly for vulnerable verdicts, whose growth measurement is
/// always confirmed.
///
/// # Safety
/// `verdict` must be a live pointer from [`rx_analyze`].
#[no_mangle]
pub unsafe extern "C" fn rx_verdict_confirmed(verdict: *const RxVerdict) -> bool {
    verdict.as_ref().is_some_and(|v| match &v.verdict.classification {
        Classification::Vulnerable { report, .. } => report.confirmed,
        _ => false,
    })
}

/// The verdict's elaboration: the reason tag for pumpable-only and safe
/// verdicts, the offending construct or parse message otherwise. Empty
/// for vulnerable and inconclusive verdicts.
///
/// # Safety
/// `verdict` must be a live pointer from [`rx_analyze`]; `out` must be
/// a valid destination. The view lives until the verdict is freed.
#[no_mangle]
pub unsafe extern "C" fn rx_verdict_detail(
    verdict: *const RxVerdict,
    out: *mut RxBytes,
) -> RxStatus {
    let Some(v) = verdict.as_ref() else {
        return RxStatus::NullArgument;
    };
    if out.is_null() {
        return RxStatus::NullArgument;
    }
    out.write(bytes_view(&v.detail));
    RxStatus::Ok
}

/// The confirmed attack input scheme prefix · pumpⁿ · suffix of a
/// vulnerable verdict. Returns `RX_STATUS_NO_ATTACK` for any other
/// verdict kind.
///
/// # Safety
/// `verdict` must be a live pointer from [`rx_analyze`]; `prefix`,
/// `pump`, and `suffix` must be valid destinations. The views live
/// until the verdict is freed.
#[no_mangle]
pub unsafe extern "C" fn rx_verdict_attack(
    verdict: *const RxVerdict,
    prefix: *mut RxBytes,
    pump: *mut RxBytes,
    suffix: *mut RxBytes,
) -> RxStatus {
    let Some(v) = verdict.as_ref() else {
        return RxStatus::NullArgument;
    };
    if prefix.is_null() || pump.is_null() || suffix.is_null() {
        return RxStatus::NullArgument;
    }
    let Classification::Vulnerable { triple, .. } = &v.verdict.classification else {
        return RxStatus::NoAttack;
    };
    prefix.write(bytes_view(&triple.prefix));
    pump.write(bytes_view(&triple.pump));
    suffix.write(bytes_view(&triple.suffix));
    RxStatus::Ok
}

/// The pump word of a vulnerable or pumpable-only verdict: a string the
/// star's body can match in two distinct ways. Returns
/// `RX_STATUS_NO_ATTACK` for other verdict kinds.
///
/// # Safety
/// `verdict` must be a live pointer from [`rx_analyze`]; `out` must be
/// a valid destination. The view lives until the verdict is freed.
#[no_mangle]
pub unsafe extern "C" fn rx_verdict_pump(
    verdict: *const RxVerdict,
    out: *mut RxBytes,
) -> RxStatus {
    let Some(v) = verdict.as_ref() else {
        return RxStatus::NullArgument;
    };
    if out.is_null() {
        return RxStatus::NullArgument;
    }
    match &v.verdict.classification {
        Classification::Vulnerable { triple, .. } => {
            out.write(bytes_view(&triple.pump));
            RxStatus::Ok
        }
        Classification::PumpableOnly { pump, .. } => {
            out.write(bytes_view(pump));
            RxStatus::Ok
        }
        _ => RxStatus::NoAttack,
    }
}

/// Frees a verdict and every view read from it. Null is ignored.
///
/// # Safety
/// `verdict` must be null or a live pointer from [`rx_analyze`], not
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rx_verdict_free(verdict: *mut RxVerdict) {
    if !verdict.is_null() {
        drop(Box::from_raw(verdict));
    }
}

/// Runs the step-counted backtracking matcher once. Returns
/// `RX_STATUS_PARSE_ERROR` when the pattern does not parse into the
/// supported subset.
///
/// # Safety
/// `pattern` and `input` must point to the given numbers of readable
/// bytes (null only with length zero); `out` must be a valid
/// destination.
#[no_mangle]
pub unsafe extern "C" fn rx_simulate(
    pattern: *const u8,
    pattern_len: usize,
    input: *const u8,
    input_len: usize,
    budget: u64,
    out: *mut RxMatchResult,
) -> RxStatus {
    let (Some(pattern), Some(input)) =
        (slice_arg(pattern, pattern_len), slice_arg(input, input_len))
    else {
        return RxStatus::NullArgument;
    };
    if out.is_null() {
        return RxStatus::NullArgument;
    }
    let sp = SourcePattern::new(pattern.to_vec());
    let run = panic::catch_unwind(AssertUnwindSafe(|| {
        let parsed = parser::parse(&sp)?;
        let arena = ExprArena::build(&parsed.ast);
        Ok::<_, parser::ParseError>(machine::pwf_run(&arena, input, budget))
    }));
    let outcome = match run {
        Ok(Ok(outcome)) => outcome,
        Ok(Err(_)) => return RxStatus::ParseError,
        Err(_) => return RxStatus::Internal,
    };
    let (status, matched_len) = match outcome.status {
        MatchStatus::Matched(end) => (RxMatchStatus::Matched, end as u64),
        MatchStatus::NoMatch => (RxMatchStatus::NoMatch, 0),
        MatchStatus::BudgetExceeded => (RxMatchStatus::BudgetExceeded, 0),
    };
    out.write(RxMatchResult {
        status,
        steps: outcome.steps,
        matched_len,
    });
    RxStatus::Ok
}
