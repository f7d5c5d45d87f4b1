//! Corpus ingestion, batch classification, and report rendering. Patterns
//! come in one per line or embedded in Snort rules, are classified in
//! parallel, and leave as human-readable text or versioned JSON with
//! summary counts recomputable from the records.

use std::io::{self, BufRead};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::attack::{self, AnalysisConfig, Classification, PumpableOnlyReason, SafeReason, Verdict};
use crate::pattern::{apply_flag_letters, SourcePattern};

/// Identifies the report layout; bump when record fields change shape.
pub const SCHEMA: &str = "redos-report/1";

/// One classified pattern, in corpus order.
#[derive(Clone, Debug)]
pub struct PatternRecord {
    pub index: usize,
    pub pattern: SourcePattern,
    pub verdict: Verdict,
}

/// Corpus-level tallies, recomputable from the record list.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    /// Patterns that parsed into the supported subset.
    pub analyzable: usize,
    /// Analyzable patterns containing at least one star.
    pub uses_kleene: usize,
    pub vulnerable: usize,
    pub pumpable_only: usize,
    pub safe: usize,
    pub inconclusive: usize,
    pub unsupported: usize,
    pub malformed: usize,
}

impl Summary {
    pub fn from_records(records: &[PatternRecord]) -> Summary {
        let mut s = Summary {
            total: records.len(),
            ..Summary::default()
        };
        for record in records {
            match &record.verdict.classification {
                Classification::Vulnerable { .. } => s.vulnerable += 1,
                Classification::PumpableOnly { .. } => s.pumpable_only += 1,
                Classification::Safe { .. } => s.safe += 1,
                Classification::Inconclusive => s.inconclusive += 1,
                Classification::Unsupported { .. } => s.unsupported += 1,
                Classification::Malformed { .. } => s.malformed += 1,
            }
            match &record.verdict.classification {
                Classification::Unsupported { .. } | Classification::Malformed { .. } => {}
                Classification::Safe {
                    reason: SafeReason::NoKleene,
                } => s.analyzable += 1,
                _ => {
                    s.analyzable += 1;
                    s.uses_kleene += 1;
                }
            }
        }
        s
    }
}

/// The full result of one batch run.
#[derive(Clone, Debug)]
pub struct CorpusReport {
    pub records: Vec<PatternRecord>,
    pub summary: Summary,
    pub total_duration: Duration,
}

/// Classifies every pattern in parallel; records stay in input order.
pub fn run(config: &AnalysisConfig, patterns: Vec<SourcePattern>) -> CorpusReport {
    let started = Instant::now();
    let records: Vec<PatternRecord> = patterns
        .into_par_iter()
        .enumerate()
        .map(|(index, pattern)| {
            let verdict = attack::classify(&pattern, config);
            PatternRecord {
                index,
                pattern,
                verdict,
            }
        })
        .collect();
    let summary = Summary::from_records(&records);
    CorpusReport {
        records,
        summary,
        total_duration: started.elapsed(),
    }
}

/// Reads one pattern per line, skipping blank lines and `#` comments.
/// Bytes are taken verbatim; 1-based line numbers become origins.
pub fn ingest_lines(reader: &mut dyn BufRead) -> io::Result<Vec<SourcePattern>> {
    let mut patterns = Vec::new();
    let mut line_no = 0usize;
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            return Ok(patterns);
        }
        line_no += 1;
        let mut line = buf.as_slice();
        while let [rest @ .., b'\n' | b'\r'] = line {
            line = rest;
        }
        if line.iter().all(u8::is_ascii_whitespace) || line.starts_with(b"#") {
            continue;
        }
        patterns.push(SourcePattern::new(line.to_vec()).with_origin(line_no));
    }
}

/// Extracts every `pcre:"/pattern/flags"` option from Snort-style rules.
/// Rule-level quoting is undone (`\"` and `\/` only); trailing flag
/// letters become pattern flags. Malformed options are skipped and
/// described in the returned warning list.
pub fn ingest_snort(reader: &mut dyn BufRead) -> io::Result<(Vec<SourcePattern>, Vec<String>)> {
    let mut patterns = Vec::new();
    let mut warnings = Vec::new();
    let mut line_no = 0usize;
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            return Ok((patterns, warnings));
        }
        line_no += 1;
        let line = buf.as_slice();
        let mut from = 0usize;
        while let Some(at) = find_subslice(&line[from..], b"pcre:\"") {
            let body_start = from + at + b"pcre:\"".len();
            let Some(body_len) = find_unescaped_quote(&line[body_start..]) else {
                warnings.push(format!("line {line_no}: unterminated pcre option"));
                break;
            };
            from = body_start + body_len + 1;
            let body = unescape_rule_quoting(&line[body_start..body_start + body_len]);
            match split_delimited(&body) {
                Some((pattern, flags)) => {
                    let mut sp = SourcePattern::new(pattern).with_origin(line_no);
                    apply_flag_letters(&flags, &mut sp);
                    patterns.push(sp);
                }
                None => {
                    warnings.push(format!(
                        "line {line_no}: pcre option body is not /pattern/flags"
                    ));
                }
            }
        }
    }
}

fn find_subslice(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack.windows(needle.len()).position(|w| w == needle)
}

fn find_unescaped_quote(bytes: &[u8]) -> Option<usize> {
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'"' => return Some(i),
            _ => i += 1,
        }
    }
    None
}

fn unescape_rule_quoting(bytes: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'\\' && matches!(bytes.get(i + 1), Some(b'"') | Some(b'/')) {
            out.push(bytes[i + 1]);
            i += 2;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    out
}

fn split_delimited(body: &[u8]) -> Option<(Vec<u8>, Vec<u8>)> {
    let rest = body.strip_prefix(b"/")?;
    let end = rest.iter().rposition(|&b| b == b'/')?;
    Some((rest[..end].to_vec(), rest[end + 1..].to_vec()))
}

/// Escapes one byte for display: printable ASCII stays as is, common
/// control bytes use their mnemonic escape, everything else is \xHH.
pub fn escape_byte(b: u8) -> String {
    match b {
        b'\\' => "\\\\".to_string(),
        b'\n' => "\\n".to_string(),
        b'\r' => "\\r".to_string(),
        b'\t' => "\\t".to_string(),
        0x20..=0x7e => (b as char).to_string(),
        _ => format!("\\x{b:02x}"),
    }
}

/// Escapes a byte string for display, byte by byte.
pub fn escape_bytes(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| escape_byte(b)).collect()
}

#[derive(Serialize)]
struct JsonReport<'a> {
    schema: &'static str,
    records: Vec<JsonRecord>,
    summary: &'a Summary,
    total_duration_us: u128,
}

#[derive(Serialize)]
struct JsonRecord {
    index: usize,
    line: Option<usize>,
    pattern: String,
    verdict: &'static str,
    detail: Option<String>,
    kleene: Option<u32>,
    pump: Option<String>,
    prefix: Option<String>,
    suffix: Option<String>,
    pump_counts: Option<Vec<u32>>,
    steps: Option<Vec<u64>>,
    ratios: Option<Vec<f64>>,
    budget_exhausted_at: Option<u32>,
    confirmed: Option<bool>,
    hfpi_steps: u64,
    secondary: Vec<JsonSecondary>,
    warnings: Vec<String>,
    duration_us: u128,
}

#[derive(Serialize)]
struct JsonSecondary {
    kleene: u32,
    pump: String,
}

/// Stable lowercase name of a classification, as used in reports.
pub fn verdict_name(c: &Classification) -> &'static str {
    match c {
        Classification::Vulnerable { .. } => "vulnerable",
        Classification::PumpableOnly { .. } => "pumpable-only",
        Classification::Safe { .. } => "safe",
        Classification::Inconclusive => "inconclusive",
        Classification::Unsupported { .. } => "unsupported",
        Classification::Malformed { .. } => "malformed",
    }
}

/// One-line elaboration of a classification: the reason tag for
/// pumpable-only and safe verdicts, the construct or message for
/// unsupported and malformed ones.
pub fn verdict_detail(c: &Classification) -> Option<String> {
    match c {
        Classification::Vulnerable { .. } | Classification::Inconclusive => None,
        Classification::PumpableOnly { reason, .. } => Some(
            match reason {
                PumpableOnlyReason::SuffixNotFound => "suffix-not-found",
                PumpableOnlyReason::PrefixNotFound => "prefix-not-found",
                PumpableOnlyReason::GrowthUnconfirmed => "growth-unconfirmed",
                PumpableOnlyReason::VerificationSkipped => "verification-skipped",
            }
            .to_string(),
        ),
        Classification::Safe { reason } => Some(
            match reason {
                SafeReason::NoKleene => "no-kleene",
                SafeReason::NoPumpable => "no-pumpable",
            }
            .to_string(),
        ),
        Classification::Unsupported { construct } => Some(construct.clone()),
        Classification::Malformed { message } => Some(message.clone()),
    }
}

fn json_record(record: &PatternRecord) -> JsonRecord {
    let v = &record.verdict;
    let mut out = JsonRecord {
        index: record.index,
        line: record.pattern.origin.as_ref().map(|o| o.line),
        pattern: escape_bytes(&record.pattern.text),
        verdict: verdict_name(&v.classification),
        detail: verdict_detail(&v.classification),
        kleene: None,
        pump: None,
        prefix: None,
        suffix: None,
        pump_counts: None,
        steps: None,
        ratios: None,
        budget_exhausted_at: None,
        confirmed: None,
        hfpi_steps: v.hfpi_steps,
        secondary: v
            .secondary
            .iter()
            .map(|w| JsonSecondary {
                kleene: w.kleene.as_u32(),
                pump: escape_bytes(&w.pump),
            })
            .collect(),
        warnings: record.pattern.warnings.clone(),
        duration_us: v.duration.as_micros(),
    };
    match &v.classification {
        Classification::Vulnerable { triple, report } => {
            out.kleene = Some(triple.kleene.as_u32());
            out.pump = Some(escape_bytes(&triple.pump));
            out.prefix = Some(escape_bytes(&triple.prefix));
            out.suffix = Some(escape_bytes(&triple.suffix));
            out.pump_counts = Some(report.pump_counts.clone());
            out.steps = Some(report.steps.clone());
            out.ratios = Some(report.ratios.clone());
            out.budget_exhausted_at = report.budget_exhausted_at;
            out.confirmed = Some(report.confirmed);
        }
        Classification::PumpableOnly { kleene, pump, .. } => {
            out.kleene = Some(kleene.as_u32());
            out.pump = Some(escape_bytes(pump));
        }
        _ => {}
    }
    out
}

/// Renders the machine-readable report. Identical inputs and config give
/// identical output, except for the duration fields.
pub fn render_json(report: &CorpusReport) -> String {
    let json = JsonReport {
        schema: SCHEMA,
        records: report.records.iter().map(json_record).collect(),
        summary: &report.summary,
        total_duration_us: report.total_duration.as_micros(),
    };
    let mut text = serde_json::to_string_pretty(&json).expect("report serialization");
    text.push('\n');
    text
}

/// Renders the human-readable report.
pub fn render_text(report: &CorpusReport) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    for record in &report.records {
        let v = &record.verdict;
        let line = record
            .pattern
            .origin
            .as_ref()
            .map_or_else(String::new, |o| format!(" (line {})", o.line));
        let _ = writeln!(
            out,
            "#{}{}: {}",
            record.index + 1,
            line,
            escape_bytes(&record.pattern.text)
        );
        let name = verdict_name(&v.classification).to_uppercase();
        let detail = verdict_detail(&v.classification)
            .map_or_else(String::new, |d| format!(": {d}"));
        let _ = writeln!(
            out,
            "  {}{}  [hfpi steps {}, {:.1} ms]",
            name,
            detail,
            v.hfpi_steps,
            v.duration.as_secs_f64() * 1e3
        );
        match &v.classification {
            Classification::Vulnerable { triple, report } => {
                let _ = writeln!(
                    out,
                    "  attack: prefix \"{}\" pump \"{}\" suffix \"{}\" (star #{})",
                    escape_bytes(&triple.prefix),
                    escape_bytes(&triple.pump),
                    escape_bytes(&triple.suffix),
                    triple.kleene.index()
                );
                let ratios: Vec<String> =
                    report.ratios.iter().map(|r| format!("{r:.2}")).collect();
                let exhausted = report
                    .budget_exhausted_at
                    .map_or_else(String::new, |n| format!(", budget exhausted at n={n}"));
                let _ = writeln!(
                    out,
                    "  growth: ratios [{}] over pumps {}..={}{}",
                    ratios.join(", "),
                    report.pump_counts.first().unwrap_or(&0),
                    report.pump_counts.last().unwrap_or(&0),
                    exhausted
                );
            }
            Classification::PumpableOnly { kleene, pump, .. } => {
                let _ = writeln!(
                    out,
                    "  pumpable: \"{}\" at star #{}",
                    escape_bytes(pump),
                    kleene.index()
                );
            }
            _ => {}
        }
        for w in &v.secondary {
            let _ = writeln!(
                out,
                "  secondary: star #{} pump \"{}\"",
                w.kleene.index(),
                escape_bytes(&w.pump)
            );
        }
        for warning in &record.pattern.warnings {
            let _ = writeln!(out, "  warning: {warning}");
        }
    }
    let s = &report.summary;
    let _ = writeln!(
        out,
        "summary: total {}, analyzable {}, uses-kleene {}, vulnerable {}, \
         pumpable-only {}, safe {}, inconclusive {}, unsupported {}, malformed {}",
        s.total,
        s.analyzable,
        s.uses_kleene,
        s.vulnerable,
        s.pumpable_only,
        s.safe,
        s.inconclusive,
        s.unsupported,
        s.malformed
    );
    let _ = writeln!(
        out,
        "total time: {:.1} ms",
        report.total_duration.as_secs_f64() * 1e3
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::Origin;
    use std::io::Cursor;

    fn run_corpus(lines: &str) -> CorpusReport {
        let patterns = ingest_lines(&mut Cursor::new(lines.as_bytes())).unwrap();
        run(&AnalysisConfig::default(), patterns)
    }

    #[test]
    fn escaping_is_printable_and_unambiguous() {
        assert_eq!(escape_byte(b'a'), "a");
        assert_eq!(escape_byte(b'\\'), "\\\\");
        assert_eq!(escape_byte(0x00), "\\x00");
        assert_eq!(escape_byte(0xff), "\\xff");
        assert_eq!(escape_bytes(b"a\nb"), "a\\nb");
        assert_eq!(escape_bytes(b""), "");
    }

    #[test]
    fn line_ingestion_skips_blanks_and_comments() {
        let input = "^a*$\n\n# comment\n  \nb+c\n";
        let patterns = ingest_lines(&mut Cursor::new(input.as_bytes())).unwrap();
        assert_eq!(patterns.len(), 2);
        assert_eq!(patterns[0].text, b"^a*$");
        assert_eq!(patterns[0].origin, Some(Origin { line: 1 }));
        assert_eq!(patterns[1].text, b"b+c");
        assert_eq!(patterns[1].origin, Some(Origin { line: 5 }));
    }

    #[test]
    fn line_ingestion_handles_empty_input_and_crlf() {
        let none = ingest_lines(&mut Cursor::new(b"" as &[u8])).unwrap();
        assert!(none.is_empty());
        let patterns = ingest_lines(&mut Cursor::new(b"a*\r\nb\r\n" as &[u8])).unwrap();
        assert_eq!(patterns[0].text, b"a*");
        assert_eq!(patterns[1].text, b"b");
    }

    #[test]
    fn snort_ingestion_extracts_pcre_bodies() {
        let input = r#"alert tcp any any -> any 80 (msg:"x"; pcre:"/^x+$/"; sid:1;)
plain line without options
alert tcp any any -> any 80 (pcre:"/a\/b/i"; sid:2;)
"#;
        let (patterns, warnings) =
            ingest_snort(&mut Cursor::new(input.as_bytes())).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(patterns.len(), 2);
        assert_eq!(patterns[0].text, b"^x+$");
        assert_eq!(patterns[0].origin, Some(Origin { line: 1 }));
        assert_eq!(patterns[1].text, b"a/b");
        assert!(patterns[1].flags.case_insensitive);
    }

    #[test]
    fn snort_ingestion_warns_on_malformed_options() {
        let input = "alert (pcre:\"no-slashes\"; sid:1;)\nalert (pcre:\"/unterminated\n";
        let (patterns, warnings) =
            ingest_snort(&mut Cursor::new(input.as_bytes())).unwrap();
        assert!(patterns.is_empty());
        assert_eq!(warnings.len(), 2);
        assert!(warnings[0].contains("line 1"));
        assert!(warnings[1].contains("line 2"));
    }

    #[test]
    fn snort_ingestion_takes_every_option_on_a_line() {
        let input = "alert (pcre:\"/a*/\"; pcre:\"/b+/\";)\n";
        let (patterns, _) = ingest_snort(&mut Cursor::new(input.as_bytes())).unwrap();
        assert_eq!(patterns.len(), 2);
        assert_eq!(patterns[0].text, b"a*");
        assert_eq!(patterns[1].text, b"b+");
        assert_eq!(patterns[1].origin, Some(Origin { line: 1 }));
    }

    #[test]
    fn unknown_snort_flags_become_warnings() {
        let input = "alert (pcre:\"/a/iQ\";)\n";
        let (patterns, warnings) = ingest_snort(&mut Cursor::new(input.as_bytes())).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(patterns.len(), 1);
        assert!(patterns[0].flags.case_insensitive);
        assert!(patterns[0].warnings.iter().any(|w| w.contains('Q')));
    }

    #[test]
    fn records_stay_in_input_order() {
        let report = run_corpus("a\nb\nc\nd\ne\nf\ng\nh\n");
        for (i, record) in report.records.iter().enumerate() {
            assert_eq!(record.index, i);
        }
        assert_eq!(report.records[3].pattern.text, b"d");
    }

    #[test]
    fn summary_counts_match_the_records() {
        let report = run_corpus(
            "^(([01][0-9]|[012][0-3]):([0-5][0-9]))*$\nabc\n(a|a)*\na(?=b)c*\n(a\n(a|b)*\n",
        );
        let s = report.summary;
        assert_eq!(s, Summary::from_records(&report.records));
        assert_eq!(s.total, 6);
        assert_eq!(s.vulnerable, 1);
        assert_eq!(s.pumpable_only, 1);
        assert_eq!(s.safe, 2);
        assert_eq!(s.unsupported, 1);
        assert_eq!(s.malformed, 1);
        assert_eq!(s.analyzable, 4);
        assert_eq!(s.uses_kleene, 3);
    }

    #[test]
    fn empty_corpus_gives_a_zero_summary() {
        let report = run_corpus("");
        assert_eq!(report.summary, Summary::default());
        assert!(render_text(&report).contains("total 0"));
    }

    fn strip_durations(json: &str) -> String {
        json.lines()
            .filter(|l| !l.contains("duration_us"))
            .collect::<Vec<_>>()
            .join("\n")
    }

    #[test]
    fn json_output_is_deterministic_modulo_durations() {
        let corpus = "^(([01][0-9]|[012][0-3]):([0-5][0-9]))*$\n(a|a)*\nabc\n";
        let a = render_json(&run_corpus(corpus));
        let b = render_json(&run_corpus(corpus));
        assert_eq!(strip_durations(&a), strip_durations(&b));
    }

    #[test]
    fn json_report_carries_schema_and_attack_fields() {
        let report = run_corpus("^(([01][0-9]|[012][0-3]):([0-5][0-9]))*$\n");
        let json = render_json(&report);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["schema"], "redos-report/1");
        let record = &value["records"][0];
        assert_eq!(record["verdict"], "vulnerable");
        assert_eq!(record["pump"], "00:00");
        assert_eq!(record["suffix"], " ");
        assert_eq!(record["confirmed"], true);
        assert_eq!(value["summary"]["vulnerable"], 1);
    }

    #[test]
    fn text_report_shows_attacks_and_summary() {
        let report = run_corpus("^(([01][0-9]|[012][0-3]):([0-5][0-9]))*$\nabc\n");
        let text = render_text(&report);
        assert!(text.contains("VULNERABLE"));
        assert!(text.contains("pump \"00:00\""));
        assert!(text.contains("SAFE: no-kleene"));
        assert!(text.contains("summary: total 2"));
    }
}
