#ifndef REDOS_H
#define REDOS_H

/* Generated from the redos-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of one backtracking-matcher run.
 */
typedef enum RxMatchStatus {
  RX_MATCH_STATUS_MATCHED = 0,
  RX_MATCH_STATUS_NO_MATCH = 1,
  RX_MATCH_STATUS_BUDGET_EXCEEDED = 2,
} RxMatchStatus;

/**
 * Outcome of a C API call.
 */
typedef enum RxStatus {
  RX_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  RX_STATUS_NULL_ARGUMENT = 1,
  /**
   * A configuration value is out of range.
   */
  RX_STATUS_INVALID_CONFIG = 2,
  /**
   * The pattern does not parse.
   */
  RX_STATUS_PARSE_ERROR = 3,
  /**
   * The verdict carries no attack of the requested shape.
   */
  RX_STATUS_NO_ATTACK = 4,
  /**
   * An internal error was caught at the boundary.
   */
  RX_STATUS_INTERNAL = 5,
} RxStatus;

/**
 * Top-level classification of one pattern.
 */
typedef enum RxVerdictKind {
  RX_VERDICT_KIND_VULNERABLE = 0,
  RX_VERDICT_KIND_PUMPABLE_ONLY = 1,
  RX_VERDICT_KIND_SAFE = 2,
  RX_VERDICT_KIND_INCONCLUSIVE = 3,
  RX_VERDICT_KIND_UNSUPPORTED = 4,
  RX_VERDICT_KIND_MALFORMED = 5,
} RxVerdictKind;

/**
 * Opaque analyzer handle holding the analysis configuration.
 */
typedef struct RxAnalyzer RxAnalyzer;

/**
 * Opaque result handle for one analyzed pattern.
 */
typedef struct RxVerdict RxVerdict;

/**
 * A borrowed byte view into an analyzer result. Valid until the verdict
 * it was read from is freed; never NUL-terminated.
 */
typedef struct RxBytes {
  const uint8_t *data;
  size_t len;
} RxBytes;

/**
 * Step count and match result of one simulation run. `matched_len` is
 * meaningful only when `status` is `RX_MATCH_STATUS_MATCHED`.
 */
typedef struct RxMatchResult {
  enum RxMatchStatus status;
  uint64_t steps;
  uint64_t matched_len;
} RxMatchResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an analyzer with default limits. Free with
 * [`rx_analyzer_free`]. Never returns null.
 */
struct RxAnalyzer *rx_analyzer_new(void);

/**
 * Replaces the analyzer's numeric limits. On `RX_STATUS_INVALID_CONFIG`
 * the previous limits are kept.
 *
 * # Safety
 * `analyzer` must be a live pointer from [`rx_analyzer_new`].
 */
enum RxStatus rx_analyzer_set_limits(struct RxAnalyzer *analyzer,
                                     uint64_t hfpi_cap,
                                     uint64_t budget,
                                     uint32_t pump_max,
                                     double threshold);

/**
 * Enables or disables attack synthesis and dynamic confirmation. With
 * verification off, no pattern is ever reported vulnerable.
 *
 * # Safety
 * `analyzer` must be a live pointer from [`rx_analyzer_new`].
 */
enum RxStatus rx_analyzer_set_verify(struct RxAnalyzer *analyzer, bool verify);

/**
 * Frees an analyzer. Null is ignored.
 *
 * # Safety
 * `analyzer` must be null or a live pointer from [`rx_analyzer_new`],
 * not used afterwards.
 */
void rx_analyzer_free(struct RxAnalyzer *analyzer);

/**
 * Classifies one pattern and writes a verdict handle to `out`. The
 * pattern is raw bytes, not NUL-terminated. Parse failures still
 * produce a verdict (unsupported or malformed), not an error status.
 *
 * # Safety
 * `analyzer` must be a live pointer from [`rx_analyzer_new`]; `pattern`
 * must point to `pattern_len` readable bytes (null only if the length
 * is zero); `out` must be a valid destination for one pointer.
 */
enum RxStatus rx_analyze(const struct RxAnalyzer *analyzer,
                         const uint8_t *pattern,
                         size_t pattern_len,
                         struct RxVerdict **out);

/**
 * The verdict's top-level classification.
 *
 * # Safety
 * `verdict` must be a live pointer from [`rx_analyze`].
 */
enum RxVerdictKind rx_verdict_kind(const struct RxVerdict *verdict);

/**
 * Steps spent by the pumpable-string search, maximized over the
 * pattern's star nodes.
 *
 * # Safety
 * `verdict` must be a live pointer from [`rx_analyze`].
 */
uint64_t rx_verdict_hfpi_steps(const struct RxVerdict *verdict);

/**
 * True exactly for vulnerable verdicts, whose growth measurement is
 * always confirmed.
 *
 * # Safety
 * `verdict` must be a live pointer from [`rx_analyze`].
 */
bool rx_verdict_confirmed(const struct RxVerdict *verdict);

/**
 * The verdict's elaboration: the reason tag for pumpable-only and safe
 * verdicts, the offending construct or parse message otherwise. Empty
 * for vulnerable and inconclusive verdicts.
 *
 * # Safety
 * `verdict` must be a live pointer from [`rx_analyze`]; `out` must be
 * a valid destination. The view lives until the verdict is freed.
 */
enum RxStatus rx_verdict_detail(const struct RxVerdict *verdict, struct RxBytes *out);

/**
 * The confirmed attack input scheme prefix · pumpⁿ · suffix of a
 * vulnerable verdict. Returns `RX_STATUS_NO_ATTACK` for any other
 * verdict kind.
 *
 * # Safety
 * `verdict` must be a live pointer from [`rx_analyze`]; `prefix`,
 * `pump`, and `suffix` must be valid destinations. The views live
 * until the verdict is freed.
 */
enum RxStatus rx_verdict_attack(const struct RxVerdict *verdict,
                                struct RxBytes *prefix,
                                struct RxBytes *pump,
                                struct RxBytes *suffix);

/**
 * The pump word of a vulnerable or pumpable-only verdict: a string the
 * star's body can match in two distinct ways. Returns
 * `RX_STATUS_NO_ATTACK` for other verdict kinds.
 *
 * # Safety
 * `verdict` must be a live pointer from [`rx_analyze`]; `out` must be
 * a valid destination. The view lives until the verdict is freed.
 */
enum RxStatus rx_verdict_pump(const struct RxVerdict *verdict, struct RxBytes *out);

/**
 * Frees a verdict and every view read from it. Null is ignored.
 *
 * # Safety
 * `verdict` must be null or a live pointer from [`rx_analyze`], not
 * used afterwards.
 */
void rx_verdict_free(struct RxVerdict *verdict);

/**
 * Runs the step-counted backtracking matcher once. Returns
 * `RX_STATUS_PARSE_ERROR` when the pattern does not parse into the
 * supported subset.
 *
 * # Safety
 * `pattern` and `input` must point to the given numbers of readable
 * bytes (null only with length zero); `out` must be a valid
 * destination.
 */
enum RxStatus rx_simulate(const uint8_t *pattern,
                          size_t pattern_len,
                          const uint8_t *input,
                          size_t input_len,
                          uint64_t budget,
                          struct RxMatchResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REDOS_H */
