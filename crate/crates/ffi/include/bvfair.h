#ifndef BVFAIR_H
#define BVFAIR_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum {
  BVF_NORMALIZATION_NONE = 0,
  BVF_NORMALIZATION_MIN_MAX = 1,
  BVF_NORMALIZATION_ONE_MINUS = 2,
} BvfNormalization;

typedef enum {
  BVF_RATIO_BASIS_RECORDS = 0,
  BVF_RATIO_BASIS_SUBJECTS = 1,
} BvfRatioBasis;

typedef enum {
  BVF_STATUS_OK = 0,
  BVF_STATUS_NULL_POINTER = 1,
  BVF_STATUS_INVALID_UTF8 = 2,
  BVF_STATUS_INVALID_ARGUMENT = 3,
  BVF_STATUS_PARSE_ERROR = 4,
  BVF_STATUS_VALIDATION_ERROR = 5,
  BVF_STATUS_NUMERIC_ERROR = 6,
  BVF_STATUS_PANIC = 7,
} BvfStatus;

typedef enum {
  BVF_KIND_GENUINE = 0,
  BVF_KIND_IMPOSTER = 1,
} BvfKind;

typedef enum {
  BVF_PRESET_FAIR = 0,
  BVF_PRESET_UNFAIR = 1,
  BVF_PRESET_HIGHLY_UNFAIR = 2,
} BvfPreset;

typedef enum {
  BVF_INDEX_SFI = 0,
  BVF_INDEX_CFI = 1,
  BVF_INDEX_DFI = 2,
} BvfIndex;

typedef enum {
  BVF_VARIANT_NORMAL = 0,
  BVF_VARIANT_EXTREMAL = 1,
  BVF_VARIANT_WEIGHTED = 2,
} BvfVariant;

/**
 * Result of an evaluation.
 */
typedef struct BvfReport BvfReport;

/**
 * Accumulates labeled scores and raw pairs until evaluation.
 */
typedef struct BvfScoreSet BvfScoreSet;

/**
 * Evaluation options. Start from `bvf_options_default()`.
 */
typedef struct {
  /**
   * Histogram bins over [0, 1]; at least 2.
   */
  uint32_t bins;
  BvfNormalization normalization;
  BvfRatioBasis ratio_basis;
  /**
   * Weighing-function constant.
   */
  double weight_c;
  /**
   * Weighing-function sigma; values <= 0 select 1/(2K).
   */
  double weight_sigma;
} BvfOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread, or NULL.
 * Valid until the next library call on the same thread.
 */
const char *bvf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bvf_version(void);

BvfOptions bvf_options_default(void);

BvfScoreSet *bvf_score_set_new(void);

/**
 * # Safety
 * `set` must come from `bvf_score_set_new` and not have been freed. NULL is ignored.
 */
void bvf_score_set_free(BvfScoreSet *set);

/**
 * Number of labeled scores plus raw pairs held.
 *
 * # Safety
 * `set` must be a live handle or NULL.
 */
size_t bvf_score_set_len(const BvfScoreSet *set);

/**
 * Appends one labeled score. The range check happens at evaluation, after
 * normalization.
 *
 * # Safety
 * `set` must be a live handle; `demographic` a NUL-terminated UTF-8 string.
 */
BvfStatus bvf_score_set_push(BvfScoreSet *set, const char *demographic, BvfKind kind, double score);

/**
 * Parses labeled-score CSV text (`demographic,kind,score`) and appends its rows.
 *
 * # Safety
 * `set` must be a live handle; `csv` a NUL-terminated UTF-8 string.
 */
BvfStatus bvf_score_set_add_labeled_csv(BvfScoreSet *set, const char *csv);

/**
 * Parses pair-score CSV text and appends the pairs; they are classified
 * into genuine and intra-demographic imposter scores at evaluation.
 *
 * # Safety
 * `set` must be a live handle; `csv` a NUL-terminated UTF-8 string.
 */
BvfStatus bvf_score_set_add_pairs_csv(BvfScoreSet *set, const char *csv);

/**
 * Replaces the contents of `set` with a canonical synthetic dataset.
 *
 * # Safety
 * `set` must be a live handle.
 */
BvfStatus bvf_score_set_fill_synthetic(BvfScoreSet *set,
                                       BvfPreset preset,
                                       bool imbalanced,
                                       uint64_t seed);

/**
 * Evaluates all nine indices. On success `*out` receives a new report
 * handle to be released with `bvf_report_free`.
 *
 * # Safety
 * `set` must be a live handle; `options` may be NULL for defaults; `out`
 * must point to writable storage for one pointer.
 */
BvfStatus bvf_evaluate(const BvfScoreSet *set, const BvfOptions *options, BvfReport **out);

/**
 * # Safety
 * `report` must come from `bvf_evaluate` and not have been freed. NULL is ignored.
 */
void bvf_report_free(BvfReport *report);

/**
 * Reads one index value; `clamped` selects `max(raw, 0)` instead of the raw value.
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
BvfStatus bvf_report_index(const BvfReport *report,
                           BvfIndex index,
                           BvfVariant variant,
                           bool clamped,
                           double *out);

/**
 * Number of demographic groups in the report.
 *
 * # Safety
 * `report` must be a live handle or NULL.
 */
size_t bvf_report_group_count(const BvfReport *report);

/**
 * Fusion weights of group `i` (groups are ordered by label). Either output may be NULL.
 *
 * # Safety
 * `report` must be a live handle; non-NULL outputs must be writable.
 */
BvfStatus bvf_report_weight(const BvfReport *report,
                            size_t i,
                            double *out_raw,
                            double *out_normalized);

/**
 * Full report as JSON; NULL on failure. Release with `bvf_string_free`.
 *
 * # Safety
 * `report` must be a live handle or NULL.
 */
char *bvf_report_to_json(const BvfReport *report);

/**
 * Label of group `i`; NULL when out of range. Release with `bvf_string_free`.
 *
 * # Safety
 * `report` must be a live handle or NULL.
 */
char *bvf_report_group_label(const BvfReport *report, size_t i);

/**
 * # Safety
 * `s` must come from this library and not have been freed. NULL is ignored.
 */
void bvf_string_free(char *s);

/**
 * Normalized fusion weights for `len` group sizes, written to `out[0..len]`.
 *
 * # Safety
 * `sizes` must point to `len` readable values and `out` to `len` writable ones.
 */
BvfStatus bvf_fusion_weights(const uint64_t *sizes, size_t len, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BVFAIR_H */
