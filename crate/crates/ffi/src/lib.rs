//! C ABI over `bvfair`.
//!
//! Scores go into an opaque [`BvfScoreSet`]; [`bvf_evaluate`] turns it into
//! an opaque [`BvfReport`] whose index values, weights and JSON form can be
//! read back. Every fallible call returns a [`BvfStatus`]; on failure the
//! message is available from [`bvf_last_error_message`] on the same thread.
//!
//! Handles are not thread-safe; strings returned as `char *` must be
//! released with [`bvf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bvfair::synthetic::{generate, Preset, ScenarioPreset, SizeProfile};
use bvfair::{
    classify_pairs, compute_fusion_weights, evaluate, normalize_scores, parse_labeled_scores,
    parse_pair_scores, validate_dataset, EvalConfig, FairnessError, FairnessReport, IndexKind,
    Normalization, PairRecord, Provenance, RatioBasis, ScoreKind, ScoreRecord, Variant,
    WeightParams,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    ParseError = 4,
    ValidationError = 5,
    NumericError = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvfKind {
    Genuine = 0,
    Imposter = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvfIndex {
    Sfi = 0,
    Cfi = 1,
    Dfi = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvfVariant {
    Normal = 0,
    Extremal = 1,
    Weighted = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvfNormalization {
    None = 0,
    MinMax = 1,
    OneMinus = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvfRatioBasis {
    Records = 0,
    Subjects = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvfPreset {
    Fair = 0,
    Unfair = 1,
    HighlyUnfair = 2,
}

/// Evaluation options. Start from `bvf_options_default()`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvfOptions {
    /// Histogram bins over [0, 1]; at least 2.
    pub bins: u32,
    pub normalization: BvfNormalization,
    pub ratio_basis: BvfRatioBasis,
    /// Weighing-function constant.
    pub weight_c: f64,
    /// Weighing-function sigma; values <= 0 select 1/(2K).
    pub weight_sigma: f64,
}

/// Accumulates labeled scores and raw pairs until evaluation.
pub struct BvfScoreSet {
    records: Vec<ScoreRecord>,
    pairs: Vec<PairRecord>,
}

/// Result of an evaluation.
pub struct BvfReport {
    report: FairnessReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &FairnessError) -> BvfStatus {
    use FairnessError as E;
    match e {
        E::Parse { .. } => BvfStatus::ParseError,
        E::DivergenceUndefined { .. } | E::ConstantScores { .. } => BvfStatus::NumericError,
        E::InvalidWeightParam(_) | E::InvalidBinCount(_) | E::InvalidArgument(_) | E::InvalidPreset(_) => {
            BvfStatus::InvalidArgument
        }
        _ => BvfStatus::ValidationError,
    }
}

struct Failure(BvfStatus, String);

impl From<FairnessError> for Failure {
    fn from(e: FairnessError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(BvfStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BvfStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BvfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BvfStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(BvfStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message for the most recent failed call on this thread, or NULL.
/// Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn bvf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bvf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn bvf_options_default() -> BvfOptions {
    BvfOptions {
        bins: bvfair::DEFAULT_BINS as u32,
        normalization: BvfNormalization::None,
        ratio_basis: BvfRatioBasis::Records,
        weight_c: bvfair::weights::DEFAULT_C,
        weight_sigma: 0.0,
    }
}

#[no_mangle]
pub extern "C" fn bvf_score_set_new() -> *mut BvfScoreSet {
    Box::into_raw(Box::new(BvfScoreSet {
        records: Vec::new(),
        pairs: Vec::new(),
    }))
}

/// # Safety
/// `set` must come from `bvf_score_set_new` and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bvf_score_set_free(set: *mut BvfScoreSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of labeled scores plus raw pairs held.
///
/// # Safety
/// `set` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn bvf_score_set_len(set: *const BvfScoreSet) -> usize {
    set.as_ref().map_or(0, |s| s.records.len() + s.pairs.len())
}

/// Appends one labeled score. The range check happens at evaluation, after
/// normalization.
///
/// # Safety
/// `set` must be a live handle; `demographic` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn bvf_score_set_push(
    set: *mut BvfScoreSet,
    demographic: *const c_char,
    kind: BvfKind,
    score: f64,
) -> BvfStatus {
    guard(|| {
        let set = handle_mut(set, "set")?;
        let label = str_arg(demographic, "demographic")?;
        let kind = match kind {
            BvfKind::Genuine => ScoreKind::Genuine,
            BvfKind::Imposter => ScoreKind::Imposter,
        };
        set.records.push(ScoreRecord::raw(label, kind, score)?);
        Ok(())
    })
}

/// Parses labeled-score CSV text (`demographic,kind,score`) and appends its rows.
///
/// # Safety
/// `set` must be a live handle; `csv` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn bvf_score_set_add_labeled_csv(set: *mut BvfScoreSet, csv: *const c_char) -> BvfStatus {
    guard(|| {
        let set = handle_mut(set, "set")?;
        let text = str_arg(csv, "csv")?;
        set.records.extend(parse_labeled_scores(text.as_bytes())?);
        Ok(())
    })
}

/// Parses pair-score CSV text and appends the pairs; they are classified
/// into genuine and intra-demographic imposter scores at evaluation.
///
/// # Safety
/// `set` must be a live handle; `csv` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn bvf_score_set_add_pairs_csv(set: *mut BvfScoreSet, csv: *const c_char) -> BvfStatus {
    guard(|| {
        let set = handle_mut(set, "set")?;
        let text = str_arg(csv, "csv")?;
        set.pairs.extend(parse_pair_scores(text.as_bytes())?);
        Ok(())
    })
}

/// Replaces the contents of `set` with a canonical synthetic dataset.
///
/// # Safety
/// `set` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bvf_score_set_fill_synthetic(
    set: *mut BvfScoreSet,
    preset: BvfPreset,
    imbalanced: bool,
    seed: u64,
) -> BvfStatus {
    guard(|| {
        let set = handle_mut(set, "set")?;
        let preset = match preset {
            BvfPreset::Fair => Preset::Fair,
            BvfPreset::Unfair => Preset::Unfair,
            BvfPreset::HighlyUnfair => Preset::HighlyUnfair,
        };
        let profile = if imbalanced {
            SizeProfile::Imbalanced
        } else {
            SizeProfile::Balanced
        };
        let ds = generate(&ScenarioPreset::canonical(preset, profile), seed)?;
        set.pairs.clear();
        set.records.clear();
        for g in ds.groups() {
            for (kind, scores) in [(ScoreKind::Genuine, &g.genuine), (ScoreKind::Imposter, &g.imposter)] {
                for &s in scores.iter() {
                    set.records.push(ScoreRecord::new(g.demographic.clone(), kind, s)?);
                }
            }
        }
        Ok(())
    })
}

/// Evaluates all nine indices. On success `*out` receives a new report
/// handle to be released with `bvf_report_free`.
///
/// # Safety
/// `set` must be a live handle; `options` may be NULL for defaults; `out`
/// must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn bvf_evaluate(
    set: *const BvfScoreSet,
    options: *const BvfOptions,
    out: *mut *mut BvfReport,
) -> BvfStatus {
    guard(|| {
        let set = handle(set, "set")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let opts = options.as_ref().copied().unwrap_or_else(|| bvf_options_default());

        let mut records = set.records.clone();
        let mut discarded = None;
        let mut subjects = None;
        if !set.pairs.is_empty() {
            let classified = classify_pairs(&set.pairs)?;
            records.extend(classified.records);
            discarded = Some(classified.discarded);
            subjects = Some(classified.subjects_per_group);
        }
        let normalization = match opts.normalization {
            BvfNormalization::None => Normalization::None,
            BvfNormalization::MinMax => Normalization::MinMax,
            BvfNormalization::OneMinus => Normalization::OneMinus,
        };
        let records = normalize_scores(&records, normalization)?;
        let mut ds = validate_dataset(&records)?;
        let ratio_basis = match opts.ratio_basis {
            BvfRatioBasis::Records => RatioBasis::Records,
            BvfRatioBasis::Subjects => RatioBasis::Subjects,
        };
        if ratio_basis == RatioBasis::Subjects {
            // labeled scores carry no subject ids
            if !set.records.is_empty() {
                return Err(FairnessError::SubjectCountsUnavailable.into());
            }
            if let Some(counts) = &subjects {
                ds = ds.with_subject_counts(counts)?;
            }
        }
        let config = EvalConfig {
            bins: opts.bins as usize,
            weights: WeightParams {
                c: opts.weight_c,
                sigma: (opts.weight_sigma > 0.0).then_some(opts.weight_sigma),
            },
            ratio_basis,
            provenance: Provenance {
                input_format: if set.pairs.is_empty() { "labeled" } else { "pairs" }.into(),
                normalization,
                discarded_pairs: discarded,
                synthetic_source: None,
            },
        };
        let report = evaluate(&ds, &config)?;
        *out = Box::into_raw(Box::new(BvfReport { report }));
        Ok(())
    })
}

/// # Safety
/// `report` must come from `bvf_evaluate` and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bvf_report_free(report: *mut BvfReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Reads one index value; `clamped` selects `max(raw, 0)` instead of the raw value.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bvf_report_index(
    report: *const BvfReport,
    index: BvfIndex,
    variant: BvfVariant,
    clamped: bool,
    out: *mut f64,
) -> BvfStatus {
    guard(|| {
        let r = handle(report, "report")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = match index {
            BvfIndex::Sfi => IndexKind::Sfi,
            BvfIndex::Cfi => IndexKind::Cfi,
            BvfIndex::Dfi => IndexKind::Dfi,
        };
        let variant = match variant {
            BvfVariant::Normal => Variant::Normal,
            BvfVariant::Extremal => Variant::Extremal,
            BvfVariant::Weighted => Variant::Weighted,
        };
        let v = r.report.indices.get(kind, variant);
        *out = if clamped { v.clamped } else { v.raw };
        Ok(())
    })
}

/// Number of demographic groups in the report.
///
/// # Safety
/// `report` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn bvf_report_group_count(report: *const BvfReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.per_group_stats.len())
}

/// Fusion weights of group `i` (groups are ordered by label). Either output may be NULL.
///
/// # Safety
/// `report` must be a live handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn bvf_report_weight(
    report: *const BvfReport,
    i: usize,
    out_raw: *mut f64,
    out_normalized: *mut f64,
) -> BvfStatus {
    guard(|| {
        let r = handle(report, "report")?;
        let g = r.report.fusion_weights.groups.get(i).ok_or_else(|| {
            Failure(BvfStatus::InvalidArgument, format!("group index {i} out of range"))
        })?;
        if let Some(o) = out_raw.as_mut() {
            *o = g.raw;
        }
        if let Some(o) = out_normalized.as_mut() {
            *o = g.normalized;
        }
        Ok(())
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Full report as JSON; NULL on failure. Release with `bvf_string_free`.
///
/// # Safety
/// `report` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn bvf_report_to_json(report: *const BvfReport) -> *mut c_char {
    clear_error();
    match report.as_ref() {
        Some(r) => into_c_string(r.report.to_json()),
        None => {
            set_error("report is null");
            ptr::null_mut()
        }
    }
}

/// Label of group `i`; NULL when out of range. Release with `bvf_string_free`.
///
/// # Safety
/// `report` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn bvf_report_group_label(report: *const BvfReport, i: usize) -> *mut c_char {
    report
        .as_ref()
        .and_then(|r| r.report.per_group_stats.get(i))
        .map_or(ptr::null_mut(), |g| into_c_string(g.stats.demographic.clone()))
}

/// # Safety
/// `s` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bvf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Normalized fusion weights for `len` group sizes, written to `out[0..len]`.
///
/// # Safety
/// `sizes` must point to `len` readable values and `out` to `len` writable ones.
#[no_mangle]
pub unsafe extern "C" fn bvf_fusion_weights(sizes: *const u64, len: usize, out: *mut f64) -> BvfStatus {
    guard(|| {
        if sizes.is_null() {
            return Err(null("sizes"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let sizes = std::slice::from_raw_parts(sizes, len);
        let w = compute_fusion_weights(sizes)?;
        let out = std::slice::from_raw_parts_mut(out, len);
        for (o, g) in out.iter_mut().zip(&w.groups) {
            *o = g.normalized;
        }
        Ok(())
    })
}
