use std::ffi::{CStr, CString};
use std::ptr;

use bvfair_ffi::*;

fn last_error() -> String {
    let p = bvf_last_error_message();
    assert!(!p.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

struct Set(*mut BvfScoreSet);

impl Set {
    fn new() -> Self {
        Set(bvf_score_set_new())
    }

    fn push(&self, label: &str, kind: BvfKind, score: f64) -> BvfStatus {
        let label = CString::new(label).unwrap();
        unsafe { bvf_score_set_push(self.0, label.as_ptr(), kind, score) }
    }

    fn evaluate(&self, opts: Option<&BvfOptions>) -> Result<Report, BvfStatus> {
        let mut out = ptr::null_mut();
        let opts = opts.map_or(ptr::null(), |o| o as *const _);
        match unsafe { bvf_evaluate(self.0, opts, &mut out) } {
            BvfStatus::Ok => Ok(Report(out)),
            s => {
                assert!(out.is_null());
                Err(s)
            }
        }
    }
}

impl Drop for Set {
    fn drop(&mut self) {
        unsafe { bvf_score_set_free(self.0) }
    }
}

struct Report(*mut BvfReport);

impl Report {
    fn index(&self, i: BvfIndex, v: BvfVariant, clamped: bool) -> f64 {
        let mut out = f64::NAN;
        assert_eq!(unsafe { bvf_report_index(self.0, i, v, clamped, &mut out) }, BvfStatus::Ok);
        out
    }
}

impl Drop for Report {
    fn drop(&mut self) {
        unsafe { bvf_report_free(self.0) }
    }
}

fn two_group_set() -> Set {
    let set = Set::new();
    for label in ["a", "b"] {
        for s in [0.7, 0.8, 0.9] {
            assert_eq!(set.push(label, BvfKind::Genuine, s), BvfStatus::Ok);
        }
        for s in [0.1, 0.2, 0.3] {
            assert_eq!(set.push(label, BvfKind::Imposter, s), BvfStatus::Ok);
        }
    }
    set
}

const ALL: [(BvfIndex, BvfVariant); 9] = [
    (BvfIndex::Sfi, BvfVariant::Normal),
    (BvfIndex::Sfi, BvfVariant::Extremal),
    (BvfIndex::Sfi, BvfVariant::Weighted),
    (BvfIndex::Cfi, BvfVariant::Normal),
    (BvfIndex::Cfi, BvfVariant::Extremal),
    (BvfIndex::Cfi, BvfVariant::Weighted),
    (BvfIndex::Dfi, BvfVariant::Normal),
    (BvfIndex::Dfi, BvfVariant::Extremal),
    (BvfIndex::Dfi, BvfVariant::Weighted),
];

#[test]
fn identical_groups_score_one_everywhere() {
    let set = two_group_set();
    assert_eq!(unsafe { bvf_score_set_len(set.0) }, 12);
    let report = set.evaluate(None).unwrap();
    for (i, v) in ALL {
        assert_eq!(report.index(i, v, false), 1.0, "{i:?} {v:?}");
        assert_eq!(report.index(i, v, true), 1.0, "{i:?} {v:?}");
    }
    assert_eq!(unsafe { bvf_report_group_count(report.0) }, 2);
    let mut raw = 0.0;
    let mut w = 0.0;
    assert_eq!(unsafe { bvf_report_weight(report.0, 1, &mut raw, &mut w) }, BvfStatus::Ok);
    assert!((w - 0.5).abs() < 1e-15);
    assert!((1.0..=2.0).contains(&raw));
    let label = unsafe { bvf_report_group_label(report.0, 1) };
    assert_eq!(unsafe { CStr::from_ptr(label) }.to_str().unwrap(), "b");
    unsafe { bvf_string_free(label) };
    assert!(unsafe { bvf_report_group_label(report.0, 2) }.is_null());
}

#[test]
fn matches_the_rust_api() {
    let set = Set::new();
    assert_eq!(unsafe { bvf_score_set_fill_synthetic(set.0, BvfPreset::Unfair, true, 7) }, BvfStatus::Ok);
    let report = set.evaluate(None).unwrap();

    let ds = bvfair::generate(
        &bvfair::ScenarioPreset::canonical(bvfair::Preset::Unfair, bvfair::SizeProfile::Imbalanced),
        7,
    )
    .unwrap();
    let expected = bvfair::evaluate(&ds, &bvfair::EvalConfig::default()).unwrap();
    for (i, v) in ALL {
        let kind = match i {
            BvfIndex::Sfi => bvfair::IndexKind::Sfi,
            BvfIndex::Cfi => bvfair::IndexKind::Cfi,
            BvfIndex::Dfi => bvfair::IndexKind::Dfi,
        };
        let variant = match v {
            BvfVariant::Normal => bvfair::Variant::Normal,
            BvfVariant::Extremal => bvfair::Variant::Extremal,
            BvfVariant::Weighted => bvfair::Variant::Weighted,
        };
        assert_eq!(report.index(i, v, false), expected.indices.get(kind, variant).raw);
    }

    let json = unsafe { bvf_report_to_json(report.0) };
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { bvf_string_free(json) };
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["per_group_stats", "fusion_weights", "indices", "config", "warnings"] {
        assert!(parsed.get(key).is_some(), "{key}");
    }
}

#[test]
fn options_flow_through() {
    let set = Set::new();
    for (label, n) in [("a", 2), ("b", 6)] {
        for j in 0..n {
            set.push(label, BvfKind::Genuine, 0.6 + 0.01 * j as f64);
            set.push(label, BvfKind::Imposter, 0.2 + 0.01 * j as f64);
        }
    }
    let mut opts = bvf_options_default();
    assert_eq!(opts.bins, 100);
    assert_eq!(opts.weight_c, 1.0);
    opts.weight_c = 0.0;
    opts.weight_sigma = 0.5;
    let report = set.evaluate(Some(&opts)).unwrap();
    let mut w = [0.0; 2];
    for (i, slot) in w.iter_mut().enumerate() {
        unsafe { bvf_report_weight(report.0, i, ptr::null_mut(), slot) };
    }
    let bump = |r: f64| (-(r - 0.25f64).powi(2) / (2.0 * 0.25)).exp();
    let (ra, rb) = (bump(0.25), bump(0.75));
    assert!((w[0] - ra / (ra + rb)).abs() < 1e-12);

    opts.bins = 1;
    assert_eq!(set.evaluate(Some(&opts)).err(), Some(BvfStatus::InvalidArgument));
    assert!(last_error().contains("bin"), "{}", last_error());
}

#[test]
fn raw_scores_need_normalization() {
    let set = Set::new();
    for label in ["a", "b"] {
        set.push(label, BvfKind::Genuine, 80.0);
        set.push(label, BvfKind::Genuine, 90.0);
        set.push(label, BvfKind::Imposter, 10.0);
        set.push(label, BvfKind::Imposter, 20.0);
    }
    assert_eq!(set.evaluate(None).err(), Some(BvfStatus::ValidationError));
    assert!(last_error().contains("outside [0, 1]"));

    let mut opts = bvf_options_default();
    opts.normalization = BvfNormalization::MinMax;
    let report = set.evaluate(Some(&opts)).unwrap();
    assert_eq!(report.index(BvfIndex::Sfi, BvfVariant::Normal, false), 1.0);
    assert!(bvf_last_error_message().is_null());
}

#[test]
fn pairs_are_classified_and_subject_basis_works() {
    let set = Set::new();
    let csv = CString::new(
        "subject_enroll,subject_probe,demographic_enroll,demographic_probe,score\n\
         s1,s1,a,a,0.9\ns2,s2,a,a,0.8\ns1,s2,a,a,0.2\ns2,s1,a,a,0.3\ns1,s3,a,b,0.5\n\
         s3,s3,b,b,0.85\ns4,s4,b,b,0.75\ns3,s4,b,b,0.15\ns4,s3,b,b,0.25\n",
    )
    .unwrap();
    assert_eq!(unsafe { bvf_score_set_add_pairs_csv(set.0, csv.as_ptr()) }, BvfStatus::Ok);
    let mut opts = bvf_options_default();
    opts.ratio_basis = BvfRatioBasis::Subjects;
    let report = set.evaluate(Some(&opts)).unwrap_or_else(|s| panic!("{s:?}: {}", last_error()));
    let json = unsafe { bvf_report_to_json(report.0) };
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { bvf_string_free(json) };
    assert!(text.contains("\"discarded_pairs\": 1"), "{text}");

    // labeled rows carry no subject ids
    set.push("a", BvfKind::Genuine, 0.5);
    assert_eq!(set.evaluate(Some(&opts)).err(), Some(BvfStatus::ValidationError));
}

#[test]
fn parse_errors_report_line_numbers() {
    let set = Set::new();
    let csv = CString::new("demographic,kind,score\na,genuine,0.5\na,sideways,0.5\n").unwrap();
    let status = unsafe { bvf_score_set_add_labeled_csv(set.0, csv.as_ptr()) };
    assert_eq!(status, BvfStatus::ParseError);
    assert!(last_error().contains("line 3"), "{}", last_error());
    assert_eq!(unsafe { bvf_score_set_len(set.0) }, 0);
}

#[test]
fn validation_errors() {
    let set = Set::new();
    assert_eq!(set.push("", BvfKind::Genuine, 0.5), BvfStatus::ValidationError);
    assert_eq!(set.push("a", BvfKind::Genuine, f64::NAN), BvfStatus::ValidationError);
    set.push("a", BvfKind::Genuine, 0.5);
    set.push("a", BvfKind::Imposter, 0.1);
    assert_eq!(set.evaluate(None).err(), Some(BvfStatus::ValidationError));
    assert!(last_error().contains("K must be"));

    let empty = Set::new();
    assert_eq!(empty.evaluate(None).err(), Some(BvfStatus::ValidationError));
}

#[test]
fn null_and_bad_utf8_arguments() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(bvf_evaluate(ptr::null(), ptr::null(), &mut out), BvfStatus::NullPointer);
        assert!(last_error().contains("set"));
        let set = two_group_set();
        assert_eq!(bvf_evaluate(set.0, ptr::null(), ptr::null_mut()), BvfStatus::NullPointer);
        assert_eq!(bvf_score_set_push(set.0, ptr::null(), BvfKind::Genuine, 0.5), BvfStatus::NullPointer);
        assert_eq!(bvf_score_set_add_labeled_csv(set.0, ptr::null()), BvfStatus::NullPointer);
        let bad = [0xffu8, 0xfe, 0];
        assert_eq!(
            bvf_score_set_push(set.0, bad.as_ptr().cast(), BvfKind::Genuine, 0.5),
            BvfStatus::InvalidUtf8
        );

        let mut v = 0.0;
        assert_eq!(
            bvf_report_index(ptr::null(), BvfIndex::Sfi, BvfVariant::Normal, false, &mut v),
            BvfStatus::NullPointer
        );
        assert_eq!(bvf_report_weight(ptr::null(), 0, &mut v, &mut v), BvfStatus::NullPointer);
        assert!(bvf_report_to_json(ptr::null()).is_null());
        assert_eq!(bvf_report_group_count(ptr::null()), 0);
        assert_eq!(bvf_score_set_len(ptr::null()), 0);

        let report = set.evaluate(None).unwrap();
        assert_eq!(
            bvf_report_index(report.0, BvfIndex::Sfi, BvfVariant::Normal, false, ptr::null_mut()),
            BvfStatus::NullPointer
        );
        assert_eq!(bvf_report_weight(report.0, 9, &mut v, &mut v), BvfStatus::InvalidArgument);

        bvf_score_set_free(ptr::null_mut());
        bvf_report_free(ptr::null_mut());
        bvf_string_free(ptr::null_mut());
    }
}

#[test]
fn fusion_weights_entry_point() {
    let sizes = [250u64, 750];
    let mut out = [0.0; 2];
    let status = unsafe { bvf_fusion_weights(sizes.as_ptr(), sizes.len(), out.as_mut_ptr()) };
    assert_eq!(status, BvfStatus::Ok);
    let expected = bvfair::compute_fusion_weights(&sizes).unwrap().normalized();
    assert_eq!(out.to_vec(), expected);
    assert!((out[0] - 0.637890).abs() < 1e-6);

    let bad = [10u64, 0];
    assert_eq!(
        unsafe { bvf_fusion_weights(bad.as_ptr(), bad.len(), out.as_mut_ptr()) },
        BvfStatus::ValidationError
    );
    assert_eq!(
        unsafe { bvf_fusion_weights(sizes.as_ptr(), 1, out.as_mut_ptr()) },
        BvfStatus::ValidationError
    );
    assert_eq!(
        unsafe { bvf_fusion_weights(ptr::null(), 2, out.as_mut_ptr()) },
        BvfStatus::NullPointer
    );
}

#[test]
fn errors_are_thread_local() {
    let set = Set::new();
    assert_eq!(set.evaluate(None).err(), Some(BvfStatus::ValidationError));
    std::thread::spawn(|| assert!(bvf_last_error_message().is_null()))
        .join()
        .unwrap();
    assert!(!bvf_last_error_message().is_null());
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(bvf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
