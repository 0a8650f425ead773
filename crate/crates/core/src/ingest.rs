//! Score file parsing, pair classification, and score normalization.
//!
//! Two CSV layouts are accepted, both UTF-8 with `#` comment lines:
//!
//! * labeled scores: `demographic,kind,score`
//! * pair scores: `subject_enroll,subject_probe,demographic_enroll,demographic_probe,score`
//!
//! Parsers do not range-check scores; that happens in [`normalize_scores`]
//! or [`crate::validate_dataset`], so unnormalized matcher output can be
//! read and rescaled first.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{FairnessError, Result};
use crate::types::{check_score, ScoreKind, ScoreRecord};

pub const LABELED_HEADER: [&str; 3] = ["demographic", "kind", "score"];
pub const PAIR_HEADER: [&str; 5] = [
    "subject_enroll",
    "subject_probe",
    "demographic_enroll",
    "demographic_probe",
    "score",
];

/// One comparison between an enrollment and a probe sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub subject_enroll: String,
    pub subject_probe: String,
    pub demographic_enroll: String,
    pub demographic_probe: String,
    pub score: f64,
}

/// Result of splitting pairs into genuine and intra-demographic imposter scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedPairs {
    pub records: Vec<ScoreRecord>,
    /// Cross-subject pairs whose demographics differ.
    pub discarded: usize,
    /// Distinct subjects seen per demographic, over all input pairs.
    pub subjects_per_group: BTreeMap<String, usize>,
}

/// How raw scores are mapped into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Pass through; any out-of-range score is an error.
    #[default]
    None,
    /// Global affine map of `[min, max]` onto `[0, 1]`.
    MinMax,
    /// `s -> 1 - s`, for distance-like scores already in `[0, 1]`.
    OneMinus,
}

fn parse_error(line: u64, message: impl Into<String>) -> FairnessError {
    FairnessError::Parse {
        line,
        message: message.into(),
    }
}

/// Splits one CSV line into trimmed fields. Lines with quotes go through
/// the csv crate; everything else is a plain comma split.
fn split_fields(line: &str) -> std::result::Result<Vec<String>, String> {
    if !line.contains('"') {
        return Ok(line.split(',').map(|f| f.trim().to_owned()).collect());
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(line.as_bytes());
    match rdr.records().next() {
        Some(Ok(r)) => Ok(r.iter().map(str::to_owned).collect()),
        Some(Err(e)) => Err(e.to_string()),
        None => Ok(Vec::new()),
    }
}

/// Reads the input, checks the header, and returns `(line, fields)` for each
/// data row. Blank lines and `#` comments are skipped but still counted.
fn rows<R: Read>(mut input: R, header: &[&str]) -> Result<Vec<(u64, Vec<String>)>> {
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .map_err(|e| parse_error(0, format!("cannot read input: {e}")))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i as u64 + 1, l.trim_start_matches('\u{feff}')))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });

    let (line, head) = lines.next().ok_or_else(|| parse_error(1, "missing header"))?;
    let found = split_fields(head).map_err(|m| parse_error(line, m))?;
    let matches = found.len() == header.len()
        && found.iter().zip(header).all(|(f, h)| f.eq_ignore_ascii_case(h));
    if !matches {
        return Err(parse_error(
            line,
            format!("expected header '{}', found '{}'", header.join(","), found.join(",")),
        ));
    }

    let width = header.len();
    lines
        .map(|(line, l)| {
            let fields = split_fields(l).map_err(|m| parse_error(line, m))?;
            if fields.len() != width {
                return Err(parse_error(
                    line,
                    format!("expected {width} columns, found {}", fields.len()),
                ));
            }
            Ok((line, fields))
        })
        .collect()
}

fn parse_score(line: u64, field: &str) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(parse_error(line, format!("invalid score '{field}'"))),
    }
}

fn label(line: u64, field: &str, what: &str) -> Result<String> {
    if field.is_empty() {
        Err(parse_error(line, format!("empty {what}")))
    } else {
        Ok(field.to_owned())
    }
}

/// Parses the labeled-score CSV format.
pub fn parse_labeled_scores<R: Read>(input: R) -> Result<Vec<ScoreRecord>> {
    rows(input, &LABELED_HEADER)?
        .into_iter()
        .map(|(line, r)| {
            let demographic = label(line, &r[0], "demographic")?;
            let kind: ScoreKind = r[1].parse().map_err(|m: String| parse_error(line, m))?;
            let score = parse_score(line, &r[2])?;
            Ok(ScoreRecord::unchecked(demographic, kind, score))
        })
        .collect()
}

/// Parses the pair-score CSV format.
pub fn parse_pair_scores<R: Read>(input: R) -> Result<Vec<PairRecord>> {
    rows(input, &PAIR_HEADER)?
        .into_iter()
        .map(|(line, r)| {
            Ok(PairRecord {
                subject_enroll: label(line, &r[0], "subject_enroll")?,
                subject_probe: label(line, &r[1], "subject_probe")?,
                demographic_enroll: label(line, &r[2], "demographic_enroll")?,
                demographic_probe: label(line, &r[3], "demographic_probe")?,
                score: parse_score(line, &r[4])?,
            })
        })
        .collect()
}

fn assign_subject<'a>(
    seen: &mut BTreeMap<&'a str, &'a str>,
    subject: &'a str,
    group: &'a str,
) -> Result<()> {
    match seen.entry(subject) {
        Entry::Vacant(v) => {
            v.insert(group);
            Ok(())
        }
        Entry::Occupied(o) if *o.get() == group => Ok(()),
        Entry::Occupied(o) => Err(FairnessError::InconsistentSubject {
            subject: subject.to_owned(),
            first: (*o.get()).to_owned(),
            second: group.to_owned(),
        }),
    }
}

/// Splits pairs into genuine and intra-demographic imposter records.
///
/// Same-subject pairs are genuine. Different-subject pairs are imposters
/// only when both samples share a demographic; the rest are dropped and
/// counted. A subject seen under two demographics is an error.
pub fn classify_pairs(pairs: &[PairRecord]) -> Result<ClassifiedPairs> {
    let mut subject_group: BTreeMap<&str, &str> = BTreeMap::new();
    for p in pairs {
        assign_subject(&mut subject_group, &p.subject_enroll, &p.demographic_enroll)?;
        assign_subject(&mut subject_group, &p.subject_probe, &p.demographic_probe)?;
    }

    let mut records = Vec::with_capacity(pairs.len());
    let mut discarded = 0;
    for p in pairs {
        if p.subject_enroll == p.subject_probe {
            // consistency check above guarantees both demographics agree
            records.push(ScoreRecord::unchecked(
                p.demographic_enroll.clone(),
                ScoreKind::Genuine,
                p.score,
            ));
        } else if p.demographic_enroll == p.demographic_probe {
            records.push(ScoreRecord::unchecked(
                p.demographic_enroll.clone(),
                ScoreKind::Imposter,
                p.score,
            ));
        } else {
            discarded += 1;
        }
    }

    let mut subjects_per_group = BTreeMap::new();
    for group in subject_group.values() {
        *subjects_per_group.entry((*group).to_owned()).or_insert(0) += 1;
    }
    Ok(ClassifiedPairs {
        records,
        discarded,
        subjects_per_group,
    })
}

/// Maps scores into `[0, 1]` according to `mode`.
pub fn normalize_scores(records: &[ScoreRecord], mode: Normalization) -> Result<Vec<ScoreRecord>> {
    match mode {
        Normalization::None => {
            for r in records {
                check_score(r.score())?;
            }
            Ok(records.to_vec())
        }
        Normalization::OneMinus => records
            .iter()
            .map(|r| Ok(r.with_score(1.0 - check_score(r.score())?)))
            .collect(),
        Normalization::MinMax => {
            let (min, max) = records.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r.score()), hi.max(r.score()))
            });
            if records.is_empty() {
                return Ok(Vec::new());
            }
            if max <= min {
                return Err(FairnessError::ConstantScores { value: min });
            }
            let span = max - min;
            Ok(records
                .iter()
                .map(|r| r.with_score(((r.score() - min) / span).clamp(0.0, 1.0)))
                .collect())
        }
    }
}

/// Comment prefix marking files written by the synthetic generator.
pub const SYNTHETIC_MARKER: &str = "# synthetic:";

/// Serializes a dataset in the labeled-score format, genuine scores of each
/// group first. Scores use the shortest representation that parses back to
/// the same `f64`.
pub fn write_labeled_csv(ds: &crate::types::Dataset, comment: Option<&str>) -> String {
    use std::fmt::Write as _;
    let mut out = String::with_capacity(ds.n() * 24);
    if let Some(c) = comment {
        for line in c.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    out.push_str(&LABELED_HEADER.join(","));
    out.push('\n');
    for g in ds.groups() {
        for (kind, scores) in [(ScoreKind::Genuine, &g.genuine), (ScoreKind::Imposter, &g.imposter)] {
            for s in scores {
                let _ = writeln!(out, "{},{},{}", g.demographic, kind, s);
            }
        }
    }
    out
}

/// Returns the description following a leading `# synthetic:` comment, if any.
pub fn synthetic_source(text: &str) -> Option<String> {
    text.lines()
        .take_while(|l| l.trim_start().starts_with('#') || l.trim().is_empty())
        .find_map(|l| l.trim().strip_prefix(SYNTHETIC_MARKER))
        .map(|rest| rest.trim().to_owned())
}
