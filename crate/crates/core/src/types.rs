//! Domain types shared across the crate.
//!
//! Everything here is immutable once built. [`Dataset`] is the validated
//! entry point for evaluation: at least two demographic groups with
//! pairwise-distinct labels, each holding at least two genuine and two
//! imposter scores in `[0, 1]`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FairnessError, Result};

/// Whether a comparison was between samples of the same identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreKind {
    Genuine,
    Imposter,
}

impl ScoreKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoreKind::Genuine => "genuine",
            ScoreKind::Imposter => "imposter",
        }
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScoreKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("genuine") {
            Ok(ScoreKind::Genuine)
        } else if s.eq_ignore_ascii_case("imposter") {
            Ok(ScoreKind::Imposter)
        } else {
            Err(format!("unknown kind '{s}' (expected genuine or imposter)"))
        }
    }
}

pub(crate) fn check_score(score: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&score) {
        Ok(score)
    } else {
        Err(FairnessError::ScoreOutOfRange { score })
    }
}

/// One match score tagged with the demographic group it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    demographic: String,
    kind: ScoreKind,
    score: f64,
}

impl ScoreRecord {
    /// Builds a record, rejecting empty labels and scores outside `[0, 1]`.
    pub fn new(demographic: impl Into<String>, kind: ScoreKind, score: f64) -> Result<Self> {
        let record = Self::unchecked(demographic, kind, score);
        if record.demographic.is_empty() {
            return Err(FairnessError::EmptyLabel);
        }
        check_score(score)?;
        Ok(record)
    }

    /// Builds a record whose score may still need normalization. The label
    /// must be non-empty and the score finite; the `[0, 1]` check happens in
    /// [`validate_dataset`] or [`crate::normalize_scores`].
    pub fn raw(demographic: impl Into<String>, kind: ScoreKind, score: f64) -> Result<Self> {
        let record = Self::unchecked(demographic, kind, score);
        if record.demographic.is_empty() {
            return Err(FairnessError::EmptyLabel);
        }
        if !score.is_finite() {
            return Err(FairnessError::ScoreOutOfRange { score });
        }
        Ok(record)
    }

    /// Range checks are deferred to [`validate_dataset`] or score
    /// normalization; used by parsers where raw inputs may be unnormalized.
    pub(crate) fn unchecked(demographic: impl Into<String>, kind: ScoreKind, score: f64) -> Self {
        Self {
            demographic: demographic.into(),
            kind,
            score,
        }
    }

    pub fn demographic(&self) -> &str {
        &self.demographic
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub(crate) fn with_score(&self, score: f64) -> Self {
        Self {
            demographic: self.demographic.clone(),
            kind: self.kind,
            score,
        }
    }
}

/// All genuine and imposter scores of a single demographic group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupScores {
    pub demographic: String,
    pub genuine: Vec<f64>,
    pub imposter: Vec<f64>,
}

impl GroupScores {
    pub fn new(demographic: impl Into<String>, genuine: Vec<f64>, imposter: Vec<f64>) -> Self {
        Self {
            demographic: demographic.into(),
            genuine,
            imposter,
        }
    }

    /// Number of score records attributed to the group.
    pub fn len(&self) -> usize {
        self.genuine.len() + self.imposter.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.demographic.is_empty() {
            return Err(FairnessError::EmptyLabel);
        }
        if self.genuine.len() < 2 || self.imposter.len() < 2 {
            return Err(FairnessError::InsufficientScores {
                group: self.demographic.clone(),
                genuine: self.genuine.len(),
                imposter: self.imposter.len(),
            });
        }
        for &s in self.genuine.iter().chain(&self.imposter) {
            check_score(s)?;
        }
        Ok(())
    }
}

/// Summary statistics for one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub demographic: String,
    pub mu_genuine: f64,
    pub mu_imposter: f64,
    pub sigma_genuine: f64,
    pub sigma_imposter: f64,
    /// Normalized histogram of the combined genuine + imposter scores.
    pub histogram: Vec<f64>,
    pub n_genuine: usize,
    pub n_imposter: usize,
}

/// How the group size `N_i` feeding the fusion weights is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RatioBasis {
    /// Genuine plus imposter score records.
    #[default]
    Records,
    /// Distinct subjects; only known when scores came from labeled pairs.
    Subjects,
}

impl fmt::Display for RatioBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RatioBasis::Records => "records",
            RatioBasis::Subjects => "subjects",
        })
    }
}

/// A validated collection of demographic groups, sorted by label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    groups: Vec<GroupScores>,
    subject_counts: Option<Vec<usize>>,
}

impl Dataset {
    /// Validates a set of groups and orders them lexicographically by label.
    pub fn from_groups(mut groups: Vec<GroupScores>) -> Result<Self> {
        if groups.len() < 2 {
            return Err(FairnessError::TooFewGroups {
                found: groups.len(),
            });
        }
        groups.sort_by(|a, b| a.demographic.cmp(&b.demographic));
        for pair in groups.windows(2) {
            if pair[0].demographic == pair[1].demographic {
                return Err(FairnessError::DuplicateGroup(pair[0].demographic.clone()));
            }
        }
        for g in &groups {
            g.validate()?;
        }
        Ok(Self {
            groups,
            subject_counts: None,
        })
    }

    /// Attaches distinct-subject counts per group, keyed by label.
    /// Every group must have a positive count.
    pub fn with_subject_counts(mut self, counts: &BTreeMap<String, usize>) -> Result<Self> {
        let mut aligned = Vec::with_capacity(self.groups.len());
        for (i, g) in self.groups.iter().enumerate() {
            match counts.get(&g.demographic) {
                Some(&c) if c > 0 => aligned.push(c),
                _ => return Err(FairnessError::ZeroGroupSize { index: i }),
            }
        }
        self.subject_counts = Some(aligned);
        Ok(self)
    }

    pub fn groups(&self) -> &[GroupScores] {
        &self.groups
    }

    /// Number of groups, `K`.
    pub fn k(&self) -> usize {
        self.groups.len()
    }

    /// Total number of score records, `N`.
    pub fn n(&self) -> usize {
        self.groups.iter().map(GroupScores::len).sum()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.groups.iter().map(|g| g.demographic.as_str()).collect()
    }

    pub fn subject_counts(&self) -> Option<&[usize]> {
        self.subject_counts.as_deref()
    }

    /// Group sizes `N_i` under the chosen basis.
    pub fn group_sizes(&self, basis: RatioBasis) -> Result<Vec<usize>> {
        match basis {
            RatioBasis::Records => Ok(self.groups.iter().map(GroupScores::len).collect()),
            RatioBasis::Subjects => self
                .subject_counts
                .clone()
                .ok_or(FairnessError::SubjectCountsUnavailable),
        }
    }
}

/// Groups score records by demographic label into a validated [`Dataset`].
///
/// Within a group, scores keep their input order.
pub fn validate_dataset(records: &[ScoreRecord]) -> Result<Dataset> {
    if records.is_empty() {
        return Err(FairnessError::EmptyInput);
    }
    let mut by_label: BTreeMap<&str, GroupScores> = BTreeMap::new();
    for r in records {
        if r.demographic.is_empty() {
            return Err(FairnessError::EmptyLabel);
        }
        check_score(r.score)?;
        let entry = by_label
            .entry(r.demographic.as_str())
            .or_insert_with(|| GroupScores::new(r.demographic.clone(), Vec::new(), Vec::new()));
        match r.kind {
            ScoreKind::Genuine => entry.genuine.push(r.score),
            ScoreKind::Imposter => entry.imposter.push(r.score),
        }
    }
    Dataset::from_groups(by_label.into_values().collect())
}
