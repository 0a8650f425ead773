//! The nine fairness indices.
//!
//! Each index compares a per-group quantity against its unweighted group
//! mean and aggregates the deviations three ways: mean (normal), maximum
//! (extremal), or fusion-weighted sum (weighted).
//!
//! | index | per-group quantity                         |
//! |-------|--------------------------------------------|
//! | SFI   | separation `|μ_G − μ_I|`                    |
//! | CFI   | compactness `σ_G + σ_I`                     |
//! | DFI   | `D_KL(h_i ‖ mean h)` of combined histograms |

use serde::{Deserialize, Serialize};

use crate::error::{FairnessError, Result};
use crate::stats::{group_stats, kl_divergence, mean_histogram, Histogram};
use crate::types::{Dataset, GroupStats};

/// Mean taken as an offset from the first value, so identical values
/// reproduce themselves exactly.
fn mean(xs: &[f64]) -> f64 {
    let first = xs[0];
    first + xs.iter().map(|x| x - first).sum::<f64>() / xs.len() as f64
}

fn abs_deviations(values: &[f64], centre: f64) -> impl Iterator<Item = f64> + '_ {
    values.iter().map(move |v| (v - centre).abs())
}

fn check_weights(weights: &[f64], k: usize) -> Result<()> {
    if weights.len() != k {
        return Err(FairnessError::InvalidArgument(format!(
            "{} weights for {k} groups",
            weights.len()
        )));
    }
    Ok(())
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        Err(FairnessError::TooFewGroups { found: k })
    } else {
        Ok(())
    }
}

/// Per-group genuine/imposter mean gap and its group mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationVector {
    pub values: Vec<f64>,
    pub mean: f64,
}

impl SeparationVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_k(values.len())?;
        let mean = mean(&values);
        Ok(Self { values, mean })
    }

    pub fn from_stats(stats: &[GroupStats]) -> Result<Self> {
        Self::new(
            stats
                .iter()
                .map(|s| (s.mu_genuine - s.mu_imposter).abs())
                .collect(),
        )
    }
}

/// Per-group combined spread `σ_G + σ_I` and its group mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactnessVector {
    pub values: Vec<f64>,
    pub mean: f64,
}

impl CompactnessVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_k(values.len())?;
        let mean = mean(&values);
        Ok(Self { values, mean })
    }

    pub fn from_stats(stats: &[GroupStats]) -> Result<Self> {
        Self::new(
            stats
                .iter()
                .map(|s| s.sigma_genuine + s.sigma_imposter)
                .collect(),
        )
    }
}

/// KL divergence (bits) of each group histogram from the mean histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceVector {
    pub divergences: Vec<f64>,
    pub mean_histogram: Histogram,
}

impl DivergenceVector {
    pub fn from_histograms(hs: &[Histogram]) -> Result<Self> {
        check_k(hs.len())?;
        let mean_histogram = mean_histogram(hs)?;
        // every group's support is inside the mean's, so KL is always defined
        let divergences = hs
            .iter()
            .map(|h| kl_divergence(h, &mean_histogram))
            .collect::<Result<_>>()?;
        Ok(Self {
            divergences,
            mean_histogram,
        })
    }

    pub fn k(&self) -> usize {
        self.divergences.len()
    }
}

fn normal(values: &[f64], centre: f64) -> f64 {
    let k = values.len() as f64;
    1.0 - (2.0 / k) * abs_deviations(values, centre).sum::<f64>()
}

fn extremal(values: &[f64], centre: f64) -> f64 {
    1.0 - 2.0 * abs_deviations(values, centre).fold(0.0, f64::max)
}

fn weighted(values: &[f64], centre: f64, weights: &[f64]) -> Result<f64> {
    check_weights(weights, values.len())?;
    Ok(1.0
        - 2.0
            * abs_deviations(values, centre)
                .zip(weights)
                .map(|(d, w)| w * d)
                .sum::<f64>())
}

pub fn sfi_normal(sv: &SeparationVector) -> f64 {
    normal(&sv.values, sv.mean)
}

/// May be negative for three or more groups.
pub fn sfi_extremal(sv: &SeparationVector) -> f64 {
    extremal(&sv.values, sv.mean)
}

/// `weights` are normalized fusion weights in group order.
pub fn sfi_weighted(sv: &SeparationVector, weights: &[f64]) -> Result<f64> {
    weighted(&sv.values, sv.mean, weights)
}

pub fn cfi_normal(cv: &CompactnessVector) -> f64 {
    normal(&cv.values, cv.mean)
}

pub fn cfi_extremal(cv: &CompactnessVector) -> f64 {
    extremal(&cv.values, cv.mean)
}

pub fn cfi_weighted(cv: &CompactnessVector, weights: &[f64]) -> Result<f64> {
    weighted(&cv.values, cv.mean, weights)
}

/// Each divergence as a fraction of its `log₂K` ceiling. The ceiling holds
/// exactly in real arithmetic; the `min` absorbs rounding at the boundary.
fn divergence_ratios(dv: &DivergenceVector) -> impl Iterator<Item = f64> + '_ {
    let ceiling = (dv.k() as f64).log2();
    dv.divergences.iter().map(move |d| (d / ceiling).min(1.0))
}

pub fn dfi_normal(dv: &DivergenceVector) -> f64 {
    1.0 - divergence_ratios(dv).sum::<f64>() / dv.k() as f64
}

pub fn dfi_extremal(dv: &DivergenceVector) -> f64 {
    1.0 - divergence_ratios(dv).fold(0.0, f64::max)
}

/// The mean histogram stays unweighted; only the outer coefficients change.
pub fn dfi_weighted(dv: &DivergenceVector, weights: &[f64]) -> Result<f64> {
    check_weights(weights, dv.k())?;
    // dividing by Σw (= 1 up to rounding) keeps the result inside [0, 1]
    let total: f64 = weights.iter().sum();
    let s: f64 = divergence_ratios(dv).zip(weights).map(|(r, w)| w * r).sum();
    Ok(1.0 - s / total)
}

/// Raw index value and its headline form `max(raw, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexValue {
    pub raw: f64,
    pub clamped: f64,
}

impl IndexValue {
    pub fn new(raw: f64) -> Self {
        Self {
            raw,
            clamped: raw.max(0.0),
        }
    }

    pub fn was_clamped(&self) -> bool {
        self.raw < 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexVariants {
    pub normal: IndexValue,
    pub extremal: IndexValue,
    pub weighted: IndexValue,
}

impl IndexVariants {
    pub fn get(&self, variant: Variant) -> IndexValue {
        match variant {
            Variant::Normal => self.normal,
            Variant::Extremal => self.extremal,
            Variant::Weighted => self.weighted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexKind {
    Sfi,
    Cfi,
    Dfi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Normal,
    Extremal,
    Weighted,
}

impl IndexKind {
    pub const ALL: [IndexKind; 3] = [IndexKind::Sfi, IndexKind::Cfi, IndexKind::Dfi];

    pub fn as_str(self) -> &'static str {
        match self {
            IndexKind::Sfi => "sfi",
            IndexKind::Cfi => "cfi",
            IndexKind::Dfi => "dfi",
        }
    }
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Normal, Variant::Extremal, Variant::Weighted];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Normal => "normal",
            Variant::Extremal => "extremal",
            Variant::Weighted => "weighted",
        }
    }
}

/// All nine index values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Indices {
    pub sfi: IndexVariants,
    pub cfi: IndexVariants,
    pub dfi: IndexVariants,
}

impl Indices {
    pub fn get(&self, kind: IndexKind, variant: Variant) -> IndexValue {
        match kind {
            IndexKind::Sfi => self.sfi.get(variant),
            IndexKind::Cfi => self.cfi.get(variant),
            IndexKind::Dfi => self.dfi.get(variant),
        }
    }

    /// `(kind, variant, value)` in a fixed order.
    pub fn iter(&self) -> impl Iterator<Item = (IndexKind, Variant, IndexValue)> + '_ {
        IndexKind::ALL.into_iter().flat_map(move |k| {
            Variant::ALL
                .into_iter()
                .map(move |v| (k, v, self.get(k, v)))
        })
    }
}

/// Intermediate vectors the indices were computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct Intermediates {
    pub stats: Vec<GroupStats>,
    pub separation: SeparationVector,
    pub compactness: CompactnessVector,
    pub divergence: DivergenceVector,
}

/// Per-group statistics for every group of the dataset, in dataset order.
pub fn dataset_stats(ds: &Dataset, bins: usize) -> Result<Vec<GroupStats>> {
    ds.groups().iter().map(|g| group_stats(g, bins)).collect()
}

/// Computes all nine indices from per-group statistics and normalized weights.
pub fn compute_indices(stats: Vec<GroupStats>, weights: &[f64]) -> Result<(Indices, Intermediates)> {
    let separation = SeparationVector::from_stats(&stats)?;
    let compactness = CompactnessVector::from_stats(&stats)?;
    let histograms = stats
        .iter()
        .map(|s| Histogram::from_masses(s.histogram.clone()))
        .collect::<Result<Vec<_>>>()?;
    let divergence = DivergenceVector::from_histograms(&histograms)?;

    let indices = Indices {
        sfi: IndexVariants {
            normal: IndexValue::new(sfi_normal(&separation)),
            extremal: IndexValue::new(sfi_extremal(&separation)),
            weighted: IndexValue::new(sfi_weighted(&separation, weights)?),
        },
        cfi: IndexVariants {
            normal: IndexValue::new(cfi_normal(&compactness)),
            extremal: IndexValue::new(cfi_extremal(&compactness)),
            weighted: IndexValue::new(cfi_weighted(&compactness, weights)?),
        },
        dfi: IndexVariants {
            normal: IndexValue::new(dfi_normal(&divergence)),
            extremal: IndexValue::new(dfi_extremal(&divergence)),
            weighted: IndexValue::new(dfi_weighted(&divergence, weights)?),
        },
    };
    Ok((
        indices,
        Intermediates {
            stats,
            separation,
            compactness,
            divergence,
        },
    ))
}
