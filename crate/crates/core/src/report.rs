//! End-to-end evaluation and report serialization.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{FairnessError, Result};
use crate::ingest::Normalization;
use crate::measures::{compute_indices, dataset_stats, Indices};
use crate::stats::{Histogram, DEFAULT_BINS};
use crate::types::{Dataset, GroupStats, RatioBasis};
use crate::weights::{labeled_fusion_weights, FusionWeights, WeightParams};

/// Groups with a smaller share of `N` than this get a warning.
pub const TINY_GROUP_RATIO: f64 = 0.01;

pub const PAIRING_POLICY: &str = "intra-demographic";

/// Where the evaluated scores came from. Echoed into the report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// `labeled`, `pairs`, or `in-memory`.
    pub input_format: String,
    pub normalization: Normalization,
    /// Inter-demographic pairs dropped during pair classification.
    pub discarded_pairs: Option<usize>,
    /// Set when the data was produced by the synthetic generator.
    pub synthetic_source: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub bins: usize,
    pub weights: WeightParams,
    pub ratio_basis: RatioBasis,
    pub provenance: Provenance,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            weights: WeightParams::default(),
            ratio_basis: RatioBasis::Records,
            provenance: Provenance {
                input_format: "in-memory".into(),
                ..Provenance::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    #[serde(flatten)]
    pub stats: GroupStats,
    /// `|μ_G − μ_I|`
    pub separation: f64,
    /// `σ_G + σ_I`
    pub compactness: f64,
    /// KL divergence from the mean histogram, in bits.
    pub divergence_bits: f64,
    /// Group size used for the fusion weights.
    pub size: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub bins: usize,
    pub k: usize,
    pub n_records: usize,
    pub ratio_basis: RatioBasis,
    pub weight_c: f64,
    pub weight_sigma: f64,
    pub standard_weights: bool,
    pub normalization: Normalization,
    pub input_format: String,
    pub pairing_policy: String,
    pub discarded_pairs: Option<usize>,
    pub synthetic_source: Option<String>,
    /// SHA-256 over the grouped scores.
    pub input_digest: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningCode {
    DiscardedPairs,
    ClampedNegative,
    TinyGroup,
    NonstandardWeights,
    SyntheticData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Warning {
    pub code: WarningCode,
    pub message: String,
}

/// Full evaluation result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub per_group_stats: Vec<GroupReport>,
    pub fusion_weights: FusionWeights,
    pub indices: Indices,
    pub config: ReportConfig,
    pub warnings: Vec<Warning>,
}

/// Digest of the dataset contents: labels and score bit patterns in order.
pub fn dataset_digest(ds: &Dataset) -> String {
    let mut h = Sha256::new();
    for g in ds.groups() {
        h.update(g.demographic.as_bytes());
        h.update([0u8]);
        for scores in [&g.genuine, &g.imposter] {
            h.update((scores.len() as u64).to_le_bytes());
            for s in scores {
                h.update(s.to_bits().to_le_bytes());
            }
        }
    }
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Computes per-group statistics, fusion weights and all nine indices.
pub fn evaluate(ds: &Dataset, config: &EvalConfig) -> Result<FairnessReport> {
    if config.bins < 2 {
        return Err(FairnessError::InvalidBinCount(config.bins));
    }
    let sizes: Vec<u64> = ds
        .group_sizes(config.ratio_basis)?
        .into_iter()
        .map(|s| s as u64)
        .collect();
    let fusion_weights = labeled_fusion_weights(&ds.labels(), &sizes, &config.weights)?;
    let stats = dataset_stats(ds, config.bins)?;
    let (indices, inter) = compute_indices(stats, &fusion_weights.normalized())?;

    let per_group_stats: Vec<GroupReport> = inter
        .stats
        .into_iter()
        .enumerate()
        .map(|(i, stats)| GroupReport {
            stats,
            separation: inter.separation.values[i],
            compactness: inter.compactness.values[i],
            divergence_bits: inter.divergence.divergences[i],
            size: sizes[i],
        })
        .collect();

    let mut warnings = Vec::new();
    let prov = &config.provenance;
    if let Some(d) = prov.discarded_pairs.filter(|&d| d > 0) {
        warnings.push(Warning {
            code: WarningCode::DiscardedPairs,
            message: format!("{d} inter-demographic pair(s) were discarded"),
        });
    }
    for (kind, variant, value) in indices.iter() {
        if value.was_clamped() {
            warnings.push(Warning {
                code: WarningCode::ClampedNegative,
                message: format!(
                    "{}_{} raw value {} clamped to 0",
                    kind.as_str(),
                    variant.as_str(),
                    value.raw
                ),
            });
        }
    }
    let n = fusion_weights.n as f64;
    for g in &fusion_weights.groups {
        let ratio = g.size as f64 / n;
        if ratio < TINY_GROUP_RATIO {
            warnings.push(Warning {
                code: WarningCode::TinyGroup,
                message: format!(
                    "group '{}' holds {:.4}% of the data",
                    g.demographic,
                    ratio * 100.0
                ),
            });
        }
    }
    if !fusion_weights.standard {
        warnings.push(Warning {
            code: WarningCode::NonstandardWeights,
            message: format!(
                "fusion weight parameters overridden (c = {}, sigma = {})",
                fusion_weights.c, fusion_weights.sigma
            ),
        });
    }
    if let Some(src) = &prov.synthetic_source {
        warnings.push(Warning {
            code: WarningCode::SyntheticData,
            message: format!("scores are synthetic ({src}), not from a real matcher"),
        });
    }

    let config = ReportConfig {
        bins: config.bins,
        k: ds.k(),
        n_records: ds.n(),
        ratio_basis: config.ratio_basis,
        weight_c: fusion_weights.c,
        weight_sigma: fusion_weights.sigma,
        standard_weights: fusion_weights.standard,
        normalization: prov.normalization,
        input_format: prov.input_format.clone(),
        pairing_policy: PAIRING_POLICY.into(),
        discarded_pairs: prov.discarded_pairs,
        synthetic_source: prov.synthetic_source.clone(),
        input_digest: dataset_digest(ds),
    };

    Ok(FairnessReport {
        per_group_stats,
        fusion_weights,
        indices,
        config,
        warnings,
    })
}

impl FairnessReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per index variant; values at four decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,variant,raw,clamped\n");
        for (kind, variant, v) in self.indices.iter() {
            let _ = writeln!(
                out,
                "{},{},{:.4},{:.4}",
                kind.as_str(),
                variant.as_str(),
                v.raw,
                v.clamped
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(
            out,
            "groups: {}  records: {}  bins: {}  ratio basis: {}",
            c.k, c.n_records, c.bins, c.ratio_basis
        );
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<12} {:>8} {:>8} {:>8} {:>8} {:>8} {:>9}",
            "group", "mu_G", "mu_I", "sigma_G", "sigma_I", "weight", "KL(bits)"
        );
        for (g, w) in self.per_group_stats.iter().zip(&self.fusion_weights.groups) {
            let s = &g.stats;
            let _ = writeln!(
                out,
                "{:<12} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>9.4}",
                s.demographic,
                s.mu_genuine,
                s.mu_imposter,
                s.sigma_genuine,
                s.sigma_imposter,
                w.normalized,
                g.divergence_bits
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<6} {:>8} {:>8} {:>8}", "", "normal", "extremal", "weighted");
        for (name, v) in [
            ("SFI", &self.indices.sfi),
            ("CFI", &self.indices.cfi),
            ("DFI", &self.indices.dfi),
        ] {
            let _ = writeln!(
                out,
                "{:<6} {:>8.4} {:>8.4} {:>8.4}",
                name, v.normal.clamped, v.extremal.clamped, v.weighted.clamped
            );
        }
        if !self.warnings.is_empty() {
            let _ = writeln!(out);
            for w in &self.warnings {
                let _ = writeln!(out, "warning: {}", w.message);
            }
        }
        out
    }
}

/// Plot-ready per-group histogram CSV:
/// `group,bin_index,bin_lower,bin_upper,mass`.
pub fn histogram_csv(ds: &Dataset, bins: usize) -> Result<String> {
    let mut out = String::from("group,bin_index,bin_lower,bin_upper,mass\n");
    for g in ds.groups() {
        let h = Histogram::from_scores(g.genuine.iter().chain(&g.imposter), bins)?;
        for (i, m) in h.masses().iter().enumerate() {
            let (lo, hi) = Histogram::edges(bins, i);
            let _ = writeln!(out, "{},{i},{lo},{hi},{m}", g.demographic);
        }
    }
    Ok(out)
}
