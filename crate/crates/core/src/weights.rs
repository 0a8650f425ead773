//! Sample-size fusion weights.
//!
//! Each group's raw weight is a Gaussian bump in its relative size
//! `N_i / N`, centred on `1/(2K)`, lifted by a constant `c`:
//!
//! ```text
//! ŵ_i = c + exp(-(N_i/N - 1/(2K))² / (2σ²)),   σ = 1/(2K),  c = 1
//! w_i = ŵ_i / Σ_j ŵ_j
//! ```
//!
//! The peak sits at half the balanced share, so a balanced dataset does
//! not receive the maximal raw weight. Tiny groups are not blown up the
//! way inverse-size weighting would, and dominant groups are damped.

use serde::{Deserialize, Serialize};

use crate::error::{FairnessError, Result};

pub const DEFAULT_C: f64 = 1.0;

/// Shape parameters of the weighing function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub c: f64,
    /// `None` means the default `1/(2K)`.
    pub sigma: Option<f64>,
}

impl Default for WeightParams {
    fn default() -> Self {
        Self {
            c: DEFAULT_C,
            sigma: None,
        }
    }
}

impl WeightParams {
    pub fn is_standard(&self) -> bool {
        self.c == DEFAULT_C && self.sigma.is_none()
    }

    pub fn sigma_for(&self, k: usize) -> f64 {
        self.sigma.unwrap_or(1.0 / (2.0 * k as f64))
    }

    fn validate(&self) -> Result<()> {
        if !self.c.is_finite() || self.c < 0.0 {
            return Err(FairnessError::InvalidWeightParam(format!(
                "c must be finite and non-negative, got {}",
                self.c
            )));
        }
        if let Some(s) = self.sigma {
            if !s.is_finite() || s <= 0.0 {
                return Err(FairnessError::InvalidWeightParam(format!(
                    "sigma must be finite and positive, got {s}"
                )));
            }
        }
        Ok(())
    }
}

/// The Gaussian part of the raw weight, in `(0, 1]`.
pub fn bump(ratio: f64, k: usize, sigma: f64) -> f64 {
    let centre = 1.0 / (2.0 * k as f64);
    let d = ratio - centre;
    (-(d * d) / (2.0 * sigma * sigma)).exp()
}

/// Unnormalized weight for a group occupying `ratio` of the data.
///
/// Far from the peak the bump drops below `f64` resolution next to `c`,
/// so the result can equal `c` exactly even though the bump is positive.
pub fn raw_weight(ratio: f64, k: usize, c: f64, sigma: f64) -> f64 {
    c + bump(ratio, k, sigma)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupWeight {
    pub demographic: String,
    pub size: u64,
    pub raw: f64,
    pub normalized: f64,
}

/// Per-group raw and normalized fusion weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionWeights {
    pub groups: Vec<GroupWeight>,
    pub c: f64,
    pub sigma: f64,
    pub k: usize,
    pub n: u64,
    /// False when `c` or `σ` were overridden.
    pub standard: bool,
}

impl FusionWeights {
    pub fn normalized(&self) -> Vec<f64> {
        self.groups.iter().map(|g| g.normalized).collect()
    }

    pub fn raw(&self) -> Vec<f64> {
        self.groups.iter().map(|g| g.raw).collect()
    }
}

/// Fusion weights with default parameters; groups are labeled `1..=K`.
pub fn compute_fusion_weights(sizes: &[u64]) -> Result<FusionWeights> {
    let labels: Vec<String> = (1..=sizes.len()).map(|i| i.to_string()).collect();
    labeled_fusion_weights(&labels, sizes, &WeightParams::default())
}

/// Fusion weights for named groups.
pub fn labeled_fusion_weights<S: AsRef<str>>(
    labels: &[S],
    sizes: &[u64],
    params: &WeightParams,
) -> Result<FusionWeights> {
    if labels.len() != sizes.len() {
        return Err(FairnessError::InvalidArgument(format!(
            "{} labels for {} sizes",
            labels.len(),
            sizes.len()
        )));
    }
    let k = sizes.len();
    if k < 2 {
        return Err(FairnessError::TooFewGroups { found: k });
    }
    if let Some(index) = sizes.iter().position(|&s| s == 0) {
        return Err(FairnessError::ZeroGroupSize { index });
    }
    params.validate()?;
    let n: u64 = sizes.iter().sum();
    let sigma = params.sigma_for(k);
    let raw: Vec<f64> = sizes
        .iter()
        .map(|&s| raw_weight(s as f64 / n as f64, k, params.c, sigma))
        .collect();
    let total: f64 = raw.iter().sum();
    if raw.iter().any(|&w| w <= 0.0) {
        return Err(FairnessError::InvalidWeightParam(
            "a raw weight underflowed to zero; increase c or sigma".into(),
        ));
    }
    let groups = labels
        .iter()
        .zip(sizes)
        .zip(&raw)
        .map(|((label, &size), &w)| GroupWeight {
            demographic: label.as_ref().to_owned(),
            size,
            raw: w,
            normalized: w / total,
        })
        .collect();
    Ok(FusionWeights {
        groups,
        c: params.c,
        sigma,
        k,
        n,
        standard: params.is_standard(),
    })
}

/// Samples the raw weight at `ratio = j / resolution`, `j = 1..=resolution`.
pub fn weight_curve(k: usize, resolution: usize) -> Result<Vec<(f64, f64)>> {
    weight_curve_with(k, resolution, &WeightParams::default())
}

pub fn weight_curve_with(k: usize, resolution: usize, params: &WeightParams) -> Result<Vec<(f64, f64)>> {
    if k < 2 {
        return Err(FairnessError::TooFewGroups { found: k });
    }
    if resolution < 2 {
        return Err(FairnessError::InvalidArgument(format!(
            "curve resolution must be ≥ 2, got {resolution}"
        )));
    }
    params.validate()?;
    let sigma = params.sigma_for(k);
    Ok((1..=resolution)
        .map(|j| {
            let ratio = j as f64 / resolution as f64;
            (ratio, raw_weight(ratio, k, params.c, sigma))
        })
        .collect())
}
