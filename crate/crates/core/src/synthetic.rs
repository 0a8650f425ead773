//! Canonical synthetic score datasets: three demographic groups whose
//! genuine and imposter scores are drawn from normal distributions clipped
//! to `[0, 1]`.
//!
//! * `fair`: all groups share one well-separated distribution pair.
//! * `unfair`: group `d3` has a smaller genuine/imposter gap and wider spread.
//! * `highly_unfair`: group `d3`'s genuine and imposter modes nearly overlap.
//!
//! Group sizes are either balanced (1000 each) or imbalanced (100, 1000,
//! 2000). A size applies to both the genuine and the imposter set.
//!
//! The RNG is ChaCha8 seeded from a `u64`, so output is identical across
//! platforms for a given seed.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{FairnessError, Result};
use crate::types::{Dataset, GroupScores};

pub const BALANCED_SIZES: [usize; 3] = [1000, 1000, 1000];
pub const IMBALANCED_SIZES: [usize; 3] = [100, 1000, 2000];

/// Distribution parameters and sample counts of one synthetic group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDistributionSpec {
    pub demographic: String,
    pub mu_genuine: f64,
    pub sigma_genuine: f64,
    pub mu_imposter: f64,
    pub sigma_imposter: f64,
    pub n_genuine: usize,
    pub n_imposter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Fair,
    Unfair,
    HighlyUnfair,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Fair, Preset::Unfair, Preset::HighlyUnfair];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Fair => "fair",
            Preset::Unfair => "unfair",
            Preset::HighlyUnfair => "highly_unfair",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = FairnessError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| FairnessError::InvalidPreset(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeProfile {
    #[default]
    Balanced,
    Imbalanced,
}

impl SizeProfile {
    pub fn sizes(self) -> [usize; 3] {
        match self {
            SizeProfile::Balanced => BALANCED_SIZES,
            SizeProfile::Imbalanced => IMBALANCED_SIZES,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SizeProfile::Balanced => "balanced",
            SizeProfile::Imbalanced => "imbalanced",
        }
    }
}

// (mu_G, sigma_G, mu_I, sigma_I)
type Params = (f64, f64, f64, f64);

const REFERENCE: Params = (0.72, 0.05, 0.28, 0.05);
const UNFAIR_D3: Params = (0.64, 0.07, 0.32, 0.07);
const HIGHLY_UNFAIR_D3: Params = (0.55, 0.11, 0.42, 0.11);

/// A named scenario: one distribution spec per group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioPreset {
    pub name: String,
    pub groups: Vec<GroupDistributionSpec>,
}

impl ScenarioPreset {
    pub fn canonical(preset: Preset, profile: SizeProfile) -> Self {
        let odd = match preset {
            Preset::Fair => REFERENCE,
            Preset::Unfair => UNFAIR_D3,
            Preset::HighlyUnfair => HIGHLY_UNFAIR_D3,
        };
        let groups = profile
            .sizes()
            .into_iter()
            .enumerate()
            .map(|(i, n)| {
                let (mu_g, sd_g, mu_i, sd_i) = if i == 2 { odd } else { REFERENCE };
                GroupDistributionSpec {
                    demographic: format!("d{}", i + 1),
                    mu_genuine: mu_g,
                    sigma_genuine: sd_g,
                    mu_imposter: mu_i,
                    sigma_imposter: sd_i,
                    n_genuine: n,
                    n_imposter: n,
                }
            })
            .collect();
        Self {
            name: format!("{}/{}", preset.as_str(), profile.as_str()),
            groups,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.groups.len() < 2 {
            return Err(FairnessError::InvalidPreset(format!(
                "{} needs at least 2 groups",
                self.name
            )));
        }
        for g in &self.groups {
            let ok_mu = |m: f64| m.is_finite();
            let ok_sd = |s: f64| s.is_finite() && s >= 0.0;
            if !(ok_mu(g.mu_genuine)
                && ok_mu(g.mu_imposter)
                && ok_sd(g.sigma_genuine)
                && ok_sd(g.sigma_imposter))
            {
                return Err(FairnessError::InvalidPreset(format!(
                    "group '{}' has invalid distribution parameters",
                    g.demographic
                )));
            }
            if g.n_genuine < 2 || g.n_imposter < 2 {
                return Err(FairnessError::InvalidPreset(format!(
                    "group '{}' needs at least 2 genuine and 2 imposter scores",
                    g.demographic
                )));
            }
        }
        Ok(())
    }
}

fn draw(rng: &mut ChaCha8Rng, mu: f64, sigma: f64, n: usize) -> Vec<f64> {
    let dist = Normal::new(mu, sigma).expect("validated parameters");
    (0..n)
        .map(|_| dist.sample(rng).clamp(0.0, 1.0))
        .collect()
}

/// Draws a dataset for `preset`. Identical seeds give identical datasets.
pub fn generate(preset: &ScenarioPreset, seed: u64) -> Result<Dataset> {
    preset.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = preset
        .groups
        .iter()
        .map(|g| {
            let genuine = draw(&mut rng, g.mu_genuine, g.sigma_genuine, g.n_genuine);
            let imposter = draw(&mut rng, g.mu_imposter, g.sigma_imposter, g.n_imposter);
            GroupScores::new(g.demographic.clone(), genuine, imposter)
        })
        .collect();
    Dataset::from_groups(groups)
}
