//! Demographic fairness evaluation for biometric verification systems.
//!
//! Given genuine and imposter match scores labeled by demographic group,
//! this crate computes three fairness indices, each in a normal,
//! extremal and sample-size-weighted variant:
//!
//! * **SFI**: how evenly the genuine/imposter mean gap is spread across groups
//! * **CFI**: how evenly the combined score spread is spread across groups
//! * **DFI**: how far each group's score histogram is from the mean histogram
//!
//! A value of 1 means every group is treated alike; lower is less fair.
//!
//! ```
//! use bvfair::{evaluate, validate_dataset, EvalConfig, ScoreKind, ScoreRecord};
//!
//! let mut records = Vec::new();
//! for group in ["a", "b"] {
//!     for s in [0.8, 0.9] {
//!         records.push(ScoreRecord::new(group, ScoreKind::Genuine, s).unwrap());
//!     }
//!     for s in [0.1, 0.2] {
//!         records.push(ScoreRecord::new(group, ScoreKind::Imposter, s).unwrap());
//!     }
//! }
//! let ds = validate_dataset(&records).unwrap();
//! let report = evaluate(&ds, &EvalConfig::default()).unwrap();
//! assert_eq!(report.indices.sfi.normal.clamped, 1.0);
//! ```

pub mod cli;
pub mod error;
pub mod ingest;
pub mod measures;
pub mod report;
pub mod stats;
pub mod synthetic;
pub mod types;
pub mod weights;

pub use error::{FairnessError, Result};
pub use ingest::{
    classify_pairs, normalize_scores, parse_labeled_scores, parse_pair_scores, ClassifiedPairs,
    Normalization, PairRecord,
};
pub use measures::{IndexKind, IndexValue, IndexVariants, Indices, Variant};
pub use report::{evaluate, histogram_csv, EvalConfig, FairnessReport, Provenance};
pub use stats::{group_stats, kl_divergence, mean_histogram, Histogram, DEFAULT_BINS};
pub use synthetic::{generate, Preset, ScenarioPreset, SizeProfile};
pub use types::{
    validate_dataset, Dataset, GroupScores, GroupStats, RatioBasis, ScoreKind, ScoreRecord,
};
pub use weights::{compute_fusion_weights, weight_curve, FusionWeights, WeightParams};
