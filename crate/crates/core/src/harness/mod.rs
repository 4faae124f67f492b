//! Configuration, modulus families, equidistribution experiments and the
//! reproducible artifact runner.

pub mod config;
pub mod equidist;
pub mod family;
pub mod run;

pub use config::{Constants, ExperimentConfig, YRule};
pub use equidist::{discrepancy, kendall_tau, label_ranges, label_ranges_log, trend, DiscrepancyReport, RangeLabels, TrendReport, YLabel};
pub use family::{family_generate, FamilySpec};
pub use run::{run, RunOutcome};
