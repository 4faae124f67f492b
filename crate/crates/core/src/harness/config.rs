use std::path::Path;

use serde::{Deserialize, Serialize};

use super::family::FamilySpec;
use crate::error::{Error, Result};

/// How `y` is chosen for each modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum YRule {
    Fixed { value: f64 },
    /// `y = q^{1/A}`.
    QRoot { a: f64 },
}

impl YRule {
    pub fn y(&self, q: u64) -> f64 {
        match *self {
            YRule::Fixed { value } => value,
            YRule::QRoot { a } => (q as f64).powf(1.0 / a),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Exponent of `P(q)` in `q♭`.
    pub e0: f64,
    pub c4: f64,
    #[serde(rename = "C1")]
    pub big_c1: f64,
    #[serde(rename = "C2")]
    pub big_c2: f64,
    pub tau_a: f64,
    pub nu: f64,
    pub tau: f64,
    /// `ε` of the repulsion check.
    pub eps: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants { c1: 0.1, c2: 0.1, c3: 1.0, e0: 1000.0, c4: 0.0, big_c1: 1.0, big_c2: 1.0, tau_a: 0.1, nu: 1.0, tau: 0.5, eps: 0.25 }
    }
}

/// Character-sum ratio experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharsumConfig {
    pub q: u64,
    /// Interval starts; each interval is `(N, 2N]`.
    pub n: Vec<u64>,
    #[serde(default)]
    pub t: f64,
    /// Number of primitive characters sampled with the config seed.
    pub characters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Equidist,
    Classify,
    Checkers,
    Charsum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub x: Vec<f64>,
    pub y: YRule,
    pub family: FamilySpec,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "T_max")]
    pub t_max: f64,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default)]
    pub experiments: Vec<Experiment>,
    /// Moduli for classification and checkers; the family when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_moduli: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charsum: Option<CharsumConfig>,
    /// Where the bundle is written; not part of the echoed config.
    #[serde(default = "default_output_dir", skip_serializing)]
    pub output_dir: String,
    #[serde(default)]
    pub seed: u64,
}

fn default_output_dir() -> String {
    "out".into()
}

pub const MAX_X: f64 = 4e9;
pub const MAX_ZERO_MODULUS: u64 = 10_000;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for &x in &self.x {
            if !(x >= 1.0 && x <= MAX_X) {
                return Err(Error::Config(format!("x = {x} outside [1, {MAX_X}]")));
            }
        }
        match self.y {
            YRule::Fixed { value } if !(value >= 1.0) => return Err(Error::Config(format!("y = {value} < 1"))),
            YRule::QRoot { a } if !(a > 0.0) => return Err(Error::Config(format!("y rule exponent {a} <= 0"))),
            _ => {}
        }
        if !(self.a > 0.0 && self.d >= 0.0 && self.t_max > 0.0 && self.t_max <= 1000.0) {
            return Err(Error::Config(format!("need A > 0, D >= 0, 0 < T_max <= 1000; got {}, {}, {}", self.a, self.d, self.t_max)));
        }
        if let Some(moduli) = &self.zero_moduli {
            if let Some(q) = moduli.iter().find(|&&q| q == 0 || q > MAX_ZERO_MODULUS) {
                return Err(Error::Config(format!("zero modulus {q} outside [1, {MAX_ZERO_MODULUS}]")));
            }
        }
        if let Some(cs) = &self.charsum {
            if cs.q < 16 || cs.n.iter().any(|&n| n == 0) {
                return Err(Error::Config("charsum needs q >= 16 and N >= 1".into()));
            }
        }
        self.family.validate()
    }

    /// Normalized single-line JSON echoed into every output file.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_defaults() {
        let text = r#"{"x":[1e4],"y":{"rule":"fixed","value":1000},"family":{"kind":"explicit","moduli":[4]},
                      "A":6.6,"D":10,"T_max":50}"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        assert!(c.experiments.is_empty());
        assert_eq!(c.constants, Constants::default());
        let again = ExperimentConfig::from_json(&c.echo()).unwrap();
        assert_eq!(c, again);
        assert!(!c.echo().contains("output_dir"));
    }

    #[test]
    fn rejects_bad_input() {
        let bad = r#"{"x":[0.5],"y":{"rule":"fixed","value":1000},"family":{"kind":"explicit","moduli":[4]},"A":6.6,"D":10,"T_max":50}"#;
        assert!(matches!(ExperimentConfig::from_json(bad), Err(Error::Config(_))));
        let unknown = r#"{"x":[10],"y":{"rule":"fixed","value":1000},"family":{"kind":"explicit","moduli":[4]},"A":6.6,"D":10,"T_max":50,"zzz":1}"#;
        assert!(matches!(ExperimentConfig::from_json(unknown), Err(Error::Config(_))));
    }

    #[test]
    fn q_root_rule() {
        assert!((YRule::QRoot { a: 2.0 }.y(10_000) - 100.0).abs() < 1e-9);
    }
}
