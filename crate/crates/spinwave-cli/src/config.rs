//! Batch configuration: a flat TOML key set with strict unknown-key
//! rejection. Every suite reads only the keys it documents.

use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// verify-identities | verify-symbols | verify-splitting | wave-check |
    /// hertz-roundtrip | peel
    pub command: String,
    #[serde(default = "default_spins")]
    pub spins: Vec<f64>,
    #[serde(default)]
    pub weights: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default = "default_half_len")]
    pub half_len: f64,
    #[serde(default = "default_quad_theta")]
    pub quad_theta: usize,
    #[serde(default = "default_quad_phi")]
    pub quad_phi: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub out_dir: Option<String>,
}

fn default_spins() -> Vec<f64> {
    vec![1.0]
}
fn default_trials() -> usize {
    100
}
fn default_seed() -> u64 {
    1
}
fn default_degree() -> usize {
    5
}
fn default_grid_n() -> usize {
    64
}
fn default_half_len() -> f64 {
    16.0
}
fn default_quad_theta() -> usize {
    64
}
fn default_quad_phi() -> usize {
    128
}
fn default_tolerance() -> f64 {
    0.2
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, String> {
        toml::from_str(text).map_err(|e| format!("config error: {}", e))
    }

    pub fn two_s_list(&self) -> Result<Vec<usize>, String> {
        self.spins
            .iter()
            .map(|&s| {
                let two_s = (2.0 * s).round();
                if (2.0 * s - two_s).abs() > 1e-9 || !(1.0..=8.0).contains(&two_s) {
                    Err(format!(
                        "spin {} invalid: spins must be half-integers in 1/2 ..= 4",
                        s
                    ))
                } else {
                    Ok(two_s as usize)
                }
            })
            .collect()
    }

    pub fn validated_weights(&self) -> Result<Vec<f64>, String> {
        for &w in &self.weights {
            if w.fract() == 0.0 {
                return Err(format!(
                    "weight {} is an integer; the exponent table requires non-integer weights",
                    w
                ));
            }
        }
        Ok(self.weights.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys() {
        let err = RunConfig::parse("command = \"peel\"\nbogus_key = 3\n").unwrap_err();
        assert!(err.contains("bogus_key"), "{}", err);
    }

    #[test]
    fn integer_weight_rejected() {
        let cfg = RunConfig::parse("command = \"peel\"\nweights = [-3.0]\n").unwrap();
        assert!(cfg.validated_weights().is_err());
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::parse("command = \"verify-identities\"\n").unwrap();
        assert_eq!(cfg.trials, 100);
        assert_eq!(cfg.grid_n, 64);
    }
}
