//! Run configuration shared by the command-line driver and the demos.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::ingest::{FetchOptions, DEFAULT_ENDPOINT, DEFAULT_MIN_TERMS};
use crate::modforms::QuadratureOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative agreement of successive Gram refinements.
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { quadrature: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub levels: Vec<u64>,
    pub d_values: Vec<usize>,
    /// Total number of grid points for kernel checks.
    pub grid: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub quadrature_nx: usize,
    pub quadrature_ny: usize,
    /// Search radius for systoles of non-arithmetic groups.
    pub systole_radius: f64,
    /// Optional gonality; product points need `d` below it.
    pub gonality: Option<usize>,
    pub min_terms: usize,
    pub fixtures_only: bool,
    pub cache_dir: Option<PathBuf>,
    pub fixture_dir: Option<PathBuf>,
    pub endpoint: String,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            levels: vec![23, 29, 31, 37],
            d_values: vec![2, 3],
            grid: 200,
            trials: 200,
            seed: 1,
            tolerances: Tolerances::default(),
            quadrature_nx: 40,
            quadrature_ny: 20,
            systole_radius: 8.0,
            gonality: None,
            min_terms: DEFAULT_MIN_TERMS,
            fixtures_only: true,
            cache_dir: None,
            fixture_dir: None,
            endpoint: DEFAULT_ENDPOINT.into(),
            output_dir: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(&l) = self.levels.iter().find(|&&l| !is_prime(l)) {
            return Err(Error::LevelNotPrime(l));
        }
        if self.d_values.contains(&0) {
            return Err(Error::Config("d values must be at least 1".into()));
        }
        if !(self.tolerances.quadrature > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.quadrature_nx == 0 || self.quadrature_ny == 0 {
            return Err(Error::Config("quadrature node counts must be positive".into()));
        }
        if !(self.systole_radius > 0.0) {
            return Err(Error::NonpositiveRadius(self.systole_radius));
        }
        Ok(())
    }

    pub fn fetch_options(&self) -> FetchOptions {
        FetchOptions {
            min_terms: self.min_terms,
            fixtures_only: self.fixtures_only,
            cache_dir: self.cache_dir.clone(),
            fixture_dir: self.fixture_dir.clone(),
            endpoint: self.endpoint.clone(),
        }
    }

    pub fn quadrature(&self) -> QuadratureOptions {
        QuadratureOptions {
            nx: self.quadrature_nx,
            ny: self.quadrature_ny,
            tol: self.tolerances.quadrature,
            ..QuadratureOptions::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
        assert_eq!(RunConfig::from_json("{}").unwrap(), cfg);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(matches!(RunConfig::from_json(r#"{"levels": [22]}"#), Err(Error::LevelNotPrime(22))));
        assert!(matches!(RunConfig::from_json(r#"{"d_values": [0]}"#), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_json(r#"{"tolerances": {"quadrature": 0}}"#), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_json(r#"{"bogus": 1}"#), Err(Error::Config(_))));
    }
}
