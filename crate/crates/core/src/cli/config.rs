use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partialcvx::SampleConfig;
use crate::tol::{TOL_AFF, TOL_INV, TOL_PSD};

/// Shared knobs of every subcommand; echoed verbatim into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub tol_psd: f64,
    pub tol_inv: f64,
    pub tol_aff: f64,
    /// `;`-separated constraints `q ⪰ 0`, in the input's letters
    pub region: Option<String>,
    /// sample where some constraint fails instead
    pub complement: bool,
    /// spectral-norm radius of sampled matrices
    pub scale: f64,
    /// per-input norm bound for middle-matrix samples
    pub admissible: Option<f64>,
    /// descent steps applied to each middle-matrix sample
    pub refine: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            seed: 0,
            sizes: vec![1, 2, 3],
            samples: 50,
            tol_psd: TOL_PSD,
            tol_inv: TOL_INV,
            tol_aff: TOL_AFF,
            region: None,
            complement: false,
            scale: 1.0,
            admissible: None,
            refine: 0,
            out: None,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err(Error::Config("sizes must be a non-empty list of positive integers".into()));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        for (name, v) in [("tol-psd", self.tol_psd), ("tol-inv", self.tol_inv), ("tol-aff", self.tol_aff), ("scale", self.scale)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(b) = self.admissible {
            if !(b > 0.0) {
                return Err(Error::Config(format!("admissible bound must be positive, got {b}")));
            }
        }
        Ok(())
    }

    pub fn sample_config(&self) -> SampleConfig {
        SampleConfig { sizes: self.sizes.clone(), samples: self.samples, seed: self.seed, tol_psd: self.tol_psd }
    }
}

/// Parses `1,2,3` or `1-4`.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("cannot read sizes `{s}`"));
    let mut out = vec![];
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(parse_sizes("1,2,5").unwrap(), vec![1, 2, 5]);
        assert_eq!(parse_sizes("1-4").unwrap(), vec![1, 2, 3, 4]);
        assert!(parse_sizes("x").is_err());
    }

    #[test]
    fn validation() {
        assert!(AnalysisConfig::default().validate().is_ok());
        let c = AnalysisConfig { samples: 0, ..Default::default() };
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let c = AnalysisConfig { tol_psd: -1.0, ..Default::default() };
        assert!(c.validate().is_err());
    }
}
