use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::GprError;

/// Matérn smoothness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Nu {
    #[serde(rename = "0.5")]
    Half,
    #[serde(rename = "1.5")]
    ThreeHalves,
    #[default]
    #[serde(rename = "2.5")]
    FiveHalves,
}

impl Nu {
    pub fn value(self) -> f64 {
        match self {
            Nu::Half => 0.5,
            Nu::ThreeHalves => 1.5,
            Nu::FiveHalves => 2.5,
        }
    }
}

impl fmt::Display for Nu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl FromStr for Nu {
    type Err = GprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0.5" => Ok(Nu::Half),
            "1.5" => Ok(Nu::ThreeHalves),
            "2.5" => Ok(Nu::FiveHalves),
            _ => Err(GprError::Config(format!("nu must be 0.5, 1.5 or 2.5, got `{s}`"))),
        }
    }
}

/// Isotropic Matérn covariance plus white noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaternKernel {
    pub length_scale: f64,
    pub signal_variance: f64,
    pub nu: Nu,
    pub noise_variance: f64,
}

impl Default for MaternKernel {
    fn default() -> Self {
        Self {
            length_scale: 1.0,
            signal_variance: 1.0,
            nu: Nu::default(),
            noise_variance: 1e-2,
        }
    }
}

impl MaternKernel {
    /// Noise-free covariance at Euclidean distance `r`.
    pub fn at_distance(&self, r: f64) -> f64 {
        let t = r / self.length_scale;
        let c = match self.nu {
            Nu::Half => (-t).exp(),
            Nu::ThreeHalves => {
                let s = 3f64.sqrt() * t;
                (1.0 + s) * (-s).exp()
            }
            Nu::FiveHalves => {
                let s = 5f64.sqrt() * t;
                (1.0 + s + s * s / 3.0) * (-s).exp()
            }
        };
        self.signal_variance * c
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        self.at_distance(euclidean(a, b))
    }

    /// Prior variance of a noisy observation.
    pub fn prior_variance(&self) -> f64 {
        self.signal_variance + self.noise_variance
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
