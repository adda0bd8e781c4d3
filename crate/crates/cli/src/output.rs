//! Output documents and CSV writers.
//!
//! Every JSON result type also derives `Deserialize` with unknown fields
//! rejected, so emitted documents re-validate against the same schema that
//! produced them.

use qmix_core::scenarios::ScreenPattern;
use qmix_core::{Classification, DensityOp, MixResult};
use serde::{Deserialize, Serialize};

use crate::scenario::{cx_back, mat_back, Cx};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixOutput {
    pub reduced: Vec<Vec<Cx>>,
    pub purity: f64,
    pub classification: Classification,
    /// Schmidt coefficients of the joint system–marker state, descending.
    pub joint_schmidt_coefficients: Vec<f64>,
    pub amplitudes: Vec<Cx>,
    pub env_dim: usize,
}

impl MixOutput {
    pub fn from_result(out: &MixResult) -> Result<Self, qmix_core::Error> {
        let ds = out.reduced.dim();
        let de = out.env_vectors[0].dim();
        let dec = qmix_core::tensor::schmidt(out.joint.vec(), (ds, de), 1e-10)?;
        Ok(MixOutput {
            reduced: mat_back(out.reduced.mat()),
            purity: out.reduced.purity(),
            classification: out.classification.clone(),
            joint_schmidt_coefficients: dec.coeffs,
            amplitudes: out.amplitudes.iter().copied().map(cx_back).collect(),
            env_dim: de,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlitsOutput {
    pub visibility: f64,
    pub classification: Classification,
    pub purity: f64,
    pub samples: usize,
    /// Path of the CSV pattern file, when one was written.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub csv: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionOutput {
    pub conditional_reduced: Vec<Vec<Cx>>,
    pub purity: f64,
    pub visibility: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub csv: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleSlitEnvOutput {
    pub rho_sm: Vec<Vec<Cx>>,
    pub rho_s: Vec<Vec<Cx>>,
    pub rho_s_purity: f64,
    pub rho_s_off_diagonal_modulus: f64,
}

impl DoubleSlitEnvOutput {
    pub fn from_states(rho_sm: &DensityOp, rho_s: &DensityOp) -> Self {
        DoubleSlitEnvOutput {
            rho_sm: mat_back(rho_sm.mat()),
            rho_s: mat_back(rho_s.mat()),
            rho_s_purity: rho_s.purity(),
            rho_s_off_diagonal_modulus: rho_s.mat().get(0, 1).norm(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateOutput {
    pub shots: usize,
    pub final_posterior: Vec<f64>,
    pub max_posterior: f64,
    /// Empirical outcome frequencies per (basis, outcome) pair.
    pub outcome_frequencies: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub csv: Option<String>,
}

/// CSV with a header row, "." decimal separator and LF line endings.
pub fn pattern_csv(p: &ScreenPattern) -> String {
    let mut out = String::from("angle,intensity\n");
    for (x, i) in p.abscissae.iter().zip(&p.intensities) {
        out.push_str(&format!("{x:.12e},{i:.12e}\n"));
    }
    out
}

/// Posterior-trajectory CSV: shot, w1..wn. Row 0 is the prior.
pub fn trajectory_csv(posteriors: &[Vec<f64>]) -> String {
    let n = posteriors.first().map(|p| p.len()).unwrap_or(0);
    let mut out = String::from("shot");
    for j in 1..=n {
        out.push_str(&format!(",w{j}"));
    }
    out.push('\n');
    for (shot, row) in posteriors.iter().enumerate() {
        out.push_str(&format!("{shot}"));
        for w in row {
            out.push_str(&format!(",{w:.12e}"));
        }
        out.push('\n');
    }
    out
}
