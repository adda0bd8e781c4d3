//! Scenario file parsing: JSON documents with a top-level `kind` tag.
//!
//! Complex numbers are `[re, im]` pairs, matrices row-major nested arrays,
//! kets an amplitude array plus a layout of `{label, dim}` entries. Unknown
//! fields are rejected.

use num_complex::Complex64;
use qmix_core::{
    scenarios::{EnvSpec, RunMode, ScreenGeometry, SlitScenario},
    CMat, CVec, DescriptorSet, GramSpec, Ket, SuiteConfig, SystemLayout, Tolerances,
};
use serde::{Deserialize, Serialize};

pub type Cx = [f64; 2];

pub fn cx(v: Cx) -> Complex64 {
    Complex64::new(v[0], v[1])
}

pub fn cx_back(z: Complex64) -> Cx {
    [z.re, z.im]
}

pub fn vec_from(raw: &[Cx]) -> Result<CVec, qmix_core::Error> {
    CVec::new(raw.iter().copied().map(cx).collect())
}

pub fn mat_from(rows: &[Vec<Cx>]) -> Result<CMat, qmix_core::Error> {
    let r = rows.len();
    let c = rows.first().map(|row| row.len()).unwrap_or(0);
    if r == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(qmix_core::Error::InvalidArgument(
            "matrix rows must be nonempty and equally long".into(),
        ));
    }
    CMat::new(
        rows.iter().flatten().copied().map(cx).collect(),
        r,
        c,
    )
}

pub fn mat_back(m: &CMat) -> Vec<Vec<Cx>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| cx_back(m.get(i, j))).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutEntry {
    pub label: String,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KetSpec {
    pub layout: Vec<LayoutEntry>,
    pub amplitudes: Vec<Cx>,
}

impl KetSpec {
    pub fn build(&self) -> Result<Ket, qmix_core::Error> {
        let layout = SystemLayout::new(
            self.layout
                .iter()
                .map(|e| (e.label.clone(), e.dim))
                .collect(),
        )?;
        Ket::new(vec_from(&self.amplitudes)?, layout)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScreenSpec {
    pub slit_spacing: f64,
    pub wave_number: f64,
    pub angular_range: [f64; 2],
    pub sample_count: usize,
}

impl ScreenSpec {
    pub fn build(&self) -> ScreenGeometry {
        ScreenGeometry {
            slit_spacing: self.slit_spacing,
            wave_number: self.wave_number,
            angular_range: (self.angular_range[0], self.angular_range[1]),
            sample_count: self.sample_count,
        }
    }
}

/// Marker environment: either an overlap (Gram) matrix or explicit vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum EnvField {
    Gram(Vec<Vec<Cx>>),
    Vectors(Vec<KetSpec>),
}

impl EnvField {
    pub fn build(&self, tol: &Tolerances) -> Result<EnvSpec, qmix_core::Error> {
        match self {
            EnvField::Gram(rows) => Ok(EnvSpec::Gram(GramSpec::new_with(mat_from(rows)?, tol)?)),
            EnvField::Vectors(specs) => Ok(EnvSpec::Vectors(
                specs
                    .iter()
                    .map(|s| s.build())
                    .collect::<Result<Vec<_>, _>>()?,
            )),
        }
    }
}

/// Detector value for a conditioning scenario: a slit index (condition on
/// that slit's realized marker vector) or an explicit environment vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum DetectorSpec {
    Slit(usize),
    Vector(Vec<Cx>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum ModeSpec {
    TrueMixture,
    UnknownPure,
}

impl ModeSpec {
    pub fn run_mode(&self) -> RunMode {
        match self {
            ModeSpec::TrueMixture => RunMode::TrueMixture,
            ModeSpec::UnknownPure => RunMode::UnknownPure,
        }
    }
}

/// A scenario file, dispatched on the `kind` tag.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum ScenarioFile {
    Mix {
        descriptors: Vec<KetSpec>,
        amplitudes: Vec<Cx>,
        gram: Vec<Vec<Cx>>,
    },
    Slits {
        n_slits: usize,
        amplitudes: Vec<Cx>,
        env: EnvField,
        screen: ScreenSpec,
    },
    Condition {
        n_slits: usize,
        amplitudes: Vec<Cx>,
        env: EnvField,
        screen: ScreenSpec,
        detector: DetectorSpec,
    },
    DoubleSlitEnv {
        weights: [f64; 2],
        psi1: KetSpec,
        psi2: KetSpec,
        marker_labels: Vec<String>,
    },
    Estimate {
        mode: ModeSpec,
        candidates: Vec<KetSpec>,
        weights: Vec<f64>,
        shots: usize,
        bases: Vec<Vec<KetSpec>>,
        seed: u64,
    },
    Verify {
        seed: u64,
        #[serde(default = "default_trials")]
        trials_per_property: usize,
        #[serde(default = "default_dims")]
        dims: Vec<usize>,
        #[serde(default)]
        tolerances: Option<Tolerances>,
    },
}

fn default_trials() -> usize {
    SuiteConfig::default().trials_per_property
}

fn default_dims() -> Vec<usize> {
    SuiteConfig::default().dims
}

impl ScenarioFile {
    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioFile::Mix { .. } => "mix",
            ScenarioFile::Slits { .. } => "slits",
            ScenarioFile::Condition { .. } => "condition",
            ScenarioFile::DoubleSlitEnv { .. } => "double_slit_env",
            ScenarioFile::Estimate { .. } => "estimate",
            ScenarioFile::Verify { .. } => "verify",
        }
    }
}

/// Builds the descriptor set of a `mix` scenario.
pub fn mix_descriptor_set(
    descriptors: &[KetSpec],
    amplitudes: &[Cx],
) -> Result<DescriptorSet, qmix_core::Error> {
    let kets = descriptors
        .iter()
        .map(|s| s.build())
        .collect::<Result<Vec<_>, _>>()?;
    DescriptorSet::with_amplitudes(kets, amplitudes.iter().copied().map(cx).collect())
}

/// Builds the slit scenario shared by `slits` and `condition` files.
pub fn slit_scenario(
    n_slits: usize,
    amplitudes: &[Cx],
    env: &EnvField,
    screen: &ScreenSpec,
    tol: &Tolerances,
) -> Result<SlitScenario, qmix_core::Error> {
    Ok(SlitScenario {
        n_slits,
        amplitudes: amplitudes.iter().copied().map(cx).collect(),
        env: env.build(tol)?,
        screen: screen.build(),
    })
}
