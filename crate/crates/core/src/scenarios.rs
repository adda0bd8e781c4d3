//! Which-path experiment builders and analyses.
//!
//! N-slit screens with a far-field phase model, fringe visibility, detector
//! conditioning, the double-slit construction with a mixed marker
//! environment, and a sequential Bayesian estimator of an unknown
//! preparation.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::correlation::conditional_state;
use crate::error::{Error, Result};
use crate::mixing::{mix_general, GramSpec, MixResult};
use crate::state::{DensityOp, DescriptorSet, Ket, SystemLayout};
use crate::tensor::{self, CVec};
use crate::tol::Tolerances;

/// Label used for the slit (system) register built by [`build_slit_scenario`].
pub const SLIT_LABEL: &str = "S";
/// Label used for the marker environment built by [`build_slit_scenario`].
pub const ENV_LABEL: &str = "E";

/// Screen geometry for the far-field intensity model.
#[derive(Debug, Clone)]
pub struct ScreenGeometry {
    /// Distance between adjacent slits (length units).
    pub slit_spacing: f64,
    /// Wave number k (1/length units).
    pub wave_number: f64,
    /// Angular range [lo, hi] of the screen scan (radians).
    pub angular_range: (f64, f64),
    /// Number of equally spaced sample angles (≥ 2).
    pub sample_count: usize,
}

/// Environment specification for a slit scenario: either pairwise overlaps or
/// explicit marker vectors (reduced to their Gram matrix).
#[derive(Debug, Clone)]
pub enum EnvSpec {
    Gram(GramSpec),
    Vectors(Vec<Ket>),
}

impl EnvSpec {
    fn to_gram(&self, tol: &Tolerances) -> Result<GramSpec> {
        match self {
            EnvSpec::Gram(g) => Ok(g.clone()),
            EnvSpec::Vectors(vs) => {
                let raw: Vec<CVec> = vs.iter().map(|v| v.vec().clone()).collect();
                GramSpec::new_with(tensor::gram(&raw)?, tol)
            }
        }
    }

    fn side(&self) -> usize {
        match self {
            EnvSpec::Gram(g) => g.side(),
            EnvSpec::Vectors(vs) => vs.len(),
        }
    }
}

/// A multi-slit interference scenario: passage amplitudes plus a marker
/// environment carrying the which-path correlations.
#[derive(Debug, Clone)]
pub struct SlitScenario {
    pub n_slits: usize,
    pub amplitudes: Vec<Complex64>,
    pub env: EnvSpec,
    pub screen: ScreenGeometry,
}

/// Screen intensity samples.
#[derive(Debug, Clone)]
pub struct ScreenPattern {
    /// Sample angles (radians).
    pub abscissae: Vec<f64>,
    /// Intensities ⟨x|ρ|x⟩ at each angle, nonnegative.
    pub intensities: Vec<f64>,
}

/// Builds the joint slit–marker state for a scenario.
///
/// The slit-passage states are the first `n_slits` computational basis
/// vectors of the slit register; the marker environment is realized from the
/// scenario's overlap specification in its minimal dimension.
pub fn build_slit_scenario(s: &SlitScenario, tol: &Tolerances) -> Result<MixResult> {
    if s.n_slits < 2 {
        return Err(Error::InvalidArgument("need at least 2 slits".into()));
    }
    if s.amplitudes.len() != s.n_slits || s.env.side() != s.n_slits {
        return Err(Error::InvalidArgument(
            "amplitude count and environment side must equal the slit count".into(),
        ));
    }
    let layout = SystemLayout::single(SLIT_LABEL, s.n_slits)?;
    let descriptors: Vec<Ket> = (0..s.n_slits)
        .map(|j| Ket::basis(layout.clone(), j))
        .collect();
    let d = DescriptorSet::with_amplitudes(descriptors, s.amplitudes.clone())?;
    mix_general(&d, &s.env.to_gram(tol)?, ENV_LABEL, tol)
}

fn check_geometry(g: &ScreenGeometry, n_slits: usize) -> Result<()> {
    let (lo, hi) = g.angular_range;
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo || g.sample_count < 2 {
        return Err(Error::InvalidArgument("degenerate screen grid".into()));
    }
    if !(g.slit_spacing.is_finite() && g.wave_number.is_finite())
        || g.slit_spacing <= 0.0
        || g.wave_number <= 0.0
    {
        return Err(Error::InvalidArgument(
            "slit spacing and wave number must be positive and finite".into(),
        ));
    }
    // Nyquist guard: at least 2 samples per fringe. The fastest phase rate
    // across the scan is k·d·(n−1)·max|cos x| ≤ k·d·(n−1), so the angular
    // step must satisfy Δx · k·d·(n−1) ≤ π.
    let step = (hi - lo) / (g.sample_count as f64 - 1.0);
    let max_rate = g.wave_number * g.slit_spacing * (n_slits.max(2) as f64 - 1.0);
    if step * max_rate > std::f64::consts::PI {
        return Err(Error::InvalidArgument(
            "screen grid undersamples the fringes".into(),
        ));
    }
    Ok(())
}

/// Far-field screen intensity of a reduced slit-register state.
///
/// Uses the phase model ⟨x|φ_j⟩ = e^{i k d_j sin x}/√n with d_j = j·spacing,
/// so I(x) = Σ_{jk} ρ_{jk} f_j(x) f_k(x)^*. For two slits and a pure equal
/// superposition this is the standard (1 + cos Δ)/2 fringe pattern.
pub fn screen_intensity(reduced: &DensityOp, g: &ScreenGeometry) -> Result<ScreenPattern> {
    let n = reduced.dim();
    check_geometry(g, n)?;
    let (lo, hi) = g.angular_range;
    let step = (hi - lo) / (g.sample_count as f64 - 1.0);
    let inv_n = 1.0 / n as f64;
    let mut abscissae = Vec::with_capacity(g.sample_count);
    let mut intensities = Vec::with_capacity(g.sample_count);
    for i in 0..g.sample_count {
        let x = lo + step * i as f64;
        let kd_sin = g.wave_number * g.slit_spacing * x.sin();
        let f: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(1.0, kd_sin * j as f64))
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                acc += reduced.mat().get(j, k) * f[j] * f[k].conj();
            }
        }
        let val = acc.re * inv_n;
        abscissae.push(x);
        intensities.push(val.max(0.0));
    }
    Ok(ScreenPattern {
        abscissae,
        intensities,
    })
}

/// Fringe contrast (Imax − Imin)/(Imax + Imin); 0 for an (almost) dark
/// pattern or an empty one.
pub fn visibility(p: &ScreenPattern) -> f64 {
    let tol = Tolerances::default();
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    for &v in &p.intensities {
        max = max.max(v);
        min = min.min(v);
    }
    if !max.is_finite() || max + min <= tol.norm {
        return 0.0;
    }
    ((max - min) / (max + min)).clamp(0.0, 1.0)
}

/// Reduced state of the slit register after an ideal detector on the marker
/// environment registers `detector_value`.
///
/// Errors with [`Error::NullEvent`] when the conditioning probability
/// vanishes.
pub fn condition_on(joint: &Ket, detector_value: &Ket, tol: &Tolerances) -> Result<DensityOp> {
    Ok(conditional_state(joint, detector_value, tol)?.projector())
}

/// Double slit with a mixed marker environment.
///
/// Builds |Ψ^{SME}⟩ = α₁|0⟩⊗|Ψ₁^{ME}⟩ + α₂|1⟩⊗|Ψ₂^{ME}⟩ with |α_j|² = w_j,
/// where both purifications must reduce to the same marker state ρ^M
/// (`m_labels` names the marker subsystems inside the purifications'
/// layout). Returns (ρ^{SM}, ρ^S).
///
/// The S off-diagonal equals α₁α₂^*⟨Ψ₂|Ψ₁⟩, so collinear purifications give
/// a pure ρ^S and orthogonal ones the incoherent mixture.
pub fn double_slit_env_mixture(
    w: (f64, f64),
    psi_me1: &Ket,
    psi_me2: &Ket,
    m_labels: &[&str],
    tol: &Tolerances,
) -> Result<(DensityOp, DensityOp)> {
    let (w1, w2) = w;
    if w1 < -tol.norm || w2 < -tol.norm || (w1 + w2 - 1.0).abs() > tol.norm {
        return Err(Error::InvalidArgument(
            "weights must be nonnegative and sum to 1".into(),
        ));
    }
    if psi_me1.layout() != psi_me2.layout() {
        return Err(Error::Layout(
            "the two purifications must share a layout".into(),
        ));
    }
    if psi_me1.layout().index_of(SLIT_LABEL).is_some() {
        return Err(Error::Layout(format!(
            "label {SLIT_LABEL} is reserved for the system register"
        )));
    }
    let e_labels = psi_me1.layout().complement(m_labels);
    if m_labels.is_empty()
        || e_labels.is_empty()
        || m_labels.len() + e_labels.len() != psi_me1.layout().subsystems().len()
    {
        return Err(Error::Layout(
            "marker labels must be a proper subsystem of the purification layout".into(),
        ));
    }
    // Premise: both purifications carry the same marker marginal.
    let rho_m1 = psi_me1.projector().partial_trace(m_labels)?;
    let rho_m2 = psi_me2.projector().partial_trace(m_labels)?;
    let defect = rho_m1.mat().sub(rho_m2.mat()).max_norm();
    if defect > tol.class {
        return Err(Error::MismatchedMarginals(defect));
    }

    let s_layout = SystemLayout::single(SLIT_LABEL, 2)?;
    let joint_layout = s_layout.tensor(psi_me1.layout())?;
    let a1 = Complex64::new(w1.max(0.0).sqrt(), 0.0);
    let a2 = Complex64::new(w2.max(0.0).sqrt(), 0.0);
    let t1 = tensor::tensor_product_vec(Ket::basis(s_layout.clone(), 0).vec(), psi_me1.vec())?
        .scaled(a1);
    let t2 = tensor::tensor_product_vec(Ket::basis(s_layout, 1).vec(), psi_me2.vec())?.scaled(a2);
    let joint = Ket::new_with(t1.add(&t2), joint_layout, tol)?;

    let mut sm_labels: Vec<&str> = vec![SLIT_LABEL];
    sm_labels.extend_from_slice(m_labels);
    let rho_sm = joint.projector().partial_trace(&sm_labels)?;
    let rho_s = joint.projector().partial_trace(&[SLIT_LABEL])?;
    Ok((rho_sm, rho_s))
}

/// Sequential Bayesian estimate of which candidate preparation produced the
/// observed outcomes.
#[derive(Debug, Clone)]
pub struct EstimatorState {
    candidates: Vec<Ket>,
    posterior: Vec<f64>,
}

impl EstimatorState {
    pub fn new(candidates: Vec<Ket>, posterior: Vec<f64>) -> Result<Self> {
        Self::new_with(candidates, posterior, &Tolerances::default())
    }

    pub fn new_with(candidates: Vec<Ket>, posterior: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        if candidates.is_empty() || candidates.len() != posterior.len() {
            return Err(Error::InvalidArgument(
                "need equally many candidates and posterior weights".into(),
            ));
        }
        let layout = candidates[0].layout().clone();
        if candidates.iter().any(|c| c.layout() != &layout) {
            return Err(Error::Layout("candidates on mixed layouts".into()));
        }
        if posterior.iter().any(|&p| p < -tol.norm) {
            return Err(Error::InvalidArgument("negative posterior weight".into()));
        }
        let total: f64 = posterior.iter().sum();
        if (total - 1.0).abs() > tol.norm {
            return Err(Error::NotNormalized(total));
        }
        Ok(EstimatorState {
            candidates,
            posterior: posterior.iter().map(|&p| p.max(0.0)).collect(),
        })
    }

    /// Uniform prior over the candidates.
    pub fn uniform(candidates: Vec<Ket>) -> Result<Self> {
        let n = candidates.len();
        Self::new(candidates, vec![1.0 / n as f64; n])
    }

    pub fn candidates(&self) -> &[Ket] {
        &self.candidates
    }

    pub fn posterior(&self) -> &[f64] {
        &self.posterior
    }

    /// The current best estimate Σ_j posterior_j |φ_j⟩⟨φ_j| of the
    /// preparation.
    pub fn estimate(&self) -> Result<DensityOp> {
        DensityOp::mixture(&self.candidates, &self.posterior)
    }
}

/// Bayesian update on a projective outcome: posterior'_j ∝ posterior_j ·
/// |⟨outcome|φ_j⟩|².
///
/// Errors with [`Error::ImpossibleOutcome`] when every candidate assigns the
/// outcome zero likelihood.
pub fn estimator_update(e: &EstimatorState, outcome: &Ket) -> Result<EstimatorState> {
    let mut updated: Vec<f64> = e
        .candidates
        .iter()
        .zip(&e.posterior)
        .map(|(phi, &p)| p * outcome.inner(phi).norm_sqr())
        .collect();
    let total: f64 = updated.iter().sum();
    if total <= 1e-300 {
        return Err(Error::ImpossibleOutcome);
    }
    for p in &mut updated {
        *p /= total;
    }
    Ok(EstimatorState {
        candidates: e.candidates.clone(),
        posterior: updated,
    })
}

/// How the true preparation behaves across shots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// A fresh candidate is drawn from the weights for every shot: the source
    /// really emits the mixture Σ w_j P_j.
    TrueMixture,
    /// One candidate is drawn once and held: the source emits a single
    /// unknown pure state.
    UnknownPure,
}

/// Outcome record and posterior trajectory of a simulated estimation run.
#[derive(Debug, Clone)]
pub struct PreparationRun {
    /// Posterior after each shot; entry 0 is the prior.
    pub posteriors: Vec<Vec<f64>>,
    /// Per-shot (basis index, outcome index within that basis).
    pub outcomes: Vec<(usize, usize)>,
    /// The candidate index actually emitted at each shot.
    pub emitted: Vec<usize>,
}

fn sample_weighted(weights: &[f64], rng: &mut impl Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        u -= w;
        if u <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

/// Simulates a seeded sequential estimation run.
///
/// `bases` is the measurement design: a list of projective bases, cycled
/// shot by shot. Each shot emits a candidate according to `mode`, samples an
/// outcome from the Born probabilities, and applies [`estimator_update`].
pub fn simulate_preparation_run(
    mode: RunMode,
    candidates: &[Ket],
    weights: &[f64],
    n_shots: usize,
    bases: &[Vec<Ket>],
    seed: u64,
) -> Result<(PreparationRun, EstimatorState)> {
    if bases.is_empty() || bases.iter().any(|b| b.is_empty()) {
        return Err(Error::InvalidArgument(
            "measurement design needs at least one nonempty basis".into(),
        ));
    }
    if weights.len() != candidates.len() {
        return Err(Error::InvalidArgument(
            "need one weight per candidate".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut est = EstimatorState::new(candidates.to_vec(), weights.to_vec())?;
    let held = sample_weighted(weights, &mut rng);

    let mut run = PreparationRun {
        posteriors: vec![est.posterior.clone()],
        outcomes: Vec::with_capacity(n_shots),
        emitted: Vec::with_capacity(n_shots),
    };
    for shot in 0..n_shots {
        let t = match mode {
            RunMode::TrueMixture => sample_weighted(weights, &mut rng),
            RunMode::UnknownPure => held,
        };
        let basis_idx = shot % bases.len();
        let basis = &bases[basis_idx];
        let probs: Vec<f64> = basis
            .iter()
            .map(|b| b.inner(&candidates[t]).norm_sqr())
            .collect();
        let outcome_idx = sample_weighted(&probs, &mut rng);
        est = match estimator_update(&est, &basis[outcome_idx]) {
            Ok(next) => next,
            // A fresh emission can contradict a posterior that has already
            // collapsed onto the wrong candidate; restart from the prior,
            // which assigns the observed outcome nonzero likelihood.
            Err(Error::ImpossibleOutcome) => {
                let prior = EstimatorState::new(candidates.to_vec(), weights.to_vec())?;
                estimator_update(&prior, &basis[outcome_idx])?
            }
            Err(e) => return Err(e),
        };
        run.emitted.push(t);
        run.outcomes.push((basis_idx, outcome_idx));
        run.posteriors.push(est.posterior.clone());
    }
    Ok((run, est))
}
