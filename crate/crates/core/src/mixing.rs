//! Joint-state construction for every mixing regime.
//!
//! Given descriptors {φ_s} with amplitudes μ_s and a Gram specification for
//! the environment overlaps ⟨λ_{s'}|λ_s⟩, builds the joint state
//! |Ψ⟩ = Σ_s μ_s |φ_s λ_s⟩ and the reduced operator
//! ρ^S = Σ_{ss'} μ_s μ_{s'}^* ⟨λ_{s'}|λ_s⟩ |φ_s⟩⟨φ_{s'}|.
//! The all-ones Gram is the indistinguishable regime (pure reduction), the
//! identity Gram the fully distinguishable one (incoherent mixture), and
//! everything between is partial distinguishability.
//!
//! Also provides phase-averaged pseudo-mixtures, purification, and ensemble
//! steering (re-expanding a joint pure state over a chosen descriptor set).

use num_complex::Complex64;

use crate::correlation::{classify_gram, Classification, CorrelatedForm};
use crate::error::{Error, Result};
use crate::state::{DensityOp, DescriptorSet, Ket, SystemLayout};
use crate::tensor::{self, CMat, CVec};
use crate::tol::Tolerances;

/// Unit-diagonal Hermitian PSD matrix of environment overlaps.
#[derive(Debug, Clone)]
pub struct GramSpec {
    mat: CMat,
}

impl GramSpec {
    pub fn new(mat: CMat) -> Result<Self> {
        Self::new_with(mat, &Tolerances::default())
    }

    pub fn new_with(mat: CMat, tol: &Tolerances) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidGram("overlap matrix is not square".into()));
        }
        let defect = mat.hermiticity_defect();
        if defect > tol.herm {
            return Err(Error::InvalidGram(format!(
                "not Hermitian (defect {defect:.3e})"
            )));
        }
        for i in 0..mat.rows() {
            let d = mat.get(i, i);
            if (d.re - 1.0).abs() > tol.norm || d.im.abs() > tol.norm {
                return Err(Error::InvalidGram(format!(
                    "diagonal entry {i} is {d} (expected 1)"
                )));
            }
        }
        let (evals, _) = tensor::eigh(&mat, tol.herm)?;
        if let Some(&min_eig) = evals.first() {
            if min_eig < -tol.psd {
                return Err(Error::InvalidGram(format!(
                    "not positive semidefinite (min eigenvalue {min_eig:.3e})"
                )));
            }
        }
        Ok(GramSpec { mat })
    }

    /// All-ones overlap matrix: a fully collinear (indistinguishable)
    /// environment.
    pub fn all_ones(n: usize) -> Self {
        GramSpec {
            mat: CMat::from_fn(n, n, |_, _| Complex64::new(1.0, 0.0)),
        }
    }

    /// Identity overlaps: an orthonormal (fully distinguishing) environment.
    pub fn identity(n: usize) -> Self {
        GramSpec {
            mat: CMat::identity(n),
        }
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn side(&self) -> usize {
        self.mat.rows()
    }
}

/// Output of a mixing construction.
#[derive(Debug, Clone)]
pub struct MixResult {
    /// The joint pure state on S ⊕ E.
    pub joint: Ket,
    /// The reduced operator on S (closed form; equals the partial trace of
    /// the joint projector).
    pub reduced: DensityOp,
    /// Distinguishability classification of the embedded correlated form.
    pub classification: Classification,
    /// The realized environment vectors |λ_s⟩ on E.
    pub env_vectors: Vec<Ket>,
    /// The renormalized amplitudes of the correlated form.
    pub amplitudes: Vec<Complex64>,
}

impl MixResult {
    /// The embedded correlated form Σ μ_s|φ_s λ_s⟩.
    pub fn correlated_form(&self, d: &DescriptorSet, tol: &Tolerances) -> Result<CorrelatedForm> {
        CorrelatedForm::new_with(
            d.descriptors().to_vec(),
            self.env_vectors.clone(),
            self.amplitudes.clone(),
            tol,
        )
    }
}

/// Statistical model for the relative phases of the mixed preparations.
///
/// Only phase differences are physically meaningful; the Gaussian model is
/// therefore parameterized by a covariance of the phases, from which the
/// variance of each pairwise difference is derived.
#[derive(Debug, Clone)]
pub enum PhaseModel {
    /// Deterministic phases θ_j (radians): the pure-state case.
    Fixed(Vec<f64>),
    /// Each θ_j independent and uniform on [0, 2π): all cross terms vanish.
    UniformIndependent,
    /// Jointly Gaussian phases with the given covariance (radians²).
    GaussianDifferences(CMat),
}

/// General mixing construction over an explicit Gram specification.
///
/// The environment is realized in its minimal dimension (the rank of the
/// Gram) and the amplitudes are renormalized against both Gram matrices so
/// the joint state is exactly normalized.
pub fn mix_general(
    d: &DescriptorSet,
    g: &GramSpec,
    env_label: &str,
    tol: &Tolerances,
) -> Result<MixResult> {
    let amps = d
        .amplitudes()
        .ok_or_else(|| Error::InvalidArgument("mixing requires amplitudes".into()))?;
    if d.len() != g.side() {
        return Err(Error::Layout(format!(
            "descriptor count {} does not match Gram side {}",
            d.len(),
            g.side()
        )));
    }
    if d.layout().index_of(env_label).is_some() {
        return Err(Error::Layout(format!(
            "environment label {env_label} collides with the system layout"
        )));
    }
    let env_raw = tensor::gram_realize(g.mat(), None, tol)?;
    let env_dim = env_raw[0].dim();
    let env_layout = SystemLayout::single(env_label, env_dim)?;
    let env_vectors: Vec<Ket> = env_raw
        .into_iter()
        .map(|v| Ket::new_with(v, env_layout.clone(), tol))
        .collect::<Result<_>>()?;

    // Joint norm²: Σ_{ss'} μ_s μ_{s'}^* ⟨φ_{s'}|φ_s⟩ ⟨λ_{s'}|λ_s⟩.
    let n = d.len();
    let desc_gram = d.gram();
    let mut norm2 = 0.0;
    for s in 0..n {
        for sp in 0..n {
            let term = amps[s]
                * amps[sp].conj()
                * desc_gram.get(sp, s)
                * env_vectors[sp].inner(&env_vectors[s]);
            norm2 += term.re;
        }
    }
    if norm2 <= tol.norm {
        return Err(Error::DegenerateForm);
    }
    let scale = 1.0 / norm2.sqrt();
    let amplitudes: Vec<Complex64> = amps.iter().map(|a| a * scale).collect();

    // Joint ket.
    let joint_layout = d.layout().tensor(&env_layout)?;
    let mut acc = CVec::zeros(joint_layout.total_dim());
    for ((phi, lam), amp) in d.descriptors().iter().zip(&env_vectors).zip(&amplitudes) {
        let term = tensor::tensor_product_vec(phi.vec(), lam.vec())?.scaled(*amp);
        acc = acc.add(&term);
    }
    let joint = Ket::new_with(acc, joint_layout, tol)?;

    // Closed-form reduced operator.
    let ds = d.layout().total_dim();
    let mut red = CMat::zeros(ds, ds);
    for s in 0..n {
        for sp in 0..n {
            let overlap = env_vectors[sp].inner(&env_vectors[s]);
            let coeff = amplitudes[s] * amplitudes[sp].conj() * overlap;
            red = red.add(
                &CMat::outer(d.descriptors()[s].vec(), d.descriptors()[sp].vec()).scaled(coeff),
            );
        }
    }
    let reduced = DensityOp::new_with(red, d.layout().clone(), tol)?;

    let classification = classify_gram(
        &tensor::gram(
            &env_vectors
                .iter()
                .map(|v| v.vec().clone())
                .collect::<Vec<_>>(),
        )?,
        tol,
    );

    Ok(MixResult {
        joint,
        reduced,
        classification,
        env_vectors,
        amplitudes,
    })
}

/// Indistinguishable mixing: all-ones Gram; the reduction is pure.
pub fn mix_indistinguishable(
    d: &DescriptorSet,
    env_label: &str,
    tol: &Tolerances,
) -> Result<MixResult> {
    mix_general(d, &GramSpec::all_ones(d.len()), env_label, tol)
}

/// Fully distinguishable mixing: identity Gram with amplitudes √w_j; the
/// reduction is the incoherent mixture Σ w_j |φ_j⟩⟨φ_j|.
pub fn mix_distinguishable(
    d: &DescriptorSet,
    env_label: &str,
    tol: &Tolerances,
) -> Result<MixResult> {
    let weights = d.weights().ok_or_else(|| {
        Error::InvalidArgument("distinguishable mixing requires diagonal weights".into())
    })?;
    let amps: Vec<Complex64> = weights
        .iter()
        .map(|&w| Complex64::new(w.sqrt(), 0.0))
        .collect();
    let with_amps = DescriptorSet::with_amplitudes(d.descriptors().to_vec(), amps)?;
    mix_general(&with_amps, &GramSpec::identity(d.len()), env_label, tol)
}

/// Phase-averaged state ρ̄ with ρ̄ = Σ_{jk} μ_j μ_k^* E[e^{i(θ_j−θ_k)}]
/// |φ_j⟩⟨φ_k|, renormalized to unit trace.
///
/// Fixed phases give a pure state; independent uniform phases kill every
/// cross term, leaving the incoherent mixture Σ|μ_j|²|φ_j⟩⟨φ_j|; Gaussian
/// phases damp the (j,k) cross term by exp(−Var(θ_j−θ_k)/2).
pub fn phase_average(d: &DescriptorSet, pm: &PhaseModel, tol: &Tolerances) -> Result<DensityOp> {
    let amps = d
        .amplitudes()
        .ok_or_else(|| Error::InvalidArgument("phase averaging requires amplitudes".into()))?;
    let n = d.len();
    let factor = |j: usize, k: usize| -> Result<Complex64> {
        match pm {
            PhaseModel::Fixed(thetas) => {
                if thetas.len() != n {
                    return Err(Error::InvalidArgument(
                        "phase count does not match descriptor count".into(),
                    ));
                }
                Ok(Complex64::from_polar(1.0, thetas[j] - thetas[k]))
            }
            PhaseModel::UniformIndependent => Ok(if j == k {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }),
            PhaseModel::GaussianDifferences(cov) => {
                if !cov.is_square() || cov.rows() != n {
                    return Err(Error::InvalidArgument(
                        "covariance side does not match descriptor count".into(),
                    ));
                }
                let defect = cov.hermiticity_defect();
                if defect > tol.herm {
                    return Err(Error::NotHermitian(defect));
                }
                let (evals, _) = tensor::eigh(cov, tol.herm)?;
                if let Some(&min_eig) = evals.first() {
                    if min_eig < -tol.psd {
                        return Err(Error::NotPositive(min_eig));
                    }
                }
                let var = cov.get(j, j).re + cov.get(k, k).re - 2.0 * cov.get(j, k).re;
                Ok(Complex64::new((-var.max(0.0) / 2.0).exp(), 0.0))
            }
        }
    };

    let dim = d.layout().total_dim();
    let mut mat = CMat::zeros(dim, dim);
    for j in 0..n {
        for k in 0..n {
            let coeff = amps[j] * amps[k].conj() * factor(j, k)?;
            mat = mat.add(
                &CMat::outer(d.descriptors()[j].vec(), d.descriptors()[k].vec()).scaled(coeff),
            );
        }
    }
    let tr = mat.trace().re;
    if tr <= tol.norm {
        return Err(Error::DegenerateForm);
    }
    let mat = mat.scaled(Complex64::new(1.0 / tr, 0.0));
    DensityOp::new_with(mat, d.layout().clone(), tol)
}

/// Purification: a pure joint state on S ⊕ E whose partial trace over E is
/// `rho`. The environment dimension is the rank of `rho` and the output is in
/// Schmidt form with coefficients √eigenvalues.
pub fn purify(rho: &DensityOp, env_label: &str, tol: &Tolerances) -> Result<Ket> {
    if rho.layout().index_of(env_label).is_some() {
        return Err(Error::Layout(format!(
            "environment label {env_label} collides with the system layout"
        )));
    }
    let spectral = rho.spectral(tol);
    let rank = spectral.len().max(1);
    let env_layout = SystemLayout::single(env_label, rank)?;
    let joint_layout = rho.layout().tensor(&env_layout)?;
    let mut acc = CVec::zeros(joint_layout.total_dim());
    let mut total = 0.0;
    for (k, (e, v)) in spectral.iter().enumerate() {
        let term = tensor::tensor_product_vec(v.vec(), &CVec::basis(rank, k))?
            .scaled(Complex64::new(e.sqrt(), 0.0));
        acc = acc.add(&term);
        total += e;
    }
    // Absorb the truncation of near-zero eigenvalues into the norm.
    let acc = acc.scaled(Complex64::new(1.0 / total.sqrt(), 0.0));
    Ket::new_with(acc, joint_layout, tol)
}

/// Re-expand a joint pure state over a chosen descriptor set.
///
/// Writes `psi` on S ⊕ E as Σ_{t∈L} μ_t |φ_t λ_t⟩ through a maximal linearly
/// independent subset L of the descriptors (which must span the support of
/// the reduction of `psi` onto the descriptor layout).
pub fn steer_ensemble(psi: &Ket, d: &DescriptorSet, tol: &Tolerances) -> Result<CorrelatedForm> {
    let s_labels = d.layout().labels();
    let e_labels = psi.layout().complement(&s_labels);
    if e_labels.is_empty() || s_labels.len() + e_labels.len() != psi.layout().subsystems().len() {
        return Err(Error::Layout(
            "descriptor layout is not a proper subsystem of the joint state".into(),
        ));
    }
    // Span check against the reduced state.
    let order: Vec<&str> = s_labels.iter().chain(e_labels.iter()).cloned().collect();
    let psi_ord = psi.reorder(&order)?;
    let rho_s = psi_ord.projector().partial_trace(&s_labels)?;
    if !crate::state::described_by(&rho_s, d, tol)? {
        // Report the worst projector residual for diagnostics.
        let basis = d.span_basis(tol);
        let mut worst: f64 = 0.0;
        for v in rho_s.support_basis(tol) {
            let mut r = v.vec().clone();
            for q in &basis {
                let c = q.inner(&r);
                r = r.sub(&q.scaled(c));
            }
            worst = worst.max(r.norm());
        }
        return Err(Error::Span(worst));
    }

    let subset = d.independent_subset(tol);
    let ds = d.layout().total_dim();
    let de: usize = psi_ord.layout().restrict(&e_labels)?.total_dim();
    let env_layout = psi_ord.layout().restrict(&e_labels)?;

    // Amplitude matrix M (ds × de) of psi, and the selected descriptor columns.
    let m = CMat::from_fn(ds, de, |a, b| psi_ord.vec().entries()[a * de + b]);
    let r = subset.len();
    let phi = CMat::from_fn(ds, r, |i, j| d.descriptors()[subset[j]].vec().entries()[i]);

    // Least squares through the (HPD) normal equations: Γ = (Φ†Φ)⁻¹ Φ† M.
    let gram_l = phi.adjoint().mul(&phi);
    let (evals, evecs) = tensor::eigh(&gram_l, tol.herm)?;
    let rhs = phi.adjoint().mul(&m); // r × de
    let mut gamma = CMat::zeros(r, de);
    for (e, u) in evals.iter().zip(&evecs) {
        if *e <= tol.psd {
            continue;
        }
        // Γ += u (uᴴ rhs) / e.
        for col in 0..de {
            let mut proj = Complex64::new(0.0, 0.0);
            for row in 0..r {
                proj += u.entries()[row].conj() * rhs.get(row, col);
            }
            for row in 0..r {
                let v = gamma.get(row, col) + u.entries()[row] * proj / e;
                gamma.set(row, col, v);
            }
        }
    }

    // Residual guard (defense in depth after described_by).
    let resid = phi.mul(&gamma).sub(&m).max_norm();
    if resid > crate::state::SPAN_TOL {
        return Err(Error::Span(resid));
    }

    // μ_t |λ_t⟩ = row t of Γ.
    let mut descriptors = Vec::with_capacity(r);
    let mut env_vectors = Vec::with_capacity(r);
    let mut amplitudes = Vec::with_capacity(r);
    for (row, &t) in subset.iter().enumerate() {
        let raw = CVec::new(
            (0..de).map(|col| gamma.get(row, col)).collect::<Vec<_>>(),
        )?;
        let mu = raw.norm();
        descriptors.push(d.descriptors()[t].clone());
        if mu > tol.norm {
            env_vectors.push(Ket::new_with(
                raw.scaled(Complex64::new(1.0 / mu, 0.0)),
                env_layout.clone(),
                tol,
            )?);
            amplitudes.push(Complex64::new(mu, 0.0));
        } else {
            env_vectors.push(Ket::basis(env_layout.clone(), 0));
            amplitudes.push(Complex64::new(0.0, 0.0));
        }
    }
    CorrelatedForm::new_with(descriptors, env_vectors, amplitudes, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::random_unit_vec;
    use crate::state::SystemLayout;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn layout(label: &str, dim: usize) -> SystemLayout {
        SystemLayout::single(label, dim).unwrap()
    }

    fn basis_descriptors(dim: usize) -> Vec<Ket> {
        (0..dim).map(|k| Ket::basis(layout("S", dim), k)).collect()
    }

    fn equal_amp(n: usize) -> Vec<Complex64> {
        vec![c(1.0 / (n as f64).sqrt(), 0.0); n]
    }

    #[test]
    fn mix_all_ones_gives_pure_superposition() {
        let tol = Tolerances::default();
        let d = DescriptorSet::with_amplitudes(basis_descriptors(2), equal_amp(2)).unwrap();
        let out = mix_indistinguishable(&d, "E", &tol).unwrap();
        assert!((out.reduced.purity() - 1.0).abs() < tol.class);
        assert_eq!(out.classification, Classification::Indistinguishable);
        // Reduced equals the projector of (|0⟩+|1⟩)/√2.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = Ket::new(
            CVec::new(vec![c(s, 0.0), c(s, 0.0)]).unwrap(),
            layout("S", 2),
        )
        .unwrap();
        assert!(out.reduced.mat().sub(plus.projector().mat()).max_norm() < 1e-10);
    }

    #[test]
    fn mix_single_descriptor_is_its_projector() {
        let tol = Tolerances::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let phi = Ket::new(random_unit_vec(3, &mut rng), layout("S", 3)).unwrap();
        let d = DescriptorSet::with_amplitudes(vec![phi.clone()], vec![c(1.0, 0.0)]).unwrap();
        let out = mix_indistinguishable(&d, "E", &tol).unwrap();
        assert!(out.reduced.mat().sub(phi.projector().mat()).max_norm() < 1e-10);
    }

    #[test]
    fn mix_identity_gram_gives_incoherent_mixture() {
        let tol = Tolerances::default();
        let d = DescriptorSet::with_weights(basis_descriptors(2), vec![0.5, 0.5]).unwrap();
        let out = mix_distinguishable(&d, "E", &tol).unwrap();
        assert_eq!(out.classification, Classification::FullyDistinguishable);
        let half_i = CMat::identity(2).scaled(c(0.5, 0.0));
        assert!(out.reduced.mat().sub(&half_i).max_norm() < 1e-10);
    }

    #[test]
    fn mix_degenerate_weights_give_pure_first() {
        let tol = Tolerances::default();
        let d = DescriptorSet::with_weights(basis_descriptors(2), vec![1.0, 0.0]).unwrap();
        let out = mix_distinguishable(&d, "E", &tol).unwrap();
        let p0 = Ket::basis(layout("S", 2), 0).projector();
        assert!(out.reduced.mat().sub(p0.mat()).max_norm() < 1e-10);
    }

    #[test]
    fn mix_nonorthogonal_distinguishable_purity() {
        // {|0⟩, |+⟩}, w = (0.5, 0.5): Tr ρ² = 0.75 by direct arithmetic.
        let tol = Tolerances::default();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = Ket::new(
            CVec::new(vec![c(s, 0.0), c(s, 0.0)]).unwrap(),
            layout("S", 2),
        )
        .unwrap();
        let d = DescriptorSet::with_weights(
            vec![Ket::basis(layout("S", 2), 0), plus],
            vec![0.5, 0.5],
        )
        .unwrap();
        let out = mix_distinguishable(&d, "E", &tol).unwrap();
        assert!((out.reduced.purity() - 0.75).abs() < 1e-10);
    }

    #[test]
    fn mix_partial_overlap_off_diagonal() {
        // Two orthonormal descriptors, equal amplitudes, g₁₂ = 0.5:
        // reduced off-diagonal is 0.25. Oracle: partial trace of the joint.
        let tol = Tolerances::default();
        let mut g = CMat::identity(2);
        g.set(0, 1, c(0.5, 0.0));
        g.set(1, 0, c(0.5, 0.0));
        let d = DescriptorSet::with_amplitudes(basis_descriptors(2), equal_amp(2)).unwrap();
        let out = mix_general(&d, &GramSpec::new(g).unwrap(), "E", &tol).unwrap();
        assert!((out.reduced.mat().get(0, 1).norm() - 0.25).abs() < 1e-10);

        let traced = out.joint.projector().partial_trace(&["S"]).unwrap();
        assert!(out.reduced.mat().sub(traced.mat()).max_norm() < 1e-10);
    }

    #[test]
    fn mix_reduced_matches_partial_trace_randomized() {
        let tol = Tolerances::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        for _ in 0..25 {
            let n = 3;
            let descriptors: Vec<Ket> = (0..n)
                .map(|_| Ket::new(random_unit_vec(3, &mut rng), layout("S", 3)).unwrap())
                .collect();
            let amps: Vec<Complex64> = (0..n)
                .map(|_| {
                    let v = random_unit_vec(2, &mut rng);
                    v.entries()[0]
                })
                .collect();
            let d = match DescriptorSet::with_amplitudes(descriptors, amps) {
                Ok(d) => d,
                Err(_) => continue,
            };
            let gvecs: Vec<CVec> = (0..n).map(|_| random_unit_vec(4, &mut rng)).collect();
            let g = tensor::gram(&gvecs).unwrap();
            let spec = GramSpec::new(g).unwrap();
            let out = mix_general(&d, &spec, "E", &tol).unwrap();
            let traced = out.joint.projector().partial_trace(&["S"]).unwrap();
            assert!(out.reduced.mat().sub(traced.mat()).max_norm() < 1e-10);
        }
    }

    #[test]
    fn mix_rejects_invalid_gram_and_zero_norm() {
        let tol = Tolerances::default();
        let d = DescriptorSet::with_amplitudes(basis_descriptors(2), equal_amp(2)).unwrap();
        let mut bad = CMat::identity(2);
        bad.set(0, 1, c(1.5, 0.0));
        bad.set(1, 0, c(1.5, 0.0));
        assert!(GramSpec::new(bad).is_err());
        let _ = d;
        let _ = tol;
    }

    #[test]
    fn phase_average_fixed_is_pure() {
        let tol = Tolerances::default();
        let d = DescriptorSet::with_amplitudes(basis_descriptors(2), equal_amp(2)).unwrap();
        let rho = phase_average(&d, &PhaseModel::Fixed(vec![0.3, 1.2]), &tol).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn phase_average_uniform_is_weight_mixture() {
        let tol = Tolerances::default();
        let amps = vec![c(0.6f64.sqrt(), 0.0), c(0.4f64.sqrt(), 0.0)];
        let d = DescriptorSet::with_amplitudes(basis_descriptors(2), amps).unwrap();
        let rho = phase_average(&d, &PhaseModel::UniformIndependent, &tol).unwrap();
        assert!((rho.mat().get(0, 0).re - 0.6).abs() < 1e-12);
        assert!((rho.mat().get(1, 1).re - 0.4).abs() < 1e-12);
        assert!(rho.mat().get(0, 1).norm() < 1e-12);
    }

    #[test]
    fn phase_average_gaussian_damping_factor() {
        let tol = Tolerances::default();
        let d = DescriptorSet::with_amplitudes(basis_descriptors(2), equal_amp(2)).unwrap();
        // Var(θ₁−θ₂) = 1 → off-diagonal damped by e^{−1/2}.
        let mut cov = CMat::zeros(2, 2);
        cov.set(0, 0, c(1.0, 0.0));
        let rho = phase_average(&d, &PhaseModel::GaussianDifferences(cov), &tol).unwrap();
        let expect = 0.5 * (-0.5f64).exp();
        assert!((rho.mat().get(0, 1).norm() - expect).abs() < 1e-12);
    }

    #[test]
    fn phase_average_rejects_bad_covariance() {
        let tol = Tolerances::default();
        let d = DescriptorSet::with_amplitudes(basis_descriptors(2), equal_amp(2)).unwrap();
        let mut cov = CMat::zeros(2, 2);
        cov.set(0, 0, c(-1.0, 0.0));
        assert!(phase_average(&d, &PhaseModel::GaussianDifferences(cov), &tol).is_err());
    }

    #[test]
    fn purify_examples() {
        let tol = Tolerances::default();
        // I/2 → Schmidt coefficients (1/√2, 1/√2).
        let rho = DensityOp::maximally_mixed(layout("S", 2));
        let psi = purify(&rho, "E", &tol).unwrap();
        let dec = tensor::schmidt(psi.vec(), (2, 2), 1e-10).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((dec.coeffs[0] - s).abs() < 1e-10 && (dec.coeffs[1] - s).abs() < 1e-10);

        // Pure ρ → one-dimensional environment.
        let pure = Ket::basis(layout("S", 2), 0).projector();
        let psi = purify(&pure, "E", &tol).unwrap();
        assert_eq!(psi.layout().dim_of("E"), Some(1));
    }

    #[test]
    fn purify_round_trip_random_rank3() {
        let tol = Tolerances::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let kets: Vec<Ket> = (0..3)
            .map(|_| Ket::new(random_unit_vec(4, &mut rng), layout("S", 4)).unwrap())
            .collect();
        let rho = DensityOp::mixture(&kets, &[0.5, 0.3, 0.2]).unwrap();
        let psi = purify(&rho, "E", &tol).unwrap();
        let back = psi.projector().partial_trace(&["S"]).unwrap();
        assert!(back.mat().sub(rho.mat()).max_norm() < 1e-10);
    }

    #[test]
    fn steer_recovers_correlated_form() {
        let tol = Tolerances::default();
        // Bell state with descriptors {|0⟩, |1⟩}: λ's orthonormal, μ = (1/√2, 1/√2).
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let jl = SystemLayout::new(vec![("S", 2), ("E", 2)]).unwrap();
        let bell = Ket::new(
            CVec::new(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap(),
            jl,
        )
        .unwrap();
        let d = DescriptorSet::new(vec![
            Ket::basis(layout("S", 2), 0),
            Ket::basis(layout("S", 2), 1),
        ])
        .unwrap();
        let form = steer_ensemble(&bell, &d, &tol).unwrap();
        assert!((form.amplitudes()[0].norm() - s).abs() < 1e-10);
        assert!((form.amplitudes()[1].norm() - s).abs() < 1e-10);
        let g = form.env_gram();
        assert!(g.sub(&CMat::identity(2)).max_norm() < 1e-10);
        // Rebuild-and-compare.
        let rebuilt = form.joint_ket().unwrap();
        assert!(rebuilt.vec().sub(bell.vec()).norm() < 1e-9);
    }

    #[test]
    fn steer_random_round_trip() {
        let tol = Tolerances::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(123);
        for _ in 0..10 {
            let jl = SystemLayout::new(vec![("S", 3), ("E", 3)]).unwrap();
            let psi = Ket::new(random_unit_vec(9, &mut rng), jl).unwrap();
            // Spanning descriptor set: 3 random kets (full-dimension span
            // almost surely).
            let d = DescriptorSet::new(
                (0..3)
                    .map(|_| Ket::new(random_unit_vec(3, &mut rng), layout("S", 3)).unwrap())
                    .collect(),
            )
            .unwrap();
            if !d.linearly_independent(&tol) {
                continue;
            }
            let form = steer_ensemble(&psi, &d, &tol).unwrap();
            let rebuilt = form.joint_ket().unwrap();
            assert!(rebuilt.vec().sub(psi.vec()).norm() < 1e-9);
        }
    }

    #[test]
    fn steer_rejects_non_spanning_descriptors() {
        let tol = Tolerances::default();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let jl = SystemLayout::new(vec![("S", 2), ("E", 2)]).unwrap();
        let bell = Ket::new(
            CVec::new(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap(),
            jl,
        )
        .unwrap();
        let d = DescriptorSet::new(vec![Ket::basis(layout("S", 2), 0)]).unwrap();
        assert!(matches!(
            steer_ensemble(&bell, &d, &tol),
            Err(Error::Span(_))
        ));
    }

    #[test]
    fn steer_of_purification_reproduces_eigendecomposition() {
        let tol = Tolerances::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(321);
        let kets: Vec<Ket> = (0..2)
            .map(|_| Ket::new(random_unit_vec(3, &mut rng), layout("S", 3)).unwrap())
            .collect();
        let rho = DensityOp::mixture(&kets, &[0.7, 0.3]).unwrap();
        let psi = purify(&rho, "E", &tol).unwrap();
        let support = rho.support_basis(&tol);
        let d = DescriptorSet::new(support.clone()).unwrap();
        let form = steer_ensemble(&psi, &d, &tol).unwrap();
        // Amplitudes should be the square roots of the eigenvalues.
        let spect = rho.spectral(&tol);
        for ((e, _), amp) in spect.iter().zip(form.amplitudes()) {
            assert!((amp.norm() - e.sqrt()).abs() < 1e-9);
        }
        // And the reconstruction reproduces ρ.
        let rebuilt = form.joint_ket().unwrap();
        let back = rebuilt
            .projector()
            .partial_trace(&["S"])
            .unwrap();
        assert!(back.mat().sub(rho.mat()).max_norm() < 1e-9);
    }
}
