//! Finite predicates for the probabilistic notions of correlation:
//! conditional states, hermeticity, indistinguishability, and full
//! distinguishability.
//!
//! Indistinguishability nominally quantifies over every value of every
//! exterior system. For a joint pure state Σ μ_t |φ_t λ_t⟩ that quantifier
//! reduces losslessly to a finite test: the conditional environment vectors
//! χ_j = (1/N_j) Σ_t μ_t ⟨φ_j|φ_t⟩ |λ_t⟩ must be pairwise collinear.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{DensityOp, Ket};
use crate::tensor::{self, CMat, CVec};
use crate::tol::Tolerances;

/// Distinguishability verdict for a set of alternatives.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "verdict", content = "blocks")]
pub enum Classification {
    /// All environment overlaps have modulus ≈ 1 (collinear).
    Indistinguishable,
    /// Environment Gram ≈ identity.
    FullyDistinguishable,
    /// Pairwise overlaps ≈ 0 or ≈ 1, with the ≈1 relation transitive;
    /// the blocks are its equivalence classes (by descriptor index).
    Partitioned(Vec<Vec<usize>>),
    /// Anything in between.
    Partial,
}

/// Outcome of the pointer-basis search for full distinguishability.
#[derive(Debug, Clone, PartialEq)]
pub enum PointerSearch {
    /// A pointer basis realizing full distinguishability.
    Basis(Vec<Ket>),
    /// The alternatives are not fully distinguishable.
    NotFound,
    /// Linearly dependent descriptors: no finite decision procedure applies;
    /// the alternatives may be fully distinguishable even with non-orthogonal
    /// environment vectors, so no verdict is returned.
    Inconclusive,
}

/// Joint pure state in correlated form: Σ_t μ_t |φ_t⟩⊗|λ_t⟩.
#[derive(Debug, Clone)]
pub struct CorrelatedForm {
    descriptors: Vec<Ket>,
    env_vectors: Vec<Ket>,
    amplitudes: Vec<Complex64>,
}

impl CorrelatedForm {
    pub fn new(
        descriptors: Vec<Ket>,
        env_vectors: Vec<Ket>,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        Self::new_with(descriptors, env_vectors, amplitudes, &Tolerances::default())
    }

    pub fn new_with(
        descriptors: Vec<Ket>,
        env_vectors: Vec<Ket>,
        amplitudes: Vec<Complex64>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if descriptors.is_empty()
            || descriptors.len() != env_vectors.len()
            || descriptors.len() != amplitudes.len()
        {
            return Err(Error::InvalidArgument(
                "correlated form needs equal nonempty descriptor, environment and amplitude lists"
                    .into(),
            ));
        }
        let s_layout = descriptors[0].layout().clone();
        if descriptors.iter().any(|d| d.layout() != &s_layout) {
            return Err(Error::Layout("descriptors on mixed layouts".into()));
        }
        let m_layout = env_vectors[0].layout().clone();
        if env_vectors.iter().any(|v| v.layout() != &m_layout) {
            return Err(Error::Layout("environment vectors on mixed layouts".into()));
        }
        // Joint normalization: Σ_{jk} μ_j μ_k^* ⟨λ_k|λ_j⟩⟨φ_k|φ_j⟩ = 1.
        let mut total = Complex64::new(0.0, 0.0);
        for (j, (dj, lj)) in descriptors.iter().zip(&env_vectors).enumerate() {
            for (k, (dk, lk)) in descriptors.iter().zip(&env_vectors).enumerate() {
                total += amplitudes[j] * amplitudes[k].conj() * lk.inner(lj) * dk.inner(dj);
            }
        }
        if (total.re - 1.0).abs() > tol.norm || total.im.abs() > tol.norm {
            return Err(Error::NotNormalized(total.re));
        }
        Ok(CorrelatedForm {
            descriptors,
            env_vectors,
            amplitudes,
        })
    }

    pub fn descriptors(&self) -> &[Ket] {
        &self.descriptors
    }

    pub fn env_vectors(&self) -> &[Ket] {
        &self.env_vectors
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }

    /// The joint ket Σ_t μ_t |φ_t λ_t⟩ on S ⊕ M.
    pub fn joint_ket(&self) -> Result<Ket> {
        let layout = self.descriptors[0]
            .layout()
            .tensor(self.env_vectors[0].layout())?;
        let dim = layout.total_dim();
        let mut acc = CVec::zeros(dim);
        for ((d, l), amp) in self.descriptors.iter().zip(&self.env_vectors).zip(&self.amplitudes) {
            let term = tensor::tensor_product_vec(d.vec(), l.vec())?.scaled(*amp);
            acc = acc.add(&term);
        }
        Ket::new(acc, layout)
    }

    /// Gram matrix of the environment vectors.
    pub fn env_gram(&self) -> CMat {
        tensor::gram(
            &self
                .env_vectors
                .iter()
                .map(|v| v.vec().clone())
                .collect::<Vec<_>>(),
        )
        .expect("environment vectors are nonempty and dimension-consistent")
    }

    /// Conditional environment vectors χ_j = (1/N_j) Σ_t μ_t ⟨φ_j|φ_t⟩ |λ_t⟩,
    /// skipping indices whose normalization N_j vanishes.
    ///
    /// Returns (descriptor index, χ_j) pairs.
    pub fn chi_vectors(&self, tol: &Tolerances) -> Result<Vec<(usize, CVec)>> {
        let env_dim = self.env_vectors[0].dim();
        let mut out = Vec::new();
        for (j, dj) in self.descriptors.iter().enumerate() {
            let mut chi = CVec::zeros(env_dim);
            for ((dt, lt), amp) in self.descriptors.iter().zip(&self.env_vectors).zip(&self.amplitudes) {
                chi = chi.add(&lt.vec().scaled(*amp * dj.inner(dt)));
            }
            let n = chi.norm();
            if n > tol.norm {
                out.push((j, chi.scaled(Complex64::new(1.0 / n, 0.0))));
            }
        }
        if out.is_empty() {
            return Err(Error::DegenerateForm);
        }
        Ok(out)
    }

    /// True iff the descriptors are linearly independent.
    pub fn descriptors_independent(&self, tol: &Tolerances) -> bool {
        let g = tensor::gram(
            &self
                .descriptors
                .iter()
                .map(|d| d.vec().clone())
                .collect::<Vec<_>>(),
        )
        .expect("nonempty");
        tensor::psd_rank(&g, tol.psd, tol.herm).expect("Gram is Hermitian") == self.len()
    }
}

/// Conditional state |Ψ(b)⟩ ∝ (I_A ⊗ ⟨b|)|ψ⟩ on the complement of `b`'s
/// subsystems.
///
/// Errors with [`Error::NullEvent`] when the conditioning probability
/// vanishes.
pub fn conditional_state(psi: &Ket, b: &Ket, tol: &Tolerances) -> Result<Ket> {
    let b_labels = b.layout().labels();
    let a_labels = psi.layout().complement(&b_labels);
    if a_labels.len() + b_labels.len() != psi.layout().subsystems().len() {
        return Err(Error::Layout(
            "conditioning value's subsystems are not part of the joint layout".into(),
        ));
    }
    if a_labels.is_empty() {
        return Err(Error::Layout(
            "conditioning on every subsystem leaves nothing".into(),
        ));
    }
    // Reorder so the conditioned subsystems come last, then contract.
    let order: Vec<&str> = a_labels.iter().chain(b_labels.iter()).cloned().collect();
    let reordered = psi.reorder(&order)?;
    let b_reordered = b.reorder(&b_labels)?;
    let a_layout = reordered.layout().restrict(&a_labels)?;
    let da = a_layout.total_dim();
    let db = b.dim();

    let entries = reordered.vec().entries();
    let mut raw = Vec::with_capacity(da);
    for ai in 0..da {
        let mut acc = Complex64::new(0.0, 0.0);
        for (bi, bv) in b_reordered.vec().entries().iter().enumerate() {
            acc += bv.conj() * entries[ai * db + bi];
        }
        raw.push(acc);
    }
    let n: f64 = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n <= tol.norm {
        return Err(Error::NullEvent);
    }
    let out = CVec::new(raw)?.scaled(Complex64::new(1.0 / n, 0.0));
    Ket::new(out, a_layout)
}

/// Conditional probability |⟨a|Ψ(b)⟩|².
pub fn conditional_prob(psi: &Ket, a: &Ket, b: &Ket, tol: &Tolerances) -> Result<f64> {
    let cond = conditional_state(psi, b, tol)?;
    let aligned = a.reorder(&cond.layout().labels())?;
    Ok(aligned.inner(&cond).norm_sqr().clamp(0.0, 1.0))
}

/// True iff the state factorizes across the cut: ‖ρ^{SM} − ρ^S⊗ρ^M‖_max ≤
/// the classification tolerance.
pub fn is_hermetic(rho_joint: &DensityOp, s_labels: &[&str], tol: &Tolerances) -> Result<bool> {
    Ok(hermeticity_defect(rho_joint, s_labels)? <= tol.class)
}

/// Max-norm of ρ^{SM} − ρ^S⊗ρ^M (the factorization residual).
pub fn hermeticity_defect(rho_joint: &DensityOp, s_labels: &[&str]) -> Result<f64> {
    let m_labels = rho_joint.layout().complement(s_labels);
    if s_labels.is_empty() || m_labels.is_empty() {
        return Err(Error::Layout(
            "hermeticity needs a proper bipartition of the layout".into(),
        ));
    }
    let rho_s = rho_joint.partial_trace(s_labels)?;
    let rho_m = rho_joint.partial_trace(&m_labels)?;
    let product = tensor::tensor_product_mat(rho_s.mat(), rho_m.mat())?;
    // Compare in the S-first ordering.
    let order: Vec<&str> = s_labels.iter().chain(m_labels.iter()).cloned().collect();
    let reordered = rho_joint.reorder(&order)?;
    Ok(reordered.mat().sub(&product).max_norm())
}

/// Exact finite indistinguishability test: the χ vectors must be pairwise
/// collinear, |⟨χ_j|χ_k⟩| ≥ 1 − ε_class.
pub fn indistinguishable(form: &CorrelatedForm, tol: &Tolerances) -> Result<bool> {
    let chis = form.chi_vectors(tol)?;
    for i in 0..chis.len() {
        for j in (i + 1)..chis.len() {
            if chis[i].1.inner(&chis[j].1).norm() < 1.0 - tol.class {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Pointer-basis search for full distinguishability.
///
/// For linearly independent descriptors the alternatives are fully
/// distinguishable iff the environment Gram is the identity, in which case
/// the environment vectors themselves are the pointer basis. For linearly
/// dependent descriptors the question is undecidable by this criterion and
/// the search reports [`PointerSearch::Inconclusive`].
pub fn fully_distinguishable(form: &CorrelatedForm, tol: &Tolerances) -> Result<PointerSearch> {
    // Surfaces the degenerate-form error on all-vanishing amplitudes.
    form.chi_vectors(tol)?;
    if !form.descriptors_independent(tol) {
        return Ok(PointerSearch::Inconclusive);
    }
    let g = form.env_gram();
    let n = g.rows();
    let identity = CMat::identity(n);
    if g.sub(&identity).max_norm() <= tol.class {
        Ok(PointerSearch::Basis(form.env_vectors().to_vec()))
    } else {
        Ok(PointerSearch::NotFound)
    }
}

/// Classify a correlated form by its environment Gram matrix.
pub fn classify(form: &CorrelatedForm, tol: &Tolerances) -> Classification {
    classify_gram(&form.env_gram(), tol)
}

/// Classify a Gram matrix of environment overlaps.
///
/// `Partitioned` requires every pairwise overlap modulus to be within the
/// classification tolerance of 0 or 1 *and* the ≈1 relation to be transitive;
/// tolerance chains that break transitivity classify as `Partial`.
pub fn classify_gram(g: &CMat, tol: &Tolerances) -> Classification {
    let n = g.rows();
    let mut all_one = true;
    let mut identity = true;
    let mut zero_or_one = true;
    let mut near_one = vec![vec![false; n]; n];
    for j in 0..n {
        near_one[j][j] = true;
        for k in 0..n {
            if j == k {
                continue;
            }
            let m = g.get(j, k).norm();
            if m < 1.0 - tol.class {
                all_one = false;
            }
            if m > tol.class {
                identity = false;
            }
            let is_one = (m - 1.0).abs() <= tol.class;
            let is_zero = m <= tol.class;
            if is_one {
                near_one[j][k] = true;
            }
            if !is_one && !is_zero {
                zero_or_one = false;
            }
        }
    }
    if all_one {
        return Classification::Indistinguishable;
    }
    if identity {
        return Classification::FullyDistinguishable;
    }
    if zero_or_one {
        // Transitivity guard: the ≈1 relation must be an equivalence.
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if near_one[a][b] && near_one[b][c] && !near_one[a][c] {
                        return Classification::Partial;
                    }
                }
            }
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut assigned = vec![false; n];
        for j in 0..n {
            if assigned[j] {
                continue;
            }
            let block: Vec<usize> = (j..n).filter(|&k| near_one[j][k]).collect();
            for &k in &block {
                assigned[k] = true;
            }
            blocks.push(block);
        }
        return Classification::Partitioned(blocks);
    }
    Classification::Partial
}

/// Sampled cross-check of the indistinguishability definition: draws
/// `samples` Haar-random unit values η on the environment and reports the
/// worst spread max_{j,k} |Prob(η|φ_j) − Prob(η|φ_k)| over the conditional
/// statistics.
pub fn eta_sampling_spread(
    form: &CorrelatedForm,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<f64> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let chis = form.chi_vectors(tol)?;
    let env_dim = form.env_vectors()[0].dim();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let eta = random_unit_vec(env_dim, &mut rng);
        // Prob(η|φ_j) = |⟨η|χ_j⟩|².
        let probs: Vec<f64> = chis.iter().map(|(_, chi)| eta.inner(chi).norm_sqr()).collect();
        for i in 0..probs.len() {
            for j in (i + 1)..probs.len() {
                worst = worst.max((probs[i] - probs[j]).abs());
            }
        }
    }
    Ok(worst)
}

pub(crate) fn random_unit_vec(dim: usize, rng: &mut impl rand::Rng) -> CVec {
    use rand_distr::{Distribution, StandardNormal};
    loop {
        let entries: Vec<Complex64> = (0..dim)
            .map(|_| {
                Complex64::new(
                    StandardNormal.sample(rng),
                    StandardNormal.sample(rng),
                )
            })
            .collect();
        let v = CVec::new(entries).expect("gaussian entries are finite");
        if v.norm() > 1e-6 {
            return v.scaled(Complex64::new(1.0 / v.norm(), 0.0));
        }
    }
}
