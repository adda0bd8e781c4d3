//! Physically-typed layer over the tensor kernel: composite-system layouts,
//! kets, density operators, and descriptor sets.
//!
//! Subsystem identity is by label, not position; reordering is an explicit
//! operation. All constructors validate their invariants eagerly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{self, CMat, CVec};
use crate::tol::{Tolerances, MAX_DIM};

/// Ordered list of labeled subsystems making up a composite Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemLayout {
    subsystems: Vec<(String, usize)>,
}

impl SystemLayout {
    pub fn new<L: Into<String>>(subsystems: Vec<(L, usize)>) -> Result<Self> {
        let subsystems: Vec<(String, usize)> = subsystems
            .into_iter()
            .map(|(l, d)| (l.into(), d))
            .collect();
        if subsystems.is_empty() {
            return Err(Error::Layout("layout needs at least one subsystem".into()));
        }
        let mut total = 1usize;
        for (label, dim) in &subsystems {
            if *dim == 0 {
                return Err(Error::Layout(format!("subsystem {label} has dimension 0")));
            }
            total = total
                .checked_mul(*dim)
                .filter(|&t| t <= MAX_DIM)
                .ok_or(Error::DimensionLimit(usize::MAX, MAX_DIM))?;
        }
        for i in 0..subsystems.len() {
            for j in (i + 1)..subsystems.len() {
                if subsystems[i].0 == subsystems[j].0 {
                    return Err(Error::Layout(format!(
                        "duplicate subsystem label {}",
                        subsystems[i].0
                    )));
                }
            }
        }
        Ok(SystemLayout { subsystems })
    }

    /// Single-subsystem layout.
    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        SystemLayout::new(vec![(label.into(), dim)])
    }

    pub fn subsystems(&self) -> &[(String, usize)] {
        &self.subsystems
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|(_, d)| *d).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.subsystems.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.subsystems.iter().map(|(_, d)| d).product()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.subsystems.iter().position(|(l, _)| l == label)
    }

    pub fn dim_of(&self, label: &str) -> Option<usize> {
        self.subsystems
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, d)| *d)
    }

    /// Concatenated layout `self ⊕ other`.
    pub fn tensor(&self, other: &SystemLayout) -> Result<SystemLayout> {
        let mut subs = self.subsystems.clone();
        subs.extend(other.subsystems.iter().cloned());
        SystemLayout::new(subs)
    }

    /// Layout restricted to `labels`, in the given order.
    pub fn restrict(&self, labels: &[&str]) -> Result<SystemLayout> {
        let subs: Result<Vec<(String, usize)>> = labels
            .iter()
            .map(|l| {
                self.subsystems
                    .iter()
                    .find(|(name, _)| name == l)
                    .cloned()
                    .ok_or_else(|| Error::Layout(format!("unknown subsystem label {l}")))
            })
            .collect();
        SystemLayout::new(subs?)
    }

    /// Subsystem indices for the given labels.
    pub fn indices_of(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|l| {
                self.index_of(l)
                    .ok_or_else(|| Error::Layout(format!("unknown subsystem label {l}")))
            })
            .collect()
    }

    /// Labels not in `labels`, in layout order.
    pub fn complement(&self, labels: &[&str]) -> Vec<&str> {
        self.subsystems
            .iter()
            .map(|(l, _)| l.as_str())
            .filter(|l| !labels.contains(l))
            .collect()
    }
}

/// Permutation of flat indices induced by a subsystem reordering.
fn index_permutation(layout: &SystemLayout, new_order: &[usize]) -> Vec<usize> {
    let dims = layout.dims();
    let n = dims.len();
    let total = layout.total_dim();
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let new_dims: Vec<usize> = new_order.iter().map(|&i| dims[i]).collect();
    let mut map = vec![0usize; total];
    for (new_flat, slot) in map.iter_mut().enumerate() {
        // Decompose the new flat index over the reordered dims, then recompose
        // against the original strides.
        let mut rem = new_flat;
        let mut old_flat = 0usize;
        for pos in (0..n).rev() {
            let digit = rem % new_dims[pos];
            rem /= new_dims[pos];
            old_flat += digit * strides[new_order[pos]];
        }
        *slot = old_flat;
    }
    map
}

/// Normalized state vector with a composite-system layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    vec: CVec,
    layout: SystemLayout,
}

impl Ket {
    pub fn new(vec: CVec, layout: SystemLayout) -> Result<Self> {
        Ket::new_with(vec, layout, &Tolerances::default())
    }

    pub fn new_with(vec: CVec, layout: SystemLayout, tol: &Tolerances) -> Result<Self> {
        if vec.dim() != layout.total_dim() {
            return Err(Error::Layout(format!(
                "vector dimension {} does not match layout dimension {}",
                vec.dim(),
                layout.total_dim()
            )));
        }
        let n = vec.norm();
        if (n - 1.0).abs() > tol.norm {
            return Err(Error::NotNormalized(n));
        }
        Ok(Ket { vec, layout })
    }

    /// Normalize and wrap; rejects (near-)zero vectors.
    pub fn normalized(vec: CVec, layout: SystemLayout) -> Result<Self> {
        let v = vec.normalized()?;
        Ket::new(v, layout)
    }

    /// Computational basis ket `|k⟩`.
    pub fn basis(layout: SystemLayout, k: usize) -> Self {
        let vec = CVec::basis(layout.total_dim(), k);
        Ket { vec, layout }
    }

    pub fn vec(&self) -> &CVec {
        &self.vec
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.vec.dim()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.vec.inner(&other.vec)
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &Ket) -> Result<Ket> {
        let vec = tensor::tensor_product_vec(&self.vec, &other.vec)?;
        let layout = self.layout.tensor(&other.layout)?;
        Ok(Ket { vec, layout })
    }

    /// Reorder subsystems to the given label order.
    pub fn reorder(&self, labels: &[&str]) -> Result<Ket> {
        if labels.len() != self.layout.subsystems().len() {
            return Err(Error::Layout("reorder must list every subsystem".into()));
        }
        let order = self.layout.indices_of(labels)?;
        let map = index_permutation(&self.layout, &order);
        let entries: Vec<Complex64> = map.iter().map(|&old| self.vec.entries()[old]).collect();
        Ok(Ket {
            vec: CVec::new(entries)?,
            layout: self.layout.restrict(labels)?,
        })
    }

    /// Rank-1 projector |ψ⟩⟨ψ| as a density operator.
    pub fn projector(&self) -> DensityOp {
        DensityOp {
            mat: CMat::outer(&self.vec, &self.vec),
            layout: self.layout.clone(),
        }
    }
}

/// Hermitian, unit-trace, positive-semidefinite operator with a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp {
    mat: CMat,
    layout: SystemLayout,
}

impl DensityOp {
    pub fn new(mat: CMat, layout: SystemLayout) -> Result<Self> {
        DensityOp::new_with(mat, layout, &Tolerances::default())
    }

    pub fn new_with(mat: CMat, layout: SystemLayout, tol: &Tolerances) -> Result<Self> {
        if !mat.is_square() || mat.rows() != layout.total_dim() {
            return Err(Error::Layout(format!(
                "operator side {} does not match layout dimension {}",
                mat.rows(),
                layout.total_dim()
            )));
        }
        let defect = mat.hermiticity_defect();
        if defect > tol.herm {
            return Err(Error::NotHermitian(defect));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol.norm || tr.im.abs() > tol.norm {
            return Err(Error::NotNormalized(tr.re));
        }
        let (evals, _) = tensor::eigh(&mat, tol.herm)?;
        if let Some(&min_eig) = evals.first() {
            if min_eig < -tol.psd {
                return Err(Error::NotPositive(min_eig));
            }
        }
        Ok(DensityOp { mat, layout })
    }

    /// Uniform (maximally mixed) state I/d.
    pub fn maximally_mixed(layout: SystemLayout) -> Self {
        let d = layout.total_dim();
        DensityOp {
            mat: CMat::identity(d).scaled(Complex64::new(1.0 / d as f64, 0.0)),
            layout,
        }
    }

    /// Convex combination Σ w_j |ψ_j⟩⟨ψ_j| of states on a common layout.
    pub fn mixture(kets: &[Ket], weights: &[f64]) -> Result<Self> {
        if kets.is_empty() || kets.len() != weights.len() {
            return Err(Error::InvalidArgument(
                "mixture needs matching nonempty kets and weights".into(),
            ));
        }
        let layout = kets[0].layout.clone();
        let d = layout.total_dim();
        let mut mat = CMat::zeros(d, d);
        for (k, &w) in kets.iter().zip(weights) {
            if k.layout != layout {
                return Err(Error::Layout("mixture kets on mixed layouts".into()));
            }
            if w < 0.0 {
                return Err(Error::InvalidArgument("negative mixture weight".into()));
            }
            mat = mat.add(&CMat::outer(&k.vec, &k.vec).scaled(Complex64::new(w, 0.0)));
        }
        DensityOp::new(mat, layout)
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// Tr ρ², in (0, 1].
    pub fn purity(&self) -> f64 {
        self.mat.mul(&self.mat).trace().re
    }

    pub fn is_pure(&self, tol: &Tolerances) -> bool {
        self.purity() > 1.0 - tol.class
    }

    /// Outcome probability Tr(ρ |φ⟩⟨φ|), clamped to [0, 1] near the boundary.
    pub fn prob(&self, phi: &Ket) -> Result<f64> {
        if phi.layout != self.layout {
            return Err(Error::Layout(
                "probability of a value on a different layout".into(),
            ));
        }
        let p = phi.vec.inner(&self.mat.mul_vec(&phi.vec)).re;
        Ok(p.clamp(0.0, 1.0))
    }

    /// Partial trace keeping the listed subsystem labels (layout order).
    pub fn partial_trace(&self, keep_labels: &[&str]) -> Result<DensityOp> {
        let mut keep = self.layout.indices_of(keep_labels)?;
        keep.sort_unstable();
        let dims = self.layout.dims();
        let mat = tensor::partial_trace(&self.mat, &dims, &keep)?;
        let kept: Vec<&str> = keep
            .iter()
            .map(|&i| self.layout.subsystems()[i].0.as_str())
            .collect();
        Ok(DensityOp {
            mat,
            layout: self.layout.restrict(&kept)?,
        })
    }

    /// Reorder subsystems to the given label order.
    pub fn reorder(&self, labels: &[&str]) -> Result<DensityOp> {
        if labels.len() != self.layout.subsystems().len() {
            return Err(Error::Layout("reorder must list every subsystem".into()));
        }
        let order = self.layout.indices_of(labels)?;
        let map = index_permutation(&self.layout, &order);
        let d = self.dim();
        let mut mat = CMat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                mat.set(i, j, self.mat.get(map[i], map[j]));
            }
        }
        Ok(DensityOp {
            mat,
            layout: self.layout.restrict(labels)?,
        })
    }

    /// Orthonormal eigenvectors with eigenvalue above the PSD cutoff.
    ///
    /// The count is the numerical rank; vectors are phase-normalized.
    pub fn support_basis(&self, tol: &Tolerances) -> Vec<Ket> {
        let (evals, evecs) = tensor::eigh(&self.mat, tol.herm)
            .expect("density operator is Hermitian by construction");
        evals
            .iter()
            .zip(evecs)
            .rev() // largest eigenvalue first
            .filter(|(e, _)| **e > tol.psd)
            .map(|(_, v)| Ket {
                vec: v,
                layout: self.layout.clone(),
            })
            .collect()
    }

    /// Eigenpairs above the PSD cutoff, largest eigenvalue first.
    pub fn spectral(&self, tol: &Tolerances) -> Vec<(f64, Ket)> {
        let (evals, evecs) = tensor::eigh(&self.mat, tol.herm)
            .expect("density operator is Hermitian by construction");
        evals
            .into_iter()
            .zip(evecs)
            .rev()
            .filter(|(e, _)| *e > tol.psd)
            .map(|(e, v)| {
                (
                    e,
                    Ket {
                        vec: v,
                        layout: self.layout.clone(),
                    },
                )
            })
            .collect()
    }
}

/// Pure-state descriptors {φ_j} with optional amplitudes or weight matrix.
///
/// Descriptor sets may be linearly dependent; rank computations always go
/// through the eigensolver with PSD truncation.
#[derive(Debug, Clone)]
pub struct DescriptorSet {
    descriptors: Vec<Ket>,
    amplitudes: Option<Vec<Complex64>>,
    weight_matrix: Option<CMat>,
}

impl DescriptorSet {
    /// Bare descriptor set (no amplitudes, no weights).
    pub fn new(descriptors: Vec<Ket>) -> Result<Self> {
        Self::check_descriptors(&descriptors)?;
        Ok(DescriptorSet {
            descriptors,
            amplitudes: None,
            weight_matrix: None,
        })
    }

    /// Descriptors with complex mixing amplitudes.
    ///
    /// For orthonormal descriptors Σ|μ_j|² must be 1; for general sets the
    /// normalization is enforced against the descriptor Gram at mix time.
    pub fn with_amplitudes(descriptors: Vec<Ket>, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::check_descriptors(&descriptors)?;
        if amplitudes.len() != descriptors.len() {
            return Err(Error::InvalidArgument(
                "amplitude count does not match descriptor count".into(),
            ));
        }
        if amplitudes.iter().all(|a| a.norm_sqr() == 0.0) {
            return Err(Error::InvalidArgument("all amplitudes vanish".into()));
        }
        Ok(DescriptorSet {
            descriptors,
            amplitudes: Some(amplitudes),
            weight_matrix: None,
        })
    }

    /// Descriptors with nonnegative mixing weights (diagonal weight matrix).
    pub fn with_weights(descriptors: Vec<Ket>, weights: Vec<f64>) -> Result<Self> {
        Self::check_descriptors(&descriptors)?;
        if weights.len() != descriptors.len() {
            return Err(Error::InvalidArgument(
                "weight count does not match descriptor count".into(),
            ));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidArgument("negative weight".into()));
        }
        let n = weights.len();
        let mut w = CMat::zeros(n, n);
        for (i, &wi) in weights.iter().enumerate() {
            w.set(i, i, Complex64::new(wi, 0.0));
        }
        Ok(DescriptorSet {
            descriptors,
            amplitudes: None,
            weight_matrix: Some(w),
        })
    }

    /// Descriptors with a full Hermitian weight matrix w_{tt'}.
    ///
    /// Requires Σ_{tt'} w_{tt'} ⟨φ_{t'}|φ_t⟩ = 1 (unit trace of the
    /// reconstructed operator).
    pub fn with_weight_matrix(descriptors: Vec<Ket>, w: CMat) -> Result<Self> {
        Self::check_descriptors(&descriptors)?;
        let tol = Tolerances::default();
        let n = descriptors.len();
        if !w.is_square() || w.rows() != n {
            return Err(Error::Layout(
                "weight matrix side does not match descriptor count".into(),
            ));
        }
        let defect = w.hermiticity_defect();
        if defect > tol.herm {
            return Err(Error::NotHermitian(defect));
        }
        let mut tr = Complex64::new(0.0, 0.0);
        for t in 0..n {
            for tp in 0..n {
                tr += w.get(t, tp) * descriptors[tp].inner(&descriptors[t]);
            }
        }
        if (tr.re - 1.0).abs() > tol.norm || tr.im.abs() > tol.norm {
            return Err(Error::NotNormalized(tr.re));
        }
        Ok(DescriptorSet {
            descriptors,
            amplitudes: None,
            weight_matrix: Some(w),
        })
    }

    fn check_descriptors(descriptors: &[Ket]) -> Result<()> {
        if descriptors.is_empty() {
            return Err(Error::InvalidArgument("empty descriptor set".into()));
        }
        let layout = descriptors[0].layout.clone();
        if descriptors.iter().any(|d| d.layout != layout) {
            return Err(Error::Layout("descriptors on mixed layouts".into()));
        }
        Ok(())
    }

    pub fn descriptors(&self) -> &[Ket] {
        &self.descriptors
    }

    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        self.amplitudes.as_deref()
    }

    pub fn weight_matrix(&self) -> Option<&CMat> {
        self.weight_matrix.as_ref()
    }

    /// Diagonal weights, if the set carries a diagonal weight matrix.
    pub fn weights(&self) -> Option<Vec<f64>> {
        let w = self.weight_matrix.as_ref()?;
        let n = w.rows();
        for i in 0..n {
            for j in 0..n {
                if i != j && w.get(i, j).norm() > 0.0 {
                    return None;
                }
            }
        }
        Some((0..n).map(|i| w.get(i, i).re).collect())
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }

    pub fn layout(&self) -> &SystemLayout {
        self.descriptors[0].layout()
    }

    /// Gram matrix of the descriptors.
    pub fn gram(&self) -> CMat {
        tensor::gram(&self.descriptors.iter().map(|d| d.vec.clone()).collect::<Vec<_>>())
            .expect("descriptor set is nonempty and dimension-consistent")
    }

    /// Numerical rank of the span.
    pub fn rank(&self, tol: &Tolerances) -> usize {
        tensor::psd_rank(&self.gram(), tol.psd, tol.herm)
            .expect("descriptor Gram is Hermitian by construction")
    }

    /// True iff the descriptors are linearly independent.
    pub fn linearly_independent(&self, tol: &Tolerances) -> bool {
        self.rank(tol) == self.len()
    }

    /// Orthonormal basis of the descriptor span (via Gram eigendecomposition).
    pub fn span_basis(&self, tol: &Tolerances) -> Vec<CVec> {
        let g = self.gram();
        let (evals, evecs) = tensor::eigh(&g, tol.herm).expect("Gram is Hermitian");
        let dim = self.descriptors[0].dim();
        let mut basis = Vec::new();
        for (e, u) in evals.iter().zip(&evecs) {
            if *e <= tol.psd {
                continue;
            }
            let inv_sqrt = 1.0 / e.sqrt();
            let mut q = CVec::zeros(dim);
            for (j, d) in self.descriptors.iter().enumerate() {
                q = q.add(&d.vec.scaled(u.entries()[j] * inv_sqrt));
            }
            basis.push(q);
        }
        basis
    }

    /// Indices of a maximal linearly independent subset, via pivoted
    /// orthogonalization of the descriptors.
    pub fn independent_subset(&self, tol: &Tolerances) -> Vec<usize> {
        let mut chosen: Vec<usize> = Vec::new();
        let mut ortho: Vec<CVec> = Vec::new();
        // Greedy pivoting: pick the descriptor with the largest residual
        // against the span of those already chosen.
        let mut remaining: Vec<usize> = (0..self.len()).collect();
        loop {
            let mut best: Option<(usize, f64, CVec)> = None;
            for (pos, &j) in remaining.iter().enumerate() {
                let mut r = self.descriptors[j].vec.clone();
                for q in &ortho {
                    let c = q.inner(&r);
                    r = r.sub(&q.scaled(c));
                }
                let n = r.norm();
                if best.as_ref().map_or(true, |(_, bn, _)| n > *bn) {
                    best = Some((pos, n, r));
                }
            }
            match best {
                Some((pos, n, r)) if n * n > tol.psd => {
                    chosen.push(remaining.remove(pos));
                    ortho.push(r.scaled(Complex64::new(1.0 / n, 0.0)));
                }
                _ => break,
            }
            if remaining.is_empty() {
                break;
            }
        }
        chosen.sort_unstable();
        chosen
    }
}

/// Span-membership residual threshold for [`described_by`]. This is a
/// subspace test, not a distinguishability verdict, so it is decoupled from
/// the classification tolerance and matches the steering residual guard.
pub(crate) const SPAN_TOL: f64 = 1e-7;

/// True iff the support of `rho` lies in the span of the descriptors.
pub fn described_by(rho: &DensityOp, d: &DescriptorSet, tol: &Tolerances) -> Result<bool> {
    if d.layout() != rho.layout() {
        return Err(Error::Layout(
            "descriptors on a different layout than the state".into(),
        ));
    }
    let basis = d.span_basis(tol);
    // Projector residual: ‖(I − P) v‖ for every support vector v.
    for v in rho.support_basis(tol) {
        let mut r = v.vec().clone();
        for q in &basis {
            let c = q.inner(&r);
            r = r.sub(&q.scaled(c));
        }
        if r.norm() > SPAN_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::tensor_product_vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qubit(label: &str) -> SystemLayout {
        SystemLayout::single(label, 2).unwrap()
    }

    fn plus(label: &str) -> Ket {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Ket::new(
            CVec::new(vec![c(s, 0.0), c(s, 0.0)]).unwrap(),
            qubit(label),
        )
        .unwrap()
    }

    #[test]
    fn layout_rejects_duplicates_and_zero_dims() {
        assert!(SystemLayout::new(vec![("S", 2), ("S", 3)]).is_err());
        assert!(SystemLayout::new(vec![("S", 0)]).is_err());
    }

    #[test]
    fn ket_rejects_unnormalized_and_wrong_dim() {
        let v = CVec::new(vec![c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(Ket::new(v, qubit("S")).is_err());
        let v = CVec::basis(3, 0);
        assert!(Ket::new(v, qubit("S")).is_err());
    }

    #[test]
    fn reorder_round_trip() {
        let layout = SystemLayout::new(vec![("A", 2), ("B", 3)]).unwrap();
        let a = CVec::basis(2, 1);
        let b = CVec::basis(3, 2);
        let psi = Ket::new(tensor_product_vec(&a, &b).unwrap(), layout).unwrap();
        let swapped = psi.reorder(&["B", "A"]).unwrap();
        // |1⟩⊗|2⟩ reordered is |2⟩⊗|1⟩ = basis 2·2+1 = 5 in dim 6.
        assert_eq!(swapped.vec(), &CVec::basis(6, 5));
        let back = swapped.reorder(&["A", "B"]).unwrap();
        assert_eq!(back.vec(), psi.vec());
    }

    #[test]
    fn density_reorder_consistent_with_ket_reorder() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let layout = SystemLayout::new(vec![("A", 2), ("B", 3)]).unwrap();
        let entries: Vec<Complex64> = (0..6)
            .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let psi = Ket::normalized(CVec::new(entries).unwrap(), layout).unwrap();
        let direct = psi.reorder(&["B", "A"]).unwrap().projector();
        let via_op = psi.projector().reorder(&["B", "A"]).unwrap();
        assert!(direct.mat().sub(via_op.mat()).max_norm() < 1e-12);
    }

    #[test]
    fn purity_examples() {
        let p = Ket::basis(qubit("S"), 0).projector();
        assert!((p.purity() - 1.0).abs() < 1e-12);
        let mixed = DensityOp::maximally_mixed(qubit("S"));
        assert!((mixed.purity() - 0.5).abs() < 1e-12);
        let mixed4 = DensityOp::maximally_mixed(SystemLayout::single("S", 4).unwrap());
        assert!((mixed4.purity() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn prob_examples() {
        let zero = Ket::basis(qubit("S"), 0);
        let one = Ket::basis(qubit("S"), 1);
        let rho = zero.projector();
        assert!((rho.prob(&zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(rho.prob(&one).unwrap() < 1e-12);
        let mixed = DensityOp::maximally_mixed(qubit("S"));
        assert!((mixed.prob(&plus("S")).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn prob_rejects_layout_mismatch() {
        let rho = Ket::basis(qubit("S"), 0).projector();
        let phi = Ket::basis(qubit("M"), 0);
        assert!(rho.prob(&phi).is_err());
    }

    #[test]
    fn prob_is_linear_in_rho() {
        let tol = Tolerances::default();
        let _ = tol;
        let rho1 = Ket::basis(qubit("S"), 0).projector();
        let rho2 = plus("S").projector();
        let phi = plus("S");
        for alpha in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let blended = DensityOp::new(
                rho1.mat()
                    .scaled(c(alpha, 0.0))
                    .add(&rho2.mat().scaled(c(1.0 - alpha, 0.0))),
                qubit("S"),
            )
            .unwrap();
            let lhs = blended.prob(&phi).unwrap();
            let rhs = alpha * rho1.prob(&phi).unwrap() + (1.0 - alpha) * rho2.prob(&phi).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn support_basis_examples() {
        let tol = Tolerances::default();
        let p = plus("S").projector();
        let basis = p.support_basis(&tol);
        assert_eq!(basis.len(), 1);
        // Phase convention: first nonzero entry real-nonnegative.
        assert!(basis[0].vec().entries()[0].im.abs() < 1e-12);
        assert!(basis[0].vec().entries()[0].re > 0.0);

        let layout = SystemLayout::single("S", 3).unwrap();
        let mut m = CMat::zeros(3, 3);
        m.set(0, 0, c(0.5, 0.0));
        m.set(1, 1, c(0.5, 0.0));
        let rho = DensityOp::new(m, layout).unwrap();
        let basis = rho.support_basis(&tol);
        assert_eq!(basis.len(), 2);
        for b in &basis {
            assert!(b.vec().entries()[2].norm() < 1e-12);
        }
    }

    #[test]
    fn density_op_rejects_invalid() {
        // Non-unit trace.
        assert!(DensityOp::new(CMat::identity(2), qubit("S")).is_err());
        // Non-Hermitian.
        let mut m = CMat::zeros(2, 2);
        m.set(0, 0, c(1.0, 0.0));
        m.set(0, 1, c(0.5, 0.0));
        assert!(DensityOp::new(m, qubit("S")).is_err());
        // Not PSD: Hermitian, unit trace, negative eigenvalue.
        let mut m = CMat::zeros(2, 2);
        m.set(0, 0, c(1.5, 0.0));
        m.set(1, 1, c(-0.5, 0.0));
        assert!(matches!(
            DensityOp::new(m, qubit("S")),
            Err(Error::NotPositive(_))
        ));
    }

    #[test]
    fn described_by_examples() {
        let tol = Tolerances::default();
        // |+⟩⟨+| is described by {|0⟩, |1⟩} (span is the whole space).
        let d = DescriptorSet::new(vec![Ket::basis(qubit("S"), 0), Ket::basis(qubit("S"), 1)])
            .unwrap();
        assert!(described_by(&plus("S").projector(), &d, &tol).unwrap());
        // I/2 is not described by {|0⟩} (rank exceeds span).
        let d0 = DescriptorSet::new(vec![Ket::basis(qubit("S"), 0)]).unwrap();
        assert!(!described_by(&DensityOp::maximally_mixed(qubit("S")), &d0, &tol).unwrap());
    }

    #[test]
    fn weight_matrix_unit_trace_enforced() {
        let kets = vec![Ket::basis(qubit("S"), 0), Ket::basis(qubit("S"), 1)];
        let mut w = CMat::zeros(2, 2);
        w.set(0, 0, c(0.5, 0.0));
        w.set(1, 1, c(0.5, 0.0));
        assert!(DescriptorSet::with_weight_matrix(kets.clone(), w).is_ok());
        let mut bad = CMat::zeros(2, 2);
        bad.set(0, 0, c(0.9, 0.0));
        bad.set(1, 1, c(0.5, 0.0));
        assert!(DescriptorSet::with_weight_matrix(kets, bad).is_err());
    }

    #[test]
    fn independent_subset_of_dependent_set() {
        let tol = Tolerances::default();
        let kets = vec![
            Ket::basis(qubit("S"), 0),
            Ket::basis(qubit("S"), 1),
            plus("S"), // dependent on the first two
        ];
        let d = DescriptorSet::new(kets).unwrap();
        assert!(!d.linearly_independent(&tol));
        assert_eq!(d.rank(&tol), 2);
        let subset = d.independent_subset(&tol);
        assert_eq!(subset.len(), 2);
    }
}
