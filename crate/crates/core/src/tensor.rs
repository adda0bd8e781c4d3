//! Self-contained dense complex linear-algebra kernel.
//!
//! Provides the primitives everything else is built on: Kronecker products,
//! partial traces, Hermitian eigendecomposition (cyclic Jacobi), Schmidt
//! decomposition of bipartite vectors, and Gram matrix construction /
//! realization via pivoted Cholesky.
//!
//! All values are immutable after construction and all operations are pure.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::{Tolerances, MAX_DIM};

/// Convergence threshold for the Jacobi eigensolver, relative to the
/// Frobenius norm of the input.
const JACOBI_EPS: f64 = 1e-30;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Cutoff on Gram-factor eigenvalues (squared singular values) below which a
/// Schmidt component is treated as zero. Unit-norm inputs have eigenvalues
/// in [0, 1], so this is an absolute threshold well above eigensolver noise.
const SV_CUTOFF: f64 = 1e-12;

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVec {
    entries: Vec<Complex64>,
}

impl CVec {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("empty vector".into()));
        }
        if entries.len() > MAX_DIM {
            return Err(Error::DimensionLimit(entries.len(), MAX_DIM));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CVec { entries })
    }

    /// Computational basis vector `|k⟩` in the given dimension.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut entries = vec![Complex64::new(0.0, 0.0); dim];
        entries[k] = Complex64::new(1.0, 0.0);
        CVec { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        CVec {
            entries: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inner product ⟨self|other⟩ (conjugate-linear in `self`).
    pub fn inner(&self, other: &CVec) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, factor: Complex64) -> CVec {
        CVec {
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &CVec) -> CVec {
        assert_eq!(self.dim(), other.dim());
        CVec {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CVec) -> CVec {
        assert_eq!(self.dim(), other.dim());
        CVec {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn normalized(&self) -> Result<CVec> {
        let n = self.norm();
        if n <= 0.0 {
            return Err(Error::NotNormalized(n));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    /// Multiply by the phase that makes the first nonzero entry real-nonnegative.
    pub fn phase_normalized(&self) -> CVec {
        for z in &self.entries {
            if z.norm() > 1e-14 {
                let phase = z.conj() / z.norm();
                return self.scaled(phase);
            }
        }
        self.clone()
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    entries: Vec<Complex64>,
    rows: usize,
    cols: usize,
}

impl CMat {
    pub fn new(entries: Vec<Complex64>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::Layout(format!(
                "matrix shape {rows}x{cols} does not match {} entries",
                entries.len()
            )));
        }
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(Error::DimensionLimit(rows.max(cols), MAX_DIM));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMat { entries, rows, cols })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
            rows,
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        CMat { entries, rows, cols }
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &CVec, b: &CVec) -> Self {
        CMat::from_fn(a.dim(), b.dim(), |i, j| a.entries[i] * b.entries[j].conj())
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &CVec) -> CVec {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        let mut out = CVec::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.get(i, j) * v.entries[j];
            }
            out.entries[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn scaled(&self, factor: Complex64) -> CMat {
        CMat {
            entries: self.entries.iter().map(|z| z * factor).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_defect() <= tol
    }

    /// Max-norm (largest entry modulus).
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Exactly Hermitian part (H + H†)/2.
    fn hermitian_part(&self) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }
}

/// Kronecker product of vectors; ‖a⊗b‖ = ‖a‖·‖b‖.
pub fn tensor_product_vec(a: &CVec, b: &CVec) -> Result<CVec> {
    let dim = a
        .dim()
        .checked_mul(b.dim())
        .filter(|&d| d <= MAX_DIM)
        .ok_or(Error::DimensionLimit(a.dim().saturating_mul(b.dim()), MAX_DIM))?;
    let mut entries = Vec::with_capacity(dim);
    for x in a.entries() {
        for y in b.entries() {
            entries.push(x * y);
        }
    }
    Ok(CVec { entries })
}

/// Kronecker product of matrices.
pub fn tensor_product_mat(a: &CMat, b: &CMat) -> Result<CMat> {
    let rows = a
        .rows
        .checked_mul(b.rows)
        .filter(|&d| d <= MAX_DIM)
        .ok_or(Error::DimensionLimit(a.rows.saturating_mul(b.rows), MAX_DIM))?;
    let cols = a
        .cols
        .checked_mul(b.cols)
        .filter(|&d| d <= MAX_DIM)
        .ok_or(Error::DimensionLimit(a.cols.saturating_mul(b.cols), MAX_DIM))?;
    let mut out = CMat::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a.get(i, j);
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out.set(i * b.rows + k, j * b.cols + l, aij * b.get(k, l));
                }
            }
        }
    }
    Ok(out)
}

/// Partial trace of a multipartite operator.
///
/// `dims` gives the subsystem dimensions in tensor order; `keep` the
/// (strictly increasing is not required) subsystem indices to retain.
/// The result is ordered by the original subsystem order restricted to `keep`.
pub fn partial_trace(rho: &CMat, dims: &[usize], keep: &[usize]) -> Result<CMat> {
    let total: usize = dims.iter().product();
    if !rho.is_square() || rho.rows() != total {
        return Err(Error::Layout(format!(
            "operator side {} does not match subsystem dims product {}",
            rho.rows(),
            total
        )));
    }
    if keep.is_empty() {
        return Err(Error::InvalidArgument("keep set must be nonempty".into()));
    }
    let mut keep_sorted: Vec<usize> = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidArgument("invalid keep index set".into()));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep_sorted.contains(i)).collect();
    let keep_dims: Vec<usize> = keep_sorted.iter().map(|&i| dims[i]).collect();
    let trace_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let out_dim: usize = keep_dims.iter().product();
    let trace_total: usize = trace_dims.iter().product();

    // Strides of each subsystem in the flat index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }

    let flat_index = |kept_multi: &[usize], traced_multi: &[usize]| -> usize {
        let mut idx = 0;
        for (pos, &sub) in keep_sorted.iter().enumerate() {
            idx += kept_multi[pos] * strides[sub];
        }
        for (pos, &sub) in traced.iter().enumerate() {
            idx += traced_multi[pos] * strides[sub];
        }
        idx
    };

    let unrank = |mut r: usize, shape: &[usize]| -> Vec<usize> {
        let mut multi = vec![0usize; shape.len()];
        for i in (0..shape.len()).rev() {
            multi[i] = r % shape[i];
            r /= shape[i];
        }
        multi
    };

    let mut out = CMat::zeros(out_dim, out_dim);
    for i in 0..out_dim {
        let im = unrank(i, &keep_dims);
        for j in 0..out_dim {
            let jm = unrank(j, &keep_dims);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..trace_total {
                let tm = unrank(t, &trace_dims);
                acc += rho.get(flat_index(&im, &tm), flat_index(&jm, &tm));
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and matching orthonormal
/// eigenvectors, each phase-normalized so its first nonzero entry is
/// real-nonnegative.
pub fn eigh(h: &CMat, herm_tol: f64) -> Result<(Vec<f64>, Vec<CVec>)> {
    if !h.is_square() {
        return Err(Error::Layout("eigh requires a square matrix".into()));
    }
    let defect = h.hermiticity_defect();
    if defect > herm_tol {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = CMat::identity(n);
    let scale2 = a.fro_norm().powi(2).max(f64::MIN_POSITIVE);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).norm_sqr();
            }
        }
        if off <= JACOBI_EPS * scale2 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let beta = apq.norm();
                if beta * beta <= JACOBI_EPS * scale2 / (n * n) as f64 {
                    continue;
                }
                let u = apq / beta; // phase of the off-diagonal entry
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (aqq - app) / (2.0 * beta);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Unitary G: G[p][p]=c, G[p][q]=s·u, G[q][p]=−s·conj(u), G[q][q]=c.
                // A ← G† A G, V ← V G.
                let gpp = Complex64::new(c, 0.0);
                let gpq = u * s;
                let gqp = -u.conj() * s;
                let gqq = Complex64::new(c, 0.0);

                // Column update: A ← A G.
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * gpp + aiq * gqp);
                    a.set(i, q, aip * gpq + aiq * gqq);
                }
                // Row update: A ← G† A.
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, gpp.conj() * apj + gqp.conj() * aqj);
                    a.set(q, j, gpq.conj() * apj + gqq.conj() * aqj);
                }
                // Accumulate eigenvectors: V ← V G.
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * gpp + viq * gqp);
                    v.set(i, q, vip * gpq + viq * gqq);
                }
                // Re-symmetrize the rotated pair against roundoff drift.
                a.set(p, q, a.get(q, p).conj());
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors: Vec<CVec> = order
        .iter()
        .map(|&k| {
            let col = CVec {
                entries: (0..n).map(|i| v.get(i, k)).collect(),
            };
            col.phase_normalized()
        })
        .collect();
    Ok((eigenvalues, eigenvectors))
}

/// Schmidt decomposition of a bipartite unit vector.
#[derive(Debug, Clone)]
pub struct Schmidt {
    /// Nonzero Schmidt coefficients, descending; Σ c² = 1.
    pub coeffs: Vec<f64>,
    /// Orthonormal left vectors (dimension `d_a`).
    pub left: Vec<CVec>,
    /// Orthonormal right vectors (dimension `d_b`).
    pub right: Vec<CVec>,
}

/// Schmidt decomposition of `psi` over the split `dims = (d_a, d_b)`.
///
/// `psi` must be normalized within `norm_tol`. The reconstruction
/// Σ c_k |l_k⟩⊗|r_k⟩ equals `psi` exactly (the left vectors carry the
/// phase convention; right vectors absorb the compensating phase).
pub fn schmidt(psi: &CVec, dims: (usize, usize), norm_tol: f64) -> Result<Schmidt> {
    let (da, db) = dims;
    if da * db != psi.dim() {
        return Err(Error::Layout(format!(
            "split {da}x{db} does not match vector dimension {}",
            psi.dim()
        )));
    }
    let n = psi.norm();
    if (n - 1.0).abs() > norm_tol {
        return Err(Error::NotNormalized(n));
    }

    // Amplitude matrix M with M[a][b] = psi[a·db + b].
    let m = CMat::from_fn(da, db, |a, b| psi.entries[a * db + b]);

    // Eigendecompose the smaller Gram factor for accuracy.
    let (coeffs, left, right) = if da <= db {
        let k = m.mul(&m.adjoint()); // da × da, Hermitian PSD
        let (evals, evecs) = eigh(&k, 1e-9)?;
        let mut triples = Vec::new();
        let madj = m.adjoint();
        for (e, u) in evals.iter().zip(evecs.iter()).rev() {
            if e.max(0.0) <= SV_CUTOFF {
                continue;
            }
            let sigma = e.sqrt();
            // M†u = σ v; the right factor of the product decomposition is
            // conj(v) so that Σ σ l⊗r reconstructs psi entrywise.
            let v = madj.mul_vec(u).scaled(Complex64::new(1.0 / sigma, 0.0));
            let r = CVec {
                entries: v.entries().iter().map(|z| z.conj()).collect(),
            };
            triples.push((sigma, u.clone(), r));
        }
        split_triples(triples)
    } else {
        let k = m.adjoint().mul(&m); // db × db
        let (evals, evecs) = eigh(&k, 1e-9)?;
        let mut triples = Vec::new();
        for (e, w) in evals.iter().zip(evecs.iter()).rev() {
            if e.max(0.0) <= SV_CUTOFF {
                continue;
            }
            let sigma = e.sqrt();
            // Right vector is conj(w) so that Σ σ l⊗r reconstructs psi.
            let r = CVec {
                entries: w.entries().iter().map(|z| z.conj()).collect(),
            };
            let l = m
                .mul_vec(&CVec {
                    entries: w.entries().to_vec(),
                })
                .scaled(Complex64::new(1.0 / sigma, 0.0));
            triples.push((sigma, l, r));
        }
        split_triples(triples)
    };

    // Phase convention on left vectors, compensated into the right vectors so
    // the reconstruction is exact.
    let mut left_out = Vec::with_capacity(left.len());
    let mut right_out = Vec::with_capacity(right.len());
    for (l, r) in left.iter().zip(right.iter()) {
        let mut phase = Complex64::new(1.0, 0.0);
        for z in l.entries() {
            if z.norm() > 1e-14 {
                phase = z.conj() / z.norm();
                break;
            }
        }
        left_out.push(l.scaled(phase));
        right_out.push(r.scaled(phase.conj()));
    }

    Ok(Schmidt {
        coeffs,
        left: left_out,
        right: right_out,
    })
}

fn split_triples(triples: Vec<(f64, CVec, CVec)>) -> (Vec<f64>, Vec<CVec>, Vec<CVec>) {
    let mut coeffs = Vec::with_capacity(triples.len());
    let mut left = Vec::with_capacity(triples.len());
    let mut right = Vec::with_capacity(triples.len());
    for (c, l, r) in triples {
        coeffs.push(c);
        left.push(l);
        right.push(r);
    }
    (coeffs, left, right)
}

/// Gram matrix G with G[j][k] = ⟨v_j|v_k⟩.
pub fn gram(vectors: &[CVec]) -> Result<CMat> {
    if vectors.is_empty() {
        return Err(Error::InvalidArgument("gram of empty vector list".into()));
    }
    let dim = vectors[0].dim();
    if vectors.iter().any(|v| v.dim() != dim) {
        return Err(Error::Layout("gram vectors have mixed dimensions".into()));
    }
    Ok(CMat::from_fn(vectors.len(), vectors.len(), |j, k| {
        vectors[j].inner(&vectors[k])
    }))
}

/// Synthesize unit vectors whose Gram matrix equals `g`.
///
/// `g` must be Hermitian PSD with unit diagonal. Uses pivoted Cholesky with
/// rank truncation at the PSD tolerance, so rank-deficient (e.g. collinear)
/// specifications are handled exactly. The vectors live in dimension
/// `max(rank(g), min_dim)`.
pub fn gram_realize(g: &CMat, min_dim: Option<usize>, tol: &Tolerances) -> Result<Vec<CVec>> {
    if !g.is_square() {
        return Err(Error::InvalidGram("matrix is not square".into()));
    }
    let n = g.rows();
    let defect = g.hermiticity_defect();
    if defect > tol.herm {
        return Err(Error::InvalidGram(format!(
            "not Hermitian (defect {defect:.3e})"
        )));
    }
    for i in 0..n {
        if (g.get(i, i).re - 1.0).abs() > tol.norm || g.get(i, i).im.abs() > tol.norm {
            return Err(Error::InvalidGram(format!(
                "diagonal entry {i} is {} (expected 1)",
                g.get(i, i)
            )));
        }
    }
    let (evals, _) = eigh(g, tol.herm)?;
    if let Some(&min_eig) = evals.first() {
        if min_eig < -tol.psd {
            return Err(Error::InvalidGram(format!(
                "not positive semidefinite (min eigenvalue {min_eig:.3e})"
            )));
        }
    }

    // Pivoted Cholesky: P G Pᵀ ≈ L L†, columns computed in pivot order.
    let work = g.hermitian_part();
    let mut l = CMat::zeros(n, n); // row index is the *original* vector index
    let mut d: Vec<f64> = (0..n).map(|i| work.get(i, i).re).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rank = 0usize;

    for k in 0..n {
        // Pick the largest remaining diagonal.
        let (rel, &piv) = perm[k..]
            .iter()
            .enumerate()
            .max_by(|a, b| d[*a.1].partial_cmp(&d[*b.1]).unwrap())
            .unwrap();
        if d[piv] <= tol.psd {
            break;
        }
        perm.swap(k, k + rel);
        let p = perm[k];
        let pivot = d[p].sqrt();
        l.set(p, k, Complex64::new(pivot, 0.0));
        for &i in &perm[k + 1..] {
            let mut val = work.get(i, p);
            for m in 0..k {
                val -= l.get(i, m) * l.get(p, m).conj();
            }
            let lik = val / pivot;
            l.set(i, k, lik);
            d[i] -= lik.norm_sqr();
        }
        rank = k + 1;
    }

    let dim = rank.max(min_dim.unwrap_or(0)).max(1);
    let vectors = (0..n)
        .map(|j| {
            let mut entries = vec![Complex64::new(0.0, 0.0); dim];
            for (m, e) in entries.iter_mut().enumerate().take(rank) {
                // v_j[m] = conj(L[j][m]) so that ⟨v_j|v_k⟩ = (L L†)[j][k].
                *e = l.get(j, m).conj();
            }
            CVec { entries }
        })
        .collect();
    Ok(vectors)
}

/// Numerical rank of a Hermitian PSD matrix: eigenvalues above `cutoff`.
pub fn psd_rank(h: &CMat, cutoff: f64, herm_tol: f64) -> Result<usize> {
    let (evals, _) = eigh(h, herm_tol)?;
    Ok(evals.iter().filter(|&&e| e > cutoff).count())
}
