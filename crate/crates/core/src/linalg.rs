//! Dense complex matrices, Hermitian spectral decomposition and spectral
//! matrix exponentials.
//!
//! The eigensolver works on the real symmetric embedding
//! `[[Re H, -Im H], [Im H, Re H]]`, in which every eigenvalue of `H` appears
//! twice. The projector onto an eigenspace of `H` is recovered from the real
//! projector `P` of the doubled eigenspace as `P11 + i P21`.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type C64 = Complex64;

/// Tolerance on `|H - H*|` accepted by [`HermitianMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Default eigenvalue clustering tolerance.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;
/// Default cap on the dimension produced by [`kron`].
pub const DEFAULT_MAX_DIM: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square: row {row} has {len} entries, expected {dim}")]
    NotSquare { dim: usize, row: usize, len: usize },
    #[error("matrix has dimension zero")]
    Empty,
    #[error("matrix has a non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("matrix is not Hermitian: max |H - H*| = {0:e}")]
    NotHermitian(f64),
    #[error("eigensolver failed to converge")]
    EigensolverFailure,
    #[error("dimension {dim} exceeds the configured maximum {max}")]
    DimensionOverflow { dim: usize, max: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// All-ones matrix `J`.
    pub fn ones(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![C64::new(1.0, 0.0); dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self, LinalgError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(LinalgError::Empty);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(LinalgError::NotSquare {
                    dim,
                    row: i,
                    len: row.len(),
                });
            }
            for (j, z) in row.iter().enumerate() {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(LinalgError::NonFinite(i, j));
                }
            }
            data.extend(row);
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn from_real_rows(rows: Vec<Vec<f64>>) -> Result<Self, LinalgError> {
        Self::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> impl Iterator<Item = &[C64]> {
        self.data.chunks(self.dim)
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in sub");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: C64, other: &Self) {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add_scaled");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch in matvec");
        self.rows()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖self - other‖_max`
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_abs_diff");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Permutes rows and columns: `out[(perm[i], perm[j])] = self[(i, j)]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.dim);
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(perm[i], perm[j])] = self[(i, j)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for row in self.rows() {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson {
            dim: self.dim,
            re: self.rows().map(|r| r.iter().map(|z| z.re).collect()).collect(),
            im: self.rows().map(|r| r.iter().map(|z| z.im).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = MatrixJson::deserialize(d)?;
        if raw.re.len() != raw.dim || raw.im.len() != raw.dim {
            return Err(D::Error::custom("row count does not match dim"));
        }
        let rows = raw
            .re
            .into_iter()
            .zip(raw.im)
            .map(|(re, im)| {
                if re.len() != im.len() {
                    return Err(D::Error::custom("re/im rows differ in length"));
                }
                Ok(re.into_iter().zip(im).map(|(a, b)| C64::new(a, b)).collect())
            })
            .collect::<Result<Vec<Vec<C64>>, D::Error>>()?;
        ComplexMatrix::from_rows(rows).map_err(D::Error::custom)
    }
}

/// A complex matrix equal to its conjugate transpose, with an exactly real
/// diagonal.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    /// Validates against [`HERMITIAN_TOL`] and symmetrizes.
    pub fn new(m: ComplexMatrix) -> Result<Self, LinalgError> {
        Self::with_tolerance(m, HERMITIAN_TOL)
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self, LinalgError> {
        let defect = m.hermitian_defect();
        if defect > tol {
            return Err(LinalgError::NotHermitian(defect));
        }
        let half = C64::new(0.5, 0.0);
        let mut sym = m.add(&m.adjoint()).scale(half);
        for i in 0..sym.dim() {
            sym[(i, i)].im = 0.0;
        }
        Ok(HermitianMatrix { inner: sym })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    pub fn is_zero_diagonal(&self) -> bool {
        (0..self.dim()).all(|i| self.inner[(i, i)].re == 0.0)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        HermitianMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// Builds a validated Hermitian matrix from nested rows.
pub fn hermitian_from_entries(entries: Vec<Vec<C64>>) -> Result<HermitianMatrix, LinalgError> {
    HermitianMatrix::new(ComplexMatrix::from_rows(entries)?)
}

/// Two neighbouring clusters whose gap is within `10 * cluster_tol`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterAmbiguity {
    pub lower: usize,
    pub upper: usize,
    pub gap: f64,
}

/// `H = Σ θ_r E_r` over the distinct eigenvalues θ_1 < … < θ_d.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
    multiplicities: Vec<usize>,
    cluster_tol: f64,
    ambiguities: Vec<ClusterAmbiguity>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn projector(&self, r: usize) -> &ComplexMatrix {
        &self.projectors[r]
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    /// Pairs of clusters that were separated but lie closer than
    /// `10 * cluster_tol`.
    pub fn ambiguities(&self) -> &[ClusterAmbiguity] {
        &self.ambiguities
    }

    pub fn dim(&self) -> usize {
        self.projectors.first().map_or(0, |p| p.dim())
    }

    pub fn num_distinct(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues repeated by multiplicity, ascending.
    pub fn eigenvalue_multiset(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&v, &k)| std::iter::repeat_n(v, k))
            .collect()
    }

    pub fn min_gap(&self) -> Option<f64> {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .min_by(|a, b| a.total_cmp(b))
    }

    /// `Σ θ_r E_r`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim());
        for (theta, e) in self.eigenvalues.iter().zip(&self.projectors) {
            out.add_scaled(C64::new(*theta, 0.0), e);
        }
        out
    }

    /// Largest violation of `E_r E_s = δ_rs E_r` and of `Σ E_r = I`.
    pub fn projector_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        let mut sum = ComplexMatrix::zeros(n);
        for (r, er) in self.projectors.iter().enumerate() {
            sum.add_scaled(C64::new(1.0, 0.0), er);
            for (s, es) in self.projectors.iter().enumerate() {
                let prod = er.matmul(es);
                let d = if r == s {
                    prod.max_abs_diff(er)
                } else {
                    prod.max_abs()
                };
                worst = worst.max(d);
            }
        }
        worst.max(sum.max_abs_diff(&ComplexMatrix::identity(n)))
    }

    /// `U(t)_{row, col} = Σ e^{-itθ_r} (E_r)_{row, col}`
    pub fn amplitude(&self, row: usize, col: usize, t: f64) -> C64 {
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .map(|(theta, e)| C64::from_polar(1.0, -t * theta) * e[(row, col)])
            .sum()
    }
}

/// Eigendecomposition of `h` with eigenvalues merged when they lie within
/// `cluster_tol` of their neighbour.
pub fn spectral_decomposition(
    h: &HermitianMatrix,
    cluster_tol: f64,
) -> Result<SpectralDecomposition, LinalgError> {
    let n = h.dim();
    let m = h.matrix();
    let embed = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, ii) = (i / n, i % n);
        let (bj, jj) = (j / n, j % n);
        let z = m[(ii, jj)];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    let eig =
        SymmetricEigen::try_new(embed, 1e-15, 10_000).ok_or(LinalgError::EigensolverFailure)?;
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &idx in &order {
        let v = eig.eigenvalues[idx];
        if !v.is_finite() {
            return Err(LinalgError::EigensolverFailure);
        }
        match clusters.last_mut() {
            Some(c) if v - last <= cluster_tol => c.push(idx),
            _ => clusters.push(vec![idx]),
        }
        last = v;
    }

    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut projectors = Vec::with_capacity(clusters.len());
    let mut multiplicities = Vec::with_capacity(clusters.len());
    for cluster in &clusters {
        let mean = cluster.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / cluster.len() as f64;
        let mut e = ComplexMatrix::zeros(n);
        for &c in cluster {
            let w = eig.eigenvectors.column(c);
            for i in 0..n {
                for j in 0..n {
                    // top-left block of w wᵀ is Re E, bottom-left is Im E
                    e[(i, j)] += C64::new(w[i] * w[j], w[n + i] * w[j]);
                }
            }
        }
        let mult = e.trace().re.round().max(1.0) as usize;
        eigenvalues.push(mean);
        projectors.push(e);
        multiplicities.push(mult);
    }

    let ambiguities = eigenvalues
        .windows(2)
        .enumerate()
        .filter_map(|(r, w)| {
            let gap = w[1] - w[0];
            (gap <= 10.0 * cluster_tol).then_some(ClusterAmbiguity {
                lower: r,
                upper: r + 1,
                gap,
            })
        })
        .collect();

    Ok(SpectralDecomposition {
        eigenvalues,
        projectors,
        multiplicities,
        cluster_tol,
        ambiguities,
    })
}

/// Inverse by LU decomposition; `None` when numerically singular.
pub fn inverse(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = m.dim();
    let a = DMatrix::<C64>::from_fn(n, n, |i, j| m[(i, j)]);
    let inv = a.try_inverse()?;
    let out = ComplexMatrix::from_fn(n, |i, j| inv[(i, j)]);
    out.max_abs().is_finite().then_some(out)
}

/// `U(t) = Σ e^{-itθ_r} E_r`
pub fn transition_matrix(dec: &SpectralDecomposition, t: f64) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(dec.dim());
    for (theta, e) in dec.eigenvalues.iter().zip(&dec.projectors) {
        u.add_scaled(C64::from_polar(1.0, -t * theta), e);
    }
    u
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    kron_with_limit(a, b, DEFAULT_MAX_DIM)
}

pub fn kron_with_limit(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    max_dim: usize,
) -> Result<ComplexMatrix, LinalgError> {
    let (na, nb) = (a.dim(), b.dim());
    let dim = na
        .checked_mul(nb)
        .filter(|&d| d <= max_dim)
        .ok_or(LinalgError::DimensionOverflow {
            dim: na.saturating_mul(nb),
            max: max_dim,
        })?;
    Ok(ComplexMatrix::from_fn(dim, |i, j| {
        a[(i / nb, j / nb)] * b[(i % nb, j % nb)]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn oriented_k3() -> HermitianMatrix {
        let i = c(0.0, 1.0);
        let z = c(0.0, 0.0);
        hermitian_from_entries(vec![vec![z, -i, i], vec![i, z, -i], vec![-i, i, z]]).unwrap()
    }

    #[test]
    fn accepts_oriented_k2() {
        let h = hermitian_from_entries(vec![
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(h.dim(), 2);
    }

    #[test]
    fn accepts_single_zero() {
        let h = hermitian_from_entries(vec![vec![c(0.0, 0.0)]]).unwrap();
        let dec = spectral_decomposition(&h, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(dec.eigenvalues(), &[0.0]);
    }

    #[test]
    fn rejects_asymmetric() {
        let err = hermitian_from_entries(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap_err();
        assert!(matches!(err, LinalgError::NotHermitian(_)));
    }

    #[test]
    fn rejects_ragged() {
        let err =
            hermitian_from_entries(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0)]])
                .unwrap_err();
        assert!(matches!(err, LinalgError::NotSquare { .. }));
    }

    #[test]
    fn symmetrizes_small_noise() {
        let h = hermitian_from_entries(vec![
            vec![c(1.0, 1e-14), c(1.0, 1e-13)],
            vec![c(1.0, -1e-13 + 1e-14), c(0.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(h.matrix()[(0, 0)].im, 0.0);
        assert_eq!(h.matrix().hermitian_defect(), 0.0);
    }

    #[test]
    fn oriented_k3_spectrum() {
        let dec = spectral_decomposition(&oriented_k3(), DEFAULT_CLUSTER_TOL).unwrap();
        let s3 = 3f64.sqrt();
        let ev = dec.eigenvalues();
        assert_eq!(ev.len(), 3);
        for (got, want) in ev.iter().zip([-s3, 0.0, s3]) {
            assert!((got - want).abs() < 1e-12);
        }
        for e in dec.projectors() {
            for a in 0..3 {
                assert!((e[(a, a)] - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
            }
        }
        assert!(dec.projector_defect() < 1e-12);
    }

    #[test]
    fn zero_matrix_single_projector() {
        let h = HermitianMatrix::new(ComplexMatrix::zeros(4)).unwrap();
        let dec = spectral_decomposition(&h, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(dec.num_distinct(), 1);
        assert_eq!(dec.multiplicities(), &[4]);
        assert!(dec.projector(0).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-14);
    }

    #[test]
    fn real_quadratic_roots() {
        // roots of t^2 - πt - 1
        let h = HermitianMatrix::new(
            ComplexMatrix::from_real_rows(vec![vec![PI, 1.0], vec![1.0, 0.0]]).unwrap(),
        )
        .unwrap();
        let dec = spectral_decomposition(&h, DEFAULT_CLUSTER_TOL).unwrap();
        let disc = (PI * PI + 4.0).sqrt();
        let lo = (PI - disc) / 2.0;
        let hi = (PI + disc) / 2.0;
        assert!((dec.eigenvalues()[0] - lo).abs() < 1e-10);
        assert!((dec.eigenvalues()[1] - hi).abs() < 1e-10);
    }

    #[test]
    fn flags_near_degenerate_clusters() {
        let h = HermitianMatrix::new(ComplexMatrix::diagonal(&[c(0.0, 0.0), c(5e-8, 0.0)]))
            .unwrap();
        let dec = spectral_decomposition(&h, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(dec.num_distinct(), 2);
        assert_eq!(dec.ambiguities().len(), 1);
    }

    #[test]
    fn transition_at_zero_is_identity() {
        let dec = spectral_decomposition(&oriented_k3(), DEFAULT_CLUSTER_TOL).unwrap();
        let u = transition_matrix(&dec, 0.0);
        assert!(u.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn k2_closed_form() {
        let h = hermitian_from_entries(vec![
            vec![c(0.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let dec = spectral_decomposition(&h, DEFAULT_CLUSTER_TOL).unwrap();
        for &t in &[0.3, PI / 2.0, 2.0] {
            let want = ComplexMatrix::identity(2)
                .scale(c(t.cos(), 0.0))
                .sub(&h.matrix().scale(c(0.0, t.sin())));
            assert!(transition_matrix(&dec, t).max_abs_diff(&want) < 1e-12);
        }
        let u = transition_matrix(&dec, PI / 2.0);
        assert!((u[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kron_examples() {
        let i6 = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3)).unwrap();
        assert_eq!(i6, ComplexMatrix::identity(6));
        let x = ComplexMatrix::from_real_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let two = ComplexMatrix::from_real_rows(vec![vec![2.0]]).unwrap();
        let k = kron(&x, &two).unwrap();
        assert_eq!(
            k,
            ComplexMatrix::from_real_rows(vec![vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap()
        );
    }

    #[test]
    fn kron_overflow() {
        let a = ComplexMatrix::identity(65);
        let err = kron(&a, &a).unwrap_err();
        assert!(matches!(err, LinalgError::DimensionOverflow { dim: 4225, .. }));
    }

    #[test]
    fn json_layout() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let js = serde_json::to_value(&m).unwrap();
        assert_eq!(js["dim"], 2);
        assert_eq!(js["im"][0][1], -1.0);
        let back: ComplexMatrix = serde_json::from_value(js).unwrap();
        assert_eq!(back, m);
    }
}
