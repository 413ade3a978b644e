//! Builders for the graph families: oriented graphs and hypercube
//! orientations, the C4-tensor family, UPST circulants, rooted star and
//! looped-path products, and the one-way transfer matrices.
//!
//! Vertex orders differ between the two rooted products. The star product is
//! base-major (`vertex·(m+1) + position`, root at position 0); the looped-path
//! product is position-major (`position·n + vertex`, looped end at position 0,
//! root at position `m-1`).

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::{
    inverse, kron, spectral_decomposition, ComplexMatrix, HermitianMatrix, LinalgError, C64,
    DEFAULT_CLUSTER_TOL,
};
use crate::number::Surd;

/// Distance from an odd integer tolerated in the C4-tensor precondition.
pub const ODD_INTEGER_TOL: f64 = 1e-8;
/// Agreement required between the two assemblies of the one-way matrices.
pub const ASSEMBLY_TOL: f64 = 1e-10;
pub const CIRCULANT_TOL: f64 = 1e-10;
/// Largest hypercube dimension `2m+1` accepted.
pub const MAX_CUBE_DIM: u32 = 11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("arc ({0}, {0}) is a loop")]
    SelfArc(usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("more than one arc on the pair {{{0}, {1}}}")]
    DuplicatePair(usize, usize),
    #[error("eigenvalue {0} is not an odd integer")]
    SpectrumNotOddInteger(f64),
    #[error("h = {h} is not coprime to n = {n}")]
    NonCoprime { h: i64, n: usize },
    #[error("θ_{0} = θ_{1}; eigenvalues must be distinct")]
    DuplicateEigenvalue(usize, usize),
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix is not circulant at ({row}, {col}) (defect {defect:e})")]
    NotCirculant { row: usize, col: usize, defect: f64 },
    #[error("P·D·P⁻¹ and the closed form differ by {0:e}")]
    AssemblyMismatch(f64),
    #[error("P·D·P⁻¹ is not Hermitian (defect {0:e})")]
    NonHermitianResult(f64),
    #[error("diagonalizer is singular")]
    SingularMatrix,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Simple digraph with at most one arc per unordered pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedGraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl OrientedGraph {
    pub fn new(
        n: usize,
        arcs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ConstructionError> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for (a, b) in arcs {
            for v in [a, b] {
                if v >= n {
                    return Err(ConstructionError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(ConstructionError::SelfArc(a));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(ConstructionError::DuplicatePair(a, b));
            }
            out.push((a, b));
        }
        Ok(OrientedGraph { n, arcs: out })
    }

    /// Orients `edges` forwards, reversing edge `k` when bit `k` of `mask` is set.
    pub fn from_orientation_mask(
        n: usize,
        edges: &[(usize, usize)],
        mask: u64,
    ) -> Result<Self, ConstructionError> {
        OrientedGraph::new(
            n,
            edges.iter().enumerate().map(|(k, &(a, b))| {
                if mask >> k & 1 == 1 {
                    (b, a)
                } else {
                    (a, b)
                }
            }),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }
}

/// `H_{a,b} = i` for an arc `a → b`, `-i` for `b → a`.
pub fn oriented_to_hermitian(g: &OrientedGraph) -> HermitianMatrix {
    let mut h = ComplexMatrix::zeros(g.n());
    for &(a, b) in g.arcs() {
        h[(a, b)] = I;
        h[(b, a)] = -I;
    }
    HermitianMatrix::new(h).expect("oriented matrices are Hermitian")
}

/// The oriented triangle with matrix `[[0,-i,i],[i,0,-i],[-i,i,0]]`.
pub fn oriented_k3() -> OrientedGraph {
    OrientedGraph::new(3, [(0, 2), (2, 1), (1, 0)]).expect("valid triangle")
}

/// `(2m+1)`-cube with every edge oriented from even to odd Hamming weight.
pub fn oriented_hypercube(m: u32) -> Result<OrientedGraph, ConstructionError> {
    let d = 2 * m + 1;
    if d > MAX_CUBE_DIM {
        return Err(ConstructionError::InvalidParameter(format!(
            "cube dimension {d} exceeds {MAX_CUBE_DIM}"
        )));
    }
    let n = 1usize << d;
    let arcs = (0..n)
        .filter(|u| u.count_ones() % 2 == 0)
        .flat_map(|u| (0..d).map(move |k| (u, u ^ (1 << k))));
    OrientedGraph::new(n, arcs)
}

/// Distinct eigenvalues `2k - (2m+1)` of the oriented `(2m+1)`-cube.
pub fn hypercube_spectrum(m: u32) -> Vec<Surd> {
    let d = 2 * m as i64 + 1;
    (0..=d).map(|k| Surd::integer(2 * k - d)).collect()
}

/// Matrix of the directed 4-cycle.
pub fn h_c4() -> ComplexMatrix {
    let z = c(0.0, 0.0);
    ComplexMatrix::from_rows(vec![
        vec![z, -I, z, I],
        vec![I, z, -I, z],
        vec![z, I, z, -I],
        vec![-I, z, I, z],
    ])
    .expect("square")
}

/// `e^{-i(π/4)(H_C4 + θJ₄)}` for odd `θ`: a signed 4-cycle permutation.
pub fn c4_signed_shift() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    for k in 0..4 {
        m[(k, (k + 1) % 4)] = c(-1.0, 0.0);
    }
    m
}

fn nearest_odd(x: f64) -> f64 {
    2.0 * ((x - 1.0) / 2.0).round() + 1.0
}

/// `H_Y = I_n ⊗ H_C4 + H_X ⊗ J₄`; requires an odd-integer spectrum.
pub fn c4_tensor_construction(hx: &HermitianMatrix) -> Result<HermitianMatrix, ConstructionError> {
    let dec = spectral_decomposition(hx, DEFAULT_CLUSTER_TOL)?;
    if let Some(&bad) = dec
        .eigenvalues()
        .iter()
        .find(|&&t| (t - nearest_odd(t)).abs() > ODD_INTEGER_TOL)
    {
        return Err(ConstructionError::SpectrumNotOddInteger(bad));
    }
    let n = hx.dim();
    let left = kron(&ComplexMatrix::identity(n), &h_c4())?;
    let right = kron(hx.matrix(), &ComplexMatrix::ones(4))?;
    Ok(HermitianMatrix::new(left.add(&right))?)
}

/// Distinct eigenvalues of the C4-tensor graph over a base with spectrum
/// `base`: `{4θ} ∪ {-2, 0, 2}`.
pub fn c4_tensor_spectrum(base: &[Surd]) -> Vec<Surd> {
    let mut out: Vec<Surd> = base
        .iter()
        .map(|t| t.scale(&BigRational::from_integer(4.into())))
        .chain([-2, 0, 2].map(Surd::integer))
        .collect();
    sort_dedup(&mut out);
    out
}

pub(crate) fn sort_dedup(v: &mut Vec<Surd>) {
    v.sort_by(|x, y| x.to_f64().total_cmp(&y.to_f64()));
    v.dedup();
}

/// `F_n` with entries `ζ^{jk}/√n`, `ζ = e^{2πi/n}`.
pub fn fourier_matrix(n: usize) -> ComplexMatrix {
    let s = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, |j, k| C64::from_polar(s, TAU * ((j * k) % n) as f64 / n as f64))
}

#[derive(Clone, Debug)]
pub struct UpstCirculant {
    pub matrix: HermitianMatrix,
    /// `θ_j = α + β(jh + c_j n)`, eigenvalue of the Fourier column `j`.
    pub eigenvalues: Vec<BigRational>,
}

/// Hermitian circulant `F_n·diag(θ)·F_n*` with `θ_j = α + β(jh + c_j n)`.
pub fn upst_circulant(
    n: usize,
    alpha: &BigRational,
    beta: &BigRational,
    h: i64,
    c: &[i64],
) -> Result<UpstCirculant, ConstructionError> {
    if n == 0 {
        return Err(ConstructionError::InvalidParameter("n must be positive".into()));
    }
    if c.len() != n {
        return Err(ConstructionError::LengthMismatch {
            expected: n,
            got: c.len(),
        });
    }
    if !beta.is_positive() {
        return Err(ConstructionError::InvalidParameter("β must be positive".into()));
    }
    if h.rem_euclid(n as i64).gcd(&(n as i64)) != 1 {
        return Err(ConstructionError::NonCoprime { h, n });
    }
    let theta: Vec<BigRational> = (0..n)
        .map(|j| {
            let k = BigInt::from(j as i64 * h + c[j] * n as i64);
            alpha + beta * BigRational::from_integer(k)
        })
        .collect();
    // unreachable for coprime h, kept as a guard on the arithmetic
    for j in 0..n {
        if let Some(k) = (j + 1..n).find(|&k| theta[k] == theta[j]) {
            return Err(ConstructionError::DuplicateEigenvalue(j, k));
        }
    }
    let tf: Vec<f64> = theta.iter().map(|t| t.to_f64().unwrap_or(f64::NAN)).collect();
    let m = ComplexMatrix::from_fn(n, |a, b| {
        let d = (a + n - b) % n;
        tf.iter()
            .enumerate()
            .map(|(j, &t)| C64::from_polar(t / n as f64, TAU * ((d * j) % n) as f64 / n as f64))
            .sum()
    });
    Ok(UpstCirculant {
        matrix: HermitianMatrix::new(m)?,
        eigenvalues: theta,
    })
}

/// Eigenvalue and projector predicted by a closed-form decomposition.
#[derive(Clone, Debug)]
pub struct PredictedEigenspace {
    pub eigenvalue: f64,
    pub projector: ComplexMatrix,
    pub multiplicity: usize,
}

/// `Σ θ P` over predicted eigenspaces.
pub fn predicted_reconstruction(parts: &[PredictedEigenspace]) -> ComplexMatrix {
    let n = parts.first().map_or(0, |p| p.projector.dim());
    let mut out = ComplexMatrix::zeros(n);
    for p in parts {
        out.add_scaled(c(p.eigenvalue, 0.0), &p.projector);
    }
    out
}

#[derive(Clone, Debug)]
pub struct StarProduct {
    pub matrix: HermitianMatrix,
    pub m: usize,
    pub base_dim: usize,
    /// `F_r^±` for each base eigenvalue, then `F₀` when `m ≥ 2`.
    pub predicted: Vec<PredictedEigenspace>,
}

impl StarProduct {
    pub fn index(&self, vertex: usize, position: usize) -> usize {
        star_index(self.m, vertex, position)
    }
}

/// Vertex `position` (0 = root) of the star hanging at base vertex `vertex`.
pub fn star_index(m: usize, vertex: usize, position: usize) -> usize {
    vertex * (m + 1) + position
}

/// `λ± = (θ ± √(θ² + 4m))/2`
pub fn star_lambdas(theta: f64, m: usize) -> (f64, f64) {
    let r = (theta * theta + 4.0 * m as f64).sqrt();
    ((theta + r) / 2.0, (theta - r) / 2.0)
}

/// Exact `λ±` when `θ²` is rational.
pub fn star_lambdas_exact(theta: &Surd, m: usize) -> Option<(Surd, Surd)> {
    let sq = square_if_rational(theta)?;
    let disc = sq + BigRational::from_integer((4 * m as i64).into());
    // √(p/q) = √(pq)/q
    let (p, q) = (disc.numer().clone(), disc.denom().clone());
    let pq = (p * &q).to_u64()?;
    let root = Surd::sqrt_scaled(BigRational::new(1.into(), q), pq);
    let half = BigRational::new(1.into(), 2.into());
    let t = theta.scale(&half);
    let r = root.scale(&half);
    Some((&t + &r, &t - &r))
}

fn square_if_rational(x: &Surd) -> Option<BigRational> {
    if x.has_symbols() {
        return None;
    }
    let terms: Vec<(u64, BigRational)> = x.radical_terms().map(|(d, q)| (d, q.clone())).collect();
    let rat = x.rational_part();
    match terms.as_slice() {
        [] => Some(&rat * &rat),
        [(d, q)] if rat.is_zero() => Some(q * q * BigRational::from_integer((*d).into())),
        _ => None,
    }
}

/// Distinct exact eigenvalues of `X ∘ Star(m)` from those of `X`.
pub fn star_exact_spectrum(base: &[Surd], m: usize) -> Option<Vec<Surd>> {
    let mut out = Vec::with_capacity(2 * base.len() + 1);
    for t in base {
        let (p, q) = star_lambdas_exact(t, m)?;
        out.push(p);
        out.push(q);
    }
    if m >= 2 {
        out.push(Surd::zero());
    }
    sort_dedup(&mut out);
    Some(out)
}

/// Rooted product of `X` with a star on `m` leaves at every vertex.
pub fn rooted_star_product(hx: &HermitianMatrix, m: usize) -> Result<StarProduct, ConstructionError> {
    if m == 0 {
        return Err(ConstructionError::InvalidParameter("m must be at least 1".into()));
    }
    let n = hx.dim();
    let size = n
        .checked_mul(m + 1)
        .filter(|&s| s <= crate::linalg::DEFAULT_MAX_DIM)
        .ok_or(LinalgError::DimensionOverflow {
            dim: n.saturating_mul(m + 1),
            max: crate::linalg::DEFAULT_MAX_DIM,
        })?;
    let mut h = ComplexMatrix::zeros(size);
    for v in 0..n {
        for w in 0..n {
            h[(star_index(m, v, 0), star_index(m, w, 0))] = hx.matrix()[(v, w)];
        }
        for p in 1..=m {
            h[(star_index(m, v, 0), star_index(m, v, p))] = c(1.0, 0.0);
            h[(star_index(m, v, p), star_index(m, v, 0))] = c(1.0, 0.0);
        }
    }
    let matrix = HermitianMatrix::new(h)?;

    // closed-form projectors, built in position-major order then relabeled
    let perm: Vec<usize> = (0..size).map(|i| star_index(m, i % n, i / n)).collect();
    let dec = spectral_decomposition(hx, DEFAULT_CLUSTER_TOL)?;
    let mut predicted = Vec::new();
    for (r, &theta) in dec.eigenvalues().iter().enumerate() {
        let (lp, lm) = star_lambdas(theta, m);
        for lam in [lp, lm] {
            let s = 1.0 / (lam * lam + m as f64);
            let block = ComplexMatrix::from_fn(m + 1, |p, q| {
                let v = match (p, q) {
                    (0, 0) => lam * lam,
                    (0, _) | (_, 0) => lam,
                    _ => 1.0,
                };
                c(v * s, 0.0)
            });
            predicted.push(PredictedEigenspace {
                eigenvalue: lam,
                projector: kron(&block, dec.projector(r))?.permuted(&perm),
                multiplicity: dec.multiplicities()[r],
            });
        }
    }
    if m >= 2 {
        let mf = m as f64;
        let block = ComplexMatrix::from_fn(m + 1, |p, q| match (p, q) {
            (0, _) | (_, 0) => c(0.0, 0.0),
            _ if p == q => c(1.0 - 1.0 / mf, 0.0),
            _ => c(-1.0 / mf, 0.0),
        });
        predicted.push(PredictedEigenspace {
            eigenvalue: 0.0,
            projector: kron(&block, &ComplexMatrix::identity(n))?.permuted(&perm),
            multiplicity: (m - 1) * n,
        });
    }
    Ok(StarProduct {
        matrix,
        m,
        base_dim: n,
        predicted,
    })
}

/// Tridiagonal `m×m` matrix with unit off-diagonal and diagonal
/// `(γ, 0, …, 0, θ)`; for `m = 1` the single entry is `γ + θ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiMatrix {
    pub m: usize,
    pub gamma: f64,
    pub theta: f64,
}

impl JacobiMatrix {
    pub fn new(m: usize, gamma: f64, theta: f64) -> Result<Self, ConstructionError> {
        if m == 0 {
            return Err(ConstructionError::InvalidParameter("m must be at least 1".into()));
        }
        if !gamma.is_finite() || !theta.is_finite() {
            return Err(ConstructionError::InvalidParameter("γ and θ must be finite".into()));
        }
        Ok(JacobiMatrix { m, gamma, theta })
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let m = self.m;
        let mut t = vec![vec![0.0; m]; m];
        for i in 0..m.saturating_sub(1) {
            t[i][i + 1] = 1.0;
            t[i + 1][i] = 1.0;
        }
        t[0][0] += self.gamma;
        t[m - 1][m - 1] += self.theta;
        t
    }
}

/// `φ_0, …, φ_m` for a Jacobi matrix, with the roots of `φ_m` and the
/// eigenvectors `Φ_s = (φ_0(λ_s), …, φ_{m-1}(λ_s))`.
#[derive(Clone, Debug)]
pub struct OrthogonalPolynomials {
    /// ascending coefficients
    pub polys: Vec<Vec<f64>>,
    pub roots: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

impl OrthogonalPolynomials {
    pub fn eval(&self, r: usize, t: f64) -> f64 {
        self.polys[r].iter().rev().fold(0.0, |acc, &a| acc * t + a)
    }
}

fn poly_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] -= x;
    }
    out
}

/// `(t - s)·p`
fn times_linear(p: &[f64], s: f64) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + 1];
    for (i, &x) in p.iter().enumerate() {
        out[i + 1] += x;
        out[i] -= s * x;
    }
    out
}

pub fn orthogonal_polynomials(j: &JacobiMatrix) -> OrthogonalPolynomials {
    let m = j.m;
    let mut polys: Vec<Vec<f64>> = vec![vec![1.0]];
    if m == 1 {
        polys.push(vec![-(j.gamma + j.theta), 1.0]);
    } else {
        polys.push(vec![-j.gamma, 1.0]);
        for r in 2..=m {
            let shift = if r == m { j.theta } else { 0.0 };
            let next = poly_sub(&times_linear(&polys[r - 1], shift), &polys[r - 2]);
            polys.push(next);
        }
    }
    let rows = j.to_rows();
    let t = DMatrix::<f64>::from_fn(m, m, |a, b| rows[a][b]);
    let mut roots: Vec<f64> = SymmetricEigen::new(t).eigenvalues.iter().copied().collect();
    roots.sort_by(f64::total_cmp);
    let mut out = OrthogonalPolynomials {
        polys,
        roots,
        eigenvectors: Vec::new(),
    };
    out.eigenvectors = out
        .roots
        .iter()
        .map(|&lam| (0..m).map(|r| out.eval(r, lam)).collect())
        .collect();
    out
}

/// Eigenvalues `θ_j` of a Hermitian circulant, `H F_n e_j = θ_j F_n e_j`.
pub fn circulant_eigenvalues(hx: &HermitianMatrix) -> Result<Vec<f64>, ConstructionError> {
    let n = hx.dim();
    let h = hx.matrix();
    for a in 0..n {
        for b in 0..n {
            let defect = (h[(a, b)] - h[((a + n - b) % n, 0)]).norm();
            if defect > CIRCULANT_TOL {
                return Err(ConstructionError::NotCirculant {
                    row: a,
                    col: b,
                    defect,
                });
            }
        }
    }
    Ok((0..n)
        .map(|j| {
            (0..n)
                .map(|k| h[(k, 0)] * C64::from_polar(1.0, -TAU * ((k * j) % n) as f64 / n as f64))
                .sum::<C64>()
                .re
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct PredictedEigenpair {
    pub j: usize,
    /// 0-based root index of `φ_{j,m}`, ascending.
    pub s: usize,
    pub eigenvalue: f64,
    pub vector: Vec<C64>,
}

#[derive(Clone, Debug)]
pub struct LoopedPathProduct {
    pub matrix: HermitianMatrix,
    pub m: usize,
    pub n: usize,
    pub gamma: f64,
    pub base_eigenvalues: Vec<f64>,
    pub jacobi: Vec<JacobiMatrix>,
}

impl LoopedPathProduct {
    /// Copy of base vertex `x` at path position `position` (0 = looped end).
    pub fn index(&self, x: usize, position: usize) -> usize {
        position * self.n + x
    }

    /// `Φ_{j,s} ⊗ F_n e_j` with eigenvalue `λ_{j,s}`.
    pub fn predicted_eigenpairs(&self) -> Vec<PredictedEigenpair> {
        let f = fourier_matrix(self.n);
        let mut out = Vec::with_capacity(self.n * self.m);
        for (j, jac) in self.jacobi.iter().enumerate() {
            let op = orthogonal_polynomials(jac);
            for (s, (&lam, phi)) in op.roots.iter().zip(&op.eigenvectors).enumerate() {
                let vector = (0..self.m * self.n)
                    .map(|i| f[(i % self.n, j)] * phi[i / self.n])
                    .collect();
                out.push(PredictedEigenpair {
                    j,
                    s,
                    eigenvalue: lam,
                    vector,
                });
            }
        }
        out
    }

    /// `(j, s)` of the predicted eigenvalue closest to `value`.
    pub fn label(&self, value: f64) -> (usize, usize) {
        self.predicted_eigenpairs()
            .iter()
            .min_by(|a, b| (a.eigenvalue - value).abs().total_cmp(&(b.eigenvalue - value).abs()))
            .map(|p| (p.j, p.s))
            .expect("nonempty product")
    }
}

/// `H_Z = E_mm ⊗ H_X + T ⊗ I_n`, with `T` the looped path (loop weight `γ`
/// at the far end).
pub fn rooted_looped_path_product(
    hx: &HermitianMatrix,
    m: usize,
    gamma: f64,
) -> Result<LoopedPathProduct, ConstructionError> {
    let base_eigenvalues = circulant_eigenvalues(hx)?;
    let n = hx.dim();
    let jacobi = base_eigenvalues
        .iter()
        .map(|&t| JacobiMatrix::new(m, gamma, t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut root = ComplexMatrix::zeros(m);
    root[(m - 1, m - 1)] = c(1.0, 0.0);
    let path = ComplexMatrix::from_fn(m, |a, b| {
        if a == 0 && b == 0 {
            c(gamma, 0.0)
        } else if a.abs_diff(b) == 1 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let h = kron(&root, hx.matrix())?.add(&kron(&path, &ComplexMatrix::identity(n))?);
    Ok(LoopedPathProduct {
        matrix: HermitianMatrix::new(h)?,
        m,
        n,
        gamma,
        base_eigenvalues,
        jacobi,
    })
}

#[derive(Clone, Debug)]
pub struct OneWayFamily {
    pub matrix: HermitianMatrix,
    /// Diagonal of `D` in the order of the columns of `P`.
    pub spectrum: Vec<Surd>,
    /// The (column-normalized) diagonalizer.
    pub p: ComplexMatrix,
    /// Max entrywise defect of the consistency check.
    pub defect: f64,
}

fn assemble(p: &ComplexMatrix, d: &[f64]) -> Result<ComplexMatrix, ConstructionError> {
    let pinv = inverse(p).ok_or(ConstructionError::SingularMatrix)?;
    let dm = ComplexMatrix::diagonal(&d.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
    Ok(p.matmul(&dm).matmul(&pinv))
}

fn check_transcendental_tag(v: &Surd, name: &str) -> Result<f64, ConstructionError> {
    let x = v.to_f64();
    if !x.is_finite() {
        return Err(ConstructionError::InvalidParameter(format!("{name} must be finite")));
    }
    Ok(x)
}

/// Four-vertex matrix with PST running one way only, `D = diag(0, π, λ, λ+π)`.
///
/// `P·D·P⁻¹` and the closed form are both assembled and compared.
pub fn one_way_family_4(lambda: &Surd) -> Result<OneWayFamily, ConstructionError> {
    let l = check_transcendental_tag(lambda, "λ")?;
    let e = C64::from_polar(1.0, l);
    let one = c(1.0, 0.0);
    let p = ComplexMatrix::from_rows(vec![
        vec![one, one, one, one],
        vec![one, one, -one, -one],
        vec![one, -one, e, -e],
        vec![one, -one, -e, e],
    ])?
    .scale(c(0.5, 0.0));
    let h = assemble(&p, &[0.0, PI, l, l + PI])?;

    let q = PI / 4.0;
    let em = e.conj();
    let off = ComplexMatrix::from_rows(vec![
        vec![c(0.0, 0.0), c(l / 2.0, 0.0), (one + em) * q, (one - em) * q],
        vec![c(l / 2.0, 0.0), c(0.0, 0.0), (one - em) * q, (one + em) * q],
        vec![(one + e) * q, (one - e) * q, c(0.0, 0.0), c(l / 2.0, 0.0)],
        vec![(one - e) * q, (one + e) * q, c(l / 2.0, 0.0), c(0.0, 0.0)],
    ])?;
    let closed = ComplexMatrix::identity(4)
        .scale(c((PI + l) / 2.0, 0.0))
        .sub(&off);
    let defect = h.max_abs_diff(&closed);
    if defect > ASSEMBLY_TOL {
        return Err(ConstructionError::AssemblyMismatch(defect));
    }
    let pi = Surd::pi();
    Ok(OneWayFamily {
        matrix: HermitianMatrix::with_tolerance(h, ASSEMBLY_TOL)?,
        spectrum: vec![Surd::zero(), pi.clone(), lambda.clone(), lambda + &pi],
        p,
        defect,
    })
}

/// Eight-vertex matrix with PST from vertex 0 to 1, 2, 3 at times 1, 2, 3.
pub fn one_way_family_8(theta: &Surd) -> Result<OneWayFamily, ConstructionError> {
    let t = check_transcendental_tag(theta, "θ")?;
    let e = |k: f64| C64::from_polar(1.0, k * t);
    let one = c(1.0, 0.0);
    let rows = vec![
        vec![one, one, one, one, I, I, I, I],
        vec![one, -one, e(1.0), -e(1.0), -one, one, -e(1.0), e(1.0)],
        vec![one, one, e(2.0), e(2.0), -I, -I, -I * e(2.0), -I * e(2.0)],
        vec![one, -one, e(3.0), -e(3.0), one, -one, e(3.0), -e(3.0)],
        vec![I, I, -I, -I, -one, -one, one, one],
        vec![-I, I, I * e(1.0), -I * e(1.0), I, -I, -I * e(1.0), I * e(1.0)],
        vec![I, I, -I * e(2.0), -I * e(2.0), one, one, -e(2.0), -e(2.0)],
        vec![-I, I, I * e(3.0), -I * e(3.0), -I, I, I * e(3.0), -I * e(3.0)],
    ];
    let raw = ComplexMatrix::from_rows(rows)?;
    let norms: Vec<f64> = (0..8)
        .map(|j| raw.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let p = ComplexMatrix::from_fn(8, |i, j| raw[(i, j)] / norms[j]);
    let d = [
        0.0,
        PI,
        t,
        t + PI,
        PI / 2.0,
        3.0 * PI / 2.0,
        t + PI / 2.0,
        t + 3.0 * PI / 2.0,
    ];
    let h = assemble(&p, &d)?;
    let defect = h.hermitian_defect();
    if defect > ASSEMBLY_TOL {
        return Err(ConstructionError::NonHermitianResult(defect));
    }
    let pi = Surd::pi();
    let half_pi = pi.scale(&BigRational::new(1.into(), 2.into()));
    let three_half_pi = pi.scale(&BigRational::new(3.into(), 2.into()));
    Ok(OneWayFamily {
        matrix: HermitianMatrix::with_tolerance(h, ASSEMBLY_TOL)?,
        spectrum: vec![
            Surd::zero(),
            pi.clone(),
            theta.clone(),
            theta + &pi,
            half_pi.clone(),
            three_half_pi.clone(),
            theta + &half_pi,
            theta + &three_half_pi,
        ],
        p,
        defect,
    })
}
