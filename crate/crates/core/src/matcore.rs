//! Dense complex matrices.
//!
//! [`CMatrix`] is the carrier for every object in the crate: elements of
//! `M_n`, amplified elements of `M_k(M_n)`, Choi matrices and frames. Storage
//! is a column-major `nalgebra` matrix; the JSON encoding is row-major.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative Hermiticity tolerance accepted by [`CMatrix::herm_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;
const EIG_RESIDUAL_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// A dense complex matrix with explicit dimensions.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    inner: DMatrix<C64>,
}

/// Eigendecomposition `H = U diag(values) U*` of a Hermitian matrix, with the
/// eigenvalues sorted in descending order.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            inner: DMatrix::from_fn(rows, cols, |i, j| f(i, j)),
        }
    }

    /// Real matrix from rows of equal length.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    /// The matrix unit `E_ij` in `M_n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.inner[(i, j)] = ONE;
        m
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO })
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(entries[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    pub(crate) fn from_nalgebra(inner: DMatrix<C64>) -> Self {
        Self { inner }
    }

    pub(crate) fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.rows() == 0 || self.cols() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.inner[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.inner[(i, j)] = value;
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.inner.column(j).iter().copied().collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            inner: self.inner.map(|z| z.conj()),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            inner: &self.inner * s,
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            inner: self.inner.map(|z| z * s),
        }
    }

    /// `self += s · other`.
    pub fn axpy(&mut self, s: C64, other: &CMatrix) {
        debug_assert_eq!(self.inner.shape(), other.inner.shape());
        self.inner.zip_apply(&other.inner, |a, b| *a += s * b);
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    /// Trace inner product `⟨A, B⟩ = Tr(A* B)`.
    pub fn inner(&self, other: &CMatrix) -> C64 {
        debug_assert_eq!(self.inner.shape(), other.inner.shape());
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Kronecker product `A ⊗ B`.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let (p, q) = other.inner.shape();
        Self::from_fn(self.rows() * p, self.cols() * q, |i, j| {
            self.inner[(i / p, j / q)] * other.inner[(i % p, j % q)]
        })
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(blocks: &[&CMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows()).sum();
        let cols = blocks.iter().map(|b| b.cols()).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows();
            c += b.cols();
        }
        out
    }

    /// `[self other]` side by side.
    pub fn hstack(&self, other: &CMatrix) -> Self {
        let mut out = Self::zeros(self.rows(), self.cols() + other.cols());
        out.set_block(0, 0, self);
        out.set_block(0, self.cols(), other);
        out
    }

    pub fn submatrix(&self, row: usize, col: usize, rows: usize, cols: usize) -> Self {
        Self {
            inner: self.inner.view((row, col), (rows, cols)).into_owned(),
        }
    }

    pub fn set_block(&mut self, row: usize, col: usize, block: &CMatrix) {
        self.inner
            .view_mut((row, col), (block.rows(), block.cols()))
            .copy_from(&block.inner);
    }

    /// `‖self − other‖` in operator norm; zero when the shapes are empty.
    pub fn dist(&self, other: &CMatrix) -> f64 {
        (self - other).opnorm().unwrap_or(0.0)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        (self - &self.adjoint()).frobenius_norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_deviation() <= tol * self.frobenius_norm().max(1.0)
    }

    /// `(H + H*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    /// Largest singular value.
    pub fn opnorm(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let gram = if self.rows() >= self.cols() {
            self.inner.adjoint() * &self.inner
        } else {
            &self.inner * self.inner.adjoint()
        };
        let top = CMatrix { inner: gram }.sorted_eig().values[0];
        Ok(top.max(0.0).sqrt())
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.is_empty() {
            return Vec::new();
        }
        let svd = self.inner.clone().svd(false, false);
        let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Hermitian eigendecomposition with eigenvalues in descending order.
    ///
    /// Inputs within `1e-10·‖H‖` of Hermitian are symmetrized first; larger
    /// deviations are rejected.
    pub fn herm_eig(&self) -> Result<HermEig> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "herm_eig needs a square matrix, got {}x{}",
                self.rows(),
                self.cols()
            )));
        }
        let deviation = self.hermitian_deviation();
        let allowed = HERMITIAN_TOL * self.frobenius_norm();
        if deviation > allowed {
            return Err(Error::NotHermitian { deviation, allowed });
        }
        Ok(self.hermitian_part().sorted_eig())
    }

    // Assumes Hermitian input.
    fn sorted_eig(&self) -> HermEig {
        let n = self.rows();
        if n == 0 {
            return HermEig {
                values: Vec::new(),
                vectors: CMatrix::zeros(0, 0),
            };
        }
        let eig = self.inner.clone().symmetric_eigen();
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let mut vectors = eig.eigenvectors;
        let scale = self.inner.norm().max(f64::MIN_POSITIVE);
        let residual = (&self.inner * &vectors
            - &vectors * DMatrix::from_diagonal(&eig.eigenvalues.map(C64::from)))
        .norm();
        // The QR iteration occasionally stalls on clustered complex spectra;
        // Jacobi sweeps on the nearly diagonal U*HU repair it.
        if residual > EIG_RESIDUAL_TOL * scale {
            let rotated = vectors.adjoint() * &self.inner * &vectors;
            let (d, v) = jacobi_eigen(rotated);
            values = d;
            vectors *= v;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let sorted = order.iter().map(|&k| values[k]).collect();
        let vectors = DMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
        HermEig {
            values: sorted,
            vectors: CMatrix { inner: vectors },
        }
    }

    /// Nearest positive semidefinite matrix in Frobenius norm; the input is
    /// symmetrized before its negative eigenvalues are clipped.
    pub fn psd_project(&self) -> Self {
        let eig = self.hermitian_part().sorted_eig();
        eig.reassemble(|lambda| lambda.max(0.0))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_part()
            .sorted_eig()
            .values
            .last()
            .copied()
            .unwrap_or(0.0)
    }

    /// Pseudo-inverse of a positive semidefinite matrix together with an
    /// orthonormal frame of its numerical null space. Eigenvalues at or below
    /// `rel_cutoff · λ_max` count as zero.
    pub fn psd_pseudo_inverse(&self, rel_cutoff: f64) -> (CMatrix, CMatrix) {
        let eig = self.hermitian_part().sorted_eig();
        let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
        let cut = rel_cutoff * top;
        let pinv = eig.reassemble(|l| if l > cut && l > 0.0 { 1.0 / l } else { 0.0 });
        let null = eig.frame(|l| !(l > cut && l > 0.0));
        (pinv, null)
    }
}

impl HermEig {
    /// `U diag(f(λ)) U*`.
    pub fn reassemble(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let u = &self.vectors.inner;
        let mut scaled = u.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        CMatrix {
            inner: scaled * u.adjoint(),
        }
    }

    /// Columns of `U` whose eigenvalue satisfies `keep`, as an `n × r` frame.
    pub fn frame(&self, keep: impl Fn(f64) -> bool) -> CMatrix {
        let cols: Vec<Vec<C64>> = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, &l)| keep(l))
            .map(|(j, _)| self.vectors.column(j))
            .collect();
        CMatrix::from_columns(self.vectors.rows(), &cols)
    }
}

/// Cyclic complex Jacobi iteration for a Hermitian matrix; returns the
/// eigenvalues and the accumulated unitary.
fn jacobi_eigen(mut a: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = a.nrows();
    let mut v = DMatrix::<C64>::identity(n, n);
    let total = a.norm().max(f64::MIN_POSITIVE);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * (n as f64) * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = a[(p, q)];
                let magnitude = g.norm();
                if magnitude <= 1e-3 * f64::EPSILON * total {
                    continue;
                }
                let phase = g / magnitude;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * magnitude);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let g11 = C64::new(c, 0.0);
                let g12 = C64::new(s, 0.0);
                let g21 = -phase.conj() * s;
                let g22 = phase.conj() * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * g11 + akq * g21;
                    a[(k, q)] = akp * g12 + akq * g22;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * g11 + vkq * g21;
                    v[(k, q)] = vkp * g12 + vkq * g22;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = g11.conj() * apk + g21.conj() * aqk;
                    a[(q, k)] = g12.conj() * apk + g22.conj() * aqk;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

/// Orthonormal basis (as columns) of the span of `vectors`; directions whose
/// Gram–Schmidt residual falls below `tol` times the largest input norm are
/// dropped.
pub fn orthonormal_columns(dim: usize, vectors: &[Vec<C64>], tol: f64) -> CMatrix {
    let scale = vectors
        .iter()
        .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    if scale == 0.0 {
        return CMatrix::zeros(dim, 0);
    }
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > tol * scale {
            basis.push(w.into_iter().map(|z| z / norm).collect());
        }
    }
    CMatrix::from_columns(dim, &basis)
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.inner[(i, j)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&CMatrix> for &CMatrix {
            type Output = CMatrix;
            fn $method(self, rhs: &CMatrix) -> CMatrix {
                CMatrix { inner: &self.inner $op &rhs.inner }
            }
        }
        impl $tr<CMatrix> for CMatrix {
            type Output = CMatrix;
            fn $method(self, rhs: CMatrix) -> CMatrix {
                CMatrix { inner: self.inner $op rhs.inner }
            }
        }
        impl $tr<&CMatrix> for CMatrix {
            type Output = CMatrix;
            fn $method(self, rhs: &CMatrix) -> CMatrix {
                CMatrix { inner: self.inner $op &rhs.inner }
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        self.inner += &rhs.inner;
    }
}

impl SubAssign<&CMatrix> for CMatrix {
    fn sub_assign(&mut self, rhs: &CMatrix) {
        self.inner -= &rhs.inner;
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix {
            inner: -&self.inner,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CMatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CMatrixRepr {
            rows: self.rows(),
            cols: self.cols(),
            data: self.entries().into_iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = CMatrixRepr::deserialize(deserializer)?;
        let entries = repr
            .data
            .into_iter()
            .map(|[re, im]| C64::new(re, im))
            .collect();
        CMatrix::new(repr.rows, repr.cols, entries).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_unitary, Rng};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn opnorm_examples() {
        assert!(close(CMatrix::identity(2).opnorm().unwrap(), 1.0, 1e-14));
        assert!(close(
            CMatrix::diag_real(&[1.0, 0.5]).opnorm().unwrap(),
            1.0,
            1e-14
        ));
        let m = CMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!(close(m.opnorm().unwrap(), 2.0, 1e-14));
        assert_eq!(CMatrix::zeros(3, 2).opnorm().unwrap(), 0.0);
        assert!(matches!(
            CMatrix::zeros(0, 3).opnorm(),
            Err(Error::EmptyMatrix)
        ));
    }

    #[test]
    fn opnorm_matches_svd() {
        let mut rng = Rng::seeded(7);
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 5, 3);
            let s = m.singular_values()[0];
            let n = m.opnorm().unwrap();
            assert!((n - s).abs() <= 1e-10 * s);
        }
    }

    #[test]
    fn herm_eig_examples() {
        let e = CMatrix::diag_real(&[3.0, 1.0]).herm_eig().unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
        assert!(e.vectors.dist(&CMatrix::identity(2)) < 1e-14);

        let x = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = x.herm_eig().unwrap();
        assert!(close(e.values[0], 1.0, 1e-14) && close(e.values[1], -1.0, 1e-14));

        let z = CMatrix::zeros(3, 3).herm_eig().unwrap();
        assert_eq!(z.values, vec![0.0; 3]);
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(m.herm_eig(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn herm_eig_reconstructs() {
        let mut rng = Rng::seeded(11);
        for n in [1, 2, 5, 9] {
            let h = random_matrix(&mut rng, n, n).hermitian_part();
            let e = h.herm_eig().unwrap();
            let back = e.reassemble(|l| l);
            let scale = h.opnorm().unwrap();
            assert!(back.dist(&h) <= 1e-9 * scale);
            let u = &e.vectors;
            assert!((u.adjoint() * u).dist(&CMatrix::identity(n)) <= 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn kron_examples() {
        assert_eq!(
            CMatrix::identity(2).kron(&CMatrix::identity(2)),
            CMatrix::identity(4)
        );
        let e12 = CMatrix::unit(2, 0, 1);
        let k = e12.kron(&CMatrix::identity(2));
        let expected = CMatrix::unit(4, 0, 2) + CMatrix::unit(4, 1, 3);
        assert_eq!(k, expected);
    }

    #[test]
    fn kron_is_associative_on_dyadic_entries() {
        let a = CMatrix::from_real_rows(&[&[1.0, -0.5], &[2.0, 0.25]]);
        let b = CMatrix::from_rows(&[&[I, ONE + I], &[ZERO, -ONE]]);
        let c = CMatrix::from_real_rows(&[&[0.5, 3.0, -1.0]]);
        assert_eq!(a.kron(&b.kron(&c)), a.kron(&b).kron(&c));
    }

    #[test]
    fn kron_norm_multiplicative() {
        let mut rng = Rng::seeded(3);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 3, 2);
            let b = random_matrix(&mut rng, 2, 4);
            let lhs = a.kron(&b).opnorm().unwrap();
            let rhs = a.opnorm().unwrap() * b.opnorm().unwrap();
            assert!((lhs - rhs).abs() <= 1e-10 * rhs);
        }
    }

    #[test]
    fn psd_project_examples() {
        let p = CMatrix::diag_real(&[1.0, -1.0]).psd_project();
        assert!(p.dist(&CMatrix::diag_real(&[1.0, 0.0])) < 1e-14);
        let neg = (-&CMatrix::identity(3)).psd_project();
        assert!(neg.max_abs() < 1e-14);
        let mut rng = Rng::seeded(5);
        let g = random_matrix(&mut rng, 4, 4);
        let psd = &g.adjoint() * &g;
        assert!(psd.psd_project().dist(&psd) <= 1e-10 * psd.opnorm().unwrap().max(1.0));
    }

    #[test]
    fn adjoint_involution_is_exact() {
        let mut rng = Rng::seeded(1);
        let m = random_matrix(&mut rng, 3, 4);
        assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn unitary_sampler() {
        let mut rng = Rng::seeded(2);
        let u = random_unitary(&mut rng, 4);
        assert!((u.adjoint() * &u).dist(&CMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn json_shape() {
        let m = CMatrix::from_rows(&[&[ONE, I]]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"data":[[1.0,0.0],[0.0,1.0]]}"#);
        let bad = r#"{"rows":2,"cols":2,"data":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<CMatrix>(bad).is_err());
    }
}
