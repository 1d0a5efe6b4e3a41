use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{CMatrix, C64, ONE, ZERO};

/// Gram–Schmidt residuals below this (relative to the largest generator)
/// are treated as linear dependencies.
pub const SPAN_TOL: f64 = 1e-9;
/// Distance threshold for membership of a matrix in a space.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// A linear subspace of `M_n` held as a trace-orthonormal basis.
///
/// When the space is unital the normalized identity `I_n/√n` is stored at
/// `unit_index`.
#[derive(Clone, Debug, Serialize)]
pub struct OperatorSpace {
    ambient_dim: usize,
    basis: Vec<CMatrix>,
    unit_index: Option<usize>,
}

/// Incremental Gram–Schmidt over matrices with the trace inner product.
pub(crate) struct SpanBuilder {
    dim: usize,
    basis: Vec<CMatrix>,
    tol: f64,
}

impl SpanBuilder {
    pub(crate) fn new(dim: usize, tol: f64) -> Self {
        Self {
            dim,
            basis: Vec::new(),
            tol,
        }
    }

    pub(crate) fn residual(&self, m: &CMatrix) -> CMatrix {
        let mut w = m.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.inner(&w);
                w.axpy(-c, b);
            }
        }
        w
    }

    /// Adds `m` if it leaves the current span by more than the absolute
    /// tolerance; returns whether the basis grew.
    pub(crate) fn push(&mut self, m: &CMatrix) -> bool {
        debug_assert_eq!((m.rows(), m.cols()), (self.dim, self.dim));
        let w = self.residual(m);
        let norm = w.frobenius_norm();
        if norm > self.tol {
            self.basis.push(w.scale_real(1.0 / norm));
            true
        } else {
            false
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.basis.len()
    }

    pub(crate) fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub(crate) fn into_basis(self) -> Vec<CMatrix> {
        self.basis
    }
}

impl OperatorSpace {
    /// Orthonormalizes `matrices` into a space. With `mark_unit` the identity
    /// must lie in the span (within `1e-8` relative distance) and becomes the
    /// first basis element.
    pub fn new(matrices: &[CMatrix], mark_unit: bool) -> Result<Self> {
        let n = square_dim(matrices)?;
        let scale = matrices
            .iter()
            .map(CMatrix::frobenius_norm)
            .fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::EmptySpan);
        }
        let tol = SPAN_TOL * scale;
        let mut plain = SpanBuilder::new(n, tol);
        for m in matrices {
            plain.push(m);
        }
        if !mark_unit {
            return Ok(Self {
                ambient_dim: n,
                basis: plain.into_basis(),
                unit_index: None,
            });
        }
        let identity = CMatrix::identity(n);
        let distance = plain.residual(&identity).frobenius_norm() / (n as f64).sqrt();
        if distance > MEMBERSHIP_TOL {
            return Err(Error::NotUnital { distance });
        }
        let mut with_unit = SpanBuilder::new(n, tol);
        with_unit.push(&identity);
        for m in matrices {
            with_unit.push(m);
        }
        // The identity can absorb one extra direction; keep the original rank.
        let mut basis = with_unit.into_basis();
        basis.truncate(plain.len().max(1));
        Ok(Self {
            ambient_dim: n,
            basis,
            unit_index: Some(0),
        })
    }

    /// The whole of `M_n` with the matrix units as basis.
    pub fn full(n: usize) -> Self {
        let mut basis = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                basis.push(CMatrix::unit(n, i, j));
            }
        }
        Self::new(&basis, true).expect("M_n is unital")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn unit_index(&self) -> Option<usize> {
        self.unit_index
    }

    pub fn is_unital(&self) -> bool {
        self.unit_index.is_some()
    }

    /// Coordinates `⟨b_i, m⟩` in the orthonormal basis.
    pub fn coordinates(&self, m: &CMatrix) -> Vec<C64> {
        self.basis.iter().map(|b| b.inner(m)).collect()
    }

    pub fn element(&self, coordinates: &[C64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for (c, b) in coordinates.iter().zip(&self.basis) {
            out.axpy(*c, b);
        }
        out
    }

    /// Orthogonal projection onto the space.
    pub fn project(&self, m: &CMatrix) -> CMatrix {
        self.element(&self.coordinates(m))
    }

    /// Frobenius distance from `m` to the space.
    pub fn distance(&self, m: &CMatrix) -> f64 {
        (m - &self.project(m)).frobenius_norm()
    }

    pub fn contains(&self, m: &CMatrix, tol: f64) -> bool {
        self.distance(m) <= tol * m.frobenius_norm().max(1.0)
    }

    /// `X*`, the space of adjoints.
    pub fn adjoint_space(&self) -> OperatorSpace {
        Self {
            ambient_dim: self.ambient_dim,
            basis: self.basis.iter().map(CMatrix::adjoint).collect(),
            unit_index: self.unit_index,
        }
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.basis.iter().all(|b| self.contains(&b.adjoint(), tol))
    }

    /// Largest distance of a product of basis elements from the span.
    pub fn product_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(self.distance(&(a * b)));
            }
        }
        worst
    }

    /// A basis of Hermitian matrices for a self-adjoint space, orthonormal
    /// under the (real) trace inner product.
    pub fn hermitian_basis(&self) -> Vec<CMatrix> {
        let half_i = C64::new(0.0, -0.5);
        let mut candidates = Vec::with_capacity(2 * self.dim());
        for b in &self.basis {
            candidates.push(b.hermitian_part());
            candidates.push((b - &b.adjoint()).scale(half_i));
        }
        let mut out: Vec<CMatrix> = Vec::new();
        for c in candidates {
            let mut w = c;
            for _ in 0..2 {
                for h in &out {
                    let coeff = h.inner(&w).re;
                    w.axpy(C64::new(-coeff, 0.0), h);
                }
            }
            let norm = w.frobenius_norm();
            if norm > SPAN_TOL && out.len() < self.dim() {
                out.push(w.hermitian_part().scale_real(1.0 / norm));
            }
        }
        out
    }

    /// The identity of `M_n`; meaningful only for unital spaces.
    pub fn unit(&self) -> CMatrix {
        CMatrix::identity(self.ambient_dim)
    }
}

pub(crate) fn square_dim(matrices: &[CMatrix]) -> Result<usize> {
    let first = matrices.first().ok_or(Error::EmptySpan)?;
    let n = first.rows();
    for (i, m) in matrices.iter().enumerate() {
        if m.rows() != n || m.cols() != n {
            return Err(Error::Dimension(format!(
                "matrix {i} is {}x{}, expected {n}x{n}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(n)
}

/// Unvalidated JSON form of a space: the basis may be any spanning set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceRepr {
    pub ambient_dim: usize,
    pub basis: Vec<CMatrix>,
    pub unit_index: Option<usize>,
}

impl SpaceRepr {
    pub(crate) fn check(&self) -> Result<()> {
        for (i, b) in self.basis.iter().enumerate() {
            if b.rows() != self.ambient_dim || b.cols() != self.ambient_dim {
                return Err(Error::Dimension(format!(
                    "basis[{i}] is {}x{}, ambient_dim is {}",
                    b.rows(),
                    b.cols(),
                    self.ambient_dim
                )));
            }
        }
        if let Some(u) = self.unit_index {
            let unit = self.basis.get(u).ok_or_else(|| {
                Error::Contract(format!(
                    "unit_index {u} out of range ({} elements)",
                    self.basis.len()
                ))
            })?;
            let distance = unit.dist(&CMatrix::identity(self.ambient_dim));
            if distance > MEMBERSHIP_TOL {
                return Err(Error::Contract(format!(
                    "basis[{u}] is marked as the unit but differs from the identity by {distance:.3e}"
                )));
            }
        }
        Ok(())
    }
}

impl TryFrom<SpaceRepr> for OperatorSpace {
    type Error = Error;

    fn try_from(repr: SpaceRepr) -> Result<Self> {
        repr.check()?;
        OperatorSpace::new(&repr.basis, repr.unit_index.is_some())
    }
}

impl<'de> Deserialize<'de> for OperatorSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SpaceRepr::deserialize(d)?;
        OperatorSpace::try_from(repr).map_err(serde::de::Error::custom)
    }
}

/// Embeds `x` in the (1,2) corner of a `2n × 2n` matrix.
pub(crate) fn upper_corner(x: &CMatrix) -> CMatrix {
    let n = x.rows();
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    out.set_block(0, n, x);
    out
}

pub(crate) fn lower_corner(y: &CMatrix) -> CMatrix {
    let n = y.rows();
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    out.set_block(n, 0, y);
    out
}

pub(crate) fn diagonal_unit(n: usize, upper: bool) -> CMatrix {
    let diag: Vec<C64> = (0..2 * n)
        .map(|i| if (i < n) == upper { ONE } else { ZERO })
        .collect();
    CMatrix::diag(&diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedups_dependent_generators() {
        let e12 = CMatrix::unit(2, 0, 1);
        let x = OperatorSpace::new(
            &[CMatrix::identity(2), e12.clone(), e12.scale_real(2.0)],
            false,
        )
        .unwrap();
        assert_eq!(x.dim(), 2);
    }

    #[test]
    fn upper_triangular_is_unital() {
        let gens = [
            CMatrix::identity(2),
            CMatrix::unit(2, 0, 0),
            CMatrix::unit(2, 0, 1),
        ];
        let t2 = OperatorSpace::new(&gens, true).unwrap();
        assert_eq!(t2.dim(), 3);
        assert_eq!(t2.unit_index(), Some(0));
        let u = &t2.basis()[0];
        assert!(u.scale_real(2f64.sqrt()).dist(&CMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn orthonormal_basis() {
        let gens = [
            CMatrix::identity(3),
            CMatrix::unit(3, 0, 0),
            CMatrix::unit(3, 0, 1),
            CMatrix::unit(3, 2, 1),
        ];
        let x = OperatorSpace::new(&gens, true).unwrap();
        for (i, a) in x.basis().iter().enumerate() {
            for (j, b) in x.basis().iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b) - C64::new(expected, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn non_unital_rejected() {
        let err = OperatorSpace::new(&[CMatrix::unit(2, 0, 1)], true).unwrap_err();
        assert!(matches!(err, Error::NotUnital { .. }));
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let err =
            OperatorSpace::new(&[CMatrix::identity(2), CMatrix::identity(3)], false).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
        assert!(matches!(
            OperatorSpace::new(&[CMatrix::zeros(2, 2)], false),
            Err(Error::EmptySpan)
        ));
    }

    #[test]
    fn hermitian_basis_spans_self_adjoint_space() {
        let x = OperatorSpace::full(2);
        let h = x.hermitian_basis();
        assert_eq!(h.len(), 4);
        for a in &h {
            assert!(a.hermitian_deviation() < 1e-14);
            assert!(x.contains(a, 1e-12));
        }
    }
}
