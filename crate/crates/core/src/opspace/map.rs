use serde::{Deserialize, Serialize};

use super::space::{square_dim, OperatorSpace, SpaceRepr, MEMBERSHIP_TOL, SPAN_TOL};
use crate::error::{Error, Result};
use crate::matcore::{CMatrix, C64};

/// Relative eigenvalue cutoff for Gram matrices of generators.
const GRAM_CUTOFF: f64 = 1e-14;

/// A linear map `T : X → M_m`, stored as the images of the orthonormal
/// basis of `X`.
#[derive(Clone, Debug, Serialize)]
pub struct SpaceMap {
    domain: OperatorSpace,
    codomain_dim: usize,
    images: Vec<CMatrix>,
}

impl SpaceMap {
    pub fn new(domain: OperatorSpace, codomain_dim: usize, images: Vec<CMatrix>) -> Result<Self> {
        if images.len() != domain.dim() {
            return Err(Error::Dimension(format!(
                "{} images for a {}-dimensional domain",
                images.len(),
                domain.dim()
            )));
        }
        for (i, y) in images.iter().enumerate() {
            if y.rows() != codomain_dim || y.cols() != codomain_dim {
                return Err(Error::Dimension(format!(
                    "image {i} is {}x{}, codomain is M_{codomain_dim}",
                    y.rows(),
                    y.cols()
                )));
            }
        }
        Ok(Self {
            domain,
            codomain_dim,
            images,
        })
    }

    /// Restriction of a linear function on `M_n` to `domain`.
    pub fn from_fn(
        domain: OperatorSpace,
        codomain_dim: usize,
        f: impl Fn(&CMatrix) -> CMatrix,
    ) -> Result<Self> {
        let images = domain.basis().iter().map(f).collect();
        Self::new(domain, codomain_dim, images)
    }

    /// Builds the map sending each generator to the matching image. The
    /// generators may be linearly dependent as long as the images respect
    /// the dependencies.
    pub fn from_generators(
        generators: &[CMatrix],
        images: &[CMatrix],
        mark_unit: bool,
    ) -> Result<Self> {
        if generators.len() != images.len() {
            return Err(Error::Dimension(format!(
                "{} generators but {} images",
                generators.len(),
                images.len()
            )));
        }
        let m = square_dim(images)?;
        let domain = OperatorSpace::new(generators, mark_unit)?;
        let count = generators.len();
        let gram = CMatrix::from_fn(count, count, |i, j| generators[i].inner(&generators[j]));
        let (pinv, null) = gram.psd_pseudo_inverse(GRAM_CUTOFF);

        let combine = |weights: &[C64]| {
            let mut out = CMatrix::zeros(m, m);
            for (w, y) in weights.iter().zip(images) {
                out.axpy(*w, y);
            }
            out
        };
        let scale = images
            .iter()
            .map(CMatrix::frobenius_norm)
            .fold(1.0, f64::max);
        for k in 0..null.cols() {
            let inconsistency = combine(&null.column(k)).frobenius_norm();
            if inconsistency > MEMBERSHIP_TOL * scale {
                return Err(Error::Contract(format!(
                    "images violate a linear dependency among the generators (defect {inconsistency:.3e})"
                )));
            }
        }
        // Minimal-norm coefficients c with Σ c_i g_i = b for each basis element b.
        let mapped = domain
            .basis()
            .iter()
            .map(|b| {
                let rhs: Vec<C64> = generators.iter().map(|g| g.inner(b)).collect();
                let coeffs: Vec<C64> = (0..count)
                    .map(|i| (0..count).map(|j| pinv.get(i, j) * rhs[j]).sum())
                    .collect();
                combine(&coeffs)
            })
            .collect();
        Self::new(domain, m, mapped)
    }

    pub fn identity(domain: OperatorSpace) -> Self {
        let n = domain.ambient_dim();
        Self::from_fn(domain, n, CMatrix::clone).expect("identity images are n x n")
    }

    pub fn domain(&self) -> &OperatorSpace {
        &self.domain
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn images(&self) -> &[CMatrix] {
        &self.images
    }

    /// `T(x)` for `x` in the domain; `x` is projected onto the domain first.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        self.apply_coordinates(&self.domain.coordinates(x))
    }

    pub fn apply_coordinates(&self, coordinates: &[C64]) -> CMatrix {
        let m = self.codomain_dim;
        let mut out = CMatrix::zeros(m, m);
        for (c, y) in coordinates.iter().zip(&self.images) {
            out.axpy(*c, y);
        }
        out
    }

    /// The amplification `T_k([x_ij]) = [T(x_ij)]`. Every `n × n` block of
    /// `x` must lie in the domain.
    pub fn apply_level(&self, k: usize, x: &CMatrix) -> Result<CMatrix> {
        let n = self.domain.ambient_dim();
        if k == 0 || x.rows() != k * n || x.cols() != k * n {
            return Err(Error::Dimension(format!(
                "level-{k} input must be {0}x{0}, got {1}x{2}",
                k * n,
                x.rows(),
                x.cols()
            )));
        }
        let m = self.codomain_dim;
        let mut out = CMatrix::zeros(k * m, k * m);
        for i in 0..k {
            for j in 0..k {
                let block = x.submatrix(i * n, j * n, n, n);
                let coords = self.domain.coordinates(&block);
                let distance = (&block - &self.domain.element(&coords)).frobenius_norm();
                if distance > MEMBERSHIP_TOL * block.frobenius_norm().max(1.0) {
                    return Err(Error::Membership {
                        row: i,
                        col: j,
                        distance,
                    });
                }
                out.set_block(i * m, j * m, &self.apply_coordinates(&coords));
            }
        }
        Ok(out)
    }

    /// Numerical rank of the images.
    pub fn rank(&self) -> usize {
        self.range_basis().len()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.domain.dim()
    }

    fn range_basis(&self) -> Vec<CMatrix> {
        let scale = self
            .images
            .iter()
            .map(CMatrix::frobenius_norm)
            .fold(0.0, f64::max);
        if scale == 0.0 {
            return Vec::new();
        }
        let mut builder =
            super::space::SpanBuilder::new(self.codomain_dim, SPAN_TOL * scale.max(1.0));
        for y in &self.images {
            builder.push(y);
        }
        builder.into_basis()
    }

    /// `T(X)` as an operator space (unital when it contains the identity).
    pub fn range_space(&self) -> Result<OperatorSpace> {
        let range = OperatorSpace::new(&self.images, false)?;
        let identity = CMatrix::identity(self.codomain_dim);
        let unital =
            range.distance(&identity) / (self.codomain_dim as f64).sqrt() <= MEMBERSHIP_TOL;
        if unital {
            OperatorSpace::new(&self.images, true)
        } else {
            Ok(range)
        }
    }

    /// The inverse `T(X) → X` of an injective map.
    pub fn inverse(&self) -> Result<SpaceMap> {
        if !self.is_injective() {
            return Err(Error::Contract("map is not injective".into()));
        }
        let mut generators = self.images.clone();
        let mut preimages = self.domain.basis().to_vec();
        let unital = self.range_space()?.is_unital();
        if unital {
            // Keep the unit explicit so the inverse's domain is marked unital.
            let unit_coords = self.solve_preimage(&CMatrix::identity(self.codomain_dim));
            generators.push(CMatrix::identity(self.codomain_dim));
            preimages.push(self.domain.element(&unit_coords));
        }
        SpaceMap::from_generators(&generators, &preimages, unital)
    }

    // Coordinates c with Σ c_i T(b_i) = y (least squares).
    fn solve_preimage(&self, y: &CMatrix) -> Vec<C64> {
        let d = self.images.len();
        let gram = CMatrix::from_fn(d, d, |i, j| self.images[i].inner(&self.images[j]));
        let (pinv, _) = gram.psd_pseudo_inverse(GRAM_CUTOFF);
        let rhs: Vec<C64> = self.images.iter().map(|img| img.inner(y)).collect();
        (0..d)
            .map(|i| (0..d).map(|j| pinv.get(i, j) * rhs[j]).sum())
            .collect()
    }

    /// `self ∘ other` where `other` maps into the ambient algebra of `self`'s domain.
    pub fn compose(&self, other: &SpaceMap) -> Result<SpaceMap> {
        if other.codomain_dim != self.domain.ambient_dim() {
            return Err(Error::Dimension(
                "composition dimensions do not match".into(),
            ));
        }
        SpaceMap::new(
            other.domain.clone(),
            self.codomain_dim,
            other.images.iter().map(|y| self.apply(y)).collect(),
        )
    }

    /// Multiplies every image by `s`.
    pub fn scaled(&self, s: C64) -> SpaceMap {
        SpaceMap {
            domain: self.domain.clone(),
            codomain_dim: self.codomain_dim,
            images: self.images.iter().map(|y| y.scale(s)).collect(),
        }
    }
}

/// JSON form of a map: `domain.basis` is a spanning set and `images[i]` is
/// the image of `domain.basis[i]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapRepr {
    pub domain: SpaceRepr,
    pub codomain_dim: usize,
    pub images: Vec<CMatrix>,
}

impl TryFrom<MapRepr> for SpaceMap {
    type Error = Error;

    fn try_from(repr: MapRepr) -> Result<Self> {
        repr.domain.check()?;
        if repr.images.len() != repr.domain.basis.len() {
            return Err(Error::Dimension(format!(
                "{} images for {} domain elements",
                repr.images.len(),
                repr.domain.basis.len()
            )));
        }
        for (i, y) in repr.images.iter().enumerate() {
            if y.rows() != repr.codomain_dim || y.cols() != repr.codomain_dim {
                return Err(Error::Dimension(format!(
                    "images[{i}] is {}x{}, codomain_dim is {}",
                    y.rows(),
                    y.cols(),
                    repr.codomain_dim
                )));
            }
        }
        SpaceMap::from_generators(
            &repr.domain.basis,
            &repr.images,
            repr.domain.unit_index.is_some(),
        )
    }
}

impl<'de> Deserialize<'de> for SpaceMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MapRepr::deserialize(d)?;
        SpaceMap::try_from(repr).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn transpose_map() -> SpaceMap {
        SpaceMap::from_fn(OperatorSpace::full(2), 2, CMatrix::transpose).unwrap()
    }

    fn swap() -> CMatrix {
        let mut s = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                s += &CMatrix::unit(2, i, j).kron(&CMatrix::unit(2, j, i));
            }
        }
        s
    }

    #[test]
    fn level_one_identity() {
        let id = SpaceMap::identity(OperatorSpace::full(2));
        let e12 = CMatrix::unit(2, 0, 1);
        assert!(id.apply_level(1, &e12).unwrap().dist(&e12) < 1e-14);
    }

    #[test]
    fn level_two_transpose_of_swap() {
        let out = transpose_map().apply_level(2, &swap()).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                expected += &CMatrix::unit(2, j, i).kron(&CMatrix::unit(2, j, i));
            }
        }
        assert!(out.dist(&expected) < 1e-14);
        assert!((out.opnorm().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn membership_error_reports_block() {
        let t2 = OperatorSpace::new(&[CMatrix::identity(2), CMatrix::unit(2, 0, 1)], true).unwrap();
        let map = SpaceMap::identity(t2);
        let mut x = CMatrix::zeros(4, 4);
        x.set_block(2, 0, &CMatrix::unit(2, 1, 0));
        match map.apply_level(2, &x) {
            Err(Error::Membership { row, col, distance }) => {
                assert_eq!((row, col), (1, 0));
                assert!((distance - 1.0).abs() < 1e-12);
            }
            other => panic!("expected membership error, got {other:?}"),
        }
    }

    #[test]
    fn generators_with_consistent_dependencies() {
        let a = CMatrix::unit(2, 0, 1);
        let gens = [a.clone(), a.scale_real(2.0)];
        let x = CMatrix::unit(3, 2, 2);
        let map = SpaceMap::from_generators(&gens, &[x.clone(), x.scale_real(2.0)], false).unwrap();
        assert_eq!(map.domain().dim(), 1);
        assert!(map.apply(&a).dist(&x) < 1e-12);

        let bad = SpaceMap::from_generators(&gens, &[x.clone(), x.scale_real(3.0)], false);
        assert!(matches!(bad, Err(Error::Contract(_))));
    }

    #[test]
    fn inverse_round_trip() {
        let t = transpose_map();
        let inv = t.inverse().unwrap();
        assert!(inv.domain().is_unital());
        let y = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert!(inv.apply(&t.apply(&y)).dist(&y) < 1e-12);
    }
}
