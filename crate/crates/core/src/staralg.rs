//! Finite-dimensional C*-algebras of matrices.
//!
//! A unital *-subalgebra `A ⊆ M_n` is unitarily a direct sum
//! `⊕_k M_{n_k} ⊗ I_{m_k}`. [`block_decompose`] recovers the minimal central
//! projections `p_k`, the profile `(n_k, m_k)` and, per block, an isometric
//! frame `F_k` such that `a ↦ F_k* a F_k` is an irreducible representation
//! of `A` on `ℂ^{n_k}`.
//!
//! Two-sided ideals are sums of blocks ([`BlockIdeal`]); the quotient by an
//! ideal is realized as the compression by the complement of its support
//! projection (the unit of the ideal).

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{orthonormal_columns, CMatrix, HermEig, C64};
use crate::opspace::space::{square_dim, SpanBuilder, SPAN_TOL};
use crate::random::{Rng, DEFAULT_SEED};

/// Smallest admissible separation between distinct eigenvalues of the
/// random central (or in-block) element.
pub const EIGENGAP: f64 = 1e-6;
/// Relative gap at which a sample is accepted without further resampling;
/// eigenvector error scales like roundoff over the gap.
const COMFORTABLE_GAP: f64 = 1e-2;
const MAX_RESAMPLES: usize = 16;

/// One central summand `M_{size} ⊗ I_{multiplicity}`.
#[derive(Clone, Debug, Serialize)]
pub struct Block {
    pub size: usize,
    pub multiplicity: usize,
    pub projection: CMatrix,
    /// `n × size` isometry onto an irreducible invariant subspace.
    #[serde(skip)]
    pub frame: CMatrix,
}

#[derive(Clone, Debug)]
pub struct StarAlgebra {
    ambient_dim: usize,
    basis: Vec<CMatrix>,
    center_basis: Vec<CMatrix>,
    unit: CMatrix,
    blocks: Vec<Block>,
}

impl StarAlgebra {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn center_basis(&self) -> &[CMatrix] {
        &self.center_basis
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// The unit of the algebra (the identity unless generated without it).
    pub fn unit(&self) -> &CMatrix {
        &self.unit
    }

    pub fn is_unital(&self) -> bool {
        self.unit.dist(&CMatrix::identity(self.ambient_dim)) <= 1e-9
    }

    /// `[(n_k, m_k)]` in block order.
    pub fn profile(&self) -> Vec<(usize, usize)> {
        self.blocks
            .iter()
            .map(|b| (b.size, b.multiplicity))
            .collect()
    }

    pub fn central_projections(&self) -> Vec<CMatrix> {
        self.blocks.iter().map(|b| b.projection.clone()).collect()
    }

    /// Irreducible representation of block `k`: `a ↦ F_k* a F_k`.
    pub fn represent(&self, k: usize, a: &CMatrix) -> CMatrix {
        let f = &self.blocks[k].frame;
        &(&f.adjoint() * a) * f
    }

    pub fn distance(&self, m: &CMatrix) -> f64 {
        let mut w = m.clone();
        for b in &self.basis {
            let c = b.inner(&w);
            w.axpy(-c, b);
        }
        w.frobenius_norm()
    }

    pub fn contains(&self, m: &CMatrix, tol: f64) -> bool {
        self.distance(m) <= tol * m.frobenius_norm().max(1.0)
    }

    /// Largest distance of `a*` or `ab` from the span over basis pairs.
    pub fn closure_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.basis {
            worst = worst.max(self.distance(&a.adjoint()));
            for b in &self.basis {
                worst = worst.max(self.distance(&(a * b)));
            }
        }
        worst
    }

    pub fn ideal(&self, kept_blocks: impl IntoIterator<Item = usize>) -> Result<BlockIdeal<'_>> {
        BlockIdeal::new(self, kept_blocks)
    }
}

/// The C*-algebra generated by `seeds` (plus the identity when
/// `include_unit`), decomposed with the default seed.
pub fn generate_star_algebra(seeds: &[CMatrix], include_unit: bool) -> Result<StarAlgebra> {
    generate_star_algebra_seeded(seeds, include_unit, DEFAULT_SEED)
}

pub fn generate_star_algebra_seeded(
    seeds: &[CMatrix],
    include_unit: bool,
    seed: u64,
) -> Result<StarAlgebra> {
    let n = square_dim(seeds)?;
    let mut generators: Vec<CMatrix> = Vec::new();
    if include_unit {
        generators.push(CMatrix::identity(n));
    }
    let scale = seeds
        .iter()
        .map(CMatrix::frobenius_norm)
        .fold(0.0, f64::max);
    for s in seeds {
        if scale > 0.0 && s.frobenius_norm() > SPAN_TOL * scale {
            let unit = s.scale_real(1.0 / s.frobenius_norm());
            generators.push(unit.adjoint());
            generators.push(unit);
        }
    }

    let mut span = SpanBuilder::new(n, SPAN_TOL);
    for g in &generators {
        span.push(g);
    }
    // Close under products; new elements are multiplied against everything.
    let mut frontier = 0;
    while frontier < span.len() {
        let end = span.len();
        for i in frontier..end {
            for j in 0..end {
                let a = span.basis()[i].clone();
                let b = span.basis()[j].clone();
                span.push(&(&a * &b));
                span.push(&(&b * &a));
            }
        }
        frontier = end;
        if span.len() == n * n {
            break;
        }
    }
    let basis = span.into_basis();
    let center_generators: Vec<CMatrix> = if generators.is_empty() {
        basis.clone()
    } else {
        generators
    };
    decompose(n, basis, &center_generators, seed)
}

/// Decomposes the *-algebra spanned by `span` (which must be closed under
/// products and adjoints).
pub fn block_decompose(span: &[CMatrix]) -> Result<StarAlgebra> {
    block_decompose_seeded(span, DEFAULT_SEED)
}

pub fn block_decompose_seeded(span: &[CMatrix], seed: u64) -> Result<StarAlgebra> {
    let n = square_dim(span)?;
    let scale = span.iter().map(CMatrix::frobenius_norm).fold(0.0, f64::max);
    let mut builder = SpanBuilder::new(n, SPAN_TOL * scale.max(1.0));
    for m in span {
        builder.push(m);
    }
    let basis = builder.into_basis();
    let closure = StarAlgebra {
        ambient_dim: n,
        basis: basis.clone(),
        center_basis: Vec::new(),
        unit: CMatrix::zeros(n, n),
        blocks: Vec::new(),
    }
    .closure_defect();
    if closure > 1e-8 {
        return Err(Error::Contract(format!(
            "span is not closed under products and adjoints (defect {closure:.3e})"
        )));
    }
    decompose(n, basis.clone(), &basis, seed)
}

fn decompose(
    n: usize,
    basis: Vec<CMatrix>,
    generators: &[CMatrix],
    seed: u64,
) -> Result<StarAlgebra> {
    let mut rng = Rng::seeded(seed);
    let center_basis = center(&basis, generators);
    let unit = project(&basis, &CMatrix::identity(n)).hermitian_part();

    let projections = minimal_central_projections(n, &basis, &center_basis, &unit, &mut rng)?;
    let mut blocks = Vec::with_capacity(projections.len());
    for p in projections {
        blocks.push(refine_block(n, &basis, p, &mut rng)?);
    }
    blocks.sort_by(|a, b| (b.size, b.multiplicity).cmp(&(a.size, a.multiplicity)));

    let dim_check: usize = blocks.iter().map(|b| b.size * b.size).sum();
    if dim_check != basis.len() {
        return Err(Error::NumericalDegeneracy(format!(
            "block sizes account for {dim_check} dimensions, algebra has {}",
            basis.len()
        )));
    }
    Ok(StarAlgebra {
        ambient_dim: n,
        basis,
        center_basis,
        unit,
        blocks,
    })
}

fn project(basis: &[CMatrix], m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(m.rows(), m.cols());
    for b in basis {
        out.axpy(b.inner(m), b);
    }
    out
}

/// Solves `[z, g] = 0` for `z` in the span, one equation per generator.
fn center(basis: &[CMatrix], generators: &[CMatrix]) -> Vec<CMatrix> {
    let d = basis.len();
    let commutators: Vec<Vec<CMatrix>> = basis
        .iter()
        .map(|a| generators.iter().map(|g| &(a * g) - &(g * a)).collect())
        .collect();
    let gram = CMatrix::from_fn(d, d, |i, l| {
        commutators[i]
            .iter()
            .zip(&commutators[l])
            .map(|(x, y)| x.inner(y))
            .sum()
    });
    let eig = gram.herm_eig().expect("Gram matrices are Hermitian");
    let top = eig.values.first().copied().unwrap_or(0.0).max(1.0);
    let null = eig.frame(|l| l <= 1e-12 * top);
    (0..null.cols())
        .map(|k| {
            let mut z = CMatrix::zeros(basis[0].rows(), basis[0].cols());
            for (alpha, a) in null.column(k).iter().zip(basis) {
                z.axpy(*alpha, a);
            }
            z
        })
        .collect()
}

/// Eigenvalues sorted descending, grouped where consecutive values differ by
/// less than `merge`.
fn clusters(values: &[f64], merge: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i - 1] - values[i] > merge {
            out.push((start, i));
            start = i;
        }
    }
    out
}

fn minimal_central_projections(
    n: usize,
    basis: &[CMatrix],
    center_basis: &[CMatrix],
    unit: &CMatrix,
    rng: &mut Rng,
) -> Result<Vec<CMatrix>> {
    let complement = &CMatrix::identity(n) - unit;
    let has_complement = complement.frobenius_norm() > 1e-6;
    let half_i = C64::new(0.0, -0.5);
    let hermitian: Vec<CMatrix> = center_basis
        .iter()
        .flat_map(|z| [z.hermitian_part(), (z - &z.adjoint()).scale(half_i)])
        .collect();

    let expected = center_basis.len() + usize::from(has_complement);
    let mut best: Option<(f64, f64, HermEig, Vec<(usize, usize)>)> = None;
    for _ in 0..MAX_RESAMPLES {
        let mut h = CMatrix::zeros(n, n);
        for z in &hermitian {
            h.axpy(C64::new(rng.normal(), 0.0), z);
        }
        let spread = h.opnorm().unwrap_or(0.0).max(1e-300);
        let shifted = &h + &complement.scale_real(3.0 * spread);
        let eig = shifted.herm_eig()?;
        let groups = clusters(&eig.values, 1e-9 * spread);
        if groups.len() != expected {
            continue;
        }
        let min_gap = groups
            .windows(2)
            .map(|w| eig.values[w[0].1 - 1] - eig.values[w[1].0])
            .fold(f64::INFINITY, f64::min)
            / spread;
        if best.as_ref().map_or(true, |b| min_gap > b.0) {
            best = Some((min_gap, spread, eig, groups));
        }
        if min_gap >= COMFORTABLE_GAP {
            break;
        }
    }
    if let Some((_, spread, eig, groups)) = best.filter(|b| b.0 >= EIGENGAP) {
        let mut out = Vec::with_capacity(center_basis.len());
        for &(lo, hi) in &groups {
            if has_complement && eig.values[lo] > 2.0 * spread {
                continue;
            }
            let cols: Vec<Vec<C64>> = (lo..hi).map(|j| eig.vectors.column(j)).collect();
            let frame = CMatrix::from_columns(n, &cols);
            let p = &frame * &frame.adjoint();
            out.push(project(basis, &p).hermitian_part());
        }
        return Ok(out);
    }
    Err(Error::NumericalDegeneracy(format!(
        "no central element with {} separated eigenvalues after {MAX_RESAMPLES} samples",
        center_basis.len()
    )))
}

fn refine_block(n: usize, basis: &[CMatrix], p: CMatrix, rng: &mut Rng) -> Result<Block> {
    let rank = p.trace().re.round() as usize;
    let mut compressions = SpanBuilder::new(n, SPAN_TOL);
    for a in basis {
        compressions.push(&(&p * a));
    }
    let d = compressions.len();
    let size = (d as f64).sqrt().round() as usize;
    if size * size != d || size == 0 || rank % size != 0 {
        return Err(Error::NumericalDegeneracy(format!(
            "central summand of rank {rank} has compression dimension {d}"
        )));
    }
    let multiplicity = rank / size;
    let complement = &CMatrix::identity(n) - &p;

    let mut best: Option<(f64, CMatrix)> = None;
    for _ in 0..MAX_RESAMPLES {
        let mut h = CMatrix::zeros(n, n);
        for a in compressions.basis() {
            h.axpy(C64::new(rng.normal(), 0.0), &a.hermitian_part());
        }
        let spread = h.opnorm().unwrap_or(0.0).max(1.0);
        let shifted = &(&(&p * &h) * &p) - &complement.scale_real(3.0 * spread);
        let eig = shifted.herm_eig()?;
        let groups = clusters(&eig.values, 1e-9 * spread);
        let (lo, hi) = groups[0];
        if hi - lo != multiplicity {
            continue;
        }
        let gap = if groups.len() < 2 {
            f64::INFINITY
        } else {
            (eig.values[hi - 1] - eig.values[groups[1].0]) / spread
        };
        // A vector in the range of a minimal projection is cyclic for an
        // irreducible summand.
        let xi = CMatrix::from_columns(n, &[eig.vectors.column(lo)]);
        let orbit: Vec<Vec<C64>> = basis.iter().map(|a| (&(&p * a) * &xi).column(0)).collect();
        let frame = orthonormal_columns(n, &orbit, 1e-8);
        if frame.cols() != size {
            continue;
        }
        if best.as_ref().map_or(true, |b| gap > b.0) {
            best = Some((gap, frame));
        }
        if gap >= COMFORTABLE_GAP {
            break;
        }
    }
    if let Some((_, frame)) = best.filter(|b| b.0 >= EIGENGAP) {
        return Ok(Block {
            size,
            multiplicity,
            projection: p,
            frame,
        });
    }
    Err(Error::NumericalDegeneracy(format!(
        "could not isolate an irreducible summand of a {size}x{size} block"
    )))
}

/// The two-sided ideal `⊕_{k ∉ kept} p_k A` of a decomposed algebra.
#[derive(Clone, Debug)]
pub struct BlockIdeal<'a> {
    parent: &'a StarAlgebra,
    kept_blocks: BTreeSet<usize>,
}

impl<'a> BlockIdeal<'a> {
    pub fn new(
        parent: &'a StarAlgebra,
        kept_blocks: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let kept_blocks: BTreeSet<usize> = kept_blocks.into_iter().collect();
        if let Some(&bad) = kept_blocks.iter().find(|&&k| k >= parent.blocks.len()) {
            return Err(Error::Dimension(format!(
                "block index {bad} out of range ({} blocks)",
                parent.blocks.len()
            )));
        }
        Ok(Self {
            parent,
            kept_blocks,
        })
    }

    pub fn parent(&self) -> &StarAlgebra {
        self.parent
    }

    pub fn kept_blocks(&self) -> &BTreeSet<usize> {
        &self.kept_blocks
    }

    /// Indices of the blocks forming the ideal.
    pub fn ideal_blocks(&self) -> Vec<usize> {
        (0..self.parent.blocks.len())
            .filter(|k| !self.kept_blocks.contains(k))
            .collect()
    }

    pub fn basis(&self) -> Vec<CMatrix> {
        let s = self.support_projection();
        let mut span = SpanBuilder::new(self.parent.ambient_dim, SPAN_TOL);
        for a in &self.parent.basis {
            span.push(&(&s * a));
        }
        span.into_basis()
    }

    /// The unit of the ideal, `Σ_{k ∉ kept} p_k`.
    pub fn support_projection(&self) -> CMatrix {
        let n = self.parent.ambient_dim;
        let mut s = CMatrix::zeros(n, n);
        for k in self.ideal_blocks() {
            s += &self.parent.blocks[k].projection;
        }
        s
    }

    /// Largest distance from the ideal of `aj` or `ja` (a in the algebra, j in
    /// the ideal).
    pub fn closure_defect(&self) -> f64 {
        let basis = self.basis();
        let dist = |m: &CMatrix| (m - &project(&basis, m)).frobenius_norm();
        let mut worst: f64 = 0.0;
        for j in &basis {
            for a in &self.parent.basis {
                worst = worst.max(dist(&(a * j))).max(dist(&(j * a)));
            }
        }
        worst
    }

    pub fn is_two_sided(&self, tol: f64) -> bool {
        self.closure_defect() <= tol
    }
}

/// The quotient `A/J` realized as `z ↦ e z e` with `e = 1 − s(J)`.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    pub complement: CMatrix,
    /// Images of the parent's basis.
    pub images: Vec<CMatrix>,
}

impl QuotientMap {
    pub fn apply(&self, z: &CMatrix) -> CMatrix {
        &(&self.complement * z) * &self.complement
    }
}

pub fn support_projection(ideal: &BlockIdeal<'_>) -> CMatrix {
    ideal.support_projection()
}

pub fn compress_quotient(algebra: &StarAlgebra, ideal: &BlockIdeal<'_>) -> QuotientMap {
    let n = algebra.ambient_dim;
    let complement = &CMatrix::identity(n) - &ideal.support_projection();
    let images = algebra
        .basis
        .iter()
        .map(|a| &(&complement * a) * &complement)
        .collect();
    QuotientMap { complement, images }
}
