//! Complete positivity: the Choi criterion on full matrix algebras and an
//! extension-feasibility solver for maps defined on operator systems.
//!
//! A map `Φ` on an operator system `S ⊆ M_p` is completely positive iff it
//! has a completely positive extension to the C*-algebra `C*(S)`. Writing
//! `C*(S) ≅ ⊕_j M_{n_j}` and `C*(Φ(S)) ≅ ⊕_i M_{q_i}`, the question splits
//! into one problem per target block `i`: find positive semidefinite Choi
//! matrices `C_j ∈ M_{n_j} ⊗ M_{q_i}` with
//!
//! ```text
//!     Σ_j L_{C_j}(ρ_j(s)) = σ_i(Φ(s))      for s in a Hermitian basis of S,
//! ```
//!
//! where `L_C(y) = Σ_ab y_ab C[a,b]`. Each problem is solved by alternating
//! projections between the PSD cone and the affine matching set, with
//! Anderson mixing on the composed projection.

use std::collections::VecDeque;

use serde::Serialize;

use super::map::SpaceMap;
use crate::error::{Error, Result};
use crate::matcore::{CMatrix, C64};
use crate::staralg::generate_star_algebra;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITERS: usize = 20_000;
/// Residuals in `(tol, INDETERMINATE_FACTOR·tol]` are reported as indeterminate.
pub const INDETERMINATE_FACTOR: f64 = 100.0;
/// Minimum eigenvalue accepted by the Choi test.
pub const CHOI_TOL: f64 = 1e-9;

const STAR_COMPAT_TOL: f64 = 1e-8;
const PLATEAU_WINDOW: usize = 250;
const PLATEAU_DECREASE: f64 = 1e-4;
const ANDERSON_MEMORY: usize = 8;
const ANDERSON_REGULARIZATION: f64 = 1e-10;
/// Gap growth over the best iterate that triggers an Anderson restart.
const RESTART_GROWTH: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Feasibility {
    Feasible,
    Indeterminate,
    Infeasible,
}

#[derive(Clone, Debug, Serialize)]
pub struct FeasibilityReport {
    pub status: Feasibility,
    /// Frobenius distance from the final affine iterate to the PSD cone.
    pub residual: f64,
    pub iterations: usize,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.status == Feasibility::Feasible
    }

    fn classify(residual: f64, iterations: usize, tol: f64) -> Self {
        let status = if residual <= tol {
            Feasibility::Feasible
        } else if residual <= INDETERMINATE_FACTOR * tol {
            Feasibility::Indeterminate
        } else {
            Feasibility::Infeasible
        };
        Self {
            status,
            residual,
            iterations,
        }
    }

    /// Combines reports of independent sub-problems by root-sum-square.
    fn merge(parts: &[FeasibilityReport], tol: f64) -> Self {
        let residual = parts
            .iter()
            .map(|r| r.residual * r.residual)
            .sum::<f64>()
            .sqrt();
        let iterations = parts.iter().map(|r| r.iterations).max().unwrap_or(0);
        Self::classify(residual, iterations, tol)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChoiTest {
    pub is_cp: bool,
    pub min_eigenvalue: f64,
    pub rank: usize,
}

/// `Σ_ij E_ij ⊗ L(E_ij)`, with `images[i·p + j] = L(E_ij)`.
pub fn choi_matrix(p: usize, images: &[CMatrix]) -> Result<CMatrix> {
    if images.len() != p * p {
        return Err(Error::Dimension(format!(
            "a map on M_{p} needs {} images, got {}",
            p * p,
            images.len()
        )));
    }
    let q = images.first().map_or(0, CMatrix::rows);
    if images.iter().any(|y| y.rows() != q || y.cols() != q) {
        return Err(Error::Dimension(
            "images must share one square shape".into(),
        ));
    }
    let mut choi = CMatrix::zeros(p * q, p * q);
    for i in 0..p {
        for j in 0..p {
            choi.set_block(i * q, j * q, &images[i * p + j]);
        }
    }
    Ok(choi)
}

/// Choi's criterion for a map on the full algebra `M_p`.
pub fn choi_cp_test(p: usize, images: &[CMatrix]) -> Result<ChoiTest> {
    let choi = choi_matrix(p, images)?;
    let eig = choi.hermitian_part().herm_eig()?;
    let min_eigenvalue = eig.values.last().copied().unwrap_or(0.0);
    let top = eig.values.first().copied().unwrap_or(0.0).abs().max(1.0);
    let rank = eig.values.iter().filter(|l| l.abs() > 1e-9 * top).count();
    Ok(ChoiTest {
        is_cp: min_eigenvalue >= -CHOI_TOL,
        min_eigenvalue,
        rank,
    })
}

/// One block-reduced extension problem: find PSD `C_j ∈ M_{n_j} ⊗ M_q` with
/// `Σ_j L_{C_j}(inputs[k][j]) = targets[k]` for every constraint `k`.
#[derive(Clone, Debug)]
pub(crate) struct CpProblem {
    pub domain_sizes: Vec<usize>,
    pub target_dim: usize,
    pub inputs: Vec<Vec<CMatrix>>,
    pub targets: Vec<CMatrix>,
}

type Choi = Vec<CMatrix>;

impl CpProblem {
    fn constraint_map(&self, c: &Choi) -> Vec<CMatrix> {
        let q = self.target_dim;
        self.inputs
            .iter()
            .map(|per_block| {
                let mut out = CMatrix::zeros(q, q);
                for ((y, cj), &nj) in per_block.iter().zip(c).zip(&self.domain_sizes) {
                    for a in 0..nj {
                        for b in 0..nj {
                            let w = y.get(a, b);
                            if w != C64::new(0.0, 0.0) {
                                out.axpy(w, &cj.submatrix(a * q, b * q, q, q));
                            }
                        }
                    }
                }
                out
            })
            .collect()
    }

    fn adjoint_map(&self, z: &[CMatrix]) -> Choi {
        let q = self.target_dim;
        self.domain_sizes
            .iter()
            .enumerate()
            .map(|(j, &nj)| {
                let mut out = CMatrix::zeros(nj * q, nj * q);
                for (per_block, zk) in self.inputs.iter().zip(z) {
                    out += &per_block[j].conj().kron(zk);
                }
                out
            })
            .collect()
    }

    fn gram(&self) -> CMatrix {
        let k = self.inputs.len();
        CMatrix::from_fn(k, k, |r, l| {
            self.inputs[r]
                .iter()
                .zip(&self.inputs[l])
                .map(|(yr, yl)| yl.inner(yr))
                .sum()
        })
    }

    pub(crate) fn solve(&self, tol: f64, max_iters: usize) -> FeasibilityReport {
        let q = self.target_dim;
        let k = self.inputs.len();
        let (pinv, null) = self.gram().psd_pseudo_inverse(1e-12);

        let mix = |r: &[CMatrix]| -> Vec<CMatrix> {
            (0..k)
                .map(|a| {
                    let mut out = CMatrix::zeros(q, q);
                    for (l, rl) in r.iter().enumerate() {
                        out.axpy(pinv.get(a, l), rl);
                    }
                    out
                })
                .collect()
        };

        let mut inconsistency: f64 = 0.0;
        for col in 0..null.cols() {
            let mut s = CMatrix::zeros(q, q);
            for (mu, b) in null.column(col).iter().zip(&self.targets) {
                s.axpy(mu.conj(), b);
            }
            inconsistency = inconsistency.max(s.frobenius_norm());
        }
        if inconsistency > tol {
            return FeasibilityReport::classify(inconsistency, 0, tol);
        }

        let project_affine = |c: &Choi| -> Choi {
            let r: Vec<CMatrix> = self
                .constraint_map(c)
                .iter()
                .zip(&self.targets)
                .map(|(ac, b)| ac - b)
                .collect();
            let correction = self.adjoint_map(&mix(&r));
            c.iter()
                .zip(&correction)
                .map(|(x, d)| (x - d).hermitian_part())
                .collect()
        };
        let project_psd = |c: &Choi| -> Choi { c.iter().map(CMatrix::psd_project).collect() };
        let distance = |a: &Choi, b: &Choi| -> f64 {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).frobenius_norm().powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let to_cone = |c: &Choi| distance(c, &project_psd(c));

        let zero: Choi = self
            .domain_sizes
            .iter()
            .map(|&n| CMatrix::zeros(n * q, n * q))
            .collect();
        let mut y = project_affine(&zero);

        let variables: usize = self.domain_sizes.iter().map(|n| (n * q) * (n * q)).sum();
        let constraints = (k - null.cols()) * q * q;
        if constraints >= variables {
            return FeasibilityReport::classify(to_cone(&y), 1, tol);
        }

        let mut anderson = Anderson::new(ANDERSON_MEMORY);
        let mut best = (f64::INFINITY, y.clone());
        let mut history: Vec<f64> = Vec::new();
        let mut iterations = 0;
        for it in 1..=max_iters {
            iterations = it;
            let z = project_psd(&y);
            let gap = distance(&y, &z);
            if gap < best.0 {
                best = (gap, y.clone());
            }
            if gap <= tol {
                break;
            }
            history.push(best.0);
            if it >= 2 * PLATEAU_WINDOW && best.0 > INDETERMINATE_FACTOR * tol {
                let before = history[history.len() - 1 - PLATEAU_WINDOW];
                if before - best.0 < PLATEAU_DECREASE * best.0 {
                    break;
                }
            }
            if gap > RESTART_GROWTH * best.0 {
                anderson.clear();
                y = project_affine(&project_psd(&best.1));
                continue;
            }
            let g = project_affine(&z);
            y = anderson.step(&y, g);
        }
        FeasibilityReport::classify(best.0.min(to_cone(&y)), iterations, tol)
    }
}

/// Type-II Anderson mixing for the fixed-point map `y ↦ P_aff(P_psd(y))`.
/// New iterates are affine combinations of past images, so they stay in the
/// affine matching set.
struct Anderson {
    memory: usize,
    images: VecDeque<Choi>,
    residuals: VecDeque<Choi>,
}

impl Anderson {
    fn new(memory: usize) -> Self {
        Self {
            memory,
            images: VecDeque::new(),
            residuals: VecDeque::new(),
        }
    }

    fn clear(&mut self) {
        self.images.clear();
        self.residuals.clear();
    }

    fn step(&mut self, y: &Choi, g: Choi) -> Choi {
        let f: Choi = g.iter().zip(y).map(|(a, b)| a - b).collect();
        self.images.push_back(g);
        self.residuals.push_back(f);
        if self.images.len() > self.memory + 1 {
            self.images.pop_front();
            self.residuals.pop_front();
        }
        let m = self.images.len() - 1;
        let latest = self.images.len() - 1;
        if m == 0 {
            return self.images[latest].clone();
        }
        let delta = |v: &VecDeque<Choi>, i: usize| -> Choi {
            v[i + 1].iter().zip(&v[i]).map(|(a, b)| a - b).collect()
        };
        let df: Vec<Choi> = (0..m).map(|i| delta(&self.residuals, i)).collect();
        let dg: Vec<Choi> = (0..m).map(|i| delta(&self.images, i)).collect();
        let dot = |a: &Choi, b: &Choi| -> f64 { a.iter().zip(b).map(|(x, y)| x.inner(y).re).sum() };
        let mut normal = nalgebra::DMatrix::<f64>::from_fn(m, m, |i, j| dot(&df[i], &df[j]));
        let scale = (0..m).map(|i| normal[(i, i)]).fold(0.0, f64::max);
        for i in 0..m {
            normal[(i, i)] += ANDERSON_REGULARIZATION * scale.max(f64::MIN_POSITIVE);
        }
        let rhs = nalgebra::DVector::<f64>::from_fn(m, |i, _| dot(&df[i], &self.residuals[latest]));
        let Some(gamma) = normal.lu().solve(&rhs) else {
            let plain = self.images[latest].clone();
            self.clear();
            return plain;
        };
        let mut next = self.images[latest].clone();
        for (gi, dgi) in gamma.iter().zip(&dg) {
            for (x, d) in next.iter_mut().zip(dgi) {
                x.axpy(C64::new(-gi, 0.0), d);
            }
        }
        next
    }
}

/// Decides whether `phi`, defined on a unital self-adjoint space `S`, admits
/// a completely positive extension.
pub fn cp_extension_feasible(
    phi: &SpaceMap,
    tol: f64,
    max_iters: usize,
) -> Result<FeasibilityReport> {
    let system = phi.domain();
    if !system.is_unital() {
        return Err(Error::Contract(
            "the domain of a CP-extension problem must be unital".into(),
        ));
    }
    if !system.is_self_adjoint(STAR_COMPAT_TOL) {
        return Err(Error::Contract(
            "the domain is not closed under adjoints".into(),
        ));
    }
    let scale = phi
        .images()
        .iter()
        .map(CMatrix::frobenius_norm)
        .fold(1.0, f64::max);
    for s in system.basis() {
        let defect = (&phi.apply(&s.adjoint()) - &phi.apply(s).adjoint()).frobenius_norm();
        if defect > STAR_COMPAT_TOL * scale {
            return Err(Error::Contract(format!(
                "map is not *-compatible (defect {defect:.3e})"
            )));
        }
    }

    let hermitian = system.hermitian_basis();
    let values: Vec<CMatrix> = hermitian
        .iter()
        .map(|h| phi.apply(h).hermitian_part())
        .collect();
    let source = generate_star_algebra(&hermitian, true)?;
    let target = generate_star_algebra(&values, true)?;

    let domain_sizes: Vec<usize> = source.blocks().iter().map(|b| b.size).collect();
    let inputs: Vec<Vec<CMatrix>> = hermitian
        .iter()
        .map(|h| {
            (0..domain_sizes.len())
                .map(|j| source.represent(j, h).hermitian_part())
                .collect()
        })
        .collect();

    let blocks = target.blocks().len();
    // Each part gets an equal share of the tolerance so the combined residual meets `tol`.
    let part_tol = tol / (blocks as f64).sqrt();
    let reports: Vec<FeasibilityReport> = (0..blocks)
        .map(|i| {
            CpProblem {
                domain_sizes: domain_sizes.clone(),
                target_dim: target.blocks()[i].size,
                inputs: inputs.clone(),
                targets: values
                    .iter()
                    .map(|v| target.represent(i, v).hermitian_part())
                    .collect(),
            }
            .solve(part_tol, max_iters)
        })
        .collect();
    Ok(FeasibilityReport::merge(&reports, tol))
}
