//! Lower bounds for `‖T_k‖` by randomized ascent.
//!
//! Elements of `M_k(X)` are parametrized as `x = Σ_l c_l ⊗ b_l` over the
//! basis `b_l` of `X`, so `T_k(x) = Σ_l c_l ⊗ T(b_l)`. The ratio
//! `‖T_k(x)‖ / ‖x‖` is maximized by gradient ascent on a Schatten-`p`
//! surrogate whose exponent is raised towards the operator norm. Every
//! reported bound is the exact ratio at the returned witness.

use serde::Serialize;

use super::map::SpaceMap;
use crate::matcore::{CMatrix, C64};
use crate::random::Rng;

const SCHEDULE: [f64; 5] = [4.0, 16.0, 64.0, 256.0, 1024.0];
const STEPS_PER_STAGE: usize = 40;

#[derive(Clone, Debug, Serialize)]
pub struct LevelBound {
    pub level: usize,
    pub bound: f64,
    pub witness: CMatrix,
}

/// Best ratio `‖T_k(x)‖/‖x‖` found over `restarts` random starts plus a few
/// structured ones. Deterministic in `seed`; never exceeds `‖T_k‖`.
pub fn level_norm_lower_bound(t: &SpaceMap, k: usize, restarts: usize, seed: u64) -> LevelBound {
    level_bounds(t, k, restarts, seed).pop().expect("k >= 1")
}

/// Bounds for levels `1..=max_level`. Level `k + 1` starts from the level-`k`
/// witness padded with zeros, so the bounds are nondecreasing.
pub fn level_bounds(t: &SpaceMap, max_level: usize, restarts: usize, seed: u64) -> Vec<LevelBound> {
    assert!(max_level >= 1, "amplification level must be at least 1");
    let mut out: Vec<LevelBound> = Vec::with_capacity(max_level);
    for k in 1..=max_level {
        let level_seed = seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let previous = out.last().map(|b| pad(t, &b.witness, k));
        out.push(search_level(t, k, restarts, level_seed, previous));
    }
    out
}

struct Problem<'a> {
    t: &'a SpaceMap,
    k: usize,
}

impl Problem<'_> {
    fn assemble(&self, coeffs: &[CMatrix], images: bool) -> CMatrix {
        let size = if images {
            self.t.codomain_dim()
        } else {
            self.t.domain().ambient_dim()
        };
        let mut out = CMatrix::zeros(self.k * size, self.k * size);
        let parts = if images {
            self.t.images()
        } else {
            self.t.domain().basis()
        };
        for (c, b) in coeffs.iter().zip(parts) {
            out += &c.kron(b);
        }
        out
    }

    fn ratio(&self, coeffs: &[CMatrix]) -> f64 {
        let den = self.assemble(coeffs, false).opnorm().unwrap_or(0.0);
        if den == 0.0 {
            return 0.0;
        }
        self.assemble(coeffs, true).opnorm().unwrap_or(0.0) / den
    }

    // log‖T_k x‖_p − log‖x‖_p and its gradient in the coefficients.
    fn surrogate(&self, coeffs: &[CMatrix], p: f64) -> Option<(f64, Vec<CMatrix>)> {
        let (num, g_num) = schatten(&self.assemble(coeffs, true), p)?;
        let (den, g_den) = schatten(&self.assemble(coeffs, false), p)?;
        let n = self.t.domain().ambient_dim();
        let m = self.t.codomain_dim();
        let grad = self
            .t
            .domain()
            .basis()
            .iter()
            .zip(self.t.images())
            .map(|(b, tb)| {
                CMatrix::from_fn(self.k, self.k, |i, j| {
                    let up = tb.inner(&g_num.submatrix(i * m, j * m, m, m)) / num;
                    let down = b.inner(&g_den.submatrix(i * n, j * n, n, n)) / den;
                    up - down
                })
            })
            .collect();
        Some((num.ln() - den.ln(), grad))
    }
}

/// `‖M‖_p` and its gradient with respect to the real inner product
/// `Re Tr(G* dM)`.
fn schatten(m: &CMatrix, p: f64) -> Option<(f64, CMatrix)> {
    let svd = m.as_nalgebra().clone().svd(true, true);
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let top = sigma.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return None;
    }
    let sum: f64 = sigma.iter().map(|s| (s / top).powf(p)).sum();
    let norm = top * sum.powf(1.0 / p);
    let u = svd.u.as_ref()?;
    let v_t = svd.v_t.as_ref()?;
    let scale = sum.powf((p - 1.0) / p);
    let mut weighted = u.clone();
    for (j, s) in sigma.iter().enumerate() {
        let w = (s / top).powf(p - 1.0) / scale;
        weighted.column_mut(j).scale_mut(w);
    }
    Some((norm, CMatrix::from_nalgebra(weighted * v_t)))
}

fn pad(t: &SpaceMap, witness: &CMatrix, k: usize) -> Vec<CMatrix> {
    let n = t.domain().ambient_dim();
    let prev = k - 1;
    t.domain()
        .basis()
        .iter()
        .map(|b| {
            CMatrix::from_fn(k, k, |i, j| {
                if i < prev && j < prev {
                    b.inner(&witness.submatrix(i * n, j * n, n, n))
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        })
        .collect()
}

fn normalize(coeffs: &mut [CMatrix]) {
    let norm = coeffs
        .iter()
        .map(|c| c.frobenius_norm().powi(2))
        .sum::<f64>()
        .sqrt();
    if norm > 0.0 {
        for c in coeffs.iter_mut() {
            *c = c.scale_real(1.0 / norm);
        }
    }
}

fn climb(problem: &Problem<'_>, mut coeffs: Vec<CMatrix>) -> (f64, Vec<CMatrix>) {
    normalize(&mut coeffs);
    let mut best_ratio = problem.ratio(&coeffs);
    let mut best = coeffs.clone();
    for &p in &SCHEDULE {
        let Some((mut value, mut grad)) = problem.surrogate(&coeffs, p) else {
            break;
        };
        let mut step = 0.5;
        for _ in 0..STEPS_PER_STAGE {
            let gnorm = grad
                .iter()
                .map(|g| g.frobenius_norm().powi(2))
                .sum::<f64>()
                .sqrt();
            if gnorm < 1e-14 {
                break;
            }
            let mut accepted = false;
            while step > 1e-10 {
                let mut trial: Vec<CMatrix> = coeffs.clone();
                for (c, g) in trial.iter_mut().zip(&grad) {
                    c.axpy(C64::new(step / gnorm, 0.0), g);
                }
                normalize(&mut trial);
                if let Some((v, g)) = problem.surrogate(&trial, p) {
                    if v > value {
                        coeffs = trial;
                        value = v;
                        grad = g;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            step = (step * 2.0).min(1.0);
        }
        let r = problem.ratio(&coeffs);
        if r > best_ratio {
            best_ratio = r;
            best = coeffs.clone();
        }
    }
    (best_ratio, best)
}

fn search_level(
    t: &SpaceMap,
    k: usize,
    restarts: usize,
    seed: u64,
    previous: Option<Vec<CMatrix>>,
) -> LevelBound {
    let problem = Problem { t, k };
    let d = t.domain().dim();
    let n = t.domain().ambient_dim();
    let mut starts: Vec<Vec<CMatrix>> = Vec::new();
    if let Some(prev) = previous {
        starts.push(prev);
    }
    if k == 1 {
        for l in 0..d {
            starts.push(
                (0..d)
                    .map(|i| CMatrix::diag_real(&[if i == l { 1.0 } else { 0.0 }]))
                    .collect(),
            );
        }
    }
    if k <= n {
        // [P_X(E_ji)]_{ij}: the swap matrix when X = M_k.
        let swap: Vec<CMatrix> = t
            .domain()
            .basis()
            .iter()
            .map(|b| CMatrix::from_fn(k, k, |i, j| b.get(j, i).conj()))
            .collect();
        starts.push(swap);
    }
    let mut rng = Rng::seeded(seed);
    for _ in 0..restarts {
        starts.push(
            (0..d)
                .map(|_| CMatrix::from_fn(k, k, |_, _| rng.complex_normal()))
                .collect(),
        );
    }

    let mut best_ratio = -1.0;
    let mut best: Vec<CMatrix> = Vec::new();
    for start in starts {
        if start.iter().all(|c| c.frobenius_norm() == 0.0) {
            continue;
        }
        let (r, coeffs) = climb(&problem, start);
        if r > best_ratio {
            best_ratio = r;
            best = coeffs;
        }
    }
    if best.is_empty() {
        best = (0..d).map(|_| CMatrix::zeros(k, k)).collect();
        best_ratio = 0.0;
    }
    LevelBound {
        level: k,
        bound: best_ratio.max(0.0),
        witness: problem.assemble(&best, false),
    }
}
