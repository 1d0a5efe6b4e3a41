//! Certificates for complete contractivity and complete isometry.
//!
//! The verdict comes from CP-extension feasibility of the Paulsen map. When
//! `X` and `T` are unital the smaller problem on `X + X*` is solved instead,
//! since a unital map is completely contractive exactly when its
//! self-adjoint extension is completely positive. Level-`k` ascent is used
//! only to exhibit witnesses for violations.

use serde::Serialize;

use super::ascent::level_bounds;
use super::cp::{cp_extension_feasible, Feasibility, FeasibilityReport, DEFAULT_MAX_ITERS};
use super::map::SpaceMap;
use super::paulsen::paulsen_map;
use crate::error::{Error, Result};
use crate::matcore::CMatrix;
use crate::random::DEFAULT_SEED;

const WITNESS_RESTARTS: usize = 8;
const UNITAL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CbVerdict {
    CompletelyContractive,
    Violated,
    /// Feasibility residual in `(tol, 100·tol]`.
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub level: usize,
    /// Normalized to operator norm one.
    pub matrix: CMatrix,
    /// `‖T_k(matrix)‖`.
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CbCertificate {
    pub verdict: CbVerdict,
    pub level_checked: usize,
    pub witness: Option<Witness>,
    pub feasibility_residual: f64,
    pub iterations: usize,
}

impl CbCertificate {
    pub fn is_completely_contractive(&self) -> bool {
        self.verdict == CbVerdict::CompletelyContractive
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IsometryCertificate {
    pub is_complete_isometry: bool,
    pub injective: bool,
    pub forward: CbCertificate,
    /// Absent when `T` is not injective.
    pub inverse: Option<CbCertificate>,
}

fn is_unital_map(t: &SpaceMap) -> bool {
    let x = t.domain();
    x.is_unital()
        && t.apply(&x.unit())
            .dist(&CMatrix::identity(t.codomain_dim()))
            <= UNITAL_TOL
}

/// The extension `x + y* ↦ T(x) + T(y)*` on `X + X*`, if well defined.
fn self_adjoint_extension(t: &SpaceMap) -> Option<SpaceMap> {
    let basis = t.domain().basis();
    let mut gens: Vec<CMatrix> = basis.to_vec();
    gens.extend(basis.iter().map(CMatrix::adjoint));
    let mut images: Vec<CMatrix> = t.images().to_vec();
    images.extend(t.images().iter().map(CMatrix::adjoint));
    SpaceMap::from_generators(&gens, &images, true).ok()
}

fn feasibility(t: &SpaceMap, tol: f64) -> Result<FeasibilityReport> {
    if is_unital_map(t) {
        if let Some(ext) = self_adjoint_extension(t) {
            return cp_extension_feasible(&ext, tol, DEFAULT_MAX_ITERS);
        }
    }
    cp_extension_feasible(&paulsen_map(t), tol, DEFAULT_MAX_ITERS)
}

/// Searches levels `1..=max_level` for `‖T_k(x)‖ > 1 + tol` with `‖x‖ = 1`.
pub fn find_violation(t: &SpaceMap, max_level: usize, tol: f64, seed: u64) -> Option<Witness> {
    level_bounds(t, max_level, WITNESS_RESTARTS, seed)
        .into_iter()
        .find(|b| b.bound > 1.0 + tol)
        .and_then(|b| {
            let norm = b.witness.opnorm().ok()?;
            let matrix = b.witness.scale_real(1.0 / norm);
            let ratio = t.apply_level(b.level, &matrix).ok()?.opnorm().ok()?;
            (ratio > 1.0 + tol).then_some(Witness {
                level: b.level,
                matrix,
                ratio,
            })
        })
}

pub fn is_completely_contractive(t: &SpaceMap, tol: f64) -> Result<CbCertificate> {
    is_completely_contractive_seeded(t, tol, DEFAULT_SEED)
}

pub fn is_completely_contractive_seeded(
    t: &SpaceMap,
    tol: f64,
    seed: u64,
) -> Result<CbCertificate> {
    if !(tol > 0.0) {
        return Err(Error::Contract(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let level = t.domain().ambient_dim().min(t.codomain_dim()).max(1);
    let report = feasibility(t, tol)?;
    let verdict = match report.status {
        Feasibility::Feasible => CbVerdict::CompletelyContractive,
        Feasibility::Indeterminate => CbVerdict::Indeterminate,
        Feasibility::Infeasible => CbVerdict::Violated,
    };
    let witness = if verdict == CbVerdict::CompletelyContractive {
        None
    } else {
        find_violation(t, level, tol, seed)
    };
    // A concrete witness settles an indeterminate feasibility result.
    let verdict = if witness.is_some() {
        CbVerdict::Violated
    } else {
        verdict
    };
    Ok(CbCertificate {
        verdict,
        level_checked: level,
        witness,
        feasibility_residual: report.residual,
        iterations: report.iterations,
    })
}

pub fn is_complete_isometry(t: &SpaceMap, tol: f64) -> Result<IsometryCertificate> {
    is_complete_isometry_seeded(t, tol, DEFAULT_SEED)
}

pub fn is_complete_isometry_seeded(
    t: &SpaceMap,
    tol: f64,
    seed: u64,
) -> Result<IsometryCertificate> {
    let injective = t.is_injective();
    let forward = is_completely_contractive_seeded(t, tol, seed)?;
    let inverse = if injective {
        Some(is_completely_contractive_seeded(&t.inverse()?, tol, seed)?)
    } else {
        None
    };
    let is_complete_isometry = injective
        && forward.is_completely_contractive()
        && inverse
            .as_ref()
            .is_some_and(CbCertificate::is_completely_contractive);
    Ok(IsometryCertificate {
        is_complete_isometry,
        injective,
        forward,
        inverse,
    })
}
