//! Banach–Stone decompositions of complete isometries.
//!
//! A complete isometry `T` from a unital operator algebra `A` into `M_m`
//! factors as `T(a)e = u π(a)` with `u` a partial isometry from `e` to `f`
//! and `π` a 1-1 homomorphism. The projection `p₀ = f ⊕ e` is the co-support
//! of the C*-envelope of the Paulsen system `S(T(A)) ⊆ M_{2m}`, so
//!
//! ```text
//!     p₀ = [ f  0 ]     u = f T(1) e,     π(a) = u* T(a).
//!          [ 0  e ]
//! ```
//!
//! Every constructor reports all residuals, and [`check_soundness`]
//! re-certifies a decomposition from `(e, u, π)` alone.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::envelope::{c_star_envelope_with, EnvelopeResult};
use crate::error::{Error, Result};
use crate::matcore::{CMatrix, C64};
use crate::opspace::{
    is_complete_isometry_seeded, paulsen_system, CbCertificate, IsometryCertificate, SpaceMap,
    MEMBERSHIP_TOL,
};
use crate::random::{Rng, DEFAULT_SEED};

/// Residuals above `FAILURE_FACTOR · tol` fail verification.
pub const FAILURE_FACTOR: f64 = 10.0;
/// Highest amplification level sampled when certifying `π`.
pub const MAX_SOUNDNESS_LEVEL: usize = 4;
const SOUNDNESS_SAMPLES: usize = 24;
const PROJECTION_CUT: f64 = 0.5;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Residuals {
    /// `max_a max(‖T(a)e − uπ(a)‖, ‖fT(a) − T(a)e‖)`.
    pub factorization: f64,
    /// `max_a ‖π(a) − u*T(a)‖`.
    pub reverse: f64,
    /// `‖u*u − e‖`.
    pub initial: f64,
    /// `‖uu* − f‖`.
    #[serde(rename = "final")]
    pub final_: f64,
    /// `max_{a,b} ‖π(ab) − π(a)π(b)‖`.
    pub multiplicativity: f64,
    /// `‖π(1) − e‖`.
    pub unitality: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        [
            self.factorization,
            self.reverse,
            self.initial,
            self.final_,
            self.multiplicativity,
            self.unitality,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl fmt::Display for Residuals {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "factorization={:.3e} reverse={:.3e} initial={:.3e} final={:.3e} multiplicativity={:.3e} unitality={:.3e}",
            self.factorization, self.reverse, self.initial, self.final_, self.multiplicativity, self.unitality
        )
    }
}

/// Sampled check that `‖x‖ = ‖π_k(x)‖ ≤ ‖T_k(x)‖ ≤ ‖x‖`.
#[derive(Clone, Debug, Serialize)]
pub struct SoundnessReport {
    pub levels: usize,
    pub samples_per_level: usize,
    pub algebraic: Residuals,
    /// `max |‖π_k(x)‖ − ‖x‖|`.
    pub pi_isometry_defect: f64,
    /// `max (‖π_k(x)‖ − ‖T_k(x)‖)⁺`.
    pub domination_defect: f64,
    /// `max (‖T_k(x)‖ − ‖x‖)⁺`.
    pub contraction_defect: f64,
    pub certified: bool,
}

#[derive(Clone, Debug)]
pub struct IsometryDecomposition {
    pub e: CMatrix,
    pub f: CMatrix,
    pub u: CMatrix,
    /// `π` on the domain basis.
    pub pi_images: Vec<CMatrix>,
    pub residuals: Residuals,
    pub soundness: SoundnessReport,
    pub verified: bool,
}

#[derive(Serialize)]
struct DecompositionJson<'a> {
    e: &'a CMatrix,
    f: &'a CMatrix,
    u: &'a CMatrix,
    pi: &'a [CMatrix],
    residuals: &'a Residuals,
    verified: bool,
}

impl Serialize for IsometryDecomposition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DecompositionJson {
            e: &self.e,
            f: &self.f,
            u: &self.u,
            pi: &self.pi_images,
            residuals: &self.residuals,
            verified: self.verified,
        }
        .serialize(s)
    }
}

fn require_operator_algebra(t: &SpaceMap) -> Result<()> {
    let a = t.domain();
    if !a.is_unital() {
        return Err(Error::Contract(
            "the domain must be a unital operator algebra".into(),
        ));
    }
    let defect = a.product_defect();
    if defect > MEMBERSHIP_TOL {
        return Err(Error::Contract(format!(
            "the domain span is not closed under products (defect {defect:.3e}); decompositions need an operator algebra"
        )));
    }
    Ok(())
}

fn opnorm(m: &CMatrix) -> f64 {
    m.opnorm().expect("nonempty matrix")
}

/// `π` extended linearly to the domain span.
fn pi_apply(t: &SpaceMap, pi_images: &[CMatrix], a: &CMatrix) -> CMatrix {
    let m = t.codomain_dim();
    let mut out = CMatrix::zeros(m, m);
    for (c, p) in t.domain().coordinates(a).iter().zip(pi_images) {
        out.axpy(*c, p);
    }
    out
}

fn compute_residuals(
    t: &SpaceMap,
    e: &CMatrix,
    f: &CMatrix,
    u: &CMatrix,
    pi_images: &[CMatrix],
) -> Residuals {
    let a = t.domain();
    let ustar = u.adjoint();
    let mut r = Residuals {
        initial: opnorm(&(&(&ustar * u) - e)),
        final_: opnorm(&(&(u * &ustar) - f)),
        unitality: opnorm(&(&pi_apply(t, pi_images, &a.unit()) - e)),
        ..Residuals::default()
    };
    for (ta, pa) in t.images().iter().zip(pi_images) {
        let tae = ta * e;
        r.factorization = r
            .factorization
            .max(opnorm(&(&tae - &(u * pa))))
            .max(opnorm(&(&(f * ta) - &tae)));
        r.reverse = r.reverse.max(opnorm(&(pa - &(&ustar * ta))));
    }
    for (x, px) in a.basis().iter().zip(pi_images) {
        for (y, py) in a.basis().iter().zip(pi_images) {
            let defect = &pi_apply(t, pi_images, &(x * y)) - &(px * py);
            r.multiplicativity = r.multiplicativity.max(opnorm(&defect));
        }
    }
    r
}

fn amplify(parts: &[CMatrix], coeffs: &[CMatrix]) -> CMatrix {
    let mut terms = coeffs.iter().zip(parts).map(|(c, p)| c.kron(p));
    let first = terms.next().expect("nonempty basis");
    terms.fold(first, |acc, t| &acc + &t)
}

/// Re-certifies complete isometry of `T` from `(e, u, π)` at levels
/// `1..=levels`, using the algebraic identities and sampled norms.
pub fn check_soundness(
    t: &SpaceMap,
    e: &CMatrix,
    u: &CMatrix,
    pi_images: &[CMatrix],
    levels: usize,
    tol: f64,
    seed: u64,
) -> SoundnessReport {
    let f = u * &u.adjoint();
    let algebraic = compute_residuals(t, e, &f, u, pi_images);
    let basis = t.domain().basis();
    let mut rng = Rng::seeded(seed);
    let (mut pi_defect, mut domination, mut contraction): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in 1..=levels {
        let mut samples: Vec<Vec<CMatrix>> = Vec::new();
        if k == 1 {
            for l in 0..basis.len() {
                samples.push(
                    (0..basis.len())
                        .map(|i| CMatrix::diag_real(&[if i == l { 1.0 } else { 0.0 }]))
                        .collect(),
                );
            }
        }
        for _ in 0..SOUNDNESS_SAMPLES {
            samples.push(
                basis
                    .iter()
                    .map(|_| CMatrix::from_fn(k, k, |_, _| rng.complex_normal()))
                    .collect(),
            );
        }
        for coeffs in samples {
            let x = opnorm(&amplify(basis, &coeffs));
            if x == 0.0 {
                continue;
            }
            let p = opnorm(&amplify(pi_images, &coeffs)) / x;
            let tx = opnorm(&amplify(t.images(), &coeffs)) / x;
            pi_defect = pi_defect.max((p - 1.0).abs());
            domination = domination.max(p - tx);
            contraction = contraction.max(tx - 1.0);
        }
    }
    let bound = FAILURE_FACTOR * tol;
    let certified = algebraic.max() <= bound
        && pi_defect <= bound
        && domination <= bound
        && contraction <= bound;
    SoundnessReport {
        levels,
        samples_per_level: SOUNDNESS_SAMPLES,
        algebraic,
        pi_isometry_defect: pi_defect,
        domination_defect: domination.max(0.0),
        contraction_defect: contraction.max(0.0),
        certified,
    }
}

fn finish(
    t: &SpaceMap,
    e: CMatrix,
    f: CMatrix,
    u: CMatrix,
    pi_images: Vec<CMatrix>,
    tol: f64,
    seed: u64,
) -> Result<IsometryDecomposition> {
    let residuals = compute_residuals(t, &e, &f, &u, &pi_images);
    let levels = t.domain().dim().clamp(1, MAX_SOUNDNESS_LEVEL);
    let soundness = check_soundness(t, &e, &u, &pi_images, levels, tol, seed);
    if residuals.max() > FAILURE_FACTOR * tol || !soundness.certified {
        return Err(Error::DecompositionFailure { residuals });
    }
    Ok(IsometryDecomposition {
        e,
        f,
        u,
        pi_images,
        residuals,
        soundness,
        verified: true,
    })
}

fn central_defect(envelope: &EnvelopeResult) -> f64 {
    let p = &envelope.co_support;
    envelope
        .generated
        .basis()
        .iter()
        .map(|b| opnorm(&(&(p * b) - &(b * p))))
        .fold(0.0, f64::max)
}

fn describe(cert: &IsometryCertificate) -> String {
    let side = |name: &str, c: &CbCertificate| {
        let witness = c
            .witness
            .as_ref()
            .map(|w| format!(", witness at level {} with ratio {:.6}", w.level, w.ratio));
        format!(
            "{name}: {:?} (residual {:.3e}{})",
            c.verdict,
            c.feasibility_residual,
            witness.unwrap_or_default()
        )
    };
    match &cert.inverse {
        Some(inv) => format!(
            "{}; {}",
            side("forward", &cert.forward),
            side("inverse", inv)
        ),
        None => format!("not injective; {}", side("forward", &cert.forward)),
    }
}

pub fn decompose_unital(t: &SpaceMap, tol: f64) -> Result<IsometryDecomposition> {
    decompose_unital_seeded(t, tol, DEFAULT_SEED)
}

/// Unital case: `e = f = u` is the co-support of the envelope of `T(A)`
/// and `π(a) = eT(a)e`.
pub fn decompose_unital_seeded(t: &SpaceMap, tol: f64, seed: u64) -> Result<IsometryDecomposition> {
    require_operator_algebra(t)?;
    let m = t.codomain_dim();
    let image_of_unit = t.apply(&t.domain().unit());
    let defect = image_of_unit.dist(&CMatrix::identity(m));
    if defect > tol {
        return Err(Error::WrongEntryPoint(format!(
            "T(1) differs from the identity by {defect:.3e}; use decompose_general"
        )));
    }
    let cert = is_complete_isometry_seeded(t, tol, seed)?;
    if !cert.is_complete_isometry {
        return Err(Error::NotCompleteIsometry(describe(&cert)));
    }
    let envelope = c_star_envelope_with(&t.range_space()?, tol, seed, None)?;
    let central = central_defect(&envelope);
    if central > tol {
        return Err(Error::InternalConsistency(format!(
            "co-support is not central in the generated algebra (defect {central:.3e})"
        )));
    }
    let e = envelope.co_support;
    let pi_images = t.images().iter().map(|ta| &(&e * ta) * &e).collect();
    finish(t, e.clone(), e.clone(), e, pi_images, tol, seed)
}

pub fn decompose_general(t: &SpaceMap, tol: f64) -> Result<IsometryDecomposition> {
    decompose_general_seeded(t, tol, DEFAULT_SEED)
}

/// General case through the envelope of `S(T(A))`. Complete isometry is
/// certified afterwards from the returned data rather than assumed.
pub fn decompose_general_seeded(
    t: &SpaceMap,
    tol: f64,
    seed: u64,
) -> Result<IsometryDecomposition> {
    require_operator_algebra(t)?;
    if !t.is_injective() {
        return Err(Error::NotCompleteIsometry(
            "the map is not injective".into(),
        ));
    }
    let m = t.codomain_dim();
    let system = paulsen_system(&t.range_space()?);
    let envelope = c_star_envelope_with(&system, tol, seed, None)?;
    let p0 = &envelope.co_support;
    let corner = CMatrix::direct_sum(&[&CMatrix::identity(m), &CMatrix::zeros(m, m)]);
    let defect = opnorm(&(&(p0 * &corner) - &(&corner * p0)));
    if defect > tol {
        return Err(Error::InternalConsistency(format!(
            "co-support does not commute with the corner projections (defect {defect:.3e})"
        )));
    }
    let f = p0.submatrix(0, 0, m, m).hermitian_part();
    let e = p0.submatrix(m, m, m, m).hermitian_part();
    let unit_image = t.apply(&t.domain().unit());
    let u = &(&f * &unit_image) * &e;
    let ustar = u.adjoint();
    let pi_images = t.images().iter().map(|ta| &ustar * ta).collect();
    finish(t, e, f, u, pi_images, tol, seed)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SurjectiveResiduals {
    /// `max(‖u*u − 1‖, ‖uu* − 1‖)`.
    pub unitarity: f64,
    pub multiplicativity: f64,
    /// `max_a ‖π(a*) − π(a)*‖`.
    pub star: f64,
    /// `max_a ‖π(a)*π(a) − π(a*a)‖`.
    pub kadison_schwarz: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurjectiveDecomposition {
    pub u: CMatrix,
    #[serde(rename = "pi")]
    pub pi_images: Vec<CMatrix>,
    pub residuals: SurjectiveResiduals,
}

/// `T = u·π` for a unitary `u = T(1)` and a *-isomorphism `π` onto `T(A)`.
pub fn decompose_surjective(t: &SpaceMap, tol: f64) -> Result<SurjectiveDecomposition> {
    require_operator_algebra(t)?;
    let a = t.domain();
    if !a.is_self_adjoint(MEMBERSHIP_TOL) {
        return Err(Error::Contract(
            "the domain must be closed under adjoints".into(),
        ));
    }
    if !t.is_injective() {
        return Err(Error::NotCompleteIsometry(
            "the map is not injective".into(),
        ));
    }
    let range = t.range_space()?;
    let m = t.codomain_dim();
    let closed = range.is_unital()
        && range.is_self_adjoint(MEMBERSHIP_TOL)
        && range.product_defect() <= MEMBERSHIP_TOL;
    if !closed {
        return Err(Error::Contract(
            "the range is not a unital C*-algebra".into(),
        ));
    }
    let u = t.apply(&a.unit());
    let id = CMatrix::identity(m);
    let ustar = u.adjoint();
    let unitarity = opnorm(&(&(&ustar * &u) - &id)).max(opnorm(&(&(&u * &ustar) - &id)));
    if unitarity > FAILURE_FACTOR * tol {
        return Err(Error::NotCompleteIsometry(format!(
            "T(1) is not unitary (defect {unitarity:.3e})"
        )));
    }
    let pi_images: Vec<CMatrix> = t.images().iter().map(|ta| &ustar * ta).collect();
    let pi = |x: &CMatrix| pi_apply(t, &pi_images, x);
    let mut r = SurjectiveResiduals {
        unitarity,
        ..SurjectiveResiduals::default()
    };
    for (x, px) in a.basis().iter().zip(&pi_images) {
        r.star = r.star.max(opnorm(&(&pi(&x.adjoint()) - &px.adjoint())));
        r.kadison_schwarz = r
            .kadison_schwarz
            .max(opnorm(&(&(&px.adjoint() * px) - &pi(&(&x.adjoint() * x)))));
        for (y, py) in a.basis().iter().zip(&pi_images) {
            r.multiplicativity = r
                .multiplicativity
                .max(opnorm(&(&pi(&(x * y)) - &(px * py))));
        }
    }
    let worst = r.multiplicativity.max(r.star).max(r.kadison_schwarz);
    if worst > FAILURE_FACTOR * tol {
        return Err(Error::NotCompleteIsometry(format!(
            "u*T(·) is not a *-isomorphism (defect {worst:.3e})"
        )));
    }
    Ok(SurjectiveDecomposition {
        u,
        pi_images,
        residuals: r,
    })
}

/// `T(a) = V · diag(u_block π_E(a), S(a)) · U*` with `U = [E E⊥]`, `V = [F F⊥]`.
#[derive(Clone, Debug, Serialize)]
pub struct SpatialForm {
    pub e_frame: CMatrix,
    pub f_frame: CMatrix,
    pub e_perp_frame: CMatrix,
    pub f_perp_frame: CMatrix,
    /// Unitary `E → F`.
    pub u_block: CMatrix,
    /// `π(a)` restricted to `E`.
    pub pi_blocks: Vec<CMatrix>,
    /// Compressions `E⊥ → F⊥` of `T(a)`.
    pub s_images: Vec<CMatrix>,
    pub unitarity_residual: f64,
    pub reassembly_residual: f64,
}

pub fn spatial_form(dec: &IsometryDecomposition, t: &SpaceMap) -> Result<SpatialForm> {
    if dec.pi_images.len() != t.images().len() || dec.e.rows() != t.codomain_dim() {
        return Err(Error::InvalidDecomposition(
            "decomposition does not belong to this map".into(),
        ));
    }
    let e_eig = dec.e.hermitian_part().herm_eig()?;
    let f_eig = dec.f.hermitian_part().herm_eig()?;
    let e_frame = e_eig.frame(|l| l > PROJECTION_CUT);
    let f_frame = f_eig.frame(|l| l > PROJECTION_CUT);
    if e_frame.cols() != f_frame.cols() {
        return Err(Error::InvalidDecomposition(format!(
            "rank(e) = {} but rank(f) = {}",
            e_frame.cols(),
            f_frame.cols()
        )));
    }
    let e_perp_frame = e_eig.frame(|l| l <= PROJECTION_CUT);
    let f_perp_frame = f_eig.frame(|l| l <= PROJECTION_CUT);
    let r = e_frame.cols();
    let u_block = &(&f_frame.adjoint() * &dec.u) * &e_frame;
    let unitarity_residual = if r == 0 {
        0.0
    } else {
        opnorm(&(&(&u_block.adjoint() * &u_block) - &CMatrix::identity(r)))
    };
    if unitarity_residual > FAILURE_FACTOR * MEMBERSHIP_TOL {
        return Err(Error::InvalidDecomposition(format!(
            "u is not unitary from E to F ({unitarity_residual:.3e})"
        )));
    }
    let pi_blocks: Vec<CMatrix> = dec
        .pi_images
        .iter()
        .map(|p| &(&e_frame.adjoint() * p) * &e_frame)
        .collect();
    let s_images: Vec<CMatrix> = t
        .images()
        .iter()
        .map(|ta| &(&f_perp_frame.adjoint() * ta) * &e_perp_frame)
        .collect();

    let left = f_frame.hstack(&f_perp_frame);
    let right = e_frame.hstack(&e_perp_frame);
    let mut reassembly_residual: f64 = 0.0;
    for ((ta, pb), s) in t.images().iter().zip(&pi_blocks).zip(&s_images) {
        let middle = CMatrix::direct_sum(&[&(&u_block * pb), s]);
        let rebuilt = &(&left * &middle) * &right.adjoint();
        reassembly_residual = reassembly_residual.max(opnorm(&(&rebuilt - ta)));
    }
    Ok(SpatialForm {
        e_frame,
        f_frame,
        e_perp_frame,
        f_perp_frame,
        u_block,
        pi_blocks,
        s_images,
        unitarity_residual,
        reassembly_residual,
    })
}

/// Diagonal (function-algebra) shape of a decomposition: the codomain
/// coordinates outside `e` form the deleted ideal, and on the rest
/// `T(a)_i = γ_i · a_{σ(i)}`. Coordinates are zero-based.
#[derive(Clone, Debug, Serialize)]
pub struct CommutativeForm {
    pub ideal_coordinates: Vec<usize>,
    pub kept_coordinates: Vec<usize>,
    /// Unimodular twist on kept coordinates.
    pub gamma: Vec<C64>,
    /// `σ`: for each kept coordinate, the domain coordinate it reads.
    pub selection: Vec<usize>,
    /// `π` restricted to the kept coordinates.
    pub theta_images: Vec<CMatrix>,
}

fn diagonal_defect(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j {
                worst = worst.max(m.get(i, j).norm());
            }
        }
    }
    worst
}

pub fn commutative_form(dec: &IsometryDecomposition, t: &SpaceMap) -> Result<CommutativeForm> {
    const DIAGONAL_TOL: f64 = 1e-10;
    let value_tol = FAILURE_FACTOR * MEMBERSHIP_TOL;
    let basis = t.domain().basis();
    if basis
        .iter()
        .chain(t.images())
        .any(|m| diagonal_defect(m) > DIAGONAL_TOL)
    {
        return Err(Error::Contract(
            "commutative form needs diagonal domain and images".into(),
        ));
    }
    let m = t.codomain_dim();
    let n = t.domain().ambient_dim();
    let (kept_coordinates, ideal_coordinates): (Vec<usize>, Vec<usize>) =
        (0..m).partition(|&i| dec.e.get(i, i).re > PROJECTION_CUT);

    let mut gamma = Vec::with_capacity(kept_coordinates.len());
    let mut selection = Vec::with_capacity(kept_coordinates.len());
    for &i in &kept_coordinates {
        let g = dec.u.get(i, i);
        if (g.norm() - 1.0).abs() > value_tol {
            return Err(Error::InvalidDecomposition(format!(
                "|γ_{i}| = {} is not 1",
                g.norm()
            )));
        }
        gamma.push(g);
        let reads = (0..n).find(|&j| {
            basis
                .iter()
                .zip(&dec.pi_images)
                .all(|(b, p)| (p.get(i, i) - b.get(j, j)).norm() <= value_tol)
        });
        match reads {
            Some(j) => selection.push(j),
            None => {
                return Err(Error::InvalidDecomposition(format!(
                    "coordinate {i} of π is not a point evaluation"
                )));
            }
        }
    }
    let theta_images: Vec<CMatrix> = dec
        .pi_images
        .iter()
        .map(|p| {
            CMatrix::diag(
                &kept_coordinates
                    .iter()
                    .map(|&i| p.get(i, i))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let theta_unit = {
        let mut acc = CMatrix::zeros(kept_coordinates.len(), kept_coordinates.len());
        for (c, th) in t
            .domain()
            .coordinates(&t.domain().unit())
            .iter()
            .zip(&theta_images)
        {
            acc.axpy(*c, th);
        }
        acc
    };
    if kept_coordinates.is_empty()
        || theta_unit.dist(&CMatrix::identity(kept_coordinates.len())) > value_tol
    {
        return Err(Error::InvalidDecomposition("θ is not unital".into()));
    }
    Ok(CommutativeForm {
        ideal_coordinates,
        kept_coordinates,
        gamma,
        selection,
        theta_images,
    })
}
