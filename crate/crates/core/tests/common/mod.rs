#![allow(dead_code)]

use nc_shilov::opspace::{OperatorSpace, SpaceMap};
use nc_shilov::random::{random_isometry, random_matrix, random_unitary, Rng};
use nc_shilov::{CMatrix, C64};

pub const TOL: f64 = 1e-8;

pub fn upper_triangular(n: usize) -> OperatorSpace {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in i..n {
            gens.push(CMatrix::unit(n, i, j));
        }
    }
    OperatorSpace::new(&gens, true).unwrap()
}

pub fn diagonal(n: usize) -> OperatorSpace {
    let gens: Vec<CMatrix> = (0..n).map(|i| CMatrix::unit(n, i, i)).collect();
    OperatorSpace::new(&gens, true).unwrap()
}

pub fn scalars() -> OperatorSpace {
    OperatorSpace::new(&[CMatrix::identity(1)], true).unwrap()
}

/// Span of `I`, `diag(1, 0, ½)` and `E₁₂` in `M₃`.
pub fn averaged_space() -> OperatorSpace {
    let gens = [
        CMatrix::identity(3),
        CMatrix::diag_real(&[1.0, 0.0, 0.5]),
        CMatrix::unit(3, 0, 1),
    ];
    OperatorSpace::new(&gens, true).unwrap()
}

pub fn transpose(n: usize) -> SpaceMap {
    SpaceMap::from_fn(OperatorSpace::full(n), n, CMatrix::transpose).unwrap()
}

pub fn normalized(m: CMatrix) -> CMatrix {
    let s = m.opnorm().unwrap();
    m.scale_real(1.0 / s)
}

/// Unital operator space spanned by `I_n` and `extra` random matrices.
pub fn random_unital_space(rng: &mut Rng, n: usize, extra: usize) -> OperatorSpace {
    let mut gens = vec![CMatrix::identity(n)];
    gens.extend((0..extra).map(|_| random_matrix(rng, n, n)));
    OperatorSpace::new(&gens, true).unwrap()
}

/// A random map with images scaled to roughly unit size.
pub fn random_map(rng: &mut Rng, n: usize, dim: usize, m: usize) -> SpaceMap {
    let gens: Vec<CMatrix> = (0..dim).map(|_| random_matrix(rng, n, n)).collect();
    let domain = OperatorSpace::new(&gens, false).unwrap();
    let images = (0..domain.dim())
        .map(|_| random_matrix(rng, m, m).scale_real(0.5 / (n as f64).sqrt()))
        .collect();
    SpaceMap::new(domain, m, images).unwrap()
}

fn algebra_domain(rng: &mut Rng, n: usize) -> OperatorSpace {
    match rng.index(3) {
        0 => OperatorSpace::full(n),
        1 => upper_triangular(n),
        _ => diagonal(n),
    }
}

/// A complete isometry between matrix algebras (or their triangular or
/// diagonal subalgebras) drawn from four families; returns a label too.
pub fn constructed_isometry(rng: &mut Rng, family: usize) -> (String, SpaceMap) {
    match family % 4 {
        0 => {
            let n = 2 + rng.index(2);
            let domain = algebra_domain(rng, n);
            let (v, w) = (random_unitary(rng, n), random_unitary(rng, n));
            let vt = v.adjoint();
            let t = SpaceMap::from_fn(domain, n, |a| &w * &(&(&v * a) * &vt)).unwrap();
            (format!("unitary twist, n={n}"), t)
        }
        1 => {
            let n = 2 + rng.index(2);
            let m = n + 1 + rng.index(2);
            let domain = algebra_domain(rng, n);
            let (v, w) = (random_isometry(rng, m, n), random_isometry(rng, m, n));
            let wt = w.adjoint();
            let t = SpaceMap::from_fn(domain, m, |a| &(&v * a) * &wt).unwrap();
            (format!("corner embedding, {n}→{m}"), t)
        }
        2 => {
            let n = 2;
            let m = 2 * n + rng.index(2);
            let domain = algebra_domain(rng, n);
            let (v, w) = (
                random_isometry(rng, m, 2 * n),
                random_isometry(rng, m, 2 * n),
            );
            let wt = w.adjoint();
            let c = rng.phase().scale(rng.uniform(0.0, 0.9));
            let pad = rng.coin();
            let t = SpaceMap::from_fn(domain, m + usize::from(pad), |a| {
                let doubled = &(&v * &CMatrix::direct_sum(&[a, a])) * &wt;
                if pad {
                    let corner = CMatrix::diag(&[a.trace() * c / (n as f64)]);
                    CMatrix::direct_sum(&[&doubled, &corner])
                } else {
                    doubled
                }
            })
            .unwrap();
            (format!("block duplication, padded={pad}"), t)
        }
        _ => {
            let m = 1 + rng.index(3);
            let x = normalized(random_matrix(rng, m, m));
            let t = SpaceMap::from_fn(scalars(), m, |a| x.scale(a.get(0, 0))).unwrap();
            (format!("λ ↦ λx, m={m}"), t)
        }
    }
}

/// `a ↦ V a W*` on a subspace of `M₂` (or `ℂ`) into `M_m`, `m ≤ 3`.
pub fn small_isometry(rng: &mut Rng, i: usize) -> SpaceMap {
    let domain = match i % 4 {
        0 => scalars(),
        1 => upper_triangular(2),
        2 => diagonal(2),
        _ => random_unital_space(rng, 2, 1),
    };
    let n = domain.ambient_dim();
    let m = n + rng.index(2);
    let (v, w) = (random_isometry(rng, m, n), random_isometry(rng, m, n));
    let wt = w.adjoint();
    SpaceMap::from_fn(domain, m, |a| &(&v * a) * &wt).unwrap()
}

/// A diagonal-algebra isometry: `T(a)_i = γ_i a_{σ(i)}` on kept coordinates
/// and strictly contractive averages elsewhere. Returns the map together
/// with the expected ideal coordinates, kept coordinates, twists and
/// selection.
pub struct DiagonalIsometry {
    pub map: SpaceMap,
    pub ideal: Vec<usize>,
    pub kept: Vec<usize>,
    pub gamma: Vec<C64>,
    pub selection: Vec<usize>,
}

pub fn diagonal_isometry(rng: &mut Rng) -> DiagonalIsometry {
    let p = 2 + rng.index(3);
    let padding = 1 + rng.index(2);
    let q = p + padding;
    let mut sigma: Vec<usize> = (0..p).collect();
    rng.shuffle(&mut sigma);
    let gamma: Vec<C64> = (0..p).map(|_| rng.phase()).collect();
    let weights: Vec<Vec<C64>> = (0..padding)
        .map(|_| {
            let raw: Vec<C64> = (0..p).map(|_| rng.complex_normal()).collect();
            let total: f64 = raw.iter().map(|z| z.norm()).sum();
            let scale = rng.uniform(0.3, 0.9) / total;
            raw.into_iter().map(|z| z * scale).collect()
        })
        .collect();

    let mut slots: Vec<Option<usize>> =
        (0..p).map(Some).chain((0..padding).map(|_| None)).collect();
    rng.shuffle(&mut slots);
    let (mut ideal, mut kept, mut gamma_out, mut selection) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (pos, slot) in slots.iter().enumerate() {
        match slot {
            Some(k) => {
                kept.push(pos);
                gamma_out.push(gamma[*k]);
                selection.push(sigma[*k]);
            }
            None => ideal.push(pos),
        }
    }
    let map = SpaceMap::from_fn(diagonal(p), q, |a| {
        let mut pad = weights.iter();
        let entries: Vec<C64> = slots
            .iter()
            .map(|slot| match slot {
                Some(k) => gamma[*k] * a.get(sigma[*k], sigma[*k]),
                None => pad
                    .next()
                    .unwrap()
                    .iter()
                    .enumerate()
                    .map(|(j, w)| w * a.get(j, j))
                    .sum(),
            })
            .collect();
        CMatrix::diag(&entries)
    })
    .unwrap();
    DiagonalIsometry {
        map,
        ideal,
        kept,
        gamma: gamma_out,
        selection,
    }
}

/// Random block profile with `Σ n·m ≤ budget`, sorted like
/// `StarAlgebra::profile` (size, then multiplicity, descending).
pub fn random_profile(rng: &mut Rng, budget: usize) -> Vec<(usize, usize)> {
    let mut profile = Vec::new();
    let mut used = 0;
    loop {
        let n = 1 + rng.index(3);
        let m = 1 + rng.index(2);
        if used + n * m > budget || (profile.len() >= 2 && rng.index(3) == 0) {
            break;
        }
        used += n * m;
        profile.push((n, m));
    }
    if profile.is_empty() {
        profile.push((1 + rng.index(3), 1));
    }
    profile.sort_by(|a, b| b.cmp(a));
    profile
}

/// Two random elements of `⊕ M_{n_k} ⊗ I_{m_k}`, conjugated by a random
/// unitary. Equal `(n, m)` pairs are inequivalent blocks.
pub fn profile_generators(rng: &mut Rng, profile: &[(usize, usize)]) -> Vec<CMatrix> {
    let size: usize = profile.iter().map(|(n, m)| n * m).sum();
    let u = random_unitary(rng, size);
    let ut = u.adjoint();
    (0..2)
        .map(|_| {
            let blocks: Vec<CMatrix> = profile
                .iter()
                .map(|&(n, m)| CMatrix::identity(m).kron(&random_matrix(rng, n, n)))
                .collect();
            let refs: Vec<&CMatrix> = blocks.iter().collect();
            &(&u * &CMatrix::direct_sum(&refs)) * &ut
        })
        .collect()
}

/// Unital spaces whose generated algebra has redundant blocks:
/// `y ↦ y ⊕ V₁*yV₁ ⊕ …` built on a random unital base space.
pub fn envelope_corpus_space(rng: &mut Rng) -> OperatorSpace {
    if rng.index(4) == 0 {
        let p = 3 + rng.index(3);
        let mut gens = vec![CMatrix::identity(p)];
        for _ in 0..1 + rng.index(2) {
            let entries: Vec<C64> = (0..p).map(|_| rng.complex_normal()).collect();
            gens.push(CMatrix::diag(&entries));
        }
        return OperatorSpace::new(&gens, true).unwrap();
    }
    let n = 2 + rng.index(2);
    let extra = 1 + rng.index(2);
    let base = random_unital_space(rng, n, extra);
    let keep_base = rng.index(3) != 0;
    let compressions: Vec<CMatrix> = (0..1 + rng.index(2))
        .map(|_| {
            let r = 1 + rng.index(n);
            random_isometry(rng, n, r.min(n))
        })
        .collect();
    let gens: Vec<CMatrix> = base
        .basis()
        .iter()
        .map(|y| {
            let mut parts: Vec<CMatrix> = compressions
                .iter()
                .map(|v| &(&v.adjoint() * y) * v)
                .collect();
            if keep_base {
                parts.insert(0, y.clone());
            }
            let refs: Vec<&CMatrix> = parts.iter().collect();
            CMatrix::direct_sum(&refs)
        })
        .collect();
    OperatorSpace::new(&gens, true).unwrap()
}

/// Deterministic proptest configuration without regression files.
pub fn proptest_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0xC0FFEE),
        ..proptest::test_runner::Config::default()
    }
}
