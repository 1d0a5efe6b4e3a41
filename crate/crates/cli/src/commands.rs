use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use nc_shilov::banachstone::{decompose_general_seeded, spatial_form};
use nc_shilov::envelope::c_star_envelope_with;
use nc_shilov::opspace::{
    is_complete_isometry_seeded, is_completely_contractive_seeded, level_bounds, CbCertificate,
    CbVerdict, OperatorSpace, SpaceMap,
};
use nc_shilov::staralg::generate_star_algebra_seeded;
use nc_shilov::Error;

use crate::report::{profile_text, Outcome, Status};
use crate::RunConfig;

const BOUND_RESTARTS: usize = 16;

type CmdResult = Result<Outcome, String>;

fn load<T: DeserializeOwned>(
    path: Option<&String>,
    flag: &str,
    command: &str,
) -> Result<T, String> {
    let path = path.ok_or_else(|| format!("{command} needs --{flag} PATH"))?;
    let text = fs::read_to_string(Path::new(path)).map_err(|e| format!("{path}: {e}"))?;
    serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))
}

fn load_space(config: &RunConfig) -> Result<OperatorSpace, String> {
    load(config.space.as_ref(), "space", config.command)
}

fn load_map(config: &RunConfig) -> Result<SpaceMap, String> {
    load(config.map.as_ref(), "map", config.command)
}

fn max_level(config: &RunConfig, t: &SpaceMap) -> usize {
    config
        .level
        .unwrap_or_else(|| t.domain().ambient_dim().min(t.codomain_dim()).max(1))
}

fn verdict_name(v: CbVerdict) -> &'static str {
    match v {
        CbVerdict::CompletelyContractive => "completely_contractive",
        CbVerdict::Violated => "violated",
        CbVerdict::Indeterminate => "indeterminate",
    }
}

fn certificate_line(name: &str, c: &CbCertificate) -> String {
    let mut line = format!(
        "{name}: {} (feasibility residual {:.3e}, levels checked up to {})",
        verdict_name(c.verdict),
        c.feasibility_residual,
        c.level_checked
    );
    if let Some(w) = &c.witness {
        line.push_str(&format!(
            ", witness at level {} with ratio {:.9}",
            w.level, w.ratio
        ));
    }
    line
}

pub fn cbnorm(config: &RunConfig) -> CmdResult {
    let t = load_map(config)?;
    let cert =
        is_completely_contractive_seeded(&t, config.tol, config.seed).map_err(|e| e.to_string())?;
    let bounds = level_bounds(&t, max_level(config, &t), BOUND_RESTARTS, config.seed);
    let best = bounds.iter().map(|b| b.bound).fold(0.0, f64::max);
    let mut lines: Vec<String> = bounds
        .iter()
        .map(|b| format!("level {}: norm ≥ {:.9}", b.level, b.bound))
        .collect();
    lines.push(certificate_line("certificate", &cert));
    let status = if cert.is_completely_contractive() {
        Status::Verified
    } else {
        Status::Negative
    };
    Ok(Outcome {
        status,
        verdict: json!(verdict_name(cert.verdict)),
        data: json!({
            "level_bounds": bounds.iter().map(|b| json!({"level": b.level, "bound": b.bound})).collect::<Vec<_>>(),
            "cb_norm_lower_bound": best,
            "certificate": cert,
        }),
        residuals: json!({ "feasibility": cert.feasibility_residual }),
        lines,
    })
}

pub fn check_isometry(config: &RunConfig) -> CmdResult {
    let t = load_map(config)?;
    let cert =
        is_complete_isometry_seeded(&t, config.tol, config.seed).map_err(|e| e.to_string())?;
    let levels = max_level(config, &t);
    let forward = level_bounds(&t, levels, BOUND_RESTARTS, config.seed);
    let inverse = if cert.injective {
        let inv = t.inverse().map_err(|e| e.to_string())?;
        Some(level_bounds(&inv, levels, BOUND_RESTARTS, config.seed))
    } else {
        None
    };
    let level_norms: Vec<Value> = forward
        .iter()
        .enumerate()
        .map(|(i, b)| json!({"level": b.level, "forward": b.bound, "inverse": inverse.as_ref().map(|v| v[i].bound)}))
        .collect();
    let witness = [("forward", Some(&cert.forward)), ("inverse", cert.inverse.as_ref())]
        .into_iter()
        .find_map(|(dir, c)| c.and_then(|c| c.witness.as_ref()).map(|w| (dir, w)))
        .map(|(dir, w)| json!({"direction": dir, "level": w.level, "ratio": w.ratio, "matrix": w.matrix}));

    let mut lines = vec![format!("injective: {}", cert.injective)];
    for v in &level_norms {
        lines.push(format!(
            "level {}: ‖T_k‖ ≥ {:.9}{}",
            v["level"],
            v["forward"].as_f64().unwrap_or(f64::NAN),
            v["inverse"]
                .as_f64()
                .map(|x| format!(", ‖(T⁻¹)_k‖ ≥ {x:.9}"))
                .unwrap_or_default()
        ));
    }
    lines.push(certificate_line("forward", &cert.forward));
    if let Some(inv) = &cert.inverse {
        lines.push(certificate_line("inverse", inv));
    }
    let residuals = json!({
        "forward_feasibility": cert.forward.feasibility_residual,
        "inverse_feasibility": cert.inverse.as_ref().map(|c| c.feasibility_residual),
    });
    Ok(Outcome {
        status: if cert.is_complete_isometry {
            Status::Verified
        } else {
            Status::Negative
        },
        verdict: json!(cert.is_complete_isometry),
        data: json!({
            "is_complete_isometry": cert.is_complete_isometry,
            "injective": cert.injective,
            "level_norms": level_norms,
            "witness": witness,
            "forward": cert.forward,
            "inverse": cert.inverse,
        }),
        residuals,
        lines,
    })
}

pub fn envelope(config: &RunConfig) -> CmdResult {
    let x = load_space(config)?;
    let env = c_star_envelope_with(&x, config.tol, config.seed, None).map_err(|e| e.to_string())?;
    let check = env
        .verify_embedding(config.tol)
        .map_err(|e| e.to_string())?;
    let mut data = serde_json::to_value(&env).map_err(|e| e.to_string())?;
    data["embedding_complete_isometry"] = json!(check.is_complete_isometry);
    let lines = vec![
        format!("generated: {}", profile_text(&env.generated_profile())),
        format!("envelope: {}", profile_text(&env.envelope_profile)),
        format!("kept blocks: {:?}", env.kept_blocks),
        format!(
            "embedding is a complete isometry: {}",
            check.is_complete_isometry
        ),
    ];
    Ok(Outcome {
        status: if check.is_complete_isometry {
            Status::Verified
        } else {
            Status::Negative
        },
        verdict: json!(if check.is_complete_isometry {
            "verified"
        } else {
            "unverified"
        }),
        data,
        residuals: json!({
            "embedding_forward_feasibility": check.forward.feasibility_residual,
            "embedding_inverse_feasibility": check.inverse.as_ref().map(|c| c.feasibility_residual),
        }),
        lines,
    })
}

pub fn decompose(config: &RunConfig) -> CmdResult {
    let t = load_map(config)?;
    match decompose_general_seeded(&t, config.tol, config.seed) {
        Ok(dec) => {
            let spatial = spatial_form(&dec, &t).map_err(|e| e.to_string())?;
            let mut data = serde_json::to_value(&dec).map_err(|e| e.to_string())?;
            data["rank_e"] = json!(spatial.e_frame.cols());
            data["reassembly_residual"] = json!(spatial.reassembly_residual);
            data["soundness"] = json!(dec.soundness);
            let lines = vec![
                format!("rank of e and f: {}", spatial.e_frame.cols()),
                format!("e = {}", compact(&dec.e)),
                format!("f = {}", compact(&dec.f)),
                format!("u = {}", compact(&dec.u)),
                format!(
                    "soundness certified at levels 1..={}: {}",
                    dec.soundness.levels, dec.soundness.certified
                ),
            ];
            Ok(Outcome {
                status: Status::Verified,
                verdict: json!(true),
                residuals: json!(dec.residuals),
                data,
                lines,
            })
        }
        Err(Error::DecompositionFailure { residuals }) => Ok(Outcome {
            status: Status::Negative,
            verdict: json!(false),
            data: json!({ "reason": "decomposition residuals exceed tolerance" }),
            lines: vec![format!("residuals: {residuals}")],
            residuals: json!(residuals),
        }),
        Err(e @ Error::NotCompleteIsometry(_)) => Ok(Outcome {
            status: Status::Negative,
            verdict: json!(false),
            data: json!({ "reason": e.to_string() }),
            lines: vec![e.to_string()],
            residuals: json!({}),
        }),
        Err(e) => Err(e.to_string()),
    }
}

pub fn blockdecomp(config: &RunConfig) -> CmdResult {
    let x = load_space(config)?;
    let a =
        generate_star_algebra_seeded(x.basis(), true, config.seed).map_err(|e| e.to_string())?;
    let profile = a.profile();
    let lines = vec![
        format!("algebra: {}", profile_text(&profile)),
        format!(
            "dimension {}, center dimension {}",
            a.dim(),
            a.center_basis().len()
        ),
    ];
    Ok(Outcome {
        status: Status::Verified,
        verdict: json!("decomposed"),
        data: json!({
            "profile": profile,
            "dim": a.dim(),
            "center_dim": a.center_basis().len(),
            "central_projections": a.central_projections(),
        }),
        residuals: json!({ "closure_defect": a.closure_defect() }),
        lines,
    })
}

fn compact(m: &nc_shilov::CMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let entries: Vec<String> = (0..m.cols())
                .map(|j| {
                    let z = m.get(i, j);
                    let (re, im) = (clean(z.re), clean(z.im));
                    if im == 0.0 {
                        format!("{re}")
                    } else {
                        format!("{re}{im:+}i")
                    }
                })
                .collect();
            entries.join(" ")
        })
        .collect();
    format!("[{}]", rows.join("; "))
}

// Rounds to 6 decimals so text output is stable; JSON keeps full precision.
fn clean(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}
