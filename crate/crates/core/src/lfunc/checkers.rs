//! Empirical checks of zero-free regions, zero repulsion and the derived
//! constants. Every report carries its parameters and a verdict; winding
//! numbers are certified up to floating-point error only.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use super::classify::{Classification, SIGMA_RIGHT};
use super::hurwitz::{l_value, MAX_HEIGHT};
use super::zeros::{count_characters, scan_characters, Rect, ScanOptions, ZeroRecord, CERTIFIED_DIAMETER, SIGMA_FLOOR};
use crate::arith::euler_phi;
use crate::characters::{CharacterGroup, DirichletCharacter};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

pub const CERTIFICATION_NOTE: &str = "winding numbers certified up to floating-point error";

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub params: Value,
    pub verdict: Verdict,
    pub details: Value,
    pub certification: &'static str,
}

impl CheckReport {
    fn new(check: &str, params: Value, verdict: Verdict, details: Value) -> Self {
        Self { check: check.into(), params, verdict, details, certification: CERTIFICATION_NOTE }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

fn ell(q: u64, gamma: f64) -> f64 {
    (q as f64 * (gamma.abs() + 3.0)).ln()
}

fn zero_json(z: &ZeroRecord, q: u64) -> Value {
    json!({
        "character": z.character,
        "beta": z.beta,
        "gamma": z.gamma,
        "ell": ell(q, z.gamma),
        "is_real": z.is_real,
        "winding": z.winding,
    })
}

/// Scans all characters mod `q` and returns the zeros plus whether anything was left undecided.
fn scan_all(q: u64, rect: &Rect, opts: &ScanOptions) -> Result<(Vec<DirichletCharacter>, Vec<ZeroRecord>, bool)> {
    let chars = CharacterGroup::new(q).characters();
    let reports = scan_characters(&chars, rect, opts)?;
    let undecided = reports.iter().any(|r| !r.is_complete());
    let zeros = reports.into_iter().flat_map(|r| r.zeros).collect();
    Ok((chars, zeros, undecided))
}

fn left_edge(width: f64) -> f64 {
    (1.0 - width).max(SIGMA_FLOOR)
}

/// At most one zero of `Π_χ L(s, χ)` with `β > 1 - c1/ℓ`, `ℓ = log q(|γ|+3)`,
/// and it is real and belongs to a real nonprincipal character.
pub fn zero_free_region_check(q: u64, c1: f64, t_max: f64, opts: &ScanOptions) -> Result<CheckReport> {
    let params = json!({ "q": q, "c1": c1, "t_max": t_max });
    let sigma_lo = left_edge(c1 / (3.0 * q as f64).ln());
    let rect = Rect::new(sigma_lo, SIGMA_RIGHT, -t_max, t_max);
    let (chars, zeros, undecided) = scan_all(q, &rect, opts)?;
    let inside: Vec<&ZeroRecord> = zeros.iter().filter(|z| z.beta > 1.0 - c1 / ell(q, z.gamma)).collect();
    let verdict = if undecided {
        Verdict::Unknown
    } else {
        match inside.as_slice() {
            [] => Verdict::Pass,
            [z] => {
                let chi = chars.iter().find(|c| c.label() == z.character).unwrap();
                if z.is_real && chi.is_real() && !chi.is_principal() {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                }
            }
            _ => Verdict::Fail,
        }
    };
    let details = json!({
        "scan_rect": rect,
        "sigma_clipped": sigma_lo > 1.0 - c1 / (3.0 * q as f64).ln(),
        "zeros_in_region": inside.iter().map(|z| zero_json(z, q)).collect::<Vec<_>>(),
        "zeros_in_scan": zeros.len(),
    });
    Ok(CheckReport::new("zero_free_region", params, verdict, details))
}

/// With a designated exceptional zero `β₁ = 1 - eps/log q`, no other zero lies in
/// `σ > 1 - c2 log(1/eps)/ℓ`. Reports the largest `β` of any other zero seen.
pub fn deuring_heilbronn_check(q: u64, eps: f64, c2: f64, t_max: f64, opts: &ScanOptions) -> Result<CheckReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    let params = json!({ "q": q, "eps": eps, "c2": c2, "t_max": t_max });
    let beta1 = 1.0 - eps / (q as f64).ln().max(f64::MIN_POSITIVE);
    let reach = c2 * (1.0 / eps).ln();
    let sigma_lo = left_edge(reach / (3.0 * q as f64).ln());
    let rect = Rect::new(sigma_lo, SIGMA_RIGHT, -t_max, t_max);
    let (_, zeros, undecided) = scan_all(q, &rect, opts)?;
    let others: Vec<&ZeroRecord> =
        zeros.iter().filter(|z| !(z.is_real && (z.beta - beta1).abs() < CERTIFIED_DIAMETER)).collect();
    let offending: Vec<&&ZeroRecord> = others.iter().filter(|z| z.beta > 1.0 - reach / ell(q, z.gamma)).collect();
    let margin = others.iter().map(|z| z.beta).fold(f64::NEG_INFINITY, f64::max);
    let margin = if margin.is_finite() { margin } else { sigma_lo };
    let verdict = if undecided {
        Verdict::Unknown
    } else if offending.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let details = json!({
        "beta1": beta1,
        "scan_rect": rect,
        "repulsion_margin": margin,
        "offending": offending.iter().map(|z| zero_json(z, q)).collect::<Vec<_>>(),
    });
    Ok(CheckReport::new("deuring_heilbronn", params, verdict, details))
}

/// `8 log(5 log 3q) + 24/η · log(160Θ) <= (8/3) Θ`; returns both sides.
pub fn eta_condition(q: u64, eta: f64, theta: f64) -> (f64, f64, bool) {
    let lhs = 8.0 * (5.0 * (3.0 * q as f64).ln()).ln() + 24.0 / eta * (160.0 * theta).ln();
    let rhs = 8.0 / 3.0 * theta;
    (lhs, rhs, lhs <= rhs)
}

/// Grid used to sample `|L|` for the boundedness hypothesis.
#[derive(Debug, Clone, Copy)]
pub struct SampleGrid {
    pub sigma_points: usize,
    pub t_points: usize,
    pub sigma_max: f64,
}

impl Default for SampleGrid {
    fn default() -> Self {
        Self { sigma_points: 8, t_points: 121, sigma_max: 2.0 }
    }
}

/// Checks the hypotheses and the conclusion of the zero-detection lemma for `χ`:
/// the arithmetic condition on `η, Θ`, boundedness `|L| <= M` (sampled only)
/// and the absence of zeros with `β > 1 - ϑ`, `|γ| <= T`.
pub fn iwaniec_condition_check(
    chi: &DirichletCharacter,
    m: f64,
    eta: f64,
    t: f64,
    grid: &SampleGrid,
    opts: &ScanOptions,
) -> Result<CheckReport> {
    if !(eta > 0.0 && eta < 1.0 / 3.0) || !(m >= std::f64::consts::E) {
        return Err(Error::Domain(format!("need η ∈ (0, 1/3) and M >= e, got η = {eta}, M = {m}")));
    }
    let q = chi.modulus();
    let theta = m.ln() / eta;
    let vartheta = 1.0 / (400.0 * theta);
    let (lhs, rhs, holds) = eta_condition(q, eta, theta);
    let params = json!({ "character": chi.label(), "M": m, "eta": eta, "T": t });

    let t_span = (3.0 * t).min(MAX_HEIGHT);
    let mut max_abs = 0.0f64;
    let mut argmax = Complex64::new(0.0, 0.0);
    for i in 0..grid.sigma_points {
        let frac = (i as f64 + 1.0) / grid.sigma_points as f64;
        let sigma = 1.0 - eta + frac * (grid.sigma_max - 1.0 + eta);
        for j in 0..grid.t_points {
            let tt = -t_span + 2.0 * t_span * j as f64 / (grid.t_points.max(2) - 1) as f64;
            let s = Complex64::new(sigma, tt);
            if chi.conductor().conductor == 1 && (s - 1.0).norm() < 1e-12 {
                continue;
            }
            let v = l_value(chi, s)?.norm();
            if v > max_abs {
                max_abs = v;
                argmax = s;
            }
        }
    }
    let bounded = max_abs <= m;

    let (zero_status, count) = if vartheta < CERTIFIED_DIAMETER {
        ("UNKNOWN", None)
    } else {
        let rect = Rect::new(1.0 - vartheta, SIGMA_RIGHT, -t, t);
        let n = count_characters(std::slice::from_ref(chi), &rect, opts)?[0];
        match n {
            Some(0) => ("NO_ZERO", n),
            Some(_) => ("ZERO_FOUND", n),
            None => ("UNKNOWN", None),
        }
    };
    let verdict = match zero_status {
        "UNKNOWN" => Verdict::Unknown,
        "ZERO_FOUND" if holds && bounded => Verdict::Fail,
        _ => Verdict::Pass,
    };
    let details = json!({
        "theta": theta,
        "vartheta": vartheta,
        "eta_condition": { "lhs": lhs, "rhs": rhs, "holds": holds },
        "condition_i": {
            "status": if bounded { "SAMPLED_PASS" } else { "FAIL" },
            "max_abs_l": max_abs,
            "argmax": [argmax.re, argmax.im],
            "t_span": t_span,
        },
        "condition_ii": { "status": zero_status, "count": count },
    });
    Ok(CheckReport::new("iwaniec_condition", params, verdict, details))
}

/// Width `1/(scale (log q + (ℓ log 2ℓ)^{3/4}))` of the region without nonreal zeros.
pub fn gulp_width(q: u64, gamma: f64, scale: f64) -> f64 {
    let l = ell(q, gamma);
    1.0 / (scale * ((q as f64).ln() + (l * (2.0 * l).ln()).powf(0.75)))
}

/// No nonreal zero of the primitive `χ` with `β > 1 - gulp_width`.
pub fn gulp_region_check(chi: &DirichletCharacter, scale: f64, t_max: f64, opts: &ScanOptions) -> Result<CheckReport> {
    let q = chi.modulus();
    let params = json!({ "character": chi.label(), "scale": scale, "t_max": t_max });
    if chi.is_principal() {
        return Ok(CheckReport::new("gulp_region", params, Verdict::Pass, json!({ "vacuous": true })));
    }
    if !chi.is_primitive() {
        return Err(Error::Domain(format!("{} is not primitive", chi.label())));
    }
    let rect = Rect::new(left_edge(gulp_width(q, 0.0, scale)), SIGMA_RIGHT, -t_max, t_max);
    let report = scan_characters(std::slice::from_ref(chi), &rect, opts)?.remove(0);
    let offending: Vec<&ZeroRecord> =
        report.zeros.iter().filter(|z| z.gamma != 0.0 && z.beta > 1.0 - gulp_width(q, z.gamma, scale)).collect();
    let verdict = if !report.is_complete() {
        Verdict::Unknown
    } else if offending.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let details = json!({
        "scan_rect": rect,
        "width_at_gamma_0": gulp_width(q, 0.0, scale),
        "offending": offending.iter().map(|z| zero_json(z, q)).collect::<Vec<_>>(),
    });
    Ok(CheckReport::new("gulp_region", params, verdict, details))
}

/// `σ > 1 - k₀/log q`, `|t| <= min(T_max, q, q̌^{τ_A})`; principal characters are excluded.
#[derive(Debug, Clone, Serialize)]
pub struct ProblemRange {
    pub character: String,
    pub conductor: u64,
    pub sigma_lo: f64,
    pub height: f64,
    pub excluded: bool,
}

pub fn problem_range_rectangle(chi: &DirichletCharacter, k0: i64, tau_a: f64, t_max: f64) -> ProblemRange {
    let q = chi.modulus();
    let conductor = chi.conductor().conductor;
    let height = t_max.min((q as f64).min((conductor as f64).powf(tau_a)));
    ProblemRange {
        character: chi.label(),
        conductor,
        sigma_lo: 1.0 - k0 as f64 / (q as f64).ln(),
        height,
        excluded: chi.is_principal(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem1Constants {
    pub a: f64,
    pub d: f64,
    pub k0: i64,
    pub q_a: i64,
}

/// `k₀ = ⌈4A log A + D⌉` and `Q_A = 500000 k₀`.
pub fn theorem1_constants(a: f64, d: f64) -> Result<Theorem1Constants> {
    if !(a > 0.0) || !(d >= 0.0) {
        return Err(Error::Domain(format!("need A > 0 and D >= 0, got A = {a}, D = {d}")));
    }
    let k0 = super::classify::k0(a, d);
    Ok(Theorem1Constants { a, d, k0, q_a: 500_000 * k0 })
}

/// `|Ξ_q(k)|` against `C₁ e^{C₂ k}` for each `k`, plus `Σ_k |Ξ_q(k)| <= φ(q)`.
pub fn density_count_check(classification: &Classification, c1: f64, c2: f64) -> CheckReport {
    let sizes = classification.xi_sizes();
    let rows: Vec<Value> = sizes
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let bound = c1 * (c2 * k as f64).exp();
            json!({ "k": k, "size": n, "bound": bound, "verdict": if n as f64 <= bound { Verdict::Pass } else { Verdict::Fail } })
        })
        .collect();
    let total: usize = sizes.iter().sum();
    let phi = euler_phi(classification.q);
    let all_ok = rows.iter().all(|r| r["verdict"] == json!(Verdict::Pass)) && total as u64 <= phi;
    let verdict = if !classification.is_complete() {
        Verdict::Unknown
    } else if all_ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let params = json!({ "q": classification.q, "C1": c1, "C2": c2, "t_max": classification.t_max });
    let details = json!({ "per_k": rows, "total": total, "phi_q": phi });
    CheckReport::new("density_count", params, verdict, details)
}
