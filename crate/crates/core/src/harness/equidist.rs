use serde::Serialize;

use crate::arith::{euler_phi, gcd};
use crate::error::{Error, Result};
use crate::lfunc::classify::k0;
use crate::sieve::SmoothTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum YLabel {
    Large,
    Small,
    VerySmall,
}

impl YLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            YLabel::Large => "large",
            YLabel::Small => "small",
            YLabel::VerySmall => "very_small",
        }
    }
}

/// The `y` label and the boundaries of the problem, Rodosskiĭ and basic `k` ranges:
/// problem `[0, k₀)`, Rodosskiĭ `[k₀, √u)`, basic `[√u, ½ log q]`.
#[derive(Debug, Clone, Serialize)]
pub struct RangeLabels {
    pub y_label: YLabel,
    pub very_small_below: f64,
    pub large_above: f64,
    pub u: f64,
    pub k0: i64,
    pub sqrt_u: f64,
    pub half_log_q: f64,
}

impl RangeLabels {
    pub fn k_label(&self, k: f64) -> Option<&'static str> {
        if k < 0.0 {
            None
        } else if k < self.k0 as f64 {
            Some("problem")
        } else if k < self.sqrt_u {
            Some("rodosskii")
        } else if k <= self.half_log_q {
            Some("basic")
        } else {
            None
        }
    }
}

/// Very small when `y < (log log x)³`, else large when `y > e^{(log x)^{0.1}}`,
/// else small. Very small wins where the two cutoffs cross.
pub fn label_ranges(x: f64, y: f64, q: u64, a: f64, d: f64) -> RangeLabels {
    label_ranges_log(x.ln(), y, q, a, d)
}

/// [`label_ranges`] from `log x`, for `x` beyond `f64`.
pub fn label_ranges_log(lx: f64, y: f64, q: u64, a: f64, d: f64) -> RangeLabels {
    let very_small_below = lx.ln().powi(3);
    let large_above = lx.powf(0.1).exp();
    let y_label = if y < very_small_below {
        YLabel::VerySmall
    } else if y > large_above {
        YLabel::Large
    } else {
        YLabel::Small
    };
    let u = lx / y.ln();
    RangeLabels { y_label, very_small_below, large_above, u, k0: k0(a, d), sqrt_u: u.sqrt(), half_log_q: 0.5 * (q as f64).ln() }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyReport {
    pub q: u64,
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub v: f64,
    pub phi_q: u64,
    pub psi_q: u64,
    /// `(a, Ψ(x, y; q, a))` for every `a` coprime to `q`, increasing `a`.
    pub counts: Vec<(u64, u64)>,
    /// `max_a |φ(q) Ψ(x, y; q, a) − Ψ_q(x, y)|`, exact.
    pub delta_numerator: u64,
    /// `delta_numerator / Ψ_q(x, y)`.
    pub delta: f64,
    /// Smallest class attaining the maximum.
    pub argmax_class: u64,
    pub y_label: YLabel,
}

impl DiscrepancyReport {
    /// Recomputes `(numerator, Δ)` from the stored class counts.
    pub fn recompute(counts: &[(u64, u64)], phi_q: u64) -> (u64, u64, f64, u64) {
        let psi_q: u64 = counts.iter().map(|c| c.1).sum();
        let mut best = (0u64, counts.first().map_or(0, |c| c.0));
        for &(a, c) in counts {
            let dev = (phi_q as u128 * c as u128).abs_diff(psi_q as u128) as u64;
            if dev > best.0 {
                best = (dev, a);
            }
        }
        (psi_q, best.0, best.0 as f64 / psi_q as f64, best.1)
    }
}

/// `Δ = max_{(a,q)=1} |φ(q) Ψ(x,y;q,a)/Ψ_q(x,y) − 1|`.
pub fn discrepancy(table: &SmoothTable, x: f64, y: f64, q: u64) -> Result<DiscrepancyReport> {
    let all = table.class_counts(x, y, q)?;
    let counts: Vec<(u64, u64)> = (1..=q).filter(|&a| gcd(a, q) == 1).map(|a| (a, all[(a % q) as usize])).collect();
    let phi_q = euler_phi(q);
    let (psi_q, delta_numerator, delta, argmax_class) = DiscrepancyReport::recompute(&counts, phi_q);
    if psi_q == 0 {
        return Err(Error::UndefinedDiscrepancy { q, x });
    }
    let lx = x.ln();
    Ok(DiscrepancyReport {
        q,
        x,
        y,
        u: lx / y.ln(),
        v: lx / (q as f64).ln(),
        phi_q,
        psi_q,
        counts,
        delta_numerator,
        delta,
        argmax_class,
        y_label: label_ranges(x, y, q, 1.0, 0.0).y_label,
    })
}

/// Kendall's tau-a; zero for fewer than two points.
pub fn kendall_tau(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return 0.0;
    }
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            let a = (xs[j] - xs[i]).partial_cmp(&0.0).map_or(0, |o| o as i64);
            let b = (ys[j] - ys[i]).partial_cmp(&0.0).map_or(0, |o| o as i64);
            s += a * b;
        }
    }
    s as f64 / (n * (n - 1) / 2) as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendReport {
    pub q: u64,
    pub y: f64,
    pub points: Vec<DiscrepancyReport>,
    /// Kendall tau of `Δ` against `log x`.
    pub kendall_tau: f64,
}

/// `Δ(x)` along `xs` at fixed `(q, y)`.
pub fn trend(table: &SmoothTable, xs: &[f64], y: f64, q: u64) -> Result<TrendReport> {
    let points = xs.iter().map(|&x| discrepancy(table, x, y, q)).collect::<Result<Vec<_>>>()?;
    let lx: Vec<f64> = points.iter().map(|p| p.x.ln()).collect();
    let d: Vec<f64> = points.iter().map(|p| p.delta).collect();
    Ok(TrendReport { q, y, kendall_tau: kendall_tau(&lx, &d), points })
}
