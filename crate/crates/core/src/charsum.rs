//! Twisted character sums over intervals and their comparison with the
//! `N e^{-ξ √log N}` and `η^{-1} q♭^η` bounds.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::largest_prime_factor;
use crate::characters::{CharacterGroup, DirichletCharacter};
use crate::error::{Error, Result};
use crate::lfunc::hurwitz::l_value;
use crate::scalar::Compensated;

const CHUNK: u64 = 1 << 16;
const TABLE_LIMIT: u64 = 1 << 22;

/// `Σ_{N < n <= M} χ(n) n^{-σ-it}`.
#[derive(Debug, Clone)]
pub struct SumQuery {
    pub chi: DirichletCharacter,
    pub n: u64,
    pub m: u64,
    pub t: f64,
    pub sigma: f64,
}

pub fn char_sum(query: &SumQuery) -> Result<Complex64> {
    if query.n >= query.m {
        return Err(Error::Domain(format!("empty interval ({}, {}]", query.n, query.m)));
    }
    let q = query.chi.modulus();
    // A full period table only pays off when the interval covers a good part of it.
    let values = if q <= TABLE_LIMIT && q <= 2 * (query.m - query.n) { Some(query.chi.table::<f64>()) } else { None };
    let value = |n: u64| match &values {
        Some(t) => t[(n % q) as usize],
        None => query.chi.value::<f64>(n),
    };
    let s = Complex64::new(query.sigma, query.t);
    let untwisted = query.sigma == 0.0 && query.t == 0.0;
    let starts: Vec<u64> = (query.n + 1..=query.m).step_by(CHUNK as usize).collect();
    let parts: Vec<(f64, f64)> = starts
        .par_iter()
        .map(|&lo| {
            let hi = (lo + CHUNK - 1).min(query.m);
            let mut re = Compensated::default();
            let mut im = Compensated::default();
            for n in lo..=hi {
                let c = value(n);
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                let v = if untwisted { c } else { c * (-s * (n as f64).ln()).exp() };
                re.add(v.re);
                im.add(v.im);
            }
            (re.value(), im.value())
        })
        .collect();
    let mut re = Compensated::default();
    let mut im = Compensated::default();
    for (r, i) in parts {
        re.add(r);
        im.add(i);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// Threshold quantities for modulus `q`; `ℓ` and `η` are taken at `t = 0`,
/// see [`ThresholdParams::eta_at`] for other heights.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThresholdParams {
    pub q: u64,
    pub nu: f64,
    pub tau: f64,
    pub c3: f64,
    pub e0: f64,
    /// Modulus threshold `c₄(τ)` of the `|L(s, χ)|` bound; no value is known, so it is an input.
    pub c4: f64,
    pub largest_prime_factor: u64,
    /// `log q♭` with `q♭ = P(q)^{e0} + exp(c3 log q / log log q)`.
    pub log_q_flat: f64,
    /// `q♭` itself, infinite when it overflows.
    pub q_flat: f64,
    pub ell: f64,
    pub eta: f64,
    /// `ξ = min(1, 1/(3ν))`.
    pub xi: f64,
    /// `q♭ >= q^ν`: no interval is in scope.
    pub scope_vacuous: bool,
}

impl ThresholdParams {
    /// `ℓ = log q(|t| + 3)`.
    pub fn ell_at(&self, t: f64) -> f64 {
        (self.q as f64 * (t.abs() + 3.0)).ln()
    }

    /// `η = ℓ^{-1/2} (log 2ℓ)^{-3/4}`.
    pub fn eta_at(&self, t: f64) -> f64 {
        let l = self.ell_at(t);
        l.powf(-0.5) * (2.0 * l).ln().powf(-0.75)
    }

    pub fn with_c4(mut self, c4: f64) -> Self {
        self.c4 = c4;
        self
    }

    /// `q♭ < N <= q^ν`.
    pub fn in_scope(&self, n: f64) -> bool {
        let ln = n.ln();
        ln > self.log_q_flat && ln <= self.nu * (self.q as f64).ln()
    }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    hi + (-(a - b).abs()).exp().ln_1p()
}

pub fn compute_thresholds(q: u64, nu: f64, tau: f64, c3: f64, e0: f64) -> Result<ThresholdParams> {
    if q < 16 {
        return Err(Error::Domain(format!("thresholds need q >= 16 (log log q > 1), got {q}")));
    }
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("need ν > 0, got {nu}")));
    }
    let lq = (q as f64).ln();
    let p = largest_prime_factor(q);
    let log_q_flat = log_add_exp(e0 * (p as f64).ln(), c3 * lq / lq.ln());
    let mut params = ThresholdParams {
        q,
        nu,
        tau,
        c3,
        e0,
        c4: 0.0,
        largest_prime_factor: p,
        log_q_flat,
        q_flat: log_q_flat.exp(),
        ell: 0.0,
        eta: 0.0,
        xi: (1.0f64).min(1.0 / (3.0 * nu)),
        scope_vacuous: log_q_flat >= nu * lq,
    };
    params.ell = params.ell_at(0.0);
    params.eta = params.eta_at(0.0);
    Ok(params)
}

/// One row of the ratio table.
#[derive(Debug, Clone, Serialize)]
pub struct ChangRow {
    pub q: u64,
    pub char_label: String,
    pub n: u64,
    pub m: u64,
    pub t: f64,
    pub sigma: f64,
    pub abs_sum: f64,
    pub bound: f64,
    pub ratio: f64,
    pub in_scope: bool,
}

pub const CHANG_CSV_HEADER: &str = "q,char_label,N,M,t,sigma,abs_sum,bound,ratio,in_scope";

impl ChangRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.q, self.char_label, self.n, self.m, self.t, self.sigma, self.abs_sum, self.bound, self.ratio, self.in_scope
        )
    }
}

/// `|Σ_{N<n<=M} χ(n) n^{-it}| / (N e^{-ξ √log N})`.
pub fn chang_ratio(chi: &DirichletCharacter, n: u64, m: u64, t: f64, params: &ThresholdParams) -> Result<ChangRow> {
    if !chi.is_primitive() {
        return Err(Error::Domain(format!("{} is not primitive", chi.label())));
    }
    let abs_sum = char_sum(&SumQuery { chi: chi.clone(), n, m, t, sigma: 0.0 })?.norm();
    let nf = n as f64;
    let bound = nf * (-params.xi * nf.ln().sqrt()).exp();
    Ok(ChangRow {
        q: chi.modulus(),
        char_label: chi.label(),
        n,
        m,
        t,
        sigma: 0.0,
        abs_sum,
        bound,
        ratio: abs_sum / bound,
        in_scope: params.in_scope(nf),
    })
}

/// Largest `|Σ_{M<n<=M+N} χ(n)|` over all intervals: the diameter of the set of
/// partial sums over one period.
pub fn max_interval_sum(chi: &DirichletCharacter) -> f64 {
    let q = chi.modulus();
    let values = chi.table::<f64>();
    let mut points = Vec::with_capacity(q as usize + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    points.push(acc);
    for n in 1..=q {
        acc += values[(n % q) as usize];
        points.push(acc);
    }
    if chi.is_real() {
        let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.re), hi.max(p.re)));
        return hi - lo;
    }
    let hull = convex_hull(points);
    let mut best = 0.0f64;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            best = best.max((a - b).norm());
        }
    }
    best
}

/// Andrew's monotone chain.
fn convex_hull(mut pts: Vec<Complex64>) -> Vec<Complex64> {
    pts.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    pts.dedup_by(|a, b| (*a - *b).norm() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Complex64, a: Complex64, b: Complex64| (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re);
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Pólya–Vinogradov comparison for every primitive character mod `q`.
#[derive(Debug, Clone, Serialize)]
pub struct PolyaVinogradovReport {
    pub q: u64,
    pub characters: usize,
    pub bound: f64,
    pub max_sum: f64,
    pub worst_character: Option<String>,
    pub holds: bool,
}

pub fn polya_vinogradov(q: u64) -> PolyaVinogradovReport {
    let bound = (q as f64).sqrt() * (q as f64).ln();
    let chars: Vec<DirichletCharacter> =
        CharacterGroup::new(q).characters().into_iter().filter(|c| c.is_primitive() && !c.is_principal()).collect();
    let sums: Vec<f64> = chars.par_iter().map(max_interval_sum).collect();
    let (mut max_sum, mut worst) = (0.0, None);
    for (chi, &s) in chars.iter().zip(&sums) {
        if s > max_sum {
            max_sum = s;
            worst = Some(chi.label());
        }
    }
    PolyaVinogradovReport { q, characters: chars.len(), bound, max_sum, worst_character: worst, holds: max_sum <= bound }
}

/// `|L(s, χ)|` against `η^{-1} q♭^η` at each grid point.
#[derive(Debug, Clone, Serialize)]
pub struct LBoundPoint {
    pub sigma: f64,
    pub t: f64,
    pub abs_l: f64,
    pub eta: f64,
    pub bound: f64,
    pub ratio: f64,
    /// `σ > 1 - η` and `|t| <= 3 q^τ`.
    pub in_region: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LBoundReport {
    pub character: String,
    pub params: ThresholdParams,
    pub points: Vec<LBoundPoint>,
    pub max_ratio: f64,
    pub all_hold: bool,
    /// `q > c₄(τ)`; below it the bound is not claimed.
    pub modulus_in_scope: bool,
    /// Bound so large (tiny `η` or overflowing `q♭^η`) that the comparison says nothing.
    pub vacuous: bool,
}

pub fn l_bound_compare(chi: &DirichletCharacter, grid: &[(f64, f64)], params: &ThresholdParams) -> Result<LBoundReport> {
    let q = chi.modulus() as f64;
    let t_limit = 3.0 * q.powf(params.tau);
    let mut points = Vec::with_capacity(grid.len());
    for &(sigma, t) in grid {
        let abs_l = l_value(chi, Complex64::new(sigma, t))?.norm();
        let eta = params.eta_at(t);
        let bound = (eta * params.log_q_flat - eta.ln()).exp();
        let in_region = sigma > 1.0 - eta && t.abs() <= t_limit;
        points.push(LBoundPoint { sigma, t, abs_l, eta, bound, ratio: abs_l / bound, in_region, holds: abs_l <= bound });
    }
    let considered = points.iter().filter(|p| p.in_region);
    let max_ratio = considered.clone().map(|p| p.ratio).fold(0.0, f64::max);
    let all_hold = considered.clone().all(|p| p.holds);
    let vacuous = considered.clone().any(|p| !p.bound.is_finite() || p.eta < 1e-3);
    Ok(LBoundReport {
        character: chi.label(),
        params: *params,
        points,
        max_ratio,
        all_hold,
        modulus_in_scope: q > params.c4,
        vacuous,
    })
}

/// `b(N) = 4 N^η e^{-ξ √log N}` on a grid, with its stationary point.
#[derive(Debug, Clone, Serialize)]
pub struct BProfile {
    pub eta: f64,
    pub xi: f64,
    pub n: Vec<f64>,
    pub b: Vec<f64>,
    /// `log N* = ξ²/(4η²)`, where `b` turns from decreasing to increasing.
    pub log_n_star: f64,
    /// `log Ω = 2ξ²/η²` as first displayed for the monotonicity range.
    pub log_omega_first_form: f64,
    /// `log Ω = ¼ ξ² ℓ (log 2ℓ)^{3/2}` with `η = ℓ^{-1/2}(log 2ℓ)^{-3/4}` inverted,
    /// equal to `ξ²/(4η²)`.
    pub log_omega_second_form: f64,
    /// `log_omega_first_form / log_n_star`.
    pub discrepancy_factor: f64,
    pub decreasing_below_star: bool,
    /// Grid cell `[N_i, N_{i+1}]` where the finite differences change sign.
    pub sign_change: Option<(f64, f64)>,
}

pub fn b_value(n: f64, eta: f64, xi: f64) -> f64 {
    let l = n.ln();
    4.0 * (eta * l - xi * l.sqrt()).exp()
}

pub fn b_profile(n_grid: &[f64], eta: f64, xi: f64) -> Result<BProfile> {
    if !(eta > 0.0 && xi > 0.0) {
        return Err(Error::Domain(format!("need η, ξ > 0, got {eta}, {xi}")));
    }
    let b: Vec<f64> = n_grid.iter().map(|&n| b_value(n, eta, xi)).collect();
    let log_n_star = xi * xi / (4.0 * eta * eta);
    let log_omega_first_form = 2.0 * xi * xi / (eta * eta);
    let log_omega_second_form = 0.25 * xi * xi / (eta * eta);
    let mut decreasing_below_star = true;
    let mut sign_change = None;
    for i in 0..n_grid.len().saturating_sub(1) {
        let diff = b[i + 1] - b[i];
        if n_grid[i + 1].ln() <= log_n_star && diff >= 0.0 {
            decreasing_below_star = false;
        }
        if i > 0 && sign_change.is_none() && (b[i] - b[i - 1]) < 0.0 && diff > 0.0 {
            sign_change = Some((n_grid[i - 1], n_grid[i + 1]));
        }
    }
    Ok(BProfile {
        eta,
        xi,
        n: n_grid.to_vec(),
        b,
        log_n_star,
        log_omega_first_form,
        log_omega_second_form,
        discrepancy_factor: log_omega_first_form / log_n_star,
        decreasing_below_star,
        sign_change,
    })
}
