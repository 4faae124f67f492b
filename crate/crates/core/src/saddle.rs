//! The saddle point `α(x, y)`, Euler products at real points, and the
//! main-term scale `E_q(x, y)`.
//!
//! `α` is the positive root of `Σ_{p <= y} log p / (p^α - 1) = log x`.

use serde::Serialize;

use crate::arith::{gcd, primes_up_to};
use crate::error::{Error, Result};
use crate::scalar::{Compensated, Real};
use crate::sieve::SmoothTable;

/// Solution of the saddle-point equation plus the quantities built on it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SaddleResult<T> {
    pub alpha: T,
    pub x: T,
    pub y: T,
    pub q: u64,
    /// `|Σ log p/(p^α - 1) - log x|` at the returned `α`.
    pub residual: T,
    /// `log L(α, χ₀ mod 1; y)`, all primes `p <= y`.
    pub log_l_alpha: T,
    /// `log L(α, χ₀ mod q; y)`, primes `p <= y` with `p ∤ q`.
    pub log_l_alpha_q: T,
    /// `log E_q(x, y)`.
    pub log_e: T,
    pub iterations: u32,
}

impl<T: Real> SaddleResult<T> {
    pub fn l_alpha(&self) -> T {
        self.log_l_alpha.exp()
    }

    pub fn l_alpha_q(&self) -> T {
        self.log_l_alpha_q.exp()
    }

    /// `E_q(x, y)`; may overflow to infinity where `log_e` is still finite.
    pub fn e(&self) -> T {
        self.log_e.exp()
    }

    /// `u = log x / log y`.
    pub fn u(&self) -> T {
        self.x.ln() / self.y.ln()
    }

    /// `v = log x / log q` (infinite for `q = 1`).
    pub fn v(&self) -> T {
        self.x.ln() / T::from_u64_lossy(self.q).ln()
    }
}

/// Primes up to `y` with their logarithms; reusable across many `x`.
#[derive(Debug, Clone)]
pub struct SaddleSolver<T> {
    y: T,
    primes: Vec<u64>,
    logs: Vec<T>,
}

const MAX_ITERATIONS: u32 = 300;

impl<T: Real> SaddleSolver<T> {
    pub fn new(y: T) -> Result<Self> {
        if !(y >= T::lit(2.0)) {
            return Err(Error::Domain(format!("need y >= 2, got {y}")));
        }
        let limit = y.floor().to_u64().ok_or_else(|| Error::Capacity(format!("y = {y} too large")))?;
        let primes = primes_up_to(limit);
        let logs = primes.iter().map(|&p| T::from_u64_lossy(p).ln()).collect();
        Ok(Self { y, primes, logs })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// `Σ_{p <= y} log p / (p^α - 1)`.
    pub fn saddle_sum(&self, alpha: T) -> T {
        self.logs
            .iter()
            .map(|&lp| lp / (alpha * lp).exp_m1())
            .collect::<Compensated<T>>()
            .value()
    }

    fn saddle_derivative(&self, alpha: T) -> T {
        -self
            .logs
            .iter()
            .map(|&lp| {
                let d = (alpha * lp).exp_m1();
                lp * lp * (d + T::one()) / (d * d)
            })
            .collect::<Compensated<T>>()
            .value()
    }

    /// `log L(α, χ₀ mod q; y) = -Σ_{p <= y, p ∤ q} log(1 - p^{-α})`.
    pub fn log_euler_product(&self, alpha: T, q: u64) -> T {
        self.primes
            .iter()
            .zip(&self.logs)
            .filter(|(&p, _)| q == 1 || gcd(p, q) == 1)
            .map(|(_, &lp)| -(-(-alpha * lp).exp()).ln_1p())
            .collect::<Compensated<T>>()
            .value()
    }

    /// Solves for `α(x, y)`: bracket by doubling/halving, then safeguarded Newton.
    pub fn solve(&self, x: T, q: u64) -> Result<SaddleResult<T>> {
        if !(x >= T::lit(2.0)) || !x.is_finite() {
            return Err(Error::Domain(format!("need finite x >= 2, got {x}")));
        }
        if q == 0 {
            return Err(Error::Domain("modulus must be positive".into()));
        }
        let log_x = x.ln();
        let g = |a: T| self.saddle_sum(a) - log_x;

        let mut hi = T::lit(2.0);
        let mut iterations = 0;
        while g(hi) > T::zero() {
            hi = hi * T::lit(2.0);
            iterations += 1;
            if iterations > 64 {
                return Err(Error::Numerical(format!("no upper bracket for alpha at x={x}")));
            }
        }
        let mut lo = hi / T::lit(2.0);
        while g(lo) < T::zero() {
            hi = lo;
            lo = lo / T::lit(2.0);
            iterations += 1;
            if lo < T::min_positive_value().sqrt() {
                return Err(Error::Numerical(format!("no lower bracket for alpha at x={x}")));
            }
        }

        let target = log_x * T::epsilon() * T::lit(16.0);
        let mut alpha = (lo + hi) / T::lit(2.0);
        loop {
            iterations += 1;
            let value = g(alpha);
            if value.abs() <= target {
                break;
            }
            if value > T::zero() {
                lo = alpha;
            } else {
                hi = alpha;
            }
            let newton = alpha - value / self.saddle_derivative(alpha);
            alpha = if newton > lo && newton < hi { newton } else { (lo + hi) / T::lit(2.0) };
            if hi - lo <= T::epsilon() * hi * T::lit(4.0) {
                break;
            }
            if iterations > MAX_ITERATIONS {
                return Err(Error::Numerical(format!(
                    "alpha did not converge at x={x}, y={}: bracket [{lo}, {hi}]",
                    self.y
                )));
            }
        }
        let residual = g(alpha).abs();
        let allowed = log_x * T::lit(1e-9).max(T::epsilon() * T::lit(1e3));
        if residual > allowed {
            return Err(Error::Numerical(format!(
                "alpha residual {residual} exceeds {allowed} at x={x}, y={}",
                self.y
            )));
        }
        let log_l_alpha = self.log_euler_product(alpha, 1);
        let log_l_alpha_q = if q == 1 { log_l_alpha } else { self.log_euler_product(alpha, q) };
        let log_e = log_scale(alpha, log_x, self.y, log_l_alpha_q);
        Ok(SaddleResult {
            alpha,
            x,
            y: self.y,
            q,
            residual,
            log_l_alpha,
            log_l_alpha_q,
            log_e,
            iterations,
        })
    }
}

/// `log E = α log x + log L - log α - ½ log((1 + log x / y) log x log y)`.
fn log_scale<T: Real>(alpha: T, log_x: T, y: T, log_l: T) -> T {
    let half = T::lit(0.5);
    alpha * log_x + log_l
        - alpha.ln()
        - half * ((T::one() + log_x / y).ln() + log_x.ln() + y.ln().ln())
}

/// `α(x, y)` with the Euler products and `E_q(x, y)` for modulus `q`.
pub fn solve_alpha<T: Real>(x: T, y: T, q: u64) -> Result<SaddleResult<T>> {
    SaddleSolver::new(y)?.solve(x, q)
}

/// `E_q(x, y)`, evaluated in log space.
pub fn estimate_e<T: Real>(x: T, y: T, q: u64) -> Result<T> {
    Ok(solve_alpha(x, y, q)?.e())
}

/// `Ψ(x, y; χ₀) / (Ψ(x, y) Π_{p | q} (1 - p^{-α}))`, flagged outside `[0.2, 5]`.
#[derive(Debug, Clone, Serialize)]
pub struct ProportionalityReport {
    pub x: f64,
    pub y: f64,
    pub q: u64,
    pub alpha: f64,
    pub psi: u64,
    pub psi_q: u64,
    pub local_product: f64,
    pub ratio: f64,
    pub flagged: bool,
}

pub fn check_coprime_proportionality(
    table: &SmoothTable,
    x: f64,
    y: f64,
    q: u64,
) -> Result<ProportionalityReport> {
    let psi = table.psi(x, y)?;
    let psi_q = table.psi_coprime(x, y, q)?;
    let alpha = solve_alpha(x, y, q)?.alpha;
    let local_product: f64 = crate::arith::factorize(q)
        .into_iter()
        .map(|(p, _)| 1.0 - (p as f64).powf(-alpha))
        .product();
    let ratio = psi_q as f64 / (psi as f64 * local_product);
    Ok(ProportionalityReport {
        x,
        y,
        q,
        alpha,
        psi,
        psi_q,
        local_product,
        ratio,
        flagged: !(0.2..=5.0).contains(&ratio),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisection_oracle(x: f64, y: f64) -> f64 {
        let primes = primes_up_to(y as u64);
        let f = |a: f64| {
            primes.iter().map(|&p| (p as f64).ln() / ((p as f64).powf(a) - 1.0)).sum::<f64>() - x.ln()
        };
        let (mut lo, mut hi) = (1e-6, 8.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn single_prime_closed_form() {
        let r = solve_alpha(4.0f64, 2.0, 1).unwrap();
        assert!((r.alpha - 1.5f64.log2()).abs() < 1e-12);
        assert!((r.alpha - 0.584_962_5).abs() < 1e-7);
    }

    #[test]
    fn agrees_with_bisection() {
        for &(x, y) in &[(1e3, 1e3), (1e5, 1e5), (1e6, 50.0), (1e12, 1e3), (30.0, 7.0)] {
            let r = solve_alpha(x, y, 1).unwrap();
            assert!((r.alpha - bisection_oracle(x, y)).abs() < 1e-10, "x={x} y={y}");
            assert!(r.residual <= 1e-9 * x.ln());
        }
    }

    #[test]
    fn asymptotic_shape_for_large_y() {
        let y = 1e6f64;
        for u in [2.0f64, 3.0] {
            let r = solve_alpha(y.powf(u), y, 1).unwrap();
            let approx = 1.0 - (u * u.ln()).ln() / y.ln();
            assert!((r.alpha - approx).abs() <= 5.0 / y.ln());
        }
    }

    #[test]
    fn monotone_in_x_and_y() {
        let ys = [10.0f64, 100.0, 1000.0];
        let xs = [1e3f64, 1e5, 1e8, 1e12];
        for &y in &ys {
            let solver = SaddleSolver::new(y).unwrap();
            let alphas: Vec<f64> = xs.iter().map(|&x| solver.solve(x, 1).unwrap().alpha).collect();
            assert!(alphas.windows(2).all(|w| w[1] < w[0]));
        }
        for &x in &xs {
            let alphas: Vec<f64> = ys.iter().map(|&y| solve_alpha(x, y, 1).unwrap().alpha).collect();
            assert!(alphas.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn log_space_matches_direct_evaluation() {
        let (x, y) = (1e6f64, 100.0);
        let r = solve_alpha(x, y, 6).unwrap();
        let mut l = 1.0f64;
        for p in primes_up_to(100) {
            if p != 2 && p != 3 {
                l /= 1.0 - (p as f64).powf(-r.alpha);
            }
        }
        let direct =
            x.powf(r.alpha) * l / (r.alpha * ((1.0 + x.ln() / y) * x.ln() * y.ln()).sqrt());
        assert!((r.e() / direct - 1.0).abs() < 1e-10);
    }

    #[test]
    fn removing_euler_factors_lowers_e() {
        let full = estimate_e(1e7f64, 100.0, 1).unwrap();
        let reduced = estimate_e(1e7f64, 100.0, 2 * 3 * 5 * 7).unwrap();
        assert!(reduced < full);
    }

    #[test]
    fn huge_x_stays_finite_in_log_space() {
        let r = solve_alpha(1e300f64, 1e4, 1).unwrap();
        assert!(r.log_e.is_finite());
        assert!(r.residual <= 1e-9 * 1e300f64.ln());
    }

    #[test]
    fn y_above_x() {
        let r = solve_alpha(50.0f64, 1000.0, 1).unwrap();
        assert!(r.residual <= 1e-9 * 50f64.ln());
    }

    #[test]
    fn proportionality_reports() {
        let t = SmoothTable::build(1_000_000).unwrap();
        let one = check_coprime_proportionality(&t, 1e6, 1e3, 1).unwrap();
        assert_eq!(one.ratio, 1.0);
        let two = check_coprime_proportionality(&t, 1e6, 1e3, 2).unwrap();
        assert!((0.5..=2.0).contains(&two.ratio), "{}", two.ratio);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(solve_alpha(1.0f64, 10.0, 1), Err(Error::Domain(_))));
        assert!(matches!(solve_alpha(10.0f64, 1.5, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn single_precision_solver() {
        let r = solve_alpha(4.0f32, 2.0, 1).unwrap();
        assert!((r.alpha - 1.5f32.log2()).abs() < 1e-5);
    }
}
