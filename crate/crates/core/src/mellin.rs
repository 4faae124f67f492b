//! The smooth cutoff `Φ`, its Mellin transform `Φ̆`, smoothed character sums
//! over smooth numbers, truncated Euler products and the contour integral
//! that recovers the smoothed sums.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primes_up_to;
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_with_breaks, QuadOptions};
use crate::saddle::solve_alpha;
use crate::scalar::{Compensated, Real};
use crate::sieve::SmoothTable;

/// Order of the smoothstep: `S'` vanishes to order `SMOOTH` at both ends.
const SMOOTH: usize = 10;
/// Polynomial degree of the transition piece.
const DEGREE: usize = 2 * SMOOTH + 1;
/// Above this `|s|` the Mellin transform uses its closed form.
const CLOSED_FORM_MIN_ABS: f64 = 20.0;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn falling(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64)
}

/// `Φ(t) = 1` on `[0, 1/2]`, `0` on `[2, ∞)`, and a degree-21 smoothstep in
/// `w = (2 - t)/(3/2)` between, so `Φ` is ten times continuously differentiable.
#[derive(Debug, Clone)]
pub struct CutoffSpec<T> {
    bernstein: Vec<T>,
    /// `21·C(20, 10)`, the leading constant of `S'`.
    lead: T,
}

pub fn make_cutoff<T: Real>() -> CutoffSpec<T> {
    CutoffSpec {
        bernstein: (0..=DEGREE).map(|j| T::lit(binomial(DEGREE, j))).collect(),
        lead: T::lit(DEGREE as f64 * binomial(2 * SMOOTH, SMOOTH)),
    }
}

impl<T: Real> CutoffSpec<T> {
    pub const PLATEAU_END: f64 = 0.5;
    pub const SUPPORT_END: f64 = 2.0;

    fn w(t: T) -> T {
        (T::lit(2.0) - t) / T::lit(1.5)
    }

    /// `S(w)`; for `w > 1/2` evaluated as `1 - S(1 - w)` to keep relative accuracy near 1.
    fn smoothstep(&self, w: T) -> T {
        let tail = |w: T| -> T {
            let v = T::one() - w;
            (SMOOTH + 1..=DEGREE)
                .map(|j| self.bernstein[j] * w.powi(j as i32) * v.powi((DEGREE - j) as i32))
                .sum()
        };
        if w <= T::lit(0.5) {
            tail(w)
        } else {
            T::one() - tail(T::one() - w)
        }
    }

    pub fn value(&self, t: T) -> T {
        if t <= T::lit(Self::PLATEAU_END) {
            T::one()
        } else if t >= T::lit(Self::SUPPORT_END) {
            T::zero()
        } else {
            self.smoothstep(Self::w(t))
        }
    }

    /// `Φ^{(j)}(t)`; zero outside the transition piece for `j >= 1`.
    pub fn derivative(&self, j: usize, t: T) -> T {
        if j == 0 {
            return self.value(t);
        }
        if t <= T::lit(Self::PLATEAU_END) || t >= T::lit(Self::SUPPORT_END) {
            return T::zero();
        }
        self.piece_derivative(j, t)
    }

    /// `j`-th derivative (`j >= 1`) of the transition polynomial at any `t`.
    pub fn piece_derivative(&self, j: usize, t: T) -> T {
        assert!(j >= 1);
        if j > DEGREE {
            return T::zero();
        }
        let w = Self::w(t);
        let v = T::one() - w;
        // D^{j-1} [w^10 (1-w)^10] by Leibniz.
        let m = j - 1;
        let mut acc = T::zero();
        for i in 0..=m.min(SMOOTH) {
            let k = m - i;
            if k > SMOOTH {
                continue;
            }
            let sign = if k % 2 == 0 { T::one() } else { -T::one() };
            let coeff = T::lit(binomial(m, i) * falling(SMOOTH, i) * falling(SMOOTH, k));
            acc += sign * coeff * w.powi((SMOOTH - i) as i32) * v.powi((SMOOTH - k) as i32);
        }
        let chain = T::lit((-2.0f64 / 3.0).powi(j as i32));
        self.lead * acc * chain
    }

    /// Largest `|Φ^{(j)}|` on the plateau/support side of each knot against a
    /// one-sided forward/backward difference of `Φ^{(j-1)}` on the transition side.
    pub fn knot_jumps(&self, max_order: usize, h: T) -> Vec<(usize, T, T)> {
        let lo = T::lit(Self::PLATEAU_END);
        let hi = T::lit(Self::SUPPORT_END);
        (1..=max_order)
            .map(|j| {
                let at_lo = (self.derivative(j - 1, lo + h) - self.derivative(j - 1, lo)) / h;
                let at_hi = (self.derivative(j - 1, hi) - self.derivative(j - 1, hi - h)) / h;
                (j, at_lo.abs(), at_hi.abs())
            })
            .collect()
    }
}

/// `Φ̆(s) = ∫_0^∞ Φ(t) t^{s-1} dt` for `Re s > 0`.
///
/// Small `|s|` integrates `(1/2)^s/s + ∫_{1/2}^{2} Φ(t) t^{s-1} dt`. Large `|s|`
/// integrates by parts through the polynomial piece, which leaves only the
/// boundary terms of orders 11 to 21 and keeps relative accuracy as `Φ̆` decays.
pub fn mellin<T: Real>(phi: &CutoffSpec<T>, s: Complex<T>) -> Result<Complex<T>> {
    if !(s.re > T::zero()) {
        return Err(Error::Domain(format!("Mellin transform needs Re(s) > 0, got {s}")));
    }
    if s.norm() >= T::lit(CLOSED_FORM_MIN_ABS) {
        return Ok(mellin_closed_form(phi, s));
    }
    let half = T::lit(0.5);
    let plateau = Complex::new(half, T::zero()).powc(s) / s;
    let sm1 = s - T::one();
    let opts = QuadOptions { abs_tol: T::lit(1e-14), rel_tol: T::lit(1e-13), ..Default::default() };
    let body = integrate(|t: T| (sm1 * t.ln()).exp() * phi.value(t), half, T::lit(2.0), &opts)?;
    Ok(plateau + body.value)
}

fn mellin_closed_form<T: Real>(phi: &CutoffSpec<T>, s: Complex<T>) -> Complex<T> {
    let ln2 = T::LN_2();
    let mut pochhammer = s;
    for i in 1..=SMOOTH {
        pochhammer = pochhammer * (s + T::from_usize(i).unwrap());
    }
    let mut acc = Complex::new(T::zero(), T::zero());
    for j in SMOOTH + 1..=DEGREE {
        let jt = T::from_usize(j).unwrap();
        pochhammer = pochhammer * (s + jt);
        let at_two = phi.piece_derivative(j, T::lit(2.0));
        let at_half = phi.piece_derivative(j, T::lit(0.5));
        let up = ((s + jt) * ln2).exp() * at_two;
        let down = (-(s + jt) * ln2).exp() * at_half;
        let term = (up - down) / pochhammer;
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// `C_11(α) = ∫ |Φ^{(11)}(t)| t^{α+10} dt`, so that `|Φ̆(α+it)| <= C_11 / |(s)_11|`.
pub fn decay_constant<T: Real>(phi: &CutoffSpec<T>, alpha: T) -> Result<T> {
    let opts = QuadOptions { abs_tol: T::zero(), rel_tol: T::lit(1e-10), ..Default::default() };
    let r = integrate(
        |t: T| {
            let v = phi.derivative(SMOOTH + 1, t).abs() * t.powf(alpha + T::lit(10.0));
            Complex::new(v, T::zero())
        },
        T::lit(0.5),
        T::lit(2.0),
        &opts,
    )?;
    Ok(r.value.re)
}

/// Decay scan of `|Φ̆(α+it)|` over a log-spaced grid.
#[derive(Debug, Clone, Serialize)]
pub struct DecayProfile {
    pub alpha: f64,
    pub t: Vec<f64>,
    pub abs: Vec<f64>,
    /// `max |Φ̆(s)|·|s|(|s|+1)^8` over the grid.
    pub weighted_max: f64,
    /// Least-squares slope of `log |Φ̆|` against `log t`.
    pub slope: f64,
}

pub fn decay_profile<T: Real>(phi: &CutoffSpec<T>, alpha: T, t_lo: T, t_hi: T, points: usize) -> Result<DecayProfile> {
    assert!(points >= 2);
    let (l0, l1) = (t_lo.ln(), t_hi.ln());
    let mut ts = Vec::with_capacity(points);
    let mut abs = Vec::with_capacity(points);
    let mut weighted_max = 0.0f64;
    for i in 0..points {
        let frac = T::from_usize(i).unwrap() / T::from_usize(points - 1).unwrap();
        let t = (l0 + (l1 - l0) * frac).exp();
        let s = Complex::new(alpha, t);
        let v = mellin(phi, s)?.norm();
        let m = s.norm();
        let w = v * m * (m + T::one()).powi(8);
        weighted_max = weighted_max.max(w.to_f64().unwrap());
        ts.push(t.to_f64().unwrap());
        abs.push(v.to_f64().unwrap());
    }
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = abs.iter().map(|a| a.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(DecayProfile { alpha: alpha.to_f64().unwrap(), t: ts, abs, weighted_max, slope: sxy / sxx })
}

/// `Ψ(x, y; χ, Φ) = Σ_{n ∈ S(y)} χ(n) Φ(n/x)`, summed exactly over `n < 2x`.
pub fn psi_smoothed<T: Real>(
    table: &SmoothTable,
    chi: &DirichletCharacter,
    x: T,
    y: T,
    phi: &CutoffSpec<T>,
) -> Result<Complex<T>> {
    let xf = x.to_f64().unwrap();
    if !(xf >= 0.0) || 2.0 * xf > table.x_max() as f64 {
        return Err(Error::Range(format!("2x = {} exceeds table limit {}", 2.0 * xf, table.x_max())));
    }
    let n_max = (2.0 * xf).floor() as u64;
    let y_bound = y.floor().to_f64().unwrap().min(u32::MAX as f64) as u32;
    let values = chi.table::<T>();
    let q = chi.modulus();
    let lpf = table.as_slice();
    let chunk = 1 << 16;
    let parts: Vec<(T, T)> = (1..=n_max)
        .collect::<Vec<u64>>()
        .par_chunks(chunk)
        .map(|ns| {
            let mut re = Compensated::default();
            let mut im = Compensated::default();
            for &n in ns {
                if lpf[n as usize] > y_bound {
                    continue;
                }
                let c = values[(n % q) as usize];
                if c.re == T::zero() && c.im == T::zero() {
                    continue;
                }
                let w = phi.value(T::from_u64_lossy(n) / x);
                re.add(c.re * w);
                im.add(c.im * w);
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
    Ok(Complex::new(re.value(), im.value()))
}

/// Euler factors `(1 - χ(p) p^{-s})^{-1}` for `p <= y`, precomputed per character.
#[derive(Debug, Clone)]
pub struct EulerFactors<T> {
    log_p: Vec<T>,
    chi_p: Vec<Complex<T>>,
}

impl<T: Real> EulerFactors<T> {
    pub fn new(chi: &DirichletCharacter, y: T) -> Self {
        let limit = if y < T::lit(2.0) { 0 } else { y.floor().to_u64().unwrap() };
        let mut log_p = Vec::new();
        let mut chi_p = Vec::new();
        for p in primes_up_to(limit) {
            let c = chi.value::<T>(p);
            if c.re != T::zero() || c.im != T::zero() {
                log_p.push(T::from_u64_lossy(p).ln());
                chi_p.push(c);
            }
        }
        Self { log_p, chi_p }
    }

    /// `log L(s, χ; y)` as a sum of principal logarithms.
    pub fn log_value(&self, s: Complex<T>) -> Complex<T> {
        let mut re = Compensated::default();
        let mut im = Compensated::default();
        for (&lp, &c) in self.log_p.iter().zip(&self.chi_p) {
            let z = c * (-s * lp).exp();
            let term = -(Complex::new(T::one(), T::zero()) - z).ln();
            re.add(term.re);
            im.add(term.im);
        }
        Complex::new(re.value(), im.value())
    }

    pub fn value(&self, s: Complex<T>) -> Complex<T> {
        self.log_value(s).exp()
    }
}

/// `L(s, χ; y) = Π_{p <= y} (1 - χ(p) p^{-s})^{-1}`.
pub fn truncated_l<T: Real>(chi: &DirichletCharacter, s: Complex<T>, y: T) -> Result<Complex<T>> {
    if !(s.re > T::zero()) {
        return Err(Error::Domain(format!("truncated Euler product needs Re(s) > 0, got {s}")));
    }
    Ok(EulerFactors::new(chi, y).value(s))
}

/// `|L(α+it, χ; y)| / L(α, χ₀; y)` with `χ₀` principal of the same modulus.
pub fn l_ratio_profile<T: Real>(chi: &DirichletCharacter, y: T, alpha: T, t_grid: &[T]) -> Result<Vec<(T, T)>> {
    if !(alpha > T::zero()) {
        return Err(Error::Domain(format!("need alpha > 0, got {alpha}")));
    }
    let factors = EulerFactors::new(chi, y);
    let principal = EulerFactors::new(&chi.group().principal(), y);
    let base = principal.log_value(Complex::new(alpha, T::zero())).re;
    Ok(t_grid
        .iter()
        .map(|&t| (t, (factors.log_value(Complex::new(alpha, t)).re - base).exp()))
        .collect())
}

/// Contour-integral reconstruction of `Ψ(x, y; χ, Φ)` on `Re s = α`.
#[derive(Debug, Clone, Serialize)]
pub struct IntegralReport {
    pub chi: String,
    pub x: f64,
    pub y: f64,
    pub q: u64,
    pub alpha: f64,
    pub t_num: f64,
    /// `(yq)^{1/4}`, the edge of the central piece.
    pub split_height: f64,
    pub central: Complex<f64>,
    pub tail_plus: Complex<f64>,
    pub tail_minus: Complex<f64>,
    pub total: Complex<f64>,
    pub quadrature_error: f64,
    /// Bound on the part of the line beyond `|t| > T_num`.
    pub remainder_bound: f64,
    /// `(|I+| + |I-|)·(yq)² / (x^α L(α, χ₀; y))`.
    pub tail_constant: f64,
    pub panels: usize,
}

/// Default truncation height `max(500, 4 (yq)^{1/4})`.
pub fn default_t_num(y: f64, q: u64) -> f64 {
    (4.0 * (y * q as f64).powf(0.25)).max(500.0)
}

pub fn contour_psi<T: Real>(
    chi: &DirichletCharacter,
    x: T,
    y: T,
    phi: &CutoffSpec<T>,
    t_num: Option<T>,
) -> Result<IntegralReport> {
    let q = chi.modulus();
    let alpha = solve_alpha(x, y, q)?.alpha;
    let t_num = t_num.unwrap_or_else(|| T::lit(default_t_num(y.to_f64().unwrap(), q)));
    let split = (y * T::from_u64_lossy(q)).powf(T::lit(0.25));
    let log_x = x.ln();
    let factors = EulerFactors::new(chi, y);
    let principal = EulerFactors::new(&chi.group().principal(), y);
    let log_scale = principal.log_value(Complex::new(alpha, T::zero())).re + alpha * log_x;

    let integrand = |t: T| -> Complex<T> {
        let s = Complex::new(alpha, t);
        let log_part = factors.log_value(s) + s * log_x;
        match mellin(phi, s) {
            Ok(m) => log_part.exp() * m,
            Err(_) => Complex::new(T::nan(), T::nan()),
        }
    };
    let scale = log_scale.exp() * mellin(phi, Complex::new(alpha, T::zero()))?.norm();
    let opts = QuadOptions {
        abs_tol: scale * T::lit(1e-10),
        rel_tol: T::lit(1e-9),
        max_panel: T::PI() / (T::lit(2.0) * log_x),
        max_panels: 2_000_000,
        parallel: true,
    };
    let result = integrate_with_breaks(integrand, -t_num, t_num, &[-split, split], &opts)?;
    if !result.value.re.is_finite() || !result.value.im.is_finite() {
        return Err(Error::Numerical(format!("non-finite contour integrand for {}", chi.label())));
    }
    let two_pi = T::TAU();
    let central = result.partial(-split, split) / two_pi;
    let tail_plus = result.partial(split, t_num) / two_pi;
    let tail_minus = result.partial(-t_num, -split) / two_pi;
    let total = result.value / two_pi;

    let c11 = decay_constant(phi, alpha)?;
    let remainder_bound = log_scale.exp() * c11 / (T::lit(10.0) * t_num.powi(10)) / T::PI();
    let yq = y * T::from_u64_lossy(q);
    let tail_constant = (tail_plus.norm() + tail_minus.norm()) * yq * yq / log_scale.exp();

    let f = |v: T| v.to_f64().unwrap();
    let c = |z: Complex<T>| Complex::new(f(z.re), f(z.im));
    Ok(IntegralReport {
        chi: chi.label(),
        x: f(x),
        y: f(y),
        q,
        alpha: f(alpha),
        t_num: f(t_num),
        split_height: f(split),
        central: c(central),
        tail_plus: c(tail_plus),
        tail_minus: c(tail_minus),
        total: c(total),
        quadrature_error: f(result.error / two_pi),
        remainder_bound: f(remainder_bound),
        tail_constant: f(tail_constant),
        panels: result.panels.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::CharacterGroup;

    fn phi() -> CutoffSpec<f64> {
        make_cutoff()
    }

    #[test]
    fn plateau_and_support() {
        let p = phi();
        assert_eq!(p.value(0.25), 1.0);
        assert_eq!(p.value(0.5), 1.0);
        assert_eq!(p.value(2.0), 0.0);
        assert_eq!(p.value(3.0), 0.0);
        assert!((p.value(1.25) - 0.5).abs() < 1e-15);
        for i in 0..=300 {
            let t = i as f64 * 0.01;
            let v = p.value(t);
            assert!((0.0..=1.0).contains(&v));
            assert!((v + p.value(2.5 - t) - 1.0).abs() < 1e-13 || t < 0.5 || t > 2.0);
        }
    }

    #[test]
    fn monotone_transition() {
        let p = phi();
        let mut prev = 1.0;
        for i in 1..1500 {
            let v = p.value(0.5 + i as f64 * 1e-3);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = phi();
        for j in 1..=11 {
            for &t in &[0.7, 1.0, 1.3, 1.8] {
                let h = 1e-5;
                let fd = (p.derivative(j - 1, t + h) - p.derivative(j - 1, t - h)) / (2.0 * h);
                let exact = p.derivative(j, t);
                let scale = exact.abs().max(p.derivative(j - 1, t).abs()).max(1.0);
                assert!((fd - exact).abs() < 1e-5 * scale, "j={j} t={t}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn knots_are_smooth_to_order_nine() {
        for (j, lo, hi) in phi().knot_jumps(9, 1e-10) {
            assert!(lo < 1e-8 && hi < 1e-8, "j = {j}: {lo}, {hi}");
        }
        // The eleventh derivative jumps.
        assert!(phi().piece_derivative(11, 2.0).abs() > 1.0);
    }

    #[test]
    fn mellin_at_one_is_the_area() {
        // By the symmetry S(w) + S(1-w) = 1 the area is 1/2 + 3/4.
        let v = mellin(&phi(), Complex::new(1.0, 0.0)).unwrap();
        assert!((v.re - 1.25).abs() < 1e-13 && v.im.abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let p = phi();
        for &s in &[Complex::new(0.7, 25.0), Complex::new(0.3, 20.5), Complex::new(2.0, 40.0), Complex::new(25.0, 0.0)] {
            let closed = mellin_closed_form(&p, s);
            let sm1 = s - 1.0;
            let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, ..Default::default() };
            let body = integrate(|t: f64| (sm1 * t.ln()).exp() * p.value(t), 0.5, 2.0, &opts).unwrap();
            let direct = Complex::new(0.5, 0.0).powc(s) / s + body.value;
            assert!((closed - direct).norm() < 1e-12 + 1e-8 * direct.norm(), "s = {s}");
        }
    }

    #[test]
    fn mellin_of_small_s_uses_quadrature() {
        let p = phi();
        let s = Complex::new(0.5, 3.0);
        let conj = mellin(&p, s.conj()).unwrap();
        assert!((mellin(&p, s).unwrap().conj() - conj).norm() < 1e-14);
        assert!(matches!(mellin(&p, Complex::new(0.0, 1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn decay_is_steep() {
        let profile = decay_profile(&phi(), 0.7, 100.0, 1000.0, 30).unwrap();
        assert!(profile.slope <= -8.5, "slope {}", profile.slope);
        let wide = decay_profile(&phi(), 0.7, 1.0, 1000.0, 60).unwrap();
        assert!(wide.weighted_max.is_finite());
        let c11 = decay_constant(&phi(), 0.7).unwrap();
        for (&t, &a) in wide.t.iter().zip(&wide.abs) {
            let s = Complex::new(0.7, t);
            let poch: f64 = (0..11).map(|i| (s + i as f64).norm()).product();
            assert!(a <= c11 / poch * (1.0 + 1e-9), "t = {t}");
        }
    }

    #[test]
    fn truncated_product_examples() {
        let one = CharacterGroup::new(1).principal();
        let v = truncated_l(&one, Complex::new(2.0f64, 0.0), 3.0).unwrap();
        assert!((v.re - 1.5).abs() < 1e-15);
        assert_eq!(truncated_l(&one, Complex::new(2.0, 0.0), 1.5).unwrap(), Complex::new(1.0, 0.0));
    }

    #[test]
    fn truncated_product_bounded_by_principal() {
        let bound = truncated_l(&CharacterGroup::new(1).principal(), Complex::new(0.6, 0.0), 200.0).unwrap().re;
        for chi in CharacterGroup::new(15).characters() {
            for t in [0.0, 1.0, 7.5, 40.0] {
                let v = truncated_l(&chi, Complex::new(0.6, t), 200.0).unwrap();
                assert!(v.norm() <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn truncated_product_matches_smooth_dirichlet_series() {
        let table = SmoothTable::build(1_000_000).unwrap();
        for chi in CharacterGroup::new(7).characters().into_iter().take(3) {
            let s = Complex::new(2.0, 1.3);
            let mut sum = Complex::new(0.0, 0.0);
            for n in 1..=1_000_000u64 {
                if table.lpf(n) <= 13 {
                    sum += chi.value::<f64>(n) * (-s * (n as f64).ln()).exp();
                }
            }
            let v = truncated_l(&chi, s, 13.0).unwrap();
            assert!((v - sum).norm() < 1e-4);
        }
    }

    #[test]
    fn ratio_profile() {
        let one = CharacterGroup::new(1).principal();
        let r = l_ratio_profile(&one, 100.0f64, 0.8, &[0.0]).unwrap();
        assert!((r[0].1 - 1.0).abs() < 1e-14);
        for chi in CharacterGroup::new(9).characters() {
            let r = l_ratio_profile(&chi, 1000.0, 0.8, &[0.0, 1.0, 5.0, 30.0]).unwrap();
            assert!(r.iter().all(|&(_, v)| v <= 1.0 + 1e-12));
            assert!(r[1].1 < 1.0);
        }
    }

    #[test]
    fn smoothed_sum_sandwich_and_direct_oracle() {
        let table = SmoothTable::build(10_000).unwrap();
        let p = phi();
        let principal = CharacterGroup::new(4).principal();
        let v = psi_smoothed(&table, &principal, 1000.0, 1000.0, &p).unwrap();
        let lo = table.psi_coprime(500.0, 1000.0, 4).unwrap() as f64;
        let hi = table.psi_coprime(2000.0, 1000.0, 4).unwrap() as f64;
        assert!(lo <= v.re && v.re <= hi);

        let chi = CharacterGroup::new(4).characters().pop().unwrap();
        let got = psi_smoothed(&table, &chi, 1000.0, 1000.0, &p).unwrap();
        let mut direct = 0.0;
        for n in 1..2000u64 {
            if crate::arith::largest_prime_factor(n) > 1000 {
                continue;
            }
            let sign = match n % 4 {
                1 => 1.0,
                3 => -1.0,
                _ => 0.0,
            };
            direct += sign * p.value(n as f64 / 1000.0);
        }
        assert!((got.re - direct).abs() < 1e-10 && got.im == 0.0);
        assert!(matches!(psi_smoothed(&table, &chi, 6000.0, 10.0, &p), Err(Error::Range(_))));
    }

    #[test]
    fn smoothed_orthogonality() {
        let table = SmoothTable::build(10_000).unwrap();
        let p = phi();
        let q = 5;
        let chars = CharacterGroup::new(q).characters();
        for a in 1..q {
            let mut acc = Complex::new(0.0, 0.0);
            for chi in &chars {
                acc += chi.value::<f64>(a).conj() * psi_smoothed(&table, chi, 3000.0, 30.0, &p).unwrap();
            }
            acc /= chars.len() as f64;
            let mut direct = 0.0;
            for n in (a..6000).step_by(q as usize) {
                if table.lpf(n) <= 30 {
                    direct += p.value(n as f64 / 3000.0);
                }
            }
            assert!((acc.re - direct).abs() < 1e-9 && acc.im.abs() < 1e-9);
        }
    }

    #[test]
    fn contour_recovers_smoothed_sum() {
        let table = SmoothTable::build(1000).unwrap();
        let p = phi();
        let one = CharacterGroup::new(1).principal();
        let report = contour_psi(&one, 200.0, 50.0, &p, Some(500.0)).unwrap();
        let exact = psi_smoothed(&table, &one, 200.0, 50.0, &p).unwrap();
        assert!((report.total - exact).norm() / exact.norm() < 1e-3);
        assert!(report.remainder_bound < 1e-6 * exact.norm());
    }

    #[test]
    fn contour_conjugation() {
        let p = phi();
        let chars = CharacterGroup::new(5).characters();
        let chi = &chars[1];
        let a = contour_psi(chi, 300.0, 20.0, &p, Some(500.0)).unwrap();
        let b = contour_psi(&chi.conj(), 300.0, 20.0, &p, Some(500.0)).unwrap();
        assert!((a.total.conj() - b.total).norm() < 1e-6 * (1.0 + a.total.norm()));
    }
}
