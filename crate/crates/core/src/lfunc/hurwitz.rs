//! Hurwitz zeta by Euler–Maclaurin and Dirichlet L-values built from it.

use num_complex::Complex;

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `B_2, B_4, ..., B_32` as exact fractions.
const BERNOULLI: [(f64, f64); 16] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
    (-7709321041217.0, 510.0),
];

/// Correction terms used with the Euler–Maclaurin tail.
pub const BERNOULLI_TERMS: usize = 8;
const MAX_DOUBLINGS: u32 = 6;
/// Largest modulus and height accepted by [`l_value`].
pub const MAX_MODULUS: u64 = 10_000;
pub const MAX_HEIGHT: f64 = 1000.0;

/// `B_{2k}/(2k)!` for `k = 1..=16`.
fn bernoulli_ratio<T: Real>(k: usize) -> T {
    let (num, den) = BERNOULLI[k - 1];
    let fact: f64 = (1..=2 * k).map(|i| i as f64).product();
    T::lit(num / den / fact)
}

/// `(e^z - 1)/z`, accurate near `z = 0`.
fn expm1_over<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.norm() < T::lit(1e-5) {
        let one = Complex::new(T::one(), T::zero());
        return one + z * (one / T::lit(2.0) + z / T::lit(6.0));
    }
    let (x, y) = (z.re, z.im);
    let half = (y / T::lit(2.0)).sin();
    let re = x.exp_m1() * y.cos() - T::lit(2.0) * half * half;
    let im = x.exp() * y.sin();
    Complex::new(re, im) / z
}

fn tolerance<T: Real>() -> T {
    T::lit(1e-14).max(T::epsilon() * T::lit(64.0))
}

/// `ζ(s, w) - 1/(s - 1)` for `0 < w <= 1`; entire in `s`.
pub fn hurwitz_regular<T: Real>(s: Complex<T>, w: T) -> Result<Complex<T>> {
    let base = (s.norm().ceil() + T::lit(10.0)).max(T::lit(20.0)).to_usize().unwrap();
    let mut n_terms = base;
    for _ in 0..=MAX_DOUBLINGS {
        let (value, err) = euler_maclaurin(s, w, n_terms);
        if err <= tolerance::<T>() * value.norm().max(T::one()) {
            return Ok(value);
        }
        n_terms *= 2;
    }
    Err(Error::Numerical(format!("Hurwitz zeta did not converge at s = {s}, w = {w}")))
}

/// `ζ(s, w)` for `s != 1`.
pub fn hurwitz_zeta<T: Real>(s: Complex<T>, w: T) -> Result<Complex<T>> {
    let sm1 = s - T::one();
    if sm1.norm() == T::zero() {
        return Err(Error::Domain("Hurwitz zeta has a pole at s = 1".into()));
    }
    Ok(hurwitz_regular(s, w)? + sm1.inv())
}

fn euler_maclaurin<T: Real>(s: Complex<T>, w: T, n_terms: usize) -> (Complex<T>, T) {
    let mut sum = Complex::new(T::zero(), T::zero());
    for n in (0..n_terms).rev() {
        let v = T::from_usize(n).unwrap() + w;
        sum = sum + (-s * v.ln()).exp();
    }
    let big_w = T::from_usize(n_terms).unwrap() + w;
    let log_w = big_w.ln();
    let one_minus_s = Complex::new(T::one(), T::zero()) - s;
    // (W^{1-s} - 1)/(s - 1) = -log W · expm1(z)/z with z = (1 - s) log W.
    let pole_part = -expm1_over(one_minus_s * log_w) * log_w;
    let w_pow = (-s * log_w).exp();
    let mut acc = sum + pole_part + w_pow / T::lit(2.0);
    // Tail terms B_{2k}/(2k)! (s)_{2k-1} W^{-s-2k+1}.
    let mut rising = s;
    let mut power = w_pow / big_w;
    let inv_w2 = T::one() / (big_w * big_w);
    let mut last = T::zero();
    for k in 1..=BERNOULLI_TERMS + 1 {
        let term = rising * power * bernoulli_ratio::<T>(k);
        if k <= BERNOULLI_TERMS {
            acc = acc + term;
        } else {
            last = term.norm();
        }
        let kt = T::from_usize(2 * k).unwrap();
        rising = rising * (s + kt - T::one()) * (s + kt);
        power = power * inv_w2;
    }
    (acc, last)
}

/// Hurwitz values `ζ(s, a/q) - 1/(s-1)` for a fixed set of residues, shared by
/// all characters of one modulus.
#[derive(Debug, Clone)]
pub struct HurwitzBatch<T> {
    q: u64,
    residues: Vec<u64>,
    shifts: Vec<T>,
}

impl<T: Real> HurwitzBatch<T> {
    pub fn new(q: u64, residues: Vec<u64>) -> Self {
        assert!(residues.iter().all(|&a| a >= 1 && a <= q));
        let shifts = residues.iter().map(|&a| T::from_u64_lossy(a) / T::from_u64_lossy(q)).collect();
        Self { q, residues, shifts }
    }

    /// Reduced residues `1 <= a <= q` with `gcd(a, q) = 1`.
    pub fn units(q: u64) -> Self {
        let residues = (1..=q).filter(|&a| crate::arith::gcd(a, q) == 1).collect();
        Self::new(q, residues)
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn regular_parts(&self, s: Complex<T>) -> Result<Vec<Complex<T>>> {
        self.shifts.iter().map(|&w| hurwitz_regular(s, w)).collect()
    }
}

fn check_window<T: Real>(q: u64, s: Complex<T>) -> Result<()> {
    if q > MAX_MODULUS {
        return Err(Error::Capacity(format!("modulus {q} above {MAX_MODULUS}")));
    }
    if s.im.abs() > T::lit(MAX_HEIGHT) {
        return Err(Error::Domain(format!("|Im s| above {MAX_HEIGHT}: {s}")));
    }
    Ok(())
}

/// `L(s, χ)` for a primitive character, or `(s - 1) ζ(s)` when `χ` is the
/// character mod 1; entire in both cases.
pub fn l_entire<T: Real>(chi: &DirichletCharacter, s: Complex<T>) -> Result<Complex<T>> {
    let q = chi.modulus();
    check_window(q, s)?;
    let sm1 = s - T::one();
    if q == 1 {
        return Ok(hurwitz_regular(s, T::one())? * sm1 + T::one());
    }
    let batch = HurwitzBatch::<T>::units(q);
    let parts = batch.regular_parts(s)?;
    let mut acc = Complex::new(T::zero(), T::zero());
    for (&a, z) in batch.residues().iter().zip(parts) {
        acc = acc + chi.value::<T>(a) * z;
    }
    Ok(acc * (-s * T::from_u64_lossy(q).ln()).exp())
}

/// `L(s, χ) = q^{-s} Σ_a χ(a) ζ(s, a/q)`.
///
/// Imprimitive characters go through their primitive character with the
/// missing Euler factors restored. The principal character has a pole at `s = 1`.
pub fn l_value<T: Real>(chi: &DirichletCharacter, s: Complex<T>) -> Result<Complex<T>> {
    check_window(chi.modulus(), s)?;
    let prim = chi.conductor();
    let core = if prim.conductor == 1 {
        let sm1 = s - T::one();
        if sm1.norm() == T::zero() {
            return Err(Error::Domain("L(s, χ₀) has a pole at s = 1".into()));
        }
        l_entire(&prim.induced, s)? / sm1
    } else {
        l_entire(&prim.induced, s)?
    };
    let mut value = core;
    for (p, _) in crate::arith::factorize(chi.modulus()) {
        if prim.conductor % p != 0 {
            let chi_p = prim.induced.value::<T>(p);
            value = value * (Complex::new(T::one(), T::zero()) - chi_p * (-s * T::from_u64_lossy(p).ln()).exp());
        }
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::CharacterGroup;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn basel() {
        let one = CharacterGroup::new(1).principal();
        let v = l_value(&one, c(2.0, 0.0)).unwrap();
        assert!((v.re - PI * PI / 6.0).abs() < 1e-12 && v.im.abs() < 1e-14);
        let v4 = l_value(&one, c(4.0, 0.0)).unwrap();
        assert!((v4.re - PI.powi(4) / 90.0).abs() < 1e-12);
    }

    #[test]
    fn zeta_at_special_points() {
        let one = CharacterGroup::new(1).principal();
        assert!((l_value(&one, c(0.0, 0.0)).unwrap().re + 0.5).abs() < 1e-12);
        assert!((l_value(&one, c(-1.0, 0.0)).unwrap().re + 1.0 / 12.0).abs() < 1e-12);
        let trivial = l_value(&one, c(-2.0, 0.0)).unwrap().norm();
        assert!(trivial < 1e-10, "{trivial}");
        assert!(matches!(l_value(&one, c(1.0, 0.0)), Err(Error::Domain(_))));
        // (s - 1) ζ(s) → 1 at the pole.
        assert!((l_entire(&one, c(1.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn leibniz_at_one() {
        let chi = CharacterGroup::new(4).characters().pop().unwrap();
        let v = l_value(&chi, c(1.0, 0.0)).unwrap();
        assert!((v.re - PI / 4.0).abs() < 1e-12 && v.im.abs() < 1e-14);
    }

    #[test]
    fn real_characters_at_one() {
        // L(1, χ_{-3}) = π/(3√3), L(1, χ_5) = 2 log φ/√5.
        let chi3 = CharacterGroup::new(3).characters().pop().unwrap();
        let v = l_value(&chi3, c(1.0, 0.0)).unwrap();
        assert!((v.re - PI / (3.0 * 3f64.sqrt())).abs() < 1e-12);
        let chi5 = CharacterGroup::new(5).characters().into_iter().find(|x| x.order() == 2).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let v = l_value(&chi5, c(1.0, 0.0)).unwrap();
        assert!((v.re - 2.0 * golden.ln() / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn conjugate_symmetry() {
        for chi in CharacterGroup::new(7).characters() {
            let s = c(0.6, 12.5);
            let a = l_value(&chi, s).unwrap();
            let b = l_value(&chi.conj(), s.conj()).unwrap();
            assert!((a.conj() - b).norm() < 1e-11);
        }
    }

    #[test]
    fn imprimitive_restores_euler_factors() {
        // χ₀ mod 6 at s = 2: ζ(2)(1 - 1/4)(1 - 1/9).
        let chi = CharacterGroup::new(6).principal();
        let v = l_value(&chi, c(2.0, 0.0)).unwrap();
        assert!((v.re - PI * PI / 6.0 * 0.75 * (8.0 / 9.0)).abs() < 1e-12);
    }

    #[test]
    fn high_on_the_line() {
        let one = CharacterGroup::new(1).principal();
        // ζ(1/2 + 1000 i) to 15 digits.
        let v = l_value(&one, c(0.5, 1000.0)).unwrap();
        assert!((v - c(0.356_334_367_194_396, 0.931_997_831_232_994)).norm() < 1e-10, "{v}");
    }

    #[test]
    fn window_limits() {
        let one = CharacterGroup::new(1).principal();
        assert!(matches!(l_value(&one, c(0.5, 2000.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn single_precision() {
        let one = CharacterGroup::new(1).principal();
        let v = l_value(&one, Complex::new(2.0f32, 0.0)).unwrap();
        assert!((v.re - (PI * PI / 6.0) as f32).abs() < 1e-5);
    }
}
