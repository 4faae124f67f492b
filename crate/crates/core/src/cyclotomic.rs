//! Exact root-of-unity arithmetic.
//!
//! Character values are `e^{2πi k/m}`; sums of them are elements of the ring
//! `ℤ[ζ_m]`. [`CyclotomicInt`] keeps the coefficient vector over the powers
//! `ζ_m^0 .. ζ_m^{m-1}` and reduces modulo the cyclotomic polynomial `Φ_m`
//! when a canonical form is needed, so equality tests are exact.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex;

use crate::arith::gcd;
use crate::scalar::Real;

/// `e^{2πi num/den}` with `0 <= num < den`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    pub num: u64,
    pub den: u64,
}

impl RootOfUnity {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "root of unity needs a positive denominator");
        let num = num % den;
        let g = gcd(num, den).max(1);
        let (num, den) = if num == 0 { (0, 1) } else { (num / g, den / g) };
        Self { num, den }
    }

    pub fn one() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn conj(self) -> Self {
        Self::new(self.den - self.num, self.den)
    }

    pub fn mul(self, other: Self) -> Self {
        let den = crate::arith::lcm(self.den, other.den);
        Self::new(self.num * (den / self.den) + other.num * (den / other.den), den)
    }

    /// Exponent of this root on the common denominator `m` (requires `den | m`).
    pub fn exponent_on(self, m: u64) -> u64 {
        debug_assert_eq!(m % self.den, 0);
        self.num * (m / self.den)
    }

    pub fn to_complex<T: Real>(self) -> Complex<T> {
        if self.num == 0 {
            return Complex::new(T::one(), T::zero());
        }
        // Quarter turns are exact.
        match (self.num * 4) % self.den {
            0 => match self.num * 4 / self.den {
                1 => return Complex::new(T::zero(), T::one()),
                2 => return Complex::new(-T::one(), T::zero()),
                3 => return Complex::new(T::zero(), -T::one()),
                _ => {}
            },
            _ => {}
        }
        let angle = T::TAU() * T::from_u64_lossy(self.num) / T::from_u64_lossy(self.den);
        Complex::new(angle.cos(), angle.sin())
    }
}

/// Element `Σ c_k ζ_m^k` of `ℤ[ζ_m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicInt {
    m: u64,
    coeffs: Vec<i64>,
}

impl CyclotomicInt {
    pub fn zero(m: u64) -> Self {
        assert!(m > 0);
        Self { m, coeffs: vec![0; m as usize] }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// Adds `count · ζ_m^k`.
    pub fn add_power(&mut self, k: u64, count: i64) {
        let idx = (k % self.m) as usize;
        self.coeffs[idx] += count;
    }

    pub fn add_root(&mut self, r: RootOfUnity, count: i64) {
        self.add_power(r.exponent_on(self.m), count);
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.m, other.m);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += *b;
        }
    }

    /// Multiplies by `ζ_m^k`.
    pub fn rotated(&self, k: u64) -> Self {
        let m = self.m as usize;
        let k = (k % self.m) as usize;
        let mut coeffs = vec![0; m];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[(i + k) % m] = c;
        }
        Self { m: self.m, coeffs }
    }

    /// The same element in `ℤ[ζ_m]` for a multiple `m` of the current modulus.
    pub fn lift(&self, m: u64) -> Self {
        assert!(m % self.m == 0, "{m} is not a multiple of {}", self.m);
        let step = (m / self.m) as usize;
        let mut coeffs = vec![0; m as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * step] = c;
        }
        Self { m, coeffs }
    }

    /// Complex conjugate: `ζ^k -> ζ^{-k}`.
    pub fn conj(&self) -> Self {
        let m = self.m as usize;
        let mut coeffs = vec![0; m];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[(m - i) % m] = c;
        }
        Self { m: self.m, coeffs }
    }

    /// Canonical coefficients: remainder modulo `Φ_m`, degree `< φ(m)`.
    pub fn reduced(&self) -> Vec<i64> {
        let phi = cyclotomic_polynomial(self.m);
        let deg = phi.len() - 1;
        let mut r = self.coeffs.clone();
        // Φ_m is monic.
        for top in (deg..r.len()).rev() {
            let c = r[top];
            if c == 0 {
                continue;
            }
            for (j, &pj) in phi.iter().enumerate() {
                r[top - deg + j] -= c * pj;
            }
        }
        r.truncate(deg);
        r
    }

    /// `Some(n)` when the element equals the rational integer `n`.
    pub fn as_integer(&self) -> Option<i64> {
        let r = self.reduced();
        if r.iter().skip(1).all(|&c| c == 0) {
            Some(r.first().copied().unwrap_or(0))
        } else {
            None
        }
    }

    pub fn to_complex<T: Real>(&self) -> Complex<T> {
        let mut re = crate::scalar::Compensated::<T>::default();
        let mut im = crate::scalar::Compensated::<T>::default();
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let z = RootOfUnity::new(k as u64, self.m).to_complex::<T>();
            let c = T::from_i64(c).expect("coefficient fits");
            re.add(c * z.re);
            im.add(c * z.im);
        }
        Complex::new(re.value(), im.value())
    }
}

/// Integer coefficients of `Φ_m`, constant term first.
pub fn cyclotomic_polynomial(m: u64) -> Vec<i64> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("cache poisoned").get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            num = exact_divide(&num, &cyclotomic_polynomial(d));
        }
    }
    cache.lock().expect("cache poisoned").insert(m, num.clone());
    num
}

fn exact_divide(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "cyclotomic division left a remainder");
    quot
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn sum_of_all_roots_is_zero() {
        for m in 2..40 {
            let mut z = CyclotomicInt::zero(m);
            for k in 0..m {
                z.add_power(k, 1);
            }
            assert_eq!(z.as_integer(), Some(0), "m = {m}");
        }
    }

    #[test]
    fn nonreal_element_is_not_an_integer() {
        let mut z = CyclotomicInt::zero(3);
        z.add_power(1, 1);
        assert_eq!(z.as_integer(), None);
        z.add_power(2, 1);
        assert_eq!(z.as_integer(), Some(-1));
    }

    #[test]
    fn roots_of_unity() {
        let r = RootOfUnity::new(6, 8);
        assert_eq!(r, RootOfUnity { num: 3, den: 4 });
        assert_eq!(r.conj(), RootOfUnity { num: 1, den: 4 });
        assert_eq!(r.mul(r.conj()), RootOfUnity::one());
        let z = RootOfUnity::new(1, 2).to_complex::<f64>();
        assert_eq!(z, Complex::new(-1.0, 0.0));
    }

    #[test]
    fn lift_preserves_value() {
        let mut a = CyclotomicInt::zero(6);
        a.add_power(1, 3);
        a.add_power(4, -2);
        let b = a.lift(24);
        assert_eq!(b.modulus(), 24);
        assert!((a.to_complex::<f64>() - b.to_complex::<f64>()).norm() < 1e-12);
        let mut c = a.clone();
        c.add_assign(&a.conj());
        assert_eq!(c.lift(12).as_integer(), c.as_integer());
    }
}
