//! Largest-prime-factor table and exact smooth-number counts.
//!
//! The table stores `P(n)` for every `n <= x_max` as a `u32`, with `P(1) = 1`
//! and an unused slot at index 0. All counts are single scans of the table.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, primes_up_to};
use crate::characters::DirichletCharacter;
use crate::cyclotomic::CyclotomicInt;
use crate::error::{Error, Result};

/// Default sieve segment length (entries).
pub const DEFAULT_SEGMENT: usize = 1 << 22;

/// Default memory budget for the table: 8 GiB, i.e. `x_max <= 2^31`.
pub const DEFAULT_MEMORY_BUDGET: u64 = 8 << 30;

const MAGIC: &[u8; 5] = b"SMTB1";

/// Table of largest prime factors over `[1, x_max]`.
#[derive(Clone)]
pub struct SmoothTable {
    x_max: u64,
    lpf: Vec<u32>,
}

impl std::fmt::Debug for SmoothTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothTable").field("x_max", &self.x_max).finish()
    }
}

/// A counting request `(x, y, q, a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountQuery {
    pub x: f64,
    pub y: f64,
    pub q: Option<u64>,
    pub a: Option<u64>,
}

impl CountQuery {
    pub fn validate(&self) -> Result<()> {
        if !(self.x >= 1.0 && self.y >= 1.0) {
            return Err(Error::Domain(format!("need x, y >= 1, got x={}, y={}", self.x, self.y)));
        }
        match (self.q, self.a) {
            (None, Some(_)) => Err(Error::Domain("residue class given without a modulus".into())),
            (Some(0), _) => Err(Error::Domain("modulus must be positive".into())),
            (Some(q), Some(a)) if a == 0 || a > q => {
                Err(Error::Domain(format!("residue {a} outside 1..={q}")))
            }
            _ => Ok(()),
        }
    }

    pub fn run(&self, table: &SmoothTable) -> Result<u64> {
        self.validate()?;
        match (self.q, self.a) {
            (Some(q), Some(a)) => table.psi_progression(self.x, self.y, q, a),
            (Some(q), None) => table.psi_coprime(self.x, self.y, q),
            _ => table.psi(self.x, self.y),
        }
    }
}

impl SmoothTable {
    /// Builds the table with the default segment length and memory budget.
    pub fn build(x_max: u64) -> Result<Self> {
        Self::build_with(x_max, DEFAULT_SEGMENT, DEFAULT_MEMORY_BUDGET)
    }

    /// Segmented sieve: each segment divides out the primes `p <= sqrt(x_max)`
    /// in increasing order; the last prime that divides `n` is `P(n)` unless a
    /// cofactor above `sqrt(x_max)` remains, which is then prime.
    pub fn build_with(x_max: u64, segment: usize, memory_budget: u64) -> Result<Self> {
        if x_max == 0 {
            return Err(Error::Domain("x_max must be at least 1".into()));
        }
        if x_max >= u32::MAX as u64 {
            return Err(Error::Capacity(format!("x_max = {x_max} does not fit 32-bit entries")));
        }
        let bytes = (x_max + 1) * 4;
        if bytes > memory_budget {
            return Err(Error::Capacity(format!(
                "table for x_max = {x_max} needs {bytes} bytes, budget is {memory_budget}"
            )));
        }
        let segment = segment.max(1024);
        let root = (x_max as f64).sqrt() as u64 + 1;
        let small_primes: Vec<u32> = primes_up_to(root).into_iter().map(|p| p as u32).collect();

        let mut lpf = vec![0u32; x_max as usize + 1];
        lpf.par_chunks_mut(segment).enumerate().for_each(|(i, chunk)| {
            let lo = (i * segment) as u64;
            sieve_segment(lo, chunk, &small_primes);
        });
        lpf[0] = 0;
        if x_max >= 1 {
            lpf[1] = 1;
        }
        Ok(Self { x_max, lpf })
    }

    pub fn x_max(&self) -> u64 {
        self.x_max
    }

    /// `P(n)`; `P(1) = 1`.
    pub fn lpf(&self, n: u64) -> u32 {
        self.lpf[n as usize]
    }

    /// The raw table; index 0 is unused.
    pub fn as_slice(&self) -> &[u32] {
        &self.lpf
    }

    fn bound(&self, x: f64) -> Result<u64> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("x must be nonnegative, got {x}")));
        }
        let n = x.floor();
        if n > self.x_max as f64 {
            return Err(Error::Range(format!("x = {x} exceeds table bound {}", self.x_max)));
        }
        Ok(n as u64)
    }

    fn y_bound(y: f64) -> u32 {
        if y >= u32::MAX as f64 {
            u32::MAX
        } else if y < 1.0 {
            0
        } else {
            y.floor() as u32
        }
    }

    /// `Ψ(x, y) = #{n <= x : P(n) <= y}`.
    pub fn psi(&self, x: f64, y: f64) -> Result<u64> {
        let n = self.bound(x)?;
        let yb = Self::y_bound(y);
        if n == 0 {
            return Ok(0);
        }
        Ok(self.lpf[1..=n as usize]
            .par_chunks(1 << 20)
            .map(|c| c.iter().filter(|&&p| p <= yb).count() as u64)
            .sum())
    }

    /// `Ψ_q(x, y)`: smooth `n <= x` with `gcd(n, q) = 1`.
    pub fn psi_coprime(&self, x: f64, y: f64, q: u64) -> Result<u64> {
        if q == 0 {
            return Err(Error::Domain("modulus must be positive".into()));
        }
        let counts = self.class_counts(x, y, q)?;
        Ok(counts
            .iter()
            .enumerate()
            .filter(|&(a, _)| gcd(a as u64, q) == 1)
            .map(|(_, &c)| c)
            .sum())
    }

    /// `Ψ(x, y; q, a)` for `1 <= a <= q`.
    pub fn psi_progression(&self, x: f64, y: f64, q: u64, a: u64) -> Result<u64> {
        if q == 0 || a == 0 || a > q {
            return Err(Error::Domain(format!("need 1 <= a <= q, got a={a}, q={q}")));
        }
        let n = self.bound(x)?;
        let yb = Self::y_bound(y);
        let mut count = 0u64;
        let mut m = a;
        while m <= n {
            if self.lpf[m as usize] <= yb {
                count += 1;
            }
            m += q;
        }
        Ok(count)
    }

    /// Counts of smooth `n <= x` in every residue class modulo `q`
    /// (index `r` holds the class `n ≡ r`), in one fused scan.
    pub fn class_counts(&self, x: f64, y: f64, q: u64) -> Result<Vec<u64>> {
        if q == 0 {
            return Err(Error::Domain("modulus must be positive".into()));
        }
        let n = self.bound(x)?;
        let yb = Self::y_bound(y);
        let q = q as usize;
        if n == 0 {
            return Ok(vec![0; q]);
        }
        // Chunks aligned to multiples of q so every chunk starts at residue 1.
        let per = ((1usize << 20) / q).max(1) * q;
        let body = &self.lpf[1..=n as usize];
        Ok(body
            .par_chunks(per)
            .map(|c| {
                let mut counts = vec![0u64; q];
                let mut r = 1 % q;
                for &p in c {
                    if p <= yb {
                        counts[r] += 1;
                    }
                    r += 1;
                    if r == q {
                        r = 0;
                    }
                }
                counts
            })
            .reduce(
                || vec![0u64; q],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            ))
    }

    /// `Ψ(x, y; χ) = Σ_{n ∈ S(x,y)} χ(n)`, exactly, as an element of `ℤ[ζ_m]`
    /// with `m` the order of `χ`.
    pub fn psi_twisted(&self, chi: &DirichletCharacter, x: f64, y: f64) -> Result<CyclotomicInt> {
        let q = chi.modulus();
        let counts = self.class_counts(x, y, q)?;
        Ok(twisted_from_counts(chi, &counts))
    }

    /// Writes the `SMTB1` dump: magic, `x_max` as `u64` LE, then `lpf[1..=x_max]` as `u32` LE.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&self.x_max.to_le_bytes())?;
        let mut buf = Vec::with_capacity(1 << 16);
        for chunk in self.lpf[1..].chunks(1 << 14) {
            buf.clear();
            for &v in chunk {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("missing SMTB1 magic".into()));
        }
        let mut xb = [0u8; 8];
        r.read_exact(&mut xb)?;
        let x_max = u64::from_le_bytes(xb);
        if x_max == 0 || x_max >= u32::MAX as u64 {
            return Err(Error::Format(format!("implausible x_max {x_max}")));
        }
        let mut lpf = vec![0u32; x_max as usize + 1];
        let mut buf = vec![0u8; 4 << 14];
        let mut idx = 1usize;
        while idx <= x_max as usize {
            let take = ((x_max as usize + 1 - idx).min(1 << 14)) * 4;
            r.read_exact(&mut buf[..take])?;
            for word in buf[..take].chunks_exact(4) {
                lpf[idx] = u32::from_le_bytes(word.try_into().expect("4 bytes"));
                idx += 1;
            }
        }
        Ok(Self { x_max, lpf })
    }
}

/// `Σ_a counts[a] χ(a)` as an exact cyclotomic integer.
pub fn twisted_from_counts(chi: &DirichletCharacter, counts: &[u64]) -> CyclotomicInt {
    let order = chi.order();
    let mut acc = CyclotomicInt::zero(order);
    for (a, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        if let Some(r) = chi.value_exact(a as u64) {
            acc.add_root(r, c as i64);
        }
    }
    acc
}

fn sieve_segment(lo: u64, chunk: &mut [u32], primes: &[u32]) {
    let len = chunk.len() as u64;
    let hi = lo + len;
    let mut rem: Vec<u32> = (lo..hi).map(|n| n as u32).collect();
    for v in chunk.iter_mut() {
        *v = 1;
    }
    for &p in primes {
        let p64 = p as u64;
        if p64 >= hi {
            break;
        }
        let start = lo.div_ceil(p64) * p64;
        let mut n = start.max(p64);
        while n < hi {
            let i = (n - lo) as usize;
            let mut r = rem[i];
            while r % p == 0 {
                r /= p;
            }
            rem[i] = r;
            chunk[i] = p;
            n += p64;
        }
    }
    for (i, v) in chunk.iter_mut().enumerate() {
        if rem[i] > 1 {
            *v = rem[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_prime, largest_prime_factor};
    use proptest::prelude::*;

    #[test]
    fn lpf_of_first_ten() {
        let t = SmoothTable::build(10).unwrap();
        assert_eq!(&t.as_slice()[1..], &[1, 2, 3, 2, 5, 3, 7, 2, 3, 5]);
    }

    #[test]
    fn single_entry_table() {
        let t = SmoothTable::build(1).unwrap();
        assert_eq!(&t.as_slice()[1..], &[1]);
    }

    #[test]
    fn large_prime_entry() {
        assert!(is_prime(999_983));
        let t = SmoothTable::build(1_000_000).unwrap();
        assert_eq!(t.lpf(999_983), 999_983);
    }

    #[test]
    fn small_segments_agree_with_trial_division() {
        let t = SmoothTable::build_with(50_000, 1024, DEFAULT_MEMORY_BUDGET).unwrap();
        for n in 1..=50_000u64 {
            assert_eq!(t.lpf(n) as u64, largest_prime_factor(n), "n = {n}");
        }
    }

    #[test]
    fn capacity_errors() {
        assert!(matches!(SmoothTable::build_with(1_000_000, 1024, 1000), Err(Error::Capacity(_))));
        assert!(matches!(SmoothTable::build(u32::MAX as u64), Err(Error::Capacity(_))));
    }

    #[test]
    fn counts_small_cases() {
        let t = SmoothTable::build(1000).unwrap();
        assert_eq!(t.psi(100.0, 100.0).unwrap(), 100);
        assert_eq!(t.psi(100.0, 10.0).unwrap(), 46);
        assert_eq!(t.psi_coprime(100.0, 100.0, 1).unwrap(), 100);
        assert_eq!(t.psi_progression(100.0, 100.0, 4, 1).unwrap(), 25);
        let brute = (1..=100u64).filter(|&n| largest_prime_factor(n) <= 10 && gcd(n, 6) == 1).count();
        assert_eq!(t.psi_coprime(100.0, 10.0, 6).unwrap(), brute as u64);
        let brute = (1..=100u64).filter(|&n| largest_prime_factor(n) <= 10 && n % 3 == 1).count();
        assert_eq!(t.psi_progression(100.0, 10.0, 3, 1).unwrap(), brute as u64);
    }

    #[test]
    fn range_errors() {
        let t = SmoothTable::build(100).unwrap();
        assert!(matches!(t.psi(101.0, 5.0), Err(Error::Range(_))));
        assert!(matches!(t.psi_progression(50.0, 5.0, 4, 5), Err(Error::Domain(_))));
        let bad = CountQuery { x: 10.0, y: 2.0, q: None, a: Some(1) };
        assert!(bad.validate().is_err());
    }

    /// Buchstab recursion: Ψ(x, y) = 1 + Σ_{p <= min(x, y)} Ψ(x/p, p).
    fn buchstab(x: u64, y: u64, primes: &[u64]) -> u64 {
        let mut total = 1;
        for &p in primes {
            if p > y || p > x {
                break;
            }
            total += buchstab(x / p, p, primes);
        }
        total
    }

    #[test]
    fn psi_matches_buchstab_recursion() {
        let t = SmoothTable::build(1_000_000).unwrap();
        let primes = primes_up_to(1000);
        let v = t.psi(1e6, 1e3).unwrap();
        assert_eq!(v, buchstab(1_000_000, 1000, &primes));
    }

    #[test]
    fn dump_round_trip_and_bad_magic() {
        let t = SmoothTable::build(5000).unwrap();
        let mut bytes = Vec::new();
        t.write_to(&mut bytes).unwrap();
        assert_eq!(&bytes[..5], b"SMTB1");
        assert_eq!(u64::from_le_bytes(bytes[5..13].try_into().unwrap()), 5000);
        assert_eq!(bytes.len(), 13 + 4 * 5000);
        let back = SmoothTable::read_from(bytes.as_slice()).unwrap();
        assert_eq!(back.as_slice(), t.as_slice());
        bytes[0] = b'X';
        assert!(matches!(SmoothTable::read_from(bytes.as_slice()), Err(Error::Format(_))));
    }

    fn shared() -> &'static SmoothTable {
        static TABLE: std::sync::OnceLock<SmoothTable> = std::sync::OnceLock::new();
        TABLE.get_or_init(|| SmoothTable::build(3000 * 3000).unwrap())
    }

    proptest! {
        #[test]
        fn lpf_is_multiplicative_max(n in 2u64..3000, m in 2u64..3000) {
            let t = shared();
            prop_assume!(gcd(n, m) == 1);
            let (a, b) = (t.lpf(n), t.lpf(m));
            prop_assert_eq!(t.lpf(n * m), a.max(b));
            prop_assert!(is_prime(a as u64) && n % a as u64 == 0);
        }

        #[test]
        fn partition_and_monotonicity(x in 1u64..20_000, y in 1u64..300, q in 1u64..40) {
            let t = shared();
            let (xf, yf) = (x as f64, y as f64);
            let total = t.psi(xf, yf).unwrap();
            let by_class: u64 = (1..=q).map(|a| t.psi_progression(xf, yf, q, a).unwrap()).sum();
            prop_assert_eq!(by_class, total);
            let coprime: u64 = (1..=q).filter(|&a| gcd(a, q) == 1)
                .map(|a| t.psi_progression(xf, yf, q, a).unwrap()).sum();
            prop_assert_eq!(coprime, t.psi_coprime(xf, yf, q).unwrap());
            prop_assert!(t.psi(xf + 1.0, yf).unwrap() >= total);
            prop_assert!(t.psi(xf, yf + 1.0).unwrap() >= total);
        }
    }
}
