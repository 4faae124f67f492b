//! Dirichlet characters modulo composite `q`.
//!
//! `(ℤ/qℤ)^*` is split by CRT into cyclic factors: one per odd prime power
//! (generated by its smallest primitive root), one for `4` (generated by `-1`)
//! and two for `2^k`, `k >= 3` (generated by `-1` and `5`). A character is an
//! exponent vector against those generators; values are exact roots of unity.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::arith::{discrete_log, euler_phi, factorize, gcd, lcm, smallest_primitive_root};
use crate::cyclotomic::{CyclotomicInt, RootOfUnity};
use crate::scalar::Real;

#[derive(Debug)]
struct Component {
    prime: u64,
    /// The prime power this factor lives modulo.
    modulus: u64,
    generator: u64,
    order: u64,
    logs: Logs,
}

/// Discrete logs in one CRT factor.
#[derive(Debug)]
enum Logs {
    /// `table[r]` for `r < modulus`; `u32::MAX` marks non-units.
    Table(Vec<u32>),
    /// `0` for `r ≡ 1 (mod 4)`, `1` for `r ≡ 3 (mod 4)`.
    Sign,
    /// Pohlig–Hellman on demand; for the `5`-component of `2^k` the argument is
    /// first moved into `1 + 4ℤ` by a sign.
    Computed,
}

/// Largest prime-power factor that gets a full log table.
const TABLE_LIMIT: u64 = 1 << 22;

impl Component {
    fn log(&self, r: u64) -> u64 {
        match &self.logs {
            Logs::Table(t) => t[r as usize] as u64,
            Logs::Sign => (r % 4 == 3) as u64,
            Logs::Computed => {
                let r = if self.prime == 2 && r % 4 == 3 { self.modulus - r } else { r };
                discrete_log(self.generator, r, self.order, self.modulus).expect("unit lies in the generated subgroup")
            }
        }
    }
}

#[derive(Debug)]
struct GroupData {
    q: u64,
    components: Vec<Component>,
    exponent: u64,
}

const NOT_UNIT: u32 = u32::MAX;

impl GroupData {
    fn new(q: u64) -> Self {
        assert!(q >= 1, "modulus must be positive");
        let mut components = Vec::new();
        for (p, e) in factorize(q) {
            let pe = p.pow(e);
            if p == 2 {
                match e {
                    1 => {}
                    2 => {
                        let mut logs = vec![NOT_UNIT; 4];
                        logs[1] = 0;
                        logs[3] = 1;
                        components.push(Component { prime: 2, modulus: 4, generator: 3, order: 2, logs: Logs::Table(logs) });
                    }
                    _ if pe > TABLE_LIMIT => {
                        components.push(Component { prime: 2, modulus: pe, generator: pe - 1, order: 2, logs: Logs::Sign });
                        components.push(Component { prime: 2, modulus: pe, generator: 5, order: pe / 4, logs: Logs::Computed });
                    }
                    _ => {
                        let half = pe / 4;
                        let mut sign_logs = vec![NOT_UNIT; pe as usize];
                        let mut five_logs = vec![NOT_UNIT; pe as usize];
                        let mut v = 1u64;
                        for b in 0..half {
                            sign_logs[v as usize] = 0;
                            five_logs[v as usize] = b as u32;
                            sign_logs[(pe - v) as usize] = 1;
                            five_logs[(pe - v) as usize] = b as u32;
                            v = v * 5 % pe;
                        }
                        components.push(Component {
                            prime: 2,
                            modulus: pe,
                            generator: pe - 1,
                            order: 2,
                            logs: Logs::Table(sign_logs),
                        });
                        components.push(Component {
                            prime: 2,
                            modulus: pe,
                            generator: 5,
                            order: half,
                            logs: Logs::Table(five_logs),
                        });
                    }
                }
            } else {
                let g = smallest_primitive_root(p, e);
                let order = pe / p * (p - 1);
                let logs = if pe > TABLE_LIMIT {
                    Logs::Computed
                } else {
                    let mut logs = vec![NOT_UNIT; pe as usize];
                    let mut v = 1u64;
                    for k in 0..order {
                        logs[v as usize] = k as u32;
                        v = v * g % pe;
                    }
                    Logs::Table(logs)
                };
                components.push(Component { prime: p, modulus: pe, generator: g, order, logs });
            }
        }
        let exponent = components.iter().fold(1, |acc, c| lcm(acc, c.order));
        Self { q, components, exponent }
    }

    /// Discrete logs of `n` per component, `None` if `gcd(n, q) > 1`.
    fn logs_of(&self, n: u64) -> Option<Vec<u64>> {
        if gcd(n % self.q, self.q) != 1 && self.q > 1 {
            return None;
        }
        Some(
            self.components
                .iter()
                .map(|c| c.log(n % c.modulus))
                .collect(),
        )
    }
}

/// The full character group modulo `q`.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    data: Arc<GroupData>,
}

impl CharacterGroup {
    pub fn new(q: u64) -> Self {
        Self { data: Arc::new(GroupData::new(q)) }
    }

    pub fn modulus(&self) -> u64 {
        self.data.q
    }

    /// Orders of the cyclic factors, in CRT order.
    pub fn component_orders(&self) -> Vec<u64> {
        self.data.components.iter().map(|c| c.order).collect()
    }

    /// Generators of the cyclic factors (each modulo its prime power).
    pub fn generators(&self) -> Vec<(u64, u64)> {
        self.data.components.iter().map(|c| (c.generator, c.modulus)).collect()
    }

    /// Exponent of the group: every character value is a power of `e^{2πi/exponent}`.
    pub fn exponent(&self) -> u64 {
        self.data.exponent
    }

    pub fn character(&self, exponents: &[u64]) -> DirichletCharacter {
        assert_eq!(exponents.len(), self.data.components.len(), "one exponent per component");
        let exps: Vec<u64> = exponents
            .iter()
            .zip(&self.data.components)
            .map(|(&e, c)| e % c.order)
            .collect();
        let order = exps
            .iter()
            .zip(&self.data.components)
            .fold(1, |acc, (&e, c)| lcm(acc, c.order / gcd(e, c.order)));
        DirichletCharacter { group: self.data.clone(), exponents: exps, order }
    }

    pub fn principal(&self) -> DirichletCharacter {
        self.character(&vec![0; self.data.components.len()])
    }

    /// All `φ(q)` characters, lexicographic in the exponent vectors, principal first.
    pub fn characters(&self) -> Vec<DirichletCharacter> {
        let orders = self.component_orders();
        let total: u64 = orders.iter().product();
        let mut out = Vec::with_capacity(total as usize);
        let mut exps = vec![0u64; orders.len()];
        for _ in 0..total {
            out.push(self.character(&exps));
            for i in (0..orders.len()).rev() {
                exps[i] += 1;
                if exps[i] < orders[i] {
                    break;
                }
                exps[i] = 0;
            }
        }
        out
    }
}

/// All characters modulo `q` (principal first).
pub fn enumerate(q: u64) -> Vec<DirichletCharacter> {
    CharacterGroup::new(q).characters()
}

/// A Dirichlet character: exponent vector against the group's generators.
#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<GroupData>,
    exponents: Vec<u64>,
    order: u64,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.group.q == other.group.q && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl std::hash::Hash for DirichletCharacter {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.group.q.hash(state);
        self.exponents.hash(state);
    }
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DirichletCharacter({})", self.label())
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Conductor and the primitive character inducing a given character.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitiveData {
    pub conductor: u64,
    pub induced: DirichletCharacter,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.group.q
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    /// Real-valued characters have order at most two.
    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    /// Label `q:e1,...,ek`.
    pub fn label(&self) -> String {
        let exps: Vec<String> = self.exponents.iter().map(|e| e.to_string()).collect();
        format!("{}:{}", self.group.q, exps.join(","))
    }

    /// Inverse of [`DirichletCharacter::label`]; `q:` alone is the principal character.
    pub fn from_label(label: &str) -> crate::Result<Self> {
        let bad = || crate::Error::Domain(format!("bad character label {label:?}, expected q:e1,...,ek"));
        let (q, rest) = label.split_once(':').ok_or_else(bad)?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        let group = CharacterGroup::new(q);
        let exps: Vec<u64> = if rest.trim().is_empty() {
            vec![0; group.component_orders().len()]
        } else {
            rest.split(',').map(|e| e.trim().parse().map_err(|_| bad())).collect::<crate::Result<_>>()?
        };
        let orders = group.component_orders();
        if exps.len() != orders.len() || exps.iter().zip(&orders).any(|(e, o)| e >= o) {
            return Err(bad());
        }
        Ok(group.character(&exps))
    }

    pub fn group(&self) -> CharacterGroup {
        CharacterGroup { data: self.group.clone() }
    }

    /// `χ(n)` as an exact root of unity, `None` when `gcd(n, q) > 1`.
    pub fn value_exact(&self, n: u64) -> Option<RootOfUnity> {
        let logs = self.group.logs_of(n)?;
        let m = self.group.exponent;
        let mut k = 0u64;
        for ((&e, l), c) in self.exponents.iter().zip(logs).zip(&self.group.components) {
            k = (k + (e * l % c.order) * (m / c.order)) % m;
        }
        Some(RootOfUnity::new(k, m))
    }

    /// `χ(n)` for any integer `n` (negative arguments reduced mod `q`).
    pub fn value_exact_i64(&self, n: i64) -> Option<RootOfUnity> {
        self.value_exact(n.rem_euclid(self.group.q as i64) as u64)
    }

    pub fn value<T: Real>(&self, n: u64) -> Complex<T> {
        self.value_exact(n)
            .map_or_else(|| Complex::new(T::zero(), T::zero()), |r| r.to_complex())
    }

    /// Values `χ(0), χ(1), ..., χ(q-1)`.
    pub fn table<T: Real>(&self) -> Vec<Complex<T>> {
        (0..self.group.q).map(|n| self.value(n)).collect()
    }

    pub fn exact_table(&self) -> Vec<Option<RootOfUnity>> {
        (0..self.group.q).map(|n| self.value_exact(n)).collect()
    }

    /// `χ(-1) = -1`.
    pub fn is_odd(&self) -> bool {
        self.value_exact_i64(-1) == Some(RootOfUnity::new(1, 2))
    }

    pub fn conj(&self) -> Self {
        let exps: Vec<u64> = self
            .exponents
            .iter()
            .zip(&self.group.components)
            .map(|(&e, c)| (c.order - e) % c.order)
            .collect();
        self.group().character(&exps)
    }

    /// Pointwise product of two characters of the same modulus.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.modulus(), other.modulus(), "characters of different moduli");
        let exps: Vec<u64> = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(&a, &b)| a + b)
            .collect();
        self.group().character(&exps)
    }

    /// Conductor `q̌` and the primitive character modulo `q̌` inducing `self`.
    pub fn conductor(&self) -> PrimitiveData {
        let q = self.group.q;
        let mut conductor = 1u64;
        let comps = &self.group.components;
        let mut i = 0;
        while i < comps.len() {
            let c = &comps[i];
            let e_total = exponent_of(c.prime, c.modulus);
            if c.prime == 2 && c.modulus >= 8 {
                let (sign, five) = (self.exponents[i], self.exponents[i + 1]);
                let f = if five != 0 {
                    e_total - five.trailing_zeros()
                } else if sign != 0 {
                    2
                } else {
                    0
                };
                conductor *= 2u64.pow(f);
                i += 2;
                continue;
            }
            let e = self.exponents[i];
            let f = if e == 0 {
                0
            } else if c.prime == 2 {
                2
            } else {
                let v = p_adic_valuation(e, c.prime).min(e_total - 1);
                e_total - v
            };
            conductor *= c.prime.pow(f);
            i += 1;
        }
        let target = CharacterGroup::new(conductor);
        let q_factors = factorize(q);
        let exps: Vec<u64> = target
            .data
            .components
            .iter()
            .map(|tc| {
                // Lift the generator to n ≡ g (mod p^e_q), n ≡ 1 elsewhere.
                let pe_q = q_factors
                    .iter()
                    .find(|(p, _)| *p == tc.prime)
                    .map(|&(p, e)| p.pow(e))
                    .expect("conductor divides q");
                let n = crt_lift(tc.generator % pe_q, pe_q, q);
                let r = self.value_exact(n).expect("lift is a unit");
                assert_eq!((r.num * tc.order) % r.den, 0, "induced exponent not integral");
                r.num * tc.order / r.den
            })
            .collect();
        PrimitiveData { conductor, induced: target.character(&exps) }
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor().conductor == self.group.q
    }
}

fn exponent_of(p: u64, pe: u64) -> u32 {
    let mut e = 0;
    let mut v = pe;
    while v > 1 {
        v /= p;
        e += 1;
    }
    e
}

fn p_adic_valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// `n mod q` with `n ≡ r (mod m)` and `n ≡ 1 (mod q/m)`, where `gcd(m, q/m) = 1`.
fn crt_lift(r: u64, m: u64, q: u64) -> u64 {
    let rest = q / m;
    if rest == 1 {
        return r % q;
    }
    // n = r + m·t with m·t ≡ 1 - r (mod rest)
    let inv = mod_inverse(m % rest, rest);
    let need = ((1 + rest) as i128 - (r % rest) as i128).rem_euclid(rest as i128) as u64;
    let t = (need as u128 * inv as u128 % rest as u128) as u64;
    (r + m * t) % q
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    assert_eq!(old_r, 1, "not invertible");
    old_s.rem_euclid(m as i128) as u64
}

/// Exhaustive exact check of `Σ_χ χ(a) conj(χ(b)) = φ(q)·[a = b, (a,q) = 1]`
/// over all `0 <= a, b < q`.
pub fn orthogonality_check(q: u64) -> bool {
    let group = CharacterGroup::new(q);
    let chars = group.characters();
    let m = group.exponent();
    let phi = euler_phi(q) as i64;
    let tables: Vec<Vec<Option<RootOfUnity>>> = chars.iter().map(|c| c.exact_table()).collect();
    for a in 0..q {
        for b in 0..q {
            let mut acc = CyclotomicInt::zero(m);
            for t in &tables {
                if let (Some(x), Some(y)) = (t[a as usize], t[b as usize]) {
                    acc.add_root(x.mul(y.conj()), 1);
                }
            }
            let expected = if a == b && gcd(a, q) == 1 { phi } else { 0 };
            if acc.as_integer() != Some(expected) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orders(q: u64) -> Vec<u64> {
        let mut o: Vec<u64> = enumerate(q).iter().map(|c| c.order()).collect();
        o.sort();
        o
    }

    #[test]
    fn group_sizes_and_orders() {
        assert_eq!(enumerate(1).len(), 1);
        assert!(enumerate(1)[0].is_principal());
        assert_eq!(orders(8), vec![1, 2, 2, 2]);
        assert_eq!(orders(5), vec![1, 2, 4, 4]);
        for q in 1..=300 {
            let chars = enumerate(q);
            assert_eq!(chars.len() as u64, euler_phi(q), "q = {q}");
            assert!(chars[0].is_principal());
        }
    }

    #[test]
    fn order_is_minimal_power() {
        for q in [12u64, 45, 64, 105] {
            for chi in enumerate(q) {
                let mut power = chi.group().principal();
                for k in 1..=chi.order() {
                    power = power.mul(&chi);
                    assert_eq!(power.is_principal(), k == chi.order(), "{} k={k}", chi.label());
                }
            }
        }
    }

    #[test]
    fn values() {
        let chi0 = CharacterGroup::new(6).principal();
        assert_eq!(chi0.value_exact(4), None);
        let chi4 = &enumerate(4)[1];
        assert_eq!(chi4.value::<f64>(3), Complex::new(-1.0, 0.0));
        assert_eq!(chi4.value::<f64>(1), Complex::new(1.0, 0.0));
        for q in [7u64, 15, 16, 36] {
            for chi in enumerate(q) {
                for n in 0..3 * q {
                    assert_eq!(chi.value_exact(n), chi.value_exact(n + q));
                    assert_eq!(chi.conj().value_exact(n), chi.value_exact(n).map(|r| r.conj()));
                }
                assert_eq!(chi.value_exact(1), Some(RootOfUnity::one()));
            }
        }
    }

    #[test]
    fn multiplicativity() {
        for q in [20u64, 27, 32, 63] {
            for chi in enumerate(q) {
                for m in 0..q {
                    for n in 0..q {
                        let lhs = chi.value_exact(m * n);
                        let rhs = chi.value_exact(m).zip(chi.value_exact(n)).map(|(a, b)| a.mul(b));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn full_period_sums_vanish() {
        for q in 2..=500u64 {
            let group = CharacterGroup::new(q);
            for chi in group.characters().iter().skip(1) {
                let mut acc = CyclotomicInt::zero(group.exponent());
                for n in 1..=q {
                    if let Some(r) = chi.value_exact(n) {
                        acc.add_root(r, 1);
                    }
                }
                assert_eq!(acc.as_integer(), Some(0), "{}", chi.label());
            }
        }
    }

    #[test]
    fn closure_under_products() {
        for q in 1..=200u64 {
            let chars = enumerate(q);
            let set: std::collections::HashSet<_> = chars.iter().cloned().collect();
            for a in chars.iter().step_by(3) {
                for b in chars.iter().step_by(5) {
                    assert!(set.contains(&a.mul(b)));
                }
            }
        }
    }

    #[test]
    fn conductors() {
        let chi0 = CharacterGroup::new(12).principal();
        assert_eq!(chi0.conductor().conductor, 1);
        // Characters mod 8 whose values on units agree with the nontrivial mod-4 character.
        let chi4 = enumerate(4)[1].clone();
        let lifted: Vec<_> = enumerate(8)
            .into_iter()
            .filter(|c| (1..8).step_by(2).all(|n| c.value_exact(n) == chi4.value_exact(n)))
            .collect();
        assert_eq!(lifted.len(), 1);
        let pd = lifted[0].conductor();
        assert_eq!(pd.conductor, 4);
        assert_eq!(pd.induced, chi4);
        for p in [3u64, 5, 7, 11, 13] {
            for chi in enumerate(p).iter().skip(1) {
                assert_eq!(chi.conductor().conductor, p);
            }
        }
    }

    #[test]
    fn induced_character_agrees_on_units() {
        for q in 1..=400u64 {
            for chi in enumerate(q) {
                let pd = chi.conductor();
                assert_eq!(q % pd.conductor, 0);
                assert!(pd.induced.is_primitive() || pd.conductor == 1);
                assert_eq!(chi.is_primitive(), pd.conductor == q);
                for n in (1..q).filter(|&n| gcd(n, q) == 1) {
                    assert_eq!(chi.value_exact(n), pd.induced.value_exact(n), "{} n={n}", chi.label());
                }
            }
        }
    }

    #[test]
    fn primitive_counts_match_formula() {
        // Number of primitive characters mod q is Σ_{d|q} μ(d) φ(q/d).
        for q in 1..=200u64 {
            let prim = enumerate(q).iter().filter(|c| c.is_primitive()).count() as i64;
            let mut expected = 0i64;
            for d in 1..=q {
                if q % d == 0 {
                    expected += mobius(d) * euler_phi(q / d) as i64;
                }
            }
            assert_eq!(prim, expected, "q = {q}");
        }
    }

    fn mobius(n: u64) -> i64 {
        let f = factorize(n);
        if f.iter().any(|&(_, e)| e > 1) {
            0
        } else if f.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn orthogonality() {
        assert!(orthogonality_check(1));
        assert!(orthogonality_check(12));
        assert!(orthogonality_check(45));
        assert!(orthogonality_check(64));
    }

    #[test]
    fn labels() {
        let chars = enumerate(24);
        assert_eq!(chars[0].label(), "24:0,0,0");
        assert_eq!(chars.last().unwrap().label(), "24:1,1,1");
    }

    #[test]
    fn label_round_trip() {
        for q in [1, 4, 12, 35, 64] {
            for chi in CharacterGroup::new(q).characters() {
                assert_eq!(DirichletCharacter::from_label(&chi.label()).unwrap(), chi);
            }
        }
        assert!(DirichletCharacter::from_label("5:4").is_err());
        assert!(DirichletCharacter::from_label("5").is_err());
        assert!(DirichletCharacter::from_label("12:1").is_err());
    }

    #[test]
    fn computed_logs_match_generator_powers() {
        let q = 5u64.pow(10);
        let chi = CharacterGroup::new(q).character(&[1]);
        let g = crate::arith::smallest_primitive_root(5, 10);
        let order = q / 5 * 4;
        for k in [0u64, 1, 17, 123_456, order - 1] {
            let n = crate::arith::mod_pow(g, k, q);
            assert_eq!(chi.value_exact(n), Some(RootOfUnity::new(k, order)));
        }
        let q = 1u64 << 23;
        let group = CharacterGroup::new(q);
        let chi = group.character(&[1, 1]);
        for b in [0u64, 3, 99_999] {
            let n = crate::arith::mod_pow(5, b, q);
            assert_eq!(chi.value_exact(n), Some(RootOfUnity::new(b, q / 4)));
            let v = chi.value_exact(q - n).unwrap();
            assert_eq!(v, RootOfUnity::new(1, 2).mul(RootOfUnity::new(b, q / 4)));
        }
        assert_eq!(chi.value_exact(6), None);
    }
}
