//! Small-integer arithmetic: gcd, factorization, prime lists, primitive roots.

/// Greatest common divisor.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc: u128 = 1;
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Prime factorization by trial division, primes ascending with exponents.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Largest prime factor, with `P(1) = 1`.
pub fn largest_prime_factor(n: u64) -> u64 {
    factorize(n).last().map_or(1, |&(p, _)| p)
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    factorize(n).first().map_or(false, |&(p, e)| p == n && e == 1)
}

/// All primes `p <= limit` (plain Eratosthenes).
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest positive primitive root modulo `p^e` for an odd prime `p`.
pub fn smallest_primitive_root(p: u64, e: u32) -> u64 {
    let m = p.pow(e);
    let order = p.pow(e - 1) * (p - 1);
    let prime_divisors: Vec<u64> = factorize(order).into_iter().map(|(r, _)| r).collect();
    (2..m)
        .find(|&g| {
            g % p != 0 && prime_divisors.iter().all(|&r| mod_pow(g, order / r, m) != 1)
        })
        .expect("odd prime powers are cyclic")
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

/// Baby-step giant-step for `g^x = h` with `x < order`.
fn bsgs(g: u64, h: u64, order: u64, m: u64) -> Option<u64> {
    let step = (order as f64).sqrt().ceil() as u64 + 1;
    let mut baby = std::collections::HashMap::with_capacity(step as usize);
    let mut v = 1u64;
    for j in 0..step {
        baby.entry(v).or_insert(j);
        v = mul_mod(v, g, m);
    }
    // g^{-step}
    let giant = mod_pow(g, order - step % order, m);
    let mut cur = h % m;
    for i in 0..=step {
        if let Some(&j) = baby.get(&cur) {
            return Some((i * step + j) % order);
        }
        cur = mul_mod(cur, giant, m);
    }
    None
}

/// Pohlig–Hellman discrete logarithm: `x` in `[0, order)` with `g^x ≡ h (mod m)`,
/// where `order` is the order of `g`.
pub fn discrete_log(g: u64, h: u64, order: u64, m: u64) -> Option<u64> {
    let mut x = 0u64;
    let mut modulus = 1u64;
    for (l, k) in factorize(order) {
        let lk = l.pow(k);
        let cofactor = order / lk;
        let gl = mod_pow(g, cofactor, m);
        let hl = mod_pow(h, cofactor, m);
        let gamma = mod_pow(gl, lk / l, m);
        let mut xl = 0u64;
        let mut lpow = 1u64;
        for i in 0..k {
            // (g_l^{-x_l} h_l)^{l^{k-1-i}}
            let inv = mod_pow(gl, lk - xl % lk, m);
            let t = mod_pow(mul_mod(inv, hl, m), l.pow(k - 1 - i), m);
            let d = bsgs(gamma, t, l, m)?;
            xl += d * lpow;
            lpow *= l;
        }
        // CRT: x ≡ previous (mod modulus), x ≡ xl (mod lk).
        let inv = mod_inverse(modulus % lk, lk);
        let t = mul_mod((xl + lk - x % lk) % lk, inv, lk);
        x += modulus * t;
        modulus *= lk;
    }
    (mod_pow(g, x, m) == h % m).then_some(x)
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

pub fn ceil_div(a: u64, b: u64) -> u64 {
    (a + b - 1) / b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_and_phi() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(euler_phi(45), 24);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(largest_prime_factor(1), 1);
        assert_eq!(largest_prime_factor(999_983), 999_983);
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(smallest_primitive_root(5, 1), 2);
        assert_eq!(smallest_primitive_root(7, 1), 3);
        assert_eq!(smallest_primitive_root(29, 2), 2);
        // 5 is a primitive root mod 40487 but not mod 40487^2.
        assert_eq!(smallest_primitive_root(40487, 1), 5);
        let g = smallest_primitive_root(3, 4);
        let order = 54;
        assert!((1..order).all(|k| mod_pow(g, k, 81) != 1));
    }

    #[test]
    fn primes() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(primes_up_to(1).is_empty());
    }

    #[test]
    fn discrete_logs() {
        let m = 3u64.pow(20);
        let g = smallest_primitive_root(3, 20);
        let order = 2 * 3u64.pow(19);
        for x in [0, 1, 2, 12345, order - 1, 987654321] {
            assert_eq!(discrete_log(g, mod_pow(g, x, m), order, m), Some(x));
        }
        let p = 1_000_003u64;
        let g = smallest_primitive_root(p, 1);
        for x in [0, 7, 500_000, p - 2] {
            assert_eq!(discrete_log(g, mod_pow(g, x, p), p - 1, p), Some(x));
        }
        // 2 is not a power of 4 mod 7.
        assert_eq!(discrete_log(4, 3, 3, 7), None);
    }
}
