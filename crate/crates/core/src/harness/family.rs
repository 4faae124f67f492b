use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::CharacterGroup;
use crate::error::{Error, Result};
use crate::lfunc::hurwitz::l_value;

/// Modulus family selector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Explicit { moduli: Vec<u64> },
    /// `p, p², ..., p^{n_max}`.
    PrimePower { p: u64, n_max: u32 },
    /// `{q <= q_max : P(q)^Q < q}`.
    Smooth {
        #[serde(rename = "Q")]
        q_exp: u32,
        q_max: u64,
    },
    /// Conductors `q <= q_max` of real primitive characters with the `count`
    /// smallest values of `L(1, χ)`, in increasing order of that value.
    Exceptional { q_max: u64, count: usize },
}

const MAX_FAMILY_BOUND: u64 = 100_000_000;
const MAX_EXCEPTIONAL_BOUND: u64 = 5_000;

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            FamilySpec::Explicit { moduli } if moduli.contains(&0) => Err(Error::Config("modulus 0 in family".into())),
            FamilySpec::PrimePower { p, n_max } => {
                if !crate::arith::is_prime(*p) {
                    return Err(Error::Config(format!("{p} is not prime")));
                }
                p.checked_pow(*n_max).map(|_| ()).ok_or_else(|| Error::Config(format!("{p}^{n_max} overflows")))
            }
            FamilySpec::Smooth { q_max, .. } if *q_max > MAX_FAMILY_BOUND => {
                Err(Error::Config(format!("smooth family bound {q_max} above {MAX_FAMILY_BOUND}")))
            }
            FamilySpec::Exceptional { q_max, .. } if *q_max > MAX_EXCEPTIONAL_BOUND => {
                Err(Error::Config(format!("exceptional family bound {q_max} above {MAX_EXCEPTIONAL_BOUND}")))
            }
            _ => Ok(()),
        }
    }
}

/// `P(q)^Q < q` given `p = P(q)`.
fn is_smooth_modulus(q: u64, p: u64, q_exp: u32) -> bool {
    match p.checked_pow(q_exp) {
        Some(v) => v < q,
        None => false,
    }
}

pub fn family_generate(spec: &FamilySpec) -> Result<Vec<u64>> {
    spec.validate()?;
    Ok(match spec {
        FamilySpec::Explicit { moduli } => moduli.clone(),
        FamilySpec::PrimePower { p, n_max } => (1..=*n_max).map(|n| p.pow(n)).collect(),
        FamilySpec::Smooth { q_exp, q_max } => {
            if *q_max <= 1 {
                return Ok(Vec::new());
            }
            let table = crate::sieve::SmoothTable::build(*q_max)?;
            (2..=*q_max)
                .filter(|&q| is_smooth_modulus(q, table.lpf(q) as u64, *q_exp))
                .collect()
        }
        FamilySpec::Exceptional { q_max, count } => {
            let mut scored = Vec::new();
            for q in 3..=*q_max {
                for chi in CharacterGroup::new(q).characters() {
                    if chi.is_real() && !chi.is_principal() && chi.is_primitive() {
                        let l1 = l_value(&chi, Complex64::new(1.0, 0.0))?.re;
                        scored.push((l1, q));
                    }
                }
            }
            scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            scored.into_iter().take(*count).map(|(_, q)| q).collect()
        }
    })
}
