//! Characters sorted by how close to `σ = 1` their zeros come.
//!
//! `𝒳_q(k)` holds the nonprincipal `χ mod q` with no zero in
//! `σ > 1 - k/log q, |t| <= H`, and `Ξ_q(k) = 𝒳_q(k) \ 𝒳_q(k+1)`. The index of
//! `χ` is the `k` with `χ ∈ Ξ_q(k)`, capped at `⌈½ log q⌉`.

use serde::Serialize;

use super::zeros::{count_characters, scan_characters, Rect, ScanOptions, ZeroRecord};
use crate::arith::euler_phi;
use crate::characters::{CharacterGroup, DirichletCharacter};
use crate::error::Result;

/// Right edge of every classification rectangle.
pub const SIGMA_RIGHT: f64 = 1.5;
/// Half-height of the strip searched for real zeros of real characters.
const REAL_STRIP: f64 = 0.05;

/// `k₀ = ⌈4A log A + D⌉`.
pub fn k0(a: f64, d: f64) -> i64 {
    (4.0 * a * a.ln() + d).ceil() as i64
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacterIndex {
    pub character: String,
    pub conductor: u64,
    pub is_real: bool,
    /// `None` when some rectangle boundary could not be traced.
    pub xi_index: Option<u32>,
    /// Zero counts in the rectangles for `k = 1, ..., cap`.
    pub counts: Vec<Option<i64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub q: u64,
    pub a: f64,
    pub d: f64,
    pub t_max: f64,
    /// `min(q, T_max)`, the height actually scanned.
    pub height: f64,
    pub k0: i64,
    pub cap: u32,
    pub entries: Vec<CharacterIndex>,
    /// Characters with index below `k₀`.
    pub a_set: Vec<String>,
    /// Whether `|𝒜| <= 1`; reported, never assumed.
    pub a_set_target_met: bool,
    /// `k₀` above the cap puts every nonprincipal character in `𝒜`.
    pub k0_exceeds_cap: bool,
    /// Real zero of a real character closest to 1, if any was found.
    pub exceptional: Option<ZeroRecord>,
    /// Counts are nondecreasing in `k` for every character.
    pub monotone: bool,
}

impl Classification {
    /// `|Ξ_q(k)|` for `k = 0..=cap`.
    pub fn xi_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.cap as usize + 1];
        for e in &self.entries {
            if let Some(k) = e.xi_index {
                sizes[k as usize] += 1;
            }
        }
        sizes
    }

    /// Every nonprincipal character has exactly one index, and `Σ_k |Ξ_q(k)| <= φ(q)`.
    pub fn partition_ok(&self) -> bool {
        let classified = self.entries.iter().all(|e| e.xi_index.is_some());
        let total: usize = self.xi_sizes().iter().sum();
        classified && total == self.entries.len() && total as u64 <= euler_phi(self.q)
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(|e| e.xi_index.is_some())
    }
}

/// `⌈½ log q⌉`.
pub fn index_cap(q: u64) -> u32 {
    (0.5 * (q as f64).ln()).ceil().max(0.0) as u32
}

/// Rectangle `[1 - k/log q, 1.5] × [-H, H]`.
pub fn xi_rectangle(q: u64, k: u32, height: f64) -> Rect {
    Rect::new(1.0 - k as f64 / (q as f64).ln(), SIGMA_RIGHT, -height, height)
}

pub fn classify(q: u64, a: f64, d: f64, t_max: f64, opts: &ScanOptions) -> Result<Classification> {
    let chars: Vec<DirichletCharacter> =
        CharacterGroup::new(q).characters().into_iter().filter(|c| !c.is_principal()).collect();
    let cap = index_cap(q);
    let height = t_max.min(q as f64);
    let k0 = k0(a, d);
    let mut counts: Vec<Vec<Option<i64>>> = vec![Vec::new(); chars.len()];
    if !chars.is_empty() {
        for k in 1..=cap {
            let found = count_characters(&chars, &xi_rectangle(q, k, height), opts)?;
            for (c, n) in counts.iter_mut().zip(found) {
                c.push(n);
            }
        }
    }
    let mut monotone = true;
    let mut entries = Vec::with_capacity(chars.len());
    for (chi, counts) in chars.iter().zip(counts) {
        let mut index = Some(cap);
        for (k, n) in counts.iter().enumerate() {
            match n {
                Some(0) => continue,
                Some(_) => {
                    index = Some(k as u32);
                    break;
                }
                None => {
                    index = None;
                    break;
                }
            }
        }
        let known: Vec<i64> = counts.iter().flatten().copied().collect();
        monotone &= known.windows(2).all(|w| w[0] <= w[1]);
        entries.push(CharacterIndex {
            character: chi.label(),
            conductor: chi.conductor().conductor,
            is_real: chi.is_real(),
            xi_index: index,
            counts,
        });
    }

    let a_set: Vec<String> = entries
        .iter()
        .filter(|e| e.xi_index.is_some_and(|k| (k as i64) < k0))
        .map(|e| e.character.clone())
        .collect();

    // Real zeros of real characters inside their first nonempty rectangle.
    let mut exceptional: Option<ZeroRecord> = None;
    for (chi, e) in chars.iter().zip(&entries) {
        let Some(k) = e.xi_index else { continue };
        if !chi.is_real() || k >= cap {
            continue;
        }
        let strip = Rect::new(1.0 - (k + 1) as f64 / (q as f64).ln(), SIGMA_RIGHT, -REAL_STRIP, REAL_STRIP);
        let report = scan_characters(std::slice::from_ref(chi), &strip, opts)?.remove(0);
        for z in report.zeros.into_iter().filter(|z| z.is_real) {
            if exceptional.as_ref().is_none_or(|best| z.beta > best.beta) {
                exceptional = Some(z);
            }
        }
    }

    Ok(Classification {
        q,
        a,
        d,
        t_max,
        height,
        k0,
        cap,
        a_set_target_met: a_set.len() <= 1,
        k0_exceeds_cap: k0 > cap as i64,
        a_set,
        entries,
        exceptional,
        monotone,
    })
}
