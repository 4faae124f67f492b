//! Zeros of Dirichlet L-functions in rectangles, by the argument principle.
//!
//! Every character is scanned through its primitive character; for the
//! character mod 1 the entire function `(s - 1) ζ(s)` is used so that
//! rectangles may contain `s = 1`. Winding numbers are certified only up to
//! floating-point error.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hurwitz::{HurwitzBatch, MAX_HEIGHT, MAX_MODULUS};
use crate::characters::{CharacterGroup, DirichletCharacter};
use crate::error::{Error, Result};

/// Lowest and highest real parts accepted for scanning.
pub const SIGMA_FLOOR: f64 = -0.5;
pub const SIGMA_CEILING: f64 = 3.0;
/// Largest diameter of a certified box.
pub const CERTIFIED_DIAMETER: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Rect {
    pub fn new(sigma_lo: f64, sigma_hi: f64, t_lo: f64, t_hi: f64) -> Self {
        assert!(sigma_lo < sigma_hi && t_lo < t_hi, "degenerate rectangle");
        Self { sigma_lo, sigma_hi, t_lo, t_hi }
    }

    pub fn width(&self) -> f64 {
        self.sigma_hi - self.sigma_lo
    }

    pub fn height(&self) -> f64 {
        self.t_hi - self.t_lo
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.sigma_lo + self.sigma_hi), 0.5 * (self.t_lo + self.t_hi))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.sigma_lo && z.re < self.sigma_hi && z.im > self.t_lo && z.im < self.t_hi
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.sigma_lo, self.t_lo),
            Complex64::new(self.sigma_hi, self.t_lo),
            Complex64::new(self.sigma_hi, self.t_hi),
            Complex64::new(self.sigma_lo, self.t_hi),
        ]
    }

    /// Two halves across the longer side, cut at `fraction` of it.
    fn split(&self, fraction: f64) -> [Rect; 2] {
        if self.width() >= self.height() {
            let cut = self.sigma_lo + fraction * self.width();
            [
                Rect { sigma_hi: cut, ..*self },
                Rect { sigma_lo: cut, ..*self },
            ]
        } else {
            let cut = self.t_lo + fraction * self.height();
            [Rect { t_hi: cut, ..*self }, Rect { t_lo: cut, ..*self }]
        }
    }

    fn square(center: Complex64, half: f64) -> Rect {
        Rect::new(center.re - half, center.re + half, center.im - half, center.im + half)
    }

    fn check_window(&self) -> Result<()> {
        if self.sigma_lo < SIGMA_FLOOR || self.sigma_hi > SIGMA_CEILING || self.t_lo.abs().max(self.t_hi.abs()) > MAX_HEIGHT {
            return Err(Error::Domain(format!(
                "rectangle {self:?} outside the window σ ∈ [{SIGMA_FLOOR}, {SIGMA_CEILING}], |t| <= {MAX_HEIGHT}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// Largest step along a box edge.
    pub max_step: f64,
    /// Steps below this mean the edge passes too close to a zero.
    pub min_step: f64,
    /// Newton refinement starts once a single-zero box is this small.
    pub newton_diameter: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { max_step: 0.25, min_step: 1e-9, newton_diameter: 0.5 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroRecord {
    pub character: String,
    pub conductor: u64,
    pub beta: f64,
    pub gamma: f64,
    pub certified_box: Rect,
    /// Half the diagonal of the certified box.
    pub box_radius: f64,
    pub winding: i64,
    pub is_real: bool,
}

impl ZeroRecord {
    pub fn point(&self) -> Complex64 {
        Complex64::new(self.beta, self.gamma)
    }

    /// Row for the zero database: `character_label,beta,gamma,box_radius,winding`.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{}",
            self.character, self.beta, self.gamma, self.box_radius, self.winding
        )
    }
}

pub const ZERO_CSV_HEADER: &str = "character_label,beta,gamma,box_radius,winding";

#[derive(Debug, Clone, Serialize)]
pub struct IndeterminateBox {
    pub character: String,
    pub rect: Rect,
    /// Winding of the box when known, otherwise `None`.
    pub winding: Option<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub character: String,
    pub conductor: u64,
    pub rect: Rect,
    /// Winding number of the whole rectangle; `None` when its boundary could not be traced.
    pub total: Option<i64>,
    pub zeros: Vec<ZeroRecord>,
    pub indeterminate: Vec<IndeterminateBox>,
}

impl ScanReport {
    /// Sum of the windings of all reported boxes equals the total.
    pub fn certificate(&self) -> bool {
        let Some(total) = self.total else { return false };
        let found: i64 = self.zeros.iter().map(|z| z.winding).sum();
        let open: Option<i64> = self.indeterminate.iter().map(|b| b.winding).sum();
        open.is_some_and(|o| o + found == total)
    }

    pub fn is_complete(&self) -> bool {
        self.indeterminate.is_empty() && self.certificate()
    }
}

/// Primitive characters of one conductor, evaluated together: the Hurwitz
/// values are computed once per point and shared.
#[derive(Debug, Clone)]
pub struct PrimitiveFamily {
    conductor: u64,
    chars: Vec<DirichletCharacter>,
    coeffs: Vec<Vec<Complex64>>,
    batch: HurwitzBatch<f64>,
    log_q: f64,
}

impl PrimitiveFamily {
    pub fn new(conductor: u64, chars: Vec<DirichletCharacter>) -> Result<Self> {
        if conductor > MAX_MODULUS {
            return Err(Error::Capacity(format!("conductor {conductor} above {MAX_MODULUS}")));
        }
        for chi in &chars {
            if chi.modulus() != conductor || !chi.is_primitive() {
                return Err(Error::Domain(format!("{} is not primitive mod {conductor}", chi.label())));
            }
        }
        let batch = HurwitzBatch::units(conductor);
        let coeffs = chars
            .iter()
            .map(|chi| batch.residues().iter().map(|&a| chi.value::<f64>(a)).collect())
            .collect();
        Ok(Self { conductor, chars, coeffs, batch, log_q: (conductor as f64).ln() })
    }

    /// All primitive characters mod `conductor`.
    pub fn all(conductor: u64) -> Result<Self> {
        let chars = CharacterGroup::new(conductor).characters().into_iter().filter(|c| c.is_primitive()).collect();
        Self::new(conductor, chars)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn characters(&self) -> &[DirichletCharacter] {
        &self.chars
    }

    /// Entire functions `L(s, χ)`, or `(s - 1) ζ(s)` for conductor 1.
    pub fn eval(&self, s: Complex64, active: &[usize]) -> Result<Vec<Complex64>> {
        let parts = self.batch.regular_parts(s)?;
        if self.conductor == 1 {
            return Ok(active.iter().map(|_| parts[0] * (s - 1.0) + 1.0).collect());
        }
        let scale = (-s * self.log_q).exp();
        Ok(active
            .iter()
            .map(|&i| {
                let sum: Complex64 = self.coeffs[i].iter().zip(&parts).map(|(c, z)| c * z).sum();
                sum * scale
            })
            .collect())
    }

    fn eval_one(&self, s: Complex64, i: usize) -> Result<Complex64> {
        Ok(self.eval(s, &[i])?[0])
    }

    /// Winding numbers of the boundary of `rect` for the given characters.
    pub fn winding(&self, rect: &Rect, active: &[usize], opts: &ScanOptions) -> Result<Vec<Option<i64>>> {
        let corners = rect.corners();
        let mut live: Vec<usize> = (0..active.len()).collect();
        let mut args = vec![0.0f64; active.len()];
        let mut dead = vec![false; active.len()];
        let mut current = self.eval(corners[0], active)?;
        for (k, &a) in current.iter().enumerate() {
            if !(a.norm() > 0.0) || !a.re.is_finite() {
                dead[k] = true;
            }
        }
        live.retain(|&k| !dead[k]);
        for edge in 0..4 {
            let z0 = corners[edge];
            let z1 = corners[(edge + 1) % 4];
            let length = (z1 - z0).norm();
            let dir = (z1 - z0) / length;
            let mut pos = 0.0;
            let mut h = opts.max_step.min(length);
            while pos < length && !live.is_empty() {
                let step = h.min(length - pos);
                let end = pos + step >= length;
                let z = if end { z1 } else { z0 + dir * (pos + step) };
                let ids: Vec<usize> = live.iter().map(|&k| active[k]).collect();
                let values = self.eval(z, &ids)?;
                let mut bad = Vec::new();
                for (j, &k) in live.iter().enumerate() {
                    let ratio = values[j] / current[k];
                    if !ratio.re.is_finite() || !((ratio - 1.0).norm() < 0.5) {
                        bad.push(k);
                    }
                }
                if !bad.is_empty() && h > opts.min_step {
                    h *= 0.5;
                    continue;
                }
                for &k in &bad {
                    dead[k] = true;
                }
                for (j, &k) in live.iter().enumerate() {
                    if !dead[k] {
                        args[k] += (values[j] / current[k]).arg();
                        current[k] = values[j];
                    }
                }
                live.retain(|&k| !dead[k]);
                pos = if end { length } else { pos + step };
                h = (h * 1.5).min(opts.max_step);
            }
        }
        Ok((0..active.len())
            .map(|k| {
                if dead[k] {
                    return None;
                }
                let turns = args[k] / TAU;
                let n = turns.round();
                ((turns - n).abs() < 0.05).then_some(n as i64)
            })
            .collect())
    }

    /// Newton iteration on the entire function with a central-difference derivative.
    fn newton(&self, i: usize, start: Complex64, bounds: &Rect) -> Result<Option<Complex64>> {
        let mut z = start;
        for _ in 0..60 {
            let h = 1e-6;
            let f = self.eval_one(z, i)?;
            let fp = (self.eval_one(z + h, i)? - self.eval_one(z - h, i)?) / (2.0 * h);
            if !(fp.norm() > 0.0) {
                return Ok(None);
            }
            let step = f / fp;
            z -= step;
            if !bounds.contains(z) {
                return Ok(None);
            }
            if step.norm() <= 1e-14 * z.norm().max(1.0) {
                return Ok(Some(z));
            }
        }
        Ok(None)
    }

    /// Locates the zeros of character `i` in `rect`, given its winding `count`.
    fn locate(&self, i: usize, rect: Rect, count: i64, opts: &ScanOptions, out: &mut Located) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        if count == 1 && rect.diameter() <= opts.newton_diameter {
            let margin = Rect::new(
                rect.sigma_lo - 0.1 * rect.width(),
                rect.sigma_hi + 0.1 * rect.width(),
                rect.t_lo - 0.1 * rect.height(),
                rect.t_hi + 0.1 * rect.height(),
            );
            if let Some(z) = self.newton(i, rect.center(), &margin)? {
                if rect.contains(z) {
                    let half = 0.35 * CERTIFIED_DIAMETER;
                    let cert = Rect::square(z, half);
                    if self.winding(&cert, &[i], opts)?[0] == Some(1) {
                        out.zeros.push((z, cert, 1));
                        return Ok(());
                    }
                }
            }
        }
        if rect.diameter() <= CERTIFIED_DIAMETER {
            out.zeros.push((rect.center(), rect, count));
            return Ok(());
        }
        for fraction in [0.4871, 0.5371, 0.4371] {
            let halves = rect.split(fraction);
            let mut counts = [None, None];
            for (c, half) in counts.iter_mut().zip(&halves) {
                *c = self.winding(half, &[i], opts)?[0];
            }
            if let [Some(a), Some(b)] = counts {
                if a + b == count && a >= 0 && b >= 0 {
                    self.locate(i, halves[0], a, opts, out)?;
                    self.locate(i, halves[1], b, opts, out)?;
                    return Ok(());
                }
            }
        }
        out.open.push((rect, Some(count)));
        Ok(())
    }

    /// Full scan of `rect` for every character of the family.
    pub fn scan(&self, rect: &Rect, opts: &ScanOptions) -> Result<Vec<FamilyScan>> {
        rect.check_window()?;
        let all: Vec<usize> = (0..self.chars.len()).collect();
        let totals = self.winding(rect, &all, opts)?;
        all.par_iter()
            .map(|&i| {
                let mut out = Located::default();
                match totals[i] {
                    Some(n) if n >= 0 => self.locate(i, *rect, n, opts, &mut out)?,
                    _ => out.open.push((*rect, None)),
                }
                Ok(FamilyScan { total: totals[i], located: out })
            })
            .collect()
    }
}

#[derive(Debug, Default, Clone)]
pub struct Located {
    zeros: Vec<(Complex64, Rect, i64)>,
    open: Vec<(Rect, Option<i64>)>,
}

#[derive(Debug, Clone)]
pub struct FamilyScan {
    total: Option<i64>,
    located: Located,
}

fn report_for(chi: &DirichletCharacter, conductor: u64, rect: &Rect, scan: &FamilyScan) -> ScanReport {
    let real = chi.is_real();
    let mut zeros: Vec<ZeroRecord> = scan
        .located
        .zeros
        .iter()
        .map(|&(z, cert, winding)| {
            let snapped = real && z.im.abs() < 1e-9 && cert.t_lo < 0.0 && cert.t_hi > 0.0;
            let gamma = if snapped { 0.0 } else { z.im };
            ZeroRecord {
                character: chi.label(),
                conductor,
                beta: z.re,
                gamma,
                certified_box: cert,
                box_radius: 0.5 * cert.diameter(),
                winding,
                is_real: snapped,
            }
        })
        .collect();
    zeros.sort_by(|a, b| (a.gamma, a.beta).partial_cmp(&(b.gamma, b.beta)).unwrap());
    ScanReport {
        character: chi.label(),
        conductor,
        rect: *rect,
        total: scan.total,
        zeros,
        indeterminate: scan
            .located
            .open
            .iter()
            .map(|&(r, w)| IndeterminateBox { character: chi.label(), rect: r, winding: w })
            .collect(),
    }
}

/// Zeros of `L(s, χ)` in `rect`, through the primitive character inducing `χ`.
pub fn scan_zeros(chi: &DirichletCharacter, rect: &Rect, opts: &ScanOptions) -> Result<ScanReport> {
    let prim = chi.conductor();
    let family = PrimitiveFamily::new(prim.conductor, vec![prim.induced])?;
    let scans = family.scan(rect, opts)?;
    Ok(report_for(chi, prim.conductor, rect, &scans[0]))
}

/// Characters mod `q` grouped by the primitive character that induces them.
fn families_for(chars: &[DirichletCharacter]) -> Result<Vec<(PrimitiveFamily, Vec<(usize, usize)>)>> {
    let mut by_conductor: BTreeMap<u64, (Vec<DirichletCharacter>, Vec<(usize, usize)>)> = BTreeMap::new();
    for (pos, chi) in chars.iter().enumerate() {
        let prim = chi.conductor();
        let entry = by_conductor.entry(prim.conductor).or_default();
        let idx = match entry.0.iter().position(|c| *c == prim.induced) {
            Some(i) => i,
            None => {
                entry.0.push(prim.induced);
                entry.0.len() - 1
            }
        };
        entry.1.push((pos, idx));
    }
    by_conductor
        .into_iter()
        .map(|(d, (prims, map))| Ok((PrimitiveFamily::new(d, prims)?, map)))
        .collect()
}

/// Scans `rect` for every listed character, sharing work per conductor.
/// Reports come back in the order of `chars`.
pub fn scan_characters(chars: &[DirichletCharacter], rect: &Rect, opts: &ScanOptions) -> Result<Vec<ScanReport>> {
    rect.check_window()?;
    let families = families_for(chars)?;
    let mut reports: Vec<Option<ScanReport>> = vec![None; chars.len()];
    let scanned: Vec<Vec<FamilyScan>> = families.par_iter().map(|(f, _)| f.scan(rect, opts)).collect::<Result<_>>()?;
    for ((family, map), scans) in families.iter().zip(&scanned) {
        for &(pos, idx) in map {
            reports[pos] = Some(report_for(&chars[pos], family.conductor(), rect, &scans[idx]));
        }
    }
    Ok(reports.into_iter().map(Option::unwrap).collect())
}

/// Winding numbers only, for every listed character.
pub fn count_characters(chars: &[DirichletCharacter], rect: &Rect, opts: &ScanOptions) -> Result<Vec<Option<i64>>> {
    rect.check_window()?;
    let families = families_for(chars)?;
    let mut out = vec![None; chars.len()];
    let counted: Vec<Vec<Option<i64>>> = families
        .par_iter()
        .map(|(f, _)| {
            let all: Vec<usize> = (0..f.characters().len()).collect();
            f.winding(rect, &all, opts)
        })
        .collect::<Result<_>>()?;
    for ((_, map), counts) in families.iter().zip(&counted) {
        for &(pos, idx) in map {
            out[pos] = counts[idx];
        }
    }
    Ok(out)
}

/// Every zero of `χ` with `γ != 0` has a partner of `χ̄` at `β - iγ`, when both
/// lie in scanned rectangles symmetric about the real axis.
pub fn conjugate_pairs_ok(chars: &[DirichletCharacter], reports: &[ScanReport], tol: f64) -> bool {
    let labels: BTreeMap<String, usize> = chars.iter().enumerate().map(|(i, c)| (c.label(), i)).collect();
    reports.iter().zip(chars).all(|(report, chi)| {
        let Some(&partner) = labels.get(&chi.conj().label()) else { return true };
        let other = &reports[partner];
        report.zeros.iter().filter(|z| z.gamma != 0.0).all(|z| {
            let mirrored = Complex64::new(z.beta, -z.gamma);
            !other.rect.contains(mirrored)
                || other.zeros.iter().any(|w| (w.point() - mirrored).norm() <= tol)
        })
    })
}
