//! Adaptive Gauss–Kronrod (7, 15) quadrature for complex-valued integrands.
//!
//! Refinement is batched: every round evaluates all panels whose error
//! exceeds their share of the tolerance, in parallel, and the result is
//! summed in panel order so it never depends on scheduling.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{Compensated, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    /// Initial panels are no wider than this.
    pub max_panel: T,
    pub max_panels: usize,
    /// Evaluate panels on the rayon pool.
    pub parallel: bool,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-13),
            rel_tol: T::lit(1e-11),
            max_panel: T::infinity(),
            max_panels: 200_000,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Panel<T> {
    pub a: T,
    pub b: T,
    pub value: Complex<T>,
    pub error: T,
    /// `∫ |f|` over the panel (Kronrod estimate).
    pub l1: T,
}

#[derive(Debug, Clone)]
pub struct QuadResult<T> {
    pub value: Complex<T>,
    pub error: T,
    pub l1: T,
    pub panels: Vec<Panel<T>>,
}

impl<T: Real> QuadResult<T> {
    /// Integral restricted to the panels lying inside `[lo, hi]`.
    pub fn partial(&self, lo: T, hi: T) -> Complex<T> {
        let mut re = Compensated::default();
        let mut im = Compensated::default();
        for p in self.panels.iter().filter(|p| p.a >= lo && p.b <= hi) {
            re.add(p.value.re);
            im.add(p.value.im);
        }
        Complex::new(re.value(), im.value())
    }

    /// Panel with the largest error estimate.
    pub fn worst_panel(&self) -> Option<&Panel<T>> {
        self.panels.iter().max_by(|x, y| x.error.partial_cmp(&y.error).unwrap())
    }
}

pub fn gk15<T: Real, F: Fn(T) -> Complex<T>>(f: &F, a: T, b: T) -> Panel<T> {
    let half = (b - a) * T::lit(0.5);
    let center = (a + b) * T::lit(0.5);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    let mut l1 = fc.norm() * T::lit(WGK[7]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let w = T::lit(WGK[j]);
        kronrod = kronrod + (f1 + f2) * w;
        l1 += (f1.norm() + f2.norm()) * w;
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * T::lit(WG[j / 2]);
        }
    }
    let scale = half.abs();
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).norm(),
        l1: l1 * scale,
    }
}

fn evaluate<T: Real, F>(f: &F, intervals: &[(T, T)], parallel: bool) -> Vec<Panel<T>>
where
    F: Fn(T) -> Complex<T> + Sync,
{
    if parallel {
        intervals.par_iter().map(|&(a, b)| gk15(f, a, b)).collect()
    } else {
        intervals.iter().map(|&(a, b)| gk15(f, a, b)).collect()
    }
}

fn totals<T: Real>(panels: &[Panel<T>]) -> (Complex<T>, T, T) {
    let mut re = Compensated::default();
    let mut im = Compensated::default();
    let mut err = Compensated::default();
    let mut l1 = Compensated::default();
    for p in panels {
        re.add(p.value.re);
        im.add(p.value.im);
        err.add(p.error);
        l1.add(p.l1);
    }
    (Complex::new(re.value(), im.value()), err.value(), l1.value())
}

/// Splits `[a, b]` at the given interior points and into panels no wider than `max_panel`.
pub fn initial_panels<T: Real>(a: T, b: T, breaks: &[T], max_panel: T) -> Vec<(T, T)> {
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&c| c > a && c < b));
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let len = w[1] - w[0];
        let pieces = if max_panel.is_finite() {
            (len / max_panel).ceil().to_usize().unwrap_or(1).max(1)
        } else {
            1
        };
        let step = len / T::from_usize(pieces).unwrap();
        for k in 0..pieces {
            let lo = w[0] + step * T::from_usize(k).unwrap();
            let hi = if k + 1 == pieces { w[1] } else { lo + step };
            out.push((lo, hi));
        }
    }
    out
}

/// `∫_a^b f` with panel boundaries forced at `breaks`.
pub fn integrate_with_breaks<T, F>(f: F, a: T, b: T, breaks: &[T], opts: &QuadOptions<T>) -> Result<QuadResult<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T> + Sync,
{
    let mut panels = evaluate(&f, &initial_panels(a, b, breaks, opts.max_panel), opts.parallel);
    loop {
        let (value, error, l1) = totals(&panels);
        let floor = l1 * T::epsilon() * T::lit(50.0);
        let tol = opts.abs_tol.max(opts.rel_tol * value.norm()).max(floor);
        if error <= tol {
            return Ok(QuadResult { value, error, l1, panels });
        }
        let share = tol / T::from_usize(panels.len()).unwrap();
        let mut split = Vec::new();
        let mut keep = Vec::with_capacity(panels.len());
        for p in panels {
            let width = p.b - p.a;
            let resolvable = width > (p.a.abs() + p.b.abs()) * T::epsilon() * T::lit(64.0);
            if p.error > share && resolvable {
                let mid = p.a + width * T::lit(0.5);
                split.push((p.a, mid));
                split.push((mid, p.b));
                keep.push(None);
            } else {
                keep.push(Some(p));
            }
        }
        if split.is_empty() || keep.len() + split.len() / 2 > opts.max_panels {
            let worst = keep
                .iter()
                .flatten()
                .max_by(|x, y| x.error.partial_cmp(&y.error).unwrap())
                .map(|p| format!("[{}, {}] err {}", p.a, p.b, p.error))
                .unwrap_or_default();
            return Err(Error::Numerical(format!(
                "quadrature did not reach tolerance {tol} (error {error}); worst panel {worst}"
            )));
        }
        let children = evaluate(&f, &split, opts.parallel);
        let mut it = children.into_iter();
        panels = Vec::with_capacity(keep.len() + split.len() / 2);
        for slot in keep {
            match slot {
                Some(p) => panels.push(p),
                None => {
                    panels.push(it.next().unwrap());
                    panels.push(it.next().unwrap());
                }
            }
        }
    }
}

/// `∫_a^b f` for complex-valued `f`.
pub fn integrate<T, F>(f: F, a: T, b: T, opts: &QuadOptions<T>) -> Result<QuadResult<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T> + Sync,
{
    integrate_with_breaks(f, a, b, &[], opts)
}
