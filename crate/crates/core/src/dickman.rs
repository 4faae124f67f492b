//! Dickman's function `ρ(u)`, the density of `x^{1/u}`-smooth numbers.
//!
//! `ρ = 1` on `[0, 1]` and `u ρ'(u) = -ρ(u - 1)` afterwards. On each piece
//! `[k - 1, k]` the function is a power series in `z = k - u` with radius `k`.
//! The higher coefficients follow from the delay equation and the constant
//! term from `k ρ(k) = ∫_{k-1}^{k} ρ`, which keeps relative accuracy for
//! large `u` where stepping the differential equation forward does not.

use crate::scalar::Real;

/// Series terms kept per unit piece; the tail ratio is at most `1/2`.
pub const DEFAULT_TERMS: usize = 72;

#[derive(Debug, Clone)]
pub struct RhoGrid<T> {
    terms: usize,
    /// `pieces[k - 1]` holds the coefficients on `[k - 1, k]`.
    pieces: Vec<Vec<T>>,
}

impl<T: Real> RhoGrid<T> {
    pub fn new(u_max: T) -> Self {
        Self::with_terms(DEFAULT_TERMS, u_max)
    }

    pub fn with_terms(terms: usize, u_max: T) -> Self {
        assert!(terms >= 2);
        let mut first = vec![T::zero(); terms];
        first[0] = T::one();
        let mut grid = Self { terms, pieces: vec![first] };
        grid.ensure(u_max);
        grid
    }

    /// Largest `u` covered without extension.
    pub fn u_max(&self) -> T {
        T::from_usize(self.pieces.len()).unwrap()
    }

    /// Series coefficients on `[k - 1, k]` in powers of `k - u`.
    pub fn coefficients(&self, k: usize) -> Option<&[T]> {
        self.pieces.get(k.checked_sub(1)?).map(Vec::as_slice)
    }

    pub fn ensure(&mut self, u_max: T) {
        let need = u_max.max(T::one()).ceil().to_usize().unwrap();
        while self.pieces.len() < need {
            let k = self.pieces.len() + 1;
            let kt = T::from_usize(k).unwrap();
            let prev = &self.pieces[k - 2];
            let mut c = vec![T::zero(); self.terms];
            for m in 0..self.terms - 1 {
                let mt = T::from_usize(m).unwrap();
                c[m + 1] = (prev[m] + mt * c[m]) / (kt * (mt + T::one()));
            }
            let tail: T = c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &ci)| ci / T::from_usize(i + 1).unwrap())
                .sum();
            c[0] = tail / (kt - T::one());
            self.pieces.push(c);
        }
    }

    /// `ρ(u)`, extending the pieces when `u` lies beyond them.
    pub fn value(&mut self, u: T) -> T {
        if u > self.u_max() {
            self.ensure(u);
        }
        self.value_within(u)
    }

    /// Like [`RhoGrid::value`] but never extends; `u` must be covered.
    pub fn value_within(&self, u: T) -> T {
        if u <= T::one() {
            return if u < T::zero() { T::zero() } else { T::one() };
        }
        let k = u.ceil().to_usize().unwrap();
        let z = T::from_usize(k).unwrap() - u;
        self.pieces[k - 1].iter().rev().fold(T::zero(), |acc, &c| acc * z + c)
    }

    /// `ρ'(u)` for `u > 1` off the integers.
    pub fn derivative_within(&self, u: T) -> T {
        if u <= T::one() {
            return T::zero();
        }
        let k = u.ceil().to_usize().unwrap();
        let z = T::from_usize(k).unwrap() - u;
        let c = &self.pieces[k - 1];
        -(1..c.len())
            .rev()
            .fold(T::zero(), |acc, i| acc * z + T::from_usize(i).unwrap() * c[i])
    }
}

/// `ρ(u)`; `ρ(u) = 0` for `u < 0` by convention.
pub fn rho<T: Real>(u: T) -> T {
    RhoGrid::new(u.max(T::one())).value_within(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_first_piece() {
        assert_eq!(rho(-0.5f64), 0.0);
        assert_eq!(rho(0.5f64), 1.0);
        assert_eq!(rho(1.0f64), 1.0);
        for u in [1.1f64, 1.37, 1.5, 1.999, 2.0] {
            assert!((rho(u) - (1.0 - u.ln())).abs() < 1e-14, "u = {u}");
        }
    }

    #[test]
    fn value_at_three() {
        // Tabulated value of ρ(3).
        assert!((rho(3.0f64) / 0.048_608_388_291_131_6 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn tabulated_values() {
        let table = [
            (4.0, 4.910_925_647_760_832e-3),
            (5.0, 3.547_247_004_560_397e-4),
            (6.0, 1.964_969_635_395_529e-5),
            (8.0, 3.232_069_304_226_104e-8),
            (10.0, 2.770_171_837_725_959e-11),
        ];
        let mut grid = RhoGrid::<f64>::new(10.0);
        for (u, expected) in table {
            let got = grid.value(u);
            assert!((got / expected - 1.0).abs() < 1e-12, "u = {u}: {got}");
        }
    }

    #[test]
    fn truncation_halving_agreement() {
        let coarse = RhoGrid::<f64>::with_terms(36, 12.0);
        let fine = RhoGrid::<f64>::with_terms(72, 12.0);
        let mut u = 1.0;
        while u <= 12.0 {
            let (a, b) = (coarse.value_within(u), fine.value_within(u));
            assert!((a / b - 1.0).abs() < 1e-6, "u = {u}: {a} vs {b}");
            u += 0.0371;
        }
    }

    #[test]
    fn delay_equation_holds() {
        let grid = RhoGrid::<f64>::new(15.0);
        let h = 1e-6;
        let mut u = 1.013;
        while u < 15.0 {
            let fd = (grid.value_within(u + h) - grid.value_within(u - h)) / (2.0 * h);
            let residual = u * fd + grid.value_within(u - 1.0);
            assert!(residual.abs() < 1e-4 * grid.value_within(u - 1.0).max(1e-12), "u = {u}");
            let exact = u * grid.derivative_within(u) + grid.value_within(u - 1.0);
            assert!(exact.abs() < 1e-12 * grid.value_within(u - 1.0), "u = {u}");
            u += 0.1117;
        }
    }

    #[test]
    fn continuous_at_integers() {
        let grid = RhoGrid::<f64>::new(20.0);
        for k in 2..20usize {
            let left = grid.coefficients(k).unwrap()[0];
            let right: f64 = grid.coefficients(k + 1).unwrap().iter().sum();
            assert!((left / right - 1.0).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn decreasing_and_positive() {
        let grid = RhoGrid::<f64>::new(25.0);
        let mut prev = 1.0;
        let mut u = 1.01;
        while u <= 25.0 {
            let v = grid.value_within(u);
            assert!(v > 0.0 && v < prev);
            prev = v;
            u += 0.01;
        }
    }

    #[test]
    fn grid_extends_on_demand() {
        let mut grid = RhoGrid::<f64>::new(2.0);
        let v = grid.value(10.0);
        assert!(grid.u_max() >= 10.0);
        assert!((v / 2.770_171_837_725_96e-11 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_precision() {
        let v = rho(3.0f32);
        assert!((v / 0.048_608_39 - 1.0).abs() < 1e-5);
    }
}
