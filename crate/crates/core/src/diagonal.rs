//! Diagonal operators on truncated series and the valuation in the last
//! variable.

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::series::TruncatedSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalMode {
    /// `Σ a(n,..,n) t^n`.
    Full,
    /// Pairs variable `k` with variable `n + k` in a `2n`-variable series.
    Half,
    /// Identifies the last two variables, keeping the others.
    LastPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagonalSpec {
    pub mode: DiagonalMode,
    pub nvars: usize,
}

impl DiagonalSpec {
    pub fn new(mode: DiagonalMode, nvars: usize) -> Result<Self> {
        let ok = match mode {
            DiagonalMode::Full => nvars >= 1,
            DiagonalMode::Half => nvars >= 2 && nvars.is_multiple_of(2),
            DiagonalMode::LastPair => nvars >= 2,
        };
        if !ok {
            return Err(Error::Precondition(format!(
                "{mode:?} diagonal is undefined on {nvars} variables"
            )));
        }
        Ok(DiagonalSpec { mode, nvars })
    }

    /// Source variables feeding each output variable.
    fn groups(&self) -> Vec<Vec<usize>> {
        let m = self.nvars;
        match self.mode {
            DiagonalMode::Full => vec![(0..m).collect()],
            DiagonalMode::Half => (0..m / 2).map(|k| vec![k, m / 2 + k]).collect(),
            DiagonalMode::LastPair => {
                let mut g: Vec<Vec<usize>> = (0..m - 1).map(|k| vec![k]).collect();
                g[m - 2].push(m - 1);
                g
            }
        }
    }

    pub fn output_nvars(&self) -> usize {
        self.groups().len()
    }

    /// Applies the diagonal, producing a series on the box `[0, order)` in
    /// each output variable. A Laurent shift on the source becomes a shift on
    /// the output (the lowest exponent that can occur).
    pub fn apply(&self, s: &TruncatedSeries, order: usize) -> Result<TruncatedSeries> {
        if s.nvars() != self.nvars {
            return Err(Error::DimMismatch {
                expected: self.nvars,
                got: s.nvars(),
            });
        }
        let groups = self.groups();
        let out_shift: Vec<i64> = groups
            .iter()
            .map(|g| g.iter().map(|&k| s.shift()[k]).max().unwrap().min(0))
            .collect();
        let out = TruncatedSeries::zeros(s.field(), groups.len(), order)?.with_shift(out_shift.clone());
        let mut source = vec![0i64; self.nvars];
        let mut coeffs = Vec::with_capacity(out.coeffs().len());
        for i in 0..out.coeffs().len() {
            let t = out.exponent(i);
            for ((g, &tk), &vk) in groups.iter().zip(&t).zip(&out_shift) {
                for &k in g {
                    source[k] = tk as i64 + vk;
                }
            }
            let c = s.coeff_shifted(&source).ok_or_else(|| Error::InsufficientPrecision {
                needed: (t.iter().max().copied().unwrap_or(0) as i64 + 1
                    - s.shift().iter().min().copied().unwrap_or(0).min(0)) as usize,
                available: s.order(),
            })?;
            coeffs.push(c);
        }
        Ok(out.with_coeffs(coeffs))
    }
}

/// `Δ(s)` up to `x^order`.
pub fn diagonal_full(s: &TruncatedSeries, order: usize) -> Result<TruncatedSeries> {
    DiagonalSpec::new(DiagonalMode::Full, s.nvars())?.apply(s, order)
}

/// `Δ_{1/2}(s)` on the box `[0, order)^n`.
pub fn diagonal_half(s: &TruncatedSeries, order: usize) -> Result<TruncatedSeries> {
    DiagonalSpec::new(DiagonalMode::Half, s.nvars())?.apply(s, order)
}

/// Diagonal in the last two variables.
pub fn diagonal_last_pair(s: &TruncatedSeries, order: usize) -> Result<TruncatedSeries> {
    DiagonalSpec::new(DiagonalMode::LastPair, s.nvars())?.apply(s, order)
}

/// Least exponent of the last variable among the stored nonzero coefficients,
/// shift included.
pub fn nu_last(s: &TruncatedSeries) -> Result<i64> {
    let m = s.nvars();
    if m == 0 {
        return Err(Error::Precondition("series has no variables".into()));
    }
    let low = s
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, _)| s.exponent(i)[m - 1])
        .min()
        .ok_or(Error::ZeroUpToPrecision)?;
    Ok(low as i64 + s.shift()[m - 1])
}

/// Valuation in the last variable of `x^shift * p`.
pub fn nu_last_poly(p: &MultiPoly, shift: &[i64]) -> Result<i64> {
    let m = p.nvars();
    if m == 0 || shift.len() != m {
        return Err(Error::DimMismatch {
            expected: m,
            got: shift.len(),
        });
    }
    let low = p.degree_in_min(m - 1).ok_or(Error::ZeroUpToPrecision)?;
    Ok(low as i64 + shift[m - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::rational::parse_rational;
    use crate::series::series_expand;

    #[test]
    fn central_binomial() {
        let r = parse_rational("1/(1-x-y)", 101).unwrap();
        let s = series_expand(&r, 5).unwrap();
        let d = diagonal_full(&s, 5).unwrap();
        assert_eq!(d.coeffs(), &[1, 2, 6, 20, 70]);
        assert!(matches!(diagonal_full(&s, 6), Err(Error::InsufficientPrecision { .. })));
    }

    #[test]
    fn constant_one() {
        let r = parse_rational("1", 3).unwrap();
        let s = series_expand(&r, 4).unwrap();
        assert_eq!(diagonal_full(&s, 4).unwrap().coeffs(), &[1, 0, 0, 0]);
    }

    #[test]
    fn half_on_two_vars_is_full() {
        let r = parse_rational("(1+x)/(1-x-2*y+x*y)", 7).unwrap();
        let s = series_expand(&r, 8).unwrap();
        assert_eq!(diagonal_half(&s, 8).unwrap(), diagonal_full(&s, 8).unwrap());
    }

    #[test]
    fn last_pair_keeps_leading_vars() {
        let r = parse_rational("1/(1-x-y-z)", 7).unwrap();
        let s = series_expand(&r, 4).unwrap();
        let d = diagonal_last_pair(&s, 4).unwrap();
        assert_eq!(d.nvars(), 2);
        // coefficient of x * (yz)^1 in 1/(1-x-y-z) is 3!/(1!1!1!) = 6
        assert_eq!(d.get(&[1, 1]), Some(6));
        assert!(DiagonalSpec::new(DiagonalMode::Half, 3).is_err());
    }

    #[test]
    fn shifted_diagonal() {
        let k = PrimeField::new(5).unwrap();
        let mut s = TruncatedSeries::zeros(k, 2, 4).unwrap();
        // stored x^1 y^0 and x^2 y^1, shift (0, 1): terms x y, x^2 y^2
        let i = s.index(&[1, 0]).unwrap();
        let j = s.index(&[2, 1]).unwrap();
        let mut c = s.coeffs().to_vec();
        c[i] = 1;
        c[j] = 3;
        s = s.with_coeffs(c).with_shift(vec![0, 1]);
        let d = diagonal_full(&s, 3).unwrap();
        assert_eq!(d.coeffs(), &[0, 1, 3]);
    }

    #[test]
    fn valuations() {
        let k = PrimeField::new(7).unwrap();
        // x2^-2 + x1 x2 as x2^-2 * (1 + x1 x2^3)
        let p = MultiPoly::from_terms(k, 2, vec![(vec![0, 0], 1), (vec![1, 3], 1)]);
        assert_eq!(nu_last_poly(&p, &[0, -2]).unwrap(), -2);
        let q = MultiPoly::monomial(k, vec![1, 3], 1);
        assert_eq!(nu_last_poly(&q, &[0, 0]).unwrap(), 3);
        let s = TruncatedSeries::univariate(k, vec![0, 1, 3, 3]);
        assert_eq!(nu_last(&s).unwrap(), 1);
        let z = TruncatedSeries::univariate(k, vec![0, 0]);
        assert_eq!(nu_last(&z), Err(Error::ZeroUpToPrecision));
    }
}
