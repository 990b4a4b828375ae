//! Truncated power series on a box `[0, M)^m`, optionally carrying a monomial
//! shift so the stored object denotes `x^v * (stored series)`.

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::poly::MultiPoly;
use crate::rational::RationalFunction;

/// Default ceiling on the number of stored coefficients (`M^m`).
pub const DEFAULT_TERM_CEILING: u128 = 60_000_000;

#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    field: PrimeField,
    nvars: usize,
    order: usize,
    /// Dense box, first variable most significant.
    coeffs: Vec<u32>,
    shift: Vec<i64>,
}

impl std::fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TruncatedSeries")
            .field("p", &self.field.p())
            .field("nvars", &self.nvars)
            .field("order", &self.order)
            .field("shift", &self.shift)
            .finish_non_exhaustive()
    }
}

fn box_size(order: usize, nvars: usize, ceiling: u128) -> Result<usize> {
    let mut size: u128 = 1;
    for _ in 0..nvars {
        size = size.saturating_mul(order as u128);
    }
    if size > ceiling {
        return Err(Error::Budget {
            needed: size,
            ceiling,
        });
    }
    Ok(size as usize)
}

impl TruncatedSeries {
    pub fn zeros(field: PrimeField, nvars: usize, order: usize) -> Result<Self> {
        let size = box_size(order, nvars, DEFAULT_TERM_CEILING)?;
        Ok(TruncatedSeries {
            field,
            nvars,
            order,
            coeffs: vec![0; size],
            shift: vec![0; nvars],
        })
    }

    /// Univariate series known up to (excluding) `x^coeffs.len()`.
    pub fn univariate(field: PrimeField, coeffs: Vec<u32>) -> Self {
        let coeffs: Vec<u32> = coeffs.into_iter().map(|c| c % field.p()).collect();
        TruncatedSeries {
            field,
            nvars: 1,
            order: coeffs.len(),
            coeffs,
            shift: vec![0],
        }
    }

    /// Truncation of a polynomial to the box of the given order.
    pub fn from_poly(p: &MultiPoly, order: usize) -> Result<Self> {
        let mut s = Self::zeros(p.field(), p.nvars(), order)?;
        for (e, c) in p.terms() {
            if let Some(i) = s.index(e) {
                s.coeffs[i] = *c;
            }
        }
        Ok(s)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn shift(&self) -> &[i64] {
        &self.shift
    }

    pub fn with_shift(mut self, shift: Vec<i64>) -> Self {
        assert_eq!(shift.len(), self.nvars);
        self.shift = shift;
        self
    }

    /// Replaces the stored coefficients (same box).
    pub fn with_coeffs(mut self, coeffs: Vec<u32>) -> Self {
        assert_eq!(coeffs.len(), self.coeffs.len());
        self.coeffs = coeffs.into_iter().map(|c| c % self.field.p()).collect();
        self
    }

    /// Flat index of an exponent inside the box.
    pub fn index(&self, e: &[u32]) -> Option<usize> {
        assert_eq!(e.len(), self.nvars);
        let mut i = 0usize;
        for &x in e {
            if x as usize >= self.order {
                return None;
            }
            i = i * self.order + x as usize;
        }
        Some(i)
    }

    /// Stored coefficient, ignoring the shift; `None` outside the box.
    pub fn get(&self, e: &[u32]) -> Option<u32> {
        self.index(e).map(|i| self.coeffs[i])
    }

    /// Coefficient of `x^e` in the shifted object `x^v * S`. Exponents below
    /// the shift give 0; exponents past the box are unknown.
    pub fn coeff_shifted(&self, e: &[i64]) -> Option<u32> {
        let mut raw = Vec::with_capacity(self.nvars);
        for (x, v) in e.iter().zip(&self.shift) {
            let d = x - v;
            if d < 0 {
                return Some(0);
            }
            raw.push(u32::try_from(d).ok()?);
        }
        self.get(&raw)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Inverse of [`index`](Self::index).
    pub fn exponent(&self, mut i: usize) -> Vec<u32> {
        let mut e = vec![0; self.nvars];
        for k in (0..self.nvars).rev() {
            e[k] = (i % self.order) as u32;
            i /= self.order;
        }
        e
    }

    /// Product with a polynomial, truncated to the same box (shift ignored).
    pub fn mul_poly(&self, p: &MultiPoly) -> TruncatedSeries {
        assert_eq!(p.nvars(), self.nvars);
        let f = self.field;
        let mut out = vec![0u32; self.coeffs.len()];
        for (q, c) in p.terms() {
            if q.iter().any(|&x| x as usize >= self.order) {
                continue;
            }
            for (i, &s) in self.coeffs.iter().enumerate() {
                if s == 0 {
                    continue;
                }
                let e = self.exponent(i);
                let target: Vec<u32> = e.iter().zip(q).map(|(a, b)| a + b).collect();
                if let Some(j) = self.index(&target) {
                    out[j] = f.add(out[j], f.mul(s, *c));
                }
            }
        }
        TruncatedSeries {
            coeffs: out,
            ..self.clone()
        }
    }

    /// Restriction to a smaller box.
    pub fn truncate(&self, order: usize) -> TruncatedSeries {
        assert!(order <= self.order);
        let mut out = TruncatedSeries {
            field: self.field,
            nvars: self.nvars,
            order,
            coeffs: vec![0; order.pow(self.nvars as u32)],
            shift: self.shift.clone(),
        };
        for i in 0..out.coeffs.len() {
            let e = out.exponent(i);
            out.coeffs[i] = self.get(&e).unwrap();
        }
        out
    }
}

/// Expands `P/Q` on the box `[0, M)^m` using the default term ceiling.
pub fn series_expand(r: &RationalFunction, order: usize) -> Result<TruncatedSeries> {
    series_expand_with_budget(r, order, DEFAULT_TERM_CEILING)
}

/// Expands `P/Q` via the recurrence `F[e] = P[e] - sum_{q != 0} Q_q F[e - q]`
/// (valid because `Q(0) = 1`), filling the box line by line in lex order.
pub fn series_expand_with_budget(
    r: &RationalFunction,
    order: usize,
    ceiling: u128,
) -> Result<TruncatedSeries> {
    assert!(order >= 1, "order must be positive");
    let (num, den) = (r.numerator(), r.denominator());
    let f = r.field();
    let m = r.nvars();
    let size = box_size(order, m, ceiling)?;
    let mut s = TruncatedSeries {
        field: f,
        nvars: m,
        order,
        coeffs: vec![0; size],
        shift: vec![0; m],
    };
    for (e, c) in num.terms() {
        if let Some(i) = s.index(e) {
            s.coeffs[i] = *c;
        }
    }
    if m == 0 {
        return Ok(s);
    }
    // split Q's nonconstant terms by whether they move across lines
    let mut cross: Vec<(Vec<u32>, usize, u32)> = Vec::new(); // (prefix, last, -c)
    let mut inline: Vec<(usize, u32)> = Vec::new();
    for (q, c) in den.terms() {
        if q.iter().all(|&x| x == 0) || q.iter().any(|&x| x as usize >= order) {
            continue;
        }
        let last = q[m - 1] as usize;
        let neg = f.neg(*c);
        if q[..m - 1].iter().all(|&x| x == 0) {
            inline.push((last, neg));
        } else {
            cross.push((q[..m - 1].to_vec(), last, neg));
        }
    }
    let cross_offsets: Vec<usize> = cross
        .iter()
        .map(|(pre, _, _)| pre.iter().fold(0usize, |acc, &x| acc * order + x as usize))
        .collect();
    let lines = size / order;
    let mut prefix = vec![0u32; m - 1];
    let mut acc = vec![0u64; order];
    let p = f.p() as u64;
    let flush_every = (u64::MAX / 2 / ((p - 1) * (p - 1)).max(1)).clamp(1, 1 << 20);
    for line in 0..lines {
        let base = line * order;
        for (a, &c) in acc.iter_mut().zip(&s.coeffs[base..base + order]) {
            *a = c as u64;
        }
        let mut pending = 0u64;
        for ((pre, last, neg), off) in cross.iter().zip(&cross_offsets) {
            if pre.iter().zip(&prefix).any(|(q, e)| q > e) {
                continue;
            }
            let src = base - off * order;
            let neg = *neg as u64;
            for t in *last..order {
                acc[t] += neg * s.coeffs[src + t - last] as u64;
            }
            pending += 1;
            if pending >= flush_every {
                acc.iter_mut().for_each(|a| *a %= p);
                pending = 0;
            }
        }
        for t in 0..order {
            let mut v = acc[t] % p;
            for &(last, neg) in &inline {
                if last <= t {
                    v = (v + neg as u64 * s.coeffs[base + t - last] as u64) % p;
                }
            }
            s.coeffs[base + t] = v as u32;
        }
        // advance the prefix counter (odometer, last prefix digit fastest)
        for k in (0..m - 1).rev() {
            prefix[k] += 1;
            if (prefix[k] as usize) < order {
                break;
            }
            prefix[k] = 0;
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    #[test]
    fn geometric_two_vars() {
        let r = parse_rational("1/(1-x-y)", 7).unwrap();
        let s = series_expand(&r, 3).unwrap();
        assert_eq!(s.get(&[0, 0]), Some(1));
        assert_eq!(s.get(&[1, 1]), Some(2));
        assert_eq!(s.get(&[2, 2]), Some(6));
        assert_eq!(s.get(&[2, 1]), Some(3));
        assert_eq!(s.get(&[3, 0]), None);
    }

    #[test]
    fn four_variable_example_coefficient() {
        let r = parse_rational("2/(2-x1-x2) * 2/(2-x3-x4)", 7).unwrap();
        let s = series_expand(&r, 2).unwrap();
        // 2^-4 * 2 * 2 = 1/4 = 2 mod 7
        assert_eq!(s.get(&[1, 1, 1, 1]), Some(2));
    }

    #[test]
    fn expansion_times_denominator_is_numerator() {
        let r = parse_rational("(1+3*x^2*y)/(1-x-2*y^3+x*y)", 11).unwrap();
        let s = series_expand(&r, 9).unwrap();
        let back = s.mul_poly(r.denominator());
        let num = TruncatedSeries::from_poly(r.numerator(), 9).unwrap();
        assert_eq!(back.coeffs(), num.coeffs());
    }

    #[test]
    fn budget_enforced() {
        let r = parse_rational("1/(1-x1-x2-x3-x4-x5-x6)", 5).unwrap();
        let err = series_expand_with_budget(&r, 100, 1_000_000).unwrap_err();
        assert_eq!(err.code(), "E_BUDGET");
    }

    #[test]
    fn shifted_lookup() {
        let k = PrimeField::new(5).unwrap();
        let s = TruncatedSeries::univariate(k, vec![1, 2, 3]).with_shift(vec![-2]);
        assert_eq!(s.coeff_shifted(&[-2]), Some(1));
        assert_eq!(s.coeff_shifted(&[-3]), Some(0));
        assert_eq!(s.coeff_shifted(&[1]), None);
    }
}
