//! Dense univariate polynomials over F_p, used for transition matrices,
//! annihilator coefficients and univariate series arithmetic.

use std::fmt;

use crate::field::PrimeField;
use crate::poly::MultiPoly;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UniPoly {
    field: PrimeField,
    /// `coeffs[i]` is the coefficient of `x^i`; no trailing zeros.
    coeffs: Vec<u32>,
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly[F_{}]({})", self.field.p(), self)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(i, c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}*x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}*x^{i}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl UniPoly {
    pub fn new(field: PrimeField, mut coeffs: Vec<u32>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= field.p();
        }
        let mut out = UniPoly { field, coeffs };
        out.trim();
        out
    }

    pub fn zero(field: PrimeField) -> Self {
        UniPoly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(field: PrimeField, c: u32) -> Self {
        Self::new(field, vec![c])
    }

    pub fn one(field: PrimeField) -> Self {
        Self::constant(field, 1)
    }

    pub fn x(field: PrimeField) -> Self {
        Self::new(field, vec![0, 1])
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u32> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        let mut out = UniPoly { field: f, coeffs };
        out.trim();
        out
    }

    pub fn neg(&self) -> Self {
        let f = self.field;
        UniPoly {
            field: f,
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u32) -> Self {
        let f = self.field;
        Self::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field);
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        Self::new(self.field, mul_truncated(self.field, &self.coeffs, &other.coeffs, n))
    }

    /// Product truncated below `x^n`.
    pub fn mul_trunc(&self, other: &Self, n: usize) -> Self {
        Self::new(self.field, mul_truncated(self.field, &self.coeffs, &other.coeffs, n))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Substitutes `x -> x^k` (the Frobenius twist for `k = p^i` over F_p).
    pub fn dilate(&self, k: usize) -> Self {
        assert!(k >= 1);
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; (self.coeffs.len() - 1) * k + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c;
        }
        UniPoly {
            field: self.field,
            coeffs,
        }
    }

    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        UniPoly {
            field: self.field,
            coeffs,
        }
    }

    pub fn truncate(&self, n: usize) -> Self {
        Self::new(self.field, self.coeffs.iter().take(n).copied().collect())
    }

    pub fn eval(&self, x: u32) -> u32 {
        let f = self.field;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn derivative(&self) -> Self {
        let f = self.field;
        Self::new(
            f,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(c, f.reduce_u64(i as u64)))
                .collect(),
        )
    }

    /// Euclidean division; panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let f = self.field;
        let dd = divisor.degree().expect("division by zero polynomial");
        let inv = f.inv(divisor.leading()).unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(f), self.clone());
        }
        let mut quot = vec![0; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = f.mul(rem[i + dd], inv);
            quot[i] = c;
            if c == 0 {
                continue;
            }
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = f.sub(rem[i + j], f.mul(c, d));
            }
        }
        (Self::new(f, quot), Self::new(f, rem))
    }

    /// Division known to be exact.
    pub fn div_exact(&self, divisor: &Self) -> Self {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self) -> Self {
        match self.field.inv(self.leading()) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn to_multi(&self) -> MultiPoly {
        MultiPoly::from_terms(
            self.field,
            1,
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(i, &c)| (vec![i as u32], c)),
        )
    }

    /// Converts a polynomial in one variable.
    pub fn from_multi(p: &MultiPoly) -> Self {
        assert_eq!(p.nvars(), 1, "expected a univariate polynomial");
        let deg = p.total_degree().map(|d| d as usize + 1).unwrap_or(0);
        let mut coeffs = vec![0; deg];
        for (e, c) in p.terms() {
            coeffs[e[0] as usize] = *c;
        }
        Self::new(p.field(), coeffs)
    }
}

/// Schoolbook product of dense coefficient slices, keeping terms below `n`.
pub(crate) fn mul_truncated(f: PrimeField, a: &[u32], b: &[u32], n: usize) -> Vec<u32> {
    let len = n.min((a.len() + b.len()).saturating_sub(1));
    let mut acc = vec![0u64; len];
    let p = f.p() as u64;
    // products are < 2^62, so flush every few additions to stay in u64
    let flush_every = ((u64::MAX / 2) / ((p - 1).max(1) * (p - 1).max(1))).clamp(1, 1 << 20) as usize;
    let mut pending = 0usize;
    for (i, &x) in a.iter().enumerate() {
        if i >= len {
            break;
        }
        if x == 0 {
            continue;
        }
        let x = x as u64;
        for (j, &y) in b.iter().enumerate().take(len - i) {
            if y != 0 {
                acc[i + j] += x * y as u64;
            }
        }
        pending += 1;
        if pending >= flush_every {
            for v in acc.iter_mut() {
                *v %= p;
            }
            pending = 0;
        }
    }
    acc.into_iter().map(|v| (v % p) as u32).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn division_and_gcd() {
        let k = f(7);
        let a = UniPoly::new(k, vec![1, 1]); // 1 + x
        let b = UniPoly::new(k, vec![6, 0, 1]); // x^2 - 1
        let (q, r) = b.div_rem(&a);
        assert_eq!(q, UniPoly::new(k, vec![6, 1]));
        assert!(r.is_zero());
        assert_eq!(a.mul(&UniPoly::new(k, vec![2, 1])).gcd(&b), a);
    }

    #[test]
    fn dilation_is_frobenius() {
        let k = f(5);
        let a = UniPoly::new(k, vec![3, 1, 4, 1]);
        assert_eq!(a.pow(5), a.dilate(5));
    }

    #[test]
    fn flushing_large_prime() {
        let k = f(2_147_483_647);
        let a = UniPoly::new(k, vec![2_147_483_646; 64]);
        let b = a.mul(&a);
        // (-1)^2 summed i+1 times in the low half
        assert_eq!(b.coeff(10), 11);
    }
}
