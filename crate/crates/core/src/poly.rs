//! Sparse multivariate polynomials over F_p.
//!
//! Terms are kept sorted by exponent vector (lexicographic) with no stored
//! zero coefficients, so structural equality and hashing coincide with
//! polynomial equality.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Exponent vector of a monomial.
pub type Monomial = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    field: PrimeField,
    nvars: usize,
    terms: Vec<(Monomial, u32)>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[F_{}; {}]({})", self.field.p(), self.nvars, self)
    }
}

impl MultiPoly {
    pub fn zero(field: PrimeField, nvars: usize) -> Self {
        MultiPoly {
            field,
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(field: PrimeField, nvars: usize, c: u32) -> Self {
        let c = c % field.p();
        let terms = if c == 0 {
            Vec::new()
        } else {
            vec![(vec![0; nvars], c)]
        };
        MultiPoly {
            field,
            nvars,
            terms,
        }
    }

    pub fn one(field: PrimeField, nvars: usize) -> Self {
        Self::constant(field, nvars, 1)
    }

    /// The variable `x_{index+1}`.
    pub fn var(field: PrimeField, nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[index] = 1;
        Self::monomial(field, e, 1)
    }

    pub fn monomial(field: PrimeField, exps: Monomial, coeff: u32) -> Self {
        let nvars = exps.len();
        let coeff = coeff % field.p();
        let terms = if coeff == 0 {
            Vec::new()
        } else {
            vec![(exps, coeff)]
        };
        MultiPoly {
            field,
            nvars,
            terms,
        }
    }

    /// Builds a polynomial from arbitrary (possibly repeated) terms.
    pub fn from_terms<I>(field: PrimeField, nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, u32)>,
    {
        let mut acc: HashMap<Monomial, u32> = HashMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length mismatch");
            let c = c % field.p();
            if c == 0 {
                continue;
            }
            let slot = acc.entry(e).or_insert(0);
            *slot = field.add(*slot, c);
        }
        Self::from_map(field, nvars, acc)
    }

    fn from_map(field: PrimeField, nvars: usize, map: HashMap<Monomial, u32>) -> Self {
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| *c != 0).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        MultiPoly {
            field,
            nvars,
            terms,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].1 == 1 && self.terms[0].0.iter().all(|&e| e == 0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(e, _)| e.iter().all(|&x| x == 0))
    }

    /// Total degree; `None` is the sentinel for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.iter().map(|(e, _)| e[var]).max()
    }

    /// Least exponent of `var` over the terms.
    pub fn degree_in_min(&self, var: usize) -> Option<u32> {
        self.terms.iter().map(|(e, _)| e[var]).min()
    }

    pub fn coeff(&self, exps: &[u32]) -> u32 {
        match self.terms.binary_search_by(|(e, _)| e.as_slice().cmp(exps)) {
            Ok(i) => self.terms[i].1,
            Err(_) => 0,
        }
    }

    pub fn constant_term(&self) -> u32 {
        match self.terms.first() {
            Some((e, c)) if e.iter().all(|&x| x == 0) => *c,
            _ => 0,
        }
    }

    fn same_ring(&self, other: &Self) {
        assert_eq!(self.field, other.field, "mixed fields");
        assert_eq!(self.nvars, other.nvars, "mixed variable counts");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_ring(other);
        let f = self.field;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (a, b) = (&self.terms[i], &other.terms[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = f.add(a.1, b.1);
                    if c != 0 {
                        out.push((a.0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        MultiPoly {
            field: f,
            nvars: self.nvars,
            terms: out,
        }
    }

    pub fn neg(&self) -> Self {
        let f = self.field;
        MultiPoly {
            field: f,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), f.neg(*c))).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u32) -> Self {
        let f = self.field;
        let c = c % f.p();
        if c == 0 {
            return Self::zero(f, self.nvars);
        }
        MultiPoly {
            field: f,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), f.mul(*a, c))).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_ring(other);
        let f = self.field;
        if self.is_zero() || other.is_zero() {
            return Self::zero(f, self.nvars);
        }
        let mut acc: HashMap<Monomial, u32> =
            HashMap::with_capacity(self.terms.len() * other.terms.len() / 2 + 1);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Monomial = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let slot = acc.entry(e).or_insert(0);
                *slot = f.add(*slot, f.mul(*ca, *cb));
            }
        }
        Self::from_map(f, self.nvars, acc)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(self.field, self.nvars);
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

    /// Multiplies by the monomial `x^shift`.
    pub fn mul_monomial(&self, shift: &[u32]) -> Self {
        assert_eq!(shift.len(), self.nvars);
        MultiPoly {
            field: self.field,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), *c))
                .collect(),
        }
    }

    pub fn derivative(&self, var: usize) -> Self {
        let f = self.field;
        let terms = self.terms.iter().filter(|(e, _)| e[var] > 0).map(|(e, c)| {
            let mut e2 = e.clone();
            e2[var] -= 1;
            (e2, f.mul(*c, f.reduce_u64(e[var] as u64)))
        });
        Self::from_terms(f, self.nvars, terms)
    }

    /// Evaluates at a point of F_p^m.
    pub fn eval(&self, point: &[u32]) -> u32 {
        assert_eq!(point.len(), self.nvars);
        let f = self.field;
        self.terms.iter().fold(0, |acc, (e, c)| {
            let m = e
                .iter()
                .zip(point)
                .fold(*c, |m, (&k, &x)| f.mul(m, f.pow(x, k as u64)));
            f.add(acc, m)
        })
    }

    /// Replaces variable `i` by `images[i]`, a polynomial in `target` variables.
    pub fn substitute(&self, images: &[MultiPoly], target: usize) -> MultiPoly {
        assert_eq!(images.len(), self.nvars);
        assert!(images.iter().all(|p| p.nvars == target));
        let f = self.field;
        let mut powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|img| vec![MultiPoly::one(f, img.nvars)])
            .collect();
        let mut acc = MultiPoly::zero(f, target);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(f, target, *c);
            for (k, &ek) in e.iter().enumerate() {
                while powers[k].len() <= ek as usize {
                    let next = powers[k].last().unwrap().mul(&images[k]);
                    powers[k].push(next);
                }
                if ek > 0 {
                    term = term.mul(&powers[k][ek as usize]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Writes the polynomial as `sum_k c_k(x_1..x_{m-1}) * x_m^k`.
    pub fn coeffs_in_last(&self) -> Vec<MultiPoly> {
        assert!(self.nvars >= 1);
        let f = self.field;
        let m = self.nvars - 1;
        let deg = self.degree_in(m).map(|d| d as usize + 1).unwrap_or(0);
        let mut buckets: Vec<Vec<(Monomial, u32)>> = vec![Vec::new(); deg];
        for (e, c) in &self.terms {
            buckets[e[m] as usize].push((e[..m].to_vec(), *c));
        }
        buckets
            .into_iter()
            .map(|t| MultiPoly::from_terms(f, m, t))
            .collect()
    }

    /// Inverse of [`coeffs_in_last`](Self::coeffs_in_last).
    pub fn from_coeffs_in_last(field: PrimeField, nvars: usize, coeffs: &[MultiPoly]) -> Self {
        let terms = coeffs.iter().enumerate().flat_map(|(k, c)| {
            c.terms.iter().map(move |(e, v)| {
                let mut e2 = e.clone();
                e2.push(k as u32);
                (e2, *v)
            })
        });
        MultiPoly::from_terms(field, nvars, terms)
    }

    /// Embeds into a ring with more variables (new ones appended).
    pub fn extend_vars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        MultiPoly {
            field: self.field,
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2.resize(nvars, 0);
                    (e2, *c)
                })
                .collect(),
        }
    }

    /// Divides out the largest monomial dividing every term. Returns the
    /// removed exponent vector.
    pub fn monomial_content(&self) -> Monomial {
        let mut content: Option<Monomial> = None;
        for (e, _) in &self.terms {
            content = Some(match content {
                None => e.clone(),
                Some(c) => c.iter().zip(e).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        content.unwrap_or_else(|| vec![0; self.nvars])
    }

    /// Exact division by a monomial that divides every term.
    pub fn div_monomial(&self, m: &[u32]) -> Self {
        MultiPoly {
            field: self.field,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let e2 = e
                        .iter()
                        .zip(m)
                        .map(|(a, b)| a.checked_sub(*b).expect("monomial does not divide"))
                        .collect();
                    (e2, *c)
                })
                .collect(),
        }
    }

    pub fn check_nvars(&self, expected: usize) -> Result<()> {
        if self.nvars != expected {
            return Err(Error::DimMismatch {
                expected,
                got: self.nvars,
            });
        }
        Ok(())
    }

    /// Renders in the expression grammar with variable names `x1..xm`.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = e.iter().all(|&x| x == 0);
            if *c != 1 || is_const {
                factors.push(c.to_string());
            }
            for (k, &ek) in e.iter().enumerate() {
                match ek {
                    0 => {}
                    1 => factors.push(format!("x{}", k + 1)),
                    _ => factors.push(format!("x{}^{}", k + 1, ek)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
