//! Exact linear algebra: division-free determinants over polynomial rings,
//! Sylvester resultants, incremental elimination over F_p, and the
//! bounded-degree dependence relation between polynomial row vectors.

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::poly::MultiPoly;
use crate::unipoly::UniPoly;

/// Minimal commutative-ring interface for division-free algorithms.
pub trait CommRing: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add_elem(&self, other: &Self) -> Self;
    fn neg_elem(&self) -> Self;
    fn mul_elem(&self, other: &Self) -> Self;
}

impl CommRing for UniPoly {
    fn zero_like(&self) -> Self {
        UniPoly::zero(self.field())
    }
    fn one_like(&self) -> Self {
        UniPoly::one(self.field())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn neg_elem(&self) -> Self {
        self.neg()
    }
    fn mul_elem(&self, other: &Self) -> Self {
        self.mul(other)
    }
}

impl CommRing for MultiPoly {
    fn zero_like(&self) -> Self {
        MultiPoly::zero(self.field(), self.nvars())
    }
    fn one_like(&self) -> Self {
        MultiPoly::one(self.field(), self.nvars())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn neg_elem(&self) -> Self {
        self.neg()
    }
    fn mul_elem(&self, other: &Self) -> Self {
        self.mul(other)
    }
}

/// Determinant by Berkowitz's algorithm (no divisions). `unit` supplies the
/// ring for the empty matrix.
pub fn det<T: CommRing>(m: &[Vec<T>], unit: &T) -> T {
    let n = m.len();
    if n == 0 {
        return unit.one_like();
    }
    // char poly coefficients (leading first) of the trailing principal block
    let mut cp: Vec<T> = vec![unit.one_like()];
    for k in (0..n).rev() {
        let size = n - k; // block m[k..][k..]
        let a = &m[k][k];
        let row: Vec<&T> = (k + 1..n).map(|j| &m[k][j]).collect();
        let mut col: Vec<T> = (k + 1..n).map(|i| m[i][k].clone()).collect();
        // Toeplitz column: t0 = 1, t1 = -a, t_{i} = -R M^{i-2} C
        let mut t = Vec::with_capacity(size + 1);
        t.push(unit.one_like());
        t.push(a.neg_elem());
        for _ in 2..=size {
            let dot = row
                .iter()
                .zip(&col)
                .fold(unit.zero_like(), |acc, (r, c)| acc.add_elem(&r.mul_elem(c)));
            t.push(dot.neg_elem());
            // col <- M col, M = m[k+1..][k+1..]
            col = (k + 1..n)
                .map(|i| {
                    (k + 1..n).zip(&col).fold(unit.zero_like(), |acc, (j, c)| {
                        if m[i][j].is_zero_elem() || c.is_zero_elem() {
                            acc
                        } else {
                            acc.add_elem(&m[i][j].mul_elem(c))
                        }
                    })
                })
                .collect();
        }
        let next: Vec<T> = (0..=size)
            .map(|i| {
                (0..cp.len())
                    .filter(|&j| j <= i && i - j < t.len())
                    .fold(unit.zero_like(), |acc, j| acc.add_elem(&t[i - j].mul_elem(&cp[j])))
            })
            .collect();
        cp = next;
    }
    let last = cp.pop().unwrap();
    if n.is_multiple_of(2) {
        last
    } else {
        last.neg_elem()
    }
}

/// Sylvester resultant of `p` and `q` with respect to their last variable.
/// The result lives in the ring of the remaining variables.
pub fn resultant_wrt_last(p: &MultiPoly, q: &MultiPoly) -> Result<MultiPoly> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroInput);
    }
    q.check_nvars(p.nvars())?;
    if p.nvars() == 0 {
        return Err(Error::DimMismatch {
            expected: 1,
            got: 0,
        });
    }
    let a = p.coeffs_in_last();
    let b = q.coeffs_in_last();
    let (da, db) = (a.len() - 1, b.len() - 1);
    let unit = a[0].zero_like();
    let n = da + db;
    if n == 0 {
        return Ok(unit.one_like());
    }
    let mut m = vec![vec![unit.clone(); n]; n];
    // rows hold coefficients from the leading one down
    for r in 0..db {
        for (k, c) in a.iter().rev().enumerate() {
            m[r][r + k] = c.clone();
        }
    }
    for r in 0..da {
        for (k, c) in b.iter().rev().enumerate() {
            m[db + r][r + k] = c.clone();
        }
    }
    Ok(det(&m, &unit))
}

/// Incremental row echelon form over F_p that remembers how each stored row
/// is built from the inserted vectors.
#[derive(Debug, Clone)]
pub struct Echelon {
    field: PrimeField,
    /// (reduced row with pivot value 1, pivot column, combination of basis vectors)
    rows: Vec<(Vec<u32>, usize, Vec<u32>)>,
    rank: usize,
}

impl Echelon {
    pub fn new(field: PrimeField) -> Self {
        Echelon {
            field,
            rows: Vec::new(),
            rank: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn reduce(&self, v: &[u32]) -> (Vec<u32>, Vec<u32>) {
        let f = self.field;
        let mut v = v.to_vec();
        let mut coords = vec![0u32; self.rank];
        for (row, pivot, combo) in &self.rows {
            let c = v[*pivot];
            if c == 0 {
                continue;
            }
            for (x, y) in v.iter_mut().zip(row) {
                if *y != 0 {
                    *x = f.sub(*x, f.mul(c, *y));
                }
            }
            for (x, y) in coords.iter_mut().zip(combo) {
                *x = f.add(*x, f.mul(c, *y));
            }
        }
        (v, coords)
    }

    /// Coordinates of `v` in terms of the inserted independent vectors, if
    /// `v` lies in their span.
    pub fn express(&self, v: &[u32]) -> Option<Vec<u32>> {
        let (residual, coords) = self.reduce(v);
        residual.iter().all(|&x| x == 0).then_some(coords)
    }

    /// Inserts `v`; returns true when it was independent of the stored rows.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let f = self.field;
        let (residual, coords) = self.reduce(v);
        let Some(pivot) = residual.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(residual[pivot]).unwrap();
        let row: Vec<u32> = residual.iter().map(|&x| f.mul(x, inv)).collect();
        // new row = (e_new - coords) * inv
        let mut combo: Vec<u32> = coords.iter().map(|&c| f.mul(f.neg(c), inv)).collect();
        combo.push(inv);
        for (_, _, c) in self.rows.iter_mut() {
            c.push(0);
        }
        self.rows.push((row, pivot, combo));
        self.rank += 1;
        true
    }
}

/// Nontrivial relation `sum_i q_i(x) * rows[i] = 0` for `r + 1` polynomial
/// row vectors of length `r`, with `deg q_i <= h * r` whenever every entry
/// has degree at most `h`.
///
/// Follows the constructive Cramer-rule argument: take the longest
/// independent prefix, restrict to pivot columns, and solve by minors. The
/// result is made primitive (common gcd removed) and normalized so the first
/// nonzero coefficient is monic.
pub fn bounded_dependence(field: PrimeField, rows: &[Vec<UniPoly>]) -> Vec<UniPoly> {
    let count = rows.len();
    assert!(count >= 1, "need at least one row");
    let zero = UniPoly::zero(field);
    let mut pivots: Vec<(Vec<UniPoly>, usize)> = Vec::new();
    let mut dependent_at = None;
    for (k, w0) in rows.iter().enumerate() {
        let mut w = w0.clone();
        for (u, c) in &pivots {
            if w[*c].is_zero() {
                continue;
            }
            let (s, t) = (u[*c].clone(), w[*c].clone());
            w = w
                .iter()
                .zip(u)
                .map(|(wi, ui)| s.mul(wi).sub(&t.mul(ui)))
                .collect();
            let g = w
                .iter()
                .filter(|e| !e.is_zero())
                .fold(zero.clone(), |g, e| g.gcd(e));
            if !g.is_zero() && g.degree() != Some(0) {
                w = w.iter().map(|e| e.div_exact(&g)).collect();
            }
        }
        match w.iter().position(|e| !e.is_zero()) {
            None => {
                dependent_at = Some(k);
                break;
            }
            Some(c) => pivots.push((w, c)),
        }
    }
    let j1 = dependent_at.expect("r+1 rows of length r are always dependent");
    let cols: Vec<usize> = pivots.iter().map(|(_, c)| *c).collect();
    let restrict = |row: &Vec<UniPoly>| -> Vec<UniPoly> { cols.iter().map(|&c| row[c].clone()).collect() };
    let base: Vec<Vec<UniPoly>> = rows[..j1].iter().map(restrict).collect();
    let target = restrict(&rows[j1]);
    let unit = UniPoly::one(field);
    let mut q = vec![zero.clone(); count];
    for k in 0..j1 {
        let mut mk = base.clone();
        mk[k] = target.clone();
        q[k] = det(&mk, &unit);
    }
    q[j1] = det(&base, &unit).neg();
    let g = q
        .iter()
        .filter(|e| !e.is_zero())
        .fold(zero.clone(), |g, e| g.gcd(e));
    let q: Vec<UniPoly> = q.iter().map(|e| e.div_exact(&g)).collect();
    let lead = q.iter().find(|e| !e.is_zero()).map(|e| e.leading()).unwrap();
    let inv = field.inv(lead).unwrap();
    q.iter().map(|e| e.scale(inv)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn u(k: PrimeField, c: &[u32]) -> UniPoly {
        UniPoly::new(k, c.to_vec())
    }

    #[test]
    fn berkowitz_small() {
        let k = f(101);
        let m = vec![
            vec![u(k, &[2]), u(k, &[3]), u(k, &[5])],
            vec![u(k, &[7]), u(k, &[11]), u(k, &[13])],
            vec![u(k, &[17]), u(k, &[19]), u(k, &[23])],
        ];
        // det = -78
        assert_eq!(det(&m, &u(k, &[1])), u(k, &[101 - 78]));
        let m2 = vec![vec![u(k, &[0, 1]), u(k, &[1])], vec![u(k, &[1]), u(k, &[0, 1])]];
        assert_eq!(det(&m2, &u(k, &[1])), u(k, &[100, 0, 1]));
    }

    #[test]
    fn resultant_examples() {
        let k = f(7);
        // P = y^2 - x^2 (1 - x) = y^2 - x^2 + x^3, P' = 2y
        let p = MultiPoly::from_terms(k, 2, vec![(vec![0, 2], 1), (vec![2, 0], 6), (vec![3, 0], 1)]);
        let dp = p.derivative(1);
        let r = resultant_wrt_last(&p, &dp).unwrap();
        let target = MultiPoly::from_terms(k, 1, vec![(vec![2], 1), (vec![3], 6)]);
        let c = r.coeff(&[2]);
        assert_ne!(c, 0);
        assert_eq!(r, target.scale(c));

        let k5 = f(5);
        let p = MultiPoly::from_terms(k5, 2, vec![(vec![0, 2], 1), (vec![1, 0], 4)]);
        let r = resultant_wrt_last(&p, &p.derivative(1)).unwrap();
        assert_eq!(r.total_degree(), Some(1));
        assert_eq!(r.len(), 1);

        let p = MultiPoly::from_terms(k, 2, vec![(vec![0, 1], 1), (vec![1, 0], 6)]);
        let one = MultiPoly::one(k, 2);
        assert!(resultant_wrt_last(&p, &one).unwrap().is_one());
        assert_eq!(
            resultant_wrt_last(&MultiPoly::zero(k, 2), &one),
            Err(Error::ZeroInput)
        );
    }

    #[test]
    fn dependence_examples() {
        let k = f(5);
        let rows = vec![
            vec![u(k, &[1]), u(k, &[0, 1])],
            vec![u(k, &[0, 1]), u(k, &[1])],
            vec![u(k, &[1, 1]), u(k, &[1, 1])],
        ];
        assert_eq!(bounded_dependence(k, &rows), vec![u(k, &[1]), u(k, &[1]), u(k, &[4])]);

        let k3 = f(3);
        let rows = vec![
            vec![u(k3, &[1]), u(k3, &[])],
            vec![u(k3, &[]), u(k3, &[1])],
            vec![u(k3, &[0, 1]), u(k3, &[0, 0, 1])],
        ];
        assert_eq!(
            bounded_dependence(k3, &rows),
            vec![u(k3, &[0, 1]), u(k3, &[0, 0, 1]), u(k3, &[2])]
        );

        let k2 = f(2);
        let rows = vec![vec![u(k2, &[1])], vec![u(k2, &[1])]];
        assert_eq!(bounded_dependence(k2, &rows), vec![u(k2, &[1]), u(k2, &[1])]);
    }

    #[test]
    fn zero_first_row() {
        let k = f(3);
        let rows = vec![vec![u(k, &[])], vec![u(k, &[1])]];
        assert_eq!(bounded_dependence(k, &rows), vec![u(k, &[1]), u(k, &[])]);
    }

    #[test]
    fn echelon_express() {
        let k = f(7);
        let mut e = Echelon::new(k);
        assert!(e.insert(&[1, 2, 3]));
        assert!(e.insert(&[0, 1, 1]));
        assert!(!e.insert(&[2, 5, 7]));
        // 2*(1,2,3) + 1*(0,1,1)
        assert_eq!(e.express(&[2, 5, 7]), Some(vec![2, 1]));
        assert_eq!(e.express(&[0, 0, 1]), None);
    }
}
