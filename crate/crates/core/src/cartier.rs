//! Cartier operators over F_p and their action on fractions with a fixed
//! denominator.
//!
//! `Λ_j` keeps the monomials whose exponents are congruent to `j` mod `p` and
//! divides those exponents by `p`. Over F_p the `1/p`-th power of a
//! coefficient is the coefficient itself. For `S/Q` with `Q(0) = 1`,
//! `Λ_j(S/Q) = Λ_j(S Q^{p-1}) / Q`, so the numerators of the orbit stay in the
//! finite-dimensional space `{S : deg S <= N}`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::poly::{Monomial, MultiPoly};
use crate::rational::RationalFunction;

/// Default cap on the number of orbit states.
pub const DEFAULT_MAX_STATES: usize = 100_000;

fn check_digits(g: &MultiPoly, j: &[u32]) -> Result<()> {
    if j.len() != g.nvars() {
        return Err(Error::DimMismatch {
            expected: g.nvars(),
            got: j.len(),
        });
    }
    if let Some(&d) = j.iter().find(|&&d| d >= g.field().p()) {
        return Err(Error::Precondition(format!("digit {d} is not below p")));
    }
    Ok(())
}

/// `Λ_j(g)`.
pub fn cartier_poly(g: &MultiPoly, j: &[u32]) -> Result<MultiPoly> {
    check_digits(g, j)?;
    let p = g.field().p();
    let terms = g.terms().iter().filter(|&(e, _c)| e.iter()
            .zip(j)
            .all(|(x, d)| x % p == *d)).map(|(e, c)| (e.iter().map(|x| x / p).collect::<Monomial>(), *c));
    Ok(MultiPoly::from_terms(g.field(), g.nvars(), terms))
}

/// The components `Λ_j(g)` of `g = Σ_j Λ_j(g)^p x^j`; absent digit vectors
/// have zero component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusParts {
    field: PrimeField,
    nvars: usize,
    parts: BTreeMap<Vec<u32>, MultiPoly>,
}

impl FrobeniusParts {
    pub fn get(&self, j: &[u32]) -> MultiPoly {
        self.parts
            .get(j)
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(self.field, self.nvars))
    }

    /// Nonzero components in digit-vector order.
    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u32>, &MultiPoly)> {
        self.parts.iter()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `Σ_j (part_j)^p x^j`.
    pub fn reassemble(&self) -> MultiPoly {
        let p = self.field.p();
        let terms = self.parts.iter().flat_map(|(j, g)| {
            g.terms().iter().map(move |(e, c)| {
                let e2: Monomial = e.iter().zip(j).map(|(x, d)| x * p + d).collect();
                (e2, *c)
            })
        });
        MultiPoly::from_terms(self.field, self.nvars, terms)
    }
}

pub fn frobenius_decompose(g: &MultiPoly) -> FrobeniusParts {
    let p = g.field().p();
    let mut buckets: BTreeMap<Vec<u32>, Vec<(Monomial, u32)>> = BTreeMap::new();
    for (e, c) in g.terms() {
        let j: Vec<u32> = e.iter().map(|x| x % p).collect();
        let q: Monomial = e.iter().map(|x| x / p).collect();
        buckets.entry(j).or_default().push((q, *c));
    }
    FrobeniusParts {
        field: g.field(),
        nvars: g.nvars(),
        parts: buckets
            .into_iter()
            .map(|(j, t)| (j, MultiPoly::from_terms(g.field(), g.nvars(), t)))
            .collect(),
    }
}

/// The space `{S/Q : deg S <= N}` for a fixed denominator, with `Q^{p-1}`
/// precomputed and indexed by exponent residues.
#[derive(Debug, Clone)]
pub struct InvariantSpace {
    q: MultiPoly,
    q_pow: MultiPoly,
    cap: u32,
    by_residue: HashMap<Vec<u32>, Vec<usize>>,
}

impl InvariantSpace {
    /// Space for the denominator `q` (with `q(0) = 1`) and numerator cap `cap`.
    pub fn new(q: &MultiPoly, cap: u32) -> Result<Self> {
        if q.constant_term() != 1 {
            return Err(Error::Precondition("denominator must satisfy Q(0) = 1".into()));
        }
        let p = q.field().p();
        let q_pow = q.pow(p - 1);
        let mut by_residue: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
        for (k, (e, _)) in q_pow.terms().iter().enumerate() {
            by_residue.entry(e.iter().map(|x| x % p).collect()).or_default().push(k);
        }
        Ok(InvariantSpace {
            q: q.clone(),
            q_pow,
            cap,
            by_residue,
        })
    }

    /// Space attached to a rational function, with cap equal to its height.
    pub fn for_rational(r: &RationalFunction) -> Result<Self> {
        Self::new(r.denominator(), r.height())
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.q
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn field(&self) -> PrimeField {
        self.q.field()
    }

    pub fn nvars(&self) -> usize {
        self.q.nvars()
    }

    fn check_state(&self, s: &MultiPoly) -> Result<()> {
        s.check_nvars(self.nvars())?;
        match s.total_degree() {
            Some(d) if d > self.cap => Err(Error::DegreeOverflow {
                degree: d,
                cap: self.cap,
            }),
            _ => Ok(()),
        }
    }

    /// `S_j` with `Λ_j(S/Q) = S_j/Q`.
    pub fn cartier_fraction(&self, s: &MultiPoly, j: &[u32]) -> Result<MultiPoly> {
        self.check_state(s)?;
        let out = cartier_poly(&s.mul(&self.q_pow), j)?;
        self.check_state(&out)?;
        Ok(out)
    }

    /// `S_{(i,..,i)}` for every digit `i`, in one pass over `S Q^{p-1}`.
    pub fn diagonal_images(&self, s: &MultiPoly) -> Result<Vec<MultiPoly>> {
        self.check_state(s)?;
        let f = self.field();
        let p = f.p();
        let m = self.nvars();
        let mut acc: Vec<HashMap<Monomial, u32>> = vec![HashMap::new(); p as usize];
        let qt = self.q_pow.terms();
        for (es, cs) in s.terms() {
            for (i, slot) in acc.iter_mut().enumerate() {
                let target: Vec<u32> = es.iter().map(|x| (i as u32 + p - x % p) % p).collect();
                let Some(ks) = self.by_residue.get(&target) else {
                    continue;
                };
                for &k in ks {
                    let (eq, cq) = &qt[k];
                    let e: Monomial = es.iter().zip(eq).map(|(a, b)| (a + b) / p).collect();
                    let v = slot.entry(e).or_insert(0);
                    *v = f.add(*v, f.mul(*cs, *cq));
                }
            }
        }
        acc.into_iter()
            .map(|map| {
                let out = MultiPoly::from_terms(f, m, map);
                self.check_state(&out)?;
                Ok(out)
            })
            .collect()
    }
}

/// Breadth-first closure of a numerator under the diagonal digit maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    /// Numerators in discovery order; state 0 is the start.
    pub states: Vec<MultiPoly>,
    /// `transitions[s][i]` is the state reached from `s` by digit `i`.
    pub transitions: Vec<Vec<usize>>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

pub fn diagonal_orbit(space: &InvariantSpace, start: &MultiPoly, max_states: usize) -> Result<Orbit> {
    assert!(max_states >= 1);
    let mut index: HashMap<MultiPoly, usize> = HashMap::new();
    let mut states = vec![start.clone()];
    index.insert(start.clone(), 0);
    let mut transitions: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let images = space.diagonal_images(&states[s])?;
        let mut row = Vec::with_capacity(images.len());
        for img in images {
            let id = match index.get(&img) {
                Some(&id) => id,
                None => {
                    if states.len() >= max_states {
                        return Err(Error::StateBudget {
                            reached: states.len(),
                        });
                    }
                    let id = states.len();
                    index.insert(img.clone(), id);
                    states.push(img);
                    queue.push_back(id);
                    id
                }
            };
            row.push(id);
        }
        transitions.push(row);
    }
    log::debug!("diagonal orbit closed with {} states", states.len());
    Ok(Orbit { states, transitions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    fn k(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn uni(f: PrimeField, c: &[(u32, u32)]) -> MultiPoly {
        MultiPoly::from_terms(f, 1, c.iter().map(|&(e, v)| (vec![e], v)))
    }

    #[test]
    fn cartier_examples() {
        let f = k(3);
        let g = uni(f, &[(0, 1), (2, 2), (5, 1)]);
        assert_eq!(cartier_poly(&g, &[2]).unwrap(), uni(f, &[(0, 2), (1, 1)]));
        let f2 = k(2);
        let g = MultiPoly::monomial(f2, vec![1, 2], 1);
        assert_eq!(cartier_poly(&g, &[1, 0]).unwrap(), MultiPoly::monomial(f2, vec![0, 1], 1));
        let f7 = k(7);
        assert_eq!(cartier_poly(&uni(f7, &[(7, 1)]), &[0]).unwrap(), uni(f7, &[(1, 1)]));
        assert!(matches!(cartier_poly(&g, &[0]), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn decompose_examples() {
        let f = k(2);
        let g = uni(f, &[(0, 1), (1, 1), (2, 1)]);
        let parts = frobenius_decompose(&g);
        assert_eq!(parts.get(&[0]), uni(f, &[(0, 1), (1, 1)]));
        assert_eq!(parts.get(&[1]), uni(f, &[(0, 1)]));
        assert_eq!(parts.reassemble(), g);
        assert!(frobenius_decompose(&MultiPoly::zero(f, 2)).is_empty());
    }

    #[test]
    fn fraction_examples() {
        let f = k(2);
        let q = MultiPoly::from_terms(f, 1, vec![(vec![0], 1), (vec![1], 1)]);
        let space = InvariantSpace::new(&q, 1).unwrap();
        let one = MultiPoly::one(f, 1);
        assert_eq!(space.cartier_fraction(&one, &[0]).unwrap(), one);
        assert_eq!(space.cartier_fraction(&one, &[1]).unwrap(), one);

        let q = MultiPoly::from_terms(f, 2, vec![(vec![0, 0], 1), (vec![1, 0], 1), (vec![0, 1], 1)]);
        let space = InvariantSpace::new(&q, 1).unwrap();
        let one = MultiPoly::one(f, 2);
        assert_eq!(space.cartier_fraction(&one, &[0, 0]).unwrap(), one);
        assert!(space.cartier_fraction(&one, &[1, 1]).unwrap().is_zero());
        let big = MultiPoly::monomial(f, vec![2, 0], 1);
        assert!(matches!(
            space.cartier_fraction(&big, &[0, 0]),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn diagonal_images_match_cartier_fraction() {
        let r = parse_rational("(1+x*y)/(1-x-y+2*x*y^2)", 5).unwrap();
        let space = InvariantSpace::for_rational(&r).unwrap();
        let imgs = space.diagonal_images(r.numerator()).unwrap();
        for (i, img) in imgs.iter().enumerate() {
            let j = vec![i as u32; 2];
            assert_eq!(*img, space.cartier_fraction(r.numerator(), &j).unwrap());
        }
    }

    #[test]
    fn orbit_central_binomial_mod_two() {
        let r = parse_rational("1/(1-x-y)", 2).unwrap();
        let space = InvariantSpace::for_rational(&r).unwrap();
        let orbit = diagonal_orbit(&space, r.numerator(), 10).unwrap();
        assert_eq!(orbit.len(), 2);
        assert!(orbit.states[0].is_one());
        assert!(orbit.states[1].is_zero());
        assert_eq!(orbit.transitions, vec![vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn orbit_budget() {
        let r = parse_rational("1/(1-x-y)", 2).unwrap();
        let space = InvariantSpace::for_rational(&r).unwrap();
        assert_eq!(
            diagonal_orbit(&space, r.numerator(), 1),
            Err(Error::StateBudget { reached: 1 })
        );
    }
}
