//! Annihilating polynomials `Σ Q_i(x) Y^{p^i}` for the diagonal of a rational
//! function mod p.
//!
//! The orbit automaton gives the diagonal and all its Cartier images exactly.
//! A basis `g_1 = Δ(R), g_2, ..` of their span satisfies `v(x) = A(x) v(x^p)`;
//! inverting `A` through its adjugate expresses every `g(x^{p^i})` as a row
//! vector over `F_p(x)` against `v(x)`, and `r + 1` such rows are dependent.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::automaton::{synthesize_with_orbit, Dfao};
use crate::cartier::DEFAULT_MAX_STATES;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::{bounded_dependence, det, Echelon};
use crate::rational::RationalFunction;
use crate::series::TruncatedSeries;
use crate::unipoly::UniPoly;

/// Smallest verification order used by [`find_annihilator`].
pub const DEFAULT_MIN_VERIFY_ORDER: usize = 2048;

/// Degree ceiling for intermediate polynomials.
const DEGREE_CEILING: u128 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnnihilatorOptions {
    pub max_states: usize,
    /// Truncation order for the rank computation; `None` picks
    /// `max(64, 4 * states)`.
    pub rank_order: Option<usize>,
    /// Lower limit for the verification order.
    pub min_verify_order: usize,
}

impl Default for AnnihilatorOptions {
    fn default() -> Self {
        AnnihilatorOptions {
            max_states: DEFAULT_MAX_STATES,
            rank_order: None,
            min_verify_order: DEFAULT_MIN_VERIFY_ORDER,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KernelBasis {
    field: PrimeField,
    /// Orbit states whose diagonals form the basis; the first is the start.
    pub basis_states: Vec<usize>,
    /// Truncated basis series `g_1, .., g_r`.
    pub basis: Vec<TruncatedSeries>,
    /// `A(x)` with `v(x) = A(x) v(x^p)`; entries have degree `< p`.
    pub matrix: Vec<Vec<UniPoly>>,
    /// Truncation order at which the rank was read.
    pub rank_order: usize,
    /// Rank agrees with the exact dimension of the span computed on the
    /// automaton, so the basis and `A` are exact.
    pub certified: bool,
    /// Number of orbit states before minimization.
    pub states: usize,
    pub dfao: Dfao,
}

impl KernelBasis {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
}

/// Dimension of the span of the state sequences, exactly: the span of the
/// vectors `o_w = (out(δ*(s, w)))_s` is the smallest space containing the
/// output vector and closed under `v -> v ∘ δ_d`.
fn exact_rank(d: &Dfao) -> usize {
    let k = d.len();
    let mut ech = Echelon::new(d.field());
    let mut queue = vec![d.outputs().to_vec()];
    while let Some(v) = queue.pop() {
        if !ech.insert(&v) {
            continue;
        }
        for digit in 0..d.p() {
            queue.push((0..k).map(|s| v[d.step(s, digit)]).collect());
        }
    }
    ech.rank()
}

fn select_basis(field: PrimeField, seqs: &[Vec<u32>]) -> Vec<usize> {
    let mut ech = Echelon::new(field);
    (0..seqs.len()).filter(|&s| ech.insert(&seqs[s])).collect()
}

/// Basis of the span of `Δ(R)` and its Cartier images, and the transition
/// matrix `A(x)`.
pub fn kernel_basis(r: &RationalFunction, opts: &AnnihilatorOptions) -> Result<KernelBasis> {
    let field = r.field();
    let (dfao, orbit) = synthesize_with_orbit(r, opts.max_states)?;
    let states = orbit.len();
    let exact = exact_rank(&dfao);
    let mut order = opts.rank_order.unwrap_or((4 * states).max(64));
    let mut seqs = dfao.state_sequences(order);
    let mut chosen = select_basis(field, &seqs);
    // grow the window until the truncated rank reaches the exact one
    while chosen.len() < exact && order < (1 << 22) {
        order *= 2;
        seqs = dfao.state_sequences(order);
        chosen = select_basis(field, &seqs);
    }
    let doubled = select_basis(field, &dfao.state_sequences(2 * order));
    if doubled.len() != chosen.len() {
        return Err(Error::RankUnstable {
            low: chosen.len(),
            high: doubled.len(),
            low_order: order,
            high_order: 2 * order,
        });
    }
    let certified = chosen.len() == exact;
    if !certified {
        log::warn!("rank {} read at order {order} is below the exact rank {exact}", chosen.len());
    }
    let rank = chosen.len();
    if rank == 0 {
        return Ok(KernelBasis {
            field,
            basis_states: Vec::new(),
            basis: Vec::new(),
            matrix: Vec::new(),
            rank_order: order,
            certified,
            states,
            dfao,
        });
    }
    if chosen[0] != 0 {
        return Err(Error::Precondition("start state is not part of the basis".into()));
    }
    let mut ech = Echelon::new(field);
    for &s in &chosen {
        ech.insert(&seqs[s]);
    }
    let p = field.p() as usize;
    // coords[j][i] = coordinates of Λ_i(g_j) in the basis
    let mut matrix = vec![vec![vec![0u32; p]; rank]; rank];
    for (j, &s) in chosen.iter().enumerate() {
        for i in 0..p {
            let t = dfao.step(s, i as u32);
            let c = ech.express(&seqs[t]).ok_or(Error::RankUnstable {
                low: rank,
                high: rank + 1,
                low_order: order,
                high_order: order,
            })?;
            for (k, &ck) in c.iter().enumerate() {
                matrix[j][k][i] = ck;
            }
        }
    }
    let matrix: Vec<Vec<UniPoly>> = matrix
        .into_iter()
        .map(|row| row.into_iter().map(|c| UniPoly::new(field, c)).collect())
        .collect();
    let basis = chosen
        .iter()
        .map(|&s| TruncatedSeries::univariate(field, seqs[s].clone()))
        .collect();
    Ok(KernelBasis {
        field,
        basis_states: chosen,
        basis,
        matrix,
        rank_order: order,
        certified,
        states,
        dfao,
    })
}

/// `Σ_{i=0}^{r} Q_i(x) Y^{p^i}` with verification metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OreAnnihilator {
    field: PrimeField,
    coefficients: Vec<UniPoly>,
    /// `p^r`.
    pub degree_bound: BigUint,
    /// `r^2 p^{r+1}`.
    pub height_bound: BigUint,
    pub verified_to_order: usize,
    pub verified: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct AnnihilatorJson {
    p: u64,
    r: usize,
    coefficients: Vec<Vec<u32>>,
    degree_bound: String,
    height_bound: String,
    verified_to_order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    Pass { order: usize },
    /// First exponent with a nonzero residue coefficient.
    Residue { order: usize },
}

impl OreAnnihilator {
    /// Unverified annihilator from coefficients `Q_0, .., Q_r` (`r >= 1`).
    pub fn new(field: PrimeField, mut coefficients: Vec<UniPoly>) -> Result<Self> {
        if coefficients.iter().all(|q| q.is_zero()) {
            return Err(Error::Precondition("annihilator coefficients are all zero".into()));
        }
        while coefficients.len() > 2 && coefficients.last().is_some_and(|q| q.is_zero()) {
            coefficients.pop();
        }
        while coefficients.len() < 2 {
            coefficients.push(UniPoly::zero(field));
        }
        let r = coefficients.len() - 1;
        let p = BigUint::from(field.p());
        Ok(OreAnnihilator {
            field,
            degree_bound: p.pow(r as u32),
            height_bound: BigUint::from(r * r) * p.pow(r as u32 + 1),
            coefficients,
            verified_to_order: 0,
            verified: false,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn r(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[UniPoly] {
        &self.coefficients
    }

    pub fn max_degree(&self) -> usize {
        self.coefficients.iter().filter_map(|q| q.degree()).max().unwrap_or(0)
    }

    /// Default verification order `4 (r + 1)(max deg Q_i + 1)`, at least `floor`.
    pub fn default_verify_order(&self, floor: usize) -> usize {
        (4 * (self.r() + 1) * (self.max_degree() + 1)).max(floor)
    }

    /// Checks `Σ Q_i(x) g(x^{p^i}) ≡ 0 mod x^{order}` (in characteristic p,
    /// `g^{p^i}` is `g` with exponents dilated by `p^i`).
    pub fn verify(&self, g: &TruncatedSeries, order: usize) -> Result<Verification> {
        if g.nvars() != 1 {
            return Err(Error::DimMismatch {
                expected: 1,
                got: g.nvars(),
            });
        }
        if g.order() < order {
            return Err(Error::InsufficientPrecision {
                needed: order,
                available: g.order(),
            });
        }
        let f = self.field;
        let gc = g.coeffs();
        let mut residue = vec![0u32; order];
        let p = f.p() as usize;
        let mut step = 1usize;
        for q in &self.coefficients {
            if !q.is_zero() {
                let mut n = 0usize;
                while n * step < order {
                    let a = gc[n];
                    if a != 0 {
                        let base = n * step;
                        for (k, &c) in q.coeffs().iter().enumerate() {
                            if base + k >= order {
                                break;
                            }
                            if c != 0 {
                                residue[base + k] = f.add(residue[base + k], f.mul(a, c));
                            }
                        }
                    }
                    n += 1;
                }
            }
            step = step.saturating_mul(p);
        }
        Ok(match residue.iter().position(|&c| c != 0) {
            Some(k) => Verification::Residue { order: k },
            None => Verification::Pass { order },
        })
    }

    /// Runs [`verify`](Self::verify) and records the outcome; a residue is
    /// reported as `E_VERIFY_FAIL`.
    pub fn certify(&mut self, g: &TruncatedSeries, order: usize) -> Result<()> {
        match self.verify(g, order)? {
            Verification::Pass { order } => {
                self.verified = true;
                self.verified_to_order = order;
                Ok(())
            }
            Verification::Residue { order } => {
                self.verified = false;
                Err(Error::VerifyFail { order })
            }
        }
    }

    pub fn to_json(&self) -> String {
        let j = AnnihilatorJson {
            p: self.field.p() as u64,
            r: self.r(),
            coefficients: self.coefficients.iter().map(|q| q.coeffs().to_vec()).collect(),
            degree_bound: self.degree_bound.to_string(),
            height_bound: self.height_bound.to_string(),
            verified_to_order: self.verified_to_order,
        };
        serde_json::to_string_pretty(&j).expect("annihilator serializes")
    }

    /// Loads an annihilator; the result is unverified until
    /// [`certify`](Self::certify) succeeds again.
    pub fn from_json(text: &str) -> Result<Self> {
        let j: AnnihilatorJson = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let field = PrimeField::new(j.p)?;
        if j.coefficients.len() != j.r + 1 {
            return Err(Error::Format("coefficient count must be r + 1".into()));
        }
        let coeffs = j.coefficients.into_iter().map(|c| UniPoly::new(field, c)).collect();
        let mut a = OreAnnihilator::new(field, coeffs)?;
        a.verified_to_order = j.verified_to_order;
        Ok(a)
    }
}

/// Adjugate of a square polynomial matrix.
fn adjugate(m: &[Vec<UniPoly>], field: PrimeField) -> Vec<Vec<UniPoly>> {
    let n = m.len();
    let one = UniPoly::one(field);
    if n == 1 {
        return vec![vec![one]];
    }
    let mut adj = vec![vec![UniPoly::zero(field); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<UniPoly>> = (0..n)
                .filter(|&a| a != i)
                .map(|a| (0..n).filter(|&b| b != j).map(|b| m[a][b].clone()).collect())
                .collect();
            let d = det(&minor, &one);
            // adj[j][i] = (-1)^{i+j} M_ij
            adj[j][i] = if (i + j) % 2 == 0 { d } else { d.neg() };
        }
    }
    adj
}

fn row_times(row: &[UniPoly], m: &[Vec<UniPoly>], field: PrimeField) -> Vec<UniPoly> {
    (0..m.len())
        .map(|k| {
            row.iter()
                .zip(m)
                .fold(UniPoly::zero(field), |acc, (a, mrow)| acc.add(&a.mul(&mrow[k])))
        })
        .collect()
}

/// Ore-form annihilator of `Δ(R)` mod p, verified against the exact diagonal
/// at order `max(4 (r+1)(max deg + 1), opts.min_verify_order)`.
pub fn find_annihilator(r: &RationalFunction, opts: &AnnihilatorOptions) -> Result<(OreAnnihilator, KernelBasis)> {
    let kb = kernel_basis(r, opts)?;
    let field = kb.field;
    let mut ann = if kb.rank() == 0 {
        // the diagonal vanishes: Y itself annihilates it
        OreAnnihilator::new(field, vec![UniPoly::one(field), UniPoly::zero(field)])?
    } else {
        let rank = kb.rank();
        let a = &kb.matrix;
        let det_a = det(a, &UniPoly::one(field));
        if det_a.is_zero() {
            return Err(Error::SingularA);
        }
        let p = field.p() as u128;
        let max_entry = a.iter().flatten().filter_map(|e| e.degree()).max().unwrap_or(0) as u128;
        let needed = (rank as u128) * (max_entry + 1) * p.checked_pow(rank as u32).unwrap_or(u128::MAX);
        if needed > DEGREE_CEILING {
            return Err(Error::Budget {
                needed,
                ceiling: DEGREE_CEILING,
            });
        }
        let adj = adjugate(a, field);
        let dets: Vec<UniPoly> = (0..rank)
            .map(|k| det_a.dilate((field.p() as usize).pow(k as u32)))
            .collect();
        let mut e1 = vec![UniPoly::zero(field); rank];
        e1[0] = UniPoly::one(field);
        let mut rows = Vec::with_capacity(rank + 1);
        // U_0 = e1^T and U_{i+1}(x) = U_i(x^p) adj(A(x)), so that
        // g(x^{p^i}) = U_i v(x) / prod_{k<i} det A(x^{p^k})
        let mut prefix = e1;
        for i in 0..=rank {
            let tail = dets[i..].iter().fold(UniPoly::one(field), |acc, d| acc.mul(d));
            rows.push(prefix.iter().map(|e| e.mul(&tail)).collect::<Vec<_>>());
            if i < rank {
                let twisted: Vec<UniPoly> = prefix.iter().map(|e| e.dilate(field.p() as usize)).collect();
                prefix = row_times(&twisted, &adj, field);
            }
        }
        let q = bounded_dependence(field, &rows);
        OreAnnihilator::new(field, q)?
    };
    let order = ann.default_verify_order(opts.min_verify_order);
    let g = TruncatedSeries::univariate(field, kb.dfao.sequence(order));
    ann.certify(&g, order)?;
    Ok((ann, kb))
}
