//! Coefficient families with the Lucas property, checks of that property,
//! and per-prime measurements of the annihilators of their diagonals.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::annihilator::{find_annihilator, AnnihilatorOptions};
use crate::bounds::rational_dimension;
use crate::diagonal::diagonal_full;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::poly::MultiPoly;
use crate::rational::{parse_rational, RationalFunction};
use crate::series::series_expand;
use crate::unipoly::UniPoly;

/// Largest `r * n_max` accepted by the exact coefficient generators.
const EXACT_INDEX_CEILING: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceFamily {
    /// `f_r`: `(rn)! / n!^r`.
    MultinomialCentral(u32),
    /// `g_r`: `C(2n, n)^r`.
    BinomialPower(u32),
    /// `f_6 + f_7 + .. + f_{6+s-1}`.
    RsSum(u32),
    Catalan,
    /// Diagonal of a rational function given as an expression.
    Custom(String),
}

impl FromStr for SequenceFamily {
    type Err = Error;

    /// `f6`, `g2`, `R1`, `catalan`, `central` (`g1`); anything else is read
    /// as a rational-function expression.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let param = |rest: &str| rest.parse::<u32>().ok().filter(|&v| v >= 1);
        if s.eq_ignore_ascii_case("catalan") {
            return Ok(SequenceFamily::Catalan);
        }
        if s.eq_ignore_ascii_case("central") {
            return Ok(SequenceFamily::BinomialPower(1));
        }
        if let Some(v) = s.strip_prefix('f').and_then(param) {
            return Ok(SequenceFamily::MultinomialCentral(v));
        }
        if let Some(v) = s.strip_prefix('g').and_then(param) {
            return Ok(SequenceFamily::BinomialPower(v));
        }
        if let Some(v) = s.strip_prefix('R').and_then(param) {
            return Ok(SequenceFamily::RsSum(v));
        }
        if s.is_empty() {
            return Err(Error::NotRealizable("empty family".into()));
        }
        Ok(SequenceFamily::Custom(s.to_string()))
    }
}

impl fmt::Display for SequenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceFamily::MultinomialCentral(r) => write!(f, "f{r}"),
            SequenceFamily::BinomialPower(r) => write!(f, "g{r}"),
            SequenceFamily::RsSum(s) => write!(f, "R{s}"),
            SequenceFamily::Catalan => write!(f, "catalan"),
            SequenceFamily::Custom(e) => write!(f, "{e}"),
        }
    }
}

fn multinomial_terms(r: u32, n_max: usize) -> Vec<BigUint> {
    let r = r as u64;
    let mut out = Vec::with_capacity(n_max);
    let mut a = BigUint::one();
    for n in 0..n_max as u64 {
        if n > 0 {
            for k in 0..r {
                a *= BigUint::from(r * n - k);
            }
            a /= BigUint::from(n).pow(r as u32);
        }
        out.push(a.clone());
    }
    out
}

impl SequenceFamily {
    pub fn kind(&self) -> &'static str {
        match self {
            SequenceFamily::MultinomialCentral(_) => "multinomial",
            SequenceFamily::BinomialPower(_) => "binomial-power",
            SequenceFamily::RsSum(_) => "rs-sum",
            SequenceFamily::Catalan => "catalan",
            SequenceFamily::Custom(_) => "custom",
        }
    }

    pub fn param(&self) -> String {
        match self {
            SequenceFamily::MultinomialCentral(v)
            | SequenceFamily::BinomialPower(v)
            | SequenceFamily::RsSum(v) => v.to_string(),
            SequenceFamily::Catalan => String::new(),
            SequenceFamily::Custom(e) => e.clone(),
        }
    }

    /// `s` for which `p^(s/2)` is the reference lower bound on the degree
    /// (`f_6` is the first sum).
    pub fn lower_ref_exponent(&self) -> Option<u32> {
        match self {
            SequenceFamily::RsSum(s) => Some(*s),
            SequenceFamily::MultinomialCentral(6) => Some(1),
            _ => None,
        }
    }

    /// Exact integer coefficients `a(0..n_max)`.
    pub fn exact_coefficients(&self, n_max: usize) -> Result<Vec<BigUint>> {
        let width: u128 = match self {
            SequenceFamily::MultinomialCentral(r) => *r as u128,
            SequenceFamily::BinomialPower(r) => 2 * *r as u128,
            SequenceFamily::RsSum(s) => 6 + *s as u128,
            SequenceFamily::Catalan => 2,
            SequenceFamily::Custom(_) => {
                return Err(Error::NotRealizable(
                    "custom families have no integer generator".into(),
                ))
            }
        };
        let needed = width * n_max as u128;
        if needed > EXACT_INDEX_CEILING {
            return Err(Error::Budget {
                needed,
                ceiling: EXACT_INDEX_CEILING,
            });
        }
        Ok(match self {
            SequenceFamily::MultinomialCentral(r) => multinomial_terms(*r, n_max),
            SequenceFamily::BinomialPower(r) => multinomial_terms(2, n_max)
                .into_iter()
                .map(|c| c.pow(*r))
                .collect(),
            SequenceFamily::RsSum(s) => {
                let mut acc = vec![BigUint::zero(); n_max];
                for r in 6..6 + s {
                    for (a, t) in acc.iter_mut().zip(multinomial_terms(r, n_max)) {
                        *a += t;
                    }
                }
                acc
            }
            SequenceFamily::Catalan => multinomial_terms(2, n_max)
                .into_iter()
                .enumerate()
                .map(|(n, c)| c / BigUint::from(n as u64 + 1))
                .collect(),
            SequenceFamily::Custom(_) => unreachable!(),
        })
    }

    /// A rational function whose diagonal is this family.
    pub fn rational(&self, p: u64) -> Result<RationalFunction> {
        let field = PrimeField::new(p)?;
        match self {
            SequenceFamily::MultinomialCentral(r) => Ok(simplex(field, *r as usize, *r as usize, *r as usize)),
            SequenceFamily::BinomialPower(r) => {
                let m = 2 * *r as usize;
                let den = (0..*r as usize).fold(MultiPoly::one(field, m), |acc, k| {
                    let pair = MultiPoly::var(field, m, 2 * k).add(&MultiPoly::var(field, m, 2 * k + 1));
                    acc.mul(&MultiPoly::one(field, m).sub(&pair))
                });
                RationalFunction::new(MultiPoly::one(field, m), den)
            }
            SequenceFamily::RsSum(s) => {
                let a = 6 + *s as usize - 1;
                let mut num = MultiPoly::zero(field, a);
                let mut den = MultiPoly::one(field, a);
                for r in 6..6 + *s as usize {
                    let term = simplex(field, a, r, a);
                    num = num.mul(term.denominator()).add(&den.mul(term.numerator()));
                    den = den.mul(term.denominator());
                }
                RationalFunction::new(num, den)
            }
            // 1 + Δ of the Furstenberg function of x Y^2 + (2x - 1) Y + x
            SequenceFamily::Catalan => parse_rational("1 + y*(2*x*y^2 + 2*x*y - 1)/(x*y^2 + 2*x*y - 1 + x)", p),
            SequenceFamily::Custom(expr) => parse_rational(expr, p),
        }
    }
}

/// `1/(1 - (x_1 + .. + x_{r-1} + x_r x_{r+1} .. x_k))` in `m` variables: its
/// diagonal in the first `k` variables is `f_r`.
fn simplex(field: PrimeField, m: usize, r: usize, k: usize) -> RationalFunction {
    let mut s = (0..r - 1).fold(MultiPoly::zero(field, m), |acc, i| acc.add(&MultiPoly::var(field, m, i)));
    let mut last = vec![0u32; m];
    for e in last.iter_mut().take(k).skip(r - 1) {
        *e = 1;
    }
    s = s.add(&MultiPoly::monomial(field, last, 1));
    RationalFunction::new(MultiPoly::one(field, m), MultiPoly::one(field, m).sub(&s)).unwrap()
}

/// `a(0..n_max)` mod `p`. Integer families are reduced from exact values;
/// custom ones are read off the diagonal.
pub fn family_coefficients(fam: &SequenceFamily, n_max: usize, p: u64) -> Result<Vec<u32>> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let field = PrimeField::new(p)?;
    match fam {
        SequenceFamily::Custom(_) => {
            let r = fam.rational(p)?;
            Ok(diagonal_full(&series_expand(&r, n_max)?, n_max)?.coeffs().to_vec())
        }
        _ => Ok(fam
            .exact_coefficients(n_max)?
            .iter()
            .map(|a| field.reduce_big(a))
            .collect()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LucasOutcome {
    Pass,
    /// `a(pn + j) != a(n) a(j)` mod p.
    Counterexample { n: usize, j: usize },
}

/// Checks `a(pn + j) = a(n) a(j)` for `n < n_cap`, `j < min(p, j_cap)` on an
/// explicit sequence, which must cover every index involved.
pub fn lucas_check_sequence(seq: &[u32], p: u64, n_cap: usize, j_cap: usize) -> Result<LucasOutcome> {
    let field = PrimeField::new(p)?;
    let p = p as usize;
    let jmax = p.min(j_cap);
    let needed = p * n_cap.saturating_sub(1) + jmax;
    if seq.len() < needed || seq.len() < jmax {
        return Err(Error::InsufficientPrecision {
            needed,
            available: seq.len(),
        });
    }
    for n in 0..n_cap {
        for j in 0..jmax {
            if seq[p * n + j] % field.p() != field.mul(seq[n] % field.p(), seq[j] % field.p()) {
                return Ok(LucasOutcome::Counterexample { n, j });
            }
        }
    }
    Ok(LucasOutcome::Pass)
}

pub fn lucas_check(fam: &SequenceFamily, p: u64, n_cap: usize, j_cap: usize) -> Result<LucasOutcome> {
    if n_cap == 0 || j_cap == 0 {
        return Err(Error::Precondition("caps must be at least 1".into()));
    }
    let len = (p as usize) * n_cap + p as usize;
    let seq = family_coefficients(fam, len, p)?;
    lucas_check_sequence(&seq, p, n_cap, j_cap)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrobeniusOutcome {
    /// `f = A(x) f(x^p)` to the checked order.
    Pass { factor: UniPoly },
    /// First exponent where the identity breaks.
    Fail { order: usize },
}

/// Checks `f(x) = A(x) f(x^p)` mod `x^m` with `A = sum_{n<p} a(n) x^n`.
pub fn frobenius_factor_check(fam: &SequenceFamily, p: u64, m: usize) -> Result<FrobeniusOutcome> {
    let field = PrimeField::new(p)?;
    let m = m.max(1);
    let seq = family_coefficients(fam, m.max(p as usize), p)?;
    let f = UniPoly::new(field, seq[..m].to_vec());
    let a = UniPoly::new(field, seq[..p as usize].to_vec());
    let rhs = a.mul_trunc(&f.dilate(p as usize).truncate(m), m);
    match (0..m).find(|&n| f.coeff(n) != rhs.coeff(n)) {
        Some(order) => Ok(FrobeniusOutcome::Fail { order }),
        None => Ok(FrobeniusOutcome::Pass { factor: a }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurveyRecord {
    pub family: String,
    pub param: String,
    pub p: u64,
    pub rank: Option<usize>,
    pub max_ore_degree: Option<usize>,
    /// `p^(s/2)` where a reference exponent exists.
    pub lower_ref: Option<f64>,
    /// `log2` of `p^C(h+m, m)`, the degree cap for a rational diagonal in `m`
    /// variables of height `h`.
    pub upper_ref_log2: f64,
    pub states: Option<usize>,
    pub millis: u128,
    /// Error code when the row could not be completed.
    pub incomplete: Option<&'static str>,
}

impl SurveyRecord {
    /// Measured Ore degrees stay within `r^2 p^(r+1)`.
    pub fn respects_cap(&self) -> bool {
        match (self.rank, self.max_ore_degree) {
            (Some(r), Some(deg)) => {
                let cap = BigUint::from(r * r) * BigUint::from(self.p).pow(r as u32 + 1);
                BigUint::from(deg) <= cap
            }
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SurveyOptions {
    pub annihilator: AnnihilatorOptions,
    /// Record wall-clock time; off by default so output is reproducible.
    pub timing: bool,
}

/// One record per prime, in input order. Budget failures mark the row
/// incomplete; other errors abort.
pub fn degree_survey(fam: &SequenceFamily, primes: &[u64], opts: &SurveyOptions) -> Result<Vec<SurveyRecord>> {
    let rows: Vec<Result<SurveyRecord>> = std::thread::scope(|scope| {
        let handles: Vec<_> = primes
            .iter()
            .map(|&p| scope.spawn(move || survey_row(fam, p, opts)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("survey worker panicked")).collect()
    });
    rows.into_iter().collect()
}

fn survey_row(fam: &SequenceFamily, p: u64, opts: &SurveyOptions) -> Result<SurveyRecord> {
    let start = Instant::now();
    let r = fam.rational(p)?;
    let dim = rational_dimension(r.nvars() as u64, r.height() as u64)
        .to_f64()
        .unwrap_or(f64::INFINITY);
    let mut rec = SurveyRecord {
        family: fam.kind().to_string(),
        param: fam.param(),
        p,
        rank: None,
        max_ore_degree: None,
        lower_ref: fam.lower_ref_exponent().map(|s| (p as f64).powf(s as f64 / 2.0)),
        upper_ref_log2: dim * (p as f64).log2(),
        states: None,
        millis: 0,
        incomplete: None,
    };
    match find_annihilator(&r, &opts.annihilator) {
        Ok((ann, kb)) => {
            rec.rank = Some(kb.rank());
            rec.max_ore_degree = Some(ann.max_degree());
            rec.states = Some(kb.states);
        }
        Err(e) if e.class() == crate::error::ErrorClass::Budget => {
            log::warn!("survey row {fam} at p={p} incomplete: {e}");
            rec.incomplete = Some(e.code());
        }
        Err(e) => return Err(e),
    }
    if opts.timing {
        rec.millis = start.elapsed().as_millis();
    }
    Ok(rec)
}

pub const SURVEY_HEADER: [&str; 9] = [
    "family",
    "param",
    "p",
    "rank",
    "maxOreDegree",
    "lowerRef",
    "upperRefLog2",
    "states",
    "millis",
];

pub fn survey_csv(records: &[SurveyRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SURVEY_HEADER).unwrap();
    let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in records {
        w.write_record([
            r.family.clone(),
            r.param.clone(),
            r.p.to_string(),
            opt(r.rank),
            opt(r.max_ore_degree),
            r.lower_ref.map(|v| format!("{v:.4}")).unwrap_or_default(),
            format!("{:.4}", r.upper_ref_log2),
            opt(r.states),
            r.millis.to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
