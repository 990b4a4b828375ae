//! Univariate rationalization: an algebraic series `f(x)` over F_p, given by
//! a polynomial `P(x, Y)` and enough leading coefficients to pick the root,
//! is written as the diagonal of a rational function `R(x, y)`.

use serde_json::{json, Value};

use crate::bounds::{bound_rationalization, BoundConfig};
use crate::diagonal::diagonal_full;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::resultant_wrt_last;
use crate::poly::MultiPoly;
use crate::rational::RationalFunction;
use crate::series::series_expand;
use crate::unipoly::UniPoly;

/// A root of `P(x, Y) = 0` in F_p[[x]], identified by a prefix of its
/// coefficients. The polynomial is stored in two variables `(x, Y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicSeriesSpec {
    poly: MultiPoly,
    prefix: Vec<u32>,
}

impl AlgebraicSeriesSpec {
    pub fn new(poly: MultiPoly, prefix: Vec<u32>) -> Result<Self> {
        poly.check_nvars(2)?;
        if poly.is_zero() {
            return Err(Error::Precondition("defining polynomial is zero".into()));
        }
        if prefix.is_empty() {
            return Err(Error::Precondition("empty series prefix".into()));
        }
        let f = poly.field();
        let prefix: Vec<u32> = prefix.into_iter().map(|c| c % f.p()).collect();
        let n = prefix.len();
        let residue = eval_in_y(&y_coeffs(&poly), &UniPoly::new(f, prefix.clone()), n);
        if !residue.is_zero() {
            return Err(Error::Precondition(format!(
                "prefix is not a root of P modulo x^{n}"
            )));
        }
        Ok(AlgebraicSeriesSpec { poly, prefix })
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn field(&self) -> PrimeField {
        self.poly.field()
    }

    /// Degree in `Y`.
    pub fn degree(&self) -> u32 {
        self.poly.degree_in(1).unwrap_or(0)
    }

    /// Largest `x`-degree among the coefficients of the powers of `Y`.
    pub fn height(&self) -> u32 {
        self.poly.degree_in(0).unwrap_or(0)
    }
}

fn y_coeffs(p: &MultiPoly) -> Vec<UniPoly> {
    p.coeffs_in_last().iter().map(UniPoly::from_multi).collect()
}

/// `sum_k c_k(x) g^k mod x^n` by Horner.
fn eval_in_y(coeffs: &[UniPoly], g: &UniPoly, n: usize) -> UniPoly {
    let f = g.field();
    coeffs
        .iter()
        .rev()
        .fold(UniPoly::zero(f), |acc, c| acc.mul_trunc(g, n).add(&c.truncate(n)))
}

/// Power-series inverse modulo `x^n`; the constant term must be nonzero.
fn inverse_series(a: &UniPoly, n: usize) -> UniPoly {
    let f = a.field();
    let a0 = f.inv(a.coeff(0)).expect("unit constant term");
    let mut b = UniPoly::constant(f, a0);
    let two = UniPoly::constant(f, 2 % f.p());
    let mut prec = 1;
    while prec < n {
        prec = (2 * prec).min(n);
        let ab = a.truncate(prec).mul_trunc(&b, prec);
        b = b.mul_trunc(&two.sub(&ab), prec);
    }
    b
}

/// Order at `x = 0` of the resultant of `P` and `∂P/∂Y`.
pub fn shift_order(poly: &MultiPoly) -> Result<usize> {
    poly.check_nvars(2)?;
    let dp = poly.derivative(1);
    if dp.is_zero() {
        return Err(Error::Inseparable);
    }
    let res = resultant_wrt_last(poly, &dp)?;
    if res.is_zero() {
        return Err(Error::ResultantZero);
    }
    Ok(res.degree_in_min(0).unwrap() as usize)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftDecomposition {
    /// `i` in `f = Q + x^i g`.
    pub shift: usize,
    /// `Q`, of degree at most `i`.
    pub poly_part: UniPoly,
    /// `g` modulo `x^order`, with `g(0) = 0`.
    pub tail: Vec<u32>,
    /// `P(x, Q + x^i Y)` with its power of `x` removed; `g` is a root.
    pub tail_poly: MultiPoly,
}

/// Splits `f = Q(x) + x^i g(x)` so that `g` satisfies the hypotheses of
/// [`furstenberg`]; `g` is lifted from the prefix to `order` coefficients.
pub fn shift_decompose(spec: &AlgebraicSeriesSpec, order: usize) -> Result<ShiftDecomposition> {
    let f = spec.field();
    let i = shift_order(&spec.poly)?;
    if spec.prefix.len() <= i {
        return Err(Error::InsufficientPrecision {
            needed: i + 1,
            available: spec.prefix.len(),
        });
    }
    let q = UniPoly::new(f, spec.prefix[..=i].to_vec());
    // Y -> Q(x) + x^i Y
    let image = q
        .to_multi()
        .extend_vars(2)
        .add(&MultiPoly::monomial(f, vec![i as u32, 1], 1));
    let sub = spec
        .poly
        .substitute(&[MultiPoly::var(f, 2, 0), image], 2);
    let c = sub.degree_in_min(0).unwrap_or(0);
    let p1 = sub.div_monomial(&[c, 0]);
    if p1.coeff(&[0, 0]) != 0 {
        return Err(Error::Precondition("prefix does not select a root of P".into()));
    }
    if p1.derivative(1).coeff(&[0, 0]) == 0 {
        return Err(Error::Precondition(
            "shifted polynomial is singular at the origin".into(),
        ));
    }
    let g = lift_root(&p1, order.max(1))?;
    // leading coefficients beyond Q must agree with the lifted tail
    for (k, &c) in spec.prefix.iter().enumerate().skip(i + 1) {
        if k - i < g.len() && g[k - i] != c {
            return Err(Error::Precondition(format!(
                "prefix coefficient {k} disagrees with the lifted root"
            )));
        }
    }
    Ok(ShiftDecomposition {
        shift: i,
        poly_part: q,
        tail: g,
        tail_poly: p1,
    })
}

/// Newton iteration for the unique root `g` with `g(0) = 0` of a polynomial
/// whose `Y`-derivative is a unit at the origin.
fn lift_root(p1: &MultiPoly, n: usize) -> Result<Vec<u32>> {
    let f = p1.field();
    let coeffs = y_coeffs(p1);
    let deriv = y_coeffs(&p1.derivative(1));
    let mut g = UniPoly::zero(f);
    let mut prec = 1;
    while prec < n {
        prec = (2 * prec).min(n);
        let value = eval_in_y(&coeffs, &g, prec);
        let slope = eval_in_y(&deriv, &g, prec);
        if slope.coeff(0) == 0 {
            return Err(Error::Precondition("derivative vanishes at the root".into()));
        }
        g = g.sub(&value.mul_trunc(&inverse_series(&slope, prec), prec));
    }
    let mut out = g.into_coeffs();
    out.resize(n, 0);
    Ok(out)
}

/// `R(x, y) = y^2 ∂P/∂Y(xy, y) / P(xy, y)`, whose diagonal is `g`. The
/// common factor `y` is cancelled so the denominator is a unit.
pub fn furstenberg(p1: &MultiPoly, g: &[u32]) -> Result<RationalFunction> {
    p1.check_nvars(2)?;
    let f = p1.field();
    if g.first().copied().unwrap_or(0) != 0 {
        return Err(Error::Precondition("root must vanish at 0".into()));
    }
    let dp = p1.derivative(1);
    if p1.coeff(&[0, 0]) != 0 || dp.coeff(&[0, 0]) == 0 {
        return Err(Error::Precondition(
            "need P(0,0) = 0 and a nonzero Y-derivative at the origin".into(),
        ));
    }
    let n = g.len();
    if n > 0 && !eval_in_y(&y_coeffs(p1), &UniPoly::new(f, g.to_vec()), n).is_zero() {
        return Err(Error::Precondition("series is not a root of P".into()));
    }
    let images = [
        MultiPoly::monomial(f, vec![1, 1], 1),
        MultiPoly::var(f, 2, 1),
    ];
    let num = dp
        .substitute(&images, 2)
        .mul(&MultiPoly::monomial(f, vec![0, 2], 1));
    let den = p1.substitute(&images, 2);
    let r = RationalFunction::new(num, den)?;
    if n > 1 {
        let d = diagonal_full(&series_expand(&r, n)?, n)?;
        if d.coeffs() != g {
            return Err(Error::CertFail("diagonal of R differs from the root".into()));
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub height_budget: u64,
    pub height_actual: u32,
    pub verified_to_order: usize,
    pub shift: usize,
    pub poly_part: UniPoly,
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        json!({
            "heightBudget": self.height_budget,
            "heightActual": self.height_actual,
            "verifiedToOrder": self.verified_to_order,
            "shift": {"i": self.shift, "polyPart": self.poly_part.coeffs()},
        })
    }
}

/// Produces `R` with `Δ(R) = f`, checked coefficientwise to `m_check` and
/// against the height bound `N(1, d, h)`.
pub fn rationalize_univariate(
    spec: &AlgebraicSeriesSpec,
    m_check: usize,
) -> Result<(RationalFunction, Certificate)> {
    let f = spec.field();
    let m_check = m_check.max(spec.prefix.len()).max(1);
    let dec = shift_decompose(spec, m_check)?;
    let i = dec.shift;
    let t = furstenberg(&dec.tail_poly, &dec.tail)?;
    // R = Q(xy) + (xy)^i T over T's denominator
    let xy = |e: usize, c: u32| MultiPoly::monomial(f, vec![e as u32, e as u32], c);
    let q_xy = dec
        .poly_part
        .coeffs()
        .iter()
        .enumerate()
        .fold(MultiPoly::zero(f, 2), |acc, (e, &c)| acc.add(&xy(e, c)));
    let num = q_xy
        .mul(t.denominator())
        .add(&xy(i, 1).mul(t.numerator()));
    let r = RationalFunction::new(num, t.denominator().clone())?;

    let mut expected: Vec<u32> = (0..m_check).map(|n| dec.poly_part.coeff(n)).collect();
    for (k, &c) in dec.tail.iter().enumerate().skip(1) {
        if i + k < m_check {
            expected[i + k] = f.add(expected[i + k], c);
        }
    }
    let diag = diagonal_full(&series_expand(&r, m_check)?, m_check)?;
    if diag.coeffs() != expected.as_slice() {
        let n = diag
            .coeffs()
            .iter()
            .zip(&expected)
            .position(|(a, b)| a != b)
            .unwrap();
        return Err(Error::CertFail(format!("diagonal differs at x^{n}")));
    }
    let d = u64::from(spec.degree().max(1));
    let h = u64::from(spec.height().max(1));
    let budget = bound_rationalization(&BoundConfig::default(), 1, d, h)?
        .value
        .to_u64()
        .expect("N(1,d,h) is small for univariate input");
    if u64::from(r.height()) > budget {
        return Err(Error::CertFail(format!(
            "height {} exceeds the bound {budget}",
            r.height()
        )));
    }
    let cert = Certificate {
        height_budget: budget,
        height_actual: r.height(),
        verified_to_order: m_check,
        shift: i,
        poly_part: dec.poly_part,
    };
    Ok((r, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational_in;

    fn poly(text: &str, p: u64) -> MultiPoly {
        parse_rational_in(text, p, Some(2)).unwrap().numerator().clone()
    }

    fn field(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    /// Root of `Y^2 = x^2 (1 - x)` starting `x - x^2/2`.
    fn sqrt_spec(p: u64) -> AlgebraicSeriesSpec {
        let k = field(p);
        let half = k.neg(k.inv(2).unwrap());
        AlgebraicSeriesSpec::new(poly("y^2 - x^2 + x^3", p), vec![0, 1, half]).unwrap()
    }

    #[test]
    fn shift_step_for_square_root() {
        let dec = shift_decompose(&sqrt_spec(7), 20).unwrap();
        assert_eq!(dec.shift, 2);
        assert_eq!(dec.poly_part.coeffs(), &[0, 1, 3]);
        // 4 x Y^2 + (8 - 4x) Y + x up to the unit 4
        let expected = poly("4*x*y^2 + (8 - 4*x)*y + x", 7);
        let scale = field(7).inv(expected.coeff(&[1, 0])).unwrap();
        let got = dec.tail_poly.scale(field(7).inv(dec.tail_poly.coeff(&[1, 0])).unwrap());
        assert_eq!(got, expected.scale(scale));
        assert_eq!(dec.tail[0], 0);
    }

    #[test]
    fn shift_order_examples() {
        assert_eq!(shift_order(&poly("y^2 - x", 3)).unwrap(), 1);
        assert_eq!(shift_order(&poly("(1-x)*y - x", 5)).unwrap(), 0);
        assert_eq!(shift_order(&poly("y^5 - x", 5)).unwrap_err(), Error::Inseparable);
        assert_eq!(
            shift_order(&poly("(y - x)^2", 5)).unwrap_err(),
            Error::ResultantZero
        );
    }

    #[test]
    fn furstenberg_linear() {
        let p1 = poly("y - x", 5);
        let r = furstenberg(&p1, &[0, 1, 0, 0, 0]).unwrap();
        let expected = parse_rational_in("y/(1-x)", 5, Some(2)).unwrap();
        assert_eq!(r, expected);
        let bad = poly("y^2 - x", 5);
        assert_eq!(furstenberg(&bad, &[0]).unwrap_err().code(), "E_PRECONDITION");
    }

    #[test]
    fn square_root_round_trip() {
        for p in [5, 7, 11] {
            let (r, cert) = rationalize_univariate(&sqrt_spec(p), 120).unwrap();
            assert_eq!(cert.height_budget, 109);
            assert!(cert.height_actual <= 109);
            assert_eq!(r.nvars(), 2);
        }
    }

    #[test]
    fn rational_input() {
        let spec = AlgebraicSeriesSpec::new(poly("(1-x)*y - x", 7), vec![0, 1]).unwrap();
        let (_, cert) = rationalize_univariate(&spec, 50).unwrap();
        assert_eq!(cert.shift, 0);
        assert_eq!(cert.height_budget, 8);
    }

    #[test]
    fn bad_prefix_rejected() {
        let err = AlgebraicSeriesSpec::new(poly("y^2 - x^2 + x^3", 7), vec![0, 2, 0]).unwrap_err();
        assert_eq!(err.code(), "E_PRECONDITION");
    }
}
