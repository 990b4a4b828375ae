//! Explicit degree and height bounds for diagonals and their rationalization.
//!
//! Values are kept as exact big integers while they fit a bit budget. Past
//! that they become a [`Tower`]: an upper bound of the form
//! `2^2^...^t` with a floating-point top, every operation rounding upward.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub const DEFAULT_BIT_BUDGET: u64 = 1 << 20;

const LIFT: f64 = 18_446_744_073_709_551_616.0; // 2^64

fn up(x: f64) -> f64 {
    if x > 0.0 {
        x * (1.0 + 4.0 * f64::EPSILON)
    } else {
        x
    }
}

fn log2_up(x: f64) -> f64 {
    if x <= 1.0 {
        0.0
    } else {
        up(x.log2())
    }
}

/// `exp2` iterated `height` times on `top`. Normalized so that `top <= 2^64`,
/// and `top > 64` whenever `height >= 1`; comparison is then lexicographic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tower {
    height: u32,
    top: f64,
}

impl Tower {
    pub fn new(height: u32, top: f64) -> Self {
        assert!(top >= 0.0 && top.is_finite(), "tower top must be finite");
        Tower { height, top }.normalize()
    }

    pub fn small(x: f64) -> Self {
        Tower::new(0, x)
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    fn normalize(mut self) -> Self {
        loop {
            if self.top > LIFT {
                self.top = up(self.top.log2());
                self.height += 1;
            } else if self.height > 0 && self.top <= 64.0 {
                self.top = up(self.top.exp2());
                self.height -= 1;
            } else {
                return self;
            }
        }
    }

    fn is_zero(&self) -> bool {
        self.height == 0 && self.top == 0.0
    }

    /// Upper bound on `log2` (values below 1 map to 0).
    pub fn log2(self) -> Tower {
        if self.height > 0 {
            Tower {
                height: self.height - 1,
                top: self.top,
            }
        } else {
            Tower::small(log2_up(self.top))
        }
    }

    pub fn exp2(self) -> Tower {
        Tower::new(self.height + 1, self.top)
    }

    pub fn add(self, other: Tower) -> Tower {
        let (hi, lo) = if self.key_cmp(&other) == Ordering::Less {
            (other, self)
        } else {
            (self, other)
        };
        match hi.height {
            0 => Tower::small(up(hi.top + lo.top)),
            1 => {
                let y = match lo.height {
                    0 if lo.top == 0.0 => return hi,
                    0 => lo.top.log2(),
                    _ => lo.top,
                };
                let x = hi.top;
                Tower::new(1, up(x + up((y - x).exp2()).ln_1p() / std::f64::consts::LN_2))
            }
            // lo <= hi, so the sum is at most 2 hi
            _ => hi.log2().add(Tower::small(1.0)).exp2(),
        }
    }

    pub fn mul(self, other: Tower) -> Tower {
        if self.is_zero() || other.is_zero() {
            return Tower::small(0.0);
        }
        if self.height == 0 && other.height == 0 {
            return Tower::small(up(self.top * other.top));
        }
        self.log2().add(other.log2()).exp2()
    }

    pub fn pow(self, e: Tower) -> Tower {
        if e.is_zero() {
            return Tower::small(1.0);
        }
        if self.height == 0 && self.top <= 1.0 {
            return self;
        }
        e.mul(self.log2()).exp2()
    }

    fn key_cmp(&self, other: &Tower) -> Ordering {
        self.height
            .cmp(&other.height)
            .then(self.top.partial_cmp(&other.top).unwrap())
    }
}

impl PartialOrd for Tower {
    fn partial_cmp(&self, other: &Tower) -> Option<Ordering> {
        Some(self.key_cmp(other))
    }
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for _ in 0..self.height {
            write!(f, "2^")?;
        }
        if self.top >= 1e9 {
            write!(f, "{:.6e}", self.top)
        } else if self.top.fract() == 0.0 {
            write!(f, "{}", self.top)
        } else {
            write!(f, "{:.4}", self.top)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundValue {
    Exact(BigUint),
    Approx(Tower),
}

impl BoundValue {
    pub fn from_u64(v: u64) -> Self {
        BoundValue::Exact(BigUint::from(v))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, BoundValue::Exact(_))
    }

    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            BoundValue::Exact(v) => Some(v),
            BoundValue::Approx(_) => None,
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.exact().and_then(|v| v.to_u64())
    }

    /// Upper bound on `log2` of the value.
    pub fn log2_upper(&self) -> Tower {
        match self {
            BoundValue::Approx(t) => t.log2(),
            BoundValue::Exact(v) => {
                let bits = v.bits();
                if bits <= 64 {
                    Tower::small(log2_up(v.to_f64().unwrap()))
                } else {
                    let lead = (v >> (bits - 64)).to_u64().unwrap();
                    Tower::small(up((bits - 64) as f64 + log2_up(lead as f64 + 1.0)))
                }
            }
        }
    }

    pub fn to_tower(&self) -> Tower {
        match self {
            BoundValue::Approx(t) => *t,
            BoundValue::Exact(v) if v.bits() <= 64 => Tower::small(up(v.to_f64().unwrap())),
            BoundValue::Exact(_) => self.log2_upper().exp2(),
        }
    }

    /// Ordering of the represented upper bounds.
    pub fn cmp_bound(&self, other: &BoundValue) -> Ordering {
        match (self, other) {
            (BoundValue::Exact(a), BoundValue::Exact(b)) => a.cmp(b),
            _ => self.to_tower().key_cmp(&other.to_tower()),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            BoundValue::Exact(v) => json!({
                "mode": "exact",
                "value": v.to_string(),
                "log2": self.log2_upper().to_string(),
            }),
            BoundValue::Approx(t) => json!({
                "mode": "log2",
                "log2": t.log2().to_string(),
            }),
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Exact(v) if v.bits() <= 200 => write!(f, "{v}"),
            BoundValue::Exact(v) => write!(f, "{}-bit integer, log2 <= {}", v.bits(), self.log2_upper()),
            BoundValue::Approx(t) => write!(f, "log2 <= {}", t.log2()),
        }
    }
}

/// Arithmetic on bound values under a bit budget. When a result would need
/// more bits than the budget it is either approximated (the default) or
/// rejected with [`Error::BitBudget`] when `strict` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundConfig {
    pub bit_budget: u64,
    pub strict: bool,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            bit_budget: DEFAULT_BIT_BUDGET,
            strict: false,
        }
    }
}

impl BoundConfig {
    /// Everything beyond 64-bit size goes straight to towers.
    pub fn log2_only() -> Self {
        BoundConfig {
            bit_budget: 0,
            strict: false,
        }
    }

    fn overflow(&self, needed_bits: u128, fallback: impl FnOnce() -> Tower) -> Result<BoundValue> {
        if self.strict {
            Err(Error::BitBudget {
                needed_bits,
                budget: self.bit_budget,
            })
        } else {
            Ok(BoundValue::Approx(fallback()))
        }
    }

    fn fits(&self, bits: u128) -> bool {
        bits <= self.bit_budget.max(64) as u128
    }

    pub fn int(&self, v: u64) -> BoundValue {
        BoundValue::from_u64(v)
    }

    pub fn add(&self, a: &BoundValue, b: &BoundValue) -> Result<BoundValue> {
        if let (BoundValue::Exact(x), BoundValue::Exact(y)) = (a, b) {
            let bits = x.bits().max(y.bits()) as u128 + 1;
            if self.fits(bits) {
                return Ok(BoundValue::Exact(x + y));
            }
            return self.overflow(bits, || a.to_tower().add(b.to_tower()));
        }
        self.overflow(u128::MAX, || a.to_tower().add(b.to_tower()))
    }

    pub fn mul(&self, a: &BoundValue, b: &BoundValue) -> Result<BoundValue> {
        if let (BoundValue::Exact(x), BoundValue::Exact(y)) = (a, b) {
            let bits = x.bits() as u128 + y.bits() as u128;
            if self.fits(bits) {
                return Ok(BoundValue::Exact(x * y));
            }
            return self.overflow(bits, || a.to_tower().mul(b.to_tower()));
        }
        self.overflow(u128::MAX, || a.to_tower().mul(b.to_tower()))
    }

    pub fn pow(&self, a: &BoundValue, e: &BoundValue) -> Result<BoundValue> {
        if let BoundValue::Exact(x) = a {
            if x.is_zero() || x.is_one() {
                let zero_exp = matches!(e, BoundValue::Exact(v) if v.is_zero());
                return Ok(self.int(if zero_exp { 1 } else { x.to_u64().unwrap() }));
            }
            if let BoundValue::Exact(k) = e {
                let needed = k
                    .to_u64()
                    .map(|k| (k as u128).saturating_mul(x.bits() as u128))
                    .unwrap_or(u128::MAX);
                if self.fits(needed) {
                    let k = k.to_u64().unwrap();
                    return Ok(BoundValue::Exact(num_traits::pow(x.clone(), k as usize)));
                }
                return self.overflow(needed, || a.to_tower().pow(e.to_tower()));
            }
        }
        self.overflow(u128::MAX, || a.to_tower().pow(e.to_tower()))
    }

    /// `a - k`, floored at zero. Approximate values are left as they are,
    /// which stays an upper bound.
    pub fn sub_small(&self, a: &BoundValue, k: u64) -> BoundValue {
        match a {
            BoundValue::Exact(x) => {
                let k = BigUint::from(k);
                BoundValue::Exact(if *x > k { x - k } else { BigUint::zero() })
            }
            BoundValue::Approx(_) => a.clone(),
        }
    }

    pub fn add_u64(&self, a: &BoundValue, k: u64) -> Result<BoundValue> {
        self.add(a, &self.int(k))
    }

    pub fn mul_u64(&self, a: &BoundValue, k: u64) -> Result<BoundValue> {
        self.mul(a, &self.int(k))
    }

    pub fn pow_u64(&self, a: &BoundValue, k: u64) -> Result<BoundValue> {
        self.pow(a, &self.int(k))
    }

    /// `C(n + k, k)` for a small `k`.
    pub fn binomial_top(&self, n: &BoundValue, k: u64) -> Result<BoundValue> {
        if let BoundValue::Exact(x) = n {
            let bits = (x.bits() as u128 + 64) * k as u128;
            if self.fits(bits) {
                let mut acc = BigUint::one();
                for i in 1..=k {
                    acc = acc * (x + BigUint::from(i)) / BigUint::from(i);
                }
                return Ok(BoundValue::Exact(acc));
            }
            if self.strict {
                return self.overflow(bits, || unreachable!());
            }
        } else if self.strict {
            return self.overflow(u128::MAX, || unreachable!());
        }
        let t = n.to_tower();
        let approx = if t.height == 0 {
            let mut acc = 1.0f64;
            for i in 1..=k {
                acc = up(up(acc * up(t.top + i as f64)) / i as f64);
            }
            Tower::small(acc)
        } else {
            t.add(Tower::small(k as f64)).pow(Tower::small(k as f64))
        };
        Ok(BoundValue::Approx(approx))
    }
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeHeight {
    pub degree: BigUint,
    pub height: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumProductBounds {
    pub sum: DegreeHeight,
    pub product: DegreeHeight,
}

/// Degree and height of a sum and of a product of `m` algebraic series with
/// the given degrees and heights, the coefficients of the sum's summands
/// having degree at most `dc`.
pub fn bound_sum_product(degrees: &[u64], heights: &[u64], dc: u64) -> Result<SumProductBounds> {
    if degrees.is_empty() || degrees.len() != heights.len() {
        return Err(Error::Precondition(
            "need the same positive number of degrees and heights".into(),
        ));
    }
    let m = big(degrees.len() as u64);
    let prod: BigUint = degrees.iter().map(|&d| big(d)).product();
    let hmax = big(*heights.iter().max().unwrap());
    Ok(SumProductBounds {
        sum: DegreeHeight {
            degree: prod.clone(),
            height: &m * &prod * (&hmax + big(dc)),
        },
        product: DegreeHeight {
            degree: prod.clone(),
            height: m * prod * hmax,
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValuationTailBounds {
    /// Cap on `|ν|`.
    pub nu_cap: BoundValue,
    /// Height after multiplying by `x_n^{-ν}`.
    pub shifted_height: BoundValue,
    pub coeff_degree: BoundValue,
    pub coeff_height: BoundValue,
    pub tail_degree: BoundValue,
    pub tail_height: BoundValue,
}

/// Valuation cap, and degree/height of the first `k` coefficients in the
/// last variable and of the remaining tail.
pub fn bound_valuation_and_tails(
    cfg: &BoundConfig,
    d: u64,
    h: u64,
    k: u64,
) -> Result<ValuationTailBounds> {
    if d == 0 {
        return Err(Error::Precondition("degree must be at least 1".into()));
    }
    let (dv, hv) = (cfg.int(d), cfg.int(h));
    let two = cfg.int(2);
    let eight_k = cfg.pow_u64(&cfg.int(8), k.saturating_add(1))?;
    let two_k = cfg.pow_u64(&two, k)?;
    let two_k1 = cfg.mul_u64(&two_k, 2)?;
    let two_k2 = cfg.mul_u64(&two_k, 4)?;
    let coeff_height = cfg.mul(&cfg.mul(&eight_k, &cfg.pow(&dv, &two_k2)?)?, &hv)?;
    let tail_height = cfg.mul(
        &cfg.mul(&eight_k, &cfg.pow(&dv, &cfg.mul_u64(&two_k1, 3)?)?)?,
        &hv,
    )?;
    Ok(ValuationTailBounds {
        nu_cap: hv.clone(),
        shifted_height: cfg.mul_u64(&hv, d + 1)?,
        coeff_degree: cfg.pow(&dv, &two_k)?,
        coeff_height,
        tail_degree: cfg.pow(&dv, &two_k1)?,
        tail_height,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    /// Number of variables at this level of the recursion.
    pub level: u64,
    pub symbol: &'static str,
    pub value: BoundValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RationalizationBound {
    pub n: u64,
    pub d: u64,
    pub h: u64,
    pub trace: Vec<TraceStep>,
    pub value: BoundValue,
}

/// `N(n, d, h)`: height of a rational function whose half diagonal is a
/// given algebraic series in `n` variables of degree `d` and height `h`.
pub fn bound_rationalization(cfg: &BoundConfig, n: u64, d: u64, h: u64) -> Result<RationalizationBound> {
    if n == 0 || d == 0 || h == 0 {
        return Err(Error::Precondition("n, d and h must all be at least 1".into()));
    }
    let mut trace = Vec::new();
    let value = rationalization_level(cfg, n, &cfg.int(d), &cfg.int(h), &mut trace)?;
    if !value.is_exact() {
        log::warn!("N({n},{d},{h}) exceeds the bit budget; reporting a log2 bound");
    }
    Ok(RationalizationBound { n, d, h, trace, value })
}

fn rationalization_level(
    cfg: &BoundConfig,
    n: u64,
    d: &BoundValue,
    h: &BoundValue,
    trace: &mut Vec<TraceStep>,
) -> Result<BoundValue> {
    let mut record = |symbol: &'static str, value: &BoundValue| {
        trace.push(TraceStep {
            level: n,
            symbol,
            value: value.clone(),
        })
    };
    // h d (2d-1)(2d+1), shared by N(1) and M
    let two_d = cfg.mul_u64(d, 2)?;
    let hd = cfg.mul(h, d)?;
    let hd_odd = cfg.mul(&hd, &cfg.sub_small(&two_d, 1))?;
    let core = cfg.mul(&hd_odd, &cfg.add_u64(&two_d, 1)?)?;
    if n == 1 {
        let tail = cfg.mul(&cfg.mul_u64(h, 2)?, &cfg.add_u64(d, 1)?)?;
        let value = cfg.add_u64(&cfg.add(&core, &tail)?, 1)?;
        record("N", &value);
        return Ok(value);
    }
    let m = cfg.add_u64(&cfg.add(&core, &cfg.mul_u64(&hd, 2)?)?, 1)?;
    record("M", &m);
    let two = cfg.int(2);
    let two_pow = cfg.pow(&two, &hd_odd)?;
    let d0 = cfg.pow(d, &cfg.sub_small(&two_pow, 1))?;
    record("d0", &d0);
    let h0_exp = cfg.mul(&cfg.mul(&cfg.mul_u64(&cfg.mul(d, d)?, 8)?, h)?, &two_pow)?;
    let h0 = cfg.pow(d, &h0_exp)?;
    record("h0", &h0);
    let m2 = cfg.mul(&m, &m)?;
    let s = cfg.pow(&d0, &m2)?;
    let m1 = cfg.mul(&cfg.sub_small(&m, 1), &s)?;
    record("M1", &m1);
    let e1 = cfg.mul(&cfg.add_u64(&d0, 1)?, &m2)?;
    let d1 = cfg.pow(&d0, &e1)?;
    record("d1", &d1);
    let m_pow = cfg.pow(&m, &cfg.mul_u64(&s, 2)?)?;
    let big_factor = cfg.pow(&d0, &cfg.mul(&e1, &m_pow)?)?;
    let h1 = [big_factor, s.clone(), cfg.pow(&d0, &s)?, h0]
        .iter()
        .try_fold(m_pow, |acc, f| cfg.mul(&acc, f))?;
    record("h1", &h1);
    let inner = rationalization_level(cfg, n - 1, &d1, &h1, trace)?;
    let value = cfg.add(&cfg.mul_u64(&cfg.sub_small(h, 1), 2)?, &inner)?;
    trace.push(TraceStep {
        level: n,
        symbol: "N",
        value: value.clone(),
    });
    Ok(value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinalBound {
    pub rationalization: RationalizationBound,
    pub p: u64,
    /// `A = C(N + 2n, N)`.
    pub a: BoundValue,
    /// `p^A`.
    pub degree_cap: BoundValue,
    /// `A^2 p^(A+1)`.
    pub height_cap: BoundValue,
}

/// Degree and height caps for the reduction mod `p` of the diagonal of a
/// rational function in `2n` variables coming from an algebraic series of
/// degree `d` and height `h` in `n` variables.
pub fn bound_final(cfg: &BoundConfig, n: u64, d: u64, h: u64, p: u64) -> Result<FinalBound> {
    let rationalization = bound_rationalization(cfg, n, d, h)?;
    let a = cfg.binomial_top(&rationalization.value, 2 * n)?;
    let pv = cfg.int(p);
    let degree_cap = cfg.pow(&pv, &a)?;
    let height_cap = cfg.mul(&cfg.mul(&a, &a)?, &cfg.pow(&pv, &cfg.add_u64(&a, 1)?)?)?;
    Ok(FinalBound {
        rationalization,
        p,
        a,
        degree_cap,
        height_cap,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalLiftCaps {
    pub total_degree: BoundValue,
    pub coeff_degree: BoundValue,
    pub coeff_height: BoundValue,
}

/// Caps on the two-variable rational function produced from one algebraic
/// series of degree `d` and height `h`: total degree of numerator and
/// denominator, and degree/height of its coefficients.
pub fn diagonal_lift_caps(cfg: &BoundConfig, d: u64, h: u64) -> Result<DiagonalLiftCaps> {
    let (dv, hv) = (cfg.int(d), cfg.int(h));
    let odd = cfg.mul_u64(&hv, (2 * d).saturating_sub(1))?;
    let total = cfg.add_u64(
        &cfg.add(&cfg.mul_u64(&odd, 2 * d + 1)?, &cfg.mul_u64(&hv, 2)?)?,
        1,
    )?;
    let two_pow = cfg.pow(&cfg.int(2), &odd)?;
    let coeff_degree = cfg.pow(&dv, &cfg.sub_small(&two_pow, 1))?;
    let coeff_height = cfg.pow(&dv, &cfg.mul(&cfg.mul_u64(&hv, 8 * d)?, &two_pow)?)?;
    Ok(DiagonalLiftCaps {
        total_degree: total,
        coeff_degree,
        coeff_height,
    })
}

/// Dimension `C(h + m, m)` of the invariant space for a rational function in
/// `m` variables of height `h`; the diagonal mod `p` has degree at most `p`
/// to this power.
pub fn rational_dimension(m: u64, h: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 1..=m {
        acc = acc * big(h + i) / big(i);
    }
    acc
}

/// Full report for the `bounds` subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: u64,
    pub d: u64,
    pub h: u64,
    pub p: Option<u64>,
    pub rationalization: RationalizationBound,
    pub a: BoundValue,
    pub finals: Option<(BoundValue, BoundValue)>,
    pub lift: DiagonalLiftCaps,
}

pub fn bound_report(cfg: &BoundConfig, n: u64, d: u64, h: u64, p: Option<u64>) -> Result<BoundReport> {
    let (rationalization, a, finals) = match p {
        Some(p) => {
            let f = bound_final(cfg, n, d, h, p)?;
            (f.rationalization, f.a, Some((f.degree_cap, f.height_cap)))
        }
        None => {
            let r = bound_rationalization(cfg, n, d, h)?;
            let a = cfg.binomial_top(&r.value, 2 * n)?;
            (r, a, None)
        }
    };
    Ok(BoundReport {
        n,
        d,
        h,
        p,
        rationalization,
        a,
        finals,
        lift: diagonal_lift_caps(cfg, d, h)?,
    })
}

impl BoundReport {
    pub fn is_exact(&self) -> bool {
        self.rationalization.trace.iter().all(|s| s.value.is_exact())
            && self.a.is_exact()
            && self
                .finals
                .as_ref()
                .is_none_or(|(x, y)| x.is_exact() && y.is_exact())
    }

    pub fn to_json(&self) -> Value {
        let trace: Vec<Value> = self
            .rationalization
            .trace
            .iter()
            .map(|s| json!({"level": s.level, "symbol": s.symbol, "value": s.value.to_json()}))
            .collect();
        let mut out = json!({
            "inputs": {"n": self.n, "d": self.d, "h": self.h, "p": self.p},
            "mode": if self.is_exact() { "exact" } else { "log2" },
            "trace": trace,
            "N": self.rationalization.value.to_json(),
            "A": self.a.to_json(),
            "lift": {
                "totalDegree": self.lift.total_degree.to_json(),
                "coeffDegree": self.lift.coeff_degree.to_json(),
                "coeffHeight": self.lift.coeff_height.to_json(),
            },
        });
        if let Some((deg, height)) = &self.finals {
            out["degreeCap"] = deg.to_json();
            out["heightCap"] = height.to_json();
        }
        out
    }

    pub fn render_table(&self) -> String {
        let mut rows: Vec<(String, String)> = self
            .rationalization
            .trace
            .iter()
            .map(|s| (format!("{}[n={}]", s.symbol, s.level), s.value.to_string()))
            .collect();
        rows.push(("A".into(), self.a.to_string()));
        if let Some((deg, height)) = &self.finals {
            rows.push(("degree cap p^A".into(), deg.to_string()));
            rows.push(("height cap A^2 p^(A+1)".into(), height.to_string()));
        }
        rows.push(("lift total degree".into(), self.lift.total_degree.to_string()));
        rows.push(("lift coeff degree".into(), self.lift.coeff_degree.to_string()));
        rows.push(("lift coeff height".into(), self.lift.coeff_height.to_string()));
        rows.push(("N".into(), self.rationalization.value.to_string()));
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut s = format!(
            "bounds for n={} d={} h={}{}\n",
            self.n,
            self.d,
            self.h,
            self.p.map(|p| format!(" p={p}")).unwrap_or_default()
        );
        for (k, v) in rows {
            s.push_str(&format!("{k:<width$}  {v}\n"));
        }
        s
    }
}
