//! Acceptance suite: one PASS/FAIL line per criterion. Runs as a plain
//! binary (`harness = false`) and exits nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use diagrat_core::annihilator::{find_annihilator, AnnihilatorOptions, OreAnnihilator, Verification};
use diagrat_core::automaton::{synthesize_dfao, Emptiness, Finiteness, Periodicity};
use diagrat_core::bounds::{bound_final, bound_rationalization, BoundConfig, BoundValue};
use diagrat_core::cartier::{frobenius_decompose, DEFAULT_MAX_STATES};
use diagrat_core::diagonal::{diagonal_full, diagonal_half};
use diagrat_core::rationalize::{rationalize_univariate, AlgebraicSeriesSpec};
use diagrat_core::survey::{degree_survey, lucas_check, LucasOutcome, SequenceFamily, SurveyOptions};
use diagrat_core::rational::parse_rational_in;
use diagrat_core::{parse_rational, series_expand, MultiPoly, PrimeField, TruncatedSeries, UniPoly};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    }};
}

const APERY: &str = "1/(1-x1) * 1/((1-x2)*(1-x3)*(1-x4)*(1-x5) - x1*x2*x3)";
const F1: &str = "2/(2-x1-x2) * 2/(2-x3-x4)";
const CENTRAL: &str = "1/(1-x-y)";
const F6: &str = "1/(1-x1-x2-x3-x4-x5-x6)";

fn binom(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1))
}

fn field(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn random_poly(rng: &mut ChaCha8Rng, f: PrimeField) -> MultiPoly {
    let nvars = rng.gen_range(1..=3);
    let terms = rng.gen_range(0..=12);
    let max_exp = 3 * f.p() + 2;
    MultiPoly::from_terms(
        f,
        nvars,
        (0..terms).map(|_| {
            let e: Vec<u32> = (0..nvars).map(|_| rng.gen_range(0..max_exp)).collect();
            (e, rng.gen_range(0..f.p()))
        }),
    )
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for p in [2, 3, 5, 7] {
        let f = field(p);
        for i in 0..1000 {
            let g = random_poly(&mut rng, f);
            let back = frobenius_decompose(&g).reassemble();
            ensure!(back == g, "p={p} sample {i}: reassembly differs");
        }
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(10), "took {t:?}");
    Ok(())
}

fn criterion_2() -> Outcome {
    for p in [3, 5, 7, 13] {
        let f = field(p);
        let r = parse_rational(F1, p).map_err(|e| e.to_string())?;
        let d = diagonal_full(&series_expand(&r, 50).unwrap(), 50).unwrap();
        let inv16 = f.inv(16 % f.p()).unwrap();
        for n in 0..50u64 {
            let c = binom(2 * n, n);
            let expected = f.mul(f.reduce_big(&(&c * &c)), f.pow(inv16, n));
            ensure!(d.coeffs()[n as usize] == expected, "p={p} n={n}");
        }
    }
    Ok(())
}

fn apery(n: u64) -> BigUint {
    (0..=n)
        .map(|k| {
            let a = binom(n, k);
            let b = binom(n + k, k);
            &a * &a * &b * &b
        })
        .sum()
}

fn criterion_3() -> Outcome {
    let exact: Vec<BigUint> = (0..30).map(apery).collect();
    for p in [2, 3, 5, 7] {
        let f = field(p);
        let r = parse_rational(APERY, p).map_err(|e| e.to_string())?;
        let d = diagonal_full(&series_expand(&r, 30).unwrap(), 30).unwrap();
        for (n, a) in exact.iter().enumerate() {
            ensure!(d.coeffs()[n] == f.reduce_big(a), "p={p} n={n}");
        }
    }
    Ok(())
}

/// Apéry numbers by the exact three-term recurrence
/// `n^3 a(n) = (34n^3 - 51n^2 + 27n - 5) a(n-1) - (n-1)^3 a(n-2)`.
fn apery_by_recurrence(len: usize) -> Vec<BigUint> {
    let mut a = vec![BigUint::from(1u32), BigUint::from(5u32)];
    for n in 2..len as u64 {
        let c = 34 * n * n * n + 27 * n - 51 * n * n - 5;
        let next = (BigUint::from(c) * &a[n as usize - 1] - BigUint::from((n - 1).pow(3)) * &a[n as usize - 2])
            / BigUint::from(n * n * n);
        a.push(next);
    }
    a.truncate(len);
    a
}

/// Output predicted from base-5 digits: 0 if a digit 1 or 3 occurs,
/// otherwise 3^(number of 2s) mod 5.
fn digit_rule(mut n: u64) -> u32 {
    let mut twos = 0;
    while n > 0 {
        match n % 5 {
            1 | 3 => return 0,
            2 => twos += 1,
            _ => {}
        }
        n /= 5;
    }
    [1, 3, 4, 2][twos % 4]
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let r = parse_rational(APERY, 5).unwrap();
    let dfao = synthesize_dfao(&r, DEFAULT_MAX_STATES).map_err(|e| e.to_string())?.minimize();
    ensure!(dfao.len() == 5, "{} states after minimization", dfao.len());
    let mut outputs = dfao.outputs().to_vec();
    outputs.sort();
    ensure!(outputs == vec![0, 1, 2, 3, 4], "state outputs {:?}", dfao.outputs());
    let f = field(5);
    let limit = 5usize.pow(6);
    let direct = apery_by_recurrence(limit);
    for (n, a) in direct.iter().enumerate() {
        let got = dfao.evaluate(n as u64);
        ensure!(got == f.reduce_big(a), "n={n}: automaton {got}");
        ensure!(got == digit_rule(n as u64), "n={n}: digit rule");
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(60), "took {t:?}");
    Ok(())
}

fn criterion_5() -> Outcome {
    let opts = AnnihilatorOptions::default();
    for expr in [CENTRAL, F1, APERY, F6] {
        for p in [3, 5, 7] {
            let r = parse_rational(expr, p).unwrap();
            let (ann, _) = find_annihilator(&r, &opts).map_err(|e| format!("{expr} p={p}: {e}"))?;
            ensure!(ann.verified && ann.verified_to_order >= 2000, "{expr} p={p}: not verified");
            let rank = ann.r() as u64;
            let dim = binom(r.height() as u64 + r.nvars() as u64, r.nvars() as u64);
            ensure!(BigUint::from(rank) <= dim, "{expr} p={p}: rank {rank} above {dim}");
            let cap = BigUint::from(rank * rank) * BigUint::from(p).pow(rank as u32 + 1);
            ensure!(BigUint::from(ann.max_degree()) <= cap, "{expr} p={p}: degree above cap");
        }
    }
    // (1-4x) g^2 = 1 gives (1-4x)^((p-1)/2) g^p - g = 0
    for p in [3, 5, 7] {
        let f = field(p);
        let one_minus_4x = UniPoly::new(f, vec![1, f.neg(4 % f.p())]);
        let known = OreAnnihilator::new(
            f,
            vec![UniPoly::constant(f, f.neg(1)), one_minus_4x.pow((p - 1) / 2)],
        )
        .unwrap();
        let r = parse_rational(CENTRAL, p).unwrap();
        let g = synthesize_dfao(&r, DEFAULT_MAX_STATES).unwrap().sequence(2048);
        let v = known.verify(&TruncatedSeries::univariate(f, g), 2048).unwrap();
        ensure!(v == Verification::Pass { order: 2048 }, "p={p}: known relation leaves {v:?}");
        let (found, _) = find_annihilator(&r, &opts).unwrap();
        let scale = f.inv(found.coefficients()[0].coeff(0)).unwrap();
        let q1 = found.coefficients()[1].scale(f.neg(scale));
        ensure!(q1 == known.coefficients()[1], "p={p}: found relation differs");
    }
    Ok(())
}

/// `x sqrt(1-x)`: coefficient of `x^(n+1)` is `-2 Cat(n-1) / 4^n` for `n >= 1`.
fn sqrt_prefix(p: u64, len: usize) -> Vec<u32> {
    let f = field(p);
    let inv4 = f.inv(4).unwrap();
    let mut out = vec![0u32; len];
    out[1] = 1;
    for n in 1..len as u64 - 1 {
        let cat = binom(2 * n - 2, n - 1) / BigUint::from(n);
        let c = f.mul(f.neg(f.mul(2, f.reduce_big(&cat))), f.pow(inv4, n));
        out[n as usize + 1] = c;
    }
    out
}

fn criterion_6() -> Outcome {
    for p in [5, 7, 11] {
        let f = field(p);
        let poly = parse_rational_in("y^2 - x^2 + x^3", p, Some(2)).unwrap().numerator().clone();
        let half = f.neg(f.inv(2).unwrap());
        let spec = AlgebraicSeriesSpec::new(poly, vec![0, 1, half]).map_err(|e| e.to_string())?;
        let (r, cert) = rationalize_univariate(&spec, 200).map_err(|e| format!("p={p}: {e}"))?;
        let d = diagonal_half(&series_expand(&r, 200).unwrap(), 200).unwrap();
        ensure!(d.coeffs() == sqrt_prefix(p, 200).as_slice(), "p={p}: diagonal differs from x sqrt(1-x)");
        let dp = UniPoly::new(f, d.coeffs().to_vec());
        let target = UniPoly::new(f, vec![0, 0, 1, f.neg(1)]);
        ensure!(dp.mul_trunc(&dp, 200) == target, "p={p}: square is not x^2(1-x)");
        ensure!(r.height() <= 109 && cert.height_budget == 109, "p={p}: height {}", r.height());
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let cfg = BoundConfig::default();
    let n = |a, b, c| bound_rationalization(&cfg, a, b, c).unwrap().value;
    ensure!(n(1, 1, 1).to_u64() == Some(8), "N(1,1,1)");
    ensure!(n(1, 2, 3).to_u64() == Some(109), "N(1,2,3)");
    let fin = bound_final(&cfg, 1, 2, 3, 5).unwrap();
    ensure!(fin.a.to_u64() == Some(6105), "A(1,2,3)");
    let le = |a: &BoundValue, b: &BoundValue| a.cmp_bound(b) != std::cmp::Ordering::Greater;
    let log_cfg = BoundConfig::log2_only();
    for a in 1..=3u64 {
        for b in 1..=3u64 {
            for c in 1..=3u64 {
                let here = bound_final(&cfg, a, b, c, 3).unwrap();
                for (x, y, z) in [(a + 1, b, c), (a, b + 1, c), (a, b, c + 1)] {
                    if x > 3 || y > 3 || z > 3 {
                        continue;
                    }
                    let next = bound_final(&cfg, x, y, z, 3).unwrap();
                    ensure!(
                        le(&here.rationalization.value, &next.rationalization.value)
                            && le(&here.a, &next.a)
                            && le(&here.degree_cap, &next.degree_cap)
                            && le(&here.height_cap, &next.height_cap),
                        "not monotone from {:?} to {:?}",
                        (a, b, c),
                        (x, y, z)
                    );
                }
                let approx = bound_final(&log_cfg, a, b, c, 3).unwrap();
                let pairs = [
                    (&here.rationalization.value, &approx.rationalization.value),
                    (&here.a, &approx.a),
                    (&here.degree_cap, &approx.degree_cap),
                    (&here.height_cap, &approx.height_cap),
                ];
                for (e, l) in pairs {
                    let Some(v) = e.exact() else { continue };
                    if v.bits() <= 1 {
                        continue;
                    }
                    let reported = l.log2_upper();
                    ensure!(reported.height() == 0, "log2 of {:?} is itself a tower", (a, b, c));
                    let lower = (v.bits() - 1) as f64;
                    let exact_log = e.log2_upper().top();
                    ensure!(
                        reported.top() >= lower && reported.top() >= exact_log - 1e-9 && reported.top() <= exact_log + 1.0,
                        "log2 mismatch at {:?}",
                        (a, b, c)
                    );
                }
            }
        }
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let central = synthesize_dfao(&parse_rational(CENTRAL, 2).unwrap(), DEFAULT_MAX_STATES).unwrap();
    let finite = central.decide_finiteness(1);
    ensure!(finite == Finiteness::Finite(vec![BigUint::from(0u32)]), "b=1: {finite:?}");
    let periodic = central.decide_periodicity(0, 4, 4);
    ensure!(periodic == Periodicity::Periodic { period: 1, preperiod: 1 }, "b=0: {periodic:?}");
    let apery = synthesize_dfao(&parse_rational(APERY, 5).unwrap(), DEFAULT_MAX_STATES).unwrap();
    match apery.decide_finiteness(0) {
        Finiteness::Infinite { witness, .. } => ensure!(witness == BigUint::from(1u32), "witness {witness}"),
        other => return Err(format!("Apéry b=0: {other:?}")),
    }
    ensure!(
        apery.decide_emptiness(0) == Emptiness::Witness(BigUint::from(1u32)),
        "Apéry least zero"
    );
    Ok(())
}

fn criterion_9() -> Outcome {
    for p in [3, 5, 7] {
        for fam in [SequenceFamily::BinomialPower(1), SequenceFamily::MultinomialCentral(6)] {
            let out = lucas_check(&fam, p, 50, 50).map_err(|e| e.to_string())?;
            ensure!(out == LucasOutcome::Pass, "{fam} p={p}: {out:?}");
        }
    }
    let cat = lucas_check(&SequenceFamily::Catalan, 2, 50, 50).unwrap();
    ensure!(cat == LucasOutcome::Counterexample { n: 1, j: 0 }, "Catalan: {cat:?}");
    Ok(())
}

fn criterion_10() -> Outcome {
    let primes = [7, 11, 13];
    let recs = degree_survey(&SequenceFamily::MultinomialCentral(6), &primes, &SurveyOptions::default())
        .map_err(|e| e.to_string())?;
    ensure!(recs.len() == 3, "{} records", recs.len());
    for (rec, p) in recs.iter().zip(primes) {
        ensure!(rec.p == p, "row order");
        ensure!(rec.incomplete.is_none(), "p={p} incomplete: {:?}", rec.incomplete);
        ensure!(rec.rank.is_some_and(|r| r >= 1), "p={p}: no rank");
        ensure!(rec.respects_cap(), "p={p}: degree above cap");
        let lower = rec.lower_ref.ok_or("no lower reference")?;
        ensure!((lower - (p as f64).sqrt()).abs() < 1e-9, "p={p}: lower ref {lower}");
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Frobenius decomposition identity", criterion_1),
        ("four-variable example vs 16^-n C(2n,n)^2", criterion_2),
        ("five-variable Apéry diagonal", criterion_3),
        ("Apéry automaton mod 5", criterion_4),
        ("annihilator soundness", criterion_5),
        ("rationalization round trip", criterion_6),
        ("bounds calculator", criterion_7),
        ("decidability fixtures", criterion_8),
        ("Lucas suite", criterion_9),
        ("degree survey", criterion_10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let t = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS {:>2} {name} ({t:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({t:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
