use num_bigint::BigUint;
use proptest::prelude::*;

use diagrat_core::automaton::{synthesize_dfao, Dfao};
use diagrat_core::bounds::{BoundConfig, BoundValue, Tower};
use diagrat_core::cartier::{frobenius_decompose, DEFAULT_MAX_STATES};
use diagrat_core::diagonal::diagonal_full;
use diagrat_core::rational::parse_rational_in;
use diagrat_core::survey::{lucas_check_sequence, LucasOutcome};
use diagrat_core::{series_expand, MultiPoly, PrimeField, RationalFunction, TruncatedSeries};

const PRIMES: [u64; 4] = [2, 3, 5, 7];

fn poly(p: u64, nvars: usize, max_exp: u32, terms: usize) -> impl Strategy<Value = MultiPoly> {
    let f = PrimeField::new(p).unwrap();
    prop::collection::vec(
        (prop::collection::vec(0..=max_exp, nvars), 0..f.p()),
        0..=terms,
    )
    .prop_map(move |ts| MultiPoly::from_terms(f, nvars, ts))
}

/// Rational function with denominator `1 + (terms without constant)`.
fn rational(p: u64, nvars: usize) -> impl Strategy<Value = RationalFunction> {
    (poly(p, nvars, 2, 4), poly(p, nvars, 2, 4)).prop_map(move |(num, tail)| {
        let f = num.field();
        let tail = tail.sub(&MultiPoly::constant(f, nvars, tail.constant_term()));
        let den = MultiPoly::one(f, nvars).add(&tail);
        RationalFunction::new(num, den).unwrap()
    })
}

fn prime_and_rational(max_vars: usize) -> impl Strategy<Value = RationalFunction> {
    (prop::sample::select(&PRIMES[..]), 1..=max_vars).prop_flat_map(|(p, m)| rational(p, m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_times_denominator_is_numerator(r in prime_and_rational(3)) {
        let order = 6;
        let s = series_expand(&r, order).unwrap();
        let lhs = s.mul_poly(r.denominator());
        let rhs = TruncatedSeries::from_poly(r.numerator(), order).unwrap();
        prop_assert_eq!(lhs.coeffs(), rhs.coeffs());
    }

    #[test]
    fn frobenius_parts_reassemble(
        (p, g) in prop::sample::select(&PRIMES[..])
            .prop_flat_map(|p| (Just(p), 1usize..=3))
            .prop_flat_map(|(p, m)| (Just(p), poly(p, m, 3 * p as u32 + 2, 10)))
    ) {
        let parts = frobenius_decompose(&g);
        prop_assert_eq!(parts.reassemble(), g.clone());
        for (j, _) in parts.iter() {
            prop_assert!(j.iter().all(|&d| (d as u64) < p));
        }
    }

    #[test]
    fn automaton_matches_series_diagonal(r in prime_and_rational(2)) {
        let dfao = synthesize_dfao(&r, DEFAULT_MAX_STATES).unwrap();
        let n = 24;
        let d = diagonal_full(&series_expand(&r, n).unwrap(), n).unwrap();
        prop_assert_eq!(dfao.sequence(n), d.coeffs().to_vec());
    }

    #[test]
    fn minimize_and_json_preserve_sequence(r in prime_and_rational(2)) {
        let dfao = synthesize_dfao(&r, DEFAULT_MAX_STATES).unwrap();
        let min = dfao.minimize();
        prop_assert!(min.len() <= dfao.len());
        let canon = min.canonical();
        let back = Dfao::from_json(&canon.to_json()).unwrap();
        prop_assert_eq!(&back, &canon);
        prop_assert_eq!(min.minimize().len(), min.len());
        let n = 200;
        prop_assert_eq!(back.sequence(n), dfao.sequence(n));
    }

    #[test]
    fn render_parse_round_trip(r in prime_and_rational(3)) {
        let p = r.field().p() as u64;
        let back = parse_rational_in(&r.render(), p, Some(r.nvars())).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn lucas_sequences_split_under_frobenius(
        p in prop::sample::select(&[3u64, 5, 7][..]),
        digits in prop::collection::vec(0u32..7, 7),
    ) {
        // a(n) = prod a_0(n_i) over base-p digits n_i has the Lucas property,
        // and then the series factors as A_0(x) A(x^p).
        let f = PrimeField::new(p).unwrap();
        let mut a0: Vec<u32> = digits.iter().take(p as usize).map(|&c| c % f.p()).collect();
        a0[0] = 1;
        let len = (p * p * p) as usize;
        let seq: Vec<u32> = (0..len)
            .map(|mut n| {
                let mut v = 1;
                while n > 0 {
                    v = f.mul(v, a0[n % p as usize]);
                    n /= p as usize;
                }
                v
            })
            .collect();
        prop_assert_eq!(lucas_check_sequence(&seq, p, len / p as usize, p as usize).unwrap(), LucasOutcome::Pass);
        for n in 0..len {
            let (q, r) = (n / p as usize, n % p as usize);
            prop_assert_eq!(seq[n], f.mul(a0[r], seq[q]));
        }
    }

    #[test]
    fn tower_operations_are_monotone(a in 1.0f64..1e6, b in 1.0f64..1e6, k in 0.0f64..10.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (tl, th) = (Tower::small(lo), Tower::small(hi));
        let c = Tower::small(k + 1.0);
        prop_assert!(tl.add(c) <= th.add(c));
        prop_assert!(tl.mul(c) <= th.mul(c));
        prop_assert!(tl.pow(c) <= th.pow(c));
        prop_assert!(c.pow(tl) <= c.pow(th));
        prop_assert!(tl.exp2().exp2() <= th.exp2().exp2());
    }

    #[test]
    fn tower_dominates_exact(base in 2u64..50, e in 1u64..40, m in 1u64..1000) {
        let exact = BoundConfig::default();
        let tower = BoundConfig::log2_only();
        let run = |cfg: &BoundConfig| -> BoundValue {
            let x = cfg.pow_u64(&cfg.int(base), e).unwrap();
            let y = cfg.mul_u64(&x, m).unwrap();
            cfg.add(&y, &cfg.int(m)).unwrap()
        };
        let v = run(&exact);
        let t = run(&tower);
        let value = BigUint::from(base).pow(e as u32) * m + m;
        prop_assert_eq!(v.exact(), Some(&value));
        prop_assert!(v.cmp_bound(&t) != std::cmp::Ordering::Greater);
        let bits = value.bits() as f64;
        prop_assert!(t.log2_upper().top() >= bits - 1.0);
    }
}
