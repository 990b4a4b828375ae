use diagrat_core::diagonal::diagonal_full;
use diagrat_core::series_expand;
use diagrat_core::survey::{
    degree_survey, family_coefficients, frobenius_factor_check, lucas_check, FrobeniusOutcome,
    LucasOutcome, SequenceFamily, SurveyOptions,
};

fn via_diagonal(fam: &SequenceFamily, n: usize, p: u64) -> Vec<u32> {
    let r = fam.rational(p).unwrap();
    diagonal_full(&series_expand(&r, n).unwrap(), n).unwrap().coeffs().to_vec()
}

#[test]
fn multinomial_matches_simplex_diagonal() {
    for p in [3, 5, 7] {
        for r in 1..=7 {
            let fam = SequenceFamily::MultinomialCentral(r);
            assert_eq!(family_coefficients(&fam, 8, p).unwrap(), via_diagonal(&fam, 8, p), "f{r} mod {p}");
        }
    }
}

#[test]
fn other_families_match_their_rational_functions() {
    let fams = [
        SequenceFamily::BinomialPower(1),
        SequenceFamily::BinomialPower(2),
        SequenceFamily::BinomialPower(3),
        SequenceFamily::Catalan,
        SequenceFamily::RsSum(2),
    ];
    for p in [3, 5, 7] {
        for fam in &fams {
            assert_eq!(family_coefficients(fam, 8, p).unwrap(), via_diagonal(fam, 8, p), "{fam} mod {p}");
        }
    }
}

#[test]
fn lucas_pass_implies_frobenius_pass() {
    let fams = [
        SequenceFamily::BinomialPower(1),
        SequenceFamily::BinomialPower(2),
        SequenceFamily::MultinomialCentral(3),
        SequenceFamily::Catalan,
        SequenceFamily::RsSum(2),
    ];
    for p in [2, 3, 5, 7] {
        for fam in &fams {
            let n_cap = 20;
            let lucas = lucas_check(fam, p, n_cap, p as usize).unwrap();
            let frob = frobenius_factor_check(fam, p, n_cap * p as usize).unwrap();
            match (lucas, frob) {
                (LucasOutcome::Pass, FrobeniusOutcome::Pass { .. }) => {}
                (LucasOutcome::Counterexample { n, j }, FrobeniusOutcome::Fail { order }) => {
                    assert_eq!(order, p as usize * n + j, "{fam} mod {p}")
                }
                (l, f) => panic!("{fam} mod {p}: {l:?} vs {f:?}"),
            }
        }
    }
}

#[test]
fn rs_sum_survey_row() {
    let recs = degree_survey(&SequenceFamily::RsSum(2), &[7], &SurveyOptions::default()).unwrap();
    let rec = &recs[0];
    assert!(rec.incomplete.is_none());
    assert!(rec.respects_cap());
    assert!(rec.rank.unwrap() >= 1);
    assert!((rec.lower_ref.unwrap() - 7.0).abs() < 1e-9);
}
