use proptest::prelude::*;
use tracerec_core::{
    detect_nec_violations, evaluate_events, is_levenshtein_sufficient, is_subsequence, maximal_runs,
    patterns_from_runs, prob_e2bar_exact_mgf, run_decompose, sample_traces, AnalyticT, BitString, ClassSpecQ,
    ClassSpecS, Reconstruction, RngSpec,
};

fn plain(traces: &[tracerec_core::MaskedTrace]) -> Vec<BitString> {
    traces.iter().map(|t| t.trace.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn implications_hold_on_random_sources(
        bits in prop::collection::vec(any::<bool>(), 1..13),
        p in 0.05f64..0.95,
        count in 1usize..5,
        seed in any::<u64>(),
    ) {
        let s = BitString::from_bits(bits);
        let profile = run_decompose(&s).unwrap();
        let spans: Vec<_> = profile
            .run_ranges()
            .into_iter()
            .map(|r| tracerec_core::PatternSpan { offset: r.start, period: 1, copies: r.len() })
            .collect();
        let traces = sample_traces(&s, p, count, &mut RngSpec::new(seed).stream(0)).unwrap();
        let events = evaluate_events(&traces, &spans, &profile);
        let texts = plain(&traces);
        let verdict = is_levenshtein_sufficient(&s, &texts).unwrap();
        if events.e1_holds.iter().any(|h| !h) {
            prop_assert!(!verdict.sufficient);
        }
        if events.e2.holds {
            prop_assert_eq!(maximal_runs(s.len(), &texts), Reconstruction::Success(s.clone()));
        }
        for v in detect_nec_violations(&s, &traces, &patterns_from_runs(&profile)).unwrap() {
            prop_assert_eq!(v.alternative.len(), s.len());
            prop_assert!(v.alternative != s);
            prop_assert!(texts.iter().all(|t| is_subsequence(t, &v.alternative)));
            prop_assert!(!verdict.sufficient);
        }
    }
}

#[test]
fn e2_implies_reconstruction_at_scale() {
    let class = ClassSpecS::new(true, vec![0.1, 0.2, 0.3, 0.15, 0.25]).unwrap();
    let s = class.instance(200).unwrap();
    let profile = class.profile(200).unwrap();
    let mut held = 0;
    for trial in 0..200 {
        let traces = sample_traces(&s, 0.01, 20, &mut RngSpec::new(17).stream(trial)).unwrap();
        let e2 = evaluate_events(&traces, &[], &profile).e2;
        if e2.holds {
            held += 1;
            assert!(maximal_runs(200, &plain(&traces)).is_success_for(&s));
        }
    }
    assert!(held > 50, "E2 held in {held} of 200 trials");
}

#[test]
fn e2_frequency_matches_exact_on_block_instance() {
    let class = ClassSpecQ::new("011".parse().unwrap(), 0.25, 1.0).unwrap();
    let (s, _) = class.instance(16).unwrap();
    let profile = run_decompose(&s).unwrap();
    let lengths: Vec<u64> = profile.lengths().iter().map(|&l| l as u64).collect();
    let (p, t, trials) = (0.2, 6usize, 40_000u64);
    let mut misses = 0u64;
    for trial in 0..trials {
        let traces = sample_traces(&s, p, t, &mut RngSpec::new(3).stream(trial)).unwrap();
        if !evaluate_events(&traces, &[], &profile).e2.holds {
            misses += 1;
        }
    }
    let exact = prob_e2bar_exact_mgf(&lengths, p, AnalyticT::Count(t as u64)).unwrap().value;
    let est = misses as f64 / trials as f64;
    let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!((est - exact).abs() <= 4.0 * sigma, "{est} vs {exact}");
}
