use wiretap_commit::adversary::{
    binding_attack, concealment_exact, concealment_monte_carlo, enumerate_confusables,
    view_leakage_exact, BindingMode, View,
};
use wiretap_commit::bits::BitVector;
use wiretap_commit::channel::{ChannelConfig, CouplingKind};
use wiretap_commit::protocol::{commit_phase, ParamsSpec, Privacy, ProtocolParams};
use wiretap_commit::rng::Streams;

fn params(n: usize, (p, q): (f64, f64), alpha1: f64, l_g: usize, coupling: CouplingKind, r: Option<f64>) -> ProtocolParams {
    ParamsSpec {
        n,
        privacy: Privacy::One,
        alpha1,
        beta1: 0.1,
        beta2: 0.2,
        commit_bits: Some(1),
        challenge_bits: Some(l_g),
    }
    .derive(&ChannelConfig { p, q, coupling, r })
    .unwrap()
}

#[test]
fn longer_challenge_shrinks_confusable_sets_per_trial() {
    // Paired seeds draw the same seed prefix, so the l+1 matrix extends the
    // l matrix and the cosets are nested.
    let runs: Vec<_> = (4..=10)
        .map(|l| {
            let p = params(14, (0.25, 0.3), 0.125, l, CouplingKind::Independent, None);
            binding_attack(&p, &p.channel(), BindingMode::Alone, 200, 11).unwrap()
        })
        .collect();
    for w in runs.windows(2) {
        for (a, b) in w[0].trials.iter().zip(&w[1].trials) {
            assert!(b.confusable <= a.confusable);
            assert!(b.hash_consistent <= a.hash_consistent);
            assert!(!b.pair_exists || a.pair_exists);
        }
        assert!(w[1].success_rate() <= w[0].success_rate());
    }
}

#[test]
fn square_challenge_only_fails_through_rank_deficiency() {
    let p = params(12, (0.25, 0.3), 0.125, 12, CouplingKind::Independent, None);
    let run = binding_attack(&p, &p.channel(), BindingMode::Alone, 300, 12).unwrap();
    for t in &run.trials {
        if t.hash_consistent == 1 {
            assert!(!t.success && !t.pair_exists);
        }
    }
    assert!(run.trials.iter().any(|t| t.hash_consistent == 1));
}

#[test]
fn eta_hat_and_flag_follow_measured_sets() {
    let p = params(14, (0.25, 0.3), 0.125, 3, CouplingKind::Independent, None);
    let run = binding_attack(&p, &p.channel(), BindingMode::Alone, 100, 13).unwrap();
    let mean = run.trials.iter().map(|t| t.confusable as f64).sum::<f64>() / 100.0;
    assert!((run.eta_hat - mean.log2() / 14.0).abs() < 1e-12);
    // Three challenge bits cannot outweigh hundreds of confusable strings.
    assert!(!run.challenge_exceeds_confusion());
    assert!(run.report.reference_bound == 1.0);
}

#[test]
fn honest_opening_is_confusable_when_in_band() {
    let p = params(12, (0.25, 0.3), 0.2, 4, CouplingKind::Independent, None);
    let ch = p.channel();
    for t in 0..30 {
        let mut rngs = Streams::new(14, t).parties();
        let c = BitVector::random(1, &mut rngs.alice);
        let s = commit_phase(&p, &c, &ch, &mut rngs).unwrap();
        let set = enumerate_confusables(&s, &p).unwrap();
        let d = s.alice_view().x.hamming_distance(s.bob_view().y).unwrap();
        assert_eq!(set.contains(s.alice_view().x), p.band_contains(d));
        assert!(set.len() <= 1 << 12);
    }
}

#[test]
fn nested_noise_leaks_less_than_independent_noise() {
    let (pq, l_g) = ((0.2, 0.25), 1);
    let ind = params(6, pq, 0.1, l_g, CouplingKind::Independent, None);
    let nested = params(6, pq, 0.1, l_g, CouplingKind::Custom, Some(0.2));
    let degraded = params(6, pq, 0.1, l_g, CouplingKind::Degraded, None);

    let e_ind = concealment_exact(&ind, &ind.channel()).unwrap();
    let e_nested = concealment_exact(&nested, &nested.channel()).unwrap();
    let e_deg = concealment_exact(&degraded, &degraded.channel()).unwrap();
    assert!(e_nested.bob_eve.sd <= e_ind.bob_eve.sd);
    assert!(e_nested.bob_eve.mi <= e_ind.bob_eve.mi);
    // Single-receiver views only see the marginals.
    assert_eq!(e_nested.bob, e_ind.bob);
    // Z adds nothing once Y is known.
    assert!((e_deg.bob_eve.sd - e_deg.bob.sd).abs() < 1e-12);
    assert!((e_deg.bob_eve.mi - e_deg.bob.mi).abs() < 1e-12);

    let mc_ind = concealment_monte_carlo(&ind, &ind.channel(), View::BobEve, 50_000, 15, false).unwrap();
    let mc_nested = concealment_monte_carlo(&nested, &nested.channel(), View::BobEve, 50_000, 15, false).unwrap();
    let sigma = mc_ind.std_error.hypot(mc_nested.std_error);
    assert!(mc_nested.advantage <= mc_ind.advantage + 3.0 * sigma);
}

#[test]
fn joint_view_dominates_each_single_view() {
    for (coupling, r) in [(CouplingKind::Independent, None), (CouplingKind::Custom, Some(0.05))] {
        let p = params(5, (0.15, 0.3), 0.1, 2, coupling, r);
        let e = concealment_exact(&p, &p.channel()).unwrap();
        assert!(e.eve.mi <= e.bob_eve.mi);
        assert!(e.bob.mi <= e.bob_eve.mi);
        assert!(e.eve.sd <= e.bob_eve.sd + 1e-12);
        assert!(e.bob.sd <= e.bob_eve.sd + 1e-12);
    }
}

#[test]
fn exact_reports_are_flagged_exact() {
    let p = params(4, (0.25, 0.3), 0.1, 1, CouplingKind::Independent, None);
    let l = view_leakage_exact(&p, &p.channel(), View::Eve).unwrap();
    let r = l.sd_report(&p);
    assert!(r.exact);
    assert_eq!(r.metric, "sd_eve");
    assert_eq!(r.estimate, l.sd);
    let mc = concealment_monte_carlo(&p, &p.channel(), View::Eve, 1000, 1, false).unwrap();
    assert!(!mc.report.exact);
}
