mod common;

use headshadow::analysis::{BimodalStage, Chain, IldCurve, Processing};
use headshadow::bimodal::VocoderParams;
use headshadow::dsp::signals::{default_localization_stimulus, rng};
use headshadow::experiments::*;
use headshadow::spatial::{HrtfSet, SphericalHeadModel};
use headshadow::{CiSide, Condition};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

use common::FS;

fn linear_template() -> IldCurve {
    let angles = frontal_grid();
    let ild = angles.iter().map(|&a| a as f64 / 10.0).collect();
    IldCurve::new(angles, ild, "t", "t").unwrap()
}

/// Nearest-angle search written independently of the library.
fn brute_localize(angles: &[i32], ild: &[f64], obs: f64) -> i32 {
    let mut idx: Vec<usize> = (0..angles.len()).collect();
    idx.sort_by(|&a, &b| {
        (ild[a] - obs)
            .abs()
            .total_cmp(&(ild[b] - obs).abs())
            .then(angles[a].abs().cmp(&angles[b].abs()))
            .then(angles[a].cmp(&angles[b]))
    });
    angles[idx[0]]
}

#[test]
fn observer_matches_brute_force_monte_carlo() {
    let t = linear_template();
    let mut r = rand_chacha::ChaCha20Rng::seed_from_u64(5);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut se_lib = 0.0;
    let mut se_ref = 0.0;
    let n = 10_000;
    for i in 0..n {
        let target = t.angles[i % t.angles.len()];
        let obs = target as f64 / 10.0 + noise.sample(&mut r);
        se_lib += (ideal_observer_localize(&t, obs) - target).pow(2) as f64;
        se_ref += (brute_localize(&t.angles, &t.ild, obs) - target).pow(2) as f64;
    }
    let (a, b) = ((se_lib / n as f64).sqrt(), (se_ref / n as f64).sqrt());
    assert!((a / b - 1.0).abs() < 0.05, "{a} vs {b}");
}

fn bimodal() -> Chain {
    Chain::natural().with_bimodal(BimodalStage::new(
        CiSide::Left,
        VocoderParams::localization(),
    ))
}

#[test]
fn perfect_observer_is_exact_with_and_without_rove() {
    let set = HrtfSet::synthetic(FS).unwrap();
    let stim = default_localization_stimulus(FS, 1).unwrap();
    for rove_db in [0.0, 10.0] {
        let cfg = LocalizationConfig {
            ild_noise_sigma: 0.0,
            rove_db,
            processing: Processing::Enhanced,
            trials_per_angle: 2,
            ..Default::default()
        };
        let r = run_localization_experiment(&cfg, &set, &bimodal(), &stim).unwrap();
        assert_eq!(r.metrics.mean_rms, 0.0, "rove {rove_db}");
        assert_eq!(r.trials.len(), 26);
        if rove_db > 0.0 {
            assert!(r.trials.iter().any(|t| t.rove_db.abs() > 1.0));
            for t in &r.trials {
                let reference = r.template.at(t.target).unwrap();
                assert!((t.ild - reference).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn localization_is_deterministic() {
    let set = HrtfSet::synthetic(FS).unwrap();
    let stim = default_localization_stimulus(FS, 1).unwrap();
    let cfg = LocalizationConfig {
        trials_per_angle: 2,
        ..Default::default()
    };
    let a = run_localization_experiment(&cfg, &set, &bimodal(), &stim).unwrap();
    let b = run_localization_experiment(&cfg, &set, &bimodal(), &stim).unwrap();
    assert_eq!(a, b);
}

#[test]
fn localization_config_is_validated() {
    let set = HrtfSet::synthetic(FS).unwrap();
    let stim = default_localization_stimulus(FS, 1).unwrap();
    let cfg = LocalizationConfig {
        angles: vec![0, 30],
        ..Default::default()
    };
    let e = run_localization_experiment(&cfg, &set, &bimodal(), &stim).unwrap_err();
    assert!(e.is_validation());
}

#[test]
fn enhancement_lowers_localization_error_with_bright_spot() {
    let set = SphericalHeadModel::default()
        .with_bright_spot(10.0)
        .full_circle(FS)
        .unwrap();
    let stim = default_localization_stimulus(FS, 1).unwrap();
    let run = |p| {
        let cfg = LocalizationConfig {
            processing: p,
            trials_per_angle: 30,
            ..Default::default()
        };
        run_localization_experiment(&cfg, &set, &bimodal(), &stim)
            .unwrap()
            .metrics
            .mean_rms
    };
    let nat = run(Processing::Natural);
    let enh = run(Processing::Enhanced);
    assert!(enh < nat, "{enh} vs {nat}");
}

#[test]
fn sentence_scores_follow_the_psychometric_function() {
    let l = SimulatedListener::default();
    let mut r = rng(3);
    for snr in [l.srt50 - 2.0, l.srt50, l.srt50 + 2.0] {
        let n = 100_000;
        let mean = (0..n).map(|_| sentence_score(&l, snr, &mut r)).sum::<f64>() / n as f64;
        assert!((mean - l.probability(snr)).abs() < 0.01, "{snr}: {mean}");
    }
}

#[test]
fn stochastic_listener_srt_is_unbiased() {
    for slope in [0.1, 0.15, 0.25] {
        let l = SimulatedListener {
            srt50: -6.0,
            slope,
            ..Default::default()
        };
        let mut r = rng(11);
        let runs = 200;
        let mean = (0..runs)
            .map(|_| {
                run_adaptive_srt(&AdaptiveTrack::default(), &l, 0.0, &mut r)
                    .unwrap()
                    .srt
            })
            .sum::<f64>()
            / runs as f64;
        assert!((mean + 6.0).abs() < 1.0, "slope {slope}: {mean}");
    }
}

#[test]
fn deterministic_listener_is_tracked() {
    let track = AdaptiveTrack::default();
    let s0 = -4.3;
    let res = track.run(|snr| if snr >= s0 { 1.0 } else { 0.0 }).unwrap();
    assert!((res.srt - s0).abs() <= 2.0);
}

#[test]
fn srt_improvements_are_ordered() {
    let set = HrtfSet::synthetic(FS).unwrap();
    let cfg = SrtConfig {
        runs: 100,
        ..Default::default()
    };
    let res = run_srt_experiment(&cfg, &set).unwrap();
    let imp = |c| res.summary_for(c).unwrap().improvement;
    let (ci, ha, surround) = (
        imp(Condition::S0NCI),
        imp(Condition::S0NHA),
        imp(Condition::S0N360),
    );
    assert!(ci > ha && ha > surround.abs(), "{ci} {ha} {surround}");
    assert!(surround.abs() < 1.5);
    assert_eq!(res.runs.len(), 3 * 2 * 100);
    let eff = |c, p| {
        res.snr
            .iter()
            .find(|s| s.condition == c && s.processing == p)
            .unwrap()
            .effective
            .better_ear
    };
    let gain = |c| eff(c, Processing::Enhanced) - eff(c, Processing::Natural);
    assert!(gain(Condition::S0NCI) > gain(Condition::S0NHA));
    assert!(gain(Condition::S0NHA) > gain(Condition::S0N360));
}
