//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails or overruns its time budget.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use headshadow::analysis::ild_curve;
use headshadow::analysis::{localization_metrics, BimodalStage, Chain, IldCurve, Processing};
use headshadow::beamformer::*;
use headshadow::bimodal::{design_hearing_loss, HearingLossParams, Vocoder, VocoderParams};
use headshadow::dsp::signals::{default_localization_stimulus, rng, sine, speech_shaped_noise};
use headshadow::experiments::*;
use headshadow::spatial::{HrtfSet, SphericalHeadModel};
use headshadow::{CiSide, Condition};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn comb_nulls() -> Check {
    let nulls = comb_null_frequencies(&BeamformerParams::default(), 2);
    ensure(nulls.len() == 2, format!("{nulls:?}"))?;
    ensure(
        (nulls[0] - 850.0).abs() <= 1.0 && (nulls[1] - 1700.0).abs() <= 1.0,
        format!("{nulls:?}"),
    )?;
    Ok(format!("nulls {:.1} / {:.1} Hz", nulls[0], nulls[1]))
}

fn contralateral_cancellation() -> Check {
    let p = BeamformerParams::default();
    let e = HeadShadowEnhancer::new(p, FS).map_err(|e| e.to_string())?;
    let start = 4000;
    let mut worst = f64::INFINITY;
    for f in [100.0, 300.0, 700.0, 1200.0] {
        let s = sine(FS, f, 0.5, start + FS as usize);
        let x =
            plane_wave(&s, -90.0, p.mic_spacing, p.speed_of_sound).map_err(|e| e.to_string())?;
        let b = e.process_bands(&x).map_err(|e| e.to_string())?;
        let before = tone_amplitude(b.low.right(), f, start);
        let after = tone_amplitude(b.enhanced_low.right(), f, start);
        let att = 20.0 * (before / after).log10();
        ensure(att >= 60.0, format!("{f} Hz attenuated only {att:.1} dB"))?;
        worst = worst.min(att);
    }
    Ok(format!("minimum attenuation {worst:.1} dB"))
}

fn metrics_identity() -> Check {
    let m = localization_metrics(&[(15.0, 10.0), (15.0, 20.0), (15.0, 30.0)])
        .map_err(|e| e.to_string())?;
    let a = m.per_angle[0];
    ensure(
        (a.bias - 5.0).abs() < 1e-9
            && (a.std.unwrap_or(f64::NAN) - 10.0).abs() < 1e-9
            && (a.rms_error - 9.574).abs() < 5e-4,
        format!("worked example gave {a:?}"),
    )?;
    let mut r = rng(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = r.random_range(2..40);
        let target = 15.0 * r.random_range(-6..=6) as f64;
        let trials: Vec<(f64, f64)> = (0..n)
            .map(|_| (target, r.random_range(-90.0..90.0)))
            .collect();
        let a = localization_metrics(&trials)
            .map_err(|e| e.to_string())?
            .per_angle[0];
        let nf = n as f64;
        let var = a.std.unwrap_or(0.0).powi(2) * (nf - 1.0) / nf;
        worst = worst.max((a.rms_error.powi(2) - a.bias.powi(2) - var).abs());
    }
    ensure(worst < 1e-9, format!("identity residual {worst:e}"))?;
    Ok(format!("max residual {worst:.1e}"))
}

fn hearing_loss() -> Check {
    let f = design_hearing_loss(&HearingLossParams::default(), FS).map_err(|e| e.to_string())?;
    let at_cutoff = f.magnitude_db(500.0);
    let slope = f.magnitude_db(2000.0) - f.magnitude_db(1000.0);
    ensure(
        (at_cutoff + 3.01).abs() <= 0.1,
        format!("{at_cutoff:.3} dB at 500 Hz"),
    )?;
    ensure(
        (slope + 36.0).abs() <= 2.0,
        format!("slope {slope:.2} dB/octave"),
    )?;
    // Measured on a tone as well as from the design.
    let start = 8000;
    let x = sine(FS, 1000.0, 0.5, start + FS as usize);
    let y = f.apply(&x).map_err(|e| e.to_string())?;
    let measured = 20.0 * (tone_amplitude(&y, 1000.0, start) / 0.5).log10();
    ensure(
        (measured - f.magnitude_db(1000.0)).abs() < 0.1,
        format!("tone at 1 kHz {measured:.2} dB"),
    )?;
    Ok(format!("{at_cutoff:.3} dB at 500 Hz, {slope:.2} dB/octave"))
}

fn vocoder_spectrum() -> Check {
    let x = speech_shaped_noise(FS, 10 * FS as usize, 0.05, 21).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for n in [5, 8] {
        let voc = Vocoder::new(VocoderParams::speech().with_channels(n), FS)
            .map_err(|e| e.to_string())?;
        let y = voc.process(&x).map_err(|e| e.to_string())?;
        for (k, band) in voc.bands().iter().enumerate() {
            let pin = energy(band.apply(&x).map_err(|e| e.to_string())?.samples());
            let pout = energy(band.apply(&y).map_err(|e| e.to_string())?.samples());
            let d = db(pout / pin);
            ensure(
                d.abs() <= 1.0,
                format!("{n} channels, channel {k}: {d:.2} dB"),
            )?;
            worst = worst.max(d.abs());
        }
    }
    Ok(format!("worst channel deviation {worst:.2} dB"))
}

fn directivity() -> Check {
    let p = BeamformerParams::default();
    let angles: Vec<f64> = frontal_grid().iter().map(|&a| a as f64).collect();
    let run = |band| {
        directivity_pattern(
            &p,
            band,
            &angles,
            DirectivityMode::FreeField,
            DirectivityOptions::default(),
        )
        .map_err(|e| e.to_string())
    };
    let low = run((100.0, 1500.0))?;
    let high = run((1500.0, 20_000.0))?;
    // Right ear: ipsilateral is +90, contralateral −90.
    let decreasing = low.windows(2).all(|w| w[1].enhanced_db > w[0].enhanced_db);
    ensure(
        decreasing,
        "low-band pattern is not strictly decreasing toward the contralateral side",
    )?;
    let dev = high
        .iter()
        .map(|h| (h.enhanced_db - h.natural_db).abs())
        .fold(0.0, f64::max);
    ensure(dev <= 1.0, format!("high band differs by {dev:.2} dB"))?;
    Ok(format!(
        "low band {:.1} dB (ipsi) to {:.1} dB (contra), high-band deviation {dev:.3} dB",
        low[12].enhanced_db, low[0].enhanced_db
    ))
}

fn bimodal_chain() -> Chain {
    Chain::natural().with_bimodal(BimodalStage::new(
        CiSide::Left,
        VocoderParams::localization(),
    ))
}

fn ild_curves() -> Check {
    let set = HrtfSet::synthetic(FS).map_err(|e| e.to_string())?;
    let stim = default_localization_stimulus(FS, 7).map_err(|e| e.to_string())?;
    let curve = |p| {
        ild_curve(
            &stim,
            &set,
            &bimodal_chain().with_processing(p),
            &frontal_grid(),
        )
        .map_err(|e| e.to_string())
    };
    let nat = curve(Processing::Natural)?;
    let enh = curve(Processing::Enhanced)?;
    ensure(
        enh.is_strictly_increasing(),
        format!("enhanced curve not monotonic: {:?}", enh.ild),
    )?;
    ensure(
        enh.range() > nat.range(),
        format!("range {:.2} <= {:.2}", enh.range(), nat.range()),
    )?;
    Ok(format!(
        "range {:.1} dB enhanced vs {:.1} dB natural",
        enh.range(),
        nat.range()
    ))
}

/// Nearest template ILD, ties to the smaller angle magnitude.
fn oracle_rms(template: &IldCurve, sigma: f64, trials: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut sum = 0.0;
    for (i, &target) in template.angles.iter().enumerate() {
        let mut se = 0.0;
        for _ in 0..trials {
            let noise: f64 = StandardNormal.sample(&mut r);
            let obs = template.ild[i] + sigma * noise;
            let mut best = (f64::INFINITY, 0i32);
            for (j, &a) in template.angles.iter().enumerate() {
                let d = (template.ild[j] - obs).abs();
                if d < best.0 || (d == best.0 && a.abs() < best.1.abs()) {
                    best = (d, a);
                }
            }
            se += ((best.1 - target) as f64).powi(2);
        }
        sum += (se / trials as f64).sqrt();
    }
    sum / template.angles.len() as f64
}

fn localization() -> Check {
    let set = SphericalHeadModel::default()
        .with_bright_spot(10.0)
        .full_circle(FS)
        .map_err(|e| e.to_string())?;
    let stim = default_localization_stimulus(FS, 7).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for p in Processing::BOTH {
        let cfg = LocalizationConfig {
            processing: p,
            trials_per_angle: 200,
            ild_noise_sigma: 1.0,
            seed: 5,
            ..Default::default()
        };
        let res = run_localization_experiment(&cfg, &set, &bimodal_chain(), &stim)
            .map_err(|e| e.to_string())?;
        let oracle = oracle_rms(&res.template, 1.0, 20_000 / 13 + 1, 99);
        let rel = (res.metrics.mean_rms - oracle).abs() / oracle.max(1e-9);
        ensure(
            rel <= 0.10,
            format!("{p}: {:.2} vs oracle {oracle:.2}", res.metrics.mean_rms),
        )?;
        out.push((res.metrics.mean_rms, oracle));
    }
    let (nat, enh) = (out[0].0, out[1].0);
    ensure(enh < nat, format!("enhanced {enh:.2} >= natural {nat:.2}"))?;
    Ok(format!(
        "RMS {nat:.1} -> {enh:.1} deg (oracle {:.1} -> {:.1})",
        out[0].1, out[1].1
    ))
}

fn band_snr_gains() -> Check {
    let set = HrtfSet::synthetic(FS).map_err(|e| e.to_string())?;
    let cfg = SrtConfig::default();
    let gains = |c| -> Result<(f64, f64), String> {
        let n = condition_snr(c, Processing::Natural, &cfg, &set).map_err(|e| e.to_string())?;
        let e = condition_snr(c, Processing::Enhanced, &cfg, &set).map_err(|e| e.to_string())?;
        let g = |ear| e.bands.mean_below(ear, 1500.0) - n.bands.mean_below(ear, 1500.0);
        Ok((g(cfg.ci_side.ha_ear()), g(cfg.ci_side.ear())))
    };
    let (ha, ci) = gains(Condition::S0NCI)?;
    ensure(ha > 6.0, format!("S0NCI HA-ear gain {ha:.2} dB"))?;
    ensure(ci.abs() <= 3.0, format!("S0NCI CI-ear change {ci:.2} dB"))?;
    let (a, b) = gains(Condition::S0N360)?;
    ensure(
        a.abs() <= 2.0 && b.abs() <= 2.0,
        format!("S0N360 changes {a:.2} / {b:.2} dB"),
    )?;
    Ok(format!(
        "S0NCI HA {ha:+.1} dB, CI {ci:+.2} dB; S0N360 {a:+.2} / {b:+.2} dB"
    ))
}

fn srt_ordering() -> Check {
    let set = HrtfSet::synthetic(FS).map_err(|e| e.to_string())?;
    let cfg = SrtConfig {
        runs: 200,
        ..Default::default()
    };
    let res = run_srt_experiment(&cfg, &set).map_err(|e| e.to_string())?;
    let imp = |c| {
        res.summary_for(c)
            .map(|s| s.improvement)
            .ok_or(format!("no summary for {c}"))
    };
    let (ci, ha, sur) = (
        imp(Condition::S0NCI)?,
        imp(Condition::S0NHA)?,
        imp(Condition::S0N360)?,
    );
    ensure(
        ci > ha && ha > sur.abs(),
        format!("ordering {ci:.2} / {ha:.2} / {sur:.2}"),
    )?;
    ensure(sur.abs() < 1.5, format!("S0N360 improvement {sur:.2} dB"))?;

    // Estimator bias: every cell's mean SRT against the known threshold.
    let mut worst: f64 = 0.0;
    for s in &res.snr {
        let v: Vec<f64> = res
            .runs
            .iter()
            .filter(|r| r.condition == s.condition && r.processing == s.processing)
            .map(|r| r.srt)
            .collect();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        worst = worst.max((mean - (cfg.listener.srt50 - s.effective.better_ear)).abs());
    }
    let mut r = rng(77);
    let direct = (0..200)
        .map(|_| run_adaptive_srt(&cfg.track, &cfg.listener, 0.0, &mut r).map(|t| t.srt))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let direct_bias = direct.iter().sum::<f64>() / 200.0 - cfg.listener.srt50;
    ensure(
        worst < 1.0 && direct_bias.abs() < 1.0,
        format!("bias {worst:.2} / {direct_bias:.2} dB"),
    )?;
    Ok(format!(
        "improvements {ci:.1} > {ha:.1} > |{sur:.2}| dB, bias <= {:.2} dB",
        worst.max(direct_bias.abs())
    ))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Check, u64);
    let criteria: [Criterion; 10] = [
        ("comb nulls", comb_nulls, 1),
        ("contralateral cancellation", contralateral_cancellation, 10),
        ("localization metric identity", metrics_identity, 5),
        ("hearing-loss filter", hearing_loss, 5),
        ("vocoder long-term spectrum", vocoder_spectrum, 30),
        ("free-field directivity", directivity, 60),
        ("ILD curves", ild_curves, 60),
        ("ideal-observer localization", localization, 120),
        ("band SNR gains", band_snr_gains, 120),
        ("SRT ordering", srt_ordering, 300),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = t.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(*limit) => {
                Err(format!("{msg} (over {limit} s budget)"))
            }
            other => other,
        };
        let (tag, msg) = match outcome {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!(
            "{tag} {:>2} {name}: {msg} [{:.2} s]",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
