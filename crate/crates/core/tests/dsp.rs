mod common;

use std::f64::consts::PI;

use common::*;
use headshadow::dsp::iir::{design_butterworth_highpass, design_butterworth_lowpass};
use headshadow::dsp::signals::{impulse, sine, white_noise};
use headshadow::dsp::spectrum::{band_powers, band_powers_linear, welch};
use headshadow::dsp::{
    apply_filter, band_split, convolve, convolve_direct, convolve_fft, fractional_delay,
    rms_level_db, Crossover, FirFilter,
};
use headshadow::{Error, SampleBuffer};

#[test]
fn sixth_order_lowpass_examples() {
    let f = design_butterworth_lowpass(6, 500.0, FS).unwrap();
    assert!((f.magnitude_db(500.0) + 3.0103).abs() < 0.05);
    let slope = f.magnitude_db(2000.0) - f.magnitude_db(1000.0);
    assert!((slope + 36.0).abs() < 2.0, "{slope}");
    let f1 = design_butterworth_lowpass(1, 50.0, FS).unwrap();
    assert!(f1.magnitude_db(0.0).abs() < 1e-6);
}

#[test]
fn rolloff_between_four_and_eight_times_cutoff() {
    for order in 1..=8 {
        let fc = 200.0;
        let f = design_butterworth_lowpass(order, fc, FS).unwrap();
        let slope = f.magnitude_db(8.0 * fc) - f.magnitude_db(4.0 * fc);
        assert!(
            (slope + 6.0 * order as f64).abs() < 1.0,
            "order {order}: {slope}"
        );
    }
}

#[test]
fn design_errors() {
    for (order, fc) in [(0, 500.0), (9, 500.0), (2, 0.0), (2, 22_050.0), (2, -1.0)] {
        let e = design_butterworth_lowpass(order, fc, FS).unwrap_err();
        assert!(matches!(e, Error::Parameter(_)), "{order} {fc}");
    }
}

#[test]
fn filters_map_silence_to_silence() {
    let z = SampleBuffer::zeros(FS, 1000);
    let iir = design_butterworth_highpass(4, 300.0, FS).unwrap();
    assert!(apply_filter(&iir, &z)
        .unwrap()
        .samples()
        .iter()
        .all(|&v| v == 0.0));
    let fir = FirFilter::lowpass(101, 1000.0, FS).unwrap();
    assert!(apply_filter(&fir, &z)
        .unwrap()
        .samples()
        .iter()
        .all(|&v| v == 0.0));
}

#[test]
fn unity_fir_is_identity() {
    let x = SampleBuffer::new(FS, lcg_noise(777, 1)).unwrap();
    let id = FirFilter::new(FS, vec![1.0]).unwrap();
    assert_eq!(apply_filter(&id, &x).unwrap(), x);
}

#[test]
fn first_order_50hz_on_1khz_tone() {
    let f = design_butterworth_lowpass(1, 50.0, FS).unwrap();
    let x = sine(FS, 1000.0, 1.0, FS as usize);
    let y = apply_filter(&f, &x).unwrap();
    let got = -20.0 * tone_amplitude(&y, 1000.0, FS as usize / 2).log10();
    let oracle = 20.0 * (1.0 + (1000.0f64 / 50.0).powi(2)).sqrt().log10();
    assert!((got - oracle).abs() < 0.5, "{got} vs {oracle}");
}

#[test]
fn non_finite_input_is_a_data_error() {
    let e = SampleBuffer::new(FS, vec![0.0, f64::NAN]).unwrap_err();
    assert!(matches!(e, Error::Data(_)));
    assert!(!e.is_validation());
}

#[test]
fn zero_delay_is_bit_exact() {
    let x = SampleBuffer::new(FS, lcg_noise(500, 2)).unwrap();
    assert_eq!(fractional_delay(&x, 0.0).unwrap(), x);
}

#[test]
fn one_sample_delay_shifts_impulse() {
    let y = fractional_delay(&impulse(FS, 0, 8), 1.0 / FS as f64).unwrap();
    assert_eq!(y.samples(), &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
}

#[test]
fn negative_delay_is_rejected() {
    let x = impulse(FS, 0, 8);
    assert!(matches!(
        fractional_delay(&x, -1e-4),
        Err(Error::Parameter(_))
    ));
}

#[test]
fn tau_delay_of_500hz_sine_has_expected_phase_lag() {
    let tau = 0.2 / 340.0;
    let x = sine(FS, 500.0, 1.0, FS as usize);
    let y = fractional_delay(&x, tau).unwrap();
    let start = 4410;
    let (_, px) = tone_phasor(x.samples(), FS as f64, 500.0, start);
    let (_, py) = tone_phasor(y.samples(), FS as f64, 500.0, start);
    let lag = (px - py).rem_euclid(2.0 * PI);
    let expected = 2.0 * PI * 500.0 * 5.882e-4;
    assert!((lag - expected).abs() < 0.01, "{lag} vs {expected}");
}

#[test]
fn fractional_delay_timing_error_below_one_eighth_sample() {
    let fs = FS as f64;
    for delay in [25.94, 16.3, 40.5, 18.77] {
        let imp = impulse(FS, 0, 256);
        let h = fractional_delay(&imp, delay / fs).unwrap();
        for f in [50.0, 300.0, 700.0, 1000.0, 1500.0] {
            let ir = FirFilter::new(FS, h.samples().to_vec()).unwrap();
            let phase = ir.response(f).arg();
            let w = 2.0 * PI * f / fs;
            // unwrap around the expected phase
            let expected = -w * delay;
            let d = (phase - expected + PI).rem_euclid(2.0 * PI) - PI;
            let err = (d / w).abs();
            assert!(err <= 0.125, "delay {delay} at {f} Hz: {err} samples");
        }
    }
}

#[test]
fn band_split_reconstructs_delayed_input() {
    let x = SampleBuffer::new(FS, lcg_noise(20_000, 3)).unwrap();
    let xo = Crossover::new(1500.0, FS).unwrap();
    let d = xo.delay_samples();
    assert_eq!(d, 256);
    let (lo, hi) = xo.split(&x).unwrap();
    let delayed = fractional_delay(&x, d as f64 / FS as f64).unwrap();
    for i in 0..x.len() {
        assert!((lo.samples()[i] + hi.samples()[i] - delayed.samples()[i]).abs() < 1e-9);
    }
}

#[test]
fn band_split_energy_goes_to_the_right_band() {
    let start = 2048;
    for (f, want_low) in [(100.0, true), (4000.0, false)] {
        let x = sine(FS, f, 1.0, FS as usize);
        let (lo, hi) = band_split(&x, 1500.0).unwrap();
        let el = energy(&lo.samples()[start..]);
        let eh = energy(&hi.samples()[start..]);
        let frac = if want_low { el } else { eh } / (el + eh);
        assert!(frac >= 0.99, "{f} Hz: {frac}");
    }
}

#[test]
fn crossover_lowpass_is_linear_phase_with_minus_6db_at_crossover() {
    let xo = Crossover::new(1500.0, FS).unwrap();
    let lp = xo.lowpass();
    assert!(lp.is_symmetric(1e-12));
    assert_eq!(lp.group_delay_samples(), Some((lp.len() - 1) / 2));
    // find the -6 dB point by bisection
    let (mut a, mut b) = (500.0, 3000.0);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if lp.magnitude_db(m) > -6.0206 {
            a = m;
        } else {
            b = m;
        }
    }
    assert!((a - 1500.0).abs() < 75.0, "{a}");
    assert!(lp.magnitude_db(2000.0) < -60.0);
}

#[test]
fn band_split_rejects_bad_crossover() {
    let x = impulse(FS, 0, 16);
    for fc in [0.0, -5.0, 22_050.0, 30_000.0] {
        assert!(matches!(band_split(&x, fc), Err(Error::Parameter(_))));
    }
}

#[test]
fn convolve_identities() {
    let x = SampleBuffer::new(FS, lcg_noise(300, 4)).unwrap();
    let y = convolve(&x, &FirFilter::identity(FS)).unwrap();
    assert!(max_abs_diff(x.samples(), y.samples()) < 1e-12);
    let ir = FirFilter::new(FS, lcg_noise(40, 5)).unwrap();
    let y = convolve(&impulse(FS, 0, 1), &ir).unwrap();
    assert_eq!(y.samples(), ir.taps());
}

#[test]
fn convolve_matches_direct_sum() {
    let x = lcg_noise(1000, 6);
    let h = lcg_noise(64, 7);
    let y = convolve(
        &SampleBuffer::new(FS, x.clone()).unwrap(),
        &FirFilter::new(FS, h.clone()).unwrap(),
    )
    .unwrap();
    assert_eq!(y.len(), 1063);
    for n in 0..y.len() {
        let mut acc = 0.0;
        for (k, hk) in h.iter().enumerate() {
            if n >= k && n - k < x.len() {
                acc += hk * x[n - k];
            }
        }
        assert!((acc - y.samples()[n]).abs() < 1e-9);
    }
}

#[test]
fn convolve_fft_and_direct_agree_on_long_inputs() {
    let x = lcg_noise(10_000, 8);
    let h = lcg_noise(1500, 9);
    let a = convolve_direct(&x, &h);
    let b = convolve_fft(&x, &h);
    let scale = a.iter().map(|v| v.abs()).fold(0.0, f64::max);
    assert!(max_abs_diff(&a, &b) / scale < 1e-9);
}

#[test]
fn convolve_rejects_rate_mismatch() {
    let x = impulse(48_000, 0, 4);
    assert!(matches!(
        convolve(&x, &FirFilter::identity(FS)),
        Err(Error::Parameter(_))
    ));
}

#[test]
fn rms_levels() {
    let one = SampleBuffer::new(FS, vec![1.0; 100]).unwrap();
    assert_eq!(rms_level_db(&one), 0.0);
    let s = sine(FS, 1000.0, 1.0, FS as usize);
    assert!((rms_level_db(&s) + 3.0103).abs() < 0.01);
    let half = s.scaled(0.5);
    assert!((rms_level_db(&s) - rms_level_db(&half) - 20.0 * 2f64.log10()).abs() < 1e-12);
    assert_eq!(
        rms_level_db(&SampleBuffer::zeros(FS, 10)),
        f64::NEG_INFINITY
    );
    assert_eq!(rms_level_db(&SampleBuffer::zeros(FS, 0)), f64::NEG_INFINITY);
}

#[test]
fn white_noise_has_equal_power_per_hz() {
    let x = white_noise(FS, 10 * FS as usize, 0.1, 11);
    let p = band_powers_linear(&x, &[1000.0, 2000.0, 4000.0]).unwrap();
    let per_hz = [p[0] / 1000.0, p[1] / 2000.0];
    assert!(db(per_hz[0] / per_hz[1]).abs() < 0.5);
}

#[test]
fn band_powers_sum_to_total() {
    let x = white_noise(FS, 4 * FS as usize, 0.3, 12);
    let edges = [1.0, 500.0, 2000.0, 8000.0, 22_049.0];
    let p: f64 = band_powers_linear(&x, &edges).unwrap().iter().sum();
    let ms = x.samples().iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    assert!((p / ms - 1.0).abs() < 0.01, "{}", p / ms);
    assert!((welch(&x).total() / ms - 1.0).abs() < 0.01);
}

#[test]
fn tone_power_lands_in_its_band() {
    let x = sine(FS, 1000.0, 0.5, FS as usize);
    let p = band_powers_linear(&x, &[500.0, 1500.0, 4000.0]).unwrap();
    assert!(p[0] / (p[0] + p[1]) >= 0.99);
}

#[test]
fn silence_gives_minus_infinity_bands() {
    let p = band_powers(&SampleBuffer::zeros(FS, 8192), &[100.0, 200.0, 400.0]).unwrap();
    assert!(p.iter().all(|&v| v == f64::NEG_INFINITY));
}

#[test]
fn band_powers_reject_bad_edges() {
    let x = impulse(FS, 0, 16);
    for edges in [
        vec![100.0],
        vec![200.0, 100.0],
        vec![0.0, 100.0],
        vec![100.0, 30_000.0],
    ] {
        assert!(matches!(band_powers(&x, &edges), Err(Error::Parameter(_))));
    }
}
