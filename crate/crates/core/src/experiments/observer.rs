//! Ideal-observer localization from broadband ILD.

use crate::analysis::ild::IldCurve;

/// The template angle whose ILD is closest to `observed`. Ties go to the
/// smaller |angle|, then to the negative angle.
pub fn ideal_observer_localize(template: &IldCurve, observed: f64) -> i32 {
    let mut best = (f64::INFINITY, 0i32);
    let mut found = false;
    for (&angle, &ild) in template.angles.iter().zip(&template.ild) {
        let d = (ild - observed).abs();
        let better = !found
            || d < best.0
            || (d == best.0
                && (angle.abs() < best.1.abs() || (angle.abs() == best.1.abs() && angle < best.1)));
        if better {
            best = (d, angle);
            found = true;
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(angles: &[i32], ild: &[f64]) -> IldCurve {
        IldCurve::new(angles.to_vec(), ild.to_vec(), "t", "t").unwrap()
    }

    #[test]
    fn exact_match() {
        let angles: Vec<i32> = (-6..=6).map(|k| 15 * k).collect();
        let ild: Vec<f64> = angles.iter().map(|&a| a as f64 / 5.0).collect();
        let t = curve(&angles, &ild);
        assert_eq!(ideal_observer_localize(&t, 9.0), 45);
        assert_eq!(ideal_observer_localize(&t, -100.0), -90);
    }

    #[test]
    fn ties_prefer_smaller_magnitude_then_negative() {
        let t = curve(&[60, 75, 90], &[8.0, 10.0, 10.0]);
        assert_eq!(ideal_observer_localize(&t, 10.0), 75);
        let t = curve(&[90, 75, 60], &[10.0, 10.0, 8.0]);
        assert_eq!(ideal_observer_localize(&t, 10.0), 75);
        let t = curve(&[15, -15], &[1.0, -1.0]);
        assert_eq!(ideal_observer_localize(&t, 0.0), -15);
    }
}
