use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::probe::ProbeConfig;

/// Frequencies where the probe transform falls below this fraction of its maximum are dropped.
pub const REGULARIZATION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochFunction {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
}

/// Periodic sum of images of `f` sampled at `j h`, `j = 0..m`.
pub fn periodize(f: impl Fn(f64) -> f64, m: usize, spacing: f64, reach: f64) -> Vec<f64> {
    let period = m as f64 * spacing;
    let images = (reach / period).ceil() as i64 + 1;
    (0..m)
        .map(|j| {
            let x = j as f64 * spacing;
            (-images..=images).map(|n| f(x - n as f64 * period)).sum()
        })
        .collect()
}

/// Undo the probe smearing `|A_k|(s) = |ψ * w_k|(s)` for samples at `s = j h` over one period.
///
/// The probe density along the first axis plays the role of `ψ`; the sign is fixed by
/// making the value at the origin positive.
pub fn bloch_reconstruct(samples: &[f64], probe: &ProbeConfig, spacing: f64) -> Result<BlochFunction> {
    probe.validate()?;
    let m = samples.len();
    if m < 4 {
        return domain(format!("need at least 4 samples, got {m}"));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return domain(format!("sample spacing must be positive, got {spacing}"));
    }
    let width = probe.wavefunction_widths[0];
    let psi = periodize(|x| probe.density(0, x), m, spacing, 40.0 * width);

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(m);
    let inverse = planner.plan_fft_inverse(m);
    let mut a_hat: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v.abs(), 0.0)).collect();
    let mut psi_hat: Vec<Complex64> = psi.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward.process(&mut a_hat);
    forward.process(&mut psi_hat);

    let psi_max = psi_hat.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let total: f64 = a_hat.iter().map(|z| z.norm_sqr()).sum();
    if !(total > 0.0) {
        return domain("amplitude samples are all zero");
    }
    let mut dropped = 0.0;
    let mut w_hat: Vec<Complex64> = a_hat
        .iter()
        .zip(&psi_hat)
        .map(|(a, p)| {
            if p.norm() < REGULARIZATION * psi_max {
                dropped += a.norm_sqr();
                Complex64::new(0.0, 0.0)
            } else {
                a / (p.conj() * spacing)
            }
        })
        .collect();
    if dropped > REGULARIZATION * total {
        return Err(Error::IllPosed(format!(
            "{:.3e} of the signal power sits where the probe transform vanishes",
            dropped / total
        )));
    }
    inverse.process(&mut w_hat);
    let mut values: Vec<f64> = w_hat.iter().map(|z| z.re / m as f64).collect();
    if values[0] < 0.0 {
        values.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(BlochFunction { x: (0..m).map(|j| j as f64 * spacing).collect(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::{axis_overlap, OverlapKind};
    use std::f64::consts::PI;

    fn gaussian(w: f64) -> impl Fn(f64) -> f64 {
        move |x: f64| (PI * w * w).powf(-0.25) * (-x * x / (2.0 * w * w)).exp()
    }

    fn smeared(probe: &ProbeConfig, w: f64, m: usize, h: f64) -> Vec<f64> {
        let s = probe.wavefunction_widths[0];
        periodize(|d| axis_overlap(s, w, d, OverlapKind::Linear), m, h, 40.0 * (s + w))
    }

    #[test]
    fn gaussian_recovered() {
        let probe = ProbeConfig::new(1.0, 0.01).unwrap();
        let (m, w) = (64, 0.2);
        let h = 1.0 / m as f64;
        let out = bloch_reconstruct(&smeared(&probe, w, m, h), &probe, h).unwrap();
        let expect = periodize(gaussian(w), m, h, 40.0 * w);
        let err = out.values.iter().zip(&expect).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn sign_flip_is_invisible() {
        let probe = ProbeConfig::new(1.0, 0.01).unwrap();
        let h = 1.0 / 32.0;
        let a = smeared(&probe, 0.25, 32, h);
        let flipped: Vec<f64> = a.iter().map(|v| -v).collect();
        assert_eq!(bloch_reconstruct(&a, &probe, h).unwrap(), bloch_reconstruct(&flipped, &probe, h).unwrap());
    }

    #[test]
    fn sharp_features_are_ill_posed() {
        let mut probe = ProbeConfig::new(1.0, 0.01).unwrap();
        probe.wavefunction_widths = [0.3, 0.3];
        let mut a = vec![0.0; 64];
        a[10] = 1.0;
        assert!(matches!(bloch_reconstruct(&a, &probe, 1.0 / 64.0), Err(Error::IllPosed(_))));
    }
}
