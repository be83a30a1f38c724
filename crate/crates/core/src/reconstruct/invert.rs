use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::BrillouinGrid;

/// Momentum dependence of an amplitude ratio `A²(i)/A²(I) = c · G(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryForm {
    /// `4cos²(k/2)` on the chain.
    ChainCos2,
    /// `4cos⁴(k/2)` on the chain (cosine coupling).
    ChainCos4,
    /// `2(cos²(kx/2) + cos²(ky/2))`, bond centre of the square lattice.
    SquareBond,
    /// `16cos²(kx/2)cos²(ky/2)`, plaquette centre of the square lattice.
    SquarePlaquette,
}

impl GeometryForm {
    /// `k` in units of `1/a`.
    pub fn value(self, k: [f64; 2]) -> f64 {
        let cx = (k[0] / 2.0).cos().powi(2);
        let cy = (k[1] / 2.0).cos().powi(2);
        match self {
            GeometryForm::ChainCos2 => 4.0 * cx,
            GeometryForm::ChainCos4 => 4.0 * cx * cx,
            GeometryForm::SquareBond => 2.0 * (cx + cy),
            GeometryForm::SquarePlaquette => 16.0 * cx * cy,
        }
    }

    /// Continuum Brillouin-zone average.
    pub fn zone_mean(self) -> f64 {
        match self {
            GeometryForm::ChainCos2 => 2.0,
            GeometryForm::ChainCos4 => 1.5,
            GeometryForm::SquareBond => 2.0,
            GeometryForm::SquarePlaquette => 4.0,
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            GeometryForm::ChainCos2 | GeometryForm::ChainCos4 => 1,
            _ => 2,
        }
    }
}

/// Relative slack on the admissible ratio range; values inside it are clipped.
pub const RANGE_TOLERANCE: f64 = 0.05;

/// Value clipped to `[0, 1]` and its distance from the interval.
fn unit_interval(u: f64, what: &str) -> Result<(f64, f64)> {
    if !u.is_finite() || !(-RANGE_TOLERANCE..=1.0 + RANGE_TOLERANCE).contains(&u) {
        return Err(Error::Inversion(format!("{what} = {u} outside [0, 1]")));
    }
    let clipped = u.clamp(0.0, 1.0);
    Ok((clipped, (u - clipped).abs()))
}

/// `|k|` (units of `1/a`) from a chain ratio `r` and calibration `c`, before grid snapping.
pub fn invert_1d(ratio: f64, calibration: f64, form: GeometryForm) -> Result<f64> {
    invert_1d_clipped(ratio, calibration, form).map(|(k, _)| k)
}

/// As [`invert_1d`], also returning how far `r/(4c)` lay outside `[0, 1]` (0 when inside).
pub fn invert_1d_clipped(ratio: f64, calibration: f64, form: GeometryForm) -> Result<(f64, f64)> {
    if !(calibration > 0.0) {
        return Err(Error::Inversion(format!("calibration must be positive, got {calibration}")));
    }
    let (u, clipped) = unit_interval(ratio / (4.0 * calibration), "r/(4c)")?;
    let half_cos = match form {
        GeometryForm::ChainCos2 => u.sqrt(),
        GeometryForm::ChainCos4 => u.sqrt().sqrt(),
        _ => return Err(Error::Inversion("square-lattice form passed to the chain inversion".into())),
    };
    Ok((2.0 * half_cos.acos(), clipped))
}

/// Unordered `{|kx|, |ky|}` (ascending) from bond and plaquette ratios, before grid snapping.
pub fn invert_2d(r2: f64, r3: f64, c1: f64, c2: f64) -> Result<[f64; 2]> {
    invert_2d_clipped(r2, r3, c1, c2).map(|(k, _)| k)
}

/// As [`invert_2d`], also returning the largest distance of a root from `[0, 1]`, or of a
/// negative discriminant from zero on the scale of its tolerance (0 when nothing was clipped).
pub fn invert_2d_clipped(r2: f64, r3: f64, c1: f64, c2: f64) -> Result<([f64; 2], f64)> {
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::Inversion("calibrations must be positive".into()));
    }
    if !(r2 >= 0.0 && r3 >= 0.0) {
        return Err(Error::Inversion(format!("ratios must be non-negative, got {r2}, {r3}")));
    }
    // u + v = s, uv = p with u, v = cos²(k/2)
    let s = r2 / (2.0 * c1);
    let p = r3 / (16.0 * c2);
    let mut disc = s * s - 4.0 * p;
    if disc < -RANGE_TOLERANCE * s * s.max(1.0) {
        return Err(Error::Inversion(format!("no real solution: discriminant {disc}")));
    }
    let mut excess = if disc < -16.0 * f64::EPSILON * s * s { -disc / (s * s.max(1.0)) } else { 0.0 };
    if disc < 16.0 * f64::EPSILON * s * s {
        disc = 0.0;
    }
    let sq = disc.sqrt();
    let hi = (s + sq) / 2.0;
    let lo = if hi > 0.0 { p / hi } else { 0.0 };
    // rounding scale of the roots; snaps exact edge and centre values
    let slack = if sq > 0.0 { 8.0 * f64::EPSILON * (1.0 + s / sq) } else { 8.0 * f64::EPSILON };
    let snap = |u: f64| {
        if (u - 1.0).abs() <= slack {
            1.0
        } else if u.abs() <= slack {
            0.0
        } else {
            u
        }
    };
    let (u, cu) = unit_interval(snap(hi), "cos²(kx/2)")?;
    let (v, cv) = unit_interval(snap(lo), "cos²(ky/2)")?;
    excess = excess.max(cu).max(cv);
    let a = 2.0 * u.sqrt().acos();
    let b = 2.0 * v.sqrt().acos();
    Ok((if a <= b { [a, b] } else { [b, a] }, excess))
}

/// Closest grid momentum magnitude on the chain.
pub fn snap_1d(k: f64, grid: &BrillouinGrid) -> f64 {
    let n = grid.sites_per_axis() as i64;
    let m = (k / grid.spacing()).round().clamp(0.0, (n / 2) as f64);
    grid.momentum_of(m as i64).abs()
}

/// Closest grid orbit `{|kx|, |ky|}` (ascending) on the square lattice.
pub fn snap_2d(k: [f64; 2], grid: &BrillouinGrid) -> [f64; 2] {
    let mut a = snap_1d(k[0], grid);
    let mut b = snap_1d(k[1], grid);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    [a, b]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn chain_limits() {
        for form in [GeometryForm::ChainCos2, GeometryForm::ChainCos4] {
            assert_eq!(invert_1d(4.0, 1.0, form).unwrap(), 0.0);
            assert!((invert_1d(0.0, 1.0, form).unwrap() - PI).abs() < 1e-15);
            assert_eq!(invert_1d(4.1, 1.0, form).unwrap(), 0.0);
            assert!((invert_1d_clipped(4.1, 1.0, form).unwrap().1 - 0.025).abs() < 1e-12);
            assert_eq!(invert_1d_clipped(3.9, 1.0, form).unwrap().1, 0.0);
            assert!(invert_1d(4.3, 1.0, form).is_err());
        }
    }

    #[test]
    fn square_limits() {
        assert_eq!(invert_2d(4.0, 16.0, 1.0, 1.0).unwrap(), [0.0, 0.0]);
        let edge = invert_2d(2.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(edge[0], 0.0);
        assert!((edge[1] - PI).abs() < 1e-15);
        assert!(invert_2d(0.5, 16.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn zone_means_match_dense_average() {
        let n = 2000;
        for form in [GeometryForm::ChainCos2, GeometryForm::ChainCos4] {
            let mean: f64 = (0..n).map(|i| form.value([-PI + 2.0 * PI * i as f64 / n as f64, 0.0])).sum::<f64>() / n as f64;
            assert!((mean - form.zone_mean()).abs() < 1e-9);
        }
    }
}
