//! Probe configuration, overlap integrals and position-dependent coupling amplitudes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::models::ModeData;

/// Measurement position: on-site, bond centre, plaquette centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Position {
    I,
    II,
    III,
}

impl Position {
    pub fn index(self) -> usize {
        match self {
            Position::I => 0,
            Position::II => 1,
            Position::III => 2,
        }
    }

    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            0 => Ok(Position::I),
            1 => Ok(Position::II),
            2 => Ok(Position::III),
            _ => domain(format!("position index must be 0, 1 or 2, got {i}")),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Position::I => "I",
            Position::II => "II",
            Position::III => "III",
        }
    }

    /// Standard displacement in units of `a`.
    pub fn offset(self) -> [f64; 2] {
        match self {
            Position::I => [0.0, 0.0],
            Position::II => [0.5, 0.0],
            Position::III => [0.5, 0.5],
        }
    }
}

/// How the bond-centre amplitude depends on momentum in 1D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeRule {
    /// `|1 + e^{ika}|`, squared ratio `4cos²(ka/2)`.
    PhaseSum,
    /// `1 + cos(ka)`, squared ratio `4cos⁴(ka/2)`.
    KitaevCosine,
}

/// What the probe density is overlapped with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapKind {
    /// `∫ ψ² W`: coupling linear in the lattice field.
    Linear,
    /// `∫ ψ² W²`: density-density coupling.
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Probe transition frequency ν.
    pub level_gap: f64,
    /// Dimensionless coupling g.
    pub coupling: f64,
    /// Displacement in units of `a`.
    pub position_offset: [f64; 2],
    /// Gaussian widths of the probe ground state per axis, in units of `a`.
    pub wavefunction_widths: [f64; 2],
    /// Elastic overlap γ₀ entering the zero-frequency term.
    pub elastic_overlap: f64,
}

impl ProbeConfig {
    pub fn new(level_gap: f64, coupling: f64) -> Result<Self> {
        let p = Self { level_gap, coupling, position_offset: [0.0, 0.0], wavefunction_widths: [0.1, 0.1], elastic_overlap: 0.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coupling > 0.0 && self.coupling.is_finite()) {
            return domain(format!("coupling must be positive, got {}", self.coupling));
        }
        if self.wavefunction_widths.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return domain("probe widths must be positive");
        }
        Ok(())
    }

    /// Probe density `ψ_ē ψ_ḡ` along one axis, taken as the ground-state density `ψ₀²`.
    pub fn density(&self, axis: usize, x: f64) -> f64 {
        let s = self.wavefunction_widths[axis];
        (-(x * x) / (s * s)).exp() / (s * PI.sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapSet {
    pub j_values: Vec<f64>,
    /// `|J_i/J_0|²`, first entry 1.
    pub ratios: Vec<f64>,
}

impl OverlapSet {
    pub fn from_values(j_values: Vec<f64>) -> Result<Self> {
        let j0 = *j_values.first().ok_or_else(|| crate::Error::Domain("no overlaps".into()))?;
        if j0 == 0.0 || !j0.is_finite() {
            return domain("on-site overlap J_0 must be non-zero");
        }
        let ratios: Vec<f64> = j_values.iter().map(|j| (j / j0).powi(2)).collect();
        if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return domain("overlap ratios must be positive and finite");
        }
        Ok(Self { j_values, ratios })
    }

    /// Overlaps with `J_0 = 1` and the given `|J_i/J_0|²`.
    pub fn from_ratios(ratios: &[f64]) -> Result<Self> {
        let mut values = vec![1.0];
        values.extend(ratios.iter().map(|r| r.sqrt()));
        Self::from_values(values)
    }

    pub fn value(&self, position: Position) -> Result<f64> {
        self.j_values
            .get(position.index())
            .copied()
            .ok_or_else(|| crate::Error::Domain(format!("no overlap for position {}", position.label())))
    }
}

/// `∫ A e^{-α(x-d)²} · B e^{-γx²} dx`.
pub fn gaussian_overlap(a: f64, alpha: f64, b: f64, gamma: f64, d: f64) -> f64 {
    let s = alpha + gamma;
    a * b * (PI / s).sqrt() * (-alpha * gamma * d * d / s).exp()
}

/// One-axis overlap of the probe density centred at `d` with a Gaussian Wannier function.
pub fn axis_overlap(probe_width: f64, wannier_width: f64, d: f64, kind: OverlapKind) -> f64 {
    let a = 1.0 / (probe_width * PI.sqrt());
    let alpha = 1.0 / (probe_width * probe_width);
    let (b, gamma) = match kind {
        OverlapKind::Linear => ((PI * wannier_width * wannier_width).powf(-0.25), 0.5 / (wannier_width * wannier_width)),
        OverlapKind::Density => ((PI * wannier_width * wannier_width).powf(-0.5), 1.0 / (wannier_width * wannier_width)),
    };
    gaussian_overlap(a, alpha, b, gamma, d)
}

/// Overlaps `J_0, J_1[, J_2]` at the standard positions, product over in-plane axes.
pub fn overlap_integrals(probe: &ProbeConfig, wannier_width: f64, dimension: usize, kind: OverlapKind) -> Result<OverlapSet> {
    probe.validate()?;
    if !(wannier_width > 0.0 && wannier_width.is_finite()) {
        return domain("Wannier width must be positive");
    }
    let positions: &[Position] = match dimension {
        1 => &[Position::I, Position::II],
        2 => &[Position::I, Position::II, Position::III],
        _ => return domain(format!("dimension must be 1 or 2, got {dimension}")),
    };
    let values = positions
        .iter()
        .map(|p| {
            let off = p.offset();
            (0..dimension).map(|ax| axis_overlap(probe.wavefunction_widths[ax], wannier_width, off[ax], kind)).product()
        })
        .collect();
    OverlapSet::from_values(values)
}

/// Squared normalisation `1/(2^n n!)` of the n-th Hermite function.
pub fn hermite_normalization(n: u32) -> f64 {
    let fact: f64 = (1..=n).map(f64::from).product();
    1.0 / (2f64.powi(n as i32) * fact)
}

/// Prefactor of the vertical `0 → n_z` transition of a trapped probe,
/// `(-1)^{n_z} sqrt(m) (γ_{n_z} γ_0)^{1/2} sqrt(ν_z) / π`.
pub fn vertical_prefactor(n_z: u32, mass: f64, trap_frequency: f64) -> Result<f64> {
    if !(mass > 0.0 && trap_frequency > 0.0) {
        return domain("mass and trap frequency must be positive");
    }
    let sign = if n_z.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * mass.sqrt() * (hermite_normalization(n_z) * hermite_normalization(0)).sqrt() * trap_frequency.sqrt() / PI)
}

/// Geometry factor `G_i(k)` for the chain (`i = 1`) and the square lattice (`i = 1, 2`); `k` in units of `1/a`.
pub fn geometry_factor(config_index: usize, k: [f64; 2], dimension: usize) -> Result<f64> {
    let cx = (k[0] / 2.0).cos().powi(2);
    let cy = (k[1] / 2.0).cos().powi(2);
    match (dimension, config_index) {
        (1, 1) => Ok(4.0 * cx),
        (2, 1) => Ok(2.0 * (cx + cy)),
        (2, 2) => Ok(16.0 * cx * cy),
        _ => domain(format!("no geometry factor for index {config_index} in {dimension}D")),
    }
}

/// Chain geometry factor for the cosine coupling, `(1 + cos k)²`.
pub fn kitaev_geometry_factor(k: f64) -> f64 {
    (1.0 + k.cos()).powi(2)
}

/// Squared-amplitude ratio between `position` and on-site for a given rule.
pub fn position_geometry(position: Position, k: [f64; 2], dimension: usize, rule: AmplitudeRule) -> Result<f64> {
    match (position, dimension, rule) {
        (Position::I, _, _) => Ok(1.0),
        (Position::II, 1, AmplitudeRule::KitaevCosine) => Ok(kitaev_geometry_factor(k[0])),
        (_, 2, AmplitudeRule::KitaevCosine) => domain("cosine amplitude rule is defined for the chain only"),
        (Position::II, _, AmplitudeRule::PhaseSum) => geometry_factor(1, k, dimension),
        (Position::III, 2, AmplitudeRule::PhaseSum) => geometry_factor(2, k, dimension),
        _ => domain(format!("position {} not available in {dimension}D", position.label())),
    }
}

/// Overlaps plus amplitude rule: everything needed to turn modes into line strengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSetup {
    pub overlaps: OverlapSet,
    pub rule: AmplitudeRule,
    pub dimension: usize,
}

impl ProbeSetup {
    pub fn new(overlaps: OverlapSet, rule: AmplitudeRule, dimension: usize) -> Result<Self> {
        if dimension == 2 && rule == AmplitudeRule::KitaevCosine {
            return domain("cosine amplitude rule is defined for the chain only");
        }
        if overlaps.j_values.len() < dimension + 1 {
            return domain(format!("{dimension}D needs {} overlaps", dimension + 1));
        }
        Ok(Self { overlaps, rule, dimension })
    }

    pub fn positions(&self) -> Vec<Position> {
        match self.dimension {
            1 => vec![Position::I, Position::II],
            _ => vec![Position::I, Position::II, Position::III],
        }
    }
}

/// Real coupling amplitude of one mode for a probe at `position`.
///
/// On the square lattice the bond and plaquette factors are averaged over the
/// point-group orbit; orbit members share a frequency, so line strengths are unchanged.
pub fn interaction_amplitude(mode: &ModeData, setup: &ProbeSetup, position: Position) -> Result<f64> {
    let j = setup.overlaps.value(position)?;
    let k = mode.point.k;
    let shape = match (position, setup.dimension, setup.rule) {
        (Position::II, 1, AmplitudeRule::KitaevCosine) => 1.0 + k[0].cos(),
        _ => position_geometry(position, k, setup.dimension, setup.rule)?.sqrt(),
    };
    Ok(j * mode.coupling_factor * shape)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{synthetic_modes, Statistics};

    #[test]
    fn geometry_paper_values() {
        assert_eq!(geometry_factor(1, [0.0, 0.0], 1).unwrap(), 4.0);
        assert_eq!(geometry_factor(2, [0.0, 0.0], 2).unwrap(), 16.0);
        assert!(geometry_factor(1, [PI, 0.0], 1).unwrap().abs() < 1e-30);
        assert!(geometry_factor(2, [0.0, 0.0], 1).is_err());
        assert!(geometry_factor(3, [0.0, 0.0], 2).is_err());
    }

    #[test]
    fn cosine_rule_vanishes_at_zone_edge() {
        let modes = synthetic_modes(&[(1.0, 0.7, 1.0)], Statistics::Fermionic);
        let mut mode = modes[0].clone();
        mode.point.k = [PI, 0.0];
        let setup = ProbeSetup::new(OverlapSet::from_ratios(&[1.0]).unwrap(), AmplitudeRule::KitaevCosine, 1).unwrap();
        assert!(interaction_amplitude(&mode, &setup, Position::II).unwrap().abs() < 1e-15);
        assert!(interaction_amplitude(&mode, &setup, Position::III).is_err());
    }

    #[test]
    fn displaced_overlap_vanishes() {
        let far = axis_overlap(0.1, 0.2, 50.0, OverlapKind::Linear);
        assert_eq!(far, 0.0);
    }

    #[test]
    fn half_site_overlap_is_reflection_symmetric() {
        // Site 0 seen from +a/2 and site 1 seen from -a/2.
        let left = axis_overlap(0.13, 0.2, 0.5, OverlapKind::Linear);
        let right = axis_overlap(0.13, 0.2, -0.5, OverlapKind::Linear);
        assert!((left - right).abs() < 1e-12);
    }

    #[test]
    fn zero_widths_rejected() {
        let mut p = ProbeConfig::new(1.0, 0.01).unwrap();
        p.wavefunction_widths = [0.0, 0.1];
        assert!(overlap_integrals(&p, 0.2, 1, OverlapKind::Linear).is_err());
        let p = ProbeConfig::new(1.0, 0.01).unwrap();
        assert!(overlap_integrals(&p, 0.0, 1, OverlapKind::Linear).is_err());
    }

    #[test]
    fn vertical_prefactor_sign_alternates() {
        let a = vertical_prefactor(1, 1.0, 2.0).unwrap();
        let b = vertical_prefactor(2, 1.0, 2.0).unwrap();
        assert!(a < 0.0 && b > 0.0);
        assert!((hermite_normalization(3) - 1.0 / 48.0).abs() < 1e-16);
    }
}
