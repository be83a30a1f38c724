//! Two-probe correlation spectroscopy: thermal correlators, Γ̄, light-cone maps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::models::{BHModel, KitaevModel, LatticeModel};
use crate::rates::sinc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelMode {
    pub k: [f64; 2],
    pub frequency: f64,
    /// Weight of `e^{+iωτ}` in the correlator.
    pub forward: f64,
    /// Weight of `e^{-iωτ}` in the correlator.
    pub backward: f64,
}

/// Which local operator the probes couple to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// `⟨c†_l(τ) c_j⟩` of the pairing ring.
    FermionicHopping,
    /// `⟨δn_l(τ) δn_j⟩` of the linearised superfluid density.
    DensityDensity,
}

/// Translation-invariant two-time correlator written as a mode sum,
/// `C_{lj}(τ) = norm Σ_k e^{ik·(j-l)} [forward e^{iωτ} + backward e^{-iωτ}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationKernel {
    pub observable: Observable,
    pub modes: Vec<KernelMode>,
    pub norm: f64,
    pub sites_per_axis: usize,
    pub dimension: usize,
}

impl CorrelationKernel {
    /// Quasiparticle content of `c_l`: `cos²(θ/2) n` forward, `sin²(θ/2)(1-n)` backward.
    pub fn kitaev(model: &KitaevModel, beta: f64) -> Result<Self> {
        let modes = model
            .modes(beta)?
            .into_iter()
            .map(|m| {
                let c2 = m.coupling_factor * m.coupling_factor;
                KernelMode {
                    k: m.point.k,
                    frequency: m.frequency,
                    forward: c2 * m.occupation,
                    backward: (1.0 - c2) * (1.0 - m.occupation),
                }
            })
            .collect();
        Ok(Self {
            observable: Observable::FermionicHopping,
            modes,
            norm: 1.0 / model.sites() as f64,
            sites_per_axis: model.sites(),
            dimension: 1,
        })
    }

    /// Linearised density `δn = Φ₀(δΦ + δΦ†)`: weight `n₀ ε⁰/ω` times `n` forward, `1+n` backward.
    pub fn density(model: &BHModel, beta: f64) -> Result<Self> {
        let n0 = model.condensate_filling();
        let modes = model
            .modes(beta)?
            .into_iter()
            .map(|m| {
                let f2 = n0 * m.coupling_factor * m.coupling_factor;
                KernelMode {
                    k: m.point.k,
                    frequency: m.frequency,
                    forward: f2 * m.occupation,
                    backward: f2 * (1.0 + m.occupation),
                }
            })
            .collect();
        let n = model.grid().sites_per_axis();
        Ok(Self { observable: Observable::DensityDensity, modes, norm: 1.0 / (n * n) as f64, sites_per_axis: n, dimension: 2 })
    }

    fn phase(k: [f64; 2], r: [i64; 2]) -> f64 {
        k[0] * r[0] as f64 + k[1] * r[1] as f64
    }

    /// `C_{lj}(τ)`.
    pub fn correlator(&self, l: [i64; 2], j: [i64; 2], tau: f64) -> Complex64 {
        let r = [j[0] - l[0], j[1] - l[1]];
        let mut acc = Complex64::new(0.0, 0.0);
        for m in &self.modes {
            let (s, c) = (m.frequency * tau).sin_cos();
            let time = Complex64::new((m.forward + m.backward) * c, (m.forward - m.backward) * s);
            acc += Complex64::from_polar(1.0, Self::phase(m.k, r)) * time;
        }
        acc * self.norm
    }

    /// `C_{lj}(τ) + C_{jl}(τ)` for separation `r = j - l`.
    pub fn symmetric(&self, r: [i64; 2], tau: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in &self.modes {
            let (s, c) = (m.frequency * tau).sin_cos();
            let time = Complex64::new((m.forward + m.backward) * c, (m.forward - m.backward) * s);
            acc += 2.0 * Self::phase(m.k, r).cos() * time;
        }
        acc * self.norm
    }

    fn time_kernel(m: &KernelMode, nu: f64, t: f64) -> f64 {
        t * t * (m.forward * sinc((nu - m.frequency) * t / 2.0).powi(2) + m.backward * sinc((nu + m.frequency) * t / 2.0).powi(2))
    }

    /// `g² ∬₀ᵗ ⟨O†(t1) O(t2)⟩ e^{-iν(t1-t2)}` for `O = Σ a_s (site operator at s)`.
    pub fn local_rate(&self, sites: &[([i64; 2], f64)], g: f64, nu: f64, t: f64) -> f64 {
        let mut acc = 0.0;
        for m in &self.modes {
            let mut amp = Complex64::new(0.0, 0.0);
            for &(s, a) in sites {
                amp += Complex64::from_polar(a, Self::phase(m.k, s));
            }
            acc += amp.norm_sqr() * Self::time_kernel(m, nu, t);
        }
        g * g * self.norm * acc
    }

    fn same_site(&self, a: [i64; 2], b: [i64; 2]) -> bool {
        let n = self.sites_per_axis as i64;
        (0..self.dimension).all(|ax| (a[ax] - b[ax]).rem_euclid(n) == 0)
    }

    /// Direct cross-term formula `g² t² norm Σ_k cos(k·r)[forward sinc²((ν-ω)t/2) + backward sinc²((ν+ω)t/2)]`.
    pub fn gamma_bar(&self, pair: &ProbePair, t: f64) -> Result<f64> {
        pair.check(self)?;
        let r = pair.separation();
        let mut acc = 0.0;
        for m in &self.modes {
            acc += Self::phase(m.k, r).cos() * Self::time_kernel(m, pair.nu, t);
        }
        Ok(pair.coupling * pair.coupling * self.norm * acc)
    }

    /// Two-probe rate with both probes coupling to `O_a + O_b` from the symmetric Bell state.
    pub fn two_probe_rate(&self, pair: &ProbePair, t: f64) -> Result<f64> {
        pair.check(self)?;
        Ok(0.5 * self.local_rate(&[(pair.site_a, 1.0), (pair.site_b, 1.0)], pair.coupling, pair.nu, t))
    }

    pub fn single_probe_rate(&self, site: [i64; 2], g: f64, nu: f64, t: f64) -> f64 {
        self.local_rate(&[(site, 1.0)], g, nu, t)
    }

    /// `Γ⁽²⁾ - ½Γ⁽¹⁾_A - ½Γ⁽¹⁾_B` from three separate rate evaluations.
    pub fn assembled_gamma_bar(&self, pair: &ProbePair, t: f64) -> Result<f64> {
        let two = self.two_probe_rate(pair, t)?;
        let a = self.single_probe_rate(pair.site_a, pair.coupling, pair.nu, t);
        let b = self.single_probe_rate(pair.site_b, pair.coupling, pair.nu, t);
        Ok(two - 0.5 * a - 0.5 * b)
    }

    /// Recover `C_{lj}(t) + C_{jl}(t)` from Γ̄ alone: `d²Γ̄/dt² = g² Re[C e^{-iνt}]`,
    /// taken at ν = 0 (real part) and ν = π/(2t) (imaginary part) by central differences.
    pub fn correlation_from_gamma_bar(&self, site_a: [i64; 2], site_b: [i64; 2], t: f64, step: f64) -> Result<Complex64> {
        let g = 1.0;
        let second = |nu: f64| -> Result<f64> {
            let pair = ProbePair::new(site_a, site_b, nu, g)?;
            let f = |tt: f64| self.gamma_bar(&pair, tt);
            Ok((f(t + step)? - 2.0 * f(t)? + f(t - step)?) / (step * step))
        };
        let re = second(0.0)?;
        let im = if t > 0.0 { second(std::f64::consts::PI / (2.0 * t))? } else { 0.0 };
        Ok(Complex64::new(re, im))
    }
}

/// `⟨c†_l(τ) c_j(0)⟩` of the pairing ring in its thermal state.
pub fn kitaev_correlator(model: &KitaevModel, l: i64, j: i64, tau: f64, beta: f64) -> Result<Complex64> {
    Ok(CorrelationKernel::kitaev(model, beta)?.correlator([l, 0], [j, 0], tau))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePair {
    pub site_a: [i64; 2],
    pub site_b: [i64; 2],
    pub nu: f64,
    pub coupling: f64,
}

impl ProbePair {
    pub fn new(site_a: [i64; 2], site_b: [i64; 2], nu: f64, coupling: f64) -> Result<Self> {
        if site_a == site_b {
            return domain("probe sites must differ");
        }
        Ok(Self { site_a, site_b, nu, coupling })
    }

    pub fn separation(&self) -> [i64; 2] {
        [self.site_b[0] - self.site_a[0], self.site_b[1] - self.site_a[1]]
    }

    fn check(&self, kernel: &CorrelationKernel) -> Result<()> {
        if kernel.same_site(self.site_a, self.site_b) {
            return domain("probe sites coincide on the lattice");
        }
        Ok(())
    }
}

/// Quantity plotted on a (separation, time) map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapQuantity {
    /// Γ̄ at fixed probe frequency and coupling.
    GammaBar { nu: f64, coupling: f64 },
    /// `|C_{lj}(t) + C_{jl}(t)|`.
    Correlation,
    /// `|C_sym(t) - C_sym(0)|`: the part that has propagated.
    ConnectedCorrelation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMap {
    pub separations: Vec<[i64; 2]>,
    pub times: Vec<f64>,
    /// `values[s][t]`.
    pub values: Vec<Vec<f64>>,
    /// Each time column scaled to its maximum over separations.
    pub normalized: Option<Vec<Vec<f64>>>,
    pub dimension: usize,
    pub quantity: MapQuantity,
}

impl CorrelationMap {
    pub fn global_max(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// First time each separation reaches `fraction` of the map's global maximum.
    pub fn arrival_times(&self, fraction: f64) -> Vec<Option<f64>> {
        let threshold = fraction * self.global_max();
        self.values.iter().map(|row| row.iter().position(|v| v.abs() >= threshold).map(|i| self.times[i])).collect()
    }
}

pub fn lightcone_map(
    kernel: &CorrelationKernel,
    separations: &[[i64; 2]],
    times: &[f64],
    quantity: MapQuantity,
    normalize: bool,
) -> Result<CorrelationMap> {
    let origin = [0i64, 0];
    let mut values = Vec::with_capacity(separations.len());
    for &r in separations {
        let row: Vec<f64> = match quantity {
            MapQuantity::GammaBar { nu, coupling } => {
                let pair = ProbePair::new(origin, r, nu, coupling)?;
                times.iter().map(|&t| kernel.gamma_bar(&pair, t)).collect::<Result<_>>()?
            }
            MapQuantity::Correlation => times.iter().map(|&t| kernel.symmetric(r, t).norm()).collect(),
            MapQuantity::ConnectedCorrelation => {
                let c0 = kernel.symmetric(r, 0.0);
                times.iter().map(|&t| (kernel.symmetric(r, t) - c0).norm()).collect()
            }
        };
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Contract(format!("non-finite map value at separation {r:?}")));
        }
        values.push(row);
    }
    let normalized = normalize.then(|| {
        let mut out = values.clone();
        for ti in 0..times.len() {
            let m = values.iter().fold(0.0f64, |acc, row| acc.max(row[ti].abs()));
            if m > 0.0 {
                for row in out.iter_mut() {
                    row[ti] /= m;
                }
            }
        }
        out
    });
    Ok(CorrelationMap {
        separations: separations.to_vec(),
        times: times.to_vec(),
        values,
        normalized,
        dimension: kernel.dimension,
        quantity,
    })
}
