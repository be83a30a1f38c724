//! Born–Markov master equation of a probe coupled to a continuum of quasiparticles.

use nalgebra::Matrix2;
use num_complex::Complex64;
use ode_solvers::{Dop853, OutputType, SVector, System};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::models::Statistics;
use crate::reconstruct::golden_min;

pub const RELATIVE_TOLERANCE: f64 = 1e-9;
pub const ABSOLUTE_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LindbladParams {
    /// Resonant coupling weight `g² d(k) |J_0 γ(k)|²`, a rate.
    pub weight: f64,
    /// Occupation of the resonant modes.
    pub occupation: f64,
    pub statistics: Statistics,
    /// Probe gap; only rotates coherences.
    pub level_gap: f64,
}

impl LindbladParams {
    pub fn new(weight: f64, occupation: f64, statistics: Statistics) -> Result<Self> {
        let p = Self { weight, occupation, statistics, level_gap: 0.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.weight >= 0.0 && self.weight.is_finite()) {
            return domain(format!("weight must be non-negative, got {}", self.weight));
        }
        let n = self.occupation;
        let ok = match self.statistics {
            Statistics::Bosonic => n >= 0.0 && n.is_finite(),
            Statistics::Fermionic => (0.0..=1.0).contains(&n),
        };
        if !ok {
            return domain(format!("occupation {n} not allowed for {:?} modes", self.statistics));
        }
        Ok(())
    }

    /// Rate of `|ē⟩ → |ḡ⟩`, `w (1 + s n)`.
    pub fn emission_rate(&self) -> f64 {
        self.weight * (1.0 + self.statistics.sign() * self.occupation)
    }

    /// Rate of `|ḡ⟩ → |ē⟩`, `w n`.
    pub fn absorption_rate(&self) -> f64 {
        self.weight * self.occupation
    }

    /// Long-time excited population `n / (1 + s n + n)`.
    pub fn stationary_population(&self) -> f64 {
        let n = self.occupation;
        n / (1.0 + self.statistics.sign() * n + n)
    }
}

/// `w(2n+1)` for bosons, `w` for fermions.
pub fn decay_rate(params: &LindbladParams) -> f64 {
    params.emission_rate() + params.absorption_rate()
}

/// Excited population from `|ḡ⟩` at time `t`.
pub fn excited_population(params: &LindbladParams, t: f64) -> f64 {
    params.stationary_population() * -(-decay_rate(params) * t).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LindbladSample {
    pub time: f64,
    pub excited: f64,
    pub trace: f64,
}

type State = SVector<f64, 8>;

/// Basis order `(ē, ḡ)`; entries stored as (re, im) of ρ_ee, ρ_eg, ρ_ge, ρ_gg.
fn unpack(y: &State) -> Matrix2<Complex64> {
    Matrix2::new(Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]), Complex64::new(y[4], y[5]), Complex64::new(y[6], y[7]))
}

fn pack(m: &Matrix2<Complex64>, y: &mut State) {
    for (i, z) in [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]].iter().enumerate() {
        y[2 * i] = z.re;
        y[2 * i + 1] = z.im;
    }
}

#[derive(Clone)]
struct Generator {
    hamiltonian: Matrix2<Complex64>,
    lowering: Matrix2<Complex64>,
    down: f64,
    up: f64,
}

fn dissipator(l: &Matrix2<Complex64>, rho: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    let ld = l.adjoint();
    let ldl = ld * l;
    l * rho * ld - (ldl * rho + rho * ldl) * Complex64::new(0.5, 0.0)
}

impl System<f64, State> for Generator {
    fn system(&self, _t: f64, y: &State, dy: &mut State) {
        let rho = unpack(y);
        let i = Complex64::new(0.0, 1.0);
        let raising = self.lowering.adjoint();
        let d = -(self.hamiltonian * rho - rho * self.hamiltonian) * i
            + dissipator(&self.lowering, &rho) * Complex64::new(self.down, 0.0)
            + dissipator(&raising, &rho) * Complex64::new(self.up, 0.0);
        pack(&d, dy);
    }
}

/// Integrate the master equation from `|ḡ⟩⟨ḡ|` and sample at non-decreasing `times ≥ 0`.
pub fn evolve_numeric(params: &LindbladParams, times: &[f64]) -> Result<Vec<LindbladSample>> {
    params.validate()?;
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || times.windows(2).any(|w| w[1] < w[0]) {
        return domain("sample times must be finite, non-negative and non-decreasing");
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let generator = Generator {
        hamiltonian: Matrix2::new(Complex64::new(params.level_gap, 0.0), zero, zero, zero),
        lowering: Matrix2::new(zero, zero, one, zero),
        down: params.emission_rate(),
        up: params.absorption_rate(),
    };
    let mut state = State::zeros();
    state[6] = 1.0;
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t > now {
            let mut solver = Dop853::new(generator.clone(), now, t, t - now, state, RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE);
            solver.set_output(OutputType::Sparse);
            solver.integrate().map_err(|e| Error::Integration(format!("{e:?}")))?;
            state = *solver.y_out().last().ok_or_else(|| Error::Integration("solver returned no output".into()))?;
            now = t;
        }
        let rho = unpack(&state);
        let (ee, gg) = (rho[(0, 0)].re, rho[(1, 1)].re);
        let slack = 1e-10;
        if ee < -slack || gg < -slack || rho[(0, 1)].norm_sqr() > ee * gg + slack {
            return Err(Error::Integration(format!("density matrix lost positivity at t = {t}")));
        }
        out.push(LindbladSample { time: t, excited: ee, trace: ee + gg });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub weight: f64,
    pub decay_rate: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// Set when the data do not pin down the decay (see `reason`).
    pub flagged: bool,
    pub reason: Option<String>,
}

pub const MIN_SAMPLES: usize = 10;

/// Least-squares fit of `P∞(1 - e^{-γt})` with known occupation; returns the weight `γ / (1 + s n + n)`.
pub fn extract_coupling(samples: &[(f64, f64)], occupation: f64, statistics: Statistics) -> Result<FitReport> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::Estimation(format!("{} samples, need at least {MIN_SAMPLES}", samples.len())));
    }
    let probe = LindbladParams::new(1.0, occupation, statistics)?;
    let p_inf = probe.stationary_population();
    if !(p_inf > 0.0) {
        return Err(Error::Estimation("zero occupation: the probe never gets excited".into()));
    }
    let t_max = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    let t_min = samples.iter().map(|s| s.0).filter(|&t| t > 0.0).fold(f64::INFINITY, f64::min);
    if !(t_max > 0.0 && t_min.is_finite()) {
        return Err(Error::Estimation("samples need positive times".into()));
    }
    let sse = |log_gamma: f64| -> f64 {
        let g = log_gamma.exp();
        samples.iter().map(|&(t, p)| (p - p_inf * -(-g * t).exp_m1()).powi(2)).sum()
    };
    let lo = (1e-3 / t_max).ln();
    let hi = (1e3 / t_min).ln();
    let scan = 400;
    let (best, _) = (0..=scan)
        .map(|i| lo + (hi - lo) * i as f64 / scan as f64)
        .map(|x| (x, sse(x)))
        .fold((lo, f64::INFINITY), |acc, (x, v)| if v < acc.1 { (x, v) } else { acc });
    let cell = (hi - lo) / scan as f64;
    let log_gamma = golden_min(sse, (best - cell).max(lo), (best + cell).min(hi), 120);
    if !log_gamma.is_finite() {
        return Err(Error::Estimation("fit did not converge".into()));
    }
    let gamma = log_gamma.exp();
    let residual = (sse(log_gamma) / samples.len() as f64).sqrt();
    let reason = if log_gamma - lo < 2.0 * cell || hi - log_gamma < 2.0 * cell {
        Some("decay rate at the edge of the search range".to_string())
    } else if gamma * t_max < 1.0 {
        Some(format!("samples cover only {:.3} decay times", gamma * t_max))
    } else if residual > 0.05 * p_inf {
        Some(format!("residual {residual:.3e} exceeds 5% of the stationary population"))
    } else {
        None
    };
    Ok(FitReport { weight: gamma / decay_rate(&probe), decay_rate: gamma, residual, flagged: reason.is_some(), reason })
}
