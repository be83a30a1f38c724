use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SITES: usize = 10;

/// Full many-body Hamiltonian of a pairing ring in the occupation basis (Jordan–Wigner).
#[derive(Debug, Clone)]
pub struct FockRing {
    sites: usize,
    energies: Vec<f64>,
    /// `c_j` in the energy eigenbasis.
    annihilators: Vec<DMatrix<f64>>,
}

/// Matrix of `c_j` on `2^n` occupation states; bit `j` is site `j`.
fn annihilator(n: usize, j: usize) -> DMatrix<f64> {
    let dim = 1usize << n;
    let mut c = DMatrix::zeros(dim, dim);
    for state in 0..dim {
        if state & (1 << j) != 0 {
            let parity = (state & ((1 << j) - 1)).count_ones();
            let sign = if parity.is_multiple_of(2) { 1.0 } else { -1.0 };
            c[(state ^ (1 << j), state)] = sign;
        }
    }
    c
}

impl FockRing {
    /// `H = Σ_{lj} h_lj c†_l c_j + Δ Σ_j (c†_{j+1} c†_j + c_j c_{j+1})`, periodic.
    /// Diagonal entries of `h` act as on-site energies.
    pub fn new(hopping: &[Vec<f64>], pairing: f64) -> Result<Self> {
        let n = hopping.len();
        if n > MAX_SITES {
            return Err(Error::Capacity { dimension: 1 << n, cap: 1 << MAX_SITES });
        }
        if n < 2 || hopping.iter().any(|row| row.len() != n) {
            return Err(Error::Contract("hopping matrix must be square with at least 2 sites".into()));
        }
        let c: Vec<DMatrix<f64>> = (0..n).map(|j| annihilator(n, j)).collect();
        let dim = 1usize << n;
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        for l in 0..n {
            for j in 0..n {
                if hopping[l][j] != 0.0 {
                    h += hopping[l][j] * c[l].transpose() * &c[j];
                }
            }
        }
        for j in 0..n {
            let k = (j + 1) % n;
            let pair = c[k].transpose() * c[j].transpose();
            h += pairing * (&pair + pair.transpose());
        }
        if (&h - h.transpose()).amax() > 1e-12 {
            return Err(Error::Contract("Fock Hamiltonian is not Hermitian".into()));
        }
        let eig = SymmetricEigen::new(h);
        let v = eig.eigenvectors;
        let annihilators = c.iter().map(|cj| v.transpose() * cj * &v).collect();
        Ok(Self { sites: n, energies: eig.eigenvalues.iter().copied().collect(), annihilators })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Gibbs weights in the eigenbasis; `β = ∞` spreads weight over the ground multiplet.
    pub fn thermal_weights(&self, beta: f64) -> Vec<f64> {
        let e0 = self.energies.iter().copied().fold(f64::INFINITY, f64::min);
        let raw: Vec<f64> = if beta.is_infinite() {
            self.energies.iter().map(|&e| if e - e0 < 1e-9 { 1.0 } else { 0.0 }).collect()
        } else {
            self.energies.iter().map(|&e| (-beta * (e - e0)).exp()).collect()
        };
        let z: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / z).collect()
    }

    /// `⟨c†_l(τ) c_j(0)⟩ = Σ_ab p_a e^{i(E_a-E_b)τ} (c†_l)_ab (c_j)_ba`.
    pub fn correlator(&self, l: usize, j: usize, tau: f64, beta: f64) -> Complex64 {
        let p = self.thermal_weights(beta);
        let cl = &self.annihilators[l];
        let cj = &self.annihilators[j];
        let dim = p.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..dim {
            if p[a] == 0.0 {
                continue;
            }
            for b in 0..dim {
                // (c†_l)_ab = (c_l)_ba
                let m = cl[(b, a)] * cj[(b, a)];
                if m != 0.0 {
                    acc += Complex64::from_polar(p[a] * m, (self.energies[a] - self.energies[b]) * tau);
                }
            }
        }
        acc
    }
}
