use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SITES: usize = 64;

/// Diagonalised `2N × 2N` Bogoliubov–de Gennes matrix of a ring in the basis `(c, c†)`.
#[derive(Debug, Clone)]
pub struct BdgSolution {
    sites: usize,
    /// All `2N` eigenvalues, ascending (they come in ± pairs).
    pub eigenvalues: Vec<f64>,
    /// Orthogonal eigenvector matrix, columns ordered like `eigenvalues`.
    pub transformation: DMatrix<f64>,
}

impl BdgSolution {
    /// Non-negative quasiparticle energies (upper half of the spectrum), ascending.
    pub fn energies(&self) -> Vec<f64> {
        self.eigenvalues[self.sites..].to_vec()
    }

    /// `⟨c†_l(τ) c_j(0)⟩` in the thermal state: `Σ_n W_{N+l,n} W_{N+j,n} e^{-iE_n τ} / (1 + e^{-βE_n})`.
    pub fn correlator(&self, l: usize, j: usize, tau: f64, beta: f64) -> Complex64 {
        let n = self.sites;
        let w = &self.transformation;
        let mut acc = Complex64::new(0.0, 0.0);
        for (col, &e) in self.eigenvalues.iter().enumerate() {
            let x = beta * e;
            let hole = if x.is_nan() {
                0.5
            } else if x >= 0.0 {
                1.0 / (1.0 + (-x).exp())
            } else {
                let ex = x.exp();
                ex / (1.0 + ex)
            };
            acc += Complex64::from_polar(w[(n + l, col)] * w[(n + j, col)] * hole, -e * tau);
        }
        acc
    }
}

/// BdG matrix `[[h, D], [-D, -h]]` with `D_{j+1,j} = Δ = -D_{j,j+1}` on a periodic ring.
pub fn bdg_spectrum(hopping: &[Vec<f64>], pairing: f64) -> Result<BdgSolution> {
    let n = hopping.len();
    if n > MAX_SITES {
        return Err(Error::Capacity { dimension: 2 * n, cap: 2 * MAX_SITES });
    }
    if n < 2 || hopping.iter().any(|row| row.len() != n) {
        return Err(Error::Contract("hopping matrix must be square with at least 2 sites".into()));
    }
    for (l, row) in hopping.iter().enumerate() {
        for (j, &h) in row.iter().enumerate() {
            if (h - hopping[j][l]).abs() > 1e-12 * (1.0 + h.abs()) {
                return Err(Error::Contract(format!("hopping matrix is not Hermitian at ({l}, {j})")));
            }
        }
    }
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for l in 0..n {
        for j in 0..n {
            m[(l, j)] = hopping[l][j];
            m[(n + l, n + j)] = -hopping[l][j];
        }
    }
    for j in 0..n {
        let k = (j + 1) % n;
        m[(k, n + j)] += pairing;
        m[(j, n + k)] -= pairing;
        m[(n + k, j)] -= pairing;
        m[(n + j, k)] += pairing;
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let transformation = DMatrix::from_fn(2 * n, 2 * n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(BdgSolution { sites: n, eigenvalues, transformation })
}
