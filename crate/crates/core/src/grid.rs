//! Brillouin-zone grids for the ring and the square lattice.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A grid point: integer index in the symmetric zone and its momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    /// Signed index per axis, in `(-N/2, N/2]`. Unused axes are 0.
    pub index: [i64; 2],
    /// Momentum per axis in `(-π/a, π/a]`. Unused axes are 0.
    pub k: [f64; 2],
}

impl GridPoint {
    /// Label of the point-group orbit: `|m|` in 1D, sorted `(|mx|, |my|)` in 2D.
    pub fn orbit_key(&self) -> (i64, i64) {
        let a = self.index[0].abs();
        let b = self.index[1].abs();
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn is_origin(&self) -> bool {
        self.index == [0, 0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrillouinGrid {
    dimension: usize,
    sites_per_axis: usize,
    lattice_constant: f64,
}

impl BrillouinGrid {
    pub fn new(dimension: usize, sites_per_axis: usize, lattice_constant: f64) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return domain(format!("dimension must be 1 or 2, got {dimension}"));
        }
        if sites_per_axis == 0 {
            return domain("sites_per_axis must be positive");
        }
        if !(lattice_constant > 0.0 && lattice_constant.is_finite()) {
            return domain(format!("lattice constant must be positive, got {lattice_constant}"));
        }
        Ok(Self { dimension, sites_per_axis, lattice_constant })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn sites_per_axis(&self) -> usize {
        self.sites_per_axis
    }

    pub fn lattice_constant(&self) -> f64 {
        self.lattice_constant
    }

    pub fn len(&self) -> usize {
        self.sites_per_axis.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Momentum spacing `2π/(N a)`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / (self.sites_per_axis as f64 * self.lattice_constant)
    }

    /// Map `m ∈ 0..N` to the symmetric index in `(-N/2, N/2]`.
    pub fn symmetric_index(&self, m: usize) -> i64 {
        let n = self.sites_per_axis as i64;
        let m = m as i64 % n;
        if 2 * m > n {
            m - n
        } else {
            m
        }
    }

    pub fn momentum_of(&self, index: i64) -> f64 {
        index as f64 * self.spacing()
    }

    pub fn point(&self, index: [i64; 2]) -> GridPoint {
        let mut k = [0.0; 2];
        for (axis, kk) in k.iter_mut().enumerate().take(self.dimension) {
            *kk = self.momentum_of(index[axis]);
        }
        GridPoint { index, k }
    }

    /// All grid momenta, x-major, `m` ascending from 0.
    pub fn points(&self) -> Vec<GridPoint> {
        let n = self.sites_per_axis;
        match self.dimension {
            1 => (0..n).map(|m| self.point([self.symmetric_index(m), 0])).collect(),
            _ => {
                let mut out = Vec::with_capacity(n * n);
                for mx in 0..n {
                    for my in 0..n {
                        out.push(self.point([self.symmetric_index(mx), self.symmetric_index(my)]));
                    }
                }
                out
            }
        }
    }

    /// Orbit sizes keyed by [`GridPoint::orbit_key`].
    pub fn orbit_sizes(&self) -> BTreeMap<(i64, i64), usize> {
        let mut sizes = BTreeMap::new();
        for p in self.points() {
            *sizes.entry(p.orbit_key()).or_insert(0) += 1;
        }
        sizes
    }

    /// One representative per orbit, with non-negative components sorted ascending in 2D.
    pub fn orbit_representatives(&self) -> Vec<GridPoint> {
        self.orbit_sizes()
            .keys()
            .map(|&(a, b)| match self.dimension {
                1 => self.point([b, 0]),
                _ => self.point([a, b]),
            })
            .collect()
    }
}
