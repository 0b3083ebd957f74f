//! Discretized generators: the 1D oscillators as real symmetric tridiagonal
//! matrices and the 2D dilatation-rotation generator as `−iħA` with `A` real
//! antisymmetric.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{Grid1D, Grid2D};
use crate::error::{Error, Result};

/// Real symmetric tridiagonal operator on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalOperator {
    pub grid: Grid1D,
    pub diag: Vec<f64>,
    /// `off[i]` couples `i` and `i + 1`
    pub off: Vec<f64>,
}

fn check_params(omega: f64, hbar: f64) -> Result<()> {
    if !(omega >= 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("ω must be ≥ 0, got {omega}")));
    }
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidParameter(format!("ħ must be positive, got {hbar}")));
    }
    Ok(())
}

fn oscillator(grid: Grid1D, omega: f64, hbar: f64, sign: f64) -> Result<TridiagonalOperator> {
    check_params(omega, hbar)?;
    let h = grid.spacing();
    let k = hbar * hbar / (h * h);
    let diag = (0..grid.points)
        .map(|i| k + sign * 0.5 * omega * omega * grid.x(i).powi(2))
        .collect();
    Ok(TridiagonalOperator {
        grid,
        diag,
        off: vec![-0.5 * k; grid.points - 1],
    })
}

/// `½P² − ½ω²X²` with the three-point Laplacian and Dirichlet walls.
pub fn build_hamiltonian_inverted(grid: Grid1D, omega: f64, hbar: f64) -> Result<TridiagonalOperator> {
    oscillator(grid, omega, hbar, -1.0)
}

/// `½P² + ½ω²X²`, the control case.
pub fn build_hamiltonian_harmonic(grid: Grid1D, omega: f64, hbar: f64) -> Result<TridiagonalOperator> {
    oscillator(grid, omega, hbar, 1.0)
}

impl TridiagonalOperator {
    pub fn zero(grid: Grid1D) -> Self {
        Self {
            grid,
            diag: vec![0.0; grid.points],
            off: vec![0.0; grid.points - 1],
        }
    }

    /// `factor · self`; `−1` turns `h₂` into the piece the PU Hamiltonian carries.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            diag: self.diag.iter().map(|d| factor * d).collect(),
            off: self.off.iter().map(|o| factor * o).collect(),
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Gershgorin bound on the spectral radius.
    pub fn spectral_radius_bound(&self) -> f64 {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut r = self.diag[i].abs();
                if i > 0 {
                    r += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    r += self.off[i].abs();
                }
                r
            })
            .fold(0.0, f64::max)
    }

    /// Number of eigenvalues below `lambda` (Sturm sequence).
    pub fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.diag.len() {
            let b2 = if i > 0 { self.off[i - 1].powi(2) } else { 0.0 };
            d = self.diag[i] - lambda - if i > 0 { b2 / d } else { 0.0 };
            if d == 0.0 {
                d = -f64::EPSILON * (self.diag[i].abs() + lambda.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Eigenvalues in `[lo, hi)` by Sturm bisection, ascending.
    pub fn eigenvalues_in(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        if !(lo < hi) {
            return Err(Error::InvalidParameter(format!("empty interval [{lo}, {hi})")));
        }
        let k0 = self.count_below(lo);
        let k1 = self.count_below(hi);
        let tol = 4.0 * f64::EPSILON * self.spectral_radius_bound().max(1.0);
        Ok((k0..k1)
            .into_par_iter()
            .map(|k| {
                // smallest λ with count_below(λ) > k
                let (mut a, mut b) = (lo, hi);
                while b - a > tol {
                    let m = 0.5 * (a + b);
                    if self.count_below(m) > k {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                0.5 * (a + b)
            })
            .collect())
    }

    /// Solves `(I + iσ·self) x = rhs` with the Thomas algorithm.
    pub(crate) fn solve_shifted(&self, sigma: f64, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.diag.len();
        let i = Complex64::i();
        let mut c = vec![Complex64::default(); n];
        let mut d = vec![Complex64::default(); n];
        let mut denom = Complex64::new(1.0, 0.0) + i * sigma * self.diag[0];
        for k in 0..n {
            if k > 0 {
                let a = i * sigma * self.off[k - 1];
                denom = Complex64::new(1.0, 0.0) + i * sigma * self.diag[k] - a * c[k - 1];
                if denom.norm() < 1e-300 {
                    return Err(Error::SolverDivergence { iterations: k, residual: f64::INFINITY });
                }
                d[k] = (rhs[k] - a * d[k - 1]) / denom;
            } else {
                d[0] = rhs[0] / denom;
            }
            if k + 1 < n {
                c[k] = i * sigma * self.off[k] / denom;
            }
        }
        for k in (0..n - 1).rev() {
            let next = d[k + 1];
            d[k] -= c[k] * next;
        }
        Ok(d)
    }
}

/// `ĥ = (μ/2)Σ(qᵢpᵢ + pᵢqᵢ) + ν(q₁p₂ − q₂p₁)` with centered first
/// differences; stored as `ĥ = −iħA`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilrotOperator {
    pub grid: Grid2D,
    pub mu: f64,
    pub nu: f64,
    pub hbar: f64,
}

pub fn build_hamiltonian_dilrot(grid: Grid2D, mu: f64, nu: f64, hbar: f64) -> Result<DilrotOperator> {
    if !(mu.is_finite() && nu.is_finite()) {
        return Err(Error::InvalidParameter("μ and ν must be finite".into()));
    }
    check_params(0.0, hbar)?;
    Ok(DilrotOperator { grid, mu, nu, hbar })
}

impl DilrotOperator {
    /// Row `(i, j)` of `A` as (column, value) pairs. Each row is built on
    /// its own, so [`asymmetry`](Self::asymmetry) really compares two
    /// independent computations.
    fn row(&self, i: usize, j: usize) -> [(Option<usize>, f64); 4] {
        let g = self.grid;
        let n = g.points;
        let ax = g.axis();
        let inv = 1.0 / (2.0 * g.spacing());
        let (x, y) = (ax.x(i), ax.x(j));
        let half_mu = 0.5 * self.mu;
        // x-links carry (μ/2)(x_i + x_k) − νy, y-links (μ/2)(y_j + y_k) + νx
        let east = (i + 1 < n).then(|| (g.index(i + 1, j), (half_mu * (x + ax.x(i + 1)) - self.nu * y) * inv));
        let west = (i > 0).then(|| (g.index(i - 1, j), -(half_mu * (x + ax.x(i - 1)) - self.nu * y) * inv));
        let north = (j + 1 < n).then(|| (g.index(i, j + 1), (half_mu * (y + ax.x(j + 1)) + self.nu * x) * inv));
        let south = (j > 0).then(|| (g.index(i, j - 1), -(half_mu * (y + ax.x(j - 1)) + self.nu * x) * inv));
        [east, west, north, south].map(|e| match e {
            Some((c, v)) => (Some(c), v),
            None => (None, 0.0),
        })
    }

    /// `A v`.
    pub fn apply_generator(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.points;
        let mut out = vec![Complex64::default(); v.len()];
        out.par_chunks_mut(n).enumerate().for_each(|(j, row_out)| {
            for (i, o) in row_out.iter_mut().enumerate() {
                let mut s = Complex64::default();
                for (c, a) in self.row(i, j) {
                    if let Some(c) = c {
                        s += a * v[c];
                    }
                }
                *o = s;
            }
        });
        out
    }

    /// `ĥ v = −iħ A v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let f = Complex64::new(0.0, -self.hbar);
        self.apply_generator(v).into_iter().map(|a| f * a).collect()
    }

    /// `max |A_kl + A_lk|`; ĥ is Hermitian exactly when this vanishes.
    pub fn asymmetry(&self) -> f64 {
        let n = self.grid.points;
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let k = self.grid.index(i, j);
                for (c, a) in self.row(i, j) {
                    let Some(c) = c else { continue };
                    let (ci, cj) = (c % n, c / n);
                    let back = self
                        .row(ci, cj)
                        .iter()
                        .find(|(cc, _)| *cc == Some(k))
                        .map(|(_, v)| *v)
                        .unwrap_or(0.0);
                    worst = worst.max((a + back).abs());
                }
            }
        }
        worst
    }

    pub fn spectral_radius_bound(&self) -> f64 {
        let n = self.grid.points;
        let mut worst = 0.0f64;
        for j in [0, n / 2, n - 1] {
            for i in [0, n / 2, n - 1] {
                let r: f64 = self.row(i, j).iter().map(|(_, a)| a.abs()).sum();
                worst = worst.max(r);
            }
        }
        // row sums are convex in the coordinates, so the corners dominate
        self.hbar * worst
    }

    /// `⟨v|ĥ|v⟩ / ⟨v|v⟩`.
    pub fn rayleigh_quotient(&self, v: &[Complex64]) -> Complex64 {
        let hv = self.apply(v);
        let num: Complex64 = v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        num / den
    }
}

/// Any of the discretized generators the evolver accepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiscreteOperator {
    Tridiagonal(TridiagonalOperator),
    Dilrot(DilrotOperator),
}

impl DiscreteOperator {
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        match self {
            DiscreteOperator::Tridiagonal(t) => t.apply(v),
            DiscreteOperator::Dilrot(d) => d.apply(v),
        }
    }

    pub fn spectral_radius_bound(&self) -> f64 {
        match self {
            DiscreteOperator::Tridiagonal(t) => t.spectral_radius_bound(),
            DiscreteOperator::Dilrot(d) => d.spectral_radius_bound(),
        }
    }
}

impl From<TridiagonalOperator> for DiscreteOperator {
    fn from(t: TridiagonalOperator) -> Self {
        DiscreteOperator::Tridiagonal(t)
    }
}

impl From<DilrotOperator> for DiscreteOperator {
    fn from(d: DilrotOperator) -> Self {
        DiscreteOperator::Dilrot(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverted_is_symmetric_and_free_at_zero_frequency() {
        let g = Grid1D::new(5.0, 101).unwrap();
        let h = build_hamiltonian_inverted(g, 0.0, 1.0).unwrap();
        let k = 1.0 / g.spacing().powi(2);
        assert!(h.diag.iter().all(|&d| d == k));
        assert!(h.off.iter().all(|&o| o == -0.5 * k));
    }

    #[test]
    fn sturm_counts_a_diagonal_matrix() {
        let g = Grid1D::new(1.0, 64).unwrap();
        let mut t = TridiagonalOperator::zero(g);
        for (i, d) in t.diag.iter_mut().enumerate() {
            *d = i as f64;
        }
        assert_eq!(t.count_below(10.5), 11);
        let ev = t.eigenvalues_in(4.5, 7.5).unwrap();
        assert_eq!(ev.len(), 3);
        assert!((ev[0] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn thomas_solves() {
        let g = Grid1D::new(3.0, 64).unwrap();
        let h = build_hamiltonian_inverted(g, 1.0, 1.0).unwrap();
        let b: Vec<Complex64> = (0..64).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let x = h.solve_shifted(0.3, &b).unwrap();
        let hx = h.apply(&x);
        for k in 0..64 {
            let r = x[k] + Complex64::i() * 0.3 * hx[k] - b[k];
            assert!(r.norm() < 1e-10);
        }
    }

    #[test]
    fn dilrot_is_exactly_antisymmetric() {
        let g = Grid2D::new(3.0, 64).unwrap();
        let d = build_hamiltonian_dilrot(g, 0.7, -1.3, 1.0).unwrap();
        assert_eq!(d.asymmetry(), 0.0);
    }

    #[test]
    fn dilrot_vanishes_without_rates() {
        let g = Grid2D::new(3.0, 64).unwrap();
        let d = build_hamiltonian_dilrot(g, 0.0, 0.0, 1.0).unwrap();
        let v: Vec<Complex64> = (0..g.len()).map(|k| Complex64::new(k as f64, 0.5)).collect();
        assert!(d.apply(&v).iter().all(|z| *z == Complex64::default()));
    }
}
