//! Uniform grids and wavefunctions sampled on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 64;
/// Probability in the boundary frame above which a state counts as contaminated.
pub const CONTAMINATION_LIMIT: f64 = 1e-8;
/// Width, in cells, of the boundary frame.
pub const BOUNDARY_CELLS: usize = 4;

/// Points `x_i = −L + i·h`, `h = 2L/(N−1)`, with Dirichlet walls just outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub extent: f64,
    pub points: usize,
}

impl Grid1D {
    pub fn new(extent: f64, points: usize) -> Result<Self> {
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid half-width must be positive, got {extent}")));
        }
        if points < MIN_POINTS {
            return Err(Error::InvalidParameter(format!("grid needs N ≥ {MIN_POINTS}, got {points}")));
        }
        Ok(Self { extent, points })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.extent + i as f64 * self.spacing()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.x(i)).collect()
    }
}

/// Square `N × N` grid, row-major with `x₁` fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub extent: f64,
    pub points: usize,
}

impl Grid2D {
    pub fn new(extent: f64, points: usize) -> Result<Self> {
        let g = Grid1D::new(extent, points)?;
        Ok(Self {
            extent: g.extent,
            points: g.points,
        })
    }

    pub fn axis(&self) -> Grid1D {
        Grid1D {
            extent: self.extent,
            points: self.points,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.axis().spacing()
    }

    pub fn len(&self) -> usize {
        self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.points + i
    }

    pub fn point(&self, k: usize) -> (f64, f64) {
        let a = self.axis();
        (a.x(k % self.points), a.x(k / self.points))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dim", rename_all = "snake_case")]
pub enum Domain {
    Line(Grid1D),
    Plane(Grid2D),
}

impl Domain {
    pub fn len(&self) -> usize {
        match self {
            Domain::Line(g) => g.points,
            Domain::Plane(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Volume element `h^d`.
    pub fn cell(&self) -> f64 {
        match self {
            Domain::Line(g) => g.spacing(),
            Domain::Plane(g) => g.spacing().powi(2),
        }
    }

    fn in_frame(&self, k: usize) -> bool {
        let near = |i: usize, n: usize| i < BOUNDARY_CELLS || i + BOUNDARY_CELLS >= n;
        match self {
            Domain::Line(g) => near(k, g.points),
            Domain::Plane(g) => near(k % g.points, g.points) || near(k / g.points, g.points),
        }
    }
}

/// Sampled wavefunction with its cached L² norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveState {
    pub domain: Domain,
    pub amplitudes: Vec<Complex64>,
    pub norm: f64,
}

impl WaveState {
    pub fn new(domain: Domain, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != domain.len() {
            return Err(Error::InvalidParameter(format!(
                "{} amplitudes for a grid of {} points",
                amplitudes.len(),
                domain.len()
            )));
        }
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        let norm = l2_norm(&amplitudes, domain.cell());
        Ok(Self {
            domain,
            amplitudes,
            norm,
        })
    }

    pub fn from_fn_1d(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(Domain::Line(grid), grid.coordinates().into_iter().map(f).collect())
    }

    pub fn from_fn_2d(grid: Grid2D, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let amps = (0..grid.len())
            .map(|k| {
                let (x, y) = grid.point(k);
                f(x, y)
            })
            .collect();
        Self::new(Domain::Plane(grid), amps)
    }

    pub fn recompute_norm(&self) -> f64 {
        l2_norm(&self.amplitudes, self.domain.cell())
    }

    pub fn normalized(mut self) -> Result<Self> {
        if self.norm == 0.0 {
            return Err(Error::InvalidParameter("cannot normalize the zero state".into()));
        }
        let s = 1.0 / self.norm;
        self.amplitudes.iter_mut().for_each(|a| *a *= s);
        self.norm = self.recompute_norm();
        Ok(self)
    }

    /// `⟨self|other⟩` with the grid measure.
    pub fn inner(&self, other: &WaveState) -> Result<Complex64> {
        if self.domain != other.domain {
            return Err(Error::InvalidParameter("states live on different grids".into()));
        }
        let mut acc = crate::quadrature::KahanComplex::default();
        for (a, b) in self.amplitudes.iter().zip(&other.amplitudes) {
            acc.add(a.conj() * b);
        }
        Ok(acc.sum() * self.domain.cell())
    }

    /// Probability in the outer frame of `BOUNDARY_CELLS` cells.
    pub fn boundary_mass(&self) -> f64 {
        let mut s = 0.0;
        for (k, a) in self.amplitudes.iter().enumerate() {
            if self.domain.in_frame(k) {
                s += a.norm_sqr();
            }
        }
        s * self.domain.cell()
    }

    pub fn contaminated(&self) -> bool {
        self.boundary_mass() > CONTAMINATION_LIMIT * self.norm * self.norm
    }

    /// `⟨x²⟩` (1D) or `⟨r²⟩` (2D).
    pub fn second_moment(&self) -> f64 {
        let mut s = 0.0;
        for (k, a) in self.amplitudes.iter().enumerate() {
            let r2 = match &self.domain {
                Domain::Line(g) => g.x(k).powi(2),
                Domain::Plane(g) => {
                    let (x, y) = g.point(k);
                    x * x + y * y
                }
            };
            s += r2 * a.norm_sqr();
        }
        s * self.domain.cell() / (self.norm * self.norm)
    }
}

fn l2_norm(a: &[Complex64], cell: f64) -> f64 {
    // Kahan sum of |ψ|²
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in a {
        let y = v.norm_sqr() - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    (sum * cell).sqrt()
}
