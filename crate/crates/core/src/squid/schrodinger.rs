//! Finite-difference eigenproblem for a particle on a line with Dirichlet
//! walls, `H = −κ d²/dφ² + V(φ)`.

use crate::error::{Error, Result};
use crate::tridiag::{dot, SymTridiagonal};

/// Uniform grid of interior points strictly between two Dirichlet walls at
/// `phi_min` and `phi_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    pub phi_min: f64,
    pub phi_max: f64,
    pub n_points: usize,
}

impl SpatialGrid {
    pub const MIN_POINTS: usize = 128;

    pub fn new(phi_min: f64, phi_max: f64, n_points: usize) -> Result<Self> {
        if !(phi_min < 0.0 && phi_max > 0.0) || !phi_min.is_finite() || !phi_max.is_finite() {
            return Err(Error::InvalidArgument(format!("grid must straddle zero, got [{phi_min}, {phi_max}]")));
        }
        if n_points < Self::MIN_POINTS {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least {} points, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        Ok(SpatialGrid { phi_min, phi_max, n_points })
    }

    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        SpatialGrid::new(-half_width, half_width, n_points)
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        (self.phi_max - self.phi_min) / (self.n_points + 1) as f64
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.phi_min + (i + 1) as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (self.phi_min + self.phi_max).abs() <= 1e-12 * (self.phi_max - self.phi_min)
    }

    /// Same domain with twice as many interior points.
    pub fn refined(&self) -> Self {
        SpatialGrid { n_points: 2 * self.n_points, ..*self }
    }

    /// Amplitude mask of the projector on `sign·φ > 0` at point `i`. A point
    /// sitting on `φ = 0` keeps half of its weight on each side.
    pub fn half_line_mask(&self, i: usize, positive: bool) -> f64 {
        let x = self.point(i);
        if x.abs() <= 1e-9 * self.spacing() {
            std::f64::consts::FRAC_1_SQRT_2
        } else if (x > 0.0) == positive {
            1.0
        } else {
            0.0
        }
    }
}

/// Lowest eigenpairs on a [`SpatialGrid`]. Wavefunctions are real and
/// orthonormal under `⟨f|g⟩ = Σ f g Δφ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    pub grid: SpatialGrid,
    /// Ascending, in the units of the potential.
    pub energies: Vec<f64>,
    /// `E_{k+1} − E_k`, resolved independently of the absolute energies so
    /// that doublet splittings below their rounding error survive.
    pub gaps: Vec<f64>,
    pub wavefunctions: Vec<Vec<f64>>,
}

impl SpectralBasis {
    #[inline]
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// `E₁ − E₀`
    pub fn splitting(&self) -> f64 {
        self.gaps[0]
    }

    /// `E_k − E₀`, accumulated from the gaps.
    pub fn excitation_energies(&self) -> Vec<f64> {
        std::iter::once(0.0)
            .chain(self.gaps.iter().scan(0.0, |acc, g| {
                *acc += g;
                Some(*acc)
            }))
            .collect()
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        dot(f, g) * self.grid.spacing()
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, f) in self.wavefunctions.iter().enumerate() {
            for (j, g) in self.wavefunctions.iter().enumerate().skip(i) {
                let e = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.inner(f, g) - e).abs());
            }
        }
        worst
    }

    /// `max |ψ(φ) ∓ ψ(−φ)|` relative to `max |ψ|` for a mode expected to
    /// have the given parity. Only meaningful on symmetric grids.
    pub fn parity_residual(&self, mode: usize, even: bool) -> f64 {
        let psi = &self.wavefunctions[mode];
        let n = psi.len();
        let scale = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (0..n)
            .map(|i| {
                let mirror = psi[n - 1 - i];
                if even {
                    (psi[i] - mirror).abs()
                } else {
                    (psi[i] + mirror).abs()
                }
            })
            .fold(0.0, f64::max)
            / scale
    }

    /// Boundary amplitude relative to the peak, worst over all modes.
    pub fn boundary_ratio(&self) -> (usize, f64) {
        self.wavefunctions
            .iter()
            .enumerate()
            .map(|(k, psi)| {
                let scale = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let edge = psi[0].abs().max(psi[psi.len() - 1].abs());
                (k, edge / scale)
            })
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    }
}

/// Discretizes `−κ d²/dφ² + V(φ)` with second-order central differences and
/// returns the lowest `modes` eigenpairs.
///
/// With `symmetric_potential` on a symmetric grid with an even point count,
/// the problem splits into even and odd sectors on the half line. Near-
/// degenerate tunnelling doublets are then resolved through the exact
/// discrete identity `E_odd − E_even = 2κ/Δφ² · ψ_e(φ₁)ψ_o(φ₁) / ⟨ψ_e|ψ_o⟩_half`,
/// where `φ₁` is the grid point nearest the origin, instead of by
/// subtracting two nearly equal eigenvalues.
pub fn solve_fd(
    grid: &SpatialGrid,
    kinetic: f64,
    potential: impl Fn(f64) -> f64,
    modes: usize,
    symmetric_potential: bool,
) -> Result<SpectralBasis> {
    if !(kinetic > 0.0) || !kinetic.is_finite() {
        return Err(Error::InvalidArgument(format!("kinetic coefficient must be positive, got {kinetic}")));
    }
    if modes == 0 || modes > grid.n_points / 4 {
        return Err(Error::InvalidArgument(format!("cannot resolve {modes} modes on {} points", grid.n_points)));
    }
    let h = grid.spacing();
    let scale = kinetic / (h * h);
    let values: Vec<f64> = grid.points().into_iter().map(&potential).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("potential is not finite on the grid".into()));
    }
    let vref = values.iter().cloned().fold(f64::INFINITY, f64::min);

    let basis = if symmetric_potential && grid.is_symmetric() && grid.n_points.is_multiple_of(2) {
        solve_by_parity(grid, &values, vref, scale, modes)?
    } else {
        solve_full(grid, &values, vref, scale, modes)?
    };
    if let Some((k, g)) = basis.gaps.iter().enumerate().find(|(_, g)| !(**g > 0.0)) {
        return Err(Error::Eigensolver(format!("levels {k} and {} are not strictly increasing (gap {g:e})", k + 1)));
    }
    Ok(basis)
}

fn solve_full(grid: &SpatialGrid, values: &[f64], vref: f64, scale: f64, modes: usize) -> Result<SpectralBasis> {
    let n = grid.n_points;
    let diag: Vec<f64> = values.iter().map(|v| 2.0 + (v - vref) / scale).collect();
    let t = SymTridiagonal::new(diag, vec![-1.0; n - 1])?;
    let (mu, vecs) = t.lowest(modes)?;
    let norm = 1.0 / grid.spacing().sqrt();
    let mid = grid.points().iter().position(|&x| x > 0.0).unwrap_or(n / 2);
    let wavefunctions = vecs
        .into_iter()
        .map(|v| {
            let right: f64 = v[mid..].iter().sum();
            let total: f64 = v.iter().sum();
            let key = if right.abs() > 1e-8 { right } else { total };
            let sign = if key < 0.0 { -norm } else { norm };
            v.into_iter().map(|x| x * sign).collect()
        })
        .collect();
    let gaps = mu.windows(2).map(|w| (w[1] - w[0]) * scale).collect();
    Ok(SpectralBasis { grid: *grid, energies: mu.into_iter().map(|m| vref + m * scale).collect(), gaps, wavefunctions })
}

fn solve_by_parity(grid: &SpatialGrid, values: &[f64], vref: f64, scale: f64, modes: usize) -> Result<SpectralBasis> {
    let n = grid.n_points;
    let half = n / 2;
    let right = &values[half..];
    let base: Vec<f64> = right.iter().map(|v| 2.0 + (v - vref) / scale).collect();
    let sector = |shift: f64, count: usize| -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        if count == 0 {
            return Ok((Vec::new(), Vec::new()));
        }
        let mut d = base.clone();
        d[0] += shift;
        SymTridiagonal::new(d, vec![-1.0; half - 1])?.lowest(count)
    };
    // mirror coupling −ψ(−φ₁) = ∓ψ(φ₁)
    let (mu_even, v_even) = sector(-1.0, modes.div_ceil(2))?;
    let (mu_odd, v_odd) = sector(1.0, modes / 2)?;

    let norm = 1.0 / (2.0 * grid.spacing()).sqrt();
    let expand = |v: &[f64], even: bool| -> Vec<f64> {
        let sign = if v.iter().sum::<f64>() < 0.0 { -norm } else { norm };
        let mut full = Vec::with_capacity(n);
        full.extend(v.iter().rev().map(|x| if even { x * sign } else { -x * sign }));
        full.extend(v.iter().map(|x| x * sign));
        full
    };

    // levels alternate in parity: even, odd, even, ...
    let mut energies = Vec::with_capacity(modes);
    let mut gaps = Vec::with_capacity(modes.saturating_sub(1));
    let mut wavefunctions = Vec::with_capacity(modes);
    for k in 0..modes {
        let j = k / 2;
        if k % 2 == 0 {
            energies.push(vref + mu_even[j] * scale);
            wavefunctions.push(expand(&v_even[j], true));
            if k > 0 {
                gaps.push((mu_even[j] - mu_odd[j - 1]) * scale);
            }
        } else {
            let (ve, vo) = (&v_even[j], &v_odd[j]);
            let overlap = dot(ve, vo);
            let gap = if overlap.abs() > 0.5 {
                2.0 * scale * ve[0] * vo[0] / overlap
            } else {
                (mu_odd[j] - mu_even[j]) * scale
            };
            energies.push(vref + mu_even[j] * scale + gap);
            gaps.push(gap);
            wavefunctions.push(expand(vo, false));
        }
    }
    Ok(SpectralBasis { grid: *grid, energies, gaps, wavefunctions })
}
