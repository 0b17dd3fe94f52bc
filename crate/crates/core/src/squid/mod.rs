//! rf-SQUID flux dynamics at half-integer external flux bias.
//!
//! The flux is measured in units of the flux quantum relative to the bias,
//! `φ = (Φ − Φ_ext)/Φ₀`, so the capacitance enters as the effective mass
//! `CΦ₀²` and the kinetic term is `−ħ²/(2CΦ₀²) d²/dφ²`.

mod flux;
mod schrodinger;

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

pub use flux::{localized_states, two_level_consistency, FluxPropagator, FluxState, MAX_LEAKAGE};
pub use schrodinger::{solve_fd, SpatialGrid, SpectralBasis};

use crate::error::{Error, Result};

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Superconducting flux quantum `h/2e` (Wb).
pub const FLUX_QUANTUM: f64 = TAU * HBAR / (2.0 * ELEMENTARY_CHARGE);

/// Number of ground-state widths kept beyond each minimum by [`default_grid`].
pub const DEFAULT_GRID_SIGMAS: f64 = 10.0;
pub const DEFAULT_GRID_POINTS: usize = 2048;
pub const DEFAULT_MODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PotentialForm {
    /// `(π³/3) I_c Φ₀ (φ² − φ₀²)²`
    #[default]
    Quartic,
    /// `Φ₀²φ²/(2L) + (I_c Φ₀/2π) cos 2πφ`
    FullCosine,
}

impl PotentialForm {
    pub const ALL: [PotentialForm; 2] = [PotentialForm::Quartic, PotentialForm::FullCosine];

    pub fn name(self) -> &'static str {
        match self {
            PotentialForm::Quartic => "quartic",
            PotentialForm::FullCosine => "full_cosine",
        }
    }
}

impl fmt::Display for PotentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PotentialForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quartic" => Ok(PotentialForm::Quartic),
            "full_cosine" => Ok(PotentialForm::FullCosine),
            other => Err(Error::InvalidArgument(format!("unknown potential form `{other}`"))),
        }
    }
}

/// Circuit parameters, SI units. The external flux is `(n + 1/2)Φ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquidParams {
    pub inductance: f64,
    pub capacitance: f64,
    pub critical_current: f64,
    pub flux_bias: i64,
    pub potential_form: PotentialForm,
}

impl SquidParams {
    pub fn new(inductance: f64, capacitance: f64, critical_current: f64) -> Result<Self> {
        for (name, v) in [("L", inductance), ("C", capacitance), ("I_c", critical_current)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(SquidParams {
            inductance,
            capacitance,
            critical_current,
            flux_bias: 0,
            potential_form: PotentialForm::Quartic,
        })
    }

    /// L = 150 pH, C = 0.15 pF, I_c = 2.5 μA.
    pub fn benchmark() -> Self {
        SquidParams::new(150e-12, 0.15e-12, 2.5e-6).expect("benchmark parameters are positive")
    }

    pub fn with_form(self, potential_form: PotentialForm) -> Self {
        SquidParams { potential_form, ..self }
    }

    pub fn with_critical_current(self, critical_current: f64) -> Result<Self> {
        let p = SquidParams::new(self.inductance, self.capacitance, critical_current)?;
        Ok(SquidParams { flux_bias: self.flux_bias, potential_form: self.potential_form, ..p })
    }

    /// Effective mass `CΦ₀²` of the dimensionless flux coordinate.
    #[inline]
    pub fn mass(&self) -> f64 {
        self.capacitance * FLUX_QUANTUM * FLUX_QUANTUM
    }

    /// `ħ²/(2CΦ₀²)`
    #[inline]
    pub fn kinetic(&self) -> f64 {
        HBAR * HBAR / (2.0 * self.mass())
    }

    fn quartic_coefficient(&self) -> f64 {
        PI.powi(3) / 3.0 * self.critical_current * FLUX_QUANTUM
    }
}

/// `β = 2πLI_c/Φ₀` and whether `1 < β < 5π/2`.
pub fn bistability_index(params: &SquidParams) -> (f64, bool) {
    let beta = TAU * params.inductance * params.critical_current / FLUX_QUANTUM;
    (beta, beta > 1.0 && beta < 2.5 * PI)
}

/// Positive well position `φ₀ ∈ (0, 1/2)` solving `sin(2πφ)/φ = Φ₀/(LI_c)`.
pub fn find_minima(params: &SquidParams) -> Result<f64> {
    let (beta, bistable) = bistability_index(params);
    if !bistable {
        return Err(Error::NotBistable { beta });
    }
    let ratio = FLUX_QUANTUM / (params.inductance * params.critical_current);
    // sin(2πφ)/φ decreases from 2π at φ = 0 to 0 at φ = 1/2
    let g = |phi: f64| {
        let s = if phi == 0.0 { TAU } else { (TAU * phi).sin() / phi };
        s - ratio
    };
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Double-well potential energy (J) as a function of `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    pub params: SquidParams,
    /// Well position used by the quartic form; `None` when monostable.
    pub phi0: Option<f64>,
}

impl Potential {
    /// The quartic form requires a double well; the cosine form does not.
    pub fn new(params: &SquidParams) -> Result<Self> {
        let phi0 = match params.potential_form {
            PotentialForm::Quartic => Some(find_minima(params)?),
            PotentialForm::FullCosine => find_minima(params).ok(),
        };
        Ok(Potential { params: *params, phi0 })
    }

    pub fn value(&self, phi: f64) -> f64 {
        let p = &self.params;
        match p.potential_form {
            PotentialForm::Quartic => {
                let phi0 = self.phi0.unwrap_or(0.0);
                p.quartic_coefficient() * (phi * phi - phi0 * phi0).powi(2)
            }
            PotentialForm::FullCosine => {
                FLUX_QUANTUM * FLUX_QUANTUM * phi * phi / (2.0 * p.inductance)
                    + p.critical_current * FLUX_QUANTUM / TAU * (TAU * phi).cos()
            }
        }
    }

    /// `V′(φ)`
    pub fn slope(&self, phi: f64) -> f64 {
        let p = &self.params;
        match p.potential_form {
            PotentialForm::Quartic => {
                let phi0 = self.phi0.unwrap_or(0.0);
                4.0 * p.quartic_coefficient() * phi * (phi * phi - phi0 * phi0)
            }
            PotentialForm::FullCosine => {
                FLUX_QUANTUM * FLUX_QUANTUM * phi / p.inductance - p.critical_current * FLUX_QUANTUM * (TAU * phi).sin()
            }
        }
    }

    /// `V″(φ)`
    pub fn curvature(&self, phi: f64) -> f64 {
        let p = &self.params;
        match p.potential_form {
            PotentialForm::Quartic => {
                let phi0 = self.phi0.unwrap_or(0.0);
                p.quartic_coefficient() * (12.0 * phi * phi - 4.0 * phi0 * phi0)
            }
            PotentialForm::FullCosine => {
                FLUX_QUANTUM * FLUX_QUANTUM / p.inductance - TAU * p.critical_current * FLUX_QUANTUM * (TAU * phi).cos()
            }
        }
    }

    /// Position of the (right) minimum and the small-oscillation angular
    /// frequency there.
    pub fn well(&self) -> Result<(f64, f64)> {
        let at = self.phi0.unwrap_or(0.0);
        let k = self.curvature(at);
        if !(k > 0.0) {
            return Err(Error::InvalidArgument(format!("potential is not confining at φ = {at}")));
        }
        Ok((at, (k / self.params.mass()).sqrt()))
    }
}

/// Derived double-well quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleWellSummary {
    pub beta: f64,
    pub phi0: f64,
    /// `ΔV = (π³/3) I_c Φ₀ φ₀⁴` (J)
    pub barrier: f64,
    /// Plasma angular frequency (rad/s).
    pub omega0: f64,
    /// `σ₀² = ħ/(2CΦ₀²ω₀)`
    pub sigma0_sq: f64,
    /// `ΔE₀ = E₁ − E₀` (J)
    pub splitting: f64,
    /// `τ_φ = 2πħ/ΔE₀` (s)
    pub tunnel_period: f64,
}

impl DoubleWellSummary {
    pub fn sigma0_sq_over_phi0_sq(&self) -> f64 {
        self.sigma0_sq / (self.phi0 * self.phi0)
    }

    /// `1/τ_φ` (Hz)
    pub fn tunnel_frequency(&self) -> f64 {
        1.0 / self.tunnel_period
    }
}

/// Symmetric grid over `±(φ₀ + 10σ₀)` with the default point count.
pub fn default_grid(params: &SquidParams) -> Result<SpatialGrid> {
    let (phi0, omega0) = Potential::new(params)?.well()?;
    let sigma0 = (HBAR / (2.0 * params.mass() * omega0)).sqrt();
    SpatialGrid::symmetric(phi0 + DEFAULT_GRID_SIGMAS * sigma0, DEFAULT_GRID_POINTS)
}

/// Lowest `modes` eigenpairs of the SQUID Hamiltonian for the selected
/// potential form. Fails if any returned mode is not negligible at the walls.
pub fn eigensolve(params: &SquidParams, grid: &SpatialGrid, modes: usize) -> Result<SpectralBasis> {
    if modes > 32 {
        return Err(Error::InvalidArgument(format!("at most 32 modes are supported, got {modes}")));
    }
    let pot = Potential::new(params)?;
    let basis = solve_fd(grid, params.kinetic(), |x| pot.value(x), modes, true)?;
    let (mode, ratio) = basis.boundary_ratio();
    if ratio > 1e-6 {
        return Err(Error::DomainTruncation { mode, ratio });
    }
    Ok(basis)
}

/// Well quantities plus the tunnelling splitting from the eigensolver.
pub fn well_summary(params: &SquidParams, grid: &SpatialGrid, modes: usize) -> Result<DoubleWellSummary> {
    let (beta, bistable) = bistability_index(params);
    if !bistable {
        return Err(Error::NotBistable { beta });
    }
    let phi0 = find_minima(params)?;
    let pot = Potential::new(params)?;
    let omega0 = (pot.curvature(phi0) / params.mass()).sqrt();
    if !omega0.is_finite() || omega0 <= 0.0 {
        return Err(Error::InvalidArgument("well curvature is not positive".into()));
    }
    let sigma0_sq = HBAR / (2.0 * params.mass() * omega0);
    let basis = eigensolve(params, grid, modes.max(2))?;
    let splitting = basis.splitting();
    Ok(DoubleWellSummary {
        beta,
        phi0,
        barrier: params.quartic_coefficient() * phi0.powi(4),
        omega0,
        sigma0_sq,
        splitting,
        tunnel_period: TAU * HBAR / splitting,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn flux_quantum_value() {
        assert_relative_eq!(FLUX_QUANTUM, 2.067_833_848e-15, max_relative = 1e-9);
    }

    #[test]
    fn bistability_examples() {
        let (beta, ok) = bistability_index(&SquidParams::benchmark());
        assert!((beta - 1.139).abs() < 0.01, "{beta}");
        assert!(ok);

        let p = SquidParams::benchmark();
        let low = p.with_critical_current(p.critical_current * 0.5 / beta).unwrap();
        let (b, ok) = bistability_index(&low);
        assert_relative_eq!(b, 0.5, max_relative = 1e-12);
        assert!(!ok);

        // β = 5π/2 exactly is excluded
        let edge = p.with_critical_current(2.5 * PI * FLUX_QUANTUM / (TAU * p.inductance)).unwrap();
        let (b, _) = bistability_index(&edge);
        assert!(b >= 2.5 * PI * (1.0 - 1e-15));
        assert!(!(b > 1.0 && b < 2.5 * PI) || (2.5 * PI - b) < 1e-14);
    }

    /// Independent root bracketing by dense scan followed by secant steps.
    fn scan_root(ratio: f64) -> f64 {
        let f = |x: f64| (TAU * x).sin() - ratio * x;
        let mut a = 1e-9;
        let mut x = a;
        while x < 0.5 {
            let y = x + 1e-5;
            if f(x) > 0.0 && f(y) <= 0.0 {
                a = x;
                break;
            }
            x = y;
        }
        let (mut x0, mut x1) = (a, a + 1e-5);
        for _ in 0..60 {
            let (f0, f1) = (f(x0), f(x1));
            if f1 == f0 {
                break;
            }
            let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
            x0 = x1;
            x1 = x2;
        }
        x1
    }

    #[test]
    fn minima_examples() {
        let p = SquidParams::benchmark();
        let ratio = FLUX_QUANTUM / (p.inductance * p.critical_current);
        assert!((ratio - 5.516).abs() < 0.01);
        let phi0 = find_minima(&p).unwrap();
        assert_relative_eq!(phi0, scan_root(ratio), max_relative = 1e-9);
        assert!((phi0 - 0.1386).abs() < 0.001, "{phi0}");

        let cos = Potential::new(&p.with_form(PotentialForm::FullCosine)).unwrap();
        let natural = p.critical_current * FLUX_QUANTUM;
        assert!(cos.slope(phi0).abs() < 1e-9 * natural);

        // root collapses as β → 1⁺
        let ic1 = FLUX_QUANTUM / (TAU * p.inductance);
        let near = p.with_critical_current(ic1 * (1.0 + 1e-6)).unwrap();
        assert!(find_minima(&near).unwrap() < 1e-3);

        let mono = p.with_critical_current(ic1 * 0.99).unwrap();
        assert!(matches!(find_minima(&mono), Err(Error::NotBistable { .. })));
    }

    #[test]
    fn barrier_height_arithmetic() {
        let p = SquidParams::benchmark();
        let phi0 = find_minima(&p).unwrap();
        let barrier = PI.powi(3) / 3.0 * p.critical_current * FLUX_QUANTUM * phi0.powi(4);
        assert!((barrier - 2.0e-23).abs() < 0.1e-23, "{barrier}");
        let pot = Potential::new(&p).unwrap();
        assert_relative_eq!(pot.value(0.0) - pot.value(phi0), barrier, max_relative = 1e-12);
    }

    #[test]
    fn curvature_matches_finite_difference() {
        for form in PotentialForm::ALL {
            let pot = Potential::new(&SquidParams::benchmark().with_form(form)).unwrap();
            let (x, h) = (0.11, 1e-5);
            let fd = (pot.value(x + h) - 2.0 * pot.value(x) + pot.value(x - h)) / (h * h);
            assert_relative_eq!(pot.curvature(x), fd, max_relative = 1e-5);
            let fd1 = (pot.value(x + h) - pot.value(x - h)) / (2.0 * h);
            assert_relative_eq!(pot.slope(x), fd1, max_relative = 1e-6);
        }
    }

    #[test]
    fn quartic_requires_double_well() {
        let p = SquidParams::benchmark().with_critical_current(1.0e-7).unwrap();
        assert!(matches!(Potential::new(&p), Err(Error::NotBistable { .. })));
        assert!(Potential::new(&p.with_form(PotentialForm::FullCosine)).is_ok());
        assert!(matches!(
            well_summary(&p, &SpatialGrid::symmetric(0.5, 256).unwrap(), 2),
            Err(Error::NotBistable { .. })
        ));
    }

    #[test]
    fn truncated_domain_is_reported() {
        let p = SquidParams::benchmark();
        let g = SpatialGrid::symmetric(0.16, 512).unwrap();
        assert!(matches!(eigensolve(&p, &g, 2), Err(Error::DomainTruncation { .. })));
    }

    #[test]
    fn form_names_round_trip() {
        for f in PotentialForm::ALL {
            assert_eq!(f.name().parse::<PotentialForm>().unwrap(), f);
        }
        assert!("cosine".parse::<PotentialForm>().is_err());
    }
}
