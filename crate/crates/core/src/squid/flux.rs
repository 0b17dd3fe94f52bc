//! Flux-sign measurements on the double well, propagated in a truncated
//! energy eigenbasis.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use super::schrodinger::SpectralBasis;
use super::HBAR;
use crate::error::{Error, Result};
use crate::two_level::{spin_closed_form, CorrelationTable, Dynamics, RabiParams, Sign};

/// Largest tolerated probability lost when a projected state is re-expanded
/// in the truncated basis, as a fraction of the unit-norm preparation.
pub const MAX_LEAKAGE: f64 = 1e-3;

/// Minimum half-line probability of a localized preparation.
const LOCALIZATION_MASS: f64 = 0.9;

/// Complex amplitudes on the spatial grid, normalized as `Σ|ψ|²h`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxState {
    pub amplitudes: Vec<Complex64>,
    spacing: f64,
}

impl FluxState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.spacing
    }

    /// Probability on the half-line of the given flux sign, with the
    /// `φ = 0` point shared equally.
    pub fn half_line_mass(&self, basis: &SpectralBasis, sign: Sign) -> f64 {
        let positive = sign == Sign::Plus;
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| basis.grid.half_line_mask(i, positive).powi(2) * a.norm_sqr())
            .sum::<f64>()
            * self.spacing
    }
}

/// `(ψ₀ ± ψ₁)/√2`, labelled by the well each one occupies.
pub fn localized_states(basis: &SpectralBasis) -> Result<(FluxState, FluxState)> {
    if basis.len() < 2 {
        return Err(Error::InvalidArgument("localized states need at least two modes".into()));
    }
    let h = basis.grid.spacing();
    let combine = |s: f64| FluxState {
        amplitudes: basis.wavefunctions[0]
            .iter()
            .zip(&basis.wavefunctions[1])
            .map(|(a, b)| Complex64::new(FRAC_1_SQRT_2 * (a + s * b), 0.0))
            .collect(),
        spacing: h,
    };
    let (mut plus, mut minus) = (combine(1.0), combine(-1.0));
    if plus.half_line_mass(basis, Sign::Plus) < plus.half_line_mass(basis, Sign::Minus) {
        std::mem::swap(&mut plus, &mut minus);
    }
    let mass = plus.half_line_mass(basis, Sign::Plus).min(minus.half_line_mass(basis, Sign::Minus));
    if mass <= LOCALIZATION_MASS {
        return Err(Error::TwoLevelInvalid { mass });
    }
    Ok((plus, minus))
}

type Matrix = Vec<Vec<f64>>;

fn mat_vec(m: &Matrix, c: &[Complex64]) -> Vec<Complex64> {
    m.iter().map(|row| row.iter().zip(c).map(|(a, x)| x * a).sum()).collect()
}

fn norm_sqr(c: &[Complex64]) -> f64 {
    c.iter().map(|x| x.norm_sqr()).sum()
}

/// Spectral propagation of flux states in the lowest `M` eigenmodes with
/// half-line projections.
///
/// For each sign the propagator keeps `A[n][m] = Σ θ²ψₙψₘ h`, whose quadratic
/// form is the projected norm, and `B[n][m] = Σ θψₙψₘ h`, which re-expands the
/// projected state in the basis.
#[derive(Debug, Clone)]
pub struct FluxPropagator {
    modes: usize,
    /// `(Eₙ − E₀)/ħ`
    frequencies: Vec<f64>,
    projected_norm: [Matrix; 2],
    reexpand: [Matrix; 2],
    /// Mode coefficients of the localized preparations, indexed by sign.
    prepared: [Vec<Complex64>; 2],
    tunnel_period: f64,
}

impl FluxPropagator {
    pub fn new(basis: &SpectralBasis, modes: usize) -> Result<Self> {
        if modes < 2 || modes > basis.len() {
            return Err(Error::InvalidArgument(format!("propagation needs 2..={} modes, got {modes}", basis.len())));
        }
        let (plus, minus) = localized_states(basis)?;
        let grid = &basis.grid;
        let h = grid.spacing();
        let build = |power: i32, positive: bool| -> Matrix {
            let weight: Vec<f64> = (0..grid.n_points).map(|i| grid.half_line_mask(i, positive).powi(power)).collect();
            (0..modes)
                .map(|n| {
                    (0..modes)
                        .map(|m| {
                            let (u, v) = (&basis.wavefunctions[n], &basis.wavefunctions[m]);
                            (0..grid.n_points).map(|i| weight[i] * u[i] * v[i]).sum::<f64>() * h
                        })
                        .collect()
                })
                .collect()
        };
        let coefficients = |s: &FluxState| -> Vec<Complex64> {
            (0..modes)
                .map(|n| s.amplitudes.iter().zip(&basis.wavefunctions[n]).map(|(a, w)| a * w).sum::<Complex64>() * h)
                .collect()
        };
        Ok(FluxPropagator {
            modes,
            frequencies: basis.excitation_energies()[..modes].iter().map(|e| e / HBAR).collect(),
            projected_norm: [build(2, true), build(2, false)],
            reexpand: [build(1, true), build(1, false)],
            prepared: [coefficients(&plus), coefficients(&minus)],
            tunnel_period: 2.0 * PI * HBAR / basis.splitting(),
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// `τ_φ = 2πħ/ΔE₀`
    pub fn tunnel_period(&self) -> f64 {
        self.tunnel_period
    }

    /// Mode coefficients of the localized preparation of the given sign.
    pub fn prepared(&self, sign: Sign) -> &[Complex64] {
        &self.prepared[sign.index()]
    }

    /// Free evolution for `t` seconds.
    pub fn evolve(&self, c: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        Ok(c.iter().zip(&self.frequencies).map(|(x, w)| x * Complex64::from_polar(1.0, -w * t)).collect())
    }

    /// Probability of `sign` and the re-expanded post-measurement state.
    ///
    /// Leakage is the probability the re-expansion drops, counted against
    /// the unit-norm preparation rather than the norm of the current branch:
    /// exponentially small tunnelling tails may be poorly represented without
    /// affecting any probability at that level.
    pub fn project(&self, c: &[Complex64], sign: Sign) -> Result<(f64, Vec<Complex64>)> {
        let a = mat_vec(&self.projected_norm[sign.index()], c);
        let p = c.iter().zip(&a).map(|(x, y)| (x.conj() * y).re).sum::<f64>().max(0.0);
        let after = mat_vec(&self.reexpand[sign.index()], c);
        let leakage = p - norm_sqr(&after);
        if leakage > MAX_LEAKAGE {
            return Err(Error::BasisTruncation { leakage });
        }
        Ok((p, after))
    }

    pub fn pair_probability(&self, prep: Sign, t: f64, result: Sign) -> Result<f64> {
        let c = self.evolve(self.prepared(prep), t)?;
        Ok(self.project(&c, result)?.0)
    }

    pub fn sequential_joint_probability(&self, prep: Sign, t_ab: f64, mid: Sign, t_bc: f64, fin: Sign) -> Result<f64> {
        let c = self.evolve(self.prepared(prep), t_ab)?;
        let (_, at_b) = self.project(&c, mid)?;
        let c = self.evolve(&at_b, t_bc)?;
        Ok(self.project(&c, fin)?.0)
    }
}

impl Dynamics<f64> for FluxPropagator {
    /// Two tunnelling periods.
    fn window(&self) -> f64 {
        2.0 * self.tunnel_period
    }

    fn magnitude(&self) -> f64 {
        1.0
    }

    fn table(&self, t_ab: f64, t_bc: f64) -> Result<CorrelationTable<f64>> {
        if !(t_bc >= 0.0) {
            return Err(Error::NegativeTime(t_bc));
        }
        let mut p_ab = [[0.0; 2]; 2];
        let mut p_ac = [[0.0; 2]; 2];
        let mut p_bc = [[[0.0; 2]; 2]; 2];
        for a in Sign::ALL {
            let at_b = self.evolve(self.prepared(a), t_ab)?;
            let at_c = self.evolve(&at_b, t_bc)?;
            for b in Sign::ALL {
                let (p, filtered) = self.project(&at_b, b)?;
                p_ab[a.index()][b.index()] = p;
                p_ac[a.index()][b.index()] = self.project(&at_c, b)?.0;
                let next = self.evolve(&filtered, t_bc)?;
                for c in Sign::ALL {
                    p_bc[a.index()][b.index()][c.index()] = self.project(&next, c)?.0;
                }
            }
        }
        Ok(CorrelationTable { t_ab, t_bc, p_ab, p_ac, p_bc })
    }
}

fn table_deviation(x: &CorrelationTable<f64>, y: &CorrelationTable<f64>) -> f64 {
    let pairs = x.p_ab.iter().flatten().zip(y.p_ab.iter().flatten());
    let pairs = pairs.chain(x.p_ac.iter().flatten().zip(y.p_ac.iter().flatten()));
    let pairs = pairs.chain(x.p_bc.iter().flatten().flatten().zip(y.p_bc.iter().flatten().flatten()));
    pairs.fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

/// Largest deviation of any correlation-table entry from the two-level
/// closed forms with `Ω = π/τ_φ`, over an `n × n` midpoint grid spanning the
/// propagator window.
pub fn two_level_consistency(prop: &FluxPropagator, n: usize) -> Result<f64> {
    use rayon::prelude::*;

    let rabi = RabiParams::new(PI / prop.tunnel_period())?;
    let times = crate::inequalities::midpoint_times(prop.window(), n);
    let rows: Vec<f64> = times
        .par_iter()
        .map(|&t_ab| {
            times.iter().try_fold(0.0f64, |m, &t_bc| {
                let d = table_deviation(&prop.table(t_ab, t_bc)?, &spin_closed_form(t_ab, t_bc, &rabi)?);
                Ok(m.max(d))
            })
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().fold(0.0, f64::max))
}
