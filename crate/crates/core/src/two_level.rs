//! Kinematics and dynamics of a bistable two-state system under repeated
//! projective measurement of a dichotomic observable.
//!
//! States live on the `{|+⟩, |−⟩}` eigenbasis of the measured observable and
//! evolve under `U(t) = exp(−iΩσ_x t)`. Measurements filter a state without
//! renormalizing it, so the squared norm of a filtered state is directly the
//! joint probability of the outcomes recorded so far.

use std::fmt;
use std::ops::Neg;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{fold_angle, Real};

/// One of the two values of a dichotomic observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Both signs, `+` first.
    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];

    /// Table index: 0 for `+`, 1 for `−`.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// `+1` or `−1` as a scalar.
    #[inline]
    pub fn value<F: Real>(self) -> F {
        match self {
            Sign::Plus => F::one(),
            Sign::Minus => -F::one(),
        }
    }

    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' | '−' => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self.flip()
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A measurement result `sign × |X|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome<F> {
    pub sign: Sign,
    pub magnitude: F,
}

impl<F: Real> Outcome<F> {
    pub fn new(sign: Sign, magnitude: F) -> Result<Self> {
        if !(magnitude > F::zero()) || !magnitude.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "outcome magnitude must be positive and finite, got {magnitude}"
            )));
        }
        Ok(Outcome { sign, magnitude })
    }

    /// Spin component `Σ = ±1/2`.
    pub fn spin(sign: Sign) -> Self {
        Outcome { sign, magnitude: F::lit(0.5) }
    }

    /// Sign of the trapped flux, `Φ = ±1`.
    pub fn flux(sign: Sign) -> Self {
        Outcome { sign, magnitude: F::one() }
    }

    #[inline]
    pub fn value(&self) -> F {
        self.sign.value::<F>() * self.magnitude
    }

    fn same_magnitude(&self, other: &Outcome<F>) -> Result<()> {
        let scale = self.magnitude.abs().max(other.magnitude.abs());
        if (self.magnitude - other.magnitude).abs() > F::lit(1e-12) * scale {
            return Err(Error::MagnitudeMismatch(self.magnitude.as_f64(), other.magnitude.as_f64()));
        }
        Ok(())
    }
}

/// Pair of amplitudes on the `{|+⟩, |−⟩}` basis. May be subnormalized after
/// filtering; the squared norm is then a probability weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelState<F> {
    pub c_plus: Complex<F>,
    pub c_minus: Complex<F>,
}

impl<F: Real> TwoLevelState<F> {
    pub fn new(c_plus: Complex<F>, c_minus: Complex<F>) -> Result<Self> {
        let s = TwoLevelState { c_plus, c_minus };
        let n = s.norm_sqr();
        if !n.is_finite() || n > F::one() + F::lit(1e-9) {
            return Err(Error::InvalidArgument(format!("squared norm {n} exceeds 1")));
        }
        Ok(s)
    }

    /// The normalized eigenstate `|sign⟩`.
    pub fn basis(sign: Sign) -> Self {
        let (one, zero) = (Complex::new(F::one(), F::zero()), Complex::new(F::zero(), F::zero()));
        match sign {
            Sign::Plus => TwoLevelState { c_plus: one, c_minus: zero },
            Sign::Minus => TwoLevelState { c_plus: zero, c_minus: one },
        }
    }

    pub fn zero() -> Self {
        let z = Complex::new(F::zero(), F::zero());
        TwoLevelState { c_plus: z, c_minus: z }
    }

    #[inline]
    pub fn amplitude(&self, sign: Sign) -> Complex<F> {
        match sign {
            Sign::Plus => self.c_plus,
            Sign::Minus => self.c_minus,
        }
    }

    #[inline]
    pub fn norm_sqr(&self) -> F {
        self.c_plus.norm_sqr() + self.c_minus.norm_sqr()
    }

    /// Applies `U(Δt)` for a rotation angle `Ω·Δt` that is already known to be valid.
    fn rotate(&self, angle: F) -> Self {
        let angle = fold_angle(angle);
        let (s, c) = angle.sin_cos();
        // −i·sin
        let mis = Complex::new(F::zero(), -s);
        TwoLevelState { c_plus: self.c_plus * c + self.c_minus * mis, c_minus: self.c_minus * c + self.c_plus * mis }
    }

    /// Zeroes the amplitude of the non-selected branch.
    fn filtered(&self, sign: Sign) -> Self {
        let z = Complex::new(F::zero(), F::zero());
        match sign {
            Sign::Plus => TwoLevelState { c_plus: self.c_plus, c_minus: z },
            Sign::Minus => TwoLevelState { c_plus: z, c_minus: self.c_minus },
        }
    }
}

/// Rabi angular frequency `Ω` (rad/s); `Ω = B/ħ` for the precessing spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiParams<F> {
    omega: F,
}

impl<F: Real> RabiParams<F> {
    pub fn new(omega: F) -> Result<Self> {
        if !(omega >= F::zero()) || !omega.is_finite() {
            return Err(Error::InvalidArgument(format!("omega must be finite and non-negative, got {omega}")));
        }
        Ok(RabiParams { omega })
    }

    #[inline]
    pub fn omega(&self) -> F {
        self.omega
    }

    /// `τ = 2π/Ω`; infinite for frozen dynamics.
    pub fn period(&self) -> F {
        if self.omega > F::zero() {
            F::TAU() / self.omega
        } else {
            F::infinity()
        }
    }
}

fn check_time<F: Real>(t: F) -> Result<()> {
    if !(t >= F::zero()) || !t.is_finite() {
        return Err(Error::NegativeTime(t.as_f64()));
    }
    Ok(())
}

/// Applies `exp(−iΩσ_x Δt)` to `state`.
pub fn evolve<F: Real>(state: &TwoLevelState<F>, params: &RabiParams<F>, dt: F) -> Result<TwoLevelState<F>> {
    check_time(dt)?;
    Ok(state.rotate(params.omega * dt))
}

/// Filters `state` on `outcome`. Returns the unnormalized filtered state and
/// the probability of the outcome relative to the input norm.
pub fn apply_projector<F: Real>(state: &TwoLevelState<F>, outcome: Outcome<F>) -> Result<(TwoLevelState<F>, F)> {
    let n = state.norm_sqr();
    if !(n > F::zero()) {
        return Err(Error::ZeroNorm);
    }
    let out = state.filtered(outcome.sign);
    Ok((out, out.norm_sqr() / n))
}

/// `|Π_result U(t) |prep⟩|²`.
pub fn pair_probability<F: Real>(prep: Outcome<F>, t: F, result: Outcome<F>, params: &RabiParams<F>) -> Result<F> {
    prep.same_magnitude(&result)?;
    let evolved = evolve(&TwoLevelState::basis(prep.sign), params, t)?;
    Ok(evolved.filtered(result.sign).norm_sqr())
}

/// Joint probability of observing `mid` after `t_ab` and then `fin` after a
/// further `t_bc`, starting from `|prep⟩`.
pub fn sequential_joint_probability<F: Real>(
    prep: Outcome<F>,
    t_ab: F,
    mid: Outcome<F>,
    t_bc: F,
    fin: Outcome<F>,
    params: &RabiParams<F>,
) -> Result<F> {
    prep.same_magnitude(&mid)?;
    prep.same_magnitude(&fin)?;
    check_time(t_bc)?;
    let at_b = evolve(&TwoLevelState::basis(prep.sign), params, t_ab)?.filtered(mid.sign);
    let at_c = evolve(&at_b, params, t_bc)?.filtered(fin.sign);
    Ok(at_c.norm_sqr())
}

/// Which pair of measurement times an effective uncertainty refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UncertaintyKind {
    Ab,
    Ac,
    Bc,
}

/// Weighting used for the `bc` effective uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BcWeighting {
    /// Sequential joint probabilities, unconditioned on the intermediate result.
    #[default]
    Joint,
    /// Sequential probabilities conditioned on the intermediate result.
    Conditional,
}

/// Effective uncertainty `sqrt(Σ_x (assigned − x)² p[x])` with joint `bc`
/// weighting, in units of the observable.
pub fn effective_uncertainty<F: Real>(
    kind: UncertaintyKind,
    prep: Outcome<F>,
    mid: Outcome<F>,
    fin: Outcome<F>,
    t_ab: F,
    t_bc: F,
    params: &RabiParams<F>,
) -> Result<F> {
    effective_uncertainty_weighted(kind, prep, mid, fin, t_ab, t_bc, params, BcWeighting::Joint)
}

/// [`effective_uncertainty`] with an explicit `bc` weighting.
#[allow(clippy::too_many_arguments)]
pub fn effective_uncertainty_weighted<F: Real>(
    kind: UncertaintyKind,
    prep: Outcome<F>,
    mid: Outcome<F>,
    fin: Outcome<F>,
    t_ab: F,
    t_bc: F,
    params: &RabiParams<F>,
    weighting: BcWeighting,
) -> Result<F> {
    check_time(t_ab)?;
    check_time(t_bc)?;
    let mut var = F::zero();
    for x in Sign::ALL {
        let (assigned, p) = match kind {
            UncertaintyKind::Ab => {
                let xo = Outcome { sign: x, magnitude: mid.magnitude };
                (mid, pair_probability(prep, t_ab, xo, params)?)
            }
            UncertaintyKind::Ac => {
                let xo = Outcome { sign: x, magnitude: fin.magnitude };
                (fin, pair_probability(prep, t_ab + t_bc, xo, params)?)
            }
            UncertaintyKind::Bc => {
                let xo = Outcome { sign: x, magnitude: fin.magnitude };
                let joint = sequential_joint_probability(prep, t_ab, mid, t_bc, xo, params)?;
                let p = match weighting {
                    BcWeighting::Joint => joint,
                    BcWeighting::Conditional => conditional(joint, pair_probability(prep, t_ab, mid, params)?),
                };
                (fin, p)
            }
        };
        let x_value = x.value::<F>() * assigned.magnitude;
        let d = assigned.value() - x_value;
        var = var + d * d * p;
    }
    Ok(var.max(F::zero()).sqrt())
}

fn conditional<F: Real>(joint: F, marginal: F) -> F {
    if marginal > F::zero() {
        joint / marginal
    } else {
        F::zero()
    }
}

/// Two-time and sequential joint probabilities at fixed `(t_ab, t_bc)`.
/// Indexed by [`Sign::index`]: `p_ab[a][b]`, `p_ac[a][c]`, `p_bc[a][b][c]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTable<F> {
    pub t_ab: F,
    pub t_bc: F,
    pub p_ab: [[F; 2]; 2],
    pub p_ac: [[F; 2]; 2],
    pub p_bc: [[[F; 2]; 2]; 2],
}

impl<F: Real> CorrelationTable<F> {
    #[inline]
    pub fn ab(&self, a: Sign, b: Sign) -> F {
        self.p_ab[a.index()][b.index()]
    }

    #[inline]
    pub fn ac(&self, a: Sign, c: Sign) -> F {
        self.p_ac[a.index()][c.index()]
    }

    /// Sequential joint probability of `(b, c)` given preparation `a`.
    #[inline]
    pub fn bc(&self, a: Sign, b: Sign, c: Sign) -> F {
        self.p_bc[a.index()][b.index()][c.index()]
    }

    /// Largest violation of the range, normalization and sequential-marginal
    /// invariants.
    pub fn invariant_defect(&self) -> F {
        let mut worst = F::zero();
        let mut range = |p: F| {
            let d = (-p).max(p - F::one()).max(F::zero());
            if d > worst {
                worst = d;
            }
        };
        for a in 0..2 {
            for b in 0..2 {
                range(self.p_ab[a][b]);
                range(self.p_ac[a][b]);
                for c in 0..2 {
                    range(self.p_bc[a][b][c]);
                }
            }
        }
        for a in 0..2 {
            worst = worst
                .max((self.p_ab[a][0] + self.p_ab[a][1] - F::one()).abs())
                .max((self.p_ac[a][0] + self.p_ac[a][1] - F::one()).abs());
            for b in 0..2 {
                worst = worst.max((self.p_bc[a][b][0] + self.p_bc[a][b][1] - self.p_ab[a][b]).abs());
            }
        }
        worst
    }

    /// Effective uncertainty in units of `|X|`, read off this table.
    /// `mid` is ignored for `Ab`-style assignments only through the kind.
    pub fn uncertainty(&self, kind: UncertaintyKind, prep: Sign, mid: Sign, fin: Sign, weighting: BcWeighting) -> F {
        let mut var = F::zero();
        for x in Sign::ALL {
            let (assigned, p) = match kind {
                UncertaintyKind::Ab => (mid, self.ab(prep, x)),
                UncertaintyKind::Ac => (fin, self.ac(prep, x)),
                UncertaintyKind::Bc => {
                    let joint = self.bc(prep, mid, x);
                    let p = match weighting {
                        BcWeighting::Joint => joint,
                        BcWeighting::Conditional => conditional(joint, self.ab(prep, mid)),
                    };
                    (fin, p)
                }
            };
            let d = assigned.value::<F>() - x.value::<F>();
            var = var + d * d * p;
        }
        var.max(F::zero()).sqrt()
    }
}

/// Closed-form spin-1/2 correlation table:
/// `p^ab_{+−} = sin²Ωt_ab`, `p^ac_{+−} = sin²Ω(t_ab+t_bc)`,
/// `p^bc_{+,+,−} = cos²Ωt_ab·sin²Ωt_bc` and their sign complements.
pub fn spin_closed_form<F: Real>(t_ab: F, t_bc: F, params: &RabiParams<F>) -> Result<CorrelationTable<F>> {
    check_time(t_ab)?;
    check_time(t_bc)?;
    let w = params.omega;
    let flip_ab = fold_angle(w * t_ab).sin().powi(2);
    let flip_bc = fold_angle(w * t_bc).sin().powi(2);
    let flip_ac = fold_angle(w * (t_ab + t_bc)).sin().powi(2);
    let two = |flip: F| [[F::one() - flip, flip], [flip, F::one() - flip]];
    let p_ab = two(flip_ab);
    let p_ac = two(flip_ac);
    let step = two(flip_bc);
    let mut p_bc = [[[F::zero(); 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                p_bc[a][b][c] = p_ab[a][b] * step[b][c];
            }
        }
    }
    Ok(CorrelationTable { t_ab, t_bc, p_ab, p_ac, p_bc })
}

/// Source of correlation tables for the inequality and overlap analyses.
pub trait Dynamics<F: Real>: Sync {
    /// Length `τ` of each time axis of the integration window.
    fn window(&self) -> F;

    /// `|X|` of the measured observable.
    fn magnitude(&self) -> F;

    fn table(&self, t_ab: F, t_bc: F) -> Result<CorrelationTable<F>>;
}

/// Window for spin dynamics: `2π/Ω`, or one time unit when the dynamics is frozen.
fn spin_window<F: Real>(params: &RabiParams<F>) -> F {
    let p = params.period();
    if p.is_finite() {
        p
    } else {
        F::one()
    }
}

/// Spin (or any Rabi two-level) dynamics evaluated by explicit state
/// propagation and filtering.
#[derive(Debug, Clone, Copy)]
pub struct SpinDynamics<F> {
    pub params: RabiParams<F>,
    pub magnitude: F,
}

impl<F: Real> SpinDynamics<F> {
    /// Spin-1/2 with `|X| = 1/2`.
    pub fn spin(omega: F) -> Result<Self> {
        Ok(SpinDynamics { params: RabiParams::new(omega)?, magnitude: F::lit(0.5) })
    }
}

impl<F: Real> Dynamics<F> for SpinDynamics<F> {
    fn window(&self) -> F {
        spin_window(&self.params)
    }

    fn magnitude(&self) -> F {
        self.magnitude
    }

    fn table(&self, t_ab: F, t_bc: F) -> Result<CorrelationTable<F>> {
        check_time(t_ab)?;
        check_time(t_bc)?;
        let mut p_ab = [[F::zero(); 2]; 2];
        let mut p_ac = [[F::zero(); 2]; 2];
        let mut p_bc = [[[F::zero(); 2]; 2]; 2];
        for a in Sign::ALL {
            let prep = TwoLevelState::basis(a);
            let at_b = evolve(&prep, &self.params, t_ab)?;
            let at_c = evolve(&prep, &self.params, t_ab + t_bc)?;
            for b in Sign::ALL {
                let fb = at_b.filtered(b);
                p_ab[a.index()][b.index()] = fb.norm_sqr();
                p_ac[a.index()][b.index()] = at_c.filtered(b).norm_sqr();
                let next = evolve(&fb, &self.params, t_bc)?;
                for c in Sign::ALL {
                    p_bc[a.index()][b.index()][c.index()] = next.filtered(c).norm_sqr();
                }
            }
        }
        Ok(CorrelationTable { t_ab, t_bc, p_ab, p_ac, p_bc })
    }
}

/// Spin dynamics evaluated from the closed-form probabilities.
#[derive(Debug, Clone, Copy)]
pub struct SpinClosedForm<F> {
    pub params: RabiParams<F>,
    pub magnitude: F,
}

impl<F: Real> Dynamics<F> for SpinClosedForm<F> {
    fn window(&self) -> F {
        spin_window(&self.params)
    }

    fn magnitude(&self) -> F {
        self.magnitude
    }

    fn table(&self, t_ab: F, t_bc: F) -> Result<CorrelationTable<F>> {
        spin_closed_form(t_ab, t_bc, &self.params)
    }
}
