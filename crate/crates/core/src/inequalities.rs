//! Temporal Bell (Leggett–Garg) inequality families, violation maps over the
//! `(t_ab, t_bc)` plane, and three-time pseudo-probability reconstruction.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::two_level::{BcWeighting, CorrelationTable, Dynamics, Sign, UncertaintyKind};

/// Inequality family. Type III can be named but not evaluated, since it
/// needs an indefinite preparation at `t_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InequalityType {
    I,
    II,
    III,
}

impl fmt::Display for InequalityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InequalityType::I => "I",
            InequalityType::II => "II",
            InequalityType::III => "III",
        })
    }
}

impl FromStr for InequalityType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" | "1" => Ok(InequalityType::I),
            "II" | "ii" | "2" => Ok(InequalityType::II),
            "III" | "iii" | "3" => Ok(InequalityType::III),
            other => Err(Error::InvalidArgument(format!("unknown inequality type `{other}`"))),
        }
    }
}

/// Signs `(X_a, X_b, X_c)` entering an inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignAssignment {
    pub a: Sign,
    pub b: Sign,
    pub c: Sign,
}

impl SignAssignment {
    pub const fn new(a: Sign, b: Sign, c: Sign) -> Self {
        SignAssignment { a, b, c }
    }

    /// All eight assignments, lexicographic with `+` before `−`.
    pub fn all() -> [SignAssignment; 8] {
        let mut out = [SignAssignment::new(Sign::Plus, Sign::Plus, Sign::Plus); 8];
        let mut k = 0;
        for a in Sign::ALL {
            for b in Sign::ALL {
                for c in Sign::ALL {
                    out[k] = SignAssignment::new(a, b, c);
                    k += 1;
                }
            }
        }
        out
    }

    pub fn flipped(self) -> Self {
        SignAssignment::new(-self.a, -self.b, -self.c)
    }
}

impl fmt::Display for SignAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.a, self.b, self.c)
    }
}

impl FromStr for SignAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let signs: Option<Vec<Sign>> = s.chars().map(Sign::from_char).collect();
        match signs.as_deref() {
            Some([a, b, c]) => Ok(SignAssignment::new(*a, *b, *c)),
            _ => Err(Error::InvalidArgument(format!("sign assignment must be three of '+'/'-', got `{s}`"))),
        }
    }
}

/// One grid point of a violation map. Uncertainties are in units of `|X|`.
///
/// `dx_ab` is the worst uncertainty of the measurement at `t_b` over every
/// outcome assigned to it in the inequality's terms; `dx_ac` and `dx_bc`
/// belong to the measurement at `t_c` as it appears in the `ac` and `bc`
/// terms respectively.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViolationCell<F> {
    pub t_ab: F,
    pub t_bc: F,
    pub delta_p: F,
    pub dx_ab: F,
    pub dx_ac: F,
    pub dx_bc: F,
}

impl<F: Real> ViolationCell<F> {
    #[inline]
    pub fn max_uncertainty(&self) -> F {
        self.dx_ab.max(self.dx_ac).max(self.dx_bc)
    }
}

/// `ΔP_α` read off a correlation table. Positive values violate the
/// macrorealist bound.
pub fn delta_p_from_table<F: Real>(kind: InequalityType, s: SignAssignment, t: &CorrelationTable<F>) -> Result<F> {
    match kind {
        InequalityType::I => Ok(t.ac(s.a, s.c) - t.ab(s.a, s.b) - t.bc(s.a, -s.b, s.c)),
        InequalityType::II => Ok(t.ab(s.a, s.b) - t.ac(s.a, s.c) - t.bc(s.a, s.b, -s.c)),
        InequalityType::III => Err(Error::UnsupportedInequality),
    }
}

pub fn delta_p<F: Real, D: Dynamics<F> + ?Sized>(
    kind: InequalityType,
    signs: SignAssignment,
    t_ab: F,
    t_bc: F,
    dynamics: &D,
) -> Result<F> {
    if kind == InequalityType::III {
        return Err(Error::UnsupportedInequality);
    }
    delta_p_from_table(kind, signs, &dynamics.table(t_ab, t_bc)?)
}

/// ΔP_α together with the uncertainties of every measurement event in its
/// three terms.
pub fn cell_from_table<F: Real>(
    kind: InequalityType,
    s: SignAssignment,
    t: &CorrelationTable<F>,
    weighting: BcWeighting,
) -> Result<ViolationCell<F>> {
    let delta_p = delta_p_from_table(kind, s, t)?;
    let u = |k, mid, fin| t.uncertainty(k, s.a, mid, fin, weighting);
    let (dx_ab, dx_ac, dx_bc) = match kind {
        // b is assigned X_b in p^ab and −X_b in p^bc
        InequalityType::I => (
            u(UncertaintyKind::Ab, s.b, s.c).max(u(UncertaintyKind::Ab, -s.b, s.c)),
            u(UncertaintyKind::Ac, s.b, s.c),
            u(UncertaintyKind::Bc, -s.b, s.c),
        ),
        InequalityType::II => {
            (u(UncertaintyKind::Ab, s.b, s.c), u(UncertaintyKind::Ac, s.b, s.c), u(UncertaintyKind::Bc, s.b, -s.c))
        }
        InequalityType::III => return Err(Error::UnsupportedInequality),
    };
    Ok(ViolationCell { t_ab: t.t_ab, t_bc: t.t_bc, delta_p, dx_ab, dx_ac, dx_bc })
}

/// Three-time joint "probabilities" `q[s_b][s_c]` for a fixed preparation,
/// reconstructed from quantum two-time marginals. Entries may be negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoJoint<F> {
    pub prep: Sign,
    pub reference_branch: Sign,
    pub q: [[F; 2]; 2],
}

impl<F: Real> PseudoJoint<F> {
    #[inline]
    pub fn get(&self, b: Sign, c: Sign) -> F {
        self.q[b.index()][c.index()]
    }

    pub fn min_entry(&self) -> F {
        self.q.iter().flatten().fold(F::infinity(), |m, &x| m.min(x))
    }

    /// Largest deviation from unit total and from the `ab`/`ac` marginals.
    pub fn marginal_defect(&self, t: &CorrelationTable<F>) -> F {
        let total: F = self.q.iter().flatten().fold(F::zero(), |s, &x| s + x);
        let mut worst = (total - F::one()).abs();
        for x in Sign::ALL {
            let row = self.get(x, Sign::Plus) + self.get(x, Sign::Minus);
            let col = self.get(Sign::Plus, x) + self.get(Sign::Minus, x);
            worst = worst.max((row - t.ab(self.prep, x)).abs()).max((col - t.ac(self.prep, x)).abs());
        }
        worst
    }
}

/// Keeps the sequential quantum joints on `reference` and fills the other
/// intermediate branch by subtraction from `p^ac`.
pub fn pseudo_joint_from_table<F: Real>(prep: Sign, reference: Sign, t: &CorrelationTable<F>) -> PseudoJoint<F> {
    let mut q = [[F::zero(); 2]; 2];
    for c in Sign::ALL {
        let kept = t.bc(prep, reference, c);
        q[reference.index()][c.index()] = kept;
        q[(-reference).index()][c.index()] = t.ac(prep, c) - kept;
    }
    PseudoJoint { prep, reference_branch: reference, q }
}

pub fn pseudo_joint<F: Real, D: Dynamics<F> + ?Sized>(
    prep: Sign,
    t_ab: F,
    t_bc: F,
    reference: Sign,
    dynamics: &D,
) -> Result<PseudoJoint<F>> {
    Ok(pseudo_joint_from_table(prep, reference, &dynamics.table(t_ab, t_bc)?))
}

/// Midpoint sample times `(i + 1/2)·τ/N`.
pub fn midpoint_times<F: Real>(window: F, n: usize) -> Vec<F> {
    let step = window / F::from_usize(n).expect("grid size fits scalar");
    (0..n).map(|i| (F::from_usize(i).expect("index fits scalar") + F::lit(0.5)) * step).collect()
}

/// Correlation tables on the `N × N` midpoint grid over `[0, τ]²`,
/// row-major in `(t_ab, t_bc)`.
#[derive(Debug, Clone)]
pub struct TableGrid<F> {
    pub n: usize,
    pub window: F,
    pub magnitude: F,
    tables: Vec<CorrelationTable<F>>,
}

impl<F: Real> TableGrid<F> {
    pub fn build<D: Dynamics<F> + ?Sized>(dynamics: &D, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("time grid needs N >= 2, got {n}")));
        }
        let window = dynamics.window();
        if !(window > F::zero()) || !window.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid time window {window}")));
        }
        let times = midpoint_times(window, n);
        let tables = (0..n * n)
            .into_par_iter()
            .map(|k| dynamics.table(times[k / n], times[k % n]))
            .collect::<Result<Vec<_>>>()?;
        Ok(TableGrid { n, window, magnitude: dynamics.magnitude(), tables })
    }

    pub fn tables(&self) -> &[CorrelationTable<F>] {
        &self.tables
    }

    pub fn violation_map(
        &self,
        kind: InequalityType,
        signs: SignAssignment,
        weighting: BcWeighting,
    ) -> Result<Vec<ViolationCell<F>>> {
        if kind == InequalityType::III {
            return Err(Error::UnsupportedInequality);
        }
        self.tables.iter().map(|t| cell_from_table(kind, signs, t, weighting)).collect()
    }

    pub fn pseudo_map(&self, prep: Sign, reference: Sign) -> Vec<PseudoJoint<F>> {
        self.tables.iter().map(|t| pseudo_joint_from_table(prep, reference, t)).collect()
    }
}

/// One [`ViolationCell`] per midpoint of an `N × N` grid over `[0, τ]²`,
/// row-major in `(t_ab, t_bc)`, with joint `bc` weighting.
pub fn violation_map<F: Real, D: Dynamics<F> + ?Sized>(
    kind: InequalityType,
    signs: SignAssignment,
    n: usize,
    dynamics: &D,
) -> Result<Vec<ViolationCell<F>>> {
    if kind == InequalityType::III {
        return Err(Error::UnsupportedInequality);
    }
    TableGrid::build(dynamics, n)?.violation_map(kind, signs, BcWeighting::Joint)
}

/// Time-independent correlations generated by a non-negative three-time
/// distribution `p[a][b][c]`, conditioned on the preparation. This is what
/// a macrorealist, non-invasive model produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalJoint<F> {
    pub p: [[[F; 2]; 2]; 2],
}

impl<F: Real> ClassicalJoint<F> {
    /// Normalizes eight non-negative weights (ordered lexicographically,
    /// `+` first) into a distribution.
    pub fn from_weights(w: [F; 8]) -> Result<Self> {
        if w.iter().any(|&x| !(x >= F::zero()) || !x.is_finite()) {
            return Err(Error::InvalidArgument("weights must be non-negative".into()));
        }
        let total = w.iter().fold(F::zero(), |s, &x| s + x);
        if !(total > F::zero()) {
            return Err(Error::InvalidArgument("weights sum to zero".into()));
        }
        let mut p = [[[F::zero(); 2]; 2]; 2];
        for (k, &x) in w.iter().enumerate() {
            p[k >> 2][(k >> 1) & 1][k & 1] = x / total;
        }
        Ok(ClassicalJoint { p })
    }

    pub fn table(&self, t_ab: F, t_bc: F) -> CorrelationTable<F> {
        let mut p_ab = [[F::zero(); 2]; 2];
        let mut p_ac = [[F::zero(); 2]; 2];
        let mut p_bc = [[[F::zero(); 2]; 2]; 2];
        for a in 0..2 {
            let pa = self.p[a][0][0] + self.p[a][0][1] + self.p[a][1][0] + self.p[a][1][1];
            if !(pa > F::zero()) {
                continue;
            }
            for b in 0..2 {
                for c in 0..2 {
                    let q = self.p[a][b][c] / pa;
                    p_bc[a][b][c] = q;
                    p_ab[a][b] = p_ab[a][b] + q;
                    p_ac[a][c] = p_ac[a][c] + q;
                }
            }
        }
        CorrelationTable { t_ab, t_bc, p_ab, p_ac, p_bc }
    }
}

impl<F: Real> Dynamics<F> for ClassicalJoint<F> {
    fn window(&self) -> F {
        F::one()
    }

    fn magnitude(&self) -> F {
        F::one()
    }

    fn table(&self, t_ab: F, t_bc: F) -> Result<CorrelationTable<F>> {
        Ok(ClassicalJoint::table(self, t_ab, t_bc))
    }
}
