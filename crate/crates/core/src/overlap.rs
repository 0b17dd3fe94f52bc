//! Overlap between the inequality-violation region and the region where the
//! measurements resolve the two values of the observable.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::inequalities::{InequalityType, SignAssignment, TableGrid, ViolationCell};
use crate::scalar::Real;
use crate::two_level::{BcWeighting, Dynamics};

/// Overlap values at or below this floor are treated as zero.
pub const OVERLAP_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriterionName {
    HalfWidth,
    Unit,
    Max,
    Custom,
}

impl FromStr for CriterionName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half_width" => Ok(CriterionName::HalfWidth),
            "unit" => Ok(CriterionName::Unit),
            "max" => Ok(CriterionName::Max),
            other => Err(Error::UnknownCriterion(other.to_string())),
        }
    }
}

/// Largest effective uncertainty, in units of `|X|`, accepted as an
/// unambiguous assignment of the dichotomic value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionCriterion<F> {
    pub xi: F,
    pub name: CriterionName,
}

impl<F: Real> ResolutionCriterion<F> {
    pub fn custom(xi: F) -> Result<Self> {
        check_xi(xi)?;
        Ok(ResolutionCriterion { xi, name: CriterionName::Custom })
    }

    /// Half-width criterion `(2 ln 2)^(−1/2)`.
    pub fn half_width() -> Self {
        let two_ln2 = F::lit(2.0) * F::LN_2();
        ResolutionCriterion { xi: two_ln2.sqrt().recip(), name: CriterionName::HalfWidth }
    }
}

/// Named presets: `half_width`, `unit` and `max`.
pub fn criterion<F: Real>(name: &str) -> Result<ResolutionCriterion<F>> {
    let name: CriterionName = name.parse()?;
    Ok(match name {
        CriterionName::HalfWidth => ResolutionCriterion::half_width(),
        CriterionName::Unit => ResolutionCriterion { xi: F::one(), name },
        CriterionName::Max => ResolutionCriterion { xi: F::lit(2.0), name },
        CriterionName::Custom => unreachable!("custom is not parseable"),
    })
}

fn check_xi<F: Real>(xi: F) -> Result<()> {
    if !(xi >= F::zero() && xi <= F::lit(2.0)) {
        return Err(Error::InvalidArgument(format!("xi must lie in [0, 2]|X|, got {xi}")));
    }
    Ok(())
}

/// A cell counts toward the overlap when it violates the inequality and
/// every measurement in it meets the threshold.
#[inline]
pub fn admissible<F: Real>(cell: &ViolationCell<F>, xi: F) -> bool {
    cell.delta_p > F::zero() && cell.max_uncertainty() <= xi
}

/// Midpoint-rule `O_α(ξ) = τ⁻² ∫ ΔP_α` restricted to admissible cells.
/// Cells are summed in row-major order.
pub fn overlap_of_cells<F: Real>(cells: &[ViolationCell<F>], n: usize, xi: F) -> F {
    let nn = F::from_usize(n * n).expect("grid size fits scalar");
    cells.iter().filter(|c| admissible(c, xi)).fold(F::zero(), |s, c| s + c.delta_p) / nn
}

#[inline]
pub fn is_positive<F: Real>(overlap: F) -> bool {
    overlap > F::lit(OVERLAP_FLOOR)
}

/// Bracket `[lo, hi]` around the threshold `ξ_α`: the overlap vanishes at
/// `lo` and is positive at `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiBracket<F> {
    pub lo: F,
    pub hi: F,
}

impl<F: Real> XiBracket<F> {
    /// Smallest `ξ` verified to give a positive overlap.
    pub fn value(&self) -> F {
        self.hi
    }
}

/// Bisection for the zero/positive transition of `O_α(ξ)` on `[0, 2]`.
pub fn threshold_of_cells<F: Real>(cells: &[ViolationCell<F>], n: usize, tolerance: F) -> Result<XiBracket<F>> {
    if !(tolerance > F::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tolerance}")));
    }
    let (mut lo, mut hi) = (F::zero(), F::lit(2.0));
    if !is_positive(overlap_of_cells(cells, n, hi)) {
        return Err(Error::NoViolationRegion);
    }
    if is_positive(overlap_of_cells(cells, n, lo)) {
        return Ok(XiBracket { lo, hi: lo });
    }
    while hi - lo > tolerance {
        let mid = (lo + hi) * F::lit(0.5);
        if is_positive(overlap_of_cells(cells, n, mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(XiBracket { lo, hi })
}

pub fn overlap_integral<F: Real, D: Dynamics<F> + ?Sized>(
    kind: InequalityType,
    signs: SignAssignment,
    xi: F,
    n: usize,
    dynamics: &D,
) -> Result<F> {
    check_xi(xi)?;
    let cells = TableGrid::build(dynamics, n)?.violation_map(kind, signs, BcWeighting::Joint)?;
    Ok(overlap_of_cells(&cells, n, xi))
}

pub fn xi_threshold<F: Real, D: Dynamics<F> + ?Sized>(
    kind: InequalityType,
    signs: SignAssignment,
    n: usize,
    tolerance: F,
    dynamics: &D,
) -> Result<XiBracket<F>> {
    let cells = TableGrid::build(dynamics, n)?.violation_map(kind, signs, BcWeighting::Joint)?;
    threshold_of_cells(&cells, n, tolerance)
}

/// `O_I(ξ)` and `O_II(ξ)` sampled on a uniform `ξ` grid over `[0, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapCurve<F> {
    pub signs: SignAssignment,
    /// `(ξ, O_I, O_II)`
    pub samples: Vec<(F, F, F)>,
    pub n_time: usize,
    pub n_xi: usize,
    pub xi_i: XiBracket<F>,
    pub xi_ii: XiBracket<F>,
}

impl<F: Real> OverlapCurve<F> {
    /// Largest entrywise difference between two curves sampled on the same `ξ` grid.
    pub fn max_deviation(&self, other: &OverlapCurve<F>) -> F {
        self.samples
            .iter()
            .zip(&other.samples)
            .fold(F::zero(), |m, (a, b)| m.max((a.1 - b.1).abs()).max((a.2 - b.2).abs()))
    }
}

/// Uniform `ξ` samples `2k/(n_xi − 1)`.
pub fn xi_samples<F: Real>(n_xi: usize) -> Vec<F> {
    let last = F::from_usize(n_xi - 1).expect("sample count fits scalar");
    (0..n_xi).map(|k| F::lit(2.0) * F::from_usize(k).expect("index fits scalar") / last).collect()
}

/// Overlap curves for both evaluable families from a precomputed table grid.
pub fn overlap_curve_on<F: Real>(
    grid: &TableGrid<F>,
    signs: SignAssignment,
    n_xi: usize,
    tolerance: F,
    weighting: BcWeighting,
) -> Result<OverlapCurve<F>> {
    if n_xi < 2 {
        return Err(Error::InvalidArgument(format!("xi sweep needs at least 2 samples, got {n_xi}")));
    }
    let cells_i = grid.violation_map(InequalityType::I, signs, weighting)?;
    let cells_ii = grid.violation_map(InequalityType::II, signs, weighting)?;
    let samples = xi_samples(n_xi)
        .into_iter()
        .map(|xi| (xi, overlap_of_cells(&cells_i, grid.n, xi), overlap_of_cells(&cells_ii, grid.n, xi)))
        .collect();
    Ok(OverlapCurve {
        signs,
        samples,
        n_time: grid.n,
        n_xi,
        xi_i: threshold_of_cells(&cells_i, grid.n, tolerance)?,
        xi_ii: threshold_of_cells(&cells_ii, grid.n, tolerance)?,
    })
}

pub fn overlap_curve<F: Real, D: Dynamics<F> + ?Sized>(
    signs: SignAssignment,
    n_time: usize,
    n_xi: usize,
    tolerance: F,
    dynamics: &D,
) -> Result<OverlapCurve<F>> {
    let grid = TableGrid::build(dynamics, n_time)?;
    overlap_curve_on(&grid, signs, n_xi, tolerance, BcWeighting::Joint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::two_level::{Sign, SpinDynamics};
    use approx::assert_abs_diff_eq;

    const PMM: SignAssignment = SignAssignment::new(Sign::Plus, Sign::Minus, Sign::Minus);

    fn cell(delta_p: f64, dx: (f64, f64, f64)) -> ViolationCell<f64> {
        ViolationCell { t_ab: 0.0, t_bc: 0.0, delta_p, dx_ab: dx.0, dx_ac: dx.1, dx_bc: dx.2 }
    }

    #[test]
    fn admissible_examples() {
        let c = cell(0.25, (1.414, 0.0, 1.0));
        assert!(admissible(&c, 1.5));
        assert!(!admissible(&c, 1.0));
        let c = cell(0.0, (0.0, 0.0, 0.0));
        assert!(!admissible(&c, 2.0));
        assert!(!admissible(&cell(-0.1, (0.0, 0.0, 0.0)), 2.0));
    }

    #[test]
    fn criterion_presets() {
        let hw = criterion::<f64>("half_width").unwrap();
        assert_abs_diff_eq!(hw.xi, 0.849_321_800_288_019, epsilon = 1e-10);
        assert_eq!(criterion::<f64>("unit").unwrap().xi, 1.0);
        assert_eq!(criterion::<f64>("max").unwrap().xi, 2.0);
        assert_eq!(criterion::<f64>("fwhm"), Err(Error::UnknownCriterion("fwhm".into())));
        assert!(ResolutionCriterion::custom(2.5).is_err());
        assert!(ResolutionCriterion::custom(1.2).is_ok());
    }

    #[test]
    fn overlap_small_grid_values() {
        let d = SpinDynamics::spin(1.0).unwrap();
        assert_eq!(overlap_integral(InequalityType::I, PMM, 0.0, 64, &d).unwrap(), 0.0);
        assert_eq!(overlap_integral(InequalityType::I, PMM, 1.2, 64, &d).unwrap(), 0.0);
        assert!(overlap_integral(InequalityType::I, PMM, 2.0, 64, &d).unwrap() > 0.0);
        assert!(overlap_integral(InequalityType::I, PMM, 2.5, 64, &d).is_err());
    }

    #[test]
    fn threshold_requires_violation() {
        let frozen = SpinDynamics::spin(0.0).unwrap();
        assert_eq!(xi_threshold(InequalityType::I, PMM, 16, 1e-3, &frozen), Err(Error::NoViolationRegion));
    }

    #[test]
    fn threshold_bracket_is_consistent() {
        let d = SpinDynamics::spin(2.0).unwrap();
        let cells =
            TableGrid::build(&d, 64).unwrap().violation_map(InequalityType::II, PMM, BcWeighting::Joint).unwrap();
        let b = threshold_of_cells(&cells, 64, 1e-4).unwrap();
        assert!(b.hi - b.lo <= 1e-4);
        assert!(!is_positive(overlap_of_cells(&cells, 64, b.lo)));
        assert!(is_positive(overlap_of_cells(&cells, 64, b.hi)));
    }

    #[test]
    fn xi_samples_endpoints() {
        let xs = xi_samples::<f64>(200);
        assert_eq!(xs.len(), 200);
        assert_eq!(xs[0], 0.0);
        assert_eq!(xs[199], 2.0);
    }
}
