//! Lowest eigenpairs of a real symmetric tridiagonal matrix by Sturm-sequence
//! bisection and inverse iteration.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal<F> {
    diag: Vec<F>,
    off: Vec<F>,
}

impl<F: Real> SymTridiagonal<F> {
    pub fn new(diag: Vec<F>, off: Vec<F>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Eigensolver(format!(
                "diagonal length {} and off-diagonal length {} are inconsistent",
                diag.len(),
                off.len()
            )));
        }
        if diag.iter().chain(&off).any(|x| !x.is_finite()) {
            return Err(Error::Eigensolver("matrix has non-finite entries".into()));
        }
        Ok(SymTridiagonal { diag, off })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[F] {
        &self.diag
    }

    pub fn off(&self) -> &[F] {
        &self.off
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (F, F) {
        let n = self.len();
        let mut lo = F::infinity();
        let mut hi = F::neg_infinity();
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { F::zero() };
            let right = if i + 1 < n { self.off[i].abs() } else { F::zero() };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    fn norm(&self) -> F {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(F::min_positive_value())
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: F) -> usize {
        let pivmin = F::min_positive_value() * self.norm();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < F::zero() {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based).
    pub fn eigenvalue(&self, k: usize) -> Result<F> {
        if k >= self.len() {
            return Err(Error::Eigensolver(format!("eigenvalue index {k} out of range")));
        }
        let (mut lo, mut hi) = self.gershgorin();
        let pad = F::epsilon() * self.norm() * F::lit(4.0);
        lo = lo - pad;
        hi = hi + pad;
        for _ in 0..256 {
            let mid = (lo + hi) * F::lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok((lo + hi) * F::lit(0.5))
    }

    /// Eigenvector for a converged eigenvalue, by inverse iteration. The
    /// result is orthogonalized against `previous` and has unit Euclidean norm.
    pub fn eigenvector(&self, lambda: F, previous: &[Vec<F>]) -> Result<Vec<F>> {
        let n = self.len();
        let lu = ShiftedLu::factor(self, lambda);
        // deterministic, non-symmetric start so neither parity is missed
        let mut x: Vec<F> =
            (0..n).map(|i| F::one() + F::lit(0.5) * F::from_usize(i % 7).unwrap() / F::lit(7.0)).collect();
        for _ in 0..6 {
            orthogonalize(&mut x, previous);
            normalize(&mut x)?;
            lu.solve(&mut x);
        }
        orthogonalize(&mut x, previous);
        normalize(&mut x)?;
        Ok(x)
    }

    /// Lowest `m` eigenpairs, ascending, with orthonormal eigenvectors.
    pub fn lowest(&self, m: usize) -> Result<(Vec<F>, Vec<Vec<F>>)> {
        if m == 0 || m > self.len() {
            return Err(Error::Eigensolver(format!(
                "requested {m} eigenpairs of a {}x{} matrix",
                self.len(),
                self.len()
            )));
        }
        let mut values = Vec::with_capacity(m);
        let mut vectors: Vec<Vec<F>> = Vec::with_capacity(m);
        for k in 0..m {
            let lambda = self.eigenvalue(k)?;
            let v = self.eigenvector(lambda, &vectors)?;
            values.push(lambda);
            vectors.push(v);
        }
        Ok((values, vectors))
    }

    /// `‖T v − λ v‖₂`
    pub fn residual(&self, lambda: F, v: &[F]) -> F {
        let n = self.len();
        let mut s = F::zero();
        for i in 0..n {
            let mut r = (self.diag[i] - lambda) * v[i];
            if i > 0 {
                r = r + self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                r = r + self.off[i] * v[i + 1];
            }
            s = s + r * r;
        }
        s.sqrt()
    }
}

fn orthogonalize<F: Real>(x: &mut [F], basis: &[Vec<F>]) {
    for b in basis {
        let d = dot(x, b);
        for (xi, &bi) in x.iter_mut().zip(b) {
            *xi = *xi - d * bi;
        }
    }
}

fn normalize<F: Real>(x: &mut [F]) -> Result<()> {
    let scale = x.iter().fold(F::zero(), |m, v| m.max(v.abs()));
    if !(scale > F::zero()) || !scale.is_finite() {
        return Err(Error::Eigensolver("inverse iteration collapsed".into()));
    }
    for v in x.iter_mut() {
        *v = *v / scale;
    }
    let n = dot(x, x).sqrt();
    for v in x.iter_mut() {
        *v = *v / n;
    }
    Ok(())
}

pub(crate) fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |s, (&x, &y)| s + x * y)
}

/// LU factorization of `T − λI` with partial pivoting.
struct ShiftedLu<F> {
    dl: Vec<F>,
    d: Vec<F>,
    du: Vec<F>,
    du2: Vec<F>,
    swapped: Vec<bool>,
}

impl<F: Real> ShiftedLu<F> {
    fn factor(t: &SymTridiagonal<F>, lambda: F) -> Self {
        let n = t.len();
        let tiny = F::epsilon() * t.norm();
        let mut dl = t.off.clone();
        let mut du = t.off.clone();
        let mut d: Vec<F> = t.diag.iter().map(|&x| x - lambda).collect();
        let mut du2 = vec![F::zero(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == F::zero() {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] = d[i + 1] - fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        for v in d.iter_mut() {
            if v.abs() < tiny {
                *v = if *v < F::zero() { -tiny } else { tiny };
            }
        }
        ShiftedLu { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [F]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] = b[i + 1] - self.dl[i] * b[i];
            }
        }
        b[n - 1] = b[n - 1] / self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}
