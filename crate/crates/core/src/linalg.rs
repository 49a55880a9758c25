//! Small dense complex matrices with tolerance-aware predicates.
//!
//! Everything downstream (circuit assembly, gadget actions, the subgroup
//! criterion) is built on [`CMat`]. Dimensions stay tiny (at most 2^12), so
//! all routines are plain dense loops with no external solver.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Complex = Complex64;

pub const I: Complex = Complex::new(0.0, 1.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);
pub const ZERO: Complex = Complex::new(0.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("n-th root of (near-)zero: |z| = {0:.3e}")]
    ZeroRoot(f64),
    #[error("singular matrix: |det| = {0:.3e}")]
    Singular(f64),
}

/// Comparison thresholds shared across the crate.
///
/// `eq_eps` decides equalities and disequalities, `det_eps` decides
/// singularity, and `warn_band` marks the zone around a threshold where a
/// verdict is still taken at `eq_eps` semantics but a near-boundary warning
/// is recorded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eq_eps: f64,
    pub det_eps: f64,
    pub warn_band: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eq_eps: 1e-9,
            det_eps: 1e-12,
            warn_band: 1e-6,
        }
    }
}

impl Tolerance {
    pub fn new(eq_eps: f64, det_eps: f64, warn_band: f64) -> Result<Self, String> {
        if !(0.0 < eq_eps && eq_eps < warn_band) {
            return Err(format!(
                "tolerance requires 0 < eq_eps < warn_band, got {eq_eps} and {warn_band}"
            ));
        }
        if det_eps <= 0.0 {
            return Err(format!("tolerance requires det_eps > 0, got {det_eps}"));
        }
        Ok(Tolerance {
            eq_eps,
            det_eps,
            warn_band,
        })
    }
}

/// Dense square complex matrix, row-major, dimension a small power of two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMat {
    dim: usize,
    entries: Vec<Complex>,
}

impl CMat {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        CMat {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMat::zero(dim);
        for i in 0..dim {
            m.set(i, i, ONE);
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex]]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "rows must be square");
        let entries = rows.iter().flat_map(|r| r.iter().copied()).collect();
        CMat { dim, entries }
    }

    /// 2x2 shorthand, row-major.
    pub fn two(a: Complex, b: Complex, c: Complex, d: Complex) -> Self {
        CMat {
            dim: 2,
            entries: vec![a, b, c, d],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn mat_mul(&self, other: &CMat) -> Result<CMat, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimMismatch(self.dim, other.dim));
        }
        let n = self.dim;
        let mut out = CMat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMat {
        let n = self.dim;
        let mut out = CMat::zero(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Determinant: exact cofactor expansion for dim <= 2, partial-pivot
    /// elimination otherwise.
    pub fn det(&self) -> Complex {
        match self.dim {
            1 => self.get(0, 0),
            2 => self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0),
            _ => self.det_lu(),
        }
    }

    fn det_lu(&self) -> Complex {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut det = ONE;
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[col * n + col].norm();
            for row in (col + 1)..n {
                let mag = a[row * n + col].norm();
                if mag > best {
                    best = mag;
                    pivot = row;
                }
            }
            if best == 0.0 {
                return ZERO;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let diag = a[col * n + col];
            det *= diag;
            for row in (col + 1)..n {
                let factor = a[row * n + col] / diag;
                if factor == ZERO {
                    continue;
                }
                for j in col..n {
                    let sub = factor * a[col * n + j];
                    a[row * n + j] -= sub;
                }
            }
        }
        det
    }

    /// Inverse of a 2x2 matrix via the adjugate.
    pub fn inverse2(&self, tol: &Tolerance) -> Result<CMat, LinalgError> {
        if self.dim != 2 {
            return Err(LinalgError::DimMismatch(self.dim, 2));
        }
        let det = self.det();
        if det.norm() <= tol.det_eps {
            return Err(LinalgError::Singular(det.norm()));
        }
        Ok(CMat::two(
            self.get(1, 1) / det,
            -self.get(0, 1) / det,
            -self.get(1, 0) / det,
            self.get(0, 0) / det,
        ))
    }

    pub fn scale(&self, factor: Complex) -> CMat {
        CMat {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn neg(&self) -> CMat {
        self.scale(-ONE)
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let n = self.dim;
        let m = other.dim;
        let mut out = CMat::zero(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out.set(i * m + k, j * m + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Max-norm of the entry-wise difference.
    pub fn max_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Entry-wise distance up to a global sign: min(|A - B|, |A + B|).
    pub fn max_diff_up_to_sign(&self, other: &CMat) -> f64 {
        self.max_diff(other).min(self.max_diff(&other.neg()))
    }

    /// ‖U†U − I‖_max, zero for a unitary matrix.
    pub fn unitarity_error(&self) -> f64 {
        let gram = self.dagger().mat_mul(self).expect("same dim");
        gram.max_diff(&CMat::identity(self.dim))
    }
}

/// Principal n-th root: modulus^(1/n) · exp(i·Arg(z)/n) with Arg ∈ (−π, π].
pub fn principal_root(z: Complex, n: u32, tol: &Tolerance) -> Result<Complex, LinalgError> {
    let r = z.norm();
    if r <= tol.det_eps {
        return Err(LinalgError::ZeroRoot(r));
    }
    // atan2 returns −π for arguments on the branch cut with negative zero
    // imaginary part; force the principal branch Arg ∈ (−π, π].
    let arg = if z.im == 0.0 {
        if z.re < 0.0 {
            std::f64::consts::PI
        } else {
            0.0
        }
    } else {
        z.im.atan2(z.re)
    };
    Ok(Complex::from_polar(
        r.powf(1.0 / f64::from(n)),
        arg / f64::from(n),
    ))
}

/// Distance-reporting equality: true iff |a − b| ≤ eq_eps; the margin is the
/// distance itself so callers can raise near-boundary warnings when it lands
/// in (eq_eps, warn_band).
pub fn approx_eq(a: Complex, b: Complex, tol: &Tolerance) -> (bool, f64) {
    let margin = (a - b).norm();
    (margin <= tol.eq_eps, margin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn hadamard() -> CMat {
        CMat::two(
            c(FRAC_1_SQRT_2, 0.0),
            c(FRAC_1_SQRT_2, 0.0),
            c(FRAC_1_SQRT_2, 0.0),
            c(-FRAC_1_SQRT_2, 0.0),
        )
    }

    /// Independent oracle: per-entry sum-of-products, no pivoting or reuse.
    fn naive_mul(a: &CMat, b: &CMat) -> CMat {
        let n = a.dim();
        let mut out = CMat::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += a.get(i, k) * b.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    #[test]
    fn mat_mul_identity_and_involution() {
        let id = CMat::identity(2);
        assert_eq!(id.mat_mul(&id).unwrap(), id);
        let h = hadamard();
        assert!(h.mat_mul(&h).unwrap().max_diff(&id) < 1e-15);
    }

    #[test]
    fn mat_mul_matches_entrywise_oracle() {
        let a = CMat::two(c(1.0, 2.0), c(-0.5, 0.3), c(0.0, -1.0), c(2.0, 0.1));
        let b = CMat::two(c(0.3, -0.4), c(1.5, 0.0), c(-1.0, 1.0), c(0.2, 2.0));
        let fast = a.mat_mul(&b).unwrap();
        assert!(fast.max_diff(&naive_mul(&a, &b)) < 1e-15);
    }

    #[test]
    fn mat_mul_dim_mismatch() {
        let err = CMat::identity(2).mat_mul(&CMat::identity(4)).unwrap_err();
        assert_eq!(err, LinalgError::DimMismatch(2, 4));
    }

    #[test]
    fn dagger_basics() {
        let id = CMat::identity(2);
        assert_eq!(id.dagger(), id);
        let s = CMat::two(ONE, ZERO, ZERO, I);
        let s_dag = s.dagger();
        assert_eq!(s_dag.get(1, 1), c(0.0, -1.0));
        // unitarity oracle by direct multiply: Rx(2π/3)† Rx(2π/3) = I
        let th = 2.0 * PI / 3.0;
        let rx = CMat::two(
            c((th / 2.0).cos(), 0.0),
            c(0.0, -(th / 2.0).sin()),
            c(0.0, -(th / 2.0).sin()),
            c((th / 2.0).cos(), 0.0),
        );
        assert!(rx.dagger().mat_mul(&rx).unwrap().max_diff(&id) < 1e-15);
    }

    #[test]
    fn det_small_and_pivoted() {
        assert_eq!(CMat::identity(4).det(), ONE);
        // forces a row swap in the elimination path
        let m = CMat::from_rows(&[
            &[ZERO, ONE, ZERO, ZERO],
            &[ONE, ZERO, ZERO, ZERO],
            &[ZERO, ZERO, ONE, ZERO],
            &[ZERO, ZERO, ZERO, ONE],
        ]);
        assert!((m.det() + ONE).norm() < 1e-15);
        // |det| = 1 for a product of unitaries
        let h4 = hadamard().kron(&hadamard());
        let prod = h4.mat_mul(&m).unwrap();
        assert!((prod.det().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn principal_root_branch() {
        let tol = Tolerance::default();
        assert_eq!(principal_root(ONE, 2, &tol).unwrap(), ONE);
        // Arg(−1) = π is forced onto the principal branch, so the root is +i.
        let r = principal_root(c(-1.0, 0.0), 2, &tol).unwrap();
        assert!((r - I).norm() < 1e-15);
        let r = principal_root(c(-1.0, -0.0), 2, &tol).unwrap();
        assert!((r - I).norm() < 1e-15, "negative-zero imaginary part");
        let err = principal_root(ZERO, 2, &tol).unwrap_err();
        assert!(matches!(err, LinalgError::ZeroRoot(_)));
    }

    #[test]
    fn principal_root_powers_back() {
        let tol = Tolerance::default();
        let z = c(-0.7, 1.9);
        let r = principal_root(z, 3, &tol).unwrap();
        assert!((r * r * r - z).norm() < 1e-12);
    }

    #[test]
    fn approx_eq_margins() {
        let tol = Tolerance::default();
        let (eq, margin) = approx_eq(ONE, c(1.0, 1e-12), &tol);
        assert!(eq && margin < 1e-11);
        let (eq, margin) = approx_eq(ZERO, ONE, &tol);
        assert!(!eq);
        assert!((margin - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse2_roundtrip_and_singular() {
        let tol = Tolerance::default();
        let m = CMat::two(c(1.0, 1.0), c(2.0, -0.5), c(0.0, 3.0), c(-1.0, 0.2));
        let inv = m.inverse2(&tol).unwrap();
        assert!(m.mat_mul(&inv).unwrap().max_diff(&CMat::identity(2)) < 1e-12);
        let sing = CMat::two(ONE, ONE, ONE, ONE);
        assert!(matches!(sing.inverse2(&tol), Err(LinalgError::Singular(_))));
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(1e-9, 1e-12, 1e-6).is_ok());
        assert!(Tolerance::new(1e-6, 1e-12, 1e-9).is_err());
        assert!(Tolerance::new(1e-9, 0.0, 1e-6).is_err());
    }
}
