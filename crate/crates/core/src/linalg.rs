//! Dense complex linear algebra helpers shared by every module.
//!
//! All solution paths go through LU-with-partial-pivoting linear solves;
//! explicit inverses are formed only to estimate condition numbers, never
//! to produce solutions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Condition-number cap above which conversions and channel evaluations
/// refuse to return a result.
pub const DEFAULT_COND_CAP: f64 = 1e12;

/// Maximum column absolute sum (induced one-norm).
pub fn norm1(a: &CMatrix) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|v| v.norm()).sum();
        best = best.max(s);
    }
    best
}

/// LU factorization wrapper carrying the operand's one-norm so the
/// condition number can be estimated after factorization.
pub struct Lu {
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    a_norm1: f64,
    n: usize,
}

impl Lu {
    pub fn new(a: &CMatrix) -> Self {
        Self {
            lu: a.clone().lu(),
            a_norm1: norm1(a),
            n: a.nrows(),
        }
    }

    /// Solve A X = B. None if the factorization found a zero pivot.
    pub fn solve(&self, b: &CMatrix) -> Option<CMatrix> {
        self.lu.solve(b)
    }

    pub fn solve_vec(&self, b: &CVector) -> Option<CVector> {
        self.lu.solve(b)
    }

    /// Solve x^T A = b^T, i.e. A^T y = b, reusing this factorization is not
    /// possible with nalgebra's LU, so callers factor A^T when they need
    /// many row solves. Provided here for one-off use.
    pub fn solve_transpose(a: &CMatrix, b: &CVector) -> Option<CVector> {
        a.transpose().lu().solve(b)
    }

    /// One-norm condition estimate: ‖A‖₁·‖A⁻¹‖₁ with the inverse obtained
    /// by solving against the identity. Exact, not a probe estimate; the
    /// matrices in this crate are small enough that the cost is acceptable.
    pub fn cond1(&self) -> f64 {
        let id = CMatrix::identity(self.n, self.n);
        match self.lu.solve(&id) {
            Some(inv) => self.a_norm1 * norm1(&inv),
            None => f64::INFINITY,
        }
    }
}

/// Solve A X = B, failing with the caller's error constructor when the
/// system is numerically singular at the given condition cap.
pub fn solve_capped(
    a: &CMatrix,
    b: &CMatrix,
    cap: f64,
    on_singular: impl FnOnce(f64, f64) -> crate::Error,
) -> crate::Result<CMatrix> {
    let lu = Lu::new(a);
    let cond = lu.cond1();
    if !cond.is_finite() || cond > cap {
        return Err(on_singular(cond, cap));
    }
    lu.solve(b).ok_or_else(|| on_singular(f64::INFINITY, cap))
}

/// Frobenius norm.
pub fn fro_norm(a: &CMatrix) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Relative asymmetry ‖A − Aᵀ‖_F / ‖A‖_F (plain transpose, not conjugate).
pub fn rel_asymmetry(a: &CMatrix) -> f64 {
    let d = a - a.transpose();
    let n = fro_norm(a);
    if n == 0.0 {
        0.0
    } else {
        fro_norm(&d) / n
    }
}

/// Largest singular-value-free proxy: spectral radius upper bound via
/// one-norm/inf-norm geometric mean is not needed; tests use exact
/// eigenvalues from nalgebra where required. Here: max |entry|.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
