//! Thomas elimination for complex tridiagonal systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pivots below this magnitude abort the elimination.
pub const PIVOT_FLOOR: f64 = 1e-300;

/// LU factors of a tridiagonal matrix with constant-in-time coefficients.
///
/// `sub[i]` multiplies x[i-1] in row i, `sup[i]` multiplies x[i+1]. The
/// forward sweep is done once; each [`solve_in_place`](Self::solve_in_place)
/// is then a forward and a backward substitution.
#[derive(Debug, Clone)]
pub struct FactoredTridiagonal {
    sub: Vec<Complex64>,
    /// c'_i = sup_i / pivot_i
    sup_scaled: Vec<Complex64>,
    inv_pivot: Vec<Complex64>,
}

impl FactoredTridiagonal {
    pub fn new(sub: &[Complex64], diag: &[Complex64], sup: &[Complex64]) -> Result<Self> {
        let n = diag.len();
        assert!(n > 0, "empty tridiagonal system");
        assert_eq!(sub.len(), n);
        assert_eq!(sup.len(), n);

        let mut sup_scaled = vec![Complex64::new(0.0, 0.0); n];
        let mut inv_pivot = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let pivot = if i == 0 {
                diag[0]
            } else {
                diag[i] - sub[i] * sup_scaled[i - 1]
            };
            if pivot.norm() < PIVOT_FLOOR {
                return Err(Error::Numerical(format!(
                    "tridiagonal pivot {i} has magnitude {:e}",
                    pivot.norm()
                )));
            }
            inv_pivot[i] = pivot.inv();
            sup_scaled[i] = sup[i] * inv_pivot[i];
        }
        Ok(Self {
            sub: sub.to_vec(),
            sup_scaled,
            inv_pivot,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [Complex64]) {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.sub[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.sup_scaled[i] * rhs[i + 1];
        }
    }
}

/// One-shot solve of `A x = rhs`.
pub fn solve_tridiagonal(
    sub: &[Complex64],
    diag: &[Complex64],
    sup: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let lu = FactoredTridiagonal::new(sub, diag, sup)?;
    let mut x = rhs.to_vec();
    lu.solve_in_place(&mut x);
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn apply(sub: &[Complex64], diag: &[Complex64], sup: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut v = diag[i] * x[i];
                if i > 0 {
                    v += sub[i] * x[i - 1];
                }
                if i + 1 < n {
                    v += sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    #[test]
    fn residual_is_small_for_crank_nicolson_like_matrix() {
        let n = 9;
        let h = 0.05;
        let sub = vec![c(0.0, h / 2.0); n];
        let sup = sub.clone();
        let diag: Vec<_> = (0..n).map(|j| c(1.0, h / 2.0 * (j as f64 - 4.0))).collect();
        let rhs: Vec<_> = (0..n).map(|j| c(j as f64, -(j as f64) * 0.5)).collect();
        let x = solve_tridiagonal(&sub, &diag, &sup, &rhs).unwrap();
        for (a, b) in apply(&sub, &diag, &sup, &x).iter().zip(&rhs) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn singular_leading_pivot_is_rejected() {
        let z = vec![c(0.0, 0.0); 3];
        let err = solve_tridiagonal(&z, &z, &z, &z).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }
}
