use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs_asymmetry, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `sum_r [sum_{i<j} h_ii h_jj - h_11 h_22 - sum_{i<j} h_ij^2 + h_12^2]
    ///  <= n^2 (n-2) / (2(n-1)) |H|^2`
    Chen,
    /// `sum_r sum_{j>=2} h_11 h_jj <= n^2/4 |H|^2`
    Ricci,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates one of the two algebraic bounds on raw second fundamental form
/// components. `holds` allows a relative round-off of `1e-12`.
pub fn algebraic_bounds_check(h: &[Matrix], which: BoundKind) -> Result<BoundCheck> {
    let first = h
        .first()
        .ok_or_else(|| Error::InvalidArgument("need at least one matrix".into()))?;
    let n = first.nrows();
    let min_n = match which {
        BoundKind::Chen => 3,
        BoundKind::Ricci => 2,
    };
    if n < min_n {
        return Err(Error::InvalidArgument(format!("n must be at least {min_n}, got {n}")));
    }
    for (r, s) in h.iter().enumerate() {
        if s.nrows() != n || s.ncols() != n {
            return Err(Error::dims(format!("h[{r}]"), n, s.nrows().max(s.ncols())));
        }
        let asym = max_abs_asymmetry(s);
        if asym > 1e-12 {
            return Err(Error::NonSymmetric {
                what: format!("h[{r}]"),
                residual: asym,
            });
        }
    }
    let nf = n as f64;
    let mean_sq = h.iter().map(|s| s.trace().powi(2)).sum::<f64>() / (nf * nf);
    let mut lhs = 0.0;
    for s in h {
        match which {
            BoundKind::Chen => {
                for i in 0..n {
                    for j in (i + 1)..n {
                        lhs += s[(i, i)] * s[(j, j)] - s[(i, j)] * s[(i, j)];
                    }
                }
                lhs += -s[(0, 0)] * s[(1, 1)] + s[(0, 1)] * s[(0, 1)];
            }
            BoundKind::Ricci => {
                for j in 1..n {
                    lhs += s[(0, 0)] * s[(j, j)];
                }
            }
        }
    }
    let rhs = match which {
        BoundKind::Chen => nf * nf * (nf - 2.0) / (2.0 * (nf - 1.0)) * mean_sq,
        BoundKind::Ricci => nf * nf / 4.0 * mean_sq,
    };
    let tol = 1e-12 * (1.0 + lhs.abs() + rhs.abs());
    Ok(BoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vector;

    #[test]
    fn zero_is_equality() {
        for which in [BoundKind::Chen, BoundKind::Ricci] {
            let r = algebraic_bounds_check(&[Matrix::zeros(3, 3)], which).unwrap();
            assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
            assert!(r.holds);
        }
    }

    #[test]
    fn witness_equality() {
        let h = [Matrix::from_diagonal(&Vector::from_column_slice(&[1.0, 1.0, 2.0]))];
        let r = algebraic_bounds_check(&h, BoundKind::Chen).unwrap();
        assert_eq!(r.lhs, 4.0);
        assert!((r.rhs - 4.0).abs() < 1e-12);
    }

    #[test]
    fn ricci_equality_when_h11_is_half_trace() {
        let h = [Matrix::from_diagonal(&Vector::from_column_slice(&[2.0, 1.0, 1.0]))];
        let r = algebraic_bounds_check(&h, BoundKind::Ricci).unwrap();
        assert_eq!(r.lhs, 4.0);
        assert!((r.rhs - 4.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let mut s = Matrix::zeros(3, 3);
        s[(0, 2)] = 1.0;
        assert!(matches!(
            algebraic_bounds_check(&[s], BoundKind::Chen).unwrap_err(),
            Error::NonSymmetric { .. }
        ));
        assert!(algebraic_bounds_check(&[Matrix::zeros(2, 2)], BoundKind::Chen).is_err());
        assert!(algebraic_bounds_check(&[Matrix::zeros(2, 2)], BoundKind::Ricci).is_ok());
        assert!(algebraic_bounds_check(&[], BoundKind::Ricci).is_err());
    }
}
