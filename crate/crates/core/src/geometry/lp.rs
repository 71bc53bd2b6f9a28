//! Dense simplex for `max c·x  s.t.  A x <= b, x >= 0` with `b >= 0`.
//!
//! The slack basis is feasible from the start, so there is no phase one.
//! Bland's rule (lowest eligible index for both entering and leaving
//! variables) rules out cycling on the degenerate rows the separation LP is
//! full of.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub(crate) struct LpSolution {
    pub value: f64,
}

pub(crate) fn maximize(a: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> Result<LpSolution> {
    let (rows, cols) = a.shape();
    debug_assert_eq!(b.len(), rows);
    debug_assert_eq!(c.len(), cols);
    if b.iter().any(|&v| v < 0.0) {
        return Err(Error::numeric("simplex needs a non-negative right-hand side"));
    }
    // Tableau columns: structural, slack, rhs. Last row holds reduced costs.
    let width = cols + rows + 1;
    let mut t = DMatrix::<f64>::zeros(rows + 1, width);
    for i in 0..rows {
        for j in 0..cols {
            t[(i, j)] = a[(i, j)];
        }
        t[(i, cols + i)] = 1.0;
        t[(i, width - 1)] = b[i];
    }
    for j in 0..cols {
        t[(rows, j)] = -c[j];
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    const EPS: f64 = 1e-12;
    let max_iter = 50 * (rows + cols + 10);
    for _ in 0..max_iter {
        let Some(enter) = (0..width - 1).find(|&j| t[(rows, j)] < -EPS) else {
            return Ok(LpSolution { value: t[(rows, width - 1)] });
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            let coef = t[(i, enter)];
            if coef > EPS {
                let ratio = t[(i, width - 1)] / coef;
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - EPS || ((ratio - lr).abs() <= EPS && basis[i] < basis[li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pivot_row, _)) = leave else {
            return Err(Error::numeric("separation LP is unbounded"));
        };
        let p = t[(pivot_row, enter)];
        for j in 0..width {
            t[(pivot_row, j)] /= p;
        }
        for i in 0..=rows {
            if i == pivot_row {
                continue;
            }
            let factor = t[(i, enter)];
            if factor != 0.0 {
                for j in 0..width {
                    let delta = factor * t[(pivot_row, j)];
                    t[(i, j)] -= delta;
                }
            }
        }
        basis[pivot_row] = enter;
    }
    Err(Error::numeric(format!(
        "simplex hit its iteration cap ({rows} constraints, {cols} variables)"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_program() {
        // max x + y, x + 2y <= 4, 3x + y <= 6  ->  x = 8/5, y = 6/5
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 1.0]);
        let b = DVector::from_vec(vec![4.0, 6.0]);
        let c = DVector::from_vec(vec![1.0, 1.0]);
        let s = maximize(&a, &b, &c).unwrap();
        assert!((s.value - 2.8).abs() < 1e-12);
    }

    #[test]
    fn unbounded_is_an_error() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        let b = DVector::from_vec(vec![1.0]);
        let c = DVector::from_vec(vec![0.0, 1.0]);
        assert!(maximize(&a, &b, &c).is_err());
    }
}
