//! Lawson-Hanson active-set NNLS: `min |A x - g|` over `x >= 0`.
//!
//! The entering variable is the lowest index with a positive gradient
//! component, which keeps the support (and so the reported face dimension)
//! reproducible across platforms.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub(crate) fn solve(a: &DMatrix<f64>, g: &DVector<f64>, tol: f64) -> Result<DVector<f64>> {
    // Heavy-tailed increments give columns spanning many orders of magnitude.
    // The projection is unchanged by positive column scaling and homogeneous
    // in g, so work with unit columns and a unit target.
    let norms: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    if norms.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::numeric("NNLS: zero or non-finite generator"));
    }
    let gn = g.norm();
    if gn == 0.0 {
        return Ok(DVector::zeros(a.ncols()));
    }
    let mut unit = a.clone();
    for (j, mut c) in unit.column_iter_mut().enumerate() {
        c /= norms[j];
    }
    let mut x = solve_scaled(&unit, &(g / gn), tol)?;
    for j in 0..x.len() {
        x[j] *= gn / norms[j];
    }
    Ok(x)
}

fn solve_scaled(a: &DMatrix<f64>, g: &DVector<f64>, tol: f64) -> Result<DVector<f64>> {
    let (_, n) = a.shape();
    let mut x = DVector::<f64>::zeros(n);
    if n == 0 {
        return Ok(x);
    }
    let col_scale = a.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let grad_tol = tol * col_scale.max(1.0) * g.norm().max(1.0);
    let mut passive = vec![false; n];
    let max_outer = 3 * n + 30;

    for _ in 0..max_outer {
        let w = a.transpose() * (g - a * &x);
        let Some(enter) = (0..n).find(|&j| !passive[j] && w[j] > grad_tol) else {
            return Ok(x);
        };
        passive[enter] = true;

        let mut inner = 0;
        loop {
            inner += 1;
            if inner > 3 * n + 30 {
                return Err(Error::numeric("NNLS inner loop did not converge"));
            }
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let z = least_squares(a, g, &idx)?;
            if z.iter().all(|&v| v > 0.0) {
                for (p, &j) in idx.iter().enumerate() {
                    x[j] = z[p];
                }
                break;
            }
            // Step toward z until the first passive coefficient hits zero.
            let mut alpha = f64::INFINITY;
            for (p, &j) in idx.iter().enumerate() {
                if z[p] <= 0.0 {
                    let denom = x[j] - z[p];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (p, &j) in idx.iter().enumerate() {
                x[j] += alpha * (z[p] - x[j]);
            }
            let xmax = x.amax();
            for &j in &idx {
                if x[j] <= tol * xmax.max(f64::MIN_POSITIVE) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    Err(Error::numeric(format!("NNLS did not converge within {max_outer} outer iterations")))
}

fn least_squares(a: &DMatrix<f64>, g: &DVector<f64>, idx: &[usize]) -> Result<DVector<f64>> {
    let sub = a.select_columns(idx);
    let svd = sub.svd(true, true);
    svd.solve(g, 1e-13)
        .map_err(|e| Error::numeric(format!("NNLS least-squares step failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthant_projection_is_clipping() {
        let a = DMatrix::<f64>::identity(3, 3);
        let g = DVector::from_vec(vec![1.5, -2.0, 0.25]);
        let x = solve(&a, &g, 1e-12).unwrap();
        let want = DVector::from_vec(vec![1.5, 0.0, 0.25]);
        assert!((x - want).amax() < 1e-14);
    }

    #[test]
    fn redundant_generator() {
        // Columns (1,0), (0,1), (1,1); target inside the cone.
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
        let g = DVector::from_vec(vec![2.0, 1.0]);
        let x = solve(&a, &g, 1e-12).unwrap();
        assert!((a * x - g).norm() < 1e-12);
    }
}
