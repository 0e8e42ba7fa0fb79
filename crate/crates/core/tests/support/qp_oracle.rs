//! Independent solver for the soft-margin SVM dual:
//!
//!   max  sum a_i - 1/2 sum a_i a_j y_i y_j K_ij
//!   s.t. 0 <= a_i <= C,  sum a_i y_i = 0
//!
//! Accelerated projected gradient on dense vectors; the projection onto the
//! box-and-hyperplane set is found by bisection on the hyperplane multiplier.

#![allow(dead_code)]

pub struct QpSolution {
    pub alpha: Vec<f64>,
    pub objective: f64,
    pub bias: f64,
}

pub fn dual_objective(alpha: &[f64], y: &[f64], gram: &[Vec<f64>]) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * gram[i][j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |lam: f64| -> Vec<f64> {
        v.iter()
            .zip(y)
            .map(|(&vi, &yi)| (vi - lam * yi).clamp(0.0, c))
            .collect()
    };
    let residual = |lam: f64| -> f64 { at(lam).iter().zip(y).map(|(a, yi)| a * yi).sum() };
    let bound = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) + c + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    // residual is non-increasing in lambda
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

pub fn solve(gram: &[Vec<f64>], y: &[f64], c: f64, iterations: usize) -> QpSolution {
    let n = y.len();
    let q: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| y[i] * y[j] * gram[i][j]).collect())
        .collect();
    // Lipschitz constant by power iteration
    let mut v = vec![1.0; n];
    let mut lip = 1.0;
    for _ in 0..500 {
        let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| q[i][j] * v[j]).sum()).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        lip = norm / v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = w.iter().map(|x| x / norm).collect();
    }
    let step = 1.0 / (lip * 1.05 + 1e-12);

    let grad = |a: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| 1.0 - (0..n).map(|j| q[i][j] * a[j]).sum::<f64>())
            .collect()
    };
    let mut x = vec![0.0; n];
    let mut z = x.clone();
    let mut t = 1.0f64;
    let mut best = dual_objective(&x, y, gram);
    let mut best_x = x.clone();
    for _ in 0..iterations {
        let g = grad(&z);
        let moved: Vec<f64> = z.iter().zip(&g).map(|(zi, gi)| zi + step * gi).collect();
        let x_next = project(&moved, y, c);
        let obj = dual_objective(&x_next, y, gram);
        if obj > best {
            best = obj;
            best_x = x_next.clone();
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let restart = obj < dual_objective(&x, y, gram);
        let beta = if restart { 0.0 } else { (t - 1.0) / t_next };
        z = x_next
            .iter()
            .zip(&x)
            .map(|(a, b)| a + beta * (a - b))
            .collect();
        x = x_next;
        t = if restart { 1.0 } else { t_next };
    }

    // bias from free multipliers, falling back to the midpoint of the feasible interval
    let f_nob: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| best_x[j] * y[j] * gram[i][j]).sum())
        .collect();
    let tol = 1e-7 * c;
    let free: Vec<usize> = (0..n).filter(|&i| best_x[i] > tol && best_x[i] < c - tol).collect();
    let bias = if !free.is_empty() {
        free.iter().map(|&i| y[i] - f_nob[i]).sum::<f64>() / free.len() as f64
    } else {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for i in 0..n {
            let r = y[i] - f_nob[i];
            let at_zero = best_x[i] <= tol;
            if (y[i] > 0.0) == at_zero {
                lo = lo.max(r);
            } else {
                hi = hi.min(r);
            }
        }
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo,
            (false, true) => hi,
            _ => 0.0,
        }
    };
    QpSolution {
        alpha: best_x,
        objective: best,
        bias,
    }
}
