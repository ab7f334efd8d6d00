//! Polynomial (Richardson–Neville) extrapolation of sequences to the limit.

use serde::Serialize;

/// Outcome of [`extrapolate_to_zero`].
#[derive(Clone, Debug, Serialize)]
pub struct Extrapolation {
    pub value: f64,
    /// Difference between the two best neighbouring estimates.
    pub error_estimate: f64,
    /// Polynomial degree of the accepted estimate.
    pub order: usize,
    pub converged: bool,
}

/// Extrapolates samples `f(h_i)` to `h = 0` with the Neville tableau, which
/// fits `f(h) = L + c_1 h + c_2 h² + …`. The accepted entry is the one whose
/// difference to its predecessor in the same column is smallest.
pub fn extrapolate_to_zero(h: &[f64], f: &[f64], max_order: usize, tol: f64) -> Extrapolation {
    assert_eq!(h.len(), f.len(), "sample lengths differ");
    assert!(!h.is_empty(), "no samples");
    let n = h.len();
    let mut table: Vec<Vec<f64>> = vec![f.to_vec()];
    for j in 1..=max_order.min(n - 1) {
        let prev = &table[j - 1];
        let col: Vec<f64> = (j..n)
            .map(|i| {
                let a = prev[i - j];
                let b = prev[i - j + 1];
                b + (b - a) * h[i] / (h[i - j] - h[i])
            })
            .collect();
        table.push(col);
    }
    let mut best = Extrapolation {
        value: *f.last().expect("nonempty"),
        error_estimate: f64::INFINITY,
        order: 0,
        converged: false,
    };
    for (j, col) in table.iter().enumerate() {
        for w in col.windows(2) {
            let d = (w[1] - w[0]).abs();
            if d < best.error_estimate {
                best = Extrapolation { value: w[1], error_estimate: d, order: j, converged: false };
            }
        }
    }
    best.converged = best.error_estimate < tol;
    best
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
