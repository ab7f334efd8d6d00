//! Dense factorisations of small complex matrices.

use faer::{Mat, Side};

use crate::triple::{CMat, C64};

/// Thin singular value decomposition `m = U diag(s) V*`, with `s`
/// nonincreasing.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

fn to_faer(m: &CMat) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn svd(m: &CMat) -> Svd {
    if m.is_empty() {
        return Svd { u: CMat::zeros(m.nrows(), 0), s: Vec::new(), v: CMat::zeros(m.ncols(), 0) };
    }
    let f = to_faer(m);
    let d = f.thin_svd().expect("SVD iteration converges for finite input");
    let s = d.S().column_vector().iter().map(|z| z.re).collect();
    Svd { u: from_faer(d.U()), s, v: from_faer(d.V()) }
}

/// Singular values, nonincreasing.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s = to_faer(m).singular_values().expect("SVD iteration converges for finite input");
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Eigenvalues (nondecreasing) and eigenvectors of a Hermitian matrix; only
/// the lower triangle is read.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let f = to_faer(m);
    let e = f.self_adjoint_eigen(Side::Lower).expect("eigen iteration converges for finite input");
    let vals = e.S().column_vector().iter().map(|z| z.re).collect();
    (vals, from_faer(e.U()))
}

/// `m^s` for Hermitian positive semidefinite `m`.
pub fn hermitian_power(m: &CMat, s: f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| C64::new(l.max(0.0).powf(s), 0.0)),
    ));
    &vecs * d * vecs.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_matrix, seeded_rng};

    #[test]
    fn svd_reconstructs_rank_deficient_input() {
        let mut rng = seeded_rng(3);
        for n in 1..10 {
            for _ in 0..50 {
                let g = gaussian_matrix(&mut rng, n, n + 1);
                let v = gaussian_matrix(&mut rng, n * n, 1);
                for m in [g.clone(), &v * v.adjoint(), g.adjoint()] {
                    let d = svd(&m);
                    let sigma = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
                        d.s.len(),
                        d.s.iter().map(|&x| C64::new(x, 0.0)),
                    ));
                    let back = &d.u * sigma * d.v.adjoint();
                    assert!((back - &m).norm() < 1e-13 * m.norm().max(1.0));
                    assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
                }
            }
        }
    }

    #[test]
    fn hermitian_power_squares_back() {
        let mut rng = seeded_rng(5);
        let g = gaussian_matrix(&mut rng, 4, 4);
        let h = &g * g.adjoint();
        let r = hermitian_power(&h, 0.5);
        assert!((&r * &r - &h).norm() < 1e-12 * h.norm());
    }
}
