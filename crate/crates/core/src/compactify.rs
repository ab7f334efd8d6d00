//! The dual-ball model of the compactification.
//!
//! `V` embeds in the open nuclear-norm ball by `φ`, and a horofunction with
//! datum `(e_i, α_i)` goes to `Σ e^{-α_i} e_i / Σ e^{-α_i}` on the boundary.
//! Elements of `V` act on `V` through the normalized form `[·,x]`.

use serde::Serialize;

use crate::error::{JbhError, Result};
use crate::horo_v::BoundaryDatumV;
use crate::linalg::singular_values;
use crate::spectral::{ensure_tripotent, spectral_decompose, tripotent_leq_with_tol};
use crate::triple::{normalized_inner_unchecked, real_combination, sum_elements, Element};

/// Tolerance for `‖x‖_* = 1`.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Spectral coefficients below this are treated as zero on the boundary.
pub const SUPPORT_COEFF_TOL: f64 = 1e-9;

/// `‖x‖_* = Σ λ_j`, the sum of singular values over all blocks.
pub fn dual_norm(x: &Element) -> f64 {
    x.blocks().iter().flat_map(singular_values).sum()
}

/// A point of the closed dual ball.
#[derive(Clone, Debug, PartialEq)]
pub struct DualBallPoint {
    pub point: Element,
    pub dual_norm: f64,
    pub boundary: bool,
    /// The face whose relative interior contains the point, when on the
    /// boundary.
    pub face: Option<Element>,
}

impl DualBallPoint {
    pub fn new(point: Element) -> Result<Self> {
        let n = dual_norm(&point);
        if n > 1.0 + BOUNDARY_TOL {
            return Err(JbhError::OutsideBall { norm: n });
        }
        let boundary = (n - 1.0).abs() <= BOUNDARY_TOL;
        let face = boundary.then(|| support_of(&point));
        Ok(Self { point, dual_norm: n, boundary, face })
    }
}

fn support_of(x: &Element) -> Element {
    let f = spectral_decompose(x);
    let t: Vec<&Element> = f.entries.iter().filter(|e| e.coeff >= SUPPORT_COEFF_TOL).map(|e| &e.tripotent).collect();
    sum_elements(&x.space(), t)
}

/// `φ(x) = Σ (e^{λ_i} − e^{−λ_i}) c_i / Σ_{i=1}^r (e^{λ_i} + e^{−λ_i})`,
/// the denominator running over all `r = rank(V)` coefficients.
pub fn phi_interior(x: &Element) -> DualBallPoint {
    let space = x.space();
    let f = spectral_decompose(x);
    let top = f.entries.first().map_or(0.0, |e| e.coeff);
    let zeros = space.rank() - f.len();
    let mut denom = zeros as f64 * 2.0 * (-top).exp();
    let mut num = Vec::with_capacity(f.len());
    for e in &f.entries {
        let (p, m) = ((e.coeff - top).exp(), (-e.coeff - top).exp());
        denom += p + m;
        num.push(p - m);
    }
    let c: Vec<f64> = num.iter().map(|n| n / denom).collect();
    let point = real_combination(&space, &c, &f.tripotents());
    let n = dual_norm(&point);
    DualBallPoint { point, dual_norm: n, boundary: false, face: None }
}

/// `φ(h) = Σ e^{−α_i} e_i / Σ e^{−α_i}`.
pub fn phi_boundary(h: &BoundaryDatumV) -> DualBallPoint {
    let w: Vec<f64> = h.alpha().iter().map(|a| (-a).exp()).collect();
    let total: f64 = w.iter().sum();
    let c: Vec<f64> = w.iter().map(|v| v / total).collect();
    let point = real_combination(h.space(), &c, h.tripotents());
    let n = dual_norm(&point);
    DualBallPoint { point, dual_norm: n, boundary: true, face: Some(h.support()) }
}

/// Datum whose image under [`phi_boundary`] is `x`, via
/// `α_i = log λ_1 − log λ_i` over the positive coefficients of `x`.
pub fn phi_boundary_preimage(x: &Element) -> Result<BoundaryDatumV> {
    let n = dual_norm(x);
    if (n - 1.0).abs() > BOUNDARY_TOL {
        return Err(JbhError::NotOnBoundary { dual_norm: n });
    }
    let f = spectral_decompose(x);
    let entries: Vec<_> = f.entries.iter().filter(|e| e.coeff >= SUPPORT_COEFF_TOL).collect();
    let top = entries[0].coeff.ln();
    BoundaryDatumV::new(
        entries.iter().map(|e| e.tripotent.clone()).collect(),
        entries.iter().map(|e| top - e.coeff.ln()).collect(),
    )
}

/// Both verdicts of a face-membership test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FaceMembership {
    /// `‖x‖_* ≤ 1` and `[e,x] = 1`.
    pub metric: bool,
    /// `x = Σ λ_i c_i` with `λ_i > 0`, `Σ λ_i = 1` and every `c_i ≤ e`.
    pub structural: bool,
}

impl FaceMembership {
    pub fn agree(self) -> bool {
        self.metric == self.structural
    }
}

/// Membership of `x` in `F_e = {x ∈ D° : [e,x] = 1}`.
pub fn face_membership(x: &Element, e: &Element, tol: f64) -> Result<FaceMembership> {
    x.check_shape(e)?;
    ensure_tripotent(e)?;
    let n = dual_norm(x);
    let pairing = normalized_inner_unchecked(e, x);
    let metric = n <= 1.0 + tol && (pairing - 1.0).norm() < tol;
    let mut structural = (n - 1.0).abs() < tol;
    if structural {
        for entry in spectral_decompose(x).entries.iter().filter(|c| c.coeff >= SUPPORT_COEFF_TOL) {
            if !tripotent_leq_with_tol(&entry.tripotent, e, tol.max(1e-9).sqrt())? {
                structural = false;
                break;
            }
        }
    }
    Ok(FaceMembership { metric, structural })
}

/// The tripotent `e` with `x ∈ ri F_e`: the sum of the support tripotents
/// of a boundary point.
pub fn relative_interior_face(x: &Element) -> Result<Element> {
    let n = dual_norm(x);
    if (n - 1.0).abs() > BOUNDARY_TOL {
        return Err(JbhError::NotOnBoundary { dual_norm: n });
    }
    Ok(support_of(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_element, random_frame, random_unitaries, seeded_rng};
    use crate::spectral::grouped_equal;
    use crate::triple::{triple_norm, TripleSpace, C64};

    fn nuclear_oracle(x: &Element) -> f64 {
        x.blocks()
            .iter()
            .map(|m| {
                let g = m * m.adjoint();
                g.symmetric_eigen().eigenvalues.iter().map(|v| v.max(0.0).sqrt()).sum::<f64>()
            })
            .sum()
    }

    #[test]
    fn dual_norm_examples() {
        let s = TripleSpace::matrix(2, 2).unwrap();
        assert!((dual_norm(&Element::unit(&s, 0, 0, 1)) - 1.0).abs() < 1e-15);
        assert!((dual_norm(&Element::diag(2, 2, &[0.5, 0.5])) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dual_norm_is_attained_by_support_sum() {
        let mut rng = seeded_rng(181);
        let s = TripleSpace::from_shapes(&[(2, 3), (3, 3)]).unwrap();
        for _ in 0..10 {
            let x = random_element(&mut rng, &s, 1.0);
            let n = dual_norm(&x);
            assert!((n - nuclear_oracle(&x)).abs() < 1e-10);
            let y = sum_elements(&s, &spectral_decompose(&x).tripotents());
            assert!(triple_norm(&y) <= 1.0 + 1e-12);
            assert!((normalized_inner_unchecked(&y, &x).re - n).abs() < 1e-8);
            for _ in 0..20 {
                let z = random_element(&mut rng, &s, 1.0);
                assert!(normalized_inner_unchecked(&z, &x).norm() <= n + 1e-10);
            }
        }
    }

    #[test]
    fn phi_examples() {
        let s = TripleSpace::disc();
        let p = phi_interior(&Element::zeros(&s));
        assert_eq!(p.point.max_abs(), 0.0);
        let x = Element::scalar(C64::new(3f64.ln(), 0.0));
        let p = phi_interior(&x);
        assert!((p.point.block(0)[(0, 0)].re - 0.8).abs() < 1e-15);
        assert!(!p.boundary);
    }

    #[test]
    fn phi_counts_zero_coefficients() {
        let l = 1.3f64;
        let p = phi_interior(&Element::diag(2, 2, &[l, 0.0]));
        let expected = (l.exp() - (-l).exp()) / (l.exp() + (-l).exp() + 2.0);
        assert!((p.point.block(0)[(0, 0)].re - expected).abs() < 1e-15);
        assert!(p.point.block(0)[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn phi_is_stable_for_large_coefficients() {
        let mut rng = seeded_rng(191);
        let s = TripleSpace::matrix(3, 3).unwrap();
        let x = random_element(&mut rng, &s, 800.0);
        let p = phi_interior(&x);
        assert!(p.point.max_abs().is_finite());
        assert!(p.dual_norm < 1.0 + 1e-12);
    }

    #[test]
    fn phi_boundary_examples() {
        let mut rng = seeded_rng(193);
        let s = TripleSpace::matrix(3, 3).unwrap();
        let f = random_frame(&mut rng, &s, 2);
        let h = BoundaryDatumV::new(vec![f[0].clone()], vec![0.0]).unwrap();
        assert!((&phi_boundary(&h).point - &f[0]).max_abs() < 1e-15);
        let h = BoundaryDatumV::new(f.clone(), vec![0.0, 2f64.ln()]).unwrap();
        let expected = (&f[0].scale(2.0) + &f[1]).scale(1.0 / 3.0);
        let p = phi_boundary(&h);
        assert!((&p.point - &expected).max_abs() < 1e-15);
        assert!((p.dual_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_round_trip() {
        let mut rng = seeded_rng(197);
        let s = TripleSpace::from_shapes(&[(2, 2), (2, 3)]).unwrap();
        for _ in 0..10 {
            let x = random_element(&mut rng, &s, 1.0);
            let x = x.scale(1.0 / dual_norm(&x));
            let h = phi_boundary_preimage(&x).unwrap();
            assert!(triple_norm(&(&phi_boundary(&h).point - &x)) < 1e-9);
        }
        assert!(matches!(phi_boundary_preimage(&Element::zeros(&s)), Err(JbhError::NotOnBoundary { .. })));
    }

    #[test]
    fn regrouped_representations_agree() {
        let mut rng = seeded_rng(199);
        let s = TripleSpace::matrix(3, 3).unwrap();
        let us = random_unitaries(&mut rng, &s);
        let (u, w) = &us[0];
        let x = Element::from_matrix(u * Element::diag(3, 3, &[1.2, 1.2, 0.4]).block(0) * w.adjoint());
        let v = crate::random::haar_unitary(&mut rng, 2);
        let mut u2 = u.clone();
        let mut w2 = w.clone();
        u2.columns_mut(0, 2).copy_from(&(u.columns(0, 2) * &v));
        w2.columns_mut(0, 2).copy_from(&(w.columns(0, 2) * &v));
        let y = Element::from_matrix(&u2 * Element::diag(3, 3, &[1.2, 1.2, 0.4]).block(0) * w2.adjoint());
        assert!(triple_norm(&(&x - &y)) < 1e-12);
        assert!(triple_norm(&(&phi_interior(&x).point - &phi_interior(&y).point)) < 1e-12);
        assert!(grouped_equal(&phi_interior(&x).point, &phi_interior(&y).point, 1e-9));
    }

    #[test]
    fn face_examples() {
        let mut rng = seeded_rng(211);
        let s = TripleSpace::matrix(3, 3).unwrap();
        let f = random_frame(&mut rng, &s, 3);
        let e = &f[0] + &f[1];
        let m = face_membership(&f[0], &f[0], 1e-9).unwrap();
        assert!(m.metric && m.structural);
        let m = face_membership(&(&f[0] + &f[1]).scale(0.5), &e, 1e-9).unwrap();
        assert!(m.metric && m.structural);
        let m = face_membership(&f[0], &f[1], 1e-9).unwrap();
        assert!(!m.metric && !m.structural);
        let m = face_membership(&f[2], &e, 1e-9).unwrap();
        assert!(!m.metric && !m.structural);
        let m = face_membership(&f[0].scale(0.5), &f[0], 1e-9).unwrap();
        assert!(!m.metric && !m.structural);
        assert!(face_membership(&f[0], &f[0].scale(0.5), 1e-9).is_err());
    }

    #[test]
    fn relative_interior_examples() {
        let mut rng = seeded_rng(223);
        let s = TripleSpace::matrix(2, 3).unwrap();
        let f = random_frame(&mut rng, &s, 2);
        assert!(triple_norm(&(&relative_interior_face(&f[0]).unwrap() - &f[0])) < 1e-12);
        let x = &f[0].scale(0.7) + &f[1].scale(0.3);
        let e = relative_interior_face(&x).unwrap();
        assert!(triple_norm(&(&e - &(&f[0] + &f[1]))) < 1e-12);
        assert!(relative_interior_face(&x.scale(0.5)).is_err());
        let p = DualBallPoint::new(x).unwrap();
        assert!(p.boundary);
        assert!(triple_norm(&(p.face.as_ref().unwrap() - &e)) < 1e-12);
    }
}
