//! Peirce projections, Bergman operators and Möbius transformations.

use crate::error::{JbhError, Result};
use crate::spectral::{ensure_orthogonal, ensure_tripotent, spectral_decompose, Frame};
use crate::triple::{box_operator, quadratic_pair, tp, triple_norm, CMat, Element, LinOp, TripleSpace, C64};

/// Peirce projection `P_k(e)` onto the `k/2`-eigenspace of `e□e`.
pub fn peirce_projection(e: &Element, k: u8) -> Result<LinOp> {
    ensure_tripotent(e)?;
    Ok(peirce_projection_unchecked(e, k)?.with_self_adjoint_hint(true))
}

fn peirce_projection_unchecked(e: &Element, k: u8) -> Result<LinOp> {
    let q2 = quadratic_pair(e, e)?;
    match k {
        2 => Ok(q2),
        1 => Ok(box_operator(e, e)?.sub(&q2).scale(2.0)),
        0 => bergman(e, e),
        _ => Err(JbhError::Index(format!("Peirce index must be 0, 1 or 2, got {k}"))),
    }
}

/// `B(b,c) = I − 2 b□c + Q_b Q_c`.
pub fn bergman(b: &Element, c: &Element) -> Result<LinOp> {
    b.check_shape(c)?;
    let space = b.space();
    let id = LinOp::identity(&space);
    Ok(id.sub(&box_operator(b, c)?.scale(2.0)).add(&quadratic_pair(b, c)?))
}

/// Joint Peirce projections `P_ij`, `0 ≤ i ≤ j ≤ n`, of an orthogonal
/// family `e_1, …, e_n`. Index 0 stands for the complement of the family.
#[derive(Clone, Debug)]
pub struct JointPeirceSystem {
    space: TripleSpace,
    tripotents: Vec<Element>,
    projections: Vec<LinOp>,
}

impl JointPeirceSystem {
    pub fn n(&self) -> usize {
        self.tripotents.len()
    }

    pub fn tripotents(&self) -> &[Element] {
        &self.tripotents
    }

    pub fn space(&self) -> &TripleSpace {
        &self.space
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let n = self.n();
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        assert!(j <= n, "joint Peirce index ({i},{j}) out of range for n = {n}");
        i * (n + 1) - i * i.saturating_sub(1) / 2 + (j - i)
    }

    /// `P_ij`, symmetric in `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &LinOp {
        &self.projections[self.slot(i, j)]
    }

    /// All index pairs `0 ≤ i ≤ j ≤ n` in storage order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).collect()
    }

    /// `Σ c_ij P_ij` over all pairs.
    pub fn combine(&self, coeff: impl Fn(usize, usize) -> f64) -> LinOp {
        self.pairs()
            .into_iter()
            .fold(LinOp::zero(&self.space), |acc, (i, j)| acc.add(&self.get(i, j).scale(coeff(i, j))))
    }

    /// Worst residual among idempotence, mutual annihilation, completeness
    /// and the action on the family itself.
    pub fn invariant_residual(&self) -> f64 {
        let pairs = self.pairs();
        let mut worst: f64 = 0.0;
        for (a, &(i, j)) in pairs.iter().enumerate() {
            let p = self.get(i, j);
            worst = worst.max(p.compose(p).max_abs_diff(p));
            for &(k, l) in &pairs[a + 1..] {
                let q = self.get(k, l);
                worst = worst.max(p.compose(q).matrix().iter().map(|z| z.norm()).fold(0.0, f64::max));
                worst = worst.max(q.compose(p).matrix().iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst = worst.max(self.combine(|_, _| 1.0).max_abs_diff(&LinOp::identity(&self.space)));
        for (k, e) in self.tripotents.iter().enumerate() {
            for &(i, j) in &pairs {
                let img = self.get(i, j).apply(e);
                let expected = if i == j && i == k + 1 { e.clone() } else { Element::zeros(&self.space) };
                worst = worst.max((&img - &expected).max_abs());
            }
        }
        worst
    }
}

/// Joint Peirce system of mutually orthogonal tripotents.
pub fn joint_peirce(tripotents: &[Element]) -> Result<JointPeirceSystem> {
    let first = tripotents
        .first()
        .ok_or_else(|| JbhError::InvalidDatum("joint Peirce system needs at least one tripotent".into()))?;
    let space = first.space();
    for e in tripotents {
        e.check_space(&space)?;
        ensure_tripotent(e)?;
    }
    ensure_orthogonal(tripotents)?;
    Ok(joint_peirce_unchecked(&space, tripotents))
}

pub(crate) fn joint_peirce_unchecked(space: &TripleSpace, tripotents: &[Element]) -> JointPeirceSystem {
    let n = tripotents.len();
    let single: Vec<[LinOp; 3]> = tripotents
        .iter()
        .map(|e| {
            [0u8, 1, 2].map(|k| peirce_projection_unchecked(e, k).expect("shapes agree by construction"))
        })
        .collect();
    let mut projections = Vec::new();
    for i in 0..=n {
        for j in i..=n {
            let mut p = LinOp::identity(space);
            for (k, ps) in single.iter().enumerate() {
                let m = usize::from(i == k + 1) + usize::from(j == k + 1);
                p = p.compose(&ps[m]);
            }
            projections.push(p.with_self_adjoint_hint(true));
        }
    }
    JointPeirceSystem { space: space.clone(), tripotents: tripotents.to_vec(), projections }
}

/// `B(x,x)^{sign/2}` from the spectral frame of `x`.
pub fn bergman_half_powers(x: &Element, sign: i8) -> Result<LinOp> {
    let norm = triple_norm(x);
    if norm >= 1.0 {
        return Err(JbhError::OutsideBall { norm });
    }
    if sign != 1 && sign != -1 {
        return Err(JbhError::Index(format!("sign must be +1 or -1, got {sign}")));
    }
    let frame = spectral_decompose(x);
    let space = x.space();
    if frame.is_empty() {
        return Ok(LinOp::identity(&space));
    }
    Ok(half_power_from_frame(&space, &frame, f64::from(sign) / 2.0))
}

/// `Σ (1−λ_i²)^s (1−λ_j²)^s P_ij` with `λ_0 = 0`.
pub(crate) fn half_power_from_frame(space: &TripleSpace, frame: &Frame, s: f64) -> LinOp {
    let sys = joint_peirce_unchecked(space, &frame.tripotents());
    let lam = frame.coefficients();
    let w = |i: usize| if i == 0 { 1.0 } else { (1.0 - lam[i - 1] * lam[i - 1]).powf(s) };
    sys.combine(|i, j| w(i) * w(j)).with_self_adjoint_hint(true)
}

/// Condition numbers above this are logged by [`mobius`].
pub const CONDITION_WARN: f64 = 1e8;

fn condition_number(m: &CMat) -> f64 {
    let sv = crate::linalg::singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(max), Some(min)) => max / min,
        _ => 1.0,
    }
}

/// Möbius transformation `g_a`, with `B(a,a)^{1/2}` computed once.
#[derive(Clone, Debug)]
pub struct Mobius {
    a: Element,
    sqrt_b: LinOp,
}

impl Mobius {
    pub fn new(a: &Element) -> Result<Self> {
        Ok(Self { a: a.clone(), sqrt_b: bergman_half_powers(a, 1)? })
    }

    pub fn point(&self) -> &Element {
        &self.a
    }

    /// `g_a(x) = a + B(a,a)^{1/2} (I + x□a)^{-1} x`.
    pub fn apply(&self, x: &Element) -> Result<Element> {
        self.a.check_shape(x)?;
        let norm = triple_norm(x);
        if norm >= 1.0 {
            return Err(JbhError::OutsideBall { norm });
        }
        let space = x.space();
        let m = LinOp::identity(&space).add(&box_operator(x, &self.a)?);
        let cond = condition_number(m.matrix());
        if cond > CONDITION_WARN {
            log::warn!("I + x□a is ill-conditioned (condition number {cond:.3e})");
        }
        let y = m
            .matrix()
            .clone()
            .lu()
            .solve(&x.to_vector())
            .ok_or(JbhError::Singular)?;
        let y = Element::from_vector(&space, &y);
        Ok(&self.a + &self.sqrt_b.apply(&y))
    }
}

/// `g_a(x)` for `‖a‖, ‖x‖ < 1`.
pub fn mobius(a: &Element, x: &Element) -> Result<Element> {
    Mobius::new(a)?.apply(x)
}

/// Worst `‖{P_2 u, P_0 v, w}‖` over the given samples, which vanishes by
/// Peirce arithmetic.
pub fn peirce_arithmetic_residual(e: &Element, samples: &[(Element, Element, Element)]) -> Result<f64> {
    let p2 = peirce_projection(e, 2)?;
    let p0 = peirce_projection(e, 0)?;
    Ok(samples
        .iter()
        .map(|(u, v, w)| {
            let a = p2.apply(u);
            let b = p0.apply(v);
            triple_norm(&tp(&a, &b, w)).max(triple_norm(&tp(&b, &a, w)))
        })
        .fold(0.0, f64::max))
}

/// Scalar multiple of the identity, for concise operator expressions.
pub fn scalar_op(space: &TripleSpace, s: f64) -> LinOp {
    let n = space.complex_dim();
    LinOp::from_matrix(space, CMat::identity(n, n) * C64::new(s, 0.0)).expect("square by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opnorm::induced_op_norm;
    use crate::random::{random_ball_element, random_element, random_frame, seeded_rng};
    use crate::triple::C64;

    fn herm_power(m: &CMat, s: f64) -> CMat {
        let eig = m.clone().symmetric_eigen();
        let d = CMat::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.powf(s), 0.0)));
        &eig.eigenvectors * d * eig.eigenvectors.adjoint()
    }

    // Matrix-ball Möbius map, used as an oracle.
    fn matrix_mobius(a: &CMat, z: &CMat) -> CMat {
        let (p, q) = a.shape();
        let ip = CMat::identity(p, p);
        let iq = CMat::identity(q, q);
        let left = herm_power(&(&ip - a * a.adjoint()), -0.5);
        let right = herm_power(&(&iq - a.adjoint() * a), 0.5);
        let inv = (&iq + a.adjoint() * z).try_inverse().unwrap();
        left * (z + a) * inv * right
    }

    #[test]
    fn minimal_peirce_ranks_in_m22() {
        let s = TripleSpace::matrix(2, 2).unwrap();
        let e = Element::unit(&s, 0, 0, 0);
        let ranks: Vec<usize> = (0..3).map(|k| peirce_projection(&e, k).unwrap().rank(1e-9)).collect();
        assert_eq!(ranks, vec![1, 2, 1]);
        assert!((&peirce_projection(&e, 2).unwrap().apply(&e) - &e).max_abs() < 1e-15);
        let eig = box_operator(&e, &e).unwrap().eigenvalues_hermitian(1e-9).unwrap();
        let count = |v: f64| eig.iter().filter(|&&l| (l - v).abs() < 1e-12).count();
        assert_eq!((count(1.0), count(0.5), count(0.0)), (1, 2, 1));
    }

    #[test]
    fn p2_is_idempotent_for_random_minimal() {
        let mut rng = seeded_rng(61);
        let s = TripleSpace::matrix(3, 2).unwrap();
        for _ in 0..10 {
            let e = random_frame(&mut rng, &s, 1).remove(0);
            let p = peirce_projection(&e, 2).unwrap();
            assert!(p.compose(&p).max_abs_diff(&p) < 1e-12);
        }
    }

    #[test]
    fn non_tripotent_rejected() {
        let x = Element::diag(2, 2, &[0.5, 0.2]);
        assert!(matches!(peirce_projection(&x, 2), Err(JbhError::NotTripotent { .. })));
        assert!(peirce_projection(&Element::diag(2, 2, &[1.0, 0.0]), 3).is_err());
    }

    #[test]
    fn single_tripotent_system_matches_peirce() {
        let s = TripleSpace::matrix(2, 3).unwrap();
        let e = Element::unit(&s, 0, 1, 1);
        let sys = joint_peirce(std::slice::from_ref(&e)).unwrap();
        for (i, j, k) in [(1, 1, 2u8), (0, 1, 1), (0, 0, 0)] {
            assert!(sys.get(i, j).max_abs_diff(&peirce_projection(&e, k).unwrap()) < 1e-14);
        }
    }

    #[test]
    fn joint_space_v12_in_m22() {
        let s = TripleSpace::matrix(2, 2).unwrap();
        let e1 = Element::unit(&s, 0, 0, 0);
        let e2 = Element::unit(&s, 0, 1, 1);
        let sys = joint_peirce(&[e1, e2]).unwrap();
        let p12 = sys.get(1, 2);
        assert_eq!(p12.rank(1e-9), 2);
        for (i, j) in [(0, 1), (1, 0)] {
            let u = Element::unit(&s, 0, i, j);
            assert!((&p12.apply(&u) - &u).max_abs() < 1e-15);
        }
        assert!(sys.invariant_residual() < 1e-12);
    }

    #[test]
    fn joint_system_invariants_random() {
        let mut rng = seeded_rng(67);
        let s = TripleSpace::from_shapes(&[(3, 3), (2, 1)]).unwrap();
        let f = random_frame(&mut rng, &s, 4);
        let sys = joint_peirce(&f).unwrap();
        assert!(sys.invariant_residual() < 1e-10);
        let e_n = &f[0] + &f[1];
        let p2 = peirce_projection(&e_n, 2).unwrap();
        let sum = sys.combine(|i, j| if i >= 1 && j <= 2 { 1.0 } else { 0.0 });
        assert!(p2.max_abs_diff(&sum) < 1e-10);
        let sub = joint_peirce(&f[..2]).unwrap();
        for (i, j) in [(1, 1), (1, 2), (2, 2)] {
            assert!(sub.get(i, j).max_abs_diff(sys.get(i, j)) < 1e-10);
        }
    }

    #[test]
    fn non_orthogonal_rejected() {
        let s = TripleSpace::matrix(2, 2).unwrap();
        let e11 = Element::unit(&s, 0, 0, 0);
        let e12 = Element::unit(&s, 0, 0, 1);
        assert!(matches!(joint_peirce(&[e11, e12]), Err(JbhError::NotOrthogonal { .. })));
    }

    #[test]
    fn bergman_special_cases() {
        let s = TripleSpace::matrix(2, 3).unwrap();
        let z = Element::zeros(&s);
        assert!(bergman(&z, &z).unwrap().max_abs_diff(&LinOp::identity(&s)) < 1e-15);
        let e = Element::unit(&s, 0, 0, 1);
        assert!(bergman(&e, &e).unwrap().max_abs_diff(&peirce_projection(&e, 0).unwrap()) < 1e-15);
    }

    #[test]
    fn bergman_kills_peirce2_of_smaller_tripotent() {
        let mut rng = seeded_rng(71);
        let s = TripleSpace::matrix(3, 4).unwrap();
        let f = random_frame(&mut rng, &s, 3);
        let c = &f[0] + &f[1];
        let e = &c + &f[2];
        let b = bergman(&e, &c).unwrap();
        let p2 = peirce_projection(&c, 2).unwrap();
        assert!(b.compose(&p2).matrix().iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10);
    }

    #[test]
    fn half_powers_square_to_bergman() {
        let mut rng = seeded_rng(73);
        for shapes in [vec![(2, 3)], vec![(2, 2), (1, 3)]] {
            let s = TripleSpace::from_shapes(&shapes).unwrap();
            for _ in 0..10 {
                let x = random_ball_element(&mut rng, &s, 0.9);
                let b = bergman(&x, &x).unwrap();
                let h = bergman_half_powers(&x, 1).unwrap();
                let hi = bergman_half_powers(&x, -1).unwrap();
                assert!(h.compose(&h).max_abs_diff(&b) < 1e-9);
                assert!(h.compose(&hi).max_abs_diff(&LinOp::identity(&s)) < 1e-9);
            }
        }
        let s = TripleSpace::matrix(2, 2).unwrap();
        let id = bergman_half_powers(&Element::zeros(&s), -1).unwrap();
        assert!(id.max_abs_diff(&LinOp::identity(&s)) < 1e-15);
        assert!(bergman_half_powers(&Element::diag(2, 2, &[1.0, 0.0]), 1).is_err());
    }

    #[test]
    fn inverse_half_power_norm() {
        let mut rng = seeded_rng(79);
        let s = TripleSpace::matrix(2, 3).unwrap();
        for _ in 0..5 {
            let r = 0.3 + 0.6 * rand::Rng::random::<f64>(&mut rng);
            let z = random_element(&mut rng, &s, r);
            let n = triple_norm(&z);
            let t = bergman_half_powers(&z, -1).unwrap();
            let est = induced_op_norm(&t);
            assert!((est - 1.0 / (1.0 - n * n)).abs() < 1e-6 / (1.0 - n * n));
        }
    }

    #[test]
    fn mobius_basic_points() {
        let mut rng = seeded_rng(83);
        let s = TripleSpace::matrix(2, 3).unwrap();
        let a = random_element(&mut rng, &s, 0.7);
        assert!((&mobius(&a, &Element::zeros(&s)).unwrap() - &a).max_abs() < 1e-14);
        assert!(mobius(&(-&a), &a).unwrap().max_abs() < 1e-13);
        let half = Element::scalar(C64::new(0.5, 0.0));
        assert!(mobius(&(-&half), &half).unwrap().max_abs() < 1e-15);
        assert!(mobius(&a, &Element::diag(2, 3, &[1.0, 0.0])).is_err());
    }

    #[test]
    fn mobius_matches_matrix_formula() {
        let mut rng = seeded_rng(89);
        for (p, q) in [(2, 3), (3, 2), (3, 3), (1, 1)] {
            let s = TripleSpace::matrix(p, q).unwrap();
            for _ in 0..10 {
                let a = random_ball_element(&mut rng, &s, 0.95);
                let z = random_ball_element(&mut rng, &s, 0.95);
                let g = mobius(&a, &z).unwrap();
                let o = matrix_mobius(a.block(0), z.block(0));
                assert!((g.block(0) - &o).iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-9);
                assert!(triple_norm(&g) < 1.0);
            }
        }
    }

    #[test]
    fn euclidean_ball_law() {
        let mut rng = seeded_rng(97);
        for p in 1..=4 {
            let s = TripleSpace::euclidean(p).unwrap();
            for _ in 0..20 {
                let y = random_ball_element(&mut rng, &s, 0.99);
                let z = random_ball_element(&mut rng, &s, 0.99);
                let g = mobius(&(-&y), &z).unwrap();
                let lhs = 1.0 - triple_norm(&g).powi(2);
                let yz: C64 = y.block(0).iter().zip(z.block(0).iter()).map(|(a, b)| a * b.conj()).sum();
                let rhs = (1.0 - triple_norm(&y).powi(2)) * (1.0 - triple_norm(&z).powi(2)) / (C64::new(1.0, 0.0) - yz).norm_sqr();
                assert!((lhs - rhs).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn peirce_arithmetic() {
        let mut rng = seeded_rng(101);
        let s = TripleSpace::matrix(3, 3).unwrap();
        let f = random_frame(&mut rng, &s, 2);
        let e = &f[0] + &f[1];
        let samples: Vec<_> = (0..20)
            .map(|_| (random_element(&mut rng, &s, 1.0), random_element(&mut rng, &s, 1.0), random_element(&mut rng, &s, 1.0)))
            .collect();
        assert!(peirce_arithmetic_residual(&e, &samples).unwrap() < 1e-10);
    }
}
