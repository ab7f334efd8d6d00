//! Operator norms induced by the triple norm.
//!
//! `x ↦ ‖Tx‖` is convex, so its supremum over the unit ball is attained at
//! an extreme point, i.e. at a maximal tripotent. The estimator runs a
//! monotone ascent over maximal tripotents from several random starts.

use rayon::prelude::*;

use crate::linalg::svd;
use crate::random::{derived_rng, random_unitaries};
use crate::triple::{triple_norm, CMat, CVec, Element, LinOp, TripleSpace};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OpNormOptions {
    pub restarts: usize,
    pub max_steps: usize,
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for OpNormOptions {
    fn default() -> Self {
        Self { restarts: 32, max_steps: 200, rel_tol: 1e-10, seed: 0x6a62_6800 }
    }
}

/// Result of [`induced_op_norm_with`]. `value` is attained by `witness`, so
/// it is a certified lower bound; `upper_bound` comes from comparing the
/// triple norm with the Frobenius norm.
#[derive(Clone, Debug)]
pub struct OpNormEstimate {
    pub value: f64,
    pub witness: Element,
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub steps: usize,
}

impl OpNormEstimate {
    /// Gap between the estimate and the a-priori upper bound.
    pub fn slack(&self) -> f64 {
        self.upper_bound - self.value
    }
}

/// Estimate of `sup{‖Tx‖ : ‖x‖ ≤ 1}` with default options.
pub fn induced_op_norm(t: &LinOp) -> f64 {
    induced_op_norm_with(t, &OpNormOptions::default()).value
}

pub fn induced_op_norm_with(t: &LinOp, opts: &OpNormOptions) -> OpNormEstimate {
    let space = t.space().clone();
    let r = space.rank() as f64;
    let two = t.spectral_norm_coords();
    let upper_bound = r.sqrt() * two;
    let lower_bound = two / r.sqrt();

    let mut starts = vec![top_singular_start(t)];
    starts.extend((0..opts.restarts).map(|k| random_maximal_tripotent(&space, opts.seed, k as u64)));

    let runs: Vec<(f64, Element, usize)> = starts
        .into_par_iter()
        .map(|x0| ascend(t, x0, opts.max_steps, opts.rel_tol))
        .collect();

    let mut best = 0;
    for (k, run) in runs.iter().enumerate() {
        if run.0 > runs[best].0 {
            best = k;
        }
    }
    let steps = runs.iter().map(|r| r.2).sum();
    let (value, witness, _) = runs.into_iter().nth(best).expect("at least one start");
    OpNormEstimate { value, witness, upper_bound, lower_bound, steps }
}

fn random_maximal_tripotent(space: &TripleSpace, seed: u64, index: u64) -> Element {
    let mut rng = derived_rng(seed, index);
    let us = random_unitaries(&mut rng, space);
    let blocks = space
        .blocks()
        .iter()
        .zip(us)
        .map(|(b, (u, w))| {
            let r = b.rank();
            u.columns(0, r) * w.columns(0, r).adjoint()
        })
        .collect();
    Element::from_blocks(blocks).expect("blocks are nonempty")
}

fn top_singular_start(t: &LinOp) -> Element {
    let d = svd(t.matrix());
    let v: CVec = d.v.column(0).into_owned();
    polar(&Element::from_vector(t.space(), &v))
}

/// Blockwise polar factor `U V*` of the thin SVD.
fn polar(g: &Element) -> Element {
    let blocks = g
        .blocks()
        .iter()
        .map(|m| {
            let d = svd(m);
            let mut out = CMat::zeros(m.nrows(), m.ncols());
            for (k, &s) in d.s.iter().enumerate() {
                if s > 0.0 {
                    out += d.u.column(k) * d.v.column(k).adjoint();
                }
            }
            out
        })
        .collect();
    Element::from_blocks(blocks).expect("blocks are nonempty")
}

/// Top singular pair `u v*` of the block where `y` attains its norm.
fn norming_tripotent(y: &Element) -> Element {
    let mut best: Option<(usize, f64, CMat)> = None;
    for (b, m) in y.blocks().iter().enumerate() {
        let d = svd(m);
        let s = d.s[0];
        if best.as_ref().is_none_or(|(_, top, _)| s > *top) {
            best = Some((b, s, d.u.column(0) * d.v.column(0).adjoint()));
        }
    }
    let (b, _, m) = best.expect("at least one block");
    let mut z = Element::zeros(&y.space());
    z.blocks_mut()[b] = m;
    z
}

fn ascend(t: &LinOp, mut x: Element, max_steps: usize, rel_tol: f64) -> (f64, Element, usize) {
    let space = t.space();
    let th = t.matrix().adjoint();
    let mut val = triple_norm(&t.apply(&x));
    let mut steps = 0;
    while steps < max_steps {
        steps += 1;
        let y = t.apply(&x);
        if triple_norm(&y) == 0.0 {
            break;
        }
        let z = norming_tripotent(&y);
        let g = Element::from_vector(space, &(&th * z.to_vector()));
        let next = polar(&g);
        let next_val = triple_norm(&t.apply(&next));
        if next_val <= val * (1.0 + rel_tol) {
            if next_val > val {
                val = next_val;
                x = next;
            }
            break;
        }
        val = next_val;
        x = next;
    }
    (val, x, steps)
}
