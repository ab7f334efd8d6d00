//! Seeded generators for elements, unitaries, frames and boundary data.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::triple::{triple_norm, CMat, Element, TripleSpace, C64};

pub type JbhRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> JbhRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream number `index` derived from `seed`.
pub fn derived_rng(seed: u64, index: u64) -> JbhRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian_c(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn gaussian_matrix(rng: &mut impl Rng, p: usize, q: usize) -> CMat {
    CMat::from_fn(p, q, |_, _| gaussian_c(rng))
}

/// Gaussian element rescaled to triple norm `norm`.
pub fn random_element(rng: &mut impl Rng, space: &TripleSpace, norm: f64) -> Element {
    let blocks = space.blocks().iter().map(|b| gaussian_matrix(rng, b.p, b.q)).collect();
    let x = Element::from_blocks(blocks).expect("blocks are nonempty");
    let n = triple_norm(&x);
    x.scale(norm / n)
}

/// Gaussian element with triple norm drawn uniformly from `[0, max_norm)`.
pub fn random_ball_element(rng: &mut impl Rng, space: &TripleSpace, max_norm: f64) -> Element {
    let r = rng.random::<f64>() * max_norm;
    random_element(rng, space, r)
}

/// Haar-distributed unitary from the QR factorisation of a Gaussian matrix.
pub fn haar_unitary(rng: &mut impl Rng, n: usize) -> CMat {
    let g = gaussian_matrix(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Per-block unitary pairs `(U_b, W_b)`.
pub fn random_unitaries(rng: &mut impl Rng, space: &TripleSpace) -> Vec<(CMat, CMat)> {
    space
        .blocks()
        .iter()
        .map(|b| (haar_unitary(rng, b.p), haar_unitary(rng, b.q)))
        .collect()
}

/// Minimal tripotent `U E_ii W*` placed in block `block`.
pub fn frame_tripotent(space: &TripleSpace, unitaries: &[(CMat, CMat)], block: usize, i: usize) -> Element {
    let (u, w) = &unitaries[block];
    let m = u.column(i) * w.column(i).adjoint();
    let mut x = Element::zeros(space);
    x.blocks_mut()[block] = m;
    x
}

/// All `rank(V)` slots `(block, index)` of a full frame.
pub fn frame_slots(space: &TripleSpace) -> Vec<(usize, usize)> {
    space
        .blocks()
        .iter()
        .enumerate()
        .flat_map(|(b, blk)| (0..blk.rank()).map(move |i| (b, i)))
        .collect()
}

/// `p` mutually orthogonal minimal tripotents in random position.
pub fn random_frame(rng: &mut impl Rng, space: &TripleSpace, p: usize) -> Vec<Element> {
    assert!(p <= space.rank(), "frame longer than the rank");
    let unitaries = random_unitaries(rng, space);
    let mut slots = frame_slots(space);
    slots.shuffle(rng);
    slots.truncate(p);
    slots
        .iter()
        .map(|&(b, i)| frame_tripotent(space, &unitaries, b, i))
        .collect()
}

/// Full frame of length `rank(V)` in random position.
pub fn random_full_frame(rng: &mut impl Rng, space: &TripleSpace) -> Vec<Element> {
    random_frame(rng, space, space.rank())
}

/// Position of a frame: per-block unitaries and the slots it occupies.
#[derive(Clone, Debug)]
pub struct FramePosition {
    pub space: TripleSpace,
    pub unitaries: Vec<(CMat, CMat)>,
    pub slots: Vec<(usize, usize)>,
}

impl FramePosition {
    pub fn random(rng: &mut impl Rng, space: &TripleSpace, p: usize) -> Self {
        assert!(p <= space.rank(), "frame longer than the rank");
        let unitaries = random_unitaries(rng, space);
        let mut slots = frame_slots(space);
        slots.shuffle(rng);
        slots.truncate(p);
        Self { space: space.clone(), unitaries, slots }
    }

    /// The same position restricted to the listed slot indices.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            space: self.space.clone(),
            unitaries: self.unitaries.clone(),
            slots: indices.iter().map(|&i| self.slots[i]).collect(),
        }
    }

    pub fn frame(&self) -> Vec<Element> {
        self.slots.iter().map(|&(b, i)| frame_tripotent(&self.space, &self.unitaries, b, i)).collect()
    }

    /// Another frame with the same support: within each block the occupied
    /// singular vectors are mixed by a random unitary.
    pub fn rotated_frame(&self, rng: &mut impl Rng) -> Vec<Element> {
        let mut out = Vec::with_capacity(self.slots.len());
        for b in 0..self.space.blocks().len() {
            let idx: Vec<usize> = self.slots.iter().filter(|s| s.0 == b).map(|s| s.1).collect();
            if idx.is_empty() {
                continue;
            }
            let (u, w) = &self.unitaries[b];
            let v = haar_unitary(rng, idx.len());
            let uj = CMat::from_fn(u.nrows(), idx.len(), |r, c| u[(r, idx[c])]) * &v;
            let wj = CMat::from_fn(w.nrows(), idx.len(), |r, c| w[(r, idx[c])]) * &v;
            for c in 0..idx.len() {
                let mut x = Element::zeros(&self.space);
                x.blocks_mut()[b] = uj.column(c) * wj.column(c).adjoint();
                out.push(x);
            }
        }
        out
    }
}

/// Element with planted spectral coefficients on a random frame.
pub fn planted_element(rng: &mut impl Rng, space: &TripleSpace, coeffs: &[f64]) -> (Element, Vec<Element>) {
    let frame = random_frame(rng, space, coeffs.len());
    let x = crate::triple::real_combination(space, coeffs, &frame);
    (x, frame)
}

/// Sorted coefficients in `[lo, hi]` with pairwise gaps at least `min_gap`,
/// resampled until the gap condition holds.
pub fn separated_coefficients(rng: &mut impl Rng, n: usize, lo: f64, hi: f64, min_gap: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        if v.windows(2).all(|w| w[0] - w[1] >= min_gap) {
            return v;
        }
    }
}
