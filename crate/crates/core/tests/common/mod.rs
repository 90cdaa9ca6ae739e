//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use hitset_core::circuit::{Circuit, CircuitBuilder};
use hitset_core::grid::block_rng;
use hitset_core::poly::{monomials, DensePoly};
use hitset_core::scalar::{rat, GaussianRational, Rational};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    block_rng(seed, 0)
}

/// `p/q` with `1 ≤ |p| ≤ 100`, `1 ≤ q ≤ 100`.
pub fn nonzero_coeff(rng: &mut ChaCha8Rng) -> Rational {
    let p: i64 = rng.gen_range(1..=100) * if rng.gen_bool(0.5) { 1 } else { -1 };
    rat(p, rng.gen_range(1..=100))
}

/// Random real homogeneous polynomial, `n ≤ 3`, `r ≤ 4`, at most 6 terms.
pub fn random_poly(rng: &mut ChaCha8Rng) -> DensePoly {
    let n = rng.gen_range(1..=3usize);
    let r = rng.gen_range(1..=4u32);
    random_poly_with(rng, n, r)
}

pub fn random_poly_with(rng: &mut ChaCha8Rng, n: usize, r: u32) -> DensePoly {
    let mut monos = monomials(n, r);
    monos.shuffle(rng);
    let k = rng.gen_range(1..=monos.len().min(6));
    let terms: Vec<(Vec<u32>, Rational)> = monos[..k].iter().map(|e| (e.0.clone(), nonzero_coeff(rng))).collect();
    DensePoly::from_real_terms(n, r, &terms).unwrap()
}

/// The seeded corpus used by the norm criteria.
pub fn corpus(count: usize, seed: u64) -> Vec<DensePoly> {
    let mut g = rng(seed);
    (0..count).map(|_| random_poly(&mut g)).collect()
}

/// Coordinate `p/100` with `|p| ≤ 100`.
pub fn cube_coord(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-100..=100), 100)
}

pub fn cube_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| cube_coord(rng)).collect()
}

/// A point of the unit ball: a cube point shrunk by `1/n`.
pub fn ball_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let s = rat(1, n as i64);
    cube_point(rng, n).into_iter().map(|x| x * &s).collect()
}

pub fn complex_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<GaussianRational> {
    (0..n).map(|_| GaussianRational::new(cube_coord(rng), cube_coord(rng))).collect()
}

pub fn lift(v: &[Rational]) -> Vec<GaussianRational> {
    v.iter().cloned().map(GaussianRational::real).collect()
}

/// Random homogeneous circuit: inputs, small constants, and binary gates
/// that respect the degree rule for sums.
pub fn random_circuit(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Circuit {
    let mut b = CircuitBuilder::new(n);
    let mut ids: Vec<(usize, u32)> = (0..n).map(|i| (b.input(i), 1)).collect();
    let c = b.constant(GaussianRational::real(rat(rng.gen_range(-5..=5), rng.gen_range(1..=5))));
    ids.push((c, 0));
    for _ in 0..extra {
        let (l, dl) = *ids.choose(rng).unwrap();
        let same: Vec<(usize, u32)> = ids.iter().copied().filter(|&(_, d)| d == dl).collect();
        let node = if rng.gen_bool(0.5) && dl + 2 <= 6 {
            let fits: Vec<(usize, u32)> = ids.iter().copied().filter(|&(_, d)| d + dl <= 6).collect();
            let (r, dr) = *fits.choose(rng).unwrap();
            (b.mul(l, r), dl + dr)
        } else {
            let (r, _) = *same.choose(rng).unwrap();
            (b.add(l, r), dl)
        };
        ids.push(node);
    }
    let out = ids.last().unwrap().0;
    b.finish(vec![out], true).unwrap()
}
