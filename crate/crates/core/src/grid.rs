//! Finite grids on the box `[-1,1)^n`, seeded sampling and rounding.
//!
//! With `q = 1/δ` each real coordinate ranges over `-1 + jδ` for `j ∈ 0..2q`.
//! Indices are mixed-radix numbers with the first coordinate most
//! significant, which makes index order equal to lexicographic order.
//!
//! Sampling uses ChaCha8. Sample `i` belongs to block `i / 4096`; block `b`
//! draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `b`. The worker
//! that processes a block never influences its values, so results do not
//! depend on the thread count.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{int, rational_str, GaussianRational, Rational};

pub type Seed = u64;

/// Samples per independent RNG stream.
pub const SAMPLE_BLOCK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridVariant {
    Real,
    Complex,
    /// `{a + k·b : a, b ∈ G_δ, 0 ≤ k ≤ r}`, with multiplicity.
    Realified(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    #[serde(with = "rational_str")]
    pub delta: Rational,
    pub variant: GridVariant,
}

/// `1/δ` as a machine integer, or an error when `δ` is not a unit fraction.
pub fn unit_fraction_denominator(delta: &Rational) -> Result<u64> {
    if *delta <= Rational::zero() || !delta.numer().is_one() {
        return Err(Error::validation(format!("δ = {delta} is not a unit fraction")));
    }
    delta
        .denom()
        .to_u64()
        .ok_or_else(|| Error::validation("1/δ does not fit in 64 bits"))
}

impl GridSpec {
    pub fn new(n: usize, delta: Rational, variant: GridVariant) -> Result<Self> {
        unit_fraction_denominator(&delta)?;
        Ok(GridSpec { n, delta, variant })
    }

    pub fn real(n: usize, delta: Rational) -> Result<Self> {
        Self::new(n, delta, GridVariant::Real)
    }

    fn q(&self) -> u64 {
        unit_fraction_denominator(&self.delta).expect("validated at construction")
    }

    /// Number of values per real axis, `2/δ`.
    pub fn axis_len(&self) -> u64 {
        2 * self.q()
    }

    fn coord(&self, j: u64) -> Rational {
        int(-1) + Rational::from_integer(j.into()) * &self.delta
    }

    /// Points in the real grid `G_δ` of this dimension.
    fn real_size(&self) -> BigUint {
        BigUint::from(self.axis_len()).pow(self.n as u32)
    }

    pub fn size(&self) -> BigUint {
        let g = self.real_size();
        match self.variant {
            GridVariant::Real => g,
            GridVariant::Complex => &g * &g,
            GridVariant::Realified(r) => &g * &g * BigUint::from(r as u64 + 1),
        }
    }

    pub fn size_u64(&self) -> Option<u64> {
        self.size().to_u64()
    }

    /// Coordinates of the real-grid point with the given index.
    fn real_point(&self, mut idx: BigUint) -> Vec<Rational> {
        let base = BigUint::from(self.axis_len());
        let mut digits = vec![0u64; self.n];
        for slot in digits.iter_mut().rev() {
            let (q, r) = idx.div_rem(&base);
            *slot = r.to_u64().expect("digit below axis length");
            idx = q;
        }
        digits.iter().map(|&j| self.coord(j)).collect()
    }

    /// The point with index `idx` in enumeration order.
    pub fn point(&self, idx: &BigUint) -> Result<Vec<GaussianRational>> {
        if *idx >= self.size() {
            return Err(Error::Range(format!("index {idx} outside grid of size {}", self.size())));
        }
        let g = self.real_size();
        Ok(match self.variant {
            GridVariant::Real => {
                self.real_point(idx.clone()).into_iter().map(GaussianRational::real).collect()
            }
            GridVariant::Complex => {
                let (ai, bi) = idx.div_rem(&g);
                let a = self.real_point(ai);
                let b = self.real_point(bi);
                a.into_iter().zip(b).map(|(x, y)| GaussianRational::new(x, y)).collect()
            }
            GridVariant::Realified(r) => {
                let (ab, k) = idx.div_rem(&BigUint::from(r as u64 + 1));
                let (ai, bi) = ab.div_rem(&g);
                let k = Rational::from_integer(k.into());
                let a = self.real_point(ai);
                let b = self.real_point(bi);
                a.into_iter()
                    .zip(b)
                    .map(|(x, y)| GaussianRational::real(x + &k * y))
                    .collect()
            }
        })
    }

    pub fn point_u64(&self, idx: u64) -> Vec<GaussianRational> {
        self.point(&BigUint::from(idx)).expect("index within grid")
    }

    /// `count` consecutive points starting at index `from`.
    pub fn enumerate(&self, from: &BigUint, count: usize) -> Result<Vec<Vec<GaussianRational>>> {
        let end = from + BigUint::from(count);
        if end > self.size() {
            return Err(Error::Range(format!(
                "range [{from}, {end}) exceeds grid of size {}",
                self.size()
            )));
        }
        let mut out = Vec::with_capacity(count);
        let mut i = from.clone();
        for _ in 0..count {
            out.push(self.point(&i)?);
            i += 1u32;
        }
        Ok(out)
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<GaussianRational> {
        let len = self.axis_len();
        let axis = |rng: &mut ChaCha8Rng| -> Vec<Rational> {
            (0..self.n).map(|_| self.coord(rng.gen_range(0..len))).collect()
        };
        match self.variant {
            GridVariant::Real => axis(rng).into_iter().map(GaussianRational::real).collect(),
            GridVariant::Complex => {
                let a = axis(rng);
                let b = axis(rng);
                a.into_iter().zip(b).map(|(x, y)| GaussianRational::new(x, y)).collect()
            }
            GridVariant::Realified(r) => {
                let a = axis(rng);
                let b = axis(rng);
                let k = int(rng.gen_range(0..=r) as i64);
                a.into_iter()
                    .zip(b)
                    .map(|(x, y)| GaussianRational::real(x + &k * y))
                    .collect()
            }
        }
    }

    /// The `i`-th sample of the stream for `seed`, computed directly.
    pub fn sample_at(&self, seed: Seed, i: usize) -> Vec<GaussianRational> {
        let mut rng = block_rng(seed, i / SAMPLE_BLOCK);
        for _ in 0..i % SAMPLE_BLOCK {
            self.draw(&mut rng);
        }
        self.draw(&mut rng)
    }

    /// `count` i.i.d. uniform points; identical for identical `seed`.
    pub fn sample(&self, seed: Seed, count: usize) -> Vec<Vec<GaussianRational>> {
        let blocks = count.div_ceil(SAMPLE_BLOCK);
        (0..blocks)
            .into_par_iter()
            .flat_map_iter(|b| {
                let mut rng = block_rng(seed, b);
                let len = SAMPLE_BLOCK.min(count - b * SAMPLE_BLOCK);
                (0..len).map(move |_| self.draw(&mut rng)).collect::<Vec<_>>()
            })
            .collect()
    }
}

pub fn block_rng(seed: Seed, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// Floors each coordinate to a multiple of `δ`; coordinates must lie in `[-1, 1)`.
pub fn round_to_grid(v: &[Rational], delta: &Rational) -> Result<Vec<Rational>> {
    unit_fraction_denominator(delta)?;
    let one = Rational::one();
    v.iter()
        .map(|x| {
            if *x < -one.clone() || *x >= one {
                return Err(Error::Range(format!("coordinate {x} outside [-1, 1)")));
            }
            Ok((x / delta).floor() * delta)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn reals(p: &[GaussianRational]) -> Vec<Rational> {
        p.iter().map(|c| c.re.clone()).collect()
    }

    #[test]
    fn sizes() {
        assert_eq!(GridSpec::real(1, rat(1, 2)).unwrap().size(), BigUint::from(4u32));
        assert_eq!(GridSpec::real(2, int(1)).unwrap().size(), BigUint::from(4u32));
        let c = GridSpec::new(1, rat(1, 2), GridVariant::Complex).unwrap();
        assert_eq!(c.size(), BigUint::from(16u32));
        assert!(GridSpec::real(1, rat(2, 3)).is_err());
        assert!(GridSpec::real(1, int(0)).is_err());
    }

    #[test]
    fn enumerate_order() {
        let g = GridSpec::real(1, rat(1, 2)).unwrap();
        let pts = g.enumerate(&BigUint::zero(), 2).unwrap();
        assert_eq!(pts.iter().map(|p| reals(p)).collect::<Vec<_>>(), vec![vec![int(-1)], vec![rat(-1, 2)]]);
        let last = g.enumerate(&BigUint::from(3u32), 1).unwrap();
        assert_eq!(reals(&last[0]), vec![rat(1, 2)]);
        assert!(matches!(g.enumerate(&BigUint::from(3u32), 2), Err(Error::Range(_))));
    }

    #[test]
    fn realified_order() {
        let g = GridSpec::new(1, int(1), GridVariant::Realified(1)).unwrap();
        let pts: Vec<Rational> = g
            .enumerate(&BigUint::zero(), 8)
            .unwrap()
            .into_iter()
            .map(|p| p[0].re.clone())
            .collect();
        // (a,b,k) for a,b ∈ {-1,0}, k ∈ {0,1}: a + k·b.
        let expect = [-1, -2, -1, -1, 0, -1, 0, 0].map(int).to_vec();
        assert_eq!(pts, expect);
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = GridSpec::real(2, rat(1, 4)).unwrap();
        assert!(g.sample(1, 0).is_empty());
        assert_eq!(g.sample(7, 5000), g.sample(7, 5000));
        assert_ne!(g.sample(7, 50), g.sample(8, 50));
        let s = g.sample(3, 5000);
        assert_eq!(s[4100], g.sample_at(3, 4100));
        assert_eq!(s[17], g.sample_at(3, 17));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_to_grid(&[rat(3, 5)], &rat(1, 2)).unwrap(), vec![rat(1, 2)]);
        assert_eq!(round_to_grid(&[rat(-1, 2)], &rat(1, 2)).unwrap(), vec![rat(-1, 2)]);
        assert_eq!(
            round_to_grid(&[int(-1), rat(7, 8)], &rat(1, 4)).unwrap(),
            vec![int(-1), rat(3, 4)]
        );
        assert!(matches!(round_to_grid(&[int(1)], &rat(1, 2)), Err(Error::Range(_))));
    }
}
