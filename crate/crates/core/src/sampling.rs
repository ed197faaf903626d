//! Seeded Monte Carlo and Latin hypercube point sets.
//!
//! Every generator draws from ChaCha8 seeded with `seed_from_u64(seed)`, on
//! the stream given by a substream index. Replication `r` of an experiment
//! uses substream `r`, so parallel and sequential runs agree bit for bit.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discrepancy::PointSet;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    Mc,
    Lhs,
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplerKind::Mc => "mc",
            SamplerKind::Lhs => "lhs",
        })
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mc" => Ok(SamplerKind::Mc),
            "lhs" => Ok(SamplerKind::Lhs),
            _ => Err(Error::Parse(format!("unknown sampler {s:?}, expected mc or lhs"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub d: usize,
    pub n: usize,
    pub seed: u64,
}

impl SamplerSpec {
    pub fn new(kind: SamplerKind, d: usize, n: usize, seed: u64) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(Error::domain(format!(
                "sampler needs d >= 1 and N >= 1, got d = {d}, N = {n}"
            )));
        }
        Ok(Self { kind, d, n, seed })
    }
}

/// Generator for `(seed, substream)`.
pub fn rng_for(seed: u64, substream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(substream);
    rng
}

/// Uniform double in `[0,1)` from the top 53 bits of one `u64`.
pub fn uniform01(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform index in `0..bound` by rejection, free of modulo bias.
fn uniform_below(rng: &mut impl RngCore, bound: u64) -> u64 {
    let zone = u64::MAX - u64::MAX % bound;
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % bound;
        }
    }
}

/// In-place Fisher–Yates shuffle.
pub fn shuffle<T>(rng: &mut impl RngCore, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = uniform_below(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

pub fn mc_sample(spec: &SamplerSpec) -> PointSet {
    mc_sample_stream(spec, 0)
}

pub fn mc_sample_stream(spec: &SamplerSpec, substream: u64) -> PointSet {
    let mut rng = rng_for(spec.seed, substream);
    let coords = (0..spec.n * spec.d).map(|_| uniform01(&mut rng)).collect();
    PointSet::new(spec.d, coords).expect("uniform01 stays in [0,1)")
}

pub fn lhs_sample(spec: &SamplerSpec) -> PointSet {
    lhs_sample_stream(spec, 0)
}

/// Jittered Latin hypercube: coordinate `j` of point `i` is
/// `(π_j(i) + U_ij)/N` with independent permutations `π_j`.
pub fn lhs_sample_stream(spec: &SamplerSpec, substream: u64) -> PointSet {
    let (n, d) = (spec.n, spec.d);
    let mut rng = rng_for(spec.seed, substream);
    let mut coords = vec![0.0; n * d];
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    for j in 0..d {
        perm.clear();
        perm.extend(0..n);
        shuffle(&mut rng, &mut perm);
        for (i, &stratum) in perm.iter().enumerate() {
            let x = (stratum as f64 + uniform01(&mut rng)) / n as f64;
            // rounding can push (N-1 + u)/N up to 1.0
            coords[i * d + j] = if x < 1.0 { x } else { 1.0 - f64::EPSILON / 2.0 };
        }
    }
    let points = PointSet::new(d, coords).expect("strata lie in [0,1)");
    debug_assert!(is_latin(&points));
    points
}

pub fn sample(spec: &SamplerSpec, substream: u64) -> PointSet {
    match spec.kind {
        SamplerKind::Mc => mc_sample_stream(spec, substream),
        SamplerKind::Lhs => lhs_sample_stream(spec, substream),
    }
}

/// Whether every one-dimensional projection hits each stratum
/// `[k/N, (k+1)/N)` exactly once.
pub fn is_latin(points: &PointSet) -> bool {
    let n = points.len();
    (0..points.dim()).all(|j| {
        let mut seen = vec![false; n];
        points.iter().all(|p| {
            let k = ((p[j] * n as f64) as usize).min(n - 1);
            !std::mem::replace(&mut seen[k], true)
        })
    })
}

/// Uniformly random reordering of the points.
pub fn shuffle_exchangeable(points: &PointSet, seed: u64) -> PointSet {
    let mut rng = rng_for(seed, 0);
    let mut order: Vec<usize> = (0..points.len()).collect();
    shuffle(&mut rng, &mut order);
    let coords = order.iter().flat_map(|&i| points.point(i).iter().copied()).collect();
    PointSet::new(points.dim(), coords).expect("same coordinates")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::star_disc_exact;

    fn spec(kind: SamplerKind, d: usize, n: usize, seed: u64) -> SamplerSpec {
        SamplerSpec::new(kind, d, n, seed).unwrap()
    }

    #[test]
    fn determinism() {
        let s = spec(SamplerKind::Mc, 3, 50, 7);
        assert_eq!(mc_sample(&s), mc_sample(&s));
        assert_ne!(mc_sample_stream(&s, 0), mc_sample_stream(&s, 1));
        let l = spec(SamplerKind::Lhs, 3, 50, 7);
        assert_eq!(lhs_sample(&l), lhs_sample(&l));
        assert_ne!(mc_sample(&s), mc_sample(&spec(SamplerKind::Mc, 3, 50, 8)));
    }

    #[test]
    fn mc_means() {
        let p = mc_sample(&spec(SamplerKind::Mc, 2, 100_000, 11));
        for j in 0..2 {
            let mean = p.iter().map(|x| x[j]).sum::<f64>() / p.len() as f64;
            assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
        }
    }

    #[test]
    fn mc_chi_square() {
        let n = 100_000;
        let p = mc_sample(&spec(SamplerKind::Mc, 2, n, 3));
        let mut cells = [0usize; 100];
        for x in p.iter() {
            cells[(x[0] * 10.0) as usize * 10 + (x[1] * 10.0) as usize] += 1;
        }
        let expected = n as f64 / 100.0;
        let chi2: f64 = cells.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let critical = ChiSquared::new(99.0).unwrap().inverse_cdf(1.0 - 1e-6);
        assert!(chi2 < critical, "chi2 = {chi2}, critical = {critical}");
    }

    #[test]
    fn lhs_stratification() {
        for (d, n, seed) in [(1, 4, 0), (3, 64, 5), (5, 1, 2), (2, 1000, 9)] {
            assert!(is_latin(&lhs_sample(&spec(SamplerKind::Lhs, d, n, seed))));
        }
        let mut v: Vec<f64> = lhs_sample(&spec(SamplerKind::Lhs, 1, 4, 1)).coords().to_vec();
        v.sort_by(f64::total_cmp);
        for (k, x) in v.iter().enumerate() {
            assert!(*x >= k as f64 / 4.0 && *x < (k + 1) as f64 / 4.0);
        }
        assert!(!is_latin(&PointSet::new(1, vec![0.1, 0.2]).unwrap()));
    }

    #[test]
    fn shuffle_preserves_multiset() {
        let p = mc_sample(&spec(SamplerKind::Mc, 2, 40, 1));
        let q = shuffle_exchangeable(&p, 99);
        assert_eq!(q, shuffle_exchangeable(&p, 99));
        let key = |s: &PointSet| {
            let mut v: Vec<Vec<u64>> = s.iter().map(|x| x.iter().map(|c| c.to_bits()).collect()).collect();
            v.sort();
            v
        };
        assert_eq!(key(&p), key(&q));
        assert_eq!(star_disc_exact(&p).unwrap().value, star_disc_exact(&q).unwrap().value);
    }

    #[test]
    fn sampler_parsing() {
        assert_eq!("MC".parse::<SamplerKind>().unwrap(), SamplerKind::Mc);
        assert_eq!("lhs".parse::<SamplerKind>().unwrap().to_string(), "lhs");
        assert!("sobol".parse::<SamplerKind>().is_err());
        assert!(SamplerSpec::new(SamplerKind::Mc, 0, 5, 0).is_err());
    }
}
