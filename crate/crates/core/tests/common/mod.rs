//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use discbound::discrepancy::PointSet;

/// Star-discrepancy by direct counting at every critical corner, with no
/// prefix sums and no deduplication.
pub fn brute_force_dstar(points: &PointSet) -> f64 {
    let d = points.dim();
    let axes: Vec<Vec<f64>> = (0..d)
        .map(|j| points.iter().map(|p| p[j]).chain([1.0]).collect())
        .collect();
    let total: usize = axes.iter().map(Vec::len).product();
    let n = points.len() as f64;
    let mut best: f64 = 0.0;
    let mut y = vec![0.0; d];
    for mut idx in 0..total {
        for j in (0..d).rev() {
            y[j] = axes[j][idx % axes[j].len()];
            idx /= axes[j].len();
        }
        let vol: f64 = y.iter().product();
        let open = points.iter().filter(|p| p.iter().zip(&y).all(|(a, b)| a < b)).count() as f64;
        let closed = points.iter().filter(|p| p.iter().zip(&y).all(|(a, b)| a <= b)).count() as f64;
        best = best.max(closed / n - vol).max(vol - open / n);
    }
    best
}

/// Classical one-dimensional formula
/// `max_k max(k/N - x_(k), x_(k) - (k-1)/N)` over sorted points.
pub fn sorted_formula_1d(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let k = (i + 1) as f64;
            (k / n - x).max(x - (k - 1.0) / n)
        })
        .fold(0.0, f64::max)
}

/// Seeded splitmix64 stream mapped to `[0,1)`, independent of the library
/// generators.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn points(&mut self, d: usize, n: usize) -> PointSet {
        PointSet::new(d, (0..d * n).map(|_| self.next_f64()).collect()).unwrap()
    }
}
