//! Star-discrepancy of point sets in `[0,1)^d`: an exact critical-grid
//! oracle, the two-sided bound from a δ-cover, and the weighted variant.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::cover::{build_cover_nd, cover_to_delta_cover, DeltaCover};
use crate::{Error, Result};

/// Default cap on critical-grid corners for [`star_disc_exact`].
pub const DEFAULT_GRID_CAP: u64 = 20_000_000;

/// `N` points in `[0,1)^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    d: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(d: usize, coords: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("point dimension must be at least 1"));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(d) {
            return Err(Error::domain(format!(
                "{} coordinates do not form a nonempty set of {d}-dimensional points",
                coords.len()
            )));
        }
        if let Some(x) = coords.iter().find(|x| !(0.0..1.0).contains(*x)) {
            return Err(Error::domain(format!("coordinate {x} outside [0, 1)")));
        }
        Ok(Self { d, coords })
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let d = points.first().map_or(0, Vec::len);
        if let Some(p) = points.iter().find(|p| p.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.len(),
            });
        }
        Self::new(d, points.concat())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// The points restricted to the coordinates whose bits are set in `mask`.
    pub fn project(&self, mask: u64) -> Result<Self> {
        let axes: Vec<usize> = (0..self.d).filter(|&j| mask >> j & 1 == 1).collect();
        if axes.is_empty() || mask >> self.d != 0 {
            return Err(Error::domain(format!(
                "mask {mask:#b} is not a nonempty subset of {} axes",
                self.d
            )));
        }
        let coords = self.iter().flat_map(|p| axes.iter().map(move |&j| p[j])).collect();
        Ok(Self { d: axes.len(), coords })
    }

    /// Points `(2i+1)/(2N)`, `i = 0..N`, in dimension one.
    pub fn midpoints(n: usize) -> Result<Self> {
        Self::new(1, (0..n).map(|i| (2 * i + 1) as f64 / (2 * n) as f64).collect())
    }

    /// Reads CSV rows of `d` decimals; lines starting with `#` are skipped.
    pub fn read_csv(reader: impl BufRead) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut d = None;
        let mut coords = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            match d {
                None => d = Some(rec.len()),
                Some(d) if d != rec.len() => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: rec.len(),
                    })
                }
                _ => {}
            }
            for field in rec.iter() {
                coords.push(
                    field
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("row {}: {field:?}: {e}", line + 1)))?,
                );
            }
        }
        Self::new(d.unwrap_or(0), coords)
    }

    pub fn read_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file))
    }

    /// Writes `# d=<d> n=<N>` followed by one row per point.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "# d={} n={}", self.d, self.len())?;
        let mut wtr = csv::WriterBuilder::new().from_writer(out);
        for p in self.iter() {
            wtr.write_record(p.iter().map(f64::to_string))?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscrepancyKind {
    Exact,
    CoverUpper,
    CoverLower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyResult {
    pub value: f64,
    pub kind: DiscrepancyKind,
    /// Box corner at which the value is attained, or approached.
    pub witness: Option<Vec<f64>>,
}

/// `|#{p : p < x}/N - vol([0,x))|` with strict componentwise inequality.
pub fn local_disc(points: &PointSet, x: &[f64]) -> Result<f64> {
    if x.len() != points.dim() {
        return Err(Error::DimensionMismatch {
            expected: points.dim(),
            found: x.len(),
        });
    }
    let count = points.iter().filter(|p| p.iter().zip(x).all(|(a, b)| a < b)).count();
    let vol: f64 = x.iter().product();
    Ok((count as f64 / points.len() as f64 - vol).abs())
}

/// Exact star-discrepancy over half-open anchored boxes.
///
/// Per axis the critical values are the distinct point coordinates plus 1.
/// At every corner of that grid the closed count gives the excess
/// `count/N - vol` and the open count (the closed count one rank lower in
/// every axis) gives the deficiency `vol - count/N`. Counts come from a
/// `d`-dimensional prefix sum. Ties go to the lexicographically first corner.
pub fn star_disc_exact(points: &PointSet) -> Result<DiscrepancyResult> {
    star_disc_exact_capped(points, DEFAULT_GRID_CAP)
}

pub fn star_disc_exact_capped(points: &PointSet, cap: u64) -> Result<DiscrepancyResult> {
    let d = points.dim();
    let n = points.len();

    let mut axes: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let mut v: Vec<f64> = points.iter().map(|p| p[j]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v.push(1.0);
            v
        })
        .collect();
    axes.shrink_to_fit();

    let mut size: u64 = 1;
    for a in &axes {
        size = size.saturating_mul(a.len() as u64);
    }
    if size > cap {
        return Err(Error::Infeasible {
            required: size as f64,
            cap: cap as f64,
        });
    }
    let size = size as usize;

    // row-major strides, axis 0 most significant
    let mut strides = vec![1usize; d];
    for j in (0..d.saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * axes[j + 1].len();
    }

    let mut counts = vec![0u32; size];
    for p in points.iter() {
        let idx: usize = (0..d)
            .map(|j| {
                let r = axes[j]
                    .binary_search_by(|v| v.total_cmp(&p[j]))
                    .expect("coordinate on its own axis");
                r * strides[j]
            })
            .sum();
        counts[idx] += 1;
    }
    for j in 0..d {
        let len = axes[j].len();
        let stride = strides[j];
        for idx in 0..size {
            if !(idx / stride).is_multiple_of(len) {
                counts[idx] += counts[idx - stride];
            }
        }
    }

    let nf = n as f64;
    let mut best = -1.0f64;
    let mut best_idx = 0usize;
    let mut rank = vec![0usize; d];
    for idx in 0..size {
        let vol: f64 = (0..d).map(|j| axes[j][rank[j]]).product();
        let closed = counts[idx] as f64;
        let open = if rank.iter().all(|&r| r > 0) {
            let below: usize = strides.iter().sum();
            counts[idx - below] as f64
        } else {
            0.0
        };
        let value = (closed / nf - vol).max(vol - open / nf);
        if value > best {
            best = value;
            best_idx = idx;
        }
        for j in (0..d).rev() {
            rank[j] += 1;
            if rank[j] < axes[j].len() {
                break;
            }
            rank[j] = 0;
        }
    }
    let witness = (0..d)
        .map(|j| axes[j][(best_idx / strides[j]) % axes[j].len()])
        .collect();
    Ok(DiscrepancyResult {
        value: best.clamp(0.0, 1.0),
        kind: DiscrepancyKind::Exact,
        witness: Some(witness),
    })
}

/// Two-sided bound from a δ-cover `Γ`:
/// `max_{x in Γ} D_N(P, [0,x)) <= D* <= max_{x in Γ} D_N(P, [0,x)) + δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverEstimate {
    pub upper: DiscrepancyResult,
    pub lower: DiscrepancyResult,
}

pub fn star_disc_upper_cover(points: &PointSet, cover: &DeltaCover) -> Result<CoverEstimate> {
    if cover.d != points.dim() {
        return Err(Error::DimensionMismatch {
            expected: points.dim(),
            found: cover.d,
        });
    }
    let locals: Vec<f64> = cover
        .points
        .par_iter()
        .map(|x| local_disc(points, x))
        .collect::<Result<_>>()?;
    // the origin of Γ ∪ {0} contributes zero
    let mut best = 0.0;
    let mut witness = vec![0.0; cover.d];
    for (x, &v) in cover.points.iter().zip(&locals) {
        if v > best {
            best = v;
            witness.clone_from(x);
        }
    }
    Ok(CoverEstimate {
        upper: DiscrepancyResult {
            value: (best + cover.delta).min(1.0),
            kind: DiscrepancyKind::CoverUpper,
            witness: Some(witness.clone()),
        },
        lower: DiscrepancyResult {
            value: best,
            kind: DiscrepancyKind::CoverLower,
            witness: Some(witness),
        },
    })
}

/// Nonnegative weights `γ_u` keyed by coordinate bitmask (bit `j` is
/// coordinate `j+1`).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightScheme {
    d: usize,
    weights: BTreeMap<u64, f64>,
}

impl WeightScheme {
    pub fn new(d: usize, weights: BTreeMap<u64, f64>) -> Result<Self> {
        if d == 0 || d > 63 {
            return Err(Error::domain(format!("weight dimension {d} outside 1..=63")));
        }
        for (&mask, &w) in &weights {
            if mask == 0 || mask >> d != 0 {
                return Err(Error::domain(format!(
                    "mask {mask} is not a nonempty subset of {d} axes"
                )));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::domain(format!(
                    "weight {w} for mask {mask} is not a finite nonnegative number"
                )));
            }
        }
        if !weights.values().any(|&w| w > 0.0) {
            return Err(Error::domain("at least one weight must be positive"));
        }
        Ok(Self { d, weights })
    }

    /// `γ_u = prod_{j in u} γ_j` for every nonempty `u`.
    pub fn product(per_coord: &[f64]) -> Result<Self> {
        let d = per_coord.len();
        if d == 0 || d > 20 {
            return Err(Error::domain(format!(
                "product weights need 1..=20 coordinates, got {d}"
            )));
        }
        let weights = (1u64..1 << d)
            .map(|mask| {
                let w = (0..d).filter(|j| mask >> j & 1 == 1).map(|j| per_coord[j]).product();
                (mask, w)
            })
            .collect();
        Self::new(d, weights)
    }

    /// Reads rows `bitmask,weight`.
    pub fn read_csv(d: usize, reader: impl BufRead) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut weights = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::Parse(format!(
                    "expected `bitmask,weight`, got {} fields",
                    rec.len()
                )));
            }
            let mask = rec[0]
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("{:?}: {e}", &rec[0])))?;
            let w = rec[1]
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{:?}: {e}", &rec[1])))?;
            weights.insert(mask, w);
        }
        Self::new(d, weights)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, mask: u64) -> f64 {
        self.weights.get(&mask).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.weights.iter().map(|(&m, &w)| (m, w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightedMode {
    Exact,
    /// Cover-based upper bound with per-projection covers at this tolerance.
    Cover(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedResult {
    pub value: f64,
    /// Subset attaining the maximum; smallest mask on ties.
    pub mask: u64,
}

/// `max_u γ_u D*(P_u)`, with `P_u` the projection onto the coordinates in `u`.
pub fn weighted_star_disc(points: &PointSet, weights: &WeightScheme, mode: WeightedMode) -> Result<WeightedResult> {
    if weights.dim() != points.dim() {
        return Err(Error::DimensionMismatch {
            expected: points.dim(),
            found: weights.dim(),
        });
    }
    let active: Vec<(u64, f64)> = weights.iter().filter(|&(_, w)| w > 0.0).collect();

    let mut covers: BTreeMap<usize, DeltaCover> = BTreeMap::new();
    if let WeightedMode::Cover(delta) = mode {
        for &(mask, _) in &active {
            let k = mask.count_ones() as usize;
            if let std::collections::btree_map::Entry::Vacant(e) = covers.entry(k) {
                e.insert(cover_to_delta_cover(&build_cover_nd(k, delta)?));
            }
        }
    }

    let values: Vec<f64> = active
        .par_iter()
        .map(|&(mask, w)| {
            let proj = points.project(mask)?;
            let d = match mode {
                WeightedMode::Exact => star_disc_exact(&proj)?.value,
                WeightedMode::Cover(_) => {
                    star_disc_upper_cover(&proj, &covers[&(mask.count_ones() as usize)])?
                        .upper
                        .value
                }
            };
            Ok(w * d)
        })
        .collect::<Result<_>>()?;

    let mut best = WeightedResult { value: 0.0, mask: 0 };
    for (&(mask, _), &v) in active.iter().zip(&values) {
        if v > best.value || best.mask == 0 {
            best = WeightedResult { value: v, mask };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(d: usize, c: &[f64]) -> PointSet {
        PointSet::new(d, c.to_vec()).unwrap()
    }

    /// Evaluates both counts directly at every critical corner.
    fn brute_force(points: &PointSet) -> f64 {
        let d = points.dim();
        let axes: Vec<Vec<f64>> = (0..d)
            .map(|j| {
                let mut v: Vec<f64> = points.iter().map(|p| p[j]).collect();
                v.push(1.0);
                v
            })
            .collect();
        let total: usize = axes.iter().map(Vec::len).product();
        let n = points.len() as f64;
        let mut best: f64 = 0.0;
        for mut idx in 0..total {
            let mut y = vec![0.0; d];
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

    #[test]
    fn local_examples() {
        let p = ps(2, &[0.5, 0.5]);
        assert_eq!(local_disc(&p, &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(local_disc(&p, &[0.5, 0.5]).unwrap(), 0.25);
        assert_eq!(local_disc(&ps(1, &[0.25, 0.75]), &[0.5]).unwrap(), 0.0);
        assert!(local_disc(&p, &[0.5]).is_err());
    }

    #[test]
    fn exact_examples() {
        let r = star_disc_exact(&ps(2, &[0.5, 0.5])).unwrap();
        assert_eq!(r.value, 0.75);
        assert_eq!(r.witness, Some(vec![0.5, 0.5]));
        for n in [1, 2, 4, 7, 64] {
            let r = star_disc_exact(&PointSet::midpoints(n).unwrap()).unwrap();
            assert!((r.value - 0.5 / n as f64).abs() < 1e-15, "n={n}");
        }
        let origin = ps(1, &[0.0]);
        assert_eq!(star_disc_exact(&origin).unwrap().value, brute_force(&origin));
        assert_eq!(star_disc_exact(&origin).unwrap().value, 1.0);
    }

    #[test]
    fn duplicate_coordinates() {
        let p = ps(2, &[0.25, 0.5, 0.25, 0.75, 0.5, 0.5, 0.25, 0.5]);
        assert!((star_disc_exact(&p).unwrap().value - brute_force(&p)).abs() < 1e-15);
    }

    #[test]
    fn cap_is_enforced() {
        let p = ps(2, &[0.1, 0.2, 0.3, 0.4]);
        assert!(matches!(star_disc_exact_capped(&p, 8), Err(Error::Infeasible { .. })));
        assert!(star_disc_exact_capped(&p, 9).is_ok());
    }

    #[test]
    fn point_set_validation() {
        assert!(PointSet::new(2, vec![0.5]).is_err());
        assert!(PointSet::new(1, vec![1.0]).is_err());
        assert!(PointSet::new(1, vec![]).is_err());
        assert!(PointSet::new(0, vec![0.5]).is_err());
        assert!(PointSet::from_points(&[vec![0.1, 0.2], vec![0.3]]).is_err());
    }

    #[test]
    fn projection() {
        let p = ps(3, &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        assert_eq!(p.project(0b101).unwrap().coords(), &[0.1, 0.3, 0.4, 0.6]);
        assert!(p.project(0).is_err());
        assert!(p.project(0b1000).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let p = ps(2, &[0.1, 1.0 / 3.0, 0.0, 0.999_999_999_999]);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"# d=2 n=2\n"));
        assert_eq!(PointSet::read_csv(&buf[..]).unwrap(), p);
        assert!(PointSet::read_csv(&b"0.1,0.2\n0.3\n"[..]).is_err());
        assert!(matches!(PointSet::read_csv(&b"0.1,x\n"[..]), Err(Error::Parse(_))));
    }

    #[test]
    fn delta_one_cover_caps_at_one() {
        let p = ps(2, &[0.3, 0.6, 0.9, 0.2]);
        let cover = DeltaCover {
            d: 2,
            delta: 1.0,
            points: vec![vec![1.0, 1.0]],
        };
        let est = star_disc_upper_cover(&p, &cover).unwrap();
        assert_eq!(est.upper.value, 1.0);
        assert_eq!(est.lower.value, 0.0);
    }

    #[test]
    fn weighted_examples() {
        let p = ps(2, &[0.5, 0.5]);
        let w = WeightScheme::product(&[1.0, 1.0]).unwrap();
        let r = weighted_star_disc(&p, &w, WeightedMode::Exact).unwrap();
        assert_eq!(r.value, 0.75);
        assert_eq!(r.mask, 0b11);

        let only_first = WeightScheme::new(2, BTreeMap::from([(0b01, 0.4), (0b11, 0.0)])).unwrap();
        let r = weighted_star_disc(&p, &only_first, WeightedMode::Exact).unwrap();
        assert_eq!(r.value, 0.4 * 0.5);

        let q = ps(1, &[0.2, 0.9, 0.35]);
        let single = WeightScheme::product(&[1.0]).unwrap();
        assert_eq!(
            weighted_star_disc(&q, &single, WeightedMode::Exact).unwrap().value,
            star_disc_exact(&q).unwrap().value
        );
    }

    #[test]
    fn weight_validation() {
        assert!(WeightScheme::new(2, BTreeMap::from([(0b100, 1.0)])).is_err());
        assert!(WeightScheme::new(2, BTreeMap::from([(0b01, -1.0)])).is_err());
        assert!(WeightScheme::new(2, BTreeMap::from([(0b01, 0.0)])).is_err());
        let w = WeightScheme::read_csv(2, &b"1,0.5\n3,1\n"[..]).unwrap();
        assert_eq!(w.get(3), 1.0);
        assert_eq!(w.get(2), 0.0);
        assert!(WeightScheme::read_csv(2, &b"1\n"[..]).is_err());
    }

    #[test]
    fn weighted_cover_mode_bounds_exact() {
        let p = ps(2, &[0.15, 0.8, 0.55, 0.3, 0.9, 0.45, 0.05, 0.1]);
        let w = WeightScheme::product(&[0.9, 0.7]).unwrap();
        let exact = weighted_star_disc(&p, &w, WeightedMode::Exact).unwrap().value;
        let upper = weighted_star_disc(&p, &w, WeightedMode::Cover(0.1)).unwrap().value;
        assert!(exact <= upper + 1e-15);
        assert!(upper <= exact + 0.1 + 1e-12);
    }
}
