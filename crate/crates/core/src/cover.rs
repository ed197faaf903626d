//! Explicit δ-bracketing covers and δ-covers of `[0,1]^d`.
//!
//! A bracket `[l, u]` has weight `vol([0,u]) - vol([0,l])`. The planar
//! construction peels the square into layers between the diagonal points
//! `a_q = sqrt(1 - qδ)`, covers the top strip of each layer by brackets of
//! weight exactly δ and reflects them across the diagonal. The general
//! construction uses the same layers `a_q = (1 - qδ)^{1/d}` and covers each
//! shell by `d` overlapping slabs, each filled by a recursion over the
//! remaining coordinates.

use std::cmp::Ordering;
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::bounds::layer_count;
use crate::sampling::{rng_for, uniform01};
use crate::{Error, Result};

/// Default cap on the number of brackets a construction may emit.
pub const DEFAULT_BRACKET_CAP: usize = 4_000_000;

/// Absolute tolerance for bracket weights.
pub const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Bracket {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bracket {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !(0.0 <= *l && l <= u && *u <= 1.0))
        {
            return Err(Error::domain(format!("malformed bracket {lower:?} .. {upper:?}")));
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn weight(&self) -> f64 {
        self.upper.iter().product::<f64>() - self.lower.iter().product::<f64>()
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        y.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .all(|((y, l), u)| l <= y && y <= u)
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        let key = |b: &Self| -> Vec<u64> { b.lower.iter().chain(&b.upper).map(|x| x.to_bits()).collect() };
        key(self).cmp(&key(other))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BracketingCover {
    pub d: usize,
    pub delta: f64,
    pub brackets: Vec<Bracket>,
}

impl BracketingCover {
    pub fn len(&self) -> usize {
        self.brackets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.brackets.is_empty()
    }
}

/// Points `Γ` such that every `y` has `x <= y <= z` in `Γ ∪ {0}` with
/// `vol([0,z]) - vol([0,x]) <= δ`. The origin is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaCover {
    pub d: usize,
    pub delta: f64,
    pub points: Vec<Vec<f64>>,
}

fn check_delta(delta: f64, allow_one: bool) -> Result<()> {
    let ok = delta > 0.0 && (delta < 1.0 || (allow_one && delta == 1.0));
    if ok {
        Ok(())
    } else {
        Err(Error::domain(format!("delta = {delta} outside the admissible range")))
    }
}

/// Brackets `[(k-1)/n, k/n]`, `n = ceil(1/δ)`, and the points `k/n`.
pub fn build_cover_1d(delta: f64) -> Result<(BracketingCover, DeltaCover)> {
    check_delta(delta, true)?;
    let n = layer_count(delta);
    let brackets = (1..=n)
        .map(|k| Bracket {
            lower: vec![(k - 1) as f64 / n as f64],
            upper: vec![k as f64 / n as f64],
        })
        .collect();
    let cover = BracketingCover { d: 1, delta, brackets };
    let points = cover_to_delta_cover(&cover);
    Ok((cover, points))
}

/// `2 f(δ_q) - 1` with `f(δ_q) = ceil(-2 ln2 / ln(1 - δ_q)) + 1`, the
/// certified per-layer bracket count of the planar construction.
pub fn layer_count_2d(delta_q: f64) -> Result<u64> {
    if !(delta_q > 0.0 && delta_q < 1.0) {
        return Err(Error::domain(format!("delta_q = {delta_q} outside (0, 1)")));
    }
    let ratio = -2.0 * std::f64::consts::LN_2 / (-delta_q).ln_1p();
    // ln(1/4) and -2 ln2 may differ in the last bit
    let rounded = ratio.round();
    let ceil = if (ratio - rounded).abs() <= 1e-12 * rounded.max(1.0) {
        rounded
    } else {
        ratio.ceil()
    };
    Ok(2 * (ceil as u64 + 1) - 1)
}

/// One diagonal layer of the planar construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer2D {
    pub q: u64,
    pub a_prev: f64,
    pub a_q: f64,
    pub delta_q: f64,
}

/// Layers `q = 1..=n`, `n = ceil(1/δ)`, with `a_q = sqrt(1 - qδ)` and
/// `a_n = 0`.
pub fn layers_2d(delta: f64) -> Result<Vec<Layer2D>> {
    check_delta(delta, false)?;
    let n = layer_count(delta);
    let a = |q: u64| if q >= n { 0.0 } else { (1.0 - q as f64 * delta).sqrt() };
    Ok((1..=n)
        .map(|q| Layer2D {
            q,
            a_prev: a(q - 1),
            a_q: a(q),
            delta_q: delta / (1.0 - (q - 1) as f64 * delta),
        })
        .collect())
}

/// Brackets of one layer in absolute coordinates.
///
/// With `b_0 = a_{q-1}`, `b_1 = a_q` and `b_{i+1} = (b_i a_{q-1} - δ)/a_q`,
/// bracket `i` is `[(b_i, a_q), (b_{i-1}, a_{q-1})]` of weight exactly δ.
/// The recursion stops at the first `b_i <= δ/a_{q-1}`; the closing bracket
/// `[0, (b_i, a_{q-1})]` finishes the strip. Reflections follow, skipping
/// the symmetric first bracket. The last layer is `[0, a_{n-1}(1,1)]`.
pub fn layer_brackets_2d(layer: &Layer2D, delta: f64) -> Vec<Bracket> {
    let (hi, lo) = (layer.a_prev, layer.a_q);
    if lo == 0.0 {
        return vec![Bracket {
            lower: vec![0.0, 0.0],
            upper: vec![hi, hi],
        }];
    }
    let mut strip = Vec::new();
    let (mut prev, mut cur) = (hi, lo);
    loop {
        strip.push(Bracket {
            lower: vec![cur, lo],
            upper: vec![prev, hi],
        });
        if cur <= delta / hi {
            break;
        }
        let next = ((cur * hi - delta) / lo).max(0.0);
        prev = cur;
        cur = next;
    }
    strip.push(Bracket {
        lower: vec![0.0, 0.0],
        upper: vec![cur, hi],
    });
    let mirrored: Vec<Bracket> = strip[1..]
        .iter()
        .map(|b| Bracket {
            lower: vec![b.lower[1], b.lower[0]],
            upper: vec![b.upper[1], b.upper[0]],
        })
        .collect();
    strip.extend(mirrored);
    strip
}

/// The planar construction and its corner δ-cover.
pub fn build_cover_2d(delta: f64) -> Result<(BracketingCover, DeltaCover)> {
    let brackets: Vec<Bracket> = layers_2d(delta)?
        .iter()
        .flat_map(|l| layer_brackets_2d(l, delta))
        .collect();
    let cover = BracketingCover { d: 2, delta, brackets };
    let points = cover_to_delta_cover(&cover);
    Ok((cover, points))
}

/// Validated cover for any dimension with the default size cap.
pub fn build_cover_nd(d: usize, delta: f64) -> Result<BracketingCover> {
    build_cover_nd_capped(d, delta, DEFAULT_BRACKET_CAP)
}

pub fn build_cover_nd_capped(d: usize, delta: f64, cap: usize) -> Result<BracketingCover> {
    match d {
        0 => Err(Error::domain("dimension must be at least 1")),
        1 => Ok(build_cover_1d(delta)?.0),
        2 => Ok(build_cover_2d(delta)?.0),
        _ => {
            check_delta(delta, false)?;
            general_cover(d, delta, cap)
        }
    }
}

/// Shells between `a_q = (1 - qδ)^{1/d}`, each covered by `d` slabs.
fn general_cover(d: usize, delta: f64, cap: usize) -> Result<BracketingCover> {
    let n = layer_count(delta);
    let a = |q: u64| {
        if q >= n {
            0.0
        } else {
            (1.0 - q as f64 * delta).powf(1.0 / d as f64)
        }
    };
    let mut brackets = Vec::new();
    let mut builder = Discounted { cap, emitted: 0 };
    for q in 1..n {
        let (hi, lo) = (a(q - 1), a(q));
        let s = lo / hi;
        let child = builder.cover(d - 1, delta / hi.powi(d as i32), s)?;
        for slab in 0..d {
            for b in &child {
                let mut lower = Vec::with_capacity(d);
                let mut upper = Vec::with_capacity(d);
                let mut it = b.lower.iter().zip(&b.upper);
                for axis in 0..d {
                    if axis == slab {
                        lower.push(lo);
                        upper.push(hi);
                    } else {
                        let (l, u) = it.next().expect("child has d-1 axes");
                        lower.push(hi * l);
                        upper.push(hi * u);
                    }
                }
                brackets.push(Bracket { lower, upper });
            }
            if brackets.len() > cap {
                return Err(Error::Infeasible {
                    required: brackets.len() as f64,
                    cap: cap as f64,
                });
            }
        }
    }
    let last = a(n - 1);
    brackets.push(Bracket {
        lower: vec![0.0; d],
        upper: vec![last; d],
    });
    brackets.sort_by(Bracket::total_cmp);
    brackets.dedup();
    Ok(BracketingCover { d, delta, brackets })
}

/// Covers of `[0,1]^m` by brackets with `vol(u) - s vol(l) <= δ`.
struct Discounted {
    cap: usize,
    emitted: usize,
}

impl Discounted {
    /// Slices the last axis at `t_0 = 1 > t_1 > ...` with
    /// `t_{i-1} - s t_i = g`, `g` between `1 - s` and δ. Slice `i` needs a
    /// child cover with tolerance `δ/t_{i-1}` and discount `1 - g/t_{i-1}`.
    /// The slice `[0, t_i]` closes once `t_i <= δ`.
    fn cover(&mut self, m: usize, delta: f64, s: f64) -> Result<Vec<Bracket>> {
        if delta >= 1.0 || m == 0 {
            self.emit(1)?;
            return Ok(vec![Bracket {
                lower: vec![0.0; m],
                upper: vec![1.0; m],
            }]);
        }
        let c = 1.0 - s;
        let g = c + (delta - c) / m as f64;
        let mut out = Vec::new();
        let mut prev = 1.0;
        loop {
            let cur = (prev - g) / s;
            let child = self.cover(m - 1, delta / prev, 1.0 - g / prev)?;
            for b in child {
                let mut lower = b.lower;
                let mut upper = b.upper;
                lower.push(cur);
                upper.push(prev);
                out.push(Bracket { lower, upper });
            }
            if cur <= delta {
                let mut upper = vec![1.0; m - 1];
                upper.push(cur);
                out.push(Bracket {
                    lower: vec![0.0; m],
                    upper,
                });
                self.emit(1)?;
                return Ok(out);
            }
            prev = cur;
        }
    }

    fn emit(&mut self, k: usize) -> Result<()> {
        self.emitted += k;
        if self.emitted > self.cap {
            return Err(Error::Infeasible {
                required: self.emitted as f64,
                cap: self.cap as f64,
            });
        }
        Ok(())
    }
}

/// All lower and upper corners except the origin, deduplicated and sorted.
pub fn cover_to_delta_cover(cover: &BracketingCover) -> DeltaCover {
    let mut points: Vec<Vec<f64>> = cover
        .brackets
        .iter()
        .flat_map(|b| [b.lower.clone(), b.upper.clone()])
        .filter(|p| p.iter().any(|&x| x != 0.0))
        .collect();
    points.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    });
    points.dedup();
    DeltaCover {
        d: cover.d,
        delta: cover.delta,
        points,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverReport {
    pub bracket_count: usize,
    pub max_weight: f64,
    /// Indices and weights of brackets heavier than `δ + 1e-12`.
    pub weight_failures: Vec<(usize, f64)>,
    pub grid_points: usize,
    pub random_points: usize,
    /// Up to [`MAX_WITNESSES`] uncovered points.
    pub uncovered: Vec<Vec<f64>>,
    pub uncovered_count: usize,
}

impl CoverReport {
    pub fn passed(&self) -> bool {
        self.weight_failures.is_empty() && self.uncovered_count == 0
    }
}

pub const MAX_WITNESSES: usize = 10;

/// Default cap on deterministic grid points.
pub const DEFAULT_GRID_POINTS: usize = 200_000;

/// Uniform buckets over the cube listing the brackets meeting each cell.
/// Cell lookup is monotone in each coordinate, so a point inside a bracket
/// always falls in a cell the bracket was registered in.
struct BucketIndex {
    per_axis: usize,
    cells: Vec<Vec<u32>>,
}

impl BucketIndex {
    fn new(cover: &BracketingCover) -> Self {
        let d = cover.d;
        let target = (4 * cover.len()).clamp(1, 1 << 22) as f64;
        let per_axis = (target.powf(1.0 / d as f64).floor() as usize).clamp(1, 4096);
        let mut index = Self {
            per_axis,
            cells: vec![Vec::new(); per_axis.pow(d as u32)],
        };
        for (i, b) in cover.brackets.iter().enumerate() {
            let lo: Vec<usize> = b.lower.iter().map(|&x| index.cell(x)).collect();
            let hi: Vec<usize> = b.upper.iter().map(|&x| index.cell(x)).collect();
            let mut idx = lo.clone();
            loop {
                let flat = idx.iter().fold(0, |acc, &k| acc * per_axis + k);
                index.cells[flat].push(i as u32);
                if !odometer_step(&mut idx, &lo, &hi) {
                    break;
                }
            }
        }
        index
    }

    fn cell(&self, x: f64) -> usize {
        ((x * self.per_axis as f64) as usize).min(self.per_axis - 1)
    }

    fn covered(&self, cover: &BracketingCover, y: &[f64]) -> bool {
        let flat = y.iter().fold(0, |acc, &x| acc * self.per_axis + self.cell(x));
        self.cells[flat].iter().any(|&i| cover.brackets[i as usize].contains(y))
    }
}

/// Advances `idx` through the box `lo..=hi`, last axis fastest. Returns
/// false after the last index.
fn odometer_step(idx: &mut [usize], lo: &[usize], hi: &[usize]) -> bool {
    for j in (0..idx.len()).rev() {
        if idx[j] < hi[j] {
            idx[j] += 1;
            return true;
        }
        idx[j] = lo[j];
    }
    false
}

/// Per-axis corner coordinates together with the midpoints between
/// neighbors, thinned evenly so the full grid has at most `cap` points.
fn corner_grid_axes(cover: &BracketingCover, cap: usize) -> Vec<Vec<f64>> {
    let d = cover.d;
    let per_axis_cap = ((cap as f64).powf(1.0 / d as f64).floor() as usize).max(2);
    (0..d)
        .map(|j| {
            let mut v: Vec<f64> = cover
                .brackets
                .iter()
                .flat_map(|b| [b.lower[j], b.upper[j]])
                .chain([0.0, 1.0])
                .collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            let mids: Vec<f64> = v.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
            v.extend(mids);
            v.sort_by(f64::total_cmp);
            if v.len() > per_axis_cap {
                let step = (v.len() - 1) as f64 / (per_axis_cap - 1) as f64;
                v = (0..per_axis_cap)
                    .map(|i| v[(i as f64 * step).round() as usize])
                    .collect();
                v.dedup();
            }
            v
        })
        .collect()
}

pub fn validate_cover(cover: &BracketingCover, n_random: usize, seed: u64) -> CoverReport {
    validate_cover_with_grid(cover, n_random, seed, DEFAULT_GRID_POINTS)
}

/// Checks every weight and tests coverage of the thinned corner grid plus
/// `n_random` seeded uniform points.
pub fn validate_cover_with_grid(cover: &BracketingCover, n_random: usize, seed: u64, grid_cap: usize) -> CoverReport {
    let d = cover.d;
    let weights: Vec<f64> = cover.brackets.iter().map(Bracket::weight).collect();
    let weight_failures: Vec<(usize, f64)> = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > cover.delta + WEIGHT_TOL)
        .map(|(i, &w)| (i, w))
        .collect();
    let max_weight = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let axes = corner_grid_axes(cover, grid_cap);
    let grid_len: usize = axes.iter().map(Vec::len).product();
    let mut rng = rng_for(seed, 0);
    let randoms: Vec<f64> = (0..n_random * d).map(|_| uniform01(&mut rng)).collect();
    let index = BucketIndex::new(cover);

    let point = |k: usize| -> Vec<f64> {
        if k < grid_len {
            let mut rest = k;
            let mut y = vec![0.0; d];
            for j in (0..d).rev() {
                y[j] = axes[j][rest % axes[j].len()];
                rest /= axes[j].len();
            }
            y
        } else {
            let r = k - grid_len;
            randoms[r * d..(r + 1) * d].to_vec()
        }
    };
    let uncovered_idx: Vec<usize> = (0..grid_len + n_random)
        .into_par_iter()
        .filter(|&k| !index.covered(cover, &point(k)))
        .collect();

    CoverReport {
        bracket_count: cover.len(),
        max_weight,
        weight_failures,
        grid_points: grid_len,
        random_points: n_random,
        uncovered: uncovered_idx.iter().take(MAX_WITNESSES).map(|&k| point(k)).collect(),
        uncovered_count: uncovered_idx.len(),
    }
}

/// Worst sandwich gap `min vol(z) - max vol(x)` over test points, with
/// `x <= y <= z` ranging over `Γ ∪ {0}`; `+inf` when no `z >= y` exists.
pub fn delta_cover_gap(cover: &DeltaCover, tests: &[Vec<f64>]) -> f64 {
    tests
        .par_iter()
        .map(|y| {
            let mut best_lower: f64 = 0.0;
            let mut best_upper = f64::INFINITY;
            for p in &cover.points {
                let vol: f64 = p.iter().product();
                if p.iter().zip(y).all(|(a, b)| a <= b) {
                    best_lower = best_lower.max(vol);
                }
                if p.iter().zip(y).all(|(a, b)| a >= b) {
                    best_upper = best_upper.min(vol);
                }
            }
            best_upper - best_lower
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

/// Writes the header line `d,delta,count` (as values) and one bracket per
/// row, lower coordinates first.
pub fn write_cover_csv(cover: &BracketingCover, out: impl Write) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().flexible(true).from_writer(out);
    wtr.write_record([cover.d.to_string(), cover.delta.to_string(), cover.len().to_string()])?;
    for b in &cover.brackets {
        wtr.write_record(b.lower.iter().chain(&b.upper).map(f64::to_string))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_cover_csv(reader: impl BufRead) -> Result<BracketingCover> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Parse("empty cover file".into()))??;
    if header.len() != 3 {
        return Err(Error::Parse(format!(
            "header needs `d,delta,count`, got {} fields",
            header.len()
        )));
    }
    let parse_err = |what: &str, e: &dyn std::fmt::Display| Error::Parse(format!("{what}: {e}"));
    let d: usize = header[0].parse().map_err(|e| parse_err("d", &e))?;
    let delta: f64 = header[1].parse().map_err(|e| parse_err("delta", &e))?;
    let count: usize = header[2].parse().map_err(|e| parse_err("count", &e))?;
    if d == 0 || !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Parse(format!("invalid header d = {d}, delta = {delta}")));
    }
    let mut brackets = Vec::with_capacity(count);
    for (row, rec) in records.enumerate() {
        let rec = rec?;
        if rec.len() != 2 * d {
            return Err(Error::Parse(format!(
                "row {}: expected {} fields, got {}",
                row + 2,
                2 * d,
                rec.len()
            )));
        }
        let v: Vec<f64> = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| parse_err(&format!("row {}", row + 2), &e)))
            .collect::<Result<_>>()?;
        let b = Bracket::new(v[..d].to_vec(), v[d..].to_vec())
            .map_err(|e| Error::Parse(format!("row {}: {e}", row + 2)))?;
        brackets.push(b);
    }
    if brackets.len() != count {
        return Err(Error::Parse(format!(
            "header announces {count} brackets, file has {}",
            brackets.len()
        )));
    }
    Ok(BracketingCover { d, delta, brackets })
}

pub fn read_cover_path(path: impl AsRef<Path>) -> Result<BracketingCover> {
    read_cover_csv(std::io::BufReader::new(std::fs::File::open(path)?))
}

/// One point per row, `d` columns.
pub fn write_delta_cover_csv(cover: &DeltaCover, out: impl Write) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().from_writer(out);
    for p in &cover.points {
        wtr.write_record(p.iter().map(f64::to_string))?;
    }
    wtr.flush()?;
    Ok(())
}
