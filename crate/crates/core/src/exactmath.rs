//! Exact rational arithmetic for Bernoulli numbers, Faulhaber sums and the
//! shifted power-sum inequality
//!
//! ```text
//! sum_{i=1}^n (i+r)^j <= (n+r)^{j+1}/(j+1) + (n+r)^j/2 + j (n+r)^{j-1}/12
//! ```
//!
//! for `n, j >= 1` and `0 <= r <= 1`. Everything here is computed with
//! arbitrary-precision fractions; the `_f64` variants exist for diagnostics
//! with irrational shifts only.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision fraction, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Builds `num / den` as an exact [`Rational`].
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// A validated `(n, j, r)` argument for the shifted power sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaulhaberTriple {
    pub n: u64,
    pub j: u32,
    pub r: Rational,
}

impl FaulhaberTriple {
    pub fn new(n: u64, j: u32, r: Rational) -> crate::Result<Self> {
        if n == 0 {
            return Err(crate::Error::domain("n must be at least 1"));
        }
        if !in_unit_interval(&r) {
            return Err(crate::Error::domain(format!("shift r = {r} outside [0, 1]")));
        }
        Ok(Self { n, j, r })
    }
}

fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

static BERNOULLI: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();

/// The `k`-th Bernoulli number with `B_1 = -1/2`.
///
/// Values are produced by the recurrence `sum_{j=0}^{k} C(k+1, j) B_j = 0`
/// and cached process-wide; the cache grows on demand.
pub fn bernoulli(k: usize) -> Rational {
    let cache = BERNOULLI.get_or_init(|| RwLock::new(vec![Rational::one()]));
    {
        let read = cache.read().expect("bernoulli cache poisoned");
        if let Some(b) = read.get(k) {
            return b.clone();
        }
    }
    let mut write = cache.write().expect("bernoulli cache poisoned");
    while write.len() <= k {
        let m = write.len() as u64;
        let mut acc = Rational::zero();
        for (j, b) in write.iter().enumerate() {
            if !b.is_zero() {
                acc += Rational::from_integer(binomial(m + 1, j as u64)) * b;
            }
        }
        let next = -acc / int(m as i64 + 1);
        write.push(next);
    }
    write[k].clone()
}

/// `sum_{i=1}^n (i + r)^j` by direct summation.
pub fn power_sum(n: u64, j: u32, r: &Rational) -> Rational {
    assert!(n >= 1, "power_sum requires n >= 1");
    assert!(in_unit_interval(r), "power_sum requires 0 <= r <= 1");
    (1..=n).fold(Rational::zero(), |acc, i| {
        acc + num_traits::pow(Rational::from_integer(BigInt::from(i)) + r, j as usize)
    })
}

/// Faulhaber's closed form for `sum_{i=1}^n i^j`:
/// `n^{j+1}/(j+1) + n^j/2 + sum_{k=2}^{j} (-1)^k B_k / k! (j)_{k-1} n^{j-k+1}`,
/// where `(j)_{k-1} = j! / (j-k+1)!`.
pub fn faulhaber_closed(n: u64, j: u32) -> Rational {
    assert!(n >= 1 && j >= 1, "faulhaber_closed requires n, j >= 1");
    let nn = Rational::from_integer(BigInt::from(n));
    let j64 = j as u64;
    let mut total = num_traits::pow(nn.clone(), j as usize + 1) / int(j as i64 + 1)
        + num_traits::pow(nn.clone(), j as usize) / int(2);
    for k in 2..=j64 {
        let b = bernoulli(k as usize);
        if b.is_zero() {
            continue;
        }
        // (j)_{k-1} = j (j-1) ... (j-k+2)
        let falling: BigInt = ((j64 - k + 2)..=j64).fold(BigInt::one(), |a, x| a * BigInt::from(x));
        let mut term = b * Rational::from_integer(falling) / Rational::from_integer(factorial(k))
            * num_traits::pow(nn.clone(), (j64 - k + 1) as usize);
        if k % 2 == 1 {
            term = -term;
        }
        total += term;
    }
    total
}

/// Right-hand side `(n+r)^{j+1}/(j+1) + (n+r)^j/2 + j (n+r)^{j-1}/12`.
pub fn gfi_rhs(n: u64, j: u32, r: &Rational) -> Rational {
    assert!(n >= 1 && j >= 1, "gfi_rhs requires n, j >= 1");
    assert!(in_unit_interval(r), "gfi_rhs requires 0 <= r <= 1");
    let m = Rational::from_integer(BigInt::from(n)) + r;
    let ju = j as usize;
    num_traits::pow(m.clone(), ju + 1) / int(j as i64 + 1)
        + num_traits::pow(m.clone(), ju) / int(2)
        + int(j as i64) * num_traits::pow(m, ju - 1) / int(12)
}

/// `f_r(j) = (1+r)/(j+1) + 1/2 + j/(12(1+r))`, the ratio of the right-hand
/// side to the left-hand side at `n = 1`.
pub fn f_r(j: u32, r: &Rational) -> Rational {
    assert!(j >= 1, "f_r requires j >= 1");
    assert!(in_unit_interval(r), "f_r requires 0 <= r <= 1");
    let one_r = Rational::one() + r;
    one_r.clone() / int(j as i64 + 1) + rat(1, 2) + int(j as i64) / (int(12) * one_r)
}

/// Real minimizer `sqrt(12)(1+r) - 1` of `x -> f_r(x)` on `(-1, inf)`.
pub fn f_r_minimizer(r: f64) -> f64 {
    12f64.sqrt() * (1.0 + r) - 1.0
}

/// Floating counterpart of [`power_sum`] for arbitrary real shifts.
pub fn power_sum_f64(n: u64, j: u32, r: f64) -> f64 {
    (1..=n).map(|i| (i as f64 + r).powi(j as i32)).sum()
}

/// Floating counterpart of [`gfi_rhs`].
pub fn gfi_rhs_f64(n: u64, j: u32, r: f64) -> f64 {
    let m = n as f64 + r;
    let jf = j as f64;
    m.powi(j as i32 + 1) / (jf + 1.0) + m.powi(j as i32) / 2.0 + jf * m.powi(j as i32 - 1) / 12.0
}

/// One `(n, j, r)` point of a verification sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfiCase {
    pub n: u64,
    pub j: u32,
    pub r: Rational,
}

#[derive(Debug, Clone)]
pub struct GfiReport {
    pub n_max: u64,
    pub j_max: u32,
    pub checked: u64,
    /// First triple (in `r`, `j`, `n` order) where the inequality fails.
    pub counterexample: Option<GfiCase>,
    /// Triples where both sides agree exactly.
    pub equalities: Vec<GfiCase>,
}

impl GfiReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks the shifted power-sum inequality exactly on the full grid
/// `1..=n_max x 1..=j_max x r_grid`.
pub fn verify_gfi(n_max: u64, j_max: u32, r_grid: &[Rational]) -> crate::Result<GfiReport> {
    if n_max == 0 || j_max == 0 {
        return Err(crate::Error::domain("n_max and j_max must be at least 1"));
    }
    if let Some(bad) = r_grid.iter().find(|r| !in_unit_interval(r)) {
        return Err(crate::Error::domain(format!("shift r = {bad} outside [0, 1]")));
    }
    let mut report = GfiReport {
        n_max,
        j_max,
        checked: 0,
        counterexample: None,
        equalities: Vec::new(),
    };
    for r in r_grid {
        for j in 1..=j_max {
            // running left-hand side
            let mut lhs = Rational::zero();
            for n in 1..=n_max {
                lhs += num_traits::pow(Rational::from_integer(BigInt::from(n)) + r, j as usize);
                let rhs = gfi_rhs(n, j, r);
                report.checked += 1;
                if lhs > rhs {
                    if report.counterexample.is_none() {
                        report.counterexample = Some(GfiCase { n, j, r: r.clone() });
                    }
                } else if lhs == rhs {
                    report.equalities.push(GfiCase { n, j, r: r.clone() });
                }
            }
        }
    }
    Ok(report)
}

/// The grid `{0, 1/m, 2/m, ..., 1}`.
pub fn uniform_r_grid(m: u32) -> Vec<Rational> {
    assert!(m >= 1);
    (0..=m).map(|i| rat(i as i64, m as i64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_known_values() {
        assert_eq!(bernoulli(0), int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), int(0));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn odd_bernoulli_vanish() {
        for k in 1..=15 {
            assert!(bernoulli(2 * k + 1).is_zero(), "B_{} != 0", 2 * k + 1);
        }
    }

    #[test]
    fn bernoulli_cache_is_thread_safe() {
        let handles: Vec<_> = (0..4)
            .map(|t| std::thread::spawn(move || bernoulli(20 + t * 3)))
            .collect();
        let got: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert_eq!(got[0], bernoulli(20));
        assert_eq!(got[0], rat(-174611, 330));
    }

    #[test]
    fn power_sum_examples() {
        assert_eq!(power_sum(3, 2, &int(0)), int(14));
        assert_eq!(power_sum(2, 1, &rat(1, 2)), int(4));
        assert_eq!(power_sum(2, 3, &rat(1, 2)), int(19));
    }

    #[test]
    fn faulhaber_closed_examples() {
        assert_eq!(faulhaber_closed(3, 2), int(14));
        assert_eq!(faulhaber_closed(10, 1), int(55));
        assert_eq!(faulhaber_closed(5, 3), int(225));
    }

    #[test]
    fn faulhaber_closed_matches_direct_sum() {
        for n in 1..=30 {
            for j in 1..=15 {
                assert_eq!(faulhaber_closed(n, j), power_sum(n, j, &int(0)), "n={n} j={j}");
            }
        }
    }

    #[test]
    fn gfi_rhs_examples() {
        assert_eq!(gfi_rhs(3, 2, &int(0)), int(14));
        assert_eq!(gfi_rhs(2, 3, &rat(1, 2)), rat(1225, 64));
        assert_eq!(gfi_rhs(1, 2, &int(1)), int(5));
        assert!(gfi_rhs(1, 2, &int(1)) >= power_sum(1, 2, &int(1)));
    }

    #[test]
    fn gfi_rhs_monotone_in_n() {
        for r in uniform_r_grid(4) {
            for j in 1..=8 {
                for n in 1..20 {
                    assert!(gfi_rhs(n, j, &r) <= gfi_rhs(n + 1, j, &r));
                }
            }
        }
    }

    #[test]
    fn f_r_examples() {
        assert_eq!(f_r(2, &int(0)), int(1));
        assert_eq!(f_r(3, &int(0)), int(1));
        // 1.1/3 + 1/2 + 2/13.2
        let v = f_r(2, &rat(1, 10));
        assert_eq!(v, rat(11, 30) + rat(1, 2) + rat(10, 66));
        assert!(v >= int(1));
    }

    #[test]
    fn f_r_at_least_one() {
        for r in uniform_r_grid(8) {
            for j in 1..=40 {
                assert!(f_r(j, &r) >= int(1), "f_r({j}, {r}) < 1");
            }
        }
    }

    #[test]
    fn minimizer_location() {
        assert!((f_r_minimizer(0.0) - 2.4641016151377544).abs() < 1e-15);
    }

    #[test]
    fn verify_small_grids() {
        let rep = verify_gfi(1, 1, &[int(0)]).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.checked, 1);

        let rep = verify_gfi(3, 2, &[int(0)]).unwrap();
        assert!(rep.passed());
        assert!(rep.equalities.contains(&GfiCase { n: 3, j: 2, r: int(0) }));
    }

    #[test]
    fn verify_rejects_bad_input() {
        assert!(verify_gfi(0, 3, &[int(0)]).is_err());
        assert!(verify_gfi(3, 3, &[rat(3, 2)]).is_err());
        assert!(FaulhaberTriple::new(1, 1, rat(-1, 3)).is_err());
        assert!(FaulhaberTriple::new(1, 0, rat(1, 3)).is_ok());
    }

    #[test]
    fn float_path_agrees() {
        let exact = power_sum(7, 5, &rat(1, 4));
        let approx = power_sum_f64(7, 5, 0.25);
        let e: f64 = num_traits::ToPrimitive::to_f64(&exact).unwrap();
        assert!((e - approx).abs() / e < 1e-14);
        assert!(
            power_sum_f64(20, 6, std::f64::consts::FRAC_1_SQRT_2)
                <= gfi_rhs_f64(20, 6, std::f64::consts::FRAC_1_SQRT_2)
        );
    }
}
