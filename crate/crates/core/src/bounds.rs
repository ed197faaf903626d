//! Closed-form upper bounds on the bracketing number `N_[](d, delta)` of
//! anchored boxes, and the finite computations that certify the improved
//! general bound
//!
//! ```text
//! N_[](d, delta) <= max(1.1^{d-101}, 1) d^d / d! (1/delta + 1)^d.
//! ```
//!
//! Quantities that enter "<= 1" certificates are computed with exact
//! integers and fractions. Bounds that may overflow `f64` carry their natural
//! logarithm alongside the value.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::exactmath::{binomial, factorial, int, rat, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub d: u32,
    pub delta: f64,
}

impl BoundParams {
    pub fn new(d: u32, delta: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("dimension d must be at least 1"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::domain(format!("delta = {delta} outside (0, 1)")));
        }
        Ok(Self { d, delta })
    }
}

/// An evaluated bound. `value` is `+inf` when the bound exceeds `f64`
/// range, in which case `overflow` is set and `ln_value` is still finite.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub value: f64,
    pub ln_value: f64,
    pub overflow: bool,
    pub params: BoundParams,
}

impl BoundReport {
    fn new(name: &'static str, value: f64, ln_value: f64, params: BoundParams) -> Self {
        let overflow = !value.is_finite();
        let value = if overflow { f64::INFINITY } else { value };
        Self {
            name,
            value,
            ln_value,
            overflow,
            params,
        }
    }
}

/// `ceil(1/delta)`, the exact bracketing number in dimension one.
pub fn bracketing_1d(delta: f64) -> Result<u64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::domain(format!("delta = {delta} outside (0, 1]")));
    }
    Ok(layer_count(delta))
}

/// `n = ceil(1/delta)` guarded so that `(n - 1) delta < 1` always holds,
/// even when `1/delta` rounds up across an integer.
pub(crate) fn layer_count(delta: f64) -> u64 {
    let mut n = (1.0 / delta).ceil() as u64;
    while n > 1 && (n - 1) as f64 * delta >= 1.0 {
        n -= 1;
    }
    n.max(1)
}

/// `d^d / d! * (1/delta + 1)^d` together with its logarithm.
///
/// The value is accumulated as `prod_i (d x / i)`; every factor exceeds one,
/// so partial products increase and overflow can only happen at the end.
fn core_term(d: u32, delta: f64) -> (f64, f64) {
    let x = 1.0 / delta + 1.0;
    let df = d as f64;
    let mut value = 1.0;
    let mut ln = 0.0;
    for i in 1..=d {
        let factor = df * x / i as f64;
        value *= factor;
        ln += factor.ln();
    }
    (value, ln)
}

/// `2^{d-1} d^d / d! (1/delta + 1)^d`.
pub fn bound_gnewuch(d: u32, delta: f64) -> Result<BoundReport> {
    let params = BoundParams::new(d, delta)?;
    let (core, ln_core) = core_term(d, delta);
    let scale = 2f64.powi(d as i32 - 1);
    Ok(BoundReport::new(
        "gnewuch",
        core * scale,
        ln_core + (d as f64 - 1.0) * std::f64::consts::LN_2,
        params,
    ))
}

/// `2^{d-2} d^d / d! (1/delta + 1)^d + (1/delta + 1)/2`.
pub fn bound_pw(d: u32, delta: f64) -> Result<BoundReport> {
    let params = BoundParams::new(d, delta)?;
    let (core, ln_core) = core_term(d, delta);
    let tail = 0.5 * (1.0 / delta + 1.0);
    let ln_head = ln_core + (d as f64 - 2.0) * std::f64::consts::LN_2;
    let value = core * 2f64.powi(d as i32 - 2) + tail;
    // ln(head + tail) = ln_head + ln(1 + tail/head)
    let ln_value = ln_head + (tail.ln() - ln_head).exp().ln_1p();
    Ok(BoundReport::new("pw", value, ln_value, params))
}

/// `2 ln2 / delta^2 + 3 (ln2 + 1) / delta - (13/9 ln2 - 1)`, the bound
/// realized by the explicit planar construction in [`crate::cover`].
pub fn bound_d2(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta = {delta} outside (0, 1)")));
    }
    let ln2 = std::f64::consts::LN_2;
    let inv = 1.0 / delta;
    Ok(2.0 * ln2 * inv * inv + 3.0 * (ln2 + 1.0) * inv - (13.0 / 9.0 * ln2 - 1.0))
}

/// `b_d = max(1.1^{d-101}, 1)`.
pub fn bd_factor(d: u32) -> f64 {
    if d <= 101 {
        1.0
    } else {
        1.1f64.powi(d as i32 - 101)
    }
}

/// Exact `b_m = max((11/10)^{m-101}, 1)`.
pub fn bd_factor_exact(m: u32) -> Rational {
    if m <= 101 {
        Rational::one()
    } else {
        num_traits::pow(rat(11, 10), (m - 101) as usize)
    }
}

/// `max(1.1^{d-101}, 1) d^d / d! (1/delta + 1)^d`.
pub fn bound_general(d: u32, delta: f64) -> Result<BoundReport> {
    let params = BoundParams::new(d, delta)?;
    let (core, ln_core) = core_term(d, delta);
    let bd = bd_factor(d);
    Ok(BoundReport::new("general", core * bd, ln_core + bd.ln(), params))
}

/// `d! / (d^{k-1} (d-k+1)!) = prod_{i=0}^{k-2} (d-i)/d`.
fn falling_ratio(d: u32, k: u32) -> f64 {
    let df = d as f64;
    (0..k.saturating_sub(1)).map(|i| (df - i as f64) / df).product()
}

fn check_k(d: u32, k: u32) -> Result<()> {
    if d == 0 || k == 0 || k > d {
        return Err(Error::domain(format!("k = {k} outside 1..={d}")));
    }
    Ok(())
}

/// `f(k) = d!/(d^{k-1}(d-k+1)!) (k/12 + 1/2)`.
pub fn layer_factor(d: u32, k: u32) -> Result<f64> {
    check_k(d, k)?;
    Ok(falling_ratio(d, k) * (k as f64 / 12.0 + 0.5))
}

/// `ceil(sqrt(m))` in integer arithmetic.
fn ceil_sqrt(m: u64) -> u64 {
    let mut s = (m as f64).sqrt() as u64;
    while s * s > m {
        s -= 1;
    }
    while s * s < m {
        s += 1;
    }
    s
}

/// `-3 + ceil(sqrt(16 + d))` clamped to the admissible range `1..=d`.
pub fn layer_factor_argmax(d: u32) -> u32 {
    let k = ceil_sqrt(16 + d as u64) as i64 - 3;
    k.clamp(1, d.max(1) as i64) as u32
}

/// Smallest maximizer of `values` with a relative tie tolerance; the first
/// entry corresponds to `first_k`.
fn argmax_scan(first_k: u32, values: impl Iterator<Item = f64>) -> u32 {
    let mut best_k = first_k;
    let mut best = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best * (1.0 + 1e-12) || best == f64::NEG_INFINITY {
            best = v;
            best_k = first_k + i as u32;
        }
    }
    best_k
}

/// Maximizer of [`layer_factor`] over `k = 1..=d`, found by scanning.
pub fn layer_factor_argmax_scan(d: u32) -> u32 {
    argmax_scan(1, (1..=d).map(|k| falling_ratio(d, k) * (k as f64 / 12.0 + 0.5)))
}

/// `g_d(k) = d!/(d^{k-1}(d-k+1)!) (k/12 + 1/2 + 1/(k+1))`.
pub fn g_d(d: u32, k: u32) -> Result<f64> {
    check_k(d, k)?;
    let kf = k as f64;
    Ok(falling_ratio(d, k) * (kf / 12.0 + 0.5 + 1.0 / (kf + 1.0)))
}

/// Maximizer of [`g_d`] over the coefficient range `k = 2..=d` that the
/// bracketing argument uses (`k = 1` for `d = 1`).
pub fn g_argmax(d: u32) -> u32 {
    if d <= 1 {
        return 1;
    }
    argmax_scan(2, (2..=d).map(|k| g_d(d, k).expect("k in range")))
}

/// `k_0(d) = min(-3 + ceil(sqrt(16+d)), 1 + ceil(0.0544 d))`, evaluated
/// in integers.
pub fn k0(d: u32) -> u32 {
    let a = ceil_sqrt(16 + d as u64) as i64 - 3;
    let b = 1 + (544 * d as i64 + 9_999) / 10_000;
    a.min(b).max(1) as u32
}

/// `h(k) = g_d(k+1)/g_d(k)` in closed form.
pub fn h_of_k(k: u32, d: u32) -> Result<f64> {
    if k == 0 || k >= d {
        return Err(Error::domain(format!("h(k) needs 1 <= k < d, got k = {k}, d = {d}")));
    }
    let (kf, df) = (k as f64, d as f64);
    Ok((df - kf + 1.0) / df * (kf + 1.0) / (kf + 2.0) * (kf * kf + 9.0 * kf + 26.0) / (kf * kf + 7.0 * kf + 18.0))
}

/// `u(k) = d/(d-k+1) h(k)`, which does not depend on `d`.
pub fn u_of_k(k: u32, d: u32) -> Result<f64> {
    let h = h_of_k(k, d)?;
    let (kf, df) = (k as f64, d as f64);
    Ok(df / (df - kf + 1.0) * h)
}

fn check_a_range(d: u32, k: u32) -> Result<()> {
    if d < 4 || k < 2 || k + 2 > d {
        return Err(Error::domain(format!(
            "need d >= 4 and 2 <= k <= d-2, got d = {d}, k = {k}"
        )));
    }
    Ok(())
}

/// `a_{d-k} = C(d,k+1) + d/2 C(d,k) + d^2/12 C(d,k-1)`, exactly.
pub fn a_coeff(d: u32, k: u32) -> Result<Rational> {
    check_a_range(d, k)?;
    let (d64, k64) = (d as u64, k as u64);
    let dd = int(d as i64);
    Ok(Rational::from_integer(binomial(d64, k64 + 1))
        + dd.clone() / int(2) * Rational::from_integer(binomial(d64, k64))
        + dd.clone() * dd / int(12) * Rational::from_integer(binomial(d64, k64 - 1)))
}

/// `A_{d-k} = k! a_{d-k} / d^{k+1}`, exactly.
#[allow(non_snake_case)]
pub fn A_coeff(d: u32, k: u32) -> Result<Rational> {
    let a = a_coeff(d, k)?;
    let denom = num_traits::pow(BigInt::from(d), k as usize + 1);
    Ok(a * Rational::from_integer(factorial(k as u64)) / Rational::from_integer(denom))
}

/// `A_{d-k}` through the rewritten form
/// `prod_{i<k-1}(d-i)/d * ((d-k+1)(d-k)/(k+1) + d(d-k+1)/2 + d^2 k/12) / d^2`,
/// in floating point. Used where exact evaluation is too slow.
#[allow(non_snake_case)]
pub fn A_coeff_f64(d: u32, k: u32) -> Result<f64> {
    check_a_range(d, k)?;
    let (df, kf) = (d as f64, k as f64);
    let inner = (df - kf + 1.0) * (df - kf) / (kf + 1.0) + df * (df - kf + 1.0) / 2.0 + df * df * kf / 12.0;
    Ok(falling_ratio(d, k) * inner / (df * df))
}

/// `f_0(k) = 1/(k+1) + 1/2 + k/12`, exactly.
pub fn f0_exact(k: u32) -> Rational {
    rat(1, k as i64 + 1) + rat(1, 2) + rat(k as i64, 12)
}

/// Outcome of one named numerical certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Exhaustive exact check of `A_{d-k} <= 1` for `4 <= d <= d_max`,
/// `2 <= k <= d-2`. The detail names the largest coefficient encountered.
pub fn check_a_coeffs(d_max: u32) -> CheckResult {
    let mut worst: Option<(u32, u32, Rational)> = None;
    let mut failures = Vec::new();
    for d in 4..=d_max {
        // 12 k! a_{d-k} <= 12 d^{k+1} in integers
        let mut d_pow = num_traits::pow(BigInt::from(d), 3);
        let mut k_fact = BigInt::from(2);
        for k in 2..=d - 2 {
            let (d64, k64) = (d as u64, k as u64);
            let twelve_a = BigInt::from(12) * binomial(d64, k64 + 1)
                + BigInt::from(6 * d64) * binomial(d64, k64)
                + BigInt::from(d64 * d64) * binomial(d64, k64 - 1);
            let lhs = twelve_a * &k_fact;
            let rhs = BigInt::from(12) * &d_pow;
            if lhs > rhs {
                failures.push((d, k));
            }
            let value = Rational::new(lhs, rhs);
            if worst.as_ref().is_none_or(|w| value > w.2) {
                worst = Some((d, k, value));
            }
            d_pow *= BigInt::from(d);
            k_fact *= BigInt::from(k + 1);
        }
    }
    let detail = match &worst {
        Some((d, k, v)) => format!(
            "max A_{{d-k}} = {:.9} at d = {d}, k = {k}; {} violations",
            v.to_f64().unwrap_or(f64::NAN),
            failures.len()
        ),
        None => "empty range".to_string(),
    };
    CheckResult::new(
        format!("A_{{d-k}} <= 1 for all 4 <= d <= {d_max}, 2 <= k <= d-2"),
        failures.is_empty(),
        detail,
    )
}

/// The finite checks behind the `d > 101` part of the general bound.
pub fn check_large_d(d_max: u32) -> Result<Vec<CheckResult>> {
    if d_max < 102 {
        return Err(Error::domain("check_large_d needs d_max >= 102"));
    }
    let mut out = Vec::new();

    // (i) 1.1^{-k+1} f_0(k) < 1  <=>  f_0(k) 10^{k-1} < 11^{k-1}
    let bad: Vec<u32> = (2..=39)
        .filter(|&k| {
            let lhs = f0_exact(k) * Rational::from_integer(num_traits::pow(BigInt::from(10), k as usize - 1));
            lhs >= Rational::from_integer(num_traits::pow(BigInt::from(11), k as usize - 1))
        })
        .collect();
    out.push(CheckResult::new(
        "1.1^{-k+1} f_0(k) < 1 for k = 2..39",
        bad.is_empty(),
        format!("failing k: {bad:?}"),
    ));

    // (ii) 1.1^{-k+1} <= 1/k  <=>  k 10^{k-1} <= 11^{k-1}
    let bad: Vec<u32> = (40..=200)
        .filter(|&k| {
            BigInt::from(k) * num_traits::pow(BigInt::from(10), k as usize - 1)
                > num_traits::pow(BigInt::from(11), k as usize - 1)
        })
        .collect();
    out.push(CheckResult::new(
        "1.1^{-k+1} <= 1/k for k = 40..200",
        bad.is_empty(),
        format!("failing k: {bad:?}"),
    ));

    // (iii) g~_d(k_0(d)) = f_0(k_0(d)) / 1.1^{d-101} <= 1
    let mut bad = Vec::new();
    for d in 103..=d_max {
        let m = (d - 101) as usize;
        let lhs = f0_exact(k0(d)) * Rational::from_integer(num_traits::pow(BigInt::from(10), m));
        if lhs > Rational::from_integer(num_traits::pow(BigInt::from(11), m)) {
            bad.push(d);
        }
    }
    let g103 = (f0_exact(k0(103)) / num_traits::pow(rat(11, 10), 2))
        .to_f64()
        .unwrap_or(f64::NAN);
    out.push(CheckResult::new(
        format!("g~_d(k_0(d)) <= 1 for 103 <= d <= {d_max}"),
        bad.is_empty(),
        format!("g~_103(k_0(103)) = {g103:.6}; failing d: {bad:?}"),
    ));

    // (iv) d = 102: b_{d-k+1}/b_d = 1/1.1 and g_102(k_max) / 1.1 < 1
    let kmax = g_argmax(102);
    let g102 = g_d(102, kmax)?;
    out.push(CheckResult::new(
        "d = 102: g_102(k_max)/1.1 < 1",
        g102 / 1.1 < 1.0,
        format!("k_max(102) = {kmax}, g_102(k_max) = {g102:.6}"),
    ));

    // (v) direct sweep of (b_{d-k+1}/b_d) A_{d-k} <= 1
    let mut worst = (0u32, 0u32, 0.0f64);
    let mut bad = Vec::new();
    for d in 102..=d_max {
        for k in 2..=d - 2 {
            let ratio = if d - k + 1 > 101 {
                1.1f64.powi(-(k as i32 - 1))
            } else {
                1.1f64.powi(-(d as i32 - 101))
            };
            let v = ratio * A_coeff_f64(d, k)?;
            if v > worst.2 {
                worst = (d, k, v);
            }
            if v > 1.0 + 1e-9 {
                bad.push((d, k));
            }
        }
    }
    out.push(CheckResult::new(
        format!("(b_{{d-k+1}}/b_d) A_{{d-k}} <= 1 for 102 <= d <= {d_max}"),
        bad.is_empty(),
        format!("max {:.9} at d = {}, k = {}", worst.2, worst.0, worst.1),
    ));
    Ok(out)
}

/// Coefficient inequalities for the lowest and highest powers of `1/delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallPowersReport {
    pub d: u32,
    /// `d^2/12 + 1 <= d^d/d!`
    pub p0: bool,
    /// `d^2/2 + d^3(d-1)/24 + 1 <= d^d/(d-1)!`
    pub p1: bool,
    /// `b_{d-2} d^{d-1}/(2(d-2)!) + b_{d-1} d^d/(2(d-1)!) < b_d d^d/(d-1)!`, for `d >= 3`.
    pub p_d_minus_1: Option<bool>,
    /// `b_{d-1} d^d/d! <= b_d d^d/d!`
    pub p_d: bool,
}

impl SmallPowersReport {
    pub fn passed(&self) -> bool {
        self.p0 && self.p1 && self.p_d_minus_1.unwrap_or(true) && self.p_d
    }
}

/// Exact check of the `p = 0`, `p = 1`, `p = d-1` and `p = d` coefficient
/// comparisons.
///
/// For `p = d-1 >= 2` only the `k = 1` (middle term) and `k = 2` (leading
/// term) summands contribute, giving
/// `b_{d-2} d^{d-1}/(2(d-2)!) + b_{d-1} d^d/(2(d-1)!)`, which with `b` set to
/// one equals `(2d-1)/(2d) * d^d/(d-1)!`.
pub fn check_small_powers(d: u32) -> Result<SmallPowersReport> {
    if d < 2 {
        return Err(Error::domain("check_small_powers needs d >= 2"));
    }
    let d64 = d as u64;
    let dd = int(d as i64);
    let d_pow_d = Rational::from_integer(num_traits::pow(BigInt::from(d), d as usize));
    let fact = |m: u64| Rational::from_integer(factorial(m));

    let p0 = dd.clone() * dd.clone() / int(12) + int(1) <= d_pow_d.clone() / fact(d64);
    let p1 =
        dd.clone() * dd.clone() / int(2) + num_traits::pow(dd.clone(), 3) * (dd.clone() - int(1)) / int(24) + int(1)
            <= d_pow_d.clone() / fact(d64 - 1);
    let b = bd_factor_exact;
    let p_d_minus_1 = (d >= 3).then(|| {
        let lhs = b(d - 2) * d_pow_d.clone() / dd.clone() / (int(2) * fact(d64 - 2))
            + b(d - 1) * d_pow_d.clone() / (int(2) * fact(d64 - 1));
        lhs < b(d) * d_pow_d.clone() / fact(d64 - 1)
    });
    let p_d = b(d - 1) <= b(d);
    Ok(SmallPowersReport {
        d,
        p0,
        p1,
        p_d_minus_1,
        p_d,
    })
}

/// Coefficients of `(1/delta)^p`, `p = 0..=d`, in the induction-step bound
///
/// ```text
/// sum_{k=1}^{d-1} C(d,k) b_{d-k} d^{d-k}/(d-k)! ( x^{d-k+1}/(d-k+1) + x^{d-k}/2 + (d-k) x^{d-k-1}/12 ) + x + 1
/// ```
pub fn induction_coefficients(d: u32) -> Vec<Rational> {
    let mut coeff = vec![Rational::zero(); d as usize + 1];
    coeff[0] += int(1);
    if d >= 1 {
        coeff[1] += int(1);
    }
    for k in 1..d {
        let m = (d - k) as u64;
        let base = Rational::from_integer(binomial(d as u64, k as u64))
            * bd_factor_exact(d - k)
            * Rational::from_integer(num_traits::pow(BigInt::from(d), m as usize))
            / Rational::from_integer(factorial(m));
        coeff[m as usize + 1] += base.clone() / int(m as i64 + 1);
        coeff[m as usize] += base.clone() / int(2);
        coeff[m as usize - 1] += base * int(m as i64) / int(12);
    }
    coeff
}

/// Coefficients of `(1/delta)^p` in `b_d d^d/d! (1/delta + 1)^d`.
pub fn target_coefficients(d: u32) -> Vec<Rational> {
    let scale = bd_factor_exact(d) * Rational::from_integer(num_traits::pow(BigInt::from(d), d as usize))
        / Rational::from_integer(factorial(d as u64));
    (0..=d)
        .map(|p| scale.clone() * Rational::from_integer(binomial(d as u64, p as u64)))
        .collect()
}

/// Powers `p` where the induction-step coefficient exceeds the target one.
pub fn coefficient_violations(d: u32) -> Vec<u32> {
    let lhs = induction_coefficients(d);
    let rhs = target_coefficients(d);
    (0..=d).filter(|&p| lhs[p as usize] > rhs[p as usize]).collect()
}

/// All finite certificates for the general bracketing bound.
pub fn check_general_bound(a_d_max: u32, large_d_max: u32, scan_d_max: u32) -> Result<Vec<CheckResult>> {
    let mut out = vec![check_a_coeffs(a_d_max)];

    let mut bad = Vec::new();
    for d in 2..=a_d_max {
        let r = check_small_powers(d)?;
        if !r.passed() {
            bad.push(d);
        }
    }
    out.push(CheckResult::new(
        format!("small-power coefficients (p = 0, 1, d-1, d) for 2 <= d <= {a_d_max}"),
        bad.is_empty(),
        format!("failing d: {bad:?}"),
    ));

    let bad: Vec<u32> = (2..=a_d_max)
        .filter(|&d| !coefficient_violations(d).is_empty())
        .collect();
    out.push(CheckResult::new(
        format!("full coefficient comparison for 2 <= d <= {a_d_max}"),
        bad.is_empty(),
        format!("failing d: {bad:?}"),
    ));

    out.extend(check_large_d(large_d_max)?);

    let bad: Vec<u32> = (2..=scan_d_max)
        .filter(|&d| layer_factor_argmax_scan(d) != layer_factor_argmax(d))
        .collect();
    out.push(CheckResult::new(
        format!("argmax f = -3 + ceil(sqrt(16+d)) for 2 <= d <= {scan_d_max}"),
        bad.is_empty(),
        format!("failing d: {bad:?}"),
    ));

    let bad: Vec<u32> = (2..=scan_d_max).filter(|&d| g_argmax(d) > k0(d)).collect();
    out.push(CheckResult::new(
        format!("argmax g_d <= k_0(d) for 2 <= d <= {scan_d_max}"),
        bad.is_empty(),
        format!("failing d: {bad:?}"),
    ));

    let best = argmax_scan(1, (1..=100).map(|k| u_of_k(k, 1000).expect("k < d")));
    let u7 = u_of_k(7, 1000)?;
    out.push(CheckResult::new(
        "u(k) maximal at k = 7 with u(7) = 1.05747126",
        best == 7 && (u7 - 1.05747126).abs() < 1e-7,
        format!("argmax = {best}, u(7) = {u7:.9}"),
    ));
    Ok(out)
}
