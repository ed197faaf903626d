//! Probability and expectation bounds for the star-discrepancy of
//! negatively dependent sampling schemes, and their empirical counterparts.
//!
//! All constants derived from `(α, β) = (1.67681, 10.45292)` are recomputed
//! from those two numbers rather than hard-coded.

use std::io::Write;

use rayon::prelude::*;

use crate::bounds::bd_factor;
use crate::discrepancy::{star_disc_exact, star_disc_exact_capped, DEFAULT_GRID_CAP};
use crate::sampling::{sample, SamplerSpec};
use crate::special::erfcx;
use crate::{Error, Result};

pub const ALPHA: f64 = 1.67681;
pub const BETA: f64 = 10.45292;

/// Two-sided 95% normal quantile used by the Wilson interval.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainingParams {
    pub mu: u32,
    pub tau_mu: f64,
    /// `1/(1 - sqrt((μ+1)/(2μ)))`
    pub c_mu: f64,
    /// `sqrt(4 τ_μ (1 + 1/(3 c_μ)))`
    pub c1: f64,
    pub rho: f64,
    pub alpha: f64,
    pub beta: f64,
}

pub fn chaining_params(mu: u32, tau_mu: f64, rho: f64) -> Result<ChainingParams> {
    if mu < 2 {
        return Err(Error::domain(format!("mu = {mu} must be at least 2")));
    }
    if !(tau_mu > 0.0) || !(rho >= 0.0) {
        return Err(Error::domain(format!(
            "need tau_mu > 0 and rho >= 0, got {tau_mu}, {rho}"
        )));
    }
    let m = mu as f64;
    let c_mu = 1.0 / (1.0 - ((m + 1.0) / (2.0 * m)).sqrt());
    let c1 = (4.0 * tau_mu * (1.0 + 1.0 / (3.0 * c_mu))).sqrt();
    Ok(ChainingParams {
        mu,
        tau_mu,
        c_mu,
        c1,
        rho,
        alpha: ALPHA,
        beta: BETA,
    })
}

/// `sqrt(β/α)`, the threshold above which the probability bound is positive.
pub fn critical_c() -> f64 {
    (BETA / ALPHA).sqrt()
}

fn check_rho(rho: f64) -> Result<()> {
    if rho >= 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "rho = {rho} must be a finite nonnegative number"
        )))
    }
}

/// `max(0, 1 - exp(-(α c² - β - ρ) d))`: lower bound on the probability that
/// `D* <= c sqrt(d/N)`.
pub fn disc_probability_bound(c: f64, d: u32, rho: f64) -> f64 {
    let exponent = (ALPHA * c * c - BETA - rho) * d as f64;
    (-(-exponent).exp_m1()).clamp(0.0, 1.0)
}

/// Coefficient `c` of `sqrt(d/N)` reached with probability at least `q`:
/// `sqrt((β + ρ + ln(1/(1-q))/d)/α)`.
pub fn disc_coefficient_for_probability(q: f64, d: u32, rho: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) || d < 2 {
        return Err(Error::domain(format!(
            "need q in (0, 1) and d >= 2, got q = {q}, d = {d}"
        )));
    }
    check_rho(rho)?;
    Ok(((BETA + rho - (-q).ln_1p() / d as f64) / ALPHA).sqrt())
}

/// Coefficients of `sqrt(d/N)` bounding `E[D*]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedBound {
    /// `sqrt(β/α) (1 + sqrt(π/(βd)) e^{βd} (Φ(sqrt(2αN)) - Φ(sqrt(2βd))))`
    pub tight: f64,
    /// `sqrt(β/α) (1 + 1/(2βd))`
    pub simple: f64,
}

/// Both expectation coefficients. The factor `e^{βd}(Φ(a) - Φ(b))` is formed
/// from scaled complementary error functions once `βd > 30`, and is clamped
/// at zero when `a < b`.
pub fn expected_disc_bound(d: u32, n: u64, alpha: f64, beta: f64) -> Result<ExpectedBound> {
    if d == 0 || n == 0 || !(alpha > 0.0) || !(beta > 0.0) {
        return Err(Error::domain("expected_disc_bound needs d, N >= 1 and alpha, beta > 0"));
    }
    let bd = beta * d as f64;
    let a = (2.0 * alpha * n as f64).sqrt();
    let b = (2.0 * bd).sqrt();
    let scaled_gap = scaled_normal_gap(a, b, bd > 30.0);
    let lead = (beta / alpha).sqrt();
    Ok(ExpectedBound {
        tight: lead * (1.0 + (std::f64::consts::PI / bd).sqrt() * scaled_gap),
        simple: lead * (1.0 + 1.0 / (2.0 * bd)),
    })
}

/// `e^{b²/2} (Φ(a) - Φ(b))`, zero when `a <= b`. Both branches write the
/// difference through upper tails, `(erfc(b/√2) - erfc(a/√2))/2`; the scaled
/// branch folds `e^{b²/2}` into `erfcx` and never forms the exponential.
fn scaled_normal_gap(a: f64, b: f64, scaled: bool) -> f64 {
    if a <= b {
        return 0.0;
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let gap = if scaled {
        0.5 * (erfcx(b * s) - (0.5 * (b * b - a * a)).exp() * erfcx(a * s))
    } else {
        (0.5 * b * b).exp() * 0.5 * (libm::erfc(b * s) - libm::erfc(a * s))
    };
    gap.max(0.0)
}

/// `ξ = max(1, ln(N/d))`.
pub fn c0_xi(n: u64, d: u32) -> f64 {
    (n as f64 / d as f64).ln().max(1.0)
}

/// `η(N,d) = 3.3e sqrt(max(1, N/(2d ln(3.3e))))`.
pub fn c0_eta(n: u64, d: u32) -> f64 {
    let k = 3.3 * std::f64::consts::E;
    k * (n as f64 / (2.0 * d as f64 * k.ln())).max(1.0).sqrt()
}

fn check_cdn(c: f64, d: u32, n: u64) -> Result<()> {
    if !(c > 0.0) || d == 0 || n == 0 {
        return Err(Error::domain(format!(
            "need c > 0, d >= 1, N >= 1, got c = {c}, d = {d}, N = {n}"
        )));
    }
    Ok(())
}

/// `1 - 2 exp((-(c²-1)ξ/2 + ρ + ln(e(2/c+1)) + ln(b_d)/d) d)`, clamped to
/// `[0,1]`.
pub fn c0_bound_probability(c: f64, d: u32, n: u64, rho: f64) -> Result<f64> {
    check_cdn(c, d, n)?;
    check_rho(rho)?;
    let df = d as f64;
    let inner = -0.5 * (c * c - 1.0) * c0_xi(n, d) + rho + (2.0 / c + 1.0).ln() + 1.0 + bd_factor(d).ln() / df;
    Ok((1.0 - 2.0 * (inner * df).exp()).clamp(0.0, 1.0))
}

/// `sqrt(2/N) sqrt(d ln η + ρ d + ln(2/(1-θ)))`.
pub fn c0_theta_bound(theta: f64, d: u32, n: u64, rho: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::domain(format!("theta = {theta} outside (0, 1)")));
    }
    check_cdn(1.0, d, n)?;
    check_rho(rho)?;
    let df = d as f64;
    Ok((2.0 / n as f64).sqrt() * (df * c0_eta(n, d).ln() + rho * df + (2.0 / (1.0 - theta)).ln()).sqrt())
}

/// `(η/(b_d e) - 1) sqrt(ln η) > sqrt(2N/d)`.
pub fn c0_eta_condition(n: u64, d: u32) -> bool {
    let eta = c0_eta(n, d);
    (eta / (bd_factor(d) * std::f64::consts::E) - 1.0) * eta.ln().sqrt() > (2.0 * n as f64 / d as f64).sqrt()
}

/// `β + 1 + ln(1 + 1/sqrt(2π))`, printed as 11.78864.
pub fn weighted_constant() -> f64 {
    BETA + 1.0 + (1.0 + 1.0 / (2.0 * std::f64::consts::PI).sqrt()).ln()
}

/// Per-subset factor `α^{-1/2} N^{-1/2} sqrt(C + ln d - (1 + 1/(2|u|)) ln|u|) sqrt(|u|)`
/// with `C` from [`weighted_constant`]; the weighted bound is its maximum
/// times `γ_u` over subsets.
pub fn weighted_subset_factor(d: u32, u_size: u32, n: u64) -> Result<f64> {
    if u_size == 0 || u_size > d || n == 0 {
        return Err(Error::domain(format!(
            "need 1 <= |u| <= d and N >= 1, got |u| = {u_size}, d = {d}"
        )));
    }
    let u = u_size as f64;
    let radicand = weighted_constant() + (d as f64).ln() - (1.0 + 1.0 / (2.0 * u)) * u.ln();
    Ok((radicand * u / (ALPHA * n as f64)).sqrt())
}

/// `2 - (1 + e^{-(α c² - β - ρ)})^d`, clamped to `[0,1]`.
pub fn weighted_probability_bound(c: f64, d: u32, rho: f64) -> Result<f64> {
    if !(c > 0.0) || d == 0 {
        return Err(Error::domain(format!("need c > 0 and d >= 1, got c = {c}, d = {d}")));
    }
    check_rho(rho)?;
    let t = (-(ALPHA * c * c - BETA - rho)).exp();
    Ok((2.0 - (d as f64 * t.ln_1p()).exp()).clamp(0.0, 1.0))
}

/// `sqrt((ρ + β - ln((2-θ)^{1/d} - 1))/α)`.
pub fn weighted_theta_coeff(theta: f64, d: u32, rho: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) || d == 0 {
        return Err(Error::domain(format!(
            "need theta in (0, 1) and d >= 1, got {theta}, {d}"
        )));
    }
    check_rho(rho)?;
    // (2-θ)^{1/d} - 1 without cancellation
    let root_minus_one = ((1.0 - theta).ln_1p() / d as f64).exp_m1();
    Ok(((rho + BETA - root_minus_one.ln()) / ALPHA).sqrt())
}

/// Both sides of the chaining tail inequality
/// `1 + e^{-A d}/(1 - e^{-B d}) < sqrt(πd/2)` with
/// `A = (μ+ρ-σ)(μτ-1) + (1-ln2)μ - 1 - ζ - σ` and `B = (μ+ρ-σ)τ - ln2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl TailCheck {
    pub fn holds(&self) -> bool {
        self.lhs < self.rhs
    }
}

pub fn chaining_tail_check(mu: u32, tau_mu: f64, d: u32, rho: f64) -> Result<TailCheck> {
    if mu < 2 || !(tau_mu > 0.0) || d == 0 {
        return Err(Error::domain("need mu >= 2, tau_mu > 0, d >= 1"));
    }
    check_rho(rho)?;
    let (m, df) = (mu as f64, d as f64);
    let ln2 = std::f64::consts::LN_2;
    let ln_bd = bd_factor(d).ln();
    let sigma = m - (2f64.powi(mu as i32) + 1.0).ln() - 1.0 - ln_bd / df - ln2 / df;
    let zeta = (-(m + 1.0) * ln2).exp().ln_1p() + ln2 + ln2 / df + ln_bd / df;
    let spread = m + rho - sigma;
    let a = spread * (m * tau_mu - 1.0) + (1.0 - ln2) * m - 1.0 - zeta - sigma;
    let b = spread * tau_mu - ln2;
    let denom = -(-b * df).exp_m1();
    let lhs = if denom > 0.0 {
        1.0 + (-a * df).exp() / denom
    } else {
        f64::INFINITY
    };
    Ok(TailCheck {
        lhs,
        rhs: (std::f64::consts::PI * df / 2.0).sqrt(),
    })
}

/// Exact `D*` for each replication `0..reps`, replication `r` drawn from
/// substream `r`. Runs in parallel; the output is in replication order.
pub fn replicate_dstar(spec: &SamplerSpec, reps: u64) -> Result<Vec<f64>> {
    replicate_dstar_capped(spec, reps, DEFAULT_GRID_CAP)
}

pub fn replicate_dstar_capped(spec: &SamplerSpec, reps: u64, cap: u64) -> Result<Vec<f64>> {
    if reps == 0 {
        return Err(Error::domain("reps must be at least 1"));
    }
    // fail fast on infeasible sizes before spawning work
    let grid = (spec.n as f64 + 1.0).powi(spec.d as i32);
    if grid > cap as f64 {
        return Err(Error::Infeasible {
            required: grid,
            cap: cap as f64,
        });
    }
    (0..reps)
        .into_par_iter()
        .map(|r| star_disc_exact_capped(&sample(spec, r), cap).map(|res| res.value))
        .collect()
}

/// Fraction of successes with its Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityEstimate {
    pub fraction: f64,
    pub lower: f64,
    pub upper: f64,
    pub trials: u64,
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> ProbabilityEstimate {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ProbabilityEstimate {
        fraction: p,
        lower: if successes == 0 { 0.0 } else { (centre - half).max(0.0) },
        upper: if successes == trials {
            1.0
        } else {
            (centre + half).min(1.0)
        },
        trials,
    }
}

/// Fraction of `D*` values at most `c sqrt(d/N)`.
pub fn fraction_below(dstar: &[f64], c: f64, d: usize, n: usize) -> ProbabilityEstimate {
    let threshold = c * (d as f64 / n as f64).sqrt();
    let hits = dstar.iter().filter(|&&v| v <= threshold).count() as u64;
    wilson_interval(hits, dstar.len() as u64)
}

pub fn estimate_probability(spec: &SamplerSpec, c: f64, reps: u64) -> Result<ProbabilityEstimate> {
    let dstar = replicate_dstar(spec, reps)?;
    Ok(fraction_below(&dstar, c, spec.d, spec.n))
}

/// Sample mean and its standard error.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn estimate_expectation(spec: &SamplerSpec, reps: u64) -> Result<(f64, f64)> {
    Ok(mean_stderr(&replicate_dstar(spec, reps)?))
}

/// One row of the per-replication experiment CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub rep: u64,
    pub sampler: String,
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    pub dstar: f64,
    pub threshold_c: f64,
    pub below: bool,
}

pub const EXPERIMENT_HEADER: [&str; 8] = ["rep", "sampler", "d", "n", "seed", "dstar", "threshold_c", "below"];

/// One record per replication and threshold, replication-major.
pub fn experiment_records(spec: &SamplerSpec, dstar: &[f64], cs: &[f64]) -> Vec<ExperimentRecord> {
    let scale = (spec.d as f64 / spec.n as f64).sqrt();
    dstar
        .iter()
        .enumerate()
        .flat_map(|(rep, &v)| {
            cs.iter().map(move |&c| ExperimentRecord {
                rep: rep as u64,
                sampler: spec.kind.to_string(),
                d: spec.d,
                n: spec.n,
                seed: spec.seed,
                dstar: v,
                threshold_c: c,
                below: v <= c * scale,
            })
        })
        .collect()
}

pub fn write_experiment_csv(records: &[ExperimentRecord], out: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(EXPERIMENT_HEADER)?;
    for r in records {
        wtr.write_record([
            r.rep.to_string(),
            r.sampler.clone(),
            r.d.to_string(),
            r.n.to_string(),
            r.seed.to_string(),
            r.dstar.to_string(),
            r.threshold_c.to_string(),
            (r.below as u8).to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Exact `D*` of a single replication, exposed for spot checks.
pub fn replication_dstar(spec: &SamplerSpec, rep: u64) -> Result<f64> {
    Ok(star_disc_exact(&sample(spec, rep))?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::SamplerKind;

    #[test]
    fn chaining_constants() {
        let p = chaining_params(12, 0.0871, 0.0).unwrap();
        assert!((p.c_mu - 3.78759).abs() < 1e-4);
        assert!((p.c1 - 0.61568).abs() < 1e-4);
        assert!(chaining_params(1, 0.1, 0.0).is_err());
        assert!(chaining_params(12, 0.0, 0.0).is_err());
    }

    #[test]
    fn constant_web() {
        assert!((critical_c() - 2.49676).abs() < 1e-5);
        assert!((1.0 / ALPHA.sqrt() - 0.77225).abs() < 5e-5);
        assert!((weighted_constant() - 11.78864).abs() < 1e-5);
    }

    #[test]
    fn probability_bound_values() {
        assert!((disc_probability_bound(2.5, 2, 0.0) - 0.0528).abs() < 5e-4);
        assert!(disc_probability_bound(3.0, 2, 0.0) >= 0.9999);
        assert!(disc_probability_bound(2.49676, 2, 0.0) < 1e-4);
        assert_eq!(disc_probability_bound(1.0, 2, 0.0), 0.0);
    }

    #[test]
    fn c_of_q() {
        let c = disc_coefficient_for_probability(0.5, 2, 0.0).unwrap();
        let printed = 0.7723 * (BETA + std::f64::consts::LN_2 / 2.0).sqrt();
        assert!((c / printed - 1.0).abs() < 1e-4);
        let tiny = disc_coefficient_for_probability(1e-12, 1_000_000, 0.0).unwrap();
        assert!((tiny - 2.49676).abs() < 1e-5);
        for (q, d, rho) in [(0.1, 2, 0.0), (0.9, 5, 1.0), (0.999, 3, 0.3)] {
            let c = disc_coefficient_for_probability(q, d, rho).unwrap();
            assert!(disc_probability_bound(c * (1.0 + 1e-9), d, rho) >= q);
        }
        assert!(disc_coefficient_for_probability(1.0, 2, 0.0).is_err());
        assert!(disc_coefficient_for_probability(0.5, 1, 0.0).is_err());
    }

    #[test]
    fn expectation_coefficients() {
        let b2 = expected_disc_bound(2, 64, ALPHA, BETA).unwrap();
        assert!((b2.simple - 2.55648).abs() < 1e-4);
        let b3 = expected_disc_bound(3, 64, ALPHA, BETA).unwrap();
        assert!((b3.simple - 2.53657).abs() < 1e-4);
        for d in 2..=50 {
            for n in [10, 100, 10_000] {
                let b = expected_disc_bound(d, n, ALPHA, BETA).unwrap();
                assert!(b.tight <= b.simple, "d={d} N={n}");
                assert!(b.tight.is_finite());
            }
        }
        let far = expected_disc_bound(10_000, 1 << 40, ALPHA, BETA).unwrap();
        assert!((far.tight - 2.49676).abs() < 1e-3);
        assert!((far.simple - 2.49676).abs() < 1e-3);
    }

    #[test]
    fn expectation_branches_agree() {
        for (a, b) in [(40.0, 7.7), (8.0, 7.75), (12.0, 2.0), (7.8, 7.79), (3.0, 1.0)] {
            let direct = scaled_normal_gap(a, b, false);
            let scaled = scaled_normal_gap(a, b, true);
            assert!(
                (direct / scaled - 1.0).abs() < 1e-11,
                "a={a} b={b}: {direct} vs {scaled}"
            );
        }
        assert_eq!(scaled_normal_gap(1.0, 2.0, true), 0.0);
        // oracle from the normal distribution function for moderate arguments
        let (a, b) = (2.5f64, 1.0f64);
        let expect = (0.5 * b * b).exp() * (crate::special::normal_cdf(a) - crate::special::normal_cdf(b));
        assert!((scaled_normal_gap(a, b, false) - expect).abs() < 1e-14);
    }

    #[test]
    fn small_sample_bound() {
        assert_eq!(c0_xi(5, 5), 1.0);
        let k = 3.3 * std::f64::consts::E;
        assert!((c0_eta(10, 5) - k).abs() < 1e-12);
        assert!((k - 8.97033).abs() < 1e-5);
        let mut prev = 0.0;
        for i in 0..40 {
            let p = c0_bound_probability(2.0 + 0.1 * i as f64, 5, 1000, 0.0).unwrap();
            assert!(p >= prev);
            prev = p;
        }
        assert!(prev > 0.99);
        let t = c0_theta_bound(0.5, 5, 1000, 0.0).unwrap();
        assert!(t > 0.0 && t < 1.0);
        assert!(c0_theta_bound(1.0, 5, 1000, 0.0).is_err());
    }

    #[test]
    fn small_sample_eta_condition_on_grid() {
        for d in 1..=50u32 {
            let mut n = 1u64;
            while n <= 1_000_000 {
                assert!(c0_eta_condition(n, d), "N={n} d={d}");
                n = n * 3 / 2 + 1;
            }
        }
    }

    #[test]
    fn weighted_bounds() {
        let f = weighted_subset_factor(4, 1, 100).unwrap();
        assert!((f - (weighted_constant() + 4f64.ln()).sqrt() / (ALPHA * 100.0).sqrt()).abs() < 1e-15);
        assert!(weighted_subset_factor(5, 2, 100).unwrap() < weighted_subset_factor(6, 2, 100).unwrap());
        assert!(weighted_subset_factor(3, 4, 100).is_err());

        assert!((weighted_probability_bound(50.0, 3, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let one = weighted_probability_bound(2.6, 1, 0.0).unwrap();
        assert!((one - disc_probability_bound(2.6, 1, 0.0)).abs() < 1e-12);
        let c = weighted_theta_coeff(0.9, 3, 0.0).unwrap();
        assert!(weighted_probability_bound(c * (1.0 + 1e-9), 3, 0.0).unwrap() >= 0.9);
        assert!(weighted_theta_coeff(1.0, 3, 0.0).is_err());
    }

    #[test]
    fn wilson() {
        let w = wilson_interval(50, 100);
        assert_eq!(w.fraction, 0.5);
        assert!((w.lower - 0.4038).abs() < 1e-3 && (w.upper - 0.5962).abs() < 1e-3);
        let all = wilson_interval(10, 10);
        assert_eq!(all.upper, 1.0);
        assert!(all.lower > 0.69 && all.lower < 0.73);
    }

    #[test]
    fn replication_order_is_sequential_order() {
        let spec = SamplerSpec::new(SamplerKind::Mc, 2, 16, 4).unwrap();
        let par = replicate_dstar(&spec, 20).unwrap();
        let seq: Vec<f64> = (0..20).map(|r| replication_dstar(&spec, r).unwrap()).collect();
        assert_eq!(par, seq);
    }

    #[test]
    fn replication_rejects_infeasible() {
        let spec = SamplerSpec::new(SamplerKind::Mc, 8, 64, 4).unwrap();
        assert!(matches!(replicate_dstar(&spec, 2), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn experiment_csv() {
        let spec = SamplerSpec::new(SamplerKind::Lhs, 2, 8, 1).unwrap();
        let dstar = replicate_dstar(&spec, 3).unwrap();
        let recs = experiment_records(&spec, &dstar, &[2.5, 3.0]);
        assert_eq!(recs.len(), 6);
        let mut buf = Vec::new();
        write_experiment_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("rep,sampler,d,n,seed,dstar,threshold_c,below\n0,lhs,2,8,1,"));
        assert_eq!(text.lines().count(), 7);
    }
}
