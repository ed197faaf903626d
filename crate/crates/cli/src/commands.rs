use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use discbound::bounds::{
    bound_d2, bound_general, bound_gnewuch, bound_pw, bracketing_1d, check_general_bound, BoundReport,
};
use discbound::cover::{
    build_cover_nd_capped, cover_to_delta_cover, read_cover_path, validate_cover, write_cover_csv, BracketingCover,
    CoverReport,
};
use discbound::discrepancy::{
    star_disc_exact_capped, star_disc_upper_cover, weighted_star_disc, DiscrepancyResult, PointSet, WeightScheme,
    WeightedMode,
};
use discbound::exactmath::{rat, uniform_r_grid, verify_gfi, Rational};
use discbound::probbounds::{
    disc_probability_bound, expected_disc_bound, experiment_records, fraction_below, mean_stderr,
    replicate_dstar_capped, write_experiment_csv, ALPHA, BETA,
};
use discbound::sampling::{sample, SamplerSpec};

use crate::{BoundsCmd, Command, CoverCmd, DiscCmd, ExperimentCmd, FaulhaberCmd, SampleArgs, ValidationArgs};

pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    fn label(ok: bool) -> &'static str {
        if ok {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

pub fn dispatch(command: Command, out: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Faulhaber(FaulhaberCmd::Verify { n_max, j_max, r_grid }) => {
            faulhaber_verify(n_max, j_max, &r_grid, out)
        }
        Command::Bounds(BoundsCmd::Table { d, delta }) => bounds_table(&d.0, &delta.0, out),
        Command::Bounds(BoundsCmd::CheckCertificates {
            a_d_max,
            large_d_max,
            scan_d_max,
        }) => bounds_check(a_d_max, large_d_max, scan_d_max, out),
        Command::Cover(CoverCmd::Build {
            d,
            delta,
            out: path,
            validation,
            cap,
        }) => cover_build(d, delta, path.as_deref(), &validation, cap, out),
        Command::Cover(CoverCmd::Verify { input, validation }) => cover_verify(&input, &validation, out),
        Command::Disc(DiscCmd::Exact { points, cap }) => disc_exact(&points, cap, out),
        Command::Disc(DiscCmd::Upper { points, cover, delta }) => disc_upper(&points, cover.as_deref(), delta, out),
        Command::Disc(DiscCmd::Weighted {
            points,
            product_weights,
            weights,
            delta,
        }) => disc_weighted(&points, product_weights.map(|w| w.0), weights.as_deref(), delta, out),
        Command::Sample(args) => sample_points(&args, out),
        Command::Experiment(ExperimentCmd::Run {
            sampler,
            d,
            n,
            reps,
            seed,
            c,
            rho,
            out: path,
            cap,
        }) => {
            let spec = SamplerSpec::new(sampler, d, n, seed)?;
            experiment_run(&spec, reps, &c.0, rho, path.as_deref(), cap, out)
        }
    }
}

/// `m` means `{0, 1/m, ..., 1}`; otherwise a comma list of `a` or `a/b`.
fn parse_r_grid(spec: &str) -> Result<Vec<Rational>> {
    let spec = spec.trim();
    if !spec.contains([',', '/']) {
        let m: u32 = spec.parse().with_context(|| format!("bad shift grid {spec:?}"))?;
        if m == 0 {
            bail!("shift grid size must be at least 1");
        }
        return Ok(uniform_r_grid(m));
    }
    spec.split(',')
        .map(|item| {
            let item = item.trim();
            let (num, den) = item.split_once('/').unwrap_or((item, "1"));
            let num: i64 = num.trim().parse().with_context(|| format!("bad shift {item:?}"))?;
            let den: i64 = den.trim().parse().with_context(|| format!("bad shift {item:?}"))?;
            if den == 0 {
                bail!("zero denominator in shift {item:?}");
            }
            Ok(rat(num, den))
        })
        .collect()
}

fn faulhaber_verify(n_max: u64, j_max: u32, r_grid: &str, out: &mut dyn Write) -> Result<Outcome> {
    let grid = parse_r_grid(r_grid)?;
    let report = verify_gfi(n_max, j_max, &grid)?;
    writeln!(
        out,
        "checked: {} triples (n <= {n_max}, j <= {j_max}, {} shifts)",
        report.checked,
        grid.len()
    )?;
    writeln!(out, "equality cases: {}", report.equalities.len())?;
    for case in &report.equalities {
        writeln!(out, "  equality at n={} j={} r={}", case.n, case.j, case.r)?;
    }
    if let Some(case) = &report.counterexample {
        writeln!(out, "counterexample: n={} j={} r={}", case.n, case.j, case.r)?;
    }
    writeln!(out, "result: {}", Outcome::label(report.passed()))?;
    Ok(Outcome::from_bool(report.passed()))
}

fn fmt_bound(b: &BoundReport) -> String {
    b.value.to_string()
}

fn bounds_table(dims: &[u32], deltas: &[f64], out: &mut dyn Write) -> Result<Outcome> {
    let mut rows = Vec::new();
    for &d in dims {
        for &delta in deltas {
            let d2 = if d == 2 {
                bound_d2(delta)?.to_string()
            } else {
                String::new()
            };
            rows.push(format!(
                "{d},{delta},{},{},{d2},{}",
                fmt_bound(&bound_gnewuch(d, delta)?),
                fmt_bound(&bound_pw(d, delta)?),
                fmt_bound(&bound_general(d, delta)?),
            ));
        }
    }
    writeln!(out, "d,delta,gnewuch,pw,d2,general")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    Ok(Outcome::Pass)
}

fn bounds_check(a_d_max: u32, large_d_max: u32, scan_d_max: u32, out: &mut dyn Write) -> Result<Outcome> {
    let results = check_general_bound(a_d_max, large_d_max, scan_d_max)?;
    for r in &results {
        writeln!(out, "{}: {} ({})", r.name, Outcome::label(r.passed), r.detail)?;
    }
    Ok(Outcome::from_bool(results.iter().all(|r| r.passed)))
}

fn print_cover_report(report: &CoverReport, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "max weight: {}", report.max_weight)?;
    for (i, w) in &report.weight_failures {
        writeln!(out, "  heavy bracket {i}: weight {w}")?;
    }
    writeln!(
        out,
        "test points: {} grid + {} random, {} uncovered",
        report.grid_points, report.random_points, report.uncovered_count
    )?;
    for y in &report.uncovered {
        writeln!(out, "  uncovered: {}", join(y))?;
    }
    Ok(())
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Reference bound for the cardinality of a `d`-dimensional cover.
fn cardinality_bound(d: usize, delta: f64) -> Result<(&'static str, f64)> {
    Ok(match d {
        1 => ("one-dimensional", bracketing_1d(delta)? as f64),
        2 => ("planar", bound_d2(delta)?),
        _ => ("general", bound_general(d as u32, delta)?.value),
    })
}

fn report_cover(cover: &BracketingCover, validation: &ValidationArgs, out: &mut dyn Write) -> Result<bool> {
    writeln!(out, "d: {}", cover.d)?;
    writeln!(out, "delta: {}", cover.delta)?;
    writeln!(out, "brackets: {}", cover.len())?;
    let report = validate_cover(cover, validation.n_random, validation.seed);
    print_cover_report(&report, out)?;
    Ok(report.passed())
}

fn cover_build(
    d: usize,
    delta: f64,
    path: Option<&Path>,
    validation: &ValidationArgs,
    cap: usize,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let cover = build_cover_nd_capped(d, delta, cap)?;
    let (label, bound) = cardinality_bound(d, delta)?;
    let ok = report_cover(&cover, validation, out)?;
    writeln!(out, "bound ({label}): {bound}")?;
    writeln!(out, "within bound: {}", cover.len() as f64 <= bound)?;
    if let Some(path) = path {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        write_cover_csv(&cover, &mut w)?;
        w.flush()?;
    }
    writeln!(out, "result: {}", Outcome::label(ok))?;
    Ok(Outcome::from_bool(ok))
}

fn cover_verify(input: &Path, validation: &ValidationArgs, out: &mut dyn Write) -> Result<Outcome> {
    let cover = read_cover_path(input).with_context(|| format!("reading {}", input.display()))?;
    let ok = report_cover(&cover, validation, out)?;
    writeln!(out, "result: {}", Outcome::label(ok))?;
    Ok(Outcome::from_bool(ok))
}

fn read_points(path: &Path) -> Result<PointSet> {
    let points = PointSet::read_csv_path(path).with_context(|| format!("reading {}", path.display()))?;
    if points.is_empty() {
        bail!("{} holds no points", path.display());
    }
    Ok(points)
}

fn print_result(label: &str, r: &DiscrepancyResult, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "{label}: {}", r.value)?;
    if let Some(w) = &r.witness {
        writeln!(out, "{label} witness: {}", join(w))?;
    }
    Ok(())
}

fn disc_exact(path: &Path, cap: u64, out: &mut dyn Write) -> Result<Outcome> {
    let points = read_points(path)?;
    writeln!(out, "d: {}\nn: {}", points.dim(), points.len())?;
    print_result("dstar", &star_disc_exact_capped(&points, cap)?, out)?;
    Ok(Outcome::Pass)
}

fn disc_upper(path: &Path, cover: Option<&Path>, delta: Option<f64>, out: &mut dyn Write) -> Result<Outcome> {
    let points = read_points(path)?;
    let brackets = match (cover, delta) {
        (Some(p), _) => read_cover_path(p).with_context(|| format!("reading {}", p.display()))?,
        (None, Some(delta)) => build_cover_nd_capped(points.dim(), delta, discbound::cover::DEFAULT_BRACKET_CAP)?,
        (None, None) => bail!("need --cover or --delta"),
    };
    let test_set = cover_to_delta_cover(&brackets);
    let est = star_disc_upper_cover(&points, &test_set)?;
    writeln!(
        out,
        "d: {}\nn: {}\ndelta: {}\ntest points: {}",
        points.dim(),
        points.len(),
        test_set.delta,
        test_set.points.len()
    )?;
    print_result("upper", &est.upper, out)?;
    print_result("lower", &est.lower, out)?;
    Ok(Outcome::Pass)
}

fn disc_weighted(
    path: &Path,
    product: Option<Vec<f64>>,
    file: Option<&Path>,
    delta: Option<f64>,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let points = read_points(path)?;
    let weights = match (product, file) {
        (Some(g), _) => WeightScheme::product(&g)?,
        (None, Some(p)) => {
            let f = File::open(p).with_context(|| format!("reading {}", p.display()))?;
            WeightScheme::read_csv(points.dim(), BufReader::new(f))?
        }
        (None, None) => bail!("need --product-weights or --weights"),
    };
    let mode = delta.map_or(WeightedMode::Exact, WeightedMode::Cover);
    let r = weighted_star_disc(&points, &weights, mode)?;
    let coords: Vec<String> = (0..points.dim())
        .filter(|j| r.mask >> j & 1 == 1)
        .map(|j| (j + 1).to_string())
        .collect();
    let kind = if delta.is_some() { "upper bound" } else { "exact" };
    writeln!(out, "weighted dstar ({kind}): {}", r.value)?;
    writeln!(out, "attained on coordinates: {{{}}}", coords.join(","))?;
    Ok(Outcome::Pass)
}

fn write_file(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> discbound::Result<()>) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write(&mut w)?;
    w.flush()?;
    Ok(())
}

fn sample_points(args: &SampleArgs, out: &mut dyn Write) -> Result<Outcome> {
    let spec = SamplerSpec::new(args.sampler, args.d, args.n, args.seed)?;
    let points = sample(&spec, 0);
    match &args.out {
        Some(path) => write_file(path, |w| points.write_csv(w))?,
        None => points.write_csv(out)?,
    }
    Ok(Outcome::Pass)
}

fn experiment_run(
    spec: &SamplerSpec,
    reps: u64,
    cs: &[f64],
    rho: f64,
    path: Option<&Path>,
    cap: u64,
    out: &mut dyn Write,
) -> Result<Outcome> {
    if reps == 0 {
        bail!("--reps must be at least 1");
    }
    if cs.iter().any(|&c| c <= 0.0) {
        bail!("thresholds must be positive");
    }
    let dstar = replicate_dstar_capped(spec, reps, cap)?;
    if let Some(path) = path {
        let records = experiment_records(spec, &dstar, cs);
        write_file(path, |w| write_experiment_csv(&records, w))?;
    }

    let d = spec.d as u32;
    let scale = (spec.d as f64 / spec.n as f64).sqrt();
    writeln!(out, "statistic,c,bound,empirical,ci_lower,ci_upper,reps")?;
    for &c in cs {
        let est = fraction_below(&dstar, c, spec.d, spec.n);
        writeln!(
            out,
            "fraction_below,{c},{},{},{},{},{reps}",
            disc_probability_bound(c, d, rho),
            est.fraction,
            est.lower,
            est.upper
        )?;
    }
    let (mean, se) = mean_stderr(&dstar);
    let coeffs = expected_disc_bound(d, spec.n as u64, ALPHA, BETA)?;
    let (lo, hi) = (mean - 1.96 * se, mean + 1.96 * se);
    writeln!(
        out,
        "mean_dstar_simple,,{},{mean},{lo},{hi},{reps}",
        coeffs.simple * scale
    )?;
    writeln!(
        out,
        "mean_dstar_tight,,{},{mean},{lo},{hi},{reps}",
        coeffs.tight * scale
    )?;
    Ok(Outcome::Pass)
}
