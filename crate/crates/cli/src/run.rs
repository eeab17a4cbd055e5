//! Command execution: builds schemes from flags, runs the library
//! pipelines, and assembles CSV/JSON output.
//!
//! Conventions shared by every command:
//!   * the full output is assembled as one string and written in a single
//!     call, so identical runs are byte-identical regardless of worker
//!     count or cache state
//!   * tables go to stdout (or `--out`); progress and cache statistics go
//!     to the error stream
//!   * the coefficient field is dispatched once per command, everything
//!     downstream is generic

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fatpoints::asymptotics::{a2, detect_period, negative_curve_search, s_invariant, sigma_series};
use fatpoints::cohomology::cohomology_table;
use fatpoints::field::next_prime_one_mod;
use fatpoints::nagata::{
    basechange_check, nagata_covering_report, nagata_vanishing_probe, orbit_points,
};
use fatpoints::scheme::parse_point;
use fatpoints::{
    Error, Field, FieldSpec, PrimeField, RankCache, Rationals, Result, UpstreamPoint,
};
use rayon::prelude::*;

use crate::cache::FileRankCache;
use crate::opts::{
    build_scheme, parse_i64_range, parse_slope, parse_u32_list, parse_u32_range, parse_weights,
    BasechangeArgs, Cli, CohomologyArgs, Command, NagataArgs, NegcurveArgs, RegArgs, SchemeOpts,
    SigmaArgs, SinvArgs, SplitDemoArgs,
};
use crate::report::{
    covering_json, probe_json, sinv_json, to_json_string, BasechangeJson, BasechangeRowJson,
    CertificateJson, NegcurveJson, SplitJson,
};

/// Applies the global flags and runs the chosen command.
pub fn dispatch(cli: Cli) -> Result<()> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(Error::invalid("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::invalid(format!("cannot size the worker pool: {e}")))?;
    }
    match &cli.command {
        Command::Cohomology(a) => cohomology(a),
        Command::Reg(a) => reg(a),
        Command::Sigma(a) => sigma(a),
        Command::Negcurve(a) => negcurve(a),
        Command::Sinv(a) => sinv(a),
        Command::Nagata(a) => nagata(a),
        Command::SplitDemo(a) => split_demo(a),
        Command::BasechangeCheck(a) => basechange(a),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::invalid(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Error::invalid(format!("cannot write to stdout: {e}")))
        }
    }
}

fn open_cache(spec: &str, scope: &str) -> Result<Option<FileRankCache>> {
    if spec == "off" {
        Ok(None)
    } else {
        FileRankCache::open(Path::new(spec), scope).map(Some)
    }
}

fn as_dyn(cache: &Option<FileRankCache>) -> Option<&dyn RankCache> {
    cache.as_ref().map(|c| c as &dyn RankCache)
}

fn finish(cache: &Option<FileRankCache>, out: &Option<PathBuf>, text: &str) -> Result<()> {
    if let Some(c) = cache {
        c.log_stats();
    }
    write_output(out, text)
}

/// Runs a scheme-based command once the coefficient field is concrete.
fn with_field<T>(
    opts: &SchemeOpts,
    over_q: impl FnOnce(Rationals) -> Result<T>,
    over_fp: impl FnOnce(PrimeField) -> Result<T>,
) -> Result<T> {
    match FieldSpec::parse(&opts.field)? {
        FieldSpec::Rationals => over_q(Rationals),
        FieldSpec::Prime(p) => over_fp(PrimeField::new(p)?),
    }
}

fn render_coords<F: Field>(f: &F, p: &UpstreamPoint<F>) -> [String; 3] {
    let [x, y, z] = p.coords();
    [f.render(x), f.render(y), f.render(z)]
}

fn resolve_prime(prime: Option<u64>, floor: Option<u64>, abc: u64) -> Result<u64> {
    match (prime, floor) {
        (Some(_), Some(_)) => Err(Error::invalid("give --prime or --prime-floor, not both")),
        // Splitting admissibility (abc | p - 1) is enforced where the orbit
        // is built, with a pointed diagnostic.
        (Some(p), None) => Ok(p),
        (None, Some(fl)) => next_prime_one_mod(abc, fl),
        (None, None) => next_prime_one_mod(abc, 1 << 20),
    }
}

// ---------------------------------------------------------------------------
// cohomology
// ---------------------------------------------------------------------------

fn cohomology(args: &CohomologyArgs) -> Result<()> {
    with_field(
        &args.scheme,
        |f| cohomology_typed(&f, args),
        |f| cohomology_typed(&f, args),
    )
}

fn cohomology_typed<F: Field>(f: &F, args: &CohomologyArgs) -> Result<()> {
    let scheme = build_scheme(f, &args.scheme)?;
    let n_range = parse_i64_range(&args.n)?;
    let m_range = parse_u32_range(&args.m)?;
    let cache = open_cache(&args.io.cache, &scheme.canonical_description())?;
    let records = cohomology_table(&scheme, n_range, m_range, as_dyn(&cache));
    let (a, b, c) = scheme.plane().weights();
    let u = scheme.u_invariant();
    let mut text = String::from("a,b,c,u,n,m,h0,h1,h2,chi\n");
    for r in &records {
        writeln!(
            text,
            "{a},{b},{c},{u},{},{},{},{},{},{}",
            r.n, r.m, r.h0, r.h1, r.h2, r.chi
        )
        .expect("string write");
    }
    finish(&cache, &args.io.out, &text)
}

// ---------------------------------------------------------------------------
// reg
// ---------------------------------------------------------------------------

fn reg(args: &RegArgs) -> Result<()> {
    with_field(
        &args.scheme,
        |f| reg_typed(&f, args),
        |f| reg_typed(&f, args),
    )
}

fn reg_typed<F: Field>(f: &F, args: &RegArgs) -> Result<()> {
    if args.m_max == 0 {
        return Err(Error::invalid("--m-max must be at least 1"));
    }
    let scheme = build_scheme(f, &args.scheme)?;
    let cache = open_cache(&args.io.cache, &scheme.canonical_description())?;
    let ms: Vec<u32> = (1..=args.m_max).collect();
    let rows: Vec<(u32, i64)> = ms
        .par_iter()
        .map(|&m| Ok((m, a2(&scheme, m, as_dyn(&cache))?)))
        .collect::<Result<_>>()?;
    let mut text = String::from("m,a2,reg\n");
    for (m, a2_value) in rows {
        writeln!(text, "{m},{a2_value},{}", a2_value + 2).expect("string write");
    }
    finish(&cache, &args.io.out, &text)
}

// ---------------------------------------------------------------------------
// sigma
// ---------------------------------------------------------------------------

fn sigma(args: &SigmaArgs) -> Result<()> {
    with_field(
        &args.scheme,
        |f| sigma_typed(&f, args),
        |f| sigma_typed(&f, args),
    )
}

fn sigma_typed<F: Field>(f: &F, args: &SigmaArgs) -> Result<()> {
    let scheme = build_scheme(f, &args.scheme)?;
    let slope = parse_slope(&args.s, &scheme)?;
    let tail_start = args.tail_start.unwrap_or((args.m_max / 2).max(1));
    if tail_start == 0 || tail_start >= args.m_max {
        return Err(Error::invalid(format!(
            "--tail-start {tail_start} must satisfy 1 <= tail-start < m-max"
        )));
    }
    let cache = open_cache(&args.io.cache, &scheme.canonical_description())?;
    let series = sigma_series(&scheme, &slope, args.m_max, as_dyn(&cache))?;
    let mut text = String::from("m,reg,floor_sm,sigma\n");
    for r in &series.rows {
        writeln!(text, "{},{},{},{}", r.m, r.reg, r.floor_sm, r.sigma).expect("string write");
    }
    // Row m sits at index m - 1.
    let period = detect_period(&series.sigmas(), (tail_start - 1) as usize, args.p_max);
    let period_text = match period {
        Some(p) => p.to_string(),
        None => format!("none found (p <= {})", args.p_max),
    };
    eprintln!(
        "sigma: s = {slope}, max|sigma| = {}, period on m >= {tail_start}: {period_text}",
        series.max_abs_sigma()
    );
    finish(&cache, &args.io.out, &text)
}

// ---------------------------------------------------------------------------
// negcurve
// ---------------------------------------------------------------------------

fn negcurve(args: &NegcurveArgs) -> Result<()> {
    with_field(
        &args.scheme,
        |f| negcurve_typed(&f, args),
        |f| negcurve_typed(&f, args),
    )
}

fn negcurve_typed<F: Field>(f: &F, args: &NegcurveArgs) -> Result<()> {
    if args.m_max == 0 {
        return Err(Error::invalid("--m-max must be at least 1"));
    }
    let scheme = build_scheme(f, &args.scheme)?;
    let cache = open_cache(&args.io.cache, &scheme.canonical_description())?;
    let certificate = negative_curve_search(&scheme, args.m_max, as_dyn(&cache));
    let (a, b, c) = scheme.plane().weights();
    let u = scheme.u_invariant();
    let json = NegcurveJson {
        weights: [a, b, c],
        u,
        abcu: scheme.plane().abc() * u,
        m_max: args.m_max,
        certificate: certificate.as_ref().map(CertificateJson::from),
    };
    finish(&cache, &args.io.out, &to_json_string(&json))
}

// ---------------------------------------------------------------------------
// sinv
// ---------------------------------------------------------------------------

fn sinv(args: &SinvArgs) -> Result<()> {
    with_field(
        &args.scheme,
        |f| sinv_typed(&f, args),
        |f| sinv_typed(&f, args),
    )
}

fn sinv_typed<F: Field>(f: &F, args: &SinvArgs) -> Result<()> {
    let scheme = build_scheme(f, &args.scheme)?;
    let cache = open_cache(&args.io.cache, &scheme.canonical_description())?;
    let report = s_invariant(&scheme, args.m_max, as_dyn(&cache))?;
    let json = sinv_json(scheme.plane().weights(), &report);
    finish(&cache, &args.io.out, &to_json_string(&json))
}

// ---------------------------------------------------------------------------
// nagata
// ---------------------------------------------------------------------------

fn nagata(args: &NagataArgs) -> Result<()> {
    let modulus = match FieldSpec::parse(&args.field)? {
        FieldSpec::Prime(p) => p,
        FieldSpec::Rationals => {
            return Err(Error::invalid(
                "nagata needs a prime field: use --field fp:auto or fp:<prime>",
            ))
        }
    };
    let field = PrimeField::new(modulus)?;
    match (&args.factor, args.n) {
        (Some(_), Some(_)) => Err(Error::invalid(
            "give --factor (covering mode) or --n (probe mode), not both",
        )),
        (None, None) => Err(Error::invalid(
            "nagata needs --n <points> (probe mode) or --factor a,b,c (covering mode)",
        )),
        (None, Some(n_points)) => {
            let m_spec = args
                .m
                .as_ref()
                .ok_or_else(|| Error::invalid("probe mode needs --m m1,m2,..."))?;
            let m_list = parse_u32_list(m_spec)?;
            if args.io.cache != "off" {
                eprintln!("note: the probe recomputes every rank; --cache is ignored here");
            }
            let report =
                nagata_vanishing_probe(n_points, &m_list, args.seed, &field, args.max_redraws)?;
            write_output(
                &args.io.out,
                &to_json_string(&probe_json(&report, args.max_redraws)),
            )
        }
        (Some(factor), None) => {
            let plane = parse_weights(factor)?;
            let r = args
                .r
                .ok_or_else(|| Error::invalid("covering mode needs --r <points>"))?;
            // The point set is a deterministic function of (weights, r,
            // seed, field), so that tuple is a sound cache scope.
            let scope = format!(
                "covering;weights={},{},{};r={r};seed={};field={}",
                plane.weights().0,
                plane.weights().1,
                plane.weights().2,
                args.seed,
                field.description(),
            );
            let cache = open_cache(&args.io.cache, &scope)?;
            let report = nagata_covering_report(
                &plane,
                r,
                args.seed,
                args.m_max,
                &field,
                as_dyn(&cache),
            )?;
            finish(&cache, &args.io.out, &to_json_string(&covering_json(&report)))
        }
    }
}

// ---------------------------------------------------------------------------
// split-demo
// ---------------------------------------------------------------------------

fn split_demo(args: &SplitDemoArgs) -> Result<()> {
    let plane = parse_weights(&args.weights)?;
    let p = resolve_prime(args.prime, args.prime_floor, plane.abc())?;
    let field = PrimeField::new(p)?;
    let point = parse_point(&field, &args.point)?;
    let orbit = orbit_points(&plane, &point, &field)?;
    let (a, b, c) = plane.weights();
    let json = SplitJson {
        weights: [a, b, c],
        prime: p,
        point: render_coords(&field, &point),
        orbit_size: orbit.len(),
        orbit: orbit.iter().map(|q| render_coords(&field, q)).collect(),
    };
    write_output(&args.io.out, &to_json_string(&json))
}

// ---------------------------------------------------------------------------
// basechange-check
// ---------------------------------------------------------------------------

fn basechange(args: &BasechangeArgs) -> Result<()> {
    if args.m_max == 0 {
        return Err(Error::invalid("--m-max must be at least 1"));
    }
    let plane = parse_weights(&args.weights)?;
    let p = resolve_prime(args.prime, args.prime_floor, plane.abc())?;
    let field = PrimeField::new(p)?;
    let point = parse_point(&field, &args.point)?;
    let ms: Vec<u32> = (1..=args.m_max).collect();
    let rows: Vec<BasechangeRowJson> = ms
        .par_iter()
        .map(|&m| {
            basechange_check(&plane, &point, args.mult, &field, m)
                .map(|rec| BasechangeRowJson::from(&rec))
        })
        .collect::<Result<_>>()?;
    let all_hold = rows.iter().all(|r| r.holds);
    let (a, b, c) = plane.weights();
    let json = BasechangeJson {
        weights: [a, b, c],
        prime: p,
        point: render_coords(&field, &point),
        mult: args.mult,
        shift: plane.kappa() as i64 - 3,
        rows,
        all_hold,
    };
    write_output(&args.io.out, &to_json_string(&json))
}
