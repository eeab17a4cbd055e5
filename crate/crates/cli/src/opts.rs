//! Command-line surface and flag parsing.
//!
//! Everything user-facing is declared here:
//!   * the subcommand tree and its flags (clap derive)
//!   * the flat `key=value` config-file merge (flags win over the file)
//!   * parsers for the small textual formats: weight triples, comma lists,
//!     inclusive `lo..hi` ranges, point sources, slope values
//!
//! Values arrive as strings and are validated by the same code paths the
//! library uses, so a bad `--weights` or `--point` produces the library's
//! own diagnostics and the invalid-input exit code.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fatpoints::asymptotics::SValue;
use fatpoints::scheme::{parse_point, parse_point_list, random_points};
use fatpoints::{Error, FatPointScheme, Field, Result, UpstreamPoint, WeightedPlane};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Exact linear-system, cohomology and regularity computations for fat
/// point schemes on weighted projective planes.
#[derive(Debug, Parser)]
#[command(name = "fatpoints", version, max_term_width = 100)]
pub struct Cli {
    /// Worker threads for grid computations (default: one per core).
    /// Outputs are byte-identical for any worker count.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,

    /// Flat key=value file supplying defaults for flags not given on the
    /// command line (multi-point values use `|` between points).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// h0/h1/h2/chi over an inclusive (n, m) grid, as CSV.
    Cohomology(CohomologyArgs),
    /// Regularity of symbolic powers for m = 1..m_max, as CSV.
    Reg(RegArgs),
    /// Defect series sigma(m) = reg(m) - floor(s*m), as CSV.
    Sigma(SigmaArgs),
    /// Search for an effective class with negative self-intersection.
    Negcurve(NegcurveArgs),
    /// Slope report: lower bound, certificate, sigma summary, as JSON.
    Sinv(SinvArgs),
    /// Vanishing probe (--n) or covering scan (--factor), as JSON.
    Nagata(NagataArgs),
    /// Roots-of-unity orbit of a point under the covering map, as JSON.
    SplitDemo(SplitDemoArgs),
    /// Upstream-vs-downstream regularity shift check, as JSON.
    BasechangeCheck(BasechangeArgs),
}

/// Flags shared by every command that builds a fat point scheme.
#[derive(Debug, Args)]
pub struct SchemeOpts {
    /// Weights a,b,c of the plane (pairwise coprime).
    #[arg(long, value_name = "a,b,c")]
    pub weights: String,

    /// One point as x,y,z (all coordinates nonzero); repeatable.
    #[arg(long, value_name = "x,y,z", allow_hyphen_values = true)]
    pub point: Vec<String>,

    /// Alternative point source: `random:<r>` draws r seeded points.
    #[arg(long, value_name = "random:<r>")]
    pub points: Option<String>,

    /// Alternative point source: file with one x,y,z per line
    /// (blank lines and `#` comment lines ignored).
    #[arg(long, value_name = "PATH")]
    pub points_file: Option<PathBuf>,

    /// Multiplicities e_1,...,e_r, one per point (default: all 1).
    #[arg(long, value_name = "e1,...")]
    pub mult: Option<String>,

    /// Coefficient field: `q`, `fp:auto`, or `fp:<prime>`.
    #[arg(long, default_value = "fp:auto")]
    pub field: String,

    /// Seed feeding every random draw of the run.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Output destination and cache flags shared by every command.
#[derive(Debug, Args)]
pub struct IoOpts {
    /// Write the table/report to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Append-only (h0, rank) cache file, or `off`.
    #[arg(long, default_value = "off", value_name = "PATH|off")]
    pub cache: String,
}

#[derive(Debug, Args)]
pub struct CohomologyArgs {
    #[command(flatten)]
    pub scheme: SchemeOpts,

    /// Inclusive degree range, `lo..hi` or a single value.
    #[arg(long, allow_hyphen_values = true, value_name = "lo..hi")]
    pub n: String,

    /// Inclusive power range, `lo..hi` or a single value.
    #[arg(long, value_name = "lo..hi")]
    pub m: String,

    #[command(flatten)]
    pub io: IoOpts,
}

#[derive(Debug, Args)]
pub struct RegArgs {
    #[command(flatten)]
    pub scheme: SchemeOpts,

    /// Largest symbolic power.
    #[arg(long, value_name = "M")]
    pub m_max: u32,

    #[command(flatten)]
    pub io: IoOpts,
}

#[derive(Debug, Args)]
pub struct SigmaArgs {
    #[command(flatten)]
    pub scheme: SchemeOpts,

    /// Slope to measure against: `p`, `p/q`, or `sqrt` for sqrt(abc*u).
    #[arg(long, value_name = "SLOPE")]
    pub s: String,

    /// Largest symbolic power.
    #[arg(long, value_name = "M")]
    pub m_max: u32,

    /// First m of the tail inspected for periodicity (default: m_max/2).
    #[arg(long, value_name = "T")]
    pub tail_start: Option<u32>,

    /// Largest period tried.
    #[arg(long, default_value_t = 8, value_name = "P")]
    pub p_max: u32,

    #[command(flatten)]
    pub io: IoOpts,
}

#[derive(Debug, Args)]
pub struct NegcurveArgs {
    #[command(flatten)]
    pub scheme: SchemeOpts,

    /// Largest multiplicity tried in the search.
    #[arg(long, default_value_t = 8, value_name = "M")]
    pub m_max: u32,

    #[command(flatten)]
    pub io: IoOpts,
}

#[derive(Debug, Args)]
pub struct SinvArgs {
    #[command(flatten)]
    pub scheme: SchemeOpts,

    /// Window size; the report needs at least 2.
    #[arg(long, default_value_t = 8, value_name = "M")]
    pub m_max: u32,

    #[command(flatten)]
    pub io: IoOpts,
}

#[derive(Debug, Args)]
pub struct NagataArgs {
    /// Probe mode: number of random simple points in the ordinary plane.
    #[arg(long, value_name = "N")]
    pub n: Option<usize>,

    /// Probe mode: comma list of powers to check, e.g. `1,2,3`.
    #[arg(long, value_name = "m1,...")]
    pub m: Option<String>,

    /// Probe mode: extra seeded re-draws allowed after a violation.
    #[arg(long, default_value_t = 2, value_name = "K")]
    pub max_redraws: u32,

    /// Covering mode: weights a,b,c of the covered plane.
    #[arg(long, value_name = "a,b,c")]
    pub factor: Option<String>,

    /// Covering mode: number of random simple points downstream.
    #[arg(long, value_name = "R")]
    pub r: Option<usize>,

    /// Covering mode: largest multiplicity scanned.
    #[arg(long, default_value_t = 8, value_name = "M")]
    pub m_max: u32,

    /// Seed feeding every random draw of the run.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Coefficient field; must be a prime field here.
    #[arg(long, default_value = "fp:auto")]
    pub field: String,

    #[command(flatten)]
    pub io: IoOpts,
}

#[derive(Debug, Args)]
pub struct SplitDemoArgs {
    /// Weights a,b,c of the covered plane.
    #[arg(long, value_name = "a,b,c")]
    pub weights: String,

    /// The downstream point's preimage coordinates x,y,z.
    #[arg(long, value_name = "x,y,z", allow_hyphen_values = true)]
    pub point: String,

    /// Exact characteristic; needs abc | p-1.
    #[arg(long, value_name = "P")]
    pub prime: Option<u64>,

    /// Use the smallest admissible prime at or above this floor.
    #[arg(long, value_name = "N")]
    pub prime_floor: Option<u64>,

    #[command(flatten)]
    pub io: IoOpts,
}

#[derive(Debug, Args)]
pub struct BasechangeArgs {
    /// Weights a,b,c of the covered plane.
    #[arg(long, value_name = "a,b,c")]
    pub weights: String,

    /// The downstream point's preimage coordinates x,y,z.
    #[arg(long, value_name = "x,y,z", allow_hyphen_values = true)]
    pub point: String,

    /// Multiplicity of the downstream point.
    #[arg(long, default_value_t = 1, value_name = "e")]
    pub mult: u32,

    /// Exact characteristic; needs abc | p-1.
    #[arg(long, value_name = "P")]
    pub prime: Option<u64>,

    /// Use the smallest admissible prime at or above this floor.
    #[arg(long, value_name = "N")]
    pub prime_floor: Option<u64>,

    /// Largest symbolic power checked.
    #[arg(long, default_value_t = 5, value_name = "M")]
    pub m_max: u32,

    #[command(flatten)]
    pub io: IoOpts,
}

// ---------------------------------------------------------------------------
// Config-file merge
// ---------------------------------------------------------------------------

/// Expands `--config PATH` into extra argv tokens: every `key=value` line
/// becomes `--key value` unless `--key` already appears on the command
/// line.  A `point` key may carry several points separated by `|`.
pub fn merge_config_args(argv: Vec<String>) -> Result<Vec<String>> {
    let mut path: Option<String> = None;
    for (i, tok) in argv.iter().enumerate() {
        if tok == "--config" {
            path = Some(argv.get(i + 1).cloned().ok_or_else(|| {
                Error::invalid("--config needs a file path")
            })?);
        } else if let Some(p) = tok.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::invalid(format!("cannot read config `{path}`: {e}")))?;
    let mut merged = argv;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::invalid(format!(
                "config `{path}` line {}: expected key=value, got `{line}`",
                lineno + 1
            )));
        };
        // Accept both spellings of multi-word keys: m-max and m_max.
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        if key.is_empty() || key == "config" {
            continue;
        }
        let flag = format!("--{key}");
        let assigned = format!("{flag}=");
        if merged.iter().any(|t| *t == flag || t.starts_with(&assigned)) {
            continue; // command line wins
        }
        if key == "point" {
            for part in value.split('|') {
                merged.push(flag.clone());
                merged.push(part.trim().to_string());
            }
        } else {
            merged.push(flag.clone());
            merged.push(value.to_string());
        }
    }
    Ok(merged)
}

// ---------------------------------------------------------------------------
// Small-format parsers
// ---------------------------------------------------------------------------

/// `a,b,c` → validated plane.
pub fn parse_weights(s: &str) -> Result<WeightedPlane> {
    let nums = parse_u32_list(s)?;
    if nums.len() != 3 {
        return Err(Error::invalid(format!(
            "weights `{s}` must be exactly three positive integers"
        )));
    }
    WeightedPlane::new(nums[0], nums[1], nums[2])
}

/// Comma-separated positive integers.
pub fn parse_u32_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::invalid(format!("`{t}` is not a small nonnegative integer")))
        })
        .collect()
}

/// Inclusive `lo..hi` (or single value `k`, meaning `k..k`) over i64.
pub fn parse_i64_range(s: &str) -> Result<std::ops::RangeInclusive<i64>> {
    let parse_end = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| Error::invalid(format!("`{t}` is not an integer")))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse_end(a)?, parse_end(b)?),
        None => {
            let k = parse_end(s)?;
            (k, k)
        }
    };
    if lo > hi {
        return Err(Error::invalid(format!("empty range `{s}` (lo > hi)")));
    }
    Ok(lo..=hi)
}

/// Inclusive `lo..hi` (or single value) over u32.
pub fn parse_u32_range(s: &str) -> Result<std::ops::RangeInclusive<u32>> {
    let r = parse_i64_range(s)?;
    let bound = |x: i64| {
        u32::try_from(x).map_err(|_| Error::invalid(format!("`{x}` must be a small nonnegative integer")))
    };
    Ok(bound(*r.start())?..=bound(*r.end())?)
}

/// `sqrt` → the sqrt(abc*u) marker for this scheme; otherwise `p` or `p/q`.
pub fn parse_slope<F: Field>(s: &str, scheme: &FatPointScheme<F>) -> Result<SValue> {
    if s.trim() == "sqrt" {
        Ok(SValue::sqrt_for(scheme))
    } else {
        SValue::from_ratio_str(s)
    }
}

/// Materializes the point source: explicit `--point`s, a seeded
/// `random:<r>` draw, or a points file.  Exactly one source is accepted.
pub fn resolve_points<F: Field>(
    f: &F,
    plane: &WeightedPlane,
    opts: &SchemeOpts,
) -> Result<Vec<UpstreamPoint<F>>> {
    let sources = usize::from(!opts.point.is_empty())
        + usize::from(opts.points.is_some())
        + usize::from(opts.points_file.is_some());
    if sources == 0 {
        return Err(Error::invalid(
            "no points: use --point x,y,z, --points random:<r>, or --points-file PATH",
        ));
    }
    if sources > 1 {
        return Err(Error::invalid(
            "give exactly one of --point, --points, --points-file",
        ));
    }
    if !opts.point.is_empty() {
        return opts.point.iter().map(|s| parse_point(f, s)).collect();
    }
    if let Some(spec) = &opts.points {
        let r = spec
            .strip_prefix("random:")
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&r| r > 0)
            .ok_or_else(|| {
                Error::invalid(format!("bad --points `{spec}` (expected random:<r>, r >= 1)"))
            })?;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        return random_points(f, plane, r, &mut rng);
    }
    let path = opts.points_file.as_ref().expect("third source");
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::invalid(format!("cannot read points file `{}`: {e}", path.display()))
    })?;
    let pts = parse_point_list(f, &text)?;
    if pts.is_empty() {
        return Err(Error::invalid(format!(
            "points file `{}` contains no points",
            path.display()
        )));
    }
    Ok(pts)
}

/// Builds the scheme from the shared flags.
pub fn build_scheme<F: Field>(f: &F, opts: &SchemeOpts) -> Result<FatPointScheme<F>> {
    let plane = parse_weights(&opts.weights)?;
    let points = resolve_points(f, &plane, opts)?;
    let mults = match &opts.mult {
        Some(s) => parse_u32_list(s)?,
        None => vec![1; points.len()],
    };
    FatPointScheme::new(plane, f.clone(), points, mults)
}
