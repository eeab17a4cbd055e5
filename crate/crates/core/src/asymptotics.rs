//! Asymptotic regularity of the powers of a fat-point scheme.
//!
//! For a fixed scheme and growing uniform power m:
//!   * `a2` / `regularity` — the last degree with nonvanishing first
//!     cohomology and the Castelnuovo-Mumford-style regularity a2 + 2
//!   * `negative_curve_search` — certificate that some effective class
//!     dA - mE has negative self-intersection
//!   * `SValue`, `sigma_series` — the defect sigma(m) = reg(m) - floor(s m)
//!     for a slope s that is either rational (from a negative curve) or
//!     sqrt(abc*u)
//!   * `detect_period` — smallest period of the tail of an integer sequence
//!   * `tau_upper_bound`, `s_invariant` — summary report
//!
//! First cohomology vanishes once n >= abc * m * (sum of multiplicities),
//! so a2(m) is found inside a finite window.  Searching it exhaustively is
//! quadratic in the window; instead we use that for points with all
//! coordinates nonzero, h1(n) = 0 forces h1(n + w) = 0 for each weight w
//! (multiplying by the corresponding variable rescales every jet condition
//! by a unit).  Offsets not reachable as sums of weights are exactly the
//! gaps of the numerical semigroup generated by the weights, and checking
//! those finitely many extra degrees turns "h1 vanishes from n on" into a
//! monotone predicate amenable to binary search.  The naive downward scan
//! is kept as `a2_by_downward_scan` and serves as a cross-check oracle.

use num::rational::BigRational;
use num::{BigInt, ToPrimitive};
use rayon::prelude::*;

use crate::cohomology::{h1, pair, DivisorClass};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::scheme::{FatPointScheme, RankCache};
use crate::plane::WeightedPlane;

/// Upper end of the search window: h1(n, m) = 0 for all
/// n >= abc * m * (sum of multiplicities); the cap is that bound minus one.
pub fn h1_vanishing_cap<F: Field>(scheme: &FatPointScheme<F>, m: u32) -> i64 {
    scheme.plane().abc() as i64 * m as i64 * scheme.mult_sum() as i64 - 1
}

/// Positive integers not representable as non-negative combinations of the
/// weights.  Pairwise coprimality makes the semigroup numerical, and every
/// integer above a*b is representable already by a and b alone, so the
/// search below that bound is exhaustive.
fn gaps_of_weights(plane: &WeightedPlane) -> Vec<i64> {
    let (a, b, c) = plane.weights();
    let bound = a as usize * b as usize;
    let weights = [a as usize, b as usize, c as usize];
    let mut representable = vec![false; bound + 1];
    representable[0] = true;
    for n in 1..=bound {
        representable[n] = weights.iter().any(|&w| n >= w && representable[n - w]);
    }
    (1..=bound)
        .filter(|&n| !representable[n])
        .map(|n| n as i64)
        .collect()
}

/// Largest n with h1(n, m) != 0 (always >= -1 for m >= 1, because below
/// degree zero every condition is unmatched).
///
/// Verifies h1 vanishing at the cap first and reports an invariant
/// violation if it fails, then binary-searches the monotone predicate
/// described in the module docs.
pub fn a2<F: Field>(
    scheme: &FatPointScheme<F>,
    m: u32,
    cache: Option<&dyn RankCache>,
) -> Result<i64> {
    if m == 0 {
        return Err(Error::invalid("a2 needs m >= 1"));
    }
    let cap = h1_vanishing_cap(scheme, m);
    let gaps = gaps_of_weights(scheme.plane());
    // Z(n): h1 vanishes at n and stays zero from n on.  The gap checks
    // cover every offset the +a/+b/+c propagation steps cannot reach.
    let vanishes_from = |n: i64| -> bool {
        h1(scheme, n, m, cache) == 0 && gaps.iter().all(|&g| h1(scheme, n + g, m, cache) == 0)
    };
    if !vanishes_from(cap) {
        return Err(Error::invariant(format!(
            "h1 did not vanish at its cap (m = {m}, cap = {cap})"
        )));
    }
    let mut lo = -1i64; // h1(-1) = L(m) > 0, so Z(-1) is false
    let mut hi = cap; // Z(cap) verified above
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if vanishes_from(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi - 1)
}

/// Reference implementation of `a2`: walk down from the cap and report the
/// first nonvanishing degree.  Quadratic in the window size; used to
/// cross-check the binary search.
pub fn a2_by_downward_scan<F: Field>(
    scheme: &FatPointScheme<F>,
    m: u32,
    cache: Option<&dyn RankCache>,
) -> Result<i64> {
    if m == 0 {
        return Err(Error::invalid("a2 needs m >= 1"));
    }
    let cap = h1_vanishing_cap(scheme, m);
    if h1(scheme, cap, m, cache) != 0 {
        return Err(Error::invariant(format!(
            "h1 did not vanish at its cap (m = {m}, cap = {cap})"
        )));
    }
    for n in (-1..cap).rev() {
        if h1(scheme, n, m, cache) != 0 {
            return Ok(n);
        }
    }
    unreachable!("h1(-1) equals the positive condition count")
}

/// Regularity of the m-th power: a2(m) + 2.
pub fn regularity<F: Field>(
    scheme: &FatPointScheme<F>,
    m: u32,
    cache: Option<&dyn RankCache>,
) -> Result<i64> {
    Ok(a2(scheme, m, cache)? + 2)
}

/// Evidence that the class dA - m0 E is effective with negative
/// self-intersection.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeCurveCertificate {
    pub d: i64,
    pub m0: u32,
    pub self_intersection: BigRational,
    /// abc * u * m0 / d, the slope the curve pins from above.
    pub s_candidate: BigRational,
    pub h0_at_class: usize,
    /// A member of the linear system, rendered as a polynomial.
    pub witness: String,
}

/// Scans m0 = 1..=m_max for the first effective class below the
/// self-intersection-zero threshold: d_min(m0)^2 < abc * u * m0^2
/// (exact integer comparison).
pub fn negative_curve_search<F: Field>(
    scheme: &FatPointScheme<F>,
    m_max: u32,
    cache: Option<&dyn RankCache>,
) -> Option<NegativeCurveCertificate> {
    let abc = scheme.plane().abc();
    let u = scheme.u_invariant();
    for m0 in 1..=m_max {
        let d = scheme.d_min_cached(m0, cache);
        let lhs = (d as u128) * (d as u128);
        let rhs = abc as u128 * u as u128 * (m0 as u128) * (m0 as u128);
        if lhs < rhs {
            let class = DivisorClass::new(d, m0 as i64);
            let forms = scheme.basis_forms(d, m0);
            let witness = forms
                .first()
                .map(|f| f.render(scheme.field()))
                .unwrap_or_default();
            return Some(NegativeCurveCertificate {
                d,
                m0,
                self_intersection: pair(class, class, scheme.plane(), u),
                s_candidate: BigRational::new(
                    BigInt::from(abc * u * m0 as u64),
                    BigInt::from(d),
                ),
                h0_at_class: forms.len(),
                witness,
            });
        }
    }
    None
}

/// The slope against which regularity is measured: an exact rational, or
/// the irrational sqrt(k) handled through exact integer square roots.
#[derive(Debug, Clone, PartialEq)]
pub enum SValue {
    Rational(BigRational),
    SqrtInt(u64),
}

impl SValue {
    /// sqrt(abc * u), the Nagata-style slope used when no negative curve
    /// is known.
    pub fn sqrt_for<F: Field>(scheme: &FatPointScheme<F>) -> SValue {
        SValue::SqrtInt(scheme.plane().abc() * scheme.u_invariant())
    }

    /// Parses a positive rational `p` or `p/q`.
    pub fn from_ratio_str(s: &str) -> Result<SValue> {
        let r: BigRational = s
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad slope `{s}`: expected p or p/q")))?;
        if r <= BigRational::from_integer(BigInt::from(0)) {
            return Err(Error::invalid("slope must be positive"));
        }
        Ok(SValue::Rational(r))
    }

    /// floor(s * m), exactly.
    pub fn floor_mul(&self, m: u32) -> i64 {
        match self {
            SValue::Rational(r) => {
                let scaled = r * BigRational::from_integer(BigInt::from(m));
                scaled
                    .floor()
                    .to_integer()
                    .to_i64()
                    .expect("floor(s*m) fits i64")
            }
            SValue::SqrtInt(k) => {
                let sq = *k as u128 * m as u128 * m as u128;
                sq.isqrt() as i64
            }
        }
    }
}

impl std::fmt::Display for SValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SValue::Rational(r) => write!(f, "{r}"),
            SValue::SqrtInt(k) => write!(f, "sqrt({k})"),
        }
    }
}

/// sigma(m) = reg(m) - floor(s m) and its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SigmaRow {
    pub m: u32,
    pub reg: i64,
    pub floor_sm: i64,
    pub sigma: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSeries {
    pub rows: Vec<SigmaRow>,
}

impl SigmaSeries {
    pub fn sigmas(&self) -> Vec<i64> {
        self.rows.iter().map(|r| r.sigma).collect()
    }

    pub fn max_abs_sigma(&self) -> i64 {
        self.rows.iter().map(|r| r.sigma.abs()).max().unwrap_or(0)
    }
}

/// The defect series for m = 1..=m_max.  Rows are independent and computed
/// in parallel; order and contents do not depend on the worker count.
pub fn sigma_series<F: Field>(
    scheme: &FatPointScheme<F>,
    s: &SValue,
    m_max: u32,
    cache: Option<&dyn RankCache>,
) -> Result<SigmaSeries> {
    if m_max == 0 {
        return Err(Error::invalid("sigma series needs m_max >= 1"));
    }
    let ms: Vec<u32> = (1..=m_max).collect();
    let rows = ms
        .par_iter()
        .map(|&m| -> Result<SigmaRow> {
            let reg = regularity(scheme, m, cache)?;
            let floor_sm = s.floor_mul(m);
            Ok(SigmaRow {
                m,
                reg,
                floor_sm,
                sigma: reg - floor_sm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SigmaSeries { rows })
}

/// Smallest p <= p_max such that values[i] == values[i+p] for every i from
/// tail_start on, requiring the tail to cover at least two full periods.
pub fn detect_period(values: &[i64], tail_start: usize, p_max: u32) -> Option<u32> {
    let n = values.len();
    if tail_start >= n {
        return None;
    }
    for p in 1..=p_max as usize {
        if n - tail_start < 2 * p {
            break;
        }
        if (tail_start..n - p).all(|i| values[i] == values[i + p]) {
            return Some(p as u32);
        }
    }
    None
}

/// min over 1 <= m <= m_max of d_min(m)/m, an upper bound for the
/// asymptotic effectivity threshold.
pub fn tau_upper_bound<F: Field>(
    scheme: &FatPointScheme<F>,
    m_max: u32,
    cache: Option<&dyn RankCache>,
) -> Result<BigRational> {
    if m_max == 0 {
        return Err(Error::invalid("tau bound needs m_max >= 1"));
    }
    let ms: Vec<u32> = (1..=m_max).collect();
    Ok(ms
        .par_iter()
        .map(|&m| {
            BigRational::new(
                BigInt::from(scheme.d_min_cached(m, cache)),
                BigInt::from(m),
            )
        })
        .min()
        .expect("m_max >= 1"))
}

/// Summary of the slope analysis for one scheme.
#[derive(Debug, Clone)]
pub struct SInvariantReport {
    /// abc * u, whose square root is the unconditional lower bound.
    pub abc_u: u64,
    pub certificate: Option<NegativeCurveCertificate>,
    pub s_used: SValue,
    pub series: SigmaSeries,
    pub first_half_max: i64,
    pub second_half_max: i64,
    /// Whether |sigma| on the later half stayed within the earlier half's
    /// maximum — evidence (not proof) of boundedness.
    pub bounded: bool,
    pub period: Option<u32>,
    pub tau_upper: BigRational,
}

/// Runs the negative-curve search, picks the slope it implies (or
/// sqrt(abc*u) without a curve), and measures the sigma series against it.
pub fn s_invariant<F: Field>(
    scheme: &FatPointScheme<F>,
    m_max: u32,
    cache: Option<&dyn RankCache>,
) -> Result<SInvariantReport> {
    if m_max < 2 {
        return Err(Error::invalid("slope report needs m_max >= 2"));
    }
    let abc_u = scheme.plane().abc() * scheme.u_invariant();
    let certificate = negative_curve_search(scheme, m_max, cache);
    let s_used = match &certificate {
        Some(c) => SValue::Rational(c.s_candidate.clone()),
        None => SValue::sqrt_for(scheme),
    };
    let series = sigma_series(scheme, &s_used, m_max, cache)?;
    let mid = (m_max / 2) as usize;
    let first_half_max = series.rows[..mid]
        .iter()
        .map(|r| r.sigma.abs())
        .max()
        .unwrap_or(0);
    let second_half_max = series.rows[mid..]
        .iter()
        .map(|r| r.sigma.abs())
        .max()
        .unwrap_or(0);
    let period = detect_period(&series.sigmas(), mid, 8);
    let tau_upper = tau_upper_bound(scheme, m_max, cache)?;
    Ok(SInvariantReport {
        abc_u,
        certificate,
        s_used,
        series,
        first_half_max,
        second_half_max,
        bounded: second_half_max <= first_half_max,
        period,
        tau_upper,
    })
}
