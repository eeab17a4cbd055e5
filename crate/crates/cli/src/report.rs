//! JSON shapes for the report-producing commands.
//!
//! Exact rationals are serialized as reduced-fraction strings ("3",
//! "-1/3", "29/5") so no consumer is tempted to read them as floats;
//! counts and degrees stay plain integers.  Conversions from the library's
//! report types live here so the command layer only assembles and writes.

use fatpoints::asymptotics::{NegativeCurveCertificate, SInvariantReport, SigmaRow};
use fatpoints::nagata::{BaseChangeRecord, NagataCoveringReport, NagataProbeReport};
use num::{BigInt, BigRational};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct CertificateJson {
    pub d: i64,
    pub m0: u32,
    pub self_intersection: String,
    pub s_candidate: String,
    pub h0_at_class: usize,
    pub witness: String,
}

impl From<&NegativeCurveCertificate> for CertificateJson {
    fn from(c: &NegativeCurveCertificate) -> Self {
        CertificateJson {
            d: c.d,
            m0: c.m0,
            self_intersection: c.self_intersection.to_string(),
            s_candidate: c.s_candidate.to_string(),
            h0_at_class: c.h0_at_class,
            witness: c.witness.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct NegcurveJson {
    pub weights: [u32; 3],
    pub u: u64,
    pub abcu: u64,
    pub m_max: u32,
    pub certificate: Option<CertificateJson>,
}

#[derive(Debug, Serialize)]
pub struct SinvRowJson {
    pub m: u32,
    pub reg: i64,
    /// reg/m as a reduced fraction.
    pub ratio: String,
    pub floor_sm: i64,
    pub sigma: i64,
}

impl From<&SigmaRow> for SinvRowJson {
    fn from(r: &SigmaRow) -> Self {
        SinvRowJson {
            m: r.m,
            reg: r.reg,
            ratio: BigRational::new(BigInt::from(r.reg), BigInt::from(r.m)).to_string(),
            floor_sm: r.floor_sm,
            sigma: r.sigma,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SinvJson {
    pub weights: [u32; 3],
    pub abcu: u64,
    /// Square of the universal lower bound sqrt(abcu).
    pub s_lower_bound_sq: u64,
    pub certificate: Option<CertificateJson>,
    /// The slope the series is measured against.
    pub s_used: String,
    pub reg_over_m: Vec<SinvRowJson>,
    pub max_abs_sigma_first_half: i64,
    pub max_abs_sigma_second_half: i64,
    pub period: Option<u32>,
    pub tau_upper_bound: String,
    pub verdict: String,
}

pub fn sinv_json(weights: (u32, u32, u32), report: &SInvariantReport) -> SinvJson {
    let verdict = if report.bounded {
        format!(
            "consistent: max|sigma| on the second half of the window ({}) \
             stayed within the first half's maximum ({})",
            report.second_half_max, report.first_half_max
        )
    } else {
        format!(
            "inconsistent on this window: max|sigma| grew from {} to {}; \
             enlarge m_max to judge boundedness",
            report.first_half_max, report.second_half_max
        )
    };
    SinvJson {
        weights: [weights.0, weights.1, weights.2],
        abcu: report.abc_u,
        s_lower_bound_sq: report.abc_u,
        certificate: report.certificate.as_ref().map(CertificateJson::from),
        s_used: report.s_used.to_string(),
        reg_over_m: report.series.rows.iter().map(SinvRowJson::from).collect(),
        max_abs_sigma_first_half: report.first_half_max,
        max_abs_sigma_second_half: report.second_half_max,
        period: report.period,
        tau_upper_bound: report.tau_upper.to_string(),
        verdict,
    }
}

#[derive(Debug, Serialize)]
pub struct ViolationJson {
    pub d: i64,
    pub h0: usize,
}

#[derive(Debug, Serialize)]
pub struct ProbeRowJson {
    pub m: u32,
    pub d_limit: i64,
    pub violation: Option<ViolationJson>,
}

#[derive(Debug, Serialize)]
pub struct ProbeAttemptJson {
    pub attempt: u32,
    pub seed: u64,
    pub passed: bool,
    pub rows: Vec<ProbeRowJson>,
}

#[derive(Debug, Serialize)]
pub struct ProbeJson {
    pub mode: &'static str,
    pub n_points: usize,
    pub prime: u64,
    pub base_seed: u64,
    pub max_redraws: u32,
    pub attempts: Vec<ProbeAttemptJson>,
    pub passed: bool,
}

pub fn probe_json(report: &NagataProbeReport, max_redraws: u32) -> ProbeJson {
    ProbeJson {
        mode: "probe",
        n_points: report.n_points,
        prime: report.prime,
        base_seed: report.base_seed,
        max_redraws,
        attempts: report
            .attempts
            .iter()
            .map(|a| ProbeAttemptJson {
                attempt: a.attempt,
                seed: a.seed,
                passed: a.passed,
                rows: a
                    .rows
                    .iter()
                    .map(|r| ProbeRowJson {
                        m: r.m,
                        d_limit: r.d_limit,
                        violation: r.violation.map(|(d, h0)| ViolationJson { d, h0 }),
                    })
                    .collect(),
            })
            .collect(),
        passed: report.passed,
    }
}

#[derive(Debug, Serialize)]
pub struct PerMJson {
    pub m: u32,
    pub d_min: i64,
    /// abc * u * m^2, the square of the effectivity threshold.
    pub sqrt_bound_sq: u64,
    /// Whether d_min^2 is strictly below the threshold square.
    pub negative: bool,
}

#[derive(Debug, Serialize)]
pub struct CoveringJson {
    pub mode: &'static str,
    pub weights: [u32; 3],
    pub r: usize,
    /// abc * r, the point count Nagata's statement would concern.
    pub n_points: u64,
    pub seed: u64,
    pub prime: u64,
    pub u: u64,
    pub per_m: Vec<PerMJson>,
    pub certificate: Option<CertificateJson>,
    pub verdict: String,
}

pub fn covering_json(report: &NagataCoveringReport) -> CoveringJson {
    let (a, b, c) = report.weights;
    CoveringJson {
        mode: "covering",
        weights: [a, b, c],
        r: report.r,
        n_points: u64::from(a) * u64::from(b) * u64::from(c) * report.r as u64,
        seed: report.seed,
        prime: report.prime,
        u: report.u,
        per_m: report
            .rows
            .iter()
            .map(|r| PerMJson {
                m: r.m,
                d_min: r.d_min,
                sqrt_bound_sq: u64::try_from(r.bound_sq).expect("desk-scale threshold"),
                negative: r.below,
            })
            .collect(),
        certificate: report.certificate.as_ref().map(CertificateJson::from),
        verdict: report.verdict.clone(),
    }
}

#[derive(Debug, Serialize)]
pub struct SplitJson {
    pub weights: [u32; 3],
    pub prime: u64,
    pub point: [String; 3],
    pub orbit_size: usize,
    pub orbit: Vec<[String; 3]>,
}

#[derive(Debug, Serialize)]
pub struct BasechangeRowJson {
    pub m: u32,
    pub downstream_reg: i64,
    pub upstream_reg: i64,
    pub holds: bool,
}

impl From<&BaseChangeRecord> for BasechangeRowJson {
    fn from(r: &BaseChangeRecord) -> Self {
        BasechangeRowJson {
            m: r.m,
            downstream_reg: r.downstream_reg,
            upstream_reg: r.upstream_reg,
            holds: r.holds,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BasechangeJson {
    pub weights: [u32; 3],
    pub prime: u64,
    pub point: [String; 3],
    pub mult: u32,
    /// a + b + c - 3, the expected upstream-minus-downstream difference.
    pub shift: i64,
    pub rows: Vec<BasechangeRowJson>,
    pub all_hold: bool,
}

/// Pretty JSON with a trailing newline — the single serialization point,
/// so identical reports are identical bytes.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize infallibly");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificate_serializes_rationals_as_strings() {
        let cert = NegativeCurveCertificate {
            d: 2,
            m0: 1,
            self_intersection: BigRational::new(BigInt::from(-1), BigInt::from(3)),
            s_candidate: BigRational::from_integer(BigInt::from(3)),
            h0_at_class: 1,
            witness: "x^2 - y".into(),
        };
        let json = to_json_string(&CertificateJson::from(&cert));
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["d"], 2);
        assert_eq!(v["self_intersection"], "-1/3");
        assert_eq!(v["s_candidate"], "3");
        assert_eq!(v["witness"], "x^2 - y");
        assert!(json.ends_with('\n'));
    }

    #[test]
    fn ratio_strings_reduce() {
        let row = SigmaRow {
            m: 4,
            reg: 10,
            floor_sm: 12,
            sigma: -2,
        };
        let json = SinvRowJson::from(&row);
        assert_eq!(json.ratio, "5/2");
        let whole = SinvRowJson::from(&SigmaRow {
            m: 2,
            reg: 4,
            floor_sm: 6,
            sigma: -2,
        });
        assert_eq!(whole.ratio, "2");
    }
}
