//! Acceptance gate: twelve end-to-end checks, one per release criterion.
//!
//! Every test prints exactly one `[PASS]`/`[FAIL]` line (visible with
//! `--nocapture`, and always visible on failure) and then asserts, so the
//! suite both documents and enforces the bar.  All comparisons are exact —
//! integers, rationals, or byte equality — with no tolerances anywhere.

use std::process::Command;

use fatpoints::asymptotics::{
    a2, detect_period, h1_vanishing_cap, negative_curve_search, regularity, sigma_series, SValue,
};
use fatpoints::cohomology::{chi_riemann_roch, cohomology_table, h1, h2, CohomologyRecord};
use fatpoints::field::is_prime;
use fatpoints::nagata::{basechange_check, nagata_vanishing_probe, orbit_invariant_h0, orbit_points};
use fatpoints::scheme::{images_equal, WeightedForm};
use fatpoints::{
    FatPointScheme, Field, MemoryRankCache, Monomial, PrimeField, Rationals, UpstreamPoint,
    WeightedPlane, DEFAULT_PRIME,
};
use num::{BigInt, BigRational};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(criterion: u32, ok: bool, detail: &str) {
    println!(
        "[{}] criterion {criterion}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn plane(a: u32, b: u32, c: u32) -> WeightedPlane {
    WeightedPlane::new(a, b, c).unwrap()
}

fn fp_point(f: &PrimeField, x: u64, y: u64, z: u64) -> UpstreamPoint<PrimeField> {
    UpstreamPoint::new(f, [f.from_u64(x), f.from_u64(y), f.from_u64(z)]).unwrap()
}

fn fp_scheme(
    a: u32,
    b: u32,
    c: u32,
    modulus: u64,
    pts: &[[u64; 3]],
    mults: &[u32],
) -> FatPointScheme<PrimeField> {
    let f = PrimeField::new(modulus).unwrap();
    let points = pts.iter().map(|p| fp_point(&f, p[0], p[1], p[2])).collect();
    FatPointScheme::new(plane(a, b, c), f, points, mults.to_vec()).unwrap()
}

fn q_scheme(a: u32, b: u32, c: u32, pts: &[[i64; 3]], mults: &[u32]) -> FatPointScheme<Rationals> {
    let f = Rationals;
    let points = pts
        .iter()
        .map(|p| {
            UpstreamPoint::new(&f, [f.from_i64(p[0]), f.from_i64(p[1]), f.from_i64(p[2])]).unwrap()
        })
        .collect();
    FatPointScheme::new(plane(a, b, c), f, points, mults.to_vec()).unwrap()
}

/// Scalar-free comparison: same monomial support and cross-multiplied
/// coefficient equality against an integer reference form.
fn proportional_to<F: Field>(
    f: &F,
    form: &WeightedForm<F>,
    reference: &[(Monomial, i64)],
) -> bool {
    if form.terms.len() != reference.len() {
        return false;
    }
    let coeff_of = |mono: &Monomial| -> Option<&F::Elem> {
        form.terms.iter().find(|(m, _)| m == mono).map(|(_, c)| c)
    };
    let Some(c0) = coeff_of(&reference[0].0) else {
        return false;
    };
    let r0 = f.from_i64(reference[0].1);
    reference.iter().all(|(mono, r)| match coeff_of(mono) {
        // c / c0 == r / r0  <=>  c * r0 == c0 * r, with no divisions.
        Some(c) => f.mul(c, &r0) == f.mul(c0, &f.from_i64(*r)),
        None => false,
    })
}

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let mut acc = 1i64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[test]
fn criterion_01_single_fat_point_closed_form() {
    // One point of multiplicity m in the ordinary plane imposes independent
    // conditions from degree m - 1 on: h0(n, m) = C(n+2,2) - C(m+1,2),
    // clamped at zero.
    let scheme = fp_scheme(1, 1, 1, DEFAULT_PRIME, &[[1, 1, 1]], &[1]);
    let mut checked = 0usize;
    let mut ok = true;
    'grid: for m in 0i64..=12 {
        for n in (m - 1)..=12 {
            let expected = (binom(n + 2, 2) - binom(m + 1, 2)).max(0) as usize;
            let got = scheme.h0(n, m as u32);
            checked += 1;
            if got != expected {
                ok = false;
                break 'grid;
            }
        }
    }
    verdict(
        1,
        ok && checked == 104,
        &format!("closed-form h0 on the ordinary plane, {checked} cells exact"),
    );
}

#[test]
fn criterion_02_riemann_roch_on_cartier_classes() {
    // chi assembled from counts must equal the Riemann-Roch value on every
    // Cartier class n = abc * t.
    let mut cells = 0usize;
    let mut ok = true;
    for (a, b, c) in [(1, 1, 1), (1, 2, 3), (2, 3, 5)] {
        let scheme = fp_scheme(a, b, c, DEFAULT_PRIME, &[[1, 1, 1]], &[1]);
        let cache = MemoryRankCache::new();
        let abc = scheme.plane().abc() as i64;
        'scheme: for t in -10i64..=20 {
            let n = abc * t;
            for m in 0u32..=8 {
                let (h0_val, rank) = scheme.h0_and_rank_cached(n, m, Some(&cache));
                let h1_val = scheme.conditions(m) - rank;
                let h2_val = h2(scheme.plane(), n);
                let chi = h0_val as i64 - h1_val as i64 + h2_val as i64;
                let rr = chi_riemann_roch(scheme.plane(), scheme.multiplicities(), n, m);
                cells += 1;
                if BigRational::from_integer(BigInt::from(chi)) != rr {
                    ok = false;
                    break 'scheme;
                }
            }
        }
    }
    verdict(
        2,
        ok && cells == 3 * 31 * 9,
        &format!("chi == Riemann-Roch chi on {cells} Cartier cells, exact"),
    );
}

#[test]
fn criterion_03_h1_cap_vanishing() {
    // h1 vanishes at n = abc * m * sum(e) - 1 and one Cartier step above.
    let schemes: Vec<FatPointScheme<PrimeField>> = vec![
        fp_scheme(1, 1, 1, DEFAULT_PRIME, &[[1, 1, 1]], &[1]),
        fp_scheme(1, 2, 3, DEFAULT_PRIME, &[[1, 1, 1]], &[1]),
        fp_scheme(2, 3, 5, DEFAULT_PRIME, &[[1, 1, 1]], &[1]),
        fp_scheme(1, 2, 3, DEFAULT_PRIME, &[[1, 1, 1], [2, 1, 1]], &[1, 2]),
    ];
    let mut ok = true;
    let mut checked = 0usize;
    'all: for scheme in &schemes {
        let cache = MemoryRankCache::new();
        let abc = scheme.plane().abc() as i64;
        for m in 1u32..=10 {
            let cap = h1_vanishing_cap(scheme, m);
            for n in [cap, cap + abc] {
                checked += 1;
                if h1(scheme, n, m, Some(&cache)) != 0 {
                    ok = false;
                    break 'all;
                }
            }
        }
    }
    verdict(
        3,
        ok && checked == 4 * 10 * 2,
        &format!("h1 = 0 at the cap and cap + abc, {checked} checks exact"),
    );
}

#[test]
fn criterion_04_h2_vanishing_above_minus_kappa() {
    // h2(n) = 0 for every n > -(a+b+c), with value exactly 1 at the corner.
    let mut ok = true;
    let mut checked = 0usize;
    for (a, b, c) in [(1u32, 1, 1), (1, 2, 3), (2, 3, 5)] {
        let pl = plane(a, b, c);
        let kappa = pl.kappa() as i64;
        ok &= h2(&pl, -kappa) == 1;
        for n in (1 - kappa)..=(3 * pl.abc() as i64) {
            checked += 1;
            ok &= h2(&pl, n) == 0;
        }
    }
    verdict(
        4,
        ok,
        &format!("h2 corner value 1 and {checked} vanishing degrees, three planes"),
    );
}

#[test]
fn criterion_05_monomial_curve_golden_case() {
    // The (1,2,3) golden case end to end: certificate, witness curve,
    // regularity values, bounded sigma window, detected period.
    let scheme = fp_scheme(1, 2, 3, DEFAULT_PRIME, &[[1, 1, 1]], &[1]);
    let cache = MemoryRankCache::new();
    let mut ok = true;
    let mut notes: Vec<String> = Vec::new();

    let cert = negative_curve_search(&scheme, 5, Some(&cache)).expect("certificate exists");
    ok &= (cert.d, cert.m0) == (2, 1);
    ok &= cert.self_intersection == BigRational::new(BigInt::from(-1), BigInt::from(3));
    ok &= cert.s_candidate == BigRational::from_integer(BigInt::from(3));
    ok &= cert.h0_at_class == 1;
    notes.push(format!("certificate ({},{})", cert.d, cert.m0));

    // Witness proportional to x^2 - y, checked on coefficients.
    let forms = scheme.basis_forms(2, 1);
    ok &= forms.len() == 1
        && proportional_to(
            scheme.field(),
            &forms[0],
            &[(Monomial::new(2, 0, 0), 1), (Monomial::new(0, 1, 0), -1)],
        );

    // The certified slope exceeds sqrt(abc * u) as exact rationals, and the
    // pairing of the curve class with the boundary slope is exactly zero.
    let abcu = scheme.plane().abc() * scheme.u_invariant();
    ok &= &cert.s_candidate * &cert.s_candidate > BigRational::from_integer(BigInt::from(abcu));
    let boundary = BigRational::from_integer(BigInt::from(cert.d)) * &cert.s_candidate
        / BigRational::from_integer(BigInt::from(scheme.plane().abc()))
        - BigRational::from_integer(BigInt::from(cert.m0 as u64 * scheme.u_invariant()));
    ok &= boundary == BigRational::from_integer(BigInt::from(0));

    ok &= regularity(&scheme, 1, Some(&cache)).unwrap() == 1;
    ok &= regularity(&scheme, 2, Some(&cache)).unwrap() == 4;

    let s = SValue::Rational(BigRational::from_integer(BigInt::from(3)));
    let series_full = sigma_series(&scheme, &s, 30, Some(&cache)).unwrap();
    let series_short = sigma_series(&scheme, &s, 20, Some(&cache)).unwrap();
    ok &= series_full.max_abs_sigma() == series_short.max_abs_sigma();
    notes.push(format!("max|sigma| = {}", series_full.max_abs_sigma()));

    // Period on the tail m >= 10 (index 9), computed not assumed.
    let period = detect_period(&series_full.sigmas(), 9, 6);
    ok &= matches!(period, Some(p) if p <= 6);
    notes.push(format!("period = {:?}", period));

    verdict(5, ok, &notes.join(", "));
}

#[test]
fn criterion_06_2_3_5_golden_case() {
    let scheme = fp_scheme(2, 3, 5, DEFAULT_PRIME, &[[1, 1, 1]], &[1]);
    let cert = negative_curve_search(&scheme, 5, None).expect("certificate exists");
    let mut ok = (cert.d, cert.m0) == (5, 1);
    ok &= cert.s_candidate == BigRational::from_integer(BigInt::from(6));
    let forms = scheme.basis_forms(5, 1);
    ok &= forms.len() == 1
        && proportional_to(
            scheme.field(),
            &forms[0],
            &[(Monomial::new(1, 1, 0), 1), (Monomial::new(0, 0, 1), -1)],
        );
    let abcu = scheme.plane().abc() * scheme.u_invariant();
    ok &= &cert.s_candidate * &cert.s_candidate > BigRational::from_integer(BigInt::from(abcu));
    verdict(
        6,
        ok,
        "certificate (5,1) with slope 6 and witness proportional to x*y - z",
    );
}

#[test]
fn criterion_07_basechange_regularity_shift() {
    // Upstream orbit regularity equals downstream regularity plus
    // a + b + c - 3, both sides computed independently, m = 1..5.
    let pl = plane(1, 2, 3);
    let f = PrimeField::new(7).unwrap();
    let base = fp_point(&f, 1, 1, 1);
    let mut ok = true;
    let mut rows = Vec::new();
    for m in 1u32..=5 {
        let rec = basechange_check(&pl, &base, 1, &f, m).unwrap();
        ok &= rec.shift == 3;
        ok &= rec.holds;
        ok &= rec.upstream_reg == rec.downstream_reg + 3;
        rows.push(format!("{}+3={}", rec.downstream_reg, rec.upstream_reg));
    }
    verdict(7, ok, &format!("shift identity over F_7: {}", rows.join(", ")));
}

#[test]
fn criterion_08_orbit_cardinality_and_distinctness() {
    let mut ok = true;
    let mut notes = Vec::new();
    for (a, b, c, p) in [(1u32, 2, 3, 7u64), (2, 3, 5, 31)] {
        let pl = plane(a, b, c);
        let f = PrimeField::new(p).unwrap();
        let base = fp_point(&f, 1, 1, 1);
        let orbit = orbit_points(&pl, &base, &f).unwrap();
        let expected = pl.abc() as usize;
        ok &= orbit.len() == expected;
        // Independently re-verify pairwise distinct images and (A2).
        let ordinary = plane(1, 1, 1);
        for i in 0..orbit.len() {
            ok &= orbit[i].coords().iter().all(|x| !f.is_zero(x));
            for j in (i + 1)..orbit.len() {
                ok &= !images_equal(&f, &ordinary, orbit[i].coords(), orbit[j].coords());
            }
        }
        notes.push(format!("({a},{b},{c})/F_{p}: {} points", orbit.len()));
    }
    verdict(8, ok, &notes.join("; "));
}

#[test]
fn criterion_09_covering_shortcut_oracle() {
    // Downstream h0 must equal the invariant-monomial computation on the
    // full orbit, cell by cell.
    let pl = plane(1, 2, 3);
    let f = PrimeField::new(7).unwrap();
    let base = fp_point(&f, 1, 1, 1);
    let downstream = FatPointScheme::new(pl, f, vec![base.clone()], vec![1]).unwrap();
    let mut ok = true;
    let mut cells = 0usize;
    'grid: for n in 0i64..=12 {
        for m in 0u32..=3 {
            cells += 1;
            let down = downstream.h0(n, m);
            let up = orbit_invariant_h0(&pl, &base, 1, &f, n, m).unwrap();
            if down != up {
                ok = false;
                break 'grid;
            }
        }
    }
    verdict(
        9,
        ok && cells == 13 * 4,
        &format!("downstream h0 == orbit-invariant h0 on {cells} cells over F_7"),
    );
}

#[test]
fn criterion_10_nagata_probe_sanity() {
    let f = PrimeField::new(DEFAULT_PRIME).unwrap();

    // Sixteen points: a perfect square, so the vanishing holds; redraws
    // (if any) are part of the recorded report.
    let pass_report = nagata_vanishing_probe(16, &[1, 2, 3], 2024, &f, 2).unwrap();
    let mut ok = pass_report.passed;
    ok &= !pass_report.attempts.is_empty();
    ok &= pass_report.attempts.last().unwrap().passed;

    // Nine points: the cubic through them is unavoidable, every attempt
    // must report the violation at exactly d = 3.
    let fail_report = nagata_vanishing_probe(9, &[1], 2024, &f, 1).unwrap();
    ok &= !fail_report.passed;
    ok &= fail_report.attempts.len() == 2;
    for attempt in &fail_report.attempts {
        let row = &attempt.rows[0];
        ok &= row.d_limit == 3;
        ok &= matches!(row.violation, Some((3, h0)) if h0 >= 1);
    }
    verdict(
        10,
        ok,
        &format!(
            "16 points pass m <= 3 (attempts: {}); 9 points violate at d = 3 in all attempts",
            pass_report.attempts.len()
        ),
    );
}

fn seeded_prime_60(seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = 1u64 << 59;
    let mut x = lo + (rng.next_u64() % lo);
    if x % 2 == 0 {
        x += 1;
    }
    while !is_prime(x) {
        x += 2;
    }
    x
}

#[test]
fn criterion_11_field_agreement_on_golden_tables() {
    // Identical cohomology tables over the rationals and over three seeded
    // random 60-bit prime fields.
    let grids: [(u32, u32, u32, i64, u32); 3] =
        [(1, 1, 1, 12, 4), (1, 2, 3, 18, 3), (2, 3, 5, 30, 2)];
    let primes: Vec<u64> = [7401u64, 7402, 7403].iter().map(|&s| seeded_prime_60(s)).collect();
    let mut ok = true;
    let mut compared = 0usize;
    'all: for &(a, b, c, n_max, m_max) in &grids {
        let over_q: Vec<CohomologyRecord> = cohomology_table(
            &q_scheme(a, b, c, &[[1, 1, 1]], &[1]),
            0..=n_max,
            0..=m_max,
            None,
        );
        for &p in &primes {
            let over_fp = cohomology_table(
                &fp_scheme(a, b, c, p, &[[1, 1, 1]], &[1]),
                0..=n_max,
                0..=m_max,
                None,
            );
            compared += over_fp.len();
            if over_q != over_fp {
                ok = false;
                break 'all;
            }
        }
        // Regularity agrees as well on the middle-size grid.
        if (a, b, c) == (1, 2, 3) {
            for m in 1u32..=3 {
                let rq = a2(&q_scheme(a, b, c, &[[1, 1, 1]], &[1]), m, None).unwrap();
                for &p in &primes {
                    let rp = a2(&fp_scheme(a, b, c, p, &[[1, 1, 1]], &[1]), m, None).unwrap();
                    if rq != rp {
                        ok = false;
                        break 'all;
                    }
                }
            }
        }
    }
    verdict(
        11,
        ok,
        &format!(
            "rational and F_p tables identical for primes {:?}, {compared} records",
            primes
        ),
    );
}

#[test]
fn criterion_12_worker_count_determinism() {
    // Identical seed, different worker counts, byte-identical outputs —
    // once for a CSV pipeline, once for a JSON pipeline.
    let bin = env!("CARGO_BIN_EXE_fatpoints");
    let runs = [
        vec![
            "cohomology", "--weights", "1,2,3", "--point", "1,1,1", "--n", "0..12", "--m", "0..2",
        ],
        vec![
            "nagata", "--factor", "1,2,3", "--r", "2", "--m-max", "4", "--seed", "42",
        ],
    ];
    let mut ok = true;
    for base in &runs {
        let mut outputs = Vec::new();
        for workers in ["1", "3"] {
            let out = Command::new(bin)
                .args(base)
                .args(["--workers", workers])
                .output()
                .expect("binary spawns");
            ok &= out.status.success();
            outputs.push(out.stdout);
        }
        ok &= outputs[0] == outputs[1];
        ok &= !outputs[0].is_empty();
    }
    verdict(
        12,
        ok,
        "byte-identical CSV and JSON across --workers 1 and 3",
    );
}
