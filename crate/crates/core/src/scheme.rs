//! Fat point schemes on a weighted plane and their linear systems.
//!
//! Provides:
//!   * `UpstreamPoint` — a point of the ordinary plane with all coordinates
//!     nonzero, representing its image under the covering map
//!     (u:v:w) -> (u^a : v^b : w^c)
//!   * `downstream_equal` — equality of covering images in P(a,b,c)
//!   * `FatPointScheme` — validated points + multiplicities
//!   * `condition_matrix` — vanishing-order conditions (divided-power
//!     derivatives) against the monomial basis of a graded piece
//!   * `h0` — dimension of the linear system of degree-n forms vanishing to
//!     order m*e_i at the i-th point
//!   * `d_min`, `basis_forms` — smallest effective degree and explicit forms
//!   * `RankCache` — hook for memoizing (h0, rank) per (n, m) cell
//!
//! Vanishing order at a downstream point is evaluated at one chosen
//! upstream preimage: because every coordinate is nonzero, the orbit of
//! preimages under the roots-of-unity action all impose the same conditions
//! on substituted monomials, so one representative suffices.  Conditions are
//! divided-power (Hasse) derivatives, which keep the vanishing-order
//! characterization correct in every characteristic.

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{kernel_basis, rank, ExactMatrix};
use crate::plane::{Monomial, WeightedPlane};

/// Memoization hook for (h0, rank) per (n, m) cell of a fixed scheme.
/// Implementations must be safe to share across worker threads.
pub trait RankCache: Sync {
    fn get(&self, n: i64, m: u32) -> Option<(usize, usize)>;
    fn put(&self, n: i64, m: u32, h0: usize, rank: usize);
}

/// In-memory `RankCache`, useful for one-process reuse across table rows.
#[derive(Debug, Default)]
pub struct MemoryRankCache {
    cells: std::sync::Mutex<std::collections::HashMap<(i64, u32), (usize, usize)>>,
}

impl MemoryRankCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.cells.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl RankCache for MemoryRankCache {
    fn get(&self, n: i64, m: u32) -> Option<(usize, usize)> {
        self.cells.lock().unwrap().get(&(n, m)).copied()
    }

    fn put(&self, n: i64, m: u32, h0: usize, rank: usize) {
        self.cells.lock().unwrap().insert((n, m), (h0, rank));
    }
}

/// A point (u0 : v0 : w0) of the ordinary plane with all coordinates
/// nonzero, used as the upstream representative of its covering image.
#[derive(Debug, Clone)]
pub struct UpstreamPoint<F: Field> {
    coords: [F::Elem; 3],
}

impl<F: Field> UpstreamPoint<F> {
    /// Requires every coordinate nonzero: points on the coordinate axes are
    /// out of contract for the whole pipeline (they may hit the singular
    /// locus downstream and break the one-preimage evaluation shortcut).
    pub fn new(f: &F, coords: [F::Elem; 3]) -> Result<Self> {
        if coords.iter().any(|c| f.is_zero(c)) {
            return Err(Error::invalid(
                "point has a zero coordinate; all three must be nonzero",
            ));
        }
        Ok(UpstreamPoint { coords })
    }

    pub fn coords(&self) -> &[F::Elem; 3] {
        &self.coords
    }

    /// Image (u0^a : v0^b : w0^c) in P(a,b,c).
    pub fn downstream_image(&self, f: &F, plane: &WeightedPlane) -> [F::Elem; 3] {
        let (a, b, c) = plane.weights();
        [
            f.pow(&self.coords[0], a as u64),
            f.pow(&self.coords[1], b as u64),
            f.pow(&self.coords[2], c as u64),
        ]
    }

    pub fn render(&self, f: &F) -> String {
        format!(
            "{},{},{}",
            f.render(&self.coords[0]),
            f.render(&self.coords[1]),
            f.render(&self.coords[2])
        )
    }
}

/// Equality of points with all coordinates nonzero in P(a,b,c).
///
/// (x1:y1:z1) = (x2:y2:z2) iff some scalar l satisfies x2/x1 = l^a,
/// y2/y1 = l^b, z2/z1 = l^c.  With pairwise coprime weights this is
/// equivalent to the three cross-relations below (two of them alone admit
/// root-of-unity counterexamples), written division-free.
pub fn images_equal<F: Field>(
    f: &F,
    plane: &WeightedPlane,
    p: &[F::Elem; 3],
    q: &[F::Elem; 3],
) -> bool {
    let (a, b, c) = plane.weights();
    let (a, b, c) = (a as u64, b as u64, c as u64);
    let cross = |i: usize, j: usize, ei: u64, ej: u64| {
        let lhs = f.mul(&f.pow(&q[i], ei), &f.pow(&p[j], ej));
        let rhs = f.mul(&f.pow(&p[i], ei), &f.pow(&q[j], ej));
        lhs == rhs
    };
    cross(0, 1, b, a) && cross(1, 2, c, b) && cross(0, 2, c, a)
}

/// Equality test on the covering images of two upstream points.
pub fn downstream_equal<F: Field>(
    f: &F,
    plane: &WeightedPlane,
    p: &UpstreamPoint<F>,
    q: &UpstreamPoint<F>,
) -> bool {
    let ip = p.downstream_image(f, plane);
    let iq = q.downstream_image(f, plane);
    images_equal(f, plane, &ip, &iq)
}

/// A form of fixed weighted degree, stored term-wise on the monomial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedForm<F: Field> {
    pub terms: Vec<(Monomial, F::Elem)>,
}

impl<F: Field> WeightedForm<F> {
    /// Human-readable polynomial, e.g. `x^2 - y`.
    pub fn render(&self, f: &F) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, coeff)) in self.terms.iter().enumerate() {
            let (neg, mag) = f.signed_parts(coeff);
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = render_monomial(m);
            if mono == "1" {
                out.push_str(&mag);
            } else if mag == "1" {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        out
    }
}

fn render_monomial(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (name, e) in [("x", m.i), ("y", m.j), ("z", m.k)] {
        match e {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// Points with multiplicities on a weighted plane.
///
/// Invariants enforced at construction: at least one point, equal-length
/// multiplicity list with every entry >= 1, all coordinates nonzero, and
/// pairwise distinct covering images.
#[derive(Debug, Clone)]
pub struct FatPointScheme<F: Field> {
    plane: WeightedPlane,
    field: F,
    points: Vec<UpstreamPoint<F>>,
    mults: Vec<u32>,
}

impl<F: Field> FatPointScheme<F> {
    pub fn new(
        plane: WeightedPlane,
        field: F,
        points: Vec<UpstreamPoint<F>>,
        mults: Vec<u32>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("a scheme needs at least one point"));
        }
        if points.len() != mults.len() {
            return Err(Error::invalid(format!(
                "{} points but {} multiplicities",
                points.len(),
                mults.len()
            )));
        }
        if mults.iter().any(|&e| e == 0) {
            return Err(Error::invalid("multiplicities must be >= 1"));
        }
        for p in &points {
            if p.coords.iter().any(|c| field.is_zero(c)) {
                return Err(Error::invalid("point has a zero coordinate"));
            }
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if downstream_equal(&field, &plane, &points[i], &points[j]) {
                    return Err(Error::invalid(format!(
                        "points {i} and {j} have the same covering image"
                    )));
                }
            }
        }
        Ok(FatPointScheme {
            plane,
            field,
            points,
            mults,
        })
    }

    pub fn plane(&self) -> &WeightedPlane {
        &self.plane
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn points(&self) -> &[UpstreamPoint<F>] {
        &self.points
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.mults
    }

    /// Sum of squared multiplicities (the self-intersection defect of E).
    pub fn u_invariant(&self) -> u64 {
        self.mults.iter().map(|&e| (e as u64) * (e as u64)).sum()
    }

    /// Sum of multiplicities.
    pub fn mult_sum(&self) -> u64 {
        self.mults.iter().map(|&e| e as u64).sum()
    }

    /// Number of vanishing conditions L(m) = sum of mu_i(mu_i+1)/2 over the
    /// points, with mu_i = m * e_i.
    pub fn conditions(&self, m: u32) -> usize {
        self.mults
            .iter()
            .map(|&e| {
                let mu = e as u64 * m as u64;
                (mu * (mu + 1) / 2) as usize
            })
            .sum()
    }

    /// The condition matrix at (n, m): one row per divided-power derivative
    /// order (s,t) with s+t < m*e_i per point, one column per monomial of
    /// weighted degree n (ascending lex order of exponents).
    ///
    /// A monomial x^i y^j z^k substitutes to u^(a i) v^(b j) w^(c k); after
    /// dehomogenizing at a nonzero coordinate of the point (preferred order
    /// w, then v, then u) the entry of row (s,t) is
    ///   C(P, s) * C(Q, t) * A^(P-s) * B^(Q-t)
    /// where (P, Q) are the exponents of the two affine variables and
    /// (A, B) the affine coordinates of the point.  C(.,.) is a binomial
    /// coefficient reduced into the field via an addition-only Pascal table,
    /// which stays correct in small characteristic.
    pub fn condition_matrix(&self, n: i64, m: u32) -> ExactMatrix<F> {
        let f = &self.field;
        let monomials = self.plane.enumerate_monomials(n);
        let cols = monomials.len();
        let rows = self.conditions(m);
        let mut out = ExactMatrix::zero(f, rows, cols);
        if rows == 0 || cols == 0 {
            return out;
        }
        let (a, b, c) = self.plane.weights();
        // Upstream exponents per column.
        let upstream: Vec<[u64; 3]> = monomials
            .iter()
            .map(|mo| {
                [
                    a as u64 * mo.i as u64,
                    b as u64 * mo.j as u64,
                    c as u64 * mo.k as u64,
                ]
            })
            .collect();
        let max_exp = upstream
            .iter()
            .flat_map(|e| e.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        let max_mu = self
            .mults
            .iter()
            .map(|&e| e as u64 * m as u64)
            .max()
            .unwrap_or(0) as usize;
        let binom = binomial_table(f, max_exp, max_mu.saturating_sub(1));

        let mut row = 0usize;
        for (point, &e) in self.points.iter().zip(&self.mults) {
            let mu = e as u64 * m as u64;
            // Dehomogenization chart: first nonzero coordinate in the
            // preference order w, v, u (all are nonzero by construction,
            // so this is w in practice).
            let chart = [2usize, 1, 0]
                .into_iter()
                .find(|&t| !f.is_zero(&point.coords[t]))
                .expect("some coordinate is nonzero");
            let (i0, i1) = match chart {
                2 => (0usize, 1usize),
                1 => (0, 2),
                _ => (1, 2),
            };
            let inv_chart = f.inv(&point.coords[chart]).expect("chart coordinate nonzero");
            let coord_a = f.mul(&point.coords[i0], &inv_chart);
            let coord_b = f.mul(&point.coords[i1], &inv_chart);
            let pow_a = power_table(f, &coord_a, max_exp);
            let pow_b = power_table(f, &coord_b, max_exp);

            for d in 0..mu {
                for s in (0..=d).rev() {
                    let t = d - s;
                    for (col, exps) in upstream.iter().enumerate() {
                        let (p_exp, q_exp) = (exps[i0], exps[i1]);
                        if s > p_exp || t > q_exp {
                            continue; // derivative kills the monomial
                        }
                        let coeff = f.mul(
                            &binom[p_exp as usize][s as usize],
                            &binom[q_exp as usize][t as usize],
                        );
                        let val = f.mul(
                            &pow_a[(p_exp - s) as usize],
                            &pow_b[(q_exp - t) as usize],
                        );
                        out.set(row, col, f.mul(&coeff, &val));
                    }
                    row += 1;
                }
            }
        }
        debug_assert_eq!(row, rows);
        out
    }

    /// (h0, rank of the condition matrix) at (n, m).
    pub fn h0_and_rank(&self, n: i64, m: u32) -> (usize, usize) {
        if n < 0 {
            return (0, 0);
        }
        let matrix = self.condition_matrix(n, m);
        let r = rank(&self.field, &matrix);
        (matrix.cols() - r, r)
    }

    /// Same as `h0_and_rank`, consulting/feeding a cell cache.
    pub fn h0_and_rank_cached(
        &self,
        n: i64,
        m: u32,
        cache: Option<&dyn RankCache>,
    ) -> (usize, usize) {
        if let Some(c) = cache {
            if let Some(hit) = c.get(n, m) {
                return hit;
            }
        }
        let (h0, r) = self.h0_and_rank(n, m);
        if let Some(c) = cache {
            c.put(n, m, h0, r);
        }
        (h0, r)
    }

    /// Dimension of the degree-n forms vanishing to order m*e_i at every
    /// point (0 for n < 0).
    pub fn h0(&self, n: i64, m: u32) -> usize {
        self.h0_and_rank(n, m).0
    }

    /// Least n >= 0 with h0(n, m) > 0.
    ///
    /// Terminates: at n = abc*t the graded piece contains the t+1 monomials
    /// (x^bc)^s (y^ac)^(t-s), so its dimension exceeds the condition count
    /// L(m) no later than t = L(m)+1.
    pub fn d_min(&self, m: u32) -> i64 {
        self.d_min_cached(m, None)
    }

    /// `d_min` consulting a cell cache for the h0 evaluations.
    pub fn d_min_cached(&self, m: u32, cache: Option<&dyn RankCache>) -> i64 {
        let cap = self.plane.abc() as i64 * (self.conditions(m) as i64 + 1);
        for n in 0..=cap {
            if self.h0_and_rank_cached(n, m, cache).0 > 0 {
                return n;
            }
        }
        unreachable!("dimension growth must beat the condition count by n = abc*(L+1)")
    }

    /// Canonical basis of the linear system at (n, m), as explicit forms.
    pub fn basis_forms(&self, n: i64, m: u32) -> Vec<WeightedForm<F>> {
        let monomials = self.plane.enumerate_monomials(n);
        let matrix = self.condition_matrix(n, m);
        kernel_basis(&self.field, &matrix)
            .into_iter()
            .map(|v| WeightedForm {
                terms: monomials
                    .iter()
                    .zip(v)
                    .filter(|(_, coeff)| !self.field.is_zero(coeff))
                    .map(|(mo, coeff)| (*mo, coeff))
                    .collect(),
            })
            .collect()
    }

    /// Stable textual identity of (plane, field, points, multiplicities),
    /// hashed by cache implementations into cell keys.
    pub fn canonical_description(&self) -> String {
        let (a, b, c) = self.plane.weights();
        let pts: Vec<String> = self.points.iter().map(|p| p.render(&self.field)).collect();
        let mults: Vec<String> = self.mults.iter().map(|e| e.to_string()).collect();
        format!(
            "plane={a},{b},{c};field={};points={};mults={}",
            self.field.description(),
            pts.join("|"),
            mults.join(",")
        )
    }
}

/// Pascal table of binomial coefficients C(t, s) for t <= max_top,
/// s <= max_bottom, as field elements.  Addition-only, so it is exact in
/// every characteristic (a factorial-based route would divide by zero mod
/// small primes).
fn binomial_table<F: Field>(f: &F, max_top: usize, max_bottom: usize) -> Vec<Vec<F::Elem>> {
    let width = max_bottom + 1;
    let mut table: Vec<Vec<F::Elem>> = Vec::with_capacity(max_top + 1);
    let mut first = vec![f.zero(); width];
    first[0] = f.one();
    table.push(first);
    for t in 1..=max_top {
        let mut row = vec![f.zero(); width];
        row[0] = f.one();
        for s in 1..width.min(t + 1) {
            row[s] = f.add(&table[t - 1][s - 1], &table[t - 1][s]);
        }
        table.push(row);
    }
    table
}

/// Successive powers base^0 .. base^max.
fn power_table<F: Field>(f: &F, base: &F::Elem, max: usize) -> Vec<F::Elem> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(f.one());
    for e in 1..=max {
        let prev = &out[e - 1];
        out.push(f.mul(prev, base));
    }
    out
}

/// Parses `x,y,z` (commas and/or whitespace) into an upstream point.
pub fn parse_point<F: Field>(f: &F, s: &str) -> Result<UpstreamPoint<F>> {
    let normalized = s.replace(',', " ");
    let tokens: Vec<&str> = normalized.split_whitespace().collect();
    if tokens.len() != 3 {
        return Err(Error::invalid(format!(
            "point `{s}` must have exactly three coordinates"
        )));
    }
    let coords = [
        f.parse_elem(tokens[0])?,
        f.parse_elem(tokens[1])?,
        f.parse_elem(tokens[2])?,
    ];
    UpstreamPoint::new(f, coords)
}

/// Parses a point-list file: one point per line, `#` starts a comment line,
/// blank lines ignored.
pub fn parse_point_list<F: Field>(f: &F, text: &str) -> Result<Vec<UpstreamPoint<F>>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(parse_point(f, line).map_err(|e| {
            Error::invalid(format!("line {}: {e}", lineno + 1))
        })?);
    }
    Ok(out)
}

/// Draws `r` random points with all coordinates nonzero and pairwise
/// distinct covering images (rejection sampling from the seeded stream).
pub fn random_points<F: Field>(
    f: &F,
    plane: &WeightedPlane,
    r: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<UpstreamPoint<F>>> {
    let mut out: Vec<UpstreamPoint<F>> = Vec::with_capacity(r);
    let mut attempts = 0usize;
    while out.len() < r {
        attempts += 1;
        if attempts > 64 * (r + 1) {
            return Err(Error::invalid(format!(
                "could not draw {r} points with distinct images over {}",
                f.description()
            )));
        }
        let candidate = UpstreamPoint::new(
            f,
            [
                f.random_nonzero(rng),
                f.random_nonzero(rng),
                f.random_nonzero(rng),
            ],
        )?;
        if out.iter().all(|p| !downstream_equal(f, plane, p, &candidate)) {
            out.push(candidate);
        }
    }
    Ok(out)
}
