//! Exact scalar arithmetic over the two supported coefficient fields.
//!
//! Provides:
//!   * `Field` — the scalar interface all matrix and linear-system code is
//!     generic over
//!   * `Rationals` — arbitrary-precision rational numbers
//!   * `PrimeField` — F_p for an odd prime p < 2^62, with Montgomery
//!     multiplication so elimination inner loops avoid hardware division
//!   * `FieldSpec` — runtime selection between the two backends
//!   * `is_prime` — deterministic Miller-Rabin for u64 moduli
//!   * `DEFAULT_PRIME` — the fixed default modulus, 2^62 - 57
//!
//! Every operation here is exact: no floating point is used anywhere in the
//! crate.  Prime-field mode is the fast default; rational mode certifies.

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{self, ExactMatrix};

/// The fixed default prime modulus: the largest prime below 2^62.
pub const DEFAULT_PRIME: u64 = 4_611_686_018_427_387_847;

/// Exclusive upper bound for accepted moduli (62 bits keeps Montgomery
/// reduction comfortably inside u128 intermediates).
pub const MAX_MODULUS: u64 = 1 << 62;

/// Runtime choice of coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    /// Exact rational numbers.
    Rationals,
    /// The prime field with the given modulus.
    Prime(u64),
}

impl FieldSpec {
    /// Parses the command-line/config syntax: `q`, `fp:auto`, or `fp:<p>`.
    pub fn parse(s: &str) -> Result<FieldSpec> {
        let s = s.trim();
        match s {
            "q" => Ok(FieldSpec::Rationals),
            "fp:auto" => Ok(FieldSpec::Prime(DEFAULT_PRIME)),
            _ => {
                if let Some(digits) = s.strip_prefix("fp:") {
                    let p: u64 = digits
                        .parse()
                        .map_err(|_| Error::invalid(format!("unparseable modulus `{digits}`")))?;
                    // Validation (primality, oddness, size) happens in
                    // PrimeField::new; surface those errors at build time.
                    PrimeField::new(p)?;
                    Ok(FieldSpec::Prime(p))
                } else {
                    Err(Error::invalid(format!(
                        "unknown field `{s}` (expected q, fp:auto, or fp:<prime>)"
                    )))
                }
            }
        }
    }

    /// Stable textual form, used in cache keys and reports.
    pub fn description(&self) -> String {
        match self {
            FieldSpec::Rationals => "q".to_string(),
            FieldSpec::Prime(p) => format!("fp:{p}"),
        }
    }
}

/// Scalar interface for exact linear algebra.
///
/// Methods take `&self` because a prime field carries its modulus (and
/// Montgomery constants) as runtime data.  `canonicalize_vector`, `rank` and
/// `kernel_basis` have field-specific strategies; the provided defaults are
/// plain field-arithmetic elimination, which `Rationals` overrides with a
/// fraction-free (integer-preserving) route to avoid coefficient blowup.
pub trait Field: Clone + Send + Sync {
    type Elem: Clone + PartialEq + Send + Sync + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Multiplicative inverse; `None` exactly for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn from_i64(&self, n: i64) -> Self::Elem;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;

    /// Parses one field element from the point-list / flag syntax.
    fn parse_elem(&self, s: &str) -> Result<Self::Elem>;

    /// Plain textual form (reduced fraction over the rationals, canonical
    /// residue over a prime field).
    fn render(&self, a: &Self::Elem) -> String;

    /// `(is_negative, magnitude)` split used when pretty-printing
    /// polynomials.  Prime fields use balanced representatives in
    /// (-p/2, p/2] so small negative coefficients print as such.
    fn signed_parts(&self, a: &Self::Elem) -> (bool, String);

    /// Uniform draw from the nonzero elements (over the rationals: a uniform
    /// nonzero integer in [1, 2^20], which is enough genericity for the
    /// desk-scale schemes this crate targets).
    fn random_nonzero(&self, rng: &mut ChaCha8Rng) -> Self::Elem;

    /// Stable textual field identifier (`q`, `fp:<p>`), used in cache keys.
    fn description(&self) -> String;

    /// Rewrites a kernel vector into the field's canonical form
    /// (first nonzero entry 1 over F_p; primitive integer vector with
    /// positive leading entry over the rationals).
    fn canonicalize_vector(&self, v: &mut [Self::Elem]);

    /// Matrix rank.  Default: column-space elimination in field arithmetic.
    fn rank(&self, m: &ExactMatrix<Self>) -> usize
    where
        Self: Sized,
    {
        matrix::column_space_rank(self, m)
    }

    /// Basis of the right kernel.  Default: reduced row echelon form with
    /// deterministic first-nonzero pivoting.
    fn kernel_basis(&self, m: &ExactMatrix<Self>) -> Vec<Vec<Self::Elem>>
    where
        Self: Sized,
    {
        matrix::rref_kernel(self, m)
    }
}

// ---------------------------------------------------------------------------
// Rationals
// ---------------------------------------------------------------------------

/// The field of rational numbers with arbitrary-precision arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }

    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }

    fn parse_elem(&self, s: &str) -> Result<BigRational> {
        let s = s.trim();
        let (num_str, den_str) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: BigInt = num_str
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("unparseable rational `{s}`")))?;
        let den: BigInt = den_str
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("unparseable rational `{s}`")))?;
        if den.is_zero() {
            return Err(Error::invalid(format!("zero denominator in `{s}`")));
        }
        Ok(BigRational::new(num, den))
    }

    fn render(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }

    fn signed_parts(&self, a: &BigRational) -> (bool, String) {
        (a.is_negative(), self.render(&a.abs()))
    }

    fn random_nonzero(&self, rng: &mut ChaCha8Rng) -> BigRational {
        let n: u64 = rng.random_range(1..=(1u64 << 20));
        BigRational::from_integer(BigInt::from(n))
    }

    fn description(&self) -> String {
        "q".to_string()
    }

    fn canonicalize_vector(&self, v: &mut [BigRational]) {
        // Clear denominators, divide by the content, make the leading
        // (first nonzero) entry positive: a primitive integer vector.
        let mut den_lcm = BigInt::one();
        for x in v.iter() {
            den_lcm = den_lcm.lcm(x.denom());
        }
        let mut content = BigInt::zero();
        for x in v.iter() {
            let n = x.numer() * (&den_lcm / x.denom());
            content = content.gcd(&n);
        }
        if content.is_zero() {
            return; // zero vector, leave untouched
        }
        let mut sign_flip = false;
        for x in v.iter() {
            if !x.is_zero() {
                sign_flip = x.is_negative();
                break;
            }
        }
        let scale = if sign_flip { -&content } else { content.clone() };
        for x in v.iter_mut() {
            let n = (x.numer() * (&den_lcm / x.denom())) / &scale;
            *x = BigRational::from_integer(n);
        }
    }

    fn rank(&self, m: &ExactMatrix<Self>) -> usize {
        matrix::bareiss_rank(m)
    }

    fn kernel_basis(&self, m: &ExactMatrix<Self>) -> Vec<Vec<BigRational>> {
        matrix::bareiss_kernel(self, m)
    }
}

// ---------------------------------------------------------------------------
// PrimeField
// ---------------------------------------------------------------------------

/// An element of a prime field, stored in Montgomery form.
///
/// The representation is private to this module: construct via
/// `PrimeField::from_u64` (or the `Field` methods) and read back via
/// `PrimeField::to_u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpElem(u64);

/// F_p for an odd prime p < 2^62.
///
/// Elements live in Montgomery form (residue * 2^64 mod p), which turns each
/// multiplication into two widening multiplies and a shift — no division in
/// the elimination hot loops.  Addition and subtraction act on Montgomery
/// form directly since it is a linear change of representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
    /// -p^{-1} mod 2^64
    p_neg_inv: u64,
    /// 2^128 mod p, used to enter Montgomery form
    r2: u64,
    one_m: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<PrimeField> {
        if p < 3 || p % 2 == 0 || p >= MAX_MODULUS {
            return Err(Error::invalid(format!(
                "modulus {p} must be an odd prime below 2^62"
            )));
        }
        if !is_prime(p) {
            return Err(Error::invalid(format!("modulus {p} is not prime")));
        }
        // Newton iteration for p^{-1} mod 2^64 (p odd, so invertible).
        let mut inv: u64 = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        debug_assert_eq!(p.wrapping_mul(inv), 1);
        let r1 = ((u128::from(u64::MAX) + 1) % u128::from(p)) as u64;
        let r2 = ((u128::from(r1) * u128::from(r1)) % u128::from(p)) as u64;
        let mut f = PrimeField {
            p,
            p_neg_inv: inv.wrapping_neg(),
            r2,
            one_m: 0,
        };
        f.one_m = f.to_mont(1);
        Ok(f)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.p_neg_inv);
        let t2 = ((t + u128::from(m) * u128::from(self.p)) >> 64) as u64;
        if t2 >= self.p {
            t2 - self.p
        } else {
            t2
        }
    }

    #[inline]
    fn mont_mul(&self, a: u64, b: u64) -> u64 {
        self.redc(u128::from(a) * u128::from(b))
    }

    #[inline]
    fn to_mont(&self, x: u64) -> u64 {
        debug_assert!(x < self.p);
        self.mont_mul(x, self.r2)
    }

    #[inline]
    fn from_mont(&self, a: u64) -> u64 {
        self.redc(u128::from(a))
    }

    /// Injects a canonical residue (not necessarily reduced) into the field.
    pub fn from_u64(&self, x: u64) -> FpElem {
        FpElem(self.to_mont(x % self.p))
    }

    /// Canonical residue in [0, p) of an element.
    pub fn to_u64(&self, a: FpElem) -> u64 {
        self.from_mont(a.0)
    }
}

impl Field for PrimeField {
    type Elem = FpElem;

    fn zero(&self) -> FpElem {
        FpElem(0)
    }

    fn one(&self) -> FpElem {
        FpElem(self.one_m)
    }

    fn is_zero(&self, a: &FpElem) -> bool {
        a.0 == 0
    }

    #[inline]
    fn add(&self, a: &FpElem, b: &FpElem) -> FpElem {
        let s = a.0 + b.0;
        FpElem(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    fn sub(&self, a: &FpElem, b: &FpElem) -> FpElem {
        FpElem(if a.0 >= b.0 {
            a.0 - b.0
        } else {
            a.0 + self.p - b.0
        })
    }

    #[inline]
    fn neg(&self, a: &FpElem) -> FpElem {
        FpElem(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    #[inline]
    fn mul(&self, a: &FpElem, b: &FpElem) -> FpElem {
        FpElem(self.mont_mul(a.0, b.0))
    }

    fn inv(&self, a: &FpElem) -> Option<FpElem> {
        if a.0 == 0 {
            None
        } else {
            // Fermat: a^(p-2).  Exponentiation stays in Montgomery form.
            Some(self.pow(a, self.p - 2))
        }
    }

    fn from_i64(&self, n: i64) -> FpElem {
        let r = n.rem_euclid(self.p as i64 as i64);
        // rem_euclid on i64 is fine: p < 2^62 fits in i64.
        self.from_u64(r as u64)
    }

    fn from_bigint(&self, n: &BigInt) -> FpElem {
        let r = n.mod_floor(&BigInt::from(self.p));
        self.from_u64(r.to_u64().expect("residue fits u64"))
    }

    fn parse_elem(&self, s: &str) -> Result<FpElem> {
        let s = s.trim();
        if s.contains('/') {
            return Err(Error::invalid(format!(
                "`{s}`: prime-field elements are written as integers"
            )));
        }
        let n: BigInt = s
            .parse()
            .map_err(|_| Error::invalid(format!("unparseable integer `{s}`")))?;
        Ok(self.from_bigint(&n))
    }

    fn render(&self, a: &FpElem) -> String {
        self.to_u64(*a).to_string()
    }

    fn signed_parts(&self, a: &FpElem) -> (bool, String) {
        let r = self.to_u64(*a);
        if r > self.p / 2 {
            (true, (self.p - r).to_string())
        } else {
            (false, r.to_string())
        }
    }

    fn random_nonzero(&self, rng: &mut ChaCha8Rng) -> FpElem {
        let x: u64 = rng.random_range(1..self.p);
        self.from_u64(x)
    }

    fn description(&self) -> String {
        format!("fp:{}", self.p)
    }

    fn canonicalize_vector(&self, v: &mut [FpElem]) {
        let lead = match v.iter().position(|x| x.0 != 0) {
            Some(i) => v[i],
            None => return,
        };
        let inv = self.inv(&lead).expect("nonzero leading entry");
        for x in v.iter_mut() {
            *x = self.mul(x, &inv);
        }
    }
}

// ---------------------------------------------------------------------------
// Primality
// ---------------------------------------------------------------------------

/// Deterministic Miller-Rabin for u64 (witness set valid far beyond 2^64).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((u128::from(a) * u128::from(b)) % u128::from(n)) as u64;
    let powmod = |mut base: u64, mut e: u64| {
        let mut acc = 1u64;
        base %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= floor` congruent to 1 modulo `modulus` (used to find
/// coefficient fields containing the roots of unity the covering map needs).
pub fn next_prime_one_mod(modulus: u64, floor: u64) -> Result<u64> {
    if modulus == 0 {
        return Err(Error::invalid("zero modulus"));
    }
    // First candidate >= floor with candidate ≡ 1 (mod modulus).
    let mut k = floor.saturating_sub(1).div_ceil(modulus);
    loop {
        let candidate = k
            .checked_mul(modulus)
            .and_then(|x| x.checked_add(1))
            .ok_or_else(|| Error::invalid("prime search overflowed u64"))?;
        if candidate >= MAX_MODULUS {
            return Err(Error::invalid("no admissible prime below 2^62"));
        }
        if candidate >= floor && candidate > 2 && is_prime(candidate) {
            return Ok(candidate);
        }
        k += 1;
    }
}
