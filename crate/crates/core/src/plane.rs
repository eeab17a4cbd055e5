//! The weighted projective plane P(a,b,c) and its graded coordinate ring.
//!
//! Provides:
//!   * `WeightedPlane` — validated weights (pairwise coprime, positive)
//!   * `Monomial` — an exponent triple (i,j,k) for x^i y^j z^k
//!   * `enumerate_monomials` — all monomials of a given weighted degree,
//!     in ascending lexicographic order of (i,j,k)
//!   * `dim_s` — the dimension of the degree-n graded piece
//!   * `is_cartier` — whether degree n is divisible by abc
//!
//! The coordinate ring is K[x,y,z] with wt(x)=a, wt(y)=b, wt(z)=c; the
//! degree-n piece is spanned by the monomials with a·i + b·j + c·k = n.

use crate::error::{Error, Result};

/// Exponents (i,j,k) of a monomial x^i y^j z^k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub i: u32,
    pub j: u32,
    pub k: u32,
}

impl Monomial {
    pub fn new(i: u32, j: u32, k: u32) -> Self {
        Monomial { i, j, k }
    }
}

/// P(a,b,c) with pairwise coprime positive weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeightedPlane {
    a: u32,
    b: u32,
    c: u32,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl WeightedPlane {
    /// Validates the weights: each positive, pairwise coprime.  Pairwise
    /// coprimality is a hard requirement — the intersection theory and the
    /// covering construction used downstream are only valid then.
    pub fn new(a: u32, b: u32, c: u32) -> Result<WeightedPlane> {
        if a == 0 || b == 0 || c == 0 {
            return Err(Error::invalid("weights must be positive"));
        }
        for (p, q, names) in [
            (a, b, "(a,b)"),
            (a, c, "(a,c)"),
            (b, c, "(b,c)"),
        ] {
            if gcd(p as u64, q as u64) != 1 {
                return Err(Error::invalid(format!(
                    "weights {names} = ({p},{q}) are not coprime; \
                     pairwise coprime weights are required"
                )));
            }
        }
        Ok(WeightedPlane { a, b, c })
    }

    pub fn weights(&self) -> (u32, u32, u32) {
        (self.a, self.b, self.c)
    }

    /// Product of the weights: the degree of the covering map from the
    /// ordinary plane, and the Cartier index of the class A.
    pub fn abc(&self) -> u64 {
        self.a as u64 * self.b as u64 * self.c as u64
    }

    /// Sum of the weights (the anticanonical degree).
    pub fn kappa(&self) -> u64 {
        self.a as u64 + self.b as u64 + self.c as u64
    }

    /// Weighted degree of a monomial.
    pub fn degree_of(&self, m: &Monomial) -> i64 {
        self.a as i64 * m.i as i64 + self.b as i64 * m.j as i64 + self.c as i64 * m.k as i64
    }

    /// All monomials of weighted degree `n`, in decreasing lexicographic
    /// order with x > y > z (so x-heavy monomials come first).  Empty for
    /// n < 0.
    pub fn enumerate_monomials(&self, n: i64) -> Vec<Monomial> {
        let mut out = Vec::new();
        if n < 0 {
            return out;
        }
        let (a, b, c) = (self.a as i64, self.b as i64, self.c as i64);
        let mut i = 0i64;
        while a * i <= n {
            let rem_i = n - a * i;
            let mut j = 0i64;
            while b * j <= rem_i {
                let rem = rem_i - b * j;
                if rem % c == 0 {
                    out.push(Monomial::new(i as u32, j as u32, (rem / c) as u32));
                }
                j += 1;
            }
            i += 1;
        }
        out.reverse();
        out
    }

    /// Dimension of the degree-n graded piece of the coordinate ring
    /// (0 for n < 0).
    pub fn dim_s(&self, n: i64) -> usize {
        if n < 0 {
            return 0;
        }
        let (a, b, c) = (self.a as i64, self.b as i64, self.c as i64);
        let mut count = 0usize;
        let mut i = 0i64;
        while a * i <= n {
            let rem_i = n - a * i;
            let mut j = 0i64;
            while b * j <= rem_i {
                if (rem_i - b * j) % c == 0 {
                    count += 1;
                }
                j += 1;
            }
            i += 1;
        }
        count
    }

    /// True iff the class of degree n is Cartier, i.e. abc | n.
    pub fn is_cartier(&self, n: i64) -> bool {
        n.rem_euclid(self.abc() as i64) == 0
    }
}
