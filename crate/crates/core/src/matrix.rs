//! Dense exact matrices and rank/kernel computations.
//!
//! Provides:
//!   * `ExactMatrix<F>` — row-major dense matrix over any `Field`
//!   * `rank` — field-dispatched rank (always exact)
//!   * `kernel_basis` — field-dispatched right-kernel basis in canonical form
//!   * `column_space_rank`, `rref_kernel` — the generic field-arithmetic
//!     routes, public inside the crate so tests can cross-check them against
//!     the specialized rational (fraction-free) routes
//!
//! Pivoting is deterministic everywhere: columns are processed left to
//! right and the pivot is the first row (top to bottom) with a nonzero
//! entry.  Identical input therefore yields identical elimination
//! traces, kernels, and downstream certificates on every run.
//!
//! Rank computations stop early once the row count is reached, which makes
//! "are these conditions independent?" queries on wide matrices cheap: only
//! about `rows` columns get inspected when the answer is yes.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};
use num::Integer;

use crate::error::{Error, Result};
use crate::field::{Field, Rationals};

/// Dense matrix over an exact field.
#[derive(Debug, Clone)]
pub struct ExactMatrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> ExactMatrix<F> {
    /// All-zero matrix of the given shape.
    pub fn zero(f: &F, rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![f.zero(); rows * cols],
        }
    }

    /// Builds from explicit rows; rejects ragged input.
    pub fn from_rows(f: &F, rows: Vec<Vec<F::Elem>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged rows in matrix construction"));
        }
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * cols);
        for r in rows {
            data.extend(r);
        }
        let _ = f;
        Ok(ExactMatrix {
            rows: n_rows,
            cols,
            data,
        })
    }

    /// Convenience constructor from integer entries (tests, small oracles).
    pub fn from_i64_rows(f: &F, rows: &[&[i64]]) -> Result<Self> {
        let converted = rows
            .iter()
            .map(|r| r.iter().map(|&x| f.from_i64(x)).collect())
            .collect();
        Self::from_rows(f, converted)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Matrix-vector product, used by tests to verify kernel vectors.
    pub fn apply(&self, f: &F, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for j in 0..self.cols {
                    acc = f.add(&acc, &f.mul(self.at(i, j), &v[j]));
                }
                acc
            })
            .collect()
    }
}

/// Exact rank of `m` (field-specific strategy; see module docs).
pub fn rank<F: Field>(f: &F, m: &ExactMatrix<F>) -> usize {
    f.rank(m)
}

/// Canonical basis of the right kernel `{v : m v = 0}`.
///
/// Vectors are indexed by the free columns in ascending order; each is
/// canonicalized per field (leading entry 1 over F_p, primitive integer
/// vector with positive leading entry over the rationals).
pub fn kernel_basis<F: Field>(f: &F, m: &ExactMatrix<F>) -> Vec<Vec<F::Elem>> {
    f.kernel_basis(m)
}

// ---------------------------------------------------------------------------
// Generic field-arithmetic routes
// ---------------------------------------------------------------------------

/// Rank via incremental column-space basis building.
///
/// Columns are inserted left to right into a partially reduced basis whose
/// vectors have distinct leading positions (kept sorted ascending, so each
/// reduction pass is sound).  Stops as soon as the basis size reaches the
/// row count, so full-row-rank matrices with many columns exit early.
pub(crate) fn column_space_rank<F: Field>(f: &F, m: &ExactMatrix<F>) -> usize {
    let rows = m.rows();
    // basis: (leading index, vector with leading entry 1), sorted by lead.
    let mut basis: Vec<(usize, Vec<F::Elem>)> = Vec::new();
    for j in 0..m.cols() {
        if basis.len() == rows {
            break;
        }
        let mut v: Vec<F::Elem> = (0..rows).map(|i| m.at(i, j).clone()).collect();
        for (lead, b) in &basis {
            if !f.is_zero(&v[*lead]) {
                let c = v[*lead].clone();
                for i in *lead..rows {
                    v[i] = f.sub(&v[i], &f.mul(&c, &b[i]));
                }
            }
        }
        if let Some(lead) = (0..rows).find(|&i| !f.is_zero(&v[i])) {
            let inv = f.inv(&v[lead]).expect("nonzero leading entry");
            for x in v.iter_mut().skip(lead) {
                *x = f.mul(x, &inv);
            }
            let pos = basis.partition_point(|(l, _)| *l < lead);
            basis.insert(pos, (lead, v));
        }
    }
    basis.len()
}

/// Kernel basis via reduced row echelon form in field arithmetic.
pub(crate) fn rref_kernel<F: Field>(f: &F, m: &ExactMatrix<F>) -> Vec<Vec<F::Elem>> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut work: Vec<Vec<F::Elem>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for col in 0..cols {
        let pr = pivots.len();
        if pr == rows {
            break;
        }
        let Some(r) = (pr..rows).find(|&r| !f.is_zero(&work[r][col])) else {
            continue;
        };
        work.swap(pr, r);
        let inv = f.inv(&work[pr][col]).expect("pivot entry nonzero");
        for j in col..cols {
            work[pr][j] = f.mul(&work[pr][j], &inv);
        }
        for i in 0..rows {
            if i != pr && !f.is_zero(&work[i][col]) {
                let c = work[i][col].clone();
                for j in col..cols {
                    let t = f.mul(&c, &work[pr][j]);
                    work[i][j] = f.sub(&work[i][j], &t);
                }
            }
        }
        pivots.push((pr, col));
    }
    kernel_from_solved(f, cols, &pivots, |pr, fc| f.neg(&work[pr][fc]))
}

/// Assembles kernel vectors given a solver for the pivot coordinates: for
/// free column `fc`, the vector has 1 at `fc`, 0 at other free columns, and
/// `pivot_value(pivot_row, fc)` at each pivot column.
fn kernel_from_solved<F: Field>(
    f: &F,
    cols: usize,
    pivots: &[(usize, usize)],
    pivot_value: impl Fn(usize, usize) -> F::Elem,
) -> Vec<Vec<F::Elem>> {
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut kernel = Vec::with_capacity(cols - pivots.len());
    for fc in 0..cols {
        if pivot_cols.binary_search(&fc).is_ok() {
            continue;
        }
        let mut v = vec![f.zero(); cols];
        v[fc] = f.one();
        for &(pr, pc) in pivots {
            v[pc] = pivot_value(pr, fc);
        }
        f.canonicalize_vector(&mut v);
        kernel.push(v);
    }
    kernel
}

// ---------------------------------------------------------------------------
// Fraction-free (integer-preserving) routes over the rationals
// ---------------------------------------------------------------------------

/// Clears denominators row by row: scaling rows changes neither rank nor
/// kernel, and the resulting integer matrix feeds the fraction-free
/// elimination below.
fn integer_rows(m: &ExactMatrix<Rationals>) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|i| {
            let mut lcm = BigInt::one();
            for j in 0..m.cols() {
                lcm = lcm.lcm(m.at(i, j).denom());
            }
            (0..m.cols())
                .map(|j| {
                    let e = m.at(i, j);
                    e.numer() * (&lcm / e.denom())
                })
                .collect()
        })
        .collect()
}

struct FractionFreeEchelon {
    work: Vec<Vec<BigInt>>,
    /// (row, column) per pivot, in elimination order.
    pivots: Vec<(usize, usize)>,
}

/// One-step fraction-free elimination (integer-preserving): each update is
///   a[i][j] := (pivot * a[i][j] - a[i][col] * a[pr][j]) / previous_pivot
/// and the division is exact because every intermediate entry is a minor of
/// the original integer matrix.  This is the blowup-free route: entry sizes
/// grow like determinant bounds instead of compounding at every step.
fn fraction_free_echelon(mut work: Vec<Vec<BigInt>>, cols: usize) -> FractionFreeEchelon {
    let rows = work.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut prev = BigInt::one();
    for col in 0..cols {
        let pr = pivots.len();
        if pr == rows {
            break;
        }
        let Some(r) = (pr..rows).find(|&r| !work[r][col].is_zero()) else {
            continue;
        };
        work.swap(pr, r);
        let (upper, lower) = work.split_at_mut(pr + 1);
        let pivot_row = &upper[pr];
        let pivot = pivot_row[col].clone();
        for row in lower.iter_mut() {
            // Every row below the pivot gets the update, even when its
            // pivot-column entry is zero: the rescaling by pivot/prev is
            // what keeps all later divisions exact.
            let factor = std::mem::replace(&mut row[col], BigInt::zero());
            for j in (col + 1)..cols {
                let num = &pivot * &row[j] - &factor * &pivot_row[j];
                let (q, rem) = num.div_rem(&prev);
                assert!(rem.is_zero(), "fraction-free division left a remainder");
                row[j] = q;
            }
        }
        prev = pivot;
        pivots.push((pr, col));
    }
    FractionFreeEchelon { work, pivots }
}

pub(crate) fn bareiss_rank(m: &ExactMatrix<Rationals>) -> usize {
    fraction_free_echelon(integer_rows(m), m.cols()).pivots.len()
}

pub(crate) fn bareiss_kernel(f: &Rationals, m: &ExactMatrix<Rationals>) -> Vec<Vec<BigRational>> {
    let ech = fraction_free_echelon(integer_rows(m), m.cols());
    let cols = m.cols();
    let pivot_cols: Vec<usize> = ech.pivots.iter().map(|&(_, c)| c).collect();
    let mut kernel = Vec::with_capacity(cols - pivot_cols.len());
    for fc in 0..cols {
        if pivot_cols.binary_search(&fc).is_ok() {
            continue;
        }
        // Back-substitute through the integer echelon rows in exact
        // rational arithmetic: free coordinate fc is 1, other free
        // coordinates 0.
        let mut v = vec![BigRational::zero(); cols];
        v[fc] = BigRational::one();
        for &(pr, pc) in ech.pivots.iter().rev() {
            let mut s = BigRational::zero();
            for j in (pc + 1)..cols {
                if !v[j].is_zero() && !ech.work[pr][j].is_zero() {
                    s += BigRational::from_integer(ech.work[pr][j].clone()) * &v[j];
                }
            }
            v[pc] = -s / BigRational::from_integer(ech.work[pr][pc].clone());
        }
        f.canonicalize_vector(&mut v);
        kernel.push(v);
    }
    kernel
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{is_prime, PrimeField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    /// Deterministic "random 60-bit prime" for field-agreement checks.
    fn random_60_bit_prime(rng: &mut ChaCha8Rng) -> u64 {
        let mut candidate: u64 = (rng.random::<u64>() >> 4) | (1 << 59) | 1;
        while !is_prime(candidate) {
            candidate += 2;
        }
        candidate
    }

    #[test]
    fn rank_of_empty_and_zero_matrices() {
        let f = Rationals;
        let empty = ExactMatrix::zero(&f, 0, 5);
        assert_eq!(rank(&f, &empty), 0);
        let zero = ExactMatrix::zero(&f, 3, 4);
        assert_eq!(rank(&f, &zero), 0);
        let no_cols = ExactMatrix::zero(&f, 4, 0);
        assert_eq!(rank(&f, &no_cols), 0);
        assert!(kernel_basis(&f, &no_cols).is_empty());
    }

    #[test]
    fn rank_identity_over_f7() {
        let f = PrimeField::new(7).unwrap();
        let m = ExactMatrix::from_i64_rows(&f, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        assert_eq!(rank(&f, &m), 3);
        assert!(kernel_basis(&f, &m).is_empty());
    }

    #[test]
    fn rank_of_three_by_two_jet_matrix_is_two() {
        // Rows (1,1), (2,0), (0,2): value and the two first-order
        // derivative conditions of a 2-term system; rank must be 2.
        let f = Rationals;
        let m = ExactMatrix::from_i64_rows(&f, &[&[1, 1], &[2, 0], &[0, 2]]).unwrap();
        assert_eq!(rank(&f, &m), 2);
        let fp = PrimeField::new(crate::field::DEFAULT_PRIME).unwrap();
        let mp = ExactMatrix::from_i64_rows(&fp, &[&[1, 1], &[2, 0], &[0, 2]]).unwrap();
        assert_eq!(rank(&fp, &mp), 2);
    }

    #[test]
    fn kernel_of_single_row_sum() {
        let f = Rationals;
        let m = ExactMatrix::from_i64_rows(&f, &[&[1, 1]]).unwrap();
        let k = kernel_basis(&f, &m);
        assert_eq!(k, vec![vec![q(1), q(-1)]]);
    }

    #[test]
    fn kernel_of_zero_row_is_standard_basis() {
        let f = Rationals;
        let m = ExactMatrix::from_i64_rows(&f, &[&[0, 0]]).unwrap();
        let k = kernel_basis(&f, &m);
        assert_eq!(k, vec![vec![q(1), q(0)], vec![q(0), q(1)]]);
    }

    #[test]
    fn kernel_vectors_annihilate_matrix() {
        let f = Rationals;
        let m = ExactMatrix::from_i64_rows(
            &f,
            &[&[2, 4, -2, 0], &[1, 2, -1, 3], &[3, 6, -3, 3]],
        )
        .unwrap();
        let k = kernel_basis(&f, &m);
        assert_eq!(rank(&f, &m) + k.len(), m.cols());
        for v in &k {
            assert!(m.apply(&f, v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn fraction_free_and_field_elimination_agree_over_rationals() {
        let f = Rationals;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let rows = rng.random_range(1..7usize);
            let cols = rng.random_range(1..7usize);
            let mut m = ExactMatrix::zero(&f, rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    // Mix of zeros, small integers and fractions.
                    let num = rng.random_range(-6..=6i64);
                    let den = rng.random_range(1..=4i64);
                    m.set(i, j, BigRational::new(BigInt::from(num), BigInt::from(den)));
                }
            }
            let fraction_free = bareiss_rank(&m);
            let generic = column_space_rank(&f, &m);
            assert_eq!(fraction_free, generic);
            let k_ff = bareiss_kernel(&f, &m);
            let k_rref = rref_kernel(&f, &m);
            assert_eq!(k_ff, k_rref);
            assert_eq!(fraction_free + k_ff.len(), cols);
            for v in &k_ff {
                assert!(m.apply(&f, v).iter().all(|x| x.is_zero()));
            }
        }
    }

    #[test]
    fn rational_and_prime_field_ranks_agree_on_integer_matrices() {
        let fq = Rationals;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_60_bit_prime(&mut rng);
        let fp = PrimeField::new(p).unwrap();
        for _ in 0..60 {
            let rows = rng.random_range(1..8usize);
            let cols = rng.random_range(1..8usize);
            let entries: Vec<Vec<i64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.random_range(-9..=9i64)).collect())
                .collect();
            let rows_q: Vec<&[i64]> = entries.iter().map(|r| r.as_slice()).collect();
            let mq = ExactMatrix::from_i64_rows(&fq, &rows_q).unwrap();
            let mp = ExactMatrix::from_i64_rows(&fp, &rows_q).unwrap();
            assert_eq!(rank(&fq, &mq), rank(&fp, &mp));
            // rank + nullity over the prime field as well
            let kp = kernel_basis(&fp, &mp);
            assert_eq!(rank(&fp, &mp) + kp.len(), cols);
            for v in &kp {
                assert!(mp.apply(&fp, v).iter().all(|x| fp.is_zero(x)));
            }
        }
    }

    #[test]
    fn early_exit_wide_matrix_full_row_rank() {
        // 3 rows, 50 columns, full row rank reached in the first 3 columns.
        let f = PrimeField::new(7).unwrap();
        let mut m = ExactMatrix::zero(&f, 3, 50);
        for i in 0..3 {
            m.set(i, i, f.one());
            for j in 3..50 {
                m.set(i, j, f.from_i64((i + j) as i64));
            }
        }
        assert_eq!(rank(&f, &m), 3);
    }
}
