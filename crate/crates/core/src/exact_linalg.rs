//! Exact integer and rational matrix kernels.
//!
//! The Hermite form used everywhere is lower triangular: row `i` has its last
//! nonzero entry on the diagonal, the diagonal is positive, and every entry
//! below a diagonal entry is reduced into `[0, diag)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, inv_mod, mul_mod, to_residue, xgcd, PrimeSieve};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", r.join(" "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn scalar(n: usize, s: &BigInt) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = s.clone();
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend(row);
        }
        IntMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [BigInt] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimensions");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (k, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = self.get(k, j);
                if !b.is_zero() {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols, "stacking needs equal column counts");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// `|A| = max |a_ij|`.
    pub fn max_abs(&self) -> BigInt {
        self.data
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn content(&self) -> BigInt {
        arith::gcd_all(self.data.iter())
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| ((i + 1)..self.cols).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        IntMatrix::from_rows(
            rows.iter()
                .map(|&i| cols.iter().map(|&j| self.get(i, j).clone()).collect())
                .collect(),
        )
    }
}

/// Matrix with a common positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    numerator: IntMatrix,
    denominator: BigInt,
}

impl RatMatrix {
    pub fn new(numerator: IntMatrix, denominator: BigInt) -> Self {
        assert!(!denominator.is_zero(), "zero denominator");
        let (mut numerator, mut denominator) = (numerator, denominator);
        if denominator.is_negative() {
            numerator = numerator.scale(&BigInt::from(-1));
            denominator = -denominator;
        }
        let g = numerator.content().gcd(&denominator);
        if !g.is_one() && !g.is_zero() {
            numerator = IntMatrix {
                rows: numerator.rows,
                cols: numerator.cols,
                data: numerator.data.iter().map(|x| x / &g).collect(),
            };
            denominator /= &g;
        }
        if numerator.is_zero() {
            denominator = BigInt::one();
        }
        RatMatrix {
            numerator,
            denominator,
        }
    }

    pub fn from_rational_rows(rows: &[Vec<BigRational>]) -> Self {
        let mut den = BigInt::one();
        for r in rows {
            for q in r {
                den = den.lcm(q.denom());
            }
        }
        let num = IntMatrix::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|q| q.numer() * (&den / q.denom()))
                        .collect()
                })
                .collect(),
        );
        RatMatrix::new(num, den)
    }

    pub fn numerator(&self) -> &IntMatrix {
        &self.numerator
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn rows(&self) -> usize {
        self.numerator.rows
    }

    pub fn cols(&self) -> usize {
        self.numerator.cols
    }

    pub fn get(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(self.numerator.get(i, j).clone(), self.denominator.clone())
    }

    pub fn to_rational_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Exact inverse by Gauss-Jordan elimination over the rationals.
    pub fn inverse(&self) -> Result<RatMatrix> {
        let n = self.rows();
        if n != self.cols() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let mut a = self.to_rational_rows();
        let mut inv: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero()).ok_or(Error::Singular)?;
            a.swap(c, p);
            inv.swap(c, p);
            let piv = a[c][c].clone();
            for j in 0..n {
                a[c][j] = &a[c][j] / &piv;
                inv[c][j] = &inv[c][j] / &piv;
            }
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for j in 0..n {
                    let t = &f * &a[c][j];
                    a[r][j] -= t;
                    let t = &f * &inv[c][j];
                    inv[r][j] -= t;
                }
            }
        }
        Ok(RatMatrix::from_rational_rows(&inv))
    }
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(a: &IntMatrix) -> BigInt {
    assert_eq!(a.rows, a.cols, "determinant of a non-square matrix");
    let n = a.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.to_rows();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Rows forming a maximal independent set found by fraction-free elimination
/// with row pivoting, together with the absolute determinant of the selected
/// square submatrix. Fails when the columns are dependent.
fn independent_rows(a: &IntMatrix) -> Result<(Vec<usize>, BigInt)> {
    let (n, m) = (a.rows, a.cols);
    if n < m {
        return Err(Error::RankDeficient);
    }
    let mut rows = a.to_rows();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut prev = BigInt::one();
    for k in 0..m {
        let p = (k..n)
            .find(|&r| !rows[r][k].is_zero())
            .ok_or(Error::RankDeficient)?;
        rows.swap(p, k);
        idx.swap(p, k);
        for i in (k + 1)..n {
            for j in (k + 1)..m {
                let v = (&rows[i][j] * &rows[k][k] - &rows[i][k] * &rows[k][j]) / &prev;
                rows[i][j] = v;
            }
            rows[i][k] = BigInt::zero();
        }
        prev = rows[k][k].clone();
    }
    idx.truncate(m);
    Ok((idx, prev.abs()))
}

/// Hermite normal form of a matrix of full column rank.
///
/// A nonsingular row subset yields a multiple `D` of the lattice determinant,
/// after which the elimination runs modulo `D` with the running modulus
/// divided by each diagonal entry as it is fixed.
pub fn hnf(a: &IntMatrix) -> Result<IntMatrix> {
    let (_, d) = independent_rows(a)?;
    Ok(hnf_mod_det(a, &d))
}

fn reduce_row_mod(row: &mut [BigInt], r: &BigInt) {
    for x in row.iter_mut() {
        *x = x.mod_floor(r);
    }
}

/// Hermite form given a positive multiple `d` of the lattice determinant.
fn hnf_mod_det(a: &IntMatrix, d: &BigInt) -> IntMatrix {
    let (n, m) = (a.rows, a.cols);
    let mut gens = a.to_rows();
    let mut r = d.clone();
    for g in gens.iter_mut() {
        reduce_row_mod(g, &r);
    }
    let mut w: Vec<Vec<BigInt>> = vec![Vec::new(); m];
    let mut k = n;
    for i in (0..m).rev() {
        if k == 0 {
            // generators exhausted: the remaining coordinates are covered by r
            let mut row = vec![BigInt::zero(); m];
            row[i] = r.clone();
            w[i] = row;
            finish_row(&mut w, i, m);
            continue;
        }
        let piv = k - 1;
        for j in (0..piv).rev() {
            if gens[j][i].is_zero() {
                continue;
            }
            let (g, u, v) = xgcd(&gens[piv][i], &gens[j][i]);
            let ak = &gens[piv][i] / &g;
            let aj = &gens[j][i] / &g;
            let mut b: Vec<BigInt> = gens[piv]
                .iter()
                .zip(&gens[j])
                .map(|(x, y)| &u * x + &v * y)
                .collect();
            let mut nj: Vec<BigInt> = gens[j]
                .iter()
                .zip(&gens[piv])
                .map(|(y, x)| &ak * y - &aj * x)
                .collect();
            reduce_row_mod(&mut b, &r);
            reduce_row_mod(&mut nj, &r);
            gens[piv] = b;
            gens[j] = nj;
        }
        let (g, u, _) = xgcd(&gens[piv][i], &r);
        let mut row: Vec<BigInt> = gens[piv].iter().map(|x| (&u * x).mod_floor(&r)).collect();
        for x in row.iter_mut().skip(i + 1) {
            *x = BigInt::zero();
        }
        if row[i].is_zero() {
            row[i] = r.clone();
        }
        w[i] = row;
        finish_row(&mut w, i, m);
        r /= &g;
        k -= 1;
    }
    IntMatrix::from_rows(w)
}

/// Reduce the column-`i` entries of the already fixed rows below `i`.
fn finish_row(w: &mut [Vec<BigInt>], i: usize, m: usize) {
    let piv = w[i][i].clone();
    for j in (i + 1)..m {
        let q = w[j][i].div_floor(&piv);
        if q.is_zero() {
            continue;
        }
        let (head, tail) = w.split_at_mut(j);
        for (x, y) in tail[0].iter_mut().zip(&head[i]) {
            *x -= &q * y;
        }
    }
}

/// Howell form of the row span over `Z/modulus`, in row echelon shape with
/// pivots moving right, normalized pivots dividing the modulus, entries above
/// each pivot reduced into `[0, pivot)`. Only nonzero rows are returned.
pub fn howell(a: &IntMatrix, modulus: &BigInt) -> IntMatrix {
    assert!(modulus > &BigInt::one(), "Howell form needs modulus >= 2");
    let n = modulus;
    let m = a.cols;
    let mut rows: Vec<Vec<BigInt>> = a
        .to_rows()
        .into_iter()
        .map(|mut r| {
            reduce_row_mod(&mut r, n);
            r
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut top = 0usize;
    for c in 0..m {
        let Some(k) = (top..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
            continue;
        };
        rows.swap(top, k);
        for k in (top + 1)..rows.len() {
            if rows[k][c].is_zero() {
                continue;
            }
            let (g, s, t) = xgcd(&rows[top][c], &rows[k][c]);
            let ag = &rows[top][c] / &g;
            let bg = &rows[k][c] / &g;
            let mut nt: Vec<BigInt> = rows[top]
                .iter()
                .zip(&rows[k])
                .map(|(x, y)| &s * x + &t * y)
                .collect();
            let mut nk: Vec<BigInt> = rows[top]
                .iter()
                .zip(&rows[k])
                .map(|(x, y)| &bg * x - &ag * y)
                .collect();
            reduce_row_mod(&mut nt, n);
            reduce_row_mod(&mut nk, n);
            rows[top] = nt;
            rows[k] = nk;
        }
        let p = rows[top][c].clone();
        let g = p.gcd(n);
        let u = unit_normalizer(&p, n);
        let mut pr: Vec<BigInt> = rows[top].iter().map(|x| (x * &u).mod_floor(n)).collect();
        debug_assert_eq!(pr[c], g);
        let ann = n / &g;
        rows[top] = pr.clone();
        for x in pr.iter_mut() {
            *x = (&*x * &ann).mod_floor(n);
        }
        if pr.iter().any(|x| !x.is_zero()) {
            rows.push(pr);
        }
        pivots.push(c);
        top += 1;
    }
    rows.truncate(top);
    for i in 0..top {
        let c = pivots[i];
        let p = rows[i][c].clone();
        for h in 0..i {
            let q = rows[h][c].div_floor(&p);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = rows.split_at_mut(i);
            for (x, y) in head[h].iter_mut().zip(&tail[0]) {
                *x = (&*x - &q * y).mod_floor(n);
            }
        }
    }
    IntMatrix::from_rows(if rows.is_empty() {
        Vec::new()
    } else {
        rows
    })
    .with_cols(m)
}

impl IntMatrix {
    fn with_cols(mut self, c: usize) -> Self {
        if self.rows == 0 {
            self.cols = c;
        }
        self
    }
}

/// A unit `u` modulo `n` with `u*p = gcd(p, n) (mod n)`.
fn unit_normalizer(p: &BigInt, n: &BigInt) -> BigInt {
    let g = p.gcd(n);
    let pp = p / &g;
    let nn = n / &g;
    let u0 = if nn.is_one() {
        BigInt::zero()
    } else {
        let (_, x, _) = xgcd(&pp, &nn);
        x.mod_floor(&nn)
    };
    let mut u = u0;
    loop {
        if u.gcd(n).is_one() {
            return u;
        }
        u += &nn;
    }
}

/// Hermite form of `A` stacked over `lambda * I`, computed from the Howell
/// form modulo `lambda^2`. Requires `lambda * Z^m` to lie in the row span of
/// `A`; without it the result is meaningless.
pub fn hnf_with_modulus(a: &IntMatrix, lambda: &BigInt) -> Result<IntMatrix> {
    let m = a.cols;
    let l = lambda.abs();
    if l.is_zero() {
        return Err(Error::RankDeficient);
    }
    if l.is_one() {
        return Ok(IntMatrix::identity(m));
    }
    let modulus = &l * &l;
    let reversed = IntMatrix::from_rows(
        (0..a.rows)
            .map(|i| a.row(i).iter().rev().cloned().collect())
            .collect(),
    )
    .with_cols(m);
    let h = howell(&reversed, &modulus);
    if h.rows != m {
        return Err(Error::RankDeficient);
    }
    let rows: Vec<Vec<BigInt>> = (0..m)
        .rev()
        .map(|i| h.row(i).iter().rev().cloned().collect())
        .collect();
    let out = IntMatrix::from_rows(rows);
    if (0..m).any(|i| out.get(i, i).is_zero()) {
        return Err(Error::RankDeficient);
    }
    Ok(out)
}

fn hadamard_bound(a: &IntMatrix, b: &[BigInt]) -> BigInt {
    // product over columns of max(|col|, |b|, 1) bounds det(A) and every Cramer numerator
    let bn: BigInt = b.iter().map(|x| x * x).sum();
    let mut h = BigInt::one();
    for j in 0..a.cols {
        let c: BigInt = (0..a.rows).map(|i| a.get(i, j) * a.get(i, j)).sum();
        let c = c.max(bn.clone()).max(BigInt::one());
        h *= c;
    }
    arith::isqrt_ceil(&h)
}

/// Inverse of `a` modulo the prime `p`, or `None` if singular there.
fn inverse_mod_p(a: &IntMatrix, p: u64) -> Option<Vec<Vec<u64>>> {
    let n = a.rows;
    let mut m: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut r: Vec<u64> = a.row(i).iter().map(|x| to_residue(x, p)).collect();
            r.extend((0..n).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| m[r][c] != 0)?;
        m.swap(c, piv);
        let inv = inv_mod(m[c][c], p);
        for x in m[c].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for r in 0..n {
            if r == c || m[r][c] == 0 {
                continue;
            }
            let f = m[r][c];
            for j in 0..2 * n {
                let t = mul_mod(f, m[c][j], p);
                m[r][j] = (m[r][j] + p - t) % p;
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

const DIXON_FIRST_PRIME: u64 = 65537;

/// Exact rational solution of `A x = b` by p-adic lifting.
pub fn dixon_solve(a: &IntMatrix, b: &[BigInt]) -> Result<Vec<BigRational>> {
    let n = a.rows;
    if n != a.cols || b.len() != n {
        return Err(Error::Dimension("dixon_solve needs square A and matching b".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut sieve = PrimeSieve::new();
    let mut tried = 0;
    for p in sieve.from(DIXON_FIRST_PRIME) {
        tried += 1;
        if let Some(cinv) = inverse_mod_p(a, p) {
            if let Some(x) = dixon_lift(a, b, &cinv, p) {
                return Ok(x);
            }
        }
        if tried > 32 {
            break;
        }
    }
    // every candidate prime failed: either A is singular or extremely unlucky
    if det(a).is_zero() {
        Err(Error::Singular)
    } else {
        Ok(gauss_solve(a, b))
    }
}

fn dixon_lift(a: &IntMatrix, b: &[BigInt], cinv: &[Vec<u64>], p: u64) -> Option<Vec<BigRational>> {
    let n = a.rows;
    let h = hadamard_bound(a, b);
    let target = BigInt::from(2) * &h * &h;
    let pb = BigInt::from(p);
    let mut r: Vec<BigInt> = b.to_vec();
    let mut acc = vec![BigInt::zero(); n];
    let mut pk = BigInt::one();
    while pk <= target {
        let rm: Vec<u64> = r.iter().map(|x| to_residue(x, p)).collect();
        let y: Vec<BigInt> = (0..n)
            .map(|i| {
                let mut s = 0u128;
                for j in 0..n {
                    s = (s + cinv[i][j] as u128 * rm[j] as u128) % p as u128;
                }
                BigInt::from(s as u64)
            })
            .collect();
        let ay = a.mul_vec(&y);
        for i in 0..n {
            acc[i] += &pk * &y[i];
            r[i] = (&r[i] - &ay[i]) / &pb;
        }
        pk *= &pb;
    }
    let x: Option<Vec<BigRational>> = acc
        .iter()
        .map(|v| arith::rational_reconstruction(v, &pk, &h, &h))
        .collect();
    let x = x?;
    // exact check
    for i in 0..n {
        let s: BigRational = (0..n)
            .map(|j| &x[j] * BigRational::from_integer(a.get(i, j).clone()))
            .sum();
        if s != BigRational::from_integer(b[i].clone()) {
            return None;
        }
    }
    Some(x)
}

fn gauss_solve(a: &IntMatrix, b: &[BigInt]) -> Vec<BigRational> {
    let n = a.rows;
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut r: Vec<BigRational> = a
                .row(i)
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect();
            r.push(BigRational::from_integer(b[i].clone()));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero()).expect("nonsingular");
        m.swap(c, p);
        let piv = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x = &*x / &piv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for j in c..=n {
                    let t = &f * &m[c][j];
                    m[r][j] -= t;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n].clone()).collect()
}

/// Exact rational solution of `x A = b`.
pub fn dixon_solve_left(a: &IntMatrix, b: &[BigInt]) -> Result<Vec<BigRational>> {
    dixon_solve(&a.transpose(), b)
}

/// Integral solution of `H X = B` for lower triangular `H`, with the entries
/// of `X` reduced into `(-modulus/2, modulus/2]`. Each row is solved exactly
/// before reduction, so a non-integral quotient is reported rather than
/// silently wrapped.
pub fn back_substitute(h: &IntMatrix, b: &IntMatrix, modulus: &BigInt) -> Result<IntMatrix> {
    let n = h.rows;
    if h.cols != n || b.rows != n {
        return Err(Error::Dimension("back_substitute shapes".into()));
    }
    if !h.is_lower_triangular() || (0..n).any(|i| h.get(i, i).is_zero()) {
        return Err(Error::NotTriangular);
    }
    let k = b.cols;
    let mut exact = IntMatrix::zeros(n, k);
    for i in 0..n {
        for c in 0..k {
            let mut s = b.get(i, c).clone();
            for j in 0..i {
                s -= h.get(i, j) * exact.get(j, c);
            }
            let (q, rem) = s.div_rem(h.get(i, i));
            if !rem.is_zero() {
                return Err(Error::NotDivisible(i));
            }
            exact.set(i, c, q);
        }
    }
    let m = modulus.abs();
    let data = exact.data.iter().map(|x| arith::sym_mod(x, &m)).collect();
    Ok(IntMatrix {
        rows: n,
        cols: k,
        data,
    })
}

/// Smith normal form over Z: a diagonal matrix of the same shape whose
/// nonzero diagonal entries are positive and each divides the next.
pub fn z_snf(a: &IntMatrix) -> IntMatrix {
    let (n, m) = (a.rows, a.cols);
    let mut x = a.to_rows();
    let t_max = n.min(m);
    for t in 0..t_max {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..m {
                    if !x[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| x[i][j].abs() < x[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                break;
            };
            x.swap(t, bi);
            for row in x.iter_mut() {
                row.swap(t, bj);
            }
            let mut clean = true;
            for i in (t + 1)..n {
                let q = x[i][t].div_floor(&x[t][t]);
                if !q.is_zero() {
                    let (head, tail) = x.split_at_mut(i);
                    for (y, z) in tail[0].iter_mut().zip(&head[t]) {
                        *y -= &q * z;
                    }
                }
                if !x[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in (t + 1)..m {
                let q = x[t][j].div_floor(&x[t][t]);
                if !q.is_zero() {
                    for row in x.iter_mut() {
                        let v = &q * &row[t];
                        row[j] -= v;
                    }
                }
                if !x[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the trailing block
            let mut bad = None;
            'scan: for i in (t + 1)..n {
                for j in (t + 1)..m {
                    if !x[i][j].is_multiple_of(&x[t][t]) {
                        bad = Some(i);
                        break 'scan;
                    }
                }
            }
            match bad {
                Some(i) => {
                    let (head, tail) = x.split_at_mut(i);
                    for (y, z) in head[t].iter_mut().zip(&tail[0]) {
                        *y += z;
                    }
                }
                None => break,
            }
        }
    }
    let mut out = IntMatrix::zeros(n, m);
    for t in 0..t_max {
        out.set(t, t, x[t][t].abs());
    }
    out
}
