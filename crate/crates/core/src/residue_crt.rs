//! Small-prime machinery: prime selection, splitting of the defining
//! polynomial modulo `p`, projections of integral elements into the residue
//! fields, and Chinese remaindering back to O_K.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{inv_mod, mul_mod, rat_to_residue, sym_mod, to_residue, PrimeSieve};
use crate::error::{Error, Result};
use crate::number_field::{FieldElement, NumberField};

/// Polynomials over `F_p`, coefficients low to high, no trailing zeros.
pub mod fp {
    use crate::arith::{inv_mod, mul_mod};

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn deg(a: &[u64]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    pub fn add(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
                .collect(),
        )
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
                .collect(),
        )
    }

    pub fn scale(a: &[u64], s: u64, p: u64) -> Vec<u64> {
        trim(a.iter().map(|&c| mul_mod(c, s, p)).collect())
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        trim(out)
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let db = deg(b).expect("division by the zero polynomial");
        let inv = inv_mod(b[db], p);
        let mut r = trim(a.to_vec());
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - db];
        while let Some(dr) = deg(&r) {
            if dr < db {
                break;
            }
            let c = mul_mod(r[dr], inv, p);
            q[dr - db] = c;
            for (i, &y) in b[..=db].iter().enumerate() {
                let t = mul_mod(c, y, p);
                r[dr - db + i] = (r[dr - db + i] + p - t) % p;
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        divrem(a, b, p).1
    }

    pub fn monic(a: &[u64], p: u64) -> Vec<u64> {
        match deg(a) {
            None => Vec::new(),
            Some(d) => scale(a, inv_mod(a[d], p), p),
        }
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        monic(&x, p)
    }

    /// Inverse of `a` modulo `m`, if they are coprime.
    pub fn inv_mod_poly(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
        let (mut r0, mut r1) = (trim(m.to_vec()), rem(a, m, p));
        let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1, p);
            let s = sub(&s0, &mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if deg(&r0) != Some(0) {
            return None;
        }
        let c = inv_mod(r0[0], p);
        Some(rem(&scale(&s0, c, p), m, p))
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut r = rem(&[1], m, p);
        let mut b = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(&r, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        r
    }
}

/// Monic irreducible factors of a squarefree monic `f` over `F_p`, sorted by
/// degree and then coefficients. Distinct-degree splitting followed by
/// Berlekamp's deterministic method on each equal-degree part.
pub fn factor_squarefree(f: &[u64], p: u64) -> Vec<Vec<u64>> {
    let f = fp::monic(f, p);
    let mut out = Vec::new();
    let mut rest = f;
    let x = vec![0, 1];
    let mut h = fp::rem(&x, &rest, p);
    let mut i = 1;
    while fp::deg(&rest).unwrap_or(0) >= 2 * i {
        h = fp::powmod(&h, p, &rest, p);
        let g = fp::gcd(&fp::sub(&h, &x, p), &rest, p);
        if fp::deg(&g).unwrap_or(0) > 0 {
            out.extend(equal_degree_split(&g, i, p));
            rest = fp::divrem(&rest, &g, p).0;
            h = fp::rem(&h, &rest, p);
        }
        i += 1;
    }
    if fp::deg(&rest).unwrap_or(0) > 0 {
        out.push(rest);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn equal_degree_split(g: &[u64], i: usize, p: u64) -> Vec<Vec<u64>> {
    let n = fp::deg(g).unwrap();
    if n == i {
        return vec![g.to_vec()];
    }
    let basis = berlekamp_basis(g, p);
    let r = basis.len();
    let mut factors = vec![g.to_vec()];
    for v in basis.iter().filter(|v| fp::deg(v).unwrap_or(0) > 0) {
        if factors.len() == r {
            break;
        }
        let mut next = Vec::new();
        for u in factors {
            if fp::deg(&u) == Some(i) {
                next.push(u);
                continue;
            }
            let mut rest = u;
            for s in 0..p {
                if fp::deg(&rest) == Some(i) {
                    break;
                }
                let w = fp::gcd(&rest, &fp::sub(v, &[s], p), p);
                let dw = fp::deg(&w).unwrap_or(0);
                if dw > 0 && Some(dw) != fp::deg(&rest) {
                    rest = fp::divrem(&rest, &w, p).0;
                    next.push(w);
                }
            }
            next.push(rest);
        }
        factors = next;
    }
    debug_assert_eq!(factors.len(), r);
    factors
}

/// Basis of `{v : v^p = v mod g}` as polynomials.
fn berlekamp_basis(g: &[u64], p: u64) -> Vec<Vec<u64>> {
    let n = fp::deg(g).unwrap();
    // q[j] = x^{pj} mod g; v is in the kernel iff sum_j v_j (q[j] - e_j) = 0
    let xp = fp::powmod(&[0, 1], p, g, p);
    let mut q = vec![fp::rem(&[1], g, p)];
    for j in 1..n {
        let prev = q[j - 1].clone();
        q.push(fp::mulmod(&prev, &xp, g, p));
    }
    // columns = j, rows = coefficient index
    let mut m: Vec<Vec<u64>> = (0..n)
        .map(|c| {
            (0..n)
                .map(|j| {
                    let qj = q[j].get(c).copied().unwrap_or(0);
                    let id = u64::from(c == j);
                    (qj + p - id) % p
                })
                .collect()
        })
        .collect();
    nullspace(&mut m, p)
        .into_iter()
        .map(fp::trim)
        .collect()
}

/// Right kernel of a square matrix over `F_p`.
fn nullspace(m: &mut [Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = inv_mod(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    let t = mul_mod(f, m[r][j], p);
                    m[i][j] = (m[i][j] + p - t) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; cols];
            v[fc] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[row][fc]) % p;
            }
            v
        })
        .collect()
}

/// Arithmetic in `F_p[x]/(m)` on dense coefficient vectors of length `deg m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueField {
    pub p: u64,
    pub modulus: Vec<u64>,
}

impl ResidueField {
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn reduce(&self, a: &[u64]) -> Vec<u64> {
        self.dense(fp::rem(a, &self.modulus, self.p))
    }

    fn dense(&self, mut a: Vec<u64>) -> Vec<u64> {
        a.resize(self.degree(), 0);
        a
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.degree()]
    }

    pub fn one(&self) -> Vec<u64> {
        self.reduce(&[1])
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + self.p - y) % self.p).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.dense(fp::mulmod(&fp::trim(a.to_vec()), &fp::trim(b.to_vec()), &self.modulus, self.p))
    }

    pub fn inv(&self, a: &[u64]) -> Option<Vec<u64>> {
        fp::inv_mod_poly(&fp::trim(a.to_vec()), &self.modulus, self.p).map(|v| self.dense(v))
    }

    /// Determinant by Gaussian elimination; consumes the matrix.
    pub fn det(&self, mut m: Vec<Vec<Vec<u64>>>) -> Vec<u64> {
        let n = m.len();
        let mut det = self.one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&r| !self.is_zero(&m[r][c])) else {
                return self.zero();
            };
            if pr != c {
                m.swap(pr, c);
                det = self.sub(&self.zero(), &det);
            }
            det = self.mul(&det, &m[c][c]);
            let inv = self.inv(&m[c][c]).expect("residue ring is a field");
            for r in (c + 1)..n {
                if self.is_zero(&m[r][c]) {
                    continue;
                }
                let f = self.mul(&m[r][c], &inv);
                for j in c..n {
                    let t = self.mul(&f, &m[c][j]);
                    m[r][j] = self.sub(&m[r][j], &t);
                }
            }
        }
        det
    }

    /// Rank together with the lexicographically first independent rows and,
    /// among those rows, the first independent columns.
    pub fn rank_profile(&self, m: &[Vec<Vec<u64>>]) -> (Vec<usize>, Vec<usize>) {
        let rows = self.independent(m);
        let sub: Vec<Vec<Vec<u64>>> = rows.iter().map(|&i| m[i].clone()).collect();
        let cols_n = m.first().map_or(0, |r| r.len());
        let transposed: Vec<Vec<Vec<u64>>> = (0..cols_n).map(|j| sub.iter().map(|r| r[j].clone()).collect()).collect();
        let cols = self.independent(&transposed);
        (rows, cols)
    }

    /// Greedy independent rows in order.
    fn independent(&self, m: &[Vec<Vec<u64>>]) -> Vec<usize> {
        let mut echelon: Vec<(usize, Vec<Vec<u64>>)> = Vec::new();
        let mut picked = Vec::new();
        for (i, row) in m.iter().enumerate() {
            let mut v = row.clone();
            for (pc, e) in &echelon {
                if self.is_zero(&v[*pc]) {
                    continue;
                }
                let f = v[*pc].clone();
                for (x, y) in v.iter_mut().zip(e) {
                    *x = self.sub(x, &self.mul(&f, y));
                }
            }
            if let Some(pc) = v.iter().position(|x| !self.is_zero(x)) {
                let inv = self.inv(&v[pc]).expect("residue ring is a field");
                let v: Vec<Vec<u64>> = v.iter().map(|x| self.mul(x, &inv)).collect();
                echelon.push((pc, v));
                picked.push(i);
            }
        }
        picked
    }
}

/// Splitting data of one unramified prime.
#[derive(Debug, Clone)]
pub struct ResidueSystem {
    pub p: u64,
    /// Monic irreducible factors of `f mod p`.
    pub factors: Vec<Vec<u64>>,
    pub fields: Vec<ResidueField>,
    /// `proj_table[i][j]`: image of the `j`-th basis element in the `i`-th field.
    pub proj_table: Vec<Vec<Vec<u64>>>,
    /// Images of the basis elements in `F_p[x]/(f)`.
    pub basis_images: Vec<Vec<u64>>,
    /// `e_i` with `e_i = 1 mod f_i` and `0` modulo the other factors.
    idempotents: Vec<Vec<u64>>,
    poly: Vec<u64>,
}

impl ResidueSystem {
    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    pub fn residue_degrees(&self) -> Vec<usize> {
        self.fields.iter().map(|f| f.degree()).collect()
    }
}

/// Factor `f mod p` and tabulate the projections of the integral basis.
pub fn split_prime(k: &NumberField, p: u64) -> Result<ResidueSystem> {
    if k.poly_discriminant().is_multiple_of(&BigInt::from(p)) {
        return Err(Error::RamifiedPrime(p));
    }
    let d = k.degree();
    let poly: Vec<u64> = k.poly().iter().map(|c| to_residue(c, p)).collect();
    let factors = factor_squarefree(&poly, p);
    let fields: Vec<ResidueField> = factors
        .iter()
        .map(|f| ResidueField {
            p,
            modulus: f.clone(),
        })
        .collect();
    // basis element j over the power basis, reduced mod p (denominators divide the index)
    let basis_images: Vec<Vec<u64>> = (0..d)
        .map(|j| {
            fp::trim(
                (0..d)
                    .map(|t| rat_to_residue(&k.basis().get(j, t), p).expect("p does not divide the index"))
                    .collect(),
            )
        })
        .collect();
    let proj_table = fields
        .iter()
        .map(|fld| basis_images.iter().map(|b| fld.reduce(b)).collect())
        .collect();
    let idempotents = factors
        .iter()
        .map(|fi| {
            let cofactor = fp::divrem(&poly, fi, p).0;
            let inv = fp::inv_mod_poly(&cofactor, fi, p).expect("factors are coprime");
            fp::mulmod(&cofactor, &inv, &poly, p)
        })
        .collect();
    Ok(ResidueSystem {
        p,
        factors,
        fields,
        proj_table,
        basis_images,
        idempotents,
        poly,
    })
}

/// Images of an integral coefficient vector in every residue field.
pub fn project_coeffs(b: &[BigInt], sys: &ResidueSystem) -> Vec<Vec<u64>> {
    let r: Vec<u64> = b.iter().map(|c| to_residue(c, sys.p)).collect();
    project_residues(&r, sys)
}

/// Same as `project_coeffs` for coefficients already reduced mod `p`.
pub fn project_residues(r: &[u64], sys: &ResidueSystem) -> Vec<Vec<u64>> {
    let p = sys.p;
    sys.fields
        .iter()
        .zip(&sys.proj_table)
        .map(|(fld, table)| {
            let mut acc = fld.zero();
            for (&c, img) in r.iter().zip(table) {
                if c == 0 {
                    continue;
                }
                for (a, &x) in acc.iter_mut().zip(img) {
                    *a = (*a + mul_mod(c, x, p)) % p;
                }
            }
            acc
        })
        .collect()
}

pub fn project_element(beta: &FieldElement, sys: &ResidueSystem) -> Result<Vec<Vec<u64>>> {
    if !beta.is_integral() {
        return Err(Error::NotIntegral);
    }
    Ok(project_coeffs(beta.coeffs(), sys))
}

/// The element of `F_p[x]/(f)` with the given image in every factor, as a
/// dense vector of length `d`.
pub fn crt_combine_factors(values: &[Vec<u64>], sys: &ResidueSystem) -> Vec<u64> {
    let p = sys.p;
    let mut acc: Vec<u64> = Vec::new();
    for (v, e) in values.iter().zip(&sys.idempotents) {
        acc = fp::add(&acc, &fp::mulmod(&fp::trim(v.clone()), e, &sys.poly, p), p);
    }
    acc.resize(sys.degree(), 0);
    acc
}

/// Primes used for one reconstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimePlan {
    /// Upper bound on `log2 B`.
    pub log_bound: BigRational,
    pub primes: Vec<u64>,
    pub product: BigInt,
}

/// Consecutive primes not dividing `disc(f)` whose product exceeds
/// `2^(ceil(log_b) + 1)`.
pub fn plan_primes(k: &NumberField, log_b: &BigRational) -> PrimePlan {
    let e = log_b.ceil().to_integer().to_u64().unwrap_or(0) + 1;
    let target = BigInt::one() << e;
    let disc = k.poly_discriminant().abs();
    let mut primes = Vec::new();
    let mut product = BigInt::one();
    let mut sieve = PrimeSieve::new();
    for p in sieve.from(2) {
        if product > target {
            break;
        }
        if disc.is_multiple_of(&BigInt::from(p)) {
            continue;
        }
        primes.push(p);
        product *= p;
    }
    PrimePlan {
        log_bound: log_b.clone(),
        primes,
        product,
    }
}

/// Coefficientwise CRT of one dense polynomial per prime, lifted into
/// `(-N/2, N/2]`.
pub fn crt_combine_primes(values: &[Vec<u64>], plan: &PrimePlan) -> Vec<BigInt> {
    let d = values.first().map_or(0, |v| v.len());
    let mut acc = vec![BigInt::zero(); d];
    let mut modulus = BigInt::one();
    for (v, &p) in values.iter().zip(&plan.primes) {
        let pb = BigInt::from(p);
        let m_inv = inv_mod(to_residue(&modulus, p), p);
        for (a, &r) in acc.iter_mut().zip(v) {
            let cur = to_residue(a, p);
            let t = mul_mod((r + p - cur) % p, m_inv, p);
            *a += &modulus * t;
        }
        modulus *= pb;
    }
    acc.iter().map(|a| sym_mod(a, &modulus)).collect()
}

/// Element of O_K whose power-basis expansion is `poly` modulo `N`, with
/// coefficients lifted into `(-N/2, N/2]`.
pub fn lift_to_field(poly: &[BigInt], n: &BigInt, k: &NumberField) -> FieldElement {
    let d = k.degree();
    let m = k.power_to_basis();
    let mut c = vec![BigInt::zero(); d];
    for (t, x) in poly.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (ci, mij) in c.iter_mut().zip(m.row(t)) {
            *ci += x * mij;
        }
    }
    FieldElement::new(c.iter().map(|x| sym_mod(x, n)).collect(), BigInt::one())
}
