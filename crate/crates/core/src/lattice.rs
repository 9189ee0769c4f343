//! Embeddings, the rounded trace form and LLL reduction of ideal bases.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_linalg::{IntMatrix, RatMatrix};
use crate::ideal::FractionalIdeal;
use crate::number_field::{FieldElement, NumberField};

/// Extra fixed-point bits carried beyond the target precision.
const GUARD: u64 = 64;
/// Number of precision doublings tried before giving up on a reduction.
const MAX_RETRIES: usize = 4;

/// Certified approximation of the Gram matrix of the integral basis under
/// `T2`: `G = g / 2^p` up to an absolute error `err / 2^p` per entry.
#[derive(Debug, Clone)]
pub struct Gram {
    p: u64,
    g: IntMatrix,
    err: BigInt,
    approx: Vec<Vec<f64>>,
}

impl Gram {
    pub fn precision(&self) -> u64 {
        self.p
    }

    pub fn scaled(&self) -> &IntMatrix {
        &self.g
    }

    pub fn error_units(&self) -> &BigInt {
        &self.err
    }

    pub fn approx(&self) -> &[Vec<f64>] {
        &self.approx
    }

    fn quad(&self, a: &[BigInt]) -> (BigInt, BigInt) {
        let v = self.g.vec_mul(a);
        let q: BigInt = v.iter().zip(a).map(|(x, y)| x * y).sum();
        let l1: BigInt = a.iter().map(|x| x.abs()).sum();
        (q, &self.err * &l1 * &l1)
    }

    /// Certified upper bound of `T2(a / den)` for an integral coefficient vector.
    pub fn t2_upper(&self, a: &[BigInt], den: &BigInt) -> BigRational {
        let (q, e) = self.quad(a);
        BigRational::new(q + e, (BigInt::one() << self.p) * den * den)
    }

    /// Certified lower bound, clamped at zero.
    pub fn t2_lower(&self, a: &[BigInt], den: &BigInt) -> BigRational {
        let (q, e) = self.quad(a);
        let v = q - e;
        if v.is_negative() {
            return BigRational::zero();
        }
        BigRational::new(v, (BigInt::one() << self.p) * den * den)
    }

    /// Floating point `T2` of an integral coefficient vector.
    pub fn approx_t2(&self, a: &[BigInt]) -> f64 {
        let x: Vec<f64> = a.iter().map(|c| c.to_f64().unwrap_or(f64::MAX)).collect();
        let mut s = 0.0;
        for (i, xi) in x.iter().enumerate() {
            for (j, xj) in x.iter().enumerate() {
                s += xi * self.approx[i][j] * xj;
            }
        }
        s
    }

    /// `(C1, C2)` with `||alpha|| <= C1 * max|a_i|` and `max|a_i| <= C2 * ||alpha||`,
    /// both rounded up with a safety margin.
    pub fn inequality_constants(&self) -> (BigRational, BigRational) {
        let d = self.approx.len();
        let c1: f64 = (0..d).map(|i| self.approx[i][i].max(0.0).sqrt()).sum();
        let inv = invert_f64(&self.approx);
        let c2 = (0..d).map(|i| inv[i][i]).fold(0.0f64, f64::max).max(0.0).sqrt();
        (round_up(c1), round_up(c2))
    }
}

fn round_up(x: f64) -> BigRational {
    let v = (x * (1.0 + 1e-9) * 1024.0).ceil() as i64 + 1;
    BigRational::new(BigInt::from(v), BigInt::from(1024))
}

fn invert_f64(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| a[x][c].abs().partial_cmp(&a[y][c].abs()).unwrap())
            .unwrap();
        a.swap(c, p);
        let pv = a[c][c];
        for x in a[c].iter_mut() {
            *x /= pv;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                if f != 0.0 {
                    let pr = a[c].clone();
                    for (x, y) in a[r].iter_mut().zip(&pr) {
                        *x -= f * y;
                    }
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Reduction context for the rounded form `x -> ||x R_e||^2`.
#[derive(Debug, Clone)]
pub struct LatticeContext {
    e: u64,
    r_e: IntMatrix,
    gram_e: IntMatrix,
    delta: (i64, i64),
    eta: BigRational,
    theta: BigRational,
    ell_sq: BigRational,
    c_quality: BigRational,
}

impl LatticeContext {
    pub fn e(&self) -> u64 {
        self.e
    }

    /// `round(2^e R)` with `R R^t` the Cholesky factorization of the Gram matrix.
    pub fn r_e(&self) -> &IntMatrix {
        &self.r_e
    }

    /// `R_e R_e^t`, the integral form the reduction runs on.
    pub fn gram_e(&self) -> &IntMatrix {
        &self.gram_e
    }

    pub fn delta(&self) -> BigRational {
        BigRational::new(BigInt::from(self.delta.0), BigInt::from(self.delta.1))
    }

    pub fn eta(&self) -> &BigRational {
        &self.eta
    }

    pub fn theta(&self) -> &BigRational {
        &self.theta
    }

    /// Square of the quality constant: `1 / (delta - eta^2)` for `theta = 0`.
    pub fn ell_sq(&self) -> &BigRational {
        &self.ell_sq
    }

    /// Multiplicative slack covering the distance between the rounded form and `T2`.
    pub fn c_quality(&self) -> &BigRational {
        &self.c_quality
    }
}

pub fn default_precision(d: usize, disc: &BigInt) -> u64 {
    2 * (d as u64 + disc.abs().bits()) + 64
}

/// Build the Gram matrix and reduction context for a field at precision `e`.
pub(crate) fn build_parts(poly: &[BigInt], basis: &RatMatrix, e: u64) -> (Gram, LatticeContext) {
    let mut e = e.max(1);
    loop {
        let gram = embedding_gram(poly, basis, e);
        if let Some(ctx) = context_from_gram(&gram, e) {
            return (gram, ctx);
        }
        e *= 2;
    }
}

/// Fresh context for `k` at precision `e`, used when a reduction needs more bits.
pub fn build_context(k: &NumberField, e: u64) -> LatticeContext {
    build_parts(k.poly(), k.basis(), e).1
}

fn context_from_gram(gram: &Gram, e: u64) -> Option<LatticeContext> {
    let d = gram.g.rows();
    let p = gram.p;
    assert!(p > e);
    // fixed-point Cholesky at scale 2^p
    let mut r = vec![vec![BigInt::zero(); d]; d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = gram.g.get(i, j).clone() << p;
            for k in 0..j {
                s -= &r[i][k] * &r[j][k];
            }
            if i == j {
                if !s.is_positive() {
                    return None;
                }
                r[i][i] = s.sqrt();
                if r[i][i].is_zero() {
                    return None;
                }
            } else {
                r[i][j] = s.div_floor(&r[j][j]);
            }
        }
    }
    let shift = p - e;
    let half = BigInt::one() << (shift - 1);
    let r_e = IntMatrix::from_rows(
        r.iter()
            .map(|row| row.iter().map(|x| (x + &half) >> shift).collect())
            .collect(),
    );
    if (0..d).any(|i| r_e.get(i, i).is_zero()) {
        return None;
    }
    let gram_e = r_e.mul(&r_e.transpose());
    let delta = (99, 100);
    let eta = BigRational::new(BigInt::from(501), BigInt::from(1000));
    let dl = BigRational::new(BigInt::from(delta.0), BigInt::from(delta.1));
    let ell_sq = (dl - &eta * &eta).recip();
    let c_quality = BigRational::one() + BigRational::new(BigInt::one(), BigInt::one() << 32);
    Some(LatticeContext {
        e,
        r_e,
        gram_e,
        delta,
        eta,
        theta: BigRational::zero(),
        ell_sq,
        c_quality,
    })
}

/// Complex number in fixed point with scale `2^p`.
#[derive(Clone, Debug)]
struct Fix {
    re: BigInt,
    im: BigInt,
}

impl Fix {
    fn zero() -> Fix {
        Fix { re: BigInt::zero(), im: BigInt::zero() }
    }

    fn from_int(n: &BigInt, p: u64) -> Fix {
        Fix { re: n << p, im: BigInt::zero() }
    }

    fn from_c64(z: Complex64, p: u64) -> Fix {
        Fix { re: f64_fixed(z.re, p), im: f64_fixed(z.im, p) }
    }

    fn add(&self, o: &Fix) -> Fix {
        Fix { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    fn sub(&self, o: &Fix) -> Fix {
        Fix { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    fn mul(&self, o: &Fix, p: u64) -> Fix {
        Fix {
            re: (&self.re * &o.re - &self.im * &o.im) >> p,
            im: (&self.re * &o.im + &self.im * &o.re) >> p,
        }
    }

    fn div(&self, o: &Fix, p: u64) -> Option<Fix> {
        let den = &o.re * &o.re + &o.im * &o.im;
        if den.is_zero() {
            return None;
        }
        let re = (&self.re * &o.re + &self.im * &o.im) << p;
        let im = (&self.im * &o.re - &self.re * &o.im) << p;
        Some(Fix { re: re.div_floor(&den), im: im.div_floor(&den) })
    }

    fn mag_bits(&self) -> u64 {
        self.re.abs().bits().max(self.im.abs().bits())
    }
}

fn f64_fixed(x: f64, p: u64) -> BigInt {
    use num_traits::FromPrimitive;
    let m = BigInt::from_f64((x * (1u64 << 52) as f64).round()).unwrap_or_default();
    if p >= 52 {
        m << (p - 52)
    } else {
        m >> (52 - p)
    }
}

/// Complex roots of the monic `poly` in double precision (Aberth iteration).
fn roots_f64(poly: &[BigInt]) -> Vec<Complex64> {
    let d = poly.len() - 1;
    let c: Vec<f64> = poly.iter().map(|x| x.to_f64().unwrap_or(f64::MAX)).collect();
    let radius = 1.0 + c[..d].iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius * 0.5, 0.4 + std::f64::consts::TAU * k as f64 / d as f64))
        .collect();
    let eval = |x: Complex64| {
        let mut v = Complex64::new(1.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for i in (0..d).rev() {
            dv = dv * x + v;
            v = v * x + c[i];
        }
        (v, dv)
    };
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for k in 0..d {
            let (v, dv) = eval(z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let w = v / dv;
            let s: Complex64 = (0..d).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = w / (1.0 - w * s);
            if step.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Simultaneous refinement of all roots at fixed-point precision `p`.
fn refine_roots(poly: &[BigInt], start: &[Complex64], p: u64) -> Vec<Fix> {
    let d = poly.len() - 1;
    let coeffs: Vec<Fix> = poly.iter().map(|c| Fix::from_int(c, p)).collect();
    let mut z: Vec<Fix> = start.iter().map(|&s| Fix::from_c64(s, p)).collect();
    let one = Fix::from_int(&BigInt::one(), p);
    for _ in 0..(4 * 64 + 8 * p as usize) {
        let mut worst = 0u64;
        for k in 0..d {
            let mut v = coeffs[d].clone();
            let mut dv = Fix::zero();
            for i in (0..d).rev() {
                dv = dv.mul(&z[k], p).add(&v);
                v = v.mul(&z[k], p).add(&coeffs[i]);
            }
            let Some(w) = v.div(&dv, p) else { continue };
            let mut s = Fix::zero();
            for j in 0..d {
                if j != k {
                    if let Some(t) = one.div(&z[k].sub(&z[j]), p) {
                        s = s.add(&t);
                    }
                }
            }
            let den = one.sub(&w.mul(&s, p));
            let Some(step) = w.div(&den, p) else { continue };
            worst = worst.max(step.mag_bits());
            z[k] = z[k].sub(&step);
        }
        if worst <= 4 {
            break;
        }
    }
    z
}

/// Gram matrix of the basis at fixed-point scale `2^p` from roots at scale `2^p`.
fn gram_from_roots(basis: &RatMatrix, roots: &[Fix], p: u64) -> IntMatrix {
    let d = basis.rows();
    let num = basis.numerator();
    let den = basis.denominator();
    let one = Fix::from_int(&BigInt::one(), p);
    // sigma_j(omega_i) for every root j
    let mut emb = vec![vec![Fix::zero(); roots.len()]; d];
    for (j, r) in roots.iter().enumerate() {
        let mut pw = vec![one.clone()];
        for k in 1..d {
            pw.push(pw[k - 1].mul(r, p));
        }
        for i in 0..d {
            let mut s = Fix::zero();
            for k in 0..d {
                let c = num.get(i, k);
                if !c.is_zero() {
                    s = s.add(&Fix { re: &pw[k].re * c, im: &pw[k].im * c });
                }
            }
            emb[i][j] = Fix { re: s.re.div_floor(den), im: s.im.div_floor(den) };
        }
    }
    let mut g = IntMatrix::zeros(d, d);
    for i in 0..d {
        for l in 0..=i {
            let s: BigInt = (0..roots.len())
                .map(|j| &emb[i][j].re * &emb[l][j].re + &emb[i][j].im * &emb[l][j].im)
                .sum();
            let v = s >> p;
            g.set(i, l, v.clone());
            g.set(l, i, v);
        }
    }
    g
}

/// Gram matrix of the integral basis with absolute error below `2^-(e+2)`.
/// The approximation at `p` bits is accepted once it agrees with the one at
/// `2p` bits to `2^-(e+4)`; otherwise `p` is doubled.
pub(crate) fn embedding_gram(poly: &[BigInt], basis: &RatMatrix, e: u64) -> Gram {
    let d = poly.len() - 1;
    let start = roots_f64(poly);
    let mut p = e + GUARD + 2 * basis.denominator().bits() + 8 * d as u64;
    loop {
        let lo = gram_from_roots(basis, &refine_roots(poly, &start, p), p);
        let hi_roots = refine_roots(poly, &start, 2 * p);
        let hi = gram_from_roots(basis, &hi_roots, 2 * p);
        let hi_p = IntMatrix::from_rows(
            hi.to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(|x| (x + (BigInt::one() << (p - 1))) >> p).collect())
                .collect(),
        );
        let diff = lo
            .entries()
            .iter()
            .zip(hi_p.entries())
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_default();
        let limit = BigInt::one() << (p - e - 4);
        if diff < limit {
            let err = (diff + 1u32) * 4u32;
            let approx = (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| BigRational::new(hi_p.get(i, j).clone(), BigInt::one() << p).to_f64().unwrap_or(f64::MAX))
                        .collect()
                })
                .collect();
            return Gram { p, g: hi_p, err, approx };
        }
        p *= 2;
    }
}

/// Integral LLL on the rows of `b` under the positive definite form `q`,
/// with Lovasz constant `dp/dq`. Row operations only, so the row lattice is kept.
pub fn lll_gram(b: &IntMatrix, q: &IntMatrix, delta: (i64, i64)) -> Result<IntMatrix> {
    let n = b.rows();
    let mut rows = b.to_rows();
    if n <= 1 {
        return Ok(b.clone());
    }
    let ip = |x: &[BigInt], y: &[BigInt]| -> BigInt {
        let v = q.vec_mul(x);
        v.iter().zip(y).map(|(a, c)| a * c).sum()
    };
    let (dp, dq) = (BigInt::from(delta.0), BigInt::from(delta.1));
    // 1-indexed: dd[0] = 1, dd[i] for i = 1..n; lam[k][j] for j < k
    let mut dd = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n + 1]; n + 1];
    dd[0] = BigInt::one();
    dd[1] = ip(&rows[0], &rows[0]);
    if dd[1].is_zero() {
        return Err(Error::RankDeficient);
    }
    let mut k = 2usize;
    let mut kmax = 1usize;

    fn red(k: usize, l: usize, rows: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], dd: &[BigInt]) {
        let two_l: BigInt = &lam[k][l] * 2;
        if two_l.abs() > dd[l] {
            let q = (&two_l + &dd[l]).div_floor(&(&dd[l] * 2));
            let bl = rows[l - 1].clone();
            for (x, y) in rows[k - 1].iter_mut().zip(&bl) {
                *x -= &q * y;
            }
            lam[k][l] -= &q * &dd[l];
            for i in 1..l {
                let t = &q * &lam[l][i];
                lam[k][i] -= t;
            }
        }
    }

    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = ip(&rows[k - 1], &rows[j - 1]);
                for i in 1..j {
                    u = (&dd[i] * &u - &lam[k][i] * &lam[j][i]) / &dd[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if u.is_zero() {
                        return Err(Error::RankDeficient);
                    }
                    dd[k] = u;
                }
            }
        }
        loop {
            red(k, k - 1, &mut rows, &mut lam, &dd);
            let l = &lam[k][k - 1];
            let lhs = &dq * &dd[k] * &dd[k - 2];
            let rhs = &dp * &dd[k - 1] * &dd[k - 1] - &dq * l * l;
            if lhs < rhs {
                // swap k and k-1
                rows.swap(k - 1, k - 2);
                for j in 1..k - 1 {
                    let t = lam[k][j].clone();
                    lam[k][j] = lam[k - 1][j].clone();
                    lam[k - 1][j] = t;
                }
                let lm = lam[k][k - 1].clone();
                let bb = (&dd[k - 2] * &dd[k] + &lm * &lm) / &dd[k - 1];
                for i in (k + 1)..=kmax {
                    let t = lam[i][k].clone();
                    lam[i][k] = (&dd[k] * &lam[i][k - 1] - &lm * &t) / &dd[k - 1];
                    lam[i][k - 1] = (&bb * &t + &lm * &lam[i][k]) / &dd[k];
                }
                dd[k - 1] = bb;
                if k > 2 {
                    k -= 1;
                }
            } else {
                for l in (1..k - 1).rev() {
                    red(k, l, &mut rows, &mut lam, &dd);
                }
                k += 1;
                break;
            }
        }
    }
    Ok(IntMatrix::from_rows(rows))
}

/// Check the two reduced-basis inequalities for the rows of `basis`, which
/// span an integral ideal of norm `norm`:
/// `||a_1||^{2d}` and `prod ||a_i||^2` are both at most
/// `c * (l^2)^{d(d-1)/2} * |disc| * norm^2`.
pub fn satisfies_quality(basis: &IntMatrix, k: &NumberField, ctx: &LatticeContext, norm: &BigRational) -> bool {
    let d = k.degree();
    let t: Vec<BigRational> = (0..d).map(|i| k.gram().t2_upper(basis.row(i), &BigInt::one())).collect();
    let rhs = ctx.c_quality()
        * num_traits::pow(ctx.ell_sq().clone(), d * (d - 1) / 2)
        * BigRational::from_integer(k.discriminant().abs())
        * norm
        * norm;
    let first = num_traits::pow(t[0].clone(), d);
    let prod = t.iter().fold(BigRational::one(), |a, x| a * x);
    first <= rhs && prod <= rhs
}

/// LLL-reduced basis of an integral ideal with respect to the rounded trace
/// form. The quality bounds are verified against certified `T2` values; on
/// failure the precision is doubled and the reduction repeated.
pub fn reduce_ideal_basis(ideal: &FractionalIdeal, k: &NumberField) -> Result<IntMatrix> {
    if !ideal.is_integral() {
        return Err(Error::IdealNotIntegral);
    }
    let norm = ideal.norm();
    let mut ctx = k.lattice().clone();
    for _ in 0..=MAX_RETRIES {
        let b = lll_gram(ideal.numerator(), ctx.gram_e(), ctx.delta)?;
        if satisfies_quality(&b, k, &ctx, &norm) {
            return Ok(b);
        }
        ctx = build_context(k, ctx.e() * 2);
    }
    Err(Error::ReductionBound(format!(
        "reduced basis misses the quality bound at precision {}",
        ctx.e()
    )))
}

/// First element of the reduced basis.
pub fn shortest_basis_element(ideal: &FractionalIdeal, k: &NumberField) -> Result<FieldElement> {
    let b = reduce_ideal_basis(ideal, k)?;
    Ok(FieldElement::new(b.row(0).to_vec(), BigInt::one()))
}
