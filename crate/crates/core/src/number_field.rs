//! Field context and exact element arithmetic over a fixed integral basis.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, log2_upper};
use crate::error::{Error, Result};
use crate::exact_linalg::{self, dixon_solve_left, IntMatrix, RatMatrix};
use crate::ideal::FractionalIdeal;
use crate::lattice::{self, Gram, LatticeContext};

/// Element of K as an integer coefficient vector over the integral basis
/// divided by a positive denominator, kept in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coeffs: Vec<BigInt>,
    den: BigInt,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, " / {}", self.den)
    }
}

impl FieldElement {
    /// Panics on a zero denominator.
    pub fn new(coeffs: Vec<BigInt>, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut e = FieldElement { coeffs, den };
        e.normalize();
        e
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -self.den.clone();
            for c in self.coeffs.iter_mut() {
                *c = -c.clone();
            }
        }
        if self.coeffs.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        let g = arith::gcd_all(self.coeffs.iter()).gcd(&self.den);
        if !g.is_one() {
            for c in self.coeffs.iter_mut() {
                *c = &*c / &g;
            }
            self.den = &self.den / &g;
        }
    }

    pub fn from_integer(d: usize, n: BigInt) -> Self {
        let mut coeffs = vec![BigInt::zero(); d];
        coeffs[0] = n;
        FieldElement::new(coeffs, BigInt::one())
    }

    pub fn from_rational(d: usize, q: &BigRational) -> Self {
        let mut coeffs = vec![BigInt::zero(); d];
        coeffs[0] = q.numer().clone();
        FieldElement::new(coeffs, q.denom().clone())
    }

    pub fn from_i64(coeffs: &[i64], den: i64) -> Self {
        FieldElement::new(
            coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            BigInt::from(den),
        )
    }

    pub fn from_rationals(q: &[BigRational]) -> Self {
        let den = q.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
        let coeffs = q.iter().map(|x| x.numer() * (&den / x.denom())).collect();
        FieldElement::new(coeffs, den)
    }

    pub fn zero(d: usize) -> Self {
        FieldElement {
            coeffs: vec![BigInt::zero(); d],
            den: BigInt::one(),
        }
    }

    pub fn one(d: usize) -> Self {
        Self::from_integer(d, BigInt::one())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        BigRational::new(self.coeffs[i].clone(), self.den.clone())
    }

    pub fn to_rationals(&self) -> Vec<BigRational> {
        (0..self.degree()).map(|i| self.coeff(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// The rational number this element equals, if it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeff(0))
        } else {
            None
        }
    }

    /// `den * self` as an integral element.
    pub fn numerator(&self) -> FieldElement {
        FieldElement {
            coeffs: self.coeffs.clone(),
            den: BigInt::one(),
        }
    }

    pub fn add(&self, o: &FieldElement) -> FieldElement {
        let den = self.den.lcm(&o.den);
        let (fa, fb) = (&den / &self.den, &den / &o.den);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&o.coeffs)
            .map(|(a, b)| a * &fa + b * &fb)
            .collect();
        FieldElement::new(coeffs, den)
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &FieldElement) -> FieldElement {
        self.add(&o.neg())
    }

    pub fn scalar_mul(&self, m: &BigInt) -> FieldElement {
        FieldElement::new(self.coeffs.iter().map(|c| c * m).collect(), self.den.clone())
    }

    pub fn scalar_div(&self, m: &BigInt) -> Result<FieldElement> {
        if m.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElement::new(self.coeffs.clone(), &self.den * m))
    }

    pub fn scale_rat(&self, q: &BigRational) -> FieldElement {
        FieldElement::new(
            self.coeffs.iter().map(|c| c * q.numer()).collect(),
            &self.den * q.denom(),
        )
    }

    pub fn mul(&self, o: &FieldElement, k: &NumberField) -> FieldElement {
        let c = k.mul_integral(&self.coeffs, &o.coeffs);
        FieldElement::new(c, &self.den * &o.den)
    }

    pub fn inv(&self, k: &NumberField) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(FieldElement::from_rational(self.degree(), &q.recip()));
        }
        let m = k.regular_representation_of(&self.coeffs);
        let mut rhs = vec![BigInt::zero(); k.degree()];
        rhs[0] = BigInt::one();
        let x = dixon_solve_left(&m, &rhs)?;
        Ok(FieldElement::from_rationals(&x).scalar_mul(&self.den))
    }

    pub fn norm(&self, k: &NumberField) -> BigRational {
        let m = k.regular_representation_of(&self.coeffs);
        let n = exact_linalg::det(&m);
        BigRational::new(n, self.den.pow(k.degree() as u32))
    }

    pub fn trace(&self, k: &NumberField) -> BigRational {
        let t: BigInt = self
            .coeffs
            .iter()
            .zip(&k.basis_traces)
            .map(|(a, b)| a * b)
            .sum();
        BigRational::new(t, self.den.clone())
    }

    /// `d * max log2|a_i| + d * log2(den)`, rounded up; zero for zero.
    pub fn size(&self) -> BigRational {
        let d = BigRational::from_integer(BigInt::from(self.degree()));
        let mx = self
            .coeffs
            .iter()
            .map(log2_upper)
            .max()
            .unwrap_or_else(BigRational::zero);
        &d * mx + &d * log2_upper(&self.den)
    }

    /// `max |a_i|` of the numerator.
    pub fn max_abs(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

/// Immutable field context: defining polynomial, integral basis and every
/// precomputed quantity the algorithms consume.
#[derive(Debug, Clone)]
pub struct NumberField {
    degree: usize,
    poly: Vec<BigInt>,
    basis: RatMatrix,
    power_to_basis: IntMatrix,
    mult: Vec<Vec<Vec<BigInt>>>,
    basis_traces: Vec<BigInt>,
    trace_matrix: IntMatrix,
    trace_dual_den: BigInt,
    trace_dual: IntMatrix,
    codifferent: IntMatrix,
    two_element: Option<(FieldElement, FieldElement)>,
    two_element_reps: Option<(IntMatrix, IntMatrix)>,
    disc: BigInt,
    disc_poly: BigInt,
    index: BigInt,
    c1: BigRational,
    c2: BigRational,
    c3: BigInt,
    c: BigRational,
    c_inv: BigRational,
    gram: Gram,
    lattice: LatticeContext,
}

/// Coefficients of `f` from the constant term up; the last must be 1.
fn check_poly(poly: &[BigInt]) -> Result<usize> {
    if poly.len() < 2 {
        return Err(Error::InvalidField("defining polynomial must have degree >= 1".into()));
    }
    if !poly.last().unwrap().is_one() {
        return Err(Error::InvalidField("defining polynomial is not monic".into()));
    }
    Ok(poly.len() - 1)
}

/// Power sums `Tr(alpha^k)` for `k < count` by Newton's identities.
fn power_sums(poly: &[BigInt], count: usize) -> Vec<BigInt> {
    let d = poly.len() - 1;
    // f = x^d + c_{d-1} x^{d-1} + ... + c_0, with e_i = (-1)^i c_{d-i}
    let c = |i: usize| -> &BigInt { &poly[d - i] };
    let mut s = vec![BigInt::zero(); count];
    if count == 0 {
        return s;
    }
    s[0] = BigInt::from(d);
    for k in 1..count {
        let mut acc = BigInt::zero();
        for i in 1..=k.min(d) {
            if i < k {
                acc += c(i) * &s[k - i];
            } else {
                acc += c(i) * BigInt::from(k);
            }
        }
        s[k] = -acc;
    }
    s
}

fn poly_discriminant(poly: &[BigInt]) -> BigInt {
    let d = poly.len() - 1;
    let s = power_sums(poly, 2 * d);
    let m = IntMatrix::from_rows(
        (0..d)
            .map(|i| (0..d).map(|j| s[i + j].clone()).collect())
            .collect(),
    );
    exact_linalg::det(&m)
}

/// Product of two power-basis coefficient vectors reduced modulo the monic `f`.
fn rat_poly_mulmod(a: &[BigRational], b: &[BigRational], poly: &[BigInt]) -> Vec<BigRational> {
    let d = poly.len() - 1;
    let mut prod = vec![BigRational::zero(); 2 * d - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    for k in (d..prod.len()).rev() {
        let c = prod[k].clone();
        if c.is_zero() {
            continue;
        }
        for i in 0..d {
            prod[k - d + i] -= &c * BigRational::from_integer(poly[i].clone());
        }
        prod[k] = BigRational::zero();
    }
    prod.truncate(d);
    prod
}

impl NumberField {
    /// Build the field context from the defining polynomial coefficients
    /// `c_0 .. c_{d-1}, 1` and the integral basis rows over the power basis.
    pub fn new(poly: Vec<BigInt>, basis: RatMatrix) -> Result<NumberField> {
        let d = check_poly(&poly)?;
        if basis.rows() != d || basis.cols() != d {
            return Err(Error::InvalidField(format!("basis must be {d}x{d}")));
        }
        for j in 0..d {
            let expect = if j == 0 { BigRational::one() } else { BigRational::zero() };
            if basis.get(0, j) != expect {
                return Err(Error::InvalidField("first basis element must be 1".into()));
            }
        }
        let disc_poly = poly_discriminant(&poly);
        if disc_poly.is_zero() {
            return Err(Error::InvalidField("defining polynomial is not squarefree".into()));
        }
        let inv = basis.inverse().map_err(|_| Error::InvalidField("basis matrix is singular".into()))?;
        if !inv.denominator().is_one() {
            return Err(Error::InvalidField("basis does not contain the power basis order".into()));
        }
        let power_to_basis = inv.numerator().clone();
        let rows = basis.to_rational_rows();
        let mut mult = vec![vec![Vec::new(); d]; d];
        for i in 0..d {
            for j in i..d {
                let p = rat_poly_mulmod(&rows[i], &rows[j], &poly);
                let mut coords = Vec::with_capacity(d);
                for k in 0..d {
                    let v: BigRational = (0..d)
                        .map(|t| &p[t] * BigRational::from_integer(power_to_basis.get(t, k).clone()))
                        .sum();
                    if !v.is_integer() {
                        return Err(Error::InvalidField("basis is not closed under multiplication".into()));
                    }
                    coords.push(v.to_integer());
                }
                mult[i][j] = coords.clone();
                mult[j][i] = coords;
            }
        }
        let basis_traces: Vec<BigInt> = (0..d).map(|k| (0..d).map(|i| mult[k][i][i].clone()).sum()).collect();
        let trace_matrix = IntMatrix::from_rows(
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| mult[i][j].iter().zip(&basis_traces).map(|(a, b)| a * b).sum())
                        .collect()
                })
                .collect(),
        );
        let disc = exact_linalg::det(&trace_matrix);
        let index = exact_linalg::det(&power_to_basis).abs();
        if &disc * &index * &index != disc_poly {
            return Err(Error::InvalidField("discriminant and index are inconsistent".into()));
        }
        let tinv = RatMatrix::new(trace_matrix.clone(), BigInt::one()).inverse()?;
        let trace_dual_den = tinv.denominator().clone();
        let trace_dual = tinv.numerator().clone();
        let codifferent = exact_linalg::hnf(&trace_dual)?;
        let c3 = mult
            .iter()
            .flat_map(|r| r.iter().flat_map(|c| c.iter()))
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigInt::one);

        let e = lattice::default_precision(d, &disc);
        let (gram, lattice) = lattice::build_parts(&poly, &basis, e);
        let (c1, c2) = gram.inequality_constants();
        let c = constant_c(d, &c1, &c2, &c3);
        let c_inv = constant_c_inverse(d, &c1, &c2);

        let mut k = NumberField {
            degree: d,
            poly,
            basis,
            power_to_basis,
            mult,
            basis_traces,
            trace_matrix,
            trace_dual_den,
            trace_dual,
            codifferent,
            two_element: None,
            two_element_reps: None,
            disc,
            disc_poly,
            index,
            c1,
            c2,
            c3,
            c,
            c_inv,
            gram,
            lattice,
        };
        let (d1, d2) = k.find_two_element()?;
        let reps = (
            k.regular_representation(&d1)?,
            k.regular_representation(&d2)?,
        );
        k.two_element = Some((d1, d2));
        k.two_element_reps = Some(reps);
        Ok(k)
    }

    /// Convenience constructor from small integers; the basis rows are given
    /// as `(numerators, denominator)`.
    pub fn from_i64(poly: &[i64], basis: &[(&[i64], i64)]) -> Result<NumberField> {
        let rows: Vec<Vec<BigRational>> = basis
            .iter()
            .map(|(nums, den)| nums.iter().map(|&n| arith::rat(n, *den)).collect())
            .collect();
        NumberField::new(
            poly.iter().map(|&c| BigInt::from(c)).collect(),
            RatMatrix::from_rational_rows(&rows),
        )
    }

    /// K = Q(alpha) with the power basis as integral basis.
    pub fn with_power_basis(poly: &[i64]) -> Result<NumberField> {
        let d = poly.len() - 1;
        NumberField::new(
            poly.iter().map(|&c| BigInt::from(c)).collect(),
            RatMatrix::new(IntMatrix::identity(d), BigInt::one()),
        )
    }

    fn find_two_element(&self) -> Result<(FieldElement, FieldElement)> {
        let d = self.degree;
        let target = FractionalIdeal::from_parts_unchecked(self.codifferent.clone(), BigInt::one());
        let reduced = lattice::reduce_ideal_basis(&target, self)?;
        let base: Vec<Vec<BigInt>> = reduced.to_rows();
        let mut radius = 1i64;
        loop {
            let mut cands = combinations(&base, radius);
            cands.sort_by(|a, b| {
                let (na, nb) = (self.gram.approx_t2(a), self.gram.approx_t2(b));
                na.partial_cmp(&nb).unwrap_or(std::cmp::Ordering::Equal)
            });
            let limit = cands.len().min(48);
            for j in 0..limit {
                for i in 0..=j {
                    let x = FieldElement::new(cands[i].clone(), BigInt::one());
                    let y = FieldElement::new(cands[j].clone(), BigInt::one());
                    let g = FractionalIdeal::from_generators(&[x.clone(), y.clone()], self)?;
                    if g == target {
                        return Ok((x, y));
                    }
                }
            }
            // generic fallback: the minimum paired with larger combinations
            let m = FieldElement::from_integer(d, target.numerator().get(0, 0).clone());
            for c in cands.iter().skip(limit) {
                let y = FieldElement::new(c.clone(), BigInt::one());
                let g = FractionalIdeal::from_generators(&[m.clone(), y.clone()], self)?;
                if g == target {
                    return Ok((m, y));
                }
            }
            radius += 1;
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficients `c_0 .. c_{d-1}, 1` of the defining polynomial.
    pub fn poly(&self) -> &[BigInt] {
        &self.poly
    }

    /// Integral basis rows over the power basis.
    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    /// Row `j` holds the coordinates of `alpha^j` over the integral basis.
    pub fn power_to_basis(&self) -> &IntMatrix {
        &self.power_to_basis
    }

    /// Coordinates of `omega_i * omega_j`.
    pub fn structure_constants(&self, i: usize, j: usize) -> &[BigInt] {
        &self.mult[i][j]
    }

    pub fn trace_matrix(&self) -> &IntMatrix {
        &self.trace_matrix
    }

    /// `(D, D * T^{-1})` with `D` the denominator of the inverse trace matrix.
    pub fn trace_dual(&self) -> (&BigInt, &IntMatrix) {
        (&self.trace_dual_den, &self.trace_dual)
    }

    /// HNF of the integral ideal spanned by the rows of `D * T^{-1}`.
    pub fn codifferent_numerator(&self) -> &IntMatrix {
        &self.codifferent
    }

    pub fn two_element(&self) -> (&FieldElement, &FieldElement) {
        let (a, b) = self.two_element.as_ref().expect("field fully built");
        (a, b)
    }

    pub(crate) fn two_element_reps(&self) -> (&IntMatrix, &IntMatrix) {
        let (a, b) = self.two_element_reps.as_ref().expect("field fully built");
        (a, b)
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    pub fn poly_discriminant(&self) -> &BigInt {
        &self.disc_poly
    }

    pub fn index(&self) -> &BigInt {
        &self.index
    }

    pub fn c1(&self) -> &BigRational {
        &self.c1
    }

    pub fn c2(&self) -> &BigRational {
        &self.c2
    }

    pub fn c3(&self) -> &BigInt {
        &self.c3
    }

    pub fn c(&self) -> &BigRational {
        &self.c
    }

    /// Additive constant in `S(1/a) <= (2d - 1) S(a) + c_inv`.
    pub fn c_inverse(&self) -> &BigRational {
        &self.c_inv
    }

    pub fn gram(&self) -> &Gram {
        &self.gram
    }

    pub fn lattice(&self) -> &LatticeContext {
        &self.lattice
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::zero(self.degree)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::one(self.degree)
    }

    pub fn integer(&self, n: i64) -> FieldElement {
        FieldElement::from_integer(self.degree, BigInt::from(n))
    }

    pub fn element(&self, coeffs: &[i64]) -> FieldElement {
        assert_eq!(coeffs.len(), self.degree);
        FieldElement::from_i64(coeffs, 1)
    }

    /// Product of two integral coefficient vectors.
    pub fn mul_integral(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let d = self.degree;
        let mut out = vec![BigInt::zero(); d];
        for i in 0..d {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if b[j].is_zero() {
                    continue;
                }
                let ab = &a[i] * &b[j];
                for (o, m) in out.iter_mut().zip(&self.mult[i][j]) {
                    if !m.is_zero() {
                        *o += &ab * m;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `beta -> gamma * beta` in the row convention
    /// (`beta_row * M = (gamma * beta)_row`).
    pub fn regular_representation(&self, gamma: &FieldElement) -> Result<IntMatrix> {
        if !gamma.is_integral() {
            return Err(Error::NotIntegral);
        }
        Ok(self.regular_representation_of(gamma.coeffs()))
    }

    pub(crate) fn regular_representation_of(&self, g: &[BigInt]) -> IntMatrix {
        let d = self.degree;
        let rows = (0..d)
            .map(|i| {
                let mut e = vec![BigInt::zero(); d];
                e[i] = BigInt::one();
                self.mul_integral(&e, g)
            })
            .collect();
        IntMatrix::from_rows(rows)
    }

    /// Coefficients over the power basis.
    pub fn to_power_basis(&self, a: &FieldElement) -> Vec<BigRational> {
        let d = self.degree;
        (0..d)
            .map(|k| {
                let s: BigRational = (0..d)
                    .map(|i| a.coeff(i) * self.basis.get(i, k))
                    .sum();
                s
            })
            .collect()
    }

    pub fn from_power_basis(&self, p: &[BigRational]) -> FieldElement {
        let d = self.degree;
        let q: Vec<BigRational> = (0..d)
            .map(|k| {
                (0..d)
                    .map(|t| &p[t] * BigRational::from_integer(self.power_to_basis.get(t, k).clone()))
                    .sum()
            })
            .collect();
        FieldElement::from_rationals(&q)
    }

    /// Product computed through the power basis and reduction modulo `f`.
    pub fn mul_via_power_basis(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = rat_poly_mulmod(&self.to_power_basis(a), &self.to_power_basis(b), &self.poly);
        self.from_power_basis(&p)
    }

    /// Numerical `T2` norm squared (floating point, for ordering and reports).
    pub fn t2_approx(&self, a: &FieldElement) -> f64 {
        let den = a.den().to_f64().unwrap_or(f64::INFINITY);
        self.gram.approx_t2(a.coeffs()) / (den * den)
    }
}

fn constant_c(d: usize, c1: &BigRational, c2: &BigRational, c3: &BigInt) -> BigRational {
    let df = d as f64;
    let lg = |q: &BigRational| q.to_f64().unwrap_or(f64::MAX).log2();
    let a = 2.0 * df * df.log2() + df * (c3.to_f64().unwrap_or(f64::MAX)).log2();
    let b = df * df * lg(c1) + df * lg(c2);
    let v = a.max(b).max(0.0);
    // round up to 1/1024 with a small margin for the float logs
    BigRational::new(BigInt::from((v * 1024.0).ceil() as i64 + 1), BigInt::from(1024))
}

/// `(2d^2 - d) log C1 + d log C2`, rounded up. Bounding the denominator of
/// `1/a` by `|N(a)|` costs `d S(a)` and the numerator costs `(d - 1) S(a)`,
/// so the multiplier of `S(a)` is `2d - 1`.
fn constant_c_inverse(d: usize, c1: &BigRational, c2: &BigRational) -> BigRational {
    let df = d as f64;
    let lg = |q: &BigRational| q.to_f64().unwrap_or(f64::MAX).log2();
    let v = (2.0 * df * df - df) * lg(c1) + df * lg(c2);
    BigRational::new(BigInt::from((v * 1024.0).ceil() as i64 + 1), BigInt::from(1024))
}

/// All nonzero combinations `sum c_i b_i` with `|c_i| <= r` and at least one
/// `|c_i| = r`, deduplicated up to sign.
fn combinations(base: &[Vec<BigInt>], r: i64) -> Vec<Vec<BigInt>> {
    let d = base.len();
    let width = (2 * r + 1) as usize;
    let total = width.pow(d as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut coef = Vec::with_capacity(d);
        for _ in 0..d {
            coef.push((c % width) as i64 - r);
            c /= width;
        }
        if coef.iter().all(|&x| x.abs() < r) {
            continue;
        }
        // keep one representative of each +/- pair
        let first = coef.iter().find(|&&x| x != 0).copied().unwrap_or(0);
        if first < 0 {
            continue;
        }
        let v: Vec<BigInt> = (0..d)
            .map(|k| {
                coef.iter()
                    .zip(base)
                    .map(|(&c, b)| BigInt::from(c) * &b[k])
                    .sum()
            })
            .collect();
        out.push(v);
    }
    out
}
