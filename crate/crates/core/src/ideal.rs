//! Fractional ideals as a lower triangular Hermite basis over the integral
//! basis and a positive denominator.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::log2_upper;
use crate::error::{Error, Result};
use crate::exact_linalg::{self, back_substitute, hnf_with_modulus, IntMatrix};
use crate::number_field::{FieldElement, NumberField};

/// Nonzero fractional ideal `numerator / den`. The numerator is in Hermite
/// form and `den` is minimal, so structural equality is ideal equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FractionalIdeal {
    num: IntMatrix,
    den: BigInt,
}

impl fmt::Debug for FractionalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} / {}", self.num, self.den)
    }
}

impl fmt::Display for FractionalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} / {}", self.num, self.den)
    }
}

impl FractionalIdeal {
    /// Wrap an HNF numerator without recomputing the form; only the
    /// denominator is made minimal.
    pub fn from_parts_unchecked(num: IntMatrix, den: BigInt) -> FractionalIdeal {
        let mut a = FractionalIdeal { num, den };
        a.canonicalize();
        a
    }

    fn canonicalize(&mut self) {
        if self.den.is_negative() {
            self.den = -self.den.clone();
        }
        let g = self.num.content().gcd(&self.den);
        if !g.is_one() && !g.is_zero() {
            self.num = IntMatrix::from_rows(
                self.num
                    .to_rows()
                    .into_iter()
                    .map(|r| r.into_iter().map(|x| x / &g).collect())
                    .collect(),
            );
            self.den = &self.den / &g;
        }
    }

    /// Ideal with the given integral basis rows (any generating set of the
    /// lattice) over `den`. Fails unless the lattice is a full rank O_K-module.
    pub fn from_matrix(m: &IntMatrix, den: BigInt, k: &NumberField) -> Result<FractionalIdeal> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if m.cols() != k.degree() {
            return Err(Error::Dimension(format!("ideal basis must have {} columns", k.degree())));
        }
        let h = exact_linalg::hnf(m).map_err(|_| Error::ZeroIdeal)?;
        let a = FractionalIdeal::from_parts_unchecked(h, den);
        if !a.is_module(k) {
            return Err(Error::NotIntegralModule(
                "lattice is not closed under multiplication by the integral basis".into(),
            ));
        }
        Ok(a)
    }

    /// Whether every `omega_i * row` lies in the row lattice of the numerator.
    pub fn is_module(&self, k: &NumberField) -> bool {
        let d = k.degree();
        for i in 0..d {
            let mut e = vec![BigInt::zero(); d];
            e[i] = BigInt::one();
            for r in 0..d {
                let p = k.mul_integral(&e, self.num.row(r));
                if !lattice_contains(&self.num, &p) {
                    return false;
                }
            }
        }
        true
    }

    /// O_K itself.
    pub fn unit(k: &NumberField) -> FractionalIdeal {
        FractionalIdeal {
            num: IntMatrix::identity(k.degree()),
            den: BigInt::one(),
        }
    }

    pub fn from_integer(n: &BigInt, k: &NumberField) -> Result<FractionalIdeal> {
        if n.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        Ok(FractionalIdeal {
            num: IntMatrix::scalar(k.degree(), &n.abs()),
            den: BigInt::one(),
        })
    }

    pub fn principal(a: &FieldElement, k: &NumberField) -> Result<FractionalIdeal> {
        FractionalIdeal::from_generators(std::slice::from_ref(a), k)
    }

    /// Smallest fractional ideal containing all generators.
    pub fn from_generators(gens: &[FieldElement], k: &NumberField) -> Result<FractionalIdeal> {
        let nonzero: Vec<&FieldElement> = gens.iter().filter(|g| !g.is_zero()).collect();
        if nonzero.is_empty() {
            return Err(Error::ZeroIdeal);
        }
        let den = nonzero.iter().fold(BigInt::one(), |a, g| a.lcm(g.den()));
        let nums: Vec<Vec<BigInt>> = nonzero
            .iter()
            .map(|g| {
                let f = &den / g.den();
                g.coeffs().iter().map(|c| c * &f).collect()
            })
            .collect();
        // |N(g)| of one generator lies in the ideal it generates
        let lambda = nonzero_norm(&nums[0], k);
        let mut rows = Vec::with_capacity(nums.len() * k.degree());
        for g in &nums {
            rows.extend(k.regular_representation_of(g).to_rows());
        }
        let h = hnf_with_modulus(&IntMatrix::from_rows(rows), &lambda)?;
        Ok(FractionalIdeal::from_parts_unchecked(h, den))
    }

    pub fn numerator(&self) -> &IntMatrix {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.num.rows()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_unit(&self) -> bool {
        self.den.is_one() && self.num == IntMatrix::identity(self.degree())
    }

    /// Numerator as an integral ideal.
    pub fn numerator_ideal(&self) -> FractionalIdeal {
        FractionalIdeal {
            num: self.num.clone(),
            den: BigInt::one(),
        }
    }

    /// Smallest positive integer in an integral ideal.
    pub fn minimum(&self) -> Result<BigInt> {
        if !self.is_integral() {
            return Err(Error::IdealNotIntegral);
        }
        Ok(self.num.get(0, 0).clone())
    }

    /// Minimum of the numerator ideal.
    pub fn numerator_minimum(&self) -> &BigInt {
        self.num.get(0, 0)
    }

    pub fn norm(&self) -> BigRational {
        let d = self.degree();
        let p = (0..d).fold(BigInt::one(), |a, i| a * self.num.get(i, i));
        BigRational::new(p, self.den.pow(d as u32))
    }

    /// `d^2 log2 min(num) + d^2 log2 den`, rounded up.
    pub fn size(&self) -> BigRational {
        let d2 = BigRational::from_integer(BigInt::from(self.degree() * self.degree()));
        &d2 * log2_upper(self.numerator_minimum()) + &d2 * log2_upper(&self.den)
    }

    /// Basis elements `num_i / den`.
    pub fn basis_elements(&self) -> Vec<FieldElement> {
        (0..self.degree())
            .map(|i| FieldElement::new(self.num.row(i).to_vec(), self.den.clone()))
            .collect()
    }

    pub fn add(&self, o: &FractionalIdeal) -> FractionalIdeal {
        let den = self.den.lcm(&o.den);
        let (fa, fb) = (&den / &self.den, &den / &o.den);
        let a = self.num.scale(&fa);
        let b = o.num.scale(&fb);
        let lambda = (self.numerator_minimum() * &fa).gcd(&(o.numerator_minimum() * &fb));
        let h = hnf_with_modulus(&a.stack(&b), &lambda).expect("sum of full rank lattices");
        FractionalIdeal::from_parts_unchecked(h, den)
    }

    pub fn mul(&self, o: &FractionalIdeal, k: &NumberField) -> FractionalIdeal {
        let d = self.degree();
        let mut rows = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                rows.push(k.mul_integral(self.num.row(i), o.num.row(j)));
            }
        }
        let lambda = self.numerator_minimum() * o.numerator_minimum();
        let h = hnf_with_modulus(&IntMatrix::from_rows(rows), &lambda).expect("product of full rank lattices");
        FractionalIdeal::from_parts_unchecked(h, &self.den * &o.den)
    }

    pub fn elt_mul(&self, a: &FieldElement, k: &NumberField) -> Result<FractionalIdeal> {
        if a.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        if let Some(q) = a.as_rational() {
            return self.rat_mul(&q);
        }
        let m = k.regular_representation_of(a.coeffs());
        let lambda = nonzero_norm(a.coeffs(), k) * self.numerator_minimum();
        let h = hnf_with_modulus(&self.num.mul(&m), &lambda)?;
        Ok(FractionalIdeal::from_parts_unchecked(h, &self.den * a.den()))
    }

    pub fn int_mul(&self, m: &BigInt) -> Result<FractionalIdeal> {
        self.rat_mul(&BigRational::from_integer(m.clone()))
    }

    pub fn rat_mul(&self, q: &BigRational) -> Result<FractionalIdeal> {
        if q.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        Ok(FractionalIdeal::from_parts_unchecked(
            self.num.scale(&q.numer().abs()),
            &self.den * q.denom(),
        ))
    }

    /// Inverse through the trace dual: with `H` the Hermite basis of
    /// `num * B` (`B = D * codifferent^-1`) and `m = min(num)`, the rows of
    /// `m * H^-t * (D T^-1)` span `m * num^-1`.
    pub fn inverse(&self, k: &NumberField) -> FractionalIdeal {
        let d = self.degree();
        let m = self.numerator_minimum().clone();
        if m.is_one() {
            return FractionalIdeal::from_parts_unchecked(IntMatrix::identity(d), BigInt::one()).rat_scaled(&self.den);
        }
        let (r1, r2) = k.two_element_reps();
        let prod = self.num.mul(r1).stack(&self.num.mul(r2));
        let lambda = &m * k.codifferent_numerator().get(0, 0);
        let h = hnf_with_modulus(&prod, &lambda).expect("product with the codifferent is full rank");
        // H^t is upper triangular; reverse rows and columns to make it lower
        let ht = h.transpose();
        let rev = |x: &IntMatrix| -> IntMatrix {
            IntMatrix::from_rows(
                (0..x.rows())
                    .rev()
                    .map(|i| x.row(i).iter().rev().cloned().collect())
                    .collect(),
            )
        };
        let rev_rows = |x: &IntMatrix| -> IntMatrix { IntMatrix::from_rows((0..x.rows()).rev().map(|i| x.row(i).to_vec()).collect()) };
        let (_, s) = k.trace_dual();
        let rhs = rev_rows(&s.scale(&m));
        let z = back_substitute(&rev(&ht), &rhs, &(&m * &m)).expect("min times the inverse is integral");
        let y = rev_rows(&z);
        let num = hnf_with_modulus(&y, &m).expect("inverse numerator is full rank");
        FractionalIdeal::from_parts_unchecked(num, m).rat_scaled(&self.den)
    }

    fn rat_scaled(self, n: &BigInt) -> FractionalIdeal {
        FractionalIdeal::from_parts_unchecked(self.num.scale(n), self.den)
    }

    /// `self * o^-1`.
    pub fn div(&self, o: &FractionalIdeal, k: &NumberField) -> FractionalIdeal {
        self.mul(&o.inverse(k), k)
    }

    pub fn contains(&self, a: &FieldElement) -> bool {
        if a.is_zero() {
            return true;
        }
        // a = v / s lies in num / den iff den * v lies in s * num
        let v: Vec<BigInt> = a.coeffs().iter().map(|c| c * &self.den).collect();
        lattice_contains(&self.num.scale(a.den()), &v)
    }

    pub fn is_subset(&self, o: &FractionalIdeal) -> bool {
        &self.add(o) == o
    }

    /// `(alpha, beta)` with `alpha` in `self`, `beta` in `o` and `alpha + beta = 1`.
    pub fn idempotents(&self, o: &FractionalIdeal) -> Result<(FieldElement, FieldElement)> {
        if !self.is_integral() || !o.is_integral() {
            return Err(Error::IdealNotIntegral);
        }
        let d = self.degree();
        let mut rows = Vec::with_capacity(2 * d);
        for i in 0..d {
            let mut r = self.num.row(i).to_vec();
            r.extend(self.num.row(i).iter().cloned());
            rows.push(r);
        }
        for i in 0..d {
            let mut r = vec![BigInt::zero(); d];
            r.extend(o.num.row(i).iter().cloned());
            rows.push(r);
        }
        let lambda = self.numerator_minimum() * o.numerator_minimum();
        let h = hnf_with_modulus(&IntMatrix::from_rows(rows), &lambda)?;
        for i in 0..d {
            for j in 0..d {
                let want = if i == j { BigInt::one() } else { BigInt::zero() };
                if h.get(d + i, d + j) != &want {
                    return Err(Error::NotCoprime);
                }
            }
        }
        let alpha = FieldElement::new(h.row(d)[..d].to_vec(), BigInt::one());
        let beta = FieldElement::one(d).sub(&alpha);
        Ok((alpha, beta))
    }
}

/// `|N(g)|` for a nonzero integral coefficient vector.
fn nonzero_norm(g: &[BigInt], k: &NumberField) -> BigInt {
    exact_linalg::det(&k.regular_representation_of(g)).abs()
}

/// Whether `v` is an integer combination of the rows of the lower triangular `h`.
pub(crate) fn lattice_contains(h: &IntMatrix, v: &[BigInt]) -> bool {
    let m = h.cols();
    let mut rest = v.to_vec();
    for j in (0..m).rev() {
        if rest[j].is_zero() {
            continue;
        }
        let (q, r) = rest[j].div_rem(h.get(j, j));
        if !r.is_zero() {
            return false;
        }
        for (x, y) in rest[..=j].iter_mut().zip(h.row(j)) {
            *x -= &q * y;
        }
    }
    true
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::number_field::tests::{cubic, gaussian, golden, rationals, sqrt_m5};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    pub(crate) fn gens(k: &NumberField, g: &[&[i64]]) -> FractionalIdeal {
        let e: Vec<FieldElement> = g.iter().map(|c| k.element(c)).collect();
        FractionalIdeal::from_generators(&e, k).unwrap()
    }

    pub(crate) fn random_ideal(k: &NumberField, rng: &mut impl Rng, frac: bool) -> FractionalIdeal {
        let d = k.degree();
        loop {
            let n = rng.gen_range(1..=2);
            let g: Vec<FieldElement> = (0..n)
                .map(|_| {
                    let c: Vec<i64> = (0..d).map(|_| rng.gen_range(-12..=12)).collect();
                    FieldElement::from_i64(&c, if frac { rng.gen_range(1..6) } else { 1 })
                })
                .collect();
            if let Ok(a) = FractionalIdeal::from_generators(&g, k) {
                return a;
            }
        }
    }

    /// Lattice product oracle: HNF of all pairwise products with plain HNF.
    fn product_oracle(a: &FractionalIdeal, b: &FractionalIdeal, k: &NumberField) -> FractionalIdeal {
        let d = k.degree();
        let mut rows = Vec::new();
        for i in 0..d {
            for j in 0..d {
                rows.push(k.mul_integral(a.numerator().row(i), b.numerator().row(j)));
            }
        }
        FractionalIdeal::from_parts_unchecked(
            exact_linalg::hnf(&IntMatrix::from_rows(rows)).unwrap(),
            a.den() * b.den(),
        )
    }

    #[test]
    fn generator_examples() {
        let k = gaussian();
        let a = FractionalIdeal::from_generators(&[k.integer(2)], k).unwrap();
        assert_eq!(a.numerator(), &IntMatrix::from_i64(&[&[2, 0], &[0, 2]]));
        assert_eq!(a.den(), &BigInt::one());
        let b = gens(k, &[&[1, 1]]);
        assert_eq!(b.numerator(), &IntMatrix::from_i64(&[&[2, 0], &[1, 1]]));
        let q = rationals();
        let h = FractionalIdeal::from_generators(&[FieldElement::from_i64(&[1], 2)], q).unwrap();
        assert_eq!(h.numerator(), &IntMatrix::from_i64(&[&[1]]));
        assert_eq!(h.den(), &BigInt::from(2));
        assert_eq!(FractionalIdeal::from_generators(&[k.zero()], k), Err(Error::ZeroIdeal));
        assert_eq!(FractionalIdeal::from_generators(&[], k), Err(Error::ZeroIdeal));
    }

    #[test]
    fn minimum_and_norm_examples() {
        let k = gaussian();
        let two = gens(k, &[&[2, 0]]);
        assert_eq!(two.minimum().unwrap(), BigInt::from(2));
        assert_eq!(two.norm(), crate::arith::rat(4, 1));
        let p = gens(k, &[&[1, 1]]);
        assert_eq!(p.minimum().unwrap(), BigInt::from(2));
        assert_eq!(p.norm(), crate::arith::rat(2, 1));
        let o = FractionalIdeal::unit(k);
        assert_eq!(o.minimum().unwrap(), BigInt::one());
        assert_eq!(o.norm(), crate::arith::rat(1, 1));
        let half = o.rat_mul(&crate::arith::rat(1, 2)).unwrap();
        assert_eq!(half.minimum(), Err(Error::IdealNotIntegral));
    }

    #[test]
    fn sum_examples() {
        let k = gaussian();
        assert!(gens(k, &[&[2, 0]]).add(&gens(k, &[&[3, 0]])).is_unit());
        assert_eq!(gens(k, &[&[1, 1]]).add(&gens(k, &[&[1, -1]])), gens(k, &[&[1, 1]]));
        let a = gens(k, &[&[3, 1]]);
        assert!(a.add(&FractionalIdeal::unit(k)).is_unit());
    }

    #[test]
    fn product_examples() {
        let k = gaussian();
        let p = gens(k, &[&[1, 1]]).mul(&gens(k, &[&[1, -1]]), k);
        assert_eq!(p, gens(k, &[&[2, 0]]));
        let a = gens(k, &[&[3, 1]]);
        assert_eq!(FractionalIdeal::unit(k).mul(&a, k), a);
        let h = gens(k, &[&[2, 0]]).elt_mul(&FieldElement::from_i64(&[1, 0], 2), k).unwrap();
        assert!(h.is_unit());
        assert_eq!(a.elt_mul(&k.zero(), k), Err(Error::ZeroIdeal));
        assert_eq!(a.int_mul(&BigInt::zero()), Err(Error::ZeroIdeal));
    }

    #[test]
    fn inverse_examples() {
        let k = gaussian();
        let inv2 = gens(k, &[&[2, 0]]).inverse(k);
        assert_eq!(inv2.numerator(), &IntMatrix::identity(2));
        assert_eq!(inv2.den(), &BigInt::from(2));
        let p = gens(k, &[&[1, 1]]);
        let pinv = p.inverse(k);
        assert_eq!(pinv, p.rat_mul(&crate::arith::rat(1, 2)).unwrap());
        assert!(p.mul(&pinv, k).is_unit());
        assert!(FractionalIdeal::unit(k).inverse(k).is_unit());
    }

    #[test]
    fn membership_examples() {
        let k = gaussian();
        let p = gens(k, &[&[1, 1]]);
        assert!(p.contains(&k.integer(2)));
        assert!(!gens(k, &[&[2, 0]]).contains(&k.element(&[1, 1])));
        assert!(p.is_subset(&p));
        assert!(gens(k, &[&[2, 0]]).is_subset(&p));
        assert!(!p.is_subset(&gens(k, &[&[2, 0]])));
        let half = FractionalIdeal::unit(k).rat_mul(&crate::arith::rat(1, 2)).unwrap();
        assert!(half.contains(&FieldElement::from_i64(&[1, 1], 2)));
        assert!(!half.contains(&FieldElement::from_i64(&[1, 1], 4)));
    }

    #[test]
    fn idempotent_examples() {
        let q = rationals();
        let (a, b) = gens(q, &[&[2]]).idempotents(&gens(q, &[&[3]])).unwrap();
        assert!(gens(q, &[&[2]]).contains(&a) && gens(q, &[&[3]]).contains(&b));
        let k = gaussian();
        let (x, y) = (gens(k, &[&[2, 1]]), gens(k, &[&[2, -1]]));
        let (a, b) = x.idempotents(&y).unwrap();
        assert!(x.contains(&a) && y.contains(&b));
        assert_eq!(a.add(&b), k.one());
        let (a, b) = FractionalIdeal::unit(k).idempotents(&y).unwrap();
        assert!(y.contains(&b));
        assert_eq!(a.add(&b), k.one());
        assert_eq!(
            gens(k, &[&[2, 0]]).idempotents(&gens(k, &[&[1, 1]])),
            Err(Error::NotCoprime)
        );
    }

    #[test]
    fn from_matrix_checks_module() {
        let k = gaussian();
        let bad = IntMatrix::from_i64(&[&[2, 0], &[0, 1]]);
        assert!(matches!(FractionalIdeal::from_matrix(&bad, BigInt::one(), k), Err(Error::NotIntegralModule(_))));
        let good = IntMatrix::from_i64(&[&[1, 1], &[-1, 1]]);
        assert_eq!(FractionalIdeal::from_matrix(&good, BigInt::one(), k).unwrap(), gens(k, &[&[1, 1]]));
    }

    fn field_strategy() -> impl Strategy<Value = &'static NumberField> {
        prop::sample::select(vec![rationals(), gaussian(), sqrt_m5(), cubic(), golden()])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn ideal_laws(k in field_strategy(), seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = random_ideal(k, &mut rng, true);
            let b = random_ideal(k, &mut rng, true);
            prop_assert!(a.is_module(k));
            let ab = a.mul(&b, k);
            prop_assert_eq!(&ab, &product_oracle(&a, &b, k));
            prop_assert!(a.mul(&a.inverse(k), k).is_unit());
            prop_assert_eq!(ab.norm(), a.norm() * b.norm());
            prop_assert!(ab.size() <= a.size() + b.size());
            let s = a.add(&b);
            prop_assert!(a.is_subset(&s) && b.is_subset(&s));
            for g in a.basis_elements() {
                prop_assert!(a.contains(&g));
            }
            let ai = a.numerator_ideal();
            let bi = b.numerator_ideal();
            let (ma, mb) = (ai.minimum().unwrap(), bi.minimum().unwrap());
            prop_assert!((&ma * &mb).is_multiple_of(&ai.mul(&bi, k).minimum().unwrap()));
            prop_assert!(ma.gcd(&mb).is_multiple_of(&ai.add(&bi).minimum().unwrap()));
            prop_assert!(ai.norm().to_integer().is_multiple_of(&ma));
            // denominator of the inverse of an integral ideal is its minimum
            let inv_den = ai.inverse(k).den().clone();
            prop_assert_eq!(inv_den, ma);
        }

        #[test]
        fn idempotents_contract(k in field_strategy(), seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = random_ideal(k, &mut rng, false);
            let b = random_ideal(k, &mut rng, false);
            match a.idempotents(&b) {
                Ok((x, y)) => {
                    prop_assert!(a.contains(&x) && b.contains(&y));
                    prop_assert_eq!(x.add(&y), k.one());
                }
                Err(e) => {
                    prop_assert_eq!(e, Error::NotCoprime);
                    prop_assert!(!a.add(&b).is_unit());
                }
            }
        }
    }
}
