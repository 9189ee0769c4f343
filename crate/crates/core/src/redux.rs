//! Reduction of elements modulo fractional ideals and normalization of
//! one-dimensional pseudo-rows.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::round_centered;
use crate::error::{Error, Result};
use crate::exact_linalg::{dixon_solve_left, IntMatrix};
use crate::ideal::FractionalIdeal;
use crate::lattice;
use crate::number_field::{FieldElement, NumberField};

/// Reduced bases keyed by the Hermite numerator of an integral ideal.
/// Safe to share between threads.
#[derive(Default)]
pub struct ReducedBasisCache {
    map: Mutex<HashMap<IntMatrix, IntMatrix>>,
    hits: AtomicUsize,
    misses: AtomicUsize,
    reduction_rhs: OnceLock<BigRational>,
    normalization_rhs: OnceLock<BigRational>,
}

impl ReducedBasisCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reduced basis of the integral ideal with Hermite basis `num`.
    pub fn reduced_basis(&self, num: &IntMatrix, k: &NumberField) -> Result<IntMatrix> {
        if let Some(b) = self.map.lock().unwrap().get(num) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(b.clone());
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let ideal = FractionalIdeal::from_parts_unchecked(num.clone(), BigInt::one());
        let b = lattice::reduce_ideal_basis(&ideal, k)?;
        self.map.lock().unwrap().insert(num.clone(), b.clone());
        Ok(b)
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    /// `c * d^{3d} * (l^2)^{d^2(d-1)/2} * |disc|^d`.
    fn reduction_rhs(&self, k: &NumberField) -> &BigRational {
        self.reduction_rhs.get_or_init(|| reduction_constant(k))
    }

    /// `c * (l^2)^{d^2} * |disc|`.
    fn normalization_rhs(&self, k: &NumberField) -> &BigRational {
        self.normalization_rhs.get_or_init(|| normalization_constant(k))
    }
}

fn reduction_constant(k: &NumberField) -> BigRational {
    let d = k.degree();
    let ctx = k.lattice();
    ctx.c_quality()
        * BigRational::from_integer(BigInt::from(d).pow(3 * d as u32))
        * num_traits::pow(ctx.ell_sq().clone(), d * d * (d - 1) / 2)
        * BigRational::from_integer(k.discriminant().abs().pow(d as u32))
}

fn normalization_constant(k: &NumberField) -> BigRational {
    let d = k.degree();
    let ctx = k.lattice();
    ctx.c_quality() * num_traits::pow(ctx.ell_sq().clone(), d * d) * BigRational::from_integer(k.discriminant().abs())
}

/// Whether `||a||^{2d} <= d^{3d} (l^2)^{d^2(d-1)/2} N(ideal)^2 |disc|^d`, using a
/// certified upper bound for `||a||^2`.
pub fn reduction_bound_holds(a: &FieldElement, ideal: &FractionalIdeal, k: &NumberField) -> bool {
    reduction_bound_with(a, ideal, k, &reduction_constant(k))
}

fn reduction_bound_with(a: &FieldElement, ideal: &FractionalIdeal, k: &NumberField, rhs: &BigRational) -> bool {
    let t2 = k.gram().t2_upper(a.coeffs(), a.den());
    let n = ideal.norm();
    num_traits::pow(t2, k.degree()) <= rhs * &n * &n
}

/// Whether the integral ideal satisfies `N^2 <= (l^2)^{d^2} |disc|`.
pub fn normalization_bound_holds(ideal: &FractionalIdeal, k: &NumberField) -> bool {
    normalization_bound_with(ideal, &normalization_constant(k))
}

fn normalization_bound_with(ideal: &FractionalIdeal, rhs: &BigRational) -> bool {
    let n = ideal.norm();
    ideal.is_integral() && &n * &n <= *rhs
}

/// Representative of `alpha` modulo `ideal`: writes `alpha` over the reduced
/// basis of `ideal` and keeps the centered fractional parts of the coordinates.
pub fn reduce_mod_ideal(
    alpha: &FieldElement,
    ideal: &FractionalIdeal,
    k: &NumberField,
    cache: &ReducedBasisCache,
) -> Result<FieldElement> {
    if alpha.is_zero() {
        return Ok(alpha.clone());
    }
    let d = k.degree();
    let l = ideal.den();
    let basis = cache.reduced_basis(ideal.numerator(), k)?;
    // alpha = beta / s; solve y * L = l * beta, coordinates over L / l are y / s
    let rhs: Vec<BigInt> = alpha.coeffs().iter().map(|c| c * l).collect();
    let y = dixon_solve_left(&basis, &rhs)?;
    let s = BigRational::from_integer(alpha.den().clone());
    let frac: Vec<BigRational> = y
        .iter()
        .map(|yi| {
            let q = yi / &s;
            &q - BigRational::from_integer(round_centered(&q))
        })
        .collect();
    let mut coords = vec![BigRational::zero(); d];
    for (f, i) in frac.iter().zip(0..d) {
        if f.is_zero() {
            continue;
        }
        for (c, b) in coords.iter_mut().zip(basis.row(i)) {
            *c += f * BigRational::from_integer(b.clone());
        }
    }
    let out = FieldElement::from_rationals(&coords).scalar_div(l)?;
    if cfg!(debug_assertions) && !reduction_bound_with(&out, ideal, k, cache.reduction_rhs(k)) {
        return Err(Error::ReductionBound("reduced element exceeds the norm bound".into()));
    }
    Ok(out)
}

/// Canonical representative of `alpha` modulo `ideal`: coordinates over the
/// Hermite basis of the numerator are taken into `[0, 1)`. Two elements get
/// the same output exactly when their difference lies in `ideal`.
pub fn reduce_mod_ideal_hnf(alpha: &FieldElement, ideal: &FractionalIdeal) -> FieldElement {
    if alpha.is_zero() {
        return alpha.clone();
    }
    let h = ideal.numerator();
    let d = h.rows();
    let scale = BigRational::new(ideal.den().clone(), alpha.den().clone());
    // target coordinates t = l * alpha, solve y * H = t with H lower triangular
    let t: Vec<BigRational> = alpha
        .coeffs()
        .iter()
        .map(|c| BigRational::from_integer(c.clone()) * &scale)
        .collect();
    let mut y = vec![BigRational::zero(); d];
    for j in (0..d).rev() {
        let mut s = t[j].clone();
        for (i, yi) in y.iter().enumerate().skip(j + 1) {
            s -= yi * BigRational::from_integer(h.get(i, j).clone());
        }
        y[j] = s / BigRational::from_integer(h.get(j, j).clone());
    }
    let mut coords = vec![BigRational::zero(); d];
    for (i, yi) in y.iter().enumerate() {
        let f = yi - BigRational::from_integer(yi.floor().to_integer());
        if f.is_zero() {
            continue;
        }
        for (c, b) in coords.iter_mut().zip(h.row(i)) {
            *c += &f * BigRational::from_integer(b.clone());
        }
    }
    let l = BigRational::from_integer(ideal.den().clone());
    let coords: Vec<BigRational> = coords.into_iter().map(|c| c / &l).collect();
    FieldElement::from_rationals(&coords)
}

/// Result of normalizing a pseudo-row.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub row: Vec<FieldElement>,
    pub ideal: FractionalIdeal,
    /// The row was multiplied by this scalar and the ideal by its inverse.
    pub scale: FieldElement,
}

/// Rescale `(row, ideal)` so the ideal becomes integral of bounded norm while
/// `ideal * row` is unchanged.
pub fn normalize_row(
    row: &[FieldElement],
    ideal: &FractionalIdeal,
    k: &NumberField,
    cache: &ReducedBasisCache,
) -> Result<Normalized> {
    let kd = ideal.den().clone();
    let b = ideal.numerator_ideal();
    let binv = b.inverse(k);
    let l = binv.den().clone();
    let c_basis = cache.reduced_basis(binv.numerator(), k)?;
    let alpha = FieldElement::new(c_basis.row(0).to_vec(), BigInt::one());
    let alpha_l = alpha.scalar_div(&l)?;
    let new_ideal = b.elt_mul(&alpha_l, k)?;
    let scale = alpha.inv(k)?.scalar_mul(&l).scalar_div(&kd)?;
    let new_row = row.iter().map(|x| x.mul(&scale, k)).collect();
    if !normalization_bound_with(&new_ideal, cache.normalization_rhs(k)) {
        return Err(Error::ReductionBound("normalized ideal exceeds the norm bound".into()));
    }
    Ok(Normalized {
        row: new_row,
        ideal: new_ideal,
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::ideal::tests::{gens, random_ideal};
    use crate::number_field::tests::{cubic, gaussian, golden, rationals, sqrt_m5};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    /// `ideal * row == n.ideal * n.row`, checked through the returned scale.
    fn same_module(row: &[FieldElement], ideal: &FractionalIdeal, n: &Normalized, k: &NumberField) -> bool {
        let rows_match = row.iter().zip(&n.row).all(|(x, y)| &x.mul(&n.scale, k) == y);
        rows_match && n.ideal.elt_mul(&n.scale, k).unwrap() == *ideal
    }

    #[test]
    fn reduce_examples() {
        let q = rationals();
        let cache = ReducedBasisCache::new();
        let r = reduce_mod_ideal(&q.integer(7), &gens(q, &[&[5]]), q, &cache).unwrap();
        assert_eq!(r, q.integer(2));
        let r = reduce_mod_ideal(&q.integer(0), &gens(q, &[&[5]]), q, &cache).unwrap();
        assert!(r.is_zero());
        let k = gaussian();
        let a = gens(k, &[&[2, 1]]);
        let x = k.element(&[3, 4]);
        let r = reduce_mod_ideal(&x, &a, k, &cache).unwrap();
        assert!(a.contains(&x.sub(&r)));
        assert!(reduction_bound_holds(&r, &a, k));
        // five residue classes mod (2+i): the representative has T2 at most 2 here
        assert!(k.t2_approx(&r) <= 2.0 + 1e-9);
    }

    #[test]
    fn normalize_examples() {
        let q = rationals();
        let cache = ReducedBasisCache::new();
        let n = normalize_row(&[q.integer(1)], &gens(q, &[&[3]]), q, &cache).unwrap();
        assert!(n.ideal.is_unit());
        assert_eq!(n.row[0].coeffs()[0].abs(), BigInt::from(3));
        let k = gaussian();
        let n = normalize_row(&[k.element(&[1, 2])], &FractionalIdeal::unit(k), k, &cache).unwrap();
        assert!(n.ideal.is_unit());
        let half = gens(k, &[&[1, 1]]).rat_mul(&rat(1, 2)).unwrap();
        let row = vec![k.element(&[2, 0]), k.element(&[1, 1])];
        let n = normalize_row(&row, &half, k, &cache).unwrap();
        assert!(n.ideal.is_integral());
        assert!(normalization_bound_holds(&n.ideal, k));
        assert!(same_module(&row, &half, &n, k));
    }

    #[test]
    fn hnf_residues_are_canonical() {
        let q = rationals();
        let two = gens(q, &[&[2]]);
        assert_eq!(reduce_mod_ideal_hnf(&q.integer(3), &two), q.integer(1));
        assert_eq!(reduce_mod_ideal_hnf(&q.integer(-3), &two), q.integer(1));
        let k = gaussian();
        let a = gens(k, &[&[2, 1]]).rat_mul(&rat(1, 3)).unwrap();
        let x = FieldElement::from_i64(&[7, -4], 5);
        let r = reduce_mod_ideal_hnf(&x, &a);
        assert!(a.contains(&x.sub(&r)));
        let shifted = x.add(&k.element(&[2, 1]).scalar_div(&BigInt::from(3)).unwrap().mul(&k.element(&[5, 9]), k));
        assert_eq!(reduce_mod_ideal_hnf(&shifted, &a), r);
    }

    #[test]
    fn cache_reuses_bases() {
        let k = gaussian();
        let cache = ReducedBasisCache::new();
        let a = gens(k, &[&[5, 3]]);
        for i in 0..5 {
            reduce_mod_ideal(&k.element(&[i, 7]), &a, k, &cache).unwrap();
        }
        assert_eq!(cache.misses(), 1);
        assert_eq!(cache.hits(), 4);
        assert_eq!(cache.len(), 1);
    }

    fn field_strategy() -> impl Strategy<Value = &'static NumberField> {
        prop::sample::select(vec![rationals(), gaussian(), sqrt_m5(), cubic(), golden()])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn reduction_contract(k in field_strategy(), seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let cache = ReducedBasisCache::new();
            let a = random_ideal(k, &mut rng, true);
            let c: Vec<i64> = (0..k.degree()).map(|_| rng.gen_range(-1000..1000)).collect();
            let x = FieldElement::from_i64(&c, rng.gen_range(1..20));
            let r = reduce_mod_ideal(&x, &a, k, &cache).unwrap();
            prop_assert!(a.contains(&x.sub(&r)));
            prop_assert!(reduction_bound_holds(&r, &a, k));
            let r2 = reduce_mod_ideal(&r, &a, k, &cache).unwrap();
            prop_assert!(a.contains(&r.sub(&r2)));
            prop_assert!(reduction_bound_holds(&r2, &a, k));
        }

        #[test]
        fn normalization_contract(k in field_strategy(), seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let cache = ReducedBasisCache::new();
            let a = random_ideal(k, &mut rng, true);
            let row: Vec<FieldElement> = (0..2)
                .map(|_| FieldElement::from_i64(&(0..k.degree()).map(|_| rng.gen_range(-50..50)).collect::<Vec<_>>(), rng.gen_range(1..5)))
                .collect();
            prop_assume!(row.iter().any(|x| !x.is_zero()));
            let n = normalize_row(&row, &a, k, &cache).unwrap();
            prop_assert!(n.ideal.is_integral());
            prop_assert!(normalization_bound_holds(&n.ideal, k));
            prop_assert!(same_module(&row, &a, &n, k));
        }
    }
}
