//! Pseudo-Smith normal form of square nonsingular bi-pseudo matrices: the
//! elementary divisor chain of the quotient of two modules of equal rank.
//!
//! A bi-pseudo matrix `(A, (b_i), (a_j))` stands for `M = sum b_i e_i` and
//! `N = sum a_j f_j` with `f_j = sum_i A[i][j] e_i`. Internally the row ideals
//! are kept inverted, `r_i = b_i^-1`, so that rows and columns play symmetric
//! roles: the integrality condition reads `A[i][j] r_i c_j` inside O_K, and
//! transposing the matrix while swapping `r` and `c` is a symmetry of the
//! whole computation.

use crate::determinant::{det_of_rows, ideal_product};
use crate::error::{Error, Result};
use crate::ideal::FractionalIdeal;
use crate::number_field::{FieldElement, NumberField};
use crate::pseudo_hnf::euclidean_step;
use crate::redux::{normalize_row, reduce_mod_ideal, ReducedBasisCache};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiPseudoMatrix {
    a: Vec<Vec<FieldElement>>,
    row_ideals: Vec<FractionalIdeal>,
    col_ideals: Vec<FractionalIdeal>,
}

impl BiPseudoMatrix {
    /// Checks squareness and `A[i][j]` in `b_i a_j^-1`.
    pub fn new(
        a: Vec<Vec<FieldElement>>,
        row_ideals: Vec<FractionalIdeal>,
        col_ideals: Vec<FractionalIdeal>,
        k: &NumberField,
    ) -> Result<Self> {
        let n = a.len();
        if a.iter().any(|r| r.len() != n) || row_ideals.len() != n || col_ideals.len() != n {
            return Err(Error::Dimension("bi-pseudo matrix must be square with n row and n column ideals".into()));
        }
        for (i, row) in a.iter().enumerate() {
            let allowed = row_ideals[i].clone();
            for (j, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                if !allowed.div(&col_ideals[j], k).contains(x) {
                    return Err(Error::BiPseudoIntegrality(i, j));
                }
            }
        }
        Ok(BiPseudoMatrix { a, row_ideals, col_ideals })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn matrix(&self) -> &[Vec<FieldElement>] {
        &self.a
    }

    pub fn row_ideals(&self) -> &[FractionalIdeal] {
        &self.row_ideals
    }

    pub fn col_ideals(&self) -> &[FractionalIdeal] {
        &self.col_ideals
    }

    /// `det(A) prod a_i b_i^-1`, the order ideal of the quotient.
    pub fn determinantal_ideal(&self, k: &NumberField) -> Result<FractionalIdeal> {
        let d = det_of_rows(&self.a, k)?;
        if d.is_zero() {
            return Err(Error::Singular);
        }
        let rows: Vec<FractionalIdeal> = self.row_ideals.iter().map(|b| b.inverse(k)).collect();
        ideal_product(&self.col_ideals, k)
            .mul(&ideal_product(&rows, k), k)
            .elt_mul(&d, k)
    }
}

/// Elementary divisors `d_1, ..., d_n`, integral, with `d_{i-1}` inside `d_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorChain(Vec<FractionalIdeal>);

impl DivisorChain {
    /// Wraps a claimed chain without checking it; see [`Self::is_valid`].
    pub fn from_divisors(d: Vec<FractionalIdeal>) -> Self {
        DivisorChain(d)
    }

    pub fn divisors(&self) -> &[FractionalIdeal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn product(&self, k: &NumberField) -> FractionalIdeal {
        ideal_product(&self.0, k)
    }

    /// Integrality and the containment chain.
    pub fn is_valid(&self) -> bool {
        self.0.iter().all(|d| d.is_integral()) && self.0.windows(2).all(|w| w[0].is_subset(&w[1]))
    }
}

/// Working state of the elimination. Public so that single pivot steps can
/// be exercised on their own.
pub struct SnfState<'a> {
    k: &'a NumberField,
    a: Vec<Vec<FieldElement>>,
    r: Vec<FractionalIdeal>,
    c: Vec<FractionalIdeal>,
    /// Running modulus.
    dd: FractionalIdeal,
    transposed: bool,
    cache: ReducedBasisCache,
}

/// An entry that the pivot ideal does not divide, with the multiplier of
/// row `k` to add to the pivot row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    pub k: usize,
    pub l: usize,
    pub g: FieldElement,
}

impl<'a> SnfState<'a> {
    pub fn new(b: &BiPseudoMatrix, dd: &FractionalIdeal, k: &'a NumberField) -> Result<Self> {
        if !dd.is_integral() {
            return Err(Error::IdealNotIntegral);
        }
        if dd.numerator().is_zero() {
            return Err(Error::ZeroIdeal);
        }
        Ok(SnfState {
            k,
            a: b.a.clone(),
            r: b.row_ideals.iter().map(|x| x.inverse(k)).collect(),
            c: b.col_ideals.clone(),
            dd: dd.clone(),
            transposed: false,
            cache: ReducedBasisCache::new(),
        })
    }

    pub fn entry(&self, i: usize, j: usize) -> &FieldElement {
        &self.a[i][j]
    }

    pub fn modulus(&self) -> &FractionalIdeal {
        &self.dd
    }

    /// The current bi-pseudo matrix in the caller's orientation.
    pub fn to_bipseudo(&self) -> BiPseudoMatrix {
        let n = self.a.len();
        let (a, r, c) = if self.transposed {
            let t = (0..n).map(|i| (0..n).map(|j| self.a[j][i].clone()).collect()).collect();
            (t, &self.c, &self.r)
        } else {
            (self.a.clone(), &self.r, &self.c)
        };
        BiPseudoMatrix {
            a,
            row_ideals: r.iter().map(|x| x.inverse(self.k)).collect(),
            col_ideals: c.clone(),
        }
    }

    fn transpose(&mut self) {
        let n = self.a.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let x = std::mem::replace(&mut self.a[i][j], self.k.zero());
                let y = std::mem::replace(&mut self.a[j][i], x);
                self.a[i][j] = y;
            }
        }
        std::mem::swap(&mut self.r, &mut self.c);
        self.transposed = !self.transposed;
    }

    fn set_orientation(&mut self, transposed: bool) {
        if self.transposed != transposed {
            self.transpose();
        }
    }

    fn normalize_col(&mut self, j: usize) -> Result<()> {
        let col: Vec<FieldElement> = self.a.iter().map(|r| r[j].clone()).collect();
        let nr = normalize_row(&col, &self.c[j], self.k, &self.cache)?;
        for (row, x) in self.a.iter_mut().zip(nr.row) {
            row[j] = x;
        }
        self.c[j] = nr.ideal;
        Ok(())
    }

    fn normalize_all(&mut self) -> Result<()> {
        for j in 0..self.a.len() {
            self.normalize_col(j)?;
        }
        self.transpose();
        for j in 0..self.a.len() {
            self.normalize_col(j)?;
        }
        self.transpose();
        Ok(())
    }

    fn reduce_entry(&mut self, i: usize, j: usize) -> Result<()> {
        if self.a[i][j].is_zero() {
            return Ok(());
        }
        let modulus = self.dd.div(&self.r[i].mul(&self.c[j], self.k), self.k);
        self.a[i][j] = reduce_mod_ideal(&self.a[i][j], &modulus, self.k, &self.cache)?;
        Ok(())
    }

    /// Reduce column `j` in rows `0..=upto`, leaving the pivot alone.
    fn reduce_col(&mut self, j: usize, upto: usize, pivot: usize) -> Result<()> {
        for i in 0..=upto {
            if !(i == pivot && j == pivot) {
                self.reduce_entry(i, j)?;
            }
        }
        Ok(())
    }

    fn reduce_all(&mut self, upto: usize) -> Result<()> {
        for j in 0..=upto {
            self.reduce_col(j, upto, usize::MAX)?;
        }
        Ok(())
    }

    /// Clear row `i` left of the pivot by column operations. Returns whether
    /// anything changed.
    fn clear_row(&mut self, i: usize) -> Result<bool> {
        let k = self.k;
        let mut changed = false;
        for j in (0..i).rev() {
            if self.a[i][j].is_zero() {
                continue;
            }
            changed = true;
            if self.a[i][i].is_zero() {
                for row in self.a.iter_mut() {
                    row.swap(i, j);
                }
                self.c.swap(i, j);
                continue;
            }
            let (aii, aij) = (self.a[i][i].clone(), self.a[i][j].clone());
            let e = euclidean_step(&self.c[i], &self.c[j], &aii, &aij, k)?;
            for row in self.a.iter_mut() {
                let (xi, xj) = (row[i].clone(), row[j].clone());
                row[j] = xj.mul(&aii, k).sub(&xi.mul(&aij, k));
                row[i] = xi.mul(&e.gamma, k).add(&xj.mul(&e.delta, k));
            }
            let cj = self.c[i].mul(&self.c[j], k).mul(&e.g_inv, k);
            self.c[j] = cj;
            self.c[i] = e.g;
            self.normalize_col(j)?;
            self.normalize_col(i)?;
            self.reduce_col(j, i, i)?;
            self.reduce_col(i, i, i)?;
        }
        Ok(changed)
    }

    /// Column operations clearing row `i` to the left of the pivot.
    pub fn col_pivot(&mut self, i: usize) -> Result<()> {
        self.set_orientation(false);
        self.clear_row(i)?;
        Ok(())
    }

    /// Row operations clearing column `i` above the pivot. Returns true when
    /// the column was already clear.
    pub fn row_pivot(&mut self, i: usize) -> Result<bool> {
        self.set_orientation(true);
        let changed = self.clear_row(i)?;
        self.set_orientation(false);
        Ok(!changed)
    }

    /// `A[i][i] c_i r_i + d`, which grows strictly while pivot `i` is open.
    pub fn pivot_ideal(&self, i: usize) -> FractionalIdeal {
        debug_assert!(!self.transposed);
        if self.a[i][i].is_zero() {
            return self.dd.clone();
        }
        self.c[i]
            .mul(&self.r[i], self.k)
            .elt_mul(&self.a[i][i], self.k)
            .expect("nonzero pivot")
            .add(&self.dd)
    }

    /// First entry `(k, l)` of the leading block, in row-major order, whose
    /// ideal `A[k][l] c_l r_k` is not inside the pivot ideal, together with a
    /// basis element `g` of `r_i^-1 r_k` witnessing it.
    pub fn offdiag_obstruction_scan(&self, i: usize) -> Option<Obstruction> {
        debug_assert!(!self.transposed);
        let k = self.k;
        let piv = self.pivot_ideal(i);
        for kk in 0..i {
            for l in 0..i {
                let x = &self.a[kk][l];
                if x.is_zero() {
                    continue;
                }
                let cl_x = self.c[l].elt_mul(x, k).expect("nonzero entry");
                if cl_x.mul(&self.r[kk], k).is_subset(&piv) {
                    continue;
                }
                let target = cl_x.mul(&self.r[i], k);
                let allowed = self.r[kk].div(&self.r[i], k);
                let g = allowed
                    .basis_elements()
                    .into_iter()
                    .find(|g| !target.elt_mul(g, k).expect("basis element").is_subset(&piv))
                    .expect("some basis element witnesses the failed containment");
                return Some(Obstruction { k: kk, l, g });
            }
        }
        None
    }

    fn apply_obstruction(&mut self, i: usize, o: &Obstruction) -> Result<()> {
        let k = self.k;
        for l in 0..=i {
            let v = self.a[i][l].add(&o.g.mul(&self.a[o.k][l], k));
            self.a[i][l] = v;
        }
        for l in 0..i {
            self.reduce_entry(i, l)?;
        }
        Ok(())
    }

    /// Close pivot `i` and return its divisor.
    fn finalize(&mut self, i: usize) -> FractionalIdeal {
        let di = self.pivot_ideal(i);
        if !self.a[i][i].is_zero() {
            let ci = self.c[i].elt_mul(&self.a[i][i], self.k).expect("nonzero pivot");
            self.c[i] = ci;
            self.a[i][i] = self.k.one();
        }
        self.dd = self.dd.div(&di, self.k);
        di
    }
}

/// Pivot ideals observed each time row and column of the pivot are clear,
/// per pivot, in processing order. Every obstruction makes the next one
/// strictly larger.
#[derive(Debug, Clone, Default)]
pub struct SnfTrace {
    pub pivot_ideals: Vec<Vec<FractionalIdeal>>,
    pub obstructions: usize,
}

impl SnfTrace {
    /// Whether each pivot's ideals form a strictly increasing chain.
    pub fn strictly_increasing(&self) -> bool {
        self.pivot_ideals
            .iter()
            .all(|v| v.windows(2).all(|w| w[0].is_subset(&w[1]) && w[0] != w[1]))
    }
}

/// Divisor chain of the quotient, using `dd` as modulus when given and the
/// order ideal of the quotient otherwise.
pub fn pseudo_snf(b: &BiPseudoMatrix, dd: Option<&FractionalIdeal>, k: &NumberField) -> Result<DivisorChain> {
    pseudo_snf_traced(b, dd, k).map(|(c, _)| c)
}

pub fn pseudo_snf_traced(
    b: &BiPseudoMatrix,
    dd: Option<&FractionalIdeal>,
    k: &NumberField,
) -> Result<(DivisorChain, SnfTrace)> {
    let n = b.n();
    let dd = match dd {
        Some(d) => d.clone(),
        None => b.determinantal_ideal(k)?,
    };
    let mut st = SnfState::new(b, &dd, k)?;
    let mut trace = SnfTrace::default();
    if n == 0 {
        return Ok((DivisorChain(Vec::new()), trace));
    }
    st.normalize_all()?;
    st.reduce_all(n - 1)?;
    let mut divisors = vec![FractionalIdeal::unit(k); n];
    for i in (0..n).rev() {
        let mut seen: Vec<FractionalIdeal> = Vec::new();
        loop {
            st.col_pivot(i)?;
            if !st.row_pivot(i)? {
                continue;
            }
            let piv = st.pivot_ideal(i);
            debug_assert!(seen.last().is_none_or(|p| p.is_subset(&piv) && *p != piv));
            seen.push(piv);
            match st.offdiag_obstruction_scan(i) {
                Some(o) => {
                    trace.obstructions += 1;
                    st.apply_obstruction(i, &o)?;
                }
                None => break,
            }
        }
        divisors[i] = st.finalize(i);
        trace.pivot_ideals.push(seen);
    }
    Ok((DivisorChain(divisors), trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::{z_snf, IntMatrix};
    use crate::ideal::tests::{gens, random_ideal};
    use crate::number_field::tests::{cubic, gaussian, golden, rationals, sqrt_m5};
    use crate::verify::{chain_invariants, quotient_invariants};
    use num_bigint::BigInt;
    use num_traits::Zero;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn trivial(k: &NumberField, rows: &[&[&[i64]]]) -> BiPseudoMatrix {
        let n = rows.len();
        let a = rows.iter().map(|r| r.iter().map(|e| k.element(e)).collect()).collect();
        BiPseudoMatrix::new(a, vec![FractionalIdeal::unit(k); n], vec![FractionalIdeal::unit(k); n], k).unwrap()
    }

    fn principal(k: &NumberField, n: i64) -> FractionalIdeal {
        FractionalIdeal::principal(&k.integer(n), k).unwrap()
    }

    /// Random nonsingular bi-pseudo matrix with entries drawn from `b_i a_j^-1`.
    pub(crate) fn random_bipseudo(k: &NumberField, n: usize, bound: i64, frac: bool, rng: &mut impl Rng) -> BiPseudoMatrix {
        loop {
            let rows: Vec<FractionalIdeal> = (0..n).map(|_| random_ideal(k, rng, frac)).collect();
            let cols: Vec<FractionalIdeal> = (0..n).map(|_| random_ideal(k, rng, frac)).collect();
            let a: Vec<Vec<FieldElement>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let basis = rows[i].div(&cols[j], k).basis_elements();
                            basis.iter().fold(k.zero(), |x, b| x.add(&b.scalar_mul(&BigInt::from(rng.gen_range(-bound..=bound)))))
                        })
                        .collect()
                })
                .collect();
            let b = BiPseudoMatrix::new(a, rows, cols, k).unwrap();
            if b.determinantal_ideal(k).is_ok() {
                return b;
            }
        }
    }

    #[test]
    fn construction_checks_integrality() {
        let q = rationals();
        let two = principal(q, 2);
        let a = vec![vec![q.integer(1)]];
        let err = BiPseudoMatrix::new(a.clone(), vec![two.clone()], vec![FractionalIdeal::unit(q)], q);
        assert!(matches!(err, Err(Error::BiPseudoIntegrality(0, 0))));
        assert!(BiPseudoMatrix::new(a, vec![two.clone()], vec![two], q).is_ok());
        let sing = trivial(q, &[&[&[1], &[2]], &[&[2], &[4]]]);
        assert!(matches!(pseudo_snf(&sing, None, q), Err(Error::Singular)));
    }

    #[test]
    fn snf_examples() {
        let q = rationals();
        let b = trivial(q, &[&[&[2], &[0]], &[&[0], &[6]]]);
        assert_eq!(b.determinantal_ideal(q).unwrap(), principal(q, 12));
        let c = pseudo_snf(&b, None, q).unwrap();
        assert_eq!(c.divisors(), &[principal(q, 6), principal(q, 2)]);
        let k = gaussian();
        let id = trivial(k, &[&[&[1, 0], &[0, 0], &[0, 0]], &[&[0, 0], &[1, 0], &[0, 0]], &[&[0, 0], &[0, 0], &[1, 0]]]);
        let c = pseudo_snf(&id, None, k).unwrap();
        assert!(c.divisors().iter().all(|d| d.is_unit()));
        let b = trivial(k, &[&[&[1, 1], &[0, 0]], &[&[0, 0], &[1, 0]]]);
        let c = pseudo_snf(&b, None, k).unwrap();
        assert_eq!(c.divisors(), &[gens(k, &[&[1, 1]]), FractionalIdeal::unit(k)]);
        assert!(c.is_valid());
    }

    #[test]
    fn pivot_examples() {
        let q = rationals();
        let b = trivial(q, &[&[&[1], &[0]], &[&[3], &[2]]]);
        let dd = b.determinantal_ideal(q).unwrap();
        let mut st = SnfState::new(&b, &dd, q).unwrap();
        st.col_pivot(1).unwrap();
        assert!(st.entry(1, 0).is_zero());
        assert_eq!(st.pivot_ideal(1), FractionalIdeal::unit(q));
        // already clear column: nothing to do
        let b = trivial(q, &[&[&[5], &[0]], &[&[0], &[1]]]);
        let mut st = SnfState::new(&b, &principal(q, 5), q).unwrap();
        assert!(st.row_pivot(1).unwrap());
        assert_eq!(st.offdiag_obstruction_scan(1), None);
        let b = trivial(q, &[&[&[6], &[0]], &[&[0], &[4]]]);
        let st = SnfState::new(&b, &principal(q, 24), q).unwrap();
        assert_eq!(st.offdiag_obstruction_scan(1), Some(Obstruction { k: 0, l: 0, g: q.one() }));
    }

    #[test]
    fn col_pivot_keeps_quotient() {
        let k = gaussian();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..8 {
            let b = random_bipseudo(k, 3, 6, true, &mut rng);
            let dd = b.determinantal_ideal(k).unwrap();
            let before = quotient_invariants(&b, Some(&dd), k).unwrap();
            let mut st = SnfState::new(&b, &dd, k).unwrap();
            st.col_pivot(2).unwrap();
            assert!(st.entry(2, 0).is_zero() && st.entry(2, 1).is_zero());
            assert_eq!(quotient_invariants(&st.to_bipseudo(), Some(&dd), k).unwrap(), before);
            st.row_pivot(2).unwrap();
            assert!(st.entry(0, 2).is_zero() && st.entry(1, 2).is_zero());
            assert_eq!(quotient_invariants(&st.to_bipseudo(), Some(&dd), k).unwrap(), before);
        }
    }

    #[test]
    fn d1_matches_integer_snf() {
        let q = rationals();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 25 {
            let n = rng.gen_range(1..6);
            let a = IntMatrix::from_rows((0..n).map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-20..20))).collect()).collect());
            let s = z_snf(&a);
            if (0..n).any(|i| s.get(i, i).is_zero()) {
                continue;
            }
            let rows = a.to_rows().into_iter().map(|r| r.into_iter().map(|x| FieldElement::from_integer(1, x)).collect()).collect();
            let b = BiPseudoMatrix::new(rows, vec![FractionalIdeal::unit(q); n], vec![FractionalIdeal::unit(q); n], q).unwrap();
            let c = pseudo_snf(&b, None, q).unwrap();
            let expect: Vec<FractionalIdeal> = (0..n)
                .rev()
                .map(|i| FractionalIdeal::from_integer(s.get(i, i), q).unwrap())
                .collect();
            assert_eq!(c.divisors(), &expect[..]);
            done += 1;
        }
    }

    fn field_strategy() -> impl Strategy<Value = &'static NumberField> {
        prop::sample::select(vec![rationals(), gaussian(), sqrt_m5(), cubic(), golden()])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn chain_contract(k in field_strategy(), seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..4);
            let b = random_bipseudo(k, n, 8, true, &mut rng);
            let dd = b.determinantal_ideal(k).unwrap();
            let (c, trace) = pseudo_snf_traced(&b, None, k).unwrap();
            prop_assert!(c.is_valid());
            prop_assert_eq!(c.product(k), dd);
            prop_assert!(trace.strictly_increasing());
            if k.degree() <= 2 {
                prop_assert_eq!(chain_invariants(&c), quotient_invariants(&b, None, k).unwrap());
            }
        }
    }
}
