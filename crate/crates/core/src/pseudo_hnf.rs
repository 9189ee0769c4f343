//! Pseudo-matrices, the Euclidean step over Dedekind domains and the modular
//! pseudo-Hermite normal form with normalized coefficient ideals.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::isqrt_ceil;
use crate::determinant;
use crate::error::{Error, Result};
use crate::exact_linalg::IntMatrix;
use crate::ideal::FractionalIdeal;
use crate::number_field::{FieldElement, NumberField};
use crate::redux::{normalize_row, reduce_mod_ideal, reduce_mod_ideal_hnf, ReducedBasisCache};

/// Matrix over K with one coefficient ideal per row, standing for the module
/// `sum_i a_i * A_i`.
#[derive(Clone, PartialEq, Eq)]
pub struct PseudoMatrix {
    rows: Vec<Vec<FieldElement>>,
    ideals: Vec<FractionalIdeal>,
    cols: usize,
    det_ideal: Option<FractionalIdeal>,
}

impl fmt::Debug for PseudoMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, a) in self.rows.iter().zip(&self.ideals) {
            writeln!(f, "{a:?} | {r:?}")?;
        }
        Ok(())
    }
}

impl PseudoMatrix {
    pub fn new(rows: Vec<Vec<FieldElement>>, ideals: Vec<FractionalIdeal>) -> Result<Self> {
        if rows.len() != ideals.len() {
            return Err(Error::Dimension("one coefficient ideal per row".into()));
        }
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("rows of unequal length".into()));
        }
        Ok(PseudoMatrix {
            rows,
            ideals,
            cols,
            det_ideal: None,
        })
    }

    /// `(I_m, (O_K, ..., O_K))`.
    pub fn identity(m: usize, k: &NumberField) -> Self {
        let rows = (0..m)
            .map(|i| (0..m).map(|j| if i == j { k.one() } else { k.zero() }).collect())
            .collect();
        PseudoMatrix::new(rows, vec![FractionalIdeal::unit(k); m]).unwrap()
    }

    pub fn with_det_ideal(mut self, d: FractionalIdeal) -> Self {
        self.det_ideal = Some(d);
        self
    }

    pub fn det_ideal(&self) -> Option<&FractionalIdeal> {
        self.det_ideal.as_ref()
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn m(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.rows[i]
    }

    pub fn ideals(&self) -> &[FractionalIdeal] {
        &self.ideals
    }

    pub fn ideal(&self, i: usize) -> &FractionalIdeal {
        &self.ideals[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> &FieldElement {
        &self.rows[i][j]
    }

    /// Whether every `a_i * A_i` lies in `O_K^m`.
    pub fn is_in_ok_m(&self, k: &NumberField) -> bool {
        to_absolute(self, k).is_ok()
    }

    /// Whether the top block is lower triangular with ones on the diagonal.
    pub fn is_unit_triangular(&self) -> bool {
        let m = self.cols;
        self.n() >= m
            && (0..m).all(|i| {
                self.rows[i][i].as_rational().is_some_and(|q| q.is_one())
                    && self.rows[i][(i + 1)..].iter().all(|x| x.is_zero())
            })
    }
}

/// Integer matrix whose row span is the module under `O_K^m = Z^{dm}`: the
/// rows are the coefficient vectors of `g * A_i` for `g` running over the
/// basis of `a_i`.
pub fn to_absolute(p: &PseudoMatrix, k: &NumberField) -> Result<IntMatrix> {
    let d = k.degree();
    let mut out = Vec::with_capacity(p.n() * d);
    for (i, (row, a)) in p.rows.iter().zip(&p.ideals).enumerate() {
        for g in a.basis_elements() {
            let mut v = Vec::with_capacity(p.cols * d);
            for x in row {
                let y = x.mul(&g, k);
                if !y.is_integral() {
                    return Err(Error::NotIntegralModule(format!("row {i} has a fractional product")));
                }
                v.extend(y.coeffs().iter().cloned());
            }
            out.push(v);
        }
    }
    let mut m = IntMatrix::from_rows(out);
    if m.rows() == 0 {
        m = IntMatrix::zeros(0, p.cols * d);
    }
    Ok(m)
}

/// Output of the Euclidean step.
#[derive(Debug, Clone)]
pub struct EuclidStep {
    pub g: FractionalIdeal,
    pub g_inv: FractionalIdeal,
    pub gamma: FieldElement,
    pub delta: FieldElement,
}

/// `g = alpha a + beta b` with `gamma` in `a g^-1`, `delta` in `b g^-1` and
/// `alpha gamma + beta delta = 1`.
pub fn euclidean_step(
    a: &FractionalIdeal,
    b: &FractionalIdeal,
    alpha: &FieldElement,
    beta: &FieldElement,
    k: &NumberField,
) -> Result<EuclidStep> {
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::ZeroEuclid);
    }
    let aa = a.elt_mul(alpha, k)?;
    let bb = b.elt_mul(beta, k)?;
    let g = aa.add(&bb);
    let g_inv = g.inverse(k);
    let x = aa.mul(&g_inv, k);
    let y = bb.mul(&g_inv, k);
    let (gt, dt) = x.idempotents(&y)?;
    let gamma = gt.mul(&alpha.inv(k)?, k);
    let delta = dt.mul(&beta.inv(k)?, k);
    Ok(EuclidStep { g, g_inv, gamma, delta })
}

/// Size record of one pivot column.
#[derive(Debug, Clone)]
pub struct ColumnStats {
    pub column: usize,
    /// Largest `min(b_j)` seen over the rows still being processed, sampled
    /// after every normalization in this column.
    pub max_min: BigInt,
    pub max_norm: BigRational,
    pub steps: usize,
}

#[derive(Debug, Clone, Default)]
pub struct HnfTrace {
    pub columns: Vec<ColumnStats>,
    pub normalizations: usize,
    pub cache_hits: usize,
    pub cache_misses: usize,
}

impl HnfTrace {
    pub fn max_min(&self) -> BigInt {
        self.columns.iter().map(|c| c.max_min.clone()).max().unwrap_or_else(BigInt::zero)
    }
}

/// `ceil(l^{d^2} sqrt|disc|)`, the norm bound of normalized ideals.
pub fn normalized_norm_bound(k: &NumberField) -> BigInt {
    let d = k.degree();
    let x = num_traits::pow(k.lattice().ell_sq().clone(), d * d) * BigRational::from_integer(k.discriminant().abs());
    isqrt_ceil(&x.ceil().to_integer())
}

struct State<'a> {
    k: &'a NumberField,
    cache: ReducedBasisCache,
    rows: Vec<Vec<FieldElement>>,
    ideals: Vec<FractionalIdeal>,
    dd: FractionalIdeal,
    normalizations: usize,
}

impl State<'_> {
    fn normalize(&mut self, i: usize) -> Result<()> {
        let nr = normalize_row(&self.rows[i], &self.ideals[i], self.k, &self.cache)?;
        self.rows[i] = nr.row;
        self.ideals[i] = nr.ideal;
        self.normalizations += 1;
        Ok(())
    }

    /// Reduce every entry of row `i` modulo `modulus`.
    fn reduce_row(&mut self, i: usize, modulus: &FractionalIdeal) -> Result<()> {
        for x in self.rows[i].iter_mut() {
            if !x.is_zero() {
                *x = reduce_mod_ideal(x, modulus, self.k, &self.cache)?;
            }
        }
        Ok(())
    }

    fn reduce_by_det(&mut self, i: usize) -> Result<()> {
        let modulus = self.dd.div(&self.ideals[i], self.k);
        self.reduce_row(i, &modulus)
    }

    fn sample(&self, upto: usize, stats: &mut ColumnStats) {
        for a in &self.ideals[..=upto] {
            let mn = a.numerator_minimum();
            if *mn > stats.max_min {
                stats.max_min = mn.clone();
            }
            let nm = a.norm();
            if nm > stats.max_norm {
                stats.max_norm = nm;
            }
        }
    }
}

fn combine(x: &[FieldElement], sx: &FieldElement, y: &[FieldElement], sy: &FieldElement, k: &NumberField) -> Vec<FieldElement> {
    x.iter().zip(y).map(|(a, b)| a.mul(sx, k).add(&b.mul(sy, k))).collect()
}

/// Pseudo-HNF of a full rank pseudo-matrix of a module inside `O_K^m`, given
/// a nonzero multiple `dd` of its determinantal ideal. Returns `m` rows, lower
/// triangular with unit diagonal.
pub fn pseudo_hnf(p: &PseudoMatrix, dd: &FractionalIdeal, k: &NumberField) -> Result<PseudoMatrix> {
    pseudo_hnf_traced(p, dd, k).map(|(h, _)| h)
}

/// Pseudo-HNF with the multiple of the determinantal ideal computed from a
/// nonsingular maximal minor.
pub fn pseudo_hnf_auto(p: &PseudoMatrix, k: &NumberField) -> Result<PseudoMatrix> {
    let dd = match p.det_ideal() {
        Some(d) => d.clone(),
        None => determinant::determinantal_ideal_multiple(p, k)?,
    };
    pseudo_hnf(p, &dd, k)
}

pub fn pseudo_hnf_traced(p: &PseudoMatrix, dd: &FractionalIdeal, k: &NumberField) -> Result<(PseudoMatrix, HnfTrace)> {
    let (n, m) = (p.n(), p.m());
    if n < m || m == 0 {
        return Err(Error::RankDeficient);
    }
    if !dd.is_integral() {
        return Err(Error::IdealNotIntegral);
    }
    to_absolute(p, k)?;
    if (0..m).any(|j| p.rows.iter().all(|r| r[j].is_zero())) {
        return Err(Error::RankDeficient);
    }
    let mut st = State {
        k,
        cache: ReducedBasisCache::new(),
        rows: p.rows.clone(),
        ideals: p.ideals.clone(),
        dd: dd.clone(),
        normalizations: 0,
    };
    let mut trace = HnfTrace::default();
    for i in 0..n {
        st.normalize(i)?;
        st.reduce_by_det(i)?;
    }
    let mut running = dd.clone();
    for i in ((n - m)..n).rev() {
        let c = i - (n - m);
        let mut stats = ColumnStats {
            column: c,
            max_min: BigInt::zero(),
            max_norm: BigRational::zero(),
            steps: 0,
        };
        st.sample(i, &mut stats);
        for j in (0..i).rev() {
            if st.rows[j][c].is_zero() {
                continue;
            }
            if st.rows[i][c].is_zero() {
                st.rows.swap(i, j);
                st.ideals.swap(i, j);
                continue;
            }
            let (bji, bii) = (st.rows[j][c].clone(), st.rows[i][c].clone());
            let e = euclidean_step(&st.ideals[j], &st.ideals[i], &bji, &bii, k)?;
            let new_bj = st.ideals[j].mul(&st.ideals[i], k).mul(&e.g_inv, k);
            st.ideals[j] = new_bj;
            st.ideals[i] = e.g;
            let rj = combine(&st.rows[j], &bii, &st.rows[i], &bji.neg(), k);
            let ri = combine(&st.rows[j], &e.gamma, &st.rows[i], &e.delta, k);
            st.rows[j] = rj;
            st.rows[i] = ri;
            st.normalize(j)?;
            st.normalize(i)?;
            st.reduce_by_det(j)?;
            st.reduce_by_det(i)?;
            stats.steps += 1;
            st.sample(i, &mut stats);
        }
        // final pivot: combine with the running modulus
        let bii = st.rows[i][c].clone();
        let (g, gamma) = if bii.is_zero() {
            (running.clone(), k.zero())
        } else {
            let e = euclidean_step(&st.ideals[i], &running, &bii, &k.one(), k)?;
            (e.g, e.gamma)
        };
        let modulus = running.div(&g, k);
        st.rows[i] = st.rows[i].iter().map(|x| x.mul(&gamma, k)).collect();
        st.reduce_row(i, &modulus)?;
        st.rows[i][c] = k.one();
        st.ideals[i] = g.clone();
        running = modulus;
        trace.columns.push(stats);
    }
    trace.normalizations = st.normalizations;
    trace.cache_hits = st.cache.hits();
    trace.cache_misses = st.cache.misses();
    let rows = st.rows[(n - m)..].to_vec();
    let ideals = st.ideals[(n - m)..].to_vec();
    debug_assert!(st.rows[..(n - m)].iter().all(|r| r.iter().all(|x| x.is_zero())));
    Ok((PseudoMatrix::new(rows, ideals)?, trace))
}

/// Unique representative of a pseudo-HNF: every entry left of the diagonal
/// is replaced by its canonical residue modulo `a_i^-1 a_j`, computed on the
/// Hermite basis of that ideal.
pub fn canonicalize(h: &PseudoMatrix, k: &NumberField) -> Result<PseudoMatrix> {
    let m = h.m();
    if h.n() != m || !h.is_unit_triangular() {
        return Err(Error::NotTriangular);
    }
    let mut rows = h.rows.clone();
    let inv: Vec<FractionalIdeal> = h.ideals.iter().map(|a| a.inverse(k)).collect();
    for i in 1..m {
        for c in (0..i).rev() {
            let x = rows[i][c].clone();
            let modulus = inv[i].mul(&h.ideals[c], k);
            let r = reduce_mod_ideal_hnf(&x, &modulus);
            let q = x.sub(&r);
            if q.is_zero() {
                continue;
            }
            for t in 0..c {
                let v = rows[i][t].sub(&q.mul(&rows[c][t], k));
                rows[i][t] = v;
            }
            rows[i][c] = r;
        }
    }
    PseudoMatrix::new(rows, h.ideals.clone())
}
