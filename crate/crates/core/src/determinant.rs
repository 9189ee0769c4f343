//! Determinants over O_K by reduction modulo many unramified primes, rank
//! detection for rectangular matrices and determinantal ideals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::log2_upper_rat;
use crate::error::{Error, Result};
use crate::ideal::FractionalIdeal;
use crate::number_field::{FieldElement, NumberField};
use crate::par::{self, Exec};
use crate::pseudo_hnf::PseudoMatrix;
use crate::residue_crt::{
    crt_combine_factors, crt_combine_primes, lift_to_field, plan_primes, project_coeffs, split_prime,
};

/// Matrix with integral entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OkMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl OkMatrix {
    pub fn new(rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("rows of unequal length".into()));
        }
        let entries: Vec<FieldElement> = rows.into_iter().flatten().collect();
        if entries.iter().any(|e| !e.is_integral()) {
            return Err(Error::NotIntegral);
        }
        Ok(OkMatrix { rows: n, cols: m, entries })
    }

    pub fn from_i64(k: &NumberField, rows: &[&[&[i64]]]) -> Result<Self> {
        OkMatrix::new(rows.iter().map(|r| r.iter().map(|e| k.element(e)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.entries[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        self.entries.chunks(self.cols.max(1)).take(self.rows).map(|r| r.to_vec()).collect()
    }

    /// Largest absolute coefficient of any entry.
    pub fn max_coeff(&self) -> BigInt {
        self.entries.iter().map(|e| e.max_abs()).max().unwrap_or_else(BigInt::zero)
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> OkMatrix {
        OkMatrix {
            rows: rows.len(),
            cols: cols.len(),
            entries: rows
                .iter()
                .flat_map(|&i| cols.iter().map(move |&j| self.get(i, j).clone()))
                .collect(),
        }
    }

    pub fn mul(&self, o: &OkMatrix, k: &NumberField) -> Result<OkMatrix> {
        if self.cols != o.rows {
            return Err(Error::Dimension("product shapes".into()));
        }
        let mut entries = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut s = k.zero();
                for t in 0..self.cols {
                    s = s.add(&self.get(i, t).mul(o.get(t, j), k));
                }
                entries.push(s);
            }
        }
        Ok(OkMatrix {
            rows: self.rows,
            cols: o.cols,
            entries,
        })
    }
}

/// Upper bound on `log2` of twice the largest coefficient of `det(a)`:
/// `2 C2 (n d C1 |A|)^n`, rounded up to an integer.
pub fn det_bound(a: &OkMatrix, k: &NumberField) -> BigRational {
    bound_for(a.rows.max(a.cols), &a.max_coeff(), k)
}

fn bound_for(n: usize, max_coeff: &BigInt, k: &NumberField) -> BigRational {
    let one = BigRational::one();
    let c1 = k.c1().clone().max(one.clone());
    let c2 = k.c2().clone().max(one.clone());
    let a = BigRational::from_integer(max_coeff.clone()).max(one);
    let nd = BigRational::from_integer(BigInt::from(n.max(1) * k.degree()));
    let v = BigRational::from_integer(BigInt::from(2)) * c2 * num_traits::pow(nd * c1 * a, n);
    BigRational::from_integer(log2_upper_rat(&v).ceil().to_integer())
}

fn project_matrix(a: &OkMatrix, sys: &crate::residue_crt::ResidueSystem) -> Vec<Vec<Vec<Vec<u64>>>> {
    // [field][row][col] -> residue
    let g = sys.fields.len();
    let mut out = vec![vec![Vec::with_capacity(a.cols); a.rows]; g];
    for i in 0..a.rows {
        for j in 0..a.cols {
            let imgs = project_coeffs(a.get(i, j).coeffs(), sys);
            for (f, img) in imgs.into_iter().enumerate() {
                out[f][i].push(img);
            }
        }
    }
    out
}

/// Exact determinant of a square integral matrix.
pub fn det(a: &OkMatrix, k: &NumberField) -> Result<FieldElement> {
    det_with(Exec::Auto, a, k)
}

pub fn det_with(exec: Exec, a: &OkMatrix, k: &NumberField) -> Result<FieldElement> {
    if a.rows != a.cols {
        return Err(Error::Dimension("determinant of a non-square matrix".into()));
    }
    if a.rows == 0 {
        return Ok(k.one());
    }
    let plan = plan_primes(k, &det_bound(a, k));
    let per_prime: Vec<Result<Vec<u64>>> = par::map_with(exec, &plan.primes, |&p| {
        let sys = split_prime(k, p)?;
        let images = project_matrix(a, &sys);
        let dets: Vec<Vec<u64>> = sys
            .fields
            .iter()
            .zip(images)
            .map(|(fld, m)| fld.det(m))
            .collect();
        Ok(crt_combine_factors(&dets, &sys))
    });
    let per_prime: Vec<Vec<u64>> = per_prime.into_iter().collect::<Result<_>>()?;
    let poly = crt_combine_primes(&per_prime, &plan);
    Ok(lift_to_field(&poly, &plan.product, k))
}

/// Rank with a nonsingular witness submatrix and its determinant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankWitness {
    pub rank: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub det: FieldElement,
}

/// The rank of `a` is the largest rank over the residue fields of enough
/// primes; the witness comes from the first residue field attaining it.
/// A zero matrix has rank 0, an empty witness and determinant 1.
pub fn rank_and_submatrix(a: &OkMatrix, k: &NumberField) -> Result<RankWitness> {
    let full = a.rows.min(a.cols);
    let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
    if full > 0 && a.entries.iter().any(|e| !e.is_zero()) {
        let plan = plan_primes(k, &bound_for(full, &a.max_coeff(), k));
        'primes: for &p in &plan.primes {
            let sys = split_prime(k, p)?;
            for (fld, m) in sys.fields.iter().zip(project_matrix(a, &sys)) {
                let (r, c) = fld.rank_profile(&m);
                if best.as_ref().is_none_or(|(br, _)| r.len() > br.len()) {
                    best = Some((r, c));
                }
                if best.as_ref().unwrap().0.len() == full {
                    break 'primes;
                }
            }
        }
    }
    let (rows, cols) = best.unwrap_or_default();
    let det = det(&a.select(&rows, &cols), k)?;
    Ok(RankWitness {
        rank: rows.len(),
        rows,
        cols,
        det,
    })
}

/// Product of ideals by balanced splitting.
pub fn ideal_product(ideals: &[FractionalIdeal], k: &NumberField) -> FractionalIdeal {
    match ideals.len() {
        0 => FractionalIdeal::unit(k),
        1 => ideals[0].clone(),
        n => {
            let (l, r) = ideals.split_at(n / 2);
            ideal_product(l, k).mul(&ideal_product(r, k), k)
        }
    }
}

/// Rows scaled to integral entries, with the scale factors.
fn clear_denominators(p: &PseudoMatrix) -> (Vec<Vec<FieldElement>>, Vec<BigInt>) {
    let mut rows = Vec::with_capacity(p.n());
    let mut dens = Vec::with_capacity(p.n());
    for r in p.rows() {
        let den = r.iter().fold(BigInt::one(), |a, x| a.lcm(x.den()));
        rows.push(r.iter().map(|x| x.scalar_mul(&den)).collect());
        dens.push(den);
    }
    (rows, dens)
}

/// Determinant of a square matrix with entries in K, by clearing row
/// denominators first.
pub fn det_of_rows(rows: &[Vec<FieldElement>], k: &NumberField) -> Result<FieldElement> {
    let mut scaled = Vec::with_capacity(rows.len());
    let mut scale = BigInt::one();
    for r in rows {
        let den = r.iter().fold(BigInt::one(), |a, x| a.lcm(x.den()));
        scaled.push(r.iter().map(|x| x.scalar_mul(&den)).collect());
        scale *= den;
    }
    det(&OkMatrix::new(scaled)?, k)?.scalar_div(&scale)
}

/// `det(A) * prod a_i` for a square nonsingular pseudo-matrix.
pub fn determinantal_ideal(p: &PseudoMatrix, k: &NumberField) -> Result<FractionalIdeal> {
    if p.n() != p.m() {
        return Err(Error::Dimension("determinantal ideal of a non-square pseudo-matrix".into()));
    }
    let d = det_of_rows(p.rows(), k)?;
    if d.is_zero() {
        return Err(Error::Singular);
    }
    ideal_product(p.ideals(), k).elt_mul(&d, k)
}

/// The determinantal ideal of one nonsingular maximal sub-pseudo-matrix: a
/// multiple of the determinantal ideal of the module.
pub fn determinantal_ideal_multiple(p: &PseudoMatrix, k: &NumberField) -> Result<FractionalIdeal> {
    let (rows, dens) = clear_denominators(p);
    let w = rank_and_submatrix(&OkMatrix::new(rows)?, k)?;
    if w.rank < p.m() || p.m() == 0 {
        return Err(Error::RankDeficient);
    }
    let scale = w.rows.iter().fold(BigInt::one(), |a, &i| a * &dens[i]);
    let d = w.det.scalar_div(&scale)?;
    let sel: Vec<FractionalIdeal> = w.rows.iter().map(|&i| p.ideal(i).clone()).collect();
    ideal_product(&sel, k).elt_mul(&d, k)
}
