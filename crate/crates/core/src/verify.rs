//! Independent brute-force checks, used by the tests, the acceptance run and
//! the `check` mode of the command line tool. Everything here is slow and
//! meant for small inputs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_linalg::{hnf, z_snf, IntMatrix, RatMatrix};
use crate::ideal::FractionalIdeal;
use crate::number_field::{FieldElement, NumberField};
use crate::pseudo_hnf::{to_absolute, PseudoMatrix};
use crate::pseudo_snf::{BiPseudoMatrix, DivisorChain};

/// All increasing `s`-subsets of `0..n`.
pub fn subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < s - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if s <= n {
        go(0, n, s, &mut Vec::new(), &mut out);
    }
    out
}

/// Laplace expansion along the first row.
pub fn cofactor_det(a: &[Vec<FieldElement>], k: &NumberField) -> FieldElement {
    let n = a.len();
    match n {
        0 => k.one(),
        1 => a[0][0].clone(),
        _ => {
            let mut s = k.zero();
            for j in 0..n {
                if a[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<FieldElement>> = a[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let t = a[0][j].mul(&cofactor_det(&minor, k), k);
                s = if j % 2 == 0 { s.add(&t) } else { s.sub(&t) };
            }
            s
        }
    }
}

/// Sum over all maximal minors of `det(A_S) * prod_{i in S} a_i`: the exact
/// determinantal ideal of the module.
pub fn minors_ideal(p: &PseudoMatrix, k: &NumberField) -> FractionalIdeal {
    let m = p.m();
    let mut acc: Option<FractionalIdeal> = None;
    for rows in subsets(p.n(), m) {
        let sub: Vec<Vec<FieldElement>> = rows.iter().map(|&i| p.row(i).to_vec()).collect();
        let d = cofactor_det(&sub, k);
        if d.is_zero() {
            continue;
        }
        let mut t = FractionalIdeal::principal(&d, k).expect("nonzero minor");
        for &i in &rows {
            t = t.mul(p.ideal(i), k);
        }
        acc = Some(match acc {
            Some(a) => a.add(&t),
            None => t,
        });
    }
    acc.unwrap_or_else(|| FractionalIdeal::unit(k))
}

/// Hermite form of the absolute lattice of a module inside `O_K^m`.
pub fn absolute_hnf(p: &PseudoMatrix, k: &NumberField) -> Result<IntMatrix> {
    hnf(&to_absolute(p, k)?)
}

/// Whether two pseudo-matrices generate the same module.
pub fn same_module(a: &PseudoMatrix, b: &PseudoMatrix, k: &NumberField) -> Result<bool> {
    Ok(absolute_hnf(a, k)? == absolute_hnf(b, k)?)
}

/// Index `[O_K^m : M]` of a full rank module, the absolute value of the
/// determinant of its absolute Hermite form.
pub fn absolute_index(p: &PseudoMatrix, k: &NumberField) -> Result<BigInt> {
    let h = absolute_hnf(p, k)?;
    Ok((0..h.rows()).fold(BigInt::from(1), |a, i| a * h.get(i, i)).abs())
}

/// Structural and module checks on a claimed pseudo-HNF of `p`.
pub fn check_hnf(p: &PseudoMatrix, h: &PseudoMatrix, k: &NumberField) -> std::result::Result<(), String> {
    if h.n() != p.m() || h.m() != p.m() {
        return Err(format!("expected {} rows, got {}", p.m(), h.n()));
    }
    if !h.is_unit_triangular() {
        return Err("not lower triangular with unit diagonal".into());
    }
    if h.ideals().iter().any(|a| a.numerator().rows() != k.degree() || a.den().is_zero()) {
        return Err("malformed coefficient ideal".into());
    }
    match same_module(p, h, k) {
        Ok(true) => Ok(()),
        Ok(false) => Err("modules differ".into()),
        Err(e) => Err(format!("absolute lattice: {e}")),
    }
}

fn block_rows(blocks: &[Vec<FieldElement>], n: usize, d: usize) -> Vec<Vec<BigRational>> {
    blocks
        .iter()
        .map(|v| {
            let mut r = Vec::with_capacity(n * d);
            for x in v {
                r.extend(x.to_rationals());
            }
            r
        })
        .collect()
}

/// Integer matrix of the rows of `sub` in terms of a basis of `sup`, where
/// both are given by generating rational rows of full rank.
fn relative_matrix(sub: &[Vec<BigRational>], sup: &[Vec<BigRational>]) -> Result<IntMatrix> {
    let mut all = sub.to_vec();
    all.extend_from_slice(sup);
    let l = RatMatrix::from_rational_rows(&all).denominator().clone();
    let scale = |rows: &[Vec<BigRational>]| -> Result<IntMatrix> {
        let ints: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|q| (q * BigRational::from_integer(l.clone())).to_integer()).collect())
            .collect();
        hnf(&IntMatrix::from_rows(ints))
    };
    let (hs, hm) = (scale(sub)?, scale(sup)?);
    let inv = RatMatrix::new(hm, BigInt::one()).inverse()?;
    let prod = hs.mul(inv.numerator());
    let den = inv.denominator();
    let rows = prod
        .to_rows()
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| {
                    if !(&x % den).is_zero() {
                        return Err(Error::NotIntegralModule("submodule not contained".into()));
                    }
                    Ok(x / den)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntMatrix::from_rows(rows))
}

fn invariant_factors(x: &IntMatrix) -> Vec<BigInt> {
    let s = z_snf(x);
    let mut v: Vec<BigInt> = (0..s.rows().min(s.cols()))
        .map(|i| s.get(i, i).abs())
        .filter(|x| !x.is_one())
        .collect();
    v.sort();
    v
}

/// Invariant factors (those above 1) of the abelian group `M / (N + dd M)`
/// for the modules of a bi-pseudo matrix; `N` alone when `dd` is absent.
pub fn quotient_invariants(b: &BiPseudoMatrix, dd: Option<&FractionalIdeal>, k: &NumberField) -> Result<Vec<BigInt>> {
    let (n, d) = (b.n(), k.degree());
    let zero_row = || vec![k.zero(); n];
    let mut sup = Vec::new();
    let mut sub = Vec::new();
    for (i, bi) in b.row_ideals().iter().enumerate() {
        for g in bi.basis_elements() {
            let mut v = zero_row();
            v[i] = g;
            sup.push(v);
        }
        if let Some(dd) = dd {
            for g in dd.mul(bi, k).basis_elements() {
                let mut v = zero_row();
                v[i] = g;
                sub.push(v);
            }
        }
    }
    for (j, aj) in b.col_ideals().iter().enumerate() {
        for g in aj.basis_elements() {
            sub.push(b.matrix().iter().map(|r| r[j].mul(&g, k)).collect());
        }
    }
    let x = relative_matrix(&block_rows(&sub, n, d), &block_rows(&sup, n, d))?;
    Ok(invariant_factors(&x))
}

/// Invariant factors (those above 1) of `sum O_K / d_i`.
pub fn chain_invariants(c: &DivisorChain) -> Vec<BigInt> {
    let hs: Vec<&IntMatrix> = c.divisors().iter().map(|x| x.numerator()).collect();
    let size: usize = hs.iter().map(|h| h.rows()).sum();
    let mut m = IntMatrix::zeros(size, size);
    let mut off = 0;
    for h in hs {
        for i in 0..h.rows() {
            for j in 0..h.cols() {
                m.set(off + i, off + j, h.get(i, j).clone());
            }
        }
        off += h.rows();
    }
    invariant_factors(&m)
}

/// Order `[M : N]` of the quotient of a bi-pseudo matrix.
pub fn quotient_order(b: &BiPseudoMatrix, k: &NumberField) -> Result<BigInt> {
    Ok(quotient_invariants(b, None, k)?.iter().fold(BigInt::one(), |a, x| a * x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::tests::gens;
    use crate::number_field::tests::{gaussian, rationals};

    #[test]
    fn subsets_and_cofactors() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(2, 3).is_empty());
        let k = gaussian();
        let a = vec![vec![k.element(&[1, 1]), k.integer(2)], vec![k.zero(), k.integer(3)]];
        assert_eq!(cofactor_det(&a, k), k.element(&[3, 3]));
    }

    #[test]
    fn minors_and_index() {
        let q = rationals();
        let o = FractionalIdeal::unit(q);
        let rows = vec![vec![q.integer(2), q.zero()], vec![q.zero(), q.integer(2)], vec![q.integer(1), q.integer(1)]];
        let p = PseudoMatrix::new(rows, vec![o.clone(), o.clone(), o]).unwrap();
        assert_eq!(minors_ideal(&p, q), gens(q, &[&[2]]));
        assert_eq!(absolute_index(&p, q).unwrap(), BigInt::from(2));
        assert!(check_hnf(&p, &p, q).is_err());
    }
}
