//! Acceptance run: one PASS/FAIL line per criterion, with timings against the
//! budget of each criterion. Instances are seeded; the seed is printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use okmod_core::determinant::{det, determinantal_ideal, ideal_product, OkMatrix};
use okmod_core::exact_linalg::{hnf, hnf_with_modulus, z_snf, IntMatrix};
use okmod_core::par;
use okmod_core::pseudo_hnf::{canonicalize, normalized_norm_bound, pseudo_hnf_auto, pseudo_hnf_traced, to_absolute};
use okmod_core::pseudo_snf::{pseudo_snf, BiPseudoMatrix};
use okmod_core::redux::{normalization_bound_holds, normalize_row, reduce_mod_ideal, reduction_bound_holds, ReducedBasisCache};
use okmod_core::residue_crt::{crt_combine_factors, crt_combine_primes, lift_to_field, plan_primes, project_element, split_prime};
use okmod_core::verify::{chain_invariants, check_hnf, cofactor_det, minors_ideal, quotient_invariants, quotient_order, same_module};
use okmod_core::{FieldElement, FractionalIdeal, NumberField, PseudoMatrix};

const SEED: u64 = 0x5eed_2024;

type Check = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Field {
    name: &'static str,
    k: NumberField,
}

fn test_fields() -> Vec<Field> {
    let mk = |name, poly: &[i64]| Field {
        name,
        k: NumberField::with_power_basis(poly).expect("test field"),
    };
    vec![
        mk("Q", &[0, 1]),
        mk("Q(i)", &[1, 0, 1]),
        mk("Q(sqrt-5)", &[5, 0, 1]),
        mk("cubic x^3-x-1", &[-1, -1, 0, 1]),
    ]
}

fn rng_for(criterion: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ (criterion << 32) ^ i as u64)
}

fn rand_int(rng: &mut impl Rng, b: i64) -> BigInt {
    BigInt::from(rng.gen_range(-b..=b))
}

fn rand_element(k: &NumberField, rng: &mut impl Rng, b: i64, den: i64) -> FieldElement {
    let c: Vec<BigInt> = (0..k.degree()).map(|_| rand_int(rng, b)).collect();
    FieldElement::new(c, BigInt::from(den))
}

fn rand_nonzero(k: &NumberField, rng: &mut impl Rng, b: i64, den: i64) -> FieldElement {
    loop {
        let x = rand_element(k, rng, b, den);
        if !x.is_zero() {
            return x;
        }
    }
}

fn rand_ideal(k: &NumberField, rng: &mut impl Rng, frac: bool) -> FractionalIdeal {
    let n = rng.gen_range(1..=2);
    let g: Vec<FieldElement> = (0..n)
        .map(|_| {
            let den = if frac { rng.gen_range(1..6) } else { 1 };
            rand_nonzero(k, rng, 12, den)
        })
        .collect();
    FractionalIdeal::from_generators(&g, k).expect("nonzero generators")
}

/// Random element of the ideal: integer combination of its basis.
fn rand_in(a: &FractionalIdeal, rng: &mut impl Rng, b: i64) -> FieldElement {
    let d = a.degree();
    a.basis_elements()
        .iter()
        .fold(FieldElement::zero(d), |x, g| x.add(&g.scalar_mul(&rand_int(rng, b))))
}

/// Runs `f` on `count` seeded instances (in parallel where enabled) and
/// returns the first failure.
fn sweep(criterion: u64, count: usize, f: impl Fn(&mut ChaCha8Rng) -> Check + Sync + Send) -> Check {
    let idx: Vec<usize> = (0..count).collect();
    let results = par::map(&idx, |&i| f(&mut rng_for(criterion, i)).map_err(|e| format!("instance {i}: {e}")));
    results.into_iter().collect::<Result<Vec<_>, _>>().map(|_| ())
}

fn criterion_1() -> Check {
    sweep(1, 200, |rng| {
        let n = rng.gen_range(1..=12);
        let m = rng.gen_range(1..=12);
        let lambda = BigInt::from(rng.gen_range(1..=1_000_000i64));
        let rows: Vec<Vec<BigInt>> = (0..n).map(|_| (0..m).map(|_| rand_int(rng, 1_000_000)).collect()).collect();
        let a = IntMatrix::from_rows(rows).stack(&IntMatrix::scalar(m, &lambda));
        let fast = hnf_with_modulus(&a, &lambda).map_err(|e| e.to_string())?;
        let slow = hnf(&a.stack(&IntMatrix::scalar(m, &lambda))).map_err(|e| e.to_string())?;
        ensure(fast == slow, || format!("{n}x{m}, lambda {lambda}: results differ"))
    })
}

fn criterion_2(fields: &[Field]) -> Check {
    for f in fields {
        let k = &f.k;
        sweep(2, 500, |rng| {
            let den = rng.gen_range(1..20);
            let alpha = rand_nonzero(k, rng, 50, den);
            let inv = alpha.inv(k).map_err(|e| e.to_string())?;
            ensure(alpha.mul(&inv, k) == k.one(), || format!("{}: alpha * alpha^-1 != 1", f.name))?;
            let a = rand_ideal(k, rng, true);
            let b = rand_ideal(k, rng, true);
            ensure(a.mul(&a.inverse(k), k).is_unit(), || format!("{}: a * a^-1 != O", f.name))?;
            ensure(a.mul(&b, k).norm() == a.norm() * b.norm(), || format!("{}: norm not multiplicative", f.name))?;
            let (ai, bi) = (a.numerator_ideal(), b.numerator_ideal());
            let mn = |x: &FractionalIdeal| x.minimum().expect("integral");
            let (ma, mb) = (mn(&ai), mn(&bi));
            ensure(ma.gcd(&mb).is_multiple_of(&mn(&ai.add(&bi))), || "min of sum".into())?;
            ensure((&ma * &mb).is_multiple_of(&mn(&ai.mul(&bi, k))), || "min of product".into())?;
            ensure(ai.inverse(k).den() == &ma, || "denominator of the inverse".into())?;
            let s = rand_int(rng, 30);
            if !s.is_zero() {
                let scaled = ai.int_mul(&s).map_err(|e| e.to_string())?;
                ensure(mn(&scaled) == s.abs() * &ma, || "min of a scalar multiple".into())?;
            }
            ensure(ai.norm().to_integer().is_multiple_of(&ma), || "min divides the norm".into())
        })?;
    }
    Ok(())
}

fn criterion_3(fields: &[Field]) -> Check {
    for f in fields {
        let k = &f.k;
        let cache = ReducedBasisCache::new();
        sweep(3, 500, |rng| {
            let den = rng.gen_range(1..10);
            let alpha = rand_element(k, rng, 100_000, den);
            let frac = rng.gen_bool(0.3);
            let a = rand_ideal(k, rng, frac);
            let r = reduce_mod_ideal(&alpha, &a, k, &cache).map_err(|e| e.to_string())?;
            ensure(a.contains(&alpha.sub(&r)), || format!("{}: alpha - reduce(alpha) not in the ideal", f.name))?;
            ensure(reduction_bound_holds(&r, &a, k), || format!("{}: reduced element exceeds the bound", f.name))
        })?;
    }
    Ok(())
}

fn criterion_4(fields: &[Field]) -> Check {
    for f in fields {
        let k = &f.k;
        let cache = ReducedBasisCache::new();
        sweep(4, 500, |rng| {
            let a = rand_ideal(k, rng, true);
            let m = rng.gen_range(1..=3);
            let inv = a.inverse(k);
            let row: Vec<FieldElement> = (0..m).map(|_| rand_in(&inv, rng, 50)).collect();
            if row.iter().all(|x| x.is_zero()) {
                return Ok(());
            }
            let out = normalize_row(&row, &a, k, &cache).map_err(|e| e.to_string())?;
            ensure(out.ideal.is_integral(), || "normalized ideal not integral".into())?;
            ensure(normalization_bound_holds(&out.ideal, k), || "normalized ideal exceeds the norm bound".into())?;
            let before = PseudoMatrix::new(vec![row], vec![a]).map_err(|e| e.to_string())?;
            let after = PseudoMatrix::new(vec![out.row], vec![out.ideal]).map_err(|e| e.to_string())?;
            let abs = |p: &PseudoMatrix| to_absolute(p, k).map(|x| echelon(&x)).map_err(|e| e.to_string());
            ensure(abs(&before)? == abs(&after)?, || format!("{}: lattices differ", f.name))
        })?;
    }
    Ok(())
}

/// Hermite row echelon form for matrices of any rank (the library `hnf`
/// insists on full column rank).
fn echelon(a: &IntMatrix) -> IntMatrix {
    let mut rows = a.to_rows();
    let cols = a.cols();
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    for c in 0..cols {
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][c].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| rows[i][c].abs()).unwrap();
            for &i in &nz {
                if i != p {
                    let q = rows[i][c].div_floor(&rows[p][c]);
                    let pr = rows[p].clone();
                    for (x, y) in rows[i].iter_mut().zip(&pr) {
                        *x -= &q * y;
                    }
                }
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| !rows[i][c].is_zero()) {
            let mut r = rows.remove(i);
            if r[c].is_negative() {
                r.iter_mut().for_each(|x| *x = -&*x);
            }
            out.push(r);
        }
    }
    // reduce entries above each pivot into [0, pivot)
    for i in 0..out.len() {
        let c = (0..cols).find(|&c| !out[i][c].is_zero()).unwrap();
        for j in 0..i {
            let q = out[j][c].div_floor(&out[i][c]);
            let pr = out[i].clone();
            for (x, y) in out[j].iter_mut().zip(&pr) {
                *x -= &q * y;
            }
        }
    }
    IntMatrix::from_rows(out)
}

fn round_trip(k: &NumberField, beta: &FieldElement, plan: &okmod_core::residue_crt::PrimePlan) -> okmod_core::Result<FieldElement> {
    let mut per_prime = Vec::with_capacity(plan.primes.len());
    for &p in &plan.primes {
        let s = split_prime(k, p)?;
        per_prime.push(crt_combine_factors(&project_element(beta, &s)?, &s));
    }
    Ok(lift_to_field(&crt_combine_primes(&per_prime, plan), &plan.product, k))
}

fn criterion_5(fields: &[Field]) -> Check {
    for f in fields {
        let k = &f.k;
        sweep(5, 100, |rng| {
            let n = rng.gen_range(1..=5);
            let rows: Vec<Vec<FieldElement>> = (0..n).map(|_| (0..n).map(|_| rand_element(k, rng, 1000, 1)).collect()).collect();
            let fast = det(&OkMatrix::new(rows.clone()).map_err(|e| e.to_string())?, k).map_err(|e| e.to_string())?;
            let slow = cofactor_det(&rows, k);
            ensure(fast == slow, || format!("{}: {n}x{n} determinant {fast} vs {slow}", f.name))
        })?;
        for log_b in [16, 64, 256] {
            let plan = plan_primes(k, &BigRational::from_integer(BigInt::from(log_b)));
            let half: BigInt = &plan.product / 2;
            let bits = half.bits();
            sweep(5, 200, |rng| {
                let c: Vec<BigInt> = (0..k.degree())
                    .map(|_| {
                        let words: Vec<u32> = (0..bits.div_ceil(32)).map(|_| rng.gen()).collect();
                        let x = BigInt::from_slice(num_bigint::Sign::Plus, &words) % &half;
                        if rng.gen() {
                            x
                        } else {
                            -x
                        }
                    })
                    .collect();
                let beta = FieldElement::new(c, BigInt::one());
                let back = round_trip(k, &beta, &plan).map_err(|e| e.to_string())?;
                ensure(back == beta, || format!("{}: CRT round trip failed for {beta}", f.name))
            })?;
        }
    }
    Ok(())
}

/// Full-rank pseudo-matrix with entries whose numerators stay below `bound`.
fn rand_pseudo(k: &NumberField, rng: &mut impl Rng, n: usize, m: usize, bound: i64) -> PseudoMatrix {
    loop {
        let ideals: Vec<FractionalIdeal> = (0..n).map(|_| rand_ideal(k, rng, true)).collect();
        // s * a is integral for s = den(a), so entries in s O_K keep a * row integral
        let rows: Vec<Vec<FieldElement>> = ideals
            .iter()
            .map(|a| {
                let s = a.den().clone();
                let b = (BigInt::from(bound) / &s).max(BigInt::one());
                let b = i64::try_from(b).unwrap();
                (0..m).map(|_| rand_element(k, rng, b, 1).scalar_mul(&s)).collect()
            })
            .collect();
        let p = PseudoMatrix::new(rows, ideals).unwrap();
        if hnf(&to_absolute(&p, k).unwrap()).is_ok() {
            return p;
        }
    }
}

fn criterion_6(fields: &[Field]) -> Check {
    for f in fields {
        let k = &f.k;
        let bound = normalized_norm_bound(k);
        sweep(6, 100, |rng| {
            let m = rng.gen_range(1..=6);
            let n = rng.gen_range(m..=10);
            let p = rand_pseudo(k, rng, n, m, 10_000);
            let dd = okmod_core::determinant::determinantal_ideal_multiple(&p, k).map_err(|e| e.to_string())?;
            let (h, trace) = pseudo_hnf_traced(&p, &dd, k).map_err(|e| format!("{}: {e}", f.name))?;
            check_hnf(&p, &h, k).map_err(|e| format!("{}: {e}", f.name))?;
            let want = minors_ideal(&p, k);
            let got = determinantal_ideal(&h, k).map_err(|e| e.to_string())?;
            ensure(want == got, || format!("{}: determinantal ideal changed", f.name))?;
            ensure(trace.max_min() <= bound, || format!("{}: min {} above bound {bound}", f.name, trace.max_min()))
        })?;
    }
    Ok(())
}

fn criterion_7() -> Check {
    let q = NumberField::with_power_basis(&[0, 1]).unwrap();
    sweep(7, 100, |rng| loop {
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(m..=8);
        let a = IntMatrix::from_rows((0..n).map(|_| (0..m).map(|_| rand_int(rng, 1000)).collect()).collect());
        let Ok(expect) = hnf(&a) else { continue };
        let p = PseudoMatrix::new(
            a.to_rows().into_iter().map(|r| r.into_iter().map(|x| FieldElement::from_integer(1, x)).collect()).collect(),
            vec![FractionalIdeal::unit(&q); n],
        )
        .unwrap();
        let c = canonicalize(&pseudo_hnf_auto(&p, &q).map_err(|e| e.to_string())?, &q).map_err(|e| e.to_string())?;
        let got = encode_rational_hnf(&c)?;
        return ensure(format!("{got:?}") == format!("{expect:?}"), || format!("{got:?} vs {expect:?}"));
    })
}

/// `h_i * row_i` for a pseudo-HNF over Q with coefficient ideals `(h_i)`.
fn encode_rational_hnf(c: &PseudoMatrix) -> Result<IntMatrix, String> {
    let mut out = Vec::new();
    for (r, a) in c.rows().iter().zip(c.ideals()) {
        let h = BigRational::new(a.numerator().get(0, 0).clone(), a.den().clone());
        let mut row = Vec::new();
        for x in r {
            let y = x.scale_rat(&h);
            if !y.is_integral() {
                return Err(format!("entry {x} not integral after scaling by {h}"));
            }
            row.push(y.coeffs()[0].clone());
        }
        out.push(row);
    }
    Ok(IntMatrix::from_rows(out))
}

fn rand_bipseudo(k: &NumberField, rng: &mut impl Rng, n: usize, bound: i64) -> BiPseudoMatrix {
    loop {
        let rows: Vec<FractionalIdeal> = (0..n).map(|_| rand_ideal(k, rng, true)).collect();
        let cols: Vec<FractionalIdeal> = (0..n).map(|_| rand_ideal(k, rng, true)).collect();
        let a: Vec<Vec<FieldElement>> = (0..n)
            .map(|i| (0..n).map(|j| rand_in(&rows[i].div(&cols[j], k), rng, bound)).collect())
            .collect();
        let b = BiPseudoMatrix::new(a, rows, cols, k).unwrap();
        if b.determinantal_ideal(k).is_ok() {
            return b;
        }
    }
}

fn criterion_8(fields: &[Field]) -> Check {
    let q = &fields[0].k;
    sweep(8, 100, |rng| loop {
        let n = rng.gen_range(1..=6);
        let a = IntMatrix::from_rows((0..n).map(|_| (0..n).map(|_| rand_int(rng, 50)).collect()).collect());
        let s = z_snf(&a);
        if (0..n).any(|i| s.get(i, i).is_zero()) {
            continue;
        }
        let rows = a.to_rows().into_iter().map(|r| r.into_iter().map(|x| FieldElement::from_integer(1, x)).collect()).collect();
        let o = FractionalIdeal::unit(q);
        let b = BiPseudoMatrix::new(rows, vec![o.clone(); n], vec![o; n], q).map_err(|e| e.to_string())?;
        let chain = pseudo_snf(&b, None, q).map_err(|e| e.to_string())?;
        // largest divisor first, matching the containment order
        let mut diag: Vec<BigInt> = (0..n).map(|i| s.get(i, i).abs()).collect();
        diag.sort_by(|x, y| y.cmp(x));
        let expect: Vec<FractionalIdeal> = diag.iter().map(|x| FractionalIdeal::from_integer(x, q).unwrap()).collect();
        return ensure(chain.divisors() == &expect[..], || format!("chain {:?} vs {diag:?}", chain.divisors()));
    })?;
    for f in fields {
        let k = &f.k;
        sweep(8, 25, |rng| {
            let n = rng.gen_range(1..=4);
            let b = rand_bipseudo(k, rng, n, 6);
            let chain = pseudo_snf(&b, None, k).map_err(|e| format!("{}: {e}", f.name))?;
            ensure(chain.is_valid(), || format!("{}: chain not integral or not ordered", f.name))?;
            let order = b.determinantal_ideal(k).map_err(|e| e.to_string())?;
            ensure(ideal_product(chain.divisors(), k) == order, || format!("{}: product differs", f.name))?;
            if k.degree() <= 2 {
                let idx = quotient_order(&b, k).map_err(|e| e.to_string())?;
                ensure(chain.product(k).norm() == BigRational::from_integer(idx.clone()), || {
                    format!("{}: norm of the product vs index {idx}", f.name)
                })?;
                let inv = quotient_invariants(&b, None, k).map_err(|e| e.to_string())?;
                ensure(chain_invariants(&chain) == inv, || format!("{}: quotient structure differs", f.name))?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn criterion_9(fields: &[Field], table: &mut String) -> Check {
    use std::fmt::Write;
    let k = &fields[3].k;
    let bound = normalized_norm_bound(k);
    let idx: Vec<usize> = (0..5).collect();
    let runs = par::map(&idx, |&i| {
        let mut rng = rng_for(9, i);
        let p = rand_pseudo(k, &mut rng, 20, 10, 100);
        let dd = okmod_core::determinant::determinantal_ideal_multiple(&p, k)?;
        let (h, trace) = pseudo_hnf_traced(&p, &dd, k)?;
        let same = same_module(&p, &h, k)?;
        Ok::<_, okmod_core::Error>((trace, same))
    });
    writeln!(table, "  size growth, 20x10 over the cubic field, bound {bound}").unwrap();
    writeln!(table, "  {:>8} {:>14} {:>10} {:>14} {:>8}", "instance", "max min(b_j)", "columns", "normalizations", "module").unwrap();
    let mut result = Ok(());
    for (i, r) in runs.into_iter().enumerate() {
        match r {
            Ok((trace, same)) => {
                let over = trace.columns.iter().filter(|c| c.max_min > bound).count();
                writeln!(
                    table,
                    "  {:>8} {:>14} {:>10} {:>14} {:>8}",
                    i,
                    trace.max_min(),
                    trace.columns.len(),
                    trace.normalizations,
                    if same { "equal" } else { "DIFFERS" }
                )
                .unwrap();
                if over > 0 || !same {
                    result = result.and(Err(format!("instance {i}: {over} columns over the bound, module equal: {same}")));
                }
            }
            Err(e) => result = result.and(Err(format!("instance {i}: {e}"))),
        }
    }
    result
}

fn main() -> ExitCode {
    println!("acceptance run, seed {SEED:#x}, parallel: {}", par::parallel_enabled());
    let fields = test_fields();
    let mut table = String::new();
    let criteria: Vec<(&str, u64, Box<dyn FnOnce() -> Check + '_>)> = vec![
        ("integer HNF and Howell consistency", 10, Box::new(criterion_1)),
        ("field and ideal algebra", 60, Box::new(|| criterion_2(&fields))),
        ("reduction contract", 60, Box::new(|| criterion_3(&fields))),
        ("normalization contract", 120, Box::new(|| criterion_4(&fields))),
        ("determinant and CRT oracles", 120, Box::new(|| criterion_5(&fields))),
        ("pseudo-HNF module oracle", 600, Box::new(|| criterion_6(&fields))),
        ("degeneration to the integer HNF", 30, Box::new(criterion_7)),
        ("pseudo-SNF chain oracles", 600, Box::new(|| criterion_8(&fields))),
        ("size growth below the static bound", 300, Box::new(|| criterion_9(&fields, &mut table))),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let el = t.elapsed();
        let r = r.and_then(|_| ensure(el <= Duration::from_secs(limit), || format!("took {:.1}s", el.as_secs_f64())));
        match r {
            Ok(()) => println!("criterion {}: PASS  {name} ({:.1}s, limit {limit}s)", i + 1, el.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({:.1}s, limit {limit}s): {e}", i + 1, el.as_secs_f64());
            }
        }
    }
    print!("{table}");
    if failed == 0 {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
