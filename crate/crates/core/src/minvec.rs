//! Exact bounded-norm vector enumeration (Fincke–Pohst) and minimal vectors.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{ceil_rat, floor_rat, isqrt_floor, Rat};
use crate::error::{Error, Result};
use crate::forms::{RationalSymForm, SymForm, VectorZ};
use crate::intmat::IntMatrix;

/// Hard cap on the number of vectors a single enumeration may produce.
pub const MAX_ENUMERATED: usize = 2_000_000;

/// Minimal norm and minimal vectors (one sign-canonical representative per ± pair,
/// sorted lexicographically).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinData {
    pub form: SymForm,
    pub min_norm: i64,
    pub vectors: Vec<VectorZ>,
}

impl MinData {
    pub fn pair_count(&self) -> usize {
        self.vectors.len()
    }
}

/// Pairwise size reduction: returns `(r, u)` with `r = uᵀ q u` and
/// `|r_ij| <= r_ii / 2` for all `i != j`, basis sorted by diagonal.
pub fn size_reduce(q: &SymForm) -> (SymForm, IntMatrix) {
    let g = q.dim();
    let mut a: Vec<Vec<i128>> = q
        .rows()
        .into_iter()
        .map(|r| r.into_iter().map(i128::from).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = (0..g)
        .map(|i| (0..g).map(|j| i128::from(i == j)).collect())
        .collect();
    loop {
        let mut changed = false;
        for i in 0..g {
            for j in 0..g {
                if i == j || a[i][i] <= 0 {
                    continue;
                }
                let (aii, aij) = (a[i][i], a[i][j]);
                if 2 * aij.abs() <= aii {
                    continue;
                }
                // nearest integer to aij / aii
                let k = (2 * aij + aii).div_euclid(2 * aii);
                if k == 0 {
                    continue;
                }
                // basis vector j -= k * basis vector i
                for row in u.iter_mut() {
                    row[j] -= k * row[i];
                }
                let ajj = a[j][j] - 2 * k * aij + k * k * aii;
                for l in 0..g {
                    if l != j {
                        a[l][j] -= k * a[l][i];
                        a[j][l] = a[l][j];
                    }
                }
                a[j][j] = ajj;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut order: Vec<usize> = (0..g).collect();
    order.sort_by_key(|&i| (a[i][i], i));
    let rows: Vec<Vec<i64>> = order
        .iter()
        .map(|&i| order.iter().map(|&j| a[i][j] as i64).collect())
        .collect();
    let umat: Vec<Vec<i64>> = (0..g)
        .map(|r| order.iter().map(|&j| u[r][j] as i64).collect())
        .collect();
    (
        SymForm::new(rows).expect("reduced form is symmetric"),
        IntMatrix::from_rows(&umat).expect("square transform"),
    )
}

/// `q(x) = Σ_i d_i (x_i + Σ_{j>i} m_ij x_j)²`.
struct SquareCompletion {
    d: Vec<Rat>,
    m: Vec<Vec<Rat>>,
}

fn complete_squares(q: &SymForm) -> Result<SquareCompletion> {
    let g = q.dim();
    let mut a: Vec<Vec<Rat>> = q.to_rational().rows();
    let mut d = Vec::with_capacity(g);
    let mut m = vec![vec![Rat::zero(); g]; g];
    for i in 0..g {
        let di = a[i][i].clone();
        if !di.is_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        for j in (i + 1)..g {
            m[i][j] = &a[i][j] / &di;
        }
        for j in (i + 1)..g {
            for k in (i + 1)..g {
                let t = &di * &m[i][j] * &m[i][k];
                a[j][k] -= t;
            }
        }
        d.push(di);
    }
    Ok(SquareCompletion { d, m })
}

/// All nonzero `x` (one per ± pair, last nonzero coordinate positive) with `q(x) <= bound`,
/// for a positive definite `q`.
fn fincke_pohst(q: &SymForm, bound: i64) -> Result<Vec<Vec<i64>>> {
    let g = q.dim();
    let sc = complete_squares(q)?;
    let mut out = Vec::new();
    let mut x = vec![0i64; g];
    let budget = Rat::from_integer(BigInt::from(bound));
    descend(&sc, g, g, &budget, true, &mut x, &mut out)?;
    Ok(out)
}

fn descend(
    sc: &SquareCompletion,
    g: usize,
    level: usize,
    budget: &Rat,
    zero_above: bool,
    x: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) -> Result<()> {
    if level == 0 {
        if !zero_above {
            if out.len() >= MAX_ENUMERATED {
                return Err(Error::SearchOverflow(format!(
                    "more than {MAX_ENUMERATED} vectors below the bound"
                )));
            }
            out.push(x.clone());
        }
        return Ok(());
    }
    let i = level - 1;
    let mut c = Rat::zero();
    for j in (i + 1)..g {
        if x[j] != 0 {
            c += &sc.m[i][j] * Rat::from_integer(BigInt::from(x[j]));
        }
    }
    let t = budget / &sc.d[i];
    let s = isqrt_floor(&floor_rat(&t));
    let lo: BigInt = floor_rat(&-&c) - &s - 1;
    let hi: BigInt = ceil_rat(&-&c) + &s + 1;
    let lo = lo.to_i64().ok_or(Error::Overflow("enumeration bounds"))?;
    let hi = hi.to_i64().ok_or(Error::Overflow("enumeration bounds"))?;
    let lo = if zero_above { lo.max(0) } else { lo };
    for xi in lo..=hi {
        let shifted = Rat::from_integer(BigInt::from(xi)) + &c;
        let used = &sc.d[i] * &shifted * &shifted;
        if &used > budget {
            continue;
        }
        x[i] = xi;
        let rest = budget - used;
        descend(sc, g, i, &rest, zero_above && xi == 0, x, out)?;
    }
    x[i] = 0;
    Ok(())
}

fn require_positive_definite(q: &SymForm) -> Result<()> {
    if q.is_positive_definite() {
        Ok(())
    } else {
        Err(Error::NotPositiveDefinite)
    }
}

/// Enumeration for an already-checked positive definite form.
pub(crate) fn short_vectors(q: &SymForm, bound: i64) -> Result<Vec<(VectorZ, i64)>> {
    if bound <= 0 {
        return Ok(Vec::new());
    }
    let (r, u) = size_reduce(q);
    let raw = fincke_pohst(&r, bound)?;
    let mut out: Vec<(VectorZ, i64)> = raw
        .into_iter()
        .map(|y| -> Result<(VectorZ, i64)> {
            let x = VectorZ(u.mul_vec(&y)?).sign_canonical();
            let v = q.eval(&x.0);
            Ok((x, i64::try_from(v).map_err(|_| Error::Overflow("vector norm"))?))
        })
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

/// All sign-canonical nonzero vectors with `q(x) <= bound`, sorted by (value, lex).
pub fn vectors_up_to(q: &SymForm, bound: &Rat) -> Result<Vec<(VectorZ, i64)>> {
    require_positive_definite(q)?;
    let b = floor_rat(bound)
        .to_i64()
        .ok_or(Error::Overflow("enumeration bound"))?;
    short_vectors(q, b)
}

/// Same as [`vectors_up_to`] for a rational form; values are returned exactly.
pub fn vectors_up_to_rational(f: &RationalSymForm, bound: &Rat) -> Result<Vec<(VectorZ, Rat)>> {
    let (q, c) = f.clear_denominators()?;
    require_positive_definite(&q)?;
    let scaled = floor_rat(&(bound * &c))
        .to_i64()
        .ok_or(Error::Overflow("enumeration bound"))?;
    Ok(short_vectors(&q, scaled)?
        .into_iter()
        .map(|(x, v)| (x, Rat::from_integer(BigInt::from(v)) / &c))
        .collect())
}

pub(crate) fn min_data_unchecked(q: &SymForm) -> Result<MinData> {
    let (r, _) = size_reduce(q);
    let bound = (0..r.dim()).map(|i| r.get(i, i)).min().unwrap_or(1);
    let all = short_vectors(q, bound)?;
    let min_norm = all.first().map(|p| p.1).ok_or(Error::NotPositiveDefinite)?;
    let mut vectors: Vec<VectorZ> = all
        .into_iter()
        .take_while(|p| p.1 == min_norm)
        .map(|p| p.0)
        .collect();
    vectors.sort();
    Ok(MinData {
        form: q.clone(),
        min_norm,
        vectors,
    })
}

/// Exact minimal norm and the complete set of minimal-vector pairs.
pub fn min_data(q: &SymForm) -> Result<MinData> {
    require_positive_definite(q)?;
    min_data_unchecked(q)
}

/// Minimal data of a positive definite rational form: `(min, vectors)`.
pub fn min_data_rational(f: &RationalSymForm) -> Result<(Rat, Vec<VectorZ>)> {
    let (q, c) = f.clear_denominators()?;
    let md = min_data(&q)?;
    Ok((Rat::from_integer(BigInt::from(md.min_norm)) / c, md.vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn v(x: &[i64]) -> VectorZ {
        VectorZ(x.to_vec())
    }

    /// Exhaustive oracle over a coordinate box.
    fn brute_min(q: &SymForm, radius: i64) -> (i64, Vec<VectorZ>) {
        let g = q.dim();
        let mut best = i64::MAX;
        let mut vecs = Vec::new();
        let mut x = vec![-radius; g];
        loop {
            let xv = VectorZ(x.clone());
            if !xv.is_zero() && xv.is_sign_canonical() {
                let val = q.eval(&x) as i64;
                if val < best {
                    best = val;
                    vecs.clear();
                }
                if val == best {
                    vecs.push(xv);
                }
            }
            let mut k = 0;
            loop {
                if k == g {
                    vecs.sort();
                    return (best, vecs);
                }
                x[k] += 1;
                if x[k] > radius {
                    x[k] = -radius;
                    k += 1;
                } else {
                    break;
                }
            }
        }
    }

    #[test]
    fn min_data_examples() {
        let md = min_data(&SymForm::identity(2)).unwrap();
        assert_eq!(md.min_norm, 1);
        assert_eq!(md.vectors, vec![v(&[0, 1]), v(&[1, 0])]);

        let a2 = SymForm::root_a(2);
        let md = min_data(&a2).unwrap();
        let (bm, bv) = brute_min(&a2, 2);
        assert_eq!((md.min_norm, md.vectors.clone()), (bm, bv));
        assert_eq!(md.min_norm, 2);
        assert_eq!(md.vectors, vec![v(&[0, 1]), v(&[1, 0]), v(&[1, 1])]);

        let a3 = SymForm::root_a(3);
        let md = min_data(&a3).unwrap();
        let (bm, bv) = brute_min(&a3, 2);
        assert_eq!((md.min_norm, md.vectors.len()), (2, 6));
        assert_eq!(md.vectors, bv);
        assert_eq!(bm, 2);
    }

    #[test]
    fn root_form_pair_counts() {
        for g in 1..=6 {
            let md = min_data(&SymForm::root_a(g)).unwrap();
            assert_eq!(md.vectors.len(), g * (g + 1) / 2, "A_{g}");
            assert_eq!(md.min_norm, 2);
        }
        assert_eq!(min_data(&SymForm::root_d(4)).unwrap().vectors.len(), 12);
        assert_eq!(min_data(&SymForm::root_d(5)).unwrap().vectors.len(), 20);
    }

    #[test]
    fn vectors_up_to_examples() {
        let id = SymForm::identity(2);
        let r = vectors_up_to(&id, &rat(1)).unwrap();
        assert_eq!(r, vec![(v(&[0, 1]), 1), (v(&[1, 0]), 1)]);
        let r = vectors_up_to(&id, &rat(2)).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.contains(&(v(&[1, 1]), 2)));
        assert!(r.contains(&(v(&[1, -1]), 2)));
        let r = vectors_up_to(&SymForm::root_a(2), &rat(2)).unwrap();
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn rejects_indefinite() {
        let q = SymForm::new(vec![vec![1, 2], vec![2, 1]]).unwrap();
        assert_eq!(min_data(&q), Err(Error::NotPositiveDefinite));
        assert_eq!(
            vectors_up_to(&SymForm::zero(2), &rat(1)),
            Err(Error::NotPositiveDefinite)
        );
    }

    #[test]
    fn size_reduction_preserves_form() {
        let q = SymForm::new(vec![vec![5, 7], vec![7, 10]]).unwrap();
        let (r, u) = size_reduce(&q);
        assert!(u.is_unimodular());
        assert_eq!(q.transform(&u).unwrap(), r);
        assert!(2 * r.get(0, 1).abs() <= r.get(0, 0));
    }

    #[test]
    fn scaling_keeps_vectors() {
        let q = SymForm::root_d(4);
        let a = min_data(&q).unwrap();
        let b = min_data(&q.scale(3).unwrap()).unwrap();
        assert_eq!(b.min_norm, 3 * a.min_norm);
        assert_eq!(a.vectors, b.vectors);
    }
}
