//! Small exact-arithmetic helpers shared by the linear algebra modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |acc, &x| acc.gcd(&x))
}

pub fn big_to_i64(x: &BigInt, what: &'static str) -> Result<i64> {
    x.to_i64().ok_or(Error::Overflow(what))
}

pub fn i128_to_i64(x: i128, what: &'static str) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow(what))
}

/// Largest integer `s` with `s*s <= x`, for `x >= 0`.
pub fn isqrt_floor(x: &BigInt) -> BigInt {
    if x.is_negative() || x.is_zero() {
        return BigInt::zero();
    }
    x.sqrt()
}

pub fn floor_rat(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil_rat(x: &Rat) -> BigInt {
    x.ceil().to_integer()
}

/// Least common multiple of the denominators of `xs`.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn gcd_big<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// Rank of a rational matrix given by rows.
pub fn rank_rat(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for i in (rank + 1)..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &pivot;
            for j in c..ncols {
                let t = &f * &m[rank][j];
                m[i][j] -= t;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Fraction-free rank of an integer matrix given by rows.
pub fn rank_int(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for i in (rank + 1)..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let a = m[rank][c].clone();
            let b = m[i][c].clone();
            for j in c..ncols {
                let v = &m[i][j] * &a - &m[rank][j] * &b;
                m[i][j] = v;
            }
            let g = gcd_big(m[i].iter());
            if !g.is_zero() && !g.is_one() {
                for x in m[i].iter_mut() {
                    *x /= &g;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Solve `A x = b` for a square nonsingular rational `A`. Returns `None` if singular.
pub fn solve_rat(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for j in c..=n {
            m[c][j] = &m[c][j] * &inv;
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in c..=n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Indices of a maximal linearly independent subset of `rows`, chosen greedily in order.
pub fn independent_rows(rows: &[Vec<Rat>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    // reduced basis rows with their pivot columns
    let mut basis: Vec<(usize, Vec<Rat>)> = Vec::new();
    let mut picked = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut v = row.clone();
        for (pc, b) in &basis {
            if v[*pc].is_zero() {
                continue;
            }
            let f = &v[*pc] / &b[*pc];
            for j in 0..ncols {
                let t = &f * &b[j];
                v[j] -= t;
            }
        }
        if let Some(pc) = (0..ncols).find(|&j| !v[j].is_zero()) {
            basis.push((pc, v));
            picked.push(idx);
        }
    }
    picked
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isqrt_matches_definition() {
        for n in 0..200i64 {
            let s = isqrt_floor(&BigInt::from(n));
            let s = s.to_i64().unwrap();
            assert!(s * s <= n && (s + 1) * (s + 1) > n);
        }
    }

    #[test]
    fn ranks_agree() {
        let rows = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        let rr: Vec<Vec<Rat>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect();
        assert_eq!(rank_int(&rows), 2);
        assert_eq!(rank_rat(&rr), 2);
        assert_eq!(independent_rows(&rr), vec![0, 2]);
    }

    #[test]
    fn solve_small_system() {
        let a = vec![vec![rat(2), rat(1)], vec![rat(1), rat(3)]];
        let x = solve_rat(&a, &[rat(3), rat(5)]).unwrap();
        assert_eq!(x, vec![rat_frac(4, 5), rat_frac(7, 5)]);
        let s = vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)]];
        assert!(solve_rat(&s, &[rat(1), rat(1)]).is_none());
    }
}
