//! Integer matrices: unimodular bookkeeping, Hermite normal form, integral kernels.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{big_to_i64, i128_to_i64, Rat};
use crate::error::{Error, Result};

/// Dense row-major integer matrix. Serialised as a list of rows.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<i64>,
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::jsonfmt::int_rows(&self.to_rows()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = Vec::<Vec<crate::jsonfmt::JsonInt>>::deserialize(d)?;
        let rows = crate::jsonfmt::rows_from_json(&raw)?;
        IntMatrix::from_rows(&rows).map_err(D::Error::custom)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidInput("ragged matrix".into()));
        }
        Ok(Self {
            nrows,
            ncols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_flat(nrows: usize, ncols: usize, data: Vec<i64>) -> Self {
        assert_eq!(data.len(), nrows * ncols);
        Self { nrows, ncols, data }
    }

    pub fn from_columns(cols: &[Vec<i64>]) -> Result<Self> {
        let ncols = cols.len();
        let nrows = cols.first().map_or(0, |c| c.len());
        if cols.iter().any(|c| c.len() != nrows) {
            return Err(Error::InvalidInput("ragged columns".into()));
        }
        let mut data = vec![0; nrows * ncols];
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                data[i * ncols + j] = x;
            }
        }
        Ok(Self { nrows, ncols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Self { nrows: n, ncols: n, data }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.ncols.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.nrows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0; self.data.len()];
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                data[j * self.nrows + i] = self.get(i, j);
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            data,
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: other.nrows,
            });
        }
        let mut data = Vec::with_capacity(self.nrows * other.ncols);
        for i in 0..self.nrows {
            for j in 0..other.ncols {
                let mut s: i128 = 0;
                for k in 0..self.ncols {
                    s += self.get(i, k) as i128 * other.get(k, j) as i128;
                }
                data.push(i128_to_i64(s, "matrix product")?);
            }
        }
        Ok(IntMatrix {
            nrows: self.nrows,
            ncols: other.ncols,
            data,
        })
    }

    pub fn mul_vec(&self, x: &[i64]) -> Result<Vec<i64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: x.len(),
            });
        }
        (0..self.nrows)
            .map(|i| {
                let s: i128 = (0..self.ncols)
                    .map(|k| self.get(i, k) as i128 * x[k] as i128)
                    .sum();
                i128_to_i64(s, "matrix-vector product")
            })
            .collect()
    }

    /// Exact determinant (Bareiss).
    pub fn det(&self) -> BigInt {
        assert_eq!(self.nrows, self.ncols, "determinant of non-square matrix");
        det_big(&self.to_big_rows())
    }

    pub fn is_unimodular(&self) -> bool {
        self.nrows == self.ncols && self.det().abs().is_one()
    }

    pub fn to_big_rows(&self) -> Vec<Vec<BigInt>> {
        self.to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect()
    }

    /// Inverse of a unimodular matrix; errors if not invertible over Z.
    pub fn inverse(&self) -> Result<IntMatrix> {
        let n = self.nrows;
        if n != self.ncols {
            return Err(Error::InvalidInput("inverse of non-square matrix".into()));
        }
        let mut m: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut row: Vec<Rat> = (0..n)
                    .map(|j| Rat::from_integer(BigInt::from(self.get(i, j))))
                    .collect();
                row.extend((0..n).map(|j| {
                    if i == j {
                        Rat::one()
                    } else {
                        Rat::zero()
                    }
                }));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n)
                .find(|&i| !m[i][c].is_zero())
                .ok_or_else(|| Error::InvalidInput("singular matrix".into()))?;
            m.swap(c, p);
            let inv = m[c][c].recip();
            for j in 0..2 * n {
                m[c][j] = &m[c][j] * &inv;
            }
            for i in 0..n {
                if i != c && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    for j in 0..2 * n {
                        let t = &f * &m[c][j];
                        m[i][j] -= t;
                    }
                }
            }
        }
        let mut data = Vec::with_capacity(n * n);
        for row in &m {
            for x in &row[n..] {
                if !x.is_integer() {
                    return Err(Error::InvalidInput("matrix is not unimodular".into()));
                }
                data.push(big_to_i64(&x.to_integer(), "matrix inverse")?);
            }
        }
        Ok(IntMatrix {
            nrows: n,
            ncols: n,
            data,
        })
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }
}

pub fn det_big(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = rows.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = ((k + 1)..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Row-style Hermite normal form with transform: returns `(w, e)` with `w` unimodular
/// and `w * m == e`, where `e` is in reduced row echelon form over Z (positive pivots,
/// entries above each pivot reduced into `[0, pivot)`).
pub fn hermite_with_transform(m: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut e = m.to_vec();
    let mut w: Vec<Vec<BigInt>> = (0..nrows)
        .map(|i| {
            (0..nrows)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        loop {
            let piv = (r..nrows)
                .filter(|&i| !e[i][c].is_zero())
                .min_by(|&a, &b| e[a][c].abs().cmp(&e[b][c].abs()).then(a.cmp(&b)));
            let Some(p) = piv else { break };
            e.swap(r, p);
            w.swap(r, p);
            let mut done = true;
            for i in (r + 1)..nrows {
                if e[i][c].is_zero() {
                    continue;
                }
                let q = e[i][c].div_floor(&e[r][c]);
                sub_row(&mut e, i, r, &q);
                sub_row(&mut w, i, r, &q);
                if !e[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if e.get(r).map_or(true, |row| row[c].is_zero()) {
            continue;
        }
        if e[r][c].is_negative() {
            for x in e[r].iter_mut() {
                *x = -x.clone();
            }
            for x in w[r].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..r {
            let q = e[i][c].div_floor(&e[r][c]);
            if !q.is_zero() {
                sub_row(&mut e, i, r, &q);
                sub_row(&mut w, i, r, &q);
            }
        }
        r += 1;
    }
    (w, e)
}

fn sub_row(m: &mut [Vec<BigInt>], target: usize, src: usize, q: &BigInt) {
    let (a, b) = if target < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(target);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x -= q * y;
    }
}

/// Hermite normal form of the lattice spanned by `rows`; zero rows dropped.
pub fn hermite_rows(rows: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let (_, e) = hermite_with_transform(&big);
    e.into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| r.iter().map(|x| big_to_i64(x, "hermite form")).collect())
        .collect()
}

/// Z-basis of `{x in Z^n : m x = 0}` for an `k x n` integer matrix, in Hermite shape.
pub fn integer_kernel(m: &[Vec<i64>], n: usize) -> Result<Vec<Vec<i64>>> {
    // Row-reduce the transpose; rows of the transform that hit zero span the kernel.
    let mt: Vec<Vec<BigInt>> = (0..n)
        .map(|j| m.iter().map(|row| BigInt::from(row[j])).collect())
        .collect();
    let (w, e) = hermite_with_transform(&mt);
    let kernel: Vec<Vec<i64>> = e
        .iter()
        .zip(w.iter())
        .filter(|(er, _)| er.iter().all(|x| x.is_zero()))
        .map(|(_, wr)| wr.iter().map(|x| big_to_i64(x, "kernel")).collect())
        .collect::<Result<_>>()?;
    if kernel.is_empty() {
        return Ok(kernel);
    }
    hermite_rows(&kernel)
}

/// Z-basis (Hermite shape) of the saturation `span_Q(vectors) ∩ Z^n`.
pub fn saturation(vectors: &[Vec<i64>], n: usize) -> Result<Vec<Vec<i64>>> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let perp = integer_kernel(vectors, n)?;
    if perp.is_empty() {
        return Ok((0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect());
    }
    integer_kernel(&perp, n)
}

/// For a saturated sublattice `L` of rank `k` (given by a basis), a unimodular `w`
/// such that `w x` has its last `n - k` coordinates zero for every `x` in `L`.
pub fn standardizing_transform(basis: &[Vec<i64>], n: usize) -> Result<IntMatrix> {
    let k = basis.len();
    let cols: Vec<Vec<BigInt>> = (0..n)
        .map(|i| basis.iter().map(|b| BigInt::from(b[i])).collect())
        .collect();
    let (w, e) = hermite_with_transform(&cols);
    for row in e.iter().take(k) {
        let nz = row.iter().filter(|x| !x.is_zero()).count();
        if nz == 0 {
            return Err(Error::InvalidInput("basis is not independent".into()));
        }
    }
    let leading: Vec<Vec<BigInt>> = e.iter().take(k).cloned().collect();
    if !det_big(&leading).abs().is_one() {
        return Err(Error::InvalidInput("sublattice is not saturated".into()));
    }
    let data = w
        .iter()
        .flatten()
        .map(|x| big_to_i64(x, "standardizing transform"))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntMatrix::from_flat(n, n, data))
}

/// Extend a basis of a saturated sublattice to a unimodular matrix whose first columns
/// are exactly that basis.
pub fn complete_to_unimodular(basis: &[Vec<i64>], n: usize) -> Result<IntMatrix> {
    let k = basis.len();
    let w = standardizing_transform(basis, n)?;
    let winv = w.inverse()?;
    let mut out = winv.clone();
    for (j, b) in basis.iter().enumerate() {
        for i in 0..n {
            out.set(i, j, b[i]);
        }
    }
    debug_assert!(k <= n);
    if !out.is_unimodular() {
        return Err(Error::InvalidInput("completion is not unimodular".into()));
    }
    Ok(out)
}

pub fn to_i64_checked(x: &BigInt) -> Option<i64> {
    x.to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_rank_one() {
        let k = integer_kernel(&[vec![1, 0], vec![0, 0]], 2).unwrap();
        assert_eq!(k, vec![vec![0, 1]]);
        let k = integer_kernel(&[vec![2, 4, 6]], 3).unwrap();
        for v in &k {
            assert_eq!(2 * v[0] + 4 * v[1] + 6 * v[2], 0);
        }
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn saturation_of_scaled_vector() {
        let s = saturation(&[vec![2, 4, 0]], 3).unwrap();
        assert_eq!(s, vec![vec![1, 2, 0]]);
    }

    #[test]
    fn standardize_moves_kernel_last() {
        let basis = saturation(&[vec![1, 1, 1], vec![1, -1, 0]], 3).unwrap();
        let w = standardizing_transform(&basis, 3).unwrap();
        assert!(w.is_unimodular());
        for v in [[1, 1, 1], [1, -1, 0], [2, 0, 1]] {
            let y = w.mul_vec(&v).unwrap();
            assert_eq!(y[2], 0);
        }
        let c = complete_to_unimodular(&basis, 3).unwrap();
        assert_eq!(c.column(0), basis[0]);
        assert_eq!(c.column(1), basis[1]);
    }

    #[test]
    fn inverse_round_trip() {
        let u = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
        let v = u.inverse().unwrap();
        assert_eq!(u.mul(&v).unwrap(), IntMatrix::identity(2));
        let bad = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        assert!(bad.inverse().is_err());
    }

    #[test]
    fn hermite_is_canonical() {
        let a = hermite_rows(&[vec![2, 4], vec![1, 3]]).unwrap();
        let b = hermite_rows(&[vec![1, 3], vec![3, 7]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, vec![vec![1, 1], vec![0, 2]]);
    }
}
