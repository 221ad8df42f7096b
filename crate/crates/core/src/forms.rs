//! Symmetric forms over Z and Q: evaluation, the trace pairing, rank and
//! semidefiniteness, integral kernels, and rank-1 forms.
//!
//! A form is stored as its full Gram matrix `A` and represents `q(x) = xᵀ A x`
//! (no factor-2 convention), so `trace_pair(q, x xᵀ) == q(x)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::jsonfmt::{int_rows, rows_from_json, JsonInt, JsonRat};
use crate::arith::{big_to_i64, common_denominator, gcd_big, gcd_slice, i128_to_i64, Rat};
use crate::error::{Error, Result};
use crate::intmat::{self, IntMatrix};

/// Integral vector. "Canonical" means primitive with first nonzero coordinate positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VectorZ(pub Vec<i64>);

impl fmt::Debug for VectorZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl VectorZ {
    pub fn new(coords: Vec<i64>) -> Self {
        VectorZ(coords)
    }

    pub fn unit(g: usize, i: usize) -> Self {
        let mut v = vec![0; g];
        v[i] = 1;
        VectorZ(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn content(&self) -> i64 {
        gcd_slice(&self.0)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// Sign chosen so that the first nonzero coordinate is positive.
    pub fn sign_canonical(&self) -> VectorZ {
        match self.0.iter().find(|&&x| x != 0) {
            Some(&x) if x < 0 => VectorZ(self.0.iter().map(|c| -c).collect()),
            _ => self.clone(),
        }
    }

    pub fn is_sign_canonical(&self) -> bool {
        self.0.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
    }

    pub fn neg(&self) -> VectorZ {
        VectorZ(self.0.iter().map(|c| -c).collect())
    }

    pub fn dot(&self, other: &VectorZ) -> i128 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum()
    }
}

/// Integral symmetric Gram matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymForm {
    g: usize,
    entries: Vec<i64>,
}

impl fmt::Debug for SymForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymForm{:?}", self.rows())
    }
}

impl SymForm {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let g = rows.len();
        if g == 0 {
            return Err(Error::InvalidInput("form of dimension 0".into()));
        }
        if rows.iter().any(|r| r.len() != g) {
            return Err(Error::InvalidInput("Gram matrix is not square".into()));
        }
        for i in 0..g {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidInput(format!(
                        "Gram matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(SymForm {
            g,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_flat(g: usize, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != g * g {
            return Err(Error::InvalidInput("wrong number of entries".into()));
        }
        Self::new(entries.chunks(g.max(1)).map(|c| c.to_vec()).collect())
    }

    pub fn zero(g: usize) -> Self {
        SymForm {
            g,
            entries: vec![0; g * g],
        }
    }

    pub fn identity(g: usize) -> Self {
        Self::diagonal(&vec![1; g])
    }

    pub fn diagonal(d: &[i64]) -> Self {
        let g = d.len();
        let mut entries = vec![0; g * g];
        for (i, &x) in d.iter().enumerate() {
            entries[i * g + i] = x;
        }
        SymForm { g, entries }
    }

    /// Root form `A_g`: 2 on the diagonal, −1 next to it.
    pub fn root_a(g: usize) -> Self {
        let mut q = Self::diagonal(&vec![2; g]);
        for i in 0..g.saturating_sub(1) {
            q.entries[i * g + i + 1] = -1;
            q.entries[(i + 1) * g + i] = -1;
        }
        q
    }

    /// Root form `D_g` (g >= 3) in the standard basis e1-e2, ..., e_{g-1}-e_g, e_{g-1}+e_g.
    pub fn root_d(g: usize) -> Self {
        assert!(g >= 3);
        let mut q = Self::root_a(g);
        let (a, b) = (g - 1, g - 2);
        q.entries[a * g + b] = 0;
        q.entries[b * g + a] = 0;
        let c = g - 3;
        q.entries[a * g + c] = -1;
        q.entries[c * g + a] = -1;
        q
    }

    pub fn dim(&self) -> usize {
        self.g
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.g + j]
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.g).map(|c| c.to_vec()).collect()
    }

    pub fn as_matrix(&self) -> IntMatrix {
        IntMatrix::from_flat(self.g, self.g, self.entries.clone())
    }

    /// `xᵀ A x`; the caller guarantees matching dimension.
    #[inline]
    pub fn eval(&self, x: &[i64]) -> i128 {
        debug_assert_eq!(x.len(), self.g);
        let g = self.g;
        let mut s: i128 = 0;
        for i in 0..g {
            if x[i] == 0 {
                continue;
            }
            let xi = x[i] as i128;
            s += self.entries[i * g + i] as i128 * xi * xi;
            let mut t: i128 = 0;
            for j in (i + 1)..g {
                t += self.entries[i * g + j] as i128 * x[j] as i128;
            }
            s += 2 * xi * t;
        }
        s
    }

    pub fn bilinear(&self, x: &[i64], y: &[i64]) -> i128 {
        let g = self.g;
        let mut s: i128 = 0;
        for i in 0..g {
            if x[i] == 0 {
                continue;
            }
            let mut t: i128 = 0;
            for j in 0..g {
                t += self.entries[i * g + j] as i128 * y[j] as i128;
            }
            s += x[i] as i128 * t;
        }
        s
    }

    /// `Uᵀ A U`.
    pub fn transform(&self, u: &IntMatrix) -> Result<SymForm> {
        if u.nrows() != self.g {
            return Err(Error::DimensionMismatch {
                expected: self.g,
                found: u.nrows(),
            });
        }
        let n = u.ncols();
        let g = self.g;
        // A U
        let mut au = vec![0i128; g * n];
        for i in 0..g {
            for j in 0..n {
                let mut s = 0i128;
                for k in 0..g {
                    s += self.entries[i * g + k] as i128 * u.get(k, j) as i128;
                }
                au[i * n + j] = s;
            }
        }
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0i128;
                for k in 0..g {
                    s += u.get(k, i) as i128 * au[k * n + j];
                }
                entries.push(i128_to_i64(s, "form transform")?);
            }
        }
        Ok(SymForm { g: n, entries })
    }

    pub fn scale(&self, c: i64) -> Result<SymForm> {
        let entries = self
            .entries
            .iter()
            .map(|&x| x.checked_mul(c).ok_or(Error::Overflow("form scaling")))
            .collect::<Result<_>>()?;
        Ok(SymForm { g: self.g, entries })
    }

    pub fn direct_sum(&self, other: &SymForm) -> SymForm {
        let g = self.g + other.g;
        let mut entries = vec![0; g * g];
        for i in 0..self.g {
            for j in 0..self.g {
                entries[i * g + j] = self.get(i, j);
            }
        }
        for i in 0..other.g {
            for j in 0..other.g {
                entries[(i + self.g) * g + j + self.g] = other.get(i, j);
            }
        }
        SymForm { g, entries }
    }

    /// Embed into `n >= g` variables, padding with zero rows and columns.
    pub fn embed(&self, n: usize) -> SymForm {
        assert!(n >= self.g);
        if n == self.g {
            return self.clone();
        }
        self.direct_sum(&SymForm::zero(n - self.g))
    }

    pub fn to_rational(&self) -> RationalSymForm {
        RationalSymForm {
            g: self.g,
            entries: self
                .entries
                .iter()
                .map(|&x| Rat::from_integer(BigInt::from(x)))
                .collect(),
        }
    }

    pub fn content(&self) -> i64 {
        gcd_slice(&self.entries)
    }

    pub fn max_diagonal(&self) -> i64 {
        (0..self.g).map(|i| self.get(i, i)).max().unwrap_or(0)
    }

    pub fn det(&self) -> BigInt {
        self.as_matrix().det()
    }

    pub fn is_positive_definite(&self) -> bool {
        let r = psd_rank(&self.to_rational());
        r.is_psd && r.rank == self.g
    }

    /// Upper-triangular coordinates in trace normalisation (see [`sym_coords`]).
    pub fn coords(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.g * (self.g + 1) / 2);
        for i in 0..self.g {
            for j in i..self.g {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// Inverse of [`SymForm::coords`].
    pub fn from_coords(g: usize, c: &[i64]) -> SymForm {
        let mut entries = vec![0; g * g];
        let mut k = 0;
        for i in 0..g {
            for j in i..g {
                entries[i * g + j] = c[k];
                entries[j * g + i] = c[k];
                k += 1;
            }
        }
        SymForm { g, entries }
    }
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    g: usize,
    matrix: Vec<Vec<JsonInt>>,
}

impl Serialize for SymForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormJson {
            g: self.g,
            matrix: int_rows(&self.rows()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = FormJson::deserialize(d)?;
        let rows = rows_from_json(&raw.matrix)?;
        if rows.len() != raw.g {
            return Err(D::Error::custom("matrix size does not match g"));
        }
        SymForm::new(rows).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct RationalFormJson {
    g: usize,
    matrix: Vec<Vec<JsonRat>>,
}

impl Serialize for RationalSymForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalFormJson {
            g: self.g,
            matrix: self
                .rows()
                .iter()
                .map(|r| r.iter().map(JsonRat::from_rat).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalSymForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RationalFormJson::deserialize(d)?;
        let rows = raw
            .matrix
            .iter()
            .map(|r| r.iter().map(|x| x.to_rat()).collect())
            .collect::<std::result::Result<Vec<Vec<Rat>>, D::Error>>()?;
        if rows.len() != raw.g {
            return Err(D::Error::custom("matrix size does not match g"));
        }
        RationalSymForm::new(rows).map_err(D::Error::custom)
    }
}

/// Rational symmetric matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalSymForm {
    g: usize,
    entries: Vec<Rat>,
}

impl fmt::Debug for RationalSymForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .entries
            .chunks(self.g)
            .map(|c| c.iter().map(|x| x.to_string()).collect())
            .collect();
        write!(f, "RationalSymForm{rows:?}")
    }
}

impl RationalSymForm {
    pub fn new(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let g = rows.len();
        if g == 0 || rows.iter().any(|r| r.len() != g) {
            return Err(Error::InvalidInput("Gram matrix is not square".into()));
        }
        for i in 0..g {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidInput("Gram matrix is not symmetric".into()));
                }
            }
        }
        Ok(RationalSymForm {
            g,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn zero(g: usize) -> Self {
        RationalSymForm {
            g,
            entries: vec![Rat::zero(); g * g],
        }
    }

    pub fn dim(&self) -> usize {
        self.g
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.g + j]
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        self.entries.chunks(self.g).map(|c| c.to_vec()).collect()
    }

    pub fn eval(&self, x: &[i64]) -> Rat {
        let g = self.g;
        let mut s = Rat::zero();
        for i in 0..g {
            if x[i] == 0 {
                continue;
            }
            for j in 0..g {
                if x[j] == 0 {
                    continue;
                }
                s += &self.entries[i * g + j] * Rat::from_integer(BigInt::from(x[i] as i128 * x[j] as i128));
            }
        }
        s
    }

    pub fn add(&self, other: &RationalSymForm) -> Result<RationalSymForm> {
        check_dims(self.g, other.g)?;
        Ok(RationalSymForm {
            g: self.g,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &RationalSymForm) -> Result<RationalSymForm> {
        check_dims(self.g, other.g)?;
        Ok(RationalSymForm {
            g: self.g,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &Rat) -> RationalSymForm {
        RationalSymForm {
            g: self.g,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    /// `self + c · x xᵀ`.
    pub fn add_rank1(&self, x: &[i64], c: &Rat) -> RationalSymForm {
        let mut out = self.clone();
        for i in 0..self.g {
            for j in 0..self.g {
                let v = x[i] as i128 * x[j] as i128;
                if v != 0 {
                    out.entries[i * self.g + j] += c * Rat::from_integer(BigInt::from(v));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|x| x.is_integer())
    }

    pub fn to_integral(&self) -> Result<SymForm> {
        if !self.is_integral() {
            return Err(Error::InvalidInput("form has non-integral entries".into()));
        }
        let entries = self
            .entries
            .iter()
            .map(|x| big_to_i64(&x.to_integer(), "integral form"))
            .collect::<Result<_>>()?;
        Ok(SymForm { g: self.g, entries })
    }

    /// Positive multiple of `self` that is a primitive integral matrix, with the factor used.
    pub fn clear_denominators(&self) -> Result<(SymForm, Rat)> {
        if self.is_zero() {
            return Ok((SymForm::zero(self.g), Rat::one()));
        }
        let den = common_denominator(self.entries.iter());
        let nums: Vec<BigInt> = self
            .entries
            .iter()
            .map(|x| (x * Rat::from_integer(den.clone())).to_integer())
            .collect();
        let g = gcd_big(nums.iter());
        let entries = nums
            .iter()
            .map(|x| big_to_i64(&(x / &g), "cleared form"))
            .collect::<Result<_>>()?;
        Ok((
            SymForm {
                g: self.g,
                entries,
            },
            Rat::new(den, g),
        ))
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

/// `Σ_i c_i · x_i x_iᵀ == target`, with every coefficient strictly positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConicCombination {
    pub rays: Vec<VectorZ>,
    #[serde(with = "crate::jsonfmt::rat_vec_serde")]
    pub coeffs: Vec<Rat>,
    pub target: RationalSymForm,
}

impl ConicCombination {
    pub fn sum(&self) -> RationalSymForm {
        let mut acc = RationalSymForm::zero(self.target.dim());
        for (r, c) in self.rays.iter().zip(&self.coeffs) {
            acc = acc.add_rank1(&r.0, c);
        }
        acc
    }

    /// Re-checks the defining identity and positivity from the stored data alone.
    pub fn is_valid(&self) -> bool {
        self.rays.len() == self.coeffs.len()
            && self.coeffs.iter().all(|c| c.is_positive())
            && self.rays.iter().all(|r| r.dim() == self.target.dim() && !r.is_zero())
            && self.sum() == self.target
    }

    pub fn total_weight(&self) -> Rat {
        self.coeffs.iter().fold(Rat::zero(), |a, c| a + c)
    }
}

/// `q(x)`.
pub fn evaluate(q: &SymForm, x: &VectorZ) -> Result<i64> {
    check_dims(q.dim(), x.dim())?;
    i128_to_i64(q.eval(&x.0), "evaluate")
}

/// `Σ_{i,j} p_ij f_ij`.
pub fn trace_pair(p: &RationalSymForm, f: &RationalSymForm) -> Result<Rat> {
    check_dims(p.dim(), f.dim())?;
    Ok(p.entries
        .iter()
        .zip(&f.entries)
        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
        .fold(Rat::zero(), |acc, (a, b)| acc + a * b))
}

pub fn trace_pair_int(p: &SymForm, f: &SymForm) -> Result<i128> {
    check_dims(p.dim(), f.dim())?;
    Ok(p.entries
        .iter()
        .zip(&f.entries)
        .map(|(&a, &b)| a as i128 * b as i128)
        .sum())
}

/// `x xᵀ`.
pub fn rank1(x: &VectorZ) -> Result<SymForm> {
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    let g = x.dim();
    let mut entries = Vec::with_capacity(g * g);
    for i in 0..g {
        for j in 0..g {
            entries.push(
                x.0[i]
                    .checked_mul(x.0[j])
                    .ok_or(Error::Overflow("rank-1 form"))?,
            );
        }
    }
    Ok(SymForm { g, entries })
}

/// Coordinates of `x xᵀ` in the trace normalisation: `(x_i², 2 x_i x_j)` for `i < j`.
/// A symmetric `H` then acts as `H(x) = Σ_{i<=j} H_ij · coords(x)`.
pub fn rank1_coords(x: &[i64]) -> Vec<i64> {
    let g = x.len();
    let mut out = Vec::with_capacity(g * (g + 1) / 2);
    for i in 0..g {
        out.push(x[i] * x[i]);
        for j in (i + 1)..g {
            out.push(2 * x[i] * x[j]);
        }
    }
    out
}

/// Dimension of the linear span of the rank-1 forms `x xᵀ`.
pub fn rank1_span_dim(xs: &[VectorZ]) -> usize {
    let rows: Vec<Vec<i64>> = xs.iter().map(|x| rank1_coords(&x.0)).collect();
    crate::arith::rank_int(&rows)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsdRank {
    pub is_psd: bool,
    pub rank: usize,
    pub kernel_basis: Vec<VectorZ>,
}

/// Semidefiniteness via LDLᵀ with symmetric pivoting on the largest remaining diagonal
/// entry (ties to the lowest index); rank and a saturated integral kernel basis in
/// Hermite shape.
pub fn psd_rank(f: &RationalSymForm) -> PsdRank {
    let g = f.dim();
    let mut a: Vec<Vec<Rat>> = f.rows();
    let mut remaining: Vec<usize> = (0..g).collect();
    let mut is_psd = true;
    while !remaining.is_empty() {
        let mut best = remaining[0];
        for &i in &remaining[1..] {
            if a[i][i] > a[best][best] {
                best = i;
            }
        }
        let pivot = a[best][best].clone();
        if !pivot.is_positive() {
            if pivot.is_negative() {
                is_psd = false;
            } else {
                let nonzero = remaining
                    .iter()
                    .any(|&i| remaining.iter().any(|&j| !a[i][j].is_zero()));
                if nonzero {
                    is_psd = false;
                }
            }
            break;
        }
        remaining.retain(|&i| i != best);
        for &i in &remaining {
            if a[i][best].is_zero() {
                continue;
            }
            let f_i = &a[i][best] / &pivot;
            for &j in &remaining {
                let t = &f_i * &a[best][j];
                a[i][j] -= t;
            }
        }
    }
    let den = common_denominator(f.entries());
    let scaled: Vec<Vec<i64>> = f
        .rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    (x * Rat::from_integer(den.clone()))
                        .to_integer()
                        .to_i64()
                        .expect("form entries fit in i64 after clearing denominators")
                })
                .collect()
        })
        .collect();
    let kernel = intmat::integer_kernel(&scaled, g).expect("kernel of a small form");
    PsdRank {
        is_psd,
        rank: g - kernel.len(),
        kernel_basis: kernel.into_iter().map(VectorZ).collect(),
    }
}

pub fn psd_rank_int(f: &SymForm) -> PsdRank {
    psd_rank(&f.to_rational())
}

/// Rank of `Σ x xᵀ` over the given vectors, i.e. the dimension of their span.
pub fn vectors_rank(xs: &[VectorZ]) -> usize {
    let rows: Vec<Vec<i64>> = xs.iter().map(|x| x.0.clone()).collect();
    crate::arith::rank_int(&rows)
}

pub fn is_one(x: &Rat) -> bool {
    x.is_one()
}
