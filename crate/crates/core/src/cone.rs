//! Facets of polyhedral cones by the double description method, and face lattices
//! obtained by intersecting facets. Generators are integral; all arithmetic is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{gcd_big, independent_rows, Rat};
use crate::error::{Error, Result};

/// Bitset over generator indices.
pub type RaySet = u128;

pub const MAX_GENERATORS: usize = 128;

pub fn full_set(n: usize) -> RaySet {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

pub fn members(s: RaySet) -> Vec<usize> {
    (0..128).filter(|&i| s >> i & 1 == 1).collect()
}

pub fn from_members(idx: &[usize]) -> RaySet {
    idx.iter().fold(0, |acc, &i| acc | 1u128 << i)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    /// Primitive integral functional, nonnegative on every generator.
    pub normal: Vec<BigInt>,
    /// Generators on which the functional vanishes.
    pub rays: RaySet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeFacets {
    /// Dimension of the linear span of the generators.
    pub dim: usize,
    pub facets: Vec<Facet>,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = gcd_big(v.iter());
    if g.is_zero() || g.is_one() {
        return v;
    }
    v.into_iter().map(|x| x / &g).collect()
}

struct DualRay {
    c: Vec<BigInt>,
    zeros: RaySet,
}

/// Facets of the cone generated by `gens`. Generators are inserted in the given order.
/// Facets that contain no generator (only possible for a one-dimensional cone) are
/// omitted.
pub fn facets(gens: &[Vec<i64>]) -> Result<ConeFacets> {
    if gens.len() > MAX_GENERATORS {
        return Err(Error::InvalidInput(format!(
            "at most {MAX_GENERATORS} generators are supported"
        )));
    }
    if gens.is_empty() {
        return Ok(ConeFacets {
            dim: 0,
            facets: Vec::new(),
        });
    }
    let n = gens[0].len();
    let rat_rows: Vec<Vec<Rat>> = gens
        .iter()
        .map(|r| r.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect())
        .collect();
    // coordinates on which the span projects injectively
    let cols: Vec<Vec<Rat>> = (0..n)
        .map(|j| rat_rows.iter().map(|r| r[j].clone()).collect())
        .collect();
    let pivots = independent_rows(&cols);
    let k = pivots.len();
    if k == 0 {
        return Err(Error::InvalidInput("zero generators".into()));
    }
    let proj: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|r| pivots.iter().map(|&j| BigInt::from(r[j])).collect())
        .collect();
    let dual = double_description(&proj, k)?;
    let mut out: Vec<Facet> = dual
        .into_iter()
        .filter(|d| d.zeros != 0)
        .map(|d| {
            let mut normal = vec![BigInt::zero(); n];
            for (pos, &j) in pivots.iter().enumerate() {
                normal[j] = d.c[pos].clone();
            }
            Facet {
                normal,
                rays: d.zeros,
            }
        })
        .collect();
    out.sort_by(|a, b| a.normal.cmp(&b.normal));
    Ok(ConeFacets { dim: k, facets: out })
}

/// Extreme rays of `{c : a·c >= 0 for every row a}` for rows spanning `Q^k`.
fn double_description(rows: &[Vec<BigInt>], k: usize) -> Result<Vec<DualRay>> {
    let rat_rows: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect();
    let init = independent_rows(&rat_rows);
    debug_assert_eq!(init.len(), k);
    // columns of the inverse of the initial square block
    let inv = invert(&init.iter().map(|&i| rat_rows[i].clone()).collect::<Vec<_>>())
        .ok_or_else(|| Error::InvalidInput("degenerate initial basis".into()))?;
    let mut rays: Vec<DualRay> = (0..k)
        .map(|j| {
            let col: Vec<Rat> = (0..k).map(|i| inv[i][j].clone()).collect();
            let den = crate::arith::common_denominator(col.iter());
            let c = primitive(
                col.iter()
                    .map(|x| (x * Rat::from_integer(den.clone())).to_integer())
                    .collect(),
            );
            let zeros = init
                .iter()
                .enumerate()
                .filter(|&(pos, _)| pos != j)
                .fold(0u128, |acc, (_, &row)| acc | 1u128 << row);
            DualRay { c, zeros }
        })
        .collect();
    let mut in_init = vec![false; rows.len()];
    for &i in &init {
        in_init[i] = true;
    }
    for (idx, a) in rows.iter().enumerate() {
        if in_init[idx] {
            continue;
        }
        let bit = 1u128 << idx;
        let vals: Vec<BigInt> = rays.iter().map(|r| dot(a, &r.c)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut next: Vec<DualRay> = Vec::with_capacity(rays.len());
        let mut created: Vec<DualRay> = Vec::new();
        for &p in &pos {
            for &m in &neg {
                let common = rays[p].zeros & rays[m].zeros;
                if (common.count_ones() as usize) + 2 < k {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(i, r)| {
                    i == p || i == m || common & r.zeros != common
                });
                if !adjacent {
                    continue;
                }
                let ap = &vals[p];
                let am = -&vals[m];
                let c: Vec<BigInt> = rays[m]
                    .c
                    .iter()
                    .zip(&rays[p].c)
                    .map(|(x, y)| ap * x + &am * y)
                    .collect();
                created.push(DualRay {
                    c: primitive(c),
                    zeros: common | bit,
                });
            }
        }
        for (i, r) in rays.into_iter().enumerate() {
            if vals[i].is_negative() {
                continue;
            }
            let zeros = if vals[i].is_zero() { r.zeros | bit } else { r.zeros };
            next.push(DualRay { c: r.c, zeros });
        }
        next.extend(created);
        rays = next;
    }
    Ok(rays)
}

fn invert(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for j in 0..2 * n {
            a[c][j] = &a[c][j] * &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Smallest face containing `s`: the intersection of all facets containing it.
pub fn face_closure(s: RaySet, all: RaySet, facets: &[RaySet]) -> RaySet {
    facets
        .iter()
        .filter(|&&f| f & s == s)
        .fold(all, |acc, &f| acc & f)
}

/// Every nonempty face (as a generator set) of a cone with the given facets, the cone
/// itself included. Sorted by size, then numerically.
pub fn face_sets(all: RaySet, facets: &[RaySet]) -> Vec<RaySet> {
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![all];
    seen.insert(all);
    while let Some(f) = stack.pop() {
        for &h in facets {
            let x = f & h;
            if x != f && seen.insert(x) {
                stack.push(x);
            }
        }
    }
    let mut out: Vec<RaySet> = seen.into_iter().filter(|&s| s != 0).collect();
    out.sort_by_key(|&s| (s.count_ones(), s));
    out
}

/// Whether `s` is the generator set of a face.
pub fn is_face(s: RaySet, all: RaySet, facets: &[RaySet]) -> bool {
    face_closure(s, all, facets) == s
}

pub fn normal_value(normal: &[BigInt], x: &[i64]) -> BigInt {
    normal
        .iter()
        .zip(x)
        .map(|(a, &b)| a * BigInt::from(b))
        .sum()
}

pub fn lcm_all(xs: &[BigInt]) -> BigInt {
    xs.iter().fold(BigInt::one(), |a, b| a.lcm(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_pyramid_cone() {
        // cone over a square: 4 generators in R^3, 4 facets
        let gens = vec![
            vec![1, 0, 1],
            vec![0, 1, 1],
            vec![-1, 0, 1],
            vec![0, -1, 1],
        ];
        let cf = facets(&gens).unwrap();
        assert_eq!(cf.dim, 3);
        assert_eq!(cf.facets.len(), 4);
        for f in &cf.facets {
            assert_eq!(f.rays.count_ones(), 2);
            for (i, g) in gens.iter().enumerate() {
                let v = normal_value(&f.normal, g);
                assert!(!v.is_negative());
                assert_eq!(v.is_zero(), f.rays >> i & 1 == 1);
            }
        }
        let fs: Vec<RaySet> = cf.facets.iter().map(|f| f.rays).collect();
        let faces = face_sets(full_set(4), &fs);
        // 4 rays, 4 two-faces, the cone itself
        assert_eq!(faces.len(), 9);
        assert!(!is_face(0b0101, full_set(4), &fs));
        assert!(is_face(0b0011, full_set(4), &fs));
    }

    #[test]
    fn lower_dimensional_cone() {
        // a 2-dim cone sitting in R^3
        let gens = vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 2, 0]];
        let cf = facets(&gens).unwrap();
        assert_eq!(cf.dim, 2);
        assert_eq!(cf.facets.len(), 2);
        let mut sets: Vec<RaySet> = cf.facets.iter().map(|f| f.rays).collect();
        sets.sort();
        assert_eq!(sets, vec![0b001, 0b100]);
    }

    #[test]
    fn single_ray_has_no_facets() {
        let cf = facets(&[vec![1]]).unwrap();
        assert_eq!(cf.dim, 1);
        assert!(cf.facets.is_empty());
    }
}
