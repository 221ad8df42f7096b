//! GL_g(Z)-equivalence of positive definite forms with explicit witnesses, and
//! automorphism groups.
//!
//! Both searches look for integral vectors `u_1, …, u_g` in the lattice of the first
//! form whose Gram matrix equals a size-reduced copy of the second form; the
//! candidates for `u_j` are the vectors of norm exactly the `j`-th diagonal entry.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{SymForm, VectorZ};
use crate::intmat::IntMatrix;
use crate::minvec::{min_data, short_vectors, size_reduce};

/// An element of GL_g(Z).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Unimodular(IntMatrix);

impl fmt::Debug for Unimodular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Unimodular{:?}", self.0)
    }
}

impl Unimodular {
    pub fn new(m: IntMatrix) -> Result<Self> {
        if !m.is_unimodular() {
            return Err(Error::InvalidInput("matrix is not unimodular".into()));
        }
        Ok(Unimodular(m))
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows)?)
    }

    pub fn identity(g: usize) -> Self {
        Unimodular(IntMatrix::identity(g))
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn inverse(&self) -> Unimodular {
        Unimodular(self.0.inverse().expect("unimodular matrices are invertible over Z"))
    }

    pub fn compose(&self, other: &Unimodular) -> Result<Unimodular> {
        Ok(Unimodular(self.0.mul(&other.0)?))
    }

    pub fn apply(&self, q: &SymForm) -> Result<SymForm> {
        q.transform(&self.0)
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.0.to_rows()
    }
}

/// Invariants that any two equivalent forms share.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    pub dim: usize,
    pub det: String,
    pub min_norm: i64,
    pub pair_count: usize,
    /// Sorted multiset of `|q(v, w)|` over unordered pairs of distinct minimal pairs.
    pub min_gram: Vec<i64>,
    /// Number of vector pairs of each norm `min, min + 1, …, 2·min`.
    pub shells: Vec<usize>,
}

pub fn fingerprint(q: &SymForm) -> Result<Fingerprint> {
    let md = min_data(q)?;
    let mut min_gram = Vec::new();
    for (i, v) in md.vectors.iter().enumerate() {
        for w in &md.vectors[i + 1..] {
            min_gram.push(q.bilinear(&v.0, &w.0).abs() as i64);
        }
    }
    min_gram.sort_unstable();
    let m = md.min_norm;
    let mut shells = vec![0usize; (m + 1) as usize];
    for (_, val) in short_vectors(q, 2 * m)? {
        shells[(val - m) as usize] += 1;
    }
    Ok(Fingerprint {
        dim: q.dim(),
        det: q.det().to_string(),
        min_norm: m,
        pair_count: md.vectors.len(),
        min_gram,
        shells,
    })
}

/// Backtracking isometry search state for `uᵀ a u == target`.
struct IsometrySearch<'a> {
    a: &'a SymForm,
    target: SymForm,
    /// candidates per column: vector and `a·vector`
    cands: Vec<Vec<(Vec<i64>, Vec<i64>)>>,
}

impl<'a> IsometrySearch<'a> {
    fn new(a: &'a SymForm, target: SymForm) -> Result<Self> {
        let g = a.dim();
        let max_diag = target.max_diagonal();
        let pool = short_vectors(a, max_diag)?;
        let am = a.as_matrix();
        let mut cands = Vec::with_capacity(g);
        for j in 0..g {
            let want = target.get(j, j);
            let mut cj = Vec::new();
            for (x, val) in &pool {
                if *val != want {
                    continue;
                }
                for y in [x.clone(), x.neg()] {
                    let ay = am.mul_vec(&y.0)?;
                    cj.push((y.0, ay));
                }
            }
            cands.push(cj);
        }
        Ok(IsometrySearch { a, target, cands })
    }

    fn run(&self, all: bool) -> Vec<Vec<Vec<i64>>> {
        let g = self.a.dim();
        let mut chosen: Vec<usize> = Vec::with_capacity(g);
        let mut found = Vec::new();
        self.extend(&mut chosen, all, &mut found);
        found
    }

    fn extend(&self, chosen: &mut Vec<usize>, all: bool, found: &mut Vec<Vec<Vec<i64>>>) -> bool {
        let j = chosen.len();
        if j == self.a.dim() {
            found.push(
                chosen
                    .iter()
                    .enumerate()
                    .map(|(col, &k)| self.cands[col][k].0.clone())
                    .collect(),
            );
            return !all;
        }
        'cand: for (k, (_, ay)) in self.cands[j].iter().enumerate() {
            for (i, &ki) in chosen.iter().enumerate() {
                let ui = &self.cands[i][ki].0;
                let dot: i128 = ui.iter().zip(ay).map(|(&p, &q)| p as i128 * q as i128).sum();
                if dot != self.target.get(i, j) as i128 {
                    continue 'cand;
                }
            }
            chosen.push(k);
            let stop = self.extend(chosen, all, found);
            chosen.pop();
            if stop {
                return true;
            }
        }
        false
    }
}

fn columns_to_matrix(cols: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_columns(cols).expect("square column set")
}

fn check_pair(q1: &SymForm, q2: &SymForm) -> Result<()> {
    if q1.dim() != q2.dim() {
        return Err(Error::DimensionMismatch {
            expected: q1.dim(),
            found: q2.dim(),
        });
    }
    if !q1.is_positive_definite() || !q2.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(())
}

/// All `u` with `uᵀ q1 u == q2` (or the first one found when `all` is false).
fn isometries(q1: &SymForm, q2: &SymForm, all: bool) -> Result<Vec<IntMatrix>> {
    let (r2, w) = size_reduce(q2);
    let winv = w.inverse()?;
    let search = IsometrySearch::new(q1, r2)?;
    search
        .run(all)
        .into_iter()
        .map(|cols| {
            let u = columns_to_matrix(&cols).mul(&winv)?;
            assert_eq!(
                q1.transform(&u)?,
                *q2,
                "isometry witness failed verification"
            );
            Ok(u)
        })
        .collect()
}

/// A witness `u` with `uᵀ q1 u == q2` when the forms are GL_g(Z)-equivalent.
pub fn are_equivalent(q1: &SymForm, q2: &SymForm) -> Result<Option<Unimodular>> {
    check_pair(q1, q2)?;
    if q1 == q2 {
        return Ok(Some(Unimodular::identity(q1.dim())));
    }
    if fingerprint(q1)? != fingerprint(q2)? {
        return Ok(None);
    }
    equivalent_prefiltered(q1, q2)
}

/// Equivalence search for forms already known to share a fingerprint.
pub(crate) fn equivalent_prefiltered(q1: &SymForm, q2: &SymForm) -> Result<Option<Unimodular>> {
    if q1.det() != q2.det() {
        return Ok(None);
    }
    Ok(isometries(q1, q2, false)?.into_iter().next().map(Unimodular))
}

/// Every element of the automorphism group `{u : uᵀ q u == q}`, in search order.
pub fn automorphism_group(q: &SymForm) -> Result<Vec<IntMatrix>> {
    if !q.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let mut elems = isometries(q, q, true)?;
    elems.sort();
    Ok(elems)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Automorphisms {
    pub generators: Vec<Unimodular>,
    pub order: u64,
}

/// Generators and exact order of the automorphism group.
pub fn automorphisms(q: &SymForm) -> Result<Automorphisms> {
    let elems = automorphism_group(q)?;
    let generators = generators_of(&elems, q.dim())?;
    Ok(Automorphisms {
        generators: generators.into_iter().map(Unimodular).collect(),
        order: elems.len() as u64,
    })
}

/// Greedy generating set: walk the elements in order and keep every element that is
/// not already in the subgroup generated so far.
pub fn generators_of(elems: &[IntMatrix], g: usize) -> Result<Vec<IntMatrix>> {
    let mut gens: Vec<IntMatrix> = Vec::new();
    let mut sub: HashSet<IntMatrix> = HashSet::new();
    sub.insert(IntMatrix::identity(g));
    for e in elems {
        if sub.contains(e) {
            continue;
        }
        gens.push(e.clone());
        sub = closure(&gens, g)?;
        if sub.len() == elems.len() {
            break;
        }
    }
    Ok(gens)
}

pub fn closure(gens: &[IntMatrix], g: usize) -> Result<HashSet<IntMatrix>> {
    let id = IntMatrix::identity(g);
    let mut seen: HashSet<IntMatrix> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        for s in gens {
            let y = x.mul(s)?;
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}

/// Minimal vectors mapped by `u⁻¹` (the induced action of an automorphism), canonicalised.
pub fn act_on_vectors(u: &IntMatrix, xs: &[VectorZ]) -> Result<Vec<VectorZ>> {
    let mut out: Vec<VectorZ> = xs
        .iter()
        .map(|x| Ok(VectorZ(u.mul_vec(&x.0)?).sign_canonical()))
        .collect::<Result<_>>()?;
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_aut_order(q: &SymForm, radius: i64) -> usize {
        // all integer 2x2 matrices with entries in [-radius, radius]
        let mut n = 0;
        for a in -radius..=radius {
            for b in -radius..=radius {
                for c in -radius..=radius {
                    for d in -radius..=radius {
                        let u = IntMatrix::from_rows(&[vec![a, b], vec![c, d]]).unwrap();
                        if (a * d - b * c).abs() == 1 && q.transform(&u).unwrap() == *q {
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    }

    #[test]
    fn automorphism_orders() {
        let id2 = SymForm::identity(2);
        let a2 = SymForm::root_a(2);
        assert_eq!(brute_aut_order(&id2, 2), 8);
        assert_eq!(brute_aut_order(&a2, 2), 12);
        assert_eq!(automorphisms(&id2).unwrap().order, 8);
        assert_eq!(automorphisms(&a2).unwrap().order, 12);
        assert_eq!(automorphisms(&SymForm::new(vec![vec![1]]).unwrap()).unwrap().order, 2);
        assert_eq!(automorphisms(&SymForm::root_a(3)).unwrap().order, 48);
        assert_eq!(automorphisms(&SymForm::root_d(4)).unwrap().order, 1152);
    }

    #[test]
    fn generators_generate() {
        let q = SymForm::root_a(3);
        let a = automorphisms(&q).unwrap();
        let mats: Vec<IntMatrix> = a.generators.iter().map(|u| u.matrix().clone()).collect();
        assert_eq!(closure(&mats, 3).unwrap().len() as u64, a.order);
        for u in &a.generators {
            assert_eq!(u.apply(&q).unwrap(), q);
        }
    }

    #[test]
    fn equivalence_examples() {
        let a2 = SymForm::root_a(2);
        let u = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        let q2 = a2.transform(&u).unwrap();
        let w = are_equivalent(&a2, &q2).unwrap().expect("equivalent");
        assert_eq!(w.apply(&a2).unwrap(), q2);

        assert_eq!(are_equivalent(&SymForm::identity(2), &a2).unwrap(), None);
        let two_i = SymForm::identity(2).scale(2).unwrap();
        assert_eq!(are_equivalent(&a2, &two_i).unwrap(), None);
        assert!(matches!(
            are_equivalent(&a2, &SymForm::root_a(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        let bad = SymForm::new(vec![vec![1, 2], vec![2, 1]]).unwrap();
        assert_eq!(are_equivalent(&bad, &a2), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn fingerprint_separates_d4_and_a4() {
        let d4 = fingerprint(&SymForm::root_d(4)).unwrap();
        let a4 = fingerprint(&SymForm::root_a(4)).unwrap();
        assert_ne!(d4, a4);
        assert_eq!((d4.pair_count, a4.pair_count), (12, 10));
    }
}
