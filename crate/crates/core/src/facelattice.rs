//! Face lattices of Voronoi domains, rank stratification of faces, and the
//! GL_g(Z)-orbit poset of faces.
//!
//! A face is recorded by the subset of its domain's rays. Its rank is the rank of the
//! sum of its ray forms; a face of rank `r` meets the interior of a copy of the cone of
//! positive definite forms in `r` variables.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{independent_rows, rank_int, Rat};
use crate::cone::{self, RaySet};
use crate::equivalence::{automorphism_group, generators_of};
use crate::error::{Error, Result};
use crate::forms::{psd_rank, rank1_coords, vectors_rank, RationalSymForm, VectorZ};
use crate::intmat::{self, IntMatrix};
use crate::voronoi::{domain, enumerate_perfect, sym_dim, EnumerateOptions, Enumeration, PerfectDomain};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face {
    pub class_id: usize,
    /// Sorted indices into the domain's rays.
    pub rays: Vec<usize>,
    pub dim: usize,
    pub barycenter_rank: usize,
}

impl Face {
    pub fn ray_set(&self) -> RaySet {
        cone::from_members(&self.rays)
    }

    pub fn vectors(&self, d: &PerfectDomain) -> Vec<VectorZ> {
        self.rays.iter().map(|&i| d.rays[i].clone()).collect()
    }
}

pub fn face_dim(vectors: &[VectorZ]) -> usize {
    let rows: Vec<Vec<i64>> = vectors.iter().map(|x| rank1_coords(&x.0)).collect();
    rank_int(&rows)
}

fn make_face(d: &PerfectDomain, class_id: usize, s: RaySet) -> Face {
    let rays = cone::members(s);
    let vs: Vec<VectorZ> = rays.iter().map(|&i| d.rays[i].clone()).collect();
    Face {
        class_id,
        dim: face_dim(&vs),
        barycenter_rank: vectors_rank(&vs),
        rays,
    }
}

/// Every nonzero face of `d` (the domain itself included), sorted by dimension.
pub fn faces(d: &PerfectDomain, class_id: usize) -> Vec<Face> {
    let mut out: Vec<Face> = cone::face_sets(d.all_rays(), &d.facet_rays)
        .into_iter()
        .map(|s| make_face(d, class_id, s))
        .collect();
    out.sort_by(|a, b| (a.dim, &a.rays).cmp(&(b.dim, &b.rays)));
    out
}

/// f-vector: number of faces of each dimension `1..=span_dim`.
pub fn f_vector(fs: &[Face], span_dim: usize) -> Vec<usize> {
    let mut v = vec![0; span_dim + 1];
    for f in fs {
        v[f.dim] += 1;
    }
    v.remove(0);
    v
}

/// Ray vectors moved into the first `rank` coordinates by a unimodular change of
/// basis computed from the kernel of their barycenter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardFace {
    /// `transform · x` vanishes beyond the first `rank` coordinates for each ray `x`.
    pub transform: IntMatrix,
    pub rank: usize,
    /// Rays in `Z^rank`, sign canonical, in input order.
    pub vectors: Vec<VectorZ>,
}

pub fn standardize(vectors: &[VectorZ]) -> Result<StandardFace> {
    let g = vectors
        .first()
        .ok_or_else(|| Error::InvalidInput("empty face".into()))?
        .dim();
    let mut bary = RationalSymForm::zero(g);
    let one = Rat::from_integer(BigInt::from(1));
    for x in vectors {
        bary = bary.add_rank1(&x.0, &one);
    }
    let kernel: Vec<Vec<i64>> = psd_rank(&bary)
        .kernel_basis
        .into_iter()
        .map(|v| v.0)
        .collect();
    let lattice = if kernel.is_empty() {
        (0..g)
            .map(|i| (0..g).map(|j| i64::from(i == j)).collect())
            .collect()
    } else {
        intmat::integer_kernel(&kernel, g)?
    };
    let rank = lattice.len();
    let w = intmat::standardizing_transform(&lattice, g)?;
    let mut out = Vec::with_capacity(vectors.len());
    for x in vectors {
        let y = w.mul_vec(&x.0)?;
        debug_assert!(y[rank..].iter().all(|&c| c == 0));
        out.push(VectorZ(y[..rank].to_vec()).sign_canonical());
    }
    Ok(StandardFace {
        transform: w,
        rank,
        vectors: out,
    })
}

/// GL-invariant data of a set of rays `±v_i` spanning `Q^k`: with `S = Σ v vᵀ`, the
/// sorted values `v_i S⁻¹ v_i` and `|v_i S⁻¹ v_j|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceKey {
    pub dim: usize,
    pub rank: usize,
    pub nrays: usize,
    pub norms: Vec<Rat>,
    pub pairings: Vec<Rat>,
}

fn inverse_gram(vs: &[VectorZ], k: usize) -> Option<Vec<Vec<Rat>>> {
    let mut s = vec![vec![Rat::zero(); k]; k];
    for v in vs {
        for i in 0..k {
            for j in 0..k {
                s[i][j] += Rat::from_integer(BigInt::from(v.0[i] as i128 * v.0[j] as i128));
            }
        }
    }
    // Gauss-Jordan
    let mut a: Vec<Vec<Rat>> = s
        .into_iter()
        .enumerate()
        .map(|(i, mut r)| {
            r.extend((0..k).map(|j| Rat::from_integer(BigInt::from(i64::from(i == j)))));
            r
        })
        .collect();
    for c in 0..k {
        let p = (c..k).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for j in 0..2 * k {
            a[c][j] = &a[c][j] * &inv;
        }
        for i in 0..k {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * k {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[k..].to_vec()).collect())
}

fn pairing_matrix(vs: &[VectorZ], sinv: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let k = sinv.len();
    let sv: Vec<Vec<Rat>> = vs
        .iter()
        .map(|v| {
            (0..k)
                .map(|i| {
                    (0..k).fold(Rat::zero(), |acc, j| {
                        acc + &sinv[i][j] * Rat::from_integer(BigInt::from(v.0[j]))
                    })
                })
                .collect()
        })
        .collect();
    vs.iter()
        .map(|v| {
            sv.iter()
                .map(|w| {
                    (0..k).fold(Rat::zero(), |acc, i| {
                        acc + &w[i] * Rat::from_integer(BigInt::from(v.0[i]))
                    })
                })
                .collect()
        })
        .collect()
}

pub fn face_key(std: &StandardFace, dim: usize) -> FaceKey {
    let k = std.rank;
    let sinv = inverse_gram(&std.vectors, k).expect("standardized rays span");
    let p = pairing_matrix(&std.vectors, &sinv);
    let n = std.vectors.len();
    let mut norms: Vec<Rat> = (0..n).map(|i| p[i][i].clone()).collect();
    let mut pairings: Vec<Rat> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            pairings.push(p[i][j].abs());
        }
    }
    norms.sort();
    pairings.sort();
    FaceKey {
        dim,
        rank: k,
        nrays: n,
        norms,
        pairings,
    }
}

/// A `u` in GL_k(Z) with `u·a = ±b` as sets of rays, if one exists.
pub fn ray_sets_equivalent(a: &[VectorZ], b: &[VectorZ]) -> Option<IntMatrix> {
    if a.len() != b.len() || a.is_empty() {
        return None;
    }
    let k = a[0].dim();
    if b[0].dim() != k {
        return None;
    }
    let sa = inverse_gram(a, k)?;
    let sb = inverse_gram(b, k)?;
    let pa = pairing_matrix(a, &sa);
    let pb = pairing_matrix(b, &sb);
    let rows: Vec<Vec<Rat>> = a
        .iter()
        .map(|v| v.0.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect())
        .collect();
    let basis = independent_rows(&rows);
    if basis.len() != k {
        return None;
    }
    let target: BTreeSet<VectorZ> = b.iter().map(|v| v.sign_canonical()).collect();
    let mut chosen: Vec<(usize, i64)> = Vec::with_capacity(k);
    search_images(a, b, &pa, &pb, &basis, &target, &mut chosen)
}

fn search_images(
    a: &[VectorZ],
    b: &[VectorZ],
    pa: &[Vec<Rat>],
    pb: &[Vec<Rat>],
    basis: &[usize],
    target: &BTreeSet<VectorZ>,
    chosen: &mut Vec<(usize, i64)>,
) -> Option<IntMatrix> {
    let t = chosen.len();
    let k = basis.len();
    if t == k {
        return assemble(a, b, basis, chosen, target);
    }
    let bi = basis[t];
    for j in 0..b.len() {
        if chosen.iter().any(|&(c, _)| c == j) || pa[bi][bi] != pb[j][j] {
            continue;
        }
        for s in [1i64, -1] {
            let ok = chosen.iter().enumerate().all(|(tt, &(cj, cs))| {
                let want = &pa[basis[tt]][bi];
                let have = &pb[cj][j];
                if cs * s == 1 {
                    want == have
                } else {
                    *want == -have
                }
            });
            if !ok {
                continue;
            }
            chosen.push((j, s));
            if let Some(u) = search_images(a, b, pa, pb, basis, target, chosen) {
                return Some(u);
            }
            chosen.pop();
            if pb[j][j].is_zero() {
                break;
            }
        }
    }
    None
}

fn assemble(
    a: &[VectorZ],
    b: &[VectorZ],
    basis: &[usize],
    chosen: &[(usize, i64)],
    target: &BTreeSet<VectorZ>,
) -> Option<IntMatrix> {
    let k = basis.len();
    // u · A = B with A, B having the basis images as columns: u = B A⁻¹
    let acols: Vec<Vec<Rat>> = (0..k)
        .map(|i| {
            basis
                .iter()
                .map(|&bi| Rat::from_integer(BigInt::from(a[bi].0[i])))
                .collect()
        })
        .collect();
    let ainv = inverse_of(&acols)?;
    let mut data = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let mut s = Rat::zero();
            for (t, &(bj, sign)) in chosen.iter().enumerate() {
                s += Rat::from_integer(BigInt::from(sign * b[bj].0[i])) * &ainv[t][j];
            }
            if !s.is_integer() {
                return None;
            }
            data.push(i64::try_from(s.to_integer()).ok()?);
        }
    }
    let u = IntMatrix::from_flat(k, k, data);
    if !u.is_unimodular() {
        return None;
    }
    let image: BTreeSet<VectorZ> = a
        .iter()
        .map(|v| u.mul_vec(&v.0).map(|y| VectorZ(y).sign_canonical()))
        .collect::<Result<_>>()
        .ok()?;
    (image == *target).then_some(u)
}

fn inverse_of(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let k = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..k).map(|j| Rat::from_integer(BigInt::from(i64::from(i == j)))));
            row
        })
        .collect();
    for c in 0..k {
        let p = (c..k).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for j in 0..2 * k {
            a[c][j] = &a[c][j] * &inv;
        }
        for i in 0..k {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * k {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[k..].to_vec()).collect())
}

/// An element of GL_g(Z) carrying the rays `a` onto `±b`, if the two faces are
/// equivalent.
pub fn faces_equivalent(a: &[VectorZ], b: &[VectorZ]) -> Result<Option<IntMatrix>> {
    let sa = standardize(a)?;
    let sb = standardize(b)?;
    if sa.rank != sb.rank || a.len() != b.len() {
        return Ok(None);
    }
    let Some(u) = ray_sets_equivalent(&sa.vectors, &sb.vectors) else {
        return Ok(None);
    };
    let g = a[0].dim();
    let k = sa.rank;
    let mut block = IntMatrix::identity(g);
    for i in 0..k {
        for j in 0..k {
            block.set(i, j, u.get(i, j));
        }
    }
    let full = sb.transform.inverse()?.mul(&block)?.mul(&sa.transform)?;
    Ok(Some(full))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrataNode {
    pub id: usize,
    pub dim: usize,
    pub rank: usize,
    /// No proper face of a member has the same rank.
    pub minimal: bool,
    /// Number of faces in this orbit on each class representative's domain.
    pub class_counts: Vec<usize>,
    /// Rays of one member (empty for the zero face).
    pub representative: Vec<VectorZ>,
    pub representative_class: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrataPoset {
    pub g: usize,
    pub nodes: Vec<StrataNode>,
    /// `(lower, upper)`: a member of `upper` has a member of `lower` as a facet.
    pub edges: Vec<(usize, usize)>,
}

impl StrataPoset {
    pub fn covers_of(&self, node: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|e| e.0 == node)
            .map(|e| e.1)
            .collect()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

fn permute(s: RaySet, perm: &[usize]) -> RaySet {
    cone::members(s)
        .into_iter()
        .fold(0, |acc, i| acc | 1u128 << perm[i])
}

struct ClassFaces {
    domain: PerfectDomain,
    sets: Vec<RaySet>,
    index: HashMap<RaySet, usize>,
    faces: Vec<Face>,
    orbit_root: Vec<usize>,
}

/// GL_g(Z)-orbit poset of all faces of all maximal domains of an enumeration.
pub fn strata_poset(e: &Enumeration) -> Result<StrataPoset> {
    let g = e.g;
    let mut per_class: Vec<ClassFaces> = Vec::new();
    for c in &e.classes {
        let d = domain(&c.representative)?;
        let sets = cone::face_sets(d.all_rays(), &d.facet_rays);
        let index: HashMap<RaySet, usize> =
            sets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let faces: Vec<Face> = sets.iter().map(|&s| make_face(&d, c.id, s)).collect();
        // orbits under the automorphism group via its generators acting on rays
        let auts = automorphism_group(&d.form)?;
        let gens = generators_of(&auts, g)?;
        let ray_index: HashMap<&VectorZ, usize> =
            d.rays.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let perms: Vec<Vec<usize>> = gens
            .iter()
            .map(|u| {
                d.rays
                    .iter()
                    .map(|x| {
                        let y = VectorZ(u.mul_vec(&x.0)?).sign_canonical();
                        ray_index.get(&y).copied().ok_or_else(|| {
                            Error::InvalidInput("automorphism does not permute rays".into())
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut uf = UnionFind((0..sets.len()).collect());
        for (i, &s) in sets.iter().enumerate() {
            for p in &perms {
                let t = permute(s, p);
                let j = *index
                    .get(&t)
                    .ok_or_else(|| Error::InvalidInput("face image is not a face".into()))?;
                uf.union(i, j);
            }
        }
        let orbit_root: Vec<usize> = (0..sets.len()).map(|i| uf.find(i)).collect();
        per_class.push(ClassFaces {
            domain: d,
            sets,
            index,
            faces,
            orbit_root,
        });
    }

    // minimality: no proper subface of the same rank
    let minimal_of = |cf: &ClassFaces, i: usize| -> bool {
        let f = &cf.faces[i];
        let s = cf.sets[i];
        !cf.faces.iter().zip(&cf.sets).any(|(o, &t)| {
            t != s && t & s == t && o.barycenter_rank == f.barycenter_rank
        })
    };

    // fuse class-level orbits across classes
    struct Proto {
        key: FaceKey,
        minimal: bool,
        rep: (usize, usize),
        vectors: Vec<VectorZ>,
    }
    let mut protos: Vec<Proto> = Vec::new();
    let mut by_key: BTreeMap<FaceKey, Vec<usize>> = BTreeMap::new();
    // (class, class-local orbit root) -> proto id
    let mut proto_of: HashMap<(usize, usize), usize> = HashMap::new();
    for (ci, cf) in per_class.iter().enumerate() {
        let mut roots: Vec<usize> = cf.orbit_root.clone();
        roots.sort_unstable();
        roots.dedup();
        for r in roots {
            let f = &cf.faces[r];
            let vs = f.vectors(&cf.domain);
            let std = standardize(&vs)?;
            let key = face_key(&std, f.dim);
            let mut found = None;
            if let Some(cands) = by_key.get(&key) {
                for &pid in cands {
                    if ray_sets_equivalent(&std.vectors, &standardize(&protos[pid].vectors)?.vectors)
                        .is_some()
                    {
                        found = Some(pid);
                        break;
                    }
                }
            }
            let pid = match found {
                Some(p) => p,
                None => {
                    let pid = protos.len();
                    protos.push(Proto {
                        key: key.clone(),
                        minimal: minimal_of(cf, r),
                        rep: (ci, r),
                        vectors: vs,
                    });
                    by_key.entry(key).or_default().push(pid);
                    pid
                }
            };
            proto_of.insert((ci, r), pid);
        }
    }

    // canonical node order: zero face first, then by (dim, rank, key, discovery)
    let mut order: Vec<usize> = (0..protos.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (&protos[a], &protos[b]);
        (pa.key.dim, pa.key.rank, &pa.key, a).cmp(&(pb.key.dim, pb.key.rank, &pb.key, b))
    });
    let mut node_of_proto = vec![0usize; protos.len()];
    for (pos, &p) in order.iter().enumerate() {
        node_of_proto[p] = pos + 1;
    }
    let nclasses = per_class.len();
    let mut nodes = vec![StrataNode {
        id: 0,
        dim: 0,
        rank: 0,
        minimal: true,
        class_counts: vec![1; nclasses],
        representative: Vec::new(),
        representative_class: None,
    }];
    for (pos, &p) in order.iter().enumerate() {
        let pr = &protos[p];
        nodes.push(StrataNode {
            id: pos + 1,
            dim: pr.key.dim,
            rank: pr.key.rank,
            minimal: pr.minimal,
            class_counts: vec![0; nclasses],
            representative: pr.vectors.clone(),
            representative_class: Some(pr.rep.0),
        });
    }
    let node_of_face = |ci: usize, i: usize| -> usize {
        let root = per_class[ci].orbit_root[i];
        node_of_proto[proto_of[&(ci, root)]]
    };
    for (ci, cf) in per_class.iter().enumerate() {
        for i in 0..cf.sets.len() {
            nodes[node_of_face(ci, i)].class_counts[ci] += 1;
        }
    }

    // covering edges from each class-level orbit representative
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (ci, cf) in per_class.iter().enumerate() {
        let mut roots: Vec<usize> = cf.orbit_root.clone();
        roots.sort_unstable();
        roots.dedup();
        for r in roots {
            let s = cf.sets[r];
            let upper = node_of_face(ci, r);
            let dim = cf.faces[r].dim;
            if dim == 1 {
                edges.insert((0, upper));
                continue;
            }
            for &h in &cf.domain.facet_rays {
                let t = s & h;
                if t == s || t == 0 {
                    continue;
                }
                let Some(&j) = cf.index.get(&t) else { continue };
                if cf.faces[j].dim + 1 == dim {
                    edges.insert((node_of_face(ci, j), upper));
                }
            }
        }
    }
    Ok(StrataPoset {
        g,
        nodes,
        edges: edges.into_iter().collect(),
    })
}

/// Strata poset for dimension `g`, enumerating the perfect forms first.
pub fn strata_poset_for(g: usize) -> Result<StrataPoset> {
    strata_poset(&enumerate_perfect(g, EnumerateOptions::default())?)
}

/// Restriction of a poset to the nodes of rank at most `max_rank`.
pub fn restrict_to_rank(p: &StrataPoset, max_rank: usize) -> StrataPoset {
    let keep: Vec<usize> = p
        .nodes
        .iter()
        .filter(|n| n.rank <= max_rank)
        .map(|n| n.id)
        .collect();
    let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let nodes = keep
        .iter()
        .enumerate()
        .map(|(i, &n)| StrataNode {
            id: i,
            ..p.nodes[n].clone()
        })
        .collect();
    let edges = p
        .edges
        .iter()
        .filter_map(|&(a, b)| Some((*pos.get(&a)?, *pos.get(&b)?)))
        .collect();
    StrataPoset {
        g: p.g,
        nodes,
        edges,
    }
}

/// Isomorphism of posets preserving the labels (dim, rank, minimal) and the edges.
pub fn labeled_isomorphic(a: &StrataPoset, b: &StrataPoset) -> bool {
    if a.nodes.len() != b.nodes.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    let label = |n: &StrataNode| (n.dim, n.rank, n.minimal);
    let mut la: Vec<_> = a.nodes.iter().map(label).collect();
    let mut lb: Vec<_> = b.nodes.iter().map(label).collect();
    la.sort();
    lb.sort();
    if la != lb {
        return false;
    }
    let eb: BTreeSet<(usize, usize)> = b.edges.iter().copied().collect();
    let mut map = vec![usize::MAX; a.nodes.len()];
    let mut used = vec![false; b.nodes.len()];
    iso_extend(a, b, &eb, 0, &mut map, &mut used)
}

fn iso_extend(
    a: &StrataPoset,
    b: &StrataPoset,
    eb: &BTreeSet<(usize, usize)>,
    i: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    if i == a.nodes.len() {
        return a.edges.iter().all(|&(x, y)| eb.contains(&(map[x], map[y])));
    }
    let na = &a.nodes[i];
    for j in 0..b.nodes.len() {
        let nb = &b.nodes[j];
        if used[j] || (na.dim, na.rank, na.minimal) != (nb.dim, nb.rank, nb.minimal) {
            continue;
        }
        // edges among already mapped nodes must agree
        let consistent = a.edges.iter().all(|&(x, y)| {
            let (mx, my) = (
                if x == i { j } else { map[x] },
                if y == i { j } else { map[y] },
            );
            if (x == i || x < i) && (y == i || y < i) {
                eb.contains(&(mx, my))
            } else {
                true
            }
        });
        if !consistent {
            continue;
        }
        map[i] = j;
        used[j] = true;
        if iso_extend(a, b, eb, i + 1, map, used) {
            return true;
        }
        used[j] = false;
        map[i] = usize::MAX;
    }
    false
}

/// For each maximal perfect cone σ in rank `r`, the cones of the rank-`(r+1)`
/// decomposition that cover a copy of σ have dimension `dim σ + 1` and form a single
/// GL_{r+1}(Z)-orbit.
pub fn codim_complement_check(g: usize, r: usize) -> Result<bool> {
    if r == 0 {
        return Ok(true);
    }
    if r >= g {
        return Err(Error::InvalidInput(format!("rank {r} must be below {g}")));
    }
    let lower = enumerate_perfect(r, EnumerateOptions::default())?;
    let poset = strata_poset_for(r + 1)?;
    let top = sym_dim(r);
    let sigmas: Vec<&StrataNode> = poset
        .nodes
        .iter()
        .filter(|n| n.rank == r && n.dim == top)
        .collect();
    if sigmas.len() != lower.classes.len() {
        return Ok(false);
    }
    for s in sigmas {
        let covers = poset.covers_of(s.id);
        if covers.len() != 1 {
            return Ok(false);
        }
        let t = &poset.nodes[covers[0]];
        if t.dim != s.dim + 1 || t.rank != r + 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `vs` spans a lattice of full rank `k = vs[0].dim()`.
pub fn spans(vs: &[VectorZ]) -> bool {
    vs.first().is_some_and(|v| vectors_rank(vs) == v.dim())
}
