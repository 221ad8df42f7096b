//! Perfect forms: perfection test, Voronoi domains, the facet-crossing neighbour
//! step, enumeration of perfect forms up to GL_g(Z)-equivalence, and reduction of
//! positive semi-definite forms into the perfect-cone decomposition.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::Rat;
use crate::cone::{self, RaySet};
use crate::equivalence::{
    automorphism_group, equivalent_prefiltered, fingerprint, Fingerprint, Unimodular,
};
use crate::error::{Error, Result};
use crate::forms::{
    psd_rank, rank1_coords, rank1_span_dim, trace_pair, ConicCombination, RationalSymForm,
    SymForm, VectorZ,
};
use crate::intmat::{self, IntMatrix};
use crate::minvec::{min_data, size_reduce, vectors_up_to_rational, MinData};

/// Default largest dimension accepted by [`enumerate_perfect`] without `force`.
pub const MAX_ENUMERATION_DIM: usize = 6;

/// Number of the coordinates of a symmetric `g × g` matrix.
pub fn sym_dim(g: usize) -> usize {
    g * (g + 1) / 2
}

/// The Voronoi domain of a perfect form: the cone on `x xᵀ` over its minimal vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerfectDomain {
    pub form: SymForm,
    pub min_norm: i64,
    pub rays: Vec<VectorZ>,
    pub span_dim: usize,
    /// Primitive integral `H` with `H(x) >= 0` on every ray, zero exactly on the facet.
    pub facet_normals: Vec<SymForm>,
    /// Rays on each facet.
    pub facet_rays: Vec<RaySet>,
}

impl PerfectDomain {
    pub fn all_rays(&self) -> RaySet {
        cone::full_set(self.rays.len())
    }

    pub fn facet_normal_rational(&self, i: usize) -> RationalSymForm {
        self.facet_normals[i].to_rational()
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.span_dim
    }
}

fn perfect_from_min(md: &MinData) -> bool {
    rank1_span_dim(&md.vectors) == sym_dim(md.form.dim())
}

/// Whether the rank-1 forms on the minimal vectors span all symmetric matrices.
pub fn is_perfect(q: &SymForm) -> Result<bool> {
    Ok(perfect_from_min(&min_data(q)?))
}

/// The Voronoi domain `D(q)` with its complete, irredundant facet list.
pub fn domain(q: &SymForm) -> Result<PerfectDomain> {
    let md = min_data(q)?;
    domain_from_min(md)
}

pub(crate) fn domain_from_min(md: MinData) -> Result<PerfectDomain> {
    if !perfect_from_min(&md) {
        return Err(Error::NotPerfect);
    }
    let g = md.form.dim();
    let gens: Vec<Vec<i64>> = md.vectors.iter().map(|x| rank1_coords(&x.0)).collect();
    let cf = cone::facets(&gens)?;
    let mut facets: Vec<(SymForm, RaySet)> = cf
        .facets
        .into_iter()
        .map(|f| {
            let c = f
                .normal
                .iter()
                .map(|x| x.to_i64().ok_or(Error::Overflow("facet normal")))
                .collect::<Result<Vec<_>>>()?;
            Ok((SymForm::from_coords(g, &c), f.rays))
        })
        .collect::<Result<_>>()?;
    facets.sort_by(|a, b| a.0.entries().cmp(b.0.entries()));
    Ok(PerfectDomain {
        form: md.form,
        min_norm: md.min_norm,
        rays: md.vectors,
        span_dim: cf.dim,
        facet_normals: facets.iter().map(|f| f.0.clone()).collect(),
        facet_rays: facets.iter().map(|f| f.1).collect(),
    })
}

const MAX_DOUBLINGS: usize = 200;

/// The perfect form across facet `facet` of `d`, scaled to a primitive integral matrix.
pub fn neighbor(d: &PerfectDomain, facet: usize) -> Result<SymForm> {
    let h = d
        .facet_normals
        .get(facet)
        .ok_or(Error::InvalidFacet(facet))?
        .to_rational();
    let q = d.form.to_rational();
    let m = Rat::from_integer(BigInt::from(d.min_norm));
    let rho = crossing_step(&q, &m, &h)?.ok_or(Error::FacetUnbounded(facet))?;
    let f = q.add(&h.scale(&rho))?;
    let (out, _) = f.clear_denominators()?;
    let md = min_data(&out)?;
    let new_side = md.vectors.iter().any(|x| h.eval(&x.0).is_negative());
    if !new_side || !perfect_from_min(&md) {
        return Err(Error::NotPerfect);
    }
    Ok(out)
}

/// Largest `ρ` such that `q + ρ·h` still has minimum `m`, where `h` vanishes on the
/// minimal vectors of `q`. `None` if no vector with `h(x) < 0` is ever reached.
pub(crate) fn crossing_step(
    q: &RationalSymForm,
    m: &Rat,
    h: &RationalSymForm,
) -> Result<Option<Rat>> {
    let mut upper = Rat::one();
    let mut steps = 0usize;
    // Bracket: find u where some vector with H(x) < 0 reaches the minimum.
    let mut rho = loop {
        steps += 1;
        if steps > MAX_DOUBLINGS {
            return Ok(None);
        }
        let f = q.add(&h.scale(&upper))?;
        let pr = psd_rank(&f);
        if !(pr.is_psd && pr.rank == f.dim()) {
            upper /= Rat::from_integer(BigInt::from(2));
            continue;
        }
        let close = vectors_up_to_rational(&f, m)?;
        let crossing: Vec<&VectorZ> = close
            .iter()
            .filter(|(x, _)| h.eval(&x.0).is_negative())
            .map(|(x, _)| x)
            .collect();
        if crossing.is_empty() {
            upper *= Rat::from_integer(BigInt::from(2));
            continue;
        }
        break crossing_parameter(q, h, m, crossing.into_iter());
    };
    // Shrink until no vector drops below the minimum.
    loop {
        steps += 1;
        if steps > 4 * MAX_DOUBLINGS {
            return Err(Error::SearchOverflow(
                "no stable crossing parameter".into(),
            ));
        }
        let f = q.add(&h.scale(&rho))?;
        let below: Vec<VectorZ> = vectors_up_to_rational(&f, m)?
            .into_iter()
            .filter(|(_, v)| v < m)
            .map(|(x, _)| x)
            .collect();
        if below.is_empty() {
            return Ok(Some(rho));
        }
        let next = crossing_parameter(q, h, m, below.iter());
        debug_assert!(next < rho);
        rho = next;
    }
}

/// `min (q(x) - m) / (-H(x))` over the given vectors (all with `H(x) < 0`).
fn crossing_parameter<'a>(
    q: &RationalSymForm,
    h: &RationalSymForm,
    m: &Rat,
    xs: impl Iterator<Item = &'a VectorZ>,
) -> Rat {
    xs.filter_map(|x| {
        let hx = h.eval(&x.0);
        if hx.is_negative() {
            Some((q.eval(&x.0) - m) / -hx)
        } else {
            None
        }
    })
    .min()
    .expect("at least one crossing vector")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborEdge {
    /// Facet of the class representative's domain (the smallest index in its orbit).
    pub facet: usize,
    pub orbit_size: usize,
    pub class_id: usize,
    /// `witnessᵀ · neighbour · witness` is the representative of `class_id`.
    pub witness: Unimodular,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectClass {
    pub id: usize,
    pub representative: SymForm,
    pub fingerprint: Fingerprint,
    pub min_norm: i64,
    pub pair_count: usize,
    pub aut_order: u64,
    pub facet_count: usize,
    pub facet_orbits: Vec<Vec<usize>>,
    pub neighbors: Vec<NeighborEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enumeration {
    pub g: usize,
    pub classes: Vec<PerfectClass>,
}

impl Enumeration {
    /// Undirected adjacency of the neighbour graph, deduplicated.
    pub fn adjacency(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .classes
            .iter()
            .flat_map(|c| c.neighbors.iter().map(move |e| (c.id.min(e.class_id), c.id.max(e.class_id))))
            .collect();
        edges.sort();
        edges.dedup();
        edges
    }

    /// Identify the class of a perfect form, with `u` such that `uᵀ q u` is the representative.
    pub fn classify(&self, q: &SymForm) -> Result<Option<(usize, Unimodular)>> {
        if q.dim() != self.g {
            return Err(Error::DimensionMismatch {
                expected: self.g,
                found: q.dim(),
            });
        }
        let (prim, _) = q.to_rational().clear_denominators()?;
        let fp = fingerprint(&prim)?;
        for c in &self.classes {
            if c.fingerprint != fp {
                continue;
            }
            if let Some(u) = equivalent_prefiltered(&prim, &c.representative)? {
                return Ok(Some((c.id, u)));
            }
        }
        Ok(None)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EnumerateOptions {
    pub force: bool,
}

/// Facet orbits under the automorphism group. Each orbit is sorted; orbits are
/// ordered by their smallest member.
pub fn facet_orbits(d: &PerfectDomain, auts: &[IntMatrix]) -> Result<Vec<Vec<usize>>> {
    let index: HashMap<&SymForm, usize> = d
        .facet_normals
        .iter()
        .enumerate()
        .map(|(i, h)| (h, i))
        .collect();
    let mut orbit_of = vec![usize::MAX; d.facet_normals.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..d.facet_normals.len() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut orbit = Vec::new();
        for u in auts {
            let image = d.facet_normals[i].transform(u)?;
            let j = *index.get(&image).ok_or_else(|| {
                Error::InvalidInput("automorphism does not permute the facets".into())
            })?;
            if orbit_of[j] == usize::MAX {
                orbit_of[j] = id;
                orbit.push(j);
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    Ok(orbits)
}

/// All perfect forms in `g` variables up to GL_g(Z)-equivalence, by breadth-first
/// search over facet crossings starting at the root form `A_g`.
pub fn enumerate_perfect(g: usize, opts: EnumerateOptions) -> Result<Enumeration> {
    if g == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if g > MAX_ENUMERATION_DIM && !opts.force {
        return Err(Error::DimensionTooLarge(g, MAX_ENUMERATION_DIM));
    }
    let root = SymForm::root_a(g);
    let mut reps: Vec<SymForm> = vec![root.clone()];
    let mut fps: Vec<Fingerprint> = vec![fingerprint(&root)?];
    let mut classes: Vec<PerfectClass> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(cid) = queue.pop_front() {
        let rep = reps[cid].clone();
        let d = domain(&rep)?;
        let auts = automorphism_group(&rep)?;
        let orbits = facet_orbits(&d, &auts)?;
        let crossed: Vec<SymForm> = orbits
            .par_iter()
            .map(|o| neighbor(&d, o[0]))
            .collect::<Result<_>>()?;
        let mut edges = Vec::with_capacity(orbits.len());
        for (orbit, nb) in orbits.iter().zip(crossed) {
            let fp = fingerprint(&nb)?;
            let mut hit = None;
            for (j, r) in reps.iter().enumerate() {
                if fps[j] != fp {
                    continue;
                }
                if let Some(u) = equivalent_prefiltered(&nb, r)? {
                    hit = Some((j, u));
                    break;
                }
            }
            let (target, witness) = match hit {
                Some(h) => h,
                None => {
                    let (reduced, w) = size_reduce(&nb);
                    let id = reps.len();
                    reps.push(reduced);
                    fps.push(fp);
                    queue.push_back(id);
                    (id, Unimodular::new(w)?)
                }
            };
            edges.push(NeighborEdge {
                facet: orbit[0],
                orbit_size: orbit.len(),
                class_id: target,
                witness,
            });
        }
        classes.push(PerfectClass {
            id: cid,
            representative: rep,
            fingerprint: fps[cid].clone(),
            min_norm: d.min_norm,
            pair_count: d.rays.len(),
            aut_order: auts.len() as u64,
            facet_count: d.facet_normals.len(),
            facet_orbits: orbits,
            neighbors: edges,
        });
    }
    classes.sort_by_key(|c| c.id);
    Ok(Enumeration { g, classes })
}

/// Result of locating a positive semi-definite form in the decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    /// Perfect form whose domain contains the input.
    pub form: SymForm,
    pub min_norm: i64,
    pub class_id: Option<usize>,
    /// Rays of `D(form)` spanning the smallest face containing the input.
    pub face: Vec<VectorZ>,
    pub combination: ConicCombination,
    /// `trace_pair(q, f) / min(q)` at each visited perfect form.
    pub objective: Vec<Rat>,
}

fn objective(q: &SymForm, m: i64, f: &RationalSymForm) -> Result<Rat> {
    Ok(trace_pair(&q.to_rational(), f)? / Rat::from_integer(BigInt::from(m)))
}

/// Walk from `A_g` across facets whose functional is negative on `f` until `f` lies in
/// the current domain; then express `f` as a positive combination of that domain's rays.
pub fn reduce(f: &RationalSymForm, classes: Option<&Enumeration>) -> Result<Reduction> {
    reduce_from(f, &SymForm::root_a(f.dim()), classes)
}

pub fn reduce_from(
    f: &RationalSymForm,
    start: &SymForm,
    classes: Option<&Enumeration>,
) -> Result<Reduction> {
    Reducer::default().reduce_from(f, start, classes)
}

/// Reduction with memoised domains and neighbours, for many reductions in one dimension.
#[derive(Default)]
pub struct Reducer {
    domains: HashMap<SymForm, PerfectDomain>,
    neighbors: HashMap<(SymForm, usize), SymForm>,
}

impl Reducer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn domain(&mut self, q: &SymForm) -> Result<&PerfectDomain> {
        if !self.domains.contains_key(q) {
            let d = domain(q)?;
            self.domains.insert(q.clone(), d);
        }
        Ok(&self.domains[q])
    }

    fn neighbor(&mut self, q: &SymForm, facet: usize) -> Result<SymForm> {
        let key = (q.clone(), facet);
        if let Some(n) = self.neighbors.get(&key) {
            return Ok(n.clone());
        }
        let n = neighbor(self.domain(q)?, facet)?;
        self.neighbors.insert(key, n.clone());
        Ok(n)
    }

    pub fn reduce(&mut self, f: &RationalSymForm, classes: Option<&Enumeration>) -> Result<Reduction> {
        self.reduce_from(f, &SymForm::root_a(f.dim()), classes)
    }

    pub fn reduce_from(
        &mut self,
        f: &RationalSymForm,
        start: &SymForm,
        classes: Option<&Enumeration>,
    ) -> Result<Reduction> {
        let pr = psd_rank(f);
        if !pr.is_psd {
            return Err(Error::NotPsd);
        }
        if f.is_zero() {
            return Err(Error::InvalidInput("cannot reduce the zero form".into()));
        }
        if start.dim() != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: start.dim(),
                found: f.dim(),
            });
        }
        let mut q = start.clone();
        let mut trace = Vec::new();
        loop {
            let d = self.domain(&q)?;
            let obj = objective(&q, d.min_norm, f)?;
            if let Some(prev) = trace.last() {
                if &obj >= prev {
                    return Err(Error::SearchOverflow(
                        "reduction objective failed to decrease".into(),
                    ));
                }
            }
            trace.push(obj);
            let mut exit = None;
            for (i, h) in d.facet_normals.iter().enumerate() {
                if trace_pair(&h.to_rational(), f)?.is_negative() {
                    exit = Some(i);
                    break;
                }
            }
            match exit {
                None => break,
                Some(i) => q = self.neighbor(&q, i)?,
            }
        }
        let d = &self.domains[&q];
        let (face, combination) = decompose_in_domain(d, f)?;
        let class_id = match classes {
            Some(e) => e.classify(&d.form)?.map(|(id, _)| id),
            None => None,
        };
        Ok(Reduction {
            form: d.form.clone(),
            min_norm: d.min_norm,
            class_id,
            face,
            combination,
            objective: trace,
        })
    }
}

/// A perfect form `Q` with `Min(f) ⊆ Min(Q)`, reached by repeatedly moving `f` along a
/// direction that vanishes on its current minimal vectors until new ones appear.
pub fn perfect_above(f: &RationalSymForm) -> Result<SymForm> {
    let pr = psd_rank(f);
    if !(pr.is_psd && pr.rank == f.dim()) {
        return Err(Error::NotPositiveDefinite);
    }
    let g = f.dim();
    let (mut cur, _) = f.clear_denominators()?;
    for _ in 0..=sym_dim(g) {
        let md = min_data(&cur)?;
        if perfect_from_min(&md) {
            return Ok(cur);
        }
        let rows: Vec<Vec<i64>> = md.vectors.iter().map(|x| rank1_coords(&x.0)).collect();
        let kernel = intmat::integer_kernel(&rows, sym_dim(g))?;
        let c = kernel
            .first()
            .ok_or_else(|| Error::InvalidInput("minimal vectors already span".into()))?;
        let mut h = SymForm::from_coords(g, c).to_rational();
        if psd_rank(&h).is_psd {
            h = h.scale(&-Rat::one());
        }
        let q = cur.to_rational();
        let m = Rat::from_integer(BigInt::from(md.min_norm));
        let rho = crossing_step(&q, &m, &h)?
            .ok_or_else(|| Error::SearchOverflow("perfection walk did not terminate".into()))?;
        cur = q.add(&h.scale(&rho))?.clear_denominators()?.0;
    }
    Err(Error::SearchOverflow("perfection walk exceeded its step bound".into()))
}

/// Generators of the smallest face of `d` containing `f`, and `f` as a positive
/// combination of some of them. Requires `f ∈ D(q)`.
pub fn decompose_in_domain(
    d: &PerfectDomain,
    f: &RationalSymForm,
) -> Result<(Vec<VectorZ>, ConicCombination)> {
    let normals: Vec<RationalSymForm> = d.facet_normals.iter().map(|h| h.to_rational()).collect();
    let values = |x: &RationalSymForm| -> Result<Vec<Rat>> {
        normals.iter().map(|h| trace_pair(h, x)).collect()
    };
    let all = d.all_rays();
    let support = |vals: &[Rat]| -> RaySet {
        vals.iter()
            .zip(&d.facet_rays)
            .filter(|(v, _)| v.is_zero())
            .fold(all, |acc, (_, &r)| acc & r)
    };
    let init_vals = values(f)?;
    if init_vals.iter().any(|v| v.is_negative()) {
        return Err(Error::InvalidInput("form is not in the domain".into()));
    }
    let face = support(&init_vals);
    let mut rays = Vec::new();
    let mut coeffs = Vec::new();
    let mut cur = f.clone();
    let mut vals = init_vals;
    while !cur.is_zero() {
        let s = support(&vals);
        let Some(&r) = cone::members(s).first() else {
            return Err(Error::InvalidInput("form is not in the domain".into()));
        };
        let x = &d.rays[r];
        let t = if normals.is_empty() {
            // one-dimensional domain: cur is a multiple of x xᵀ
            let i = x.0.iter().position(|&c| c != 0).expect("nonzero ray");
            cur.get(i, i) / Rat::from_integer(BigInt::from(x.0[i] * x.0[i]))
        } else {
            normals
                .iter()
                .zip(&vals)
                .filter_map(|(h, v)| {
                    let hx = h.eval(&x.0);
                    hx.is_positive().then(|| v / hx)
                })
                .min()
                .ok_or_else(|| Error::InvalidInput("degenerate domain".into()))?
        };
        if !t.is_positive() {
            return Err(Error::InvalidInput("form is not in the domain".into()));
        }
        cur = cur.add_rank1(&x.0, &-t.clone());
        rays.push(x.clone());
        coeffs.push(t);
        vals = values(&cur)?;
        if vals.iter().any(|v| v.is_negative()) {
            return Err(Error::InvalidInput("pulling step left the domain".into()));
        }
    }
    let combination = ConicCombination {
        rays,
        coeffs,
        target: f.clone(),
    };
    debug_assert!(combination.is_valid());
    Ok((
        cone::members(face).into_iter().map(|i| d.rays[i].clone()).collect(),
        combination,
    ))
}

/// Size-reduced, sign-normalised copy used when a form is stored as a representative.
pub fn normalized(q: &SymForm) -> SymForm {
    size_reduce(q).0
}
