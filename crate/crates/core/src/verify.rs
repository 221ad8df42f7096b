//! Checkers for the structure of the perfect boundary. Each produces a [`Certificate`]
//! whose payload can be re-verified by [`recheck`] with form arithmetic only.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd_i64, Rat};
use crate::cone;
use crate::error::{Error, Result};
use crate::facelattice::{standardize, strata_poset};
use crate::forms::{
    evaluate, psd_rank, psd_rank_int, rank1, rank1_coords, rank1_span_dim, trace_pair,
    vectors_rank, ConicCombination, RationalSymForm, SymForm, VectorZ,
};
use crate::intmat::IntMatrix;
use crate::jsonfmt::rat_serde;
use crate::minvec::{min_data, min_data_rational};
use crate::voronoi::{
    domain, enumerate_perfect, is_perfect, perfect_above, sym_dim, EnumerateOptions,
    Enumeration, Reducer,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Claim {
    #[serde(rename = "BC-RAYS")]
    BcRays,
    #[serde(rename = "BC-INTERIOR")]
    BcInterior,
    #[serde(rename = "PRODUCT")]
    Product,
    #[serde(rename = "CLOSURE")]
    Closure,
    #[serde(rename = "CODIM1")]
    Codim1,
}

impl Claim {
    pub const ALL: [Claim; 5] = [
        Claim::BcRays,
        Claim::BcInterior,
        Claim::Product,
        Claim::Closure,
        Claim::Codim1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Claim::BcRays => "BC-RAYS",
            Claim::BcInterior => "BC-INTERIOR",
            Claim::Product => "PRODUCT",
            Claim::Closure => "CLOSURE",
            Claim::Codim1 => "CODIM1",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Claim::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown claim {s}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: Claim,
    pub verdict: Verdict,
    /// False for guard inputs on which the claim is expected not to hold.
    pub asserted: bool,
    pub inputs: serde_json::Value,
    pub detail: String,
    pub witness: Witness,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// A FAIL on an input for which the claim is asserted.
    pub fn is_violation(&self) -> bool {
        self.asserted && self.verdict == Verdict::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayDomain {
    pub class_id: usize,
    pub form: SymForm,
    pub min_norm: i64,
    pub rays: Vec<VectorZ>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryFace {
    /// Face rays first, then the remaining rays of the input.
    pub ordered_rays: Vec<VectorZ>,
    /// Longest prefix whose forms have a sum of rank below the ambient rank.
    pub t: usize,
    pub rank: usize,
    /// Vanishes exactly on the first `t` rays, so `v vᵀ` supports the face.
    pub kernel: VectorZ,
    pub transform: IntMatrix,
    pub standardized: Vec<VectorZ>,
    /// Perfect form in `rank` variables whose domain has `standardized` as a face.
    pub perfect: SymForm,
    pub perfect_min_norm: i64,
    pub perfect_rays: Vec<VectorZ>,
    /// Nonnegative on `perfect_rays`, zero exactly on `standardized`.
    pub support: SymForm,
    pub minimal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodimCone {
    pub ray: VectorZ,
    /// `λ·q(x' - x_last·y') + x_last²`, minimal exactly on this cone's rays.
    pub defining_form: RationalSymForm,
    /// Element of the parabolic subgroup (first rows form the identity) carrying the
    /// reference cone to this one: `Sᵀ` maps reference rays to these rays.
    pub shear: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    RankOneRays {
        domains: Vec<RayDomain>,
    },
    Interior {
        form: SymForm,
        rank: usize,
        perfect: SymForm,
        min_norm: i64,
        #[serde(with = "rat_serde")]
        value: Rat,
        combination: ConicCombination,
    },
    Product {
        p: SymForm,
        q: SymForm,
        r: SymForm,
        min_norm: i64,
        min_p: Vec<VectorZ>,
        min_q: Vec<VectorZ>,
        min_r: Vec<VectorZ>,
        perfect: SymForm,
        perfect_min_norm: i64,
        perfect_rays: Vec<VectorZ>,
        support: RationalSymForm,
        method: String,
    },
    Closure {
        rank: usize,
        rays: Vec<VectorZ>,
        input_minimal: bool,
        boundary: Vec<BoundaryFace>,
    },
    Codim {
        q: SymForm,
        min_norm: i64,
        #[serde(with = "rat_serde")]
        lambda: Rat,
        bound: i64,
        candidates: usize,
        degenerate_rejected: usize,
        sigma_rays: Vec<VectorZ>,
        reference: RationalSymForm,
        cones: Vec<CodimCone>,
        /// Over-cones of dimension `dim σ + 1` with more than one extra ray.
        irregular: Vec<Vec<VectorZ>>,
    },
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serialisable input")
}

fn canon_set(vs: &[VectorZ]) -> BTreeSet<VectorZ> {
    vs.iter().map(|v| v.sign_canonical()).collect()
}

fn sum_rank1(vs: &[VectorZ], g: usize) -> RationalSymForm {
    let one = Rat::one();
    vs.iter()
        .fold(RationalSymForm::zero(g), |acc, x| acc.add_rank1(&x.0, &one))
}

// ---------------------------------------------------------------------------------

/// Every ray of every class domain is `x xᵀ` for a primitive `x`.
pub fn check_rank1_rays(e: &Enumeration) -> Result<Certificate> {
    let mut domains = Vec::with_capacity(e.classes.len());
    let mut bad = Vec::new();
    for c in &e.classes {
        let d = domain(&c.representative)?;
        for x in &d.rays {
            let r = psd_rank_int(&rank1(x)?);
            if !x.is_primitive() || r.rank != 1 || !r.is_psd {
                bad.push(format!("class {} ray {:?}", c.id, x.0));
            }
        }
        domains.push(RayDomain {
            class_id: c.id,
            form: d.form.clone(),
            min_norm: d.min_norm,
            rays: d.rays.clone(),
        });
    }
    let total: usize = domains.iter().map(|d| d.rays.len()).sum();
    let detail = if bad.is_empty() {
        format!(
            "{} classes, {total} rays, all primitive rank-1 forms",
            domains.len()
        )
    } else {
        format!("non-primitive rays: {}", bad.join(", "))
    };
    Ok(Certificate {
        claim: Claim::BcRays,
        verdict: verdict(bad.is_empty()),
        asserted: true,
        inputs: serde_json::json!({ "g": e.g }),
        detail,
        witness: Witness::RankOneRays { domains },
    })
}

/// Hull support value of a psd form: `min_q trace_pair(q, f) / min(q)`, attained on
/// the perfect form whose domain contains `f`. PASS iff rank ≥ 2 and the value
/// exceeds 1. Rank-1 inputs yield a FAIL certificate marked as not asserted.
pub fn check_interior(f: &SymForm) -> Result<Certificate> {
    check_interior_with(f, &mut Reducer::new())
}

pub fn check_interior_with(f: &SymForm, reducer: &mut Reducer) -> Result<Certificate> {
    let pr = psd_rank_int(f);
    if !pr.is_psd {
        return Err(Error::NotPsd);
    }
    if pr.rank == 0 {
        return Err(Error::RankTooLow(0));
    }
    let red = reducer.reduce(&f.to_rational(), None)?;
    let value = red.combination.total_weight();
    let expected = trace_pair(&red.form.to_rational(), &f.to_rational())?
        / Rat::from_integer(BigInt::from(red.min_norm));
    if expected != value {
        return Err(Error::InvalidInput(
            "combination weight differs from the support value".into(),
        ));
    }
    let ok = pr.rank >= 2 && value > Rat::one();
    let detail = format!("rank {}, support value {}", pr.rank, value);
    Ok(Certificate {
        claim: Claim::BcInterior,
        verdict: verdict(ok),
        asserted: pr.rank >= 2,
        inputs: serde_json::json!({ "form": json(f) }),
        detail,
        witness: Witness::Interior {
            form: f.clone(),
            rank: pr.rank,
            perfect: red.form,
            min_norm: red.min_norm,
            value,
            combination: red.combination,
        },
    })
}

/// `p ⊕ q` for perfect `p`, `q` of equal minimum: its minimal vectors are the embedded
/// union, and they span a face of some perfect domain in `m + n` variables.
pub fn check_product(p: &SymForm, q: &SymForm) -> Result<Certificate> {
    if !is_perfect(p)? || !is_perfect(q)? {
        return Err(Error::NotPerfect);
    }
    let mp = min_data(p)?;
    let mq = min_data(q)?;
    if mp.min_norm != mq.min_norm {
        return Err(Error::MinNormMismatch(
            mp.min_norm.to_string(),
            mq.min_norm.to_string(),
        ));
    }
    let (m, n) = (p.dim(), q.dim());
    let r = p.direct_sum(q);
    let mr = min_data(&r)?;
    let embedded: BTreeSet<VectorZ> = mp
        .vectors
        .iter()
        .map(|x| VectorZ(x.0.iter().copied().chain(std::iter::repeat(0).take(n)).collect()))
        .chain(mq.vectors.iter().map(|y| {
            VectorZ(std::iter::repeat(0).take(m).chain(y.0.iter().copied()).collect())
        }))
        .map(|v| v.sign_canonical())
        .collect();
    let union_ok = embedded == canon_set(&mr.vectors);

    let bary = sum_rank1(&mr.vectors, m + n);
    let red = Reducer::new().reduce(&bary, None)?;
    let contains = |qq: &SymForm| -> Result<Option<(i64, Vec<VectorZ>)>> {
        let md = min_data(qq)?;
        let have = canon_set(&md.vectors);
        Ok(mr
            .vectors
            .iter()
            .all(|x| have.contains(&x.sign_canonical()))
            .then_some((md.min_norm, md.vectors)))
    };
    let (perfect, method, (pm, prays)) = match contains(&red.form)? {
        Some(found) => (red.form.clone(), "reduce", found),
        None => {
            let walked = perfect_above(&r.to_rational())?;
            let found = contains(&walked)?.ok_or_else(|| {
                Error::InvalidInput("perfection walk lost a minimal vector".into())
            })?;
            (walked, "walk", found)
        }
    };
    let support = r
        .to_rational()
        .scale(&Rat::new(BigInt::one(), BigInt::from(mr.min_norm)))
        .sub(&perfect
            .to_rational()
            .scale(&Rat::new(BigInt::one(), BigInt::from(pm))))?;
    let zeros: BTreeSet<VectorZ> = prays
        .iter()
        .filter(|x| support.eval(&x.0).is_zero())
        .map(|x| x.sign_canonical())
        .collect();
    let nonneg = prays.iter().all(|x| !support.eval(&x.0).is_negative());
    let face_ok = nonneg && zeros == canon_set(&mr.vectors);
    let ok = union_ok && face_ok && mr.min_norm == mp.min_norm;
    let detail = format!(
        "Min(r) has {} vectors (embedded union {}); face of a perfect domain with {} rays via {}",
        mr.vectors.len(),
        if union_ok { "matches" } else { "differs" },
        prays.len(),
        method
    );
    Ok(Certificate {
        claim: Claim::Product,
        verdict: verdict(ok),
        asserted: true,
        inputs: serde_json::json!({ "p": json(p), "q": json(q) }),
        detail,
        witness: Witness::Product {
            p: p.clone(),
            q: q.clone(),
            r,
            min_norm: mr.min_norm,
            min_p: mp.vectors,
            min_q: mq.vectors,
            min_r: mr.vectors,
            perfect,
            perfect_min_norm: pm,
            perfect_rays: prays,
            support,
            method: method.to_string(),
        },
    })
}

/// A vector in the kernel of the face's barycenter orthogonal to no ray outside it.
fn separating_kernel_vector(
    kernel: &[VectorZ],
    face: &[VectorZ],
    others: &[VectorZ],
) -> Option<VectorZ> {
    let g = kernel.first()?.dim();
    for base in 1i64..=64 {
        let mut v = vec![0i64; g];
        let mut c = 1i64;
        for k in kernel {
            for (a, b) in v.iter_mut().zip(&k.0) {
                *a = a.checked_add(c.checked_mul(*b)?)?;
            }
            c = c.checked_mul(base + 1)?;
        }
        let content = v.iter().fold(0, |acc, &x| gcd_i64(acc, x));
        if content == 0 {
            continue;
        }
        let v = VectorZ(v.into_iter().map(|x| x / content).collect());
        if face.iter().all(|x| x.dot(&v) == 0) && others.iter().all(|x| x.dot(&v) != 0) {
            return Some(v);
        }
    }
    None
}

/// Runs the maximal-prefix construction on every maximal boundary face of the cone
/// spanned by `rays` (a face of the rank-`r` decomposition meeting the interior), and
/// checks that each standardizes to a face of the rank-`(r-1)` decomposition meeting
/// its interior, minimal whenever the input is minimal.
pub fn check_closure(rays: &[VectorZ]) -> Result<Certificate> {
    let r = rays
        .first()
        .ok_or_else(|| Error::InvalidInput("empty face".into()))?
        .dim();
    let rank = vectors_rank(rays);
    if rank != r {
        return Err(Error::NotMeetingInterior { rank, ambient: r });
    }
    if r < 2 {
        return Err(Error::InvalidInput("closure needs ambient rank at least 2".into()));
    }
    let coords: Vec<Vec<i64>> = rays.iter().map(|x| rank1_coords(&x.0)).collect();
    let cf = cone::facets(&coords)?;
    let facet_sets: Vec<cone::RaySet> = cf.facets.iter().map(|f| f.rays).collect();
    let all = cone::full_set(rays.len());
    let faces: Vec<(cone::RaySet, usize)> = cone::face_sets(all, &facet_sets)
        .into_iter()
        .map(|s| {
            let vs: Vec<VectorZ> = cone::members(s).iter().map(|&i| rays[i].clone()).collect();
            (s, vectors_rank(&vs))
        })
        .collect();
    let input_minimal = !faces.iter().any(|&(s, k)| s != all && k == r);
    let low: Vec<(cone::RaySet, usize)> = faces.iter().copied().filter(|&(_, k)| k < r).collect();
    let maximal: Vec<(cone::RaySet, usize)> = low
        .iter()
        .copied()
        .filter(|&(s, _)| !low.iter().any(|&(t, _)| t != s && t & s == s))
        .collect();

    let mut reducer = Reducer::new();
    let mut boundary = Vec::with_capacity(maximal.len());
    let mut problems = Vec::new();
    for (s, k) in maximal {
        let idx = cone::members(s);
        let face: Vec<VectorZ> = idx.iter().map(|&i| rays[i].clone()).collect();
        let rest: Vec<VectorZ> = (0..rays.len())
            .filter(|i| !idx.contains(i))
            .map(|i| rays[i].clone())
            .collect();
        let ordered: Vec<VectorZ> = face.iter().chain(&rest).cloned().collect();
        // maximal prefix of rank at most r - 1
        let mut t = 0;
        while t < ordered.len() && vectors_rank(&ordered[..=t]) < r {
            t += 1;
        }
        if t != face.len() {
            problems.push(format!("prefix length {t} differs from face size {}", face.len()));
        }
        let kernel_basis = psd_rank(&sum_rank1(&face, r)).kernel_basis;
        let kernel = separating_kernel_vector(&kernel_basis, &face, &rest).ok_or_else(|| {
            Error::InvalidInput("no separating kernel vector for a boundary face".into())
        })?;
        let std = standardize(&face)?;
        let bary = sum_rank1(&std.vectors, std.rank);
        let red = reducer.reduce(&bary, None)?;
        let d = reducer.domain(&red.form)?.clone();
        let target = canon_set(&std.vectors);
        let face_rays = canon_set(&red.face);
        if face_rays != target {
            problems.push(format!(
                "standardized face of {} rays is not a face of the reduced domain",
                face.len()
            ));
        }
        let containing: Vec<&SymForm> = d
            .facet_normals
            .iter()
            .zip(&d.facet_rays)
            .filter(|(_, &fr)| {
                cone::members(fr)
                    .iter()
                    .filter(|&&i| target.contains(&d.rays[i]))
                    .count()
                    == target.len()
            })
            .map(|(h, _)| h)
            .collect();
        let mut support = SymForm::zero(std.rank);
        for h in containing {
            support = SymForm::from_flat(
                std.rank,
                support
                    .entries()
                    .iter()
                    .zip(h.entries())
                    .map(|(a, b)| a + b)
                    .collect(),
            )?;
        }
        let minimal = !faces
            .iter()
            .any(|&(t2, k2)| t2 != s && t2 & s == t2 && k2 == k);
        if k != r - 1 {
            problems.push(format!("boundary face of rank {k}"));
        }
        if input_minimal && !minimal {
            problems.push("boundary face of a minimal input is not minimal".into());
        }
        boundary.push(BoundaryFace {
            ordered_rays: ordered,
            t,
            rank: k,
            kernel,
            transform: std.transform,
            standardized: std.vectors,
            perfect: d.form.clone(),
            perfect_min_norm: d.min_norm,
            perfect_rays: d.rays.clone(),
            support,
            minimal,
        });
    }
    if boundary.is_empty() {
        problems.push("no boundary faces".into());
    }
    let ok = problems.is_empty();
    let detail = if ok {
        format!(
            "{} boundary faces of rank {}, input minimal: {input_minimal}",
            boundary.len(),
            r - 1
        )
    } else {
        problems.join("; ")
    };
    Ok(Certificate {
        claim: Claim::Closure,
        verdict: verdict(ok),
        asserted: true,
        inputs: serde_json::json!({ "rays": json(&rays) }),
        detail,
        witness: Witness::Closure {
            rank: r,
            rays: rays.to_vec(),
            input_minimal,
            boundary,
        },
    })
}

/// Largest number of candidate linear forms examined by [`check_codim_one`].
pub const MAX_CODIM_CANDIDATES: usize = 50_000;

/// Default search bound for the linear form: twice the largest diagonal entry of `q`.
pub fn default_codim_bound(q: &SymForm) -> i64 {
    2 * q.max_diagonal()
}

fn shear_for(y: &VectorZ) -> IntMatrix {
    // S = [[I, 0], [y', 1]]; Sᵀ e_last = y and Sᵀ fixes e_1..e_r
    let n = y.dim();
    let mut s = IntMatrix::identity(n);
    for j in 0..n - 1 {
        s.set(n - 1, j, y.0[j]);
    }
    s
}

fn transform_rational(f: &RationalSymForm, u: &IntMatrix) -> Result<RationalSymForm> {
    let n = f.dim();
    let rows: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = Rat::zero();
                    for a in 0..n {
                        for b in 0..n {
                            let c = u.get(a, i) as i128 * u.get(b, j) as i128;
                            if c != 0 {
                                acc += f.get(a, b) * Rat::from_integer(BigInt::from(c));
                            }
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    RationalSymForm::new(rows)
}

fn codim_reference(q: &SymForm, lambda: &Rat) -> Result<RationalSymForm> {
    let n = q.dim() + 1;
    let qe = q.embed(n).to_rational().scale(lambda);
    Ok(qe.add_rank1(&VectorZ::unit(n, n - 1).0, &Rat::one()))
}

/// Cones of the rank-`(r+1)` decomposition of dimension `dim D(q) + 1` having the
/// embedded `D(q)` in their boundary, searched over primitive linear forms with entries
/// bounded by `bound` (default [`default_codim_bound`]).
pub fn check_codim_one(q: &SymForm, bound: Option<i64>) -> Result<Certificate> {
    if !is_perfect(q)? {
        return Err(Error::NotPerfect);
    }
    let r = q.dim();
    let n = r + 1;
    let bound = bound.unwrap_or_else(|| default_codim_bound(q));
    if bound < 1 {
        return Err(Error::InvalidInput("search bound must be positive".into()));
    }
    let side = (2 * bound + 1) as f64;
    let count = side.powi(r as i32) * bound as f64;
    if count > MAX_CODIM_CANDIDATES as f64 {
        return Err(Error::SearchBoundExceeded(bound));
    }
    let md = min_data(q)?;
    let lambda = Rat::new(BigInt::one(), BigInt::from(md.min_norm));
    let sigma: Vec<VectorZ> = md
        .vectors
        .iter()
        .map(|x| VectorZ(x.0.iter().copied().chain([0]).collect()))
        .collect();
    let sigma_dim = rank1_span_dim(&sigma);
    let sigma_set = canon_set(&sigma);

    // candidates: last coordinate in 1..=bound, others in [-bound, bound], primitive
    let mut candidates = Vec::new();
    let mut degenerate = 0usize;
    let mut head = vec![-bound; r];
    loop {
        for last in 0..=bound {
            let mut v = head.clone();
            v.push(last);
            let y = VectorZ(v);
            if y.is_zero() || !y.is_primitive() {
                continue;
            }
            if last == 0 {
                if y.is_sign_canonical() {
                    degenerate += 1;
                }
                continue;
            }
            candidates.push(y);
        }
        let mut i = 0;
        while i < r && head[i] == bound {
            head[i] = -bound;
            i += 1;
        }
        if i == r {
            break;
        }
        head[i] += 1;
    }

    let cells: Vec<Option<Vec<VectorZ>>> = candidates
        .par_chunks(64)
        .map_init(Reducer::new, |reducer, chunk| {
            chunk
                .iter()
                .map(|y| -> Result<Option<Vec<VectorZ>>> {
                    let mut gens = sigma.clone();
                    gens.push(y.clone());
                    let red = reducer.reduce(&sum_rank1(&gens, n), None)?;
                    let face = canon_set(&red.face);
                    if sigma_set.is_subset(&face) && rank1_span_dim(&red.face) == sigma_dim + 1 {
                        Ok(Some(face.into_iter().collect()))
                    } else {
                        Ok(None)
                    }
                })
                .collect::<Vec<_>>()
        })
        .flatten_iter()
        .collect::<Result<_>>()?;
    let mut found: BTreeSet<Vec<VectorZ>> = BTreeSet::new();
    for c in cells.into_iter().flatten() {
        found.insert(c);
    }

    let reference = codim_reference(q, &lambda)?;
    let mut cones = Vec::new();
    let mut irregular = Vec::new();
    let mut problems = Vec::new();
    for cell in &found {
        let extra: Vec<&VectorZ> = cell.iter().filter(|x| !sigma_set.contains(*x)).collect();
        if extra.len() != 1 {
            irregular.push(cell.clone());
            continue;
        }
        // orient so that the last coordinate is positive
        let y = if extra[0].0[r] < 0 {
            extra[0].neg()
        } else {
            extra[0].clone()
        };
        if y.0[r] != 1 {
            problems.push(format!("extra ray {:?} has last coordinate {}", y.0, y.0[r]));
            continue;
        }
        let s = shear_for(&y);
        // Q_y(x) = Q_ref(S⁻ᵀ x), i.e. Q_y = S⁻¹ Q_ref S⁻ᵀ as a Gram matrix
        let sinv_t = s.inverse()?.transpose();
        let defining = transform_rational(&reference, &sinv_t)?;
        let (mn, mins) = min_data_rational(&defining)?;
        if !mn.is_one() || canon_set(&mins) != canon_set(cell) {
            problems.push(format!("defining form of the cone through {:?} is wrong", y.0));
        }
        cones.push(CodimCone {
            ray: y,
            defining_form: defining,
            shear: s,
        });
    }
    if cones.is_empty() {
        problems.push("no over-cones found".into());
    }
    if !irregular.is_empty() {
        problems.push(format!("{} over-cones with several extra rays", irregular.len()));
    }
    let ok = problems.is_empty();
    let detail = if ok {
        format!(
            "{} over-cones among {} candidates (bound {bound}), one parabolic orbit",
            cones.len(),
            candidates.len()
        )
    } else {
        problems.join("; ")
    };
    Ok(Certificate {
        claim: Claim::Codim1,
        verdict: verdict(ok),
        asserted: true,
        inputs: serde_json::json!({ "q": json(q), "bound": bound }),
        detail,
        witness: Witness::Codim {
            q: q.clone(),
            min_norm: md.min_norm,
            lambda,
            bound,
            candidates: candidates.len(),
            degenerate_rejected: degenerate,
            sigma_rays: sigma,
            reference,
            cones,
            irregular,
        },
    })
}

// ---------------------------------------------------------------------------------

/// Re-derives the verdict of a certificate from its payload using evaluation, trace
/// pairing and psd rank only. Returns true iff the payload supports the recorded verdict.
pub fn recheck(c: &Certificate) -> bool {
    recheck_verdict(c).is_some_and(|v| v == c.verdict)
}

fn recheck_verdict(c: &Certificate) -> Option<Verdict> {
    match (&c.claim, &c.witness) {
        (Claim::BcRays, Witness::RankOneRays { domains }) => {
            let mut ok = !domains.is_empty();
            for d in domains {
                let g = d.form.dim();
                ok &= rank1_span_dim(&d.rays) == sym_dim(g);
                for x in &d.rays {
                    let pr = psd_rank_int(&rank1(x).ok()?);
                    ok &= x.is_primitive()
                        && pr.is_psd
                        && pr.rank == 1
                        && evaluate(&d.form, x).ok()? == d.min_norm;
                }
            }
            Some(verdict(ok))
        }
        (
            Claim::BcInterior,
            Witness::Interior {
                form,
                rank,
                perfect,
                min_norm,
                value,
                combination,
            },
        ) => {
            let pr = psd_rank_int(form);
            let consistent = pr.is_psd
                && pr.rank == *rank
                && combination.is_valid()
                && combination.target == form.to_rational()
                && combination.coeffs.iter().all(|l| l.is_positive())
                && combination.total_weight() == *value
                && combination
                    .rays
                    .iter()
                    .all(|x| evaluate(perfect, x).ok() == Some(*min_norm))
                && trace_pair(&perfect.to_rational(), &form.to_rational()).ok()?
                    / Rat::from_integer(BigInt::from(*min_norm))
                    == *value;
            if !consistent {
                return None;
            }
            Some(verdict(*rank >= 2 && *value > Rat::one()))
        }
        (
            Claim::Product,
            Witness::Product {
                p,
                q,
                r,
                min_norm,
                min_p,
                min_q,
                min_r,
                perfect,
                perfect_min_norm,
                perfect_rays,
                support,
                ..
            },
        ) => {
            let (m, n) = (p.dim(), q.dim());
            let mut ok = p.direct_sum(q) == *r;
            ok &= min_p.iter().all(|x| evaluate(p, x).ok() == Some(*min_norm));
            ok &= min_q.iter().all(|x| evaluate(q, x).ok() == Some(*min_norm));
            ok &= min_r.iter().all(|x| evaluate(r, x).ok() == Some(*min_norm));
            let embedded: BTreeSet<VectorZ> = min_p
                .iter()
                .map(|x| VectorZ(x.0.iter().copied().chain(vec![0; n]).collect()))
                .chain(
                    min_q
                        .iter()
                        .map(|y| VectorZ(vec![0; m].into_iter().chain(y.0.iter().copied()).collect())),
                )
                .map(|v| v.sign_canonical())
                .collect();
            ok &= embedded == canon_set(min_r);
            ok &= rank1_span_dim(perfect_rays) == sym_dim(m + n);
            ok &= perfect_rays
                .iter()
                .all(|x| evaluate(perfect, x).ok() == Some(*perfect_min_norm));
            let expect = r
                .to_rational()
                .scale(&Rat::new(BigInt::one(), BigInt::from(*min_norm)))
                .sub(&perfect
                    .to_rational()
                    .scale(&Rat::new(BigInt::one(), BigInt::from(*perfect_min_norm))))
                .ok()?;
            ok &= expect == *support;
            let mut zeros = BTreeSet::new();
            for x in perfect_rays {
                let v = trace_pair(support, &rank1(x).ok()?.to_rational()).ok()?;
                ok &= !v.is_negative();
                if v.is_zero() {
                    zeros.insert(x.sign_canonical());
                }
            }
            ok &= zeros == canon_set(min_r);
            Some(verdict(ok))
        }
        (
            Claim::Closure,
            Witness::Closure {
                rank,
                rays,
                input_minimal,
                boundary,
            },
        ) => {
            let r = *rank;
            let mut ok = vectors_rank(rays) == r && !boundary.is_empty();
            let input = canon_set(rays);
            for b in boundary {
                ok &= canon_set(&b.ordered_rays) == input && b.t <= b.ordered_rays.len();
                let prefix = &b.ordered_rays[..b.t];
                ok &= psd_rank(&sum_rank1(prefix, r)).rank == r - 1 && b.rank == r - 1;
                if b.t < b.ordered_rays.len() {
                    ok &= psd_rank(&sum_rank1(&b.ordered_rays[..=b.t], r)).rank == r;
                }
                // v vᵀ is psd, so it supports the input cone; its zero set is the prefix
                let vv = rank1(&b.kernel).ok()?.to_rational();
                for (i, x) in b.ordered_rays.iter().enumerate() {
                    let val = trace_pair(&vv, &rank1(x).ok()?.to_rational()).ok()?;
                    ok &= val.is_zero() == (i < b.t);
                }
                ok &= b.transform.is_unimodular();
                for (x, s) in prefix.iter().zip(&b.standardized) {
                    let Ok(y) = b.transform.mul_vec(&x.0) else {
                        return None;
                    };
                    let head = VectorZ(y[..b.rank].to_vec());
                    ok &= y[b.rank..].iter().all(|&c| c == 0)
                        && head.sign_canonical() == s.sign_canonical();
                }
                ok &= b.standardized.len() == b.t;
                ok &= rank1_span_dim(&b.perfect_rays) == sym_dim(b.rank);
                ok &= b
                    .perfect_rays
                    .iter()
                    .all(|x| evaluate(&b.perfect, x).ok() == Some(b.perfect_min_norm));
                let target = canon_set(&b.standardized);
                let supp = b.support.to_rational();
                let mut zeros = BTreeSet::new();
                for x in &b.perfect_rays {
                    let v = trace_pair(&supp, &rank1(x).ok()?.to_rational()).ok()?;
                    ok &= !v.is_negative();
                    if v.is_zero() {
                        zeros.insert(x.sign_canonical());
                    }
                }
                ok &= zeros == target;
                ok &= psd_rank(&sum_rank1(&b.standardized, b.rank)).rank == b.rank;
                if *input_minimal {
                    ok &= b.minimal;
                }
            }
            Some(verdict(ok))
        }
        (
            Claim::Codim1,
            Witness::Codim {
                q,
                min_norm,
                lambda,
                sigma_rays,
                reference,
                cones,
                irregular,
                ..
            },
        ) => {
            let r = q.dim();
            let n = r + 1;
            let mut ok = !cones.is_empty() && irregular.is_empty();
            ok &= *lambda == Rat::new(BigInt::one(), BigInt::from(*min_norm));
            ok &= codim_reference(q, lambda).ok()? == *reference;
            let rp = psd_rank(reference);
            ok &= rp.is_psd && rp.rank == n;
            ok &= sigma_rays.iter().all(|x| {
                x.0[r] == 0 && evaluate(q, &VectorZ(x.0[..r].to_vec())).ok() == Some(*min_norm)
            });
            let one = Rat::one();
            let last = VectorZ::unit(n, r);
            for c in cones {
                let s = &c.shear;
                // parabolic: the first r rows of S are the identity
                for i in 0..r {
                    for j in 0..n {
                        ok &= s.get(i, j) == i64::from(i == j);
                    }
                }
                ok &= s.is_unimodular();
                let st = s.transpose();
                ok &= st.mul_vec(&last.0).ok()? == c.ray.0;
                ok &= sigma_rays.iter().all(|x| st.mul_vec(&x.0).ok().as_ref() == Some(&x.0));
                // Sᵀ moves rays, so Q_y ∘ Sᵀ = Q_ref
                ok &= transform_rational(&c.defining_form, &st).ok()? == *reference;
                ok &= c.defining_form.eval(&c.ray.0) == one;
                ok &= sigma_rays.iter().all(|x| c.defining_form.eval(&x.0) == one);
                ok &= c.ray.0[r] == 1;
            }
            Some(verdict(ok))
        }
        _ => None,
    }
}

// ---------------------------------------------------------------------------------

/// Seeded corpus of integral psd forms in `g` variables: sums of `rank1(x)` over 1 to
/// `g + 1` random vectors with entries in `[-2, 2]`, deduplicated, zero form excluded.
pub fn random_psd_corpus(g: usize, count: usize, seed: u64) -> Vec<SymForm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<SymForm> = Vec::new();
    let mut guard = 0;
    while out.len() < count && guard < 100 * count {
        guard += 1;
        let k = rng.gen_range(1..=g + 1);
        let mut f = vec![0i64; g * g];
        for _ in 0..k {
            let x: Vec<i64> = (0..g).map(|_| rng.gen_range(-2..=2)).collect();
            for i in 0..g {
                for j in 0..g {
                    f[i * g + j] += x[i] * x[j];
                }
            }
        }
        if f.iter().all(|&v| v == 0) {
            continue;
        }
        let form = SymForm::from_flat(g, f).expect("symmetric by construction");
        if !out.contains(&form) {
            out.push(form);
        }
    }
    out
}

/// Perfect class representatives in `k` variables for `k ≤ g`.
fn representatives(k: usize) -> Result<Vec<SymForm>> {
    Ok(enumerate_perfect(k, EnumerateOptions::default())?
        .classes
        .into_iter()
        .map(|c| c.representative)
        .collect())
}

fn scale_to(q: &SymForm, target: i64, m: i64) -> Result<SymForm> {
    q.scale(target / m)
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd_i64(a, b) * b
}

/// The certificates for `claim` at dimension `g`.
pub fn run_claim(g: usize, claim: Claim, enumeration: Option<&Enumeration>) -> Result<Vec<Certificate>> {
    let owned;
    let e = match enumeration {
        Some(e) if e.g == g => e,
        _ => {
            owned = enumerate_perfect(g, EnumerateOptions::default())?;
            &owned
        }
    };
    match claim {
        Claim::BcRays => Ok(vec![check_rank1_rays(e)?]),
        Claim::BcInterior => {
            let corpus = random_psd_corpus(g, 24, 0x5eed_0000 + g as u64);
            corpus
                .par_iter()
                .map_init(Reducer::new, |red, f| check_interior_with(f, red))
                .collect()
        }
        Claim::Product => {
            let mut out = Vec::new();
            for m in 1..=g / 2 {
                let n = g - m;
                let ps = representatives(m)?;
                let qs = representatives(n)?;
                for p in &ps {
                    for q in &qs {
                        let (a, b) = (min_data(p)?.min_norm, min_data(q)?.min_norm);
                        let l = lcm(a, b);
                        out.push(check_product(&scale_to(p, l, a)?, &scale_to(q, l, b)?)?);
                    }
                }
            }
            Ok(out)
        }
        Claim::Closure => {
            if g < 2 {
                return Ok(Vec::new());
            }
            let poset = strata_poset(e)?;
            poset
                .nodes
                .par_iter()
                .filter(|nd| nd.rank == g && nd.minimal)
                .map(|nd| check_closure(&nd.representative))
                .collect()
        }
        Claim::Codim1 => {
            if g < 2 {
                return Ok(Vec::new());
            }
            representatives(g - 1)?
                .iter()
                .map(|q| check_codim_one(q, None))
                .collect()
        }
    }
}

/// Certificates for several claims at dimension `g`, in claim order.
pub fn run_claims(g: usize, claims: &[Claim]) -> Result<Vec<Certificate>> {
    let e = enumerate_perfect(g, EnumerateOptions::default())?;
    let per: Vec<Vec<Certificate>> = claims
        .par_iter()
        .map(|&c| run_claim(g, c, Some(&e)))
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claim_names_round_trip() {
        for c in Claim::ALL {
            assert_eq!(c.as_str().parse::<Claim>().unwrap(), c);
            let j = serde_json::to_string(&c).unwrap();
            assert_eq!(j, format!("\"{}\"", c.as_str()));
        }
        assert!("nope".parse::<Claim>().is_err());
    }

    #[test]
    fn rank1_rays_small_g() {
        for g in 1..=4 {
            let e = enumerate_perfect(g, EnumerateOptions::default()).unwrap();
            let c = check_rank1_rays(&e).unwrap();
            assert!(c.passed(), "{}", c.detail);
            assert!(recheck(&c));
        }
    }

    #[test]
    fn interior_examples() {
        let c = check_interior(&SymForm::identity(2)).unwrap();
        assert!(c.passed());
        let Witness::Interior { value, .. } = &c.witness else { panic!() };
        assert_eq!(*value, Rat::from_integer(2.into()));
        assert!(recheck(&c));

        let e1 = rank1(&VectorZ(vec![1, 0])).unwrap();
        let c = check_interior(&e1).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        assert!(!c.asserted && !c.is_violation());
        let Witness::Interior { value, .. } = &c.witness else { panic!() };
        assert!(value.is_one());
        assert!(recheck(&c));

        let c = check_interior(&SymForm::root_a(2)).unwrap();
        assert!(c.passed());
        let Witness::Interior { value, .. } = &c.witness else { panic!() };
        assert_eq!(*value, Rat::from_integer(3.into()));

        assert!(matches!(
            check_interior(&SymForm::zero(2)),
            Err(Error::RankTooLow(0))
        ));
        assert!(matches!(
            check_interior(&SymForm::diagonal(&[1, -1])),
            Err(Error::NotPsd)
        ));
    }

    #[test]
    fn product_small() {
        let two = SymForm::new(vec![vec![2]]).unwrap();
        let c = check_product(&two, &two).unwrap();
        assert!(c.passed(), "{}", c.detail);
        assert!(recheck(&c));
        assert!(matches!(
            check_product(&SymForm::new(vec![vec![1]]).unwrap(), &two),
            Err(Error::MinNormMismatch(_, _))
        ));
        assert!(matches!(
            check_product(&SymForm::identity(2), &two),
            Err(Error::NotPerfect)
        ));
    }

    #[test]
    fn closure_a2() {
        let d = domain(&SymForm::root_a(2)).unwrap();
        let c = check_closure(&d.rays).unwrap();
        assert!(c.passed(), "{}", c.detail);
        let Witness::Closure { boundary, input_minimal, .. } = &c.witness else { panic!() };
        assert!(!input_minimal);
        assert_eq!(boundary.len(), 3);
        assert!(boundary.iter().all(|b| b.t == 1 && b.rank == 1));
        assert!(recheck(&c));

        let pair = [VectorZ(vec![1, 0]), VectorZ(vec![0, 1])];
        let c = check_closure(&pair).unwrap();
        assert!(c.passed(), "{}", c.detail);
        assert!(recheck(&c));

        assert!(matches!(
            check_closure(&[VectorZ(vec![1, 0])]),
            Err(Error::NotMeetingInterior { rank: 1, ambient: 2 })
        ));
    }

    #[test]
    fn codim_one_rank_one() {
        let c = check_codim_one(&SymForm::new(vec![vec![2]]).unwrap(), None).unwrap();
        assert!(c.passed(), "{}", c.detail);
        let Witness::Codim { cones, bound, .. } = &c.witness else { panic!() };
        assert_eq!(*bound, 4);
        // y = (a, 1) for |a| <= 4
        assert_eq!(cones.len(), 9);
        assert!(recheck(&c));
    }

    #[test]
    fn tampered_certificate_fails_recheck() {
        let mut c = check_interior(&SymForm::identity(2)).unwrap();
        if let Witness::Interior { value, .. } = &mut c.witness {
            *value = Rat::from_integer(5.into());
        }
        assert!(!recheck(&c));
    }
}
