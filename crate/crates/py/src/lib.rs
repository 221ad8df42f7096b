//! Python module `voronoi`. Forms are passed as nested lists of integers; structured
//! results come back as plain dicts and lists with the same layout as the JSON files
//! written by the command-line tool.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use voronoi_core::cone::members;
use voronoi_core::db::{load_or_enumerate, MinDataJson};
use voronoi_core::equivalence;
use voronoi_core::facelattice::strata_poset;
use voronoi_core::forms::{SymForm, VectorZ};
use voronoi_core::verify::{self, Claim};
use voronoi_core::voronoi::{self as vor, EnumerateOptions};
use voronoi_core::Error;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn form(rows: Vec<Vec<i64>>) -> PyResult<SymForm> {
    SymForm::new(rows).map_err(err)
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Minimal norm and minimal vectors (one per sign pair).
#[pyfunction]
fn min_data(py: Python<'_>, q: Vec<Vec<i64>>) -> PyResult<Bound<'_, PyAny>> {
    let md = voronoi_core::minvec::min_data(&form(q)?).map_err(err)?;
    to_py(py, &MinDataJson::from(&md))
}

/// A unimodular `u` with `uᵀ a u = b`, or `None`.
#[pyfunction]
fn equivalent(a: Vec<Vec<i64>>, b: Vec<Vec<i64>>) -> PyResult<Option<Vec<Vec<i64>>>> {
    let w = equivalence::are_equivalent(&form(a)?, &form(b)?).map_err(err)?;
    Ok(w.map(|u| u.rows()))
}

/// Generators and order of the automorphism group.
#[pyfunction]
fn automorphisms(py: Python<'_>, q: Vec<Vec<i64>>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &equivalence::automorphisms(&form(q)?).map_err(err)?)
}

#[pyfunction]
fn is_perfect(q: Vec<Vec<i64>>) -> PyResult<bool> {
    vor::is_perfect(&form(q)?).map_err(err)
}

/// Rays and facet normals of the Voronoi domain of a perfect form.
#[pyfunction]
fn domain(py: Python<'_>, q: Vec<Vec<i64>>) -> PyResult<Bound<'_, PyAny>> {
    let d = vor::domain(&form(q)?).map_err(err)?;
    let facets: Vec<Vec<usize>> = d.facet_rays.iter().map(|&s| members(s)).collect();
    to_py(
        py,
        &serde_json::json!({
            "form": d.form,
            "min_norm": d.min_norm,
            "rays": d.rays,
            "facet_normals": d.facet_normals,
            "facet_rays": facets,
        }),
    )
}

/// The perfect form across facet `facet`, as a primitive integral matrix.
#[pyfunction]
fn neighbor(q: Vec<Vec<i64>>, facet: usize) -> PyResult<Vec<Vec<i64>>> {
    let d = vor::domain(&form(q)?).map_err(err)?;
    Ok(vor::neighbor(&d, facet).map_err(err)?.rows())
}

/// Class database for dimension `g` (cached when `VORONOI_CACHE_DIR` is set).
#[pyfunction]
#[pyo3(signature = (g, force = false))]
fn enumerate(py: Python<'_>, g: usize, force: bool) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &load_or_enumerate(g, EnumerateOptions { force }).map_err(err)?)
}

/// Perfect form, face and conic combination locating a positive semi-definite form.
#[pyfunction]
fn reduce(py: Python<'_>, f: Vec<Vec<i64>>) -> PyResult<Bound<'_, PyAny>> {
    let red = vor::reduce(&form(f)?.to_rational(), None).map_err(err)?;
    let objective: Vec<String> = red.objective.iter().map(|r| r.to_string()).collect();
    to_py(
        py,
        &serde_json::json!({
            "form": red.form,
            "min_norm": red.min_norm,
            "face": red.face,
            "combination": red.combination,
            "objective": objective,
        }),
    )
}

#[pyfunction]
fn check_interior(py: Python<'_>, f: Vec<Vec<i64>>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &verify::check_interior(&form(f)?).map_err(err)?)
}

#[pyfunction]
fn check_product(py: Python<'_>, p: Vec<Vec<i64>>, q: Vec<Vec<i64>>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &verify::check_product(&form(p)?, &form(q)?).map_err(err)?)
}

/// Closure check for the cone spanned by `x xᵀ` over the given vectors.
#[pyfunction]
fn check_closure(py: Python<'_>, rays: Vec<Vec<i64>>) -> PyResult<Bound<'_, PyAny>> {
    let rays: Vec<VectorZ> = rays.into_iter().map(VectorZ).collect();
    to_py(py, &verify::check_closure(&rays).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (q, bound = None))]
fn check_codim_one(py: Python<'_>, q: Vec<Vec<i64>>, bound: Option<i64>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &verify::check_codim_one(&form(q)?, bound).map_err(err)?)
}

/// Certificates for one claim name (or "all") in dimension `g`.
#[pyfunction]
#[pyo3(signature = (g, claim = "all"))]
fn verify_claims<'py>(py: Python<'py>, g: usize, claim: &str) -> PyResult<Bound<'py, PyAny>> {
    let claims = if claim.eq_ignore_ascii_case("all") {
        Claim::ALL.to_vec()
    } else {
        vec![claim.parse::<Claim>().map_err(err)?]
    };
    to_py(py, &verify::run_claims(g, &claims).map_err(err)?)
}

/// Re-validates a certificate dict produced by one of the checks.
#[pyfunction]
fn recheck(py: Python<'_>, certificate: Bound<'_, PyAny>) -> PyResult<bool> {
    let text: String = py.import("json")?.call_method1("dumps", (certificate,))?.extract()?;
    let c: verify::Certificate =
        serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(verify::recheck(&c))
}

/// Orbit poset of faces of the decomposition in dimension `g`.
#[pyfunction]
fn strata(py: Python<'_>, g: usize) -> PyResult<Bound<'_, PyAny>> {
    let database = load_or_enumerate(g, EnumerateOptions::default()).map_err(err)?;
    to_py(py, &strata_poset(&database.enumeration()).map_err(err)?)
}

#[pymodule]
#[pyo3(name = "voronoi")]
fn voronoi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(min_data, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(automorphisms, m)?)?;
    m.add_function(wrap_pyfunction!(is_perfect, m)?)?;
    m.add_function(wrap_pyfunction!(domain, m)?)?;
    m.add_function(wrap_pyfunction!(neighbor, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(check_interior, m)?)?;
    m.add_function(wrap_pyfunction!(check_product, m)?)?;
    m.add_function(wrap_pyfunction!(check_closure, m)?)?;
    m.add_function(wrap_pyfunction!(check_codim_one, m)?)?;
    m.add_function(wrap_pyfunction!(verify_claims, m)?)?;
    m.add_function(wrap_pyfunction!(recheck, m)?)?;
    m.add_function(wrap_pyfunction!(strata, m)?)?;
    Ok(())
}
