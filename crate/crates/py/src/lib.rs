//! Python bindings for the forbidden-subposet toolkit: poset algebra,
//! family checks, double chains, and the La(n, P) machinery.

use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};
use subposet::cert::Certificate;
use subposet::expr::PosetExpr;
use subposet::{Budget, LaOutcome, Witness};

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A finite poset, usually built from an expression over the seven base
/// posets. The expression is retained when known so the composition
/// calculus for e stays available.
#[pyclass(name = "Poset", skip_from_py_object)]
#[derive(Clone)]
struct PyPoset {
    poset: subposet::Poset,
    expr: Option<PosetExpr>,
}

#[pymethods]
impl PyPoset {
    #[getter]
    fn size(&self) -> usize {
        self.poset.size()
    }

    #[getter]
    fn longest_chain(&self) -> usize {
        self.poset.longest_chain()
    }

    /// b = (|P| + longest chain)/2 - 1, as a (numerator, denominator) pair.
    #[getter]
    fn b(&self) -> (i64, i64) {
        let b = self.poset.b_value();
        (*b.numer(), *b.denom())
    }

    /// The composed lower bound for e, available when the poset came from
    /// an expression over base leaves only.
    #[getter]
    fn e(&self) -> Option<i64> {
        let expr = self.expr.as_ref()?;
        subposet::e_composition_bound(expr).ok()
    }

    #[getter]
    fn expr(&self) -> Option<String> {
        self.expr.as_ref().map(|e| e.to_string())
    }

    /// Strictly related pairs (a, b) with a < b.
    fn relations(&self) -> Vec<(usize, usize)> {
        let n = self.poset.size();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.poset.lt(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn dual(&self) -> PyPoset {
        PyPoset { poset: self.poset.dual(), expr: None }
    }

    fn is_isomorphic(&self, other: &PyPoset) -> PyResult<bool> {
        self.poset.is_isomorphic(&other.poset).map_err(value_err)
    }

    /// Series sum: everything in self below everything in other.
    fn __add__(&self, other: &PyPoset) -> PyPoset {
        PyPoset {
            poset: self.poset.oplus(&other.poset),
            expr: join_expr(&self.expr, &other.expr, PosetExpr::oplus),
        }
    }

    /// Glued product: identifies the greatest element of self with the
    /// least element of other.
    fn __mul__(&self, other: &PyPoset) -> PyResult<PyPoset> {
        let poset = self.poset.otimes(&other.poset).map_err(value_err)?;
        Ok(PyPoset { poset, expr: join_expr(&self.expr, &other.expr, PosetExpr::otimes) })
    }

    fn __len__(&self) -> usize {
        self.poset.size()
    }

    fn __repr__(&self) -> String {
        match &self.expr {
            Some(e) => format!("Poset({e}, size={})", self.poset.size()),
            None => format!("Poset(size={})", self.poset.size()),
        }
    }
}

fn join_expr(
    a: &Option<PosetExpr>,
    b: &Option<PosetExpr>,
    op: fn(PosetExpr, PosetExpr) -> PosetExpr,
) -> Option<PosetExpr> {
    match (a, b) {
        (Some(a), Some(b)) => Some(op(a.clone(), b.clone())),
        _ => None,
    }
}

/// A family of subsets of [n], each subset a bitmask over n elements.
#[pyclass(name = "Family", skip_from_py_object)]
#[derive(Clone)]
struct PyFamily {
    family: subposet::Family,
}

#[pymethods]
impl PyFamily {
    #[new]
    fn new(n: u32, members: Vec<u64>) -> PyResult<PyFamily> {
        Ok(PyFamily { family: subposet::Family::new(n, members).map_err(value_err)? })
    }

    #[staticmethod]
    fn middle_levels(n: u32, m: u32) -> PyResult<PyFamily> {
        Ok(PyFamily { family: subposet::Family::middle_levels(n, m).map_err(value_err)? })
    }

    #[staticmethod]
    fn levels(n: u32, k: u32, m: u32) -> PyResult<PyFamily> {
        Ok(PyFamily { family: subposet::Family::levels(n, k, m).map_err(value_err)? })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<PyFamily> {
        Ok(PyFamily { family: subposet::Family::parse_text(text).map_err(value_err)? })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.family.n()
    }

    #[getter]
    fn members(&self) -> Vec<u64> {
        self.family.members().to_vec()
    }

    fn complements(&self) -> PyFamily {
        PyFamily { family: self.family.complements() }
    }

    fn is_free(&self, pattern: &PyPoset) -> bool {
        subposet::is_p_free(&self.family, &pattern.poset)
    }

    fn render(&self) -> String {
        self.family.render_text()
    }

    fn __len__(&self) -> usize {
        self.family.len()
    }

    fn __repr__(&self) -> String {
        format!("Family(n={}, members={})", self.family.n(), self.family.len())
    }
}

fn ratio_to_py(r: &num_bigint::BigInt, d: &num_bigint::BigInt) -> (BigInt, BigInt) {
    (r.clone(), d.clone())
}

fn cert_to_dict<'py>(py: Python<'py>, cert: &Certificate) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("claim", &cert.claim)?;
    d.set_item("verdict", cert.verdict.as_str())?;
    d.set_item("expr", cert.expr.as_deref())?;
    d.set_item("n", cert.n)?;
    d.set_item("m", cert.m.as_deref())?;
    d.set_item("k", cert.k)?;
    d.set_item("value", cert.value.as_deref())?;
    d.set_item("expected", cert.expected.as_deref())?;
    d.set_item("notes", cert.notes.clone())?;
    match &cert.witness {
        Some(Witness::Family(f)) => {
            d.set_item("witness_kind", "family")?;
            d.set_item("witness", f.members().to_vec())?;
        }
        Some(Witness::Embedding { n, images }) => {
            d.set_item("witness_kind", "embedding")?;
            d.set_item("witness_n", n)?;
            d.set_item("witness", images.clone())?;
        }
        Some(Witness::WindowSubset(cols)) => {
            d.set_item("witness_kind", "window-subset")?;
            let cols: Vec<(String, i64)> =
                cols.iter().map(|&(r, c)| (r.to_string(), c)).collect();
            d.set_item("witness", cols)?;
        }
        None => d.set_item("witness_kind", py.None())?,
    }
    d.set_item("rendered", cert.render())?;
    Ok(d)
}

fn extract_ratio(m: &Bound<'_, PyAny>) -> PyResult<num_rational::Rational64> {
    if let Ok(i) = m.extract::<i64>() {
        return Ok(num_rational::Rational64::from_integer(i));
    }
    if let Ok((p, q)) = m.extract::<(i64, i64)>() {
        if q == 0 {
            return Err(PyValueError::new_err("denominator must be nonzero"));
        }
        return Ok(num_rational::Rational64::new(p, q));
    }
    Err(PyValueError::new_err("expected an int or a (numerator, denominator) pair"))
}

/// Parses an expression over E, B, D3, Q, R, S, S' (alias Sp) with
/// `+` for series sum and `*` for the glued product.
#[pyfunction]
fn parse(text: &str) -> PyResult<PyPoset> {
    let expr = subposet::parse_expr(text).map_err(value_err)?;
    let poset = subposet::eval_expr(&expr).map_err(value_err)?;
    Ok(PyPoset { poset, expr: Some(expr) })
}

/// The sum of the m largest binomial coefficients of n.
#[pyfunction]
fn sigma(n: u32, m: u32) -> BigInt {
    subposet::sigma(n, m)
}

#[pyfunction]
fn binomial(n: u64, k: u64) -> BigInt {
    subposet::binomial(n, k)
}

/// Exact La(n, P) search. Returns a dict with either the exact value and
/// witness or the best bounds found within the budget.
#[pyfunction]
#[pyo3(signature = (n, pattern, budget=None))]
fn la_exact<'py>(
    py: Python<'py>,
    n: u32,
    pattern: &PyPoset,
    budget: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let budget = match budget {
        Some(max_nodes) => Budget { max_nodes, time_limit: None },
        None => Budget::default(),
    };
    let out = subposet::la_exact(n, &pattern.poset, &budget).map_err(value_err)?;
    let d = PyDict::new(py);
    match out {
        LaOutcome::Exact { value, witness } => {
            d.set_item("exact", true)?;
            d.set_item("value", value)?;
            d.set_item("witness", witness.members().to_vec())?;
        }
        LaOutcome::Inconclusive { best, witness, upper, nodes } => {
            d.set_item("exact", false)?;
            d.set_item("best", best)?;
            d.set_item("upper", upper)?;
            d.set_item("nodes", nodes)?;
            d.set_item("witness", witness.members().to_vec())?;
        }
    }
    Ok(d)
}

/// Whether an embedding of the pattern into the host poset exists,
/// returning the image list or None.
#[pyfunction]
fn embeds_weak(pattern: &PyPoset, host: &PyPoset) -> Option<Vec<usize>> {
    subposet::embeds_weak(&pattern.poset, &host.poset).map(|e| e.map)
}

/// The double chain of a permutation of 1..=n: the prefix chain and the
/// swap chain, as bitmask lists.
#[pyfunction]
fn double_chain<'py>(py: Python<'py>, perm: Vec<u32>) -> PyResult<Bound<'py, PyDict>> {
    let dc = subposet::double_chain(&perm).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("primary", dc.primary().to_vec())?;
    d.set_item("secondary", dc.secondary().to_vec())?;
    Ok(d)
}

/// How many of the n! double chains contain the given subset, by the
/// closed form.
#[pyfunction]
fn count_containing(mask: u64, n: u32) -> PyResult<BigInt> {
    subposet::count_containing(mask, n).map_err(value_err)
}

/// Sum of 1/C(n, |F|) over the family, as a (numerator, denominator) pair.
#[pyfunction]
fn chain_lubell_sum(f: &PyFamily) -> (BigInt, BigInt) {
    let r = subposet::chain_lubell_sum(&f.family);
    ratio_to_py(r.numer(), r.denom())
}

/// The double-chain average: counts ∅ and the full set with weight 1/2.
#[pyfunction]
fn double_lubell_sum(f: &PyFamily) -> PyResult<(BigInt, BigInt)> {
    let r = subposet::double_lubell_sum(&f.family).map_err(value_err)?;
    Ok(ratio_to_py(r.numer(), r.denom()))
}

/// Checks the containment-count closed form against enumeration for every
/// subset of [n].
#[pyfunction]
#[pyo3(signature = (n, jobs=1))]
fn audit_double_chains<'py>(py: Python<'py>, n: u32, jobs: usize) -> PyResult<Bound<'py, PyDict>> {
    let cert = subposet::audit_double_chains(n, jobs).map_err(value_err)?;
    cert_to_dict(py, &cert)
}

/// Decides whether every (2m+1)-point window subset contains the pattern.
/// m is an int or a (numerator, denominator) pair.
#[pyfunction]
#[pyo3(signature = (pattern, m, budget=None))]
fn window_condition<'py>(
    py: Python<'py>,
    pattern: &PyPoset,
    m: &Bound<'py, PyAny>,
    budget: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let m = extract_ratio(m)?;
    let budget = match budget {
        Some(max_nodes) => Budget { max_nodes, time_limit: None },
        None => Budget::default(),
    };
    let cert = subposet::window_condition(&pattern.poset, m, &budget).map_err(value_err)?;
    cert_to_dict(py, &cert)
}

/// The double-chain upper bound at n: ((numerator, denominator), kind).
#[pyfunction]
fn double_chain_bound<'py>(
    py: Python<'py>,
    pattern: &PyPoset,
    n: u32,
) -> PyResult<Bound<'py, PyTuple>> {
    let (bound, kind) = subposet::double_chain_bound(&pattern.poset, n);
    let pair = ratio_to_py(bound.numer(), bound.denom());
    PyTuple::new(py, [pair.into_pyobject(py)?.into_any(), kind.as_str().into_pyobject(py)?.into_any()])
}

/// The older bound via the path poset: sigma(n, |P| - 1).
#[pyfunction]
fn path_embedding_bound(pattern: &PyPoset, n: u32) -> BigInt {
    subposet::path_embedding_bound(&pattern.poset, n)
}

/// The composed e lower bound; requires a poset built from base leaves.
#[pyfunction]
fn e_composition_bound(pattern: &PyPoset) -> PyResult<i64> {
    let expr = pattern
        .expr
        .as_ref()
        .ok_or_else(|| PyValueError::new_err("poset carries no expression"))?;
    subposet::e_composition_bound(expr).map_err(value_err)
}

/// Scans all m-consecutive-level families up to n_max for the pattern.
#[pyfunction]
#[pyo3(signature = (pattern, m, n_max, jobs=1))]
fn e_lower_scan<'py>(
    py: Python<'py>,
    pattern: &PyPoset,
    m: u32,
    n_max: u32,
    jobs: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cert = subposet::e_lower_scan(&pattern.poset, m, n_max, jobs).map_err(value_err)?;
    cert_to_dict(py, &cert)
}

/// Hunts for an embedding into m consecutive levels; returns
/// (n, k, images) or None.
#[pyfunction]
fn e_upper_witness(
    pattern: &PyPoset,
    m: u32,
    n_max: u32,
) -> PyResult<Option<(u32, u32, Vec<u64>)>> {
    let w = subposet::e_upper_witness(&pattern.poset, m, n_max).map_err(value_err)?;
    Ok(w.map(|w| (w.n, w.k, w.images)))
}

/// Checks La(n, P) = sigma(n, b(P)) for a base-built expression.
#[pyfunction]
#[pyo3(signature = (pattern, n, budget=None))]
fn verify_sharp_bound<'py>(
    py: Python<'py>,
    pattern: &PyPoset,
    n: u32,
    budget: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let expr = pattern
        .expr
        .as_ref()
        .ok_or_else(|| PyValueError::new_err("poset carries no expression"))?;
    let budget = match budget {
        Some(max_nodes) => Budget { max_nodes, time_limit: None },
        None => Budget::default(),
    };
    let cert = subposet::verify_sharp_bound(expr, n, &budget).map_err(value_err)?;
    cert_to_dict(py, &cert)
}

#[pymodule]
fn subposet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoset>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(sigma, m)?)?;
    m.add_function(wrap_pyfunction!(binomial, m)?)?;
    m.add_function(wrap_pyfunction!(la_exact, m)?)?;
    m.add_function(wrap_pyfunction!(embeds_weak, m)?)?;
    m.add_function(wrap_pyfunction!(double_chain, m)?)?;
    m.add_function(wrap_pyfunction!(count_containing, m)?)?;
    m.add_function(wrap_pyfunction!(chain_lubell_sum, m)?)?;
    m.add_function(wrap_pyfunction!(double_lubell_sum, m)?)?;
    m.add_function(wrap_pyfunction!(audit_double_chains, m)?)?;
    m.add_function(wrap_pyfunction!(window_condition, m)?)?;
    m.add_function(wrap_pyfunction!(double_chain_bound, m)?)?;
    m.add_function(wrap_pyfunction!(path_embedding_bound, m)?)?;
    m.add_function(wrap_pyfunction!(e_composition_bound, m)?)?;
    m.add_function(wrap_pyfunction!(e_lower_scan, m)?)?;
    m.add_function(wrap_pyfunction!(e_upper_witness, m)?)?;
    m.add_function(wrap_pyfunction!(verify_sharp_bound, m)?)?;
    Ok(())
}
