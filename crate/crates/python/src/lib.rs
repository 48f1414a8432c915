use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use relbetti::collections::BuiltinKind;
use relbetti::homalg::{betti, betti_koszul_all};
use relbetti::io;
use relbetti::poset::default_max_antichains;
use relbetti::random::{random_module, random_upper_semilattice, rng};
use relbetti::relative::{relative_betti, relative_betti_koszul_all, CollectionFunctor, StatusReport};
use relbetti::{BettiDiagram, Field, PersistenceModule};
use serde_json::Value;
use std::sync::Arc;

create_exception!(relbetti_py, RelbettiError, PyException);

fn err(e: relbetti::Error) -> PyErr {
    RelbettiError::new_err(e.to_string())
}

fn parse(s: &str) -> PyResult<Value> {
    serde_json::from_str(s).map_err(|e| RelbettiError::new_err(e.to_string()))
}

fn field(p: u64) -> PyResult<Field> {
    Field::new(p).map_err(err)
}

/// A finite poset with named elements.
#[pyclass(name = "Poset", frozen)]
struct PyPoset {
    inner: Arc<relbetti::Poset>,
}

#[pymethods]
impl PyPoset {
    #[new]
    fn new(elements: Vec<String>, covers: Vec<(String, String)>) -> PyResult<Self> {
        let p = relbetti::Poset::from_covers(&elements, &covers).map_err(err)?;
        Ok(PyPoset { inner: Arc::new(p) })
    }

    /// The grid `{0..n}^r` in the product order.
    #[staticmethod]
    fn grid(n: usize, r: usize) -> Self {
        PyPoset { inner: Arc::new(relbetti::Poset::grid(n, r)) }
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(PyPoset { inner: Arc::new(io::poset_from_json(&parse(s)?).map_err(err)?) })
    }

    /// A random finite upper semilattice, reproducible from `seed`.
    #[staticmethod]
    #[pyo3(signature = (seed, min_len = 4, max_len = 8))]
    fn random_semilattice(seed: u64, min_len: usize, max_len: usize) -> Self {
        PyPoset { inner: Arc::new(random_upper_semilattice(&mut rng(seed), min_len, max_len)) }
    }

    fn to_json(&self) -> String {
        io::to_canonical_string(&io::poset_to_json(&self.inner))
    }

    fn names(&self) -> Vec<String> {
        self.inner.names().to_vec()
    }

    fn covers(&self) -> Vec<(String, String)> {
        let p = &self.inner;
        p.covers().iter().map(|&(a, b)| (p.name(a).to_string(), p.name(b).to_string())).collect()
    }

    fn leq(&self, a: &str, b: &str) -> PyResult<bool> {
        Ok(self.inner.leq(self.inner.index_of(a).map_err(err)?, self.inner.index_of(b).map_err(err)?))
    }

    fn join(&self, elems: Vec<String>) -> PyResult<Option<String>> {
        let idx = elems.iter().map(|e| self.inner.index_of(e)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        Ok(self.inner.join(&idx).map(|j| self.inner.name(j).to_string()))
    }

    fn is_upper_semilattice(&self) -> bool {
        self.inner.is_upper_semilattice()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Poset({} elements, {} covers)", self.inner.len(), self.inner.covers().len())
    }
}

/// A functor from a poset to finite-dimensional vector spaces over GF(p).
#[pyclass(name = "Module", frozen)]
struct PyModule_ {
    inner: Arc<PersistenceModule>,
}

#[pymethods]
impl PyModule_ {
    /// Parse the JSON module format; `field` overrides the file's field.
    #[staticmethod]
    #[pyo3(signature = (s, field = None))]
    fn from_json(s: &str, field: Option<u64>) -> PyResult<Self> {
        let f = field.map(self::field).transpose()?;
        Ok(PyModule_ { inner: Arc::new(io::module_from_json(&parse(s)?, f).map_err(err)?) })
    }

    /// The demo module M0 on grid(5,2).
    #[staticmethod]
    fn m0() -> Self {
        PyModule_ { inner: Arc::new(PersistenceModule::m0_demo()) }
    }

    #[staticmethod]
    #[pyo3(signature = (poset, seed, field = 2, max_gens = 3, max_rels = 3))]
    fn random(poset: &PyPoset, seed: u64, field: u64, max_gens: usize, max_rels: usize) -> PyResult<Self> {
        let m = random_module(&mut rng(seed), &poset.inner, self::field(field)?, max_gens, max_rels).map_err(err)?;
        Ok(PyModule_ { inner: Arc::new(m) })
    }

    fn to_json(&self) -> String {
        io::to_canonical_string(&io::module_to_json(&self.inner))
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(err)
    }

    /// Nonzero dimensions by element name.
    fn dims(&self) -> std::collections::BTreeMap<String, usize> {
        self.inner.named_dims()
    }

    #[getter]
    fn field(&self) -> u64 {
        self.inner.field().characteristic() as u64
    }

    #[getter]
    fn poset(&self) -> PyPoset {
        PyPoset { inner: self.inner.poset_arc().clone() }
    }

    /// Standard Betti diagram by minimal resolution or by Koszul homology.
    #[pyo3(signature = (method = "resolution", dmax = 8))]
    fn betti(&self, method: &str, dmax: usize) -> PyResult<PyBetti> {
        let b = match method {
            "resolution" => betti(&self.inner, dmax),
            "koszul" => betti_koszul_all(&self.inner, dmax),
            _ => return Err(RelbettiError::new_err(format!("unknown method {method}"))),
        }
        .map_err(err)?;
        Ok(PyBetti { inner: b, names: self.inner.poset_arc().clone() })
    }

    fn __repr__(&self) -> String {
        format!("Module(total dim {} over GF({}))", self.inner.total_dim(), self.field())
    }
}

/// Multiplicities `(degree, element) -> count`.
#[pyclass(name = "Betti", frozen)]
struct PyBetti {
    inner: BettiDiagram,
    names: Arc<relbetti::Poset>,
}

#[pymethods]
impl PyBetti {
    /// `(degree, element name, multiplicity)` triples.
    fn entries(&self) -> Vec<(usize, String, usize)> {
        self.inner.iter().map(|(d, a, m)| (d, self.names.name(a).to_string(), m)).collect()
    }

    fn get(&self, d: usize, at: &str) -> PyResult<usize> {
        Ok(self.inner.get(d, self.names.index_of(at).map_err(err)?))
    }

    fn total(&self, d: usize) -> usize {
        self.inner.total(d)
    }

    fn to_json(&self) -> String {
        io::to_canonical_string(&io::betti_to_json(&self.inner, &self.names))
    }

    fn __eq__(&self, other: &PyBetti) -> bool {
        self.entries() == other.entries()
    }

    fn __repr__(&self) -> String {
        format!("Betti({:?})", self.entries())
    }
}

fn report(r: StatusReport, j: &relbetti::Poset) -> (bool, Option<(String, String)>) {
    (r.holds, r.witness.map(|(a, b)| (j.name(a).to_string(), j.name(b).to_string())))
}

/// A collection `P: J^op -> Fun(I, vect)`.
#[pyclass(name = "Collection", frozen)]
struct PyCollection {
    inner: Arc<CollectionFunctor>,
}

#[pymethods]
impl PyCollection {
    /// One of the builtin families, over `poset`. `params` is a JSON object of extra parameters.
    #[staticmethod]
    #[pyo3(signature = (name, poset, field = 2, params = None, max_antichains = None))]
    fn builtin(
        name: &str,
        poset: &PyPoset,
        field: u64,
        params: Option<&str>,
        max_antichains: Option<usize>,
    ) -> PyResult<Self> {
        let kind: BuiltinKind = name.parse().map_err(err)?;
        let mut spec = io::BuiltinSpec::new(kind);
        if let Some(p) = params {
            match parse(p)? {
                Value::Object(m) => spec.params = m,
                _ => return Err(RelbettiError::new_err("params must be a JSON object")),
            }
        }
        let max = max_antichains.unwrap_or_else(default_max_antichains);
        let c = spec.build(&poset.inner, self::field(field)?, max).map_err(err)?;
        Ok(PyCollection { inner: Arc::new(c) })
    }

    /// Builtin or explicit collection JSON over `poset`.
    #[staticmethod]
    #[pyo3(signature = (s, poset, field = 2))]
    fn from_json(s: &str, poset: &PyPoset, field: u64) -> PyResult<Self> {
        let c = io::collection_from_json(&parse(s)?, &poset.inner, self::field(field)?, default_max_antichains())
            .map_err(err)?;
        Ok(PyCollection { inner: Arc::new(c) })
    }

    fn builtin_names(&self) -> Vec<&'static str> {
        BuiltinKind::ALL.iter().map(|k| k.name()).collect()
    }

    #[getter]
    fn parameters(&self) -> PyPoset {
        PyPoset { inner: self.inner.j_poset().clone() }
    }

    fn thin(&self) -> (bool, Option<(String, String)>) {
        report(self.inner.thin_report(), self.inner.j_poset())
    }

    fn flat(&self) -> (bool, Option<(String, String)>) {
        report(self.inner.flat_report(), self.inner.j_poset())
    }

    fn degeneracy(&self) -> PyResult<(bool, Option<(String, String)>)> {
        Ok(report(self.inner.degeneracy_report().map_err(err)?, self.inner.j_poset()))
    }

    /// Relative Betti diagram of `module`; Koszul refuses an unverified hypothesis unless `force`.
    #[pyo3(signature = (module, method = "koszul", dmax = 8, force = false))]
    fn relative_betti(&self, py: Python<'_>, module: &PyModule_, method: &str, dmax: usize, force: bool) -> PyResult<PyBetti> {
        let (p, m) = (self.inner.clone(), module.inner.clone());
        let b = py
            .detach(move || match method {
                "koszul" => relative_betti_koszul_all(&p, &m, dmax, force).map(|(b, _)| b),
                "resolution" => relative_betti(&p, &m, dmax),
                _ => Err(relbetti::Error::Invalid(format!("unknown method {method}"))),
            })
            .map_err(err)?;
        Ok(PyBetti { inner: b, names: self.inner.j_poset().clone() })
    }

    fn __len__(&self) -> usize {
        self.inner.j_poset().len()
    }

    fn __repr__(&self) -> String {
        format!("Collection({}, {} parameters)", self.inner.label(), self.inner.j_poset().len())
    }
}

#[pymodule]
fn relbetti_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoset>()?;
    m.add_class::<PyModule_>()?;
    m.add_class::<PyBetti>()?;
    m.add_class::<PyCollection>()?;
    m.add("RelbettiError", m.py().get_type::<RelbettiError>())?;
    Ok(())
}
